//! Two-column plot data for slope-type tables. Nothing is rendered.

use std::fs;
use std::path::{Path, PathBuf};

use crate::experiments::SLOPE_HEADER;
use crate::{LabError, RunManifest};

struct Series {
    key: Vec<String>,
    slope: f64,
    points: Vec<(f64, f64)>,
}

fn parse(path: &Path, s: &str) -> Result<f64, LabError> {
    s.parse::<f64>().map_err(|e| LabError::Malformed {
        path: path.to_path_buf(),
        message: format!("`{s}`: {e}"),
    })
}

fn read_series(path: &Path) -> Result<Option<Vec<Series>>, LabError> {
    let mut rd = csv::Reader::from_path(path).map_err(|e| match e.into_kind() {
        csv::ErrorKind::Io(io) => LabError::io(path, io),
        other => LabError::Malformed {
            path: path.to_path_buf(),
            message: format!("{other:?}"),
        },
    })?;
    let header = rd
        .headers()
        .map_err(|e| LabError::Malformed {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?
        .clone();
    if header.iter().ne(SLOPE_HEADER.iter().copied()) {
        return Ok(None);
    }
    let mut series: Vec<Series> = Vec::new();
    for rec in rd.records() {
        let rec = rec.map_err(|e| LabError::Malformed {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        let key: Vec<String> = (0..5).map(|i| rec[i].to_string()).collect();
        let logarithmic = rec[0].starts_with("nikolskii");
        let l = parse(path, &rec[5])?;
        let x = if logarithmic { l.log2() } else { l };
        let y = parse(path, &rec[6])?.log2();
        let slope = parse(path, &rec[7])?;
        match series.iter_mut().find(|s| s.key == key) {
            Some(s) => s.points.push((x, y)),
            None => series.push(Series {
                key,
                slope,
                points: vec![(x, y)],
            }),
        }
    }
    Ok(Some(series))
}

fn write(path: &Path, points: &[(f64, f64)]) -> Result<(), LabError> {
    let text: String = points.iter().map(|(x, y)| format!("{x} {y}\n")).collect();
    fs::write(path, text).map_err(|e| LabError::io(path, e))
}

/// For every slope table in the manifest and every `(experiment, group, p,
/// q, r)` series in it, writes `<table>_<k>.dat` with `(x, log2 ratio)`
/// rows and `<table>_<k>_fit.dat` with the two endpoints of the fitted
/// line. `x` is `log2 L` for Nikolskii tables and `j` otherwise.
pub fn emit_plot_data(manifest_path: &Path) -> Result<Vec<PathBuf>, LabError> {
    let manifest = RunManifest::load(manifest_path)?;
    let dir = manifest_path.parent().unwrap_or(Path::new("."));
    let mut written = Vec::new();
    for out in &manifest.outputs {
        let path = dir.join(out);
        if !path.is_file() {
            return Err(LabError::MissingOutput(path));
        }
        let Some(series) = read_series(&path)? else {
            continue;
        };
        let stem = Path::new(out).file_stem().and_then(|s| s.to_str()).unwrap_or("table").to_string();
        for (k, s) in series.iter().enumerate() {
            let data = dir.join(format!("{stem}_{k}.dat"));
            write(&data, &s.points)?;
            let n = s.points.len() as f64;
            let mx = s.points.iter().map(|p| p.0).sum::<f64>() / n;
            let my = s.points.iter().map(|p| p.1).sum::<f64>() / n;
            let b = my - s.slope * mx;
            let lo = s.points.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
            let hi = s.points.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
            let fit = dir.join(format!("{stem}_{k}_fit.dat"));
            write(&fit, &[(lo, b + s.slope * lo), (hi, b + s.slope * hi)])?;
            written.push(data);
            written.push(fit);
        }
    }
    Ok(written)
}
