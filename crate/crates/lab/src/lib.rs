//! Configuration-driven runner for the `graded-harmonic` experiments.
//!
//! A run reads one JSON [`config::ExperimentConfig`], evaluates its
//! parameter cells on a worker pool, writes CSV tables and a
//! [`RunManifest`] into the output directory, and reports pass or fail.

pub mod config;
pub mod experiments;
pub mod plot;

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub use config::ExperimentConfig;
pub use experiments::{Context, Experiment, Outcome, REGISTRY};

/// Environment variable holding the worker count.
pub const WORKERS_ENV: &str = "GRADED_LAB_WORKERS";

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, thiserror::Error)]
pub enum LabError {
    #[error("config error: {0}")]
    Config(String),
    #[error("computation failed: {0}")]
    Compute(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("missing output file {0}")]
    MissingOutput(PathBuf),
    #[error("malformed file {path}: {message}")]
    Malformed { path: PathBuf, message: String },
}

impl LabError {
    /// 2 for configuration errors, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Config(_) => 2,
            _ => 1,
        }
    }

    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        LabError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

impl From<graded_harmonic::Error> for LabError {
    fn from(e: graded_harmonic::Error) -> Self {
        use graded_harmonic::Error::*;
        match e {
            InvalidExponent(_) | InvalidParameter(_) | Hypothesis(_) | NonPositiveDilation(_)
            | DilationNotRepresentable(_) | NotGridAligned | DimensionMismatch { .. } => LabError::Config(e.to_string()),
            _ => LabError::Compute(e.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentStatus {
    pub name: String,
    pub passed: bool,
    pub summary: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunManifest {
    /// SHA-256 of the canonical JSON of the validated config.
    pub config_hash: String,
    pub version: String,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
    pub workers: usize,
    pub experiments: Vec<ExperimentStatus>,
    /// CSV files, relative to the manifest.
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn passed(&self) -> bool {
        self.experiments.iter().all(|e| e.passed)
    }

    pub fn load(path: &Path) -> Result<Self, LabError> {
        let text = fs::read_to_string(path).map_err(|e| LabError::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| LabError::Malformed {
            path: path.to_path_buf(),
            message: e.to_string(),
        })
    }
}

pub fn config_hash(cfg: &ExperimentConfig) -> String {
    let canonical = serde_json::to_vec(cfg).expect("config serializes");
    Sha256::digest(&canonical).iter().map(|b| format!("{b:02x}")).collect()
}

/// Worker count from [`WORKERS_ENV`], defaulting to the available cores.
pub fn workers_from_env() -> Result<usize, LabError> {
    match std::env::var(WORKERS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(LabError::Config(format!("{WORKERS_ENV} must be a positive integer, got `{v}`"))),
        },
        Err(_) => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig, LabError> {
    let text = fs::read_to_string(path).map_err(|e| LabError::Config(format!("{}: {e}", path.display())))?;
    ExperimentConfig::from_json(&text)
}

/// Runs the experiment without touching the file system.
pub fn execute(cfg: &ExperimentConfig, workers: usize) -> Result<Outcome, LabError> {
    cfg.validate()?;
    let kind = cfg.experiment_kind()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| LabError::Compute(e.to_string()))?;
    pool.install(|| {
        let ctx = Context::new(cfg)?;
        kind.run(&ctx)
    })
}

/// Runs the experiment, writes its tables and `manifest.json` into the
/// output directory and returns the manifest.
pub fn run(cfg: &ExperimentConfig, workers: usize) -> Result<RunManifest, LabError> {
    let outcome = execute(cfg, workers)?;
    let dir = &cfg.output_dir;
    fs::create_dir_all(dir).map_err(|e| LabError::io(dir, e))?;
    let mut outputs = Vec::new();
    for t in &outcome.tables {
        let path = dir.join(&t.file);
        fs::write(&path, &t.bytes).map_err(|e| LabError::io(&path, e))?;
        outputs.push(t.file.clone());
    }
    let manifest = RunManifest {
        config_hash: config_hash(cfg),
        version: env!("CARGO_PKG_VERSION").to_string(),
        timestamp: SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()),
        workers,
        experiments: vec![ExperimentStatus {
            name: cfg.experiment.clone(),
            passed: outcome.passed,
            summary: outcome.summary,
        }],
        outputs,
    };
    let path = dir.join(MANIFEST_FILE);
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    fs::write(&path, text + "\n").map_err(|e| LabError::io(&path, e))?;
    Ok(manifest)
}

/// Experiment names with their one-line descriptions.
pub fn list_experiments() -> String {
    let width = REGISTRY.iter().map(|(_, n, _)| n.len()).max().unwrap_or(0);
    REGISTRY
        .iter()
        .map(|(_, n, d)| format!("{n:<width$}  {d}\n"))
        .collect()
}

/// Matrix Market text of the finite-difference operator of a config.
pub fn export_matrix(cfg: &ExperimentConfig) -> Result<String, LabError> {
    let op = cfg.build_operator()?;
    let m = op.sparse_matrix().ok_or_else(|| {
        LabError::Config("only the Heisenberg sub-Laplacian has an assembled sparse matrix".into())
    })?;
    let mut out = String::new();
    m.write_matrix_market(&mut out).expect("writing to a String");
    Ok(out)
}
