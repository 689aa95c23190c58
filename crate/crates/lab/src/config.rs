//! JSON experiment configuration with a strict schema.

use std::path::PathBuf;

use graded_harmonic::{DyadicPartition, Grid, GroupSpec, RocklandOp, ScalarMultiplier, Smoothness};
use serde::{Deserialize, Serialize};

use crate::experiments::{self, Experiment};
use crate::LabError;

/// Exponents accept a number or one of `"inf"`, `"infinity"`.
mod extended {
    use serde::de::{self, Deserializer, Visitor};
    use serde::ser::{SerializeSeq, Serializer};
    use serde::Deserialize;

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Num(f64),
        Text(String),
    }

    fn parse(raw: Raw) -> Result<f64, String> {
        match raw {
            Raw::Num(v) => Ok(v),
            Raw::Text(s) => match s.to_ascii_lowercase().as_str() {
                "inf" | "infinity" | "+inf" => Ok(f64::INFINITY),
                other => Err(format!("expected a number or \"inf\", got \"{other}\"")),
            },
        }
    }

    struct Wrapped(f64);

    impl serde::Serialize for Wrapped {
        fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
            if self.0 == f64::INFINITY {
                s.serialize_str("inf")
            } else {
                s.serialize_f64(self.0)
            }
        }
    }

    pub fn serialize<S: Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for x in v {
            seq.serialize_element(&Wrapped(*x))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = Vec<f64>;
            fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
                f.write_str("a list of numbers or \"inf\"")
            }
            fn visit_seq<A: de::SeqAccess<'de>>(self, mut seq: A) -> Result<Vec<f64>, A::Error> {
                let mut out = Vec::new();
                while let Some(raw) = seq.next_element::<Raw>()? {
                    out.push(parse(raw).map_err(de::Error::custom)?);
                }
                Ok(out)
            }
        }
        d.deserialize_seq(V)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum GroupConfig {
    Abelian { weights: Vec<i64> },
    Heisenberg,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub half_extent: Vec<f64>,
    pub counts: Vec<usize>,
}

/// Monomial exponents `m_i` of the abelian symbol `sum_i xi_i^{2 m_i}`.
/// The Heisenberg group always uses the sub-Laplacian.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorConfig {
    pub exponents: Vec<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum SmoothnessConfig {
    #[default]
    CInfinity,
    Cubic,
}

impl From<SmoothnessConfig> for Smoothness {
    fn from(s: SmoothnessConfig) -> Self {
        match s {
            SmoothnessConfig::CInfinity => Smoothness::CInfinity,
            SmoothnessConfig::Cubic => Smoothness::Cubic,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct PartitionConfig {
    #[serde(default)]
    pub smoothness: SmoothnessConfig,
    /// Second partition for the independence experiment.
    #[serde(default = "cubic")]
    pub alternate: SmoothnessConfig,
}

fn cubic() -> SmoothnessConfig {
    SmoothnessConfig::Cubic
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum MultiplierConfig {
    One,
    Heat { t: f64 },
    ImaginaryPower { tau: f64 },
    Power { s: f64 },
    SmoothCutoff { level: f64, width: f64 },
    Sine,
}

impl MultiplierConfig {
    pub fn build(&self) -> ScalarMultiplier {
        match *self {
            MultiplierConfig::One => ScalarMultiplier::one(),
            MultiplierConfig::Heat { t } => ScalarMultiplier::heat(t),
            MultiplierConfig::ImaginaryPower { tau } => ScalarMultiplier::imaginary_power(tau),
            MultiplierConfig::Power { s } => ScalarMultiplier::power(s),
            MultiplierConfig::SmoothCutoff { level, width } => ScalarMultiplier::smooth_cutoff(level, width),
            MultiplierConfig::Sine => ScalarMultiplier::real("sin", f64::sin),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    /// Lebesgue exponents.
    #[serde(default, with = "extended")]
    pub p: Vec<f64>,
    /// Besov summation or second Lebesgue exponents.
    #[serde(default, with = "extended")]
    pub q: Vec<f64>,
    #[serde(default)]
    pub r: Vec<f64>,
    /// Spectral levels `L`.
    #[serde(default)]
    pub levels: Vec<f64>,
    /// Dilation exponents `j` (dilation by `2^j`).
    #[serde(default)]
    pub j: Vec<u32>,
    #[serde(default)]
    pub theta: Vec<f64>,
    /// Dual Sobolev orders.
    #[serde(default)]
    pub s: Vec<f64>,
    /// Dilation factors of the dual scaling check.
    #[serde(default)]
    pub scales: Vec<f64>,
    #[serde(default)]
    pub eps: Vec<f64>,
    #[serde(default)]
    pub shifts: Vec<Vec<f64>>,
    #[serde(default)]
    pub multipliers: Vec<MultiplierConfig>,
    #[serde(default = "yes")]
    pub homogeneous: bool,
    /// Rebuild the grid for each dilation instead of resampling.
    #[serde(default)]
    pub codilate: bool,
    /// Samples per dyadic interval for variation estimates.
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// Radius of the translated quasi-ball.
    #[serde(default = "one")]
    pub radius: f64,
    /// Lowest level of the lacunary probe, default `levels[0] / 16`.
    #[serde(default)]
    pub probe_lowest: Option<f64>,
    /// Width of the dilated Gaussian, default the base scale of the box.
    #[serde(default)]
    pub width: Option<f64>,
    /// Modulation frequency of the dilated Gaussian.
    #[serde(default)]
    pub omega: f64,
}

fn yes() -> bool {
    true
}

fn one() -> f64 {
    1.0
}

fn default_samples() -> usize {
    64
}

impl Default for Params {
    fn default() -> Self {
        serde_json::from_str("{}").expect("all fields have defaults")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyConfig {
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default = "tol_slope")]
    pub slope: f64,
    #[serde(default = "tol_residual")]
    pub residual: f64,
    #[serde(default = "tol_refinement")]
    pub refinement: f64,
    #[serde(default = "tol_relative")]
    pub relative: f64,
}

fn tol_slope() -> f64 {
    0.05
}

fn tol_residual() -> f64 {
    graded_harmonic::regression::RESIDUAL_GATE
}

fn tol_refinement() -> f64 {
    graded_harmonic::besov::REFINEMENT_TOLERANCE
}

fn tol_relative() -> f64 {
    1e-6
}

impl Default for Tolerances {
    fn default() -> Self {
        serde_json::from_str("{}").expect("all fields have defaults")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: String,
    pub group: GroupConfig,
    pub grid: GridConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub operator: Option<OperatorConfig>,
    #[serde(default)]
    pub partition: PartitionConfig,
    #[serde(default)]
    pub params: Params,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<FamilyConfig>,
    #[serde(default = "default_output")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub tolerances: Tolerances,
}

fn default_output() -> PathBuf {
    PathBuf::from("out")
}

fn invalid(msg: impl Into<String>) -> LabError {
    LabError::Config(msg.into())
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, LabError> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| invalid(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn experiment_kind(&self) -> Result<Experiment, LabError> {
        experiments::lookup(&self.experiment)
            .ok_or_else(|| invalid(format!("unknown experiment `{}`; see `graded-lab list`", self.experiment)))
    }

    pub fn spec(&self) -> Result<GroupSpec, LabError> {
        match &self.group {
            GroupConfig::Abelian { weights } => GroupSpec::abelian(weights).map_err(|e| invalid(e.to_string())),
            GroupConfig::Heisenberg => Ok(GroupSpec::heisenberg()),
        }
    }

    pub fn group_label(&self) -> String {
        match &self.group {
            GroupConfig::Abelian { weights } => {
                let w: Vec<String> = weights.iter().map(|w| w.to_string()).collect();
                format!("abelian({})", w.join(";"))
            }
            GroupConfig::Heisenberg => "heisenberg".into(),
        }
    }

    pub fn build_grid(&self) -> Result<Grid, LabError> {
        let spec = self.spec()?;
        Grid::for_group(&spec, &self.grid.half_extent, &self.grid.counts).map_err(|e| invalid(e.to_string()))
    }

    /// Default abelian exponents make `m_i w_i` constant.
    fn exponents(&self) -> Vec<u32> {
        if let Some(op) = &self.operator {
            return op.exponents.clone();
        }
        match &self.group {
            GroupConfig::Abelian { weights } => {
                let lcm = weights.iter().fold(1i64, |a, &w| a / gcd(a, w.max(1)) * w.max(1));
                weights.iter().map(|&w| (lcm / w.max(1)) as u32).collect()
            }
            GroupConfig::Heisenberg => Vec::new(),
        }
    }

    pub fn build_operator(&self) -> Result<RocklandOp, LabError> {
        let grid = self.build_grid()?;
        let spec = self.spec()?;
        let op = match &self.group {
            GroupConfig::Abelian { .. } => RocklandOp::abelian_symbol_operator(&spec, &grid, &self.exponents()),
            GroupConfig::Heisenberg => RocklandOp::heisenberg_sublaplacian(&grid),
        };
        op.map_err(|e| invalid(e.to_string()))
    }

    pub fn smoothness(&self) -> Smoothness {
        self.partition.smoothness.into()
    }

    pub fn partition_for(&self, op: &RocklandOp) -> DyadicPartition {
        DyadicPartition::covering(op.spectral_bound(), self.smoothness())
    }

    /// Checks everything that does not need a computation.
    pub fn validate(&self) -> Result<(), LabError> {
        let kind = self.experiment_kind()?;
        let spec = self.spec()?;
        let dim = spec.dimension();
        if self.grid.half_extent.len() != dim || self.grid.counts.len() != dim {
            return Err(invalid(format!(
                "grid needs {dim} half extents and counts for group {}",
                self.group_label()
            )));
        }
        if self.grid.half_extent.iter().any(|l| !(l.is_finite() && *l > 0.0)) {
            return Err(invalid("grid half extents must be positive and finite"));
        }
        if self.grid.counts.iter().any(|&n| n < 4) {
            return Err(invalid("every grid axis needs at least 4 points"));
        }
        if let Some(op) = &self.operator {
            if matches!(self.group, GroupConfig::Heisenberg) {
                return Err(invalid("operator exponents apply to abelian groups only"));
            }
            if op.exponents.len() != dim || op.exponents.contains(&0) {
                return Err(invalid(format!("operator needs {dim} positive exponents")));
            }
        }
        let t = &self.tolerances;
        for (name, v) in [
            ("slope", t.slope),
            ("residual", t.residual),
            ("refinement", t.refinement),
            ("relative", t.relative),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(invalid(format!("tolerance `{name}` must be positive and finite, got {v}")));
            }
        }
        let pr = &self.params;
        for &p in &pr.p {
            if p.is_nan() || p < 1.0 {
                return Err(invalid(format!("Lebesgue exponent violates p ≥ 1: p = {p}")));
            }
        }
        for &q in &pr.q {
            if kind.lebesgue_q() && (q.is_nan() || q < 1.0) {
                return Err(invalid(format!("Lebesgue exponent violates q ≥ 1: q = {q}")));
            }
            if q.is_nan() || q <= 0.0 {
                return Err(invalid(format!("summation exponent violates q > 0: q = {q}")));
            }
        }
        if pr.r.iter().chain(&pr.levels).chain(&pr.theta).chain(&pr.s).chain(&pr.scales).chain(&pr.eps).any(|v| !v.is_finite()) {
            return Err(invalid("r, levels, theta, s, scales and eps must be finite"));
        }
        if pr.levels.iter().any(|l| *l <= 0.0) || pr.scales.iter().any(|l| *l <= 0.0) {
            return Err(invalid("levels and scales must be positive"));
        }
        if pr.theta.iter().any(|t| !(*t > 0.0 && *t < 1.0)) {
            return Err(invalid("theta must lie in (0, 1)"));
        }
        if pr.samples < graded_harmonic::multipliers::MIN_SAMPLES {
            return Err(invalid(format!(
                "samples must be at least {}",
                graded_harmonic::multipliers::MIN_SAMPLES
            )));
        }
        if pr.shifts.iter().any(|s| s.len() != dim) {
            return Err(invalid(format!("every shift needs {dim} coordinates")));
        }
        if kind.uses_family() && self.family.is_none() {
            return Err(invalid(format!(
                "experiment `{}` samples the randomized standard family; `family.seed` is mandatory",
                self.experiment
            )));
        }
        kind.check_params(self)
    }
}
