//! The experiment registry and the driver behind each name.

use graded_harmonic::besov::{besov_report, lp_equivalence_refined, BesovParams};
use graded_harmonic::calculus::{apply_multiplier, Method, ScalarMultiplier};
use graded_harmonic::family::{base_scale, modulated_gaussian, sample_all, smoothed_quasi_ball, standard_family, Member};
use graded_harmonic::inequalities::{
    embedding_dilation, embedding_holder, embedding_lebesgue, embedding_lq_chain, embedding_sobolev_refined,
    lacunary_probe, nikolskii_bound_check, nikolskii_constant_abelian, nikolskii_experiment,
    translation_limit_experiment, DilationMode, EmbeddingReport, SlopeReport,
};
use graded_harmonic::interpolation::{interpolation_besov_refined, partition_independence_refined, RatioBracket, SobolevSpace};
use graded_harmonic::multipliers::{
    besov_transfer_experiment, marcinkiewicz_check, multiplier_boundedness_refined, spectral_levels, spectral_sup,
};
use graded_harmonic::partition::{log_samples, validate_partition, BlockFamily};
use graded_harmonic::{besov, DyadicPartition, GroupKind, GroupSpec, RocklandOp, SampledFunction};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::LabError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Invariants,
    LpEquivalence,
    BesovNorm,
    Nikolskii,
    NikolskiiBound,
    DualDilation,
    EmbeddingLq,
    EmbeddingHolder,
    EmbeddingDilation,
    EmbeddingSobolev,
    EmbeddingLebesgue,
    Interpolation,
    PartitionIndependence,
    Marcinkiewicz,
    MultiplierTransfer,
    TranslationLimit,
}

pub const REGISTRY: &[(Experiment, &str, &str)] = &[
    (
        Experiment::Invariants,
        "invariants",
        "operator symmetry and positivity, partition of unity, Chebyshev calculus against the dense oracle",
    ),
    (
        Experiment::LpEquivalence,
        "lp-equivalence",
        "Littlewood-Paley theorem: ||f||_p is comparable to the square function ||(sum |psi_l(R) f|^2)^{1/2}||_p",
    ),
    (Experiment::BesovNorm, "besov-norm", "dyadic block norms and Besov aggregates on the standard family"),
    (
        Experiment::Nikolskii,
        "nikolskii",
        "Nikolskii inequality: ||T_L f||_q / ||T_L f||_p grows like L^{(Q/nu)(1/p - 1/q)}",
    ),
    (
        Experiment::NikolskiiBound,
        "nikolskii-bound",
        "Nikolskii inequality with the computed kernel constant (abelian groups)",
    ),
    (
        Experiment::DualDilation,
        "dual-dilation",
        "dilation lemma: dual Sobolev norms of sigma o D_r scale like r^{s - Q/2}",
    ),
    (Experiment::EmbeddingLq, "embedding-lq", "Besov embedding in the summation index q, constant one"),
    (
        Experiment::EmbeddingHolder,
        "embedding-holder",
        "Besov embedding trading smoothness eps for a larger q, Holder constant",
    ),
    (
        Experiment::EmbeddingDilation,
        "embedding-dilation",
        "Besov embedding between p1 <= p2 with the smoothness loss Q(1/p1 - 1/p2), seen through dilations",
    ),
    (
        Experiment::EmbeddingSobolev,
        "embedding-sobolev",
        "Sobolev sandwich B^r_{p,p} -> H^{r,p} -> B^r_{p,2} for 1 < p <= 2",
    ),
    (
        Experiment::EmbeddingLebesgue,
        "embedding-lebesgue",
        "Besov embedding B^{Q/p-Q/q}_{p,1} -> L^q with the discrete Young constant",
    ),
    (
        Experiment::Interpolation,
        "interpolation",
        "real interpolation of a Sobolev couple compared with the Besov norm",
    ),
    (
        Experiment::PartitionIndependence,
        "partition-independence",
        "Besov norms from two admissible dyadic partitions are equivalent",
    ),
    (
        Experiment::Marcinkiewicz,
        "marcinkiewicz",
        "Marcinkiewicz multiplier theorem: bounded dyadic variation gives L^p-bounded m(R)",
    ),
    (
        Experiment::MultiplierTransfer,
        "multiplier-transfer",
        "multiplier theorem on Besov spaces: an L^p bound for m(R) transfers blockwise",
    ),
    (
        Experiment::TranslationLimit,
        "translation-limit",
        "||f + f(. h)||_p / ||f||_p tends to 2^{1/p} once the supports separate",
    ),
];

pub fn lookup(name: &str) -> Option<Experiment> {
    REGISTRY.iter().find(|(_, n, _)| *n == name).map(|(e, _, _)| *e)
}

/// One CSV file of an experiment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    pub file: String,
    pub bytes: Vec<u8>,
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub passed: bool,
    pub summary: String,
    pub tables: Vec<Table>,
}

pub fn table<R: Serialize>(file: &str, rows: &[R]) -> Result<Table, LabError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    for row in rows {
        w.serialize(row).map_err(|e| LabError::Compute(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| LabError::Compute(e.to_string()))?;
    Ok(Table {
        file: file.to_string(),
        bytes,
    })
}

/// Everything a driver needs, built once per run.
pub struct Context<'a> {
    pub cfg: &'a ExperimentConfig,
    pub spec: GroupSpec,
    pub op: RocklandOp,
    pub members: Vec<Member>,
    pub group: String,
}

impl<'a> Context<'a> {
    pub fn new(cfg: &'a ExperimentConfig) -> Result<Self, LabError> {
        let spec = cfg.spec()?;
        let op = cfg.build_operator()?;
        let members = match &cfg.family {
            Some(f) => standard_family(&spec, &cfg.grid.half_extent, f.seed),
            None => Vec::new(),
        };
        Ok(Self {
            cfg,
            group: cfg.group_label(),
            spec,
            op,
            members,
        })
    }

    fn sampled(&self) -> Result<Vec<SampledFunction>, LabError> {
        Ok(sample_all(&self.members, self.op.grid())?)
    }

    fn names(&self) -> Vec<String> {
        self.members.iter().map(|m| m.name.clone()).collect()
    }

    /// Smallest partition covering `R` or `I + R`.
    fn partition(&self, homogeneous: bool) -> DyadicPartition {
        let bound = if homogeneous {
            self.op.spectral_bound()
        } else {
            self.op.inhomogeneous().spectral_bound()
        };
        DyadicPartition::covering(bound, self.cfg.smoothness())
    }

    fn stable(&self, coarse: f64, fine: f64) -> bool {
        coarse > 0.0 && fine.is_finite() && (fine / coarse - 1.0).abs() <= self.cfg.tolerances.refinement
    }

    fn bracket_stable(&self, a: &RatioBracket, b: &RatioBracket) -> bool {
        self.stable(a.min, b.min) && self.stable(a.max, b.max)
    }
}

/// Parameter cells evaluated on the worker pool; output order is the
/// input order.
fn cells<T, R, F>(items: &[T], f: F) -> Result<Vec<R>, LabError>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> Result<R, LabError> + Sync + Send,
{
    items.par_iter().map(f).collect()
}

fn product3(a: &[f64], b: &[f64], c: &[f64]) -> Vec<(f64, f64, f64)> {
    let mut out = Vec::new();
    for &x in a {
        for &y in b {
            for &z in c {
                out.push((x, y, z));
            }
        }
    }
    out
}

fn zip_pairs(a: &[f64], b: &[f64]) -> Vec<(f64, f64)> {
    a.iter().copied().zip(b.iter().copied()).collect()
}

fn grid_label(fine: bool) -> &'static str {
    if fine {
        "fine"
    } else {
        "coarse"
    }
}

#[derive(Serialize)]
pub struct NormRow<'a> {
    pub experiment: &'a str,
    pub group: &'a str,
    pub p: f64,
    pub q: f64,
    pub r: f64,
    pub l: usize,
    pub block_norm: f64,
    pub aggregate: f64,
}

#[derive(Serialize)]
pub struct SlopeRow<'a> {
    pub experiment: &'a str,
    pub group: &'a str,
    pub p: f64,
    pub q: f64,
    pub r: f64,
    #[serde(rename = "L_or_j")]
    pub l_or_j: f64,
    pub ratio: f64,
    pub fitted_slope: f64,
    pub theoretical_slope: f64,
    pub residual: f64,
    pub constant: f64,
}

pub const SLOPE_HEADER: [&str; 11] = [
    "experiment",
    "group",
    "p",
    "q",
    "r",
    "L_or_j",
    "ratio",
    "fitted_slope",
    "theoretical_slope",
    "residual",
    "constant",
];

fn slope_rows<'a>(
    experiment: &'a str,
    group: &'a str,
    p: f64,
    q: f64,
    r: f64,
    abscissae: &[f64],
    rep: &SlopeReport,
) -> Vec<SlopeRow<'a>> {
    abscissae
        .iter()
        .zip(&rep.ratios)
        .map(|(x, ratio)| SlopeRow {
            experiment,
            group,
            p,
            q,
            r,
            l_or_j: *x,
            ratio: *ratio,
            fitted_slope: rep.fit.slope,
            theoretical_slope: rep.theoretical,
            residual: rep.fit.residual,
            constant: rep.constant,
        })
        .collect()
}

#[derive(Serialize)]
struct BvRow {
    j: i32,
    window: &'static str,
    variation: f64,
    stable: bool,
}

#[derive(Serialize)]
struct MultiplierRow<'a> {
    group: &'a str,
    p: f64,
    r: f64,
    q: f64,
    m_name: &'a str,
    lp_ratio: f64,
    besov_ratio: f64,
}

#[derive(Serialize)]
struct CheckRow<'a> {
    group: &'a str,
    check: String,
    value: f64,
    bound: f64,
    passed: bool,
}

#[derive(Serialize)]
struct LpRow<'a> {
    group: &'a str,
    p: f64,
    grid: &'static str,
    c_hat: f64,
    big_c_hat: f64,
    stable: bool,
}

#[derive(Serialize)]
struct InequalityRow<'a> {
    experiment: &'a str,
    group: &'a str,
    member: String,
    p: f64,
    q: f64,
    lhs: f64,
    rhs: f64,
    constant: f64,
}

#[derive(Serialize)]
struct BracketRow<'a> {
    group: &'a str,
    setting: String,
    grid: &'static str,
    min: f64,
    max: f64,
    stable: bool,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        REGISTRY.iter().find(|(e, _, _)| *e == self).map(|(_, n, _)| *n).expect("registered")
    }

    pub fn description(self) -> &'static str {
        REGISTRY.iter().find(|(e, _, _)| *e == self).map(|(_, _, d)| *d).expect("registered")
    }

    pub fn uses_family(self) -> bool {
        use Experiment::*;
        matches!(
            self,
            LpEquivalence
                | BesovNorm
                | EmbeddingLq
                | EmbeddingHolder
                | EmbeddingSobolev
                | EmbeddingLebesgue
                | Interpolation
                | PartitionIndependence
                | Marcinkiewicz
                | MultiplierTransfer
        )
    }

    /// `q` is a second Lebesgue exponent rather than a summation index.
    pub fn lebesgue_q(self) -> bool {
        matches!(self, Experiment::Nikolskii | Experiment::NikolskiiBound | Experiment::EmbeddingLebesgue)
    }

    pub fn check_params(self, cfg: &ExperimentConfig) -> Result<(), LabError> {
        use Experiment::*;
        let pr = &cfg.params;
        let name = self.name();
        let need = |ok: bool, what: &str| {
            if ok {
                Ok(())
            } else {
                Err(LabError::Config(format!("experiment `{name}` needs {what}")))
            }
        };
        let abelian = matches!(cfg.group, crate::config::GroupConfig::Abelian { .. });
        match self {
            Invariants => Ok(()),
            LpEquivalence => need(!pr.p.is_empty(), "params.p"),
            BesovNorm | PartitionIndependence => need(!pr.p.is_empty() && !pr.q.is_empty() && !pr.r.is_empty(), "params.p, q and r"),
            Nikolskii => {
                need(!pr.p.is_empty() && pr.p.len() == pr.q.len(), "params.p and q of equal length")?;
                need(pr.levels.len() >= 4, "params.levels with at least 4 entries")?;
                need(pr.levels.windows(2).all(|w| w[1] > w[0]), "increasing params.levels")?;
                need(pr.p.iter().zip(&pr.q).all(|(p, q)| p <= q), "p <= q in every pair")
            }
            NikolskiiBound => {
                need(abelian, "an abelian group")?;
                need(!pr.p.is_empty() && pr.p.len() == pr.q.len(), "params.p and q of equal length")?;
                need(!pr.levels.is_empty(), "params.levels")?;
                need(pr.p.iter().zip(&pr.q).all(|(p, q)| p <= q), "p <= q in every pair")
            }
            DualDilation => {
                need(abelian, "an abelian group")?;
                need(!pr.scales.is_empty() && !pr.s.is_empty(), "params.scales and s")?;
                need(pr.s.iter().all(|s| *s >= 0.0), "s >= 0")
            }
            EmbeddingLq | EmbeddingHolder => {
                need(!pr.r.is_empty() && !pr.eps.is_empty() && !pr.p.is_empty(), "params.r, eps and p")?;
                need(pr.q.len() == 2, "params.q = [q1, q2]")
            }
            EmbeddingDilation => {
                need(pr.r.len() == 1 && pr.q.len() == 1, "one value in params.r and q")?;
                need(pr.p.len() == 2 && pr.p[0] <= pr.p[1], "params.p = [p1, p2] with p1 <= p2")?;
                need(pr.j.len() >= 2, "params.j with at least 2 entries")
            }
            EmbeddingSobolev => {
                need(!pr.r.is_empty() && !pr.p.is_empty(), "params.r and p")?;
                need(pr.p.iter().all(|p| *p > 1.0 && *p <= 2.0), "1 < p <= 2")
            }
            EmbeddingLebesgue => need(!pr.p.is_empty() && pr.p.len() == pr.q.len(), "params.p and q of equal length"),
            Interpolation => {
                need(pr.r.len() == 2, "params.r = [r0, r1]")?;
                need(pr.p.len() == 1, "one value in params.p")?;
                need(!pr.theta.is_empty() && !pr.q.is_empty(), "params.theta and q")
            }
            Marcinkiewicz => need(!pr.multipliers.is_empty() && !pr.p.is_empty(), "params.multipliers and p"),
            MultiplierTransfer => need(
                !pr.multipliers.is_empty() && !pr.r.is_empty() && !pr.p.is_empty() && !pr.q.is_empty(),
                "params.multipliers, r, p and q",
            ),
            TranslationLimit => need(!pr.p.is_empty() && !pr.shifts.is_empty(), "params.p and shifts"),
        }
    }

    pub fn run(self, ctx: &Context) -> Result<Outcome, LabError> {
        use Experiment::*;
        match self {
            Invariants => invariants(ctx),
            LpEquivalence => lp_equivalence(ctx),
            BesovNorm => besov_norms(ctx),
            Nikolskii => nikolskii(ctx),
            NikolskiiBound => nikolskii_bound(ctx),
            DualDilation => dual_dilation(ctx),
            EmbeddingLq | EmbeddingHolder | EmbeddingLebesgue => embedding_checks(self, ctx),
            EmbeddingDilation => embedding_dilation_slopes(ctx),
            EmbeddingSobolev => embedding_sobolev(ctx),
            Interpolation => interpolation(ctx),
            PartitionIndependence => partition_independence(ctx),
            Marcinkiewicz => marcinkiewicz(ctx),
            MultiplierTransfer => multiplier_transfer(ctx),
            TranslationLimit => translation_limit(ctx),
        }
    }
}

fn invariants(ctx: &Context) -> Result<Outcome, LabError> {
    let op = &ctx.op;
    let seed = ctx.cfg.family.as_ref().map_or(0, |f| f.seed);
    let fam = sample_all(&standard_family(&ctx.spec, &ctx.cfg.grid.half_extent, seed), op.grid())?;
    let mut rows = Vec::new();
    let bound = op.spectral_bound();

    let (f, g) = (&fam[6], &fam[7]);
    let a = op.apply(f)?.inner(g)?;
    let b = f.inner(&op.apply(g)?)?;
    let scale = bound * f.lp_norm(2.0)? * g.lp_norm(2.0)?;
    rows.push(CheckRow {
        group: &ctx.group,
        check: "symmetry".into(),
        value: (a - b).norm() / scale,
        bound: 1e-10,
        passed: (a - b).norm() <= 1e-10 * scale,
    });

    let mut worst: f64 = 0.0;
    for f in &fam {
        let q = f.inner(&op.apply(f)?)?;
        worst = worst.min(q.re / (bound * f.lp_norm(2.0)?.powi(2)));
    }
    rows.push(CheckRow {
        group: &ctx.group,
        check: "positivity".into(),
        value: worst,
        bound: -1e-10,
        passed: worst >= -1e-10,
    });

    let part = ctx.partition(true);
    let top = 2f64.powi(part.max_level() as i32 - 1);
    let rep = validate_partition(&part, &log_samples(1e-3, top, 10_000));
    rows.push(CheckRow {
        group: &ctx.group,
        check: "partition-of-unity".into(),
        value: rep.max_sum_deviation,
        bound: 1e-10,
        passed: rep.passed,
    });

    if op.dense_eligible() {
        let heat = ScalarMultiplier::heat(1.0);
        let mut worst: f64 = 0.0;
        for f in &fam {
            let cheb = apply_multiplier(op, &heat, f, Method::ChebyshevAuto(1e-13))?;
            let dense = apply_multiplier(op, &heat, f, Method::DenseEig)?;
            worst = worst.max(cheb.sub(&dense)?.lp_norm(2.0)? / dense.lp_norm(2.0)?);
        }
        rows.push(CheckRow {
            group: &ctx.group,
            check: "chebyshev-vs-dense".into(),
            value: worst,
            bound: 1e-8,
            passed: worst <= 1e-8,
        });
    }
    let failed: Vec<String> = rows.iter().filter(|r| !r.passed).map(|r| r.check.clone()).collect();
    Ok(Outcome {
        passed: failed.is_empty(),
        summary: if failed.is_empty() {
            format!("{} invariants hold", rows.len())
        } else {
            format!("failed: {}", failed.join(", "))
        },
        tables: vec![table("invariants.csv", &rows)?],
    })
}

fn lp_equivalence(ctx: &Context) -> Result<Outcome, LabError> {
    let reps = cells(&ctx.cfg.params.p, |&p| {
        Ok(lp_equivalence_refined(&ctx.op, ctx.cfg.smoothness(), &ctx.members, p)?)
    })?;
    let mut rows = Vec::new();
    let mut passed = true;
    let mut worst = String::new();
    for rep in &reps {
        let st = ctx.stable(rep.coarse.c_hat, rep.fine.c_hat) && ctx.stable(rep.coarse.big_c_hat, rep.fine.big_c_hat);
        let mut ok = st && rep.coarse.bounded() && rep.fine.bounded();
        if rep.coarse.p == 2.0 {
            for r in [&rep.coarse, &rep.fine] {
                ok &= r.big_c_hat <= 1.0 + 1e-8 && r.c_hat >= 0.5f64.sqrt() - 1e-6;
            }
        }
        for (fine, r) in [(false, &rep.coarse), (true, &rep.fine)] {
            rows.push(LpRow {
                group: &ctx.group,
                p: r.p,
                grid: grid_label(fine),
                c_hat: r.c_hat,
                big_c_hat: r.big_c_hat,
                stable: st,
            });
        }
        if !ok {
            worst = format!("p = {}", rep.coarse.p);
        }
        passed &= ok;
    }
    Ok(Outcome {
        passed,
        summary: if passed {
            format!("{} exponents bounded and refinement-stable", reps.len())
        } else {
            format!("failed at {worst}")
        },
        tables: vec![table("lp_equivalence.csv", &rows)?],
    })
}

fn besov_norms(ctx: &Context) -> Result<Outcome, LabError> {
    let pr = &ctx.cfg.params;
    let fam = ctx.sampled()?;
    let part = ctx.partition(pr.homogeneous);
    let settings = product3(&pr.r, &pr.p, &pr.q);
    let reports = cells(&settings, |&(r, p, q)| {
        let params = BesovParams::new(r, p, q, pr.homogeneous)?;
        fam.iter().map(|f| Ok(besov_report(&ctx.op, &part, f, params)?)).collect::<Result<Vec<_>, LabError>>()
    })?;
    let labels: Vec<String> = (0..fam.len()).map(|i| format!("besov-norm[{i}]")).collect();
    let mut rows = Vec::new();
    let mut passed = true;
    for ((r, p, q), reps) in settings.iter().zip(&reports) {
        for (label, rep) in labels.iter().zip(reps) {
            let again = rep.recompute();
            passed &= rep.aggregate.is_finite() && (again - rep.aggregate).abs() <= 1e-12 * rep.aggregate.abs();
            for (l, b) in rep.block_norms.iter().enumerate() {
                rows.push(NormRow {
                    experiment: label,
                    group: &ctx.group,
                    p: *p,
                    q: *q,
                    r: *r,
                    l,
                    block_norm: *b,
                    aggregate: rep.aggregate,
                });
            }
        }
    }
    Ok(Outcome {
        passed,
        summary: format!("{} norms over {} members", settings.len() * fam.len(), fam.len()),
        tables: vec![table("besov_norms.csv", &rows)?],
    })
}

fn probe(ctx: &Context) -> Result<SampledFunction, LabError> {
    let pr = &ctx.cfg.params;
    let top = pr.levels.iter().copied().fold(0.0, f64::max);
    let low = pr.levels.iter().copied().fold(f64::INFINITY, f64::min);
    let lowest = pr.probe_lowest.unwrap_or(low / 16.0);
    Ok(lacunary_probe(&ctx.op, lowest, 2.0 * top, 3.0)?)
}

fn nikolskii(ctx: &Context) -> Result<Outcome, LabError> {
    let pr = &ctx.cfg.params;
    let tol = &ctx.cfg.tolerances;
    let f = probe(ctx)?;
    let pairs = zip_pairs(&pr.p, &pr.q);
    let reps = cells(&pairs, |&(p, q)| Ok(nikolskii_experiment(&ctx.op, &f, p, q, &pr.levels)?))?;
    let mut rows = Vec::new();
    let mut passed = true;
    let mut notes = Vec::new();
    for ((p, q), rep) in pairs.iter().zip(&reps) {
        rows.extend(slope_rows("nikolskii", &ctx.group, *p, *q, f64::NAN, &pr.levels, rep));
        let ok = rep.deviation() <= tol.slope && rep.fit.residual <= tol.residual;
        notes.push(format!(
            "p={p} q={q}: slope {:.4} (expected {:.4}, residual {:.3})",
            rep.fit.slope, rep.theoretical, rep.fit.residual
        ));
        passed &= ok;
    }
    Ok(Outcome {
        passed,
        summary: notes.join("; "),
        tables: vec![table("nikolskii.csv", &rows)?],
    })
}

fn nikolskii_bound(ctx: &Context) -> Result<Outcome, LabError> {
    #[derive(Serialize)]
    struct Row<'a> {
        group: &'a str,
        p: f64,
        q: f64,
        #[serde(rename = "L")]
        level: f64,
        lhs: f64,
        rhs: f64,
        constant: f64,
        holds: bool,
    }
    let pr = &ctx.cfg.params;
    let slack = ctx.cfg.tolerances.relative;
    let f = probe(ctx)?;
    let pairs = zip_pairs(&pr.p, &pr.q);
    let results = cells(&pairs, |&(p, q)| {
        Ok((
            nikolskii_constant_abelian(&ctx.op, p, q)?,
            nikolskii_bound_check(&ctx.op, &f, p, q, &pr.levels)?,
        ))
    })?;
    let mut rows = Vec::new();
    for ((p, q), (c, checks)) in pairs.iter().zip(&results) {
        for b in checks {
            rows.push(Row {
                group: &ctx.group,
                p: *p,
                q: *q,
                level: b.level,
                lhs: b.lhs,
                rhs: b.rhs,
                constant: *c,
                holds: b.holds(slack),
            });
        }
    }
    let failures = rows.iter().filter(|r| !r.holds).count();
    Ok(Outcome {
        passed: failures == 0,
        summary: format!("{} of {} bounds hold", rows.len() - failures, rows.len()),
        tables: vec![table("nikolskii_bound.csv", &rows)?],
    })
}

fn dual_dilation(ctx: &Context) -> Result<Outcome, LabError> {
    #[derive(Serialize)]
    struct Row<'a> {
        group: &'a str,
        scale: f64,
        s: f64,
        ratio: f64,
        expected: f64,
        normalized: f64,
    }
    let pr = &ctx.cfg.params;
    let grid = ctx.op.grid();
    let sigma = |xi: &[f64]| graded_harmonic::Complex64::new((-xi.iter().map(|v| v * v).sum::<f64>()).exp(), 0.0);
    let mut settings = Vec::new();
    for &r in &pr.scales {
        for &s in &pr.s {
            settings.push((r, s));
        }
    }
    let q = ctx.spec.q();
    let ratios = cells(&settings, |&(r, s)| {
        Ok(besov::dual_dilation_scaling_check(&ctx.spec, grid, sigma, r, s)?)
    })?;
    let rows: Vec<Row> = settings
        .iter()
        .zip(&ratios)
        .map(|(&(r, s), &ratio)| {
            let expected = r.powf(s - q / 2.0);
            Row {
                group: &ctx.group,
                scale: r,
                s,
                ratio,
                expected,
                normalized: ratio / expected,
            }
        })
        .collect();
    let worst = rows.iter().map(|r| (r.normalized - 1.0).abs()).fold(0.0, f64::max);
    Ok(Outcome {
        passed: worst <= ctx.cfg.tolerances.relative,
        summary: format!("largest deviation from r^(s-Q/2): {worst:.3e}"),
        tables: vec![table("dual_dilation.csv", &rows)?],
    })
}

fn embedding_checks(kind: Experiment, ctx: &Context) -> Result<Outcome, LabError> {
    let pr = &ctx.cfg.params;
    let fam = ctx.sampled()?;
    let names = ctx.names();
    let part = ctx.partition(true);
    let rel = ctx.cfg.tolerances.relative;
    let name = kind.name();
    let mut reps: Vec<(f64, f64, EmbeddingReport)> = Vec::new();
    match kind {
        Experiment::EmbeddingLebesgue => {
            let pairs = zip_pairs(&pr.p, &pr.q);
            let out = cells(&pairs, |&(p, q)| {
                Ok(embedding_lebesgue(&ctx.op, &part, &fam, Some(&names), p, q)?)
            })?;
            reps.extend(pairs.iter().zip(out).map(|((p, q), r)| (*p, *q, r)));
        }
        _ => {
            let (q1, q2) = (pr.q[0], pr.q[1]);
            let settings = product3(&pr.r, &pr.eps, &pr.p);
            let out = cells(&settings, |&(r, eps, p)| {
                Ok(if kind == Experiment::EmbeddingLq {
                    embedding_lq_chain(&ctx.op, &part, &fam, Some(&names), r, eps, p, q1, q2)?
                } else {
                    embedding_holder(&ctx.op, &part, &fam, Some(&names), r, eps, p, q1, q2)?
                })
            })?;
            reps.extend(settings.iter().zip(out).map(|((_, _, p), r)| (*p, q2, r)));
        }
    }
    let mut rows = Vec::new();
    let mut passed = true;
    let mut worst: f64 = 0.0;
    for (p, q, rep) in &reps {
        passed &= rep.holds(rel);
        worst = worst.max(rep.worst_ratio());
        for c in &rep.checks {
            rows.push(InequalityRow {
                experiment: name,
                group: &ctx.group,
                member: c.member.clone(),
                p: *p,
                q: *q,
                lhs: c.lhs,
                rhs: c.rhs,
                constant: rep.constant,
            });
        }
    }
    Ok(Outcome {
        passed,
        summary: format!("{} inequalities, largest lhs/rhs {worst:.6}", rows.len()),
        tables: vec![table(&format!("{}.csv", name.replace('-', "_")), &rows)?],
    })
}

fn embedding_dilation_slopes(ctx: &Context) -> Result<Outcome, LabError> {
    let pr = &ctx.cfg.params;
    let width = pr.width.unwrap_or_else(|| base_scale(&ctx.spec, &ctx.cfg.grid.half_extent));
    let f = modulated_gaussian(&ctx.spec, width, pr.omega).sample(ctx.op.grid())?;
    let mode = if pr.codilate {
        DilationMode::CoDilated
    } else {
        DilationMode::FixedGrid
    };
    let (r, q) = (pr.r[0], pr.q[0]);
    let rep = embedding_dilation(&ctx.op, ctx.cfg.smoothness(), &f, r, pr.p[0], pr.p[1], q, &pr.j, mode)?;
    let js: Vec<f64> = pr.j.iter().map(|&j| j as f64).collect();
    let mut rows = slope_rows("embedding-dilation", &ctx.group, pr.p[0], q, r, &js, &rep.first);
    rows.extend(slope_rows("embedding-dilation", &ctx.group, pr.p[1], q, r, &js, &rep.second));
    Ok(Outcome {
        passed: rep.passes(ctx.cfg.tolerances.slope),
        summary: format!(
            "slope difference {:.4} (expected {:.4})",
            rep.difference, rep.theoretical
        ),
        tables: vec![table("embedding_dilation.csv", &rows)?],
    })
}

fn embedding_sobolev(ctx: &Context) -> Result<Outcome, LabError> {
    #[derive(Serialize)]
    struct Row<'a> {
        group: &'a str,
        r: f64,
        p: f64,
        grid: &'static str,
        sobolev_over_besov_pp: f64,
        besov_p2_over_sobolev: f64,
        stable: bool,
    }
    let pr = &ctx.cfg.params;
    let mut settings = Vec::new();
    for &r in &pr.r {
        for &p in &pr.p {
            settings.push((r, p));
        }
    }
    let reps = cells(&settings, |&(r, p)| {
        Ok(embedding_sobolev_refined(&ctx.op, ctx.cfg.smoothness(), &ctx.members, r, p)?)
    })?;
    let mut rows = Vec::new();
    let mut passed = true;
    for ((r, p), rep) in settings.iter().zip(&reps) {
        let st = ctx.stable(rep.coarse.sobolev_over_besov_pp, rep.fine.sobolev_over_besov_pp)
            && ctx.stable(rep.coarse.besov_p2_over_sobolev, rep.fine.besov_p2_over_sobolev);
        passed &= st && rep.coarse.finite() && rep.fine.finite();
        for (fine, c) in [(false, &rep.coarse), (true, &rep.fine)] {
            rows.push(Row {
                group: &ctx.group,
                r: *r,
                p: *p,
                grid: grid_label(fine),
                sobolev_over_besov_pp: c.sobolev_over_besov_pp,
                besov_p2_over_sobolev: c.besov_p2_over_sobolev,
                stable: st,
            });
        }
    }
    Ok(Outcome {
        passed,
        summary: format!("{} settings", settings.len()),
        tables: vec![table("embedding_sobolev.csv", &rows)?],
    })
}

fn bracket_outcome(
    ctx: &Context,
    file: &str,
    settings: &[String],
    reps: &[graded_harmonic::besov::Refined<RatioBracket>],
    lo: f64,
    hi: f64,
) -> Result<Outcome, LabError> {
    let mut rows = Vec::new();
    let mut passed = true;
    let mut lowest = f64::INFINITY;
    let mut highest: f64 = 0.0;
    for (setting, rep) in settings.iter().zip(reps) {
        let st = ctx.bracket_stable(&rep.coarse, &rep.fine);
        passed &= st && rep.coarse.within(lo, hi) && rep.fine.within(lo, hi);
        for (fine, b) in [(false, &rep.coarse), (true, &rep.fine)] {
            lowest = lowest.min(b.min);
            highest = highest.max(b.max);
            rows.push(BracketRow {
                group: &ctx.group,
                setting: setting.clone(),
                grid: grid_label(fine),
                min: b.min,
                max: b.max,
                stable: st,
            });
        }
    }
    Ok(Outcome {
        passed,
        summary: format!("ratios in [{lowest:.4}, {highest:.4}], required [{lo}, {hi}]"),
        tables: vec![table(file, &rows)?],
    })
}

fn interpolation(ctx: &Context) -> Result<Outcome, LabError> {
    let pr = &ctx.cfg.params;
    let p = pr.p[0];
    let x0 = SobolevSpace::new(pr.r[0], p, pr.homogeneous)?;
    let x1 = SobolevSpace::new(pr.r[1], p, pr.homogeneous)?;
    let mut settings = Vec::new();
    for &theta in &pr.theta {
        for &q in &pr.q {
            settings.push((theta, q));
        }
    }
    let reps = cells(&settings, |&(theta, q)| {
        Ok(interpolation_besov_refined(&ctx.op, ctx.cfg.smoothness(), &ctx.members, theta, q, x0, x1)?)
    })?;
    let labels: Vec<String> = settings
        .iter()
        .map(|(t, q)| format!("theta={t} q={q} r0={} r1={} p={p}", pr.r[0], pr.r[1]))
        .collect();
    bracket_outcome(ctx, "interpolation.csv", &labels, &reps, 0.1, 10.0)
}

fn partition_independence(ctx: &Context) -> Result<Outcome, LabError> {
    let pr = &ctx.cfg.params;
    let settings = product3(&pr.r, &pr.p, &pr.q);
    let (a, b) = (ctx.cfg.partition.smoothness.into(), ctx.cfg.partition.alternate.into());
    let reps = cells(&settings, |&(r, p, q)| {
        let params = BesovParams::new(r, p, q, pr.homogeneous)?;
        Ok(partition_independence_refined(&ctx.op, a, b, &ctx.members, params)?)
    })?;
    let labels: Vec<String> = settings.iter().map(|(r, p, q)| format!("r={r} p={p} q={q}")).collect();
    bracket_outcome(ctx, "partition_independence.csv", &labels, &reps, 0.25, 4.0)
}

fn marcinkiewicz(ctx: &Context) -> Result<Outcome, LabError> {
    #[derive(Serialize)]
    struct SummaryRow<'a> {
        group: &'a str,
        m_name: String,
        sup_variation: f64,
        sup_variation_double: f64,
        sup_abs: f64,
        admissible: bool,
    }
    #[derive(Serialize)]
    struct BoundRow<'a> {
        group: &'a str,
        p: f64,
        m_name: String,
        coarse_ratio: f64,
        fine_ratio: f64,
        spectral_sup: f64,
        stable: bool,
    }
    let pr = &ctx.cfg.params;
    let js = spectral_levels(&ctx.op);
    let mut tables = Vec::new();
    let mut summary = Vec::new();
    let mut bounds = Vec::new();
    let mut passed = true;
    let mut admissible_names = Vec::new();
    for (k, mc) in pr.multipliers.iter().enumerate() {
        let m = mc.build();
        let rep = marcinkiewicz_check(&m, js.clone(), pr.samples)?;
        let rows: Vec<BvRow> = rep
            .entries
            .iter()
            .map(|e| BvRow {
                j: e.j,
                window: e.window.name(),
                variation: e.variation,
                stable: e.stable,
            })
            .collect();
        tables.push(table(&format!("bv_{k}.csv"), &rows)?);
        summary.push(SummaryRow {
            group: &ctx.group,
            m_name: m.name().to_string(),
            sup_variation: rep.sup_variation,
            sup_variation_double: rep.sup_variation_double,
            sup_abs: rep.sup_abs,
            admissible: rep.admissible,
        });
        if !rep.admissible {
            continue;
        }
        admissible_names.push(m.name().to_string());
        let sup = spectral_sup(&ctx.op, &m);
        let reps = cells(&pr.p, |&p| Ok(multiplier_boundedness_refined(&ctx.op, &m, p, &ctx.members)?))?;
        for (p, r) in pr.p.iter().zip(&reps) {
            let st = ctx.stable(r.coarse.max_ratio, r.fine.max_ratio);
            let mut ok = st && r.coarse.max_ratio.is_finite() && r.fine.max_ratio.is_finite();
            if *p == 2.0 {
                ok &= r.coarse.max_ratio <= sup + 1e-8;
            }
            passed &= ok;
            bounds.push(BoundRow {
                group: &ctx.group,
                p: *p,
                m_name: m.name().to_string(),
                coarse_ratio: r.coarse.max_ratio,
                fine_ratio: r.fine.max_ratio,
                spectral_sup: sup,
                stable: st,
            });
        }
    }
    tables.insert(0, table("marcinkiewicz.csv", &summary)?);
    if !bounds.is_empty() {
        tables.insert(1, table("boundedness.csv", &bounds)?);
    }
    Ok(Outcome {
        passed,
        summary: format!(
            "admissible: [{}] of {} multipliers",
            admissible_names.join(", "),
            pr.multipliers.len()
        ),
        tables,
    })
}

fn multiplier_transfer(ctx: &Context) -> Result<Outcome, LabError> {
    let pr = &ctx.cfg.params;
    let fam = ctx.sampled()?;
    let part = ctx.partition(pr.homogeneous);
    let settings = product3(&pr.r, &pr.p, &pr.q);
    let ms: Vec<ScalarMultiplier> = pr.multipliers.iter().map(|m| m.build()).collect();
    let mut cells_in = Vec::new();
    for k in 0..ms.len() {
        for s in &settings {
            cells_in.push((k, *s));
        }
    }
    let reps = cells(&cells_in, |&(k, (r, p, q))| {
        let params = BesovParams::new(r, p, q, pr.homogeneous)?;
        Ok(besov_transfer_experiment(&ctx.op, &part, &ms[k], params, &fam)?)
    })?;
    let mut rows = Vec::new();
    let mut passed = true;
    for ((k, (r, p, q)), rep) in cells_in.iter().zip(&reps) {
        passed &= rep.passes();
        rows.push(MultiplierRow {
            group: &ctx.group,
            p: *p,
            r: *r,
            q: *q,
            m_name: ms[*k].name(),
            lp_ratio: rep.lp_ratio,
            besov_ratio: rep.besov_ratio,
        });
    }
    let failures = reps.iter().filter(|r| !r.passes()).count();
    Ok(Outcome {
        passed,
        summary: format!("{} of {} cells dominated", reps.len() - failures, reps.len()),
        tables: vec![table("multiplier.csv", &rows)?],
    })
}

fn translation_limit(ctx: &Context) -> Result<Outcome, LabError> {
    #[derive(Serialize)]
    struct Row<'a> {
        group: &'a str,
        p: f64,
        shift: String,
        ratio: f64,
        limit: f64,
    }
    let pr = &ctx.cfg.params;
    let f = smoothed_quasi_ball(&ctx.spec, pr.radius, 0.5).sample(ctx.op.grid())?;
    let reps = cells(&pr.p, |&p| Ok(translation_limit_experiment(&ctx.spec, &f, p, &pr.shifts)?))?;
    let mut rows = Vec::new();
    let mut passed = true;
    for (p, ratios) in pr.p.iter().zip(&reps) {
        let limit = 2f64.powf(1.0 / p);
        let last = *ratios.last().expect("shifts are not empty");
        passed &= (last / limit - 1.0).abs() <= 0.01;
        for (h, ratio) in pr.shifts.iter().zip(ratios) {
            let coords: Vec<String> = h.iter().map(|v| v.to_string()).collect();
            rows.push(Row {
                group: &ctx.group,
                p: *p,
                shift: coords.join(";"),
                ratio: *ratio,
                limit,
            });
        }
    }
    let kind = if ctx.spec.kind() == GroupKind::Heisenberg1 { "group" } else { "vector" };
    Ok(Outcome {
        passed,
        summary: format!("{} {kind} translations per exponent", pr.shifts.len()),
        tables: vec![table("translation_limit.csv", &rows)?],
    })
}
