//! Littlewood-Paley square functions, Besov and Sobolev norms, and the
//! dual-dilation scaling check.
//!
//! Besov weights follow the `2^{(l / nu) r}` convention: block `l` of an
//! operator of degree `nu` sits at spectral level `2^l`, i.e. at frequency
//! scale `2^{l / nu}`.

use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::calculus::{all_blocks, apply_multiplier, Method, ScalarMultiplier, SpectralView};
use crate::family::Member;
use crate::grid::{lp_norm_of, Grid, SampledFunction};
use crate::group::{GroupKind, GroupSpec};
use crate::partition::{pow2, BlockFamily, DyadicPartition, Smoothness};
use crate::rockland::RocklandOp;
use crate::{Error, Result};

/// Relative change under one grid doubling still counted as stable.
pub const REFINEMENT_TOLERANCE: f64 = 0.2;

/// Largest share of `||f||_2^2` allowed on `[0, 1e-6 lambda_max]` before a
/// negative-order homogeneous norm is refused.
pub const SINGULAR_MASS_LIMIT: f64 = 1e-8;

pub(crate) fn check_p(p: f64) -> Result<()> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::InvalidExponent(p));
    }
    Ok(())
}

pub(crate) fn stable(coarse: f64, fine: f64) -> bool {
    coarse > 0.0 && fine.is_finite() && (fine / coarse - 1.0).abs() <= REFINEMENT_TOLERANCE
}

/// Pointwise square function `(sum_l |psi_l(R) f|^2)^{1/2}`.
pub fn square_function<B: BlockFamily + ?Sized>(
    op: &RocklandOp,
    partition: &B,
    f: &SampledFunction,
) -> Result<SampledFunction> {
    let blocks = all_blocks(op, partition, f, Method::PreferDense)?;
    let mut acc = alloc::vec![0.0f64; f.grid().len()];
    for b in &blocks {
        for (a, v) in acc.iter_mut().zip(b.values()) {
            *a += v.norm_sqr();
        }
    }
    f.with_values(acc.into_iter().map(|a| Complex64::new(a.sqrt(), 0.0)).collect())
}

pub fn square_function_norm<B: BlockFamily + ?Sized>(
    op: &RocklandOp,
    partition: &B,
    f: &SampledFunction,
    p: f64,
) -> Result<f64> {
    check_p(p)?;
    square_function(op, partition, f)?.lp_norm(p)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpEquivalenceReport {
    pub p: f64,
    /// `||Sf||_p / ||f||_p` per family member.
    pub ratios: Vec<f64>,
    pub c_hat: f64,
    pub big_c_hat: f64,
}

impl LpEquivalenceReport {
    pub fn bounded(&self) -> bool {
        self.c_hat > 0.0 && self.c_hat <= self.big_c_hat && self.big_c_hat.is_finite()
    }
}

/// Extremes of `||Sf||_p / ||f||_p` over a family. The partition must be
/// a partition of unity on the whole spectrum of `op`.
pub fn lp_equivalence_experiment(
    op: &RocklandOp,
    partition: &DyadicPartition,
    family: &[SampledFunction],
    p: f64,
) -> Result<LpEquivalenceReport> {
    check_p(p)?;
    if family.is_empty() {
        return Err(Error::InvalidParameter("empty test family".into()));
    }
    if pow2(partition.max_level() as i32 - 1) < op.spectral_bound() {
        return Err(Error::Hypothesis(format!(
            "partition with {} levels does not cover the spectral bound {}",
            partition.max_level(),
            op.spectral_bound()
        )));
    }
    let mut ratios = Vec::with_capacity(family.len());
    for f in family {
        let n = f.lp_norm(p)?;
        if n == 0.0 {
            return Err(Error::InvalidParameter("family member is zero".into()));
        }
        ratios.push(square_function_norm(op, partition, f, p)? / n);
    }
    let c_hat = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let big_c_hat = ratios.iter().copied().fold(0.0, f64::max);
    Ok(LpEquivalenceReport {
        p,
        ratios,
        c_hat,
        big_c_hat,
    })
}

/// A measurement on a grid and on its refinement.
#[derive(Debug, Clone, PartialEq)]
pub struct Refined<T> {
    pub coarse: T,
    pub fine: T,
    pub stable: bool,
}

/// The operator on the refined grid together with the family sampled on
/// both grids.
pub fn refinement_pair(
    op: &RocklandOp,
    members: &[Member],
) -> Result<(RocklandOp, Vec<SampledFunction>, Vec<SampledFunction>)> {
    let fine_op = op.on_grid(&op.grid().refined())?;
    let coarse = crate::family::sample_all(members, op.grid())?;
    let fine = crate::family::sample_all(members, fine_op.grid())?;
    Ok((fine_op, coarse, fine))
}

/// [`lp_equivalence_experiment`] on the grid and its refinement, each with
/// the smallest partition covering its spectrum.
pub fn lp_equivalence_refined(
    op: &RocklandOp,
    smoothness: Smoothness,
    members: &[Member],
    p: f64,
) -> Result<Refined<LpEquivalenceReport>> {
    let (fine_op, cf, ff) = refinement_pair(op, members)?;
    let coarse = lp_equivalence_experiment(op, &DyadicPartition::covering(op.spectral_bound(), smoothness), &cf, p)?;
    let fine = lp_equivalence_experiment(
        &fine_op,
        &DyadicPartition::covering(fine_op.spectral_bound(), smoothness),
        &ff,
        p,
    )?;
    let stable = stable(coarse.c_hat, fine.c_hat) && stable(coarse.big_c_hat, fine.big_c_hat);
    Ok(Refined { coarse, fine, stable })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesovParams {
    pub r: f64,
    pub p: f64,
    /// `q = f64::INFINITY` selects the sup form.
    pub q: f64,
    pub homogeneous: bool,
}

impl BesovParams {
    pub fn new(r: f64, p: f64, q: f64, homogeneous: bool) -> Result<Self> {
        check_p(p)?;
        if q.is_nan() || q <= 0.0 {
            return Err(Error::InvalidParameter(format!("Besov q must be positive, got {q}")));
        }
        if !r.is_finite() {
            return Err(Error::InvalidParameter(format!("Besov r must be finite, got {r}")));
        }
        Ok(Self { r, p, q, homogeneous })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormReport {
    pub params: BesovParams,
    pub nu: f64,
    /// `||psi_l(R) f||_p` for `l = 0..=L_max`.
    pub block_norms: Vec<f64>,
    pub aggregate: f64,
}

impl NormReport {
    pub fn recompute(&self) -> f64 {
        besov_aggregate(&self.block_norms, self.params.r, self.params.q, self.nu)
    }
}

/// `(sum_l (2^{(l/nu) r} b_l)^q)^{1/q}`, or the supremum for `q = inf`.
pub fn besov_aggregate(block_norms: &[f64], r: f64, q: f64, nu: f64) -> f64 {
    let terms: Vec<f64> = block_norms
        .iter()
        .enumerate()
        .map(|(l, b)| (l as f64 * r / nu).exp2() * b)
        .collect();
    let m = terms.iter().copied().fold(0.0, f64::max);
    if q.is_infinite() || m == 0.0 {
        return m;
    }
    m * terms.iter().map(|t| (t / m).powf(q)).sum::<f64>().powf(1.0 / q)
}

/// The operator whose blocks define the norm: `R` or `I + R`.
pub(crate) fn scale_operator(op: &RocklandOp, homogeneous: bool) -> RocklandOp {
    if homogeneous {
        op.with_shift(0.0)
    } else {
        op.inhomogeneous()
    }
}

pub fn besov_report<B: BlockFamily + ?Sized>(
    op: &RocklandOp,
    partition: &B,
    f: &SampledFunction,
    params: BesovParams,
) -> Result<NormReport> {
    let scale = scale_operator(op, params.homogeneous);
    let block_norms = all_blocks(&scale, partition, f, Method::PreferDense)?
        .iter()
        .map(|b| b.lp_norm(params.p))
        .collect::<Result<Vec<f64>>>()?;
    let nu = op.nu_f64();
    Ok(NormReport {
        params,
        nu,
        aggregate: besov_aggregate(&block_norms, params.r, params.q, nu),
        block_norms,
    })
}

pub fn besov_norm<B: BlockFamily + ?Sized>(
    op: &RocklandOp,
    partition: &B,
    f: &SampledFunction,
    params: BesovParams,
) -> Result<f64> {
    besov_report(op, partition, f, params).map(|r| r.aggregate)
}

/// Refuses `f` when more than [`SINGULAR_MASS_LIMIT`] of its `L^2` mass sits
/// on `[0, 1e-6 lambda_max]`.
pub fn check_singular_mass(op: &RocklandOp, f: &SampledFunction) -> Result<()> {
    let base = op.with_shift(0.0);
    let view = SpectralView::new(&base, f)?;
    let mass = view.mass_fraction_below(1e-6 * base.spectral_bound());
    if mass > SINGULAR_MASS_LIMIT {
        return Err(Error::SingularSpectralMass {
            mass,
            limit: SINGULAR_MASS_LIMIT,
        });
    }
    Ok(())
}

/// `||R^{r/nu} f||_p` (homogeneous) or `||(I + R)^{r/nu} f||_p`.
pub fn sobolev_norm(op: &RocklandOp, f: &SampledFunction, r: f64, p: f64, homogeneous: bool) -> Result<f64> {
    check_p(p)?;
    if r == 0.0 {
        return f.lp_norm(p);
    }
    if homogeneous && r < 0.0 {
        check_singular_mass(op, f)?;
    }
    let scale = scale_operator(op, homogeneous);
    let m = ScalarMultiplier::power(r / op.nu_f64());
    apply_multiplier(&scale, &m, f, Method::PreferDense)?.lp_norm(p)
}

/// `|| |x|^s F^{-1} sigma ||_{L^2}` on a periodic grid, with the quasi-norm
/// `|x|` of the group.
pub fn dual_sobolev_norm<F>(spec: &GroupSpec, grid: &Grid, sigma: F, s: f64) -> Result<f64>
where
    F: Fn(&[f64]) -> Complex64,
{
    if spec.kind() != GroupKind::AbelianGraded {
        return Err(Error::Unsupported("dual Sobolev norms are only available on abelian groups"));
    }
    let g = SampledFunction::from_spectrum(grid, |xi| sigma(xi))?;
    let weighted = g
        .values()
        .iter()
        .enumerate()
        .map(|(idx, v)| spec.quasi_norm(&grid.node(idx)).map(|n| v * n.powf(s)))
        .collect::<Result<Vec<Complex64>>>()?;
    lp_norm_of(&weighted, grid.cell_volume(), 2.0)
}

/// `||sigma o D_r||_{H^s} / ||sigma||_{H^s}` for the dual Sobolev norm.
/// Expected value: `r^{s - Q/2}`.
pub fn dual_dilation_scaling_check<F>(spec: &GroupSpec, grid: &Grid, sigma: F, r: f64, s: f64) -> Result<f64>
where
    F: Fn(&[f64]) -> Complex64,
{
    if !(r > 0.0) {
        return Err(Error::NonPositiveDilation(r));
    }
    if s < 0.0 {
        return Err(Error::InvalidParameter(format!("dual Sobolev order must be >= 0, got {s}")));
    }
    let base = dual_sobolev_norm(spec, grid, &sigma, s)?;
    let dilated = dual_sobolev_norm(
        spec,
        grid,
        |xi: &[f64]| {
            let d: Vec<f64> = xi.iter().enumerate().map(|(i, v)| v * r.powf(spec.weight(i))).collect();
            sigma(&d)
        },
        s,
    )?;
    Ok(dilated / base)
}
