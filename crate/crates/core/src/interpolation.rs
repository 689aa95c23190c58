//! Real interpolation between Sobolev spaces of one operator through a
//! K-functional restricted to spectral splittings, and the partition
//! independence experiment for Besov norms.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::besov::{
    besov_norm, check_p, check_singular_mass, refinement_pair, stable, BesovParams, Refined,
};
use crate::calculus::SpectralView;
use crate::family::Member;
use crate::grid::{lp_norm_of, SampledFunction};
use crate::partition::{BlockFamily, DyadicPartition, Smoothness};
use crate::rockland::RocklandOp;
use crate::{Error, Result};

/// Logarithmic split levels in `[1e-6 lambda_max, lambda_max]`.
pub const SPLIT_POINTS: usize = 200;
/// Logarithmic `t` nodes in `[2^-30, 2^30]`.
pub const T_POINTS: usize = 200;
pub const T_RANGE_LOG2: f64 = 30.0;

/// `H^{r,p}`: `||R^{r/nu} f||_p`, or `||(I + R)^{r/nu} f||_p` when
/// inhomogeneous.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SobolevSpace {
    pub r: f64,
    pub p: f64,
    pub homogeneous: bool,
}

impl SobolevSpace {
    pub fn new(r: f64, p: f64, homogeneous: bool) -> Result<Self> {
        check_p(p)?;
        Ok(Self { r, p, homogeneous })
    }

    fn weight(&self, nu: f64, lambda: f64) -> f64 {
        let x = if self.homogeneous { lambda } else { 1.0 + lambda };
        if self.r == 0.0 {
            1.0
        } else if x > 0.0 {
            x.powf(self.r / nu)
        } else {
            0.0
        }
    }
}

/// Norms of the spectral pieces of one function, from which
/// `K(f, t) = inf ||f_0||_{X_0} + t ||f_1||_{X_1}` over spectral splittings
/// is read off for every `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct KFunctional {
    /// Norm of `f` in `X_0` and in `X_1`.
    pub full: [f64; 2],
    /// Per split level: `X_0` and `X_1` norms of the low part, then of the
    /// high part.
    pub splits: Vec<([f64; 2], [f64; 2])>,
}

impl KFunctional {
    pub fn new(op: &RocklandOp, f: &SampledFunction, x0: SobolevSpace, x1: SobolevSpace) -> Result<Self> {
        Self::with_resolution(op, f, x0, x1, SPLIT_POINTS)
    }

    pub fn with_resolution(
        op: &RocklandOp,
        f: &SampledFunction,
        x0: SobolevSpace,
        x1: SobolevSpace,
        split_points: usize,
    ) -> Result<Self> {
        if x0.p != x1.p {
            return Err(Error::Hypothesis(format!(
                "a Sobolev couple needs a common p, got {} and {}",
                x0.p, x1.p
            )));
        }
        if split_points < 2 {
            return Err(Error::InvalidParameter("at least two split levels are needed".into()));
        }
        let base = op.with_shift(0.0);
        if (x0.homogeneous && x0.r < 0.0) || (x1.homogeneous && x1.r < 0.0) {
            check_singular_mass(&base, f)?;
        }
        let view = SpectralView::new(&base, f)?;
        let top = base.spectral_bound();
        let levels = crate::partition::log_samples(1e-6 * top, top, split_points);
        let nu = op.nu_f64();
        let p = x0.p;
        let dv = f.grid().cell_volume();
        let spaces = [x0, x1];
        let full_values: Vec<Vec<Complex64>> = spaces
            .iter()
            .map(|s| view.synthesize(&|lam| Complex64::new(s.weight(nu, lam), 0.0)))
            .collect();
        let full = [lp_norm_of(&full_values[0], dv, p)?, lp_norm_of(&full_values[1], dv, p)?];
        let high = |low: &[Complex64], i: usize| -> Result<f64> {
            let h: Vec<Complex64> = full_values[i].iter().zip(low).map(|(a, b)| a - b).collect();
            lp_norm_of(&h, dv, p)
        };
        let mut splits = Vec::with_capacity(levels.len());
        match &view {
            SpectralView::Symbol { .. } => {
                for &level in &levels {
                    let mut lo = [0.0; 2];
                    let mut hi = [0.0; 2];
                    for (i, s) in spaces.iter().enumerate() {
                        let low = view.synthesize(&|lam| {
                            Complex64::new(if lam <= level { s.weight(nu, lam) } else { 0.0 }, 0.0)
                        });
                        lo[i] = lp_norm_of(&low, dv, p)?;
                        hi[i] = high(&low, i)?;
                    }
                    splits.push((lo, hi));
                }
            }
            SpectralView::Dense { eig, coeffs, .. } => {
                // Eigenvalues are sorted, so the low parts grow one
                // eigenvector at a time.
                let n = coeffs.len();
                let mut low = [vec![Complex64::new(0.0, 0.0); n], vec![Complex64::new(0.0, 0.0); n]];
                let lams = eig.eigenvalues();
                let mut k = 0;
                for &level in &levels {
                    while k < n && lams[k] <= level {
                        let v = eig.vector(k);
                        for (i, s) in spaces.iter().enumerate() {
                            let c = coeffs[k] * s.weight(nu, lams[k]);
                            for (acc, vi) in low[i].iter_mut().zip(&v) {
                                *acc += c * vi;
                            }
                        }
                        k += 1;
                    }
                    let lo = [lp_norm_of(&low[0], dv, p)?, lp_norm_of(&low[1], dv, p)?];
                    let hi = [high(&low[0], 0)?, high(&low[1], 1)?];
                    splits.push((lo, hi));
                }
            }
        }
        Ok(Self { full, splits })
    }

    /// Minimum over the two trivial splittings and every spectral
    /// splitting, in both orientations.
    pub fn value(&self, t: f64) -> f64 {
        let mut best = self.full[0].min(t * self.full[1]);
        for (lo, hi) in &self.splits {
            best = best.min(lo[0] + t * hi[1]).min(hi[0] + t * lo[1]);
        }
        best
    }
}

pub fn k_functional(
    op: &RocklandOp,
    f: &SampledFunction,
    t: f64,
    x0: SobolevSpace,
    x1: SobolevSpace,
) -> Result<f64> {
    Ok(KFunctional::new(op, f, x0, x1)?.value(t))
}

/// `(int_0^inf (t^{-theta} K(f, t))^q dt / t)^{1/q}` by the trapezoidal rule
/// in `log t` on `[2^-30, 2^30]`.
pub fn interpolation_norm(k: &KFunctional, theta: f64, q: f64) -> Result<f64> {
    interpolation_norm_with(k, theta, q, T_POINTS)
}

pub fn interpolation_norm_with(k: &KFunctional, theta: f64, q: f64, t_points: usize) -> Result<f64> {
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::InvalidParameter(format!("theta must lie in (0, 1), got {theta}")));
    }
    if !(q >= 1.0 && q.is_finite()) {
        return Err(Error::InvalidParameter(format!("interpolation q must lie in [1, inf), got {q}")));
    }
    if t_points < 2 {
        return Err(Error::InvalidParameter("at least two t nodes are needed".into()));
    }
    let step = 2.0 * T_RANGE_LOG2 / (t_points - 1) as f64;
    let vals: Vec<f64> = (0..t_points)
        .map(|i| {
            let s = -T_RANGE_LOG2 + step * i as f64;
            ((-theta * s).exp2() * k.value(s.exp2())).powf(q)
        })
        .collect();
    let inner: f64 = vals[1..t_points - 1].iter().sum::<f64>() + 0.5 * (vals[0] + vals[t_points - 1]);
    Ok((inner * step * core::f64::consts::LN_2).powf(1.0 / q))
}

/// Interpolation norm of `K(t) = min(a, t b)`:
/// `a^{1-theta} b^theta (1/((1-theta) q) + 1/(theta q))^{1/q}`.
pub fn single_eigenvalue_interpolation_norm(a: f64, b: f64, theta: f64, q: f64) -> f64 {
    a.powf(1.0 - theta) * b.powf(theta) * (1.0 / ((1.0 - theta) * q) + 1.0 / (theta * q)).powf(1.0 / q)
}

/// Ratios over a family.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioBracket {
    pub ratios: Vec<f64>,
    pub min: f64,
    pub max: f64,
}

impl RatioBracket {
    pub fn from_ratios(ratios: Vec<f64>) -> Self {
        let min = ratios.iter().copied().fold(f64::INFINITY, f64::min);
        let max = ratios.iter().copied().fold(0.0, f64::max);
        Self { ratios, min, max }
    }

    pub fn within(&self, lo: f64, hi: f64) -> bool {
        !self.ratios.is_empty() && self.min >= lo && self.max <= hi
    }
}

fn refined_bracket(coarse: RatioBracket, fine: RatioBracket) -> Refined<RatioBracket> {
    let ok = stable(coarse.min, fine.min) && stable(coarse.max, fine.max);
    Refined {
        coarse,
        fine,
        stable: ok,
    }
}

/// `interpolation_norm / besov_norm` over a family, with the Besov
/// smoothness `r = (1 - theta) r_0 + theta r_1`.
pub fn interpolation_besov_comparison<B: BlockFamily + ?Sized>(
    op: &RocklandOp,
    partition: &B,
    family: &[SampledFunction],
    theta: f64,
    q: f64,
    x0: SobolevSpace,
    x1: SobolevSpace,
) -> Result<RatioBracket> {
    let params = BesovParams::new((1.0 - theta) * x0.r + theta * x1.r, x0.p, q, x0.homogeneous)?;
    let mut ratios = Vec::with_capacity(family.len());
    for f in family {
        let k = KFunctional::new(op, f, x0, x1)?;
        ratios.push(interpolation_norm(&k, theta, q)? / besov_norm(op, partition, f, params)?);
    }
    Ok(RatioBracket::from_ratios(ratios))
}

pub fn interpolation_besov_refined(
    op: &RocklandOp,
    smoothness: Smoothness,
    members: &[Member],
    theta: f64,
    q: f64,
    x0: SobolevSpace,
    x1: SobolevSpace,
) -> Result<Refined<RatioBracket>> {
    let (fine_op, cf, ff) = refinement_pair(op, members)?;
    let bound = |o: &RocklandOp| o.with_shift(0.0).spectral_bound() + 1.0;
    let coarse = interpolation_besov_comparison(
        op,
        &DyadicPartition::covering(bound(op), smoothness),
        &cf,
        theta,
        q,
        x0,
        x1,
    )?;
    let fine = interpolation_besov_comparison(
        &fine_op,
        &DyadicPartition::covering(bound(&fine_op), smoothness),
        &ff,
        theta,
        q,
        x0,
        x1,
    )?;
    Ok(refined_bracket(coarse, fine))
}

/// `besov_norm_A / besov_norm_B` over a family.
pub fn partition_independence_experiment<A, B>(
    op: &RocklandOp,
    partition_a: &A,
    partition_b: &B,
    family: &[SampledFunction],
    params: BesovParams,
) -> Result<RatioBracket>
where
    A: BlockFamily + ?Sized,
    B: BlockFamily + ?Sized,
{
    let ratios = family
        .iter()
        .map(|f| Ok(besov_norm(op, partition_a, f, params)? / besov_norm(op, partition_b, f, params)?))
        .collect::<Result<Vec<f64>>>()?;
    Ok(RatioBracket::from_ratios(ratios))
}

pub fn partition_independence_refined(
    op: &RocklandOp,
    a: Smoothness,
    b: Smoothness,
    members: &[Member],
    params: BesovParams,
) -> Result<Refined<RatioBracket>> {
    let (fine_op, cf, ff) = refinement_pair(op, members)?;
    let run = |o: &RocklandOp, fam: &[SampledFunction]| {
        let bound = o.with_shift(0.0).spectral_bound() + 1.0;
        partition_independence_experiment(
            o,
            &DyadicPartition::covering(bound, a),
            &DyadicPartition::covering(bound, b),
            fam,
            params,
        )
    };
    Ok(refined_bracket(run(op, &cf)?, run(&fine_op, &ff)?))
}
