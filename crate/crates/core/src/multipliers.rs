//! Dyadic bounded-variation checks for spectral multipliers, measured
//! `L^p` operator norms, and the transfer of `L^p` bounds to Besov bounds
//! through commutation with the blocks.

use alloc::format;
use alloc::vec::Vec;
use core::ops::RangeInclusive;

#[allow(unused_imports)]
use num_traits::Float;

use crate::besov::{besov_aggregate, check_p, refinement_pair, scale_operator, stable, BesovParams, Refined};
use crate::calculus::{all_blocks, apply_multiplier, Method, ScalarMultiplier};
use crate::family::Member;
use crate::grid::SampledFunction;
use crate::partition::{log_samples, pow2, BlockFamily};
use crate::rockland::RocklandOp;
use crate::{Error, Result};

/// Largest dyadic variation accepted as bounded.
pub const BV_THRESHOLD: f64 = 100.0;
pub const MIN_SAMPLES: usize = 64;
/// Relative change under doubled sampling still counted as converged.
pub const BV_STABILITY: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Window {
    /// `[2^{j-1}, 2^j]`.
    Dyadic,
    /// `[2^{j-1}, 2^{j+1}]`.
    Double,
}

impl Window {
    pub fn bounds(self, j: i32) -> (f64, f64) {
        match self {
            Window::Dyadic => (pow2(j - 1), pow2(j)),
            Window::Double => (pow2(j - 1), pow2(j + 1)),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Window::Dyadic => "dyadic",
            Window::Double => "double",
        }
    }
}

/// `sum_k |m(x_{k+1}) - m(x_k)|` over `n` equal subintervals of `[a, b]`.
pub fn sampled_variation(m: &ScalarMultiplier, a: f64, b: f64, n: usize) -> Result<f64> {
    let mut prev = m.eval(a);
    let mut total = 0.0;
    for k in 1..=n {
        let x = a + (b - a) * k as f64 / n as f64;
        let v = m.eval(x);
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::NonFinite("multiplier value"));
        }
        total += (v - prev).norm();
        prev = v;
    }
    Ok(total)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Variation {
    pub j: i32,
    pub window: Window,
    /// Value with `2 n` samples.
    pub variation: f64,
    /// Value with `n` samples.
    pub coarse: f64,
    /// The two values agree to [`BV_STABILITY`].
    pub stable: bool,
}

/// Variation of `m` on the window of level `j`, at `n` and `2 n` samples.
pub fn dyadic_bv_norm(m: &ScalarMultiplier, j: i32, samples: usize, window: Window) -> Result<Variation> {
    if samples < MIN_SAMPLES {
        return Err(Error::InvalidParameter(format!(
            "at least {MIN_SAMPLES} samples per interval are needed, got {samples}"
        )));
    }
    let (a, b) = window.bounds(j);
    let coarse = sampled_variation(m, a, b, samples)?;
    let variation = sampled_variation(m, a, b, 2 * samples)?;
    let stable = (variation - coarse).abs() <= BV_STABILITY * variation.max(1e-300) || variation < 1e-14;
    Ok(Variation {
        j,
        window,
        variation,
        coarse,
        stable,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BvReport {
    /// Both windows for every `j`, sorted by window then `j`.
    pub entries: Vec<Variation>,
    /// Supremum over the dyadic windows.
    pub sup_variation: f64,
    /// Supremum over the doubled windows.
    pub sup_variation_double: f64,
    /// `max |m|` over every sample and `lambda = 0`.
    pub sup_abs: f64,
    pub admissible: bool,
}

pub fn marcinkiewicz_check(m: &ScalarMultiplier, js: RangeInclusive<i32>, samples: usize) -> Result<BvReport> {
    marcinkiewicz_check_with(m, js, samples, BV_THRESHOLD)
}

/// Admissible when the dyadic-window supremum is at most `threshold`,
/// every dyadic-window value is converged, and `m` is bounded on the
/// samples.
pub fn marcinkiewicz_check_with(
    m: &ScalarMultiplier,
    js: RangeInclusive<i32>,
    samples: usize,
    threshold: f64,
) -> Result<BvReport> {
    let mut entries = Vec::new();
    for window in [Window::Dyadic, Window::Double] {
        for j in js.clone() {
            entries.push(dyadic_bv_norm(m, j, samples, window)?);
        }
    }
    let sup = |w: Window| {
        entries
            .iter()
            .filter(|e| e.window == w)
            .map(|e| e.variation)
            .fold(0.0, f64::max)
    };
    let sup_variation = sup(Window::Dyadic);
    let sup_variation_double = sup(Window::Double);
    let mut sup_abs = m.eval(0.0).norm();
    for j in js.clone() {
        let (a, b) = Window::Dyadic.bounds(j);
        for k in 0..=2 * samples {
            sup_abs = sup_abs.max(m.eval(a + (b - a) * k as f64 / (2 * samples) as f64).norm());
        }
    }
    let converged = entries.iter().filter(|e| e.window == Window::Dyadic).all(|e| e.stable);
    Ok(BvReport {
        admissible: sup_variation <= threshold && sup_abs.is_finite() && converged,
        entries,
        sup_variation,
        sup_variation_double,
        sup_abs,
    })
}

/// Levels `j` whose dyadic windows cover the nonzero spectrum of `op`.
pub fn spectral_levels(op: &RocklandOp) -> RangeInclusive<i32> {
    let top = op.spectral_bound().max(1e-300);
    let bottom = match op.symbol_samples() {
        Some(s) => s.into_iter().filter(|a| *a > 0.0).fold(f64::INFINITY, f64::min),
        None if op.dense_eligible() => op
            .dense_eig()
            .ok()
            .and_then(|e| e.eigenvalues().iter().map(|l| l + op.shift()).find(|l| *l > 1e-12 * top))
            .unwrap_or(1e-6 * top),
        None => 1e-6 * top,
    };
    let bottom = if bottom.is_finite() { bottom } else { top };
    (bottom.log2().floor() as i32)..=(top.log2().ceil() as i32)
}

/// `max |m|` over the discrete spectrum (sampled on `[floor, bound]` when
/// the spectrum is not available).
pub fn spectral_sup(op: &RocklandOp, m: &ScalarMultiplier) -> f64 {
    let values: Vec<f64> = match op.symbol_samples() {
        Some(s) => s,
        None if op.dense_eligible() => match op.dense_eig() {
            Ok(e) => e.eigenvalues().iter().map(|l| l + op.shift()).collect(),
            Err(_) => Vec::new(),
        },
        None => Vec::new(),
    };
    if values.is_empty() {
        let lo = op.spectral_floor().max(1e-12);
        return log_samples(lo, op.spectral_bound().max(lo), 4096)
            .into_iter()
            .map(|x| m.eval(x).norm())
            .fold(m.eval(0.0).norm(), f64::max);
    }
    values.into_iter().map(|x| m.eval(x).norm()).fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultiplierReport {
    pub p: f64,
    pub ratios: Vec<f64>,
    pub max_ratio: f64,
}

/// `max ||m(R) f||_p / ||f||_p` over a family, a lower bound for the
/// operator norm.
pub fn multiplier_boundedness_experiment(
    op: &RocklandOp,
    m: &ScalarMultiplier,
    p: f64,
    family: &[SampledFunction],
) -> Result<MultiplierReport> {
    check_p(p)?;
    let ratios = family
        .iter()
        .map(|f| {
            let n = f.lp_norm(p)?;
            if n == 0.0 {
                return Err(Error::InvalidParameter("family member is zero".into()));
            }
            Ok(apply_multiplier(op, m, f, Method::PreferDense)?.lp_norm(p)? / n)
        })
        .collect::<Result<Vec<f64>>>()?;
    let max_ratio = ratios.iter().copied().fold(0.0, f64::max);
    Ok(MultiplierReport { p, ratios, max_ratio })
}

pub fn multiplier_boundedness_refined(
    op: &RocklandOp,
    m: &ScalarMultiplier,
    p: f64,
    members: &[Member],
) -> Result<Refined<MultiplierReport>> {
    let (fine_op, cf, ff) = refinement_pair(op, members)?;
    let coarse = multiplier_boundedness_experiment(op, m, p, &cf)?;
    let fine = multiplier_boundedness_experiment(&fine_op, m, p, &ff)?;
    let ok = stable(coarse.max_ratio, fine.max_ratio);
    Ok(Refined {
        coarse,
        fine,
        stable: ok,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransferReport {
    pub params: BesovParams,
    /// Measured `L^p` norm of `m(R)` over the family and all of its
    /// nonzero blocks.
    pub lp_ratio: f64,
    /// `max besov(m(R) f) / besov(f)` over the family.
    pub besov_ratio: f64,
    /// `max_{f,l} (||psi_l m(R) f||_p - lp_ratio ||psi_l f||_p) / ||f||_p`.
    pub worst_block_excess: f64,
}

impl TransferReport {
    pub fn blockwise_dominated(&self) -> bool {
        self.worst_block_excess <= 1e-8
    }

    pub fn passes(&self) -> bool {
        self.blockwise_dominated() && self.besov_ratio <= self.lp_ratio * (1.0 + 1e-6)
    }
}

/// Besov bound of `m(R)` from its `L^p` bound: every block of `m(R) f` is
/// `m(R)` applied to the block of `f`, so the Besov ratio is dominated by
/// the `L^p` norm measured on the blocks.
pub fn besov_transfer_experiment<B: BlockFamily + ?Sized>(
    op: &RocklandOp,
    partition: &B,
    m: &ScalarMultiplier,
    params: BesovParams,
    family: &[SampledFunction],
) -> Result<TransferReport> {
    let p = params.p;
    let scale = scale_operator(op, params.homogeneous);
    let nu = op.nu_f64();
    let mut lp_ratio: f64 = 0.0;
    let mut per_member = Vec::with_capacity(family.len());
    for f in family {
        let fp = f.lp_norm(p)?;
        if fp == 0.0 {
            return Err(Error::InvalidParameter("family member is zero".into()));
        }
        let g = apply_multiplier(op, m, f, Method::PreferDense)?;
        lp_ratio = lp_ratio.max(g.lp_norm(p)? / fp);
        let blocks_f = all_blocks(&scale, partition, f, Method::PreferDense)?;
        let blocks_g = all_blocks(&scale, partition, &g, Method::PreferDense)?;
        let mut nf = Vec::with_capacity(blocks_f.len());
        let mut ng = Vec::with_capacity(blocks_f.len());
        for (bf, bg) in blocks_f.iter().zip(&blocks_g) {
            let a = bf.lp_norm(p)?;
            if a > 1e-12 * fp {
                let mb = apply_multiplier(op, m, bf, Method::PreferDense)?;
                lp_ratio = lp_ratio.max(mb.lp_norm(p)? / a);
            }
            nf.push(a);
            ng.push(bg.lp_norm(p)?);
        }
        per_member.push((fp, nf, ng));
    }
    let mut besov_ratio: f64 = 0.0;
    let mut worst: f64 = f64::NEG_INFINITY;
    for (fp, nf, ng) in &per_member {
        for (a, b) in nf.iter().zip(ng) {
            worst = worst.max((b - lp_ratio * a) / fp);
        }
        let bf = besov_aggregate(nf, params.r, params.q, nu);
        let bg = besov_aggregate(ng, params.r, params.q, nu);
        if bf > 0.0 {
            besov_ratio = besov_ratio.max(bg / bf);
        }
    }
    Ok(TransferReport {
        params,
        lp_ratio,
        besov_ratio,
        worst_block_excess: worst,
    })
}
