//! Dyadic partitions of unity on `[0, inf)`.
//!
//! With a transition `h` that vanishes on `(-inf, 1/4]` and equals one on
//! `[1/2, inf)`, the blocks are
//! `psi_0(l) = 1 - h(l/2)` and `psi_j(l) = h(2^{-j} l) - h(2^{-j-1} l)`.
//! The sum telescopes: `psi_0 + ... + psi_J = 1 - h(2^{-J-1} l)`.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Smoothness {
    /// `e^{-1/x} / (e^{-1/x} + e^{-1/(1-x)})`.
    CInfinity,
    /// `3x^2 - 2x^3`.
    Cubic,
}

impl Smoothness {
    /// Smoothed step on `[0, 1]`.
    pub fn step(self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        if x >= 1.0 {
            return 1.0;
        }
        match self {
            Smoothness::CInfinity => {
                let a = (-1.0 / x).exp();
                let b = (-1.0 / (1.0 - x)).exp();
                a / (a + b)
            }
            Smoothness::Cubic => x * x * (3.0 - 2.0 * x),
        }
    }
}

/// Anything that hands out dyadic blocks `psi_l`.
pub trait BlockFamily {
    fn max_level(&self) -> usize;
    fn psi(&self, l: usize, lambda: f64) -> f64;

    /// Closed support interval of `psi_l`.
    fn support(&self, l: usize) -> (f64, f64) {
        if l == 0 {
            (0.0, 1.0)
        } else {
            (pow2(l as i32 - 2), pow2(l as i32))
        }
    }

    fn sum(&self, lambda: f64) -> f64 {
        (0..=self.max_level()).map(|l| self.psi(l, lambda)).sum()
    }

    fn square_sum(&self, lambda: f64) -> f64 {
        (0..=self.max_level()).map(|l| self.psi(l, lambda).powi(2)).sum()
    }
}

pub(crate) fn pow2(k: i32) -> f64 {
    2f64.powi(k)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DyadicPartition {
    l_max: usize,
    smoothness: Smoothness,
}

impl DyadicPartition {
    /// Partition with blocks `psi_0 .. psi_{l_max}`. Panics if `l_max < 2`.
    pub fn new(l_max: usize, smoothness: Smoothness) -> Self {
        assert!(l_max >= 2, "a dyadic partition needs at least three blocks");
        Self { l_max, smoothness }
    }

    /// Smallest partition whose finite sum is exactly one on `[0, bound]`,
    /// i.e. `2^{l_max - 1} >= bound`.
    pub fn covering(bound: f64, smoothness: Smoothness) -> Self {
        let mut l = 2usize;
        while pow2(l as i32 - 1) < bound {
            l += 1;
        }
        Self::new(l, smoothness)
    }

    pub fn smoothness(&self) -> Smoothness {
        self.smoothness
    }

    /// `h(x) = step(4x - 1)`.
    pub fn transition(&self, x: f64) -> f64 {
        self.smoothness.step(4.0 * x - 1.0)
    }
}

impl BlockFamily for DyadicPartition {
    fn max_level(&self) -> usize {
        self.l_max
    }

    fn psi(&self, l: usize, lambda: f64) -> f64 {
        if l == 0 {
            1.0 - self.transition(0.5 * lambda)
        } else {
            let s = pow2(-(l as i32));
            self.transition(s * lambda) - self.transition(0.5 * s * lambda)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PartitionReport {
    pub max_sum_deviation: f64,
    /// Sample where the sum deviates most.
    pub worst_lambda: f64,
    pub support_violations: usize,
    pub range_violations: usize,
    pub passed: bool,
}

/// Checks the partition of unity, support and range on the given samples.
/// Samples above `2^{l_max - 1}` are excluded from the sum check, where the
/// finite sum is not expected to be one.
pub fn validate_partition<B: BlockFamily + ?Sized>(p: &B, samples: &[f64]) -> PartitionReport {
    const TOL: f64 = 1e-10;
    let top = pow2(p.max_level() as i32 - 1);
    let mut max_dev: f64 = 0.0;
    let mut worst = f64::NAN;
    let mut support_violations = 0;
    let mut range_violations = 0;
    for &lambda in samples {
        let mut sum = 0.0;
        for l in 0..=p.max_level() {
            let v = p.psi(l, lambda);
            sum += v;
            if !(-TOL..=1.0 + TOL).contains(&v) {
                range_violations += 1;
            }
            let (lo, hi) = p.support(l);
            if (lambda < lo || lambda > hi) && v.abs() > TOL {
                support_violations += 1;
            }
        }
        if lambda <= top {
            let dev = (sum - 1.0).abs();
            if dev > max_dev || worst.is_nan() {
                max_dev = max_dev.max(dev);
                worst = lambda;
            }
        }
    }
    PartitionReport {
        max_sum_deviation: max_dev,
        worst_lambda: worst,
        support_violations,
        range_violations,
        passed: max_dev <= TOL && support_violations == 0 && range_violations == 0,
    }
}

/// `n` log-spaced points on `[a, b]`, endpoints included.
pub fn log_samples(a: f64, b: f64, n: usize) -> Vec<f64> {
    assert!(a > 0.0 && b >= a && n >= 2);
    let (la, lb) = (a.ln(), b.ln());
    (0..n)
        .map(|i| (la + (lb - la) * i as f64 / (n - 1) as f64).exp())
        .collect()
}
