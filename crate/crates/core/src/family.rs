//! Fixed test families of smooth, rapidly decaying functions.
//!
//! Members are continuous functions of the point, so the same family can be
//! sampled on a grid and on its refinement. Sizes are tied to the box: the
//! base scale is `s = min_i L_i^{1/w_i} / 8` and a width `sigma` acts on
//! axis `i` as `sigma^{w_i}`.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::grid::{Grid, SampledFunction};
use crate::group::GroupSpec;
use crate::Result;

type PointFn = dyn Fn(&[f64]) -> Complex64 + Send + Sync;

#[derive(Clone)]
pub struct Member {
    pub name: String,
    f: Arc<PointFn>,
}

impl core::fmt::Debug for Member {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("Member").field("name", &self.name).finish()
    }
}

impl Member {
    pub fn new<F>(name: String, f: F) -> Self
    where
        F: Fn(&[f64]) -> Complex64 + Send + Sync + 'static,
    {
        Self { name, f: Arc::new(f) }
    }

    pub fn eval(&self, x: &[f64]) -> Complex64 {
        (self.f)(x)
    }

    pub fn sample(&self, grid: &Grid) -> Result<SampledFunction> {
        SampledFunction::from_fn(grid, |x| self.eval(x))
    }
}

/// Base scale `min_i L_i^{1/w_i} / 8` of a box.
pub fn base_scale(spec: &GroupSpec, half_extent: &[f64]) -> f64 {
    half_extent
        .iter()
        .enumerate()
        .map(|(i, l)| l.powf(1.0 / spec.weight(i)))
        .fold(f64::INFINITY, f64::min)
        / 8.0
}

fn weighted_sq(spec: &GroupSpec, x: &[f64], center: &[f64], sigma: f64) -> f64 {
    x.iter()
        .zip(center)
        .enumerate()
        .map(|(i, (xi, ci))| ((xi - ci) / sigma.powf(spec.weight(i))).powi(2))
        .sum()
}

/// `exp(-sum_i (x_i / sigma^{w_i})^2)`.
pub fn gaussian(spec: &GroupSpec, sigma: f64) -> Member {
    let spec = spec.clone();
    let zero = spec.identity();
    Member::new(format!("gaussian(sigma={sigma:.4})"), move |x| {
        Complex64::new((-weighted_sq(&spec, x, &zero, sigma)).exp(), 0.0)
    })
}

/// Gaussian of width `sigma` times `e^{i omega x_0}`.
pub fn modulated_gaussian(spec: &GroupSpec, sigma: f64, omega: f64) -> Member {
    let spec = spec.clone();
    let zero = spec.identity();
    Member::new(format!("modulated(sigma={sigma:.4},omega={omega:.4})"), move |x| {
        let g = (-weighted_sq(&spec, x, &zero, sigma)).exp();
        Complex64::from_polar(g, omega * x[0])
    })
}

/// Sum of four Gaussian wave packets with seeded centers, widths,
/// modulations and complex amplitudes.
pub fn random_wavepackets(spec: &GroupSpec, scale: f64, seed: u64) -> Member {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = spec.dimension();
    let packets: Vec<(Vec<f64>, f64, Vec<f64>, Complex64)> = (0..4)
        .map(|_| {
            let sigma = scale * rng.gen_range(0.5..1.0);
            let center: Vec<f64> = (0..n)
                .map(|i| scale.powf(spec.weight(i)) * rng.gen_range(-1.0..1.0))
                .collect();
            let freq: Vec<f64> = (0..n)
                .map(|i| rng.gen_range(-2.0..2.0) / scale.powf(spec.weight(i)))
                .collect();
            let amp = Complex64::from_polar(rng.gen_range(0.5..1.0), rng.gen_range(0.0..2.0 * PI));
            (center, sigma, freq, amp)
        })
        .collect();
    let spec = spec.clone();
    Member::new(format!("wavepackets(seed={seed})"), move |x| {
        packets
            .iter()
            .map(|(c, sigma, freq, amp)| {
                let g = (-weighted_sq(&spec, x, c, *sigma)).exp();
                let phase: f64 = x.iter().zip(freq).map(|(a, b)| a * b).sum();
                amp * Complex64::from_polar(g, phase)
            })
            .sum()
    })
}

/// Indicator of the quasi-ball of radius `radius`, with a cubic ramp down to
/// zero at `(1 + ramp) * radius`.
pub fn smoothed_quasi_ball(spec: &GroupSpec, radius: f64, ramp: f64) -> Member {
    let spec = spec.clone();
    Member::new(format!("quasi-ball(radius={radius:.4})"), move |x| {
        let r = spec.quasi_norm(x).unwrap_or(f64::INFINITY);
        let u = ((r - radius) / (ramp * radius)).clamp(0.0, 1.0);
        Complex64::new(1.0 - u * u * (3.0 - 2.0 * u), 0.0)
    })
}

/// The standard twelve-member family for a box: three Gaussians, three
/// modulated Gaussians, five random wave-packet sums and one smoothed
/// quasi-ball.
pub fn standard_family(spec: &GroupSpec, half_extent: &[f64], seed: u64) -> Vec<Member> {
    let s = base_scale(spec, half_extent);
    let mut out = Vec::with_capacity(12);
    for k in [0.5, 0.75, 1.0] {
        out.push(gaussian(spec, k * s));
    }
    for w in [1.0, 2.0, 4.0] {
        out.push(modulated_gaussian(spec, s, w / s));
    }
    for i in 0..5 {
        out.push(random_wavepackets(spec, s, seed.wrapping_add(i)));
    }
    out.push(smoothed_quasi_ball(spec, 1.5 * s, 0.5));
    out
}

pub fn sample_all(members: &[Member], grid: &Grid) -> Result<Vec<SampledFunction>> {
    members.iter().map(|m| m.sample(grid)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn family_shape_and_decay() {
        let h = GroupSpec::heisenberg();
        let half = [4.0, 4.0, 16.0];
        let fam = standard_family(&h, &half, 11);
        assert_eq!(fam.len(), 12);
        assert_eq!(base_scale(&h, &half), 0.5);
        let grid = Grid::truncated(&half, &[16, 16, 16]).unwrap();
        for m in &fam {
            let f = m.sample(&grid).unwrap();
            assert!(f.lp_norm(2.0).unwrap() > 0.0, "{}", m.name);
            assert!(f.inner_half_mass_fraction() > 1.0 - 1e-6, "{}", m.name);
        }
    }

    #[test]
    fn seeded_members_are_reproducible() {
        let a = GroupSpec::abelian(&[1, 2]).unwrap();
        let g = Grid::periodic(&[8.0, 16.0], &[32, 32]).unwrap();
        let f1 = random_wavepackets(&a, 0.5, 3).sample(&g).unwrap();
        let f2 = random_wavepackets(&a, 0.5, 3).sample(&g).unwrap();
        let f3 = random_wavepackets(&a, 0.5, 4).sample(&g).unwrap();
        assert_eq!(f1, f2);
        assert_ne!(f1, f3);
    }
}
