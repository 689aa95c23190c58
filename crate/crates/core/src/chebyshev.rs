//! Chebyshev expansions of scalar functions on an interval and their
//! application to symmetric operators through the three-term recurrence.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::fft;

/// Largest degree tried by [`ChebyshevSeries::fit_auto`].
pub const MAX_DEGREE: usize = 4096;

#[derive(Debug, Clone)]
pub struct ChebyshevSeries {
    a: f64,
    b: f64,
    coeffs: Vec<Complex64>,
    tail: f64,
}

impl ChebyshevSeries {
    /// Degree-`d` expansion of `m` on `[a, b]` from interpolation at
    /// `N >= 2d` Chebyshev-Gauss nodes. `tail` is `2 sum_{k > d} |c_k|` over
    /// the remaining interpolation coefficients.
    pub fn fit<F>(m: &F, a: f64, b: f64, degree: usize) -> Self
    where
        F: Fn(f64) -> Complex64 + ?Sized,
    {
        assert!(degree >= 1);
        let n = (2 * degree).next_power_of_two();
        let c = chebyshev_coefficients(m, a, b, n);
        let tail = 2.0 * c[degree + 1..].iter().map(|v| v.norm()).sum::<f64>();
        Self {
            a,
            b,
            coeffs: c[..=degree].to_vec(),
            tail,
        }
    }

    /// Doubles the degree from 8 until the tail estimate is below `tol`, or
    /// returns the degree-[`MAX_DEGREE`] fit.
    pub fn fit_auto<F>(m: &F, a: f64, b: f64, tol: f64) -> Self
    where
        F: Fn(f64) -> Complex64 + ?Sized,
    {
        let mut d = 8;
        loop {
            let s = Self::fit(m, a, b, d);
            if s.tail <= tol || d >= MAX_DEGREE {
                return s;
            }
            d *= 2;
        }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Uniform error estimate `est(m, d)`.
    pub fn error_estimate(&self) -> f64 {
        self.tail
    }

    fn to_unit(&self, x: f64) -> f64 {
        if self.b > self.a {
            (2.0 * x - self.a - self.b) / (self.b - self.a)
        } else {
            0.0
        }
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        let t = self.to_unit(x);
        // Clenshaw
        let mut b1 = Complex64::new(0.0, 0.0);
        let mut b2 = Complex64::new(0.0, 0.0);
        for c in self.coeffs.iter().skip(1).rev() {
            let b0 = c + b1 * (2.0 * t) - b2;
            b2 = b1;
            b1 = b0;
        }
        self.coeffs[0] + b1 * t - b2
    }

    /// `sum_k c_k T_k(A') x` with `A' = (2A - (a+b)) / (b-a)`, where `apply`
    /// computes `A x`.
    pub fn apply<F>(&self, x: &[Complex64], mut apply: F) -> Vec<Complex64>
    where
        F: FnMut(&[Complex64]) -> Vec<Complex64>,
    {
        let n = x.len();
        if self.b <= self.a {
            let s = self.eval(self.a);
            return x.iter().map(|v| v * s).collect();
        }
        let mut out: Vec<Complex64> = x.iter().map(|v| v * self.coeffs[0]).collect();
        if self.coeffs.len() == 1 {
            return out;
        }
        let alpha = 2.0 / (self.b - self.a);
        let beta = -(self.a + self.b) / (self.b - self.a);
        let unit = |apply: &mut F, v: &[Complex64]| -> Vec<Complex64> {
            let mut y = apply(v);
            for (yi, vi) in y.iter_mut().zip(v) {
                *yi = *yi * alpha + vi * beta;
            }
            y
        };
        let mut prev = x.to_vec();
        let mut cur = unit(&mut apply, x);
        for i in 0..n {
            out[i] += cur[i] * self.coeffs[1];
        }
        for c in &self.coeffs[2..] {
            let mut next = unit(&mut apply, &cur);
            for i in 0..n {
                next[i] = next[i] * 2.0 - prev[i];
                out[i] += next[i] * c;
            }
            prev = core::mem::replace(&mut cur, next);
        }
        out
    }
}

/// Interpolation coefficients `c_0..c_{n-1}` at the `n` Chebyshev-Gauss nodes
/// (`n` a power of two), through a length-`2n` FFT.
fn chebyshev_coefficients<F>(m: &F, a: f64, b: f64, n: usize) -> Vec<Complex64>
where
    F: Fn(f64) -> Complex64 + ?Sized,
{
    let f: Vec<Complex64> = (0..n)
        .map(|j| {
            let t = (PI * (j as f64 + 0.5) / n as f64).cos();
            m(0.5 * (a + b) + 0.5 * (b - a) * t)
        })
        .collect();
    let mut y = vec![Complex64::new(0.0, 0.0); 2 * n];
    for j in 0..n {
        y[j] = f[j];
        y[2 * n - 1 - j] = f[j];
    }
    fft::Radix2::new(2 * n).process(&mut y, false);
    (0..n)
        .map(|k| {
            let ang = -PI * k as f64 / (2 * n) as f64;
            let s = y[k] * Complex64::new(ang.cos(), ang.sin()) * 0.5;
            let w = if k == 0 { 1.0 } else { 2.0 };
            s * (w / n as f64)
        })
        .collect()
}
