//! Radix-2 complex FFT over the axes of a row-major array.
//!
//! Periodic grids always have power-of-two axis lengths, which is all this
//! module supports.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

/// Precomputed plan for one transform length.
#[derive(Debug, Clone)]
pub struct Radix2 {
    n: usize,
    twiddles: Vec<Complex64>,
    bitrev: Vec<usize>,
}

impl Radix2 {
    pub fn new(n: usize) -> Self {
        assert!(n.is_power_of_two(), "FFT length must be a power of two");
        let twiddles = (0..n / 2)
            .map(|k| {
                let a = -2.0 * PI * k as f64 / n as f64;
                Complex64::new(a.cos(), a.sin())
            })
            .collect();
        let bits = n.trailing_zeros();
        let bitrev = (0..n)
            .map(|i| if bits == 0 { 0 } else { i.reverse_bits() >> (usize::BITS - bits) })
            .collect();
        Self { n, twiddles, bitrev }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// In-place transform. The forward transform uses `exp(-2 pi i jk/n)` and
    /// is unnormalized; the inverse divides by `n`.
    pub fn process(&self, data: &mut [Complex64], inverse: bool) {
        let n = self.n;
        debug_assert_eq!(data.len(), n);
        for i in 0..n {
            let j = self.bitrev[i];
            if j > i {
                data.swap(i, j);
            }
        }
        let mut len = 2;
        while len <= n {
            let half = len / 2;
            let stride = n / len;
            for start in (0..n).step_by(len) {
                for k in 0..half {
                    let mut w = self.twiddles[k * stride];
                    if inverse {
                        w = w.conj();
                    }
                    let u = data[start + k];
                    let v = data[start + k + half] * w;
                    data[start + k] = u + v;
                    data[start + k + half] = u - v;
                }
            }
            len <<= 1;
        }
        if inverse {
            let s = 1.0 / n as f64;
            for x in data.iter_mut() {
                *x *= s;
            }
        }
    }
}

/// Multidimensional transform of a row-major array with the given shape.
pub fn fft_nd(data: &mut [Complex64], shape: &[usize], inverse: bool) {
    let total: usize = shape.iter().product();
    assert_eq!(data.len(), total);
    let mut inner = 1usize;
    for axis in (0..shape.len()).rev() {
        let n = shape[axis];
        if n > 1 {
            let plan = Radix2::new(n);
            let outer = total / (n * inner);
            let mut line = vec![Complex64::new(0.0, 0.0); n];
            for o in 0..outer {
                for i in 0..inner {
                    let base = o * n * inner + i;
                    for k in 0..n {
                        line[k] = data[base + k * inner];
                    }
                    plan.process(&mut line, inverse);
                    for k in 0..n {
                        data[base + k * inner] = line[k];
                    }
                }
            }
        }
        inner *= n;
    }
}

/// Signed integer frequency index of DFT bin `k` for length `n`
/// (`0..n/2` then `-n/2..0`).
pub fn signed_index(k: usize, n: usize) -> i64 {
    if k < n / 2 {
        k as i64
    } else {
        k as i64 - n as i64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive(x: &[Complex64]) -> Vec<Complex64> {
        let n = x.len();
        (0..n)
            .map(|k| {
                x.iter().enumerate().fold(Complex64::new(0.0, 0.0), |acc, (j, v)| {
                    let a = -2.0 * PI * (j * k) as f64 / n as f64;
                    acc + v * Complex64::new(a.cos(), a.sin())
                })
            })
            .collect()
    }

    #[test]
    fn matches_naive_dft() {
        for &n in &[1usize, 2, 8, 64] {
            let x: Vec<Complex64> = (0..n)
                .map(|j| Complex64::new((j as f64 * 0.37).sin(), (j as f64 * 1.3).cos()))
                .collect();
            let mut y = x.clone();
            Radix2::new(n).process(&mut y, false);
            for (a, b) in y.iter().zip(naive(&x)) {
                assert!((a - b).norm() < 1e-10);
            }
            Radix2::new(n).process(&mut y, true);
            for (a, b) in y.iter().zip(&x) {
                assert!((a - b).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn separable_2d_mode() {
        let shape = [4usize, 8];
        let mut data = vec![Complex64::new(0.0, 0.0); 32];
        // exp(2 pi i (j0 * 1 / 4 + j1 * 3 / 8))
        for j0 in 0..4 {
            for j1 in 0..8 {
                let a = 2.0 * PI * (j0 as f64 / 4.0 + 3.0 * j1 as f64 / 8.0);
                data[j0 * 8 + j1] = Complex64::new(a.cos(), a.sin());
            }
        }
        fft_nd(&mut data, &shape, false);
        for (idx, v) in data.iter().enumerate() {
            let expected = if idx == 8 + 3 { 32.0 } else { 0.0 };
            assert!((v.re - expected).abs() < 1e-10 && v.im.abs() < 1e-10);
        }
    }

    #[test]
    fn signed_indices() {
        let idx: Vec<i64> = (0..8).map(|k| signed_index(k, 8)).collect();
        assert_eq!(idx, vec![0, 1, 2, 3, -4, -3, -2, -1]);
    }
}
