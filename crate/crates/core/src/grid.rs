//! Discretized domains and sampled complex functions on them.
//!
//! Nodes on axis `i` are `x_j = -L_i + j h_i` for `j = 0..N_i` with
//! `h_i = 2 L_i / N_i`; arrays are row-major with the last axis fastest.
//! When `N_i` is even the origin is node `N_i / 2`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::fft;
use crate::group::{GroupKind, GroupSpec};
use crate::{Error, Result};

const ALIGN_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundaryMode {
    /// Torus; used for abelian groups.
    Periodic,
    /// Box with zero extension; used for the Heisenberg group.
    Truncated,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    half_extent: Vec<f64>,
    counts: Vec<usize>,
    boundary: BoundaryMode,
}

impl Grid {
    pub fn new(half_extent: &[f64], counts: &[usize], boundary: BoundaryMode) -> Result<Self> {
        if half_extent.is_empty() {
            return Err(Error::InvalidGrid("no axes"));
        }
        if half_extent.len() != counts.len() {
            return Err(Error::DimensionMismatch {
                expected: half_extent.len(),
                found: counts.len(),
            });
        }
        if half_extent.iter().any(|l| !(l.is_finite() && *l > 0.0)) {
            return Err(Error::InvalidGrid("half-extents must be positive and finite"));
        }
        if counts.contains(&0) {
            return Err(Error::InvalidGrid("point counts must be positive"));
        }
        if boundary == BoundaryMode::Periodic && counts.iter().any(|n| !n.is_power_of_two()) {
            return Err(Error::InvalidGrid("periodic point counts must be powers of two"));
        }
        Ok(Self {
            half_extent: half_extent.to_vec(),
            counts: counts.to_vec(),
            boundary,
        })
    }

    pub fn periodic(half_extent: &[f64], counts: &[usize]) -> Result<Self> {
        Self::new(half_extent, counts, BoundaryMode::Periodic)
    }

    pub fn truncated(half_extent: &[f64], counts: &[usize]) -> Result<Self> {
        Self::new(half_extent, counts, BoundaryMode::Truncated)
    }

    /// The default domain shape for a group: periodic for abelian groups,
    /// truncated for the Heisenberg group.
    pub fn for_group(spec: &GroupSpec, half_extent: &[f64], counts: &[usize]) -> Result<Self> {
        if half_extent.len() != spec.dimension() {
            return Err(Error::DimensionMismatch {
                expected: spec.dimension(),
                found: half_extent.len(),
            });
        }
        match spec.kind() {
            GroupKind::AbelianGraded => Self::periodic(half_extent, counts),
            GroupKind::Heisenberg1 => Self::truncated(half_extent, counts),
        }
    }

    pub fn dimension(&self) -> usize {
        self.counts.len()
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn half_extent(&self) -> &[f64] {
        &self.half_extent
    }

    pub fn boundary(&self) -> BoundaryMode {
        self.boundary
    }

    pub fn len(&self) -> usize {
        self.counts.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        2.0 * self.half_extent[axis] / self.counts[axis] as f64
    }

    /// Quadrature weight of one cell, `prod_i h_i`.
    pub fn cell_volume(&self) -> f64 {
        (0..self.dimension()).map(|i| self.spacing(i)).product()
    }

    pub fn coordinate(&self, axis: usize, j: usize) -> f64 {
        -self.half_extent[axis] + j as f64 * self.spacing(axis)
    }

    pub fn multi_index(&self, mut idx: usize) -> Vec<usize> {
        let mut out = vec![0; self.dimension()];
        for axis in (0..self.dimension()).rev() {
            out[axis] = idx % self.counts[axis];
            idx /= self.counts[axis];
        }
        out
    }

    pub fn flat_index(&self, multi: &[usize]) -> usize {
        multi
            .iter()
            .zip(&self.counts)
            .fold(0, |acc, (&j, &n)| acc * n + j)
    }

    pub fn node(&self, idx: usize) -> Vec<f64> {
        self.multi_index(idx)
            .iter()
            .enumerate()
            .map(|(axis, &j)| self.coordinate(axis, j))
            .collect()
    }

    /// Angular DFT frequency of bin `k` on `axis`, `2 pi k' / (N h)` with `k'`
    /// the signed index.
    pub fn frequency(&self, axis: usize, k: usize) -> f64 {
        let n = self.counts[axis];
        2.0 * PI * fft::signed_index(k, n) as f64 / (n as f64 * self.spacing(axis))
    }

    /// Frequency vector of flat DFT bin `idx`.
    pub fn frequency_vector(&self, idx: usize) -> Vec<f64> {
        self.multi_index(idx)
            .iter()
            .enumerate()
            .map(|(axis, &k)| self.frequency(axis, k))
            .collect()
    }

    /// The grid `D_r G` with the same point counts: axis `i` is stretched by
    /// `r^{w_i}`.
    pub fn dilated(&self, spec: &GroupSpec, r: f64) -> Result<Self> {
        if !(r > 0.0) {
            return Err(Error::NonPositiveDilation(r));
        }
        if spec.dimension() != self.dimension() {
            return Err(Error::DimensionMismatch {
                expected: spec.dimension(),
                found: self.dimension(),
            });
        }
        let half: Vec<f64> = self
            .half_extent
            .iter()
            .enumerate()
            .map(|(i, l)| l * r.powf(spec.weight(i)))
            .collect();
        Self::new(&half, &self.counts, self.boundary)
    }

    /// The same box with every point count doubled.
    pub fn refined(&self) -> Self {
        Self {
            half_extent: self.half_extent.clone(),
            counts: self.counts.iter().map(|n| 2 * n).collect(),
            boundary: self.boundary,
        }
    }

    /// Fractional node index of coordinate `x` on `axis`.
    fn fractional_index(&self, axis: usize, x: f64) -> f64 {
        (x + self.half_extent[axis]) / self.spacing(axis)
    }

    /// Maps a point to a node index if it is a node (after periodic wrap).
    /// `Ok(None)` means the point is aligned but outside a truncated box.
    fn locate(&self, point: &[f64]) -> Result<Option<usize>> {
        let mut flat = 0usize;
        let mut outside = false;
        for (axis, &x) in point.iter().enumerate() {
            let n = self.counts[axis] as i64;
            let fj = self.fractional_index(axis, x);
            let j = fj.round();
            if (fj - j).abs() > ALIGN_TOL * (1.0 + fj.abs()) {
                return Err(Error::NotGridAligned);
            }
            let mut j = j as i64;
            match self.boundary {
                BoundaryMode::Periodic => j = j.rem_euclid(n),
                BoundaryMode::Truncated => {
                    if j < 0 || j >= n {
                        outside = true;
                        j = 0;
                    }
                }
            }
            flat = flat * self.counts[axis] + j as usize;
        }
        Ok(if outside { None } else { Some(flat) })
    }
}

/// Complex samples of a function on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    grid: Grid,
    values: Vec<Complex64>,
}

fn check_exponent(p: f64) -> Result<()> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::InvalidExponent(p));
    }
    Ok(())
}

impl SampledFunction {
    pub fn new(grid: Grid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::DimensionMismatch {
                expected: grid.len(),
                found: values.len(),
            });
        }
        if values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::NonFinite("sample values"));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: &Grid) -> Self {
        Self {
            values: vec![Complex64::new(0.0, 0.0); grid.len()],
            grid: grid.clone(),
        }
    }

    pub fn from_fn<F>(grid: &Grid, mut f: F) -> Result<Self>
    where
        F: FnMut(&[f64]) -> Complex64,
    {
        let mut point = vec![0.0; grid.dimension()];
        let values = (0..grid.len())
            .map(|idx| {
                let multi = grid.multi_index(idx);
                for (axis, &j) in multi.iter().enumerate() {
                    point[axis] = grid.coordinate(axis, j);
                }
                f(&point)
            })
            .collect();
        Self::new(grid.clone(), values)
    }

    pub fn from_real_fn<F>(grid: &Grid, mut f: F) -> Result<Self>
    where
        F: FnMut(&[f64]) -> f64,
    {
        Self::from_fn(grid, |x| Complex64::new(f(x), 0.0))
    }

    /// Samples `g = F^{-1} sigma` with `F^{-1} sigma(x) = (2 pi)^{-n} \int sigma(xi) e^{i x xi} dxi`,
    /// using the DFT frequencies of the grid. Periodic grids only.
    pub fn from_spectrum<F>(grid: &Grid, mut sigma: F) -> Result<Self>
    where
        F: FnMut(&[f64]) -> Complex64,
    {
        if grid.boundary() != BoundaryMode::Periodic {
            return Err(Error::Unsupported("spectral synthesis needs a periodic grid"));
        }
        let mut data: Vec<Complex64> = (0..grid.len())
            .map(|idx| {
                let multi = grid.multi_index(idx);
                let parity: usize = multi.iter().sum();
                let xi = grid.frequency_vector(idx);
                let s = sigma(&xi);
                if parity % 2 == 1 {
                    -s
                } else {
                    s
                }
            })
            .collect();
        fft::fft_nd(&mut data, grid.counts(), true);
        let scale = 1.0 / grid.cell_volume();
        for v in data.iter_mut() {
            *v *= scale;
        }
        Self::new(grid.clone(), data)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    /// Replaces the values, keeping the grid.
    pub fn with_values(&self, values: Vec<Complex64>) -> Result<Self> {
        Self::new(self.grid.clone(), values)
    }

    /// `(sum |f|^p prod h_i)^{1/p}`, or the max modulus for `p = inf`.
    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        check_exponent(p)?;
        lp_norm_of(&self.values, self.grid.cell_volume(), p)
    }

    /// `<f, g> = sum f conj(g) dV`.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        self.same_grid(other)?;
        let s: Complex64 = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b.conj())
            .sum();
        Ok(s * self.grid.cell_volume())
    }

    pub fn same_grid(&self, other: &Self) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_grid(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect();
        Self::new(self.grid.clone(), values)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_grid(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect();
        Self::new(self.grid.clone(), values)
    }

    pub fn scale(&self, c: Complex64) -> Result<Self> {
        Self::new(self.grid.clone(), self.values.iter().map(|v| v * c).collect())
    }

    /// `(tau_h f)(x) = f(h x)`: periodic wrap on periodic grids, zero fill
    /// outside truncated boxes. Every node must map onto a node.
    pub fn translate(&self, spec: &GroupSpec, h: &[f64]) -> Result<Self> {
        if spec.dimension() != self.grid.dimension() {
            return Err(Error::DimensionMismatch {
                expected: self.grid.dimension(),
                found: spec.dimension(),
            });
        }
        let mut values = vec![Complex64::new(0.0, 0.0); self.grid.len()];
        for (idx, out) in values.iter_mut().enumerate() {
            let x = self.grid.node(idx);
            let hx = spec.multiply(h, &x)?;
            if let Some(src) = self.grid.locate(&hx)? {
                *out = self.values[src];
            }
        }
        Self::new(self.grid.clone(), values)
    }

    /// `f o D_r` on the same grid, for `r = 2^k`, `k >= 0`, whenever every
    /// `r^{w_i}` is an integer so that dilated nodes are nodes. Points mapped
    /// outside the box read as zero.
    pub fn dilate_function(&self, spec: &GroupSpec, r: f64) -> Result<Self> {
        if !(r > 0.0) {
            return Err(Error::NonPositiveDilation(r));
        }
        let k = r.log2();
        if (k - k.round()).abs() > 1e-12 || k.round() < 0.0 {
            return Err(Error::DilationNotRepresentable(r));
        }
        let factors: Vec<f64> = (0..spec.dimension()).map(|i| r.powf(spec.weight(i))).collect();
        if factors.iter().any(|f| (f - f.round()).abs() > 1e-12) {
            return Err(Error::DilationNotRepresentable(r));
        }
        for (axis, &n) in self.grid.counts().iter().enumerate() {
            if n % 2 != 0 && factors[axis] != 1.0 {
                return Err(Error::DilationNotRepresentable(r));
            }
        }
        let grid = &self.grid;
        let mut values = vec![Complex64::new(0.0, 0.0); grid.len()];
        'nodes: for (idx, out) in values.iter_mut().enumerate() {
            let multi = grid.multi_index(idx);
            let mut src = 0usize;
            for (axis, &j) in multi.iter().enumerate() {
                let n = grid.counts()[axis] as i64;
                let c = n / 2;
                let js = (j as i64 - c) * factors[axis].round() as i64 + c;
                if js < 0 || js >= n {
                    continue 'nodes;
                }
                src = src * grid.counts()[axis] + js as usize;
            }
            *out = self.values[src];
        }
        Self::new(grid.clone(), values)
    }

    /// The same sample array read on the grid `D_{1/r} G`; as a function this
    /// is `f o D_r` with no resampling.
    pub fn codilate(&self, spec: &GroupSpec, r: f64) -> Result<Self> {
        let grid = self.grid.dilated(spec, 1.0 / r)?;
        Self::new(grid, self.values.clone())
    }

    /// Continuous Fourier transform samples `\hat f(xi_k) = \int f e^{-i x xi}`
    /// at the DFT frequencies (periodic grids only), in FFT order.
    pub fn spectrum(&self) -> Result<Vec<Complex64>> {
        if self.grid.boundary() != BoundaryMode::Periodic {
            return Err(Error::Unsupported("spectrum needs a periodic grid"));
        }
        let mut data = self.values.clone();
        fft::fft_nd(&mut data, self.grid.counts(), false);
        let dv = self.grid.cell_volume();
        for (idx, v) in data.iter_mut().enumerate() {
            let parity: usize = self.grid.multi_index(idx).iter().sum();
            *v *= if parity % 2 == 1 { -dv } else { dv };
        }
        Ok(data)
    }

    /// Fraction of `sum |f|^2` carried by nodes whose coordinates all lie in
    /// the inner half of the box.
    pub fn inner_half_mass_fraction(&self) -> f64 {
        let mut inner = 0.0;
        let mut total = 0.0;
        for (idx, v) in self.values.iter().enumerate() {
            let m = v.norm_sqr();
            total += m;
            let x = self.grid.node(idx);
            if x
                .iter()
                .zip(self.grid.half_extent())
                .all(|(xi, l)| xi.abs() <= 0.5 * l)
            {
                inner += m;
            }
        }
        if total == 0.0 {
            1.0
        } else {
            inner / total
        }
    }
}

/// Quadrature `L^p` norm of raw samples with cell volume `dv`.
pub fn lp_norm_of(values: &[Complex64], dv: f64, p: f64) -> Result<f64> {
    check_exponent(p)?;
    if p.is_infinite() {
        return Ok(values.iter().map(|v| v.norm()).fold(0.0, f64::max));
    }
    // Scale by the max modulus first to keep |f|^p in range for large p.
    let m = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if m == 0.0 {
        return Ok(0.0);
    }
    let s: f64 = values.iter().map(|v| (v.norm() / m).powf(p)).sum();
    Ok(m * (s * dv).powf(1.0 / p))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian_line(l: f64, n: usize) -> SampledFunction {
        let g = Grid::periodic(&[l], &[n]).unwrap();
        SampledFunction::from_real_fn(&g, |x| (-x[0] * x[0]).exp()).unwrap()
    }

    #[test]
    fn grid_validation() {
        assert!(Grid::periodic(&[1.0], &[12]).is_err());
        assert!(Grid::truncated(&[1.0], &[12]).is_ok());
        assert!(Grid::periodic(&[0.0], &[8]).is_err());
        assert!(Grid::periodic(&[1.0, 1.0], &[8]).is_err());
        let g = Grid::periodic(&[1.0, 2.0], &[8, 16]).unwrap();
        assert_eq!(g.cell_volume(), 0.25 * 0.25);
        assert_eq!(g.node(g.flat_index(&[4, 8])), vec![0.0, 0.0]);
        assert_eq!(g.multi_index(g.flat_index(&[3, 11])), vec![3, 11]);
    }

    #[test]
    fn single_cell_indicator_norm() {
        let g = Grid::periodic(&[1.0, 2.0], &[8, 8]).unwrap();
        let mut f = SampledFunction::zeros(&g);
        f.values_mut()[5] = Complex64::new(1.0, 0.0);
        assert!((f.lp_norm(1.0).unwrap() - g.cell_volume()).abs() < 1e-15);
        assert_eq!(f.lp_norm(f64::INFINITY).unwrap(), 1.0);
        assert_eq!(f.lp_norm(0.5), Err(Error::InvalidExponent(0.5)));
    }

    #[test]
    fn gaussian_l2_norm() {
        let f = gaussian_line(10.0, 1024);
        let expected = (PI / 2.0).sqrt().sqrt();
        assert!((f.lp_norm(2.0).unwrap() - expected).abs() < 1e-8);
    }

    #[test]
    fn translation_examples() {
        let a = GroupSpec::abelian(&[1]).unwrap();
        let g = Grid::periodic(&[4.0], &[64]).unwrap();
        let f = SampledFunction::from_real_fn(&g, |x| if x[0] < 0.0 && x[0] > -3.0 { 1.0 } else { 0.0 })
            .unwrap();
        assert_eq!(f.translate(&a, &[0.0]).unwrap(), f);
        let t = f.translate(&a, &[4.0]).unwrap();
        let overlap: f64 = f.values().iter().zip(t.values()).map(|(u, v)| (u * v).norm()).sum();
        assert_eq!(overlap, 0.0);
        assert!((t.lp_norm(1.5).unwrap() - f.lp_norm(1.5).unwrap()).abs() < 1e-14);
        assert_eq!(f.translate(&a, &[0.01]), Err(Error::NotGridAligned));
    }

    #[test]
    fn heisenberg_translation_roundtrip() {
        let h = GroupSpec::heisenberg();
        // h_t = h_x h_y / 2 keeps the twist term on nodes.
        let g = Grid::truncated(&[4.0, 4.0, 2.0], &[16, 16, 32]).unwrap();
        let f = SampledFunction::from_real_fn(&g, |x| {
            let r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
            if r2 < 1.0 {
                (1.0 - r2).powi(3)
            } else {
                0.0
            }
        })
        .unwrap();
        let p = [0.5, -1.0, 0.25];
        let inv = h.inverse(&p).unwrap();
        let back = f.translate(&h, &p).unwrap().translate(&h, &inv).unwrap();
        let err = back.sub(&f).unwrap().lp_norm(2.0).unwrap();
        assert!(err < 1e-12 * f.lp_norm(2.0).unwrap());
    }

    #[test]
    fn dilation_norm_ratios() {
        let a = GroupSpec::abelian(&[1]).unwrap();
        let f = gaussian_line(16.0, 1024);
        assert_eq!(f.dilate_function(&a, 1.0).unwrap(), f);
        let d = f.dilate_function(&a, 2.0).unwrap();
        let ratio = d.lp_norm(2.0).unwrap() / f.lp_norm(2.0).unwrap();
        assert!((ratio - 2f64.powf(-0.5)).abs() < 1e-10);
        assert!(f.dilate_function(&a, 3.0).is_err());
        assert!(f.dilate_function(&a, 0.5).is_err());

        let h = GroupSpec::heisenberg();
        let g = Grid::truncated(&[6.0, 6.0, 6.0], &[48, 48, 96]).unwrap();
        let f = SampledFunction::from_real_fn(&g, |x| {
            (-(x[0] * x[0] + x[1] * x[1]) - 0.5 * x[2] * x[2]).exp()
        })
        .unwrap();
        let d = f.dilate_function(&h, 2.0).unwrap();
        let ratio = d.lp_norm(1.0).unwrap() / f.lp_norm(1.0).unwrap();
        assert!((ratio - 2f64.powi(-4)).abs() < 1e-6);
    }

    #[test]
    fn codilation_is_exact() {
        let h = GroupSpec::heisenberg();
        let g = Grid::truncated(&[2.0, 2.0, 4.0], &[8, 8, 8]).unwrap();
        let f = SampledFunction::from_real_fn(&g, |x| x[0] + x[2]).unwrap();
        let d = f.codilate(&h, 2.0).unwrap();
        assert_eq!(d.grid().half_extent(), &[1.0, 1.0, 1.0]);
        let ratio = d.lp_norm(1.0).unwrap() / f.lp_norm(1.0).unwrap();
        assert!((ratio - 1.0 / 16.0).abs() < 1e-14);
    }

    #[test]
    fn spectrum_roundtrip_and_gaussian_transform() {
        let f = gaussian_line(16.0, 256);
        let spec = f.spectrum().unwrap();
        // \int e^{-x^2} e^{-i x xi} dx = sqrt(pi) e^{-xi^2/4}
        for (k, s) in spec.iter().enumerate() {
            let xi = f.grid().frequency(0, k);
            let exact = PI.sqrt() * (-xi * xi / 4.0).exp();
            assert!((s - exact).norm() < 1e-10);
        }
        let back = SampledFunction::from_spectrum(f.grid(), |xi| {
            Complex64::new(PI.sqrt() * (-xi[0] * xi[0] / 4.0).exp(), 0.0)
        })
        .unwrap();
        assert!(back.sub(&f).unwrap().lp_norm(f64::INFINITY).unwrap() < 1e-10);
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(12))]
        #[test]
        fn haar_dilation_identity(k in 1u32..3, s in 0.8f64..1.4) {
            let spec = GroupSpec::abelian(&[1, 2]).unwrap();
            let g = Grid::periodic(&[16.0, 16.0], &[256, 1024]).unwrap();
            let f = SampledFunction::from_real_fn(&g, |x| {
                (-(x[0] * x[0]) / (s * s) - (x[1] * x[1]) / (s * s * s * s)).exp()
            }).unwrap();
            let r = f64::from(1u32 << k);
            let d = f.dilate_function(&spec, r).unwrap();
            let sum = |u: &SampledFunction| -> f64 { u.values().iter().map(|v| v.re).sum::<f64>() * g.cell_volume() };
            let expected = r.powf(-spec.q()) * sum(&f);
            proptest::prop_assert!((sum(&d) - expected).abs() <= 1e-6 * expected.abs());
        }
    }
}
