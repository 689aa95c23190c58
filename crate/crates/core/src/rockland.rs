//! Positive Rockland operators on the model groups.
//!
//! Abelian groups get the exact Fourier symbol `a(xi) = sum_i xi_i^{2 m_i}`
//! sampled at DFT frequencies. The Heisenberg group gets the sub-Laplacian
//! `R = X_d^T X_d + Y_d^T Y_d` with forward differences and zero extension,
//! where `X = d_x - (y/2) d_t` and `Y = d_y + (x/2) d_t`.
//!
//! Every operator carries a `shift` so that `I + R` is available for the
//! inhomogeneous scales; all spectral quantities refer to `shift + R`.

use alloc::boxed::Box;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use faer::{Mat, Side};
use num_complex::Complex64;
use num_rational::Rational64;
#[allow(unused_imports)]
use num_traits::Float;
use num_traits::ToPrimitive;
use once_cell::race::OnceBox;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::fft;
use crate::grid::{BoundaryMode, Grid, SampledFunction};
use crate::group::{GroupKind, GroupSpec};
use crate::sparse::CsrMatrix;
use crate::{Error, Result};

/// Largest grid accepted by [`RocklandOp::dense_eig`].
pub const DENSE_LIMIT: usize = 8192;

const POWER_STEPS: usize = 50;

#[derive(Debug, Clone)]
pub enum Backend {
    /// Symbol samples `a(xi_k)` in FFT order, with the monomial exponents.
    Symbol { samples: Vec<f64>, exponents: Vec<u32> },
    Sparse(CsrMatrix),
}

/// Full eigendecomposition of the unshifted operator `R` as a real symmetric
/// matrix. Eigenvectors are the columns of `vectors`, orthonormal for the
/// plain Euclidean product on node values.
#[derive(Debug)]
pub struct EigDecomp {
    eigenvalues: Vec<f64>,
    vectors: Mat<f64>,
}

impl EigDecomp {
    fn from_dense(n: usize, dense_col_major: &[f64]) -> Result<Self> {
        let m = Mat::<f64>::from_fn(n, n, |i, j| dense_col_major[j * n + i]);
        let evd = m.self_adjoint_eigen(Side::Lower).map_err(|_| Error::EigenFailure)?;
        let s = evd.S().column_vector();
        let u = evd.U();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| s[a].total_cmp(&s[b]));
        let eigenvalues: Vec<f64> = order.iter().map(|&k| s[k]).collect();
        if eigenvalues.iter().any(|v| !v.is_finite()) {
            return Err(Error::EigenFailure);
        }
        let vectors = Mat::<f64>::from_fn(n, n, |i, j| u[(i, order[j])]);
        Ok(Self { eigenvalues, vectors })
    }

    /// Nondecreasing eigenvalues of `R` (without the operator shift).
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Euclidean-normalized eigenvector `k` as node values.
    pub fn vector(&self, k: usize) -> Vec<f64> {
        (0..self.len()).map(|i| self.vectors[(i, k)]).collect()
    }

    /// Expansion coefficients `<v_k, f>` for real and imaginary parts.
    pub fn coefficients(&self, values: &[Complex64]) -> Vec<Complex64> {
        let n = self.len();
        let f = Mat::<f64>::from_fn(n, 2, |i, j| if j == 0 { values[i].re } else { values[i].im });
        let c = self.vectors.transpose() * &f;
        (0..n).map(|k| Complex64::new(c[(k, 0)], c[(k, 1)])).collect()
    }

    /// `sum_k w_k c_k v_k` for complex weights `w_k`.
    pub fn synthesize(&self, weighted: &[Complex64]) -> Vec<Complex64> {
        let n = self.len();
        let c = Mat::<f64>::from_fn(n, 2, |k, j| if j == 0 { weighted[k].re } else { weighted[k].im });
        let y = &self.vectors * &c;
        (0..n).map(|i| Complex64::new(y[(i, 0)], y[(i, 1)])).collect()
    }

    /// `sum_k m(shift + lambda_k) <v_k, f> v_k`.
    pub fn apply<F>(&self, shift: f64, values: &[Complex64], mut m: F) -> Vec<Complex64>
    where
        F: FnMut(f64) -> Complex64,
    {
        let c = self.coefficients(values);
        let w: Vec<Complex64> = c
            .iter()
            .zip(&self.eigenvalues)
            .map(|(ck, &lam)| ck * m(shift + lam))
            .collect();
        self.synthesize(&w)
    }
}

#[derive(Debug, Clone)]
pub struct RocklandOp {
    spec: GroupSpec,
    grid: Grid,
    nu: Rational64,
    backend: Backend,
    lambda_max: f64,
    power_estimate: f64,
    shift: f64,
    eig: Arc<OnceBox<EigDecomp>>,
}

fn fresh_cache() -> Arc<OnceBox<EigDecomp>> {
    Arc::new(OnceBox::new())
}

impl RocklandOp {
    /// `a(xi) = sum_i xi_i^{2 m_i}` on a periodic grid. Requires the degrees
    /// `2 m_i w_i` to agree; that common value is `nu`.
    pub fn abelian_symbol_operator(spec: &GroupSpec, grid: &Grid, exponents: &[u32]) -> Result<Self> {
        if spec.kind() != GroupKind::AbelianGraded {
            return Err(Error::Unsupported("symbol operators need an abelian group"));
        }
        if exponents.len() != spec.dimension() {
            return Err(Error::DimensionMismatch {
                expected: spec.dimension(),
                found: exponents.len(),
            });
        }
        if grid.dimension() != spec.dimension() {
            return Err(Error::DimensionMismatch {
                expected: spec.dimension(),
                found: grid.dimension(),
            });
        }
        if grid.boundary() != BoundaryMode::Periodic {
            return Err(Error::InvalidGrid("symbol operators need a periodic grid"));
        }
        if exponents.contains(&0) {
            return Err(Error::InvalidParameter("monomial exponents must be positive".into()));
        }
        let degrees: Vec<Rational64> = exponents
            .iter()
            .zip(spec.weights())
            .map(|(&m, w)| Rational64::from_integer(2 * i64::from(m)) * w)
            .collect();
        if degrees.iter().any(|d| *d != degrees[0]) {
            return Err(Error::InhomogeneousSymbol);
        }
        let samples: Vec<f64> = (0..grid.len())
            .map(|idx| {
                grid.frequency_vector(idx)
                    .iter()
                    .zip(exponents)
                    .map(|(xi, &m)| xi.powi(2 * m as i32))
                    .sum()
            })
            .collect();
        let lambda_max = samples.iter().copied().fold(0.0, f64::max);
        Ok(Self {
            spec: spec.clone(),
            grid: grid.clone(),
            nu: degrees[0],
            backend: Backend::Symbol {
                samples,
                exponents: exponents.to_vec(),
            },
            lambda_max,
            power_estimate: lambda_max,
            shift: 0.0,
            eig: fresh_cache(),
        })
    }

    /// Finite-difference sub-Laplacian on a truncated Heisenberg box.
    pub fn heisenberg_sublaplacian(grid: &Grid) -> Result<Self> {
        if grid.dimension() != 3 || grid.boundary() != BoundaryMode::Truncated {
            return Err(Error::InvalidGrid("sub-Laplacian needs a truncated three-axis box"));
        }
        if grid.counts().iter().any(|&n| n < 4) {
            return Err(Error::GridTooSmall);
        }
        let xd = horizontal_field(grid, 0);
        let yd = horizontal_field(grid, 1);
        let matrix = xd.gram().add(&yd.gram());
        let lambda_max = matrix.gershgorin_bound();
        let power_estimate = power_iteration(&matrix);
        debug_assert!(power_estimate <= lambda_max * (1.0 + 1e-12) + 1e-300);
        Ok(Self {
            spec: GroupSpec::heisenberg(),
            grid: grid.clone(),
            nu: Rational64::from_integer(2),
            backend: Backend::Sparse(matrix),
            lambda_max,
            power_estimate,
            shift: 0.0,
            eig: fresh_cache(),
        })
    }

    /// The same operator family on another grid, keeping the shift.
    pub fn on_grid(&self, grid: &Grid) -> Result<Self> {
        let op = match &self.backend {
            Backend::Symbol { exponents, .. } => Self::abelian_symbol_operator(&self.spec, grid, exponents)?,
            Backend::Sparse(_) => Self::heisenberg_sublaplacian(grid)?,
        };
        Ok(op.with_shift(self.shift))
    }

    /// `shift + R`; shares the cached eigendecomposition of `R`.
    pub fn with_shift(&self, shift: f64) -> Self {
        let mut out = self.clone();
        out.shift = shift;
        out
    }

    /// `I + R`, the operator of the inhomogeneous scales.
    pub fn inhomogeneous(&self) -> Self {
        self.with_shift(1.0)
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn nu(&self) -> Rational64 {
        self.nu
    }

    pub fn nu_f64(&self) -> f64 {
        self.nu.to_f64().unwrap_or(f64::NAN)
    }

    pub fn backend(&self) -> &Backend {
        &self.backend
    }

    pub fn shift(&self) -> f64 {
        self.shift
    }

    pub fn is_symbol(&self) -> bool {
        matches!(self.backend, Backend::Symbol { .. })
    }

    pub fn sparse_matrix(&self) -> Option<&CsrMatrix> {
        match &self.backend {
            Backend::Sparse(m) => Some(m),
            Backend::Symbol { .. } => None,
        }
    }

    /// Symbol samples of `shift + a` in FFT order.
    pub fn symbol_samples(&self) -> Option<Vec<f64>> {
        match &self.backend {
            Backend::Symbol { samples, .. } => Some(samples.iter().map(|a| a + self.shift).collect()),
            Backend::Sparse(_) => None,
        }
    }

    /// Certified upper bound on the spectrum of `shift + R`.
    pub fn spectral_bound(&self) -> f64 {
        self.shift + self.lambda_max
    }

    /// Lower end of the spectrum interval, `shift`.
    pub fn spectral_floor(&self) -> f64 {
        self.shift
    }

    /// Rayleigh quotient after 50 power-iteration steps, plus the shift.
    pub fn power_estimate(&self) -> f64 {
        self.shift + self.power_estimate
    }

    pub fn dense_eligible(&self) -> bool {
        self.grid.len() <= DENSE_LIMIT
    }

    fn check_grid(&self, f: &SampledFunction) -> Result<()> {
        if f.grid() != &self.grid {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }

    /// `(shift + R) f`.
    pub fn apply(&self, f: &SampledFunction) -> Result<SampledFunction> {
        self.check_grid(f)?;
        let values = self.apply_values(f.values());
        f.with_values(values)
    }

    pub(crate) fn apply_values(&self, x: &[Complex64]) -> Vec<Complex64> {
        match &self.backend {
            Backend::Symbol { samples, .. } => {
                let mut data = x.to_vec();
                fft::fft_nd(&mut data, self.grid.counts(), false);
                for (v, a) in data.iter_mut().zip(samples) {
                    *v *= a + self.shift;
                }
                fft::fft_nd(&mut data, self.grid.counts(), true);
                data
            }
            Backend::Sparse(m) => {
                let mut y = vec![Complex64::new(0.0, 0.0); x.len()];
                m.matvec(x, &mut y);
                if self.shift != 0.0 {
                    for (yi, xi) in y.iter_mut().zip(x) {
                        *yi += xi * self.shift;
                    }
                }
                y
            }
        }
    }

    /// Dense real matrix of `R` (unshifted), column-major.
    pub fn dense_matrix(&self) -> Result<Vec<f64>> {
        let n = self.grid.len();
        if n > DENSE_LIMIT {
            return Err(Error::DenseLimitExceeded { size: n, limit: DENSE_LIMIT });
        }
        match &self.backend {
            Backend::Sparse(m) => Ok(m.to_dense_col_major()),
            Backend::Symbol { samples, .. } => {
                // Column j is R e_j. The symbol is even, so R is real; the
                // transposed average removes rounding asymmetry.
                let mut out = vec![0.0; n * n];
                let mut e = vec![Complex64::new(0.0, 0.0); n];
                for j in 0..n {
                    e.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
                    e[j] = Complex64::new(1.0, 0.0);
                    fft::fft_nd(&mut e, self.grid.counts(), false);
                    for (v, a) in e.iter_mut().zip(samples) {
                        *v *= a;
                    }
                    fft::fft_nd(&mut e, self.grid.counts(), true);
                    for i in 0..n {
                        out[j * n + i] = e[i].re;
                    }
                }
                for j in 0..n {
                    for i in 0..j {
                        let avg = 0.5 * (out[j * n + i] + out[i * n + j]);
                        out[j * n + i] = avg;
                        out[i * n + j] = avg;
                    }
                }
                Ok(out)
            }
        }
    }

    /// Eigendecomposition of `R` (unshifted), computed once and cached; the
    /// spectrum of this operator is `shift + eigenvalues`.
    pub fn dense_eig(&self) -> Result<&EigDecomp> {
        if let Some(e) = self.eig.get() {
            return Ok(e);
        }
        let n = self.grid.len();
        let dense = self.dense_matrix()?;
        let e = EigDecomp::from_dense(n, &dense)?;
        Ok(self.eig.get_or_init(|| Box::new(e)))
    }
}

/// Horizontal field `X_d` (axis 0) or `Y_d` (axis 1) as a sparse matrix.
fn horizontal_field(grid: &Grid, axis: usize) -> CsrMatrix {
    let n = grid.len();
    let mut triplets = Vec::with_capacity(4 * n);
    // (other horizontal coordinate) * sign / 2 multiplies d_t
    let (other, sign) = if axis == 0 { (1, -0.5) } else { (0, 0.5) };
    let h_axis = grid.spacing(axis);
    let h_t = grid.spacing(2);
    for idx in 0..n {
        let multi = grid.multi_index(idx);
        push_forward_difference(&mut triplets, grid, idx, &multi, axis, 1.0 / h_axis);
        let c = sign * grid.coordinate(other, multi[other]);
        if c != 0.0 {
            push_forward_difference(&mut triplets, grid, idx, &multi, 2, c / h_t);
        }
    }
    CsrMatrix::from_triplets(n, n, &triplets)
}

fn push_forward_difference(
    triplets: &mut Vec<(usize, usize, f64)>,
    grid: &Grid,
    idx: usize,
    multi: &[usize],
    axis: usize,
    scale: f64,
) {
    triplets.push((idx, idx, -scale));
    if multi[axis] + 1 < grid.counts()[axis] {
        let mut next = multi.to_vec();
        next[axis] += 1;
        triplets.push((idx, grid.flat_index(&next), scale));
    }
}

fn power_iteration(m: &CsrMatrix) -> f64 {
    let n = m.nrows();
    if n == 0 {
        return 0.0;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let mut y = vec![0.0; n];
    let mut estimate = 0.0;
    for _ in 0..POWER_STEPS {
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            return 0.0;
        }
        x.iter_mut().for_each(|v| *v /= norm);
        m.matvec_real(&x, &mut y);
        estimate = x.iter().zip(&y).map(|(a, b)| a * b).sum();
        core::mem::swap(&mut x, &mut y);
    }
    estimate
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    fn line(n: usize, l: f64) -> (GroupSpec, Grid) {
        (GroupSpec::abelian(&[1]).unwrap(), Grid::periodic(&[l], &[n]).unwrap())
    }

    fn random_function(grid: &Grid, seed: u64) -> SampledFunction {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values = (0..grid.len())
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        SampledFunction::new(grid.clone(), values).unwrap()
    }

    #[test]
    fn symbol_construction() {
        let (spec, grid) = line(64, 8.0);
        let op = RocklandOp::abelian_symbol_operator(&spec, &grid, &[1]).unwrap();
        assert_eq!(op.nu(), Rational64::from_integer(2));
        let h = grid.spacing(0);
        assert!((op.spectral_bound() - (PI / h).powi(2)).abs() < 1e-9);

        let plane = GroupSpec::abelian(&[1, 2]).unwrap();
        let g2 = Grid::periodic(&[4.0, 4.0], &[16, 16]).unwrap();
        let op2 = RocklandOp::abelian_symbol_operator(&plane, &g2, &[2, 1]).unwrap();
        assert_eq!(op2.nu(), Rational64::from_integer(4));
        assert_eq!(
            RocklandOp::abelian_symbol_operator(&plane, &g2, &[1, 1]).unwrap_err(),
            Error::InhomogeneousSymbol
        );
    }

    #[test]
    fn symbol_acts_on_grid_modes() {
        let (spec, grid) = line(64, 8.0);
        let op = RocklandOp::abelian_symbol_operator(&spec, &grid, &[1]).unwrap();
        let xi0 = grid.frequency(0, 5);
        let f = SampledFunction::from_fn(&grid, |x| Complex64::new(0.0, xi0 * x[0]).exp()).unwrap();
        let rf = op.apply(&f).unwrap();
        let expected = f.scale(Complex64::new(xi0 * xi0, 0.0)).unwrap();
        assert!(rf.sub(&expected).unwrap().lp_norm(f64::INFINITY).unwrap() < 1e-12);
        let z = SampledFunction::zeros(&grid);
        assert_eq!(op.apply(&z).unwrap().lp_norm(2.0).unwrap(), 0.0);
    }

    #[test]
    fn abelian_dense_eigenvalues_are_symbol_samples() {
        let (spec, grid) = line(64, 8.0);
        let op = RocklandOp::abelian_symbol_operator(&spec, &grid, &[1]).unwrap();
        let e = op.dense_eig().unwrap();
        let mut samples = op.symbol_samples().unwrap();
        samples.sort_by(f64::total_cmp);
        let scale = op.spectral_bound();
        for (a, b) in e.eigenvalues().iter().zip(&samples) {
            assert!((a - b).abs() < 1e-10 * scale);
        }
    }

    #[test]
    fn sublaplacian_constants_and_positivity() {
        let grid = Grid::truncated(&[2.0, 2.0, 2.0], &[12, 12, 12]).unwrap();
        let op = RocklandOp::heisenberg_sublaplacian(&grid).unwrap();
        assert_eq!(op.nu(), Rational64::from_integer(2));
        let one = SampledFunction::from_real_fn(&grid, |_| 1.0).unwrap();
        let r1 = op.apply(&one).unwrap();
        for idx in 0..grid.len() {
            let m = grid.multi_index(idx);
            if m.iter().zip(grid.counts()).all(|(&j, &n)| j >= 2 && j + 2 < n) {
                assert!(r1.values()[idx].norm() < 1e-12);
            }
        }
        for seed in 0..100 {
            let f = random_function(&grid, seed);
            let q = f.inner(&op.apply(&f).unwrap()).unwrap();
            assert!(q.re >= -1e-10 * f.lp_norm(2.0).unwrap().powi(2));
            assert!(q.im.abs() < 1e-9 * q.re.abs().max(1.0));
        }
        assert_eq!(
            RocklandOp::heisenberg_sublaplacian(&Grid::truncated(&[1.0; 3], &[3, 8, 8]).unwrap()).unwrap_err(),
            Error::GridTooSmall
        );
    }

    #[test]
    fn sublaplacian_bounds_and_dense_oracle() {
        let grid = Grid::truncated(&[2.0, 2.0, 2.0], &[12, 12, 12]).unwrap();
        let op = RocklandOp::heisenberg_sublaplacian(&grid).unwrap();
        let e = op.dense_eig().unwrap();
        let top = *e.eigenvalues().last().unwrap();
        assert!(op.spectral_bound() >= top);
        assert!(op.power_estimate() <= top * (1.0 + 1e-10));
        assert!(e.eigenvalues()[0] >= -1e-10);
        let mat = op.sparse_matrix().unwrap();
        assert!(mat.is_symmetric(1e-12));
    }

    #[test]
    fn apply_matches_dense_product_and_reconstruction() {
        let grid = Grid::truncated(&[2.0, 2.0, 2.0], &[8, 8, 8]).unwrap();
        let op = RocklandOp::heisenberg_sublaplacian(&grid).unwrap();
        let f = random_function(&grid, 7);
        let n = grid.len();
        let dense = op.dense_matrix().unwrap();
        let direct = op.apply(&f).unwrap();
        let mut dense_y = vec![Complex64::new(0.0, 0.0); n];
        for j in 0..n {
            for i in 0..n {
                dense_y[i] += f.values()[j] * dense[j * n + i];
            }
        }
        let scale = direct.lp_norm(f64::INFINITY).unwrap();
        for (a, b) in direct.values().iter().zip(&dense_y) {
            assert!((a - b).norm() <= 1e-12 * scale);
        }
        let e = op.dense_eig().unwrap();
        let recon = e.apply(0.0, f.values(), |l| Complex64::new(l, 0.0));
        for (a, b) in direct.values().iter().zip(&recon) {
            assert!((a - b).norm() <= 1e-8 * scale);
        }
        // orthonormality on a few pairs
        for (a, b) in [(0usize, 0usize), (3, 3), (0, 1), (10, 200)] {
            let va = e.vector(a);
            let vb = e.vector(b);
            let d: f64 = va.iter().zip(&vb).map(|(x, y)| x * y).sum();
            let expected = if a == b { 1.0 } else { 0.0 };
            assert!((d - expected).abs() < 1e-10);
        }
    }

    #[test]
    fn discrete_homogeneity_under_grid_scaling() {
        let g = Grid::truncated(&[2.0, 2.0, 2.0], &[8, 8, 8]).unwrap();
        let h = GroupSpec::heisenberg();
        let op = RocklandOp::heisenberg_sublaplacian(&g).unwrap();
        let op2 = RocklandOp::heisenberg_sublaplacian(&g.dilated(&h, 2.0).unwrap()).unwrap();
        let a = op.sparse_matrix().unwrap();
        let b = op2.sparse_matrix().unwrap();
        for ((r1, c1, v1), (r2, c2, v2)) in a.triplets().zip(b.triplets()) {
            assert_eq!((r1, c1), (r2, c2));
            assert!((v1 - 4.0 * v2).abs() < 1e-12 * v1.abs().max(1.0));
        }
    }

    #[test]
    fn sublaplacian_first_order_consistency() {
        // X = d_x - (y/2) d_t, Y = d_y + (x/2) d_t acting on exp(-(x^2 + y^2 + t^2))
        let exact = |x: &[f64]| {
            let (a, b) = (-2.0 * x[0] + x[1] * x[2], -2.0 * x[1] - x[0] * x[2]);
            let f = (-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2])).exp();
            -(-4.0 - 0.5 * (x[0] * x[0] + x[1] * x[1]) + a * a + b * b) * f
        };
        let mut errors = Vec::new();
        let mut steps = Vec::new();
        for n in [16usize, 32, 64] {
            let grid = Grid::truncated(&[4.0, 4.0, 4.0], &[n, n, n]).unwrap();
            let op = RocklandOp::heisenberg_sublaplacian(&grid).unwrap();
            let f = SampledFunction::from_real_fn(&grid, |x| (-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2])).exp()).unwrap();
            let g = SampledFunction::from_real_fn(&grid, exact).unwrap();
            errors.push(op.apply(&f).unwrap().sub(&g).unwrap().lp_norm(f64::INFINITY).unwrap());
            steps.push(grid.spacing(0));
        }
        for k in 0..2 {
            let order = (errors[k] / errors[k + 1]).log2() / (steps[k] / steps[k + 1]).log2();
            assert!(order > 0.9, "{errors:?}");
        }
        assert!(errors[2] < errors[0]);
    }

    #[test]
    fn shift_adds_identity() {
        let grid = Grid::truncated(&[2.0, 2.0, 2.0], &[8, 8, 8]).unwrap();
        let op = RocklandOp::heisenberg_sublaplacian(&grid).unwrap();
        let shifted = op.inhomogeneous();
        let f = random_function(&grid, 3);
        let d = shifted.apply(&f).unwrap().sub(&op.apply(&f).unwrap()).unwrap();
        assert!(d.sub(&f).unwrap().lp_norm(2.0).unwrap() < 1e-12);
        assert_eq!(shifted.spectral_bound(), op.spectral_bound() + 1.0);
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(16))]
        #[test]
        fn symmetry_both_backends(s1 in 0u64..1000, s2 in 0u64..1000) {
            let hg = Grid::truncated(&[2.0, 2.0, 2.0], &[8, 8, 8]).unwrap();
            let (spec, lg) = line(128, 8.0);
            let ops = [
                RocklandOp::heisenberg_sublaplacian(&hg).unwrap(),
                RocklandOp::abelian_symbol_operator(&spec, &lg, &[1]).unwrap(),
            ];
            for op in &ops {
                let f = random_function(op.grid(), s1);
                let g = random_function(op.grid(), s2 + 5000);
                let a = op.apply(&f).unwrap().inner(&g).unwrap();
                let b = f.inner(&op.apply(&g).unwrap()).unwrap();
                let scale = op.spectral_bound() * f.lp_norm(2.0).unwrap() * g.lp_norm(2.0).unwrap();
                proptest::prop_assert!((a - b).norm() <= 1e-10 * scale);
            }
        }
    }
}
