//! Functional calculus `m(R)` for scalar multipliers, band projectors and
//! Littlewood-Paley blocks.

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::chebyshev::ChebyshevSeries;
use crate::fft;
use crate::grid::SampledFunction;
use crate::partition::{BlockFamily, Smoothness};
use crate::rockland::{EigDecomp, RocklandOp};
use crate::{Error, Result};

/// Tolerance on the Chebyshev tail used by automatic method selection.
pub const AUTO_TOLERANCE: f64 = 1e-8;

type ScalarFn = dyn Fn(f64) -> Complex64 + Send + Sync;

/// A function `m: [0, inf) -> C`.
#[derive(Clone)]
pub struct ScalarMultiplier {
    name: String,
    f: Arc<ScalarFn>,
    sup_bound: Option<f64>,
}

impl fmt::Debug for ScalarMultiplier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarMultiplier")
            .field("name", &self.name)
            .field("sup_bound", &self.sup_bound)
            .finish()
    }
}

impl ScalarMultiplier {
    pub fn new<F>(name: &str, f: F) -> Self
    where
        F: Fn(f64) -> Complex64 + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            f: Arc::new(f),
            sup_bound: None,
        }
    }

    pub fn real<F>(name: &str, f: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self::new(name, move |x| Complex64::new(f(x), 0.0))
    }

    pub fn with_sup_bound(mut self, bound: f64) -> Self {
        self.sup_bound = Some(bound);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn sup_bound(&self) -> Option<f64> {
        self.sup_bound
    }

    pub fn eval(&self, lambda: f64) -> Complex64 {
        (self.f)(lambda)
    }

    pub fn as_fn(&self) -> &ScalarFn {
        &*self.f
    }

    pub fn constant(c: Complex64) -> Self {
        Self::new("constant", move |_| c).with_sup_bound(c.norm())
    }

    pub fn one() -> Self {
        Self::constant(Complex64::new(1.0, 0.0))
    }

    pub fn identity() -> Self {
        Self::real("identity", |x| x)
    }

    /// `e^{-t lambda}`.
    pub fn heat(t: f64) -> Self {
        Self::real("heat", move |x| (-t * x).exp()).with_sup_bound(1.0)
    }

    /// `lambda^{i tau}`, defined as 1 at 0.
    pub fn imaginary_power(tau: f64) -> Self {
        Self::new("imaginary-power", move |x| {
            if x > 0.0 {
                Complex64::new(0.0, tau * x.ln()).exp()
            } else {
                Complex64::new(1.0, 0.0)
            }
        })
        .with_sup_bound(1.0)
    }

    /// `lambda^s` for `lambda > 0`, and `0^s` read as 0 (s > 0) or 1 (s = 0).
    pub fn power(s: f64) -> Self {
        Self::real("power", move |x| {
            if x > 0.0 {
                x.powf(s)
            } else if s == 0.0 {
                1.0
            } else {
                0.0
            }
        })
    }

    /// Sharp spectral cutoff `chi_{[0, L]}`.
    pub fn cutoff(level: f64) -> Self {
        Self::real("cutoff", move |x| if x <= level { 1.0 } else { 0.0 }).with_sup_bound(1.0)
    }

    /// Smoothed cutoff: one on `[0, L]`, zero beyond `(1 + width) L`.
    pub fn smooth_cutoff(level: f64, width: f64) -> Self {
        Self::real("smooth-cutoff", move |x| {
            1.0 - Smoothness::CInfinity.step((x - level) / (width * level))
        })
        .with_sup_bound(1.0)
    }

    /// Block `psi_l` of a partition as a multiplier.
    pub fn block<B>(partition: &B, l: usize) -> Self
    where
        B: BlockFamily + Clone + Send + Sync + 'static,
    {
        let p = partition.clone();
        Self::real("block", move |x| p.psi(l, x)).with_sup_bound(1.0)
    }

    pub fn product(&self, other: &Self) -> Self {
        let (a, b) = (self.f.clone(), other.f.clone());
        let bound = match (self.sup_bound, other.sup_bound) {
            (Some(x), Some(y)) => Some(x * y),
            _ => None,
        };
        Self {
            name: alloc::format!("{}*{}", self.name, other.name),
            f: Arc::new(move |x| a(x) * b(x)),
            sup_bound: bound,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method {
    ExactSymbol,
    /// Fixed degree.
    Chebyshev(usize),
    /// Degree doubled until the tail estimate is below the tolerance.
    ChebyshevAuto(f64),
    DenseEig,
    /// ExactSymbol, else Chebyshev reaching [`AUTO_TOLERANCE`], else DenseEig
    /// when eligible, else the best Chebyshev fit.
    Auto,
    /// Like `Auto` but prefers DenseEig over Chebyshev on dense-eligible grids.
    PreferDense,
}

/// Result of a multiplier application with the method that produced it.
#[derive(Debug, Clone)]
pub struct Applied {
    pub function: SampledFunction,
    pub method: Method,
    /// Uniform approximation error estimate for Chebyshev; zero otherwise.
    pub error_estimate: f64,
}

pub fn apply_multiplier(
    op: &RocklandOp,
    m: &ScalarMultiplier,
    f: &SampledFunction,
    method: Method,
) -> Result<SampledFunction> {
    apply_multiplier_report(op, m, f, method).map(|a| a.function)
}

pub fn apply_multiplier_report(
    op: &RocklandOp,
    m: &ScalarMultiplier,
    f: &SampledFunction,
    method: Method,
) -> Result<Applied> {
    dispatch(op, m.as_fn(), f, method)
}

fn dispatch(
    op: &RocklandOp,
    m: &dyn Fn(f64) -> Complex64,
    f: &SampledFunction,
    method: Method,
) -> Result<Applied> {
    if f.grid() != op.grid() {
        return Err(Error::GridMismatch);
    }
    let chebyshev = |s: ChebyshevSeries| -> Result<Applied> {
        let values = s.apply(f.values(), |v| op.apply_values(v));
        Ok(Applied {
            function: f.with_values(values)?,
            method: Method::Chebyshev(s.degree()),
            error_estimate: s.error_estimate(),
        })
    };
    let (lo, hi) = (op.spectral_floor(), op.spectral_bound());
    let values = match method {
        Method::ExactSymbol => exact_symbol(op, m, f)?,
        Method::DenseEig => op.dense_eig()?.apply(op.shift(), f.values(), m),
        Method::Chebyshev(d) => {
            if d < 1 {
                return Err(Error::InvalidDegree);
            }
            return chebyshev(ChebyshevSeries::fit(m, lo, hi, d));
        }
        Method::ChebyshevAuto(tol) => return chebyshev(ChebyshevSeries::fit_auto(m, lo, hi, tol)),
        Method::Auto | Method::PreferDense => {
            if op.is_symbol() {
                return dispatch(op, m, f, Method::ExactSymbol);
            }
            if method == Method::PreferDense && op.dense_eligible() {
                return dispatch(op, m, f, Method::DenseEig);
            }
            let s = ChebyshevSeries::fit_auto(m, lo, hi, AUTO_TOLERANCE);
            if s.error_estimate() > AUTO_TOLERANCE && op.dense_eligible() {
                return dispatch(op, m, f, Method::DenseEig);
            }
            return chebyshev(s);
        }
    };
    Ok(Applied {
        function: f.with_values(values)?,
        method,
        error_estimate: 0.0,
    })
}

/// Exact spectral projector `chi_{[0, L]}(R) f`. Sparse operators need the
/// dense path.
pub fn band_project(op: &RocklandOp, level: f64, f: &SampledFunction) -> Result<SampledFunction> {
    if !(level > 0.0) {
        return Err(Error::InvalidParameter(alloc::format!("band level must be positive, got {level}")));
    }
    let m = ScalarMultiplier::cutoff(level);
    if op.is_symbol() {
        return apply_multiplier(op, &m, f, Method::ExactSymbol);
    }
    if !op.dense_eligible() {
        return Err(Error::Unsupported(
            "sharp projector on a sparse operator beyond the dense limit; use a smoothed cutoff",
        ));
    }
    apply_multiplier(op, &m, f, Method::DenseEig)
}

/// `psi_l(R) f`. Blocks starting above the spectral bound vanish identically.
pub fn block<B: BlockFamily + ?Sized>(
    op: &RocklandOp,
    partition: &B,
    l: usize,
    f: &SampledFunction,
) -> Result<SampledFunction> {
    block_with(op, partition, l, f, Method::Auto)
}

pub fn block_with<B: BlockFamily + ?Sized>(
    op: &RocklandOp,
    partition: &B,
    l: usize,
    f: &SampledFunction,
    method: Method,
) -> Result<SampledFunction> {
    if l > partition.max_level() {
        return Err(Error::InvalidParameter(alloc::format!(
            "block index {l} exceeds the partition's {}",
            partition.max_level()
        )));
    }
    let (lo, _) = partition.support(l);
    if l > 0 && lo >= op.spectral_bound() {
        return Ok(SampledFunction::zeros(f.grid()));
    }
    let samples_fn = |x: f64| Complex64::new(partition.psi(l, x), 0.0);
    dispatch(op, &samples_fn, f, method).map(|a| a.function)
}

/// Every block `psi_0 f .. psi_{L} f` in one pass. On the dense and symbol
/// paths the spectral coefficients are computed once.
pub fn all_blocks<B: BlockFamily + ?Sized>(
    op: &RocklandOp,
    partition: &B,
    f: &SampledFunction,
    method: Method,
) -> Result<Vec<SampledFunction>> {
    if f.grid() != op.grid() {
        return Err(Error::GridMismatch);
    }
    let levels = 0..=partition.max_level();
    let dense = match method {
        Method::DenseEig => true,
        Method::PreferDense => !op.is_symbol() && op.dense_eligible(),
        _ => false,
    };
    if op.is_symbol() && matches!(method, Method::Auto | Method::PreferDense | Method::ExactSymbol) {
        let samples = op.symbol_samples().ok_or(Error::MethodMismatch("ExactSymbol"))?;
        let mut spectrum = f.values().to_vec();
        fft::fft_nd(&mut spectrum, op.grid().counts(), false);
        return levels
            .map(|l| {
                let mut data: Vec<Complex64> = spectrum
                    .iter()
                    .zip(&samples)
                    .map(|(v, a)| v * partition.psi(l, *a))
                    .collect();
                fft::fft_nd(&mut data, op.grid().counts(), true);
                f.with_values(data)
            })
            .collect();
    }
    if dense {
        let e = op.dense_eig()?;
        let c = e.coefficients(f.values());
        return levels
            .map(|l| {
                let w: Vec<Complex64> = c
                    .iter()
                    .zip(e.eigenvalues())
                    .map(|(ck, lam)| ck * partition.psi(l, op.shift() + lam))
                    .collect();
                f.with_values(e.synthesize(&w))
            })
            .collect();
    }
    levels.map(|l| block_with(op, partition, l, f, method)).collect()
}

/// Spectral coefficients of one function under a symbol or dense-eligible
/// operator, for evaluating many exact multipliers.
pub enum SpectralView<'a> {
    Symbol {
        op: &'a RocklandOp,
        /// Unnormalized DFT of the samples.
        spectrum: Vec<Complex64>,
        /// Spectrum of `shift + R` at each frequency.
        samples: Vec<f64>,
    },
    Dense {
        op: &'a RocklandOp,
        eig: &'a EigDecomp,
        coeffs: Vec<Complex64>,
    },
}

impl<'a> SpectralView<'a> {
    pub fn new(op: &'a RocklandOp, f: &SampledFunction) -> Result<Self> {
        if f.grid() != op.grid() {
            return Err(Error::GridMismatch);
        }
        if let Some(samples) = op.symbol_samples() {
            let mut spectrum = f.values().to_vec();
            fft::fft_nd(&mut spectrum, op.grid().counts(), false);
            return Ok(Self::Symbol { op, spectrum, samples });
        }
        if !op.dense_eligible() {
            return Err(Error::Unsupported("exact spectral view needs a symbol or a dense-eligible grid"));
        }
        let eig = op.dense_eig()?;
        let coeffs = eig.coefficients(f.values());
        Ok(Self::Dense { op, eig, coeffs })
    }

    pub fn op(&self) -> &'a RocklandOp {
        match self {
            Self::Symbol { op, .. } | Self::Dense { op, .. } => op,
        }
    }

    /// `(lambda, |c|^2)` per spectral mode, `lambda` including the shift.
    /// The weights are proportional to the `L^2` mass.
    pub fn modes(&self) -> Vec<(f64, f64)> {
        match self {
            Self::Symbol { spectrum, samples, .. } => {
                samples.iter().zip(spectrum).map(|(a, c)| (*a, c.norm_sqr())).collect()
            }
            Self::Dense { op, eig, coeffs } => eig
                .eigenvalues()
                .iter()
                .zip(coeffs)
                .map(|(lam, c)| (op.shift() + lam, c.norm_sqr()))
                .collect(),
        }
    }

    /// Share of `||f||_2^2` on the spectrum `[0, level]`.
    pub fn mass_fraction_below(&self, level: f64) -> f64 {
        let modes = self.modes();
        let total: f64 = modes.iter().map(|m| m.1).sum();
        if total == 0.0 {
            return 0.0;
        }
        modes.iter().filter(|m| m.0 <= level).map(|m| m.1).sum::<f64>() / total
    }

    /// Node values of `m(R) f`.
    pub fn synthesize(&self, m: &dyn Fn(f64) -> Complex64) -> Vec<Complex64> {
        match self {
            Self::Symbol { op, spectrum, samples } => {
                let mut data: Vec<Complex64> = spectrum.iter().zip(samples).map(|(v, a)| v * m(*a)).collect();
                fft::fft_nd(&mut data, op.grid().counts(), true);
                data
            }
            Self::Dense { op, eig, coeffs } => {
                let w: Vec<Complex64> = coeffs
                    .iter()
                    .zip(eig.eigenvalues())
                    .map(|(c, lam)| c * m(op.shift() + lam))
                    .collect();
                eig.synthesize(&w)
            }
        }
    }
}

fn exact_symbol(
    op: &RocklandOp,
    m: &dyn Fn(f64) -> Complex64,
    f: &SampledFunction,
) -> Result<Vec<Complex64>> {
    let samples = op.symbol_samples().ok_or(Error::MethodMismatch("ExactSymbol"))?;
    let mut data = f.values().to_vec();
    fft::fft_nd(&mut data, op.grid().counts(), false);
    for (v, a) in data.iter_mut().zip(&samples) {
        *v *= m(*a);
    }
    fft::fft_nd(&mut data, op.grid().counts(), true);
    Ok(data)
}
