//! The two model graded groups: anisotropic `R^n` and the Heisenberg group.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_rational::Rational64;
#[allow(unused_imports)]
use num_traits::Float;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GroupKind {
    /// `R^n` with dilations `D_r x = (r^{w_1} x_1, ..., r^{w_n} x_n)`.
    AbelianGraded,
    /// Heisenberg group in coordinates `(x, y, t)` with weights `(1, 1, 2)`.
    Heisenberg1,
}

/// A graded group together with its dilation weights.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroupSpec {
    kind: GroupKind,
    weights: Vec<Rational64>,
}

impl GroupSpec {
    /// Builds a group spec. For `Heisenberg1` the weights argument is ignored.
    pub fn new(kind: GroupKind, weights: &[Rational64]) -> Result<Self> {
        let weights = match kind {
            GroupKind::Heisenberg1 => vec![
                Rational64::one(),
                Rational64::one(),
                Rational64::from_integer(2),
            ],
            GroupKind::AbelianGraded => {
                if weights.is_empty() {
                    return Err(Error::EmptyWeights);
                }
                if let Some(w) = weights.iter().find(|w| !w.is_positive()) {
                    return Err(Error::NonPositiveWeight(format!("{w}")));
                }
                let min = weights.iter().min().copied().unwrap_or_else(Rational64::zero);
                if min != Rational64::one() {
                    return Err(Error::WeightsNotNormalized);
                }
                weights.to_vec()
            }
        };
        Ok(Self { kind, weights })
    }

    /// Abelian group with integer weights; convenience for the common case.
    pub fn abelian(weights: &[i64]) -> Result<Self> {
        let w: Vec<Rational64> = weights.iter().map(|&w| Rational64::from_integer(w)).collect();
        Self::new(GroupKind::AbelianGraded, &w)
    }

    pub fn heisenberg() -> Self {
        Self::new(GroupKind::Heisenberg1, &[]).expect("fixed weights are valid")
    }

    pub fn kind(&self) -> GroupKind {
        self.kind
    }

    pub fn dimension(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[Rational64] {
        &self.weights
    }

    pub fn weight(&self, axis: usize) -> f64 {
        self.weights[axis].to_f64().unwrap_or(f64::NAN)
    }

    /// Homogeneous dimension `Q`, the sum of the weights.
    pub fn homogeneous_dimension(&self) -> Rational64 {
        self.weights.iter().fold(Rational64::zero(), |acc, w| acc + w)
    }

    pub fn q(&self) -> f64 {
        self.homogeneous_dimension().to_f64().unwrap_or(f64::NAN)
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dimension() {
            return Err(Error::DimensionMismatch {
                expected: self.dimension(),
                found: x.len(),
            });
        }
        Ok(())
    }

    /// `D_r x`: coordinate `i` is scaled by `r^{w_i}`.
    pub fn dilate_point(&self, r: f64, x: &[f64]) -> Result<Vec<f64>> {
        if !(r > 0.0) {
            return Err(Error::NonPositiveDilation(r));
        }
        self.check_dim(x)?;
        Ok(x
            .iter()
            .enumerate()
            .map(|(i, &xi)| xi * r.powf(self.weight(i)))
            .collect())
    }

    /// Group product `a * b`.
    pub fn multiply(&self, a: &[f64], b: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(a)?;
        self.check_dim(b)?;
        let mut out: Vec<f64> = a.iter().zip(b).map(|(x, y)| x + y).collect();
        if self.kind == GroupKind::Heisenberg1 {
            out[2] += 0.5 * (a[0] * b[1] - a[1] * b[0]);
        }
        Ok(out)
    }

    /// Group inverse. In exponential coordinates on both models this is `-x`.
    pub fn inverse(&self, a: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(a)?;
        Ok(a.iter().map(|x| -x).collect())
    }

    pub fn identity(&self) -> Vec<f64> {
        vec![0.0; self.dimension()]
    }

    /// Even exponents `2M / w_i` of the homogeneous quasi-norm, with `M` the
    /// lcm of the weight numerators; also returns `2M`.
    pub fn quasi_norm_exponents(&self) -> (Vec<i32>, i32) {
        let m = self.weights.iter().fold(1i64, |acc, w| lcm(acc, *w.numer()));
        let two_m = Rational64::from_integer(2 * m);
        let exps = self
            .weights
            .iter()
            .map(|w| (two_m / w).to_integer() as i32)
            .collect();
        (exps, (2 * m) as i32)
    }

    /// `|x| = (sum_i |x_i|^{2M/w_i})^{1/(2M)}`, homogeneous of degree one.
    pub fn quasi_norm(&self, x: &[f64]) -> Result<f64> {
        self.check_dim(x)?;
        let (exps, two_m) = self.quasi_norm_exponents();
        let s: f64 = x.iter().zip(&exps).map(|(xi, &e)| xi.abs().powi(e)).sum();
        Ok(s.powf(1.0 / f64::from(two_m)))
    }
}

fn lcm(a: i64, b: i64) -> i64 {
    let (mut x, mut y) = (a, b);
    while y != 0 {
        (x, y) = (y, x % y);
    }
    a / x.abs() * b
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn homogeneous_dimensions() {
        assert_eq!(GroupSpec::heisenberg().homogeneous_dimension(), Rational64::from_integer(4));
        assert_eq!(GroupSpec::abelian(&[1]).unwrap().q(), 1.0);
        assert_eq!(GroupSpec::abelian(&[1, 2]).unwrap().q(), 3.0);
        let half = GroupSpec::new(
            GroupKind::AbelianGraded,
            &[Rational64::one(), Rational64::new(3, 2)],
        )
        .unwrap();
        assert_eq!(half.homogeneous_dimension(), Rational64::new(5, 2));
    }

    #[test]
    fn heisenberg_ignores_weights() {
        let g = GroupSpec::new(GroupKind::Heisenberg1, &[Rational64::from_integer(7)]).unwrap();
        assert_eq!(g.dimension(), 3);
        assert_eq!(g.q(), 4.0);
    }

    #[test]
    fn rejects_bad_weights() {
        assert_eq!(GroupSpec::abelian(&[]), Err(Error::EmptyWeights));
        assert!(matches!(GroupSpec::abelian(&[1, 0]), Err(Error::NonPositiveWeight(_))));
        assert!(matches!(GroupSpec::abelian(&[-1]), Err(Error::NonPositiveWeight(_))));
        assert_eq!(GroupSpec::abelian(&[2, 3]), Err(Error::WeightsNotNormalized));
    }

    #[test]
    fn dilations() {
        let h = GroupSpec::heisenberg();
        assert_eq!(h.dilate_point(2.0, &[1.0, 1.0, 1.0]).unwrap(), vec![2.0, 2.0, 4.0]);
        assert_eq!(h.dilate_point(1.0, &[0.3, -2.0, 5.0]).unwrap(), vec![0.3, -2.0, 5.0]);
        let a = GroupSpec::abelian(&[1, 2]).unwrap();
        assert_eq!(a.dilate_point(3.0, &[1.0, 1.0]).unwrap(), vec![3.0, 9.0]);
        assert_eq!(a.dilate_point(0.0, &[1.0, 1.0]), Err(Error::NonPositiveDilation(0.0)));
        assert!(a.dilate_point(-1.0, &[1.0, 1.0]).is_err());
    }

    #[test]
    fn group_law() {
        let h = GroupSpec::heisenberg();
        assert_eq!(h.multiply(&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]).unwrap(), vec![1.0, 1.0, 0.5]);
        let b = [0.25, -3.0, 7.5];
        assert_eq!(h.multiply(&h.identity(), &b).unwrap(), b.to_vec());
        let a = GroupSpec::abelian(&[1, 2]).unwrap();
        assert_eq!(a.multiply(&[1.0, 2.0], &[3.0, 4.0]).unwrap(), vec![4.0, 6.0]);
        assert_eq!(
            h.multiply(&[1.0, 2.0], &[1.0, 2.0, 3.0]),
            Err(Error::DimensionMismatch { expected: 3, found: 2 })
        );
    }

    #[test]
    fn quasi_norm_values() {
        let a = GroupSpec::abelian(&[1]).unwrap();
        assert_eq!(a.quasi_norm(&[-3.0]).unwrap(), 3.0);
        let h = GroupSpec::heisenberg();
        assert_eq!(h.quasi_norm(&[0.0, 0.0, 0.0]).unwrap(), 0.0);
        assert_eq!(h.quasi_norm_exponents(), (vec![4, 4, 2], 4));
        let x = [0.7, -1.1, 0.4];
        let ratio = h.quasi_norm(&h.dilate_point(2.0, &x).unwrap()).unwrap() / h.quasi_norm(&x).unwrap();
        assert!((ratio - 2.0).abs() < 1e-14);
    }

    #[test]
    fn heisenberg_associativity_on_dyadic_rationals() {
        let h = GroupSpec::heisenberg();
        let pts = [[0.5, -1.25, 2.0], [3.0, 0.75, -1.5], [-2.25, 4.0, 0.125]];
        for a in &pts {
            for b in &pts {
                for c in &pts {
                    let ab_c = h.multiply(&h.multiply(a, b).unwrap(), c).unwrap();
                    let a_bc = h.multiply(a, &h.multiply(b, c).unwrap()).unwrap();
                    assert_eq!(ab_c, a_bc);
                }
            }
            let inv = h.inverse(a).unwrap();
            assert_eq!(h.multiply(a, &inv).unwrap(), h.identity());
        }
    }

    proptest::proptest! {
        #[test]
        fn quasi_norm_is_homogeneous(
            x in proptest::collection::vec(-10.0f64..10.0, 3),
            k in 0usize..3,
        ) {
            let r = [0.5, 2.0, 8.0][k];
            let h = GroupSpec::heisenberg();
            let n = h.quasi_norm(&x).unwrap();
            let nd = h.quasi_norm(&h.dilate_point(r, &x).unwrap()).unwrap();
            proptest::prop_assert!((nd - r * n).abs() <= 1e-12 * (1.0 + r * n));
            let a = GroupSpec::abelian(&[1, 2]).unwrap();
            let n = a.quasi_norm(&x[..2]).unwrap();
            let nd = a.quasi_norm(&a.dilate_point(r, &x[..2]).unwrap()).unwrap();
            proptest::prop_assert!((nd - r * n).abs() <= 1e-12 * (1.0 + r * n));
        }
    }
}
