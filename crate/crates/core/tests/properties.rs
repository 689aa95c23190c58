use graded_harmonic::besov::{besov_report, BesovParams};
use graded_harmonic::calculus::{apply_multiplier, band_project, block, Method, ScalarMultiplier};
use graded_harmonic::family::random_wavepackets;
use graded_harmonic::multipliers::{besov_transfer_experiment, marcinkiewicz_check_with, spectral_levels, BV_THRESHOLD};
use graded_harmonic::{Complex64, DyadicPartition, Grid, GroupSpec, RocklandOp, SampledFunction, Smoothness};
use proptest::prelude::*;

fn spec_for(k: usize) -> GroupSpec {
    match k {
        0 => GroupSpec::abelian(&[1]).unwrap(),
        1 => GroupSpec::abelian(&[1, 2]).unwrap(),
        2 => GroupSpec::abelian(&[1, 1, 3]).unwrap(),
        _ => GroupSpec::heisenberg(),
    }
}

/// Small operators on each model group: symbol backends on periodic grids
/// and the sparse sub-Laplacian on a truncated box.
fn operator(k: usize) -> RocklandOp {
    match k {
        0 => {
            let spec = spec_for(0);
            RocklandOp::abelian_symbol_operator(&spec, &Grid::periodic(&[8.0], &[64]).unwrap(), &[1]).unwrap()
        }
        1 => {
            let spec = spec_for(1);
            RocklandOp::abelian_symbol_operator(&spec, &Grid::periodic(&[6.0, 12.0], &[16, 32]).unwrap(), &[2, 1])
                .unwrap()
        }
        _ => RocklandOp::heisenberg_sublaplacian(&Grid::truncated(&[3.0, 3.0, 4.0], &[6, 6, 8]).unwrap()).unwrap(),
    }
}

fn sample(op: &RocklandOp, seed: u64) -> SampledFunction {
    let scale = 0.25 * op.grid().half_extent()[0];
    random_wavepackets(op.spec(), scale, seed).sample(op.grid()).unwrap()
}

fn rel(a: Complex64, b: Complex64, scale: f64) -> f64 {
    (a - b).norm() / scale
}

fn dyadic(n: i32) -> f64 {
    f64::from(n) / 4.0
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn quasi_norm_is_homogeneous(k in 0usize..4, x in prop::collection::vec(-50.0f64..50.0, 3), r in prop::sample::select(vec![0.5, 2.0, 8.0])) {
        let spec = spec_for(k);
        let x = &x[..spec.dimension()];
        let lhs = spec.quasi_norm(&spec.dilate_point(r, x).unwrap()).unwrap();
        let rhs = r * spec.quasi_norm(x).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.max(1e-300), "{lhs} vs {rhs}");
        prop_assert_eq!(spec.q(), spec.weights().iter().map(|w| *w.numer() as f64 / *w.denom() as f64).sum::<f64>());
    }

    #[test]
    fn heisenberg_group_axioms_hold_exactly(a in prop::collection::vec(-400i32..400, 9)) {
        let h = GroupSpec::heisenberg();
        let v: Vec<f64> = a.iter().copied().map(dyadic).collect();
        let (x, y, z) = (&v[0..3], &v[3..6], &v[6..9]);
        let left = h.multiply(&h.multiply(x, y).unwrap(), z).unwrap();
        let right = h.multiply(x, &h.multiply(y, z).unwrap()).unwrap();
        prop_assert_eq!(left, right);
        prop_assert_eq!(h.multiply(x, &h.identity()).unwrap(), x.to_vec());
        prop_assert_eq!(h.multiply(&h.identity(), x).unwrap(), x.to_vec());
        prop_assert_eq!(h.multiply(x, &h.inverse(x).unwrap()).unwrap(), h.identity());
    }

    #[test]
    fn operators_are_symmetric_and_positive(k in 0usize..3, s1 in any::<u64>(), s2 in any::<u64>()) {
        let op = operator(k);
        let (f, g) = (sample(&op, s1), sample(&op, s2));
        let scale = op.spectral_bound() * f.lp_norm(2.0).unwrap() * g.lp_norm(2.0).unwrap();
        let a = op.apply(&f).unwrap().inner(&g).unwrap();
        let b = f.inner(&op.apply(&g).unwrap()).unwrap();
        prop_assert!(rel(a, b, scale) <= 1e-10);
        let q = f.inner(&op.apply(&f).unwrap()).unwrap();
        prop_assert!(q.re >= -1e-10 * op.spectral_bound() * f.lp_norm(2.0).unwrap().powi(2));
        prop_assert!(op.apply(&f).unwrap().values().iter().all(|v| v.re.is_finite() && v.im.is_finite()));
    }

    #[test]
    fn calculus_is_multiplicative(k in 0usize..3, seed in any::<u64>(), t1 in 0.01f64..1.0, t2 in 0.01f64..1.0) {
        let op = operator(k);
        let f = sample(&op, seed);
        let norm = f.lp_norm(2.0).unwrap();
        let once = apply_multiplier(&op, &ScalarMultiplier::heat(t1 + t2), &f, Method::PreferDense).unwrap();
        for method in [Method::PreferDense, Method::ChebyshevAuto(1e-12)] {
            let inner = apply_multiplier(&op, &ScalarMultiplier::heat(t2), &f, method).unwrap();
            let twice = apply_multiplier(&op, &ScalarMultiplier::heat(t1), &inner, method).unwrap();
            prop_assert!(twice.sub(&once).unwrap().lp_norm(2.0).unwrap() <= 1e-9 * norm);
        }
    }

    #[test]
    fn real_multipliers_are_self_adjoint(k in 0usize..3, s1 in any::<u64>(), s2 in any::<u64>(), c in 0.1f64..4.0) {
        let op = operator(k);
        let (f, g) = (sample(&op, s1), sample(&op, s2));
        let m = ScalarMultiplier::real("bump", move |x| 1.0 / (1.0 + c * x));
        let mf = apply_multiplier(&op, &m, &f, Method::PreferDense).unwrap();
        let mg = apply_multiplier(&op, &m, &g, Method::PreferDense).unwrap();
        let scale = f.lp_norm(2.0).unwrap() * g.lp_norm(2.0).unwrap();
        prop_assert!(rel(mf.inner(&g).unwrap(), f.inner(&mg).unwrap(), scale) <= 1e-9);
    }

    #[test]
    fn multipliers_commute_with_blocks(k in 0usize..3, seed in any::<u64>(), tau in -3.0f64..3.0) {
        let op = operator(k);
        let f = sample(&op, seed);
        let m = ScalarMultiplier::imaginary_power(tau);
        let part = DyadicPartition::covering(op.spectral_bound(), Smoothness::CInfinity);
        let mf = apply_multiplier(&op, &m, &f, Method::PreferDense).unwrap();
        for l in 0..=3 {
            let a = block(&op, &part, l, &mf).unwrap();
            let b = apply_multiplier(&op, &m, &block(&op, &part, l, &f).unwrap(), Method::PreferDense).unwrap();
            prop_assert!(a.sub(&b).unwrap().lp_norm(2.0).unwrap() <= 1e-9 * f.lp_norm(2.0).unwrap());
        }
    }

    #[test]
    fn besov_norms_follow_the_q_chain(k in 0usize..3, seed in any::<u64>(), r in -1.0f64..2.0, p in 1.0f64..6.0, eps in 0.0f64..1.0) {
        let op = operator(k);
        let f = sample(&op, seed);
        let part = DyadicPartition::covering(op.spectral_bound(), Smoothness::Cubic);
        let norm = |r: f64, q: f64| {
            let rep = besov_report(&op, &part, &f, BesovParams::new(r, p, q, true).unwrap()).unwrap();
            assert!((rep.recompute() - rep.aggregate).abs() <= 1e-12 * rep.aggregate);
            rep.aggregate
        };
        let slack = 1.0 + 1e-12;
        let n1 = norm(r, 1.0);
        prop_assert!(norm(r + eps, 1.0) * slack >= n1);
        prop_assert!(norm(r, 2.0) <= n1 * slack);
        prop_assert!(norm(r, f64::INFINITY) <= norm(r, 2.0) * slack);
    }

    #[test]
    fn band_projections_are_monotone(k in 0usize..3, seed in any::<u64>(), p in 1.0f64..8.0) {
        let op = operator(k);
        let f = sample(&op, seed);
        let mut last = 0.0;
        for j in -2..8 {
            let n = band_project(&op, 2f64.powi(j), &f).unwrap().lp_norm(2.0).unwrap();
            prop_assert!(n >= last * (1.0 - 1e-12));
            last = n;
        }
        prop_assert!(band_project(&op, 2.0 * op.spectral_bound(), &f).unwrap().lp_norm(p).unwrap().is_finite());
    }

    #[test]
    fn blocks_of_multiplied_functions_are_dominated(k in 0usize..3, seed in any::<u64>(), t in 0.01f64..2.0, p in prop::sample::select(vec![1.5, 2.0, 4.0]), r in -1.0f64..2.0) {
        let op = operator(k);
        let fam = vec![sample(&op, seed), sample(&op, seed.wrapping_add(1))];
        let part = DyadicPartition::covering(op.spectral_bound(), Smoothness::CInfinity);
        let m = ScalarMultiplier::heat(t);
        let rep = besov_transfer_experiment(&op, &part, &m, BesovParams::new(r, p, 2.0, true).unwrap(), &fam).unwrap();
        prop_assert!(rep.passes(), "{rep:?}");
    }

    #[test]
    fn admissibility_survives_doubled_sampling(tau in -4.0f64..4.0, t in 0.0f64..4.0, k in 0usize..3) {
        let js = spectral_levels(&operator(k));
        let ms = [
            ScalarMultiplier::imaginary_power(tau),
            ScalarMultiplier::heat(t),
            ScalarMultiplier::real("sin", f64::sin),
        ];
        for m in &ms {
            let a = marcinkiewicz_check_with(m, js.clone(), 64, BV_THRESHOLD).unwrap();
            let b = marcinkiewicz_check_with(m, js.clone(), 128, BV_THRESHOLD).unwrap();
            prop_assert_eq!(a.admissible, b.admissible, "{}", m.name());
        }
    }
}
