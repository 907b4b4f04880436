//! Property tests for the invariants of each module.

use num_traits::Zero;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use enlargement::classifier::{classify, FunctionalValue, LadderConfig, Verdict};
use enlargement::enlarged::{
    compensate_brownian, drift_compensator, integrate_under_enlargement, realize_x_ensemble, EnlargementSpec,
};
use enlargement::finite::{
    conditional_expectation, parse_rational, random_instance, rat, rat_str, Partition, RandomInstanceSpec, Rational,
};
use enlargement::integrand::DeterministicIntegrand;
use enlargement::paths::{simulate_brownian, simulate_brownian_range, simulate_compound_poisson_range, JumpLaw};
use enlargement::rng::SeedSpec;
use enlargement::timegrid::{build_grid, Refinement, TimeGrid};

fn refined(steps: usize, ratio: f64) -> TimeGrid {
    build_grid(
        1.0,
        steps,
        Some(Refinement {
            singular_point: 1.0,
            ratio,
            depth: None,
        }),
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn grids_are_increasing_and_span_the_horizon(
        horizon in 0.1f64..10.0,
        steps in 2usize..300,
        ratio in 0.2f64..0.8,
        extra in prop::collection::vec(0.0f64..1.0, 0..6),
    ) {
        let g = build_grid(horizon, steps, Some(Refinement { singular_point: horizon, ratio, depth: None })).unwrap();
        let n = g.nodes();
        prop_assert_eq!(n[0], 0.0);
        // the singular point itself is never a node
        prop_assert!(g.last() < horizon && g.last() >= horizon * (1.0 - 1.0 / steps as f64));
        prop_assert!(n.windows(2).all(|w| w[1] > w[0]));
        let times: Vec<f64> = extra.iter().map(|u| u * horizon).collect();
        let h = g.with_nodes(&times).unwrap();
        for &t in &times {
            let k = h.index_of(t).unwrap();
            prop_assert!((h.nodes()[k] - t).abs() <= 1e-12 * horizon);
        }
        for &t in n {
            prop_assert!(h.index_of(t).is_ok());
        }
    }

    #[test]
    fn coarsening_keeps_every_stride_th_node(steps in 1usize..64, stride in 1usize..5) {
        let g = TimeGrid::uniform(1.0, steps * stride);
        let (c, idx) = g.coarsened(stride).unwrap();
        prop_assert_eq!(c.len(), steps + 1);
        for (j, &i) in idx.iter().enumerate() {
            prop_assert_eq!(c.nodes()[j], g.nodes()[i]);
        }
    }

    #[test]
    fn log_distance_nodes_approach_the_horizon(du in 0.005f64..0.5, min_exp in 3i32..9) {
        let min_d = 10f64.powi(-min_exp);
        let g = TimeGrid::log_distance(1.0, du, min_d).unwrap();
        let n = g.nodes();
        prop_assert_eq!(n[0], 0.0);
        prop_assert!(n.windows(2).all(|w| w[1] > w[0]));
        let gap = 1.0 - g.last();
        prop_assert!(gap >= min_d * (1.0 - 1e-9) && gap < min_d * du.exp() * (1.0 + 1e-9));
    }

    #[test]
    fn simulation_does_not_depend_on_chunking(seed in any::<u64>(), n in 2u64..40, cut in 1u64..39) {
        let cut = cut.min(n - 1);
        let grid = refined(32, 0.5);
        let s = SeedSpec::new(seed);
        let whole = simulate_brownian(&grid, n as usize, s).unwrap();
        let a = simulate_brownian_range(&grid, 0..cut, s).unwrap();
        let b = simulate_brownian_range(&grid, cut..n, s).unwrap();
        let parts: Vec<&[f64]> = a.paths().chain(b.paths()).collect();
        prop_assert!(whole.paths().zip(parts).all(|(x, y)| x == y));
        let jl = JumpLaw::Symmetric(1.0);
        let whole = simulate_compound_poisson_range(&grid, 2.0, jl, 0..n, s).unwrap();
        let tail = simulate_compound_poisson_range(&grid, 2.0, jl, cut..n, s).unwrap();
        prop_assert_eq!(whole.path(cut as usize), tail.path(0));
    }

    #[test]
    fn drift_is_affine_in_x_with_path_free_slope(seed in any::<u64>(), x in -3.0f64..3.0, p in 0.0f64..2.0) {
        let phi = DeterministicIntegrand::power(p, 1.0);
        let spec = EnlargementSpec::new(phi, &refined(64, 0.5), None).unwrap();
        let ens = simulate_brownian(&spec.grid, 2, SeedSpec::new(seed)).unwrap();
        let d = |k: usize, x: f64| {
            let a = drift_compensator(&spec, ens.path(k), x).unwrap();
            let z = drift_compensator(&spec, ens.path(k), 0.0).unwrap();
            a.iter().zip(z).map(|(a, z)| a - z).collect::<Vec<f64>>()
        };
        let (d1, d2, d0) = (d(0, x), d(0, 2.0 * x), d(1, x));
        for i in 0..d1.len() {
            let tol = 1e-9 * (1.0 + d1[i].abs());
            prop_assert!((d2[i] - 2.0 * d1[i]).abs() <= 2.0 * tol);
            prop_assert!((d0[i] - d1[i]).abs() <= tol);
        }
    }

    #[test]
    fn h_integration_is_additive_and_linear(seed in any::<u64>(), c in -3.0f64..3.0, slope in -2.0f64..2.0) {
        let spec = EnlargementSpec::new(DeterministicIntegrand::indicator(1.0), &refined(64, 0.5), None).unwrap();
        let ens = simulate_brownian(&spec.simulation_grid().unwrap(), 8, SeedSpec::new(seed)).unwrap();
        let x = realize_x_ensemble(&spec, &ens).unwrap();
        let dec = compensate_brownian(&spec, &ens, &x).unwrap();
        let h: DeterministicIntegrand = format!("tab:t=0/1,v=1/{},tail=open", 1.0 + slope).parse().unwrap();
        let ch = DeterministicIntegrand::product(DeterministicIntegrand::constant(c, 2.0), h.clone());
        let a = integrate_under_enlargement(&h, &dec).unwrap();
        let b = integrate_under_enlargement(&ch, &dec).unwrap();
        prop_assert!(a.additivity_defect() <= 1e-12);
        prop_assert!(b.additivity_defect() <= 1e-12);
        for (pa, pb) in a.martingale_part.paths().zip(b.martingale_part.paths()) {
            for (u, v) in pa.iter().zip(pb) {
                prop_assert!((c * u - v).abs() <= 1e-12 * (1.0 + v.abs()));
            }
        }
        for (pa, pb) in a.fv_part.paths().zip(b.fv_part.paths()) {
            for (u, v) in pa.iter().zip(pb) {
                prop_assert!((c * u - v).abs() <= 1e-9 * (1.0 + v.abs()));
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn classifier_scales_with_the_integrand(alpha in 1.05f64..2.0, c in 0.1f64..10.0) {
        let cfg = LadderConfig::default();
        let m = DeterministicIntegrand::jeulin_yor(alpha, 1.0);
        let cm = DeterministicIntegrand::product(DeterministicIntegrand::constant(c, 1.0), m.clone());
        let a = classify(&m, 1.0, &cfg).unwrap();
        let b = classify(&cm, 1.0, &cfg).unwrap();
        prop_assert_eq!(a.verdict, b.verdict);
        match (a.jy_value, b.jy_value, a.l2_value, b.l2_value) {
            (FunctionalValue::Finite(x), FunctionalValue::Finite(y), FunctionalValue::Finite(u), FunctionalValue::Finite(v)) => {
                prop_assert!((c * x - y).abs() <= 1e-6 * y);
                prop_assert!((c * c * u - v).abs() <= 1e-6 * v);
            }
            other => prop_assert!(false, "unexpected values {:?}", other),
        }
    }

    #[test]
    fn jy_functional_is_monotone_in_alpha(a1 in 0.55f64..1.9, gap in 0.05f64..0.5) {
        let cfg = LadderConfig::default();
        let a2 = a1 + gap;
        let v1 = classify(&DeterministicIntegrand::jeulin_yor(a1, 1.0), 1.0, &cfg).unwrap();
        let v2 = classify(&DeterministicIntegrand::jeulin_yor(a2, 1.0), 1.0, &cfg).unwrap();
        if v1.verdict == Verdict::Semimartingale {
            prop_assert_eq!(v2.verdict, Verdict::Semimartingale);
        }
        if let (Some(x), Some(y)) = (v1.jy_value.finite(), v2.jy_value.finite()) {
            prop_assert!(y < x);
        }
    }

    #[test]
    fn random_finite_instances_pass_every_exact_check(seed in any::<u64>(), allow_null in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let spec = RandomInstanceSpec { allow_null, ..RandomInstanceSpec::default() };
        let rep = random_instance(&spec, &mut rng).run().unwrap();
        prop_assert!(rep.absolute_continuity.holds);
        prop_assert!(rep.passed, "{:?}", rep);
    }

    #[test]
    fn conditional_expectation_tower_property(
        values in prop::collection::vec((-20i64..20, 1i64..6), 2..9),
        weights in prop::collection::vec(0i64..5, 9),
        fine in prop::collection::vec(0usize..6, 9),
    ) {
        let n = values.len();
        let f: Vec<Rational> = values.iter().map(|&(a, b)| rat(a, b)).collect();
        let mut w: Vec<i64> = weights[..n].to_vec();
        w[0] += 1;
        let total: i64 = w.iter().sum();
        let p: Vec<Rational> = w.iter().map(|&x| rat(x, total)).collect();
        let fine_labels = &fine[..n];
        let coarse_labels: Vec<usize> = fine_labels.iter().map(|l| l / 2).collect();
        let fine_p = Partition::from_labels(fine_labels);
        let coarse_p = Partition::from_labels(&coarse_labels);
        prop_assert!(fine_p.refines(&coarse_p));
        let inner = conditional_expectation(&f, &fine_p, &p).values;
        let direct = conditional_expectation(&f, &coarse_p, &p).values;
        let nested = conditional_expectation(&inner, &coarse_p, &p).values;
        for i in 0..n {
            if !p[i].is_zero() {
                prop_assert_eq!(&nested[i], &direct[i]);
            }
        }
        let total_mass = |g: &[Rational]| g.iter().zip(&p).map(|(a, b)| a * b).fold(Rational::zero(), |s, x| s + x);
        prop_assert_eq!(total_mass(&direct), total_mass(&f));
    }

    #[test]
    fn rationals_round_trip_through_text(num in -1000i64..1000, den in 1i64..1000) {
        let r = rat(num, den);
        let s = rat_str(&r);
        prop_assert!(s.contains('/'));
        prop_assert_eq!(parse_rational(&s).unwrap(), r);
    }
}
