use csstd::{
    classic_sigmoid, cs_std_solve, cs_std_solve_multiphase, edge_weight, generate_phantom,
    region_variance_feature, td_energy, EdgeWeight, Field, PhantomKind, SolverConfig,
};
use proptest::prelude::*;

fn feature(w: usize, h: usize) -> impl Strategy<Value = Field> {
    prop::collection::vec(-2.0f64..2.0, w * h).prop_map(move |v| Field::new(w, h, v).unwrap())
}

fn no_projection(lambda: f64) -> SolverConfig {
    SolverConfig {
        lambdas: vec![lambda],
        enable_convex: false,
        outer_tol: 0.0,
        ..SolverConfig::default()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn energy_never_increases_without_projection(o in feature(24, 24), lambda in 0.0f64..20.0, eps in 0.05f64..1.0) {
        let cfg = SolverConfig { epsilon: eps, ..no_projection(lambda) };
        let (_, trace) = cs_std_solve(&o, &EdgeWeight::uniform(24, 24), &cfg).unwrap();
        for w in trace.totals().windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-9 * w[0].abs().max(1.0), "{} -> {}", w[0], w[1]);
        }
    }

    #[test]
    fn trace_length_is_iterations_plus_one(o in feature(16, 16), outer in 1usize..6) {
        let cfg = SolverConfig { outer_iters: outer, ..no_projection(5.0) };
        let (_, trace) = cs_std_solve(&o, &EdgeWeight::uniform(16, 16), &cfg).unwrap();
        prop_assert_eq!(trace.records.len(), trace.iterations() + 1);
        prop_assert!(trace.iterations() <= outer);
    }

    #[test]
    fn multiphase_output_is_nested(o1 in feature(20, 20), o2 in feature(20, 20)) {
        let cfg = SolverConfig {
            lambdas: vec![5.0, 5.0],
            schedule: csstd::RadiusSchedule::new([6, 4, 3, 2, 1]).unwrap(),
            outer_iters: 3,
            ..SolverConfig::default()
        };
        let (stack, _) = cs_std_solve_multiphase(&[o1, o2], &EdgeWeight::uniform(20, 20), &cfg).unwrap();
        prop_assert!(stack.first_nesting_violation().is_none());
    }
}

#[test]
fn classic_sigmoid_when_everything_is_off() {
    let o = Field::from_fn(32, 32, |x, y| {
        (x as f64 * 0.3).sin() * 3.0 - (y as f64 * 0.2).cos()
    });
    let cfg = SolverConfig {
        epsilon: 1.0,
        outer_tol: 1e-4,
        ..no_projection(0.0)
    };
    let (u, trace) = cs_std_solve(&o, &EdgeWeight::uniform(32, 32), &cfg).unwrap();
    assert_eq!(&u, &classic_sigmoid(&o));
    assert_eq!(trace.iterations(), 1);
}

#[test]
fn solves_are_bitwise_deterministic() {
    let ph = generate_phantom(PhantomKind::Geometry, 128, 3).unwrap();
    let o = region_variance_feature(&ph.image, ph.means[0], ph.means[1]);
    let e = edge_weight(&ph.image).unwrap();
    let a = cs_std_solve(&o, &e, &SolverConfig::default()).unwrap();
    let b = cs_std_solve(&o, &e, &SolverConfig::default()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn output_is_nearly_binary_on_demo_images() {
    for kind in [PhantomKind::Geometry, PhantomKind::Star, PhantomKind::Disks] {
        let ph = generate_phantom(kind, 128, 0).unwrap();
        let o = region_variance_feature(&ph.image, ph.means[0], ph.means[1]);
        let e = edge_weight(&ph.image).unwrap();
        let cfg = SolverConfig {
            lambdas: vec![1.0],
            epsilon: 0.1,
            ..SolverConfig::default()
        };
        let (u, _) = cs_std_solve(&o, &e, &cfg).unwrap();
        let soft = u.values().iter().filter(|&&v| v > 0.05 && v < 0.95).count();
        assert!((soft as f64) < 0.05 * u.len() as f64, "{kind:?}: {soft}");
    }
}

#[test]
fn larger_lambda_shortens_the_interface() {
    // λ = 10 and λ = 100 are both in the thresholding regime and differ only
    // by single boundary pixels, so each is compared against λ = 1.
    let ph = generate_phantom(PhantomKind::Geometry, 128, 0).unwrap();
    let o = region_variance_feature(&ph.image, ph.means[0], ph.means[1]);
    let e = edge_weight(&ph.image).unwrap();
    let interface = |lambda: f64| {
        let cfg = no_projection(lambda);
        let (u, _) = cs_std_solve(&o, &e, &cfg).unwrap();
        td_energy(&u, &e, &cfg.kernel().unwrap()).unwrap()
    };
    let weak = interface(1.0);
    for lambda in [10.0, 100.0] {
        let r = interface(lambda);
        assert!(r < weak, "lambda {lambda}: {r} >= {weak}");
    }
}
