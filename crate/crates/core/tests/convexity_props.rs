use csstd::{
    generate_phantom, isoperimetric_ratio, project_convex, project_convex_traced, verify_convex,
    violation_field, CurvatureFloor, Field, PhantomKind, RadiusSchedule, SoftMask,
};
use proptest::prelude::*;

fn near_binary(w: usize, h: usize) -> impl Strategy<Value = SoftMask> {
    prop::collection::vec(prop_oneof![0.0f64..0.05, 0.95f64..=1.0], w * h)
        .prop_map(move |v| SoftMask::new(Field::new(w, h, v).unwrap()).unwrap())
}

fn blobs(n: usize) -> impl Strategy<Value = Field> {
    prop::collection::vec((4i64..44, 4i64..44, 2i64..9), 1..4).prop_map(move |discs| {
        Field::from_fn(n, n, |x, y| {
            let hit = discs
                .iter()
                .any(|&(cx, cy, r)| (x as i64 - cx).pow(2) + (y as i64 - cy).pow(2) <= r * r);
            if hit {
                1.0
            } else {
                0.0
            }
        })
    })
}

fn small_schedule() -> RadiusSchedule {
    RadiusSchedule::new([6, 4, 3, 2, 1]).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn violation_lies_in_unit_interval(u in near_binary(12, 10), r in 1usize..5) {
        let v = violation_field(&u, r).unwrap();
        prop_assert!(v.min() >= -1.0 - 1e-12 && v.max() <= 1.0 + 1e-12);
    }

    #[test]
    fn projection_is_monotone_and_idempotent(u in near_binary(20, 20), d in prop_oneof![Just(0.0), 0.0f64..0.3]) {
        let delta = CurvatureFloor::new(d).unwrap();
        let (out, stats) = project_convex_traced(&u, &small_schedule(), delta, 400).unwrap();
        prop_assert!(out.values().iter().zip(u.values()).all(|(a, b)| a >= b));
        prop_assert!(out.values().iter().all(|&v| (0.0..=1.0).contains(&v)));
        if stats.converged {
            let again = project_convex(&out, &small_schedule(), delta, 400).unwrap();
            prop_assert_eq!(again, out);
        }
    }

    #[test]
    fn projection_terminates_within_budget(u in near_binary(16, 16), budget in 1usize..30) {
        let (_, stats) = project_convex_traced(&u, &small_schedule(), CurvatureFloor::default(), budget).unwrap();
        prop_assert!(stats.iterations <= budget);
    }

    #[test]
    fn oracle_outputs_are_well_formed(mask in blobs(48), seed in 0u64..1000) {
        let report = verify_convex(&mask, 500, seed).unwrap();
        for c in &report.components {
            prop_assert!((0.0..=1.0).contains(&c.violating_fraction));
            prop_assert!(c.isoperimetric_ratio > 0.0 && c.isoperimetric_ratio <= 1.0 + 1e-9);
        }
        let total: usize = report.components.iter().map(|c| c.area).sum();
        prop_assert_eq!(total as f64, mask.sum());
        prop_assert_eq!(report.verdict, report.components.iter().all(|c| c.passes()));
    }
}

#[test]
fn star_projection_passes_the_oracle() {
    let star = generate_phantom(PhantomKind::Star, 128, 0)
        .unwrap()
        .labels
        .sublevel_mask(1);
    assert!(!verify_convex(&star, 10_000, 1).unwrap().verdict);
    let u = SoftMask::new(star).unwrap();
    let out = project_convex(
        &u,
        &RadiusSchedule::default(),
        CurvatureFloor::default(),
        100,
    )
    .unwrap();
    let report = verify_convex(&out.threshold(0.5), 10_000, 1).unwrap();
    assert_eq!(report.component_count(), 1);
    assert!(report.verdict, "worst {}", report.worst_fraction());
}

#[test]
fn disk_is_a_fixed_point() {
    let disk = Field::from_fn(80, 80, |x, y| {
        let (dx, dy) = (x as f64 - 40.0, y as f64 - 40.0);
        if dx * dx + dy * dy <= 625.0 {
            1.0
        } else {
            0.0
        }
    });
    let u = SoftMask::new(disk.clone()).unwrap();
    let (out, stats) = project_convex_traced(
        &u,
        &RadiusSchedule::default(),
        CurvatureFloor::default(),
        50,
    )
    .unwrap();
    assert_eq!(out.as_field(), &disk);
    assert_eq!(stats.raised, 0);
    assert!(stats.converged);
}

#[test]
fn curvature_floor_rounds_a_square() {
    let square = Field::from_fn(160, 160, |x, y| {
        if (50..110).contains(&x) && (50..110).contains(&y) {
            1.0
        } else {
            0.0
        }
    });
    let u = SoftMask::new(square.clone()).unwrap();
    let sched = RadiusSchedule::new([25, 25, 25, 25, 1]).unwrap();
    let flat = project_convex(&u, &sched, CurvatureFloor::new(0.0).unwrap(), 50).unwrap();
    assert_eq!(flat.as_field(), &square);
    let round = project_convex(&u, &sched, CurvatureFloor::new(0.15).unwrap(), 50).unwrap();
    let q0 = isoperimetric_ratio(&square).unwrap();
    let q1 = isoperimetric_ratio(&round.threshold(0.5)).unwrap();
    assert!(q1 > q0, "{q1} <= {q0}");
}
