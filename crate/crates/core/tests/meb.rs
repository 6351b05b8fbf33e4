mod common;

use anonytope_core::geometry::{balls_intersect, min_enclosing_ball, Ball};
use common::{brute_force_meb, dist, random_points, rng, snapped_points};
use proptest::prelude::*;
use rand::RngExt;

fn assert_contains(ball: &Ball, points: &[Vec<f64>]) {
    for p in points {
        assert!(dist(&ball.center, p) <= ball.radius + 1e-9);
    }
}

#[test]
fn matches_support_subset_search_on_500_sets() {
    let mut r = rng(7);
    let mut worst: f64 = 0.0;
    for case in 0..500 {
        let n = r.random_range(1..=10);
        let d = r.random_range(1..=4);
        let points = if case % 5 == 0 {
            snapped_points(&mut r, n, d, 3)
        } else {
            random_points(&mut r, n, d)
        };
        let ball = min_enclosing_ball(&points).unwrap();
        let oracle = brute_force_meb(&points);
        let rel = (ball.radius - oracle).abs() / oracle.max(1e-300);
        if oracle > 0.0 {
            worst = worst.max(rel);
            assert!(rel <= 1e-9, "case {case}: {} vs {oracle}", ball.radius);
        } else {
            assert!(ball.radius <= 1e-12);
        }
        assert_contains(&ball, &points);
    }
    assert!(worst <= 1e-9);
}

#[test]
fn documented_small_cases() {
    let one = min_enclosing_ball(&[[0.3, 0.7]]).unwrap();
    assert_eq!((one.center.as_slice(), one.radius), (&[0.3, 0.7][..], 0.0));

    let two = min_enclosing_ball(&[[0.0, 0.0], [1.0, 0.0]]).unwrap();
    assert_eq!(two.center, vec![0.5, 0.0]);
    assert_eq!(two.radius, 0.5);

    let tri = min_enclosing_ball(&[[0.0, 0.0], [1.0, 0.0], [0.5, 3f64.sqrt() / 2.0]]).unwrap();
    assert!((tri.radius - 1.0 / 3f64.sqrt()).abs() < 1e-12);

    let obtuse = min_enclosing_ball(&[[0.0, 0.0], [2.0, 0.0], [1.0, 0.1]]).unwrap();
    assert!((obtuse.radius - 1.0).abs() < 1e-12);
    assert!(dist(&obtuse.center, &[1.0, 0.0]) < 1e-12);
}

#[test]
fn closed_ball_boundary() {
    let pair = [[0.0, 0.0], [1.0, 0.0]];
    assert!(balls_intersect(&[[0.2, 0.2]], 0.0).unwrap());
    assert!(!balls_intersect(&pair, 0.4).unwrap());
    assert!(balls_intersect(&pair, 0.5).unwrap());
    assert!(balls_intersect(&pair, -0.1).is_err());
    assert!(min_enclosing_ball::<Vec<f64>>(&[]).is_err());
}

fn point_set(max_n: usize, d: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(0.0..1.0f64, d), 1..=max_n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn adding_a_point_never_shrinks_the_ball(
        d in 1usize..=4,
        seed in any::<u64>(),
    ) {
        let mut r = rng(seed);
        let n = r.random_range(1..=9);
        let mut points = random_points(&mut r, n, d);
        let before = min_enclosing_ball(&points).unwrap().radius;
        points.extend(random_points(&mut r, 1, d));
        let after = min_enclosing_ball(&points).unwrap();
        prop_assert!(after.radius >= before * (1.0 - 1e-12));
        assert_contains(&after, &points);
    }

    #[test]
    fn intersection_is_monotone_in_eps(
        points in point_set(8, 3),
        eps in 0.0..1.0f64,
        extra in 0.0..1.0f64,
    ) {
        if balls_intersect(&points, eps).unwrap() {
            prop_assert!(balls_intersect(&points, eps + extra).unwrap());
        }
    }

    #[test]
    fn order_of_points_does_not_change_radius(points in point_set(10, 2)) {
        let a = min_enclosing_ball(&points).unwrap().radius;
        let mut rev = points.clone();
        rev.reverse();
        let b = min_enclosing_ball(&rev).unwrap().radius;
        prop_assert!((a - b).abs() <= 1e-9 * a.max(1e-12));
    }
}
