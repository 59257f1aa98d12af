//! Moment identities across the set families the estimators must handle:
//! balls, cube-like half-space intersections, and annular sets truncated to
//! a ball, in two and three dimensions.

use copies_core::constructions::AnnularSet;
use copies_core::measure::{mean_identity_check, meansq_identity_check};
use copies_core::oracle::{BallRegion, BallSet, HalfSpace, Intersection, SetOracle};
use copies_core::SamplerConfig;

fn cube_like(dimension: usize, half_side: f64) -> Intersection {
    // |x_i| < half_side for every axis, tagged bounded by a wrapping ball
    let mut parts: Vec<Box<dyn SetOracle>> = Vec::new();
    for axis in 0..dimension {
        let mut plus = vec![0.0; dimension];
        plus[axis] = 1.0;
        parts.push(Box::new(HalfSpace {
            normal: plus.clone(),
            offset: -half_side,
        }));
        let mut minus = vec![0.0; dimension];
        minus[axis] = -1.0;
        parts.push(Box::new(HalfSpace {
            normal: minus,
            offset: -half_side,
        }));
    }
    let wrap_radius = half_side * (dimension as f64).sqrt() * 1.001;
    parts.push(Box::new(BallSet::new(vec![0.0; dimension], wrap_radius)));
    Intersection::new(parts)
}

fn truncated_annular(dimension: u32, gap: f64, radius: f64) -> Intersection {
    Intersection::new(vec![
        Box::new(AnnularSet::new(dimension, gap)) as Box<dyn SetOracle>,
        Box::new(BallSet::new(vec![0.0; dimension as usize], radius)),
    ])
}

fn check_mean(oracle: &dyn SetOracle, radius: f64, region_radius: f64, seed: u64) {
    let d = oracle.dimension();
    let region = BallRegion::new(vec![0.0; d], region_radius);
    let check = mean_identity_check(
        oracle,
        radius,
        &region,
        &SamplerConfig::monte_carlo(seed, 40_000),
    )
    .unwrap();
    assert!(
        check.within_sigma(3.0),
        "{}: lhs {} rhs {} combined se {}",
        oracle.label(),
        check.lhs,
        check.rhs,
        check.combined_std_error()
    );
}

#[test]
fn mean_identity_unit_balls() {
    check_mean(&BallSet::new(vec![0.0, 0.0], 1.0), 0.5, 1.5, 11);
    check_mean(&BallSet::new(vec![0.0, 0.0, 0.0], 1.0), 0.5, 1.5, 12);
}

#[test]
fn mean_identity_cube_like_sets() {
    check_mean(&cube_like(2, 1.0), 0.4, 2.5, 13);
    check_mean(&cube_like(3, 1.0), 0.4, 2.5, 14);
}

#[test]
fn mean_identity_truncated_annular_sets() {
    check_mean(&truncated_annular(2, 0.2, 4.0), 0.5, 5.0, 15);
    check_mean(&truncated_annular(3, 0.2, 4.0), 0.5, 5.0, 16);
}

#[test]
fn meansq_identity_unit_balls() {
    for (d, seed) in [(2usize, 21u64), (3, 22)] {
        let oracle = BallSet::new(vec![0.0; d], 1.0);
        let region = BallRegion::new(vec![0.0; d], 1.5);
        let check = meansq_identity_check(
            &oracle,
            0.5,
            &region,
            &SamplerConfig::monte_carlo(seed, 400_000),
        )
        .unwrap();
        assert!(
            check.within_sigma(3.0),
            "d={d}: lhs {} rhs {} se {}",
            check.lhs,
            check.rhs,
            check.combined_std_error()
        );
        let rel = (check.lhs - check.rhs).abs() / check.rhs;
        assert!(rel < 0.02, "d={d}: rel {rel}");
    }
}
