use std::collections::BTreeSet;

use orbit_angles::angular::{sector_count, AngleInterval};
use orbit_angles::halfplane::{cosh_distance, mobius_apply, normalized_angle_or_zero};
use orbit_angles::lattice::{brute_force_ball, enumerate_ball, sufficient_entry_bound};
use orbit_angles::{BallQuery, GroupSpec, Point};
use proptest::prelude::*;

fn point() -> impl Strategy<Value = Point> {
    (-1.5f64..1.5, 0.3f64..2.5).prop_map(|(x, y)| Point::new(x, y).unwrap())
}

fn group() -> impl Strategy<Value = GroupSpec> {
    (1u64..=5).prop_map(|n| if n == 1 { GroupSpec::sl2z() } else { GroupSpec::gamma(n).unwrap() })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn enumeration_matches_brute_force(
        g in group(), z0 in point(), z1 in point(), w in point(), x in 1.0f64..40.0
    ) {
        let q = BallQuery::shifted(g, z0, z1, w, x);
        let fast = enumerate_ball(&q).unwrap();
        let slow = brute_force_ball(&q, sufficient_entry_bound(&q)).unwrap();
        let a: BTreeSet<_> = fast.elements().map(|e| e.entries()).collect();
        let b: BTreeSet<_> = slow.elements().map(|e| e.entries()).collect();
        prop_assert_eq!(a, b);
        prop_assert_eq!(fast.samples(), slow.samples());
    }
}

#[test]
fn records_are_consistent_with_geometry() {
    let z0 = Point::new(0.4, 1.3).unwrap();
    let z1 = Point::new(-0.2, 0.7).unwrap();
    let w = Point::new(0.1, 1.1).unwrap();
    let o = enumerate_ball(&BallQuery::shifted(GroupSpec::gamma(2).unwrap(), z0, z1, w, 300.0)).unwrap();
    assert!(o.len() > 100);
    for r in o.records() {
        assert!(GroupSpec::gamma(2).unwrap().contains(&r.element));
        assert_eq!(r.image, mobius_apply(&r.element, w));
        assert!((cosh_distance(z1, r.image) - r.cosh_dist).abs() <= 1e-12 * r.cosh_dist);
        assert!(r.cosh_dist <= 300.0 * (1.0 + 1e-12));
        assert_eq!(r.omega, normalized_angle_or_zero(z0, r.image));
    }
    let mut csv = Vec::new();
    o.write_csv(&mut csv).unwrap();
    assert_eq!(String::from_utf8(csv).unwrap().lines().count(), o.len() + 1);
}

#[test]
fn conjugating_the_frame_preserves_angles() {
    // z ↦ z + 1 normalizes SL(2,Z), so shifting all three points by 1 permutes the orbit
    let g = GroupSpec::sl2z();
    let z0 = Point::new(0.2, 1.5).unwrap();
    let z1 = Point::new(0.6, 0.9).unwrap();
    let shift = |p: Point| Point::new(p.x() + 1.0, p.y()).unwrap();
    let a = enumerate_ball(&BallQuery::lattice(g, z0, z1, 500.0)).unwrap();
    let b = enumerate_ball(&BallQuery::lattice(g, shift(z0), shift(z1), 500.0)).unwrap();
    assert_eq!(a.len(), b.len());
    let arc = AngleInterval::new(0.3, 0.2).unwrap();
    let (ca, cb) = (sector_count(a.samples(), &arc), sector_count(b.samples(), &arc));
    assert!(ca.abs_diff(cb) <= 2, "{ca} vs {cb}");
}
