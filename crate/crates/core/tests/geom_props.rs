use std::f64::consts::PI;

use proptest::prelude::*;
use vei_core::geom2d::{
    closest_point_on_rect, distance_to_rect, normalize_angle, point_in_rect, sector_contains_rect,
    OrientedRect, Sector, Vec2,
};

fn coord() -> impl Strategy<Value = f64> {
    -50.0..50.0f64
}

fn rect_strategy() -> impl Strategy<Value = OrientedRect> {
    (coord(), coord(), -PI..PI, 0.5..8.0f64, 0.5..4.0f64)
        .prop_map(|(x, y, h, l, w)| OrientedRect::new(Vec2::new(x, y), h, l, w).unwrap())
}

/// `n` points spread evenly along the perimeter.
fn boundary_samples(r: &OrientedRect, n: usize) -> Vec<Vec2> {
    let c = r.corners();
    let perim = 2.0 * (r.length() + r.width());
    (0..n)
        .map(|k| {
            let mut s = perim * k as f64 / n as f64;
            for i in 0..4 {
                let (a, b) = (c[i], c[(i + 1) % 4]);
                let edge = a.distance(b);
                if s <= edge {
                    return a + (b - a) * (s / edge);
                }
                s -= edge;
            }
            c[0]
        })
        .collect()
}

/// Inside test from the four edge half-planes of the corner polygon.
fn inside_by_half_planes(p: Vec2, r: &OrientedRect) -> bool {
    let c = r.corners();
    let signs: Vec<f64> = (0..4)
        .map(|i| (c[(i + 1) % 4] - c[i]).cross(p - c[i]))
        .collect();
    signs.iter().all(|&s| s >= 0.0) || signs.iter().all(|&s| s <= 0.0)
}

fn min_edge_distance(p: Vec2, r: &OrientedRect) -> f64 {
    let c = r.corners();
    (0..4)
        .map(|i| {
            let (a, b) = (c[i], c[(i + 1) % 4]);
            let t = ((p - a).dot(b - a) / (b - a).norm_squared()).clamp(0.0, 1.0);
            p.distance(a + (b - a) * t)
        })
        .fold(f64::INFINITY, f64::min)
}

proptest! {
    #[test]
    fn closest_point_beats_boundary_samples(r in rect_strategy(), px in coord(), py in coord()) {
        let p = Vec2::new(px, py);
        let q = closest_point_on_rect(p, &r);
        prop_assert!(point_in_rect(q, &r, 0.0));
        let d = distance_to_rect(p, &r);
        prop_assert!((d - p.distance(q)).abs() < 1e-12);
        let best_sample = boundary_samples(&r, 1000)
            .into_iter()
            .map(|s| p.distance(s))
            .fold(f64::INFINITY, f64::min);
        prop_assert!(d <= best_sample + 1e-9);
        // Sample spacing bounds how far the true minimum can sit below the samples.
        let spacing = 2.0 * (r.length() + r.width()) / 1000.0;
        if !point_in_rect(p, &r, 0.0) {
            prop_assert!(best_sample - d <= spacing);
        } else {
            prop_assert_eq!(d, 0.0);
        }
    }

    #[test]
    fn point_in_rect_matches_half_planes(r in rect_strategy(), px in coord(), py in coord()) {
        let p = Vec2::new(px, py);
        prop_assume!(min_edge_distance(p, &r) > 1e-6);
        prop_assert_eq!(point_in_rect(p, &r, 0.0), inside_by_half_planes(p, &r));
    }

    #[test]
    fn inflation_is_monotone(r in rect_strategy(), px in coord(), py in coord(), a in 0.0..3.0f64, b in 0.0..3.0f64) {
        let p = Vec2::new(px, py);
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        if point_in_rect(p, &r, lo) {
            prop_assert!(point_in_rect(p, &r, hi));
        }
    }

    #[test]
    fn sector_test_invariant_under_rigid_motion(
        r in rect_strategy(),
        ax in coord(), ay in coord(), heading in -PI..PI,
        radius in 1.0..40.0f64, half in 0.1..PI,
        rot in -PI..PI, tx in coord(), ty in coord(),
    ) {
        let apex = Vec2::new(ax, ay);
        let sector = Sector::new(apex, heading, radius, half).unwrap();

        // Skip configurations where a sample point sits on the sector edge.
        let mut samples = r.corners().to_vec();
        samples.push(r.center());
        let near_edge = samples.iter().any(|&p| {
            let d = p - apex;
            let off = (normalize_angle(d.angle() - heading).abs() - half).abs();
            (d.norm() - radius).abs() < 1e-6 || (d.norm() > 1e-6 && off < 1e-6)
        });
        prop_assume!(!near_edge);

        let t = Vec2::new(tx, ty);
        let moved_rect = OrientedRect::new(r.center().rotate(rot) + t, r.heading() + rot, r.length(), r.width()).unwrap();
        let moved_sector = Sector::new(apex.rotate(rot) + t, heading + rot, radius, half).unwrap();
        prop_assert_eq!(sector_contains_rect(&sector, &r), sector_contains_rect(&moved_sector, &moved_rect));
    }

    #[test]
    fn normalize_angle_range_and_equivalence(a in -100.0..100.0f64) {
        let n = normalize_angle(a);
        prop_assert!(n > -PI && n <= PI);
        prop_assert!((n.sin() - a.sin()).abs() < 1e-9 && (n.cos() - a.cos()).abs() < 1e-9);
    }
}
