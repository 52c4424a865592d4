use proptest::prelude::*;
use vei_core::escooter::{desired_velocity, destination_force, vehicle_repulsion};
use vei_core::geom2d::Vec2;
use vei_core::presets;
use vei_core::simulation::run_episode;

fn vec2(range: f64) -> impl Strategy<Value = Vec2> {
    (-range..range, -range..range).prop_map(|(x, y)| Vec2::new(x, y))
}

proptest! {
    #[test]
    fn desired_speed_bounded(s in vec2(100.0), d in vec2(100.0), v0 in 0.1..200.0f64, sigma in 0.1..5.0f64, v_max in 0.5..10.0f64) {
        let v = desired_velocity(s, d, v0, sigma, v_max);
        prop_assert!(v.norm() <= v_max * (1.0 + 1e-12));
        prop_assert!(v.norm() <= v0 / (2.0 * sigma) * (1.0 + 1e-12));
        let unclamped = desired_velocity(s, d, v0, sigma, f64::INFINITY);
        prop_assert!(unclamped.norm() <= v0 / (2.0 * sigma) * (1.0 + 1e-12));
    }

    #[test]
    fn desired_velocity_points_at_destination(s in vec2(100.0), d in vec2(100.0), v0 in 0.1..200.0f64, sigma in 0.1..5.0f64) {
        let to = d - s;
        prop_assume!(to.norm() > 1e-6);
        let v = desired_velocity(s, d, v0, sigma, 5.0);
        prop_assert!(v.cross(to).abs() <= 1e-9 * v.norm() * to.norm());
        prop_assert!(v.dot(to) > 0.0);
    }

    #[test]
    fn destination_force_is_linear(a in vec2(10.0), b in vec2(10.0), k in 0.0..100.0f64) {
        let f = destination_force(a, b, k);
        prop_assert!((f - (a - b) * k).norm() <= 1e-12 * (1.0 + f.norm()));
        prop_assert_eq!(destination_force(a, a, k), Vec2::ZERO);
    }

    #[test]
    fn repulsion_decays_with_distance(dir in -3.2..3.2f64, d1 in 0.01..30.0f64, d2 in 0.01..30.0f64, a in 1.0..500.0f64, b in 0.05..3.0f64) {
        let (near, far) = if d1 <= d2 { (d1, d2) } else { (d2, d1) };
        let u = Vec2::from_heading(dir);
        let fn_ = vehicle_repulsion(Vec2::ZERO, &[u * near], a, b).force.norm();
        let ff = vehicle_repulsion(Vec2::ZERO, &[u * far], a, b).force.norm();
        prop_assert!(ff <= fn_);
    }

    #[test]
    fn repulsion_pushes_away(s in vec2(50.0), p in vec2(50.0), a in 1.0..500.0f64, b in 0.05..3.0f64) {
        prop_assume!(s.distance(p) > 1e-6);
        let f = vehicle_repulsion(s, &[p], a, b).force;
        prop_assume!(f.norm() > 1e-300);
        prop_assert!(f.dot(s - p) > 0.0);
        prop_assert!(f.cross(s - p).abs() <= 1e-9 * f.norm() * s.distance(p));
    }

    #[test]
    fn repulsion_superposes(s in vec2(20.0), ps in prop::collection::vec(vec2(20.0), 0..6), qs in prop::collection::vec(vec2(20.0), 0..6)) {
        let (a, b) = (300.0, 1.5);
        let mut all = ps.clone();
        all.extend(&qs);
        let whole = vehicle_repulsion(s, &all, a, b).force;
        let parts = vehicle_repulsion(s, &ps, a, b).force + vehicle_repulsion(s, &qs, a, b).force;
        prop_assert!((whole - parts).norm() <= 1e-9 * (1.0 + whole.norm()));
    }
}

#[test]
fn episodes_are_deterministic() {
    for sc in [
        presets::intersection_one_vehicle(),
        presets::intersection_two_vehicle(),
        presets::straight_road(),
    ] {
        let a = run_episode(&sc).unwrap();
        let b = run_episode(&sc).unwrap();
        assert_eq!(a, b);
    }
}
