use std::f64::consts::FRAC_PI_2;

use proptest::prelude::*;
use vei_core::vehicle::{bicycle_step, VehicleState};

const LF: f64 = 1.25;
const LR: f64 = 1.25;

proptest! {
    #[test]
    fn zero_steer_along_x_has_no_drift(x in -100.0..100.0f64, y in -100.0..100.0f64, v in 0.0..30.0f64, n in 1usize..1000) {
        let mut s = VehicleState::new(x, y, 0.0, v);
        for _ in 0..n {
            s = bicycle_step(&s, 0.0, 0.0, LF, LR, 0.1).unwrap();
        }
        prop_assert_eq!(s.y, y);
        prop_assert_eq!(s.psi, 0.0);
        prop_assert_eq!(s.v, v);
    }

    #[test]
    fn zero_accel_conserves_speed(psi in -3.0..3.0f64, v in 0.0..30.0f64, steer in -1.2..1.2f64, n in 1usize..300) {
        let mut s = VehicleState::new(0.0, 0.0, psi, v);
        for _ in 0..n {
            s = bicycle_step(&s, 0.0, steer, LF, LR, 0.1).unwrap();
        }
        prop_assert_eq!(s.v, v);
    }

    #[test]
    fn speed_never_negative(v in 0.0..5.0f64, accel in -50.0..0.0f64) {
        let s = bicycle_step(&VehicleState::new(0.0, 0.0, 0.0, v), accel, 0.0, LF, LR, 0.1).unwrap();
        prop_assert!(s.v >= 0.0);
    }

    /// One step of `h` against two steps of `h/2`: the gap is the local
    /// truncation error of explicit Euler, which shrinks as h².
    #[test]
    fn local_error_is_second_order(psi in -3.0..3.0f64, v in 5.0..20.0f64, steer in 0.2..0.6f64) {
        let s = VehicleState::new(0.0, 0.0, psi, v);
        let gap = |h: f64| {
            let one = bicycle_step(&s, 0.0, steer, LF, LR, h).unwrap();
            let half = bicycle_step(&s, 0.0, steer, LF, LR, h / 2.0).unwrap();
            let two = bicycle_step(&half, 0.0, steer, LF, LR, h / 2.0).unwrap();
            ((one.x - two.x).powi(2) + (one.y - two.y).powi(2)).sqrt()
        };
        let ratio = gap(0.01) / gap(0.005);
        prop_assert!((3.5..4.5).contains(&ratio), "ratio {}", ratio);
    }

    #[test]
    fn steering_at_right_angle_is_rejected(sign in prop::bool::ANY, extra in 0.0..1.0f64) {
        let steer = if sign { FRAC_PI_2 + extra } else { -FRAC_PI_2 - extra };
        prop_assert!(bicycle_step(&VehicleState::new(0.0, 0.0, 0.0, 1.0), 0.0, steer, LF, LR, 0.1).is_err());
    }
}
