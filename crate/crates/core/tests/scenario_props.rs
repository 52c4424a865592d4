mod common;

use common::{perturbed, Jitter};
use proptest::prelude::*;
use vei_core::scenario_io::{load_scenario_str, serialize_scenario};

proptest! {
    #[test]
    fn serialize_then_load_is_identity(
        preset in 0usize..3,
        aggressive in any::<bool>(),
        threshold in 1.0..150.0f64,
        ix in -2.0..2.0f64, iy in -2.0..2.0f64,
        dx in -3.0..3.0f64, dy in -3.0..3.0f64,
        shift in -10.0..10.0f64, speed in 0.0..20.0f64,
        radius in 1.0..30.0f64, angle in 10.0..360.0f64,
    ) {
        let sc = perturbed(Jitter {
            preset, aggressive, threshold,
            init: (ix, iy), destination: (dx, dy),
            hazard_shift: shift, hazard_speed: speed,
            fov_radius: radius, fov_angle: angle,
        });
        prop_assume!(sc.validate().is_ok());
        let doc = serialize_scenario(&sc);
        let back = load_scenario_str(&doc, "generated").unwrap();
        prop_assert_eq!(&back, &sc);
        prop_assert_eq!(serialize_scenario(&back), doc);
    }
}
