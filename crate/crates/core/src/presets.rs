//! Built-in copies of the three reference layouts. The bundled files under
//! `scenarios/` describe the same worlds.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::escooter::{BehaviorThresholds, BehaviorType, EscooterParams};
use crate::geom2d::Vec2;
use crate::simulation::{
    MapKind, Scenario, Vehicle, DEFAULT_DT, DEFAULT_LANE_WIDTH, DEFAULT_T_MAX,
};
use crate::vehicle::{VehicleRole, VehicleSpec, VehicleState};

/// Curb point between the two parked cars, just south of the crossroads.
pub const INTERSECTION_DECISION_POINT: Vec2 = Vec2::new(4.0, -12.0);

/// On the lane line ahead of the two slow followers.
pub const STRAIGHT_ROAD_DECISION_POINT: Vec2 = Vec2::new(-4.0, -5.0);

fn vehicle(id: &str, role: VehicleRole, x: f64, y: f64, psi: f64, v: f64) -> Vehicle {
    Vehicle::new(
        id,
        VehicleState::new(x, y, psi, v),
        VehicleSpec::for_role(role),
    )
}

fn base(map_kind: MapKind, vehicles: Vec<Vehicle>, init: Vec2, dest: Vec2, dp: Vec2) -> Scenario {
    let thresholds = BehaviorThresholds::default();
    Scenario {
        map_kind,
        lane_width: DEFAULT_LANE_WIDTH,
        vehicles,
        escooter_init: init,
        destination: dest,
        decision_point: dp,
        escooter_params: EscooterParams {
            fov_radius: 10.0,
            fov_angle: 120.0,
            ..EscooterParams::default()
        },
        thresholds,
        behavior: BehaviorType::Aggressive,
        t_max: DEFAULT_T_MAX,
        dt: DEFAULT_DT,
    }
    .with_behavior(BehaviorType::Aggressive)
}

/// Crossroads with two parked cars and one vehicle driving West to East.
pub fn intersection_one_vehicle() -> Scenario {
    base(
        MapKind::Intersection,
        vec![
            vehicle("veh0", VehicleRole::Parked, 6.0, -12.0, FRAC_PI_2, 0.0),
            vehicle("veh1", VehicleRole::Parked, 2.0, -16.0, FRAC_PI_2, 0.0),
            vehicle("veh2", VehicleRole::Crossing, -75.0, -2.0, 0.0, 10.0),
        ],
        Vec2::new(4.0, -30.0),
        Vec2::new(-15.0, 15.0),
        INTERSECTION_DECISION_POINT,
    )
}

/// As [`intersection_one_vehicle`] plus a second vehicle driving East to
/// West in the opposite lane.
pub fn intersection_two_vehicle() -> Scenario {
    let mut sc = intersection_one_vehicle();
    sc.vehicles
        .push(vehicle("veh3", VehicleRole::Crossing, 85.0, 2.0, PI, 10.0));
    sc
}

/// North-bound road: two slow followers behind the e-scooter and a fast
/// vehicle approaching from behind in the adjacent lane.
pub fn straight_road() -> Scenario {
    base(
        MapKind::StraightRoad,
        vec![
            vehicle("veh0", VehicleRole::Follower, -6.0, -24.0, FRAC_PI_2, 1.0),
            vehicle("veh1", VehicleRole::Follower, -2.0, -24.0, FRAC_PI_2, 1.0),
            vehicle("veh2", VehicleRole::Passing, 2.0, -60.0, FRAC_PI_2, 10.0),
        ],
        Vec2::new(-4.0, -10.0),
        Vec2::new(2.0, 20.0),
        STRAIGHT_ROAD_DECISION_POINT,
    )
}
