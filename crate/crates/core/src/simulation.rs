//! World assembly and the fixed-step episode loop.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::escooter::{
    desired_velocity, destination_force, fov_heading, fsm_step, integrate_escooter, perceive,
    total_force, vehicle_repulsion, BehaviorThresholds, BehaviorType, EscooterParams,
    EscooterState, FsmMode, DECISION_TOLERANCE,
};
use crate::geom2d::{distance_to_rect, point_in_rect, OrientedRect, Vec2};
use crate::vehicle::{
    bicycle_step, constant_speed_controller, footprint, VehicleRole, VehicleSpec, VehicleState,
};

/// Distance to the destination that counts as arrival, m.
pub const ARRIVAL_TOLERANCE: f64 = 0.5;

pub const DEFAULT_DT: f64 = 0.1;
pub const DEFAULT_T_MAX: f64 = 30.0;
pub const DEFAULT_LANE_WIDTH: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapKind {
    /// Four-lane crossroads centred on the origin, roads along both axes.
    Intersection,
    /// Four-lane road running North-South through the origin.
    StraightRoad,
}

impl MapKind {
    pub fn as_str(self) -> &'static str {
        match self {
            MapKind::Intersection => "intersection",
            MapKind::StraightRoad => "straight_road",
        }
    }
}

impl fmt::Display for MapKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MapKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "intersection" => Ok(MapKind::Intersection),
            "straight_road" => Ok(MapKind::StraightRoad),
            other => Err(Error::invalid("map", format!("unknown map kind `{other}`"))),
        }
    }
}

/// The three studied interaction cases.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UseCase {
    OneVehicleCrossing,
    TwoVehicleCrossing,
    OneVehiclePassing,
}

impl UseCase {
    pub fn as_str(self) -> &'static str {
        match self {
            UseCase::OneVehicleCrossing => "one_vehicle_crossing",
            UseCase::TwoVehicleCrossing => "two_vehicle_crossing",
            UseCase::OneVehiclePassing => "one_vehicle_passing",
        }
    }
}

impl fmt::Display for UseCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Vehicle {
    /// Stable name (`veh0`, `veh1`, ...) used by grids and logs.
    pub id: String,
    pub state: VehicleState,
    pub spec: VehicleSpec,
}

impl Vehicle {
    pub fn new(id: impl Into<String>, state: VehicleState, spec: VehicleSpec) -> Self {
        Self {
            id: id.into(),
            state,
            spec,
        }
    }
}

/// Complete, self-contained description of one episode.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub map_kind: MapKind,
    pub lane_width: f64,
    pub vehicles: Vec<Vehicle>,
    pub escooter_init: Vec2,
    pub destination: Vec2,
    pub decision_point: Vec2,
    pub escooter_params: EscooterParams,
    pub thresholds: BehaviorThresholds,
    pub behavior: BehaviorType,
    pub t_max: f64,
    pub dt: f64,
}

impl Scenario {
    /// Switches the behavior type and the matching crossing threshold.
    pub fn set_behavior(&mut self, behavior: BehaviorType) {
        self.behavior = behavior;
        self.escooter_params.crossing_threshold = self.thresholds.get(behavior);
    }

    pub fn with_behavior(mut self, behavior: BehaviorType) -> Self {
        self.set_behavior(behavior);
        self
    }

    pub fn vehicle(&self, id: &str) -> Option<&Vehicle> {
        self.vehicles.iter().find(|v| v.id == id)
    }

    pub fn vehicle_mut(&mut self, id: &str) -> Option<&mut Vehicle> {
        self.vehicles.iter_mut().find(|v| v.id == id)
    }

    pub fn use_case(&self) -> UseCase {
        match self.map_kind {
            MapKind::StraightRoad => UseCase::OneVehiclePassing,
            MapKind::Intersection => {
                let crossing = self
                    .vehicles
                    .iter()
                    .filter(|v| v.spec.role == VehicleRole::Crossing)
                    .count();
                if crossing >= 2 {
                    UseCase::TwoVehicleCrossing
                } else {
                    UseCase::OneVehicleCrossing
                }
            }
        }
    }

    /// Number of steps in a full-length episode.
    pub fn step_count(&self) -> usize {
        // Tolerate representation error so that 30.0 / 0.1 yields 300.
        ((self.t_max / self.dt) - 1e-9).ceil().max(1.0) as usize
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::invalid("dt", "time step must be > 0"));
        }
        if !(self.t_max >= self.dt && self.t_max.is_finite()) {
            return Err(Error::invalid(
                "t_max",
                "episode length must be at least one time step",
            ));
        }
        if !(self.lane_width > 0.0) {
            return Err(Error::invalid("lane_width", "lane width must be > 0"));
        }
        if self.vehicles.is_empty() {
            return Err(Error::invalid(
                "vehicles",
                "scenario needs at least one vehicle",
            ));
        }
        let mut seen = HashSet::new();
        for v in &self.vehicles {
            if !seen.insert(v.id.as_str()) {
                return Err(Error::invalid(
                    "vehicles",
                    format!("duplicate vehicle id `{}`", v.id),
                ));
            }
            v.spec
                .validate()
                .map_err(|e| prefix_key(e, &format!("vehicles.{}", v.id)))?;
            let s = &v.state;
            if !(s.x.is_finite() && s.y.is_finite() && s.psi.is_finite()) {
                return Err(Error::invalid(
                    format!("vehicles.{}.position", v.id),
                    "must be finite",
                ));
            }
            if !(s.v >= 0.0 && s.v.is_finite()) {
                return Err(Error::invalid(
                    format!("vehicles.{}.speed", v.id),
                    "speed must be >= 0",
                ));
            }
        }
        for (key, p) in [
            ("escooter.init", self.escooter_init),
            ("escooter.destination", self.destination),
            ("decision_point", self.decision_point),
        ] {
            if !p.is_finite() {
                return Err(Error::invalid(key, "coordinates must be finite"));
            }
        }
        self.escooter_params.validate()?;
        self.thresholds.validate()?;

        // Between = projection onto the init -> destination segment falls
        // inside it. A degenerate segment places no constraint.
        let seg = self.destination - self.escooter_init;
        let len2 = seg.norm_squared();
        if len2 > 0.0 {
            let t = (self.decision_point - self.escooter_init).dot(seg) / len2;
            if !(0.0..=1.0).contains(&t) {
                return Err(Error::invalid(
                    "decision_point",
                    "decision point must lie between the e-scooter start and destination",
                ));
            }
        }
        Ok(())
    }
}

fn prefix_key(err: Error, prefix: &str) -> Error {
    match err {
        Error::Invalid { key, message } => Error::Invalid {
            key: format!("{prefix}.{key}"),
            message,
        },
        other => other,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Collision,
    ReachedDestination,
    Timeout,
}

impl Outcome {
    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::Collision => "collision",
            Outcome::ReachedDestination => "reached_destination",
            Outcome::Timeout => "timeout",
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Outcome {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "collision" => Ok(Outcome::Collision),
            "reached_destination" => Ok(Outcome::ReachedDestination),
            "timeout" => Ok(Outcome::Timeout),
            other => Err(Error::invalid(
                "outcome",
                format!("unknown outcome `{other}`"),
            )),
        }
    }
}

/// World snapshot after one tick.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryStep {
    pub t: f64,
    pub escooter: EscooterState,
    /// Field-of-view heading used for perception at this step, rad.
    pub fov_heading: f64,
    /// Same order as `Scenario::vehicles`.
    pub vehicles: Vec<VehicleState>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeResult {
    pub outcome: Outcome,
    pub t_event: f64,
    /// Smallest clearance between the e-scooter centre and any hazard
    /// footprint seen during the episode. Infinite without hazards.
    pub min_separation: f64,
    /// Gap measured when the crossing decision fired, if it did.
    pub decision_gap: Option<f64>,
    pub final_mode: FsmMode,
    /// Ticks on which a repulsion term was dropped for coincident points.
    pub degenerate_contacts: usize,
    /// Index into `Scenario::vehicles` of the vehicle hit, on collision.
    pub collided_with: Option<usize>,
    /// Empty when the episode ran without logging.
    pub trajectory: Vec<TrajectoryStep>,
}

/// True when the e-scooter centre is inside any footprint grown by the body
/// radius.
pub fn detect_collision(esc: &EscooterState, body_radius: f64, vehicles: &[OrientedRect]) -> bool {
    first_contact(esc, body_radius, vehicles).is_some()
}

/// Index of the first footprint the e-scooter overlaps.
pub fn first_contact(
    esc: &EscooterState,
    body_radius: f64,
    vehicles: &[OrientedRect],
) -> Option<usize> {
    vehicles
        .iter()
        .position(|r| point_in_rect(esc.pos, r, body_radius))
}

/// Smallest distance from `esc_pos` to a hazard footprint, or +∞ when no
/// hazard is present.
pub fn gap_distance<'a, I>(esc_pos: Vec2, hazards: I) -> f64
where
    I: IntoIterator<Item = &'a OrientedRect>,
{
    hazards
        .into_iter()
        .map(|r| distance_to_rect(esc_pos, r))
        .fold(f64::INFINITY, f64::min)
}

pub fn run_episode(sc: &Scenario) -> Result<EpisodeResult> {
    simulate(sc, true)
}

/// Same as [`run_episode`] without retaining the trajectory; used by sweeps.
pub fn run_episode_unlogged(sc: &Scenario) -> Result<EpisodeResult> {
    simulate(sc, false)
}

fn planner_target(sc: &Scenario, mode: FsmMode) -> Vec2 {
    match mode {
        FsmMode::Approach => sc.decision_point,
        FsmMode::Wait | FsmMode::Move | FsmMode::Done => sc.destination,
    }
}

struct World<'a> {
    sc: &'a Scenario,
    vehicles: Vec<VehicleState>,
    footprints: Vec<OrientedRect>,
    hazard_idx: Vec<usize>,
}

impl<'a> World<'a> {
    fn new(sc: &'a Scenario) -> Result<Self> {
        let vehicles: Vec<_> = sc.vehicles.iter().map(|v| v.state).collect();
        let hazard_idx = sc
            .vehicles
            .iter()
            .enumerate()
            .filter(|(_, v)| v.spec.hazard)
            .map(|(i, _)| i)
            .collect();
        let mut world = Self {
            sc,
            footprints: Vec::with_capacity(vehicles.len()),
            vehicles,
            hazard_idx,
        };
        world.refresh_footprints()?;
        Ok(world)
    }

    fn refresh_footprints(&mut self) -> Result<()> {
        self.footprints.clear();
        for (state, v) in self.vehicles.iter().zip(&self.sc.vehicles) {
            self.footprints.push(footprint(state, &v.spec)?);
        }
        Ok(())
    }

    fn step_vehicles(&mut self) -> Result<()> {
        let dt = self.sc.dt;
        for (state, v) in self.vehicles.iter_mut().zip(&self.sc.vehicles) {
            if !v.spec.role.is_moving() {
                continue;
            }
            let (accel, steer) = constant_speed_controller(state);
            *state = bicycle_step(state, accel, steer, v.spec.lf, v.spec.lr, dt)?;
        }
        self.refresh_footprints()
    }

    fn gap(&self, pos: Vec2) -> f64 {
        gap_distance(pos, self.hazard_idx.iter().map(|&i| &self.footprints[i]))
    }
}

fn simulate(sc: &Scenario, record: bool) -> Result<EpisodeResult> {
    sc.validate()?;
    let params = &sc.escooter_params;
    let n_steps = sc.step_count();

    let mut world = World::new(sc)?;
    let mut esc = EscooterState::at_rest(sc.escooter_init);
    let mut min_separation = world.gap(esc.pos);
    let mut degenerate_contacts = 0;
    let mut trajectory = Vec::with_capacity(if record { n_steps + 1 } else { 0 });

    let snapshot = |t: f64, esc: &EscooterState, world: &World| TrajectoryStep {
        t,
        escooter: *esc,
        fov_heading: fov_heading(esc, planner_target(sc, esc.mode)),
        vehicles: world.vehicles.clone(),
    };

    if record {
        trajectory.push(snapshot(0.0, &esc, &world));
    }
    let finish = |t_event,
                  contact: Option<usize>,
                  esc: &EscooterState,
                  min_separation,
                  degenerate_contacts,
                  trajectory| {
        let outcome = if contact.is_some() {
            Outcome::Collision
        } else if esc.mode == FsmMode::Done
            || (t_event == 0.0 && esc.pos.distance(sc.destination) <= ARRIVAL_TOLERANCE)
        {
            Outcome::ReachedDestination
        } else {
            Outcome::Timeout
        };
        Ok(EpisodeResult {
            outcome,
            t_event,
            min_separation,
            decision_gap: esc.latched_gap,
            final_mode: esc.mode,
            degenerate_contacts,
            collided_with: contact,
            trajectory,
        })
    };

    let contact = first_contact(&esc, params.body_radius, &world.footprints);
    if contact.is_some() || esc.pos.distance(sc.destination) <= ARRIVAL_TOLERANCE {
        return finish(0.0, contact, &esc, min_separation, 0, trajectory);
    }

    for k in 1..=n_steps {
        let t = k as f64 * sc.dt;
        world.step_vehicles()?;

        let target = planner_target(sc, esc.mode);
        let perceived = perceive(&esc, params, target, &world.footprints);
        let v_des = desired_velocity(esc.pos, target, params.v0, params.sigma_des, params.v_max);
        let f_des = destination_force(v_des, esc.vel, params.k_des);
        let repulsion = vehicle_repulsion(esc.pos, &perceived, params.a_veh, params.b_veh);
        if repulsion.degenerate_contact {
            degenerate_contacts += 1;
        }
        let f_total = total_force(f_des, repulsion.force);

        let gap = world.gap(esc.pos);
        min_separation = min_separation.min(gap);
        let at_decision_point = esc.pos.distance(sc.decision_point) <= DECISION_TOLERANCE;
        let at_destination = esc.pos.distance(sc.destination) <= ARRIVAL_TOLERANCE;
        let mode = fsm_step(
            esc.mode,
            gap,
            params.crossing_threshold,
            at_decision_point,
            at_destination,
        );
        if esc.mode == FsmMode::Approach && mode != FsmMode::Approach {
            esc.latched_gap = Some(gap);
        }
        esc.mode = mode;

        esc = integrate_escooter(&esc, f_total, params.mass, sc.dt, params.v_max);
        let contact = first_contact(&esc, params.body_radius, &world.footprints);
        min_separation = min_separation.min(world.gap(esc.pos));

        if record {
            trajectory.push(snapshot(t, &esc, &world));
        }
        if contact.is_some() || esc.mode == FsmMode::Done || k == n_steps {
            return finish(
                t,
                contact,
                &esc,
                min_separation,
                degenerate_contacts,
                trajectory,
            );
        }
    }
    unreachable!("the final step always finishes the episode")
}
