//! E-scooter agent: point-mass social-force dynamics, sector perception and
//! the approach / decide / cross state machine.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom2d::{closest_point_on_rect, sector_contains_rect, OrientedRect, Sector, Vec2};

/// Below this speed the field of view points at the current target instead
/// of along the velocity.
pub const FOV_SPEED_FLOOR: f64 = 0.1;

/// Radius around the decision point inside which the gap test fires.
pub const DECISION_TOLERANCE: f64 = 0.5;

/// Planner modes. `Approach` is left exactly once, so the mode itself acts
/// as the latch on the crossing decision.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FsmMode {
    /// Heading for the decision point.
    Approach,
    /// Gap was too small; holds position for the rest of the episode.
    Wait,
    /// Committed to crossing / changing lane, heading for the destination.
    Move,
    /// Destination reached.
    Done,
}

impl FsmMode {
    pub fn as_str(self) -> &'static str {
        match self {
            FsmMode::Approach => "approach",
            FsmMode::Wait => "wait",
            FsmMode::Move => "move",
            FsmMode::Done => "done",
        }
    }

    /// Whether the integrator holds the scooter still in this mode.
    pub fn is_stationary(self) -> bool {
        matches!(self, FsmMode::Wait | FsmMode::Done)
    }
}

impl fmt::Display for FsmMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FsmMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "approach" => Ok(FsmMode::Approach),
            "wait" => Ok(FsmMode::Wait),
            "move" => Ok(FsmMode::Move),
            "done" => Ok(FsmMode::Done),
            other => Err(Error::invalid("mode", format!("unknown mode `{other}`"))),
        }
    }
}

/// Rider disposition. Only the crossing threshold differs between the two.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BehaviorType {
    Aggressive,
    Normal,
}

impl BehaviorType {
    pub const ALL: [BehaviorType; 2] = [BehaviorType::Aggressive, BehaviorType::Normal];

    pub fn as_str(self) -> &'static str {
        match self {
            BehaviorType::Aggressive => "aggressive",
            BehaviorType::Normal => "normal",
        }
    }
}

impl fmt::Display for BehaviorType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BehaviorType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "aggressive" => Ok(BehaviorType::Aggressive),
            "normal" => Ok(BehaviorType::Normal),
            other => Err(Error::invalid(
                "behavior",
                format!("unknown behavior `{other}`"),
            )),
        }
    }
}

/// Crossing thresholds per behavior type, in metres of gap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BehaviorThresholds {
    pub aggressive: f64,
    pub normal: f64,
}

impl Default for BehaviorThresholds {
    fn default() -> Self {
        Self {
            aggressive: 20.0,
            normal: 200.0,
        }
    }
}

impl BehaviorThresholds {
    pub fn get(&self, behavior: BehaviorType) -> f64 {
        match behavior {
            BehaviorType::Aggressive => self.aggressive,
            BehaviorType::Normal => self.normal,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.aggressive > 0.0 && self.normal > 0.0) {
            return Err(Error::invalid(
                "crossing_threshold",
                "thresholds must be > 0",
            ));
        }
        if self.aggressive >= self.normal {
            return Err(Error::invalid(
                "aggressive_threshold",
                "aggressive threshold must be below the normal threshold",
            ));
        }
        Ok(())
    }
}

/// Model constants. Defaults give cruise speeds of 3 to 5 m/s over the
/// bundled scenario distances.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EscooterParams {
    /// Rider plus scooter, kg.
    pub mass: f64,
    /// Velocity-tracking gain, kg/s.
    pub k_des: f64,
    /// Desired-speed scale, m²/s.
    pub v0: f64,
    /// Softening length of the desired-velocity field, m.
    pub sigma_des: f64,
    /// Repulsion amplitude, N.
    pub a_veh: f64,
    /// Repulsion decay rate, 1/m.
    pub b_veh: f64,
    /// Field-of-view radius, m.
    pub fov_radius: f64,
    /// Field-of-view opening angle, degrees.
    pub fov_angle: f64,
    /// Gap (m) at or above which the scooter commits to crossing.
    pub crossing_threshold: f64,
    /// Speed cap, m/s.
    pub v_max: f64,
    /// Radius used to inflate vehicle footprints for collisions, m.
    pub body_radius: f64,
}

impl Default for EscooterParams {
    fn default() -> Self {
        Self {
            mass: 90.0,
            k_des: 60.0,
            v0: 100.0,
            sigma_des: 1.0,
            a_veh: 300.0,
            b_veh: 1.5,
            fov_radius: 10.0,
            fov_angle: 120.0,
            crossing_threshold: BehaviorThresholds::default().aggressive,
            v_max: 5.0,
            body_radius: 0.4,
        }
    }
}

impl EscooterParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("mass", self.mass),
            ("k_des", self.k_des),
            ("v0", self.v0),
            ("sigma_des", self.sigma_des),
            ("a_veh", self.a_veh),
            ("b_veh", self.b_veh),
            ("fov_radius", self.fov_radius),
            ("fov_angle", self.fov_angle),
            ("crossing_threshold", self.crossing_threshold),
            ("v_max", self.v_max),
            ("body_radius", self.body_radius),
        ];
        for (key, value) in positive {
            if !(value > 0.0) || value.is_nan() {
                return Err(Error::invalid(key, format!("must be > 0, got {value}")));
            }
        }
        if self.fov_angle > 360.0 {
            return Err(Error::invalid("fov_angle", "must not exceed 360 degrees"));
        }
        Ok(())
    }

    pub fn fov_half_angle(&self) -> f64 {
        0.5 * self.fov_angle.to_radians()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EscooterState {
    pub pos: Vec2,
    pub vel: Vec2,
    pub mode: FsmMode,
    /// Gap recorded when the decision fired, if it has.
    pub latched_gap: Option<f64>,
}

impl EscooterState {
    pub fn at_rest(pos: Vec2) -> Self {
        Self {
            pos,
            vel: Vec2::ZERO,
            mode: FsmMode::Approach,
            latched_gap: None,
        }
    }
}

/// Desired velocity field: `v0 (s_des − s) / (|s_des − s|² + σ²)`, clamped
/// to `v_max`.
pub fn desired_velocity(s_esc: Vec2, s_des: Vec2, v0: f64, sigma_des: f64, v_max: f64) -> Vec2 {
    let d = s_des - s_esc;
    let raw = d * (v0 / (d.norm_squared() + sigma_des * sigma_des));
    raw.clamp_norm(v_max)
}

/// Propelling force `k_des (v_des − v_esc)`.
pub fn destination_force(v_des: Vec2, v_esc: Vec2, k_des: f64) -> Vec2 {
    (v_des - v_esc) * k_des
}

/// Superposed exponential repulsion from each influence point.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Repulsion {
    pub force: Vec2,
    /// Set when an influence point coincided with the scooter; that term was
    /// dropped because its direction is undefined.
    pub degenerate_contact: bool,
}

pub fn vehicle_repulsion(
    s_esc: Vec2,
    influence_points: &[Vec2],
    a_veh: f64,
    b_veh: f64,
) -> Repulsion {
    let mut out = Repulsion::default();
    for &p in influence_points {
        let away = s_esc - p;
        let d = away.norm();
        if d == 0.0 {
            out.degenerate_contact = true;
            continue;
        }
        out.force += away * (a_veh * (-b_veh * d).exp() / d);
    }
    out
}

pub fn total_force(f_des: Vec2, f_rep: Vec2) -> Vec2 {
    f_des + f_rep
}

/// Direction the field of view faces: along the velocity when moving,
/// otherwise toward `target`.
pub fn fov_heading(state: &EscooterState, target: Vec2) -> f64 {
    if state.vel.norm() > FOV_SPEED_FLOOR {
        state.vel.angle()
    } else {
        let to_target = target - state.pos;
        if to_target == Vec2::ZERO {
            0.0
        } else {
            to_target.angle()
        }
    }
}

pub fn fov_sector(state: &EscooterState, params: &EscooterParams, target: Vec2) -> Result<Sector> {
    Sector::new(
        state.pos,
        fov_heading(state, target),
        params.fov_radius,
        params.fov_half_angle(),
    )
}

/// Influence points of every vehicle whose footprint touches the field of
/// view. `target` is the current planner target, used to orient the view
/// when the scooter is (nearly) still.
pub fn perceive(
    state: &EscooterState,
    params: &EscooterParams,
    target: Vec2,
    vehicles: &[OrientedRect],
) -> Vec<Vec2> {
    let Ok(sector) = fov_sector(state, params, target) else {
        return Vec::new();
    };
    vehicles
        .iter()
        .filter(|r| sector_contains_rect(&sector, r))
        .map(|r| closest_point_on_rect(state.pos, r))
        .collect()
}

/// One planner transition.
pub fn fsm_step(
    mode: FsmMode,
    gap: f64,
    threshold: f64,
    at_decision_point: bool,
    at_destination: bool,
) -> FsmMode {
    match mode {
        FsmMode::Approach if at_decision_point => {
            if gap >= threshold {
                FsmMode::Move
            } else {
                FsmMode::Wait
            }
        }
        FsmMode::Move if at_destination => FsmMode::Done,
        m => m,
    }
}

/// Semi-implicit Euler step: velocity first, then position with the new
/// velocity. Stationary modes pin the scooter in place.
pub fn integrate_escooter(
    state: &EscooterState,
    f_total: Vec2,
    mass: f64,
    dt: f64,
    v_max: f64,
) -> EscooterState {
    if state.mode.is_stationary() {
        return EscooterState {
            vel: Vec2::ZERO,
            ..*state
        };
    }
    let vel = (state.vel + f_total * (dt / mass)).clamp_norm(v_max);
    EscooterState {
        pos: state.pos + vel * dt,
        vel,
        ..*state
    }
}
