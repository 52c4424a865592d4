//! Kinematic bicycle vehicles driven along fixed straight trajectories.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom2d::{normalize_angle, OrientedRect, Vec2};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VehicleState {
    pub x: f64,
    pub y: f64,
    /// Heading, rad.
    pub psi: f64,
    /// Speed, m/s.
    pub v: f64,
}

impl VehicleState {
    pub fn new(x: f64, y: f64, psi: f64, v: f64) -> Self {
        Self {
            x,
            y,
            psi: normalize_angle(psi),
            v,
        }
    }

    pub fn position(&self) -> Vec2 {
        Vec2::new(self.x, self.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VehicleRole {
    Parked,
    Follower,
    Crossing,
    Passing,
}

impl VehicleRole {
    pub fn as_str(self) -> &'static str {
        match self {
            VehicleRole::Parked => "parked",
            VehicleRole::Follower => "follower",
            VehicleRole::Crossing => "crossing",
            VehicleRole::Passing => "passing",
        }
    }

    /// Crossing and passing vehicles count toward the gap test by default.
    pub fn default_hazard(self) -> bool {
        matches!(self, VehicleRole::Crossing | VehicleRole::Passing)
    }

    pub fn is_moving(self) -> bool {
        !matches!(self, VehicleRole::Parked)
    }
}

impl fmt::Display for VehicleRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for VehicleRole {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "parked" => Ok(VehicleRole::Parked),
            "follower" => Ok(VehicleRole::Follower),
            "crossing" => Ok(VehicleRole::Crossing),
            "passing" => Ok(VehicleRole::Passing),
            other => Err(Error::invalid(
                "role",
                format!("unknown vehicle role `{other}`"),
            )),
        }
    }
}

/// Body dimensions and behavioral tags of a vehicle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VehicleSpec {
    pub length: f64,
    pub width: f64,
    /// CG to front axle, m.
    pub lf: f64,
    /// CG to rear axle, m.
    pub lr: f64,
    pub hazard: bool,
    pub role: VehicleRole,
}

impl Default for VehicleSpec {
    fn default() -> Self {
        Self::for_role(VehicleRole::Parked)
    }
}

impl VehicleSpec {
    pub const DEFAULT_LENGTH: f64 = 4.6;
    pub const DEFAULT_WIDTH: f64 = 1.8;
    pub const DEFAULT_AXLE_OFFSET: f64 = 1.25;

    /// Passenger car of the given role with its default hazard flag.
    pub fn for_role(role: VehicleRole) -> Self {
        Self {
            length: Self::DEFAULT_LENGTH,
            width: Self::DEFAULT_WIDTH,
            lf: Self::DEFAULT_AXLE_OFFSET,
            lr: Self::DEFAULT_AXLE_OFFSET,
            hazard: role.default_hazard(),
            role,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.width > 0.0) {
            return Err(Error::invalid("width", "vehicle width must be > 0"));
        }
        if !(self.lf > 0.0 && self.lr > 0.0) {
            return Err(Error::invalid("lf", "axle offsets must be > 0"));
        }
        if !(self.length > self.lf + self.lr) {
            return Err(Error::invalid(
                "length",
                "vehicle length must exceed lf + lr",
            ));
        }
        Ok(())
    }
}

/// One explicit Euler step of the kinematic bicycle model (CG reference):
///
/// ```text
/// β = atan(lr / (lf + lr) · tan δ)
/// ẋ = v cos(ψ + β),  ẏ = v sin(ψ + β),  ψ̇ = v / lr · sin β,  v̇ = a
/// ```
///
/// Speed is floored at zero; the vehicle does not reverse.
pub fn bicycle_step(
    s: &VehicleState,
    accel: f64,
    steer: f64,
    lf: f64,
    lr: f64,
    dt: f64,
) -> Result<VehicleState> {
    if !(steer.abs() < FRAC_PI_2) {
        return Err(Error::InvalidSteer(steer));
    }
    if !(dt > 0.0) {
        return Err(Error::invalid("dt", "time step must be > 0"));
    }
    let beta = (lr / (lf + lr) * steer.tan()).atan();
    let (sin_h, cos_h) = (s.psi + beta).sin_cos();
    Ok(VehicleState {
        x: s.x + s.v * cos_h * dt,
        y: s.y + s.v * sin_h * dt,
        psi: normalize_angle(s.psi + s.v / lr * beta.sin() * dt),
        v: (s.v + accel * dt).max(0.0),
    })
}

/// Vehicles hold their initial speed and heading: zero acceleration, zero
/// steering.
pub fn constant_speed_controller(_s: &VehicleState) -> (f64, f64) {
    (0.0, 0.0)
}

pub fn footprint(s: &VehicleState, spec: &VehicleSpec) -> Result<OrientedRect> {
    OrientedRect::new(s.position(), s.psi, spec.length, spec.width)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn straight_step() {
        let s = VehicleState::new(0.0, 0.0, 0.0, 10.0);
        let n = bicycle_step(&s, 0.0, 0.0, 1.25, 1.25, 0.1).unwrap();
        assert_eq!(n.x, 1.0);
        assert_eq!(n.y, 0.0);
        assert_eq!(n.psi, 0.0);
        assert_eq!(n.v, 10.0);
    }

    #[test]
    fn steered_step_matches_hand_evaluation() {
        let s = VehicleState::new(0.0, 0.0, 0.0, 10.0);
        let n = bicycle_step(&s, 0.0, 0.1, 1.25, 1.25, 0.1).unwrap();
        let beta = (0.5 * 0.1f64.tan()).atan();
        assert!((beta - 0.050125).abs() < 1e-6);
        assert!((n.x - 0.9987).abs() < 1e-4);
        assert!((n.y - 0.05010).abs() < 1e-5);
        assert!((n.psi - 0.04008).abs() < 1e-5);
    }

    #[test]
    fn at_rest_only_speed_changes() {
        let s = VehicleState::new(3.0, -2.0, 0.7, 0.0);
        let n = bicycle_step(&s, 0.0, 0.4, 1.25, 1.25, 0.1).unwrap();
        assert_eq!(n, s);
        let n = bicycle_step(&s, 2.0, 0.4, 1.25, 1.25, 0.1).unwrap();
        assert_eq!((n.x, n.y, n.psi), (s.x, s.y, s.psi));
        assert!((n.v - 0.2).abs() < 1e-15);
    }

    #[test]
    fn invalid_steer_rejected() {
        let s = VehicleState::new(0.0, 0.0, 0.0, 1.0);
        assert!(matches!(
            bicycle_step(&s, 0.0, FRAC_PI_2, 1.0, 1.0, 0.1),
            Err(Error::InvalidSteer(_))
        ));
        assert!(bicycle_step(&s, 0.0, -2.0, 1.0, 1.0, 0.1).is_err());
    }

    #[test]
    fn controller_is_inert() {
        assert_eq!(
            constant_speed_controller(&VehicleState::new(1.0, 2.0, 3.0, 4.0)),
            (0.0, 0.0)
        );
    }

    #[test]
    fn footprint_examples() {
        let spec = VehicleSpec::default();
        let r = footprint(&VehicleState::new(6.0, -12.0, FRAC_PI_2, 0.0), &spec).unwrap();
        assert_eq!((r.length(), r.width()), (4.6, 1.8));
        let along = Vec2::from_heading(r.heading());
        assert!((along.y - 1.0).abs() < 1e-12);

        let r = footprint(&VehicleState::new(0.0, 0.0, 0.0, 0.0), &spec).unwrap();
        let mut corners: Vec<_> = r.corners().iter().map(|c| (c.x, c.y)).collect();
        corners.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(
            corners,
            vec![(-2.3, -0.9), (-2.3, 0.9), (2.3, -0.9), (2.3, 0.9)]
        );

        let bad = VehicleSpec {
            length: 0.0,
            ..spec
        };
        assert!(bad.validate().is_err());
    }
}
