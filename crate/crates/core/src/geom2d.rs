//! Planar vector algebra and the shape predicates used by perception,
//! collision checks and rendering.
//!
//! Frame convention: heading 0 points along +x (East), angles grow
//! counterclockwise, +y is North.

use std::f64::consts::PI;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A 2-vector. Used for positions (m), velocities (m/s) and forces (N).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    #[inline]
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    /// Unit vector pointing along `heading`.
    #[inline]
    pub fn from_heading(heading: f64) -> Self {
        let (s, c) = heading.sin_cos();
        Self::new(c, s)
    }

    #[inline]
    pub fn dot(self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    #[inline]
    pub fn cross(self, other: Vec2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    #[inline]
    pub fn norm_squared(self) -> f64 {
        self.dot(self)
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    #[inline]
    pub fn distance(self, other: Vec2) -> f64 {
        (self - other).norm()
    }

    /// Angle of the vector from +x, in (−π, π].
    #[inline]
    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }

    /// Unit vector in the same direction, or `None` for the zero vector.
    pub fn normalized(self) -> Option<Vec2> {
        let n = self.norm();
        if n > 0.0 && n.is_finite() {
            Some(self / n)
        } else {
            None
        }
    }

    /// Scales the vector down so its magnitude does not exceed `max`.
    /// Direction is preserved; vectors already within the limit are
    /// returned unchanged.
    pub fn clamp_norm(self, max: f64) -> Vec2 {
        let n = self.norm();
        if n > max && n > 0.0 {
            self * (max / n)
        } else {
            self
        }
    }

    /// Rotates counterclockwise by `angle` radians.
    #[inline]
    pub fn rotate(self, angle: f64) -> Vec2 {
        let (s, c) = angle.sin_cos();
        Vec2::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    #[inline]
    fn add(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl AddAssign for Vec2 {
    #[inline]
    fn add_assign(&mut self, rhs: Vec2) {
        self.x += rhs.x;
        self.y += rhs.y;
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    #[inline]
    fn sub(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl SubAssign for Vec2 {
    #[inline]
    fn sub_assign(&mut self, rhs: Vec2) {
        self.x -= rhs.x;
        self.y -= rhs.y;
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    #[inline]
    fn mul(self, rhs: f64) -> Vec2 {
        Vec2::new(self.x * rhs, self.y * rhs)
    }
}

impl Mul<Vec2> for f64 {
    type Output = Vec2;
    #[inline]
    fn mul(self, rhs: Vec2) -> Vec2 {
        rhs * self
    }
}

impl Div<f64> for Vec2 {
    type Output = Vec2;
    #[inline]
    fn div(self, rhs: f64) -> Vec2 {
        Vec2::new(self.x / rhs, self.y / rhs)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    #[inline]
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

impl From<[f64; 2]> for Vec2 {
    fn from([x, y]: [f64; 2]) -> Self {
        Vec2::new(x, y)
    }
}

impl From<Vec2> for [f64; 2] {
    fn from(v: Vec2) -> Self {
        [v.x, v.y]
    }
}

/// Wraps an angle into (−π, π].
pub fn normalize_angle(angle: f64) -> f64 {
    if angle > -PI && angle <= PI {
        return angle;
    }
    let mut a = angle.rem_euclid(2.0 * PI);
    if a > PI {
        a -= 2.0 * PI;
    }
    // rem_euclid can land on exactly -π after the shift for inputs at odd multiples.
    if a <= -PI {
        a += 2.0 * PI;
    }
    a
}

/// Rectangle with arbitrary orientation. `length` runs along `heading`,
/// `width` across it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrientedRect {
    center: Vec2,
    heading: f64,
    length: f64,
    width: f64,
}

impl OrientedRect {
    pub fn new(center: Vec2, heading: f64, length: f64, width: f64) -> Result<Self> {
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::invalid("length", "rectangle length must be > 0"));
        }
        if !(width > 0.0 && width.is_finite()) {
            return Err(Error::invalid("width", "rectangle width must be > 0"));
        }
        if !center.is_finite() || !heading.is_finite() {
            return Err(Error::invalid("center", "rectangle pose must be finite"));
        }
        Ok(Self {
            center,
            heading: normalize_angle(heading),
            length,
            width,
        })
    }

    pub fn center(&self) -> Vec2 {
        self.center
    }

    pub fn heading(&self) -> f64 {
        self.heading
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn half_extents(&self) -> Vec2 {
        Vec2::new(0.5 * self.length, 0.5 * self.width)
    }

    /// Expresses a world point in the rectangle's body frame.
    #[inline]
    pub fn to_local(&self, p: Vec2) -> Vec2 {
        (p - self.center).rotate(-self.heading)
    }

    #[inline]
    pub fn to_world(&self, local: Vec2) -> Vec2 {
        local.rotate(self.heading) + self.center
    }

    /// Corners in counterclockwise order starting at front-left.
    pub fn corners(&self) -> [Vec2; 4] {
        let h = self.half_extents();
        [
            self.to_world(Vec2::new(h.x, h.y)),
            self.to_world(Vec2::new(-h.x, h.y)),
            self.to_world(Vec2::new(-h.x, -h.y)),
            self.to_world(Vec2::new(h.x, -h.y)),
        ]
    }
}

/// Circular sector: every point within `radius` of `apex` whose bearing
/// deviates from `heading` by at most `half_angle`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sector {
    apex: Vec2,
    heading: f64,
    radius: f64,
    half_angle: f64,
}

impl Sector {
    pub fn new(apex: Vec2, heading: f64, radius: f64, half_angle: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::invalid("radius", "sector radius must be > 0"));
        }
        if !(half_angle > 0.0 && half_angle <= PI) {
            return Err(Error::invalid(
                "half_angle",
                "sector half-angle must be in (0, pi]",
            ));
        }
        if !apex.is_finite() || !heading.is_finite() {
            return Err(Error::invalid("apex", "sector pose must be finite"));
        }
        Ok(Self {
            apex,
            heading: normalize_angle(heading),
            radius,
            half_angle,
        })
    }

    pub fn apex(&self) -> Vec2 {
        self.apex
    }

    pub fn heading(&self) -> f64 {
        self.heading
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn half_angle(&self) -> f64 {
        self.half_angle
    }

    /// Radial and angular containment of a single point. The apex itself
    /// counts as inside.
    pub fn contains_point(&self, p: Vec2) -> bool {
        let d = p - self.apex;
        let r2 = d.norm_squared();
        if r2 > self.radius * self.radius {
            return false;
        }
        if r2 == 0.0 {
            return true;
        }
        normalize_angle(d.angle() - self.heading).abs() <= self.half_angle
    }
}

/// Point of `r` (boundary or interior) nearest to `p`. Interior points map
/// to themselves.
pub fn closest_point_on_rect(p: Vec2, r: &OrientedRect) -> Vec2 {
    let local = r.to_local(p);
    let h = r.half_extents();
    let clamped = Vec2::new(local.x.clamp(-h.x, h.x), local.y.clamp(-h.y, h.y));
    if clamped == local {
        return p;
    }
    r.to_world(clamped)
}

/// Distance from `p` to the rectangle, zero when inside.
pub fn distance_to_rect(p: Vec2, r: &OrientedRect) -> f64 {
    p.distance(closest_point_on_rect(p, r))
}

/// Five-point overlap test: true if the centre or any corner of `r` lies in
/// the sector. Overlaps that touch no sample point are missed.
pub fn sector_contains_rect(s: &Sector, r: &OrientedRect) -> bool {
    s.contains_point(r.center()) || r.corners().iter().any(|&c| s.contains_point(c))
}

/// Slack on boundary comparisons, m. Absorbs rounding in `2.3 + 0.4`.
pub const BOUNDARY_EPS: f64 = 1e-9;

/// Whether `p` is inside `r` once each half-extent grows by `inflate`.
/// Points on the inflated boundary count as inside.
pub fn point_in_rect(p: Vec2, r: &OrientedRect, inflate: f64) -> bool {
    debug_assert!(inflate >= 0.0);
    let local = r.to_local(p);
    let h = r.half_extents();
    local.x.abs() <= h.x + inflate + BOUNDARY_EPS && local.y.abs() <= h.y + inflate + BOUNDARY_EPS
}
