//! Scenario documents (TOML) and parameter-grid expansion.
//!
//! A scenario document looks like
//!
//! ```toml
//! map = "intersection"          # or "straight_road"
//! behavior = "aggressive"       # or "normal"
//! decision_point = [4.0, -12.0]  # m
//! lane_width = 4.0              # m, optional
//! t_max = 30.0                  # s, optional
//! dt = 0.1                      # s, optional
//!
//! [escooter]
//! init = [4.0, -30.0]           # m
//! destination = [-15.0, 15.0]   # m
//! fov_radius = 10.0             # m
//! fov_angle = 120.0             # deg
//! # optional overrides: mass, k_des, v0, sigma_des, a_veh, b_veh, v_max,
//! # body_radius, aggressive_threshold, normal_threshold
//!
//! [[vehicles]]
//! id = "veh0"
//! role = "parked"               # parked | follower | crossing | passing
//! position = [6.0, -12.0]       # m
//! heading = 90.0                # deg, counterclockwise from East
//! speed = 0.0                   # m/s
//! # optional: hazard, length, width, lf, lr
//! ```
//!
//! A grid document has one table per swept symbol:
//!
//! ```toml
//! [y_veh0]
//! lower = -16.0
//! upper = -11.0
//! step = 5.0
//! ```

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::escooter::{BehaviorThresholds, BehaviorType, EscooterParams};
use crate::simulation::{
    MapKind, Scenario, Vehicle, DEFAULT_DT, DEFAULT_LANE_WIDTH, DEFAULT_T_MAX,
};
use crate::vehicle::{VehicleRole, VehicleSpec, VehicleState};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub map: MapKind,
    #[serde(default = "default_behavior")]
    pub behavior: BehaviorType,
    pub decision_point: [f64; 2],
    #[serde(default = "default_lane_width")]
    pub lane_width: f64,
    #[serde(default = "default_t_max")]
    pub t_max: f64,
    #[serde(default = "default_dt")]
    pub dt: f64,
    pub escooter: EscooterSection,
    #[serde(default)]
    pub vehicles: Vec<VehicleEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EscooterSection {
    pub init: [f64; 2],
    pub destination: [f64; 2],
    pub fov_radius: f64,
    /// Degrees.
    pub fov_angle: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mass: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_des: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma_des: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a_veh: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b_veh: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub body_radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub aggressive_threshold: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normal_threshold: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VehicleEntry {
    pub id: String,
    pub role: VehicleRole,
    pub position: [f64; 2],
    /// Degrees.
    pub heading: f64,
    #[serde(default)]
    pub speed: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hazard: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub length: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub width: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lf: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lr: Option<f64>,
}

fn default_behavior() -> BehaviorType {
    BehaviorType::Aggressive
}
fn default_lane_width() -> f64 {
    DEFAULT_LANE_WIDTH
}
fn default_t_max() -> f64 {
    DEFAULT_T_MAX
}
fn default_dt() -> f64 {
    DEFAULT_DT
}

impl ScenarioFile {
    pub fn into_scenario(self) -> Result<Scenario> {
        let defaults = EscooterParams::default();
        let e = &self.escooter;
        let thresholds = BehaviorThresholds {
            aggressive: e
                .aggressive_threshold
                .unwrap_or(BehaviorThresholds::default().aggressive),
            normal: e
                .normal_threshold
                .unwrap_or(BehaviorThresholds::default().normal),
        };
        let params = EscooterParams {
            mass: e.mass.unwrap_or(defaults.mass),
            k_des: e.k_des.unwrap_or(defaults.k_des),
            v0: e.v0.unwrap_or(defaults.v0),
            sigma_des: e.sigma_des.unwrap_or(defaults.sigma_des),
            a_veh: e.a_veh.unwrap_or(defaults.a_veh),
            b_veh: e.b_veh.unwrap_or(defaults.b_veh),
            fov_radius: e.fov_radius,
            fov_angle: e.fov_angle,
            crossing_threshold: thresholds.get(self.behavior),
            v_max: e.v_max.unwrap_or(defaults.v_max),
            body_radius: e.body_radius.unwrap_or(defaults.body_radius),
        };
        let vehicles = self
            .vehicles
            .iter()
            .map(|v| {
                let base = VehicleSpec::for_role(v.role);
                let spec = VehicleSpec {
                    length: v.length.unwrap_or(base.length),
                    width: v.width.unwrap_or(base.width),
                    lf: v.lf.unwrap_or(base.lf),
                    lr: v.lr.unwrap_or(base.lr),
                    hazard: v.hazard.unwrap_or(base.hazard),
                    role: v.role,
                };
                let state = VehicleState::new(
                    v.position[0],
                    v.position[1],
                    v.heading.to_radians(),
                    v.speed,
                );
                Vehicle::new(v.id.clone(), state, spec)
            })
            .collect();
        let sc = Scenario {
            map_kind: self.map,
            lane_width: self.lane_width,
            vehicles,
            escooter_init: e.init.into(),
            destination: e.destination.into(),
            decision_point: self.decision_point.into(),
            escooter_params: params,
            thresholds,
            behavior: self.behavior,
            t_max: self.t_max,
            dt: self.dt,
        };
        sc.validate()?;
        Ok(sc)
    }

    /// Document describing `sc`. Every model constant is written out
    /// explicitly so the file does not depend on library defaults.
    pub fn from_scenario(sc: &Scenario) -> Self {
        let p = &sc.escooter_params;
        ScenarioFile {
            map: sc.map_kind,
            behavior: sc.behavior,
            decision_point: sc.decision_point.into(),
            lane_width: sc.lane_width,
            t_max: sc.t_max,
            dt: sc.dt,
            escooter: EscooterSection {
                init: sc.escooter_init.into(),
                destination: sc.destination.into(),
                fov_radius: p.fov_radius,
                fov_angle: p.fov_angle,
                mass: Some(p.mass),
                k_des: Some(p.k_des),
                v0: Some(p.v0),
                sigma_des: Some(p.sigma_des),
                a_veh: Some(p.a_veh),
                b_veh: Some(p.b_veh),
                v_max: Some(p.v_max),
                body_radius: Some(p.body_radius),
                aggressive_threshold: Some(sc.thresholds.aggressive),
                normal_threshold: Some(sc.thresholds.normal),
            },
            vehicles: sc
                .vehicles
                .iter()
                .map(|v| VehicleEntry {
                    id: v.id.clone(),
                    role: v.spec.role,
                    position: [v.state.x, v.state.y],
                    heading: v.state.psi.to_degrees(),
                    speed: v.state.v,
                    hazard: Some(v.spec.hazard),
                    length: Some(v.spec.length),
                    width: Some(v.spec.width),
                    lf: Some(v.spec.lf),
                    lr: Some(v.spec.lr),
                })
                .collect(),
        }
    }
}

fn parse_error(source_name: &str, err: toml::de::Error) -> Error {
    Error::Parse {
        source_name: source_name.to_string(),
        message: err.to_string().trim_end().to_string(),
    }
}

/// Parses and validates a scenario document. `source_name` labels errors.
pub fn load_scenario_str(doc: &str, source_name: &str) -> Result<Scenario> {
    let file: ScenarioFile = toml::from_str(doc).map_err(|e| parse_error(source_name, e))?;
    file.into_scenario()
}

pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario> {
    let path = path.as_ref();
    let doc = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    load_scenario_str(&doc, &path.display().to_string())
}

pub fn serialize_scenario(sc: &Scenario) -> String {
    toml::to_string(&ScenarioFile::from_scenario(sc)).expect("scenario documents always serialize")
}

/// Sweepable symbols, in expansion order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GridSymbol {
    YVeh0,
    YVeh1,
    YVeh2Init,
    XVeh2Init,
    XVeh3Init,
    VVeh2,
    VVeh3,
    YEscInit,
    XDes,
    YDes,
    RFov,
    AlphaFov,
}

impl GridSymbol {
    /// Expansion order: the first symbol varies slowest.
    pub const ORDER: [GridSymbol; 12] = [
        GridSymbol::YVeh0,
        GridSymbol::YVeh1,
        GridSymbol::YVeh2Init,
        GridSymbol::XVeh2Init,
        GridSymbol::XVeh3Init,
        GridSymbol::VVeh2,
        GridSymbol::VVeh3,
        GridSymbol::YEscInit,
        GridSymbol::XDes,
        GridSymbol::YDes,
        GridSymbol::RFov,
        GridSymbol::AlphaFov,
    ];

    /// Column order used in result files.
    pub const CSV_ORDER: [GridSymbol; 12] = [
        GridSymbol::YVeh0,
        GridSymbol::YVeh1,
        GridSymbol::XVeh2Init,
        GridSymbol::YVeh2Init,
        GridSymbol::XVeh3Init,
        GridSymbol::VVeh2,
        GridSymbol::VVeh3,
        GridSymbol::YEscInit,
        GridSymbol::XDes,
        GridSymbol::YDes,
        GridSymbol::RFov,
        GridSymbol::AlphaFov,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GridSymbol::YVeh0 => "y_veh0",
            GridSymbol::YVeh1 => "y_veh1",
            GridSymbol::YVeh2Init => "y_veh2_init",
            GridSymbol::XVeh2Init => "x_veh2_init",
            GridSymbol::XVeh3Init => "x_veh3_init",
            GridSymbol::VVeh2 => "v_veh2",
            GridSymbol::VVeh3 => "v_veh3",
            GridSymbol::YEscInit => "y_esc_init",
            GridSymbol::XDes => "x_des",
            GridSymbol::YDes => "y_des",
            GridSymbol::RFov => "r_fov",
            GridSymbol::AlphaFov => "alpha_fov",
        }
    }

    fn vehicle_id(self) -> Option<&'static str> {
        match self {
            GridSymbol::YVeh0 => Some("veh0"),
            GridSymbol::YVeh1 => Some("veh1"),
            GridSymbol::YVeh2Init | GridSymbol::XVeh2Init | GridSymbol::VVeh2 => Some("veh2"),
            GridSymbol::XVeh3Init | GridSymbol::VVeh3 => Some("veh3"),
            _ => None,
        }
    }

    fn applies_to(self, map: MapKind) -> bool {
        match map {
            MapKind::Intersection => !matches!(self, GridSymbol::YVeh2Init),
            MapKind::StraightRoad => !matches!(
                self,
                GridSymbol::YVeh0
                    | GridSymbol::YVeh1
                    | GridSymbol::XVeh2Init
                    | GridSymbol::XVeh3Init
                    | GridSymbol::VVeh3
            ),
        }
    }

    /// Current value of the symbol in `sc`, if the scenario has it.
    pub fn get(self, sc: &Scenario) -> Option<f64> {
        if let Some(id) = self.vehicle_id() {
            let v = sc.vehicle(id)?;
            return Some(match self {
                GridSymbol::YVeh0 | GridSymbol::YVeh1 | GridSymbol::YVeh2Init => v.state.y,
                GridSymbol::XVeh2Init | GridSymbol::XVeh3Init => v.state.x,
                _ => v.state.v,
            });
        }
        Some(match self {
            GridSymbol::YEscInit => sc.escooter_init.y,
            GridSymbol::XDes => sc.destination.x,
            GridSymbol::YDes => sc.destination.y,
            GridSymbol::RFov => sc.escooter_params.fov_radius,
            GridSymbol::AlphaFov => sc.escooter_params.fov_angle,
            _ => unreachable!("vehicle symbols handled above"),
        })
    }

    fn set(self, sc: &mut Scenario, value: f64) {
        if let Some(id) = self.vehicle_id() {
            let v = sc
                .vehicle_mut(id)
                .expect("applicability checked before expansion");
            match self {
                GridSymbol::YVeh0 | GridSymbol::YVeh1 | GridSymbol::YVeh2Init => v.state.y = value,
                GridSymbol::XVeh2Init | GridSymbol::XVeh3Init => v.state.x = value,
                _ => v.state.v = value,
            }
            return;
        }
        match self {
            GridSymbol::YEscInit => sc.escooter_init.y = value,
            GridSymbol::XDes => sc.destination.x = value,
            GridSymbol::YDes => sc.destination.y = value,
            GridSymbol::RFov => sc.escooter_params.fov_radius = value,
            GridSymbol::AlphaFov => sc.escooter_params.fov_angle = value,
            _ => unreachable!("vehicle symbols handled above"),
        }
    }
}

impl fmt::Display for GridSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GridSymbol {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        GridSymbol::ORDER
            .iter()
            .copied()
            .find(|g| g.name() == s)
            .ok_or_else(|| Error::invalid(s, "unknown grid symbol"))
    }
}

/// Inclusive arithmetic progression `lower, lower + step, ..., <= upper`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridRange {
    pub lower: f64,
    pub upper: f64,
    pub step: f64,
}

impl GridRange {
    pub fn new(lower: f64, upper: f64, step: f64) -> Result<Self> {
        let r = Self { lower, upper, step };
        r.validate("range")?;
        Ok(r)
    }

    fn validate(&self, key: &str) -> Result<()> {
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(Error::invalid(key, "step must be > 0"));
        }
        if !(self.lower <= self.upper && self.lower.is_finite() && self.upper.is_finite()) {
            return Err(Error::invalid(key, "lower must not exceed upper"));
        }
        Ok(())
    }

    pub fn count(&self) -> usize {
        // Relative slack keeps exact endpoints such as 60..=120 by 30.
        ((self.upper - self.lower) / self.step * (1.0 + 1e-12) + 1e-9).floor() as usize + 1
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.count())
            .map(|i| self.lower + i as f64 * self.step)
            .collect()
    }
}

/// Ranges keyed by symbol; symbols absent from the grid keep the base
/// scenario's value.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ParameterGrid {
    entries: Vec<(GridSymbol, GridRange)>,
}

impl ParameterGrid {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds or replaces the range for `symbol`.
    pub fn with(mut self, symbol: GridSymbol, range: GridRange) -> Self {
        self.set(symbol, range);
        self
    }

    pub fn set(&mut self, symbol: GridSymbol, range: GridRange) {
        match self.entries.iter_mut().find(|(s, _)| *s == symbol) {
            Some(e) => e.1 = range,
            None => self.entries.push((symbol, range)),
        }
        self.entries.sort_by_key(|(s, _)| *s);
    }

    pub fn get(&self, symbol: GridSymbol) -> Option<&GridRange> {
        self.entries
            .iter()
            .find(|(s, _)| *s == symbol)
            .map(|(_, r)| r)
    }

    /// Entries in expansion order.
    pub fn entries(&self) -> &[(GridSymbol, GridRange)] {
        &self.entries
    }

    pub fn cardinality(&self) -> usize {
        self.entries.iter().map(|(_, r)| r.count()).product()
    }

    pub fn from_toml_str(doc: &str, source_name: &str) -> Result<Self> {
        let table: std::collections::BTreeMap<String, GridRange> =
            toml::from_str(doc).map_err(|e| parse_error(source_name, e))?;
        let mut grid = ParameterGrid::new();
        for (name, range) in table {
            let symbol: GridSymbol = name.parse()?;
            range.validate(&name)?;
            grid.set(symbol, range);
        }
        Ok(grid)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let doc = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&doc, &path.display().to_string())
    }
}

/// One expanded grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct GridPoint {
    pub scenario: Scenario,
    /// Swept values in expansion order.
    pub values: Vec<(GridSymbol, f64)>,
}

/// Cartesian product of the grid over `base`. The first symbol in
/// [`GridSymbol::ORDER`] varies slowest; values ascend.
pub fn expand_grid(base: &Scenario, grid: &ParameterGrid) -> Result<Vec<GridPoint>> {
    for (symbol, _) in grid.entries() {
        let present = symbol
            .vehicle_id()
            .is_none_or(|id| base.vehicle(id).is_some());
        if !symbol.applies_to(base.map_kind) || !present {
            let context = if present {
                base.map_kind.to_string()
            } else {
                format!(
                    "{} (no {})",
                    base.map_kind,
                    symbol.vehicle_id().unwrap_or("")
                )
            };
            return Err(Error::InapplicableSymbol {
                symbol: symbol.name().to_string(),
                context,
            });
        }
    }
    let axes: Vec<(GridSymbol, Vec<f64>)> = grid
        .entries()
        .iter()
        .map(|(s, r)| (*s, r.values()))
        .collect();
    let total = grid.cardinality();
    let mut out = Vec::with_capacity(total);
    let mut idx = vec![0usize; axes.len()];
    for _ in 0..total {
        let mut sc = base.clone();
        let mut values = Vec::with_capacity(axes.len());
        for ((symbol, vals), &i) in axes.iter().zip(&idx) {
            symbol.set(&mut sc, vals[i]);
            values.push((*symbol, vals[i]));
        }
        sc.validate()?;
        out.push(GridPoint {
            scenario: sc,
            values,
        });
        // Odometer increment, last axis fastest.
        for k in (0..axes.len()).rev() {
            idx[k] += 1;
            if idx[k] < axes[k].1.len() {
                break;
            }
            idx[k] = 0;
        }
    }
    Ok(out)
}

/// The swept ranges used for the three reference use cases.
pub mod reference_grids {
    use super::{GridRange, GridSymbol, ParameterGrid};

    fn r(lower: f64, upper: f64, step: f64) -> GridRange {
        GridRange { lower, upper, step }
    }

    pub fn intersection_one_vehicle() -> ParameterGrid {
        ParameterGrid::new()
            .with(GridSymbol::YVeh0, r(-16.0, -11.0, 5.0))
            .with(GridSymbol::YVeh1, r(-16.0, -11.0, 5.0))
            .with(GridSymbol::XVeh2Init, r(-85.0, -65.0, 10.0))
            .with(GridSymbol::VVeh2, r(10.0, 15.0, 5.0))
            .with(GridSymbol::YEscInit, r(-30.0, -20.0, 5.0))
            .with(GridSymbol::XDes, r(-15.0, -10.0, 5.0))
            .with(GridSymbol::YDes, r(12.0, 17.0, 5.0))
            .with(GridSymbol::RFov, r(10.0, 20.0, 5.0))
            .with(GridSymbol::AlphaFov, r(60.0, 120.0, 30.0))
    }

    pub fn intersection_two_vehicle() -> ParameterGrid {
        intersection_one_vehicle()
            .with(GridSymbol::XVeh3Init, r(75.0, 95.0, 10.0))
            .with(GridSymbol::VVeh3, r(10.0, 15.0, 5.0))
    }

    pub fn straight_road() -> ParameterGrid {
        ParameterGrid::new()
            .with(GridSymbol::YVeh2Init, r(-75.0, -55.0, 5.0))
            .with(GridSymbol::VVeh2, r(10.0, 15.0, 2.5))
            .with(GridSymbol::YEscInit, r(-15.0, -10.0, 2.5))
            .with(GridSymbol::XDes, r(4.0, 9.0, 1.0))
            .with(GridSymbol::YDes, r(17.0, 22.0, 1.0))
            .with(GridSymbol::RFov, r(10.0, 20.0, 5.0))
            .with(GridSymbol::AlphaFov, r(60.0, 120.0, 30.0))
    }
}
