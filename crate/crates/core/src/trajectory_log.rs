//! Episode trajectories as long-format CSV, one row per agent per step.
//!
//! Columns: `t_s, agent, role, x_m, y_m, heading_rad, speed_mps, length_m,
//! width_m, mode, fov_radius_m, fov_angle_deg`. The `role` column decides how
//! a row is read:
//!
//! | role | meaning |
//! |------|---------|
//! | `intersection`, `straight_road` | map row; `length_m` is the lane width |
//! | `destination` | destination star at `x_m, y_m` |
//! | `escooter` | rider; `heading_rad` is the field-of-view heading |
//! | `parked`, `follower`, `crossing`, `passing` | vehicle pose and footprint |
//! | `collision` | collision marker for the step with the same `t_s` |
//!
//! Unused columns are left blank.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::escooter::FsmMode;
use crate::geom2d::Vec2;
use crate::simulation::{EpisodeResult, MapKind, Outcome, Scenario};
use crate::vehicle::{VehicleRole, VehicleState};

pub const LOG_HEADER: [&str; 12] = [
    "t_s",
    "agent",
    "role",
    "x_m",
    "y_m",
    "heading_rad",
    "speed_mps",
    "length_m",
    "width_m",
    "mode",
    "fov_radius_m",
    "fov_angle_deg",
];

#[derive(Debug, Clone, PartialEq)]
pub struct EscooterView {
    pub pos: Vec2,
    pub fov_heading: f64,
    pub speed: f64,
    pub mode: FsmMode,
    pub fov_radius: f64,
    /// Degrees.
    pub fov_angle: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VehicleView {
    pub id: String,
    pub role: VehicleRole,
    pub state: VehicleState,
    pub length: f64,
    pub width: f64,
}

/// Everything needed to draw one instant of an episode.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    pub map_kind: MapKind,
    pub lane_width: f64,
    pub escooter: Option<EscooterView>,
    pub vehicles: Vec<VehicleView>,
    pub destination: Option<Vec2>,
    pub collision: bool,
}

impl Snapshot {
    /// Lanes only.
    pub fn empty(map_kind: MapKind, lane_width: f64) -> Self {
        Self {
            t: 0.0,
            map_kind,
            lane_width,
            escooter: None,
            vehicles: Vec::new(),
            destination: None,
            collision: false,
        }
    }

    /// The world of `sc` before the first tick.
    pub fn initial(sc: &Scenario) -> Self {
        let states: Vec<_> = sc.vehicles.iter().map(|v| v.state).collect();
        let esc = crate::escooter::EscooterState::at_rest(sc.escooter_init);
        let fov = crate::escooter::fov_heading(&esc, sc.decision_point);
        Self::build(sc, 0.0, &esc, fov, &states, false)
    }

    fn build(
        sc: &Scenario,
        t: f64,
        esc: &crate::escooter::EscooterState,
        fov_heading: f64,
        states: &[VehicleState],
        collision: bool,
    ) -> Self {
        let p = &sc.escooter_params;
        Self {
            t,
            map_kind: sc.map_kind,
            lane_width: sc.lane_width,
            escooter: Some(EscooterView {
                pos: esc.pos,
                fov_heading,
                speed: esc.vel.norm(),
                mode: esc.mode,
                fov_radius: p.fov_radius,
                fov_angle: p.fov_angle,
            }),
            vehicles: sc
                .vehicles
                .iter()
                .zip(states)
                .map(|(v, s)| VehicleView {
                    id: v.id.clone(),
                    role: v.spec.role,
                    state: *s,
                    length: v.spec.length,
                    width: v.spec.width,
                })
                .collect(),
            destination: Some(sc.destination),
            collision,
        }
    }
}

/// Time-ordered snapshots of one episode.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryLog {
    pub frames: Vec<Snapshot>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
struct Row {
    t_s: f64,
    agent: String,
    role: String,
    x_m: Option<f64>,
    y_m: Option<f64>,
    heading_rad: Option<f64>,
    speed_mps: Option<f64>,
    length_m: Option<f64>,
    width_m: Option<f64>,
    mode: Option<String>,
    fov_radius_m: Option<f64>,
    fov_angle_deg: Option<f64>,
}

const DESTINATION: &str = "destination";
const ESCOOTER: &str = "escooter";
const COLLISION: &str = "collision";

impl TrajectoryLog {
    /// Builds the log of a recorded episode of `sc`.
    pub fn from_episode(sc: &Scenario, result: &EpisodeResult) -> Result<Self> {
        if result.trajectory.is_empty() {
            return Err(Error::Empty("episode has no recorded trajectory"));
        }
        let last = result.trajectory.len() - 1;
        let frames = result
            .trajectory
            .iter()
            .enumerate()
            .map(|(i, step)| {
                let hit = i == last && result.outcome == Outcome::Collision;
                Snapshot::build(
                    sc,
                    step.t,
                    &step.escooter,
                    step.fov_heading,
                    &step.vehicles,
                    hit,
                )
            })
            .collect();
        Ok(Self { frames })
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        self.frames.iter().map(|f| f.t)
    }

    /// Logged step closest to `t`. Times more than half a step outside the
    /// logged range are rejected. Ties go to the earlier step.
    pub fn nearest(&self, t: f64) -> Result<&Snapshot> {
        let (first, last) = match (self.frames.first(), self.frames.last()) {
            (Some(f), Some(l)) => (f.t, l.t),
            _ => return Err(Error::Empty("trajectory log has no frames")),
        };
        let half_step = if self.frames.len() > 1 {
            0.5 * (self.frames[1].t - first)
        } else {
            0.0
        };
        let slack = half_step + 1e-9;
        if !t.is_finite() || t < first - slack || t > last + slack {
            return Err(Error::TimeOutOfRange(t));
        }
        let mut best = &self.frames[0];
        for f in &self.frames[1..] {
            if (f.t - t).abs() < (best.t - t).abs() {
                best = f;
            }
        }
        Ok(best)
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        for f in &self.frames {
            out.serialize(Row {
                t_s: f.t,
                agent: "map".into(),
                role: f.map_kind.as_str().into(),
                length_m: Some(f.lane_width),
                ..Row::default()
            })?;
            if let Some(d) = f.destination {
                out.serialize(Row {
                    t_s: f.t,
                    agent: DESTINATION.into(),
                    role: DESTINATION.into(),
                    x_m: Some(d.x),
                    y_m: Some(d.y),
                    ..Row::default()
                })?;
            }
            if let Some(e) = &f.escooter {
                out.serialize(Row {
                    t_s: f.t,
                    agent: ESCOOTER.into(),
                    role: ESCOOTER.into(),
                    x_m: Some(e.pos.x),
                    y_m: Some(e.pos.y),
                    heading_rad: Some(e.fov_heading),
                    speed_mps: Some(e.speed),
                    mode: Some(e.mode.as_str().into()),
                    fov_radius_m: Some(e.fov_radius),
                    fov_angle_deg: Some(e.fov_angle),
                    ..Row::default()
                })?;
            }
            for v in &f.vehicles {
                out.serialize(Row {
                    t_s: f.t,
                    agent: v.id.clone(),
                    role: v.role.as_str().into(),
                    x_m: Some(v.state.x),
                    y_m: Some(v.state.y),
                    heading_rad: Some(v.state.psi),
                    speed_mps: Some(v.state.v),
                    length_m: Some(v.length),
                    width_m: Some(v.width),
                    ..Row::default()
                })?;
            }
            if f.collision {
                out.serialize(Row {
                    t_s: f.t,
                    agent: "event".into(),
                    role: COLLISION.into(),
                    x_m: f.escooter.as_ref().map(|e| e.pos.x),
                    y_m: f.escooter.as_ref().map(|e| e.pos.y),
                    ..Row::default()
                })?;
            }
        }
        out.flush().map_err(|e| Error::io("<csv writer>", e))?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is UTF-8"))
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_csv(file)
    }

    /// Parses a log; `source_name` is used in error messages.
    pub fn read_csv<R: Read>(r: R, source_name: &str) -> Result<Self> {
        let parse_err = |line: Option<u64>, message: String| Error::Parse {
            source_name: match line {
                Some(l) => format!("{source_name}, line {l}"),
                None => source_name.to_string(),
            },
            message,
        };
        let mut reader = csv::Reader::from_reader(r);
        let header = reader.headers()?.clone();
        if header.iter().ne(LOG_HEADER.iter().copied()) {
            return Err(parse_err(
                Some(1),
                format!("expected header {}", LOG_HEADER.join(",")),
            ));
        }

        let mut frames: Vec<Snapshot> = Vec::new();
        let mut map: Option<(MapKind, f64)> = None;
        for rec in reader.records() {
            let rec = rec?;
            let line = rec.position().map(|p| p.line());
            let row: Row = rec.deserialize(Some(&header))?;
            let need = |v: Option<f64>, col: &str| {
                v.ok_or_else(|| {
                    parse_err(
                        line,
                        format!("{} row `{}` lacks {col}", row.role, row.agent),
                    )
                })
            };

            let starts_frame = frames.last().is_none_or(|f| f.t != row.t_s);
            if starts_frame {
                if frames.last().is_some_and(|f| row.t_s < f.t) {
                    return Err(parse_err(line, format!("time {} goes backwards", row.t_s)));
                }
                let (kind, lane) = match (row.role.parse::<MapKind>(), map) {
                    (Ok(kind), _) => (kind, need(row.length_m, "length_m")?),
                    (Err(_), Some(m)) => m,
                    (Err(_), None) => {
                        return Err(parse_err(line, "first step has no map row".into()));
                    }
                };
                frames.push(Snapshot {
                    t: row.t_s,
                    ..Snapshot::empty(kind, lane)
                });
            }
            let frame = frames.last_mut().expect("frame pushed above");

            match row.role.as_str() {
                DESTINATION => {
                    frame.destination =
                        Some(Vec2::new(need(row.x_m, "x_m")?, need(row.y_m, "y_m")?))
                }
                ESCOOTER => {
                    let mode = row
                        .mode
                        .as_deref()
                        .ok_or_else(|| parse_err(line, "escooter row lacks mode".into()))?
                        .parse()?;
                    frame.escooter = Some(EscooterView {
                        pos: Vec2::new(need(row.x_m, "x_m")?, need(row.y_m, "y_m")?),
                        fov_heading: need(row.heading_rad, "heading_rad")?,
                        speed: need(row.speed_mps, "speed_mps")?,
                        mode,
                        fov_radius: need(row.fov_radius_m, "fov_radius_m")?,
                        fov_angle: need(row.fov_angle_deg, "fov_angle_deg")?,
                    });
                }
                COLLISION => frame.collision = true,
                role => {
                    if let Ok(kind) = role.parse::<MapKind>() {
                        let lane = need(row.length_m, "length_m")?;
                        frame.map_kind = kind;
                        frame.lane_width = lane;
                        map = Some((kind, lane));
                        continue;
                    }
                    let role: VehicleRole = role
                        .parse()
                        .map_err(|_| parse_err(line, format!("unknown role `{role}`")))?;
                    frame.vehicles.push(VehicleView {
                        id: row.agent.clone(),
                        role,
                        state: VehicleState {
                            x: need(row.x_m, "x_m")?,
                            y: need(row.y_m, "y_m")?,
                            psi: need(row.heading_rad, "heading_rad")?,
                            v: need(row.speed_mps, "speed_mps")?,
                        },
                        length: need(row.length_m, "length_m")?,
                        width: need(row.width_m, "width_m")?,
                    });
                }
            }
        }
        if frames.is_empty() {
            return Err(Error::Empty("trajectory log has no frames"));
        }
        Ok(Self { frames })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_csv(file, &path.display().to_string())
    }
}
