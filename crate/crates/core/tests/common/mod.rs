//! Helpers shared by the integration tests.
#![allow(dead_code)]

use vei_core::escooter::{BehaviorType, FsmMode};
use vei_core::geom2d::Vec2;
use vei_core::presets;
use vei_core::simulation::{EpisodeResult, Scenario, ARRIVAL_TOLERANCE};

/// Raw knobs for a perturbed preset, kept plain so proptest and seeded RNGs
/// can both produce them.
#[derive(Debug, Clone, Copy)]
pub struct Jitter {
    pub preset: usize,
    pub aggressive: bool,
    pub threshold: f64,
    pub init: (f64, f64),
    pub destination: (f64, f64),
    pub hazard_shift: f64,
    pub hazard_speed: f64,
    pub fov_radius: f64,
    pub fov_angle: f64,
}

pub fn perturbed(j: Jitter) -> Scenario {
    let mut sc = match j.preset % 3 {
        0 => presets::intersection_one_vehicle(),
        1 => presets::intersection_two_vehicle(),
        _ => presets::straight_road(),
    };
    let behavior = if j.aggressive {
        BehaviorType::Aggressive
    } else {
        BehaviorType::Normal
    };
    if j.aggressive {
        sc.thresholds.aggressive = j.threshold.min(sc.thresholds.normal - 1.0);
    }
    sc.set_behavior(behavior);
    sc.escooter_init += Vec2::new(j.init.0, j.init.1);
    sc.destination += Vec2::new(j.destination.0, j.destination.1);
    sc.escooter_params.fov_radius = j.fov_radius;
    sc.escooter_params.fov_angle = j.fov_angle;
    for v in sc.vehicles.iter_mut().filter(|v| v.spec.hazard) {
        let heading = Vec2::from_heading(v.state.psi);
        v.state.x += heading.x * j.hazard_shift;
        v.state.y += heading.y * j.hazard_shift;
        v.state.v = j.hazard_speed;
    }
    sc
}

/// Checks the planner invariants on a recorded trace. Returns a description
/// of the first violation.
pub fn fsm_violation(sc: &Scenario, r: &EpisodeResult) -> Option<String> {
    let threshold = sc.escooter_params.crossing_threshold;
    let mut prev = FsmMode::Approach;
    for step in &r.trajectory {
        let mode = step.escooter.mode;
        if prev == FsmMode::Wait && mode != FsmMode::Wait {
            return Some(format!("t={}: left Wait for {mode}", step.t));
        }
        if prev != FsmMode::Move && mode == FsmMode::Move {
            match step.escooter.latched_gap {
                Some(g) if g >= threshold => {}
                g => {
                    return Some(format!(
                        "t={}: entered Move with gap {g:?} < {threshold}",
                        step.t
                    ))
                }
            }
        }
        if mode == FsmMode::Done {
            let d = step.escooter.pos.distance(sc.destination);
            if d > ARRIVAL_TOLERANCE {
                return Some(format!("t={}: Done {d} m from destination", step.t));
            }
        }
        if prev == FsmMode::Approach && mode == FsmMode::Done {
            return Some(format!("t={}: skipped Move", step.t));
        }
        prev = mode;
    }
    None
}
