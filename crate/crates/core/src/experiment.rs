//! Batch sweeps, collision-rate aggregation and result files.
//!
//! Episodes are independent, so a sweep is a plain data-parallel map. With
//! the `parallel` feature (default) the map runs on a dedicated rayon pool;
//! without it, or with one worker, it runs on the calling thread. Row order
//! always follows input order.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::escooter::BehaviorType;
use crate::scenario_io::{GridPoint, GridSymbol};
use crate::simulation::{run_episode_unlogged, EpisodeResult, Outcome, Scenario, UseCase};

/// A scenario queued for a sweep, with the grid values that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepCase {
    pub scenario: Scenario,
    pub values: Vec<(GridSymbol, f64)>,
}

impl From<GridPoint> for SweepCase {
    fn from(p: GridPoint) -> Self {
        Self {
            scenario: p.scenario,
            values: p.values,
        }
    }
}

impl From<Scenario> for SweepCase {
    fn from(scenario: Scenario) -> Self {
        Self {
            scenario,
            values: Vec::new(),
        }
    }
}

/// Builds one sweep case per (grid point, behavior), behavior-major: all
/// points for the first behavior, then all for the next.
pub fn cases_for_behaviors(points: &[GridPoint], behaviors: &[BehaviorType]) -> Vec<SweepCase> {
    behaviors
        .iter()
        .flat_map(|&b| {
            points.iter().map(move |p| SweepCase {
                scenario: p.scenario.clone().with_behavior(b),
                values: p.values.clone(),
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub episode_id: usize,
    pub use_case: UseCase,
    pub behavior: BehaviorType,
    /// Value of every CSV symbol present in the scenario, swept or not;
    /// `None` where the scenario lacks the symbol.
    pub symbols: [Option<f64>; 12],
    pub outcome: Outcome,
    pub t_event: f64,
    pub min_separation: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct Aggregate {
    pub episodes: usize,
    pub collisions: usize,
    pub reached: usize,
    pub timeouts: usize,
}

impl Aggregate {
    pub fn from_rows<'a>(rows: impl IntoIterator<Item = &'a SweepRow>) -> Self {
        rows.into_iter().fold(Aggregate::default(), |mut a, r| {
            a.add(r.outcome);
            a
        })
    }

    pub fn add(&mut self, outcome: Outcome) {
        self.episodes += 1;
        match outcome {
            Outcome::Collision => self.collisions += 1,
            Outcome::ReachedDestination => self.reached += 1,
            Outcome::Timeout => self.timeouts += 1,
        }
    }

    pub fn merge(self, other: Aggregate) -> Aggregate {
        Aggregate {
            episodes: self.episodes + other.episodes,
            collisions: self.collisions + other.collisions,
            reached: self.reached + other.reached,
            timeouts: self.timeouts + other.timeouts,
        }
    }

    /// Collisions as a percentage of episodes; 0 for an empty aggregate.
    pub fn collision_rate(&self) -> f64 {
        if self.episodes == 0 {
            0.0
        } else {
            100.0 * self.collisions as f64 / self.episodes as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    pub aggregate: Aggregate,
}

impl SweepResult {
    fn from_rows(rows: Vec<SweepRow>) -> Self {
        let aggregate = Aggregate::from_rows(&rows);
        Self { rows, aggregate }
    }

    pub fn collision_rate(&self) -> f64 {
        self.aggregate.collision_rate()
    }

    pub fn aggregate_for(&self, use_case: UseCase, behavior: BehaviorType) -> Aggregate {
        Aggregate::from_rows(
            self.rows
                .iter()
                .filter(|r| r.use_case == use_case && r.behavior == behavior),
        )
    }

    /// (use case, behavior) pairs present, in first-seen order.
    pub fn groups(&self) -> Vec<(UseCase, BehaviorType)> {
        let mut out: Vec<(UseCase, BehaviorType)> = Vec::new();
        for r in &self.rows {
            if !out.contains(&(r.use_case, r.behavior)) {
                out.push((r.use_case, r.behavior));
            }
        }
        out
    }

    /// Concatenates partial results, renumbering episode ids.
    pub fn merge(parts: impl IntoIterator<Item = SweepResult>) -> SweepResult {
        let mut rows = Vec::new();
        for part in parts {
            rows.extend(part.rows);
        }
        for (i, r) in rows.iter_mut().enumerate() {
            r.episode_id = i;
        }
        SweepResult::from_rows(rows)
    }
}

/// Percentage-point change from `a` to `b`.
pub fn compare_rates(a: &SweepResult, b: &SweepResult) -> f64 {
    b.collision_rate() - a.collision_rate()
}

fn row_for(id: usize, case: &SweepCase, r: &EpisodeResult) -> SweepRow {
    let mut symbols = [None; 12];
    for (slot, symbol) in symbols.iter_mut().zip(GridSymbol::CSV_ORDER) {
        *slot = case
            .values
            .iter()
            .find(|(s, _)| *s == symbol)
            .map(|(_, v)| *v)
            .or_else(|| applicable_value(symbol, &case.scenario));
    }
    SweepRow {
        episode_id: id,
        use_case: case.scenario.use_case(),
        behavior: case.scenario.behavior,
        symbols,
        outcome: r.outcome,
        t_event: r.t_event,
        min_separation: r.min_separation,
    }
}

/// Unswept symbols are reported when they are meaningful for the map.
fn applicable_value(symbol: GridSymbol, sc: &Scenario) -> Option<f64> {
    use crate::simulation::MapKind;
    let meaningful = match sc.map_kind {
        MapKind::Intersection => symbol != GridSymbol::YVeh2Init,
        MapKind::StraightRoad => !matches!(
            symbol,
            GridSymbol::YVeh0
                | GridSymbol::YVeh1
                | GridSymbol::XVeh2Init
                | GridSymbol::XVeh3Init
                | GridSymbol::VVeh3
        ),
    };
    if meaningful {
        symbol.get(sc)
    } else {
        None
    }
}

fn validate_all(cases: &[SweepCase]) -> Result<()> {
    if cases.is_empty() {
        return Err(Error::Empty("a sweep needs at least one scenario"));
    }
    for (id, case) in cases.iter().enumerate() {
        case.scenario.validate().map_err(|e| Error::Episode {
            id,
            source: Box::new(e),
        })?;
    }
    Ok(())
}

fn run_case(id: usize, case: &SweepCase) -> Result<SweepRow> {
    run_episode_unlogged(&case.scenario)
        .map(|r| row_for(id, case, &r))
        .map_err(|e| Error::Episode {
            id,
            source: Box::new(e),
        })
}

/// Runs every case on the calling thread.
pub fn run_sweep_sequential(cases: &[SweepCase]) -> Result<SweepResult> {
    validate_all(cases)?;
    let rows = cases
        .iter()
        .enumerate()
        .map(|(i, c)| run_case(i, c))
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult::from_rows(rows))
}

/// Runs every case on a rayon pool of `workers` threads (0 = rayon's
/// default). Results match [`run_sweep_sequential`] exactly.
#[cfg(feature = "parallel")]
pub fn run_sweep_parallel(cases: &[SweepCase], workers: usize) -> Result<SweepResult> {
    use rayon::prelude::*;

    validate_all(cases)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::invalid("workers", e.to_string()))?;
    let rows = pool.install(|| {
        cases
            .par_iter()
            .enumerate()
            .map(|(i, c)| run_case(i, c))
            .collect::<Vec<_>>()
    });
    // Report the lowest failing id regardless of scheduling.
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(SweepResult::from_rows(rows))
}

/// Dispatches to the parallel path when available and `workers != 1`.
pub fn run_sweep(cases: &[SweepCase], workers: usize) -> Result<SweepResult> {
    #[cfg(feature = "parallel")]
    if workers != 1 {
        return run_sweep_parallel(cases, workers);
    }
    let _ = workers;
    run_sweep_sequential(cases)
}

pub const CSV_HEADER: [&str; 18] = [
    "episode_id",
    "use_case",
    "behavior",
    "y_veh0",
    "y_veh1",
    "x_veh2_init",
    "y_veh2_init",
    "x_veh3_init",
    "v_veh2",
    "v_veh3",
    "y_esc_init",
    "x_des",
    "y_des",
    "r_fov",
    "alpha_fov",
    "outcome",
    "t_event_s",
    "min_separation_m",
];

fn fmt_num(v: f64) -> String {
    if v.is_finite() {
        format!("{v}")
    } else if v > 0.0 {
        "inf".to_string()
    } else {
        "nan".to_string()
    }
}

/// Writes the per-episode table to any writer.
pub fn write_rows_csv<W: std::io::Write>(r: &SweepResult, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for row in &r.rows {
        let mut rec: Vec<String> = Vec::with_capacity(CSV_HEADER.len());
        rec.push(row.episode_id.to_string());
        rec.push(row.use_case.to_string());
        rec.push(row.behavior.to_string());
        rec.extend(
            row.symbols
                .iter()
                .map(|v| v.map(fmt_num).unwrap_or_default()),
        );
        rec.push(row.outcome.to_string());
        rec.push(format!("{:.1}", row.t_event));
        rec.push(if row.min_separation.is_finite() {
            format!("{:.3}", row.min_separation)
        } else {
            fmt_num(row.min_separation)
        });
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| Error::io("<csv>", e))?;
    Ok(())
}

/// Summary document: overall totals plus one table per (use case,
/// behavior) with outcome counts and the collision rate in percent.
pub fn summary_toml(r: &SweepResult) -> String {
    let mut s = String::new();
    let a = r.aggregate;
    let _ = writeln!(s, "episodes = {}", a.episodes);
    let _ = writeln!(s, "collisions = {}", a.collisions);
    let _ = writeln!(s, "collision_rate = {:.2}", a.collision_rate());
    for (use_case, behavior) in r.groups() {
        let g = r.aggregate_for(use_case, behavior);
        let _ = writeln!(s);
        let _ = writeln!(s, "[[group]]");
        let _ = writeln!(s, "use_case = \"{use_case}\"");
        let _ = writeln!(s, "behavior = \"{behavior}\"");
        let _ = writeln!(s, "episodes = {}", g.episodes);
        let _ = writeln!(s, "collisions = {}", g.collisions);
        let _ = writeln!(s, "reached_destination = {}", g.reached);
        let _ = writeln!(s, "timeouts = {}", g.timeouts);
        let _ = writeln!(s, "collision_rate = {:.2}", g.collision_rate());
    }
    s
}

/// Writes `results.csv` and `summary.toml` into `dir`, creating it if
/// needed.
pub fn write_results(r: &SweepResult, dir: impl AsRef<Path>) -> Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let csv_path = dir.join("results.csv");
    let file = fs::File::create(&csv_path).map_err(|e| Error::io(&csv_path, e))?;
    write_rows_csv(r, std::io::BufWriter::new(file))?;
    let summary_path = dir.join("summary.toml");
    fs::write(&summary_path, summary_toml(r)).map_err(|e| Error::io(&summary_path, e))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;
    use crate::simulation::run_episode;

    fn fake(rate_collisions: usize, episodes: usize) -> SweepResult {
        let rows = (0..episodes)
            .map(|i| SweepRow {
                episode_id: i,
                use_case: UseCase::OneVehicleCrossing,
                behavior: BehaviorType::Aggressive,
                symbols: [None; 12],
                outcome: if i < rate_collisions {
                    Outcome::Collision
                } else {
                    Outcome::Timeout
                },
                t_event: 1.0,
                min_separation: 1.0,
            })
            .collect();
        SweepResult::from_rows(rows)
    }

    #[test]
    fn compare_rates_examples() {
        // 2/9 = 22.22 %, 43/117 = 36.75 %, 14/75 = 18.67 %.
        let one = fake(2, 9);
        let two = fake(43, 117);
        let pass = fake(14, 75);
        assert!((compare_rates(&one, &two) - 14.53).abs() < 0.01);
        assert_eq!(compare_rates(&one, &one), 0.0);
        assert!((compare_rates(&pass, &one) - 3.55).abs() < 0.01);
    }

    #[test]
    fn single_case_sweep_matches_episode() {
        let sc = presets::intersection_one_vehicle();
        let direct = run_episode(&sc).unwrap();
        let sweep = run_sweep_sequential(&[sc.into()]).unwrap();
        assert_eq!(sweep.rows.len(), 1);
        assert_eq!(sweep.rows[0].outcome, direct.outcome);
        assert_eq!(sweep.rows[0].t_event, direct.t_event);
        assert_eq!(sweep.rows[0].min_separation, direct.min_separation);
        assert_eq!(sweep.aggregate.episodes, 1);
    }

    #[test]
    fn empty_sweep_rejected() {
        assert!(matches!(run_sweep(&[], 1), Err(Error::Empty(_))));
    }

    #[test]
    fn invalid_case_reports_its_id() {
        let good = presets::straight_road();
        let mut bad = good.clone();
        bad.dt = -1.0;
        let cases: Vec<SweepCase> = vec![good.clone().into(), good.into(), bad.into()];
        match run_sweep(&cases, 2) {
            Err(Error::Episode { id, .. }) => assert_eq!(id, 2),
            other => panic!("expected episode error, got {other:?}"),
        }
    }

    #[test]
    fn summary_formats_two_decimals() {
        let s = summary_toml(&fake(2, 9));
        assert!(s.contains("collision_rate = 22.22"), "{s}");
        let s = summary_toml(&fake(0, 9));
        assert!(s.contains("collision_rate = 0.00"), "{s}");
        let parsed: toml::Value = toml::from_str(&s).unwrap();
        assert_eq!(parsed["group"][0]["collisions"].as_integer(), Some(0));
    }

    #[test]
    fn csv_blanks_inapplicable_symbols() {
        let sweep = run_sweep_sequential(&[presets::straight_road().into()]).unwrap();
        let mut buf = Vec::new();
        write_rows_csv(&sweep, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), CSV_HEADER.join(","));
        let fields: Vec<_> = lines.next().unwrap().split(',').collect();
        assert_eq!(fields.len(), 18);
        assert_eq!(fields[3], ""); // y_veh0
        assert_eq!(fields[6], "-60"); // y_veh2_init
        assert_eq!(fields[7], ""); // x_veh3_init
    }
}
