use std::path::PathBuf;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use vei_core::escooter::BehaviorType;
use vei_core::experiment::{cases_for_behaviors, run_sweep, write_results};
use vei_core::render::{render_frame, render_strip, Style};
use vei_core::scenario_io::{expand_grid, load_scenario, ParameterGrid};
use vei_core::simulation::run_episode;
use vei_core::trajectory_log::{Snapshot, TrajectoryLog};

#[derive(Parser)]
#[command(
    name = "vei",
    version,
    about = "Vehicle / e-scooter interaction simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum BehaviorArg {
    Aggressive,
    Normal,
    Both,
}

impl BehaviorArg {
    fn types(self) -> Vec<BehaviorType> {
        match self {
            BehaviorArg::Aggressive => vec![BehaviorType::Aggressive],
            BehaviorArg::Normal => vec![BehaviorType::Normal],
            BehaviorArg::Both => BehaviorType::ALL.to_vec(),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run one episode and report its outcome.
    Run {
        #[arg(long)]
        scenario: PathBuf,
        /// Overrides the behavior named in the scenario file.
        #[arg(long, value_enum)]
        behavior: Option<BehaviorArg>,
        /// Write the trajectory log (CSV) here.
        #[arg(long)]
        log: Option<PathBuf>,
        /// Write an SVG of the initial world here.
        #[arg(long)]
        world_svg: Option<PathBuf>,
    },
    /// Run every grid point of a parameter sweep.
    Sweep {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        grid: PathBuf,
        #[arg(long, value_enum, default_value = "both")]
        behavior: BehaviorArg,
        /// Output directory for results.csv and summary.toml.
        #[arg(long)]
        out: PathBuf,
        /// Worker threads; 0 uses every core, 1 runs sequentially.
        #[arg(long, default_value_t = 0)]
        workers: usize,
    },
    /// Draw frames of a trajectory log side by side.
    Render {
        #[arg(long)]
        log: PathBuf,
        /// Comma-separated times in seconds, e.g. `0,3.0,6.1`.
        #[arg(long, value_delimiter = ',', required = true, num_args = 1..)]
        times: Vec<f64>,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Run {
            scenario,
            behavior,
            log,
            world_svg,
        } => {
            let mut sc = load_scenario(&scenario)?;
            if let Some(b) = behavior {
                match b.types().as_slice() {
                    [one] => sc.set_behavior(*one),
                    _ => bail!("`run` takes a single behavior, not `both`"),
                }
            }
            if let Some(path) = world_svg {
                std::fs::write(
                    &path,
                    render_frame(&Snapshot::initial(&sc), &Style::default()),
                )
                .with_context(|| format!("writing {}", path.display()))?;
            }
            let r = run_episode(&sc)?;
            println!("behavior: {}", sc.behavior);
            println!("outcome: {}", r.outcome);
            println!("t_event_s: {:.1}", r.t_event);
            println!("final_mode: {}", r.final_mode);
            match r.decision_gap {
                Some(g) => println!("decision_gap_m: {g:.3}"),
                None => println!("decision_gap_m: none"),
            }
            println!("min_separation_m: {:.3}", r.min_separation);
            if let Some(i) = r.collided_with {
                println!("collided_with: {}", sc.vehicles[i].id);
            }
            if let Some(path) = log {
                TrajectoryLog::from_episode(&sc, &r)?.save(&path)?;
            }
        }
        Command::Sweep {
            scenario,
            grid,
            behavior,
            out,
            workers,
        } => {
            let base = load_scenario(&scenario)?;
            let grid = ParameterGrid::load(&grid)?;
            let points = expand_grid(&base, &grid)?;
            let cases = cases_for_behaviors(&points, &behavior.types());
            let t0 = Instant::now();
            let r = run_sweep(&cases, workers)?;
            write_results(&r, &out)?;
            eprintln!(
                "{} episodes in {:.1} s, results in {}",
                r.aggregate.episodes,
                t0.elapsed().as_secs_f64(),
                out.display()
            );
            for (use_case, b) in r.groups() {
                let a = r.aggregate_for(use_case, b);
                println!(
                    "{use_case} {b}: {} episodes, {} collisions ({:.2}%)",
                    a.episodes,
                    a.collisions,
                    a.collision_rate()
                );
            }
        }
        Command::Render { log, times, out } => {
            let log = TrajectoryLog::load(&log)?;
            let svg = render_strip(&log, &times, &Style::default())?;
            std::fs::write(&out, svg).with_context(|| format!("writing {}", out.display()))?;
        }
    }
    Ok(())
}
