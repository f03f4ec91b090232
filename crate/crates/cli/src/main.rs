use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use sarplan::baselines::{
    aco_trials, brute_force_with, greedy_plan, median_trace, nearest_corner, parallel_track,
    AcoParams, OracleOptions, Orientation, DEFAULT_WALK_CAP,
};
use sarplan::bench::{format_rows, run_bench, BenchOptions, TABLE_EPSILONS};
use sarplan::corpus::{drift_corpus, small_corpus, DriftCorpusParams};
use sarplan::domain::{Scenario, SensorModel};
use sarplan::evaluation::{monte_carlo_mttd, synth_drift, DriftParams};
use sarplan::io::{format_report, load_path, load_scenario, save_plan, save_scenario, SaveOptions};
use sarplan::{plan_asar, Error, Plan, Result};

#[derive(Parser)]
#[command(name = "sarplan", version, about = "Searcher path planning for minimum mean time to detection")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Bounded-suboptimal best-first planner.
    Plan {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        epsilon: f64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Exhaustive optimum for small instances.
    Oracle {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long, default_value_t = DEFAULT_WALK_CAP)]
        cap: u128,
        /// Skip prefixes that the heuristic bound rules out.
        #[arg(long)]
        prune: bool,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Reference planners.
    Baseline {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long, value_enum)]
        kind: BaselineKind,
        /// Parallel track leg direction.
        #[arg(long, default_value = "horizontal")]
        orientation: String,
        /// Parallel track entry corner; defaults to the one nearest the start.
        #[arg(long)]
        corner: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Independent ACO runs; the best is saved, the median trace printed.
        #[arg(long, default_value_t = 1)]
        trials: usize,
        #[arg(long, default_value_t = 10)]
        ants: usize,
        #[arg(long, default_value_t = 200)]
        generations: usize,
        #[arg(long, default_value_t = 0.1)]
        evaporation: f64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Monte Carlo check of a saved path.
    Evaluate {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        path_file: PathBuf,
        #[arg(long, default_value_t = 100_000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Synthetic drift scenario.
    Synth(SynthArgs),
    /// Seeded scenario corpus.
    Corpus {
        #[arg(long, value_enum)]
        kind: CorpusKind,
        #[arg(long, default_value_t = 20)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output directory; files are named `NNN.toml`.
        #[arg(long)]
        out: PathBuf,
    },
    /// Every planner on every scenario of a corpus directory.
    Bench {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long, value_delimiter = ',', default_values_t = TABLE_EPSILONS.to_vec())]
        epsilons: Vec<f64>,
        #[arg(long, default_value_t = 100)]
        aco_trials: usize,
        #[arg(long, default_value_t = 200)]
        generations: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_WALK_CAP)]
        cap: u128,
        /// Fill the wall_time column.
        #[arg(long)]
        timing: bool,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct OutArgs {
    /// Directory for path.csv, trace.csv and stats.txt.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write per-step belief grids.
    #[arg(long)]
    heatmaps: bool,
    /// Record wall-clock time in stats.txt.
    #[arg(long)]
    timing: bool,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, default_value_t = 30)]
    width: usize,
    #[arg(long, default_value_t = 30)]
    height: usize,
    /// Defaults to the centre cell.
    #[arg(long)]
    release_cell: Option<usize>,
    #[arg(long, default_value_t = 400)]
    particles: usize,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    advection_x: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    advection_y: f64,
    #[arg(long, default_value_t = 0.5)]
    diffusion: f64,
    /// Drift steps before the search starts.
    #[arg(long, default_value_t = 0)]
    lead: usize,
    #[arg(long, default_value_t = 30)]
    budget: usize,
    /// Searcher start; defaults to the release cell.
    #[arg(long)]
    start: Option<usize>,
    #[arg(long, default_value_t = 0.78)]
    q: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Scenario file to write; particles go next to it.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum BaselineKind {
    ParallelTrack,
    Greedy,
    Aco,
}

#[derive(Clone, Copy, ValueEnum)]
enum CorpusKind {
    Small,
    Drift,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Plan {
            scenario,
            epsilon,
            out,
        } => {
            let s = load_scenario(&scenario)?;
            finish(&s, plan_asar(&s, epsilon)?, &out)
        }
        Command::Oracle {
            scenario,
            cap,
            prune,
            out,
        } => {
            let s = load_scenario(&scenario)?;
            finish(&s, brute_force_with(&s, OracleOptions { cap, prune })?, &out)
        }
        Command::Baseline {
            scenario,
            kind,
            orientation,
            corner,
            seed,
            trials,
            ants,
            generations,
            evaporation,
            out,
        } => {
            let s = load_scenario(&scenario)?;
            let plan = match kind {
                BaselineKind::ParallelTrack => {
                    let o: Orientation = orientation.parse()?;
                    let corner = match corner {
                        Some(c) => c,
                        None => nearest_corner(&s)
                            .ok_or_else(|| Error::Input("prior has no mass on the grid".into()))?,
                    };
                    parallel_track(&s, o, corner)?
                }
                BaselineKind::Greedy => greedy_plan(&s)?,
                BaselineKind::Aco => {
                    let params = AcoParams {
                        ants_per_generation: ants,
                        generations,
                        evaporation,
                        seed,
                        ..AcoParams::default()
                    };
                    let runs = aco_trials(&s, &params, trials.max(1))?;
                    let trace = median_trace(&runs);
                    if let Some(last) = trace.last() {
                        println!("median_best_J={last}");
                    }
                    runs.into_iter()
                        .map(|r| r.plan)
                        .min_by(|a, b| a.objective.total_cmp(&b.objective))
                        .expect("at least one run")
                }
            };
            finish(&s, plan, &out)
        }
        Command::Evaluate {
            scenario,
            path_file,
            trials,
            seed,
            out,
        } => {
            let s = load_scenario(&scenario)?;
            let path = load_path(&path_file)?;
            let report = monte_carlo_mttd(&s, &path, trials, seed)?;
            let text = format_report(&report);
            match out {
                Some(f) => fs::write(&f, text).map_err(|e| Error::Io { path: f, source: e }),
                None => {
                    print!("{text}");
                    Ok(())
                }
            }
        }
        Command::Synth(a) => synth(a),
        Command::Corpus {
            kind,
            count,
            seed,
            out,
        } => {
            let scenarios = match kind {
                CorpusKind::Small => small_corpus(seed, count),
                CorpusKind::Drift => drift_corpus(&DriftCorpusParams::default(), seed, count)?,
            };
            fs::create_dir_all(&out).map_err(|e| Error::Io { path: out.clone(), source: e })?;
            for (k, s) in scenarios.iter().enumerate() {
                save_scenario(s, &out.join(format!("{k:03}.toml")))?;
            }
            println!("wrote {} scenarios to {}", scenarios.len(), out.display());
            Ok(())
        }
        Command::Bench {
            corpus,
            epsilons,
            aco_trials,
            generations,
            seed,
            cap,
            timing,
            out,
        } => {
            let options = BenchOptions {
                epsilons,
                aco_trials,
                aco: AcoParams {
                    generations,
                    seed,
                    ..AcoParams::default()
                },
                aco_checkpoints: BenchOptions::default()
                    .aco_checkpoints
                    .into_iter()
                    .filter(|&g| g < generations)
                    .chain([generations])
                    .collect(),
                oracle_cap: cap,
                timing,
            };
            let rows = run_bench(&corpus, &options)?;
            fs::write(&out, format_rows(&rows)).map_err(|e| Error::Io { path: out.clone(), source: e })?;
            println!("wrote {} rows to {}", rows.len(), out.display());
            Ok(())
        }
    }
}

fn synth(a: SynthArgs) -> Result<()> {
    let release = a.release_cell.unwrap_or(a.height / 2 * a.width + a.width / 2);
    let params = DriftParams {
        width: a.width,
        height: a.height,
        release_cell: release,
        n_particles: a.particles,
        advection: (a.advection_x, a.advection_y),
        diffusion: a.diffusion,
        horizon: a.lead + a.budget,
        seed: a.seed,
    };
    let ensemble = synth_drift(&params)?.time_shift(a.lead)?;
    let grid = params.grid()?;
    let cells = grid.len();
    let s = Scenario::from_particles(
        grid,
        ensemble,
        SensorModel::uniform(cells, a.q)?,
        a.start.unwrap_or(release),
        a.budget,
    )?;
    if let Some(dir) = a.out.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::Io { path: dir.to_path_buf(), source: e })?;
    }
    save_scenario(&s, &a.out)?;
    println!("wrote {}", a.out.display());
    Ok(())
}

fn finish(scenario: &Scenario, plan: Plan, out: &OutArgs) -> Result<()> {
    println!("J={}", plan.objective);
    println!("path={}", plan.path);
    if let Some(dir) = &out.out {
        save_plan(
            scenario,
            &plan,
            dir,
            SaveOptions {
                heatmaps: out.heatmaps,
                timing: out.timing,
            },
        )?;
    }
    Ok(())
}
