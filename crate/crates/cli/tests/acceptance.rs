//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero when a hard criterion fails.
//!
//! Run a subset with `cargo test --test acceptance -- 1 3 7`.

use std::fs;
use std::path::{Path as FsPath, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sarplan::baselines::{
    aco_trials, brute_force_with, count_walks, median_trace, nearest_corner, optimal_completion,
    parallel_track, AcoParams, OracleOptions, Orientation,
};
use sarplan::corpus::{drift_corpus, drift_scenario, small_corpus, DriftCorpusParams};
use sarplan::domain::{
    apply_glimpse, particle_glimpse, particles_to_belief, propagate, TransitionMatrix,
    TransitionModel, TransitionRow,
};
use sarplan::evaluation::monte_carlo_mttd;
use sarplan::heuristic::{heuristic_at, DistanceField};
use sarplan::objective::detection_time_distribution;
use sarplan::{
    path_objective, plan_asar, Belief, Grid, MotionModel, ParticleEnsemble, Path, Scenario,
    SensorModel, VertexId,
};

/// Seed of the small randomized corpus shared by several criteria.
const CORPUS_SEED: u64 = 2024;
const CORPUS_SIZE: usize = 200;
/// First seed of the 20-scenario drift corpus.
const DRIFT_SEED: u64 = 0;

struct Outcome {
    pass: bool,
    /// Soft criteria report but never fail the run.
    soft: bool,
    detail: String,
}

fn exhaustive() -> OracleOptions {
    OracleOptions {
        cap: 10_000_000,
        prune: false,
    }
}

fn oracle_equivalence(corpus: &[Scenario]) -> Outcome {
    let mut worst = 0.0f64;
    let mut bad = Vec::new();
    for (k, s) in corpus.iter().enumerate() {
        let a = plan_asar(s, 1.0).expect("planner");
        let o = brute_force_with(s, exhaustive()).expect("oracle");
        let gap = (a.objective - o.objective).abs();
        worst = worst.max(gap);
        if gap > 1e-9 {
            bad.push(k);
        }
    }
    Outcome {
        pass: bad.is_empty(),
        soft: false,
        detail: format!(
            "{} scenarios, max |J_asar - J_oracle| = {worst:.3e}, mismatches at {bad:?}",
            corpus.len()
        ),
    }
}

fn epsilon_bound(corpus: &[Scenario]) -> Outcome {
    let mut violations = Vec::new();
    let mut worst_ratio = 0.0f64;
    for (k, s) in corpus.iter().enumerate() {
        let o = brute_force_with(s, exhaustive()).expect("oracle").objective;
        for eps in [1.05, 1.1, 1.5] {
            let j = plan_asar(s, eps).expect("planner").objective;
            if o > 0.0 {
                worst_ratio = worst_ratio.max(j / o / eps);
            }
            if j > eps * o + 1e-9 {
                violations.push((k, eps));
            }
        }
    }
    Outcome {
        pass: violations.is_empty(),
        soft: false,
        detail: format!(
            "{} runs, max J/(eps*J*) = {worst_ratio:.6}, violations {violations:?}",
            corpus.len() * 3
        ),
    }
}

fn admissibility(corpus: &[Scenario]) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(CORPUS_SEED ^ 0xad);
    let mut sampled = 0usize;
    let mut violations = Vec::new();
    let mut worst = f64::NEG_INFINITY;
    for (k, s) in corpus.iter().enumerate() {
        let distances = DistanceField::new(s.grid());
        for _ in 0..10 {
            // random walk prefix of random length below the budget
            let len = rng.gen_range(0..s.budget());
            let mut prefix: Vec<VertexId> = vec![s.start()];
            let mut state = s.initial_state();
            for t in 1..=len {
                let here = *prefix.last().unwrap();
                let nbrs = s.grid().neighbors(here).unwrap();
                let v = nbrs[rng.gen_range(0..nbrs.len())];
                state = s.step(&state, v, t).unwrap().0;
                prefix.push(v);
            }
            let h = heuristic_at(s, &distances, *prefix.last().unwrap(), len, &state);
            let best = optimal_completion(s, &prefix, exhaustive())
                .expect("completion")
                .expect("grid has no isolated cells");
            sampled += 1;
            let excess = h - best.cost_to_go;
            worst = worst.max(excess);
            if excess > 1e-9 {
                violations.push((k, s.motion().kind(), prefix.clone(), h, best.cost_to_go));
            }
        }
    }
    let shown: Vec<_> = violations.iter().take(20).collect();
    Outcome {
        pass: sampled >= 1000 && violations.is_empty(),
        soft: false,
        detail: format!(
            "{sampled} states, max h - h* = {worst:.3e}, {} violations, first {shown:?}",
            violations.len()
        ),
    }
}

fn random_belief(rng: &mut ChaCha8Rng, cells: usize) -> Belief {
    let support = rng.gen_range(1..=cells);
    let mut mass = vec![0.0; cells];
    for _ in 0..support {
        mass[rng.gen_range(0..cells)] += rng.gen::<f64>();
    }
    let outside = if rng.gen_bool(0.3) { rng.gen::<f64>() * 0.5 } else { 0.0 };
    // total below one, as after some searching
    let scale = rng.gen_range(0.1..=1.0) / (mass.iter().sum::<f64>() + outside).max(1e-300);
    Belief::new(mass.iter().map(|m| m * scale).collect(), outside * scale).expect("belief")
}

fn random_row(rng: &mut ChaCha8Rng, cells: usize) -> TransitionRow {
    let k = rng.gen_range(1..=cells.min(5));
    let mut to: Vec<(VertexId, f64)> = (0..k).map(|_| (rng.gen_range(0..cells), rng.gen::<f64>())).collect();
    let out = if rng.gen_bool(0.3) { rng.gen::<f64>() * 0.3 } else { 0.0 };
    let total = to.iter().map(|e| e.1).sum::<f64>() + out;
    for e in &mut to {
        e.1 /= total;
    }
    TransitionRow { to, out: out / total }
}

fn random_motion(rng: &mut ChaCha8Rng, cells: usize) -> MotionModel {
    let rows = (0..cells).map(|_| random_row(rng, cells)).collect();
    let matrix = if rng.gen_bool(0.5) {
        TransitionMatrix::with_outside_row(rows, random_row(rng, cells))
    } else {
        TransitionMatrix::new(rows)
    };
    MotionModel::Transition(TransitionModel::homogeneous(matrix))
}

fn random_ensemble(rng: &mut ChaCha8Rng, cells: usize, steps: usize) -> ParticleEnsemble {
    let n = rng.gen_range(1..=40);
    let trajectories = (0..n)
        .map(|_| {
            (0..steps)
                .map(|_| (!rng.gen_bool(0.1)).then(|| rng.gen_range(0..cells)))
                .collect()
        })
        .collect();
    let raw: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
    let scale = rng.gen_range(0.1..=1.0) / raw.iter().sum::<f64>();
    ParticleEnsemble::new(trajectories, Some(raw.iter().map(|w| w * scale).collect()))
        .expect("ensemble")
}

fn conservation() -> Outcome {
    const PAIRS: usize = 10_000;
    let mut rng = ChaCha8Rng::seed_from_u64(CORPUS_SEED ^ 0xc0);
    let (mut motion_err, mut glimpse_err, mut commute_err) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..PAIRS {
        let cells = rng.gen_range(1..=36);
        let b = random_belief(&mut rng, cells);
        let m = random_motion(&mut rng, cells);
        let moved = propagate(&b, &m, rng.gen_range(1..=50)).expect("propagate");
        motion_err = motion_err.max((moved.total() - b.total()).abs());

        let sensor = SensorModel::new((0..cells).map(|_| rng.gen::<f64>()).collect()).expect("sensor");
        let v = rng.gen_range(0..cells);
        let after = apply_glimpse(&b, &sensor, v);
        glimpse_err = glimpse_err.max(((b.total() - after.total()) - sensor.q(v) * b.mass[v]).abs());

        let grid = Grid::new(cells, 1).expect("grid");
        let steps = rng.gen_range(1..=5);
        let e = random_ensemble(&mut rng, cells, steps);
        let t = rng.gen_range(0..steps);
        let dense = apply_glimpse(&particles_to_belief(&e, &grid, t).expect("belief"), &sensor, v);
        let searched = particle_glimpse(&e, &sensor, v, t).expect("glimpse");
        let sparse = particles_to_belief(&searched, &grid, t).expect("belief");
        let gap = dense
            .mass
            .iter()
            .zip(&sparse.mass)
            .map(|(a, b)| (a - b).abs())
            .fold((dense.outside - sparse.outside).abs(), f64::max);
        commute_err = commute_err.max(gap);
    }
    Outcome {
        pass: motion_err <= 1e-12 && glimpse_err <= 1e-12 && commute_err <= 1e-12,
        soft: false,
        detail: format!(
            "{PAIRS} pairs, max errors: propagate {motion_err:.1e}, glimpse {glimpse_err:.1e}, particle/dense {commute_err:.1e}"
        ),
    }
}

fn random_path(rng: &mut ChaCha8Rng, s: &Scenario) -> Path {
    let mut v = vec![s.start()];
    for _ in 0..s.budget() {
        let nbrs = s.grid().neighbors(*v.last().unwrap()).unwrap();
        v.push(nbrs[rng.gen_range(0..nbrs.len())]);
    }
    Path::new(v)
}

fn objective_consistency(corpus: &[Scenario]) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(CORPUS_SEED ^ 0x0b);
    let (mut j_err, mut sum_err) = (0.0f64, 0.0f64);
    for k in 0..100 {
        let s = &corpus[k % corpus.len()];
        let path = random_path(&mut rng, s);
        let trace = path_objective(s, &path).expect("objective");
        let p = detection_time_distribution(s, &path).expect("distribution");
        // P(D > t) = 1 - sum of P(D = u) for u <= t
        let mut detected = 0.0;
        let mut j = 0.0;
        for d in &p {
            detected += d;
            j += 1.0 - detected;
        }
        j_err = j_err.max((j - trace.objective).abs());
        let tail = *trace.survival.last().expect("budget >= 1");
        sum_err = sum_err.max((p.iter().sum::<f64>() + tail - 1.0).abs());
    }
    Outcome {
        pass: j_err <= 1e-9 && sum_err <= 1e-9,
        soft: false,
        detail: format!("100 paths, max |J - J_dist| = {j_err:.1e}, max |sum P(D=t) + P(D>T) - 1| = {sum_err:.1e}"),
    }
}

fn monte_carlo(corpus: &[Scenario], drift: &[Scenario]) -> Outcome {
    const TRIALS: usize = 100_000;
    let mut worst = (0.0f64, 0.0f64);
    let mut bad = Vec::new();
    let mut cases: Vec<(String, &Scenario, Path)> = Vec::new();
    for (k, s) in corpus.iter().enumerate() {
        cases.push((format!("small/{k}"), s, plan_asar(s, 1.0).expect("planner").path));
    }
    for (k, s) in drift.iter().enumerate() {
        cases.push((format!("drift/{k}"), s, plan_asar(s, 1.5).expect("planner").path));
    }
    for (k, (name, s, path)) in cases.iter().enumerate() {
        let r = monte_carlo_mttd(s, path, TRIALS, CORPUS_SEED + k as u64).expect("monte carlo");
        // 1e-9 absorbs rounding when a path's outcome is certain and the SE is 0
        let dj = (r.empirical_mttd - r.objective).abs();
        let dp = (r.detected_fraction - r.detection_probability).abs();
        let ok_j = dj <= 3.0 * r.mttd_se + 1e-9;
        let ok_p = dp <= 3.0 * r.detected_fraction_se + 1e-9;
        let (zj, zp) = r.z_scores();
        if zj.is_finite() {
            worst.0 = worst.0.max(zj);
        }
        if zp.is_finite() {
            worst.1 = worst.1.max(zp);
        }
        if !(ok_j && ok_p) {
            bad.push(format!("{name}: dJ={dj:.3e} (se {:.3e}), dP={dp:.3e} (se {:.3e})", r.mttd_se, r.detected_fraction_se));
        }
    }
    Outcome {
        pass: bad.is_empty(),
        soft: false,
        detail: format!(
            "{} scenarios x {TRIALS} trials, max z: MTTD {:.2}, detected fraction {:.2}; outside 3 SE: {bad:?}",
            cases.len(),
            worst.0,
            worst.1
        ),
    }
}

fn comparative_shape(drift: &[Scenario]) -> Outcome {
    let mut ratios = Vec::new();
    let mut wins = 0usize;
    let mut rows = Vec::new();
    for (k, s) in drift.iter().enumerate() {
        let reference = if count_walks(s, s.start(), s.budget()) <= exhaustive().cap {
            brute_force_with(s, exhaustive()).expect("oracle").objective
        } else {
            plan_asar(s, 1.0).expect("planner").objective
        };
        let corner = nearest_corner(s).expect("prior on grid");
        let pt = [Orientation::Horizontal, Orientation::Vertical]
            .into_iter()
            .map(|o| parallel_track(s, o, corner).expect("parallel track").objective)
            .fold(f64::INFINITY, f64::min);
        let params = AcoParams {
            generations: 200,
            seed: CORPUS_SEED + 1000 * k as u64,
            ..AcoParams::default()
        };
        let runs = aco_trials(s, &params, 100).expect("aco");
        let aco = *median_trace(&runs).last().expect("generations > 0");
        ratios.push(pt / reference);
        if reference <= aco {
            wins += 1;
        }
        rows.push(format!("{k}:{:.3}/{:.3}", pt / reference, aco / reference));
    }
    let mut sorted = ratios.clone();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let median = if n % 2 == 1 { sorted[n / 2] } else { 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]) };
    let share = wins as f64 / n as f64;
    Outcome {
        pass: median >= 1.05 && share >= 0.8,
        soft: false,
        detail: format!(
            "{n} scenarios, median parallel-track ratio {median:.3}, A* (eps 1) <= median ACO on {wins}/{n}; per scenario pt/aco ratios [{}]",
            rows.join(" ")
        ),
    }
}

/// Reference wall time for the performance scenario, one line `seconds=<x>`.
const PERF_BASELINE: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/perf_baseline.txt");
/// Clock noise floor for the regression check.
const PERF_FLOOR: Duration = Duration::from_millis(50);

fn performance() -> Outcome {
    let params = DriftCorpusParams {
        width: 50,
        height: 50,
        budget_min: 50,
        budget_max: 50,
        ..DriftCorpusParams::default()
    };
    let s = drift_scenario(&params, CORPUS_SEED).expect("scenario");
    let mut times: Vec<Duration> = (0..5)
        .map(|_| {
            let clock = Instant::now();
            plan_asar(&s, 1.1).expect("planner");
            clock.elapsed()
        })
        .collect();
    times.sort();
    let median = times[2];
    let baseline = fs::read_to_string(PERF_BASELINE)
        .ok()
        .and_then(|t| t.trim().strip_prefix("seconds=").and_then(|v| v.parse::<f64>().ok()))
        .map(Duration::from_secs_f64);
    let regressed = baseline.is_some_and(|b| median > 2 * b.max(PERF_FLOOR));
    let under = median < Duration::from_secs(10);
    Outcome {
        // the 10 s envelope is soft, a 2x regression is not
        pass: under && !regressed,
        soft: under || !regressed,
        detail: format!(
            "50x50, T=50, eps=1.1: median of 5 runs {:.3}s (limit 10s), baseline {}",
            median.as_secs_f64(),
            baseline.map_or("missing".into(), |b| format!("{:.3}s", b.as_secs_f64()))
        ),
    }
}

fn run_cli(dir: &FsPath, args: &[&str]) -> Vec<u8> {
    let out = Command::new(env!("CARGO_BIN_EXE_sarplan"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("run sarplan");
    assert!(out.status.success(), "sarplan {args:?}: {}", String::from_utf8_lossy(&out.stderr));
    let mut bytes = out.stdout;
    bytes.extend(out.stderr);
    bytes
}

/// Every file under `dir`, relative path and contents, sorted.
fn snapshot(dir: &FsPath) -> Vec<(PathBuf, Vec<u8>)> {
    let mut files = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in fs::read_dir(&d).expect("read dir") {
            let p = entry.expect("entry").path();
            if p.is_dir() {
                stack.push(p);
            } else {
                files.push((p.strip_prefix(dir).unwrap().to_path_buf(), fs::read(&p).expect("read")));
            }
        }
    }
    files.sort();
    files
}

fn determinism() -> Outcome {
    let commands: Vec<Vec<&str>> = vec![
        vec!["corpus", "--kind", "small", "--count", "4", "--seed", "7", "--out", "small"],
        vec!["corpus", "--kind", "drift", "--count", "2", "--seed", "7", "--out", "drift"],
        vec!["synth", "--width", "20", "--height", "20", "--advection-x", "0.2", "--lead", "3", "--budget", "12", "--seed", "5", "--out", "synth/s.toml"],
        vec!["plan", "--scenario", "small/000.toml", "--out", "plan", "--heatmaps"],
        vec!["plan", "--scenario", "synth/s.toml", "--epsilon", "1.1", "--out", "plan_synth"],
        vec!["oracle", "--scenario", "small/001.toml", "--out", "oracle"],
        vec!["baseline", "--scenario", "synth/s.toml", "--kind", "parallel-track", "--out", "pt"],
        vec!["baseline", "--scenario", "synth/s.toml", "--kind", "greedy", "--out", "greedy"],
        vec!["baseline", "--scenario", "synth/s.toml", "--kind", "aco", "--trials", "3", "--generations", "20", "--seed", "9", "--out", "aco"],
        vec!["evaluate", "--scenario", "small/000.toml", "--path-file", "plan/path.csv", "--trials", "20000", "--seed", "3", "--out", "eval.txt"],
        vec!["bench", "--corpus", "small", "--epsilons", "1.5,1.0", "--aco-trials", "3", "--generations", "20", "--seed", "1", "--out", "bench.csv"],
    ];
    let dirs = [tempfile::tempdir().expect("tempdir"), tempfile::tempdir().expect("tempdir")];
    let mut mismatched = Vec::new();
    for args in &commands {
        let a = run_cli(dirs[0].path(), args);
        let b = run_cli(dirs[1].path(), args);
        if a != b {
            mismatched.push(format!("stdout of {}", args[0]));
        }
    }
    let (sa, sb) = (snapshot(dirs[0].path()), snapshot(dirs[1].path()));
    let names = |s: &[(PathBuf, Vec<u8>)]| s.iter().map(|f| f.0.clone()).collect::<Vec<_>>();
    if names(&sa) != names(&sb) {
        mismatched.push("file sets differ".into());
    }
    for ((p, x), (_, y)) in sa.iter().zip(&sb) {
        if x != y {
            mismatched.push(p.display().to_string());
        }
    }
    Outcome {
        pass: mismatched.is_empty(),
        soft: false,
        detail: format!(
            "{} commands run twice, {} files compared, differing: {mismatched:?}",
            commands.len(),
            sa.len()
        ),
    }
}

fn main() {
    let wanted: Vec<u32> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let run = |id: u32| wanted.is_empty() || wanted.contains(&id);
    let corpus = small_corpus(CORPUS_SEED, CORPUS_SIZE);
    let drift = std::cell::OnceCell::new();
    let drift = || drift.get_or_init(|| drift_corpus(&DriftCorpusParams::default(), DRIFT_SEED, 20).expect("drift corpus"));

    let criteria: Vec<(u32, &str, Box<dyn Fn() -> Outcome + '_>)> = vec![
        (1, "oracle equivalence at eps = 1", Box::new(|| oracle_equivalence(&corpus))),
        (2, "eps-suboptimality bound", Box::new(|| epsilon_bound(&corpus))),
        (3, "heuristic admissibility", Box::new(|| admissibility(&corpus))),
        (4, "conservation", Box::new(conservation)),
        (5, "objective consistency", Box::new(|| objective_consistency(&corpus))),
        (6, "Monte Carlo agreement", Box::new(|| monte_carlo(&corpus, drift()))),
        (7, "comparative shape on drift corpus", Box::new(|| comparative_shape(drift()))),
        (8, "performance envelope", Box::new(performance)),
        (9, "CLI determinism", Box::new(determinism)),
    ];

    let mut failed = false;
    for (id, name, check) in &criteria {
        if !run(*id) {
            continue;
        }
        let clock = Instant::now();
        let out = check();
        let verdict = match (out.pass, out.soft) {
            (true, _) => "PASS",
            (false, true) => "SOFT-FAIL",
            (false, false) => "FAIL",
        };
        failed |= !out.pass && !out.soft;
        println!(
            "criterion {id} [{name}]: {verdict} ({:.1}s) {}",
            clock.elapsed().as_secs_f64(),
            out.detail
        );
    }
    if failed {
        std::process::exit(1);
    }
}
