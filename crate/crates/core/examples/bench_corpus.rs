//! Every method on a freshly generated small corpus, as a CSV report.

use sarplan::bench::{format_rows, run_bench, BenchOptions};
use sarplan::corpus::small_corpus;
use sarplan::io::save_scenario;

fn main() -> sarplan::Result<()> {
    let dir = std::env::temp_dir().join("sarplan-bench-corpus");
    std::fs::create_dir_all(&dir).map_err(|e| sarplan::Error::Io { path: dir.clone(), source: e })?;
    for (k, s) in small_corpus(1, 4).iter().enumerate() {
        save_scenario(s, &dir.join(format!("{k:03}.toml")))?;
    }
    let options = BenchOptions { aco_trials: 10, ..BenchOptions::default() };
    print!("{}", format_rows(&run_bench(&dir, &options)?));
    Ok(())
}
