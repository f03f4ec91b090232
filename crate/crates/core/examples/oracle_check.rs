//! The planner at ε = 1 against exhaustive enumeration on small random
//! scenarios, and the ε bound for a few larger factors.

use sarplan::baselines::brute_force_optimal;
use sarplan::corpus::small_corpus;
use sarplan::plan_asar;

fn main() -> sarplan::Result<()> {
    for (k, s) in small_corpus(7, 10).iter().enumerate() {
        let oracle = brute_force_optimal(s)?.objective;
        let mut line = format!("#{k} {:?} T={} oracle={oracle:.6}", s.motion().kind(), s.budget());
        for eps in [1.0, 1.1, 1.5] {
            let j = plan_asar(s, eps)?.objective;
            line += &format!("  eps {eps}: {:.4}", j / oracle);
        }
        println!("{line}");
    }
    Ok(())
}
