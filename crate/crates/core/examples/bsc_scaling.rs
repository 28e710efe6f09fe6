//! Error probability of the typicality decoder on BSC(0.05) as the sync
//! word grows and the asynchrony window grows as `e^{0.5 alpha N}`.
//!
//! cargo run --release --example bsc_scaling -- [trials] [seed]

use framesync::sim::{scaling_csv, scaling_experiment, FamilyMember, MuRule, ScalingPlan, WindowRule, WordRule};
use framesync::{Dmc, Result};

fn main() -> Result<()> {
    let mut args = std::env::args().skip(1);
    let trials = args.next().and_then(|s| s.parse().ok()).unwrap_or(10_000);
    let seed = args.next().and_then(|s| s.parse().ok()).unwrap_or(2024);
    let plan = ScalingPlan {
        n_list: vec![63, 127, 255],
        word: WordRule::Exact { k_min: 4 },
        window: WindowRule::Exponent { beta: 0.5 },
        mu: MuRule::Fixed { mu: 0.05 },
        norm: Default::default(),
        trials,
        seed,
    };
    let family = |_n: usize| {
        let channel = Dmc::bsc(0.05)?;
        let nominal_alpha = framesync::sync_threshold(&channel).alpha.finite().unwrap_or(f64::INFINITY);
        Ok(FamilyMember { channel, nominal_alpha })
    };
    let t = std::time::Instant::now();
    let rows = scaling_experiment(family, &plan)?;
    print!("{}", scaling_csv(&rows, false));
    for r in &rows {
        eprintln!("n={} log_a={:.1} skip_bias<={:.1e} counts={:?}", r.n, r.log_a, r.report.skip_bias_bound, r.report.counts);
    }
    eprintln!("elapsed {:.1}s", t.elapsed().as_secs_f64());
    Ok(())
}
