//! Monte Carlo error estimate against the exact error probability on a
//! small instance.
//!
//! cargo run --release --example small_instance -- [trials] [seed]

use framesync::sequences::SyncWord;
use framesync::sim::{exact_error_probability, monte_carlo, TrialConfig};
use framesync::{Dmc, Result};

fn main() -> Result<()> {
    let mut args = std::env::args().skip(1);
    let trials = args.next().and_then(|s| s.parse().ok()).unwrap_or(100_000);
    let seed = args.next().and_then(|s| s.parse().ok()).unwrap_or(1);
    let word = SyncWord::from_line("1011")?;
    let config = TrialConfig::new(6u32, word, Dmc::bsc(0.1)?, 0.25)?;
    let exact = exact_error_probability(&config)?;
    let mc = monte_carlo(&config, trials, seed)?;
    let ci = mc.wilson_ci_95.p_err;
    println!("exact  p_err={:.5} e1={:.5} e2={:.5} e3={:.5}", exact.p_err, exact.p_e1, exact.p_e2, exact.p_e3);
    println!("sim    p_err={:.5} e1={:.5} e2={:.5} e3={:.5}", mc.p_err, mc.p_e1, mc.p_e2, mc.p_e3);
    println!("95% interval [{:.5}, {:.5}] contains exact: {}", ci.lo, ci.hi, ci.contains(exact.p_err));
    Ok(())
}
