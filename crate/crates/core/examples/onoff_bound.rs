//! Checks that ON-OFF keying never beats `p` times the noise threshold,
//! and reports where the maximizing input moves.
//!
//! cargo run --release --example onoff_bound

use framesync::thresholds::lemma1_check;
use framesync::{Dmc, Result};

fn main() -> Result<()> {
    let noise = Dmc::from_rows(vec![
        vec![0.7, 0.2, 0.1],
        vec![0.1, 0.6, 0.3],
        vec![0.05, 0.15, 0.8],
    ])?;
    let (mut worst, mut moved) = (f64::INFINITY, 0);
    let grid: Vec<f64> = (1..=20).map(|i| i as f64 / 20.0).collect();
    for &p in &grid {
        let r = lemma1_check(p, &noise)?;
        assert!(r.holds, "bound violated at p={p}");
        worst = worst.min(r.slack.unwrap_or(f64::INFINITY));
        moved += usize::from(r.argmax_composite != r.argmax_noise);
        println!("p={p:.2} alpha_q={} p_alpha_qn={} argmax={}/{}", r.alpha_composite, r.p_times_alpha_noise, r.argmax_composite, r.argmax_noise);
    }
    println!("min slack {worst:.3e}; argmax moved at {moved} of {} values of p", grid.len());
    Ok(())
}
