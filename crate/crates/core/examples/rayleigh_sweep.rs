//! Ratio of the Rayleigh-fading threshold to the unfaded AWGN threshold
//! across SNR. The ratio approaches `2 sigma_H^2` at low SNR.
//!
//! cargo run --release --example rayleigh_sweep

use framesync::thresholds::{rayleigh_ratio_sweep, sweep_csv};
use framesync::Result;

fn main() -> Result<()> {
    let snr = [0.01, 0.1, 1.0, 10.0, 100.0];
    let rows = rayleigh_ratio_sweep(&snr, &[0.5, 1.0, 2.0], 1.0)?;
    print!("{}", sweep_csv(&rows));
    for r in rows.iter().filter(|r| r.snr == snr[0]) {
        eprintln!("sigma_h={} ratio={:.4} asymptote={}", r.sigma_h, r.ratio.unwrap_or(f64::NAN), 2.0 * r.sigma_h * r.sigma_h);
    }
    Ok(())
}
