//! Quantizing a continuous channel to a DMC and comparing thresholds.
//! Finer grids approach the continuous value from below.
//!
//! cargo run --release --example quantize

use framesync::continuous::{quantize_to_dmc, AwgnSpec, ContinuousChannel, QuantizationGrid, RayleighAwgnSpec};
use framesync::thresholds::{awgn_threshold, rayleigh_threshold_numeric};
use framesync::{sync_threshold, Result};

fn main() -> Result<()> {
    let awgn = AwgnSpec::new(4.0, 1.0)?;
    let fading = RayleighAwgnSpec::new(4.0, 1.0, 1.0)?;
    println!("continuous: awgn={:.6} rayleigh={:.6}", awgn_threshold(&awgn), rayleigh_threshold_numeric(&fading)?);
    for bins in [2, 8, 64, 512] {
        for ch in [ContinuousChannel::Awgn(awgn), ContinuousChannel::Rayleigh(fading)] {
            let grid = QuantizationGrid::new(-8.0, 16.0, bins)?;
            let q = quantize_to_dmc(&ch, &grid)?;
            let name = if matches!(ch, ContinuousChannel::Awgn(_)) { "awgn" } else { "rayleigh" };
            println!("bins={bins:<4} {name:<8} alpha={} tail={:.1e}", sync_threshold(&q.dmc).alpha, q.tail_mass[1]);
        }
    }
    let default = QuantizationGrid::default_for(&ContinuousChannel::Awgn(awgn));
    println!("default grid: {}", quantize_to_dmc(&ContinuousChannel::Awgn(awgn), &default)?.sidecar_json());
    Ok(())
}
