//! Sync words built from a maximal-length shift register sequence, and
//! their distance to shifted copies of themselves.
//!
//! cargo run --release --example sync_words

use framesync::sequences::{build_padded_sync_word, build_sync_word, generate_mlsr, min_shift_hamming_distance, ShiftMetric};
use framesync::Result;

fn main() -> Result<()> {
    let m = generate_mlsr(4, 1)?;
    println!("mlsr(4) = {}", m.iter().map(u8::to_string).collect::<String>());
    for (n, k) in [(21, 3), (63, 4), (124, 4), (255, 8)] {
        let w = build_sync_word(n, k)?;
        let (d, tau) = min_shift_hamming_distance(&w, ShiftMetric::IdlePadded);
        let (d_overlap, _) = min_shift_hamming_distance(&w, ShiftMetric::Overlap);
        println!("exact  n={n:<4} k={k} prefix={:?} min_shift={d} at {tau} (overlap {d_overlap}) ratio={:.3}", w.prefix_len(), d as f64 / n as f64);
    }
    for n in [32, 64, 128] {
        let w = build_padded_sync_word(n, 4)?;
        let (d, tau) = min_shift_hamming_distance(&w, ShiftMetric::IdlePadded);
        println!("padded n={n:<4} k=4 prefix={:?} min_shift={d} at {tau}", w.prefix_len());
    }
    println!("{}", build_sync_word(21, 3)?.to_line());
    Ok(())
}
