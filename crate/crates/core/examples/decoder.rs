//! Running the sequential typicality decoder on one received stream.
//!
//! cargo run --release --example decoder -- [seed]

use framesync::decoder::{default_mu, Norm, TypicalityDecoder};
use framesync::sequences::build_sync_word;
use framesync::{Dmc, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(7);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let channel = Dmc::bsc(0.05)?;
    let word = build_sync_word(63, 4)?;
    let mu = default_mu(&channel);
    let decoder = TypicalityDecoder::new(word.clone(), channel.clone(), mu, Norm::Linf)?;

    let a = 2000;
    let v = rng.random_range(1..=a);
    let stream: Vec<usize> = (1..a + word.len())
        .map(|t| {
            let x = if t >= v && t < v + word.len() { word.symbols()[t - v] } else { 0 };
            channel.sample_output(x, &mut rng)
        })
        .collect::<Result<_>>()?;
    let found = decoder.run(&stream, a)?.map(|i| i + 1);
    println!("mu={mu:.4} idle_typical={:.3e} sent at {v} decoded {:?}", decoder.idle_window_typical_prob(), found);
    Ok(())
}
