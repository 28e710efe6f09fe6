//! Fixed sync energy `E = N P` on AWGN with a one-bit quantizer: longer,
//! quieter sync words at a fixed asynchrony window `A = e^{E / 4 sigma^2}`.
//!
//! cargo run --release --example energy_scaling -- [energy] [mu_fraction] [trials] [seed]

use framesync::continuous::{quantize_to_dmc, AwgnSpec, ContinuousChannel, QuantizationGrid};
use framesync::sim::{scaling_csv, scaling_experiment, FamilyMember, MuRule, ScalingPlan, WindowRule, WordRule};
use framesync::Result;

fn main() -> Result<()> {
    let mut args = std::env::args().skip(1);
    let mut next = |d: f64| args.next().and_then(|s| s.parse().ok()).unwrap_or(d);
    let energy = next(40.0);
    let fraction = next(0.5);
    let trials = next(10_000.0) as u64;
    let seed = next(7.0) as u64;
    let noise_var = 1.0;

    let family = move |n: usize| {
        let power = energy / n as f64;
        let amp = power.sqrt();
        // two cells split at the midpoint between the idle and sync means
        let grid = QuantizationGrid::new(0.0, amp, 2)?;
        let q = quantize_to_dmc(&ContinuousChannel::Awgn(AwgnSpec::new(power, noise_var)?), &grid)?;
        Ok(FamilyMember { channel: q.dmc, nominal_alpha: power / (2.0 * noise_var) })
    };
    let plan = ScalingPlan {
        n_list: vec![32, 64, 128],
        word: WordRule::Padded { k: 4 },
        window: WindowRule::Fixed { log_a: energy / (4.0 * noise_var) },
        mu: MuRule::GapFraction { fraction },
        norm: Default::default(),
        trials,
        seed,
    };
    let t = std::time::Instant::now();
    let rows = scaling_experiment(family, &plan)?;
    print!("{}", scaling_csv(&rows, true));
    for r in &rows {
        eprintln!("n={} k={} mu={:.4} counts={:?}", r.n, r.k, r.mu, r.report.counts);
    }
    eprintln!("elapsed {:.1}s", t.elapsed().as_secs_f64());
    Ok(())
}
