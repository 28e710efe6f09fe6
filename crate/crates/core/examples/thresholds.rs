//! Synchronization thresholds of the standard channels.
//!
//! cargo run --release --example thresholds

use framesync::channel::on_off_composite;
use framesync::continuous::{AwgnSpec, RayleighAwgnSpec};
use framesync::thresholds::{awgn_threshold, bsc_threshold_closed_form, rayleigh_threshold_numeric};
use framesync::{sync_threshold, Dmc, Result};

fn main() -> Result<()> {
    for eps in [0.01, 0.05, 0.1, 0.2, 0.4] {
        let r = sync_threshold(&Dmc::bsc(eps)?);
        println!("bsc eps={eps:<5} alpha={} closed_form={:.12}", r.alpha, bsc_threshold_closed_form(eps)?);
    }

    // ON-OFF keying in front of a BSC: the sync symbol is sent only with probability p
    let noise = Dmc::bsc(0.1)?;
    for p in [0.25, 0.5, 0.75, 1.0] {
        let r = sync_threshold(&on_off_composite(p, &noise)?);
        println!("on-off p={p:<4} alpha={}", r.alpha);
    }

    // a ternary channel where the second input is the distinguishable one
    let ternary = Dmc::from_rows(vec![vec![0.8, 0.1, 0.1], vec![0.1, 0.8, 0.1], vec![0.3, 0.3, 0.4]])?;
    let r = sync_threshold(&ternary);
    println!("ternary alpha={} argmax={} per_symbol={:?}", r.alpha, r.argmax_symbol, r.per_symbol_divergences);

    for snr in [1.0, 10.0] {
        let awgn = awgn_threshold(&AwgnSpec::new(snr, 1.0)?);
        let fading = rayleigh_threshold_numeric(&RayleighAwgnSpec::new(snr, 1.0, 1.0)?)?;
        println!("snr={snr:<4} awgn={awgn:.6} rayleigh(sigma_h=1)={fading:.6}");
    }
    Ok(())
}
