//! Acceptance checks. Each criterion prints one PASS/FAIL line with its
//! runtime; the process fails if any criterion fails.

use std::collections::HashMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use framesync::channel::{on_off_composite, Dmc};
use framesync::cli::{default_eps_grid, default_p_grid, default_snr_grid, run, PRESETS};
use framesync::continuous::{quantize_to_dmc, AwgnSpec, ContinuousChannel, QuantizationGrid};
use framesync::sequences::{
    build_sync_word, generate_mlsr, min_shift_hamming_distance, ShiftMetric, SyncWord, X0, X1,
};
use framesync::sim::{exact_error_probability, monte_carlo, TrialConfig};
use framesync::thresholds::{lemma1_check, rayleigh_ratio_sweep, sync_threshold};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Box<dyn FnOnce() -> Result<String, String>>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn bsc_closed(eps: f64) -> f64 {
    (1.0 - eps) * ((1.0 - eps) / eps).ln() + eps * (eps / (1.0 - eps)).ln()
}

fn composite_closed(p: f64, eps: f64) -> f64 {
    let ep = (1.0 - p) * (1.0 - eps) + p * eps;
    let t = |w: f64, r: f64| if w == 0.0 { 0.0 } else { w * r.ln() };
    t(1.0 - ep, (1.0 - ep) / eps) + t(ep, ep / (1.0 - eps))
}

fn alpha(ch: &Dmc) -> f64 {
    sync_threshold(ch).alpha.finite().expect("finite threshold")
}

fn criterion_1() -> Result<String, String> {
    let mut worst: f64 = 0.0;
    for i in 1..=49 {
        let eps = i as f64 / 100.0;
        let err = (alpha(&Dmc::bsc(eps).unwrap()) - bsc_closed(eps)).abs();
        worst = worst.max(err);
        ensure(err <= 1e-12, || format!("eps={eps}: error {err:e}"))?;
    }
    Ok(format!("max error {worst:.2e} over 49 values"))
}

fn criterion_2() -> Result<String, String> {
    let mut worst: f64 = 0.0;
    let mut cells = 0;
    for &p in &default_p_grid() {
        for &eps in &default_eps_grid() {
            let got = alpha(&on_off_composite(p, &Dmc::bsc(eps).unwrap()).unwrap());
            let err = (got - composite_closed(p, eps)).abs();
            worst = worst.max(err);
            cells += 1;
            ensure(err <= 1e-12, || format!("p={p} eps={eps}: error {err:e}"))?;
        }
    }
    Ok(format!("max error {worst:.2e} over {cells} cells"))
}

fn random_full_support(rng: &mut ChaCha8Rng, n_in: usize, n_out: usize) -> Dmc {
    let rows = (0..n_in)
        .map(|_| {
            let w: Vec<f64> = (0..n_out).map(|_| rng.random_range(0.01..1.0)).collect();
            let s: f64 = w.iter().sum();
            w.iter().map(|x| x / s).collect()
        })
        .collect();
    Dmc::from_rows(rows).unwrap()
}

fn criterion_3() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut cells = 0;
    let mut min_slack = f64::INFINITY;
    let mut mismatches = Vec::new();
    for &p in &default_p_grid() {
        let mut noises: Vec<Dmc> = default_eps_grid().iter().map(|&e| Dmc::bsc(e).unwrap()).collect();
        for i in 0..100 {
            noises.push(random_full_support(&mut rng, 2 + i % 3, 2 + i % 4));
        }
        for noise in &noises {
            let r = lemma1_check(p, noise).unwrap();
            let a_q = r.alpha_composite.finite().unwrap();
            let bound = r.p_times_alpha_noise.finite().unwrap();
            ensure(a_q <= bound + 1e-12, || format!("p={p}: {a_q} > {bound}"))?;
            if r.argmax_composite != r.argmax_noise {
                mismatches.push(format!("p={p} {}x{}: {} vs {}", noise.num_inputs(), noise.num_outputs(), r.argmax_composite, r.argmax_noise));
            }
            min_slack = min_slack.min(bound - a_q);
            cells += 1;
        }
    }
    ensure(mismatches.is_empty(), || {
        format!(
            "bound holds in all {cells} cells (min slack {min_slack:.2e}) but the argmax differs in {} cells, e.g. {}",
            mismatches.len(),
            mismatches[0]
        )
    })?;
    Ok(format!("{cells} cells, min slack {min_slack:.2e}"))
}

fn criterion_4() -> Result<String, String> {
    let noise = Dmc::bsc(1e-6).unwrap();
    let base = alpha(&noise);
    let (mut worst, mut worst_p) = (0.0f64, 0.0);
    for i in 1..=9 {
        let p = i as f64 / 10.0;
        let dev = (alpha(&on_off_composite(p, &noise).unwrap()) / base - p).abs();
        if dev > worst {
            (worst, worst_p) = (dev, p);
        }
    }
    ensure(worst <= 1e-3, || format!("max |ratio - p| = {worst:.4} at p={worst_p}, tolerance 1e-3"))?;
    Ok(format!("max |ratio - p| = {worst:.2e}"))
}

fn criterion_5() -> Result<String, String> {
    let mut notes = Vec::new();
    for (power, var) in [(1.0, 1.0), (4.0, 1.0), (10.0, 2.0)] {
        let ch = ContinuousChannel::Awgn(AwgnSpec::new(power, var).unwrap());
        let q = quantize_to_dmc(&ch, &QuantizationGrid::default_for(&ch)).map_err(|e| e.to_string())?;
        let got = alpha(&q.dmc);
        let target = power / (2.0 * var);
        let rel = (got - target).abs() / target;
        ensure(rel <= 0.01, || format!("P={power} s2={var}: {got} vs {target}"))?;
        notes.push(format!("{got:.6}/{target}"));
    }
    Ok(notes.join(", "))
}

fn criterion_6() -> Result<String, String> {
    let snr = default_snr_grid();
    let rows = rayleigh_ratio_sweep(&snr, &[1.0, 2.0, 3.0], 1.0).map_err(|e| e.to_string())?;
    let mut notes = Vec::new();
    for sh in [1.0, 2.0, 3.0] {
        let ratios: Vec<f64> = rows
            .iter()
            .filter(|r| r.sigma_h == sh)
            .map(|r| r.ratio.ok_or(format!("sigma_h={sh} snr={}: quadrature failed", r.snr)))
            .collect::<Result<_, _>>()?;
        ensure(ratios.windows(2).all(|w| w[1] > w[0]), || format!("sigma_h={sh}: not monotone {ratios:?}"))?;
        let at100 = rows.iter().find(|r| r.sigma_h == sh && r.snr == 100.0).unwrap().ratio.unwrap();
        let target = 2.0 * sh * sh;
        ensure((at100 - target).abs() <= 0.1 * target, || format!("sigma_h={sh}: {at100} vs {target}"))?;
        notes.push(format!("{at100:.3}/{target}"));
    }
    Ok(format!("ratios at SNR 100: {}", notes.join(", ")))
}

fn criterion_7() -> Result<String, String> {
    for m in 2..=10u32 {
        let s = generate_mlsr(m, 1).map_err(|e| e.to_string())?;
        let period = (1usize << m) - 1;
        ensure(s.len() == period, || format!("m={m}: length {}", s.len()))?;
        // the generator output repeats with the claimed period and no shorter one
        let mut lfsr = framesync::sequences::Lfsr::new(m, 1).unwrap();
        let two: Vec<u8> = (0..2 * period).map(|_| lfsr.next_bit()).collect();
        ensure(two[..period] == two[period..], || format!("m={m}: not periodic"))?;
        for d in 1..period {
            if period % d == 0 {
                ensure((0..period).any(|i| s[i] != s[(i + d) % period]), || format!("m={m}: period {d}"))?;
            }
        }
        let ones = s.iter().filter(|&&b| b == 1).count();
        ensure(ones == 1 << (m - 1), || format!("m={m}: {ones} ones"))?;
        for shift in 1..period {
            let d = (0..period).filter(|&i| s[i] != s[(i + shift) % period]).count();
            ensure(d == 1 << (m - 1), || format!("m={m} shift={shift}: distance {d}"))?;
        }
    }
    Ok("m = 2..10 exhaustive".into())
}

fn criterion_8() -> Result<String, String> {
    let mut words = 0;
    let mut worst = f64::INFINITY;
    for k in [3usize, 4, 8] {
        for m in 2..=12u32 {
            let prefix = (1usize << m) - 1;
            for n in prefix * k..prefix * k + k {
                if n > 1 << 12 {
                    continue;
                }
                let w = build_sync_word(n, k).map_err(|e| e.to_string())?;
                let (d, _) = min_shift_hamming_distance(&w, ShiftMetric::IdlePadded);
                let ratio = d as f64 / n as f64;
                ensure(ratio >= 1.0 / (4.0 * k as f64), || format!("K={k} N={n}: ratio {ratio}"))?;
                worst = worst.min(ratio * 4.0 * k as f64);
                words += 1;
            }
        }
    }
    Ok(format!("{words} words, min ratio * 4K = {worst:.3}"))
}

// Brute-force oracle for tiny instances: enumerate every output sequence,
// run the decision rule directly on it, and weight by its probability.
fn brute_force_error(ch: &Dmc, word: &[usize], a: usize, mu: f64) -> f64 {
    let n = word.len();
    let limit = a + n - 1;
    let len = limit + n - 1;
    let n1 = word.iter().filter(|&&x| x == X1).count() as f64 / n as f64;
    let freq = [1.0 - n1, n1];
    let typical = |ys: &[usize]| {
        let mut counts = [[0.0f64; 2]; 2];
        for (&x, &y) in word.iter().zip(ys) {
            counts[x][y] += 1.0 / n as f64;
        }
        (0..2).all(|x| (0..2).all(|y| (counts[x][y] - freq[x] * ch.prob(x, y)).abs() <= mu))
    };
    let mut p_err = 0.0;
    for v in 1..=a {
        for code in 0u32..(1 << len) {
            let ys: Vec<usize> = (0..len).map(|i| ((code >> i) & 1) as usize).collect();
            let prob: f64 = (0..len)
                .map(|i| {
                    let slot = i + 1;
                    let x = if slot >= v && slot < v + n { word[slot - v] } else { X0 };
                    ch.prob(x, ys[i])
                })
                .product();
            let hat = (1..=limit).find(|&t| typical(&ys[t - 1..t - 1 + n]));
            if hat != Some(v) {
                p_err += prob;
            }
        }
    }
    p_err / a as f64
}

fn criterion_9() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut inside = 0;
    let mut worst: f64 = 0.0;
    for cfg_i in 0..40 {
        let ch = random_full_support(&mut rng, 2, 2);
        let n = rng.random_range(2..=4usize);
        let word: Vec<usize> = (0..n).map(|_| if rng.random_bool(0.6) { X1 } else { X0 }).collect();
        let a = rng.random_range(1..=6u64);
        let mu = rng.random_range(0.05..0.5);
        let exact_brute = brute_force_error(&ch, &word, a as usize, mu);
        let cfg = TrialConfig::new(a, SyncWord::custom(word.clone()).unwrap(), ch.clone(), mu).unwrap();
        let exact = exact_error_probability(&cfg).map_err(|e| e.to_string())?.p_err;
        let diff = (exact - exact_brute).abs();
        worst = worst.max(diff);
        ensure(diff <= 1e-12, || format!("config {cfg_i}: recursion {exact} vs enumeration {exact_brute}"))?;
        let mc = monte_carlo(&cfg, 100_000, 1000 + cfg_i).map_err(|e| e.to_string())?;
        if mc.wilson_ci_95.p_err.contains(exact) {
            inside += 1;
        }
    }
    ensure(inside >= 38, || format!("only {inside}/40 intervals cover the exact value"))?;
    Ok(format!("max |recursion - enumeration| = {worst:.1e}, coverage {inside}/40"))
}

struct PresetRun {
    json: Vec<u8>,
    csv: Option<Vec<u8>>,
}

fn run_preset(name: &str, threads: usize) -> Result<PresetRun, String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let json = dir.path().join("out.json");
    let csv = dir.path().join("out.csv");
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().map_err(|e| e.to_string())?;
    let mut err = Vec::new();
    let code = pool.install(|| {
        run(
            ["framesync", "simulate", "--preset", name, "--out", json.to_str().unwrap(), "--csv", csv.to_str().unwrap()],
            &mut std::io::sink(),
            &mut err,
        )
    });
    ensure(code == 0, || format!("preset {name} exited {code}: {}", String::from_utf8_lossy(&err)))?;
    Ok(PresetRun {
        json: std::fs::read(&json).map_err(|e| e.to_string())?,
        csv: std::fs::read(&csv).ok(),
    })
}

fn csv_rows(bytes: &[u8]) -> Vec<HashMap<String, String>> {
    let text = String::from_utf8_lossy(bytes);
    let mut lines = text.lines();
    let header: Vec<String> = lines.next().unwrap().split(',').map(str::to_string).collect();
    lines.map(|l| header.iter().cloned().zip(l.split(',').map(str::to_string)).collect()).collect()
}

fn f(row: &HashMap<String, String>, key: &str) -> f64 {
    row[key].parse().unwrap()
}

/// Point estimates strictly decreasing, and the last below the first by more
/// than the two interval half-widths.
fn decreasing(rows: &[HashMap<String, String>]) -> Result<String, String> {
    let p: Vec<f64> = rows.iter().map(|r| f(r, "p_err")).collect();
    let hw: Vec<f64> = rows.iter().map(|r| 0.5 * (f(r, "ci_hi") - f(r, "ci_lo"))).collect();
    let summary = rows
        .iter()
        .map(|r| format!("N={} p_err={:.4} [{:.4}, {:.4}]", r["n"], f(r, "p_err"), f(r, "ci_lo"), f(r, "ci_hi")))
        .collect::<Vec<_>>()
        .join("; ");
    ensure(p.windows(2).all(|w| w[1] < w[0]), || format!("not strictly decreasing: {summary}"))?;
    let last = p.len() - 1;
    ensure(p[0] - p[last] > hw[0] + hw[last], || format!("decrease within CI half-widths: {summary}"))?;
    Ok(summary)
}

fn criterion_10(preset: &PresetRun) -> Result<String, String> {
    let rows = csv_rows(preset.csv.as_ref().ok_or("no csv")?);
    let ns: Vec<&str> = rows.iter().map(|r| r["n"].as_str()).collect();
    ensure(ns == ["63", "127", "255"], || format!("unexpected rows {ns:?}"))?;
    let bsc = alpha(&Dmc::bsc(0.05).unwrap());
    for r in &rows {
        let n: f64 = f(r, "n");
        let a: f64 = f(r, "a");
        let expect = (0.5 * bsc * n).exp().round();
        ensure(((a - expect) / expect).abs() < 1e-12, || format!("N={n}: A = {a}, expected {expect}"))?;
    }
    let trials = serde_json::from_slice::<serde_json::Value>(&preset.json).unwrap()["rows"][0]["report"]["trials"]
        .as_u64()
        .unwrap();
    ensure(trials == 10_000, || format!("{trials} trials"))?;
    decreasing(&rows)
}

fn criterion_11(preset: &PresetRun) -> Result<String, String> {
    let rows = csv_rows(preset.csv.as_ref().ok_or("no csv")?);
    let ns: Vec<&str> = rows.iter().map(|r| r["n"].as_str()).collect();
    ensure(ns == ["32", "64", "128"], || format!("unexpected rows {ns:?}"))?;
    let doc: serde_json::Value = serde_json::from_slice(&preset.json).unwrap();
    let energy: f64 = doc["config"]["energy"].as_str().unwrap().parse().unwrap();
    for r in &rows {
        let threshold = f(r, "threshold");
        let a = f(r, "a");
        // E / (2 sigma^2) = 2 ln A with sigma^2 = 1
        ensure((threshold.ln() - energy / 2.0).abs() < 1e-9, || format!("threshold {threshold}"))?;
        ensure((a.ln() - energy / 4.0).abs() < 1e-3, || format!("A = {a}"))?;
        println!("      N={} feasibility e^(E/2s2) = {:.6e} vs A = {}", r["n"], threshold, r["a"]);
    }
    decreasing(&rows)
}

fn criterion_12(first: &HashMap<&str, PresetRun>) -> Result<String, String> {
    for (name, _) in PRESETS {
        let again = run_preset(name, 4)?;
        let base = &first[name];
        ensure(base.json == again.json, || format!("{name}: JSON differs between runs"))?;
        ensure(base.csv == again.csv, || format!("{name}: CSV differs between runs"))?;
    }
    Ok(format!("{} presets byte-identical at 1 and 4 threads", PRESETS.len()))
}

fn report(id: &str, budget: Duration, check: Check, failures: &mut Vec<String>) {
    let start = Instant::now();
    let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
        Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
    });
    let elapsed = start.elapsed();
    let outcome = outcome.and_then(|msg| {
        if elapsed > budget {
            Err(format!("took {:.1}s, budget {:.0}s ({msg})", elapsed.as_secs_f64(), budget.as_secs_f64()))
        } else {
            Ok(msg)
        }
    });
    match outcome {
        Ok(msg) => println!("criterion {id:>2}: PASS ({:.2}s) {msg}", elapsed.as_secs_f64()),
        Err(msg) => {
            println!("criterion {id:>2}: FAIL ({:.2}s) {msg}", elapsed.as_secs_f64());
            failures.push(id.to_string());
        }
    }
}

fn main() {
    let secs = Duration::from_secs;
    let mut failures = Vec::new();
    report("1", secs(1), Box::new(criterion_1), &mut failures);
    report("2", secs(1), Box::new(criterion_2), &mut failures);
    report("3", secs(5), Box::new(criterion_3), &mut failures);
    report("4", secs(1), Box::new(criterion_4), &mut failures);
    report("5", secs(10), Box::new(criterion_5), &mut failures);
    report("6", secs(60), Box::new(criterion_6), &mut failures);
    report("7", secs(5), Box::new(criterion_7), &mut failures);
    report("8", secs(30), Box::new(criterion_8), &mut failures);
    report("9", secs(120), Box::new(criterion_9), &mut failures);

    let mut presets: HashMap<&str, PresetRun> = HashMap::new();
    let mut preset_times: HashMap<&str, Duration> = HashMap::new();
    for (name, _) in PRESETS {
        let start = Instant::now();
        match run_preset(name, 1) {
            Ok(r) => {
                presets.insert(name, r);
            }
            Err(e) => println!("preset {name}: {e}"),
        }
        preset_times.insert(name, start.elapsed());
    }
    let timed = |name: &str, f: fn(&PresetRun) -> Result<String, String>, presets: &HashMap<&str, PresetRun>| -> Check {
        let run = presets.get(name).map(|r| PresetRun { json: r.json.clone(), csv: r.csv.clone() });
        let spent = preset_times.get(name).copied().unwrap_or_default();
        Box::new(move || {
            let msg = f(run.as_ref().ok_or("preset run failed")?)?;
            Ok(format!("{msg} (preset run {:.1}s)", spent.as_secs_f64()))
        })
    };
    let t10 = preset_times.get("bsc-scaling").copied().unwrap_or_default();
    let t11 = preset_times.get("energy-scaling").copied().unwrap_or_default();
    report("10", secs(600).saturating_sub(t10), timed("bsc-scaling", criterion_10, &presets), &mut failures);
    report("11", secs(600).saturating_sub(t11), timed("energy-scaling", criterion_11, &presets), &mut failures);
    let all_ran = presets.len() == PRESETS.len();
    report(
        "12",
        secs(1200),
        Box::new(move || {
            ensure(all_ran, || "a preset failed to run".into())?;
            criterion_12(&presets)
        }),
        &mut failures,
    );

    if failures.is_empty() {
        println!("all acceptance criteria passed");
    } else {
        println!("failed criteria: {}", failures.join(", "));
        std::process::exit(1);
    }
}
