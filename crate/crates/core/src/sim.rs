//! Single-trial simulation, Monte Carlo harness and scaling experiments.
//!
//! A trial draws the arrival slot `v` uniformly from `1..=A`, transmits the
//! sync word on slots `v..v+N-1` and the idle symbol elsewhere, and runs the
//! sequential decoder up to the scan limit (default `A + N - 1`).
//!
//! Windows that see only idle input are statistically identical, so when a
//! stretch of them is too long to simulate one by one (the asynchrony
//! window can be astronomically large) the stretch is skipped: the
//! probability that any of its `M` windows fires is at most `M q0`, where
//! `q0` is the exact typicality probability of one idle window. A stretch is
//! skipped only if that bound is below [`TrialConfig::skip_tolerance`]; the
//! bound is carried into the report so the bias it allows stays visible.

use num_bigint::BigUint;
use num_traits::{FromPrimitive, One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::channel::{sample_row, Dmc};
use crate::decoder::{BitStream, Norm, TypicalityDecoder};
use crate::error::{Error, Result};
use crate::sequences::SyncWord;

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Trial classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum ErrorClass {
    Correct,
    /// Declaration at `t <= v - N` or `t > v`.
    E1,
    /// Declaration at `v - N < t < v`.
    E2,
    /// No declaration by the scan limit.
    E3,
}

impl ErrorClass {
    /// Class of a declaration at `v_hat` (or none) for arrival `v`.
    pub fn classify(v_true: &BigUint, v_hat: Option<&BigUint>, n: usize) -> Self {
        match v_hat {
            None => Self::E3,
            Some(t) if t == v_true => Self::Correct,
            Some(t) if t < v_true && v_true - t < BigUint::from(n) => Self::E2,
            Some(_) => Self::E1,
        }
    }
}

#[derive(Debug, Clone)]
pub struct TrialConfig {
    /// Asynchrony window `A`.
    pub a: BigUint,
    pub word: SyncWord,
    pub channel: Dmc,
    pub mu: f64,
    pub norm: Norm,
    /// Last decision slot; `None` means `A + N - 1`.
    pub scan_limit: Option<BigUint>,
    /// Longest idle-window stretch simulated explicitly.
    pub explicit_budget: u64,
    /// Largest false-alarm bound a skipped stretch may carry.
    pub skip_tolerance: f64,
}

impl TrialConfig {
    pub fn new(a: impl Into<BigUint>, word: SyncWord, channel: Dmc, mu: f64) -> Result<Self> {
        let cfg = Self {
            a: a.into(),
            word,
            channel,
            mu,
            norm: Norm::Linf,
            scan_limit: None,
            explicit_budget: 1 << 22,
            skip_tolerance: 1e-9,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.a.is_zero() {
            return Err(Error::InvalidConfig("A must be >= 1".into()));
        }
        if !(self.mu > 0.0) {
            return Err(Error::InvalidConfig(format!("mu = {} must be > 0", self.mu)));
        }
        if let Some(l) = &self.scan_limit {
            if *l < BigUint::from(self.word.len()) {
                return Err(Error::InvalidConfig("scan limit shorter than the sync word".into()));
            }
        }
        if let Some(&x) = self.word.symbols().iter().find(|&&x| x >= self.channel.num_inputs()) {
            return Err(Error::IndexOutOfRange { index: x, size: self.channel.num_inputs() });
        }
        Ok(())
    }

    pub fn scan_limit(&self) -> BigUint {
        self.scan_limit.clone().unwrap_or_else(|| &self.a + self.word.len() - 1u32)
    }

    pub fn decoder(&self) -> Result<TypicalityDecoder> {
        TypicalityDecoder::new(self.word.clone(), self.channel.clone(), self.mu, self.norm)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    pub v_true: BigUint,
    pub v_hat: Option<BigUint>,
    pub class: ErrorClass,
    /// Slot of the last output read before declaring (`v_hat + N - 1`).
    pub stop_time: Option<BigUint>,
    /// Upper bound on the probability that a skipped idle stretch would
    /// have fired; zero when everything was simulated.
    pub skip_bound: f64,
}

/// Uniform draw from `1..=a`.
pub fn uniform_slot<R: Rng + ?Sized>(a: &BigUint, rng: &mut R) -> BigUint {
    if let Some(a64) = a.to_u64() {
        return BigUint::from(rng.random_range(1..=a64));
    }
    let bits = a.bits();
    let digits = bits.div_ceil(32) as usize;
    let top_mask = if bits % 32 == 0 { u32::MAX } else { (1u32 << (bits % 32)) - 1 };
    loop {
        let mut d: Vec<u32> = (0..digits).map(|_| rng.next_u32()).collect();
        *d.last_mut().expect("at least one digit") &= top_mask;
        let x = BigUint::from_slice(&d);
        if &x < a {
            return x + 1u32;
        }
    }
}

fn to_i64(v: &BigUint) -> Option<i64> {
    v.to_i64()
}

/// Everything a trial needs that does not depend on the draw.
pub struct TrialPlan {
    config: TrialConfig,
    decoder: TypicalityDecoder,
    idle_prob: f64,
    scan_limit: BigUint,
}

impl TrialPlan {
    pub fn new(config: TrialConfig) -> Result<Self> {
        config.validate()?;
        let decoder = config.decoder()?;
        let idle_prob = decoder.idle_window_typical_prob();
        let scan_limit = config.scan_limit();
        Ok(Self { config, decoder, idle_prob, scan_limit })
    }

    pub fn config(&self) -> &TrialConfig {
        &self.config
    }

    /// Exact typicality probability of one idle window.
    pub fn idle_window_prob(&self) -> f64 {
        self.idle_prob
    }

    fn skip(&self, windows: &BigUint) -> Result<f64> {
        let m = windows.to_f64().unwrap_or(f64::INFINITY);
        let bound = m * self.idle_prob;
        if bound > self.config.skip_tolerance {
            return Err(Error::SimulationInfeasible(format!(
                "{windows} idle windows exceed the explicit budget and their false-alarm bound {bound:.3e} \
                 exceeds the skip tolerance {:.1e}",
                self.config.skip_tolerance
            )));
        }
        Ok(bound)
    }

    /// Simulate one transmission.
    pub fn run<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<TrialOutcome> {
        let n = self.config.word.len();
        let v = uniform_slot(&self.config.a, rng);
        let budget = BigUint::from(self.config.explicit_budget);
        let last = &self.scan_limit;
        let mut skip_bound = 0.0;

        // windows t <= v - N see idle input only
        let idle_before = if v > BigUint::from(n) { (&v - n).min(last.clone()) } else { BigUint::zero() };
        let first_offset: i64 = if idle_before <= budget {
            // t = 1 corresponds to offset 1 - v
            1 - to_i64(&v).expect("v is small when the idle stretch is explicit")
        } else {
            skip_bound += self.skip(&idle_before)?;
            -(n as i64 - 1)
        };

        // windows t >= v + N see idle input only
        let last_offset: i64 = if *last < v {
            -to_i64(&(&v - last)).ok_or_else(|| Error::SimulationInfeasible("scan limit far below arrival".into()))?
        } else {
            let ahead = last - &v;
            let idle_after = if ahead >= BigUint::from(n) { &ahead - n + 1u32 } else { BigUint::zero() };
            if idle_after <= budget {
                to_i64(&ahead).expect("explicit stretch fits in i64")
            } else {
                n as i64 - 1
            }
        };

        let hit = self.scan(first_offset, last_offset, rng);
        let v_hat = match hit {
            Some(off) => Some(offset_slot(&v, off)),
            None => {
                let ahead = if *last >= v { last - &v } else { BigUint::zero() };
                if ahead > BigUint::from(last_offset.max(0) as u64) {
                    let idle_after = &ahead - BigUint::from(last_offset.max(0) as u64);
                    skip_bound += self.skip(&idle_after)?;
                }
                None
            }
        };
        let class = ErrorClass::classify(&v, v_hat.as_ref(), n);
        let stop_time = v_hat.as_ref().map(|t| t + n - 1u32);
        Ok(TrialOutcome { v_true: v, v_hat, class, stop_time, skip_bound })
    }

    /// Scan windows at offsets `first..=last` from the arrival, generating
    /// outputs lazily in slot order.
    fn scan<R: Rng + ?Sized>(&self, first: i64, last: i64, rng: &mut R) -> Option<i64> {
        if first > last {
            return None;
        }
        let word = self.config.word.symbols();
        let n = word.len() as i64;
        let channel = &self.config.channel;
        let input_at = |d: i64| if (0..n).contains(&d) { word[d as usize] } else { 0 };
        let total = (last - first + n) as usize;
        if self.decoder.binary_fast_path() {
            let mut bits = BitStream::with_capacity(total);
            for w in 0..=(last - first) {
                while (bits.len() as i64) < w + n {
                    let d = first + bits.len() as i64;
                    bits.push(sample_row(channel.row(input_at(d)), rng) == 1);
                }
                if self.decoder.is_typical_bits(&bits, w as usize) {
                    return Some(first + w);
                }
            }
        } else {
            let mut ys: Vec<usize> = Vec::with_capacity(total);
            for w in 0..=(last - first) {
                while (ys.len() as i64) < w + n {
                    let d = first + ys.len() as i64;
                    ys.push(sample_row(channel.row(input_at(d)), rng));
                }
                if self.decoder.is_typical(&ys[w as usize..(w + n) as usize]) {
                    return Some(first + w);
                }
            }
        }
        None
    }
}

fn offset_slot(v: &BigUint, off: i64) -> BigUint {
    if off >= 0 {
        v + off as u64
    } else {
        v - off.unsigned_abs()
    }
}

/// One simulated transmission.
pub fn simulate_trial<R: Rng + ?Sized>(config: &TrialConfig, rng: &mut R) -> Result<TrialOutcome> {
    TrialPlan::new(config.clone())?.run(rng)
}

/// Binomial proportion interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn contains(&self, p: f64) -> bool {
        self.lo <= p && p <= self.hi
    }

    pub fn half_width(&self) -> f64 {
        0.5 * (self.hi - self.lo)
    }
}

/// Wilson score interval for `successes` out of `trials` at quantile `z`.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> Interval {
    if trials == 0 {
        return Interval { lo: 0.0, hi: 1.0 };
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    // the bounds are exactly 0 and 1 at the extremes; rounding would leave them just inside
    let lo = if successes == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if successes == trials { 1.0 } else { (center + half).min(1.0) };
    Interval { lo, hi }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct ClassCounts {
    pub correct: u64,
    pub e1: u64,
    pub e2: u64,
    pub e3: u64,
}

impl ClassCounts {
    pub fn add(&mut self, c: ErrorClass) {
        match c {
            ErrorClass::Correct => self.correct += 1,
            ErrorClass::E1 => self.e1 += 1,
            ErrorClass::E2 => self.e2 += 1,
            ErrorClass::E3 => self.e3 += 1,
        }
    }

    pub fn total(&self) -> u64 {
        self.correct + self.e1 + self.e2 + self.e3
    }

    pub fn errors(&self) -> u64 {
        self.e1 + self.e2 + self.e3
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassIntervals {
    pub p_err: Interval,
    pub p_e1: Interval,
    pub p_e2: Interval,
    pub p_e3: Interval,
}

/// Monte Carlo estimate of the error rates.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorReport {
    pub trials: u64,
    pub counts: ClassCounts,
    pub p_err: f64,
    pub p_e1: f64,
    pub p_e2: f64,
    pub p_e3: f64,
    pub wilson_ci_95: ClassIntervals,
    /// Mean over trials of the skipped-stretch false-alarm bound: the most
    /// the estimate of `p_err` can be biased low by skipping.
    pub skip_bias_bound: f64,
}

impl ErrorReport {
    fn from_counts(counts: ClassCounts, skip_bias_bound: f64) -> Self {
        let n = counts.total();
        let rate = |k: u64| k as f64 / n as f64;
        let ci = |k: u64| wilson_interval(k, n, Z95);
        Self {
            trials: n,
            counts,
            p_err: rate(counts.errors()),
            p_e1: rate(counts.e1),
            p_e2: rate(counts.e2),
            p_e3: rate(counts.e3),
            wilson_ci_95: ClassIntervals {
                p_err: ci(counts.errors()),
                p_e1: ci(counts.e1),
                p_e2: ci(counts.e2),
                p_e3: ci(counts.e3),
            },
            skip_bias_bound,
        }
    }
}

/// Random stream for trial `index` under `master_seed`.
pub fn trial_rng(master_seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(index);
    rng
}

/// Run `trials` independent trials. Trial `i` uses stream `i` of
/// `master_seed`, so the report does not depend on thread count.
pub fn monte_carlo(config: &TrialConfig, trials: u64, master_seed: u64) -> Result<ErrorReport> {
    if trials == 0 {
        return Err(Error::InvalidConfig("trials must be >= 1".into()));
    }
    let plan = TrialPlan::new(config.clone())?;
    let outcomes: Vec<(ErrorClass, f64)> = (0..trials)
        .into_par_iter()
        .map(|i| plan.run(&mut trial_rng(master_seed, i)).map(|o| (o.class, o.skip_bound)))
        .collect::<Result<_>>()?;
    let mut counts = ClassCounts::default();
    let mut bound = 0.0;
    for (c, b) in &outcomes {
        counts.add(*c);
        bound += b;
    }
    Ok(ErrorReport::from_counts(counts, bound / trials as f64))
}

/// Exact error probabilities of a small instance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExactErrors {
    pub p_err: f64,
    pub p_e1: f64,
    pub p_e2: f64,
    pub p_e3: f64,
}

/// Exact error probabilities by a forward recursion over the last `N - 1`
/// outputs, averaged over the arrival slot. Needs `A` and the scan limit to
/// fit in `u64` and `|Y|^(N-1)` states in memory.
pub fn exact_error_probability(config: &TrialConfig) -> Result<ExactErrors> {
    config.validate()?;
    let a = config.a.to_u64().ok_or_else(|| Error::SimulationInfeasible("A too large for exact recursion".into()))?;
    let limit = config
        .scan_limit()
        .to_u64()
        .ok_or_else(|| Error::SimulationInfeasible("scan limit too large for exact recursion".into()))?;
    let decoder = config.decoder()?;
    let word = config.word.symbols();
    let n = word.len();
    let ny = config.channel.num_outputs();
    let states = ny
        .checked_pow(n as u32 - 1)
        .filter(|s| *s <= 1 << 24)
        .ok_or_else(|| Error::SimulationInfeasible("state space too large for exact recursion".into()))?;
    let mut acc = [0.0f64; 3];
    let mut window = vec![0usize; n];
    for v in 1..=a {
        let input = |slot: u64| {
            if slot >= v && slot < v + n as u64 {
                word[(slot - v) as usize]
            } else {
                0
            }
        };
        // dist[s]: probability of not having stopped, with the last n-1
        // outputs encoded base ny (oldest most significant)
        let mut dist = vec![0.0f64; states];
        dist[0] = 1.0;
        let mut filled = vec![0.0f64; states];
        for slot in 1..n as u64 {
            filled.iter_mut().for_each(|p| *p = 0.0);
            let row = config.channel.row(input(slot));
            for (s, &p) in dist.iter().enumerate() {
                if p == 0.0 {
                    continue;
                }
                for (y, &q) in row.iter().enumerate() {
                    filled[(s * ny + y) % states] += p * q;
                }
            }
            std::mem::swap(&mut dist, &mut filled);
        }
        let mut e = [0.0f64; 3];
        for t in 1..=limit {
            let row = config.channel.row(input(t + n as u64 - 1));
            filled.iter_mut().for_each(|p| *p = 0.0);
            for (s, &p) in dist.iter().enumerate() {
                if p == 0.0 {
                    continue;
                }
                let mut code = s;
                for i in (0..n - 1).rev() {
                    window[i] = code % ny;
                    code /= ny;
                }
                for (y, &q) in row.iter().enumerate() {
                    if q == 0.0 {
                        continue;
                    }
                    window[n - 1] = y;
                    let mass = p * q;
                    if decoder.is_typical(&window) {
                        match ErrorClass::classify(&BigUint::from(v), Some(&BigUint::from(t)), n) {
                            ErrorClass::Correct => {}
                            ErrorClass::E1 => e[0] += mass,
                            ErrorClass::E2 => e[1] += mass,
                            ErrorClass::E3 => unreachable!("declared trials are never E3"),
                        }
                    } else {
                        filled[(s * ny + y) % states] += mass;
                    }
                }
            }
            std::mem::swap(&mut dist, &mut filled);
        }
        let missed: f64 = dist.iter().sum();
        acc[0] += e[0];
        acc[1] += e[1];
        acc[2] += missed;
    }
    let af = a as f64;
    let (p_e1, p_e2, p_e3) = (acc[0] / af, acc[1] / af, acc[2] / af);
    Ok(ExactErrors { p_err: (p_e1 + p_e2 + p_e3).min(1.0), p_e1, p_e2, p_e3 })
}

/// How the asynchrony window grows along a scaling sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum WindowRule {
    /// `A = round(e^{beta alpha N})` with `alpha` the discrete threshold.
    Exponent { beta: f64 },
    /// `A = round(e^{log_a})` for every `N`.
    Fixed { log_a: f64 },
}

/// How the typicality tolerance is chosen per row.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum MuRule {
    Fixed { mu: f64 },
    /// `fraction` times the largest cell gap between the reference table and
    /// the table expected from an idle window.
    GapFraction { fraction: f64 },
}

impl MuRule {
    pub fn resolve(&self, word: &SyncWord, channel: &Dmc) -> f64 {
        match *self {
            MuRule::Fixed { mu } => mu,
            MuRule::GapFraction { fraction } => {
                let n = word.len() as f64;
                let mut freq = vec![0.0; channel.num_inputs()];
                word.symbols().iter().for_each(|&x| freq[x] += 1.0 / n);
                let idle = channel.idle_row();
                let mut gap: f64 = 0.0;
                for (x, f) in freq.iter().enumerate() {
                    for (q, q0) in channel.row(x).iter().zip(idle) {
                        gap = gap.max((f * (q - q0)).abs());
                    }
                }
                fraction * gap
            }
        }
    }
}

/// One member of a channel family along a scaling sweep.
#[derive(Debug, Clone)]
pub struct FamilyMember {
    pub channel: Dmc,
    /// Threshold used for the feasibility column: `alpha N > ln A`.
    pub nominal_alpha: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingRow {
    pub n: usize,
    pub k: usize,
    #[serde(serialize_with = "big_as_string")]
    pub a: BigUint,
    pub log_a: f64,
    pub alpha: f64,
    pub nominal_alpha: f64,
    pub mu: f64,
    pub report: ErrorReport,
    /// `nominal_alpha * N`; the run is on the achievable side when this
    /// exceeds `ln A`.
    pub sync_exponent: f64,
    pub feasible: bool,
}

fn big_as_string<S: serde::Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

/// Sync-word construction constant per row: the smallest `K >= k_min` for
/// which `N` is constructible.
pub fn construction_k(n: usize, k_min: usize) -> Result<usize> {
    (k_min.max(1)..=n / 3)
        .find(|&k| crate::sequences::build_sync_word(n, k).is_ok())
        .ok_or(Error::IncompatibleLength { n, k: k_min, prefix: n / k_min.max(1) })
}

/// Asynchrony window `round(e^{log_a})`, at least 1.
pub fn window_from_log(log_a: f64) -> Result<BigUint> {
    let a = log_a.exp().round();
    if !a.is_finite() {
        return Err(Error::InvalidConfig(format!("A = e^{log_a} overflows")));
    }
    Ok(BigUint::from_f64(a.max(1.0)).unwrap_or_else(BigUint::one))
}

/// Sync word used for each row of a scaling sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum WordRule {
    /// Exact construction with the smallest valid `K >= k_min`.
    Exact { k_min: usize },
    /// Longest m-sequence prefix fitting in `N / k`, padded with `x(1)`.
    Padded { k: usize },
}

impl WordRule {
    pub fn build(&self, n: usize) -> Result<SyncWord> {
        match *self {
            WordRule::Exact { k_min } => crate::sequences::build_sync_word(n, construction_k(n, k_min)?),
            WordRule::Padded { k } => crate::sequences::build_padded_sync_word(n, k),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ScalingPlan {
    pub n_list: Vec<usize>,
    pub word: WordRule,
    pub window: WindowRule,
    pub mu: MuRule,
    pub norm: Norm,
    pub trials: u64,
    pub seed: u64,
}

/// One Monte Carlo row per `N`. Row `i` uses master seed `seed + i`.
pub fn scaling_experiment<F>(family: F, plan: &ScalingPlan) -> Result<Vec<ScalingRow>>
where
    F: Fn(usize) -> Result<FamilyMember>,
{
    let mut rows = Vec::with_capacity(plan.n_list.len());
    scaling_experiment_into(family, plan, &mut rows)?;
    Ok(rows)
}

/// Like [`scaling_experiment`], appending rows as they finish so that a
/// failure part way through leaves the completed rows in `rows`.
pub fn scaling_experiment_into<F>(family: F, plan: &ScalingPlan, rows: &mut Vec<ScalingRow>) -> Result<()>
where
    F: Fn(usize) -> Result<FamilyMember>,
{
    for (i, &n) in plan.n_list.iter().enumerate() {
        let member = family(n)?;
        let report = crate::thresholds::sync_threshold(&member.channel);
        let alpha = report.alpha.finite().ok_or_else(|| {
            Error::InvalidConfig("scaling needs a channel with a finite threshold".into())
        })?;
        let word = plan.word.build(n)?;
        let k = word.construction().map_or(0, |c| c.k);
        let word = word.with_sync_symbol(report.argmax_symbol);
        let log_a = match plan.window {
            WindowRule::Exponent { beta } => beta * alpha * n as f64,
            WindowRule::Fixed { log_a } => log_a,
        };
        let a = window_from_log(log_a)?;
        let mu = plan.mu.resolve(&word, &member.channel);
        let mut cfg = TrialConfig::new(a.clone(), word, member.channel, mu)?;
        cfg.norm = plan.norm;
        let report = monte_carlo(&cfg, plan.trials, plan.seed.wrapping_add(i as u64))?;
        let sync_exponent = member.nominal_alpha * n as f64;
        rows.push(ScalingRow {
            n,
            k,
            a,
            log_a,
            alpha,
            nominal_alpha: member.nominal_alpha,
            mu,
            report,
            sync_exponent,
            feasible: sync_exponent > log_a,
        });
    }
    Ok(())
}

/// CSV `n,a,alpha,p_err,ci_lo,ci_hi,p_e1,p_e2,p_e3`, plus the feasibility
/// columns `log_a,sync_exponent,threshold,feasible` when `with_feasibility`
/// is set; `threshold` is `e^{sync_exponent}`, to be compared with `a`.
pub fn scaling_csv(rows: &[ScalingRow], with_feasibility: bool) -> String {
    use crate::format::fmt_num;
    let mut out = String::from("n,a,alpha,p_err,ci_lo,ci_hi,p_e1,p_e2,p_e3");
    if with_feasibility {
        out.push_str(",log_a,sync_exponent,threshold,feasible");
    }
    out.push('\n');
    for r in rows {
        let ci = r.report.wilson_ci_95.p_err;
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}",
            r.n,
            r.a,
            fmt_num(r.alpha),
            fmt_num(r.report.p_err),
            fmt_num(ci.lo),
            fmt_num(ci.hi),
            fmt_num(r.report.p_e1),
            fmt_num(r.report.p_e2),
            fmt_num(r.report.p_e3)
        ));
        if with_feasibility {
            out.push_str(&format!(
                ",{},{},{},{}",
                fmt_num(r.log_a),
                fmt_num(r.sync_exponent),
                fmt_num(r.sync_exponent.exp()),
                r.feasible
            ));
        }
        out.push('\n');
    }
    out
}
