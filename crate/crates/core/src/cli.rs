//! Command-line front end. `run` is the whole program; the binary only
//! forwards `std::env::args` and the process streams.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigUint;
use serde::Serialize;
use serde_json::{json, Value};

use crate::channel::{on_off_composite, Dmc};
use crate::continuous::{
    quantize_to_dmc, AwgnSpec, ContinuousChannel, QuantizationGrid, RayleighAwgnSpec,
};
use crate::decoder::{default_mu, Norm};
use crate::error::{Error, Result};
use crate::format::{fmt_num, write_atomic};
use crate::sequences::{
    build_padded_sync_word, build_sync_word, min_shift_hamming_distance, nearest_valid_length, ShiftMetric,
    SyncWord,
};
use crate::sim::{
    monte_carlo, scaling_csv, scaling_experiment_into, window_from_log, FamilyMember, MuRule, ScalingPlan,
    ScalingRow, TrialConfig, WindowRule, WordRule,
};
use crate::thresholds::{
    awgn_threshold, lemma1_check, rayleigh_ratio_sweep, rayleigh_threshold_numeric, sweep_csv, sync_threshold,
    Divergence, Method, ThresholdReport,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

/// Built-in simulation presets, by name.
pub const PRESETS: &[(&str, &str)] = &[
    ("bsc-scaling", include_str!("../presets/bsc-scaling.conf")),
    ("energy-scaling", include_str!("../presets/energy-scaling.conf")),
    ("bsc-single", include_str!("../presets/bsc-single.conf")),
    ("small-instance", include_str!("../presets/small-instance.conf")),
];

#[derive(Parser, Debug)]
#[command(name = "framesync", version, about = "Frame synchronization thresholds, sync words and decoder simulations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Synchronization threshold of a channel, as JSON.
    Threshold(ThresholdArgs),
    /// ON-OFF fading bound over a (p, eps) grid with BSC noise, as CSV.
    #[command(name = "lemma1-grid")]
    Lemma1Grid(Lemma1Args),
    /// Rayleigh/AWGN threshold ratio over SNR, as CSV.
    RayleighSweep(SweepArgs),
    /// Monte Carlo run or scaling sweep from a config file or preset.
    Simulate(SimulateArgs),
    /// Sync word and its shift-distance analysis.
    Sequence(SequenceArgs),
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct Source {
    /// BSC crossover probability.
    #[arg(long, value_name = "EPS")]
    bsc: Option<f64>,
    /// ON-OFF fading followed by a BSC: `p=<p> eps=<eps>`.
    #[arg(long, num_args = 1.., value_name = "KEY=VALUE")]
    onoff_bsc: Option<Vec<String>>,
    /// Matrix file: header `I O`, then one row per input.
    #[arg(long, value_name = "PATH")]
    file: Option<PathBuf>,
    /// Inline matrix, rows separated by `;`, e.g. "0.9 0.1; 0.2 0.8".
    #[arg(long, value_name = "ROWS")]
    matrix: Option<String>,
    /// AWGN: `power=<P> noise_var=<s2>`.
    #[arg(long, num_args = 1.., value_name = "KEY=VALUE")]
    awgn: Option<Vec<String>>,
    /// Rayleigh-faded AWGN: `power=<P> noise_var=<s2> sigma_h=<s>`.
    #[arg(long, num_args = 1.., value_name = "KEY=VALUE")]
    rayleigh: Option<Vec<String>>,
}

#[derive(Args, Debug)]
struct ThresholdArgs {
    #[command(flatten)]
    source: Source,
    /// For continuous channels, quantize on the default grid and report
    /// the discrete threshold instead.
    #[arg(long)]
    quantize: bool,
}

#[derive(Args, Debug)]
struct Lemma1Args {
    /// Comma-separated p values (default 0.02, 0.04, ..., 1).
    #[arg(long, value_delimiter = ',')]
    p: Option<Vec<f64>>,
    /// Comma-separated eps values (default 0.01, 0.02, ..., 0.49).
    #[arg(long, value_delimiter = ',')]
    eps: Option<Vec<f64>>,
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long, value_delimiter = ',')]
    snr: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
    sigma_h: Vec<f64>,
    #[arg(long, default_value_t = 1.0)]
    noise_var: f64,
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    /// Config file with one `key = value` per line.
    #[arg(long, value_name = "PATH", conflicts_with_all = ["preset", "replay"])]
    config: Option<PathBuf>,
    /// Built-in config: bsc-scaling, energy-scaling, bsc-single, small-instance.
    #[arg(long, conflicts_with = "replay")]
    preset: Option<String>,
    /// Re-run the config echoed in an earlier JSON output.
    #[arg(long, value_name = "OUTPUT_JSON")]
    replay: Option<PathBuf>,
    /// Override a config key.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// JSON report path (stdout if absent).
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Scaling table path (scaling mode only).
    #[arg(long, value_name = "PATH")]
    csv: Option<PathBuf>,
    /// Add wall-clock time to the JSON report. Makes output non-reproducible.
    #[arg(long)]
    timing: bool,
}

#[derive(Args, Debug)]
struct SequenceArgs {
    /// Target length; the longest constructible length not above it is used.
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    /// Shift comparison: padded or overlap.
    #[arg(long, default_value = "padded")]
    metric: String,
}

/// Run the program with `args` (including the program name). Returns the
/// exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_VALIDATION } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { write!(err, "{text}") } else { write!(out, "{text}") };
            return code;
        }
    };
    let result = match cli.command {
        Command::Threshold(a) => cmd_threshold(&a, out),
        Command::Lemma1Grid(a) => cmd_lemma1_grid(&a, out, err),
        Command::RayleighSweep(a) => cmd_rayleigh_sweep(&a, out),
        Command::Simulate(a) => cmd_simulate(&a, out),
        Command::Sequence(a) => cmd_sequence(&a, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if e.is_runtime() {
                EXIT_RUNTIME
            } else {
                EXIT_VALIDATION
            }
        }
    }
}

fn emit(out: &mut dyn Write, path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => write_atomic(p, text.as_bytes())?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

/// Parse `key=value` tokens (whitespace or comma separated).
fn key_values(tokens: &[String]) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for tok in tokens.iter().flat_map(|t| t.split([',', ' '])).filter(|t| !t.is_empty()) {
        let (k, v) = tok
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("expected key=value, got {tok:?}")))?;
        map.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(map)
}

fn take_f64(map: &mut BTreeMap<String, String>, key: &str) -> Result<Option<f64>> {
    map.remove(key)
        .map(|v| v.parse::<f64>().map_err(|_| Error::Parse(format!("{key} = {v:?} is not a number"))))
        .transpose()
}

fn need_f64(map: &mut BTreeMap<String, String>, key: &str) -> Result<f64> {
    take_f64(map, key)?.ok_or_else(|| Error::InvalidConfig(format!("missing {key}")))
}

fn no_leftovers(map: &BTreeMap<String, String>, what: &str) -> Result<()> {
    match map.keys().next() {
        Some(k) => Err(Error::InvalidConfig(format!("unknown key {k:?} for {what}"))),
        None => Ok(()),
    }
}

fn parse_matrix(rows: &str) -> Result<Dmc> {
    let rows: Vec<Vec<f64>> = rows
        .split(';')
        .filter(|r| !r.trim().is_empty())
        .map(|r| {
            r.split([' ', ','])
                .filter(|t| !t.is_empty())
                .map(|t| t.parse::<f64>().map_err(|_| Error::Parse(format!("bad probability {t:?}"))))
                .collect()
        })
        .collect::<Result<_>>()?;
    Dmc::from_rows(rows)
}

fn continuous_report(alpha: f64, method: Method) -> ThresholdReport {
    ThresholdReport {
        alpha: Divergence::Finite(alpha),
        argmax_symbol: 1,
        method,
        per_symbol_divergences: vec![Divergence::Finite(0.0), Divergence::Finite(alpha)],
    }
}

fn cmd_threshold(args: &ThresholdArgs, out: &mut dyn Write) -> Result<i32> {
    let s = &args.source;
    let continuous = |ch: ContinuousChannel| -> Result<Option<ThresholdReport>> {
        if args.quantize {
            let q = quantize_to_dmc(&ch, &QuantizationGrid::default_for(&ch))?;
            return Ok(Some(sync_threshold(&q.dmc)));
        }
        Ok(Some(match ch {
            ContinuousChannel::Awgn(a) => continuous_report(awgn_threshold(&a), Method::ClosedForm),
            ContinuousChannel::Rayleigh(r) => continuous_report(rayleigh_threshold_numeric(&r)?, Method::Quadrature),
        }))
    };
    let report = if let Some(eps) = s.bsc {
        sync_threshold(&Dmc::bsc(eps)?)
    } else if let Some(tokens) = &s.onoff_bsc {
        let mut kv = key_values(tokens)?;
        let p = need_f64(&mut kv, "p")?;
        let eps = need_f64(&mut kv, "eps")?;
        no_leftovers(&kv, "--onoff-bsc")?;
        sync_threshold(&on_off_composite(p, &Dmc::bsc(eps)?)?)
    } else if let Some(path) = &s.file {
        sync_threshold(&Dmc::from_matrix_text(&std::fs::read_to_string(path).map_err(|e| {
            Error::InvalidConfig(format!("cannot read {}: {e}", path.display()))
        })?)?)
    } else if let Some(rows) = &s.matrix {
        sync_threshold(&parse_matrix(rows)?)
    } else if let Some(tokens) = &s.awgn {
        let mut kv = key_values(tokens)?;
        let power = need_f64(&mut kv, "power")?;
        let noise_var = take_f64(&mut kv, "noise_var")?.unwrap_or(1.0);
        no_leftovers(&kv, "--awgn")?;
        continuous(ContinuousChannel::Awgn(AwgnSpec::new(power, noise_var)?))?.expect("report")
    } else if let Some(tokens) = &s.rayleigh {
        let mut kv = key_values(tokens)?;
        let power = need_f64(&mut kv, "power")?;
        let noise_var = take_f64(&mut kv, "noise_var")?.unwrap_or(1.0);
        let scale = take_f64(&mut kv, "sigma_h")?.unwrap_or(1.0);
        no_leftovers(&kv, "--rayleigh")?;
        continuous(ContinuousChannel::Rayleigh(RayleighAwgnSpec::new(power, noise_var, scale)?))?.expect("report")
    } else {
        unreachable!("clap requires one source")
    };
    let text = serde_json::to_string_pretty(&report).map_err(|e| Error::Io(e.to_string()))?;
    writeln!(out, "{text}")?;
    Ok(EXIT_OK)
}

/// `0.02, 0.04, ..., 1`.
pub fn default_p_grid() -> Vec<f64> {
    (1..=50).map(|i| i as f64 / 50.0).collect()
}

/// `0.01, 0.02, ..., 0.49`.
pub fn default_eps_grid() -> Vec<f64> {
    (1..=49).map(|i| i as f64 / 100.0).collect()
}

/// CSV `p,eps,alpha_q,p_alpha_qn,slack,holds` over the grid, plus whether
/// every row holds.
pub fn lemma1_grid_csv(p_list: &[f64], eps_list: &[f64]) -> Result<(String, bool)> {
    if p_list.is_empty() || eps_list.is_empty() {
        return Err(Error::InvalidConfig("p and eps lists must be non-empty".into()));
    }
    let div = |d: Divergence| d.finite().map_or_else(|| "inf".to_string(), fmt_num);
    let mut csv = String::from("p,eps,alpha_q,p_alpha_qn,slack,holds\n");
    let mut all = true;
    for &p in p_list {
        for &eps in eps_list {
            let r = lemma1_check(p, &Dmc::bsc(eps)?)?;
            all &= r.holds;
            csv.push_str(&format!(
                "{},{},{},{},{},{}\n",
                fmt_num(p),
                fmt_num(eps),
                div(r.alpha_composite),
                div(r.p_times_alpha_noise),
                r.slack.map_or_else(|| "nan".to_string(), fmt_num),
                r.holds
            ));
        }
    }
    Ok((csv, all))
}

fn cmd_lemma1_grid(args: &Lemma1Args, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let p = args.p.clone().unwrap_or_else(default_p_grid);
    let eps = args.eps.clone().unwrap_or_else(default_eps_grid);
    let (csv, all) = lemma1_grid_csv(&p, &eps)?;
    emit(out, args.out.as_deref(), &csv)?;
    if !all {
        writeln!(err, "error: the bound is violated in at least one row")?;
        return Ok(EXIT_RUNTIME);
    }
    Ok(EXIT_OK)
}

/// SNR grid used by the sweep when none is given.
pub fn default_snr_grid() -> Vec<f64> {
    vec![0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0, 200.0]
}

fn cmd_rayleigh_sweep(args: &SweepArgs, out: &mut dyn Write) -> Result<i32> {
    let snr = args.snr.clone().unwrap_or_else(default_snr_grid);
    let rows = rayleigh_ratio_sweep(&snr, &args.sigma_h, args.noise_var)?;
    emit(out, args.out.as_deref(), &sweep_csv(&rows))?;
    if rows.iter().any(|r| r.alpha_q.is_none()) {
        return Ok(EXIT_RUNTIME);
    }
    Ok(EXIT_OK)
}

fn cmd_sequence(args: &SequenceArgs, out: &mut dyn Write) -> Result<i32> {
    let metric = match args.metric.as_str() {
        "padded" => ShiftMetric::IdlePadded,
        "overlap" => ShiftMetric::Overlap,
        other => return Err(Error::Parse(format!("unknown metric {other:?} (expected padded or overlap)"))),
    };
    let n = nearest_valid_length(args.n, args.k)?;
    let word = build_sync_word(n, args.k)?;
    let c = word.construction().expect("constructed word");
    let (d, shift) = min_shift_hamming_distance(&word, metric);
    writeln!(out, "n = {n}")?;
    writeln!(out, "k = {}", args.k)?;
    writeln!(out, "degree = {}", c.degree)?;
    writeln!(out, "prefix = {}", c.prefix_len)?;
    writeln!(out, "tail = {}", n - c.prefix_len)?;
    writeln!(out, "min_shift_distance = {d}")?;
    writeln!(out, "min_shift = {shift}")?;
    writeln!(out, "distance_ratio = {}", fmt_num(d as f64 / n as f64))?;
    writeln!(out, "word = {}", word.to_line())?;
    Ok(EXIT_OK)
}

/// Flat `key = value` configuration. Blank lines and `#` comments are
/// ignored; later keys override earlier ones.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("line {}: expected `key = value`, got {line:?}", i + 1)))?;
        map.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(map)
}

const KNOWN_KEYS: &[&str] = &[
    "mode",
    "channel",
    "family",
    "eps",
    "p",
    "power",
    "noise_var",
    "energy",
    "margin",
    "channel_file",
    "n",
    "n_list",
    "k",
    "word_rule",
    "word",
    "a",
    "log_a",
    "beta",
    "mu",
    "mu_fraction",
    "norm",
    "trials",
    "seed",
    "scan_limit",
    "explicit_budget",
    "skip_tolerance",
];

/// Typed view of a simulation config.
struct SimConfig<'a> {
    map: &'a BTreeMap<String, String>,
}

impl<'a> SimConfig<'a> {
    fn get(&self, key: &str) -> Option<&'a str> {
        self.map.get(key).map(String::as_str)
    }

    fn parse<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>> {
        self.get(key)
            .map(|v| v.parse::<T>().map_err(|_| Error::Parse(format!("{key} = {v:?} is malformed"))))
            .transpose()
    }

    fn need<T: std::str::FromStr>(&self, key: &str) -> Result<T> {
        self.parse(key)?.ok_or_else(|| Error::InvalidConfig(format!("missing key {key}")))
    }

    fn list(&self, key: &str) -> Result<Vec<usize>> {
        let v = self.get(key).ok_or_else(|| Error::InvalidConfig(format!("missing key {key}")))?;
        v.split(',')
            .map(|t| t.trim().parse().map_err(|_| Error::Parse(format!("{key}: bad entry {t:?}"))))
            .collect()
    }

    fn noise_var(&self) -> Result<f64> {
        Ok(self.parse("noise_var")?.unwrap_or(1.0))
    }

    fn norm(&self) -> Result<Norm> {
        self.get("norm").map_or(Ok(Norm::Linf), str::parse)
    }

    fn trials(&self) -> Result<u64> {
        let t: u64 = self.need("trials")?;
        if t == 0 {
            return Err(Error::InvalidConfig("trials must be >= 1".into()));
        }
        Ok(t)
    }

    fn channel(&self) -> Result<Dmc> {
        match self.get("channel").unwrap_or("bsc") {
            "bsc" => Dmc::bsc(self.need("eps")?),
            "onoff-bsc" => on_off_composite(self.need("p")?, &Dmc::bsc(self.need("eps")?)?),
            "awgn-1bit" => one_bit_awgn(self.need("power")?, self.noise_var()?),
            "file" => {
                let path: String = self.need("channel_file")?;
                let text = std::fs::read_to_string(&path)
                    .map_err(|e| Error::InvalidConfig(format!("cannot read {path}: {e}")))?;
                Dmc::from_matrix_text(&text)
            }
            other => Err(Error::InvalidConfig(format!("unknown channel {other:?}"))),
        }
    }

    fn word_rule(&self) -> Result<WordRule> {
        let k = self.parse("k")?.unwrap_or(4);
        match self.get("word_rule").unwrap_or("exact") {
            "exact" => Ok(WordRule::Exact { k_min: k }),
            "padded" => Ok(WordRule::Padded { k }),
            other => Err(Error::InvalidConfig(format!("unknown word_rule {other:?}"))),
        }
    }

    fn mu_rule(&self) -> Result<Option<MuRule>> {
        match (self.parse::<f64>("mu")?, self.parse::<f64>("mu_fraction")?) {
            (Some(_), Some(_)) => Err(Error::InvalidConfig("give mu or mu_fraction, not both".into())),
            (Some(mu), None) => Ok(Some(MuRule::Fixed { mu })),
            (None, Some(fraction)) => Ok(Some(MuRule::GapFraction { fraction })),
            (None, None) => Ok(None),
        }
    }
}

/// AWGN with a one-bit quantizer at the midpoint `sqrt(P) / 2`.
pub fn one_bit_awgn(power: f64, noise_var: f64) -> Result<Dmc> {
    let amp = power.sqrt();
    let ch = ContinuousChannel::Awgn(AwgnSpec::new(power, noise_var)?);
    let grid = if amp > 0.0 { QuantizationGrid::new(0.0, amp, 2)? } else { QuantizationGrid::new(-1.0, 1.0, 2)? };
    Ok(quantize_to_dmc(&ch, &grid)?.dmc)
}

/// Load the config for `simulate`: preset, file or replayed output, then
/// `--set` overrides.
fn load_config(args: &SimulateArgs) -> Result<BTreeMap<String, String>> {
    let mut map = if let Some(name) = &args.preset {
        let text = PRESETS
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, t)| *t)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown preset {name:?}")))?;
        parse_config(text)?
    } else if let Some(path) = &args.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidConfig(format!("cannot read {}: {e}", path.display())))?;
        parse_config(&text)?
    } else if let Some(path) = &args.replay {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidConfig(format!("cannot read {}: {e}", path.display())))?;
        let v: Value = serde_json::from_str(&text).map_err(|e| Error::Parse(format!("replay file: {e}")))?;
        let cfg = v
            .get("config")
            .and_then(Value::as_object)
            .ok_or_else(|| Error::Parse("replay file has no config object".into()))?;
        cfg.iter()
            .map(|(k, v)| match v {
                Value::String(s) => Ok((k.clone(), s.clone())),
                other => Err(Error::Parse(format!("replay config {k} is not a string: {other}"))),
            })
            .collect::<Result<_>>()?
    } else {
        return Err(Error::InvalidConfig("give --config, --preset or --replay".into()));
    };
    for kv in &args.set {
        let (k, v) = kv.split_once('=').ok_or_else(|| Error::Parse(format!("--set expects key=value, got {kv:?}")))?;
        map.insert(k.trim().to_string(), v.trim().to_string());
    }
    if let Some(k) = map.keys().find(|k| !KNOWN_KEYS.contains(&k.as_str())) {
        return Err(Error::InvalidConfig(format!("unknown config key {k:?}")));
    }
    Ok(map)
}

#[derive(Serialize)]
struct SingleOutput<'a> {
    config: &'a BTreeMap<String, String>,
    n: usize,
    a: String,
    alpha: Option<f64>,
    mu: f64,
    #[serde(flatten)]
    report: &'a crate::sim::ErrorReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    wall_time_s: Option<f64>,
}

fn to_json<T: Serialize>(v: &T) -> Result<String> {
    serde_json::to_string_pretty(v).map(|s| s + "\n").map_err(|e| Error::Io(e.to_string()))
}

fn cmd_simulate(args: &SimulateArgs, out: &mut dyn Write) -> Result<i32> {
    let map = load_config(args)?;
    let cfg = SimConfig { map: &map };
    let start = Instant::now();
    match cfg.get("mode").unwrap_or("single") {
        "single" => simulate_single(&cfg, args, start, out),
        "scaling" => simulate_scaling(&cfg, args, start, out),
        other => Err(Error::InvalidConfig(format!("unknown mode {other:?}"))),
    }
}

fn simulate_single(cfg: &SimConfig, args: &SimulateArgs, start: Instant, out: &mut dyn Write) -> Result<i32> {
    let channel = cfg.channel()?;
    let threshold = sync_threshold(&channel);
    let word = match cfg.get("word") {
        Some(line) => SyncWord::from_line(line)?,
        None => {
            let n: usize = cfg.need("n")?;
            match cfg.word_rule()? {
                WordRule::Exact { k_min } => build_sync_word(n, k_min)?,
                WordRule::Padded { k } => build_padded_sync_word(n, k)?,
            }
        }
    }
    .with_sync_symbol(threshold.argmax_symbol);
    let n = word.len();
    let a: BigUint = match (cfg.get("a"), cfg.parse::<f64>("log_a")?, cfg.parse::<f64>("beta")?) {
        (Some(a), None, None) => a.parse().map_err(|_| Error::Parse(format!("a = {a:?} is not a positive integer")))?,
        (None, Some(log_a), None) => window_from_log(log_a)?,
        (None, None, Some(beta)) => {
            let alpha = threshold
                .alpha
                .finite()
                .ok_or_else(|| Error::InvalidConfig("beta needs a finite threshold".into()))?;
            window_from_log(beta * alpha * n as f64)?
        }
        _ => return Err(Error::InvalidConfig("give exactly one of a, log_a, beta".into())),
    };
    let mu = match cfg.mu_rule()? {
        Some(rule) => rule.resolve(&word, &channel),
        None => default_mu(&channel),
    };
    let mut tc = TrialConfig::new(a.clone(), word, channel, mu)?;
    tc.norm = cfg.norm()?;
    tc.scan_limit = cfg
        .get("scan_limit")
        .map(|s| s.parse::<BigUint>().map_err(|_| Error::Parse(format!("scan_limit = {s:?} is malformed"))))
        .transpose()?;
    if let Some(b) = cfg.parse("explicit_budget")? {
        tc.explicit_budget = b;
    }
    if let Some(t) = cfg.parse("skip_tolerance")? {
        tc.skip_tolerance = t;
    }
    tc.validate()?;
    let trials = cfg.trials()?;
    let seed: u64 = cfg.need("seed")?;
    let report = monte_carlo(&tc, trials, seed)?;
    let output = SingleOutput {
        config: cfg.map,
        n,
        a: a.to_string(),
        alpha: threshold.alpha.finite(),
        mu,
        report: &report,
        wall_time_s: args.timing.then(|| start.elapsed().as_secs_f64()),
    };
    emit(out, args.out.as_deref(), &to_json(&output)?)?;
    Ok(EXIT_OK)
}

fn scaling_plan(cfg: &SimConfig) -> Result<(ScalingPlan, bool)> {
    let family = cfg.get("family").unwrap_or("bsc");
    let energy_variant = family == "awgn-energy";
    let window = match (cfg.parse::<f64>("beta")?, cfg.parse::<f64>("log_a")?) {
        (Some(beta), None) => {
            if !(beta > 0.0 && beta < 1.0) {
                return Err(Error::InvalidConfig(format!("beta = {beta} must lie in (0, 1)")));
            }
            WindowRule::Exponent { beta }
        }
        (None, Some(log_a)) => WindowRule::Fixed { log_a },
        (None, None) if energy_variant => {
            let energy: f64 = cfg.need("energy")?;
            let margin: f64 = cfg.parse("margin")?.unwrap_or(2.0);
            if !(margin > 0.0) {
                return Err(Error::InvalidConfig("margin must be > 0".into()));
            }
            WindowRule::Fixed { log_a: energy / (2.0 * cfg.noise_var()?) / margin }
        }
        _ => return Err(Error::InvalidConfig("give exactly one of beta, log_a".into())),
    };
    let mu = cfg.mu_rule()?.ok_or_else(|| Error::InvalidConfig("scaling needs mu or mu_fraction".into()))?;
    let n_list = cfg.list("n_list")?;
    if n_list.is_empty() {
        return Err(Error::InvalidConfig("n_list is empty".into()));
    }
    let plan = ScalingPlan {
        n_list,
        word: cfg.word_rule()?,
        window,
        mu,
        norm: cfg.norm()?,
        trials: cfg.trials()?,
        seed: cfg.need("seed")?,
    };
    Ok((plan, energy_variant))
}

fn simulate_scaling(cfg: &SimConfig, args: &SimulateArgs, start: Instant, out: &mut dyn Write) -> Result<i32> {
    let (plan, energy_variant) = scaling_plan(cfg)?;
    let family_name = cfg.get("family").unwrap_or("bsc");
    let noise_var = cfg.noise_var()?;
    let mut rows: Vec<ScalingRow> = Vec::new();
    let outcome = match family_name {
        "bsc" => {
            let eps: f64 = cfg.need("eps")?;
            let channel = Dmc::bsc(eps)?;
            let nominal = sync_threshold(&channel).alpha.finite().unwrap_or(f64::INFINITY);
            scaling_experiment_into(
                |_| Ok(FamilyMember { channel: channel.clone(), nominal_alpha: nominal }),
                &plan,
                &mut rows,
            )
        }
        "awgn-energy" => {
            let energy: f64 = cfg.need("energy")?;
            if !(energy > 0.0) {
                return Err(Error::InvalidConfig("energy must be > 0".into()));
            }
            scaling_experiment_into(
                |n| {
                    let power = energy / n as f64;
                    Ok(FamilyMember {
                        channel: one_bit_awgn(power, noise_var)?,
                        nominal_alpha: awgn_threshold(&AwgnSpec::new(power, noise_var)?),
                    })
                },
                &plan,
                &mut rows,
            )
        }
        other => return Err(Error::InvalidConfig(format!("unknown family {other:?}"))),
    };
    if let Err(e) = &outcome {
        if !e.is_runtime() {
            return Err(e.clone());
        }
    }
    let mut doc = json!({ "config": cfg.map, "rows": rows });
    if let Err(e) = &outcome {
        doc["error"] = json!(e.to_string());
    }
    if args.timing {
        doc["wall_time_s"] = json!(start.elapsed().as_secs_f64());
    }
    if let Some(path) = &args.csv {
        write_atomic(path, scaling_csv(&rows, energy_variant).as_bytes())?;
    }
    emit(out, args.out.as_deref(), &to_json(&doc)?)?;
    outcome.map(|_| EXIT_OK)
}
