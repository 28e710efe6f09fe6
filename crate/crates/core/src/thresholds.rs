//! Synchronization thresholds.
//!
//! The threshold of a channel is the largest divergence
//! `D(Q(.|x) || Q(.|x(0)))` over inputs `x`, in nats. A divergence can be
//! infinite when an input reaches an output the idle symbol never produces;
//! that case is carried as [`Divergence::Infinite`] rather than as an `f64`
//! infinity.

use std::cmp::Ordering;
use std::fmt;

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::channel::{on_off_composite, Dmc};
use crate::continuous::{rayleigh_awgn_density, AwgnSpec, RayleighAwgnSpec};
use crate::error::{Error, Result};
use crate::format::fmt_num;
use crate::quadrature::{integrate_with_breaks, QuadOptions};

/// Slack allowed when checking `alpha(Q) <= p alpha(Qn)`.
pub const LEMMA1_TOL: f64 = 1e-12;

/// A KL divergence in nats.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Divergence {
    Finite(f64),
    Infinite,
}

impl Divergence {
    pub fn finite(&self) -> Option<f64> {
        match self {
            Self::Finite(v) => Some(*v),
            Self::Infinite => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Self::Infinite)
    }

    /// Value in bits.
    pub fn to_bits(self) -> Self {
        match self {
            Self::Finite(v) => Self::Finite(v / std::f64::consts::LN_2),
            Self::Infinite => Self::Infinite,
        }
    }
}

impl PartialOrd for Divergence {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (Self::Infinite, Self::Infinite) => Some(Ordering::Equal),
            (Self::Infinite, _) => Some(Ordering::Greater),
            (_, Self::Infinite) => Some(Ordering::Less),
            (Self::Finite(a), Self::Finite(b)) => a.partial_cmp(b),
        }
    }
}

impl fmt::Display for Divergence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Finite(v) => write!(f, "{}", fmt_num(*v)),
            Self::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for Divergence {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Self::Finite(v) => s.serialize_f64(*v),
            Self::Infinite => s.serialize_str("InfiniteDivergence"),
        }
    }
}

fn check_distribution(p: &[f64], name: &str) -> Result<()> {
    if let Some(v) = p.iter().find(|v| !(**v >= 0.0) || !v.is_finite()) {
        return Err(Error::DomainError(format!("{name} has invalid entry {v}")));
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::DomainError(format!("{name} sums to {sum}")));
    }
    Ok(())
}

/// `sum p_i ln(p_i / q_i)`, with `0 ln(0/q) = 0`.
pub fn kl_divergence(p: &[f64], q: &[f64]) -> Result<Divergence> {
    if p.len() != q.len() {
        return Err(Error::LengthMismatch { expected: p.len(), actual: q.len() });
    }
    check_distribution(p, "p")?;
    check_distribution(q, "q")?;
    Ok(kl_unchecked(p, q))
}

fn kl_unchecked(p: &[f64], q: &[f64]) -> Divergence {
    let mut d = 0.0;
    for (&pi, &qi) in p.iter().zip(q) {
        if pi == 0.0 {
            continue;
        }
        if qi == 0.0 {
            return Divergence::Infinite;
        }
        d += pi * (pi / qi).ln();
    }
    // rounding can leave a tiny negative sum for nearly equal rows
    Divergence::Finite(d.max(0.0))
}

/// How a threshold was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    ExactDiscrete,
    ClosedForm,
    Quadrature,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdReport {
    pub alpha: Divergence,
    /// Maximizing input `x(1)`.
    pub argmax_symbol: usize,
    pub method: Method,
    pub per_symbol_divergences: Vec<Divergence>,
}

/// Threshold of a discrete channel; ties go to the lowest input index.
pub fn sync_threshold(channel: &Dmc) -> ThresholdReport {
    let idle = channel.idle_row();
    let per: Vec<Divergence> = channel.rows().map(|row| kl_unchecked(row, idle)).collect();
    let mut best = 0;
    for (i, d) in per.iter().enumerate() {
        if d.partial_cmp(&per[best]) == Some(Ordering::Greater) {
            best = i;
        }
    }
    ThresholdReport { alpha: per[best], argmax_symbol: best, method: Method::ExactDiscrete, per_symbol_divergences: per }
}

fn open_unit(eps: f64, name: &str) -> Result<()> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::DomainError(format!("{name} = {eps} must lie in (0, 1)")));
    }
    Ok(())
}

/// `(1 - e) ln((1 - e) / e) + e ln(e / (1 - e))` for the BSC.
pub fn bsc_threshold_closed_form(eps: f64) -> Result<f64> {
    open_unit(eps, "eps")?;
    Ok((1.0 - eps) * ((1.0 - eps) / eps).ln() + eps * (eps / (1.0 - eps)).ln())
}

/// Threshold of ON-OFF(p) fading followed by BSC(eps):
/// `(1 - e_p) ln((1 - e_p) / e) + e_p ln(e_p / (1 - e))` with
/// `e_p = (1 - p)(1 - e) + p e`.
pub fn composite_binary_threshold_closed_form(p: f64, eps: f64) -> Result<f64> {
    open_unit(eps, "eps")?;
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::DomainError(format!("p = {p} must lie in [0, 1]")));
    }
    let ep = (1.0 - p) * (1.0 - eps) + p * eps;
    let term = |w: f64, num: f64, den: f64| if w == 0.0 { 0.0 } else { w * (num / den).ln() };
    Ok((term(1.0 - ep, 1.0 - ep, eps) + term(ep, ep, 1.0 - eps)).max(0.0))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Lemma1Report {
    pub p: f64,
    pub alpha_composite: Divergence,
    pub p_times_alpha_noise: Divergence,
    pub holds: bool,
    /// `p alpha(Qn) - alpha(Q)`; `None` when the bound is vacuous.
    pub slack: Option<f64>,
    pub argmax_composite: usize,
    pub argmax_noise: usize,
}

/// Compare the ON-OFF composite threshold with `p` times the noise threshold.
pub fn lemma1_check(p: f64, noise: &Dmc) -> Result<Lemma1Report> {
    let composite = sync_threshold(&on_off_composite(p, noise)?);
    let base = sync_threshold(noise);
    let scaled = match base.alpha {
        Divergence::Finite(a) => Divergence::Finite(p * a),
        Divergence::Infinite if p == 0.0 => Divergence::Finite(0.0),
        Divergence::Infinite => Divergence::Infinite,
    };
    let (holds, slack) = match (composite.alpha, scaled) {
        (_, Divergence::Infinite) => (true, None),
        (Divergence::Infinite, Divergence::Finite(_)) => (false, None),
        (Divergence::Finite(a), Divergence::Finite(b)) => (a <= b + LEMMA1_TOL, Some(b - a)),
    };
    Ok(Lemma1Report {
        p,
        alpha_composite: composite.alpha,
        p_times_alpha_noise: scaled,
        holds,
        slack,
        argmax_composite: composite.argmax_symbol,
        argmax_noise: base.argmax_symbol,
    })
}

/// `P / (2 sigma^2)`.
pub fn awgn_threshold(spec: &AwgnSpec) -> f64 {
    spec.power / (2.0 * spec.noise_var)
}

const KL_OPTS: QuadOptions = QuadOptions { abs_tol: 1e-12, rel_tol: 1e-6, max_evals: 200_000 };

/// `int f1 ln(f1 / f0) dy` for the Rayleigh-plus-AWGN channel, where `f1` is
/// the sync-input density and `f0` the idle Gaussian.
pub fn rayleigh_threshold_numeric(spec: &RayleighAwgnSpec) -> Result<f64> {
    if spec.power == 0.0 {
        return Ok(0.0);
    }
    let var = spec.noise_var;
    let sigma = var.sqrt();
    let reach = spec.power.sqrt() * spec.h_max();
    let log_norm = 0.5 * (2.0 * std::f64::consts::PI * var).ln();
    let mut failure = None;
    let integrand = |y: f64| {
        let f1 = match rayleigh_awgn_density(y, spec) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                return 0.0;
            }
        };
        if f1 <= 0.0 {
            return 0.0;
        }
        let log_f0 = -y * y / (2.0 * var) - log_norm;
        f1 * (f1.ln() - log_f0)
    };
    let mode = spec.power.sqrt() * spec.scale;
    let mut breaks = vec![-6.0 * sigma, -3.0 * sigma, 0.0, 3.0 * sigma];
    breaks.extend([0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 6.0].iter().map(|k| k * mode));
    let r = integrate_with_breaks(integrand, -12.0 * sigma, reach + 12.0 * sigma, &breaks, KL_OPTS)?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(r.value.max(0.0))
}

/// One cell of the Rayleigh/AWGN ratio sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub snr: f64,
    pub sigma_h: f64,
    /// `None` when the quadrature failed.
    pub alpha_q: Option<f64>,
    pub alpha_qn: f64,
    pub ratio: Option<f64>,
}

/// Ratio `alpha(Q) / alpha(Qn)` over an SNR grid for each Rayleigh scale.
/// Rows are ordered scale-major, SNR-minor.
pub fn rayleigh_ratio_sweep(snr_grid: &[f64], sigma_h_list: &[f64], noise_var: f64) -> Result<Vec<SweepRow>> {
    if let Some(s) = snr_grid.iter().find(|s| !(**s > 0.0)) {
        return Err(Error::DomainError(format!("SNR {s} must be > 0")));
    }
    let cells: Vec<(f64, f64)> =
        sigma_h_list.iter().flat_map(|&h| snr_grid.iter().map(move |&s| (s, h))).collect();
    cells
        .par_iter()
        .map(|&(snr, sigma_h)| {
            let spec = RayleighAwgnSpec::new(snr * noise_var, noise_var, sigma_h)?;
            let alpha_qn = awgn_threshold(&spec.awgn());
            let alpha_q = rayleigh_threshold_numeric(&spec).ok();
            Ok(SweepRow { snr, sigma_h, alpha_q, alpha_qn, ratio: alpha_q.map(|a| a / alpha_qn) })
        })
        .collect()
}

/// CSV with header `snr,sigma_h,alpha_q,alpha_qn,ratio`; failed cells read `nan`.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("snr,sigma_h,alpha_q,alpha_qn,ratio\n");
    let opt = |v: Option<f64>| v.map_or_else(|| "nan".to_string(), fmt_num);
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            fmt_num(r.snr),
            fmt_num(r.sigma_h),
            opt(r.alpha_q),
            fmt_num(r.alpha_qn),
            opt(r.ratio)
        ));
    }
    out
}
