//! AWGN and Rayleigh-fading-plus-AWGN channels with binary input
//! `x(0) = 0`, `x(1) = sqrt(P)`.
//!
//! Output model: `y = h x + n` with `h ~ Rayleigh(scale)` and
//! `n ~ N(0, noise_var)`, independent per slot. The Rayleigh density used is
//! `(h / s^2) exp(-h^2 / (2 s^2))`, so `E[h^2] = 2 s^2`.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;
use statrs::function::erf::erfc;

use crate::channel::{Alphabet, Dmc};
use crate::error::{Error, Result};
use crate::quadrature::{integrate_with_breaks, QuadOptions};

/// Tail probability beyond the Rayleigh truncation point.
pub const RAYLEIGH_TAIL: f64 = 1e-16;
/// Upper grid edges are kept at or below this many noise standard deviations
/// so that idle-row cell probabilities stay representable in `f64`.
pub const MAX_UPPER_SIGMAS: f64 = 36.0;

const DENSITY_OPTS: QuadOptions = QuadOptions { abs_tol: 1e-300, rel_tol: 1e-9, max_evals: 1_000_000 };

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AwgnSpec {
    pub power: f64,
    pub noise_var: f64,
}

impl AwgnSpec {
    pub fn new(power: f64, noise_var: f64) -> Result<Self> {
        if !(power >= 0.0 && power.is_finite()) {
            return Err(Error::DomainError(format!("power {power} must be >= 0")));
        }
        if !(noise_var > 0.0 && noise_var.is_finite()) {
            return Err(Error::DomainError(format!("noise variance {noise_var} must be > 0")));
        }
        Ok(Self { power, noise_var })
    }

    pub fn snr(&self) -> f64 {
        self.power / self.noise_var
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RayleighAwgnSpec {
    pub power: f64,
    pub noise_var: f64,
    /// Rayleigh scale parameter `sigma_H`.
    pub scale: f64,
}

impl RayleighAwgnSpec {
    pub fn new(power: f64, noise_var: f64, scale: f64) -> Result<Self> {
        AwgnSpec::new(power, noise_var)?;
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::DomainError(format!("Rayleigh scale {scale} must be > 0")));
        }
        Ok(Self { power, noise_var, scale })
    }

    /// Truncation point of the fading amplitude.
    pub fn h_max(&self) -> f64 {
        self.scale * (2.0 * (1.0 / RAYLEIGH_TAIL).ln()).sqrt()
    }

    pub fn awgn(&self) -> AwgnSpec {
        AwgnSpec { power: self.power, noise_var: self.noise_var }
    }
}

/// Either continuous channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ContinuousChannel {
    Awgn(AwgnSpec),
    Rayleigh(RayleighAwgnSpec),
}

impl ContinuousChannel {
    pub fn noise_var(&self) -> f64 {
        match self {
            Self::Awgn(s) => s.noise_var,
            Self::Rayleigh(s) => s.noise_var,
        }
    }

    pub fn power(&self) -> f64 {
        match self {
            Self::Awgn(s) => s.power,
            Self::Rayleigh(s) => s.power,
        }
    }

    /// Output density given the input.
    pub fn density(&self, y: f64, input_is_sync: bool) -> Result<f64> {
        match (self, input_is_sync) {
            (_, false) => Ok(awgn_density(y, 0.0, self.noise_var())),
            (Self::Awgn(s), true) => Ok(awgn_density(y, s.power.sqrt(), s.noise_var)),
            (Self::Rayleigh(s), true) => rayleigh_awgn_density(y, s),
        }
    }
}

impl From<AwgnSpec> for ContinuousChannel {
    fn from(s: AwgnSpec) -> Self {
        Self::Awgn(s)
    }
}

impl From<RayleighAwgnSpec> for ContinuousChannel {
    fn from(s: RayleighAwgnSpec) -> Self {
        Self::Rayleigh(s)
    }
}

/// Uniform partition of `[lo, hi]` into `bins` cells; the first and last
/// cells extend to minus and plus infinity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuantizationGrid {
    pub lo: f64,
    pub hi: f64,
    pub bins: usize,
}

impl QuantizationGrid {
    pub fn new(lo: f64, hi: f64, bins: usize) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::DomainError(format!("grid needs finite lo < hi, got [{lo}, {hi}]")));
        }
        if bins < 2 {
            return Err(Error::DomainError(format!("grid needs at least 2 bins, got {bins}")));
        }
        Ok(Self { lo, hi, bins })
    }

    /// Default grid: `[-8 sigma, sqrt(P) * 6 sigma_H + 8 sigma]` (AWGN uses
    /// `sqrt(P) + 8 sigma`), 4096 bins, upper edge capped at
    /// [`MAX_UPPER_SIGMAS`] noise deviations.
    pub fn default_for(channel: &ContinuousChannel) -> Self {
        let sigma = channel.noise_var().sqrt();
        let amp = channel.power().sqrt();
        let reach = match channel {
            ContinuousChannel::Awgn(_) => amp,
            ContinuousChannel::Rayleigh(s) => amp * 6.0 * s.scale,
        };
        let lo = -8.0 * sigma;
        let hi = (reach + 8.0 * sigma).min(MAX_UPPER_SIGMAS * sigma);
        Self { lo, hi, bins: 4096 }
    }

    pub fn width(&self) -> f64 {
        (self.hi - self.lo) / self.bins as f64
    }

    /// Bounds of cell `i`, with infinite outer edges.
    pub fn cell(&self, i: usize) -> (f64, f64) {
        let w = self.width();
        let a = if i == 0 { f64::NEG_INFINITY } else { self.lo + i as f64 * w };
        let b = if i + 1 == self.bins { f64::INFINITY } else { self.lo + (i + 1) as f64 * w };
        (a, b)
    }

    pub fn cell_index(&self, y: f64) -> usize {
        let i = ((y - self.lo) / self.width()).floor();
        if i < 0.0 {
            0
        } else {
            (i as usize).min(self.bins - 1)
        }
    }
}

/// Gaussian density with the given mean and variance.
pub fn awgn_density(y: f64, mean: f64, noise_var: f64) -> f64 {
    let d = y - mean;
    (-d * d / (2.0 * noise_var)).exp() / (2.0 * std::f64::consts::PI * noise_var).sqrt()
}

pub fn rayleigh_pdf(h: f64, scale: f64) -> f64 {
    if h < 0.0 {
        return 0.0;
    }
    let s2 = scale * scale;
    h / s2 * (-h * h / (2.0 * s2)).exp()
}

/// Standard normal CDF.
pub fn normal_cdf(z: f64) -> f64 {
    if z == f64::INFINITY {
        1.0
    } else if z == f64::NEG_INFINITY {
        0.0
    } else {
        0.5 * erfc(-z / std::f64::consts::SQRT_2)
    }
}

/// `P(a <= N(0,1) < b)`, computed on the side of zero that avoids
/// cancellation.
pub fn normal_mass(a: f64, b: f64) -> f64 {
    if a >= b {
        return 0.0;
    }
    if a >= 0.0 {
        normal_cdf(-a) - normal_cdf(-b)
    } else if b <= 0.0 {
        normal_cdf(b) - normal_cdf(a)
    } else {
        1.0 - normal_cdf(a) - normal_cdf(-b)
    }
}

// Center and width of the Gaussian-in-h factor of the integrand
// phi((y - h sqrt(P)) / sigma) * rayleigh(h).
fn h_peak(y: f64, spec: &RayleighAwgnSpec) -> (f64, f64) {
    let s2 = spec.scale * spec.scale;
    let c = 1.0 / s2 + spec.power / spec.noise_var;
    let center = y * spec.power.sqrt() / spec.noise_var / c;
    (center, c.sqrt().recip())
}

fn h_breaks(center: f64, width: f64, spec: &RayleighAwgnSpec) -> Vec<f64> {
    let mut out: Vec<f64> = [-8.0, -4.0, -2.0, -1.0, 0.0, 1.0, 2.0, 4.0, 8.0]
        .iter()
        .map(|k| center + k * width)
        .collect();
    out.push(spec.scale);
    out
}

/// Density of `h sqrt(P) + n` at `y`, by adaptive quadrature over the
/// fading amplitude. The range is truncated where the fading prior is
/// negligible, or past the peak of the integrand if that lies further out.
pub fn rayleigh_awgn_density(y: f64, spec: &RayleighAwgnSpec) -> Result<f64> {
    if spec.power == 0.0 {
        return Ok(awgn_density(y, 0.0, spec.noise_var));
    }
    let amp = spec.power.sqrt();
    let s2 = spec.scale * spec.scale;
    let norm = 1.0 / (s2 * (2.0 * std::f64::consts::PI * spec.noise_var).sqrt());
    let integrand = |h: f64| {
        let d = y - h * amp;
        h * norm * (-d * d / (2.0 * spec.noise_var) - h * h / (2.0 * s2)).exp()
    };
    let (center, width) = h_peak(y, spec);
    let breaks = h_breaks(center, width, spec);
    let upper = spec.h_max().max(center + 12.0 * width);
    Ok(integrate_with_breaks(integrand, 0.0, upper, &breaks, DENSITY_OPTS)?.value)
}

/// Probability that the Rayleigh channel output with sync input lands in
/// `[a, b)`.
fn rayleigh_cell_mass(a: f64, b: f64, spec: &RayleighAwgnSpec) -> Result<f64> {
    let amp = spec.power.sqrt();
    let sigma = spec.noise_var.sqrt();
    if amp == 0.0 {
        return Ok(normal_mass(a / sigma, b / sigma));
    }
    let integrand =
        |h: f64| rayleigh_pdf(h, spec.scale) * normal_mass((a - h * amp) / sigma, (b - h * amp) / sigma);
    let mut upper = spec.h_max();
    let mut breaks = vec![spec.scale];
    for edge in [a, b] {
        if edge.is_finite() {
            let h = edge / amp;
            let w = sigma / amp;
            breaks.extend([-6.0, -2.0, 0.0, 2.0, 6.0].iter().map(|k| h + k * w));
            upper = upper.max(h + 12.0 * w);
        }
    }
    Ok(integrate_with_breaks(integrand, 0.0, upper, &breaks, DENSITY_OPTS)?.value)
}

/// A quantized channel and the grid it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantizedChannel {
    pub dmc: Dmc,
    pub grid: QuantizationGrid,
    /// Per input row, probability mass falling outside `[lo, hi]`.
    pub tail_mass: [f64; 2],
}

#[derive(Serialize)]
struct GridSidecar<'a> {
    lo: f64,
    hi: f64,
    bins: usize,
    tail_mass: &'a [f64; 2],
}

impl QuantizedChannel {
    /// JSON sidecar describing the grid.
    pub fn sidecar_json(&self) -> String {
        let s = GridSidecar { lo: self.grid.lo, hi: self.grid.hi, bins: self.grid.bins, tail_mass: &self.tail_mass };
        serde_json::to_string_pretty(&s).expect("sidecar serializes")
    }
}

/// Integrate both conditional densities over each grid cell, giving a
/// 2-input DMC.
pub fn quantize_to_dmc(channel: &ContinuousChannel, grid: &QuantizationGrid) -> Result<QuantizedChannel> {
    let sigma = channel.noise_var().sqrt();
    let cells: Vec<(f64, f64)> = (0..grid.bins).map(|i| grid.cell(i)).collect();
    let idle: Vec<f64> = cells.iter().map(|&(a, b)| normal_mass(a / sigma, b / sigma)).collect();
    let sync: Vec<f64> = match channel {
        ContinuousChannel::Awgn(s) => {
            let m = s.power.sqrt();
            cells.iter().map(|&(a, b)| normal_mass((a - m) / sigma, (b - m) / sigma)).collect()
        }
        ContinuousChannel::Rayleigh(s) => {
            cells.iter().map(|&(a, b)| rayleigh_cell_mass(a, b, s)).collect::<Result<_>>()?
        }
    };
    let outside = |m: f64| normal_mass(f64::NEG_INFINITY, (grid.lo - m) / sigma) + normal_mass((grid.hi - m) / sigma, f64::INFINITY);
    let tail_mass = [
        outside(0.0),
        match channel {
            ContinuousChannel::Awgn(s) => outside(s.power.sqrt()),
            ContinuousChannel::Rayleigh(s) => {
                rayleigh_cell_mass(f64::NEG_INFINITY, grid.lo, s)? + rayleigh_cell_mass(grid.hi, f64::INFINITY, s)?
            }
        },
    ];
    let mut rows = vec![idle, sync];
    for (r, row) in rows.iter_mut().enumerate() {
        let sum: f64 = row.iter().sum();
        if sum < 1.0 - 1e-6 || sum > 1.0 + 1e-6 {
            return Err(Error::MassLoss { row: r, sum });
        }
        row.iter_mut().for_each(|v| *v /= sum);
    }
    let input = Alphabet::new(["x0", "x1"])?;
    let output = Alphabet::indexed(grid.bins)?;
    Ok(QuantizedChannel { dmc: Dmc::new_normalized(rows, input, output)?, grid: *grid, tail_mass })
}

/// Draw one channel output.
pub fn sample_continuous<R: Rng + ?Sized>(channel: &ContinuousChannel, input_is_sync: bool, rng: &mut R) -> f64 {
    let sigma = channel.noise_var().sqrt();
    let noise: f64 = rng.sample::<f64, _>(StandardNormal) * sigma;
    if !input_is_sync {
        return noise;
    }
    let amp = channel.power().sqrt();
    match channel {
        ContinuousChannel::Awgn(_) => amp + noise,
        ContinuousChannel::Rayleigh(s) => sample_rayleigh(s.scale, rng) * amp + noise,
    }
}

/// Rayleigh draw by inversion.
pub fn sample_rayleigh<R: Rng + ?Sized>(scale: f64, rng: &mut R) -> f64 {
    // 1 - u lies in (0, 1], keeping the log finite
    let u: f64 = rng.random();
    scale * (-2.0 * (1.0 - u).ln()).sqrt()
}

/// Quantized channel whose samples follow [`sample_continuous`] binned on
/// `grid`; used to drive the discrete decoder from continuous outputs.
pub struct GridSampler<'a> {
    pub channel: &'a ContinuousChannel,
    pub grid: &'a QuantizationGrid,
}

impl<'a> GridSampler<'a> {
    pub fn sample<R: Rng + ?Sized>(&self, input_is_sync: bool, rng: &mut R) -> usize {
        self.grid.cell_index(sample_continuous(self.channel, input_is_sync, rng))
    }
}
