//! Sequential joint-typicality decoder.
//!
//! At each candidate start `t` the decoder forms the empirical joint
//! distribution of (sync word, output window `y[t..t+N-1]`) and declares
//! `t` as soon as it lies within `mu` of the expected joint distribution
//! `P(x, y) = Ps(x) Q(y|x)`, where `Ps` is the word's symbol frequency.

use serde::Serialize;
use statrs::function::gamma::ln_gamma;

use crate::channel::Dmc;
use crate::error::{Error, Result};
use crate::sequences::SyncWord;

/// Distance used to compare joint tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Norm {
    /// Largest cell difference.
    #[default]
    Linf,
    /// Sum of cell differences.
    L1,
}

impl std::str::FromStr for Norm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "linf" | "inf" | "max" => Ok(Self::Linf),
            "l1" => Ok(Self::L1),
            other => Err(Error::Parse(format!("unknown norm {other:?} (expected linf or l1)"))),
        }
    }
}

/// Joint distribution over inputs x outputs, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct JointTable {
    pub n_in: usize,
    pub n_out: usize,
    pub values: Vec<f64>,
}

impl JointTable {
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.values[x * self.n_out + y]
    }

    /// Marginal over outputs.
    pub fn input_marginal(&self) -> Vec<f64> {
        self.values.chunks(self.n_out).map(|r| r.iter().sum()).collect()
    }
}

/// Empirical joint distribution `N(x, y) / N` of a word and an output window.
pub fn empirical_joint(word: &SyncWord, window: &[usize], n_in: usize, n_out: usize) -> Result<JointTable> {
    if window.len() != word.len() {
        return Err(Error::LengthMismatch { expected: word.len(), actual: window.len() });
    }
    let mut counts = vec![0usize; n_in * n_out];
    for (&x, &y) in word.symbols().iter().zip(window) {
        if x >= n_in {
            return Err(Error::IndexOutOfRange { index: x, size: n_in });
        }
        if y >= n_out {
            return Err(Error::IndexOutOfRange { index: y, size: n_out });
        }
        counts[x * n_out + y] += 1;
    }
    let n = word.len() as f64;
    Ok(JointTable { n_in, n_out, values: counts.iter().map(|&c| c as f64 / n).collect() })
}

/// Distance between two tables of the same shape.
pub fn typicality_distance(a: &JointTable, b: &JointTable, norm: Norm) -> f64 {
    let diffs = a.values.iter().zip(&b.values).map(|(x, y)| (x - y).abs());
    match norm {
        Norm::Linf => diffs.fold(0.0, f64::max),
        Norm::L1 => diffs.sum(),
    }
}

/// Decoder state: sync word, channel, tolerance and reference table.
#[derive(Debug, Clone)]
pub struct TypicalityDecoder {
    word: SyncWord,
    channel: Dmc,
    mu: f64,
    norm: Norm,
    reference: JointTable,
    fast: Option<BinaryFastPath>,
}

/// Default tolerance: `0.1 / |Y|` per cell.
pub fn default_mu(channel: &Dmc) -> f64 {
    0.1 / channel.num_outputs() as f64
}

impl TypicalityDecoder {
    pub fn new(word: SyncWord, channel: Dmc, mu: f64, norm: Norm) -> Result<Self> {
        if !(mu > 0.0) {
            return Err(Error::DomainError(format!("typicality tolerance {mu} must be > 0")));
        }
        let (n_in, n_out) = (channel.num_inputs(), channel.num_outputs());
        if let Some(&x) = word.symbols().iter().find(|&&x| x >= n_in) {
            return Err(Error::IndexOutOfRange { index: x, size: n_in });
        }
        let n = word.len() as f64;
        let mut freq = vec![0.0; n_in];
        for &x in word.symbols() {
            freq[x] += 1.0 / n;
        }
        let values = (0..n_in)
            .flat_map(|x| {
                let f = freq[x];
                channel.row(x).iter().map(move |q| f * q).collect::<Vec<_>>()
            })
            .collect();
        let reference = JointTable { n_in, n_out, values };
        let fast = BinaryFastPath::new(&word, &reference);
        Ok(Self { word, channel, mu, norm, reference, fast })
    }

    pub fn word(&self) -> &SyncWord {
        &self.word
    }

    pub fn channel(&self) -> &Dmc {
        &self.channel
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn norm(&self) -> Norm {
        self.norm
    }

    pub fn reference(&self) -> &JointTable {
        &self.reference
    }

    /// Whether `window` (length `N`) is jointly typical with the word.
    pub fn is_typical(&self, window: &[usize]) -> bool {
        let n_out = self.reference.n_out;
        let mut counts = vec![0u32; self.reference.values.len()];
        for (&x, &y) in self.word.symbols().iter().zip(window) {
            counts[x * n_out + y] += 1;
        }
        self.counts_typical(&counts)
    }

    fn counts_typical(&self, counts: &[u32]) -> bool {
        let n = self.word.len() as f64;
        let diffs = counts.iter().zip(&self.reference.values).map(|(&c, r)| (c as f64 / n - r).abs());
        match self.norm {
            Norm::Linf => diffs.into_iter().all(|d| d <= self.mu),
            Norm::L1 => diffs.sum::<f64>() <= self.mu,
        }
    }

    /// Typicality of the window starting at `start` in a packed binary
    /// stream. Only valid when [`Self::binary_fast_path`] is true.
    pub(crate) fn is_typical_bits(&self, bits: &BitStream, start: usize) -> bool {
        let fast = self.fast.as_ref().expect("binary fast path available");
        let n = self.word.len();
        let mut ones = [0u32; 2];
        for (j, (m0, m1)) in fast.mask_idle.iter().zip(&fast.mask_sync).enumerate() {
            let w = bits.word_at(start + 64 * j, (n - 64 * j).min(64));
            ones[0] += (w & m0).count_ones();
            ones[1] += (w & m1).count_ones();
        }
        let (x0, x1) = (0, fast.sync_symbol);
        let mut counts = vec![0u32; self.reference.values.len()];
        counts[x0 * 2 + 1] = ones[0];
        counts[x0 * 2] = fast.count[0] - ones[0];
        counts[x1 * 2 + 1] = ones[1];
        counts[x1 * 2] = fast.count[1] - ones[1];
        self.counts_typical(&counts)
    }

    pub(crate) fn binary_fast_path(&self) -> bool {
        self.fast.is_some()
    }

    /// Probability that a window of pure idle-input outputs is typical,
    /// rounded up. For the L1 norm this is the probability of the enclosing
    /// L-infinity box, which bounds it from above.
    pub fn idle_window_typical_prob(&self) -> f64 {
        let n = self.word.len();
        let nf = n as f64;
        let n_out = self.reference.n_out;
        let idle = self.channel.idle_row();
        let mut count = vec![0usize; self.reference.n_in];
        for &x in self.word.symbols() {
            count[x] += 1;
        }
        let slack = 1e-9;
        let mut log_p = 0.0;
        for (x, &nx) in count.iter().enumerate() {
            if nx == 0 {
                continue;
            }
            let boxes: Vec<(usize, usize)> = (0..n_out)
                .map(|y| {
                    let r = self.reference.get(x, y);
                    let lo = ((r - self.mu - slack) * nf).ceil().max(0.0) as usize;
                    let hi = ((r + self.mu + slack) * nf).floor().min(nx as f64);
                    (lo, if hi < 0.0 { 0 } else { hi as usize })
                })
                .collect();
            if boxes.iter().any(|(lo, hi)| lo > hi) {
                return 0.0;
            }
            log_p += log_multinomial_box(nx, idle, &boxes);
            if log_p == f64::NEG_INFINITY {
                return 0.0;
            }
        }
        (log_p.exp() * (1.0 + 1e-9)).min(1.0)
    }

    /// First `t` in `1..=scan_limit` whose window is typical; `None` if none.
    /// Reads only `stream[..t + N - 1]`.
    pub fn run(&self, stream: &[usize], scan_limit: usize) -> Result<Option<usize>> {
        let n = self.word.len();
        for t in 1..=scan_limit {
            let end = t + n - 1;
            if end > stream.len() {
                return Err(Error::StreamExhausted { needed: end, available: stream.len() });
            }
            if self.is_typical(&stream[t - 1..end]) {
                return Ok(Some(t));
            }
        }
        Ok(None)
    }
}

/// Sequential scan of `stream` (1-based slots) up to `scan_limit`.
pub fn run_decoder(decoder: &TypicalityDecoder, stream: &[usize], scan_limit: usize) -> Result<Option<usize>> {
    decoder.run(stream, scan_limit)
}

/// log P(every count c_y of a Multinomial(n, q) lies in boxes[y]).
fn log_multinomial_box(n: usize, q: &[f64], boxes: &[(usize, usize)]) -> f64 {
    // dp[c] = log sum over the first j outputs with total count c of
    // prod q_y^{c_y} / c_y!
    let mut dp = vec![f64::NEG_INFINITY; n + 1];
    dp[0] = 0.0;
    for (y, &(lo, hi)) in boxes.iter().enumerate() {
        let hi = hi.min(n);
        let lq = q[y].ln();
        let mut next = vec![f64::NEG_INFINITY; n + 1];
        for (c_prev, &v) in dp.iter().enumerate() {
            if v == f64::NEG_INFINITY {
                continue;
            }
            for c in lo..=hi {
                let total = c_prev + c;
                if total > n {
                    break;
                }
                let term = if c == 0 {
                    0.0
                } else if q[y] == 0.0 {
                    break;
                } else {
                    c as f64 * lq - ln_gamma(c as f64 + 1.0)
                };
                next[total] = log_add(next[total], v + term);
            }
        }
        dp = next;
    }
    dp[n] + ln_gamma(n as f64 + 1.0)
}

fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp()).ln()
}

/// Word masks for binary-output channels with a word over {x(0), x(1)}.
#[derive(Debug, Clone)]
struct BinaryFastPath {
    sync_symbol: usize,
    mask_idle: Vec<u64>,
    mask_sync: Vec<u64>,
    count: [u32; 2],
}

impl BinaryFastPath {
    fn new(word: &SyncWord, reference: &JointTable) -> Option<Self> {
        if reference.n_out != 2 {
            return None;
        }
        let s = word.symbols();
        let sync_symbol = s.iter().copied().find(|&x| x != 0).unwrap_or(1);
        if s.iter().any(|&x| x != 0 && x != sync_symbol) {
            return None;
        }
        let words = s.len().div_ceil(64);
        let mut mask_idle = vec![0u64; words];
        let mut mask_sync = vec![0u64; words];
        let mut count = [0u32; 2];
        for (i, &x) in s.iter().enumerate() {
            if x == 0 {
                mask_idle[i / 64] |= 1 << (i % 64);
                count[0] += 1;
            } else {
                mask_sync[i / 64] |= 1 << (i % 64);
                count[1] += 1;
            }
        }
        Some(Self { sync_symbol, mask_idle, mask_sync, count })
    }
}

/// Append-only packed binary stream.
#[derive(Debug, Clone, Default)]
pub(crate) struct BitStream {
    words: Vec<u64>,
    len: usize,
}

impl BitStream {
    pub fn with_capacity(bits: usize) -> Self {
        Self { words: Vec::with_capacity(bits / 64 + 2), len: 0 }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn push(&mut self, bit: bool) {
        if self.len % 64 == 0 {
            self.words.push(0);
        }
        if bit {
            *self.words.last_mut().expect("word allocated") |= 1 << (self.len % 64);
        }
        self.len += 1;
    }

    /// `count` (<= 64) bits starting at `start`, low bit first.
    pub fn word_at(&self, start: usize, count: usize) -> u64 {
        let (q, r) = (start / 64, start % 64);
        let mut w = self.words[q] >> r;
        if r != 0 && q + 1 < self.words.len() {
            w |= self.words[q + 1] << (64 - r);
        }
        if count < 64 {
            w &= (1u64 << count) - 1;
        }
        w
    }
}
