//! Maximal-length shift-register sequences and sync-word construction.
//!
//! A sync word of length `N` with constant `K` is an m-sequence prefix of
//! length `floor(N/K) = 2^m - 1`, mapped bit 0 -> `x(1)` and bit 1 -> `x(0)`,
//! followed by `x(1)` up to length `N`.

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Idle input index.
pub const X0: usize = 0;
/// Sync input index for binary-input channels.
pub const X1: usize = 1;

/// One primitive polynomial per degree, as a bit mask including the `x^m`
/// and constant terms. Taken from the standard maximal-length LFSR tap
/// tables (Xilinx XAPP052; Peterson & Weldon, "Error-Correcting Codes",
/// App. C); every entry is re-verified by the period test below.
const PRIMITIVE_POLYS: [(u32, u32); 15] = [
    (2, 0b111),                   // x^2 + x + 1
    (3, 0b1101),                  // x^3 + x^2 + 1
    (4, 0b1_1001),                // x^4 + x^3 + 1
    (5, 0b10_1001),               // x^5 + x^3 + 1
    (6, 0b110_0001),              // x^6 + x^5 + 1
    (7, 0b1100_0001),             // x^7 + x^6 + 1
    (8, 0b1_0111_0001),           // x^8 + x^6 + x^5 + x^4 + 1
    (9, 0b10_0010_0001),          // x^9 + x^5 + 1
    (10, 0b100_1000_0001),        // x^10 + x^7 + 1
    (11, 0b1010_0000_0001),       // x^11 + x^9 + 1
    (12, 0b1_1100_0001_0001),     // x^12 + x^11 + x^10 + x^4 + 1
    (13, 0b11_1001_0000_0001),    // x^13 + x^12 + x^11 + x^8 + 1
    (14, 0b111_0000_0000_0101),   // x^14 + x^13 + x^12 + x^2 + 1
    (15, 0b1100_0000_0000_0001),  // x^15 + x^14 + 1
    (16, 0b1_1010_0000_0001_0001), // x^16 + x^15 + x^13 + x^4 + 1
];

/// Table polynomial for degree `m`.
pub fn primitive_poly(m: u32) -> Result<u32> {
    PRIMITIVE_POLYS
        .iter()
        .find(|(d, _)| *d == m)
        .map(|(_, p)| *p)
        .ok_or(Error::UnsupportedDegree(m))
}

/// Fibonacci LFSR for the recurrence `a[n+m] = sum_k c_k a[n+k]` over GF(2),
/// where `c_k` are the lower coefficients of the feedback polynomial.
/// Bit `i` of the state holds `a[n+i]`; the output is `a[n]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lfsr {
    degree: u32,
    poly: u32,
    state: u32,
}

impl Lfsr {
    /// LFSR using the table polynomial of degree `m`.
    pub fn new(m: u32, seed: u32) -> Result<Self> {
        Self::with_poly(m, primitive_poly(m)?, seed)
    }

    /// LFSR with an explicit feedback polynomial (bit mask including `x^m`).
    pub fn with_poly(m: u32, poly: u32, seed: u32) -> Result<Self> {
        if !(2..=16).contains(&m) {
            return Err(Error::UnsupportedDegree(m));
        }
        if poly >> m != 1 || poly & 1 == 0 {
            return Err(Error::DomainError(format!("polynomial {poly:#b} is not a degree-{m} feedback polynomial")));
        }
        let state = seed & ((1 << m) - 1);
        if state == 0 {
            return Err(Error::ZeroSeed);
        }
        Ok(Self { degree: m, poly, state })
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn state(&self) -> u32 {
        self.state
    }

    pub fn period(&self) -> usize {
        (1 << self.degree) - 1
    }

    pub fn next_bit(&mut self) -> u8 {
        let out = (self.state & 1) as u8;
        let taps = self.poly & ((1 << self.degree) - 1);
        let feedback = (self.state & taps).count_ones() & 1;
        self.state = (self.state >> 1) | (feedback << (self.degree - 1));
        out
    }
}

impl Iterator for Lfsr {
    type Item = u8;

    fn next(&mut self) -> Option<u8> {
        Some(self.next_bit())
    }
}

/// One full period (`2^m - 1` bits) of the table LFSR of degree `m`.
pub fn generate_mlsr(m: u32, seed: u32) -> Result<Vec<u8>> {
    if seed == 0 {
        return Err(Error::ZeroSeed);
    }
    let lfsr = Lfsr::new(m, seed)?;
    let n = lfsr.period();
    Ok(lfsr.take(n).collect())
}

/// How a constructed word was built.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Construction {
    pub k: usize,
    pub degree: u32,
    pub prefix_len: usize,
}

/// A sync word over input indices (`0` is the idle symbol).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyncWord {
    symbols: Vec<usize>,
    construction: Option<Construction>,
}

/// Register seed used for constructed words; its first output bit is 1, so
/// every constructed word starts with `x(0)`.
pub const WORD_SEED: u32 = 1;

impl SyncWord {
    /// Arbitrary word, with no construction metadata.
    pub fn custom(symbols: Vec<usize>) -> Result<Self> {
        if symbols.is_empty() {
            return Err(Error::DomainError("sync word is empty".into()));
        }
        Ok(Self { symbols, construction: None })
    }

    pub fn symbols(&self) -> &[usize] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn construction(&self) -> Option<Construction> {
        self.construction
    }

    pub fn prefix_len(&self) -> Option<usize> {
        self.construction.map(|c| c.prefix_len)
    }

    /// Same word with `x(1)` sent as input `symbol`, for channels whose
    /// maximizing input is not index 1.
    pub fn with_sync_symbol(&self, symbol: usize) -> SyncWord {
        let symbols = self.symbols.iter().map(|&s| if s == X1 { symbol } else { s }).collect();
        SyncWord { symbols, construction: self.construction }
    }

    /// `0`/`1` line (`0` = idle, anything else = `1`).
    pub fn to_line(&self) -> String {
        self.symbols.iter().map(|&s| if s == X0 { '0' } else { '1' }).collect()
    }

    pub fn from_line(line: &str) -> Result<SyncWord> {
        let symbols = line
            .trim()
            .chars()
            .map(|c| match c {
                '0' => Ok(X0),
                '1' => Ok(X1),
                other => Err(Error::Parse(format!("unexpected character {other:?} in sync word"))),
            })
            .collect::<Result<Vec<_>>>()?;
        SyncWord::custom(symbols)
    }
}

/// Degree `m >= 2` with `2^m - 1 == prefix`, if any.
fn mlsr_degree(prefix: usize) -> Option<u32> {
    let p1 = prefix.checked_add(1)?;
    if !p1.is_power_of_two() {
        return None;
    }
    let m = p1.trailing_zeros();
    (m >= 2).then_some(m)
}

/// Sync word of length `n` with construction constant `k`.
pub fn build_sync_word(n: usize, k: usize) -> Result<SyncWord> {
    if k == 0 {
        return Err(Error::DomainError("K must be positive".into()));
    }
    let prefix = n / k;
    let degree = mlsr_degree(prefix).ok_or(Error::IncompatibleLength { n, k, prefix })?;
    if degree > 16 {
        return Err(Error::UnsupportedDegree(degree));
    }
    word_from_prefix(n, k, degree)
}

/// Sync word of length `n` whose prefix is the longest m-sequence with
/// `2^m - 1 <= n / k`, followed by `x(1)`. Unlike [`build_sync_word`] any
/// `n >= 3k` works, at the cost of a prefix shorter than `n / k`.
pub fn build_padded_sync_word(n: usize, k: usize) -> Result<SyncWord> {
    if k == 0 {
        return Err(Error::DomainError("K must be positive".into()));
    }
    let room = n / k;
    if room < 3 {
        return Err(Error::NoValidLength { n_target: n, k });
    }
    let degree = (room + 1).ilog2().min(16);
    word_from_prefix(n, k, degree)
}

fn word_from_prefix(n: usize, k: usize, degree: u32) -> Result<SyncWord> {
    let bits = generate_mlsr(degree, WORD_SEED)?;
    let prefix_len = bits.len();
    let mut symbols: Vec<usize> = bits.iter().map(|&b| if b == 0 { X1 } else { X0 }).collect();
    symbols.resize(n, X1);
    Ok(SyncWord { symbols, construction: Some(Construction { k, degree, prefix_len }) })
}

/// Largest `N <= n_target` whose prefix `floor(N/K)` is `2^m - 1`, `m >= 2`.
pub fn nearest_valid_length(n_target: usize, k: usize) -> Result<usize> {
    if k == 0 || n_target < 3 * k {
        return Err(Error::NoValidLength { n_target, k });
    }
    let mut best = None;
    for m in 2..=16u32 {
        let prefix = (1usize << m) - 1;
        let lo = prefix * k;
        if lo > n_target {
            break;
        }
        best = Some(n_target.min(lo + k - 1));
    }
    best.ok_or(Error::NoValidLength { n_target, k })
}

/// How a shifted copy of the word is compared with the word.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ShiftMetric {
    /// Only the `N - tau` overlapping positions are compared.
    Overlap,
    /// The shifted copy is padded with idle symbols to full length, in both
    /// directions. This is what a decoder window straddling the word sees.
    #[default]
    IdlePadded,
}

fn overlap_mismatches(s: &[usize], tau: usize) -> usize {
    s[tau..].iter().zip(s).filter(|(a, b)| a != b).count()
}

/// Hamming distance between the word and its copy shifted by `shift`
/// positions (`shift > 0`: the copy starts `shift` symbols into the word,
/// as seen by a late window; `shift < 0`: an early window).
pub fn shift_distance(word: &SyncWord, shift: isize, metric: ShiftMetric) -> usize {
    let s = word.symbols();
    let tau = shift.unsigned_abs();
    if tau == 0 {
        return 0;
    }
    if tau >= s.len() {
        return match metric {
            ShiftMetric::Overlap => 0,
            ShiftMetric::IdlePadded => s.iter().filter(|&&x| x != X0).count(),
        };
    }
    let overlap = overlap_mismatches(s, tau);
    match metric {
        ShiftMetric::Overlap => overlap,
        ShiftMetric::IdlePadded => {
            let padded = if shift < 0 { &s[..tau] } else { &s[s.len() - tau..] };
            overlap + padded.iter().filter(|&&x| x != X0).count()
        }
    }
}

/// Minimum shift distance over `tau = 1..N-1` (both directions for
/// [`ShiftMetric::IdlePadded`]) and the shift attaining it. Ties go to the
/// smallest `|tau|`, early window first.
pub fn min_shift_hamming_distance(word: &SyncWord, metric: ShiftMetric) -> (usize, isize) {
    let n = word.len() as isize;
    let shifts: Vec<isize> = match metric {
        ShiftMetric::Overlap => (1..n).collect(),
        ShiftMetric::IdlePadded => (1..n).flat_map(|t| [-t, t]).collect(),
    };
    shifts
        .par_iter()
        .map(|&sh| (shift_distance(word, sh, metric), sh))
        .min_by_key(|&(d, sh)| (d, sh.unsigned_abs(), sh > 0))
        .unwrap_or((0, 0))
}

#[cfg(test)]
mod tests {
    use super::*;

    // Independent reference: step the recurrence on a plain bit vector.
    fn reference_mlsr(m: u32, poly: u32, seed: u32) -> Vec<u8> {
        let mut a: Vec<u8> = (0..m).map(|i| ((seed >> i) & 1) as u8).collect();
        let n = (1usize << m) - 1;
        while a.len() < n {
            let base = a.len() - m as usize;
            let mut next = 0;
            for k in 0..m {
                if (poly >> k) & 1 == 1 {
                    next ^= a[base + k as usize];
                }
            }
            a.push(next);
        }
        a
    }

    #[test]
    fn every_table_polynomial_is_maximal() {
        for m in 2..=16u32 {
            let mut lfsr = Lfsr::new(m, 1).unwrap();
            let start = lfsr.state();
            let mut period = 0usize;
            loop {
                lfsr.next_bit();
                period += 1;
                if lfsr.state() == start {
                    break;
                }
            }
            assert_eq!(period, (1 << m) - 1, "degree {m}");
        }
    }

    #[test]
    fn degree_two_and_three() {
        let s = generate_mlsr(2, 1).unwrap();
        assert_eq!(s.len(), 3);
        assert_eq!(s.iter().filter(|&&b| b == 1).count(), 2);

        let s = Lfsr::with_poly(3, 0b1011, 0b001).unwrap().take(7).collect::<Vec<_>>();
        assert_eq!(s, reference_mlsr(3, 0b1011, 0b001));
        assert_eq!(s.iter().filter(|&&b| b == 1).count(), 4);
        let mut seen: Vec<Vec<u8>> = (0..7).map(|r| [&s[r..], &s[..r]].concat()).collect();
        seen.sort();
        seen.dedup();
        assert_eq!(seen.len(), 7);
    }

    #[test]
    fn matches_reference_recurrence() {
        for m in 2..=12 {
            let poly = primitive_poly(m).unwrap();
            assert_eq!(generate_mlsr(m, 5 % ((1 << m) - 1) + 1).unwrap(), reference_mlsr(m, poly, 5 % ((1 << m) - 1) + 1));
        }
    }

    #[test]
    fn generator_errors() {
        assert_eq!(generate_mlsr(1, 1), Err(Error::UnsupportedDegree(1)));
        assert_eq!(generate_mlsr(17, 1), Err(Error::UnsupportedDegree(17)));
        assert_eq!(generate_mlsr(5, 0), Err(Error::ZeroSeed));
        assert!(Lfsr::with_poly(3, 0b0110, 1).is_err());
    }

    #[test]
    fn seeds_give_cyclic_shifts() {
        for m in 2..=8u32 {
            let base = generate_mlsr(m, 1).unwrap();
            let n = base.len();
            let doubled = [base.as_slice(), base.as_slice()].concat();
            for seed in 1..(1u32 << m) {
                let s = generate_mlsr(m, seed).unwrap();
                assert!((0..n).any(|r| doubled[r..r + n] == s[..]), "m={m} seed={seed}");
            }
        }
    }

    #[test]
    fn build_examples() {
        assert!(matches!(build_sync_word(7, 7), Err(Error::IncompatibleLength { prefix: 1, .. })));
        let w = build_sync_word(21, 3).unwrap();
        assert_eq!(w.prefix_len(), Some(7));
        assert_eq!(w.len(), 21);
        assert!(w.symbols()[7..].iter().all(|&s| s == X1));
        assert!(matches!(build_sync_word(20, 3), Err(Error::IncompatibleLength { .. })));
        assert_eq!(w.symbols()[0], X0);
    }

    #[test]
    fn word_follows_mapping_rule() {
        for (n, k) in [(21, 3), (63, 4), (124, 4), (1023, 1)] {
            let w = build_sync_word(n, k).unwrap();
            let c = w.construction().unwrap();
            let bits = reference_mlsr(c.degree, primitive_poly(c.degree).unwrap(), WORD_SEED);
            for (i, &s) in w.symbols().iter().enumerate() {
                let expect = if i < c.prefix_len && bits[i] == 1 { X0 } else { X1 };
                assert_eq!(s, expect, "n={n} k={k} i={i}");
            }
            let ones = w.symbols().iter().filter(|&&s| s == X1).count() as f64;
            let half = (1usize << (c.degree - 1)) as f64;
            assert!(ones / n as f64 >= 1.0 - half / (k as f64 * c.prefix_len as f64) - 1e-12);
        }
    }

    #[test]
    fn valid_length_helper() {
        assert_eq!(nearest_valid_length(100, 4).unwrap(), 63);
        assert_eq!(nearest_valid_length(21, 3).unwrap(), 21);
        assert!(matches!(nearest_valid_length(5, 3), Err(Error::NoValidLength { .. })));
        for k in 1..6 {
            for n in 3 * k..400 {
                let got = nearest_valid_length(n, k).unwrap();
                let brute = (1..=n).rev().find(|&c| mlsr_degree(c / k).is_some()).unwrap();
                assert_eq!(got, brute);
            }
        }
    }

    #[test]
    fn shift_distance_examples() {
        let flat = SyncWord::custom(vec![X1; 10]).unwrap();
        assert_eq!(min_shift_hamming_distance(&flat, ShiftMetric::Overlap).0, 0);
        assert_eq!(min_shift_hamming_distance(&flat, ShiftMetric::IdlePadded), (1, -1));
        let w = build_sync_word(21, 3).unwrap();
        assert!(min_shift_hamming_distance(&w, ShiftMetric::Overlap).0 > 0);
        assert!(min_shift_hamming_distance(&w, ShiftMetric::IdlePadded).0 > 0);
    }

    #[test]
    fn padded_distance_brute_force() {
        let w = build_sync_word(45, 3).unwrap();
        let s = w.symbols();
        let n = s.len();
        for tau in 1..n {
            let early: Vec<usize> = std::iter::repeat(X0).take(tau).chain(s[..n - tau].iter().copied()).collect();
            let late: Vec<usize> = s[tau..].iter().copied().chain(std::iter::repeat(X0).take(tau)).collect();
            let d = |c: &[usize]| c.iter().zip(s).filter(|(a, b)| a != b).count();
            assert_eq!(shift_distance(&w, -(tau as isize), ShiftMetric::IdlePadded), d(&early));
            assert_eq!(shift_distance(&w, tau as isize, ShiftMetric::IdlePadded), d(&late));
        }
    }

    #[test]
    fn line_format() {
        let w = build_sync_word(21, 3).unwrap();
        let line = w.to_line();
        assert_eq!(line.len(), 21);
        assert_eq!(SyncWord::from_line(&line).unwrap().symbols(), w.symbols());
        assert!(SyncWord::from_line("01x").is_err());
    }

    #[test]
    fn padded_word_uses_longest_fitting_prefix() {
        for (n, k, prefix) in [(32, 4, 7), (64, 4, 15), (128, 4, 31), (63, 4, 15), (21, 3, 7), (12, 4, 3)] {
            let w = build_padded_sync_word(n, k).unwrap();
            assert_eq!(w.len(), n);
            assert_eq!(w.prefix_len(), Some(prefix));
            assert!(w.symbols()[prefix..].iter().all(|&s| s == X1));
        }
        assert_eq!(build_padded_sync_word(63, 4).unwrap(), build_sync_word(63, 4).unwrap());
        assert!(build_padded_sync_word(11, 4).is_err());
    }
}
