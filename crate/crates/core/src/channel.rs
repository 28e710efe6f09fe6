//! Finite-alphabet channels.
//!
//! A [`Dmc`] is a row-stochastic transition table `Q(y|x)`. Every alphabet
//! keeps its idle symbol `x(0)` at index 0, so row 0 of any channel is the
//! output law seen while nothing is being transmitted.

use std::fmt::Write as _;

use rand::Rng;

use crate::error::{Error, Result};

/// Tolerance on row sums accepted by [`Dmc::new`].
pub const ROW_SUM_TOL: f64 = 1e-12;
/// Largest row-sum deviation that [`Dmc::new_normalized`] will rescale away.
pub const NORMALIZE_TOL: f64 = 1e-9;

/// Ordered symbol labels. The idle symbol is always stored at index 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    symbols: Vec<String>,
}

impl Alphabet {
    /// Alphabet whose first label is the idle symbol.
    pub fn new<S: Into<String>>(symbols: impl IntoIterator<Item = S>) -> Result<Self> {
        let symbols: Vec<String> = symbols.into_iter().map(Into::into).collect();
        if symbols.is_empty() {
            return Err(Error::InvalidAlphabet("alphabet is empty".into()));
        }
        for (i, s) in symbols.iter().enumerate() {
            if symbols[..i].contains(s) {
                return Err(Error::InvalidAlphabet(format!("duplicate label {s:?}")));
            }
        }
        Ok(Self { symbols })
    }

    /// Alphabet with an explicit idle symbol; the idle label is moved to the
    /// front and the relative order of the others is kept.
    pub fn with_idle<S: Into<String>>(
        symbols: impl IntoIterator<Item = S>,
        zero_index: usize,
    ) -> Result<Self> {
        let mut symbols: Vec<String> = symbols.into_iter().map(Into::into).collect();
        if zero_index >= symbols.len() {
            return Err(Error::IndexOutOfRange { index: zero_index, size: symbols.len() });
        }
        let idle = symbols.remove(zero_index);
        symbols.insert(0, idle);
        Self::new(symbols)
    }

    /// Labels `"0"`, `"1"`, ... `"n-1"`.
    pub fn indexed(n: usize) -> Result<Self> {
        Self::new((0..n).map(|i| i.to_string()))
    }

    pub fn binary() -> Self {
        Self { symbols: vec!["0".into(), "1".into()] }
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    /// Index of `x(0)`; fixed at 0.
    pub fn zero_index(&self) -> usize {
        0
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.symbols.iter().position(|s| s == label)
    }
}

/// Discrete memoryless channel `Q(y|x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dmc {
    input: Alphabet,
    output: Alphabet,
    /// Row-major, `input.len() * output.len()` entries.
    probs: Vec<f64>,
}

impl Dmc {
    /// Validated channel. Rows must be nonnegative and sum to one within
    /// [`ROW_SUM_TOL`].
    pub fn new(rows: Vec<Vec<f64>>, input: Alphabet, output: Alphabet) -> Result<Self> {
        Self::build(rows, input, output, false)
    }

    /// Like [`Dmc::new`], but rows whose sum is within [`NORMALIZE_TOL`] of
    /// one are rescaled first. Used for tables produced by quadrature.
    pub fn new_normalized(rows: Vec<Vec<f64>>, input: Alphabet, output: Alphabet) -> Result<Self> {
        Self::build(rows, input, output, true)
    }

    /// Channel over indexed alphabets sized from the table.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n_in = rows.len();
        let n_out = rows.first().map_or(0, Vec::len);
        Self::new(rows, Alphabet::indexed(n_in)?, Alphabet::indexed(n_out)?)
    }

    fn build(rows: Vec<Vec<f64>>, input: Alphabet, output: Alphabet, normalize: bool) -> Result<Self> {
        if rows.len() != input.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} rows for an input alphabet of size {}",
                rows.len(),
                input.len()
            )));
        }
        let mut probs = Vec::with_capacity(input.len() * output.len());
        for (r, row) in rows.into_iter().enumerate() {
            if row.len() != output.len() {
                return Err(Error::DimensionMismatch(format!(
                    "row {r} has {} entries for an output alphabet of size {}",
                    row.len(),
                    output.len()
                )));
            }
            if let Some((c, &value)) = row.iter().enumerate().find(|(_, v)| !(**v >= 0.0) || !v.is_finite()) {
                return Err(Error::NegativeEntry { row: r, col: c, value });
            }
            let sum: f64 = row.iter().sum();
            let dev = (sum - 1.0).abs();
            if dev > ROW_SUM_TOL {
                if normalize && dev < NORMALIZE_TOL {
                    probs.extend(row.iter().map(|v| v / sum));
                    continue;
                }
                return Err(Error::NonStochasticRow { row: r, sum });
            }
            probs.extend(row);
        }
        Ok(Self { input, output, probs })
    }

    pub fn identity(n: usize) -> Result<Self> {
        let rows = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        Self::from_rows(rows)
    }

    /// Binary symmetric channel with crossover probability `eps`.
    pub fn bsc(eps: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&eps) {
            return Err(Error::DomainError(format!("crossover probability {eps} not in [0, 1]")));
        }
        Self::new(
            vec![vec![1.0 - eps, eps], vec![eps, 1.0 - eps]],
            Alphabet::binary(),
            Alphabet::binary(),
        )
    }

    pub fn input_alphabet(&self) -> &Alphabet {
        &self.input
    }

    pub fn output_alphabet(&self) -> &Alphabet {
        &self.output
    }

    pub fn num_inputs(&self) -> usize {
        self.input.len()
    }

    pub fn num_outputs(&self) -> usize {
        self.output.len()
    }

    pub fn row(&self, x: usize) -> &[f64] {
        let n = self.output.len();
        &self.probs[x * n..(x + 1) * n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.probs.chunks(self.output.len())
    }

    pub fn prob(&self, x: usize, y: usize) -> f64 {
        self.probs[x * self.output.len() + y]
    }

    /// Output law under the idle input.
    pub fn idle_row(&self) -> &[f64] {
        self.row(0)
    }

    /// Cascade `self` (X -> H) followed by `next` (H -> Y):
    /// `Q(y|x) = sum_h H(h|x) Qn(y|h)`.
    pub fn compose(&self, next: &Dmc) -> Result<Dmc> {
        if self.num_outputs() != next.num_inputs() {
            return Err(Error::DimensionMismatch(format!(
                "first channel has {} outputs, second has {} inputs",
                self.num_outputs(),
                next.num_inputs()
            )));
        }
        let rows = (0..self.num_inputs())
            .map(|x| {
                let mut out = vec![0.0; next.num_outputs()];
                for (h, &w) in self.row(x).iter().enumerate() {
                    if w == 0.0 {
                        continue;
                    }
                    for (o, &q) in out.iter_mut().zip(next.row(h)) {
                        *o += w * q;
                    }
                }
                out
            })
            .collect();
        Dmc::new_normalized(rows, self.input.clone(), next.output.clone())
    }

    /// Draw one output symbol for input `x`.
    pub fn sample_output<R: Rng + ?Sized>(&self, x: usize, rng: &mut R) -> Result<usize> {
        if x >= self.num_inputs() {
            return Err(Error::IndexOutOfRange { index: x, size: self.num_inputs() });
        }
        Ok(sample_row(self.row(x), rng))
    }

    /// Plain-text matrix: `I O` on the first line, then one row per line.
    pub fn to_matrix_text(&self) -> String {
        let mut s = format!("{} {}\n", self.num_inputs(), self.num_outputs());
        for row in self.rows() {
            let line: Vec<String> = row.iter().map(|v| format!("{v:.17e}")).collect();
            let _ = writeln!(s, "{}", line.join(" "));
        }
        s
    }

    /// Parse the matrix text format. Blank lines and `#` comments are ignored.
    pub fn from_matrix_text(text: &str) -> Result<Dmc> {
        let mut lines = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .filter(|l| !l.is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("empty matrix file".into()))?;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| Error::Parse(format!("bad dimension {t:?}"))))
            .collect::<Result<_>>()?;
        let [n_in, n_out] = dims[..] else {
            return Err(Error::Parse(format!("header must be `I O`, got {header:?}")));
        };
        let rows: Vec<Vec<f64>> = lines
            .map(|l| {
                l.split_whitespace()
                    .map(|t| t.parse::<f64>().map_err(|_| Error::Parse(format!("bad probability {t:?}"))))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        if rows.len() != n_in {
            return Err(Error::DimensionMismatch(format!("header says {n_in} rows, found {}", rows.len())));
        }
        Dmc::new(rows, Alphabet::indexed(n_in)?, Alphabet::indexed(n_out)?)
    }
}

/// Inverse-CDF draw from a probability row.
pub(crate) fn sample_row<R: Rng + ?Sized>(row: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, &p) in row.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    // u landed in the rounding gap above the accumulated sum
    row.iter().rposition(|&p| p > 0.0).unwrap_or(0)
}

/// ON probability of the ON-OFF fading channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OnOffFadingSpec {
    p: f64,
}

impl OnOffFadingSpec {
    pub fn new(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::DomainError(format!("ON probability {p} not in [0, 1]")));
        }
        Ok(Self { p })
    }

    pub fn p(&self) -> f64 {
        self.p
    }
}

/// Fading table `H(h|x) = p 1{h = x} + (1 - p) 1{h = x(0)}` over `alphabet`.
pub fn on_off_fading_matrix(spec: OnOffFadingSpec, alphabet: &Alphabet) -> Result<Dmc> {
    let n = alphabet.len();
    let p = spec.p();
    let rows = (0..n)
        .map(|x| {
            let mut row = vec![0.0; n];
            if x == 0 {
                row[0] = 1.0;
            } else {
                row[x] = p;
                row[0] = 1.0 - p;
            }
            row
        })
        .collect();
    Dmc::new(rows, alphabet.clone(), alphabet.clone())
}

/// `on_off_fading_matrix` over the noise channel's input alphabet, composed
/// with that noise channel.
pub fn on_off_composite(p: f64, noise: &Dmc) -> Result<Dmc> {
    let fading = on_off_fading_matrix(OnOffFadingSpec::new(p)?, noise.input_alphabet())?;
    fading.compose(noise)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_is_valid() {
        let d = Dmc::identity(2).unwrap();
        assert_eq!(d.row(1), &[0.0, 1.0]);
    }

    #[test]
    fn rejects_short_row_sum() {
        let err = Dmc::from_rows(vec![vec![0.6, 0.3], vec![0.5, 0.5]]).unwrap_err();
        assert!(matches!(err, Error::NonStochasticRow { row: 0, .. }));
    }

    #[test]
    fn rejects_negative_and_mismatched() {
        assert!(matches!(
            Dmc::from_rows(vec![vec![1.2, -0.2]]),
            Err(Error::NegativeEntry { row: 0, col: 1, .. })
        ));
        assert!(matches!(
            Dmc::new(vec![vec![1.0]], Alphabet::binary(), Alphabet::binary()),
            Err(Error::DimensionMismatch(_))
        ));
        assert!(matches!(Dmc::from_rows(vec![vec![f64::NAN, 1.0]]), Err(Error::NegativeEntry { .. })));
    }

    #[test]
    fn normalize_flag_only_rescales_tiny_deviations() {
        let near = vec![vec![0.5, 0.5 + 5e-10]];
        assert!(Dmc::from_rows(near.clone()).is_err());
        let d = Dmc::new_normalized(near, Alphabet::indexed(1).unwrap(), Alphabet::indexed(2).unwrap()).unwrap();
        assert!((d.row(0).iter().sum::<f64>() - 1.0).abs() < 1e-15);
        let far = vec![vec![0.5, 0.5 + 1e-8]];
        assert!(Dmc::new_normalized(far, Alphabet::indexed(1).unwrap(), Alphabet::indexed(2).unwrap()).is_err());
    }

    #[test]
    fn bsc_valid() {
        let d = Dmc::bsc(0.1).unwrap();
        assert_eq!(d.row(0), &[0.9, 0.1]);
        assert_eq!(d.row(1), &[0.1, 0.9]);
    }

    #[test]
    fn alphabet_rules() {
        assert!(Alphabet::new(Vec::<String>::new()).is_err());
        assert!(Alphabet::new(["a", "a"]).is_err());
        let a = Alphabet::with_idle(["a", "b", "idle"], 2).unwrap();
        assert_eq!(a.symbols()[0], "idle");
        assert_eq!(a.index_of("b"), Some(2));
        assert!(Alphabet::with_idle(["a"], 3).is_err());
    }

    #[test]
    fn on_off_matrix_cases() {
        let a = Alphabet::binary();
        let one = on_off_fading_matrix(OnOffFadingSpec::new(1.0).unwrap(), &a).unwrap();
        assert_eq!(one, Dmc::new(vec![vec![1.0, 0.0], vec![0.0, 1.0]], a.clone(), a.clone()).unwrap());
        let zero = on_off_fading_matrix(OnOffFadingSpec::new(0.0).unwrap(), &a).unwrap();
        assert!(zero.rows().all(|r| r == [1.0, 0.0]));
        let h = on_off_fading_matrix(OnOffFadingSpec::new(0.3).unwrap(), &a).unwrap();
        assert_eq!(h.row(0), &[1.0, 0.0]);
        assert!((h.row(1)[0] - 0.7).abs() < 1e-15 && (h.row(1)[1] - 0.3).abs() < 1e-15);
        assert!(OnOffFadingSpec::new(1.5).is_err());
    }

    #[test]
    fn composite_bsc_matches_printed_table() {
        let (p, eps) = (0.4, 0.1);
        let q = on_off_composite(p, &Dmc::bsc(eps).unwrap()).unwrap();
        let expect = [
            [1.0 - eps, eps],
            [p * eps + (1.0 - p) * (1.0 - eps), p * (1.0 - eps) + (1.0 - p) * eps],
        ];
        for x in 0..2 {
            for y in 0..2 {
                assert!((q.prob(x, y) - expect[x][y]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn compose_identity_and_mismatch() {
        let noise = Dmc::from_rows(vec![vec![0.7, 0.2, 0.1], vec![0.1, 0.3, 0.6]]).unwrap();
        let out = Dmc::identity(2).unwrap().compose(&noise).unwrap();
        assert_eq!(out.row(0), noise.row(0));
        assert_eq!(on_off_composite(1.0, &noise).unwrap().row(1), noise.row(1));
        assert!(matches!(noise.compose(&noise), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn sampling_degenerate_rows() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let id = Dmc::identity(2).unwrap();
        let bsc0 = Dmc::bsc(0.0).unwrap();
        for _ in 0..1000 {
            assert_eq!(id.sample_output(1, &mut rng).unwrap(), 1);
            assert_eq!(bsc0.sample_output(0, &mut rng).unwrap(), 0);
        }
        assert!(matches!(id.sample_output(2, &mut rng), Err(Error::IndexOutOfRange { index: 2, size: 2 })));
    }

    #[test]
    fn bsc_flip_fraction() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let d = Dmc::bsc(0.25).unwrap();
        let n = 1_000_000;
        let flips = (0..n).filter(|_| d.sample_output(0, &mut rng).unwrap() == 1).count();
        assert!((flips as f64 / n as f64 - 0.25).abs() < 0.002);
    }

    #[test]
    fn matrix_text_round_trip() {
        let d = Dmc::from_rows(vec![vec![0.1, 0.2, 0.7], vec![1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0]]).unwrap();
        let text = d.to_matrix_text();
        assert!(text.starts_with("2 3\n"));
        assert_eq!(Dmc::from_matrix_text(&text).unwrap(), d);
        assert!(Dmc::from_matrix_text("2 2\n1 0\n").is_err());
        assert!(Dmc::from_matrix_text("# comment\n1 2\n0.5 0.5 # trailing\n").is_ok());
    }
}
