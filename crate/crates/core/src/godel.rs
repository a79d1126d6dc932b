//! Gödel numbering of numeric rows and the decimal frames cut from them.
//!
//! A row of non-negative integers `(g1, …, gk)` maps to `2^g1 · 3^g2 · … · pk^gk`.
//! Rows are first scaled to integers column by column, then their Gödel
//! numbers are left-padded to a common decimal width and cut into fixed-width
//! vertical splits.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::cluster::Clustering;
use crate::engine::MAX_CELLS;

/// Default cap on the decimal length of a single Gödel number.
pub const DEFAULT_MAX_GODEL_DIGITS: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GodelError {
    #[error("cannot parse {text:?} as a decimal number")]
    Parse { text: String },
    #[error("row {row}, column {column}: {text:?} is not a decimal number")]
    Cell { row: usize, column: usize, text: String },
    #[error("row {row} has {found} values, expected {expected}")]
    Ragged { row: usize, found: usize, expected: usize },
    #[error("dataset has no rows or no columns")]
    Empty,
    #[error("column {column}: scaled value does not fit in 64 bits")]
    Overflow { column: usize },
    #[error("row {row}: Gödel number would have about {digits} digits (limit {limit}); lower the decimal precision or raise the limit")]
    TooLarge { row: usize, digits: usize, limit: usize },
    #[error("exponent {0} is too large to encode")]
    Exponent(u64),
    #[error("{0} is not a product of the first {1} primes")]
    NotGodel(String, usize),
    #[error("zero is not a Gödel number")]
    Zero,
    #[error("split size {0} is outside {1}..={2}")]
    SplitSize(usize, usize, usize),
    #[error("need 1 <= k <= {distinct} distinct values, got k = {k}")]
    BadK { k: usize, distinct: usize },
}

/// An exact decimal `mantissa · 10^-scale`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Decimal {
    pub mantissa: i128,
    pub scale: u32,
}

impl Decimal {
    pub fn new(mantissa: i128, scale: u32) -> Self {
        Decimal { mantissa, scale }
    }

    pub fn to_f64(self) -> f64 {
        self.mantissa as f64 / libm::pow(10.0, self.scale as f64)
    }

    /// Rounds `value` to `decimals` places, trailing zeros dropped.
    pub fn from_f64(value: f64, decimals: u32) -> Option<Self> {
        if !value.is_finite() {
            return None;
        }
        let scaled = libm::rint(value * libm::pow(10.0, decimals as f64));
        if scaled.abs() >= 1e30 {
            return None;
        }
        Some(Decimal::new(scaled as i128, decimals).normalized())
    }

    /// Drops trailing zero digits of the fractional part.
    pub fn normalized(mut self) -> Self {
        while self.scale > 0 && self.mantissa % 10 == 0 {
            self.mantissa /= 10;
            self.scale -= 1;
        }
        self
    }

    /// `mantissa` expressed at `scale`, rounding half to even when digits are
    /// dropped. `None` on overflow.
    pub fn rescaled(self, scale: u32) -> Option<i128> {
        if scale >= self.scale {
            self.mantissa.checked_mul(10i128.checked_pow(scale - self.scale)?)
        } else {
            let div = 10i128.checked_pow(self.scale - scale)?;
            let (q, r) = (self.mantissa.div_euclid(div), self.mantissa.rem_euclid(div));
            let twice = 2 * r;
            Some(if twice > div || (twice == div && q % 2 != 0) {
                q + 1
            } else {
                q
            })
        }
    }
}

impl FromStr for Decimal {
    type Err = GodelError;

    /// Plain decimal notation with optional sign and exponent: `-12.5`, `3e2`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || GodelError::Parse { text: s.to_string() };
        let t = s.trim();
        let (body, exp) = match t.find(['e', 'E']) {
            Some(i) => (&t[..i], t[i + 1..].parse::<i32>().map_err(|_| err())?),
            None => (t, 0),
        };
        let (neg, body) = match body.as_bytes().first() {
            Some(b'-') => (true, &body[1..]),
            Some(b'+') => (false, &body[1..]),
            _ => (false, body),
        };
        let (int, frac) = body.split_once('.').unwrap_or((body, ""));
        if int.is_empty() && frac.is_empty() {
            return Err(err());
        }
        let mut mantissa: i128 = 0;
        for b in int.bytes().chain(frac.bytes()) {
            if !b.is_ascii_digit() {
                return Err(err());
            }
            mantissa = mantissa
                .checked_mul(10)
                .and_then(|m| m.checked_add((b - b'0') as i128))
                .ok_or_else(err)?;
        }
        let mut scale = frac.len() as i64 - exp as i64;
        while scale < 0 {
            mantissa = mantissa.checked_mul(10).ok_or_else(err)?;
            scale += 1;
        }
        let scale = u32::try_from(scale).map_err(|_| err())?;
        Ok(Decimal::new(if neg { -mantissa } else { mantissa }, scale))
    }
}

impl fmt::Display for Decimal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.mantissa < 0 { "-" } else { "" };
        let digits = self.mantissa.unsigned_abs().to_string();
        if self.scale == 0 {
            return write!(f, "{sign}{digits}");
        }
        let s = self.scale as usize;
        let padded = if digits.len() <= s {
            let mut p = "0".repeat(s + 1 - digits.len());
            p.push_str(&digits);
            p
        } else {
            digits
        };
        let (a, b) = padded.split_at(padded.len() - s);
        write!(f, "{sign}{a}.{b}")
    }
}

/// Rectangular table of exact decimals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NumericDataset {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Decimal>>,
}

impl NumericDataset {
    pub fn new(columns: Vec<String>, rows: Vec<Vec<Decimal>>) -> Result<Self, GodelError> {
        if rows.is_empty() || columns.is_empty() {
            return Err(GodelError::Empty);
        }
        for (row, r) in rows.iter().enumerate() {
            if r.len() != columns.len() {
                return Err(GodelError::Ragged {
                    row,
                    found: r.len(),
                    expected: columns.len(),
                });
            }
        }
        Ok(NumericDataset { columns, rows })
    }

    /// Builds a dataset from floats rounded to `decimals` places.
    pub fn from_f64(rows: &[Vec<f64>], decimals: u32) -> Result<Self, GodelError> {
        let width = rows.first().map_or(0, Vec::len);
        let columns = (0..width).map(|j| alloc::format!("x{j}")).collect();
        let parsed = rows
            .iter()
            .enumerate()
            .map(|(row, r)| {
                r.iter()
                    .enumerate()
                    .map(|(column, &v)| {
                        Decimal::from_f64(v, decimals).ok_or(GodelError::Cell {
                            row,
                            column,
                            text: alloc::format!("{v}"),
                        })
                    })
                    .collect()
            })
            .collect::<Result<_, _>>()?;
        Self::new(columns, parsed)
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    /// Largest number of fractional digits in column `j`.
    pub fn column_decimals(&self, j: usize) -> u32 {
        self.rows.iter().map(|r| r[j].normalized().scale).max().unwrap_or(0)
    }

    pub fn to_f64_rows(&self) -> Vec<Vec<f64>> {
        self.rows
            .iter()
            .map(|r| r.iter().map(|d| d.to_f64()).collect())
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ScaleOptions {
    /// Caps the decimal places kept per column; extra digits are rounded
    /// half to even.
    pub max_decimals: Option<u32>,
}

/// How one column was mapped to non-negative integers:
/// `scaled = round(value · 10^decimals) + shift`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ColumnTransform {
    pub decimals: u32,
    pub shift: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScaledDataset {
    pub rows: Vec<Vec<u64>>,
    pub transforms: Vec<ColumnTransform>,
}

/// Scales every column to integers and shifts columns with negative values so
/// their minimum becomes 0.
pub fn preprocess_scale(raw: &NumericDataset, opts: ScaleOptions) -> Result<ScaledDataset, GodelError> {
    let mut rows = vec![Vec::with_capacity(raw.n_cols()); raw.n_rows()];
    let mut transforms = Vec::with_capacity(raw.n_cols());
    for j in 0..raw.n_cols() {
        let mut decimals = raw.column_decimals(j);
        if let Some(cap) = opts.max_decimals {
            decimals = decimals.min(cap);
        }
        let scaled: Vec<i128> = raw
            .rows
            .iter()
            .map(|r| r[j].rescaled(decimals).ok_or(GodelError::Overflow { column: j }))
            .collect::<Result<_, _>>()?;
        let min = scaled.iter().copied().min().unwrap_or(0);
        let shift = if min < 0 { -min } else { 0 };
        for (i, v) in scaled.into_iter().enumerate() {
            let v = u64::try_from(v + shift).map_err(|_| GodelError::Overflow { column: j })?;
            rows[i].push(v);
        }
        transforms.push(ColumnTransform {
            decimals,
            shift: shift as u64,
        });
    }
    Ok(ScaledDataset { rows, transforms })
}

/// The first `k` primes.
pub fn first_primes(k: usize) -> Vec<u64> {
    let mut out: Vec<u64> = Vec::with_capacity(k);
    let mut c = 2u64;
    while out.len() < k {
        if out.iter().take_while(|&&p| p * p <= c).all(|&p| c % p != 0) {
            out.push(c);
        }
        c += 1;
    }
    out
}

/// Estimated decimal length, exact up to float rounding, of `∏ p_i^{g_i}`.
pub fn estimated_digits(row: &[u64]) -> usize {
    let primes = first_primes(row.len());
    let log: f64 = row
        .iter()
        .zip(&primes)
        .map(|(&g, &p)| g as f64 * libm::log10(p as f64))
        .sum();
    libm::floor(log) as usize + 1
}

/// `∏ p_i^{g_i}` over the first `row.len()` primes.
pub fn godel_encode(row: &[u64]) -> Result<BigUint, GodelError> {
    let mut acc = BigUint::one();
    for (&g, p) in row.iter().zip(first_primes(row.len())) {
        let e = u32::try_from(g).map_err(|_| GodelError::Exponent(g))?;
        acc *= BigUint::from(p).pow(e);
    }
    Ok(acc)
}

/// [`godel_encode`] refusing results longer than `max_digits`.
pub fn godel_encode_limited(row: &[u64], max_digits: usize) -> Result<BigUint, GodelError> {
    let digits = estimated_digits(row);
    if digits > max_digits {
        return Err(GodelError::TooLarge {
            row: 0,
            digits,
            limit: max_digits,
        });
    }
    godel_encode(row)
}

/// Exponent vector of `g` over the first `k` primes.
pub fn godel_decode(g: &BigUint, k: usize) -> Result<Vec<u64>, GodelError> {
    if g.is_zero() {
        return Err(GodelError::Zero);
    }
    let mut rest = g.clone();
    let mut out = Vec::with_capacity(k);
    for p in first_primes(k) {
        let p = BigUint::from(p);
        let mut e = 0u64;
        loop {
            let (q, r) = rest.div_rem(&p);
            if !r.is_zero() {
                break;
            }
            rest = q;
            e += 1;
        }
        out.push(e);
    }
    if !rest.is_one() {
        return Err(GodelError::NotGodel(g.to_string(), k));
    }
    Ok(out)
}

/// Encodes every row, naming the first row that breaks the digit cap.
pub fn encode_rows(rows: &[Vec<u64>], max_digits: usize) -> Result<Vec<BigUint>, GodelError> {
    rows.iter()
        .enumerate()
        .map(|(i, r)| {
            godel_encode_limited(r, max_digits).map_err(|e| match e {
                GodelError::TooLarge { digits, limit, .. } => GodelError::TooLarge { row: i, digits, limit },
                other => other,
            })
        })
        .collect()
}

/// Zero-padded decimal rows cut into vertical splits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitFrame {
    rows: Vec<String>,
    width: usize,
    split_size: usize,
}

impl SplitFrame {
    /// Left-pads `rows` to a common width, and to a multiple of
    /// `split_size` when `pad_to_multiple` is set.
    pub fn from_digit_rows(
        mut rows: Vec<String>,
        split_size: usize,
        pad_to_multiple: bool,
    ) -> Result<Self, GodelError> {
        if !(1..=MAX_CELLS).contains(&split_size) {
            return Err(GodelError::SplitSize(split_size, 1, MAX_CELLS));
        }
        let mut width = rows.iter().map(String::len).max().unwrap_or(0).max(1);
        if pad_to_multiple {
            width = width.div_ceil(split_size) * split_size;
        }
        for r in &mut rows {
            debug_assert!(r.bytes().all(|b| b.is_ascii_digit()));
            if r.len() < width {
                let mut p = "0".repeat(width - r.len());
                p.push_str(r);
                *r = p;
            }
        }
        Ok(SplitFrame {
            rows,
            width,
            split_size,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn split_size(&self) -> usize {
        self.split_size
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn row(&self, i: usize) -> &str {
        &self.rows[i]
    }

    pub fn rows(&self) -> &[String] {
        &self.rows
    }

    pub fn n_splits(&self) -> usize {
        self.width.div_ceil(self.split_size)
    }

    /// Character range of split `j`; only the last may be shorter.
    pub fn split_range(&self, j: usize) -> core::ops::Range<usize> {
        let start = j * self.split_size;
        start..(start + self.split_size).min(self.width)
    }

    pub fn split(&self, i: usize, j: usize) -> &str {
        &self.rows[i][self.split_range(j)]
    }

    /// All splits of row `i`, left to right.
    pub fn splits(&self, i: usize) -> impl Iterator<Item = &str> + '_ {
        (0..self.n_splits()).map(move |j| self.split(i, j))
    }

    /// Split `j` of every row as a configuration index.
    pub fn split_column(&self, j: usize) -> Vec<u64> {
        (0..self.n_rows())
            .map(|i| self.split(i, j).bytes().fold(0u64, |a, b| a * 10 + (b - b'0') as u64))
            .collect()
    }
}

/// Gödel numbers of a dataset together with their split frame.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GodelFrame {
    pub numbers: Vec<BigUint>,
    pub frame: SplitFrame,
}

pub const MIN_SPLIT: usize = 6;
pub const MAX_SPLIT: usize = 10;

/// Renders `numbers` in decimal, pads and splits them.
pub fn build_frame(numbers: Vec<BigUint>, split_size: usize, pad_to_multiple: bool) -> Result<GodelFrame, GodelError> {
    if !(MIN_SPLIT..=MAX_SPLIT).contains(&split_size) {
        return Err(GodelError::SplitSize(split_size, MIN_SPLIT, MAX_SPLIT));
    }
    let rows = numbers.iter().map(|g| g.to_str_radix(10)).collect();
    let frame = SplitFrame::from_digit_rows(rows, split_size, pad_to_multiple)?;
    Ok(GodelFrame { numbers, frame })
}

/// Cuts the sorted values at the `k - 1` widest gaps; equal gaps are cut
/// left first. Clusters are numbered in ascending value order.
pub fn sort_godel_clusters(numbers: &[BigUint], k: usize) -> Result<Clustering, GodelError> {
    let mut order: Vec<usize> = (0..numbers.len()).collect();
    order.sort_by(|&a, &b| numbers[a].cmp(&numbers[b]).then(a.cmp(&b)));
    let distinct = 1 + order.windows(2).filter(|w| numbers[w[0]] != numbers[w[1]]).count();
    if numbers.is_empty() || k == 0 || k > distinct {
        return Err(GodelError::BadK {
            k,
            distinct: if numbers.is_empty() { 0 } else { distinct },
        });
    }
    let mut gaps: Vec<(BigUint, usize)> = order
        .windows(2)
        .enumerate()
        .map(|(pos, w)| (&numbers[w[1]] - &numbers[w[0]], pos))
        .collect();
    // widest first, leftmost among equals
    gaps.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    let mut cuts: Vec<usize> = gaps.iter().take(k - 1).map(|g| g.1).collect();
    cuts.sort_unstable();
    let mut labels = vec![0usize; numbers.len()];
    let mut cluster = 0;
    let mut next_cut = cuts.iter().peekable();
    for (pos, &row) in order.iter().enumerate() {
        labels[row] = cluster;
        if next_cut.peek() == Some(&&pos) {
            next_cut.next();
            cluster += 1;
        }
    }
    Ok(Clustering::from_raw(labels, k, vec![String::from("sort_godel")]))
}

/// Largest value as `f64` for scale comparisons; saturates at `f64::MAX`.
pub fn big_to_f64(g: &BigUint) -> f64 {
    g.to_f64().unwrap_or(f64::MAX)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(s: &str) -> BigUint {
        s.parse().unwrap()
    }

    fn dec(s: &str) -> Decimal {
        s.parse().unwrap()
    }

    #[test]
    fn encodes_hypothetical_rows() {
        assert_eq!(godel_encode(&[10, 2, 1, 7]).unwrap(), big("37948861440"));
        assert_eq!(godel_encode(&[5, 5, 4, 2]).unwrap(), big("238140000"));
        assert_eq!(godel_encode(&[0, 0, 0]).unwrap(), BigUint::one());
        assert_eq!(godel_decode(&big("900"), 3).unwrap(), [2, 2, 2]);
        assert_eq!(godel_decode(&BigUint::one(), 4).unwrap(), [0, 0, 0, 0]);
        assert_eq!(godel_decode(&big("37948861440"), 4).unwrap(), [10, 2, 1, 7]);
        assert!(matches!(godel_decode(&big("22"), 4), Err(GodelError::NotGodel(..))));
        assert!(matches!(godel_decode(&BigUint::zero(), 2), Err(GodelError::Zero)));
    }

    #[test]
    fn digit_guard() {
        assert_eq!(estimated_digits(&[10, 2, 1, 7]), 11);
        assert!(matches!(
            godel_encode_limited(&[5000, 0], 100),
            Err(GodelError::TooLarge { digits: 1506, .. })
        ));
        let rows = vec![vec![1, 1], vec![20000, 1]];
        assert!(matches!(
            encode_rows(&rows, 4096),
            Err(GodelError::TooLarge { row: 1, .. })
        ));
    }

    #[test]
    fn primes() {
        assert_eq!(first_primes(8), [2, 3, 5, 7, 11, 13, 17, 19]);
        assert!(first_primes(0).is_empty());
    }

    #[test]
    fn decimals_parse_and_round() {
        assert_eq!(dec("9.5"), Decimal::new(95, 1));
        assert_eq!(dec("-2"), Decimal::new(-2, 0));
        assert_eq!(dec("1.2e1"), Decimal::new(12, 0));
        assert_eq!(dec(".25"), Decimal::new(25, 2));
        assert!("1.2.3".parse::<Decimal>().is_err());
        assert!("abc".parse::<Decimal>().is_err());
        assert!("".parse::<Decimal>().is_err());
        assert_eq!(dec("2.5").rescaled(0), Some(2));
        assert_eq!(dec("3.5").rescaled(0), Some(4));
        assert_eq!(dec("-2.5").rescaled(0), Some(-2));
        assert_eq!(dec("1.2345").rescaled(2), Some(123));
        assert_eq!(dec("1.2351").rescaled(3), Some(1235));
        assert_eq!(dec("0.0705").to_string(), "0.0705");
        assert_eq!(dec("-12.50").to_string(), "-12.50");
    }

    #[test]
    fn scale_examples() {
        let col = |vals: &[&str]| {
            let rows = vals.iter().map(|v| vec![dec(v)]).collect();
            let ds = NumericDataset::new(vec!["a".into()], rows).unwrap();
            let s = preprocess_scale(&ds, ScaleOptions::default()).unwrap();
            s.rows.iter().map(|r| r[0]).collect::<Vec<_>>()
        };
        assert_eq!(col(&["9", "9.5", "4"]), [90, 95, 40]);
        assert_eq!(col(&["3", "14", "0"]), [3, 14, 0]);
        assert_eq!(col(&["-2", "0", "3"]), [0, 2, 5]);
        assert_eq!(col(&["1.50", "2"]), [15, 20]);
    }

    #[test]
    fn ragged_rows_rejected() {
        let err = NumericDataset::new(vec!["a".into(), "b".into()], vec![vec![dec("1")]]).unwrap_err();
        assert_eq!(
            err,
            GodelError::Ragged {
                row: 0,
                found: 1,
                expected: 2
            }
        );
    }

    #[test]
    fn frame_examples() {
        let f = build_frame(vec![big("37948861440")], 6, true).unwrap();
        assert_eq!(f.frame.width(), 12);
        assert_eq!(f.frame.splits(0).collect::<Vec<_>>(), ["037948", "861440"]);

        let f = build_frame(vec![big("7"), big("3")], 6, true).unwrap();
        assert_eq!(f.frame.width(), 6);
        assert_eq!(f.frame.row(0), "000007");

        let f = build_frame(vec![big("123456789"), big("987654321")], 6, false).unwrap();
        assert_eq!(f.frame.width(), 9);
        assert_eq!(f.frame.splits(1).collect::<Vec<_>>(), ["987654", "321"]);
        assert_eq!(f.frame.split_column(1), [789, 321]);
        assert!(build_frame(vec![big("1")], 5, true).is_err());
    }

    #[test]
    fn sort_godel_cuts_widest_gaps() {
        let nums: Vec<BigUint> = [1u32, 2, 3, 10, 11, 30].iter().map(|&v| BigUint::from(v)).collect();
        let c = sort_godel_clusters(&nums, 3).unwrap();
        assert_eq!(c.labels(), [0, 0, 0, 1, 1, 2]);
        assert_eq!(sort_godel_clusters(&nums, 1).unwrap().k(), 1);
        assert_eq!(sort_godel_clusters(&nums, 6).unwrap().labels(), [0, 1, 2, 3, 4, 5]);
        assert!(sort_godel_clusters(&nums, 7).is_err());
        assert!(sort_godel_clusters(&nums, 0).is_err());

        // equal gaps: the leftmost is cut
        let even: Vec<BigUint> = [0u32, 5, 10].iter().map(|&v| BigUint::from(v)).collect();
        assert_eq!(sort_godel_clusters(&even, 2).unwrap().labels(), [0, 1, 1]);
        // duplicates never split
        let dup: Vec<BigUint> = [4u32, 4, 9].iter().map(|&v| BigUint::from(v)).collect();
        assert!(sort_godel_clusters(&dup, 3).is_err());
        assert_eq!(sort_godel_clusters(&dup, 2).unwrap().labels(), [0, 0, 1]);
    }
}
