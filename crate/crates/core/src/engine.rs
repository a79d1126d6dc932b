//! Synchronous evolution of an `n`-cell decimal CA under null boundary.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use thiserror::Error;

use crate::rule::{FdcaRule, RuleTable};

/// Largest cell count whose index space fits a `u64`.
pub const MAX_CELLS: usize = 19;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("cell count {0} is outside 1..={MAX_CELLS}")]
    CellCount(usize),
    #[error("invalid digit {digit:?} at cell {position}")]
    Digit { position: usize, digit: char },
    #[error("index {index} is outside 0..10^{n}")]
    IndexOutOfRange { index: u64, n: usize },
}

pub(crate) fn check_cells(n: usize) -> Result<(), EngineError> {
    if (1..=MAX_CELLS).contains(&n) {
        Ok(())
    } else {
        Err(EngineError::CellCount(n))
    }
}

/// `10^n` for `n <= 19`.
pub const fn space_size(n: usize) -> u64 {
    10u64.pow(n as u32)
}

/// Dense index of a configuration: the base-10 reading of its cells with the
/// leftmost cell most significant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConfigIndex(pub u64);

/// A row of `n` decimal cells.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Configuration {
    cells: Vec<u8>,
}

impl Configuration {
    pub fn new(cells: Vec<u8>) -> Result<Self, EngineError> {
        check_cells(cells.len())?;
        if let Some(position) = cells.iter().position(|&c| c > 9) {
            return Err(EngineError::Digit {
                position,
                digit: char::from_digit(cells[position] as u32 % 36, 36).unwrap_or('?'),
            });
        }
        Ok(Configuration { cells })
    }

    pub fn zeros(n: usize) -> Result<Self, EngineError> {
        check_cells(n)?;
        Ok(Configuration {
            cells: alloc::vec![0; n],
        })
    }

    pub fn from_index(idx: ConfigIndex, n: usize) -> Result<Self, EngineError> {
        check_cells(n)?;
        if idx.0 >= space_size(n) {
            return Err(EngineError::IndexOutOfRange { index: idx.0, n });
        }
        let mut cells = alloc::vec![0u8; n];
        let mut rest = idx.0;
        for c in cells.iter_mut().rev() {
            *c = (rest % 10) as u8;
            rest /= 10;
        }
        Ok(Configuration { cells })
    }

    pub fn index(&self) -> ConfigIndex {
        ConfigIndex(self.cells.iter().fold(0u64, |acc, &c| acc * 10 + c as u64))
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn cells(&self) -> &[u8] {
        &self.cells
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self.cells.iter().map(|&c| char::from(b'0' + c)).collect();
        f.write_str(&s)
    }
}

impl fmt::Debug for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Configuration({self})")
    }
}

impl FromStr for Configuration {
    type Err = EngineError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let cells = s
            .chars()
            .enumerate()
            .map(|(position, ch)| {
                ch.to_digit(10)
                    .map(|d| d as u8)
                    .ok_or(EngineError::Digit { position, digit: ch })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Configuration::new(cells)
    }
}

pub fn index_of(c: &Configuration) -> ConfigIndex {
    c.index()
}

pub fn config_of(idx: ConfigIndex, n: usize) -> Result<Configuration, EngineError> {
    Configuration::from_index(idx, n)
}

fn step_cells(table: &RuleTable, cells: &[u8], out: &mut [u8]) {
    let n = cells.len();
    for i in 0..n {
        let x = if i == 0 { 0 } else { cells[i - 1] };
        let z = if i + 1 == n { 0 } else { cells[i + 1] };
        out[i] = table.lookup(x, cells[i], z);
    }
}

/// One synchronous update; cells beyond either end read as 0.
pub fn step(rule: &FdcaRule, c: &Configuration) -> Configuration {
    let table = rule.expand_table();
    let mut out = alloc::vec![0u8; c.len()];
    step_cells(&table, &c.cells, &mut out);
    Configuration { cells: out }
}

/// `t` applications of [`step`].
pub fn evolve(rule: &FdcaRule, c: &Configuration, t: u64) -> Configuration {
    let table = rule.expand_table();
    let mut cur = c.cells.clone();
    let mut next = alloc::vec![0u8; c.len()];
    for _ in 0..t {
        step_cells(&table, &cur, &mut next);
        core::mem::swap(&mut cur, &mut next);
    }
    Configuration { cells: cur }
}

/// Table-driven successor function on configuration indices.
///
/// Cells are handled in groups: a lookup on a window of `G + 2` digits yields
/// the next state of the `G` middle digits, so one step of an `n`-cell space
/// costs about `n / G` lookups.
#[derive(Clone)]
pub struct Stepper {
    n: usize,
    rule: FdcaRule,
    table: RuleTable,
    window: Vec<u32>,
}

/// Digits updated per window lookup.
const GROUP: usize = 3;
const GROUP_POW: u64 = 1000;
const WINDOW_POW: u64 = 100_000;

impl Stepper {
    pub fn new(rule: &FdcaRule, n: usize) -> Result<Self, EngineError> {
        check_cells(n)?;
        let table = rule.expand_table();
        let window = (0..WINDOW_POW as u32)
            .map(|w| {
                let mut d = [0u8; GROUP + 2];
                let mut rest = w;
                for slot in d.iter_mut().rev() {
                    *slot = (rest % 10) as u8;
                    rest /= 10;
                }
                (0..GROUP).fold(0u32, |acc, i| acc * 10 + table.lookup(d[i], d[i + 1], d[i + 2]) as u32)
            })
            .collect();
        Ok(Stepper {
            n,
            rule: *rule,
            table,
            window,
        })
    }

    pub fn cells(&self) -> usize {
        self.n
    }

    pub fn rule(&self) -> &FdcaRule {
        &self.rule
    }

    pub fn table(&self) -> &RuleTable {
        &self.table
    }

    pub fn space_size(&self) -> u64 {
        space_size(self.n)
    }

    /// Successor of `idx`; `idx` must lie in `0..10^n`.
    #[inline]
    pub fn next(&self, idx: u64) -> u64 {
        // Appending a zero digit on the right supplies the right boundary;
        // the left boundary is the implicit leading zero above digit n-1.
        if self.n < MAX_CELLS {
            self.next_in::<u64>(idx * 10)
        } else {
            self.next_in::<u128>(idx as u128 * 10)
        }
    }

    #[inline(always)]
    fn next_in<T: Wide>(&self, wide: T) -> u64 {
        let mut out = 0u64;
        let mut scale = 1u64;
        let mut shifted = wide;
        let mut done = 0;
        while done + GROUP <= self.n {
            out += self.window[shifted.rem(WINDOW_POW)] as u64 * scale;
            shifted = shifted.div(GROUP_POW);
            scale = scale.wrapping_mul(GROUP_POW);
            done += GROUP;
        }
        while done < self.n {
            out += self.table.as_slice()[shifted.rem(1000)] as u64 * scale;
            shifted = shifted.div(10);
            scale = scale.wrapping_mul(10);
            done += 1;
        }
        out
    }
}

trait Wide: Copy {
    fn rem(self, m: u64) -> usize;
    fn div(self, d: u64) -> Self;
}

impl Wide for u64 {
    #[inline(always)]
    fn rem(self, m: u64) -> usize {
        (self % m) as usize
    }
    #[inline(always)]
    fn div(self, d: u64) -> Self {
        self / d
    }
}

impl Wide for u128 {
    #[inline(always)]
    fn rem(self, m: u64) -> usize {
        (self % m as u128) as usize
    }
    #[inline(always)]
    fn div(self, d: u64) -> Self {
        self / d as u128
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    fn cfg(s: &str) -> Configuration {
        s.parse().unwrap()
    }

    fn rule(s: &str) -> FdcaRule {
        s.parse().unwrap()
    }

    #[test]
    fn step_examples() {
        let r = rule("00001018");
        assert_eq!(step(&r, &cfg("0000")), cfg("8888"));
        assert_eq!(step(&r, &cfg("8888")), cfg("6446"));
        assert_eq!(evolve(&r, &cfg("0000"), 2), cfg("6446"));
        assert_eq!(evolve(&r, &cfg("1234"), 0), cfg("1234"));
        assert_eq!(step(&FdcaRule::IDENTITY, &cfg("90210")), cfg("90210"));
    }

    #[test]
    fn index_round_trip() {
        assert_eq!(cfg("0000").index(), ConfigIndex(0));
        assert_eq!(cfg("0102").index(), ConfigIndex(102));
        assert_eq!(config_of(ConfigIndex(9999), 4).unwrap(), cfg("9999"));
        assert_eq!(config_of(ConfigIndex(102), 4).unwrap().to_string(), "0102");
        assert!(config_of(ConfigIndex(10_000), 4).is_err());
        assert!(Configuration::zeros(20).is_err());
        assert!("12a4".parse::<Configuration>().is_err());
    }

    #[test]
    fn stepper_matches_formula_for_every_width() {
        let r = rule("37241568");
        for n in 1..=MAX_CELLS {
            let s = Stepper::new(&r, n).unwrap();
            let mut idx = 0x5DEE_CE66u64 % space_size(n);
            for _ in 0..200 {
                let c = config_of(ConfigIndex(idx), n).unwrap();
                let want = step(&r, &c).index().0;
                assert_eq!(s.next(idx), want, "n={n} idx={idx}");
                idx = (idx.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407)) % space_size(n);
            }
        }
    }

    #[test]
    fn stepper_top_of_range() {
        let r = rule("00001018");
        let s = Stepper::new(&r, 19).unwrap();
        let max = space_size(19) - 1;
        assert_eq!(
            s.next(max),
            step(&r, &config_of(ConfigIndex(max), 19).unwrap()).index().0
        );
    }
}
