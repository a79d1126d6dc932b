//! Rule algebra for 3-neighbourhood, 10-state first-degree cellular automata.
//!
//! A first-degree rule is fixed by eight parameters `⟨c0, …, c7⟩`, each a
//! decimal digit, and maps a neighbourhood `(x, y, z)` to
//!
//! ```text
//! (c0·x·y·z + c1·x·y + c2·x·z + c3·y·z + c4·x + c5·y + c6·z + c7) mod 10
//! ```
//!
//! A neighbourhood is addressed by its rule min term (RMT) `100x + 10y + z`.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use thiserror::Error;

/// Number of RMTs of a 3-neighbourhood decimal rule.
pub const RMT_COUNT: usize = 1000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RuleError {
    #[error("parameter c{index} = {value} is not a decimal digit")]
    ParamOutOfRange { index: usize, value: u8 },
    #[error("RMT {0} is outside 0..=999")]
    RmtOutOfRange(u16),
    #[error("set index {0} is outside 0..=99")]
    SetIndexOutOfRange(u8),
    #[error("digit {0} is outside 0..=9")]
    DigitOutOfRange(u8),
    #[error("cannot parse rule {0:?}: expected 8 digits, e.g. \"00001018\" or \"⟨0,0,0,0,1,0,1,8⟩\"")]
    Parse(String),
}

/// A rule min term: the neighbourhood `(x, y, z)` encoded as `100x + 10y + z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Rmt(u16);

impl Rmt {
    pub fn new(value: u16) -> Result<Self, RuleError> {
        if (value as usize) < RMT_COUNT {
            Ok(Rmt(value))
        } else {
            Err(RuleError::RmtOutOfRange(value))
        }
    }

    pub fn from_digits(x: u8, y: u8, z: u8) -> Result<Self, RuleError> {
        for d in [x, y, z] {
            check_digit(d)?;
        }
        Ok(Rmt(100 * x as u16 + 10 * y as u16 + z as u16))
    }

    pub const fn value(self) -> u16 {
        self.0
    }

    /// Left neighbour.
    pub const fn x(self) -> u8 {
        (self.0 / 100) as u8
    }

    /// The cell itself.
    pub const fn y(self) -> u8 {
        ((self.0 / 10) % 10) as u8
    }

    /// Right neighbour.
    pub const fn z(self) -> u8 {
        (self.0 % 10) as u8
    }

    /// Iterates all 1000 RMTs in ascending order.
    pub fn all() -> impl Iterator<Item = Rmt> + Clone {
        (0..RMT_COUNT as u16).map(Rmt)
    }
}

impl fmt::Display for Rmt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:03}", self.0)
    }
}

fn check_digit(d: u8) -> Result<u8, RuleError> {
    if d <= 9 {
        Ok(d)
    } else {
        Err(RuleError::DigitOutOfRange(d))
    }
}

/// Parameters `⟨c0, …, c7⟩` of a decimal first-degree rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FdcaRule {
    params: [u8; 8],
}

impl FdcaRule {
    /// `R(x, y, z) = y`.
    pub const IDENTITY: FdcaRule = FdcaRule {
        params: [0, 0, 0, 0, 0, 1, 0, 0],
    };

    pub fn new(params: [u8; 8]) -> Result<Self, RuleError> {
        for (index, &value) in params.iter().enumerate() {
            if value > 9 {
                return Err(RuleError::ParamOutOfRange { index, value });
            }
        }
        Ok(FdcaRule { params })
    }

    /// The affine rule `⟨0,0,0,0,c4,c5,c6,c7⟩`.
    pub fn affine(c4: u8, c5: u8, c6: u8, c7: u8) -> Result<Self, RuleError> {
        Self::new([0, 0, 0, 0, c4, c5, c6, c7])
    }

    /// Rule with parameters taken from a dense index in `0..10^8`, `c0` being
    /// the most significant digit.
    pub fn from_index(index: u32) -> Option<Self> {
        if index >= 100_000_000 {
            return None;
        }
        let mut params = [0u8; 8];
        let mut rest = index;
        for slot in params.iter_mut().rev() {
            *slot = (rest % 10) as u8;
            rest /= 10;
        }
        Some(FdcaRule { params })
    }

    pub fn index(&self) -> u32 {
        self.params.iter().fold(0u32, |acc, &c| acc * 10 + c as u32)
    }

    pub const fn params(&self) -> [u8; 8] {
        self.params
    }

    pub const fn param(&self, i: usize) -> u8 {
        self.params[i]
    }

    /// `c0 = c1 = c2 = c3 = 0`: the global map is affine over `Z_10^n`.
    pub fn is_affine(&self) -> bool {
        self.params[..4].iter().all(|&c| c == 0)
    }

    /// Next state for the neighbourhood `(x, y, z)`; digits are assumed valid.
    #[inline]
    pub fn apply(&self, x: u8, y: u8, z: u8) -> u8 {
        let [c0, c1, c2, c3, c4, c5, c6, c7] = self.params.map(u32::from);
        let (x, y, z) = (x as u32, y as u32, z as u32);
        ((c0 * x * y * z + c1 * x * y + c2 * x * z + c3 * y * z + c4 * x + c5 * y + c6 * z + c7) % 10) as u8
    }

    pub fn evaluate_rmt(&self, r: Rmt) -> u8 {
        self.apply(r.x(), r.y(), r.z())
    }

    /// Expands the rule into its 1000-entry next-state table.
    pub fn expand_table(&self) -> RuleTable {
        let mut next = [0u8; RMT_COUNT];
        for r in Rmt::all() {
            next[r.value() as usize] = self.evaluate_rmt(r);
        }
        RuleTable { next }
    }

    /// Within every equivalent set (fixed `y, z`, varying `x`) all ten next
    /// states are distinct.
    pub fn is_left_permutive(&self) -> bool {
        let table = self.expand_table();
        (0..100).all(|i| table.all_distinct(&equivalent_set_unchecked(i)))
    }

    /// Within every sibling set (fixed `x, y`, varying `z`) all ten next
    /// states are distinct.
    pub fn is_right_permutive(&self) -> bool {
        let table = self.expand_table();
        (0..100).all(|i| table.all_distinct(&sibling_set_unchecked(i)))
    }

    /// `R(x, y, z) = y`.
    pub fn is_self_replicating_rmt(&self, r: Rmt) -> bool {
        self.evaluate_rmt(r) == r.y()
    }

    /// Compact 8-digit form, e.g. `00001018`.
    pub fn compact(&self) -> String {
        self.params.iter().map(|&c| char::from(b'0' + c)).collect()
    }
}

impl fmt::Display for FdcaRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = &self.params;
        write!(
            f,
            "⟨{},{},{},{},{},{},{},{}⟩",
            p[0], p[1], p[2], p[3], p[4], p[5], p[6], p[7]
        )
    }
}

/// Accepts `⟨0,0,0,0,1,0,1,8⟩`, `<0, 0, 0, 0, 1, 0, 1, 8>`, `0,0,0,0,1,0,1,8`
/// and `00001018`.
impl FromStr for FdcaRule {
    type Err = RuleError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let fail = || RuleError::Parse(String::from(s));
        let trimmed = s.trim();
        let inner = trimmed
            .strip_prefix('⟨')
            .and_then(|t| t.strip_suffix('⟩'))
            .or_else(|| trimmed.strip_prefix('<').and_then(|t| t.strip_suffix('>')))
            .unwrap_or(trimmed);

        let digits: Vec<u8> = if inner.contains(',') {
            inner
                .split(',')
                .map(|part| match part.trim().as_bytes() {
                    [d @ b'0'..=b'9'] => Ok(d - b'0'),
                    _ => Err(fail()),
                })
                .collect::<Result<_, _>>()?
        } else {
            inner
                .bytes()
                .filter(|b| !b.is_ascii_whitespace())
                .map(|b| if b.is_ascii_digit() { Ok(b - b'0') } else { Err(fail()) })
                .collect::<Result<_, _>>()?
        };
        let params: [u8; 8] = digits.try_into().map_err(|_| fail())?;
        FdcaRule::new(params)
    }
}

#[cfg(feature = "serde")]
impl serde::Serialize for FdcaRule {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

#[cfg(feature = "serde")]
impl<'de> serde::Deserialize<'de> for FdcaRule {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = <alloc::borrow::Cow<'de, str>>::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Next state for every RMT, indexed by RMT value.
#[derive(Clone, PartialEq, Eq)]
pub struct RuleTable {
    next: [u8; RMT_COUNT],
}

impl RuleTable {
    #[inline]
    pub fn get(&self, r: Rmt) -> u8 {
        self.next[r.value() as usize]
    }

    /// Lookup by neighbourhood digits.
    #[inline]
    pub fn lookup(&self, x: u8, y: u8, z: u8) -> u8 {
        self.next[100 * x as usize + 10 * y as usize + z as usize]
    }

    pub fn as_slice(&self) -> &[u8; RMT_COUNT] {
        &self.next
    }

    /// Concatenated next states for RMT 999 down to 0.
    pub fn serialize(&self) -> String {
        self.next.iter().rev().map(|&d| char::from(b'0' + d)).collect()
    }

    fn all_distinct(&self, set: &[Rmt; 10]) -> bool {
        let mut seen = 0u16;
        for r in set {
            let bit = 1u16 << self.get(*r);
            if seen & bit != 0 {
                return false;
            }
            seen |= bit;
        }
        true
    }

    /// Ordered pairs of distinct members of `set` with different next states.
    pub(crate) fn disagreeing_pairs(&self, set: &[Rmt]) -> u32 {
        let mut histogram = [0u32; 10];
        for r in set {
            histogram[self.get(*r) as usize] += 1;
        }
        let n = set.len() as u32;
        n * n - histogram.iter().map(|h| h * h).sum::<u32>()
    }
}

impl fmt::Debug for RuleTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("RuleTable").field(&self.serialize()).finish()
    }
}

impl core::ops::Index<Rmt> for RuleTable {
    type Output = u8;

    fn index(&self, r: Rmt) -> &u8 {
        &self.next[r.value() as usize]
    }
}

fn check_set_index(i: u8) -> Result<u16, RuleError> {
    if i < 100 {
        Ok(i as u16)
    } else {
        Err(RuleError::SetIndexOutOfRange(i))
    }
}

pub(crate) fn sibling_set_unchecked(i: u16) -> [Rmt; 10] {
    core::array::from_fn(|k| Rmt(10 * i + k as u16))
}

pub(crate) fn equivalent_set_unchecked(i: u16) -> [Rmt; 10] {
    core::array::from_fn(|k| Rmt(100 * k as u16 + i))
}

/// `{10i + k : k = 0..9}`: RMTs sharing `x` and `y`.
pub fn sibling_set(i: u8) -> Result<[Rmt; 10], RuleError> {
    check_set_index(i).map(sibling_set_unchecked)
}

/// `{100k + i : k = 0..9}`: RMTs sharing `y` and `z`.
pub fn equivalent_set(i: u8) -> Result<[Rmt; 10], RuleError> {
    check_set_index(i).map(equivalent_set_unchecked)
}

/// `{100x + 10k + z : k = 0..9}`: RMTs differing only in the self cell.
pub fn self_set(x: u8, z: u8) -> Result<[Rmt; 10], RuleError> {
    let (x, z) = (check_digit(x)? as u16, check_digit(z)? as u16);
    Ok(core::array::from_fn(|k| Rmt(100 * x + 10 * k as u16 + z)))
}

/// Same left neighbour, both other digits changed (81 members).
pub fn l_set(r: Rmt) -> [Rmt; 81] {
    let (x, y, z) = (r.x() as u16, r.y() as u16, r.z() as u16);
    let mut out = [Rmt(0); 81];
    let mut pos = 0;
    for y2 in (0..10).filter(|&d| d != y) {
        for z2 in (0..10).filter(|&d| d != z) {
            out[pos] = Rmt(100 * x + 10 * y2 + z2);
            pos += 1;
        }
    }
    out
}

/// Same right neighbour, both other digits changed (81 members).
pub fn r_set(r: Rmt) -> [Rmt; 81] {
    let (x, y, z) = (r.x() as u16, r.y() as u16, r.z() as u16);
    let mut out = [Rmt(0); 81];
    let mut pos = 0;
    for x2 in (0..10).filter(|&d| d != x) {
        for y2 in (0..10).filter(|&d| d != y) {
            out[pos] = Rmt(100 * x2 + 10 * y2 + z);
            pos += 1;
        }
    }
    out
}
