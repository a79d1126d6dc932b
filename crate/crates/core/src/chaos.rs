//! Information-flow parameters of a rule.
//!
//! Every rate is a count of disagreeing RMT pairs over a fixed denominator,
//! so [`ChaosCounts`] holds the exact integers and [`ChaosProfile`] the derived
//! fractions.
//!
//! | rate       | grouping                               | denominator  |
//! |------------|----------------------------------------|--------------|
//! | `lambda_p` | sibling sets, ordered pairs            | 100 · 90     |
//! | `eta_p`    | equivalent sets, ordered pairs         | 100 · 90     |
//! | `lambda_c` | each RMT against its R-set             | 1000 · 82    |
//! | `eta_c`    | each RMT against its L-set             | 1000 · 82    |
//! | `delta_p`  | self sets (fixed `x`, `z`), ordered pairs | 100 · 90  |

use core::cmp::Ordering;

use crate::rule::{equivalent_set_unchecked, l_set, r_set, self_set, sibling_set_unchecked, FdcaRule, Rmt, RuleTable};

/// Ordered pairs in a 10-member set.
pub const SET_PAIRS: u32 = 90;
/// `(10 - 1)^2 + 1`, the normalizer used for L-set and R-set rates.
pub const COOKING_NORM: u32 = 82;

pub const PROPAGATION_DENOM: u32 = 100 * SET_PAIRS;
pub const COOKING_DENOM: u32 = 1000 * COOKING_NORM;

/// Exact disagreement counts behind a [`ChaosProfile`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ChaosCounts {
    pub lambda_p: u32,
    pub eta_p: u32,
    pub lambda_c: u32,
    pub eta_c: u32,
    pub delta_p: u32,
}

fn sibling_counts(t: &RuleTable) -> [u32; 100] {
    core::array::from_fn(|i| t.disagreeing_pairs(&sibling_set_unchecked(i as u16)))
}

fn equivalent_counts(t: &RuleTable) -> [u32; 100] {
    core::array::from_fn(|i| t.disagreeing_pairs(&equivalent_set_unchecked(i as u16)))
}

fn self_counts(t: &RuleTable) -> [u32; 100] {
    core::array::from_fn(|i| {
        let set = self_set((i / 10) as u8, (i % 10) as u8).expect("digits in range");
        t.disagreeing_pairs(&set)
    })
}

fn r_set_counts(t: &RuleTable) -> impl Iterator<Item = u32> + '_ {
    Rmt::all().map(move |r| {
        let own = t.get(r);
        r_set(r).iter().filter(|s| t.get(**s) != own).count() as u32
    })
}

fn l_set_counts(t: &RuleTable) -> impl Iterator<Item = u32> + '_ {
    Rmt::all().map(move |r| {
        let own = t.get(r);
        l_set(r).iter().filter(|s| t.get(**s) != own).count() as u32
    })
}

impl ChaosCounts {
    pub fn of(rule: &FdcaRule) -> Self {
        Self::of_table(&rule.expand_table())
    }

    pub fn of_table(t: &RuleTable) -> Self {
        ChaosCounts {
            lambda_p: sibling_counts(t).iter().sum(),
            eta_p: equivalent_counts(t).iter().sum(),
            lambda_c: r_set_counts(t).sum(),
            eta_c: l_set_counts(t).sum(),
            delta_p: self_counts(t).iter().sum(),
        }
    }
}

/// Left or right component of the P parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PPair(pub f64, pub f64);

impl PPair {
    /// Lexicographic order, first component first.
    pub fn lex_cmp(&self, other: &PPair) -> Ordering {
        self.0.total_cmp(&other.0).then_with(|| self.1.total_cmp(&other.1))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ChaosProfile {
    pub lambda_p: f64,
    pub eta_p: f64,
    pub lambda_c: f64,
    pub eta_c: f64,
    pub p_left: PPair,
    pub p_right: PPair,
    pub p: PPair,
    pub delta_p: f64,
}

impl ChaosProfile {
    pub fn of(rule: &FdcaRule) -> Self {
        Self::from_counts(&ChaosCounts::of(rule))
    }

    pub fn from_counts(c: &ChaosCounts) -> Self {
        let prop = |v: u32| v as f64 / PROPAGATION_DENOM as f64;
        let cook = |v: u32| v as f64 / COOKING_DENOM as f64;
        let (lambda_p, eta_p) = (prop(c.lambda_p), prop(c.eta_p));
        let (lambda_c, eta_c) = (cook(c.lambda_c), cook(c.eta_c));
        let p_left = PPair(lambda_p, eta_p.max(eta_c));
        let p_right = PPair(eta_p, lambda_p.max(lambda_c));
        let p = if p_left.lex_cmp(&p_right) == Ordering::Less {
            p_right
        } else {
            p_left
        };
        ChaosProfile {
            lambda_p,
            eta_p,
            lambda_c,
            eta_c,
            p_left,
            p_right,
            p,
            delta_p: prop(c.delta_p),
        }
    }
}

/// `(lambda_p, eta_p)`.
pub fn info_propagation(rule: &FdcaRule) -> (f64, f64) {
    let p = ChaosProfile::of(rule);
    (p.lambda_p, p.eta_p)
}

/// `(lambda_c, eta_c)`.
pub fn info_cooking(rule: &FdcaRule) -> (f64, f64) {
    let p = ChaosProfile::of(rule);
    (p.lambda_c, p.eta_c)
}

pub fn p_parameter(rule: &FdcaRule) -> PPair {
    ChaosProfile::of(rule).p
}

pub fn self_info_propagation(rule: &FdcaRule) -> f64 {
    ChaosProfile::of(rule).delta_p
}

/// Rates accumulated in single precision, one term per set or RMT in
/// ascending order, then divided by the number of terms.
///
/// Published tables of these parameters carry the rounding of this
/// accumulation order (for example 81/82 prints as 0.98779666 rather than
/// 0.98780488), so this path exists to compare against such figures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinglePrecisionRates {
    pub lambda_p: f32,
    pub eta_p: f32,
    pub lambda_c: f32,
    pub eta_c: f32,
    pub delta_p: f32,
}

impl SinglePrecisionRates {
    pub fn of(rule: &FdcaRule) -> Self {
        let t = rule.expand_table();
        let mean = |terms: &mut dyn Iterator<Item = u32>, norm: f32, count: f32| {
            let mut acc = 0f32;
            for c in terms {
                acc += c as f32 / norm;
            }
            acc / count
        };
        let rates = SinglePrecisionRates {
            lambda_p: mean(&mut sibling_counts(&t).into_iter(), 90.0, 100.0),
            eta_p: mean(&mut equivalent_counts(&t).into_iter(), 90.0, 100.0),
            lambda_c: mean(&mut r_set_counts(&t), 82.0, 1000.0),
            eta_c: mean(&mut l_set_counts(&t), 82.0, 1000.0),
            delta_p: mean(&mut self_counts(&t).into_iter(), 90.0, 100.0),
        };
        rates
    }
}
