//! Reversibility tests and cycle decomposition of the configuration space.
//!
//! Cycles are identified by their smallest configuration index. Full
//! enumeration keeps one visited bit per configuration; point queries follow a
//! single orbit and need no global state.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use thiserror::Error;

use crate::bitset::BitSet;
use crate::engine::{check_cells, space_size, ConfigIndex, Configuration, EngineError, Stepper};
use crate::rule::FdcaRule;

/// Default orbit length after which a point query gives up.
pub const DEFAULT_ORBIT_CAP: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CycleError {
    #[error("10^{n} = {required} configurations exceed the enumeration budget of {limit}")]
    Budget { n: usize, required: u64, limit: u64 },
    #[error("rule {rule} is not reversible at n = {n}: {first} and {second} both map to {image}")]
    Irreversible {
        rule: FdcaRule,
        n: usize,
        first: u64,
        second: u64,
        image: u64,
    },
    #[error("orbit of {start} did not close within {cap} steps; the rule is probably not reversible at this width")]
    OrbitCap { start: u64, cap: u64 },
    #[error("rule {0} is not affine (c0..c3 must be 0)")]
    NotAffine(FdcaRule),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

/// Limits on exhaustive work over `10^n` configurations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    /// Largest space walked with a visited bitset.
    pub max_states: u64,
    /// Largest space for which a per-configuration id table is materialized.
    pub max_materialized: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_states: 100_000_000,
            max_materialized: 10_000_000,
        }
    }
}

impl Budget {
    pub fn unlimited() -> Self {
        Budget {
            max_states: u64::MAX,
            max_materialized: u64::MAX,
        }
    }

    fn check(&self, n: usize, limit: u64) -> Result<u64, CycleError> {
        check_cells(n)?;
        let required = space_size(n);
        if required > limit {
            Err(CycleError::Budget { n, required, limit })
        } else {
            Ok(required)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CycleStats {
    pub cycle_count: u64,
    pub max_cycle_length: u64,
    /// Sum of all cycle lengths, `10^n` for a full enumeration.
    pub total: u64,
}

impl CycleStats {
    pub fn mean_cycle_length(&self) -> f64 {
        if self.cycle_count == 0 {
            0.0
        } else {
            self.total as f64 / self.cycle_count as f64
        }
    }

    /// The mean as a reduced fraction `(numerator, denominator)`.
    pub fn mean_ratio(&self) -> (u64, u64) {
        let g = gcd(self.total, self.cycle_count).max(1);
        (self.total / g, self.cycle_count / g)
    }

    fn record(&mut self, len: u64) {
        self.cycle_count += 1;
        self.total += len;
        self.max_cycle_length = self.max_cycle_length.max(len);
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Cycle decomposition with a materialized id per configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CyclePartition {
    pub n: usize,
    pub rule: FdcaRule,
    pub stats: CycleStats,
    /// Minimum configuration index of the cycle through each configuration.
    pub assignment: Vec<u64>,
}

impl CyclePartition {
    pub fn cycle_id(&self, idx: ConfigIndex) -> u64 {
        self.assignment[idx.0 as usize]
    }

    /// Length of every cycle keyed by its id.
    pub fn cycle_lengths(&self) -> BTreeMap<u64, u64> {
        let mut out = BTreeMap::new();
        for &id in &self.assignment {
            *out.entry(id).or_insert(0) += 1;
        }
        out
    }
}

/// Finds a second preimage of `image` to report alongside `first`.
///
/// `image` lies either on an already closed cycle or on the path starting at
/// `origin`; in both cases a bounded walk reaches its other predecessor.
fn witness(s: &Stepper, rule: &FdcaRule, origin: u64, first: u64, image: u64) -> CycleError {
    let mut q = origin;
    let mut second = None;
    for _ in 0..s.space_size() {
        if s.next(q) == image && q != first {
            second = Some(q);
            break;
        }
        q = s.next(q);
        if q == origin {
            break;
        }
    }
    if second.is_none() {
        let mut q = image;
        for _ in 0..s.space_size() {
            if s.next(q) == image && q != first {
                second = Some(q);
                break;
            }
            q = s.next(q);
        }
    }
    CycleError::Irreversible {
        rule: *rule,
        n: s.cells(),
        first,
        second: second.unwrap_or(first),
        image,
    }
}

/// Walks every configuration once, calling `on_cycle(start, length)` for each
/// cycle in order of its smallest member.
fn walk_cycles(s: &Stepper, mut on_cycle: impl FnMut(&Stepper, u64, u64)) -> Result<(), CycleError> {
    let size = s.space_size();
    let mut visited = BitSet::new(size);
    for start in 0..size {
        if visited.contains(start) {
            continue;
        }
        visited.insert(start);
        let mut prev = start;
        let mut cur = s.next(start);
        let mut len = 1u64;
        while cur != start {
            if visited.insert(cur) {
                return Err(witness(s, s.rule(), start, prev, cur));
            }
            prev = cur;
            cur = s.next(cur);
            len += 1;
        }
        on_cycle(s, start, len);
    }
    Ok(())
}

/// Cycle count, longest cycle and total without materializing ids.
pub fn cycle_stats(rule: &FdcaRule, n: usize, budget: Budget) -> Result<CycleStats, CycleError> {
    budget.check(n, budget.max_states)?;
    let s = Stepper::new(rule, n)?;
    cycle_stats_with(&s)
}

pub fn cycle_stats_with(s: &Stepper) -> Result<CycleStats, CycleError> {
    let mut stats = CycleStats::default();
    walk_cycles(s, |_, _, len| stats.record(len))?;
    Ok(stats)
}

/// Full decomposition; fails on the first proof of non-injectivity.
pub fn enumerate_cycles(rule: &FdcaRule, n: usize, budget: Budget) -> Result<CyclePartition, CycleError> {
    let size = budget.check(n, budget.max_states.min(budget.max_materialized))?;
    let s = Stepper::new(rule, n)?;
    let mut assignment = vec![u64::MAX; size as usize];
    let mut stats = CycleStats::default();
    walk_cycles(&s, |s, start, len| {
        // cycles are discovered from their smallest member
        let mut cur = start;
        for _ in 0..len {
            assignment[cur as usize] = start;
            cur = s.next(cur);
        }
        stats.record(len);
    })?;
    Ok(CyclePartition {
        n,
        rule: *rule,
        stats,
        assignment,
    })
}

/// Injectivity of the global map, checked through an image bitset.
pub fn is_reversible_bruteforce(rule: &FdcaRule, n: usize, budget: Budget) -> Result<bool, CycleError> {
    budget.check(n, budget.max_states)?;
    let s = Stepper::new(rule, n)?;
    Ok(is_injective(&s))
}

pub fn is_injective(s: &Stepper) -> bool {
    let mut image = BitSet::new(s.space_size());
    (0..s.space_size()).all(|idx| !image.insert(s.next(idx)))
}

/// Determinant of the `n × n` tridiagonal matrix with sub-diagonal `c4`,
/// diagonal `c5` and super-diagonal `c6`, reduced mod 10.
pub fn affine_determinant(rule: &FdcaRule, n: usize) -> Result<u8, CycleError> {
    if !rule.is_affine() {
        return Err(CycleError::NotAffine(*rule));
    }
    check_cells(n)?;
    let (c4, c5, c6) = (rule.param(4) as i32, rule.param(5) as i32, rule.param(6) as i32);
    let (mut prev, mut cur) = (1i32, c5 % 10);
    for _ in 1..n {
        let next = (c5 * cur - c4 * c6 * prev).rem_euclid(10);
        (prev, cur) = (cur, next);
    }
    Ok(cur as u8)
}

/// Reversibility of an affine rule: the linear part must be invertible mod 10.
pub fn is_reversible_affine(rule: &FdcaRule, n: usize) -> Result<bool, CycleError> {
    let det = affine_determinant(rule, n)?;
    Ok(matches!(det, 1 | 3 | 7 | 9))
}

/// Minimum index on the orbit through `start`.
pub fn cycle_id_of_index(s: &Stepper, start: u64, cap: u64) -> Result<u64, CycleError> {
    let mut min = start;
    let mut cur = s.next(start);
    let mut steps = 1u64;
    while cur != start {
        if steps >= cap {
            return Err(CycleError::OrbitCap { start, cap });
        }
        min = min.min(cur);
        cur = s.next(cur);
        steps += 1;
    }
    Ok(min)
}

pub fn cycle_id_of(rule: &FdcaRule, c: &Configuration) -> Result<ConfigIndex, CycleError> {
    let s = Stepper::new(rule, c.len())?;
    cycle_id_of_index(&s, c.index().0, DEFAULT_ORBIT_CAP).map(ConfigIndex)
}

/// Length of the orbit through `start`.
pub fn orbit_length(s: &Stepper, start: u64, cap: u64) -> Result<u64, CycleError> {
    let mut cur = s.next(start);
    let mut steps = 1u64;
    while cur != start {
        if steps >= cap {
            return Err(CycleError::OrbitCap { start, cap });
        }
        cur = s.next(cur);
        steps += 1;
    }
    Ok(steps)
}

/// Cycle ids for a batch of configurations of one width.
///
/// Small spaces are enumerated once; larger ones walk each distinct orbit and
/// stop early when the walk meets a configuration that was already resolved.
pub fn cycle_ids(s: &Stepper, queries: &[u64], budget: Budget, cap: u64) -> Result<Vec<u64>, CycleError> {
    let size = s.space_size();
    // A full table pays off once the batch covers a sizeable share of the space.
    let dense = size <= budget.max_materialized.min(budget.max_states) && size <= u32::MAX as u64;
    if dense && (queries.len() as u64).saturating_mul(1000) >= size {
        let mut table = vec![0u32; size as usize];
        walk_cycles(s, |s, start, len| {
            let mut cur = start;
            for _ in 0..len {
                table[cur as usize] = start as u32;
                cur = s.next(cur);
            }
        })?;
        return Ok(queries.iter().map(|&q| table[q as usize] as u64).collect());
    }

    let mut resolved: Vec<(u64, u64)> = Vec::with_capacity(queries.len());
    let mut out = Vec::with_capacity(queries.len());
    for &q in queries {
        let hit = |x: u64, resolved: &Vec<(u64, u64)>| {
            resolved
                .binary_search_by_key(&x, |&(k, _)| k)
                .ok()
                .map(|i| resolved[i].1)
        };
        if let Some(id) = hit(q, &resolved) {
            out.push(id);
            continue;
        }
        let mut min = q;
        let mut cur = s.next(q);
        let mut steps = 1u64;
        let mut known = None;
        while cur != q {
            if let Some(id) = hit(cur, &resolved) {
                known = Some(id);
                break;
            }
            if steps >= cap {
                return Err(CycleError::OrbitCap { start: q, cap });
            }
            min = min.min(cur);
            cur = s.next(cur);
            steps += 1;
        }
        let id = known.unwrap_or(min);
        let pos = resolved.partition_point(|&(k, _)| k < q);
        resolved.insert(pos, (q, id));
        out.push(id);
    }
    Ok(out)
}

/// Cycle ids for many queries against one stepper, shared across batches.
///
/// Spaces within the materialization budget are enumerated once into a
/// table. Larger ones memoize every state on each walked orbit, up to
/// [`CycleLookup::MEMO_LIMIT`] entries.
#[derive(Clone)]
pub struct CycleLookup<'a> {
    s: &'a Stepper,
    cap: u64,
    dense: Option<Vec<u32>>,
    memo: BTreeMap<u64, u64>,
}

impl<'a> CycleLookup<'a> {
    pub const MEMO_LIMIT: usize = 1 << 24;

    pub fn new(s: &'a Stepper, budget: Budget, cap: u64) -> Result<Self, CycleError> {
        let size = s.space_size();
        let dense = if size <= budget.max_materialized.min(budget.max_states) && size <= u32::MAX as u64 {
            let mut table = vec![0u32; size as usize];
            walk_cycles(s, |s, start, len| {
                let mut cur = start;
                for _ in 0..len {
                    table[cur as usize] = start as u32;
                    cur = s.next(cur);
                }
            })?;
            Some(table)
        } else {
            None
        };
        Ok(CycleLookup {
            s,
            cap,
            dense,
            memo: BTreeMap::new(),
        })
    }

    pub fn stepper(&self) -> &Stepper {
        self.s
    }

    pub fn id(&mut self, q: u64) -> Result<u64, CycleError> {
        if let Some(t) = &self.dense {
            return Ok(t[q as usize] as u64);
        }
        if let Some(&id) = self.memo.get(&q) {
            return Ok(id);
        }
        let mut path = vec![q];
        let mut min = q;
        let mut cur = self.s.next(q);
        let mut known = None;
        while cur != q {
            if let Some(&id) = self.memo.get(&cur) {
                known = Some(id);
                break;
            }
            if path.len() as u64 >= self.cap {
                return Err(CycleError::OrbitCap {
                    start: q,
                    cap: self.cap,
                });
            }
            min = min.min(cur);
            path.push(cur);
            cur = self.s.next(cur);
        }
        let id = known.unwrap_or(min);
        for p in path {
            if self.memo.len() >= Self::MEMO_LIMIT {
                break;
            }
            self.memo.insert(p, id);
        }
        Ok(id)
    }

    pub fn ids(&mut self, queries: &[u64]) -> Result<Vec<u64>, CycleError> {
        queries.iter().map(|&q| self.id(q)).collect()
    }
}

/// Looks for two configurations with the same image among `samples` random
/// draws. A hit proves irreversibility; a miss proves nothing.
pub fn sampled_collision<R: Rng + ?Sized>(s: &Stepper, samples: usize, rng: &mut R) -> Option<(u64, u64, u64)> {
    let size = s.space_size();
    let mut pairs: Vec<(u64, u64)> = (0..samples)
        .map(|_| {
            let x = rng.gen_range(0..size);
            (s.next(x), x)
        })
        .collect();
    pairs.sort_unstable();
    pairs
        .windows(2)
        .find(|w| w[0].0 == w[1].0 && w[0].1 != w[1].1)
        .map(|w| (w[0].1, w[1].1, w[0].0))
}
