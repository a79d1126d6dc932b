//! Cycle-space clustering of Gödel-framed rows.
//!
//! Rows are cut into fixed-width splits, each split is read as a
//! configuration, and rows whose split lies on the same cycle of a reversible
//! rule share a primary cluster. Split clusterings are re-encoded and
//! clustered again until one split remains, then merged or refined to the
//! requested number of clusters.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::cycles::{self, Budget, CycleError, CycleLookup};
use crate::engine::{space_size, Stepper};
use crate::godel::{GodelError, SplitFrame};
use crate::metrics::MetricError;
use crate::rule::FdcaRule;

mod merge;
mod participation;
mod pipeline;

pub use merge::{merge_average, merge_silhouette, refine_when_fewer};
pub use participation::{
    auxiliary_labels, merge_max_participation, participation_merge, participation_table, ParticipationTable,
};
pub use pipeline::{
    cluster_dataset, cluster_dataset_observed, FeatureSpace, MergeMetric, PipelineConfig, PipelineOutput, RuleChoice,
    StageObserver, StageRecord,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClusterError {
    #[error("rule {rule} is not reversible at n = {n}")]
    Irreversible { rule: FdcaRule, n: usize },
    #[error(transparent)]
    Cycle(#[from] CycleError),
    #[error(transparent)]
    Godel(#[from] GodelError),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error("target k must be at least 1")]
    ZeroK,
    #[error("only {distinct} distinct rows; cannot form {k} clusters")]
    Indistinguishable { distinct: usize, k: usize },
    #[error("splits differ in width (frame width {width}, split size {split_size})")]
    UnequalSplits { width: usize, split_size: usize },
    #[error("{rows} rows but {other} {what}")]
    LengthMismatch {
        rows: usize,
        other: usize,
        what: &'static str,
    },
    #[error("no candidate rule is reversible at n = {0}")]
    EmptyPool(usize),
    #[error("rule pool exhausted at {best} clusters, {k} requested")]
    RefineExhausted { best: usize, k: usize },
}

/// A partition of rows into clusters `0..k`, every id occupied.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Clustering {
    labels: Vec<usize>,
    k: usize,
    provenance: Vec<String>,
}

impl Clustering {
    /// Renumbers arbitrary labels by order of first appearance.
    pub fn from_labels<T: Ord + Clone>(labels: &[T]) -> Self {
        let mut ids = BTreeMap::new();
        let dense = labels
            .iter()
            .map(|l| {
                let next = ids.len();
                *ids.entry(l.clone()).or_insert(next)
            })
            .collect();
        Clustering {
            labels: dense,
            k: ids.len(),
            provenance: Vec::new(),
        }
    }

    /// Labels already in `0..k` with every id used.
    pub(crate) fn from_raw(labels: Vec<usize>, k: usize, provenance: Vec<String>) -> Self {
        let c = Clustering { labels, k, provenance };
        debug_assert!(c.is_partition());
        c
    }

    /// Member lists, each sorted ascending, in label order.
    pub fn from_members(n: usize, members: &[Vec<usize>]) -> Option<Self> {
        let mut labels = vec![usize::MAX; n];
        for (c, m) in members.iter().enumerate() {
            for &r in m {
                if r >= n || labels[r] != usize::MAX {
                    return None;
                }
                labels[r] = c;
            }
        }
        if labels.contains(&usize::MAX) || members.iter().any(Vec::is_empty) {
            return None;
        }
        Some(Clustering {
            labels,
            k: members.len(),
            provenance: Vec::new(),
        })
    }

    pub fn single(n: usize) -> Self {
        Clustering {
            labels: vec![0; n],
            k: usize::from(n > 0),
            provenance: Vec::new(),
        }
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn into_labels(self) -> Vec<usize> {
        self.labels
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn provenance(&self) -> &[String] {
        &self.provenance
    }

    pub fn with_provenance(mut self, step: impl Into<String>) -> Self {
        self.provenance.push(step.into());
        self
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut s = vec![0; self.k];
        for &l in &self.labels {
            s[l] += 1;
        }
        s
    }

    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut m = vec![Vec::new(); self.k];
        for (r, &l) in self.labels.iter().enumerate() {
            m[l].push(r);
        }
        m
    }

    pub fn is_partition(&self) -> bool {
        self.labels.iter().all(|&l| l < self.k) && self.sizes().iter().all(|&s| s > 0)
    }

    /// Rows sharing a cluster in both partitions, numbered by first appearance.
    pub fn intersect(&self, other: &Clustering) -> Clustering {
        assert_eq!(self.len(), other.len(), "partitions of different row sets");
        let pairs: Vec<(usize, usize)> = self.labels.iter().copied().zip(other.labels.iter().copied()).collect();
        let mut out = Clustering::from_labels(&pairs);
        out.provenance = self.provenance.clone();
        out
    }

    /// Same partition with ids renumbered by first appearance.
    pub fn canonical(&self) -> Clustering {
        let mut out = Clustering::from_labels(&self.labels);
        out.provenance = self.provenance.clone();
        out
    }
}

/// Primary clusters of every split over the same rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitClusterings {
    splits: Vec<Clustering>,
}

impl SplitClusterings {
    pub fn new(splits: Vec<Clustering>) -> Result<Self, ClusterError> {
        if let Some(first) = splits.first() {
            if let Some(bad) = splits.iter().find(|s| s.len() != first.len()) {
                return Err(ClusterError::LengthMismatch {
                    rows: first.len(),
                    other: bad.len(),
                    what: "labels in another split",
                });
            }
        }
        Ok(SplitClusterings { splits })
    }

    pub fn n_splits(&self) -> usize {
        self.splits.len()
    }

    pub fn n_rows(&self) -> usize {
        self.splits.first().map_or(0, Clustering::len)
    }

    pub fn split(&self, i: usize) -> &Clustering {
        &self.splits[i]
    }

    pub fn splits(&self) -> &[Clustering] {
        &self.splits
    }

    /// Cluster count `m_i` per split.
    pub fn cluster_counts(&self) -> Vec<usize> {
        self.splits.iter().map(Clustering::k).collect()
    }

    /// Rows grouped by their full tuple of split clusters.
    pub fn tuple_partition(&self) -> Clustering {
        let n = self.n_rows();
        let keys: Vec<Vec<usize>> = (0..n)
            .map(|r| self.splits.iter().map(|s| s.labels[r]).collect())
            .collect();
        Clustering::from_labels(&keys)
    }
}

/// Reversibility at one width: the determinant for affine rules, an
/// exhaustive injectivity check for others within `budget.max_states`.
/// Larger non-affine spaces are assumed reversible and left to the orbit cap.
pub fn reversible_at(rule: &FdcaRule, n: usize, budget: Budget) -> Result<bool, ClusterError> {
    if rule.is_affine() {
        return Ok(cycles::is_reversible_affine(rule, n)?);
    }
    if space_size(n) > budget.max_states {
        return Ok(true);
    }
    let s = Stepper::new(rule, n).map_err(CycleError::from)?;
    Ok(cycles::is_injective(&s))
}

/// Rule and limits used for per-split cycle clustering.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SplitRule {
    pub rule: FdcaRule,
    pub budget: Budget,
    pub orbit_cap: u64,
}

impl SplitRule {
    pub fn new(rule: FdcaRule) -> Self {
        SplitRule {
            rule,
            budget: Budget::default(),
            orbit_cap: cycles::DEFAULT_ORBIT_CAP,
        }
    }
}

/// Cycle id of every split of every row, `ids[split][row]`. A short last
/// split is read as the same number left-padded to the split size.
pub fn split_cycle_ids(frame: &SplitFrame, r: &SplitRule) -> Result<Vec<Vec<u64>>, ClusterError> {
    let n = frame.split_size();
    if !reversible_at(&r.rule, n, r.budget)? {
        return Err(ClusterError::Irreversible { rule: r.rule, n });
    }
    let stepper = Stepper::new(&r.rule, n).map_err(CycleError::from)?;
    let mut lookup = CycleLookup::new(&stepper, r.budget, r.orbit_cap)?;
    (0..frame.n_splits())
        .map(|j| Ok(lookup.ids(&frame.split_column(j))?))
        .collect()
}

/// Groups the rows of each split by the cycle through their sub-configuration.
pub fn primary_cluster_splits(frame: &SplitFrame, r: &SplitRule) -> Result<SplitClusterings, ClusterError> {
    let ids = split_cycle_ids(frame, r)?;
    Ok(SplitClusterings {
        splits: ids.iter().map(|col| Clustering::from_labels(col)).collect(),
    })
}

/// Decimal digits needed for ids `0..m`.
pub fn code_width(m: usize) -> usize {
    let mut w = 1;
    let mut top = m.saturating_sub(1) / 10;
    while top > 0 {
        w += 1;
        top /= 10;
    }
    w
}

/// Writes each row's split cluster ids as fixed-width codes, concatenated
/// left to right, and splits the result again.
pub fn encode_cluster_frame(sc: &SplitClusterings, split_size: usize) -> Result<SplitFrame, ClusterError> {
    let widths: Vec<usize> = sc.splits.iter().map(|s| code_width(s.k)).collect();
    let total: usize = widths.iter().sum();
    let rows = (0..sc.n_rows())
        .map(|r| {
            let mut row = String::with_capacity(total);
            for (s, &w) in sc.splits.iter().zip(&widths) {
                push_padded(&mut row, s.labels[r], w);
            }
            row
        })
        .collect();
    Ok(SplitFrame::from_digit_rows(rows, split_size, false)?)
}

fn push_padded(out: &mut String, v: usize, width: usize) {
    let mut digits = [0u8; 20];
    let mut len = 0;
    let mut x = v;
    loop {
        digits[len] = b'0' + (x % 10) as u8;
        len += 1;
        x /= 10;
        if x == 0 {
            break;
        }
    }
    for _ in len..width {
        out.push('0');
    }
    for d in digits[..len].iter().rev() {
        out.push(*d as char);
    }
}

/// Seeded draws without replacement from the rules reversible at one width.
#[derive(Debug, Clone)]
pub struct RuleDraw {
    pool: Vec<FdcaRule>,
    n: usize,
}

impl RuleDraw {
    pub fn new(candidates: &[FdcaRule], n: usize, budget: Budget, seed: u64) -> Result<Self, ClusterError> {
        let mut pool = Vec::new();
        for r in candidates {
            if !pool.contains(r) && reversible_at(r, n, budget)? {
                pool.push(*r);
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        pool.shuffle(&mut rng);
        // drawn from the back
        pool.reverse();
        Ok(RuleDraw { pool, n })
    }

    pub fn width(&self) -> usize {
        self.n
    }

    pub fn remaining(&self) -> usize {
        self.pool.len()
    }

    pub fn next_rule(&mut self) -> Option<FdcaRule> {
        self.pool.pop()
    }

    /// Removes `rule` from the pool if present.
    pub fn exclude(&mut self, rule: &FdcaRule) {
        self.pool.retain(|r| r != rule);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    fn frame(rows: &[&str], split: usize) -> SplitFrame {
        SplitFrame::from_digit_rows(rows.iter().map(|s| s.to_string()).collect(), split, false).unwrap()
    }

    #[test]
    fn clustering_basics() {
        let c = Clustering::from_labels(&[7, 7, 3, 9, 3]);
        assert_eq!(c.labels(), [0, 0, 1, 2, 1]);
        assert_eq!(c.k(), 3);
        assert_eq!(c.sizes(), [2, 2, 1]);
        assert_eq!(c.members(), [vec![0, 1], vec![2, 4], vec![3]]);
        assert_eq!(c.intersect(&c), c);
        let d = Clustering::from_labels(&[0, 1, 0, 0, 0]);
        assert_eq!(c.intersect(&d).labels(), [0, 1, 2, 3, 2]);
        assert_eq!(
            Clustering::from_members(3, &[vec![2], vec![0, 1]]).unwrap().labels(),
            [1, 1, 0]
        );
        assert!(Clustering::from_members(3, &[vec![2], vec![0]]).is_none());
    }

    #[test]
    fn code_widths() {
        assert_eq!(code_width(1), 1);
        assert_eq!(code_width(10), 1);
        assert_eq!(code_width(11), 2);
        assert_eq!(code_width(72), 2);
        assert_eq!(code_width(100), 2);
        assert_eq!(code_width(101), 3);
    }

    #[test]
    fn identity_clusters_by_equal_substrings() {
        let f = frame(&["123456654321", "123456000000", "999999654321"], 6);
        let sc = primary_cluster_splits(&f, &SplitRule::new(FdcaRule::IDENTITY)).unwrap();
        assert_eq!(sc.split(0).labels(), [0, 0, 1]);
        assert_eq!(sc.split(1).labels(), [0, 1, 0]);
        assert_eq!(sc.tuple_partition().k(), 3);
    }

    #[test]
    fn same_orbit_shares_primary_cluster() {
        let r: FdcaRule = "00001018".parse().unwrap();
        let f = frame(&["0000", "8888", "6446", "1234"], 4);
        let mut sr = SplitRule::new(r);
        sr.budget = Budget::default();
        let sc = primary_cluster_splits(&f, &sr).unwrap();
        assert_eq!(sc.split(0).labels()[..3], [0, 0, 0]);
        let odd = frame(&["000", "888"], 3);
        assert_eq!(
            primary_cluster_splits(&odd, &sr),
            Err(ClusterError::Irreversible { rule: r, n: 3 })
        );
    }

    #[test]
    fn reencoding_is_label_functional() {
        let labels = [vec![0, 1, 0, 2], vec![3, 3, 3, 1]];
        let sc = SplitClusterings::new(labels.iter().map(|l| Clustering::from_labels(l)).collect()).unwrap();
        let f = encode_cluster_frame(&sc, 6).unwrap();
        assert_eq!(f.rows(), ["00", "10", "00", "21"]);
        let wide: Vec<usize> = (0..72).collect();
        let sc = SplitClusterings::new(vec![Clustering::from_labels(&wide)]).unwrap();
        let f = encode_cluster_frame(&sc, 6).unwrap();
        assert_eq!(f.row(0), "00");
        assert_eq!(f.row(71), "71");
    }

    #[test]
    fn rule_draw_is_seeded() {
        let cands: Vec<FdcaRule> = ["00001781", "00001018", "00000151", "00005101"]
            .iter()
            .map(|s| s.parse().unwrap())
            .collect();
        let mut a = RuleDraw::new(&cands, 7, Budget::default(), 3).unwrap();
        let mut b = RuleDraw::new(&cands, 7, Budget::default(), 3).unwrap();
        // 00001018 is singular at odd widths
        assert_eq!(a.remaining(), 3);
        for _ in 0..3 {
            assert_eq!(a.next_rule(), b.next_rule());
        }
        assert_eq!(a.next_rule(), None);
    }
}
