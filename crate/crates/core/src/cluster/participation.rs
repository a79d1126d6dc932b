//! Merging split clusterings by their degree of participation in the cycles
//! of an auxiliary rule.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use super::{split_cycle_ids, ClusterError, Clustering, SplitClusterings, SplitRule};
use crate::godel::SplitFrame;
use crate::rule::FdcaRule;

/// Occurrence counts of each primary cluster's members in each auxiliary
/// cluster.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParticipationTable {
    /// `sizes[split][cluster]`, the `v_j` of each primary cluster.
    sizes: Vec<Vec<usize>>,
    /// `cells[split][cluster]` maps an auxiliary cluster id to a count.
    cells: Vec<Vec<BTreeMap<u64, usize>>>,
}

impl ParticipationTable {
    pub fn n_splits(&self) -> usize {
        self.sizes.len()
    }

    pub fn primary_size(&self, split: usize, cluster: usize) -> usize {
        self.sizes[split][cluster]
    }

    /// `(members inside aux, members)` for primary cluster `cluster` of `split`.
    pub fn mu(&self, aux: u64, split: usize, cluster: usize) -> (usize, usize) {
        let count = self.cells[split][cluster].get(&aux).copied().unwrap_or(0);
        (count, self.sizes[split][cluster])
    }

    pub fn mu_f64(&self, aux: u64, split: usize, cluster: usize) -> f64 {
        let (a, b) = self.mu(aux, split, cluster);
        a as f64 / b as f64
    }

    /// Auxiliary clusters met by any primary cluster, ascending.
    pub fn aux_ids(&self) -> Vec<u64> {
        let mut ids: Vec<u64> = self.cells.iter().flatten().flat_map(|m| m.keys().copied()).collect();
        ids.sort_unstable();
        ids.dedup();
        ids
    }

    /// Nonzero `(aux, count)` pairs of one primary cluster.
    pub fn row(&self, split: usize, cluster: usize) -> impl Iterator<Item = (u64, usize)> + '_ {
        self.cells[split][cluster].iter().map(|(a, c)| (*a, *c))
    }
}

/// Builds the table from `aux[split][row]`, the auxiliary cluster of each
/// row's sub-configuration in each split.
pub fn participation_table(sc: &SplitClusterings, aux: &[Vec<u64>]) -> Result<ParticipationTable, ClusterError> {
    check_aux(sc, aux)?;
    let mut sizes = Vec::with_capacity(sc.n_splits());
    let mut cells = Vec::with_capacity(sc.n_splits());
    for (s, split) in sc.splits().iter().enumerate() {
        let mut cell = vec![BTreeMap::new(); split.k()];
        for (r, &c) in split.labels().iter().enumerate() {
            *cell[c].entry(aux[s][r]).or_insert(0) += 1;
        }
        sizes.push(split.sizes());
        cells.push(cell);
    }
    Ok(ParticipationTable { sizes, cells })
}

fn check_aux(sc: &SplitClusterings, aux: &[Vec<u64>]) -> Result<(), ClusterError> {
    if aux.len() != sc.n_splits() {
        return Err(ClusterError::LengthMismatch {
            rows: sc.n_splits(),
            other: aux.len(),
            what: "auxiliary splits",
        });
    }
    if let Some(bad) = aux.iter().find(|a| a.len() != sc.n_rows()) {
        return Err(ClusterError::LengthMismatch {
            rows: sc.n_rows(),
            other: bad.len(),
            what: "auxiliary labels",
        });
    }
    Ok(())
}

/// Auxiliary cluster of every split of every row. Needs equal-width splits.
pub fn auxiliary_labels(frame: &SplitFrame, aux_rule: &SplitRule) -> Result<Vec<Vec<u64>>, ClusterError> {
    if frame.width() % frame.split_size() != 0 {
        return Err(ClusterError::UnequalSplits {
            width: frame.width(),
            split_size: frame.split_size(),
        });
    }
    split_cycle_ids(frame, aux_rule)
}

/// Row set as a bit vector.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Rows(Vec<u64>);

impl Rows {
    fn new(n: usize) -> Self {
        Rows(vec![0; n.div_ceil(64)])
    }

    fn insert(&mut self, r: usize) {
        self.0[r / 64] |= 1 << (r % 64);
    }

    fn len(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn common(&self, other: &Rows) -> usize {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    fn union_with(&mut self, other: &Rows) {
        self.0.iter_mut().zip(&other.0).for_each(|(a, b)| *a |= b);
    }

    fn remove_all(&mut self, other: &Rows) {
        self.0.iter_mut().zip(&other.0).for_each(|(a, b)| *a &= !b);
    }

    fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0
            .iter()
            .enumerate()
            .flat_map(|(i, &w)| (0..64).filter(move |b| w >> b & 1 == 1).map(move |b| i * 64 + b))
    }
}

fn dedup(sets: &mut Vec<Rows>) {
    let mut out: Vec<Rows> = Vec::with_capacity(sets.len());
    for s in sets.drain(..) {
        if s.len() > 0 && !out.contains(&s) {
            out.push(s);
        }
    }
    *sets = out;
}

/// One temporary cluster per auxiliary cluster, from the primary clusters
/// holding more than half of their members inside it (the largest such
/// share per split), plus a singleton for every row left over.
fn temporary_clusters(sc: &SplitClusterings, table: &ParticipationTable) -> Vec<Rows> {
    let n = sc.n_rows();
    // (aux, split) -> (count, size, cluster) with the largest share
    let mut best: BTreeMap<(u64, usize), (usize, usize, usize)> = BTreeMap::new();
    for s in 0..sc.n_splits() {
        for j in 0..sc.split(s).k() {
            let size = table.primary_size(s, j);
            for (t, cnt) in table.row(s, j) {
                let e = best.entry((t, s)).or_insert((cnt, size, j));
                if cnt * e.1 > e.0 * size {
                    *e = (cnt, size, j);
                }
            }
        }
    }
    let members: Vec<Vec<Vec<usize>>> = sc.splits().iter().map(Clustering::members).collect();
    let mut temps: Vec<Rows> = Vec::new();
    let mut current: Option<(u64, Rows)> = None;
    for ((t, s), (cnt, size, j)) in best {
        if current.as_ref().map_or(true, |(ct, _)| *ct != t) {
            if let Some((_, rows)) = current.take() {
                temps.push(rows);
            }
            current = Some((t, Rows::new(n)));
        }
        if 2 * cnt > size {
            let rows = &mut current.as_mut().expect("set above").1;
            for &r in &members[s][j] {
                rows.insert(r);
            }
        }
    }
    if let Some((_, rows)) = current {
        temps.push(rows);
    }
    let mut covered = Rows::new(n);
    for t in &temps {
        covered.union_with(t);
    }
    for r in 0..n {
        if covered.common(&single(n, r)) == 0 {
            temps.push(single(n, r));
        }
    }
    dedup(&mut temps);
    temps
}

fn single(n: usize, r: usize) -> Rows {
    let mut s = Rows::new(n);
    s.insert(r);
    s
}

/// While above `k`, merges the pair where one cluster has at least half its
/// rows inside the other (largest share first). Then strips shared rows from
/// the larger of every overlapping pair.
fn settle_overlaps(temps: &mut Vec<Rows>, k: usize) {
    while temps.len() > k {
        let mut pick: Option<(usize, usize, usize, usize)> = None; // (a, b, common, |a|)
        for a in 0..temps.len() {
            let la = temps[a].len();
            for b in 0..temps.len() {
                if a == b {
                    continue;
                }
                let c = temps[a].common(&temps[b]);
                if c == 0 || 2 * c < la {
                    continue;
                }
                if pick.map_or(true, |(_, _, pc, pl)| c * pl > pc * la) {
                    pick = Some((a, b, c, la));
                }
            }
        }
        let Some((a, b, _, _)) = pick else { break };
        let (lo, hi) = (a.min(b), a.max(b));
        let other = temps.remove(hi);
        temps[lo].union_with(&other);
        dedup(temps);
    }
    for i in 0..temps.len() {
        for j in i + 1..temps.len() {
            if temps[i].common(&temps[j]) == 0 {
                continue;
            }
            let (big, small) = if temps[i].len() > temps[j].len() {
                (i, j)
            } else {
                (j, i)
            };
            let keep = temps[small].clone();
            temps[big].remove_all(&keep);
        }
    }
    dedup(temps);
}

/// Occurrences of each auxiliary cluster among a cluster's rows, all splits.
fn aux_profile(rows: &Rows, aux: &[Vec<u64>]) -> BTreeMap<u64, usize> {
    let mut p = BTreeMap::new();
    for r in rows.iter() {
        for split in aux {
            *p.entry(split[r]).or_insert(0) += 1;
        }
    }
    p
}

fn dominant(p: &BTreeMap<u64, usize>) -> Option<u64> {
    let mut best: Option<(u64, usize)> = None;
    for (&t, &c) in p {
        if best.map_or(true, |(_, bc)| c > bc) {
            best = Some((t, c));
        }
    }
    best.map(|b| b.0)
}

/// Brings disjoint clusters down to `k`: clusters whose rows fall mostly in
/// the same auxiliary cluster are merged, fresh auxiliary labellings are
/// tried when none share one, and as a last resort the smallest cluster
/// joins the one whose auxiliary profile overlaps it most.
fn reduce_disjoint(
    temps: &mut Vec<Rows>,
    k: usize,
    mut aux: Vec<Vec<u64>>,
    fresh: &mut dyn FnMut() -> Result<Option<Vec<Vec<u64>>>, ClusterError>,
) -> Result<(), ClusterError> {
    let mut pool_open = true;
    while temps.len() > k {
        let dom: Vec<Option<u64>> = temps.iter().map(|t| dominant(&aux_profile(t, &aux))).collect();
        let pair = (0..temps.len()).find_map(|i| {
            (i + 1..temps.len())
                .find(|&j| dom[i].is_some() && dom[i] == dom[j])
                .map(|j| (i, j))
        });
        if let Some((i, j)) = pair {
            let other = temps.remove(j);
            temps[i].union_with(&other);
            continue;
        }
        if pool_open {
            match fresh()? {
                Some(next) => {
                    aux = next;
                    continue;
                }
                None => pool_open = false,
            }
        }
        let src = (0..temps.len())
            .min_by_key(|&i| (temps[i].len(), i))
            .expect("more than k >= 1 clusters");
        let ps = aux_profile(&temps[src], &aux);
        let dst = (0..temps.len())
            .filter(|&i| i != src)
            .max_by(|&a, &b| {
                let shared = |i: usize| {
                    let pi = aux_profile(&temps[i], &aux);
                    ps.iter()
                        .map(|(t, c)| (*c).min(pi.get(t).copied().unwrap_or(0)))
                        .sum::<usize>()
                };
                // ties go to the lower index
                shared(a).cmp(&shared(b)).then(b.cmp(&a))
            })
            .expect("another cluster exists");
        let moved = temps.remove(src);
        let dst = if dst > src { dst - 1 } else { dst };
        temps[dst].union_with(&moved);
    }
    Ok(())
}

fn to_clustering(n: usize, temps: &[Rows], step: &str) -> Clustering {
    let members: Vec<Vec<usize>> = temps.iter().map(|t| t.iter().collect()).collect();
    Clustering::from_members(n, &members)
        .expect("temporary clusters cover every row once")
        .canonical()
        .with_provenance(step)
}

/// Merges across splits with fixed auxiliary labels `aux[split][row]`.
pub fn participation_merge(sc: &SplitClusterings, aux: &[Vec<u64>], k: usize) -> Result<Clustering, ClusterError> {
    participation_merge_with(sc, aux, k, &mut || Ok(None))
}

/// As [`participation_merge`], drawing further auxiliary labellings from
/// `fresh` when the clusters left above `k` share no auxiliary cluster.
pub fn participation_merge_with(
    sc: &SplitClusterings,
    aux: &[Vec<u64>],
    k: usize,
    fresh: &mut dyn FnMut() -> Result<Option<Vec<Vec<u64>>>, ClusterError>,
) -> Result<Clustering, ClusterError> {
    if k == 0 {
        return Err(ClusterError::ZeroK);
    }
    let table = participation_table(sc, aux)?;
    let mut temps = temporary_clusters(sc, &table);
    settle_overlaps(&mut temps, k);
    reduce_disjoint(&mut temps, k, aux.to_vec(), fresh)?;
    Ok(to_clustering(sc.n_rows(), &temps, "merge:participation"))
}

/// Reduces an existing partition to `k` clusters by auxiliary cluster
/// agreement alone.
pub fn reduce_by_participation(
    current: &Clustering,
    aux: &[Vec<u64>],
    k: usize,
    fresh: &mut dyn FnMut() -> Result<Option<Vec<Vec<u64>>>, ClusterError>,
) -> Result<Clustering, ClusterError> {
    if k == 0 {
        return Err(ClusterError::ZeroK);
    }
    let n = current.len();
    let mut temps: Vec<Rows> = current
        .members()
        .iter()
        .map(|m| {
            let mut r = Rows::new(n);
            m.iter().for_each(|&i| r.insert(i));
            r
        })
        .collect();
    reduce_disjoint(&mut temps, k, aux.to_vec(), fresh)?;
    let mut out = to_clustering(n, &temps, "merge:participation");
    let mut prov = current.provenance().to_vec();
    prov.append(&mut out.provenance);
    out.provenance = prov;
    Ok(out)
}

/// Participation merge over the splits of `frame`, with the auxiliary rule
/// applied to every sub-configuration. `fresh` supplies replacement rules.
pub fn merge_max_participation(
    sc: &SplitClusterings,
    frame: &SplitFrame,
    aux_rule: &SplitRule,
    k: usize,
    fresh: &mut dyn FnMut() -> Option<FdcaRule>,
) -> Result<Clustering, ClusterError> {
    let aux = auxiliary_labels(frame, aux_rule)?;
    let mut next = || match fresh() {
        Some(rule) => auxiliary_labels(frame, &SplitRule { rule, ..*aux_rule }).map(Some),
        None => Ok(None),
    };
    participation_merge_with(sc, &aux, k, &mut next)
}
