use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_bigint::{BigInt, BigUint};

use super::{ClusterError, Clustering};
use crate::metrics::{distance_matrix, Euclidean};

/// Smallest cluster, lowest id among equals.
fn smallest(sizes: &[usize]) -> usize {
    let mut best = 0;
    for (c, &s) in sizes.iter().enumerate() {
        if s < sizes[best] {
            best = c;
        }
    }
    best
}

/// Moves every member of `from` into `to` and closes the gap in the ids.
fn fold_into(labels: &mut [usize], from: usize, to: usize) {
    for l in labels.iter_mut() {
        if *l == from {
            *l = to;
        }
        if *l > from {
            *l -= 1;
        }
    }
}

/// Repeatedly merges the smallest cluster into whichever other cluster gives
/// the highest mean silhouette over `points`, until `k` clusters remain.
///
/// The silhouette needs two clusters, so targets below 2 stop at 2.
pub fn merge_silhouette(current: &Clustering, points: &[Vec<f64>], k: usize) -> Result<Clustering, ClusterError> {
    let n = current.len();
    if points.len() != n {
        return Err(ClusterError::LengthMismatch {
            rows: n,
            other: points.len(),
            what: "feature rows",
        });
    }
    let target = k.max(2);
    let mut labels = current.labels().to_vec();
    let mut m = current.k();
    if m <= target {
        return Ok(current.clone());
    }
    let dist = distance_matrix(points, &Euclidean);
    while m > target {
        let mut sizes = vec![0usize; m];
        for &l in &labels {
            sizes[l] += 1;
        }
        // sums[i * m + c] = total distance from row i to cluster c
        let mut sums = vec![0.0f64; n * m];
        for i in 0..n {
            let row = &dist[i * n..(i + 1) * n];
            let acc = &mut sums[i * m..(i + 1) * m];
            for (j, d) in row.iter().enumerate() {
                acc[labels[j]] += d;
            }
        }
        // four nearest clusters by mean distance per row: enough to skip the
        // row's own cluster and both merge partners
        let nearest: Vec<[(f64, usize); 4]> = (0..n)
            .map(|i| {
                let mut best = [(f64::INFINITY, usize::MAX); 4];
                for c in 0..m {
                    let mean = sums[i * m + c] / sizes[c] as f64;
                    if mean < best[3].0 {
                        best[3] = (mean, c);
                        let mut p = 3;
                        while p > 0 && best[p].0 < best[p - 1].0 {
                            best.swap(p, p - 1);
                            p -= 1;
                        }
                    }
                }
                best
            })
            .collect();
        let src = smallest(&sizes);
        let mut choice: Option<(f64, usize)> = None;
        for dst in (0..m).filter(|&c| c != src) {
            let merged = sizes[src] + sizes[dst];
            let mut total = 0.0;
            for i in 0..n {
                let sm = sums[i * m + src] + sums[i * m + dst];
                let own = if labels[i] == src { dst } else { labels[i] };
                let (own_sum, own_size) = if own == dst {
                    (sm, merged)
                } else {
                    (sums[i * m + own], sizes[own])
                };
                if own_size <= 1 {
                    continue;
                }
                let a = own_sum / (own_size - 1) as f64;
                let mut b = nearest[i]
                    .iter()
                    .find(|(_, c)| *c != usize::MAX && *c != own && *c != src && *c != dst)
                    .map_or(f64::INFINITY, |x| x.0);
                if own != dst {
                    b = b.min(sm / merged as f64);
                }
                let hi = a.max(b);
                if hi > 0.0 && hi.is_finite() {
                    total += (b - a) / hi;
                }
            }
            let score = total / n as f64;
            if choice.map_or(true, |(s, _)| score > s) {
                choice = Some((score, dst));
            }
        }
        let (_, dst) = choice.expect("at least two clusters");
        fold_into(&mut labels, src, dst);
        m -= 1;
    }
    let mut out = Clustering::from_raw(labels, m, current.provenance().to_vec());
    out.provenance.push("merge:silhouette".into());
    Ok(out)
}

/// `|e·n − s|`, the distance from `e` to mean `s/n` scaled by `n`.
fn scaled_gap(e: &BigInt, n: usize, s: &BigInt) -> BigInt {
    let d = e * BigInt::from(n) - s;
    if d.sign() == num_bigint::Sign::Minus {
        -d
    } else {
        d
    }
}

/// Repeatedly dissolves the smallest cluster, sending each member to the
/// cluster whose mean Gödel number is nearest to it. Means are exact
/// rationals; equal distances go to the lowest id.
pub fn merge_average(current: &Clustering, godels: &[BigUint], k: usize) -> Result<Clustering, ClusterError> {
    let n = current.len();
    if godels.len() != n {
        return Err(ClusterError::LengthMismatch {
            rows: n,
            other: godels.len(),
            what: "Gödel numbers",
        });
    }
    if k == 0 {
        return Err(ClusterError::ZeroK);
    }
    let values: Vec<BigInt> = godels.iter().map(|g| BigInt::from(g.clone())).collect();
    let mut labels = current.labels().to_vec();
    let mut m = current.k();
    while m > k {
        let mut sizes = vec![0usize; m];
        let mut sums = vec![BigInt::from(0); m];
        for (r, &l) in labels.iter().enumerate() {
            sizes[l] += 1;
            sums[l] += &values[r];
        }
        let src = smallest(&sizes);
        let moves: Vec<(usize, usize)> = (0..n)
            .filter(|&r| labels[r] == src)
            .map(|r| {
                let e = &values[r];
                let mut best: Option<(usize, BigInt)> = None;
                for c in (0..m).filter(|&c| c != src) {
                    let gap = scaled_gap(e, sizes[c], &sums[c]);
                    let better = match &best {
                        None => true,
                        // gap_c / n_c < gap_b / n_b
                        Some((b, gb)) => {
                            (&gap * BigInt::from(sizes[*b])).cmp(&(gb * BigInt::from(sizes[c]))) == Ordering::Less
                        }
                    };
                    if better {
                        best = Some((c, gap));
                    }
                }
                (r, best.expect("another cluster exists").0)
            })
            .collect();
        for (r, c) in moves {
            labels[r] = c;
        }
        for l in labels.iter_mut() {
            if *l > src {
                *l -= 1;
            }
        }
        m -= 1;
    }
    let mut out = Clustering::from_raw(labels, m, current.provenance().to_vec());
    out.provenance.push("merge:average".into());
    Ok(out)
}

/// Splits `current` further with auxiliary clusterings until it has at least
/// `k` clusters.
///
/// `next_aux` yields the auxiliary clustering of the next drawn rule, or
/// `None` once the pool is exhausted. An auxiliary clustering with exactly
/// `k` clusters is returned as is; otherwise it is intersected with the
/// running result. Overshooting `k` hands the result to `merge`.
pub fn refine_when_fewer(
    current: &Clustering,
    k: usize,
    next_aux: &mut dyn FnMut() -> Result<Option<Clustering>, ClusterError>,
    merge: &mut dyn FnMut(&Clustering) -> Result<Clustering, ClusterError>,
) -> Result<Clustering, ClusterError> {
    let mut best = current.clone();
    while best.k() < k {
        let Some(aux) = next_aux()? else {
            return Err(ClusterError::RefineExhausted { best: best.k(), k });
        };
        if aux.len() != best.len() {
            return Err(ClusterError::LengthMismatch {
                rows: best.len(),
                other: aux.len(),
                what: "auxiliary labels",
            });
        }
        if aux.k() == k {
            return Ok(aux.with_provenance("refine:auxiliary"));
        }
        best = best.intersect(&aux).with_provenance("refine:intersect");
    }
    if best.k() > k {
        return merge(&best);
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::silhouette;
    use alloc::vec::Vec;

    fn line(xs: &[f64]) -> Vec<Vec<f64>> {
        xs.iter().map(|&x| vec![x]).collect()
    }

    /// Merge chosen by recomputing the full silhouette for every candidate.
    fn brute_silhouette_step(c: &Clustering, points: &[Vec<f64>]) -> Clustering {
        let sizes = c.sizes();
        let src = smallest(&sizes);
        let mut best: Option<(f64, Vec<usize>)> = None;
        for dst in (0..c.k()).filter(|&d| d != src) {
            let mut l = c.labels().to_vec();
            fold_into(&mut l, src, dst);
            let s = silhouette(points, &l).unwrap();
            if best.as_ref().map_or(true, |(b, _)| s > *b) {
                best = Some((s, l));
            }
        }
        let l = best.unwrap().1;
        let k = c.k() - 1;
        Clustering::from_raw(l, k, Vec::new())
    }

    #[test]
    fn silhouette_merge_matches_brute_force() {
        let pts = line(&[0.0, 0.5, 1.0, 5.0, 5.5, 9.0, 9.2, 9.4, 20.0, 21.0, 3.0, 14.0]);
        let start = Clustering::from_labels(&[0, 0, 1, 2, 2, 3, 3, 4, 5, 5, 6, 7]);
        let mut want = start.clone();
        for k in (2..start.k()).rev() {
            want = brute_silhouette_step(&want, &pts);
            let got = merge_silhouette(&start, &pts, k).unwrap();
            assert_eq!(got.labels(), want.labels(), "k = {k}");
            assert_eq!(got.k(), k);
        }
    }

    #[test]
    fn smallest_cluster_goes_first() {
        // A(5) B(7) C(4) D(6): C is dissolved, and with B nearest it forms BC(11)
        let mut xs = Vec::new();
        let mut ls = Vec::new();
        for (c, (centre, size)) in [(0.0, 5), (10.0, 7), (12.0, 4), (30.0, 6)].iter().enumerate() {
            for i in 0..*size {
                xs.push(centre + i as f64 * 0.1);
                ls.push(c);
            }
        }
        let c = Clustering::from_labels(&ls);
        assert_eq!(smallest(&c.sizes()), 2);
        let out = merge_silhouette(&c, &line(&xs), 3).unwrap();
        assert_eq!(out.sizes(), [5, 11, 6]);
        let out = merge_silhouette(&c, &line(&xs), 2).unwrap();
        assert_eq!(out.k(), 2);
        assert_eq!(merge_silhouette(&c, &line(&xs), 4).unwrap(), c);
    }

    fn big(xs: &[u64]) -> Vec<BigUint> {
        xs.iter().map(|&x| BigUint::from(x)).collect()
    }

    #[test]
    fn average_merge_sends_to_nearest_mean() {
        // cluster 3 = {17, 40}; means 15, 31, 51
        let g = big(&[10, 15, 20, 30, 31, 32, 50, 51, 52, 17, 40]);
        let c = Clustering::from_labels(&[0, 0, 0, 1, 1, 1, 2, 2, 2, 3, 3]);
        let out = merge_average(&c, &g, 3).unwrap();
        assert_eq!(out.labels(), [0, 0, 0, 1, 1, 1, 2, 2, 2, 0, 1]);
    }

    #[test]
    fn average_merge_ties_and_trivial_cases() {
        // 20 is 5 from both means 15 and 25
        let g = big(&[10, 20, 20, 30, 20]);
        let c = Clustering::from_labels(&[0, 0, 1, 1, 2]);
        let out = merge_average(&c, &g, 2).unwrap();
        assert_eq!(out.labels()[4], 0);
        let two = Clustering::from_labels(&[0, 0, 1]);
        assert_eq!(merge_average(&two, &big(&[1, 2, 3]), 1).unwrap().labels(), [0, 0, 0]);
        assert_eq!(merge_average(&two, &big(&[1, 2, 3]), 2).unwrap().labels(), two.labels());
    }

    #[test]
    fn average_merge_exact_beyond_f64() {
        let base = BigUint::from(10u8).pow(40);
        let g: Vec<BigUint> = [0u64, 2, 4, 6, 3].iter().map(|d| &base + BigUint::from(*d)).collect();
        // means base+1 and base+5, element base+3 ties; lowest id wins
        let c = Clustering::from_labels(&[0, 0, 1, 1, 2]);
        assert_eq!(merge_average(&c, &g, 2).unwrap().labels(), [0, 0, 1, 1, 0]);
    }

    #[test]
    fn refinement_by_intersection() {
        let current = Clustering::from_labels(&[0, 0, 0, 1, 1, 1]);
        let aux = Clustering::from_labels(&[0, 0, 1, 1, 1, 1]);
        let mut pool = vec![aux];
        let mut next = || Ok(pool.pop());
        let mut merge = |c: &Clustering| Ok(c.clone());
        let out = refine_when_fewer(&current, 3, &mut next, &mut merge).unwrap();
        assert_eq!(out.labels(), [0, 0, 1, 2, 2, 2]);

        let mut empty = || Ok(None);
        assert_eq!(
            refine_when_fewer(&current, 3, &mut empty, &mut merge),
            Err(ClusterError::RefineExhausted { best: 2, k: 3 })
        );
        assert_eq!(refine_when_fewer(&current, 2, &mut empty, &mut merge).unwrap(), current);
    }
}
