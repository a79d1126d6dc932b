//! Reference clusterings: Lloyd's K-Means with k-means++ seeding, and the
//! sorted Gödel-number cut from the core crate.

use fdca_core::metrics::squared_distance;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BaselineError {
    #[error("k = {k} is outside 1..={points}")]
    BadK { k: usize, points: usize },
    #[error("points have inconsistent dimensions")]
    Dimension,
    #[error("non-finite coordinate")]
    NonFinite,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KMeansConfig {
    pub k: usize,
    pub restarts: usize,
    pub max_iter: usize,
    /// Stop when no centroid moves farther than this.
    pub tol: f64,
    pub seed: u64,
}

impl KMeansConfig {
    pub fn new(k: usize, seed: u64) -> Self {
        KMeansConfig {
            k,
            restarts: 10,
            max_iter: 300,
            tol: 1e-10,
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansResult {
    pub labels: Vec<usize>,
    pub centroids: Vec<Vec<f64>>,
    /// Within-cluster sum of squared distances.
    pub inertia: f64,
    pub iterations: usize,
}

fn plus_plus(points: &[Vec<f64>], k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let mut centroids = vec![points[rng.gen_range(0..points.len())].clone()];
    let mut d2: Vec<f64> = points.iter().map(|p| squared_distance(p, &centroids[0])).collect();
    while centroids.len() < k {
        let total: f64 = d2.iter().sum();
        let pick = if total > 0.0 {
            let mut target = rng.gen::<f64>() * total;
            let mut chosen = d2.len() - 1;
            for (i, &w) in d2.iter().enumerate() {
                if target < w {
                    chosen = i;
                    break;
                }
                target -= w;
            }
            chosen
        } else {
            rng.gen_range(0..points.len())
        };
        centroids.push(points[pick].clone());
        for (d, p) in d2.iter_mut().zip(points) {
            *d = d.min(squared_distance(p, &points[pick]));
        }
    }
    centroids
}

fn nearest(p: &[f64], centroids: &[Vec<f64>]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (c, m) in centroids.iter().enumerate() {
        let d = squared_distance(p, m);
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

fn lloyd(points: &[Vec<f64>], cfg: &KMeansConfig, rng: &mut ChaCha8Rng) -> KMeansResult {
    let dim = points[0].len();
    let mut centroids = plus_plus(points, cfg.k, rng);
    let mut labels = vec![0; points.len()];
    let mut iterations = 0;
    for it in 1..=cfg.max_iter {
        iterations = it;
        for (l, p) in labels.iter_mut().zip(points) {
            *l = nearest(p, &centroids).0;
        }
        let mut sums = vec![vec![0.0; dim]; cfg.k];
        let mut counts = vec![0usize; cfg.k];
        for (&l, p) in labels.iter().zip(points) {
            counts[l] += 1;
            for (s, v) in sums[l].iter_mut().zip(p) {
                *s += v;
            }
        }
        for c in 0..cfg.k {
            if counts[c] == 0 {
                // reseed an empty cluster at the point worst served
                let far = (0..points.len())
                    .filter(|&a| counts[labels[a]] > 1)
                    .max_by(|&a, &b| {
                        squared_distance(&points[a], &centroids[labels[a]])
                            .total_cmp(&squared_distance(&points[b], &centroids[labels[b]]))
                    })
                    .unwrap_or(0);
                counts[labels[far]] -= 1;
                for (s, v) in sums[labels[far]].iter_mut().zip(&points[far]) {
                    *s -= v;
                }
                labels[far] = c;
                counts[c] = 1;
                sums[c] = points[far].clone();
            }
        }
        let mut shift: f64 = 0.0;
        for c in 0..cfg.k {
            let next: Vec<f64> = sums[c].iter().map(|s| s / counts[c] as f64).collect();
            shift = shift.max(squared_distance(&next, &centroids[c]));
            centroids[c] = next;
        }
        if shift <= cfg.tol * cfg.tol {
            break;
        }
    }
    for (l, p) in labels.iter_mut().zip(points) {
        *l = nearest(p, &centroids).0;
    }
    let inertia = labels
        .iter()
        .zip(points)
        .map(|(&l, p)| squared_distance(p, &centroids[l]))
        .sum();
    KMeansResult {
        labels,
        centroids,
        inertia,
        iterations,
    }
}

/// Best of `cfg.restarts` seeded runs by inertia. Labels are renumbered by
/// first appearance.
pub fn kmeans(points: &[Vec<f64>], cfg: &KMeansConfig) -> Result<KMeansResult, BaselineError> {
    if cfg.k == 0 || cfg.k > points.len() {
        return Err(BaselineError::BadK {
            k: cfg.k,
            points: points.len(),
        });
    }
    let dim = points[0].len();
    if points.iter().any(|p| p.len() != dim) {
        return Err(BaselineError::Dimension);
    }
    if points.iter().flatten().any(|v| !v.is_finite()) {
        return Err(BaselineError::NonFinite);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut best: Option<KMeansResult> = None;
    for _ in 0..cfg.restarts.max(1) {
        let run = lloyd(points, cfg, &mut rng);
        if best.as_ref().map_or(true, |b| run.inertia < b.inertia) {
            best = Some(run);
        }
    }
    let mut best = best.expect("at least one restart");
    let mut order = Vec::new();
    for &l in &best.labels {
        if !order.contains(&l) {
            order.push(l);
        }
    }
    let mut rename = vec![usize::MAX; cfg.k];
    for (new, &old) in order.iter().enumerate() {
        rename[old] = new;
    }
    best.labels.iter_mut().for_each(|l| *l = rename[*l]);
    let mut centroids = vec![Vec::new(); cfg.k];
    let mut spare = order.len();
    for (old, c) in best.centroids.into_iter().enumerate() {
        let slot = if rename[old] == usize::MAX {
            spare += 1;
            spare - 1
        } else {
            rename[old]
        };
        centroids[slot] = c;
    }
    best.centroids = centroids;
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn blobs() -> Vec<Vec<f64>> {
        let mut pts = Vec::new();
        for (cx, cy) in [(0.0, 0.0), (10.0, 0.0), (0.0, 10.0)] {
            for i in 0..5 {
                pts.push(vec![cx + 0.1 * i as f64, cy - 0.1 * i as f64]);
            }
        }
        pts
    }

    #[test]
    fn separates_blobs() {
        let r = kmeans(&blobs(), &KMeansConfig::new(3, 7)).unwrap();
        for b in 0..3 {
            let l = r.labels[5 * b];
            assert!(r.labels[5 * b..5 * b + 5].iter().all(|&x| x == l));
        }
        assert_eq!(r.labels[0], 0);
        assert!(r.inertia < 1.0);
    }

    #[test]
    fn deterministic_and_checked() {
        let a = kmeans(&blobs(), &KMeansConfig::new(2, 3)).unwrap();
        let b = kmeans(&blobs(), &KMeansConfig::new(2, 3)).unwrap();
        assert_eq!(a, b);
        assert!(kmeans(&blobs(), &KMeansConfig::new(16, 0)).is_err());
        assert!(kmeans(&blobs(), &KMeansConfig::new(0, 0)).is_err());
    }

    #[test]
    fn k_equals_points() {
        let pts = blobs();
        let r = kmeans(&pts, &KMeansConfig::new(pts.len(), 1)).unwrap();
        assert_eq!(r.inertia, 0.0);
        let mut seen = r.labels.clone();
        seen.sort_unstable();
        seen.dedup();
        assert_eq!(seen.len(), pts.len());
    }
}
