//! Internal clustering validity indices.
//!
//! Silhouette and Dunn accept any distance through [`Distance`]; Davies-Bouldin
//! and Calinski-Harabasz are centroid based and therefore Euclidean.

use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricError {
    #[error("{points} points but {labels} labels")]
    LengthMismatch { points: usize, labels: usize },
    #[error("point {0} has a different dimension than point 0")]
    Dimension(usize),
    #[error("need at least 2 clusters, found {0}")]
    TooFewClusters(usize),
    #[error("Calinski-Harabasz needs fewer clusters ({clusters}) than points ({points})")]
    TooManyClusters { clusters: usize, points: usize },
    #[error("clusters {0} and {1} have coincident centroids")]
    CoincidentCentroids(usize, usize),
    #[error("within-cluster dispersion is zero; the score is unbounded")]
    ZeroDispersion,
    #[error("every cluster has zero diameter")]
    ZeroDiameter,
    #[error("non-finite coordinate in point {0}")]
    NonFinite(usize),
}

pub trait Distance {
    fn distance(&self, a: &[f64], b: &[f64]) -> f64;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Euclidean;

impl Distance for Euclidean {
    #[inline]
    fn distance(&self, a: &[f64], b: &[f64]) -> f64 {
        libm::sqrt(squared_distance(a, b))
    }
}

impl<F: Fn(&[f64], &[f64]) -> f64> Distance for F {
    fn distance(&self, a: &[f64], b: &[f64]) -> f64 {
        self(a, b)
    }
}

#[inline]
pub fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Labels compacted to `0..k` by first appearance, with member lists.
struct Groups {
    dense: Vec<usize>,
    members: Vec<Vec<usize>>,
}

fn groups(points: &[Vec<f64>], labels: &[usize]) -> Result<Groups, MetricError> {
    if points.len() != labels.len() {
        return Err(MetricError::LengthMismatch {
            points: points.len(),
            labels: labels.len(),
        });
    }
    let dim = points.first().map_or(0, Vec::len);
    for (i, p) in points.iter().enumerate() {
        if p.len() != dim {
            return Err(MetricError::Dimension(i));
        }
        if p.iter().any(|v| !v.is_finite()) {
            return Err(MetricError::NonFinite(i));
        }
    }
    let mut ids = alloc::collections::BTreeMap::new();
    let mut members: Vec<Vec<usize>> = Vec::new();
    let mut dense = Vec::with_capacity(labels.len());
    for (i, l) in labels.iter().enumerate() {
        let next = ids.len();
        let id = *ids.entry(*l).or_insert(next);
        if id == members.len() {
            members.push(Vec::new());
        }
        members[id].push(i);
        dense.push(id);
    }
    if members.len() < 2 {
        return Err(MetricError::TooFewClusters(members.len()));
    }
    Ok(Groups { dense, members })
}

fn centroid(points: &[Vec<f64>], members: &[usize]) -> Vec<f64> {
    let mut c = vec![0.0; points[0].len()];
    for &i in members {
        for (acc, v) in c.iter_mut().zip(&points[i]) {
            *acc += v;
        }
    }
    let n = members.len() as f64;
    c.iter_mut().for_each(|v| *v /= n);
    c
}

/// Pairwise distances, row-major.
pub fn distance_matrix<D: Distance + ?Sized>(points: &[Vec<f64>], d: &D) -> Vec<f64> {
    let n = points.len();
    let mut m = vec![0.0; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let v = d.distance(&points[i], &points[j]);
            m[i * n + j] = v;
            m[j * n + i] = v;
        }
    }
    m
}

/// Per-point silhouette from a precomputed distance matrix. Points alone in
/// their cluster score 0.
pub fn silhouette_samples_from_matrix(n: usize, dist: &[f64], dense: &[usize], k: usize) -> Vec<f64> {
    let mut sizes = vec![0usize; k];
    for &c in dense {
        sizes[c] += 1;
    }
    let mut sums = vec![0.0; k];
    (0..n)
        .map(|i| {
            sums.iter_mut().for_each(|s| *s = 0.0);
            for j in 0..n {
                sums[dense[j]] += dist[i * n + j];
            }
            let own = dense[i];
            if sizes[own] <= 1 {
                return 0.0;
            }
            let a = sums[own] / (sizes[own] - 1) as f64;
            let b = (0..k)
                .filter(|&c| c != own && sizes[c] > 0)
                .map(|c| sums[c] / sizes[c] as f64)
                .fold(f64::INFINITY, f64::min);
            let m = a.max(b);
            if m == 0.0 {
                0.0
            } else {
                (b - a) / m
            }
        })
        .collect()
}

pub fn silhouette_samples_with<D: Distance + ?Sized>(
    points: &[Vec<f64>],
    labels: &[usize],
    d: &D,
) -> Result<Vec<f64>, MetricError> {
    let g = groups(points, labels)?;
    let dist = distance_matrix(points, d);
    Ok(silhouette_samples_from_matrix(
        points.len(),
        &dist,
        &g.dense,
        g.members.len(),
    ))
}

pub fn silhouette_with<D: Distance + ?Sized>(points: &[Vec<f64>], labels: &[usize], d: &D) -> Result<f64, MetricError> {
    let s = silhouette_samples_with(points, labels, d)?;
    Ok(s.iter().sum::<f64>() / s.len() as f64)
}

/// Mean silhouette coefficient, Euclidean.
pub fn silhouette(points: &[Vec<f64>], labels: &[usize]) -> Result<f64, MetricError> {
    silhouette_with(points, labels, &Euclidean)
}

/// Mean over clusters of the worst `(s_i + s_j) / d(c_i, c_j)`, where `s` is
/// the mean member distance to the centroid.
pub fn davies_bouldin(points: &[Vec<f64>], labels: &[usize]) -> Result<f64, MetricError> {
    let g = groups(points, labels)?;
    let cents: Vec<Vec<f64>> = g.members.iter().map(|m| centroid(points, m)).collect();
    let spread: Vec<f64> = g
        .members
        .iter()
        .zip(&cents)
        .map(|(m, c)| m.iter().map(|&i| Euclidean.distance(&points[i], c)).sum::<f64>() / m.len() as f64)
        .collect();
    let k = cents.len();
    let mut total = 0.0;
    for i in 0..k {
        let mut worst = 0.0f64;
        for j in 0..k {
            if i == j {
                continue;
            }
            let sep = Euclidean.distance(&cents[i], &cents[j]);
            if sep == 0.0 {
                return Err(MetricError::CoincidentCentroids(i.min(j), i.max(j)));
            }
            worst = worst.max((spread[i] + spread[j]) / sep);
        }
        total += worst;
    }
    Ok(total / k as f64)
}

/// Between-cluster over within-cluster dispersion, each divided by its
/// degrees of freedom.
pub fn calinski_harabasz(points: &[Vec<f64>], labels: &[usize]) -> Result<f64, MetricError> {
    let g = groups(points, labels)?;
    let (n, k) = (points.len(), g.members.len());
    if k >= n {
        return Err(MetricError::TooManyClusters { clusters: k, points: n });
    }
    let all: Vec<usize> = (0..n).collect();
    let overall = centroid(points, &all);
    let mut between = 0.0;
    let mut within = 0.0;
    for m in &g.members {
        let c = centroid(points, m);
        between += m.len() as f64 * squared_distance(&c, &overall);
        within += m.iter().map(|&i| squared_distance(&points[i], &c)).sum::<f64>();
    }
    if within == 0.0 {
        return Err(MetricError::ZeroDispersion);
    }
    Ok((between / (k - 1) as f64) / (within / (n - k) as f64))
}

pub fn dunn_with<D: Distance + ?Sized>(points: &[Vec<f64>], labels: &[usize], d: &D) -> Result<f64, MetricError> {
    let g = groups(points, labels)?;
    let n = points.len();
    let mut min_between = f64::INFINITY;
    let mut max_diameter = 0.0f64;
    for i in 0..n {
        for j in i + 1..n {
            let v = d.distance(&points[i], &points[j]);
            if g.dense[i] == g.dense[j] {
                max_diameter = max_diameter.max(v);
            } else {
                min_between = min_between.min(v);
            }
        }
    }
    if max_diameter == 0.0 {
        return Err(MetricError::ZeroDiameter);
    }
    Ok(min_between / max_diameter)
}

/// Smallest inter-cluster point distance over the largest cluster diameter.
pub fn dunn(points: &[Vec<f64>], labels: &[usize]) -> Result<f64, MetricError> {
    dunn_with(points, labels, &Euclidean)
}

/// All four indices, each with its own outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidityScores {
    pub silhouette: Result<f64, MetricError>,
    pub davies_bouldin: Result<f64, MetricError>,
    pub calinski_harabasz: Result<f64, MetricError>,
    pub dunn: Result<f64, MetricError>,
}

pub fn score_all(points: &[Vec<f64>], labels: &[usize]) -> ValidityScores {
    ValidityScores {
        silhouette: silhouette(points, labels),
        davies_bouldin: davies_bouldin(points, labels),
        calinski_harabasz: calinski_harabasz(points, labels),
        dunn: dunn(points, labels),
    }
}
