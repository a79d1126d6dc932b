//! JSON run reports shared by `cluster`, `baseline` and `evaluate`.

use std::collections::BTreeMap;

use fdca_core::cluster::StageRecord;
use fdca_core::metrics::{score_all, MetricError};
use serde::{Deserialize, Serialize};

/// `x` rounded to `decimals` places, for display fields.
pub fn round_to(x: f64, decimals: i32) -> f64 {
    if !x.is_finite() {
        return x;
    }
    let text = format!("{:.*}", decimals as usize, x);
    text.parse().unwrap_or(x)
}

/// Index values at full precision, their 4-decimal rendering, and the reason
/// for each index that could not be computed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct ScoreReport {
    pub values: BTreeMap<String, f64>,
    pub display: BTreeMap<String, String>,
    pub errors: BTreeMap<String, String>,
}

impl ScoreReport {
    pub fn compute(points: &[Vec<f64>], labels: &[usize]) -> Self {
        let s = score_all(points, labels);
        let mut out = ScoreReport::default();
        let all: [(&str, Result<f64, MetricError>); 4] = [
            ("silhouette", s.silhouette),
            ("davies_bouldin", s.davies_bouldin),
            ("calinski_harabasz", s.calinski_harabasz),
            ("dunn", s.dunn),
        ];
        for (name, r) in all {
            match r {
                Ok(v) if v.is_finite() => {
                    out.values.insert(name.into(), v);
                    out.display.insert(name.into(), format!("{v:.4}"));
                }
                Ok(v) => {
                    out.errors.insert(name.into(), format!("non-finite value {v}"));
                }
                Err(e) => {
                    out.errors.insert(name.into(), e.to_string());
                }
            }
        }
        out
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.values.get(name).copied()
    }

    /// One line per index for terminal output.
    pub fn table(&self) -> String {
        let mut s = String::new();
        for name in ["silhouette", "davies_bouldin", "calinski_harabasz", "dunn"] {
            let cell = match (self.display.get(name), self.errors.get(name)) {
                (Some(v), _) => v.clone(),
                (None, Some(e)) => format!("n/a ({e})"),
                _ => String::from("n/a"),
            };
            s.push_str(&format!("{name:<18} {cell}\n"));
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuleUse {
    pub role: String,
    pub rule: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct Timing {
    /// `(stage, milliseconds)` in completion order.
    pub stages: Vec<(String, f64)>,
    pub total_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    pub method: String,
    pub config: serde_json::Value,
    pub rows: usize,
    pub k: usize,
    #[serde(default)]
    pub rules_used: Vec<RuleUse>,
    #[serde(default)]
    pub stage_trace: Vec<StageRecord>,
    pub labels: Vec<usize>,
    pub cluster_sizes: Vec<usize>,
    pub scores: ScoreReport,
    /// Wall-clock data; the only part of a report that varies between runs
    /// with equal inputs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing: Option<Timing>,
}

impl RunReport {
    pub fn new(
        command: &str,
        method: &str,
        config: serde_json::Value,
        labels: Vec<usize>,
        points: &[Vec<f64>],
    ) -> Self {
        let k = labels.iter().max().map_or(0, |m| m + 1);
        let mut cluster_sizes = vec![0; k];
        for &l in &labels {
            cluster_sizes[l] += 1;
        }
        RunReport {
            command: command.into(),
            method: method.into(),
            config,
            rows: labels.len(),
            k,
            rules_used: Vec::new(),
            stage_trace: Vec::new(),
            scores: ScoreReport::compute(points, &labels),
            labels,
            cluster_sizes,
            timing: None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    /// The report without timing, for comparing runs.
    pub fn without_timing(&self) -> RunReport {
        RunReport {
            timing: None,
            ..self.clone()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scores_and_errors() {
        let pts: Vec<Vec<f64>> = [0.0, 1.0, 10.0, 11.0].iter().map(|&x| vec![x]).collect();
        let r = ScoreReport::compute(&pts, &[0, 0, 1, 1]);
        assert_eq!(r.display["dunn"], "9.0000");
        assert_eq!(r.display["davies_bouldin"], "0.1000");
        assert!(r.errors.is_empty());
        let single = ScoreReport::compute(&pts, &[0, 0, 0, 0]);
        assert_eq!(single.errors.len(), 4);
        assert!(single.table().contains("n/a"));
    }

    #[test]
    fn rounding() {
        assert_eq!(round_to(0.987804878, 8), 0.98780488);
        assert_eq!(round_to(5.0 / 9.0, 4), 0.5556);
    }
}
