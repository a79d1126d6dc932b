use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use num_bigint::BigUint;

use super::participation::{auxiliary_labels, participation_merge_with, reduce_by_participation};
use super::{
    encode_cluster_frame, merge_average, merge_silhouette, primary_cluster_splits, refine_when_fewer, reversible_at,
    ClusterError, Clustering, RuleDraw, SplitClusterings, SplitRule,
};
use crate::catalog::shipped_candidates;
use crate::cycles::{Budget, DEFAULT_ORBIT_CAP};
use crate::godel::{
    build_frame, encode_rows, preprocess_scale, NumericDataset, ScaleOptions, SplitFrame, DEFAULT_MAX_GODEL_DIGITS,
};
use crate::rule::FdcaRule;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum MergeMetric {
    Silhouette,
    Average,
    Participation,
}

impl MergeMetric {
    pub fn name(&self) -> &'static str {
        match self {
            MergeMetric::Silhouette => "silhouette",
            MergeMetric::Average => "average",
            MergeMetric::Participation => "participation",
        }
    }
}

impl core::str::FromStr for MergeMetric {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "silhouette" => Ok(MergeMetric::Silhouette),
            "average" | "avg" => Ok(MergeMetric::Average),
            "participation" => Ok(MergeMetric::Participation),
            other => Err(alloc::format!("unknown merge metric '{other}'")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuleChoice {
    /// Seeded draw from the candidate rules reversible at the split size.
    Random,
    Explicit(FdcaRule),
}

/// Row vectors the silhouette merge is scored on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FeatureSpace {
    /// Raw values.
    #[default]
    Original,
    /// Integer-scaled values fed to the Gödel encoding.
    Scaled,
    /// Split values of the Gödel frame.
    Godel,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub split_size: usize,
    pub rule: RuleChoice,
    pub aux_rule: RuleChoice,
    pub metric: MergeMetric,
    pub k: usize,
    pub seed: u64,
    pub scale: ScaleOptions,
    pub max_godel_digits: usize,
    pub silhouette_space: FeatureSpace,
    /// Pool for random draws; the shipped candidates by default.
    pub candidates: Vec<FdcaRule>,
    pub budget: Budget,
    pub orbit_cap: u64,
    /// Bound on cluster re-encoding rounds.
    pub max_rounds: usize,
}

impl PipelineConfig {
    pub fn new(metric: MergeMetric, k: usize, seed: u64) -> Self {
        PipelineConfig {
            split_size: 6,
            rule: RuleChoice::Random,
            aux_rule: RuleChoice::Random,
            metric,
            k,
            seed,
            scale: ScaleOptions::default(),
            max_godel_digits: DEFAULT_MAX_GODEL_DIGITS,
            silhouette_space: FeatureSpace::Original,
            candidates: shipped_candidates().rules().collect(),
            budget: Budget::default(),
            orbit_cap: DEFAULT_ORBIT_CAP,
            max_rounds: 64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StageRecord {
    pub stage: String,
    pub clusters: usize,
    /// Frame width in digits at this stage, 0 when not applicable.
    pub width: usize,
}

/// Called after each stage, for progress and timing.
pub trait StageObserver {
    fn stage_done(&mut self, record: &StageRecord);
}

impl StageObserver for () {
    fn stage_done(&mut self, _: &StageRecord) {}
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineOutput {
    pub clustering: Clustering,
    pub metric: MergeMetric,
    /// `(role, rule)` in order of use.
    pub rules_used: Vec<(String, FdcaRule)>,
    pub stage_trace: Vec<StageRecord>,
    pub godels: Vec<BigUint>,
}

struct Run<'a> {
    cfg: &'a PipelineConfig,
    draw: RuleDraw,
    rules_used: Vec<(String, FdcaRule)>,
    trace: Vec<StageRecord>,
    obs: &'a mut dyn StageObserver,
}

impl Run<'_> {
    fn record(&mut self, stage: &str, clusters: usize, width: usize) {
        let r = StageRecord {
            stage: stage.into(),
            clusters,
            width,
        };
        self.obs.stage_done(&r);
        self.trace.push(r);
    }

    fn split_rule(&self, rule: FdcaRule) -> SplitRule {
        SplitRule {
            rule,
            budget: self.cfg.budget,
            orbit_cap: self.cfg.orbit_cap,
        }
    }

    fn pick(&mut self, choice: RuleChoice, role: &str) -> Result<FdcaRule, ClusterError> {
        let n = self.cfg.split_size;
        let rule = match choice {
            RuleChoice::Explicit(r) => {
                if !reversible_at(&r, n, self.cfg.budget)? {
                    return Err(ClusterError::Irreversible { rule: r, n });
                }
                self.draw.exclude(&r);
                r
            }
            RuleChoice::Random => self.draw.next_rule().ok_or(ClusterError::EmptyPool(n))?,
        };
        self.rules_used.push((role.into(), rule));
        Ok(rule)
    }

    fn fresh_rule(&mut self, role: &str) -> Option<FdcaRule> {
        let r = self.draw.next_rule()?;
        self.rules_used.push((role.into(), r));
        Some(r)
    }
}

/// Runs the full pipeline with no observer.
pub fn cluster_dataset(raw: &NumericDataset, cfg: &PipelineConfig) -> Result<PipelineOutput, ClusterError> {
    cluster_dataset_observed(raw, cfg, &mut ())
}

/// Scales and Gödel-encodes the rows, clusters every split by cycle
/// membership, re-encodes until one split is left (or merges across splits
/// by participation), and finally merges or refines to `cfg.k` clusters.
pub fn cluster_dataset_observed(
    raw: &NumericDataset,
    cfg: &PipelineConfig,
    obs: &mut dyn StageObserver,
) -> Result<PipelineOutput, ClusterError> {
    let k = cfg.k;
    if k == 0 {
        return Err(ClusterError::ZeroK);
    }
    let scaled = preprocess_scale(raw, cfg.scale)?;
    let godels = encode_rows(&scaled.rows, cfg.max_godel_digits)?;
    let distinct = godels.iter().collect::<BTreeSet<_>>().len();
    if distinct < k {
        return Err(ClusterError::Indistinguishable { distinct, k });
    }
    let participation = cfg.metric == MergeMetric::Participation;
    let gf = build_frame(godels, cfg.split_size, participation)?;
    let mut run = Run {
        cfg,
        draw: RuleDraw::new(&cfg.candidates, cfg.split_size, cfg.budget, cfg.seed)?,
        rules_used: Vec::new(),
        trace: Vec::new(),
        obs,
    };
    let n = gf.numbers.len();
    run.record("encode", distinct, gf.frame.width());
    if k == 1 {
        let c = Clustering::single(n).with_provenance("single");
        run.record("final", 1, 0);
        return Ok(finish(run, c, gf.numbers));
    }

    let rule = run.pick(cfg.rule, "primary")?;
    let sr = run.split_rule(rule);
    let sc0 = primary_cluster_splits(&gf.frame, &sr)?;
    let tuples = sc0.tuple_partition();
    run.record("primary", tuples.k(), gf.frame.width());

    let mut aux_for_reduce: Option<Vec<Vec<u64>>> = None;
    let current = if participation && tuples.k() > k {
        let aux_rule = run.pick(cfg.aux_rule, "auxiliary")?;
        let aux = auxiliary_labels(&gf.frame, &run.split_rule(aux_rule))?;
        let frame = &gf.frame;
        let mut fresh = || match run.fresh_rule("auxiliary") {
            Some(r) => auxiliary_labels(frame, &run.split_rule(r)).map(Some),
            None => Ok(None),
        };
        let c = participation_merge_with(&sc0, &aux, k, &mut fresh)?;
        run.record("participation", c.k(), frame.width());
        c
    } else {
        let c = reencode_until_single(&mut run, &sr, &gf.frame, sc0)?;
        run.record("reencode", c.k(), 0);
        c
    };
    let current = current.with_provenance(alloc::format!("rule:{}", rule.compact()));

    let points = match cfg.metric {
        MergeMetric::Silhouette => Some(feature_rows(cfg.silhouette_space, raw, &scaled.rows, &gf.frame)),
        _ => None,
    };
    let numbers = gf.numbers.clone();
    let merge_down =
        |run: &mut Run, c: &Clustering, aux: &mut Option<Vec<Vec<u64>>>| -> Result<Clustering, ClusterError> {
            match cfg.metric {
                MergeMetric::Silhouette => merge_silhouette(c, points.as_deref().expect("built for silhouette"), k),
                MergeMetric::Average => merge_average(c, &numbers, k),
                MergeMetric::Participation => {
                    if aux.is_none() {
                        let r = run.pick(RuleChoice::Random, "auxiliary")?;
                        *aux = Some(auxiliary_labels(&gf.frame, &run.split_rule(r))?);
                    }
                    let frame = &gf.frame;
                    let mut fresh = || match run.fresh_rule("auxiliary") {
                        Some(r) => auxiliary_labels(frame, &run.split_rule(r)).map(Some),
                        None => Ok(None),
                    };
                    reduce_by_participation(c, aux.as_ref().expect("set above"), k, &mut fresh)
                }
            }
        };

    let out = if current.k() > k {
        let c = merge_down(&mut run, &current, &mut aux_for_reduce)?;
        run.record("merge", c.k(), 0);
        c
    } else if current.k() < k {
        let frame = gf.frame.clone();
        let cell = core::cell::RefCell::new(&mut run);
        let mut next_aux = || -> Result<Option<Clustering>, ClusterError> {
            let mut run = cell.borrow_mut();
            let Some(r) = run.fresh_rule("refine") else {
                return Ok(None);
            };
            let sc = primary_cluster_splits(&frame, &run.split_rule(r))?;
            Ok(Some(sc.tuple_partition()))
        };
        let mut merge = |c: &Clustering| {
            let mut run = cell.borrow_mut();
            merge_down(&mut run, c, &mut aux_for_reduce)
        };
        let c = refine_when_fewer(&current, k, &mut next_aux, &mut merge)?;
        run.record("refine", c.k(), 0);
        c
    } else {
        current
    };
    run.record("final", out.k(), 0);
    Ok(finish(run, out, gf.numbers))
}

/// Re-encodes split clusters and clusters the new frame until a single split
/// remains. Falls back to the tuple partition if the frame stops shrinking.
fn reencode_until_single(
    run: &mut Run,
    sr: &SplitRule,
    first: &SplitFrame,
    mut sc: SplitClusterings,
) -> Result<Clustering, ClusterError> {
    let mut width = first.width();
    let mut rounds = 0;
    while sc.n_splits() > 1 {
        let frame = encode_cluster_frame(&sc, run.cfg.split_size)?;
        if frame.width() >= width || rounds >= run.cfg.max_rounds {
            return Ok(sc.tuple_partition().with_provenance("stage2:tuple"));
        }
        width = frame.width();
        sc = primary_cluster_splits(&frame, sr)?;
        rounds += 1;
        run.record("stage2", sc.tuple_partition().k(), width);
    }
    Ok(sc.split(0).clone().with_provenance("stage2"))
}

fn feature_rows(space: FeatureSpace, raw: &NumericDataset, scaled: &[Vec<u64>], frame: &SplitFrame) -> Vec<Vec<f64>> {
    match space {
        FeatureSpace::Original => raw.to_f64_rows(),
        FeatureSpace::Scaled => scaled.iter().map(|r| r.iter().map(|&v| v as f64).collect()).collect(),
        FeatureSpace::Godel => {
            let cols: Vec<Vec<u64>> = (0..frame.n_splits()).map(|j| frame.split_column(j)).collect();
            (0..frame.n_rows())
                .map(|i| cols.iter().map(|c| c[i] as f64).collect())
                .collect()
        }
    }
}

fn finish(run: Run, clustering: Clustering, godels: Vec<BigUint>) -> PipelineOutput {
    let metric = run.cfg.metric;
    PipelineOutput {
        clustering: clustering.with_provenance(alloc::format!("metric:{}", metric.name())),
        metric,
        rules_used: run.rules_used,
        stage_trace: run.trace,
        godels,
    }
}
