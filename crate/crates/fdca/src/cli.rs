//! The `fdca` command line.
//!
//! Every command writes its machine-readable result (a JSON report or a
//! JSONL catalog) to `--out` when given, and a short human summary to
//! stdout. Without `--out` the result goes to stdout and the summary to
//! stderr.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fdca_core::catalog::{
    filter_chaotic, filter_cycle_structure, shipped_candidates, ChaoticStage, CycleSelector, RuleFamily, ScanOptions,
};
use fdca_core::chaos::{ChaosCounts, ChaosProfile, SinglePrecisionRates};
use fdca_core::cluster::{
    cluster_dataset_observed, reversible_at, FeatureSpace, MergeMetric, PipelineConfig, RuleChoice, StageObserver,
    StageRecord,
};
use fdca_core::cycles::{self, Budget};
use fdca_core::godel::{
    build_frame, encode_rows, preprocess_scale, sort_godel_clusters, ScaleOptions, DEFAULT_MAX_GODEL_DIGITS,
};
use fdca_core::{FdcaRule, NumericDataset, RuleCatalog};
use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::baseline::{kmeans, KMeansConfig};
use crate::catalog_io::{load_catalog, write_catalog, ChaosRecord};
use crate::dataset::read_csv;
use crate::error::{AppError, ExitStatus};
use crate::report::{round_to, RuleUse, RunReport, Timing};
use crate::scan::{par_fill_chaos, par_fill_stats, par_scan_reversible};

#[derive(Debug, Parser)]
#[command(
    name = "fdca",
    version,
    about = "Decimal first-degree cellular automata: rule analysis, rule scans and cycle-space clustering"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Reversibility, cycle structure and chaos parameters of one rule.
    AnalyzeRule(AnalyzeArgs),
    /// Scan a rule family for rules reversible at every given width.
    Scan(ScanArgs),
    /// Apply one selection stage to a catalog.
    Filter(FilterArgs),
    /// Cluster a CSV dataset with the cycle-space pipeline.
    Cluster(ClusterArgs),
    /// Cluster a CSV dataset with K-Means or the sorted Gödel-number cut.
    Baseline(BaselineArgs),
    /// Score existing labels against a CSV dataset.
    Evaluate(EvaluateArgs),
}

/// Cell lengths: `4`, `6..10`, `6-10` or `3,5,7`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellRange(pub Vec<usize>);

impl FromStr for CellRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let bad = || format!("invalid cell range '{s}'");
        let mut out = Vec::new();
        for part in s.split(',') {
            let part = part.trim();
            let bounds = part
                .split_once("..=")
                .or_else(|| part.split_once(".."))
                .or_else(|| part.split_once('-'));
            match bounds {
                Some((a, b)) => {
                    let a: usize = a.trim().parse().map_err(|_| bad())?;
                    let b: usize = b.trim().parse().map_err(|_| bad())?;
                    if a > b {
                        return Err(bad());
                    }
                    out.extend(a..=b);
                }
                None => out.push(part.parse().map_err(|_| bad())?),
            }
        }
        out.sort_unstable();
        out.dedup();
        if out.is_empty() || out[0] == 0 {
            return Err(bad());
        }
        Ok(CellRange(out))
    }
}

fn parse_rule(s: &str) -> Result<FdcaRule, String> {
    s.parse().map_err(|e| format!("{e}"))
}

/// `random` or an explicit rule.
fn parse_choice(s: &str) -> Result<RuleChoice, String> {
    if s.eq_ignore_ascii_case("random") {
        Ok(RuleChoice::Random)
    } else {
        parse_rule(s).map(RuleChoice::Explicit)
    }
}

fn choice_text(c: RuleChoice) -> String {
    match c {
        RuleChoice::Random => "random".into(),
        RuleChoice::Explicit(r) => r.compact(),
    }
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[arg(long, value_parser = parse_rule)]
    pub rule: FdcaRule,
    #[arg(long, default_value = "4")]
    pub n: CellRange,
    /// Largest width for which cycles are enumerated.
    #[arg(long, default_value_t = 8)]
    pub stats_max_n: usize,
    /// Print the JSON report instead of the summary.
    #[arg(long)]
    pub json: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Affine,
    Full,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[arg(long)]
    pub n: CellRange,
    #[arg(long, value_enum, default_value = "affine")]
    pub family: Family,
    /// Scan the rules of this catalog instead of a family.
    #[arg(long)]
    pub catalog: Option<PathBuf>,
    /// Allow the 10^8-rule full family.
    #[arg(long)]
    pub allow_full: bool,
    /// Largest configuration space checked exhaustively.
    #[arg(long)]
    pub max_states: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Stage {
    /// Propagation at most 0.7 and self propagation at least 0.5.
    First,
    /// Drop (0,0), (0,1) and (1,0) propagation pairs.
    Second,
    /// 25000 cycles of length at most 40 at n = 6 (or --n/--cycles/--max-len).
    Third,
    /// Exact cycle count and longest cycle at --n.
    Exact,
    /// Cycle count at most --cycles at --n.
    MaxCycles,
    /// Cycle count in --cycles-list at --n.
    CyclesIn,
    /// Cycle count at most the --quantile of the catalog at --n.
    Quantile,
    /// Keep rules reversible at every --n.
    Reversible,
}

#[derive(Debug, Args)]
pub struct FilterArgs {
    #[arg(long)]
    pub catalog: Option<PathBuf>,
    /// Start from the shipped candidate rules instead of a catalog file.
    #[arg(long, conflicts_with = "catalog")]
    pub shipped: bool,
    #[arg(long, value_enum)]
    pub stage: Stage,
    #[arg(long)]
    pub n: Option<CellRange>,
    #[arg(long)]
    pub cycles: Option<u64>,
    #[arg(long)]
    pub max_len: Option<u64>,
    #[arg(long, value_delimiter = ',')]
    pub cycles_list: Vec<u64>,
    #[arg(long)]
    pub quantile: Option<f64>,
    #[arg(long)]
    pub max_propagation: Option<f64>,
    #[arg(long)]
    pub min_delta: Option<f64>,
    #[arg(long)]
    pub max_states: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct DataArgs {
    /// CSV file with a header row.
    #[arg(long)]
    pub data: PathBuf,
    /// Columns to drop, e.g. a class label.
    #[arg(long, value_delimiter = ',')]
    pub ignore: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Space {
    Original,
    Scaled,
    Godel,
}

impl From<Space> for FeatureSpace {
    fn from(s: Space) -> Self {
        match s {
            Space::Original => FeatureSpace::Original,
            Space::Scaled => FeatureSpace::Scaled,
            Space::Godel => FeatureSpace::Godel,
        }
    }
}

#[derive(Debug, Args)]
pub struct ClusterArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// JSON file with any of the options below; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub metric: Option<MergeMetric>,
    #[arg(long)]
    pub split_size: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// `random` or a rule such as 00001781.
    #[arg(long)]
    pub rule: Option<String>,
    #[arg(long)]
    pub aux_rule: Option<String>,
    /// Rule pool for random draws; defaults to the shipped candidates.
    #[arg(long)]
    pub catalog: Option<PathBuf>,
    /// Round every column to at most this many decimals before encoding.
    #[arg(long)]
    pub max_decimals: Option<u32>,
    #[arg(long)]
    pub max_godel_digits: Option<usize>,
    /// Feature space scored by the silhouette merge.
    #[arg(long, value_enum)]
    pub silhouette_space: Option<Space>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Options accepted in a `--config` file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub split_size: Option<usize>,
    pub rule: Option<String>,
    pub aux_rule: Option<String>,
    pub metric: Option<MergeMetric>,
    pub k: Option<usize>,
    pub seed: Option<u64>,
    pub max_decimals: Option<u32>,
    pub max_godel_digits: Option<usize>,
    pub silhouette_space: Option<Space>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    SortGodel,
    Kmeans,
}

#[derive(Debug, Args)]
pub struct BaselineArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, value_enum)]
    pub method: Method,
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// K-Means feature space: original values or Gödel-frame split values.
    #[arg(long, value_enum, default_value = "original")]
    pub space: Space,
    #[arg(long, default_value_t = 6)]
    pub split_size: usize,
    #[arg(long, default_value_t = 10)]
    pub restarts: usize,
    /// Read the single data column as ready-made Gödel numbers (sort-godel).
    #[arg(long)]
    pub numbers: bool,
    #[arg(long)]
    pub max_decimals: Option<u32>,
    #[arg(long, default_value_t = DEFAULT_MAX_GODEL_DIGITS)]
    pub max_godel_digits: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// A run report, or a text file with one integer label per line.
    #[arg(long)]
    pub labels: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parses `args` (program name first), runs the command and maps the
/// outcome to an exit code.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() {
                ExitStatus::Precondition as u8
            } else {
                0
            });
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.status() as u8)
        }
    }
}

pub fn run(cmd: Command) -> Result<(), AppError> {
    match cmd {
        Command::AnalyzeRule(a) => analyze_rule(a),
        Command::Scan(a) => scan(a),
        Command::Filter(a) => filter(a),
        Command::Cluster(a) => cluster(a),
        Command::Baseline(a) => baseline(a),
        Command::Evaluate(a) => evaluate(a),
    }
}

/// Writes `data` to `out` and `summary` to stdout, or `data` to stdout and
/// `summary` to stderr.
fn emit(out: Option<&Path>, data: &str, summary: &str) -> Result<(), AppError> {
    match out {
        Some(p) => {
            fs::write(p, data).map_err(|e| AppError::io(p, e))?;
            print!("{summary}");
        }
        None => {
            let mut so = std::io::stdout().lock();
            so.write_all(data.as_bytes()).map_err(|e| AppError::io("<stdout>", e))?;
            eprint!("{summary}");
        }
    }
    Ok(())
}

fn budget_with(max_states: Option<u64>) -> Budget {
    let mut b = Budget::default();
    if let Some(m) = max_states {
        b.max_states = m;
        b.max_materialized = b.max_materialized.min(m);
    }
    b
}

#[derive(Debug, Serialize)]
struct WidthReport {
    n: usize,
    /// `None` when the space is too large to decide.
    reversible: Option<bool>,
    method: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    determinant: Option<u8>,
    #[serde(skip_serializing_if = "Option::is_none")]
    cycles: Option<CycleReport>,
}

#[derive(Debug, Serialize)]
struct CycleReport {
    cycle_count: u64,
    max_cycle_length: u64,
    total: u64,
    mean_cycle_length: f64,
    mean_exact: String,
}

#[derive(Debug, Serialize)]
struct ChaosReport {
    lambda_p: f64,
    eta_p: f64,
    lambda_c: f64,
    eta_c: f64,
    p: (f64, f64),
    p_left: (f64, f64),
    p_right: (f64, f64),
    delta_p: f64,
    counts: ChaosCounts,
    single_precision: ChaosRecordF32,
}

#[derive(Debug, Serialize)]
struct ChaosRecordF32 {
    lambda_p: f64,
    eta_p: f64,
    lambda_c: f64,
    eta_c: f64,
    delta_p: f64,
}

fn pair8(p: fdca_core::chaos::PPair) -> (f64, f64) {
    (round_to(p.0, 8), round_to(p.1, 8))
}

fn chaos_report(rule: &FdcaRule) -> ChaosReport {
    let c = ChaosProfile::of(rule);
    let r = ChaosRecord::from(&c);
    let f = SinglePrecisionRates::of(rule);
    let f8 = |v: f32| round_to(v as f64, 8);
    ChaosReport {
        lambda_p: r.lambda_p,
        eta_p: r.eta_p,
        lambda_c: r.lambda_c,
        eta_c: r.eta_c,
        p: r.p,
        p_left: pair8(c.p_left),
        p_right: pair8(c.p_right),
        delta_p: r.delta_p,
        counts: ChaosCounts::of(rule),
        single_precision: ChaosRecordF32 {
            lambda_p: f8(f.lambda_p),
            eta_p: f8(f.eta_p),
            lambda_c: f8(f.lambda_c),
            eta_c: f8(f.eta_c),
            delta_p: f8(f.delta_p),
        },
    }
}

fn analyze_rule(a: AnalyzeArgs) -> Result<(), AppError> {
    let rule = a.rule;
    let budget = Budget::default();
    let mut widths = Vec::new();
    let mut summary = format!("rule {} ({})\n", rule, rule.compact());
    for &n in &a.n.0 {
        let (reversible, method, determinant) = if rule.is_affine() {
            let d = cycles::affine_determinant(&rule, n)?;
            (Some(matches!(d, 1 | 3 | 7 | 9)), "determinant", Some(d))
        } else if fdca_core::engine::space_size(n) <= budget.max_states {
            (Some(reversible_at(&rule, n, budget)?), "exhaustive", None)
        } else {
            (None, "undecided", None)
        };
        let stats = match reversible {
            Some(true) if n <= a.stats_max_n => Some(cycles::cycle_stats(&rule, n, budget)?),
            _ => None,
        };
        let line = match (reversible, stats) {
            (Some(true), Some(s)) => format!(
                "n={n}: reversible, {} cycles, max {}, mean {:.4}",
                s.cycle_count,
                s.max_cycle_length,
                s.mean_cycle_length()
            ),
            (Some(true), None) => format!("n={n}: reversible"),
            (Some(false), _) => format!("n={n}: not reversible"),
            (None, _) => format!("n={n}: undecided (10^{n} states exceed the budget)"),
        };
        summary.push_str(&line);
        summary.push('\n');
        widths.push(WidthReport {
            n,
            reversible,
            method,
            determinant,
            cycles: stats.map(|s| {
                let (num, den) = s.mean_ratio();
                CycleReport {
                    cycle_count: s.cycle_count,
                    max_cycle_length: s.max_cycle_length,
                    total: s.total,
                    mean_cycle_length: round_to(s.mean_cycle_length(), 8),
                    mean_exact: format!("{num}/{den}"),
                }
            }),
        });
    }
    let chaos = chaos_report(&rule);
    summary.push_str(&format!(
        "lambda_p {:.8}  eta_p {:.8}  lambda_c {:.8}  eta_c {:.8}  delta_p {:.8}  P ({:.8}, {:.8})\n",
        chaos.lambda_p, chaos.eta_p, chaos.lambda_c, chaos.eta_c, chaos.delta_p, chaos.p.0, chaos.p.1
    ));
    let report = json!({
        "command": "analyze-rule",
        "rule": rule.compact(),
        "affine": rule.is_affine(),
        "left_permutive": rule.is_left_permutive(),
        "right_permutive": rule.is_right_permutive(),
        "widths": widths,
        "chaos": chaos,
    });
    let text = serde_json::to_string_pretty(&report).expect("serializable") + "\n";
    if a.json && a.out.is_none() {
        print!("{text}");
        return Ok(());
    }
    match &a.out {
        Some(p) => emit(Some(p), &text, &summary),
        None => {
            print!("{summary}");
            Ok(())
        }
    }
}

/// Reversible counts for the affine family at widths 6 to 10.
pub const EXPECTED_AFFINE_COUNTS: [(usize, u64); 5] = [(6, 5800), (7, 3360), (8, 4000), (9, 3360), (10, 5800)];
pub const EXPECTED_AFFINE_INTERSECTION: usize = 1560;

/// Compares an affine scan against the expected counts; one line per width
/// checked, mismatches marked.
pub fn discrepancy_report(cat: &RuleCatalog) -> (bool, String) {
    let mut ok = true;
    let mut s = String::new();
    for (n, want) in EXPECTED_AFFINE_COUNTS {
        if let Some(&got) = cat.reversible_counts.get(&n) {
            let mark = if got == want { "ok" } else { "MISMATCH" };
            ok &= got == want;
            s.push_str(&format!("  n={n}: {got} reversible (expected {want}) {mark}\n"));
        }
    }
    if cat.n_range == [6, 7, 8, 9, 10] {
        let got = cat.len();
        let want = EXPECTED_AFFINE_INTERSECTION;
        let mark = if got == want { "ok" } else { "MISMATCH" };
        ok &= got == want;
        s.push_str(&format!("  all widths: {got} (expected {want}) {mark}\n"));
    }
    (ok, s)
}

fn catalog_text(cat: &RuleCatalog) -> String {
    let mut buf = Vec::new();
    write_catalog(cat, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("JSON is UTF-8")
}

fn scan(a: ScanArgs) -> Result<(), AppError> {
    let ns = a.n.0;
    let family = match &a.catalog {
        Some(p) => RuleFamily::Explicit(load_catalog(p)?.rules().collect()),
        None => match a.family {
            Family::Affine => RuleFamily::Affine,
            Family::Full => RuleFamily::Full,
        },
    };
    let opts = ScanOptions {
        budget: budget_with(a.max_states),
        allow_full: a.allow_full,
        seed: a.seed,
        ..ScanOptions::default()
    };
    let cat = par_scan_reversible(&family, &ns, &opts)?;
    let mut summary = format!(
        "scanned {} rules of the {} family at n = {:?}: {} reversible at every width\n",
        family.size(),
        family.label(),
        ns,
        cat.len()
    );
    for (n, c) in &cat.reversible_counts {
        summary.push_str(&format!("  n={n}: {c}\n"));
    }
    if family == RuleFamily::Affine {
        let (ok, text) = discrepancy_report(&cat);
        if !ok {
            summary.push_str("discrepancy against the expected affine counts:\n");
            summary.push_str(&text);
        }
    }
    emit(a.out.as_deref(), &catalog_text(&cat), &summary)
}

fn single_n(n: &Option<CellRange>, default: usize) -> Result<usize, AppError> {
    match n {
        None => Ok(default),
        Some(CellRange(v)) if v.len() == 1 => Ok(v[0]),
        Some(_) => Err(AppError::Precondition("this stage takes a single --n".into())),
    }
}

fn need<T: Copy>(v: Option<T>, flag: &str) -> Result<T, AppError> {
    v.ok_or_else(|| AppError::Precondition(format!("this stage needs {flag}")))
}

fn filter(a: FilterArgs) -> Result<(), AppError> {
    let mut cat = match (&a.catalog, a.shipped) {
        (Some(p), _) => load_catalog(p)?,
        (None, true) => shipped_candidates(),
        (None, false) => return Err(AppError::Precondition("pass --catalog or --shipped".into())),
    };
    let budget = budget_with(a.max_states);
    let before = cat.len();
    let out = match a.stage {
        Stage::First | Stage::Second => {
            par_fill_chaos(&mut cat);
            let stage = if a.stage == Stage::First {
                let ChaoticStage::First {
                    max_propagation,
                    min_delta,
                } = ChaoticStage::FIRST
                else {
                    unreachable!()
                };
                ChaoticStage::First {
                    max_propagation: a.max_propagation.unwrap_or(max_propagation),
                    min_delta: a.min_delta.unwrap_or(min_delta),
                }
            } else {
                ChaoticStage::SECOND
            };
            filter_chaotic(&cat, stage, budget)?
        }
        Stage::Third => {
            let ChaoticStage::Third { n, cycles, max_len } = ChaoticStage::THIRD else {
                unreachable!()
            };
            let n = single_n(&a.n, n)?;
            par_fill_stats(&mut cat, n, budget)?;
            let stage = ChaoticStage::Third {
                n,
                cycles: a.cycles.unwrap_or(cycles),
                max_len: a.max_len.unwrap_or(max_len),
            };
            filter_chaotic(&cat, stage, budget)?
        }
        Stage::Reversible => {
            let ns = match &a.n {
                Some(r) => r.0.clone(),
                None => return Err(AppError::Precondition("this stage needs --n".into())),
            };
            let opts = ScanOptions {
                budget,
                ..ScanOptions::default()
            };
            let family = RuleFamily::Explicit(cat.rules().collect());
            let mut scanned = par_scan_reversible(&family, &ns, &opts)?;
            let mut provenance = cat.provenance.clone();
            provenance.append(&mut scanned.provenance);
            scanned.provenance = provenance;
            scanned
        }
        stage => {
            let n = single_n(&a.n, 6)?;
            let selector = match stage {
                Stage::Exact => CycleSelector::Exact {
                    cycles: need(a.cycles, "--cycles")?,
                    max_len: need(a.max_len, "--max-len")?,
                },
                Stage::MaxCycles => CycleSelector::MaxCycles(need(a.cycles, "--cycles")?),
                Stage::CyclesIn => {
                    if a.cycles_list.is_empty() {
                        return Err(AppError::Precondition("this stage needs --cycles-list".into()));
                    }
                    CycleSelector::CycleCountIn(a.cycles_list.clone())
                }
                Stage::Quantile => CycleSelector::MinCycleQuantile(need(a.quantile, "--quantile")?),
                _ => unreachable!(),
            };
            par_fill_stats(&mut cat, n, budget)?;
            filter_cycle_structure(&cat, n, &selector, budget)?
        }
    };
    let summary = format!("{:?} stage: {} of {} rules kept\n", a.stage, out.len(), before);
    emit(a.out.as_deref(), &catalog_text(&out), &summary)
}

struct Timer {
    last: Instant,
    start: Instant,
    stages: Vec<(String, f64)>,
    verbose: bool,
}

impl Timer {
    fn new(verbose: bool) -> Self {
        let now = Instant::now();
        Timer {
            last: now,
            start: now,
            stages: Vec::new(),
            verbose,
        }
    }

    fn lap(&mut self, stage: &str) {
        let now = Instant::now();
        let ms = now.duration_since(self.last).as_secs_f64() * 1e3;
        self.last = now;
        self.stages.push((stage.to_string(), round_to(ms, 3)));
    }

    fn finish(self) -> Timing {
        Timing {
            total_ms: round_to(self.start.elapsed().as_secs_f64() * 1e3, 3),
            stages: self.stages,
        }
    }
}

impl StageObserver for Timer {
    fn stage_done(&mut self, r: &StageRecord) {
        self.lap(&r.stage);
        if self.verbose {
            eprintln!("  {:<13} {:>6} clusters  width {}", r.stage, r.clusters, r.width);
        }
    }
}

fn load_data(d: &DataArgs) -> Result<NumericDataset, AppError> {
    Ok(read_csv(&d.data, &d.ignore)?)
}

fn read_config(path: &Path) -> Result<ConfigFile, AppError> {
    let text = fs::read_to_string(path).map_err(|e| AppError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| AppError::Format {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

/// Merges a config file with command-line flags, flags winning.
pub fn effective_config(a: &ClusterArgs) -> Result<ConfigFile, AppError> {
    let file = match &a.config {
        Some(p) => read_config(p)?,
        None => ConfigFile::default(),
    };
    Ok(ConfigFile {
        split_size: a.split_size.or(file.split_size).or(Some(6)),
        rule: a.rule.clone().or(file.rule).or(Some("random".into())),
        aux_rule: a.aux_rule.clone().or(file.aux_rule).or(Some("random".into())),
        metric: a.metric.or(file.metric).or(Some(MergeMetric::Participation)),
        k: a.k.or(file.k),
        seed: a.seed.or(file.seed).or(Some(0)),
        max_decimals: a.max_decimals.or(file.max_decimals),
        max_godel_digits: a
            .max_godel_digits
            .or(file.max_godel_digits)
            .or(Some(DEFAULT_MAX_GODEL_DIGITS)),
        silhouette_space: a.silhouette_space.or(file.silhouette_space).or(Some(Space::Original)),
    })
}

fn pipeline_config(c: &ConfigFile, candidates: Option<Vec<FdcaRule>>) -> Result<PipelineConfig, AppError> {
    let k =
        c.k.ok_or_else(|| AppError::Precondition("--k is required (flag or config file)".into()))?;
    let metric = c.metric.expect("defaulted");
    let mut p = PipelineConfig::new(metric, k, c.seed.expect("defaulted"));
    p.split_size = c.split_size.expect("defaulted");
    p.rule = parse_choice(c.rule.as_deref().expect("defaulted")).map_err(AppError::Precondition)?;
    p.aux_rule = parse_choice(c.aux_rule.as_deref().expect("defaulted")).map_err(AppError::Precondition)?;
    p.scale = ScaleOptions {
        max_decimals: c.max_decimals,
    };
    p.max_godel_digits = c.max_godel_digits.expect("defaulted");
    p.silhouette_space = c.silhouette_space.expect("defaulted").into();
    if let Some(rules) = candidates {
        p.candidates = rules;
    }
    Ok(p)
}

fn config_echo(data: &DataArgs, p: &PipelineConfig) -> serde_json::Value {
    json!({
        "data": data.data.display().to_string(),
        "ignore": data.ignore,
        "split_size": p.split_size,
        "rule": choice_text(p.rule),
        "aux_rule": choice_text(p.aux_rule),
        "metric": p.metric.name(),
        "k": p.k,
        "seed": p.seed,
        "max_decimals": p.scale.max_decimals,
        "max_godel_digits": p.max_godel_digits,
        "silhouette_space": format!("{:?}", p.silhouette_space).to_lowercase(),
        "candidates": p.candidates.len(),
    })
}

/// Runs the clustering pipeline and builds its report.
pub fn cluster_report(
    data: &DataArgs,
    raw: &NumericDataset,
    p: &PipelineConfig,
    verbose: bool,
) -> Result<RunReport, AppError> {
    let mut timer = Timer::new(verbose);
    let out = cluster_dataset_observed(raw, p, &mut timer)?;
    let points = raw.to_f64_rows();
    let labels = out.clustering.into_labels();
    let mut report = RunReport::new("cluster", p.metric.name(), config_echo(data, p), labels, &points);
    report.rules_used = out
        .rules_used
        .iter()
        .map(|(role, r)| RuleUse {
            role: role.clone(),
            rule: r.compact(),
        })
        .collect();
    report.stage_trace = out.stage_trace;
    timer.lap("score");
    report.timing = Some(timer.finish());
    Ok(report)
}

fn report_summary(r: &RunReport) -> String {
    let mut s = format!(
        "{} ({}): {} rows in {} clusters, sizes {:?}\n",
        r.command, r.method, r.rows, r.k, r.cluster_sizes
    );
    if !r.rules_used.is_empty() {
        let rules: Vec<String> = r.rules_used.iter().map(|u| format!("{} {}", u.role, u.rule)).collect();
        s.push_str(&format!("rules: {}\n", rules.join(", ")));
    }
    s.push_str(&r.scores.table());
    s
}

fn cluster(a: ClusterArgs) -> Result<(), AppError> {
    let cfg = effective_config(&a)?;
    let candidates = match &a.catalog {
        Some(p) => Some(load_catalog(p)?.rules().collect()),
        None => None,
    };
    let p = pipeline_config(&cfg, candidates)?;
    let raw = load_data(&a.data)?;
    let report = cluster_report(&a.data, &raw, &p, a.out.is_some())?;
    emit(a.out.as_deref(), &report.to_json(), &report_summary(&report))
}

fn numbers_column(raw: &NumericDataset) -> Result<Vec<BigUint>, AppError> {
    if raw.n_cols() != 1 {
        return Err(AppError::Precondition(format!(
            "--numbers needs exactly one data column, found {}",
            raw.n_cols()
        )));
    }
    raw.rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let d = r[0].normalized();
            if d.scale != 0 || d.mantissa < 0 {
                return Err(AppError::Precondition(format!(
                    "row {}: --numbers needs non-negative integers",
                    i + 1
                )));
            }
            Ok(BigUint::from(d.mantissa as u128))
        })
        .collect()
}

fn baseline(a: BaselineArgs) -> Result<(), AppError> {
    let raw = load_data(&a.data)?;
    let points = raw.to_f64_rows();
    let scale = ScaleOptions {
        max_decimals: a.max_decimals,
    };
    let godels = || -> Result<Vec<BigUint>, AppError> {
        let scaled = preprocess_scale(&raw, scale)?;
        Ok(encode_rows(&scaled.rows, a.max_godel_digits)?)
    };
    let mut timer = Timer::new(false);
    let (method, labels, extra) = match a.method {
        Method::SortGodel => {
            let numbers = if a.numbers { numbers_column(&raw)? } else { godels()? };
            let c = sort_godel_clusters(&numbers, a.k)?;
            ("sort-godel", c.into_labels(), json!({}))
        }
        Method::Kmeans => {
            let features = match a.space {
                Space::Original => points.clone(),
                Space::Scaled => preprocess_scale(&raw, scale)?
                    .rows
                    .iter()
                    .map(|r| r.iter().map(|&v| v as f64).collect())
                    .collect(),
                Space::Godel => {
                    let gf = build_frame(godels()?, a.split_size, false)?;
                    let cols: Vec<Vec<u64>> = (0..gf.frame.n_splits()).map(|j| gf.frame.split_column(j)).collect();
                    (0..gf.frame.n_rows())
                        .map(|i| cols.iter().map(|c| c[i] as f64).collect())
                        .collect()
                }
            };
            let cfg = KMeansConfig {
                restarts: a.restarts,
                ..KMeansConfig::new(a.k, a.seed)
            };
            let r = kmeans(&features, &cfg).map_err(|e| AppError::Precondition(e.to_string()))?;
            (
                "kmeans",
                r.labels,
                json!({ "inertia": r.inertia, "iterations": r.iterations }),
            )
        }
    };
    timer.lap(method);
    let config = json!({
        "data": a.data.data.display().to_string(),
        "ignore": a.data.ignore,
        "method": method,
        "k": a.k,
        "seed": a.seed,
        "space": a.space,
        "split_size": a.split_size,
        "restarts": a.restarts,
        "numbers": a.numbers,
        "max_decimals": a.max_decimals,
        "max_godel_digits": a.max_godel_digits,
        "result": extra,
    });
    let mut report = RunReport::new("baseline", method, config, labels, &points);
    timer.lap("score");
    report.timing = Some(timer.finish());
    emit(a.out.as_deref(), &report.to_json(), &report_summary(&report))
}

/// Labels from a run report, or one integer per line.
pub fn read_labels(path: &Path) -> Result<Vec<usize>, AppError> {
    let text = fs::read_to_string(path).map_err(|e| AppError::io(path, e))?;
    let bad = |m: String| AppError::Format {
        path: path.to_path_buf(),
        message: m,
    };
    if text.trim_start().starts_with('{') {
        #[derive(Deserialize)]
        struct Labels {
            labels: Vec<usize>,
        }
        let l: Labels = serde_json::from_str(&text).map_err(|e| bad(e.to_string()))?;
        return Ok(l.labels);
    }
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            l.trim()
                .parse()
                .map_err(|_| bad(format!("line {}: '{}' is not a label", i + 1, l.trim())))
        })
        .collect()
}

fn evaluate(a: EvaluateArgs) -> Result<(), AppError> {
    let raw = load_data(&a.data)?;
    let labels = read_labels(&a.labels)?;
    if labels.len() != raw.n_rows() {
        return Err(AppError::Precondition(format!(
            "{} labels for {} rows",
            labels.len(),
            raw.n_rows()
        )));
    }
    // arbitrary ids are renumbered densely by first appearance
    let labels = fdca_core::Clustering::from_labels(&labels).into_labels();
    let config = json!({
        "data": a.data.data.display().to_string(),
        "ignore": a.data.ignore,
        "labels": a.labels.display().to_string(),
    });
    let report = RunReport::new("evaluate", "labels", config, labels, &raw.to_f64_rows());
    emit(a.out.as_deref(), &report.to_json(), &report_summary(&report))
}
