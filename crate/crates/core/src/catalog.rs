//! Rule catalogs: reversibility scans over rule families and the filters that
//! narrow them down to clustering candidates.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::chaos::ChaosProfile;
use crate::cycles::{self, Budget, CycleError, CycleStats};
use crate::engine::{space_size, Stepper};
use crate::rule::FdcaRule;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CatalogError {
    #[error(transparent)]
    Cycle(#[from] CycleError),
    #[error(
        "scanning the full rule family needs about {estimate:.3e} state visits; pass an explicit override to proceed"
    )]
    FullFamilyRefused { estimate: f64 },
    #[error("no cycle statistics for {rule} at n = {n}")]
    MissingStats { rule: FdcaRule, n: usize },
    #[error("empty cell-length range")]
    EmptyRange,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CatalogEntry {
    pub rule: FdcaRule,
    /// Reversibility verdict per cell length.
    pub verdicts: BTreeMap<usize, bool>,
    pub stats: BTreeMap<usize, CycleStats>,
    pub chaos: Option<ChaosProfile>,
}

impl CatalogEntry {
    pub fn new(rule: FdcaRule) -> Self {
        CatalogEntry {
            rule,
            verdicts: BTreeMap::new(),
            stats: BTreeMap::new(),
            chaos: None,
        }
    }

    pub fn reversible_n(&self) -> Vec<usize> {
        self.verdicts.iter().filter(|(_, &ok)| ok).map(|(&n, _)| n).collect()
    }

    pub fn chaos(&mut self) -> &ChaosProfile {
        self.chaos.get_or_insert_with(|| ChaosProfile::of(&self.rule))
    }

    pub fn stats_at(&mut self, n: usize, budget: Budget) -> Result<CycleStats, CycleError> {
        if let Some(s) = self.stats.get(&n) {
            return Ok(*s);
        }
        let s = cycles::cycle_stats(&self.rule, n, budget)?;
        self.stats.insert(n, s);
        Ok(s)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RuleCatalog {
    pub entries: Vec<CatalogEntry>,
    /// Cell lengths every entry carries a verdict for.
    pub n_range: Vec<usize>,
    /// Steps that produced this catalog, oldest first.
    pub provenance: Vec<String>,
    /// Number of scanned rules reversible at each cell length.
    pub reversible_counts: BTreeMap<usize, u64>,
    /// Entry count before duplicates were dropped.
    pub raw_count: usize,
}

impl RuleCatalog {
    /// Builds a catalog, keeping the first occurrence of each rule.
    pub fn from_entries(
        entries: impl IntoIterator<Item = CatalogEntry>,
        n_range: Vec<usize>,
        provenance: Vec<String>,
    ) -> Self {
        let mut seen = alloc::collections::BTreeSet::new();
        let mut raw_count = 0;
        let mut kept = Vec::new();
        for e in entries {
            raw_count += 1;
            if seen.insert(e.rule) {
                kept.push(e);
            }
        }
        RuleCatalog {
            entries: kept,
            n_range,
            provenance,
            reversible_counts: BTreeMap::new(),
            raw_count,
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn rules(&self) -> impl Iterator<Item = FdcaRule> + '_ {
        self.entries.iter().map(|e| e.rule)
    }

    pub fn contains(&self, rule: &FdcaRule) -> bool {
        self.entries.iter().any(|e| e.rule == *rule)
    }

    pub fn get(&self, rule: &FdcaRule) -> Option<&CatalogEntry> {
        self.entries.iter().find(|e| e.rule == *rule)
    }

    /// Number of duplicates dropped at construction.
    pub fn duplicates(&self) -> usize {
        self.raw_count.saturating_sub(self.entries.len())
    }

    fn derive(&self, entries: Vec<CatalogEntry>, step: String) -> RuleCatalog {
        let mut provenance = self.provenance.clone();
        provenance.push(step);
        RuleCatalog {
            raw_count: entries.len(),
            entries,
            n_range: self.n_range.clone(),
            provenance,
            reversible_counts: self.reversible_counts.clone(),
        }
    }

    /// Fills in chaos profiles for every entry that lacks one.
    pub fn with_chaos(mut self) -> Self {
        for e in &mut self.entries {
            e.chaos();
        }
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RuleFamily {
    /// The 10^4 rules with `c0 = c1 = c2 = c3 = 0`.
    Affine,
    /// All 10^8 parameter vectors.
    Full,
    Explicit(Vec<FdcaRule>),
}

impl RuleFamily {
    pub fn size(&self) -> u64 {
        match self {
            RuleFamily::Affine => 10_000,
            RuleFamily::Full => 100_000_000,
            RuleFamily::Explicit(v) => v.len() as u64,
        }
    }

    /// Member `i` in scan order.
    pub fn rule_at(&self, i: u64) -> FdcaRule {
        match self {
            RuleFamily::Affine => FdcaRule::from_index(i as u32).expect("affine index below 10^4"),
            RuleFamily::Full => FdcaRule::from_index(i as u32).expect("index below 10^8"),
            RuleFamily::Explicit(v) => v[i as usize],
        }
    }

    pub fn rules(&self) -> impl Iterator<Item = FdcaRule> + '_ {
        (0..self.size()).map(move |i| self.rule_at(i))
    }

    pub fn label(&self) -> String {
        match self {
            RuleFamily::Affine => String::from("affine"),
            RuleFamily::Full => String::from("full"),
            RuleFamily::Explicit(v) => format!("explicit({})", v.len()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScanOptions {
    pub budget: Budget,
    /// Required before a [`RuleFamily::Full`] scan starts.
    pub allow_full: bool,
    /// Random configurations probed for a collision before the exhaustive
    /// injectivity check of a non-affine rule.
    pub collision_samples: usize,
    pub seed: u64,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            budget: Budget::default(),
            allow_full: false,
            collision_samples: 4096,
            seed: 0,
        }
    }
}

/// Reversibility of one rule at each cell length. Affine rules use the
/// determinant; others a sampled collision probe followed by an exhaustive
/// injectivity check within `opts.budget`.
pub fn verdicts_for(rule: &FdcaRule, ns: &[usize], opts: &ScanOptions) -> Result<BTreeMap<usize, bool>, CatalogError> {
    let mut out = BTreeMap::new();
    for &n in ns {
        let ok = if rule.is_affine() {
            cycles::is_reversible_affine(rule, n)?
        } else {
            let required = space_size(n);
            if required > opts.budget.max_states {
                return Err(CycleError::Budget {
                    n,
                    required,
                    limit: opts.budget.max_states,
                }
                .into());
            }
            let s = Stepper::new(rule, n).map_err(CycleError::from)?;
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ rule.index() as u64);
            cycles::sampled_collision(&s, opts.collision_samples, &mut rng).is_none() && cycles::is_injective(&s)
        };
        out.insert(n, ok);
        if !ok {
            // one failure removes the rule; later widths are not needed
            break;
        }
    }
    Ok(out)
}

/// Refuses a full-family scan unless explicitly allowed.
pub fn check_family(family: &RuleFamily, ns: &[usize], opts: &ScanOptions) -> Result<(), CatalogError> {
    if ns.is_empty() {
        return Err(CatalogError::EmptyRange);
    }
    if *family == RuleFamily::Full && !opts.allow_full {
        let per_rule: f64 = ns.iter().map(|&n| space_size(n) as f64).sum();
        return Err(CatalogError::FullFamilyRefused {
            estimate: per_rule * family.size() as f64,
        });
    }
    Ok(())
}

/// Assembles a scan result: rules reversible at every `n` become entries and
/// every verdict counts towards the per-`n` totals.
pub fn catalog_from_verdicts(
    family: &RuleFamily,
    ns: &[usize],
    verdicts: impl IntoIterator<Item = (FdcaRule, BTreeMap<usize, bool>)>,
) -> RuleCatalog {
    let mut counts: BTreeMap<usize, u64> = ns.iter().map(|&n| (n, 0)).collect();
    let mut entries = Vec::new();
    for (rule, v) in verdicts {
        for (&n, &ok) in &v {
            if ok {
                *counts.entry(n).or_insert(0) += 1;
            }
        }
        if ns.iter().all(|n| v.get(n) == Some(&true)) {
            let mut e = CatalogEntry::new(rule);
            e.verdicts = v;
            entries.push(e);
        }
    }
    let mut cat = RuleCatalog::from_entries(
        entries,
        ns.to_vec(),
        alloc::vec![format!("scan_reversible({}, n={:?})", family.label(), ns)],
    );
    cat.reversible_counts = counts;
    cat
}

/// Sequential scan. Per-`n` counts cover every width for every rule, so
/// `reversible_counts` stays comparable across widths.
pub fn scan_reversible(family: &RuleFamily, ns: &[usize], opts: &ScanOptions) -> Result<RuleCatalog, CatalogError> {
    check_family(family, ns, opts)?;
    let mut all = Vec::with_capacity(family.size() as usize);
    for rule in family.rules() {
        all.push((rule, full_verdicts(&rule, ns, opts)?));
    }
    Ok(catalog_from_verdicts(family, ns, all))
}

/// Verdicts at every width, without stopping at the first failure.
pub fn full_verdicts(rule: &FdcaRule, ns: &[usize], opts: &ScanOptions) -> Result<BTreeMap<usize, bool>, CatalogError> {
    let mut out = BTreeMap::new();
    for &n in ns {
        out.extend(verdicts_for(rule, &[n], opts)?);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub enum CycleSelector {
    AcceptAll,
    /// Cycle count and longest cycle both equal.
    Exact {
        cycles: u64,
        max_len: u64,
    },
    /// Cycle count at most this many.
    MaxCycles(u64),
    /// Cycle count in the given list.
    CycleCountIn(Vec<u64>),
    /// Cycle count at most the `q`-quantile (nearest rank, lower) of the
    /// catalog's counts.
    MinCycleQuantile(f64),
}

/// Keeps the rules whose cycle structure at `n` satisfies `selector`.
pub fn filter_cycle_structure(
    catalog: &RuleCatalog,
    n: usize,
    selector: &CycleSelector,
    budget: Budget,
) -> Result<RuleCatalog, CatalogError> {
    let step = format!("filter_cycle_structure(n={n}, {selector:?})");
    if *selector == CycleSelector::AcceptAll {
        return Ok(catalog.derive(catalog.entries.clone(), step));
    }
    let mut entries = catalog.entries.clone();
    for e in &mut entries {
        e.stats_at(n, budget)?;
    }
    let count = |e: &CatalogEntry| e.stats[&n].cycle_count;
    let keep: Vec<CatalogEntry> = match selector {
        CycleSelector::AcceptAll => unreachable!(),
        CycleSelector::Exact { cycles, max_len } => entries
            .into_iter()
            .filter(|e| e.stats[&n].cycle_count == *cycles && e.stats[&n].max_cycle_length == *max_len)
            .collect(),
        CycleSelector::MaxCycles(limit) => entries.into_iter().filter(|e| count(e) <= *limit).collect(),
        CycleSelector::CycleCountIn(list) => entries.into_iter().filter(|e| list.contains(&count(e))).collect(),
        CycleSelector::MinCycleQuantile(q) => {
            let mut counts: Vec<u64> = entries.iter().map(count).collect();
            counts.sort_unstable();
            let threshold = match counts.len() {
                0 => 0,
                len => {
                    let rank = (q.clamp(0.0, 1.0) * (len - 1) as f64) as usize;
                    counts[rank]
                }
            };
            entries.into_iter().filter(|e| count(e) <= threshold).collect()
        }
    };
    Ok(catalog.derive(keep, step))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChaoticStage {
    /// Keep `max(lambda_p, eta_p) <= max_propagation` and
    /// `delta_p >= min_delta`.
    First { max_propagation: f64, min_delta: f64 },
    /// Drop rules whose `(lambda_p, eta_p)` is `(0,0)`, `(0,1)` or `(1,0)`.
    Second { tolerance: f64 },
    /// Keep rules with exactly this cycle structure at `n`.
    Third { n: usize, cycles: u64, max_len: u64 },
}

impl ChaoticStage {
    pub const FIRST: ChaoticStage = ChaoticStage::First {
        max_propagation: 0.7,
        min_delta: 0.5,
    };
    pub const SECOND: ChaoticStage = ChaoticStage::Second { tolerance: 1e-9 };
    pub const THIRD: ChaoticStage = ChaoticStage::Third {
        n: 6,
        cycles: 25_000,
        max_len: 40,
    };
}

pub fn filter_chaotic(catalog: &RuleCatalog, stage: ChaoticStage, budget: Budget) -> Result<RuleCatalog, CatalogError> {
    let step = format!("filter_chaotic({stage:?})");
    let mut entries = catalog.entries.clone();
    let keep: Vec<CatalogEntry> = match stage {
        ChaoticStage::First {
            max_propagation,
            min_delta,
        } => entries
            .into_iter()
            .filter_map(|mut e| {
                let p = *e.chaos();
                (p.lambda_p.max(p.eta_p) <= max_propagation && p.delta_p >= min_delta).then_some(e)
            })
            .collect(),
        ChaoticStage::Second { tolerance } => {
            let near = |a: f64, b: f64| (a - b).abs() <= tolerance;
            entries
                .into_iter()
                .filter_map(|mut e| {
                    let p = *e.chaos();
                    let banned = [(0.0, 0.0), (0.0, 1.0), (1.0, 0.0)]
                        .iter()
                        .any(|&(l, r)| near(p.lambda_p, l) && near(p.eta_p, r));
                    (!banned).then_some(e)
                })
                .collect()
        }
        ChaoticStage::Third { n, cycles, max_len } => {
            for e in &mut entries {
                e.stats_at(n, budget)?;
            }
            entries
                .into_iter()
                .filter(|e| {
                    let s = e.stats[&n];
                    s.cycle_count == cycles && s.max_cycle_length == max_len
                })
                .collect()
        }
    };
    Ok(catalog.derive(keep, step))
}

/// The published candidate list in table order, duplicates included.
pub const SHIPPED_RAW: [&str; 36] = [
    "00001781", "00003767", "00004931", "00006737", "00003941", "00000157", "00001783", "00003769", "00004933",
    "00006739", "00003943", "00000159", "00001787", "00003941", "00004937", "00003761", "00003947", "00005101",
    "00001789", "00003943", "00004939", "00003763", "00003949", "00005103", "00003761", "00003947", "00006731",
    "00003767", "00000151", "00005107", "00003763", "00003949", "00006733", "00003769", "00000153", "00005109",
];

/// Cell lengths the candidates were selected for.
pub const CANDIDATE_WIDTHS: [usize; 5] = [6, 7, 8, 9, 10];

/// Deduplicated candidate rules with verdicts for widths 6 to 10.
pub fn shipped_candidates() -> RuleCatalog {
    let entries = SHIPPED_RAW.iter().map(|s| {
        let rule: FdcaRule = s.parse().expect("valid shipped rule");
        let mut e = CatalogEntry::new(rule);
        for n in CANDIDATE_WIDTHS {
            let ok = cycles::is_reversible_affine(&rule, n).expect("shipped rules are affine");
            e.verdicts.insert(n, ok);
        }
        e
    });
    RuleCatalog::from_entries(
        entries,
        CANDIDATE_WIDTHS.to_vec(),
        alloc::vec![String::from("shipped_candidates")],
    )
}
