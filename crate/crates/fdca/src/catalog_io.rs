//! JSON Lines catalogs. The first line is a header object, then one entry
//! per line:
//!
//! ```text
//! {"format":"fdca-catalog","version":1,"n_range":[6,7],"provenance":[...],"reversible_counts":{"6":5800},"raw_count":1560,"entries":1560}
//! {"rule":"00001781","verdicts":{"6":true,"7":true},"stats":{"6":{"cycle_count":...}},"chaos":{...}}
//! ```
//!
//! Chaos values are written rounded to 8 decimals for reading; they are
//! recomputed from the rule when a catalog is loaded.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use fdca_core::chaos::ChaosProfile;
use fdca_core::{CatalogEntry, CycleStats, FdcaRule, RuleCatalog};
use serde::{Deserialize, Serialize};

use crate::error::AppError;
use crate::report::round_to;

const FORMAT: &str = "fdca-catalog";
const VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
struct Header {
    format: String,
    version: u32,
    n_range: Vec<usize>,
    #[serde(default)]
    provenance: Vec<String>,
    #[serde(default)]
    reversible_counts: BTreeMap<usize, u64>,
    #[serde(default)]
    raw_count: usize,
    entries: usize,
}

#[derive(Debug, Serialize, Deserialize)]
struct EntryRecord {
    rule: FdcaRule,
    #[serde(default)]
    verdicts: BTreeMap<usize, bool>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    stats: BTreeMap<usize, CycleStats>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    chaos: Option<ChaosRecord>,
}

/// Chaos parameters rounded to 8 decimals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChaosRecord {
    pub lambda_p: f64,
    pub eta_p: f64,
    pub lambda_c: f64,
    pub eta_c: f64,
    pub p: (f64, f64),
    pub delta_p: f64,
}

impl From<&ChaosProfile> for ChaosRecord {
    fn from(c: &ChaosProfile) -> Self {
        ChaosRecord {
            lambda_p: round_to(c.lambda_p, 8),
            eta_p: round_to(c.eta_p, 8),
            lambda_c: round_to(c.lambda_c, 8),
            eta_c: round_to(c.eta_c, 8),
            p: (round_to(c.p.0, 8), round_to(c.p.1, 8)),
            delta_p: round_to(c.delta_p, 8),
        }
    }
}

pub fn write_catalog<W: Write>(cat: &RuleCatalog, mut w: W) -> std::io::Result<()> {
    let header = Header {
        format: FORMAT.into(),
        version: VERSION,
        n_range: cat.n_range.clone(),
        provenance: cat.provenance.clone(),
        reversible_counts: cat.reversible_counts.clone(),
        raw_count: cat.raw_count,
        entries: cat.len(),
    };
    serde_json::to_writer(&mut w, &header)?;
    writeln!(w)?;
    for e in &cat.entries {
        let rec = EntryRecord {
            rule: e.rule,
            verdicts: e.verdicts.clone(),
            stats: e.stats.clone(),
            chaos: e.chaos.as_ref().map(ChaosRecord::from),
        };
        serde_json::to_writer(&mut w, &rec)?;
        writeln!(w)?;
    }
    w.flush()
}

pub fn save_catalog(cat: &RuleCatalog, path: &Path) -> Result<(), AppError> {
    let f = File::create(path).map_err(|e| AppError::io(path, e))?;
    write_catalog(cat, BufWriter::new(f)).map_err(|e| AppError::io(path, e))
}

fn bad(path: &Path, line: usize, message: impl std::fmt::Display) -> AppError {
    AppError::Format {
        path: path.to_path_buf(),
        message: format!("line {line}: {message}"),
    }
}

/// Reads a catalog. A file without the header line is accepted as a plain
/// list of entry records (or bare rule strings), one per line.
pub fn read_catalog<R: BufRead>(r: R, path: &Path) -> Result<RuleCatalog, AppError> {
    let mut header: Option<Header> = None;
    let mut entries = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line.map_err(|e| AppError::io(path, e))?;
        let text = line.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        if i == 0 && text.contains("\"format\"") {
            let h: Header = serde_json::from_str(text).map_err(|e| bad(path, 1, e))?;
            if h.format != FORMAT || h.version != VERSION {
                return Err(bad(path, 1, format!("unsupported catalog {} v{}", h.format, h.version)));
            }
            header = Some(h);
            continue;
        }
        let rec: EntryRecord = if text.starts_with('{') {
            serde_json::from_str(text).map_err(|e| bad(path, i + 1, e))?
        } else {
            let rule = text.trim_matches('"').parse().map_err(|e| bad(path, i + 1, e))?;
            EntryRecord {
                rule,
                verdicts: BTreeMap::new(),
                stats: BTreeMap::new(),
                chaos: None,
            }
        };
        let mut e = CatalogEntry::new(rec.rule);
        e.verdicts = rec.verdicts;
        e.stats = rec.stats;
        entries.push(e);
    }
    let mut cat = match &header {
        Some(h) => RuleCatalog::from_entries(entries, h.n_range.clone(), h.provenance.clone()),
        None => RuleCatalog::from_entries(entries, Vec::new(), vec![format!("load({})", path.display())]),
    };
    if let Some(h) = header {
        if h.entries != cat.raw_count {
            return Err(bad(
                path,
                1,
                format!("header announces {} entries, found {}", h.entries, cat.raw_count),
            ));
        }
        cat.reversible_counts = h.reversible_counts;
        cat.raw_count = h.raw_count.max(cat.raw_count);
    }
    Ok(cat)
}

pub fn load_catalog(path: &Path) -> Result<RuleCatalog, AppError> {
    let f = File::open(path).map_err(|e| AppError::io(path, e))?;
    read_catalog(BufReader::new(f), path)
}
