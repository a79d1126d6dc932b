//! Rayon-parallel versions of the catalog scans. Results match the
//! sequential functions in [`fdca_core::catalog`] entry for entry.

use fdca_core::catalog::{catalog_from_verdicts, check_family, full_verdicts, CatalogError, RuleFamily, ScanOptions};
use fdca_core::cycles::{self, Budget};
use fdca_core::RuleCatalog;
use rayon::prelude::*;

pub fn par_scan_reversible(family: &RuleFamily, ns: &[usize], opts: &ScanOptions) -> Result<RuleCatalog, CatalogError> {
    check_family(family, ns, opts)?;
    let all = (0..family.size())
        .into_par_iter()
        .map(|i| {
            let rule = family.rule_at(i);
            full_verdicts(&rule, ns, opts).map(|v| (rule, v))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(catalog_from_verdicts(family, ns, all))
}

/// Computes missing cycle statistics at `n` for every entry.
pub fn par_fill_stats(catalog: &mut RuleCatalog, n: usize, budget: Budget) -> Result<(), CatalogError> {
    catalog
        .entries
        .par_iter_mut()
        .filter(|e| !e.stats.contains_key(&n))
        .try_for_each(|e| {
            let s = cycles::cycle_stats(&e.rule, n, budget)?;
            e.stats.insert(n, s);
            Ok(())
        })
}

pub fn par_fill_chaos(catalog: &mut RuleCatalog) {
    catalog.entries.par_iter_mut().for_each(|e| {
        e.chaos();
    });
}
