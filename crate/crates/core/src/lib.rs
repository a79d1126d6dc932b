//! Decimal first-degree cellular automata and cycle-space clustering.
//!
//! The crate is `no_std` and only needs `alloc`. It covers the rule algebra,
//! null-boundary evolution, cycle enumeration, the information-flow
//! parameters used to select rules, Gödel-number framing of numeric rows,
//! validity indices and the multi-stage clustering engine.
//!
//! ```
//! use fdca_core::{cycles, FdcaRule};
//!
//! let rule: FdcaRule = "⟨0,0,0,0,1,0,1,8⟩".parse().unwrap();
//! let stats = cycles::cycle_stats(&rule, 4, cycles::Budget::default()).unwrap();
//! assert_eq!((stats.cycle_count, stats.max_cycle_length), (220, 60));
//! ```

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod catalog;
pub mod chaos;
pub mod cluster;
pub mod cycles;
pub mod engine;
pub mod godel;
pub mod metrics;
pub mod rule;

mod bitset;

pub use catalog::{CatalogEntry, RuleCatalog};
pub use chaos::ChaosProfile;
pub use cluster::{Clustering, PipelineConfig};
pub use cycles::{CyclePartition, CycleStats};
pub use engine::{ConfigIndex, Configuration};
pub use godel::{GodelFrame, NumericDataset};
pub use rule::{FdcaRule, Rmt, RuleTable};
