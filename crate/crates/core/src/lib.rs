//! Fusion rules for hierarchical tilings.
//!
//! A fusion rule builds level-`n` supertiles by joining level-`n-1`
//! supertiles, with definitions that may change from level to level. This
//! crate parses rules from the `.fusion` text format, resolves them level by
//! level, and computes:
//!
//! * exact transition matrices `M_{n,N}` counting level-`n` supertiles inside
//!   level-`N` supertiles, and supertile volumes;
//! * concrete expansions (strings in 1D, cell grids in 2D), admissibility
//!   searches, text and SVG renderings;
//! * primitivity and van Hove diagnostics, frequency hulls, ergodicity
//!   verdicts, and patch frequency intervals.
//!
//! All counts are arbitrary-precision integers and all frequencies exact
//! rationals.
//!
//! ```
//! use fusionlab::{builtins, Hierarchy};
//!
//! let rule = builtins::load("ten_pow_n").unwrap();
//! let h = Hierarchy::new(&rule);
//! let m = h.transition_matrix(0, 2).unwrap();
//! assert_eq!(m.get(0, 0).to_string(), "1001");
//! ```

pub mod analysis;
pub mod builtins;
pub mod dsl;
pub mod error;
pub mod expand;
pub mod expr;
pub mod json;
pub mod resolve;
pub mod rule;
pub mod transition;

pub use dsl::{format_rule, parse_rule};
pub use error::{Error, Result};
pub use expand::{CellPatch, ExpansionBudget};
pub use resolve::{resolve_level, validate_rule, Hierarchy, LevelResolution};
pub use rule::{Dimension, FusionRule};
pub use transition::{TransitionMatrix, VolumeVector};
