//! Primitivity, van Hove, frequency hulls, and patch frequencies.

mod hull;
mod patches;
mod primitivity;
mod vanhove;

pub use hull::{
    ergodicity_report, frequency_hull, CoordinateRange, ErgodicityOptions, ErgodicityReport,
    FrequencyHull, TrajectoryPoint, Verdict,
};
pub use patches::{
    patch_count_2d, patch_frequency_estimate, patch_universality, word_count, FrequencyInterval,
};
pub use primitivity::{primitivity_check, PrimitivityResult, ZeroWitness};
pub use vanhove::{boundary_cells, van_hove_diagnostic, LevelBoundary, VanHoveReport};
