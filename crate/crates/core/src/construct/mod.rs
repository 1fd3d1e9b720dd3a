//! Constructions of d-disjunct binary codes.

mod catalog;
mod concat;
mod crt;
mod greedy;
mod import;
mod recipe;
mod shorten;

pub use catalog::{
    compare_designs, lookup, write_comparison, CatalogEntry, DesignComparison, Source, CATALOG, EXTENDED_FALLBACK,
    GRID_SIDES, SUBSTITUTES,
};
pub use concat::{concat_identity, concat_inner, inner_affine_lines, inner_inversive_plane, outer_certificate};
pub use crt::{crt_sieve, tabulated_set, PrimePowerSet};
pub use greedy::{extend_greedy, greedy_construct, greedy_w_sweep, GreedyOutcome, GreedyParams, StopReason};
pub use import::{import_code, Declared};
pub use recipe::{
    build_descriptor, build_recipe, outer_code, Base, BuildOptions, BuildOutcome, Inner, Recipe, Registry,
    Transform,
};
pub use shorten::{max_zero_steps, shorten_weight, shorten_zero, ShorteningReport, WeightShortening, ZeroShortening};
