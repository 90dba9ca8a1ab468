//! Computational tools for Delone sets of finite type.
//!
//! The crate works with finite windows `X ∩ B_W(0)` of Delone sets in
//! dimension 1 or 2 and provides:
//!
//! - generators for lattices, one-dimensional substitution point sets and
//!   cut-and-project sets ([`generators`]);
//! - patches, translation classes and `R`-atlases with occurrences and
//!   return vectors ([`patch`], [`atlas`]);
//! - Voronoi cells of points and of occurrence sets ([`voronoi`]);
//! - covering radii, the repetitivity function and linear-repetitivity
//!   constants ([`repetitivity`]);
//! - the Delone metric as a certified bracket ([`metric`]);
//! - local-derivation factor maps, fiber counting and the relation
//!   matrices of the finiteness argument for factors ([`derivation`]);
//! - a harness that checks each quantitative bound on concrete data
//!   ([`verify`]).
//!
//! Every operation that reads a ball `B_ρ(c)` requires `‖c‖ + ρ ≤ W` and
//! fails otherwise instead of truncating.

pub mod atlas;
pub mod covering;
pub mod derivation;
pub mod error;
pub mod generators;
pub mod geometry;
pub mod grid;
pub mod io;
pub mod metric;
pub mod params;
pub mod patch;
pub mod repetitivity;
pub mod set;
pub mod verify;
pub mod voronoi;

pub use error::{DeloneError, Result};
pub use geometry::{Point, ETA};
pub use patch::{canonical_class, extract_patch, patch_translation_match, Equivalence, Patch, PatchClass};
pub use set::{build_windowed_set, WindowedDeloneSet};
