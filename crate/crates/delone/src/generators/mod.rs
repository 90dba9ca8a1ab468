//! Concrete windowed Delone sets: lattices, substitution point sets,
//! cut-and-project sets, and decorations of any of them.

mod cut_project;
mod decorate;
mod lattice;
mod substitution;

pub use cut_project::{
    ammann_beenker_scheme, fibonacci_scheme, generate_cut_and_project, AcceptanceWindow,
    CutAndProjectScheme, GeneratedCutAndProject,
};
pub use decorate::{decorate, DecorationRule};
pub use lattice::generate_lattice;
pub use substitution::{generate_substitution_1d, SubstitutionRule1D};

/// The golden mean.
pub const PHI: f64 = 1.618_033_988_749_895;

/// The silver mean `1 + √2`.
pub const SILVER: f64 = 2.414_213_562_373_095;
