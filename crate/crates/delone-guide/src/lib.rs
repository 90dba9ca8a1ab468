//! The book chapters as modules, so `cargo test` runs their code.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/point-sets.md")]
pub mod point_sets {}
#[doc = include_str!("../../../book/src/atlases.md")]
pub mod atlases {}
#[doc = include_str!("../../../book/src/voronoi.md")]
pub mod voronoi {}
#[doc = include_str!("../../../book/src/repetitivity.md")]
pub mod repetitivity {}
#[doc = include_str!("../../../book/src/metric.md")]
pub mod metric {}
#[doc = include_str!("../../../book/src/derivations.md")]
pub mod derivations {}
#[doc = include_str!("../../../book/src/harness.md")]
pub mod harness {}
#[doc = include_str!("../../../book/src/verification.md")]
pub mod verification {}
