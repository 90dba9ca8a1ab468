//! Local-derivation factor maps, preimage counting, and the family and
//! relation matrices used to compare factors of a linearly repetitive set.

mod fibers;
mod harness;
mod rule;

pub use fibers::{check_sliding_block, fiber_class_count, FiberCount};
pub use harness::{
    build_family_F, compare_relations, relation_Ri, run_theorem_harness, Family, HarnessReport, MagnitudeNote,
    RelationMatrix, TheoremHarnessConfig,
};
pub use rule::{apply_rule, LocalDerivationRule, RuleEntry, RuleFile, RuleImage};
