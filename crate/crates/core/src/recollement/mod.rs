//! Condition checkers, the six-functor construction, axiom verification.

pub mod build_tree;
pub mod builtins;
pub mod conditions;
pub mod data;
pub mod functors;
pub mod maps;
pub mod predicates;
pub mod replay;
pub mod testset;
pub mod verify;

pub use build_tree::{search_build_tree, BuildStep, BuildTree, Leaf};
pub use conditions::{
    check_b_in_cperp, check_compact, check_conditions, check_joint_perp_zero, check_selfcompact, ConditionReport,
    Hints, JointStrategy, Status,
};
pub use data::{build_recollement, JLowerModel, RecollementData, RecoveryWitness};
pub use functors::{evaluate_functor, Functor};
pub use predicates::{main2_predicates, perp_membership, MembershipVector, PerpRoute};
pub use replay::{replay_conditions, ReplayLine};
pub use testset::{generate_testset, TestObject, Testset};
pub use verify::{keller_reduction_check, verify_recollement, CheckRecord, Scorecard};
