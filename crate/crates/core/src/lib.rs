//! Logical consensus toolkit.
//!
//! Agents in a network each measure a subset of Boolean input events and
//! exchange bits with their neighbours. This crate
//!
//! * analyses finite Boolean iteration maps for fixed points, local
//!   attractiveness and global convergence ([`map`], [`matrix`]);
//! * computes which agents an input can reach through the communication
//!   graph, optionally with redundancy ([`reachability`]);
//! * synthesises the message- and round-optimal linear consensus rule
//!   ([`linear`]) and a majority-based rule tolerating `γ` permanently faulty
//!   agents ([`robust`]);
//! * simulates the resulting networks with output maps and fault injection
//!   ([`simulator`]).
//!
//! Indices are 0-based throughout the API. The textual expression syntax in
//! [`expr`] uses 1-based names (`x1`, `u1`).

pub mod bits;
pub mod error;
pub mod expr;
pub mod linear;
pub mod map;
pub mod matrix;
pub mod reachability;
pub mod robust;
pub mod simulator;

pub use bits::BoolVec;
pub use error::{Error, Result};
pub use expr::{parse_decision, parse_expr, BoolExpr, Var};
pub use linear::{synthesize_linear, LinearSystem};
pub use map::BoolMap;
pub use matrix::BoolMat;
pub use reachability::{
    analyze, is_reachable, r_reachable, r_reachable_set, reachability_matrix, NetworkSpec,
    ReachabilityReport,
};
pub use robust::{synthesize_robust, RobustRule, RobustSystem};
pub use simulator::{
    build_output_maps, check_fault_tolerance, disagreement, disagreement_over, run, step, Chi,
    ConsensusRule, ConsensusSystem, DecisionSystem, FaultModel, PackedRule, SimTrace,
};
