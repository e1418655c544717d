//! Parallel randomized computation of graph automorphism groups.
//!
//! The solver samples random root-to-leaf walks of an
//! individualization-refinement search tree, turns pairs of equivalent
//! leaves into automorphisms, and sifts them into a shared Schreier
//! structure. It stops once enough consecutive uniformly sampled
//! automorphisms are already covered, which bounds the probability of
//! missing generators by a user-chosen error. Every returned generator is
//! certified, so errors are one-sided.

pub mod coloring;
pub mod error;
pub mod families;
pub mod graph;
pub mod oracle;
pub mod perm;
pub mod refine;
pub mod schreier;
pub mod solver;
pub mod tree;

pub use coloring::Coloring;
pub use error::{ContractViolation, OracleError, ParseError, PermutationError};
pub use graph::ColoredGraph;
pub use perm::Permutation;
pub use solver::{solve, SolverOptions, SolverResult, Termination};
