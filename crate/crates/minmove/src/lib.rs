//! Societies, moves, and Presburger-arithmetic winning conditions.
//!
//! The crate models manipulation problems (bribery, control, lobbying) as
//! *Minimum Move* instances: a society is a vector of people counts per type,
//! a move shifts people between types at metric per-edge prices, and a winning
//! condition is a bounded Presburger-arithmetic formula over the society.
//!
//! Modules:
//! - [`pa`] — formula representation, parsing, printing, normalization.
//! - [`ilp`] — conjunctive integer systems over boxes, big-M disjunction
//!   flattening, and a branch-and-bound feasibility/optimization solver.
//! - [`quant`] — decision of bounded quantified sentences (depth ≤ 2 fast
//!   path, recursion above) and deterministic witness extraction.
//! - [`society`] — societies, moves, changes, move-costs vectors and the
//!   constraint builders over them.
//! - [`election`] — elections and referenda as societies; Condorcet, Dodgson,
//!   Young, Dodgson′ and lobbying condition builders.
//! - [`solve`] — the Minimum Move optimizer, the quantifier-free fast path
//!   with type reduction, score/bribery drivers, robust/resilient variants.
//! - [`oracle`] — independent brute-force references used by tests and the
//!   CLI's `--oracle` mode.

pub mod election;
pub mod error;
pub mod ilp;
pub mod oracle;
pub mod pa;
pub mod par;
pub mod society;
pub mod solve;
pub mod quant;

pub use error::{Error, Result};
