//! Cascading failure analysis for interdependent infrastructure networks.
//!
//! Entities (power-grid and communication assets, typically) are tied
//! together by dependency rules in two-level disjunctive normal form. From a
//! set of initial failures the cascade spreads in synchronous steps until it
//! reaches a fixed point. On top of that model the crate provides:
//!
//! - exact and heuristic planners for hardening under a budget
//!   ([`exact::solve_enh_exact`], [`heuristic::solve_enh_heuristic`]),
//! - exact and heuristic planners for keeping a priority set alive
//!   ([`exact::solve_teh_exact`], [`heuristic::solve_teh_heuristic`]),
//! - polynomial special-case solvers for restricted rule shapes
//!   ([`restricted`]),
//! - an integer-program export of both problems ([`ilp`]),
//! - generators for power-grid, geospatial-interdependency, and random
//!   systems ([`gen`]),
//! - a benchmark harness comparing solvers on the same instances
//!   ([`bench`]).

pub mod bench;
pub mod cascade;
pub mod cli;
pub mod error;
pub mod exact;
pub mod gen;
pub mod heuristic;
pub mod ilp;
pub mod instance;
pub mod metrics;
pub mod restricted;
pub mod system;

pub use error::{Error, Result};
