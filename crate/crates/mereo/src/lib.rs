//! Decision procedure for the first-order theory of set inclusion — the
//! theory of an atomic unbounded relatively complemented distributive
//! lattice — via quantifier elimination, together with an independent
//! brute-force oracle over finite subsets of the naturals and a bounded
//! laboratory for hereditarily finite sets.
//!
//! - [`formula`]: terms, formulas, parser, printer.
//! - [`engine`]: the elimination pipeline, `decide`, trace.
//! - [`finmodel`]: the finite-subset model and bounded-search evaluation.
//! - [`hfsets`]: rank-bounded verification of the inclusion-automorphism
//!   and singleton-interdefinability constructions.
//! - [`generator`]: seeded random formulas for the comparison suites.

pub mod engine;
pub mod finmodel;
pub mod formula;
pub mod generator;
pub mod hfsets;

pub use engine::{decide, eliminate, Decision, EngineConfig, EngineError};
pub use formula::{parse, render, Formula, Term};
