//! Quantifier elimination for the theory of atomic unbounded relatively
//! complemented distributive lattices, and the decision procedure built on
//! top of it.
//!
//! The pipeline rewrites each innermost existential quantifier in stages:
//! order atoms become size atoms, negations are expanded into positive
//! size assertions, terms mentioning the bound variable are split into
//! disjoint Venn cells, size assertions about cell unions are distributed
//! over compositions, the matrix is put in disjunctive normal form, and
//! each disjunct is collapsed into size requirements on the base cells.
//! Sentences reduce to ground size assertions about `0`, which evaluate
//! directly.

mod cells;
mod normal;
mod qe;
mod trace;

pub use cells::{
    binary_union_size, cellify, rewrite_union_sizes, CellConstraintSystem, CellSlots, CellTerm,
    SizeConstraint, SlotState,
};
pub use normal::{normalize_atoms, positivize};
pub use qe::{decide, eliminate, eliminate_exists, eliminate_traced, eval_ground, Decision};
pub use trace::{EliminationTrace, Stage, TraceEntry};

use thiserror::Error;

use crate::formula::{parse, Formula, Term};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum EngineError {
    /// The elimination would materialize more nodes than the configured cap.
    #[error("node budget exceeded (max {max} nodes)")]
    BudgetExceeded { max: u64 },
    #[error("cardinality constant overflowed during elimination")]
    ConstantOverflow,
    #[error("not a sentence: free variables {0:?}")]
    NotASentence(Vec<String>),
    #[error("formula is not ground: {0}")]
    NotGround(String),
    #[error("term variable '{0}' does not occur in the cell variable list")]
    VariableNotInCellList(String),
    #[error("cell variable list has {0} variables; at most 31 are supported")]
    TooManyCellVariables(usize),
    #[error("conjunct is not a single-cell cardinality atom over the bound variable: {0}")]
    UnsupportedCellAtom(String),
}

/// Elimination resource limits.
#[derive(Debug, Clone)]
pub struct EngineConfig {
    /// Cap on nodes materialized across intermediate formulas.
    pub max_nodes: u64,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig { max_nodes: 1_000_000 }
    }
}

/// Running node counter for one elimination. Exceeding the cap yields an
/// explicit error, never a wrong verdict.
#[derive(Debug)]
pub struct NodeBudget {
    used: u64,
    max: u64,
}

impl NodeBudget {
    pub fn new(max: u64) -> Self {
        NodeBudget { used: 0, max }
    }

    pub fn used(&self) -> u64 {
        self.used
    }

    pub fn charge(&mut self, n: u64) -> Result<(), EngineError> {
        self.used = self.used.saturating_add(n);
        if self.used > self.max {
            Err(EngineError::BudgetExceeded { max: self.max })
        } else {
            Ok(())
        }
    }
}

/// Canonical true literal `card(0) = 0`. The equality-based `0 = 0` of the
/// quantifier-free target would be removed again by atom normalization, so
/// the canonical pair is expressed with size atoms.
pub fn true_literal() -> Formula {
    Formula::CardEq(Term::Zero, 0)
}

/// Canonical false literal `card(0) >= 1`.
pub fn false_literal() -> Formula {
    Formula::CardGeq(Term::Zero, 1)
}

pub fn is_true_literal(f: &Formula) -> bool {
    *f == true_literal()
}

pub fn is_false_literal(f: &Formula) -> bool {
    *f == false_literal()
}

/// Support size that makes bounded search in the finite-subset model agree
/// with truth over the theory: the sum of all numeric constants, plus one
/// per cardinality atom (`sub` counts once and `eq` twice, matching their
/// normalized forms), plus one fresh atom per quantifier.
pub fn witness_bound(f: &Formula) -> u64 {
    match f {
        Formula::Sub(..) => 1,
        Formula::Eq(..) => 2,
        Formula::CardEq(_, n) | Formula::CardGeq(_, n) => n.saturating_add(1),
        Formula::Not(g) => witness_bound(g),
        Formula::And(l, r) | Formula::Or(l, r) | Formula::Implies(l, r) | Formula::Iff(l, r) => {
            witness_bound(l).saturating_add(witness_bound(r))
        }
        Formula::Exists(_, g) | Formula::Forall(_, g) => witness_bound(g).saturating_add(1),
    }
}

/// Flattens, sorts and deduplicates conjunctions and disjunctions, drops
/// neutral literals, and collapses double negation. Structural equality of
/// canonicalized formulas is the equality used by the golden tests.
pub fn canonicalize(f: &Formula) -> Formula {
    match f {
        Formula::Sub(..) | Formula::Eq(..) | Formula::CardEq(..) | Formula::CardGeq(..) => {
            f.clone()
        }
        Formula::Not(g) => {
            let g = canonicalize(g);
            if is_true_literal(&g) {
                false_literal()
            } else if is_false_literal(&g) {
                true_literal()
            } else if let Formula::Not(inner) = g {
                *inner
            } else {
                Formula::not(g)
            }
        }
        Formula::And(..) => {
            let mut parts = Vec::new();
            collect_juncts(f, true, &mut parts);
            parts.sort();
            parts.dedup();
            parts.retain(|p| !is_true_literal(p));
            if parts.iter().any(is_false_literal) {
                return false_literal();
            }
            Formula::and_all(parts).unwrap_or_else(true_literal)
        }
        Formula::Or(..) => {
            let mut parts = Vec::new();
            collect_juncts(f, false, &mut parts);
            parts.sort();
            parts.dedup();
            parts.retain(|p| !is_false_literal(p));
            if parts.iter().any(is_true_literal) {
                return true_literal();
            }
            Formula::or_all(parts).unwrap_or_else(false_literal)
        }
        Formula::Implies(l, r) => Formula::implies(canonicalize(l), canonicalize(r)),
        Formula::Iff(l, r) => Formula::iff(canonicalize(l), canonicalize(r)),
        Formula::Exists(v, b) => Formula::exists(v.clone(), canonicalize(b)),
        Formula::Forall(v, b) => Formula::forall(v.clone(), canonicalize(b)),
    }
}

fn collect_juncts(f: &Formula, conj: bool, out: &mut Vec<Formula>) {
    match (f, conj) {
        (Formula::And(l, r), true) | (Formula::Or(l, r), false) => {
            collect_juncts(l, conj, out);
            collect_juncts(r, conj, out);
        }
        _ => out.push(canonicalize(f)),
    }
}

/// The axioms of an atomic unbounded relatively complemented distributive
/// lattice. `decide` proves every one of them.
pub fn theory_axioms() -> Vec<(&'static str, Formula)> {
    const AXIOMS: &[(&str, &str)] = &[
        ("reflexivity", "A x. sub(x, x)"),
        ("antisymmetry", "A x. A y. ((sub(x, y) & sub(y, x)) -> eq(x, y))"),
        ("transitivity", "A x. A y. A z. ((sub(x, y) & sub(y, z)) -> sub(x, z))"),
        (
            "meet-is-glb",
            "A x. A y. (sub(x * y, x) & sub(x * y, y) & (A z. ((sub(z, x) & sub(z, y)) -> sub(z, x * y))))",
        ),
        (
            "join-is-lub",
            "A x. A y. (sub(x, x + y) & sub(y, x + y) & (A z. ((sub(x, z) & sub(y, z)) -> sub(x + y, z))))",
        ),
        ("meet-distributes", "A x. A y. A z. eq(x * (y + z), (x * y) + (x * z))"),
        ("join-distributes", "A x. A y. A z. eq(x + (y * z), (x + y) * (x + z))"),
        ("least-element", "A x. sub(0, x)"),
        ("no-greatest-element", "A x. E y. (sub(x, y) & !eq(x, y))"),
        ("relative-complement-disjoint", "A x. A y. eq(y * (x - y), 0)"),
        ("relative-complement-covers", "A x. A y. eq(x, (x * y) + (x - y))"),
        ("atomicity", "A x. (card(x) >= 1 -> (E a. (atom(a) & sub(a, x))))"),
    ];
    AXIOMS
        .iter()
        .map(|(name, text)| (*name, parse(text).expect("axiom text parses")))
        .collect()
}
