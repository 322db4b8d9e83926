//! Term and formula languages for inclusion-based mereology.
//!
//! Terms are lattice terms over variables, the constant `0`, meet (`*`),
//! join (`+`) and relative complement (`-`). Atomic formulas are the order
//! atoms `sub(s, t)` and `eq(s, t)` and the size atoms `card(t) = n` and
//! `card(t) >= n`; formulas close these under the Boolean connectives and
//! the quantifiers `E` / `A`.

mod parse;
mod print;

pub use parse::{parse, parse_term, ParseError};

use std::fmt;

/// A lattice term.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(String),
    Zero,
    Meet(Box<Term>, Box<Term>),
    Join(Box<Term>, Box<Term>),
    Diff(Box<Term>, Box<Term>),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Self {
        Term::Var(name.into())
    }

    pub fn meet(left: Term, right: Term) -> Self {
        Term::Meet(Box::new(left), Box::new(right))
    }

    pub fn join(left: Term, right: Term) -> Self {
        Term::Join(Box::new(left), Box::new(right))
    }

    pub fn diff(left: Term, right: Term) -> Self {
        Term::Diff(Box::new(left), Box::new(right))
    }

    /// Variables of the term in first-occurrence order, duplicate-free.
    pub fn variables(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_variables(&mut out);
        out
    }

    fn collect_variables(&self, out: &mut Vec<String>) {
        match self {
            Term::Var(name) => {
                if !out.iter().any(|v| v == name) {
                    out.push(name.clone());
                }
            }
            Term::Zero => {}
            Term::Meet(l, r) | Term::Join(l, r) | Term::Diff(l, r) => {
                l.collect_variables(out);
                r.collect_variables(out);
            }
        }
    }

    pub fn mentions(&self, var: &str) -> bool {
        match self {
            Term::Var(name) => name == var,
            Term::Zero => false,
            Term::Meet(l, r) | Term::Join(l, r) | Term::Diff(l, r) => {
                l.mentions(var) || r.mentions(var)
            }
        }
    }

    pub fn node_count(&self) -> u64 {
        match self {
            Term::Var(_) | Term::Zero => 1,
            Term::Meet(l, r) | Term::Join(l, r) | Term::Diff(l, r) => {
                1 + l.node_count() + r.node_count()
            }
        }
    }
}

/// A first-order formula over the lattice signature with size atoms.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    /// `sub(s, t)` — s is included in t.
    Sub(Term, Term),
    /// `eq(s, t)` — s and t denote the same element.
    Eq(Term, Term),
    /// `card(t) = n` — t is the join of exactly n atoms.
    CardEq(Term, u64),
    /// `card(t) >= n` — t splits into n disjoint nonzero pieces.
    CardGeq(Term, u64),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Exists(String, Box<Formula>),
    Forall(String, Box<Formula>),
}

impl Formula {
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(l: Formula, r: Formula) -> Self {
        Formula::And(Box::new(l), Box::new(r))
    }

    pub fn or(l: Formula, r: Formula) -> Self {
        Formula::Or(Box::new(l), Box::new(r))
    }

    pub fn implies(l: Formula, r: Formula) -> Self {
        Formula::Implies(Box::new(l), Box::new(r))
    }

    pub fn iff(l: Formula, r: Formula) -> Self {
        Formula::Iff(Box::new(l), Box::new(r))
    }

    pub fn exists(var: impl Into<String>, body: Formula) -> Self {
        Formula::Exists(var.into(), Box::new(body))
    }

    pub fn forall(var: impl Into<String>, body: Formula) -> Self {
        Formula::Forall(var.into(), Box::new(body))
    }

    /// Left-fold a nonempty sequence into a conjunction.
    pub fn and_all(mut parts: Vec<Formula>) -> Option<Formula> {
        if parts.is_empty() {
            return None;
        }
        let mut acc = parts.remove(0);
        for p in parts {
            acc = Formula::and(acc, p);
        }
        Some(acc)
    }

    /// Left-fold a nonempty sequence into a disjunction.
    pub fn or_all(mut parts: Vec<Formula>) -> Option<Formula> {
        if parts.is_empty() {
            return None;
        }
        let mut acc = parts.remove(0);
        for p in parts {
            acc = Formula::or(acc, p);
        }
        Some(acc)
    }

    pub fn is_atom(&self) -> bool {
        matches!(
            self,
            Formula::Sub(..) | Formula::Eq(..) | Formula::CardEq(..) | Formula::CardGeq(..)
        )
    }

    pub fn is_quantifier_free(&self) -> bool {
        match self {
            Formula::Exists(..) | Formula::Forall(..) => false,
            f if f.is_atom() => true,
            Formula::Not(f) => f.is_quantifier_free(),
            Formula::And(l, r)
            | Formula::Or(l, r)
            | Formula::Implies(l, r)
            | Formula::Iff(l, r) => l.is_quantifier_free() && r.is_quantifier_free(),
            _ => unreachable!(),
        }
    }

    /// Free variables in first-occurrence order, duplicate-free.
    pub fn free_variables(&self) -> Vec<String> {
        let mut out = Vec::new();
        let mut bound = Vec::new();
        self.collect_free(&mut bound, &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut Vec<String>) {
        let visit_term = |t: &Term, bound: &Vec<String>, out: &mut Vec<String>| {
            for v in t.variables() {
                if !bound.contains(&v) && !out.contains(&v) {
                    out.push(v);
                }
            }
        };
        match self {
            Formula::Sub(s, t) | Formula::Eq(s, t) => {
                visit_term(s, bound, out);
                visit_term(t, bound, out);
            }
            Formula::CardEq(t, _) | Formula::CardGeq(t, _) => visit_term(t, bound, out),
            Formula::Not(f) => f.collect_free(bound, out),
            Formula::And(l, r)
            | Formula::Or(l, r)
            | Formula::Implies(l, r)
            | Formula::Iff(l, r) => {
                l.collect_free(bound, out);
                r.collect_free(bound, out);
            }
            Formula::Exists(v, body) | Formula::Forall(v, body) => {
                bound.push(v.clone());
                body.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    /// True when the formula is a sentence (no free variables).
    pub fn is_sentence(&self) -> bool {
        self.free_variables().is_empty()
    }

    /// Total node count over the formula tree including term nodes.
    pub fn node_count(&self) -> u64 {
        match self {
            Formula::Sub(s, t) | Formula::Eq(s, t) => 1 + s.node_count() + t.node_count(),
            Formula::CardEq(t, _) | Formula::CardGeq(t, _) => 1 + t.node_count(),
            Formula::Not(f) => 1 + f.node_count(),
            Formula::And(l, r)
            | Formula::Or(l, r)
            | Formula::Implies(l, r)
            | Formula::Iff(l, r) => 1 + l.node_count() + r.node_count(),
            Formula::Exists(_, f) | Formula::Forall(_, f) => 1 + f.node_count(),
        }
    }

    /// Maximum quantifier nesting depth.
    pub fn quantifier_depth(&self) -> u32 {
        match self {
            f if f.is_atom() => 0,
            Formula::Not(f) => f.quantifier_depth(),
            Formula::And(l, r)
            | Formula::Or(l, r)
            | Formula::Implies(l, r)
            | Formula::Iff(l, r) => l.quantifier_depth().max(r.quantifier_depth()),
            Formula::Exists(_, f) | Formula::Forall(_, f) => 1 + f.quantifier_depth(),
            _ => unreachable!(),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        print::fmt_term(self, f)
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        print::fmt_formula(self, f)
    }
}

/// Renders a formula in the surface syntax. `parse(render(f))` returns a
/// formula structurally equal to `f`.
pub fn render(f: &Formula) -> String {
    f.to_string()
}

#[cfg(test)]
mod tests;
