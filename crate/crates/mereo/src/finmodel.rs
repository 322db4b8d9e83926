//! The canonical concrete model: finite subsets of the naturals under
//! inclusion, with bounded-search formula evaluation. This is the
//! independent oracle against which the elimination engine is checked; it
//! shares no code with the elimination pipeline.

use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::engine::witness_bound;
use crate::formula::{Formula, Term};

/// Largest per-quantifier search support; beyond this the brute-force
/// search is refused rather than left to run away.
pub const MAX_SUPPORT: usize = 24;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum FinModelError {
    #[error("variable '{0}' is not bound by the assignment")]
    UnboundVariable(String),
    #[error("search support of {size} elements exceeds the limit of {limit}")]
    SupportTooLarge { size: usize, limit: usize },
}

/// A finite set of naturals, kept sorted and duplicate-free.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FinSet(Vec<u32>);

impl FinSet {
    pub fn new(mut elements: Vec<u32>) -> Self {
        elements.sort_unstable();
        elements.dedup();
        FinSet(elements)
    }

    pub fn empty() -> Self {
        FinSet(Vec::new())
    }

    pub fn elements(&self) -> &[u32] {
        &self.0
    }

    pub fn card(&self) -> u64 {
        self.0.len() as u64
    }

    pub fn contains(&self, n: u32) -> bool {
        self.0.binary_search(&n).is_ok()
    }

    pub fn union(&self, other: &FinSet) -> FinSet {
        let mut out = self.0.clone();
        out.extend_from_slice(&other.0);
        FinSet::new(out)
    }

    pub fn intersection(&self, other: &FinSet) -> FinSet {
        FinSet(self.0.iter().copied().filter(|n| other.contains(*n)).collect())
    }

    pub fn difference(&self, other: &FinSet) -> FinSet {
        FinSet(self.0.iter().copied().filter(|n| !other.contains(*n)).collect())
    }

    pub fn is_subset(&self, other: &FinSet) -> bool {
        self.0.iter().all(|n| other.contains(*n))
    }
}

impl FromIterator<u32> for FinSet {
    fn from_iter<I: IntoIterator<Item = u32>>(iter: I) -> Self {
        FinSet::new(iter.into_iter().collect())
    }
}

impl fmt::Display for FinSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, n) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{n}")?;
        }
        write!(f, "}}")
    }
}

/// Finite map from variables to sets.
pub type Assignment = BTreeMap<String, FinSet>;

/// Evaluates a term in the finite-subset model: meet is intersection, join
/// is union, relative complement is set difference, and `0` is the empty
/// set.
pub fn eval_term(t: &Term, a: &Assignment) -> Result<FinSet, FinModelError> {
    match t {
        Term::Var(name) => {
            a.get(name).cloned().ok_or_else(|| FinModelError::UnboundVariable(name.clone()))
        }
        Term::Zero => Ok(FinSet::empty()),
        Term::Meet(l, r) => Ok(eval_term(l, a)?.intersection(&eval_term(r, a)?)),
        Term::Join(l, r) => Ok(eval_term(l, a)?.union(&eval_term(r, a)?)),
        Term::Diff(l, r) => Ok(eval_term(l, a)?.difference(&eval_term(r, a)?)),
    }
}

/// Evaluates a formula by bounded search. A quantifier over `x` searches
/// all subsets of `S ∪ F`, where `S` is the union of every set in scope
/// (the assignment plus the sets bound by enclosing quantifiers along the
/// current branch) and `F` is the `fresh_budget` smallest naturals outside
/// `S`. Truth of an existential is monotone in `fresh_budget`.
pub fn eval_formula(
    f: &Formula,
    a: &Assignment,
    fresh_budget: u32,
) -> Result<bool, FinModelError> {
    for v in f.free_variables() {
        if !a.contains_key(&v) {
            return Err(FinModelError::UnboundVariable(v));
        }
    }
    let depth = f.quantifier_depth();

    // Global pool: every natural a bounded search below `f` can touch. The
    // fresh atoms chosen at any nesting level are always among the
    // `fresh_budget * depth` smallest naturals outside the assignment.
    let mut pool: Vec<u32> = Vec::new();
    for set in a.values() {
        pool.extend_from_slice(set.elements());
    }
    pool.sort_unstable();
    pool.dedup();
    let assigned = pool.clone();
    let wanted = (fresh_budget as u64).saturating_mul(depth as u64);
    let mut candidate = 0u32;
    let mut added = 0u64;
    while added < wanted {
        if !assigned.binary_search(&candidate).is_ok() {
            pool.push(candidate);
            added += 1;
        }
        candidate = candidate.checked_add(1).expect("pool stays small");
    }
    pool.sort_unstable();
    if pool.len() > 64 {
        return Err(FinModelError::SupportTooLarge { size: pool.len(), limit: 64 });
    }

    // Everything below runs on bitmasks over the pool.
    let to_mask = |s: &FinSet| -> u64 {
        let mut m = 0u64;
        for n in s.elements() {
            let idx = pool.binary_search(n).expect("pool covers the assignment");
            m |= 1 << idx;
        }
        m
    };
    let mut env: Vec<(String, u64)> = a.iter().map(|(k, v)| (k.clone(), to_mask(v))).collect();
    eval_masks(f, &mut env, &pool, fresh_budget)
}

fn term_mask(t: &Term, env: &[(String, u64)]) -> u64 {
    match t {
        Term::Var(name) => {
            // Innermost binding wins.
            env.iter()
                .rev()
                .find(|(v, _)| v == name)
                .map(|(_, m)| *m)
                .expect("free variables are bound")
        }
        Term::Zero => 0,
        Term::Meet(l, r) => term_mask(l, env) & term_mask(r, env),
        Term::Join(l, r) => term_mask(l, env) | term_mask(r, env),
        Term::Diff(l, r) => term_mask(l, env) & !term_mask(r, env),
    }
}

fn eval_masks(
    f: &Formula,
    env: &mut Vec<(String, u64)>,
    pool: &[u32],
    fresh_budget: u32,
) -> Result<bool, FinModelError> {
    match f {
        Formula::Sub(s, t) => Ok(term_mask(s, env) & !term_mask(t, env) == 0),
        Formula::Eq(s, t) => Ok(term_mask(s, env) == term_mask(t, env)),
        Formula::CardEq(t, n) => Ok(u64::from(term_mask(t, env).count_ones()) == *n),
        Formula::CardGeq(t, n) => Ok(u64::from(term_mask(t, env).count_ones()) >= *n),
        Formula::Not(g) => Ok(!eval_masks(g, env, pool, fresh_budget)?),
        Formula::And(l, r) => {
            Ok(eval_masks(l, env, pool, fresh_budget)? && eval_masks(r, env, pool, fresh_budget)?)
        }
        Formula::Or(l, r) => {
            Ok(eval_masks(l, env, pool, fresh_budget)? || eval_masks(r, env, pool, fresh_budget)?)
        }
        Formula::Implies(l, r) => {
            Ok(!eval_masks(l, env, pool, fresh_budget)? || eval_masks(r, env, pool, fresh_budget)?)
        }
        Formula::Iff(l, r) => {
            Ok(eval_masks(l, env, pool, fresh_budget)? == eval_masks(r, env, pool, fresh_budget)?)
        }
        Formula::Exists(v, body) => search(v, body, false, env, pool, fresh_budget),
        Formula::Forall(v, body) => search(v, body, true, env, pool, fresh_budget),
    }
}

fn search(
    var: &str,
    body: &Formula,
    universal: bool,
    env: &mut Vec<(String, u64)>,
    pool: &[u32],
    fresh_budget: u32,
) -> Result<bool, FinModelError> {
    let scope: u64 = env.iter().fold(0, |acc, (_, m)| acc | m);
    // Fresh atoms: the smallest pool naturals outside the current scope.
    let mut fresh: u64 = 0;
    let mut picked = 0;
    for idx in 0..pool.len() {
        if picked == fresh_budget {
            break;
        }
        if scope & (1 << idx) == 0 {
            fresh |= 1 << idx;
            picked += 1;
        }
    }
    let support = scope | fresh;
    let size = support.count_ones() as usize;
    if size > MAX_SUPPORT {
        return Err(FinModelError::SupportTooLarge { size, limit: MAX_SUPPORT });
    }
    // Standard submask walk; includes the empty set.
    let mut candidate = support;
    loop {
        env.push((var.to_string(), candidate));
        let inner = eval_masks(body, env, pool, fresh_budget);
        env.pop();
        let inner = inner?;
        if inner != universal {
            // A witness for E, a counterexample for A.
            return Ok(!universal);
        }
        if candidate == 0 {
            break;
        }
        candidate = (candidate - 1) & support;
    }
    Ok(universal)
}

/// Result of a randomized equivalence check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EquivalenceOutcome {
    Pass,
    Counterexample { assignment: Assignment, left: bool, right: bool },
}

impl EquivalenceOutcome {
    pub fn passed(&self) -> bool {
        matches!(self, EquivalenceOutcome::Pass)
    }
}

/// Compares `f` and `g` on `sample_count` random assignments of subsets of
/// `{0 .. universe_size-1}`, evaluating both with a fresh budget of
/// `max(witness_bound(f), witness_bound(g))`. Each element enters each set
/// independently with probability 1/2; the sampler is deterministic per
/// seed. Returns the first distinguishing assignment, if any.
pub fn check_equivalence(
    f: &Formula,
    g: &Formula,
    sample_count: u32,
    universe_size: u32,
    seed: u64,
) -> Result<EquivalenceOutcome, FinModelError> {
    let mut vars = f.free_variables();
    for v in g.free_variables() {
        if !vars.contains(&v) {
            vars.push(v);
        }
    }
    let budget = witness_bound(f).max(witness_bound(g));
    let budget = u32::try_from(budget).unwrap_or(u32::MAX);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..sample_count {
        let mut assignment = Assignment::new();
        for v in &vars {
            let set: FinSet = (0..universe_size).filter(|_| rng.gen_bool(0.5)).collect();
            assignment.insert(v.clone(), set);
        }
        let left = eval_formula(f, &assignment, budget)?;
        let right = eval_formula(g, &assignment, budget)?;
        if left != right {
            return Ok(EquivalenceOutcome::Counterexample { assignment, left, right });
        }
    }
    Ok(EquivalenceOutcome::Pass)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;

    fn set(elems: &[u32]) -> FinSet {
        FinSet::new(elems.to_vec())
    }

    fn assign(pairs: &[(&str, &[u32])]) -> Assignment {
        pairs.iter().map(|(v, e)| (v.to_string(), set(e))).collect()
    }

    #[test]
    fn term_evaluation() {
        let a = assign(&[("x", &[1, 2]), ("y", &[2, 3])]);
        let meet = crate::formula::parse_term("x * y").unwrap();
        let diff = crate::formula::parse_term("x - y").unwrap();
        assert_eq!(eval_term(&meet, &a).unwrap(), set(&[2]));
        assert_eq!(eval_term(&diff, &a).unwrap(), set(&[1]));
        assert_eq!(eval_term(&Term::Zero, &a).unwrap(), FinSet::empty());
    }

    #[test]
    fn unbound_variable_is_reported() {
        let t = crate::formula::parse_term("x * y").unwrap();
        let err = eval_term(&t, &assign(&[("x", &[1])])).unwrap_err();
        assert_eq!(err, FinModelError::UnboundVariable("y".into()));
    }

    #[test]
    fn existential_uses_fresh_atoms() {
        let f = parse("E x. card(x) = 2").unwrap();
        assert!(eval_formula(&f, &Assignment::new(), 3).unwrap());
        // Not enough fresh material: no 2-element candidate exists.
        assert!(!eval_formula(&f, &Assignment::new(), 1).unwrap());
    }

    #[test]
    fn least_element_law() {
        let f = parse("A x. sub(0, x)").unwrap();
        assert!(eval_formula(&f, &Assignment::new(), 2).unwrap());
        assert!(eval_formula(&f, &assign(&[]), 0).unwrap());
    }

    #[test]
    fn split_witness_found_by_search() {
        let f = parse("E x. (card(x * c) >= 1 & card(c - x) >= 1)").unwrap();
        let a = assign(&[("c", &[5, 9])]);
        assert!(eval_formula(&f, &a, 2).unwrap());
        // And a singleton c cannot be split.
        let b = assign(&[("c", &[5])]);
        assert!(!eval_formula(&f, &b, 2).unwrap());
    }

    #[test]
    fn equivalence_of_sub_and_card_zero() {
        let f = parse("sub(a, b)").unwrap();
        let g = parse("card(a - b) = 0").unwrap();
        assert!(check_equivalence(&f, &g, 64, 6, 7).unwrap().passed());
    }

    #[test]
    fn inequivalent_formulas_yield_counterexample() {
        let f = parse("card(x) = 1").unwrap();
        let g = parse("card(x) = 2").unwrap();
        match check_equivalence(&f, &g, 200, 4, 11).unwrap() {
            EquivalenceOutcome::Counterexample { assignment, left, right } => {
                let n = assignment["x"].card();
                assert!(n == 1 || n == 2, "x = {}", assignment["x"]);
                assert_ne!(left, right);
            }
            EquivalenceOutcome::Pass => panic!("expected a counterexample"),
        }
    }

    #[test]
    fn sampler_is_deterministic() {
        let f = parse("card(x) = 1").unwrap();
        let g = parse("card(x) = 2").unwrap();
        let a = check_equivalence(&f, &g, 50, 8, 3).unwrap();
        let b = check_equivalence(&f, &g, 50, 8, 3).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn support_guard_refuses_oversized_searches() {
        let f = parse("E x. card(x) = 1").unwrap();
        let a = assign(&[("y", &(0..30).collect::<Vec<_>>())]);
        let err = eval_formula(&f, &a, 1).unwrap_err();
        assert!(matches!(err, FinModelError::SupportTooLarge { .. }));
    }

    #[test]
    fn existential_truth_is_monotone_in_fresh_budget() {
        // Positive existential formulas only: once true, more fresh
        // material cannot make them false.
        let samples = [
            "E x. card(x) = 3",
            "E x. (card(x * c) >= 1 & card(x - c) >= 2)",
            "E x. E y. (card(x) = 1 & card(y - x) >= 1)",
            "E x. (card(x) >= 2 | card(x * c) = 1)",
        ];
        let a = assign(&[("c", &[0, 3])]);
        for text in samples {
            let f = parse(text).unwrap();
            for b in 0..5u32 {
                let now = eval_formula(&f, &a, b).unwrap();
                let later = eval_formula(&f, &a, b + 1).unwrap();
                assert!(!now || later, "{text} regressed between budgets {b} and {}", b + 1);
            }
        }
    }
}
