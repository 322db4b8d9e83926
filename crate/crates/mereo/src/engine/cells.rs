//! Venn cells, size constraints, and the cellwise rewriting rules.

use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::formula::{Formula, Term};

use super::{false_literal, true_literal, EngineError, NodeBudget};

/// One cell of the Venn diagram over an ordered variable list: the meet of
/// the variables in `positives` minus the join of the rest. At least one
/// variable is positive; the all-negative exterior is not a lattice element.
/// Distinct cells over the same list denote disjoint elements.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CellTerm {
    vars: Arc<[String]>,
    positives: u32,
}

impl CellTerm {
    pub fn new(vars: Arc<[String]>, positives: u32) -> Result<Self, EngineError> {
        if vars.len() > 31 {
            return Err(EngineError::TooManyCellVariables(vars.len()));
        }
        let space = (1u32 << vars.len()).wrapping_sub(1);
        assert!(
            positives != 0 && positives & !space == 0,
            "a cell needs at least one positive variable within the list"
        );
        Ok(CellTerm { vars, positives })
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn positives_mask(&self) -> u32 {
        self.positives
    }

    pub fn positive_vars(&self) -> impl Iterator<Item = &str> {
        self.vars
            .iter()
            .enumerate()
            .filter(move |(i, _)| self.positives & (1 << i) != 0)
            .map(|(_, v)| v.as_str())
    }

    /// The cell as a lattice term: positives are met together, and the join
    /// of the negative variables is subtracted when there are any.
    pub fn to_term(&self) -> Term {
        let mut pos = None;
        let mut neg = None;
        for (i, v) in self.vars.iter().enumerate() {
            let t = Term::var(v.clone());
            if self.positives & (1 << i) != 0 {
                pos = Some(match pos {
                    None => t,
                    Some(acc) => Term::meet(acc, t),
                });
            } else {
                neg = Some(match neg {
                    None => t,
                    Some(acc) => Term::join(acc, t),
                });
            }
        }
        let pos = pos.expect("cell has a positive variable");
        match neg {
            None => pos,
            Some(neg) => Term::diff(pos, neg),
        }
    }
}

impl fmt::Display for CellTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_term())
    }
}

/// Decomposes `t` into the set of cells it covers over `vars`. The returned
/// cells are pairwise disjoint and their union denotes the same element as
/// `t`; `0` maps to the empty union.
pub fn cellify(
    t: &Term,
    vars: &[String],
    budget: &mut NodeBudget,
) -> Result<BTreeSet<CellTerm>, EngineError> {
    let masks = cell_masks(t, vars, budget)?;
    let shared: Arc<[String]> = vars.to_vec().into();
    masks
        .into_iter()
        .map(|m| CellTerm::new(shared.clone(), m))
        .collect()
}

/// Bitmask form of `cellify`: each mask selects the positive variables of
/// one cell, indexed by position in `vars`.
pub(super) fn cell_masks(
    t: &Term,
    vars: &[String],
    budget: &mut NodeBudget,
) -> Result<BTreeSet<u32>, EngineError> {
    if vars.len() > 31 {
        return Err(EngineError::TooManyCellVariables(vars.len()));
    }
    for v in t.variables() {
        if !vars.contains(&v) {
            return Err(EngineError::VariableNotInCellList(v));
        }
    }
    denote(t, vars, budget)
}

fn denote(t: &Term, vars: &[String], budget: &mut NodeBudget) -> Result<BTreeSet<u32>, EngineError> {
    match t {
        Term::Zero => Ok(BTreeSet::new()),
        Term::Var(name) => {
            let idx = vars.iter().position(|v| v == name).expect("checked above");
            let n = vars.len() as u32;
            budget.charge(1u64 << (n - 1))?;
            let bit = 1u32 << idx;
            Ok((1..(1u32 << n)).filter(|m| m & bit != 0).collect())
        }
        Term::Meet(l, r) => {
            let l = denote(l, vars, budget)?;
            let r = denote(r, vars, budget)?;
            Ok(l.intersection(&r).copied().collect())
        }
        Term::Join(l, r) => {
            let l = denote(l, vars, budget)?;
            let r = denote(r, vars, budget)?;
            budget.charge((l.len() + r.len()) as u64)?;
            Ok(l.union(&r).copied().collect())
        }
        Term::Diff(l, r) => {
            let l = denote(l, vars, budget)?;
            let r = denote(r, vars, budget)?;
            Ok(l.difference(&r).copied().collect())
        }
    }
}

/// A single size requirement on one term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SizeConstraint {
    Exact(u64),
    AtLeast(u64),
}

impl SizeConstraint {
    /// Reduces two requirements on the same term to one, or to a
    /// contradiction:
    /// two different exact sizes clash; an exact size below a lower bound
    /// clashes; otherwise the exact size or the larger lower bound wins.
    pub fn combine(self, other: SizeConstraint) -> Option<SizeConstraint> {
        use SizeConstraint::*;
        match (self, other) {
            (Exact(a), Exact(b)) => (a == b).then_some(Exact(a)),
            (Exact(k), AtLeast(l)) | (AtLeast(l), Exact(k)) => (k >= l).then_some(Exact(k)),
            (AtLeast(a), AtLeast(b)) => Some(AtLeast(a.max(b))),
        }
    }

    pub fn atom(self, t: Term) -> Formula {
        match self {
            SizeConstraint::Exact(n) => Formula::CardEq(t, n),
            SizeConstraint::AtLeast(n) => Formula::CardGeq(t, n),
        }
    }
}

/// Reduced state of one constraint slot: trivially `AtLeast(0)` until
/// constraints arrive, then either a single satisfiable constraint or ⊥.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlotState {
    Satisfiable(SizeConstraint),
    Contradictory,
}

impl Default for SlotState {
    fn default() -> Self {
        SlotState::Satisfiable(SizeConstraint::AtLeast(0))
    }
}

impl SlotState {
    pub fn add(&mut self, c: SizeConstraint) {
        *self = match *self {
            SlotState::Contradictory => SlotState::Contradictory,
            SlotState::Satisfiable(prev) => match prev.combine(c) {
                Some(merged) => SlotState::Satisfiable(merged),
                None => SlotState::Contradictory,
            },
        };
    }
}

/// Constraints on `x ∩ c` (inner) and `c - x` (outer) for one base cell `c`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CellSlots {
    pub inner: SlotState,
    pub outer: SlotState,
}

/// The grouped requirements produced while eliminating `∃x` from a
/// conjunction of single-cell size atoms: per base cell the inner and outer
/// slots, plus the slot for the fresh cell in which `x` is the only
/// positive variable.
#[derive(Debug, Clone, Default)]
pub struct CellConstraintSystem<K: Ord> {
    cells: BTreeMap<K, CellSlots>,
    fresh: SlotState,
}

impl<K: Ord> CellConstraintSystem<K> {
    pub fn new() -> Self {
        CellConstraintSystem { cells: BTreeMap::new(), fresh: SlotState::default() }
    }

    pub fn add_inner(&mut self, key: K, c: SizeConstraint) {
        self.cells.entry(key).or_default().inner.add(c);
    }

    pub fn add_outer(&mut self, key: K, c: SizeConstraint) {
        self.cells.entry(key).or_default().outer.add(c);
    }

    pub fn add_fresh(&mut self, c: SizeConstraint) {
        self.fresh.add(c);
    }

    /// Translates the reduced slots into requirements on the base cells:
    ///
    /// ```text
    /// (Exact k1, Exact k2)   =>  |c| = k1 + k2
    /// (Exact k,  AtLeast l)  =>  |c| >= k + l      (either order)
    /// (AtLeast a, AtLeast b) =>  |c| >= a + b
    /// ```
    ///
    /// A contradictory slot anywhere makes the whole system unsatisfiable
    /// (`Ok(None)`). Fresh-cell requirements never constrain the base
    /// cells: unboundedness supplies arbitrarily many atoms disjoint from
    /// any finite list, so a reduced fresh slot is simply satisfiable.
    /// Trivial `|c| >= 0` results are dropped.
    pub fn solve(self) -> Result<Option<Vec<(K, SizeConstraint)>>, EngineError> {
        use SizeConstraint::*;
        if self.fresh == SlotState::Contradictory {
            return Ok(None);
        }
        let mut out = Vec::new();
        for (key, slots) in self.cells {
            let (inner, outer) = match (slots.inner, slots.outer) {
                (SlotState::Satisfiable(i), SlotState::Satisfiable(o)) => (i, o),
                _ => return Ok(None),
            };
            let sum = |a: u64, b: u64| a.checked_add(b).ok_or(EngineError::ConstantOverflow);
            let combined = match (inner, outer) {
                (Exact(a), Exact(b)) => Exact(sum(a, b)?),
                (Exact(a), AtLeast(b)) | (AtLeast(a), Exact(b)) | (AtLeast(a), AtLeast(b)) => {
                    AtLeast(sum(a, b)?)
                }
            };
            if combined != AtLeast(0) {
                out.push((key, combined));
            }
        }
        Ok(Some(out))
    }
}

/// Number of ways to write `n` as an ordered sum of `m` nonnegative parts.
pub(super) fn count_compositions(n: u64, m: u64) -> Option<u128> {
    // C(n + m - 1, m - 1)
    if m == 0 {
        return Some(if n == 0 { 1 } else { 0 });
    }
    let top = (n as u128).checked_add(m as u128 - 1)?;
    let k = (m - 1) as u128;
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul(top - i)?;
        acc /= i + 1;
        if acc > u128::from(u64::MAX) {
            return None;
        }
    }
    Some(acc)
}

/// All ordered decompositions of `n` into `m` nonnegative parts, in
/// lexicographic order (first part ascending).
pub(super) fn compositions(n: u64, m: usize) -> Vec<Vec<u64>> {
    if m == 0 {
        return if n == 0 { vec![vec![]] } else { vec![] };
    }
    if m == 1 {
        return vec![vec![n]];
    }
    let mut out = Vec::new();
    for first in 0..=n {
        for mut rest in compositions(n - first, m - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Rewrites a size assertion about a union of pairwise-disjoint cells into
/// a positive combination of size assertions about single cells. Because
/// the cells are disjoint, the general union identity degenerates to the
/// compositions of `n` into one part per cell:
///
/// ```text
/// |c1 ∪ ... ∪ cm|  = n  <=>  ⋁_{n1+..+nm=n} ⋀ |ci|  = ni
/// |c1 ∪ ... ∪ cm| >= n  <=>  ⋁_{n1+..+nm=n} ⋀ |ci| >= ni
/// ```
///
/// The empty union is `0`, so its size assertion settles to a literal; a
/// single cell passes through unchanged.
pub fn rewrite_union_sizes(
    cells: &BTreeSet<CellTerm>,
    constraint: SizeConstraint,
    budget: &mut NodeBudget,
) -> Result<Formula, EngineError> {
    let n = match constraint {
        SizeConstraint::Exact(n) | SizeConstraint::AtLeast(n) => n,
    };
    let m = cells.len();
    if m == 0 {
        return Ok(if n == 0 { true_literal() } else { false_literal() });
    }
    if m == 1 {
        let cell = cells.iter().next().expect("one cell");
        return Ok(constraint.atom(cell.to_term()));
    }
    let count = count_compositions(n, m as u64).ok_or(EngineError::ConstantOverflow)?;
    let cost = count.checked_mul(m as u128).unwrap_or(u128::MAX);
    budget.charge(u64::try_from(cost).unwrap_or(u64::MAX))?;
    let exact = matches!(constraint, SizeConstraint::Exact(_));
    let mut disjuncts = Vec::new();
    for comp in compositions(n, m) {
        let conj: Vec<Formula> = cells
            .iter()
            .zip(&comp)
            .map(|(cell, &k)| {
                let c = if exact { SizeConstraint::Exact(k) } else { SizeConstraint::AtLeast(k) };
                c.atom(cell.to_term())
            })
            .collect();
        disjuncts.push(Formula::and_all(conj).expect("nonempty"));
    }
    Ok(Formula::or_all(disjuncts).expect("nonempty"))
}

/// The general two-term union identity, obtained by splitting on the sizes
/// of the three regions `s - t`, `s ∩ t` and `t - s`:
///
/// ```text
/// |s ∪ t|  = n  <=>  ⋁_{i+j+k=n} |s|    = i+j ∧ |s ∩ t|  = j ∧ |t|    = j+k
/// |s ∪ t| >= n  <=>  ⋁_{i+j+k=n} |s - t| >= i ∧ |s ∩ t| >= j ∧ |t - s| >= k
/// ```
///
/// In the exact case the overlap is pinned by `|s ∩ t| = j`, so the mixed
/// `|s| = i+j` form is equivalent to the region form; in the `>=` case the
/// bounds must be on the disjoint regions themselves, since a shared
/// element could otherwise be counted toward both sides. Both hold for
/// arbitrary terms; the elimination pipeline itself only needs the
/// disjoint-cell specialization in [`rewrite_union_sizes`].
pub fn binary_union_size(s: &Term, t: &Term, constraint: SizeConstraint) -> Formula {
    let n = match constraint {
        SizeConstraint::Exact(n) | SizeConstraint::AtLeast(n) => n,
    };
    let mut disjuncts = Vec::new();
    for i in 0..=n {
        for j in 0..=(n - i) {
            let k = n - i - j;
            let conj = match constraint {
                SizeConstraint::Exact(_) => vec![
                    Formula::CardEq(s.clone(), i + j),
                    Formula::CardEq(Term::meet(s.clone(), t.clone()), j),
                    Formula::CardEq(t.clone(), j + k),
                ],
                SizeConstraint::AtLeast(_) => vec![
                    Formula::CardGeq(Term::diff(s.clone(), t.clone()), i),
                    Formula::CardGeq(Term::meet(s.clone(), t.clone()), j),
                    Formula::CardGeq(Term::diff(t.clone(), s.clone()), k),
                ],
            };
            disjuncts.push(Formula::and_all(conj).expect("nonempty"));
        }
    }
    Formula::or_all(disjuncts).expect("nonempty")
}
