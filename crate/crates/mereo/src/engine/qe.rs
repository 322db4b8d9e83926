//! The elimination pipeline and the decision procedure.

use std::collections::HashMap;
use std::rc::Rc;
use std::sync::Arc;

use crate::formula::{Formula, Term};

use super::cells::{cell_masks, compositions, count_compositions};
use super::{
    canonicalize, false_literal, normalize_atoms, positivize, true_literal, CellConstraintSystem,
    CellTerm, EliminationTrace, EngineConfig, EngineError, NodeBudget, SizeConstraint, Stage,
};

/// Outcome of deciding a sentence.
#[derive(Debug, Clone)]
pub struct Decision {
    pub verdict: bool,
    pub trace: EliminationTrace,
}

struct Ctx<'t> {
    budget: NodeBudget,
    trace: Option<&'t mut EliminationTrace>,
}

impl Ctx<'_> {
    fn tracing(&self) -> bool {
        self.trace.is_some()
    }

    fn record(&mut self, stage: Stage, before: Formula, after: Formula) {
        if let Some(trace) = self.trace.as_deref_mut() {
            trace.push(stage, before, after);
        }
    }
}

/// Computes a quantifier-free formula equivalent over the theory to `f`,
/// with the same free variables or fewer.
pub fn eliminate(f: &Formula, cfg: &EngineConfig) -> Result<Formula, EngineError> {
    let mut ctx = Ctx { budget: NodeBudget::new(cfg.max_nodes), trace: None };
    run(f, &mut ctx)
}

/// Like [`eliminate`], also returning the per-stage rewrite trace.
pub fn eliminate_traced(
    f: &Formula,
    cfg: &EngineConfig,
) -> Result<(Formula, EliminationTrace), EngineError> {
    let mut trace = EliminationTrace::new();
    let mut ctx = Ctx { budget: NodeBudget::new(cfg.max_nodes), trace: Some(&mut trace) };
    let out = run(f, &mut ctx)?;
    Ok((out, trace))
}

/// Decides a sentence: eliminate the quantifiers, then evaluate the ground
/// residue. `decide(!s)` returns the opposite verdict of `decide(s)`.
pub fn decide(f: &Formula, cfg: &EngineConfig) -> Result<Decision, EngineError> {
    let free = f.free_variables();
    if !free.is_empty() {
        return Err(EngineError::NotASentence(free));
    }
    let (qf, mut trace) = eliminate_traced(f, cfg)?;
    let verdict = eval_ground(&qf)?;
    let literal = if verdict { true_literal() } else { false_literal() };
    trace.push(Stage::GroundEvaluation, qf, literal);
    Ok(Decision { verdict, trace })
}

/// Evaluates a quantifier-free, variable-free formula. Every ground term
/// denotes `0`, so `card(t) = n` holds exactly when `n = 0`, and likewise
/// for `card(t) >= n`.
pub fn eval_ground(f: &Formula) -> Result<bool, EngineError> {
    let ground_term = |t: &Term| -> Result<(), EngineError> {
        if t.variables().is_empty() {
            Ok(())
        } else {
            Err(EngineError::NotGround(t.to_string()))
        }
    };
    match f {
        Formula::Sub(s, t) | Formula::Eq(s, t) => {
            ground_term(s)?;
            ground_term(t)?;
            Ok(true)
        }
        Formula::CardEq(t, n) | Formula::CardGeq(t, n) => {
            ground_term(t)?;
            Ok(*n == 0)
        }
        Formula::Not(g) => Ok(!eval_ground(g)?),
        Formula::And(l, r) => Ok(eval_ground(l)? && eval_ground(r)?),
        Formula::Or(l, r) => Ok(eval_ground(l)? || eval_ground(r)?),
        Formula::Implies(l, r) => Ok(!eval_ground(l)? || eval_ground(r)?),
        Formula::Iff(l, r) => Ok(eval_ground(l)? == eval_ground(r)?),
        Formula::Exists(..) | Formula::Forall(..) => Err(EngineError::NotGround(f.to_string())),
    }
}

fn run(f: &Formula, ctx: &mut Ctx) -> Result<Formula, EngineError> {
    let normalized = normalize_atoms(f);
    ctx.budget.charge(normalized.node_count())?;
    ctx.record(Stage::AtomNormalization, f.clone(), normalized.clone());
    eliminate_rec(&normalized, ctx)
}

fn eliminate_rec(f: &Formula, ctx: &mut Ctx) -> Result<Formula, EngineError> {
    match f {
        Formula::Sub(..) | Formula::Eq(..) | Formula::CardEq(..) | Formula::CardGeq(..) => {
            Ok(f.clone())
        }
        Formula::Not(g) => Ok(Formula::not(eliminate_rec(g, ctx)?)),
        Formula::And(l, r) => Ok(Formula::and(eliminate_rec(l, ctx)?, eliminate_rec(r, ctx)?)),
        Formula::Or(l, r) => Ok(Formula::or(eliminate_rec(l, ctx)?, eliminate_rec(r, ctx)?)),
        Formula::Implies(l, r) => {
            Ok(Formula::implies(eliminate_rec(l, ctx)?, eliminate_rec(r, ctx)?))
        }
        Formula::Iff(l, r) => Ok(Formula::iff(eliminate_rec(l, ctx)?, eliminate_rec(r, ctx)?)),
        Formula::Exists(x, body) => {
            let inner = eliminate_rec(body, ctx)?;
            eliminate_step(x, inner, ctx)
        }
        Formula::Forall(x, body) => {
            // A x. φ  ==  !(E x. !φ)
            let inner = eliminate_rec(body, ctx)?;
            let negated = eliminate_step(x, Formula::not(inner), ctx)?;
            Ok(Formula::not(negated))
        }
    }
}

/// Geometry of one elimination step: the ordered cell variable list, the
/// position of the eliminated variable in it, and the list without it.
struct StepVars {
    vars: Vec<String>,
    base: Arc<[String]>,
    x_idx: usize,
    x_bit: u32,
}

impl StepVars {
    fn new(vars: Vec<String>, x: &str) -> Self {
        let x_idx = vars.iter().position(|v| v == x).expect("x occurs in its atoms");
        let base: Arc<[String]> =
            vars.iter().enumerate().filter(|(i, _)| *i != x_idx).map(|(_, v)| v.clone()).collect();
        StepVars { vars, base, x_idx, x_bit: 1 << x_idx }
    }

    fn cell_term(&self, mask: u32) -> Term {
        let shared: Arc<[String]> = self.vars.clone().into();
        CellTerm::new(shared, mask).expect("within width").to_term()
    }

    /// Term for a base cell, given its mask over the full list with the
    /// eliminated variable's bit clear.
    fn base_cell_term(&self, mask: u32) -> Term {
        let mut remapped = 0u32;
        for i in 0..self.vars.len() {
            if i != self.x_idx && mask & (1 << i) != 0 {
                let j = if i > self.x_idx { i - 1 } else { i };
                remapped |= 1 << j;
            }
        }
        CellTerm::new(self.base.clone(), remapped).expect("within width").to_term()
    }
}

/// Eliminates `∃x` from a quantifier-free body.
fn eliminate_step(x: &str, body: Formula, ctx: &mut Ctx) -> Result<Formula, EngineError> {
    if !body.free_variables().iter().any(|v| v == x) {
        // The lattice is nonempty, so a vacuous quantifier drops.
        ctx.record(
            Stage::QuantifierElimination,
            Formula::exists(x, body.clone()),
            body.clone(),
        );
        return Ok(body);
    }

    let pos = positivize(&body, &mut ctx.budget)?;
    ctx.budget.charge(pos.node_count())?;
    ctx.record(
        Stage::Positivization,
        Formula::exists(x, body.clone()),
        Formula::exists(x, pos.clone()),
    );

    // Positivization can erase x entirely, e.g. !(card(x) >= 0) collapses
    // to the false literal; the quantifier is then vacuous.
    if !pos.free_variables().iter().any(|v| v == x) {
        ctx.record(Stage::QuantifierElimination, Formula::exists(x, pos.clone()), pos.clone());
        return Ok(pos);
    }

    let step = StepVars::new(step_variables(&pos, x), x);
    let mut memo: HashMap<Term, Rc<Vec<u32>>> = HashMap::new();

    if ctx.tracing() {
        let f_cells = cellified_formula(&pos, x, &step, &mut memo, &mut ctx.budget)?;
        ctx.budget.charge(f_cells.node_count())?;
        ctx.record(
            Stage::Cellification,
            Formula::exists(x, pos.clone()),
            Formula::exists(x, f_cells),
        );
    }

    let mut intern: HashMap<(u32, SizeConstraint), Rc<PosAtom>> = HashMap::new();
    let ir = build_ir(&pos, x, &step, &mut memo, &mut intern, &mut ctx.budget)?;
    if ctx.tracing() {
        let f_sized = ir_to_formula(&ir, &step);
        ctx.budget.charge(f_sized.node_count())?;
        let before = match ctx.trace.as_deref().and_then(|t| t.entries().last()) {
            Some(entry) => entry.after.clone(),
            None => Formula::exists(x, pos.clone()),
        };
        ctx.record(Stage::SizeRewriting, before, Formula::exists(x, f_sized));
    }

    let disjuncts = dnf(&ir, &mut ctx.budget)?;
    if ctx.tracing() {
        let f_dnf = disjuncts_to_formula(&disjuncts, &step);
        ctx.budget.charge(f_dnf.node_count())?;
        let before = ctx.trace.as_deref().and_then(|t| t.entries().last());
        let before = before.map(|e| e.after.clone()).unwrap_or_else(|| Formula::exists(x, pos.clone()));
        ctx.record(Stage::Dnf, before, Formula::exists(x, f_dnf));
    }

    let mut results = Vec::with_capacity(disjuncts.len());
    for conj in &disjuncts {
        results.push(eliminate_conjunct(&step, conj)?);
    }
    let out = Formula::or_all(results).unwrap_or_else(false_literal);
    let out = canonicalize(&out);
    ctx.budget.charge(out.node_count())?;
    if ctx.tracing() {
        let before = ctx
            .trace
            .as_deref()
            .and_then(|t| t.entries().last())
            .map(|e| e.after.clone())
            .unwrap_or_else(|| Formula::exists(x, pos.clone()));
        ctx.record(Stage::QuantifierElimination, before, out.clone());
    }
    Ok(out)
}

/// Variables that co-occur with `x` in some size atom, in first-occurrence
/// order over the body (`x` included at its own position).
fn step_variables(pos: &Formula, x: &str) -> Vec<String> {
    let mut relevant: Vec<String> = Vec::new();
    for_each_size_atom(pos, &mut |t, _| {
        if t.mentions(x) {
            for v in t.variables() {
                if !relevant.contains(&v) {
                    relevant.push(v);
                }
            }
        }
    });
    let mut order = pos.free_variables();
    order.retain(|v| relevant.contains(v));
    order
}

fn for_each_size_atom(f: &Formula, g: &mut impl FnMut(&Term, SizeConstraint)) {
    match f {
        Formula::CardEq(t, n) => g(t, SizeConstraint::Exact(*n)),
        Formula::CardGeq(t, n) => g(t, SizeConstraint::AtLeast(*n)),
        Formula::And(l, r) | Formula::Or(l, r) => {
            for_each_size_atom(l, g);
            for_each_size_atom(r, g);
        }
        other => unreachable!("positivized formula contains {other}"),
    }
}

fn cells_of(
    t: &Term,
    step: &StepVars,
    memo: &mut HashMap<Term, Rc<Vec<u32>>>,
    budget: &mut NodeBudget,
) -> Result<Rc<Vec<u32>>, EngineError> {
    if let Some(cached) = memo.get(t) {
        return Ok(cached.clone());
    }
    let masks = cell_masks(t, &step.vars, budget)?;
    let out: Rc<Vec<u32>> = Rc::new(masks.into_iter().collect());
    memo.insert(t.clone(), out.clone());
    Ok(out)
}

/// Same formula with every term mentioning `x` replaced by the union of its
/// cells (trace material for the cellification stage).
fn cellified_formula(
    f: &Formula,
    x: &str,
    step: &StepVars,
    memo: &mut HashMap<Term, Rc<Vec<u32>>>,
    budget: &mut NodeBudget,
) -> Result<Formula, EngineError> {
    Ok(match f {
        Formula::CardEq(t, n) if t.mentions(x) => {
            Formula::CardEq(union_term(&cells_of(t, step, memo, budget)?, step), *n)
        }
        Formula::CardGeq(t, n) if t.mentions(x) => {
            Formula::CardGeq(union_term(&cells_of(t, step, memo, budget)?, step), *n)
        }
        Formula::CardEq(..) | Formula::CardGeq(..) => f.clone(),
        Formula::And(l, r) => Formula::and(
            cellified_formula(l, x, step, memo, budget)?,
            cellified_formula(r, x, step, memo, budget)?,
        ),
        Formula::Or(l, r) => Formula::or(
            cellified_formula(l, x, step, memo, budget)?,
            cellified_formula(r, x, step, memo, budget)?,
        ),
        other => unreachable!("positivized formula contains {other}"),
    })
}

fn union_term(masks: &[u32], step: &StepVars) -> Term {
    let mut acc: Option<Term> = None;
    for &m in masks {
        let cell = step.cell_term(m);
        acc = Some(match acc {
            None => cell,
            Some(t) => Term::join(t, cell),
        });
    }
    acc.unwrap_or(Term::Zero)
}

/// Positive matrix over single-cell atoms and `x`-free pass-through atoms.
#[derive(Debug, PartialEq, Eq, Hash)]
enum PosAtom {
    Cell { mask: u32, cons: SizeConstraint },
    Free(Formula),
}

enum PosForm {
    Atom(Rc<PosAtom>),
    And(Vec<PosForm>),
    Or(Vec<PosForm>),
}

fn build_ir(
    f: &Formula,
    x: &str,
    step: &StepVars,
    memo: &mut HashMap<Term, Rc<Vec<u32>>>,
    intern: &mut HashMap<(u32, SizeConstraint), Rc<PosAtom>>,
    budget: &mut NodeBudget,
) -> Result<PosForm, EngineError> {
    match f {
        Formula::CardEq(t, n) => build_leaf(t, SizeConstraint::Exact(*n), x, step, memo, intern, budget),
        Formula::CardGeq(t, n) => {
            build_leaf(t, SizeConstraint::AtLeast(*n), x, step, memo, intern, budget)
        }
        Formula::And(l, r) => Ok(PosForm::And(vec![
            build_ir(l, x, step, memo, intern, budget)?,
            build_ir(r, x, step, memo, intern, budget)?,
        ])),
        Formula::Or(l, r) => Ok(PosForm::Or(vec![
            build_ir(l, x, step, memo, intern, budget)?,
            build_ir(r, x, step, memo, intern, budget)?,
        ])),
        other => unreachable!("positivized formula contains {other}"),
    }
}

fn build_leaf(
    t: &Term,
    cons: SizeConstraint,
    x: &str,
    step: &StepVars,
    memo: &mut HashMap<Term, Rc<Vec<u32>>>,
    intern: &mut HashMap<(u32, SizeConstraint), Rc<PosAtom>>,
    budget: &mut NodeBudget,
) -> Result<PosForm, EngineError> {
    budget.charge(1)?;
    if !t.mentions(x) {
        return Ok(PosForm::Atom(Rc::new(PosAtom::Free(cons.atom(t.clone())))));
    }
    let cells = cells_of(t, step, memo, budget)?;
    let n = match cons {
        SizeConstraint::Exact(n) | SizeConstraint::AtLeast(n) => n,
    };
    let m = cells.len();
    if m == 0 {
        // Size assertions about 0 are settled by the theory.
        let lit = if n == 0 { true_literal() } else { false_literal() };
        return Ok(PosForm::Atom(Rc::new(PosAtom::Free(lit))));
    }
    let exact = matches!(cons, SizeConstraint::Exact(_));
    let cell_atom = |mask: u32, k: u64, intern: &mut HashMap<_, _>| -> Rc<PosAtom> {
        let c = if exact { SizeConstraint::Exact(k) } else { SizeConstraint::AtLeast(k) };
        intern
            .entry((mask, c))
            .or_insert_with(|| Rc::new(PosAtom::Cell { mask, cons: c }))
            .clone()
    };
    if m == 1 {
        return Ok(PosForm::Atom(cell_atom(cells[0], n, intern)));
    }
    let count = count_compositions(n, m as u64).ok_or(EngineError::ConstantOverflow)?;
    let cost = count.saturating_mul(m as u128);
    budget.charge(u64::try_from(cost).unwrap_or(u64::MAX))?;
    let mut parts = Vec::new();
    for comp in compositions(n, m) {
        let conj: Vec<PosForm> = cells
            .iter()
            .zip(&comp)
            .map(|(&mask, &k)| PosForm::Atom(cell_atom(mask, k, intern)))
            .collect();
        parts.push(PosForm::And(conj));
    }
    Ok(PosForm::Or(parts))
}

fn ir_to_formula(ir: &PosForm, step: &StepVars) -> Formula {
    match ir {
        PosForm::Atom(a) => atom_to_formula(a, step),
        PosForm::And(children) => {
            Formula::and_all(children.iter().map(|c| ir_to_formula(c, step)).collect())
                .unwrap_or_else(true_literal)
        }
        PosForm::Or(children) => {
            Formula::or_all(children.iter().map(|c| ir_to_formula(c, step)).collect())
                .unwrap_or_else(false_literal)
        }
    }
}

fn atom_to_formula(a: &PosAtom, step: &StepVars) -> Formula {
    match a {
        PosAtom::Free(f) => f.clone(),
        PosAtom::Cell { mask, cons } => cons.atom(step.cell_term(*mask)),
    }
}

fn disjuncts_to_formula(disjuncts: &[Vec<Rc<PosAtom>>], step: &StepVars) -> Formula {
    let parts: Vec<Formula> = disjuncts
        .iter()
        .map(|conj| {
            Formula::and_all(conj.iter().map(|a| atom_to_formula(a, step)).collect())
                .unwrap_or_else(true_literal)
        })
        .collect();
    Formula::or_all(parts).unwrap_or_else(false_literal)
}

/// Plain distribution into a disjunction of conjunctions; atoms are shared,
/// not renamed, so no new variables appear.
fn dnf(ir: &PosForm, budget: &mut NodeBudget) -> Result<Vec<Vec<Rc<PosAtom>>>, EngineError> {
    match ir {
        PosForm::Atom(a) => Ok(vec![vec![a.clone()]]),
        PosForm::Or(children) => {
            let mut out = Vec::new();
            for c in children {
                out.extend(dnf(c, budget)?);
            }
            Ok(out)
        }
        PosForm::And(children) => {
            let mut acc: Vec<Vec<Rc<PosAtom>>> = vec![vec![]];
            for c in children {
                let child = dnf(c, budget)?;
                let mut next = Vec::with_capacity(acc.len() * child.len());
                for left in &acc {
                    for right in &child {
                        budget.charge((left.len() + right.len()) as u64)?;
                        let mut merged = left.clone();
                        merged.extend(right.iter().cloned());
                        next.push(merged);
                    }
                }
                acc = next;
            }
            Ok(acc)
        }
    }
}

fn eliminate_conjunct(step: &StepVars, conj: &[Rc<PosAtom>]) -> Result<Formula, EngineError> {
    let mut system: CellConstraintSystem<u32> = CellConstraintSystem::new();
    let mut passthrough: Vec<Formula> = Vec::new();
    for atom in conj {
        match atom.as_ref() {
            PosAtom::Free(f) => passthrough.push(f.clone()),
            PosAtom::Cell { mask, cons } => {
                if *mask == step.x_bit {
                    system.add_fresh(*cons);
                } else if mask & step.x_bit != 0 {
                    system.add_inner(mask & !step.x_bit, *cons);
                } else {
                    system.add_outer(*mask, *cons);
                }
            }
        }
    }
    let entries = match system.solve()? {
        None => return Ok(false_literal()),
        Some(entries) => entries,
    };
    let mut parts: Vec<Formula> =
        entries.into_iter().map(|(mask, cons)| cons.atom(step.base_cell_term(mask))).collect();
    parts.extend(passthrough);
    Ok(Formula::and_all(parts).unwrap_or_else(true_literal))
}

/// Eliminates `∃x` from an explicit conjunction of single-cell size atoms.
/// Each conjunct must be a `card` atom whose term has one of the shapes
/// `x * c`, `c * x`, `c - x`, `x`, or `x - t` with `c`, `t` not mentioning
/// `x` (distinct base terms are taken to denote disjoint cells), or else be
/// `x`-free, in which case it passes through.
pub fn eliminate_exists(x: &str, conjuncts: &[Formula]) -> Result<Formula, EngineError> {
    let mut system: CellConstraintSystem<Term> = CellConstraintSystem::new();
    let mut passthrough: Vec<Formula> = Vec::new();
    for f in conjuncts {
        let (t, cons) = match f {
            Formula::CardEq(t, n) => (t, SizeConstraint::Exact(*n)),
            Formula::CardGeq(t, n) => (t, SizeConstraint::AtLeast(*n)),
            other if !other.free_variables().iter().any(|v| v == x) => {
                passthrough.push(other.clone());
                continue;
            }
            other => return Err(EngineError::UnsupportedCellAtom(other.to_string())),
        };
        if !t.mentions(x) {
            passthrough.push(f.clone());
            continue;
        }
        match t {
            Term::Var(v) if v == x => system.add_fresh(cons),
            Term::Meet(l, r) => {
                if matches!(l.as_ref(), Term::Var(v) if v == x) && !r.mentions(x) {
                    system.add_inner(r.as_ref().clone(), cons);
                } else if matches!(r.as_ref(), Term::Var(v) if v == x) && !l.mentions(x) {
                    system.add_inner(l.as_ref().clone(), cons);
                } else {
                    return Err(EngineError::UnsupportedCellAtom(f.to_string()));
                }
            }
            Term::Diff(l, r) => {
                if matches!(r.as_ref(), Term::Var(v) if v == x) && !l.mentions(x) {
                    system.add_outer(l.as_ref().clone(), cons);
                } else if matches!(l.as_ref(), Term::Var(v) if v == x) && !r.mentions(x) {
                    // x - (x1 + ... + xN): the fresh cell.
                    system.add_fresh(cons);
                } else {
                    return Err(EngineError::UnsupportedCellAtom(f.to_string()));
                }
            }
            _ => return Err(EngineError::UnsupportedCellAtom(f.to_string())),
        }
    }
    let entries = match system.solve()? {
        None => return Ok(false_literal()),
        Some(entries) => entries,
    };
    let mut parts: Vec<Formula> =
        entries.into_iter().map(|(term, cons)| cons.atom(term)).collect();
    parts.extend(passthrough);
    Ok(Formula::and_all(parts).unwrap_or_else(true_literal))
}
