//! Atom normalization and positivization.

use crate::formula::{Formula, Term};

use super::{false_literal, EngineError, NodeBudget};

/// Rewrites order atoms into size atoms: `sub(a, b)` becomes
/// `card(a - b) = 0` and `eq(a, b)` becomes the conjunction of both
/// inclusion directions. Connectives and quantifiers are untouched.
pub fn normalize_atoms(f: &Formula) -> Formula {
    match f {
        Formula::Sub(s, t) => card_zero(s, t),
        Formula::Eq(s, t) => Formula::and(card_zero(s, t), card_zero(t, s)),
        Formula::CardEq(..) | Formula::CardGeq(..) => f.clone(),
        Formula::Not(g) => Formula::not(normalize_atoms(g)),
        Formula::And(l, r) => Formula::and(normalize_atoms(l), normalize_atoms(r)),
        Formula::Or(l, r) => Formula::or(normalize_atoms(l), normalize_atoms(r)),
        Formula::Implies(l, r) => Formula::implies(normalize_atoms(l), normalize_atoms(r)),
        Formula::Iff(l, r) => Formula::iff(normalize_atoms(l), normalize_atoms(r)),
        Formula::Exists(v, b) => Formula::exists(v.clone(), normalize_atoms(b)),
        Formula::Forall(v, b) => Formula::forall(v.clone(), normalize_atoms(b)),
    }
}

fn card_zero(s: &Term, t: &Term) -> Formula {
    Formula::CardEq(Term::diff(s.clone(), t.clone()), 0)
}

/// Pushes negation to the atoms and expands negated size atoms:
///
/// ```text
/// !(card(t) >= n)  =>  card(t) = 0 | ... | card(t) = n-1
/// !(card(t) = n)   =>  card(t) >= n+1 | card(t) = 0 | ... | card(t) = n-1
/// ```
///
/// On quantifier-free input the result is a combination of size atoms under
/// `&` and `|` only. Negation of `card(t) >= 0` is the empty disjunction,
/// canonicalized to the false literal.
pub fn positivize(f: &Formula, budget: &mut NodeBudget) -> Result<Formula, EngineError> {
    positivize_signed(f, false, budget)
}

fn positivize_signed(
    f: &Formula,
    negated: bool,
    budget: &mut NodeBudget,
) -> Result<Formula, EngineError> {
    let out = match f {
        // Order atoms are tolerated and normalized on the fly.
        Formula::Sub(..) | Formula::Eq(..) => {
            positivize_signed(&normalize_atoms(f), negated, budget)?
        }
        Formula::CardEq(t, n) => {
            if negated {
                negate_card_eq(t, *n, budget)?
            } else {
                f.clone()
            }
        }
        Formula::CardGeq(t, n) => {
            if negated {
                negate_card_geq(t, *n, budget)?
            } else {
                f.clone()
            }
        }
        Formula::Not(g) => positivize_signed(g, !negated, budget)?,
        Formula::And(l, r) => {
            let l = positivize_signed(l, negated, budget)?;
            let r = positivize_signed(r, negated, budget)?;
            if negated {
                Formula::or(l, r)
            } else {
                Formula::and(l, r)
            }
        }
        Formula::Or(l, r) => {
            let l = positivize_signed(l, negated, budget)?;
            let r = positivize_signed(r, negated, budget)?;
            if negated {
                Formula::and(l, r)
            } else {
                Formula::or(l, r)
            }
        }
        Formula::Implies(l, r) => {
            // l -> r  ==  !l | r
            let nl = positivize_signed(l, !negated, budget)?;
            let rr = positivize_signed(r, negated, budget)?;
            if negated {
                Formula::and(nl, rr)
            } else {
                Formula::or(nl, rr)
            }
        }
        Formula::Iff(l, r) => {
            // Both polarities of both sides are needed.
            budget.charge(l.node_count() + r.node_count())?;
            let lp = positivize_signed(l, false, budget)?;
            let ln = positivize_signed(l, true, budget)?;
            let rp = positivize_signed(r, false, budget)?;
            let rn = positivize_signed(r, true, budget)?;
            if negated {
                Formula::or(Formula::and(lp, rn), Formula::and(ln, rp))
            } else {
                Formula::or(Formula::and(lp, rp), Formula::and(ln, rn))
            }
        }
        Formula::Exists(v, b) => {
            let b = positivize_signed(b, negated, budget)?;
            if negated {
                Formula::forall(v.clone(), b)
            } else {
                Formula::exists(v.clone(), b)
            }
        }
        Formula::Forall(v, b) => {
            let b = positivize_signed(b, negated, budget)?;
            if negated {
                Formula::exists(v.clone(), b)
            } else {
                Formula::forall(v.clone(), b)
            }
        }
    };
    Ok(out)
}

fn negate_card_eq(t: &Term, n: u64, budget: &mut NodeBudget) -> Result<Formula, EngineError> {
    let above = n.checked_add(1).ok_or(EngineError::ConstantOverflow)?;
    let term_size = t.node_count() + 1;
    budget.charge(n.saturating_add(1).saturating_mul(term_size))?;
    let mut parts = vec![Formula::CardGeq(t.clone(), above)];
    parts.extend((0..n).map(|k| Formula::CardEq(t.clone(), k)));
    Ok(Formula::or_all(parts).expect("nonempty"))
}

fn negate_card_geq(t: &Term, n: u64, budget: &mut NodeBudget) -> Result<Formula, EngineError> {
    let term_size = t.node_count() + 1;
    budget.charge(n.saturating_mul(term_size))?;
    let parts: Vec<Formula> = (0..n).map(|k| Formula::CardEq(t.clone(), k)).collect();
    Ok(Formula::or_all(parts).unwrap_or_else(false_literal))
}
