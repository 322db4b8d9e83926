//! Surface-syntax printer. Inverse of the parser up to whitespace.

use std::fmt;

use super::{Formula, Term};

// Connective precedence: quantifier 0 < <-> 1 < -> 2 < | 3 < & 4 < ! 5 < atom 6.
// & and | associate left, -> and <-> associate right; parentheses are
// emitted wherever reparsing would otherwise regroup the tree.

fn formula_prec(f: &Formula) -> u8 {
    match f {
        Formula::Exists(..) | Formula::Forall(..) => 0,
        Formula::Iff(..) => 1,
        Formula::Implies(..) => 2,
        Formula::Or(..) => 3,
        Formula::And(..) => 4,
        Formula::Not(..) => 5,
        _ => 6,
    }
}

fn term_prec(t: &Term) -> u8 {
    match t {
        Term::Join(..) => 1,
        Term::Meet(..) | Term::Diff(..) => 2,
        Term::Var(_) | Term::Zero => 3,
    }
}

pub(super) fn fmt_formula(f: &Formula, w: &mut fmt::Formatter<'_>) -> fmt::Result {
    write_formula(f, 0, w)
}

fn write_formula(f: &Formula, min_prec: u8, w: &mut fmt::Formatter<'_>) -> fmt::Result {
    let prec = formula_prec(f);
    let parens = prec < min_prec;
    if parens {
        write!(w, "(")?;
    }
    match f {
        Formula::Sub(s, t) => {
            write!(w, "sub(")?;
            write_term(s, 0, w)?;
            write!(w, ", ")?;
            write_term(t, 0, w)?;
            write!(w, ")")?;
        }
        Formula::Eq(s, t) => {
            write!(w, "eq(")?;
            write_term(s, 0, w)?;
            write!(w, ", ")?;
            write_term(t, 0, w)?;
            write!(w, ")")?;
        }
        Formula::CardEq(t, n) => {
            write!(w, "card(")?;
            write_term(t, 0, w)?;
            write!(w, ") = {n}")?;
        }
        Formula::CardGeq(t, n) => {
            write!(w, "card(")?;
            write_term(t, 0, w)?;
            write!(w, ") >= {n}")?;
        }
        Formula::Not(g) => {
            write!(w, "!")?;
            write_formula(g, 5, w)?;
        }
        Formula::And(l, r) => {
            write_formula(l, 4, w)?;
            write!(w, " & ")?;
            write_formula(r, 5, w)?;
        }
        Formula::Or(l, r) => {
            write_formula(l, 3, w)?;
            write!(w, " | ")?;
            write_formula(r, 4, w)?;
        }
        Formula::Implies(l, r) => {
            write_formula(l, 3, w)?;
            write!(w, " -> ")?;
            write_formula(r, 2, w)?;
        }
        Formula::Iff(l, r) => {
            write_formula(l, 2, w)?;
            write!(w, " <-> ")?;
            write_formula(r, 1, w)?;
        }
        Formula::Exists(v, body) => {
            write!(w, "E {v}. ")?;
            write_formula(body, 0, w)?;
        }
        Formula::Forall(v, body) => {
            write!(w, "A {v}. ")?;
            write_formula(body, 0, w)?;
        }
    }
    if parens {
        write!(w, ")")?;
    }
    Ok(())
}

pub(super) fn fmt_term(t: &Term, w: &mut fmt::Formatter<'_>) -> fmt::Result {
    write_term(t, 0, w)
}

fn write_term(t: &Term, min_prec: u8, w: &mut fmt::Formatter<'_>) -> fmt::Result {
    let prec = term_prec(t);
    let parens = prec < min_prec;
    if parens {
        write!(w, "(")?;
    }
    match t {
        Term::Var(name) => write!(w, "{name}")?,
        Term::Zero => write!(w, "0")?,
        Term::Join(l, r) => {
            write_term(l, 1, w)?;
            write!(w, " + ")?;
            write_term(r, 2, w)?;
        }
        Term::Meet(l, r) => {
            write_term(l, 2, w)?;
            write!(w, " * ")?;
            write_term(r, 3, w)?;
        }
        Term::Diff(l, r) => {
            write_term(l, 2, w)?;
            write!(w, " - ")?;
            write_term(r, 3, w)?;
        }
    }
    if parens {
        write!(w, ")")?;
    }
    Ok(())
}
