use proptest::prelude::*;

use super::*;

fn var(name: &str) -> Term {
    Term::var(name)
}

#[test]
fn parse_minimal_card_atom() {
    assert_eq!(parse("card(0) = 0").unwrap(), Formula::CardEq(Term::Zero, 0));
}

#[test]
fn parse_quantified_conjunction() {
    let f = parse("E x. (card(x * c) >= 3 & card(c - x) = 2)").unwrap();
    let expected = Formula::exists(
        "x",
        Formula::and(
            Formula::CardGeq(Term::meet(var("x"), var("c")), 3),
            Formula::CardEq(Term::diff(var("c"), var("x")), 2),
        ),
    );
    assert_eq!(f, expected);
}

#[test]
fn parse_missing_comma_reports_position() {
    let err = parse("sub(x y)").unwrap_err();
    assert_eq!((err.line, err.col), (1, 7));
    assert!(err.expected.iter().any(|e| e.contains(",")), "{err}");
}

#[test]
fn parse_atom_sugar_expands_to_card_eq_one() {
    assert_eq!(parse("atom(x)").unwrap(), Formula::CardEq(var("x"), 1));
}

#[test]
fn parse_rejects_reserved_variable_names() {
    assert!(parse("sub(card, x)").is_err());
    assert!(parse("E sub. card(sub) = 0").is_err());
}

#[test]
fn parse_connective_precedence() {
    // ! > & > | > -> > <->
    let f = parse("!card(x) = 0 & card(y) = 0 | card(z) = 0 -> card(0) = 0 <-> card(0) = 0").unwrap();
    match f {
        Formula::Iff(l, _) => match *l {
            Formula::Implies(l, _) => match *l {
                Formula::Or(l, _) => match *l {
                    Formula::And(l, _) => assert!(matches!(*l, Formula::Not(_))),
                    other => panic!("expected And, got {other}"),
                },
                other => panic!("expected Or, got {other}"),
            },
            other => panic!("expected Implies, got {other}"),
        },
        other => panic!("expected Iff, got {other}"),
    }
}

#[test]
fn parse_term_precedence_and_associativity() {
    // * and - bind tighter than +, left-associative.
    assert_eq!(
        parse_term("x + y * z").unwrap(),
        Term::join(var("x"), Term::meet(var("y"), var("z")))
    );
    assert_eq!(
        parse_term("x - y - z").unwrap(),
        Term::diff(Term::diff(var("x"), var("y")), var("z"))
    );
    assert_eq!(
        parse_term("x * y - z").unwrap(),
        Term::diff(Term::meet(var("x"), var("y")), var("z"))
    );
}

#[test]
fn quantifier_body_extends_right() {
    let f = parse("E x. sub(x, y) & eq(x, x)").unwrap();
    match f {
        Formula::Exists(_, body) => assert!(matches!(*body, Formula::And(..))),
        other => panic!("expected Exists, got {other}"),
    }
}

#[test]
fn render_examples() {
    assert_eq!(render(&Formula::CardEq(Term::Zero, 0)), "card(0) = 0");
    assert_eq!(
        render(&Formula::exists("x", Formula::Sub(var("x"), var("y")))),
        "E x. sub(x, y)"
    );
}

#[test]
fn render_parenthesizes_ambiguous_nesting() {
    // Right-nested conjunction must keep its grouping.
    let f = Formula::and(
        Formula::CardEq(var("x"), 0),
        Formula::and(Formula::CardEq(var("y"), 0), Formula::CardEq(var("z"), 0)),
    );
    assert_eq!(parse(&render(&f)).unwrap(), f);
    assert!(render(&f).contains('('));

    let t = Term::meet(var("x"), Term::join(var("y"), var("z")));
    assert_eq!(render(&Formula::CardEq(t.clone(), 1)), "card(x * (y + z)) = 1");
}

#[test]
fn free_variables_examples() {
    assert_eq!(parse("sub(x, y)").unwrap().free_variables(), vec!["x", "y"]);
    assert_eq!(parse("E x. sub(x, y)").unwrap().free_variables(), vec!["y"]);
    assert!(parse("A x. E y. card(x + y) >= 2").unwrap().free_variables().is_empty());
}

#[test]
fn parser_is_total_on_junk() {
    for text in ["", "(", "sub(", "card(x) >=", "E .", "x", "card(x) = 99999999999999999999"] {
        assert!(parse(text).is_err(), "accepted junk: {text:?}");
    }
}

prop_compose! {
    fn arb_var()(idx in 0usize..5) -> String {
        ["x", "y", "z", "c", "d"][idx].to_string()
    }
}

fn arb_term() -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![arb_var().prop_map(Term::Var), Just(Term::Zero)];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Term::meet(l, r)),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Term::join(l, r)),
            (inner.clone(), inner).prop_map(|(l, r)| Term::diff(l, r)),
        ]
    })
}

fn arb_formula() -> impl Strategy<Value = Formula> {
    let atom = prop_oneof![
        (arb_term(), arb_term()).prop_map(|(s, t)| Formula::Sub(s, t)),
        (arb_term(), arb_term()).prop_map(|(s, t)| Formula::Eq(s, t)),
        (arb_term(), 0u64..7).prop_map(|(t, n)| Formula::CardEq(t, n)),
        (arb_term(), 0u64..7).prop_map(|(t, n)| Formula::CardGeq(t, n)),
    ];
    atom.prop_recursive(5, 48, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Formula::and(l, r)),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Formula::or(l, r)),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Formula::implies(l, r)),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Formula::iff(l, r)),
            (arb_var(), inner.clone()).prop_map(|(v, b)| Formula::exists(v, b)),
            (arb_var(), inner).prop_map(|(v, b)| Formula::forall(v, b)),
        ]
    })
}

proptest! {
    #[test]
    fn round_trip(f in arb_formula()) {
        let text = render(&f);
        let back = parse(&text).unwrap_or_else(|e| panic!("reparse of {text:?} failed: {e}"));
        prop_assert_eq!(back, f);
    }

    #[test]
    fn exists_removes_bound_variable(v in arb_var(), f in arb_formula()) {
        let free = Formula::exists(v.clone(), f.clone()).free_variables();
        let mut expected = f.free_variables();
        expected.retain(|x| *x != v);
        prop_assert_eq!(free, expected);
    }

    #[test]
    fn parser_never_panics(text in "[ -~]{0,40}") {
        let _ = parse(&text);
    }
}
