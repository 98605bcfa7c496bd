use std::collections::BTreeMap;

use proptest::prelude::*;
use rand::Rng;
use wsts_presburger::*;
use wsts_testkit::formulas::{free_var_names, random_formula, FormulaParams, CURATED_SENTENCES};
use wsts_testkit::rng;

#[test]
fn curated_sentences_decide_correctly() {
    for (src, expected) in CURATED_SENTENCES {
        let f = parse_formula(src).unwrap();
        assert!(f.free_vars().is_empty(), "{src}");
        assert_eq!(decide_sentence(&f).unwrap(), expected, "{src}");
    }
}

#[test]
fn qe_agrees_with_bounded_evaluation() {
    let p = FormulaParams::default();
    let names = free_var_names(p.free_vars);
    let mut r = rng(51);
    let mut quantified = 0;
    for _ in 0..200 {
        let rf = random_formula(&mut r, &p);
        quantified += usize::from(rf.quantifier_count() > 0);
        let f = parse_formula(&rf.to_source()).unwrap();
        let qf = qe_cooper(&f).unwrap();
        assert!(qf.free_vars().iter().all(|v| names.contains(v)));
        for _ in 0..50 {
            let mut env: BTreeMap<String, i128> = names.iter().map(|v| (v.clone(), r.gen_range(0..=50))).collect();
            let expected = rf.eval(&mut env);
            assert_eq!(eval_assignment(&qf, &env).unwrap(), expected, "{} at {env:?}", rf.to_source());
        }
    }
    assert!(quantified > 100);
}

#[test]
fn cooper_path_agrees_with_bounded_evaluation() {
    // Interval expansion off: every quantifier goes through the full construction,
    // whose cost grows quickly with nesting depth.
    let config = QeConfig { max_nodes: 200_000, interval_limit: 0 };
    let p = FormulaParams { max_quantifiers: 2, ..FormulaParams::default() };
    let names = free_var_names(p.free_vars);
    let mut r = rng(52);
    for _ in 0..100 {
        let rf = random_formula(&mut r, &p);
        let qf = eliminate_quantifiers(&parse_formula(&rf.to_source()).unwrap(), config).unwrap();
        for _ in 0..20 {
            let mut env: BTreeMap<String, i128> = names.iter().map(|v| (v.clone(), r.gen_range(0..=50))).collect();
            let expected = rf.eval(&mut env);
            assert_eq!(eval_assignment(&qf, &env).unwrap(), expected, "{} at {env:?}", rf.to_source());
        }
    }
}

#[test]
fn spec_elimination_examples() {
    let qe = |s: &str| qe_cooper(&parse_formula(s).unwrap()).unwrap();
    let env: BTreeMap<String, i128> = [("x".to_string(), 0)].into();
    for x in -5..=5 {
        let env: BTreeMap<String, i128> = [("x".to_string(), x)].into();
        assert!(eval_assignment(&qe("E y. y = x + 1"), &env).unwrap());
        assert!(eval_assignment(&qe("E y. x = 2 * y \\/ x = 2 * y + 1"), &env).unwrap());
    }
    assert!(!eval_assignment(&qe("E x. 2 * x = 3"), &env).unwrap());
}

#[test]
fn eval_examples() {
    let eval = |s: &str, vals: &[(&str, i128)]| {
        let env: BTreeMap<String, i128> = vals.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        eval_assignment(&parse_formula(s).unwrap(), &env)
    };
    assert!(eval("x <= 3", &[("x", 2)]).unwrap());
    assert!(!eval("3 | x", &[("x", 4)]).unwrap());
    assert!(eval("x = y", &[("x", 7), ("y", 7)]).unwrap());
    assert!(eval("x = y", &[("x", 7)]).is_err());
}

#[test]
fn size_budget_fails_loudly() {
    let f = parse_formula("A x. A y. A z. E w. 7 | x + 3 * y + 5 * z + w /\\ 11 | 2 * w - x").unwrap();
    let small = eliminate_quantifiers(&f, QeConfig { max_nodes: 10, interval_limit: 0 });
    assert!(small.is_err());
}

fn term() -> impl Strategy<Value = String> {
    (prop::collection::vec((-4i128..=4, 0usize..3), 1..3), -6i128..=6).prop_map(|(parts, k)| {
        let names = ["x", "y", "z"];
        let mut s = String::from("0");
        for (c, v) in parts {
            s.push_str(&format!(" + {c} * {}", names[v]));
        }
        format!("{s} + {k}")
    })
}

fn formula() -> impl Strategy<Value = String> {
    let atom = prop_oneof![
        (term(), term()).prop_map(|(a, b)| format!("{a} <= {b}")),
        (term(), term()).prop_map(|(a, b)| format!("{a} = {b}")),
        (term(), term()).prop_map(|(a, b)| format!("{a} != {b}")),
        (2i128..6, term()).prop_map(|(m, t)| format!("{m} | {t}")),
    ];
    atom.prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|f| format!("~({f})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a}) /\\ ({b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a}) \\/ ({b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a}) -> ({b})")),
            inner.clone().prop_map(|f| format!("E y. {f}")),
            inner.prop_map(|f| format!("A z. {f}")),
        ]
    })
}

proptest! {
    #[test]
    fn display_round_trips(src in formula()) {
        let f = parse_formula(&src).unwrap();
        let again = parse_formula(&f.to_string()).unwrap();
        prop_assert_eq!(&again, &f);
        let qf = qe_cooper(&f).unwrap();
        prop_assert_eq!(parse_formula(&qf.to_string()).unwrap(), qf);
    }

    #[test]
    fn quantifier_free_output_is_equivalent_on_samples(src in formula(), x in -20i128..20, y in -20i128..20, z in -20i128..20) {
        // Quantifier-free inputs: QE must not change their meaning.
        let f = parse_formula(&src).unwrap();
        prop_assume!(f.to_string().chars().all(|c| c != 'E' && c != 'A'));
        let env: BTreeMap<String, i128> = [("x".into(), x), ("y".into(), y), ("z".into(), z)].into();
        let qf = qe_cooper(&f).unwrap();
        prop_assert_eq!(eval_assignment(&qf, &env).unwrap(), eval_assignment(&f, &env).unwrap());
    }

    #[test]
    fn term_round_trips(src in term()) {
        let t = parse_term(&src).unwrap();
        prop_assert_eq!(parse_term(&t.to_string()).unwrap(), t);
    }
}
