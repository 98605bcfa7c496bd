use wsts_core::abstraction::zero_tests_to_resets;
use wsts_core::models::*;
use wsts_core::monotonicity::*;
use wsts_core::wqo::*;
use wsts_presburger::{parse_formula, Formula};
use wsts_testkit::generators::{random_affine_pcm, random_counter_machine, AffinePcm};
use wsts_testkit::oracles::grid_monotone;
use wsts_testkit::rng;

fn pcm(d: usize, steps: &[&str]) -> PcmModel {
    let transitions = steps
        .iter()
        .enumerate()
        .map(|(i, s)| PcmTransition {
            name: format!("t{}", i + 1),
            source: 0,
            target: 0,
            label: format!("a{}", i + 1),
            step: parse_formula(s).unwrap(),
        })
        .collect();
    PcmModel::new(d, vec!["q".into()], Config::new(0, Vector::zeros(d)), transitions).unwrap()
}

fn ints(v: &Vector) -> Vec<i64> {
    v.0.iter().map(|&x| x as i64).collect()
}

/// Affine steps are functional, so the larger source has at most one successor.
fn refutes(p: &AffinePcm, t: usize, c: &Counterexample) -> bool {
    let (x, z, y) = (ints(&c.x), ints(&c.x_prime), ints(&c.y));
    if !p.holds(t, &x, &y) || x.iter().zip(&z).any(|(a, b)| a > b) {
        return false;
    }
    let w: Vec<i64> = p.steps[t].iter().zip(&z).map(|(u, zi)| u.a * zi + u.b).collect();
    let matched = p.holds(t, &z, &w) && y.iter().zip(&w).all(|(a, b)| a <= b) && (!c.strict || y != w);
    !matched
}

#[test]
fn checker_agrees_with_grid_on_random_affine_machines() {
    let mut r = rng(41);
    let (mut held, mut failed) = (0, 0);
    for _ in 0..50 {
        let p = random_affine_pcm(&mut r);
        let m = p.to_pcm();
        let dickson = dickson_ordering(p.dimension);
        for (kind, strict) in [(MonotonicityKind::Strong, false), (MonotonicityKind::StrongStrict, true)] {
            let v = check_strong_monotonicity(&m, &dickson, kind).unwrap();
            assert_eq!(v.holds, grid_monotone(&p, strict, 6), "{p:?} {kind:?}");
            if v.holds {
                held += 1;
            } else {
                failed += 1;
                let c = v.counterexample.unwrap();
                let t = m.transitions().iter().position(|tr| tr.name == c.transition).unwrap();
                assert!(refutes(&p, t, &c), "{p:?} {c:?}");
            }
        }
    }
    assert!(held >= 10 && failed >= 10, "held {held}, failed {failed}");
}

#[test]
fn model_class_verdicts() {
    let d = dickson_ordering(2);
    let vass = pcm(2, &["x1' = x1 + 1 /\\ x2' = x2", "x1 >= 1 /\\ x1' = x1 - 1 /\\ x2' = x2 + 1"]);
    for kind in [MonotonicityKind::Strong, MonotonicityKind::StrongStrict] {
        let v = check_strong_monotonicity(&vass, &d, kind).unwrap();
        assert!(v.holds && v.counterexample.is_none());
    }

    let reset = pcm(2, &["x1' = 0 /\\ x2' = x2 + 1"]);
    assert!(check_strong_monotonicity(&reset, &d, MonotonicityKind::Strong).unwrap().holds);
    let v = check_strong_monotonicity(&reset, &d, MonotonicityKind::StrongStrict).unwrap();
    let c = v.counterexample.unwrap();
    assert!(!v.holds && c.strict);
    assert_eq!((c.x.clone(), c.x_prime.clone(), c.y.clone()), (Vector(vec![0, 0]), Vector(vec![1, 0]), Vector(vec![0, 1])));

    let zero = pcm(1, &["x1 = 0 /\\ x1' = x1 + 1"]);
    let v = check_strong_monotonicity(&zero, &dickson_ordering(1), MonotonicityKind::Strong).unwrap();
    let c = v.counterexample.unwrap();
    assert!(!v.holds && !c.strict);
    assert_eq!((c.x, c.x_prime, c.y), (Vector(vec![0]), Vector(vec![1]), Vector(vec![1])));
}

#[test]
fn verdicts_match_exhaustive_grid() {
    // The three classes, checked against plain arithmetic on entries <= 6.
    use wsts_testkit::generators::{AffineGuard, AffineUpdate};
    let inc = |b| AffineUpdate { guard: None, a: 1, b };
    let vass = AffinePcm {
        dimension: 2,
        steps: vec![vec![inc(1), inc(0)], vec![AffineUpdate { guard: Some(AffineGuard::AtLeast(1)), a: 1, b: -1 }, inc(1)]],
    };
    let reset = AffinePcm { dimension: 2, steps: vec![vec![AffineUpdate { guard: None, a: 0, b: 0 }, inc(1)]] };
    let zero = AffinePcm { dimension: 1, steps: vec![vec![AffineUpdate { guard: Some(AffineGuard::Zero), a: 1, b: 1 }]] };
    for (p, strong, strict) in [(&vass, true, true), (&reset, true, false), (&zero, false, false)] {
        let m = p.to_pcm();
        let d = dickson_ordering(p.dimension);
        assert_eq!(grid_monotone(p, false, 6), strong);
        assert_eq!(grid_monotone(p, true, 6), strict);
        assert_eq!(check_strong_monotonicity(&m, &d, MonotonicityKind::Strong).unwrap().holds, strong);
        assert_eq!(check_strong_monotonicity(&m, &d, MonotonicityKind::StrongStrict).unwrap().holds, strict);
    }
}

#[test]
fn abstractions_are_strongly_monotone() {
    let mut r = rng(42);
    for _ in 0..15 {
        let cm = random_counter_machine(&mut r, 3, 4);
        let source = PcmModel::from_counter_machine(&cm);
        let (abs, _) = zero_tests_to_resets(&cm);
        let v = check_strong_monotonicity(&PcmModel::from_vass(&abs), &dickson_ordering(2), MonotonicityKind::Strong)
            .unwrap();
        assert!(v.holds);
        let src = check_strong_monotonicity(&source, &dickson_ordering(2), MonotonicityKind::Strong).unwrap();
        assert_eq!(src.holds, !cm.has_zero_tests());
    }
}

#[test]
fn sentences_cover_each_label() {
    let m = pcm(1, &["x1' = x1 + 1", "x1 >= 1 /\\ x1' = x1 - 1"]);
    let d = dickson_ordering(1);
    assert_eq!(monotonicity_sentences(&m, &d, MonotonicityKind::Strong).unwrap().len(), 2);
    assert_eq!(monotonicity_sentences(&m, &d, MonotonicityKind::StrongStrict).unwrap().len(), 4);
    let empty = PcmModel::new(1, vec!["q".into()], Config::new(0, Vector::zeros(1)), vec![]).unwrap();
    assert_eq!(monotonicity_sentence(&empty, &d, MonotonicityKind::Strong).unwrap(), Formula::True);
    assert!(matches!(
        check_strong_monotonicity(&m, &dickson_ordering(2), MonotonicityKind::Strong),
        Err(MonotonicityError::Arity { .. })
    ));
}

#[test]
fn ordering_axioms() {
    let qo = |s: &str, d| ordering_axioms_check(&parse_formula(s).unwrap(), d).unwrap();
    assert!(qo("u1 <= v1", 1).is_quasi_ordering());
    assert!(qo("2 | u1 - v1", 1).is_quasi_ordering());
    let strict = qo("u1 < v1", 1);
    assert!(!strict.reflexive && strict.transitive);
    let near = qo("u1 <= v1 + 1", 1);
    assert!(near.reflexive && !near.transitive);
}

#[test]
fn wellness_screen() {
    let f = |s: &str| parse_formula(s).unwrap();
    assert!(certify_extends_dickson(&dickson_ordering(2), 2).unwrap());
    assert!(certify_extends_dickson(&f("u1 + u2 <= v1 + v2"), 2).unwrap());
    assert!(!certify_extends_dickson(&f("v1 <= u1"), 1).unwrap());

    let reverse = refute_wellness_bounded(&f("v1 <= u1"), 1, 10).unwrap().unwrap();
    assert_eq!(reverse.descending_chain.len(), 10);
    assert!(!reverse.conclusive);
    let equality = refute_wellness_bounded(&f("u1 = v1"), 1, 10).unwrap().unwrap();
    assert_eq!(equality.antichain.len(), 10);
    assert_eq!(refute_wellness_bounded(&dickson_ordering(1), 1, 10).unwrap(), None);
    // The antidiagonal is an antichain of `bound` points, so the grid flags a genuine wqo.
    let grid = refute_wellness_bounded(&dickson_ordering(2), 2, 10).unwrap().unwrap();
    assert_eq!(grid.antichain.len(), 10);
    assert!(grid.antichain.iter().all(|p| p.0.iter().sum::<u64>() == 9));
}

#[test]
fn enumeration_order_is_fixed() {
    let first: Vec<String> = enumerate_orderings(2, 100).take(5).map(|f| f.to_string()).collect();
    assert_eq!(first, ["u1 <= v1", "0 <= u1 + v1", "v1 <= u1", "0 <= u1 + v2", "u2 <= v2"]);
    // The budget counts raw candidates, including those failing the axioms.
    let mut e = enumerate_orderings(2, 5);
    assert_eq!(e.by_ref().count(), 2);
    assert_eq!(e.stats().candidates, 5);
    assert_eq!(enumerate_orderings(1, 1).next(), Some(dickson_ordering(1)));

    let again: Vec<String> = enumerate_orderings(2, 100).take(5).map(|f| f.to_string()).collect();
    assert_eq!(first, again);
    for psi in enumerate_orderings(2, 60) {
        assert!(ordering_axioms_check(&psi, 2).unwrap().is_quasi_ordering(), "{psi}");
    }
}

#[test]
fn search_contract() {
    let vass = pcm(1, &["x1' = x1 + 1", "x1 >= 1 /\\ x1' = x1 - 1"]);
    let out = find_structuring_ordering(&vass, MonotonicityKind::StrongStrict, 10).unwrap();
    let (psi, verdict) = out.found.unwrap();
    assert_eq!(psi, dickson_ordering(1));
    assert!(verdict.holds);
    assert_eq!(out.stats.monotonicity_checks, 1);

    let zero = pcm(1, &["x1 = 0 /\\ x1' = x1 + 1"]);
    let out = find_structuring_ordering(&zero, MonotonicityKind::Strong, 10).unwrap();
    assert!(out.found.is_none());
    assert!(out.stats.enumeration.candidates <= 10 && out.stats.monotonicity_checks > 0);

    let idle = PcmModel::new(1, vec!["q".into()], Config::new(0, Vector::zeros(1)), vec![]).unwrap();
    let out = find_structuring_ordering(&idle, MonotonicityKind::Strong, 10).unwrap();
    assert_eq!(out.found.unwrap().0, dickson_ordering(1));
}

#[test]
fn decrement_is_monotone_exhaustively() {
    use wsts_testkit::generators::{AffineGuard, AffineUpdate};
    let p = AffinePcm {
        dimension: 1,
        steps: vec![vec![AffineUpdate { guard: Some(AffineGuard::AtLeast(1)), a: 1, b: -1 }]],
    };
    let m = p.to_pcm();
    let sentence = monotonicity_sentence(&m, &dickson_ordering(1), MonotonicityKind::Strong).unwrap();
    assert!(wsts_presburger::decide_sentence(&sentence).unwrap());
    assert!(grid_monotone(&p, false, 6));
}

#[test]
fn near_order_transitivity_witness() {
    let psi = parse_formula("u1 <= v1 + 1").unwrap();
    let holds = |u: i128, v: i128| {
        psi.instantiate([("u1", u), ("v1", v)]).unwrap().eval(&|_| None).unwrap()
    };
    assert!(holds(2, 1) && holds(1, 0) && !holds(2, 0));
}
