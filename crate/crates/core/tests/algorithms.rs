use wsts_core::algorithms::*;
use wsts_core::models::*;
use wsts_core::wqo::*;
use wsts_testkit::generators::{random_vass, random_vector_target, VassParams};
use wsts_testkit::oracles::lasso_oracle;
use wsts_testkit::rng;

fn cfg(q: usize, xs: &[u64]) -> Config<Vector> {
    Config::new(q, Vector(xs.to_vec()))
}

fn omega(q: usize, xs: &[Option<u64>]) -> Config<OmegaVector> {
    Config::new(
        q,
        OmegaVector(xs.iter().map(|x| x.map_or(OmegaNat::Omega, OmegaNat::Finite)).collect()),
    )
}

/// q0 produces on counter 1; t2 moves a token to counter 2 while entering q1.
fn producer_consumer() -> VassModel {
    VassModel::builder(2)
        .states(["q0", "q1"])
        .init("q0", &[0, 0])
        .transition("t1", "q0", "q0", "a", &[0, 0], &[1, 0], &[])
        .transition("t2", "q0", "q1", "b", &[1, 0], &[-1, 1], &[])
        .build()
        .unwrap()
}

fn single(d: usize, init: &[u64], ts: &[(&[u64], &[i64])]) -> VassModel {
    let mut b = VassModel::builder(d).states(["q"]).init("q", init);
    for (i, (g, delta)) in ts.iter().enumerate() {
        b = b.transition(&format!("t{}", i + 1), "q", "q", "a", g, delta, &[]);
    }
    b.build().unwrap()
}

fn budgets() -> Budgets {
    Budgets::default()
}

fn replay<M: PreBasis>(m: &M, init: &Config<M::Payload>, witness: &[usize]) -> Option<Config<M::Payload>> {
    witness.iter().try_fold(init.clone(), |c, &t| m.replay_step(&c, t))
}

#[test]
fn backward_examples() {
    let m = producer_consumer();
    let init = m.initial().clone();
    let oracle = bounded_forward_oracle(&m, &init, 8, 100_000).unwrap();

    let r = backward_coverability(&m, &init, &cfg(1, &[0, 1]), &budgets()).unwrap();
    assert!(oracle.covers(&cfg(1, &[0, 1])));
    assert!(r.coverable);
    assert_eq!(r.witness, Some(vec![0, 1]));

    let r = backward_coverability(&m, &init, &cfg(0, &[0, 1]), &budgets()).unwrap();
    assert!(!oracle.covers(&cfg(0, &[0, 1])));
    assert!(!r.coverable);
    assert_eq!(r.witness, None);

    let r = backward_coverability(&m, &init, &init, &budgets()).unwrap();
    assert_eq!(r.witness, Some(vec![]));
}

#[test]
fn control_state_examples() {
    let m = producer_consumer();
    let init = m.initial().clone();
    assert_eq!(control_state_reachability(&m, &init, "q0", &budgets()).unwrap().witness, Some(vec![]));
    let r = control_state_reachability(&m, &init, "q1", &budgets()).unwrap();
    assert!(r.coverable);
    assert!(bounded_forward_oracle(&m, &init, 8, 100_000).unwrap().reaches_state(1));

    let isolated = VassModel::builder(1)
        .states(["q", "island"])
        .transition("t", "q", "q", "a", &[0], &[1], &[])
        .build()
        .unwrap();
    let r = control_state_reachability(&isolated, isolated.initial(), "island", &budgets()).unwrap();
    assert!(!r.coverable);
    assert!(matches!(
        control_state_reachability(&isolated, isolated.initial(), "nowhere", &budgets()),
        Err(AnalysisError::UnknownState(_))
    ));
}

#[test]
fn karp_miller_examples() {
    let m = single(2, &[0, 0], &[(&[0, 0], &[1, 0])]);
    let tree = karp_miller(&m, m.initial(), &budgets()).unwrap();
    assert_eq!(tree.clover, vec![omega(0, &[None, Some(0)])]);
    let oracle = bounded_forward_oracle(&m, m.initial(), 10, 1000).unwrap();
    for n in 0..=10 {
        assert!(oracle.contains(&cfg(0, &[n, 0])));
    }
    assert!(oracle.reachable.iter().all(|c| c.payload.0[1] == 0));

    let m = single(1, &[3], &[(&[1], &[-1])]);
    let tree = karp_miller(&m, m.initial(), &budgets()).unwrap();
    assert_eq!(tree.clover, vec![omega(0, &[Some(3)])]);
    assert!(tree.is_bounded());

    let m = single(2, &[0, 0], &[(&[0, 0], &[1, 0]), (&[1, 0], &[-1, 1])]);
    let tree = karp_miller(&m, m.initial(), &budgets()).unwrap();
    assert_eq!(tree.clover, vec![omega(0, &[None, None])]);
    let oracle = bounded_forward_oracle(&m, m.initial(), 6, 100_000).unwrap();
    assert!(oracle.contains(&cfg(0, &[6, 0])) && oracle.contains(&cfg(0, &[0, 6])));

    let reset = VassModel::builder(1)
        .states(["q"])
        .transition("t", "q", "q", "a", &[0], &[0], &[0])
        .build()
        .unwrap();
    assert!(matches!(karp_miller(&reset, reset.initial(), &budgets()), Err(AnalysisError::Unsupported(_))));
}

#[test]
fn boundedness_examples() {
    let m = single(1, &[0], &[(&[0], &[1])]);
    let r = boundedness(&m, m.initial(), &budgets()).unwrap();
    assert!(!r.bounded);
    assert!(r.witness.unwrap().validate(&m, m.initial()));

    let m = single(1, &[5], &[(&[1], &[-1])]);
    assert!(boundedness(&m, m.initial(), &budgets()).unwrap().bounded);

    let m = producer_consumer();
    let r = boundedness(&m, m.initial(), &budgets()).unwrap();
    assert!(!r.bounded);
    let w = r.witness.unwrap();
    assert!(w.strict && w.validate(&m, m.initial()));
    let oracle = bounded_forward_oracle(&m, m.initial(), 8, 100_000).unwrap();
    assert!((0..=8).all(|n| oracle.contains(&cfg(0, &[n, 0]))));
}

#[test]
fn termination_examples() {
    let m = single(1, &[3], &[(&[1], &[-1])]);
    assert!(termination(&m, m.initial(), &budgets()).unwrap().terminates);

    let m = single(1, &[0], &[(&[0], &[0])]);
    let r = termination(&m, m.initial(), &budgets()).unwrap();
    let w = r.witness.unwrap();
    assert!(!r.terminates && !w.strict && w.ancestor == w.descendant);

    let m = single(2, &[0, 0], &[(&[0, 0], &[1, 0])]);
    let r = termination(&m, m.initial(), &budgets()).unwrap();
    let w = r.witness.unwrap();
    assert!(!r.terminates && w.strict && w.validate(&m, m.initial()));
}

#[test]
fn oracle_examples() {
    let m = single(1, &[2], &[(&[1], &[-1])]);
    let r = bounded_forward_oracle(&m, m.initial(), 8, 1000).unwrap();
    assert_eq!(r.reachable, vec![cfg(0, &[2]), cfg(0, &[1]), cfg(0, &[0])]);
    assert!(r.conclusive);

    let m = single(1, &[0], &[(&[0], &[1])]);
    let r = bounded_forward_oracle(&m, m.initial(), 4, 1000).unwrap();
    assert!(!r.conclusive && r.hit_cutoff);

    let m = single(1, &[7], &[]);
    let r = bounded_forward_oracle(&m, m.initial(), 8, 1000).unwrap();
    assert_eq!(r.reachable, vec![cfg(0, &[7])]);
    assert!(r.conclusive);
}

#[test]
fn reset_machines_are_handled_where_sound() {
    let m = VassModel::builder(1)
        .states(["q", "r"])
        .init("q", &[2])
        .transition("t", "q", "r", "a", &[0], &[1], &[0])
        .transition("u", "r", "q", "b", &[0], &[1], &[])
        .build()
        .unwrap();
    let r = backward_coverability(&m, m.initial(), &cfg(0, &[2]), &budgets()).unwrap();
    assert_eq!(r.witness, Some(vec![]));
    assert!(!backward_coverability(&m, m.initial(), &cfg(1, &[1]), &budgets()).unwrap().coverable);
    assert!(!termination(&m, m.initial(), &budgets()).unwrap().terminates);
    assert!(matches!(boundedness(&m, m.initial(), &budgets()), Err(AnalysisError::Unsupported(_))));
}

/// Saturation redone step by step with whole-basis rounds.
fn naive_saturation<M: PreBasis>(m: &M, target: &Config<M::Payload>) -> Vec<MinBasis<Config<M::Payload>>> {
    let mut rounds = vec![MinBasis::minimize([target.clone()])];
    loop {
        let k = rounds.last().unwrap();
        let pre = k.iter().flat_map(|e| m.pre_basis(e)).map(|(_, c)| c);
        let next = k.union(&MinBasis::minimize(pre));
        if k.includes(&next) {
            return rounds;
        }
        rounds.push(next);
    }
}

#[test]
fn saturation_is_monotone_and_reaches_a_fixpoint() {
    let mut r = rng(21);
    for _ in 0..40 {
        let m = random_vass(&mut r, VassParams { resets: true, ..VassParams::default() });
        let target = random_vector_target(&mut r, m.states().len(), m.dimension(), 3);
        let rounds = naive_saturation(&m, &target);
        for w in rounds.windows(2) {
            assert!(w[1].includes(&w[0]));
        }
        let result = backward_coverability(&m, m.initial(), &target, &budgets()).unwrap();
        let last = rounds.last().unwrap();
        assert!(result.basis.includes(last) && last.includes(&result.basis));
        let pre = MinBasis::minimize(result.basis.iter().flat_map(|e| m.pre_basis(e)).map(|(_, c)| c));
        assert!(result.basis.includes(&pre));
        assert_eq!(result.coverable, result.basis.contains(m.initial()));
    }
}

#[test]
fn random_vass_agree_with_oracles() {
    let mut r = rng(22);
    let mut conclusive = 0;
    let mut exact = 0;
    let mut lassos = 0;
    for _ in 0..100 {
        let m = random_vass(&mut r, VassParams::default());
        let init = m.initial().clone();
        let target = random_vector_target(&mut r, m.states().len(), m.dimension(), 3);

        let back = backward_coverability(&m, &init, &target, &budgets()).unwrap();
        if let Some(w) = &back.witness {
            assert!(target.leq(&replay(&m, &init, w).unwrap()));
        }
        let oracle = bounded_forward_oracle(&m, &init, 8, 200_000).unwrap();
        if oracle.conclusive {
            conclusive += 1;
            assert_eq!(back.coverable, oracle.covers(&target), "{m:?} {target:?}");
        } else if oracle.covers(&target) {
            assert!(back.coverable);
        }

        let km = karp_miller(&m, &init, &budgets()).unwrap();
        assert_eq!(back.coverable, km.covers(&target));
        let small = bounded_forward_oracle(&m, &init, 6, 200_000).unwrap();
        assert!(small.reachable.iter().all(|c| km.covers(c)));
        if km.is_bounded() && small.conclusive {
            exact += 1;
            let mut maximal: Vec<_> =
                small.maximal().iter().map(|c| Config::new(c.control, OmegaVector::from(&c.payload))).collect();
            maximal.sort();
            assert_eq!(km.clover, maximal);
        }

        let term = termination(&m, &init, &budgets()).unwrap();
        let bound = boundedness(&m, &init, &budgets()).unwrap();
        assert_eq!(bound.bounded, km.is_bounded());
        if let Some(w) = &term.witness {
            assert!(w.validate(&m, &init) && w.ancestor.leq(&w.descendant));
        }
        if let Some(w) = &bound.witness {
            assert!(w.strict && w.validate(&m, &init));
        }
        let lasso = lasso_oracle(&m, &init, |c| c.payload.exceeds(8), 200_000);
        if lasso.has_cycle {
            lassos += 1;
        }
        if let Some(t) = lasso.terminates() {
            assert_eq!(term.terminates, t, "{m:?}");
        }
        if let Some(b) = lasso.bounded() {
            assert_eq!(bound.bounded, b);
        }
    }
    assert!(conclusive >= 30, "only {conclusive} conclusive instances");
    assert!(exact >= 20, "only {exact} exactness checks");
    assert!(lassos >= 10, "only {lassos} lassos");
}

#[test]
fn dot_output_marks_acceleration_and_subsumption() {
    let m = producer_consumer();
    let km = karp_miller(&m, m.initial(), &budgets()).unwrap();
    let dot = km_to_dot(&m, &km);
    assert!(dot.starts_with("digraph km {"));
    assert!(dot.contains("dashed"));
    let rrt = termination(&m, m.initial(), &budgets()).unwrap().tree;
    let dot = rrt_to_dot(&m, &rrt);
    assert!(dot.starts_with("digraph rrt {") && dot.contains("doublecircle"));
}
