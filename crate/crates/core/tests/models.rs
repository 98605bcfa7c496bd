use wsts_core::models::*;
use wsts_core::wqo::*;
use wsts_testkit::generators::{random_counter_machine, random_lcs, random_vass, VassParams};
use wsts_testkit::rng;

fn cfg(q: usize, xs: &[u64]) -> Config<Vector> {
    Config::new(q, Vector(xs.to_vec()))
}

fn two_state(guard: &[u64], delta: &[i64], resets: &[usize]) -> VassModel {
    VassModel::builder(guard.len())
        .states(["q", "q'"])
        .transition("t", "q", "q'", "a", guard, delta, resets)
        .build()
        .unwrap()
}

/// Every configuration over `states` with counters in `0..=bound`.
fn vector_configs(states: usize, d: usize, bound: u64) -> Vec<Config<Vector>> {
    (0..states).flat_map(|q| vector_grid(d, bound).map(move |v| Config::new(q, v))).collect()
}

fn words_upto(max: usize) -> Vec<Word> {
    let mut out = vec![Word::default()];
    let mut layer = vec![Word::default()];
    for _ in 0..max {
        layer = layer
            .iter()
            .flat_map(|w| (0..2).map(move |a| Word([w.0.clone(), vec![a]].concat())))
            .collect();
        out.extend(layer.iter().cloned());
    }
    out
}

fn channel_configs(states: usize, channels: usize, max: usize) -> Vec<Config<Channels>> {
    let words = words_upto(max);
    let mut tuples: Vec<Vec<Word>> = vec![vec![]];
    for _ in 0..channels {
        tuples = tuples
            .into_iter()
            .flat_map(|t| words.iter().map(move |w| [t.clone(), vec![w.clone()]].concat()))
            .collect();
    }
    (0..states).flat_map(|q| tuples.iter().map(move |t| Config::new(q, Channels(t.clone())))).collect()
}

fn pre_contributions<M: PreBasis>(m: &M, target: &Config<M::Payload>) -> Vec<Config<M::Payload>> {
    m.pre_basis(target).into_iter().map(|(_, c)| c).collect()
}

#[test]
fn vass_successor_examples() {
    let m = VassModel::builder(2)
        .states(["q"])
        .transition("t1", "q", "q", "a", &[0, 0], &[1, 0], &[])
        .transition("t2", "q", "q", "b", &[1, 0], &[-1, 1], &[])
        .transition("t3", "q", "q", "c", &[0, 0], &[0, 0], &[0])
        .build()
        .unwrap();
    assert_eq!(m.successors(&cfg(0, &[0, 0])), vec![(0, cfg(0, &[1, 0])), (2, cfg(0, &[0, 0]))]);
    assert!(m.successors(&cfg(0, &[0, 0])).iter().all(|(t, _)| *t != 1));
    assert!(m.successors(&cfg(0, &[5, 3])).contains(&(2, cfg(0, &[0, 3]))));
}

#[test]
fn vass_pre_basis_examples() {
    // Frozen after brute force over entries <= 5 (see `vass_pre_basis_matches_one_step_oracle`).
    let m = two_state(&[1, 0], &[-1, 1], &[]);
    assert_eq!(pre_contributions(&m, &cfg(1, &[0, 2])), vec![cfg(0, &[1, 1])]);
    let m = two_state(&[0, 0], &[0, 0], &[1]);
    assert!(pre_contributions(&m, &cfg(1, &[0, 1])).is_empty());
    let m = two_state(&[2, 0], &[0, 0], &[]);
    assert_eq!(pre_contributions(&m, &cfg(1, &[1, 1])), vec![cfg(0, &[2, 1])]);
}

fn check_vass_pre_basis(m: &VassModel, target: &Config<Vector>, bound: u64) {
    let basis = MinBasis::minimize(pre_contributions(m, target));
    for x in vector_configs(m.states().len(), m.dimension(), bound) {
        let one_step = m.successors(&x).iter().any(|(_, y)| target.leq(y));
        assert_eq!(basis.contains(&x), one_step, "x = {x:?}, target = {target:?}, model = {m:?}");
    }
}

#[test]
fn vass_pre_basis_matches_one_step_oracle() {
    let mut r = rng(11);
    for _ in 0..60 {
        let m = random_vass(&mut r, VassParams { resets: true, ..VassParams::default() });
        let d = m.dimension();
        let bound = if d == 3 { 4 } else { 5 };
        for q in 0..m.states().len() {
            for t in vector_grid(d, 2) {
                check_vass_pre_basis(&m, &Config::new(q, t), bound);
            }
        }
    }
    let fixed = two_state(&[1, 0], &[-1, 1], &[]);
    check_vass_pre_basis(&fixed, &cfg(1, &[0, 2]), 5);
}

fn lcs(actions: Vec<ChannelAction>) -> LossyChannelMachine {
    let transitions = actions
        .into_iter()
        .enumerate()
        .map(|(i, action)| LcsTransition { name: format!("t{i}"), source: 0, target: 1, action })
        .collect();
    LossyChannelMachine::new(
        vec!["c".into()],
        vec![vec!["a".into(), "b".into()]],
        vec!["q".into(), "q'".into()],
        Config::new(0, Channels::empty(1)),
        transitions,
        Semantics::Lossy,
    )
    .unwrap()
}

fn chan(q: usize, letters: &[u32]) -> Config<Channels> {
    Config::new(q, Channels(vec![Word(letters.to_vec())]))
}

#[test]
fn lcs_successor_examples() {
    const A: u32 = 0;
    const B: u32 = 1;
    let send = lcs(vec![ChannelAction::Send { channel: 0, letter: A }]);
    assert_eq!(send.fire_perfect(0, &chan(0, &[B])), Some(chan(1, &[B, A])));
    let recv = lcs(vec![ChannelAction::Recv { channel: 0, letter: A }]);
    assert_eq!(recv.fire_perfect(0, &chan(0, &[A, B])), Some(chan(1, &[B])));
    assert_eq!(recv.fire_perfect(0, &chan(0, &[B, A])), None);
    let lossy: Vec<_> = recv.explore_successors(&chan(0, &[B, A])).unwrap();
    assert!(lossy.contains(&(0, chan(1, &[]))));
    let perfect = recv.with_semantics(Semantics::Perfect);
    assert!(perfect.explore_successors(&chan(0, &[B, A])).unwrap().is_empty());
}

#[test]
fn lcs_pre_basis_examples() {
    const A: u32 = 0;
    const B: u32 = 1;
    let send = lcs(vec![ChannelAction::Send { channel: 0, letter: A }]);
    assert_eq!(pre_contributions(&send, &chan(1, &[B, A])), vec![chan(0, &[B])]);
    assert_eq!(pre_contributions(&send, &chan(1, &[A, B])), vec![chan(0, &[A, B])]);
    let recv = lcs(vec![ChannelAction::Recv { channel: 0, letter: A }]);
    assert_eq!(pre_contributions(&recv, &chan(1, &[B])), vec![chan(0, &[A, B])]);
    assert!(recv.with_semantics(Semantics::Perfect).check_backward().is_err());
}

#[test]
fn lcs_pre_basis_matches_lossy_oracle() {
    let mut r = rng(12);
    for _ in 0..25 {
        let m = random_lcs(&mut r, 3, 5);
        let nc = m.channels().len();
        let max = if nc == 1 { 4 } else { 3 };
        let configs: Vec<_> = channel_configs(m.states().len(), nc, max)
            .into_iter()
            .map(|x| {
                let succ = m.explore_successors(&x).unwrap();
                (x, succ)
            })
            .collect();
        for target in channel_configs(m.states().len(), nc, 2) {
            let basis = MinBasis::minimize(pre_contributions(&m, &target));
            for (x, succ) in &configs {
                let one_step = succ.iter().any(|(_, y)| target.leq(y));
                assert_eq!(basis.contains(x), one_step, "x = {x:?}, target = {target:?}");
            }
        }
    }
}

/// `x <= x'` and `x -t-> y` imply some `x' -t-> y'` with `y <= y'`, strictly if asked.
fn grid_monotone(m: &VassModel, bound: u64, strict: bool) -> Option<(Vector, Vector, usize)> {
    let d = m.dimension();
    for x in vector_grid(d, bound) {
        for xp in vector_grid(d, bound) {
            if !leq_dickson(&x, &xp).unwrap() || (strict && x == xp) {
                continue;
            }
            for q in 0..m.states().len() {
                for t in 0..m.transitions().len() {
                    let Some(y) = m.fire(t, &Config::new(q, x.clone())) else { continue };
                    let ok = m.fire(t, &Config::new(q, xp.clone())).is_some_and(|yp| {
                        leq_dickson(&y.payload, &yp.payload).unwrap() && (!strict || y.payload != yp.payload)
                    });
                    if !ok {
                        return Some((x, xp, t));
                    }
                }
            }
        }
    }
    None
}

#[test]
fn plain_vass_is_strong_strict_on_grid() {
    let mut r = rng(13);
    for _ in 0..20 {
        let m = random_vass(&mut r, VassParams { max_dim: 2, ..VassParams::default() });
        assert_eq!(grid_monotone(&m, 6, false), None);
        assert_eq!(grid_monotone(&m, 6, true), None);
    }
}

#[test]
fn reset_vass_is_strong_but_not_strict() {
    let m = two_state(&[0, 0], &[1, 0], &[1]);
    assert_eq!(grid_monotone(&m, 6, false), None);
    let (x, xp, t) = grid_monotone(&m, 6, true).expect("strictness fails");
    assert_eq!((x.clone(), xp.clone(), t), (Vector(vec![0, 0]), Vector(vec![0, 1]), 0));
    let y = m.fire(t, &Config::new(0, x)).unwrap();
    let yp = m.fire(t, &Config::new(0, xp)).unwrap();
    assert_eq!(y, yp);
}

#[test]
fn zero_tests_break_monotonicity() {
    let mut r = rng(14);
    let mut seen = 0;
    for _ in 0..30 {
        let m = random_counter_machine(&mut r, 3, 4);
        let tested: Vec<usize> = m
            .instructions()
            .iter()
            .enumerate()
            .filter(|(_, i)| matches!(i.effect, Effect::ZeroTest(_)))
            .map(|(t, _)| t)
            .collect();
        if tested.is_empty() {
            continue;
        }
        seen += 1;
        // Witness: x -t-> y, x <= x', and t is disabled at x'.
        let witness = vector_grid(2, 3).find_map(|x| {
            tested.iter().find_map(|&t| {
                let q = m.instructions()[t].source;
                m.fire(t, &Config::new(q, x.clone()))?;
                vector_grid(2, 3)
                    .find(|xp| leq_dickson(&x, xp).unwrap() && m.fire(t, &Config::new(q, xp.clone())).is_none())
                    .map(|xp| (x.clone(), xp, t))
            })
        });
        assert!(witness.is_some(), "{m:?}");
    }
    assert!(seen > 5);
}

#[test]
fn pcm_encodings_agree_with_direct_semantics() {
    let mut r = rng(15);
    for _ in 0..10 {
        let m = random_vass(&mut r, VassParams { max_dim: 2, resets: true, ..VassParams::default() });
        let p = PcmModel::from_vass(&m);
        for c in vector_configs(m.states().len(), m.dimension(), 3) {
            assert_eq!(p.successors_within(&c, 5).unwrap(), m.successors(&c));
        }
    }
    for _ in 0..10 {
        let m = random_counter_machine(&mut r, 3, 4);
        let p = PcmModel::from_counter_machine(&m);
        for c in vector_configs(m.states().len(), 2, 3) {
            assert_eq!(p.successors_within(&c, 4).unwrap(), m.successors(&c));
        }
    }
}
