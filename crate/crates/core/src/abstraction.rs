//! Monotonic abstractions: transforms that turn a machine into an
//! over-approximating well-structured one, plus a bounded simulation check.

use std::collections::BTreeMap;

use crate::models::{
    CounterMachine, Effect, LossyChannelMachine, ModelError, Semantics, TransitionSystem,
    VassModel, VassTransition,
};
use crate::wqo::{vector_grid, Config, QuasiOrder, Vector};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbstractionReport {
    pub source: String,
    pub transform: String,
    /// Source instruction id to produced transition id; total on the source.
    pub mapping: BTreeMap<String, String>,
    pub notes: Vec<String>,
}

impl AbstractionReport {
    pub fn with_source(mut self, source: impl Into<String>) -> Self {
        self.source = source.into();
        self
    }
}

fn abstract_counter_machine(m: &CounterMachine, reset: bool) -> (VassModel, AbstractionReport) {
    let d = m.dimension();
    let mut mapping = BTreeMap::new();
    let mut tests = 0;
    let transitions = m
        .instructions()
        .iter()
        .map(|ins| {
            let mut guard = Vector::zeros(d);
            let mut delta = vec![0i64; d];
            let mut resets = Vec::new();
            match ins.effect {
                Effect::Inc(i) => delta[i] = 1,
                Effect::Dec(i) => {
                    guard.0[i] = 1;
                    delta[i] = -1;
                }
                Effect::ZeroTest(i) => {
                    tests += 1;
                    if reset {
                        resets.push(i);
                    }
                }
            }
            mapping.insert(ins.name.clone(), ins.name.clone());
            VassTransition {
                name: ins.name.clone(),
                source: ins.source,
                target: ins.target,
                label: ins.name.clone(),
                guard,
                delta,
                resets,
            }
        })
        .collect();
    let vass = VassModel::new(d, m.states().to_vec(), m.initial().clone(), transitions)
        .expect("a valid counter machine abstracts to a valid VASS");
    let (transform, what) = if reset { ("reset", "replaced by resets") } else { ("drop-zero", "removed") };
    let notes = vec![format!("{tests} zero test(s) {what}")];
    let report = AbstractionReport { source: String::new(), transform: transform.into(), mapping, notes };
    (vass, report)
}

/// Zero tests become unguarded no-op transitions.
pub fn drop_zero_tests(m: &CounterMachine) -> (VassModel, AbstractionReport) {
    abstract_counter_machine(m, false)
}

/// Zero tests become resets of the tested counter.
pub fn zero_tests_to_resets(m: &CounterMachine) -> (VassModel, AbstractionReport) {
    abstract_counter_machine(m, true)
}

pub fn lossy_abstraction(m: &LossyChannelMachine) -> LossyChannelMachine {
    m.with_semantics(Semantics::Lossy)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SimulationVerdict {
    /// Every step from a configuration within the bound is matched.
    Simulates { checked: usize },
    Counterexample {
        source: Config<Vector>,
        instruction: String,
        successor: Config<Vector>,
    },
}

/// Checks that every step `x -> y` of `source` with counters of `x` in
/// `0..=bound` is matched by the mapped transition of `abstract_model`
/// from the same configuration, reaching some `y' >= y`. Control states are
/// identified by name.
pub fn simulation_check_bounded(
    source: &CounterMachine,
    abstract_model: &VassModel,
    mapping: &BTreeMap<String, String>,
    bound: u64,
) -> Result<SimulationVerdict, ModelError> {
    let state_map: Vec<usize> = source
        .states()
        .iter()
        .map(|q| abstract_model.state_id(q).ok_or_else(|| ModelError::UnknownState(q.clone())))
        .collect::<Result<_, _>>()?;
    let names: BTreeMap<&str, usize> =
        (0..abstract_model.transition_count()).map(|t| (abstract_model.transition_name(t), t)).collect();
    let mut checked = 0;
    for (q, &aq) in state_map.iter().enumerate() {
        for x in vector_grid(source.dimension(), bound) {
            let c = Config::new(q, x);
            for (i, y) in source.successors(&c) {
                checked += 1;
                let name = source.transition_name(i);
                let matched = mapping
                    .get(name)
                    .and_then(|t| names.get(t.as_str()))
                    .and_then(|&t| abstract_model.fire(t, &Config::new(aq, c.payload.clone())))
                    .is_some_and(|z| z.control == state_map[y.control] && y.payload.leq(&z.payload));
                if !matched {
                    return Ok(SimulationVerdict::Counterexample {
                        source: c,
                        instruction: name.to_string(),
                        successor: y,
                    });
                }
            }
        }
    }
    Ok(SimulationVerdict::Simulates { checked })
}
