use std::collections::BTreeMap;

use wsts_presburger::{qe_cooper, Formula, PresburgerError, Term, Var};

use crate::models::{check_unique, CounterMachine, Effect, ModelError, TransitionSystem, VassModel};
use crate::wqo::{vector_grid, Config, StateId, Vector};

/// Name of the current value of counter `i` (zero-based), as in `x1`.
pub fn counter_var(i: usize) -> Var {
    format!("x{}", i + 1)
}

/// Name of the next value of counter `i` (zero-based), as in `x1'`.
pub fn next_var(i: usize) -> Var {
    format!("x{}'", i + 1)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PcmTransition {
    pub name: String,
    pub source: StateId,
    pub target: StateId,
    pub label: String,
    /// Relation between `x1..xd` and `x1'..xd'`. A primed variable the
    /// formula does not mention is unconstrained.
    pub step: Formula,
}

/// A counter machine whose steps are Presburger relations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PcmModel {
    dimension: usize,
    states: Vec<String>,
    transitions: Vec<PcmTransition>,
    /// Quantifier-free equivalents of the step formulas.
    compiled: Vec<Formula>,
    init: Config<Vector>,
}

impl PcmModel {
    pub fn new(
        dimension: usize,
        states: Vec<String>,
        init: Config<Vector>,
        transitions: Vec<PcmTransition>,
    ) -> Result<Self, ModelError> {
        if states.is_empty() {
            return Err(ModelError::NoStates);
        }
        check_unique(&states, ModelError::DuplicateState)?;
        check_unique(transitions.iter().map(|t| &t.name), ModelError::DuplicateTransition)?;
        if init.control >= states.len() {
            return Err(ModelError::UnknownState(format!("#{}", init.control)));
        }
        if init.payload.dim() != dimension {
            return Err(ModelError::Dimension {
                what: "initial marking".into(),
                expected: dimension,
                found: init.payload.dim(),
            });
        }
        let allowed: Vec<Var> = (0..dimension).flat_map(|i| [counter_var(i), next_var(i)]).collect();
        let mut compiled = Vec::with_capacity(transitions.len());
        for t in &transitions {
            if t.source >= states.len() || t.target >= states.len() {
                return Err(ModelError::UnknownState(format!("endpoint of {}", t.name)));
            }
            if let Some(v) = t.step.free_vars().into_iter().find(|v| !allowed.contains(v)) {
                return Err(ModelError::ForeignVariable { transition: t.name.clone(), var: v });
            }
            let qf = qe_cooper(&t.step).map_err(|e| {
                ModelError::Unsupported(format!("step formula of `{}`: {e}", t.name))
            })?;
            compiled.push(qf);
        }
        Ok(PcmModel { dimension, states, transitions, compiled, init })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn transitions(&self) -> &[PcmTransition] {
        &self.transitions
    }

    pub fn initial(&self) -> &Config<Vector> {
        &self.init
    }

    pub fn state_id(&self, name: &str) -> Option<StateId> {
        self.states.iter().position(|s| s == name)
    }

    /// The step relation of transition `t` over `x1..xd, x1'..xd'`.
    pub fn pcm_step_formula(&self, t: usize) -> Formula {
        self.transitions[t].step.clone()
    }

    /// Whether `x -> y` is an instance of the step relation of `t`; ignores control.
    pub fn step_holds(&self, t: usize, x: &Vector, y: &Vector) -> Result<bool, PresburgerError> {
        let mut env: BTreeMap<Var, i128> = BTreeMap::new();
        for i in 0..self.dimension {
            env.insert(counter_var(i), i128::from(x.0[i]));
            env.insert(next_var(i), i128::from(y.0[i]));
        }
        self.compiled[t].eval(&|v| env.get(v).copied())
    }

    /// Successors whose counters all lie in `0..=bound`.
    pub fn successors_within(
        &self,
        c: &Config<Vector>,
        bound: u64,
    ) -> Result<Vec<(usize, Config<Vector>)>, PresburgerError> {
        let mut out = Vec::new();
        for (t, tr) in self.transitions.iter().enumerate() {
            if tr.source != c.control {
                continue;
            }
            for y in vector_grid(self.dimension, bound) {
                if self.step_holds(t, &c.payload, &y)? {
                    out.push((t, Config::new(tr.target, y)));
                }
            }
        }
        Ok(out)
    }

    /// Encodes a VASS (resets included) transition by transition.
    pub fn from_vass(m: &VassModel) -> Self {
        let d = m.dimension();
        let transitions = m
            .transitions()
            .iter()
            .map(|t| {
                let mut parts = Vec::new();
                for i in 0..d {
                    let x = Term::var(counter_var(i));
                    let y = Term::var(next_var(i));
                    parts.push(Formula::ge(x.clone(), Term::constant(i128::from(t.guard.0[i]))));
                    if t.resets.contains(&i) {
                        parts.push(Formula::eq(y, Term::constant(0)));
                    } else {
                        parts.push(Formula::eq(y, x + i128::from(t.delta[i])));
                    }
                }
                PcmTransition {
                    name: t.name.clone(),
                    source: t.source,
                    target: t.target,
                    label: t.label.clone(),
                    step: Formula::and(parts),
                }
            })
            .collect();
        PcmModel::new(d, m.states().to_vec(), m.initial().clone(), transitions)
            .expect("a valid VASS encodes to a valid PCM")
    }

    /// Encodes a counter machine; each instruction is labelled by its own name.
    pub fn from_counter_machine(m: &CounterMachine) -> Self {
        let d = m.dimension();
        let transitions = m
            .instructions()
            .iter()
            .map(|ins| {
                let mut parts = Vec::new();
                for i in 0..d {
                    let x = Term::var(counter_var(i));
                    let y = Term::var(next_var(i));
                    let update = match ins.effect {
                        Effect::Inc(j) if j == i => x + 1,
                        Effect::Dec(j) if j == i => {
                            parts.push(Formula::ge(x.clone(), Term::constant(1)));
                            x - 1
                        }
                        Effect::ZeroTest(j) if j == i => {
                            parts.push(Formula::eq(x.clone(), Term::constant(0)));
                            x
                        }
                        _ => x,
                    };
                    parts.push(Formula::eq(y, update));
                }
                PcmTransition {
                    name: ins.name.clone(),
                    source: ins.source,
                    target: ins.target,
                    label: ins.name.clone(),
                    step: Formula::and(parts),
                }
            })
            .collect();
        PcmModel::new(d, m.states().to_vec(), m.initial().clone(), transitions)
            .expect("a valid counter machine encodes to a valid PCM")
    }
}
