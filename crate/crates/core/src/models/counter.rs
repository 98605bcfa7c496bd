use crate::models::{check_unique, ModelError, TransitionSystem};
use crate::wqo::{Config, StateId, Vector};

/// Counter indices are zero-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Effect {
    Inc(usize),
    Dec(usize),
    ZeroTest(usize),
}

impl Effect {
    pub fn counter(self) -> usize {
        match self {
            Effect::Inc(i) | Effect::Dec(i) | Effect::ZeroTest(i) => i,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instruction {
    pub name: String,
    pub source: StateId,
    pub target: StateId,
    pub effect: Effect,
}

/// A Minsky-style machine: increments, guarded decrements and zero tests.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CounterMachine {
    dimension: usize,
    states: Vec<String>,
    instructions: Vec<Instruction>,
    init: Config<Vector>,
}

impl CounterMachine {
    pub fn new(
        dimension: usize,
        states: Vec<String>,
        init: Config<Vector>,
        instructions: Vec<Instruction>,
    ) -> Result<Self, ModelError> {
        if states.is_empty() {
            return Err(ModelError::NoStates);
        }
        check_unique(&states, ModelError::DuplicateState)?;
        check_unique(instructions.iter().map(|i| &i.name), ModelError::DuplicateTransition)?;
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
        for ins in &instructions {
            if ins.source >= states.len() || ins.target >= states.len() {
                return Err(ModelError::UnknownState(format!("endpoint of {}", ins.name)));
            }
            let i = ins.effect.counter();
            if i >= dimension {
                return Err(ModelError::CounterOutOfRange { index: i + 1, dimension });
            }
        }
        Ok(CounterMachine { dimension, states, instructions, init })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn instructions(&self) -> &[Instruction] {
        &self.instructions
    }

    pub fn has_zero_tests(&self) -> bool {
        self.instructions.iter().any(|i| matches!(i.effect, Effect::ZeroTest(_)))
    }

    pub fn fire(&self, t: usize, c: &Config<Vector>) -> Option<Config<Vector>> {
        let ins = &self.instructions[t];
        if ins.source != c.control {
            return None;
        }
        let mut x = c.payload.clone();
        match ins.effect {
            Effect::Inc(i) => x.0[i] += 1,
            Effect::Dec(i) => {
                if x.0[i] == 0 {
                    return None;
                }
                x.0[i] -= 1;
            }
            Effect::ZeroTest(i) => {
                if x.0[i] != 0 {
                    return None;
                }
            }
        }
        Some(Config::new(ins.target, x))
    }
}

impl TransitionSystem for CounterMachine {
    type Payload = Vector;

    fn states(&self) -> &[String] {
        &self.states
    }

    fn transition_count(&self) -> usize {
        self.instructions.len()
    }

    fn transition_name(&self, t: usize) -> &str {
        &self.instructions[t].name
    }

    fn initial(&self) -> &Config<Vector> {
        &self.init
    }

    fn successors(&self, c: &Config<Vector>) -> Vec<(usize, Config<Vector>)> {
        (0..self.instructions.len())
            .filter_map(|t| self.fire(t, c).map(|s| (t, s)))
            .collect()
    }

    fn check_config(&self, c: &Config<Vector>) -> Result<(), ModelError> {
        if c.control >= self.states.len() {
            return Err(ModelError::UnknownState(format!("#{}", c.control)));
        }
        if c.payload.dim() != self.dimension {
            return Err(ModelError::Dimension {
                what: "configuration".into(),
                expected: self.dimension,
                found: c.payload.dim(),
            });
        }
        Ok(())
    }

    fn bottom(&self, state: StateId) -> Config<Vector> {
        Config::new(state, Vector::zeros(self.dimension))
    }

    fn format_payload(&self, p: &Vector) -> String {
        p.to_string()
    }
}
