//! The model classes and their effectiveness interface.
//!
//! Every model is a finite control graph over named states. VASS (with or
//! without resets) and lossy channel machines are well structured and also
//! provide [`PreBasis`], the minimal-predecessor computation the backward
//! algorithm needs. Counter machines with zero tests and Presburger counter
//! machines are not well structured in general; they are analysed through
//! abstraction or the monotonicity checker.

mod counter;
mod lcs;
mod pcm;
mod vass;

use std::fmt::Debug;
use std::hash::Hash;

use thiserror::Error;

use crate::wqo::{Channels, Config, QuasiOrder, StateId, Vector};

pub use counter::{CounterMachine, Effect, Instruction};
pub use lcs::{ChannelAction, LcsTransition, LossyChannelMachine, Semantics};
pub use pcm::{counter_var, next_var, PcmModel, PcmTransition};
pub use vass::{VassBuilder, VassModel, VassTransition};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("duplicate state `{0}`")]
    DuplicateState(String),
    #[error("duplicate transition id `{0}`")]
    DuplicateTransition(String),
    #[error("{what}: expected dimension {expected}, found {found}")]
    Dimension {
        what: String,
        expected: usize,
        found: usize,
    },
    #[error("counter index {index} out of range 1..={dimension}")]
    CounterOutOfRange { index: usize, dimension: usize },
    #[error("unknown channel `{0}`")]
    UnknownChannel(String),
    #[error("letter `{letter}` is not in the alphabet of channel `{channel}`")]
    LetterNotInAlphabet { channel: String, letter: String },
    #[error("step formula of `{transition}` mentions `{var}`, which is not a counter variable")]
    ForeignVariable { transition: String, var: String },
    #[error("{0}")]
    Unsupported(String),
    #[error("enumeration budget of {limit} exceeded")]
    Budget { limit: usize },
    #[error("model has no states")]
    NoStates,
}

/// Payloads that can be bounded for exhaustive exploration.
pub trait BoundedPayload {
    /// True when some counter or channel length exceeds `cutoff`.
    fn exceeds(&self, cutoff: usize) -> bool;
}

impl BoundedPayload for Vector {
    fn exceeds(&self, cutoff: usize) -> bool {
        self.0.iter().any(|x| *x > cutoff as u64)
    }
}

impl BoundedPayload for Channels {
    fn exceeds(&self, cutoff: usize) -> bool {
        self.0.iter().any(|w| w.len() > cutoff)
    }
}

/// A finitely branching transition system over configurations.
pub trait TransitionSystem {
    type Payload: Clone + Ord + Hash + Debug + QuasiOrder + BoundedPayload;

    fn states(&self) -> &[String];

    fn transition_count(&self) -> usize;

    fn transition_name(&self, t: usize) -> &str;

    fn initial(&self) -> &Config<Self::Payload>;

    /// One-step successors, tagged with the transition index.
    fn successors(&self, c: &Config<Self::Payload>) -> Vec<(usize, Config<Self::Payload>)>;

    /// Successors used by exhaustive exploration. Differs from
    /// [`successors`](Self::successors) only for lossy channel machines,
    /// which also enumerate message losses.
    fn explore_successors(
        &self,
        c: &Config<Self::Payload>,
    ) -> Result<Vec<(usize, Config<Self::Payload>)>, ModelError> {
        Ok(self.successors(c))
    }

    /// Rejects configurations that do not belong to this model.
    fn check_config(&self, c: &Config<Self::Payload>) -> Result<(), ModelError>;

    /// The least configuration with the given control state.
    fn bottom(&self, state: StateId) -> Config<Self::Payload>;

    fn format_payload(&self, p: &Self::Payload) -> String;

    fn format_config(&self, c: &Config<Self::Payload>) -> String {
        format!("{} {}", self.states()[c.control], self.format_payload(&c.payload))
    }

    fn state_id(&self, name: &str) -> Option<StateId> {
        self.states().iter().position(|s| s == name)
    }
}

/// The effectiveness hypothesis: minimal predecessors of an upward-closed set.
pub trait PreBasis: TransitionSystem {
    /// Fails if this instance does not support backward analysis.
    fn check_backward(&self) -> Result<(), ModelError>;

    /// For each transition, the minimal configurations from which one step of
    /// that transition lands in `↑target`. Not minimized across transitions.
    fn pre_basis(&self, target: &Config<Self::Payload>) -> Vec<(usize, Config<Self::Payload>)>;

    /// Fires `t` from `c` the way a witness replay does; for lossy machines
    /// this drops messages as needed. `None` if `t` cannot fire.
    fn replay_step(&self, c: &Config<Self::Payload>, t: usize) -> Option<Config<Self::Payload>>;
}

pub(crate) fn check_unique<'a>(
    names: impl IntoIterator<Item = &'a String>,
    err: impl Fn(String) -> ModelError,
) -> Result<(), ModelError> {
    let mut seen = std::collections::BTreeSet::new();
    for n in names {
        if !seen.insert(n.as_str()) {
            return Err(err(n.clone()));
        }
    }
    Ok(())
}

pub(crate) fn resolve_state(states: &[String], name: &str) -> Result<StateId, ModelError> {
    states
        .iter()
        .position(|s| s == name)
        .ok_or_else(|| ModelError::UnknownState(name.to_string()))
}
