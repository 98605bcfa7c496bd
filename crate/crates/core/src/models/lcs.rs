use crate::models::{check_unique, ModelError, PreBasis, TransitionSystem};
use crate::wqo::{Channels, Config, Letter, StateId, Word};

/// Cap on the number of loss patterns enumerated for one configuration.
pub const DEFAULT_LOSS_BUDGET: usize = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Semantics {
    Perfect,
    Lossy,
}

/// Channels and letters are indices into the machine's tables.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ChannelAction {
    Send { channel: usize, letter: Letter },
    Recv { channel: usize, letter: Letter },
    Internal,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LcsTransition {
    pub name: String,
    pub source: StateId,
    pub target: StateId,
    pub action: ChannelAction,
}

/// A finite automaton over fifo channels, with perfect or lossy semantics.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LossyChannelMachine {
    channels: Vec<String>,
    alphabets: Vec<Vec<String>>,
    states: Vec<String>,
    transitions: Vec<LcsTransition>,
    init: Config<Channels>,
    semantics: Semantics,
    loss_budget: usize,
}

impl LossyChannelMachine {
    pub fn new(
        channels: Vec<String>,
        alphabets: Vec<Vec<String>>,
        states: Vec<String>,
        init: Config<Channels>,
        transitions: Vec<LcsTransition>,
        semantics: Semantics,
    ) -> Result<Self, ModelError> {
        if states.is_empty() {
            return Err(ModelError::NoStates);
        }
        check_unique(&states, ModelError::DuplicateState)?;
        check_unique(&channels, ModelError::DuplicateState)?;
        check_unique(transitions.iter().map(|t| &t.name), ModelError::DuplicateTransition)?;
        if alphabets.len() != channels.len() {
            return Err(ModelError::Dimension {
                what: "alphabets".into(),
                expected: channels.len(),
                found: alphabets.len(),
            });
        }
        if init.control >= states.len() {
            return Err(ModelError::UnknownState(format!("#{}", init.control)));
        }
        if init.payload.0.len() != channels.len() {
            return Err(ModelError::Dimension {
                what: "initial channel contents".into(),
                expected: channels.len(),
                found: init.payload.0.len(),
            });
        }
        let m = LossyChannelMachine {
            channels,
            alphabets,
            states,
            transitions,
            init,
            semantics,
            loss_budget: DEFAULT_LOSS_BUDGET,
        };
        for (ch, w) in m.init.payload.0.iter().enumerate() {
            for &a in &w.0 {
                m.check_letter(ch, a)?;
            }
        }
        for t in &m.transitions {
            if t.source >= m.states.len() || t.target >= m.states.len() {
                return Err(ModelError::UnknownState(format!("endpoint of {}", t.name)));
            }
            match t.action {
                ChannelAction::Send { channel, letter } | ChannelAction::Recv { channel, letter } => {
                    m.check_letter(channel, letter)?
                }
                ChannelAction::Internal => {}
            }
        }
        Ok(m)
    }

    fn check_letter(&self, channel: usize, letter: Letter) -> Result<(), ModelError> {
        let alphabet = self
            .alphabets
            .get(channel)
            .ok_or_else(|| ModelError::UnknownChannel(format!("#{channel}")))?;
        if letter as usize >= alphabet.len() {
            return Err(ModelError::LetterNotInAlphabet {
                channel: self.channels[channel].clone(),
                letter: format!("#{letter}"),
            });
        }
        Ok(())
    }

    pub fn channels(&self) -> &[String] {
        &self.channels
    }

    pub fn alphabets(&self) -> &[Vec<String>] {
        &self.alphabets
    }

    pub fn transitions(&self) -> &[LcsTransition] {
        &self.transitions
    }

    pub fn semantics(&self) -> Semantics {
        self.semantics
    }

    pub fn with_semantics(&self, semantics: Semantics) -> Self {
        LossyChannelMachine { semantics, ..self.clone() }
    }

    pub fn with_loss_budget(&self, loss_budget: usize) -> Self {
        LossyChannelMachine { loss_budget, ..self.clone() }
    }

    pub fn channel_id(&self, name: &str) -> Option<usize> {
        self.channels.iter().position(|c| c == name)
    }

    pub fn letter_id(&self, channel: usize, name: &str) -> Option<Letter> {
        self.alphabets.get(channel)?.iter().position(|a| a == name).map(|i| i as Letter)
    }

    /// Builds a word on `channel` from letter names.
    pub fn word(&self, channel: usize, letters: &[&str]) -> Result<Word, ModelError> {
        letters
            .iter()
            .map(|l| {
                self.letter_id(channel, l).ok_or_else(|| ModelError::LetterNotInAlphabet {
                    channel: self.channels.get(channel).cloned().unwrap_or_default(),
                    letter: l.to_string(),
                })
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Word)
    }

    pub fn format_word(&self, channel: usize, w: &Word) -> String {
        let names: Vec<&str> = w.0.iter().map(|&a| self.alphabets[channel][a as usize].as_str()).collect();
        format!("[{}]", names.join(" "))
    }

    /// The perfect (reliable fifo) step.
    pub fn fire_perfect(&self, t: usize, c: &Config<Channels>) -> Option<Config<Channels>> {
        let tr = &self.transitions[t];
        if tr.source != c.control {
            return None;
        }
        let mut chans = c.payload.clone();
        match tr.action {
            ChannelAction::Send { channel, letter } => chans.0[channel].0.push(letter),
            ChannelAction::Recv { channel, letter } => {
                let w = &mut chans.0[channel].0;
                if w.first() != Some(&letter) {
                    return None;
                }
                w.remove(0);
            }
            ChannelAction::Internal => {}
        }
        Some(Config::new(tr.target, chans))
    }

    /// All payloads obtained by replacing each channel word with one of its subwords.
    pub fn lossy_variants(&self, payload: &Channels) -> Result<Vec<Channels>, ModelError> {
        let per_channel: Vec<Vec<Word>> = payload.0.iter().map(Word::subwords).collect();
        let total = per_channel
            .iter()
            .try_fold(1usize, |acc, s| acc.checked_mul(s.len()))
            .filter(|&n| n <= self.loss_budget);
        if total.is_none() {
            return Err(ModelError::Budget { limit: self.loss_budget });
        }
        let mut out = vec![Vec::new()];
        for options in per_channel {
            let mut next = Vec::with_capacity(out.len() * options.len());
            for prefix in &out {
                for w in &options {
                    let mut p: Vec<Word> = prefix.clone();
                    p.push(w.clone());
                    next.push(p);
                }
            }
            out = next;
        }
        Ok(out.into_iter().map(Channels).collect())
    }
}

impl TransitionSystem for LossyChannelMachine {
    type Payload = Channels;

    fn states(&self) -> &[String] {
        &self.states
    }

    fn transition_count(&self) -> usize {
        self.transitions.len()
    }

    fn transition_name(&self, t: usize) -> &str {
        &self.transitions[t].name
    }

    fn initial(&self) -> &Config<Channels> {
        &self.init
    }

    /// Perfect successors, whatever the semantics flag says.
    fn successors(&self, c: &Config<Channels>) -> Vec<(usize, Config<Channels>)> {
        (0..self.transitions.len())
            .filter_map(|t| self.fire_perfect(t, c).map(|s| (t, s)))
            .collect()
    }

    /// Under lossy semantics, losses happen before the step.
    fn explore_successors(
        &self,
        c: &Config<Channels>,
    ) -> Result<Vec<(usize, Config<Channels>)>, ModelError> {
        match self.semantics {
            Semantics::Perfect => Ok(self.successors(c)),
            Semantics::Lossy => {
                let mut out = Vec::new();
                for payload in self.lossy_variants(&c.payload)? {
                    out.extend(self.successors(&Config::new(c.control, payload)));
                }
                out.sort();
                out.dedup();
                Ok(out)
            }
        }
    }

    fn check_config(&self, c: &Config<Channels>) -> Result<(), ModelError> {
        if c.control >= self.states.len() {
            return Err(ModelError::UnknownState(format!("#{}", c.control)));
        }
        if c.payload.0.len() != self.channels.len() {
            return Err(ModelError::Dimension {
                what: "configuration".into(),
                expected: self.channels.len(),
                found: c.payload.0.len(),
            });
        }
        for (ch, w) in c.payload.0.iter().enumerate() {
            for &a in &w.0 {
                self.check_letter(ch, a)?;
            }
        }
        Ok(())
    }

    fn bottom(&self, state: StateId) -> Config<Channels> {
        Config::new(state, Channels::empty(self.channels.len()))
    }

    fn format_payload(&self, p: &Channels) -> String {
        p.0.iter()
            .enumerate()
            .map(|(ch, w)| self.format_word(ch, w))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

impl PreBasis for LossyChannelMachine {
    fn check_backward(&self) -> Result<(), ModelError> {
        match self.semantics {
            Semantics::Lossy => Ok(()),
            Semantics::Perfect => Err(ModelError::Unsupported(
                "backward analysis of a channel machine requires lossy semantics".into(),
            )),
        }
    }

    fn pre_basis(&self, target: &Config<Channels>) -> Vec<(usize, Config<Channels>)> {
        let mut out = Vec::new();
        for (t, tr) in self.transitions.iter().enumerate() {
            if tr.target != target.control {
                continue;
            }
            let mut chans = target.payload.clone();
            match tr.action {
                ChannelAction::Send { channel, letter } => {
                    let w = &mut chans.0[channel].0;
                    if w.last() == Some(&letter) {
                        w.pop();
                    }
                }
                ChannelAction::Recv { channel, letter } => chans.0[channel].0.insert(0, letter),
                ChannelAction::Internal => {}
            }
            out.push((t, Config::new(tr.source, chans)));
        }
        out
    }

    /// A receive drops every message ahead of the first matching letter.
    fn replay_step(&self, c: &Config<Channels>, t: usize) -> Option<Config<Channels>> {
        let tr = &self.transitions[t];
        if let (Semantics::Lossy, ChannelAction::Recv { channel, letter }) = (self.semantics, tr.action) {
            if tr.source != c.control {
                return None;
            }
            let w = &c.payload.0[channel].0;
            let pos = w.iter().position(|&a| a == letter)?;
            let mut chans = c.payload.clone();
            chans.0[channel].0.drain(..=pos);
            return Some(Config::new(tr.target, chans));
        }
        self.fire_perfect(t, c)
    }
}
