use rand::Rng;
use wsts_core::models::{
    ChannelAction, CounterMachine, Effect, Instruction, LcsTransition, LossyChannelMachine,
    PcmModel, PcmTransition, Semantics, VassModel, VassTransition,
};
use wsts_core::wqo::{Channels, Config, Vector, Word};
use wsts_presburger::parse_formula;

fn state_names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("q{i}")).collect()
}

#[derive(Clone, Copy, Debug)]
pub struct VassParams {
    pub max_dim: usize,
    pub max_states: usize,
    pub max_transitions: usize,
    pub max_guard: u64,
    pub resets: bool,
}

impl Default for VassParams {
    fn default() -> Self {
        VassParams { max_dim: 3, max_states: 4, max_transitions: 6, max_guard: 2, resets: false }
    }
}

/// Deltas lean negative so that many instances have finite reachability sets.
pub fn random_vass<R: Rng>(rng: &mut R, p: VassParams) -> VassModel {
    let d = rng.gen_range(1..=p.max_dim);
    let nq = rng.gen_range(1..=p.max_states);
    let nt = rng.gen_range(1..=p.max_transitions);
    let transitions = (0..nt)
        .map(|i| {
            let resets = if p.resets && rng.gen_bool(0.3) { vec![rng.gen_range(0..d)] } else { vec![] };
            VassTransition {
                name: format!("t{}", i + 1),
                source: rng.gen_range(0..nq),
                target: rng.gen_range(0..nq),
                label: ["a", "b"][rng.gen_range(0..2)].to_string(),
                guard: Vector((0..d).map(|_| rng.gen_range(0..=p.max_guard)).collect()),
                delta: (0..d).map(|_| [-2, -1, -1, 0, 0, 1, 1, 2][rng.gen_range(0..8)]).collect(),
                resets,
            }
        })
        .collect();
    let init = Config::new(0, Vector((0..d).map(|_| rng.gen_range(0..=2)).collect()));
    VassModel::new(d, state_names(nq), init, transitions).expect("generated VASS is valid")
}

pub fn random_vector_target<R: Rng>(rng: &mut R, states: usize, d: usize, max: u64) -> Config<Vector> {
    Config::new(rng.gen_range(0..states), Vector((0..d).map(|_| rng.gen_range(0..=max)).collect()))
}

/// Lossy machines with 1 or 2 channels over `{a, b}`.
pub fn random_lcs<R: Rng>(rng: &mut R, max_states: usize, max_transitions: usize) -> LossyChannelMachine {
    let nc = rng.gen_range(1..=2);
    let nq = rng.gen_range(1..=max_states);
    let nt = rng.gen_range(1..=max_transitions);
    let transitions = (0..nt)
        .map(|i| {
            let channel = rng.gen_range(0..nc);
            let letter = rng.gen_range(0..2);
            let action = match rng.gen_range(0..5) {
                0 | 1 => ChannelAction::Send { channel, letter },
                2 | 3 => ChannelAction::Recv { channel, letter },
                _ => ChannelAction::Internal,
            };
            LcsTransition {
                name: format!("t{}", i + 1),
                source: rng.gen_range(0..nq),
                target: rng.gen_range(0..nq),
                action,
            }
        })
        .collect();
    let channels = (0..nc).map(|i| format!("c{}", i + 1)).collect();
    let alphabets = vec![vec!["a".to_string(), "b".to_string()]; nc];
    let init = Config::new(0, Channels::empty(nc));
    LossyChannelMachine::new(channels, alphabets, state_names(nq), init, transitions, Semantics::Lossy)
        .expect("generated LCS is valid")
}

pub fn random_channel_target<R: Rng>(rng: &mut R, m: &LossyChannelMachine, max_len: usize) -> Config<Channels> {
    use wsts_core::models::TransitionSystem;
    let words = (0..m.channels().len())
        .map(|_| Word((0..rng.gen_range(0..=max_len)).map(|_| rng.gen_range(0..2)).collect()))
        .collect();
    Config::new(rng.gen_range(0..m.states().len()), Channels(words))
}

/// Two-counter Minsky machines with zero tests.
pub fn random_counter_machine<R: Rng>(rng: &mut R, max_states: usize, max_instructions: usize) -> CounterMachine {
    let nq = rng.gen_range(1..=max_states);
    let ni = rng.gen_range(1..=max_instructions);
    let instructions = (0..ni)
        .map(|i| {
            let c = rng.gen_range(0..2);
            let effect = match rng.gen_range(0..3) {
                0 => Effect::Inc(c),
                1 => Effect::Dec(c),
                _ => Effect::ZeroTest(c),
            };
            Instruction {
                name: format!("i{}", i + 1),
                source: rng.gen_range(0..nq),
                target: rng.gen_range(0..nq),
                effect,
            }
        })
        .collect();
    let init = Config::new(0, Vector(vec![rng.gen_range(0..=1), rng.gen_range(0..=1)]));
    CounterMachine::new(2, state_names(nq), init, instructions).expect("generated machine is valid")
}

/// One counter of an affine step: optional guard, then `x' = a*x + b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AffineUpdate {
    pub guard: Option<AffineGuard>,
    pub a: i64,
    pub b: i64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AffineGuard {
    AtLeast(i64),
    Zero,
}

/// A single-state PCM with affine steps, evaluable by plain arithmetic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffinePcm {
    pub dimension: usize,
    /// One label per transition.
    pub steps: Vec<Vec<AffineUpdate>>,
}

impl AffinePcm {
    /// Whether `x -> y` is a step of transition `t`, over the naturals.
    pub fn holds(&self, t: usize, x: &[i64], y: &[i64]) -> bool {
        self.steps[t].iter().enumerate().all(|(i, u)| {
            let guard_ok = match u.guard {
                None => true,
                Some(AffineGuard::AtLeast(g)) => x[i] >= g,
                Some(AffineGuard::Zero) => x[i] == 0,
            };
            guard_ok && y[i] >= 0 && y[i] == u.a * x[i] + u.b
        })
    }

    /// The same machine as a [`PcmModel`], built from source text.
    pub fn to_pcm(&self) -> PcmModel {
        let transitions = self
            .steps
            .iter()
            .enumerate()
            .map(|(t, updates)| {
                let parts: Vec<String> = updates
                    .iter()
                    .enumerate()
                    .flat_map(|(i, u)| {
                        let x = format!("x{}", i + 1);
                        let mut p = Vec::new();
                        match u.guard {
                            None => {}
                            Some(AffineGuard::AtLeast(g)) => p.push(format!("{x} >= {g}")),
                            Some(AffineGuard::Zero) => p.push(format!("{x} = 0")),
                        }
                        let sign = if u.b < 0 { '-' } else { '+' };
                        p.push(format!("{x}' = {} * {x} {sign} {}", u.a, u.b.abs()));
                        p
                    })
                    .collect();
                let src = if parts.is_empty() { "true".to_string() } else { parts.join(" /\\ ") };
                PcmTransition {
                    name: format!("t{}", t + 1),
                    source: 0,
                    target: 0,
                    label: format!("a{}", t + 1),
                    step: parse_formula(&src).expect("generated step parses"),
                }
            })
            .collect();
        PcmModel::new(self.dimension, vec!["q".into()], Config::new(0, Vector::zeros(self.dimension)), transitions)
            .expect("generated PCM is valid")
    }
}

/// `d <= 2`, `a in {0,1,2}`, `b in -2..=2`, guards up to 2.
pub fn random_affine_pcm<R: Rng>(rng: &mut R) -> AffinePcm {
    let d = rng.gen_range(1..=2);
    let nt = rng.gen_range(1..=2);
    let steps = (0..nt)
        .map(|_| {
            (0..d)
                .map(|_| {
                    let guard = match rng.gen_range(0..4) {
                        0 => Some(AffineGuard::AtLeast(rng.gen_range(1..=2))),
                        1 => Some(AffineGuard::Zero),
                        _ => None,
                    };
                    let a = [0, 1, 1, 1, 2][rng.gen_range(0..5)];
                    AffineUpdate { guard, a, b: rng.gen_range(-2..=2) }
                })
                .collect()
        })
        .collect();
    AffinePcm { dimension: d, steps }
}
