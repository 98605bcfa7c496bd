use crate::models::{check_unique, resolve_state, ModelError, PreBasis, TransitionSystem};
use crate::wqo::{Config, OmegaNat, OmegaVector, StateId, Vector};

/// A guarded transition `source -> target` adding `delta` and then zeroing `resets`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VassTransition {
    pub name: String,
    pub source: StateId,
    pub target: StateId,
    pub label: String,
    pub guard: Vector,
    pub delta: Vec<i64>,
    /// Zero-based, sorted, without duplicates.
    pub resets: Vec<usize>,
}

/// A vector addition system with states, optionally with reset arcs.
///
/// Guards are normalized on construction so that no non-reset counter can
/// become negative: `guard(i) >= max(0, -delta(i))`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VassModel {
    dimension: usize,
    states: Vec<String>,
    transitions: Vec<VassTransition>,
    init: Config<Vector>,
}

impl VassModel {
    pub fn new(
        dimension: usize,
        states: Vec<String>,
        init: Config<Vector>,
        mut transitions: Vec<VassTransition>,
    ) -> Result<Self, ModelError> {
        if states.is_empty() {
            return Err(ModelError::NoStates);
        }
        check_unique(&states, ModelError::DuplicateState)?;
        check_unique(transitions.iter().map(|t| &t.name), ModelError::DuplicateTransition)?;
        if init.control >= states.len() {
            return Err(ModelError::UnknownState(format!("#{}", init.control)));
        }
        check_dim("initial marking", dimension, init.payload.dim())?;
        for t in &mut transitions {
            if t.source >= states.len() || t.target >= states.len() {
                return Err(ModelError::UnknownState(format!("endpoint of {}", t.name)));
            }
            check_dim(&format!("guard of {}", t.name), dimension, t.guard.dim())?;
            check_dim(&format!("delta of {}", t.name), dimension, t.delta.len())?;
            t.resets.sort_unstable();
            t.resets.dedup();
            if let Some(&i) = t.resets.iter().find(|&&i| i >= dimension) {
                return Err(ModelError::CounterOutOfRange { index: i + 1, dimension });
            }
            for i in 0..dimension {
                if !t.resets.contains(&i) && t.delta[i] < 0 {
                    t.guard.0[i] = t.guard.0[i].max(t.delta[i].unsigned_abs());
                }
            }
        }
        Ok(VassModel { dimension, states, transitions, init })
    }

    pub fn builder(dimension: usize) -> VassBuilder {
        VassBuilder { dimension, ..VassBuilder::default() }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn transitions(&self) -> &[VassTransition] {
        &self.transitions
    }

    pub fn has_resets(&self) -> bool {
        self.transitions.iter().any(|t| !t.resets.is_empty())
    }

    pub fn with_init(&self, init: Config<Vector>) -> Result<Self, ModelError> {
        Self::new(self.dimension, self.states.clone(), init, self.transitions.clone())
    }

    pub fn enabled(&self, t: usize, c: &Config<Vector>) -> bool {
        let tr = &self.transitions[t];
        tr.source == c.control && tr.guard.0.iter().zip(&c.payload.0).all(|(g, x)| x >= g)
    }

    pub fn fire(&self, t: usize, c: &Config<Vector>) -> Option<Config<Vector>> {
        if !self.enabled(t, c) {
            return None;
        }
        let tr = &self.transitions[t];
        let payload = c
            .payload
            .0
            .iter()
            .zip(&tr.delta)
            .enumerate()
            .map(|(i, (x, d))| {
                if tr.resets.binary_search(&i).is_ok() {
                    0
                } else {
                    (i128::from(*x) + i128::from(*d)) as u64
                }
            })
            .collect();
        Some(Config::new(tr.target, Vector(payload)))
    }

    /// Firing over `ℕ_ω`: ω covers every guard and absorbs deltas; resets still zero.
    pub fn fire_omega(&self, t: usize, m: &Config<OmegaVector>) -> Option<Config<OmegaVector>> {
        let tr = &self.transitions[t];
        if tr.source != m.control || !m.payload.covers(&tr.guard) {
            return None;
        }
        let mut out = Vec::with_capacity(self.dimension);
        for (i, (x, d)) in m.payload.0.iter().zip(&tr.delta).enumerate() {
            if tr.resets.binary_search(&i).is_ok() {
                out.push(OmegaNat::Finite(0));
            } else {
                out.push(x.add_delta(*d)?);
            }
        }
        Some(Config::new(tr.target, OmegaVector(out)))
    }
}

fn check_dim(what: &str, expected: usize, found: usize) -> Result<(), ModelError> {
    if expected != found {
        return Err(ModelError::Dimension { what: what.to_string(), expected, found });
    }
    Ok(())
}

impl TransitionSystem for VassModel {
    type Payload = Vector;

    fn states(&self) -> &[String] {
        &self.states
    }

    fn transition_count(&self) -> usize {
        self.transitions.len()
    }

    fn transition_name(&self, t: usize) -> &str {
        &self.transitions[t].name
    }

    fn initial(&self) -> &Config<Vector> {
        &self.init
    }

    fn successors(&self, c: &Config<Vector>) -> Vec<(usize, Config<Vector>)> {
        (0..self.transitions.len())
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

impl PreBasis for VassModel {
    fn check_backward(&self) -> Result<(), ModelError> {
        Ok(())
    }

    fn pre_basis(&self, target: &Config<Vector>) -> Vec<(usize, Config<Vector>)> {
        let mut out = Vec::new();
        for (t, tr) in self.transitions.iter().enumerate() {
            if tr.target != target.control {
                continue;
            }
            // A reset coordinate is 0 after the step, so it cannot cover a positive target.
            if tr.resets.iter().any(|&i| target.payload.0[i] > 0) {
                continue;
            }
            let pre = (0..self.dimension)
                .map(|i| {
                    let g = tr.guard.0[i];
                    if tr.resets.binary_search(&i).is_ok() {
                        g
                    } else {
                        let need = i128::from(target.payload.0[i]) - i128::from(tr.delta[i]);
                        g.max(need.max(0) as u64)
                    }
                })
                .collect();
            out.push((t, Config::new(tr.source, Vector(pre))));
        }
        out
    }

    fn replay_step(&self, c: &Config<Vector>, t: usize) -> Option<Config<Vector>> {
        self.fire(t, c)
    }
}

/// Name-based construction, mostly for tests and examples.
#[derive(Clone, Debug, Default)]
pub struct VassBuilder {
    dimension: usize,
    states: Vec<String>,
    init: Option<(String, Vec<u64>)>,
    transitions: Vec<(String, String, String, String, Vec<u64>, Vec<i64>, Vec<usize>)>,
}

impl VassBuilder {
    pub fn states<I, S>(mut self, names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.states.extend(names.into_iter().map(Into::into));
        self
    }

    pub fn init(mut self, state: &str, marking: &[u64]) -> Self {
        self.init = Some((state.to_string(), marking.to_vec()));
        self
    }

    /// Adds a transition; `resets` are zero-based counter indices.
    #[allow(clippy::too_many_arguments)]
    pub fn transition(
        mut self,
        name: &str,
        source: &str,
        target: &str,
        label: &str,
        guard: &[u64],
        delta: &[i64],
        resets: &[usize],
    ) -> Self {
        self.transitions.push((
            name.to_string(),
            source.to_string(),
            target.to_string(),
            label.to_string(),
            guard.to_vec(),
            delta.to_vec(),
            resets.to_vec(),
        ));
        self
    }

    pub fn build(self) -> Result<VassModel, ModelError> {
        let (init_state, init_marking) = self
            .init
            .clone()
            .unwrap_or_else(|| (self.states.first().cloned().unwrap_or_default(), vec![0; self.dimension]));
        let init = Config::new(resolve_state(&self.states, &init_state)?, Vector(init_marking));
        let transitions = self
            .transitions
            .into_iter()
            .map(|(name, s, t, label, guard, delta, resets)| {
                Ok(VassTransition {
                    name,
                    source: resolve_state(&self.states, &s)?,
                    target: resolve_state(&self.states, &t)?,
                    label,
                    guard: Vector(guard),
                    delta,
                    resets,
                })
            })
            .collect::<Result<Vec<_>, ModelError>>()?;
        VassModel::new(self.dimension, self.states, init, transitions)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wqo::{MinBasis, QuasiOrder};

    fn cfg(q: StateId, xs: &[u64]) -> Config<Vector> {
        Config::new(q, Vector(xs.to_vec()))
    }

    fn one_state(guard: &[u64], delta: &[i64], resets: &[usize]) -> VassModel {
        VassModel::builder(guard.len())
            .states(["q"])
            .transition("t", "q", "q", "a", guard, delta, resets)
            .build()
            .unwrap()
    }

    #[test]
    fn successor_examples() {
        let m = one_state(&[0, 0], &[1, 0], &[]);
        assert_eq!(m.successors(&cfg(0, &[0, 0])), vec![(0, cfg(0, &[1, 0]))]);

        let m = one_state(&[1, 0], &[-1, 1], &[]);
        assert!(m.successors(&cfg(0, &[0, 0])).is_empty());

        let m = one_state(&[0, 0], &[0, 0], &[0]);
        assert_eq!(m.successors(&cfg(0, &[5, 3])), vec![(0, cfg(0, &[0, 3]))]);
    }

    #[test]
    fn guards_are_normalized() {
        let m = one_state(&[0, 0], &[-2, 1], &[]);
        assert_eq!(m.transitions()[0].guard, Vector(vec![2, 0]));
        // reset coordinates keep their guard
        let m = one_state(&[0, 0], &[-2, 1], &[0]);
        assert_eq!(m.transitions()[0].guard, Vector(vec![0, 0]));
        assert_eq!(m.successors(&cfg(0, &[0, 0])), vec![(0, cfg(0, &[0, 1]))]);
    }

    fn two_state(guard: &[u64], delta: &[i64], resets: &[usize]) -> VassModel {
        VassModel::builder(guard.len())
            .states(["q", "q'"])
            .transition("t", "q", "q'", "a", guard, delta, resets)
            .build()
            .unwrap()
    }

    /// Brute force over all sources with entries <= 5.
    fn oracle_pre(m: &VassModel, target: &Config<Vector>) -> Vec<Config<Vector>> {
        let d = m.dimension();
        let mut all = Vec::new();
        let mut x = vec![0u64; d];
        loop {
            for q in 0..m.states().len() {
                let c = cfg(q, &x);
                if m.successors(&c).iter().any(|(_, s)| target.leq(s)) {
                    all.push(c);
                }
            }
            let mut i = 0;
            while i < d && x[i] == 5 {
                x[i] = 0;
                i += 1;
            }
            if i == d {
                break;
            }
            x[i] += 1;
        }
        MinBasis::minimize(all).into_elements()
    }

    #[test]
    fn pre_basis_examples() {
        let m = two_state(&[1, 0], &[-1, 1], &[]);
        let target = cfg(1, &[0, 2]);
        let pre: Vec<_> = m.pre_basis(&target).into_iter().map(|(_, c)| c).collect();
        assert_eq!(pre, vec![cfg(0, &[1, 1])]);
        assert_eq!(oracle_pre(&m, &target), pre);

        let m = two_state(&[0, 0], &[0, 0], &[1]);
        assert!(m.pre_basis(&cfg(1, &[0, 1])).is_empty());
        assert!(oracle_pre(&m, &cfg(1, &[0, 1])).is_empty());

        let m = two_state(&[2, 0], &[0, 0], &[]);
        let target = cfg(1, &[1, 1]);
        let pre: Vec<_> = m.pre_basis(&target).into_iter().map(|(_, c)| c).collect();
        assert_eq!(pre, vec![cfg(0, &[2, 1])]);
        assert_eq!(oracle_pre(&m, &target), pre);
    }

    #[test]
    fn omega_firing() {
        let m = one_state(&[2, 0], &[-1, 1], &[1]);
        let marking = Config::new(0, OmegaVector(vec![OmegaNat::Omega, OmegaNat::Finite(4)]));
        let out = m.fire_omega(0, &marking).unwrap();
        assert_eq!(out.payload, OmegaVector(vec![OmegaNat::Omega, OmegaNat::Finite(0)]));
    }

    #[test]
    fn rejects_bad_dimensions_and_states() {
        let err = VassModel::builder(2)
            .states(["q"])
            .transition("t", "q", "r", "a", &[0, 0], &[0, 0], &[])
            .build()
            .unwrap_err();
        assert_eq!(err, ModelError::UnknownState("r".into()));
        let err = VassModel::builder(2)
            .states(["q"])
            .transition("t", "q", "q", "a", &[0], &[0, 0], &[])
            .build()
            .unwrap_err();
        assert!(matches!(err, ModelError::Dimension { .. }));
    }
}
