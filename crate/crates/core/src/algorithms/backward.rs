use std::collections::BTreeMap;

use crate::algorithms::{AnalysisError, Budgets};
use crate::models::PreBasis;
use crate::wqo::{Config, MinBasis, QuasiOrder};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverabilityResult<P> {
    pub coverable: bool,
    /// Present iff `coverable`; replays from the initial configuration to a
    /// configuration above the target.
    pub witness: Option<Vec<usize>>,
    /// Minimal elements of the predecessor closure of the target's cone.
    pub basis: MinBasis<Config<P>>,
    pub iterations: usize,
}

/// Backward saturation from `↑target` until the basis is stable.
pub fn backward_coverability<M: PreBasis>(
    m: &M,
    init: &Config<M::Payload>,
    target: &Config<M::Payload>,
    budgets: &Budgets,
) -> Result<CoverabilityResult<M::Payload>, AnalysisError> {
    m.check_backward()?;
    m.check_config(init)?;
    m.check_config(target)?;

    // Each element maps to the step that covers an earlier element; the target maps to None.
    let mut provenance: BTreeMap<Config<M::Payload>, Option<(usize, Config<M::Payload>)>> = BTreeMap::new();
    provenance.insert(target.clone(), None);
    let mut basis = MinBasis::minimize([target.clone()]);
    let mut frontier = vec![target.clone()];
    let mut iterations = 0;
    let mut generated = 0usize;

    while !frontier.is_empty() {
        iterations += 1;
        let mut fresh = Vec::new();
        for e in &frontier {
            for (t, p) in m.pre_basis(e) {
                generated += 1;
                if generated > budgets.max_basis {
                    return Err(AnalysisError::BudgetExhausted { what: "basis", limit: budgets.max_basis });
                }
                if basis.insert(p.clone()) {
                    provenance.entry(p.clone()).or_insert_with(|| Some((t, e.clone())));
                    fresh.push(p);
                }
            }
        }
        fresh.retain(|p| basis.elements().binary_search(p).is_ok());
        frontier = fresh;
    }

    let start = basis.iter().find(|b| b.leq(init)).cloned();
    let witness = match start {
        None => None,
        Some(b) => Some(replay_witness(m, init, target, &b, &provenance)?),
    };
    Ok(CoverabilityResult { coverable: witness.is_some(), witness, basis, iterations })
}

fn replay_witness<M: PreBasis>(
    m: &M,
    init: &Config<M::Payload>,
    target: &Config<M::Payload>,
    start: &Config<M::Payload>,
    provenance: &BTreeMap<Config<M::Payload>, Option<(usize, Config<M::Payload>)>>,
) -> Result<Vec<usize>, AnalysisError> {
    let mut path = Vec::new();
    let mut cur = start;
    while let Some(Some((t, next))) = provenance.get(cur) {
        path.push(*t);
        cur = next;
    }
    let mut c = init.clone();
    for &t in &path {
        c = m.replay_step(&c, t).ok_or_else(|| {
            AnalysisError::Internal(format!("witness step `{}` is not enabled", m.transition_name(t)))
        })?;
    }
    if !target.leq(&c) {
        return Err(AnalysisError::Internal("witness does not cover the target".into()));
    }
    Ok(path)
}

/// Coverability of the least configuration with control state `state`.
pub fn control_state_reachability<M: PreBasis>(
    m: &M,
    init: &Config<M::Payload>,
    state: &str,
    budgets: &Budgets,
) -> Result<CoverabilityResult<M::Payload>, AnalysisError> {
    let q = m.state_id(state).ok_or_else(|| AnalysisError::UnknownState(state.to_string()))?;
    backward_coverability(m, init, &m.bottom(q), budgets)
}
