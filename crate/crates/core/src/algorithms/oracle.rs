use std::collections::{BTreeMap, VecDeque};

use crate::models::{BoundedPayload, ModelError, TransitionSystem};
use crate::wqo::{maximize_by, Config, QuasiOrder};

/// Configurations reached by truncated breadth-first search.
#[derive(Clone, Debug)]
pub struct OracleResult<P> {
    /// In discovery order.
    pub reachable: Vec<Config<P>>,
    /// Exploration closed without pruning a successor or running out of budget.
    /// Only then is `reachable` the exact reachability set.
    pub conclusive: bool,
    pub hit_cutoff: bool,
    pub budget_exhausted: bool,
    parents: BTreeMap<Config<P>, Option<(Config<P>, usize)>>,
}

impl<P: Clone + Ord + QuasiOrder> OracleResult<P> {
    pub fn contains(&self, c: &Config<P>) -> bool {
        self.parents.contains_key(c)
    }

    /// Some explored configuration is `>= target`.
    pub fn covers(&self, target: &Config<P>) -> bool {
        self.reachable.iter().any(|c| target.leq(c))
    }

    pub fn reaches_state(&self, q: usize) -> bool {
        self.reachable.iter().any(|c| c.control == q)
    }

    /// The transitions of a shortest path from the initial configuration.
    pub fn path_to(&self, c: &Config<P>) -> Option<Vec<usize>> {
        let mut path = Vec::new();
        let mut cur = c;
        loop {
            match self.parents.get(cur)? {
                None => break,
                Some((prev, t)) => {
                    path.push(*t);
                    cur = prev;
                }
            }
        }
        path.reverse();
        Some(path)
    }

    /// Maximal explored configurations, sorted.
    pub fn maximal(&self) -> Vec<Config<P>> {
        let mut out = maximize_by(self.reachable.iter().cloned(), |a, b| a.leq(b));
        out.sort();
        out
    }
}

/// Breadth-first exploration that never stores a configuration whose counters
/// or channel words exceed `cutoff`, and at most `max_states` configurations.
///
/// Uses [`TransitionSystem::explore_successors`], so lossy machines lose
/// messages before each step.
pub fn bounded_forward_oracle<M: TransitionSystem>(
    m: &M,
    init: &Config<M::Payload>,
    cutoff: usize,
    max_states: usize,
) -> Result<OracleResult<M::Payload>, ModelError> {
    let mut result = OracleResult {
        reachable: vec![init.clone()],
        conclusive: false,
        hit_cutoff: init.payload.exceeds(cutoff),
        budget_exhausted: false,
        parents: BTreeMap::new(),
    };
    result.parents.insert(init.clone(), None);
    let mut queue = VecDeque::new();
    if !result.hit_cutoff {
        queue.push_back(init.clone());
    }
    'search: while let Some(c) = queue.pop_front() {
        for (t, s) in m.explore_successors(&c)? {
            if result.parents.contains_key(&s) {
                continue;
            }
            if s.payload.exceeds(cutoff) {
                result.hit_cutoff = true;
                continue;
            }
            if result.reachable.len() >= max_states {
                result.budget_exhausted = true;
                break 'search;
            }
            result.parents.insert(s.clone(), Some((c.clone(), t)));
            result.reachable.push(s.clone());
            queue.push_back(s);
        }
    }
    result.conclusive = !result.hit_cutoff && !result.budget_exhausted;
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::VassModel;
    use crate::wqo::Vector;

    fn cfg(xs: &[u64]) -> Config<Vector> {
        Config::new(0, Vector(xs.to_vec()))
    }

    fn one_counter(guard: u64, delta: i64, init: u64) -> VassModel {
        VassModel::builder(1)
            .states(["q"])
            .init("q", &[init])
            .transition("t", "q", "q", "a", &[guard], &[delta], &[])
            .build()
            .unwrap()
    }

    #[test]
    fn decreasing_counter_is_conclusive() {
        let m = one_counter(1, -1, 2);
        let r = bounded_forward_oracle(&m, m.initial(), 8, 1000).unwrap();
        assert!(r.conclusive);
        assert_eq!(r.reachable, vec![cfg(&[2]), cfg(&[1]), cfg(&[0])]);
        assert_eq!(r.path_to(&cfg(&[0])), Some(vec![0, 0]));
    }

    #[test]
    fn increasing_counter_hits_cutoff() {
        let m = one_counter(0, 1, 0);
        let r = bounded_forward_oracle(&m, m.initial(), 4, 1000).unwrap();
        assert!(!r.conclusive && r.hit_cutoff);
        assert_eq!(r.reachable.len(), 5);
    }

    #[test]
    fn no_transitions() {
        let m = VassModel::builder(2).states(["q"]).init("q", &[1, 1]).build().unwrap();
        let r = bounded_forward_oracle(&m, m.initial(), 8, 1000).unwrap();
        assert!(r.conclusive);
        assert_eq!(r.reachable, vec![cfg(&[1, 1])]);
    }

    #[test]
    fn state_budget() {
        let m = one_counter(0, 1, 0);
        let r = bounded_forward_oracle(&m, m.initial(), 100, 3).unwrap();
        assert!(r.budget_exhausted && !r.conclusive);
        assert_eq!(r.reachable.len(), 3);
    }
}
