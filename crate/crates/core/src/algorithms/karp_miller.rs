use std::collections::VecDeque;

use crate::algorithms::{AnalysisError, Budgets};
use crate::models::{TransitionSystem, VassModel};
use crate::wqo::{maximize_by, Config, OmegaNat, OmegaVector, QuasiOrder, Vector};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KmNode {
    pub marking: Config<OmegaVector>,
    pub parent: Option<usize>,
    pub transition: Option<usize>,
    /// Acceleration added at least one ω to the fired marking.
    pub accelerated: bool,
    /// Equal to an ancestor's marking; not expanded.
    pub closed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KarpMillerTree {
    /// Node 0 is the root; nodes are numbered in breadth-first order.
    pub nodes: Vec<KmNode>,
    /// Maximal markings of the tree, sorted.
    pub clover: Vec<Config<OmegaVector>>,
}

impl KarpMillerTree {
    /// Some clover element dominates `c`.
    pub fn covers(&self, c: &Config<Vector>) -> bool {
        self.clover.iter().any(|m| m.control == c.control && m.payload.covers(&c.payload))
    }

    pub fn is_bounded(&self) -> bool {
        self.clover.iter().all(|m| m.payload.omega_count() == 0)
    }

    fn ancestors(&self, parent: Option<usize>) -> impl Iterator<Item = &KmNode> {
        std::iter::successors(parent.map(|p| &self.nodes[p]), |n| n.parent.map(|p| &self.nodes[p]))
    }
}

/// The Karp-Miller tree of a VASS without resets.
pub fn karp_miller(
    m: &VassModel,
    init: &Config<Vector>,
    budgets: &Budgets,
) -> Result<KarpMillerTree, AnalysisError> {
    if m.has_resets() {
        return Err(AnalysisError::Unsupported(
            "Karp-Miller acceleration is unsound in the presence of resets".into(),
        ));
    }
    m.check_config(init)?;
    let root = KmNode {
        marking: Config::new(init.control, OmegaVector::from(&init.payload)),
        parent: None,
        transition: None,
        accelerated: false,
        closed: false,
    };
    let mut tree = KarpMillerTree { nodes: vec![root], clover: Vec::new() };
    let mut queue = VecDeque::from([0usize]);
    while let Some(n) = queue.pop_front() {
        let marking = tree.nodes[n].marking.clone();
        for t in 0..m.transition_count() {
            let Some(mut next) = m.fire_omega(t, &marking) else { continue };
            let before = next.payload.omega_count();
            // Repeat until no ancestor strictly below `next` raises another coordinate.
            loop {
                let mut changed = false;
                for a in tree.ancestors(Some(n)) {
                    if a.marking.control == next.control && a.marking.leq(&next) {
                        for (ai, ni) in a.marking.payload.0.iter().zip(next.payload.0.iter_mut()) {
                            if ai != ni && !ni.is_omega() {
                                *ni = OmegaNat::Omega;
                                changed = true;
                            }
                        }
                    }
                }
                if !changed {
                    break;
                }
            }
            let accelerated = next.payload.omega_count() > before;
            let closed = tree.ancestors(Some(n)).any(|a| a.marking == next);
            if tree.nodes.len() >= budgets.max_nodes {
                return Err(AnalysisError::BudgetExhausted { what: "tree node", limit: budgets.max_nodes });
            }
            tree.nodes.push(KmNode { marking: next, parent: Some(n), transition: Some(t), accelerated, closed });
            if !closed {
                queue.push_back(tree.nodes.len() - 1);
            }
        }
    }
    let mut clover = maximize_by(tree.nodes.iter().map(|n| n.marking.clone()), |a, b| a.leq(b));
    clover.sort();
    tree.clover = clover;
    Ok(tree)
}

#[cfg(test)]
mod tests {
    use super::*;
    use OmegaNat::{Finite, Omega};

    fn km(m: &VassModel) -> KarpMillerTree {
        karp_miller(m, m.initial(), &Budgets::default()).unwrap()
    }

    #[test]
    fn pumping_counter() {
        let m = VassModel::builder(2)
            .states(["q"])
            .transition("t1", "q", "q", "a", &[0, 0], &[1, 0], &[])
            .build()
            .unwrap();
        let tree = km(&m);
        assert_eq!(tree.clover, vec![Config::new(0, OmegaVector(vec![Omega, Finite(0)]))]);
        assert!(tree.nodes[1].accelerated);
        assert!(!tree.is_bounded());
    }

    #[test]
    fn decreasing_counter() {
        let m = VassModel::builder(1)
            .states(["q"])
            .init("q", &[3])
            .transition("t", "q", "q", "a", &[1], &[-1], &[])
            .build()
            .unwrap();
        let tree = km(&m);
        assert_eq!(tree.clover, vec![Config::new(0, OmegaVector(vec![Finite(3)]))]);
        assert_eq!(tree.nodes.len(), 4);
        assert!(tree.is_bounded());
    }

    #[test]
    fn transfer_loop_saturates_both() {
        let m = VassModel::builder(2)
            .states(["q"])
            .transition("t1", "q", "q", "a", &[0, 0], &[1, 0], &[])
            .transition("t2", "q", "q", "b", &[1, 0], &[-1, 1], &[])
            .build()
            .unwrap();
        assert_eq!(km(&m).clover, vec![Config::new(0, OmegaVector(vec![Omega, Omega]))]);
    }

    #[test]
    fn resets_are_refused() {
        let m = VassModel::builder(1)
            .states(["q"])
            .transition("t", "q", "q", "a", &[0], &[0], &[0])
            .build()
            .unwrap();
        assert!(matches!(karp_miller(&m, m.initial(), &Budgets::default()), Err(AnalysisError::Unsupported(_))));
    }
}
