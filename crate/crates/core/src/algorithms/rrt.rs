use std::collections::VecDeque;

use crate::algorithms::{AnalysisError, Budgets};
use crate::models::{TransitionSystem, VassModel};
use crate::wqo::{Config, QuasiOrder, Vector};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RrtStatus {
    /// Expanded.
    Open,
    /// No successor.
    Deadend,
    /// Some path ancestor is `<=` this node; not expanded.
    Subsumed { ancestor: usize, strict: bool },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RrtNode<P> {
    pub config: Config<P>,
    pub parent: Option<usize>,
    pub transition: Option<usize>,
    pub status: RrtStatus,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReducedReachabilityTree<P> {
    /// Node 0 is the root; breadth-first numbering.
    pub nodes: Vec<RrtNode<P>>,
}

impl<P> ReducedReachabilityTree<P> {
    /// Transitions from the root to `node`.
    pub fn path_to(&self, node: usize) -> Vec<usize> {
        let mut path = Vec::new();
        let mut cur = node;
        while let (Some(p), Some(t)) = (self.nodes[cur].parent, self.nodes[cur].transition) {
            path.push(t);
            cur = p;
        }
        path.reverse();
        path
    }

    fn is_ancestor(&self, a: usize, mut n: usize) -> bool {
        while let Some(p) = self.nodes[n].parent {
            if p == a {
                return true;
            }
            n = p;
        }
        false
    }
}

/// A run `prefix` to `ancestor`, then `cycle` to `descendant >= ancestor`.
/// By monotonicity the cycle can be repeated forever.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PumpingWitness<P> {
    pub prefix: Vec<usize>,
    pub cycle: Vec<usize>,
    pub ancestor: Config<P>,
    pub descendant: Config<P>,
    pub strict: bool,
}

impl<P: Clone + QuasiOrder + PartialEq> PumpingWitness<P> {
    /// Replays the witness with `successors` and checks every claim it makes.
    pub fn validate<M: TransitionSystem<Payload = P>>(&self, m: &M, init: &Config<P>) -> bool {
        let run = |start: &Config<P>, steps: &[usize]| {
            steps.iter().try_fold(start.clone(), |c, &t| {
                m.successors(&c).into_iter().find(|(u, _)| *u == t).map(|(_, s)| s)
            })
        };
        let Some(a) = run(init, &self.prefix) else { return false };
        let Some(d) = run(&a, &self.cycle) else { return false };
        a == self.ancestor
            && d == self.descendant
            && !self.cycle.is_empty()
            && a.leq(&d)
            && (!self.strict || !d.leq(&a))
    }
}

/// Expands breadth-first, stopping a branch at a node that dominates one of
/// its path ancestors. A strictly dominated ancestor is preferred.
pub fn reduced_reachability_tree<M: TransitionSystem>(
    m: &M,
    init: &Config<M::Payload>,
    budgets: &Budgets,
) -> Result<ReducedReachabilityTree<M::Payload>, AnalysisError> {
    m.check_config(init)?;
    let mut tree = ReducedReachabilityTree {
        nodes: vec![RrtNode { config: init.clone(), parent: None, transition: None, status: RrtStatus::Open }],
    };
    let mut queue = VecDeque::from([0usize]);
    while let Some(n) = queue.pop_front() {
        let succ = m.successors(&tree.nodes[n].config);
        if succ.is_empty() {
            tree.nodes[n].status = RrtStatus::Deadend;
            continue;
        }
        for (t, c) in succ {
            let mut equal = None;
            let mut strict = None;
            let mut a = Some(n);
            while let Some(i) = a {
                let ac = &tree.nodes[i].config;
                if ac.leq(&c) {
                    if c.leq(ac) {
                        equal = equal.or(Some(i));
                    } else {
                        strict = Some(i);
                        break;
                    }
                }
                a = tree.nodes[i].parent;
            }
            let status = match (strict, equal) {
                (Some(i), _) => RrtStatus::Subsumed { ancestor: i, strict: true },
                (None, Some(i)) => RrtStatus::Subsumed { ancestor: i, strict: false },
                (None, None) => RrtStatus::Open,
            };
            if tree.nodes.len() >= budgets.max_nodes {
                return Err(AnalysisError::BudgetExhausted { what: "tree node", limit: budgets.max_nodes });
            }
            tree.nodes.push(RrtNode { config: c, parent: Some(n), transition: Some(t), status });
            if status == RrtStatus::Open {
                queue.push_back(tree.nodes.len() - 1);
            }
        }
    }
    Ok(tree)
}

fn witness_for<P: Clone>(tree: &ReducedReachabilityTree<P>, node: usize) -> PumpingWitness<P> {
    let RrtStatus::Subsumed { ancestor, strict } = tree.nodes[node].status else {
        unreachable!("witness requested for a node that is not subsumed")
    };
    debug_assert!(tree.is_ancestor(ancestor, node));
    let prefix = tree.path_to(ancestor);
    let cycle = tree.path_to(node)[prefix.len()..].to_vec();
    PumpingWitness {
        prefix,
        cycle,
        ancestor: tree.nodes[ancestor].config.clone(),
        descendant: tree.nodes[node].config.clone(),
        strict,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TerminationResult<P> {
    pub terminates: bool,
    /// Present iff some run is infinite.
    pub witness: Option<PumpingWitness<P>>,
    pub tree: ReducedReachabilityTree<P>,
}

/// Every run from `init` is finite iff no leaf of the reduced reachability
/// tree is subsumed. Sound for strongly monotone systems.
pub fn termination<M: TransitionSystem>(
    m: &M,
    init: &Config<M::Payload>,
    budgets: &Budgets,
) -> Result<TerminationResult<M::Payload>, AnalysisError> {
    let tree = reduced_reachability_tree(m, init, budgets)?;
    let leaf = tree.nodes.iter().position(|n| matches!(n.status, RrtStatus::Subsumed { .. }));
    let witness = leaf.map(|i| witness_for(&tree, i));
    Ok(TerminationResult { terminates: witness.is_none(), witness, tree })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundednessResult {
    pub bounded: bool,
    /// Present iff unbounded; always strict.
    pub witness: Option<PumpingWitness<Vector>>,
    pub tree: ReducedReachabilityTree<Vector>,
}

/// The reachability set is finite iff no leaf strictly dominates its
/// ancestor. Requires strict monotonicity, so resets are refused.
pub fn boundedness(
    m: &VassModel,
    init: &Config<Vector>,
    budgets: &Budgets,
) -> Result<BoundednessResult, AnalysisError> {
    if m.has_resets() {
        return Err(AnalysisError::Unsupported(
            "boundedness needs strict monotonicity, which resets break".into(),
        ));
    }
    let tree = reduced_reachability_tree(m, init, budgets)?;
    let leaf = tree
        .nodes
        .iter()
        .position(|n| matches!(n.status, RrtStatus::Subsumed { strict: true, .. }));
    let witness = leaf.map(|i| witness_for(&tree, i));
    Ok(BoundednessResult { bounded: witness.is_none(), witness, tree })
}
