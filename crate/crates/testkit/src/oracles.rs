//! Exhaustive checks written directly against model semantics.

use std::collections::BTreeMap;

use wsts_core::models::TransitionSystem;
use wsts_core::wqo::Config;

use crate::generators::AffinePcm;

/// The reachable graph within a cutoff, searched for a cycle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LassoOracle {
    /// Every successor stayed within the cutoff and the state budget held.
    pub conclusive: bool,
    /// Some explored configuration can reach itself.
    pub has_cycle: bool,
    pub explored: usize,
}

impl LassoOracle {
    /// `Some(false)` on a cycle (a genuine lasso), `Some(true)` when the
    /// whole reachable graph was explored without one.
    pub fn terminates(&self) -> Option<bool> {
        if self.has_cycle {
            Some(false)
        } else if self.conclusive {
            Some(true)
        } else {
            None
        }
    }

    /// A finite explored reachability set proves boundedness; nothing proves
    /// unboundedness.
    pub fn bounded(&self) -> Option<bool> {
        self.conclusive.then_some(true)
    }
}

pub fn lasso_oracle<M: TransitionSystem>(
    m: &M,
    init: &Config<M::Payload>,
    exceeds: impl Fn(&Config<M::Payload>) -> bool,
    max_states: usize,
) -> LassoOracle {
    let mut index: BTreeMap<Config<M::Payload>, usize> = BTreeMap::new();
    let mut edges: Vec<Vec<usize>> = Vec::new();
    let mut configs = vec![init.clone()];
    index.insert(init.clone(), 0);
    edges.push(Vec::new());
    let mut conclusive = !exceeds(init);
    let mut next = 0;
    while conclusive && next < configs.len() {
        let c = configs[next].clone();
        for (_, s) in m.successors(&c) {
            if exceeds(&s) {
                conclusive = false;
                continue;
            }
            let id = match index.get(&s) {
                Some(&id) => id,
                None => {
                    if configs.len() >= max_states {
                        conclusive = false;
                        continue;
                    }
                    configs.push(s.clone());
                    edges.push(Vec::new());
                    index.insert(s, configs.len() - 1);
                    configs.len() - 1
                }
            };
            edges[next].push(id);
        }
        next += 1;
    }
    // Iterative three-colour DFS over the explored part.
    let n = configs.len();
    let mut colour = vec![0u8; n];
    let mut has_cycle = false;
    'outer: for root in 0..n {
        if colour[root] != 0 {
            continue;
        }
        let mut stack = vec![(root, 0usize)];
        colour[root] = 1;
        while let Some(&mut (v, ref mut i)) = stack.last_mut() {
            if *i < edges[v].len() {
                let w = edges[v][*i];
                *i += 1;
                match colour[w] {
                    0 => {
                        colour[w] = 1;
                        stack.push((w, 0));
                    }
                    1 => {
                        has_cycle = true;
                        break 'outer;
                    }
                    _ => {}
                }
            } else {
                colour[v] = 2;
                stack.pop();
            }
        }
    }
    LassoOracle { conclusive, has_cycle, explored: n }
}

fn points(d: usize, hi: i64) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for _ in 0..d {
        out = out
            .into_iter()
            .flat_map(|p| (0..=hi).map(move |x| [p.clone(), vec![x]].concat()))
            .collect();
    }
    out
}

fn dickson(a: &[i64], b: &[i64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

/// Checks strong (and, if `strict`, strict) monotonicity for componentwise
/// `<=` with sources in `0..=bound`. Successors of affine steps with
/// coefficients at most 2 and offsets at most 2 stay within `2*bound + 2`.
pub fn grid_monotone(p: &AffinePcm, strict: bool, bound: i64) -> bool {
    let sources = points(p.dimension, bound);
    let targets = points(p.dimension, 2 * bound + 2);
    for t in 0..p.steps.len() {
        for x in &sources {
            for y in targets.iter().filter(|y| p.holds(t, x, y)) {
                for z in sources.iter().filter(|z| dickson(x, z)) {
                    let strict_in = x != z;
                    let ok = targets.iter().any(|w| {
                        p.holds(t, z, w) && dickson(y, w) && (!strict || !strict_in || y != w)
                    });
                    if !ok {
                        return false;
                    }
                }
            }
        }
    }
    true
}
