use std::fmt::Write;

use crate::algorithms::{KarpMillerTree, ReducedReachabilityTree, RrtStatus};
use crate::models::TransitionSystem;

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Dashed edges lead to accelerated nodes; closed leaves are double circles.
pub fn km_to_dot<M: TransitionSystem>(m: &M, tree: &KarpMillerTree) -> String {
    let mut out = String::from("digraph km {\n");
    for (i, n) in tree.nodes.iter().enumerate() {
        let label = format!("{} {}", m.states()[n.marking.control], n.marking.payload);
        let shape = if n.closed { "doublecircle" } else { "ellipse" };
        writeln!(out, "  n{i} [label={}, shape={shape}];", quote(&label)).unwrap();
    }
    for (i, n) in tree.nodes.iter().enumerate() {
        if let (Some(p), Some(t)) = (n.parent, n.transition) {
            let style = if n.accelerated { ", style=dashed" } else { "" };
            writeln!(out, "  n{p} -> n{i} [label={}{style}];", quote(m.transition_name(t))).unwrap();
        }
    }
    out.push_str("}\n");
    out
}

/// Subsumed leaves are double circles, with a dotted edge back to the ancestor.
pub fn rrt_to_dot<M: TransitionSystem>(m: &M, tree: &ReducedReachabilityTree<M::Payload>) -> String {
    let mut out = String::from("digraph rrt {\n");
    for (i, n) in tree.nodes.iter().enumerate() {
        let shape = match n.status {
            RrtStatus::Subsumed { .. } => "doublecircle",
            _ => "ellipse",
        };
        writeln!(out, "  n{i} [label={}, shape={shape}];", quote(&m.format_config(&n.config))).unwrap();
    }
    for (i, n) in tree.nodes.iter().enumerate() {
        if let (Some(p), Some(t)) = (n.parent, n.transition) {
            writeln!(out, "  n{p} -> n{i} [label={}];", quote(m.transition_name(t))).unwrap();
        }
        if let RrtStatus::Subsumed { ancestor, strict } = n.status {
            let label = if strict { "<" } else { "=" };
            writeln!(out, "  n{i} -> n{ancestor} [style=dotted, label=\"{label}\"];").unwrap();
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithms::{karp_miller, reduced_reachability_tree, Budgets};
    use crate::models::VassModel;

    #[test]
    fn km_dot_shape() {
        let m = VassModel::builder(1)
            .states(["q"])
            .transition("t", "q", "q", "a", &[0], &[1], &[])
            .build()
            .unwrap();
        let tree = karp_miller(&m, m.initial(), &Budgets::default()).unwrap();
        let dot = km_to_dot(&m, &tree);
        assert!(dot.starts_with("digraph km {"));
        assert!(dot.contains("style=dashed"));
        assert!(dot.contains("doublecircle"));
        let rrt = reduced_reachability_tree(&m, m.initial(), &Budgets::default()).unwrap();
        let dot = rrt_to_dot(&m, &rrt);
        assert!(dot.starts_with("digraph rrt {"));
        assert!(dot.contains("n1 -> n0 [style=dotted"));
    }
}
