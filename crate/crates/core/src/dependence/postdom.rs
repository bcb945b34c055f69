use std::collections::{BTreeMap, BTreeSet};

use crate::cfg::AugmentedCfg;
use crate::graph::Digraph;
use crate::node::{Branch, NodeId};

/// Strong post-dominance: `t` post-dominates `s` iff every maximal path from
/// `s` contains `t`. Infinite paths count, so a node after a loop does not
/// post-dominate the nodes inside it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PostDom {
    index: BTreeMap<NodeId, usize>,
    ids: Vec<NodeId>,
    // rel[t][s]
    rel: Vec<Vec<bool>>,
}

impl PostDom {
    pub fn post_dominates(&self, t: NodeId, s: NodeId) -> bool {
        match (self.index.get(&t), self.index.get(&s)) {
            (Some(&t), Some(&s)) => self.rel[t][s],
            _ => false,
        }
    }

    /// Nodes post-dominated by `t`.
    pub fn dominated_by(&self, t: NodeId) -> BTreeSet<NodeId> {
        let Some(&ti) = self.index.get(&t) else {
            return BTreeSet::new();
        };
        self.ids
            .iter()
            .zip(&self.rel[ti])
            .filter(|(_, &d)| d)
            .map(|(n, _)| *n)
            .collect()
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.ids
    }
}

/// Least fixpoint per target `t`: start from `{t}` and add any node whose
/// successors are non-empty and all already in the set. Works on any
/// digraph; sinks other than `t` are never added.
pub fn post_dominance(g: &Digraph) -> PostDom {
    let n = g.len();
    let mut rel = vec![vec![false; n]; n];
    for (t, row) in rel.iter_mut().enumerate() {
        // outstanding[s] = successors of s not yet in the set
        let mut outstanding: Vec<usize> = (0..n).map(|s| g.succ(s).len()).collect();
        row[t] = true;
        let mut work = vec![t];
        while let Some(v) = work.pop() {
            for &p in g.pred(v) {
                if row[p] {
                    continue;
                }
                outstanding[p] -= 1;
                if outstanding[p] == 0 {
                    row[p] = true;
                    work.push(p);
                }
            }
        }
    }
    PostDom {
        index: g.ids().iter().enumerate().map(|(i, n)| (*n, i)).collect(),
        ids: g.ids().to_vec(),
        rel,
    }
}

pub(crate) fn augmented_digraph(g: &AugmentedCfg) -> Digraph {
    Digraph::new(g.nodes(), g.edges().iter().map(|e| (e.src, e.dst)))
}

pub fn strong_postdom(g: &AugmentedCfg) -> PostDom {
    post_dominance(&augmented_digraph(g))
}

/// Control dependence `(s, t, Q)`: `s` has a `Q`-successor post-dominated by
/// `t`, and `t` does not strictly post-dominate `s`. Only labeled edges
/// (from `entry` and if-nodes) are sources, and `exit` is never a target.
pub fn control_dependence(g: &AugmentedCfg, pd: &PostDom) -> BTreeSet<(NodeId, NodeId, Branch)> {
    let mut out = BTreeSet::new();
    let targets: Vec<NodeId> = g.cfg.nodes().keys().copied().collect();
    for e in g.edges() {
        let Some(label) = e.label else { continue };
        for &t in &targets {
            if pd.post_dominates(t, e.dst) && !(pd.post_dominates(t, e.src) && t != e.src) {
                out.insert((e.src, t, label));
            }
        }
    }
    out
}
