use std::collections::BTreeSet;

use serde::Serialize;

use super::data::cfg_digraph;
use super::loops::LoopSet;
use crate::cfg::Cfg;
use crate::node::NodeId;

/// Reachability from one node, with (`r`) and without (`r_prime`) the
/// global back-edge set, plus their complements over the program nodes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReachSets {
    pub r: BTreeSet<NodeId>,
    pub r_prime: BTreeSet<NodeId>,
    pub ur: BTreeSet<NodeId>,
    pub ur_prime: BTreeSet<NodeId>,
}

pub fn reach_sets(cfg: &Cfg, loops: &LoopSet, n: NodeId) -> ReachSets {
    let g = cfg_digraph(cfg);
    let all: BTreeSet<NodeId> = g.ids().iter().copied().collect();
    let Some(i) = g.index_of(n) else {
        return ReachSets {
            r: BTreeSet::new(),
            r_prime: BTreeSet::new(),
            ur: all.clone(),
            ur_prime: all,
        };
    };
    let collect = |seen: Vec<bool>| -> BTreeSet<NodeId> {
        seen.iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(j, _)| g.id(j))
            .collect()
    };
    let r = collect(g.reachable(&[i], |_, _| false));
    let be = loops.back_edges();
    let r_prime = collect(g.reachable(&[i], |u, v| be.contains(&(g.id(u), g.id(v)))));
    ReachSets {
        ur: all.difference(&r).copied().collect(),
        ur_prime: all.difference(&r_prime).copied().collect(),
        r,
        r_prime,
    }
}
