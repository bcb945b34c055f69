//! Loops as arbitrary strongly connected regions.
//!
//! A loop is any node set whose induced subgraph is strongly connected and
//! has at least one edge; nested and overlapping regions are all loops. A
//! back edge of a loop is an internal edge whose target also has a
//! predecessor outside the loop. This is not the natural-loop notion and
//! works unchanged on irreducible graphs and on control dependence graphs.

use std::collections::{BTreeSet, HashSet};

use serde::Serialize;
use thiserror::Error;

use crate::graph::Digraph;
use crate::node::NodeId;

pub const DEFAULT_LOOP_LIMIT: usize = 16;
const MAX_LOOP_LIMIT: usize = 24;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Loop {
    pub nodes: BTreeSet<NodeId>,
    pub back_edges: BTreeSet<(NodeId, NodeId)>,
}

impl Loop {
    pub fn contains(&self, n: NodeId) -> bool {
        self.nodes.contains(&n)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct LoopSet {
    loops: Vec<Loop>,
    back_edges: BTreeSet<(NodeId, NodeId)>,
}

impl LoopSet {
    fn from_loops(mut loops: Vec<Loop>) -> Self {
        loops.sort();
        loops.dedup();
        let back_edges = loops
            .iter()
            .flat_map(|l| l.back_edges.iter().copied())
            .collect();
        LoopSet { loops, back_edges }
    }

    pub fn loops(&self) -> &[Loop] {
        &self.loops
    }

    pub fn len(&self) -> usize {
        self.loops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.loops.is_empty()
    }

    /// Union of the back edges of every loop.
    pub fn back_edges(&self) -> &BTreeSet<(NodeId, NodeId)> {
        &self.back_edges
    }

    pub fn containing_both(&self, s: NodeId, t: NodeId) -> impl Iterator<Item = &Loop> + '_ {
        self.loops
            .iter()
            .filter(move |l| l.contains(s) && l.contains(t))
    }

    pub fn in_common_loop(&self, s: NodeId, t: NodeId) -> bool {
        self.containing_both(s, t).next().is_some()
    }

    /// Union of the back edges of every loop containing both `s` and `t`.
    pub fn back_edges_between(&self, s: NodeId, t: NodeId) -> BTreeSet<(NodeId, NodeId)> {
        self.containing_both(s, t)
            .flat_map(|l| l.back_edges.iter().copied())
            .collect()
    }

    /// Nodes lying in at least one loop.
    pub fn loop_nodes(&self) -> BTreeSet<NodeId> {
        self.loops
            .iter()
            .flat_map(|l| l.nodes.iter().copied())
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum LoopError {
    #[error("strongly connected component of {size} nodes exceeds the exhaustive enumeration limit of {limit}")]
    TooLarge { size: usize, limit: usize },
}

fn make_loop(g: &Digraph, members: &[usize]) -> Loop {
    let mut inside = vec![false; g.len()];
    for &m in members {
        inside[m] = true;
    }
    let mut back_edges = BTreeSet::new();
    for &v in members {
        if !g.pred(v).iter().any(|&p| !inside[p]) {
            continue;
        }
        for &u in g.pred(v) {
            if inside[u] {
                back_edges.insert((g.id(u), g.id(v)));
            }
        }
    }
    Loop {
        nodes: members.iter().map(|&i| g.id(i)).collect(),
        back_edges,
    }
}

/// Every strongly connected subset with at least one edge, by exhaustive
/// subset enumeration inside each maximal SCC. Fails if an SCC has more than
/// `limit` nodes (capped at 24).
pub fn enumerate_loops(g: &Digraph, limit: usize) -> Result<LoopSet, LoopError> {
    let limit = limit.min(MAX_LOOP_LIMIT);
    let mut loops = Vec::new();
    for scc in g.sccs() {
        if scc.len() == 1 && !g.has_edge(scc[0], scc[0]) {
            continue;
        }
        if scc.len() > limit {
            return Err(LoopError::TooLarge {
                size: scc.len(),
                limit,
            });
        }
        let k = scc.len();
        let local = |v: usize| scc.binary_search(&v).ok();
        let mut succ = vec![0u32; k];
        let mut pred = vec![0u32; k];
        for (i, &u) in scc.iter().enumerate() {
            for &v in g.succ(u) {
                if let Some(j) = local(v) {
                    succ[i] |= 1 << j;
                    pred[j] |= 1 << i;
                }
            }
        }
        let closure = |mask: u32, adj: &[u32]| {
            let mut reach = mask & mask.wrapping_neg();
            loop {
                let mut next = reach;
                let mut bits = reach;
                while bits != 0 {
                    let i = bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    next |= adj[i] & mask;
                }
                if next == reach {
                    return reach;
                }
                reach = next;
            }
        };
        for mask in 1u32..(1u32 << k) {
            if mask.count_ones() == 1 {
                let i = mask.trailing_zeros() as usize;
                if succ[i] & mask == 0 {
                    continue;
                }
            } else if closure(mask, &succ) != mask || closure(mask, &pred) != mask {
                continue;
            }
            let members: Vec<usize> = (0..k)
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| scc[i])
                .collect();
            loops.push(make_loop(g, &members));
        }
    }
    Ok(LoopSet::from_loops(loops))
}

/// The same loop set computed by recursive decomposition: every maximal SCC
/// of a region is a loop, and every smaller loop inside it avoids at least
/// one of its nodes, so recursing on the SCC minus each node in turn reaches
/// all of them. Cost is proportional to the number of loops rather than to
/// the number of node subsets.
pub fn enumerate_loops_decomposed(g: &Digraph) -> LoopSet {
    let mut loops = Vec::new();
    let mut visited: HashSet<Vec<usize>> = HashSet::new();
    let mut work: Vec<Vec<usize>> = vec![(0..g.len()).collect()];
    while let Some(region) = work.pop() {
        let mut keep = vec![false; g.len()];
        for &v in &region {
            keep[v] = true;
        }
        for scc in g.sccs_within(&keep) {
            if scc.len() == 1 && !g.has_edge(scc[0], scc[0]) {
                continue;
            }
            if !visited.insert(scc.clone()) {
                continue;
            }
            loops.push(make_loop(g, &scc));
            for &v in &scc {
                let sub: Vec<usize> = scc.iter().copied().filter(|&w| w != v).collect();
                if !sub.is_empty() {
                    work.push(sub);
                }
            }
        }
    }
    LoopSet::from_loops(loops)
}

/// The loop nesting forest: every maximal SCC is a loop; deleting its back
/// edges and recursing inside it yields the nested loops. Every cycle of the
/// graph contains a back edge of the smallest forest loop holding it, so
/// removing all reported back edges leaves the graph acyclic. Unlike the full
/// enumeration, a loop that skips part of an enclosing loop's body (one arm
/// of a diamond, say) is not reported, so forward edges of that body never
/// count as back edges.
pub fn loop_forest(g: &Digraph) -> LoopSet {
    let mut loops = Vec::new();
    // (region, edges already removed as back edges)
    let mut work = vec![(
        (0..g.len()).collect::<Vec<usize>>(),
        BTreeSet::<(usize, usize)>::new(),
    )];
    while let Some((region, removed)) = work.pop() {
        let sub = Digraph::new(
            region.iter().map(|&v| g.id(v)),
            g.edges()
                .filter(|&(u, v)| {
                    region.binary_search(&u).is_ok()
                        && region.binary_search(&v).is_ok()
                        && !removed.contains(&(u, v))
                })
                .map(|(u, v)| (g.id(u), g.id(v))),
        );
        for scc in sub.sccs() {
            if scc.len() == 1 && !sub.has_edge(scc[0], scc[0]) {
                continue;
            }
            let mut members: Vec<usize> = scc
                .iter()
                .map(|&i| g.index_of(sub.id(i)).expect("subgraph node"))
                .collect();
            members.sort_unstable();
            let l = make_loop(g, &members);
            if l.back_edges.is_empty() {
                // a component without entries has no nested structure to
                // peel off; keep it whole
                loops.push(l);
                continue;
            }
            let mut inner = removed.clone();
            for &(u, v) in &l.back_edges {
                inner.insert((g.index_of(u).unwrap(), g.index_of(v).unwrap()));
            }
            loops.push(l);
            work.push((members, inner));
        }
    }
    LoopSet::from_loops(loops)
}

/// Exhaustive enumeration with the default limit, falling back to the
/// decomposition enumerator on larger components.
pub fn loops_of(g: &Digraph) -> LoopSet {
    enumerate_loops(g, DEFAULT_LOOP_LIMIT).unwrap_or_else(|_| enumerate_loops_decomposed(g))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(edges: &[(u32, u32)]) -> Digraph {
        let ids: BTreeSet<NodeId> = edges
            .iter()
            .flat_map(|&(a, b)| [NodeId::Stmt(a), NodeId::Stmt(b)])
            .collect();
        Digraph::new(ids, edges.iter().map(|&(a, b)| (a.into(), b.into())))
    }

    fn set(ids: &[u32]) -> BTreeSet<NodeId> {
        ids.iter().map(|&i| NodeId::Stmt(i)).collect()
    }

    fn edges(e: &[(u32, u32)]) -> BTreeSet<(NodeId, NodeId)> {
        e.iter().map(|&(a, b)| (a.into(), b.into())).collect()
    }

    #[test]
    fn two_cycles_through_one_node() {
        // 0 -> 1, 1 <-> 2, 1 <-> 3
        let d = g(&[(0, 1), (1, 2), (2, 1), (1, 3), (3, 1)]);
        let ls = enumerate_loops(&d, DEFAULT_LOOP_LIMIT).unwrap();
        let nodes: Vec<_> = ls.loops().iter().map(|l| l.nodes.clone()).collect();
        assert_eq!(nodes, vec![set(&[1, 2]), set(&[1, 2, 3]), set(&[1, 3])]);
        let big = &ls.loops()[1];
        assert_eq!(big.back_edges, edges(&[(2, 1), (3, 1)]));
        assert_eq!(enumerate_loops_decomposed(&d), ls);
    }

    #[test]
    fn self_loop_is_a_loop() {
        let d = g(&[(0, 1), (1, 1), (1, 2)]);
        let ls = enumerate_loops(&d, DEFAULT_LOOP_LIMIT).unwrap();
        assert_eq!(ls.len(), 1);
        assert_eq!(ls.loops()[0].back_edges, edges(&[(1, 1)]));
    }

    #[test]
    fn acyclic_has_no_loops() {
        let d = g(&[(0, 1), (1, 2), (0, 2)]);
        assert!(enumerate_loops(&d, DEFAULT_LOOP_LIMIT).unwrap().is_empty());
    }

    #[test]
    fn forest_skips_partial_bodies() {
        // 1 -> 2 -> {3, 4} -> 5 -> 1, entered from 0
        let d = g(&[(0, 1), (1, 2), (2, 3), (2, 4), (3, 5), (4, 5), (5, 1)]);
        let full = enumerate_loops(&d, DEFAULT_LOOP_LIMIT).unwrap();
        assert_eq!(full.len(), 3);
        let forest = loop_forest(&d);
        assert_eq!(forest.len(), 1);
        assert_eq!(forest.back_edges(), &edges(&[(5, 1)]));
    }

    #[test]
    fn forest_nests() {
        // outer 1..4 closed by (4, 1), inner 2 <-> 3 entered at 2
        let d = g(&[(0, 1), (1, 2), (2, 3), (3, 2), (3, 4), (4, 1)]);
        let forest = loop_forest(&d);
        let nodes: Vec<_> = forest.loops().iter().map(|l| l.nodes.clone()).collect();
        assert_eq!(nodes, vec![set(&[1, 2, 3, 4]), set(&[2, 3])]);
        assert_eq!(forest.back_edges(), &edges(&[(3, 2), (4, 1)]));
    }

    #[test]
    fn limit_is_reported() {
        let ring: Vec<(u32, u32)> = (0..5).map(|i| (i, (i + 1) % 5)).collect();
        let d = g(&ring);
        assert_eq!(
            enumerate_loops(&d, 4),
            Err(LoopError::TooLarge { size: 5, limit: 4 })
        );
        assert_eq!(loops_of(&d).len(), 1);
    }
}
