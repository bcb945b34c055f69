//! Brute-force oracles shared by the integration tests and the acceptance
//! binary. None of them reuse the library's algorithms.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use pdgsem::cfg::Cfg;
use pdgsem::dependence::LoopSet;
use pdgsem::graph::Digraph;
use pdgsem::node::NodeId;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Edges = BTreeSet<(u32, u32)>;

/// A random digraph over nodes `0..n` (self loops allowed).
pub fn random_edges(seed: u64, max_nodes: u32) -> (u32, Edges) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=max_nodes);
    let density = rng.gen_range(0.1..0.5);
    let mut edges = BTreeSet::new();
    for u in 0..n {
        for v in 0..n {
            if rng.gen_bool(density) {
                edges.insert((u, v));
            }
        }
    }
    (n, edges)
}

pub fn digraph(n: u32, edges: &Edges) -> Digraph {
    Digraph::new(
        (0..n).map(NodeId::from),
        edges.iter().map(|&(a, b)| (a.into(), b.into())),
    )
}

fn succs(edges: &Edges, u: u32) -> Vec<u32> {
    edges.iter().filter(|e| e.0 == u).map(|e| e.1).collect()
}

/// `t` post-dominates `s` iff no maximal path from `s` avoids `t`. A path
/// that revisits a node without meeting `t` extends to an infinite
/// `t`-avoiding path.
pub fn postdom_by_paths(edges: &Edges, t: u32, s: u32) -> bool {
    fn avoids(edges: &Edges, t: u32, v: u32, on_path: &mut Vec<u32>) -> bool {
        if v == t {
            return false;
        }
        if on_path.contains(&v) {
            return true;
        }
        let next = succs(edges, v);
        if next.is_empty() {
            return true;
        }
        on_path.push(v);
        let found = next.into_iter().any(|w| avoids(edges, t, w, on_path));
        on_path.pop();
        found
    }
    !avoids(edges, t, s, &mut Vec::new())
}

/// Every node subset whose induced subgraph is strongly connected and has
/// an edge, with back edges into nodes that have an outside predecessor.
pub fn loops_by_subsets(n: u32, edges: &Edges) -> BTreeMap<BTreeSet<u32>, BTreeSet<(u32, u32)>> {
    let mut out = BTreeMap::new();
    for mask in 1u32..(1 << n) {
        let s: BTreeSet<u32> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        let inner: Vec<(u32, u32)> = edges
            .iter()
            .copied()
            .filter(|(a, b)| s.contains(a) && s.contains(b))
            .collect();
        if inner.is_empty() {
            continue;
        }
        let strongly = s.iter().all(|&a| {
            let mut seen = BTreeSet::from([a]);
            let mut stack = vec![a];
            while let Some(u) = stack.pop() {
                for &(x, y) in &inner {
                    if x == u && seen.insert(y) {
                        stack.push(y);
                    }
                }
            }
            seen == s
        });
        if !strongly {
            continue;
        }
        let entered: BTreeSet<u32> = edges
            .iter()
            .filter(|(a, b)| !s.contains(a) && s.contains(b))
            .map(|e| e.1)
            .collect();
        let back = inner
            .iter()
            .copied()
            .filter(|(_, b)| entered.contains(b))
            .collect();
        out.insert(s, back);
    }
    out
}

pub fn loop_map(set: &LoopSet) -> BTreeMap<BTreeSet<u32>, BTreeSet<(u32, u32)>> {
    let id = |n: &NodeId| match n {
        NodeId::Stmt(i) => *i,
        other => panic!("unexpected node {other}"),
    };
    set.loops()
        .iter()
        .map(|l| {
            (
                l.nodes.iter().map(id).collect(),
                l.back_edges.iter().map(|(a, b)| (id(a), id(b))).collect(),
            )
        })
        .collect()
}

/// All simple paths `s -> .. -> t` (a simple cycle when `s == t`) with at
/// least one edge, as edge lists.
pub fn simple_paths(cfg: &Cfg, s: NodeId, t: NodeId) -> Vec<Vec<(NodeId, NodeId)>> {
    fn go(
        cfg: &Cfg,
        v: NodeId,
        t: NodeId,
        visited: &mut BTreeSet<NodeId>,
        path: &mut Vec<(NodeId, NodeId)>,
        out: &mut Vec<Vec<(NodeId, NodeId)>>,
    ) {
        let next: BTreeSet<NodeId> = cfg.successors(v).collect();
        for w in next {
            path.push((v, w));
            if w == t {
                out.push(path.clone());
            } else if visited.insert(w) {
                go(cfg, w, t, visited, path, out);
                visited.remove(&w);
            }
            path.pop();
        }
    }
    let mut out = Vec::new();
    go(
        cfg,
        s,
        t,
        &mut BTreeSet::from([s]),
        &mut Vec::new(),
        &mut out,
    );
    out
}

pub type VarEdges = BTreeSet<(NodeId, NodeId, String)>;

/// Data dependences by enumerating simple reaching paths. A non-simple
/// reaching path always contains a simple one using a subset of its edges,
/// so simple paths decide both existence and back-edge avoidance.
pub fn data_deps_by_paths(cfg: &Cfg, loops: &LoopSet) -> (VarEdges, VarEdges) {
    let mut lidd = BTreeSet::new();
    let mut lcdd = BTreeSet::new();
    let nodes: Vec<NodeId> = cfg.nodes().keys().copied().collect();
    for &s in &nodes {
        let Some(w) = cfg.stmt(s).unwrap().defines().map(str::to_string) else {
            continue;
        };
        for &t in &nodes {
            if !cfg.stmt(t).unwrap().uses().contains(&w) {
                continue;
            }
            let reaching: Vec<_> = simple_paths(cfg, s, t)
                .into_iter()
                .filter(|p| {
                    p[..p.len() - 1]
                        .iter()
                        .all(|&(_, mid)| cfg.stmt(mid).unwrap().defines() != Some(w.as_str()))
                })
                .collect();
            if reaching.is_empty() {
                continue;
            }
            let common: Vec<_> = loops
                .loops()
                .iter()
                .filter(|l| l.nodes.contains(&s) && l.nodes.contains(&t))
                .collect();
            let be: BTreeSet<(NodeId, NodeId)> = common
                .iter()
                .flat_map(|l| l.back_edges.iter().copied())
                .collect();
            let free = reaching.iter().any(|p| p.iter().all(|e| !be.contains(e)));
            if common.is_empty() || free {
                lidd.insert((s, t, w.clone()));
            } else {
                lcdd.insert((s, t, w.clone()));
            }
        }
    }
    (lidd, lcdd)
}

pub fn set(ids: &[u32]) -> BTreeSet<NodeId> {
    ids.iter().map(|&i| NodeId::from(i)).collect()
}
