use std::collections::BTreeSet;

use super::loops::LoopSet;
use crate::cfg::Cfg;
use crate::graph::Digraph;
use crate::node::NodeId;

/// `(s, t, w)`: `t` uses the value of `w` defined at `s`.
pub type VarEdge = (NodeId, NodeId, String);

pub(crate) fn cfg_digraph(cfg: &Cfg) -> Digraph {
    Digraph::new(
        cfg.nodes().keys().copied(),
        cfg.edges().iter().map(|e| (e.src, e.dst)),
    )
}

/// Whether a path of at least one edge leads from `s` to `t` without
/// passing through a node in `kills` on the way (endpoints excepted) and
/// without using a blocked edge.
fn reaching_path(
    g: &Digraph,
    kills: &[bool],
    s: usize,
    t: usize,
    blocked: &dyn Fn(usize, usize) -> bool,
) -> bool {
    let mut seen = vec![false; g.len()];
    let mut stack = Vec::new();
    for &v in g.succ(s) {
        if !blocked(s, v) && !seen[v] {
            seen[v] = true;
            stack.push(v);
        }
    }
    while let Some(u) = stack.pop() {
        if u == t {
            return true;
        }
        if kills[u] {
            continue;
        }
        for &v in g.succ(u) {
            if !blocked(u, v) && !seen[v] {
                seen[v] = true;
                stack.push(v);
            }
        }
    }
    false
}

fn edge_blocker<'a>(
    g: &'a Digraph,
    edges: &'a BTreeSet<(NodeId, NodeId)>,
) -> impl Fn(usize, usize) -> bool + 'a {
    move |u, v| edges.contains(&(g.id(u), g.id(v)))
}

/// Loop-independent and loop-carried data dependences. A dependence is
/// loop-independent when no loop holds both ends, or when some reaching path
/// avoids every back edge of the loops that do.
pub fn data_dependence(cfg: &Cfg, loops: &LoopSet) -> (BTreeSet<VarEdge>, BTreeSet<VarEdge>) {
    let g = cfg_digraph(cfg);
    let mut lidd = BTreeSet::new();
    let mut lcdd = BTreeSet::new();
    let defs: Vec<Option<&str>> = g.ids().iter().map(|n| cfg.nodes()[n].defines()).collect();
    let uses: Vec<BTreeSet<String>> = g.ids().iter().map(|n| cfg.nodes()[n].uses()).collect();
    for (s, def) in defs.iter().enumerate() {
        let Some(w) = def else { continue };
        let kills: Vec<bool> = defs.iter().map(|d| d == &Some(*w)).collect();
        for (t, used) in uses.iter().enumerate() {
            if !used.contains(*w) || !reaching_path(&g, &kills, s, t, &|_, _| false) {
                continue;
            }
            let (sn, tn) = (g.id(s), g.id(t));
            let key = (sn, tn, w.to_string());
            if !loops.in_common_loop(sn, tn) {
                lidd.insert(key);
                continue;
            }
            let be = loops.back_edges_between(sn, tn);
            if reaching_path(&g, &kills, s, t, &edge_blocker(&g, &be)) {
                lidd.insert(key);
            } else {
                lcdd.insert(key);
            }
        }
    }
    (lidd, lcdd)
}

/// Def-order dependences between two definitions of one variable that reach
/// a common use loop-independently.
pub fn def_order_dependence(
    cfg: &Cfg,
    lidd: &BTreeSet<VarEdge>,
    loops: &LoopSet,
) -> BTreeSet<(NodeId, NodeId)> {
    let g = cfg_digraph(cfg);
    let mut out = BTreeSet::new();
    let open = vec![false; g.len()];
    let reaches = |s: NodeId, t: NodeId, blocked: &BTreeSet<(NodeId, NodeId)>| {
        let (si, ti) = (g.index_of(s).unwrap(), g.index_of(t).unwrap());
        reaching_path(&g, &open, si, ti, &edge_blocker(&g, blocked))
    };
    for (s, u, w) in lidd {
        for (t, u2, w2) in lidd {
            if u != u2 || w != w2 || s == t {
                continue;
            }
            let common = loops.in_common_loop(*s, *t);
            let ordered = if !common {
                reaches(*s, *t, &BTreeSet::new())
            } else {
                let be = loops.back_edges_between(*s, *t);
                reaches(*s, *t, &be) || !reaches(*t, *s, &be)
            };
            if ordered {
                out.insert((*s, *t));
            }
        }
    }
    out
}
