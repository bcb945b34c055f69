//! Dense-index directed graph used by the analyses. Parallel edges collapse.

use std::collections::BTreeMap;

use crate::node::NodeId;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Digraph {
    ids: Vec<NodeId>,
    index: BTreeMap<NodeId, usize>,
    succ: Vec<Vec<usize>>,
    pred: Vec<Vec<usize>>,
}

impl Digraph {
    /// Nodes are indexed in ascending [`NodeId`] order. Edges naming a node
    /// not in `ids` are ignored.
    pub fn new<I, E>(ids: I, edges: E) -> Self
    where
        I: IntoIterator<Item = NodeId>,
        E: IntoIterator<Item = (NodeId, NodeId)>,
    {
        let mut ids: Vec<NodeId> = ids.into_iter().collect();
        ids.sort();
        ids.dedup();
        let index: BTreeMap<NodeId, usize> = ids.iter().enumerate().map(|(i, n)| (*n, i)).collect();
        let mut succ = vec![Vec::new(); ids.len()];
        let mut pred = vec![Vec::new(); ids.len()];
        for (a, b) in edges {
            if let (Some(&u), Some(&v)) = (index.get(&a), index.get(&b)) {
                succ[u].push(v);
                pred[v].push(u);
            }
        }
        for l in succ.iter_mut().chain(pred.iter_mut()) {
            l.sort_unstable();
            l.dedup();
        }
        Digraph {
            ids,
            index,
            succ,
            pred,
        }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[NodeId] {
        &self.ids
    }

    pub fn id(&self, i: usize) -> NodeId {
        self.ids[i]
    }

    pub fn index_of(&self, n: NodeId) -> Option<usize> {
        self.index.get(&n).copied()
    }

    pub fn succ(&self, i: usize) -> &[usize] {
        &self.succ[i]
    }

    pub fn pred(&self, i: usize) -> &[usize] {
        &self.pred[i]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.succ[u].binary_search(&v).is_ok()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.succ
            .iter()
            .enumerate()
            .flat_map(|(u, vs)| vs.iter().map(move |&v| (u, v)))
    }

    /// Reflexive reachability from `from`, never traversing an edge for
    /// which `blocked(u, v)` holds.
    pub fn reachable<F>(&self, from: &[usize], blocked: F) -> Vec<bool>
    where
        F: Fn(usize, usize) -> bool,
    {
        let mut seen = vec![false; self.len()];
        let mut stack: Vec<usize> = Vec::new();
        for &f in from {
            if !seen[f] {
                seen[f] = true;
                stack.push(f);
            }
        }
        while let Some(u) = stack.pop() {
            for &v in &self.succ[u] {
                if !seen[v] && !blocked(u, v) {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen
    }

    /// Strongly connected components of the subgraph induced by `keep`,
    /// each sorted, in ascending order of their smallest member.
    pub fn sccs_within(&self, keep: &[bool]) -> Vec<Vec<usize>> {
        // iterative Tarjan
        const UNSEEN: usize = usize::MAX;
        let n = self.len();
        let mut order = vec![UNSEEN; n];
        let mut low = vec![0; n];
        let mut on_stack = vec![false; n];
        let mut stack = Vec::new();
        let mut counter = 0;
        let mut out = Vec::new();
        let mut call: Vec<(usize, usize)> = Vec::new();
        for root in 0..n {
            if !keep[root] || order[root] != UNSEEN {
                continue;
            }
            call.push((root, 0));
            while let Some(&mut (u, ref mut next)) = call.last_mut() {
                if *next == 0 && order[u] == UNSEEN {
                    order[u] = counter;
                    low[u] = counter;
                    counter += 1;
                    stack.push(u);
                    on_stack[u] = true;
                }
                if let Some(&v) = self.succ[u].get(*next) {
                    *next += 1;
                    if !keep[v] {
                        continue;
                    }
                    if order[v] == UNSEEN {
                        call.push((v, 0));
                    } else if on_stack[v] {
                        low[u] = low[u].min(order[v]);
                    }
                    continue;
                }
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    low[parent] = low[parent].min(low[u]);
                }
                if low[u] == order[u] {
                    let mut comp = Vec::new();
                    while let Some(w) = stack.pop() {
                        on_stack[w] = false;
                        comp.push(w);
                        if w == u {
                            break;
                        }
                    }
                    comp.sort_unstable();
                    out.push(comp);
                }
            }
        }
        out.sort();
        out
    }

    pub fn sccs(&self) -> Vec<Vec<usize>> {
        self.sccs_within(&vec![true; self.len()])
    }
}
