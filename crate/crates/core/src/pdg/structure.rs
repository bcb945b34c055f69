//! Looping edges, the six subgraph flavours, minimal common ancestors,
//! iteration statements and structural validation.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use super::{EdgeKey, Pdg};
use crate::cfg::{Cfg, Stmt};
use crate::dependence::{loops_of, LoopSet};
use crate::graph::Digraph;
use crate::node::{Branch, NodeId};

pub const DEFAULT_MCA_LIMIT: usize = 100_000;

/// Loops of the control dependence graph `(N, C)`.
pub fn cdg_loops(pdg: &Pdg) -> LoopSet {
    loops_of(&pdg.cdg())
}

/// For every back edge `(p, q)` of a CDG loop carrying label `Q`, all
/// `Q`-labeled C edges from `p` whose target has another C predecessor.
pub fn looping_edges(pdg: &Pdg, cdg_loops: &LoopSet) -> BTreeSet<EdgeKey> {
    let mut out = BTreeSet::new();
    for &(p, q) in cdg_loops.back_edges() {
        for label in Branch::BOTH {
            if !pdg.c.contains(&(p, q, label)) {
                continue;
            }
            for (r, l) in pdg.c_successors(p) {
                if l == label && pdg.c_predecessors(r).any(|(src, _)| src != p) {
                    out.insert(EdgeKey::control(p, r, label));
                }
            }
        }
    }
    out
}

/// C without its looping edges.
pub fn c_hat(pdg: &Pdg) -> BTreeSet<(NodeId, NodeId, Branch)> {
    let looping = looping_edges(pdg, &cdg_loops(pdg));
    pdg.c
        .iter()
        .copied()
        .filter(|&(src, dst, label)| !looping.contains(&EdgeKey::Control { src, dst, label }))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum SubgraphMode {
    G,
    GT,
    GF,
    GStar,
    GTStar,
    GFStar,
}

impl SubgraphMode {
    pub const ALL: [SubgraphMode; 6] = [
        SubgraphMode::G,
        SubgraphMode::GT,
        SubgraphMode::GF,
        SubgraphMode::GStar,
        SubgraphMode::GTStar,
        SubgraphMode::GFStar,
    ];

    pub fn label(self) -> Option<Branch> {
        match self {
            SubgraphMode::GT | SubgraphMode::GTStar => Some(Branch::T),
            SubgraphMode::GF | SubgraphMode::GFStar => Some(Branch::F),
            SubgraphMode::G | SubgraphMode::GStar => None,
        }
    }

    pub fn is_starred(self) -> bool {
        matches!(
            self,
            SubgraphMode::GStar | SubgraphMode::GTStar | SubgraphMode::GFStar
        )
    }

    pub fn of(label: Option<Branch>, starred: bool) -> SubgraphMode {
        match (label, starred) {
            (None, false) => SubgraphMode::G,
            (Some(Branch::T), false) => SubgraphMode::GT,
            (Some(Branch::F), false) => SubgraphMode::GF,
            (None, true) => SubgraphMode::GStar,
            (Some(Branch::T), true) => SubgraphMode::GTStar,
            (Some(Branch::F), true) => SubgraphMode::GFStar,
        }
    }
}

impl fmt::Display for SubgraphMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SubgraphMode::G => "G",
            SubgraphMode::GT => "GT",
            SubgraphMode::GF => "GF",
            SubgraphMode::GStar => "GS",
            SubgraphMode::GTStar => "GTS",
            SubgraphMode::GFStar => "GFS",
        })
    }
}

impl FromStr for SubgraphMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SubgraphMode::ALL
            .into_iter()
            .find(|m| m.to_string() == s)
            .ok_or_else(|| {
                format!("unknown subgraph mode `{s}` (expected G, GT, GF, GS, GTS or GFS)")
            })
    }
}

/// Subgraph of `p` in the given mode.
///
/// The seeds are the targets of `p`'s C edges (filtered by label). Starred
/// modes close the seeds under C. The plain modes close under Ĉ, but only
/// from seeds entered through an edge of Ĉ: a seed entered through a
/// looping edge belongs to the subgraph without contributing its own
/// Ĉ-descendants.
pub fn subgraph(pdg: &Pdg, p: NodeId, mode: SubgraphMode) -> BTreeSet<NodeId> {
    let hat = c_hat(pdg);
    subgraph_in(pdg, &hat, p, mode)
}

pub(crate) fn subgraph_in(
    pdg: &Pdg,
    hat: &BTreeSet<(NodeId, NodeId, Branch)>,
    p: NodeId,
    mode: SubgraphMode,
) -> BTreeSet<NodeId> {
    let mut out = BTreeSet::new();
    let mut work = Vec::new();
    for (q, l) in pdg.c_successors(p) {
        if mode.label().is_some_and(|want| want != l) {
            continue;
        }
        out.insert(q);
        if mode.is_starred() || hat.contains(&(p, q, l)) {
            work.push(q);
        }
    }
    let edges = if mode.is_starred() { &pdg.c } else { hat };
    let mut expanded = BTreeSet::new();
    while let Some(u) = work.pop() {
        if !expanded.insert(u) {
            continue;
        }
        out.insert(u);
        for &(_, v, _) in edges
            .range((u, NodeId::Entry, Branch::T)..)
            .take_while(|e| e.0 == u)
        {
            if !expanded.contains(&v) {
                work.push(v);
            }
        }
    }
    out
}

fn hat_closure(
    hat: &BTreeSet<(NodeId, NodeId, Branch)>,
    seeds: impl IntoIterator<Item = NodeId>,
) -> BTreeSet<NodeId> {
    let mut out = BTreeSet::new();
    let mut work: Vec<NodeId> = seeds.into_iter().collect();
    while let Some(u) = work.pop() {
        if !out.insert(u) {
            continue;
        }
        for &(_, v, _) in hat
            .range((u, NodeId::Entry, Branch::T)..)
            .take_while(|e| e.0 == u)
        {
            if !out.contains(&v) {
                work.push(v);
            }
        }
    }
    out
}

/// Every subgraph of every node, computed once.
#[derive(Clone, Debug)]
pub struct Subgraphs {
    sets: BTreeMap<(NodeId, SubgraphMode), BTreeSet<NodeId>>,
    fronts: BTreeMap<(NodeId, Branch), BTreeSet<NodeId>>,
}

impl Subgraphs {
    pub fn new(pdg: &Pdg) -> Self {
        let hat = c_hat(pdg);
        let mut sets = BTreeMap::new();
        let mut fronts = BTreeMap::new();
        for n in pdg.nodes() {
            for m in SubgraphMode::ALL {
                sets.insert((n, m), subgraph_in(pdg, &hat, n, m));
            }
            for q in Branch::BOTH {
                let seeds = pdg
                    .c_successors(n)
                    .filter(|&(m, l)| l == q && hat.contains(&(n, m, l)))
                    .map(|(m, _)| m);
                fronts.insert((n, q), hat_closure(&hat, seeds));
            }
        }
        Subgraphs { sets, fronts }
    }

    /// The part of the `q` subgraph of `p` reached from seeds entered
    /// through non-looping edges: the rest of the current iteration, which
    /// runs before the seeds entered through looping edges.
    pub fn front(&self, p: NodeId, q: Branch) -> &BTreeSet<NodeId> {
        static EMPTY: BTreeSet<NodeId> = BTreeSet::new();
        self.fronts.get(&(p, q)).unwrap_or(&EMPTY)
    }

    pub fn get(&self, p: NodeId, mode: SubgraphMode) -> &BTreeSet<NodeId> {
        static EMPTY: BTreeSet<NodeId> = BTreeSet::new();
        self.sets.get(&(p, mode)).unwrap_or(&EMPTY)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum McaError {
    #[error("more than {limit} acyclic control paths from entry to {node}")]
    PathLimit { node: NodeId, limit: usize },
    #[error("{pairs} path pairs for mca({p}, {q}) exceed the limit of {limit}")]
    PairLimit {
        p: NodeId,
        q: NodeId,
        pairs: usize,
        limit: usize,
    },
}

/// Acyclic CDG paths from `entry`, cached per target.
#[derive(Clone, Debug)]
pub struct PathCache {
    cdg: Digraph,
    labels: HashMap<(usize, usize), Vec<Branch>>,
    limit: usize,
    paths: HashMap<usize, Vec<Vec<usize>>>,
}

impl PathCache {
    pub fn new(pdg: &Pdg, limit: usize) -> Self {
        let cdg = pdg.cdg();
        let mut labels: HashMap<(usize, usize), Vec<Branch>> = HashMap::new();
        for &(a, b, q) in &pdg.c {
            if let (Some(a), Some(b)) = (cdg.index_of(a), cdg.index_of(b)) {
                labels.entry((a, b)).or_default().push(q);
            }
        }
        PathCache {
            cdg,
            labels,
            limit,
            paths: HashMap::new(),
        }
    }

    fn paths_to(&mut self, target: usize) -> Result<&Vec<Vec<usize>>, McaError> {
        if !self.paths.contains_key(&target) {
            let found = simple_paths(&self.cdg, target, self.limit).ok_or(McaError::PathLimit {
                node: self.cdg.id(target),
                limit: self.limit,
            })?;
            self.paths.insert(target, found);
        }
        Ok(&self.paths[&target])
    }

    fn path_pairs(&mut self, p: NodeId, q: NodeId) -> Result<Option<(usize, usize)>, McaError> {
        let (Some(pi), Some(qi)) = (self.cdg.index_of(p), self.cdg.index_of(q)) else {
            return Ok(None);
        };
        let np = self.paths_to(pi)?.len();
        let nq = self.paths_to(qi)?.len();
        let pairs = np.saturating_mul(nq);
        if pairs > self.limit {
            return Err(McaError::PairLimit {
                p,
                q,
                pairs,
                limit: self.limit,
            });
        }
        Ok(Some((pi, qi)))
    }

    /// Last nodes of the longest common prefixes over all pairs of acyclic
    /// paths `entry -> p` and `entry -> q`.
    pub fn mca(&mut self, p: NodeId, q: NodeId) -> Result<BTreeSet<NodeId>, McaError> {
        let Some((pi, qi)) = self.path_pairs(p, q)? else {
            return Ok(BTreeSet::new());
        };
        let mut out = BTreeSet::new();
        for a in &self.paths[&pi] {
            for b in &self.paths[&qi] {
                let common = a.iter().zip(b).take_while(|(x, y)| x == y).count();
                if common > 0 {
                    out.insert(self.cdg.id(a[common - 1]));
                }
            }
        }
        Ok(out)
    }

    /// Pairs `(r, Q)` where some path to `p` and some path to `q` share a
    /// prefix ending at `r` and then both leave `r` along a `Q` edge. A
    /// pair where one path is a prefix of the other has no such `r`.
    pub fn divergences(
        &mut self,
        p: NodeId,
        q: NodeId,
    ) -> Result<BTreeSet<(NodeId, Branch)>, McaError> {
        let Some((pi, qi)) = self.path_pairs(p, q)? else {
            return Ok(BTreeSet::new());
        };
        let mut out = BTreeSet::new();
        for a in &self.paths[&pi] {
            for b in &self.paths[&qi] {
                let common = a.iter().zip(b).take_while(|(x, y)| x == y).count();
                if common == 0 || common == a.len() || common == b.len() {
                    continue;
                }
                let r = a[common - 1];
                let la = &self.labels[&(r, a[common])];
                let lb = &self.labels[&(r, b[common])];
                for q in la.iter().filter(|q| lb.contains(q)) {
                    out.insert((self.cdg.id(r), *q));
                }
            }
        }
        Ok(out)
    }
}

fn simple_paths(g: &Digraph, target: usize, limit: usize) -> Option<Vec<Vec<usize>>> {
    let Some(root) = g.index_of(NodeId::Entry) else {
        return Some(Vec::new());
    };
    // only walk nodes that can still reach the target
    let mut useful = vec![false; g.len()];
    useful[target] = true;
    let mut stack = vec![target];
    while let Some(v) = stack.pop() {
        for &u in g.pred(v) {
            if !useful[u] {
                useful[u] = true;
                stack.push(u);
            }
        }
    }
    let mut out = Vec::new();
    if !useful[root] {
        return Some(out);
    }
    let mut on_path = vec![false; g.len()];
    let mut path = vec![root];
    let mut cursor = vec![0usize];
    on_path[root] = true;
    if root == target {
        return Some(vec![path]);
    }
    while let Some(&u) = path.last() {
        let i = cursor.last_mut().unwrap();
        match g.succ(u).get(*i) {
            Some(&v) => {
                *i += 1;
                if on_path[v] || !useful[v] {
                    continue;
                }
                if v == target {
                    let mut found = path.clone();
                    found.push(v);
                    out.push(found);
                    if out.len() > limit {
                        return None;
                    }
                    continue;
                }
                on_path[v] = true;
                path.push(v);
                cursor.push(0);
            }
            None => {
                on_path[u] = false;
                path.pop();
                cursor.pop();
            }
        }
    }
    Some(out)
}

pub fn mca_with(
    pdg: &Pdg,
    p: NodeId,
    q: NodeId,
    limit: usize,
) -> Result<BTreeSet<NodeId>, McaError> {
    PathCache::new(pdg, limit).mca(p, q)
}

pub fn mca(pdg: &Pdg, p: NodeId, q: NodeId) -> Result<BTreeSet<NodeId>, McaError> {
    mca_with(pdg, p, q, DEFAULT_MCA_LIMIT)
}

/// If-nodes of each loop with one successor inside the loop and one
/// outside, in the order of `loops.loops()`. A loop with no way out yields
/// an empty set.
pub fn iteration_statements(cfg: &Cfg, loops: &LoopSet) -> Vec<BTreeSet<NodeId>> {
    loops
        .loops()
        .iter()
        .map(|l| {
            l.nodes
                .iter()
                .copied()
                .filter(|&n| cfg.stmt(n).is_some_and(Stmt::is_if))
                .filter(|&n| {
                    let inside = cfg.successors(n).filter(|s| l.contains(*s)).count();
                    inside == 1 && cfg.successors(n).count() == 2
                })
                .collect()
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PdgViolation {
    UnknownNode { edge: EdgeKey },
    EdgeIntoEntry { edge: EdgeKey },
    ControlFromNonIf { edge: EdgeKey },
    DataFromIf { edge: EdgeKey },
    RetHasOutgoing { edge: EdgeKey },
    DefUseMismatch { edge: EdgeKey },
    DefOrderMismatch { edge: EdgeKey },
    NoControlPredecessor { node: NodeId },
}

impl fmt::Display for PdgViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PdgViolation::UnknownNode { edge } => {
                write!(f, "{edge} names a node outside the graph")
            }
            PdgViolation::EdgeIntoEntry { edge } => write!(f, "{edge} enters entry"),
            PdgViolation::ControlFromNonIf { edge } => {
                write!(
                    f,
                    "control edge {edge} leaves a node that is neither entry nor an if"
                )
            }
            PdgViolation::DataFromIf { edge } => write!(f, "{edge} leaves an if-node or entry"),
            PdgViolation::RetHasOutgoing { edge } => write!(f, "{edge} leaves the ret node"),
            PdgViolation::DefUseMismatch { edge } => {
                write!(
                    f,
                    "{edge}: source does not define or target does not use the variable"
                )
            }
            PdgViolation::DefOrderMismatch { edge } => {
                write!(
                    f,
                    "{edge}: endpoints share no variable with a common flow target"
                )
            }
            PdgViolation::NoControlPredecessor { node } => {
                write!(f, "node {node} has no incoming control edge")
            }
        }
    }
}

pub fn validate_pdg(pdg: &Pdg) -> Vec<PdgViolation> {
    let mut out = Vec::new();
    let known = |n: NodeId| n == NodeId::Entry || pdg.stmts.contains_key(&n);
    for edge in pdg.edges() {
        let (src, dst) = (edge.src(), edge.dst());
        if !known(src) || !known(dst) {
            out.push(PdgViolation::UnknownNode { edge });
            continue;
        }
        if dst == NodeId::Entry {
            out.push(PdgViolation::EdgeIntoEntry { edge: edge.clone() });
        }
        let stmt = pdg.stmt(src);
        if stmt.is_some_and(Stmt::is_ret) {
            out.push(PdgViolation::RetHasOutgoing { edge });
            continue;
        }
        match &edge {
            EdgeKey::Control { .. } => {
                if !(src == NodeId::Entry || stmt.is_some_and(Stmt::is_if)) {
                    out.push(PdgViolation::ControlFromNonIf { edge });
                }
            }
            _ if src == NodeId::Entry || stmt.is_some_and(Stmt::is_if) => {
                out.push(PdgViolation::DataFromIf { edge });
            }
            EdgeKey::Flow { var, .. } | EdgeKey::Carried { var, .. } => {
                let defines = stmt.and_then(Stmt::defines) == Some(var.as_str());
                let uses = pdg.stmt(dst).is_some_and(|s| s.uses().contains(var));
                if !(defines && uses) {
                    out.push(PdgViolation::DefUseMismatch { edge });
                }
            }
            EdgeKey::DefOrder { .. } => {
                let w = stmt.and_then(Stmt::defines);
                let shared = w.is_some()
                    && pdg.stmt(dst).and_then(Stmt::defines) == w
                    && pdg.f.iter().any(|(a, u, x)| {
                        *a == src && Some(x.as_str()) == w && pdg.f.contains(&(dst, *u, x.clone()))
                    });
                if !shared {
                    out.push(PdgViolation::DefOrderMismatch { edge });
                }
            }
        }
    }
    for &n in pdg.stmts.keys() {
        if pdg.c_predecessors(n).next().is_none() {
            out.push(PdgViolation::NoControlPredecessor { node: n });
        }
    }
    out.sort();
    out
}
