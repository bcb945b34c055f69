//! The three-statement control flow graph: statements, well-formedness,
//! augmentation with `entry`/`exit`, and the sequential interpreter.

mod expr;
mod interp;
mod parse;

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::Serialize;

use crate::node::{Branch, NodeId};

pub use expr::{ArithOp, CmpOp, EvalError, Expr, Value};
pub use interp::{
    cfg_run, cfg_step, eval_expr, CfgTrace, RunError, Step, Store, StoreError, Verdict,
};
pub use parse::{parse_cfg, parse_cfg_unchecked, parse_expr, parse_store, print_cfg, ParseError};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Stmt {
    Assign { target: String, rhs: Expr },
    If { cond: Expr },
    Ret { var: String },
}

impl Stmt {
    pub fn assign(target: &str, rhs: Expr) -> Stmt {
        Stmt::Assign {
            target: target.to_owned(),
            rhs,
        }
    }

    pub fn uses(&self) -> BTreeSet<String> {
        match self {
            Stmt::Assign { rhs, .. } => rhs.vars(),
            Stmt::If { cond } => cond.vars(),
            Stmt::Ret { var } => BTreeSet::from([var.clone()]),
        }
    }

    pub fn defines(&self) -> Option<&str> {
        match self {
            Stmt::Assign { target, .. } => Some(target),
            _ => None,
        }
    }

    pub fn is_if(&self) -> bool {
        matches!(self, Stmt::If { .. })
    }

    pub fn is_ret(&self) -> bool {
        matches!(self, Stmt::Ret { .. })
    }
}

impl fmt::Display for Stmt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Stmt::Assign { target, rhs } => write!(f, "{target} := {rhs}"),
            Stmt::If { cond } => write!(f, "if {cond}"),
            Stmt::Ret { var } => write!(f, "ret {var}"),
        }
    }
}

impl Serialize for Stmt {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// A flow edge. Field order gives the canonical `(src, dst, label)` sort
/// with `None < T < F`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct CfgEdge {
    pub src: NodeId,
    pub dst: NodeId,
    pub label: Option<Branch>,
}

impl CfgEdge {
    pub fn new(src: impl Into<NodeId>, dst: impl Into<NodeId>, label: Option<Branch>) -> Self {
        CfgEdge {
            src: src.into(),
            dst: dst.into(),
            label,
        }
    }
}

/// A control flow graph. Construction does not validate; use
/// [`validate_cfg`] or build through [`parse_cfg`].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Cfg {
    nodes: BTreeMap<NodeId, Stmt>,
    edges: BTreeSet<CfgEdge>,
}

impl Cfg {
    pub fn new(nodes: BTreeMap<NodeId, Stmt>, edges: BTreeSet<CfgEdge>) -> Self {
        Cfg { nodes, edges }
    }

    pub fn nodes(&self) -> &BTreeMap<NodeId, Stmt> {
        &self.nodes
    }

    pub fn edges(&self) -> &BTreeSet<CfgEdge> {
        &self.edges
    }

    pub fn stmt(&self, n: NodeId) -> Option<&Stmt> {
        self.nodes.get(&n)
    }

    pub fn insert_node(&mut self, id: NodeId, stmt: Stmt) -> Option<Stmt> {
        self.nodes.insert(id, stmt)
    }

    pub fn insert_edge(&mut self, edge: CfgEdge) -> bool {
        self.edges.insert(edge)
    }

    pub fn remove_edge(&mut self, edge: &CfgEdge) -> bool {
        self.edges.remove(edge)
    }

    pub fn out_edges(&self, n: NodeId) -> impl Iterator<Item = &CfgEdge> + '_ {
        let lo = CfgEdge {
            src: n,
            dst: NodeId::Entry,
            label: None,
        };
        self.edges.range(lo..).take_while(move |e| e.src == n)
    }

    pub fn successors(&self, n: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.out_edges(n).map(|e| e.dst)
    }

    pub fn successor(&self, n: NodeId, label: Option<Branch>) -> Option<NodeId> {
        self.out_edges(n).find(|e| e.label == label).map(|e| e.dst)
    }

    pub fn predecessors(&self, n: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.edges.iter().filter(move |e| e.dst == n).map(|e| e.src)
    }

    /// Nodes without predecessors; a well-formed CFG has exactly one.
    pub fn start_candidates(&self) -> Vec<NodeId> {
        let targets: BTreeSet<NodeId> = self.edges.iter().map(|e| e.dst).collect();
        self.nodes
            .keys()
            .copied()
            .filter(|n| !targets.contains(n))
            .collect()
    }

    pub fn start(&self) -> Option<NodeId> {
        match self.start_candidates().as_slice() {
            [s] => Some(*s),
            _ => None,
        }
    }

    pub fn ret_node(&self) -> Option<NodeId> {
        let mut rets = self
            .nodes
            .iter()
            .filter(|(_, s)| s.is_ret())
            .map(|(n, _)| *n);
        match (rets.next(), rets.next()) {
            (Some(r), None) => Some(r),
            _ => None,
        }
    }

    /// Every identifier used or defined anywhere in the program.
    pub fn variables(&self) -> BTreeSet<String> {
        let mut vars = BTreeSet::new();
        for s in self.nodes.values() {
            vars.extend(s.uses());
            if let Some(d) = s.defines() {
                vars.insert(d.to_owned());
            }
        }
        vars
    }

    /// Nodes reachable from `from` (inclusive).
    pub fn reachable_from(&self, from: NodeId) -> BTreeSet<NodeId> {
        let mut seen = BTreeSet::from([from]);
        let mut queue = VecDeque::from([from]);
        while let Some(n) = queue.pop_front() {
            for s in self.successors(n) {
                if seen.insert(s) {
                    queue.push_back(s);
                }
            }
        }
        seen
    }
}

/// One well-formedness violation found by [`validate_cfg`].
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Violation {
    EmptyProgram,
    UnknownNode { edge: CfgEdge, node: NodeId },
    MissingStart,
    AmbiguousStart { candidates: Vec<NodeId> },
    AssignSuccessors { node: NodeId, count: usize },
    AssignLabeledEdge { node: NodeId },
    IfMissingBranch { node: NodeId, branch: Branch },
    IfExtraEdge { edge: CfgEdge },
    RetHasSuccessor { node: NodeId },
    RetCount { count: usize },
    Unreachable { node: NodeId },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let edge = |e: &CfgEdge| match e.label {
            Some(l) => format!("{} -{}-> {}", e.src, l, e.dst),
            None => format!("{} -> {}", e.src, e.dst),
        };
        match self {
            Violation::EmptyProgram => f.write_str("program has no nodes"),
            Violation::UnknownNode { edge: e, node } => {
                write!(f, "edge {} references unknown node {node}", edge(e))
            }
            Violation::MissingStart => f.write_str("missing start: every node has a predecessor"),
            Violation::AmbiguousStart { candidates } => write!(
                f,
                "ambiguous start: {} have no predecessor",
                crate::node::fmt_set(candidates)
            ),
            Violation::AssignSuccessors { node, count } => {
                write!(f, "assign-node {node} has {count} successors (expected 1)")
            }
            Violation::AssignLabeledEdge { node } => {
                write!(f, "assign-node {node} has a labeled outgoing edge")
            }
            Violation::IfMissingBranch { node, branch } => {
                write!(f, "if-node {node} lacks {branch} successor")
            }
            Violation::IfExtraEdge { edge: e } => {
                write!(f, "if-node {} has surplus edge {}", e.src, edge(e))
            }
            Violation::RetHasSuccessor { node } => write!(f, "ret-node {node} has a successor"),
            Violation::RetCount { count } => {
                write!(f, "program has {count} ret nodes (expected exactly 1)")
            }
            Violation::Unreachable { node } => write!(f, "node {node} is unreachable from start"),
        }
    }
}

/// Checks every structural invariant of a CFG. Returns one entry per
/// violation, sorted; an empty report means the CFG is well formed.
pub fn validate_cfg(cfg: &Cfg) -> Vec<Violation> {
    let mut out = Vec::new();
    if cfg.nodes.is_empty() {
        out.push(Violation::EmptyProgram);
        return out;
    }
    for e in &cfg.edges {
        for n in [e.src, e.dst] {
            if !cfg.nodes.contains_key(&n) {
                out.push(Violation::UnknownNode { edge: *e, node: n });
            }
        }
    }
    let candidates = cfg.start_candidates();
    match candidates.len() {
        0 => out.push(Violation::MissingStart),
        1 => {}
        _ => out.push(Violation::AmbiguousStart {
            candidates: candidates.clone(),
        }),
    }
    let mut rets = 0;
    for (&n, stmt) in &cfg.nodes {
        let outs: Vec<&CfgEdge> = cfg.out_edges(n).collect();
        match stmt {
            Stmt::Assign { .. } => {
                if outs.len() != 1 {
                    out.push(Violation::AssignSuccessors {
                        node: n,
                        count: outs.len(),
                    });
                }
                if outs.iter().any(|e| e.label.is_some()) {
                    out.push(Violation::AssignLabeledEdge { node: n });
                }
            }
            Stmt::If { .. } => {
                let mut seen = BTreeSet::new();
                for e in &outs {
                    match e.label {
                        Some(b) if seen.insert(b) => {}
                        _ => out.push(Violation::IfExtraEdge { edge: **e }),
                    }
                }
                for b in Branch::BOTH {
                    if !seen.contains(&b) {
                        out.push(Violation::IfMissingBranch { node: n, branch: b });
                    }
                }
            }
            Stmt::Ret { .. } => {
                rets += 1;
                if !outs.is_empty() {
                    out.push(Violation::RetHasSuccessor { node: n });
                }
            }
        }
    }
    if rets != 1 {
        out.push(Violation::RetCount { count: rets });
    }
    // reachability is only meaningful with a unique start
    if let [start] = candidates.as_slice() {
        let reach = cfg.reachable_from(*start);
        for &n in cfg.nodes.keys() {
            if !reach.contains(&n) {
                out.push(Violation::Unreachable { node: n });
            }
        }
    }
    out.sort();
    out
}

/// A CFG extended with `entry` (T edge to start, F edge to exit) and `exit`
/// (successor of the ret node).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AugmentedCfg {
    pub cfg: Cfg,
    pub start: NodeId,
    pub ret: NodeId,
    edges: BTreeSet<CfgEdge>,
}

impl AugmentedCfg {
    /// All nodes, `entry` first and `exit` last.
    pub fn nodes(&self) -> Vec<NodeId> {
        let mut v = vec![NodeId::Entry];
        v.extend(self.cfg.nodes.keys().copied());
        v.push(NodeId::Exit);
        v
    }

    pub fn edges(&self) -> &BTreeSet<CfgEdge> {
        &self.edges
    }

    pub fn is_if(&self, n: NodeId) -> bool {
        n == NodeId::Entry || self.cfg.stmt(n).is_some_and(Stmt::is_if)
    }
}

/// Adds `entry` and `exit`. Panics only if `cfg` has no unique start or
/// ret node, which [`validate_cfg`] rules out.
pub fn augment_cfg(cfg: &Cfg) -> AugmentedCfg {
    let start = cfg
        .start()
        .expect("augment_cfg requires a unique start node");
    let ret = cfg
        .ret_node()
        .expect("augment_cfg requires a unique ret node");
    let mut edges = cfg.edges.clone();
    edges.insert(CfgEdge::new(NodeId::Entry, start, Some(Branch::T)));
    edges.insert(CfgEdge::new(NodeId::Entry, NodeId::Exit, Some(Branch::F)));
    edges.insert(CfgEdge::new(ret, NodeId::Exit, None));
    AugmentedCfg {
        cfg: cfg.clone(),
        start,
        ret,
        edges,
    }
}
