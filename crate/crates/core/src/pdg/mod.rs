//! The program dependence graph `(N, C, F, L, D)` and its construction.

mod dot;
mod structure;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use crate::cfg::{Cfg, Stmt};
use crate::dependence::{analyze, Analysis, VarEdge};
use crate::graph::Digraph;
use crate::node::{Branch, NodeId};

pub use dot::{cfg_to_dot, pdg_to_dot};
pub use structure::{
    c_hat, cdg_loops, iteration_statements, looping_edges, mca, mca_with, subgraph, validate_pdg,
    McaError, PathCache, PdgViolation, SubgraphMode, Subgraphs, DEFAULT_MCA_LIMIT,
};

/// Identity of one edge of the direct sum `C ⊕ F ⊕ L ⊕ D`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EdgeKey {
    Control {
        src: NodeId,
        dst: NodeId,
        label: Branch,
    },
    Flow {
        src: NodeId,
        dst: NodeId,
        var: String,
    },
    Carried {
        src: NodeId,
        dst: NodeId,
        var: String,
    },
    DefOrder {
        src: NodeId,
        dst: NodeId,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum EdgeKind {
    C,
    F,
    L,
    D,
}

impl EdgeKey {
    pub fn src(&self) -> NodeId {
        match self {
            EdgeKey::Control { src, .. }
            | EdgeKey::Flow { src, .. }
            | EdgeKey::Carried { src, .. }
            | EdgeKey::DefOrder { src, .. } => *src,
        }
    }

    pub fn dst(&self) -> NodeId {
        match self {
            EdgeKey::Control { dst, .. }
            | EdgeKey::Flow { dst, .. }
            | EdgeKey::Carried { dst, .. }
            | EdgeKey::DefOrder { dst, .. } => *dst,
        }
    }

    pub fn kind(&self) -> EdgeKind {
        match self {
            EdgeKey::Control { .. } => EdgeKind::C,
            EdgeKey::Flow { .. } => EdgeKind::F,
            EdgeKey::Carried { .. } => EdgeKind::L,
            EdgeKey::DefOrder { .. } => EdgeKind::D,
        }
    }

    pub fn control(src: impl Into<NodeId>, dst: impl Into<NodeId>, label: Branch) -> EdgeKey {
        EdgeKey::Control {
            src: src.into(),
            dst: dst.into(),
            label,
        }
    }
}

/// `ct(p,q)`, `cf(p,q)`, `f_x(p,q)`, `l_x(p,q)`, `d(p,q)`.
impl fmt::Display for EdgeKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EdgeKey::Control { src, dst, label } => {
                let l = if *label == Branch::T { "ct" } else { "cf" };
                write!(f, "{l}({src},{dst})")
            }
            EdgeKey::Flow { src, dst, var } => write!(f, "f_{var}({src},{dst})"),
            EdgeKey::Carried { src, dst, var } => write!(f, "l_{var}({src},{dst})"),
            EdgeKey::DefOrder { src, dst } => write!(f, "d({src},{dst})"),
        }
    }
}

impl Serialize for EdgeKey {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Pdg {
    /// Program statements; `entry` is implicit and always present.
    pub stmts: BTreeMap<NodeId, Stmt>,
    pub c: BTreeSet<(NodeId, NodeId, Branch)>,
    pub f: BTreeSet<VarEdge>,
    pub l: BTreeSet<VarEdge>,
    pub d: BTreeSet<(NodeId, NodeId)>,
}

impl Pdg {
    /// All nodes, `entry` first.
    pub fn nodes(&self) -> Vec<NodeId> {
        std::iter::once(NodeId::Entry)
            .chain(self.stmts.keys().copied())
            .collect()
    }

    pub fn stmt(&self, n: NodeId) -> Option<&Stmt> {
        self.stmts.get(&n)
    }

    pub fn ret_node(&self) -> Option<NodeId> {
        self.stmts.iter().find(|(_, s)| s.is_ret()).map(|(n, _)| *n)
    }

    pub fn variables(&self) -> BTreeSet<String> {
        let mut vars = BTreeSet::new();
        for s in self.stmts.values() {
            vars.extend(s.uses());
            if let Some(d) = s.defines() {
                vars.insert(d.to_owned());
            }
        }
        vars
    }

    /// Every edge in canonical order: C, then F, L, D, each sorted.
    pub fn edges(&self) -> Vec<EdgeKey> {
        let c = self
            .c
            .iter()
            .map(|&(src, dst, label)| EdgeKey::Control { src, dst, label });
        let f = self.f.iter().map(|(src, dst, var)| EdgeKey::Flow {
            src: *src,
            dst: *dst,
            var: var.clone(),
        });
        let l = self.l.iter().map(|(src, dst, var)| EdgeKey::Carried {
            src: *src,
            dst: *dst,
            var: var.clone(),
        });
        let d = self
            .d
            .iter()
            .map(|&(src, dst)| EdgeKey::DefOrder { src, dst });
        c.chain(f).chain(l).chain(d).collect()
    }

    pub fn c_successors(&self, p: NodeId) -> impl Iterator<Item = (NodeId, Branch)> + '_ {
        self.c
            .range((p, NodeId::Entry, Branch::T)..)
            .take_while(move |e| e.0 == p)
            .map(|e| (e.1, e.2))
    }

    pub fn c_predecessors(&self, q: NodeId) -> impl Iterator<Item = (NodeId, Branch)> + '_ {
        self.c.iter().filter(move |e| e.1 == q).map(|e| (e.0, e.2))
    }

    /// The control dependence subgraph `(N, C)` with labels dropped.
    pub fn cdg(&self) -> Digraph {
        Digraph::new(self.nodes(), self.c.iter().map(|e| (e.0, e.1)))
    }
}

/// Builds the PDG of a valid CFG.
pub fn build_pdg(cfg: &Cfg) -> Pdg {
    pdg_from_analysis(cfg, &analyze(cfg))
}

pub fn pdg_from_analysis(cfg: &Cfg, a: &Analysis) -> Pdg {
    Pdg {
        stmts: cfg.nodes().clone(),
        c: a.deps.cd.clone(),
        f: a.deps.lidd.clone(),
        l: a.deps.lcdd.clone(),
        d: a.deps.def_order.clone(),
    }
}
