//! Post-dominance, control dependence, loops, data and def-order
//! dependence over a CFG.

mod data;
mod loops;
mod postdom;
mod reach;

use std::collections::BTreeSet;

use serde::Serialize;

use crate::cfg::{augment_cfg, AugmentedCfg, Cfg};
use crate::node::{Branch, NodeId};

pub use data::{data_dependence, def_order_dependence, VarEdge};
pub use loops::{
    enumerate_loops, enumerate_loops_decomposed, loop_forest, loops_of, Loop, LoopError, LoopSet,
    DEFAULT_LOOP_LIMIT,
};
pub use postdom::{control_dependence, post_dominance, strong_postdom, PostDom};
pub use reach::{reach_sets, ReachSets};

pub(crate) use data::cfg_digraph;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct DependenceSets {
    pub cd: BTreeSet<(NodeId, NodeId, Branch)>,
    pub lidd: BTreeSet<VarEdge>,
    pub lcdd: BTreeSet<VarEdge>,
    pub def_order: BTreeSet<(NodeId, NodeId)>,
}

/// Everything the PDG construction needs from one CFG.
#[derive(Clone, Debug)]
pub struct Analysis {
    pub augmented: AugmentedCfg,
    pub postdom: PostDom,
    /// The CFG's loop nesting forest, which drives the data dependence
    /// classification. The full set of strongly connected regions is
    /// available from [`loops_of`].
    pub loops: LoopSet,
    pub deps: DependenceSets,
}

/// Runs every analysis on a valid CFG.
pub fn analyze(cfg: &Cfg) -> Analysis {
    let augmented = augment_cfg(cfg);
    let postdom = strong_postdom(&augmented);
    let cd = control_dependence(&augmented, &postdom);
    let loops = loop_forest(&cfg_digraph(cfg));
    let (lidd, lcdd) = data_dependence(cfg, &loops);
    let def_order = def_order_dependence(cfg, &lidd, &loops);
    Analysis {
        augmented,
        postdom,
        loops,
        deps: DependenceSets {
            cd,
            lidd,
            lcdd,
            def_order,
        },
    }
}
