//! The deterministic-PDG conditions.
//!
//! 1. Two C predecessors of one node are either ordered by control or can
//!    never be activated by the same branch of a common ancestor.
//! 2. Two definitions of `x` feeding one use, which a common ancestor can
//!    activate together, are ordered by a def-order edge.
//! 3. A data edge leaving the body of a CDG loop lands on a node that the
//!    loop still controls.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::node::{fmt_set, Branch, NodeId};
use crate::pdg::{cdg_loops, McaError, PathCache, Pdg, SubgraphMode, Subgraphs, DEFAULT_MCA_LIMIT};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DpdgVerdict {
    Deterministic,
    NonDeterministic,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Witness {
    /// `n` has C predecessors `p` and `q`, both in `G_Q*(r)` for the mca `r`.
    SharedControl {
        n: NodeId,
        p: NodeId,
        q: NodeId,
        r: NodeId,
        label: Branch,
    },
    /// `f_x(p, u)` and `f_x(q, u)` with no def-order edge between `p` and `q`.
    UnorderedDefs {
        var: String,
        u: NodeId,
        p: NodeId,
        q: NodeId,
        r: NodeId,
        label: Branch,
    },
    /// `p` lies in `G(r)` for `r` in CDG loop `nodes` but `q` is not in `G*(r)`.
    EscapingData {
        p: NodeId,
        q: NodeId,
        r: NodeId,
        loop_nodes: BTreeSet<NodeId>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub condition: u8,
    pub witness: Witness,
    pub explanation: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let w = match &self.witness {
            Witness::SharedControl { n, p, q, r, label } => {
                format!("n={n} p={p} q={q} mca={r} label={label}")
            }
            Witness::UnorderedDefs {
                var,
                u,
                p,
                q,
                r,
                label,
            } => {
                format!("var={var} use={u} p={p} q={q} mca={r} label={label}")
            }
            Witness::EscapingData {
                p,
                q,
                r,
                loop_nodes,
            } => {
                format!("edge=({p},{q}) r={r} loop={}", fmt_set(loop_nodes))
            }
        };
        write!(
            f,
            "VIOLATION cond={} witness={w} ({})",
            self.condition, self.explanation
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DpdgReport {
    pub verdict: DpdgVerdict,
    pub violations: Vec<Violation>,
}

impl DpdgReport {
    pub fn is_deterministic(&self) -> bool {
        self.verdict == DpdgVerdict::Deterministic
    }

    pub fn violates(&self, condition: u8) -> bool {
        self.violations.iter().any(|v| v.condition == condition)
    }
}

/// Some `r ∈ mca(p, q)` and label `Q` with `{p, q} ⊆ G_Q*(r)`, where the
/// paths meeting at `r` both leave it along a `Q` edge. A single branch of
/// `r` can then activate both nodes.
fn joint_activator(
    subgraphs: &Subgraphs,
    paths: &mut PathCache,
    p: NodeId,
    q: NodeId,
) -> Result<Option<(NodeId, Branch)>, McaError> {
    for (r, label) in paths.divergences(p, q)? {
        let g = subgraphs.get(r, SubgraphMode::of(Some(label), true));
        if g.contains(&p) && g.contains(&q) {
            return Ok(Some((r, label)));
        }
    }
    Ok(None)
}

pub fn check_dpdg(pdg: &Pdg) -> Result<DpdgReport, McaError> {
    check_dpdg_with(pdg, DEFAULT_MCA_LIMIT)
}

pub fn check_dpdg_with(pdg: &Pdg, mca_limit: usize) -> Result<DpdgReport, McaError> {
    let subgraphs = Subgraphs::new(pdg);
    let mut paths = PathCache::new(pdg, mca_limit);
    let mut violations = Vec::new();
    let star = |n: NodeId| subgraphs.get(n, SubgraphMode::GStar);

    for n in pdg.nodes() {
        let preds: BTreeSet<NodeId> = pdg.c_predecessors(n).map(|(p, _)| p).collect();
        for &p in &preds {
            for &q in preds.range((std::ops::Bound::Excluded(p), std::ops::Bound::Unbounded)) {
                if star(q).contains(&p) || star(p).contains(&q) {
                    continue;
                }
                if let Some((r, label)) = joint_activator(&subgraphs, &mut paths, p, q)? {
                    violations.push(Violation {
                        condition: 1,
                        witness: Witness::SharedControl { n, p, q, r, label },
                        explanation: format!(
                            "{p} and {q} both control {n} and can be activated together by {r}"
                        ),
                    });
                }
            }
        }
    }

    for &(p, u, ref x) in &pdg.f {
        for &(q, u2, ref x2) in &pdg.f {
            if u2 != u || x2 != x || q <= p {
                continue;
            }
            if pdg.d.contains(&(p, q)) || pdg.d.contains(&(q, p)) {
                continue;
            }
            if let Some((r, label)) = joint_activator(&subgraphs, &mut paths, p, q)? {
                violations.push(Violation {
                    condition: 2,
                    witness: Witness::UnorderedDefs {
                        var: x.clone(),
                        u,
                        p,
                        q,
                        r,
                        label,
                    },
                    explanation: format!(
                        "{p} and {q} both define {x} for {u} without a def-order edge"
                    ),
                });
            }
        }
    }

    let loops = cdg_loops(pdg);
    let data: BTreeSet<(NodeId, NodeId)> = pdg
        .f
        .iter()
        .map(|(p, q, _)| (*p, *q))
        .chain(pdg.d.iter().copied())
        .collect();
    for r in loops.loop_nodes() {
        let plain = subgraphs.get(r, SubgraphMode::G);
        let reach = star(r);
        for &(p, q) in &data {
            if plain.contains(&p) && !reach.contains(&q) {
                let l = loops
                    .loops()
                    .iter()
                    .filter(|l| l.contains(r))
                    .min_by_key(|l| l.nodes.len())
                    .expect("r lies on a loop");
                violations.push(Violation {
                    condition: 3,
                    witness: Witness::EscapingData {
                        p,
                        q,
                        r,
                        loop_nodes: l.nodes.clone(),
                    },
                    explanation: format!("{p} repeats under {r} but {q} does not"),
                });
            }
        }
    }

    let verdict = if violations.is_empty() {
        DpdgVerdict::Deterministic
    } else {
        DpdgVerdict::NonDeterministic
    };
    Ok(DpdgReport {
        verdict,
        violations,
    })
}
