//! Breadth-first exploration of every interleaving of a PDG run.

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::Serialize;

use crate::cfg::{Store, StoreError, Value};
use crate::exec::{ExecError, PdgMachine, PdgState};
use crate::node::NodeId;
use crate::pdg::Pdg;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ExploreLimits {
    /// Distinct states (including the value observed at ret).
    pub max_states: usize,
    /// Longest run expanded.
    pub max_depth: usize,
}

impl Default for ExploreLimits {
    fn default() -> Self {
        ExploreLimits {
            max_states: 100_000,
            max_depth: 10_000,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExploreVerdict {
    Complete,
    StateLimit,
    DepthLimit,
}

/// A quiescent state and one run reaching it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Terminal {
    pub depth: usize,
    pub returned: Option<Value>,
    /// Nodes fired along the first-discovered run to this state.
    pub path: Vec<NodeId>,
    #[serde(skip)]
    pub state: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FailedStep {
    pub path: Vec<NodeId>,
    pub node: NodeId,
    pub error: ExecError,
}

#[derive(Clone, Debug, Serialize)]
pub struct Exploration {
    pub states: usize,
    pub transitions: usize,
    /// Quiescent states in which ret has run, one entry per (state, depth).
    pub finals: Vec<Terminal>,
    /// Quiescent states in which ret never ran.
    pub stuck: Vec<Terminal>,
    pub errors: Vec<FailedStep>,
    /// Depth of every quiescent (state, depth) pair.
    pub run_lengths: BTreeMap<usize, usize>,
    pub verdict: ExploreVerdict,
    #[serde(skip)]
    visited: Vec<(PdgState, Option<Value>)>,
    #[serde(skip)]
    parent: Vec<Option<(usize, NodeId)>>,
}

impl Exploration {
    pub fn is_complete(&self) -> bool {
        self.verdict == ExploreVerdict::Complete
    }

    /// Distinct quiescent states, stuck ones included.
    pub fn final_states(&self) -> Vec<&PdgState> {
        let mut ids: Vec<usize> = self
            .finals
            .iter()
            .chain(&self.stuck)
            .map(|t| t.state)
            .collect();
        ids.sort_unstable();
        ids.dedup();
        ids.into_iter().map(|i| &self.visited[i].0).collect()
    }

    pub fn returned_values(&self) -> Vec<Value> {
        let mut vs: Vec<Value> = self.finals.iter().filter_map(|t| t.returned).collect();
        vs.sort();
        vs.dedup();
        vs
    }

    /// Every distinct state with the ret value observed so far.
    pub fn visited(&self) -> &[(PdgState, Option<Value>)] {
        &self.visited
    }

    /// First-discovered run from the initial state to visited state `i`.
    pub fn path_to(&self, mut i: usize) -> Vec<NodeId> {
        let mut path = Vec::new();
        while let Some((p, n)) = self.parent[i] {
            path.push(n);
            i = p;
        }
        path.reverse();
        path
    }
}

pub fn explore_all(
    pdg: &Pdg,
    sigma0: &Store,
    limits: ExploreLimits,
) -> Result<Exploration, StoreError> {
    explore_machine(&PdgMachine::new(pdg), sigma0, limits)
}

/// Expands layer by layer. A state reachable by runs of different lengths
/// appears once per length, so the run-length histogram is exact.
pub fn explore_machine(
    machine: &PdgMachine,
    sigma0: &Store,
    limits: ExploreLimits,
) -> Result<Exploration, StoreError> {
    let mut e = Exploration {
        states: 1,
        transitions: 0,
        finals: Vec::new(),
        stuck: Vec::new(),
        errors: Vec::new(),
        run_lengths: BTreeMap::new(),
        verdict: ExploreVerdict::Complete,
        visited: vec![(machine.init_state(sigma0)?, None)],
        parent: vec![None],
    };
    let mut ids: HashMap<(PdgState, Option<Value>), usize> = HashMap::new();
    ids.insert(e.visited[0].clone(), 0);

    let mut layer = vec![0usize];
    let mut depth = 0;
    'outer: while !layer.is_empty() {
        let mut next_layer = Vec::new();
        let mut in_layer = HashSet::new();
        for &id in &layer {
            let nexts = machine.next_indices(&e.visited[id].0);
            if nexts.is_empty() {
                let returned = e.visited[id].1;
                let t = Terminal {
                    depth,
                    returned,
                    path: e.path_to(id),
                    state: id,
                };
                *e.run_lengths.entry(depth).or_default() += 1;
                if returned.is_some() {
                    e.finals.push(t);
                } else {
                    e.stuck.push(t);
                }
                continue;
            }
            if depth == limits.max_depth {
                e.verdict = ExploreVerdict::DepthLimit;
                continue;
            }
            for n in nexts {
                e.transitions += 1;
                let (s, seen) = &e.visited[id];
                let key = match machine.step_index(s, n) {
                    Ok((s2, ret)) => (s2, ret.or(*seen)),
                    Err(error) => {
                        e.errors.push(FailedStep {
                            path: e.path_to(id),
                            node: machine.node_at(n),
                            error,
                        });
                        continue;
                    }
                };
                let next = match ids.get(&key) {
                    Some(&j) => j,
                    None => {
                        if e.visited.len() >= limits.max_states {
                            e.verdict = ExploreVerdict::StateLimit;
                            break 'outer;
                        }
                        let j = e.visited.len();
                        ids.insert(key.clone(), j);
                        e.visited.push(key);
                        e.parent.push(Some((id, machine.node_at(n))));
                        j
                    }
                };
                if in_layer.insert(next) {
                    next_layer.push(next);
                }
            }
        }
        layer = next_layer;
        depth += 1;
    }
    e.states = e.visited.len();
    e.finals
        .sort_by(|a, b| (a.depth, &a.path).cmp(&(b.depth, &b.path)));
    e.stuck
        .sort_by(|a, b| (a.depth, &a.path).cmp(&(b.depth, &b.path)));
    e.errors
        .sort_by(|a, b| (&a.path, a.node).cmp(&(&b.path, b.node)));
    Ok(e)
}
