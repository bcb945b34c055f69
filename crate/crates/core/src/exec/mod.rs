//! The PDG as a dataflow machine.
//!
//! A state pairs a per-node copy of every variable (`av`) with a status for
//! every dependence edge (`ec`). A node may fire when one of its incoming
//! control edges is active, nothing below it in the control dependence
//! graph is still pending, its flow and def-order inputs are checked, and
//! every consumer of its previous value (outgoing carried edges) has run.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::cfg::{Expr, Stmt, Store, StoreError, Value};
use crate::node::{Branch, NodeId};
use crate::pdg::{EdgeKey, Pdg, SubgraphMode, Subgraphs};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeStatus {
    Chk,
    Unchk,
    Act,
}

impl fmt::Display for EdgeStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EdgeStatus::Chk => "chk",
            EdgeStatus::Unchk => "unchk",
            EdgeStatus::Act => "act",
        })
    }
}

/// `av` is row-major over (program node, variable) in the machine's index
/// order; `ec` follows [`Pdg::edges`]. Equality is pointwise.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PdgState {
    pub av: Vec<Value>,
    pub ec: Vec<EdgeStatus>,
}

#[derive(Clone, Debug, PartialEq, Eq, Error, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ExecError {
    #[error("node {node}: {msg}")]
    Eval { node: NodeId, msg: String },
    #[error("node {node}: non-truth condition value {value}")]
    NonTruthCondition { node: NodeId, value: Value },
    #[error("node {node} is not executable (Next = {next})")]
    NotExecutable { node: NodeId, next: String },
    #[error("node {0} is not in the graph")]
    UnknownNode(NodeId),
}

#[derive(Clone, Debug)]
enum Op {
    Entry,
    Assign { rhs: Expr },
    If { cond: Expr },
    Ret { var: usize },
}

#[derive(Clone, Debug, Default)]
struct BranchUpdate {
    unchk: Vec<usize>,
    chk: Vec<usize>,
    act: Vec<usize>,
}

#[derive(Clone, Debug, Default)]
struct NodeInfo {
    in_c: Vec<usize>,
    in_l: Vec<usize>,
    in_f: Vec<usize>,
    in_d: Vec<usize>,
    out_fd: Vec<usize>,
    // C edges entering G*(n) - {n}
    below: Vec<usize>,
    // outgoing L edges to other nodes
    out_l_other: Vec<usize>,
    // F and L successors written by an assignment
    writes: Vec<usize>,
    branch: [BranchUpdate; 2],
}

/// A PDG prepared for execution: dense indices, per-node edge lists and
/// the precomputed subgraphs the step rules need.
#[derive(Clone, Debug)]
pub struct PdgMachine {
    pdg: Pdg,
    nodes: Vec<NodeId>,
    index: HashMap<NodeId, usize>,
    vars: Vec<String>,
    var_index: HashMap<String, usize>,
    edges: Vec<EdgeKey>,
    ops: Vec<Op>,
    // target variable of each assignment
    defs: Vec<Option<usize>>,
    info: Vec<NodeInfo>,
    subgraphs: Subgraphs,
    init_ec: Vec<EdgeStatus>,
}

fn branch_slot(q: Branch) -> usize {
    match q {
        Branch::T => 0,
        Branch::F => 1,
    }
}

impl PdgMachine {
    pub fn new(pdg: &Pdg) -> Self {
        let nodes = pdg.nodes();
        let index: HashMap<NodeId, usize> =
            nodes.iter().enumerate().map(|(i, n)| (*n, i)).collect();
        let vars: Vec<String> = pdg.variables().into_iter().collect();
        let var_index: HashMap<String, usize> = vars
            .iter()
            .enumerate()
            .map(|(i, v)| (v.clone(), i))
            .collect();
        let edges = pdg.edges();
        let subgraphs = Subgraphs::new(pdg);
        let mut ops = vec![Op::Entry];
        let mut defs = vec![None];
        for s in pdg.stmts.values() {
            defs.push(s.defines().map(|x| var_index[x]));
            ops.push(match s {
                Stmt::Assign { rhs, .. } => Op::Assign { rhs: rhs.clone() },
                Stmt::If { cond } => Op::If { cond: cond.clone() },
                Stmt::Ret { var } => Op::Ret {
                    var: var_index[var],
                },
            });
        }
        let mut info = vec![NodeInfo::default(); nodes.len()];
        for (e, key) in edges.iter().enumerate() {
            // edges naming unknown nodes are ignored; validate_pdg reports them
            let (Some(&s), Some(&t)) = (index.get(&key.src()), index.get(&key.dst())) else {
                continue;
            };
            match key {
                EdgeKey::Control { .. } => info[t].in_c.push(e),
                EdgeKey::Flow { .. } => {
                    info[t].in_f.push(e);
                    info[s].out_fd.push(e);
                    info[s].writes.push(t);
                }
                EdgeKey::Carried { .. } => {
                    info[t].in_l.push(e);
                    info[s].writes.push(t);
                }
                EdgeKey::DefOrder { .. } => {
                    info[t].in_d.push(e);
                    info[s].out_fd.push(e);
                }
            }
        }
        for i in &mut info {
            i.writes.sort_unstable();
            i.writes.dedup();
        }
        let in_c: Vec<Vec<usize>> = info.iter().map(|i| i.in_c.clone()).collect();
        let in_l: Vec<Vec<usize>> = info.iter().map(|i| i.in_l.clone()).collect();
        let out_fd: Vec<Vec<usize>> = info.iter().map(|i| i.out_fd.clone()).collect();
        let out_l: Vec<Vec<usize>> = {
            let mut v = vec![Vec::new(); nodes.len()];
            for (e, key) in edges.iter().enumerate() {
                if let (EdgeKey::Carried { .. }, Some(&s)) = (key, index.get(&key.src())) {
                    v[s].push(e);
                }
            }
            v
        };
        // controls(a, b): b lies in G*(a), so a cannot fire while b is pending
        let controls = |a: NodeId, b: NodeId| subgraphs.get(a, SubgraphMode::GStar).contains(&b);
        for (n, id) in nodes.iter().enumerate() {
            let gstar = subgraphs.get(*id, SubgraphMode::GStar);
            info[n].below = gstar
                .iter()
                .filter(|q| *q != id)
                .filter_map(|q| index.get(q))
                .flat_map(|&q| in_c[q].iter().copied())
                .collect();
            if !matches!(ops[n], Op::If { .. }) {
                continue;
            }
            for q in Branch::BOTH {
                let gq = subgraphs.get(*id, SubgraphMode::of(Some(q), false));
                let gqbar = subgraphs.get(*id, SubgraphMode::of(Some(q.negate()), false));
                let front = subgraphs.front(*id, q);
                let other: BTreeSet<NodeId> = gqbar.difference(gq).copied().collect();
                let mut up = BranchUpdate::default();
                for m in gq.iter().filter(|m| *m != id) {
                    let mi = index[m];
                    // a producer under its consumer's control runs after it
                    up.unchk.extend(
                        out_fd[mi]
                            .iter()
                            .filter(|&&e| !controls(edges[e].dst(), *m)),
                    );
                    // the front finishes the current iteration before the
                    // looping seeds start the next one
                    up.unchk.extend(in_l[mi].iter().filter(|&&e| {
                        let r = edges[e].src();
                        gq.contains(&r) && (front.contains(m) || !front.contains(&r))
                    }));
                }
                for m in &other {
                    let mi = index[m];
                    up.chk.extend(&out_fd[mi]);
                    // Only consumers inside this subtree; others may still be running.
                    up.unchk.extend(out_l[mi].iter().filter(|&&e| {
                        let r = edges[e].dst();
                        !other.contains(&r) && gstar.contains(&r)
                    }));
                    up.chk.extend(
                        in_l[mi]
                            .iter()
                            .filter(|&&e| !other.contains(&edges[e].src())),
                    );
                }
                up.act = edges
                    .iter()
                    .enumerate()
                    .filter(|(_, k)| {
                        matches!(k, EdgeKey::Control { src, label, .. } if src == id && *label == q)
                    })
                    .map(|(e, _)| e)
                    .collect();
                info[n].branch[branch_slot(q)] = up;
            }
        }
        for (n, i) in info.iter_mut().enumerate() {
            // a consumer that waits for this node through condC cannot
            // consume first
            i.out_l_other = out_l[n]
                .iter()
                .copied()
                .filter(|&e| {
                    let q = edges[e].dst();
                    index.get(&q) != Some(&n) && !controls(q, nodes[n])
                })
                .collect();
        }
        // entry's own activation: edges between nodes it activates start
        // unchecked, edges leaving the rest start checked
        let top = subgraphs.get(NodeId::Entry, SubgraphMode::GT);
        let init_ec = edges
            .iter()
            .map(|e| match e {
                EdgeKey::Control {
                    src: NodeId::Entry, ..
                } => EdgeStatus::Act,
                EdgeKey::Control { .. } => EdgeStatus::Unchk,
                EdgeKey::Flow { src, dst, .. } | EdgeKey::DefOrder { src, dst } => {
                    if top.contains(src) && !controls(*dst, *src) {
                        EdgeStatus::Unchk
                    } else {
                        EdgeStatus::Chk
                    }
                }
                EdgeKey::Carried { src, dst, .. } => {
                    if top.contains(src) && top.contains(dst) {
                        EdgeStatus::Unchk
                    } else {
                        EdgeStatus::Chk
                    }
                }
            })
            .collect();
        PdgMachine {
            pdg: pdg.clone(),
            nodes,
            index,
            vars,
            var_index,
            edges,
            ops,
            defs,
            info,
            subgraphs,
            init_ec,
        }
    }

    pub fn pdg(&self) -> &Pdg {
        &self.pdg
    }

    pub fn edges(&self) -> &[EdgeKey] {
        &self.edges
    }

    pub fn variables(&self) -> &[String] {
        &self.vars
    }

    pub fn subgraphs(&self) -> &Subgraphs {
        &self.subgraphs
    }

    /// Program nodes in ascending order.
    pub fn program_nodes(&self) -> &[NodeId] {
        &self.nodes[1..]
    }

    pub fn ret_node(&self) -> Option<NodeId> {
        self.pdg.ret_node()
    }

    fn slot(&self, node: usize, var: usize) -> usize {
        (node - 1) * self.vars.len() + var
    }

    /// `av(n, x)`; `None` for entry or unknown names.
    pub fn av(&self, s: &PdgState, n: NodeId, x: &str) -> Option<Value> {
        let ni = *self.index.get(&n)?;
        let xi = *self.var_index.get(x)?;
        (ni > 0).then(|| s.av[self.slot(ni, xi)])
    }

    pub fn status(&self, s: &PdgState, e: &EdgeKey) -> Option<EdgeStatus> {
        self.edges.iter().position(|k| k == e).map(|i| s.ec[i])
    }

    /// Every program node sees `σ0`. Entry's C edges are active and the data
    /// edges start as if entry were an if-node that has just taken its true
    /// branch.
    pub fn init_state(&self, sigma0: &Store) -> Result<PdgState, StoreError> {
        let vars: BTreeSet<String> = self.vars.iter().cloned().collect();
        let store = Store::total(&vars, sigma0.bindings().clone())?;
        let row: Vec<Value> = self.vars.iter().map(|v| store.get(v).unwrap()).collect();
        let av = row
            .iter()
            .copied()
            .cycle()
            .take(row.len() * (self.nodes.len() - 1))
            .collect();
        let ec = self.init_ec.clone();
        Ok(PdgState { av, ec })
    }

    fn executable(&self, s: &PdgState, n: usize) -> bool {
        let i = &self.info[n];
        n > 0
            && i.in_c.iter().any(|&e| s.ec[e] == EdgeStatus::Act)
            && i.below.iter().all(|&e| s.ec[e] != EdgeStatus::Act)
            && i.in_f.iter().all(|&e| s.ec[e] == EdgeStatus::Chk)
            && i.out_l_other.iter().all(|&e| s.ec[e] == EdgeStatus::Chk)
            && i.in_d.iter().all(|&e| s.ec[e] == EdgeStatus::Chk)
    }

    pub(crate) fn next_indices(&self, s: &PdgState) -> Vec<usize> {
        (1..self.nodes.len())
            .filter(|&n| self.executable(s, n))
            .collect()
    }

    pub fn next_nodes(&self, s: &PdgState) -> BTreeSet<NodeId> {
        self.next_indices(s)
            .into_iter()
            .map(|n| self.nodes[n])
            .collect()
    }

    fn eval(&self, s: &PdgState, n: usize, e: &Expr) -> Result<Value, ExecError> {
        let base = self.slot(n, 0);
        e.eval_with(&|x| self.var_index.get(x).map(|&i| s.av[base + i]))
            .map_err(|err| ExecError::Eval {
                node: self.nodes[n],
                msg: err.to_string(),
            })
    }

    fn branch_of(&self, s: &PdgState, n: usize, cond: &Expr) -> Result<Branch, ExecError> {
        match self.eval(s, n, cond)? {
            Value::Bool(b) => Ok(Branch::from_bool(b)),
            value => Err(ExecError::NonTruthCondition {
                node: self.nodes[n],
                value,
            }),
        }
    }

    fn index_of(&self, n: NodeId) -> Result<usize, ExecError> {
        match self.index.get(&n) {
            Some(&i) if i > 0 => Ok(i),
            _ => Err(ExecError::UnknownNode(n)),
        }
    }

    /// Writes the assigned value into every F/L successor's copy of the
    /// target variable; the right-hand side is read from `n`'s own row.
    pub fn apply_udav(&self, n: NodeId, s: &PdgState) -> Result<Vec<Value>, ExecError> {
        let ni = self.index_of(n)?;
        let mut av = s.av.clone();
        self.udav_into(ni, s, &mut av)?;
        Ok(av)
    }

    fn udav_into(&self, n: usize, s: &PdgState, av: &mut [Value]) -> Result<(), ExecError> {
        if let (Op::Assign { rhs }, Some(x)) = (&self.ops[n], self.defs[n]) {
            let v = self.eval(s, n, rhs)?;
            for &p in &self.info[n].writes {
                if p > 0 {
                    av[self.slot(p, x)] = v;
                }
            }
        }
        Ok(())
    }

    /// The edge-status update for executing `n` in `s`.
    pub fn apply_udec(&self, n: NodeId, s: &PdgState) -> Result<Vec<EdgeStatus>, ExecError> {
        let ni = self.index_of(n)?;
        let mut ec = s.ec.clone();
        self.udec_into(ni, s, &mut ec)?;
        Ok(ec)
    }

    fn udec_into(&self, n: usize, s: &PdgState, ec: &mut [EdgeStatus]) -> Result<(), ExecError> {
        let i = &self.info[n];
        for &e in &i.in_c {
            ec[e] = EdgeStatus::Unchk;
        }
        for &e in &i.in_l {
            ec[e] = EdgeStatus::Chk;
        }
        match &self.ops[n] {
            Op::Assign { .. } | Op::Ret { .. } => {
                for &e in &i.out_fd {
                    ec[e] = EdgeStatus::Chk;
                }
            }
            Op::If { cond } => {
                let up = &i.branch[branch_slot(self.branch_of(s, n, cond)?)];
                for &e in &up.unchk {
                    ec[e] = EdgeStatus::Unchk;
                }
                for &e in &up.chk {
                    ec[e] = EdgeStatus::Chk;
                }
                for &e in &up.act {
                    ec[e] = EdgeStatus::Act;
                }
            }
            Op::Entry => {}
        }
        Ok(())
    }

    /// Fires `n`, returning the successor state and, for the ret node, the
    /// value it observed.
    pub(crate) fn step_index(
        &self,
        s: &PdgState,
        n: usize,
    ) -> Result<(PdgState, Option<Value>), ExecError> {
        if !self.executable(s, n) {
            return Err(ExecError::NotExecutable {
                node: self.nodes[n],
                next: crate::node::fmt_set(&self.next_nodes(s)),
            });
        }
        let mut next = s.clone();
        self.udav_into(n, s, &mut next.av)?;
        self.udec_into(n, s, &mut next.ec)?;
        let ret = match self.ops[n] {
            Op::Ret { var } => Some(s.av[self.slot(n, var)]),
            _ => None,
        };
        Ok((next, ret))
    }

    pub fn step(&self, s: &PdgState, n: NodeId) -> Result<PdgState, ExecError> {
        Ok(self.step_index(s, self.index_of(n)?)?.0)
    }

    pub(crate) fn node_index(&self, n: NodeId) -> Option<usize> {
        self.index.get(&n).copied()
    }

    pub(crate) fn node_at(&self, i: usize) -> NodeId {
        self.nodes[i]
    }

    /// Value of the ret variable in the ret node's own row.
    pub fn ret_value(&self, s: &PdgState) -> Option<Value> {
        let r = self.index.get(&self.ret_node()?)?;
        match self.ops[*r] {
            Op::Ret { var } => Some(s.av[self.slot(*r, var)]),
            _ => None,
        }
    }

    /// `σ ≈_n av`: agreement on every variable used at `n`. Returns the
    /// first disagreeing variable.
    pub fn agrees(
        &self,
        sigma: &Store,
        n: NodeId,
        s: &PdgState,
    ) -> Result<(), (String, Option<Value>, Option<Value>)> {
        let Some(stmt) = self.pdg.stmt(n) else {
            return Ok(());
        };
        for x in stmt.uses() {
            let (a, b) = (sigma.get(&x), self.av(s, n, &x));
            if a != b {
                return Err((x, a, b));
            }
        }
        Ok(())
    }
}

pub fn init_state(pdg: &Pdg, sigma0: &Store) -> Result<PdgState, StoreError> {
    PdgMachine::new(pdg).init_state(sigma0)
}

pub fn next_nodes(pdg: &Pdg, s: &PdgState) -> BTreeSet<NodeId> {
    PdgMachine::new(pdg).next_nodes(s)
}

pub fn pdg_step(pdg: &Pdg, s: &PdgState, n: NodeId) -> Result<PdgState, ExecError> {
    PdgMachine::new(pdg).step(s, n)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "seed", rename_all = "kebab-case")]
pub enum Strategy {
    MinId,
    Random(u64),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", content = "detail", rename_all = "kebab-case")]
pub enum PdgVerdict {
    /// Next is empty and the ret node has executed.
    Quiescent,
    /// Next is empty but the ret node never executed.
    Stuck,
    BoundExceeded,
    RuntimeError(ExecError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PdgRun {
    /// `s_0 .. s_k`, one more than `order`.
    pub states: Vec<PdgState>,
    pub order: Vec<NodeId>,
    /// Next set at each executed step.
    pub next_sets: Vec<BTreeSet<NodeId>>,
    pub verdict: PdgVerdict,
    /// Value seen by the ret node when it (first) executed.
    pub returned: Option<Value>,
    pub ret_executions: usize,
}

impl PdgRun {
    pub fn final_state(&self) -> &PdgState {
        self.states.last().expect("a run has an initial state")
    }
}

/// Runs `machine` from `σ0`, choosing among executable nodes by `strategy`.
pub fn run_machine(
    machine: &PdgMachine,
    sigma0: &Store,
    strategy: Strategy,
    bound: usize,
) -> Result<PdgRun, StoreError> {
    let mut rng = match strategy {
        Strategy::Random(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
        Strategy::MinId => None,
    };
    let mut run = PdgRun {
        states: vec![machine.init_state(sigma0)?],
        order: Vec::new(),
        next_sets: Vec::new(),
        verdict: PdgVerdict::BoundExceeded,
        returned: None,
        ret_executions: 0,
    };
    loop {
        let s = run.final_state();
        let next = machine.next_indices(s);
        if next.is_empty() {
            run.verdict = if run.ret_executions > 0 {
                PdgVerdict::Quiescent
            } else {
                PdgVerdict::Stuck
            };
            return Ok(run);
        }
        if run.order.len() >= bound {
            return Ok(run);
        }
        let n = match rng.as_mut() {
            Some(r) => *next.choose(r).unwrap(),
            None => next[0],
        };
        match machine.step_index(s, n) {
            Ok((t, ret)) => {
                if let Some(v) = ret {
                    run.ret_executions += 1;
                    run.returned.get_or_insert(v);
                }
                run.next_sets
                    .push(next.iter().map(|&i| machine.node_at(i)).collect());
                run.order.push(machine.node_at(n));
                run.states.push(t);
            }
            Err(e) => {
                run.verdict = PdgVerdict::RuntimeError(e);
                return Ok(run);
            }
        }
    }
}

pub fn pdg_run(
    pdg: &Pdg,
    sigma0: &Store,
    strategy: Strategy,
    bound: usize,
) -> Result<PdgRun, StoreError> {
    run_machine(&PdgMachine::new(pdg), sigma0, strategy, bound)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GuidedFailure {
    BadStore {
        msg: String,
    },
    NotExecutable {
        index: usize,
        node: NodeId,
        next: BTreeSet<NodeId>,
    },
    Disagree {
        index: usize,
        node: NodeId,
        var: String,
        cfg: Option<Value>,
        pdg: Option<Value>,
    },
    Runtime {
        index: usize,
        error: ExecError,
    },
}

impl fmt::Display for GuidedFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let opt = |v: &Option<Value>| v.map_or("unbound".to_string(), |v| v.to_string());
        match self {
            GuidedFailure::BadStore { msg } => write!(f, "{msg}"),
            GuidedFailure::NotExecutable { index, node, next } => write!(
                f,
                "step {index}: node {node} not executable, Next = {}",
                crate::node::fmt_set(next)
            ),
            GuidedFailure::Disagree {
                index,
                node,
                var,
                cfg,
                pdg,
            } => write!(
                f,
                "step {index}: node {node} sees {var}={} but the CFG store has {var}={}",
                opt(pdg),
                opt(cfg)
            ),
            GuidedFailure::Runtime { index, error } => write!(f, "step {index}: {error}"),
        }
    }
}

/// Steps the PDG in exactly the CFG's order, checking at each step that the
/// node is executable and that the PDG row agrees with the CFG store on the
/// node's used variables.
pub fn guided_run_machine(
    machine: &PdgMachine,
    sigma0: &Store,
    steps: &[(NodeId, Store)],
) -> Result<PdgRun, GuidedFailure> {
    let mut s = machine
        .init_state(sigma0)
        .map_err(|e| GuidedFailure::BadStore { msg: e.to_string() })?;
    let mut run = PdgRun {
        states: vec![s.clone()],
        order: Vec::new(),
        next_sets: Vec::new(),
        verdict: PdgVerdict::Stuck,
        returned: None,
        ret_executions: 0,
    };
    for (index, (node, sigma)) in steps.iter().enumerate() {
        let next = machine.next_nodes(&s);
        let Some(n) = machine.node_index(*node).filter(|_| next.contains(node)) else {
            return Err(GuidedFailure::NotExecutable {
                index,
                node: *node,
                next,
            });
        };
        if let Err((var, cfg, pdg)) = machine.agrees(sigma, *node, &s) {
            return Err(GuidedFailure::Disagree {
                index,
                node: *node,
                var,
                cfg,
                pdg,
            });
        }
        let (t, ret) = machine
            .step_index(&s, n)
            .map_err(|error| GuidedFailure::Runtime { index, error })?;
        if let Some(v) = ret {
            run.ret_executions += 1;
            run.returned.get_or_insert(v);
        }
        run.next_sets.push(next);
        run.order.push(*node);
        run.states.push(t.clone());
        s = t;
    }
    run.verdict = if !machine.next_indices(&s).is_empty() {
        PdgVerdict::BoundExceeded
    } else if run.ret_executions > 0 {
        PdgVerdict::Quiescent
    } else {
        PdgVerdict::Stuck
    };
    Ok(run)
}

pub fn guided_run(
    pdg: &Pdg,
    sigma0: &Store,
    steps: &[(NodeId, Store)],
) -> Result<PdgRun, GuidedFailure> {
    guided_run_machine(&PdgMachine::new(pdg), sigma0, steps)
}
