//! Sequential interpreter: a run is the unique sequence of stores obtained by
//! stepping from the start node.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use super::{Cfg, EvalError, Expr, Stmt, Value};
use crate::node::{Branch, NodeId};

/// A total binding of the program's variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct Store(BTreeMap<String, Value>);

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum StoreError {
    #[error("initial store lacks a binding for {}", .0.iter().cloned().collect::<Vec<_>>().join(", "))]
    Missing(BTreeSet<String>),
    #[error("initial store binds unknown variable(s) {}", .0.iter().cloned().collect::<Vec<_>>().join(", "))]
    Unknown(BTreeSet<String>),
}

impl Store {
    /// Builds a store that is total over exactly `vars`.
    pub fn total(
        vars: &BTreeSet<String>,
        bindings: BTreeMap<String, Value>,
    ) -> Result<Store, StoreError> {
        let missing: BTreeSet<String> = vars
            .iter()
            .filter(|v| !bindings.contains_key(*v))
            .cloned()
            .collect();
        if !missing.is_empty() {
            return Err(StoreError::Missing(missing));
        }
        let unknown: BTreeSet<String> = bindings
            .keys()
            .filter(|k| !vars.contains(*k))
            .cloned()
            .collect();
        if !unknown.is_empty() {
            return Err(StoreError::Unknown(unknown));
        }
        Ok(Store(bindings))
    }

    /// Total store over the program's variables.
    pub fn for_cfg(cfg: &Cfg, bindings: BTreeMap<String, Value>) -> Result<Store, StoreError> {
        Store::total(&cfg.variables(), bindings)
    }

    /// Every program variable bound to `v`.
    pub fn uniform(cfg: &Cfg, v: Value) -> Store {
        Store(cfg.variables().into_iter().map(|x| (x, v)).collect())
    }

    pub fn get(&self, var: &str) -> Option<Value> {
        self.0.get(var).copied()
    }

    pub fn bindings(&self) -> &BTreeMap<String, Value> {
        &self.0
    }

    fn set(&mut self, var: &str, v: Value) {
        if let Some(slot) = self.0.get_mut(var) {
            *slot = v;
        } else {
            self.0.insert(var.to_owned(), v);
        }
    }
}

impl fmt::Display for Store {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self.0.iter().map(|(k, v)| format!("{k}={v}")).collect();
        write!(f, "{{{}}}", items.join(", "))
    }
}

pub fn eval_expr(e: &Expr, env: &Store) -> Result<Value, EvalError> {
    e.eval_with(&|v| env.get(v))
}

#[derive(Clone, Debug, PartialEq, Eq, Error, Serialize)]
#[serde(tag = "kind", content = "detail", rename_all = "kebab-case")]
pub enum RunError {
    #[error("node {node}: {msg}")]
    Eval { node: NodeId, msg: String },
    #[error("node {node}: non-truth condition value {value}")]
    NonTruthCondition { node: NodeId, value: Value },
    #[error("node {0} is not in the program")]
    UnknownNode(NodeId),
    #[error("node {node} has no {} successor", .label.map_or("unlabeled".to_string(), |b| b.to_string()))]
    MissingSuccessor { node: NodeId, label: Option<Branch> },
}

/// Where control goes after one statement.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Step {
    Goto(NodeId),
    Return(Value),
}

/// Executes node `n` on `store`: assignments update exactly one binding, the
/// other two statements leave the store untouched.
pub fn cfg_step(cfg: &Cfg, n: NodeId, store: &Store) -> Result<(Step, Store), RunError> {
    let stmt = cfg.stmt(n).ok_or(RunError::UnknownNode(n))?;
    let eval_err = |e: EvalError| RunError::Eval {
        node: n,
        msg: e.to_string(),
    };
    let next = |label: Option<Branch>| {
        cfg.successor(n, label)
            .ok_or(RunError::MissingSuccessor { node: n, label })
    };
    match stmt {
        Stmt::Assign { target, rhs } => {
            let v = eval_expr(rhs, store).map_err(eval_err)?;
            let mut out = store.clone();
            out.set(target, v);
            Ok((Step::Goto(next(None)?), out))
        }
        Stmt::If { cond } => match eval_expr(cond, store).map_err(eval_err)? {
            Value::Bool(b) => Ok((Step::Goto(next(Some(Branch::from_bool(b)))?), store.clone())),
            value => Err(RunError::NonTruthCondition { node: n, value }),
        },
        Stmt::Ret { var } => {
            let v = store
                .get(var)
                .ok_or_else(|| eval_err(EvalError::Unbound(var.clone())))?;
            Ok((Step::Return(v), store.clone()))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", content = "detail", rename_all = "kebab-case")]
pub enum Verdict {
    Terminated,
    BoundExceeded,
    RuntimeError(RunError),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CfgTrace {
    /// `(n_i, σ_i)`: each executed node with the store it ran against.
    pub steps: Vec<(NodeId, Store)>,
    pub final_store: Store,
    pub verdict: Verdict,
    /// Value of the ret variable when the run terminates.
    pub returned: Option<Value>,
}

impl CfgTrace {
    pub fn order(&self) -> Vec<NodeId> {
        self.steps.iter().map(|(n, _)| *n).collect()
    }

    pub fn terminated(&self) -> bool {
        self.verdict == Verdict::Terminated
    }
}

/// Runs from the start node for at most `bound` steps.
pub fn cfg_run(cfg: &Cfg, init: &Store, bound: usize) -> CfgTrace {
    let mut steps = Vec::new();
    let mut store = init.clone();
    let Some(mut node) = cfg.start() else {
        return CfgTrace {
            steps,
            final_store: store,
            verdict: Verdict::RuntimeError(RunError::UnknownNode(NodeId::Entry)),
            returned: None,
        };
    };
    loop {
        if steps.len() >= bound {
            return CfgTrace {
                steps,
                final_store: store,
                verdict: Verdict::BoundExceeded,
                returned: None,
            };
        }
        steps.push((node, store.clone()));
        match cfg_step(cfg, node, &store) {
            Ok((Step::Goto(next), s)) => {
                node = next;
                store = s;
            }
            Ok((Step::Return(v), s)) => {
                return CfgTrace {
                    steps,
                    final_store: s,
                    verdict: Verdict::Terminated,
                    returned: Some(v),
                }
            }
            Err(e) => {
                return CfgTrace {
                    steps,
                    final_store: store,
                    verdict: Verdict::RuntimeError(e),
                    returned: None,
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cfg::{parse_cfg, parse_store};

    fn store(cfg: &Cfg, text: &str) -> Store {
        Store::for_cfg(cfg, parse_store(text).unwrap()).unwrap()
    }

    #[test]
    fn assign_then_ret() {
        let cfg = parse_cfg("node 1: x := 1\nnode 2: ret x\nedge 1 -> 2").unwrap();
        let s0 = store(&cfg, "x=0");
        let t = cfg_run(&cfg, &s0, 100);
        assert_eq!(t.verdict, Verdict::Terminated);
        assert_eq!(
            t.steps,
            vec![(1.into(), s0.clone()), (2.into(), store(&cfg, "x=1"))]
        );
        assert_eq!(t.final_store, store(&cfg, "x=1"));
        assert_eq!(t.returned, Some(Value::Int(1)));
    }

    #[test]
    fn step_rules() {
        let cfg = parse_cfg(
            "node 1: x := x + 1\nnode 2: if x < 2\nnode 3: if y\nnode 4: ret x\n\
             edge 1 -> 2\nedge 2 -T-> 3\nedge 2 -F-> 4\nedge 3 -T-> 4\nedge 3 -F-> 4",
        )
        .unwrap();
        let s = store(&cfg, "x=1,y=7");
        let (next, s1) = cfg_step(&cfg, 1.into(), &s).unwrap();
        assert_eq!(next, Step::Goto(2.into()));
        assert_eq!(s1, store(&cfg, "x=2,y=7"));

        let s5 = store(&cfg, "x=5,y=7");
        let (next, s2) = cfg_step(&cfg, 2.into(), &s5).unwrap();
        assert_eq!(next, Step::Goto(4.into()));
        assert_eq!(s2, s5);

        let err = cfg_step(&cfg, 3.into(), &s5).unwrap_err();
        assert_eq!(
            err,
            RunError::NonTruthCondition {
                node: 3.into(),
                value: Value::Int(7)
            }
        );
        assert!(err.to_string().contains("non-truth condition"));
    }

    #[test]
    fn bound_exceeded() {
        let cfg = parse_cfg(
            "node 0: x := x\nnode 1: if T\nnode 2: ret x\nedge 0 -> 1\nedge 1 -T-> 1\nedge 1 -F-> 2",
        )
        .unwrap();
        let t = cfg_run(&cfg, &store(&cfg, "x=0"), 10);
        assert_eq!(t.verdict, Verdict::BoundExceeded);
        assert_eq!(t.steps.len(), 10);
    }

    #[test]
    fn runtime_error_is_recorded() {
        let cfg = parse_cfg("node 1: x := x + y\nnode 2: ret x\nedge 1 -> 2").unwrap();
        let t = cfg_run(&cfg, &store(&cfg, "x=1,y=T"), 10);
        assert!(matches!(
            t.verdict,
            Verdict::RuntimeError(RunError::Eval { .. })
        ));
    }

    #[test]
    fn store_must_be_total() {
        let cfg = parse_cfg("node 1: x := y\nnode 2: ret x\nedge 1 -> 2").unwrap();
        let err = Store::for_cfg(&cfg, parse_store("x=1").unwrap()).unwrap_err();
        assert_eq!(err, StoreError::Missing(BTreeSet::from(["y".to_string()])));
        let err = Store::for_cfg(&cfg, parse_store("x=1,y=2,z=3").unwrap()).unwrap_err();
        assert!(matches!(err, StoreError::Unknown(_)));
    }
}
