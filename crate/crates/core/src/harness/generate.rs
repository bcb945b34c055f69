//! Random well-formed CFGs: structured regions plus a few random jumps.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cfg::{validate_cfg, ArithOp, Cfg, CfgEdge, CmpOp, Expr, Stmt, Store, Value};
use crate::node::{Branch, NodeId};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GenParams {
    pub max_nodes: usize,
    /// Relative weight of loops among the structured regions; 0 gives
    /// acyclic programs.
    pub loop_bias: f64,
    pub max_vars: usize,
    /// Upper bound on random edge retargetings.
    pub jumps: usize,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            max_nodes: 12,
            loop_bias: 0.35,
            max_vars: 3,
            jumps: 2,
        }
    }
}

/// The grammar has no negative literals; `-k` is written `0 - k`.
fn lit(v: i64) -> Expr {
    if v < 0 {
        Expr::arith(ArithOp::Sub, Expr::Int(0), Expr::Int(-v))
    } else {
        Expr::Int(v)
    }
}

struct Builder {
    rng: ChaCha8Rng,
    params: GenParams,
    stmts: Vec<Stmt>,
    edges: Vec<(usize, usize, Option<Branch>)>,
    vars: Vec<String>,
    counters: usize,
}

type Exits = Vec<(usize, Option<Branch>)>;

impl Builder {
    fn push(&mut self, s: Stmt) -> usize {
        self.stmts.push(s);
        self.stmts.len() - 1
    }

    fn var(&mut self) -> String {
        self.vars.choose(&mut self.rng).unwrap().clone()
    }

    fn atom(&mut self) -> Expr {
        if self.rng.gen_bool(0.6) {
            Expr::var(&self.var())
        } else {
            lit(self.rng.gen_range(-2..=3))
        }
    }

    fn rhs(&mut self) -> Expr {
        match self.rng.gen_range(0..6) {
            0 => self.atom(),
            1 => Expr::arith(ArithOp::Sub, self.atom(), self.atom()),
            2 => Expr::arith(ArithOp::Mul, self.atom(), lit(self.rng.gen_range(-1..=2))),
            _ => Expr::arith(ArithOp::Add, self.atom(), self.atom()),
        }
    }

    fn cond(&mut self) -> Expr {
        let op = *[
            CmpOp::Lt,
            CmpOp::Le,
            CmpOp::Gt,
            CmpOp::Ge,
            CmpOp::Eq,
            CmpOp::Ne,
        ]
        .choose(&mut self.rng)
        .unwrap();
        let v = Expr::var(&self.var());
        let r = self.atom();
        Expr::cmp(op, v, r)
    }

    fn connect(&mut self, exits: Exits, to: usize) {
        for (n, l) in exits {
            self.edges.push((n, to, l));
        }
    }

    fn assign(&mut self) -> (usize, Exits) {
        let target = self.var();
        let rhs = self.rhs();
        let n = self.push(Stmt::assign(&target, rhs));
        (n, vec![(n, None)])
    }

    /// A region using at most `budget` nodes (at least one).
    fn block(&mut self, budget: usize) -> (usize, Exits) {
        if budget < 3 {
            return self.assign();
        }
        let loops = if budget >= 4 {
            self.params.loop_bias * 6.0
        } else {
            0.0
        };
        let weights = [2.0, 3.0, 2.0, 1.0, loops, loops];
        let total: f64 = weights.iter().sum();
        let mut pick = self.rng.gen_range(0.0..total);
        let mut kind = 0;
        for (i, w) in weights.iter().enumerate() {
            if pick < *w {
                kind = i;
                break;
            }
            pick -= w;
        }
        match kind {
            0 => self.assign(),
            1 => {
                let first = self.rng.gen_range(1..budget);
                let (a, ea) = self.block(first);
                let (b, eb) = self.block(budget - first);
                self.connect(ea, b);
                (a, eb)
            }
            2 => {
                let c = self.cond();
                let n = self.push(Stmt::If { cond: c });
                let rest = budget - 1;
                let left = self.rng.gen_range(1..rest);
                let (t, mut et) = self.block(left);
                let (f, ef) = self.block(rest - left);
                self.edges.push((n, t, Some(Branch::T)));
                self.edges.push((n, f, Some(Branch::F)));
                et.extend(ef);
                (n, et)
            }
            3 => {
                let c = self.cond();
                let n = self.push(Stmt::If { cond: c });
                let (t, mut et) = self.block(budget - 1);
                self.edges.push((n, t, Some(Branch::T)));
                et.push((n, Some(Branch::F)));
                (n, et)
            }
            k => {
                // counter-driven loop: k := c; while/do-while over k > 0
                let counter = format!("k{}", self.counters);
                self.counters += 1;
                let start = self.rng.gen_range(1..=3);
                let init = self.push(Stmt::assign(&counter, Expr::Int(start)));
                let test = Stmt::If {
                    cond: Expr::cmp(CmpOp::Gt, Expr::var(&counter), Expr::Int(0)),
                };
                let dec = Stmt::assign(
                    &counter,
                    Expr::arith(ArithOp::Sub, Expr::var(&counter), Expr::Int(1)),
                );
                if k == 4 {
                    let h = self.push(test);
                    self.edges.push((init, h, None));
                    let (b, eb) = self.block(budget - 3);
                    let d = self.push(dec);
                    self.edges.push((h, b, Some(Branch::T)));
                    self.connect(eb, d);
                    self.edges.push((d, h, None));
                    (init, vec![(h, Some(Branch::F))])
                } else {
                    let (b, eb) = self.block(budget - 3);
                    self.edges.push((init, b, None));
                    let d = self.push(dec);
                    self.connect(eb, d);
                    let h = self.push(test);
                    self.edges.push((d, h, None));
                    self.edges.push((h, b, Some(Branch::T)));
                    (init, vec![(h, Some(Branch::F))])
                }
            }
        }
    }

    fn cfg(&self) -> Cfg {
        let nodes: BTreeMap<NodeId, Stmt> = self
            .stmts
            .iter()
            .enumerate()
            .map(|(i, s)| (NodeId::Stmt(i as u32), s.clone()))
            .collect();
        let edges: BTreeSet<CfgEdge> = self
            .edges
            .iter()
            .map(|&(a, b, l)| CfgEdge::new(a as u32, b as u32, l))
            .collect();
        Cfg::new(nodes, edges)
    }
}

/// Whether the ret node is reachable from every node.
fn can_finish(cfg: &Cfg) -> bool {
    let Some(ret) = cfg.ret_node() else {
        return false;
    };
    cfg.nodes()
        .keys()
        .all(|&n| cfg.reachable_from(n).contains(&ret))
}

/// A valid CFG, deterministic in `seed`. Every node can reach the ret
/// node. Node ids are consecutive from 0, which is the start node.
pub fn random_cfg(seed: u64, params: &GenParams) -> Cfg {
    let mut b = Builder {
        rng: ChaCha8Rng::seed_from_u64(seed),
        params: *params,
        stmts: Vec::new(),
        edges: Vec::new(),
        vars: (0..params.max_vars.max(1))
            .map(|i| {
                ["x", "y", "z", "u", "v", "w"]
                    .get(i)
                    .map_or(format!("v{i}"), |s| s.to_string())
            })
            .collect(),
        counters: 0,
    };
    let budget = params.max_nodes.max(2) - 1;
    let (_, exits) = b.block(budget);
    let rv = b.var();
    let ret = b.push(Stmt::Ret { var: rv });
    b.connect(exits, ret);
    let mut cfg = b.cfg();
    debug_assert!(validate_cfg(&cfg).is_empty());

    let jumps = b.rng.gen_range(0..=params.jumps);
    let n = b.stmts.len() as u32;
    for _ in 0..jumps {
        for _attempt in 0..8 {
            let edges: Vec<CfgEdge> = cfg.edges().iter().copied().collect();
            let old = *edges.choose(&mut b.rng).unwrap();
            let NodeId::Stmt(src) = old.src else { continue };
            let lo = if params.loop_bias > 0.0 { 1 } else { src + 1 };
            if lo >= n {
                continue;
            }
            let dst = b.rng.gen_range(lo..n);
            let new = CfgEdge::new(src, dst, old.label);
            if new == old {
                continue;
            }
            let mut next = cfg.clone();
            next.remove_edge(&old);
            next.insert_edge(new);
            if validate_cfg(&next).is_empty() && can_finish(&next) {
                cfg = next;
                break;
            }
        }
    }
    cfg
}

/// A total store with integers drawn from `[-4, 4]`.
pub fn random_store(cfg: &Cfg, rng: &mut impl Rng) -> Store {
    let bindings = cfg
        .variables()
        .into_iter()
        .map(|v| (v, Value::Int(rng.gen_range(-4..=4))))
        .collect();
    Store::for_cfg(cfg, bindings).expect("store covers every variable")
}
