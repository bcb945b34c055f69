//! Differential fuzzing of the analyses and both interpreters over random
//! programs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::explore::{ExploreLimits, ExploreVerdict};
use super::generate::{random_cfg, random_store, GenParams};
use super::oracles::{
    audit_machine, check_confluence, equivalence_on, ConfluenceReport, ConfluenceVerdict,
    EquivalenceReport,
};
use crate::cfg::{Cfg, Store};
use crate::dependence::{analyze, reach_sets, Analysis};
use crate::determinism::check_dpdg;
use crate::exec::PdgMachine;
use crate::node::NodeId;
use crate::pdg::{c_hat, pdg_from_analysis, Pdg};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FuzzParams {
    pub generator: GenParams,
    pub cfg_bound: usize,
    pub limits: ExploreLimits,
}

impl Default for FuzzParams {
    fn default() -> Self {
        FuzzParams {
            generator: GenParams::default(),
            cfg_bound: 10_000,
            limits: ExploreLimits::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProgramResult {
    pub index: usize,
    /// Seed passed to the generator.
    pub seed: u64,
    pub nodes: usize,
    pub init: Store,
    /// Violated determinism conditions 2 and 3 (must stay empty).
    pub cfg_conditions: Vec<String>,
    /// Condition-1 violations, which CFG-derived PDGs may have.
    pub shared_control: usize,
    pub deterministic: bool,
    /// LIDD or DefOrd edges whose source is reachable from the target
    /// without back edges.
    pub static_failures: Vec<String>,
    /// Whether `(N, Ĉ)` has a cycle.
    pub hat_cyclic: bool,
    pub terminated: bool,
    pub equivalence: Option<EquivalenceReport>,
    pub exploration: Option<ExploreVerdict>,
    pub states: usize,
    pub confluence: Option<ConfluenceReport>,
    pub audit_failures: Option<usize>,
}

impl ProgramResult {
    pub fn guided_failed(&self) -> bool {
        self.equivalence.as_ref().is_some_and(|e| e.guided.failed())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct FuzzTotals {
    pub programs: usize,
    pub cfg_condition_violations: usize,
    pub shared_control_programs: usize,
    pub deterministic: usize,
    pub static_failures: usize,
    pub hat_cyclic: usize,
    pub terminated: usize,
    pub guided_pass: usize,
    pub guided_fail: usize,
    pub runs_pass: usize,
    pub runs_fail: usize,
    pub stuck_runs: usize,
    pub explorations_complete: usize,
    pub explorations_limited: usize,
    pub confluence_pass: usize,
    pub confluence_fail: usize,
    pub confluence_alarms: usize,
    pub audits: usize,
    pub audit_failures: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FuzzReport {
    pub seed: u64,
    pub count: usize,
    pub params: FuzzParams,
    pub programs: Vec<ProgramResult>,
    pub totals: FuzzTotals,
}

impl FuzzReport {
    /// Nothing contradicts the analysis or the interpreters.
    pub fn clean(&self) -> bool {
        let t = &self.totals;
        t.cfg_condition_violations == 0
            && t.static_failures == 0
            && t.guided_fail == 0
            && t.runs_fail == 0
            && t.confluence_alarms == 0
            && t.audit_failures == 0
    }
}

/// `(p, q)` LIDD or DefOrd pairs where `p` is reachable from `q` with the
/// back edges removed.
pub fn static_failures(cfg: &Cfg, a: &Analysis) -> Vec<String> {
    let mut out = Vec::new();
    let mut check = |kind: &str, p: NodeId, q: NodeId| {
        if !reach_sets(cfg, &a.loops, q).ur_prime.contains(&p) {
            out.push(format!(
                "{kind} ({p},{q}) but {p} is reachable from {q} without back edges"
            ));
        }
    };
    for (p, q, _) in &a.deps.lidd {
        check("lidd", *p, *q);
    }
    for (p, q) in &a.deps.def_order {
        check("def-order", *p, *q);
    }
    out.sort();
    out.dedup();
    out
}

fn hat_cyclic(pdg: &Pdg) -> bool {
    let g = crate::graph::Digraph::new(pdg.nodes(), c_hat(pdg).into_iter().map(|(a, b, _)| (a, b)));
    g.sccs()
        .iter()
        .any(|c| c.len() > 1 || g.has_edge(c[0], c[0]))
}

pub fn fuzz_program(index: usize, seed: u64, params: &FuzzParams) -> ProgramResult {
    let cfg = random_cfg(seed, &params.generator);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let init = random_store(&cfg, &mut rng);
    let a = analyze(&cfg);
    let pdg = pdg_from_analysis(&cfg, &a);
    let mut r = ProgramResult {
        index,
        seed,
        nodes: cfg.nodes().len(),
        init: init.clone(),
        cfg_conditions: Vec::new(),
        shared_control: 0,
        deterministic: false,
        static_failures: static_failures(&cfg, &a),
        hat_cyclic: hat_cyclic(&pdg),
        terminated: false,
        equivalence: None,
        exploration: None,
        states: 0,
        confluence: None,
        audit_failures: None,
    };
    let dpdg = match check_dpdg(&pdg) {
        Ok(d) => d,
        Err(e) => {
            r.cfg_conditions.push(e.to_string());
            return r;
        }
    };
    r.deterministic = dpdg.is_deterministic();
    r.shared_control = dpdg.violations.iter().filter(|v| v.condition == 1).count();
    r.cfg_conditions = dpdg
        .violations
        .iter()
        .filter(|v| v.condition != 1)
        .map(|v| v.to_string())
        .collect();

    let machine = PdgMachine::new(&pdg);
    let (eq, e) = equivalence_on(&cfg, &machine, &init, params.cfg_bound, params.limits);
    r.terminated = !eq.skipped();
    r.equivalence = Some(eq);
    if let Some(e) = e {
        r.exploration = Some(e.verdict);
        r.states = e.states;
        if r.deterministic && e.is_complete() {
            r.confluence = Some(check_confluence(&e, &dpdg));
            r.audit_failures = Some(audit_machine(&machine, &e, &dpdg).failures.len());
        }
    }
    r
}

/// Program `i` uses the `i`-th seed drawn from `seed`, so a report can be
/// regenerated one program at a time.
pub fn program_seeds(seed: u64, count: usize) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| rng.gen()).collect()
}

pub fn fuzz_campaign(seed: u64, count: usize, params: &FuzzParams) -> FuzzReport {
    let programs: Vec<ProgramResult> = program_seeds(seed, count)
        .into_iter()
        .enumerate()
        .map(|(i, s)| fuzz_program(i, s, params))
        .collect();
    let mut t = FuzzTotals {
        programs: programs.len(),
        ..FuzzTotals::default()
    };
    for p in &programs {
        t.cfg_condition_violations += p.cfg_conditions.len();
        t.shared_control_programs += usize::from(p.shared_control > 0);
        t.deterministic += usize::from(p.deterministic);
        t.static_failures += p.static_failures.len();
        t.hat_cyclic += usize::from(p.hat_cyclic);
        t.terminated += usize::from(p.terminated);
        if let Some(eq) = p.equivalence.as_ref().filter(|e| !e.skipped()) {
            t.guided_pass += usize::from(eq.guided.passed());
            t.guided_fail += usize::from(eq.guided.failed());
            t.runs_pass += usize::from(eq.runs.passed());
            t.runs_fail += usize::from(eq.runs.failed());
            t.stuck_runs += eq.stuck;
        }
        match p.exploration {
            Some(ExploreVerdict::Complete) => t.explorations_complete += 1,
            Some(_) => t.explorations_limited += 1,
            None => {}
        }
        if let Some(c) = &p.confluence {
            t.confluence_pass += usize::from(c.verdict == ConfluenceVerdict::Pass);
            t.confluence_fail += usize::from(c.verdict == ConfluenceVerdict::Fail);
            t.confluence_alarms += usize::from(c.alarm);
        }
        if let Some(n) = p.audit_failures {
            t.audits += 1;
            t.audit_failures += n;
        }
    }
    FuzzReport {
        seed,
        count,
        params: *params,
        programs,
        totals: t,
    }
}
