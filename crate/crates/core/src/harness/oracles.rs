//! Confluence, CFG/PDG equivalence and per-state audits over an
//! exploration.

use std::collections::BTreeSet;

use serde::Serialize;

use super::explore::{explore_machine, Exploration, ExploreLimits};
use crate::cfg::{cfg_run, Cfg, Store, Value, Verdict};
use crate::determinism::DpdgReport;
use crate::exec::{
    guided_run_machine, run_machine, PdgMachine, PdgRun, PdgState, PdgVerdict, Strategy,
};
use crate::node::{fmt_path, NodeId};
use crate::pdg::{build_pdg, Pdg, SubgraphMode};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConfluenceVerdict {
    Pass,
    Fail,
    /// The exploration hit a limit.
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConfluenceReport {
    pub verdict: ConfluenceVerdict,
    /// Set when a deterministic PDG fails: that is an implementation bug.
    pub alarm: bool,
    pub final_states: usize,
    pub run_lengths: Vec<usize>,
}

impl ConfluenceReport {
    pub fn passed(&self) -> bool {
        self.verdict == ConfluenceVerdict::Pass
    }
}

pub fn check_confluence(e: &Exploration, dpdg: &DpdgReport) -> ConfluenceReport {
    let final_states = e.final_states().len();
    let run_lengths: Vec<usize> = e.run_lengths.keys().copied().collect();
    let verdict = if !e.is_complete() {
        ConfluenceVerdict::Inconclusive
    } else if final_states <= 1 && run_lengths.len() <= 1 {
        ConfluenceVerdict::Pass
    } else {
        ConfluenceVerdict::Fail
    };
    ConfluenceReport {
        verdict,
        alarm: verdict == ConfluenceVerdict::Fail && dpdg.is_deterministic(),
        final_states,
        run_lengths,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", content = "detail", rename_all = "kebab-case")]
pub enum Leg {
    Pass,
    Fail(String),
    Skipped(String),
}

impl Leg {
    pub fn passed(&self) -> bool {
        *self == Leg::Pass
    }

    pub fn failed(&self) -> bool {
        matches!(self, Leg::Fail(_))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CompareMethod {
    Exploration,
    Sampled,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EquivalenceReport {
    pub cfg_returned: Option<Value>,
    pub cfg_steps: usize,
    /// Replaying the CFG order on the PDG.
    pub guided: Leg,
    /// Every explored or sampled PDG run returns the CFG's value.
    pub runs: Leg,
    pub method: Option<CompareMethod>,
    /// Quiescent PDG runs whose return value was compared.
    pub compared: usize,
    pub mismatches: usize,
    pub stuck: usize,
}

impl EquivalenceReport {
    pub fn skipped(&self) -> bool {
        matches!(self.guided, Leg::Skipped(_))
    }

    pub fn passed(&self) -> bool {
        self.guided.passed() && self.runs.passed()
    }

    pub fn failed(&self) -> bool {
        self.guided.failed() || self.runs.failed()
    }
}

/// Random schedules tried when exploration does not fit its limits.
pub const SAMPLED_RUNS: u64 = 32;

pub fn check_equivalence(cfg: &Cfg, sigma0: &Store, bound: usize) -> EquivalenceReport {
    check_equivalence_with(cfg, sigma0, bound, ExploreLimits::default()).0
}

/// Also returns the exploration when one completed or hit a limit.
pub fn check_equivalence_with(
    cfg: &Cfg,
    sigma0: &Store,
    bound: usize,
    limits: ExploreLimits,
) -> (EquivalenceReport, Option<Exploration>) {
    let pdg = build_pdg(cfg);
    equivalence_on(cfg, &PdgMachine::new(&pdg), sigma0, bound, limits)
}

pub(crate) fn equivalence_on(
    cfg: &Cfg,
    machine: &PdgMachine,
    sigma0: &Store,
    bound: usize,
    limits: ExploreLimits,
) -> (EquivalenceReport, Option<Exploration>) {
    let trace = cfg_run(cfg, sigma0, bound);
    let mut report = EquivalenceReport {
        cfg_returned: trace.returned,
        cfg_steps: trace.steps.len(),
        guided: Leg::Pass,
        runs: Leg::Pass,
        method: None,
        compared: 0,
        mismatches: 0,
        stuck: 0,
    };
    if !trace.terminated() {
        let why = match &trace.verdict {
            Verdict::BoundExceeded => "CFG bound exceeded".to_string(),
            Verdict::RuntimeError(e) => format!("CFG error: {e}"),
            Verdict::Terminated => unreachable!(),
        };
        report.guided = Leg::Skipped(why.clone());
        report.runs = Leg::Skipped(why);
        return (report, None);
    }
    let expected = trace.returned;

    report.guided = match guided_run_machine(machine, sigma0, &trace.steps) {
        Ok(run) if run.returned == expected => Leg::Pass,
        Ok(run) => Leg::Fail(format!(
            "guided run returned {} but the CFG returned {}",
            show(run.returned),
            show(expected)
        )),
        Err(f) => Leg::Fail(f.to_string()),
    };

    let e = match explore_machine(machine, sigma0, limits) {
        Ok(e) => e,
        Err(err) => {
            report.runs = Leg::Fail(err.to_string());
            return (report, None);
        }
    };
    let mut problems = Vec::new();
    if e.is_complete() {
        report.method = Some(CompareMethod::Exploration);
        report.compared = e.finals.len();
        report.stuck = e.stuck.len();
        for t in &e.finals {
            if t.returned != expected {
                report.mismatches += 1;
                problems.push(format!(
                    "run [{}] returned {}",
                    fmt_path(&t.path),
                    show(t.returned)
                ));
            }
        }
        for t in &e.stuck {
            problems.push(format!("run [{}] is stuck", fmt_path(&t.path)));
        }
        for f in &e.errors {
            problems.push(format!(
                "run [{}] then {}: {}",
                fmt_path(&f.path),
                f.node,
                f.error
            ));
        }
    } else {
        report.method = Some(CompareMethod::Sampled);
        for seed in 0..SAMPLED_RUNS {
            let run = match run_machine(machine, sigma0, Strategy::Random(seed), bound) {
                Ok(run) => run,
                Err(err) => {
                    problems.push(err.to_string());
                    break;
                }
            };
            match run.verdict {
                PdgVerdict::Quiescent => {
                    report.compared += 1;
                    if run.returned != expected {
                        report.mismatches += 1;
                        problems.push(format!("seed {seed} returned {}", show(run.returned)));
                    }
                }
                PdgVerdict::Stuck => {
                    report.stuck += 1;
                    problems.push(format!("seed {seed} is stuck"));
                }
                PdgVerdict::BoundExceeded => {
                    problems.push(format!("seed {seed} exceeded the bound"))
                }
                PdgVerdict::RuntimeError(err) => problems.push(format!("seed {seed}: {err}")),
            }
        }
    }
    if !problems.is_empty() {
        let n = problems.len();
        problems.truncate(3);
        let more = if n > 3 {
            format!(" (+{} more)", n - 3)
        } else {
            String::new()
        };
        report.runs = Leg::Fail(format!("{}{more}", problems.join("; ")));
    }
    (report, Some(e))
}

fn show(v: Option<Value>) -> String {
    v.map_or_else(|| "nothing".to_string(), |v| v.to_string())
}

/// The per-state facts checked for every pair of simultaneously
/// executable nodes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AuditCheck {
    /// Neither node lies in the other's `G*`.
    NotNested,
    /// No flow or loop-carried edge joins them.
    NoDataEdge,
    /// They do not write the same variable for the same reader.
    DistinctFlowTargets,
    /// Firing one leaves the other executable.
    StaysExecutable,
    /// `G(p)` and `G(q)` are disjoint.
    DisjointSubgraphs,
    /// Both firing orders reach the same state.
    Commutes,
}

impl AuditCheck {
    /// Whether the check only applies to deterministic PDGs.
    pub fn needs_determinism(self) -> bool {
        !matches!(self, AuditCheck::NotNested | AuditCheck::NoDataEdge)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AuditFailure {
    pub check: AuditCheck,
    /// Run reaching the state where the pair is executable.
    pub path: Vec<NodeId>,
    pub p: NodeId,
    pub q: NodeId,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct AuditReport {
    pub states: usize,
    pub pairs: usize,
    pub diamonds: usize,
    /// Whether the determinism-dependent checks ran.
    pub full: bool,
    pub failures: Vec<AuditFailure>,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn count(&self, check: AuditCheck) -> usize {
        self.failures.iter().filter(|f| f.check == check).count()
    }
}

pub fn lemma_audit(pdg: &Pdg, e: &Exploration, dpdg: &DpdgReport) -> AuditReport {
    audit_machine(&PdgMachine::new(pdg), e, dpdg)
}

pub fn audit_machine(machine: &PdgMachine, e: &Exploration, dpdg: &DpdgReport) -> AuditReport {
    let states = e.visited().iter().map(|(s, seen)| (s, *seen));
    audit_states(machine, states, |id| e.path_to(id), dpdg)
}

/// Audits every state along one run.
pub fn audit_run(machine: &PdgMachine, run: &PdgRun, dpdg: &DpdgReport) -> AuditReport {
    let ret_at = machine
        .ret_node()
        .and_then(|r| run.order.iter().position(|&n| n == r));
    let states = run
        .states
        .iter()
        .enumerate()
        .map(|(i, s)| (s, run.returned.filter(|_| ret_at.is_some_and(|k| k < i))));
    audit_states(machine, states, |i| run.order[..i].to_vec(), dpdg)
}

fn audit_states<'a>(
    machine: &PdgMachine,
    states: impl Iterator<Item = (&'a PdgState, Option<Value>)>,
    path_to: impl Fn(usize) -> Vec<NodeId>,
    dpdg: &DpdgReport,
) -> AuditReport {
    let pdg = machine.pdg();
    let sub = machine.subgraphs();
    let data_edges: BTreeSet<(NodeId, NodeId)> = pdg
        .f
        .iter()
        .chain(&pdg.l)
        .map(|(a, b, _)| (*a, *b))
        .collect();
    let full = dpdg.is_deterministic();
    let mut report = AuditReport {
        full,
        ..AuditReport::default()
    };

    for (id, (s, seen)) in states.enumerate() {
        report.states += 1;
        let next = machine.next_indices(s);
        for (k, &pi) in next.iter().enumerate() {
            for &qi in &next[k + 1..] {
                let (p, q) = (machine.node_at(pi), machine.node_at(qi));
                report.pairs += 1;
                let mut fail = |check: AuditCheck, detail: String| {
                    report.failures.push(AuditFailure {
                        check,
                        path: path_to(id),
                        p,
                        q,
                        detail,
                    })
                };
                let star = |n| sub.get(n, SubgraphMode::GStar);
                if star(p).contains(&q) || star(q).contains(&p) {
                    fail(
                        AuditCheck::NotNested,
                        format!("{p} and {q} are nested in G*"),
                    );
                }
                if data_edges.contains(&(p, q)) || data_edges.contains(&(q, p)) {
                    fail(
                        AuditCheck::NoDataEdge,
                        format!("a flow or loop edge joins {p} and {q}"),
                    );
                }
                if !full {
                    continue;
                }
                let shared: Vec<_> = pdg
                    .f
                    .iter()
                    .filter(|(a, n, x)| *a == p && pdg.f.contains(&(q, *n, x.clone())))
                    .collect();
                if let Some((_, n, x)) = shared.first() {
                    fail(
                        AuditCheck::DistinctFlowTargets,
                        format!("both define {x} for {n}"),
                    );
                }
                let gp = sub.get(p, SubgraphMode::G);
                if let Some(n) = gp.intersection(sub.get(q, SubgraphMode::G)).next() {
                    fail(
                        AuditCheck::DisjointSubgraphs,
                        format!("{n} lies in G({p}) and G({q})"),
                    );
                }

                let after = |a: usize, b: usize| -> Result<_, String> {
                    let (s1, r1) = machine.step_index(s, a).map_err(|e| e.to_string())?;
                    let still = machine.next_indices(&s1).contains(&b);
                    if !still {
                        return Ok((false, None));
                    }
                    let (s2, r2) = machine.step_index(&s1, b).map_err(|e| e.to_string())?;
                    Ok((true, Some((s2, r2.or(r1).or(seen)))))
                };
                match (after(pi, qi), after(qi, pi)) {
                    (Ok((pq_ok, pq)), Ok((qp_ok, qp))) => {
                        if !pq_ok {
                            fail(AuditCheck::StaysExecutable, format!("{q} disabled by {p}"));
                        }
                        if !qp_ok {
                            fail(AuditCheck::StaysExecutable, format!("{p} disabled by {q}"));
                        }
                        if let (Some(a), Some(b)) = (pq, qp) {
                            report.diamonds += 1;
                            if a != b {
                                fail(AuditCheck::Commutes, "the two orders disagree".to_string());
                            }
                        }
                    }
                    (Err(err), _) | (_, Err(err)) => {
                        fail(AuditCheck::Commutes, format!("runtime error: {err}"));
                    }
                }
            }
        }
    }
    report
        .failures
        .sort_by(|a, b| (a.check, &a.path, a.p, a.q).cmp(&(b.check, &b.path, b.p, b.q)));
    report
}
