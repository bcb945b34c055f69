//! One line per acceptance criterion; exits nonzero if any fails or runs
//! over its time limit.

mod common;

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::{digraph, loop_map, postdom_by_paths, random_edges, set};
use pdgsem::cfg::{cfg_run, Value};
use pdgsem::dependence::{
    analyze, enumerate_loops, enumerate_loops_decomposed, loops_of, post_dominance,
};
use pdgsem::determinism::{check_dpdg, Witness};
use pdgsem::graph::Digraph;
use pdgsem::harness::fixtures::{self, Fixture, ARM_REENTRY, F5, F6, W};
use pdgsem::harness::{
    check_confluence, explore_all, fuzz_campaign, lemma_audit, random_cfg, ConfluenceVerdict,
    Exploration, ExploreLimits, FuzzParams, FuzzReport, GenParams, Leg,
};
use pdgsem::node::{Branch, NodeId};
use pdgsem::pdg::{
    build_pdg, cdg_loops, iteration_statements, looping_edges, EdgeKey, SubgraphMode, Subgraphs,
};

const FUZZ_SEED: u64 = 0;
const FUZZ_COUNT: usize = 500;

struct Outcome {
    summary: String,
    problems: Vec<String>,
}

impl Outcome {
    fn new(summary: impl Into<String>, problems: Vec<String>) -> Self {
        Outcome {
            summary: summary.into(),
            problems,
        }
    }
}

fn n(i: u32) -> NodeId {
    NodeId::from(i)
}

fn cfg_graph(f: &Fixture) -> Digraph {
    let cfg = f.cfg();
    Digraph::new(
        cfg.nodes().keys().copied(),
        cfg.edges().iter().map(|e| (e.src, e.dst)),
    )
}

fn expect<T: PartialEq + std::fmt::Debug>(problems: &mut Vec<String>, what: &str, got: T, want: T) {
    if got != want {
        problems.push(format!("{what}: got {got:?}, expected {want:?}"));
    }
}

fn f5_subgraph_table() -> Outcome {
    let pdg = build_pdg(&F5.cfg());
    let s = Subgraphs::new(&pdg);
    let table: [(u32, SubgraphMode, &[u32]); 9] = [
        (0, SubgraphMode::G, &[1, 2, 3, 4, 5, 6, 7]),
        (0, SubgraphMode::GT, &[1, 2, 3, 7]),
        (0, SubgraphMode::GF, &[4, 5, 6, 7]),
        (3, SubgraphMode::G, &[4, 5, 6, 7]),
        (3, SubgraphMode::GT, &[4, 5, 6]),
        (3, SubgraphMode::GF, &[7]),
        (6, SubgraphMode::G, &[1, 2, 3, 7]),
        (6, SubgraphMode::GT, &[1, 2, 3]),
        (6, SubgraphMode::GF, &[7]),
    ];
    let mut problems = Vec::new();
    for (p, mode, want) in table {
        expect(
            &mut problems,
            &format!("{mode}({p})"),
            s.get(n(p), mode).clone(),
            set(want),
        );
    }
    Outcome::new("9 subgraph sets on F5", problems)
}

fn loop_facts() -> Outcome {
    let mut problems = Vec::new();
    let pairs = |v: &[(u32, u32)]| -> BTreeSet<(u32, u32)> { v.iter().copied().collect() };

    let f5 = loop_map(&loops_of(&cfg_graph(&F5)));
    expect(
        &mut problems,
        "F5 loop {1..6} back edges",
        f5.get(&[1, 2, 3, 4, 5, 6].into()).cloned(),
        Some(pairs(&[(3, 4), (6, 1)])),
    );
    let f6 = loop_map(&loops_of(&cfg_graph(&F6)));
    let want_f6 = [
        ([1, 2, 3, 4, 5].into(), pairs(&[(5, 1)])),
        ([2, 3, 4].into(), pairs(&[(4, 2)])),
    ]
    .into();
    expect(&mut problems, "F6 loops", f6, want_f6);

    let f5_pdg = build_pdg(&F5.cfg());
    let f5_cdg = cdg_loops(&f5_pdg);
    let cdg: Vec<_> = f5_cdg
        .loops()
        .iter()
        .map(|l| (l.nodes.clone(), l.back_edges.clone()))
        .collect();
    expect(
        &mut problems,
        "F5 CDG loops",
        cdg,
        vec![(set(&[3, 6]), [(n(3), n(6)), (n(6), n(3))].into())],
    );
    let ct = |a: u32, b: u32| EdgeKey::control(a, b, Branch::T);
    expect(
        &mut problems,
        "F5 looping edges",
        looping_edges(&f5_pdg, &f5_cdg),
        [ct(3, 4), ct(3, 5), ct(3, 6), ct(6, 1), ct(6, 2), ct(6, 3)].into(),
    );

    let w_pdg = build_pdg(&W.cfg());
    let w_cdg = cdg_loops(&w_pdg);
    let cdg: Vec<_> = w_cdg
        .loops()
        .iter()
        .map(|l| (l.nodes.clone(), l.back_edges.clone()))
        .collect();
    expect(
        &mut problems,
        "W CDG loops",
        cdg,
        vec![(set(&[4]), [(n(4), n(4))].into())],
    );
    expect(
        &mut problems,
        "W looping edges",
        looping_edges(&w_pdg, &w_cdg),
        [ct(4, 2), ct(4, 3), ct(4, 4)].into(),
    );

    let loops = loops_of(&cfg_graph(&F5));
    let top = loops
        .loops()
        .iter()
        .position(|l| l.nodes == set(&[1, 2, 3, 4, 5, 6]));
    let iters = top.map(|i| iteration_statements(&F5.cfg(), &loops)[i].clone());
    expect(
        &mut problems,
        "F5 iteration statements",
        iters,
        Some(set(&[3, 6])),
    );
    Outcome::new(
        "F5, F6 and W loop, back-edge, looping-edge and iteration facts",
        problems,
    )
}

fn weak_cd() -> Outcome {
    let cd = analyze(&W.cfg()).deps.cd;
    let mut problems = Vec::new();
    if !cd.contains(&(n(4), n(5), Branch::F)) {
        problems.push("(4,5,F) missing from CD on W".to_string());
    }
    Outcome::new("(4,5,F) in CD(W)", problems)
}

fn built_pdg_conditions() -> Outcome {
    let params = GenParams::default();
    let mut problems = Vec::new();
    let mut max_nodes = 0;
    for (i, seed) in pdgsem::harness::fuzz::program_seeds(FUZZ_SEED, FUZZ_COUNT)
        .into_iter()
        .enumerate()
    {
        let cfg = random_cfg(seed, &params);
        max_nodes = max_nodes.max(cfg.nodes().len());
        match check_dpdg(&build_pdg(&cfg)) {
            Ok(r) => problems.extend(
                r.violations
                    .iter()
                    .filter(|v| v.condition != 1)
                    .map(|v| format!("program {i}: {v}")),
            ),
            Err(e) => problems.push(format!("program {i}: {e}")),
        }
    }
    Outcome::new(
        format!("{FUZZ_COUNT} programs of at most {max_nodes} nodes, conditions 2 and 3"),
        problems,
    )
}

fn guided(report: &FuzzReport) -> Outcome {
    let mut problems = Vec::new();
    let mut terminated = 0;
    for p in &report.programs {
        let Some(eq) = p.equivalence.as_ref().filter(|e| !e.skipped()) else {
            continue;
        };
        terminated += 1;
        if let Leg::Fail(d) = &eq.guided {
            problems.push(format!("program {} (seed {}): {d}", p.index, p.seed));
        }
    }
    if terminated < 200 {
        problems.push(format!("only {terminated} terminating programs"));
    }
    Outcome::new(
        format!(
            "{} of {terminated} terminating programs",
            terminated - problems.len().min(terminated)
        ),
        problems,
    )
}

/// Deterministic fixtures whose default run terminates.
fn confluence_fixtures() -> Vec<Fixture> {
    fixtures::ALL
        .iter()
        .filter(|f| {
            f.terminates && check_dpdg(&build_pdg(&f.cfg())).is_ok_and(|r| r.is_deterministic())
        })
        .copied()
        .collect()
}

fn explore_fixtures(fs: &[Fixture]) -> Vec<(Fixture, Exploration)> {
    let limits = ExploreLimits {
        max_states: 100_000,
        max_depth: 10_000,
    };
    fs.iter()
        .map(|f| {
            (
                *f,
                explore_all(&build_pdg(&f.cfg()), &f.store(), limits).expect("fixture store"),
            )
        })
        .collect()
}

fn confluence(explored: &[(Fixture, Exploration)]) -> Outcome {
    let mut problems = Vec::new();
    for (f, e) in explored {
        let dpdg = check_dpdg(&build_pdg(&f.cfg())).unwrap();
        let c = check_confluence(e, &dpdg);
        if c.verdict != ConfluenceVerdict::Pass || c.run_lengths.len() != 1 {
            problems.push(format!(
                "{}: {:?} after {} states, {} final states, run lengths {:?}, returns {:?}",
                f.name,
                c.verdict,
                e.states,
                c.final_states,
                c.run_lengths,
                e.returned_values()
            ));
        }
    }
    let names: Vec<&str> = explored.iter().map(|(f, _)| f.name).collect();
    Outcome::new(
        format!("{} fixtures ({})", explored.len(), names.join(", ")),
        problems,
    )
}

fn returns(report: &FuzzReport, explored: &[(Fixture, Exploration)]) -> Outcome {
    let mut problems = Vec::new();
    let mut compared = 0;
    for p in &report.programs {
        let Some(eq) = p.equivalence.as_ref().filter(|e| !e.skipped()) else {
            continue;
        };
        compared += eq.compared + 1;
        for (leg, l) in [("guided", &eq.guided), ("runs", &eq.runs)] {
            if let Leg::Fail(d) = l {
                problems.push(format!("program {} {leg}: {d}", p.index));
            }
        }
    }
    for (f, e) in explored {
        let want = cfg_run(&f.cfg(), &f.store(), 10_000).returned;
        compared += e.finals.len() + e.stuck.len();
        let got: Vec<Option<Value>> = e
            .finals
            .iter()
            .map(|t| t.returned)
            .chain(e.stuck.iter().map(|_| None))
            .collect();
        if got.iter().any(|v| *v != want) {
            problems.push(format!(
                "{}: CFG returns {want:?}, PDG runs return {:?}",
                f.name,
                e.returned_values()
            ));
        }
    }
    Outcome::new(format!("{compared} compared runs"), problems)
}

fn audits(explored: &[(Fixture, Exploration)]) -> Outcome {
    let mut problems = Vec::new();
    let (mut states, mut pairs, mut diamonds) = (0, 0, 0);
    for (f, e) in explored {
        let pdg = build_pdg(&f.cfg());
        let a = lemma_audit(&pdg, e, &check_dpdg(&pdg).unwrap());
        states += a.states;
        pairs += a.pairs;
        diamonds += a.diamonds;
        if !a.full {
            problems.push(format!("{}: determinism-dependent checks skipped", f.name));
        }
        if let Some(first) = a.failures.first() {
            problems.push(format!(
                "{}: {} failures, first {:?} on ({}, {}) after [{}]: {}",
                f.name,
                a.failures.len(),
                first.check,
                first.p,
                first.q,
                pdgsem::node::fmt_path(&first.path),
                first.detail
            ));
        }
    }
    Outcome::new(
        format!("{states} states, {pairs} executable pairs, {diamonds} diamonds"),
        problems,
    )
}

fn static_reachability(report: &FuzzReport) -> Outcome {
    let problems: Vec<String> = report
        .programs
        .iter()
        .flat_map(|p| {
            p.static_failures
                .iter()
                .map(move |s| format!("program {}: {s}", p.index))
        })
        .collect();
    Outcome::new(format!("{} programs", report.programs.len()), problems)
}

fn arm_reentry_witness() -> Outcome {
    let mut problems = Vec::new();
    match check_dpdg(&build_pdg(&ARM_REENTRY.cfg())) {
        Ok(r) => {
            if r.is_deterministic() {
                problems.push("reported deterministic".to_string());
            }
            let witness = r
                .violations
                .iter()
                .find(|v| v.condition == 1 && matches!(v.witness, Witness::SharedControl { .. }));
            match witness {
                Some(v) => return Outcome::new(v.to_string(), problems),
                None => problems.push("no condition-1 witness".to_string()),
            }
        }
        Err(e) => problems.push(e.to_string()),
    }
    Outcome::new("ARM_REENTRY", problems)
}

fn oracles() -> Outcome {
    let mut problems = Vec::new();
    for seed in 0..200 {
        let (size, edges) = random_edges(seed, 7);
        let pd = post_dominance(&digraph(size, &edges));
        for t in 0..size {
            for s in 0..size {
                if pd.post_dominates(n(t), n(s)) != postdom_by_paths(&edges, t, s) {
                    problems.push(format!("post-dominance graph {seed}: t={t} s={s}"));
                }
            }
        }
    }
    for seed in 0..200 {
        let (size, edges) = random_edges(10_000 + seed, 10);
        let g = digraph(size, &edges);
        match enumerate_loops(&g, 16) {
            Ok(exhaustive) => {
                if loop_map(&exhaustive) != loop_map(&enumerate_loops_decomposed(&g)) {
                    problems.push(format!("loops graph {seed}: enumerators disagree"));
                }
            }
            Err(e) => problems.push(format!("loops graph {seed}: {e}")),
        }
    }
    Outcome::new("200 graphs for post-dominance, 200 for loops", problems)
}

struct Row {
    id: usize,
    name: &'static str,
    limit: Option<Duration>,
    elapsed: Duration,
    outcome: Outcome,
}

fn timed(id: usize, name: &'static str, limit: Option<u64>, f: impl FnOnce() -> Outcome) -> Row {
    let start = Instant::now();
    let outcome = f();
    Row {
        id,
        name,
        limit: limit.map(Duration::from_secs),
        elapsed: start.elapsed(),
        outcome,
    }
}

fn main() -> ExitCode {
    let mut rows = vec![
        timed(1, "subgraph-table", Some(1), f5_subgraph_table),
        timed(2, "loop-facts", Some(1), loop_facts),
        timed(3, "weak-control-dependence", Some(1), weak_cd),
        timed(
            4,
            "cfg-pdgs-satisfy-conditions-2-3",
            Some(60),
            built_pdg_conditions,
        ),
    ];

    let start = Instant::now();
    let report = fuzz_campaign(FUZZ_SEED, FUZZ_COUNT, &FuzzParams::default());
    let campaign = start.elapsed();
    let mut row = timed(5, "guided-runs-on-fuzzed-programs", Some(120), || {
        guided(&report)
    });
    row.elapsed += campaign;
    rows.push(row);

    let start = Instant::now();
    let explored = explore_fixtures(&confluence_fixtures());
    let exploring = start.elapsed();
    let mut row = timed(6, "confluence-on-deterministic-fixtures", Some(120), || {
        confluence(&explored)
    });
    row.elapsed += exploring;
    rows.push(row);

    rows.push(timed(7, "return-value-equality", None, || {
        returns(&report, &explored)
    }));
    rows.push(timed(8, "state-audits", None, || audits(&explored)));
    rows.push(timed(9, "static-reachability", None, || {
        static_reachability(&report)
    }));
    rows.push(timed(
        10,
        "condition-1-witness",
        Some(1),
        arm_reentry_witness,
    ));
    rows.push(timed(11, "oracle-agreement", Some(60), oracles));

    let mut failed = 0;
    for r in &rows {
        let late = r.limit.is_some_and(|l| r.elapsed > l);
        let pass = r.outcome.problems.is_empty() && !late;
        failed += usize::from(!pass);
        let limit = r.limit.map_or("included above".to_string(), |l| {
            format!("limit {}s", l.as_secs())
        });
        println!(
            "criterion {:>2} {} {} ({:.2}s, {limit}): {}",
            r.id,
            if pass { "PASS" } else { "FAIL" },
            r.name,
            r.elapsed.as_secs_f64(),
            r.outcome.summary
        );
        if late {
            println!("    over time limit");
        }
        for p in &r.outcome.problems {
            println!("    {p}");
        }
    }
    println!("{} of {} criteria passed", rows.len() - failed, rows.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
