mod common;

use std::collections::BTreeSet;

use common::set;
use pdgsem::cfg::{cfg_run, parse_cfg, Store, Value};
use pdgsem::exec::{
    guided_run, pdg_run, EdgeStatus, ExecError, GuidedFailure, PdgMachine, PdgVerdict, Strategy,
};
use pdgsem::harness::fixtures::{self, SUM3, W};
use pdgsem::harness::{random_cfg, random_store, GenParams};
use pdgsem::node::{Branch, NodeId};
use pdgsem::pdg::{build_pdg, EdgeKey};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn n(i: u32) -> NodeId {
    NodeId::from(i)
}

fn zeros(src: &str) -> (pdgsem::pdg::Pdg, Store) {
    let cfg = parse_cfg(src).unwrap();
    let s = Store::uniform(&cfg, Value::Int(0));
    (build_pdg(&cfg), s)
}

const INDEP: &str = "node 1: x := 1\nnode 2: y := 2\nnode 3: z := x + y\nnode 4: ret z\n\
                     edge 1 -> 2\nedge 2 -> 3\nedge 3 -> 4";
const CHAIN: &str = "node 1: x := 1\nnode 2: y := x + 1\nnode 3: ret y\nedge 1 -> 2\nedge 2 -> 3";

#[test]
fn initial_next_sets() {
    let (pdg, s0) = zeros(INDEP);
    let m = PdgMachine::new(&pdg);
    assert_eq!(m.next_nodes(&m.init_state(&s0).unwrap()), set(&[1, 2]));

    let (pdg, s0) = zeros(CHAIN);
    let m = PdgMachine::new(&pdg);
    assert_eq!(m.next_nodes(&m.init_state(&s0).unwrap()), set(&[1]));
}

#[test]
fn assignment_writes_every_reader() {
    let (pdg, s0) = zeros(
        "node 1: x := 5\nnode 2: y := x\nnode 3: z := x + y\nnode 4: ret z\n\
         edge 1 -> 2\nedge 2 -> 3\nedge 3 -> 4",
    );
    let m = PdgMachine::new(&pdg);
    let s = m.init_state(&s0).unwrap();
    let t = m.step(&s, n(1)).unwrap();
    assert_eq!(m.av(&t, n(2), "x"), Some(Value::Int(5)));
    assert_eq!(m.av(&t, n(3), "x"), Some(Value::Int(5)));
    assert_eq!(m.av(&t, n(3), "y"), Some(Value::Int(0)));
    assert_eq!(m.av(&t, n(1), "x"), Some(Value::Int(0)));
    for e in pdg.edges().iter().filter(|e| e.src() == n(1)) {
        let want = if matches!(e, EdgeKey::Control { .. }) {
            None
        } else {
            Some(EdgeStatus::Chk)
        };
        if let Some(w) = want {
            assert_eq!(m.status(&t, e), Some(w), "{e:?}");
        }
    }
    assert_eq!(
        m.status(&t, &EdgeKey::control(NodeId::Entry, n(1), Branch::T)),
        Some(EdgeStatus::Unchk)
    );
}

#[test]
fn increment_reads_before_it_writes() {
    let pdg = build_pdg(&W.cfg());
    let m = PdgMachine::new(&pdg);
    let mut s = m.init_state(&W.store()).unwrap();
    for node in [1, 2] {
        s = m.step(&s, n(node)).unwrap();
    }
    assert_eq!(m.av(&s, n(3), "i"), Some(Value::Int(0)));
    let av = m.apply_udav(n(3), &s).unwrap();
    let t = m.step(&s, n(3)).unwrap();
    assert_eq!(t.av, av);
    assert_eq!(m.av(&t, n(3), "i"), Some(Value::Int(1)));
}

#[test]
fn if_leaves_avail_alone() {
    let pdg = build_pdg(&W.cfg());
    let m = PdgMachine::new(&pdg);
    let mut s = m.init_state(&W.store()).unwrap();
    for node in [1, 2, 3] {
        s = m.step(&s, n(node)).unwrap();
    }
    assert_eq!(m.apply_udav(n(4), &s).unwrap(), s.av);
}

#[test]
fn loop_test_reactivates_its_body() {
    let pdg = build_pdg(&W.cfg());
    let m = PdgMachine::new(&pdg);
    let mut s = m.init_state(&W.store()).unwrap();
    for node in [1, 2, 3] {
        s = m.step(&s, n(node)).unwrap();
    }
    let ec = m.apply_udec(n(4), &s).unwrap();
    let t = m.step(&s, n(4)).unwrap();
    assert_eq!(t.ec, ec);
    for (a, b) in [(4, 2), (4, 3), (4, 4)] {
        assert_eq!(
            m.status(&t, &EdgeKey::control(a, b, Branch::T)),
            Some(EdgeStatus::Act)
        );
    }
    assert_eq!(
        m.status(&t, &EdgeKey::control(4, 5, Branch::F)),
        Some(EdgeStatus::Unchk)
    );
    assert_eq!(m.next_nodes(&t), set(&[2]));
}

#[test]
fn consumer_releases_carried_edge() {
    let pdg = build_pdg(&W.cfg());
    let m = PdgMachine::new(&pdg);
    let mut s = m.init_state(&W.store()).unwrap();
    for node in [1, 2, 3, 4, 2] {
        s = m.step(&s, n(node)).unwrap();
    }
    let carried = EdgeKey::Carried {
        src: n(2),
        dst: n(2),
        var: "s".to_string(),
    };
    assert!(pdg.edges().contains(&carried));
    assert_eq!(m.status(&s, &carried), Some(EdgeStatus::Chk));
}

#[test]
fn stepping_outside_next_fails() {
    let (pdg, s0) = zeros(CHAIN);
    let m = PdgMachine::new(&pdg);
    let s = m.init_state(&s0).unwrap();
    assert!(matches!(
        m.step(&s, n(2)),
        Err(ExecError::NotExecutable { .. })
    ));
    assert!(matches!(m.step(&s, n(9)), Err(ExecError::UnknownNode(_))));
    assert_eq!(m.step(&s, n(1)).unwrap(), m.step(&s, n(1)).unwrap());
}

#[test]
fn ret_observes_the_assigned_value() {
    let (pdg, s0) = zeros("node 1: x := 1\nnode 2: ret x\nedge 1 -> 2");
    let run = pdg_run(&pdg, &s0, Strategy::MinId, 10).unwrap();
    assert_eq!(run.order, vec![n(1), n(2)]);
    assert_eq!(run.verdict, PdgVerdict::Quiescent);
    assert_eq!(run.returned, Some(Value::Int(1)));
}

#[test]
fn sum3_returns_six_under_any_schedule() {
    let cfg = SUM3.cfg();
    let pdg = build_pdg(&cfg);
    let s0 = Store::uniform(&cfg, Value::Int(0));
    assert_eq!(cfg_run(&cfg, &s0, 1000).returned, Some(Value::Int(6)));
    for strategy in [
        Strategy::MinId,
        Strategy::Random(1),
        Strategy::Random(2),
        Strategy::Random(99),
    ] {
        let run = pdg_run(&pdg, &s0, strategy, 1000).unwrap();
        assert_eq!(run.returned, Some(Value::Int(6)), "{strategy:?}");
        assert_eq!(run.verdict, PdgVerdict::Quiescent);
    }
}

#[test]
fn forever_exceeds_the_bound() {
    let f = fixtures::FOREVER;
    let run = pdg_run(&build_pdg(&f.cfg()), &f.store(), Strategy::MinId, 200).unwrap();
    assert_eq!(run.verdict, PdgVerdict::BoundExceeded);
    assert_eq!(run.order.len(), 200);
}

#[test]
fn guided_runs_follow_the_cfg() {
    for f in fixtures::ALL
        .iter()
        .filter(|f| f.terminates && f.name != "STUCKL")
    {
        let cfg = f.cfg();
        let trace = cfg_run(&cfg, &f.store(), 10_000);
        let run = guided_run(&build_pdg(&cfg), &f.store(), &trace.steps)
            .unwrap_or_else(|e| panic!("{}: {e}", f.name));
        assert_eq!(run.returned, trace.returned, "{}", f.name);
        assert_eq!(run.verdict, PdgVerdict::Quiescent, "{}", f.name);
    }
}

// Node 2 waits for y carried from 3, which the first iteration never
// produces.
#[test]
fn two_entry_loop_deadlocks() {
    let f = fixtures::STUCKL;
    let cfg = f.cfg();
    let trace = cfg_run(&cfg, &f.store(), 10_000);
    assert!(trace.terminated());
    let pdg = build_pdg(&cfg);
    assert!(matches!(
        guided_run(&pdg, &f.store(), &trace.steps),
        Err(GuidedFailure::NotExecutable { index: 1, .. })
    ));
    let run = pdg_run(&pdg, &f.store(), Strategy::MinId, 1000).unwrap();
    assert_eq!(run.verdict, PdgVerdict::Stuck);
}

#[test]
fn guided_run_catches_a_missing_flow_edge() {
    let cfg = parse_cfg(CHAIN).unwrap();
    let s0 = Store::uniform(&cfg, Value::Int(0));
    let trace = cfg_run(&cfg, &s0, 10);
    let mut pdg = build_pdg(&cfg);
    pdg.f.remove(&(n(1), n(2), "x".to_string()));
    match guided_run(&pdg, &s0, &trace.steps) {
        Err(GuidedFailure::Disagree { node, var, .. }) => {
            assert_eq!(node, n(2));
            assert_eq!(var, "x");
        }
        other => panic!("expected a disagreement, got {other:?}"),
    }
}

#[test]
fn random_runs_match_the_cfg_on_acyclic_programs() {
    let params = GenParams {
        loop_bias: 0.0,
        jumps: 0,
        ..GenParams::default()
    };
    for seed in 0..100 {
        let cfg = random_cfg(seed, &params);
        let s0 = random_store(&cfg, &mut ChaCha8Rng::seed_from_u64(seed));
        let want = cfg_run(&cfg, &s0, 1000);
        let pdg = build_pdg(&cfg);
        for k in 0..4 {
            let run = pdg_run(&pdg, &s0, Strategy::Random(k), 1000).unwrap();
            if want.terminated() {
                assert_eq!(run.returned, want.returned, "seed {seed} schedule {k}");
            }
        }
    }
}

#[test]
fn next_sets_are_recorded_per_step() {
    let (pdg, s0) = zeros(INDEP);
    let run = pdg_run(&pdg, &s0, Strategy::MinId, 10).unwrap();
    assert_eq!(run.next_sets[0], set(&[1, 2]));
    assert_eq!(run.next_sets.len(), run.order.len());
    assert_eq!(run.states.len(), run.order.len() + 1);
    let all: BTreeSet<NodeId> = run.order.iter().copied().collect();
    assert_eq!(all, set(&[1, 2, 3, 4]));
}
