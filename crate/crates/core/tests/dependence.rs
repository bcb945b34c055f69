mod common;

use std::collections::BTreeSet;

use common::{digraph, loop_map, loops_by_subsets, random_edges, set};
use pdgsem::cfg::{augment_cfg, parse_cfg};
use pdgsem::dependence::{
    analyze, control_dependence, enumerate_loops, enumerate_loops_decomposed, loop_forest,
    loops_of, post_dominance, reach_sets, strong_postdom, DEFAULT_LOOP_LIMIT,
};
use pdgsem::harness::fixtures::{F5, F6, W};
use pdgsem::harness::{random_cfg, GenParams};
use pdgsem::node::{Branch, NodeId};

fn n(i: u32) -> NodeId {
    NodeId::from(i)
}

#[test]
fn postdom_matches_path_enumeration() {
    for seed in 0..300 {
        let (size, edges) = random_edges(seed, 7);
        let pd = post_dominance(&digraph(size, &edges));
        for t in 0..size {
            for s in 0..size {
                assert_eq!(
                    pd.post_dominates(n(t), n(s)),
                    common::postdom_by_paths(&edges, t, s),
                    "seed {seed}: t={t} s={s} edges={edges:?}"
                );
            }
        }
    }
}

#[test]
fn loop_after_body_does_not_postdominate() {
    let pd = strong_postdom(&augment_cfg(&W.cfg()));
    assert!(!pd.post_dominates(n(5), n(4)));
    assert!(pd.post_dominates(n(4), n(2)));
    assert!(pd.post_dominates(NodeId::Exit, NodeId::Exit));
    assert!(!pd.post_dominates(NodeId::Exit, n(1)));
}

#[test]
fn straight_line_postdominance_and_cd() {
    let cfg = parse_cfg("node 1: x := 1\nnode 2: y := x\nnode 3: ret y\nedge 1 -> 2\nedge 2 -> 3")
        .unwrap();
    let aug = augment_cfg(&cfg);
    let pd = strong_postdom(&aug);
    assert!(pd.post_dominates(n(3), n(1)));
    assert!(pd.post_dominates(n(3), n(2)));
    let cd = control_dependence(&aug, &pd);
    let expected: BTreeSet<_> = [1, 2, 3]
        .iter()
        .map(|&t| (NodeId::Entry, n(t), Branch::T))
        .collect();
    assert_eq!(cd, expected);
}

#[test]
fn loop_exit_is_control_dependent_on_the_test() {
    let cd = analyze(&W.cfg()).deps.cd;
    assert!(cd.contains(&(n(4), n(5), Branch::F)));
    assert!(cd.contains(&(n(4), n(4), Branch::T)));
    assert!(cd.contains(&(n(4), n(2), Branch::T)));
    assert!(cd.contains(&(n(4), n(3), Branch::T)));
    assert!(!cd.iter().any(|(s, t, _)| *s == n(4) && *t == n(1)));
}

#[test]
fn cd_targets_are_program_nodes_and_sources_branch() {
    for seed in 0..100 {
        let cfg = random_cfg(seed, &GenParams::default());
        for (s, t, _) in analyze(&cfg).deps.cd {
            assert!(t.is_stmt(), "seed {seed}: exit is a CD target");
            assert!(
                s == NodeId::Entry || cfg.stmt(s).unwrap().is_if(),
                "seed {seed}: {s} is not a branch"
            );
        }
    }
}

#[test]
fn fixture_loops() {
    let g = |f: pdgsem::harness::fixtures::Fixture| {
        let cfg = f.cfg();
        pdgsem::graph::Digraph::new(
            cfg.nodes().keys().copied(),
            cfg.edges().iter().map(|e| (e.src, e.dst)),
        )
    };
    let f5 = loops_of(&g(F5));
    let top = f5
        .loops()
        .iter()
        .find(|l| l.nodes == set(&[1, 2, 3, 4, 5, 6]))
        .expect("F5 loop");
    assert_eq!(top.back_edges, BTreeSet::from([(n(3), n(4)), (n(6), n(1))]));

    let f6 = loops_of(&g(F6));
    let outer = f6
        .loops()
        .iter()
        .find(|l| l.nodes == set(&[1, 2, 3, 4, 5]))
        .expect("outer");
    let inner = f6
        .loops()
        .iter()
        .find(|l| l.nodes == set(&[2, 3, 4]))
        .expect("inner");
    assert_eq!(outer.back_edges, BTreeSet::from([(n(5), n(1))]));
    assert_eq!(inner.back_edges, BTreeSet::from([(n(4), n(2))]));
    assert_eq!(f6.len(), 2);
    assert_eq!(loop_forest(&g(F6)).loops(), f6.loops());
}

#[test]
fn loop_enumerators_agree_with_subsets() {
    for seed in 0..200 {
        let (size, edges) = random_edges(1000 + seed, 8);
        let g = digraph(size, &edges);
        let brute = loops_by_subsets(size, &edges);
        let exhaustive = enumerate_loops(&g, DEFAULT_LOOP_LIMIT).unwrap();
        assert_eq!(loop_map(&exhaustive), brute, "seed {seed}");
        assert_eq!(
            loop_map(&enumerate_loops_decomposed(&g)),
            brute,
            "seed {seed}"
        );
    }
}

#[test]
fn forest_is_a_subset_whose_back_edges_break_every_cycle() {
    for seed in 0..200 {
        let (size, edges) = random_edges(5000 + seed, 9);
        let g = digraph(size, &edges);
        let all = loop_map(&loops_of(&g));
        let forest = loop_forest(&g);
        for (nodes, back) in loop_map(&forest) {
            assert_eq!(all.get(&nodes), Some(&back), "seed {seed}");
        }
        let be = forest.back_edges();
        let rest: BTreeSet<(u32, u32)> = edges
            .iter()
            .copied()
            .filter(|&(a, b)| !be.contains(&(n(a), n(b))))
            .collect();
        // cycles that never enter from outside have no back edges at all
        let closed: BTreeSet<u32> = loop_map(&forest)
            .iter()
            .filter(|(_, b)| b.is_empty())
            .flat_map(|(s, _)| s.iter().copied())
            .collect();
        let rest: BTreeSet<(u32, u32)> = rest
            .into_iter()
            .filter(|(a, b)| !(closed.contains(a) && closed.contains(b)))
            .collect();
        assert!(loops_by_subsets(size, &rest).is_empty(), "seed {seed}");
    }
}

#[test]
fn straight_line_data_dependences() {
    let cfg =
        parse_cfg("node 1: x := 1\nnode 2: y := x + 1\nnode 3: ret y\nedge 1 -> 2\nedge 2 -> 3")
            .unwrap();
    let d = analyze(&cfg).deps;
    let lidd: BTreeSet<_> = [(n(1), n(2), "x".to_string()), (n(2), n(3), "y".to_string())].into();
    assert_eq!(d.lidd, lidd);
    assert!(d.lcdd.is_empty());
    assert!(d.def_order.is_empty());
}

#[test]
fn carried_and_independent_in_a_loop() {
    let cfg = parse_cfg(
        "node 1: if c\nnode 2: x := y\nnode 3: y := x + 1\nnode 4: if y < 5\nnode 5: ret y\n\
         edge 1 -T-> 2\nedge 1 -F-> 5\nedge 2 -> 3\nedge 3 -> 4\nedge 4 -T-> 2\nedge 4 -F-> 5",
    )
    .unwrap();
    let d = analyze(&cfg).deps;
    assert!(d.lcdd.contains(&(n(3), n(2), "y".to_string())));
    assert!(d.lidd.contains(&(n(2), n(3), "x".to_string())));
    assert!(d.lidd.contains(&(n(3), n(4), "y".to_string())));
}

#[test]
fn self_increment_is_carried() {
    let d = analyze(&W.cfg()).deps;
    assert!(d.lcdd.contains(&(n(3), n(3), "i".to_string())));
    assert!(d.lcdd.contains(&(n(2), n(2), "s".to_string())));
    assert!(d.lidd.contains(&(n(1), n(2), "i".to_string())));
}

#[test]
fn data_dependences_match_path_enumeration() {
    let params = GenParams {
        max_nodes: 10,
        ..GenParams::default()
    };
    for seed in 0..150 {
        let cfg = random_cfg(seed, &params);
        let a = analyze(&cfg);
        let (lidd, lcdd) = common::data_deps_by_paths(&cfg, &a.loops);
        assert_eq!(a.deps.lidd, lidd, "seed {seed}");
        assert_eq!(a.deps.lcdd, lcdd, "seed {seed}");
    }
}

#[test]
fn def_order_in_a_diamond_is_empty() {
    let cfg = parse_cfg(
        "node 0: if c\nnode 1: x := 1\nnode 2: x := 2\nnode 3: y := x\nnode 4: ret y\n\
         edge 0 -T-> 1\nedge 0 -F-> 2\nedge 1 -> 3\nedge 2 -> 3\nedge 3 -> 4",
    )
    .unwrap();
    let d = analyze(&cfg).deps;
    assert!(d.lidd.contains(&(n(1), n(3), "x".to_string())));
    assert!(d.lidd.contains(&(n(2), n(3), "x".to_string())));
    assert!(d.def_order.is_empty());
}

#[test]
fn def_order_follows_flow() {
    let cfg = parse_cfg(
        "node 1: x := 1\nnode 2: if c\nnode 3: x := 2\nnode 4: y := x\nnode 5: ret y\n\
         edge 1 -> 2\nedge 2 -T-> 3\nedge 2 -F-> 4\nedge 3 -> 4\nedge 4 -> 5",
    )
    .unwrap();
    let d = analyze(&cfg).deps;
    assert_eq!(d.def_order, BTreeSet::from([(n(1), n(3))]));
}

#[test]
fn def_order_both_ways_when_only_back_edges_connect() {
    // 2 and 4 define x for 5; inside the loop each reaches the other only
    // around the back edge
    let cfg = parse_cfg(
        "node 1: if c\nnode 2: x := 1\nnode 3: if c\nnode 4: x := 2\nnode 5: y := x\nnode 6: if y < 3\nnode 7: ret y\n\
         edge 1 -T-> 2\nedge 1 -F-> 4\nedge 2 -> 3\nedge 3 -T-> 5\nedge 3 -F-> 7\nedge 4 -> 5\nedge 5 -> 6\n\
         edge 6 -T-> 2\nedge 6 -F-> 4",
    )
    .unwrap();
    let d = analyze(&cfg).deps;
    assert!(d.lidd.contains(&(n(2), n(5), "x".to_string())));
    assert!(d.lidd.contains(&(n(4), n(5), "x".to_string())));
    assert!(d.def_order.contains(&(n(2), n(4))));
    assert!(d.def_order.contains(&(n(4), n(2))));
}

#[test]
fn reach_sets_on_a_chain() {
    let cfg = parse_cfg("node 1: x := 1\nnode 2: y := x\nnode 3: ret y\nedge 1 -> 2\nedge 2 -> 3")
        .unwrap();
    let a = analyze(&cfg);
    let r3 = reach_sets(&cfg, &a.loops, n(3));
    assert_eq!(r3.ur, set(&[1, 2]));
    assert_eq!(reach_sets(&cfg, &a.loops, n(1)).r, set(&[1, 2, 3]));
}

#[test]
fn static_reachability_properties_hold() {
    for seed in 0..300 {
        let cfg = random_cfg(seed, &GenParams::default());
        let a = analyze(&cfg);
        assert!(
            pdgsem::harness::fuzz::static_failures(&cfg, &a).is_empty(),
            "seed {seed}"
        );
    }
}
