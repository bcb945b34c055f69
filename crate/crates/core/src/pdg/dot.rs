//! Graphviz export. Output is deterministic: nodes and edges are emitted in
//! canonical order.

use std::fmt::Write;

use super::Pdg;
use crate::cfg::{Cfg, Stmt};
use crate::node::NodeId;

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

fn node_line(out: &mut String, n: NodeId, stmt: Option<&Stmt>) {
    let label = match stmt {
        Some(s) => format!("{n}: {s}"),
        None => n.to_string(),
    };
    let shape = match stmt {
        Some(s) if s.is_if() => "diamond",
        Some(_) => "box",
        None => "ellipse",
    };
    writeln!(
        out,
        "  \"{n}\" [label=\"{}\", shape={shape}];",
        escape(&label)
    )
    .unwrap();
}

pub fn cfg_to_dot(cfg: &Cfg) -> String {
    let mut out = String::from("digraph cfg {\n");
    for (n, s) in cfg.nodes() {
        node_line(&mut out, *n, Some(s));
    }
    for e in cfg.edges() {
        match e.label {
            Some(l) => writeln!(out, "  \"{}\" -> \"{}\" [label=\"{l}\"];", e.src, e.dst),
            None => writeln!(out, "  \"{}\" -> \"{}\";", e.src, e.dst),
        }
        .unwrap();
    }
    out.push_str("}\n");
    out
}

/// C edges solid and labeled T/F, F edges dashed, L edges dotted (both
/// labeled with their variable), D edges bold.
pub fn pdg_to_dot(pdg: &Pdg) -> String {
    let mut out = String::from("digraph pdg {\n");
    for n in pdg.nodes() {
        node_line(&mut out, n, pdg.stmt(n));
    }
    for (s, t, l) in &pdg.c {
        writeln!(out, "  \"{s}\" -> \"{t}\" [label=\"{l}\", style=solid];").unwrap();
    }
    for (s, t, x) in &pdg.f {
        writeln!(out, "  \"{s}\" -> \"{t}\" [label=\"{x}\", style=dashed];").unwrap();
    }
    for (s, t, x) in &pdg.l {
        writeln!(out, "  \"{s}\" -> \"{t}\" [label=\"{x}\", style=dotted];").unwrap();
    }
    for (s, t) in &pdg.d {
        writeln!(out, "  \"{s}\" -> \"{t}\" [style=bold];").unwrap();
    }
    out.push_str("}\n");
    out
}
