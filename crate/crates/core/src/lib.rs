//! Program dependence graphs for unstructured programs.
//!
//! A small three-statement IR is analysed into a PDG whose control
//! dependence is based on strong post-dominance and whose data dependences
//! distinguish loop-independent from loop-carried flow. Both the CFG and the
//! PDG can be executed; the PDG interpreter is a dataflow machine whose
//! interleavings can be explored exhaustively.
//!
//! ```
//! use pdgsem::cfg::{parse_cfg, Store, Value};
//! use pdgsem::pdg::build_pdg;
//! use pdgsem::exec::{pdg_run, Strategy};
//!
//! let cfg = parse_cfg("node 1: x := 1\nnode 2: y := x + 1\nnode 3: ret y\nedge 1 -> 2\nedge 2 -> 3").unwrap();
//! let pdg = build_pdg(&cfg);
//! let run = pdg_run(&pdg, &Store::uniform(&cfg, Value::Int(0)), Strategy::MinId, 100).unwrap();
//! assert_eq!(run.returned, Some(Value::Int(2)));
//! ```

pub mod cfg;
pub mod dependence;
pub mod determinism;
pub mod exec;
pub mod graph;
pub mod harness;
pub mod node;
pub mod pdg;
