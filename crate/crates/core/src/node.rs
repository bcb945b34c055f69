//! Node identifiers and branch labels shared by every graph in the crate.

use std::fmt;

use serde::{Serialize, Serializer};

/// Identity of a node in a CFG, an augmented CFG or a PDG.
///
/// `Entry` and `Exit` are the synthetic nodes added by augmentation; they
/// can never collide with a parsed statement id. The derived order puts
/// `Entry` first and `Exit` last, which is the order used by every printer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NodeId {
    Entry,
    Stmt(u32),
    Exit,
}

impl NodeId {
    pub fn is_stmt(self) -> bool {
        matches!(self, NodeId::Stmt(_))
    }
}

impl From<u32> for NodeId {
    fn from(id: u32) -> Self {
        NodeId::Stmt(id)
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NodeId::Entry => f.write_str("entry"),
            NodeId::Stmt(id) => write!(f, "{id}"),
            NodeId::Exit => f.write_str("exit"),
        }
    }
}

impl std::str::FromStr for NodeId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "entry" => Ok(NodeId::Entry),
            "exit" => Ok(NodeId::Exit),
            _ => s
                .parse::<u32>()
                .map(NodeId::Stmt)
                .map_err(|_| format!("invalid node id `{s}`")),
        }
    }
}

impl Serialize for NodeId {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Label of a conditional edge: the true (`T`) or false (`F`) branch.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Branch {
    T,
    F,
}

impl Branch {
    pub const BOTH: [Branch; 2] = [Branch::T, Branch::F];

    pub fn negate(self) -> Branch {
        match self {
            Branch::T => Branch::F,
            Branch::F => Branch::T,
        }
    }

    pub fn from_bool(b: bool) -> Branch {
        if b {
            Branch::T
        } else {
            Branch::F
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Branch::T => "T",
            Branch::F => "F",
        })
    }
}

/// Formats a node set as `{a, b, c}`.
pub fn fmt_set<'a, I>(nodes: I) -> String
where
    I: IntoIterator<Item = &'a NodeId>,
{
    let items: Vec<String> = nodes.into_iter().map(|n| n.to_string()).collect();
    format!("{{{}}}", items.join(", "))
}

/// Formats a run as `a b c`, or `-` when empty.
pub fn fmt_path(nodes: &[NodeId]) -> String {
    if nodes.is_empty() {
        return "-".to_string();
    }
    let items: Vec<String> = nodes.iter().map(|n| n.to_string()).collect();
    items.join(" ")
}
