//! Line-oriented text format for CFGs and initial stores.
//!
//! ```text
//! # sum of 1..=3
//! node 1: s := 0
//! node 2: if s < 3
//! edge 1 -> 2
//! edge 2 -T-> 3
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use thiserror::Error;

use super::{validate_cfg, ArithOp, Cfg, CfgEdge, CmpOp, Expr, Stmt, Value, Violation};
use crate::node::{Branch, NodeId};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{line}:{col}: syntax error: {msg}")]
    Syntax {
        line: usize,
        col: usize,
        msg: String,
    },
    #[error("{line}: duplicate node id {id}")]
    DuplicateNode { line: usize, id: u32 },
    #[error("{line}: duplicate edge")]
    DuplicateEdge { line: usize },
    #[error("{line}: edge references unknown node {id}")]
    UnknownNode { line: usize, id: u32 },
    #[error("missing start: every node has a predecessor")]
    MissingStart,
    #[error("ambiguous start: nodes {0:?} have no predecessor")]
    AmbiguousStart(Vec<u32>),
    #[error("invalid program: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Int(i64),
    Ident(String),
    Colon,
    Assign,
    Arrow(Option<Branch>),
    Plus,
    Minus,
    Star,
    LParen,
    RParen,
    Cmp(CmpOp),
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Int(i) => i.to_string(),
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Colon => "`:`".into(),
        Tok::Assign => "`:=`".into(),
        Tok::Arrow(None) => "`->`".into(),
        Tok::Arrow(Some(b)) => format!("`-{b}->`"),
        Tok::Plus => "`+`".into(),
        Tok::Minus => "`-`".into(),
        Tok::Star => "`*`".into(),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
        Tok::Cmp(op) => format!("`{}`", op.symbol()),
    }
}

struct Lexed {
    toks: Vec<(Tok, usize)>,
    end_col: usize,
}

fn lex(line_no: usize, text: &str) -> Result<Lexed, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let err = |col: usize, msg: String| ParseError::Syntax {
        line: line_no,
        col,
        msg,
    };
    let mut toks = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c == '#' {
            break;
        }
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let rest = |k: usize| chars.get(i + k).copied();
        let (tok, len) = match c {
            '0'..='9' => {
                let mut j = i;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
                let s: String = chars[i..j].iter().collect();
                let v = s
                    .parse::<i64>()
                    .map_err(|_| err(col, format!("integer literal {s} out of range")))?;
                (Tok::Int(v), j - i)
            }
            'a'..='z' | 'A'..='Z' | '_' => {
                let mut j = i;
                while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_') {
                    j += 1;
                }
                (Tok::Ident(chars[i..j].iter().collect()), j - i)
            }
            ':' if rest(1) == Some('=') => (Tok::Assign, 2),
            ':' => (Tok::Colon, 1),
            '-' if rest(1) == Some('>') => (Tok::Arrow(None), 2),
            '-' if matches!(rest(1), Some('T' | 'F'))
                && rest(2) == Some('-')
                && rest(3) == Some('>') =>
            {
                let b = if rest(1) == Some('T') {
                    Branch::T
                } else {
                    Branch::F
                };
                (Tok::Arrow(Some(b)), 4)
            }
            '-' => (Tok::Minus, 1),
            '+' => (Tok::Plus, 1),
            '*' => (Tok::Star, 1),
            '(' => (Tok::LParen, 1),
            ')' => (Tok::RParen, 1),
            '=' if rest(1) == Some('=') => (Tok::Cmp(CmpOp::Eq), 2),
            '!' if rest(1) == Some('=') => (Tok::Cmp(CmpOp::Ne), 2),
            '<' if rest(1) == Some('=') => (Tok::Cmp(CmpOp::Le), 2),
            '>' if rest(1) == Some('=') => (Tok::Cmp(CmpOp::Ge), 2),
            '<' => (Tok::Cmp(CmpOp::Lt), 1),
            '>' => (Tok::Cmp(CmpOp::Gt), 1),
            other => return Err(err(col, format!("unexpected character `{other}`"))),
        };
        toks.push((tok, col));
        i += len;
    }
    Ok(Lexed {
        toks,
        end_col: chars.len() + 1,
    })
}

const RESERVED: [&str; 6] = ["T", "F", "if", "ret", "node", "edge"];

struct Parser {
    line: usize,
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end_col: usize,
}

impl Parser {
    fn new(line: usize, lexed: Lexed) -> Self {
        Parser {
            line,
            toks: lexed.toks,
            pos: 0,
            end_col: lexed.end_col,
        }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end_col, |(_, c)| *c)
    }

    fn error(&self, msg: impl Into<String>) -> ParseError {
        ParseError::Syntax {
            line: self.line,
            col: self.col(),
            msg: msg.into(),
        }
    }

    fn unexpected(&self, expected: &str) -> ParseError {
        match self.peek() {
            Some(t) => self.error(format!("expected {expected}, found {}", describe(t))),
            None => self.error(format!("expected {expected}, found end of line")),
        }
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _)| t.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, want: &Tok, what: &str) -> Result<(), ParseError> {
        if self.peek() == Some(want) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.unexpected(what))
        }
    }

    fn node_id(&mut self) -> Result<u32, ParseError> {
        match self.peek() {
            Some(Tok::Int(v)) => {
                let v = *v;
                let id = u32::try_from(v).map_err(|_| self.error("node id out of range"))?;
                self.pos += 1;
                Ok(id)
            }
            _ => Err(self.unexpected("node id")),
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek() {
            Some(Tok::Ident(s)) if !RESERVED.contains(&s.as_str()) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.unexpected("identifier")),
        }
    }

    fn finish(&self) -> Result<(), ParseError> {
        match self.peek() {
            None => Ok(()),
            Some(_) => Err(self.unexpected("end of line")),
        }
    }

    fn stmt(&mut self) -> Result<Stmt, ParseError> {
        match self.peek() {
            Some(Tok::Ident(k)) if k == "if" => {
                self.pos += 1;
                Ok(Stmt::If { cond: self.expr()? })
            }
            Some(Tok::Ident(k)) if k == "ret" => {
                self.pos += 1;
                Ok(Stmt::Ret { var: self.ident()? })
            }
            _ => {
                let target = self.ident()?;
                self.expect(&Tok::Assign, "`:=`")?;
                Ok(Stmt::Assign {
                    target,
                    rhs: self.expr()?,
                })
            }
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let lhs = self.arith()?;
        if let Some(Tok::Cmp(op)) = self.peek() {
            let op = *op;
            self.pos += 1;
            let rhs = self.arith()?;
            return Ok(Expr::cmp(op, lhs, rhs));
        }
        Ok(lhs)
    }

    fn arith(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Some(Tok::Plus) => ArithOp::Add,
                Some(Tok::Minus) => ArithOp::Sub,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            lhs = Expr::arith(op, lhs, self.term()?);
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.atom()?;
        while self.peek() == Some(&Tok::Star) {
            self.pos += 1;
            lhs = Expr::arith(ArithOp::Mul, lhs, self.atom()?);
        }
        Ok(lhs)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.peek().cloned() {
            Some(Tok::Int(v)) => {
                self.pos += 1;
                Ok(Expr::Int(v))
            }
            Some(Tok::Ident(s)) if s == "T" || s == "F" => {
                self.pos += 1;
                Ok(Expr::Bool(s == "T"))
            }
            Some(Tok::Ident(_)) => Ok(Expr::Var(self.ident()?)),
            Some(Tok::LParen) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(&Tok::RParen, "`)`")?;
                Ok(e)
            }
            _ => Err(self.unexpected("expression")),
        }
    }
}

/// Parses the text format into a [`Cfg`] without checking well-formedness
/// beyond syntax, duplicate ids and dangling edge endpoints.
pub fn parse_cfg_unchecked(text: &str) -> Result<Cfg, ParseError> {
    let mut nodes = BTreeMap::new();
    let mut edges: Vec<(usize, CfgEdge)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let lexed = lex(line, raw)?;
        if lexed.toks.is_empty() {
            continue;
        }
        let mut p = Parser::new(line, lexed);
        match p.next() {
            Some(Tok::Ident(k)) if k == "node" => {
                let id = p.node_id()?;
                p.expect(&Tok::Colon, "`:`")?;
                let stmt = p.stmt()?;
                p.finish()?;
                if nodes.insert(NodeId::Stmt(id), stmt).is_some() {
                    return Err(ParseError::DuplicateNode { line, id });
                }
            }
            Some(Tok::Ident(k)) if k == "edge" => {
                let src = p.node_id()?;
                let label = match p.next() {
                    Some(Tok::Arrow(l)) => l,
                    _ => {
                        p.pos -= 1;
                        return Err(p.unexpected("`->`, `-T->` or `-F->`"));
                    }
                };
                let dst = p.node_id()?;
                p.finish()?;
                let e = CfgEdge::new(src, dst, label);
                if edges.iter().any(|(_, x)| *x == e) {
                    return Err(ParseError::DuplicateEdge { line });
                }
                edges.push((line, e));
            }
            _ => {
                p.pos = 0;
                return Err(p.unexpected("`node` or `edge`"));
            }
        }
    }
    for (line, e) in &edges {
        for n in [e.src, e.dst] {
            if !nodes.contains_key(&n) {
                let NodeId::Stmt(id) = n else { unreachable!() };
                return Err(ParseError::UnknownNode { line: *line, id });
            }
        }
    }
    Ok(Cfg::new(nodes, edges.into_iter().map(|(_, e)| e).collect()))
}

/// Parses and validates. The start node is the unique node without
/// predecessors.
pub fn parse_cfg(text: &str) -> Result<Cfg, ParseError> {
    let cfg = parse_cfg_unchecked(text)?;
    let ids = |v: Vec<NodeId>| {
        v.into_iter()
            .filter_map(|n| match n {
                NodeId::Stmt(i) => Some(i),
                _ => None,
            })
            .collect::<Vec<_>>()
    };
    let candidates = cfg.start_candidates();
    if !cfg.nodes().is_empty() {
        match candidates.len() {
            0 => return Err(ParseError::MissingStart),
            1 => {}
            _ => return Err(ParseError::AmbiguousStart(ids(candidates))),
        }
    }
    let report = validate_cfg(&cfg);
    if !report.is_empty() {
        return Err(ParseError::Invalid(report));
    }
    Ok(cfg)
}

/// Parses a standalone expression (used by tests and tooling).
pub fn parse_expr(text: &str) -> Result<Expr, ParseError> {
    let mut p = Parser::new(1, lex(1, text)?);
    let e = p.expr()?;
    p.finish()?;
    Ok(e)
}

/// Canonical text: nodes by id, then edges by `(src, dst, label)`.
pub fn print_cfg(cfg: &Cfg) -> String {
    let mut out = String::new();
    for (id, stmt) in cfg.nodes() {
        let _ = writeln!(out, "node {id}: {stmt}");
    }
    for e in cfg.edges() {
        let arrow = match e.label {
            None => "->".to_string(),
            Some(b) => format!("-{b}->"),
        };
        let _ = writeln!(out, "edge {} {arrow} {}", e.src, e.dst);
    }
    out
}

/// Parses an initial store: `x=1, y=T` bindings separated by commas or
/// newlines. `#` comments and blank entries are ignored. Values may be
/// negative.
pub fn parse_store(text: &str) -> Result<BTreeMap<String, Value>, String> {
    let mut out = BTreeMap::new();
    let mut seen = BTreeSet::new();
    for line in text.lines() {
        let line = line.split('#').next().unwrap_or("");
        for item in line.split(',') {
            let item = item.trim();
            if item.is_empty() {
                continue;
            }
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| format!("binding `{item}` is not of the form NAME=VALUE"))?;
            let k = k.trim();
            let valid_ident = k
                .chars()
                .next()
                .is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
                && k.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
                && !RESERVED.contains(&k);
            if !valid_ident {
                return Err(format!("`{k}` is not a valid identifier"));
            }
            if !seen.insert(k.to_owned()) {
                return Err(format!("variable `{k}` bound twice"));
            }
            out.insert(k.to_owned(), v.parse::<Value>()?);
        }
    }
    Ok(out)
}
