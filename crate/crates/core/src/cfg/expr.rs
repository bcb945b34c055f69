//! Values, expressions and the expression evaluator.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Serialize, Serializer};
use thiserror::Error;

/// A runtime value: a 64-bit integer or one of the truth values `T`/`F`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Int(i64),
    Bool(bool),
}

impl Value {
    pub const TRUE: Value = Value::Bool(true);
    pub const FALSE: Value = Value::Bool(false);

    pub fn as_int(self) -> Option<i64> {
        match self {
            Value::Int(i) => Some(i),
            Value::Bool(_) => None,
        }
    }

    pub fn as_bool(self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(b),
            Value::Int(_) => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(i) => write!(f, "{i}"),
            Value::Bool(true) => f.write_str("T"),
            Value::Bool(false) => f.write_str("F"),
        }
    }
}

impl std::str::FromStr for Value {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "T" => Ok(Value::TRUE),
            "F" => Ok(Value::FALSE),
            t => t
                .parse::<i64>()
                .map(Value::Int)
                .map_err(|_| format!("invalid value `{t}`")),
        }
    }
}

impl Serialize for Value {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Value::Int(i) => serializer.serialize_i64(*i),
            Value::Bool(_) => serializer.collect_str(self),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl ArithOp {
    pub fn symbol(self) -> &'static str {
        match self {
            ArithOp::Add => "+",
            ArithOp::Sub => "-",
            ArithOp::Mul => "*",
        }
    }
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "==",
            CmpOp::Ne => "!=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Expr {
    Int(i64),
    Bool(bool),
    Var(String),
    Arith(ArithOp, Box<Expr>, Box<Expr>),
    Cmp(CmpOp, Box<Expr>, Box<Expr>),
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("unbound variable `{0}`")]
    Unbound(String),
    #[error("type error: `{op}` applied to {left} and {right}")]
    Type {
        op: &'static str,
        left: Value,
        right: Value,
    },
    #[error("integer overflow in {left} {op} {right}")]
    Overflow {
        op: &'static str,
        left: i64,
        right: i64,
    },
}

impl Expr {
    pub fn var(name: &str) -> Expr {
        Expr::Var(name.to_owned())
    }

    pub fn arith(op: ArithOp, l: Expr, r: Expr) -> Expr {
        Expr::Arith(op, Box::new(l), Box::new(r))
    }

    pub fn cmp(op: CmpOp, l: Expr, r: Expr) -> Expr {
        Expr::Cmp(op, Box::new(l), Box::new(r))
    }

    /// Variables referenced by the expression.
    pub fn vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Expr::Int(_) | Expr::Bool(_) => {}
            Expr::Var(v) => {
                out.insert(v.clone());
            }
            Expr::Arith(_, l, r) | Expr::Cmp(_, l, r) => {
                l.collect_vars(out);
                r.collect_vars(out);
            }
        }
    }

    /// Evaluates against an arbitrary variable lookup.
    pub fn eval_with<F>(&self, lookup: &F) -> Result<Value, EvalError>
    where
        F: Fn(&str) -> Option<Value>,
    {
        match self {
            Expr::Int(i) => Ok(Value::Int(*i)),
            Expr::Bool(b) => Ok(Value::Bool(*b)),
            Expr::Var(v) => lookup(v).ok_or_else(|| EvalError::Unbound(v.clone())),
            Expr::Arith(op, l, r) => {
                let (lv, rv) = (l.eval_with(lookup)?, r.eval_with(lookup)?);
                let (Value::Int(a), Value::Int(b)) = (lv, rv) else {
                    return Err(EvalError::Type {
                        op: op.symbol(),
                        left: lv,
                        right: rv,
                    });
                };
                let res = match op {
                    ArithOp::Add => a.checked_add(b),
                    ArithOp::Sub => a.checked_sub(b),
                    ArithOp::Mul => a.checked_mul(b),
                };
                res.map(Value::Int).ok_or(EvalError::Overflow {
                    op: op.symbol(),
                    left: a,
                    right: b,
                })
            }
            Expr::Cmp(op, l, r) => {
                let (lv, rv) = (l.eval_with(lookup)?, r.eval_with(lookup)?);
                let type_err = || EvalError::Type {
                    op: op.symbol(),
                    left: lv,
                    right: rv,
                };
                let holds = match (lv, rv) {
                    (Value::Int(a), Value::Int(b)) => match op {
                        CmpOp::Eq => a == b,
                        CmpOp::Ne => a != b,
                        CmpOp::Lt => a < b,
                        CmpOp::Le => a <= b,
                        CmpOp::Gt => a > b,
                        CmpOp::Ge => a >= b,
                    },
                    // truth values only support (in)equality
                    (Value::Bool(a), Value::Bool(b)) => match op {
                        CmpOp::Eq => a == b,
                        CmpOp::Ne => a != b,
                        _ => return Err(type_err()),
                    },
                    _ => return Err(type_err()),
                };
                Ok(Value::Bool(holds))
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Cmp(..) => 0,
            Expr::Arith(ArithOp::Add | ArithOp::Sub, ..) => 1,
            Expr::Arith(ArithOp::Mul, ..) => 2,
            _ => 3,
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn child(f: &mut fmt::Formatter<'_>, e: &Expr, parens: bool) -> fmt::Result {
            if parens {
                write!(f, "({e})")
            } else {
                write!(f, "{e}")
            }
        }
        match self {
            Expr::Int(i) if *i < 0 => write!(f, "(0 - {})", i.unsigned_abs()),
            Expr::Int(i) => write!(f, "{i}"),
            Expr::Bool(true) => f.write_str("T"),
            Expr::Bool(false) => f.write_str("F"),
            Expr::Var(v) => f.write_str(v),
            Expr::Arith(op, l, r) => {
                let p = self.precedence();
                // left-associative: a right operand of equal precedence needs parens
                child(f, l, l.precedence() < p)?;
                write!(f, " {} ", op.symbol())?;
                child(f, r, r.precedence() <= p)
            }
            Expr::Cmp(op, l, r) => {
                child(f, l, l.precedence() == 0)?;
                write!(f, " {} ", op.symbol())?;
                child(f, r, r.precedence() == 0)
            }
        }
    }
}
