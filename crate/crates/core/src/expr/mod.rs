//! Expression language for candidate functions.
//!
//! ```text
//! expr   := term (("+"|"-") term)*
//! term   := factor (("*"|"/") factor)*
//! factor := unary ("^" factor)?
//! unary  := ("-")? atom
//! atom   := number | varname | call | "(" expr ")"
//! call   := ident "(" expr ("," expr)* ")"
//! varname:= "x" digits
//! ```
//!
//! Call names: `abs floor ceil round` (one argument), `min max pow` (two),
//! `clamp` (three: value, lo, hi), `mean median` (one or more).

mod eval;
mod parse;

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

pub use eval::EvalError;
pub use parse::{parse, ParseError};

use crate::domain::{Domain, DomainSignature};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnaryOp {
    Neg,
    Abs,
    Floor,
    Ceil,
    Round,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Min,
    Max,
    Pow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Builtin {
    Mean,
    Median,
    Clamp,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    /// 1-based positional argument.
    Var(usize),
    Const(Scalar),
    Unary(UnaryOp, Box<Expr>),
    Binary(BinaryOp, Box<Expr>, Box<Expr>),
    Call(Builtin, Vec<Expr>),
}

impl Expr {
    pub fn var(i: usize) -> Self {
        Expr::Var(i)
    }

    pub fn unary(op: UnaryOp, e: Expr) -> Self {
        Expr::Unary(op, Box::new(e))
    }

    pub fn binary(op: BinaryOp, l: Expr, r: Expr) -> Self {
        Expr::Binary(op, Box::new(l), Box::new(r))
    }

    /// `mean(x1, …, xn)`.
    pub fn mean_of_vars(n: usize) -> Self {
        Expr::Call(Builtin::Mean, (1..=n).map(Expr::Var).collect())
    }

    /// Largest variable index used, 0 for closed expressions.
    pub fn max_var(&self) -> usize {
        match self {
            Expr::Var(i) => *i,
            Expr::Const(_) => 0,
            Expr::Unary(_, e) => e.max_var(),
            Expr::Binary(_, l, r) => l.max_var().max(r.max_var()),
            Expr::Call(_, args) => args.iter().map(Expr::max_var).max().unwrap_or(0),
        }
    }
}

impl UnaryOp {
    fn name(self) -> &'static str {
        match self {
            UnaryOp::Neg => "-",
            UnaryOp::Abs => "abs",
            UnaryOp::Floor => "floor",
            UnaryOp::Ceil => "ceil",
            UnaryOp::Round => "round",
        }
    }
}

impl BinaryOp {
    fn symbol(self) -> &'static str {
        match self {
            BinaryOp::Add => "+",
            BinaryOp::Sub => "-",
            BinaryOp::Mul => "*",
            BinaryOp::Div => "/",
            BinaryOp::Pow => "^",
            BinaryOp::Min => "min",
            BinaryOp::Max => "max",
        }
    }

    /// Infix binding power; `None` for call-syntax operators.
    fn precedence(self) -> Option<u8> {
        match self {
            BinaryOp::Add | BinaryOp::Sub => Some(1),
            BinaryOp::Mul | BinaryOp::Div => Some(2),
            BinaryOp::Pow => Some(3),
            BinaryOp::Min | BinaryOp::Max => None,
        }
    }
}

impl Builtin {
    pub fn name(self) -> &'static str {
        match self {
            Builtin::Mean => "mean",
            Builtin::Median => "median",
            Builtin::Clamp => "clamp",
        }
    }
}

/// Binding power of the printed form; atoms and calls bind tightest.
fn print_precedence(e: &Expr) -> u8 {
    match e {
        Expr::Binary(op, ..) => op.precedence().unwrap_or(5),
        Expr::Unary(UnaryOp::Neg, _) => 4,
        Expr::Const(c) if c.as_f64().is_sign_negative() => 4,
        _ => 5,
    }
}

fn write_wrapped(f: &mut fmt::Formatter<'_>, e: &Expr, wrap: bool) -> fmt::Result {
    if wrap {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Var(i) => write!(f, "x{i}"),
            Expr::Const(c) => write!(f, "{c}"),
            Expr::Unary(UnaryOp::Neg, e) => {
                f.write_str("-")?;
                // the grammar only negates atoms; a bare negative literal
                // would fold back into a constant
                let wrap = print_precedence(e) < 5 || matches!(**e, Expr::Const(_));
                write_wrapped(f, e, wrap)
            }
            Expr::Unary(op, e) => write!(f, "{}({e})", op.name()),
            Expr::Binary(op, l, r) => match op.precedence() {
                None => write!(f, "{}({l}, {r})", op.symbol()),
                Some(p) => {
                    let (lp, rp) = (print_precedence(l), print_precedence(r));
                    let (wrap_l, wrap_r) = if *op == BinaryOp::Pow {
                        // base must be a unary; exponent recurses right
                        (lp < 4, rp < 3)
                    } else {
                        (lp < p, rp <= p)
                    };
                    write_wrapped(f, l, wrap_l)?;
                    write!(f, " {} ", op.symbol())?;
                    write_wrapped(f, r, wrap_r)
                }
            },
            Expr::Call(b, args) => {
                write!(f, "{}(", b.name())?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// A named n-ary function together with its declared domain and codomain.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionDef {
    pub name: String,
    pub body: Expr,
    pub signature: DomainSignature,
    pub codomain: Domain,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DefinitionError {
    #[error("body uses x{used} but the signature has arity {arity}")]
    Arity { used: usize, arity: usize },
}

impl FunctionDef {
    pub fn new(
        name: impl Into<String>,
        body: Expr,
        signature: DomainSignature,
        codomain: Domain,
    ) -> Result<Self, DefinitionError> {
        let arity = signature.arity();
        let used = body.max_var();
        if used > arity {
            return Err(DefinitionError::Arity { used, arity });
        }
        Ok(FunctionDef {
            name: name.into(),
            body,
            signature,
            codomain,
        })
    }

    pub fn arity(&self) -> usize {
        self.signature.arity()
    }

    pub fn apply(&self, args: &[Scalar]) -> Result<Scalar, EvalError> {
        eval::eval(&self.body, args)
    }

    /// Same body and codomain over a different signature of equal arity.
    pub fn with_signature(&self, signature: DomainSignature) -> Result<Self, DefinitionError> {
        FunctionDef::new(self.name.clone(), self.body.clone(), signature, self.codomain.clone())
    }
}

pub use eval::eval;

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    #[test]
    fn printer_minimal_parens() {
        let e = Expr::binary(
            BinaryOp::Div,
            Expr::binary(BinaryOp::Add, Expr::var(1), Expr::var(2)),
            Expr::Const(Scalar::Int(2)),
        );
        assert_eq!(e.to_string(), "(x1 + x2) / 2");
        let sub = Expr::binary(
            BinaryOp::Sub,
            Expr::var(1),
            Expr::binary(BinaryOp::Sub, Expr::var(2), Expr::var(3)),
        );
        assert_eq!(sub.to_string(), "x1 - (x2 - x3)");
        let pow = Expr::binary(
            BinaryOp::Pow,
            Expr::var(1),
            Expr::binary(BinaryOp::Pow, Expr::var(2), Expr::var(3)),
        );
        assert_eq!(pow.to_string(), "x1 ^ x2 ^ x3");
        assert_eq!(Expr::mean_of_vars(3).to_string(), "mean(x1, x2, x3)");
        assert_eq!(
            Expr::binary(BinaryOp::Min, Expr::var(1), Expr::var(2)).to_string(),
            "min(x1, x2)"
        );
    }

    #[test]
    fn definition_checks_arity() {
        let sig = DomainSignature::power(Domain::AllReals, 2).unwrap();
        assert!(FunctionDef::new("f", Expr::var(3), sig.clone(), Domain::AllReals).is_err());
        assert!(FunctionDef::new("f", Expr::var(2), sig, Domain::AllReals).is_ok());
    }
}
