//! Ready-made functions with known membership outcomes.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::checker::Status;
use crate::domain::{Domain, DomainSignature};
use crate::expr::{parse, BinaryOp, Builtin, Expr, FunctionDef, UnaryOp};
use crate::scalar::Scalar;

/// Outcome the checker is expected to reach on the entry's own signature.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Expected {
    Member,
    Fails,
    Undefined,
}

impl Expected {
    pub fn matches(self, status: Status) -> bool {
        match self {
            Expected::Member => status.is_member(),
            Expected::Fails => status == Status::Fails,
            Expected::Undefined => status == Status::Undefined,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub def: FunctionDef,
    pub expected: Expected,
    pub note: &'static str,
}

/// Largest `n` for which `mean_n` is listed.
pub const MAX_CATALOG_MEAN: usize = 16;

fn reals(n: usize) -> DomainSignature {
    DomainSignature::power(Domain::AllReals, n).expect("positive arity")
}

fn entry(
    name: impl Into<String>,
    body: Expr,
    signature: DomainSignature,
    codomain: Domain,
    expected: Expected,
    note: &'static str,
) -> CatalogEntry {
    CatalogEntry {
        def: FunctionDef::new(name, body, signature, codomain).expect("catalog bodies fit their arity"),
        expected,
        note,
    }
}

/// `x ↦ c` on `ℝ` with codomain `{c}`.
pub fn constant(c: Scalar) -> FunctionDef {
    let codomain = Domain::finite_set([c]).expect("singleton");
    FunctionDef::new(format!("const_{c}"), Expr::Const(c), reals(1), codomain).expect("closed body")
}

/// `mean(x1, …, xn)` on `ℝⁿ`.
pub fn mean(n: usize) -> FunctionDef {
    FunctionDef::new(format!("mean_{n}"), Expr::mean_of_vars(n), reals(n), Domain::AllReals)
        .expect("mean body uses exactly n variables")
}

pub fn catalog() -> Vec<CatalogEntry> {
    use Expected::*;
    let x1 = || Expr::Var(1);
    let unit = Domain::closed(0.0, 1.0).expect("valid interval");
    let mut out = alloc::vec![
        entry("identity", x1(), reals(1), Domain::AllReals, Member, "f(x) = x on R"),
        entry(
            "identity_z",
            x1(),
            DomainSignature::univariate(Domain::AllIntegers),
            Domain::AllIntegers,
            Member,
            "f(x) = x on Z",
        ),
    ];
    let c7 = constant(Scalar::Int(7));
    out.push(CatalogEntry {
        def: c7,
        expected: Member,
        note: "g(x) = 7, codomain {7}",
    });
    for n in 2..=MAX_CATALOG_MEAN {
        out.push(CatalogEntry {
            def: mean(n),
            expected: Member,
            note: "arithmetic mean",
        });
    }
    out.extend([
        entry(
            "floor",
            Expr::unary(UnaryOp::Floor, x1()),
            reals(1),
            Domain::AllIntegers,
            Member,
            "floor",
        ),
        entry(
            "round",
            Expr::unary(UnaryOp::Round, x1()),
            reals(1),
            Domain::AllIntegers,
            Member,
            "round half away from zero",
        ),
        entry(
            "abs",
            Expr::unary(UnaryOp::Abs, x1()),
            reals(1),
            Domain::AllReals,
            Member,
            "absolute value",
        ),
        entry(
            "clamp_0_1",
            Expr::Call(
                Builtin::Clamp,
                alloc::vec![x1(), Expr::Const(Scalar::Int(0)), Expr::Const(Scalar::Int(1))],
            ),
            reals(1),
            unit.clone(),
            Member,
            "clamp to [0, 1]",
        ),
        entry(
            "min_2",
            Expr::binary(BinaryOp::Min, x1(), Expr::Var(2)),
            reals(2),
            Domain::AllReals,
            Member,
            "minimum",
        ),
        entry(
            "max_2",
            Expr::binary(BinaryOp::Max, x1(), Expr::Var(2)),
            reals(2),
            Domain::AllReals,
            Member,
            "maximum",
        ),
        entry(
            "median_3",
            Expr::Call(Builtin::Median, (1..=3).map(Expr::Var).collect()),
            reals(3),
            Domain::AllReals,
            Member,
            "median of three",
        ),
        entry(
            "succ",
            parse("x1 + 1", 1).expect("literal"),
            reals(1),
            Domain::AllReals,
            Fails,
            "f(f(x)) = x + 2",
        ),
        entry(
            "double",
            parse("2 * x1", 1).expect("literal"),
            DomainSignature::univariate(unit),
            Domain::closed(0.0, 2.0).expect("valid interval"),
            Undefined,
            "2x leaves [0, 1] for x > 0.5",
        ),
        entry(
            "sum_2",
            parse("x1 + x2", 2).expect("literal"),
            reals(2),
            Domain::AllReals,
            Fails,
            "t + t = 2t",
        ),
        entry(
            "product_2",
            parse("x1 * x2", 2).expect("literal"),
            reals(2),
            Domain::AllReals,
            Fails,
            "t * t != t",
        ),
    ]);
    out
}

pub fn lookup(name: &str) -> Option<CatalogEntry> {
    catalog().into_iter().find(|e| e.def.name == name)
}
