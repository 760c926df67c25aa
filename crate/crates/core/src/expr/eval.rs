use alloc::vec::Vec;

use thiserror::Error;

use super::{BinaryOp, Builtin, Expr, UnaryOp};
use crate::scalar::{real_to_i64, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("zero raised to a negative power")]
    ZeroToNegativePower,
    #[error("result is not a real number")]
    NonReal,
    #[error("result overflows binary64")]
    Overflow,
    #[error("clamp bounds are inverted")]
    InvertedClamp,
    #[error("expected {expected} arguments, got {got}")]
    ArgumentCount { expected: usize, got: usize },
    #[error("variable x{0} is not bound")]
    UnboundVariable(usize),
}

/// Evaluate `e` with `x_i = args[i - 1]`.
///
/// Integer inputs stay exact through `+ - * /` and non-negative integer
/// powers whenever the exact result is an `i64`; anything else is computed in
/// binary64.
pub fn eval(e: &Expr, args: &[Scalar]) -> Result<Scalar, EvalError> {
    match e {
        Expr::Var(i) => args
            .get(i.wrapping_sub(1))
            .copied()
            .ok_or(EvalError::UnboundVariable(*i)),
        Expr::Const(c) => Ok(*c),
        Expr::Unary(op, inner) => unary(*op, eval(inner, args)?),
        Expr::Binary(op, l, r) => binary(*op, eval(l, args)?, eval(r, args)?),
        Expr::Call(b, list) => {
            let values = list.iter().map(|a| eval(a, args)).collect::<Result<Vec<_>, _>>()?;
            builtin(*b, values)
        }
    }
}

fn real(v: f64) -> Result<Scalar, EvalError> {
    if v.is_nan() {
        Err(EvalError::NonReal)
    } else if v.is_infinite() {
        Err(EvalError::Overflow)
    } else {
        Ok(Scalar::Real(v))
    }
}

/// Integer-valued result of a rounding op; stays `Real` outside the `i64` range.
fn integral(v: f64) -> Scalar {
    real_to_i64(v).map_or(Scalar::Real(v), Scalar::Int)
}

fn unary(op: UnaryOp, v: Scalar) -> Result<Scalar, EvalError> {
    match (op, v) {
        (UnaryOp::Neg, Scalar::Int(i)) => Ok(i.checked_neg().map_or(Scalar::Real(-(i as f64)), Scalar::Int)),
        (UnaryOp::Neg, Scalar::Real(r)) => real(-r),
        (UnaryOp::Abs, Scalar::Int(i)) => Ok(i.checked_abs().map_or(Scalar::Real(-(i as f64)), Scalar::Int)),
        (UnaryOp::Abs, Scalar::Real(r)) => real(libm::fabs(r)),
        (UnaryOp::Floor | UnaryOp::Ceil | UnaryOp::Round, Scalar::Int(i)) => Ok(Scalar::Int(i)),
        (UnaryOp::Floor, Scalar::Real(r)) => Ok(integral(libm::floor(r))),
        (UnaryOp::Ceil, Scalar::Real(r)) => Ok(integral(libm::ceil(r))),
        (UnaryOp::Round, Scalar::Real(r)) => Ok(integral(libm::round(r))),
    }
}

fn binary(op: BinaryOp, a: Scalar, b: Scalar) -> Result<Scalar, EvalError> {
    use Scalar::Int;
    match op {
        BinaryOp::Add => match (a, b) {
            (Int(x), Int(y)) if x.checked_add(y).is_some() => Ok(Int(x + y)),
            _ => real(a.as_f64() + b.as_f64()),
        },
        BinaryOp::Sub => match (a, b) {
            (Int(x), Int(y)) if x.checked_sub(y).is_some() => Ok(Int(x - y)),
            _ => real(a.as_f64() - b.as_f64()),
        },
        BinaryOp::Mul => match (a, b) {
            (Int(x), Int(y)) if x.checked_mul(y).is_some() => Ok(Int(x * y)),
            _ => real(a.as_f64() * b.as_f64()),
        },
        BinaryOp::Div => {
            if b.as_f64() == 0.0 {
                return Err(EvalError::DivisionByZero);
            }
            match (a, b) {
                (Int(x), Int(y)) if x.checked_rem(y) == Some(0) => Ok(Int(x / y)),
                _ => real(a.as_f64() / b.as_f64()),
            }
        }
        BinaryOp::Min => Ok(if b.cmp_value(&a).is_lt() { b } else { a }),
        BinaryOp::Max => Ok(if b.cmp_value(&a).is_gt() { b } else { a }),
        BinaryOp::Pow => pow(a, b),
    }
}

fn pow(base: Scalar, exponent: Scalar) -> Result<Scalar, EvalError> {
    let (x, y) = (base.as_f64(), exponent.as_f64());
    if x == 0.0 && y < 0.0 {
        return Err(EvalError::ZeroToNegativePower);
    }
    if let (Scalar::Int(b), Scalar::Int(e)) = (base, exponent) {
        if let Some(v) = u32::try_from(e).ok().and_then(|e| b.checked_pow(e)) {
            return Ok(Scalar::Int(v));
        }
    }
    real(libm::pow(x, y))
}

fn builtin(b: Builtin, values: Vec<Scalar>) -> Result<Scalar, EvalError> {
    match b {
        Builtin::Mean => mean(&values),
        Builtin::Median => median(values),
        Builtin::Clamp => {
            let [v, lo, hi] = values[..] else {
                return Err(EvalError::ArgumentCount {
                    expected: 3,
                    got: values.len(),
                });
            };
            if lo.cmp_value(&hi).is_gt() {
                return Err(EvalError::InvertedClamp);
            }
            let v = binary(BinaryOp::Max, v, lo)?;
            binary(BinaryOp::Min, v, hi)
        }
    }
}

/// Arithmetic mean. Exact for integers when `n` divides the sum; otherwise a
/// compensated binary64 sum divided by `n`.
pub(crate) fn mean(values: &[Scalar]) -> Result<Scalar, EvalError> {
    let n = values.len();
    if n == 0 {
        return Err(EvalError::ArgumentCount { expected: 1, got: 0 });
    }
    let ints: Option<Vec<i64>> = values
        .iter()
        .map(|v| match v {
            Scalar::Int(i) => Some(*i),
            Scalar::Real(_) => None,
        })
        .collect();
    if let Some(ints) = ints {
        let sum: i128 = ints.iter().map(|&i| i as i128).sum();
        let n = n as i128;
        if sum % n == 0 {
            if let Ok(q) = i64::try_from(sum / n) {
                return Ok(Scalar::Int(q));
            }
        }
        return real(sum as f64 / n as f64);
    }
    let sum = neumaier_sum(values.iter().map(|v| v.as_f64()));
    real(sum / n as f64)
}

fn neumaier_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut carry = 0.0f64;
    for v in values {
        let t = sum + v;
        if libm::fabs(sum) >= libm::fabs(v) {
            carry += (sum - t) + v;
        } else {
            carry += (v - t) + sum;
        }
        sum = t;
    }
    sum + carry
}

fn median(mut values: Vec<Scalar>) -> Result<Scalar, EvalError> {
    let n = values.len();
    if n == 0 {
        return Err(EvalError::ArgumentCount { expected: 1, got: 0 });
    }
    values.sort_by(Scalar::cmp_value);
    if n % 2 == 1 {
        Ok(values[n / 2])
    } else {
        mean(&values[n / 2 - 1..=n / 2])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use alloc::vec;

    fn ev(src: &str, args: &[Scalar]) -> Result<Scalar, EvalError> {
        eval(&parse(src, args.len()).unwrap(), args)
    }

    fn ints(v: &[i64]) -> Vec<Scalar> {
        v.iter().copied().map(Scalar::Int).collect()
    }

    #[test]
    fn mean_of_three() {
        assert_eq!(ev("mean(x1,x2,x3)", &ints(&[1, 2, 3])), Ok(Scalar::Int(2)));
        assert_eq!(ev("(x1+x2+x3)/3", &ints(&[1, 2, 3])), Ok(Scalar::Int(2)));
    }

    #[test]
    fn constant_ignores_input() {
        assert_eq!(ev("7", &ints(&[100])), Ok(Scalar::Int(7)));
    }

    #[test]
    fn domain_errors() {
        assert_eq!(ev("x1/x2", &ints(&[1, 0])), Err(EvalError::DivisionByZero));
        assert_eq!(
            ev("x1/x2", &[Scalar::Real(1.0), Scalar::Real(-0.0)]),
            Err(EvalError::DivisionByZero)
        );
        assert_eq!(ev("0^(-1)", &[]), Err(EvalError::ZeroToNegativePower));
        assert_eq!(ev("(-8)^0.5", &[]), Err(EvalError::NonReal));
        assert_eq!(ev("10.0^400", &[]), Err(EvalError::Overflow));
        assert_eq!(ev("clamp(x1, 1, 0)", &ints(&[3])), Err(EvalError::InvertedClamp));
    }

    #[test]
    fn integer_exactness_and_promotion() {
        assert_eq!(ev("x1/2", &ints(&[4])), Ok(Scalar::Int(2)));
        assert_eq!(ev("x1/2", &ints(&[1])), Ok(Scalar::Real(0.5)));
        assert_eq!(ev("mean(x1,x2)", &ints(&[0, 1])), Ok(Scalar::Real(0.5)));
        assert_eq!(ev("x1^2", &ints(&[-3])), Ok(Scalar::Int(9)));
        assert_eq!(ev("2^(-1)", &[]), Ok(Scalar::Real(0.5)));
        assert_eq!(
            ev("x1*x1", &ints(&[i64::MAX])),
            Ok(Scalar::Real((i64::MAX as f64).powi(2)))
        );
        assert_eq!(ev("x1+1", &ints(&[i64::MAX])), Ok(Scalar::Real(i64::MAX as f64 + 1.0)));
        assert_eq!(ev("-x1", &ints(&[i64::MIN])), Ok(Scalar::Real(-(i64::MIN as f64))));
    }

    #[test]
    fn rounding_ops_return_integers() {
        assert_eq!(ev("floor(x1)", &[Scalar::Real(2.7)]), Ok(Scalar::Int(2)));
        assert_eq!(ev("ceil(x1)", &[Scalar::Real(2.1)]), Ok(Scalar::Int(3)));
        assert_eq!(ev("round(x1)", &[Scalar::Real(-2.5)]), Ok(Scalar::Int(-3)));
        assert_eq!(ev("floor(x1)", &[Scalar::Real(1e300)]), Ok(Scalar::Real(1e300)));
        assert_eq!(ev("abs(x1)", &ints(&[-4])), Ok(Scalar::Int(4)));
    }

    #[test]
    fn order_builtins() {
        let args = ints(&[5, -1, 3]);
        assert_eq!(ev("median(x1,x2,x3)", &args), Ok(Scalar::Int(3)));
        assert_eq!(ev("median(x1,x2)", &ints(&[1, 4])), Ok(Scalar::Real(2.5)));
        assert_eq!(ev("min(x1,x2)", &args[..2]), Ok(Scalar::Int(-1)));
        assert_eq!(ev("max(x1,x2)", &args[..2]), Ok(Scalar::Int(5)));
        assert_eq!(ev("clamp(x1, 0, 1)", &[Scalar::Real(1.5)]), Ok(Scalar::Int(1)));
        assert_eq!(ev("clamp(x1, 0, 1)", &[Scalar::Real(0.25)]), Ok(Scalar::Real(0.25)));
    }

    #[test]
    fn mean_of_equal_values_is_stable() {
        let t = Scalar::Real(0.1);
        for n in [2, 3, 7, 64, 1000] {
            let v = mean(&vec![t; n]).unwrap();
            let err = (v.as_f64() - 0.1).abs();
            assert!(err <= n as f64 * f64::EPSILON * 0.1, "n={n} err={err}");
        }
    }

    #[test]
    fn unbound_variable() {
        assert_eq!(eval(&Expr::Var(2), &ints(&[1])), Err(EvalError::UnboundVariable(2)));
    }
}
