use crate::expr::{BinOp, Expr};

use super::Bindings;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("real power undefined: {0}")]
    DomainError(&'static str),
    #[error("unbound variable {0}")]
    UnboundVariable(String),
}

pub(crate) fn pow(base: f64, exp: f64) -> Result<f64, EvalError> {
    if base == 0.0 && exp < 0.0 {
        return Err(EvalError::DivisionByZero);
    }
    if base < 0.0 && exp.fract() != 0.0 {
        return Err(EvalError::DomainError("negative base with non-integer exponent"));
    }
    let v = base.powf(exp);
    if !v.is_finite() {
        return Err(EvalError::DomainError("overflow"));
    }
    Ok(v)
}

pub(crate) fn apply(op: BinOp, a: f64, b: f64) -> Result<f64, EvalError> {
    match op {
        BinOp::Add => Ok(a + b),
        BinOp::Sub => Ok(a - b),
        BinOp::Mul => Ok(a * b),
        BinOp::Div if b == 0.0 => Err(EvalError::DivisionByZero),
        BinOp::Div => Ok(a / b),
        BinOp::Pow => pow(a, b),
    }
}

pub fn evaluate(e: &Expr, b: &Bindings) -> Result<f64, EvalError> {
    match e {
        Expr::Const(c) => Ok(c.to_f64()),
        Expr::Given(i) => b
            .givens
            .get(i)
            .copied()
            .ok_or_else(|| EvalError::UnboundVariable(format!("n_{i}"))),
        Expr::Unknown(j) => b
            .unknowns
            .get(j)
            .copied()
            .ok_or_else(|| EvalError::UnboundVariable(format!("x_{j}"))),
        Expr::Bin(op, l, r) => apply(*op, evaluate(l, b)?, evaluate(r, b)?),
    }
}

/// Value together with the largest magnitude met along the way (leaves and
/// intermediate results). Rounding error of the value is proportional to the
/// latter, not to the value itself.
pub fn evaluate_with_magnitude(e: &Expr, b: &Bindings) -> Result<(f64, f64), EvalError> {
    match e {
        Expr::Bin(op, l, r) => {
            let (lv, lm) = evaluate_with_magnitude(l, b)?;
            let (rv, rm) = evaluate_with_magnitude(r, b)?;
            let v = apply(*op, lv, rv)?;
            Ok((v, lm.max(rm).max(v.abs())))
        }
        leaf => evaluate(leaf, b).map(|v| (v, v.abs())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::infix::parse_expr;
    use std::collections::BTreeMap;

    fn eval(s: &str, givens: &[f64], unknowns: &[(u32, f64)]) -> Result<f64, EvalError> {
        let b = Bindings::from_givens(givens).with_unknowns(unknowns.iter().copied().collect::<BTreeMap<_, _>>());
        evaluate(&parse_expr(s).unwrap(), &b)
    }

    #[test]
    fn arithmetic() {
        assert_eq!(eval("n1 + n2", &[2.0, 3.0], &[]), Ok(5.0));
        assert_eq!(eval("n1 - n2 * 2 ^ 3 / 4", &[10.0, 1.0], &[]), Ok(8.0));
        assert_eq!(eval("-n1", &[2.5], &[]), Ok(-2.5));
        assert_eq!(eval("(-2) ^ 3", &[], &[]), Ok(-8.0));
        assert_eq!(eval("4 ^ 0.5", &[], &[]), Ok(2.0));
    }

    #[test]
    fn magnitude_tracks_intermediates() {
        let b = Bindings::from_givens(&[1000.0, 1000.0]);
        let (v, m) = evaluate_with_magnitude(&parse_expr("n1 * 2 - n2 * 2").unwrap(), &b).unwrap();
        assert_eq!((v, m), (0.0, 2000.0));
    }

    #[test]
    fn errors() {
        assert_eq!(eval("n1 / x1", &[6.0], &[(1, 0.0)]), Err(EvalError::DivisionByZero));
        assert!(matches!(eval("(-2) ^ 0.5", &[], &[]), Err(EvalError::DomainError(_))));
        assert_eq!(eval("0 ^ (-1)", &[], &[]), Err(EvalError::DivisionByZero));
        assert_eq!(eval("n2 + 1", &[1.0], &[]), Err(EvalError::UnboundVariable("n_2".into())));
        assert_eq!(eval("x3", &[], &[]), Err(EvalError::UnboundVariable("x_3".into())));
    }

    #[test]
    fn solution_form_pair_agrees() {
        // n1 / x1 = n2 with n1 = 6, n2 = 2 has x1 = 3
        assert_eq!(eval("n1 / x1", &[6.0, 2.0], &[(1, 3.0)]), Ok(2.0));
        assert_eq!(eval("n1 / n2", &[6.0, 2.0], &[]), Ok(3.0));
    }
}
