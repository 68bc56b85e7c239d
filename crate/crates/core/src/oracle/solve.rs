//! Solving equation sets once the given variables are bound.
//!
//! Systems that are linear in the unknowns are solved by Gaussian
//! elimination with partial pivoting. A single nonlinear equation in a
//! single unknown is handled by a bracketed root search over a fixed grid:
//! `0` and `±10^(k/40)` for `k = -240..=240`, i.e. magnitudes `1e-6..1e6`.
//! Sign changes between neighbouring grid points are refined by bisection
//! and kept only if the residual there is small, which filters poles.
//! Anything else is inconclusive.

use std::collections::BTreeMap;

use crate::expr::{BinOp, EquationSet, Expr};

use super::eval::{self, evaluate, EvalError};
use super::{close, Assignment, Bindings, OracleConfig};

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum SolveError {
    #[error("system is singular or inconsistent")]
    NotSolvable,
    #[error("cannot solve: {0}")]
    Inconclusive(String),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// `coeffs · x + constant`. `coeffs` is `None` for subtrees free of
/// unknowns, which keeps the common givens-only subtrees allocation free.
#[derive(Clone, Debug)]
struct Linear {
    /// Present iff the subtree depends structurally on an unknown
    /// (coefficients may still cancel to zero).
    coeffs: Option<Vec<f64>>,
    constant: f64,
}

impl Linear {
    fn constant(v: f64) -> Self {
        Linear { coeffs: None, constant: v }
    }

    fn depends(&self) -> bool {
        self.coeffs.is_some()
    }

    fn scale(mut self, k: f64) -> Self {
        if let Some(c) = &mut self.coeffs {
            c.iter_mut().for_each(|c| *c *= k);
        }
        self.constant *= k;
        self
    }

    fn combine(mut self, other: Linear, sign: f64) -> Self {
        self.coeffs = match (self.coeffs, other.coeffs) {
            (Some(mut a), Some(b)) => {
                a.iter_mut().zip(&b).for_each(|(a, b)| *a += sign * b);
                Some(a)
            }
            (Some(a), None) => Some(a),
            (None, Some(mut b)) => {
                b.iter_mut().for_each(|b| *b *= sign);
                Some(b)
            }
            (None, None) => None,
        };
        self.constant += sign * other.constant;
        self
    }

    /// Coefficients padded out to `m` unknowns.
    fn row(self, m: usize) -> Vec<f64> {
        self.coeffs.unwrap_or_else(|| vec![0.0; m])
    }
}

fn linearize(e: &Expr, givens: &Bindings, m: usize) -> Result<Option<Linear>, EvalError> {
    Ok(match e {
        Expr::Unknown(j) => {
            let mut coeffs = vec![0.0; m];
            coeffs[*j as usize - 1] = 1.0;
            Some(Linear { coeffs: Some(coeffs), constant: 0.0 })
        }
        Expr::Const(_) | Expr::Given(_) => Some(Linear::constant(evaluate(e, givens)?)),
        Expr::Bin(op, l, r) => {
            let (Some(a), Some(b)) = (linearize(l, givens, m)?, linearize(r, givens, m)?) else {
                return Ok(None);
            };
            if !a.depends() && !b.depends() {
                return Ok(Some(Linear::constant(eval::apply(*op, a.constant, b.constant)?)));
            }
            match op {
                BinOp::Add => Some(a.combine(b, 1.0)),
                BinOp::Sub => Some(a.combine(b, -1.0)),
                BinOp::Mul if a.depends() && b.depends() => None,
                BinOp::Mul if a.depends() => Some(a.scale(b.constant)),
                BinOp::Mul => Some(b.scale(a.constant)),
                BinOp::Div if b.depends() => None,
                BinOp::Div if b.constant == 0.0 => return Err(EvalError::DivisionByZero),
                BinOp::Div => Some(a.scale(1.0 / b.constant)),
                BinOp::Pow => None,
            }
        }
    })
}

/// `matrix · x = rhs`, one row per equation and one column per unknown.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearSystem {
    pub matrix: Vec<Vec<f64>>,
    pub rhs: Vec<f64>,
}

/// Coefficients of the system with givens bound, or `None` if some equation
/// is not linear in the unknowns.
pub fn linear_system(set: &EquationSet, givens: &Bindings) -> Result<Option<LinearSystem>, EvalError> {
    let m = set.unknown_count() as usize;
    let mut matrix = Vec::with_capacity(set.len());
    let mut rhs = Vec::with_capacity(set.len());
    for eq in set {
        let (Some(l), Some(r)) = (linearize(&eq.lhs, givens, m)?, linearize(&eq.rhs, givens, m)?) else {
            return Ok(None);
        };
        let residual = l.combine(r, -1.0);
        rhs.push(-residual.constant);
        matrix.push(residual.row(m));
    }
    Ok(Some(LinearSystem { matrix, rhs }))
}

/// Unique solution of a (possibly non-square) linear system.
fn eliminate(sys: &LinearSystem) -> Option<Vec<f64>> {
    let rows = sys.matrix.len();
    let cols = sys.matrix.first().map_or(0, Vec::len);
    let mut a: Vec<Vec<f64>> = sys
        .matrix
        .iter()
        .zip(&sys.rhs)
        .map(|(row, b)| row.iter().copied().chain(std::iter::once(*b)).collect())
        .collect();
    let scale = a
        .iter()
        .flat_map(|row| row[..cols].iter())
        .fold(0.0f64, |acc, v| acc.max(v.abs()));
    if scale == 0.0 || rows < cols {
        return None;
    }
    let eps = scale * 1e-10;
    for col in 0..cols {
        let pivot = (col..rows).max_by(|&p, &q| a[p][col].abs().total_cmp(&a[q][col].abs()))?;
        if a[pivot][col].abs() <= eps {
            return None;
        }
        a.swap(col, pivot);
        for r in 0..rows {
            if r == col {
                continue;
            }
            let f = a[r][col] / a[col][col];
            if f != 0.0 {
                let (pivot_row, row) = if r < col {
                    let (top, bottom) = a.split_at_mut(col);
                    (&bottom[0], &mut top[r])
                } else {
                    let (top, bottom) = a.split_at_mut(r);
                    (&top[col], &mut bottom[0])
                };
                for (x, p) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                    *x -= f * p;
                }
            }
        }
    }
    // leftover rows must reduce to 0 = 0
    let rhs_scale = sys.rhs.iter().fold(scale, |acc, v| acc.max(v.abs()));
    if a[cols..].iter().any(|row| row[cols].abs() > rhs_scale * 1e-9) {
        return None;
    }
    Some((0..cols).map(|c| a[c][cols] / a[c][c]).collect())
}

fn root_grid() -> Vec<f64> {
    let mut grid: Vec<f64> = (-240..=240).map(|k| 10f64.powf(k as f64 / 40.0)).collect();
    let negative: Vec<f64> = grid.iter().rev().map(|v| -v).collect();
    grid.insert(0, 0.0);
    let mut out = negative;
    out.extend(grid);
    out
}

fn single_unknown_roots(set: &EquationSet, givens: &Bindings, tol: f64) -> Vec<f64> {
    let eq = &set.equations()[0];
    let j = *set.unknowns().first().expect("sets have an unknown");
    let sides = |x: f64| -> Option<(f64, f64)> {
        let b = Bindings { givens: givens.givens.clone(), unknowns: BTreeMap::from([(j, x)]) };
        let l = evaluate(&eq.lhs, &b).ok()?;
        let r = evaluate(&eq.rhs, &b).ok()?;
        (l.is_finite() && r.is_finite()).then_some((l, r))
    };
    let f = |x: f64| sides(x).map(|(l, r)| l - r);
    let accept = |x: f64| sides(x).is_some_and(|(l, r)| close(l, r, l.abs().max(r.abs()), tol));

    let mut roots: Vec<f64> = Vec::new();
    let mut push = |x: f64| {
        if !roots.iter().any(|&r| (r - x).abs() <= 1e-9 * r.abs().max(x.abs()).max(1e-9)) {
            roots.push(x);
        }
    };
    let grid = root_grid();
    let values: Vec<Option<f64>> = grid.iter().map(|&x| f(x)).collect();
    for k in 0..grid.len() {
        if values[k] == Some(0.0) {
            push(grid[k]);
        }
        if k + 1 == grid.len() {
            break;
        }
        let (Some(fa), Some(fb)) = (values[k], values[k + 1]) else { continue };
        if fa == 0.0 || fb == 0.0 || (fa < 0.0) == (fb < 0.0) {
            continue;
        }
        let (mut lo, mut hi, mut flo) = (grid[k], grid[k + 1], fa);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            match f(mid) {
                Some(0.0) => {
                    lo = mid;
                    hi = mid;
                    break;
                }
                Some(fm) if (fm < 0.0) == (flo < 0.0) => {
                    lo = mid;
                    flo = fm;
                }
                Some(_) => hi = mid,
                None => break,
            }
        }
        let x = if f(lo).map(f64::abs) <= f(hi).map(f64::abs) { lo } else { hi };
        if accept(x) {
            push(x);
        }
    }
    roots
}

/// All solutions of `set` with the given variables bound.
pub fn solve_system(set: &EquationSet, givens: &Bindings, cfg: &OracleConfig) -> Result<Vec<Assignment>, SolveError> {
    let m = set.unknown_count();
    if let Some(sys) = linear_system(set, givens)? {
        let x = eliminate(&sys).ok_or(SolveError::NotSolvable)?;
        return Ok(vec![x.into_iter().enumerate().map(|(k, v)| (k as u32 + 1, v)).collect()]);
    }
    if m == 1 && set.len() == 1 {
        let roots = single_unknown_roots(set, givens, cfg.solution_tol);
        if roots.is_empty() {
            return Err(SolveError::Inconclusive("no real root found on the search grid".into()));
        }
        return Ok(roots.into_iter().map(|x| BTreeMap::from([(1, x)])).collect());
    }
    Err(SolveError::Inconclusive(format!(
        "nonlinear system in {m} unknowns"
    )))
}

/// Answer for a record: the solution(s) at the record's own given values.
pub fn compute_answer(set: &EquationSet, givens: &Bindings, cfg: &OracleConfig) -> Result<Vec<Assignment>, SolveError> {
    solve_system(set, givens, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::infix::parse_equation;

    fn set(eqs: &[&str]) -> EquationSet {
        EquationSet::new(eqs.iter().map(|s| parse_equation(s).unwrap()).collect()).unwrap()
    }

    fn solve(eqs: &[&str], givens: &[f64]) -> Result<Vec<Assignment>, SolveError> {
        solve_system(&set(eqs), &Bindings::from_givens(givens), &OracleConfig::default())
    }

    fn approx(a: &Assignment, expected: &[f64]) -> bool {
        a.len() == expected.len()
            && a.values().zip(expected).all(|(x, e)| (x - e).abs() <= 1e-9 * e.abs().max(1.0))
    }

    #[test]
    fn two_by_two() {
        let sols = solve(&["x_1 + x_2 = n_1", "x_1 - x_2 = n_2"], &[10.0, 2.0]).unwrap();
        assert_eq!(sols.len(), 1);
        assert!(approx(&sols[0], &[6.0, 4.0]));
    }

    #[test]
    fn answer_of_simple_sum() {
        let s = set(&["x_1 = n_1 + n_2"]);
        let sols = compute_answer(&s, &Bindings::from_givens(&[300.0, 400.0]), &OracleConfig::default()).unwrap();
        assert!(approx(&sols[0], &[700.0]));
    }

    #[test]
    fn singular_and_inconsistent() {
        assert_eq!(solve(&["n_1 * x_1 = n_2"], &[0.0, 3.0]), Err(SolveError::NotSolvable));
        assert_eq!(solve(&["x_1 + x_2 = n_1", "n_2 * x_1 + n_2 * x_2 = n_3"], &[1.0, 2.0, 3.0]), Err(SolveError::NotSolvable));
        assert_eq!(solve(&["x_1 + x_2 = n_1"], &[1.0]), Err(SolveError::NotSolvable));
        // overdetermined but consistent
        let sols = solve(&["x_1 = n_1", "n_2 * x_1 = n_3"], &[2.0, 3.0, 6.0]).unwrap();
        assert!(approx(&sols[0], &[2.0]));
        assert_eq!(solve(&["x_1 = n_1", "n_2 * x_1 = n_3"], &[2.0, 3.0, 7.0]), Err(SolveError::NotSolvable));
    }

    #[test]
    fn linear_detection() {
        let g = Bindings::from_givens(&[2.0, 3.0]);
        assert!(linear_system(&set(&["x_1 / n_1 + n_2 ^ 2 * x_1 = 1"]), &g).unwrap().is_some());
        assert!(linear_system(&set(&["x_1 * x_2 = n_1", "x_2 = 1"]), &g).unwrap().is_none());
        assert!(linear_system(&set(&["n_1 / x_1 = n_2"]), &g).unwrap().is_none());
        assert!(linear_system(&set(&["x_1 ^ 2 = n_1"]), &g).unwrap().is_none());
        assert_eq!(
            linear_system(&set(&["x_1 / (n_1 - n_1) = 1"]), &g),
            Err(EvalError::DivisionByZero)
        );
        let sys = linear_system(&set(&["n_1 * x_1 - x_2 + n_2 = x_2"]), &g).unwrap().unwrap();
        assert_eq!(sys.matrix, vec![vec![2.0, -2.0]]);
        assert_eq!(sys.rhs, vec![-3.0]);
    }

    #[test]
    fn nonlinear_single_unknown_by_root_search() {
        let sols = solve(&["n_1 / x_1 = n_2"], &[6.0, 2.0]).unwrap();
        assert_eq!(sols.len(), 1, "{sols:?}");
        assert!(approx(&sols[0], &[3.0]));

        let mut roots: Vec<f64> = solve(&["x_1 ^ 2 = n_1"], &[9.0]).unwrap().iter().map(|a| a[&1]).collect();
        roots.sort_by(f64::total_cmp);
        assert_eq!(roots.len(), 2);
        assert!((roots[0] + 3.0).abs() < 1e-9 && (roots[1] - 3.0).abs() < 1e-9);

        assert!(matches!(solve(&["x_1 ^ 2 = 0 - n_1"], &[9.0]), Err(SolveError::Inconclusive(_))));
    }

    #[test]
    fn nonlinear_multi_unknown_is_inconclusive() {
        assert!(matches!(
            solve(&["x_1 * x_2 = n_1", "x_1 + x_2 = n_2"], &[6.0, 5.0]),
            Err(SolveError::Inconclusive(_))
        ));
    }
}
