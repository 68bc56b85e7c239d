//! Operand ordering for `+` and `*` chains.
//!
//! A chain is a maximal run of nested nodes sharing the same commutative
//! operator, e.g. `(a + b) + (c + d)` is one `+` chain with four operands.
//! Operands are sorted so variables appear in text order: operands holding a
//! given variable come first (by smallest `n_i`), then operands holding only
//! unknowns (by smallest `x_j`), then variable-free operands. Ties are broken
//! by the operand's prefix serialization. The sorted chain is rebuilt
//! left-deep, the shape the parser produces for `a + b + c`.

use std::cmp::Ordering;

use crate::expr::{BinOp, Equation, EquationSet, Expr};
use crate::prefix::expr_prefix_string;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Rank {
    Given(u32),
    Unknown(u32),
    Constant,
}

fn rank(e: &Expr) -> Rank {
    let mut min_given = None::<u32>;
    let mut min_unknown = None::<u32>;
    e.for_each_leaf(&mut |leaf| match leaf {
        Expr::Given(i) => min_given = Some(min_given.map_or(*i, |m| m.min(*i))),
        Expr::Unknown(j) => min_unknown = Some(min_unknown.map_or(*j, |m| m.min(*j))),
        _ => {}
    });
    match (min_given, min_unknown) {
        (Some(i), _) => Rank::Given(i),
        (None, Some(j)) => Rank::Unknown(j),
        (None, None) => Rank::Constant,
    }
}

fn collect_chain(e: Expr, op: BinOp, out: &mut Vec<Expr>) {
    match e {
        Expr::Bin(o, l, r) if o == op => {
            collect_chain(*l, op, out);
            collect_chain(*r, op, out);
        }
        other => out.push(other),
    }
}

fn canonical_expr(e: &Expr) -> Expr {
    match e {
        Expr::Bin(op @ (BinOp::Add | BinOp::Mul), ..) => {
            let mut operands = Vec::new();
            collect_chain(e.clone(), *op, &mut operands);
            let mut keyed: Vec<(Rank, String, Expr)> = operands
                .iter()
                .map(canonical_expr)
                .map(|c| (rank(&c), expr_prefix_string(&c), c))
                .collect();
            keyed.sort_by(|a, b| match a.0.cmp(&b.0) {
                Ordering::Equal => a.1.cmp(&b.1),
                ord => ord,
            });
            let mut it = keyed.into_iter().map(|(_, _, c)| c);
            let first = it.next().expect("a chain has at least two operands");
            it.fold(first, |acc, next| Expr::bin(*op, acc, next))
        }
        Expr::Bin(op, l, r) => Expr::bin(*op, canonical_expr(l), canonical_expr(r)),
        leaf => leaf.clone(),
    }
}

pub fn canonicalize_equation(eq: &Equation) -> Equation {
    eq.map_sides(canonical_expr)
}

/// Deterministic and idempotent; leaves `-`, `/` and `^` structure alone.
pub fn canonicalize(set: &EquationSet) -> EquationSet {
    EquationSet::from_vec_unchecked(set.equations().iter().map(canonicalize_equation).collect())
}
