//! The five control-code rewrites.
//!
//! Every rewrite maps a (canonicalized) equation set to an equivalent one:
//!
//! * `add` / `mul` swap the two children of every `+` / `*` node once. The
//!   swaps at distinct nodes commute, so the result does not depend on the
//!   visiting order; [`Traversal`] exposes both orders for testing.
//! * `sol` rewrites each equation as `x_j = ...` by inverting the path from
//!   the root to a single occurrence of `x_j`.
//! * `equ` rotates the equation list right by one.
//! * `var` relabels unknowns cyclically so that new `x_1` stands where `x_m`
//!   stood and new `x_i` where `x_{i-1}` stood.

use std::collections::BTreeMap;

use crate::code::ControlCode;
use crate::expr::{BinOp, Equation, EquationSet, Expr};
use crate::oracle::Correspondence;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TransformOutcome {
    Changed(EquationSet),
    /// The rewrite produced a tree identical to its input.
    Unchanged,
}

impl TransformOutcome {
    fn from_result(input: &EquationSet, result: EquationSet) -> Self {
        if &result == input {
            TransformOutcome::Unchanged
        } else {
            TransformOutcome::Changed(result)
        }
    }

    pub fn changed(&self) -> Option<&EquationSet> {
        match self {
            TransformOutcome::Changed(s) => Some(s),
            TransformOutcome::Unchanged => None,
        }
    }

    pub fn into_changed(self) -> Option<EquationSet> {
        match self {
            TransformOutcome::Changed(s) => Some(s),
            TransformOutcome::Unchanged => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Traversal {
    PreOrder,
    PostOrder,
}

/// Swaps the children of every node carrying `op`.
pub fn swap_operands(e: &Expr, op: BinOp, order: Traversal) -> Expr {
    match order {
        Traversal::PostOrder => e.map_bottom_up(&mut |node| match node {
            Expr::Bin(o, l, r) if o == op => Expr::Bin(o, r, l),
            other => other,
        }),
        Traversal::PreOrder => {
            let mut out = e.clone();
            let mut stack: Vec<&mut Expr> = vec![&mut out];
            while let Some(node) = stack.pop() {
                if let Expr::Bin(o, l, r) = node {
                    if *o == op {
                        std::mem::swap(l, r);
                    }
                    // right pushed first so the left subtree is visited next
                    stack.push(r.as_mut());
                    stack.push(l.as_mut());
                }
            }
            out
        }
    }
}

fn map_set(set: &EquationSet, f: impl Fn(&Expr) -> Expr) -> EquationSet {
    EquationSet::from_vec_unchecked(set.equations().iter().map(|eq| eq.map_sides(&f)).collect())
}

pub fn apply_add(set: &EquationSet) -> TransformOutcome {
    let out = map_set(set, |e| swap_operands(e, BinOp::Add, Traversal::PreOrder));
    TransformOutcome::from_result(set, out)
}

pub fn apply_mul(set: &EquationSet) -> TransformOutcome {
    let out = map_set(set, |e| swap_operands(e, BinOp::Mul, Traversal::PreOrder));
    TransformOutcome::from_result(set, out)
}

fn is_solved_form(eq: &Equation) -> bool {
    matches!(eq.lhs, Expr::Unknown(j) if !eq.rhs.contains_unknown(j))
}

/// True if `x_j` occurs in `e` and every node above it is `+ - * /`.
fn reachable_through_field_ops(e: &Expr, j: u32) -> bool {
    match e {
        Expr::Unknown(k) => *k == j,
        Expr::Bin(BinOp::Pow, ..) => false,
        Expr::Bin(_, l, r) => {
            if l.contains_unknown(j) {
                reachable_through_field_ops(l, j)
            } else {
                reachable_through_field_ops(r, j)
            }
        }
        _ => false,
    }
}

/// Unknown that `sol` isolates in `eq`, if any: the lowest-indexed unknown
/// occurring exactly once and reachable through `+ - * /` only.
pub fn sol_target(eq: &Equation) -> Option<u32> {
    eq.unknowns().into_iter().find(|&j| {
        eq.count_unknown(j) == 1
            && (reachable_through_field_ops(&eq.lhs, j) || reachable_through_field_ops(&eq.rhs, j))
    })
}

/// Solves `side = other` for the single occurrence of `x_j` inside `side`.
fn invert_path(side: &Expr, other: Expr, j: u32) -> Expr {
    let mut side = side;
    let mut other = other;
    loop {
        match side {
            Expr::Unknown(_) => return other,
            Expr::Bin(op, l, r) => {
                let in_left = l.contains_unknown(j);
                let (next, sibling) = if in_left { (l, r) } else { (r, l) };
                let sibling = sibling.as_ref().clone();
                other = match (op, in_left) {
                    (BinOp::Add, _) => Expr::sub(other, sibling),
                    (BinOp::Mul, _) => Expr::div(other, sibling),
                    // a - b = o  =>  a = o + b  |  b = a - o
                    (BinOp::Sub, true) => Expr::add(other, sibling),
                    (BinOp::Sub, false) => Expr::sub(sibling, other),
                    // a / b = o  =>  a = o * b  |  b = a / o
                    (BinOp::Div, true) => Expr::mul(other, sibling),
                    (BinOp::Div, false) => Expr::div(sibling, other),
                    (BinOp::Pow, _) => unreachable!("sol_target excludes paths through ^"),
                };
                side = next;
            }
            _ => unreachable!("path ends at the target unknown"),
        }
    }
}

pub fn solve_for(eq: &Equation, j: u32) -> Equation {
    let (side, other) = if eq.lhs.contains_unknown(j) {
        (&eq.lhs, &eq.rhs)
    } else {
        (&eq.rhs, &eq.lhs)
    };
    Equation::new(Expr::Unknown(j), invert_path(side, other.clone(), j))
}

fn sol_equation(eq: &Equation) -> Equation {
    if is_solved_form(eq) {
        return eq.clone();
    }
    match sol_target(eq) {
        Some(j) => solve_for(eq, j),
        None => eq.clone(),
    }
}

pub fn apply_sol(set: &EquationSet) -> TransformOutcome {
    let out = EquationSet::from_vec_unchecked(set.equations().iter().map(sol_equation).collect());
    TransformOutcome::from_result(set, out)
}

pub fn apply_equ(set: &EquationSet) -> TransformOutcome {
    if set.len() < 2 {
        return TransformOutcome::Unchanged;
    }
    let mut eqs = set.equations().to_vec();
    eqs.rotate_right(1);
    TransformOutcome::from_result(set, EquationSet::from_vec_unchecked(eqs))
}

/// Old index -> new index under the `var` relabeling of `m` unknowns.
pub fn var_relabeling(m: u32) -> BTreeMap<u32, u32> {
    (1..=m).map(|j| (j, j % m + 1)).collect()
}

pub fn relabel_unknowns(e: &Expr, map: &BTreeMap<u32, u32>) -> Expr {
    e.map_bottom_up(&mut |node| match node {
        Expr::Unknown(j) => Expr::Unknown(map.get(&j).copied().unwrap_or(j)),
        other => other,
    })
}

pub fn apply_var(set: &EquationSet) -> TransformOutcome {
    let m = set.unknown_count();
    if m < 2 {
        return TransformOutcome::Unchanged;
    }
    let map = var_relabeling(m);
    TransformOutcome::from_result(set, map_set(set, |e| relabel_unknowns(e, &map)))
}

pub fn apply(code: ControlCode, set: &EquationSet) -> TransformOutcome {
    match code {
        ControlCode::Orig => TransformOutcome::Unchanged,
        ControlCode::Add => apply_add(set),
        ControlCode::Mul => apply_mul(set),
        ControlCode::Sol => apply_sol(set),
        ControlCode::Equ => apply_equ(set),
        ControlCode::Var => apply_var(set),
    }
}

/// How equations and unknowns of `apply(code, set)` line up with `set`.
pub fn correspondence(code: ControlCode, set: &EquationSet) -> Correspondence {
    let n = set.len();
    match code {
        ControlCode::Equ if n > 1 => Correspondence {
            equation_order: (0..n).map(|k| (k + n - 1) % n).collect(),
            unknown_map: BTreeMap::new(),
        },
        ControlCode::Var => Correspondence {
            equation_order: (0..n).collect(),
            unknown_map: var_relabeling(set.unknown_count()),
        },
        _ => Correspondence::identity(n),
    }
}

/// `(orig, set)` followed by every enabled code whose rewrite changes the
/// set, in the order orig, add, mul, sol, equ, var.
pub fn generate_all(set: &EquationSet, enabled: &[ControlCode]) -> Vec<(ControlCode, EquationSet)> {
    let mut out = vec![(ControlCode::Orig, set.clone())];
    for code in ControlCode::TRANSFORMS {
        if !enabled.contains(&code) {
            continue;
        }
        if let TransformOutcome::Changed(s) = apply(code, set) {
            out.push((code, s));
        }
    }
    out
}
