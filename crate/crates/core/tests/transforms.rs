mod common;

use eqaug::canon::canonicalize;
use eqaug::transforms::{
    apply, apply_add, apply_equ, apply_mul, apply_var, relabel_unknowns, swap_operands, var_relabeling, Traversal,
};
use eqaug::{BinOp, ControlCode, Equation, EquationSet, Expr, TransformOutcome};
use proptest::prelude::*;

fn step(set: &EquationSet, f: fn(&EquationSet) -> TransformOutcome) -> EquationSet {
    f(set).into_changed().unwrap_or_else(|| set.clone())
}

fn expr_has_op(e: &Expr, op: BinOp) -> bool {
    match e {
        Expr::Bin(o, l, r) => *o == op || expr_has_op(l, op) || expr_has_op(r, op),
        _ => false,
    }
}

fn has_op(set: &EquationSet, op: BinOp) -> bool {
    set.equations().iter().any(|e| expr_has_op(&e.lhs, op) || expr_has_op(&e.rhs, op))
}

proptest! {
    #![proptest_config(common::config())]

    #[test]
    fn add_and_mul_are_involutions(set in common::equation_set(true)) {
        for (f, op) in [(apply_add as fn(&EquationSet) -> TransformOutcome, BinOp::Add), (apply_mul, BinOp::Mul)] {
            let once = f(&set);
            prop_assert!(has_op(&set, op) || once.changed().is_none());
            let once = once.into_changed().unwrap_or_else(|| set.clone());
            prop_assert_eq!(step(&once, f), set.clone());
        }
    }

    #[test]
    fn swap_traversal_order_does_not_matter(eq in common::equation(4, 3, true), op in proptest::sample::select(BinOp::ALL.to_vec())) {
        for side in [&eq.lhs, &eq.rhs] {
            prop_assert_eq!(swap_operands(side, op, Traversal::PreOrder), swap_operands(side, op, Traversal::PostOrder));
        }
    }

    #[test]
    fn equ_cycles_with_period_n(set in common::equation_set(true)) {
        let mut cur = set.clone();
        for _ in 0..set.len() {
            cur = step(&cur, apply_equ);
        }
        prop_assert_eq!(&cur, &set);
        if set.len() >= 2 {
            let first = apply_equ(&set).into_changed();
            prop_assert_eq!(first.is_some(), set.equations().iter().any(|e| e != &set.equations()[0]));
        }
    }

    #[test]
    fn var_cycles_with_period_m(set in common::equation_set(true)) {
        let m = set.unknown_count();
        let mut cur = set.clone();
        for _ in 0..m {
            cur = step(&cur, apply_var);
        }
        prop_assert_eq!(&cur, &set);
        prop_assert_eq!(cur.unknowns(), set.unknowns());
    }

    #[test]
    fn canonicalize_is_idempotent_and_keeps_leaves(set in common::equation_set(true)) {
        let once = canonicalize(&set);
        prop_assert_eq!(canonicalize(&once), once.clone());
        prop_assert_eq!(common::leaves(&once), common::leaves(&set));
    }

    #[test]
    fn structural_transforms_keep_leaves(set in common::equation_set(true)) {
        let leaves = common::leaves(&set);
        for code in [ControlCode::Add, ControlCode::Mul, ControlCode::Equ] {
            if let Some(out) = apply(code, &set).into_changed() {
                prop_assert_eq!(common::leaves(&out), leaves.clone(), "{:?}", code);
            }
        }
        if let Some(out) = apply(ControlCode::Var, &set).into_changed() {
            let map = var_relabeling(set.unknown_count());
            let relabeled = EquationSet::new(
                set.equations().iter().map(|e| Equation::new(relabel_unknowns(&e.lhs, &map), relabel_unknowns(&e.rhs, &map))).collect(),
            ).unwrap();
            prop_assert_eq!(common::leaves(&out), common::leaves(&relabeled));
        }
    }

    #[test]
    fn sol_keeps_unknown_set_and_is_stable(set in common::equation_set(true)) {
        if let Some(out) = apply(ControlCode::Sol, &set).into_changed() {
            prop_assert_eq!(out.unknowns(), set.unknowns());
            prop_assert_eq!(out.len(), set.len());
            prop_assert!(apply(ControlCode::Sol, &out).changed().is_none());
        }
    }
}
