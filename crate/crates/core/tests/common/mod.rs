#![allow(dead_code)]

use eqaug::{BinOp, Equation, EquationSet, Expr, Number};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed};

pub const CASES: u32 = 1000;

/// Fixed seed so failures reproduce, no regression files written.
pub fn config() -> Config {
    Config {
        cases: CASES,
        rng_seed: RngSeed::Fixed(0x5eed_e9a7),
        failure_persistence: None,
        ..Config::default()
    }
}

pub fn constant() -> impl Strategy<Value = Expr> {
    prop_oneof![
        (1u32..100).prop_map(|v| Expr::int(v as i64)),
        (0u32..100, 1u32..100).prop_map(|(a, b)| Expr::constant(format!("{a}.{b:02}").parse::<Number>().unwrap())),
    ]
}

pub fn leaf(givens: u32, unknowns: u32) -> impl Strategy<Value = Expr> {
    prop_oneof![
        3 => (1..=givens).prop_map(Expr::given),
        3 => (1..=unknowns).prop_map(Expr::unknown),
        1 => constant(),
    ]
}

fn ops(with_pow: bool) -> Vec<BinOp> {
    let mut v = vec![BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Div];
    if with_pow {
        v.push(BinOp::Pow);
    }
    v
}

/// Random expression trees with unary minus; `with_pow` adds `^`.
pub fn expr(givens: u32, unknowns: u32, with_pow: bool) -> impl Strategy<Value = Expr> {
    let ops = ops(with_pow);
    leaf(givens, unknowns).prop_recursive(5, 32, 2, move |inner| {
        let ops = ops.clone();
        prop_oneof![
            6 => (proptest::sample::select(ops), inner.clone(), inner.clone())
                .prop_map(|(op, l, r)| Expr::bin(op, l, r)),
            1 => inner.prop_map(Expr::neg),
        ]
    })
}

pub fn equation(givens: u32, unknowns: u32, with_pow: bool) -> impl Strategy<Value = Equation> {
    (expr(givens, unknowns, with_pow), expr(givens, unknowns, with_pow)).prop_map(|(l, r)| Equation::new(l, r))
}

/// Valid sets: every unknown `x_1..x_m` appears somewhere.
pub fn equation_set(with_pow: bool) -> impl Strategy<Value = EquationSet> {
    (1u32..=3, 1usize..=3).prop_flat_map(move |(m, n)| {
        proptest::collection::vec(equation(5, m, with_pow), n)
            .prop_filter_map("unknowns must be x_1..x_m", |eqs| EquationSet::new(eqs).ok())
    })
}

/// Leaves in pre-order, printed.
pub fn leaves(set: &EquationSet) -> Vec<String> {
    let mut out = Vec::new();
    for eq in set {
        for side in [&eq.lhs, &eq.rhs] {
            side.for_each_leaf(&mut |l| out.push(l.to_string()));
        }
    }
    out.sort();
    out
}
