//! Seeded random problems for tests, benches and the acceptance suite.
//!
//! Systems are linear in the unknowns, have no unknowns in denominators and
//! are nonsingular at the record's givens and at a handful of random draws.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::canon::canonicalize;
use crate::code::ControlCode;
use crate::expr::{BinOp, Equation, EquationSet, Expr};
use crate::oracle::{linear_system, solve_system, Bindings, OracleConfig};
use crate::pipeline::MwpRecord;
use crate::transforms::{self, generate_all};

#[derive(Clone, Copy, Debug)]
pub struct SynthConfig {
    pub max_unknowns: u32,
    pub max_givens: u32,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig { max_unknowns: 3, max_givens: 5 }
    }
}

fn given_leaf(rng: &mut ChaCha8Rng, k: u32) -> Expr {
    if rng.random_bool(0.2) {
        Expr::int(rng.random_range(2..=9))
    } else {
        Expr::given(rng.random_range(1..=k))
    }
}

/// Expression over givens and small integers. Divisors are single leaves,
/// which the oracle's sampling range keeps away from zero.
fn given_expr(rng: &mut ChaCha8Rng, k: u32, depth: u32) -> Expr {
    if depth == 0 || rng.random_bool(0.4) {
        return given_leaf(rng, k);
    }
    let op = [BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Div][rng.random_range(0..4)];
    let left = given_expr(rng, k, depth - 1);
    let right = if op == BinOp::Div { given_leaf(rng, k) } else { given_expr(rng, k, depth - 1) };
    // `a - a` and `a / a` are constants that hide later corruptions
    let op = match op {
        BinOp::Sub if left == right => BinOp::Add,
        BinOp::Div if left == right => BinOp::Mul,
        op => op,
    };
    Expr::bin(op, left, right)
}

fn term(rng: &mut ChaCha8Rng, k: u32, j: u32) -> Expr {
    let x = Expr::unknown(j);
    match rng.random_range(0..4) {
        0 => x,
        1 => Expr::mul(given_expr(rng, k, 1), x),
        2 => Expr::mul(x, given_leaf(rng, k)),
        _ => Expr::div(x, given_leaf(rng, k)),
    }
}

fn linear_equation(rng: &mut ChaCha8Rng, k: u32, m: u32, must: u32) -> Equation {
    let mut vars: Vec<u32> = (1..=m).filter(|&j| j == must || rng.random_bool(0.6)).collect();
    vars.shuffle(rng);
    let mut lhs = term(rng, k, vars[0]);
    for &j in &vars[1..] {
        let t = term(rng, k, j);
        lhs = if rng.random_bool(0.7) { Expr::add(lhs, t) } else { Expr::sub(lhs, t) };
    }
    let rhs = given_expr(rng, k, 2);
    if rng.random_bool(0.25) {
        Equation::new(rhs, lhs)
    } else {
        Equation::new(lhs, rhs)
    }
}

fn draw_givens(rng: &mut ChaCha8Rng, k: u32) -> Vec<f64> {
    (0..k).map(|_| rng.random_range(2..=60) as f64).collect()
}

/// Every unknown that occurs in an equation has a nonzero coefficient there,
/// so `sol` never divides by a coefficient that cancels, as in `(n_1 - n_1) * x_1`.
fn coefficients_nonvanishing(set: &EquationSet, givens: &Bindings) -> bool {
    let Ok(Some(sys)) = linear_system(set, givens) else { return false };
    set.equations().iter().zip(&sys.matrix).all(|(eq, row)| {
        let scale = row.iter().fold(0.0f64, |a, c| a.max(c.abs()));
        eq.unknowns().iter().all(|&j| row[j as usize - 1].abs() > 1e-9 * scale)
    })
}

fn uniquely_solvable(set: &EquationSet, givens: &[f64], cfg: &OracleConfig) -> Option<Vec<f64>> {
    let givens = Bindings::from_givens(givens);
    if !coefficients_nonvanishing(set, &givens) {
        return None;
    }
    match solve_system(set, &givens, cfg) {
        Ok(sols) if sols.len() == 1 => {
            let values: Vec<f64> = sols[0].values().copied().collect();
            values.iter().all(|v| v.is_finite() && v.abs() < 1e9).then_some(values)
        }
        _ => None,
    }
}

fn well_posed(rng: &mut ChaCha8Rng, set: &EquationSet, givens: &[f64], cfg: &OracleConfig) -> Option<Vec<f64>> {
    let answers = uniquely_solvable(set, givens, cfg)?;
    for _ in 0..8 {
        let sample: Vec<f64> = (0..givens.len()).map(|_| rng.random_range(cfg.range.0..cfg.range.1)).collect();
        uniquely_solvable(set, &sample, cfg)?;
    }
    Some(answers)
}

fn text_for(k: u32, m: u32) -> String {
    let mentions: Vec<String> = (1..=k).map(|i| format!("n_{i}")).collect();
    format!("Using the values {}, find {} unknown quantities.", mentions.join(" and "), m)
}

/// One random linear problem. Retries until the system is well posed.
pub fn linear_record(rng: &mut ChaCha8Rng, id: &str, cfg: SynthConfig) -> MwpRecord {
    let oracle = OracleConfig::default();
    loop {
        let m = rng.random_range(1..=cfg.max_unknowns);
        let k = rng.random_range(1..=cfg.max_givens);
        let eqs: Vec<Equation> = (1..=m).map(|j| linear_equation(rng, k, m, j)).collect();
        let Ok(set) = EquationSet::new(eqs) else { continue };
        // every n_i has to be used for the text to line up with the givens
        if set.givens().len() != k as usize {
            continue;
        }
        let givens = draw_givens(rng, k);
        if let Some(answers) = well_posed(rng, &set, &givens, &oracle) {
            let (record, _) = MwpRecord::new(id.to_string(), text_for(k, m), givens, set.into_equations(), Some(answers))
                .expect("generated records are valid");
            return record;
        }
    }
}

pub fn linear_corpus(n: usize, seed: u64) -> Vec<MwpRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|i| linear_record(&mut rng, &format!("lin{i}"), SynthConfig::default())).collect()
}

/// Problems on which every transform changes the canonical set, so each
/// yields all six codes.
pub fn all_codes_corpus(n: usize, seed: u64) -> Vec<MwpRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cfg = SynthConfig { max_unknowns: 3, max_givens: 5 };
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let r = linear_record(&mut rng, &format!("all{}", out.len()), cfg);
        if generate_all(&canonicalize(&r.equations), &ControlCode::TRANSFORMS).len() == ControlCode::ALL.len() {
            out.push(r);
        }
    }
    out
}

/// Problems already written as `x_j = <givens only>`, on which `sol` never
/// applies.
pub fn solution_form_corpus(n: usize, seed: u64) -> Vec<MwpRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            let m = rng.random_range(1..=3);
            let k = rng.random_range(1..=4);
            let eqs = (1..=m).map(|j| Equation::new(Expr::unknown(j), given_expr(&mut rng, k, 2))).collect();
            let set = EquationSet::new(eqs).expect("unknowns 1..=m");
            let givens = draw_givens(&mut rng, k);
            MwpRecord::new(format!("sol{i}"), text_for(k, m), givens, set.into_equations(), None)
                .expect("generated records are valid")
                .0
        })
        .collect()
}

fn flip(op: BinOp) -> BinOp {
    match op {
        BinOp::Add => BinOp::Sub,
        BinOp::Sub => BinOp::Add,
        BinOp::Mul => BinOp::Div,
        BinOp::Div => BinOp::Mul,
        BinOp::Pow => BinOp::Pow,
    }
}

fn internal_nodes(e: &Expr, out: &mut usize) {
    if let Expr::Bin(_, l, r) = e {
        *out += 1;
        internal_nodes(l, out);
        internal_nodes(r, out);
    }
}

/// Rewrites the `target`-th internal node (pre-order) with `f`.
fn rewrite_nth(e: &Expr, target: &mut usize, f: &mut impl FnMut(BinOp, &Expr, &Expr) -> Expr) -> Expr {
    match e {
        Expr::Bin(op, l, r) => {
            if *target == 0 {
                *target = usize::MAX;
                return f(*op, l, r);
            }
            *target -= 1;
            let l2 = rewrite_nth(l, target, f);
            let r2 = rewrite_nth(r, target, f);
            Expr::bin(*op, l2, r2)
        }
        leaf => leaf.clone(),
    }
}

/// A small semantic break: one operator flipped (`+`/`-`, `*`/`/`) or the
/// operands of one `-` or `/` swapped. Returns `None` when the set has no
/// operator to break.
pub fn corrupt(set: &EquationSet, rng: &mut ChaCha8Rng) -> Option<EquationSet> {
    let counts: Vec<usize> = set
        .equations()
        .iter()
        .map(|eq| {
            let mut n = 0;
            internal_nodes(&eq.lhs, &mut n);
            internal_nodes(&eq.rhs, &mut n);
            n
        })
        .collect();
    let total: usize = counts.iter().sum();
    if total == 0 {
        return None;
    }
    let mut pick = rng.random_range(0..total);
    let swap = rng.random_bool(0.3);
    let mut eqs = set.equations().to_vec();
    for (eq, &n) in eqs.iter_mut().zip(&counts) {
        if pick >= n {
            pick -= n;
            continue;
        }
        let mut f = |op: BinOp, l: &Expr, r: &Expr| {
            if swap && matches!(op, BinOp::Sub | BinOp::Div) && l != r {
                Expr::bin(op, r.clone(), l.clone())
            } else {
                Expr::bin(flip(op), l.clone(), r.clone())
            }
        };
        let mut lhs_nodes = 0;
        internal_nodes(&eq.lhs, &mut lhs_nodes);
        *eq = if pick < lhs_nodes {
            Equation::new(rewrite_nth(&eq.lhs, &mut pick, &mut f), eq.rhs.clone())
        } else {
            let mut p = pick - lhs_nodes;
            Equation::new(eq.lhs.clone(), rewrite_nth(&eq.rhs, &mut p, &mut f))
        };
        break;
    }
    EquationSet::new(eqs).ok()
}

/// Transform output with a corruption applied, for checking that the oracle
/// notices. Picks the first code in `codes` that changes `set`.
pub fn corrupted_transform(
    set: &EquationSet,
    codes: &[ControlCode],
    rng: &mut ChaCha8Rng,
) -> Option<(ControlCode, EquationSet)> {
    let code = codes.iter().copied().find(|&c| transforms::apply(c, set).changed().is_some())?;
    let out = transforms::apply(code, set).into_changed()?;
    Some((code, corrupt(&out, rng)?))
}
