//! Expression, equation and equation-set types.
//!
//! Every tree in this crate is an immutable value built from five binary
//! operators over three kinds of leaves: literal constants, given variables
//! `n_i` (numbers mentioned in the problem text) and unknowns `x_j`. Indices
//! start at 1 and follow order of first appearance in the source text.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// An exact decimal constant.
///
/// Values can only be built from decimal literals or integers, so the
/// denominator always has the form `2^a * 5^b` and the value has a finite
/// decimal rendering.
#[derive(Clone, Debug)]
pub struct Number {
    exact: BigRational,
    approx: f64,
}

impl Number {
    pub fn from_int(v: i64) -> Self {
        Self::from_rational(BigRational::from_integer(BigInt::from(v)))
    }

    pub fn zero() -> Self {
        Self::from_int(0)
    }

    fn from_rational(exact: BigRational) -> Self {
        let approx = exact.to_f64().unwrap_or(f64::NAN);
        Number { exact, approx }
    }

    pub fn exact(&self) -> &BigRational {
        &self.exact
    }

    pub fn to_f64(&self) -> f64 {
        self.approx
    }

    pub fn is_zero(&self) -> bool {
        self.exact.is_zero()
    }

    /// Canonical decimal rendering: no exponent, no trailing zeros, no
    /// trailing decimal point.
    pub fn to_decimal_string(&self) -> String {
        let numer = self.exact.numer();
        let denom = self.exact.denom();
        let mut scale = 0usize;
        let mut d = denom.clone();
        let ten = BigInt::from(10);
        let mut scaled = numer.abs();
        // Multiply through by 10 until the denominator divides evenly; the
        // constructor guarantees termination.
        while !d.is_one() {
            scaled *= &ten;
            scale += 1;
            let g = scaled.gcd(&d);
            scaled /= &g;
            d /= &g;
        }
        let digits = scaled.to_string();
        let mut out = String::new();
        if numer.is_negative() {
            out.push('-');
        }
        if scale == 0 {
            out.push_str(&digits);
            return out;
        }
        let padded = if digits.len() <= scale {
            format!("{}{}", "0".repeat(scale - digits.len() + 1), digits)
        } else {
            digits
        };
        let (int_part, frac_part) = padded.split_at(padded.len() - scale);
        let frac_part = frac_part.trim_end_matches('0');
        out.push_str(int_part);
        if !frac_part.is_empty() {
            out.push('.');
            out.push_str(frac_part);
        }
        out
    }
}

impl PartialEq for Number {
    fn eq(&self, other: &Self) -> bool {
        self.exact == other.exact
    }
}

impl Eq for Number {}

impl std::hash::Hash for Number {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.exact.hash(state);
    }
}

impl PartialOrd for Number {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Number {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.exact.cmp(&other.exact)
    }
}

impl fmt::Display for Number {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_decimal_string())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("invalid decimal literal {0:?}")]
pub struct InvalidNumber(pub String);

impl FromStr for Number {
    type Err = InvalidNumber;

    /// Accepts `digits` or `digits.digits`, nothing else.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || InvalidNumber(s.to_string());
        let (int_part, frac_part) = match s.split_once('.') {
            Some((i, f)) => (i, f),
            None => (s, ""),
        };
        let all_digits = |p: &str| p.bytes().all(|b| b.is_ascii_digit());
        if int_part.is_empty() || !all_digits(int_part) || !all_digits(frac_part) {
            return Err(bad());
        }
        if s.contains('.') && frac_part.is_empty() {
            return Err(bad());
        }
        let numer: BigInt = format!("{int_part}{frac_part}").parse().map_err(|_| bad())?;
        let denom = num_traits::pow(BigInt::from(10), frac_part.len());
        Ok(Self::from_rational(BigRational::new(numer, denom)))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    pub const ALL: [BinOp; 5] = [BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Div, BinOp::Pow];

    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Pow => "^",
        }
    }

    pub fn from_symbol(s: &str) -> Option<BinOp> {
        BinOp::ALL.into_iter().find(|op| op.symbol() == s)
    }
}

impl fmt::Display for BinOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// Expression tree node.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Expr {
    Const(Number),
    /// `n_i`, a number mentioned in the problem text.
    Given(u32),
    /// `x_j`, a quantity to solve for.
    Unknown(u32),
    Bin(BinOp, Box<Expr>, Box<Expr>),
}

// named constructors, not arithmetic on values
#[allow(clippy::should_implement_trait)]
impl Expr {
    pub fn constant(n: Number) -> Self {
        Expr::Const(n)
    }

    pub fn int(v: i64) -> Self {
        Expr::Const(Number::from_int(v))
    }

    pub fn given(i: u32) -> Self {
        assert!(i >= 1, "given-variable indices start at 1");
        Expr::Given(i)
    }

    pub fn unknown(j: u32) -> Self {
        assert!(j >= 1, "unknown indices start at 1");
        Expr::Unknown(j)
    }

    pub fn bin(op: BinOp, left: Expr, right: Expr) -> Self {
        Expr::Bin(op, Box::new(left), Box::new(right))
    }

    pub fn add(left: Expr, right: Expr) -> Self {
        Self::bin(BinOp::Add, left, right)
    }

    pub fn sub(left: Expr, right: Expr) -> Self {
        Self::bin(BinOp::Sub, left, right)
    }

    pub fn mul(left: Expr, right: Expr) -> Self {
        Self::bin(BinOp::Mul, left, right)
    }

    pub fn div(left: Expr, right: Expr) -> Self {
        Self::bin(BinOp::Div, left, right)
    }

    pub fn pow(left: Expr, right: Expr) -> Self {
        Self::bin(BinOp::Pow, left, right)
    }

    /// `0 - operand`, the desugared form of unary minus.
    pub fn neg(operand: Expr) -> Self {
        Self::sub(Expr::int(0), operand)
    }

    /// Returns the operand if this node is a desugared unary minus.
    pub fn as_negation(&self) -> Option<&Expr> {
        match self {
            Expr::Bin(BinOp::Sub, l, r) if matches!(l.as_ref(), Expr::Const(c) if c.is_zero()) => {
                Some(r)
            }
            _ => None,
        }
    }

    pub fn is_leaf(&self) -> bool {
        !matches!(self, Expr::Bin(..))
    }

    pub fn node_count(&self) -> usize {
        match self {
            Expr::Bin(_, l, r) => 1 + l.node_count() + r.node_count(),
            _ => 1,
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Expr::Bin(_, l, r) => 1 + l.depth().max(r.depth()),
            _ => 1,
        }
    }

    /// Visits leaves left to right.
    pub fn for_each_leaf<'a>(&'a self, f: &mut impl FnMut(&'a Expr)) {
        match self {
            Expr::Bin(_, l, r) => {
                l.for_each_leaf(f);
                r.for_each_leaf(f);
            }
            leaf => f(leaf),
        }
    }

    pub fn unknowns(&self) -> BTreeSet<u32> {
        let mut out = BTreeSet::new();
        self.for_each_leaf(&mut |e| {
            if let Expr::Unknown(j) = e {
                out.insert(*j);
            }
        });
        out
    }

    pub fn givens(&self) -> BTreeSet<u32> {
        let mut out = BTreeSet::new();
        self.for_each_leaf(&mut |e| {
            if let Expr::Given(i) = e {
                out.insert(*i);
            }
        });
        out
    }

    pub fn contains_unknown(&self, j: u32) -> bool {
        self.count_unknown(j) > 0
    }

    pub fn count_unknown(&self, j: u32) -> usize {
        let mut n = 0;
        self.for_each_leaf(&mut |e| {
            if *e == Expr::Unknown(j) {
                n += 1;
            }
        });
        n
    }

    pub fn has_any_unknown(&self) -> bool {
        match self {
            Expr::Unknown(_) => true,
            Expr::Bin(_, l, r) => l.has_any_unknown() || r.has_any_unknown(),
            _ => false,
        }
    }

    /// Rebuilds the tree bottom-up, applying `f` to every node after its
    /// children have been rebuilt.
    pub fn map_bottom_up(&self, f: &mut impl FnMut(Expr) -> Expr) -> Expr {
        let rebuilt = match self {
            Expr::Bin(op, l, r) => Expr::bin(*op, l.map_bottom_up(f), r.map_bottom_up(f)),
            leaf => leaf.clone(),
        };
        f(rebuilt)
    }
}

/// `lhs = rhs`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Equation {
    pub lhs: Expr,
    pub rhs: Expr,
}

impl Equation {
    pub fn new(lhs: Expr, rhs: Expr) -> Self {
        Equation { lhs, rhs }
    }

    pub fn unknowns(&self) -> BTreeSet<u32> {
        let mut u = self.lhs.unknowns();
        u.extend(self.rhs.unknowns());
        u
    }

    pub fn givens(&self) -> BTreeSet<u32> {
        let mut g = self.lhs.givens();
        g.extend(self.rhs.givens());
        g
    }

    pub fn count_unknown(&self, j: u32) -> usize {
        self.lhs.count_unknown(j) + self.rhs.count_unknown(j)
    }

    pub fn map_sides(&self, mut f: impl FnMut(&Expr) -> Expr) -> Equation {
        Equation::new(f(&self.lhs), f(&self.rhs))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum SetError {
    #[error("an equation set needs at least one equation")]
    Empty,
    #[error("equation {0} mentions no unknown")]
    NoUnknown(usize),
    #[error("unknown indices must be 1..=m without gaps, found {0:?}")]
    UnknownGap(Vec<u32>),
}

/// Ordered, nonempty list of equations whose unknowns are exactly `x_1..x_m`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EquationSet {
    equations: Vec<Equation>,
    /// Cached `m`; derived from `equations`, so the derives stay consistent.
    unknown_count: u32,
}

fn max_unknown(e: &Expr) -> u32 {
    match e {
        Expr::Unknown(j) => *j,
        Expr::Bin(_, l, r) => max_unknown(l).max(max_unknown(r)),
        _ => 0,
    }
}

impl EquationSet {
    pub fn new(equations: Vec<Equation>) -> Result<Self, SetError> {
        if equations.is_empty() {
            return Err(SetError::Empty);
        }
        let mut all = BTreeSet::new();
        for (k, eq) in equations.iter().enumerate() {
            let u = eq.unknowns();
            if u.is_empty() {
                return Err(SetError::NoUnknown(k));
            }
            all.extend(u);
        }
        let expected = 1..=all.len() as u32;
        if !all.iter().copied().eq(expected) {
            return Err(SetError::UnknownGap(all.into_iter().collect()));
        }
        Ok(EquationSet { unknown_count: all.len() as u32, equations })
    }

    /// Skips validation. Callers must preserve the set invariants.
    pub(crate) fn from_vec_unchecked(equations: Vec<Equation>) -> Self {
        debug_assert!(EquationSet::new(equations.clone()).is_ok());
        let unknown_count = equations.iter().map(|e| max_unknown(&e.lhs).max(max_unknown(&e.rhs))).max().unwrap_or(0);
        EquationSet { equations, unknown_count }
    }

    pub fn single(eq: Equation) -> Result<Self, SetError> {
        Self::new(vec![eq])
    }

    pub fn equations(&self) -> &[Equation] {
        &self.equations
    }

    pub fn len(&self) -> usize {
        self.equations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.equations.is_empty()
    }

    /// `m`, the number of distinct unknowns.
    pub fn unknown_count(&self) -> u32 {
        self.unknown_count
    }

    /// Always `1..=m`.
    pub fn unknowns(&self) -> BTreeSet<u32> {
        (1..=self.unknown_count).collect()
    }

    pub fn givens(&self) -> BTreeSet<u32> {
        self.equations.iter().flat_map(|e| e.givens()).collect()
    }

    pub fn into_equations(self) -> Vec<Equation> {
        self.equations
    }
}

impl<'a> IntoIterator for &'a EquationSet {
    type Item = &'a Equation;
    type IntoIter = std::slice::Iter<'a, Equation>;

    fn into_iter(self) -> Self::IntoIter {
        self.equations.iter()
    }
}

/// Surface token of the dummy head node of a universal expression tree.
pub const UET_HEAD: &str = "<UET>";

/// Universal expression tree: every equation of a set hangs under one dummy
/// head, so single- and multi-unknown problems share one decoding target.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct UetTree {
    children: Vec<Equation>,
}

impl UetTree {
    pub fn children(&self) -> &[Equation] {
        &self.children
    }

    pub fn head(&self) -> &'static str {
        UET_HEAD
    }

    pub fn into_set(self) -> Result<EquationSet, SetError> {
        EquationSet::new(self.children)
    }

    pub(crate) fn from_children(children: Vec<Equation>) -> Self {
        UetTree { children }
    }
}

pub fn uet_from_set(set: &EquationSet) -> UetTree {
    UetTree {
        children: set.equations().to_vec(),
    }
}
