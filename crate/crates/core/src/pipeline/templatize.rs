//! Replacing numbers in raw problem text with `n_i` placeholders.

use crate::expr::{Equation, Expr};
use crate::infix::{parse_equation, ParseError};

#[derive(Clone, Debug, PartialEq)]
pub struct Templated {
    pub text: String,
    pub givens: Vec<f64>,
    pub equations: Vec<Equation>,
    pub warnings: Vec<String>,
}

/// Numeric mentions in `text`, left to right, as `(byte range, value)`.
fn numeric_mentions(text: &str) -> Vec<(std::ops::Range<usize>, f64)> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        if !bytes[i].is_ascii_digit() {
            i += 1;
            continue;
        }
        let start = i;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
        if i + 1 < bytes.len() && bytes[i] == b'.' && bytes[i + 1].is_ascii_digit() {
            i += 1;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
        }
        if let Ok(v) = text[start..i].parse::<f64>() {
            out.push((start..i, v));
        }
    }
    out
}

fn same_value(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

struct ConstMatcher<'a> {
    mentions: &'a [f64],
    used: Vec<bool>,
    warnings: Vec<String>,
}

impl ConstMatcher<'_> {
    fn rewrite(&mut self, e: &Expr) -> Expr {
        match e {
            Expr::Const(c) => {
                let v = c.to_f64();
                let matching: Vec<usize> = (0..self.mentions.len())
                    .filter(|&k| same_value(self.mentions[k], v))
                    .collect();
                let pick = matching
                    .iter()
                    .copied()
                    .find(|&k| !self.used[k])
                    .or_else(|| matching.first().copied());
                match pick {
                    Some(k) => {
                        self.used[k] = true;
                        Expr::Given(k as u32 + 1)
                    }
                    None => {
                        self.warnings.push(format!("equation constant {c} does not occur in the text"));
                        e.clone()
                    }
                }
            }
            Expr::Bin(op, l, r) => {
                let l = self.rewrite(l);
                let r = self.rewrite(r);
                Expr::bin(*op, l, r)
            }
            leaf => leaf.clone(),
        }
    }
}

/// Replaces numeric mentions in `raw_text` by `n_1, n_2, ...` in order and
/// maps equation constants onto them.
///
/// Each mention gets its own index, even when values repeat. An equation
/// constant takes the earliest mention of equal value (within 1e-9) that no
/// earlier constant took, falling back to the earliest equal mention;
/// constants with no equal mention stay literal and produce a warning.
/// Constants are visited equation by equation, left side first, in
/// pre-order.
pub fn templatize(raw_text: &str, raw_equations: &[impl AsRef<str>]) -> Result<Templated, ParseError> {
    let mentions = numeric_mentions(raw_text);
    let mut text = String::with_capacity(raw_text.len());
    let mut last = 0;
    for (k, (range, _)) in mentions.iter().enumerate() {
        text.push_str(&raw_text[last..range.start]);
        text.push_str(&format!("n_{}", k + 1));
        last = range.end;
    }
    text.push_str(&raw_text[last..]);

    let givens: Vec<f64> = mentions.iter().map(|(_, v)| *v).collect();
    let mut matcher = ConstMatcher { mentions: &givens, used: vec![false; givens.len()], warnings: Vec::new() };
    let mut equations = Vec::with_capacity(raw_equations.len());
    for raw in raw_equations {
        let eq = parse_equation(raw.as_ref())?;
        let lhs = matcher.rewrite(&eq.lhs);
        let rhs = matcher.rewrite(&eq.rhs);
        equations.push(Equation::new(lhs, rhs));
    }
    let warnings = matcher.warnings;
    Ok(Templated { text, givens, equations, warnings })
}
