//! Pre-order token serialization of universal expression trees.
//!
//! A tree serializes as the head token, then for each equation `=` followed
//! by the pre-order reading of its left and right sides:
//!
//! ```text
//! x_1 = n_1 + n_2   =>   <UET> = x_1 + n_1 n_2
//! ```

use std::fmt;

use crate::expr::{BinOp, Equation, Expr, Number, UetTree, UET_HEAD};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Token {
    Head,
    Equals,
    Op(BinOp),
    Given(u32),
    Unknown(u32),
    Const(Number),
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Head => f.write_str(UET_HEAD),
            Token::Equals => f.write_str("="),
            Token::Op(op) => f.write_str(op.symbol()),
            Token::Given(i) => write!(f, "n_{i}"),
            Token::Unknown(j) => write!(f, "x_{j}"),
            Token::Const(c) => write!(f, "{c}"),
        }
    }
}

/// Reads a variable spelled `n_3`/`n3` or `x_2`/`x2`. Returns the letter and
/// a positive index.
pub(crate) fn parse_variable(s: &str) -> Option<(char, u32)> {
    let mut chars = s.chars();
    let letter = chars.next()?;
    if letter != 'n' && letter != 'x' {
        return None;
    }
    let rest = chars.as_str();
    let digits = rest.strip_prefix('_').unwrap_or(rest);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let idx: u32 = digits.parse().ok()?;
    (idx >= 1).then_some((letter, idx))
}

impl Token {
    pub fn parse(s: &str) -> Option<Token> {
        match s {
            UET_HEAD => return Some(Token::Head),
            "=" => return Some(Token::Equals),
            _ => {}
        }
        if let Some(op) = BinOp::from_symbol(s) {
            return Some(Token::Op(op));
        }
        if let Some((letter, idx)) = parse_variable(s) {
            return Some(if letter == 'n' {
                Token::Given(idx)
            } else {
                Token::Unknown(idx)
            });
        }
        s.parse::<Number>().ok().map(Token::Const)
    }
}

fn push_expr(e: &Expr, out: &mut Vec<Token>) {
    match e {
        Expr::Const(c) => out.push(Token::Const(c.clone())),
        Expr::Given(i) => out.push(Token::Given(*i)),
        Expr::Unknown(j) => out.push(Token::Unknown(*j)),
        Expr::Bin(op, l, r) => {
            out.push(Token::Op(*op));
            push_expr(l, out);
            push_expr(r, out);
        }
    }
}

pub fn expr_tokens(e: &Expr) -> Vec<Token> {
    let mut out = Vec::with_capacity(e.node_count());
    push_expr(e, &mut out);
    out
}

pub fn expr_prefix_string(e: &Expr) -> String {
    join(&expr_tokens(e))
}

pub fn prefix_tokens(t: &UetTree) -> Vec<Token> {
    let mut out = vec![Token::Head];
    for eq in t.children() {
        out.push(Token::Equals);
        push_expr(&eq.lhs, &mut out);
        push_expr(&eq.rhs, &mut out);
    }
    out
}

pub fn join(tokens: &[Token]) -> String {
    let mut s = String::new();
    for (k, t) in tokens.iter().enumerate() {
        if k > 0 {
            s.push(' ');
        }
        s.push_str(&t.to_string());
    }
    s
}

/// Space-joined prefix serialization, the `target` field of augmented records.
pub fn prefix_string(t: &UetTree) -> String {
    join(&prefix_tokens(t))
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum PrefixError {
    #[error("malformed prefix sequence at token {position}: {reason}")]
    MalformedPrefix { position: usize, reason: &'static str },
}

impl PrefixError {
    pub fn position(&self) -> usize {
        match self {
            PrefixError::MalformedPrefix { position, .. } => *position,
        }
    }
}

fn malformed(position: usize, reason: &'static str) -> PrefixError {
    PrefixError::MalformedPrefix { position, reason }
}

struct Reader<'a> {
    tokens: &'a [Token],
    pos: usize,
}

impl Reader<'_> {
    fn expr(&mut self) -> Result<Expr, PrefixError> {
        let Some(tok) = self.tokens.get(self.pos) else {
            return Err(malformed(self.pos, "operator missing operand"));
        };
        let at = self.pos;
        self.pos += 1;
        match tok {
            Token::Const(c) => Ok(Expr::Const(c.clone())),
            Token::Given(i) => Ok(Expr::Given(*i)),
            Token::Unknown(j) => Ok(Expr::Unknown(*j)),
            Token::Op(op) => {
                let l = self.expr()?;
                let r = self.expr()?;
                Ok(Expr::bin(*op, l, r))
            }
            Token::Head | Token::Equals => Err(malformed(at, "expected an operand or operator")),
        }
    }
}

/// Inverse of [`prefix_tokens`]. Does not check equation-set invariants;
/// use [`UetTree::into_set`] for that.
pub fn parse_prefix<S: AsRef<str>>(tokens: &[S]) -> Result<UetTree, PrefixError> {
    let parsed = tokens
        .iter()
        .enumerate()
        .map(|(k, s)| Token::parse(s.as_ref()).ok_or(malformed(k, "unknown token")))
        .collect::<Result<Vec<_>, _>>()?;
    parse_prefix_tokens(&parsed)
}

pub fn parse_prefix_str(s: &str) -> Result<UetTree, PrefixError> {
    let tokens: Vec<&str> = s.split_whitespace().collect();
    parse_prefix(&tokens)
}

pub fn parse_prefix_tokens(tokens: &[Token]) -> Result<UetTree, PrefixError> {
    if tokens.first() != Some(&Token::Head) {
        return Err(malformed(0, "sequence must start with the head token"));
    }
    let mut r = Reader { tokens, pos: 1 };
    let mut children = Vec::new();
    while r.pos < tokens.len() {
        if tokens[r.pos] != Token::Equals {
            return Err(malformed(r.pos, "expected '=' starting an equation"));
        }
        r.pos += 1;
        let lhs = r.expr()?;
        let rhs = r.expr()?;
        children.push(Equation::new(lhs, rhs));
    }
    if children.is_empty() {
        return Err(malformed(tokens.len(), "head has no equations"));
    }
    Ok(UetTree::from_children(children))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{uet_from_set, EquationSet};

    fn sample() -> UetTree {
        let eq = Equation::new(Expr::unknown(1), Expr::add(Expr::given(1), Expr::given(2)));
        uet_from_set(&EquationSet::single(eq).unwrap())
    }

    #[test]
    fn single_equation_serializes_in_preorder() {
        assert_eq!(prefix_string(&sample()), "<UET> = x_1 + n_1 n_2");
    }

    #[test]
    fn parses_minimal_tree() {
        let t = parse_prefix(&["<UET>", "=", "x_1", "n_1"]).unwrap();
        assert_eq!(t.children(), &[Equation::new(Expr::unknown(1), Expr::given(1))]);
    }

    #[test]
    fn arity_underflow_is_malformed() {
        let err = parse_prefix(&["<UET>", "=", "x_1", "+", "n_1"]).unwrap_err();
        assert_eq!(err.position(), 5);
    }

    #[test]
    fn other_malformations() {
        assert_eq!(parse_prefix(&["=", "x_1", "n_1"]).unwrap_err().position(), 0);
        assert_eq!(parse_prefix(&["<UET>"]).unwrap_err().position(), 1);
        assert_eq!(parse_prefix(&["<UET>", "=", "x_1", "n_1", "n_2"]).unwrap_err().position(), 4);
        assert_eq!(parse_prefix(&["<UET>", "=", "x_1", "y"]).unwrap_err().position(), 3);
        assert_eq!(parse_prefix(&["<UET>", "=", "x_0", "n_1"]).unwrap_err().position(), 2);
        assert_eq!(parse_prefix(&["<UET>", "=", "=", "n_1"]).unwrap_err().position(), 2);
    }

    #[test]
    fn accepts_unpadded_variable_spelling() {
        let t = parse_prefix_str("<UET> = x1 + n1 2.50").unwrap();
        assert_eq!(prefix_string(&t), "<UET> = x_1 + n_1 2.5");
    }

    #[test]
    fn variable_spellings() {
        assert_eq!(parse_variable("n_12"), Some(('n', 12)));
        assert_eq!(parse_variable("x3"), Some(('x', 3)));
        assert_eq!(parse_variable("x_"), None);
        assert_eq!(parse_variable("n_0"), None);
        assert_eq!(parse_variable("y1"), None);
    }
}
