//! Infix equation syntax.
//!
//! ```text
//! equation := expr "=" expr
//! expr     := term (("+" | "-") term)*
//! term     := unary (("*" | "/") unary)*
//! unary    := "-" unary | power
//! power    := primary ("^" unary)?
//! primary  := number | variable | "(" expr ")"
//! number   := digit+ ("." digit+)?
//! variable := ("n" | "x") "_"? digit+          (index >= 1)
//! ```
//!
//! `+ - * /` associate to the left, `^` to the right. Unary minus becomes
//! `0 - operand`. Whitespace is insignificant and multiplication must be
//! written explicitly.

use std::fmt;

use crate::expr::{BinOp, Equation, Expr, Number};
use crate::prefix::parse_variable;

const MAX_NESTING: usize = 256;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    UnexpectedToken,
    UnbalancedParen,
    EmptyExpression,
    UnknownSymbol,
    MissingEquals,
    NestingTooDeep,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{kind:?} at offset {position}")]
pub struct ParseError {
    /// Character offset into the input; equals the input length for
    /// end-of-input errors.
    pub position: usize,
    pub kind: ParseErrorKind,
}

impl ParseError {
    fn new(position: usize, kind: ParseErrorKind) -> Self {
        ParseError { position, kind }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Lexeme {
    Num(Number),
    Var(char, u32),
    Op(BinOp),
    LParen,
    RParen,
    Equals,
}

#[derive(Clone, Debug)]
struct Spanned {
    lex: Lexeme,
    pos: usize,
}

fn lex(input: &str) -> Result<Vec<Spanned>, ParseError> {
    let chars: Vec<char> = input.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let start = i;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let single = match c {
            '(' => Some(Lexeme::LParen),
            ')' => Some(Lexeme::RParen),
            '=' => Some(Lexeme::Equals),
            _ => BinOp::from_symbol(&c.to_string()).map(Lexeme::Op),
        };
        if let Some(lex) = single {
            out.push(Spanned { lex, pos: start });
            i += 1;
            continue;
        }
        if c.is_ascii_digit() {
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            if i + 1 < chars.len() && chars[i] == '.' && chars[i + 1].is_ascii_digit() {
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
            }
            let text: String = chars[start..i].iter().collect();
            let n = text
                .parse()
                .map_err(|_| ParseError::new(start, ParseErrorKind::UnexpectedToken))?;
            out.push(Spanned { lex: Lexeme::Num(n), pos: start });
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            let (letter, idx) = parse_variable(&text)
                .ok_or(ParseError::new(start, ParseErrorKind::UnknownSymbol))?;
            out.push(Spanned { lex: Lexeme::Var(letter, idx), pos: start });
            continue;
        }
        return Err(ParseError::new(start, ParseErrorKind::UnexpectedToken));
    }
    Ok(out)
}

struct Parser<'a> {
    toks: &'a [Spanned],
    pos: usize,
    end: usize,
    depth: usize,
    open_parens: Vec<usize>,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Lexeme> {
        self.toks.get(self.pos).map(|t| &t.lex)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |t| t.pos)
    }

    fn enter(&mut self) -> Result<(), ParseError> {
        self.depth += 1;
        if self.depth > MAX_NESTING {
            return Err(ParseError::new(self.here(), ParseErrorKind::NestingTooDeep));
        }
        Ok(())
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        self.enter()?;
        let mut acc = self.term()?;
        while let Some(Lexeme::Op(op @ (BinOp::Add | BinOp::Sub))) = self.peek() {
            let op = *op;
            self.pos += 1;
            acc = Expr::bin(op, acc, self.term()?);
        }
        self.depth -= 1;
        Ok(acc)
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.unary()?;
        while let Some(Lexeme::Op(op @ (BinOp::Mul | BinOp::Div))) = self.peek() {
            let op = *op;
            self.pos += 1;
            acc = Expr::bin(op, acc, self.unary()?);
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if let Some(Lexeme::Op(BinOp::Sub)) = self.peek() {
            self.pos += 1;
            self.enter()?;
            let operand = self.unary()?;
            self.depth -= 1;
            return Ok(Expr::neg(operand));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary()?;
        if let Some(Lexeme::Op(BinOp::Pow)) = self.peek() {
            self.pos += 1;
            self.enter()?;
            let exponent = self.unary()?;
            self.depth -= 1;
            return Ok(Expr::pow(base, exponent));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let at = self.here();
        let lex = self.peek().cloned();
        match lex {
            Some(Lexeme::Num(n)) => {
                self.pos += 1;
                Ok(Expr::Const(n))
            }
            Some(Lexeme::Var('n', i)) => {
                self.pos += 1;
                Ok(Expr::Given(i))
            }
            Some(Lexeme::Var(_, j)) => {
                self.pos += 1;
                Ok(Expr::Unknown(j))
            }
            Some(Lexeme::LParen) => {
                self.pos += 1;
                self.open_parens.push(at);
                if matches!(self.peek(), Some(Lexeme::RParen)) {
                    return Err(ParseError::new(self.here(), ParseErrorKind::EmptyExpression));
                }
                let inner = self.expr()?;
                match self.peek() {
                    Some(Lexeme::RParen) => {
                        self.pos += 1;
                        self.open_parens.pop();
                        Ok(inner)
                    }
                    None | Some(Lexeme::Equals) => {
                        Err(ParseError::new(at, ParseErrorKind::UnbalancedParen))
                    }
                    Some(_) => Err(ParseError::new(self.here(), ParseErrorKind::UnexpectedToken)),
                }
            }
            Some(Lexeme::RParen) if self.open_parens.is_empty() => {
                Err(ParseError::new(at, ParseErrorKind::UnbalancedParen))
            }
            _ => Err(ParseError::new(at, ParseErrorKind::UnexpectedToken)),
        }
    }

    /// Parses one side, which must span all tokens in `self.pos..stop`.
    fn side(&mut self, stop: usize) -> Result<Expr, ParseError> {
        if self.pos == stop {
            return Err(ParseError::new(self.here(), ParseErrorKind::EmptyExpression));
        }
        let e = self.expr()?;
        if self.pos != stop {
            let kind = match self.peek() {
                Some(Lexeme::RParen) => ParseErrorKind::UnbalancedParen,
                _ => ParseErrorKind::UnexpectedToken,
            };
            return Err(ParseError::new(self.here(), kind));
        }
        Ok(e)
    }
}

/// Parses an expression with no `=`.
pub fn parse_expr(s: &str) -> Result<Expr, ParseError> {
    let toks = lex(s)?;
    let end = s.chars().count();
    if let Some(eq) = toks.iter().find(|t| t.lex == Lexeme::Equals) {
        return Err(ParseError::new(eq.pos, ParseErrorKind::UnexpectedToken));
    }
    let mut p = Parser { toks: &toks, pos: 0, end, depth: 0, open_parens: Vec::new() };
    p.side(toks.len())
}

pub fn parse_equation(s: &str) -> Result<Equation, ParseError> {
    let toks = lex(s)?;
    let end = s.chars().count();
    let mut equals = toks.iter().enumerate().filter(|(_, t)| t.lex == Lexeme::Equals);
    let Some((split, _)) = equals.next() else {
        return Err(ParseError::new(end, ParseErrorKind::MissingEquals));
    };
    if let Some((_, second)) = equals.next() {
        return Err(ParseError::new(second.pos, ParseErrorKind::UnexpectedToken));
    }
    let mut p = Parser { toks: &toks, pos: 0, end, depth: 0, open_parens: Vec::new() };
    let lhs = p.side(split)?;
    p.pos = split + 1;
    p.open_parens.clear();
    let rhs = p.side(toks.len())?;
    Ok(Equation::new(lhs, rhs))
}

// Binding strength of the printed form of a node.
const LVL_ADD: u8 = 1;
const LVL_MUL: u8 = 2;
const LVL_NEG: u8 = 3;
const LVL_POW: u8 = 4;
const LVL_ATOM: u8 = 5;

fn level(e: &Expr) -> u8 {
    if e.as_negation().is_some() {
        return LVL_NEG;
    }
    match e {
        Expr::Bin(BinOp::Add | BinOp::Sub, ..) => LVL_ADD,
        Expr::Bin(BinOp::Mul | BinOp::Div, ..) => LVL_MUL,
        Expr::Bin(BinOp::Pow, ..) => LVL_POW,
        _ => LVL_ATOM,
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Style {
    Exact,
    Display,
}

fn write_operand(e: &Expr, min: u8, paren_neg: bool, style: Style, out: &mut String) {
    let wrap = level(e) < min || (paren_neg && e.as_negation().is_some());
    if wrap {
        out.push('(');
    }
    write_expr(e, style, out);
    if wrap {
        out.push(')');
    }
}

fn write_expr(e: &Expr, style: Style, out: &mut String) {
    if let Some(operand) = e.as_negation() {
        out.push('-');
        write_operand(operand, LVL_POW, false, style, out);
        return;
    }
    match e {
        Expr::Const(c) => out.push_str(&c.to_string()),
        Expr::Given(i) => {
            out.push_str("n_");
            out.push_str(&i.to_string());
        }
        Expr::Unknown(j) => {
            out.push_str("x_");
            out.push_str(&j.to_string());
        }
        Expr::Bin(op, l, r) => {
            let (left_min, mut right_min) = match op {
                BinOp::Add | BinOp::Sub => (LVL_ADD, LVL_ADD + 1),
                BinOp::Mul | BinOp::Div => (LVL_MUL, LVL_MUL + 1),
                BinOp::Pow => (LVL_ATOM, LVL_NEG),
            };
            let same_assoc = matches!((op, r.as_ref()), (BinOp::Add, Expr::Bin(BinOp::Add, ..)) | (BinOp::Mul, Expr::Bin(BinOp::Mul, ..)));
            if style == Style::Display && same_assoc && r.as_negation().is_none() {
                right_min = left_min;
            }
            write_operand(l, left_min, false, style, out);
            out.push(' ');
            out.push_str(op.symbol());
            out.push(' ');
            write_operand(r, right_min, true, style, out);
        }
    }
}

/// Prints with the fewest parentheses that still re-parse to the same tree.
pub fn print_expr(e: &Expr) -> String {
    let mut s = String::new();
    write_expr(e, Style::Exact, &mut s);
    s
}

pub fn print_infix(eq: &Equation) -> String {
    format!("{} = {}", print_expr(&eq.lhs), print_expr(&eq.rhs))
}

/// Conventional math notation: like [`print_expr`], but a `+` nested as the
/// right operand of `+` (and `*` inside `*`) is not parenthesized, since
/// regrouping does not change the value. `n_3 + (n_2 + n_1)` displays as
/// `n_3 + n_2 + n_1`. The output re-parses to an equal-valued tree, not
/// necessarily the same tree.
pub fn display_expr(e: &Expr) -> String {
    let mut s = String::new();
    write_expr(e, Style::Display, &mut s);
    s
}

pub fn print_display(eq: &Equation) -> String {
    format!("{} = {}", display_expr(&eq.lhs), display_expr(&eq.rhs))
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_expr(self))
    }
}

impl fmt::Display for Equation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_infix(self))
    }
}
