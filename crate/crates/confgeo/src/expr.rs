//! Expression DSL for metric components and conformal factors.
//!
//! Scalar functions of the coordinates `x1, x2, x3` are written in
//! ordinary infix notation:
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := unary ('^' exponent)?
//! unary  := '-' unary | atom
//! atom   := number | x1 | x2 | x3 | func '(' expr ')' | '(' expr ')'
//! func   := sin | cos | tan | exp | log | sqrt | arctan | arccos
//! ```
//!
//! The exponent of `^` is a (possibly negated, possibly parenthesized)
//! numeric literal. Integer exponents are evaluated by repeated
//! multiplication and are valid for any base; non-integer exponents mean
//! `exp(p log(base))` and require a positive base.
//!
//! Parsing, printing and re-parsing are structurally stable, which is
//! what lets metric files round-trip exactly.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::num::{Jet3, MAX_JET_ORDER};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Log,
    Sqrt,
    Arctan,
    Arccos,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Arctan => "arctan",
            Func::Arccos => "arccos",
        }
    }

    fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tan" => Func::Tan,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sqrt" => Func::Sqrt,
            "arctan" => Func::Arctan,
            "arccos" => Func::Arccos,
            _ => return None,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Node {
    Const(f64),
    /// Coordinate index 0..=2 (printed as x1..x3).
    Coord(usize),
    Neg(Box<Node>),
    Bin(BinOp, Box<Node>, Box<Node>),
    /// Base raised to a numeric literal exponent.
    Pow(Box<Node>, f64),
    Func(Func, Box<Node>),
}

/// A parsed coordinate expression. Construct with [`parse_expression`]
/// or `str::parse`, evaluate with [`eval_jet`].
#[derive(Clone, Debug, PartialEq)]
pub struct Expression {
    root: Node,
}

impl Expression {
    pub fn constant(v: f64) -> Self {
        Expression {
            root: Node::Const(v),
        }
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    /// `e^(k * self)`, used when composing conformal factors into metric
    /// components without numeric evaluation.
    pub fn exp_scaled(&self, k: f64) -> Expression {
        Expression {
            root: Node::Func(
                Func::Exp,
                Box::new(Node::Bin(
                    BinOp::Mul,
                    Box::new(Node::Const(k)),
                    Box::new(self.root.clone()),
                )),
            ),
        }
    }

    pub fn mul(&self, rhs: &Expression) -> Expression {
        Expression {
            root: Node::Bin(
                BinOp::Mul,
                Box::new(self.root.clone()),
                Box::new(rhs.root.clone()),
            ),
        }
    }

    pub fn is_zero_literal(&self) -> bool {
        matches!(self.root, Node::Const(v) if v == 0.0)
    }
}

impl FromStr for Expression {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_expression(s)
    }
}

// ---------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn tokens(src: &'a str) -> Result<Vec<(usize, Tok)>> {
        let mut lx = Lexer {
            src: src.as_bytes(),
            pos: 0,
        };
        let mut out = Vec::new();
        loop {
            lx.skip_ws();
            if lx.pos >= lx.src.len() {
                return Ok(out);
            }
            let start = lx.pos;
            let c = lx.src[lx.pos];
            let tok = match c {
                b'+' => {
                    lx.pos += 1;
                    Tok::Plus
                }
                b'-' => {
                    lx.pos += 1;
                    Tok::Minus
                }
                b'*' => {
                    lx.pos += 1;
                    Tok::Star
                }
                b'/' => {
                    lx.pos += 1;
                    Tok::Slash
                }
                b'^' => {
                    lx.pos += 1;
                    Tok::Caret
                }
                b'(' => {
                    lx.pos += 1;
                    Tok::LParen
                }
                b')' => {
                    lx.pos += 1;
                    Tok::RParen
                }
                b',' => {
                    lx.pos += 1;
                    Tok::Comma
                }
                b'0'..=b'9' | b'.' => lx.number(start)?,
                c if c.is_ascii_alphabetic() || c == b'_' => lx.ident(start),
                _ => {
                    return Err(Error::Syntax {
                        position: start,
                        expected: format!("token, found `{}`", c as char),
                    })
                }
            };
            out.push((start, tok));
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn number(&mut self, start: usize) -> Result<Tok> {
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_digit() || self.src[self.pos] == b'.')
        {
            self.pos += 1;
        }
        // exponent suffix like 1.5e-3
        if self.pos < self.src.len() && (self.src[self.pos] | 0x20) == b'e' {
            let mut probe = self.pos + 1;
            if probe < self.src.len() && (self.src[probe] == b'+' || self.src[probe] == b'-') {
                probe += 1;
            }
            if probe < self.src.len() && self.src[probe].is_ascii_digit() {
                self.pos = probe;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        let value: f64 = text.parse().map_err(|_| Error::Syntax {
            position: start,
            expected: format!("numeric literal, found `{text}`"),
        })?;
        if !value.is_finite() {
            return Err(Error::Syntax {
                position: start,
                expected: "finite numeric literal".into(),
            });
        }
        Ok(Tok::Num(value))
    }

    fn ident(&mut self, start: usize) -> Tok {
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
        {
            self.pos += 1;
        }
        Tok::Ident(
            std::str::from_utf8(&self.src[start..self.pos])
                .unwrap()
                .to_string(),
        )
    }
}

// ---------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
    end: usize,
}

/// Parse an infix coordinate expression.
pub fn parse_expression(src: &str) -> Result<Expression> {
    let toks = Lexer::tokens(src)?;
    let mut p = Parser {
        toks,
        at: 0,
        end: src.len(),
    };
    let root = p.expr()?;
    if p.at != p.toks.len() {
        return Err(Error::Syntax {
            position: p.toks[p.at].0,
            expected: "end of input".into(),
        });
    }
    Ok(Expression { root })
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.at).map(|(_, t)| t.clone());
        self.at += 1;
        t
    }

    fn expect(&mut self, want: &Tok, what: &str) -> Result<()> {
        if self.peek() == Some(want) {
            self.at += 1;
            Ok(())
        } else {
            Err(Error::Syntax {
                position: self.pos(),
                expected: what.to_string(),
            })
        }
    }

    fn expr(&mut self) -> Result<Node> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Some(Tok::Plus) => BinOp::Add,
                Some(Tok::Minus) => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.at += 1;
            let rhs = self.term()?;
            lhs = Node::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Node> {
        let mut lhs = self.factor()?;
        loop {
            let op = match self.peek() {
                Some(Tok::Star) => BinOp::Mul,
                Some(Tok::Slash) => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.at += 1;
            let rhs = self.factor()?;
            lhs = Node::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn factor(&mut self) -> Result<Node> {
        let base = self.unary()?;
        if self.peek() == Some(&Tok::Caret) {
            self.at += 1;
            let p = self.exponent()?;
            return Ok(Node::Pow(Box::new(base), p));
        }
        Ok(base)
    }

    /// Exponents are numeric literals, optionally negated and/or wrapped
    /// in one pair of parentheses.
    fn exponent(&mut self) -> Result<f64> {
        let mut depth = 0usize;
        while self.peek() == Some(&Tok::LParen) {
            self.at += 1;
            depth += 1;
            if depth > 1 {
                return Err(Error::Syntax {
                    position: self.pos(),
                    expected: "numeric exponent".into(),
                });
            }
        }
        let sign = if self.peek() == Some(&Tok::Minus) {
            self.at += 1;
            -1.0
        } else {
            1.0
        };
        let value = match self.bump() {
            Some(Tok::Num(v)) => sign * v,
            _ => {
                return Err(Error::Syntax {
                    position: self.pos(),
                    expected: "numeric exponent after `^`".into(),
                })
            }
        };
        for _ in 0..depth {
            self.expect(&Tok::RParen, "`)` closing exponent")?;
        }
        Ok(value)
    }

    fn unary(&mut self) -> Result<Node> {
        if self.peek() == Some(&Tok::Minus) {
            self.at += 1;
            return Ok(Node::Neg(Box::new(self.unary()?)));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Node> {
        match self.bump() {
            Some(Tok::Num(v)) => Ok(Node::Const(v)),
            Some(Tok::LParen) => {
                let inner = self.expr()?;
                self.expect(&Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Some(Tok::Ident(name)) => match name.as_str() {
                "x1" => Ok(Node::Coord(0)),
                "x2" => Ok(Node::Coord(1)),
                "x3" => Ok(Node::Coord(2)),
                _ => {
                    if let Some(f) = Func::from_name(&name) {
                        self.expect(&Tok::LParen, "`(` after function name")?;
                        let arg = self.expr()?;
                        if self.peek() == Some(&Tok::Comma) {
                            return Err(Error::Arity { name });
                        }
                        self.expect(&Tok::RParen, "`)` closing function argument")?;
                        Ok(Node::Func(f, Box::new(arg)))
                    } else {
                        Err(Error::UnknownIdentifier(name))
                    }
                }
            },
            other => Err(Error::Syntax {
                position: if other.is_some() {
                    self.toks[self.at - 1].0
                } else {
                    self.end
                },
                expected: "expression".into(),
            }),
        }
    }
}

// ---------------------------------------------------------------------
// Serializer
// ---------------------------------------------------------------------

fn precedence(node: &Node) -> u8 {
    match node {
        Node::Bin(BinOp::Add | BinOp::Sub, ..) => 1,
        Node::Bin(BinOp::Mul | BinOp::Div, ..) => 2,
        Node::Neg(_) => 3,
        Node::Pow(..) => 4,
        Node::Const(_) | Node::Coord(_) | Node::Func(..) => 5,
    }
}

fn write_node(f: &mut fmt::Formatter<'_>, node: &Node, parent_prec: u8) -> fmt::Result {
    let prec = precedence(node);
    let parens = prec < parent_prec;
    if parens {
        write!(f, "(")?;
    }
    match node {
        Node::Const(v) => write!(f, "{v:?}")?,
        Node::Coord(i) => write!(f, "x{}", i + 1)?,
        Node::Neg(inner) => {
            write!(f, "-")?;
            write_node(f, inner, prec)?;
        }
        Node::Bin(op, lhs, rhs) => {
            let (sym, rbump) = match op {
                BinOp::Add => (" + ", 0),
                BinOp::Sub => (" - ", 1),
                BinOp::Mul => ("*", 0),
                BinOp::Div => ("/", 1),
            };
            write_node(f, lhs, prec)?;
            write!(f, "{sym}")?;
            write_node(f, rhs, prec + rbump)?;
        }
        Node::Pow(base, p) => {
            write_node(f, base, prec + 1)?;
            if *p < 0.0 {
                write!(f, "^({p:?})")?;
            } else {
                write!(f, "^{p:?}")?;
            }
        }
        Node::Func(func, arg) => {
            write!(f, "{}(", func.name())?;
            write_node(f, arg, 0)?;
            write!(f, ")")?;
        }
    }
    if parens {
        write!(f, ")")?;
    }
    Ok(())
}

impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_node(f, &self.root, 0)
    }
}

// ---------------------------------------------------------------------
// Jet evaluation
// ---------------------------------------------------------------------

/// Value of an expression at a point together with all mixed partial
/// derivatives up to `order`, in derivative normalization.
#[derive(Clone, Debug)]
pub struct JetValue {
    jet: Jet3,
}

impl JetValue {
    pub fn order(&self) -> usize {
        self.jet.order()
    }

    pub fn value(&self) -> f64 {
        self.jet.value()
    }

    /// Mixed partial derivative `d^alpha f` at the evaluation point.
    pub fn partial(&self, alpha: [usize; 3]) -> f64 {
        self.jet.partial(alpha)
    }

    pub fn jet(&self) -> &Jet3 {
        &self.jet
    }

    pub fn from_jet(jet: Jet3) -> Self {
        JetValue { jet }
    }
}

impl std::ops::Add for &JetValue {
    type Output = JetValue;
    fn add(self, rhs: &JetValue) -> JetValue {
        JetValue {
            jet: &self.jet + &rhs.jet,
        }
    }
}

impl std::ops::Mul for &JetValue {
    type Output = JetValue;
    fn mul(self, rhs: &JetValue) -> JetValue {
        JetValue {
            jet: &self.jet * &rhs.jet,
        }
    }
}

/// Evaluate `expr` and all partial derivatives through `order` at `point`.
pub fn eval_jet(expr: &Expression, point: [f64; 3], order: usize) -> Result<JetValue> {
    if order > MAX_JET_ORDER {
        return Err(Error::OrderTooHigh(order));
    }
    Ok(JetValue {
        jet: eval_node(&expr.root, point, order)?,
    })
}

fn domain_err(op: &str, reason: String, node: &Node) -> Error {
    Error::Domain {
        op: op.into(),
        reason,
        subexpr: Expression { root: node.clone() }.to_string(),
    }
}

fn eval_node(node: &Node, point: [f64; 3], order: usize) -> Result<Jet3> {
    match node {
        Node::Const(v) => Ok(Jet3::constant(*v, order)),
        Node::Coord(d) => Ok(Jet3::coordinate(point[*d], *d, order)),
        Node::Neg(inner) => Ok(eval_node(inner, point, order)?.scale(-1.0)),
        Node::Bin(op, lhs, rhs) => {
            let a = eval_node(lhs, point, order)?;
            let b = eval_node(rhs, point, order)?;
            match op {
                BinOp::Add => Ok(&a + &b),
                BinOp::Sub => Ok(&a - &b),
                BinOp::Mul => Ok(&a * &b),
                BinOp::Div => {
                    if b.value() == 0.0 {
                        return Err(domain_err("/", "division by zero".into(), rhs));
                    }
                    Ok(&a * &b.recip())
                }
            }
        }
        Node::Pow(base, p) => {
            let b = eval_node(base, point, order)?;
            if p.fract() == 0.0 && p.abs() <= i32::MAX as f64 {
                let n = *p as i32;
                if n < 0 && b.value() == 0.0 {
                    return Err(domain_err(
                        "^",
                        "zero base with negative exponent".into(),
                        base,
                    ));
                }
                Ok(b.powi(n))
            } else {
                if b.value() <= 0.0 {
                    return Err(domain_err(
                        "^",
                        format!(
                            "non-integer exponent requires positive base, got {}",
                            b.value()
                        ),
                        base,
                    ));
                }
                Ok(b.powf(*p))
            }
        }
        Node::Func(func, arg) => {
            let a = eval_node(arg, point, order)?;
            let v = a.value();
            match func {
                Func::Sin => Ok(a.sin()),
                Func::Cos => Ok(a.cos()),
                Func::Tan => {
                    if v.cos().abs() < 1e-12 {
                        return Err(domain_err("tan", format!("pole near argument {v}"), arg));
                    }
                    Ok(a.tan())
                }
                Func::Exp => Ok(a.exp()),
                Func::Log => {
                    if v <= 0.0 {
                        return Err(domain_err("log", format!("argument {v} <= 0"), arg));
                    }
                    Ok(a.ln())
                }
                Func::Sqrt => {
                    if v <= 0.0 {
                        return Err(domain_err(
                            "sqrt",
                            format!("argument {v} <= 0 (not smooth)"),
                            arg,
                        ));
                    }
                    Ok(a.sqrt())
                }
                Func::Arctan => Ok(a.atan()),
                Func::Arccos => {
                    if v.abs() >= 1.0 {
                        return Err(domain_err(
                            "arccos",
                            format!("argument {v} outside (-1, 1)"),
                            arg,
                        ));
                    }
                    Ok(a.acos())
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Expression {
        parse_expression(s).unwrap()
    }

    #[test]
    fn parses_constant_zero() {
        assert_eq!(*parse("0").root(), Node::Const(0.0));
    }

    #[test]
    fn parses_with_standard_precedence() {
        // x1^2 + x2*x3 == (+ (^ x1 2) (* x2 x3))
        let e = parse("x1^2 + x2*x3");
        let expect = Node::Bin(
            BinOp::Add,
            Box::new(Node::Pow(Box::new(Node::Coord(0)), 2.0)),
            Box::new(Node::Bin(
                BinOp::Mul,
                Box::new(Node::Coord(1)),
                Box::new(Node::Coord(2)),
            )),
        );
        assert_eq!(*e.root(), expect);
    }

    #[test]
    fn unbalanced_paren_reports_position() {
        let err = parse_expression("exp(2*sin(x1)").unwrap_err();
        match err {
            Error::Syntax { position, expected } => {
                assert_eq!(position, 13, "error should point at end of input");
                assert!(
                    expected.contains(')'),
                    "expected message about `)`: {expected}"
                );
            }
            other => panic!("wrong error: {other:?}"),
        }
    }

    #[test]
    fn unknown_identifier_and_arity() {
        assert!(matches!(
            parse_expression("y1 + 1").unwrap_err(),
            Error::UnknownIdentifier(name) if name == "y1"
        ));
        assert!(matches!(
            parse_expression("sin(x1, x2)").unwrap_err(),
            Error::Arity { name } if name == "sin"
        ));
    }

    #[test]
    fn roundtrip_examples() {
        for src in [
            "0",
            "x1^2 + x2*x3",
            "-x1",
            "exp(2*sin(x1))",
            "(x1 + x2)/(1.0 - x3)",
            "x1^-2.0",
            "1.0/(1.0 + x1^2 + x2^2 + x3^2)^2",
            "sqrt(1.5 + 0.25*sin(x2))",
            "arctan(x1) - arccos(0.5*x3)",
            "x1 - x2 - x3",
            "x1/(x2/x3)",
            "2.0 - -x1",
        ] {
            let first = parse(src);
            let printed = first.to_string();
            let second = parse_expression(&printed)
                .unwrap_or_else(|e| panic!("reparse of `{printed}` failed: {e}"));
            assert_eq!(first, second, "round trip changed `{src}` -> `{printed}`");
        }
    }

    #[test]
    fn eval_identity_coordinate() {
        let jv = eval_jet(&parse("x1"), [3.0, 0.0, 0.0], 1).unwrap();
        assert_eq!(jv.value(), 3.0);
        assert_eq!(jv.partial([1, 0, 0]), 1.0);
        assert_eq!(jv.partial([0, 1, 0]), 0.0);
        assert_eq!(jv.partial([0, 0, 1]), 0.0);
    }

    #[test]
    fn eval_exp_two_sine() {
        // Oracle by hand differentiation: f = exp(2 sin x1),
        // f'' = (-2 sin x + 4 cos^2 x) exp(2 sin x); at 0: 1, 2, 4.
        let jv = eval_jet(&parse("exp(2*sin(x1))"), [0.0, 0.0, 0.0], 2).unwrap();
        assert!((jv.value() - 1.0).abs() < 1e-15);
        assert!((jv.partial([1, 0, 0]) - 2.0).abs() < 1e-14);
        assert!((jv.partial([2, 0, 0]) - 4.0).abs() < 1e-14);
    }

    #[test]
    fn eval_bilinear() {
        let jv = eval_jet(&parse("x2*x3"), [1.0, 2.0, 5.0], 2).unwrap();
        assert_eq!(jv.value(), 10.0);
        assert_eq!(jv.partial([0, 1, 0]), 5.0);
        assert_eq!(jv.partial([0, 0, 1]), 2.0);
        assert_eq!(jv.partial([0, 1, 1]), 1.0);
        assert_eq!(jv.partial([2, 0, 0]), 0.0);
        assert_eq!(jv.partial([0, 2, 0]), 0.0);
        assert_eq!(jv.partial([0, 0, 2]), 0.0);
    }

    #[test]
    fn domain_errors_carry_subexpression() {
        let err = eval_jet(&parse("log(x1 - 2)"), [1.0, 0.0, 0.0], 2).unwrap_err();
        match err {
            Error::Domain { op, subexpr, .. } => {
                assert_eq!(op, "log");
                assert!(subexpr.contains("x1"), "subexpr: {subexpr}");
            }
            other => panic!("wrong error: {other:?}"),
        }
        assert!(matches!(
            eval_jet(&parse("x1"), [0.0; 3], 7).unwrap_err(),
            Error::OrderTooHigh(7)
        ));
    }

    #[test]
    fn non_integer_power_needs_positive_base() {
        assert!(eval_jet(&parse("x1^0.5"), [-1.0, 0.0, 0.0], 1).is_err());
        assert!(eval_jet(&parse("x1^2"), [-1.0, 0.0, 0.0], 1).is_ok());
        let jv = eval_jet(&parse("x1^2.5"), [4.0, 0.0, 0.0], 1).unwrap();
        assert!((jv.value() - 32.0).abs() < 1e-12);
        assert!((jv.partial([1, 0, 0]) - 2.5 * 4.0f64.powf(1.5)).abs() < 1e-12);
    }

    #[test]
    fn jet_value_linearity() {
        let f = parse("sin(x1)*exp(x2)");
        let g = parse("x3^2/(1.0 + x1^2)");
        let p = [0.3, -0.2, 0.8];
        let jf = eval_jet(&f, p, 3).unwrap();
        let jg = eval_jet(&g, p, 3).unwrap();
        let sum_expr = parse("sin(x1)*exp(x2) + x3^2/(1.0 + x1^2)");
        let jsum = eval_jet(&sum_expr, p, 3).unwrap();
        let combined = &jf + &jg;
        for alpha in Jet3::indices(3) {
            let got = combined.partial(*alpha);
            let want = jsum.partial(*alpha);
            let scale = want.abs().max(1.0);
            assert!((got - want).abs() <= 1e-14 * scale);
        }
    }
}
