//! Tiny expression language for user-supplied gap functions `τ(t)`.
//!
//! Grammar (recursive descent, standard precedence):
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | primary
//! primary := number | 't' | ('exp' | 'ln' | 'sqrt') '(' expr ')' | '(' expr ')'
//! ```
//!
//! Deliberately small: one variable, four operators, three functions. That
//! keeps evaluation deterministic and auditable — there is no function whose
//! result could differ across platforms beyond normal f64 rounding.

use std::fmt;

use crate::error::Error;
use crate::Result;

#[derive(Clone, Debug, PartialEq)]
enum Node {
    Const(f64),
    Var,
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Div(Box<Node>, Box<Node>),
    Neg(Box<Node>),
    Exp(Box<Node>),
    Ln(Box<Node>),
    Sqrt(Box<Node>),
}

/// A parsed expression in the variable `t`.
#[derive(Clone, Debug, PartialEq)]
pub struct Expr {
    source: String,
    root: Node,
}

impl Expr {
    pub fn parse(source: &str) -> Result<Self> {
        let mut parser = Parser { src: source.as_bytes(), pos: 0 };
        parser.skip_ws();
        if parser.at_end() {
            return Err(Error::Expr("empty expression".into()));
        }
        let root = parser.expr()?;
        parser.skip_ws();
        if !parser.at_end() {
            return Err(Error::Expr(format!(
                "unexpected trailing input at byte {}: `{}`",
                parser.pos,
                &source[parser.pos..]
            )));
        }
        Ok(Expr { source: source.to_string(), root })
    }

    /// The original text, kept verbatim so configurations round-trip.
    pub fn source(&self) -> &str {
        &self.source
    }

    /// Evaluate at `t`. May return NaN/∞ (e.g. `ln` of a negative value or
    /// division by zero); callers that need finiteness check the result.
    pub fn eval(&self, t: f64) -> f64 {
        eval_node(&self.root, t)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.source)
    }
}

fn eval_node(node: &Node, t: f64) -> f64 {
    match node {
        Node::Const(c) => *c,
        Node::Var => t,
        Node::Add(a, b) => eval_node(a, t) + eval_node(b, t),
        Node::Sub(a, b) => eval_node(a, t) - eval_node(b, t),
        Node::Mul(a, b) => eval_node(a, t) * eval_node(b, t),
        Node::Div(a, b) => eval_node(a, t) / eval_node(b, t),
        Node::Neg(a) => -eval_node(a, t),
        Node::Exp(a) => eval_node(a, t).exp(),
        Node::Ln(a) => eval_node(a, t).ln(),
        Node::Sqrt(a) => eval_node(a, t).sqrt(),
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn at_end(&self) -> bool {
        self.pos >= self.src.len()
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(b' ' | b'\t')) {
            self.pos += 1;
        }
    }

    fn expr(&mut self) -> Result<Node> {
        let mut lhs = self.term()?;
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    lhs = Node::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Some(b'-') => {
                    self.pos += 1;
                    lhs = Node::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Node> {
        let mut lhs = self.unary()?;
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    lhs = Node::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Some(b'/') => {
                    self.pos += 1;
                    lhs = Node::Div(Box::new(lhs), Box::new(self.unary()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Node> {
        self.skip_ws();
        if self.peek() == Some(b'-') {
            self.pos += 1;
            return Ok(Node::Neg(Box::new(self.unary()?)));
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Node> {
        self.skip_ws();
        match self.peek() {
            None => Err(Error::Expr("unexpected end of expression".into())),
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                self.expect(b')')?;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => {
                let word = self.ident();
                match word.as_str() {
                    "t" => Ok(Node::Var),
                    "exp" | "ln" | "sqrt" => {
                        self.skip_ws();
                        self.expect(b'(')?;
                        let inner = Box::new(self.expr()?);
                        self.expect(b')')?;
                        Ok(match word.as_str() {
                            "exp" => Node::Exp(inner),
                            "ln" => Node::Ln(inner),
                            _ => Node::Sqrt(inner),
                        })
                    }
                    other => Err(Error::Expr(format!(
                        "unknown identifier `{other}` (allowed: t, exp, ln, sqrt)"
                    ))),
                }
            }
            Some(c) => Err(Error::Expr(format!(
                "unexpected character `{}` at byte {}",
                c as char, self.pos
            ))),
        }
    }

    fn ident(&mut self) -> String {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric()) {
            self.pos += 1;
        }
        String::from_utf8_lossy(&self.src[start..self.pos]).into_owned()
    }

    fn number(&mut self) -> Result<Node> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit() || c == b'.') {
            self.pos += 1;
        }
        // Optional exponent: e or E, optional sign, digits.
        if matches!(self.peek(), Some(b'e' | b'E')) {
            let mark = self.pos;
            self.pos += 1;
            if matches!(self.peek(), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            if matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                    self.pos += 1;
                }
            } else {
                // Not an exponent after all (e.g. `2*exp(t)` seen as `2e…`).
                self.pos = mark;
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos])
            .expect("numeric token is ascii");
        text.parse::<f64>()
            .map(Node::Const)
            .map_err(|_| Error::Expr(format!("malformed number `{text}`")))
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(Error::Expr(format!(
                "expected `{}` at byte {}",
                c as char, self.pos
            )))
        }
    }
}
