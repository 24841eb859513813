//! Scalar-field expressions in the surface coordinates `u`, `v`.
//!
//! Grammar (whitespace is insignificant):
//!
//! ```text
//! expr    = term , { ("+" | "-") , term } ;
//! term    = unary , { ("*" | "/") , unary } ;
//! unary   = "-" , unary | power ;
//! power   = primary , { "^" , integer } ;
//! primary = number | "u" | "v" | func , "(" , expr , ")" | "(" , expr , ")" ;
//! func    = "sin" | "cos" | "exp" ;
//! number  = digits , [ "." , digits ] , [ ("e" | "E") , [ "+" | "-" ] , digits ] ;
//! integer = digits ;
//! ```
//!
//! so `^` binds tighter than unary minus, which binds tighter than `*` and
//! `/`. `-u^2` is `-(u^2)`.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::dual::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Var {
    U,
    V,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Node {
    Literal(f64),
    Var(Var),
    Neg(Box<Node>),
    Call(Func, Box<Node>),
    Binary(BinOp, Box<Node>, Box<Node>),
    Pow(Box<Node>, u32),
}

/// A parsed expression. Immutable once built.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarFieldExpr {
    root: Node,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: found {found}, expected one of {}", .expected.join(", "))]
    Syntax {
        offset: usize,
        found: String,
        expected: Vec<String>,
    },
    #[error("unknown identifier `{name}` at byte {offset} (allowed: u, v, sin, cos, exp)")]
    UnknownIdentifier { name: String, offset: usize },
    #[error("division by the literal zero at byte {offset}")]
    ZeroDivisor { offset: usize },
}

impl ParseError {
    pub fn offset(&self) -> usize {
        match self {
            ParseError::Syntax { offset, .. }
            | ParseError::UnknownIdentifier { offset, .. }
            | ParseError::ZeroDivisor { offset } => *offset,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("division by zero while evaluating `{0}`")]
    DivisionByZero(String),
}

impl ScalarFieldExpr {
    pub fn parse(source: &str) -> Result<Self, ParseError> {
        let tokens = lex(source)?;
        let mut parser = Parser {
            tokens,
            pos: 0,
            end: source.len(),
        };
        let root = parser.expr()?;
        if let Some(tok) = parser.peek() {
            return Err(ParseError::Syntax {
                offset: tok.offset,
                found: tok.kind.describe(),
                expected: expected(&["^", "*", "/", "+", "-", "end of input"]),
            });
        }
        Ok(Self { root })
    }

    pub fn constant(value: f64) -> Self {
        Self {
            root: Node::Literal(value),
        }
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    /// True when the tree is a single literal zero.
    pub fn is_zero(&self) -> bool {
        matches!(self.root, Node::Literal(x) if x == 0.0)
    }

    pub fn eval<S: Scalar>(&self, u: S, v: S) -> Result<S, EvalError> {
        eval_node(&self.root, u, v)
    }

    pub fn eval_f64(&self, u: f64, v: f64) -> Result<f64, EvalError> {
        self.eval(u, v)
    }
}

impl FromStr for ScalarFieldExpr {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse(s)
    }
}

fn eval_node<S: Scalar>(node: &Node, u: S, v: S) -> Result<S, EvalError> {
    Ok(match node {
        Node::Literal(x) => S::from_f64(*x),
        Node::Var(Var::U) => u,
        Node::Var(Var::V) => v,
        Node::Neg(inner) => -eval_node(inner, u, v)?,
        Node::Call(f, arg) => {
            let a = eval_node(arg, u, v)?;
            match f {
                Func::Sin => a.sin(),
                Func::Cos => a.cos(),
                Func::Exp => a.exp(),
            }
        }
        Node::Pow(base, n) => eval_node(base, u, v)?.powi(*n),
        Node::Binary(op, lhs, rhs) => {
            let a = eval_node(lhs, u, v)?;
            let b = eval_node(rhs, u, v)?;
            match op {
                BinOp::Add => a + b,
                BinOp::Sub => a - b,
                BinOp::Mul => a * b,
                BinOp::Div => {
                    if b.value() == 0.0 {
                        return Err(EvalError::DivisionByZero(print_node(rhs)));
                    }
                    a / b
                }
            }
        }
    })
}

impl fmt::Display for ScalarFieldExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_node(&self.root))
    }
}

// Every compound node is parenthesised, so printing never depends on
// precedence and always reparses to the same tree.
fn print_node(node: &Node) -> String {
    match node {
        Node::Literal(x) if *x < 0.0 => format!("(-{:?})", -x),
        Node::Literal(x) => format!("{x:?}"),
        Node::Var(Var::U) => "u".into(),
        Node::Var(Var::V) => "v".into(),
        Node::Neg(inner) => format!("(-{})", print_node(inner)),
        Node::Call(func, arg) => format!("{}({})", func.name(), print_node(arg)),
        Node::Pow(base, n) => format!("({}^{n})", print_node(base)),
        Node::Binary(op, l, r) => {
            format!("({} {} {})", print_node(l), op.symbol(), print_node(r))
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum TokKind {
    Number(f64),
    Int(u32),
    Ident(String),
    Op(char),
    LParen,
    RParen,
}

impl TokKind {
    fn describe(&self) -> String {
        match self {
            TokKind::Number(x) => format!("number {x}"),
            TokKind::Int(n) => format!("number {n}"),
            TokKind::Ident(s) => format!("`{s}`"),
            TokKind::Op(c) => format!("`{c}`"),
            TokKind::LParen => "`(`".into(),
            TokKind::RParen => "`)`".into(),
        }
    }
}

#[derive(Clone, Debug)]
struct Token {
    kind: TokKind,
    offset: usize,
}

fn expected(items: &[&str]) -> Vec<String> {
    items.iter().map(|s| s.to_string()).collect()
}

const OPERAND: &[&str] = &["number", "u", "v", "sin", "cos", "exp", "(", "-"];

fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' | b'-' | b'*' | b'/' | b'^' => {
                out.push(Token {
                    kind: TokKind::Op(c as char),
                    offset: start,
                });
                i += 1;
            }
            b'(' => {
                out.push(Token {
                    kind: TokKind::LParen,
                    offset: start,
                });
                i += 1;
            }
            b')' => {
                out.push(Token {
                    kind: TokKind::RParen,
                    offset: start,
                });
                i += 1;
            }
            b'0'..=b'9' | b'.' => {
                let mut integral = true;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if i < bytes.len() && bytes[i] == b'.' {
                    integral = false;
                    i += 1;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        integral = false;
                        i = j;
                        while i < bytes.len() && bytes[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let text = &src[start..i];
                let bad = || ParseError::Syntax {
                    offset: start,
                    found: format!("`{text}`"),
                    expected: expected(&["finite number"]),
                };
                let value: f64 = text.parse().map_err(|_| bad())?;
                if !value.is_finite() {
                    return Err(bad());
                }
                let kind = match (integral, text.parse::<u32>()) {
                    (true, Ok(n)) => TokKind::Int(n),
                    _ => TokKind::Number(value),
                };
                out.push(Token { kind, offset: start });
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push(Token {
                    kind: TokKind::Ident(src[start..i].to_string()),
                    offset: start,
                });
            }
            _ => {
                let ch = src[start..].chars().next().unwrap_or('?');
                return Err(ParseError::Syntax {
                    offset: start,
                    found: format!("`{ch}`"),
                    expected: expected(OPERAND),
                });
            }
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn peek_op(&self) -> Option<char> {
        match self.peek() {
            Some(Token {
                kind: TokKind::Op(c), ..
            }) => Some(*c),
            _ => None,
        }
    }

    fn offset(&self) -> usize {
        self.peek().map_or(self.end, |t| t.offset)
    }

    fn found(&self) -> String {
        self.peek()
            .map_or_else(|| "end of input".to_string(), |t| t.kind.describe())
    }

    fn error(&self, exp: &[&str]) -> ParseError {
        ParseError::Syntax {
            offset: self.offset(),
            found: self.found(),
            expected: expected(exp),
        }
    }

    fn expr(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.term()?;
        while let Some(op @ ('+' | '-')) = self.peek_op() {
            self.pos += 1;
            let rhs = self.term()?;
            let op = if op == '+' { BinOp::Add } else { BinOp::Sub };
            lhs = Node::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.unary()?;
        while let Some(op @ ('*' | '/')) = self.peek_op() {
            self.pos += 1;
            let rhs_offset = self.offset();
            let rhs = self.unary()?;
            let op = if op == '*' {
                BinOp::Mul
            } else {
                if matches!(rhs, Node::Literal(x) if x == 0.0) {
                    return Err(ParseError::ZeroDivisor { offset: rhs_offset });
                }
                BinOp::Div
            };
            lhs = Node::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Node, ParseError> {
        if self.peek_op() == Some('-') {
            self.pos += 1;
            return Ok(Node::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Node, ParseError> {
        let mut base = self.primary()?;
        while self.peek_op() == Some('^') {
            self.pos += 1;
            match self.peek() {
                Some(Token {
                    kind: TokKind::Int(n), ..
                }) => {
                    base = Node::Pow(Box::new(base), *n);
                    self.pos += 1;
                }
                _ => return Err(self.error(&["non-negative integer exponent"])),
            }
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Node, ParseError> {
        let Some(tok) = self.peek().cloned() else {
            return Err(self.error(OPERAND));
        };
        match tok.kind {
            TokKind::Number(x) => {
                self.pos += 1;
                Ok(Node::Literal(x))
            }
            TokKind::Int(n) => {
                self.pos += 1;
                Ok(Node::Literal(n as f64))
            }
            TokKind::LParen => {
                self.pos += 1;
                let inner = self.expr()?;
                self.close_paren()?;
                Ok(inner)
            }
            TokKind::Ident(name) => {
                self.pos += 1;
                let func = match name.as_str() {
                    "u" => return Ok(Node::Var(Var::U)),
                    "v" => return Ok(Node::Var(Var::V)),
                    "sin" => Func::Sin,
                    "cos" => Func::Cos,
                    "exp" => Func::Exp,
                    _ => {
                        return Err(ParseError::UnknownIdentifier {
                            name,
                            offset: tok.offset,
                        })
                    }
                };
                if self.peek().map(|t| &t.kind) != Some(&TokKind::LParen) {
                    return Err(self.error(&["("]));
                }
                self.pos += 1;
                let arg = self.expr()?;
                self.close_paren()?;
                Ok(Node::Call(func, Box::new(arg)))
            }
            _ => Err(self.error(OPERAND)),
        }
    }

    fn close_paren(&mut self) -> Result<(), ParseError> {
        if self.peek().map(|t| &t.kind) == Some(&TokKind::RParen) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&[")", "^", "*", "/", "+", "-"]))
        }
    }
}
