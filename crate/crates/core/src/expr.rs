//! Rate expressions in one integer variable `i`.
//!
//! Grammar, lowest precedence first:
//!
//! ```text
//! sum     := product (('+' | '-') product)*
//! product := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' exponent)?
//! exponent:= '-' exponent | power          (right associative)
//! primary := number | 'i' | '$' name | name '(' args ')' | '(' sum ')'
//! ```
//!
//! Functions: `min(x, y)`, `max(x, y)`, `sqrt(x)`, `log(x)` and
//! `if_even(x, y)` which yields `x` when `i` is even and `y` otherwise.
//! Evaluation happens in the extended reals; any NaN is an error, as is a
//! division by zero.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        message: String,
        line: usize,
        column: usize,
    },
    #[error("`{expression}` at i = {index}: {message}")]
    Evaluation {
        expression: String,
        index: i64,
        message: String,
    },
    #[error("unbound parameter `${0}`")]
    UnboundParameter(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Func {
    Min,
    Max,
    Sqrt,
    Log,
    IfEven,
}

impl Func {
    fn lookup(name: &str) -> Option<(Func, usize)> {
        Some(match name {
            "min" => (Func::Min, 2),
            "max" => (Func::Max, 2),
            "sqrt" => (Func::Sqrt, 1),
            "log" => (Func::Log, 1),
            "if_even" => (Func::IfEven, 2),
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Num(f64),
    Index,
    Param(String),
    Neg(Box<Node>),
    Bin(BinOp, Box<Node>, Box<Node>),
    Call(Func, Vec<Node>),
}

/// A parsed rate expression together with its source text.
#[derive(Debug, Clone, PartialEq)]
pub struct RateExpression {
    source: String,
    root: Node,
}

impl fmt::Display for RateExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.source)
    }
}

impl RateExpression {
    pub fn parse(source: &str) -> Result<Self, ExprError> {
        let tokens = lex(source)?;
        let mut parser = Parser {
            tokens,
            pos: 0,
            source,
        };
        let root = parser.sum()?;
        if let Some(tok) = parser.peek() {
            return Err(parser.error_at(tok, format!("unexpected {}", tok.kind)));
        }
        Ok(Self {
            source: source.to_string(),
            root,
        })
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    /// Names of `$parameters` that still need a value.
    pub fn parameters(&self) -> BTreeSet<String> {
        fn walk(node: &Node, out: &mut BTreeSet<String>) {
            match node {
                Node::Param(p) => {
                    out.insert(p.clone());
                }
                Node::Neg(x) => walk(x, out),
                Node::Bin(_, a, b) => {
                    walk(a, out);
                    walk(b, out);
                }
                Node::Call(_, args) => args.iter().for_each(|a| walk(a, out)),
                Node::Num(_) | Node::Index => {}
            }
        }
        let mut out = BTreeSet::new();
        walk(&self.root, &mut out);
        out
    }

    /// Substitutes parameter values. The source text keeps the `$name`
    /// spelling so reports still show the template.
    pub fn bind(&self, values: &BTreeMap<String, f64>) -> Self {
        fn subst(node: &Node, values: &BTreeMap<String, f64>) -> Node {
            match node {
                Node::Param(p) => match values.get(p) {
                    Some(&v) => Node::Num(v),
                    None => node.clone(),
                },
                Node::Neg(x) => Node::Neg(Box::new(subst(x, values))),
                Node::Bin(op, a, b) => {
                    Node::Bin(*op, Box::new(subst(a, values)), Box::new(subst(b, values)))
                }
                Node::Call(f, args) => Node::Call(*f, args.iter().map(|a| subst(a, values)).collect()),
                Node::Num(_) | Node::Index => node.clone(),
            }
        }
        Self {
            source: self.source.clone(),
            root: subst(&self.root, values),
        }
    }

    pub fn eval(&self, i: i64) -> Result<f64, ExprError> {
        let value = self.eval_node(&self.root, i)?;
        if value.is_nan() {
            return Err(self.eval_error(i, "result is not a number"));
        }
        Ok(value)
    }

    fn eval_error(&self, index: i64, message: &str) -> ExprError {
        ExprError::Evaluation {
            expression: self.source.clone(),
            index,
            message: message.to_string(),
        }
    }

    fn eval_node(&self, node: &Node, i: i64) -> Result<f64, ExprError> {
        let v = match node {
            Node::Num(x) => *x,
            Node::Index => i as f64,
            Node::Param(p) => return Err(ExprError::UnboundParameter(p.clone())),
            Node::Neg(x) => -self.eval_node(x, i)?,
            Node::Bin(op, a, b) => {
                let x = self.eval_node(a, i)?;
                let y = self.eval_node(b, i)?;
                match op {
                    BinOp::Add => x + y,
                    BinOp::Sub => x - y,
                    BinOp::Mul => x * y,
                    BinOp::Div => {
                        if y == 0.0 {
                            return Err(self.eval_error(i, "division by zero"));
                        }
                        x / y
                    }
                    BinOp::Pow => x.powf(y),
                }
            }
            Node::Call(f, args) => {
                let x = self.eval_node(&args[0], i)?;
                match f {
                    Func::Sqrt => x.sqrt(),
                    Func::Log => x.ln(),
                    Func::Min => x.min(self.eval_node(&args[1], i)?),
                    Func::Max => x.max(self.eval_node(&args[1], i)?),
                    Func::IfEven => {
                        let y = self.eval_node(&args[1], i)?;
                        if i.rem_euclid(2) == 0 {
                            x
                        } else {
                            y
                        }
                    }
                }
            }
        };
        if v.is_nan() {
            return Err(self.eval_error(i, "intermediate value is not a number"));
        }
        Ok(v)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum TokenKind {
    Num(f64),
    Ident(String),
    Param(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TokenKind::Num(x) => write!(f, "number {x}"),
            TokenKind::Ident(s) => write!(f, "identifier `{s}`"),
            TokenKind::Param(s) => write!(f, "parameter `${s}`"),
            TokenKind::Plus => f.write_str("`+`"),
            TokenKind::Minus => f.write_str("`-`"),
            TokenKind::Star => f.write_str("`*`"),
            TokenKind::Slash => f.write_str("`/`"),
            TokenKind::Caret => f.write_str("`^`"),
            TokenKind::LParen => f.write_str("`(`"),
            TokenKind::RParen => f.write_str("`)`"),
            TokenKind::Comma => f.write_str("`,`"),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    kind: TokenKind,
    offset: usize,
}

fn position(source: &str, offset: usize) -> (usize, usize) {
    let before = &source[..offset];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

fn syntax(source: &str, offset: usize, message: impl Into<String>) -> ExprError {
    let (line, column) = position(source, offset);
    ExprError::Syntax {
        message: message.into(),
        line,
        column,
    }
}

fn lex(source: &str) -> Result<Vec<Token>, ExprError> {
    let bytes = source.as_bytes();
    let mut tokens = Vec::new();
    let mut pos = 0;
    while pos < bytes.len() {
        let c = bytes[pos];
        let start = pos;
        let simple = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                pos += 1;
                continue;
            }
            b'+' => Some(TokenKind::Plus),
            b'-' => Some(TokenKind::Minus),
            b'*' => Some(TokenKind::Star),
            b'/' => Some(TokenKind::Slash),
            b'^' => Some(TokenKind::Caret),
            b'(' => Some(TokenKind::LParen),
            b')' => Some(TokenKind::RParen),
            b',' => Some(TokenKind::Comma),
            _ => None,
        };
        if let Some(kind) = simple {
            tokens.push(Token { kind, offset: start });
            pos += 1;
            continue;
        }
        if c.is_ascii_digit() || c == b'.' {
            while pos < bytes.len() && (bytes[pos].is_ascii_digit() || bytes[pos] == b'.') {
                pos += 1;
            }
            if pos < bytes.len() && (bytes[pos] == b'e' || bytes[pos] == b'E') {
                let mut look = pos + 1;
                if look < bytes.len() && (bytes[look] == b'+' || bytes[look] == b'-') {
                    look += 1;
                }
                if look < bytes.len() && bytes[look].is_ascii_digit() {
                    pos = look;
                    while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                        pos += 1;
                    }
                }
            }
            let text = &source[start..pos];
            let value: f64 = text
                .parse()
                .map_err(|_| syntax(source, start, format!("malformed number `{text}`")))?;
            tokens.push(Token {
                kind: TokenKind::Num(value),
                offset: start,
            });
            continue;
        }
        let ident_start = if c == b'$' { pos + 1 } else { pos };
        let mut end = ident_start;
        while end < bytes.len() && (bytes[end].is_ascii_alphanumeric() || bytes[end] == b'_') {
            end += 1;
        }
        if end == ident_start || bytes[ident_start].is_ascii_digit() {
            let ch = source[start..].chars().next().unwrap_or('?');
            return Err(syntax(source, start, format!("unexpected character `{ch}`")));
        }
        let name = source[ident_start..end].to_string();
        let kind = if c == b'$' {
            TokenKind::Param(name)
        } else {
            TokenKind::Ident(name)
        };
        tokens.push(Token { kind, offset: start });
        pos = end;
    }
    Ok(tokens)
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    source: &'a str,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn error_at(&self, tok: &Token, message: String) -> ExprError {
        syntax(self.source, tok.offset, message)
    }

    fn error_eof(&self, message: &str) -> ExprError {
        syntax(self.source, self.source.len(), message)
    }

    fn eat(&mut self, kind: &TokenKind) -> bool {
        if self.peek().is_some_and(|t| &t.kind == kind) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, kind: TokenKind) -> Result<(), ExprError> {
        match self.peek() {
            Some(t) if t.kind == kind => {
                self.pos += 1;
                Ok(())
            }
            Some(t) => Err(self.error_at(t, format!("expected {kind}, found {}", t.kind))),
            None => Err(self.error_eof(&format!("expected {kind}, found end of input"))),
        }
    }

    fn sum(&mut self) -> Result<Node, ExprError> {
        let mut lhs = self.product()?;
        loop {
            let op = if self.eat(&TokenKind::Plus) {
                BinOp::Add
            } else if self.eat(&TokenKind::Minus) {
                BinOp::Sub
            } else {
                return Ok(lhs);
            };
            let rhs = self.product()?;
            lhs = Node::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn product(&mut self) -> Result<Node, ExprError> {
        let mut lhs = self.unary()?;
        loop {
            let op = if self.eat(&TokenKind::Star) {
                BinOp::Mul
            } else if self.eat(&TokenKind::Slash) {
                BinOp::Div
            } else {
                return Ok(lhs);
            };
            let rhs = self.unary()?;
            lhs = Node::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<Node, ExprError> {
        if self.eat(&TokenKind::Minus) {
            return Ok(Node::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Node, ExprError> {
        let base = self.primary()?;
        if self.eat(&TokenKind::Caret) {
            let exponent = self.exponent()?;
            return Ok(Node::Bin(BinOp::Pow, Box::new(base), Box::new(exponent)));
        }
        Ok(base)
    }

    fn exponent(&mut self) -> Result<Node, ExprError> {
        if self.eat(&TokenKind::Minus) {
            return Ok(Node::Neg(Box::new(self.exponent()?)));
        }
        self.power()
    }

    fn primary(&mut self) -> Result<Node, ExprError> {
        let Some(tok) = self.peek().cloned() else {
            return Err(self.error_eof("unexpected end of input"));
        };
        self.pos += 1;
        match tok.kind.clone() {
            TokenKind::Num(x) => Ok(Node::Num(x)),
            TokenKind::Param(name) => Ok(Node::Param(name)),
            TokenKind::LParen => {
                let inner = self.sum()?;
                self.expect(TokenKind::RParen)?;
                Ok(inner)
            }
            TokenKind::Ident(name) if name == "i" => Ok(Node::Index),
            TokenKind::Ident(name) => {
                let Some((func, arity)) = Func::lookup(&name) else {
                    return Err(self.error_at(&tok, format!("unknown function `{name}`")));
                };
                self.expect(TokenKind::LParen)?;
                let mut args = vec![self.sum()?];
                while self.eat(&TokenKind::Comma) {
                    args.push(self.sum()?);
                }
                if args.len() != arity {
                    return Err(self.error_at(
                        &tok,
                        format!("`{name}` takes {arity} argument(s), got {}", args.len()),
                    ));
                }
                self.expect(TokenKind::RParen)?;
                Ok(Node::Call(func, args))
            }
            kind => Err(self.error_at(&tok, format!("unexpected {kind}"))),
        }
    }
}
