//! Arithmetic expressions over state variables, compiled once to a tree and
//! evaluated in the integrator's inner loop.
//!
//! Grammar: `+ - * / ^`, unary minus, parentheses, `sin cos exp`, constants
//! `pi` and `e`, variables `x1..xd` (and `x` when `d = 1`). `^` binds tighter
//! than unary minus and associates to the right.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
enum Func {
    Sin,
    Cos,
    Exp,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Const(f64),
    Var(usize),
    Neg(Box<Node>),
    Call(Func, Box<Node>),
    Bin(BinOp, Box<Node>, Box<Node>),
}

impl Node {
    fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Node::Const(c) => *c,
            Node::Var(i) => x[*i],
            Node::Neg(a) => -a.eval(x),
            Node::Call(f, a) => {
                let v = a.eval(x);
                match f {
                    Func::Sin => v.sin(),
                    Func::Cos => v.cos(),
                    Func::Exp => v.exp(),
                }
            }
            Node::Bin(op, a, b) => {
                let (a, b) = (a.eval(x), b.eval(x));
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => a / b,
                    BinOp::Pow => pow(a, b),
                }
            }
        }
    }

    /// Folds constant subtrees.
    fn simplify(self) -> Node {
        match self {
            Node::Neg(a) => match a.simplify() {
                Node::Const(c) => Node::Const(-c),
                a => Node::Neg(Box::new(a)),
            },
            Node::Call(f, a) => match a.simplify() {
                Node::Const(c) => Node::Const(Node::Call(f, Box::new(Node::Const(c))).eval(&[])),
                a => Node::Call(f, Box::new(a)),
            },
            Node::Bin(op, a, b) => match (a.simplify(), b.simplify()) {
                (Node::Const(a), Node::Const(b)) => {
                    Node::Const(Node::Bin(op, Box::new(Node::Const(a)), Box::new(Node::Const(b))).eval(&[]))
                }
                (a, b) => Node::Bin(op, Box::new(a), Box::new(b)),
            },
            leaf => leaf,
        }
    }
}

fn pow(a: f64, b: f64) -> f64 {
    if b.fract() == 0.0 && b.abs() <= i32::MAX as f64 {
        a.powi(b as i32)
    } else {
        a.powf(b)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Expression {
    source: String,
    dimension: usize,
    root: Node,
}

impl Expression {
    /// Parses `text` over the variables of a `dimension`-dimensional state.
    pub fn parse(text: &str, dimension: usize) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::arg("expression dimension must be positive"));
        }
        let mut p = Parser {
            src: text,
            bytes: text.as_bytes(),
            pos: 0,
            dimension,
        };
        let root = p.expr()?;
        p.skip_ws();
        if p.pos < p.bytes.len() {
            return Err(Error::parse(p.pos, "unexpected trailing input"));
        }
        Ok(Self {
            source: text.trim().to_string(),
            dimension,
            root: root.simplify(),
        })
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dimension);
        self.root.eval(x)
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }
}

impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.source)
    }
}

struct Parser<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
    dimension: usize,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Node> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Some(b'+') => BinOp::Add,
                Some(b'-') => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            lhs = Node::Bin(op, Box::new(lhs), Box::new(self.term()?));
        }
    }

    fn term(&mut self) -> Result<Node> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Some(b'*') => BinOp::Mul,
                Some(b'/') => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            lhs = Node::Bin(op, Box::new(lhs), Box::new(self.unary()?));
        }
    }

    fn unary(&mut self) -> Result<Node> {
        if self.eat(b'-') {
            return Ok(Node::Neg(Box::new(self.unary()?)));
        }
        if self.eat(b'+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Node> {
        let base = self.atom()?;
        if self.eat(b'^') {
            let exp = self.unary()?;
            return Ok(Node::Bin(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Node> {
        let start = match self.peek() {
            None => return Err(Error::parse(self.pos, "unexpected end of expression")),
            Some(_) => self.pos,
        };
        let c = self.bytes[start];
        if c == b'(' {
            self.pos += 1;
            let inner = self.expr()?;
            if !self.eat(b')') {
                return Err(Error::parse(self.pos, "expected `)`"));
            }
            return Ok(inner);
        }
        if c.is_ascii_digit() || c == b'.' {
            return self.number();
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            while self.pos < self.bytes.len()
                && (self.bytes[self.pos].is_ascii_alphanumeric() || self.bytes[self.pos] == b'_')
            {
                self.pos += 1;
            }
            let name = &self.src[start..self.pos];
            let func = match name {
                "sin" => Some(Func::Sin),
                "cos" => Some(Func::Cos),
                "exp" => Some(Func::Exp),
                _ => None,
            };
            if let Some(f) = func {
                if !self.eat(b'(') {
                    return Err(Error::parse(self.pos, format!("expected `(` after `{name}`")));
                }
                let arg = self.expr()?;
                if !self.eat(b')') {
                    return Err(Error::parse(self.pos, "expected `)`"));
                }
                return Ok(Node::Call(f, Box::new(arg)));
            }
            return match name {
                "pi" => Ok(Node::Const(std::f64::consts::PI)),
                "e" => Ok(Node::Const(std::f64::consts::E)),
                "x" if self.dimension == 1 => Ok(Node::Var(0)),
                _ => match name.strip_prefix('x').and_then(|k| k.parse::<usize>().ok()) {
                    Some(k) if (1..=self.dimension).contains(&k) => Ok(Node::Var(k - 1)),
                    _ => Err(Error::parse(start, format!("unknown identifier `{name}`"))),
                },
            };
        }
        Err(Error::parse(start, format!("unexpected character `{}`", c as char)))
    }

    fn number(&mut self) -> Result<Node> {
        let start = self.pos;
        let b = self.bytes;
        let digits = |p: &mut usize| {
            while *p < b.len() && b[*p].is_ascii_digit() {
                *p += 1;
            }
        };
        digits(&mut self.pos);
        if self.pos < b.len() && b[self.pos] == b'.' {
            self.pos += 1;
            digits(&mut self.pos);
        }
        // exponent only when followed by digits, so `2e` stays an error and `e` a constant
        if self.pos < b.len() && (b[self.pos] == b'e' || b[self.pos] == b'E') {
            let mut p = self.pos + 1;
            if p < b.len() && (b[p] == b'+' || b[p] == b'-') {
                p += 1;
            }
            if p < b.len() && b[p].is_ascii_digit() {
                digits(&mut p);
                self.pos = p;
            }
        }
        self.src[start..self.pos]
            .parse::<f64>()
            .map(Node::Const)
            .map_err(|_| Error::parse(start, "malformed number"))
    }
}
