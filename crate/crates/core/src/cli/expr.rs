//! Arithmetic expressions over the variables `u, x, y, p, s`.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' unary)?
//! primary := number | var | func '(' expr ')' | '(' expr ')'
//! ```
//!
//! `^` is right-associative and binds tighter than unary minus, so `-x^2`
//! is `-(x^2)`.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Var {
    U,
    X,
    Y,
    P,
    S,
}

impl Var {
    pub const ALL: [Var; 5] = [Var::U, Var::X, Var::Y, Var::P, Var::S];

    pub fn name(self) -> &'static str {
        match self {
            Var::U => "u",
            Var::X => "x",
            Var::Y => "y",
            Var::P => "p",
            Var::S => "s",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Tanh,
    Exp,
    Log,
    Sqrt,
    Abs,
}

impl Func {
    const ALL: [Func; 8] = [Func::Sin, Func::Cos, Func::Tan, Func::Tanh, Func::Exp, Func::Log, Func::Sqrt, Func::Abs];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Tanh => "tanh",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
            BinOp::Pow => '^',
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExprKind {
    Num(f64),
    Var(Var),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

/// A node with its byte range in the source. Equality ignores spans.
#[derive(Debug, Clone)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error("syntax error at byte {offset}: expected {}", .expected.join(" or "))]
    Syntax { offset: usize, expected: Vec<&'static str> },
    #[error("{message} at bytes {}..{}", .span.start, .span.end)]
    Domain { span: Span, message: String },
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.src[self.pos..].starts_with(|c: char| c.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn fail<T>(&self, expected: &[&'static str]) -> Result<T, ExprError> {
        Err(ExprError::Syntax { offset: self.pos, expected: expected.to_vec() })
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Some('+') => BinOp::Add,
                Some('-') => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.term()?;
            lhs = binary(op, lhs, rhs);
        }
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Some('*') => BinOp::Mul,
                Some('/') => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = binary(op, lhs, rhs);
        }
    }

    fn unary(&mut self) -> Result<Expr, ExprError> {
        if self.peek() == Some('-') {
            let start = self.pos;
            self.pos += 1;
            let inner = self.unary()?;
            let span = Span { start, end: inner.span.end };
            return Ok(Expr { kind: ExprKind::Neg(Box::new(inner)), span });
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ExprError> {
        let base = self.primary()?;
        if self.eat('^') {
            let exp = self.unary()?;
            return Ok(binary(BinOp::Pow, base, exp));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr, ExprError> {
        const START: &[&str] = &["number", "variable", "function", "'('", "'-'"];
        match self.peek() {
            Some('(') => {
                let open = self.pos;
                self.pos += 1;
                let inner = self.expr()?;
                if !self.eat(')') {
                    return self.fail(&["')'", "operator"]);
                }
                Ok(Expr { kind: inner.kind, span: Span { start: open, end: self.pos } })
            }
            Some(c) if c.is_ascii_digit() || c == '.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => {
                let begin = self.pos;
                while self.src[self.pos..].starts_with(|c: char| c.is_ascii_alphanumeric() || c == '_') {
                    self.pos += 1;
                }
                let word = &self.src[begin..self.pos];
                if let Some(v) = Var::ALL.into_iter().find(|v| v.name() == word) {
                    return Ok(Expr { kind: ExprKind::Var(v), span: Span { start: begin, end: self.pos } });
                }
                if let Some(f) = Func::ALL.into_iter().find(|f| f.name() == word) {
                    if !self.eat('(') {
                        return self.fail(&["'('"]);
                    }
                    let arg = self.expr()?;
                    if !self.eat(')') {
                        return self.fail(&["')'", "operator"]);
                    }
                    return Ok(Expr { kind: ExprKind::Call(f, Box::new(arg)), span: Span { start: begin, end: self.pos } });
                }
                self.pos = begin;
                self.fail(&["variable (u, x, y, p, s)", "function"])
            }
            _ => self.fail(START),
        }
    }

    fn number(&mut self) -> Result<Expr, ExprError> {
        let begin = self.pos;
        let bytes = self.src.as_bytes();
        let digits = |p: &mut usize| {
            let s = *p;
            while *p < bytes.len() && bytes[*p].is_ascii_digit() {
                *p += 1;
            }
            *p > s
        };
        let mut p = self.pos;
        let int = digits(&mut p);
        let mut frac = false;
        if p < bytes.len() && bytes[p] == b'.' {
            p += 1;
            frac = digits(&mut p);
        }
        if !int && !frac {
            self.pos = p;
            return self.fail(&["digit"]);
        }
        if p < bytes.len() && (bytes[p] == b'e' || bytes[p] == b'E') {
            let mut q = p + 1;
            if q < bytes.len() && (bytes[q] == b'+' || bytes[q] == b'-') {
                q += 1;
            }
            if !digits(&mut q) {
                self.pos = q;
                return self.fail(&["exponent digits"]);
            }
            p = q;
        }
        let text = &self.src[begin..p];
        let value: f64 = text.parse().expect("lexed as a float literal");
        if !value.is_finite() {
            self.pos = begin;
            return self.fail(&["finite number"]);
        }
        self.pos = p;
        Ok(Expr { kind: ExprKind::Num(value), span: Span { start: begin, end: p } })
    }
}

fn binary(op: BinOp, lhs: Expr, rhs: Expr) -> Expr {
    let span = Span { start: lhs.span.start, end: rhs.span.end };
    Expr { kind: ExprKind::Bin(op, Box::new(lhs), Box::new(rhs)), span }
}

pub fn parse_expression(src: &str) -> Result<Expr, ExprError> {
    let mut p = Parser { src, pos: 0 };
    let e = p.expr()?;
    if p.peek().is_some() {
        return p.fail(&["operator", "end of input"]);
    }
    Ok(e)
}

/// Values of the variables; `None` marks a variable the context does not provide.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Env {
    pub u: Option<f64>,
    pub x: Option<f64>,
    pub y: Option<f64>,
    pub p: Option<f64>,
    pub s: Option<f64>,
}

impl Env {
    fn get(&self, v: Var) -> Option<f64> {
        match v {
            Var::U => self.u,
            Var::X => self.x,
            Var::Y => self.y,
            Var::P => self.p,
            Var::S => self.s,
        }
    }
}

impl Expr {
    pub fn eval(&self, env: &Env) -> Result<f64, ExprError> {
        let domain = |message: String| Err(ExprError::Domain { span: self.span, message });
        let v = match &self.kind {
            ExprKind::Num(v) => *v,
            ExprKind::Var(v) => match env.get(*v) {
                Some(x) => x,
                None => return domain(format!("variable {} is not available here", v.name())),
            },
            ExprKind::Neg(e) => -e.eval(env)?,
            ExprKind::Bin(op, a, b) => {
                let (a, b) = (a.eval(env)?, b.eval(env)?);
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div if b == 0.0 => return domain("division by zero".into()),
                    BinOp::Div => a / b,
                    BinOp::Pow => a.powf(b),
                }
            }
            ExprKind::Call(f, e) => {
                let a = e.eval(env)?;
                match f {
                    Func::Log if a <= 0.0 => return domain(format!("log of non-positive value {a}")),
                    Func::Sqrt if a < 0.0 => return domain(format!("sqrt of negative value {a}")),
                    Func::Sin => a.sin(),
                    Func::Cos => a.cos(),
                    Func::Tan => a.tan(),
                    Func::Tanh => a.tanh(),
                    Func::Exp => a.exp(),
                    Func::Log => a.ln(),
                    Func::Sqrt => a.sqrt(),
                    Func::Abs => a.abs(),
                }
            }
        };
        if !v.is_finite() {
            return domain(format!("non-finite value {v}"));
        }
        Ok(v)
    }

    /// Variables occurring in the expression, sorted and deduplicated.
    pub fn vars(&self) -> Vec<Var> {
        fn walk(e: &Expr, out: &mut Vec<Var>) {
            match &e.kind {
                ExprKind::Num(_) => {}
                ExprKind::Var(v) => out.push(*v),
                ExprKind::Neg(a) | ExprKind::Call(_, a) => walk(a, out),
                ExprKind::Bin(_, a, b) => {
                    walk(a, out);
                    walk(b, out);
                }
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out.sort();
        out.dedup();
        out
    }

    /// The value if the expression has no variables.
    pub fn constant(&self) -> Option<f64> {
        self.vars().is_empty().then(|| self.eval(&Env::default()).ok()).flatten()
    }
}

/// Fully parenthesized, so printing and reparsing preserves the tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ExprKind::Num(v) => write!(f, "{v:?}"),
            ExprKind::Var(v) => f.write_str(v.name()),
            ExprKind::Neg(e) => write!(f, "(-{e})"),
            ExprKind::Bin(op, a, b) => write!(f, "({a} {} {b})", op.symbol()),
            ExprKind::Call(func, e) => write!(f, "{}({e})", func.name()),
        }
    }
}
