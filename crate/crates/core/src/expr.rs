//! A small arithmetic expression language for per-coordinate map definitions.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' unary)?
//! atom   := number | 'pi' | 'e' | u<i> | x<i> | func '(' expr ')' | '(' expr ')'
//! func   := exp | log | sin | cos | sqrt
//! ```
//!
//! `^` binds tighter than unary minus and is right-associative, so `-u1^2`
//! is `-(u1^2)` and `2^3^2` is `2^(3^2)`.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at byte {offset}: {message}")]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("evaluation error in `{node}`: {message}")]
pub struct EvalError {
    pub node: String,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum VarKind {
    Control,
    State,
}

/// A variable reference; indices are 1-based as written (`u1`, `x3`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Var {
    pub kind: VarKind,
    pub index: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Log,
    Sin,
    Cos,
    Sqrt,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Sqrt => "sqrt",
        }
    }

    fn from_name(s: &str) -> Option<Self> {
        Some(match s {
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "sqrt" => Func::Sqrt,
            _ => return None,
        })
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

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Constant {
    Pi,
    E,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Const(Constant),
    Var(Var),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Tok {
    Num(f64),
    Ident,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn err(&self, offset: usize, message: impl Into<String>) -> ParseError {
        ParseError {
            offset,
            message: message.into(),
        }
    }

    /// Returns the token, its start offset and (for identifiers) its text.
    fn next(&mut self) -> Result<(Tok, usize, &'a str), ParseError> {
        let bytes = self.src.as_bytes();
        while self.pos < bytes.len() && bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        let start = self.pos;
        let Some(&c) = bytes.get(self.pos) else {
            return Ok((Tok::End, start, ""));
        };
        let single = match c {
            b'+' => Some(Tok::Plus),
            b'-' => Some(Tok::Minus),
            b'*' => Some(Tok::Star),
            b'/' => Some(Tok::Slash),
            b'^' => Some(Tok::Caret),
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(t) = single {
            self.pos += 1;
            return Ok((t, start, &self.src[start..self.pos]));
        }
        if c.is_ascii_digit() || c == b'.' {
            let mut end = start;
            while end < bytes.len() && (bytes[end].is_ascii_digit() || bytes[end] == b'.') {
                end += 1;
            }
            if end < bytes.len() && (bytes[end] == b'e' || bytes[end] == b'E') {
                let mut k = end + 1;
                if k < bytes.len() && (bytes[k] == b'+' || bytes[k] == b'-') {
                    k += 1;
                }
                if k < bytes.len() && bytes[k].is_ascii_digit() {
                    while k < bytes.len() && bytes[k].is_ascii_digit() {
                        k += 1;
                    }
                    end = k;
                }
            }
            let text = &self.src[start..end];
            let value: f64 = text
                .parse()
                .map_err(|_| self.err(start, format!("malformed number `{text}`")))?;
            if !value.is_finite() {
                return Err(self.err(start, format!("number `{text}` is out of range")));
            }
            self.pos = end;
            return Ok((Tok::Num(value), start, text));
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            let mut end = start;
            while end < bytes.len() && (bytes[end].is_ascii_alphanumeric() || bytes[end] == b'_') {
                end += 1;
            }
            self.pos = end;
            return Ok((Tok::Ident, start, &self.src[start..end]));
        }
        let ch = self.src[start..].chars().next().unwrap_or('?');
        Err(self.err(start, format!("unexpected character `{ch}`")))
    }
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    tok: Tok,
    offset: usize,
    text: &'a str,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Result<Self, ParseError> {
        let mut lexer = Lexer { src, pos: 0 };
        let (tok, offset, text) = lexer.next()?;
        Ok(Self {
            lexer,
            tok,
            offset,
            text,
        })
    }

    fn bump(&mut self) -> Result<(), ParseError> {
        let (tok, offset, text) = self.lexer.next()?;
        self.tok = tok;
        self.offset = offset;
        self.text = text;
        Ok(())
    }

    fn err(&self, message: impl Into<String>) -> ParseError {
        ParseError {
            offset: self.offset,
            message: message.into(),
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.tok {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump()?;
            let rhs = self.term()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.tok {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump()?;
            let rhs = self.unary()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.tok == Tok::Minus {
            self.bump()?;
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.tok == Tok::Caret {
            self.bump()?;
            let exponent = self.unary()?;
            return Ok(Expr::Bin(BinOp::Pow, Box::new(base), Box::new(exponent)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.tok {
            Tok::Num(v) => {
                self.bump()?;
                Ok(Expr::Num(v))
            }
            Tok::LParen => {
                self.bump()?;
                let inner = self.expr()?;
                if self.tok != Tok::RParen {
                    return Err(self.err("expected `)`"));
                }
                self.bump()?;
                Ok(inner)
            }
            Tok::Ident => {
                let name = self.text;
                let start = self.offset;
                self.bump()?;
                if let Some(func) = Func::from_name(name) {
                    if self.tok != Tok::LParen {
                        return Err(self.err(format!("expected `(` after `{name}`")));
                    }
                    self.bump()?;
                    let arg = self.expr()?;
                    if self.tok != Tok::RParen {
                        return Err(self.err("expected `)`"));
                    }
                    self.bump()?;
                    return Ok(Expr::Call(func, Box::new(arg)));
                }
                match name {
                    "pi" => return Ok(Expr::Const(Constant::Pi)),
                    "e" => return Ok(Expr::Const(Constant::E)),
                    _ => {}
                }
                parse_var(name).map(Expr::Var).ok_or(ParseError {
                    offset: start,
                    message: format!("unknown identifier `{name}`"),
                })
            }
            Tok::End => Err(self.err("unexpected end of input")),
            Tok::RParen => Err(self.err("unbalanced `)`")),
            _ => Err(self.err(format!("unexpected `{}`", self.text))),
        }
    }
}

fn parse_var(name: &str) -> Option<Var> {
    let kind = match name.as_bytes().first()? {
        b'u' => VarKind::Control,
        b'x' => VarKind::State,
        _ => return None,
    };
    let digits = &name[1..];
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) || digits.starts_with('0') {
        return None;
    }
    let index = digits.parse().ok()?;
    Some(Var { kind, index })
}

/// Parses a complete expression; trailing tokens are an error.
pub fn parse(source: &str) -> Result<Expr, ParseError> {
    if source.trim().is_empty() {
        return Err(ParseError {
            offset: 0,
            message: "empty expression".into(),
        });
    }
    let mut p = Parser::new(source)?;
    let e = p.expr()?;
    match p.tok {
        Tok::End => Ok(e),
        Tok::RParen => Err(p.err("unbalanced `)`")),
        _ => Err(p.err(format!("trailing input `{}`", p.text))),
    }
}

/// Variable assignment for evaluation: controls `u1..um`, state `x1..xn`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Env<'a> {
    pub u: &'a [f64],
    pub x: &'a [f64],
}

impl Expr {
    pub fn evaluate(&self, env: &Env<'_>) -> Result<f64, EvalError> {
        let fail = |message: &str| EvalError {
            node: self.to_string(),
            message: message.to_string(),
        };
        let value = match self {
            Expr::Num(v) => *v,
            Expr::Const(Constant::Pi) => std::f64::consts::PI,
            Expr::Const(Constant::E) => std::f64::consts::E,
            Expr::Var(v) => {
                let slot = match v.kind {
                    VarKind::Control => env.u,
                    VarKind::State => env.x,
                };
                *slot
                    .get(v.index - 1)
                    .ok_or_else(|| fail("variable is not assigned"))?
            }
            Expr::Neg(e) => -e.evaluate(env)?,
            Expr::Bin(op, l, r) => {
                let a = l.evaluate(env)?;
                let b = r.evaluate(env)?;
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => {
                        if b == 0.0 {
                            return Err(fail("division by zero"));
                        }
                        a / b
                    }
                    BinOp::Pow => a.powf(b),
                }
            }
            Expr::Call(f, arg) => {
                let a = arg.evaluate(env)?;
                match f {
                    Func::Exp => a.exp(),
                    Func::Log => {
                        if a <= 0.0 {
                            return Err(fail("log of non-positive value"));
                        }
                        a.ln()
                    }
                    Func::Sin => a.sin(),
                    Func::Cos => a.cos(),
                    Func::Sqrt => {
                        if a < 0.0 {
                            return Err(fail("sqrt of negative value"));
                        }
                        a.sqrt()
                    }
                }
            }
        };
        if !value.is_finite() {
            return Err(fail("non-finite result"));
        }
        Ok(value)
    }

    /// Largest variable index of each kind, `(controls, states)`.
    pub fn max_indices(&self) -> (usize, usize) {
        match self {
            Expr::Num(_) | Expr::Const(_) => (0, 0),
            Expr::Var(v) => match v.kind {
                VarKind::Control => (v.index, 0),
                VarKind::State => (0, v.index),
            },
            Expr::Neg(e) | Expr::Call(_, e) => e.max_indices(),
            Expr::Bin(_, l, r) => {
                let (a, b) = l.max_indices();
                let (c, d) = r.max_indices();
                (a.max(c), b.max(d))
            }
        }
    }

    fn level(&self) -> u8 {
        match self {
            Expr::Bin(BinOp::Add | BinOp::Sub, ..) => 1,
            Expr::Bin(BinOp::Mul | BinOp::Div, ..) => 2,
            Expr::Neg(_) => 3,
            Expr::Bin(BinOp::Pow, ..) => 4,
            _ => 5,
        }
    }

    fn write_at(&self, f: &mut fmt::Formatter<'_>, min_level: u8) -> fmt::Result {
        if self.level() < min_level {
            write!(f, "(")?;
            self.write_at(f, 0)?;
            return write!(f, ")");
        }
        match self {
            Expr::Num(v) if *v < 0.0 || (*v == 0.0 && v.is_sign_negative()) => {
                write!(f, "(0 - {})", -v)
            }
            Expr::Num(v) => write!(f, "{v}"),
            Expr::Const(Constant::Pi) => write!(f, "pi"),
            Expr::Const(Constant::E) => write!(f, "e"),
            Expr::Var(v) => match v.kind {
                VarKind::Control => write!(f, "u{}", v.index),
                VarKind::State => write!(f, "x{}", v.index),
            },
            Expr::Neg(e) => {
                write!(f, "-")?;
                e.write_at(f, 3)
            }
            Expr::Bin(op, l, r) => {
                let (sym, lmin, rmin) = match op {
                    BinOp::Add => ("+", 1, 2),
                    BinOp::Sub => ("-", 1, 2),
                    BinOp::Mul => ("*", 2, 3),
                    BinOp::Div => ("/", 2, 3),
                    BinOp::Pow => ("^", 5, 3),
                };
                l.write_at(f, lmin)?;
                write!(f, " {sym} ")?;
                r.write_at(f, rmin)
            }
            Expr::Call(func, arg) => {
                write!(f, "{}(", func.name())?;
                arg.write_at(f, 0)?;
                write!(f, ")")
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_at(f, 0)
    }
}

/// A vector-valued map given by one expression per output coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct CompiledMap {
    exprs: Vec<Expr>,
    controls: usize,
    states: usize,
}

impl CompiledMap {
    /// Parses each coordinate and checks variable indices against the
    /// declared control count `controls` and state count `states`.
    pub fn compile<S: AsRef<str>>(
        sources: &[S],
        controls: usize,
        states: usize,
    ) -> Result<Self, ParseError> {
        let mut exprs = Vec::with_capacity(sources.len());
        for (i, src) in sources.iter().enumerate() {
            let e = parse(src.as_ref()).map_err(|mut err| {
                err.message = format!("coordinate {}: {}", i + 1, err.message);
                err
            })?;
            let (mu, mx) = e.max_indices();
            if mu > controls {
                return Err(ParseError {
                    offset: 0,
                    message: format!(
                        "coordinate {}: u{mu} exceeds the {controls} declared controls",
                        i + 1
                    ),
                });
            }
            if mx > states {
                return Err(ParseError {
                    offset: 0,
                    message: format!(
                        "coordinate {}: x{mx} exceeds the {states} state coordinates",
                        i + 1
                    ),
                });
            }
            exprs.push(e);
        }
        Ok(Self {
            exprs,
            controls,
            states,
        })
    }

    pub fn output_dim(&self) -> usize {
        self.exprs.len()
    }

    pub fn exprs(&self) -> &[Expr] {
        &self.exprs
    }

    pub fn eval(&self, env: &Env<'_>) -> Result<Vec<f64>, EvalError> {
        self.exprs.iter().map(|e| e.evaluate(env)).collect()
    }
}
