//! Arithmetic expressions in one variable `x` for user-supplied coefficients.
//!
//! Grammar (lowest to highest precedence):
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' exponent)?        right-associative
//! exponent:= '-' exponent | power
//! primary := number | 'x' | 'pi' | param | func '(' expr ')' | '(' expr ')'
//! ```
//!
//! `-a^b` is rejected as ambiguous; write `-(a^b)` or `(-a)^b`.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Tanh,
    Sinh,
    Cosh,
    Sech,
    Exp,
    Log,
    Sqrt,
    Arcsinh,
    Abs,
}

impl Func {
    const ALL: [Func; 12] = [
        Func::Sin,
        Func::Cos,
        Func::Tan,
        Func::Tanh,
        Func::Sinh,
        Func::Cosh,
        Func::Sech,
        Func::Exp,
        Func::Log,
        Func::Sqrt,
        Func::Arcsinh,
        Func::Abs,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Tanh => "tanh",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Sech => "sech",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Arcsinh => "arcsinh",
            Func::Abs => "abs",
        }
    }

    fn lookup(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }

    fn apply(self, v: f64) -> f64 {
        match self {
            Func::Sin => v.sin(),
            Func::Cos => v.cos(),
            Func::Tan => v.tan(),
            Func::Tanh => v.tanh(),
            Func::Sinh => v.sinh(),
            Func::Cosh => v.cosh(),
            Func::Sech => 1.0 / v.cosh(),
            Func::Exp => v.exp(),
            Func::Log => v.ln(),
            Func::Sqrt => v.sqrt(),
            Func::Arcsinh => v.asinh(),
            Func::Abs => v.abs(),
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
pub enum Expr {
    Const(f64),
    Var,
    /// A named parameter, resolved to its value when parsed.
    Param {
        name: String,
        value: f64,
    },
    Neg(Box<Expr>),
    Binary {
        op: BinOp,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
    Call {
        func: Func,
        arg: Box<Expr>,
    },
}

impl Expr {
    /// Whether the expression refers to the variable `x`.
    pub fn uses_var(&self) -> bool {
        match self {
            Expr::Var => true,
            Expr::Const(_) | Expr::Param { .. } => false,
            Expr::Neg(e) => e.uses_var(),
            Expr::Binary { lhs, rhs, .. } => lhs.uses_var() || rhs.uses_var(),
            Expr::Call { arg, .. } => arg.uses_var(),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Expr::Const(c) => *c,
            Expr::Var => x,
            Expr::Param { value, .. } => *value,
            Expr::Neg(e) => -e.eval(x),
            Expr::Binary { op, lhs, rhs } => {
                let (a, b) = (lhs.eval(x), rhs.eval(x));
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => a / b,
                    BinOp::Pow => pow(a, b),
                }
            }
            Expr::Call { func, arg } => func.apply(arg.eval(x)),
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

/// Fully parenthesized rendering that parses back to the same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) if *c < 0.0 => write!(f, "(-{:?})", -c),
            Expr::Const(c) => write!(f, "{c:?}"),
            Expr::Var => f.write_str("x"),
            Expr::Param { name, .. } => f.write_str(name),
            Expr::Neg(e) => write!(f, "(-{e})"),
            Expr::Binary { op, lhs, rhs } => write!(f, "({lhs}{}{rhs})", op.symbol()),
            Expr::Call { func, arg } => write!(f, "{}({arg})", func.name()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    End,
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn tokens(src: &'a str) -> std::result::Result<Vec<(Tok, usize)>, (usize, String)> {
        let mut lx = Lexer { src, pos: 0 };
        let mut out = Vec::new();
        loop {
            let (tok, at) = lx.next()?;
            let end = tok == Tok::End;
            out.push((tok, at));
            if end {
                return Ok(out);
            }
        }
    }

    fn peek_byte(&self) -> Option<u8> {
        self.src.as_bytes().get(self.pos).copied()
    }

    fn next(&mut self) -> std::result::Result<(Tok, usize), (usize, String)> {
        while matches!(self.peek_byte(), Some(b) if b.is_ascii_whitespace()) {
            self.pos += 1;
        }
        let start = self.pos;
        let Some(b) = self.peek_byte() else {
            return Ok((Tok::End, start));
        };
        match b {
            b'0'..=b'9' | b'.' => {
                let bytes = self.src.as_bytes();
                while self.pos < bytes.len()
                    && (bytes[self.pos].is_ascii_digit() || bytes[self.pos] == b'.')
                {
                    self.pos += 1;
                }
                if self.pos < bytes.len() && (bytes[self.pos] == b'e' || bytes[self.pos] == b'E') {
                    let mut p = self.pos + 1;
                    if p < bytes.len() && (bytes[p] == b'+' || bytes[p] == b'-') {
                        p += 1;
                    }
                    if p < bytes.len() && bytes[p].is_ascii_digit() {
                        while p < bytes.len() && bytes[p].is_ascii_digit() {
                            p += 1;
                        }
                        self.pos = p;
                    }
                }
                let text = &self.src[start..self.pos];
                text.parse::<f64>()
                    .map(|v| (Tok::Num(v), start))
                    .map_err(|_| (start, format!("malformed number '{text}'")))
            }
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                let bytes = self.src.as_bytes();
                while self.pos < bytes.len()
                    && (bytes[self.pos].is_ascii_alphanumeric() || bytes[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                Ok((Tok::Ident(self.src[start..self.pos].to_string()), start))
            }
            b'+' | b'-' | b'*' | b'/' | b'^' => {
                self.pos += 1;
                Ok((Tok::Op(b as char), start))
            }
            b'(' => {
                self.pos += 1;
                Ok((Tok::LParen, start))
            }
            b')' => {
                self.pos += 1;
                Ok((Tok::RParen, start))
            }
            _ => {
                let ch = self.src[start..].chars().next().unwrap_or('?');
                Err((start, format!("unexpected character '{ch}'")))
            }
        }
    }
}

struct Parser<'p> {
    toks: Vec<(Tok, usize)>,
    at: usize,
    params: &'p BTreeMap<String, f64>,
}

type PResult<T> = std::result::Result<T, (usize, String)>;

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn offset(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> Tok {
        let tok = self.toks[self.at].0.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        tok
    }

    fn expr(&mut self) -> PResult<Expr> {
        let mut lhs = self.term()?;
        while let Tok::Op(c @ ('+' | '-')) = *self.peek() {
            self.bump();
            let rhs = self.term()?;
            let op = if c == '+' { BinOp::Add } else { BinOp::Sub };
            lhs = Expr::Binary {
                op,
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
            };
        }
        Ok(lhs)
    }

    fn term(&mut self) -> PResult<Expr> {
        let mut lhs = self.unary()?;
        while let Tok::Op(c @ ('*' | '/')) = *self.peek() {
            self.bump();
            let rhs = self.unary()?;
            let op = if c == '*' { BinOp::Mul } else { BinOp::Div };
            lhs = Expr::Binary {
                op,
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
            };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> PResult<Expr> {
        if *self.peek() == Tok::Op('-') {
            let minus_at = self.offset();
            self.bump();
            let operand = self.negated_operand(minus_at)?;
            return Ok(Expr::Neg(Box::new(operand)));
        }
        self.power()
    }

    /// Operand of a unary minus: another negation or a primary that must
    /// not be raised to a power.
    fn negated_operand(&mut self, minus_at: usize) -> PResult<Expr> {
        if *self.peek() == Tok::Op('-') {
            let inner_at = self.offset();
            self.bump();
            return Ok(Expr::Neg(Box::new(self.negated_operand(inner_at)?)));
        }
        let base = self.primary()?;
        if *self.peek() == Tok::Op('^') {
            return Err((
                minus_at,
                "ambiguous '-a^b': write -(a^b) or (-a)^b".to_string(),
            ));
        }
        Ok(base)
    }

    fn power(&mut self) -> PResult<Expr> {
        let base = self.primary()?;
        if *self.peek() == Tok::Op('^') {
            self.bump();
            let exponent = self.exponent()?;
            return Ok(Expr::Binary {
                op: BinOp::Pow,
                lhs: Box::new(base),
                rhs: Box::new(exponent),
            });
        }
        Ok(base)
    }

    fn exponent(&mut self) -> PResult<Expr> {
        if *self.peek() == Tok::Op('-') {
            let minus_at = self.offset();
            self.bump();
            return Ok(Expr::Neg(Box::new(self.negated_operand(minus_at)?)));
        }
        self.power()
    }

    fn primary(&mut self) -> PResult<Expr> {
        let at = self.offset();
        match self.bump() {
            Tok::Num(v) => Ok(Expr::Const(v)),
            Tok::LParen => {
                let inner = self.expr()?;
                self.expect_rparen(at)?;
                Ok(inner)
            }
            Tok::Ident(name) => {
                if *self.peek() == Tok::LParen {
                    let func = Func::lookup(&name)
                        .ok_or_else(|| (at, format!("unknown function '{name}'")))?;
                    self.bump();
                    let arg = self.expr()?;
                    self.expect_rparen(at)?;
                    return Ok(Expr::Call {
                        func,
                        arg: Box::new(arg),
                    });
                }
                if name == "x" {
                    Ok(Expr::Var)
                } else if let Some(&value) = self.params.get(&name) {
                    Ok(Expr::Param { name, value })
                } else if name == "pi" {
                    Ok(Expr::Const(std::f64::consts::PI))
                } else if Func::lookup(&name).is_some() {
                    Err((
                        at,
                        format!("function '{name}' needs an argument in parentheses"),
                    ))
                } else {
                    Err((at, format!("unknown identifier '{name}'")))
                }
            }
            Tok::End => Err((at, "unexpected end of expression".to_string())),
            Tok::RParen => Err((at, "unexpected ')'".to_string())),
            Tok::Op(c) => Err((at, format!("unexpected operator '{c}'"))),
        }
    }

    fn expect_rparen(&mut self, open_at: usize) -> PResult<()> {
        match self.peek() {
            Tok::RParen => {
                self.bump();
                Ok(())
            }
            Tok::End => Err((open_at, "unclosed '('".to_string())),
            _ => Err((self.offset(), "expected ')'".to_string())),
        }
    }
}

/// Parse `src`, returning the byte offset and message on failure.
pub(crate) fn parse_at(
    src: &str,
    params: &BTreeMap<String, f64>,
) -> std::result::Result<Expr, (usize, String)> {
    let toks = Lexer::tokens(src)?;
    let mut parser = Parser {
        toks,
        at: 0,
        params,
    };
    let expr = parser.expr()?;
    match parser.peek() {
        Tok::End => Ok(expr),
        Tok::RParen => Err((parser.offset(), "unmatched ')'".to_string())),
        _ => Err((parser.offset(), "unexpected trailing input".to_string())),
    }
}

/// Parse a single-line expression in `x`; errors report line 1 and a
/// 1-based column.
pub fn parse_expression(src: &str, params: &BTreeMap<String, f64>) -> Result<Expr> {
    parse_at(src, params).map_err(|(offset, message)| Error::Parse {
        line: 1,
        column: src[..offset].chars().count() + 1,
        message,
    })
}
