//! Tokenizer and expression grammar shared by the definition-file formats.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' INT)?
//! atom   := INT | NAME | NAME '(' expr (',' expr)* ')' | '(' expr ')'
//! ```
//!
//! Field-valued calls are `D(x)`, `Dk(x)` and `N(x, y)`; `one` is the unit field.

use std::fmt;

use num_bigint::BigInt;
use thiserror::Error;

use crate::ope::FieldExpr;
use crate::scalar::{Rational, RationalFunction};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{col}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

impl ParseError {
    pub fn new(line: usize, col: usize, msg: impl Into<String>) -> Self {
        ParseError {
            line,
            col,
            msg: msg.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Name(String),
    Sym(char),
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    col: usize,
}

fn tokenize(src: &str, line: usize, col0: usize) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let ch = chars[i];
        let col = col0 + i;
        if ch.is_whitespace() {
            i += 1;
        } else if ch.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            out.push(Token {
                tok: Tok::Int(s.parse().unwrap()),
                col,
            });
        } else if ch.is_alphabetic() || ch == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '\'') {
                i += 1;
            }
            out.push(Token {
                tok: Tok::Name(chars[start..i].iter().collect()),
                col,
            });
        } else if "+-*/^(),".contains(ch) {
            out.push(Token { tok: Tok::Sym(ch), col });
            i += 1;
        } else {
            return Err(ParseError::new(line, col, format!("unexpected character '{ch}'")));
        }
    }
    Ok(out)
}

/// Parsed but unevaluated expression.
#[derive(Debug, Clone, PartialEq)]
pub enum Ast {
    Int(BigInt),
    Name(String, usize),
    Call(String, Vec<Ast>, usize),
    Neg(Box<Ast>),
    Add(Box<Ast>, Box<Ast>),
    Sub(Box<Ast>, Box<Ast>),
    Mul(Box<Ast>, Box<Ast>, usize),
    Div(Box<Ast>, Box<Ast>, usize),
    Pow(Box<Ast>, u32),
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    line: usize,
    end_col: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map(|t| t.col).unwrap_or(self.end_col)
    }

    fn err(&self, msg: impl Into<String>) -> ParseError {
        ParseError::new(self.line, self.col(), msg)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(format!("expected '{c}'")))
        }
    }

    fn expr(&mut self) -> Result<Ast, ParseError> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Ast::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Ast::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Ast, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let col = self.col();
            if self.eat('*') {
                lhs = Ast::Mul(Box::new(lhs), Box::new(self.unary()?), col);
            } else if self.eat('/') {
                lhs = Ast::Div(Box::new(lhs), Box::new(self.unary()?), col);
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Ast, ParseError> {
        if self.eat('-') {
            return Ok(Ast::Neg(Box::new(self.unary()?)));
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Ast, ParseError> {
        let base = self.atom()?;
        if self.eat('^') {
            match self.peek().cloned() {
                Some(Tok::Int(n)) => {
                    self.pos += 1;
                    let e: u32 = n
                        .try_into()
                        .map_err(|_| self.err("exponent too large"))?;
                    Ok(Ast::Pow(Box::new(base), e))
                }
                _ => Err(self.err("expected a non-negative integer exponent")),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Ast, ParseError> {
        let col = self.col();
        match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.pos += 1;
                Ok(Ast::Int(n))
            }
            Some(Tok::Name(name)) => {
                self.pos += 1;
                if self.eat('(') {
                    let mut args = vec![self.expr()?];
                    while self.eat(',') {
                        args.push(self.expr()?);
                    }
                    self.expect(')')?;
                    Ok(Ast::Call(name, args, col))
                } else {
                    Ok(Ast::Name(name, col))
                }
            }
            Some(Tok::Sym('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Some(t) => Err(self.err(format!("unexpected token {t:?}"))),
            None => Err(self.err("unexpected end of expression")),
        }
    }
}

/// Parses `src`, which starts at column `col0` (1-based) of line `line`.
pub fn parse_ast(src: &str, line: usize, col0: usize) -> Result<Ast, ParseError> {
    let toks = tokenize(src, line, col0)?;
    let mut p = Parser {
        toks,
        pos: 0,
        line,
        end_col: col0 + src.chars().count(),
    };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(p.err("trailing input"));
    }
    Ok(e)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Scalar(RationalFunction),
    Field(FieldExpr),
}

impl Value {
    pub fn into_field(self) -> FieldExpr {
        match self {
            Value::Scalar(c) => FieldExpr::scalar(c),
            Value::Field(f) => f,
        }
    }
}

/// Name resolution and field operations for evaluation.
pub trait Env {
    fn scalar(&self, name: &str) -> Option<RationalFunction>;
    fn field(&self, name: &str) -> Option<FieldExpr>;
    fn nprod(&self, x: &FieldExpr, y: &FieldExpr) -> Result<FieldExpr, String>;
    fn derivative(&self, x: &FieldExpr, k: u32) -> Result<FieldExpr, String>;
}

/// Environment with parameters only; field syntax is rejected.
pub struct ScalarEnv<'a> {
    pub names: &'a [(String, RationalFunction)],
    pub free_params: bool,
}

impl Env for ScalarEnv<'_> {
    fn scalar(&self, name: &str) -> Option<RationalFunction> {
        if let Some((_, v)) = self.names.iter().find(|(n, _)| n == name) {
            return Some(v.clone());
        }
        self.free_params.then(|| RationalFunction::param(name))
    }
    fn field(&self, _: &str) -> Option<FieldExpr> {
        None
    }
    fn nprod(&self, _: &FieldExpr, _: &FieldExpr) -> Result<FieldExpr, String> {
        Err("normal products are not allowed here".into())
    }
    fn derivative(&self, _: &FieldExpr, _: u32) -> Result<FieldExpr, String> {
        Err("derivatives are not allowed here".into())
    }
}

fn deriv_order(name: &str) -> Option<u32> {
    let rest = name.strip_prefix('D')?;
    if rest.is_empty() {
        return Some(1);
    }
    rest.parse().ok()
}

pub fn eval(ast: &Ast, env: &dyn Env, line: usize) -> Result<Value, ParseError> {
    use Value::*;
    let err = |col: usize, msg: String| ParseError::new(line, col, msg);
    Ok(match ast {
        Ast::Int(n) => Scalar(RationalFunction::constant(Rational::from_integer(n.clone()))),
        Ast::Name(name, col) => {
            if name == "one" {
                Field(FieldExpr::unit())
            } else if let Some(f) = env.field(name) {
                Field(f)
            } else if let Some(s) = env.scalar(name) {
                Scalar(s)
            } else {
                return Err(err(*col, format!("unknown name '{name}'")));
            }
        }
        Ast::Call(name, args, col) => {
            let vals: Vec<FieldExpr> = args
                .iter()
                .map(|a| eval(a, env, line).map(Value::into_field))
                .collect::<Result<_, _>>()?;
            if name == "N" {
                if vals.len() != 2 {
                    return Err(err(*col, "N takes two arguments".into()));
                }
                Field(env.nprod(&vals[0], &vals[1]).map_err(|m| err(*col, m))?)
            } else if let Some(k) = deriv_order(name) {
                if vals.len() != 1 {
                    return Err(err(*col, format!("{name} takes one argument")));
                }
                Field(env.derivative(&vals[0], k).map_err(|m| err(*col, m))?)
            } else {
                return Err(err(*col, format!("unknown function '{name}'")));
            }
        }
        Ast::Neg(a) => match eval(a, env, line)? {
            Scalar(s) => Scalar(-s),
            Field(f) => Field(f.neg()),
        },
        Ast::Add(a, b) | Ast::Sub(a, b) => {
            let sub = matches!(ast, Ast::Sub(..));
            match (eval(a, env, line)?, eval(b, env, line)?) {
                (Scalar(x), Scalar(y)) => Scalar(if sub { x - y } else { x + y }),
                (x, y) => {
                    let (x, y) = (x.into_field(), y.into_field());
                    Field(if sub { x.sub(&y) } else { x.add(&y) })
                }
            }
        }
        Ast::Mul(a, b, col) => match (eval(a, env, line)?, eval(b, env, line)?) {
            (Scalar(x), Scalar(y)) => Scalar(x * y),
            (Scalar(x), Field(f)) | (Field(f), Scalar(x)) => Field(f.scale(&x)),
            (Field(_), Field(_)) => {
                return Err(err(*col, "fields multiply only through N(x, y)".into()))
            }
        },
        Ast::Div(a, b, col) => {
            let den = match eval(b, env, line)? {
                Scalar(s) => s,
                Field(_) => return Err(err(*col, "cannot divide by a field".into())),
            };
            let inv = den.inv().map_err(|e| err(*col, e.to_string()))?;
            match eval(a, env, line)? {
                Scalar(x) => Scalar(x * inv),
                Field(f) => Field(f.scale(&inv)),
            }
        }
        Ast::Pow(a, e) => match eval(a, env, line)? {
            Scalar(x) => Scalar(x.pow(*e)),
            Field(_) => return Err(err(0, "fields cannot be raised to a power".into())),
        },
    })
}

/// Parses a coefficient in the given named values; unknown names become
/// free parameters when `free_params` is set.
pub fn parse_scalar(
    src: &str,
    names: &[(String, RationalFunction)],
    free_params: bool,
) -> Result<RationalFunction, ParseError> {
    let ast = parse_ast(src, 1, 1)?;
    match eval(&ast, &ScalarEnv { names, free_params }, 1)? {
        Value::Scalar(s) => Ok(s),
        Value::Field(_) => Err(ParseError::new(1, 1, "expected a scalar")),
    }
}

impl fmt::Display for Ast {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ast::Int(n) => write!(f, "{n}"),
            Ast::Name(n, _) => write!(f, "{n}"),
            Ast::Call(n, args, _) => {
                write!(f, "{n}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
            Ast::Neg(a) => write!(f, "-({a})"),
            Ast::Add(a, b) => write!(f, "({a} + {b})"),
            Ast::Sub(a, b) => write!(f, "({a} - {b})"),
            Ast::Mul(a, b, _) => write!(f, "({a} * {b})"),
            Ast::Div(a, b, _) => write!(f, "({a} / {b})"),
            Ast::Pow(a, e) => write!(f, "({a})^{e}"),
        }
    }
}
