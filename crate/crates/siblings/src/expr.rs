//! Closed-form scalar expressions over named chart coordinates.
//!
//! A recursive-descent parser builds an [`Expr`] from text; evaluation runs
//! either on plain `f64` or in second-order Taylor-jet arithmetic
//! ([`Jet2`]), so every metric component supplies exact first and second
//! derivatives to the geometry layer. There is no simplifier: trees are
//! evaluated as written.
//!
//! Grammar (standard precedence, `^` binds tightest and is right
//! associative, exponents must be constant):
//!
//! ```text
//! expr   := term  (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' unary)?
//! atom   := number | name '(' expr ')' | name | '(' expr ')'
//! ```

use std::fmt::Write as _;

use crate::error::{EvalError, ParseError};
use crate::jet::Jet2;

/// Unary functions supported by the grammar.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Sinh,
    Cosh,
    Tanh,
    Exp,
    Ln,
    Sqrt,
    Abs,
}

impl Func {
    fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tan" => Func::Tan,
            "sinh" => Func::Sinh,
            "cosh" => Func::Cosh,
            "tanh" => Func::Tanh,
            "exp" => Func::Exp,
            "ln" => Func::Ln,
            "sqrt" => Func::Sqrt,
            "abs" => Func::Abs,
            _ => return None,
        })
    }

    fn name(&self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Tanh => "tanh",
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
        }
    }
}

/// Exponent of a power node; integer exponents evaluate by repeated
/// multiplication, real ones via `exp(p ln x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exponent {
    Int(i64),
    Real(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Ast {
    Const(f64),
    Coord(usize),
    Neg(Box<Ast>),
    Add(Box<Ast>, Box<Ast>),
    Sub(Box<Ast>, Box<Ast>),
    Mul(Box<Ast>, Box<Ast>),
    Div(Box<Ast>, Box<Ast>),
    Pow(Box<Ast>, Exponent),
    Call(Func, Box<Ast>),
}

/// A parsed scalar expression over a chart of dimension `dim`.
/// Immutable after construction; evaluation is pure.
#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    dim: usize,
    ast: Ast,
}

impl Expr {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ast(&self) -> &Ast {
        &self.ast
    }

    /// Parse `source` against the coordinate name list.
    pub fn parse(source: &str, coords: &[&str]) -> Result<Expr, ParseError> {
        let mut p = Parser {
            src: source,
            bytes: source.as_bytes(),
            pos: 0,
            coords,
        };
        p.skip_ws();
        let ast = p.expr()?;
        p.skip_ws();
        if p.pos != p.bytes.len() {
            return Err(ParseError::Syntax {
                offset: p.pos,
                message: "unexpected trailing input".into(),
            });
        }
        Ok(Expr {
            dim: coords.len(),
            ast,
        })
    }

    // Constructors for programmatic composition (gallery, sibling transform).

    pub fn constant(dim: usize, c: f64) -> Expr {
        Expr {
            dim,
            ast: Ast::Const(c),
        }
    }

    pub fn coord(dim: usize, index: usize) -> Expr {
        assert!(index < dim);
        Expr {
            dim,
            ast: Ast::Coord(index),
        }
    }

    pub fn add(&self, o: &Expr) -> Expr {
        self.combine(o, Ast::Add)
    }

    pub fn sub(&self, o: &Expr) -> Expr {
        self.combine(o, Ast::Sub)
    }

    pub fn mul(&self, o: &Expr) -> Expr {
        self.combine(o, Ast::Mul)
    }

    pub fn div(&self, o: &Expr) -> Expr {
        self.combine(o, Ast::Div)
    }

    pub fn neg(&self) -> Expr {
        Expr {
            dim: self.dim,
            ast: Ast::Neg(Box::new(self.ast.clone())),
        }
    }

    pub fn powi(&self, e: i64) -> Expr {
        Expr {
            dim: self.dim,
            ast: Ast::Pow(Box::new(self.ast.clone()), Exponent::Int(e)),
        }
    }

    pub fn scale(&self, c: f64) -> Expr {
        Expr::constant(self.dim, c).mul(self)
    }

    pub fn call(&self, f: Func) -> Expr {
        Expr {
            dim: self.dim,
            ast: Ast::Call(f, Box::new(self.ast.clone())),
        }
    }

    fn combine(&self, o: &Expr, build: fn(Box<Ast>, Box<Ast>) -> Ast) -> Expr {
        assert_eq!(self.dim, o.dim, "expressions over different charts");
        Expr {
            dim: self.dim,
            ast: build(Box::new(self.ast.clone()), Box::new(o.ast.clone())),
        }
    }

    /// True if the tree never references coordinate `index`.
    pub fn independent_of(&self, index: usize) -> bool {
        fn walk(ast: &Ast, index: usize) -> bool {
            match ast {
                Ast::Const(_) => true,
                Ast::Coord(i) => *i != index,
                Ast::Neg(a) | Ast::Pow(a, _) | Ast::Call(_, a) => walk(a, index),
                Ast::Add(a, b) | Ast::Sub(a, b) | Ast::Mul(a, b) | Ast::Div(a, b) => {
                    walk(a, index) && walk(b, index)
                }
            }
        }
        walk(&self.ast, index)
    }

    /// Evaluate on plain floats.
    pub fn eval(&self, point: &[f64]) -> Result<f64, EvalError> {
        self.check_point(point)?;
        let v = eval_f64(&self.ast, point)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(EvalError::NonFinite)
        }
    }

    /// Evaluate with exact second-order jets.
    pub fn eval_jet(&self, point: &[f64]) -> Result<Jet2, EvalError> {
        self.check_point(point)?;
        let j = eval_jet2(&self.ast, point, self.dim)?;
        if j.is_finite() {
            Ok(j)
        } else {
            Err(EvalError::NonFinite)
        }
    }

    fn check_point(&self, point: &[f64]) -> Result<(), EvalError> {
        if point.len() != self.dim {
            return Err(EvalError::DimensionMismatch {
                expected: self.dim,
                got: point.len(),
            });
        }
        Ok(())
    }

    /// Render back to parseable text; `parse(render(e))` evaluates
    /// identically to `e`.
    pub fn render(&self, coords: &[&str]) -> String {
        let mut out = String::new();
        render(&self.ast, coords, &mut out);
        out
    }
}

fn eval_f64(ast: &Ast, p: &[f64]) -> Result<f64, EvalError> {
    Ok(match ast {
        Ast::Const(c) => *c,
        Ast::Coord(i) => p[*i],
        Ast::Neg(a) => -eval_f64(a, p)?,
        Ast::Add(a, b) => eval_f64(a, p)? + eval_f64(b, p)?,
        Ast::Sub(a, b) => eval_f64(a, p)? - eval_f64(b, p)?,
        Ast::Mul(a, b) => eval_f64(a, p)? * eval_f64(b, p)?,
        Ast::Div(a, b) => {
            let d = eval_f64(b, p)?;
            if d == 0.0 {
                return Err(EvalError::DivisionByZero);
            }
            eval_f64(a, p)? / d
        }
        Ast::Pow(a, e) => {
            let base = eval_f64(a, p)?;
            match e {
                Exponent::Int(k) => {
                    if *k < 0 && base == 0.0 {
                        return Err(EvalError::DivisionByZero);
                    }
                    base.powi(*k as i32)
                }
                Exponent::Real(r) => {
                    if base <= 0.0 {
                        return Err(EvalError::NonPositivePower(base));
                    }
                    base.powf(*r)
                }
            }
        }
        Ast::Call(f, a) => {
            let v = eval_f64(a, p)?;
            match f {
                Func::Sin => v.sin(),
                Func::Cos => v.cos(),
                Func::Tan => v.tan(),
                Func::Sinh => v.sinh(),
                Func::Cosh => v.cosh(),
                Func::Tanh => v.tanh(),
                Func::Exp => v.exp(),
                Func::Ln => {
                    if v <= 0.0 {
                        return Err(EvalError::NonPositiveLog(v));
                    }
                    v.ln()
                }
                Func::Sqrt => {
                    if v < 0.0 {
                        return Err(EvalError::NonPositiveSqrt(v));
                    }
                    v.sqrt()
                }
                Func::Abs => v.abs(),
            }
        }
    })
}

fn eval_jet2(ast: &Ast, p: &[f64], dim: usize) -> Result<Jet2, EvalError> {
    Ok(match ast {
        Ast::Const(c) => Jet2::constant(dim, *c),
        Ast::Coord(i) => Jet2::coordinate(dim, *i, p[*i]),
        Ast::Neg(a) => eval_jet2(a, p, dim)?.neg(),
        Ast::Add(a, b) => eval_jet2(a, p, dim)?.add(&eval_jet2(b, p, dim)?),
        Ast::Sub(a, b) => eval_jet2(a, p, dim)?.sub(&eval_jet2(b, p, dim)?),
        Ast::Mul(a, b) => eval_jet2(a, p, dim)?.mul(&eval_jet2(b, p, dim)?),
        Ast::Div(a, b) => eval_jet2(a, p, dim)?.div(&eval_jet2(b, p, dim)?)?,
        Ast::Pow(a, e) => {
            let base = eval_jet2(a, p, dim)?;
            match e {
                Exponent::Int(k) => base.powi(*k)?,
                Exponent::Real(r) => base.powf(*r)?,
            }
        }
        Ast::Call(f, a) => {
            let u = eval_jet2(a, p, dim)?;
            match f {
                Func::Sin => u.sin(),
                Func::Cos => u.cos(),
                Func::Tan => u.tan(),
                Func::Sinh => u.sinh(),
                Func::Cosh => u.cosh(),
                Func::Tanh => u.tanh(),
                Func::Exp => u.exp(),
                Func::Ln => u.ln()?,
                Func::Sqrt => u.sqrt()?,
                Func::Abs => u.abs()?,
            }
        }
    })
}

fn render(ast: &Ast, coords: &[&str], out: &mut String) {
    match ast {
        Ast::Const(c) => {
            if *c < 0.0 || c.is_sign_negative() {
                let _ = write!(out, "({c:?})");
            } else {
                let _ = write!(out, "{c:?}");
            }
        }
        Ast::Coord(i) => out.push_str(coords[*i]),
        Ast::Neg(a) => {
            out.push_str("(-");
            render(a, coords, out);
            out.push(')');
        }
        Ast::Add(a, b) => binary(a, "+", b, coords, out),
        Ast::Sub(a, b) => binary(a, "-", b, coords, out),
        Ast::Mul(a, b) => binary(a, "*", b, coords, out),
        Ast::Div(a, b) => binary(a, "/", b, coords, out),
        Ast::Pow(a, e) => {
            out.push('(');
            render(a, coords, out);
            match e {
                Exponent::Int(k) if *k < 0 => {
                    let _ = write!(out, "^({k})");
                }
                Exponent::Int(k) => {
                    let _ = write!(out, "^{k}");
                }
                Exponent::Real(r) if *r < 0.0 => {
                    let _ = write!(out, "^({r:?})");
                }
                Exponent::Real(r) => {
                    let _ = write!(out, "^{r:?}");
                }
            }
            out.push(')');
        }
        Ast::Call(f, a) => {
            out.push_str(f.name());
            out.push('(');
            render(a, coords, out);
            out.push(')');
        }
    }
}

fn binary(a: &Ast, op: &str, b: &Ast, coords: &[&str], out: &mut String) {
    out.push('(');
    render(a, coords, out);
    out.push_str(op);
    render(b, coords, out);
    out.push(')');
}

struct Parser<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
    coords: &'a [&'a str],
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Ast, ParseError> {
        let mut lhs = self.term()?;
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    self.skip_ws();
                    let rhs = self.term()?;
                    lhs = Ast::Add(Box::new(lhs), Box::new(rhs));
                }
                Some(b'-') => {
                    self.pos += 1;
                    self.skip_ws();
                    let rhs = self.term()?;
                    lhs = Ast::Sub(Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Ast, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    self.skip_ws();
                    let rhs = self.unary()?;
                    lhs = Ast::Mul(Box::new(lhs), Box::new(rhs));
                }
                Some(b'/') => {
                    self.pos += 1;
                    self.skip_ws();
                    let rhs = self.unary()?;
                    lhs = Ast::Div(Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Ast, ParseError> {
        self.skip_ws();
        if self.peek() == Some(b'-') {
            self.pos += 1;
            let inner = self.unary()?;
            return Ok(Ast::Neg(Box::new(inner)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Ast, ParseError> {
        let base = self.atom()?;
        self.skip_ws();
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let exp_offset = self.pos;
            // right associativity: the exponent may itself be a power
            let exp_ast = self.unary()?;
            let e = constant_fold(&exp_ast).ok_or(ParseError::Syntax {
                offset: exp_offset,
                message: "exponent must be a constant".into(),
            })?;
            let exponent = if e.fract() == 0.0 && e.abs() <= i32::MAX as f64 {
                Exponent::Int(e as i64)
            } else {
                Exponent::Real(e)
            };
            return Ok(Ast::Pow(Box::new(base), exponent));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Ast, ParseError> {
        self.skip_ws();
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                self.skip_ws();
                if self.peek() != Some(b')') {
                    return Err(ParseError::Syntax {
                        offset: self.pos,
                        message: "expected `)`".into(),
                    });
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => self.identifier(),
            Some(c) => Err(ParseError::Syntax {
                offset: self.pos,
                message: format!("unexpected character `{}`", c as char),
            }),
            None => Err(ParseError::Syntax {
                offset: self.pos,
                message: "unexpected end of input".into(),
            }),
        }
    }

    fn number(&mut self) -> Result<Ast, ParseError> {
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_ascii_digit() || c == b'.' {
                self.pos += 1;
            } else if (c == b'e' || c == b'E') && self.pos > start {
                // exponent part, optionally signed
                let mut ahead = self.pos + 1;
                if matches!(self.bytes.get(ahead), Some(b'+') | Some(b'-')) {
                    ahead += 1;
                }
                if matches!(self.bytes.get(ahead), Some(d) if d.is_ascii_digit()) {
                    self.pos = ahead + 1;
                    while matches!(self.peek(), Some(d) if d.is_ascii_digit()) {
                        self.pos += 1;
                    }
                }
                break;
            } else {
                break;
            }
        }
        let text = &self.src[start..self.pos];
        text.parse::<f64>()
            .map(Ast::Const)
            .map_err(|_| ParseError::Syntax {
                offset: start,
                message: format!("invalid number literal `{text}`"),
            })
    }

    fn identifier(&mut self) -> Result<Ast, ParseError> {
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_ascii_alphanumeric() || c == b'_' {
                self.pos += 1;
            } else {
                break;
            }
        }
        let name = &self.src[start..self.pos];
        self.skip_ws();
        if self.peek() == Some(b'(') {
            let func = Func::from_name(name).ok_or_else(|| ParseError::UnknownIdentifier {
                name: name.into(),
                offset: start,
            })?;
            self.pos += 1;
            let arg = self.expr()?;
            self.skip_ws();
            if self.peek() == Some(b',') {
                // count extra arguments for the error message
                let mut got = 1;
                while self.peek() == Some(b',') {
                    self.pos += 1;
                    self.expr()?;
                    self.skip_ws();
                    got += 1;
                }
                return Err(ParseError::Arity {
                    name: name.into(),
                    expected: 1,
                    got,
                    offset: start,
                });
            }
            if self.peek() != Some(b')') {
                return Err(ParseError::Syntax {
                    offset: self.pos,
                    message: "expected `)`".into(),
                });
            }
            self.pos += 1;
            return Ok(Ast::Call(func, Box::new(arg)));
        }
        if let Some(i) = self.coords.iter().position(|c| *c == name) {
            return Ok(Ast::Coord(i));
        }
        Err(ParseError::UnknownIdentifier {
            name: name.into(),
            offset: start,
        })
    }
}

/// Evaluate a coordinate-free subtree to a constant, if possible.
fn constant_fold(ast: &Ast) -> Option<f64> {
    match ast {
        Ast::Const(c) => Some(*c),
        Ast::Coord(_) => None,
        Ast::Neg(a) => constant_fold(a).map(|v| -v),
        Ast::Add(a, b) => Some(constant_fold(a)? + constant_fold(b)?),
        Ast::Sub(a, b) => Some(constant_fold(a)? - constant_fold(b)?),
        Ast::Mul(a, b) => Some(constant_fold(a)? * constant_fold(b)?),
        Ast::Div(a, b) => Some(constant_fold(a)? / constant_fold(b)?),
        Ast::Pow(a, e) => {
            let base = constant_fold(a)?;
            Some(match e {
                Exponent::Int(k) => base.powi(*k as i32),
                Exponent::Real(r) => base.powf(*r),
            })
        }
        Ast::Call(_, _) => None,
    }
}
