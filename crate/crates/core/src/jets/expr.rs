//! Expression trees over `x1..x3` and their recursive-descent parser.
//!
//! Grammar (whitespace ignored):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := ('-' | '+') factor | base ('^' integer)?
//! base   := number | 'x' digit | '(' expr ')' | func '(' expr (',' number)? ')'
//! func   := sin | cos | exp | sqrt | abs
//! ```
//!
//! `abs(e)` is the smooth absolute value `sqrt(e^2 + eps^2)` with
//! `eps = 1e-3`; `abs(e, eps)` picks another `eps`.

use std::fmt;

use super::jet::Jet;
use crate::{Error, Point, Result};

pub const DEFAULT_ABS_EPS: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Sqrt,
    AbsSmooth(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    /// Zero-based variable index.
    Var(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
    Call(Func, Box<Expr>),
}

impl Expr {
    pub fn value(&self, x: &Point) -> f64 {
        match self {
            Expr::Const(c) => *c,
            Expr::Var(i) => x[*i],
            Expr::Neg(a) => -a.value(x),
            Expr::Add(a, b) => a.value(x) + b.value(x),
            Expr::Sub(a, b) => a.value(x) - b.value(x),
            Expr::Mul(a, b) => a.value(x) * b.value(x),
            Expr::Div(a, b) => a.value(x) / b.value(x),
            Expr::Pow(a, k) => a.value(x).powi(*k),
            Expr::Call(f, a) => {
                let t = a.value(x);
                match f {
                    Func::Sin => t.sin(),
                    Func::Cos => t.cos(),
                    Func::Exp => t.exp(),
                    Func::Sqrt => t.sqrt(),
                    Func::AbsSmooth(eps) => (t * t + eps * eps).sqrt(),
                }
            }
        }
    }

    /// Forward-mode jet of the tree at `x` (all orders up to three).
    pub fn jet(&self, n: usize, x: &Point) -> Jet {
        match self {
            Expr::Const(c) => Jet::constant(n, *c),
            Expr::Var(i) => Jet::variable(n, *i, x[*i]),
            Expr::Neg(a) => -a.jet(n, x),
            Expr::Add(a, b) => a.jet(n, x) + b.jet(n, x),
            Expr::Sub(a, b) => a.jet(n, x) - b.jet(n, x),
            Expr::Mul(a, b) => a.jet(n, x) * b.jet(n, x),
            Expr::Div(a, b) => a.jet(n, x) * b.jet(n, x).recip(),
            Expr::Pow(a, k) => a.jet(n, x).powi(*k),
            Expr::Call(f, a) => {
                let u = a.jet(n, x);
                match f {
                    Func::Sin => u.sin(),
                    Func::Cos => u.cos(),
                    Func::Exp => u.exp(),
                    Func::Sqrt => u.sqrt(),
                    Func::AbsSmooth(eps) => u.abs_smooth(*eps),
                }
            }
        }
    }

    /// Largest variable index used (one-based), 0 for constant trees.
    pub fn max_variable(&self) -> usize {
        match self {
            Expr::Const(_) => 0,
            Expr::Var(i) => i + 1,
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Call(_, a) => a.max_variable(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.max_variable().max(b.max_variable())
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => write!(f, "{c:?}"),
            Expr::Var(i) => write!(f, "x{}", i + 1),
            Expr::Neg(a) => write!(f, "(-{a})"),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "({a} * {b})"),
            Expr::Div(a, b) => write!(f, "({a} / {b})"),
            Expr::Pow(a, k) => write!(f, "({a})^{k}"),
            Expr::Call(func, a) => match func {
                Func::Sin => write!(f, "sin({a})"),
                Func::Cos => write!(f, "cos({a})"),
                Func::Exp => write!(f, "exp({a})"),
                Func::Sqrt => write!(f, "sqrt({a})"),
                Func::AbsSmooth(eps) => write!(f, "abs({a}, {eps:?})"),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Sym(char),
    End,
}

struct Lexer {
    toks: Vec<(Tok, usize)>,
}

impl Lexer {
    fn new(src: &str) -> Result<Self> {
        let bytes = src.as_bytes();
        let mut toks = Vec::new();
        let mut i = 0;
        while i < bytes.len() {
            let c = bytes[i] as char;
            if c.is_whitespace() {
                i += 1;
            } else if c.is_ascii_digit() || c == '.' {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        while j < bytes.len() && bytes[j].is_ascii_digit() {
                            j += 1;
                        }
                        i = j;
                    }
                }
                let text = &src[start..i];
                let v: f64 = text.parse().map_err(|_| Error::Syntax {
                    pos: start,
                    msg: format!("malformed number `{text}`"),
                })?;
                toks.push((Tok::Num(v), start));
            } else if c.is_ascii_alphabetic() || c == '_' {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                toks.push((Tok::Ident(src[start..i].to_string()), start));
            } else if "+-*/^(),".contains(c) {
                toks.push((Tok::Sym(c), i));
                i += 1;
            } else {
                return Err(Error::Syntax {
                    pos: i,
                    msg: format!("unexpected character `{c}`"),
                });
            }
        }
        toks.push((Tok::End, src.len()));
        Ok(Self { toks })
    }
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    at: usize,
    n: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if *self.peek() == Tok::Sym(c) {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(&format!("expected `{c}`")))
        }
    }

    fn unexpected(&self, what: &str) -> Error {
        let found = match self.peek() {
            Tok::End => "end of input".to_string(),
            Tok::Num(v) => format!("number {v}"),
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Sym(c) => format!("`{c}`"),
        };
        Error::Syntax {
            pos: self.pos(),
            msg: format!("{what}, found {found}"),
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Sym('+') => {
                    self.bump();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Sym('-') => {
                    self.bump();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.factor()?;
        loop {
            match self.peek() {
                Tok::Sym('*') => {
                    self.bump();
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.factor()?));
                }
                Tok::Sym('/') => {
                    self.bump();
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.factor()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn factor(&mut self) -> Result<Expr> {
        match self.peek() {
            Tok::Sym('-') => {
                self.bump();
                return Ok(Expr::Neg(Box::new(self.factor()?)));
            }
            Tok::Sym('+') => {
                self.bump();
                return self.factor();
            }
            _ => {}
        }
        let base = self.base()?;
        if *self.peek() == Tok::Sym('^') {
            self.bump();
            let negative = if *self.peek() == Tok::Sym('-') {
                self.bump();
                true
            } else {
                false
            };
            let pos = self.pos();
            match self.bump() {
                Tok::Num(v) if v.fract() == 0.0 && v.abs() <= i32::MAX as f64 => {
                    let k = v as i32;
                    Ok(Expr::Pow(Box::new(base), if negative { -k } else { k }))
                }
                _ => Err(Error::Syntax {
                    pos,
                    msg: "exponent must be an integer".into(),
                }),
            }
        } else {
            Ok(base)
        }
    }

    fn base(&mut self) -> Result<Expr> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Num(v) => {
                self.bump();
                Ok(Expr::Const(v))
            }
            Tok::Sym('(') => {
                self.bump();
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Ident(name) => {
                self.bump();
                if let Some(idx) = name.strip_prefix('x') {
                    if let Ok(k) = idx.parse::<usize>() {
                        if k == 0 {
                            return Err(Error::UnknownIdentifier { name, pos });
                        }
                        if k > self.n {
                            return Err(Error::DimensionMismatch { index: k, n: self.n });
                        }
                        return Ok(Expr::Var(k - 1));
                    }
                }
                let func = match name.as_str() {
                    "sin" => Func::Sin,
                    "cos" => Func::Cos,
                    "exp" => Func::Exp,
                    "sqrt" => Func::Sqrt,
                    "abs" => Func::AbsSmooth(DEFAULT_ABS_EPS),
                    _ => return Err(Error::UnknownIdentifier { name, pos }),
                };
                self.expect('(')?;
                let arg = self.expr()?;
                let func = if func == Func::AbsSmooth(DEFAULT_ABS_EPS) && *self.peek() == Tok::Sym(',') {
                    self.bump();
                    let p = self.pos();
                    match self.bump() {
                        Tok::Num(eps) if eps > 0.0 => Func::AbsSmooth(eps),
                        _ => {
                            return Err(Error::Syntax {
                                pos: p,
                                msg: "abs smoothing parameter must be a positive number".into(),
                            })
                        }
                    }
                } else {
                    func
                };
                self.expect(')')?;
                Ok(Expr::Call(func, Box::new(arg)))
            }
            _ => Err(self.unexpected("expected a number, variable, function or `(`")),
        }
    }
}

/// Parses `text` as an expression in `n` variables.
pub fn parse_expr(text: &str, n: usize) -> Result<Expr> {
    if !(1..=3).contains(&n) {
        return Err(Error::InvalidArgument(format!("dimension must be 1..=3, got {n}")));
    }
    let lexer = Lexer::new(text)?;
    let mut p = Parser { toks: lexer.toks, at: 0, n };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.unexpected("expected an operator"));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence_and_power() {
        let e = parse_expr("1 + 2*x1^2 - x2/4", 2).unwrap();
        assert_eq!(e.value(&[3.0, 8.0, 0.0]), 1.0 + 18.0 - 2.0);
    }

    #[test]
    fn unary_minus_and_scientific_numbers() {
        let e = parse_expr("-x1 + 2.5e-1 * -3", 1).unwrap();
        assert!((e.value(&[1.0, 0.0, 0.0]) - (-1.75)).abs() < 1e-15);
        let p = parse_expr("x1^-2", 1).unwrap();
        assert_eq!(p.value(&[2.0, 0.0, 0.0]), 0.25);
    }

    #[test]
    fn syntax_error_positions() {
        assert!(matches!(parse_expr("x1*(", 1), Err(Error::Syntax { pos: 4, .. })));
        assert!(matches!(parse_expr("x1 x2", 2), Err(Error::Syntax { pos: 3, .. })));
        assert!(matches!(parse_expr("x1 $ 2", 1), Err(Error::Syntax { pos: 3, .. })));
        assert!(matches!(parse_expr("x1^1.5", 1), Err(Error::Syntax { pos: 3, .. })));
    }

    #[test]
    fn identifier_errors() {
        assert!(matches!(
            parse_expr("tan(x1)", 1),
            Err(Error::UnknownIdentifier { pos: 0, .. })
        ));
        assert!(matches!(
            parse_expr("x1 + x3", 2),
            Err(Error::DimensionMismatch { index: 3, n: 2 })
        ));
        assert!(matches!(parse_expr("x0", 2), Err(Error::UnknownIdentifier { .. })));
    }

    #[test]
    fn smooth_abs() {
        let e = parse_expr("abs(x1, 0.5)", 1).unwrap();
        assert!((e.value(&[0.0; 3]) - 0.5).abs() < 1e-15);
        let d = parse_expr("abs(x1)", 1).unwrap();
        assert!((d.value(&[-2.0, 0.0, 0.0]) - (4.0f64 + 1e-6).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn display_roundtrips() {
        let e = parse_expr("sin(3*x1) - exp(x2)/(1+x1^2) + abs(x2, 0.1)", 2).unwrap();
        let again = parse_expr(&e.to_string(), 2).unwrap();
        let x = [0.3, -0.7, 0.0];
        assert_eq!(e.value(&x), again.value(&x));
    }
}
