//! Input language: `p = <int>` and `a[<i>] = <expr>` lines.
//!
//! Precedence from tightest: `^`, unary `-`, `*` `/`, `+` `-`. A power of `z`
//! takes a rational literal (a bare integer or a parenthesized fraction); any
//! other base takes an integer exponent.

use std::collections::BTreeMap;
use std::fmt;

use mahler::fields::Rational;
use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::InputError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Int(BigInt),
    /// `z^e`; a bare `z` has `e = 1`.
    Z(Rational),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i64),
}

impl Expr {
    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(_) => 3,
            Expr::Pow(..) => 4,
            Expr::Z(e) if *e != Rational::from_integer(1.into()) => 4,
            Expr::Int(_) | Expr::Z(_) => 5,
        }
    }

    /// Literal zero, before any evaluation.
    pub fn is_syntactic_zero(&self) -> bool {
        match self {
            Expr::Int(n) => n.is_zero(),
            Expr::Neg(e) => e.is_syntactic_zero(),
            _ => false,
        }
    }
}

fn fmt_exponent(e: &Rational) -> String {
    if e.is_integer() && !e.is_negative() {
        e.to_string()
    } else {
        format!("({e})")
    }
}

fn write_operand(f: &mut fmt::Formatter<'_>, e: &Expr, min: u8) -> fmt::Result {
    if e.precedence() < min {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // left operands bind at their own level, right operands one tighter,
        // so that the printed tree re-parses to the same tree
        let binary = |f: &mut fmt::Formatter<'_>, a: &Expr, op: &str, b: &Expr, level: u8| {
            write_operand(f, a, level)?;
            write!(f, " {op} ")?;
            write_operand(f, b, level + 1)
        };
        match self {
            Expr::Int(n) => write!(f, "{n}"),
            Expr::Z(e) if *e == Rational::from_integer(1.into()) => f.write_str("z"),
            Expr::Z(e) => write!(f, "z^{}", fmt_exponent(e)),
            Expr::Neg(e) => {
                f.write_str("-")?;
                write_operand(f, e, 3)
            }
            Expr::Add(a, b) => binary(f, a, "+", b, 1),
            Expr::Sub(a, b) => binary(f, a, "-", b, 1),
            Expr::Mul(a, b) => binary(f, a, "*", b, 2),
            Expr::Div(a, b) => binary(f, a, "/", b, 2),
            Expr::Pow(b, n) => {
                write_operand(f, b, 5)?;
                write!(f, "^{}", fmt_exponent(&Rational::from_integer((*n).into())))
            }
        }
    }
}

/// A parsed equation: radix and coefficient expressions `a_0, …, a_n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquationSpec {
    pub p: u32,
    pub coeffs: Vec<Expr>,
}

impl fmt::Display for EquationSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "p = {}", self.p)?;
        for (i, a) in self.coeffs.iter().enumerate() {
            writeln!(f, "a[{i}] = {a}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Sym(char),
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    col: usize,
}

fn lex(line: &str, lineno: usize) -> Result<Vec<Token>, InputError> {
    let chars: Vec<char> = line.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let ch = chars[i];
        let col = i + 1;
        if ch == '#' {
            break;
        } else if ch.is_whitespace() {
            i += 1;
        } else if ch.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let digits: String = chars[start..i].iter().collect();
            out.push(Token {
                tok: Tok::Int(digits.parse().unwrap()),
                col,
            });
        } else if ch.is_alphabetic() || ch == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Token {
                tok: Tok::Ident(chars[start..i].iter().collect()),
                col,
            });
        } else if "+-*/^()[]=".contains(ch) {
            out.push(Token { tok: Tok::Sym(ch), col });
            i += 1;
        } else {
            return Err(InputError::syntax(lineno, col, format!("unexpected character '{ch}'")));
        }
    }
    Ok(out)
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
        self.toks.get(self.pos).map_or(self.end_col, |t| t.col)
    }

    fn error(&self, msg: impl Into<String>) -> InputError {
        let found = match self.peek() {
            None => "end of line".to_string(),
            Some(Tok::Int(n)) => format!("'{n}'"),
            Some(Tok::Ident(s)) => format!("'{s}'"),
            Some(Tok::Sym(c)) => format!("'{c}'"),
        };
        InputError::syntax(self.line, self.col(), format!("{}, found {found}", msg.into()))
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), InputError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(format!("expected '{c}'")))
        }
    }

    fn int(&mut self) -> Result<BigInt, InputError> {
        match self.peek() {
            Some(Tok::Int(n)) => {
                let n = n.clone();
                self.pos += 1;
                Ok(n)
            }
            _ => Err(self.error("expected an integer")),
        }
    }

    fn finish(&self) -> Result<(), InputError> {
        if self.pos < self.toks.len() {
            Err(self.error("unexpected input"))
        } else {
            Ok(())
        }
    }

    fn expr(&mut self) -> Result<Expr, InputError> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, InputError> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat('/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, InputError> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, InputError> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let col = self.col();
        let e = self.exponent()?;
        match base {
            Expr::Z(one) if one == Rational::from_integer(1.into()) => Ok(Expr::Z(e)),
            base => {
                let n = e
                    .is_integer()
                    .then(|| i64::try_from(e.to_integer()).ok())
                    .flatten()
                    .ok_or_else(|| {
                        InputError::syntax(self.line, col, "only powers of z may have fractional exponents")
                    })?;
                Ok(Expr::Pow(Box::new(base), n))
            }
        }
    }

    /// Bare integer or `( [-] int [/ [-] int] )`.
    fn exponent(&mut self) -> Result<Rational, InputError> {
        let start = self.col();
        match self.peek() {
            Some(Tok::Int(_)) => return Ok(Rational::from_integer(self.int()?)),
            Some(Tok::Sym('(')) => {}
            Some(Tok::Ident(_)) | Some(Tok::Sym('-')) => {
                return Err(InputError::NonRationalExponentLiteral {
                    line: self.line,
                    col: start,
                })
            }
            _ => return Err(self.error("expected an exponent")),
        }
        let save = self.pos;
        self.pos += 1;
        let literal = (|| {
            let num = self.signed_int()?;
            let den = if self.eat('/') {
                self.signed_int()?
            } else {
                BigInt::from(1)
            };
            self.eat(')').then_some((num, den))
        })();
        match literal {
            Some((_, den)) if den.is_zero() => {
                Err(InputError::syntax(self.line, start, "zero denominator in exponent"))
            }
            Some((num, den)) => Ok(Rational::new(num, den)),
            None => {
                // distinguish an expression in the exponent from broken syntax
                self.pos = save;
                let depth_ok = self.skip_parenthesized();
                if depth_ok {
                    Err(InputError::NonRationalExponentLiteral {
                        line: self.line,
                        col: start,
                    })
                } else {
                    Err(self.error("unbalanced parenthesis in exponent"))
                }
            }
        }
    }

    fn signed_int(&mut self) -> Option<BigInt> {
        let neg = self.eat('-');
        match self.peek() {
            Some(Tok::Int(n)) => {
                let n = n.clone();
                self.pos += 1;
                Some(if neg { -n } else { n })
            }
            _ => None,
        }
    }

    fn skip_parenthesized(&mut self) -> bool {
        let mut depth = 0usize;
        while let Some(t) = self.peek().cloned() {
            self.pos += 1;
            match t {
                Tok::Sym('(') => depth += 1,
                Tok::Sym(')') => {
                    depth -= 1;
                    if depth == 0 {
                        return true;
                    }
                }
                _ => {}
            }
        }
        false
    }

    fn atom(&mut self) -> Result<Expr, InputError> {
        match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.pos += 1;
                Ok(Expr::Int(n))
            }
            Some(Tok::Ident(s)) if s == "z" => {
                self.pos += 1;
                Ok(Expr::Z(Rational::from_integer(1.into())))
            }
            Some(Tok::Ident(s)) => Err(self.error(format!("unknown variable '{s}' (only z is allowed)"))),
            Some(Tok::Sym('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            _ => Err(self.error("expected an expression")),
        }
    }
}

fn parser(line: &str, lineno: usize) -> Result<Parser, InputError> {
    let toks = lex(line, lineno)?;
    let end_col = line.split('#').next().unwrap_or("").trim_end().chars().count() + 1;
    Ok(Parser {
        toks,
        pos: 0,
        line: lineno,
        end_col,
    })
}

/// Parses a single expression (used for command-line values and tests).
pub fn parse_expr(text: &str) -> Result<Expr, InputError> {
    let mut ps = parser(text, 1)?;
    let e = ps.expr()?;
    ps.finish()?;
    Ok(e)
}

pub fn parse_spec(text: &str) -> Result<EquationSpec, InputError> {
    let mut p: Option<u32> = None;
    let mut coeffs: BTreeMap<usize, Expr> = BTreeMap::new();
    for (k, line) in text.lines().enumerate() {
        let lineno = k + 1;
        let mut ps = parser(line, lineno)?;
        match ps.peek().cloned() {
            None => continue,
            Some(Tok::Ident(key)) if key == "p" => {
                ps.pos += 1;
                ps.expect('=')?;
                let col = ps.col();
                let v = ps.int()?;
                ps.finish()?;
                let v = u32::try_from(&v)
                    .ok()
                    .filter(|v| *v >= 2)
                    .ok_or_else(|| InputError::syntax(lineno, col, "radix must be an integer ≥ 2"))?;
                if p.replace(v).is_some() {
                    return Err(InputError::syntax(lineno, 1, "radix given twice"));
                }
            }
            Some(Tok::Ident(key)) if key == "a" => {
                ps.pos += 1;
                ps.expect('[')?;
                let col = ps.col();
                let i = usize::try_from(&ps.int()?)
                    .map_err(|_| InputError::syntax(lineno, col, "coefficient index out of range"))?;
                ps.expect(']')?;
                ps.expect('=')?;
                let e = ps.expr()?;
                ps.finish()?;
                if coeffs.insert(i, e).is_some() {
                    return Err(InputError::syntax(lineno, 1, format!("a[{i}] given twice")));
                }
            }
            _ => return Err(ps.error("expected 'p = …' or 'a[i] = …'")),
        }
    }
    let p = p.ok_or(InputError::MissingRadix)?;
    let n = coeffs.keys().next_back().copied().unwrap_or(0);
    if n == 0 {
        return Err(InputError::InvalidEquation(
            "the equation needs a[0] and some a[n] with n ≥ 1".into(),
        ));
    }
    let coeffs: Vec<Expr> = (0..=n)
        .map(|i| coeffs.remove(&i).unwrap_or(Expr::Int(BigInt::zero())))
        .collect();
    for i in [0, n] {
        if coeffs[i].is_syntactic_zero() {
            return Err(InputError::InvalidEquation(format!("a[{i}] must not be zero")));
        }
    }
    Ok(EquationSpec { p, coeffs })
}
