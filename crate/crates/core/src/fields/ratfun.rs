use std::fmt;

use super::{Field, Poly, Rational};
use crate::error::{MahlerError, Result};

/// Rational function in λ over ℚ, kept reduced with a monic denominator so
/// that structural equality is mathematical equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatFun {
    num: Poly,
    den: Poly,
}

impl RatFun {
    pub fn new(num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(MahlerError::DivisionByZero);
        }
        Ok(Self::reduced(num, den))
    }

    fn reduced(num: Poly, den: Poly) -> Self {
        if num.is_zero() {
            return RatFun { num, den: Poly::one() };
        }
        let (num, den) = if den.is_constant() {
            (num, den)
        } else {
            let g = Poly::gcd(&num, &den);
            if g.is_one() {
                (num, den)
            } else {
                (num.exact_div(&g), den.exact_div(&g))
            }
        };
        let lead = den.leading();
        if lead.is_one() {
            RatFun { num, den }
        } else {
            let inv = lead.recip();
            RatFun {
                num: num.scale(&inv),
                den: den.scale(&inv),
            }
        }
    }

    pub fn from_poly(p: Poly) -> Self {
        RatFun {
            num: p,
            den: Poly::one(),
        }
    }

    pub fn constant(c: Rational) -> Self {
        Self::from_poly(Poly::constant(c))
    }

    /// The parameter λ itself.
    pub fn lambda() -> Self {
        Self::from_poly(Poly::x())
    }

    /// `(λ - c)^k` for `k ≥ 0`.
    pub fn lambda_minus_pow(c: &Rational, k: usize) -> Self {
        Self::from_poly(Poly::linear_root(c).pow(k))
    }

    /// `λ^k` for any integer `k`.
    pub fn lambda_pow(k: i64) -> Self {
        let mono = Poly::monomial(Rational::one(), k.unsigned_abs() as usize);
        if k >= 0 {
            Self::from_poly(mono)
        } else {
            RatFun {
                num: Poly::one(),
                den: mono,
            }
        }
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn pole_order(&self, c: &Rational) -> usize {
        multiplicity(&self.den, c)
    }

    /// Multiplicity of `c` as a root of the numerator (0 for the zero function).
    pub fn zero_order(&self, c: &Rational) -> usize {
        if self.num.is_zero() {
            return 0;
        }
        multiplicity(&self.num, c)
    }

    pub fn eval(&self, c: &Rational) -> Result<Rational> {
        let d = self.den.eval(c);
        if d.is_zero() {
            return Err(MahlerError::PoleAtEvaluationPoint(c.to_string()));
        }
        Ok(self.num.eval(c) / d)
    }

    /// First `n` Taylor coefficients at `c`, so that `∂^t f(c) = t!·out[t]`.
    pub fn taylor_coeffs(&self, c: &Rational, n: usize) -> Result<Vec<Rational>> {
        let num = self.num.taylor_coeffs(c, n);
        let den = self.den.taylor_coeffs(c, n);
        if n == 0 {
            return Ok(Vec::new());
        }
        if den[0].is_zero() {
            return Err(MahlerError::PoleAtEvaluationPoint(c.to_string()));
        }
        let inv = den[0].recip();
        let mut out: Vec<Rational> = Vec::with_capacity(n);
        for t in 0..n {
            let mut acc = num[t].clone();
            for j in 1..=t {
                acc -= &den[j] * &out[t - j];
            }
            out.push(acc * &inv);
        }
        Ok(out)
    }

    pub fn derivative(&self) -> RatFun {
        if self.den.is_constant() {
            return Self::reduced(self.num.derivative(), self.den.clone());
        }
        let n = &(&self.num.derivative() * &self.den) - &(&self.num * &self.den.derivative());
        Self::reduced(n, &self.den * &self.den)
    }

    /// `f(c·λ)`.
    pub fn scale_variable(&self, c: &Rational) -> RatFun {
        Self::reduced(self.num.scale_variable(c), self.den.scale_variable(c))
    }

    pub fn checked_div(&self, other: &RatFun) -> Result<RatFun> {
        let inv = other.inverse().ok_or(MahlerError::DivisionByZero)?;
        Ok(self.times(&inv))
    }

    /// Constant value when the function does not depend on λ.
    pub fn as_constant(&self) -> Option<Rational> {
        if self.num.is_constant() && self.den.is_constant() {
            Some(self.num.coeff(0) / self.den.coeff(0))
        } else {
            None
        }
    }
}

fn multiplicity(p: &Poly, c: &Rational) -> usize {
    let lin = Poly::linear_root(c);
    let mut k = 0;
    let mut cur = p.clone();
    loop {
        if cur.is_zero() {
            return k;
        }
        let (qq, r) = cur.div_rem(&lin);
        if !r.is_zero() {
            return k;
        }
        cur = qq;
        k += 1;
    }
}

impl Field for RatFun {
    fn zero() -> Self {
        Self::from_poly(Poly::zero())
    }
    fn one() -> Self {
        Self::from_poly(Poly::one())
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
    fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }
    fn from_rational(q: &Rational) -> Self {
        Self::constant(q.clone())
    }
    fn plus(&self, other: &Self) -> Self {
        if self.num.is_zero() {
            return other.clone();
        }
        if other.num.is_zero() {
            return self.clone();
        }
        if self.den == other.den {
            return Self::reduced(&self.num + &other.num, self.den.clone());
        }
        // Henrici: only a common factor of the denominators can cancel.
        let g = Poly::gcd(&self.den, &other.den);
        if g.is_one() {
            let n = &(&self.num * &other.den) + &(&other.num * &self.den);
            return RatFun {
                num: n,
                den: &self.den * &other.den,
            };
        }
        let d1 = self.den.exact_div(&g);
        let d2 = other.den.exact_div(&g);
        let t = &(&self.num * &d2) + &(&other.num * &d1);
        if t.is_zero() {
            return Self::zero();
        }
        let h = Poly::gcd(&t, &g);
        if h.is_one() {
            return RatFun {
                num: t,
                den: &d1 * &other.den,
            };
        }
        RatFun {
            num: t.exact_div(&h),
            den: &d1 * &other.den.exact_div(&h),
        }
    }
    fn minus(&self, other: &Self) -> Self {
        self.plus(&other.negated())
    }
    fn times(&self, other: &Self) -> Self {
        if self.num.is_zero() || other.num.is_zero() {
            return Self::zero();
        }
        if self.den.is_one() && other.den.is_one() {
            return RatFun {
                num: &self.num * &other.num,
                den: Poly::one(),
            };
        }
        let g1 = Poly::gcd(&self.num, &other.den);
        let g2 = Poly::gcd(&other.num, &self.den);
        let n = &self.num.exact_div(&g1) * &other.num.exact_div(&g2);
        let d = &self.den.exact_div(&g2) * &other.den.exact_div(&g1);
        let lead = d.leading();
        if lead.is_one() {
            RatFun { num: n, den: d }
        } else {
            let inv = lead.recip();
            RatFun {
                num: n.scale(&inv),
                den: d.scale(&inv),
            }
        }
    }
    fn negated(&self) -> Self {
        RatFun {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
    fn inverse(&self) -> Option<Self> {
        if self.num.is_zero() {
            None
        } else {
            Some(Self::reduced(self.den.clone(), self.num.clone()))
        }
    }
    fn scaled(&self, q: &Rational) -> Self {
        if q.is_zero() {
            return Self::zero();
        }
        RatFun {
            num: self.num.scale(q),
            den: self.den.clone(),
        }
    }
    fn to_json(&self) -> serde_json::Value {
        serde_json::json!({ "num": self.num.to_json(), "den": self.den.to_json() })
    }
}

impl fmt::Debug for RatFun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RatFun({self})")
    }
}

impl fmt::Display for RatFun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.num.display_in("λ");
        if self.den.is_one() {
            return f.write_str(&n);
        }
        let wrap = |s: String, p: &Poly| {
            if p.coeffs().iter().filter(|c| !c.is_zero()).count() > 1 {
                format!("({s})")
            } else {
                s
            }
        };
        write!(
            f,
            "{}/{}",
            wrap(n, &self.num),
            wrap(self.den.display_in("λ"), &self.den)
        )
    }
}
