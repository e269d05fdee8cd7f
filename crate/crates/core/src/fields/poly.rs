use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::Rational;

/// Dense univariate polynomial over ℚ, coefficients in ascending degree.
/// Canonical: the highest stored coefficient is nonzero; zero is `[]`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    coeffs: Vec<Rational>,
}

/// Rational roots with multiplicities, and the cofactor without rational roots.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalRoots {
    pub roots: Vec<(Rational, usize)>,
    pub residual: Poly,
}

impl Poly {
    pub fn from_coeffs(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::from_coeffs(coeffs.iter().map(|&c| Rational::from_integer(c.into())).collect())
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::from_coeffs(vec![c])
    }

    /// The indeterminate `X`.
    pub fn x() -> Self {
        Self::monomial(Rational::one(), 1)
    }

    pub fn monomial(c: Rational, deg: usize) -> Self {
        let mut coeffs = vec![Rational::zero(); deg + 1];
        coeffs[deg] = c;
        Self::from_coeffs(coeffs)
    }

    /// `X - r`.
    pub fn linear_root(r: &Rational) -> Self {
        Self::from_coeffs(vec![-r.clone(), Rational::one()])
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Rational {
        self.coeffs.last().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let inv = self.leading().recip();
        self.scale(&inv)
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs.iter().rev().fold(Rational::zero(), |acc, c| acc * x + c)
    }

    /// First `n` coefficients of `p(x + c)`.
    pub fn taylor_coeffs(&self, c: &Rational, n: usize) -> Vec<Rational> {
        let mut r = vec![Rational::zero(); n];
        for a in self.coeffs.iter().rev() {
            // r ← r·(x + c) + a, truncated
            for t in (0..n).rev() {
                let lower = if t > 0 { r[t - 1].clone() } else { Rational::zero() };
                r[t] = &r[t] * c + lower;
            }
            if n > 0 {
                r[0] += a;
            }
        }
        r
    }

    pub fn derivative(&self) -> Self {
        Self::from_coeffs(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * Rational::from_integer(BigInt::from(i)))
                .collect(),
        )
    }

    pub fn pow(&self, k: usize) -> Self {
        let mut acc = Poly::one();
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// `p(c·X)`.
    pub fn scale_variable(&self, c: &Rational) -> Self {
        let mut f = Rational::one();
        let mut out = Vec::with_capacity(self.coeffs.len());
        for a in &self.coeffs {
            out.push(a * &f);
            f *= c;
        }
        Self::from_coeffs(out)
    }

    /// Euclidean division; panics when `d` is zero.
    pub fn div_rem(&self, d: &Poly) -> (Poly, Poly) {
        assert!(!d.is_zero(), "polynomial division by zero");
        let dd = d.degree().unwrap();
        let lead_inv = d.leading().recip();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Poly::zero(), self.clone());
        }
        let mut quot = vec![Rational::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = &rem[k + dd] * &lead_inv;
            if !c.is_zero() {
                for (j, b) in d.coeffs.iter().enumerate() {
                    rem[k + j] -= &c * b;
                }
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        (Poly::from_coeffs(quot), Poly::from_coeffs(rem))
    }

    /// Exact quotient; debug-asserts the remainder vanishes.
    pub fn exact_div(&self, d: &Poly) -> Poly {
        let (q, r) = self.div_rem(d);
        debug_assert!(r.is_zero(), "inexact polynomial division");
        q
    }

    /// Monic gcd (zero iff both inputs are zero).
    pub fn gcd(a: &Poly, b: &Poly) -> Poly {
        let (mut a, mut b) = (a.clone(), b.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r.monic();
        }
        a.monic()
    }

    /// Writes `p = X^v · q` with `q(0) ≠ 0`; returns `(v, q)`.
    pub fn strip_x_power(&self) -> (usize, Poly) {
        let v = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        if self.is_zero() {
            return (0, Poly::zero());
        }
        (v, Poly::from_coeffs(self.coeffs[v..].to_vec()))
    }

    /// Yun's square-free decomposition: `(factor, multiplicity)` pairs with
    /// monic, pairwise coprime, square-free nonconstant factors.
    pub fn square_free_decomposition(&self) -> Vec<(Poly, usize)> {
        let mut out = Vec::new();
        if self.degree().unwrap_or(0) == 0 {
            return out;
        }
        let f = self.monic();
        let df = f.derivative();
        let c = Poly::gcd(&f, &df);
        let mut w = f.exact_div(&c);
        let mut y = df.exact_div(&c);
        let mut z = &y - &w.derivative();
        let mut i = 1;
        while w.degree().unwrap_or(0) > 0 {
            let g = Poly::gcd(&w, &z);
            if g.degree().unwrap_or(0) > 0 {
                out.push((g.clone(), i));
            }
            w = w.exact_div(&g);
            y = z.exact_div(&g);
            z = &y - &w.derivative();
            i += 1;
        }
        out
    }

    /// All rational roots with exact multiplicities.
    pub fn rational_roots(&self) -> RationalRoots {
        assert!(!self.is_zero(), "rational_roots of the zero polynomial");
        let mut roots: Vec<(Rational, usize)> = Vec::new();
        for (part, mult) in self.square_free_decomposition() {
            for r in square_free_rational_roots(&part) {
                roots.push((r, mult));
            }
        }
        roots.sort_by(|a, b| a.0.cmp(&b.0));
        let mut residual = self.clone();
        for (r, m) in &roots {
            let lin = Poly::linear_root(r);
            for _ in 0..*m {
                residual = residual.exact_div(&lin);
            }
        }
        RationalRoots { roots, residual }
    }
}

/// Rational roots of a square-free polynomial via the rational root theorem.
fn square_free_rational_roots(p: &Poly) -> Vec<Rational> {
    let mut roots = Vec::new();
    let (v, p) = p.strip_x_power();
    if v > 0 {
        roots.push(Rational::zero());
    }
    if p.degree().unwrap_or(0) == 0 {
        return roots;
    }
    // clear denominators
    let lcm = p.coeffs().iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> = p
        .coeffs()
        .iter()
        .map(|c| (c * Rational::from_integer(lcm.clone())).to_integer())
        .collect();
    let a0 = ints[0].abs();
    let an = ints.last().unwrap().abs();
    let nums = divisors(&a0);
    let dens = divisors(&an);
    let mut seen = std::collections::BTreeSet::new();
    for u in &nums {
        for w in &dens {
            for sign in [1i32, -1] {
                let cand = Rational::new(u.clone() * BigInt::from(sign), w.clone());
                if seen.insert(cand.clone()) && p.eval(&cand).is_zero() {
                    roots.push(cand);
                }
            }
        }
    }
    roots
}

/// Positive divisors by trial division.
fn divisors(n: &BigInt) -> Vec<BigInt> {
    let n = n.abs();
    if n.is_zero() {
        return vec![BigInt::one()];
    }
    if let Some(small) = n.to_u64() {
        let mut small_divs = Vec::new();
        let mut d = 1u64;
        while d.saturating_mul(d) <= small {
            if small % d == 0 {
                small_divs.push(d);
                if d != small / d {
                    small_divs.push(small / d);
                }
            }
            d += 1;
        }
        return small_divs.into_iter().map(BigInt::from).collect();
    }
    // prime factorization by trial division, then expand
    let mut factors: Vec<(BigInt, u32)> = Vec::new();
    let mut m = n.clone();
    let mut d = BigInt::from(2);
    while &d * &d <= m {
        let mut e = 0;
        while (&m % &d).is_zero() {
            m /= &d;
            e += 1;
        }
        if e > 0 {
            factors.push((d.clone(), e));
        }
        d += 1;
    }
    if m > BigInt::one() {
        factors.push((m, 1));
    }
    let mut divs = vec![BigInt::one()];
    for (pr, e) in factors {
        let mut next = Vec::new();
        for dv in &divs {
            let mut pw = BigInt::one();
            for _ in 0..=e {
                next.push(dv * &pw);
                pw *= &pr;
            }
        }
        divs = next;
    }
    divs
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::from_coeffs((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::from_coeffs((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::from_coeffs(out)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::from_coeffs(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({self})")
    }
}

impl Poly {
    /// Ascending coefficient array of rational strings.
    pub fn to_json(&self) -> serde_json::Value {
        self.coeffs
            .iter()
            .map(|c| serde_json::Value::String(c.to_string()))
            .collect()
    }

    /// Renders in the variable `var`, highest degree first.
    pub fn display_in(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut s = String::new();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            if s.is_empty() {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            let mono = match i {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{i}"),
            };
            if i == 0 {
                s.push_str(&mag.to_string());
            } else if mag.is_one() {
                s.push_str(&mono);
            } else if mag.is_integer() {
                s.push_str(&format!("{mag}{mono}"));
            } else {
                s.push_str(&format!("({mag}){mono}"));
            }
        }
        s
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_in("X"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{q, qi};
    use proptest::prelude::*;

    #[test]
    fn roots_of_example_charpolys() {
        // -X + 1
        let r = Poly::from_ints(&[1, -1]).rational_roots();
        assert_eq!(r.roots, vec![(qi(1), 1)]);
        assert!(r.residual.is_constant());
        // X^2 - X
        let r = Poly::from_ints(&[0, -1, 1]).rational_roots();
        assert_eq!(r.roots, vec![(qi(0), 1), (qi(1), 1)]);
        assert!(r.residual.is_one());
        let (v, stripped) = Poly::from_ints(&[0, -1, 1]).strip_x_power();
        assert_eq!(v, 1);
        assert_eq!(stripped.rational_roots().roots, vec![(qi(1), 1)]);
    }

    #[test]
    fn irreducible_quadratic_has_no_roots() {
        let p = Poly::from_ints(&[1, 0, 1]);
        let r = p.rational_roots();
        assert!(r.roots.is_empty());
        assert_eq!(r.residual, p);
    }

    #[test]
    fn multiplicities() {
        // (X-1)^2 (X-3)
        let p = &Poly::linear_root(&qi(1)).pow(2) * &Poly::linear_root(&qi(3));
        assert_eq!(p.rational_roots().roots, vec![(qi(1), 2), (qi(3), 1)]);
        // (2X+1)^3 (X^2+1)
        let p = &Poly::from_ints(&[1, 2]).pow(3) * &Poly::from_ints(&[1, 0, 1]);
        let r = p.rational_roots();
        assert_eq!(r.roots, vec![(q(-1, 2), 3)]);
        assert_eq!(r.residual.degree(), Some(2));
    }

    #[test]
    fn gcd_and_division() {
        let a = &Poly::from_ints(&[-1, 1]) * &Poly::from_ints(&[2, 1]);
        let b = &Poly::from_ints(&[-1, 1]) * &Poly::from_ints(&[5, 0, 1]);
        assert_eq!(Poly::gcd(&a, &b), Poly::from_ints(&[-1, 1]));
        let (qq, r) = b.div_rem(&a);
        assert_eq!(&(&qq * &a) + &r, b);
    }

    fn small_poly() -> impl Strategy<Value = Poly> {
        prop::collection::vec(-4i64..=4, 1..5).prop_map(|v| Poly::from_ints(&v))
    }

    proptest! {
        #[test]
        fn roots_times_residual_reproduces(roots in prop::collection::vec((-3i64..=3, 1i64..=3, 1usize..=3), 0..3), extra in small_poly()) {
            let mut p = if extra.is_zero() { Poly::one() } else { extra };
            for (n, d, m) in &roots {
                p = &p * &Poly::linear_root(&q(*n, *d)).pow(*m);
            }
            let rr = p.rational_roots();
            let mut back = rr.residual.clone();
            for (r, m) in &rr.roots {
                back = &back * &Poly::linear_root(r).pow(*m);
            }
            prop_assert_eq!(back.monic(), p.monic());
            prop_assert!(rr.residual.rational_roots().roots.is_empty());
        }
    }
}
