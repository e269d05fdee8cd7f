//! Mahler operators `Σ a_i φ_p^i` with Hahn-series coefficients.

use std::fmt;

use crate::error::{MahlerError, Result};
use crate::fields::{pow_int, Field, RatFun, Rational};
use crate::hahn::{Bound, HahnSeries};

#[derive(Clone, PartialEq)]
pub struct MahlerOperator<K: Field> {
    p: u32,
    coeffs: Vec<HahnSeries<K>>,
}

impl<K: Field> MahlerOperator<K> {
    /// Validated constructor: `p >= 2`, and neither `a_0` nor `a_n` is the
    /// certified zero series.
    pub fn new(p: u32, coeffs: Vec<HahnSeries<K>>) -> Result<Self> {
        if p < 2 {
            return Err(MahlerError::InvalidOperator(format!("radix {p} is smaller than 2")));
        }
        match (coeffs.first(), coeffs.last()) {
            (Some(a0), Some(an)) if !a0.is_exact_zero() && !an.is_exact_zero() => Ok(MahlerOperator { p, coeffs }),
            (None, _) => Err(MahlerError::InvalidOperator("no coefficients".into())),
            _ => Err(MahlerError::InvalidOperator("a_0 and a_n must be nonzero".into())),
        }
    }

    /// Unvalidated constructor used for intermediate quotients; trailing
    /// certified-zero coefficients are removed.
    pub fn from_coeffs(p: u32, mut coeffs: Vec<HahnSeries<K>>) -> Self {
        while coeffs.len() > 1 && coeffs.last().is_some_and(|c| c.is_exact_zero()) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(HahnSeries::zero());
        }
        MahlerOperator { p, coeffs }
    }

    /// Order-0 operator `f`.
    pub fn multiplication(p: u32, f: HahnSeries<K>) -> Self {
        Self::from_coeffs(p, vec![f])
    }

    pub fn identity(p: u32) -> Self {
        Self::multiplication(p, HahnSeries::one())
    }

    /// `z^nu·φ - c`, optionally followed by multiplication by `h^{-1}` on the
    /// right (pass `hinv`).
    pub fn first_order(p: u32, nu: &Rational, c: &K, hinv: Option<&HahnSeries<K>>) -> Self {
        let a0 = HahnSeries::constant(c.negated());
        let a1 = HahnSeries::monomial(K::one(), nu.clone());
        let op = Self::from_coeffs(p, vec![a0, a1]);
        match hinv {
            Some(h) => op.mul(&Self::multiplication(p, h.clone())).expect("same radix"),
            None => op,
        }
    }

    pub fn radix(&self) -> u32 {
        self.p
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[HahnSeries<K>] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> &HahnSeries<K> {
        &self.coeffs[i]
    }

    pub fn apply(&self, f: &HahnSeries<K>) -> HahnSeries<K> {
        let mut acc = HahnSeries::zero();
        let mut phi_f = f.clone();
        for (i, a) in self.coeffs.iter().enumerate() {
            if i > 0 {
                phi_f = phi_f.mal(self.p, 1);
            }
            acc = acc.add(&a.mul(&phi_f));
        }
        acc
    }

    /// Ore product: `c_k = Σ_{i+j=k} a_i φ^i(b_j)`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.p != other.p {
            return Err(MahlerError::RadixMismatch(self.p, other.p));
        }
        let n = self.order() + other.order();
        let mut out = vec![HahnSeries::zero(); n + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_exact_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].add(&a.mul(&b.mal(self.p, i as i64)));
            }
        }
        Ok(Self::from_coeffs(self.p, out))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.p != other.p {
            return Err(MahlerError::RadixMismatch(self.p, other.p));
        }
        let n = self.coeffs.len().max(other.coeffs.len());
        let zero = HahnSeries::zero();
        let out = (0..n)
            .map(|i| {
                self.coeffs
                    .get(i)
                    .unwrap_or(&zero)
                    .add(other.coeffs.get(i).unwrap_or(&zero))
            })
            .collect();
        Ok(Self::from_coeffs(self.p, out))
    }

    /// `f·L`.
    pub fn left_mul_series(&self, f: &HahnSeries<K>) -> Self {
        Self::from_coeffs(self.p, self.coeffs.iter().map(|a| f.mul(a)).collect())
    }

    /// Right Euclidean division `self = Q·divisor + R` with `order(R) < order(divisor)`.
    /// Quotient coefficients are certified up to `ceiling` at best; the
    /// returned remainder is the list of its coefficients.
    pub fn right_divide(&self, divisor: &Self, ceiling: &Rational) -> Result<(Self, Vec<HahnSeries<K>>)> {
        if self.p != divisor.p {
            return Err(MahlerError::RadixMismatch(self.p, divisor.p));
        }
        let m = divisor.order();
        if m == 0 {
            return Err(MahlerError::InvalidOperator(
                "divisor must have order at least 1".into(),
            ));
        }
        let lead = divisor.coeff(m);
        if lead.leading().is_err() {
            return Err(MahlerError::ZeroDivisor);
        }
        let mut rem = self.coeffs.clone();
        if rem.len() <= m {
            return Ok((Self::multiplication(self.p, HahnSeries::zero()), rem));
        }
        let mut quot = vec![HahnSeries::zero(); rem.len() - m];
        for d in (m..rem.len()).rev() {
            let k = d - m;
            let r = rem[d].clone();
            if r.is_exact_zero() {
                continue;
            }
            let b = lead.mal(self.p, k as i64);
            let vb = b.val()?;
            let lb_r = match r.support_lower_bound() {
                Bound::Finite(x) => x,
                Bound::PosInf => continue,
                Bound::NegInf => return Err(MahlerError::UnknownLeadingTerm),
            };
            let inv = b.invert(&(ceiling + &vb - &lb_r))?;
            let q = r.mul(&inv);
            for (j, bj) in divisor.coeffs.iter().enumerate().take(m) {
                rem[k + j] = rem[k + j].sub(&q.mul(&bj.mal(self.p, k as i64)));
            }
            // rem[d] cancels by construction and is dropped below
            quot[k] = q;
        }
        rem.truncate(m);
        Ok((Self::from_coeffs(self.p, quot), rem))
    }

    /// `θ_μ^{-1} L θ_μ` with `θ_μ = z^{μ/(p-1)}`: `a_i ↦ z^{(p^i-1)μ/(p-1)} a_i`.
    pub fn gauge_theta(&self, mu: &Rational) -> Self {
        let pm1 = Rational::from_integer((self.p - 1).into());
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, a)| {
                let pi = pow_int(&Rational::from_integer(self.p.into()), i as i64);
                a.shift(&((pi - Rational::from_integer(1.into())) * mu / &pm1))
            })
            .collect();
        MahlerOperator { p: self.p, coeffs }
    }

    /// `e_c^{-1} L e_c = Σ c^i a_i φ^i`.
    pub fn gauge_exp(&self, c: &K) -> Self {
        let mut ci = K::one();
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for a in &self.coeffs {
            coeffs.push(a.scale(&ci));
            ci = ci.times(c);
        }
        MahlerOperator { p: self.p, coeffs }
    }

    /// `g^{-1} L g = Σ (φ^i(g)/g) a_i φ^i`, with `g^{-1}` certified below `ceiling`.
    pub fn gauge_unit(&self, g: &HahnSeries<K>, ceiling: &Rational) -> Result<Self> {
        let ginv = g.invert(ceiling)?;
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, a)| g.mal(self.p, i as i64).mul(&ginv).mul(a))
            .collect();
        Ok(MahlerOperator { p: self.p, coeffs })
    }

    /// Applies `f` to every coefficient series.
    pub fn map_coeffs(&self, f: impl Fn(&HahnSeries<K>) -> HahnSeries<K>) -> Self {
        MahlerOperator {
            p: self.p,
            coeffs: self.coeffs.iter().map(f).collect(),
        }
    }

    pub fn lift<K2: Field>(&self, f: impl Fn(&K) -> K2) -> MahlerOperator<K2> {
        MahlerOperator {
            p: self.p,
            coeffs: self.coeffs.iter().map(|a| a.map_coeffs(&f)).collect(),
        }
    }

    /// Coefficientwise agreement on the common masks.
    pub fn eq_on_mask(&self, other: &Self) -> bool {
        if self.p != other.p {
            return false;
        }
        let n = self.coeffs.len().max(other.coeffs.len());
        let zero = HahnSeries::zero();
        (0..n).all(|i| {
            self.coeffs
                .get(i)
                .unwrap_or(&zero)
                .eq_on_mask(other.coeffs.get(i).unwrap_or(&zero))
                .0
        })
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "p": self.p,
            "coeffs": self.coeffs.iter().map(|a| a.to_json()).collect::<Vec<_>>(),
        })
    }
}

impl MahlerOperator<Rational> {
    /// `L(g e_λ) = e_λ Σ λ^i a_i φ^i(g)`: coefficients lifted to ℚ(λ) and twisted by `λ^i`.
    pub fn gauge_exp_param(&self) -> MahlerOperator<RatFun> {
        self.lift(RatFun::from_rational).gauge_exp(&RatFun::lambda())
    }
}

impl<K: Field> fmt::Display for MahlerOperator<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_exact_zero() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "({a})")?,
                1 => write!(f, "({a})·φ")?,
                _ => write!(f, "({a})·φ^{i}")?,
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

impl<K: Field> fmt::Debug for MahlerOperator<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "MahlerOperator(p = {})", self.p)?;
        for (i, a) in self.coeffs.iter().enumerate() {
            writeln!(f, "  a[{i}] = {a:?}")?;
        }
        Ok(())
    }
}
