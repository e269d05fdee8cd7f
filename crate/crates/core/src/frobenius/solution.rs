//! Solutions `Σ f_{c,u}(z) ℓ_{c,u}` and the action of operators on them.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::Result;
use crate::fields::{binomial, factorial, pow_int, Field, Rational};
use crate::hahn::{Mask, ParametricSeries, QSeries};
use crate::operator::MahlerOperator;

/// Element of the module spanned by the symbols `ℓ_{c,u}` (with `e_c = ℓ_{c,0}`)
/// over Hahn series. Keys are `(c, u)`; exactly zero parts are not stored.
#[derive(Clone, PartialEq)]
pub struct SolutionObject {
    pub p: u32,
    parts: BTreeMap<(Rational, usize), QSeries>,
}

impl SolutionObject {
    pub fn new(p: u32) -> Self {
        SolutionObject {
            p,
            parts: BTreeMap::new(),
        }
    }

    /// `f · ℓ_{c,u}`.
    pub fn single(p: u32, c: Rational, u: usize, f: QSeries) -> Self {
        let mut s = Self::new(p);
        s.add_part(c, u, f);
        s
    }

    pub fn parts(&self) -> &BTreeMap<(Rational, usize), QSeries> {
        &self.parts
    }

    pub fn part(&self, c: &Rational, u: usize) -> Option<&QSeries> {
        self.parts.get(&(c.clone(), u))
    }

    pub fn add_part(&mut self, c: Rational, u: usize, f: QSeries) {
        let key = (c, u);
        let merged = match self.parts.remove(&key) {
            Some(old) => old.add(&f),
            None => f,
        };
        if !merged.is_exact_zero() {
            self.parts.insert(key, merged);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for ((c, u), f) in &other.parts {
            out.add_part(c.clone(), *u, f.clone());
        }
        out
    }

    /// Intersection of the masks of all parts.
    pub fn mask(&self) -> Mask {
        self.parts.values().fold(Mask::full(), |m, f| m.intersect(f.mask()))
    }

    /// True when every part has no stored term, i.e. vanishes on its mask.
    pub fn vanishes_on_mask(&self) -> bool {
        self.parts.values().all(QSeries::is_empty)
    }

    pub fn exponents(&self) -> Vec<Rational> {
        let mut v: Vec<Rational> = self.parts.keys().map(|(c, _)| c.clone()).collect();
        v.dedup();
        v
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut by_c: BTreeMap<&Rational, Vec<serde_json::Value>> = BTreeMap::new();
        for ((c, u), f) in &self.parts {
            by_c.entry(c)
                .or_default()
                .push(serde_json::json!({ "u": u, "series": f.to_json() }));
        }
        let parts: Vec<_> = by_c
            .into_iter()
            .map(|(c, terms)| serde_json::json!({ "c": c.to_string(), "terms": terms }))
            .collect();
        serde_json::Value::Array(parts)
    }
}

impl fmt::Display for SolutionObject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parts.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for ((c, u), s) in &self.parts {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let sym = if *u == 0 {
                format!("e_{c}")
            } else {
                format!("ℓ_{{{c},{u}}}")
            };
            write!(f, "({s})·{sym}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for SolutionObject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// One application of `φ`, using `φ(ℓ_{c,u}) = c ℓ_{c,u} + ℓ_{c,u-1}`.
pub fn phi_step(y: &SolutionObject) -> SolutionObject {
    let mut out = SolutionObject::new(y.p);
    for ((c, u), f) in &y.parts {
        let pf = f.mal(y.p, 1);
        out.add_part(c.clone(), *u, pf.scale(c));
        if *u > 0 {
            out.add_part(c.clone(), u - 1, pf);
        }
    }
    out
}

/// `φ^i` in closed form: `φ^i(ℓ_{c,u}) = Σ_t binom(i,t) c^{i-t} ℓ_{c,u-t}`.
pub fn phi_power(y: &SolutionObject, i: usize) -> SolutionObject {
    let mut out = SolutionObject::new(y.p);
    for ((c, u), f) in &y.parts {
        let pf = f.mal(y.p, i as i64);
        for t in 0..=i.min(*u) {
            let k = Rational::from_integer(binomial(i, t)) * pow_int(c, (i - t) as i64);
            out.add_part(c.clone(), u - t, pf.scale(&k));
        }
    }
    out
}

/// `L(y) = Σ a_i φ^i(y)` below `hi`, grouped by `(c, u)`. Parts that vanish on
/// their mask are kept so that the residual mask stays visible.
pub fn apply_to_solution(l: &MahlerOperator<Rational>, y: &SolutionObject, hi: &Rational) -> SolutionObject {
    let mut acc: BTreeMap<(Rational, usize), QSeries> = BTreeMap::new();
    for ((c, u), f) in &y.parts {
        let mut phi_f = f.clone();
        for (i, a) in l.coeffs().iter().enumerate() {
            if i > 0 {
                phi_f = phi_f.mal(y.p, 1);
            }
            if a.is_exact_zero() {
                continue;
            }
            // a_i φ^i(f ℓ_{c,u}) = Σ_t binom(i,t) c^{i-t} a_i φ^i(f) ℓ_{c,u-t}
            let prod = phi_f.mul_truncated(a, hi);
            for t in 0..=i.min(*u) {
                let k = Rational::from_integer(binomial(i, t)) * pow_int(c, (i - t) as i64);
                let slot = acc.entry((c.clone(), u - t)).or_insert_with(QSeries::zero);
                *slot = slot.add(&prod.scale(&k));
            }
        }
    }
    SolutionObject {
        p: y.p,
        parts: acc.into_iter().filter(|(_, f)| !f.is_exact_zero()).collect(),
    }
}

/// `y_{c,j,m} = ev_c ∂_λ^{s+m}(g e_λ) = Σ_u h_u ℓ_{c,u}` with
/// `h_u = u! binom(s+m, u) ev_c(∂_λ^{s+m-u} g)`, for `m < count`.
pub fn specialize_solutions(
    p: u32,
    g: &ParametricSeries,
    c: &Rational,
    s: usize,
    count: usize,
) -> Result<Vec<SolutionObject>> {
    let top = s + count.saturating_sub(1);
    // evaluated[t] = ev_c ∂_λ^t g, read off the Taylor expansion at c
    let mut columns: Vec<Vec<(Rational, Rational)>> = vec![Vec::with_capacity(g.len()); top + 1];
    for (e, k) in g.terms() {
        for (t, a) in k.taylor_coeffs(c, top + 1)?.into_iter().enumerate() {
            if !a.is_zero() {
                columns[t].push((e.clone(), a * Rational::from_integer(factorial(t))));
            }
        }
    }
    let evaluated: Vec<QSeries> = columns
        .into_iter()
        .map(|col| QSeries::new(col, g.mask().clone()))
        .collect();
    let mut out = Vec::with_capacity(count);
    for m in 0..count {
        let n = s + m;
        let mut y = SolutionObject::new(p);
        for u in 0..=n {
            let k = Rational::from_integer(factorial(u) * binomial(n, u));
            y.add_part(c.clone(), u, evaluated[n - u].scale(&k));
        }
        out.push(y);
    }
    Ok(out)
}
