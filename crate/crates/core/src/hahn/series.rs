use std::collections::BTreeMap;
use std::fmt;

use num_traits::Signed;

use super::mask::{Bound, Mask};
use crate::error::{MahlerError, Result};
use crate::fields::{pow_int, Field, Rational};

/// Truncated Hahn series: finitely many stored terms plus the mask on which
/// they are certified. Terms are sorted by exponent, nonzero, and inside the
/// mask.
#[derive(Clone, PartialEq)]
pub struct HahnSeries<K: Field> {
    terms: Vec<(Rational, K)>,
    mask: Mask,
}

impl<K: Field> HahnSeries<K> {
    /// Builds a series from arbitrary terms: duplicates are summed, zeros and
    /// terms outside the mask are dropped.
    pub fn new(terms: impl IntoIterator<Item = (Rational, K)>, mask: Mask) -> Self {
        let mut acc: BTreeMap<Rational, K> = BTreeMap::new();
        for (e, c) in terms {
            match acc.get_mut(&e) {
                Some(v) => *v = v.plus(&c),
                None => {
                    acc.insert(e, c);
                }
            }
        }
        Self::from_sorted_map(acc, mask)
    }

    fn from_sorted_map(acc: BTreeMap<Rational, K>, mask: Mask) -> Self {
        let terms = acc
            .into_iter()
            .filter(|(e, c)| !c.is_zero() && mask.contains(e))
            .collect();
        HahnSeries { terms, mask }
    }

    /// Exactly known finite sum of monomials.
    pub fn exact(terms: impl IntoIterator<Item = (Rational, K)>) -> Self {
        Self::new(terms, Mask::full())
    }

    pub fn zero() -> Self {
        HahnSeries {
            terms: Vec::new(),
            mask: Mask::full(),
        }
    }

    pub fn one() -> Self {
        Self::constant(K::one())
    }

    pub fn constant(c: K) -> Self {
        Self::monomial(c, Rational::zero())
    }

    pub fn monomial(c: K, e: Rational) -> Self {
        Self::exact([(e, c)])
    }

    pub fn terms(&self) -> &[(Rational, K)] {
        &self.terms
    }

    pub fn mask(&self) -> &Mask {
        &self.mask
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// No stored terms and a full mask: the zero series, certified.
    pub fn is_exact_zero(&self) -> bool {
        self.terms.is_empty() && self.mask.is_full()
    }

    pub fn is_exact(&self) -> bool {
        self.mask.is_full()
    }

    /// Stored coefficient at `e` (zero when absent). Only meaningful inside the mask.
    pub fn coeff(&self, e: &Rational) -> K {
        match self.terms.binary_search_by(|(x, _)| x.cmp(e)) {
            Ok(i) => self.terms[i].1.clone(),
            Err(_) => K::zero(),
        }
    }

    /// Certified coefficient at `e`, or `None` when `e` lies outside the mask.
    pub fn certified_coeff(&self, e: &Rational) -> Option<K> {
        self.mask.contains(e).then(|| self.coeff(e))
    }

    /// A certified lower bound for the support of the true series: every
    /// exponent of the true series is `>=` this bound. `NegInf` when the mask
    /// makes no claim about low exponents; `PosInf` for the certified zero.
    pub fn support_lower_bound(&self) -> Bound {
        match self.mask.prefix_end() {
            None => Bound::NegInf,
            Some(hi) => match self.terms.first() {
                Some((e, _)) => Bound::Finite(e.clone()).min(hi.clone()),
                None => hi.clone(),
            },
        }
    }

    pub fn val(&self) -> Result<Rational> {
        self.leading().map(|(e, _)| e.clone())
    }

    pub fn cld(&self) -> Result<K> {
        self.leading().map(|(_, c)| c.clone())
    }

    /// Leading term, provided the mask certifies that nothing lies below it.
    pub fn leading(&self) -> Result<&(Rational, K)> {
        match (self.terms.first(), self.mask.prefix_end()) {
            (Some(t), Some(hi)) if Bound::Finite(t.0.clone()) < *hi => Ok(t),
            (None, _) if self.mask.is_full() => Err(MahlerError::ZeroSeries),
            _ => Err(MahlerError::UnknownLeadingTerm),
        }
    }

    pub fn with_mask(&self, mask: &Mask) -> Self {
        let m = self.mask.intersect(mask);
        let terms = self.terms.iter().filter(|(e, _)| m.contains(e)).cloned().collect();
        HahnSeries { terms, mask: m }
    }

    /// Restriction to exponents `< hi`.
    pub fn truncate(&self, hi: &Rational) -> Self {
        let m = self.mask.truncate(hi);
        let terms = self.terms.iter().filter(|(e, _)| e < hi).cloned().collect();
        HahnSeries { terms, mask: m }
    }

    pub fn negated(&self) -> Self {
        HahnSeries {
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c.negated())).collect(),
            mask: self.mask.clone(),
        }
    }

    pub fn scale(&self, k: &K) -> Self {
        if k.is_zero() {
            return HahnSeries {
                terms: Vec::new(),
                mask: self.mask.clone(),
            };
        }
        HahnSeries {
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c.times(k))).collect(),
            mask: self.mask.clone(),
        }
    }

    pub fn scale_rational(&self, q: &Rational) -> Self {
        self.scale(&K::from_rational(q))
    }

    pub fn add(&self, other: &Self) -> Self {
        let mask = self.mask.intersect(&other.mask);
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.terms, &other.terms);
        while i < a.len() || j < b.len() {
            let ord = match (a.get(i), b.get(j)) {
                (Some(x), Some(y)) => x.0.cmp(&y.0),
                (Some(_), None) => std::cmp::Ordering::Less,
                _ => std::cmp::Ordering::Greater,
            };
            let (e, c) = match ord {
                std::cmp::Ordering::Less => {
                    i += 1;
                    a[i - 1].clone()
                }
                std::cmp::Ordering::Greater => {
                    j += 1;
                    b[j - 1].clone()
                }
                std::cmp::Ordering::Equal => {
                    i += 1;
                    j += 1;
                    (a[i - 1].0.clone(), a[i - 1].1.plus(&b[j - 1].1))
                }
            };
            if !c.is_zero() && mask.contains(&e) {
                out.push((e, c));
            }
        }
        HahnSeries { terms: out, mask }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.negated())
    }

    /// Exponents where the true product may differ from the product of the
    /// stored parts.
    fn uncertain_part(&self) -> Mask {
        match self.support_lower_bound() {
            Bound::NegInf => self.mask.complement(),
            Bound::PosInf => Mask::empty(),
            Bound::Finite(lb) => self.mask.complement().intersect(&Mask::at_least(lb)),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mask = self.product_mask(other);
        let mut acc: BTreeMap<Rational, K> = BTreeMap::new();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e = e1 + e2;
                if !mask.contains(&e) {
                    continue;
                }
                let c = c1.times(c2);
                match acc.get_mut(&e) {
                    Some(v) => *v = v.plus(&c),
                    None => {
                        acc.insert(e, c);
                    }
                }
            }
        }
        Self::from_sorted_map(acc, mask)
    }

    /// Same as `mul` but only exponents `< hi` are computed.
    pub fn mul_truncated(&self, other: &Self, hi: &Rational) -> Self {
        let mask = self.product_mask(other).truncate(hi);
        let mut acc: BTreeMap<Rational, K> = BTreeMap::new();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e = e1 + e2;
                if &e >= hi {
                    // terms are sorted, later e2 only get larger
                    break;
                }
                if !mask.contains(&e) {
                    continue;
                }
                let c = c1.times(c2);
                match acc.get_mut(&e) {
                    Some(v) => *v = v.plus(&c),
                    None => {
                        acc.insert(e, c);
                    }
                }
            }
        }
        Self::from_sorted_map(acc, mask)
    }

    fn product_mask<K2: Field>(&self, other: &HahnSeries<K2>) -> Mask {
        if self.is_exact_zero() || other.is_exact_zero() {
            return Mask::full();
        }
        let uf = self.uncertain_part();
        let ug = other.uncertain_part();
        let tf = self.terms.iter().map(|t| &t.0);
        let tg = other.terms.iter().map(|t| &t.0);
        let bad = uf.plus_points(tg).union(&uf.plus_mask(&ug)).union(&ug.plus_points(tf));
        bad.complement()
    }

    /// Product with a series over ℚ, computed only below `hi`.
    pub fn mul_rational_truncated(&self, other: &HahnSeries<Rational>, hi: &Rational) -> Self {
        let mask = self.product_mask(other).truncate(hi);
        let mut acc: BTreeMap<Rational, K> = BTreeMap::new();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e = e1 + e2;
                if &e >= hi {
                    break;
                }
                if !mask.contains(&e) {
                    continue;
                }
                let c = c1.scaled(c2);
                match acc.get_mut(&e) {
                    Some(v) => *v = v.plus(&c),
                    None => {
                        acc.insert(e, c);
                    }
                }
            }
        }
        Self::from_sorted_map(acc, mask)
    }

    /// Multiplies every exponent and mask endpoint by `s > 0`.
    pub fn scale_exponents(&self, s: &Rational) -> Self {
        assert!(s.is_positive(), "exponent scaling factor must be positive");
        if s.is_one() {
            return self.clone();
        }
        HahnSeries {
            terms: self.terms.iter().map(|(e, c)| (e * s, c.clone())).collect(),
            mask: self.mask.scale(s),
        }
    }

    /// `φ_p^k`, for any integer `k`.
    pub fn mal(&self, p: u32, k: i64) -> Self {
        self.scale_exponents(&pow_int(&Rational::from_integer(p.into()), k))
    }

    /// Multiplication by `z^d`.
    pub fn shift(&self, d: &Rational) -> Self {
        if d.is_zero() {
            return self.clone();
        }
        HahnSeries {
            terms: self.terms.iter().map(|(e, c)| (e + d, c.clone())).collect(),
            mask: self.mask.shift(d),
        }
    }

    /// Multiplicative inverse, certified so that `self · inverse ≡ 1` on
    /// exponents below `ceiling`.
    pub fn invert(&self, ceiling: &Rational) -> Result<Self> {
        let (v, c) = match self.leading() {
            Ok((v, c)) => (v.clone(), c.clone()),
            Err(_) => return Err(MahlerError::ZeroDivisor),
        };
        let c_inv = c.inverse().ok_or(MahlerError::ZeroDivisor)?;
        // self = c z^v (1 + t)
        let t = self.shift(&-&v).scale(&c_inv).sub(&Self::one());
        let s = match t.support_lower_bound() {
            Bound::PosInf => Self::one(),
            Bound::Finite(lb) => {
                debug_assert!(lb.is_positive());
                // smallest K with (K+1)·lb >= ceiling
                let k = if ceiling.is_positive() {
                    (ceiling / &lb).ceil().to_integer() - 1u32
                } else {
                    0.into()
                };
                let k: u64 = k.try_into().unwrap_or(0);
                let neg_t = t.negated();
                let mut s = Self::one().truncate(ceiling);
                for _ in 0..k {
                    s = Self::one().add(&neg_t.mul_truncated(&s, ceiling));
                }
                let dropped = &lb * Rational::from_integer((k + 1).into());
                s.truncate(ceiling).truncate(&dropped)
            }
            Bound::NegInf => unreachable!("leading term is certified"),
        };
        Ok(s.scale(&c_inv).shift(&-v))
    }

    /// Coefficientwise equality on the common mask; returns the mask compared.
    pub fn eq_on_mask(&self, other: &Self) -> (bool, Mask) {
        let m = self.mask.intersect(&other.mask);
        let a = self.with_mask(&m);
        let b = other.with_mask(&m);
        (a.terms == b.terms, m)
    }

    /// Coefficientwise image under a map that sends zero to zero.
    pub fn try_map_coeffs<K2: Field>(&self, f: impl Fn(&K) -> Result<K2>) -> Result<HahnSeries<K2>> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for (e, c) in &self.terms {
            let d = f(c)?;
            if !d.is_zero() {
                terms.push((e.clone(), d));
            }
        }
        Ok(HahnSeries {
            terms,
            mask: self.mask.clone(),
        })
    }

    pub fn map_coeffs<K2: Field>(&self, f: impl Fn(&K) -> K2) -> HahnSeries<K2> {
        self.try_map_coeffs(|c| Ok(f(c))).expect("infallible map")
    }

    /// Splits into the parts with exponents `< 0`, `= 0` and `> 0`, each with
    /// the mask it inherits (no claim is made about exponents of the other parts).
    pub fn split_at_zero(&self) -> (Self, K, Self) {
        let zero = Rational::zero();
        let neg: Vec<_> = self.terms.iter().filter(|t| t.0.is_negative()).cloned().collect();
        let pos: Vec<_> = self.terms.iter().filter(|t| t.0.is_positive()).cloned().collect();
        let mask_neg = self.mask.union(&Mask::at_least(zero.clone()));
        let mask_pos = self.mask.union(&Mask::below(zero.clone()));
        (
            HahnSeries {
                terms: neg,
                mask: mask_neg,
            },
            self.coeff(&zero),
            HahnSeries {
                terms: pos,
                mask: mask_pos,
            },
        )
    }

    pub fn to_json(&self) -> serde_json::Value {
        let terms: Vec<serde_json::Value> = self
            .terms
            .iter()
            .map(|(e, c)| serde_json::json!({ "exp": e.to_string(), "coeff": c.to_json() }))
            .collect();
        serde_json::json!({ "terms": terms, "mask": self.mask.to_json() })
    }
}

fn fmt_exponent(e: &Rational) -> String {
    if e.is_integer() && !e.is_negative() {
        e.to_string()
    } else {
        format!("({e})")
    }
}

impl<K: Field> fmt::Display for HahnSeries<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (e, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            let cs = c.to_string();
            let needs_parens = cs.contains(['+', ' ', '/']) || cs.chars().skip(1).any(|ch| ch == '-');
            let cs = if needs_parens { format!("({cs})") } else { cs };
            if e.is_zero() {
                f.write_str(&cs)?;
            } else if c.is_one() {
                write!(f, "z^{}", fmt_exponent(e))?;
            } else {
                write!(f, "{cs}*z^{}", fmt_exponent(e))?;
            }
        }
        Ok(())
    }
}

impl<K: Field> fmt::Debug for HahnSeries<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self} on {}", self.mask)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{q, qi, Poly, RatFun};
    use proptest::prelude::*;

    type S = HahnSeries<Rational>;

    fn s(terms: &[(Rational, i64)]) -> S {
        S::exact(terms.iter().map(|(e, c)| (e.clone(), qi(*c))))
    }

    #[test]
    fn addition_with_masks() {
        let f = s(&[(q(1, 2), 1), (qi(1), 1)]);
        let g = s(&[(q(1, 2), -1)]);
        assert_eq!(f.add(&g), s(&[(qi(1), 1)]));
        assert_eq!(f.add(&S::zero()), f);
        let a = s(&[(qi(0), 1), (q(1, 3), 1)]).with_mask(&Mask::below(qi(2)));
        let b = s(&[(qi(1), 1)]).with_mask(&Mask::below(qi(1)));
        let sum = a.add(&b);
        assert_eq!(sum.terms(), s(&[(qi(0), 1), (q(1, 3), 1)]).terms());
        assert_eq!(sum.mask(), &Mask::below(qi(1)));
    }

    #[test]
    fn products() {
        let h = s(&[(q(1, 2), 1)]);
        assert_eq!(h.mul(&h), s(&[(qi(1), 1)]));
        let a = s(&[(qi(0), 1), (qi(1), 1)]);
        let b = s(&[(qi(0), 1), (qi(1), -1)]);
        assert_eq!(a.mul(&b), s(&[(qi(0), 1), (qi(2), -1)]));
        let f = s(&[(qi(0), 1), (qi(-2), 1)]).with_mask(&Mask::below(qi(3)));
        let g = s(&[(qi(2), 1)]);
        let fg = f.mul(&g);
        assert_eq!(fg.terms(), s(&[(qi(0), 1), (qi(2), 1)]).terms());
        assert_eq!(fg.mask(), &Mask::below(qi(5)));
    }

    #[test]
    fn product_mask_with_gap() {
        // f certified except on [-1/4, 0) and from 4 on
        let mask = Mask::below(q(-1, 4)).union(&Mask::interval(qi(0), qi(4)));
        let f = s(&[(qi(-1), 1), (q(-1, 2), 1), (qi(0), 1)]).with_mask(&mask);
        let g = s(&[(qi(0), 1), (qi(1), 1)]);
        let fg = f.mul(&g);
        let expect = Mask::below(q(-1, 4))
            .union(&Mask::interval(qi(0), q(3, 4)))
            .union(&Mask::interval(qi(1), qi(4)));
        assert_eq!(fg.mask(), &expect);
        assert_eq!(fg.certified_coeff(&q(1, 2)), Some(qi(1)));
        assert_eq!(fg.certified_coeff(&q(7, 8)), None);
    }

    #[test]
    fn mahler_substitution() {
        let f = s(&[(qi(1), 1), (qi(2), 1)]);
        assert_eq!(f.mal(2, 1), s(&[(qi(2), 1), (qi(4), 1)]));
        assert_eq!(s(&[(qi(-1), 1)]).mal(2, -1), s(&[(q(-1, 2), 1)]));
        let g = f.with_mask(&Mask::below(qi(3)));
        assert_eq!(g.mal(3, -1).mal(3, 1), g);
    }

    #[test]
    fn inversion_examples() {
        assert_eq!(s(&[(qi(2), 1)]).invert(&qi(8)).unwrap(), s(&[(qi(-2), 1)]));
        let g = s(&[(qi(0), 1), (qi(2), 1)]).invert(&qi(8)).unwrap();
        assert_eq!(
            g.terms(),
            s(&[(qi(0), 1), (qi(2), -1), (qi(4), 1), (qi(6), -1)]).terms()
        );
        assert_eq!(g.mask(), &Mask::below(qi(8)));
        let h = s(&[(qi(0), 1), (q(1, 2), 1)]).invert(&q(3, 2)).unwrap();
        assert_eq!(h.terms(), s(&[(qi(0), 1), (q(1, 2), -1), (qi(1), 1)]).terms());
        assert_eq!(h.mask(), &Mask::below(q(3, 2)));
        // valuation shift: (z^2 + z^3)^{-1} certified up to 8 - 2
        let k = s(&[(qi(2), 1), (qi(3), 1)]).invert(&qi(8)).unwrap();
        assert_eq!(k.mask(), &Mask::below(qi(6)));
        let prod = k.mul(&s(&[(qi(2), 1), (qi(3), 1)]));
        assert!(prod.eq_on_mask(&S::one()).0);
        assert_eq!(S::zero().invert(&qi(1)), Err(MahlerError::ZeroDivisor));
        let unknown = s(&[(qi(1), 1)]).with_mask(&Mask::interval(qi(1), qi(2)));
        assert_eq!(unknown.invert(&qi(1)), Err(MahlerError::ZeroDivisor));
    }

    #[test]
    fn valuation_and_leading_coefficient() {
        let f = s(&[(qi(-1), 1), (qi(0), 1)]);
        assert_eq!(f.val().unwrap(), qi(-1));
        assert_eq!(f.cld().unwrap(), qi(1));
        assert_eq!(S::zero().val(), Err(MahlerError::ZeroSeries));
        let truncated = S::zero().with_mask(&Mask::below(qi(3)));
        assert_eq!(truncated.val(), Err(MahlerError::UnknownLeadingTerm));
        let a0 = s(&[(qi(-2), 1)]).mul(&s(&[(qi(0), 1), (qi(2), 1)]).invert(&qi(8)).unwrap());
        assert_eq!(a0.val().unwrap(), qi(-2));
    }

    #[test]
    fn equality_on_masks() {
        let f = s(&[(qi(0), 1), (qi(1), 1)]).with_mask(&Mask::below(qi(1)));
        let g = s(&[(qi(0), 1)]).with_mask(&Mask::below(qi(1)));
        assert!(f.eq_on_mask(&f).0);
        assert!(f.eq_on_mask(&g).0);
        assert!(!s(&[(qi(0), 1)]).eq_on_mask(&s(&[(qi(0), 2)])).0);
    }

    #[test]
    fn coefficient_maps() {
        let lam_minus_1 = RatFun::from_poly(Poly::from_ints(&[-1, 1]));
        let f = HahnSeries::exact([(qi(1), lam_minus_1.clone())]);
        let ev = f.try_map_coeffs(|c| c.eval(&qi(1))).unwrap();
        assert!(ev.is_exact_zero());
        let lam2 = RatFun::from_poly(Poly::from_ints(&[0, 0, 1]));
        let d = HahnSeries::exact([(q(1, 2), lam2)]).map_coeffs(|c| c.derivative());
        assert_eq!(d.coeff(&q(1, 2)), RatFun::from_poly(Poly::from_ints(&[0, 2])));
        let pole = HahnSeries::exact([(qi(1), lam_minus_1.inverse().unwrap())]);
        assert!(matches!(
            pole.try_map_coeffs(|c| c.eval(&qi(1))),
            Err(MahlerError::PoleAtEvaluationPoint(_))
        ));
    }

    fn small_series(max_terms: usize) -> impl Strategy<Value = S> {
        (
            prop::collection::vec(((-4i64..=8), (1i64..=3), (-3i64..=3)), 0..=max_terms),
            prop::option::of((0i64..=12, 1i64..=2)),
        )
            .prop_map(|(ts, cut)| {
                let f = S::exact(ts.into_iter().map(|(n, d, c)| (q(n, d), qi(c))));
                match cut {
                    Some((n, d)) => f.truncate(&q(n, d)),
                    None => f,
                }
            })
    }

    fn nonzero_leading() -> impl Strategy<Value = S> {
        (
            small_series(5),
            -3i64..=3,
            1i64..=3,
            prop::sample::select(vec![-2i64, -1, 1, 3]),
        )
            .prop_map(|(tail, ve, vd, c)| {
                let v = q(ve, vd);
                let tail = S::exact(tail.terms().to_vec()).shift(&(&v + qi(5)));
                S::monomial(qi(c), v).add(&tail)
            })
    }

    fn brute_force(f: &S, g: &S) -> S {
        let mut terms = Vec::new();
        for (a, x) in f.terms() {
            for (b, y) in g.terms() {
                terms.push((a + b, x * y));
            }
        }
        S::exact(terms)
    }

    proptest! {
        #[test]
        fn mal_is_additive(f in small_series(6), g in small_series(6), k in -2i64..=2) {
            prop_assert_eq!(f.add(&g).mal(2, k), f.mal(2, k).add(&g.mal(2, k)));
        }

        #[test]
        fn mal_is_multiplicative(f in small_series(5), g in small_series(5), k in -2i64..=2) {
            prop_assert_eq!(f.mul(&g).mal(3, k), f.mal(3, k).mul(&g.mal(3, k)));
        }

        #[test]
        fn mal_inverse_pair(f in small_series(6), k in 1i64..=3) {
            prop_assert_eq!(f.mal(2, -k).mal(2, k), f);
        }

        #[test]
        fn mal_fixes_constant_term(f in small_series(6), k in 1i64..=3) {
            let d = f.mal(2, k).sub(&f);
            if d.mask().contains(&qi(0)) {
                prop_assert_eq!(d.coeff(&qi(0)), qi(0));
            }
        }

        #[test]
        fn mul_matches_brute_force(f in small_series(6), g in small_series(6)) {
            let f = S::exact(f.terms().to_vec());
            let g = S::exact(g.terms().to_vec());
            prop_assert_eq!(f.mul(&g), brute_force(&f, &g));
        }

        #[test]
        fn product_mask_is_sound(f in small_series(6), g in small_series(6), extra in small_series(4)) {
            // any completion of f beyond its mask must not change the product on the product mask
            let comp = extra.shift(&qi(13));
            let f_full = S::exact(f.terms().iter().cloned().chain(
                comp.terms().iter().filter(|t| !f.mask().contains(&t.0)).cloned()));
            let g_full = S::exact(g.terms().to_vec());
            let approx = f.mul(&g);
            let truth = f_full.mul(&g_full);
            prop_assert!(approx.eq_on_mask(&truth).0);
        }

        #[test]
        fn invert_is_certified(f in nonzero_leading(), ceil in 1i64..=6) {
            let ceil = qi(ceil);
            let g = f.invert(&ceil).unwrap();
            let prod = f.mul(&g);
            let (ok, m) = prod.eq_on_mask(&S::one());
            prop_assert!(ok);
            let v = f.val().unwrap();
            prop_assert!(g.mask().covers(&Bound::NegInf, &Bound::Finite(&ceil - &v)));
            prop_assert!(m.covers(&Bound::NegInf, &Bound::Finite(ceil)));
        }

        #[test]
        fn shift_round_trip(f in small_series(6), n in -5i64..=5, d in 1i64..=4) {
            let t = q(n, d);
            prop_assert_eq!(f.shift(&t).shift(&-t), f);
        }
    }
}
