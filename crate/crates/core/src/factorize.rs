//! Right factorization `L = a(z)·L_k⋯L_1` into first-order factors
//! `(z^ν φ - c) h^{-1}` with `h` tangent to the identity.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Signed;

use crate::error::{MahlerError, Result};
use crate::fields::{pow_int, Field, Rational};
use crate::hahn::{Bound, Mask, QSeries};
use crate::newton::{analyze, NewtonData};
use crate::operator::MahlerOperator;

type Op = MahlerOperator<Rational>;

#[derive(Clone, Debug, PartialEq)]
pub struct FirstOrderFactor {
    pub nu: Rational,
    pub c: Rational,
    pub h: QSeries,
}

impl FirstOrderFactor {
    /// `(z^ν φ - c) h^{-1}` with `h^{-1}` certified below `ceiling`.
    pub fn operator(&self, p: u32, ceiling: &Rational) -> Result<Op> {
        let hinv = self.h.invert(ceiling)?;
        Ok(Op::first_order(p, &self.nu, &self.c, Some(&hinv)))
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({ "nu": self.nu.to_string(), "c": self.c.to_string(), "h": self.h.to_json() })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Factorization {
    pub p: u32,
    pub a: QSeries,
    /// One layer per slope, smallest slope first; inside a layer the factor
    /// extracted first comes first (it is the rightmost one).
    pub layers: Vec<Vec<FirstOrderFactor>>,
}

impl Factorization {
    pub fn factors(&self) -> impl Iterator<Item = &FirstOrderFactor> {
        self.layers.iter().flatten()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let layers: Vec<Vec<_>> = self
            .layers
            .iter()
            .map(|l| l.iter().map(FirstOrderFactor::to_json).collect())
            .collect();
        serde_json::json!({ "a": self.a.to_json(), "layers": layers })
    }
}

/// Unit solution `h` (`val h = 0`, `cld h = 1`) of `M^{[e_c]}(h) = 0` for an
/// operator whose smallest slope is 0 and `c` a root of its characteristic
/// polynomial there, computed by forward recursion over the exponents `< ceiling`.
pub fn slope_zero_unit_solution(m: &Op, c: &Rational, ceiling: &Rational) -> Result<QSeries> {
    let poly = crate::newton::newton_polygon(m)?;
    match poly.slopes.first() {
        Some(s) if s.mu.is_zero() => {}
        _ => return Err(MahlerError::PlanMismatch("smallest slope is not 0".into())),
    }
    let chi = crate::newton::raw_char_poly(m, &Rational::from_integer(0.into()))?;
    if !chi.eval(c).is_zero() {
        return Err(MahlerError::PlanMismatch(format!("{c} is not an exponent of slope 0")));
    }
    let p = m.radix();
    let v0 = m.coeff(0).val()?;
    // b_i = z^{-v0} c^i a_i, all of nonnegative valuation
    let b: Vec<QSeries> = m.gauge_exp(c).coeffs().iter().map(|a| a.shift(&-&v0)).collect();
    let b00 = b[0].coeff(&Rational::from_integer(0.into()));
    let b00_inv = Field::inverse(&b00).ok_or_else(|| MahlerError::PlanMismatch("b_00 vanishes".into()))?;

    let mut limit = Bound::Finite(ceiling.clone());
    for bi in &b {
        if bi.is_exact_zero() {
            continue;
        }
        match bi.mask().prefix_end() {
            Some(hi) => limit = limit.min(hi.clone()),
            None => return Err(MahlerError::UnknownLeadingTerm),
        }
    }
    let limit = limit.finite().cloned().unwrap_or_else(|| ceiling.clone());

    // generators (i, δ, coefficient) other than (0, 0)
    let mut gens: Vec<(Rational, Rational, Rational)> = Vec::new();
    for (i, bi) in b.iter().enumerate() {
        let pi = pow_int(&Rational::from_integer(p.into()), i as i64);
        for (d, coef) in bi.terms() {
            if d.is_negative() {
                return Err(MahlerError::PlanMismatch("coefficient of negative valuation".into()));
            }
            if i == 0 && d.is_zero() {
                continue;
            }
            gens.push((pi.clone(), d.clone(), coef.clone()));
        }
    }

    // candidate support: closure of {0} under γ ↦ δ + p^i γ'
    let zero = Rational::from_integer(0.into());
    let mut support: BTreeSet<Rational> = BTreeSet::new();
    let mut work = vec![zero.clone()];
    support.insert(zero.clone());
    while let Some(g) = work.pop() {
        for (pi, d, _) in &gens {
            let next = d + pi * &g;
            if next < limit && !support.contains(&next) {
                support.insert(next.clone());
                work.push(next);
            }
        }
    }

    let mut h: BTreeMap<Rational, Rational> = BTreeMap::new();
    h.insert(zero.clone(), Rational::from_integer(1.into()));
    for g in support.iter().skip(1) {
        let mut acc = Rational::from_integer(0.into());
        for (pi, d, coef) in &gens {
            let prev = (g - d) / pi;
            if let Some(hv) = h.get(&prev) {
                acc += coef * hv;
            }
        }
        let val = -(acc * &b00_inv);
        if !val.is_zero() {
            h.insert(g.clone(), val);
        }
    }
    Ok(QSeries::new(h, Mask::below(limit)))
}

/// Ceiling handed to the right division. Quotient coefficients are
/// certified below an absolute exponent, so it has to clear the valuation
/// spread of the coefficients; beyond the input masks nothing is gained.
fn division_ceiling(m: &Op, ceiling: &Rational) -> Rational {
    let vals: Vec<Rational> = m.coeffs().iter().filter_map(|a| a.val().ok()).collect();
    let spread = match (vals.iter().min(), vals.iter().max()) {
        (Some(lo), Some(hi)) => hi - lo,
        _ => Rational::from_integer(0.into()),
    };
    let mut out = ceiling + spread;
    for a in m.coeffs() {
        if let Some(Bound::Finite(e)) = a.mask().prefix_end() {
            if *e > out {
                out = e.clone();
            }
        }
    }
    out
}

/// `(φ - c) h^{-1}`.
fn slope_zero_factor(p: u32, c: &Rational, h: &QSeries, ceiling: &Rational) -> Result<Op> {
    let hinv = h.invert(ceiling)?;
    Ok(Op::first_order(p, &Rational::from_integer(0.into()), c, Some(&hinv)))
}

/// Progress report for each division step, kept for verification.
#[derive(Clone, Debug)]
pub struct DivisionStep {
    pub remainder: QSeries,
    pub order_before: usize,
    pub order_after: usize,
}

/// Factorization together with the division remainders it produced.
#[derive(Clone, Debug)]
pub struct FactorizationTrace {
    pub factorization: Factorization,
    pub steps: Vec<DivisionStep>,
    /// Newton data of the operator before each layer was peeled off.
    pub stages: Vec<NewtonData>,
    /// Set when the smallest slope of the remaining quotient has no rational
    /// exponent left; the factorization then describes only the right factor
    /// `L_k⋯L_1` extracted so far (with `a = 1`) and `quotient` is the rest.
    pub stuck_at_slope: Option<Rational>,
    pub quotient: Op,
}

impl FactorizationTrace {
    pub fn is_complete(&self) -> bool {
        self.stuck_at_slope.is_none()
    }
}

pub fn factorize(l: &Op, ceiling: &Rational) -> Result<Factorization> {
    let t = factorize_traced(l, ceiling)?;
    match t.stuck_at_slope {
        Some(slope) => Err(MahlerError::NonRationalExponent {
            slope: slope.to_string(),
        }),
        None => Ok(t.factorization),
    }
}

pub fn factorize_traced(l: &Op, ceiling: &Rational) -> Result<FactorizationTrace> {
    let p = l.radix();
    let pm1 = Rational::from_integer((p - 1).into());
    let mut n = l.clone();
    let mut layers = Vec::new();
    let mut steps = Vec::new();
    let mut stages = Vec::new();
    let mut stuck_at_slope = None;
    while n.order() > 0 && stuck_at_slope.is_none() {
        let data = analyze(&n)?;
        let mu = data.slopes[0].slope.mu.clone();
        let shift = &mu * &pm1;
        let mut m = n.gauge_theta(&-&shift);
        let mut layer = Vec::new();
        loop {
            let md = analyze(&m)?;
            let Some(first) = md.slopes.first() else { break };
            if !first.slope.mu.is_zero() {
                break;
            }
            let Some((c, _)) = first.exponents.first() else {
                stuck_at_slope = Some(mu.clone());
                break;
            };
            let c = c.clone();
            let h = slope_zero_unit_solution(&m, &c, ceiling)?;
            let d = slope_zero_factor(p, &c, &h, ceiling)?;
            let before = m.order();
            let (q, r) = m.right_divide(&d, &division_ceiling(&m, ceiling))?;
            let rem = r.into_iter().next().unwrap_or_else(QSeries::zero);
            if !rem.is_empty() {
                return Err(MahlerError::FactorizationFailed(format!(
                    "nonzero remainder {rem} after dividing by the factor for c = {c}"
                )));
            }
            steps.push(DivisionStep {
                remainder: rem,
                order_before: before,
                order_after: q.order(),
            });
            m = q;
            layer.push(FirstOrderFactor {
                nu: shift.clone(),
                c,
                h,
            });
        }
        stages.push(data);
        if !layer.is_empty() {
            layers.push(layer);
        } else if stuck_at_slope.is_none() {
            return Err(MahlerError::FactorizationFailed(
                "no factor extracted at smallest slope".into(),
            ));
        }
        n = m.gauge_theta(&shift);
    }
    let a = if stuck_at_slope.is_some() {
        QSeries::one()
    } else {
        n.coeff(0).clone()
    };
    Ok(FactorizationTrace {
        factorization: Factorization { p, a, layers },
        steps,
        stages,
        stuck_at_slope,
        quotient: n,
    })
}

/// `a(z)·L_k⋯L_1` expanded.
pub fn factor_reconstruct(f: &Factorization, ceiling: &Rational) -> Result<Op> {
    let mut acc = Op::multiplication(f.p, f.a.clone());
    for layer in f.layers.iter().rev() {
        for factor in layer.iter().rev() {
            acc = acc.mul(&factor.operator(f.p, ceiling)?)?;
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{q, qi};

    fn s(terms: &[(Rational, i64)]) -> QSeries {
        QSeries::exact(terms.iter().map(|(e, c)| (e.clone(), qi(*c))))
    }

    fn phi_minus(p: u32, c: QSeries) -> Op {
        Op::new(p, vec![c.negated(), QSeries::one()]).unwrap()
    }

    fn worked_example(p: u32, nu: i64, ceiling: &Rational) -> Op {
        let h = s(&[(qi(0), 1), (q(-nu, p as i64 - 1), 1)]);
        let left = phi_minus(p, s(&[(qi(nu), 1)]));
        left.mul(&Op::multiplication(p, h.invert(ceiling).unwrap()))
            .unwrap()
            .mul(&phi_minus(p, QSeries::one()))
            .unwrap()
    }

    #[test]
    fn unit_solution_examples() {
        let h = slope_zero_unit_solution(&phi_minus(2, QSeries::one()), &qi(1), &qi(8)).unwrap();
        assert_eq!(h.terms(), QSeries::one().terms());
        let m = phi_minus(2, s(&[(qi(0), 1), (qi(1), 1)]));
        let h = slope_zero_unit_solution(&m, &qi(1), &qi(8)).unwrap();
        assert_eq!(h.terms(), s(&[(qi(0), 1), (qi(1), -1)]).terms());
        assert_eq!(h.mask(), &Mask::below(qi(8)));
        assert!(matches!(
            slope_zero_unit_solution(&m, &qi(2), &qi(8)),
            Err(MahlerError::PlanMismatch(_))
        ));
    }

    /// Independent oracle: solve `h(z^2) = (1 + z + z^3) h(z)` term by term.
    #[test]
    fn unit_solution_matches_direct_recursion() {
        let f = s(&[(qi(0), 1), (qi(1), 1), (qi(3), 1)]);
        let m = phi_minus(2, f);
        let h = slope_zero_unit_solution(&m, &qi(1), &qi(20)).unwrap();
        // h_n = h_{n/2} - h_{n-1} - h_{n-3} over integers
        let mut coef = vec![qi(0); 20];
        coef[0] = qi(1);
        for n in 1..20 {
            let half = if n % 2 == 0 { coef[n / 2].clone() } else { qi(0) };
            let m1 = coef[n - 1].clone();
            let m3 = if n >= 3 { coef[n - 3].clone() } else { qi(0) };
            coef[n] = half - m1 - m3;
        }
        for (n, c) in coef.iter().enumerate() {
            assert_eq!(h.certified_coeff(&qi(n as i64)), Some(c.clone()), "exponent {n}");
        }
        let res = m.apply(&h);
        assert!(res.is_empty());
        assert!(res.mask().contains(&qi(19)));
    }

    #[test]
    fn first_order_factorization() {
        let l = phi_minus(2, QSeries::one());
        let f = factorize(&l, &qi(8)).unwrap();
        assert_eq!(f.a.terms(), QSeries::constant(qi(1)).terms());
        assert_eq!(f.layers.len(), 1);
        assert_eq!(f.layers[0][0].c, qi(1));
        assert_eq!(f.layers[0][0].nu, qi(0));
        assert_eq!(f.layers[0][0].h.terms(), QSeries::one().terms());
        // -φ + 1 = (-1)(φ - 1)
        let l = Op::new(2, vec![QSeries::one(), QSeries::constant(qi(-1))]).unwrap();
        let f = factorize(&l, &qi(8)).unwrap();
        assert_eq!(f.a.terms(), QSeries::constant(qi(-1)).terms());
    }

    #[test]
    fn worked_example_factorization() {
        for (p, nu) in [(2u32, -2i64), (3, -3)] {
            let ceiling = qi(16);
            let l = worked_example(p, nu, &ceiling);
            let f = factorize(&l, &ceiling).unwrap();
            let nus: Vec<_> = f.layers.iter().map(|l| l[0].nu.clone()).collect();
            assert_eq!(nus, vec![qi(0), qi(-nu)]);
            let cs: Vec<_> = f.factors().map(|x| x.c.clone()).collect();
            assert_eq!(cs, vec![qi(1), qi(1)]);
            let a0 = l.coeff(0);
            assert_eq!(f.a.val().unwrap(), a0.val().unwrap());
            let prod: Rational = f.factors().map(|x| -x.c.clone()).product();
            assert_eq!(f.a.cld().unwrap() * prod, a0.cld().unwrap());
            for x in f.factors() {
                assert_eq!(x.h.val().unwrap(), qi(0));
                assert_eq!(x.h.cld().unwrap(), qi(1));
            }
            let back = factor_reconstruct(&f, &ceiling).unwrap();
            assert!(back.eq_on_mask(&l));
            assert!(back.coeff(0).mask().contains(&qi(2)));
        }
    }
}
