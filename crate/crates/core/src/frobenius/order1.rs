//! Parametric first-order solver for `(z^{-μ} λ φ - c)(f) = g` over ℚ(λ).

use num_traits::Signed;

use crate::error::{MahlerError, Result};
use crate::fields::{pow_int, Field, RatFun, Rational};
use crate::hahn::{Bound, Mask, ParametricSeries};

/// Unique solution of `(z^{-μ} λ φ_p - c)(f) = g`, certified below `ceiling`.
///
/// With `f = z^{μ/(p-1)} u` the equation becomes `(κφ - 1)(u) = G` where
/// `κ = λ/c` and `G = c^{-1} z^{-μ/(p-1)} g`. Splitting `G = G_- + G_0 + G_+`
/// by the sign of the exponents gives
/// `u = Σ_{k≤-1} κ^k φ^k(G_-) + G_0/(κ-1) - Σ_{k≥0} κ^k φ^k(G_+)`.
/// The first sum is cut after `depth` terms; the tail lives in
/// `[lb(G_-)/p^{depth+1}, 0)` and that interval is removed from the mask.
pub fn solve_order1_param(
    p: u32,
    mu: &Rational,
    c: &Rational,
    g: &ParametricSeries,
    ceiling: &Rational,
    depth: usize,
) -> Result<ParametricSeries> {
    if c.is_zero() {
        return Err(MahlerError::DivisionByZero);
    }
    let pm1 = Rational::from_integer((p - 1).into());
    let center = mu / &pm1;
    let ceiling_u = ceiling - &center;
    let c_inv = c.recip();
    let big_g = g.shift(&-&center).scale(&RatFun::constant(c_inv.clone()));
    let (g_neg, g0, g_pos) = big_g.split_at_zero();
    let kappa_pow = |k: i64| RatFun::lambda_pow(k).scaled(&pow_int(&c_inv, k));

    let zero = Rational::from_integer(0.into());
    let pr = Rational::from_integer(p.into());

    // k ≤ -1
    let negative = match g_neg.support_lower_bound() {
        Bound::PosInf => ParametricSeries::zero(),
        Bound::NegInf => ParametricSeries::new(Vec::new(), Mask::at_least(zero.clone())),
        Bound::Finite(lb) => {
            let mut acc = ParametricSeries::zero();
            for k in 1..=depth as i64 {
                acc = acc.add(&g_neg.mal(p, -k).scale(&kappa_pow(-k)));
            }
            let gap_lo = lb / pow_int(&pr, depth as i64 + 1);
            acc.with_mask(&Mask::interval(gap_lo, zero.clone()).complement())
        }
    };

    // k = 0 part: G_0 / (κ - 1) = c G_0 / (λ - c)
    let constant = if big_g.mask().contains(&zero) {
        let k = RatFun::lambda_minus_pow(c, 1).inverse().expect("nonzero").scaled(c);
        ParametricSeries::constant(g0.times(&k))
    } else {
        ParametricSeries::new(Vec::new(), Mask::below(zero.clone()))
    };

    // k ≥ 0
    let positive = match g_pos.support_lower_bound() {
        Bound::PosInf => ParametricSeries::zero(),
        Bound::Finite(lb) if lb.is_positive() => {
            let mut acc = ParametricSeries::zero().truncate(&ceiling_u);
            let mut k = 0i64;
            while ceiling_u.is_positive() && pow_int(&pr, k) * &lb < ceiling_u {
                let term = g_pos.mal(p, k).truncate(&ceiling_u).scale(&kappa_pow(k));
                acc = acc.add(&term);
                k += 1;
            }
            acc.negated()
        }
        _ => ParametricSeries::new(Vec::new(), Mask::below(zero.clone())),
    };

    let u = negative.add(&constant).add(&positive);
    Ok(u.shift(&center).truncate(ceiling))
}

/// `(z^{-μ} λ φ_p - c)(f)`, used for back-substitution.
pub fn apply_order1_param(p: u32, mu: &Rational, c: &Rational, f: &ParametricSeries) -> ParametricSeries {
    f.mal(p, 1)
        .shift(&-mu)
        .scale(&RatFun::lambda())
        .sub(&f.scale(&RatFun::constant(c.clone())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{q, qi};

    fn lam(k: i64) -> RatFun {
        RatFun::lambda_pow(k)
    }

    fn constant(e: Rational) -> ParametricSeries {
        ParametricSeries::monomial(RatFun::one(), e)
    }

    #[test]
    fn constant_right_hand_side() {
        let f = solve_order1_param(2, &qi(0), &qi(1), &ParametricSeries::one(), &qi(8), 8).unwrap();
        let expect = RatFun::lambda_minus_pow(&qi(1), 1).inverse().unwrap();
        assert_eq!(f.terms(), &[(qi(0), expect)]);
        assert!(f.mask().covers(&Bound::NegInf, &Bound::Finite(qi(8))));
    }

    #[test]
    fn positive_geometric_sum() {
        let f = solve_order1_param(2, &qi(0), &qi(1), &constant(qi(1)), &qi(8), 8).unwrap();
        let expect: Vec<_> = (0..3).map(|k| (qi(1 << k), lam(k).negated())).collect();
        assert_eq!(f.terms(), expect.as_slice());
        assert!(f.mask().covers(&Bound::NegInf, &Bound::Finite(qi(8))));
    }

    #[test]
    fn negative_ladder() {
        let depth = 5;
        let f = solve_order1_param(2, &qi(0), &qi(1), &constant(qi(-1)), &qi(8), depth).unwrap();
        let expect: Vec<_> = (1..=depth as i64).map(|k| (-q(1, 1 << k), lam(-k))).collect();
        assert_eq!(f.terms(), expect.as_slice());
        let gap_lo = -q(1, 1 << (depth + 1));
        assert!(!f.mask().contains(&gap_lo));
        assert!(f.mask().contains(&(&gap_lo - q(1, 1000))));
        assert!(f.mask().covers(&Bound::Finite(qi(0)), &Bound::Finite(qi(8))));
    }

    #[test]
    fn back_substitution_with_twist() {
        let g = ParametricSeries::exact(vec![
            (qi(-3), RatFun::lambda()),
            (q(1, 2), RatFun::constant(qi(2))),
            (qi(1), RatFun::one()),
            (qi(4), RatFun::lambda_minus_pow(&qi(2), 2)),
        ]);
        for (p, mu, c) in [(2u32, qi(1), qi(2)), (3, q(-1, 2), q(-1, 3)), (2, qi(0), qi(1))] {
            let f = solve_order1_param(p, &mu, &c, &g, &qi(6), 6).unwrap();
            let back = apply_order1_param(p, &mu, &c, &f);
            let (ok, m) = back.eq_on_mask(&g);
            assert!(ok, "p={p} mu={mu} c={c}: {back} vs {g} on {m}");
            assert!(m.covers(&Bound::NegInf, &Bound::Finite(qi(-2))));
        }
    }

    #[test]
    fn zero_maps_to_zero() {
        let f = solve_order1_param(3, &qi(2), &qi(5), &ParametricSeries::zero(), &qi(4), 4).unwrap();
        assert!(f.is_empty());
        assert!(f.mask().covers(&Bound::NegInf, &Bound::Finite(qi(4))));
    }
}
