//! The triangular solve producing `g_{c,j}(λ, z)`.

use crate::error::{MahlerError, Result};
use crate::factorize::Factorization;
use crate::fields::{Field, RatFun, Rational};
use crate::hahn::{ParametricSeries, QSeries};
use crate::newton::{FrobeniusPlan, PlanEntry};
use crate::operator::MahlerOperator;

use super::order1::solve_order1_param;

/// Structural checks on a computed `g_{c,j}`.
#[derive(Clone, Debug, PartialEq)]
pub struct GcjChecks {
    pub valuation: Option<Rational>,
    pub expected_valuation: Rational,
    pub leading: Option<RatFun>,
    pub expected_leading: RatFun,
    /// Largest pole order at `λ = c` among the certified coefficients.
    pub max_pole_at_c: usize,
}

impl GcjChecks {
    pub fn valuation_ok(&self) -> bool {
        self.valuation.as_ref() == Some(&self.expected_valuation)
    }

    pub fn leading_ok(&self) -> bool {
        self.leading.as_ref() == Some(&self.expected_leading)
    }

    pub fn regular_at_c(&self) -> bool {
        self.max_pole_at_c == 0
    }

    pub fn all_ok(&self) -> bool {
        self.valuation_ok() && self.leading_ok() && self.regular_at_c()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "valuation": self.valuation.as_ref().map(|v| v.to_string()),
            "expected_valuation": self.expected_valuation.to_string(),
            "leading": self.leading.as_ref().map(Field::to_json),
            "expected_leading": self.expected_leading.to_json(),
            "max_pole_at_c": self.max_pole_at_c,
            "ok": self.all_ok(),
        })
    }
}

const EXTRA: usize = 2;

fn lift(h: &QSeries) -> ParametricSeries {
    h.map_coeffs(|x| RatFun::constant(x.clone()))
}

/// Solves `L(g e_λ) = z^{val a_0 - ν_j/(p-1)} (λ-c)^{s+m} e_λ` through the
/// factorization `L = a L_k ⋯ L_1`. Every intermediate series is certified
/// below `ceiling + ν_j/(p-1)` in the gauged variable, which is `ceiling` for
/// the returned `g`.
pub fn solve_gcj(
    l: &MahlerOperator<Rational>,
    plan: &FrobeniusPlan,
    f: &Factorization,
    entry: &PlanEntry,
    ceiling: &Rational,
    depth: usize,
) -> Result<(ParametricSeries, GcjChecks)> {
    let p = f.p;
    if plan.p != p || l.radix() != p {
        return Err(MahlerError::RadixMismatch(plan.p, p));
    }
    if f.layers.len() != plan.nus.len() {
        return Err(MahlerError::PlanMismatch(format!(
            "{} factor layers for {} slopes",
            f.layers.len(),
            plan.nus.len()
        )));
    }
    for (layer, nu) in f.layers.iter().zip(&plan.nus) {
        if layer.iter().any(|fac| &fac.nu != nu) {
            return Err(MahlerError::PlanMismatch(format!("factor twist differs from ν = {nu}")));
        }
    }
    let j = entry.j;
    let c = &entry.c;
    if plan.entry(c, j) != Some(entry) {
        return Err(MahlerError::PlanMismatch(format!("({c}, {j}) is not in the plan")));
    }
    let pm1 = Rational::from_integer((p - 1).into());
    let nu_j = &plan.nus[j];
    let twist = nu_j / &pm1;
    let inner = ceiling + &twist;

    // z^{val a_0} / a(z), times (λ - c)^m
    let unit = f.a.shift(&-&plan.val_a0).invert(&inner)?;
    let mut rhs = lift(&unit).scale(&RatFun::lambda_minus_pow(c, entry.m));
    let mut remaining: usize = f.layers.iter().map(Vec::len).sum();
    for (i, layer) in f.layers.iter().enumerate().rev() {
        let mu = nu_j - &plan.nus[i];
        for fac in layer.iter().rev() {
            remaining -= 1;
            let y = solve_order1_param(p, &mu, &fac.c, &rhs, &inner, depth + EXTRA * remaining)?;
            rhs = y.mul_rational_truncated(&fac.h, &inner);
        }
    }
    let g = rhs.shift(&-&twist).scale(&RatFun::lambda_minus_pow(c, entry.s));

    let checks = gcj_checks(l, plan, f, entry, &g)?;
    Ok((g, checks))
}

fn gcj_checks(
    l: &MahlerOperator<Rational>,
    plan: &FrobeniusPlan,
    f: &Factorization,
    entry: &PlanEntry,
    g: &ParametricSeries,
) -> Result<GcjChecks> {
    let j = entry.j;
    let c = &entry.c;
    let r_before: usize = f.layers[..j].iter().map(Vec::len).sum();
    let mu_j = plan.mus[j].clone();

    let mut constant = Rational::from_integer(1.into()) / l.coeff(0).cld()?;
    for layer in &f.layers[..=j] {
        for fac in layer {
            constant *= -&fac.c;
        }
    }
    let mut expected = RatFun::lambda_pow(-(r_before as i64))
        .scaled(&constant)
        .times(&RatFun::lambda_minus_pow(c, entry.s + entry.m));
    for fac in &f.layers[j] {
        expected = expected.checked_div(&RatFun::lambda_minus_pow(&fac.c, 1))?;
    }

    let (valuation, leading) = match g.leading() {
        Ok((v, k)) => (Some(v.clone()), Some(k.clone())),
        Err(_) => (None, None),
    };
    let max_pole_at_c = g.terms().iter().map(|(_, k)| k.pole_order(c)).max().unwrap_or(0);
    Ok(GcjChecks {
        valuation,
        expected_valuation: -mu_j,
        leading,
        expected_leading: expected,
        max_pole_at_c,
    })
}
