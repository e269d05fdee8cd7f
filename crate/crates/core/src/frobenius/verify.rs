//! Residual, valuation-pattern and independence checks on a computed basis.

use std::collections::BTreeMap;

use crate::fields::{Field, Poly, RatFun, Rational};
use crate::hahn::{Bound, Interval, Mask, ParametricSeries};
use crate::operator::MahlerOperator;

use super::solution::{apply_to_solution, SolutionObject};
use super::GcjBlock;

/// Label of the solution `y_{c,j,m}` (`j` is 0-based).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct SolutionLabel {
    pub c: Rational,
    pub j: usize,
    pub m: usize,
}

#[derive(Clone, Debug)]
pub struct SolutionCheck {
    pub label: SolutionLabel,
    /// `L(y)` vanishes on `residual_mask`.
    pub residual_zero: bool,
    pub residual_mask: Mask,
    /// Region on which the solution itself is certified.
    pub solution_mask: Mask,
    /// Uncertified intervals of the solution below the ceiling.
    pub gaps: Vec<Interval>,
    pub gaps_ok: bool,
}

impl SolutionCheck {
    pub fn ok(&self) -> bool {
        self.residual_zero && self.gaps_ok
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "c": self.label.c.to_string(),
            "j": self.label.j + 1,
            "m": self.label.m,
            "residual_zero": self.residual_zero,
            "residual_mask": self.residual_mask.to_json(),
            "solution_mask": self.solution_mask.to_json(),
            "gaps": Mask::from_intervals(self.gaps.clone()).to_json(),
            "gaps_ok": self.gaps_ok,
            "ok": self.ok(),
        })
    }
}

#[derive(Clone, Debug)]
pub struct ExponentIndependence {
    pub c: Rational,
    pub count: usize,
    pub rank: usize,
    pub failures: Vec<String>,
}

impl ExponentIndependence {
    pub fn ok(&self) -> bool {
        self.failures.is_empty() && self.rank == self.count
    }
}

#[derive(Clone, Debug)]
pub struct IndependenceReport {
    pub exponents: Vec<ExponentIndependence>,
}

impl IndependenceReport {
    pub fn passed(&self) -> bool {
        self.exponents.iter().all(ExponentIndependence::ok)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let per: Vec<_> = self
            .exponents
            .iter()
            .map(|e| {
                serde_json::json!({
                    "c": e.c.to_string(),
                    "count": e.count,
                    "rank": e.rank,
                    "failures": e.failures,
                    "ok": e.ok(),
                })
            })
            .collect();
        serde_json::json!({ "exponents": per, "passed": self.passed() })
    }
}

/// Checks, for each exponent `c`, the triangular valuation pattern of the
/// parts `h_u` of every `y_{c,j,m}` (`val h_u ≥ -μ_j` for `u < m`, `= -μ_j` for
/// `u = m`, `> -μ_j` for `u > m`), and that the coefficients at the pivot
/// positions `(u = m, z^{-μ_j})` form a matrix of full rank.
pub fn verify_independence(solutions: &[(SolutionLabel, Rational, SolutionObject)]) -> IndependenceReport {
    let mut by_c: BTreeMap<Rational, Vec<(&SolutionLabel, &Rational, &SolutionObject)>> = BTreeMap::new();
    for (label, mu, y) in solutions {
        by_c.entry(label.c.clone()).or_default().push((label, mu, y));
    }
    let mut exponents = Vec::new();
    for (c, sols) in by_c {
        let mut failures = Vec::new();
        let mut seen = std::collections::BTreeSet::new();
        for (label, mu, y) in &sols {
            if !seen.insert((label.j, label.m)) {
                failures.push(format!("duplicate label (j={}, m={})", label.j + 1, label.m));
            }
            failures.extend(pattern_failures(&c, label, mu, y));
        }
        let pivots: Vec<(usize, Rational)> = sols.iter().map(|(l, mu, _)| (l.m, -(*mu).clone())).collect();
        let mut matrix: Vec<Vec<Rational>> = Vec::with_capacity(pivots.len());
        for (u, e) in &pivots {
            let mut row = Vec::with_capacity(sols.len());
            for (label, _, y) in &sols {
                let v = match y.part(&c, *u) {
                    None => Some(Rational::zero()),
                    Some(f) => f.certified_coeff(e),
                };
                match v {
                    Some(v) => row.push(v),
                    None => {
                        failures.push(format!(
                            "coefficient of z^{e} in part u={u} of y(j={}, m={}) is not certified",
                            label.j + 1,
                            label.m
                        ));
                        row.push(Rational::zero());
                    }
                }
            }
            matrix.push(row);
        }
        let rank = rank(matrix);
        exponents.push(ExponentIndependence {
            c,
            count: sols.len(),
            rank,
            failures,
        });
    }
    IndependenceReport { exponents }
}

fn pattern_failures(c: &Rational, label: &SolutionLabel, mu: &Rational, y: &SolutionObject) -> Vec<String> {
    let target = -mu.clone();
    let at = Bound::Finite(target.clone());
    let mut out = Vec::new();
    let tag = format!("y(j={}, m={})", label.j + 1, label.m);
    for ((cc, u), f) in y.parts() {
        if cc != c {
            out.push(format!("{tag} has a part at exponent {cc}"));
            continue;
        }
        let prefix = f.mask().prefix_end().cloned().unwrap_or(Bound::NegInf);
        let first = f.terms().first().map(|t| &t.0);
        let ok = match u.cmp(&label.m) {
            std::cmp::Ordering::Less => prefix >= at && first.is_none_or(|e| *e >= target),
            std::cmp::Ordering::Equal => f.val().ok().as_ref() == Some(&target),
            std::cmp::Ordering::Greater => prefix > at && first.is_none_or(|e| *e > target),
        };
        if !ok {
            out.push(format!(
                "{tag}: part u={u} violates the valuation pattern at -μ = {target}"
            ));
        }
    }
    if y.part(c, label.m).is_none() {
        out.push(format!("{tag}: pivot part u={} is zero", label.m));
    }
    out
}

fn rank(mut a: Vec<Vec<Rational>>) -> usize {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut r = 0;
    for col in 0..cols {
        let Some(piv) = (r..rows).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        a.swap(r, piv);
        let inv = a[r][col].recip();
        for i in 0..rows {
            if i != r && !a[i][col].is_zero() {
                let factor = &a[i][col] * &inv;
                for k in col..cols {
                    let sub = &factor * &a[r][k];
                    a[i][k] -= sub;
                }
            }
        }
        r += 1;
        if r == rows {
            break;
        }
    }
    r
}

/// Residual and gap check of one solution.
pub fn check_solution(
    l: &MahlerOperator<Rational>,
    label: SolutionLabel,
    y: &SolutionObject,
    ceiling: &Rational,
    epsilon: &Rational,
) -> SolutionCheck {
    let residual = apply_to_solution(l, y, ceiling);
    let solution_mask = y.mask();
    let gaps = solution_mask.gaps_below(ceiling);
    let gaps_ok =
        solution_mask.prefix_end().is_some() && gaps.iter().all(|g| g.width().is_some_and(|w| &w <= epsilon));
    SolutionCheck {
        label,
        residual_zero: residual.vanishes_on_mask(),
        residual_mask: residual.mask(),
        solution_mask,
        gaps,
        gaps_ok,
    }
}

/// `L(g e_λ) = z^{val a_0 - ν_j/(p-1)} (λ-c)^{s+m} e_λ` on the certified mask.
#[derive(Clone, Debug)]
pub struct GcjResidual {
    pub c: Rational,
    pub j: usize,
    pub ok: bool,
    pub mask: Mask,
}

impl GcjResidual {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({ "c": self.c.to_string(), "j": self.j + 1, "ok": self.ok, "mask": self.mask.to_json() })
    }
}

/// Only exponents below `hi` are compared.
pub fn check_gcj_residual(
    l: &MahlerOperator<Rational>,
    p: u32,
    val_a0: &Rational,
    block: &GcjBlock,
    hi: &Rational,
) -> GcjResidual {
    let pm1 = Rational::from_integer((p - 1).into());
    let e = &block.entry;
    // Clearing denominators first keeps every coefficient a polynomial, which
    // avoids a gcd on each addition below.
    let mut dens: Vec<&Poly> = Vec::new();
    for (_, k) in block.g.terms() {
        if !k.den().is_constant() && !dens.contains(&k.den()) {
            dens.push(k.den());
        }
    }
    let common = dens.into_iter().fold(Poly::one(), |acc, d| {
        let g = Poly::gcd(&acc, d);
        &acc * &d.exact_div(&g)
    });
    let g = block
        .g
        .map_coeffs(|k| RatFun::from_poly(k.num() * &common.exact_div(k.den())));
    // Σ a_i λ^i φ^i(D g)
    let mut lhs = ParametricSeries::zero().truncate(hi);
    let mut phi_g = g;
    for (i, a) in l.coeffs().iter().enumerate() {
        if i > 0 {
            phi_g = phi_g.mal(p, 1);
        }
        if a.is_exact_zero() {
            continue;
        }
        let term = phi_g.mul_rational_truncated(a, hi).scale(&RatFun::lambda_pow(i as i64));
        lhs = lhs.add(&term);
    }
    let rhs = ParametricSeries::monomial(
        RatFun::lambda_minus_pow(&e.c, e.s + e.m).times(&RatFun::from_poly(common)),
        val_a0 - &e.nu / &pm1,
    );
    let diff = lhs.sub(&rhs.truncate(hi));
    GcjResidual {
        c: e.c.clone(),
        j: e.j,
        ok: diff.is_empty(),
        mask: diff.mask().clone(),
    }
}
