//! Newton polygon, slopes, characteristic polynomials, exponents and the
//! bookkeeping quantities `s_{c,j}`, `ν_j` of the Frobenius construction.

use std::collections::BTreeMap;

use num_traits::Signed;

use crate::error::{MahlerError, Result};
use crate::fields::{pow_int, Field, Poly, Rational};
use crate::hahn::Bound;
use crate::operator::MahlerOperator;

/// Vertex `(p^alpha, val a_alpha)` of the lower boundary.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vertex {
    pub alpha: usize,
    pub x: Rational,
    pub y: Rational,
}

/// Edge of the lower boundary between the vertices at `start` and `end`
/// (indices into the coefficient list), with slope `mu` and multiplicity
/// `r = end - start`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Slope {
    pub mu: Rational,
    pub r: usize,
    pub start: usize,
    pub end: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NewtonPolygon {
    pub vertices: Vec<Vertex>,
    pub slopes: Vec<Slope>,
}

impl NewtonPolygon {
    pub fn slope_values(&self) -> Vec<(Rational, usize)> {
        self.slopes.iter().map(|s| (s.mu.clone(), s.r)).collect()
    }
}

/// Per-slope data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlopeData {
    pub slope: Slope,
    /// `χ` with the `X^v` factor stripped, coefficients as computed.
    pub charpoly: Poly,
    /// Rational exponents with multiplicities, ascending.
    pub exponents: Vec<(Rational, usize)>,
    /// Part of `χ` without rational roots (constant when `χ` splits over ℚ).
    pub residual: Poly,
}

impl SlopeData {
    pub fn splits(&self) -> bool {
        self.residual.is_constant()
    }

    pub fn multiplicity_of(&self, c: &Rational) -> usize {
        self.exponents.iter().find(|(e, _)| e == c).map_or(0, |(_, m)| *m)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NewtonData {
    pub p: u32,
    pub order: usize,
    pub vertices: Vec<Vertex>,
    pub slopes: Vec<SlopeData>,
}

impl NewtonData {
    pub fn all_rational(&self) -> bool {
        self.slopes.iter().all(SlopeData::splits)
    }

    pub fn slope_values(&self) -> Vec<(Rational, usize)> {
        self.slopes.iter().map(|s| (s.slope.mu.clone(), s.slope.r)).collect()
    }

    /// Number of solutions the construction provides (`n` when every exponent is rational).
    pub fn rational_exponent_count(&self) -> usize {
        self.slopes
            .iter()
            .flat_map(|s| s.exponents.iter().map(|(_, m)| *m))
            .sum()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let vertices: Vec<_> = self
            .vertices
            .iter()
            .map(|v| serde_json::json!({ "x": v.x.to_string(), "y": v.y.to_string() }))
            .collect();
        let slopes: Vec<_> = self
            .slopes
            .iter()
            .map(|s| serde_json::json!({ "mu": s.slope.mu.to_string(), "r": s.slope.r }))
            .collect();
        let charpolys: Vec<_> = self.slopes.iter().map(|s| s.charpoly.to_json()).collect();
        let exponents: Vec<_> = self
            .slopes
            .iter()
            .map(|s| {
                s.exponents
                    .iter()
                    .map(|(c, m)| serde_json::json!({ "c": c.to_string(), "m": m }))
                    .collect::<Vec<_>>()
            })
            .collect();
        let residuals: Vec<_> = self.slopes.iter().map(|s| s.residual.to_json()).collect();
        serde_json::json!({
            "vertices": vertices,
            "slopes": slopes,
            "charpolys": charpolys,
            "exponents": exponents,
            "nonrational_residuals": residuals,
        })
    }
}

/// Plan entry for an exponent `c` attached to the slope with index `j` (0-based).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlanEntry {
    pub j: usize,
    pub c: Rational,
    pub s: usize,
    pub m: usize,
    pub nu: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrobeniusPlan {
    pub p: u32,
    pub val_a0: Rational,
    /// Slopes `μ_j`, increasing.
    pub mus: Vec<Rational>,
    /// `ν_j` for every slope.
    pub nus: Vec<Rational>,
    pub entries: Vec<PlanEntry>,
}

impl FrobeniusPlan {
    pub fn entry(&self, c: &Rational, j: usize) -> Option<&PlanEntry> {
        self.entries.iter().find(|e| e.j == j && &e.c == c)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let entries: Vec<_> = self
            .entries
            .iter()
            .map(|e| {
                serde_json::json!({
                    "j": e.j + 1,
                    "c": e.c.to_string(),
                    "s": e.s,
                    "m": e.m,
                    "nu": e.nu.to_string(),
                })
            })
            .collect();
        serde_json::json!({
            "val_a0": self.val_a0.to_string(),
            "mu": self.mus.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
            "nu": self.nus.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
            "entries": entries,
        })
    }
}

fn radix_power(p: u32, i: usize) -> Rational {
    pow_int(&Rational::from_integer(p.into()), i as i64)
}

enum Val {
    Known(Rational),
    Zero,
    /// Nothing certified below the bound.
    AtLeast(Rational),
}

fn valuations<K: Field>(l: &MahlerOperator<K>) -> Result<Vec<Val>> {
    l.coeffs()
        .iter()
        .map(|a| match a.val() {
            Ok(v) => Ok(Val::Known(v)),
            Err(MahlerError::ZeroSeries) => Ok(Val::Zero),
            Err(MahlerError::UnknownLeadingTerm) => match a.support_lower_bound() {
                Bound::Finite(b) => Ok(Val::AtLeast(b)),
                _ => Err(MahlerError::UnknownLeadingTerm),
            },
            Err(e) => Err(e),
        })
        .collect()
}

/// Lower convex hull of the points `(p^i, val a_i)`.
pub fn newton_polygon<K: Field>(l: &MahlerOperator<K>) -> Result<NewtonPolygon> {
    let p = l.radix();
    let vals = valuations(l)?;
    let pts: Vec<Vertex> = vals
        .iter()
        .enumerate()
        .filter_map(|(i, v)| match v {
            Val::Known(y) => Some(Vertex {
                alpha: i,
                x: radix_power(p, i),
                y: y.clone(),
            }),
            _ => None,
        })
        .collect();
    let mut hull: Vec<Vertex> = Vec::new();
    for pt in pts {
        while hull.len() >= 2 {
            let a = &hull[hull.len() - 2];
            let b = &hull[hull.len() - 1];
            // drop b unless it lies strictly below the segment a–pt
            let cross = (&b.x - &a.x) * (&pt.y - &a.y) - (&b.y - &a.y) * (&pt.x - &a.x);
            if cross.is_positive() {
                break;
            }
            hull.pop();
        }
        hull.push(pt);
    }
    // A coefficient only known to vanish below some bound is harmless when
    // that bound already lies strictly above the hull.
    for (i, v) in vals.iter().enumerate() {
        let Val::AtLeast(b) = v else { continue };
        let x = radix_power(p, i);
        let above = hull.windows(2).any(|w| {
            w[0].x <= x && x <= w[1].x && {
                let line = &w[0].y + (&w[1].y - &w[0].y) * (&x - &w[0].x) / (&w[1].x - &w[0].x);
                *b > line
            }
        });
        if !above {
            return Err(MahlerError::UnknownLeadingTerm);
        }
    }
    let slopes = hull
        .windows(2)
        .map(|w| Slope {
            mu: (&w[1].y - &w[0].y) / (&w[1].x - &w[0].x),
            r: w[1].alpha - w[0].alpha,
            start: w[0].alpha,
            end: w[1].alpha,
        })
        .collect();
    Ok(NewtonPolygon { vertices: hull, slopes })
}

/// Valuation of an operator: the minimum over its nonzero coefficients.
pub fn operator_valuation<K: Field>(l: &MahlerOperator<K>) -> Result<Rational> {
    let vals = valuations(l)?;
    let v = vals
        .iter()
        .filter_map(|v| match v {
            Val::Known(y) => Some(y.clone()),
            _ => None,
        })
        .min()
        .ok_or(MahlerError::ZeroSeries)?;
    if vals.iter().any(|w| matches!(w, Val::AtLeast(b) if *b <= v)) {
        return Err(MahlerError::UnknownLeadingTerm);
    }
    Ok(v)
}

/// `(z^{-val} Σ b_i X^i)|_{z=0}` for an operator with ℚ coefficients, before
/// stripping powers of `X`.
pub fn raw_char_poly(l: &MahlerOperator<Rational>, mu: &Rational) -> Result<Poly> {
    let pm1 = Rational::from_integer((l.radix() - 1).into());
    let g = l.gauge_theta(&-(mu * &pm1));
    let v = operator_valuation(&g)?;
    let coeffs = g
        .coeffs()
        .iter()
        .map(|b| match b.leading() {
            Ok((e, c)) if *e == v => c.clone(),
            _ => Rational::from_integer(0.into()),
        })
        .collect();
    Ok(Poly::from_coeffs(coeffs))
}

/// Canonical characteristic polynomial attached to the slope `mu`.
pub fn char_poly(l: &MahlerOperator<Rational>, mu: &Rational) -> Result<Poly> {
    Ok(raw_char_poly(l, mu)?.strip_x_power().1)
}

pub fn analyze(l: &MahlerOperator<Rational>) -> Result<NewtonData> {
    let poly = newton_polygon(l)?;
    let mut slopes = Vec::with_capacity(poly.slopes.len());
    for s in &poly.slopes {
        let chi = char_poly(l, &s.mu)?;
        let roots = chi.rational_roots();
        slopes.push(SlopeData {
            slope: s.clone(),
            charpoly: chi,
            exponents: roots.roots,
            residual: roots.residual,
        });
    }
    Ok(NewtonData {
        p: l.radix(),
        order: l.order(),
        vertices: poly.vertices,
        slopes,
    })
}

/// `ν_j = (p-1) Σ_{i<=j} p^{r_1+…+r_{i-1}} (μ_i - μ_{i-1})` with `μ_0 = 0`.
pub fn nu_values(p: u32, slopes: &[(Rational, usize)]) -> Vec<Rational> {
    let pm1 = Rational::from_integer((p - 1).into());
    let mut out = Vec::with_capacity(slopes.len());
    let mut acc = Rational::from_integer(0.into());
    let mut prev = Rational::from_integer(0.into());
    let mut rsum = 0usize;
    for (mu, r) in slopes {
        acc += radix_power(p, rsum) * (mu - &prev);
        out.push(&acc * &pm1);
        prev = mu.clone();
        rsum += r;
    }
    out
}

/// Plan over the rational exponents.
pub fn frobenius_plan(l: &MahlerOperator<Rational>, data: &NewtonData) -> Result<FrobeniusPlan> {
    let val_a0 = l.coeff(0).val()?;
    let nus = nu_values(data.p, &data.slope_values());
    let mut seen: BTreeMap<Rational, usize> = BTreeMap::new();
    let mut entries = Vec::new();
    for (j, sd) in data.slopes.iter().enumerate() {
        for (c, m) in &sd.exponents {
            let s = seen.get(c).copied().unwrap_or(0);
            entries.push(PlanEntry {
                j,
                c: c.clone(),
                s,
                m: *m,
                nu: nus[j].clone(),
            });
        }
        for (c, m) in &sd.exponents {
            *seen.entry(c.clone()).or_insert(0) += m;
        }
    }
    let mus = data.slopes.iter().map(|s| s.slope.mu.clone()).collect();
    Ok(FrobeniusPlan {
        p: data.p,
        val_a0,
        mus,
        nus,
        entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{q, qi};
    use crate::hahn::QSeries;
    use proptest::prelude::*;

    type Op = MahlerOperator<Rational>;

    fn s(terms: &[(Rational, i64)]) -> QSeries {
        QSeries::exact(terms.iter().map(|(e, c)| (e.clone(), qi(*c))))
    }

    fn worked_example(p: u32, nu: i64) -> Op {
        let ceiling = qi(12);
        let h = s(&[(qi(0), 1), (q(-nu, p as i64 - 1), 1)]);
        let left = Op::new(p, vec![s(&[(qi(nu), -1)]), QSeries::one()]).unwrap();
        let right = Op::new(p, vec![s(&[(qi(0), -1)]), QSeries::one()]).unwrap();
        left.mul(&Op::multiplication(p, h.invert(&ceiling).unwrap()))
            .unwrap()
            .mul(&right)
            .unwrap()
    }

    #[test]
    fn coefficient_with_only_a_lower_bound() {
        use crate::hahn::Mask;
        // points (1, 0), (2, ≥ b), (4, 0): harmless iff b > 0
        let middle = |b: i64| QSeries::new(Vec::new(), Mask::below(qi(b)));
        let op = |b: i64| Op::new(2, vec![QSeries::one(), middle(b), QSeries::one()]).unwrap();
        assert_eq!(newton_polygon(&op(3)).unwrap().slope_values(), vec![(qi(0), 2)]);
        assert_eq!(operator_valuation(&op(3)).unwrap(), qi(0));
        assert_eq!(newton_polygon(&op(0)).err(), Some(MahlerError::UnknownLeadingTerm));
        assert_eq!(operator_valuation(&op(0)).err(), Some(MahlerError::UnknownLeadingTerm));
    }

    #[test]
    fn worked_example_polygon() {
        let l = worked_example(2, -2);
        let poly = newton_polygon(&l).unwrap();
        let pts: Vec<_> = poly.vertices.iter().map(|v| (v.x.clone(), v.y.clone())).collect();
        assert_eq!(pts, vec![(qi(1), qi(-2)), (qi(2), qi(-2)), (qi(4), qi(0))]);
        assert_eq!(poly.slope_values(), vec![(qi(0), 1), (qi(1), 1)]);
        let d = analyze(&l).unwrap();
        assert_eq!(raw_char_poly(&l, &qi(0)).unwrap(), Poly::from_ints(&[1, -1]));
        assert_eq!(raw_char_poly(&l, &qi(1)).unwrap(), Poly::from_ints(&[0, -1, 1]));
        assert_eq!(d.slopes[1].charpoly, Poly::from_ints(&[-1, 1]));
        for sd in &d.slopes {
            assert_eq!(sd.exponents, vec![(qi(1), 1)]);
        }
        let plan = frobenius_plan(&l, &d).unwrap();
        assert_eq!(plan.nus, vec![qi(0), qi(2)]);
        assert_eq!(plan.entry(&qi(1), 0).unwrap().s, 0);
        assert_eq!(plan.entry(&qi(1), 1).unwrap().s, 1);
        assert_eq!(plan.val_a0, qi(-2));
    }

    #[test]
    fn worked_example_radix_three() {
        let l = worked_example(3, -3);
        let d = analyze(&l).unwrap();
        // μ2 = -ν/((p-1)p) = 1/2
        assert_eq!(d.slope_values(), vec![(qi(0), 1), (q(1, 2), 1)]);
        let plan = frobenius_plan(&l, &d).unwrap();
        assert_eq!(plan.nus, vec![qi(0), qi(3)]);
    }

    #[test]
    fn first_order_examples() {
        let l = Op::new(2, vec![s(&[(qi(0), -1)]), QSeries::one()]).unwrap();
        let d = analyze(&l).unwrap();
        assert_eq!(d.slope_values(), vec![(qi(0), 1)]);
        let plan = frobenius_plan(&l, &d).unwrap();
        assert_eq!(
            plan.entries,
            vec![PlanEntry {
                j: 0,
                c: qi(1),
                s: 0,
                m: 1,
                nu: qi(0)
            }]
        );
        let l = Op::new(2, vec![s(&[(qi(1), -1)]), QSeries::one()]).unwrap();
        let d = analyze(&l).unwrap();
        assert_eq!(d.slope_values(), vec![(qi(-1), 1)]);
        assert_eq!(d.slopes[0].charpoly, Poly::from_ints(&[-1, 1]));
    }

    #[test]
    fn non_splitting_characteristic_polynomial() {
        // φ^2 + 1 at a single slope 0: χ = X^2 + 1
        let l = Op::new(2, vec![QSeries::one(), QSeries::zero(), QSeries::one()]).unwrap();
        let d = analyze(&l).unwrap();
        assert_eq!(d.slope_values(), vec![(qi(0), 2)]);
        assert!(d.slopes[0].exponents.is_empty());
        assert_eq!(d.slopes[0].residual, Poly::from_ints(&[1, 0, 1]));
        assert!(!d.all_rational());
    }

    #[test]
    fn nu_formula() {
        assert_eq!(nu_values(2, &[(qi(0), 1), (qi(1), 1), (qi(2), 1)])[2], qi(6));
        assert_eq!(nu_values(3, &[(q(1, 2), 2)]), vec![qi(1)]);
    }

    #[test]
    fn repeated_exponent_offsets() {
        // (φ - 1)^2 (φ - 2) has slope 0 with χ = (X-1)^2 (X-2)
        let a = Op::new(2, vec![s(&[(qi(0), -1)]), QSeries::one()]).unwrap();
        let b = Op::new(2, vec![s(&[(qi(0), -2)]), QSeries::one()]).unwrap();
        let l = a.mul(&a).unwrap().mul(&b).unwrap();
        let d = analyze(&l).unwrap();
        assert_eq!(d.slopes[0].exponents, vec![(qi(1), 2), (qi(2), 1)]);
    }

    fn random_op() -> impl Strategy<Value = Op> {
        prop::collection::vec(
            prop::option::weighted(
                0.8,
                ((-6i64..=6), (1i64..=3), prop::sample::select(vec![-3i64, -1, 1, 2])),
            ),
            2..=5,
        )
        .prop_filter_map("nonzero ends", |v| {
            let cs: Vec<QSeries> = v
                .into_iter()
                .map(|t| match t {
                    Some((n, d, c)) => s(&[(q(n, d), c), (q(n, d) + qi(1), 1)]),
                    None => QSeries::zero(),
                })
                .collect();
            Op::new(2, cs).ok()
        })
    }

    proptest! {
        #[test]
        fn hull_lies_below_points(l in random_op()) {
            let poly = newton_polygon(&l).unwrap();
            let total: usize = poly.slopes.iter().map(|s| s.r).sum();
            prop_assert_eq!(total, l.order());
            for (i, a) in l.coeffs().iter().enumerate() {
                let Ok(y) = a.val() else { continue };
                let x = radix_power(2, i);
                for w in poly.vertices.windows(2) {
                    let (a0, b0) = (&w[0], &w[1]);
                    let lhs = (&b0.x - &a0.x) * (&y - &a0.y);
                    let rhs = (&b0.y - &a0.y) * (&x - &a0.x);
                    prop_assert!(lhs >= rhs);
                }
            }
            for w in poly.slopes.windows(2) {
                prop_assert!(w[0].mu < w[1].mu);
            }
        }

        #[test]
        fn theta_gauge_shifts_slopes(l in random_op(), mu in -4i64..=4, d in 1i64..=3) {
            let mu = q(mu, d);
            let before = analyze(&l).unwrap();
            let after = analyze(&l.gauge_theta(&mu)).unwrap();
            let shifted: Vec<_> = before.slope_values().into_iter().map(|(m, r)| (m + &mu, r)).collect();
            prop_assert_eq!(after.slope_values(), shifted);
            for (a, b) in before.slopes.iter().zip(&after.slopes) {
                prop_assert_eq!(&a.charpoly, &b.charpoly);
            }
        }
    }
}
