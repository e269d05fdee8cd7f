//! Evaluation of coefficient expressions to truncated Hahn series.

use mahler::fields::Rational;
use mahler::hahn::QSeries;
use mahler::operator::MahlerOperator;
use mahler::MahlerError;

use crate::parse::{EquationSpec, Expr};
use crate::InputError;

/// Evaluates `e`; every quotient and product is certified below `ceiling`.
pub fn eval(e: &Expr, ceiling: &Rational) -> Result<QSeries, MahlerError> {
    Ok(match e {
        Expr::Int(n) => QSeries::constant(Rational::from_integer(n.clone())),
        Expr::Z(x) => QSeries::monomial(Rational::from_integer(1.into()), x.clone()),
        Expr::Neg(a) => eval(a, ceiling)?.negated(),
        Expr::Add(a, b) => eval(a, ceiling)?.add(&eval(b, ceiling)?),
        Expr::Sub(a, b) => eval(a, ceiling)?.sub(&eval(b, ceiling)?),
        Expr::Mul(a, b) => eval(a, ceiling)?.mul_truncated(&eval(b, ceiling)?, ceiling),
        Expr::Div(a, b) => {
            let den = eval(b, ceiling)?;
            if den.is_exact_zero() {
                return Err(MahlerError::ZeroDivisor);
            }
            eval(a, ceiling)?.mul_truncated(&den.invert(ceiling)?, ceiling)
        }
        Expr::Pow(a, n) => {
            let mut base = eval(a, ceiling)?;
            if *n < 0 {
                if base.is_exact_zero() {
                    return Err(MahlerError::ZeroDivisor);
                }
                base = base.invert(ceiling)?;
            }
            let mut acc = QSeries::one();
            for _ in 0..n.unsigned_abs() {
                acc = acc.mul_truncated(&base, ceiling);
            }
            acc
        }
    })
}

/// The operator `Σ a_i φ^i` of `spec` with coefficients certified below `ceiling`.
pub fn elaborate(spec: &EquationSpec, ceiling: &Rational) -> Result<MahlerOperator<Rational>, InputError> {
    let coeffs = spec
        .coeffs
        .iter()
        .enumerate()
        .map(|(i, e)| eval(e, ceiling).map_err(|err| InputError::Elaboration { index: i, source: err }))
        .collect::<Result<Vec<_>, _>>()?;
    let n = coeffs.len() - 1;
    for i in [0, n] {
        if coeffs[i].is_exact_zero() {
            return Err(InputError::InvalidEquation(format!("a[{i}] evaluates to zero")));
        }
    }
    MahlerOperator::new(spec.p, coeffs).map_err(|err| InputError::InvalidEquation(err.to_string()))
}
