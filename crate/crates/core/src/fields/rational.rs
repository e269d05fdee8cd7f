use num_bigint::BigInt;
use num_traits::{One, Zero};

/// Arbitrary-precision rational, always in lowest terms with positive
/// denominator. `Display` prints `num/den`, or `num` when `den = 1`.
pub type Rational = num_rational::BigRational;

pub fn q(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn qi(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `"a/b"` or `"a"` (optional sign, surrounding whitespace allowed).
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                None
            } else {
                Some(Rational::new(n, d))
            }
        }
        None => s.parse::<BigInt>().ok().map(Rational::from_integer),
    }
}

/// `base^k` for any integer `k`; panics on `0^k` with `k < 0`.
pub fn pow_int(base: &Rational, k: i64) -> Rational {
    let mut acc = Rational::one();
    let mut b = if k < 0 { base.recip() } else { base.clone() };
    let mut e = k.unsigned_abs();
    while e > 0 {
        if e & 1 == 1 {
            acc *= &b;
        }
        e >>= 1;
        if e > 0 {
            b = &b * &b;
        }
    }
    acc
}

pub fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

pub fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display() {
        assert_eq!(parse_rational("-3/6"), Some(q(-1, 2)));
        assert_eq!(parse_rational(" 7 "), Some(qi(7)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(q(4, 2).to_string(), "2");
        assert_eq!(q(-2, 4).to_string(), "-1/2");
    }

    #[test]
    fn powers() {
        assert_eq!(pow_int(&qi(2), 10), qi(1024));
        assert_eq!(pow_int(&qi(2), -3), q(1, 8));
        assert_eq!(pow_int(&q(-2, 3), 0), qi(1));
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), BigInt::from(10));
        assert_eq!(binomial(3, 4), BigInt::zero());
        assert_eq!(factorial(5), BigInt::from(120));
    }
}
