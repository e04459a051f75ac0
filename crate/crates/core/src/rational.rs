//! Exact rational scalars.
//!
//! All coefficients in this crate are arbitrary-precision rationals kept in
//! lowest terms with a positive denominator, which `num-rational` guarantees
//! on construction. Text form is the fraction string `p/q` (or just `p` when
//! the denominator is one), used verbatim in every JSON interface.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Result, UmbraError};

pub type Rational = num_rational::BigRational;

/// `n/d` as an exact rational.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Integer as an exact rational.
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn from_big(n: BigInt) -> Rational {
    Rational::from_integer(n)
}

/// Parse a fraction string such as `3`, `-1/2` or ` 7/4 `.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    t.parse::<Rational>()
        .map_err(|_| UmbraError::Parse(format!("not a rational: {t:?}")))
}

/// Parse a comma-joined vector of fraction strings, e.g. `"2,1,-1/2"`.
pub fn parse_rational_vec(s: &str) -> Result<Vec<Rational>> {
    s.split(',').map(parse_rational).collect()
}

pub fn format_rational(r: &Rational) -> String {
    r.to_string()
}

pub fn format_rational_vec(v: &[Rational]) -> String {
    v.iter().map(Rational::to_string).collect::<Vec<_>>().join(",")
}

/// `r^k` for a usize exponent (num's `pow` wants i32).
pub fn pow(r: &Rational, k: usize) -> Rational {
    let mut acc = Rational::one();
    for _ in 0..k {
        acc *= r;
    }
    acc
}

pub fn is_zero(r: &Rational) -> bool {
    r.is_zero()
}

/// Exposed for tests that want to assert on sign conventions.
pub fn is_negative(r: &Rational) -> bool {
    r.is_negative()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fraction_strings_round_trip() {
        for s in ["0", "3", "-1/2", "7/4", "-9"] {
            let r = parse_rational(s).unwrap();
            assert_eq!(format_rational(&r), s);
        }
        // normalization: sign moves to the numerator, fraction is reduced
        assert_eq!(parse_rational("4/-6").unwrap(), rat(-2, 3));
    }

    #[test]
    fn vector_parsing() {
        let v = parse_rational_vec("2,1,-1/2").unwrap();
        assert_eq!(v, vec![int(2), int(1), rat(-1, 2)]);
        assert!(parse_rational_vec("2,,1").is_err());
    }

    #[test]
    fn pow_matches_repeated_product() {
        let r = rat(-3, 2);
        assert_eq!(pow(&r, 0), int(1));
        assert_eq!(pow(&r, 3), rat(-27, 8));
    }
}
