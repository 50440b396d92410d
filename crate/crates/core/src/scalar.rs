//! Exact rational scalars and their text form.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use thiserror::Error;

pub type Scalar = BigRational;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseScalarError {
    #[error("not a rational number: {0:?}")]
    Malformed(String),
    #[error("zero denominator in {0:?}")]
    ZeroDenominator(String),
}

pub fn int(n: i64) -> Scalar {
    Scalar::from_integer(BigInt::from(n))
}

pub fn ratio(num: i64, den: i64) -> Scalar {
    Scalar::new(BigInt::from(num), BigInt::from(den))
}

/// Accepts `p`, `p/q` and a leading sign.
pub fn parse_scalar(text: &str) -> Result<Scalar, ParseScalarError> {
    let t = text.trim();
    let bad = || ParseScalarError::Malformed(text.to_string());
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(ParseScalarError::ZeroDenominator(text.to_string()));
    }
    Ok(Scalar::new(num, den))
}

/// Always `num/den`, denominator positive, even for integers.
pub fn format_scalar(s: &Scalar) -> String {
    format!("{}/{}", s.numer(), s.denom())
}

/// `base^exp` for any sign of `exp`. Panics on `0^exp` with `exp < 0`.
pub fn pow(base: &Scalar, exp: i64) -> Scalar {
    let e = exp.unsigned_abs() as u32;
    let p = Scalar::new_raw(base.numer().pow(e), base.denom().pow(e));
    let p = if exp >= 0 { p } else { p.recip() };
    normalize_sign(p)
}

fn normalize_sign(s: Scalar) -> Scalar {
    if s.denom().is_negative() {
        Scalar::new_raw(-s.numer(), -s.denom())
    } else {
        s
    }
}

pub fn to_f64(s: &Scalar) -> f64 {
    if let Some(f) = s.to_f64().filter(|f| f.is_finite() && *f != 0.0 || s.is_zero()) {
        return f;
    }
    let sn = s.numer().bits().saturating_sub(64);
    let sd = s.denom().bits().saturating_sub(64);
    let n = (s.numer() >> sn).to_f64().unwrap_or(f64::NAN);
    let d = (s.denom() >> sd).to_f64().unwrap_or(f64::NAN);
    n / d * 2f64.powi(sn as i32 - sd as i32)
}

/// Positive rational with numerator and denominator below 2^10, never equal to 1.
pub fn random_generic<R: Rng + ?Sized>(rng: &mut R) -> Scalar {
    loop {
        let n: i64 = rng.gen_range(1..1024);
        let d: i64 = rng.gen_range(1..1024);
        if n != d && n.gcd(&d) == 1 {
            return ratio(n, d);
        }
    }
}

pub fn is_one(s: &Scalar) -> bool {
    s.is_one()
}

/// Least common multiple of the denominators.
pub fn common_denominator<'a>(values: impl IntoIterator<Item = &'a Scalar>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_round_trip() {
        for s in ["20/1", "-3/4", "5/3", "0/1"] {
            assert_eq!(format_scalar(&parse_scalar(s).unwrap()), s);
        }
        assert_eq!(parse_scalar(" 6/4 ").unwrap(), ratio(3, 2));
        assert_eq!(parse_scalar("7").unwrap(), int(7));
        assert!(parse_scalar("1/0").is_err());
        assert!(parse_scalar("x").is_err());
    }

    #[test]
    fn negative_powers() {
        assert_eq!(pow(&ratio(2, 3), -2), ratio(9, 4));
        assert_eq!(pow(&ratio(-2, 3), -1), ratio(-3, 2));
        assert_eq!(pow(&ratio(5, 7), 0), int(1));
    }

    #[test]
    fn float_conversion_of_huge_values() {
        let big = pow(&ratio(1023, 1021), 2000);
        let f = to_f64(&big);
        assert!((f.ln() - 2000.0 * (1023.0f64 / 1021.0).ln()).abs() < 1e-6);
    }
}
