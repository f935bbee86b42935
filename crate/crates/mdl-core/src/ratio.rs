//! Rational scalar plumbing: construction, `num/den` parsing and formatting,
//! serde glue, and float rationalization.
//!
//! Everything geometric in this crate runs on [`Rat`] (arbitrary-precision
//! `BigRational`). Decimal notation is deliberately rejected by the parser so
//! that no float ever sneaks into an exact pipeline.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

pub type Rat = BigRational;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RatioError {
    #[error("invalid rational literal {0:?}: expected `num` or `num/den`")]
    Malformed(String),
    #[error("invalid rational literal {0:?}: zero denominator")]
    ZeroDenominator(String),
    #[error("decimal notation {0:?} rejected: rationals must be written num/den")]
    DecimalRejected(String),
}

/// `rat(n, d)` — shorthand for small literals in code and tests.
pub fn rat(n: i64, d: i64) -> Rat {
    assert!(d != 0, "zero denominator");
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rint(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Parse `"num"` or `"num/den"`. Anything with a decimal point or exponent is
/// rejected outright.
pub fn parse_rat(s: &str) -> Result<Rat, RatioError> {
    let t = s.trim();
    if t.contains(['.', 'e', 'E']) {
        return Err(RatioError::DecimalRejected(s.to_string()));
    }
    let parse_int = |p: &str| -> Result<BigInt, RatioError> {
        p.trim()
            .parse::<BigInt>()
            .map_err(|_| RatioError::Malformed(s.to_string()))
    };
    match t.split_once('/') {
        None => Ok(Rat::from_integer(parse_int(t)?)),
        Some((n, d)) => {
            let num = parse_int(n)?;
            let den = parse_int(d)?;
            if den.is_zero() {
                return Err(RatioError::ZeroDenominator(s.to_string()));
            }
            Ok(Rat::new(num, den))
        }
    }
}

/// Canonical text form: integers as `"n"`, everything else as `"n/d"` with
/// positive denominator.
pub fn format_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Best rational approximation of `x` with denominator at most `max_den`,
/// via the continued-fraction convergent/semiconvergent walk.
pub fn rationalize_f64(x: f64, max_den: u64) -> Option<Rat> {
    if !x.is_finite() {
        return None;
    }
    let negative = x < 0.0;
    let x = x.abs();
    // Convergents p/q of the continued fraction of x.
    let (mut p0, mut q0) = (BigInt::zero(), BigInt::one());
    let (mut p1, mut q1) = (BigInt::one(), BigInt::zero());
    let cap = BigInt::from(max_den);
    let mut frac = x;
    for _ in 0..64 {
        let a = frac.floor();
        if a > 9e18 {
            break;
        }
        let ai = BigInt::from(a as i128);
        let p2 = &ai * &p1 + &p0;
        let q2 = &ai * &q1 + &q0;
        if q2 > cap {
            // Largest semiconvergent still under the cap.
            let k = (&cap - &q0) / &q1;
            if k.is_positive() {
                let ps = &k * &p1 + &p0;
                let qs = &k * &q1 + &q0;
                let semi = Rat::new(ps, qs);
                let conv = Rat::new(p1.clone(), q1.clone());
                let semi_err = (semi.to_f64().unwrap_or(f64::MAX) - x).abs();
                let conv_err = (conv.to_f64().unwrap_or(f64::MAX) - x).abs();
                let best = if semi_err < conv_err { semi } else { conv };
                return Some(if negative { -best } else { best });
            }
            let conv = Rat::new(p1, q1);
            return Some(if negative { -conv } else { conv });
        }
        p0 = std::mem::replace(&mut p1, p2);
        q0 = std::mem::replace(&mut q1, q2);
        let rem = frac - a;
        if rem < 1e-15 {
            break;
        }
        frac = 1.0 / rem;
    }
    if q1.is_zero() {
        return None;
    }
    let conv = Rat::new(p1, q1);
    Some(if negative { -conv } else { conv })
}

pub fn rat_to_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Serde adapters: a rational is always a `"num/den"` (or integer) string on
/// the wire.
pub mod serde_rat {
    use super::*;
    use serde::{de::Error as DeError, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rat, ser: S) -> Result<S::Ok, S::Error> {
        ser.serialize_str(&format_rat(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Rat, D::Error> {
        let s = String::deserialize(de)?;
        parse_rat(&s).map_err(D::Error::custom)
    }
}

pub mod serde_rat_vec {
    use super::*;
    use serde::{de::Error as DeError, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Rat], ser: S) -> Result<S::Ok, S::Error> {
        ser.collect_seq(v.iter().map(format_rat))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Vec<Rat>, D::Error> {
        let raw = Vec::<String>::deserialize(de)?;
        raw.iter()
            .map(|s| parse_rat(s).map_err(D::Error::custom))
            .collect()
    }
}

pub mod serde_rat_mat {
    use super::*;
    use serde::{de::Error as DeError, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(m: &[Vec<Rat>], ser: S) -> Result<S::Ok, S::Error> {
        ser.collect_seq(
            m.iter()
                .map(|row| row.iter().map(format_rat).collect::<Vec<_>>()),
        )
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Vec<Vec<Rat>>, D::Error> {
        let raw = Vec::<Vec<String>>::deserialize(de)?;
        raw.iter()
            .map(|row| {
                row.iter()
                    .map(|s| parse_rat(s).map_err(D::Error::custom))
                    .collect()
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_roundtrip() {
        for s in ["0", "1", "-7", "1/48", "-3/4", "139/119"] {
            let r = parse_rat(s).unwrap();
            assert_eq!(format_rat(&r), s);
        }
        // Non-canonical inputs normalize.
        assert_eq!(format_rat(&parse_rat("2/4").unwrap()), "1/2");
        assert_eq!(format_rat(&parse_rat("3/-6").unwrap()), "-1/2");
        assert_eq!(format_rat(&parse_rat("4/2").unwrap()), "2");
    }

    #[test]
    fn decimals_rejected() {
        assert!(matches!(
            parse_rat("0.5"),
            Err(RatioError::DecimalRejected(_))
        ));
        assert!(matches!(
            parse_rat("1e-3"),
            Err(RatioError::DecimalRejected(_))
        ));
        assert!(matches!(parse_rat("1/0"), Err(RatioError::ZeroDenominator(_))));
        assert!(matches!(parse_rat("a/b"), Err(RatioError::Malformed(_))));
    }

    #[test]
    fn rationalize_hits_simple_fractions() {
        assert_eq!(rationalize_f64(1.0 / 12.0, 1_000_000_000).unwrap(), rat(1, 12));
        assert_eq!(rationalize_f64(-2.0 / 3.0, 1_000_000_000).unwrap(), rat(-2, 3));
        assert_eq!(rationalize_f64(0.0, 10).unwrap(), rint(0));
        // Denominator cap respected.
        let r = rationalize_f64(std::f64::consts::PI, 113).unwrap();
        assert_eq!(r, rat(355, 113));
    }
}
