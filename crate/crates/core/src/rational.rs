//! Exact rational scalars and their string encoding.
//!
//! Rationals travel through JSON as strings: `"3"`, `"-7/4"`, `"5/2^3"`, or a
//! plain decimal such as `"0.3"` (parsed exactly as `3/10`).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational scalar used throughout the crate.
pub type Q = BigRational;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// `2^k` for any integer `k`.
pub fn pow2(k: i32) -> Q {
    let p = BigInt::one() << k.unsigned_abs();
    if k >= 0 {
        Q::from_integer(p)
    } else {
        Q::new(BigInt::one(), p)
    }
}

pub fn to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        // ratio of huge integers: fall back to scaled division
        let n = x.numer().to_f64().unwrap_or(f64::MAX);
        let d = x.denom().to_f64().unwrap_or(f64::MAX);
        n / d
    })
}

/// Floor of `x` as a `BigInt`.
pub fn floor(x: &Q) -> BigInt {
    x.floor().to_integer()
}

pub fn ceil(x: &Q) -> BigInt {
    x.ceil().to_integer()
}

/// Smallest `k` with `y <= 2^k`, for `y > 0`.
pub fn ceil_log2(y: &Q) -> i32 {
    debug_assert!(y.is_positive());
    let approx = to_f64(y).log2().ceil();
    let mut k = if approx.is_finite() { approx as i32 } else { 0 };
    while &pow2(k) < y {
        k += 1;
    }
    while &pow2(k - 1) >= y {
        k -= 1;
    }
    k
}

/// Largest `k` with `2^k <= y`, for `y > 0`.
pub fn floor_log2(y: &Q) -> i32 {
    let k = ceil_log2(y);
    if &pow2(k) == y {
        k
    } else {
        k - 1
    }
}

pub fn parse_q(s: &str) -> Result<Q> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num.trim().parse().map_err(|_| bad())?;
        let d: BigInt = if let Some(exp) = den.trim().strip_prefix("2^") {
            let e: u32 = exp.trim().parse().map_err(|_| bad())?;
            BigInt::one() << e
        } else {
            den.trim().parse().map_err(|_| bad())?
        };
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Q::new(n, d));
    }
    parse_decimal(s).ok_or_else(bad)
}

fn parse_decimal(s: &str) -> Option<Q> {
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let all: BigInt = format!("{int_part}{frac_part}0").parse().ok()?;
    let all = all / BigInt::from(10);
    let scale = exp - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let value = if scale >= 0 {
        Q::from_integer(all * num_traits::pow(ten, scale as usize))
    } else {
        Q::new(all, num_traits::pow(ten, (-scale) as usize))
    };
    Some(if neg { -value } else { value })
}

/// Canonical string form: `"n"` or `"n/d"`.
pub fn fmt_q(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Serde adapter storing a [`Q`] as its canonical string.
pub mod serde_q {
    use super::{fmt_q, parse_q, Q};
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Q, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_q(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Q, D::Error> {
        let raw = NumOrStr::deserialize(d)?;
        match raw {
            NumOrStr::Str(s) => parse_q(&s).map_err(D::Error::custom),
            NumOrStr::Int(i) => Ok(super::qi(i)),
            NumOrStr::Float(f) => parse_q(&format!("{f}")).map_err(D::Error::custom),
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum NumOrStr {
        Int(i64),
        Float(f64),
        Str(String),
    }
}

/// Serde adapter for `Vec<Q>`.
pub mod serde_q_vec {
    use super::{fmt_q, parse_q, Q};
    use serde::{de::Error as _, ser::SerializeSeq, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(xs: &[Q], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(xs.len()))?;
        for x in xs {
            seq.serialize_element(&fmt_q(x))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Q>, D::Error> {
        let raw = Vec::<String>::deserialize(d)?;
        raw.iter()
            .map(|s| parse_q(s).map_err(D::Error::custom))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_forms() {
        assert_eq!(parse_q("3").unwrap(), qi(3));
        assert_eq!(parse_q("-7/4").unwrap(), q(-7, 4));
        assert_eq!(parse_q("5/2^3").unwrap(), q(5, 8));
        assert_eq!(parse_q("0.3").unwrap(), q(3, 10));
        assert_eq!(parse_q("-.25").unwrap(), q(-1, 4));
        assert_eq!(parse_q("1.5e2").unwrap(), qi(150));
        assert_eq!(parse_q("2e-1").unwrap(), q(1, 5));
        assert!(parse_q("1/0").is_err());
        assert!(parse_q("abc").is_err());
        assert!(parse_q("").is_err());
    }

    #[test]
    fn logs() {
        assert_eq!(ceil_log2(&q(1, 2)), -1);
        assert_eq!(ceil_log2(&q(3, 5)), 0);
        assert_eq!(ceil_log2(&qi(1)), 0);
        assert_eq!(ceil_log2(&qi(5)), 3);
        assert_eq!(floor_log2(&qi(5)), 2);
        assert_eq!(floor_log2(&q(1, 4)), -2);
        assert_eq!(ceil_log2(&pow2(-40)), -40);
    }

    #[test]
    fn format_roundtrip() {
        for x in [q(-7, 4), qi(0), q(1, 1024), qi(12)] {
            assert_eq!(parse_q(&fmt_q(&x)).unwrap(), x);
        }
    }
}
