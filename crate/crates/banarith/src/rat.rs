//! Exact rational arithmetic helpers.
//!
//! Everything in this crate computes with `BigRational`; no floating point
//! enters any norm or bound. Rationals cross the CLI boundary as
//! decimal-free `"num/den"` strings (`"num"` when the denominator is 1).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::Error;

pub type Rat = BigRational;

/// `n/d` as an exact rational. Panics on `d == 0`; intended for literals.
pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Parses `"num/den"` or `"num"`.
pub fn parse_rat(s: &str) -> Result<Rat, Error> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let num: BigInt = num
        .parse()
        .map_err(|_| Error::Parse(format!("invalid rational numerator {num:?}")))?;
    let den: BigInt = den
        .parse()
        .map_err(|_| Error::Parse(format!("invalid rational denominator {den:?}")))?;
    if den.is_zero() {
        return Err(Error::Parse(format!("zero denominator in {s:?}")));
    }
    Ok(Rat::new(num, den))
}

/// Canonical `"num/den"` form; integers print without the `/1`.
pub fn format_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// `r^e` for a possibly negative exponent; errors on `0^negative`.
pub fn rat_pow(r: &Rat, e: i64) -> Result<Rat, Error> {
    if r.is_zero() && e < 0 {
        return Err(Error::Domain("negative power of zero".into()));
    }
    if e >= 0 {
        Ok(pow_u(r, e as u64))
    } else {
        Ok(pow_u(r, (-e) as u64).recip())
    }
}

fn pow_u(r: &Rat, mut e: u64) -> Rat {
    let mut base = r.clone();
    let mut acc = Rat::one();
    while e > 0 {
        if e & 1 == 1 {
            acc *= &base;
        }
        base = &base * &base;
        e >>= 1;
    }
    acc
}

/// Rational upper bound for `e^x`, `x >= 0`, by Taylor truncation.
///
/// Uses `sum_{k<=n} x^k/k!` plus the geometric majorant of the tail,
/// `x^{n+1}/(n+1)! * 1/(1 - x/(n+2))`, valid once `x < n+2`; `n` is raised
/// internally until that holds.
pub fn exp_upper_bound(x: &Rat, terms: u32) -> Result<Rat, Error> {
    if x.is_negative() {
        return Err(Error::Domain("exp_upper_bound expects x >= 0".into()));
    }
    let mut n = terms.max(1) as u64;
    // need x/(n+2) < 1 for the tail majorant
    while Rat::from_integer(BigInt::from(n + 2)) <= *x {
        n *= 2;
    }
    let mut sum = Rat::one();
    let mut term = Rat::one(); // x^k / k!
    for k in 1..=n {
        term = term * x / Rat::from_integer(BigInt::from(k));
        sum += &term;
    }
    // tail <= x^{n+1}/(n+1)! * sum_j (x/(n+2))^j
    let head = term * x / Rat::from_integer(BigInt::from(n + 1));
    let ratio = x / Rat::from_integer(BigInt::from(n + 2));
    let tail = head / (Rat::one() - ratio);
    Ok(sum + tail)
}

/// Rational lower bound for `e^x`, `x >= 0`: the plain Taylor partial sum.
pub fn exp_lower_bound(x: &Rat, terms: u32) -> Result<Rat, Error> {
    if x.is_negative() {
        return Err(Error::Domain("exp_lower_bound expects x >= 0".into()));
    }
    let mut sum = Rat::one();
    let mut term = Rat::one();
    for k in 1..=terms.max(1) as u64 {
        term = term * x / Rat::from_integer(BigInt::from(k));
        sum += &term;
    }
    Ok(sum)
}

/// Serde adapter: `Rat` as a `"num/den"` string.
pub mod serde_rat {
    use super::*;
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rat, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rat(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rat, D::Error> {
        let s = String::deserialize(d)?;
        parse_rat(&s).map_err(de::Error::custom)
    }
}

/// Serde adapter: `Vec<Rat>` as `"num/den"` strings.
pub mod serde_rat_vec {
    use super::*;
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Rat], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(format_rat))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rat>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter().map(|s| parse_rat(s).map_err(de::Error::custom)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_round_trip() {
        for s in ["3/2", "-7", "0", "22/7", "-1/3"] {
            let r = parse_rat(s).unwrap();
            assert_eq!(format_rat(&r), s);
        }
        assert_eq!(format_rat(&parse_rat("4/2").unwrap()), "2");
        assert!(parse_rat("1/0").is_err());
        assert!(parse_rat("x").is_err());
    }

    #[test]
    fn pow_negative_exponent() {
        assert_eq!(rat_pow(&rat(2, 3), -2).unwrap(), rat(9, 4));
        assert!(rat_pow(&rat(0, 1), -1).is_err());
    }

    #[test]
    fn exp_bounds_bracket_e() {
        // e = 2.71828...; check 2.718 < lower <= upper < 2.719 at enough terms
        let x = rat_int(1);
        let lo = exp_lower_bound(&x, 20).unwrap();
        let hi = exp_upper_bound(&x, 20).unwrap();
        assert!(lo <= hi);
        assert!(lo > rat(2718, 1000));
        assert!(hi < rat(2719, 1000));
    }

    #[test]
    fn exp_upper_bound_e_squared_below_739_over_100() {
        // the delta-map examples use E = 739/100 >= e^2
        let hi = exp_upper_bound(&rat_int(2), 24).unwrap();
        assert!(hi <= rat(739, 100));
        let lo = exp_lower_bound(&rat_int(2), 24).unwrap();
        assert!(lo > rat(738, 100));
    }
}
