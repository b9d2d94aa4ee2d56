//! Exact scalar arithmetic for the supported normed rings.
//!
//! Every ring here has a norm that is exactly computable on the finitely
//! representable elements: integers and rationals with the usual absolute
//! value, trivially normed localizations `Z_S`, the scaled p-adic rings
//! (norm `r^{v_p}` with a rational radius `0 < r < 1`), and rational
//! approximants of the circle `R/Z` (norm = distance to the nearest
//! integer). Radii and scaling factors are rationals throughout so every
//! norm check is an exact rational comparison.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::norm::NormValue;
use crate::rat::{rat_pow, serde_rat, Rat};

/// Norm mode for a localized ring of integers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LocalizedMode {
    Absolute,
    Trivial,
}

/// The ring kinds the library computes with.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum RingKind {
    /// `Z` with the usual absolute value.
    IntAbs,
    /// `Q` with the usual absolute value.
    RatAbs,
    /// A localization `Z_S` with the trivial norm (0 on 0, 1 elsewhere).
    /// `denominators` lists the primes inverted; empty means plain `Z`.
    Trivial { denominators: Vec<u64> },
    /// A localization `Z_S` with a chosen norm mode.
    Localized { denominators: Vec<u64>, mode: LocalizedMode },
    /// `Z` completed with respect to `|a p^n| = r^n` for `p` not dividing
    /// `a`; the radius is `r = p^{-epsilon}`, kept as an exact rational.
    Padic {
        p: u64,
        #[serde(with = "serde_rat")]
        r: Rat,
    },
    /// Rational approximants of the circle `R/Z`; the norm of a coset is
    /// the exact distance to the nearest integer. `den_bound` caps the
    /// reduced denominator of representable elements.
    Circle { den_bound: u64 },
}

/// A ring tag: the kind plus the submultiplicativity constant `C` in
/// `|ab| <= C |a||b|`. Every supported kind satisfies `C = 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BaseRing {
    #[serde(flatten)]
    pub kind: RingKind,
    #[serde(with = "serde_rat", default = "Rat::one", skip_serializing_if = "Rat::is_one")]
    pub submult_constant: Rat,
}

impl BaseRing {
    pub fn new(kind: RingKind) -> Result<Self, Error> {
        match &kind {
            RingKind::Padic { p, r } => {
                if !is_prime(*p) {
                    return Err(Error::Domain(format!("{p} is not prime")));
                }
                if *r <= Rat::zero() || *r >= Rat::one() {
                    return Err(Error::Domain(format!("p-adic radius must lie in (0,1), got {r}")));
                }
            }
            RingKind::Trivial { denominators } | RingKind::Localized { denominators, .. } => {
                for &q in denominators {
                    if !is_prime(q) {
                        return Err(Error::Domain(format!("denominator set entry {q} is not prime")));
                    }
                }
            }
            RingKind::Circle { den_bound } => {
                if *den_bound == 0 {
                    return Err(Error::Domain("circle denominator bound must be positive".into()));
                }
            }
            _ => {}
        }
        Ok(BaseRing { kind, submult_constant: Rat::one() })
    }

    pub fn int_abs() -> Self {
        BaseRing::new(RingKind::IntAbs).unwrap()
    }

    pub fn rat_abs() -> Self {
        BaseRing::new(RingKind::RatAbs).unwrap()
    }

    pub fn trivial(denominators: Vec<u64>) -> Result<Self, Error> {
        BaseRing::new(RingKind::Trivial { denominators })
    }

    pub fn localized(denominators: Vec<u64>, mode: LocalizedMode) -> Result<Self, Error> {
        BaseRing::new(RingKind::Localized { denominators, mode })
    }

    pub fn padic(p: u64, r: Rat) -> Result<Self, Error> {
        BaseRing::new(RingKind::Padic { p, r })
    }

    pub fn circle(den_bound: u64) -> Result<Self, Error> {
        BaseRing::new(RingKind::Circle { den_bound })
    }

    /// Whether the ring norm satisfies the strong triangle inequality.
    pub fn is_nonarchimedean(&self) -> bool {
        match &self.kind {
            RingKind::IntAbs | RingKind::RatAbs | RingKind::Circle { .. } => false,
            RingKind::Trivial { .. } | RingKind::Padic { .. } => true,
            RingKind::Localized { mode, .. } => *mode == LocalizedMode::Trivial,
        }
    }
}

impl fmt::Display for BaseRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            RingKind::IntAbs => write!(f, "Z_abs"),
            RingKind::RatAbs => write!(f, "Q_abs"),
            RingKind::Trivial { denominators } => write!(f, "Z_triv[1/{denominators:?}]"),
            RingKind::Localized { denominators, mode } => write!(f, "Z[1/{denominators:?}]({mode:?})"),
            RingKind::Padic { p, r } => write!(f, "Z_{p}(r={r})"),
            RingKind::Circle { den_bound } => write!(f, "S1(den<={den_bound})"),
        }
    }
}

/// Value payload of a scalar.
///
/// For p-adic rings the value is kept as a normalized digit expansion
/// `sign * (b_0 + b_1 p + ... + b_N p^N) * p^shift` with digits in
/// `[0, p-1]` and `b_0 != 0`; this covers exactly the elements `Z[1/p]`
/// dense in the completion, and the valuation (hence the norm) is read
/// off the shift.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ScalarValue {
    Rational(Rat),
    PadicDigits { neg: bool, digits: Vec<u32>, shift: i64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scalar {
    value: ScalarValue,
    ring: BaseRing,
}

impl Scalar {
    /// Builds a scalar from an exact rational value, checking that the
    /// value is representable in the ring.
    pub fn from_rat(ring: &BaseRing, value: Rat) -> Result<Self, Error> {
        match &ring.kind {
            RingKind::IntAbs => {
                if !value.denom().is_one() {
                    return Err(Error::Domain(format!("{value} is not an integer")));
                }
            }
            RingKind::RatAbs => {}
            RingKind::Trivial { denominators } | RingKind::Localized { denominators, .. } => {
                if !denominator_supported(value.denom(), denominators) {
                    return Err(Error::Domain(format!(
                        "{value} is not in the localization at {denominators:?}"
                    )));
                }
            }
            RingKind::Padic { p, .. } => {
                let digits = rational_to_padic(&value, *p)?;
                return Ok(Scalar { value: digits, ring: ring.clone() });
            }
            RingKind::Circle { den_bound } => {
                let reduced = reduce_mod_one(&value);
                if reduced.denom() > &BigInt::from(*den_bound) {
                    return Err(Error::Domain(format!(
                        "denominator of {value} exceeds the circle bound {den_bound}"
                    )));
                }
                return Ok(Scalar { value: ScalarValue::Rational(reduced), ring: ring.clone() });
            }
        }
        Ok(Scalar { value: ScalarValue::Rational(value), ring: ring.clone() })
    }

    pub fn from_int(ring: &BaseRing, n: i64) -> Result<Self, Error> {
        Scalar::from_rat(ring, Rat::from_integer(BigInt::from(n)))
    }

    pub fn zero(ring: &BaseRing) -> Self {
        Scalar::from_rat(ring, Rat::zero()).expect("zero is representable everywhere")
    }

    pub fn one(ring: &BaseRing) -> Self {
        Scalar::from_rat(ring, Rat::one()).expect("one is representable everywhere")
    }

    pub fn ring(&self) -> &BaseRing {
        &self.ring
    }

    pub fn value(&self) -> &ScalarValue {
        &self.value
    }

    /// The exact rational value (circle scalars report the canonical
    /// representative in `[0, 1)`).
    pub fn to_rat(&self) -> Rat {
        match &self.value {
            ScalarValue::Rational(r) => r.clone(),
            ScalarValue::PadicDigits { neg, digits, shift } => {
                let p = match &self.ring.kind {
                    RingKind::Padic { p, .. } => *p,
                    _ => unreachable!("digit values only occur in p-adic rings"),
                };
                let mut acc = BigInt::zero();
                for &d in digits.iter().rev() {
                    acc = acc * BigInt::from(p) + BigInt::from(d);
                }
                let mut v = Rat::from_integer(acc);
                v *= rat_pow(&Rat::from_integer(BigInt::from(p)), *shift)
                    .expect("p > 0 so p^shift is defined");
                if *neg {
                    -v
                } else {
                    v
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.value {
            ScalarValue::Rational(r) => r.is_zero(),
            ScalarValue::PadicDigits { digits, .. } => digits.is_empty(),
        }
    }

    fn check_same_ring(&self, other: &Scalar) -> Result<(), Error> {
        if self.ring != other.ring {
            return Err(Error::Domain(format!(
                "ring mismatch: {} vs {}",
                self.ring, other.ring
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Scalar) -> Result<Scalar, Error> {
        self.check_same_ring(other)?;
        Scalar::from_rat(&self.ring, self.to_rat() + other.to_rat())
    }

    pub fn sub(&self, other: &Scalar) -> Result<Scalar, Error> {
        self.check_same_ring(other)?;
        Scalar::from_rat(&self.ring, self.to_rat() - other.to_rat())
    }

    pub fn neg(&self) -> Scalar {
        Scalar::from_rat(&self.ring, -self.to_rat()).expect("negation stays representable")
    }

    /// Ring multiplication. For the circle `R/Z` this is only the
    /// `Z`-module action: defined when one operand is an integer coset.
    pub fn mul(&self, other: &Scalar) -> Result<Scalar, Error> {
        self.check_same_ring(other)?;
        if let RingKind::Circle { .. } = self.ring.kind {
            let a = self.to_rat();
            let b = other.to_rat();
            if a.denom().is_one() || b.denom().is_one() {
                return Scalar::from_rat(&self.ring, a * b);
            }
            return Err(Error::Unsupported(
                "R/Z admits only the Z-module action, not a ring product".into(),
            ));
        }
        Scalar::from_rat(&self.ring, self.to_rat() * other.to_rat())
    }

    /// Exact norm enclosure (always a point interval on representable
    /// elements of the supported rings).
    pub fn norm(&self) -> NormValue {
        match (&self.ring.kind, &self.value) {
            (RingKind::IntAbs, ScalarValue::Rational(v))
            | (RingKind::RatAbs, ScalarValue::Rational(v))
            | (RingKind::Localized { mode: LocalizedMode::Absolute, .. }, ScalarValue::Rational(v)) => {
                NormValue::exact(v.abs())
            }
            (RingKind::Trivial { .. }, ScalarValue::Rational(v))
            | (RingKind::Localized { mode: LocalizedMode::Trivial, .. }, ScalarValue::Rational(v)) => {
                if v.is_zero() {
                    NormValue::zero()
                } else {
                    NormValue::exact(Rat::one())
                }
            }
            (RingKind::Padic { r, .. }, ScalarValue::PadicDigits { digits, shift, .. }) => {
                if digits.is_empty() {
                    NormValue::zero()
                } else {
                    NormValue::exact(rat_pow(r, *shift).expect("radius positive"))
                }
            }
            (RingKind::Circle { .. }, ScalarValue::Rational(v)) => {
                NormValue::exact(circle_distance(v))
            }
            _ => unreachable!("value payload always matches the ring kind"),
        }
    }
}

/// Distance of a rational to the nearest integer (the `R/Z` norm).
pub fn circle_distance(v: &Rat) -> Rat {
    let f = reduce_mod_one(v);
    let complement = Rat::one() - &f;
    f.min(complement)
}

fn reduce_mod_one(v: &Rat) -> Rat {
    let fl = v.floor();
    v - fl
}

fn denominator_supported(den: &BigInt, denominators: &[u64]) -> bool {
    let mut d = den.abs();
    for &q in denominators {
        let q = BigInt::from(q);
        loop {
            let (quo, rem) = d.div_rem(&q);
            if rem.is_zero() {
                d = quo;
            } else {
                break;
            }
        }
    }
    d.is_one()
}

/// Normalizes a rational into p-adic digit form `sign * m * p^shift` with
/// `p` not dividing `m`; errors when the denominator has a factor other
/// than `p` (such values are not finitely representable).
fn rational_to_padic(value: &Rat, p: u64) -> Result<ScalarValue, Error> {
    if value.is_zero() {
        return Ok(ScalarValue::PadicDigits { neg: false, digits: Vec::new(), shift: 0 });
    }
    let neg = value.is_negative();
    let v = value.abs();
    let pb = BigInt::from(p);
    let mut shift: i64 = 0;
    let mut num = v.numer().clone();
    let mut den = v.denom().clone();
    loop {
        let (quo, rem) = den.div_rem(&pb);
        if rem.is_zero() {
            den = quo;
            shift -= 1;
        } else {
            break;
        }
    }
    if !den.is_one() {
        return Err(Error::Domain(format!(
            "{value} has a denominator prime to {p}; not representable in the scaled {p}-adic ring"
        )));
    }
    loop {
        let (quo, rem) = num.div_rem(&pb);
        if rem.is_zero() {
            num = quo;
            shift += 1;
        } else {
            break;
        }
    }
    let mut digits = Vec::new();
    while !num.is_zero() {
        let (quo, rem) = num.div_rem(&pb);
        digits.push(rem.to_u32().expect("digit < p fits in u32"));
        num = quo;
    }
    Ok(ScalarValue::PadicDigits { neg, digits, shift })
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

// ---------------------------------------------------------------------------
// Ring axiom checking
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AxiomCheck {
    pub axiom: String,
    pub passed: bool,
    /// Witness values (as canonical rationals) on failure.
    pub witness: Option<Vec<String>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AxiomReport {
    pub ring: BaseRing,
    pub checks: Vec<AxiomCheck>,
    pub all_passed: bool,
}

/// Checks the normed-ring axioms on a finite sample set: definiteness,
/// the triangle inequality and submultiplicativity with constant `C`.
/// Failures are report entries with witnesses, never errors.
pub fn check_ring_axioms(ring: &BaseRing, samples: &[Scalar]) -> Result<AxiomReport, Error> {
    for s in samples {
        if s.ring() != ring {
            return Err(Error::Domain("sample from a different ring".into()));
        }
    }
    let mut checks = Vec::new();

    let zero = Scalar::zero(ring);
    checks.push(AxiomCheck {
        axiom: "norm(0) = 0".into(),
        passed: zero.norm() == NormValue::zero(),
        witness: None,
    });

    let mut definite = AxiomCheck { axiom: "norm(a) = 0 implies a = 0".into(), passed: true, witness: None };
    for a in samples {
        if a.norm().upper().is_zero() && !a.is_zero() {
            definite.passed = false;
            definite.witness = Some(vec![crate::rat::format_rat(&a.to_rat())]);
            break;
        }
    }
    checks.push(definite);

    let mut triangle = AxiomCheck { axiom: "norm(a+b) <= norm(a) + norm(b)".into(), passed: true, witness: None };
    let mut submult = AxiomCheck {
        axiom: format!("norm(ab) <= C norm(a) norm(b) with C = {}", ring.submult_constant),
        passed: true,
        witness: None,
    };
    for a in samples {
        for b in samples {
            if triangle.passed {
                if let Ok(sum) = a.add(b) {
                    if sum.norm().upper() > &(a.norm().upper() + b.norm().upper()) {
                        triangle.passed = false;
                        triangle.witness = Some(vec![
                            crate::rat::format_rat(&a.to_rat()),
                            crate::rat::format_rat(&b.to_rat()),
                        ]);
                    }
                }
            }
            if submult.passed {
                // circle products are partial; undefined pairs are skipped
                if let Ok(prod) = a.mul(b) {
                    let bound = &ring.submult_constant * a.norm().upper() * b.norm().upper();
                    if prod.norm().upper() > &bound {
                        submult.passed = false;
                        submult.witness = Some(vec![
                            crate::rat::format_rat(&a.to_rat()),
                            crate::rat::format_rat(&b.to_rat()),
                        ]);
                    }
                }
            }
        }
    }
    checks.push(triangle);
    checks.push(submult);

    let all_passed = checks.iter().all(|c| c.passed);
    Ok(AxiomReport { ring: ring.clone(), checks, all_passed })
}

// ---------------------------------------------------------------------------
// Serialization: the canonical scalar JSON
// ---------------------------------------------------------------------------

/// Canonical JSON form of a scalar: rational rings use
/// `{"ring": ..., "num": "...", "den": "..."}`, p-adic rings use
/// `{"ring": "padic", "p": ..., "r": "...", "digits": [...], "shift": ..., "neg": ...}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScalarJson {
    Padic {
        ring: String, // literal "padic"
        p: u64,
        r: String,
        digits: Vec<u32>,
        shift: i64,
        neg: bool,
    },
    Rational {
        ring: BaseRing,
        num: String,
        den: String,
    },
}

impl Scalar {
    pub fn to_json(&self) -> ScalarJson {
        match (&self.ring.kind, &self.value) {
            (RingKind::Padic { p, r }, ScalarValue::PadicDigits { neg, digits, shift }) => {
                ScalarJson::Padic {
                    ring: "padic".into(),
                    p: *p,
                    r: crate::rat::format_rat(r),
                    digits: digits.clone(),
                    shift: *shift,
                    neg: *neg,
                }
            }
            _ => {
                let v = self.to_rat();
                ScalarJson::Rational {
                    ring: self.ring.clone(),
                    num: v.numer().to_string(),
                    den: v.denom().to_string(),
                }
            }
        }
    }

    pub fn from_json(json: &ScalarJson) -> Result<Scalar, Error> {
        match json {
            ScalarJson::Padic { ring, p, r, digits, shift, neg } => {
                if ring != "padic" {
                    return Err(Error::Parse(format!("expected ring \"padic\", got {ring:?}")));
                }
                let ring = BaseRing::padic(*p, crate::rat::parse_rat(r)?)?;
                for (k, &d) in digits.iter().enumerate() {
                    if u64::from(d) >= *p {
                        return Err(Error::Validation(format!("digit {d} at position {k} is >= p = {p}")));
                    }
                }
                if let Some(&first) = digits.first() {
                    if first == 0 {
                        return Err(Error::Validation("leading digit of the shift part must be nonzero".into()));
                    }
                }
                let value = ScalarValue::PadicDigits { neg: *neg, digits: digits.clone(), shift: *shift };
                // round-trip through the rational value to renormalize
                let s = Scalar { value, ring: ring.clone() };
                Scalar::from_rat(&ring, s.to_rat())
            }
            ScalarJson::Rational { ring, num, den } => {
                let v = crate::rat::parse_rat(&format!("{num}/{den}"))?;
                Scalar::from_rat(ring, v)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{rat, rat_int};

    #[test]
    fn norm_examples() {
        // |-12| in Z_abs -> 12
        let z = BaseRing::int_abs();
        assert_eq!(Scalar::from_int(&z, -12).unwrap().norm(), NormValue::exact(rat_int(12)));
        // |0| -> 0 in any ring
        for ring in [
            BaseRing::int_abs(),
            BaseRing::rat_abs(),
            BaseRing::trivial(vec![]).unwrap(),
            BaseRing::padic(5, rat(1, 2)).unwrap(),
            BaseRing::circle(100).unwrap(),
        ] {
            assert_eq!(Scalar::zero(&ring).norm(), NormValue::zero());
        }
        // |100| in PAdicScaled(5, 1/2): 100 = 4 * 5^2 -> (1/2)^2 = 1/4
        let z5 = BaseRing::padic(5, rat(1, 2)).unwrap();
        assert_eq!(Scalar::from_int(&z5, 100).unwrap().norm(), NormValue::exact(rat(1, 4)));
    }

    #[test]
    fn padic_digit_normalization() {
        let z5 = BaseRing::padic(5, rat(1, 2)).unwrap();
        let s = Scalar::from_int(&z5, 100).unwrap();
        match s.value() {
            ScalarValue::PadicDigits { neg, digits, shift } => {
                assert!(!neg);
                assert_eq!(digits, &vec![4]);
                assert_eq!(*shift, 2);
            }
            _ => panic!("expected digit form"),
        }
        assert_eq!(s.to_rat(), rat_int(100));
        // negative and fractional (denominator a p-power) values round-trip
        let s = Scalar::from_rat(&z5, rat(-7, 25)).unwrap();
        assert_eq!(s.to_rat(), rat(-7, 25));
        assert_eq!(s.norm(), NormValue::exact(rat_int(4)));
        // denominator with a factor prime to p is rejected
        assert!(Scalar::from_rat(&z5, rat(1, 3)).is_err());
    }

    #[test]
    fn padic_mul_is_norm_multiplicative_on_p_powers() {
        let z5 = BaseRing::padic(5, rat(1, 2)).unwrap();
        for m in 0..5i64 {
            for n in 0..5i64 {
                let a = Scalar::from_int(&z5, 5i64.pow(m as u32)).unwrap();
                let b = Scalar::from_int(&z5, 5i64.pow(n as u32)).unwrap();
                let prod = a.mul(&b).unwrap();
                assert_eq!(prod.norm(), a.norm().mul(&b.norm()));
            }
        }
    }

    #[test]
    fn circle_norm_is_distance_to_nearest_integer() {
        let s1 = BaseRing::circle(1000).unwrap();
        let cases = [
            (rat(1, 5), rat(1, 5)),
            (rat(4, 5), rat(1, 5)),
            (rat(1, 2), rat(1, 2)),
            (rat(7, 3), rat(1, 3)),
            (rat(-1, 4), rat(1, 4)),
            (rat_int(3), rat_int(0)),
        ];
        for (v, want) in cases {
            assert_eq!(Scalar::from_rat(&s1, v).unwrap().norm(), NormValue::exact(want));
        }
    }

    #[test]
    fn ring_tag_is_preserved_and_mismatches_rejected() {
        let z = BaseRing::int_abs();
        let q = BaseRing::rat_abs();
        let a = Scalar::from_int(&z, 2).unwrap();
        let b = Scalar::from_int(&q, 2).unwrap();
        assert!(a.add(&b).is_err());
        assert_eq!(a.add(&a).unwrap().ring(), &z);
    }

    #[test]
    fn axioms_on_integers() {
        let z = BaseRing::int_abs();
        let samples: Vec<_> = (-3..=3).map(|n| Scalar::from_int(&z, n).unwrap()).collect();
        let report = check_ring_axioms(&z, &samples).unwrap();
        assert!(report.all_passed);
    }

    #[test]
    fn axioms_on_trivial_norm() {
        let ring = BaseRing::trivial(vec![]).unwrap();
        let samples: Vec<_> = [0, 1, 5].iter().map(|&n| Scalar::from_int(&ring, n).unwrap()).collect();
        let report = check_ring_axioms(&ring, &samples).unwrap();
        assert!(report.all_passed);
        for s in &samples {
            let n = s.norm();
            assert!(n == NormValue::zero() || n == NormValue::exact(rat_int(1)));
        }
    }

    #[test]
    fn axioms_on_padic_samples() {
        // submultiplicativity with C = 1: |5*5| = 1/4 = |5||5|
        let z5 = BaseRing::padic(5, rat(1, 2)).unwrap();
        let samples: Vec<_> =
            [1, 5, 25, 7].iter().map(|&n| Scalar::from_int(&z5, n).unwrap()).collect();
        let report = check_ring_axioms(&z5, &samples).unwrap();
        assert!(report.all_passed);
        let five = Scalar::from_int(&z5, 5).unwrap();
        assert_eq!(five.mul(&five).unwrap().norm(), NormValue::exact(rat(1, 4)));
    }

    #[test]
    fn localized_ring_membership() {
        let ring = BaseRing::localized(vec![2, 3], LocalizedMode::Absolute).unwrap();
        assert!(Scalar::from_rat(&ring, rat(5, 12)).is_ok());
        assert!(Scalar::from_rat(&ring, rat(1, 5)).is_err());
    }

    #[test]
    fn scalar_json_round_trip() {
        let z5 = BaseRing::padic(5, rat(1, 2)).unwrap();
        for v in [rat_int(100), rat(-7, 25), Rat::zero()] {
            let s = Scalar::from_rat(&z5, v).unwrap();
            let j = serde_json::to_string(&s.to_json()).unwrap();
            let back = Scalar::from_json(&serde_json::from_str(&j).unwrap()).unwrap();
            assert_eq!(back, s);
        }
        let q = BaseRing::rat_abs();
        let s = Scalar::from_rat(&q, rat(-3, 7)).unwrap();
        let j = serde_json::to_string(&s.to_json()).unwrap();
        assert_eq!(Scalar::from_json(&serde_json::from_str(&j).unwrap()).unwrap(), s);
    }
}
