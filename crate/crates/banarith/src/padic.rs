//! The `(x - p)` presentation of scaled p-adic rings.
//!
//! `Z{x/r}/(x - p)` is the completion of `Z` under `|a p^n| = r^n`; this
//! module implements the division algorithm of that presentation with its
//! explicit bound `1/(p - r)`, digit expansions with the lift bound
//! `(p-1)/(1-r) r^s`, rigorous quotient-norm intervals, Bezout
//! orthogonality witnesses, and the circle-coefficient kernel element.

use std::collections::BTreeMap;
use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::disks::{series_norm, DiskMode, PolydiskAlgebra, Series};
use crate::error::Error;
use crate::norm::NormValue;
use crate::rat::{rat_pow, serde_rat, Rat};
use crate::scalars::{circle_distance, is_prime, BaseRing, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PadicPresentation {
    pub p: u64,
    #[serde(with = "serde_rat")]
    pub r: Rat,
    pub working_degree: u32,
}

impl PadicPresentation {
    pub fn new(p: u64, r: Rat, working_degree: u32) -> Result<Self, Error> {
        if !is_prime(p) {
            return Err(Error::Domain(format!("{p} is not prime")));
        }
        if r <= Rat::zero() || r >= Rat::one() {
            return Err(Error::Domain(format!("radius must lie in (0,1), got {r}")));
        }
        Ok(PadicPresentation { p, r, working_degree })
    }

    /// The ambient algebra `Z{x/r}`.
    pub fn disk_algebra(&self) -> PolydiskAlgebra {
        PolydiskAlgebra::new(BaseRing::int_abs(), vec![self.r.clone()], DiskMode::Arch)
            .expect("radius validated")
    }

    /// The residue ring tag.
    pub fn residue_ring(&self) -> BaseRing {
        BaseRing::padic(self.p, self.r.clone()).expect("validated")
    }
}

fn integer_coeffs(b: &Series) -> Result<Vec<BigInt>, Error> {
    if b.algebra.arity() != 1 {
        return Err(Error::Domain("division needs a one-variable series".into()));
    }
    if !b.tail.upper().is_zero() {
        return Err(Error::Domain(
            "division needs an exact polynomial: nonzero tails are rejected".into(),
        ));
    }
    let deg = b.coeffs.keys().map(|i| i[0] as usize).max().unwrap_or(0);
    let mut out = vec![BigInt::zero(); deg + 1];
    for (idx, c) in &b.coeffs {
        let v = c.to_rat();
        if !v.denom().is_one() {
            return Err(Error::Domain(format!("coefficient {v} is not an integer")));
        }
        out[idx[0] as usize] = v.numer().clone();
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct DivisionResult {
    pub quotient: Series,
    pub quotient_norm: NormValue,
    pub dividend_norm: NormValue,
    /// `||b|| / (p - r)`, the verified bound on `||a||`.
    pub bound: Rat,
}

/// Divides `b` by `(x - p)` in `Z{x/r}`: requires `b(p) = 0` exactly,
/// returns the integer-coefficient quotient `a` with `(x - p) a = b` and
/// the verified strictness bound `||a|| <= ||b|| / (p - r)`.
pub fn divide_by_x_minus_p(b: &Series, pres: &PadicPresentation) -> Result<DivisionResult, Error> {
    if b.algebra.ring != BaseRing::int_abs() {
        return Err(Error::Domain("division runs over the integer disk algebra".into()));
    }
    if b.algebra.radii[0] != pres.r {
        return Err(Error::Domain("series radius does not match the presentation".into()));
    }
    let coeffs = integer_coeffs(b)?;
    let p = BigInt::from(pres.p);
    // synthetic division from the top: a_{i-1} = b_i + p a_i
    let n = coeffs.len();
    let mut a = vec![BigInt::zero(); n.saturating_sub(1)];
    let mut carry = BigInt::zero();
    for i in (1..n).rev() {
        carry = &coeffs[i] + &p * &carry;
        a[i - 1] = carry.clone();
    }
    let remainder = &coeffs.first().cloned().unwrap_or_default() + &p * &carry;
    if !remainder.is_zero() {
        return Err(Error::NotInIdeal { remainder });
    }
    // re-multiplication oracle on the raw integer vectors: (x - p) a = b
    let mut check = vec![BigInt::zero(); a.len() + 1];
    for (i, ai) in a.iter().enumerate() {
        check[i + 1] += ai;
        check[i] -= &p * ai;
    }
    while check.len() > coeffs.len() && check.last().is_some_and(BigInt::is_zero) {
        check.pop();
    }
    if check != coeffs {
        return Err(Error::Internal("division failed the re-multiplication check".into()));
    }
    let alg = b.algebra.clone();
    let mut qmap = BTreeMap::new();
    for (i, c) in a.iter().enumerate() {
        if !c.is_zero() {
            qmap.insert(vec![i as u32], Scalar::from_rat(&alg.ring, Rat::from_integer(c.clone()))?);
        }
    }
    let quotient = Series::new(alg, qmap, NormValue::zero())?;
    // l1 norms directly off the integer vectors (equal to series_norm)
    let weighted_l1 = |v: &[BigInt]| -> Rat {
        let mut acc = Rat::zero();
        let mut w = Rat::one();
        for c in v {
            if !c.is_zero() {
                acc += Rat::from_integer(c.abs()) * &w;
            }
            w *= &pres.r;
        }
        acc
    };
    let quotient_norm = NormValue::exact(weighted_l1(&a));
    let dividend_norm = NormValue::exact(weighted_l1(&coeffs));
    let bound = dividend_norm.upper() / (Rat::from_integer(pres.p.into()) - &pres.r);
    if quotient_norm.upper() > &bound {
        return Err(Error::Internal(format!(
            "division bound violated: ||a|| = {} > {}",
            quotient_norm.upper(),
            bound
        )));
    }
    Ok(DivisionResult { quotient, quotient_norm, dividend_norm, bound })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Expansion {
    pub digits: Vec<u32>,
    pub shift: u32,
    pub neg: bool,
    pub norm: NormValue,
    /// `l1` norm of the canonical lift `sum b_i x^{s+i}`.
    #[serde(with = "serde_rat")]
    pub lift_norm: Rat,
    /// `(p-1)/(1-r) * r^s`, the verified bound on the lift norm.
    #[serde(with = "serde_rat")]
    pub lift_bound: Rat,
}

/// Base-`p` digit expansion of a nonzero integer `n = sign * m * p^s`
/// with `p` not dividing `m`: digits of `m`, the valuation `s`, the exact
/// residue norm `r^s`, and the canonical-lift bound. `n = 0` returns the
/// empty expansion of norm 0.
pub fn padic_expand(n: &BigInt, pres: &PadicPresentation) -> Result<Expansion, Error> {
    if n.is_zero() {
        return Ok(Expansion {
            digits: Vec::new(),
            shift: 0,
            neg: false,
            norm: NormValue::zero(),
            lift_norm: Rat::zero(),
            lift_bound: Rat::zero(),
        });
    }
    let p = BigInt::from(pres.p);
    let neg = n.is_negative();
    let mut m = n.abs();
    let mut shift = 0u32;
    loop {
        let (q, rem) = m.div_rem(&p);
        if rem.is_zero() {
            m = q;
            shift += 1;
        } else {
            break;
        }
    }
    let mut digits = Vec::new();
    let mut lift_norm = Rat::zero();
    let rs = rat_pow(&pres.r, shift as i64)?;
    let mut w = rs.clone();
    while !m.is_zero() {
        let (q, rem) = m.div_rem(&p);
        let d = rem.to_u32().expect("digit < p");
        digits.push(d);
        lift_norm += Rat::from_integer(d.into()) * &w;
        w *= &pres.r;
        m = q;
    }
    let lift_bound =
        Rat::from_integer((pres.p - 1).into()) / (Rat::one() - &pres.r) * &rs;
    if lift_norm > lift_bound {
        return Err(Error::Internal("expansion lift bound violated".into()));
    }
    Ok(Expansion { digits, shift, neg, norm: NormValue::exact(rs), lift_norm, lift_bound })
}

/// Rigorous interval for the quotient norm of the image of `n` in
/// `Z{x/r}/(x - p)`: the residue norm `r^{v_p(n)}` from below, and from
/// above the cheapest lift found among all integer polynomials of degree
/// `<= search_degree` with digits in `(-p, p)` evaluating to `n` at `p`
/// (best-effort tightening; every candidate is a genuine lift).
pub fn quotient_norm_bounds(
    n: &BigInt,
    pres: &PadicPresentation,
    search_degree: u32,
) -> Result<NormValue, Error> {
    if n.is_zero() {
        return Ok(NormValue::zero());
    }
    let expansion = padic_expand(n, pres)?;
    let lower = expansion.norm.lower().clone();
    let mut upper = expansion.lift_norm.clone();

    // digit DP: cost(v, i) = min over d = v mod p in (-p, p) of
    // |d| r^i + cost((v - d)/p, i+1)
    let mut memo: HashMap<(BigInt, u32), Option<Rat>> = HashMap::new();
    fn cost(
        v: &BigInt,
        i: u32,
        max_i: u32,
        p: u64,
        r: &Rat,
        memo: &mut HashMap<(BigInt, u32), Option<Rat>>,
    ) -> Option<Rat> {
        if v.is_zero() {
            return Some(Rat::zero());
        }
        if i > max_i {
            return None;
        }
        if let Some(c) = memo.get(&(v.clone(), i)) {
            return c.clone();
        }
        let pb = BigInt::from(p);
        let rem = v.mod_floor(&pb).to_i64().expect("0 <= rem < p fits");
        let mut best: Option<Rat> = None;
        for d in [rem, rem - p as i64] {
            if d.unsigned_abs() >= p && p > 1 {
                // digits range over (-p, p); for p = 2 this keeps {-1, 0, 1}
                if d.unsigned_abs() > p - 1 {
                    continue;
                }
            }
            let next = (v - BigInt::from(d)) / &pb;
            if let Some(rest) = cost(&next, i + 1, max_i, p, r, memo) {
                let here = Rat::from_integer(d.abs().into())
                    * rat_pow(r, i as i64).expect("positive radius")
                    + rest;
                if best.as_ref().is_none_or(|b| here < *b) {
                    best = Some(here);
                }
            }
        }
        memo.insert((v.clone(), i), best.clone());
        best
    }
    if let Some(found) = cost(n, 0, search_degree, pres.p, &pres.r, &mut memo) {
        if found < upper {
            upper = found;
        }
    }
    if upper < lower {
        return Err(Error::Internal(
            "lift search produced a norm below the residue lower bound".into(),
        ));
    }
    NormValue::new(lower, upper)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BezoutCert {
    #[serde(with = "serde_bigint")]
    pub a: BigInt,
    #[serde(with = "serde_bigint")]
    pub b: BigInt,
    pub n: u32,
    /// `p^{-n} + q^{-n}`, the norm bound this witness certifies for
    /// `1 (x) 1` in the tensor of the two completions.
    #[serde(with = "serde_rat")]
    pub bound: Rat,
}

/// Serde adapter: big integers as decimal strings.
pub mod serde_bigint {
    use super::*;
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&x.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(|_| de::Error::custom(format!("invalid integer {s:?}")))
    }
}

/// Extended-Euclid witness `a p^n + b q^n = 1` for distinct primes,
/// verified exactly, with the orthogonality bound `p^{-n} + q^{-n}`.
pub fn bezout_orthogonality(p: u64, q: u64, n: u32) -> Result<BezoutCert, Error> {
    if p == q {
        return Err(Error::Domain("the primes must be distinct".into()));
    }
    if !is_prime(p) || !is_prime(q) {
        return Err(Error::Domain(format!("{p} and {q} must both be prime")));
    }
    if n == 0 {
        return Err(Error::Domain("the exponent must be at least 1".into()));
    }
    let pn = BigInt::from(p).pow(n);
    let qn = BigInt::from(q).pow(n);
    let ext = pn.extended_gcd(&qn);
    if !ext.gcd.is_one() {
        return Err(Error::Internal("coprime powers reported gcd != 1".into()));
    }
    let (a, b) = (ext.x, ext.y);
    if &a * &pn + &b * &qn != BigInt::one() {
        return Err(Error::Internal("Bezout identity failed verification".into()));
    }
    let bound = rat_pow(&Rat::from_integer(p.into()), -(n as i64))?
        + rat_pow(&Rat::from_integer(q.into()), -(n as i64))?;
    Ok(BezoutCert { a, b, n, bound })
}

/// Norm on the tensor of two scaled `p`-adic completions at the same
/// prime: the combined radius is `min(r1, r2)` (the larger exponent wins).
pub fn zp_tensor_norm(p: u64, r1: &Rat, r2: &Rat) -> Result<BaseRing, Error> {
    let r = if r1 <= r2 { r1.clone() } else { r2.clone() };
    BaseRing::padic(p, r)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct S1Report {
    /// Partial sum of the truncated norm at degree `N`.
    #[serde(with = "serde_rat")]
    pub partial: Rat,
    /// Geometric bound on the omitted terms.
    #[serde(with = "serde_rat")]
    pub tail_bound: Rat,
    pub enclosure: NormValue,
    /// Closed form of the summation, `p / (p^2 - 1)`.
    #[serde(with = "serde_rat")]
    pub closed_form: Rat,
    /// The figure stated alongside the example in the source material.
    #[serde(with = "serde_rat")]
    pub stated_value: Rat,
    /// True when the closed form of the direct summation differs from
    /// the stated figure; reported, never asserted.
    pub discrepancy: bool,
    /// Norm of the boundary term left by `(x - p)` on the truncation.
    #[serde(with = "serde_rat")]
    pub boundary_norm: Rat,
}

/// Exact `l1` norm data of the degree-`N` truncation of
/// `(1/p) sum_i (x/p)^i` in the circle-coefficient algebra of radius
/// `1/p`: coefficient `i` is the coset of `p^{-(i+1)}` with circle norm
/// equal to its distance to the nearest integer, weighted by `p^{-i}`.
/// Also verifies that `(x - p)` annihilates the truncation up to the
/// single boundary term of degree `N + 1`.
pub fn s1_kernel_element_norm(p: u64, n_trunc: u32) -> Result<S1Report, Error> {
    if !is_prime(p) {
        return Err(Error::Domain(format!("{p} is not prime")));
    }
    let pr = Rat::from_integer(p.into());
    let inv_p = pr.recip();
    // u_i = p^{-(i+1)} as a coset; weight p^{-i}
    let mut partial = Rat::zero();
    let mut coefficients = Vec::new();
    for i in 0..=n_trunc {
        let c = rat_pow(&inv_p, i as i64 + 1)?;
        partial += circle_distance(&c) * rat_pow(&inv_p, i as i64)?;
        coefficients.push(c);
    }
    // sum_{i > N} p^{-(2i+1)} = p^{-(2N+3)} / (1 - p^{-2})
    let tail_bound =
        rat_pow(&inv_p, 2 * n_trunc as i64 + 3)? / (Rat::one() - rat_pow(&inv_p, 2)?);
    let enclosure = NormValue::new(partial.clone(), &partial + &tail_bound)?;
    let closed_form = &pr / (&pr * &pr - Rat::one());
    let stated_value = (pr.clone() - Rat::one()).recip();
    if !enclosure.contains(&closed_form) && *enclosure.lower() <= closed_form {
        return Err(Error::Internal("closed form escaped the enclosure".into()));
    }

    // (x - p) u on the truncation: coefficient at degree 0 is
    // -p * p^{-1} = -1, an integer coset, hence zero in R/Z; degrees
    // 1..N telescope to integer cosets; degree N+1 is the boundary term.
    for i in 0..=n_trunc {
        let shifted = if i == 0 { Rat::zero() } else { coefficients[i as usize - 1].clone() };
        let val = shifted - &pr * &coefficients[i as usize];
        if !circle_distance(&val).is_zero() {
            return Err(Error::Internal(format!(
                "(x - p) failed to annihilate the truncation at degree {i}"
            )));
        }
    }
    let boundary_coeff = circle_distance(&coefficients[n_trunc as usize]);
    let boundary_norm = boundary_coeff * rat_pow(&inv_p, n_trunc as i64 + 1)?;
    Ok(S1Report {
        partial,
        tail_bound,
        enclosure,
        discrepancy: closed_form != stated_value,
        closed_form,
        stated_value,
        boundary_norm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{rat, rat_int};
    use crate::scalars::RingKind;

    fn pres(p: u64, num: i64, den: i64) -> PadicPresentation {
        PadicPresentation::new(p, rat(num, den), 16).unwrap()
    }

    #[test]
    fn divide_examples() {
        // p = 5, r = 1/2, b = x - 5 -> a = 1 with ||a|| = 1 <= (11/2)/(9/2)
        let pr = pres(5, 1, 2);
        let b = Series::from_int_coeffs(&pr.disk_algebra(), &[-5, 1]).unwrap();
        let res = divide_by_x_minus_p(&b, &pr).unwrap();
        assert_eq!(res.quotient.coeff(&vec![0]).unwrap().to_rat(), rat_int(1));
        assert_eq!(res.quotient_norm, NormValue::exact(rat_int(1)));
        assert_eq!(res.bound, rat(11, 9));
        // b = 0 -> a = 0
        let z = Series::zero(&pr.disk_algebra());
        assert!(divide_by_x_minus_p(&z, &pr).unwrap().quotient.is_zero());
        // p = 2, r = 1/2, b = (x-2)(1+x) = -2 - x + x^2 -> a = 1 + x
        let pr = pres(2, 1, 2);
        let b = Series::from_int_coeffs(&pr.disk_algebra(), &[-2, -1, 1]).unwrap();
        let res = divide_by_x_minus_p(&b, &pr).unwrap();
        assert_eq!(res.quotient.coeff(&vec![0]).unwrap().to_rat(), rat_int(1));
        assert_eq!(res.quotient.coeff(&vec![1]).unwrap().to_rat(), rat_int(1));
        assert_eq!(res.quotient_norm, NormValue::exact(rat(3, 2)));
        assert_eq!(res.bound, rat(11, 4) / rat(3, 2));
        // non-members report the remainder
        let b = Series::from_int_coeffs(&pr.disk_algebra(), &[1]).unwrap();
        match divide_by_x_minus_p(&b, &pr) {
            Err(Error::NotInIdeal { remainder }) => assert_eq!(remainder, BigInt::one()),
            other => panic!("expected NotInIdeal, got {other:?}"),
        }
    }

    #[test]
    fn divide_round_trip_property() {
        // (x - p) a followed by division recovers a, and the bound holds
        let pr = pres(3, 1, 2);
        let alg = pr.disk_algebra();
        let xmp = Series::from_int_coeffs(&alg, &[-3, 1]).unwrap();
        for coeffs in [[1i64, 0, 2], [-2, 1, -1], [0, 0, 1], [2, 2, 2]] {
            let a = Series::from_int_coeffs(&alg, &coeffs).unwrap();
            let b = crate::disks::mul(&xmp, &a, None).unwrap();
            let res = divide_by_x_minus_p(&b, &pr).unwrap();
            assert_eq!(res.quotient.coeffs, a.coeffs);
        }
    }

    #[test]
    fn expand_examples() {
        // n = 7, p = 2, r = 1/2: digits (1,1,1), s = 0, norm 1, lift 7/4 <= 2
        let pr = pres(2, 1, 2);
        let e = padic_expand(&BigInt::from(7), &pr).unwrap();
        assert_eq!(e.digits, vec![1, 1, 1]);
        assert_eq!(e.shift, 0);
        assert_eq!(e.norm, NormValue::exact(rat_int(1)));
        assert_eq!(e.lift_norm, rat(7, 4));
        assert_eq!(e.lift_bound, rat_int(2));
        // n = p^k: single digit at shift k, norm r^k
        let pr5 = pres(5, 1, 2);
        let e = padic_expand(&BigInt::from(125), &pr5).unwrap();
        assert_eq!(e.digits, vec![1]);
        assert_eq!(e.shift, 3);
        assert_eq!(e.norm, NormValue::exact(rat(1, 8)));
        // the norm is sign-blind
        let e = padic_expand(&BigInt::from(-7), &pr).unwrap();
        assert!(e.neg);
        assert_eq!(e.norm, NormValue::exact(rat_int(1)));
        // zero
        let e = padic_expand(&BigInt::zero(), &pr).unwrap();
        assert!(e.digits.is_empty());
        assert_eq!(e.norm, NormValue::zero());
    }

    #[test]
    fn quotient_norm_examples() {
        // n = 1: exactly 1
        let pr = pres(5, 1, 2);
        let b = quotient_norm_bounds(&BigInt::one(), &pr, 8).unwrap();
        assert_eq!(b, NormValue::exact(rat_int(1)));
        // n = p: the lift x gives exactly r
        let b = quotient_norm_bounds(&BigInt::from(5), &pr, 8).unwrap();
        assert_eq!(b, NormValue::exact(rat(1, 2)));
        // n = 7, p = 2: lower 1; the expansion lift gives 7/4, and the
        // signed-digit lift x^3 - 1 tightens the upper bound to 9/8
        let pr2 = pres(2, 1, 2);
        let b = quotient_norm_bounds(&BigInt::from(7), &pr2, 8).unwrap();
        assert_eq!(b.lower(), &rat_int(1));
        assert_eq!(b.upper(), &rat(9, 8));
        // the upper bound never exceeds the expansion lift bound
        let e = padic_expand(&BigInt::from(7), &pr2).unwrap();
        assert!(b.upper() <= &e.lift_bound);
    }

    #[test]
    fn bezout_examples() {
        // p = 2, q = 3, n = 2: (-2) 4 + 1 * 9 = 1, bound 13/36
        let c = bezout_orthogonality(2, 3, 2).unwrap();
        assert_eq!(c.a, BigInt::from(-2));
        assert_eq!(c.b, BigInt::from(1));
        assert_eq!(c.bound, rat(13, 36));
        // n = 1: (-1) 2 + 1 * 3 = 1, bound 5/6
        let c = bezout_orthogonality(2, 3, 1).unwrap();
        assert_eq!(c.a, BigInt::from(-1));
        assert_eq!(c.b, BigInt::from(1));
        assert_eq!(c.bound, rat(5, 6));
        // n = 20: the bound collapses below 10^-6
        let c = bezout_orthogonality(2, 3, 20).unwrap();
        assert!(c.bound < rat(1, 1_000_000));
        assert!(bezout_orthogonality(3, 3, 1).is_err());
    }

    #[test]
    fn tensor_norm_takes_min_radius() {
        let t = zp_tensor_norm(5, &rat(1, 2), &rat(1, 4)).unwrap();
        assert_eq!(t.kind, RingKind::Padic { p: 5, r: rat(1, 4) });
        let t = zp_tensor_norm(5, &rat(1, 3), &rat(1, 3)).unwrap();
        assert_eq!(t.kind, RingKind::Padic { p: 5, r: rat(1, 3) });
        let t = zp_tensor_norm(3, &rat(1, 2), &rat(1, 3)).unwrap();
        assert_eq!(t.kind, RingKind::Padic { p: 3, r: rat(1, 3) });
    }

    #[test]
    fn s1_examples() {
        // p = 5, N = 0: a single term 1/5 * 1
        let rep = s1_kernel_element_norm(5, 0).unwrap();
        assert_eq!(rep.partial, rat(1, 5));
        // p = 5, N = 3: partial = sum_{i<=3} 5^{-(i+1)} 5^{-i}
        let rep = s1_kernel_element_norm(5, 3).unwrap();
        let expected = rat(1, 5) + rat(1, 125) + rat(1, 3125) + rat(1, 78125);
        assert_eq!(rep.partial, expected);
        // the enclosure brackets the closed form and flags the stated value
        let rep = s1_kernel_element_norm(2, 30).unwrap();
        assert_eq!(rep.closed_form, rat(2, 3));
        assert_eq!(rep.stated_value, rat_int(1));
        assert!(rep.enclosure.contains(&rep.closed_form));
        assert!(rep.discrepancy);
    }

    #[test]
    fn s1_partial_sums_are_monotone_and_converge() {
        let mut prev = Rat::zero();
        for n in 0..12 {
            let rep = s1_kernel_element_norm(3, n).unwrap();
            assert!(rep.partial >= prev);
            assert!(rep.enclosure.contains(&rep.closed_form));
            prev = rep.partial;
        }
    }
}
