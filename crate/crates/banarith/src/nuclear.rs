//! Nuclear-morphism certificates.
//!
//! A certificate is a finite bilinear representation `sum_s w_s (x) alpha_s`
//! of a bounded map, with the value `L = sum_s ||w_s|| ||alpha_s||` kept as
//! an exact enclosure (explicit terms are exact, infinitely many remaining
//! terms enter through a closed-form or ratio-bounded tail). Certification
//! is one-sided: the library returns a certificate, a proof of divergence
//! (terms bounded away from zero by a structural tail rule), or `Unknown`;
//! a truncation alone never yields a negative verdict.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};

use crate::error::Error;
use crate::norm::NormValue;
use crate::rat::{rat_pow, Rat};
use crate::scalars::{BaseRing, Scalar};
use crate::spaces::{
    tensor_l1, IndexWeights, MultiIndex, SeqMode, SpaceDescriptor, TailRule, WeightFunction,
};

pub type Coeffs = BTreeMap<MultiIndex, Scalar>;

/// Norm of a finitely supported element against a descriptor; exact.
pub fn element_norm(coeffs: &Coeffs, space: &SpaceDescriptor) -> Result<NormValue, Error> {
    let mut acc = NormValue::zero();
    for (idx, c) in coeffs {
        let w = space
            .weight(idx)
            .ok_or_else(|| Error::Domain(format!("weight undefined at {idx:?}")))?;
        let term = c.norm().scale(&w)?;
        acc = match space.mode {
            SeqMode::SumL1 => acc.add(&term),
            SeqMode::SupLinf => acc.join_max(&term),
        };
    }
    Ok(acc)
}

/// Dual norm of a finite functional row against its domain descriptor:
/// `sup_j |a_j| / w(j)` over an `l1` domain, `sum_j |a_j| / w(j)` over an
/// `l-infinity` domain.
pub fn functional_norm(row: &Coeffs, domain: &SpaceDescriptor) -> Result<NormValue, Error> {
    let mut acc = NormValue::zero();
    for (idx, c) in row {
        let w = domain
            .weight(idx)
            .ok_or_else(|| Error::Domain(format!("weight undefined at {idx:?}")))?;
        let term = c.norm().scale(&w.recip())?;
        acc = match domain.mode {
            SeqMode::SumL1 => acc.join_max(&term),
            SeqMode::SupLinf => acc.add(&term),
        };
    }
    Ok(acc)
}

// ---------------------------------------------------------------------------
// Bounded maps
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub enum MapAction {
    /// `e_s -> entries[s] e_s`; missing entries are zero.
    Diagonal { entries: BTreeMap<MultiIndex, Scalar> },
    /// `e_s -> column[s]`, a column-finite matrix.
    ColumnFinite { columns: BTreeMap<MultiIndex, Coeffs> },
    /// One-dimensional shift `e_i -> e_{i+1}`.
    Shift,
    /// Composition, applied left to right.
    Composite { stages: Vec<BoundedMap> },
}

#[derive(Debug, Clone)]
pub struct BoundedMap {
    pub domain: SpaceDescriptor,
    pub codomain: SpaceDescriptor,
    pub action: MapAction,
    /// Verified upper bound for `||f(e_s)|| / ||e_s||` over the checked
    /// basis indices of the finite presentation.
    pub bound: NormValue,
}

impl BoundedMap {
    /// Builds a map and verifies the declared bound on the given basis
    /// indices (exact rational comparisons).
    pub fn new(
        domain: SpaceDescriptor,
        codomain: SpaceDescriptor,
        action: MapAction,
        declared_bound: Rat,
        check_indices: &[MultiIndex],
    ) -> Result<Self, Error> {
        let map = BoundedMap {
            domain,
            codomain,
            action,
            bound: NormValue::upper_bound(declared_bound.clone()),
        };
        for idx in check_indices {
            let image = map.apply_basis(idx)?;
            let num = element_norm(&image, &map.codomain)?;
            let den = map
                .domain
                .weight(idx)
                .ok_or_else(|| Error::Domain(format!("weight undefined at {idx:?}")))?;
            if num.upper() > &(&declared_bound * &den) {
                return Err(Error::Validation(format!(
                    "declared bound {declared_bound} violated at basis index {idx:?}"
                )));
            }
        }
        Ok(map)
    }

    /// Identity with bound 1 on a descriptor.
    pub fn identity(space: &SpaceDescriptor, check_indices: &[MultiIndex]) -> Result<Self, Error> {
        let entries = check_indices
            .iter()
            .map(|i| (i.clone(), Scalar::one(&space.ring)))
            .collect();
        BoundedMap::new(
            space.clone(),
            space.clone(),
            MapAction::Diagonal { entries },
            Rat::one(),
            check_indices,
        )
    }

    pub fn apply_basis(&self, idx: &MultiIndex) -> Result<Coeffs, Error> {
        let unit = Scalar::one(&self.domain.ring);
        let mut v = BTreeMap::new();
        v.insert(idx.clone(), unit);
        self.apply(&v)
    }

    pub fn apply(&self, v: &Coeffs) -> Result<Coeffs, Error> {
        match &self.action {
            MapAction::Diagonal { entries } => {
                let mut out = BTreeMap::new();
                for (idx, c) in v {
                    if let Some(e) = entries.get(idx) {
                        let prod = e.mul(c)?;
                        if !prod.is_zero() {
                            out.insert(idx.clone(), prod);
                        }
                    }
                }
                Ok(out)
            }
            MapAction::ColumnFinite { columns } => {
                let mut out: Coeffs = BTreeMap::new();
                for (idx, c) in v {
                    if c.is_zero() {
                        continue;
                    }
                    if let Some(col) = columns.get(idx) {
                        for (row, entry) in col {
                            let prod = entry.mul(c)?;
                            match out.remove(row) {
                                None => {
                                    if !prod.is_zero() {
                                        out.insert(row.clone(), prod);
                                    }
                                }
                                Some(prev) => {
                                    let sum = prev.add(&prod)?;
                                    if !sum.is_zero() {
                                        out.insert(row.clone(), sum);
                                    }
                                }
                            }
                        }
                    }
                }
                Ok(out)
            }
            MapAction::Shift => {
                let mut out = BTreeMap::new();
                for (idx, c) in v {
                    if idx.len() != 1 {
                        return Err(Error::Domain("shift acts on 1-dimensional index sets".into()));
                    }
                    out.insert(vec![idx[0] + 1], c.clone());
                }
                Ok(out)
            }
            MapAction::Composite { stages } => {
                let mut cur = v.clone();
                for stage in stages {
                    cur = stage.apply(&cur)?;
                }
                Ok(cur)
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Certificates
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct CertTerm {
    /// Codomain element.
    pub w: Coeffs,
    /// Domain functional as a finite weighted coefficient row.
    pub alpha: Coeffs,
}

#[derive(Debug, Clone)]
pub struct NuclearCert {
    pub domain: SpaceDescriptor,
    pub codomain: SpaceDescriptor,
    pub terms: Vec<CertTerm>,
    /// `sum_s ||w_s|| ||alpha_s||` over the explicit terms plus the tail.
    pub l_value: NormValue,
    pub tail: NormValue,
}

impl NuclearCert {
    /// Assembles a certificate, computing `L` from the terms and tail.
    pub fn assemble(
        domain: SpaceDescriptor,
        codomain: SpaceDescriptor,
        terms: Vec<CertTerm>,
        tail: NormValue,
    ) -> Result<Self, Error> {
        let mut l = NormValue::zero();
        for t in &terms {
            let wn = element_norm(&t.w, &codomain)?;
            let an = functional_norm(&t.alpha, &domain)?;
            l = l.add(&wn.mul(&an));
        }
        l = l.add(&tail);
        Ok(NuclearCert { domain, codomain, terms, l_value: l, tail })
    }

    /// Applies `sum_s w_s alpha_s(-)` to an element.
    pub fn apply(&self, v: &Coeffs) -> Result<Coeffs, Error> {
        let mut out: Coeffs = BTreeMap::new();
        for t in &self.terms {
            // alpha(v) = sum_j alpha_j v_j
            let mut aval = Scalar::zero(&self.domain.ring);
            for (idx, a) in &t.alpha {
                if let Some(c) = v.get(idx) {
                    aval = aval.add(&a.mul(c)?)?;
                }
            }
            if aval.is_zero() {
                continue;
            }
            for (row, wv) in &t.w {
                let prod = wv.mul(&aval)?;
                match out.remove(row) {
                    None => {
                        if !prod.is_zero() {
                            out.insert(row.clone(), prod);
                        }
                    }
                    Some(prev) => {
                        let sum = prev.add(&prod)?;
                        if !sum.is_zero() {
                            out.insert(row.clone(), sum);
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn apply_basis(&self, idx: &MultiIndex) -> Result<Coeffs, Error> {
        let mut v = BTreeMap::new();
        v.insert(idx.clone(), Scalar::one(&self.domain.ring));
        self.apply(&v)
    }

    /// Exact reproduction check against a bounded map on basis vectors.
    pub fn reproduces(&self, map: &BoundedMap, check_indices: &[MultiIndex]) -> Result<bool, Error> {
        for idx in check_indices {
            if self.apply_basis(idx)? != map.apply_basis(idx)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Sum of two certificates for maps with the same shape; `L` adds.
pub fn concat_certs(a: &NuclearCert, b: &NuclearCert) -> Result<NuclearCert, Error> {
    if a.domain != b.domain || a.codomain != b.codomain {
        return Err(Error::Domain("certificate shapes do not match".into()));
    }
    let mut terms = a.terms.clone();
    terms.extend(b.terms.iter().cloned());
    NuclearCert::assemble(a.domain.clone(), a.codomain.clone(), terms, a.tail.add(&b.tail))
}

// ---------------------------------------------------------------------------
// Diagonal nuclearity between disk algebras
// ---------------------------------------------------------------------------

/// Diagonal entries `a_0 .. a_N` plus an optional closed-form rule for
/// the entries beyond the stored head.
#[derive(Debug, Clone)]
pub struct DiagonalEntries {
    pub head: Vec<Rat>,
    pub tail: Option<TailRule>,
}

impl DiagonalEntries {
    pub fn unit(n: usize) -> Self {
        DiagonalEntries {
            head: vec![Rat::one(); n + 1],
            tail: Some(TailRule::TableConst { from: 0, value: Rat::one() }),
        }
    }
}

#[derive(Debug, Clone)]
pub enum DiagonalVerdict {
    Nuclear { l: NormValue, cert: NuclearCert },
    /// The structural tail rule keeps the terms bounded away from zero.
    NotNuclear { reason: String },
    /// The truncation alone cannot decide; the partial sum is reported.
    Unknown { partial: Rat },
}

/// One-variable seq-space view of the disk algebra of radius `rho`.
fn disk_space(ring: &BaseRing, rho: &Rat, label: &str) -> SpaceDescriptor {
    SpaceDescriptor::line(
        ring.clone(),
        label,
        SeqMode::SumL1,
        WeightFunction::geometric(rho.clone()).expect("positive radius"),
    )
}

/// Nuclear norm of the diagonal map `x^i -> a_i x^i` from the radius-`tau`
/// disk algebra to the radius-`rho` one: the exact enclosure of
/// `sum_i |a_i| (rho/tau)^i`. Geometric and eventually-constant tails
/// close in exact form; polynomial tails get a ratio-test bound; a tail
/// rule whose terms provably stay bounded away from zero yields the
/// divergence verdict, and a missing rule yields `Unknown`.
pub fn nuclear_norm_diagonal(
    entries: &DiagonalEntries,
    tau: &Rat,
    rho: &Rat,
    n: u32,
) -> Result<DiagonalVerdict, Error> {
    if *tau <= Rat::zero() || *rho <= Rat::zero() {
        return Err(Error::Domain("radii must be positive".into()));
    }
    let x = rho / tau;
    let ring = BaseRing::rat_abs();
    let m = (n as usize).max(entries.head.len().saturating_sub(1));
    let entry = |i: usize| -> Option<Rat> {
        if i < entries.head.len() {
            Some(entries.head[i].clone())
        } else {
            entries.tail.as_ref().map(|t| match t {
                TailRule::Geometric { base, scale } => {
                    scale * rat_pow(base, i as i64).expect("positive base")
                }
                TailRule::TableConst { value, .. } => value.clone(),
                TailRule::Polynomial { coeffs } => {
                    let xi = Rat::from_integer((i as u64).into());
                    coeffs.iter().rev().fold(Rat::zero(), |acc, c| acc * &xi + c)
                }
            })
        }
    };

    let mut partial = Rat::zero();
    let mut terms = Vec::new();
    let domain = disk_space(&ring, tau, "disk_tau");
    let codomain = disk_space(&ring, rho, "disk_rho");
    for i in 0..=m {
        let Some(a) = entry(i) else {
            break;
        };
        partial += a.abs() * rat_pow(&x, i as i64)?;
        if !a.is_zero() {
            let mut w = BTreeMap::new();
            w.insert(vec![i as u64], Scalar::from_rat(&ring, a)?);
            let mut alpha = BTreeMap::new();
            alpha.insert(vec![i as u64], Scalar::one(&ring));
            terms.push(CertTerm { w, alpha });
        }
    }

    let tail = match &entries.tail {
        None => {
            if entries.head.len() > m + 1 {
                return Ok(DiagonalVerdict::Unknown { partial });
            }
            NormValue::zero() // finitely many entries: the sum is exact
        }
        Some(TailRule::TableConst { value, .. }) => {
            if x >= Rat::one() {
                return Ok(DiagonalVerdict::NotNuclear {
                    reason: format!(
                        "rho/tau = {x} >= 1 with entries eventually constant {value}: the terms do not vanish"
                    ),
                });
            }
            // sum_{i > m} value x^i, exact
            NormValue::exact(value.abs() * rat_pow(&x, m as i64 + 1)? / (Rat::one() - &x))
        }
        Some(TailRule::Geometric { base, scale }) => {
            let q = base * &x;
            if q >= Rat::one() {
                return Ok(DiagonalVerdict::NotNuclear {
                    reason: format!("geometric entries with base {base} give term ratio {q} >= 1"),
                });
            }
            NormValue::exact(
                scale.abs() * rat_pow(base, m as i64 + 1)? * rat_pow(&x, m as i64 + 1)?
                    / (Rat::one() - &q),
            )
        }
        Some(TailRule::Polynomial { coeffs }) => {
            if coeffs.iter().any(|c| c.is_negative()) {
                return Ok(DiagonalVerdict::Unknown { partial });
            }
            if x >= Rat::one() {
                if coeffs.iter().any(|c| c > &Rat::zero()) {
                    return Ok(DiagonalVerdict::NotNuclear {
                        reason: format!("rho/tau = {x} >= 1 with polynomial entries: the terms do not vanish"),
                    });
                }
                return Ok(DiagonalVerdict::Unknown { partial });
            }
            // ratio test: e(i+1)/e(i) <= (1 + 1/(m+1))^deg for i > m
            let deg = coeffs.len().saturating_sub(1) as i64;
            let growth = rat_pow(
                &(Rat::one() + Rat::new(1.into(), ((m as u64) + 1).into())),
                deg,
            )?;
            let q = &x * &growth;
            if q >= Rat::one() {
                return Err(Error::Domain(
                    "truncation too short for the polynomial ratio bound; increase N".into(),
                ));
            }
            let first = entry(m + 1).expect("rule defined").abs() * rat_pow(&x, m as i64 + 1)?;
            NormValue::upper_bound(first / (Rat::one() - q))
        }
    };

    let cert = NuclearCert::assemble(domain, codomain, terms, tail)?;
    Ok(DiagonalVerdict::Nuclear { l: cert.l_value.clone(), cert })
}

/// Nuclearity of the weight-comparison map between the `psi`- and
/// `phi`-weighted one-variable algebras at radius `r`: decided by the
/// summability of `phi(j)/psi(j)`, with the radius bookkeeping exact
/// because the monomial weights `r^j` cancel termwise.
pub fn psi_phi_nuclear(
    psi: &WeightFunction,
    phi: &WeightFunction,
    r: &Rat,
    n: u32,
) -> Result<DiagonalVerdict, Error> {
    psi.validate()?;
    phi.validate()?;
    let horizon = psi.horizon().unwrap_or(0).max(phi.horizon().unwrap_or(0)).max(n as u64);
    let ring = BaseRing::rat_abs();
    let mut partial = Rat::zero();
    let mut terms = Vec::new();
    let domain = SpaceDescriptor::line(
        ring.clone(),
        "psi_space",
        SeqMode::SumL1,
        psi_weighted(r, psi, horizon)?,
    );
    let codomain = SpaceDescriptor::line(
        ring.clone(),
        "phi_space",
        SeqMode::SumL1,
        psi_weighted(r, phi, horizon)?,
    );
    for j in 0..=horizon {
        let pj = psi.weight(j).ok_or_else(|| Error::Domain(format!("psi undefined at {j}")))?;
        let fj = phi.weight(j).ok_or_else(|| Error::Domain(format!("phi undefined at {j}")))?;
        partial += &fj / &pj;
        let mut w = BTreeMap::new();
        w.insert(vec![j], Scalar::one(&ring));
        let mut alpha = BTreeMap::new();
        alpha.insert(vec![j], Scalar::one(&ring));
        terms.push(CertTerm { w, alpha });
    }
    // classify the ratio sequence phi(j)/psi(j) beyond the horizon
    let tail = match (&phi.tail, &psi.tail) {
        (Some(ft), Some(pt)) => ratio_tail(ft, pt, horizon)?,
        _ => return Ok(DiagonalVerdict::Unknown { partial }),
    };
    let tail = match tail {
        RatioTail::Divergent(reason) => return Ok(DiagonalVerdict::NotNuclear { reason }),
        RatioTail::Unknown => return Ok(DiagonalVerdict::Unknown { partial }),
        RatioTail::Enclosed(t) => t,
    };
    let cert = NuclearCert::assemble(domain, codomain, terms, tail)?;
    Ok(DiagonalVerdict::Nuclear { l: cert.l_value.clone(), cert })
}

enum RatioTail {
    Enclosed(NormValue),
    Divergent(String),
    Unknown,
}

fn ratio_tail(phi: &TailRule, psi: &TailRule, m: u64) -> Result<RatioTail, Error> {
    use TailRule::*;
    Ok(match (phi, psi) {
        (TableConst { value: vf, .. }, TableConst { value: vp, .. }) => RatioTail::Divergent(format!(
            "terms are eventually the constant {} > 0",
            vf / vp
        )),
        (TableConst { value: vf, .. }, Geometric { base: bp, scale: cp }) => {
            geometric_ratio_tail(&(vf / cp), &bp.recip(), m)
        }
        (Geometric { base: bf, scale: cf }, Geometric { base: bp, scale: cp }) => {
            geometric_ratio_tail(&(cf / cp), &(bf / bp), m)
        }
        (Geometric { base: bf, scale: cf }, TableConst { value: vp, .. }) => {
            geometric_ratio_tail(&(cf / vp), bf, m)
        }
        (Polynomial { coeffs }, Geometric { base: bp, scale: cp }) => {
            if coeffs.iter().any(|c| c.is_negative()) || *bp <= Rat::one() {
                return Ok(RatioTail::Unknown);
            }
            // terms poly(j) / (cp bp^j): ratio bound (1+1/(m+1))^deg / bp
            let deg = coeffs.len().saturating_sub(1) as i64;
            let growth = rat_pow(&(Rat::one() + Rat::new(1.into(), (m + 1).into())), deg)?;
            let q = growth / bp;
            if q >= Rat::one() {
                return Err(Error::Domain(
                    "truncation too short for the polynomial ratio bound; increase N".into(),
                ));
            }
            let first = (Polynomial { coeffs: coeffs.clone() }).eval_at(m + 1)
                / (cp * rat_pow(bp, m as i64 + 1)?);
            RatioTail::Enclosed(NormValue::upper_bound(first / (Rat::one() - q)))
        }
        _ => RatioTail::Unknown,
    })
}

impl TailRule {
    fn eval_at(&self, i: u64) -> Rat {
        match self {
            TailRule::Geometric { base, scale } => scale * rat_pow(base, i as i64).expect("pos"),
            TailRule::TableConst { value, .. } => value.clone(),
            TailRule::Polynomial { coeffs } => {
                let x = Rat::from_integer(i.into());
                coeffs.iter().rev().fold(Rat::zero(), |acc, c| acc * &x + c)
            }
        }
    }
}

fn geometric_ratio_tail(scale: &Rat, q: &Rat, m: u64) -> RatioTail {
    if *q >= Rat::one() {
        return RatioTail::Divergent(format!("term ratio {q} >= 1: the terms do not vanish"));
    }
    let first = scale * rat_pow(q, m as i64 + 1).expect("positive ratio");
    RatioTail::Enclosed(NormValue::exact(first / (Rat::one() - q)))
}

/// `r^j` times the weight function, when that stays in closed form;
/// otherwise the explicit product table up to the horizon.
fn psi_weighted(r: &Rat, wf: &WeightFunction, horizon: u64) -> Result<WeightFunction, Error> {
    let tail = match &wf.tail {
        Some(TailRule::TableConst { from, value }) if wf.explicit.is_empty() && *from == 0 => {
            return WeightFunction::geometric_scaled(r.clone(), value.clone());
        }
        Some(TailRule::Geometric { base, scale }) if wf.explicit.is_empty() => {
            return WeightFunction::geometric_scaled(r * base, scale.clone());
        }
        _ => None,
    };
    let mut explicit = BTreeMap::new();
    for j in 0..=horizon {
        let w = wf.weight(j).ok_or_else(|| Error::Domain(format!("weight undefined at {j}")))?;
        explicit.insert(j, w * rat_pow(r, j as i64)?);
    }
    WeightFunction::new(explicit, tail)
}

// ---------------------------------------------------------------------------
// Certificate constructions
// ---------------------------------------------------------------------------

/// Rank-one factorization of a column-finite map: one term per nonzero
/// column (`w` = the column, `alpha` = the dual basis row).
pub fn build_cert(map: &BoundedMap) -> Result<NuclearCert, Error> {
    let MapAction::ColumnFinite { columns } = &map.action else {
        return Err(Error::Domain("build_cert needs a column-finite action".into()));
    };
    let mut terms = Vec::new();
    for (s, col) in columns {
        if col.values().all(Scalar::is_zero) {
            continue;
        }
        let mut alpha = BTreeMap::new();
        alpha.insert(s.clone(), Scalar::one(&map.domain.ring));
        terms.push(CertTerm { w: col.clone(), alpha });
    }
    let cert = NuclearCert::assemble(
        map.domain.clone(),
        map.codomain.clone(),
        terms,
        NormValue::zero(),
    )?;
    let check: Vec<MultiIndex> = columns.keys().cloned().collect();
    if !cert.reproduces(map, &check)? {
        return Err(Error::Internal("certificate does not reproduce the map".into()));
    }
    Ok(cert)
}

#[derive(Debug, Clone)]
pub struct L1Decomposition {
    /// Nuclear map into the middle coproduct, certified.
    pub p: NuclearCert,
    /// Non-expanding map out of the middle coproduct.
    pub c: BoundedMap,
    pub middle: SpaceDescriptor,
}

/// Factors a certified map through a weighted `l1` coproduct with slot
/// weights `m(s) = ||w_s||`: `p(v) = (alpha_s(v))_s` is nuclear with
/// `||p(v)|| <= L ||v||`, and `c(mu) = sum_s mu_s w_s` is non-expanding;
/// `c o p` reproduces the map exactly on basis vectors.
pub fn decompose_through_l1(
    cert: &NuclearCert,
    check_indices: &[MultiIndex],
) -> Result<L1Decomposition, Error> {
    let kept = nonzero_terms(cert)?;
    let mut middle_weights = BTreeMap::new();
    for (s, (_, wn)) in kept.iter().enumerate() {
        if wn.is_zero() {
            return Err(Error::Internal("zero-norm term survived filtering".into()));
        }
        middle_weights.insert(vec![s as u64], wn.clone());
    }
    let middle = SpaceDescriptor {
        ring: cert.domain.ring.clone(),
        label: "middle_l1".into(),
        mode: SeqMode::SumL1,
        weights: IndexWeights::Explicit(middle_weights),
    };
    // p = sum_s delta_s (x) alpha_s
    let mut p_terms = Vec::new();
    for (s, (term, _)) in kept.iter().enumerate() {
        let mut w = BTreeMap::new();
        w.insert(vec![s as u64], Scalar::one(&cert.domain.ring));
        p_terms.push(CertTerm { w, alpha: term.alpha.clone() });
    }
    let p = NuclearCert::assemble(cert.domain.clone(), middle.clone(), p_terms, cert.tail.clone())?;
    // c(delta_s) = w_s, non-expanding by construction; verified
    let mut columns = BTreeMap::new();
    for (s, (term, _)) in kept.iter().enumerate() {
        columns.insert(vec![s as u64], term.w.clone());
    }
    let middle_basis: Vec<MultiIndex> = (0..kept.len()).map(|s| vec![s as u64]).collect();
    let c = BoundedMap::new(
        middle.clone(),
        cert.codomain.clone(),
        MapAction::ColumnFinite { columns },
        Rat::one(),
        &middle_basis,
    )?;
    // c o p reproduces the certified map on the requested basis vectors,
    // and ||p(e)|| <= L ||e|| on the same vectors
    for idx in check_indices {
        let via = c.apply(&p.apply_basis(idx)?)?;
        if via != cert.apply_basis(idx)? {
            return Err(Error::Internal("c o p does not reproduce the map".into()));
        }
        let pn = element_norm(&p.apply_basis(idx)?, &middle)?;
        let en = cert
            .domain
            .weight(idx)
            .ok_or_else(|| Error::Domain(format!("weight undefined at {idx:?}")))?;
        if pn.upper() > &(cert.l_value.upper() * &en) {
            return Err(Error::Internal("||p(v)|| <= L ||v|| failed on a basis vector".into()));
        }
    }
    Ok(L1Decomposition { p, c, middle })
}

#[derive(Debug, Clone)]
pub struct LinfDecomposition {
    /// Non-expanding map into the middle product.
    pub c: BoundedMap,
    /// Nuclear map out of the middle product, certified.
    pub p: NuclearCert,
    pub middle: SpaceDescriptor,
}

/// Factors a certified map through a weighted `l-infinity` product with
/// slot weights `m(s) = ||w_s|| / L`: `c(v) = (alpha_s(v))_s` is
/// non-expanding and `p(mu) = sum_s mu_s w_s` is nuclear; `p o c`
/// reproduces the map exactly on basis vectors. Requires an exact `L`.
pub fn decompose_through_linf(
    cert: &NuclearCert,
    check_indices: &[MultiIndex],
) -> Result<LinfDecomposition, Error> {
    let kept = nonzero_terms(cert)?;
    if kept.is_empty() {
        // zero map: both legs through the zero space
        let middle = SpaceDescriptor {
            ring: cert.domain.ring.clone(),
            label: "middle_linf".into(),
            mode: SeqMode::SupLinf,
            weights: IndexWeights::Explicit(BTreeMap::new()),
        };
        let c = BoundedMap::new(
            cert.domain.clone(),
            middle.clone(),
            MapAction::ColumnFinite { columns: BTreeMap::new() },
            Rat::one(),
            &[],
        )?;
        let p = NuclearCert::assemble(middle.clone(), cert.codomain.clone(), vec![], NormValue::zero())?;
        return Ok(LinfDecomposition { c, p, middle });
    }
    if !cert.l_value.is_exact() {
        return Err(Error::Domain(
            "the l-infinity decomposition needs an exact L (certificates with tails are rejected)".into(),
        ));
    }
    let l = cert.l_value.upper().clone();
    if l.is_zero() {
        return Err(Error::Validation("L = 0 with a nonzero map is inconsistent".into()));
    }
    let mut middle_weights = BTreeMap::new();
    for (s, (_, wn)) in kept.iter().enumerate() {
        // m(s) L = ||w_s|| exactly
        middle_weights.insert(vec![s as u64], wn / &l);
    }
    let middle = SpaceDescriptor {
        ring: cert.domain.ring.clone(),
        label: "middle_linf".into(),
        mode: SeqMode::SupLinf,
        weights: IndexWeights::Explicit(middle_weights),
    };
    // c: v -> (alpha_s(v))_s as a column-finite matrix
    let mut columns: BTreeMap<MultiIndex, Coeffs> = BTreeMap::new();
    for (s, (term, _)) in kept.iter().enumerate() {
        for (j, a) in &term.alpha {
            columns.entry(j.clone()).or_default().insert(vec![s as u64], a.clone());
        }
    }
    let c = BoundedMap::new(
        cert.domain.clone(),
        middle.clone(),
        MapAction::ColumnFinite { columns },
        Rat::one(),
        check_indices,
    )?;
    // p = sum_s w_s (x) delta_s
    let mut p_terms = Vec::new();
    for (s, (term, _)) in kept.iter().enumerate() {
        let mut alpha = BTreeMap::new();
        alpha.insert(vec![s as u64], Scalar::one(&cert.domain.ring));
        p_terms.push(CertTerm { w: term.w.clone(), alpha });
    }
    let p = NuclearCert::assemble(middle.clone(), cert.codomain.clone(), p_terms, NormValue::zero())?;
    for idx in check_indices {
        let via = p.apply(&c.apply_basis(idx)?)?;
        if via != cert.apply_basis(idx)? {
            return Err(Error::Internal("p o c does not reproduce the map".into()));
        }
    }
    Ok(LinfDecomposition { c, p, middle })
}

/// Terms with their exact codomain norms, zero-norm terms dropped.
fn nonzero_terms(cert: &NuclearCert) -> Result<Vec<(CertTerm, Rat)>, Error> {
    let mut out = Vec::new();
    for t in &cert.terms {
        let wn = element_norm(&t.w, &cert.codomain)?;
        if !wn.is_exact() {
            return Err(Error::Domain("term norms must be exact for decomposition".into()));
        }
        if !wn.upper().is_zero() {
            out.push((t.clone(), wn.upper().clone()));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ComposeSide {
    /// `f o g`: precompose with `g`.
    Pre,
    /// `g o f`: postcompose with `g`.
    Post,
}

/// Composes a certificate with a bounded map on either side; the new `L`
/// is verified against `||g|| L`.
pub fn compose_cert(
    cert: &NuclearCert,
    g: &BoundedMap,
    side: ComposeSide,
) -> Result<NuclearCert, Error> {
    let out = match side {
        ComposeSide::Post => {
            if g.domain != cert.codomain {
                return Err(Error::Domain("shape mismatch: g must consume the codomain".into()));
            }
            let mut terms = Vec::new();
            for t in &cert.terms {
                let gw = g.apply(&t.w)?;
                if gw.values().all(Scalar::is_zero) {
                    continue;
                }
                terms.push(CertTerm { w: gw, alpha: t.alpha.clone() });
            }
            let tail = cert.tail.mul_rat(g.bound.upper());
            NuclearCert::assemble(cert.domain.clone(), g.codomain.clone(), terms, tail)?
        }
        ComposeSide::Pre => {
            if g.codomain != cert.domain {
                return Err(Error::Domain("shape mismatch: g must feed the domain".into()));
            }
            // alpha o g as a row over g's domain: (alpha o g)_u = alpha(g e_u)
            let domain_indices: Vec<MultiIndex> = match &g.action {
                MapAction::Diagonal { entries } => entries.keys().cloned().collect(),
                MapAction::ColumnFinite { columns } => columns.keys().cloned().collect(),
                _ => {
                    return Err(Error::Domain(
                        "precomposition needs an enumerable domain action".into(),
                    ))
                }
            };
            let mut terms = Vec::new();
            for t in &cert.terms {
                let mut alpha = BTreeMap::new();
                for u in &domain_indices {
                    let image = g.apply_basis(u)?;
                    let mut val = Scalar::zero(&g.domain.ring);
                    for (j, a) in &t.alpha {
                        if let Some(c) = image.get(j) {
                            val = val.add(&a.mul(c)?)?;
                        }
                    }
                    if !val.is_zero() {
                        alpha.insert(u.clone(), val);
                    }
                }
                if alpha.is_empty() {
                    continue;
                }
                terms.push(CertTerm { w: t.w.clone(), alpha });
            }
            let tail = cert.tail.mul_rat(g.bound.upper());
            NuclearCert::assemble(g.domain.clone(), cert.codomain.clone(), terms, tail)?
        }
    };
    let allowed = g.bound.upper() * cert.l_value.upper();
    if out.l_value.upper() > &allowed {
        return Err(Error::Internal(format!(
            "composed L = {} exceeds ||g|| L = {}",
            out.l_value.upper(),
            allowed
        )));
    }
    Ok(out)
}

/// Monoidal product of two certificates: terms `w_s (x) w'_t` against
/// `alpha_s (x) alpha'_t`, with `L <= L_A L_B` verified.
pub fn tensor_cert(a: &NuclearCert, b: &NuclearCert) -> Result<NuclearCert, Error> {
    let domain = tensor_l1(&a.domain, &b.domain)?;
    let codomain = tensor_l1(&a.codomain, &b.codomain)?;
    let mut terms = Vec::new();
    let mut explicit_sum = Rat::zero();
    for ta in &a.terms {
        for tb in &b.terms {
            let w = tensor_coeffs(&ta.w, &tb.w)?;
            let alpha = tensor_coeffs(&ta.alpha, &tb.alpha)?;
            let wn = element_norm(&w, &codomain)?;
            let an = functional_norm(&alpha, &domain)?;
            explicit_sum += wn.upper() * an.upper();
            terms.push(CertTerm { w, alpha });
        }
    }
    let product_upper = a.l_value.upper() * b.l_value.upper();
    if explicit_sum > product_upper {
        return Err(Error::Internal("tensor L exceeded the product bound".into()));
    }
    let tail = NormValue::upper_bound(&product_upper - &explicit_sum);
    let out = NuclearCert::assemble(domain, codomain, terms, tail)?;
    if out.l_value.upper() > &product_upper {
        return Err(Error::Internal("tensor L enclosure exceeded the product bound".into()));
    }
    Ok(out)
}

fn tensor_coeffs(a: &Coeffs, b: &Coeffs) -> Result<Coeffs, Error> {
    let mut out = BTreeMap::new();
    for (i, x) in a {
        for (j, y) in b {
            let mut idx = i.clone();
            idx.extend_from_slice(j);
            out.insert(idx, x.mul(y)?);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{rat, rat_int};

    fn explicit_line(weights: &[Rat]) -> SpaceDescriptor {
        SpaceDescriptor::line(
            BaseRing::rat_abs(),
            "V",
            SeqMode::SumL1,
            WeightFunction::table(weights).unwrap(),
        )
    }

    fn indices(n: u64) -> Vec<MultiIndex> {
        (0..n).map(|i| vec![i]).collect()
    }

    #[test]
    fn diagonal_unit_entries_closed_form() {
        // unit entries, tau = 1, rho = 1/2: exactly 2
        let v = nuclear_norm_diagonal(&DiagonalEntries::unit(64), &rat_int(1), &rat(1, 2), 64).unwrap();
        match v {
            DiagonalVerdict::Nuclear { l, .. } => {
                assert!(l.contains(&rat_int(2)));
                assert!(l.width().is_zero());
            }
            other => panic!("expected nuclear, got {other:?}"),
        }
        // rho = tau: divergence verdict
        let v = nuclear_norm_diagonal(&DiagonalEntries::unit(8), &rat_int(1), &rat_int(1), 8).unwrap();
        assert!(matches!(v, DiagonalVerdict::NotNuclear { .. }));
    }

    #[test]
    fn diagonal_linear_entries_ratio_tail() {
        // a_i = i at x = 1/2: sum i 2^-i = 2, enclosure within 2^-40 at N = 64
        let entries = DiagonalEntries {
            head: vec![Rat::zero()],
            tail: Some(TailRule::Polynomial { coeffs: vec![Rat::zero(), Rat::one()] }),
        };
        let v = nuclear_norm_diagonal(&entries, &rat_int(1), &rat(1, 2), 64).unwrap();
        match v {
            DiagonalVerdict::Nuclear { l, .. } => {
                assert!(l.contains(&rat_int(2)));
                assert!(l.width() <= rat_pow(&rat(1, 2), 40).unwrap());
            }
            other => panic!("expected nuclear, got {other:?}"),
        }
    }

    #[test]
    fn diagonal_finite_entries_no_rule() {
        let entries = DiagonalEntries { head: vec![rat_int(1), rat_int(3)], tail: None };
        let v = nuclear_norm_diagonal(&entries, &rat_int(1), &rat(1, 2), 4).unwrap();
        match v {
            DiagonalVerdict::Nuclear { l, .. } => {
                assert_eq!(l, NormValue::exact(rat_int(1) + rat(3, 2)));
            }
            other => panic!("expected nuclear, got {other:?}"),
        }
    }

    #[test]
    fn build_cert_examples() {
        // identity on a 1-index space of weight r: L = r (1/r) = 1
        let space = explicit_line(&[rat(3, 7)]);
        let mut columns = BTreeMap::new();
        columns.insert(vec![0u64], BTreeMap::from([(vec![0u64], Scalar::one(&space.ring))]));
        let map = BoundedMap::new(
            space.clone(),
            space.clone(),
            MapAction::ColumnFinite { columns },
            Rat::one(),
            &indices(1),
        )
        .unwrap();
        let cert = build_cert(&map).unwrap();
        assert_eq!(cert.l_value, NormValue::exact(rat_int(1)));
        // zero map: empty cert, L = 0
        let zmap = BoundedMap::new(
            space.clone(),
            space.clone(),
            MapAction::ColumnFinite { columns: BTreeMap::new() },
            Rat::zero(),
            &indices(1),
        )
        .unwrap();
        let cert = build_cert(&zmap).unwrap();
        assert!(cert.terms.is_empty());
        assert_eq!(cert.l_value, NormValue::zero());
        // diag(1,1) on weights (1, 1/2): L = 1 + 1 = 2
        let space = explicit_line(&[rat_int(1), rat(1, 2)]);
        let mut columns = BTreeMap::new();
        for i in 0..2u64 {
            columns.insert(vec![i], BTreeMap::from([(vec![i], Scalar::one(&space.ring))]));
        }
        let map = BoundedMap::new(
            space.clone(),
            space.clone(),
            MapAction::ColumnFinite { columns },
            Rat::one(),
            &indices(2),
        )
        .unwrap();
        let cert = build_cert(&map).unwrap();
        assert_eq!(cert.l_value, NormValue::exact(rat_int(2)));
    }

    #[test]
    fn l1_decomposition() {
        // single term w of norm 3 against the unit functional
        let space = explicit_line(&[rat_int(1)]);
        let codomain = explicit_line(&[rat_int(3)]);
        let term = CertTerm {
            w: BTreeMap::from([(vec![0u64], Scalar::one(&space.ring))]),
            alpha: BTreeMap::from([(vec![0u64], Scalar::one(&space.ring))]),
        };
        let cert =
            NuclearCert::assemble(space.clone(), codomain, vec![term], NormValue::zero()).unwrap();
        let dec = decompose_through_l1(&cert, &indices(1)).unwrap();
        assert_eq!(dec.middle.weight(&vec![0]).unwrap(), rat_int(3));
        assert_eq!(dec.c.bound.upper(), &rat_int(1));
        // empty cert: zero middle space
        let empty = NuclearCert::assemble(space.clone(), space, vec![], NormValue::zero()).unwrap();
        let dec = decompose_through_l1(&empty, &indices(1)).unwrap();
        assert!(dec.p.terms.is_empty());
    }

    #[test]
    fn linf_decomposition_and_symmetry() {
        // two-term cert from diag(1, 1/2) on unit weights
        let space = explicit_line(&[rat_int(1), rat_int(1)]);
        let mut columns = BTreeMap::new();
        columns.insert(vec![0u64], BTreeMap::from([(vec![0u64], Scalar::one(&space.ring))]));
        columns.insert(
            vec![1u64],
            BTreeMap::from([(vec![1u64], Scalar::from_rat(&space.ring, rat(1, 2)).unwrap())]),
        );
        let map = BoundedMap::new(
            space.clone(),
            space.clone(),
            MapAction::ColumnFinite { columns },
            Rat::one(),
            &indices(2),
        )
        .unwrap();
        let cert = build_cert(&map).unwrap();
        assert_eq!(cert.l_value, NormValue::exact(rat(3, 2)));
        let l1 = decompose_through_l1(&cert, &indices(2)).unwrap();
        let linf = decompose_through_linf(&cert, &indices(2)).unwrap();
        // m(s) L = ||w_s|| exactly
        assert_eq!(linf.middle.weight(&vec![0]).unwrap() * rat(3, 2), rat_int(1));
        assert_eq!(linf.middle.weight(&vec![1]).unwrap() * rat(3, 2), rat(1, 2));
        // both decompositions reproduce the same map on basis vectors
        for idx in indices(2) {
            let via_l1 = l1.c.apply(&l1.p.apply_basis(&idx).unwrap()).unwrap();
            let via_linf = linf.p.apply(&linf.c.apply_basis(&idx).unwrap()).unwrap();
            assert_eq!(via_l1, via_linf);
        }
    }

    #[test]
    fn compose_with_identity_and_zero() {
        let space = explicit_line(&[rat_int(1), rat(1, 2)]);
        let mut columns = BTreeMap::new();
        for i in 0..2u64 {
            columns.insert(vec![i], BTreeMap::from([(vec![i], Scalar::one(&space.ring))]));
        }
        let map = BoundedMap::new(
            space.clone(),
            space.clone(),
            MapAction::ColumnFinite { columns },
            Rat::one(),
            &indices(2),
        )
        .unwrap();
        let cert = build_cert(&map).unwrap();
        let id = BoundedMap::identity(&space, &indices(2)).unwrap();
        let post = compose_cert(&cert, &id, ComposeSide::Post).unwrap();
        assert_eq!(post.l_value, cert.l_value);
        let pre = compose_cert(&cert, &id, ComposeSide::Pre).unwrap();
        assert_eq!(pre.l_value, cert.l_value);
        // zero map kills the certificate
        let zero = BoundedMap::new(
            space.clone(),
            space.clone(),
            MapAction::ColumnFinite { columns: BTreeMap::new() },
            Rat::zero(),
            &indices(2),
        )
        .unwrap();
        let dead = compose_cert(&cert, &zero, ComposeSide::Post).unwrap();
        assert!(dead.terms.is_empty());
        assert_eq!(dead.l_value, NormValue::zero());
    }

    #[test]
    fn compose_restriction_with_further_restriction() {
        // restriction cert (tau=1, rho=1/2) postcomposed with the
        // non-expanding restriction to rho' = 1/4: L stays <= 2
        let v = nuclear_norm_diagonal(&DiagonalEntries::unit(16), &rat_int(1), &rat(1, 2), 16).unwrap();
        let DiagonalVerdict::Nuclear { cert, .. } = v else { panic!("nuclear expected") };
        let rho_space = cert.codomain.clone();
        let rho2_space = SpaceDescriptor::line(
            rho_space.ring.clone(),
            "disk_rho2",
            SeqMode::SumL1,
            WeightFunction::geometric(rat(1, 4)).unwrap(),
        );
        let entries = (0..=16u64).map(|i| (vec![i], Scalar::one(&rho_space.ring))).collect();
        let g = BoundedMap::new(
            rho_space,
            rho2_space,
            MapAction::Diagonal { entries },
            Rat::one(),
            &indices(17),
        )
        .unwrap();
        let composed = compose_cert(&cert, &g, ComposeSide::Post).unwrap();
        assert!(composed.l_value.upper() <= &rat_int(2));
    }

    #[test]
    fn tensor_of_unit_certs() {
        let space = explicit_line(&[rat_int(1)]);
        let mut columns = BTreeMap::new();
        columns.insert(vec![0u64], BTreeMap::from([(vec![0u64], Scalar::one(&space.ring))]));
        let map = BoundedMap::new(
            space.clone(),
            space.clone(),
            MapAction::ColumnFinite { columns },
            Rat::one(),
            &indices(1),
        )
        .unwrap();
        let unit = build_cert(&map).unwrap();
        let t = tensor_cert(&unit, &unit).unwrap();
        assert!(t.l_value.upper() <= &rat_int(1));
        // anything tensor the zero cert is zero
        let zero = NuclearCert::assemble(space.clone(), space, vec![], NormValue::zero()).unwrap();
        let tz = tensor_cert(&unit, &zero).unwrap();
        assert!(tz.terms.is_empty());
        assert_eq!(tz.l_value, NormValue::zero());
    }

    #[test]
    fn tensor_of_restriction_certs_matches_two_variable_bound() {
        // restriction(1, 1/2) (x) restriction(1, 1/3):
        // L <= 1/((1 - 1/2)(1 - 1/3)) = 3
        let a = nuclear_norm_diagonal(&DiagonalEntries::unit(40), &rat_int(1), &rat(1, 2), 40).unwrap();
        let b = nuclear_norm_diagonal(&DiagonalEntries::unit(40), &rat_int(1), &rat(1, 3), 40).unwrap();
        let (DiagonalVerdict::Nuclear { cert: ca, .. }, DiagonalVerdict::Nuclear { cert: cb, .. }) =
            (a, b)
        else {
            panic!("nuclear expected")
        };
        let t = tensor_cert(&ca, &cb).unwrap();
        assert!(t.l_value.upper() <= &rat_int(3));
        assert!(t.l_value.lower() > &rat(29, 10));
    }

    #[test]
    fn psi_phi_criterion() {
        // phi = 1, psi = 4^j: L = 4/3 exactly
        let phi = WeightFunction::constant(rat_int(1)).unwrap();
        let psi = WeightFunction::geometric(rat_int(4)).unwrap();
        let v = psi_phi_nuclear(&psi, &phi, &rat(1, 2), 40).unwrap();
        match v {
            DiagonalVerdict::Nuclear { l, .. } => {
                assert!(l.contains(&rat(4, 3)));
                assert!(l.width() <= rat_pow(&rat(1, 2), 40).unwrap());
            }
            other => panic!("expected nuclear, got {other:?}"),
        }
        // phi = psi: terms are constantly 1, divergence verdict
        let v = psi_phi_nuclear(&phi, &phi, &rat(1, 2), 8).unwrap();
        assert!(matches!(v, DiagonalVerdict::NotNuclear { .. }));
        // psi = 2^j phi: terms 2^-j, L = 2
        let psi = WeightFunction::geometric(rat_int(2)).unwrap();
        let v = psi_phi_nuclear(&psi, &phi, &rat(1, 2), 40).unwrap();
        match v {
            DiagonalVerdict::Nuclear { l, .. } => assert!(l.contains(&rat_int(2))),
            other => panic!("expected nuclear, got {other:?}"),
        }
    }

    #[test]
    fn concat_adds_l_exactly() {
        let space = explicit_line(&[rat_int(1), rat(1, 2)]);
        let mut columns = BTreeMap::new();
        for i in 0..2u64 {
            columns.insert(vec![i], BTreeMap::from([(vec![i], Scalar::one(&space.ring))]));
        }
        let map = BoundedMap::new(
            space.clone(),
            space.clone(),
            MapAction::ColumnFinite { columns },
            Rat::one(),
            &indices(2),
        )
        .unwrap();
        let cert = build_cert(&map).unwrap();
        let sum = concat_certs(&cert, &cert).unwrap();
        assert_eq!(sum.l_value.upper(), &(cert.l_value.upper() * rat_int(2)));
    }

    #[test]
    fn cert_reproduces_its_map_on_basis_vectors() {
        let space = explicit_line(&[rat_int(1), rat(1, 2), rat(2, 3)]);
        let mut columns = BTreeMap::new();
        columns.insert(
            vec![0u64],
            BTreeMap::from([
                (vec![1u64], Scalar::from_rat(&space.ring, rat(2, 1)).unwrap()),
                (vec![2u64], Scalar::from_rat(&space.ring, rat(-1, 3)).unwrap()),
            ]),
        );
        columns.insert(
            vec![2u64],
            BTreeMap::from([(vec![0u64], Scalar::from_rat(&space.ring, rat(5, 7)).unwrap())]),
        );
        let map = BoundedMap::new(
            space.clone(),
            space.clone(),
            MapAction::ColumnFinite { columns },
            rat_int(3),
            &indices(3),
        )
        .unwrap();
        let cert = build_cert(&map).unwrap();
        assert!(cert.reproduces(&map, &indices(3)).unwrap());
    }
}
