//! Weighted `l1`-coproduct and `l-infinity`-product spaces, their duals,
//! tensor and symmetric constructions, and the dominating-weight and
//! interchange machinery behind metrizability.
//!
//! Index sets are labeled finite prefixes of countable sets; an optional
//! tail rule describes the weights beyond the stored prefix. All weights
//! are positive rationals, so duals (reciprocal weights) and tensors
//! (product weights) stay exact.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::norm::NormValue;
use crate::rat::{rat_pow, serde_rat, Rat};
use crate::scalars::{BaseRing, Scalar};

/// Closed-form weight continuation beyond the explicit table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TailRule {
    /// `w(i) = scale * base^i`.
    Geometric {
        #[serde(with = "serde_rat")]
        base: Rat,
        #[serde(with = "serde_rat", default = "Rat::one", skip_serializing_if = "Rat::is_one")]
        scale: Rat,
    },
    /// `w(i) = value` for all `i >= from`.
    TableConst {
        from: u64,
        #[serde(with = "serde_rat")]
        value: Rat,
    },
    /// `w(i) = c_0 + c_1 i + c_2 i^2 + ...`.
    Polynomial {
        #[serde(with = "crate::rat::serde_rat_vec")]
        coeffs: Vec<Rat>,
    },
}

impl TailRule {
    fn eval(&self, i: u64) -> Rat {
        match self {
            TailRule::Geometric { base, scale } => {
                scale * rat_pow(base, i as i64).expect("positive base")
            }
            TailRule::TableConst { value, .. } => value.clone(),
            TailRule::Polynomial { coeffs } => {
                let x = Rat::from_integer(i.into());
                let mut acc = Rat::zero();
                for c in coeffs.iter().rev() {
                    acc = acc * &x + c;
                }
                acc
            }
        }
    }

    /// Whether the rule claims index `i` on its own (used for the
    /// table/rule consistency invariant).
    fn defined_at(&self, i: u64, table_horizon: Option<u64>) -> bool {
        match self {
            TailRule::TableConst { from, .. } => i >= *from,
            // geometric/polynomial continuations are anchored after the table
            _ => table_horizon.map_or(true, |h| i > h),
        }
    }
}

/// A positive weight function on `Z_{>=0}`: a finite explicit table plus
/// an optional tail rule for the indices beyond it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightFunction {
    #[serde(with = "table_serde", default, skip_serializing_if = "BTreeMap::is_empty")]
    pub explicit: BTreeMap<u64, Rat>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail: Option<TailRule>,
}

mod table_serde {
    use super::*;
    use serde::ser::SerializeSeq;
    use serde::{de, Deserializer, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Entry {
        i: u64,
        w: String,
    }

    pub fn serialize<S: Serializer>(t: &BTreeMap<u64, Rat>, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(t.len()))?;
        for (i, w) in t {
            seq.serialize_element(&Entry { i: *i, w: crate::rat::format_rat(w) })?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<u64, Rat>, D::Error> {
        let entries = Vec::<Entry>::deserialize(d)?;
        let mut t = BTreeMap::new();
        for e in entries {
            let w = crate::rat::parse_rat(&e.w).map_err(de::Error::custom)?;
            t.insert(e.i, w);
        }
        Ok(t)
    }
}

impl WeightFunction {
    pub fn new(explicit: BTreeMap<u64, Rat>, tail: Option<TailRule>) -> Result<Self, Error> {
        let wf = WeightFunction { explicit, tail };
        wf.validate()?;
        Ok(wf)
    }

    pub fn validate(&self) -> Result<(), Error> {
        for (i, w) in &self.explicit {
            if *w <= Rat::zero() {
                return Err(Error::Validation(format!("weight at {i} is not positive: {w}")));
            }
        }
        let horizon = self.explicit.keys().next_back().copied();
        if let Some(rule) = &self.tail {
            // consistency on overlapping indices
            for (i, w) in &self.explicit {
                if rule.defined_at(*i, horizon) && rule.eval(*i) != *w {
                    return Err(Error::Validation(format!(
                        "tail rule disagrees with the explicit table at index {i}"
                    )));
                }
            }
            if let TailRule::Geometric { base, scale } = rule {
                if *base <= Rat::zero() || *scale <= Rat::zero() {
                    return Err(Error::Validation("geometric tail needs positive base and scale".into()));
                }
            }
            if let TailRule::Polynomial { coeffs } = rule {
                let start = horizon.map_or(0, |h| h + 1);
                if (TailRule::Polynomial { coeffs: coeffs.clone() }).eval(start) <= Rat::zero() {
                    return Err(Error::Validation("polynomial tail must be positive where it applies".into()));
                }
            }
            if let TailRule::TableConst { value, .. } = rule {
                if *value <= Rat::zero() {
                    return Err(Error::Validation("constant tail value must be positive".into()));
                }
            }
        }
        Ok(())
    }

    /// Constant weight `c` everywhere.
    pub fn constant(c: Rat) -> Result<Self, Error> {
        WeightFunction::new(BTreeMap::new(), Some(TailRule::TableConst { from: 0, value: c }))
    }

    /// Geometric weights `base^i`.
    pub fn geometric(base: Rat) -> Result<Self, Error> {
        WeightFunction::new(BTreeMap::new(), Some(TailRule::Geometric { base, scale: Rat::one() }))
    }

    /// Geometric weights with a constant prefactor, `scale * base^i`.
    pub fn geometric_scaled(base: Rat, scale: Rat) -> Result<Self, Error> {
        WeightFunction::new(BTreeMap::new(), Some(TailRule::Geometric { base, scale }))
    }

    /// Finite table on `0..values.len()` with no tail.
    pub fn table(values: &[Rat]) -> Result<Self, Error> {
        let explicit = values.iter().cloned().enumerate().map(|(i, w)| (i as u64, w)).collect();
        WeightFunction::new(explicit, None)
    }

    /// `max(i, 1)`: the positive-everywhere version of the identity
    /// weight, non-decreasing and >= 1.
    pub fn identity_weight() -> Self {
        let mut explicit = BTreeMap::new();
        explicit.insert(0u64, Rat::one());
        WeightFunction::new(
            explicit,
            Some(TailRule::Polynomial { coeffs: vec![Rat::zero(), Rat::one()] }),
        )
        .expect("valid by construction")
    }

    pub fn weight(&self, i: u64) -> Option<Rat> {
        if let Some(w) = self.explicit.get(&i) {
            return Some(w.clone());
        }
        let horizon = self.explicit.keys().next_back().copied();
        match &self.tail {
            Some(rule) if rule.defined_at(i, horizon) => Some(rule.eval(i)),
            _ => None,
        }
    }

    /// Largest explicit index, if any.
    pub fn horizon(&self) -> Option<u64> {
        self.explicit.keys().next_back().copied()
    }

    pub fn is_finite(&self) -> bool {
        self.tail.is_none()
    }

    /// Indexwise reciprocal (the dual weights `w(i)^{-1}`).
    pub fn reciprocal(&self) -> Result<Self, Error> {
        let explicit = self.explicit.iter().map(|(i, w)| (*i, w.recip())).collect();
        let tail = match &self.tail {
            None => None,
            Some(TailRule::Geometric { base, scale }) => {
                Some(TailRule::Geometric { base: base.recip(), scale: scale.recip() })
            }
            Some(TailRule::TableConst { from, value }) => {
                Some(TailRule::TableConst { from: *from, value: value.recip() })
            }
            Some(TailRule::Polynomial { .. }) => {
                return Err(Error::Unsupported(
                    "reciprocal of a polynomial tail has no closed form here".into(),
                ))
            }
        };
        WeightFunction::new(explicit, tail)
    }

    /// Pointwise comparison `self(i) <= other(i)` for `i` in `0..=upto`.
    pub fn le_pointwise(&self, other: &WeightFunction, upto: u64) -> Result<bool, Error> {
        for i in 0..=upto {
            let a = self.weight(i).ok_or_else(|| Error::Domain(format!("weight undefined at {i}")))?;
            let b = other.weight(i).ok_or_else(|| Error::Domain(format!("weight undefined at {i}")))?;
            if a > b {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Strict comparison off a finite prefix: `self(i) < other(i)` for all
    /// `from <= i <= upto` (the order used for eventual domination).
    pub fn lt_from(&self, other: &WeightFunction, from: u64, upto: u64) -> Result<bool, Error> {
        for i in from..=upto {
            let a = self.weight(i).ok_or_else(|| Error::Domain(format!("weight undefined at {i}")))?;
            let b = other.weight(i).ok_or_else(|| Error::Domain(format!("weight undefined at {i}")))?;
            if a >= b {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Norm mode of a weighted sequence space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeqMode {
    SumL1,
    SupLinf,
}

pub type MultiIndex = Vec<u64>;

/// Weight data of a descriptor: either a product of 1-dimensional axes
/// (weights multiply across coordinates) or an explicitly enumerated
/// finite index set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IndexWeights {
    Axes(Vec<WeightFunction>),
    Explicit(#[serde(with = "explicit_serde")] BTreeMap<MultiIndex, Rat>),
}

mod explicit_serde {
    use super::*;
    use serde::ser::SerializeSeq;
    use serde::{de, Deserializer, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Entry {
        idx: MultiIndex,
        w: String,
    }

    pub fn serialize<S: Serializer>(t: &BTreeMap<MultiIndex, Rat>, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(t.len()))?;
        for (idx, w) in t {
            seq.serialize_element(&Entry { idx: idx.clone(), w: crate::rat::format_rat(w) })?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<MultiIndex, Rat>, D::Error> {
        let entries = Vec::<Entry>::deserialize(d)?;
        let mut t = BTreeMap::new();
        for e in entries {
            t.insert(e.idx, crate::rat::parse_rat(&e.w).map_err(de::Error::custom)?);
        }
        Ok(t)
    }
}

/// Descriptor of a weighted coproduct (`SumL1`) or product (`SupLinf`)
/// space over a labeled index set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpaceDescriptor {
    pub ring: BaseRing,
    pub label: String,
    pub mode: SeqMode,
    pub weights: IndexWeights,
}

impl SpaceDescriptor {
    pub fn line(ring: BaseRing, label: &str, mode: SeqMode, weights: WeightFunction) -> Self {
        SpaceDescriptor { ring, label: label.into(), mode, weights: IndexWeights::Axes(vec![weights]) }
    }

    pub fn arity(&self) -> usize {
        match &self.weights {
            IndexWeights::Axes(axes) => axes.len(),
            IndexWeights::Explicit(t) => t.keys().next().map_or(0, |k| k.len()),
        }
    }

    pub fn weight(&self, idx: &MultiIndex) -> Option<Rat> {
        match &self.weights {
            IndexWeights::Axes(axes) => {
                if idx.len() != axes.len() {
                    return None;
                }
                let mut acc = Rat::one();
                for (axis, &i) in axes.iter().zip(idx) {
                    acc *= axis.weight(i)?;
                }
                Some(acc)
            }
            IndexWeights::Explicit(t) => t.get(idx).cloned(),
        }
    }

    pub fn validate(&self) -> Result<(), Error> {
        match &self.weights {
            IndexWeights::Axes(axes) => {
                for a in axes {
                    a.validate()?;
                }
            }
            IndexWeights::Explicit(t) => {
                let arity = self.arity();
                for (idx, w) in t {
                    if idx.len() != arity {
                        return Err(Error::Validation("mixed multi-index arity".into()));
                    }
                    if *w <= Rat::zero() {
                        return Err(Error::Validation(format!("weight at {idx:?} is not positive")));
                    }
                }
            }
        }
        Ok(())
    }

    /// Enumerates the index set when it is finite.
    pub fn enumerate_finite(&self) -> Result<Vec<MultiIndex>, Error> {
        match &self.weights {
            IndexWeights::Explicit(t) => Ok(t.keys().cloned().collect()),
            IndexWeights::Axes(axes) => {
                let mut per_axis = Vec::new();
                for a in axes {
                    if !a.is_finite() {
                        return Err(Error::Domain("index set is not finite".into()));
                    }
                    per_axis.push(a.explicit.keys().copied().collect::<Vec<_>>());
                }
                let mut out: Vec<MultiIndex> = vec![Vec::new()];
                for axis in &per_axis {
                    let mut next = Vec::new();
                    for prefix in &out {
                        for &i in axis {
                            let mut idx = prefix.clone();
                            idx.push(i);
                            next.push(idx);
                        }
                    }
                    out = next;
                }
                out.sort();
                Ok(out)
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Elements
// ---------------------------------------------------------------------------

/// Anything with a rigorous norm enclosure can sit in a weighted sequence.
pub trait Normed {
    fn norm_enclosure(&self) -> NormValue;
}

impl Normed for Scalar {
    fn norm_enclosure(&self) -> NormValue {
        self.norm()
    }
}

/// A finitely supported element of a weighted sequence space, together
/// with a rigorous bound on whatever was truncated away.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedSeq<T> {
    pub coeffs: BTreeMap<MultiIndex, T>,
    pub weights: WeightFunction,
    pub mode: SeqMode,
    pub tail: NormValue,
}

pub type WeightedSeqElement = WeightedSeq<Scalar>;

impl<T: Normed> WeightedSeq<T> {
    pub fn new(
        coeffs: BTreeMap<MultiIndex, T>,
        weights: WeightFunction,
        mode: SeqMode,
        tail: NormValue,
    ) -> Result<Self, Error> {
        weights.validate()?;
        for idx in coeffs.keys() {
            if idx.len() != 1 {
                return Err(Error::Validation("sequence elements are indexed by Z>=0".into()));
            }
        }
        Ok(WeightedSeq { coeffs, weights, mode, tail })
    }

    fn weight_at(&self, idx: &MultiIndex) -> Result<Rat, Error> {
        self.weights
            .weight(idx[0])
            .ok_or_else(|| Error::Domain(format!("weight undefined at index {:?}", idx)))
    }

    /// Exact enclosure of the space norm including the tail.
    pub fn norm(&self) -> Result<NormValue, Error> {
        match self.mode {
            SeqMode::SumL1 => {
                let mut acc = self.tail.clone();
                for (idx, c) in &self.coeffs {
                    let w = self.weight_at(idx)?;
                    acc = acc.add(&c.norm_enclosure().scale(&w)?);
                }
                Ok(acc)
            }
            SeqMode::SupLinf => {
                let mut acc = self.tail.clone();
                acc = NormValue::new(Rat::zero(), acc.upper().clone())?;
                for (idx, c) in &self.coeffs {
                    let w = self.weight_at(idx)?;
                    acc = acc.join_max(&c.norm_enclosure().scale(&w)?);
                }
                Ok(acc)
            }
        }
    }
}

/// Norm of a weighted sequence element (`seq_norm`).
pub fn seq_norm<T: Normed>(v: &WeightedSeq<T>) -> Result<NormValue, Error> {
    v.norm()
}

// ---------------------------------------------------------------------------
// Descriptor-level operations
// ---------------------------------------------------------------------------

/// Dual of an `l1` coproduct descriptor: same index set, reciprocal
/// weights, `sup` mode.
pub fn dual_descriptor(d: &SpaceDescriptor) -> Result<SpaceDescriptor, Error> {
    if d.mode != SeqMode::SumL1 {
        return Err(Error::Domain("dual_descriptor expects an l1 coproduct descriptor".into()));
    }
    let weights = match &d.weights {
        IndexWeights::Axes(axes) => {
            IndexWeights::Axes(axes.iter().map(|a| a.reciprocal()).collect::<Result<_, _>>()?)
        }
        IndexWeights::Explicit(t) => {
            IndexWeights::Explicit(t.iter().map(|(i, w)| (i.clone(), w.recip())).collect())
        }
    };
    Ok(SpaceDescriptor {
        ring: d.ring.clone(),
        label: format!("{}^", d.label),
        mode: SeqMode::SupLinf,
        weights,
    })
}

/// Tensor of two `l1` descriptors over the same ring: cartesian index
/// set with product weights.
pub fn tensor_l1(a: &SpaceDescriptor, b: &SpaceDescriptor) -> Result<SpaceDescriptor, Error> {
    if a.mode != SeqMode::SumL1 || b.mode != SeqMode::SumL1 {
        return Err(Error::Domain("tensor_l1 expects l1 coproduct descriptors".into()));
    }
    if a.ring != b.ring {
        return Err(Error::Domain("tensor over mixed base rings".into()));
    }
    let label = format!("{}(x){}", a.label, b.label);
    let weights = match (&a.weights, &b.weights) {
        (IndexWeights::Axes(x), IndexWeights::Axes(y)) => {
            let mut axes = x.clone();
            axes.extend(y.iter().cloned());
            IndexWeights::Axes(axes)
        }
        _ => {
            let xs = a.enumerate_finite()?;
            let ys = b.enumerate_finite()?;
            let mut t = BTreeMap::new();
            for x in &xs {
                let wx = a.weight(x).expect("enumerated index has a weight");
                for y in &ys {
                    let wy = b.weight(y).expect("enumerated index has a weight");
                    let mut idx = x.clone();
                    idx.extend_from_slice(y);
                    t.insert(idx, &wx * &wy);
                }
            }
            IndexWeights::Explicit(t)
        }
    };
    Ok(SpaceDescriptor { ring: a.ring.clone(), label, mode: SeqMode::SumL1, weights })
}

/// Degree-`n` symmetric power of a finite `l1` descriptor: index set is
/// the degree-`n` multi-indices over the base index set, the weight of a
/// multi-index `I` is the product of the base weights to their exponents.
pub fn sym_power(v: &SpaceDescriptor, n: u32) -> Result<SpaceDescriptor, Error> {
    if v.mode != SeqMode::SumL1 {
        return Err(Error::Domain("sym_power expects an l1 descriptor".into()));
    }
    let base = v.enumerate_finite()?;
    let base_weights: Vec<Rat> =
        base.iter().map(|i| v.weight(i).expect("enumerated index has a weight")).collect();
    let mut t = BTreeMap::new();
    let mut exponents = vec![0u64; base.len()];
    fill_degree(&mut exponents, 0, n as u64, &base_weights, &mut t);
    Ok(SpaceDescriptor {
        ring: v.ring.clone(),
        label: format!("Sym^{n}({})", v.label),
        mode: SeqMode::SumL1,
        weights: IndexWeights::Explicit(t),
    })
}

fn fill_degree(
    exponents: &mut Vec<u64>,
    pos: usize,
    remaining: u64,
    weights: &[Rat],
    out: &mut BTreeMap<MultiIndex, Rat>,
) {
    if pos == exponents.len() {
        if remaining == 0 {
            let mut w = Rat::one();
            for (e, base) in exponents.iter().zip(weights) {
                w *= rat_pow(base, *e as i64).expect("positive weight");
            }
            out.insert(exponents.clone(), w);
        }
        return;
    }
    if pos + 1 == exponents.len() {
        exponents[pos] = remaining;
        fill_degree(exponents, pos + 1, 0, weights, out);
        exponents[pos] = 0;
        return;
    }
    for e in 0..=remaining {
        exponents[pos] = e;
        fill_degree(exponents, pos + 1, remaining - e, weights, out);
        exponents[pos] = 0;
    }
}

/// The dominating weight of a finite list of positive integer weight
/// functions on `Z_{>=1}`: `alpha(i) = 1 + sum_{k <= min(i, m)} psi_k(i)`
/// where `m` is the list length and `psi_k` is 1-indexed. For each fixed
/// `k`, `alpha(i) > psi_k(i)` for all `i >= k` (eventual domination; below
/// index `k` nothing is claimed).
pub fn dominate_weights(list: &[WeightFunction], horizon: u64) -> Result<WeightFunction, Error> {
    if list.is_empty() {
        return Err(Error::Domain("dominate_weights needs a non-empty list".into()));
    }
    let m = list.len() as u64;
    for wf in list {
        for i in 1..=horizon {
            let w = wf
                .weight(i)
                .ok_or_else(|| Error::Domain(format!("input weight undefined at {i}")))?;
            if w <= Rat::zero() || !w.denom().is_one() {
                return Err(Error::Domain(format!(
                    "dominate_weights expects positive integer values, got {w} at {i}"
                )));
            }
        }
    }
    let mut explicit = BTreeMap::new();
    for i in 1..=horizon {
        let mut acc = Rat::one();
        for k in 1..=m.min(i) {
            acc += list[(k - 1) as usize].weight(i).expect("checked above");
        }
        explicit.insert(i, acc);
    }
    // constant continuation when every input is eventually constant
    let tail = eventually_constant_tail(list, m, horizon);
    WeightFunction::new(explicit, tail)
}

fn eventually_constant_tail(list: &[WeightFunction], m: u64, horizon: u64) -> Option<TailRule> {
    if horizon < m {
        return None;
    }
    let mut acc = Rat::one();
    for wf in list {
        match &wf.tail {
            Some(TailRule::TableConst { from, value }) if *from <= horizon => acc += value,
            _ => return None,
        }
    }
    Some(TailRule::TableConst { from: horizon + 1, value: acc })
}

/// Checks the eventual-domination order: `alpha(i) > psi(i)` for all
/// `k <= i <= upto`.
pub fn dominates_from(alpha: &WeightFunction, psi: &WeightFunction, k: u64, upto: u64) -> Result<bool, Error> {
    psi.lt_from(alpha, k, upto)
}

// ---------------------------------------------------------------------------
// Interchange maps between the two nestings over a (k, s) grid
// ---------------------------------------------------------------------------

/// How the two grid directions are nested.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GridNesting {
    /// `l1` over `s` of `l-infinity` over `k`: `sum_s sup_k`.
    SumOverSupK,
    /// `l-infinity` over `k` of `l1` over `s`: `sup_k sum_s`.
    SupOverSumS,
}

/// A finitely supported element over the `(k, s)` grid; `k` is 1-indexed.
#[derive(Debug, Clone, PartialEq)]
pub struct GridElement {
    pub coeffs: BTreeMap<(u64, u64), Scalar>,
}

/// One of the four coefficient-identity maps of the interchange diagram,
/// with a verified bound constant between its weighted source and target.
#[derive(Debug, Clone)]
pub struct GridMap {
    pub name: String,
    pub source: GridNesting,
    pub target: GridNesting,
    /// `phi2` stage of the source / target weighting.
    pub source_phi2: Vec<Rat>,
    pub target_phi2: Vec<Rat>,
    /// Verified upper bound for the operator norm on the finite grid.
    pub bound: Rat,
}

impl GridMap {
    /// All four maps act as the identity on coefficients.
    pub fn apply(&self, v: &GridElement) -> GridElement {
        v.clone()
    }
}

#[derive(Debug, Clone)]
pub struct InterchangeMaps {
    pub grid_weights: BTreeMap<(u64, u64), Rat>,
    pub phi2: Vec<Rat>,
    pub phi2_doubled: Vec<Rat>,
    pub iota: GridMap,
    pub pi: GridMap,
    /// Stage map on the `sum_s sup_k` side, `phi2 -> phi2'`.
    pub f: GridMap,
    /// Stage map on the `sup_k sum_s` side, `phi2 -> phi2'`.
    pub g: GridMap,
}

/// Norm of a grid element under a nesting, with weights
/// `w(k,s) / phi2(k)`; exact rational.
pub fn grid_norm(
    v: &GridElement,
    nesting: GridNesting,
    weights: &BTreeMap<(u64, u64), Rat>,
    phi2: &[Rat],
) -> Result<Rat, Error> {
    let mut per: BTreeMap<u64, Rat> = BTreeMap::new();
    // group by the outer index
    for ((k, s), c) in &v.coeffs {
        let w = weights
            .get(&(*k, *s))
            .ok_or_else(|| Error::Domain(format!("no grid weight at ({k},{s})")))?;
        let phi = phi2
            .get((*k - 1) as usize)
            .ok_or_else(|| Error::Domain(format!("phi2 undefined at k={k}")))?;
        let term = c.norm().upper() * w / phi;
        match nesting {
            GridNesting::SumOverSupK => {
                let slot = per.entry(*s).or_insert_with(Rat::zero);
                if term > *slot {
                    *slot = term;
                }
            }
            GridNesting::SupOverSumS => {
                *per.entry(*k).or_insert_with(Rat::zero) += term;
            }
        }
    }
    Ok(match nesting {
        GridNesting::SumOverSupK => per.values().fold(Rat::zero(), |a, b| a + b),
        GridNesting::SupOverSumS => per.values().cloned().fold(Rat::zero(), |a, b| a.max(b)),
    })
}

/// Builds the inclusion `iota` from the `l1`-of-`l-infinity` space into
/// the `l-infinity`-of-`l1` space at stage `phi2`, the interchange `pi`
/// back at stage `phi2'` with `phi2'(k) = 2^k phi2(k)`, and the two stage
/// maps `f`, `g`. All four are exact coefficient-identity maps; the
/// bound constants are verified on every basis vector of the grid, and
/// `pi` additionally carries the geometric constant `sum_k 2^{-k}`.
pub fn interchange_maps(
    grid_weights: &BTreeMap<(u64, u64), Rat>,
    phi2: &WeightFunction,
) -> Result<InterchangeMaps, Error> {
    if grid_weights.is_empty() {
        return Err(Error::Domain("empty grid".into()));
    }
    let mut ks: Vec<u64> = grid_weights.keys().map(|(k, _)| *k).collect();
    ks.sort_unstable();
    ks.dedup();
    if ks[0] == 0 {
        return Err(Error::Domain("grid rows are 1-indexed".into()));
    }
    let kmax = *ks.last().expect("non-empty");
    for ((k, s), w) in grid_weights {
        if *w <= Rat::zero() {
            return Err(Error::Domain(format!("nonpositive weight at ({k},{s})")));
        }
    }
    let mut phi: Vec<Rat> = Vec::new();
    let mut phi_doubled: Vec<Rat> = Vec::new();
    let two = Rat::from_integer(2.into());
    for k in 1..=kmax {
        let v = phi2
            .weight(k)
            .ok_or_else(|| Error::Domain(format!("phi2 undefined at k={k}")))?;
        if v <= Rat::zero() {
            return Err(Error::Domain(format!("phi2({k}) must be positive")));
        }
        phi_doubled.push(rat_pow(&two, k as i64)? * &v);
        phi.push(v);
    }

    // geometric estimate for pi: sum over the occurring rows of 2^{-k}
    let pi_bound: Rat = ks.iter().map(|&k| rat_pow(&two, -(k as i64)).expect("2^-k")).sum();

    // verify basis-vector ratios against the declared bounds
    let basis_ratio = |src: GridNesting, src_phi: &[Rat], tgt: GridNesting, tgt_phi: &[Rat]| -> Result<Rat, Error> {
        let ring = BaseRing::rat_abs();
        let mut worst = Rat::zero();
        for (key, _) in grid_weights {
            let mut coeffs = BTreeMap::new();
            coeffs.insert(*key, Scalar::one(&ring));
            let e = GridElement { coeffs };
            let num = grid_norm(&e, tgt, grid_weights, tgt_phi)?;
            let den = grid_norm(&e, src, grid_weights, src_phi)?;
            let ratio = num / den;
            if ratio > worst {
                worst = ratio;
            }
        }
        Ok(worst)
    };

    let one = Rat::one();
    let iota_ratio = basis_ratio(GridNesting::SumOverSupK, &phi, GridNesting::SupOverSumS, &phi)?;
    let pi_ratio = basis_ratio(GridNesting::SupOverSumS, &phi, GridNesting::SumOverSupK, &phi_doubled)?;
    let f_ratio = basis_ratio(GridNesting::SumOverSupK, &phi, GridNesting::SumOverSupK, &phi_doubled)?;
    let g_ratio = basis_ratio(GridNesting::SupOverSumS, &phi, GridNesting::SupOverSumS, &phi_doubled)?;
    for (name, ratio, bound) in [
        ("iota", &iota_ratio, &one),
        ("pi", &pi_ratio, &pi_bound),
        ("f", &f_ratio, &one),
        ("g", &g_ratio, &one),
    ] {
        if ratio > bound {
            return Err(Error::Internal(format!(
                "{name} basis ratio {ratio} exceeds the declared bound {bound}"
            )));
        }
    }

    Ok(InterchangeMaps {
        grid_weights: grid_weights.clone(),
        phi2: phi.clone(),
        phi2_doubled: phi_doubled.clone(),
        iota: GridMap {
            name: "iota".into(),
            source: GridNesting::SumOverSupK,
            target: GridNesting::SupOverSumS,
            source_phi2: phi.clone(),
            target_phi2: phi.clone(),
            bound: one.clone(),
        },
        pi: GridMap {
            name: "pi".into(),
            source: GridNesting::SupOverSumS,
            target: GridNesting::SumOverSupK,
            source_phi2: phi.clone(),
            target_phi2: phi_doubled.clone(),
            bound: pi_bound,
        },
        f: GridMap {
            name: "f".into(),
            source: GridNesting::SumOverSupK,
            target: GridNesting::SumOverSupK,
            source_phi2: phi.clone(),
            target_phi2: phi_doubled.clone(),
            bound: one.clone(),
        },
        g: GridMap {
            name: "g".into(),
            source: GridNesting::SupOverSumS,
            target: GridNesting::SupOverSumS,
            source_phi2: phi,
            target_phi2: phi_doubled,
            bound: one,
        },
    })
}

/// Verifies the four interchange identities `iota' o pi = g`,
/// `pi o iota = f`, `g o iota = iota' o f` and `pi o g' = f' o pi` on
/// every basis vector of the grid (all maps are coefficient identities,
/// so the check is exact coefficient equality).
pub fn verify_interchange_identities(maps: &InterchangeMaps) -> Result<bool, Error> {
    let ring = BaseRing::rat_abs();
    for key in maps.grid_weights.keys() {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(*key, Scalar::one(&ring));
        let e = GridElement { coeffs };
        let lhs1 = maps.iota.apply(&maps.pi.apply(&e));
        let rhs1 = maps.g.apply(&e);
        let lhs2 = maps.pi.apply(&maps.iota.apply(&e));
        let rhs2 = maps.f.apply(&e);
        let lhs3 = maps.g.apply(&maps.iota.apply(&e));
        let rhs3 = maps.iota.apply(&maps.f.apply(&e));
        let lhs4 = maps.pi.apply(&maps.g.apply(&e));
        let rhs4 = maps.f.apply(&maps.pi.apply(&e));
        if lhs1 != rhs1 || lhs2 != rhs2 || lhs3 != rhs3 || lhs4 != rhs4 {
            return Ok(false);
        }
    }
    Ok(true)
}

// ---------------------------------------------------------------------------
// Kernels of coproducts of diagonal maps
// ---------------------------------------------------------------------------

/// A diagonal map on a finite-support 1-dimensional space.
#[derive(Debug, Clone)]
pub struct DiagonalSummand {
    pub space: SpaceDescriptor,
    pub entries: Vec<Rat>,
}

/// Kernel of a coproduct of diagonal maps, computed summand by summand
/// and concatenated; also recomputes the kernel of the assembled map on
/// the whole coproduct and checks the two agree index for index.
pub fn kernel_of_coproduct_map(
    summands: &[DiagonalSummand],
) -> Result<(SpaceDescriptor, Vec<MultiIndex>), Error> {
    let mut weights = BTreeMap::new();
    let mut basis = Vec::new();
    let mut assembled_entries = Vec::new();
    let mut assembled_keys = Vec::new();
    let mut ring = None;
    for (i, s) in summands.iter().enumerate() {
        if let Some(r) = &ring {
            if *r != s.space.ring {
                return Err(Error::Domain("mixed base rings in coproduct".into()));
            }
        } else {
            ring = Some(s.space.ring.clone());
        }
        let indices = s.space.enumerate_finite()?;
        if indices.len() != s.entries.len() {
            return Err(Error::Domain("diagonal entry count does not match the index set".into()));
        }
        for (j, idx) in indices.iter().enumerate() {
            let mut key: MultiIndex = vec![i as u64];
            key.extend_from_slice(idx);
            assembled_keys.push(key.clone());
            assembled_entries.push(s.entries[j].clone());
            if s.entries[j].is_zero() {
                basis.push(key.clone());
                let w = s.space.weight(idx).expect("enumerated index has a weight");
                weights.insert(key, w);
            }
        }
    }
    // independent route: kernel of the assembled diagonal map
    let assembled_kernel: Vec<MultiIndex> = assembled_keys
        .iter()
        .zip(&assembled_entries)
        .filter(|(_, e)| e.is_zero())
        .map(|(k, _)| k.clone())
        .collect();
    if assembled_kernel != basis {
        return Err(Error::Internal("summandwise and assembled kernels disagree".into()));
    }
    let ring = ring.ok_or_else(|| Error::Domain("empty coproduct".into()))?;
    Ok((
        SpaceDescriptor {
            ring,
            label: "ker".into(),
            mode: SeqMode::SumL1,
            weights: IndexWeights::Explicit(weights),
        },
        basis,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{rat, rat_int};

    fn line(weights: &[Rat]) -> SpaceDescriptor {
        SpaceDescriptor::line(
            BaseRing::rat_abs(),
            "V",
            SeqMode::SumL1,
            WeightFunction::table(weights).unwrap(),
        )
    }

    #[test]
    fn seq_norm_examples() {
        let ring = BaseRing::rat_abs();
        let wf = WeightFunction::table(&[rat_int(1), rat(1, 2)]).unwrap();
        let mut coeffs = BTreeMap::new();
        coeffs.insert(vec![0], Scalar::one(&ring));
        coeffs.insert(vec![1], Scalar::one(&ring));
        let v = WeightedSeq::new(coeffs.clone(), wf.clone(), SeqMode::SumL1, NormValue::zero()).unwrap();
        assert_eq!(seq_norm(&v).unwrap(), NormValue::exact(rat(3, 2)));
        let v = WeightedSeq::new(coeffs, wf.clone(), SeqMode::SupLinf, NormValue::zero()).unwrap();
        assert_eq!(seq_norm(&v).unwrap(), NormValue::exact(rat_int(1)));
        let empty: WeightedSeqElement =
            WeightedSeq::new(BTreeMap::new(), wf, SeqMode::SumL1, NormValue::zero()).unwrap();
        assert_eq!(seq_norm(&empty).unwrap(), NormValue::zero());
    }

    #[test]
    fn dual_reciprocal_weights() {
        let d = line(&[rat_int(2), rat_int(4)]);
        let dual = dual_descriptor(&d).unwrap();
        assert_eq!(dual.mode, SeqMode::SupLinf);
        assert_eq!(dual.weight(&vec![0]).unwrap(), rat(1, 2));
        assert_eq!(dual.weight(&vec![1]).unwrap(), rat(1, 4));
        // constant 1 is self-reciprocal
        let d = SpaceDescriptor::line(
            BaseRing::rat_abs(),
            "V",
            SeqMode::SumL1,
            WeightFunction::constant(rat_int(1)).unwrap(),
        );
        let dual = dual_descriptor(&d).unwrap();
        assert_eq!(dual.weight(&vec![17]).unwrap(), rat_int(1));
        // geometric (1/3)^i dualizes to 3^i
        let d = SpaceDescriptor::line(
            BaseRing::rat_abs(),
            "V",
            SeqMode::SumL1,
            WeightFunction::geometric(rat(1, 3)).unwrap(),
        );
        let dual = dual_descriptor(&d).unwrap();
        assert_eq!(dual.weight(&vec![2]).unwrap(), rat_int(9));
    }

    #[test]
    fn dual_is_involutive_on_weights() {
        let d = line(&[rat(2, 3), rat(7, 5), rat_int(4)]);
        let again = {
            let mut dd = dual_descriptor(&d).unwrap();
            dd.mode = SeqMode::SumL1; // dual of the dual as a weight statement
            dual_descriptor(&dd).unwrap()
        };
        for i in 0..3u64 {
            assert_eq!(again.weight(&vec![i]), d.weight(&vec![i]));
        }
    }

    #[test]
    fn tensor_weights_multiply() {
        let a = line(&[rat_int(1), rat(1, 2)]);
        let b = line(&[rat(1, 3)]);
        let t = tensor_l1(&a, &b).unwrap();
        assert_eq!(t.weight(&vec![0, 0]).unwrap(), rat(1, 3));
        assert_eq!(t.weight(&vec![1, 0]).unwrap(), rat(1, 6));
        // unit: tensoring with a single weight-1 axis keeps the weights
        let unit = line(&[rat_int(1)]);
        let t = tensor_l1(&a, &unit).unwrap();
        assert_eq!(t.weight(&vec![0, 0]).unwrap(), rat_int(1));
        assert_eq!(t.weight(&vec![1, 0]).unwrap(), rat(1, 2));
        // geometric x geometric: weight r^i rho^j at (i, j)
        let g1 = SpaceDescriptor::line(
            BaseRing::rat_abs(),
            "A",
            SeqMode::SumL1,
            WeightFunction::geometric(rat(1, 2)).unwrap(),
        );
        let g2 = SpaceDescriptor::line(
            BaseRing::rat_abs(),
            "B",
            SeqMode::SumL1,
            WeightFunction::geometric(rat(1, 3)).unwrap(),
        );
        let t = tensor_l1(&g1, &g2).unwrap();
        assert_eq!(t.weight(&vec![2, 1]).unwrap(), rat(1, 4) * rat(1, 3));
        // mixed rings rejected
        let z = SpaceDescriptor::line(
            BaseRing::int_abs(),
            "Z",
            SeqMode::SumL1,
            WeightFunction::table(&[rat_int(1)]).unwrap(),
        );
        assert!(tensor_l1(&a, &z).is_err());
    }

    #[test]
    fn tensor_weight_multisets_commute() {
        let a = line(&[rat(1, 2), rat(2, 3)]);
        let b = line(&[rat_int(3), rat(1, 5)]);
        let ab = tensor_l1(&a, &b).unwrap();
        let ba = tensor_l1(&b, &a).unwrap();
        let mut wab: Vec<Rat> =
            ab.enumerate_finite().unwrap().iter().map(|i| ab.weight(i).unwrap()).collect();
        let mut wba: Vec<Rat> =
            ba.enumerate_finite().unwrap().iter().map(|i| ba.weight(i).unwrap()).collect();
        wab.sort();
        wba.sort();
        assert_eq!(wab, wba);
    }

    #[test]
    fn sym_power_examples() {
        let v = line(&[rat(1, 2), rat(1, 3)]);
        let s = sym_power(&v, 2).unwrap();
        let mut weights: Vec<Rat> =
            s.enumerate_finite().unwrap().iter().map(|i| s.weight(i).unwrap()).collect();
        weights.sort();
        let mut expected = vec![rat(1, 4), rat(1, 6), rat(1, 9)];
        expected.sort();
        assert_eq!(weights, expected);
        // n = 0: a single index of weight 1
        let s0 = sym_power(&v, 0).unwrap();
        let idx = s0.enumerate_finite().unwrap();
        assert_eq!(idx.len(), 1);
        assert_eq!(s0.weight(&idx[0]).unwrap(), rat_int(1));
        // one generator: plain geometric power
        let v1 = line(&[rat(1, 2)]);
        let s3 = sym_power(&v1, 3).unwrap();
        assert_eq!(s3.weight(&vec![3]).unwrap(), rat(1, 8));
    }

    #[test]
    fn dominate_weights_examples() {
        // single psi = 1: alpha(i) = 2 for i >= 1
        let one = WeightFunction::constant(rat_int(1)).unwrap();
        let alpha = dominate_weights(std::slice::from_ref(&one), 10).unwrap();
        for i in 1..=10 {
            assert_eq!(alpha.weight(i).unwrap(), rat_int(2));
        }
        assert!(dominates_from(&alpha, &one, 1, 10).unwrap());
        // two constants 2: alpha(i) = 5 for i >= 2
        let two = WeightFunction::constant(rat_int(2)).unwrap();
        let alpha = dominate_weights(&[two.clone(), two.clone()], 10).unwrap();
        assert_eq!(alpha.weight(1).unwrap(), rat_int(3));
        for i in 2..=10 {
            assert_eq!(alpha.weight(i).unwrap(), rat_int(5));
        }
        assert!(dominates_from(&alpha, &two, 2, 10).unwrap());
        // psi_k = k for k = 1..3: alpha(i) = 7 for i >= 3
        let list: Vec<WeightFunction> =
            (1..=3).map(|k| WeightFunction::constant(rat_int(k)).unwrap()).collect();
        let alpha = dominate_weights(&list, 10).unwrap();
        for i in 3..=10 {
            assert_eq!(alpha.weight(i).unwrap(), rat_int(7));
        }
        for (k, psi) in list.iter().enumerate() {
            assert!(dominates_from(&alpha, psi, (k + 1) as u64, 10).unwrap());
        }
        assert!(dominate_weights(&[], 5).is_err());
    }

    #[test]
    fn interchange_trivial_grid() {
        let mut grid = BTreeMap::new();
        grid.insert((1u64, 0u64), rat_int(1));
        let maps = interchange_maps(&grid, &WeightFunction::constant(rat_int(1)).unwrap()).unwrap();
        assert_eq!(maps.phi2_doubled, vec![rat_int(2)]);
        assert!(verify_interchange_identities(&maps).unwrap());
        assert_eq!(maps.pi.bound, rat(1, 2));
    }

    #[test]
    fn interchange_two_by_two() {
        // unit weights, phi2 = 1 -> phi2' = (2, 4); pi bound = 3/4
        let mut grid = BTreeMap::new();
        for k in 1..=2u64 {
            for s in 0..2u64 {
                grid.insert((k, s), rat_int(1));
            }
        }
        let maps = interchange_maps(&grid, &WeightFunction::constant(rat_int(1)).unwrap()).unwrap();
        assert_eq!(maps.phi2_doubled, vec![rat_int(2), rat_int(4)]);
        assert_eq!(maps.pi.bound, rat(3, 4));
        assert!(verify_interchange_identities(&maps).unwrap());
    }

    #[test]
    fn interchange_geometric_weights() {
        // weights r_s = 1/2^s, phi2(k) = max(k, 1)
        let mut grid = BTreeMap::new();
        for k in 1..=3u64 {
            for s in 0..4u64 {
                grid.insert((k, s), rat_pow(&rat(1, 2), s as i64).unwrap());
            }
        }
        let maps = interchange_maps(&grid, &WeightFunction::identity_weight()).unwrap();
        assert!(verify_interchange_identities(&maps).unwrap());
        assert!(interchange_maps(&BTreeMap::new(), &WeightFunction::identity_weight()).is_err());
    }

    #[test]
    fn kernel_of_diagonal_maps() {
        let space = line(&[rat_int(1), rat_int(1), rat_int(1)]);
        // f = diag(1, 0, 2): kernel spanned by index 1
        let s = DiagonalSummand { space: space.clone(), entries: vec![rat_int(1), rat_int(0), rat_int(2)] };
        let (_, basis) = kernel_of_coproduct_map(std::slice::from_ref(&s)).unwrap();
        assert_eq!(basis, vec![vec![0, 1]]);
        // all zero maps: kernel = whole space
        let z = DiagonalSummand { space: space.clone(), entries: vec![rat_int(0); 3] };
        let (_, basis) = kernel_of_coproduct_map(&[z.clone(), z]).unwrap();
        assert_eq!(basis.len(), 6);
        // all identities: kernel = 0
        let id = DiagonalSummand { space, entries: vec![rat_int(1); 3] };
        let (_, basis) = kernel_of_coproduct_map(&[id]).unwrap();
        assert!(basis.is_empty());
    }

    #[test]
    fn weight_function_tail_semantics() {
        let wf = WeightFunction::identity_weight();
        assert_eq!(wf.weight(0).unwrap(), rat_int(1));
        assert_eq!(wf.weight(1).unwrap(), rat_int(1));
        assert_eq!(wf.weight(7).unwrap(), rat_int(7));
        // inconsistent table-const overlap is rejected
        let mut t = BTreeMap::new();
        t.insert(3u64, rat_int(5));
        assert!(WeightFunction::new(t, Some(TailRule::TableConst { from: 0, value: rat_int(4) })).is_err());
    }

    #[test]
    fn weight_function_json_round_trip() {
        for wf in [
            WeightFunction::geometric(rat(1, 2)).unwrap(),
            WeightFunction::constant(rat_int(3)).unwrap(),
            WeightFunction::identity_weight(),
            WeightFunction::table(&[rat_int(1), rat(2, 7)]).unwrap(),
        ] {
            let j = serde_json::to_string(&wf).unwrap();
            let back: WeightFunction = serde_json::from_str(&j).unwrap();
            assert_eq!(back, wf);
        }
    }
}
