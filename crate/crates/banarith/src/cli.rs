//! Batch JSON front end: every library operation is reachable from
//! exactly one subcommand, inputs and outputs are JSON documents with
//! all numerics as `"num/den"` strings, and identical (input, seed,
//! truncation) triples produce byte-identical outputs.

use std::collections::BTreeMap;
use std::path::Path;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::disks::{DiskMode, PolydiskAlgebra, Series, SeriesJson};
use crate::error::Error;
use crate::homology::{
    ChainComplex, ChainComplexJson, FiniteDiagram, FiniteDiagramJson, TowerDiagram, TowerJson,
};
use crate::norm::NormValue;
use crate::nuclear::{
    BoundedMap, CertTerm, Coeffs, DiagonalVerdict, MapAction, NuclearCert,
};
use crate::rat::{format_rat, parse_rat, Rat};
use crate::scalars::{BaseRing, Scalar, ScalarJson};
use crate::spaces::{
    DiagonalSummand, MultiIndex, SeqMode, SpaceDescriptor, TailRule, WeightFunction, WeightedSeq,
};

/// One job: a subcommand path plus its input document.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JobSpec {
    pub subcommand: Vec<String>,
    #[serde(default)]
    pub input: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// Registry of every library operation and the unique subcommand that
/// reaches it; asserted complete by the coverage test.
pub const OP_REGISTRY: &[(&str, &str)] = &[
    ("scalars::norm", "scalar norm"),
    ("scalars::scale_norm", "scalar scale"),
    ("scalars::check_ring_axioms", "scalar axioms"),
    ("spaces::seq_norm", "space norm"),
    ("spaces::dual_descriptor", "space dual"),
    ("spaces::tensor_l1", "space tensor"),
    ("spaces::sym_power", "space sym"),
    ("spaces::dominate_weights", "space dominate"),
    ("spaces::interchange_maps", "space interchange"),
    ("spaces::kernel_of_coproduct_map", "space kernel"),
    ("disks::series_norm", "norm"),
    ("disks::mul", "series mul"),
    ("disks::restrict", "series restrict"),
    ("disks::delta_map", "series delta"),
    ("disks::sigma_map", "series sigma"),
    ("disks::id_minus_shift", "series shift"),
    ("disks::pairing", "series pair"),
    ("disks::compare_norms", "series compare"),
    ("padic::divide_by_x_minus_p", "padic divide"),
    ("padic::padic_expand", "padic expand"),
    ("padic::quotient_norm_bounds", "padic qnorm"),
    ("padic::bezout_orthogonality", "padic bezout"),
    ("padic::zp_tensor_norm", "padic tensor"),
    ("padic::s1_kernel_element_norm", "padic s1"),
    ("nuclear::nuclear_norm_diagonal", "nuclear check-diag"),
    ("nuclear::build_cert", "nuclear build"),
    ("nuclear::decompose_through_l1", "nuclear decompose"),
    ("nuclear::decompose_through_linf", "nuclear decompose"),
    ("nuclear::compose_cert", "nuclear compose"),
    ("nuclear::tensor_cert", "nuclear tensor"),
    ("nuclear::psi_phi_nuclear", "nuclear psi-phi"),
    ("homology::roos_complex", "roos build"),
    ("homology::validate_diagram", "roos check"),
    ("homology::limit_via_shift", "tower lim"),
    ("homology::cech_complex", "cech build"),
    ("homology::validate_cover", "cech check"),
    ("homology::truncated_cohomology", "complex cohomology"),
    ("homology::split_check", "split check"),
    ("acceptance::run_all", "suite acceptance"),
    ("cli::corpus_replay", "corpus replay"),
];

pub fn known_subcommands() -> Vec<&'static str> {
    let mut v: Vec<&str> = OP_REGISTRY.iter().map(|&(_, s)| s).collect();
    v.sort();
    v.dedup();
    v
}

/// Runs one job; returns the exit code and the output document.
/// Exit 0 on success, 2 on validation/domain problems (including corpus
/// mismatches), 1 on internal errors.
pub fn run_job(job: &JobSpec) -> (i32, Value) {
    let path = job.subcommand.join(" ");
    match dispatch(&path, job) {
        Ok((code, v)) => (code, v),
        Err(e) => (e.exit_code(), error_document(&e)),
    }
}

pub fn error_document(e: &Error) -> Value {
    json!({ "error": { "kind": e.kind(), "message": e.to_string() } })
}

/// Error document for malformed input JSON, carrying position info.
pub fn json_error_document(e: &serde_json::Error) -> Value {
    json!({
        "error": {
            "kind": "parse",
            "message": e.to_string(),
            "line": e.line(),
            "column": e.column(),
        }
    })
}

fn dispatch(path: &str, job: &JobSpec) -> Result<(i32, Value), Error> {
    let v = match path {
        "scalar norm" => scalar_norm(&job.input)?,
        "scalar scale" => scalar_scale(&job.input)?,
        "scalar axioms" => scalar_axioms(&job.input)?,
        "space norm" => space_norm(&job.input)?,
        "space dual" => space_dual(&job.input)?,
        "space tensor" => space_tensor(&job.input)?,
        "space sym" => space_sym(&job.input)?,
        "space dominate" => space_dominate(&job.input)?,
        "space interchange" => space_interchange(&job.input)?,
        "space kernel" => space_kernel(&job.input)?,
        "norm" => series_norm_cmd(&job.input)?,
        "series mul" => series_mul(&job.input, job.truncation)?,
        "series restrict" => series_restrict(&job.input)?,
        "series delta" => series_delta(&job.input)?,
        "series sigma" => series_sigma(&job.input)?,
        "series shift" => series_shift(&job.input)?,
        "series pair" => series_pair(&job.input)?,
        "series compare" => series_compare(&job.input)?,
        "padic divide" => padic_divide(&job.input)?,
        "padic expand" => padic_expand_cmd(&job.input)?,
        "padic qnorm" => padic_qnorm(&job.input, job.truncation)?,
        "padic bezout" => padic_bezout(&job.input)?,
        "padic tensor" => padic_tensor(&job.input)?,
        "padic s1" => padic_s1(&job.input, job.truncation)?,
        "nuclear check-diag" => nuclear_check_diag(&job.input, job.truncation)?,
        "nuclear build" => nuclear_build(&job.input)?,
        "nuclear decompose" => nuclear_decompose(&job.input)?,
        "nuclear compose" => nuclear_compose(&job.input)?,
        "nuclear tensor" => nuclear_tensor(&job.input)?,
        "nuclear psi-phi" => nuclear_psi_phi(&job.input, job.truncation)?,
        "roos build" => roos_build(&job.input)?,
        "roos check" => roos_check(&job.input)?,
        "tower lim" => tower_lim(&job.input)?,
        "cech build" => cech_build(&job.input)?,
        "cech check" => cech_check(&job.input)?,
        "complex cohomology" => complex_cohomology(&job.input)?,
        "split check" => split_check_cmd(&job.input)?,
        "suite acceptance" => return suite_acceptance(&job.input, job.seed),
        "corpus replay" => return corpus_replay_cmd(&job.input),
        _ => {
            return Err(Error::Validation(format!(
                "unknown subcommand {path:?}; known: {}",
                known_subcommands().join(", ")
            )))
        }
    };
    Ok((0, v))
}

// ---------------------------------------------------------------------------
// Shared JSON helpers
// ---------------------------------------------------------------------------

fn field<'a>(input: &'a Value, name: &str) -> Result<&'a Value, Error> {
    input
        .get(name)
        .ok_or_else(|| Error::Validation(format!("missing input field {name:?}")))
}

fn parse_from<T: for<'de> Deserialize<'de>>(v: &Value, what: &str) -> Result<T, Error> {
    serde_json::from_value(v.clone())
        .map_err(|e| Error::Validation(format!("invalid {what}: {e}")))
}

fn to_value<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("library types serialize")
}

fn rat_field(input: &Value, name: &str) -> Result<Rat, Error> {
    let v = field(input, name)?;
    let s = v
        .as_str()
        .ok_or_else(|| Error::Validation(format!("{name} must be a \"num/den\" string")))?;
    parse_rat(s)
}

fn u64_field(input: &Value, name: &str) -> Result<u64, Error> {
    field(input, name)?
        .as_u64()
        .ok_or_else(|| Error::Validation(format!("{name} must be a non-negative integer")))
}

fn series_field(input: &Value, name: &str) -> Result<Series, Error> {
    let j: SeriesJson = parse_from(field(input, name)?, name)?;
    Series::from_json(&j)
}

fn radii_field(input: &Value, name: &str) -> Result<Vec<Rat>, Error> {
    let v: Vec<String> = parse_from(field(input, name)?, name)?;
    v.iter().map(|s| parse_rat(s)).collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct IdxVal {
    idx: MultiIndex,
    val: String,
}

fn coeffs_from_json(v: &Value, ring: &BaseRing, what: &str) -> Result<Coeffs, Error> {
    let entries: Vec<IdxVal> = parse_from(v, what)?;
    let mut out = BTreeMap::new();
    for e in entries {
        let val = parse_rat(&e.val)?;
        out.insert(e.idx, Scalar::from_rat(ring, val)?);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// scalar ...
// ---------------------------------------------------------------------------

fn scalar_norm(input: &Value) -> Result<Value, Error> {
    let j: ScalarJson = parse_from(field(input, "scalar")?, "scalar")?;
    let s = Scalar::from_json(&j)?;
    Ok(json!({ "norm": to_value(&s.norm()) }))
}

fn scalar_scale(input: &Value) -> Result<Value, Error> {
    let norm: NormValue = parse_from(field(input, "norm")?, "norm")?;
    let factor = rat_field(input, "factor")?;
    Ok(json!({ "norm": to_value(&crate::norm::scale_norm(&norm, &factor)?) }))
}

fn scalar_axioms(input: &Value) -> Result<Value, Error> {
    let ring: BaseRing = parse_from(field(input, "ring")?, "ring")?;
    let samples: Vec<String> = parse_from(field(input, "samples")?, "samples")?;
    let samples = samples
        .iter()
        .map(|s| Scalar::from_rat(&ring, parse_rat(s)?))
        .collect::<Result<Vec<_>, _>>()?;
    let report = crate::scalars::check_ring_axioms(&ring, &samples)?;
    Ok(to_value(&report))
}

// ---------------------------------------------------------------------------
// space ...
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
struct SeqElementJson {
    coeffs: Vec<IdxVal>,
    weights: WeightFunction,
    mode: SeqMode,
    tail: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    ring: Option<BaseRing>,
}

fn space_norm(input: &Value) -> Result<Value, Error> {
    let j: SeqElementJson = parse_from(field(input, "element")?, "element")?;
    let ring = j.ring.clone().unwrap_or_else(BaseRing::rat_abs);
    let mut coeffs = BTreeMap::new();
    for e in &j.coeffs {
        coeffs.insert(e.idx.clone(), Scalar::from_rat(&ring, parse_rat(&e.val)?)?);
    }
    let tail = NormValue::upper_bound(parse_rat(&j.tail)?);
    let elem = WeightedSeq::new(coeffs, j.weights, j.mode, tail)?;
    Ok(json!({ "norm": to_value(&crate::spaces::seq_norm(&elem)?) }))
}

fn space_dual(input: &Value) -> Result<Value, Error> {
    let d: SpaceDescriptor = parse_from(field(input, "space")?, "space")?;
    d.validate()?;
    Ok(json!({ "space": to_value(&crate::spaces::dual_descriptor(&d)?) }))
}

fn space_tensor(input: &Value) -> Result<Value, Error> {
    let a: SpaceDescriptor = parse_from(field(input, "a")?, "a")?;
    let b: SpaceDescriptor = parse_from(field(input, "b")?, "b")?;
    a.validate()?;
    b.validate()?;
    Ok(json!({ "space": to_value(&crate::spaces::tensor_l1(&a, &b)?) }))
}

fn space_sym(input: &Value) -> Result<Value, Error> {
    let d: SpaceDescriptor = parse_from(field(input, "space")?, "space")?;
    d.validate()?;
    let n = u64_field(input, "degree")? as u32;
    Ok(json!({ "space": to_value(&crate::spaces::sym_power(&d, n)?) }))
}

fn space_dominate(input: &Value) -> Result<Value, Error> {
    let list: Vec<WeightFunction> = parse_from(field(input, "list")?, "list")?;
    let horizon = u64_field(input, "horizon").unwrap_or(32);
    let alpha = crate::spaces::dominate_weights(&list, horizon)?;
    Ok(json!({ "alpha": to_value(&alpha) }))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct GridEntryJson {
    k: u64,
    s: u64,
    w: String,
}

fn space_interchange(input: &Value) -> Result<Value, Error> {
    let entries: Vec<GridEntryJson> = parse_from(field(input, "grid")?, "grid")?;
    let phi2: WeightFunction = parse_from(field(input, "phi2")?, "phi2")?;
    let mut grid = BTreeMap::new();
    for e in &entries {
        grid.insert((e.k, e.s), parse_rat(&e.w)?);
    }
    let maps = crate::spaces::interchange_maps(&grid, &phi2)?;
    let ok = crate::spaces::verify_interchange_identities(&maps)?;
    Ok(json!({
        "phi2_doubled": maps.phi2_doubled.iter().map(format_rat).collect::<Vec<_>>(),
        "iota_bound": format_rat(&maps.iota.bound),
        "pi_bound": format_rat(&maps.pi.bound),
        "identities_ok": ok,
    }))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct SummandJson {
    space: SpaceDescriptor,
    entries: Vec<String>,
}

fn space_kernel(input: &Value) -> Result<Value, Error> {
    let summands: Vec<SummandJson> = parse_from(field(input, "summands")?, "summands")?;
    let summands = summands
        .into_iter()
        .map(|s| {
            s.space.validate()?;
            Ok(DiagonalSummand {
                space: s.space,
                entries: s.entries.iter().map(|e| parse_rat(e)).collect::<Result<Vec<_>, _>>()?,
            })
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let (space, basis) = crate::spaces::kernel_of_coproduct_map(&summands)?;
    Ok(json!({ "space": to_value(&space), "basis": to_value(&basis) }))
}

// ---------------------------------------------------------------------------
// norm / series ...
// ---------------------------------------------------------------------------

fn series_norm_cmd(input: &Value) -> Result<Value, Error> {
    let f = series_field(input, "series")?;
    Ok(json!({ "norm": to_value(&crate::disks::series_norm(&f)?) }))
}

fn series_mul(input: &Value, truncation: Option<u32>) -> Result<Value, Error> {
    let f = series_field(input, "f")?;
    let g = series_field(input, "g")?;
    let product = crate::disks::mul(&f, &g, truncation)?;
    Ok(json!({ "series": to_value(&product.to_json()) }))
}

fn series_restrict(input: &Value) -> Result<Value, Error> {
    let f = series_field(input, "series")?;
    let radii = radii_field(input, "radii")?;
    let g = crate::disks::restrict(&f, &radii)?;
    Ok(json!({ "series": to_value(&g.to_json()) }))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct SlotSeriesJson {
    slot: u64,
    series: SeriesJson,
}

fn family_to_json(fam: &WeightedSeq<Series>) -> Result<Value, Error> {
    let mut comps = Vec::new();
    for (slot, s) in &fam.coeffs {
        comps.push(SlotSeriesJson { slot: slot[0], series: s.to_json() });
    }
    Ok(to_value(&comps))
}

fn series_delta(input: &Value) -> Result<Value, Error> {
    let f = series_field(input, "series")?;
    let e_bound = match input.get("e_bound") {
        Some(v) => parse_rat(
            v.as_str().ok_or_else(|| Error::Validation("e_bound must be a string".into()))?,
        )?,
        None => crate::rat::exp_upper_bound(&f.algebra.radii[0].recip(), 32)?,
    };
    let res = crate::disks::delta_map(&f, &e_bound)?;
    Ok(json!({
        "components": family_to_json(&res.family)?,
        "family_norm": to_value(&res.family_norm),
        "source_norm": to_value(&res.source_norm),
        "e_bound": format_rat(&res.bound_e),
    }))
}

fn family_from_json(
    input: &Value,
    base: &PolydiskAlgebra,
    weights: WeightFunction,
) -> Result<WeightedSeq<Series>, Error> {
    let comps: Vec<SlotSeriesJson> = parse_from(field(input, "components")?, "components")?;
    let mut coeffs = BTreeMap::new();
    for c in comps {
        coeffs.insert(vec![c.slot], Series::from_json(&c.series)?);
    }
    let tail = match input.get("tail") {
        Some(v) => NormValue::upper_bound(parse_rat(
            v.as_str().ok_or_else(|| Error::Validation("tail must be a string".into()))?,
        )?),
        None => NormValue::zero(),
    };
    let _ = base;
    WeightedSeq::new(coeffs, weights, SeqMode::SumL1, tail)
}

fn base_algebra_from(input: &Value) -> Result<PolydiskAlgebra, Error> {
    let r = rat_field(input, "radius")?;
    let psi: Option<WeightFunction> = match input.get("psi") {
        Some(v) if !v.is_null() => Some(parse_from(v, "psi")?),
        _ => None,
    };
    let ring: BaseRing = match input.get("ring") {
        Some(v) if !v.is_null() => parse_from(v, "ring")?,
        _ => BaseRing::rat_abs(),
    };
    PolydiskAlgebra::with_psi(ring, vec![r], DiskMode::Arch, psi)
}

fn series_sigma(input: &Value) -> Result<Value, Error> {
    let base = base_algebra_from(input)?;
    let psi = crate::disks::base_psi(&base);
    let family = family_from_json(input, &base, psi)?;
    let res = crate::disks::sigma_map(&family, &base)?;
    Ok(json!({
        "series": to_value(&res.series.to_json()),
        "family_norm": to_value(&res.family_norm),
        "image_norm": to_value(&res.image_norm),
        "non_expanding": res.non_expanding,
    }))
}

fn series_shift(input: &Value) -> Result<Value, Error> {
    let base = base_algebra_from(input)?;
    let weights = crate::disks::doubled_shifted_psi(&crate::disks::base_psi(&base))?;
    let family = family_from_json(input, &base, weights)?;
    let res = crate::disks::id_minus_shift(&family, &base)?;
    Ok(json!({
        "components": family_to_json(&res.family)?,
        "source_norm": to_value(&res.source_norm),
        "image_norm": to_value(&res.image_norm),
        "non_expanding": res.non_expanding,
    }))
}

fn series_pair(input: &Value) -> Result<Value, Error> {
    let f = series_field(input, "f")?;
    let g = series_field(input, "g")?;
    let dagger = radii_field(input, "dagger_radii")?;
    let res = crate::disks::pairing(&f, &g, &dagger)?;
    Ok(json!({
        "value": format_rat(&res.value.to_rat()),
        "value_norm": to_value(&res.value_norm),
        "bound": format_rat(&res.bound),
        "ok": res.ok,
    }))
}

fn series_compare(input: &Value) -> Result<Value, Error> {
    let f = series_field(input, "series")?;
    let s = radii_field(input, "s")?;
    let t = radii_field(input, "t")?;
    let rep = crate::disks::compare_norms(&f, &s, &t)?;
    Ok(to_value(&rep))
}

// ---------------------------------------------------------------------------
// padic ...
// ---------------------------------------------------------------------------

fn presentation_from(input: &Value, truncation: Option<u32>) -> Result<crate::padic::PadicPresentation, Error> {
    let p = u64_field(input, "p")?;
    let r = rat_field(input, "r")?;
    crate::padic::PadicPresentation::new(p, r, truncation.unwrap_or(16))
}

fn padic_divide(input: &Value) -> Result<Value, Error> {
    let pres = presentation_from(input, None)?;
    let mut bj: SeriesJson = parse_from(field(input, "b")?, "b")?;
    if bj.ring.is_none() {
        bj.ring = Some(BaseRing::int_abs());
    }
    let b = Series::from_json(&bj)?;
    let res = crate::padic::divide_by_x_minus_p(&b, &pres)?;
    Ok(json!({
        "quotient": to_value(&res.quotient.to_json()),
        "quotient_norm": to_value(&res.quotient_norm),
        "dividend_norm": to_value(&res.dividend_norm),
        "bound": format_rat(&res.bound),
    }))
}

fn bigint_field(input: &Value, name: &str) -> Result<BigInt, Error> {
    let v = field(input, name)?;
    let s = match v {
        Value::String(s) => s.clone(),
        Value::Number(n) => n.to_string(),
        _ => return Err(Error::Validation(format!("{name} must be an integer or string"))),
    };
    s.parse().map_err(|_| Error::Parse(format!("invalid integer {s:?}")))
}

fn padic_expand_cmd(input: &Value) -> Result<Value, Error> {
    let pres = presentation_from(input, None)?;
    let n = bigint_field(input, "n")?;
    let e = crate::padic::padic_expand(&n, &pres)?;
    Ok(to_value(&e))
}

fn padic_qnorm(input: &Value, truncation: Option<u32>) -> Result<Value, Error> {
    let pres = presentation_from(input, truncation)?;
    let n = bigint_field(input, "n")?;
    let search = input.get("search_degree").and_then(Value::as_u64).unwrap_or(12) as u32;
    let b = crate::padic::quotient_norm_bounds(&n, &pres, search)?;
    Ok(json!({ "norm": to_value(&b) }))
}

fn padic_bezout(input: &Value) -> Result<Value, Error> {
    let p = u64_field(input, "p")?;
    let q = u64_field(input, "q")?;
    let n = u64_field(input, "n")? as u32;
    let c = crate::padic::bezout_orthogonality(p, q, n)?;
    Ok(to_value(&c))
}

fn padic_tensor(input: &Value) -> Result<Value, Error> {
    let p = u64_field(input, "p")?;
    let r1 = rat_field(input, "r1")?;
    let r2 = rat_field(input, "r2")?;
    Ok(json!({ "ring": to_value(&crate::padic::zp_tensor_norm(p, &r1, &r2)?) }))
}

fn padic_s1(input: &Value, truncation: Option<u32>) -> Result<Value, Error> {
    let p = u64_field(input, "p")?;
    let n = truncation.or(input.get("truncation").and_then(Value::as_u64).map(|v| v as u32)).unwrap_or(16);
    Ok(to_value(&crate::padic::s1_kernel_element_norm(p, n)?))
}

// ---------------------------------------------------------------------------
// nuclear ...
// ---------------------------------------------------------------------------

fn verdict_to_json(v: &DiagonalVerdict) -> Value {
    match v {
        DiagonalVerdict::Nuclear { l, cert } => json!({
            "verdict": "nuclear",
            "l": to_value(l),
            "cert": cert_to_json(cert),
        }),
        DiagonalVerdict::NotNuclear { reason } => {
            json!({ "verdict": "not-nuclear", "reason": reason })
        }
        DiagonalVerdict::Unknown { partial } => {
            json!({ "verdict": "unknown", "partial": format_rat(partial) })
        }
    }
}

fn nuclear_check_diag(input: &Value, truncation: Option<u32>) -> Result<Value, Error> {
    let head: Vec<String> = parse_from(field(input, "head")?, "head")?;
    let tail: Option<TailRule> = match input.get("tail") {
        Some(v) if !v.is_null() => Some(parse_from(v, "tail")?),
        _ => None,
    };
    let entries = crate::acceptance::diagonal_entries_from_parts(&head, tail)?;
    let tau = rat_field(input, "tau")?;
    let rho = rat_field(input, "rho")?;
    let n = truncation.unwrap_or(64);
    let v = crate::nuclear::nuclear_norm_diagonal(&entries, &tau, &rho, n)?;
    Ok(verdict_to_json(&v))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct CertTermJson {
    w: Vec<IdxVal>,
    alpha: Vec<IdxVal>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct CertJson {
    domain: SpaceDescriptor,
    codomain: SpaceDescriptor,
    terms: Vec<CertTermJson>,
    l: NormValue,
    tail: NormValue,
}

fn cert_to_json(cert: &NuclearCert) -> Value {
    let terms: Vec<CertTermJson> = cert
        .terms
        .iter()
        .map(|t| CertTermJson {
            w: t.w
                .iter()
                .map(|(idx, s)| IdxVal { idx: idx.clone(), val: format_rat(&s.to_rat()) })
                .collect(),
            alpha: t
                .alpha
                .iter()
                .map(|(idx, s)| IdxVal { idx: idx.clone(), val: format_rat(&s.to_rat()) })
                .collect(),
        })
        .collect();
    to_value(&CertJson {
        domain: cert.domain.clone(),
        codomain: cert.codomain.clone(),
        terms,
        l: cert.l_value.clone(),
        tail: cert.tail.clone(),
    })
}

fn cert_from_json(v: &Value) -> Result<NuclearCert, Error> {
    let j: CertJson = parse_from(v, "certificate")?;
    j.domain.validate()?;
    j.codomain.validate()?;
    let mut terms = Vec::new();
    for t in &j.terms {
        let mut w = BTreeMap::new();
        for e in &t.w {
            w.insert(e.idx.clone(), Scalar::from_rat(&j.codomain.ring, parse_rat(&e.val)?)?);
        }
        let mut alpha = BTreeMap::new();
        for e in &t.alpha {
            alpha.insert(e.idx.clone(), Scalar::from_rat(&j.domain.ring, parse_rat(&e.val)?)?);
        }
        terms.push(CertTerm { w, alpha });
    }
    let cert = NuclearCert::assemble(j.domain, j.codomain, terms, j.tail)?;
    if cert.l_value != j.l {
        return Err(Error::Validation(
            "stored L disagrees with the recomputed value; certificate rejected".into(),
        ));
    }
    Ok(cert)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ColumnJson {
    col: MultiIndex,
    entries: Vec<IdxVal>,
}

fn map_from_json(v: &Value) -> Result<BoundedMap, Error> {
    let domain: SpaceDescriptor = parse_from(field(v, "domain")?, "domain")?;
    let codomain: SpaceDescriptor = parse_from(field(v, "codomain")?, "codomain")?;
    domain.validate()?;
    codomain.validate()?;
    let bound = rat_field(v, "bound")?;
    let check: Vec<MultiIndex> = match v.get("check") {
        Some(c) => parse_from(c, "check")?,
        None => Vec::new(),
    };
    let action = if let Some(d) = v.get("diagonal") {
        let entries = coeffs_from_json(d, &domain.ring, "diagonal")?;
        MapAction::Diagonal { entries }
    } else if let Some(c) = v.get("columns") {
        let cols: Vec<ColumnJson> = parse_from(c, "columns")?;
        let mut columns = BTreeMap::new();
        for col in cols {
            let mut entries = BTreeMap::new();
            for e in &col.entries {
                entries.insert(e.idx.clone(), Scalar::from_rat(&codomain.ring, parse_rat(&e.val)?)?);
            }
            columns.insert(col.col, entries);
        }
        MapAction::ColumnFinite { columns }
    } else {
        return Err(Error::Validation("map needs a \"diagonal\" or \"columns\" action".into()));
    };
    BoundedMap::new(domain, codomain, action, bound, &check)
}

fn nuclear_build(input: &Value) -> Result<Value, Error> {
    let map = map_from_json(field(input, "map")?)?;
    let cert = crate::nuclear::build_cert(&map)?;
    Ok(cert_to_json(&cert))
}

fn check_indices_from(input: &Value, cert: &NuclearCert) -> Result<Vec<MultiIndex>, Error> {
    match input.get("check") {
        Some(v) => parse_from(v, "check"),
        None => {
            let mut out: Vec<MultiIndex> = Vec::new();
            for t in &cert.terms {
                for idx in t.alpha.keys() {
                    if !out.contains(idx) {
                        out.push(idx.clone());
                    }
                }
            }
            out.sort();
            Ok(out)
        }
    }
}

fn nuclear_decompose(input: &Value) -> Result<Value, Error> {
    let cert = cert_from_json(field(input, "cert")?)?;
    let via = field(input, "via")?.as_str().unwrap_or("l1");
    let check = check_indices_from(input, &cert)?;
    match via {
        "l1" => {
            let dec = crate::nuclear::decompose_through_l1(&cert, &check)?;
            Ok(json!({
                "middle": to_value(&dec.middle),
                "p": cert_to_json(&dec.p),
                "c_bound": to_value(&dec.c.bound),
            }))
        }
        "linf" => {
            let dec = crate::nuclear::decompose_through_linf(&cert, &check)?;
            Ok(json!({
                "middle": to_value(&dec.middle),
                "p": cert_to_json(&dec.p),
                "c_bound": to_value(&dec.c.bound),
            }))
        }
        other => Err(Error::Validation(format!("via must be \"l1\" or \"linf\", got {other:?}"))),
    }
}

fn nuclear_compose(input: &Value) -> Result<Value, Error> {
    let cert = cert_from_json(field(input, "cert")?)?;
    let map = map_from_json(field(input, "map")?)?;
    let side = match field(input, "side")?.as_str() {
        Some("pre") => crate::nuclear::ComposeSide::Pre,
        Some("post") => crate::nuclear::ComposeSide::Post,
        _ => return Err(Error::Validation("side must be \"pre\" or \"post\"".into())),
    };
    let out = crate::nuclear::compose_cert(&cert, &map, side)?;
    Ok(cert_to_json(&out))
}

fn nuclear_tensor(input: &Value) -> Result<Value, Error> {
    let a = cert_from_json(field(input, "a")?)?;
    let b = cert_from_json(field(input, "b")?)?;
    let out = crate::nuclear::tensor_cert(&a, &b)?;
    Ok(cert_to_json(&out))
}

fn nuclear_psi_phi(input: &Value, truncation: Option<u32>) -> Result<Value, Error> {
    let psi: WeightFunction = parse_from(field(input, "psi")?, "psi")?;
    let phi: WeightFunction = parse_from(field(input, "phi")?, "phi")?;
    let r = rat_field(input, "r")?;
    let v = crate::nuclear::psi_phi_nuclear(&psi, &phi, &r, truncation.unwrap_or(40))?;
    Ok(verdict_to_json(&v))
}

// ---------------------------------------------------------------------------
// roos / tower / cech / complex / split
// ---------------------------------------------------------------------------

fn roos_build(input: &Value) -> Result<Value, Error> {
    let dj: FiniteDiagramJson = parse_from(field(input, "diagram")?, "diagram")?;
    let diagram = FiniteDiagram::from_json(&dj)?;
    let max_len = input.get("max_chain_len").and_then(Value::as_u64).unwrap_or(2) as usize;
    let reduced = input.get("reduced").and_then(Value::as_bool).unwrap_or(false);
    let k = crate::homology::roos_complex(&diagram, max_len, reduced)?;
    Ok(json!({ "complex": to_value(&k.to_json()) }))
}

fn roos_check(input: &Value) -> Result<Value, Error> {
    let dj: FiniteDiagramJson = parse_from(field(input, "diagram")?, "diagram")?;
    let diagram = FiniteDiagram::from_json(&dj)?;
    diagram.validate()?;
    Ok(json!({
        "ok": true,
        "objects": diagram.objects.len(),
        "relations": diagram.relations.len(),
    }))
}

fn tower_lim(input: &Value) -> Result<Value, Error> {
    let tj: TowerJson = parse_from(field(input, "tower")?, "tower")?;
    let tower = TowerDiagram::from_json(&tj)?;
    let psi: WeightFunction = match input.get("psi") {
        Some(v) if !v.is_null() => parse_from(v, "psi")?,
        _ => WeightFunction::identity_weight(),
    };
    let lim = crate::homology::limit_via_shift(&tower, &psi)?;
    let kernel: Vec<Vec<String>> = lim
        .kernel_basis
        .iter()
        .map(|v| v.iter().map(format_rat).collect())
        .collect();
    Ok(json!({
        "kernel_basis": kernel,
        "map": to_value(&lim.map.to_json()),
        "weight_report": to_value(&lim.weight_report),
    }))
}

fn cover_from_input(input: &Value) -> Result<crate::homology::CoverSpec, Error> {
    if let Some(loc) = input.get("localization") {
        let primes: Vec<u64> = parse_from(field(loc, "primes")?, "primes")?;
        let rank = loc.get("rank").and_then(Value::as_u64).unwrap_or(1) as usize;
        let max_degree = input.get("max_degree").and_then(Value::as_u64).unwrap_or(2) as usize;
        return crate::homology::localization_cover(&primes, rank, max_degree);
    }
    if let Some(id) = input.get("identity") {
        let dim = id.get("dim").and_then(Value::as_u64).unwrap_or(1) as usize;
        let max_degree = input.get("max_degree").and_then(Value::as_u64).unwrap_or(2) as usize;
        return Ok(crate::homology::identity_cover(
            crate::homology::DiagramObject::unit("M", dim),
            max_degree,
        ));
    }
    Err(Error::Validation(
        "cover input needs a \"localization\" or \"identity\" builder".into(),
    ))
}

fn cech_build(input: &Value) -> Result<Value, Error> {
    let cover = cover_from_input(input)?;
    let max_degree = input.get("max_degree").and_then(Value::as_u64).unwrap_or(2) as usize;
    let k = crate::homology::cech_complex(&cover, max_degree)?;
    Ok(json!({ "complex": to_value(&k.to_json()) }))
}

fn cech_check(input: &Value) -> Result<Value, Error> {
    let cover = cover_from_input(input)?;
    let max_degree = input.get("max_degree").and_then(Value::as_u64).unwrap_or(2) as usize;
    cover.validate(max_degree)?;
    Ok(json!({ "ok": true, "pieces": cover.pieces.len() }))
}

fn complex_cohomology(input: &Value) -> Result<Value, Error> {
    let kj: ChainComplexJson = parse_from(field(input, "complex")?, "complex")?;
    let k = ChainComplex::from_json(&kj)?;
    let degree = u64_field(input, "degree")? as usize;
    let h = crate::homology::truncated_cohomology(&k, degree)?;
    let basis: Vec<Vec<String>> = h.basis.iter().map(|v| v.iter().map(format_rat).collect()).collect();
    Ok(json!({
        "degree": h.degree,
        "dimension": h.dimension,
        "kernel_dim": h.kernel_dim,
        "image_dim": h.image_dim,
        "basis": basis,
    }))
}

fn split_check_cmd(input: &Value) -> Result<Value, Error> {
    let r = rat_field(input, "r")?;
    let psi: Option<WeightFunction> = match input.get("psi") {
        Some(v) if !v.is_null() => Some(parse_from(v, "psi")?),
        _ => None,
    };
    let degree = input.get("degree").and_then(Value::as_u64).unwrap_or(50) as u32;
    let e_bound = match input.get("e_bound") {
        Some(v) => parse_rat(
            v.as_str().ok_or_else(|| Error::Validation("e_bound must be a string".into()))?,
        )?,
        None => crate::rat::exp_upper_bound(&r.recip(), 32)?,
    };
    let rep = crate::homology::split_check(&r, psi, degree, &e_bound)?;
    Ok(to_value(&rep))
}

// ---------------------------------------------------------------------------
// suite / corpus
// ---------------------------------------------------------------------------

fn suite_acceptance(input: &Value, seed: Option<u64>) -> Result<(i32, Value), Error> {
    let seed = seed.unwrap_or(7);
    let only: Option<Vec<u32>> = match input.get("only") {
        Some(v) => Some(parse_from(v, "only")?),
        None => None,
    };
    let results: Vec<crate::acceptance::CriterionResult> = match only {
        Some(ids) => ids.iter().map(|&id| crate::acceptance::run_criterion(id, seed)).collect(),
        None => crate::acceptance::run_all(seed),
    };
    for r in &results {
        eprintln!("{}", r.line());
    }
    let all_passed = results.iter().all(|r| r.passed);
    let code = if all_passed { 0 } else { 2 };
    Ok((code, json!({ "all_passed": all_passed, "results": to_value(&results) })))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CorpusCase {
    pub name: String,
    pub ok: bool,
    pub detail: String,
}

/// Replays a directory of `<name>.in.json` / `<name>.out.json` pairs and
/// compares outputs byte for byte. Missing or corrupted expectation
/// files are failures; an empty directory passes with a warning.
pub fn corpus_replay(dir: &Path) -> Result<(Vec<CorpusCase>, bool), Error> {
    let mut cases = Vec::new();
    let entries = std::fs::read_dir(dir)
        .map_err(|e| Error::Validation(format!("cannot read corpus directory {dir:?}: {e}")))?;
    let mut inputs: Vec<std::path::PathBuf> = entries
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.file_name().and_then(|n| n.to_str()).is_some_and(|n| n.ends_with(".in.json")))
        .collect();
    inputs.sort();
    for input_path in inputs {
        let name = input_path
            .file_name()
            .and_then(|n| n.to_str())
            .unwrap_or("case")
            .trim_end_matches(".in.json")
            .to_string();
        let expected_path = input_path.with_file_name(format!("{name}.out.json"));
        let raw = match std::fs::read_to_string(&input_path) {
            Ok(s) => s,
            Err(e) => {
                cases.push(CorpusCase { name, ok: false, detail: format!("unreadable input: {e}") });
                continue;
            }
        };
        let job: JobSpec = match serde_json::from_str(&raw) {
            Ok(j) => j,
            Err(e) => {
                cases.push(CorpusCase { name, ok: false, detail: format!("invalid job: {e}") });
                continue;
            }
        };
        let (_, output) = run_job(&job);
        let produced = serde_json::to_string(&output).expect("serializable");
        match std::fs::read_to_string(&expected_path) {
            Err(_) => {
                cases.push(CorpusCase {
                    name,
                    ok: false,
                    detail: "missing expected output file".into(),
                });
            }
            Ok(expected) => {
                let expected = expected.trim_end_matches('\n');
                if produced == expected {
                    cases.push(CorpusCase { name, ok: true, detail: "byte-exact".into() });
                } else {
                    cases.push(CorpusCase {
                        name,
                        ok: false,
                        detail: format!("mismatch: produced {produced}"),
                    });
                }
            }
        }
    }
    let all = cases.iter().all(|c| c.ok);
    Ok((cases, all))
}

fn corpus_replay_cmd(input: &Value) -> Result<(i32, Value), Error> {
    let dir = match input.get("directory").and_then(Value::as_str) {
        Some(d) => d.to_string(),
        None => std::env::var("BANARITH_CORPUS")
            .map_err(|_| Error::Validation("no directory given and BANARITH_CORPUS unset".into()))?,
    };
    let (cases, all) = corpus_replay(Path::new(&dir))?;
    let warning = if cases.is_empty() { Some("corpus directory is empty") } else { None };
    let code = if all { 0 } else { 2 };
    Ok((code, json!({ "all_passed": all, "cases": to_value(&cases), "warning": warning })))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// The canonical operation list: every spec operation must appear in
    /// the registry exactly once.
    const OPS: &[&str] = &[
        "scalars::norm",
        "scalars::scale_norm",
        "scalars::check_ring_axioms",
        "spaces::seq_norm",
        "spaces::dual_descriptor",
        "spaces::tensor_l1",
        "spaces::sym_power",
        "spaces::dominate_weights",
        "spaces::interchange_maps",
        "spaces::kernel_of_coproduct_map",
        "disks::series_norm",
        "disks::mul",
        "disks::restrict",
        "disks::delta_map",
        "disks::sigma_map",
        "disks::id_minus_shift",
        "disks::pairing",
        "disks::compare_norms",
        "padic::divide_by_x_minus_p",
        "padic::padic_expand",
        "padic::quotient_norm_bounds",
        "padic::bezout_orthogonality",
        "padic::zp_tensor_norm",
        "padic::s1_kernel_element_norm",
        "nuclear::nuclear_norm_diagonal",
        "nuclear::build_cert",
        "nuclear::decompose_through_l1",
        "nuclear::decompose_through_linf",
        "nuclear::compose_cert",
        "nuclear::tensor_cert",
        "nuclear::psi_phi_nuclear",
        "homology::roos_complex",
        "homology::validate_diagram",
        "homology::limit_via_shift",
        "homology::cech_complex",
        "homology::validate_cover",
        "homology::truncated_cohomology",
        "homology::split_check",
        "acceptance::run_all",
        "cli::corpus_replay",
    ];

    #[test]
    fn registry_covers_every_operation_once() {
        for op in OPS {
            let count = OP_REGISTRY.iter().filter(|&&(o, _)| o == *op).count();
            assert_eq!(count, 1, "operation {op} must appear exactly once in the registry");
        }
        assert_eq!(OPS.len(), OP_REGISTRY.len(), "registry has unexpected extra entries");
        // every registered subcommand resolves in the dispatcher
        for sub in known_subcommands() {
            let job = JobSpec {
                subcommand: sub.split(' ').map(String::from).collect(),
                input: Value::Object(Default::default()),
                truncation: None,
                seed: None,
            };
            let (code, out) = run_job(&job);
            // missing inputs give validation errors (2), never "unknown"
            if code != 0 {
                let msg = out["error"]["message"].as_str().unwrap_or("");
                assert!(!msg.contains("unknown subcommand"), "{sub}: {msg}");
            }
        }
        // and an unknown one is rejected
        let job = JobSpec {
            subcommand: vec!["nope".into()],
            input: Value::Null,
            truncation: None,
            seed: None,
        };
        let (code, out) = run_job(&job);
        assert_eq!(code, 2);
        assert!(out["error"]["message"].as_str().unwrap().contains("unknown subcommand"));
    }

    #[test]
    fn padic_divide_example_through_the_cli() {
        let job: JobSpec = serde_json::from_value(json!({
            "subcommand": ["padic", "divide"],
            "input": {
                "p": 5,
                "r": "1/2",
                "b": {
                    "radii": ["1/2"],
                    "mode": "arch",
                    "coeffs": [{"idx": [0], "val": "-5"}, {"idx": [1], "val": "1"}],
                    "tail": "0"
                }
            }
        }))
        .unwrap();
        let (code, out) = run_job(&job);
        assert_eq!(code, 0, "{out}");
        assert_eq!(out["quotient"]["coeffs"][0]["val"], "1");
        assert_eq!(out["bound"], "11/9");
        assert_eq!(out["quotient_norm"]["upper"], "1");
    }

    #[test]
    fn series_norm_example_through_the_cli() {
        let job: JobSpec = serde_json::from_value(json!({
            "subcommand": ["norm"],
            "input": {
                "series": {
                    "radii": ["1/2"],
                    "mode": "arch",
                    "coeffs": [{"idx": [0], "val": "1"}, {"idx": [1], "val": "1"}],
                    "tail": "0"
                }
            }
        }))
        .unwrap();
        let (code, out) = run_job(&job);
        assert_eq!(code, 0, "{out}");
        assert_eq!(out["norm"]["lower"], "3/2");
        assert_eq!(out["norm"]["upper"], "3/2");
    }

    #[test]
    fn outputs_are_byte_deterministic() {
        let job: JobSpec = serde_json::from_value(json!({
            "subcommand": ["padic", "bezout"],
            "input": { "p": 2, "q": 3, "n": 2 }
        }))
        .unwrap();
        let (_, a) = run_job(&job);
        let (_, b) = run_job(&job);
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        assert_eq!(a["a"], json!("-2"));
        assert_eq!(a["bound"], "13/36");
    }

    #[test]
    fn cert_round_trips_bit_exactly() {
        let job: JobSpec = serde_json::from_value(json!({
            "subcommand": ["nuclear", "check-diag"],
            "input": { "head": ["1"], "tail": {"kind": "table-const", "from": 0, "value": "1"},
                        "tau": "1", "rho": "1/2" },
            "truncation": 8
        }))
        .unwrap();
        let (code, out) = run_job(&job);
        assert_eq!(code, 0, "{out}");
        let cert_json = out["cert"].clone();
        let cert = cert_from_json(&cert_json).unwrap();
        let again = cert_to_json(&cert);
        assert_eq!(
            serde_json::to_string(&cert_json).unwrap(),
            serde_json::to_string(&again).unwrap()
        );
    }
}
