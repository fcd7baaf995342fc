//! Job configuration: the JSON schema, its validation, and resolution into
//! exact curve/divisor/splitting objects.
//!
//! A job file pins down everything a run needs:
//!
//! ```json
//! {
//!   "field": { "p": 3, "m": 1 },
//!   "curve": { "kind": "artin_schreier", "h": "x^2 - 1" },
//!   "divisor": [
//!     { "x_place": "infinite", "branch": "ram", "multiplicity": 8 },
//!     { "x_place": [2, 1], "branch": "0", "multiplicity": 2 }
//!   ],
//!   "splitting_set": "all_rational_minus_support",
//!   "search": { "max_dim": 2, "budget": 1000000, "strategy": "exhaustive", "seed": 1 }
//! }
//! ```
//!
//! `x_place` is either the string `"infinite"`, a constant-first coefficient
//! array of a monic irreducible polynomial in x, or a polynomial expression
//! string.  `branch` selects the place above that x-place: `"ram"` for the
//! ramified branch, an expression in x whose value at the x-root equals the
//! branch's y-residue, or a plain index into the computed fibre.  It may be
//! omitted when the fibre has a single place.

use std::path::Path;
use std::sync::Arc;

use serde::Deserialize;
use sha2::{Digest, Sha256};

use asforge_core::curve::{
    places_above, rational_places, BranchTag, CPlace, CurveModel, Divisor, SplittingContext,
    XPlace,
};
use asforge_core::error::{Error, Result};
use asforge_core::expr::parse_func;
use asforge_core::gf::{Elt, FieldDesc};
use asforge_core::poly::{Poly, RatFunc};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    pub field: FieldSpec,
    pub curve: CurveSpec,
    pub divisor: Vec<DivisorEntry>,
    #[serde(default)]
    pub splitting_set: SplittingSpec,
    #[serde(default)]
    pub search: SearchSpec,
    /// Default series precision override for the curve model.
    #[serde(default)]
    pub precision: Option<i64>,
    /// Free-form notes; carried into reports, never interpreted.
    #[serde(default)]
    pub annotations: Vec<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSpec {
    pub p: u8,
    #[serde(default = "default_one")]
    pub m: usize,
    /// Constant-first coefficients of the modulus of F_{p^m} over F_p;
    /// omitted means the crate's deterministic default modulus.
    #[serde(default)]
    pub modulus: Option<Vec<u8>>,
}

fn default_one() -> usize {
    1
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveSpec {
    /// "artin_schreier" (y^p - y = h(x)) or "rational" (the projective line).
    pub kind: String,
    /// h as an expression in x, e.g. "x^3 + x" or "(x^2+1)/x".
    #[serde(default)]
    pub h: Option<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DivisorEntry {
    pub x_place: XPlaceSpec,
    #[serde(default)]
    pub branch: Option<BranchSpec>,
    pub multiplicity: i64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum XPlaceSpec {
    /// "infinite", or a polynomial expression in x.
    Name(String),
    /// Constant-first coefficients over the prime field.
    Coeffs(Vec<i64>),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum BranchSpec {
    /// Index into the computed fibre, in its deterministic order.
    Index(usize),
    /// "ram", or an expression in x for the y-residue.
    Tag(String),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum SplittingSpec {
    /// Only "all_rational_minus_support" is recognised.
    Mode(String),
    /// An explicit list of rational places that every cover must split.
    Explicit(Vec<PointSpec>),
}

impl Default for SplittingSpec {
    fn default() -> Self {
        SplittingSpec::Mode("all_rational_minus_support".into())
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointSpec {
    pub x_place: XPlaceSpec,
    #[serde(default)]
    pub branch: Option<BranchSpec>,
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct SearchSpec {
    pub max_dim: Option<usize>,
    /// Total number of subspaces a search may evaluate (default 10^6).
    pub budget: Option<u128>,
    /// "exhaustive", "greedy" or "random"; omitted means exhaustive when it
    /// fits the budget and heuristics otherwise.
    pub strategy: Option<String>,
    pub seed: Option<u64>,
    /// Only "max_points_then_min_genus" is recognised.
    pub target: Option<String>,
}

/// A config resolved against exact arithmetic: the model, the divisor with
/// actual places, and the splitting context.
pub struct Job {
    pub config: JobConfig,
    pub config_sha256: String,
    pub curve: Arc<CurveModel>,
    pub divisor: Divisor,
    pub ctx: SplittingContext,
    pub explicit_split: bool,
}

impl std::fmt::Debug for Job {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Job")
            .field("config_sha256", &self.config_sha256)
            .field("divisor", &self.divisor)
            .finish_non_exhaustive()
    }
}

pub fn load_job(path: &Path, precision_flag: Option<i64>) -> Result<Job> {
    let raw = std::fs::read(path)
        .map_err(|e| Error::Invalid(format!("cannot read config {}: {e}", path.display())))?;
    let sha = {
        let mut h = Sha256::new();
        h.update(&raw);
        let out = h.finalize();
        out.iter().map(|b| format!("{b:02x}")).collect::<String>()
    };
    let config: JobConfig = serde_json::from_slice(&raw)
        .map_err(|e| Error::Parse(format!("config {}: {e}", path.display())))?;
    resolve_job(config, sha, precision_flag)
}

pub fn resolve_job(
    config: JobConfig,
    config_sha256: String,
    precision_flag: Option<i64>,
) -> Result<Job> {
    let field = FieldDesc::new(config.field.p, config.field.m, config.field.modulus.clone())?;
    let mut curve = match config.curve.kind.as_str() {
        "rational" => {
            if config.curve.h.is_some() {
                return Err(Error::Invalid(
                    "a rational curve takes no equation h".into(),
                ));
            }
            CurveModel::rational(field)?
        }
        "artin_schreier" => {
            let src = config.curve.h.as_deref().ok_or_else(|| {
                Error::Invalid("an artin_schreier curve needs an equation h".into())
            })?;
            let h = parse_xratfunc(&field, src)?;
            CurveModel::artin_schreier(field, h)?
        }
        other => {
            return Err(Error::Invalid(format!(
                "unknown curve kind '{other}' (expected 'artin_schreier' or 'rational')"
            )))
        }
    };
    if let Some(prec) = precision_flag.or(config.precision) {
        curve = curve.with_default_prec(prec)?;
    }

    if config.divisor.is_empty() {
        return Err(Error::Invalid("the divisor must not be empty".into()));
    }
    let mut entries = Vec::new();
    for entry in &config.divisor {
        if entry.multiplicity <= 0 {
            return Err(Error::Invalid(
                "divisor multiplicities must be positive".into(),
            ));
        }
        let place = resolve_place(&curve, &entry.x_place, entry.branch.as_ref())?;
        entries.push((place, entry.multiplicity));
    }
    let divisor = Divisor::new(entries);

    let (ctx, explicit_split) = build_context(&curve, &divisor, &config.splitting_set)?;

    if let Some(t) = &config.search.target {
        if t != "max_points_then_min_genus" {
            return Err(Error::Invalid(format!("unknown search target '{t}'")));
        }
    }

    Ok(Job {
        config,
        config_sha256,
        curve,
        divisor,
        ctx,
        explicit_split,
    })
}

/// Parse an expression in x alone into a rational function over the field,
/// by reading it on a rational model of the same constant field.
pub fn parse_xratfunc(field: &Arc<FieldDesc>, src: &str) -> Result<RatFunc> {
    let line = CurveModel::rational(field.clone())?;
    let f = parse_func(&line, src)?;
    Ok(f.coeffs()[0].clone())
}

fn parse_xplace(curve: &Arc<CurveModel>, spec: &XPlaceSpec) -> Result<XPlace> {
    match spec {
        XPlaceSpec::Name(s) if s == "infinite" || s == "inf" => Ok(XPlace::Infinite),
        XPlaceSpec::Name(s) => {
            let r = parse_xratfunc(curve.field(), s)?;
            if !r.is_poly() {
                return Err(Error::Invalid(format!(
                    "x-place '{s}' must be a polynomial in x"
                )));
            }
            XPlace::finite(r.num().clone())
        }
        XPlaceSpec::Coeffs(v) => XPlace::finite(Poly::from_ints(curve.field(), v)),
    }
}

/// Evaluate a rational function of x at a point of an extension field.
fn eval_xratfunc_in(res: &Arc<FieldDesc>, r: &RatFunc, alpha: &Elt) -> Result<Elt> {
    let horner = |poly: &Poly| -> Result<Elt> {
        let Some(deg) = poly.deg() else {
            return Ok(res.zero());
        };
        let mut acc = res.zero();
        for i in (0..=deg).rev() {
            acc = acc.mul(alpha).add(&res.lift(&poly.coeff(i))?);
        }
        Ok(acc)
    };
    let num = horner(r.num())?;
    let den = horner(r.den())?;
    if den.is_zero() {
        return Err(Error::PoleAtPoint(
            "branch expression has a pole at the x-root of the place".into(),
        ));
    }
    num.div(&den)
}

/// Pick one place of the fibre above an x-place, following the branch spec.
pub fn resolve_place(
    curve: &Arc<CurveModel>,
    xspec: &XPlaceSpec,
    branch: Option<&BranchSpec>,
) -> Result<CPlace> {
    let xp = parse_xplace(curve, xspec)?;
    let fibre = places_above(curve, &xp, curve.default_prec())?;
    let describe = || match &xp {
        XPlace::Infinite => "infinite".to_string(),
        XPlace::Finite { pi } => pi.render("x"),
    };
    match branch {
        None => {
            if fibre.len() == 1 {
                Ok(fibre.into_iter().next().unwrap())
            } else {
                Err(Error::Invalid(format!(
                    "the fibre above {} has {} branches; pick one",
                    describe(),
                    fibre.len()
                )))
            }
        }
        Some(BranchSpec::Index(i)) => fibre.get(*i).cloned().ok_or_else(|| {
            Error::Invalid(format!(
                "branch index {i} out of range above {} ({} branches)",
                describe(),
                fibre.len()
            ))
        }),
        Some(BranchSpec::Tag(tag)) if tag == "ram" => fibre
            .into_iter()
            .find(|p| p.branch() == &BranchTag::Ram)
            .ok_or_else(|| {
                Error::Invalid(format!("no ramified branch above {}", describe()))
            }),
        Some(BranchSpec::Tag(expr)) => {
            let r = parse_xratfunc(curve.field(), expr)?;
            let mut hit = None;
            for place in fibre {
                let BranchTag::Value(v) = place.branch() else {
                    continue;
                };
                let res = place.residue_field().clone();
                let value = match place.below().residue_root(&res)? {
                    Some(alpha) => eval_xratfunc_in(&res, &r, &alpha)?,
                    None => {
                        // At infinity the branch expression must be constant.
                        if r.num().deg().unwrap_or(0) > 0 || r.den().degree() > 0 {
                            return Err(Error::Invalid(format!(
                                "branch '{expr}' above the infinite place must be a constant"
                            )));
                        }
                        res.lift(&r.num().coeff(0))?
                            .div(&res.lift(&r.den().coeff(0))?)?
                    }
                };
                if &value == v {
                    if hit.is_some() {
                        return Err(Error::Internal(
                            "two branches share a y-residue".into(),
                        ));
                    }
                    hit = Some(place);
                }
            }
            hit.ok_or_else(|| {
                Error::Invalid(format!(
                    "branch '{expr}' does not match any computed branch above {}",
                    describe()
                ))
            })
        }
    }
}

fn build_context(
    curve: &Arc<CurveModel>,
    d: &Divisor,
    spec: &SplittingSpec,
) -> Result<(SplittingContext, bool)> {
    match spec {
        SplittingSpec::Mode(m) if m == "all_rational_minus_support" => {
            Ok((SplittingContext::new(curve, d)?, false))
        }
        SplittingSpec::Mode(m) => Err(Error::Invalid(format!(
            "unknown splitting_set mode '{m}'"
        ))),
        SplittingSpec::Explicit(points) => {
            let places = rational_places(curve)?;
            let delta = places.iter().filter(|p| d.multiplicity(p) > 0).count();
            let mut targets: Vec<CPlace> = Vec::new();
            for ps in points {
                let place = resolve_place(curve, &ps.x_place, ps.branch.as_ref())?;
                if place.degree() != 1 {
                    return Err(Error::Invalid(format!(
                        "split target {} is not a rational place",
                        place.name()
                    )));
                }
                if d.multiplicity(&place) > 0 {
                    return Err(Error::Invalid(format!(
                        "split target {} lies in the divisor support",
                        place.name()
                    )));
                }
                if targets.contains(&place) {
                    return Err(Error::Invalid(format!(
                        "duplicate split target {}",
                        place.name()
                    )));
                }
                targets.push(place);
            }
            Ok((
                SplittingContext {
                    places,
                    delta,
                    split_targets: targets,
                },
                true,
            ))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(src: &str) -> Result<Job> {
        let config: JobConfig = serde_json::from_str(src).map_err(|e| Error::Parse(e.to_string()))?;
        resolve_job(config, "test".into(), None)
    }

    #[test]
    fn resolves_a_basic_job() {
        let job = cfg(
            r#"{
                "field": {"p": 2},
                "curve": {"kind": "artin_schreier", "h": "x^3 + x"},
                "divisor": [
                    {"x_place": "infinite", "branch": "ram", "multiplicity": 3},
                    {"x_place": [0, 1], "branch": "0", "multiplicity": 1},
                    {"x_place": "x + 1", "branch": "1", "multiplicity": 1}
                ]
            }"#,
        )
        .unwrap();
        assert_eq!(job.curve.genus(), 1);
        assert_eq!(job.divisor.degree(), 5);
        assert_eq!(job.ctx.n(), 5);
        assert_eq!(job.ctx.delta, 3);
        assert_eq!(job.ctx.split_targets.len(), 2);
    }

    #[test]
    fn branch_expressions_select_higher_degree_places() {
        // The degree-4 place above x^4 + x^3 + 2 with y-residue 2(x^2+1)/x.
        let job = cfg(
            r#"{
                "field": {"p": 3},
                "curve": {"kind": "artin_schreier", "h": "x^2 - 1"},
                "divisor": [
                    {"x_place": [2, 0, 0, 1, 1], "branch": "2*(x^2+1)/x", "multiplicity": 3}
                ]
            }"#,
        )
        .unwrap();
        let (place, mult) = &job.divisor.entries()[0];
        assert_eq!(place.degree(), 4);
        assert_eq!(*mult, 3);
        // The defining relation of the branch: y - 2(x^2+1)/x vanishes there.
        let f = parse_func(&job.curve, "y - 2*(x^2+1)/x").unwrap();
        let v = asforge_core::curve::valuation(&job.curve, &f, place).unwrap();
        assert!(v > 0);
    }

    #[test]
    fn rejects_bad_specs() {
        // Above x the fibre of y^3 - y = x^2 - 1 is inert: its single branch
        // has a y-residue outside the constant field, so no constant matches.
        let err = cfg(
            r#"{
                "field": {"p": 3},
                "curve": {"kind": "artin_schreier", "h": "x^2 - 1"},
                "divisor": [{"x_place": [0, 1], "branch": "0", "multiplicity": 1}]
            }"#,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Invalid(_)));
        // Branch index out of range.
        let err = cfg(
            r#"{
                "field": {"p": 2},
                "curve": {"kind": "artin_schreier", "h": "x^3 + x"},
                "divisor": [{"x_place": [0, 1], "branch": 5, "multiplicity": 1}]
            }"#,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Invalid(_)));
        // Split target inside the support.
        let err = cfg(
            r#"{
                "field": {"p": 2},
                "curve": {"kind": "artin_schreier", "h": "x^3 + x"},
                "divisor": [{"x_place": "infinite", "branch": "ram", "multiplicity": 3}],
                "splitting_set": [{"x_place": "infinite", "branch": "ram"}]
            }"#,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Invalid(_)));
        // Reducible x-place.
        let err = cfg(
            r#"{
                "field": {"p": 2},
                "curve": {"kind": "artin_schreier", "h": "x^3 + x"},
                "divisor": [{"x_place": [0, 0, 1], "branch": "0", "multiplicity": 1}]
            }"#,
        )
        .unwrap_err();
        assert!(matches!(err, Error::NotIrreducible(_)));
    }

    #[test]
    fn explicit_splitting_sets_shrink_the_targets() {
        let job = cfg(
            r#"{
                "field": {"p": 2},
                "curve": {"kind": "artin_schreier", "h": "x^3 + x"},
                "divisor": [{"x_place": "infinite", "branch": "ram", "multiplicity": 3}],
                "splitting_set": [
                    {"x_place": [0, 1], "branch": "0"},
                    {"x_place": [1, 1], "branch": "1"}
                ]
            }"#,
        )
        .unwrap();
        assert!(job.explicit_split);
        assert_eq!(job.ctx.split_targets.len(), 2);
        assert_eq!(job.ctx.n(), 5);
        assert_eq!(job.ctx.delta, 1);
    }
}
