//! Brute-force recount of fibre-product points, independent of the closed
//! count formulas.
//!
//! The affine part of the curve is enumerated directly: every x0 in F_q with
//! h regular there, every y0 with y0^p - y0 = h(x0).  That enumeration is
//! checked point-by-point against the rational-place census (an affine point
//! with no matching place, or a place the scan misses, is an immediate
//! failure).  Family functions are then evaluated through place expansions —
//! never by substituting coordinates into raw fractions — and each place
//! contributes p^r points when every trace vanishes.  Support places are
//! recounted from the per-line local classifications.  The assembled total
//! must equal the analytic count.

use std::collections::HashMap;

use asforge_core::cover::{FibreStats, LineReport, LineTable};
use asforge_core::curve::{
    evaluate, BranchTag, CPlace, CurveKind, Divisor, SplittingContext, XPlace,
};
use asforge_core::error::{Error, Result};
use asforge_core::gf::Elt;
use asforge_core::local::SplitKind;
use asforge_core::rrspace::LSpace;

use crate::report::ambient_coords;

#[derive(Debug, Clone)]
pub struct ComponentCheck {
    pub f: String,
    pub direct_points: i64,
    pub table_points: i64,
}

#[derive(Debug)]
pub struct OracleOutcome {
    pub r: usize,
    /// Family basis in table-space coordinates, echoed for reporting.
    pub basis: Vec<Vec<u8>>,
    /// Points found by the raw affine enumeration.
    pub affine_points: usize,
    pub split_contribution: i64,
    pub boundary_contribution: i64,
    pub oracle_total: i64,
    pub analytic_total: i64,
    pub components: Vec<ComponentCheck>,
}

pub fn verify_fibre(
    l: &LSpace,
    table: &LineTable,
    stats: &FibreStats,
    d: &Divisor,
    ctx: &SplittingContext,
) -> Result<OracleOutcome> {
    let curve = l.curve();
    let field = curve.field();
    let p = field.p() as i64;
    let r = stats.r;
    let pr = p.pow(r as u32);

    let funcs: Vec<_> = stats
        .basis
        .iter()
        .map(|row| l.elt_from_fp_coords(&ambient_coords(table, row)))
        .collect();
    let line_reps: Vec<&LineReport> = stats.lines.iter().map(|&i| &table.reports()[i]).collect();

    // --- Independent affine enumeration -----------------------------------
    let elems: Vec<Elt> = field.enumerate()?.collect();
    let mut affine: Vec<(Elt, Option<Elt>)> = Vec::new();
    match curve.kind() {
        CurveKind::Rational => {
            for x0 in &elems {
                affine.push((x0.clone(), None));
            }
        }
        CurveKind::ArtinSchreier { h } => {
            for x0 in &elems {
                if h.den().eval(x0).is_zero() {
                    continue;
                }
                let rhs = h.eval(x0)?;
                for y0 in &elems {
                    if y0.pow(p as u128).sub(y0) == rhs {
                        affine.push((x0.clone(), Some(y0.clone())));
                    }
                }
            }
        }
    }

    // --- Bijection with the rational-place census -------------------------
    // Key: (x0, y0) as coefficient vectors; places where y is not an affine
    // coordinate (infinite x, or poles of h) carry no key.
    let key_of_place = |place: &CPlace| -> Option<(Vec<u8>, Vec<u8>)> {
        let XPlace::Finite { pi } = place.below() else {
            return None;
        };
        if pi.degree() != 1 {
            return None;
        }
        let x0 = pi.coeff(0).neg();
        match (curve.kind(), place.branch()) {
            (CurveKind::Rational, BranchTag::Rational) => {
                Some((x0.coeffs().to_vec(), Vec::new()))
            }
            (CurveKind::ArtinSchreier { h }, BranchTag::Value(v)) => {
                if h.den().eval(&x0).is_zero() {
                    None
                } else {
                    Some((x0.coeffs().to_vec(), v.coeffs().to_vec()))
                }
            }
            _ => None,
        }
    };
    let mut place_by_key: HashMap<(Vec<u8>, Vec<u8>), &CPlace> = HashMap::new();
    for place in &ctx.places {
        if let Some(k) = key_of_place(place) {
            if place_by_key.insert(k, place).is_some() {
                return Err(Error::Internal(
                    "two rational places share affine coordinates".into(),
                ));
            }
        }
    }
    let mut hit: Vec<(Vec<u8>, Vec<u8>)> = Vec::new();
    for (x0, y0) in &affine {
        let k = (
            x0.coeffs().to_vec(),
            y0.as_ref().map(|y| y.coeffs().to_vec()).unwrap_or_default(),
        );
        if !place_by_key.contains_key(&k) {
            return Err(Error::OracleMismatch(format!(
                "affine point (x = {}, y = {}) has no matching rational place",
                x0.render("a"),
                y0.as_ref().map(|y| y.render("a")).unwrap_or_default()
            )));
        }
        hit.push(k);
    }
    if hit.len() != place_by_key.len() {
        let hit_set: std::collections::HashSet<_> = hit.iter().collect();
        let missed = place_by_key
            .iter()
            .find(|(k, _)| !hit_set.contains(k))
            .map(|(_, place)| place.name())
            .unwrap_or_default();
        return Err(Error::OracleMismatch(format!(
            "rational place {missed} was not found by the affine enumeration"
        )));
    }

    // --- Contributions away from the support ------------------------------
    let mut split_contribution = 0i64;
    let mut component_direct = vec![0i64; line_reps.len()];
    let mut first_nonsplit: Option<String> = None;
    for place in &ctx.places {
        if d.multiplicity(place) > 0 {
            continue;
        }
        let mut all_zero = true;
        for f in &funcs {
            if evaluate(curve, f, place)?.trace_to_prime() != 0 {
                all_zero = false;
            }
        }
        if all_zero {
            split_contribution += pr;
        } else if first_nonsplit.is_none() {
            first_nonsplit = Some(place.name());
        }
        let mut any_line_nonzero = false;
        for (i, rep) in line_reps.iter().enumerate() {
            let t = evaluate(curve, &rep.f, place)?.trace_to_prime();
            if t == 0 {
                component_direct[i] += p;
            } else {
                any_line_nonzero = true;
            }
        }
        // A place splits in the fibre product exactly when it splits in
        // every component.
        if all_zero == any_line_nonzero {
            return Err(Error::Internal(format!(
                "trace bookkeeping disagrees between the family and its lines at {}",
                place.name()
            )));
        }
    }

    // --- Boundary: support places via local classifications ---------------
    let mut boundary = 0i64;
    for place in &ctx.places {
        if d.multiplicity(place) == 0 {
            continue;
        }
        let mut b = 1i64;
        for (i, rep) in line_reps.iter().enumerate() {
            let class = rep
                .support
                .iter()
                .find(|c| &c.place == place)
                .ok_or_else(|| {
                    Error::Internal("support classification missing a place".into())
                })?;
            let local = match class.kind {
                SplitKind::TotallyRamified => 1,
                SplitKind::Split => p,
                SplitKind::Inert => 0,
            };
            component_direct[i] += local;
            b += local - 1;
        }
        if b < 0 {
            return Err(Error::Internal(format!(
                "negative boundary count above {}",
                place.name()
            )));
        }
        boundary += b;
    }

    // --- Assembled checks --------------------------------------------------
    let mut components = Vec::new();
    for (i, rep) in line_reps.iter().enumerate() {
        if component_direct[i] != rep.points {
            return Err(Error::OracleMismatch(format!(
                "component z^{p} - z = {} recounts to {} points but the table says {}",
                rep.f.render(),
                component_direct[i],
                rep.points
            )));
        }
        components.push(ComponentCheck {
            f: rep.f.render(),
            direct_points: component_direct[i],
            table_points: rep.points,
        });
    }

    if line_reps.iter().all(|rep| rep.splits_all) {
        if let Some(name) = first_nonsplit {
            return Err(Error::OracleMismatch(format!(
                "{name} fails to split although every line is certified to split everywhere"
            )));
        }
        let expected = pr * (ctx.n() as i64 - ctx.delta as i64);
        if split_contribution != expected {
            return Err(Error::OracleMismatch(format!(
                "split places contribute {split_contribution}, the closed form predicts {expected}"
            )));
        }
    }

    let oracle_total = split_contribution + boundary;
    if oracle_total != stats.points {
        return Err(Error::OracleMismatch(format!(
            "oracle total {oracle_total} disagrees with the analytic count {}",
            stats.points
        )));
    }

    Ok(OracleOutcome {
        r,
        basis: stats.basis.clone(),
        affine_points: affine.len(),
        split_contribution,
        boundary_contribution: boundary,
        oracle_total,
        analytic_total: stats.points,
        components,
    })
}
