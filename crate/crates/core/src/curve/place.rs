//! Places of a base curve and their local series embeddings.
//!
//! A place is identified by the x-place below it plus a branch tag: `Ram`
//! for the single totally ramified place of a fibre, or the reduced
//! y-residue for an unramified branch.  Every place carries Laurent-series
//! expansions x(t), y(t) in a local uniformizer; all valuations and
//! evaluations go through those expansions, so removable singularities in a
//! rational expression never need special handling.  Precision is tracked
//! exactly and doubled on demand up to a hard cap.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::gf::{artin_schreier_roots, find_root_split, Elt, FieldDesc};
use crate::local::{
    as_reduce, horner, hensel_root, local_splitting, LaurentSeries, LocalASType, SplitKind,
};
use crate::poly::{Poly, RatFunc};

use super::{lift_ratfunc, pole_budget, CurveKind, CurveModel, FuncElt};

/// Hard ceiling for adaptive precision growth.
pub const PREC_CAP: i64 = 4096;

// ---------------------------------------------------------------------------
// x-places
// ---------------------------------------------------------------------------

/// A place of the rational subfield F_q(x): an irreducible monic polynomial
/// in x, or the place at infinity.
#[derive(Clone, PartialEq, Eq)]
pub enum XPlace {
    Finite { pi: Poly },
    Infinite,
}

impl std::fmt::Debug for XPlace {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            XPlace::Finite { pi } => write!(f, "({})", pi.render("x")),
            XPlace::Infinite => write!(f, "(1/x)"),
        }
    }
}

impl XPlace {
    pub fn finite(pi: Poly) -> Result<XPlace> {
        let pi = pi.make_monic();
        if pi.deg().is_none() || pi.degree() == 0 {
            return Err(Error::Invalid("an x-place needs a non-constant modulus".into()));
        }
        if !pi.is_irreducible() {
            return Err(Error::NotIrreducible(pi.render("x")));
        }
        Ok(XPlace::Finite { pi })
    }

    pub fn finite_linear(x0: &Elt) -> XPlace {
        let field = x0.field().clone();
        XPlace::Finite {
            pi: Poly::from_coeffs(&field, vec![x0.neg(), field.one()]),
        }
    }

    pub fn degree(&self) -> usize {
        match self {
            XPlace::Finite { pi } => pi.degree(),
            XPlace::Infinite => 1,
        }
    }

    /// The chosen image of x in the residue field: a root of pi, or `None`
    /// at infinity.  Deterministic — repeated calls pick the same root.
    pub fn residue_root(&self, res: &Arc<FieldDesc>) -> Result<Option<Elt>> {
        match self {
            XPlace::Infinite => Ok(None),
            XPlace::Finite { pi } => {
                if pi.degree() == 1 {
                    return Ok(Some(res.lift(&pi.coeff(0).neg())?));
                }
                let lifted: Result<Vec<Elt>> =
                    pi.coeffs().iter().map(|c| res.lift(c)).collect();
                Ok(Some(find_root_split(&lifted?, res)?))
            }
        }
    }

    /// Exact expansion of x in the local uniformizer of this x-place.
    fn x_expansion(&self, res: &Arc<FieldDesc>) -> Result<LaurentSeries> {
        Ok(match self.residue_root(res)? {
            Some(xi) => {
                LaurentSeries::constant(xi).add(&LaurentSeries::uniformizer(res))
            }
            None => LaurentSeries::monomial(res.one(), -1),
        })
    }
}

// ---------------------------------------------------------------------------
// Curve places
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BranchTag {
    /// The unique point of the rational model above the x-place.
    Rational,
    /// The totally ramified branch of a cover fibre.
    Ram,
    /// An unramified branch, tagged by its reduced y-residue.
    Value(Elt),
}

/// A place of the base curve with local series data over its residue field.
#[derive(Clone)]
pub struct CPlace {
    below: XPlace,
    branch: BranchTag,
    e: u8,
    deg: usize,
    residue: Arc<FieldDesc>,
    x_series: LaurentSeries,
    y_series: Option<LaurentSeries>,
    prec: i64,
}

impl PartialEq for CPlace {
    fn eq(&self, other: &Self) -> bool {
        self.below == other.below && self.branch == other.branch
    }
}
impl Eq for CPlace {}

impl std::fmt::Debug for CPlace {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.name())
    }
}

impl CPlace {
    pub fn below(&self) -> &XPlace {
        &self.below
    }

    pub fn branch(&self) -> &BranchTag {
        &self.branch
    }

    /// Ramification index over the x-line.
    pub fn ram_index(&self) -> u8 {
        self.e
    }

    /// Degree of the residue field over the constant field of the curve.
    pub fn degree(&self) -> usize {
        self.deg
    }

    pub fn residue_field(&self) -> &Arc<FieldDesc> {
        &self.residue
    }

    pub fn x_series(&self) -> &LaurentSeries {
        &self.x_series
    }

    pub fn y_series(&self) -> Option<&LaurentSeries> {
        self.y_series.as_ref()
    }

    pub fn prec(&self) -> i64 {
        self.prec
    }

    pub fn name(&self) -> String {
        let base = match &self.below {
            XPlace::Infinite => "inf".to_string(),
            XPlace::Finite { pi } => pi.render("x"),
        };
        match &self.branch {
            BranchTag::Rational => format!("({base})"),
            BranchTag::Ram => format!("({base}; ram)"),
            BranchTag::Value(v) => format!("({base}; y~{})", v.render("a")),
        }
    }
}

// ---------------------------------------------------------------------------
// Series utilities
// ---------------------------------------------------------------------------

/// num/den with the quotient certified to roughly `out_prec` coefficients
/// whenever the inputs allow it.  Exact inputs are truncated just enough to
/// make the unit-part inversion well defined.
pub(crate) fn series_div_to(
    num: &LaurentSeries,
    den: &LaurentSeries,
    out_prec: i64,
) -> Result<LaurentSeries> {
    let vd = match den.val() {
        Some(v) => v,
        None => {
            return Err(if den.is_exact() {
                Error::ZeroDivide
            } else {
                Error::InsufficientPrecision(den.prec())
            });
        }
    };
    if den.is_exact() && den.is_monomial() {
        return Ok(num.mul(&den.inv()?));
    }
    let vn = match num.val() {
        Some(v) => v,
        None => {
            if num.is_exact() {
                return Ok(LaurentSeries::zero_exact(num.field()));
            }
            // Nothing certain to divide; report the honest bound.
            return Ok(LaurentSeries::zero_to_prec(num.field(), num.prec() - vd));
        }
    };
    let work = out_prec + vn.abs() + 2 * vd.abs() + 8;
    num.truncate(work).div(&den.truncate(work))
}

/// Evaluate a univariate polynomial at a series point.
fn poly_on_series(p: &Poly, xs: &LaurentSeries) -> LaurentSeries {
    let coeffs: Vec<LaurentSeries> = p
        .coeffs()
        .iter()
        .map(|c| LaurentSeries::constant(c.clone()))
        .collect();
    if coeffs.is_empty() {
        return LaurentSeries::zero_exact(xs.field());
    }
    horner(&coeffs, xs)
}

/// Expansion of a rational function of x along a given x-series, certified
/// to about `out_prec`.
pub(crate) fn ratfunc_series(
    r: &RatFunc,
    xs: &LaurentSeries,
    res: &Arc<FieldDesc>,
    out_prec: i64,
) -> Result<LaurentSeries> {
    let lifted = lift_ratfunc(r, res)?;
    let num = poly_on_series(lifted.num(), xs);
    let den = poly_on_series(lifted.den(), xs);
    series_div_to(&num, &den, out_prec)
}

/// Expansion of a rational function of x at an x-place over the given
/// residue field.
pub(crate) fn expand_ratfunc_at(
    r: &RatFunc,
    xp: &XPlace,
    res: &Arc<FieldDesc>,
    prec: i64,
) -> Result<LaurentSeries> {
    let xs = xp.x_expansion(res)?;
    ratfunc_series(r, &xs, res, prec)
}

// ---------------------------------------------------------------------------
// Fibre construction
// ---------------------------------------------------------------------------

/// All places of the curve above an x-place, with series embeddings carried
/// to at least `prec` coefficients.  The order is deterministic: a ramified
/// place is alone in its fibre; split branches come sorted by their reduced
/// y-residue.
pub fn places_above(curve: &Arc<CurveModel>, xp: &XPlace, prec: i64) -> Result<Vec<CPlace>> {
    let d = xp.degree();
    let res = curve.ext_field(d)?;
    let x_exact = xp.x_expansion(&res)?;

    let h = match curve.kind() {
        CurveKind::Rational => {
            return Ok(vec![CPlace {
                below: xp.clone(),
                branch: BranchTag::Rational,
                e: 1,
                deg: d,
                residue: res,
                x_series: x_exact,
                y_series: None,
                prec,
            }]);
        }
        CurveKind::ArtinSchreier { h } => h,
    };

    let p = curve.field().p();
    let budget = pole_budget(h);
    let hprec = prec + budget * (p as i64 + 2) + 24;
    let hs = ratfunc_series(h, &x_exact, &res, hprec)?;
    let (ty, witness) = as_reduce(&hs)?;

    match local_splitting(&ty) {
        SplitKind::TotallyRamified => {
            let m = match ty {
                LocalASType::Ramified { m } => m,
                _ => unreachable!(),
            };
            let (s_t, y_t) = gauge_march(&res, &hs, &witness, m, prec)?;
            let x_t = match xp.residue_root(&res)? {
                Some(xi) => LaurentSeries::constant(xi).add(&s_t),
                None => s_t.inv()?,
            };
            let place = CPlace {
                below: xp.clone(),
                branch: BranchTag::Ram,
                e: p,
                deg: d,
                residue: res,
                prec: x_t.prec().min(y_t.prec()),
                x_series: x_t,
                y_series: Some(y_t),
            };
            debug_assert!(place_on_curve(curve, &place));
            Ok(vec![place])
        }
        SplitKind::Split => {
            let value = match &ty {
                LocalASType::Unramified { value } => value.clone(),
                _ => unreachable!(),
            };
            let seeds = artin_schreier_roots(&value)?;
            let h_red = hs.sub(&wp_image(&witness)?);
            let relation = as_relation(&res, &h_red);
            let mut out = Vec::with_capacity(seeds.len());
            for seed in seeds {
                let branch = hensel_root(&relation, &seed, prec)?;
                let y_t = witness.add(&branch);
                let place = CPlace {
                    below: xp.clone(),
                    branch: BranchTag::Value(seed),
                    e: 1,
                    deg: d,
                    residue: res.clone(),
                    prec: y_t.prec().min(x_exact.prec()).min(prec),
                    x_series: x_exact.clone(),
                    y_series: Some(y_t),
                };
                debug_assert!(place_on_curve(curve, &place));
                out.push(place);
            }
            Ok(out)
        }
        SplitKind::Inert => {
            let value = match &ty {
                LocalASType::Unramified { value } => value.clone(),
                _ => unreachable!(),
            };
            let big = res.extension(p as usize)?;
            let value_big = big.lift(&value)?;
            let seeds = artin_schreier_roots(&value_big)?;
            let seed = seeds.into_iter().next().expect("trace vanishes upstairs");
            let hs_big = hs.lift_to(&big)?;
            let wit_big = witness.lift_to(&big)?;
            let h_red = hs_big.sub(&wp_image(&wit_big)?);
            let relation = as_relation(&big, &h_red);
            let branch = hensel_root(&relation, &seed, prec)?;
            let y_t = wit_big.add(&branch);
            let x_big = x_exact.lift_to(&big)?;
            let place = CPlace {
                below: xp.clone(),
                branch: BranchTag::Value(seed),
                e: 1,
                deg: d * p as usize,
                residue: big,
                prec: y_t.prec().min(x_big.prec()).min(prec),
                x_series: x_big,
                y_series: Some(y_t),
            };
            debug_assert!(place_on_curve(curve, &place));
            Ok(vec![place])
        }
    }
}

fn wp_image(w: &LaurentSeries) -> Result<LaurentSeries> {
    let p = w.field().p() as i64;
    Ok(w.pow(p)?.sub(w))
}

/// Coefficients of Y^p - Y - h_red as series in the local parameter.
fn as_relation(res: &Arc<FieldDesc>, h_red: &LaurentSeries) -> Vec<LaurentSeries> {
    let p = res.p() as usize;
    let mut rel = vec![LaurentSeries::zero_exact(res); p + 1];
    rel[0] = h_red.neg();
    rel[1] = LaurentSeries::constant(res.from_int(-1));
    rel[p] = LaurentSeries::constant(res.one());
    rel
}

/// Series embedding of the totally ramified place above an x-place.
///
/// After the local reduction y = w(s) + y' with y'^p - y' = h_red(s),
/// v(h_red) = -m and p ∤ m, pick 0 < b < p and a with ap - bm = 1 and use
/// T = s^a y'^b as the place uniformizer.  The coefficients of s(T) and
/// y'(T) then solve the pair of relations
///     y'(T)^p - y'(T) = h_red(s(T)),    s(T)^a y'(T)^b = T
/// triangularly: at step K the first relation determines the next
/// coefficient of s, the second the next coefficient of y'.
fn gauge_march(
    res: &Arc<FieldDesc>,
    hs: &LaurentSeries,
    witness: &LaurentSeries,
    m: u64,
    prec_t: i64,
) -> Result<(LaurentSeries, LaurentSeries)> {
    let p = res.p() as i64;
    let mi = m as i64;
    assert!(mi % p != 0, "reduced pole order must be prime to p");

    let h_red = hs.sub(&wp_image(witness)?);
    assert_eq!(h_red.val(), Some(-mi), "reduction must expose the pole");
    let gamma = h_red.coeff(-mi);

    let b = (1..p)
        .find(|b| (1 + b * mi) % p == 0)
        .expect("gcd(p, m) = 1 guarantees a gauge exponent");
    let a = (1 + b * mi) / p;

    // Leading coefficients: s ~ gamma^{-b} T^p, y' ~ gamma^a T^{-m}.
    let c_lead = gamma.inv()?.pow(b as u128);
    let d_lead = gamma.pow(a as u128);

    // The extra margin of p absorbs the loss when the caller inverts s(T)
    // to recover x at the infinite place.
    let k_max = prec_t + mi + p;
    let work = k_max + 2 * p + 8;
    let mut s = LaurentSeries::monomial(c_lead.clone(), p).truncate(work);
    let mut yp = LaurentSeries::monomial(d_lead.clone(), -mi).truncate(work);
    let t_series = LaurentSeries::monomial(res.one(), 1);

    // Unknown-coefficient multipliers, fixed by the leading terms:
    // in relation 1 the next s-coefficient appears as  m·gamma·c_lead^{-m-1},
    // in relation 2 the next y'-coefficient as  b·c_lead^a·d_lead^{b-1}.
    let fac_c_inv = res
        .from_int(mi % p)
        .mul(&gamma)
        .mul(&c_lead.inv()?.pow((mi + 1) as u128))
        .inv()?;
    let fac_d_inv = res
        .from_int(b)
        .mul(&c_lead.pow(a as u128))
        .mul(&d_lead.pow((b - 1) as u128))
        .inv()?;

    for k in 1..=k_max {
        let e1 = yp.pow(p)?.sub(&yp).sub(&h_red.compose(&s)?);
        let c_new = e1.coeff(k - mi * p).neg().mul(&fac_c_inv);
        s = s.add(&LaurentSeries::monomial(c_new, p + k));

        let e2 = s.pow(a)?.mul(&yp.pow(b)?).sub(&t_series);
        let d_new = e2.coeff(k + 1).neg().mul(&fac_d_inv);
        yp = yp.add(&LaurentSeries::monomial(d_new, -mi + k));
    }

    // Coefficients are solved through T^{p+k_max} for s and T^{-m+k_max}
    // for y'; beyond that the series are unknown, not zero.
    let s = s.truncate(p + k_max + 1);
    let yp = yp.truncate(-mi + k_max + 1);

    debug_assert!(
        yp.pow(p)?
            .sub(&yp)
            .sub(&h_red.compose(&s)?)
            .truncate(k_max + 1 - mi * p)
            .val()
            .is_none(),
        "gauge march left a residual in the curve relation"
    );
    debug_assert!(
        s.pow(a)?
            .mul(&yp.pow(b)?)
            .sub(&t_series)
            .truncate(k_max + 2)
            .val()
            .is_none(),
        "gauge march left a residual in the uniformizer relation"
    );

    let y = witness.compose(&s)?.add(&yp);
    Ok((s, y))
}

/// Check x(t), y(t) against the defining relation (used in debug builds).
fn place_on_curve(curve: &Arc<CurveModel>, place: &CPlace) -> bool {
    let h = match curve.kind() {
        CurveKind::Rational => return true,
        CurveKind::ArtinSchreier { h } => h,
    };
    let p = curve.field().p() as i64;
    let y = match &place.y_series {
        Some(y) => y,
        None => return false,
    };
    let hx = match ratfunc_series(h, &place.x_series, &place.residue, place.prec) {
        Ok(s) => s,
        Err(_) => return false,
    };
    match y.pow(p) {
        Ok(ypow) => ypow.sub(y).sub(&hx).val().is_none(),
        Err(_) => false,
    }
}

/// Rebuild the same place with at least the requested precision.
pub fn refine_place(curve: &Arc<CurveModel>, place: &CPlace, prec: i64) -> Result<CPlace> {
    if place.prec >= prec {
        return Ok(place.clone());
    }
    places_above(curve, &place.below, prec)?
        .into_iter()
        .find(|s| s == place)
        .ok_or_else(|| Error::Internal(format!("place {} vanished on rebuild", place.name())))
}

// ---------------------------------------------------------------------------
// Expansion, valuation, evaluation
// ---------------------------------------------------------------------------

/// Expand a function-field element in the local parameter of a place, using
/// the place's stored precision.
pub fn expand(f: &FuncElt, place: &CPlace) -> Result<LaurentSeries> {
    let res = &place.residue;
    let out_prec = place.prec;
    let mut acc = LaurentSeries::zero_exact(res);
    let mut ypow = LaurentSeries::constant(res.one());
    for (i, coeff) in f.coeffs().iter().enumerate() {
        if i > 0 {
            let ys = place
                .y_series
                .as_ref()
                .ok_or_else(|| Error::Internal("rational place used with a cover".into()))?;
            ypow = ypow.mul(ys);
        }
        if coeff.is_zero() {
            continue;
        }
        let cs = ratfunc_series(coeff, &place.x_series, res, out_prec)?;
        acc = acc.add(&cs.mul(&ypow));
    }
    Ok(acc)
}

/// Expand with an output precision of at least `min_prec`, rebuilding the
/// place as needed.
pub fn expand_to(
    curve: &Arc<CurveModel>,
    f: &FuncElt,
    place: &CPlace,
    min_prec: i64,
) -> Result<LaurentSeries> {
    let mut pl = place.clone();
    loop {
        let s = expand(f, &pl)?;
        if s.prec() >= min_prec || s.is_exact() {
            return Ok(s);
        }
        if pl.prec >= PREC_CAP {
            return Err(Error::InsufficientPrecision(s.prec()));
        }
        pl = refine_place(curve, &pl, (pl.prec * 2).min(PREC_CAP))?;
    }
}

/// Order of vanishing of a non-zero function at a place.
pub fn valuation(curve: &Arc<CurveModel>, f: &FuncElt, place: &CPlace) -> Result<i64> {
    if f.is_zero() {
        return Err(Error::Invalid("the zero function has no valuation".into()));
    }
    let mut pl = place.clone();
    loop {
        let s = expand(f, &pl)?;
        if let Some(v) = s.val() {
            return Ok(v);
        }
        if s.is_exact() || pl.prec >= PREC_CAP {
            return Err(Error::InsufficientPrecision(s.prec()));
        }
        pl = refine_place(curve, &pl, (pl.prec * 2).min(PREC_CAP))?;
    }
}

/// Value of a function at a place where it is regular, as an element of the
/// residue field.  Removable singularities are fine: the expansion decides.
pub fn evaluate(curve: &Arc<CurveModel>, f: &FuncElt, place: &CPlace) -> Result<Elt> {
    if f.is_zero() {
        return Ok(place.residue.zero());
    }
    let mut pl = place.clone();
    loop {
        let s = expand(f, &pl)?;
        match s.val() {
            Some(v) if v < 0 => {
                return Err(Error::PoleAtPoint(format!(
                    "order {v} at {}",
                    pl.name()
                )));
            }
            Some(_) if s.prec() >= 1 => return Ok(s.coeff(0)),
            None if s.is_exact() => return Ok(place.residue.zero()),
            _ => {}
        }
        if pl.prec >= PREC_CAP {
            return Err(Error::InsufficientPrecision(s.prec()));
        }
        pl = refine_place(curve, &pl, (pl.prec * 2).min(PREC_CAP))?;
    }
}

/// All degree-1 places of the curve, infinite fibre first, then finite
/// fibres in field enumeration order of the x-coordinate.  Cached.
pub fn rational_places(curve: &Arc<CurveModel>) -> Result<Vec<CPlace>> {
    if let Some(v) = curve.rational_cache().get() {
        return Ok(v.clone());
    }
    let prec = curve.default_prec();
    let mut out = Vec::new();
    for place in places_above(curve, &XPlace::Infinite, prec)? {
        if place.degree() == 1 {
            out.push(place);
        }
    }
    for x0 in curve.field().enumerate()? {
        for place in places_above(curve, &XPlace::finite_linear(&x0), prec)? {
            if place.degree() == 1 {
                out.push(place);
            }
        }
    }
    let independent = curve.count_points(1)?;
    assert_eq!(
        out.len(),
        independent,
        "place enumeration disagrees with the point census"
    );
    let _ = curve.rational_cache().set(out.clone());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::CurveModel;

    fn ex1_curve() -> Arc<CurveModel> {
        let f = FieldDesc::prime(2).unwrap();
        let h = RatFunc::from_poly(Poly::from_ints(&f, &[0, 1, 0, 1]));
        CurveModel::artin_schreier(f, h).unwrap()
    }

    fn ex2_curve() -> Arc<CurveModel> {
        let f = FieldDesc::prime(3).unwrap();
        let h = RatFunc::from_poly(Poly::from_ints(&f, &[-1, 0, 1]));
        CurveModel::artin_schreier(f, h).unwrap()
    }

    fn ex3_curve() -> Arc<CurveModel> {
        let f = FieldDesc::new(2, 2, None).unwrap();
        let h = RatFunc::from_poly(Poly::from_ints(&f, &[0, 0, 0, 1]));
        CurveModel::artin_schreier(f, h).unwrap()
    }

    fn affine_place(curve: &Arc<CurveModel>, x0: i64, y0: i64) -> CPlace {
        let f = curve.field();
        let xv = f.from_int(x0);
        let yv = f.from_int(y0);
        places_above(curve, &XPlace::finite_linear(&xv), 48)
            .unwrap()
            .into_iter()
            .find(|p| p.branch() == &BranchTag::Value(yv.clone()))
            .expect("no such affine place")
    }

    fn infinite_place(curve: &Arc<CurveModel>) -> CPlace {
        places_above(curve, &XPlace::Infinite, 48)
            .unwrap()
            .into_iter()
            .next()
            .unwrap()
    }

    #[test]
    fn split_fibre_above_origin() {
        let c = ex1_curve();
        let x0 = c.field().zero();
        let fibre = places_above(&c, &XPlace::finite_linear(&x0), 32).unwrap();
        assert_eq!(fibre.len(), 2);
        let y = FuncElt::y(&c).unwrap();
        let vals: Vec<String> = fibre
            .iter()
            .map(|p| evaluate(&c, &y, p).unwrap().render("a"))
            .collect();
        assert_eq!(vals, vec!["0", "1"]);
        for p in &fibre {
            assert_eq!(p.degree(), 1);
            assert_eq!(p.ram_index(), 1);
            assert_eq!(valuation(&c, &FuncElt::x(&c), p).unwrap(), 1);
        }
        // y vanishes to order 1 at (0,0): y = t + t^2 + ... there.
        assert_eq!(valuation(&c, &y, &fibre[0]).unwrap(), 1);
    }

    #[test]
    fn ramified_infinite_place() {
        let c = ex1_curve();
        let pinf = infinite_place(&c);
        assert_eq!(pinf.branch(), &BranchTag::Ram);
        assert_eq!(pinf.ram_index(), 2);
        assert_eq!(pinf.degree(), 1);
        let x = FuncElt::x(&c);
        let y = FuncElt::y(&c).unwrap();
        assert_eq!(valuation(&c, &x, &pinf).unwrap(), -2);
        assert_eq!(valuation(&c, &y, &pinf).unwrap(), -3);
        assert_eq!(valuation(&c, &x.add(&y), &pinf).unwrap(), -3);
        // x^3 and y^2 share the leading term, so x^3 + y^2 drops to v = -5:
        // y^2 = y + x^3 + x gives x^3 + y^2 = y + x (order -3 again).
        assert_eq!(
            valuation(&c, &x.pow(3).add(&y.pow(2)), &pinf).unwrap(),
            -3
        );
    }

    #[test]
    fn ramified_place_with_odd_p() {
        let c = ex2_curve();
        let pinf = infinite_place(&c);
        assert_eq!(pinf.ram_index(), 3);
        let x = FuncElt::x(&c);
        let y = FuncElt::y(&c).unwrap();
        assert_eq!(valuation(&c, &x, &pinf).unwrap(), -3);
        assert_eq!(valuation(&c, &y, &pinf).unwrap(), -2);
    }

    #[test]
    fn expansion_is_multiplicative_at_ramified_place() {
        let c = ex2_curve();
        let pinf = infinite_place(&c);
        let x = FuncElt::x(&c);
        let y = FuncElt::y(&c).unwrap();
        let f = x.mul(&y);
        let sx = expand(&x, &pinf).unwrap();
        let sy = expand(&y, &pinf).unwrap();
        let sf = expand(&f, &pinf).unwrap();
        let prod = sx.mul(&sy);
        assert!(sf.sub(&prod).val().is_none());
    }

    #[test]
    fn inert_fibre() {
        let c = ex2_curve();
        // h(0) = -1 has absolute trace 2 in F_3: the fibre above x = 0 is
        // a single place of degree 3.
        let fibre = places_above(&c, &XPlace::finite_linear(&c.field().zero()), 24).unwrap();
        assert_eq!(fibre.len(), 1);
        assert_eq!(fibre[0].degree(), 3);
        assert_eq!(fibre[0].ram_index(), 1);
        // The y-residue generates the cubic extension: z^3 - z = -1.
        if let BranchTag::Value(z) = fibre[0].branch() {
            let lhs = z.pow(3).sub(z);
            assert_eq!(lhs, fibre[0].residue_field().from_int(-1));
        } else {
            panic!("expected an unramified branch");
        }
    }

    #[test]
    fn inert_quadratic_x_place() {
        // On the first curve, x^2 + x + 1 has residue value h(xi) = 1 + xi
        // with absolute trace 1: one place of degree 4 sits above it.
        let c = ex1_curve();
        let pi = Poly::from_ints(c.field(), &[1, 1, 1]);
        let fibre = places_above(&c, &XPlace::finite(pi).unwrap(), 24).unwrap();
        assert_eq!(fibre.len(), 1);
        assert_eq!(fibre[0].degree(), 4);
    }

    #[test]
    fn removable_singularity_evaluates() {
        // f = (y + 2) / (2x + y + 1) on y^3 - y = x^2 - 1: at (2, 1) both
        // numerator and denominator vanish; the limit along the branch is 2.
        let c = ex2_curve();
        let q = affine_place(&c, 2, 1);
        let y = FuncElt::y(&c).unwrap();
        let x = FuncElt::x(&c);
        let two = FuncElt::constant(&c, c.field().from_int(2));
        let one = FuncElt::one(&c);
        let num = y.add(&two);
        let den = x.scale(&c.field().from_int(2)).add(&y).add(&one);
        assert_eq!(valuation(&c, &num, &q).unwrap(), 1);
        assert_eq!(valuation(&c, &den, &q).unwrap(), 1);
        let f = num.div(&den).unwrap();
        let v = evaluate(&c, &f, &q).unwrap();
        assert_eq!(v, c.field().from_int(2));
        // The same denominator vanishes to order 2 at (1, 0).
        let q2 = affine_place(&c, 1, 0);
        assert_eq!(valuation(&c, &den, &q2).unwrap(), 2);
        // And the quotient genuinely has a pole there.
        assert!(matches!(
            evaluate(&c, &f, &q2),
            Err(Error::PoleAtPoint(_))
        ));
    }

    #[test]
    fn rational_place_enumeration() {
        let c1 = ex1_curve();
        let r1 = rational_places(&c1).unwrap();
        assert_eq!(r1.len(), 5);
        assert_eq!(r1[0].branch(), &BranchTag::Ram);
        assert!(matches!(r1[0].below(), XPlace::Infinite));

        assert_eq!(rational_places(&ex2_curve()).unwrap().len(), 7);
        assert_eq!(rational_places(&ex3_curve()).unwrap().len(), 9);
    }

    #[test]
    fn cube_values_split_everywhere_on_f4() {
        // On y^2 + y = x^3 over F_4 every non-zero x has x^3 = 1 with
        // absolute trace 0, so each unit fibre splits.
        let c = ex3_curve();
        for x0 in c.field().enumerate().unwrap() {
            if x0.is_zero() {
                continue;
            }
            let fibre = places_above(&c, &XPlace::finite_linear(&x0), 16).unwrap();
            assert_eq!(fibre.len(), 2, "fibre above a unit must split");
        }
    }

    #[test]
    fn refinement_extends_series_consistently() {
        let c = ex1_curve();
        let pinf = infinite_place(&c);
        let finer = refine_place(&c, &pinf, 96).unwrap();
        assert!(finer.prec() >= 96);
        assert_eq!(&finer, &pinf);
        // The refined x-series must agree with the coarse one where both
        // are defined.
        let coarse = pinf.x_series();
        let diff = coarse.sub(finer.x_series());
        assert!(diff.val().is_none(), "refinement changed known coefficients");
    }

    #[test]
    fn rational_model_place() {
        let f = FieldDesc::prime(3).unwrap();
        let c = CurveModel::rational(f).unwrap();
        let places = rational_places(&c).unwrap();
        assert_eq!(places.len(), 4);
        let x = FuncElt::x(&c);
        assert_eq!(valuation(&c, &x, &places[0]).unwrap(), -1);
        assert_eq!(valuation(&c, &x, &places[1]).unwrap(), 1);
    }
}
