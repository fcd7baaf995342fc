//! Base-curve models and their function fields.
//!
//! A model is either the projective line (function field F_q(x)) or an
//! Artin–Schreier plane curve y^p - y = h(x).  Function-field elements are
//! kept in the canonical form sum_{0<=i<p} a_i(x) y^i with reduced rational
//! coefficients; multiplication closes via y^p = y + h, and division goes
//! through the product of Galois conjugates y -> y + c, which lands in
//! F_q(x).  The genus comes from the conductor terms of the local
//! Artin–Schreier reductions at the poles of h.

mod divisor;
mod place;

pub use divisor::{Divisor, SplittingContext};
pub use place::{
    evaluate, expand, expand_to, places_above, rational_places, refine_place, valuation,
    BranchTag, CPlace, XPlace,
};
pub(crate) use place::ratfunc_series;

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use crate::error::{Error, Result};
use crate::gf::{Elt, FieldDesc, ENUM_GUARD};
use crate::local::{as_reduce, local_splitting, LocalASType, SplitKind};
use crate::poly::{Poly, RatFunc};

#[derive(Clone)]
pub enum CurveKind {
    Rational,
    ArtinSchreier { h: RatFunc },
}

pub struct CurveModel {
    field: Arc<FieldDesc>,
    kind: CurveKind,
    genus: i64,
    default_prec: i64,
    ext_cache: RwLock<HashMap<usize, Arc<FieldDesc>>>,
    rational_cache: OnceLock<Vec<CPlace>>,
}

impl PartialEq for CurveModel {
    fn eq(&self, other: &Self) -> bool {
        if *self.field != *other.field {
            return false;
        }
        match (&self.kind, &other.kind) {
            (CurveKind::Rational, CurveKind::Rational) => true,
            (CurveKind::ArtinSchreier { h: a }, CurveKind::ArtinSchreier { h: b }) => a == b,
            _ => false,
        }
    }
}
impl Eq for CurveModel {}

impl std::fmt::Debug for CurveModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.kind {
            CurveKind::Rational => write!(f, "P^1 over {:?}", self.field),
            CurveKind::ArtinSchreier { h } => write!(
                f,
                "y^{} - y = {} over {:?}",
                self.field.p(),
                h.render("x"),
                self.field
            ),
        }
    }
}

impl CurveModel {
    /// Validate and build a model; the genus is computed once, here.
    pub fn new(field: Arc<FieldDesc>, kind: CurveKind) -> Result<Arc<CurveModel>> {
        let genus = match &kind {
            CurveKind::Rational => 0,
            CurveKind::ArtinSchreier { h } => {
                if **h.field() != *field {
                    return Err(Error::FieldMismatch);
                }
                genus_of_as_cover(&field, h)?
            }
        };
        Ok(Arc::new(CurveModel {
            field,
            kind,
            genus,
            default_prec: 64,
            ext_cache: RwLock::new(HashMap::new()),
            rational_cache: OnceLock::new(),
        }))
    }

    pub fn rational(field: Arc<FieldDesc>) -> Result<Arc<CurveModel>> {
        CurveModel::new(field, CurveKind::Rational)
    }

    /// Same model with a different default series precision (places and
    /// caches are rebuilt lazily under the new precision).
    pub fn with_default_prec(self: &Arc<Self>, prec: i64) -> Result<Arc<CurveModel>> {
        if prec < 8 {
            return Err(Error::Invalid(format!(
                "default precision {prec} is too small to expand places"
            )));
        }
        let model = CurveModel::new(self.field.clone(), self.kind.clone())?;
        // Arc was just created above and has no other owners.
        let mut inner = Arc::try_unwrap(model).ok().expect("fresh model is unshared");
        inner.default_prec = prec;
        Ok(Arc::new(inner))
    }

    pub fn artin_schreier(field: Arc<FieldDesc>, h: RatFunc) -> Result<Arc<CurveModel>> {
        CurveModel::new(field, CurveKind::ArtinSchreier { h })
    }

    pub fn field(&self) -> &Arc<FieldDesc> {
        &self.field
    }

    pub fn kind(&self) -> &CurveKind {
        &self.kind
    }

    pub fn h(&self) -> Option<&RatFunc> {
        match &self.kind {
            CurveKind::Rational => None,
            CurveKind::ArtinSchreier { h } => Some(h),
        }
    }

    pub fn genus(&self) -> i64 {
        self.genus
    }

    pub fn default_prec(&self) -> i64 {
        self.default_prec
    }

    /// The residue field F_{q^d}, cached, with the embedding chain through F_q.
    pub fn ext_field(self: &Arc<Self>, d: usize) -> Result<Arc<FieldDesc>> {
        if d == 1 {
            return Ok(self.field.clone());
        }
        if let Some(f) = self.ext_cache.read().unwrap().get(&d) {
            return Ok(f.clone());
        }
        let f = self.field.extension(d)?;
        self.ext_cache.write().unwrap().insert(d, f.clone());
        Ok(f)
    }

    pub(crate) fn rational_cache(&self) -> &OnceLock<Vec<CPlace>> {
        &self.rational_cache
    }

    /// The same curve with scalars extended to F_{q^s}.
    pub fn extend_scalars(self: &Arc<Self>, s: usize) -> Result<Arc<CurveModel>> {
        if s == 1 {
            return Ok(self.clone());
        }
        let big = self.ext_field(s)?;
        let kind = match &self.kind {
            CurveKind::Rational => CurveKind::Rational,
            CurveKind::ArtinSchreier { h } => CurveKind::ArtinSchreier {
                h: lift_ratfunc(h, &big)?,
            },
        };
        let ext = CurveModel::new(big, kind)?;
        assert_eq!(
            ext.genus, self.genus,
            "genus must be stable under scalar extension"
        );
        Ok(ext)
    }

    /// #C(F_{q^s}), by classifying every degree-1 x-fibre over the extension.
    pub fn count_points(self: &Arc<Self>, s: usize) -> Result<usize> {
        let ext = self.extend_scalars(s)?;
        let q_s = ext.field.order();
        if q_s > ENUM_GUARD {
            return Err(Error::SizeGuard(q_s));
        }
        match &ext.kind {
            CurveKind::Rational => Ok(q_s as usize + 1),
            CurveKind::ArtinSchreier { h } => {
                let mut total = 0usize;
                let p = ext.field.p() as usize;
                for x0 in ext.field.enumerate()? {
                    let d = h.den().eval(&x0);
                    if !d.is_zero() {
                        let a = h.num().eval(&x0).div(&d)?;
                        if a.trace_to_prime() == 0 {
                            total += p;
                        }
                    } else {
                        total += fibre_points_at_pole(&ext, &XPlace::finite_linear(&x0))?;
                    }
                }
                total += fibre_points_at_pole(&ext, &XPlace::Infinite)?;
                Ok(total)
            }
        }
    }
}

fn lift_poly(p: &Poly, big: &Arc<FieldDesc>) -> Result<Poly> {
    let c: Result<Vec<Elt>> = p.coeffs().iter().map(|e| big.lift(e)).collect();
    Ok(Poly::from_coeffs(big, c?))
}

pub(crate) fn lift_ratfunc(r: &RatFunc, big: &Arc<FieldDesc>) -> Result<RatFunc> {
    RatFunc::new(lift_poly(r.num(), big)?, lift_poly(r.den(), big)?)
}

/// Rational points of the fibre of an Artin–Schreier cover above a degree-1
/// x-place where h may have a pole: split -> p, inert -> 0, ramified -> 1.
fn fibre_points_at_pole(curve: &Arc<CurveModel>, xp: &XPlace) -> Result<usize> {
    let h = curve.h().expect("pole fibres only arise on covers");
    let prec = 2 * pole_budget(h) + 16;
    let series = place::expand_ratfunc_at(h, xp, &curve.field, prec)?;
    let (ty, _) = as_reduce(&series)?;
    Ok(match local_splitting(&ty) {
        SplitKind::Split => curve.field.p() as usize,
        SplitKind::Inert => 0,
        SplitKind::TotallyRamified => 1,
    })
}

pub(crate) fn pole_budget(h: &RatFunc) -> i64 {
    let dn = h.num().deg().unwrap_or(0) as i64;
    let dd = h.den().deg().unwrap_or(0) as i64;
    dn.max(dd) + 1
}

/// Genus of y^p - y = h over the x-line by Hurwitz–Zeuthen: each pole with
/// reduced order m contributes a conductor term (m+1)·deg; at least one pole
/// must stay ramified after reduction, else the cover is geometrically
/// reducible.
fn genus_of_as_cover(field: &Arc<FieldDesc>, h: &RatFunc) -> Result<i64> {
    let p = field.p() as i64;
    let prec = 2 * pole_budget(h) + 16;
    let mut conductor = 0i64;
    let mut ramified_somewhere = false;

    let mut xplaces: Vec<XPlace> = Vec::new();
    if !h.den().is_zero() && h.den().degree() > 0 {
        let (_, factors) = h.den().irreducible_factors()?;
        for (pi, _) in factors {
            xplaces.push(XPlace::Finite { pi });
        }
    }
    xplaces.push(XPlace::Infinite);

    for xp in &xplaces {
        let d = xp.degree();
        // Residue field of the x-place.
        let res = if d == 1 {
            field.clone()
        } else {
            field.extension(d)?
        };
        let series = place::expand_ratfunc_at(h, xp, &res, prec)?;
        if let (LocalASType::Ramified { m }, _) = as_reduce(&series)? {
            ramified_somewhere = true;
            conductor += (m as i64 + 1) * d as i64;
        }
    }
    if !ramified_somewhere {
        return Err(Error::GeometricallyReducible(format!(
            "h = {} has no pole with reduced order prime to {p}; the cover splits over the closure",
            h.render("x")
        )));
    }
    let two_g_minus_2 = -2 * p + (p - 1) * conductor;
    assert!(
        two_g_minus_2 % 2 == 0 && two_g_minus_2 >= -2,
        "Hurwitz–Zeuthen parity violated"
    );
    Ok((two_g_minus_2 + 2) / 2)
}

// ---------------------------------------------------------------------------
// Function-field elements
// ---------------------------------------------------------------------------

/// An element of k(C) in the canonical form sum_{0<=i<p} a_i(x) y^i.
#[derive(Clone, PartialEq, Eq)]
pub struct FuncElt {
    curve: Arc<CurveModel>,
    a: Vec<RatFunc>, // length = p for covers, 1 for the rational model
}

impl std::fmt::Debug for FuncElt {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.render())
    }
}

impl FuncElt {
    fn width(curve: &Arc<CurveModel>) -> usize {
        match curve.kind {
            CurveKind::Rational => 1,
            CurveKind::ArtinSchreier { .. } => curve.field.p() as usize,
        }
    }

    pub fn zero(curve: &Arc<CurveModel>) -> FuncElt {
        let w = FuncElt::width(curve);
        FuncElt {
            curve: curve.clone(),
            a: vec![RatFunc::zero(&curve.field); w],
        }
    }

    pub fn constant(curve: &Arc<CurveModel>, c: Elt) -> FuncElt {
        let mut f = FuncElt::zero(curve);
        f.a[0] = RatFunc::from_poly(Poly::constant(c));
        f
    }

    pub fn one(curve: &Arc<CurveModel>) -> FuncElt {
        FuncElt::constant(curve, curve.field.one())
    }

    pub fn x(curve: &Arc<CurveModel>) -> FuncElt {
        let mut f = FuncElt::zero(curve);
        f.a[0] = RatFunc::from_poly(Poly::x(&curve.field));
        f
    }

    pub fn y(curve: &Arc<CurveModel>) -> Result<FuncElt> {
        if matches!(curve.kind, CurveKind::Rational) {
            return Err(Error::Invalid(
                "the rational model has no y generator".into(),
            ));
        }
        let mut f = FuncElt::zero(curve);
        f.a[1] = RatFunc::from_poly(Poly::one(&curve.field));
        Ok(f)
    }

    pub fn from_ratfunc(curve: &Arc<CurveModel>, r: RatFunc) -> FuncElt {
        let mut f = FuncElt::zero(curve);
        f.a[0] = r;
        f
    }

    pub fn from_coeffs(curve: &Arc<CurveModel>, coeffs: Vec<RatFunc>) -> FuncElt {
        let w = FuncElt::width(curve);
        assert!(coeffs.len() <= w, "too many y-coefficients");
        let mut a = coeffs;
        a.resize(w, RatFunc::zero(&curve.field));
        FuncElt {
            curve: curve.clone(),
            a,
        }
    }

    pub fn curve(&self) -> &Arc<CurveModel> {
        &self.curve
    }

    pub fn coeffs(&self) -> &[RatFunc] {
        &self.a
    }

    pub fn is_zero(&self) -> bool {
        self.a.iter().all(|r| r.is_zero())
    }

    fn check(&self, other: &FuncElt) {
        assert!(
            *self.curve == *other.curve,
            "function elements from different curves"
        );
    }

    pub fn add(&self, other: &FuncElt) -> FuncElt {
        self.check(other);
        let a = self
            .a
            .iter()
            .zip(&other.a)
            .map(|(x, y)| x.add(y))
            .collect();
        FuncElt {
            curve: self.curve.clone(),
            a,
        }
    }

    pub fn sub(&self, other: &FuncElt) -> FuncElt {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> FuncElt {
        FuncElt {
            curve: self.curve.clone(),
            a: self.a.iter().map(|r| r.neg()).collect(),
        }
    }

    pub fn scale(&self, c: &Elt) -> FuncElt {
        let cr = RatFunc::from_poly(Poly::constant(c.clone()));
        FuncElt {
            curve: self.curve.clone(),
            a: self.a.iter().map(|r| r.mul(&cr)).collect(),
        }
    }

    pub fn mul(&self, other: &FuncElt) -> FuncElt {
        self.check(other);
        let field = &self.curve.field;
        let w = self.a.len();
        let mut acc = vec![RatFunc::zero(field); 2 * w - 1];
        for (i, x) in self.a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in other.a.iter().enumerate() {
                acc[i + j] = acc[i + j].add(&x.mul(y));
            }
        }
        // Reduce y^k for k >= p via y^p = y + h.
        if let CurveKind::ArtinSchreier { h } = &self.curve.kind {
            let p = w;
            for k in (p..acc.len()).rev() {
                let c = std::mem::replace(&mut acc[k], RatFunc::zero(field));
                if c.is_zero() {
                    continue;
                }
                acc[k - p + 1] = acc[k - p + 1].add(&c);
                acc[k - p] = acc[k - p].add(&c.mul(h));
            }
        }
        acc.truncate(w);
        FuncElt {
            curve: self.curve.clone(),
            a: acc,
        }
    }

    /// Substitute y -> y + c for a prime-field constant c (a Galois
    /// conjugation of the cover).
    fn conjugate(&self, c: u8) -> FuncElt {
        let field = &self.curve.field;
        let w = self.a.len();
        let ce = field.from_int(c as i64);
        let mut out = vec![RatFunc::zero(field); w];
        for (i, ai) in self.a.iter().enumerate() {
            if ai.is_zero() {
                continue;
            }
            // (y + c)^i = sum_j binom(i, j) c^{i-j} y^j; i < p keeps the
            // binomials non-zero mod p only for j <= i.
            let mut binom = 1u64;
            let mut cpow = field.one();
            // walk j = i downto 0 accumulating binom(i, i-j0) and c^{j0}
            for down in 0..=i {
                let j = i - down;
                if down > 0 {
                    binom = binom * (i - down + 1) as u64 / down as u64;
                    cpow = cpow.mul(&ce);
                }
                let coef = field.from_int(binom as i64).mul(&cpow);
                if coef.is_zero() {
                    continue;
                }
                let term = ai.mul(&RatFunc::from_poly(Poly::constant(coef)));
                out[j] = out[j].add(&term);
            }
        }
        FuncElt {
            curve: self.curve.clone(),
            a: out,
        }
    }

    pub fn inv(&self) -> Result<FuncElt> {
        if self.is_zero() {
            return Err(Error::ZeroDivide);
        }
        if matches!(self.curve.kind, CurveKind::Rational) {
            let r = RatFunc::new(
                self.a[0].den().clone(),
                self.a[0].num().clone(),
            )?;
            return Ok(FuncElt::from_ratfunc(&self.curve, r));
        }
        // 1/f = (prod of the other conjugates) / Norm(f).
        let p = self.curve.field.p();
        let mut numer = FuncElt::one(&self.curve);
        for c in 1..p {
            numer = numer.mul(&self.conjugate(c));
        }
        let norm = self.mul(&numer);
        for extra in &norm.a[1..] {
            assert!(extra.is_zero(), "norm must land in the base field");
        }
        let n0 = &norm.a[0];
        let n_inv = RatFunc::new(n0.den().clone(), n0.num().clone())?;
        Ok(FuncElt {
            curve: self.curve.clone(),
            a: numer.a.iter().map(|r| r.mul(&n_inv)).collect(),
        })
    }

    pub fn div(&self, other: &FuncElt) -> Result<FuncElt> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn pow(&self, e: u64) -> FuncElt {
        let mut acc = FuncElt::one(&self.curve);
        let mut b = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&b);
            }
            b = b.mul(&b);
            e >>= 1;
        }
        acc
    }

    /// Move the element to the scalar extension of its curve.
    pub fn lift_to(&self, ext: &Arc<CurveModel>) -> Result<FuncElt> {
        let a: Result<Vec<RatFunc>> = self
            .a
            .iter()
            .map(|r| lift_ratfunc(r, &ext.field))
            .collect();
        Ok(FuncElt {
            curve: ext.clone(),
            a: a?,
        })
    }

    pub fn render(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut terms = Vec::new();
        for (i, r) in self.a.iter().enumerate() {
            if r.is_zero() {
                continue;
            }
            let c = r.render("x");
            let needs_paren = c.contains('+') && !c.starts_with('(');
            let cw = if needs_paren && i > 0 {
                format!("({c})")
            } else {
                c
            };
            let t = match i {
                0 => cw,
                1 if cw == "1" => "y".into(),
                1 => format!("{cw}*y"),
                _ if cw == "1" => format!("y^{i}"),
                _ => format!("{cw}*y^{i}"),
            };
            terms.push(t);
        }
        terms.join("+")
    }
}
