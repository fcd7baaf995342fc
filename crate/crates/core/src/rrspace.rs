//! Riemann–Roch spaces and the linear algebra of trace conditions.
//!
//! L(D) is computed by a monomial ansatz: candidates (sum_i a_i(x) y^i)/M
//! with M clearing the finite support of D, subjected to exact vanishing
//! conditions read off Laurent expansions at every place the ansatz could
//! touch.  The resulting F_q-space is certified against the Riemann–Roch
//! dimension.  On top of it sit the F_p-spaces of the construction: the
//! image V of the additive p-power map plus constants, a complement W with
//! the distinguished non-zero-trace constant c, and the solution space of
//! the trace conditions over the places every good cover family must split.

use std::sync::Arc;

use crate::curve::{
    evaluate, places_above, CPlace, CurveKind, CurveModel, Divisor, FuncElt, SplittingContext,
    XPlace,
};
use crate::error::{Error, Result};
use crate::fplin::{FpMat, FpSubspace};
use crate::gf::Elt;
use crate::poly::{Poly, RatFunc};

/// F_p-basis of F_q in the polynomial basis: 1, a, a^2, ...
fn lambda_basis(field: &Arc<crate::gf::FieldDesc>) -> Vec<Elt> {
    (0..field.degree())
        .map(|t| field.elt_from_index((field.p() as u128).pow(t as u32)))
        .collect()
}

/// An exact basis of L(D) with its ansatz coordinate system.
pub struct LSpace {
    curve: Arc<CurveModel>,
    divisor: Divisor,
    /// F_q-basis of L(D).
    basis: Vec<FuncElt>,
    /// F_p-basis: lambda_t * b_j, indexed j*m + t.
    fp_basis: Vec<FuncElt>,
    /// Ansatz coordinates of the F_p-basis, as columns.
    coords: FpMat,
    /// Row space of all ansatz coordinate vectors of L(D).
    space: FpSubspace,
    /// (y-power, x-power) per F_q ansatz column.
    columns: Vec<(usize, usize)>,
    /// Cleared denominator.
    m_poly: Poly,
    /// Degree bound for the numerator coefficients.
    bound: usize,
}

impl LSpace {
    pub fn curve(&self) -> &Arc<CurveModel> {
        &self.curve
    }

    pub fn divisor(&self) -> &Divisor {
        &self.divisor
    }

    /// F_q-dimension.
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// F_p-dimension (= m · dim).
    pub fn fp_dim(&self) -> usize {
        self.fp_basis.len()
    }

    pub fn basis(&self) -> &[FuncElt] {
        &self.basis
    }

    pub fn fp_basis(&self) -> &[FuncElt] {
        &self.fp_basis
    }

    /// Ansatz coordinates of f, or None when f falls outside the ansatz
    /// family (which contains L(D) whole).
    fn ansatz_vector(&self, f: &FuncElt) -> Option<Vec<u8>> {
        let field = self.curve.field();
        let m = field.degree();
        let cleared = f.mul(&FuncElt::from_ratfunc(
            &self.curve,
            RatFunc::from_poly(self.m_poly.clone()),
        ));
        let mut v = vec![0u8; self.columns.len() * m];
        for (i, coeff) in cleared.coeffs().iter().enumerate() {
            if coeff.is_zero() {
                continue;
            }
            if !coeff.is_poly() {
                return None;
            }
            let poly = coeff.num();
            if poly.degree() > self.bound {
                return None;
            }
            for (k, e) in poly.coeffs().iter().enumerate() {
                if e.is_zero() {
                    continue;
                }
                let col = self
                    .columns
                    .iter()
                    .position(|&(yi, xk)| yi == i && xk == k)
                    .expect("column table covers the degree bound");
                for (t, &digit) in e.coeffs().iter().enumerate() {
                    v[col * m + t] = digit;
                }
            }
        }
        Some(v)
    }

    pub fn contains(&self, f: &FuncElt) -> bool {
        match self.ansatz_vector(f) {
            Some(v) => self.space.contains(&v),
            None => false,
        }
    }

    /// Coordinates of f in the F_p-basis lambda_t * b_j, or None if f is
    /// not in L(D).
    pub fn fp_coords(&self, f: &FuncElt) -> Option<Vec<u8>> {
        let v = self.ansatz_vector(f)?;
        self.coords.solve(&v)
    }

    /// The element with the given F_p-coordinates.
    pub fn elt_from_fp_coords(&self, coords: &[u8]) -> FuncElt {
        assert_eq!(coords.len(), self.fp_basis.len());
        let field = self.curve.field();
        let mut acc = FuncElt::zero(&self.curve);
        for (c, b) in coords.iter().zip(&self.fp_basis) {
            if *c != 0 {
                acc = acc.add(&b.scale(&field.from_int(*c as i64)));
            }
        }
        acc
    }
}

/// The x-places the ansatz has to watch: everything under the divisor
/// support, the poles of h, and infinity.
fn ansatz_xplaces(curve: &Arc<CurveModel>, d: &Divisor) -> Result<Vec<XPlace>> {
    let mut out: Vec<XPlace> = Vec::new();
    let push = |xp: XPlace, out: &mut Vec<XPlace>| {
        if !out.contains(&xp) {
            out.push(xp);
        }
    };
    push(XPlace::Infinite, &mut out);
    for q in d.support() {
        push(q.below().clone(), &mut out);
    }
    if let CurveKind::ArtinSchreier { h } = curve.kind() {
        if h.den().degree() > 0 {
            let (_, factors) = h.den().irreducible_factors()?;
            for (pi, _) in factors {
                push(XPlace::Finite { pi }, &mut out);
            }
        }
    }
    Ok(out)
}

/// Exact basis of L(D) for an effective divisor D, certified against the
/// Riemann–Roch dimension.
pub fn lspace_basis(curve: &Arc<CurveModel>, d: &Divisor) -> Result<LSpace> {
    if !d.entries().iter().all(|(_, n)| *n >= 0) {
        return Err(Error::Invalid(
            "Riemann-Roch solver handles effective divisors only".into(),
        ));
    }
    if let CurveKind::ArtinSchreier { h } = curve.kind() {
        if !h.is_poly() {
            return Err(Error::Invalid(
                "the ansatz needs a polynomial right-hand side in the curve model".into(),
            ));
        }
    }
    let field = curve.field().clone();
    let m = field.degree();
    let p = field.p() as usize;
    let width = match curve.kind() {
        CurveKind::Rational => 1,
        CurveKind::ArtinSchreier { .. } => p,
    };
    let genus = curve.genus();

    // Cleared denominator: for each finite x-place below the support, a
    // power covering the worst pole requirement above it.
    let mut m_poly = Poly::one(&field);
    let mut m_deg = 0usize;
    {
        let mut done: Vec<XPlace> = Vec::new();
        for (q, _) in d.entries() {
            let below = q.below().clone();
            if matches!(below, XPlace::Infinite) || done.contains(&below) {
                continue;
            }
            let pi = match &below {
                XPlace::Finite { pi } => pi.clone(),
                XPlace::Infinite => unreachable!(),
            };
            let e_j = d
                .entries()
                .iter()
                .filter(|(r, _)| r.below() == &below)
                .map(|(r, n)| {
                    let e = r.ram_index() as i64;
                    (*n + e - 1) / e
                })
                .max()
                .unwrap_or(0)
                .max(0) as usize;
            m_deg += e_j * pi.degree();
            m_poly = m_poly.mul(&pi.pow(e_j as u64));
            done.push(below);
        }
    }

    // Numerator degree bound, generous: undershoot is caught by the
    // dimension certificate below, overshoot only costs matrix columns.
    let xplaces = ansatz_xplaces(curve, d)?;
    let inf_places = places_above(curve, &XPlace::Infinite, curve.default_prec())?;
    let x_fe = FuncElt::x(curve);
    let mut x_pole_min = i64::MAX;
    let mut y_pole_max = 0i64;
    for pl in &inf_places {
        x_pole_min = x_pole_min.min(-crate::curve::valuation(curve, &x_fe, pl)?);
        if width > 1 {
            let y_fe = FuncElt::y(curve)?;
            y_pole_max = y_pole_max.max(-crate::curve::valuation(curve, &y_fe, pl)?);
        }
    }
    assert!(x_pole_min >= 1, "x must have a pole at infinity");
    let n_inf_max = d
        .entries()
        .iter()
        .filter(|(q, _)| matches!(q.below(), XPlace::Infinite))
        .map(|(_, n)| *n)
        .max()
        .unwrap_or(0);
    let slack = n_inf_max
        + (width as i64 - 1) * y_pole_max.max(0)
        + genus
        + 2 * width as i64
        + 4;
    let bound = m_deg + ((slack + x_pole_min - 1) / x_pole_min).max(0) as usize;

    let columns: Vec<(usize, usize)> = (0..width)
        .flat_map(|i| (0..=bound).map(move |k| (i, k)))
        .collect();
    let n_fq_cols = columns.len();
    let n_cols = n_fq_cols * m;
    if n_cols > 20_000 {
        return Err(Error::SizeGuard(n_cols as u128));
    }
    let lambdas = lambda_basis(&field);

    // Vanishing conditions at every place above the watched x-places.
    // Enough precision to see every coefficient the conditions touch, with
    // room for the valuation losses of repeated series products.
    let prec_needed = (bound as i64 + m_deg as i64 + y_pole_max.max(0) + 8)
        * (width as i64 + 2)
        + 32;
    let mut rows: Vec<Vec<u8>> = Vec::new();
    for xp in &xplaces {
        for place in places_above(curve, xp, prec_needed)? {
            let required = -d.multiplicity(&place);
            let res = place.residue_field().clone();
            let dm = res.degree();
            // Expansions of the F_q-columns x^k y^i / M at this place.
            let mut col_series = Vec::with_capacity(n_fq_cols);
            let m_inv = series_inverse_of_poly(&m_poly, &place, prec_needed)?;
            let xs = place.x_series().clone();
            let mut x_pows = Vec::with_capacity(bound + 1);
            let one = crate::local::LaurentSeries::constant(res.one());
            x_pows.push(one.clone());
            for _ in 1..=bound {
                let last = x_pows.last().unwrap().clone();
                x_pows.push(last.mul(&xs));
            }
            let mut y_pow = one;
            for i in 0..width {
                if i > 0 {
                    y_pow = y_pow.mul(place.y_series().expect("cover place"));
                }
                for k in 0..=bound {
                    col_series.push(x_pows[k].mul(&y_pow).mul(&m_inv));
                }
            }
            let lo = col_series
                .iter()
                .map(|s| s.val_lower_bound())
                .min()
                .unwrap_or(0);
            for s in &col_series {
                if s.prec() < required {
                    return Err(Error::InsufficientPrecision(s.prec()));
                }
            }
            // One condition per coefficient below the allowed pole order,
            // flattened to F_p components of the residue field.
            for j in lo..required {
                let mut block = vec![vec![0u8; n_cols]; dm];
                let mut nonzero = false;
                for (cq, s) in col_series.iter().enumerate() {
                    let base = s.coeff(j);
                    if base.is_zero() {
                        continue;
                    }
                    for (t, lam) in lambdas.iter().enumerate() {
                        let v = res.lift(lam)?.mul(&base);
                        for (comp, digit) in v.coeffs().iter().enumerate() {
                            if *digit != 0 {
                                block[comp][cq * m + t] = *digit;
                                nonzero = true;
                            }
                        }
                    }
                }
                if nonzero {
                    rows.extend(block);
                }
            }
        }
    }

    let mat = if rows.is_empty() {
        FpMat::zeros(field.p(), 1, n_cols)
    } else {
        FpMat::from_rows(field.p(), &rows)
    };
    let null = mat.nullspace();
    if null.len() % m != 0 {
        return Err(Error::DimensionMismatch(format!(
            "solution count {} is not a multiple of the field degree {m}",
            null.len()
        )));
    }
    let ell = null.len() / m;

    // Certify against Riemann-Roch.
    let expected = d.degree() + 1 - genus;
    if (ell as i64) < expected {
        return Err(Error::DimensionMismatch(format!(
            "found {ell} functions, Riemann-Roch guarantees {expected}"
        )));
    }
    if d.degree() >= 2 * genus - 1 && ell as i64 != expected {
        return Err(Error::DimensionMismatch(format!(
            "found {ell} functions, Riemann-Roch demands exactly {expected}"
        )));
    }

    // Extract an F_q-basis from the F_p-solution space.
    let space = FpSubspace::from_vectors(field.p(), n_cols, &null);
    let mut basis: Vec<FuncElt> = Vec::with_capacity(ell);
    let mut fp_basis: Vec<FuncElt> = Vec::with_capacity(ell * m);
    let mut fp_vecs: Vec<Vec<u8>> = Vec::with_capacity(ell * m);
    let mut seen = FpSubspace::zero(field.p(), n_cols);
    let materialize = |v: &[u8]| -> FuncElt {
        let mut coeffs = vec![Poly::zero(&field); width];
        for (cq, &(i, k)) in columns.iter().enumerate() {
            let digits: Vec<u8> = v[cq * m..(cq + 1) * m].to_vec();
            let e = field.elt(&digits).expect("digit vector fits the field");
            if !e.is_zero() {
                coeffs[i] = coeffs[i].add(&Poly::monomial(e, k));
            }
        }
        let rats: Vec<RatFunc> = coeffs
            .into_iter()
            .map(|c| {
                RatFunc::new(c, m_poly.clone()).expect("non-zero cleared denominator")
            })
            .collect();
        FuncElt::from_coeffs(curve, rats)
    };
    for v in &null {
        if seen.contains(v) {
            continue;
        }
        let f = materialize(v);
        basis.push(f.clone());
        for lam in &lambdas {
            let g = f.scale(lam);
            let gv = ansatz_of(&g, &columns, &m_poly, bound, m, curve)?;
            seen = seen.sum(&FpSubspace::from_vectors(field.p(), n_cols, &[gv.clone()]));
            fp_basis.push(g);
            fp_vecs.push(gv);
        }
    }
    if basis.len() != ell {
        return Err(Error::DimensionMismatch(format!(
            "basis extraction found {} of {ell} generators",
            basis.len()
        )));
    }

    let mut coords = FpMat::zeros(field.p(), n_cols, fp_vecs.len());
    for (c, v) in fp_vecs.iter().enumerate() {
        for (r, &digit) in v.iter().enumerate() {
            coords.set(r, c, digit);
        }
    }

    let ls = LSpace {
        curve: curve.clone(),
        divisor: d.clone(),
        basis,
        fp_basis,
        coords,
        space,
        columns,
        m_poly,
        bound,
    };

    // The constants sit inside every L(D) with effective D.
    if !ls.contains(&FuncElt::one(curve)) {
        return Err(Error::DimensionMismatch(
            "constants missing from L(D)".into(),
        ));
    }
    debug_assert!(pole_confinement_holds(&ls)?);
    Ok(ls)
}

/// Standalone ansatz-coordinate extraction (used during basis assembly,
/// before the LSpace value exists).
fn ansatz_of(
    f: &FuncElt,
    columns: &[(usize, usize)],
    m_poly: &Poly,
    bound: usize,
    m: usize,
    curve: &Arc<CurveModel>,
) -> Result<Vec<u8>> {
    let cleared = f.mul(&FuncElt::from_ratfunc(
        curve,
        RatFunc::from_poly(m_poly.clone()),
    ));
    let mut v = vec![0u8; columns.len() * m];
    for (i, coeff) in cleared.coeffs().iter().enumerate() {
        if coeff.is_zero() {
            continue;
        }
        if !coeff.is_poly() || coeff.num().degree() > bound {
            return Err(Error::Internal(
                "solver basis element escaped its own ansatz".into(),
            ));
        }
        for (k, e) in coeff.num().coeffs().iter().enumerate() {
            if e.is_zero() {
                continue;
            }
            let col = columns
                .iter()
                .position(|&(yi, xk)| yi == i && xk == k)
                .expect("column table covers the degree bound");
            for (t, &digit) in e.coeffs().iter().enumerate() {
                v[col * m + t] = digit;
            }
        }
    }
    Ok(v)
}

fn series_inverse_of_poly(
    m_poly: &Poly,
    place: &CPlace,
    prec: i64,
) -> Result<crate::local::LaurentSeries> {
    let inv = RatFunc::new(Poly::one(m_poly.field()), m_poly.clone())?;
    crate::curve::ratfunc_series(&inv, place.x_series(), place.residue_field(), prec)
}

/// Check that basis elements respect the divisor bounds, by expansion.
fn pole_confinement_holds(ls: &LSpace) -> Result<bool> {
    for f in &ls.basis {
        for (q, n) in ls.divisor.entries() {
            let v = crate::curve::valuation(&ls.curve, f, q)?;
            if v < -n {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

// ---------------------------------------------------------------------------
// The p-power image space V, the complement, and the trace conditions
// ---------------------------------------------------------------------------

/// V = { g^p - g : g in L(floor(D/p)) } + (constants), as an F_p-subspace
/// in the coordinates of L(D).  Its dimension provably equals
/// dim_{F_p} L(floor(D/p)); any deviation is a hard error.
pub fn pglobal_image(l_big: &LSpace, l_small: &LSpace) -> Result<FpSubspace> {
    let curve = l_big.curve();
    let field = curve.field();
    let p = field.p();
    let ambient = l_big.fp_dim();
    let mut vecs: Vec<Vec<u8>> = Vec::new();
    for g in l_small.fp_basis() {
        let wp = g.pow(p as u64).sub(g);
        let coords = l_big.fp_coords(&wp).ok_or_else(|| {
            Error::DimensionMismatch(
                "a p-power image escaped L(D); the divisor bookkeeping is broken".into(),
            )
        })?;
        vecs.push(coords);
    }
    for lam in lambda_basis(field) {
        let c = FuncElt::constant(curve, lam);
        let coords = l_big
            .fp_coords(&c)
            .ok_or_else(|| Error::DimensionMismatch("constants escaped L(D)".into()))?;
        vecs.push(coords);
    }
    let v = FpSubspace::from_vectors(p, ambient, &vecs);
    let expected = l_small.fp_dim();
    if v.dim() != expected {
        return Err(Error::DimensionMismatch(format!(
            "p-power image has dimension {}, the dimension law demands {expected}",
            v.dim()
        )));
    }
    Ok(v)
}

/// The complement data: W with W ∩ V = 0 and L(D) = W ⊕ V, the
/// distinguished constant c of non-zero absolute trace, and
/// W̃ = W ⊕ F_p·c.
pub struct WTilde {
    pub v: FpSubspace,
    pub w: FpSubspace,
    pub wtilde: FpSubspace,
    pub c: Elt,
    /// Coordinates of c in L(D).
    pub c_coords: Vec<u8>,
}

pub fn build_wtilde(l_big: &LSpace, v: &FpSubspace) -> Result<WTilde> {
    let curve = l_big.curve();
    let field = curve.field();
    let p = field.p();
    let full = FpSubspace::full(p, l_big.fp_dim());
    let w = v.complement_in(&full)?;
    let c = field.nonzero_trace_constant()?;
    let c_coords = l_big
        .fp_coords(&FuncElt::constant(curve, c.clone()))
        .ok_or_else(|| Error::Internal("constant missing from L(D)".into()))?;
    let mut vecs: Vec<Vec<u8>> = w.basis().to_vec();
    vecs.push(c_coords.clone());
    let wtilde = FpSubspace::from_vectors(p, l_big.fp_dim(), &vecs);
    if wtilde.dim() != w.dim() + 1 {
        return Err(Error::Internal(
            "the distinguished constant fell inside the complement".into(),
        ));
    }
    Ok(WTilde {
        v: v.clone(),
        w,
        wtilde,
        c,
        c_coords,
    })
}

/// Solve the trace conditions Tr(f(P)) = 0 over all P in the split-target
/// list, inside W̃.  Returns the solution space in L(D) coordinates.
pub fn trace_system(
    l_big: &LSpace,
    wt: &WTilde,
    ctx: &SplittingContext,
) -> Result<FpSubspace> {
    let curve = l_big.curve();
    let p = curve.field().p();
    let wt_basis = wt.wtilde.basis();
    let dim_wt = wt_basis.len();
    let mut rows: Vec<Vec<u8>> = Vec::with_capacity(ctx.split_targets.len());
    for place in &ctx.split_targets {
        let mut row = vec![0u8; dim_wt];
        for (j, coords) in wt_basis.iter().enumerate() {
            let f = l_big.elt_from_fp_coords(coords);
            let value = evaluate(curve, &f, place).map_err(|e| match e {
                Error::PoleAtPoint(msg) => Error::PoleAtSplitPoint(format!(
                    "trace condition at {}: {msg}",
                    place.name()
                )),
                other => other,
            })?;
            row[j] = value.trace_to_prime();
        }
        rows.push(row);
    }
    let null = if rows.is_empty() {
        FpSubspace::full(p, dim_wt).basis().to_vec()
    } else {
        FpMat::from_rows(p, &rows).nullspace()
    };
    // Map solutions back to L(D) coordinates.
    let ambient = l_big.fp_dim();
    let mut vecs: Vec<Vec<u8>> = Vec::with_capacity(null.len());
    for sol in &null {
        let mut acc = vec![0u8; ambient];
        for (j, &cj) in sol.iter().enumerate() {
            if cj == 0 {
                continue;
            }
            for (t, &bt) in wt_basis[j].iter().enumerate() {
                acc[t] = ((acc[t] as u16 + (cj as u16 * bt as u16)) % p as u16) as u8;
            }
        }
        vecs.push(acc);
    }
    let f_sol = FpSubspace::from_vectors(p, ambient, &vecs);
    let floor = wt.wtilde.dim() as i64 - ctx.split_targets.len() as i64;
    assert!(
        f_sol.dim() as i64 >= floor,
        "solution space fell below the rank bound"
    );
    // Direct re-verification, independent of the matrix path.
    for coords in f_sol.basis() {
        let f = l_big.elt_from_fp_coords(coords);
        for place in &ctx.split_targets {
            let value = evaluate(curve, &f, place)?;
            assert_eq!(
                value.trace_to_prime(),
                0,
                "solution violates its own trace condition at {}",
                place.name()
            );
        }
    }
    Ok(f_sol)
}

/// Condition (i): the family meets the p-power image only in 0, so no line
/// of it degenerates.
pub fn verify_condition_i(f: &FpSubspace, v: &FpSubspace) -> bool {
    f.meets_trivially(v)
}

/// Everything cmd-level callers need, solved in one pass.
pub struct TraceSolution {
    pub lspace: LSpace,
    pub lsmall: LSpace,
    pub wt: WTilde,
    pub ctx: SplittingContext,
    pub f_sol: FpSubspace,
}

pub fn solve_trace_space(curve: &Arc<CurveModel>, d: &Divisor) -> Result<TraceSolution> {
    let lspace = lspace_basis(curve, d)?;
    let lsmall = lspace_basis(curve, &d.floor_div(curve.field().p() as i64))?;
    let v = pglobal_image(&lspace, &lsmall)?;
    let wt = build_wtilde(&lspace, &v)?;
    let ctx = SplittingContext::new(curve, d)?;
    let f_sol = trace_system(&lspace, &wt, &ctx)?;
    if !verify_condition_i(&f_sol, &wt.v) {
        return Err(Error::ConditionIViolated(
            "the solution space meets the p-power image".into(),
        ));
    }
    Ok(TraceSolution {
        lspace,
        lsmall,
        wt,
        ctx,
        f_sol,
    })
}

/// Does f satisfy every trace condition of the context?  (Membership in
/// the solution set is complement-independent, unlike membership in a
/// particular F_sol.)
pub fn satisfies_trace_conditions(
    l_big: &LSpace,
    f: &FuncElt,
    ctx: &SplittingContext,
) -> Result<bool> {
    let curve = l_big.curve();
    for place in &ctx.split_targets {
        let value = evaluate(curve, f, place)?;
        if value.trace_to_prime() != 0 {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::rational_places;
    use crate::expr::parse_func;
    use crate::gf::FieldDesc;

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

    /// Degree-1 place with the given affine coordinates.
    fn pt(curve: &Arc<CurveModel>, x0: i64, y0: i64) -> CPlace {
        let f = curve.field();
        let places = rational_places(curve).unwrap();
        let xv = f.from_int(x0);
        let yv = f.from_int(y0);
        places
            .into_iter()
            .find(|p| {
                matches!(p.below(), XPlace::Finite { pi }
                    if pi.degree() == 1 && pi.coeff(0).neg() == xv)
                    && p.branch() == &crate::curve::BranchTag::Value(yv.clone())
            })
            .expect("no such rational point")
    }

    fn pinf(curve: &Arc<CurveModel>) -> CPlace {
        rational_places(curve).unwrap().into_iter().next().unwrap()
    }

    fn ex1_divisor(curve: &Arc<CurveModel>) -> Divisor {
        // 3*inf + (0,0) + (1,1)
        Divisor::new(vec![
            (pinf(curve), 3),
            (pt(curve, 0, 0), 1),
            (pt(curve, 1, 1), 1),
        ])
    }

    #[test]
    fn lspace_dimensions_and_membership() {
        let c = ex1_curve();
        let d = ex1_divisor(&c);
        let ls = lspace_basis(&c, &d).unwrap();
        assert_eq!(ls.dim(), 5);
        assert_eq!(ls.fp_dim(), 5);
        for src in ["1", "x", "y", "x/(x+y)", "x*y/(x+y)"] {
            let f = parse_func(&c, src).unwrap();
            assert!(ls.contains(&f), "{src} must lie in L(D)");
        }
        // x^2 has a pole of order 4 at infinity: outside L(D).
        let x2 = parse_func(&c, "x^2").unwrap();
        assert!(!ls.contains(&x2));
        // y/x has a pole at the split place (0,1) outside the support.
        let yx = parse_func(&c, "y/x").unwrap();
        assert!(!ls.contains(&yx));
    }

    #[test]
    fn lspace_of_zero_divisor_is_constants() {
        let c = ex1_curve();
        let ls = lspace_basis(&c, &Divisor::zero()).unwrap();
        assert_eq!(ls.dim(), 1);
        assert!(ls.contains(&FuncElt::one(&c)));
        assert!(!ls.contains(&FuncElt::x(&c)));
    }

    #[test]
    fn lspace_example3() {
        let c = ex3_curve();
        let d = Divisor::new(vec![(pinf(&c), 11)]);
        let ls = lspace_basis(&c, &d).unwrap();
        assert_eq!(ls.dim(), 11);
        assert_eq!(ls.fp_dim(), 22);
    }

    #[test]
    fn fp_coords_round_trip() {
        let c = ex1_curve();
        let ls = lspace_basis(&c, &ex1_divisor(&c)).unwrap();
        let f = parse_func(&c, "x + x/(x+y)").unwrap();
        let coords = ls.fp_coords(&f).unwrap();
        assert_eq!(ls.elt_from_fp_coords(&coords), f);
        assert!(ls.fp_coords(&parse_func(&c, "x^2").unwrap()).is_none());
    }

    #[test]
    fn p_power_image_dimension_law() {
        // First curve: dim V = 1.
        let c = ex1_curve();
        let d = ex1_divisor(&c);
        let big = lspace_basis(&c, &d).unwrap();
        let small = lspace_basis(&c, &d.floor_div(2)).unwrap();
        assert_eq!(small.dim(), 1);
        let v = pglobal_image(&big, &small).unwrap();
        assert_eq!(v.dim(), 1);

        // Third curve: dim V = 2*5 = 10.
        let c3 = ex3_curve();
        let d3 = Divisor::new(vec![(pinf(&c3), 11)]);
        let big3 = lspace_basis(&c3, &d3).unwrap();
        let small3 = lspace_basis(&c3, &d3.floor_div(2)).unwrap();
        assert_eq!(small3.dim(), 5);
        let v3 = pglobal_image(&big3, &small3).unwrap();
        assert_eq!(v3.dim(), 10);
    }

    #[test]
    fn p_power_image_contains_wp_of_y() {
        // On y^3 - y = x^2 - 1, the image of y is exactly x^2 - 1.
        let c = ex2_curve();
        let q = pt(&c, 1, 0);
        let d = Divisor::new(vec![(pinf(&c), 8), (q, 2)]);
        let big = lspace_basis(&c, &d).unwrap();
        let small = lspace_basis(&c, &d.floor_div(3)).unwrap();
        assert_eq!(small.dim(), 2);
        let v = pglobal_image(&big, &small).unwrap();
        assert_eq!(v.dim(), 2);
        let wp_y = parse_func(&c, "x^2-1").unwrap();
        let coords = big.fp_coords(&wp_y).unwrap();
        assert!(v.contains(&coords));
        // And condition (i) must reject a family containing it.
        let f_bad = FpSubspace::from_vectors(3, big.fp_dim(), &[coords]);
        assert!(!verify_condition_i(&f_bad, &v));
    }

    #[test]
    fn solve_first_example_end_to_end() {
        let c = ex1_curve();
        let d = ex1_divisor(&c);
        let sol = solve_trace_space(&c, &d).unwrap();
        assert_eq!(sol.wt.wtilde.dim(), 5);
        assert_eq!(sol.f_sol.dim(), 3);
        assert_eq!(sol.ctx.n(), 5);
        assert_eq!(sol.ctx.delta, 3);
        // The published solution generators solve the system and are
        // independent modulo the p-power image.
        let mut vecs = sol.wt.v.basis().to_vec();
        for src in ["x + x/(x+y)", "1+x+y", "x*y/(x+y)"] {
            let f = parse_func(&c, src).unwrap();
            assert!(satisfies_trace_conditions(&sol.lspace, &f, &sol.ctx).unwrap());
            let coords = sol.lspace.fp_coords(&f).expect("inside L(D)");
            assert!(!sol.wt.v.contains(&coords), "{src} degenerates");
            vecs.push(coords);
        }
        let joint = FpSubspace::from_vectors(2, sol.lspace.fp_dim(), &vecs);
        assert_eq!(
            joint.dim(),
            sol.wt.v.dim() + 3,
            "published generators must stay independent modulo the image"
        );
        // Here W-tilde is all of L(D), so literal membership holds too.
        for src in ["x + x/(x+y)", "1+x+y", "x*y/(x+y)"] {
            let coords = sol
                .lspace
                .fp_coords(&parse_func(&c, src).unwrap())
                .unwrap();
            assert!(sol.f_sol.contains(&coords));
        }
    }

    #[test]
    fn solve_second_example_dimensions() {
        let c = ex2_curve();
        let d = Divisor::new(vec![(pinf(&c), 8), (pt(&c, 1, 0), 2)]);
        let sol = solve_trace_space(&c, &d).unwrap();
        assert_eq!(sol.lspace.dim(), 10);
        assert_eq!(sol.wt.wtilde.dim(), 9);
        assert_eq!(sol.f_sol.dim(), 4);
        assert_eq!(sol.ctx.delta, 2);
    }

    #[test]
    fn solve_third_example_dimensions() {
        let c = ex3_curve();
        let d = Divisor::new(vec![(pinf(&c), 11)]);
        let sol = solve_trace_space(&c, &d).unwrap();
        assert_eq!(sol.wt.wtilde.dim(), 13);
        assert_eq!(sol.f_sol.dim(), 5);
        // The distinguished constant is the field generator: the first
        // enumerated element with non-zero absolute trace.
        assert_eq!(sol.wt.c, c.field().gen());
    }

    #[test]
    fn trace_rows_of_p_power_images_vanish() {
        // For g in L(floor(D/p)), the image g^p - g has zero trace at
        // every rational point where it is regular.
        let c = ex2_curve();
        let d = Divisor::new(vec![(pinf(&c), 8), (pt(&c, 1, 0), 2)]);
        let sol = solve_trace_space(&c, &d).unwrap();
        for g in sol.lsmall.fp_basis() {
            let wp = g.pow(3).sub(g);
            assert!(satisfies_trace_conditions(&sol.lspace, &wp, &sol.ctx).unwrap());
            let coords = sol.lspace.fp_coords(&wp).unwrap();
            assert!(sol.wt.v.contains(&coords));
        }
    }

    #[test]
    fn solution_set_is_complement_independent() {
        // Rebuild with a complement grown from reversed unit vectors; the
        // solution spaces must agree modulo V.
        let c = ex1_curve();
        let d = ex1_divisor(&c);
        let sol = solve_trace_space(&c, &d).unwrap();
        let p = c.field().p();
        let dim = sol.lspace.fp_dim();

        let mut alt = sol.wt.v.clone();
        let mut w2_vecs: Vec<Vec<u8>> = Vec::new();
        for i in (0..dim).rev() {
            let mut unit = vec![0u8; dim];
            unit[i] = 1;
            if !alt.contains(&unit) {
                w2_vecs.push(unit.clone());
                alt = alt.sum(&FpSubspace::from_vectors(p, dim, &[unit]));
            }
        }
        let w2 = FpSubspace::from_vectors(p, dim, &w2_vecs);
        assert!(w2.meets_trivially(&sol.wt.v));
        let mut vecs = w2.basis().to_vec();
        vecs.push(sol.wt.c_coords.clone());
        let wtilde2 = FpSubspace::from_vectors(p, dim, &vecs);
        let wt2 = WTilde {
            v: sol.wt.v.clone(),
            w: w2,
            wtilde: wtilde2,
            c: sol.wt.c.clone(),
            c_coords: sol.wt.c_coords.clone(),
        };
        let f2 = trace_system(&sol.lspace, &wt2, &sol.ctx).unwrap();
        assert_eq!(f2.dim(), sol.f_sol.dim());
        let q1 = sol.f_sol.sum(&sol.wt.v);
        let q2 = f2.sum(&sol.wt.v);
        assert_eq!(q1.basis(), q2.basis(), "quotient images must agree");
    }
}
