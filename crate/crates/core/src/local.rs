//! Truncated Laurent series over finite fields, Hensel lifting, and the
//! local Artin–Schreier reduction.
//!
//! A series is known modulo t^prec.  Exactly-known series (finite Laurent
//! polynomials) carry the sentinel precision [`EXACT`]; all precision
//! arithmetic saturates there.  The reduction loop subtracts local ℘-parts
//! u·t^{-m/p} until the pole order is prime to p or the series is regular,
//! yielding the reduced pole order and the witness substitution.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::gf::{Elt, FieldDesc};

/// Sentinel precision for exactly-known series.
pub const EXACT: i64 = i64::MAX / 4;

fn prec_shift(p: i64, v: i64) -> i64 {
    if p >= EXACT {
        EXACT
    } else {
        (p + v).min(EXACT)
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct LaurentSeries {
    field: Arc<FieldDesc>,
    v0: i64,      // exponent of the first stored coefficient
    c: Vec<Elt>,  // c[0] != 0 unless empty; trailing zeros trimmed
    prec: i64,    // coefficients of t^k for k < prec are known
}

impl std::fmt::Debug for LaurentSeries {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut terms = Vec::new();
        for (i, e) in self.c.iter().enumerate() {
            if e.is_zero() {
                continue;
            }
            let k = self.v0 + i as i64;
            let coef = format!("{e}");
            let t = match k {
                0 => coef,
                1 if coef == "1" => "t".into(),
                1 => format!("({coef})*t"),
                _ if coef == "1" => format!("t^{k}"),
                _ => format!("({coef})*t^{k}"),
            };
            terms.push(t);
        }
        let body = if terms.is_empty() {
            "0".to_string()
        } else {
            terms.join(" + ")
        };
        if self.prec >= EXACT {
            write!(f, "{body}")
        } else {
            write!(f, "{body} + O(t^{})", self.prec)
        }
    }
}

impl LaurentSeries {
    pub fn zero_to_prec(field: &Arc<FieldDesc>, prec: i64) -> LaurentSeries {
        LaurentSeries {
            field: field.clone(),
            v0: 0,
            c: Vec::new(),
            prec,
        }
    }

    pub fn zero_exact(field: &Arc<FieldDesc>) -> LaurentSeries {
        LaurentSeries::zero_to_prec(field, EXACT)
    }

    pub fn from_coeffs(field: &Arc<FieldDesc>, v0: i64, c: Vec<Elt>, prec: i64) -> LaurentSeries {
        let mut s = LaurentSeries {
            field: field.clone(),
            v0,
            c,
            prec,
        };
        s.normalize();
        s
    }

    pub fn constant(e: Elt) -> LaurentSeries {
        LaurentSeries::monomial(e, 0)
    }

    pub fn monomial(e: Elt, k: i64) -> LaurentSeries {
        let field = e.field().clone();
        LaurentSeries::from_coeffs(&field, k, vec![e], EXACT)
    }

    pub fn uniformizer(field: &Arc<FieldDesc>) -> LaurentSeries {
        LaurentSeries::monomial(field.one(), 1)
    }

    fn normalize(&mut self) {
        // Drop coefficients at or beyond the precision horizon.
        if self.prec < EXACT {
            let keep = (self.prec - self.v0).max(0) as usize;
            self.c.truncate(keep.min(self.c.len()));
        }
        while self.c.first().map_or(false, |e| e.is_zero()) {
            self.c.remove(0);
            self.v0 += 1;
        }
        while self.c.last().map_or(false, |e| e.is_zero()) {
            self.c.pop();
        }
        if self.c.is_empty() {
            self.v0 = 0;
        }
    }

    pub fn field(&self) -> &Arc<FieldDesc> {
        &self.field
    }

    pub fn prec(&self) -> i64 {
        self.prec
    }

    pub fn is_exact(&self) -> bool {
        self.prec >= EXACT
    }

    /// True when no non-zero coefficient is known.
    pub fn is_zero_to_prec(&self) -> bool {
        self.c.is_empty()
    }

    /// True when exactly one coefficient is stored (a single power of t).
    pub fn is_monomial(&self) -> bool {
        self.c.len() == 1
    }

    /// Valuation; `None` when the series is zero to its precision.
    pub fn val(&self) -> Option<i64> {
        if self.c.is_empty() {
            None
        } else {
            Some(self.v0)
        }
    }

    /// A certified lower bound for the valuation.
    pub fn val_lower_bound(&self) -> i64 {
        self.val().unwrap_or(self.prec)
    }

    /// Coefficient of t^k.  The caller must stay below the precision horizon.
    pub fn coeff(&self, k: i64) -> Elt {
        assert!(k < self.prec, "coefficient of t^{k} beyond precision {}", self.prec);
        if k < self.v0 || k >= self.v0 + self.c.len() as i64 {
            self.field.zero()
        } else {
            self.c[(k - self.v0) as usize].clone()
        }
    }

    pub fn leading_coeff(&self) -> Option<&Elt> {
        self.c.first()
    }

    pub fn truncate(&self, new_prec: i64) -> LaurentSeries {
        let mut s = self.clone();
        s.prec = s.prec.min(new_prec);
        s.normalize();
        s
    }

    /// Multiply by t^k.
    pub fn shift(&self, k: i64) -> LaurentSeries {
        LaurentSeries {
            field: self.field.clone(),
            v0: self.v0 + k,
            c: self.c.clone(),
            prec: prec_shift(self.prec, k),
        }
    }

    fn check(&self, other: &LaurentSeries) {
        assert!(
            **self.field() == **other.field(),
            "mixed-field series arithmetic"
        );
    }

    pub fn add(&self, other: &LaurentSeries) -> LaurentSeries {
        self.check(other);
        let prec = self.prec.min(other.prec);
        if self.c.is_empty() && other.c.is_empty() {
            return LaurentSeries::zero_to_prec(&self.field, prec);
        }
        let lo = match (self.val(), other.val()) {
            (Some(a), Some(b)) => a.min(b),
            (Some(a), None) => a,
            (None, Some(b)) => b,
            (None, None) => unreachable!(),
        };
        let hi_a = self.v0 + self.c.len() as i64;
        let hi_b = other.v0 + other.c.len() as i64;
        let hi = hi_a.max(hi_b).min(prec);
        let mut c = Vec::new();
        for k in lo..hi {
            let a = if k >= self.v0 && k < hi_a {
                self.c[(k - self.v0) as usize].clone()
            } else {
                self.field.zero()
            };
            let b = if k >= other.v0 && k < hi_b {
                other.c[(k - other.v0) as usize].clone()
            } else {
                self.field.zero()
            };
            c.push(a.add(&b));
        }
        LaurentSeries::from_coeffs(&self.field, lo, c, prec)
    }

    pub fn neg(&self) -> LaurentSeries {
        LaurentSeries {
            field: self.field.clone(),
            v0: self.v0,
            c: self.c.iter().map(|e| e.neg()).collect(),
            prec: self.prec,
        }
    }

    pub fn sub(&self, other: &LaurentSeries) -> LaurentSeries {
        self.add(&other.neg())
    }

    pub fn scale(&self, k: &Elt) -> LaurentSeries {
        if k.is_zero() {
            return LaurentSeries::zero_to_prec(&self.field, self.prec);
        }
        LaurentSeries {
            field: self.field.clone(),
            v0: self.v0,
            c: self.c.iter().map(|e| e.mul(k)).collect(),
            prec: self.prec,
        }
    }

    pub fn mul(&self, other: &LaurentSeries) -> LaurentSeries {
        self.check(other);
        let va = self.val_lower_bound();
        let vb = other.val_lower_bound();
        let prec = prec_shift(self.prec, vb).min(prec_shift(other.prec, va));
        if self.c.is_empty() || other.c.is_empty() {
            return LaurentSeries::zero_to_prec(&self.field, prec);
        }
        let lo = self.v0 + other.v0;
        let len = if prec >= EXACT {
            self.c.len() + other.c.len() - 1
        } else {
            ((prec - lo).max(0) as usize).min(self.c.len() + other.c.len() - 1)
        };
        let mut c = vec![self.field.zero(); len];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() || i >= len {
                continue;
            }
            for (j, b) in other.c.iter().enumerate() {
                if i + j >= len {
                    break;
                }
                c[i + j] = c[i + j].add(&a.mul(b));
            }
        }
        LaurentSeries::from_coeffs(&self.field, lo, c, prec)
    }

    /// Multiplicative inverse.  The divisor must have a visible leading term;
    /// exact series invert exactly only when they are monomials (otherwise
    /// the caller must truncate to a finite working precision first).
    pub fn inv(&self) -> Result<LaurentSeries> {
        let Some(v) = self.val() else {
            return Err(Error::ZeroDivide);
        };
        let lead_inv = self.c[0].inv()?;
        if self.c.len() == 1 {
            return Ok(LaurentSeries {
                field: self.field.clone(),
                v0: -v,
                c: vec![lead_inv],
                prec: prec_shift(self.prec, -2 * v),
            });
        }
        if self.is_exact() {
            return Err(Error::IndeterminatePrecision);
        }
        // Reciprocal of the unit part u = 1 + u_1 t + ... to relative length L.
        let l = (self.prec - v) as usize;
        let u: Vec<Elt> = self.c.iter().map(|e| e.mul(&lead_inv)).collect();
        let mut r = vec![self.field.zero(); l];
        r[0] = self.field.one();
        for n in 1..l {
            let mut acc = self.field.zero();
            for k in 1..=n.min(u.len() - 1) {
                acc = acc.add(&u[k].mul(&r[n - k]));
            }
            r[n] = acc.neg();
        }
        let c: Vec<Elt> = r.iter().map(|e| e.mul(&lead_inv)).collect();
        Ok(LaurentSeries::from_coeffs(
            &self.field,
            -v,
            c,
            prec_shift(self.prec, -2 * v),
        ))
    }

    pub fn div(&self, other: &LaurentSeries) -> Result<LaurentSeries> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn pow(&self, e: i64) -> Result<LaurentSeries> {
        if e < 0 {
            return self.inv()?.pow(-e);
        }
        let mut acc = LaurentSeries::constant(self.field.one());
        let mut b = self.clone();
        let mut e = e as u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&b);
            }
            b = b.mul(&b);
            e >>= 1;
        }
        Ok(acc)
    }

    /// Substitute `inner` (valuation ≥ 1) for the variable.
    pub fn compose(&self, inner: &LaurentSeries) -> Result<LaurentSeries> {
        let vi = inner.val().ok_or(Error::IndeterminatePrecision)?;
        if vi < 1 {
            return Err(Error::Internal(
                "composition requires positive inner valuation".into(),
            ));
        }
        // Unknown outer tail t^prec contributes from T^{prec·vi}.
        let out_prec = if self.prec >= EXACT && inner.prec >= EXACT {
            EXACT
        } else {
            let from_outer = if self.prec >= EXACT {
                EXACT
            } else {
                self.prec.saturating_mul(vi).min(EXACT)
            };
            // inner known mod T^{pi}: inner^k error at pi + (k-1)·vi, worst k = 1.
            from_outer.min(inner.prec)
        };
        let mut acc = LaurentSeries::zero_to_prec(&self.field, out_prec);
        // Horner over stored coefficients from the top, then shift by v0.
        for e in self.c.iter().rev() {
            acc = acc.mul(inner).add(&LaurentSeries::constant(e.clone()));
        }
        let tail = inner.pow(self.v0)?;
        Ok(acc.mul(&tail).truncate(out_prec))
    }

    /// Map coefficients into an extension field along the embedding chain.
    pub fn lift_to(&self, big: &Arc<FieldDesc>) -> Result<LaurentSeries> {
        let c: Result<Vec<Elt>> = self.c.iter().map(|e| big.lift(e)).collect();
        Ok(LaurentSeries {
            field: big.clone(),
            v0: self.v0,
            c: c?,
            prec: self.prec,
        })
    }
}

/// Evaluate a polynomial in Y with series coefficients at a series point.
pub fn horner(coeffs: &[LaurentSeries], y: &LaurentSeries) -> LaurentSeries {
    let field = y.field().clone();
    let mut acc = LaurentSeries::zero_exact(&field);
    for c in coeffs.iter().rev() {
        acc = acc.mul(y).add(c);
    }
    acc
}

/// Solve relation(Y) = 0 for a series Y(t) with Y(0) = seed, by Newton
/// iteration.  Requires a simple residue root: relation(seed) must vanish at
/// t = 0 while the Y-derivative of the relation is a unit there.
pub fn hensel_root(
    relation: &[LaurentSeries],
    seed: &Elt,
    prec: i64,
) -> Result<LaurentSeries> {
    let field = seed.field().clone();
    let rel: Vec<LaurentSeries> = relation.iter().map(|s| s.truncate(prec)).collect();
    let deriv: Vec<LaurentSeries> = rel
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, s)| s.scale(&field.from_int(i as i64)))
        .collect();
    let mut y = LaurentSeries::constant(seed.clone()).truncate(prec);
    let f0 = horner(&rel, &y);
    if f0.val_lower_bound() < 1 {
        return Err(Error::NoResidueRoot(format!(
            "relation does not vanish at the seed {seed}"
        )));
    }
    let d0 = horner(&deriv, &y);
    if d0.val() != Some(0) {
        return Err(Error::NonSimpleRoot(format!(
            "derivative at seed {seed} is not a unit"
        )));
    }
    for _ in 0..128 {
        let f = horner(&rel, &y);
        if f.is_zero_to_prec() && f.prec() >= prec {
            let check = horner(&rel, &y);
            debug_assert!(check.is_zero_to_prec());
            return Ok(y);
        }
        let d = horner(&deriv, &y);
        let delta = f.div(&d)?;
        if delta.is_zero_to_prec() {
            // No visible correction left but the residual has not reached
            // target precision: the inputs cannot support it.
            return Err(Error::InsufficientPrecision(prec));
        }
        y = y.sub(&delta).truncate(prec);
    }
    Err(Error::Internal("Newton iteration did not converge".into()))
}

// ---------------------------------------------------------------------------
// Artin–Schreier local reduction
// ---------------------------------------------------------------------------

/// Local type of z^p - z = f at a place: a pole of reduced order m (prime to
/// p), or a regular point with reduced value a.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LocalASType {
    Ramified { m: u64 },
    Unramified { value: Elt },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SplitKind {
    TotallyRamified,
    Split,
    Inert,
}

/// Reduce a local expansion by subtracting ℘(u·t^{-m/p}) parts until the pole
/// order is prime to p or the series is regular.  Returns the local type and
/// the accumulated witness w with f - (w^p - w) equal to the reduced series.
pub fn as_reduce(f: &LaurentSeries) -> Result<(LocalASType, LaurentSeries)> {
    let field = f.field().clone();
    let p = field.p() as i64;
    let mut cur = f.clone();
    let mut witness = LaurentSeries::zero_exact(&field);
    let initial_m = -cur.val_lower_bound();
    loop {
        match cur.val() {
            None => {
                // Zero to precision: regular with value 0 provided we can
                // certify the constant term.
                if cur.prec() > 0 {
                    return Ok((
                        LocalASType::Unramified {
                            value: field.zero(),
                        },
                        witness,
                    ));
                }
                return Err(Error::InsufficientPrecision(cur.prec()));
            }
            Some(v) if v >= 0 => {
                if cur.prec() <= 0 {
                    return Err(Error::InsufficientPrecision(cur.prec()));
                }
                let value = cur.coeff(0);
                return Ok((LocalASType::Unramified { value }, witness));
            }
            Some(v) => {
                let m = -v;
                if m % p != 0 {
                    assert!(m <= initial_m.max(m), "pole order grew during reduction");
                    return Ok((LocalASType::Ramified { m: m as u64 }, witness));
                }
                let u = cur.leading_coeff().unwrap().pth_root();
                let sub = LaurentSeries::monomial(u, -m / p);
                // ℘(sub) = sub^p - sub cancels the leading u^p t^{-m} term.
                let wp = sub.pow(p)?.sub(&sub);
                cur = cur.sub(&wp);
                witness = witness.add(&sub);
                debug_assert!(cur.val_lower_bound() > v, "reduction must make progress");
            }
        }
    }
}

/// The splitting behaviour of the degree-p cover above a place with the given
/// local type: a reduced pole ramifies totally; a regular point splits into p
/// places exactly when the absolute trace of the reduced value vanishes.
pub fn local_splitting(ty: &LocalASType) -> SplitKind {
    match ty {
        LocalASType::Ramified { .. } => SplitKind::TotallyRamified,
        LocalASType::Unramified { value } => {
            if value.trace_to_prime() == 0 {
                SplitKind::Split
            } else {
                SplitKind::Inert
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f2() -> Arc<FieldDesc> {
        FieldDesc::prime(2).unwrap()
    }

    fn f3() -> Arc<FieldDesc> {
        FieldDesc::prime(3).unwrap()
    }

    fn series(field: &Arc<FieldDesc>, v0: i64, ints: &[i64], prec: i64) -> LaurentSeries {
        let c = ints.iter().map(|&n| field.from_int(n)).collect();
        LaurentSeries::from_coeffs(field, v0, c, prec)
    }

    #[test]
    fn product_with_pole() {
        let f = f2();
        // (t^-1 + 1) * t = 1 + t
        let a = series(&f, -1, &[1, 1], EXACT);
        let t = LaurentSeries::uniformizer(&f);
        let prod = a.mul(&t);
        assert_eq!(prod, series(&f, 0, &[1, 1], EXACT));
    }

    #[test]
    fn geometric_series_division() {
        let f = f3();
        let one = LaurentSeries::constant(f.one()).truncate(6);
        let denom = series(&f, 0, &[1, -1], 6); // 1 - t
        let q = one.div(&denom).unwrap();
        assert_eq!(q.prec(), 6);
        for k in 0..6 {
            assert_eq!(q.coeff(k), f.one(), "coefficient of t^{k}");
        }
    }

    #[test]
    fn cancellation_strips_leading_zeros() {
        let f = f3();
        let a = series(&f, -2, &[1], EXACT);
        let b = series(&f, -2, &[-1, 0, 0, 1], EXACT); // -t^-2 + t
        let s = a.add(&b);
        assert_eq!(s.val(), Some(1));
        assert_eq!(s, series(&f, 1, &[1], EXACT));
    }

    #[test]
    fn precision_propagation() {
        let f = f2();
        let a = series(&f, -1, &[1], 3); // t^-1 + O(t^3)
        let b = series(&f, 2, &[1], 5); // t^2 + O(t^5)
        let prod = a.mul(&b);
        // min(3 + 2, 5 + (-1)) = 4
        assert_eq!(prod.prec(), 4);
        assert_eq!(prod.val(), Some(1));
        let inv = a.inv().unwrap();
        assert_eq!(inv.prec(), 3 - 2 * (-1));
        assert_eq!(inv.val(), Some(1));
    }

    #[test]
    fn inverse_of_inexact_zero_fails() {
        let f = f2();
        let z = LaurentSeries::zero_to_prec(&f, 5);
        assert!(matches!(z.inv(), Err(Error::ZeroDivide)));
        // Exact non-monomial inversion needs a finite horizon.
        let s = series(&f, 0, &[1, 1], EXACT);
        assert!(matches!(s.inv(), Err(Error::IndeterminatePrecision)));
        assert!(s.truncate(8).inv().is_ok());
    }

    #[test]
    fn hensel_on_elliptic_branch() {
        // Y^2 + Y = x^3 + x with x = t, branch through (0,0) over F_2.
        let f = f2();
        let rhs = series(&f, 1, &[1, 0, 1], EXACT); // t + t^3
        let rel = vec![
            rhs.neg().truncate(8),
            LaurentSeries::constant(f.one()).truncate(8),
            LaurentSeries::constant(f.one()).truncate(8),
        ];
        let y = hensel_root(&rel, &f.zero(), 8).unwrap();
        assert_eq!(y.val(), Some(1));
        // x + y has valuation 2 at this point.
        let x = LaurentSeries::uniformizer(&f).truncate(8);
        assert_eq!(x.add(&y).val(), Some(2));
        // Substituted back, the relation vanishes.
        assert!(horner(&rel, &y).is_zero_to_prec());
    }

    #[test]
    fn hensel_rejects_multiple_root() {
        // Y^2 - t has a non-simple residue root at 0 over F_3.
        let f = f3();
        let rel = vec![
            series(&f, 1, &[-1], 8),
            LaurentSeries::zero_to_prec(&f, 8),
            LaurentSeries::constant(f.one()).truncate(8),
        ];
        assert!(matches!(
            hensel_root(&rel, &f.zero(), 8),
            Err(Error::NonSimpleRoot(_))
        ));
    }

    #[test]
    fn hensel_constant_relation() {
        let f = f3();
        let c = f.from_int(2);
        // Y - 2 = 0 with seed 2.
        let rel = vec![
            LaurentSeries::constant(c.neg()).truncate(4),
            LaurentSeries::constant(f.one()).truncate(4),
        ];
        let y = hensel_root(&rel, &c, 4).unwrap();
        assert_eq!(y.coeff(0), c);
        assert!(y.coeff(1).is_zero());
    }

    #[test]
    fn reduce_already_reduced_pole() {
        let f = f2();
        let s = series(&f, -3, &[1, 0, 0, 1], EXACT);
        let (ty, w) = as_reduce(&s).unwrap();
        assert_eq!(ty, LocalASType::Ramified { m: 3 });
        assert!(w.is_zero_to_prec());
    }

    #[test]
    fn reduce_even_pole_one_step() {
        let f = f2();
        // t^-2 exactly: subtract ℘(t^-1) = t^-2 + t^-1, leaving t^-1.
        let s = series(&f, -2, &[1], EXACT);
        let (ty, w) = as_reduce(&s).unwrap();
        assert_eq!(ty, LocalASType::Ramified { m: 1 });
        assert_eq!(w, series(&f, -1, &[1], EXACT));
    }

    #[test]
    fn reduce_to_exact_zero() {
        let f = f2();
        // t^-2 + t^-1 = ℘(t^-1): unramified with value 0.
        let s = series(&f, -2, &[1, 1], EXACT);
        let (ty, w) = as_reduce(&s).unwrap();
        assert_eq!(
            ty,
            LocalASType::Unramified {
                value: f.zero()
            }
        );
        assert_eq!(w, series(&f, -1, &[1], EXACT));
    }

    #[test]
    fn reduce_witness_identity() {
        let f = f3();
        // A pole of order 9 over F_3 reduces twice: 9 -> 3 -> 1.
        let s = series(&f, -9, &[1, 0, 2, 1, 0, 0, 1, 2], 4);
        let (ty, w) = as_reduce(&s).unwrap();
        let LocalASType::Ramified { m } = &ty else {
            panic!("expected a pole");
        };
        assert!(*m % 3 != 0);
        // f - ℘(w) must equal the reduced series: re-reduce and compare types.
        let pw = w.pow(3).unwrap().sub(&w);
        let reduced = s.sub(&pw);
        assert_eq!(-reduced.val().unwrap() as u64, *m);
        let (ty2, w2) = as_reduce(&reduced).unwrap();
        assert_eq!(ty, ty2);
        assert!(w2.is_zero_to_prec());
    }

    #[test]
    fn reduce_insufficient_precision() {
        let f = f2();
        // t^-2 + t^-1 but only known mod t^0: the cancellation leaves
        // nothing certifiable.
        let s = series(&f, -2, &[1, 1], 0);
        assert!(matches!(
            as_reduce(&s),
            Err(Error::InsufficientPrecision(_))
        ));
    }

    #[test]
    fn splitting_classification() {
        let f3 = f3();
        assert_eq!(
            local_splitting(&LocalASType::Unramified { value: f3.zero() }),
            SplitKind::Split
        );
        assert_eq!(
            local_splitting(&LocalASType::Unramified {
                value: f3.from_int(2)
            }),
            SplitKind::Inert
        );
        assert_eq!(
            local_splitting(&LocalASType::Ramified { m: 3 }),
            SplitKind::TotallyRamified
        );
    }

    #[test]
    fn scalar_equivariance_of_reduction() {
        let f = f3();
        let s = series(&f, -6, &[2, 1, 0, 1, 1, 2, 1], 3);
        let (ty1, _) = as_reduce(&s).unwrap();
        for c in 2..3u8 {
            let cs = s.scale(&f.from_int(c as i64));
            let (ty2, _) = as_reduce(&cs).unwrap();
            match (&ty1, &ty2) {
                (LocalASType::Ramified { m: m1 }, LocalASType::Ramified { m: m2 }) => {
                    assert_eq!(m1, m2)
                }
                (LocalASType::Unramified { value: a1 }, LocalASType::Unramified { value: a2 }) => {
                    assert_eq!(a1.scale(c), *a2);
                    assert_eq!(
                        a1.trace_to_prime() == 0,
                        a2.trace_to_prime() == 0
                    );
                }
                _ => panic!("scalar scaling changed the local type"),
            }
        }
    }

    #[test]
    fn wp_image_is_unramified_with_zero_trace() {
        // ℘(g) for regular g reduces to an unramified value of zero trace.
        let f = FieldDesc::new(2, 2, None).unwrap();
        let mut state = 0x1234_5678_u64;
        let mut rng = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        for _ in 0..20 {
            let c: Vec<Elt> = (0..6).map(|_| f.elt_from_index(rng() as u128 % 4)).collect();
            let g = LaurentSeries::from_coeffs(&f, 0, c, 10);
            if g.is_zero_to_prec() {
                continue;
            }
            let pg = g.pow(2).unwrap().sub(&g);
            let (ty, _) = as_reduce(&pg).unwrap();
            let LocalASType::Unramified { value } = ty else {
                panic!("℘ of a regular series must be regular");
            };
            assert_eq!(value.trace_to_prime(), 0);
        }
    }
}
