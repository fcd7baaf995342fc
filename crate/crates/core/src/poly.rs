//! Dense univariate polynomials and rational functions over a finite field.
//!
//! Coefficients are stored little-endian with no trailing zeros (the zero
//! polynomial has an empty vector).  Factorization is the classical
//! squarefree / distinct-degree / equal-degree chain, with all splitting
//! choices drawn from the deterministic field enumeration so repeated runs
//! factor identically.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::gf::{find_root_split, Elt, FieldDesc};

#[derive(Clone, PartialEq, Eq)]
pub struct Poly {
    field: Arc<FieldDesc>,
    c: Vec<Elt>,
}

impl std::fmt::Debug for Poly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.render("x"))
    }
}

impl Poly {
    pub fn zero(field: &Arc<FieldDesc>) -> Poly {
        Poly {
            field: field.clone(),
            c: Vec::new(),
        }
    }

    pub fn one(field: &Arc<FieldDesc>) -> Poly {
        Poly::constant(field.one())
    }

    pub fn x(field: &Arc<FieldDesc>) -> Poly {
        Poly {
            field: field.clone(),
            c: vec![field.zero(), field.one()],
        }
    }

    pub fn constant(e: Elt) -> Poly {
        let field = e.field().clone();
        let c = if e.is_zero() { Vec::new() } else { vec![e] };
        Poly { field, c }
    }

    pub fn from_coeffs(field: &Arc<FieldDesc>, coeffs: Vec<Elt>) -> Poly {
        let mut p = Poly {
            field: field.clone(),
            c: coeffs,
        };
        p.normalize();
        p
    }

    /// Coefficients given as small integers (little-endian).
    pub fn from_ints(field: &Arc<FieldDesc>, coeffs: &[i64]) -> Poly {
        let c = coeffs.iter().map(|&n| field.from_int(n)).collect();
        Poly::from_coeffs(field, c)
    }

    /// c * x^k.
    pub fn monomial(coef: Elt, k: usize) -> Poly {
        let field = coef.field().clone();
        if coef.is_zero() {
            return Poly::zero(&field);
        }
        let mut c = vec![field.zero(); k + 1];
        c[k] = coef;
        Poly { field, c }
    }

    fn normalize(&mut self) {
        while self.c.last().map_or(false, |e| e.is_zero()) {
            self.c.pop();
        }
    }

    pub fn field(&self) -> &Arc<FieldDesc> {
        &self.field
    }

    pub fn coeffs(&self) -> &[Elt] {
        &self.c
    }

    pub fn coeff(&self, k: usize) -> Elt {
        self.c.get(k).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn deg(&self) -> Option<usize> {
        if self.c.is_empty() {
            None
        } else {
            Some(self.c.len() - 1)
        }
    }

    /// Degree with deg 0 for constants and a panic on the zero polynomial.
    pub fn degree(&self) -> usize {
        self.deg().expect("degree of the zero polynomial")
    }

    pub fn lead(&self) -> Elt {
        self.c.last().cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn is_monic(&self) -> bool {
        self.c.last().map_or(false, |e| *e == self.field.one())
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.c.len().max(other.c.len());
        let mut c = Vec::with_capacity(n);
        for i in 0..n {
            let x = match (self.c.get(i), other.c.get(i)) {
                (Some(a), Some(b)) => a.add(b),
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => unreachable!(),
            };
            c.push(x);
        }
        Poly::from_coeffs(&self.field, c)
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Poly {
        Poly {
            field: self.field.clone(),
            c: self.c.iter().map(|e| e.neg()).collect(),
        }
    }

    pub fn scale(&self, k: &Elt) -> Poly {
        if k.is_zero() {
            return Poly::zero(&self.field);
        }
        Poly {
            field: self.field.clone(),
            c: self.c.iter().map(|e| e.mul(k)).collect(),
        }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero(&self.field);
        }
        let mut c = vec![self.field.zero(); self.c.len() + other.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.c.iter().enumerate() {
                c[i + j] = c[i + j].add(&a.mul(b));
            }
        }
        Poly::from_coeffs(&self.field, c)
    }

    pub fn shift(&self, k: usize) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let mut c = vec![self.field.zero(); k];
        c.extend(self.c.iter().cloned());
        Poly {
            field: self.field.clone(),
            c,
        }
    }

    pub fn pow(&self, mut e: u64) -> Poly {
        let mut acc = Poly::one(&self.field);
        let mut b = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&b);
            }
            b = b.mul(&b);
            e >>= 1;
        }
        acc
    }

    pub fn divrem(&self, den: &Poly) -> Result<(Poly, Poly)> {
        if den.is_zero() {
            return Err(Error::ZeroDivide);
        }
        if self.c.len() < den.c.len() {
            return Ok((Poly::zero(&self.field), self.clone()));
        }
        let lead_inv = den.lead().inv()?;
        let mut r = self.c.clone();
        let mut q = vec![self.field.zero(); r.len() - den.c.len() + 1];
        while r.len() >= den.c.len() && !r.is_empty() {
            let coef = r.last().unwrap().mul(&lead_inv);
            let shift = r.len() - den.c.len();
            q[shift] = q[shift].add(&coef);
            for (i, d) in den.c.iter().enumerate() {
                let t = r[i + shift].sub(&coef.mul(d));
                r[i + shift] = t;
            }
            while r.last().map_or(false, |e| e.is_zero()) {
                r.pop();
            }
        }
        Ok((
            Poly::from_coeffs(&self.field, q),
            Poly::from_coeffs(&self.field, r),
        ))
    }

    pub fn rem(&self, den: &Poly) -> Result<Poly> {
        Ok(self.divrem(den)?.1)
    }

    /// Exact division; errs when the remainder is non-zero.
    pub fn div_exact(&self, den: &Poly) -> Result<Poly> {
        let (q, r) = self.divrem(den)?;
        if !r.is_zero() {
            return Err(Error::Internal(format!(
                "inexact polynomial division: {:?} by {:?}",
                self, den
            )));
        }
        Ok(q)
    }

    pub fn make_monic(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(&self.lead().inv().unwrap())
    }

    /// Monic gcd.
    pub fn gcd(&self, other: &Poly) -> Poly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b).unwrap();
            a = b;
            b = r;
        }
        a.make_monic()
    }

    pub fn derivative(&self) -> Poly {
        if self.c.len() <= 1 {
            return Poly::zero(&self.field);
        }
        let c = self.c[1..]
            .iter()
            .enumerate()
            .map(|(i, e)| e.scale(((i as u64 + 1) % self.field.p() as u64) as u8))
            .collect();
        Poly::from_coeffs(&self.field, c)
    }

    pub fn eval(&self, x: &Elt) -> Elt {
        let mut acc = self.field.zero();
        for c in self.c.iter().rev() {
            acc = acc.mul(x).add(c);
        }
        acc
    }

    /// Substitute another polynomial for the variable.
    pub fn compose(&self, inner: &Poly) -> Poly {
        let mut acc = Poly::zero(&self.field);
        for c in self.c.iter().rev() {
            acc = acc.mul(inner).add(&Poly::constant(c.clone()));
        }
        acc
    }

    fn mulmod(&self, other: &Poly, m: &Poly) -> Poly {
        self.mul(other).rem(m).unwrap()
    }

    /// self^q mod m where q is the field order (used to iterate Frobenius on
    /// the quotient ring without forming astronomically large exponents).
    fn power_q_mod(&self, m: &Poly) -> Poly {
        let mut e = self.field.order();
        let mut acc = Poly::one(&self.field);
        let mut b = self.rem(m).unwrap();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mulmod(&b, m);
            }
            b = b.mulmod(&b, m);
            e >>= 1;
        }
        acc
    }

    /// Irreducibility over the coefficient field.
    pub fn is_irreducible(&self) -> bool {
        let Some(n) = self.deg() else { return false };
        if n == 0 {
            return false;
        }
        if n == 1 {
            return true;
        }
        let x = Poly::x(&self.field);
        // x^{q^n} must reduce to x mod f.
        let mut h = x.rem(self).unwrap();
        for _ in 0..n {
            h = h.power_q_mod(self);
        }
        if h != x.rem(self).unwrap() {
            return false;
        }
        // gcd(x^{q^{n/r}} - x, f) must be constant for every prime r | n.
        for r in prime_divisors(n) {
            let mut h = x.rem(self).unwrap();
            for _ in 0..n / r {
                h = h.power_q_mod(self);
            }
            let g = self.gcd(&h.sub(&x));
            if g.deg() != Some(0) {
                return false;
            }
        }
        true
    }

    /// Full factorization into monic irreducibles with multiplicities,
    /// sorted deterministically.  The leading coefficient is returned first.
    pub fn irreducible_factors(&self) -> Result<(Elt, Vec<(Poly, usize)>)> {
        if self.is_zero() {
            return Err(Error::Invalid("factoring the zero polynomial".into()));
        }
        let lead = self.lead();
        let mut out: Vec<(Poly, usize)> = Vec::new();
        factor_monic(self.make_monic(), 1, &mut out)?;
        out.sort_by(|(a, _), (b, _)| factor_key(a).cmp(&factor_key(b)));
        Ok((lead, out))
    }

    /// All roots in the coefficient field, sorted by enumeration index.
    pub fn roots_in_field(&self) -> Result<Vec<Elt>> {
        if self.is_zero() {
            return Err(Error::Invalid("roots of the zero polynomial".into()));
        }
        if self.deg() == Some(0) {
            return Ok(Vec::new());
        }
        // gcd with x^q - x isolates the distinct rational roots.
        let x = Poly::x(&self.field);
        let xq = x.power_q_mod(self);
        let mut g = self.gcd(&xq.sub(&x));
        let mut roots = Vec::new();
        while g.deg().unwrap_or(0) >= 1 {
            let r = find_root_split(g.coeffs(), &self.field)?;
            let lin = Poly::from_coeffs(&self.field, vec![r.neg(), self.field.one()]);
            g = g.div_exact(&lin)?;
            roots.push(r);
        }
        roots.sort_by_key(|r| self.field.index_of(r));
        Ok(roots)
    }

    pub fn render(&self, sym: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let needs_parens = |e: &Elt| e.coeffs().iter().filter(|&&c| c != 0).count() > 1;
        let mut terms = Vec::new();
        for (k, e) in self.c.iter().enumerate().rev() {
            if e.is_zero() {
                continue;
            }
            let coef = e.render("a");
            let one = coef == "1";
            let wrapped = if needs_parens(e) {
                format!("({coef})")
            } else {
                coef
            };
            let t = match (k, one) {
                (0, _) => wrapped,
                (1, true) => sym.to_string(),
                (1, false) => format!("{wrapped}*{sym}"),
                (k, true) => format!("{sym}^{k}"),
                (k, false) => format!("{wrapped}*{sym}^{k}"),
            };
            terms.push(t);
        }
        terms.join("+")
    }
}

fn prime_divisors(mut n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Deterministic ordering key for factors: degree, then coefficient indices.
fn factor_key(f: &Poly) -> (usize, Vec<u128>) {
    (
        f.deg().unwrap_or(0),
        f.coeffs().iter().map(|e| f.field().index_of(e)).collect(),
    )
}

/// Replace f(x) = g(x^p) by g with coefficients' p-th roots extracted.
fn pth_root_poly(f: &Poly) -> Poly {
    let p = f.field().p() as usize;
    let mut c = Vec::new();
    for (k, e) in f.coeffs().iter().enumerate() {
        if k % p == 0 {
            c.push(e.pth_root());
        } else {
            debug_assert!(e.is_zero(), "derivative-zero polynomial is not in x^p");
        }
    }
    Poly::from_coeffs(f.field(), c)
}

fn factor_monic(f: Poly, mult: usize, out: &mut Vec<(Poly, usize)>) -> Result<()> {
    if f.deg().unwrap_or(0) == 0 {
        return Ok(());
    }
    let fd = f.derivative();
    if fd.is_zero() {
        // f = g(x^p): recurse with multiplicities scaled by p.
        return factor_monic(pth_root_poly(&f), mult * f.field().p() as usize, out);
    }
    let sq = f.div_exact(&f.gcd(&fd))?;
    let mut rem = f;
    for irr in distinct_degree_split(&sq)? {
        let mut e = 0usize;
        loop {
            let (q, r) = rem.divrem(&irr)?;
            if !r.is_zero() {
                break;
            }
            rem = q;
            e += 1;
        }
        debug_assert!(e >= 1);
        merge_factor(out, irr, mult * e);
    }
    // Whatever remains carries multiplicities divisible by p.
    factor_monic(rem, mult, out)
}

fn merge_factor(out: &mut Vec<(Poly, usize)>, f: Poly, e: usize) {
    for (g, m) in out.iter_mut() {
        if *g == f {
            *m += e;
            return;
        }
    }
    out.push((f, e));
}

/// Factor a squarefree monic polynomial into irreducibles: distinct-degree
/// pass followed by equal-degree splitting.
fn distinct_degree_split(sq: &Poly) -> Result<Vec<Poly>> {
    let field = sq.field().clone();
    let x = Poly::x(&field);
    let mut out = Vec::new();
    let mut f = sq.clone();
    let mut h = x.rem(&f)?;
    let mut d = 0usize;
    while f.deg().unwrap_or(0) > 0 {
        d += 1;
        if 2 * d > f.degree() {
            // What is left is a single irreducible.
            out.push(f.make_monic());
            break;
        }
        h = h.power_q_mod(&f);
        let g = f.gcd(&h.sub(&x));
        if g.deg().unwrap_or(0) > 0 {
            equal_degree_split(&g, d, &mut out)?;
            f = f.div_exact(&g)?;
            h = h.rem(&f)?;
        }
    }
    Ok(out)
}

/// Split a product of distinct irreducibles all of degree d.  Splitting
/// polynomials are enumerated deterministically by index.
fn equal_degree_split(f: &Poly, d: usize, out: &mut Vec<Poly>) -> Result<()> {
    let field = f.field().clone();
    if f.degree() == d {
        out.push(f.make_monic());
        return Ok(());
    }
    let n = f.degree();
    let p = field.p();
    let mut tries = 0u32;
    let mut idx: u128 = 1;
    loop {
        tries += 1;
        if tries > 2000 {
            return Err(Error::Internal(
                "equal-degree splitting did not converge".into(),
            ));
        }
        let r = poly_from_index(&field, idx, n);
        idx += 1;
        if r.deg().unwrap_or(0) == 0 {
            continue;
        }
        let t = if p == 2 {
            // Absolute trace map over F_2 of the quotient ring: sum of
            // 2^i-th powers for i < s*d.
            let s = field.degree();
            let mut acc = r.rem(f)?;
            let mut sum = acc.clone();
            for _ in 1..s * d {
                acc = acc.mulmod(&acc, f);
                sum = sum.add(&acc).rem(f)?;
            }
            sum
        } else {
            // Norm to the degree-d level, then the quadratic character:
            // r^{(q^d-1)/2} = N(r)^{(q-1)/2} with N(r) = prod r^{q^i}.
            let mut norm = r.rem(f)?;
            let mut frob = r.rem(f)?;
            for _ in 1..d {
                frob = frob.power_q_mod(f);
                norm = norm.mulmod(&frob, f);
            }
            let mut e = (field.order() - 1) / 2;
            let mut acc = Poly::one(&field);
            let mut b = norm;
            while e > 0 {
                if e & 1 == 1 {
                    acc = acc.mulmod(&b, f);
                }
                b = b.mulmod(&b, f);
                e >>= 1;
            }
            acc.sub(&Poly::one(&field))
        };
        let g = f.gcd(&t);
        let dg = g.deg().unwrap_or(0);
        if dg > 0 && dg < n {
            equal_degree_split(&g, d, out)?;
            equal_degree_split(&f.div_exact(&g)?, d, out)?;
            return Ok(());
        }
    }
}

/// The idx-th polynomial of degree < n in the base-q digit order.
fn poly_from_index(field: &Arc<FieldDesc>, mut idx: u128, n: usize) -> Poly {
    let q = field.order();
    let mut c = Vec::new();
    for _ in 0..n {
        if idx == 0 {
            break;
        }
        c.push(field.elt_from_index(idx % q));
        idx /= q;
    }
    Poly::from_coeffs(field, c)
}

// ---------------------------------------------------------------------------
// Rational functions in the base variable
// ---------------------------------------------------------------------------

/// A reduced fraction num/den with monic denominator coprime to the numerator.
#[derive(Clone, PartialEq, Eq)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

impl std::fmt::Debug for RatFunc {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.den.deg() == Some(0) {
            write!(f, "{}", self.num.render("x"))
        } else {
            write!(f, "({})/({})", self.num.render("x"), self.den.render("x"))
        }
    }
}

impl RatFunc {
    pub fn new(num: Poly, den: Poly) -> Result<RatFunc> {
        if den.is_zero() {
            return Err(Error::ZeroDivide);
        }
        let g = num.gcd(&den);
        let mut num = num.div_exact(&g)?;
        let mut den = den.div_exact(&g)?;
        let lead_inv = den.lead().inv()?;
        num = num.scale(&lead_inv);
        den = den.scale(&lead_inv);
        Ok(RatFunc { num, den })
    }

    pub fn from_poly(p: Poly) -> RatFunc {
        let den = Poly::one(p.field());
        RatFunc { num: p, den }
    }

    pub fn zero(field: &Arc<FieldDesc>) -> RatFunc {
        RatFunc::from_poly(Poly::zero(field))
    }

    pub fn field(&self) -> &Arc<FieldDesc> {
        self.num.field()
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_poly(&self) -> bool {
        self.den.deg() == Some(0)
    }

    pub fn add(&self, other: &RatFunc) -> RatFunc {
        RatFunc::new(
            self.num.mul(&other.den).add(&other.num.mul(&self.den)),
            self.den.mul(&other.den),
        )
        .expect("denominators are non-zero")
    }

    pub fn sub(&self, other: &RatFunc) -> RatFunc {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> RatFunc {
        RatFunc {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn mul(&self, other: &RatFunc) -> RatFunc {
        RatFunc::new(self.num.mul(&other.num), self.den.mul(&other.den))
            .expect("denominators are non-zero")
    }

    pub fn div(&self, other: &RatFunc) -> Result<RatFunc> {
        if other.is_zero() {
            return Err(Error::ZeroDivide);
        }
        RatFunc::new(self.num.mul(&other.den), self.den.mul(&other.num))
    }

    pub fn pow(&self, e: u64) -> RatFunc {
        RatFunc {
            num: self.num.pow(e),
            den: self.den.pow(e),
        }
    }

    /// Order of vanishing at x = x0 (negative at poles).
    pub fn order_at(&self, x0: &Elt) -> i64 {
        if self.is_zero() {
            panic!("order of the zero function");
        }
        let field = self.field().clone();
        let lin = Poly::from_coeffs(&field, vec![x0.neg(), field.one()]);
        let count = |mut f: Poly| -> i64 {
            let mut k = 0;
            loop {
                let (q, r) = f.divrem(&lin).unwrap();
                if !r.is_zero() {
                    return k;
                }
                f = q;
                k += 1;
            }
        };
        count(self.num.clone()) - count(self.den.clone())
    }

    /// Order of vanishing at x = infinity: deg(den) - deg(num).
    pub fn order_at_infinity(&self) -> i64 {
        if self.is_zero() {
            panic!("order of the zero function");
        }
        self.den.degree() as i64 - self.num.degree() as i64
    }

    pub fn eval(&self, x0: &Elt) -> Result<Elt> {
        let d = self.den.eval(x0);
        if d.is_zero() {
            return Err(Error::PoleAtPoint(format!("pole at x = {x0}")));
        }
        self.num.eval(x0).div(&d)
    }

    pub fn render(&self, sym: &str) -> String {
        if self.den.deg() == Some(0) {
            self.num.render(sym)
        } else {
            format!("({})/({})", self.num.render(sym), self.den.render(sym))
        }
    }
}
