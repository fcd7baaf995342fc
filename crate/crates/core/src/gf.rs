//! Finite fields F_{p^s} with explicit subfield towers.
//!
//! Elements are coefficient vectors over F_p in the power basis of a root of
//! a fixed monic irreducible modulus.  Towers F_p ⊆ F_q ⊆ F_{q^d} are built
//! as extensions of the prime field of the composite degree, together with an
//! embedding of the smaller field found by locating a root of its modulus in
//! the bigger field.  All choices (moduli, roots, enumeration order) are
//! deterministic so that every run of the pipeline produces identical output.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Hard cap on field enumeration: scanning more than 2^20 elements is a bug
/// or a hopeless computation at this crate's scale.
pub const ENUM_GUARD: u128 = 1 << 20;

// ---------------------------------------------------------------------------
// Raw F_p[x] helpers on little-endian coefficient vectors (entries < p).
// These exist so that field construction does not depend on the generic
// polynomial module, which itself depends on fields.
// ---------------------------------------------------------------------------

mod zp {
    pub fn strip(v: &mut Vec<u8>) {
        while v.last() == Some(&0) {
            v.pop();
        }
    }

    pub fn deg(v: &[u8]) -> Option<usize> {
        if v.is_empty() {
            None
        } else {
            Some(v.len() - 1)
        }
    }

    pub fn sub(a: &[u8], b: &[u8], p: u8) -> Vec<u8> {
        let mut out = vec![0u8; a.len().max(b.len())];
        for (i, o) in out.iter_mut().enumerate() {
            let x = *a.get(i).unwrap_or(&0) as i16 - *b.get(i).unwrap_or(&0) as i16;
            *o = x.rem_euclid(p as i16) as u8;
        }
        strip(&mut out);
        out
    }

    pub fn mul(a: &[u8], b: &[u8], p: u8) -> Vec<u8> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u32; a.len() + b.len() - 1];
        for (i, &ai) in a.iter().enumerate() {
            if ai == 0 {
                continue;
            }
            for (j, &bj) in b.iter().enumerate() {
                out[i + j] += ai as u32 * bj as u32;
            }
        }
        let mut v: Vec<u8> = out.into_iter().map(|x| (x % p as u32) as u8).collect();
        strip(&mut v);
        v
    }

    fn inv_mod_p(a: u8, p: u8) -> u8 {
        // p is tiny; a linear scan is clearest.
        for x in 1..p {
            if (a as u16 * x as u16) % p as u16 == 1 {
                return x;
            }
        }
        panic!("no inverse for {a} mod {p}");
    }

    /// Remainder of `a` modulo a monic `m`.
    pub fn rem(a: &[u8], m: &[u8], p: u8) -> Vec<u8> {
        debug_assert_eq!(*m.last().unwrap(), 1, "modulus must be monic");
        let dm = m.len() - 1;
        let mut r: Vec<u8> = a.to_vec();
        strip(&mut r);
        while r.len() > dm {
            let lead = *r.last().unwrap();
            let shift = r.len() - 1 - dm;
            if lead != 0 {
                for (i, &mi) in m.iter().enumerate() {
                    let idx = i + shift;
                    let x = r[idx] as i16 - lead as i16 * mi as i16;
                    r[idx] = x.rem_euclid(p as i16) as u8;
                }
            }
            strip(&mut r);
            if r.len() <= dm {
                break;
            }
        }
        r
    }

    pub fn mulmod(a: &[u8], b: &[u8], m: &[u8], p: u8) -> Vec<u8> {
        rem(&mul(a, b, p), m, p)
    }

    pub fn powmod(base: &[u8], mut e: u128, m: &[u8], p: u8) -> Vec<u8> {
        let mut acc = vec![1u8];
        let mut b = rem(base, m, p);
        while e > 0 {
            if e & 1 == 1 {
                acc = mulmod(&acc, &b, m, p);
            }
            b = mulmod(&b, &b, m, p);
            e >>= 1;
        }
        acc
    }

    /// Monic gcd.
    pub fn gcd(a: &[u8], b: &[u8], p: u8) -> Vec<u8> {
        let (mut x, mut y) = (a.to_vec(), b.to_vec());
        strip(&mut x);
        strip(&mut y);
        while !y.is_empty() {
            // Reduce x mod y after scaling y monic.
            let lead_inv = inv_mod_p(*y.last().unwrap(), p);
            let ym: Vec<u8> = y
                .iter()
                .map(|&c| ((c as u16 * lead_inv as u16) % p as u16) as u8)
                .collect();
            let r = rem(&x, &ym, p);
            x = y;
            y = r;
        }
        if let Some(&l) = x.last() {
            let li = inv_mod_p(l, p);
            for c in &mut x {
                *c = ((*c as u16 * li as u16) % p as u16) as u8;
            }
        }
        x
    }

    /// Extended Euclid: returns g = gcd(a, m) together with u with u*a ≡ g (mod m).
    pub fn ext_gcd(a: &[u8], m: &[u8], p: u8) -> (Vec<u8>, Vec<u8>) {
        let (mut r0, mut r1) = (m.to_vec(), a.to_vec());
        let (mut s0, mut s1) = (Vec::new(), vec![1u8]);
        strip(&mut r0);
        strip(&mut r1);
        while !r1.is_empty() {
            // r0 = q*r1 + r; compute q by long division.
            let lead_inv = inv_mod_p(*r1.last().unwrap(), p);
            let mut r = r0.clone();
            let mut q: Vec<u8> = vec![0; r.len().saturating_sub(r1.len()) + 1];
            while deg(&r) >= deg(&r1) && !r.is_empty() {
                let shift = r.len() - r1.len();
                let coef = ((*r.last().unwrap() as u16 * lead_inv as u16) % p as u16) as u8;
                q[shift] = (q[shift] + coef) % p;
                for (i, &ci) in r1.iter().enumerate() {
                    let x = r[i + shift] as i16 - coef as i16 * ci as i16;
                    r[i + shift] = x.rem_euclid(p as i16) as u8;
                }
                strip(&mut r);
            }
            strip(&mut q);
            let s_new = sub(&s0, &mul(&q, &s1, p), p);
            r0 = std::mem::take(&mut r1);
            r1 = r;
            s0 = std::mem::take(&mut s1);
            s1 = s_new;
        }
        (r0, s0)
    }
}

// ---------------------------------------------------------------------------
// Field descriptors
// ---------------------------------------------------------------------------

/// Embedding of a smaller field into this one: the image of the smaller
/// field's generator, expressed in this field.
#[derive(Clone)]
pub struct SubfieldEmbedding {
    pub base: Arc<FieldDesc>,
    gen_image: Vec<u8>,
}

/// A finite field F_{p^s} = F_p[a]/(modulus).
pub struct FieldDesc {
    p: u8,
    s: usize,
    modulus: Vec<u8>, // monic, length s+1, little-endian
    sub: Option<SubfieldEmbedding>,
}

impl PartialEq for FieldDesc {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.s == other.s && self.modulus == other.modulus
    }
}
impl Eq for FieldDesc {}

impl fmt::Debug for FieldDesc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{})", self.p, self.s)
    }
}

fn is_prime_u8(p: u8) -> bool {
    if p < 2 {
        return false;
    }
    for d in 2..p {
        if d as u16 * d as u16 > p as u16 {
            break;
        }
        if p % d == 0 {
            return false;
        }
    }
    true
}

impl FieldDesc {
    /// The prime field F_p, with modulus X so that coefficient vectors reduce
    /// to single digits.
    pub fn prime(p: u8) -> Result<Arc<FieldDesc>> {
        FieldDesc::new(p, 1, None)
    }

    /// F_{p^s} with the given modulus, or the default one for (p, s).
    pub fn new(p: u8, s: usize, modulus: Option<Vec<u8>>) -> Result<Arc<FieldDesc>> {
        if !is_prime_u8(p) {
            return Err(Error::Invalid(format!("characteristic {p} is not prime")));
        }
        if s == 0 || s > 32 {
            return Err(Error::Invalid(format!("extension degree {s} out of range")));
        }
        let modulus = match modulus {
            Some(mut m) => {
                for c in &m {
                    if *c >= p {
                        return Err(Error::Invalid(format!(
                            "modulus coefficient {c} not reduced mod {p}"
                        )));
                    }
                }
                zp::strip(&mut m);
                if m.len() != s + 1 {
                    return Err(Error::Invalid(format!(
                        "modulus degree {} does not match field degree {s}",
                        m.len().max(1) - 1
                    )));
                }
                if *m.last().unwrap() != 1 {
                    return Err(Error::Invalid("modulus must be monic".into()));
                }
                m
            }
            None => default_modulus(p, s),
        };
        if !modulus_irreducible(&modulus, p) {
            return Err(Error::NotIrreducible(format!(
                "modulus {modulus:?} over F_{p}"
            )));
        }
        Ok(Arc::new(FieldDesc {
            p,
            s,
            modulus,
            sub: None,
        }))
    }

    /// Build F_{q^rel} over this field `q = p^s`, embedding `self` via a root
    /// of its modulus.  The returned descriptor carries the embedding.
    pub fn extension(self: &Arc<Self>, rel: usize) -> Result<Arc<FieldDesc>> {
        if rel == 0 {
            return Err(Error::Invalid("relative degree 0".into()));
        }
        if rel == 1 {
            return Ok(self.clone());
        }
        let big = FieldDesc::new(self.p, self.s * rel, None)?;
        // Lift the base modulus to the big field (its coefficients are prime).
        let coeffs: Vec<Elt> = self
            .modulus
            .iter()
            .map(|&c| big.from_int(c as i64))
            .collect();
        let root = if self.s == 1 {
            // Base is the prime field: base modulus is X, root 0; the
            // embedding is the canonical inclusion of constants.
            big.zero()
        } else {
            find_root_split(&coeffs, &big)?
        };
        debug_assert!(embedding_is_hom(self, &big, &root));
        let inner = FieldDesc {
            p: big.p,
            s: big.s,
            modulus: big.modulus.clone(),
            sub: Some(SubfieldEmbedding {
                base: self.clone(),
                gen_image: root.c,
            }),
        };
        Ok(Arc::new(inner))
    }

    pub fn p(&self) -> u8 {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.s
    }

    pub fn modulus(&self) -> &[u8] {
        &self.modulus
    }

    pub fn subfield(&self) -> Option<&SubfieldEmbedding> {
        self.sub.as_ref()
    }

    pub fn order(&self) -> u128 {
        (self.p as u128)
            .checked_pow(self.s as u32)
            .expect("field order overflow")
    }

    pub fn zero(self: &Arc<Self>) -> Elt {
        Elt {
            field: self.clone(),
            c: vec![0; self.s],
        }
    }

    pub fn one(self: &Arc<Self>) -> Elt {
        self.from_int(1)
    }

    /// The power-basis generator (a root of the modulus).
    pub fn gen(self: &Arc<Self>) -> Elt {
        let mut c = vec![0; self.s];
        if self.s > 1 {
            c[1] = 1;
        }
        Elt {
            field: self.clone(),
            c,
        }
    }

    pub fn from_int(self: &Arc<Self>, n: i64) -> Elt {
        let mut c = vec![0; self.s];
        c[0] = n.rem_euclid(self.p as i64) as u8;
        Elt {
            field: self.clone(),
            c,
        }
    }

    /// Element from a little-endian coefficient slice (padded / validated).
    pub fn elt(self: &Arc<Self>, coeffs: &[u8]) -> Result<Elt> {
        if coeffs.len() > self.s {
            return Err(Error::Invalid(format!(
                "coefficient vector of length {} in a degree-{} field",
                coeffs.len(),
                self.s
            )));
        }
        let mut c = vec![0; self.s];
        for (i, &x) in coeffs.iter().enumerate() {
            if x >= self.p {
                return Err(Error::Invalid(format!(
                    "coefficient {x} not reduced mod {}",
                    self.p
                )));
            }
            c[i] = x;
        }
        Ok(Elt {
            field: self.clone(),
            c,
        })
    }

    pub fn elt_from_index(self: &Arc<Self>, mut idx: u128) -> Elt {
        let mut c = vec![0; self.s];
        for ci in c.iter_mut() {
            *ci = (idx % self.p as u128) as u8;
            idx /= self.p as u128;
        }
        Elt {
            field: self.clone(),
            c,
        }
    }

    pub fn index_of(&self, e: &Elt) -> u128 {
        let mut idx = 0u128;
        for &c in e.c.iter().rev() {
            idx = idx * self.p as u128 + c as u128;
        }
        idx
    }

    /// Deterministic enumeration of all elements, guarded by [`ENUM_GUARD`].
    pub fn enumerate(self: &Arc<Self>) -> Result<impl Iterator<Item = Elt>> {
        let order = self.order();
        if order > ENUM_GUARD {
            return Err(Error::SizeGuard(order));
        }
        let field = self.clone();
        Ok((0..order).map(move |i| field.elt_from_index(i)))
    }

    /// Smallest enumerated element with non-zero absolute trace; used as the
    /// auxiliary constant adjoined to the complement space.
    pub fn nonzero_trace_constant(self: &Arc<Self>) -> Result<Elt> {
        for e in self.enumerate()? {
            if e.trace_to_prime() != 0 {
                return Ok(e);
            }
        }
        Err(Error::Internal("no element of non-zero trace".into()))
    }

    /// Lift an element of a field lower in the subfield chain into this one.
    pub fn lift(self: &Arc<Self>, e: &Elt) -> Result<Elt> {
        if **self == *e.field {
            return Ok(Elt {
                field: self.clone(),
                c: e.c.clone(),
            });
        }
        let sub = self.sub.as_ref().ok_or(Error::NoSubfield)?;
        let below = sub.base.lift(e)?;
        // below lives in sub.base; map through gen_image.
        let gen_image = Elt {
            field: self.clone(),
            c: sub.gen_image.clone(),
        };
        let mut acc = self.zero();
        let mut pow = self.one();
        for &cu in &below.c {
            if cu != 0 {
                acc = acc.add(&pow.scale(cu));
            }
            pow = pow.mul(&gen_image);
        }
        Ok(acc)
    }

    /// Inverse of [`lift`]: express `e` (an element of this field lying in the
    /// image of `target` along the subfield chain) in `target`.
    pub fn project(self: &Arc<Self>, e: &Elt, target: &Arc<FieldDesc>) -> Result<Elt> {
        assert!(**self == *e.field, "element from a different field");
        if **self == **target {
            return Ok(Elt {
                field: target.clone(),
                c: e.c.clone(),
            });
        }
        let sub = self.sub.as_ref().ok_or(Error::NoSubfield)?;
        // Solve sum_u x_u * gen_image^u = e for x over F_p, x of length base.s.
        let gen_image = Elt {
            field: self.clone(),
            c: sub.gen_image.clone(),
        };
        let mut cols: Vec<Vec<u8>> = Vec::with_capacity(sub.base.s);
        let mut pow = self.one();
        for _ in 0..sub.base.s {
            cols.push(pow.c.clone());
            pow = pow.mul(&gen_image);
        }
        let x = solve_fp_columns(&cols, &e.c, self.p)
            .ok_or_else(|| Error::Internal("element not in designated subfield".into()))?;
        let below = Elt {
            field: sub.base.clone(),
            c: x,
        };
        sub.base.project(&below, target)
    }
}

/// Solve sum_u x_u * col_u = rhs over F_p by Gaussian elimination.
/// Columns all have the same length; returns None when inconsistent.
fn solve_fp_columns(cols: &[Vec<u8>], rhs: &[u8], p: u8) -> Option<Vec<u8>> {
    let rows = rhs.len();
    let n = cols.len();
    // Augmented matrix, row-major.
    let mut a = vec![0i16; rows * (n + 1)];
    for (j, col) in cols.iter().enumerate() {
        for i in 0..rows {
            a[i * (n + 1) + j] = col[i] as i16;
        }
    }
    for i in 0..rows {
        a[i * (n + 1) + n] = rhs[i] as i16;
    }
    let m = p as i16;
    let mut piv_rows = Vec::new();
    let mut r = 0usize;
    for c in 0..n {
        let mut sel = None;
        for i in r..rows {
            if a[i * (n + 1) + c] % m != 0 {
                sel = Some(i);
                break;
            }
        }
        let Some(i) = sel else { continue };
        for k in 0..=n {
            a.swap(r * (n + 1) + k, i * (n + 1) + k);
        }
        let inv = (1..m).find(|x| (a[r * (n + 1) + c] * x).rem_euclid(m) == 1).unwrap();
        for k in 0..=n {
            a[r * (n + 1) + k] = (a[r * (n + 1) + k] * inv).rem_euclid(m);
        }
        for i in 0..rows {
            if i != r && a[i * (n + 1) + c] % m != 0 {
                let f = a[i * (n + 1) + c];
                for k in 0..=n {
                    a[i * (n + 1) + k] =
                        (a[i * (n + 1) + k] - f * a[r * (n + 1) + k]).rem_euclid(m);
                }
            }
        }
        piv_rows.push((r, c));
        r += 1;
        if r == rows {
            break;
        }
    }
    // Inconsistency check.
    for i in r..rows {
        if a[i * (n + 1) + n] % m != 0 {
            return None;
        }
    }
    let mut x = vec![0u8; n];
    for (row, col) in piv_rows {
        x[col] = a[row * (n + 1) + n].rem_euclid(m) as u8;
    }
    Some(x)
}

fn embedding_is_hom(base: &Arc<FieldDesc>, big: &Arc<FieldDesc>, root: &Elt) -> bool {
    // Spot-check multiplicativity on a few element pairs.
    let lift_via = |e: &Elt| -> Elt {
        let mut acc = big.zero();
        let mut pow = big.one();
        for &cu in &e.c {
            if cu != 0 {
                acc = acc.add(&pow.scale(cu));
            }
            pow = pow.mul(root);
        }
        acc
    };
    let samples = [1u128, 2, 3, 5, 7, 11];
    for &i in &samples {
        for &j in &samples {
            let a = base.elt_from_index(i % base.order());
            let b = base.elt_from_index(j % base.order());
            if lift_via(&a.mul(&b)) != lift_via(&a).mul(&lift_via(&b)) {
                return false;
            }
        }
    }
    true
}

// ---------------------------------------------------------------------------
// Default moduli
// ---------------------------------------------------------------------------

/// Irreducibility over F_p: the modulus must divide X^{p^s} - X, and must
/// share no root pattern with any proper subfield level.
fn modulus_irreducible(m: &[u8], p: u8) -> bool {
    let s = m.len() - 1;
    if s == 0 {
        return false;
    }
    if s == 1 {
        return true;
    }
    let x = vec![0u8, 1];
    // X^{p^s} mod m must equal X.
    let e = (p as u128).checked_pow(s as u32).expect("degree overflow");
    if zp::powmod(&x, e, m, p) != x {
        return false;
    }
    // For each prime divisor r of s: gcd(X^{p^{s/r}} - X, m) must be constant.
    let mut rem = s;
    let mut r = 2;
    let mut primes = Vec::new();
    while r * r <= rem {
        if rem % r == 0 {
            primes.push(r);
            while rem % r == 0 {
                rem /= r;
            }
        }
        r += 1;
    }
    if rem > 1 {
        primes.push(rem);
    }
    for r in primes {
        let e = (p as u128).pow((s / r) as u32);
        let fx = zp::powmod(&x, e, m, p);
        let diff = zp::sub(&fx, &x, p);
        let g = zp::gcd(&diff, m, p);
        if zp::deg(&g) != Some(0) {
            return false;
        }
    }
    true
}

/// The default modulus for (p, s): the first monic irreducible polynomial of
/// degree s in the deterministic constant-first enumeration order.  The scan
/// is cheap (irreducible polynomials are dense) and reproducible, which is
/// all the fixed-table role requires.
pub fn default_modulus(p: u8, s: usize) -> Vec<u8> {
    if s == 1 {
        return vec![0, 1]; // X: the prime field itself
    }
    let mut idx: u128 = 0;
    loop {
        let mut m = vec![0u8; s + 1];
        let mut k = idx;
        for mi in m.iter_mut().take(s) {
            *mi = (k % p as u128) as u8;
            k /= p as u128;
        }
        assert!(k == 0, "no irreducible of degree {s} over F_{p} found");
        m[s] = 1;
        if modulus_irreducible(&m, p) {
            return m;
        }
        idx += 1;
    }
}

// ---------------------------------------------------------------------------
// Elements
// ---------------------------------------------------------------------------

/// An element of F_{p^s}, as a coefficient vector of length s.
#[derive(Clone)]
pub struct Elt {
    field: Arc<FieldDesc>,
    c: Vec<u8>,
}

impl PartialEq for Elt {
    fn eq(&self, other: &Self) -> bool {
        debug_assert!(*self.field == *other.field, "comparing across fields");
        self.c == other.c
    }
}
impl Eq for Elt {}

impl std::hash::Hash for Elt {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.c.hash(state);
    }
}

impl fmt::Debug for Elt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render("a"))
    }
}

impl fmt::Display for Elt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render("a"))
    }
}

impl Elt {
    pub fn field(&self) -> &Arc<FieldDesc> {
        &self.field
    }

    pub fn coeffs(&self) -> &[u8] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|&x| x == 0)
    }

    fn check(&self, other: &Elt) {
        assert!(
            *self.field == *other.field,
            "mixed-field arithmetic: {:?} vs {:?}",
            self.field,
            other.field
        );
    }

    pub fn add(&self, other: &Elt) -> Elt {
        self.check(other);
        let p = self.field.p;
        let c = self
            .c
            .iter()
            .zip(&other.c)
            .map(|(&a, &b)| ((a as u16 + b as u16) % p as u16) as u8)
            .collect();
        Elt {
            field: self.field.clone(),
            c,
        }
    }

    pub fn sub(&self, other: &Elt) -> Elt {
        self.check(other);
        let p = self.field.p as i16;
        let c = self
            .c
            .iter()
            .zip(&other.c)
            .map(|(&a, &b)| (a as i16 - b as i16).rem_euclid(p) as u8)
            .collect();
        Elt {
            field: self.field.clone(),
            c,
        }
    }

    pub fn neg(&self) -> Elt {
        let p = self.field.p as i16;
        let c = self.c.iter().map(|&a| (-(a as i16)).rem_euclid(p) as u8).collect();
        Elt {
            field: self.field.clone(),
            c,
        }
    }

    /// Multiply by a prime-field scalar.
    pub fn scale(&self, k: u8) -> Elt {
        let p = self.field.p as u16;
        let c = self.c.iter().map(|&a| ((a as u16 * k as u16) % p) as u8).collect();
        Elt {
            field: self.field.clone(),
            c,
        }
    }

    pub fn mul(&self, other: &Elt) -> Elt {
        self.check(other);
        let p = self.field.p;
        let prod = zp::mul(&self.c, &other.c, p);
        let mut r = zp::rem(&prod, &self.field.modulus, p);
        r.resize(self.field.s, 0);
        Elt {
            field: self.field.clone(),
            c: r,
        }
    }

    pub fn inv(&self) -> Result<Elt> {
        if self.is_zero() {
            return Err(Error::ZeroDivide);
        }
        let p = self.field.p;
        let mut a = self.c.clone();
        zp::strip(&mut a);
        let (g, u) = zp::ext_gcd(&a, &self.field.modulus, p);
        debug_assert_eq!(zp::deg(&g), Some(0), "modulus not coprime to element");
        // u*a ≡ g (mod m); divide by the constant g.
        let ginv = (1..p).find(|&x| (g[0] as u16 * x as u16) % p as u16 == 1).unwrap();
        let mut c: Vec<u8> = u
            .iter()
            .map(|&x| ((x as u16 * ginv as u16) % p as u16) as u8)
            .collect();
        c = zp::rem(&c, &self.field.modulus, p);
        c.resize(self.field.s, 0);
        Ok(Elt {
            field: self.field.clone(),
            c,
        })
    }

    pub fn div(&self, other: &Elt) -> Result<Elt> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn pow(&self, mut e: u128) -> Elt {
        let mut acc = self.field.one();
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

    /// The i-th power of the absolute Frobenius: a ↦ a^{p^i}.
    pub fn frobenius(&self, i: usize) -> Elt {
        let mut out = self.clone();
        for _ in 0..(i % self.field.s.max(1)) {
            out = out.pow(self.field.p as u128);
        }
        out
    }

    /// The unique p-th root (Frobenius is bijective): a^{p^{s-1}}.
    pub fn pth_root(&self) -> Elt {
        self.frobenius(self.field.s - 1 + if self.field.s == 1 { 1 } else { 0 })
    }

    /// Trace onto the degree-t subfield level (t | s), expressed in this field.
    pub fn trace_to_level(&self, t: usize) -> Elt {
        assert!(t >= 1 && self.field.s % t == 0, "level must divide the degree");
        let mut acc = self.clone();
        let mut frob = self.clone();
        for _ in 1..(self.field.s / t) {
            frob = frob.frobenius(t);
            acc = acc.add(&frob);
        }
        acc
    }

    /// Absolute trace down to F_p, as a residue mod p.
    pub fn trace_to_prime(&self) -> u8 {
        let t = self.trace_to_level(1);
        debug_assert!(
            t.c[1..].iter().all(|&x| x == 0),
            "absolute trace is not a prime-field element"
        );
        t.c[0]
    }

    /// Trace onto a designated subfield along the embedding chain.
    pub fn trace_to(&self, target: &Arc<FieldDesc>) -> Result<Elt> {
        if self.field.s % target.s != 0 || self.field.p != target.p {
            return Err(Error::NoSubfield);
        }
        let t = self.trace_to_level(target.s);
        self.field.project(&t, target)
    }

    pub fn render(&self, sym: &str) -> String {
        let mut terms = Vec::new();
        for (u, &cu) in self.c.iter().enumerate().rev() {
            if cu == 0 {
                continue;
            }
            let t = match (u, cu) {
                (0, c) => format!("{c}"),
                (1, 1) => sym.to_string(),
                (1, c) => format!("{c}*{sym}"),
                (u, 1) => format!("{sym}^{u}"),
                (u, c) => format!("{c}*{sym}^{u}"),
            };
            terms.push(t);
        }
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join("+")
        }
    }
}

// ---------------------------------------------------------------------------
// Root finding for completely split polynomials over a field
// ---------------------------------------------------------------------------

fn vec_strip(v: &mut Vec<Elt>) {
    while v.last().map_or(false, |e| e.is_zero()) {
        v.pop();
    }
}

fn vec_rem(a: &[Elt], m: &[Elt]) -> Vec<Elt> {
    let field = m.last().unwrap().field.clone();
    let lead_inv = m.last().unwrap().inv().expect("zero leading coefficient");
    let dm = m.len() - 1;
    let mut r: Vec<Elt> = a.to_vec();
    vec_strip(&mut r);
    while r.len() > dm {
        let coef = r.last().unwrap().mul(&lead_inv);
        let shift = r.len() - 1 - dm;
        for (i, mi) in m.iter().enumerate() {
            let t = r[i + shift].sub(&coef.mul(mi));
            r[i + shift] = t;
        }
        vec_strip(&mut r);
        if r.is_empty() {
            break;
        }
    }
    let _ = field;
    r
}

fn vec_mulmod(a: &[Elt], b: &[Elt], m: &[Elt]) -> Vec<Elt> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let field = a[0].field.clone();
    let mut out = vec![field.zero(); a.len() + b.len() - 1];
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            out[i + j] = out[i + j].add(&ai.mul(bj));
        }
    }
    vec_rem(&out, m)
}

fn vec_powmod(base: &[Elt], mut e: u128, m: &[Elt]) -> Vec<Elt> {
    let field = m.last().unwrap().field.clone();
    let mut acc = vec![field.one()];
    let mut b = vec_rem(base, m);
    while e > 0 {
        if e & 1 == 1 {
            acc = vec_mulmod(&acc, &b, m);
        }
        b = vec_mulmod(&b, &b, m);
        e >>= 1;
    }
    acc
}

fn vec_gcd(a: &[Elt], b: &[Elt]) -> Vec<Elt> {
    let (mut x, mut y) = (a.to_vec(), b.to_vec());
    vec_strip(&mut x);
    vec_strip(&mut y);
    while !y.is_empty() {
        let r = vec_rem(&x, &y);
        x = y;
        y = r;
    }
    if let Some(l) = x.last() {
        let li = l.inv().unwrap();
        for c in &mut x {
            *c = c.mul(&li);
        }
    }
    x
}

fn vec_quot(a: &[Elt], b: &[Elt]) -> Vec<Elt> {
    // Exact quotient (b | a assumed).
    let mut r = a.to_vec();
    vec_strip(&mut r);
    let mut b = b.to_vec();
    vec_strip(&mut b);
    let field = b.last().unwrap().field.clone();
    let lead_inv = b.last().unwrap().inv().unwrap();
    let mut q = vec![field.zero(); r.len().saturating_sub(b.len()) + 1];
    while r.len() >= b.len() && !r.is_empty() {
        let shift = r.len() - b.len();
        let coef = r.last().unwrap().mul(&lead_inv);
        q[shift] = q[shift].add(&coef);
        for (i, bi) in b.iter().enumerate() {
            let t = r[i + shift].sub(&coef.mul(bi));
            r[i + shift] = t;
        }
        vec_strip(&mut r);
    }
    debug_assert!(r.is_empty(), "inexact polynomial division");
    q
}

/// Find one root of a polynomial that splits into distinct linear factors
/// over `field`.  Deterministic: the splitting elements are taken from the
/// field enumeration in order, so the returned root is reproducible.
pub fn find_root_split(coeffs: &[Elt], field: &Arc<FieldDesc>) -> Result<Elt> {
    let mut f: Vec<Elt> = coeffs.to_vec();
    vec_strip(&mut f);
    if f.len() < 2 {
        return Err(Error::NoResidueRoot("constant polynomial".into()));
    }
    let p = field.p();
    let order = field.order();
    let mut attempts = 0u32;
    let mut delta_idx: u128 = 1;
    while f.len() > 2 {
        if attempts > 400 {
            return Err(Error::Internal("root splitting did not converge".into()));
        }
        attempts += 1;
        let delta = field.elt_from_index(delta_idx % order);
        delta_idx += 1;
        let g = if p == 2 {
            // Trace map sum (delta*X)^{2^i} mod f separates roots by absolute trace.
            if delta.is_zero() {
                continue;
            }
            let dx = vec![field.zero(), delta.clone()];
            let mut acc = vec_rem(&dx, &f);
            let mut sum = acc.clone();
            for _ in 1..field.degree() {
                acc = vec_mulmod(&acc, &acc, &f);
                sum = add_vecs(&sum, &acc);
            }
            vec_gcd(&sum, &f)
        } else {
            // (X + delta)^{(q-1)/2} - 1 separates roots by quadratic character.
            let xd = vec![delta.clone(), field.one()];
            let h = vec_powmod(&xd, (order - 1) / 2, &f);
            let mut hm = h;
            if hm.is_empty() {
                hm = vec![field.zero()];
            }
            hm[0] = hm[0].sub(&field.one());
            vec_gcd(&hm, &f)
        };
        if g.len() >= 2 && g.len() < f.len() {
            // Keep the smaller factor.
            let other = vec_quot(&f, &g);
            f = if g.len() <= other.len() { g } else { other };
        }
    }
    // Linear: root = -c0 / c1.
    let root = f[0].neg().div(&f[1])?;
    Ok(root)
}

fn add_vecs(a: &[Elt], b: &[Elt]) -> Vec<Elt> {
    let field = if a.is_empty() {
        b[0].field.clone()
    } else {
        a[0].field.clone()
    };
    let mut out = Vec::with_capacity(a.len().max(b.len()));
    for i in 0..a.len().max(b.len()) {
        let x = match (a.get(i), b.get(i)) {
            (Some(x), Some(y)) => x.add(y),
            (Some(x), None) => x.clone(),
            (None, Some(y)) => y.clone(),
            (None, None) => field.zero(),
        };
        out.push(x);
    }
    vec_strip(&mut out);
    out
}

/// All p roots of z^p - z = a in a's field, sorted by enumeration index.
/// Errs with `NoResidueRoot` when the absolute trace of `a` is non-zero.
pub fn artin_schreier_roots(a: &Elt) -> Result<Vec<Elt>> {
    let field = a.field().clone();
    if a.trace_to_prime() != 0 {
        return Err(Error::NoResidueRoot(format!(
            "trace of {a} is non-zero; the equation z^p - z = {a} has no root"
        )));
    }
    let p = field.p();
    // f = Z^p - Z - a
    let mut coeffs = vec![field.zero(); p as usize + 1];
    coeffs[0] = a.neg();
    coeffs[1] = field.one().neg();
    coeffs[p as usize] = field.one();
    let z0 = find_root_split(&coeffs, &field)?;
    let mut roots: Vec<Elt> = (0..p).map(|k| z0.add(&field.from_int(k as i64))).collect();
    roots.sort_by_key(|r| field.index_of(r));
    // Verify.
    for r in &roots {
        debug_assert!(r.pow(p as u128).sub(r) == *a);
    }
    Ok(roots)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f4() -> Arc<FieldDesc> {
        FieldDesc::new(2, 2, Some(vec![1, 1, 1])).unwrap()
    }

    fn f8() -> Arc<FieldDesc> {
        FieldDesc::new(2, 3, None).unwrap()
    }

    #[test]
    fn default_moduli_match_classical_choices() {
        assert_eq!(default_modulus(2, 2), vec![1, 1, 1]); // x^2+x+1
        assert_eq!(default_modulus(2, 3), vec![1, 1, 0, 1]); // x^3+x+1
        assert_eq!(default_modulus(2, 4), vec![1, 1, 0, 0, 1]); // x^4+x+1
        assert_eq!(default_modulus(3, 2), vec![1, 0, 1]); // x^2+1
    }

    #[test]
    fn rejects_reducible_modulus() {
        // x^2+1 = (x+1)^2 over F_2.
        assert!(FieldDesc::new(2, 2, Some(vec![1, 0, 1])).is_err());
    }

    #[test]
    fn f4_multiplication_table() {
        let f = f4();
        let a = f.gen();
        // a^2 = a + 1
        assert_eq!(a.mul(&a), f.elt(&[1, 1]).unwrap());
        // a * (a+1) = a^2 + a = 1
        assert_eq!(a.mul(&f.elt(&[1, 1]).unwrap()), f.one());
    }

    #[test]
    fn f3_division() {
        let f = FieldDesc::prime(3).unwrap();
        let one = f.one();
        let two = f.from_int(2);
        assert_eq!(one.div(&two).unwrap(), two); // 1/2 = 2 since 2*2 = 4 = 1
        assert!(f.zero().inv().is_err());
    }

    #[test]
    fn traces_on_f4() {
        let f = f4();
        let a = f.gen();
        // Tr(a) = a + a^2 = a + a + 1 = 1
        assert_eq!(a.trace_to_prime(), 1);
        assert_eq!(f.one().trace_to_prime(), 0);
        assert_eq!(f.zero().trace_to_prime(), 0);
        // The adjoined constant for F_4 is the generator itself.
        assert_eq!(f.nonzero_trace_constant().unwrap(), a);
    }

    #[test]
    fn pth_roots() {
        let f = f4();
        let a = f.gen();
        let r = a.pth_root();
        assert_eq!(r.mul(&r), a);
        assert_eq!(r, f.elt(&[1, 1]).unwrap()); // sqrt(a) = a^2 = a+1

        let f8 = f8();
        let b = f8.gen();
        let r = b.pth_root();
        assert_eq!(r.mul(&r), b);
        // With b^3 = b + 1: sqrt(b) = b^2 + b.
        assert_eq!(r, f8.elt(&[0, 1, 1]).unwrap());
    }

    #[test]
    fn frobenius_fixes_prime_field_and_has_order_s() {
        let f = f8();
        for i in 0..8u128 {
            let e = f.elt_from_index(i);
            assert_eq!(e.frobenius(3), e, "Frobenius^s must be the identity");
        }
        assert_eq!(f.one().frobenius(1), f.one());
    }

    #[test]
    fn field_axioms_sampled() {
        let f = FieldDesc::new(3, 2, None).unwrap();
        let all: Vec<Elt> = f.enumerate().unwrap().collect();
        assert_eq!(all.len(), 9);
        for x in &all {
            for y in &all {
                assert_eq!(x.add(y), y.add(x));
                assert_eq!(x.mul(y), y.mul(x));
                for z in &all {
                    assert_eq!(x.mul(&y.add(z)), x.mul(y).add(&x.mul(z)));
                }
            }
        }
        for x in all.iter().filter(|x| !x.is_zero()) {
            assert_eq!(x.mul(&x.inv().unwrap()), f.one());
        }
    }

    #[test]
    fn trace_kernel_size_is_q_over_p() {
        for (p, s) in [(2u8, 3usize), (3, 2), (5, 2)] {
            let f = FieldDesc::new(p, s, None).unwrap();
            let zero_trace = f
                .enumerate()
                .unwrap()
                .filter(|e| e.trace_to_prime() == 0)
                .count() as u128;
            assert_eq!(zero_trace, f.order() / p as u128);
        }
    }

    #[test]
    fn trace_transitivity_through_tower() {
        // F_2 ⊆ F_4 ⊆ F_16: absolute trace = trace of relative trace.
        let f4 = f4();
        let f16 = f4.extension(2).unwrap();
        for i in 0..16u128 {
            let e = f16.elt_from_index(i);
            let rel = e.trace_to(&f4).unwrap();
            assert_eq!(e.trace_to_prime(), rel.trace_to_prime());
        }
    }

    #[test]
    fn tower_lift_and_project_roundtrip() {
        let f4 = f4();
        let f16 = f4.extension(2).unwrap();
        for i in 0..4u128 {
            let e = f4.elt_from_index(i);
            let up = f16.lift(&e).unwrap();
            let down = f16.project(&up, &f4).unwrap();
            assert_eq!(down, e);
        }
        // Multiplicativity of the embedding.
        let a = f4.gen();
        let b = f4.elt(&[1, 1]).unwrap();
        assert_eq!(
            f16.lift(&a.mul(&b)).unwrap(),
            f16.lift(&a).unwrap().mul(&f16.lift(&b).unwrap())
        );
    }

    #[test]
    fn artin_schreier_roots_split_case() {
        // Over F_4: z^2 - z = a^2 + a = 1... take a value of zero trace: 0.
        let f = f4();
        let roots = artin_schreier_roots(&f.zero()).unwrap();
        assert_eq!(roots.len(), 2);
        // Roots of z^2 = z are 0 and 1.
        assert!(roots.contains(&f.zero()) && roots.contains(&f.one()));
        // Non-zero trace: no roots.
        assert!(artin_schreier_roots(&f.gen()).is_err());
    }

    #[test]
    fn find_root_of_lifted_modulus() {
        // The root scan that backs subfield embeddings.
        let f3 = FieldDesc::prime(3).unwrap();
        let f81 = f3.extension(4).unwrap();
        // x^4 + x^3 + 2 over F_3 is irreducible; it must split in F_81.
        let coeffs: Vec<Elt> = [2i64, 0, 0, 1, 1].iter().map(|&c| f81.from_int(c)).collect();
        let r = find_root_split(&coeffs, &f81).unwrap();
        let val = r.pow(4).add(&r.pow(3)).add(&f81.from_int(2));
        assert!(val.is_zero());
    }

    #[test]
    fn enumeration_guard() {
        let f = FieldDesc::new(2, 21, None);
        // Field of order 2^21 constructs fine...
        let f = f.unwrap();
        // ...but refuses to enumerate.
        assert!(matches!(f.enumerate().err(), Some(Error::SizeGuard(_))));
    }

    #[test]
    fn enumeration_order_is_constant_first() {
        let f = f4();
        let names: Vec<String> = f.enumerate().unwrap().map(|e| e.render("a")).collect();
        assert_eq!(names, vec!["0", "1", "a", "a+1"]);
    }
}
