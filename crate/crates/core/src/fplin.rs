//! Exact linear algebra over F_p.
//!
//! Vectors are byte slices with entries reduced mod p.  Subspaces are kept in
//! reduced row echelon form, which is canonical: two subspaces are equal iff
//! their basis matrices are equal.  Enumeration of subspaces walks Schubert
//! cells (pivot-column sets plus free entries), so counts match Gaussian
//! binomials and orderings are reproducible.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::gf::{Elt, FieldDesc};

#[derive(Clone, PartialEq, Eq)]
pub struct FpMat {
    p: u8,
    rows: usize,
    cols: usize,
    a: Vec<u8>, // row-major
}

impl std::fmt::Debug for FpMat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "FpMat {}x{} mod {}", self.rows, self.cols, self.p)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        Ok(())
    }
}

fn inv_mod(a: u8, p: u8) -> u8 {
    (1..p)
        .find(|&x| (a as u16 * x as u16) % p as u16 == 1)
        .expect("inverse of zero")
}

impl FpMat {
    pub fn zeros(p: u8, rows: usize, cols: usize) -> FpMat {
        FpMat {
            p,
            rows,
            cols,
            a: vec![0; rows * cols],
        }
    }

    pub fn from_rows(p: u8, rows: &[Vec<u8>]) -> FpMat {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut m = FpMat::zeros(p, rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "ragged rows");
            for (j, &x) in r.iter().enumerate() {
                assert!(x < p, "entry not reduced");
                m.a[i * cols + j] = x;
            }
        }
        m
    }

    pub fn identity(p: u8, n: usize) -> FpMat {
        let mut m = FpMat::zeros(p, n, n);
        for i in 0..n {
            m.a[i * n + i] = 1;
        }
        m
    }

    pub fn p(&self) -> u8 {
        self.p
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> u8 {
        self.a[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: u8) {
        assert!(v < self.p);
        self.a[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[u8] {
        &self.a[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul_vec(&self, v: &[u8]) -> Vec<u8> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                let s: u32 = self
                    .row(i)
                    .iter()
                    .zip(v)
                    .map(|(&a, &b)| a as u32 * b as u32)
                    .sum();
                (s % self.p as u32) as u8
            })
            .collect()
    }

    /// Reduced row echelon form together with the pivot columns.
    pub fn rref(&self) -> (FpMat, Vec<usize>) {
        let mut m = self.clone();
        let p = self.p as i32;
        let mut pivots = Vec::new();
        let mut r = 0usize;
        for c in 0..m.cols {
            let Some(sel) = (r..m.rows).find(|&i| m.get(i, c) != 0) else {
                continue;
            };
            // Swap rows sel and r.
            for j in 0..m.cols {
                let (x, y) = (m.get(r, j), m.get(sel, j));
                m.set(r, j, y);
                m.set(sel, j, x);
            }
            let inv = inv_mod(m.get(r, c), self.p);
            for j in 0..m.cols {
                let v = (m.get(r, j) as u16 * inv as u16) % self.p as u16;
                m.set(r, j, v as u8);
            }
            for i in 0..m.rows {
                if i != r && m.get(i, c) != 0 {
                    let f = m.get(i, c) as i32;
                    for j in 0..m.cols {
                        let v = (m.get(i, j) as i32 - f * m.get(r, j) as i32).rem_euclid(p);
                        m.set(i, j, v as u8);
                    }
                }
            }
            pivots.push(c);
            r += 1;
            if r == m.rows {
                break;
            }
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Canonical basis of the right nullspace: one vector per free column in
    /// increasing column order, with 1 at the free position.
    pub fn nullspace(&self) -> Vec<Vec<u8>> {
        let (r, pivots) = self.rref();
        let p = self.p;
        let is_pivot: Vec<bool> = {
            let mut v = vec![false; self.cols];
            for &c in &pivots {
                v[c] = true;
            }
            v
        };
        let mut out = Vec::new();
        for free in 0..self.cols {
            if is_pivot[free] {
                continue;
            }
            let mut v = vec![0u8; self.cols];
            v[free] = 1;
            for (row, &pc) in pivots.iter().enumerate() {
                // pivot_var = -entry(row, free)
                let e = r.get(row, free);
                v[pc] = ((p - e) % p) as u8;
            }
            out.push(v);
        }
        out
    }

    /// One solution of A x = rhs, if consistent.
    pub fn solve(&self, rhs: &[u8]) -> Option<Vec<u8>> {
        assert_eq!(rhs.len(), self.rows);
        let mut aug = FpMat::zeros(self.p, self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.a[i * (self.cols + 1) + j] = self.get(i, j);
            }
            aug.a[i * (self.cols + 1) + self.cols] = rhs[i] % self.p;
        }
        let (r, pivots) = aug.rref();
        if pivots.contains(&self.cols) {
            return None; // pivot in the constants column: inconsistent
        }
        let mut x = vec![0u8; self.cols];
        for (row, &pc) in pivots.iter().enumerate() {
            x[pc] = r.get(row, self.cols);
        }
        Some(x)
    }
}

// ---------------------------------------------------------------------------
// Subspaces
// ---------------------------------------------------------------------------

/// An F_p-subspace of F_p^ambient in canonical (rref) form.
#[derive(Clone, PartialEq, Eq)]
pub struct FpSubspace {
    p: u8,
    ambient: usize,
    rows: Vec<Vec<u8>>, // rref, full row rank
}

impl std::fmt::Debug for FpSubspace {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "FpSubspace(dim {} of F_{}^{})",
            self.rows.len(),
            self.p,
            self.ambient
        )
    }
}

impl FpSubspace {
    pub fn zero(p: u8, ambient: usize) -> FpSubspace {
        FpSubspace {
            p,
            ambient,
            rows: Vec::new(),
        }
    }

    pub fn full(p: u8, ambient: usize) -> FpSubspace {
        FpSubspace::from_vectors(p, ambient, &FpMat::identity(p, ambient).a.chunks(ambient).map(|r| r.to_vec()).collect::<Vec<_>>())
    }

    pub fn from_vectors(p: u8, ambient: usize, vecs: &[Vec<u8>]) -> FpSubspace {
        if vecs.is_empty() {
            return FpSubspace::zero(p, ambient);
        }
        let m = FpMat::from_rows(p, vecs);
        let (r, pivots) = m.rref();
        let rows = (0..pivots.len()).map(|i| r.row(i).to_vec()).collect();
        FpSubspace { p, ambient, rows }
    }

    pub fn p(&self) -> u8 {
        self.p
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn basis(&self) -> &[Vec<u8>] {
        &self.rows
    }

    /// Remainder of v after elimination against the rref basis.
    pub fn reduce(&self, v: &[u8]) -> Vec<u8> {
        assert_eq!(v.len(), self.ambient);
        let p = self.p as i32;
        let mut w: Vec<u8> = v.iter().map(|&x| x % self.p).collect();
        for row in &self.rows {
            let pc = row.iter().position(|&x| x != 0).unwrap();
            let f = w[pc] as i32;
            if f != 0 {
                for j in 0..self.ambient {
                    w[j] = ((w[j] as i32 - f * row[j] as i32).rem_euclid(p)) as u8;
                }
            }
        }
        w
    }

    pub fn contains(&self, v: &[u8]) -> bool {
        self.reduce(v).iter().all(|&x| x == 0)
    }

    /// Coordinates of v with respect to the canonical basis, or None when v
    /// lies outside the subspace.  Because the basis is in rref, the j-th
    /// coordinate is just the entry of v at the j-th pivot column.
    pub fn coordinates_of(&self, v: &[u8]) -> Option<Vec<u8>> {
        assert_eq!(v.len(), self.ambient);
        let coords: Vec<u8> = self
            .rows
            .iter()
            .map(|row| {
                let pc = row.iter().position(|&x| x != 0).unwrap();
                v[pc] % self.p
            })
            .collect();
        let p = self.p as i32;
        let mut rem: Vec<u8> = v.iter().map(|&x| x % self.p).collect();
        for (row, &c) in self.rows.iter().zip(&coords) {
            if c != 0 {
                for j in 0..self.ambient {
                    rem[j] = ((rem[j] as i32 - c as i32 * row[j] as i32).rem_euclid(p)) as u8;
                }
            }
        }
        if rem.iter().all(|&x| x == 0) {
            Some(coords)
        } else {
            None
        }
    }

    pub fn is_subspace_of(&self, other: &FpSubspace) -> bool {
        self.rows.iter().all(|r| other.contains(r))
    }

    /// Span of the union.
    pub fn sum(&self, other: &FpSubspace) -> FpSubspace {
        assert_eq!(self.ambient, other.ambient);
        let mut vecs = self.rows.clone();
        vecs.extend(other.rows.iter().cloned());
        FpSubspace::from_vectors(self.p, self.ambient, &vecs)
    }

    /// Do the two subspaces intersect only in 0?
    pub fn meets_trivially(&self, other: &FpSubspace) -> bool {
        self.sum(other).dim() == self.dim() + other.dim()
    }

    /// A deterministic complement W of self inside `within` (self ⊆ within):
    /// greedily extend by the basis vectors of `within`, in order, that are
    /// independent of what has been picked so far.
    pub fn complement_in(&self, within: &FpSubspace) -> Result<FpSubspace> {
        if !self.is_subspace_of(within) {
            return Err(Error::DimensionMismatch(
                "complement requested of a non-subspace".into(),
            ));
        }
        let mut picked: Vec<Vec<u8>> = Vec::new();
        let mut span = self.clone();
        for cand in &within.rows {
            if span.contains(cand) {
                continue;
            }
            picked.push(cand.clone());
            span = span.sum(&FpSubspace::from_vectors(self.p, self.ambient, &[cand.clone()]));
        }
        debug_assert_eq!(span.dim(), within.dim());
        Ok(FpSubspace::from_vectors(self.p, self.ambient, &picked))
    }
}

// ---------------------------------------------------------------------------
// Enumeration
// ---------------------------------------------------------------------------

/// Number of r-dimensional subspaces of F_p^d.
pub fn gaussian_binomial(d: usize, r: usize, p: u8) -> u128 {
    if r > d {
        return 0;
    }
    // prod_{i=0}^{r-1} (p^{d-i} - 1) / (p^{r-i} - 1)
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    let pe = |e: usize| (p as u128).checked_pow(e as u32).expect("overflow");
    for i in 0..r {
        num = num.checked_mul(pe(d - i) - 1).expect("overflow");
        den = den.checked_mul(pe(r - i) - 1).expect("overflow");
    }
    num / den
}

/// All r-dimensional subspaces of F_p^d as rref basis matrices (rows), walked
/// by pivot-column set and then by free entries.  The count equals the
/// Gaussian binomial; `budget`, when given, bounds it up front.
pub fn enumerate_subspaces(
    d: usize,
    r: usize,
    p: u8,
    budget: Option<u128>,
) -> Result<Vec<Vec<Vec<u8>>>> {
    let total = gaussian_binomial(d, r, p);
    if let Some(b) = budget {
        if total > b {
            return Err(Error::BudgetExceeded(format!(
                "{total} subspaces of dimension {r} exceed the budget {b}"
            )));
        }
    }
    if total > (1u128 << 24) {
        return Err(Error::BudgetExceeded(format!(
            "{total} subspaces of dimension {r} exceed the hard cap"
        )));
    }
    let mut out = Vec::with_capacity(total as usize);
    for pivots in combinations(d, r) {
        // Free positions: (i, j) with j > pivots[i] and j not a pivot column.
        let is_pivot: Vec<bool> = {
            let mut v = vec![false; d];
            for &c in &pivots {
                v[c] = true;
            }
            v
        };
        let mut free = Vec::new();
        for (i, &pc) in pivots.iter().enumerate() {
            for j in (pc + 1)..d {
                if !is_pivot[j] {
                    free.push((i, j));
                }
            }
        }
        let cells = (p as u128).checked_pow(free.len() as u32).expect("overflow");
        for mut idx in 0..cells {
            let mut rows = vec![vec![0u8; d]; r];
            for (i, &pc) in pivots.iter().enumerate() {
                rows[i][pc] = 1;
            }
            for &(i, j) in &free {
                rows[i][j] = (idx % p as u128) as u8;
                idx /= p as u128;
            }
            out.push(rows);
        }
    }
    debug_assert_eq!(out.len() as u128, total);
    Ok(out)
}

fn combinations(d: usize, r: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, d: usize, r: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for c in start..d {
            cur.push(c);
            rec(c + 1, d, r, cur, out);
            cur.pop();
        }
    }
    rec(0, d, r, &mut cur, &mut out);
    out
}

/// Canonical representatives of the lines of F_p^d: first non-zero
/// coordinate equal to 1, ordered by leading position then trailing digits.
pub fn enumerate_lines(d: usize, p: u8) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    for lead in 0..d {
        let tail = d - lead - 1;
        let count = (p as u128).checked_pow(tail as u32).expect("overflow");
        for mut idx in 0..count {
            let mut v = vec![0u8; d];
            v[lead] = 1;
            for j in 0..tail {
                v[lead + 1 + j] = (idx % p as u128) as u8;
                idx /= p as u128;
            }
            out.push(v);
        }
    }
    out
}

/// Scale a non-zero vector so its first non-zero coordinate is 1.
pub fn canonical_line_rep(v: &[u8], p: u8) -> Vec<u8> {
    let lead = v
        .iter()
        .position(|&x| x % p != 0)
        .expect("zero vector has no line representative");
    let inv = inv_mod(v[lead] % p, p);
    v.iter().map(|&x| ((x as u16 * inv as u16) % p as u16) as u8).collect()
}

// ---------------------------------------------------------------------------
// F_q <-> F_p flattening
// ---------------------------------------------------------------------------

/// Expand a vector over F_q into F_p coordinates via the power basis.
pub fn flatten_fq_vec(v: &[Elt]) -> Vec<u8> {
    let mut out = Vec::new();
    for e in v {
        out.extend_from_slice(e.coeffs());
    }
    out
}

/// Inverse of [`flatten_fq_vec`].
pub fn unflatten_fq_vec(field: &Arc<FieldDesc>, bytes: &[u8]) -> Vec<Elt> {
    let m = field.degree();
    assert_eq!(bytes.len() % m, 0, "length not a multiple of the degree");
    bytes
        .chunks(m)
        .map(|c| field.elt(c).expect("unreduced flattened coordinates"))
        .collect()
}
