//! Exact arithmetic for Artin-Schreier covers of curves over small finite
//! fields.
//!
//! The crate builds degree-p covers `z^p - z = f` of a base curve (the
//! projective line, or itself an Artin-Schreier cover `y^p - y = h(x)`),
//! computes Riemann-Roch spaces of effective divisors by an exact linear
//! ansatz, solves the linear trace conditions that force a chosen set of
//! rational points to split completely, and assembles genus / point-count
//! data for the fibre products of the resulting covers.  Everything is exact:
//! finite-field arithmetic on coefficient vectors, truncated Laurent series
//! with tracked precision, and F_p linear algebra.
//!
//! Module layout mirrors the pipeline:
//!
//! * [`gf`]     - finite fields F_{p^s} and subfield towers
//! * [`poly`]   - univariate polynomials and rational functions over a field
//! * [`local`]  - truncated Laurent series, Hensel lifting, local
//!   Artin-Schreier reduction
//! * [`fplin`]  - exact F_p matrices, subspaces and their enumeration
//! * [`curve`]  - curve models, places, divisors, expansions, point counts
//! * [`expr`]   - the expression grammar used for functions in configs and
//!   reports
//! * [`rrspace`] - Riemann-Roch bases, the geometric kernel V, the solution
//!   space of the trace system
//! * [`cover`]  - per-line cover analysis, fibre-product statistics, zeta
//!   consistency checks

pub mod error;
pub mod gf;
pub mod poly;
pub mod local;
pub mod fplin;
pub mod curve;
pub mod expr;
pub mod rrspace;
pub mod cover;

pub use error::{Error, Result};
