//! Divisors on a base curve and the splitting bookkeeping derived from them.

use std::sync::Arc;

use crate::error::Result;

use super::{rational_places, CPlace, CurveModel};

/// A formal Z-linear combination of places, kept duplicate-free.
#[derive(Clone)]
pub struct Divisor {
    entries: Vec<(CPlace, i64)>,
}

impl std::fmt::Debug for Divisor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.entries.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .entries
            .iter()
            .map(|(q, n)| format!("{n}*{}", q.name()))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl Divisor {
    pub fn new(raw: Vec<(CPlace, i64)>) -> Divisor {
        let mut entries: Vec<(CPlace, i64)> = Vec::new();
        for (place, n) in raw {
            if n == 0 {
                continue;
            }
            if let Some(slot) = entries.iter_mut().find(|(q, _)| *q == place) {
                slot.1 += n;
            } else {
                entries.push((place, n));
            }
        }
        entries.retain(|(_, n)| *n != 0);
        Divisor { entries }
    }

    pub fn zero() -> Divisor {
        Divisor { entries: Vec::new() }
    }

    pub fn entries(&self) -> &[(CPlace, i64)] {
        &self.entries
    }

    pub fn degree(&self) -> i64 {
        self.entries
            .iter()
            .map(|(q, n)| n * q.degree() as i64)
            .sum()
    }

    pub fn is_effective(&self) -> bool {
        self.entries.iter().all(|(_, n)| *n > 0)
    }

    pub fn multiplicity(&self, place: &CPlace) -> i64 {
        self.entries
            .iter()
            .find(|(q, _)| q == place)
            .map_or(0, |(_, n)| *n)
    }

    pub fn support(&self) -> impl Iterator<Item = &CPlace> {
        self.entries.iter().map(|(q, _)| q)
    }

    /// Coefficient-wise floor division: sum floor(n_Q / k) Q.
    pub fn floor_div(&self, k: i64) -> Divisor {
        assert!(k > 0, "floor division needs a positive modulus");
        Divisor::new(
            self.entries
                .iter()
                .map(|(q, n)| (q.clone(), n.div_euclid(k)))
                .collect(),
        )
    }

    pub fn add(&self, other: &Divisor) -> Divisor {
        let mut all = self.entries.clone();
        all.extend(other.entries.iter().cloned());
        Divisor::new(all)
    }

    pub fn scale(&self, k: i64) -> Divisor {
        Divisor::new(
            self.entries
                .iter()
                .map(|(q, n)| (q.clone(), n * k))
                .collect(),
        )
    }
}

/// The rational-place bookkeeping attached to a divisor: the full list of
/// degree-1 places of the curve, how many of them meet the support, and the
/// ones that every cover in a good family must split.
#[derive(Clone, Debug)]
pub struct SplittingContext {
    pub places: Vec<CPlace>,
    pub delta: usize,
    pub split_targets: Vec<CPlace>,
}

impl SplittingContext {
    pub fn new(curve: &Arc<CurveModel>, d: &Divisor) -> Result<SplittingContext> {
        let places = rational_places(curve)?;
        let split_targets: Vec<CPlace> = places
            .iter()
            .filter(|p| d.multiplicity(p) == 0)
            .cloned()
            .collect();
        let delta = places.len() - split_targets.len();
        let support_deg1 = d
            .entries()
            .iter()
            .filter(|(q, _)| q.degree() == 1)
            .count();
        assert_eq!(
            delta, support_deg1,
            "every degree-1 support place must appear among the rational places"
        );
        Ok(SplittingContext {
            places,
            delta,
            split_targets,
        })
    }

    pub fn n(&self) -> usize {
        self.places.len()
    }
}
