//! Search over subspaces of the trace-solution space.
//!
//! Every subspace evaluation goes through [`fibre_stats`], so each candidate
//! is re-checked against both count formulas and the Weil bound.  The budget
//! counts evaluated subspaces.  Strategies:
//!
//! * exhaustive — enumerate all r-dimensional subspaces (error when that
//!   exceeds the budget);
//! * greedy — grow subspaces line by line, keeping the best extension among
//!   a small beam, with seeded random restarts;
//! * random — sample subspaces from a seeded generator;
//! * the default picks exhaustive per dimension when the count fits the
//!   remaining budget, and falls back to greedy plus random otherwise.
//!
//! The row order of the outcome is deterministic for a given config and seed
//! regardless of how many threads evaluate candidates.

use std::collections::HashSet;

use rayon::prelude::*;

use asforge_core::cover::{fibre_stats, FibreStats, LineTable};
use asforge_core::curve::SplittingContext;
use asforge_core::error::{Error, Result};
use asforge_core::fplin::{enumerate_subspaces, gaussian_binomial, FpSubspace};
use asforge_core::rrspace::LSpace;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    Auto,
    Exhaustive,
    Greedy,
    Random,
}

impl Strategy {
    pub fn parse(s: &str) -> Result<Strategy> {
        match s {
            "exhaustive" => Ok(Strategy::Exhaustive),
            "greedy" => Ok(Strategy::Greedy),
            "random" => Ok(Strategy::Random),
            other => Err(Error::Invalid(format!(
                "unknown strategy '{other}' (expected exhaustive, greedy or random)"
            ))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SearchParams {
    pub max_dim: usize,
    pub budget: u128,
    pub strategy: Strategy,
    pub seed: u64,
}

/// One evaluated subspace.  `basis` is the canonical reduced basis in the
/// coordinates of the line-table space, `lines` the table indices of its
/// projective lines.
#[derive(Debug, Clone)]
pub struct SearchRow {
    pub r: usize,
    pub basis: Vec<Vec<u8>>,
    pub lines: Vec<usize>,
    pub genus: i64,
    pub points: i64,
    pub tau: i64,
}

#[derive(Debug)]
pub struct SearchOutcome {
    pub rows: Vec<SearchRow>,
    /// Indices into `rows`, sorted by the search target, capped for emission.
    pub emitted: Vec<usize>,
    /// Indices into `rows` on the genus/points Pareto frontier.
    pub pareto: Vec<usize>,
    pub evaluated: u128,
    pub complete: bool,
    pub strategy_used: &'static str,
}

/// How many rows a report carries at most; the Pareto frontier is always
/// complete.
const EMIT_CAP: usize = 1000;
/// Extensions examined per greedy step.
const BEAM: usize = 8;
/// Greedy restarts with shuffled candidate order.
const RESTARTS: usize = 16;
/// Distinct subspaces the random strategy aims for per dimension.
const RANDOM_GOAL: u128 = 1024;

struct Xorshift(u64);

impl Xorshift {
    fn new(seed: u64) -> Xorshift {
        // Avoid the all-zero state; splitmix the seed once to decorrelate
        // small seeds.
        let mut z = seed.wrapping_add(0x9E3779B97F4A7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        Xorshift((z ^ (z >> 31)).max(1))
    }

    fn next(&mut self) -> u64 {
        let mut x = self.0;
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        self.0 = x;
        x
    }

    fn below(&mut self, n: u64) -> u64 {
        self.next() % n.max(1)
    }
}

fn shuffle<T>(v: &mut [T], rng: &mut Xorshift) {
    for i in (1..v.len()).rev() {
        let j = rng.below(i as u64 + 1) as usize;
        v.swap(i, j);
    }
}

fn row_from_stats(stats: FibreStats) -> SearchRow {
    SearchRow {
        r: stats.r,
        basis: stats.basis,
        lines: stats.lines,
        genus: stats.genus,
        points: stats.points,
        tau: stats.tau,
    }
}

/// Target order: more points first, then fewer genus, then smaller dimension,
/// then lexicographic basis for full determinism.
fn target_key(row: &SearchRow) -> (i64, i64, usize, Vec<Vec<u8>>) {
    (-row.points, row.genus, row.r, row.basis.clone())
}

struct Runner<'a> {
    l: &'a LSpace,
    table: &'a LineTable,
    v: &'a FpSubspace,
    ctx: &'a SplittingContext,
    rows: Vec<SearchRow>,
    seen: HashSet<Vec<Vec<u8>>>,
    remaining: u128,
}

impl<'a> Runner<'a> {
    fn eval(&self, basis: &[Vec<u8>]) -> Result<SearchRow> {
        fibre_stats(self.l, self.table, basis, self.ctx, self.v).map(row_from_stats)
    }

    fn push(&mut self, row: SearchRow) {
        if self.seen.insert(row.basis.clone()) {
            self.rows.push(row);
        }
    }

    fn exhaustive(&mut self, r: usize, forced: bool) -> Result<()> {
        let p = self.table.space().p();
        let dim = self.table.space().dim();
        let count = gaussian_binomial(dim, r, p);
        if count > self.remaining {
            if forced {
                return Err(Error::BudgetExceeded(format!(
                    "{count} subspaces of dimension {r} exceed the remaining budget {}",
                    self.remaining
                )));
            }
            return Err(Error::Internal("exhaustive pass without budget".into()));
        }
        let subs = enumerate_subspaces(dim, r, p, Some(self.remaining))?;
        self.remaining -= count;
        let evaluated: Result<Vec<SearchRow>> =
            subs.par_iter().map(|b| self.eval(b)).collect();
        for row in evaluated? {
            self.push(row);
        }
        Ok(())
    }

    /// Grow one chain of subspaces up to dimension `r_target`, recording every
    /// intermediate subspace it evaluates.
    fn greedy(&mut self, r_target: usize, seed: u64) -> Result<()> {
        let p = self.table.space().p();
        let dim = self.table.space().dim();
        let nlines = self.table.reports().len();
        let mut ranking: Vec<usize> = (0..nlines).collect();
        ranking.sort_by_key(|&i| {
            let rep = &self.table.reports()[i];
            (rep.genus, -rep.epsilon, i)
        });
        for restart in 0..RESTARTS.min(nlines.max(1)) {
            let mut order = ranking.clone();
            if restart > 0 {
                let mut rng = Xorshift::new(seed ^ (restart as u64).wrapping_mul(0xA24BAED4963EE407));
                shuffle(&mut order, &mut rng);
            }
            let mut span: Vec<Vec<u8>> = Vec::new();
            while span.len() < r_target && self.remaining > 0 {
                let mut best: Option<SearchRow> = None;
                let mut tried = 0usize;
                for &cand in &order {
                    if tried >= BEAM || self.remaining == 0 {
                        break;
                    }
                    let mut candidate = span.clone();
                    candidate.push(self.table.reports()[cand].rep.clone());
                    let sub = FpSubspace::from_vectors(p, dim, &candidate);
                    if sub.dim() != span.len() + 1 {
                        continue;
                    }
                    // Costs budget only when the subspace is new.
                    let key: Vec<Vec<u8>> = sub.basis().to_vec();
                    let row = if self.seen.contains(&key) {
                        self.rows
                            .iter()
                            .find(|row| row.basis == key)
                            .expect("seen rows are recorded")
                            .clone()
                    } else {
                        self.remaining -= 1;
                        let row = self.eval(&candidate)?;
                        self.push(row.clone());
                        row
                    };
                    tried += 1;
                    if best
                        .as_ref()
                        .map(|b| target_key(&row) < target_key(b))
                        .unwrap_or(true)
                    {
                        best = Some(row);
                    }
                }
                match best {
                    Some(b) => span = b.basis.clone(),
                    None => break,
                }
            }
        }
        Ok(())
    }

    fn random(&mut self, r: usize, seed: u64) -> Result<()> {
        let p = self.table.space().p();
        let dim = self.table.space().dim();
        let total = gaussian_binomial(dim, r, p);
        let goal = RANDOM_GOAL.min(total).min(self.remaining);
        let mut rng = Xorshift::new(seed ^ (r as u64).wrapping_mul(0xD6E8FEB86659FD93));
        let mut found = 0u128;
        let mut attempts = 0u128;
        let max_attempts = goal.saturating_mul(8) + 64;
        while found < goal && attempts < max_attempts && self.remaining > 0 {
            attempts += 1;
            let vecs: Vec<Vec<u8>> = (0..r)
                .map(|_| {
                    let mut v = vec![0u8; dim];
                    loop {
                        for slot in v.iter_mut() {
                            *slot = rng.below(p as u64) as u8;
                        }
                        if v.iter().any(|&c| c != 0) {
                            break;
                        }
                    }
                    v
                })
                .collect();
            let sub = FpSubspace::from_vectors(p, dim, &vecs);
            if sub.dim() != r || self.seen.contains(sub.basis()) {
                continue;
            }
            self.remaining -= 1;
            let basis = sub.basis().to_vec();
            let row = self.eval(&basis)?;
            self.push(row);
            found += 1;
        }
        Ok(())
    }
}

pub fn run_search(
    l: &LSpace,
    table: &LineTable,
    v: &FpSubspace,
    ctx: &SplittingContext,
    params: &SearchParams,
) -> Result<SearchOutcome> {
    let p = table.space().p();
    let dim = table.space().dim();
    let max_r = params.max_dim.min(dim);
    if params.max_dim == 0 {
        return Err(Error::Invalid("search needs max_dim >= 1".into()));
    }
    let mut runner = Runner {
        l,
        table,
        v,
        ctx,
        rows: Vec::new(),
        seen: HashSet::new(),
        remaining: params.budget,
    };
    let mut complete = true;
    let mut fallback_dims: Vec<usize> = Vec::new();
    for r in 1..=max_r {
        let count = gaussian_binomial(dim, r, p);
        match params.strategy {
            Strategy::Exhaustive => runner.exhaustive(r, true)?,
            Strategy::Auto => {
                if count <= runner.remaining {
                    runner.exhaustive(r, false)?;
                } else {
                    complete = false;
                    fallback_dims.push(r);
                }
            }
            Strategy::Greedy | Strategy::Random => {
                let _ = count;
                complete = false;
                fallback_dims.push(r);
            }
        }
    }
    if let Some(&deepest) = fallback_dims.last() {
        if params.strategy != Strategy::Random {
            runner.greedy(deepest, params.seed)?;
        }
        if params.strategy != Strategy::Greedy {
            for &r in &fallback_dims {
                runner.random(r, params.seed)?;
            }
        }
    }
    let evaluated = params.budget - runner.remaining;
    let rows = runner.rows;

    // Coverage sanity: an exhaustive pass must have evaluated every subspace.
    if params.strategy == Strategy::Exhaustive {
        let expected: u128 = (1..=max_r).map(|r| gaussian_binomial(dim, r, p)).sum();
        if (rows.len() as u128) != expected {
            return Err(Error::Internal(format!(
                "exhaustive search produced {} rows, expected {expected}",
                rows.len()
            )));
        }
    }

    let mut order: Vec<usize> = (0..rows.len()).collect();
    order.sort_by_key(|&i| target_key(&rows[i]));
    let emitted: Vec<usize> = order.iter().copied().take(EMIT_CAP).collect();
    let pareto = pareto_indices(&rows);
    Ok(SearchOutcome {
        rows,
        emitted,
        pareto,
        evaluated,
        complete,
        strategy_used: match params.strategy {
            Strategy::Auto => {
                if complete {
                    "exhaustive"
                } else {
                    "auto"
                }
            }
            Strategy::Exhaustive => "exhaustive",
            Strategy::Greedy => "greedy",
            Strategy::Random => "random",
        },
    })
}

/// Rows not dominated by any other: maximal points among genus <= g, walked
/// in increasing genus.
fn pareto_indices(rows: &[SearchRow]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..rows.len()).collect();
    order.sort_by_key(|&i| {
        (
            rows[i].genus,
            -rows[i].points,
            rows[i].r,
            rows[i].basis.clone(),
        )
    });
    let mut out = Vec::new();
    let mut best = i64::MIN;
    for &i in &order {
        if rows[i].points > best {
            out.push(i);
            best = rows[i].points;
        }
    }
    out
}
