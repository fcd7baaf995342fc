//! One function per subcommand, each producing a [`Report`].

use asforge_core::cover::{analyze_line, fibre_stats, line_table, zeta_small, LineTable};
use asforge_core::error::{Error, Result};
use asforge_core::expr::parse_func;
use asforge_core::fplin::{gaussian_binomial, FpSubspace};
use asforge_core::rrspace::{
    build_wtilde, lspace_basis, pglobal_image, satisfies_trace_conditions, trace_system,
    verify_condition_i, LSpace, WTilde,
};

use crate::config::Job;
use crate::oracle;
use crate::report::{
    self, fibre_info, zeta_payload, Payload, Report,
};
use crate::search::{run_search, SearchParams, Strategy};

/// The trace system solved against the job's own splitting context (which
/// may be an explicit subset of the rational places).
pub struct Solved {
    pub l: LSpace,
    pub v: FpSubspace,
    pub wt: WTilde,
    pub f_sol: FpSubspace,
}

pub fn solve_job(job: &Job) -> Result<Solved> {
    let p = job.curve.field().p() as i64;
    let l = lspace_basis(&job.curve, &job.divisor)?;
    let lsmall = lspace_basis(&job.curve, &job.divisor.floor_div(p))?;
    let v = pglobal_image(&l, &lsmall)?;
    let wt = build_wtilde(&l, &v)?;
    let f_sol = trace_system(&l, &wt, &job.ctx)?;
    if !verify_condition_i(&f_sol, &v) {
        return Err(Error::ConditionIViolated(
            "the solution space meets the p-power image; with an explicit \
             splitting set, add more split targets to cut it down"
                .into(),
        ));
    }
    Ok(Solved { l, v, wt, f_sol })
}

fn render_rows(l: &LSpace, rows: &[Vec<u8>]) -> Vec<String> {
    rows.iter()
        .map(|row| l.elt_from_fp_coords(row).render())
        .collect()
}

fn base_report(job: &Job, command: &'static str, seed: Option<u64>, payload: Payload) -> Report {
    Report {
        command,
        provenance: report::provenance(job, seed),
        curve: report::curve_info(job),
        job: report::job_info(job),
        annotations: job.config.annotations.clone(),
        payload,
    }
}

pub fn cmd_lspace(job: &Job) -> Result<Report> {
    let l = lspace_basis(&job.curve, &job.divisor)?;
    let payload = Payload::Lspace {
        dim: l.dim(),
        fp_dim: l.fp_dim(),
        basis: l.basis().iter().map(|f| f.render()).collect(),
    };
    Ok(base_report(job, "lspace", None, payload))
}

pub fn cmd_solve(job: &Job) -> Result<Report> {
    let s = solve_job(job)?;
    let payload = Payload::Solve {
        dim_l: s.l.dim(),
        fp_dim_l: s.l.fp_dim(),
        dim_v: s.v.dim(),
        dim_wtilde: s.wt.wtilde.dim(),
        dim_f_sol: s.f_sol.dim(),
        wtilde_basis: render_rows(&s.l, s.wt.wtilde.basis()),
        f_sol_basis: render_rows(&s.l, s.f_sol.basis()),
    };
    Ok(base_report(job, "solve", None, payload))
}

/// Parse family expressions, place them in L(D), and build their line table.
fn family_table(
    job: &Job,
    l: &LSpace,
    exprs: &[String],
    force: bool,
) -> Result<(LineTable, Vec<Vec<u8>>)> {
    if exprs.is_empty() {
        return Err(Error::Invalid("the family basis is empty".into()));
    }
    let p = job.curve.field().p();
    let mut rows: Vec<Vec<u8>> = Vec::new();
    for expr in exprs {
        let f = parse_func(&job.curve, expr)?;
        let coords = l.fp_coords(&f).ok_or_else(|| {
            Error::Invalid(format!(
                "'{expr}' does not lie in the Riemann-Roch space of the divisor"
            ))
        })?;
        if !force && !satisfies_trace_conditions(l, &f, &job.ctx)? {
            return Err(Error::Invalid(format!(
                "'{expr}' violates a trace condition at a designated split place \
                 (pass --force to analyze it anyway)"
            )));
        }
        rows.push(coords);
    }
    let family = FpSubspace::from_vectors(p, l.fp_dim(), &rows);
    if family.dim() != rows.len() {
        return Err(Error::Invalid(
            "the given functions are linearly dependent over the prime field".into(),
        ));
    }
    let table = line_table(l, &family, &job.divisor, &job.ctx)?;
    let sub_rows: Vec<Vec<u8>> = rows
        .iter()
        .map(|row| {
            table
                .space()
                .coordinates_of(row)
                .expect("basis rows lie in their own span")
        })
        .collect();
    Ok((table, sub_rows))
}

pub fn cmd_analyze(job: &Job, exprs: &[String], force: bool) -> Result<Report> {
    let p = job.curve.field().p() as i64;
    let l = lspace_basis(&job.curve, &job.divisor)?;
    let lsmall = lspace_basis(&job.curve, &job.divisor.floor_div(p))?;
    let v = pglobal_image(&l, &lsmall)?;
    let (table, sub_rows) = family_table(job, &l, exprs, force)?;
    let stats = fibre_stats(&l, &table, &sub_rows, &job.ctx, &v)?;
    let payload = Payload::Analyze {
        fibre: fibre_info(&l, &table, &stats),
    };
    Ok(base_report(job, "analyze", None, payload))
}

pub struct SearchOverrides {
    pub max_dim: Option<usize>,
    pub budget: Option<u64>,
    pub strategy: Option<String>,
    pub seed: Option<u64>,
}

pub fn cmd_search(job: &Job, over: &SearchOverrides) -> Result<Report> {
    let cfg = &job.config.search;
    let params = SearchParams {
        max_dim: over.max_dim.or(cfg.max_dim).unwrap_or(2),
        budget: over.budget.map(u128::from).or(cfg.budget).unwrap_or(1_000_000),
        strategy: match over.strategy.as_deref().or(cfg.strategy.as_deref()) {
            None => Strategy::Auto,
            Some(s) => Strategy::parse(s)?,
        },
        seed: over.seed.or(cfg.seed).unwrap_or(0),
    };
    let s = solve_job(job)?;
    let p = job.curve.field().p();
    let nlines = gaussian_binomial(s.f_sol.dim(), 1, p);
    if nlines > params.budget {
        return Err(Error::BudgetExceeded(format!(
            "the line table over the {}-dimensional solution space needs {nlines} \
             covers, beyond the budget {}",
            s.f_sol.dim(),
            params.budget
        )));
    }
    let table = line_table(&s.l, &s.f_sol, &job.divisor, &job.ctx)?;
    let outcome = run_search(&s.l, &table, &s.v, &job.ctx, &params)?;
    let payload = report::search_payload(&s.l, &table, &outcome, params.budget);
    Ok(base_report(job, "search", Some(params.seed), payload))
}

pub fn cmd_verify(job: &Job, basis: Option<&[String]>) -> Result<Report> {
    let p = job.curve.field().p() as i64;
    let l = lspace_basis(&job.curve, &job.divisor)?;
    let lsmall = lspace_basis(&job.curve, &job.divisor.floor_div(p))?;
    let v = pglobal_image(&l, &lsmall)?;
    let (table, sub_rows) = match basis {
        Some(exprs) => family_table(job, &l, exprs, false)?,
        None => {
            // Default family: the full solution space of the trace system.
            let wt = build_wtilde(&l, &v)?;
            let f_sol = trace_system(&l, &wt, &job.ctx)?;
            if !verify_condition_i(&f_sol, &v) {
                return Err(Error::ConditionIViolated(
                    "the solution space meets the p-power image".into(),
                ));
            }
            let table = line_table(&l, &f_sol, &job.divisor, &job.ctx)?;
            let dim = table.space().dim();
            let rows: Vec<Vec<u8>> = (0..dim)
                .map(|i| {
                    let mut row = vec![0u8; dim];
                    row[i] = 1;
                    row
                })
                .collect();
            (table, rows)
        }
    };
    let stats = fibre_stats(&l, &table, &sub_rows, &job.ctx, &v)?;
    let out = oracle::verify_fibre(&l, &table, &stats, &job.divisor, &job.ctx)?;
    let payload = report::verify_payload(&l, &table, &out);
    Ok(base_report(job, "verify", None, payload))
}

pub fn cmd_zeta(job: &Job, component: Option<&String>) -> Result<Report> {
    let curve = &job.curve;
    let q = curve.field().order();
    // Extension fields stay enumerable only while q^s is small.
    let mut s_cap = 0usize;
    let mut acc: u128 = 1;
    while let Some(next) = acc.checked_mul(q).filter(|&v| v <= (1 << 22)) {
        acc = next;
        s_cap += 1;
    }
    if s_cap == 0 {
        return Err(Error::SizeGuard(q));
    }
    let (z, label) = match component {
        None => {
            let g = curve.genus();
            let s_max = (2 * g.max(0) as usize).max(1).min(s_cap);
            (zeta_small(curve, None, g, s_max)?, None)
        }
        Some(expr) => {
            let f = parse_func(curve, expr)?;
            let rep = analyze_line(curve, &f, &job.divisor, &job.ctx)?;
            let s_max = (2 * rep.genus.max(0) as usize).max(1).min(s_cap);
            (
                zeta_small(curve, Some(&f), rep.genus, s_max)?,
                Some(rep.f.render()),
            )
        }
    };
    Ok(base_report(job, "zeta", None, zeta_payload(&z, label)))
}
