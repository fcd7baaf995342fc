//! Report assembly and emission.
//!
//! Every command produces one [`Report`]: provenance (config hash, tool
//! version, seed), the resolved curve/divisor header, and a command-specific
//! payload.  JSON output is schema-stable and byte-deterministic for a given
//! config and seed; CSV is defined for the tabular commands; the table format
//! is for reading at a terminal.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use asforge_core::cover::{FibreStats, LineTable, ZetaReport};
use asforge_core::curve::CurveKind;
use asforge_core::error::{Error, Result};
use asforge_core::local::{LocalASType, SplitKind};
use asforge_core::rrspace::LSpace;

use crate::config::Job;
use crate::oracle::OracleOutcome;
use crate::search::SearchOutcome;

#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub tool: &'static str,
    pub version: &'static str,
    pub config_sha256: String,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CurveInfo {
    pub p: u8,
    pub m: usize,
    pub q: u128,
    pub kind: String,
    pub h: Option<String>,
    pub genus: i64,
    pub rational_points: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct DivisorInfo {
    pub place: String,
    pub degree: usize,
    pub multiplicity: i64,
}

#[derive(Debug, Clone, Serialize)]
pub struct JobInfo {
    pub divisor: Vec<DivisorInfo>,
    pub divisor_degree: i64,
    pub delta: usize,
    pub split_targets: usize,
    /// Whether the split targets were listed explicitly instead of taking
    /// every rational place outside the support.
    pub explicit_splitting: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct PlaceClassInfo {
    pub place: String,
    pub degree: usize,
    pub kind: String,
    /// Reduced pole order at a ramified place.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub order: Option<u64>,
    /// Reduced value at an unramified place.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct LineInfo {
    pub index: usize,
    pub rep: Vec<u8>,
    pub f: String,
    pub genus: i64,
    pub points: i64,
    pub epsilon: i64,
    pub splits_all: bool,
    pub vstar: Vec<PlaceClassInfo>,
}

#[derive(Debug, Clone, Serialize)]
pub struct FibreInfo {
    pub r: usize,
    pub basis: Vec<String>,
    pub genus: i64,
    pub points: i64,
    pub tau: i64,
    pub weil_ok: bool,
    pub lines: Vec<LineInfo>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SearchRowInfo {
    pub r: usize,
    pub lines: Vec<usize>,
    pub basis: Vec<String>,
    pub genus: i64,
    pub points: i64,
    pub tau: i64,
    pub weil_ok: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ComponentCheckInfo {
    pub f: String,
    pub direct_points: i64,
    pub table_points: i64,
}

#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum Payload {
    Lspace {
        dim: usize,
        fp_dim: usize,
        basis: Vec<String>,
    },
    Solve {
        dim_l: usize,
        fp_dim_l: usize,
        dim_v: usize,
        dim_wtilde: usize,
        dim_f_sol: usize,
        wtilde_basis: Vec<String>,
        f_sol_basis: Vec<String>,
    },
    Analyze {
        fibre: FibreInfo,
    },
    Search {
        strategy: String,
        budget: u128,
        evaluated: u128,
        complete: bool,
        rows: Vec<SearchRowInfo>,
        pareto: Vec<SearchRowInfo>,
    },
    Verify {
        r: usize,
        basis: Vec<String>,
        affine_points: usize,
        split_contribution: i64,
        boundary_contribution: i64,
        oracle_total: i64,
        analytic_total: i64,
        components: Vec<ComponentCheckInfo>,
        consistent: bool,
    },
    Zeta {
        genus: i64,
        q: u128,
        component: Option<String>,
        counts: Vec<i64>,
        numerator: Option<Vec<i128>>,
    },
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: &'static str,
    pub provenance: Provenance,
    pub curve: CurveInfo,
    pub job: JobInfo,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub annotations: Vec<String>,
    #[serde(flatten)]
    pub payload: Payload,
}

pub fn provenance(job: &Job, seed: Option<u64>) -> Provenance {
    Provenance {
        tool: "asforge",
        version: env!("CARGO_PKG_VERSION"),
        config_sha256: job.config_sha256.clone(),
        seed,
    }
}

pub fn curve_info(job: &Job) -> CurveInfo {
    let curve = &job.curve;
    let field = curve.field();
    CurveInfo {
        p: field.p(),
        m: field.degree(),
        q: field.order(),
        kind: match curve.kind() {
            CurveKind::Rational => "rational".into(),
            CurveKind::ArtinSchreier { .. } => "artin_schreier".into(),
        },
        h: curve.h().map(|h| h.render("x")),
        genus: curve.genus(),
        rational_points: job.ctx.n(),
    }
}

pub fn job_info(job: &Job) -> JobInfo {
    let (d, ctx) = (&job.divisor, &job.ctx);
    JobInfo {
        divisor: d
            .entries()
            .iter()
            .map(|(place, n)| DivisorInfo {
                place: place.name(),
                degree: place.degree(),
                multiplicity: *n,
            })
            .collect(),
        divisor_degree: d.degree(),
        delta: ctx.delta,
        split_targets: ctx.split_targets.len(),
        explicit_splitting: job.explicit_split,
    }
}

pub fn line_info(table: &LineTable, index: usize) -> LineInfo {
    let rep = &table.reports()[index];
    LineInfo {
        index,
        rep: rep.rep.clone(),
        f: rep.f.render(),
        genus: rep.genus,
        points: rep.points,
        epsilon: rep.epsilon,
        splits_all: rep.splits_all,
        vstar: rep
            .support
            .iter()
            .map(|c| PlaceClassInfo {
                place: c.place.name(),
                degree: c.place.degree(),
                kind: match c.kind {
                    SplitKind::TotallyRamified => "ramified".into(),
                    SplitKind::Split => "split".into(),
                    SplitKind::Inert => "inert".into(),
                },
                order: match &c.local_type {
                    LocalASType::Ramified { m } => Some(*m),
                    LocalASType::Unramified { .. } => None,
                },
                value: match &c.local_type {
                    LocalASType::Ramified { .. } => None,
                    LocalASType::Unramified { value } => Some(value.render("a")),
                },
            })
            .collect(),
    }
}

pub fn fibre_info(l: &LSpace, table: &LineTable, stats: &FibreStats) -> FibreInfo {
    let q = l.curve().field().order();
    FibreInfo {
        r: stats.r,
        basis: basis_exprs(l, table, &stats.basis),
        genus: stats.genus,
        points: stats.points,
        tau: stats.tau,
        weil_ok: asforge_core::cover::weil_check(stats.genus, stats.points, q),
        lines: stats.lines.iter().map(|&i| line_info(table, i)).collect(),
    }
}

/// Render family basis vectors (coordinates in the table space) as functions.
pub fn basis_exprs(l: &LSpace, table: &LineTable, rows: &[Vec<u8>]) -> Vec<String> {
    rows.iter()
        .map(|row| l.elt_from_fp_coords(&ambient_coords(table, row)).render())
        .collect()
}

/// Lift table-space coordinates to L(D) coordinates.
pub fn ambient_coords(table: &LineTable, row: &[u8]) -> Vec<u8> {
    let space = table.space();
    let p = space.p() as u16;
    let mut acc = vec![0u8; space.ambient()];
    for (c, basis_row) in row.iter().zip(space.basis()) {
        if *c == 0 {
            continue;
        }
        for (t, &b) in basis_row.iter().enumerate() {
            acc[t] = ((acc[t] as u16 + *c as u16 * b as u16) % p) as u8;
        }
    }
    acc
}

pub fn search_row_info(l: &LSpace, table: &LineTable, row: &crate::search::SearchRow) -> SearchRowInfo {
    let q = l.curve().field().order();
    SearchRowInfo {
        r: row.r,
        lines: row.lines.clone(),
        basis: basis_exprs(l, table, &row.basis),
        genus: row.genus,
        points: row.points,
        tau: row.tau,
        weil_ok: asforge_core::cover::weil_check(row.genus, row.points, q),
    }
}

pub fn search_payload(
    l: &LSpace,
    table: &LineTable,
    outcome: &SearchOutcome,
    budget: u128,
) -> Payload {
    Payload::Search {
        strategy: outcome.strategy_used.to_string(),
        budget,
        evaluated: outcome.evaluated,
        complete: outcome.complete,
        rows: outcome
            .emitted
            .iter()
            .map(|&i| search_row_info(l, table, &outcome.rows[i]))
            .collect(),
        pareto: outcome
            .pareto
            .iter()
            .map(|&i| search_row_info(l, table, &outcome.rows[i]))
            .collect(),
    }
}

pub fn verify_payload(l: &LSpace, table: &LineTable, out: &OracleOutcome) -> Payload {
    Payload::Verify {
        r: out.r,
        basis: basis_exprs(l, table, &out.basis),
        affine_points: out.affine_points,
        split_contribution: out.split_contribution,
        boundary_contribution: out.boundary_contribution,
        oracle_total: out.oracle_total,
        analytic_total: out.analytic_total,
        components: out
            .components
            .iter()
            .map(|c| ComponentCheckInfo {
                f: c.f.clone(),
                direct_points: c.direct_points,
                table_points: c.table_points,
            })
            .collect(),
        consistent: out.oracle_total == out.analytic_total,
    }
}

pub fn zeta_payload(z: &ZetaReport, component: Option<String>) -> Payload {
    Payload::Zeta {
        genus: z.genus,
        q: z.q,
        component,
        counts: z.counts.clone(),
        numerator: z.numerator.clone(),
    }
}

// ---------------------------------------------------------------------------
// Emission
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Table,
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Format> {
        match s {
            "table" => Ok(Format::Table),
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::Invalid(format!("unknown format '{other}'"))),
        }
    }
}

pub fn emit(report: &Report, format: Format, out: Option<&Path>) -> Result<()> {
    let text = match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report)
                .map_err(|e| Error::Internal(format!("serialization failed: {e}")))?;
            s.push('\n');
            s
        }
        Format::Csv => render_csv(report)?,
        Format::Table => render_table(report),
    };
    match out {
        None => {
            print!("{text}");
            Ok(())
        }
        Some(path) => {
            let mut f = std::fs::File::create(path)
                .map_err(|e| Error::Invalid(format!("cannot write {}: {e}", path.display())))?;
            f.write_all(text.as_bytes())
                .map_err(|e| Error::Invalid(format!("cannot write {}: {e}", path.display())))?;
            Ok(())
        }
    }
}

fn csv_quote(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn csv_rows(rows: &[SearchRowInfo]) -> String {
    let mut out = String::from("r,basis,genus,points,weil_ok\n");
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            row.r,
            csv_quote(&row.basis.join("; ")),
            row.genus,
            row.points,
            row.weil_ok
        ));
    }
    out
}

fn render_csv(report: &Report) -> Result<String> {
    match &report.payload {
        Payload::Search { rows, .. } => Ok(csv_rows(rows)),
        Payload::Analyze { fibre } => {
            let row = SearchRowInfo {
                r: fibre.r,
                lines: Vec::new(),
                basis: fibre.basis.clone(),
                genus: fibre.genus,
                points: fibre.points,
                tau: fibre.tau,
                weil_ok: fibre.weil_ok,
            };
            Ok(csv_rows(std::slice::from_ref(&row)))
        }
        _ => Err(Error::Invalid(format!(
            "csv output is not defined for the {} command",
            report.command
        ))),
    }
}

fn aligned(header: &[&str], rows: &[Vec<String>]) -> String {
    let cols = header.len();
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for row in rows {
        for (i, cell) in row.iter().enumerate() {
            widths[i] = widths[i].max(cell.len());
        }
    }
    let fmt_row = |cells: &[String]| -> String {
        let mut line = String::new();
        for i in 0..cols {
            if i > 0 {
                line.push_str("  ");
            }
            let cell = cells.get(i).map(String::as_str).unwrap_or("");
            line.push_str(&format!("{:width$}", cell, width = widths[i]));
        }
        line.trim_end().to_string() + "\n"
    };
    let mut out = fmt_row(&header.iter().map(|s| s.to_string()).collect::<Vec<_>>());
    out.push_str(&format!(
        "{}\n",
        "-".repeat(widths.iter().sum::<usize>() + 2 * (cols - 1))
    ));
    for row in rows {
        out.push_str(&fmt_row(row));
    }
    out
}

fn header_lines(report: &Report) -> String {
    let c = &report.curve;
    let mut s = format!(
        "curve: {} over F_{}{}, genus {}, {} rational points\n",
        c.h
            .as_deref()
            .map(|h| format!("y^{} - y = {}", c.p, h))
            .unwrap_or_else(|| "P^1".into()),
        c.q,
        if c.m > 1 { " (non-prime)" } else { "" },
        c.genus,
        c.rational_points
    );
    let d = report
        .job
        .divisor
        .iter()
        .map(|e| format!("{}*{}", e.multiplicity, e.place))
        .collect::<Vec<_>>()
        .join(" + ");
    s.push_str(&format!(
        "divisor: {} (degree {}), {} split targets\n",
        d, report.job.divisor_degree, report.job.split_targets
    ));
    for a in &report.annotations {
        s.push_str(&format!("note: {a}\n"));
    }
    s
}

fn fibre_table(fibre: &FibreInfo) -> String {
    let rows: Vec<Vec<String>> = fibre
        .lines
        .iter()
        .map(|line| {
            vec![
                line.f.clone(),
                line.genus.to_string(),
                line.points.to_string(),
                line.epsilon.to_string(),
                line.vstar
                    .iter()
                    .map(|v| match (&v.order, &v.value) {
                        (Some(m), _) => format!("{} m={}", v.place, m),
                        (None, Some(val)) => format!("{} {}={}", v.place, v.kind, val),
                        _ => v.place.clone(),
                    })
                    .collect::<Vec<_>>()
                    .join("; "),
            ]
        })
        .collect();
    let mut s = aligned(&["f", "g", "N", "eps", "at support"], &rows);
    s.push_str(&format!(
        "\nfibre product: r = {}, genus = {}, points = {}, tau = {}\n",
        fibre.r, fibre.genus, fibre.points, fibre.tau
    ));
    s
}

fn render_table(report: &Report) -> String {
    let mut s = header_lines(report);
    s.push('\n');
    match &report.payload {
        Payload::Lspace { dim, fp_dim, basis } => {
            s.push_str(&format!(
                "Riemann-Roch space: dimension {dim} over the constant field ({fp_dim} over the prime field)\n"
            ));
            for (i, b) in basis.iter().enumerate() {
                s.push_str(&format!("  b{} = {}\n", i + 1, b));
            }
        }
        Payload::Solve {
            dim_l,
            fp_dim_l,
            dim_v,
            dim_wtilde,
            dim_f_sol,
            wtilde_basis,
            f_sol_basis,
        } => {
            s.push_str(&format!(
                "dims: L(D) = {dim_l} ({fp_dim_l} over F_p), V = {dim_v}, W~ = {dim_wtilde}, F_sol = {dim_f_sol}\n\n"
            ));
            s.push_str("W~ basis:\n");
            for b in wtilde_basis {
                s.push_str(&format!("  {b}\n"));
            }
            s.push_str("F_sol basis:\n");
            for b in f_sol_basis {
                s.push_str(&format!("  {b}\n"));
            }
        }
        Payload::Analyze { fibre } => {
            s.push_str(&format!("family: {}\n\n", fibre.basis.join(",  ")));
            s.push_str(&fibre_table(fibre));
        }
        Payload::Search {
            strategy,
            evaluated,
            complete,
            rows,
            pareto,
            ..
        } => {
            s.push_str(&format!(
                "search: strategy {strategy}, {evaluated} subspaces evaluated, {}\n\n",
                if *complete { "complete" } else { "partial" }
            ));
            let to_rows = |list: &[SearchRowInfo]| {
                list.iter()
                    .map(|row| {
                        vec![
                            row.r.to_string(),
                            row.basis.join(", "),
                            row.genus.to_string(),
                            row.points.to_string(),
                        ]
                    })
                    .collect::<Vec<_>>()
            };
            s.push_str(&aligned(&["r", "basis", "g", "N"], &to_rows(rows)));
            s.push_str("\npareto frontier (max points per genus):\n");
            s.push_str(&aligned(&["r", "basis", "g", "N"], &to_rows(pareto)));
        }
        Payload::Verify {
            affine_points,
            split_contribution,
            boundary_contribution,
            oracle_total,
            analytic_total,
            components,
            consistent,
            ..
        } => {
            s.push_str(&format!(
                "oracle: {affine_points} affine points found by direct enumeration\n"
            ));
            s.push_str(&format!(
                "split contribution {split_contribution} + boundary {boundary_contribution} = {oracle_total}\n"
            ));
            s.push_str(&format!("analytic count: {analytic_total}\n"));
            let rows: Vec<Vec<String>> = components
                .iter()
                .map(|c| {
                    vec![
                        c.f.clone(),
                        c.direct_points.to_string(),
                        c.table_points.to_string(),
                    ]
                })
                .collect();
            s.push_str(&aligned(&["component", "direct", "analytic"], &rows));
            s.push_str(&format!(
                "\nverdict: {}\n",
                if *consistent { "consistent" } else { "MISMATCH" }
            ));
        }
        Payload::Zeta {
            genus,
            q,
            component,
            counts,
            numerator,
        } => {
            if let Some(f) = component {
                s.push_str(&format!("component: z^p - z = {f}\n"));
            }
            s.push_str(&format!("genus {genus} over F_{q}\n"));
            for (i, n) in counts.iter().enumerate() {
                s.push_str(&format!("  N_{} = {}\n", i + 1, n));
            }
            match numerator {
                Some(a) => {
                    let poly = a
                        .iter()
                        .enumerate()
                        .filter(|(_, &c)| c != 0)
                        .map(|(i, c)| match i {
                            0 => format!("{c}"),
                            1 => format!("{c}*T"),
                            _ => format!("{c}*T^{i}"),
                        })
                        .collect::<Vec<_>>()
                        .join(" + ");
                    s.push_str(&format!("zeta numerator: {poly}\n"));
                }
                None => s.push_str("zeta numerator: not fitted (needs counts up to 2g)\n"),
            }
        }
    }
    s
}
