use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{invalid, Error, Result};

pub const CSV_HEADER: &str = "n,k,t,order,approx,reference,abs_error";

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReportRow {
    pub n: usize,
    pub k: usize,
    pub t: f64,
    pub order: usize,
    pub approx: f64,
    pub reference: f64,
    pub abs_error: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckOutcome {
    pub fn new(name: &str, passed: bool, detail: impl Into<String>) -> Self {
        Self { name: name.to_string(), passed, detail: detail.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportMetadata {
    pub pipeline: String,
    pub version: String,
    pub config_hash: String,
}

impl ReportMetadata {
    pub fn new(pipeline: &str, config_hash: String) -> Self {
        Self { pipeline: pipeline.to_string(), version: env!("CARGO_PKG_VERSION").to_string(), config_hash }
    }
}

/// Rows ordered by `(n, t, order)` plus the outcome of every configured check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub metadata: ReportMetadata,
    pub rows: Vec<ReportRow>,
    pub checks: Vec<CheckOutcome>,
}

impl ConvergenceReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn rows_for(&self, n: usize, t: f64) -> impl Iterator<Item = &ReportRow> {
        self.rows.iter().filter(move |r| r.n == n && r.t == t)
    }

    /// Largest absolute error at `(n, t)` over orders `1..=max_order`.
    pub fn max_error(&self, n: usize, t: f64, max_order: usize) -> f64 {
        self.rows_for(n, t)
            .filter(|r| r.order >= 1 && r.order <= max_order)
            .map(|r| r.abs_error)
            .fold(0.0, f64::max)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                r.n,
                r.k,
                format_g15(r.t),
                r.order,
                format_g15(r.approx),
                format_g15(r.reference),
                format_g15(r.abs_error)
            )
            .unwrap();
        }
        out
    }
}

/// `%.15g`: 15 significant digits, trailing zeros dropped, exponent form
/// outside `1e-5 ≤ |x| < 1e15`.
pub fn format_g15(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{x:.14e}");
    let (mantissa, exp) = sci.split_once('e').unwrap();
    let exp: i32 = exp.parse().unwrap();
    if (-5..15).contains(&exp) {
        let decimals = (14 - exp) as usize;
        strip_zeros(&format!("{x:.decimals$}")).to_string()
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", strip_zeros(mantissa), exp.abs())
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Reads rows written by [`ConvergenceReport::to_csv`].
pub fn parse_csv(text: &str) -> Result<Vec<ReportRow>> {
    let mut lines = text.lines();
    if lines.next() != Some(CSV_HEADER) {
        return Err(invalid("missing CSV header"));
    }
    lines
        .map(|line| {
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 7 {
                return Err(invalid(format!("bad CSV row: {line}")));
            }
            let int = |s: &str| s.parse::<usize>().map_err(|e| invalid(format!("{s}: {e}")));
            let real = |s: &str| s.parse::<f64>().map_err(|e| invalid(format!("{s}: {e}")));
            Ok(ReportRow {
                n: int(f[0])?,
                k: int(f[1])?,
                t: real(f[2])?,
                order: int(f[3])?,
                approx: real(f[4])?,
                reference: real(f[5])?,
                abs_error: real(f[6])?,
            })
        })
        .collect()
}

#[derive(Serialize)]
struct Sidecar<'a, C: Serialize> {
    metadata: &'a ReportMetadata,
    config: &'a C,
    rows: usize,
    passed: bool,
    checks: &'a [CheckOutcome],
}

/// Writes `path` (CSV) and `path` with extension `json` (config echo and
/// check summary). Returns both paths.
pub fn emit_report<C: Serialize>(report: &ConvergenceReport, config: &C, path: &Path) -> Result<(PathBuf, PathBuf)> {
    let io = |p: &Path| {
        let p = p.to_path_buf();
        move |source| Error::Io { path: p, source }
    };
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(io(dir))?;
    }
    std::fs::write(path, report.to_csv()).map_err(io(path))?;
    let sidecar = Sidecar {
        metadata: &report.metadata,
        config,
        rows: report.rows.len(),
        passed: report.passed(),
        checks: &report.checks,
    };
    let json_path = path.with_extension("json");
    let mut json = serde_json::to_string_pretty(&sidecar).expect("report serializes");
    json.push('\n');
    std::fs::write(&json_path, json).map_err(io(&json_path))?;
    Ok((path.to_path_buf(), json_path))
}
