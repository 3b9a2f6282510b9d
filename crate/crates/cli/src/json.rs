//! The stable JSON output format.
//!
//! Every document is a single object with keys in sorted order, floats
//! printed with 17 significant digits (`{:.16e}`), and entries listed in the
//! canonical outcome order, so identical inputs produce byte-identical
//! bytes. The envelope is
//!
//! ```text
//! {"version":1, "kind":"distribution|histogram|ditstream|gate_report|element|error",
//!  "seed":..., "truncation":..., "entries":[{"outcome":[...],
//!  "probability":...|"count":...}], "residual":...}
//! ```
//!
//! with kind-specific keys documented per constructor below.

use std::fmt::Write as _;

use fockrail_core::klm::GateReport;
use fockrail_core::measure::{Histogram, OutcomeDistribution};
use num_complex::Complex64;

use crate::error::ProgramError;

/// 17 significant digits, sign-normalized zero.
fn fmt_float(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.16e}")
}

fn fmt_outcome(counts: &[u32]) -> String {
    let inner: Vec<String> = counts.iter().map(u32::to_string).collect();
    format!("[{}]", inner.join(","))
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            c if (c as u32) < 0x20 => {
                let _ = write!(out, "\\u{:04x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out
}

/// `{"entries":[{"outcome":...,"probability":...}],"kind":"distribution",
///  "residual":...,"seed":null,"truncation":...,"version":1}`
pub fn distribution(dist: &OutcomeDistribution, truncation: u32) -> String {
    let mut entries = String::new();
    for (i, (occ, p)) in dist.sorted_entries().iter().enumerate() {
        if i > 0 {
            entries.push(',');
        }
        let _ = write!(
            entries,
            "{{\"outcome\":{},\"probability\":{}}}",
            fmt_outcome(occ.counts()),
            fmt_float(*p)
        );
    }
    format!(
        "{{\"entries\":[{entries}],\"kind\":\"distribution\",\"residual\":{},\"seed\":null,\"truncation\":{truncation},\"version\":1}}",
        fmt_float(dist.residual())
    )
}

/// `{"arity":...?,"discarded":...,"entries":[{"count":...,"outcome":...}],
///  "kind":"histogram"|"ditstream","overflow":...,"residual":...,
///  "seed":...,"shots":...,"truncation":...,"version":1}`
pub fn histogram(
    hist: &Histogram,
    kind: &str,
    arity: Option<usize>,
    discarded: u64,
    residual: f64,
    seed: u64,
    truncation: u32,
) -> String {
    let mut entries = String::new();
    for (i, (occ, n)) in hist.sorted_counts().iter().enumerate() {
        if i > 0 {
            entries.push(',');
        }
        let _ = write!(
            entries,
            "{{\"count\":{n},\"outcome\":{}}}",
            fmt_outcome(occ.counts())
        );
    }
    let arity = match arity {
        Some(d) => format!("\"arity\":{d},"),
        None => String::new(),
    };
    format!(
        "{{{arity}\"discarded\":{discarded},\"entries\":[{entries}],\"kind\":\"{kind}\",\"overflow\":{},\"residual\":{},\"seed\":{seed},\"shots\":{},\"truncation\":{truncation},\"version\":1}}",
        hist.overflow(),
        fmt_float(residual),
        hist.shots()
    )
}

/// `{"im":...,"kind":"element","modulus_squared":...,"re":...,"version":1}`
pub fn element(amp: Complex64) -> String {
    format!(
        "{{\"im\":{},\"kind\":\"element\",\"modulus_squared\":{},\"re\":{},\"version\":1}}",
        fmt_float(amp.im),
        fmt_float(amp.norm_sqr()),
        fmt_float(amp.re)
    )
}

/// `{"coefficients":[{"im":...,"m":...,"re":...}],"kind":"gate_report",
///  "max_deviation":...,"success_probability":...,"version":1}`
pub fn gate_report(report: &GateReport) -> String {
    let mut coeffs = String::new();
    for (m, c) in report.coefficients.iter().enumerate() {
        if m > 0 {
            coeffs.push(',');
        }
        let _ = write!(
            coeffs,
            "{{\"im\":{},\"m\":{m},\"re\":{}}}",
            fmt_float(c.im),
            fmt_float(c.re)
        );
    }
    format!(
        "{{\"coefficients\":[{coeffs}],\"kind\":\"gate_report\",\"max_deviation\":{},\"success_probability\":{},\"version\":1}}",
        fmt_float(report.max_deviation),
        fmt_float(report.success_probability)
    )
}

/// `{"class":...,"column":...,"kind":"error","line":...,"message":...,
///  "version":1}`
pub fn error(err: &ProgramError) -> String {
    let line = err.line.map_or("null".to_string(), |l| l.to_string());
    let column = err.column.map_or("null".to_string(), |c| c.to_string());
    format!(
        "{{\"class\":\"{}\",\"column\":{column},\"kind\":\"error\",\"line\":{line},\"message\":\"{}\",\"version\":1}}",
        err.class.name(),
        escape(&err.message)
    )
}
