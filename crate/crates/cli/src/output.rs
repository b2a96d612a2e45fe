//! Deterministic CSV and JSON writers for time series and tables.
//!
//! CSV layout: `#`-prefixed key=value header lines (resolved config, version,
//! run health), one `# columns:` line, then one row per time sample with `t`
//! first and a fixed (mean, var) pair order per observable. Positions are
//! reported in x_zpt units and momenta in p_zpt units; identical inputs
//! produce byte-identical files.

use std::fmt::Write as _;

use anyhow::Result;
use dirac_qnd::hilbert::{P_ZPT, X_ZPT};
use dirac_qnd::measurement::TimeSeries;
use serde_json::{json, Map, Value};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format '{other}' (csv|json)")),
        }
    }
}

fn fnum(x: f64) -> String {
    format!("{x:.12e}")
}

/// Unit divisor for a series name: positions in x_zpt, momenta in p_zpt.
fn unit_scale(name: &str) -> f64 {
    if name == "p" || name.starts_with('p') {
        P_ZPT
    } else {
        X_ZPT
    }
}

/// Render a time series as CSV with the resolved config in the header.
pub fn timeseries_csv(ts: &TimeSeries, scenario: &str, header: &[(String, String)]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# dirac-qnd v{VERSION}");
    let _ = writeln!(out, "# scenario={scenario}");
    for (k, v) in header {
        let _ = writeln!(out, "# {k}={v}");
    }
    let _ = writeln!(out, "# max_leakage={}", fnum(ts.report.max_leakage));
    let _ = writeln!(out, "# max_norm_drift={}", fnum(ts.report.max_norm_drift));
    if let Some(d) = ts.report.self_check_distance {
        let _ = writeln!(out, "# self_check_distance={}", fnum(d));
    }
    let _ = writeln!(out, "# units=positions:x_zpt momenta:p_zpt time:1/omega");
    let mut cols = vec!["t".to_string()];
    for (name, _) in &ts.observables {
        cols.push(format!("{name}_mean"));
        cols.push(format!("{name}_var"));
    }
    cols.push("leakage".into());
    let _ = writeln!(out, "# columns: {}", cols.join(","));
    for (j, &t) in ts.times.iter().enumerate() {
        let mut row = vec![fnum(t)];
        for (name, series) in &ts.observables {
            let u = unit_scale(name);
            row.push(fnum(series.mean[j] / u));
            row.push(fnum(series.variance[j] / (u * u)));
        }
        row.push(fnum(ts.leakage[j]));
        let _ = writeln!(out, "{}", row.join(","));
    }
    out
}

/// JSON mirror of the CSV structure (same units).
pub fn timeseries_json(
    ts: &TimeSeries,
    scenario: &str,
    header: &[(String, String)],
) -> Result<String> {
    let mut cfg = Map::new();
    for (k, v) in header {
        cfg.insert(k.clone(), Value::String(v.clone()));
    }
    let mut obs = Map::new();
    for (name, series) in &ts.observables {
        let u = unit_scale(name);
        obs.insert(
            name.clone(),
            json!({
                "mean": series.mean.iter().map(|m| m / u).collect::<Vec<_>>(),
                "variance": series.variance.iter().map(|v| v / (u * u)).collect::<Vec<_>>(),
            }),
        );
    }
    let doc = json!({
        "version": VERSION,
        "scenario": scenario,
        "config": Value::Object(cfg),
        "max_leakage": ts.report.max_leakage,
        "max_norm_drift": ts.report.max_norm_drift,
        "self_check_distance": ts.report.self_check_distance,
        "units": {"positions": "x_zpt", "momenta": "p_zpt", "time": "1/omega"},
        "times": ts.times,
        "observables": Value::Object(obs),
        "leakage": ts.leakage,
    });
    Ok(serde_json::to_string_pretty(&doc)?)
}

/// Generic table writer: header lines, a columns line, preformatted rows.
pub fn table_csv(
    title: &str,
    header: &[(String, String)],
    columns: &[&str],
    rows: &[Vec<String>],
) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# dirac-qnd v{VERSION}");
    let _ = writeln!(out, "# scenario={title}");
    for (k, v) in header {
        let _ = writeln!(out, "# {k}={v}");
    }
    let _ = writeln!(out, "# columns: {}", columns.join(","));
    for row in rows {
        let _ = writeln!(out, "{}", row.join(","));
    }
    out
}

pub fn fmt(x: f64) -> String {
    fnum(x)
}
