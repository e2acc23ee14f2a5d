//! CSV and JSON writers. Numbers use the shortest decimal that round-trips,
//! so both formats carry identical values.

use std::io::Write;

use serde::Serialize;

use super::{CrossCheckReport, CrossCheckRow, Offender, OutputFormat, SeriesRow};
use crate::scenarios::ScenarioKind;

pub const CSV_COLUMNS: [&str; 6] = ["tau", "concurrence", "tqd", "lqu", "p_plus", "p_minus"];

pub const CROSS_CHECK_COLUMNS: [&str; 11] = [
    "state_dev_dynamics",
    "state_dev_rk4",
    "concurrence_generic",
    "tqd_generic",
    "lqu_generic",
    "concurrence_rk4",
    "tqd_rk4",
    "lqu_rk4",
    "tqd_bruteforce",
    "lqu_bruteforce",
    "pass",
];

/// Run parameters echoed alongside the data.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunMeta {
    pub scenario: &'static str,
    pub near_zero_separation: bool,
    /// `None` in sweep mode.
    pub gamma: Option<f64>,
    pub eta: f64,
    pub from_geometry: bool,
    pub sweep: bool,
}

pub fn scenario_name(kind: ScenarioKind) -> &'static str {
    match kind {
        ScenarioKind::BellZeroDouble => "bell-zero-double",
        ScenarioKind::SingleExcitation => "single-excitation",
        ScenarioKind::SymmetricBell => "symmetric",
    }
}

/// Shortest round-trip decimal; exponent notation for very large or small
/// magnitudes.
pub fn format_number(x: f64) -> String {
    format!("{x:?}")
}

fn csv_header(meta: &RunMeta, extra: &[&str]) -> String {
    let mut cols: Vec<&str> = CSV_COLUMNS.to_vec();
    if meta.sweep {
        cols.push("gamma");
    }
    cols.extend_from_slice(extra);
    cols.join(",")
}

fn write_comment<W: Write>(w: &mut W, meta: &RunMeta) -> std::io::Result<()> {
    if meta.from_geometry {
        if let Some(g) = meta.gamma {
            writeln!(w, "# gamma={} eta={}", format_number(g), format_number(meta.eta))?;
        }
    }
    Ok(())
}

fn base_fields(r: &crate::scenarios::CorrelationReport, gamma: Option<f64>) -> Vec<String> {
    let mut v: Vec<String> =
        [r.tau, r.concurrence, r.tqd, r.lqu, r.p_plus, r.p_minus].iter().map(|&x| format_number(x)).collect();
    if let Some(g) = gamma {
        v.push(format_number(g));
    }
    v
}

#[derive(Serialize)]
struct SeriesDoc<'a> {
    #[serde(flatten)]
    meta: &'a RunMeta,
    rows: &'a [SeriesRow],
}

#[derive(Serialize)]
struct Verdict<'a> {
    pass: bool,
    worst: Option<&'a Offender>,
}

#[derive(Serialize)]
struct CrossCheckDoc<'a> {
    #[serde(flatten)]
    meta: &'a RunMeta,
    rows: &'a [CrossCheckRow],
    cross_check: Verdict<'a>,
}

pub fn write_series<W: Write>(w: &mut W, meta: &RunMeta, rows: &[SeriesRow], format: OutputFormat) -> std::io::Result<()> {
    match format {
        OutputFormat::Csv => {
            write_comment(w, meta)?;
            writeln!(w, "{}", csv_header(meta, &[]))?;
            for row in rows {
                writeln!(w, "{}", base_fields(&row.report, row.gamma).join(","))?;
            }
        }
        OutputFormat::Json => {
            serde_json::to_writer_pretty(&mut *w, &SeriesDoc { meta, rows })?;
            writeln!(w)?;
        }
    }
    Ok(())
}

pub fn write_cross_check<W: Write>(
    w: &mut W,
    meta: &RunMeta,
    report: &CrossCheckReport,
    format: OutputFormat,
) -> std::io::Result<()> {
    match format {
        OutputFormat::Csv => {
            write_comment(w, meta)?;
            writeln!(w, "{}", csv_header(meta, &CROSS_CHECK_COLUMNS))?;
            let opt = |x: Option<f64>| x.map(format_number).unwrap_or_default();
            for row in &report.rows {
                let mut fields = base_fields(&row.closed, row.gamma);
                fields.extend(
                    [
                        row.state_dev_dynamics,
                        row.state_dev_rk4,
                        row.concurrence_generic,
                        row.tqd_generic,
                        row.lqu_generic,
                        row.concurrence_rk4,
                        row.tqd_rk4,
                        row.lqu_rk4,
                    ]
                    .map(format_number),
                );
                fields.push(opt(row.tqd_bruteforce));
                fields.push(opt(row.lqu_bruteforce));
                fields.push(row.pass.to_string());
                writeln!(w, "{}", fields.join(","))?;
            }
        }
        OutputFormat::Json => {
            let doc = CrossCheckDoc {
                meta,
                rows: &report.rows,
                cross_check: Verdict { pass: report.pass, worst: report.worst.as_ref() },
            };
            serde_json::to_writer_pretty(&mut *w, &doc)?;
            writeln!(w)?;
        }
    }
    Ok(())
}

/// One-line summary for stderr.
pub fn verdict_line(report: &CrossCheckReport) -> String {
    let at = |o: &Offender| match o.gamma {
        Some(g) => format!("tau={} gamma={}", format_number(o.tau), format_number(g)),
        None => format!("tau={}", format_number(o.tau)),
    };
    match (&report.worst, report.pass) {
        (Some(o), true) => format!(
            "cross-check passed on {} rows; closest to its tolerance: {} at {} ({:e} of {:e})",
            report.rows.len(),
            o.check,
            at(o),
            o.deviation,
            o.tolerance
        ),
        (Some(o), false) => format!(
            "cross-check FAILED; worst offender: {} at {}: deviation {:e} exceeds tolerance {:e}",
            o.check,
            at(o),
            o.deviation,
            o.tolerance
        ),
        (None, _) => "cross-check: no rows".to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for x in [0.0, 1.0, 0.1, 1.0 / 3.0, 1e-300, 2.220446049250313e-16, 123456.789] {
            let s = format_number(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
        assert_eq!(format_number(0.5), "0.5");
        assert_eq!(format_number(1e-300), "1e-300");
    }
}
