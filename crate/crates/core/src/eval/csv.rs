use std::fmt::Write as _;
use std::path::Path;

use super::rollout::EvalReport;
use crate::error::Result;

pub const CSV_HEADER: &str = "time_s,pcc,rel_l2_cum,trajectory";

/// Scientific notation with 17 significant digits; round-trips every f64.
pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else if v.is_nan() {
        "NaN".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

/// One row per snapshot per trajectory.
pub fn report_csv(report: &EvalReport) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    let times = report.times();
    for t in &report.trajectories {
        for (i, time) in times.iter().enumerate() {
            let _ = writeln!(out, "{},{},{},{}", fmt_f64(*time), fmt_f64(t.pcc[i]), fmt_f64(t.rel_l2_cum[i]), t.index);
        }
    }
    out
}

pub fn export_csv(report: &EvalReport, path: &Path) -> Result<()> {
    crate::io::atomic_write(path, report_csv(report).as_bytes())
}

/// Rows of an exported report: `(time_s, pcc, rel_l2_cum, trajectory)`.
pub fn parse_report_csv(text: &str) -> std::result::Result<Vec<(f64, f64, f64, usize)>, String> {
    let mut lines = text.lines();
    if lines.next() != Some(CSV_HEADER) {
        return Err("missing header".into());
    }
    lines
        .map(|line| {
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 4 {
                return Err(format!("expected 4 fields in {line:?}"));
            }
            let num = |s: &str| s.parse::<f64>().map_err(|_| format!("bad number {s:?}"));
            Ok((num(f[0])?, num(f[1])?, num(f[2])?, f[3].parse().map_err(|_| format!("bad trajectory {:?}", f[3]))?))
        })
        .collect()
}
