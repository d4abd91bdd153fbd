//! Error metrics, rollout evaluation and out-of-distribution initial
//! conditions.

mod csv;
pub mod metrics;
mod pattern;
mod rollout;

pub use csv::{export_csv, fmt_f64, parse_report_csv, report_csv, CSV_HEADER};
pub use metrics::{pcc, pcc_raw, relative_l2, relative_l2_raw, relative_l2_trajectory};
pub use pattern::{parse_pgm, pattern_ic, read_pgm, PatternIC, Raster};
pub use rollout::{evaluate_rollout, superres_eval, EvalReport, SuperResReport, TrajectoryReport};
