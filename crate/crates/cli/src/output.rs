//! CSV artifacts. Floats are written with 9 significant digits.

use std::fs::File;
use std::path::Path;

use csv::Writer;

use crate::CliError;

pub const LEARNING_CURVE_HEADER: [&str; 6] =
    ["algorithm", "config_id", "episode", "mean_reward", "stderr", "envelope_flag"];
pub const FIRST_ACTION_HEADER: [&str; 3] = ["algorithm", "arm", "frequency"];
pub const BOUNDS_HEADER: [&str; 8] = ["instance", "n", "H", "eps", "B", "bound", "measured_gap", "gap_stderr"];
pub const LOWERBOUND_HEADER: [&str; 8] =
    ["eps", "H", "k", "analytic_tv", "empirical_tv", "empirical_stderr", "reward_gap", "gap_stderr"];
pub const ESTIMATES_HEADER: [&str; 6] = ["estimator", "parameter", "row", "col", "estimate", "truth"];

/// `%.9g`.
pub fn fmt_g(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{v:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..9).contains(&exp) {
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{}e{sign}{:02}", trim_zeros(mantissa), exp.abs());
    }
    trim_zeros(&format!("{v:.*}", (8 - exp) as usize)).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub struct LearningCurveRow<'a> {
    pub algorithm: &'a str,
    pub config_id: &'a str,
    pub episode: usize,
    pub mean_reward: f64,
    pub stderr: f64,
    pub on_envelope: bool,
}

pub struct BoundsRow {
    pub instance: String,
    pub n: u64,
    pub horizon: usize,
    pub eps: f64,
    pub b: f64,
    pub bound: f64,
    pub measured_gap: f64,
    pub gap_stderr: f64,
}

pub struct LowerBoundRow {
    pub eps: f64,
    pub horizon: usize,
    pub k: usize,
    pub analytic_tv: f64,
    pub empirical_tv: f64,
    pub empirical_stderr: f64,
    pub reward_gap: f64,
    pub gap_stderr: f64,
}

pub struct EstimateRow {
    pub estimator: String,
    pub parameter: &'static str,
    pub row: usize,
    pub col: usize,
    pub estimate: f64,
    pub truth: f64,
}

fn create(path: &Path, header: &[&str]) -> Result<Writer<File>, CliError> {
    let mut w = Writer::from_path(path).map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))?;
    w.write_record(header)?;
    Ok(w)
}

fn finish(mut w: Writer<File>) -> Result<(), CliError> {
    w.flush()?;
    Ok(())
}

pub fn emit_learning_curve_csv<'a>(
    path: &Path,
    rows: impl IntoIterator<Item = LearningCurveRow<'a>>,
) -> Result<(), CliError> {
    let mut w = create(path, &LEARNING_CURVE_HEADER)?;
    for r in rows {
        w.write_record([
            r.algorithm.to_string(),
            r.config_id.to_string(),
            r.episode.to_string(),
            fmt_g(r.mean_reward),
            fmt_g(r.stderr),
            u8::from(r.on_envelope).to_string(),
        ])?;
    }
    finish(w)
}

/// One row per `(algorithm, arm)`.
pub fn emit_first_action_csv(path: &Path, hists: &[(String, Vec<f64>)]) -> Result<(), CliError> {
    let mut w = create(path, &FIRST_ACTION_HEADER)?;
    for (name, freq) in hists {
        for (arm, f) in freq.iter().enumerate() {
            w.write_record([name.clone(), arm.to_string(), fmt_g(*f)])?;
        }
    }
    finish(w)
}

pub fn emit_bounds_csv(path: &Path, rows: &[BoundsRow]) -> Result<(), CliError> {
    let mut w = create(path, &BOUNDS_HEADER)?;
    for r in rows {
        w.write_record([
            r.instance.clone(),
            r.n.to_string(),
            r.horizon.to_string(),
            fmt_g(r.eps),
            fmt_g(r.b),
            fmt_g(r.bound),
            fmt_g(r.measured_gap),
            fmt_g(r.gap_stderr),
        ])?;
    }
    finish(w)
}

pub fn emit_lowerbound_csv(path: &Path, rows: &[LowerBoundRow]) -> Result<(), CliError> {
    let mut w = create(path, &LOWERBOUND_HEADER)?;
    for r in rows {
        w.write_record([
            fmt_g(r.eps),
            r.horizon.to_string(),
            r.k.to_string(),
            fmt_g(r.analytic_tv),
            fmt_g(r.empirical_tv),
            fmt_g(r.empirical_stderr),
            fmt_g(r.reward_gap),
            fmt_g(r.gap_stderr),
        ])?;
    }
    finish(w)
}

pub fn emit_estimates_csv(path: &Path, rows: &[EstimateRow]) -> Result<(), CliError> {
    let mut w = create(path, &ESTIMATES_HEADER)?;
    for r in rows {
        w.write_record([
            r.estimator.clone(),
            r.parameter.to_string(),
            r.row.to_string(),
            r.col.to_string(),
            fmt_g(r.estimate),
            fmt_g(r.truth),
        ])?;
    }
    finish(w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fmt_g_matches_printf() {
        assert_eq!(fmt_g(0.0490099501), "0.0490099501");
        assert_eq!(fmt_g(1.0), "1");
        assert_eq!(fmt_g(-2.5), "-2.5");
        assert_eq!(fmt_g(1.0 / 3.0), "0.333333333");
        assert_eq!(fmt_g(123456789.4), "123456789");
        assert_eq!(fmt_g(1234567890.0), "1.23456789e+09");
        assert_eq!(fmt_g(0.0001), "0.0001");
        assert_eq!(fmt_g(0.00001234), "1.234e-05");
        assert_eq!(fmt_g(9.9999999999), "10");
        assert_eq!(fmt_g(f64::NAN), "nan");
    }

    #[test]
    fn empty_rows_give_header_only() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("bounds.csv");
        emit_bounds_csv(&p, &[]).unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), format!("{}\n", BOUNDS_HEADER.join(",")));
    }
}
