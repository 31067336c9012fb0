//! Per-algorithm summary statistics and number formatting.

use serde::{Deserialize, Serialize};

use super::runner::RunRecord;
use crate::planners::Algorithm;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub algorithm: Algorithm,
    pub runs: usize,
    pub failures: usize,
    pub i_mean: f64,
    /// Sample standard deviation; `None` with a single run.
    pub i_std: Option<f64>,
    pub mean_iterations: f64,
    pub mean_wall_time: f64,
}

/// Mean and (N - 1)-normalized standard deviation, computed in two passes.
/// The deviation is `None` for fewer than two values.
pub fn mean_std(values: &[f64]) -> (f64, Option<f64>) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, None);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, None);
    }
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    (mean, Some((ss / (n - 1) as f64).sqrt()))
}

/// Statistics per algorithm, in [`Algorithm::ALL`] order. Failed runs count
/// as collecting nothing.
pub fn compute_metrics(records: &[RunRecord]) -> Vec<Metrics> {
    Algorithm::ALL
        .iter()
        .filter_map(|&a| {
            let rs: Vec<&RunRecord> = records.iter().filter(|r| r.algorithm == a).collect();
            if rs.is_empty() {
                return None;
            }
            let igs: Vec<f64> = rs.iter().map(|r| r.best_ig).collect();
            let (i_mean, i_std) = mean_std(&igs);
            let n = rs.len() as f64;
            Some(Metrics {
                algorithm: a,
                runs: rs.len(),
                failures: rs.iter().filter(|r| r.error.is_some()).count(),
                i_mean,
                i_std,
                mean_iterations: rs.iter().map(|r| r.iterations as f64).sum::<f64>() / n,
                mean_wall_time: rs.iter().map(|r| r.wall_time).sum::<f64>() / n,
            })
        })
        .collect()
}

/// `x` with 6 significant digits, trailing zeros removed; scientific
/// notation outside [1e-5, 1e6).
pub fn sig6(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    // Round first so that e.g. 999999.7 moves to the next decade.
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..6).contains(&exp) {
        let decimals = (5 - exp) as usize;
        trim(format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim(mantissa.to_string()))
    }
}

fn trim(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// Like [`sig6`], with an empty field for `None`.
pub fn sig6_opt(x: Option<f64>) -> String {
    x.map(sig6).unwrap_or_default()
}
