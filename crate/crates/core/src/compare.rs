//! Exact rates set against their infinite-modulation limits.

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::gaussian::ChannelPoint;
use crate::rates::{asymptotic_error_scale, key_rate, key_rate_asymptotic, losses_db, ProtocolSpec};
use crate::unit::InfoUnit;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareRow {
    #[serde(rename = "T")]
    pub t: f64,
    pub losses_db: f64,
    pub va: f64,
    pub measurement: String,
    pub direction: String,
    pub exact_rate: f64,
    pub asymptotic_rate: f64,
    /// `exact_rate − asymptotic_rate`.
    pub difference: f64,
    /// Predicted order of `|difference|`, see [`asymptotic_error_scale`].
    pub error_scale: f64,
}

/// Least-squares slope of `log|difference|` against `log V_A` at one T.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    #[serde(rename = "T")]
    pub t: f64,
    pub slope: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareSummary {
    /// `max |difference| / error_scale` over all rows.
    pub fitted_c: f64,
    pub slopes: Vec<SlopeFit>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareResult {
    pub rows: Vec<CompareRow>,
    pub summary: CompareSummary,
}

pub const COMPARE_CSV_HEADER: [&str; 9] = [
    "T",
    "losses_db",
    "va",
    "measurement",
    "direction",
    "exact_rate",
    "asymptotic_rate",
    "difference",
    "error_scale",
];

fn log_log_slope(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(_, d)| *d != 0.0)
        .map(|&(va, d)| (va.ln(), d.abs().ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Rows ordered T outer, V_A inner. Needs `0 < T < 1`.
pub fn run_compare(spec: ProtocolSpec, ts: &[f64], vas: &[f64], unit: InfoUnit) -> Result<CompareResult> {
    if ts.is_empty() || vas.is_empty() {
        return Err(CoreError::domain("compare needs at least one T and one V_A"));
    }
    let mut rows = Vec::with_capacity(ts.len() * vas.len());
    let mut slopes = Vec::new();
    let mut fitted_c = 0.0f64;
    for &t in ts {
        let asymptotic_rate = key_rate_asymptotic(spec, t, unit)?;
        let mut pts = Vec::with_capacity(vas.len());
        for &va in vas {
            let p = ChannelPoint::new(t, va)?;
            let exact_rate = key_rate(spec, &p, unit)?.rate;
            let difference = exact_rate - asymptotic_rate;
            let error_scale = asymptotic_error_scale(spec, &p);
            fitted_c = fitted_c.max(difference.abs() / error_scale);
            pts.push((va, difference));
            rows.push(CompareRow {
                t,
                losses_db: losses_db(t),
                va,
                measurement: spec.measurement.to_string(),
                direction: spec.direction.to_string(),
                exact_rate,
                asymptotic_rate,
                difference,
                error_scale,
            });
        }
        if let Some(slope) = log_log_slope(&pts) {
            slopes.push(SlopeFit { t, slope });
        }
    }
    Ok(CompareResult {
        rows,
        summary: CompareSummary { fitted_c, slopes },
    })
}
