//! WebAssembly bindings for the static demo page in `www/`.
//!
//! Protocol names use the same spellings as the CLI: `direct`, `reverse`,
//! `unconditional` and `collective`, `heterodyne`, `homodyne`. Points that
//! fall outside a formula's domain come back as `NaN` so the page can leave a
//! gap in the curve.

use cvqkd_core::rates::{
    key_rate, threshold_transmission, Direction, Measurement, ModulationRegime, ProtocolSpec,
    ThresholdQuery,
};
use cvqkd_core::{ChannelPoint, InfoUnit};
use wasm_bindgen::prelude::*;

fn parse_spec(direction: &str, measurement: &str) -> Result<ProtocolSpec, JsError> {
    let d: Direction = direction.parse::<Direction>().map_err(|e| JsError::new(&e.to_string()))?;
    let m: Measurement = measurement.parse::<Measurement>().map_err(|e| JsError::new(&e.to_string()))?;
    Ok(ProtocolSpec::new(d, m))
}

fn parse_unit(unit: &str) -> Result<InfoUnit, JsError> {
    unit.parse::<InfoUnit>().map_err(|e| JsError::new(&e.to_string()))
}

/// `steps` evenly spaced transmissions on `[t_min, t_max]`.
#[wasm_bindgen]
pub fn transmission_grid(t_min: f64, t_max: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => Vec::new(),
        1 => vec![t_min],
        _ => (0..steps)
            .map(|i| t_min + (t_max - t_min) * i as f64 / (steps - 1) as f64)
            .collect(),
    }
}

/// Key rate at each transmission in `ts`.
#[wasm_bindgen]
pub fn rate_curve(
    direction: &str,
    measurement: &str,
    va: f64,
    unit: &str,
    ts: &[f64],
) -> Result<Vec<f64>, JsError> {
    let spec = parse_spec(direction, measurement)?;
    let unit = parse_unit(unit)?;
    Ok(ts
        .iter()
        .map(|&t| {
            ChannelPoint::new(t, va)
                .and_then(|p| key_rate(spec, &p, unit))
                .map_or(f64::NAN, |r| r.rate)
        })
        .collect())
}

/// Threshold transmission for each modulation variance in `vas`. A
/// non-finite entry asks for the infinite-modulation limit.
#[wasm_bindgen]
pub fn threshold_curve(direction: &str, measurement: &str, vas: &[f64]) -> Result<Vec<f64>, JsError> {
    let spec = parse_spec(direction, measurement)?;
    Ok(vas
        .iter()
        .map(|&va| {
            let regime = if va.is_finite() {
                ModulationRegime::Finite(va)
            } else {
                ModulationRegime::InfiniteModulation
            };
            threshold_transmission(ThresholdQuery { spec, regime }).unwrap_or(f64::NAN)
        })
        .collect())
}

/// `[bob_info, eve_info, rate]` at one point.
#[wasm_bindgen]
pub fn rate_breakdown(
    direction: &str,
    measurement: &str,
    t: f64,
    va: f64,
    unit: &str,
) -> Result<Vec<f64>, JsError> {
    let spec = parse_spec(direction, measurement)?;
    let p = ChannelPoint::new(t, va).map_err(|e| JsError::new(&e.to_string()))?;
    let r = key_rate(spec, &p, parse_unit(unit)?).map_err(|e| JsError::new(&e.to_string()))?;
    Ok(vec![r.bob_info, r.eve_info, r.rate])
}
