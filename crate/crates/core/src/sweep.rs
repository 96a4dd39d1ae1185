//! Parameter sweeps over `(T, V_A, protocol)`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::gaussian::ChannelPoint;
use crate::rates::{key_rate, key_rate_asymptotic, losses_db, ProtocolSpec};
use crate::unit::InfoUnit;

/// CSV header of sweep output, in column order.
pub const SWEEP_CSV_HEADER: [&str; 9] = [
    "T",
    "losses_db",
    "va",
    "measurement",
    "direction",
    "bob_info",
    "eve_info",
    "rate",
    "asymptotic_rate",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    #[default]
    Linear,
    /// Equal steps in `−10·log₁₀ T`.
    Db,
}

impl fmt::Display for Spacing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Spacing::Linear => "linear",
            Spacing::Db => "db",
        })
    }
}

impl FromStr for Spacing {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "linear" | "lin" => Ok(Spacing::Linear),
            "db" => Ok(Spacing::Db),
            other => Err(format!("unknown spacing `{other}` (expected linear or db)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub t_start: f64,
    pub t_stop: f64,
    pub steps: usize,
    pub spacing: Spacing,
    pub vas: Vec<f64>,
    pub specs: Vec<ProtocolSpec>,
    pub unit: InfoUnit,
    /// Report `max(0, rate)` instead of the signed rate.
    pub clamp: bool,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.steps == 0 {
            return Err(CoreError::domain("sweep needs at least one step"));
        }
        for t in [self.t_start, self.t_stop] {
            if !(0.0..=1.0).contains(&t) {
                return Err(CoreError::domain(format!(
                    "sweep transmission must lie in [0, 1], got {t}"
                )));
            }
            if self.spacing == Spacing::Db && t == 0.0 {
                return Err(CoreError::domain("dB-spaced sweep cannot reach T = 0"));
            }
        }
        if self.vas.is_empty() || self.specs.is_empty() {
            return Err(CoreError::domain("sweep needs at least one V_A and one protocol"));
        }
        for &va in &self.vas {
            ChannelPoint::new(0.5, va)?;
        }
        Ok(())
    }

    /// Transmission grid, from `t_start` to `t_stop` inclusive.
    pub fn transmissions(&self) -> Vec<f64> {
        let n = self.steps;
        if n == 1 {
            return vec![self.t_start];
        }
        (0..n)
            .map(|i| {
                if i == n - 1 {
                    return self.t_stop;
                }
                let f = i as f64 / (n - 1) as f64;
                match self.spacing {
                    Spacing::Linear => self.t_start + (self.t_stop - self.t_start) * f,
                    Spacing::Db => {
                        let (l0, l1) = (losses_db(self.t_start), losses_db(self.t_stop));
                        10f64.powf(-(l0 + (l1 - l0) * f) / 10.0)
                    }
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputRow {
    #[serde(rename = "T")]
    pub t: f64,
    /// `None` at `T = 0`.
    pub losses_db: Option<f64>,
    pub va: f64,
    pub measurement: String,
    pub direction: String,
    pub bob_info: Option<f64>,
    pub eve_info: Option<f64>,
    pub rate: Option<f64>,
    /// `None` where the infinite-modulation limit is undefined (`T ∈ {0, 1}`).
    pub asymptotic_rate: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl OutputRow {
    pub fn compute(spec: ProtocolSpec, p: &ChannelPoint, unit: InfoUnit, clamp: bool) -> Self {
        let t = p.transmission();
        let clamp_fn = |x: f64| if clamp { x.max(0.0) } else { x };
        let (bob_info, eve_info, rate, error) = match key_rate(spec, p, unit) {
            Ok(b) => (Some(b.bob_info), Some(b.eve_info), Some(clamp_fn(b.rate)), None),
            Err(e) => (None, None, None, Some(e.to_string())),
        };
        OutputRow {
            t,
            losses_db: (t > 0.0).then(|| losses_db(t)),
            va: p.va(),
            measurement: spec.measurement.to_string(),
            direction: spec.direction.to_string(),
            bob_info,
            eve_info,
            rate,
            asymptotic_rate: key_rate_asymptotic(spec, t, unit).ok().map(clamp_fn),
            error,
        }
    }

    pub fn csv_fields(&self) -> [String; 9] {
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        [
            self.t.to_string(),
            opt(self.losses_db),
            self.va.to_string(),
            self.measurement.clone(),
            self.direction.clone(),
            opt(self.bob_info),
            opt(self.eve_info),
            opt(self.rate),
            opt(self.asymptotic_rate),
        ]
    }
}

/// One row per `(T, V_A, protocol)`, with T outermost and the protocol
/// innermost. A failing point yields a row with empty rate fields and
/// `error` set rather than aborting the sweep.
pub fn run_sweep(s: &SweepSpec) -> Result<Vec<OutputRow>> {
    s.validate()?;
    let mut points = Vec::new();
    for t in s.transmissions() {
        for &va in &s.vas {
            let p = ChannelPoint::new(t, va)?;
            points.extend(s.specs.iter().map(|&spec| (spec, p)));
        }
    }
    let eval = |&(spec, p): &(ProtocolSpec, ChannelPoint)| OutputRow::compute(spec, &p, s.unit, s.clamp);

    #[cfg(feature = "parallel")]
    let rows = {
        use rayon::prelude::*;
        points.par_iter().map(eval).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let rows = points.iter().map(eval).collect();
    Ok(rows)
}
