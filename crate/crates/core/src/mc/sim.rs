use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};

/// Largest batch `simulate_batch` will allocate.
pub const DEFAULT_SAMPLE_CAP: usize = 20_000_000;

/// Pulses per RNG sub-stream. Chunk `k` draws from ChaCha8 stream `k` of
/// the seed, so output is independent of how chunks are scheduled.
pub const CHUNK_SIZE: usize = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Detection {
    Homodyne,
    Heterodyne,
}

impl fmt::Display for Detection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Detection::Homodyne => "homodyne",
            Detection::Heterodyne => "heterodyne",
        })
    }
}

impl FromStr for Detection {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "homodyne" | "hom" => Ok(Detection::Homodyne),
            "heterodyne" | "het" => Ok(Detection::Heterodyne),
            other => Err(format!(
                "unknown detection `{other}` (expected homodyne or heterodyne)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Quadrature {
    Q,
    P,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub transmission: f64,
    /// Per-quadrature modulation variance, `V_A − 1`.
    pub v_mod: f64,
    pub detection: Detection,
    pub n: usize,
    pub seed: u64,
}

impl SimConfig {
    fn validate(&self, cap: usize) -> Result<()> {
        if !(0.0..=1.0).contains(&self.transmission) {
            return Err(CoreError::domain(format!(
                "transmission must lie in [0, 1], got {}",
                self.transmission
            )));
        }
        if !(self.v_mod >= 0.0) || !self.v_mod.is_finite() {
            return Err(CoreError::domain(format!(
                "modulation variance must be finite and >= 0, got {}",
                self.v_mod
            )));
        }
        if self.n == 0 {
            return Err(CoreError::domain("sample count must be >= 1"));
        }
        if self.n > cap {
            return Err(CoreError::Resource(format!(
                "{} samples requested, cap is {cap}",
                self.n
            )));
        }
        Ok(())
    }
}

/// One simulated pulse. `a` is Alice's mode, `b` and `e` the two
/// beamsplitter outputs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseRecord {
    pub x_q: f64,
    pub x_p: f64,
    pub a_q: f64,
    pub a_p: f64,
    pub b_q: f64,
    pub b_p: f64,
    pub y_q: Option<f64>,
    pub y_p: Option<f64>,
    pub e_q: f64,
    pub e_p: f64,
    /// Measured quadrature for homodyne detection, `None` for heterodyne.
    pub basis: Option<Quadrature>,
}

impl PulseRecord {
    /// Bob's outcome together with Alice's value and Eve's quadratures
    /// (same, other) for the measured basis. Homodyne only.
    pub(crate) fn sifted(&self) -> Option<(f64, f64, f64, f64)> {
        match self.basis? {
            Quadrature::Q => Some((self.y_q?, self.x_q, self.e_q, self.e_p)),
            Quadrature::P => Some((self.y_p?, self.x_p, self.e_p, self.e_q)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleBatch {
    pub config: SimConfig,
    pub records: Vec<PulseRecord>,
}

impl SampleBatch {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub(crate) fn column(&self, f: impl Fn(&PulseRecord) -> f64) -> Vec<f64> {
        self.records.iter().map(f).collect()
    }
}

fn simulate_chunk(c: &SimConfig, chunk: usize, len: usize) -> Vec<PulseRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(c.seed);
    rng.set_stream(chunk as u64);
    let sd_mod = c.v_mod.sqrt();
    let (st, sr) = (c.transmission.sqrt(), (1.0 - c.transmission).sqrt());
    let mut normal = move || -> f64 { rng.sample(StandardNormal) };
    (0..len)
        .map(|_| {
            let x_q = sd_mod * normal();
            let x_p = sd_mod * normal();
            let a_q = x_q + normal();
            let a_p = x_p + normal();
            let (v_q, v_p) = (normal(), normal());
            let b_q = st * a_q + sr * v_q;
            let b_p = st * a_p + sr * v_p;
            let e_q = sr * a_q - st * v_q;
            let e_p = sr * a_p - st * v_p;
            let (y_q, y_p, basis) = match c.detection {
                Detection::Heterodyne => {
                    (Some(b_q + normal()), Some(b_p + normal()), None)
                }
                Detection::Homodyne => {
                    // basis bit from the sign of one more normal draw
                    if normal() < 0.0 {
                        (Some(b_q), None, Some(Quadrature::Q))
                    } else {
                        (None, Some(b_p), Some(Quadrature::P))
                    }
                }
            };
            PulseRecord {
                x_q,
                x_p,
                a_q,
                a_p,
                b_q,
                b_p,
                y_q,
                y_p,
                e_q,
                e_p,
                basis,
            }
        })
        .collect()
}

/// Draws `c.n` pulses. Identical configs give bitwise-identical batches.
pub fn simulate_batch(c: &SimConfig) -> Result<SampleBatch> {
    simulate_batch_capped(c, DEFAULT_SAMPLE_CAP)
}

pub fn simulate_batch_capped(c: &SimConfig, cap: usize) -> Result<SampleBatch> {
    c.validate(cap)?;
    let chunks = c.n.div_ceil(CHUNK_SIZE);
    let chunk_len = |k: usize| CHUNK_SIZE.min(c.n - k * CHUNK_SIZE);

    #[cfg(feature = "parallel")]
    let parts: Vec<Vec<PulseRecord>> = {
        use rayon::prelude::*;
        (0..chunks)
            .into_par_iter()
            .map(|k| simulate_chunk(c, k, chunk_len(k)))
            .collect()
    };
    #[cfg(not(feature = "parallel"))]
    let parts: Vec<Vec<PulseRecord>> = (0..chunks)
        .map(|k| simulate_chunk(c, k, chunk_len(k)))
        .collect();

    let mut records = Vec::with_capacity(c.n);
    for p in parts {
        records.extend(p);
    }
    Ok(SampleBatch {
        config: *c,
        records,
    })
}
