//! Secret-key rates for Gaussian-modulated coherent states over a pure-loss
//! channel, under collective attacks by an eavesdropper holding the
//! reflected beamsplitter port.
//!
//! Every rate is `bob_info − eve_info` for one of three reference choices:
//!
//! | direction       | Eve term                                   |
//! |-----------------|--------------------------------------------|
//! | `Direct`        | Holevo information on Alice's data, `I(X;E)` |
//! | `Reverse`       | Holevo information on Bob's data, `I(Y;E)` (or `I(B;E)`) |
//! | `Unconditional` | Eve's full entropy `H(E)`                  |
//!
//! Rates are signed. Nothing here clamps a negative rate to zero.

use std::f64::consts::E;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::gaussian::{channel_variances, g_nats, ChannelPoint};
use crate::unit::InfoUnit;

/// Endpoint gap used by the finite-modulation threshold search.
pub const THRESHOLD_BRACKET_EPS: f64 = 1e-9;
/// Absolute tolerance on T for the finite-modulation threshold search.
pub const THRESHOLD_TOL: f64 = 1e-10;
/// Above this transmission the strong-loss forms are flagged as out of regime.
pub const STRONG_LOSS_LIMIT: f64 = 0.1;

const THRESHOLD_SCAN_POINTS: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Measurement {
    /// Optimal joint measurement over all of Bob's pulses.
    Collective,
    Heterodyne,
    Homodyne,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Direct,
    Reverse,
    Unconditional,
}

impl Measurement {
    pub const ALL: [Measurement; 3] = [
        Measurement::Collective,
        Measurement::Heterodyne,
        Measurement::Homodyne,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Measurement::Collective => "collective",
            Measurement::Heterodyne => "heterodyne",
            Measurement::Homodyne => "homodyne",
        }
    }
}

impl Direction {
    pub const ALL: [Direction; 3] = [Direction::Direct, Direction::Reverse, Direction::Unconditional];

    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Direct => "direct",
            Direction::Reverse => "reverse",
            Direction::Unconditional => "unconditional",
        }
    }
}

impl fmt::Display for Measurement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Measurement {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "collective" | "coll" => Ok(Measurement::Collective),
            "heterodyne" | "het" => Ok(Measurement::Heterodyne),
            "homodyne" | "hom" => Ok(Measurement::Homodyne),
            other => Err(format!("unknown measurement `{other}`")),
        }
    }
}

impl FromStr for Direction {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "direct" => Ok(Direction::Direct),
            "reverse" => Ok(Direction::Reverse),
            "unconditional" => Ok(Direction::Unconditional),
            other => Err(format!("unknown direction `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ProtocolSpec {
    pub measurement: Measurement,
    pub direction: Direction,
}

impl ProtocolSpec {
    pub const fn new(direction: Direction, measurement: Measurement) -> Self {
        Self {
            measurement,
            direction,
        }
    }

    /// All nine direction × measurement combinations, direction-major.
    pub fn all() -> impl Iterator<Item = ProtocolSpec> {
        Direction::ALL
            .into_iter()
            .flat_map(|d| Measurement::ALL.into_iter().map(move |m| ProtocolSpec::new(d, m)))
    }
}

impl fmt::Display for ProtocolSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.direction, self.measurement)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateBreakdown {
    pub bob_info: f64,
    pub eve_info: f64,
    /// Always `bob_info − eve_info`, possibly negative.
    pub rate: f64,
    pub unit: InfoUnit,
}

impl RateBreakdown {
    fn from_nats(bob: f64, eve: f64, unit: InfoUnit) -> Self {
        let bob_info = unit.from_nats(bob);
        let eve_info = unit.from_nats(eve);
        Self {
            bob_info,
            eve_info,
            rate: bob_info - eve_info,
            unit,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModulationRegime {
    /// V_A → ∞.
    InfiniteModulation,
    /// Fixed total variance V_A.
    Finite(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdQuery {
    pub spec: ProtocolSpec,
    pub regime: ModulationRegime,
}

/// Leading-order reverse rate for `1/V_A ≪ T ≪ 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrongLossRate {
    pub rate: f64,
    /// Set when `T ≥ 0.1`, where the linear form is no longer accurate.
    pub beyond_regime: bool,
}

// Channel-point variances are >= 1 up to rounding, well inside the clamp
// window of `g_nats`.
fn g(v: f64) -> f64 {
    g_nats(v.max(1.0)).expect("variance of a physical mode")
}

fn require_positive_transmission(p: &ChannelPoint) -> Result<()> {
    if p.transmission() > 0.0 {
        Ok(())
    } else {
        Err(CoreError::domain(
            "reverse reconciliation conditional variances need T > 0",
        ))
    }
}

fn bob_nats(m: Measurement, p: &ChannelPoint) -> f64 {
    let (vb, _) = channel_variances(p);
    match m {
        Measurement::Collective => g(vb),
        Measurement::Heterodyne => ((vb - 1.0) / 2.0).ln_1p(),
        Measurement::Homodyne => vb.ln() / 2.0,
    }
}

/// Information Bob holds on Alice's modulation: Holevo information `g(V_B)`
/// for collective measurement, `log((V_B+1)/2)` for heterodyne and
/// `½·log V_B` for homodyne.
pub fn mutual_info_bob(m: Measurement, p: &ChannelPoint, unit: InfoUnit) -> f64 {
    unit.from_nats(bob_nats(m, p))
}

fn eve_direct_nats(m: Measurement, p: &ChannelPoint) -> f64 {
    let (_, ve) = channel_variances(p);
    match m {
        Measurement::Collective | Measurement::Heterodyne => g(ve),
        // Alice forgets the unmeasured quadrature, so Eve's conditional
        // state keeps variances (1, V_E).
        Measurement::Homodyne => g(ve) - g(ve.sqrt()),
    }
}

/// Eve's Holevo information on Alice's data, `I(X;E)`.
pub fn eve_info_direct(m: Measurement, p: &ChannelPoint, unit: InfoUnit) -> f64 {
    unit.from_nats(eve_direct_nats(m, p))
}

/// `V(Q_E|Y) = V(P_E|Y) = (2 − T + T/V_A) / (T + (2−T)/V_A)` for a
/// heterodyning Bob.
pub fn heterodyne_conditional_variance(p: &ChannelPoint) -> Result<f64> {
    require_positive_transmission(p)?;
    let t = p.transmission();
    let inv = 1.0 / p.va();
    Ok((2.0 - t + t * inv) / (t + (2.0 - t) * inv))
}

/// `(V(Q_E|Y), V(P_E|Y))` when Bob homodynes the Q quadrature:
/// `1/(T + (1−T)/V_A)` and `V_E`.
pub fn homodyne_conditional_variances(p: &ChannelPoint) -> Result<(f64, f64)> {
    require_positive_transmission(p)?;
    let t = p.transmission();
    let (_, ve) = channel_variances(p);
    Ok((1.0 / (t + (1.0 - t) / p.va()), ve))
}

/// Symmetrized `V(E|Y)` for a homodyning Bob,
/// `sqrt(V_A·(1 − T + T/V_A)/(T + (1−T)/V_A))`.
pub fn homodyne_conditional_symmetrized(p: &ChannelPoint) -> Result<f64> {
    require_positive_transmission(p)?;
    let t = p.transmission();
    let inv = 1.0 / p.va();
    Ok((p.va() * (1.0 - t + t * inv) / (t + (1.0 - t) * inv)).sqrt())
}

fn eve_reverse_nats(m: Measurement, p: &ChannelPoint) -> Result<f64> {
    require_positive_transmission(p)?;
    let (vb, ve) = channel_variances(p);
    Ok(match m {
        // H(BE) = H(A): the beamsplitter only mixes A with vacuum
        Measurement::Collective => g(vb) + g(ve) - g(p.va()),
        Measurement::Heterodyne => g(ve) - g(heterodyne_conditional_variance(p)?),
        Measurement::Homodyne => g(ve) - g(homodyne_conditional_symmetrized(p)?),
    })
}

/// Eve's information on Bob's data: `I(B;E)` for collective measurement,
/// `I(Y;E) = H(E) − H(E|Y)` otherwise. Requires `T > 0`.
pub fn eve_info_reverse(m: Measurement, p: &ChannelPoint, unit: InfoUnit) -> Result<f64> {
    eve_reverse_nats(m, p).map(|x| unit.from_nats(x))
}

fn eve_entropy_nats(m: Measurement, p: &ChannelPoint) -> f64 {
    let (_, ve) = channel_variances(p);
    match m {
        Measurement::Collective | Measurement::Heterodyne => g(ve),
        // P-quadrature modulation handed to Eve
        Measurement::Homodyne => g(ve.sqrt()),
    }
}

/// Eve's entropy `H(E)` as used by the reconciliation-independent bound.
pub fn eve_entropy(m: Measurement, p: &ChannelPoint, unit: InfoUnit) -> f64 {
    unit.from_nats(eve_entropy_nats(m, p))
}

pub fn key_rate(spec: ProtocolSpec, p: &ChannelPoint, unit: InfoUnit) -> Result<RateBreakdown> {
    let bob = bob_nats(spec.measurement, p);
    let eve = match spec.direction {
        Direction::Direct => eve_direct_nats(spec.measurement, p),
        Direction::Reverse => eve_reverse_nats(spec.measurement, p)?,
        Direction::Unconditional => eve_entropy_nats(spec.measurement, p),
    };
    Ok(RateBreakdown::from_nats(bob, eve, unit))
}

fn asymptotic_nats(spec: ProtocolSpec, t: f64) -> f64 {
    use Direction::*;
    use Measurement::*;
    let odds = (t / (1.0 - t)).ln();
    let loss = -(-t).ln_1p(); // log 1/(1−T)
    match (spec.direction, spec.measurement) {
        (Direct | Unconditional, Collective) => odds,
        (Direct | Unconditional, Heterodyne) => odds - 1.0,
        (Direct, Homodyne) => odds / 2.0,
        (Reverse, Collective) => loss,
        (Reverse, Heterodyne) => loss / t - 1.0,
        (Reverse, Homodyne) => loss / 2.0,
        // ½·log((T/(1−T))·4/e²)
        (Unconditional, Homodyne) => odds / 2.0 + std::f64::consts::LN_2 - 1.0,
    }
}

/// Rate in the limit `V_A → ∞` at fixed `0 < T < 1`.
pub fn key_rate_asymptotic(spec: ProtocolSpec, t: f64, unit: InfoUnit) -> Result<f64> {
    if !(t > 0.0 && t < 1.0) {
        return Err(CoreError::domain(format!(
            "asymptotic rate needs 0 < T < 1, got {t}"
        )));
    }
    Ok(unit.from_nats(asymptotic_nats(spec, t)))
}

/// Scale of `|exact − asymptotic|` at a finite modulation: the
/// `1/(T·V_A) + 1/((1−T)·V_A)` family for collective and heterodyne
/// protocols and its square root for homodyne ones.
pub fn asymptotic_error_scale(spec: ProtocolSpec, p: &ChannelPoint) -> f64 {
    let t = p.transmission();
    let va = p.va();
    let (a, b) = (1.0 / (t * va), 1.0 / ((1.0 - t) * va));
    match spec.measurement {
        Measurement::Collective | Measurement::Heterodyne => a + b,
        Measurement::Homodyne => a.sqrt() + b.sqrt(),
    }
}

/// First-order reverse rate for strong losses: `T·log e` (collective),
/// `(T/2)·log e` (heterodyne, homodyne).
pub fn key_rate_strong_loss(spec: ProtocolSpec, t: f64, unit: InfoUnit) -> Result<StrongLossRate> {
    if spec.direction != Direction::Reverse {
        return Err(CoreError::Unsupported(format!(
            "no strong-loss form for {spec}; only reverse protocols have one"
        )));
    }
    if !(t > 0.0 && t < 1.0) {
        return Err(CoreError::domain(format!(
            "strong-loss rate needs 0 < T < 1, got {t}"
        )));
    }
    let nats = match spec.measurement {
        Measurement::Collective => t,
        Measurement::Heterodyne | Measurement::Homodyne => t / 2.0,
    };
    Ok(StrongLossRate {
        rate: unit.from_nats(nats),
        beyond_regime: t >= STRONG_LOSS_LIMIT,
    })
}

/// Closed-form infinite-modulation threshold for a protocol.
fn analytic_threshold(spec: ProtocolSpec) -> f64 {
    use Direction::*;
    use Measurement::*;
    match (spec.direction, spec.measurement) {
        (Reverse, _) => 0.0,
        (Direct, Collective) | (Direct, Homodyne) | (Unconditional, Collective) => 0.5,
        (Direct, Heterodyne) | (Unconditional, Heterodyne) => E / (E + 1.0),
        (Unconditional, Homodyne) => E * E / (E * E + 4.0),
    }
}

/// Smallest transmission giving a positive key.
///
/// In the infinite-modulation regime this is the closed-form root of the
/// asymptotic rate (0 for reverse protocols, which work at any loss). At
/// finite `V_A` the exact rate is bisected on `(1e-9, 1 − 1e-9)`, returning
/// the largest root below which the rate is negative.
pub fn threshold_transmission(q: ThresholdQuery) -> Result<f64> {
    let va = match q.regime {
        ModulationRegime::InfiniteModulation => return Ok(analytic_threshold(q.spec)),
        ModulationRegime::Finite(va) => va,
    };
    ChannelPoint::new(0.5, va)?;
    let rate = |t: f64| -> Result<f64> {
        let p = ChannelPoint::new(t, va)?;
        Ok(key_rate(q.spec, &p, InfoUnit::Nats)?.rate)
    };

    let lo = THRESHOLD_BRACKET_EPS;
    let hi = 1.0 - THRESHOLD_BRACKET_EPS;
    let grid = |k: usize| lo + (hi - lo) * k as f64 / THRESHOLD_SCAN_POINTS as f64;

    if rate(hi)? < 0.0 {
        return Err(CoreError::NoRoot(format!(
            "{} rate is negative on the whole bracket at V_A={va}",
            q.spec
        )));
    }
    // walk down from the top to the last negative → non-negative crossing
    let mut upper = hi;
    let mut bracket = None;
    for k in (0..THRESHOLD_SCAN_POINTS).rev() {
        let t = grid(k);
        if rate(t)? < 0.0 {
            bracket = Some((t, upper));
            break;
        }
        upper = t;
    }
    let (mut a, mut b) = bracket.ok_or_else(|| {
        CoreError::NoRoot(format!(
            "{} rate is non-negative on the whole bracket at V_A={va}",
            q.spec
        ))
    })?;
    while b - a > THRESHOLD_TOL {
        let mid = 0.5 * (a + b);
        if rate(mid)? < 0.0 {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

/// Losses in dB for a transmission, `−10·log₁₀ T`.
pub fn losses_db(t: f64) -> f64 {
    // 0 − x keeps T = 1 at +0 dB
    0.0 - 10.0 * t.log10()
}
