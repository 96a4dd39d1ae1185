use serde::Serialize;

use crate::error::Result;
use crate::gaussian::{channel_variances, ChannelPoint};
use crate::rates::{
    heterodyne_conditional_variance, homodyne_conditional_variances, mutual_info_bob, Measurement,
};
use crate::unit::InfoUnit;

use super::moments::{collect_moments, Estimate, MomentReport};
use super::sim::{simulate_batch, Detection, SampleBatch, SimConfig};

/// Rows with `|z|` above this are flagged.
pub const Z_FLAG: f64 = 4.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationRow {
    pub quantity: String,
    pub analytic: f64,
    pub empirical: f64,
    pub std_err: f64,
    pub z: f64,
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub transmission: f64,
    pub va: f64,
    pub detection: Detection,
    pub n: usize,
    pub seed: u64,
    pub rows: Vec<ValidationRow>,
}

impl ValidationReport {
    pub fn row(&self, quantity: &str) -> Option<&ValidationRow> {
        self.rows.iter().find(|r| r.quantity == quantity)
    }

    pub fn flagged(&self) -> impl Iterator<Item = &ValidationRow> {
        self.rows.iter().filter(|r| r.flagged)
    }
}

fn z_score(diff: f64, se: f64) -> f64 {
    if se > 0.0 {
        diff / se
    } else if diff == 0.0 {
        0.0
    } else {
        f64::INFINITY.copysign(diff)
    }
}

fn row(quantity: &str, analytic: f64, e: Estimate) -> ValidationRow {
    let z = z_score(e.value - analytic, e.std_err);
    ValidationRow {
        quantity: quantity.to_string(),
        analytic,
        empirical: e.value,
        std_err: e.std_err,
        z,
        flagged: !(z.abs() <= Z_FLAG),
    }
}

/// Simulates `n` pulses at `p` and sets every tracked empirical moment
/// against its closed form. Shannon informations are in nats.
pub fn validation_report(
    p: &ChannelPoint,
    detection: Detection,
    n: usize,
    seed: u64,
) -> Result<ValidationReport> {
    let config = SimConfig {
        transmission: p.transmission(),
        v_mod: p.v_mod(),
        detection,
        n,
        seed,
    };
    validate_batch(p, &simulate_batch(&config)?)
}

/// Same as [`validation_report`] for an already simulated batch, which
/// must have been drawn at `p`.
pub fn validate_batch(p: &ChannelPoint, batch: &SampleBatch) -> Result<ValidationReport> {
    let t = p.transmission();
    let va = p.va();
    let (vb, ve) = channel_variances(p);
    let cov_be = (t * (1.0 - t)).sqrt() * (va - 1.0);
    let (detection, n, seed) = (batch.config.detection, batch.len(), batch.config.seed);
    let m: MomentReport = collect_moments(batch, p.v_mod() > 0.0)?;
    let est = |name: &str| m.get(name).expect("tracked moment");

    let mut rows = vec![
        row("V_A(Q)", va, est("var_a_q")),
        row("V_A(P)", va, est("var_a_p")),
        row("V_B(Q)", vb, est("var_b_q")),
        row("V_B(P)", vb, est("var_b_p")),
        row("V_E(Q)", ve, est("var_e_q")),
        row("V_E(P)", ve, est("var_e_p")),
        row("Cov(B,E)(Q)", cov_be, est("cov_be_q")),
        row("Cov(B,E)(P)", cov_be, est("cov_be_p")),
    ];
    match detection {
        Detection::Heterodyne => {
            let vc = heterodyne_conditional_variance(p)?;
            rows.extend([
                row("V(Y_Q)", vb + 1.0, est("var_y_q")),
                row("V(Y_P)", vb + 1.0, est("var_y_p")),
                row("V(Y_Q|X_Q)", 2.0, est("cond_y_q|x_q")),
                row("V(Y_P|X_P)", 2.0, est("cond_y_p|x_p")),
                row("V(E_Q|Y_Q)", vc, est("cond_e_q|y_q")),
                row("V(E_P|Y_P)", vc, est("cond_e_p|y_p")),
                row(
                    "I(X;Y)",
                    mutual_info_bob(Measurement::Heterodyne, p, InfoUnit::Nats),
                    est("mi_xy"),
                ),
            ]);
        }
        Detection::Homodyne => {
            let (vc_same, vc_other) = homodyne_conditional_variances(p)?;
            rows.extend([
                row("V(Y)", vb, est("var_y")),
                row("V(Y|X)", 1.0, est("cond_y|x")),
                row("V(Q_E|Y)", vc_same, est("cond_qe|y")),
                row("V(P_E|Y)", vc_other, est("cond_pe|y")),
                row(
                    "I(X;Y)",
                    mutual_info_bob(Measurement::Homodyne, p, InfoUnit::Nats),
                    est("mi_xy"),
                ),
            ]);
        }
    }
    Ok(ValidationReport {
        transmission: t,
        va,
        detection,
        n,
        seed,
        rows,
    })
}
