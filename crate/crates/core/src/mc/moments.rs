use serde::Serialize;

use crate::error::{CoreError, Result};
use crate::unit::InfoUnit;

use super::sim::{Detection, SampleBatch};

/// A sample statistic with its large-sample standard error (Gaussian
/// normal theory).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub std_err: f64,
}

fn mean(u: &[f64]) -> f64 {
    u.iter().sum::<f64>() / u.len() as f64
}

fn need(n: usize, min: usize) -> Result<()> {
    if n < min {
        return Err(CoreError::Degenerate(format!(
            "need at least {min} samples, got {n}"
        )));
    }
    Ok(())
}

/// Centered second moments `(S_uu, S_ww, S_uw)`, un-normalized.
fn centered_sums(u: &[f64], w: &[f64]) -> (f64, f64, f64) {
    let (mu, mw) = (mean(u), mean(w));
    u.iter().zip(w).fold((0.0, 0.0, 0.0), |(suu, sww, suw), (a, b)| {
        let (da, db) = (a - mu, b - mw);
        (suu + da * da, sww + db * db, suw + da * db)
    })
}

/// Unbiased sample variance; standard error `s²·sqrt(2/(n−1))`.
pub fn sample_variance(u: &[f64]) -> Result<Estimate> {
    need(u.len(), 2)?;
    let m = mean(u);
    let df = (u.len() - 1) as f64;
    let s2 = u.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / df;
    Ok(Estimate {
        value: s2,
        std_err: s2 * (2.0 / df).sqrt(),
    })
}

pub fn covariance(u: &[f64], w: &[f64]) -> Result<Estimate> {
    assert_eq!(u.len(), w.len(), "paired columns differ in length");
    need(u.len(), 2)?;
    let df = (u.len() - 1) as f64;
    let (suu, sww, suw) = centered_sums(u, w);
    let (vu, vw, c) = (suu / df, sww / df, suw / df);
    Ok(Estimate {
        value: c,
        std_err: ((vu * vw + c * c) / df).sqrt(),
    })
}

/// Residual variance of the least-squares regression of `u` on `w`.
pub fn conditional_variance(u: &[f64], w: &[f64]) -> Result<Estimate> {
    assert_eq!(u.len(), w.len(), "paired columns differ in length");
    need(u.len(), 3)?;
    let (suu, sww, suw) = centered_sums(u, w);
    if sww == 0.0 {
        return Err(CoreError::Degenerate(
            "regressor has zero variance".into(),
        ));
    }
    let df = (u.len() - 2) as f64;
    let resid = ((suu - suw * suw / sww) / df).max(0.0);
    Ok(Estimate {
        value: resid,
        std_err: resid * (2.0 / df).sqrt(),
    })
}

/// Shannon mutual information of a Gaussian channel, per quadrature:
/// `½·log(V / V_cond)`.
pub fn gaussian_mi(v: f64, v_cond: f64, unit: InfoUnit) -> Result<f64> {
    if !(v_cond > 0.0 && v >= v_cond) {
        return Err(CoreError::domain(format!(
            "Gaussian MI needs V >= V_cond > 0, got V={v}, V_cond={v_cond}"
        )));
    }
    Ok(unit.from_nats(0.5 * (v / v_cond).ln()))
}

/// Plug-in Gaussian MI between two columns, `−½·log(1 − ρ²)`, in nats.
///
/// The standard error `sqrt(ρ²/n + 1/(2n²))` follows the delta method for
/// ρ away from 0 and the `χ²₁/(2n)` law of the estimator at ρ = 0.
pub fn empirical_mi(u: &[f64], w: &[f64]) -> Result<Estimate> {
    assert_eq!(u.len(), w.len(), "paired columns differ in length");
    need(u.len(), 3)?;
    let (suu, sww, suw) = centered_sums(u, w);
    if suu == 0.0 || sww == 0.0 {
        return Err(CoreError::Degenerate("column has zero variance".into()));
    }
    let rho2 = (suw * suw / (suu * sww)).min(1.0);
    let n = u.len() as f64;
    Ok(Estimate {
        value: -0.5 * (-rho2).ln_1p(),
        std_err: (rho2 / n + 0.5 / (n * n)).sqrt(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentReport {
    pub n: usize,
    pub entries: Vec<(String, Estimate)>,
}

impl MomentReport {
    pub fn get(&self, name: &str) -> Option<Estimate> {
        self.entries
            .iter()
            .find(|(k, _)| k == name)
            .map(|(_, e)| *e)
    }

    fn push(&mut self, name: &str, e: Estimate) {
        self.entries.push((name.to_string(), e));
    }
}

/// Variances, covariances, conditional variances and Shannon MI of a batch.
///
/// Heterodyne batches report each quadrature separately (`var_y_q`,
/// `cond_y_q|x_q`, `cond_e_q|y_q`, …). Homodyne batches are sifted first:
/// `y` is Bob's measured value, `x` Alice's value in that basis, and
/// `cond_qe|y` / `cond_pe|y` condition Eve's same and other quadrature on
/// it. `mi_xy` is the total Shannon information in nats (both quadratures
/// for heterodyne).
///
/// A batch without modulation (`V_mod = 0`) has a constant Alice column and
/// gives a degenerate-input error.
pub fn estimate_moments(batch: &SampleBatch) -> Result<MomentReport> {
    collect_moments(batch, true)
}

/// With `condition_on_alice = false`, Alice's data is treated as carrying
/// no information: `V(Y|X)` falls back to `V(Y)` and `mi_xy` is 0.
pub(crate) fn collect_moments(batch: &SampleBatch, condition_on_alice: bool) -> Result<MomentReport> {
    need(batch.len(), 3)?;
    let mut r = MomentReport {
        n: batch.len(),
        entries: Vec::new(),
    };
    let a_q = batch.column(|p| p.a_q);
    let a_p = batch.column(|p| p.a_p);
    let b_q = batch.column(|p| p.b_q);
    let b_p = batch.column(|p| p.b_p);
    let e_q = batch.column(|p| p.e_q);
    let e_p = batch.column(|p| p.e_p);
    r.push("var_a_q", sample_variance(&a_q)?);
    r.push("var_a_p", sample_variance(&a_p)?);
    r.push("var_b_q", sample_variance(&b_q)?);
    r.push("var_b_p", sample_variance(&b_p)?);
    r.push("var_e_q", sample_variance(&e_q)?);
    r.push("var_e_p", sample_variance(&e_p)?);
    r.push("cov_be_q", covariance(&b_q, &e_q)?);
    r.push("cov_be_p", covariance(&b_p, &e_p)?);

    let given_x = |y: &[f64], x: &[f64]| -> Result<(Estimate, Estimate)> {
        if condition_on_alice {
            Ok((conditional_variance(y, x)?, empirical_mi(y, x)?))
        } else {
            Ok((sample_variance(y)?, Estimate { value: 0.0, std_err: 0.0 }))
        }
    };

    match batch.config.detection {
        Detection::Heterodyne => {
            let y_q = batch.column(|p| p.y_q.expect("heterodyne outcome"));
            let y_p = batch.column(|p| p.y_p.expect("heterodyne outcome"));
            let x_q = batch.column(|p| p.x_q);
            let x_p = batch.column(|p| p.x_p);
            r.push("var_y_q", sample_variance(&y_q)?);
            r.push("var_y_p", sample_variance(&y_p)?);
            let (cq, mq) = given_x(&y_q, &x_q)?;
            let (cp, mp) = given_x(&y_p, &x_p)?;
            r.push("cond_y_q|x_q", cq);
            r.push("cond_y_p|x_p", cp);
            r.push("cond_e_q|y_q", conditional_variance(&e_q, &y_q)?);
            r.push("cond_e_p|y_p", conditional_variance(&e_p, &y_p)?);
            r.push(
                "mi_xy",
                Estimate {
                    value: mq.value + mp.value,
                    std_err: mq.std_err.hypot(mp.std_err),
                },
            );
        }
        Detection::Homodyne => {
            let sifted: Vec<_> = batch.records.iter().filter_map(|p| p.sifted()).collect();
            need(sifted.len(), 3)?;
            let y: Vec<f64> = sifted.iter().map(|s| s.0).collect();
            let x: Vec<f64> = sifted.iter().map(|s| s.1).collect();
            let e_same: Vec<f64> = sifted.iter().map(|s| s.2).collect();
            let e_other: Vec<f64> = sifted.iter().map(|s| s.3).collect();
            r.push("var_y", sample_variance(&y)?);
            let (c, mi) = given_x(&y, &x)?;
            r.push("cond_y|x", c);
            r.push("cond_qe|y", conditional_variance(&e_same, &y)?);
            r.push("cond_pe|y", conditional_variance(&e_other, &y)?);
            r.push("mi_xy", mi);
        }
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mc::sim::{simulate_batch, SimConfig};

    #[test]
    fn constant_regressor_is_degenerate() {
        let u = [1.0, 2.0, 3.0, 4.0];
        let w = [5.0; 4];
        assert!(matches!(conditional_variance(&u, &w), Err(CoreError::Degenerate(_))));
        assert!(matches!(empirical_mi(&u, &w), Err(CoreError::Degenerate(_))));
        assert!(sample_variance(&[1.0]).is_err());
    }

    #[test]
    fn unmodulated_batch_is_degenerate() {
        let c = SimConfig {
            transmission: 1.0,
            v_mod: 0.0,
            detection: Detection::Heterodyne,
            n: 100,
            seed: 0,
        };
        let batch = simulate_batch(&c).unwrap();
        assert!(matches!(estimate_moments(&batch), Err(CoreError::Degenerate(_))));
        assert!(collect_moments(&batch, false).is_ok());
    }

    #[test]
    fn exact_linear_relation_leaves_no_residual() {
        let w: Vec<f64> = (0..50).map(|i| i as f64).collect();
        let u: Vec<f64> = w.iter().map(|x| 3.0 * x - 2.0).collect();
        assert!(conditional_variance(&u, &w).unwrap().value < 1e-20);
    }

    #[test]
    fn gaussian_mi_examples() {
        assert_eq!(gaussian_mi(3.0, 3.0, InfoUnit::Nats).unwrap(), 0.0);
        let vb = 17.0;
        let two_quadratures = 2.0 * gaussian_mi(vb + 1.0, 2.0, InfoUnit::Nats).unwrap();
        assert!((two_quadratures - ((vb + 1.0) / 2.0).ln()).abs() < 1e-15);
        assert!(gaussian_mi(1.0, 2.0, InfoUnit::Nats).is_err());
        assert!(gaussian_mi(1.0, 0.0, InfoUnit::Nats).is_err());
    }

    #[test]
    fn heterodyne_conditionals() {
        let (t, va) = (0.6, 21.0);
        let c = SimConfig {
            transmission: t,
            v_mod: va - 1.0,
            detection: Detection::Heterodyne,
            n: 1_000_000,
            seed: 11,
        };
        let r = estimate_moments(&simulate_batch(&c).unwrap()).unwrap();
        let cy = r.get("cond_y_q|x_q").unwrap().value;
        assert!((cy / 2.0 - 1.0).abs() < 0.02);
        let expected = (2.0 - t + t / va) / (t + (2.0 - t) / va);
        let ce = r.get("cond_e_q|y_q").unwrap().value;
        assert!((ce / expected - 1.0).abs() < 0.02);
    }
}
