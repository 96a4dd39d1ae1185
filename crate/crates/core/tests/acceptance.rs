//! Exit criteria for the key-rate engine. Each test prints one
//! `criterion N: PASS|FAIL ...` line; run with `--nocapture` to see them.

use std::f64::consts::E;

use cvqkd_core::compare::run_compare;
use cvqkd_core::gaussian::{
    channel_variances, entropy_g, joint_output_covariance, symplectic_eigenvalues,
    two_mode_entropy, ChannelPoint,
};
use cvqkd_core::mc::{validation_report, Detection};
use cvqkd_core::rates::{
    key_rate, losses_db, mutual_info_bob, threshold_transmission, Direction, Measurement,
    ModulationRegime, ProtocolSpec, ThresholdQuery,
};
use cvqkd_core::InfoUnit;

const NATS: InfoUnit = InfoUnit::Nats;

fn report(id: &str, ok: bool, detail: String) {
    println!(
        "criterion {id}: {} {detail}",
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(ok, "criterion {id} failed: {detail}");
}

fn pt(t: f64, va: f64) -> ChannelPoint {
    ChannelPoint::new(t, va).unwrap()
}

fn rate(d: Direction, m: Measurement, t: f64, va: f64) -> f64 {
    key_rate(ProtocolSpec::new(d, m), &pt(t, va), NATS).unwrap().rate
}

fn threshold(d: Direction, m: Measurement, regime: ModulationRegime) -> f64 {
    threshold_transmission(ThresholdQuery {
        spec: ProtocolSpec::new(d, m),
        regime,
    })
    .unwrap()
}

#[test]
fn criterion_01_heterodyne_direct_threshold() {
    let (d, m) = (Direction::Direct, Measurement::Heterodyne);
    let exact = E / (E + 1.0);
    let analytic = threshold(d, m, ModulationRegime::InfiniteModulation);
    let finite = threshold(d, m, ModulationRegime::Finite(1e8));
    let db = losses_db(analytic);
    let ok = (analytic - exact).abs() < 1e-12 && (finite - exact).abs() < 1e-5 && (db - 1.4).abs() < 0.05;
    report(
        "1",
        ok,
        format!("T_inf={analytic:.15} T(V_A=1e8)={finite:.10} losses={db:.4} dB"),
    );
}

#[test]
fn criterion_02_homodyne_unconditional_threshold() {
    let (d, m) = (Direction::Unconditional, Measurement::Homodyne);
    let exact = E * E / (E * E + 4.0);
    let analytic = threshold(d, m, ModulationRegime::InfiniteModulation);
    let finite = threshold(d, m, ModulationRegime::Finite(1e8));
    let db = losses_db(analytic);
    let ok = (analytic - exact).abs() < 1e-12 && (finite - exact).abs() < 1e-4 && (db - 1.9).abs() < 0.05;
    report(
        "2",
        ok,
        format!("T_inf={analytic:.15} T(V_A=1e8)={finite:.10} losses={db:.4} dB"),
    );
}

#[test]
fn criterion_03_three_db_limit() {
    let hom = rate(Direction::Direct, Measurement::Homodyne, 0.5, 1e8);
    let coll = rate(Direction::Direct, Measurement::Collective, 0.5, 1e8);
    let ok = hom.abs() < 3e-3 && coll.abs() < 1e-6;
    report("3", ok, format!("hom={hom:e} nats coll={coll:e} nats"));
}

#[test]
fn criterion_04_holevo_heterodyne_gap() {
    // T = 1 puts V_B = V_A
    let p = pt(1.0, 1e6);
    assert_eq!(channel_variances(&p).0, 1e6);
    let gap = mutual_info_bob(Measurement::Collective, &p, NATS)
        - mutual_info_bob(Measurement::Heterodyne, &p, NATS);
    let gap_bits = mutual_info_bob(Measurement::Collective, &p, InfoUnit::Bits)
        - mutual_info_bob(Measurement::Heterodyne, &p, InfoUnit::Bits);
    let ok = (gap - 1.0).abs() < 1e-4;
    report("4", ok, format!("gap={gap:.8} nats ({gap_bits:.6} bits)"));
}

#[test]
fn criterion_05_strong_loss_limits() {
    let (t, va) = (1e-3, 1e7);
    let coll = rate(Direction::Reverse, Measurement::Collective, t, va) / t - 1.0;
    let het = rate(Direction::Reverse, Measurement::Heterodyne, t, va) / (t / 2.0) - 1.0;
    let hom = rate(Direction::Reverse, Measurement::Homodyne, t, va) / (t / 2.0) - 1.0;
    let ok = coll.abs() < 0.02 && het.abs() < 0.02 && hom.abs() < 0.02;
    report(
        "5",
        ok,
        format!("relative deviations coll={coll:.2e} het={het:.2e} hom={hom:.2e}"),
    );
}

#[test]
fn criterion_06_symplectic_oracle() {
    let mut worst_entropy = 0.0f64;
    let mut worst_nu = 0.0f64;
    for i in 0..20 {
        let t = 0.05 + 0.9 * i as f64 / 19.0;
        for k in 0..20 {
            let va = 10f64.powf(1.1f64.log10() + (4.0 - 1.1f64.log10()) * k as f64 / 19.0);
            let cov = joint_output_covariance(&pt(t, va));
            let (hi, lo) = symplectic_eigenvalues(&cov).unwrap();
            worst_nu = worst_nu.max((hi - va).abs()).max((lo - 1.0).abs());
            let h_be = two_mode_entropy(&cov, NATS).unwrap();
            worst_entropy = worst_entropy.max((h_be - entropy_g(va, NATS).unwrap()).abs());
        }
    }
    let ok = worst_entropy < 1e-9 && worst_nu < 1e-9;
    report(
        "6",
        ok,
        format!("max |H(BE)-H(A)|={worst_entropy:.2e} max |nu-(V_A,1)|={worst_nu:.2e}"),
    );
}

fn thermal_entropy_nats(nbar: f64) -> f64 {
    let ratio = nbar / (nbar + 1.0);
    let (ln_nbar, ln_np1) = (nbar.ln(), (nbar + 1.0).ln());
    let (mut h, mut tail, mut n) = (0.0, 1.0, 0u64);
    while tail >= 1e-12 {
        let ln_p = n as f64 * ln_nbar - (n + 1) as f64 * ln_np1;
        h -= ln_p.exp() * ln_p;
        tail *= ratio;
        n += 1;
    }
    h
}

#[test]
fn criterion_07_fock_oracle() {
    let mut worst = 0.0f64;
    for nbar in [0.1, 1.0, 5.0, 50.0] {
        let g = entropy_g(2.0 * nbar + 1.0, NATS).unwrap();
        worst = worst.max((g - thermal_entropy_nats(nbar)).abs());
    }
    report("7", worst < 1e-9, format!("max deviation {worst:.2e} nats"));
}

#[test]
fn criterion_08_monte_carlo_validation() {
    let n = 1_000_000;
    let seed = 20_240_601;
    let mut worst_z = 0.0f64;
    let mut worst_row = String::new();
    let mut worst_mi = 0.0f64;
    for (t, va) in [(0.5, 11.0), (0.9, 101.0), (0.1, 101.0)] {
        let p = pt(t, va);
        for d in [Detection::Heterodyne, Detection::Homodyne] {
            let rep = validation_report(&p, d, n, seed).unwrap();
            for r in &rep.rows {
                if r.z.abs() > worst_z {
                    worst_z = r.z.abs();
                    worst_row = format!("{} at T={t} V_A={va} {d}", r.quantity);
                }
            }
            if d == Detection::Heterodyne {
                let (vb, _) = channel_variances(&p);
                let mi = rep.row("I(X;Y)").unwrap().empirical;
                worst_mi = worst_mi.max((mi / ((vb + 1.0) / 2.0).ln() - 1.0).abs());
            }
        }
    }
    let ok = worst_z < 4.0 && worst_mi < 0.02;
    report(
        "8",
        ok,
        format!("max |z|={worst_z:.3} ({worst_row}); max het MI rel. error {worst_mi:.2e}"),
    );
}

const COMPARE_TS: [f64; 3] = [0.3, 0.5, 0.8];
const COMPARE_VAS: [f64; 5] = [1e4, 1e5, 1e6, 1e7, 1e8];

/// Runs the comparison for every protocol with the given measurement and
/// returns (fitted C values, slopes).
fn compare_slopes(measurements: &[Measurement]) -> (Vec<f64>, Vec<(String, f64)>) {
    let mut cs = Vec::new();
    let mut slopes = Vec::new();
    for &m in measurements {
        for d in Direction::ALL {
            let spec = ProtocolSpec::new(d, m);
            let res = run_compare(spec, &COMPARE_TS, &COMPARE_VAS, NATS).unwrap();
            cs.push(res.summary.fitted_c);
            assert!(!res.summary.slopes.is_empty(), "{spec}: no slope fitted");
            for s in res.summary.slopes {
                slopes.push((format!("{spec}@T={}", s.t), s.slope));
            }
        }
    }
    (cs, slopes)
}

#[test]
fn criterion_09a_asymptotic_order_collective_heterodyne() {
    let (cs, slopes) = compare_slopes(&[Measurement::Collective, Measurement::Heterodyne]);
    let worst = slopes
        .iter()
        .map(|(k, s)| (k.clone(), (s + 1.0).abs()))
        .fold((String::new(), 0.0f64), |a, b| if b.1 > a.1 { b } else { a });
    let ok = cs.iter().all(|c| c.is_finite()) && worst.1 <= 0.1;
    report(
        "9a",
        ok,
        format!(
            "slopes {:?}; worst |slope+1|={:.4} ({}); max C={:.3e}",
            slopes.iter().map(|s| (s.1 * 1e4).round() / 1e4).collect::<Vec<_>>(),
            worst.1,
            worst.0,
            cs.iter().cloned().fold(0.0, f64::max)
        ),
    );
}

#[test]
fn criterion_09b_asymptotic_order_homodyne() {
    let (cs, slopes) = compare_slopes(&[Measurement::Homodyne]);
    let worst = slopes
        .iter()
        .map(|(k, s)| (k.clone(), (s + 0.5).abs()))
        .fold((String::new(), 0.0f64), |a, b| if b.1 > a.1 { b } else { a });
    let ok = cs.iter().all(|c| c.is_finite()) && worst.1 <= 0.1;
    report(
        "9b",
        ok,
        format!(
            "slopes {:?} (target -0.5 ± 0.1); worst ({}); max C={:.3e}",
            slopes.iter().map(|s| (s.1 * 1e4).round() / 1e4).collect::<Vec<_>>(),
            worst.0,
            cs.iter().cloned().fold(0.0, f64::max)
        ),
    );
}

#[test]
fn criterion_10_hierarchy_and_reverse_positivity() {
    let mut violations = Vec::new();
    for i in 1..=50 {
        let t = i as f64 / 50.0;
        for k in 0..20 {
            let va = 10f64.powf(1.1f64.log10() + (6.0 - 1.1f64.log10()) * k as f64 / 19.0);
            for m in Measurement::ALL {
                let direct = rate(Direction::Direct, m, t, va);
                let reverse = rate(Direction::Reverse, m, t, va);
                let uncond = rate(Direction::Unconditional, m, t, va);
                let tol = 1e-12 * (1.0 + direct.abs().max(reverse.abs()));
                if uncond > direct + tol {
                    violations.push(format!("S>direct {m} T={t} V_A={va}"));
                }
                if uncond > reverse + tol {
                    violations.push(format!("S>reverse {m} T={t} V_A={va}"));
                }
                if !(reverse > 0.0) {
                    violations.push(format!("reverse<=0 {m} T={t} V_A={va}"));
                }
            }
        }
    }
    report(
        "10",
        violations.is_empty(),
        format!("{} violations over 50x20 grid {:?}", violations.len(), violations.iter().take(5).collect::<Vec<_>>()),
    );
}
