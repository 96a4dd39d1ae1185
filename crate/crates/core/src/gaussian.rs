//! Single- and two-mode Gaussian-state quantities in shot-noise units
//! (vacuum quadrature variance = 1).
//!
//! The beamsplitter convention used throughout is
//!
//! ```text
//! B = √T·A + √(1−T)·N
//! E = √(1−T)·A − √T·N
//! ```
//!
//! with `N` a vacuum mode. The phase of the reflected port is otherwise
//! free; entropies depend only on the symplectic invariants, which do not
//! see the sign.

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::unit::InfoUnit;

/// Below this distance from 1 the entropy function returns its limit 0.
pub const G_PURE_CUTOFF: f64 = 1e-12;

/// Slack accepted on the bona-fide condition ν ≥ 1.
pub const BONA_FIDE_TOL: f64 = 1e-9;

/// von Neumann entropy, in nats, of a single-mode Gaussian state with
/// symmetrized variance `v`.
pub(crate) fn g_nats(v: f64) -> Result<f64> {
    if v.is_nan() || v < 1.0 - G_PURE_CUTOFF {
        return Err(CoreError::domain(format!(
            "entropy function needs V >= 1, got {v}"
        )));
    }
    if v == f64::INFINITY {
        return Ok(f64::INFINITY);
    }
    let half_excess = (v - 1.0) / 2.0;
    if v - 1.0 < G_PURE_CUTOFF {
        return Ok(0.0);
    }
    // log((V+1)/2) + (V-1)/2 · log((V+1)/(V-1)), both logs through ln_1p
    Ok(half_excess.ln_1p() + half_excess * (1.0 / half_excess).ln_1p())
}

/// `g(V) = ((V+1)/2)·log((V+1)/2) − ((V−1)/2)·log((V−1)/2)`.
///
/// Stable from `V = 1` (value 0) up to at least `V = 1e12`. Inputs within
/// `1e-12` below 1 are clamped to 1; anything smaller is a domain error.
pub fn entropy_g(v: f64, unit: InfoUnit) -> Result<f64> {
    g_nats(v).map(|h| unit.from_nats(h))
}

pub(crate) fn g_asymptotic_nats(v: f64) -> Result<f64> {
    if v.is_nan() || v <= 0.0 {
        return Err(CoreError::domain(format!(
            "asymptotic entropy needs V > 0, got {v}"
        )));
    }
    Ok(v.ln() + 1.0 - std::f64::consts::LN_2)
}

/// Large-variance form `log V + log(e/2)` of [`entropy_g`].
///
/// The gap to the exact value is O(1/V); in practice it falls off as
/// 1/(6V²) once V is large.
pub fn entropy_g_asymptotic(v: f64, unit: InfoUnit) -> Result<f64> {
    g_asymptotic_nats(v).map(|h| unit.from_nats(h))
}

/// `sqrt(V_Q · V_P)`, the variance that fixes the entropy of a Gaussian
/// state regardless of its squeezing.
pub fn symmetrized_variance(v_q: f64, v_p: f64) -> Result<f64> {
    if !(v_q > 0.0 && v_p > 0.0) {
        return Err(CoreError::domain(format!(
            "symmetrized variance needs positive inputs, got ({v_q}, {v_p})"
        )));
    }
    Ok((v_q * v_p).sqrt())
}

/// Channel transmission together with Alice's total per-quadrature
/// variance `V_A = V_mod + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelPoint {
    transmission: f64,
    va: f64,
}

impl ChannelPoint {
    pub fn new(transmission: f64, va: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&transmission) {
            return Err(CoreError::domain(format!(
                "transmission must lie in [0, 1], got {transmission}"
            )));
        }
        if !(va >= 1.0) || !va.is_finite() {
            return Err(CoreError::domain(format!(
                "V_A must be finite and >= 1, got {va}"
            )));
        }
        Ok(Self { transmission, va })
    }

    /// Build from the modulation variance `V_mod = V_A − 1`.
    pub fn from_modulation(transmission: f64, v_mod: f64) -> Result<Self> {
        if !(v_mod >= 0.0) {
            return Err(CoreError::domain(format!(
                "modulation variance must be >= 0, got {v_mod}"
            )));
        }
        Self::new(transmission, v_mod + 1.0)
    }

    pub fn transmission(&self) -> f64 {
        self.transmission
    }

    pub fn va(&self) -> f64 {
        self.va
    }

    pub fn v_mod(&self) -> f64 {
        self.va - 1.0
    }
}

/// `(V_B, V_E) = (T·V_A + 1 − T, (1−T)·V_A + T)`.
pub fn channel_variances(p: &ChannelPoint) -> (f64, f64) {
    let t = p.transmission;
    let va = p.va;
    (t * va + 1.0 - t, (1.0 - t) * va + t)
}

type Block = [[f64; 2]; 2];

fn det2(m: &Block) -> f64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

/// Covariance matrix of the joint Bob/Eve state, quadrature order
/// `(Q_B, P_B, Q_E, P_E)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoModeCovariance {
    m: [[f64; 4]; 4],
}

impl TwoModeCovariance {
    /// Checks symmetry and positive definiteness. The bona-fide condition
    /// is checked by [`symplectic_eigenvalues`].
    pub fn from_matrix(m: [[f64; 4]; 4]) -> Result<Self> {
        let scale = m
            .iter()
            .flatten()
            .fold(0.0f64, |acc, x| acc.max(x.abs()))
            .max(1.0);
        for i in 0..4 {
            for j in (i + 1)..4 {
                if (m[i][j] - m[j][i]).abs() > 1e-12 * scale {
                    return Err(CoreError::Numeric(format!(
                        "covariance not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        let cov = Self { m };
        // leading minors of A, then the Schur complement
        let a = cov.block(0, 0);
        let s = cov.schur_complement();
        if !(a[0][0] > 0.0 && det2(&a) > 0.0 && s[0][0] > 0.0 && det2(&s) > 0.0) {
            return Err(CoreError::Numeric(
                "covariance not positive definite".into(),
            ));
        }
        Ok(cov)
    }

    pub fn matrix(&self) -> &[[f64; 4]; 4] {
        &self.m
    }

    fn block(&self, row: usize, col: usize) -> Block {
        let (r, c) = (2 * row, 2 * col);
        [
            [self.m[r][c], self.m[r][c + 1]],
            [self.m[r + 1][c], self.m[r + 1][c + 1]],
        ]
    }

    /// `B − Cᵀ A⁻¹ C`.
    fn schur_complement(&self) -> Block {
        let a = self.block(0, 0);
        let b = self.block(1, 1);
        let c = self.block(0, 1);
        let det_a = det2(&a);
        let a_inv = [
            [a[1][1] / det_a, -a[0][1] / det_a],
            [-a[1][0] / det_a, a[0][0] / det_a],
        ];
        let mut out = b;
        for i in 0..2 {
            for j in 0..2 {
                let mut acc = 0.0;
                for k in 0..2 {
                    for l in 0..2 {
                        acc += c[k][i] * a_inv[k][l] * c[l][j];
                    }
                }
                out[i][j] -= acc;
            }
        }
        out
    }

    /// Full determinant via `det A · det(B − Cᵀ A⁻¹ C)`, which keeps the
    /// cancellation inside 2×2 blocks.
    pub fn determinant(&self) -> f64 {
        det2(&self.block(0, 0)) * det2(&self.schur_complement())
    }
}

/// Covariance of the two beamsplitter outputs when Alice's thermal mode of
/// variance `V_A` is mixed with vacuum.
pub fn joint_output_covariance(p: &ChannelPoint) -> TwoModeCovariance {
    let (vb, ve) = channel_variances(p);
    let t = p.transmission;
    let c = (t * (1.0 - t)).sqrt() * (p.va - 1.0);
    TwoModeCovariance {
        m: [
            [vb, 0.0, c, 0.0],
            [0.0, vb, 0.0, c],
            [c, 0.0, ve, 0.0],
            [0.0, c, 0.0, ve],
        ],
    }
}

/// Symplectic eigenvalues `(ν₊, ν₋)` of a two-mode covariance matrix.
///
/// `ν±² = (Δ ± sqrt(Δ² − 4 det σ))/2` with `Δ = det A + det B + 2 det C`.
/// The smaller one is recovered as `sqrt(det σ)/ν₊` to avoid cancellation.
pub fn symplectic_eigenvalues(cov: &TwoModeCovariance) -> Result<(f64, f64)> {
    let a = cov.block(0, 0);
    let b = cov.block(1, 1);
    let c = cov.block(0, 1);
    let delta = det2(&a) + det2(&b) + 2.0 * det2(&c);
    let det = cov.determinant();
    let disc = delta * delta - 4.0 * det;
    let scale = (delta * delta).max(1.0);
    if disc < -BONA_FIDE_TOL * scale {
        return Err(CoreError::Numeric(format!(
            "negative symplectic discriminant {disc}"
        )));
    }
    let nu_plus_sq = (delta + disc.max(0.0).sqrt()) / 2.0;
    let nu_plus = nu_plus_sq.sqrt();
    let nu_minus = det.max(0.0).sqrt() / nu_plus;
    if nu_minus < 1.0 - BONA_FIDE_TOL {
        return Err(CoreError::Numeric(format!(
            "symplectic eigenvalue {nu_minus} violates the uncertainty principle"
        )));
    }
    Ok((nu_plus, nu_minus))
}

/// `g(ν₊) + g(ν₋)`, the von Neumann entropy of a two-mode Gaussian state.
pub fn two_mode_entropy(cov: &TwoModeCovariance, unit: InfoUnit) -> Result<f64> {
    let (hi, lo) = symplectic_eigenvalues(cov)?;
    // ν₋ may sit a rounding error below 1 after passing the bona-fide check
    Ok(unit.from_nats(g_nats(hi.max(1.0))? + g_nats(lo.max(1.0))?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Entropy of the thermal photon-number distribution with mean `nbar`,
    /// summed until the tail mass drops below 1e-12.
    fn fock_entropy(nbar: f64) -> f64 {
        if nbar == 0.0 {
            return 0.0;
        }
        let ratio = nbar / (nbar + 1.0);
        let (ln_nbar, ln_np1) = (nbar.ln(), (nbar + 1.0).ln());
        let mut h = 0.0;
        let mut tail = 1.0;
        let mut n = 0u64;
        while tail >= 1e-12 {
            let ln_p = n as f64 * ln_nbar - (n + 1) as f64 * ln_np1;
            h -= ln_p.exp() * ln_p;
            tail *= ratio;
            n += 1;
        }
        h
    }

    #[test]
    fn vacuum_has_zero_entropy() {
        assert_eq!(entropy_g(1.0, InfoUnit::Nats).unwrap(), 0.0);
        assert_eq!(entropy_g(1.0 - 5e-13, InfoUnit::Bits).unwrap(), 0.0);
    }

    #[test]
    fn below_vacuum_is_rejected() {
        assert!(matches!(entropy_g(0.999, InfoUnit::Nats), Err(CoreError::Domain(_))));
        assert!(entropy_g(f64::NAN, InfoUnit::Nats).is_err());
    }

    #[test]
    fn v3_is_two_bits() {
        let oracle = fock_entropy(1.0) / std::f64::consts::LN_2;
        assert!((oracle - 2.0).abs() < 1e-10);
        assert!((entropy_g(3.0, InfoUnit::Bits).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn fock_oracle_agrees() {
        for nbar in [0.1, 1.0, 5.0, 50.0] {
            let v = 2.0 * nbar + 1.0;
            let exact = entropy_g(v, InfoUnit::Nats).unwrap();
            assert!((exact - fock_entropy(nbar)).abs() < 1e-9, "nbar={nbar}");
        }
    }

    #[test]
    fn large_variance_matches_taylor_form() {
        let v = 200.0;
        let g = entropy_g(v, InfoUnit::Nats).unwrap();
        assert!((g - (v.ln() + (std::f64::consts::E / 2.0).ln())).abs() < 5e-3);
        for v in [100.0, 1e6] {
            let diff = entropy_g(v, InfoUnit::Nats).unwrap()
                - entropy_g_asymptotic(v, InfoUnit::Nats).unwrap();
            let bound = if v == 100.0 { 1e-2 } else { 2e-6 };
            assert!(diff.abs() < bound);
        }
    }

    #[test]
    fn asymptotic_form_zero_and_domain() {
        let v = 2.0 / std::f64::consts::E;
        assert!(entropy_g_asymptotic(v, InfoUnit::Nats).unwrap().abs() < 1e-15);
        assert!(entropy_g_asymptotic(0.0, InfoUnit::Nats).is_err());
        assert!(entropy_g_asymptotic(-1.0, InfoUnit::Nats).is_err());
    }

    #[test]
    fn stable_at_extreme_variance() {
        let v = 1e12;
        let g = entropy_g(v, InfoUnit::Nats).unwrap();
        let asym = v.ln() + 1.0 - std::f64::consts::LN_2;
        assert!(g.is_finite());
        assert!((g - asym).abs() < 1e-12);
    }

    #[test]
    fn increasing_and_positive_on_grid() {
        let mut prev = 0.0;
        for k in 0..=120 {
            // 1 + 1e-6 ... 1e6, log-spaced in V − 1
            let v = 1.0 + 10f64.powf(-6.0 + 12.0 * k as f64 / 120.0);
            let g = entropy_g(v, InfoUnit::Nats).unwrap();
            assert!(g > 0.0);
            assert!(g > prev, "not increasing at V={v}");
            prev = g;
        }
    }

    #[test]
    fn asymptotic_gap_bounded_by_one_over_v() {
        let mut c_fit = 0.0f64;
        for k in 0..=60 {
            let v = 10f64.powf(1.0 + 5.0 * k as f64 / 60.0);
            let gap = (entropy_g(v, InfoUnit::Nats).unwrap()
                - entropy_g_asymptotic(v, InfoUnit::Nats).unwrap())
            .abs();
            c_fit = c_fit.max(gap * v);
        }
        assert!(c_fit <= 1.0, "fitted constant {c_fit}");
    }

    #[test]
    fn symmetrized_variance_examples() {
        assert_eq!(symmetrized_variance(1.0, 1.0).unwrap(), 1.0);
        assert_eq!(symmetrized_variance(4.0, 9.0).unwrap(), 6.0);
        assert_eq!(symmetrized_variance(1.0, 49.0).unwrap(), 49f64.sqrt());
        assert!(symmetrized_variance(0.0, 2.0).is_err());
        assert!(symmetrized_variance(2.0, -1.0).is_err());
    }

    #[test]
    fn channel_variance_examples() {
        let cv = |t, va| channel_variances(&ChannelPoint::new(t, va).unwrap());
        assert_eq!(cv(1.0, 50.0), (50.0, 1.0));
        assert_eq!(cv(0.5, 11.0), (6.0, 6.0));
        let (vb, ve) = cv(0.8, 100.0);
        assert!((vb - 80.2).abs() < 1e-12 && (ve - 20.8).abs() < 1e-12);
    }

    #[test]
    fn channel_point_validation() {
        assert!(ChannelPoint::new(-0.1, 2.0).is_err());
        assert!(ChannelPoint::new(1.1, 2.0).is_err());
        assert!(ChannelPoint::new(0.5, 0.9).is_err());
        assert!(ChannelPoint::new(0.5, f64::NAN).is_err());
        let p = ChannelPoint::from_modulation(0.5, 10.0).unwrap();
        assert_eq!(p.va(), 11.0);
        assert!(ChannelPoint::from_modulation(0.5, -1.0).is_err());
    }

    #[test]
    fn covariance_examples() {
        let cov = joint_output_covariance(&ChannelPoint::new(1.0, 5.0).unwrap());
        let m = cov.matrix();
        assert_eq!(m[0][0], 5.0);
        assert_eq!(m[2][2], 1.0);
        assert_eq!(m[0][2], 0.0);

        let cov = joint_output_covariance(&ChannelPoint::new(0.5, 3.0).unwrap());
        let m = cov.matrix();
        assert!((m[0][0] - 2.0).abs() < 1e-15 && (m[2][2] - 2.0).abs() < 1e-15);
        assert!((m[0][2] - 1.0).abs() < 1e-15 && (m[1][3] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn symplectic_examples() {
        let id = TwoModeCovariance::from_matrix([
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
            [0.0, 0.0, 1.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
        ])
        .unwrap();
        assert_eq!(symplectic_eigenvalues(&id).unwrap(), (1.0, 1.0));

        let prod = TwoModeCovariance::from_matrix([
            [7.0, 0.0, 0.0, 0.0],
            [0.0, 7.0, 0.0, 0.0],
            [0.0, 0.0, 1.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
        ])
        .unwrap();
        let (hi, lo) = symplectic_eigenvalues(&prod).unwrap();
        assert!((hi - 7.0).abs() < 1e-12 && (lo - 1.0).abs() < 1e-12);

        let cov = joint_output_covariance(&ChannelPoint::new(0.3, 20.0).unwrap());
        let (hi, lo) = symplectic_eigenvalues(&cov).unwrap();
        assert!((hi - 20.0).abs() < 1e-9 && (lo - 1.0).abs() < 1e-9);
    }

    #[test]
    fn unphysical_covariance_rejected() {
        // squeezed below vacuum in both quadratures
        let bad = TwoModeCovariance::from_matrix([
            [0.5, 0.0, 0.0, 0.0],
            [0.0, 0.5, 0.0, 0.0],
            [0.0, 0.0, 1.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
        ])
        .unwrap();
        assert!(matches!(symplectic_eigenvalues(&bad), Err(CoreError::Numeric(_))));

        let asym = TwoModeCovariance::from_matrix([
            [1.0, 0.3, 0.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
            [0.0, 0.0, 1.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
        ]);
        assert!(asym.is_err());
    }

    proptest! {
        #[test]
        fn beamsplitter_preserves_entropy(t in 0.0f64..=1.0, log_va in 0.0f64..6.0) {
            let va = 10f64.powf(log_va);
            let p = ChannelPoint::new(t, va).unwrap();
            let h_be = two_mode_entropy(&joint_output_covariance(&p), InfoUnit::Nats).unwrap();
            prop_assert!((h_be - g_nats(va).unwrap()).abs() < 1e-9);
        }

        #[test]
        fn channel_variance_bookkeeping(t in 0.0f64..=1.0, va in 1.0f64..1e6) {
            let (vb, ve) = channel_variances(&ChannelPoint::new(t, va).unwrap());
            prop_assert!(vb >= 1.0 && ve >= 1.0);
            prop_assert!((vb + ve - (va + 1.0)).abs() <= 1e-12 * va);
            let (vb_swap, ve_swap) = channel_variances(&ChannelPoint::new(1.0 - t, va).unwrap());
            prop_assert!((vb - ve_swap).abs() <= 1e-12 * va);
            prop_assert!((ve - vb_swap).abs() <= 1e-12 * va);
        }
    }
}
