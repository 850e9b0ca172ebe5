//! Quantum illumination with absorption loss.
//!
//! A tripartite probe (thermal bath `A`, signal `B`, idler `C`) meets a weakly
//! reflecting object behind a lossy medium. The object and the medium act as
//! one beam splitter of amplitude reflectivity `eta_eff = eta e^{-gamma}`
//! mixing bath and signal; the idler waits in a lossless delay line. The
//! reflectivity `eta` is then estimated from the received bath-signal mode
//! and the idler.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::entanglement::{pts_eigenvalues, BipartiteCM};
use crate::error::{invalid, Error, Result};
use crate::estimation::{gaussian_qfi, GaussianFamily};
use crate::gaussian::{apply, beam_splitter, partial_trace, GaussianState, ModeSubset};

/// Operating point and step for the numeric QFI near `eta ~ 0`.
pub const NUMERIC_ETA0: f64 = 1e-4;
pub const NUMERIC_STEP: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QiParams {
    /// Signal photons `N_S`.
    pub n_s: f64,
    /// Bath photons `N_th`.
    pub n_th: f64,
    /// Absorption exponent `gamma = mu L`.
    pub gamma: f64,
    /// Object reflectivity.
    pub eta: f64,
}

impl QiParams {
    pub fn new(n_s: f64, n_th: f64, gamma: f64, eta: f64) -> Result<Self> {
        let p = QiParams { n_s, n_th, gamma, eta };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.n_s >= 0.0) {
            return Err(invalid("n_s", "signal photon number must be >= 0"));
        }
        if !(self.n_th >= 0.0) {
            return Err(invalid("n_th", "bath photon number must be >= 0"));
        }
        if !(self.gamma >= 0.0) {
            return Err(invalid("gamma", "absorption exponent must be >= 0"));
        }
        if !(0.0..=1.0).contains(&self.eta) {
            return Err(invalid("eta", "reflectivity must lie in [0, 1]"));
        }
        Ok(())
    }

    pub fn eta_eff(&self) -> f64 {
        eta_eff(self.eta, self.gamma)
    }
}

/// `eta e^{-gamma}`.
pub fn eta_eff(eta: f64, gamma: f64) -> f64 {
    eta * (-gamma).exp()
}

/// Surviving fraction after splitting the medium into `2^k` equal slices and
/// merging them pairwise `k` times with `tau -> 2 tau - tau^2`.
///
/// Converges to `e^{-gamma}` as `k` grows.
pub fn logistic_loss(gamma: f64, k: u32) -> f64 {
    let mut lost = gamma / 2f64.powi(k as i32);
    for _ in 0..k {
        lost = 2.0 * lost - lost * lost;
    }
    1.0 - lost
}

/// The probe `Sigma_A (+) [[Sigma_B, eps_BC], [eps_BC, Sigma_C]]` with null displacement.
pub fn qi_probe(n_s: f64, n_th: f64) -> Result<GaussianState> {
    QiParams::new(n_s, n_th, 0.0, 0.0)?;
    let a = 1.0 + 2.0 * n_th;
    let b = 1.0 + 2.0 * n_s + 2.0 * n_th;
    let c = 1.0 + 2.0 * n_s;
    let e = 2.0 * (n_s * (n_s + 1.0)).sqrt();
    let mut s = DMatrix::zeros(6, 6);
    s[(0, 0)] = a;
    s[(1, 1)] = a;
    s[(2, 2)] = b;
    s[(3, 3)] = b;
    s[(4, 4)] = c;
    s[(5, 5)] = c;
    s[(2, 4)] = e;
    s[(4, 2)] = e;
    s[(3, 5)] = -e;
    s[(5, 3)] = -e;
    GaussianState::new(DVector::zeros(6), s)
}

/// Signal-idler block of the probe.
pub fn qi_signal_idler(n_s: f64, n_th: f64) -> Result<BipartiteCM> {
    let probe = qi_probe(n_s, n_th)?;
    BipartiteCM::from_state(&partial_trace(&probe, &ModeSubset::new(&[1, 2])?)?)
}

/// Closed-form smaller partially transposed symplectic eigenvalue of the
/// signal-idler pair.
pub fn qi_probe_nu_minus(n_s: f64, n_th: f64) -> f64 {
    let root = (4.0 * n_s * (n_s + 1.0) + n_th * n_th).sqrt();
    let inner = 8.0 * n_s * n_s - 2.0 * (2.0 * n_s + n_th + 1.0) * root
        + 4.0 * n_s * n_th
        + 8.0 * n_s
        + 2.0 * n_th * n_th
        + 2.0 * n_th
        + 1.0;
    inner.max(0.0).sqrt()
}

/// Logarithmic negativity of the signal-idler pair, `max(0, -log2 nu)`.
pub fn qi_probe_log_negativity(n_s: f64, n_th: f64) -> Result<f64> {
    let (nu, _) = pts_eigenvalues(&qi_signal_idler(n_s, n_th)?)?;
    Ok((-nu.log2()).max(0.0))
}

/// Received covariance matrix `[[f I, g sigma_z], [g sigma_z, (1+2N_S) I]]`.
pub fn qi_received(p: &QiParams) -> Result<BipartiteCM> {
    p.validate()?;
    let x = p.eta_eff();
    let f = 1.0 + 2.0 * p.n_th + 2.0 * p.n_s * x * x;
    let g = 2.0 * (p.n_s * (1.0 + p.n_s)).sqrt() * x;
    Ok(BipartiteCM::standard(f, 1.0 + 2.0 * p.n_s, g))
}

/// Received state built from the probe: beam splitter on bath and signal,
/// discard the transmitted output.
pub fn qi_received_constructive(p: &QiParams) -> Result<GaussianState> {
    p.validate()?;
    let x = p.eta_eff();
    let probe = qi_probe(p.n_s, p.n_th)?;
    let out = apply(&probe, &beam_splitter(x * x)?, &ModeSubset::new(&[0, 1])?)?;
    partial_trace(&out, &ModeSubset::new(&[1, 2])?)
}

/// Received single-mode state of the coherent probe with `|alpha|^2 = N_S`.
pub fn qi_classical_received(p: &QiParams) -> Result<GaussianState> {
    p.validate()?;
    let x = p.eta_eff();
    let alpha = p.n_s.sqrt();
    let bath = 1.0 + 2.0 * p.n_th;
    let sigma = DMatrix::identity(2, 2) * (bath * (1.0 - x * x) + x * x);
    let d = DVector::from_vec(vec![std::f64::consts::SQRT_2 * alpha * x, 0.0]);
    GaussianState::new(d, sigma)
}

/// `H_Q = 4 N_S e^{-2 gamma} (1 + N_S) / (1 + 2 N_S N_th + N_S + N_th)`.
pub fn h_q(p: &QiParams) -> Result<f64> {
    p.validate()?;
    if p.n_th <= 0.0 {
        return Err(Error::BoundaryQfi("h_q"));
    }
    let (ns, nt) = (p.n_s, p.n_th);
    Ok(4.0 * ns * (-2.0 * p.gamma).exp() * (1.0 + ns) / (1.0 + 2.0 * ns * nt + ns + nt))
}

/// `H_C = 4 e^{-2 gamma} N_S / (2 N_th + 1)`.
pub fn h_c(p: &QiParams) -> Result<f64> {
    p.validate()?;
    Ok(4.0 * (-2.0 * p.gamma).exp() * p.n_s / (2.0 * p.n_th + 1.0))
}

/// `R = (1 + N_S)(1 + 2 N_th) / (1 + 2 N_S N_th + N_S + N_th)`.
pub fn gain(p: &QiParams) -> Result<f64> {
    p.validate()?;
    let (ns, nt) = (p.n_s, p.n_th);
    Ok((1.0 + ns) * (1.0 + 2.0 * nt) / (1.0 + 2.0 * ns * nt + ns + nt))
}

/// Received family `eta -> Sigma_eta` for the numeric QFI.
pub fn qi_family(n_s: f64, n_th: f64, gamma: f64, eta0: f64, step: f64) -> GaussianFamily<'static> {
    GaussianFamily::new(
        move |eta| qi_received(&QiParams::new(n_s, n_th, gamma, eta)?)?.to_state(),
        eta0,
        step,
    )
}

/// Numeric QFI of the quantum probe at `eta = 1e-4`, step `1e-5`.
pub fn h_q_numeric(p: &QiParams) -> Result<f64> {
    p.validate()?;
    gaussian_qfi(&qi_family(p.n_s, p.n_th, p.gamma, NUMERIC_ETA0, NUMERIC_STEP))
}

/// Numeric QFI of the coherent probe at `eta = 1e-4`, step `1e-5`.
///
/// Unlike [`h_c`], which is the `eta -> 0` limit, this keeps the variation of
/// the received noise with `eta`, an additive `~ (2 eta)^2` that matters only
/// when `h_c` itself is of that order.
pub fn h_c_numeric(p: &QiParams) -> Result<f64> {
    p.validate()?;
    let (n_s, n_th, gamma) = (p.n_s, p.n_th, p.gamma);
    let fam = GaussianFamily::new(
        move |eta| qi_classical_received(&QiParams::new(n_s, n_th, gamma, eta)?),
        NUMERIC_ETA0,
        NUMERIC_STEP,
    );
    gaussian_qfi(&fam)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn logistic_composition_converges_to_exponential() {
        for g in [0.1, 1.0, 3.0] {
            let v = logistic_loss(g, 20);
            assert!((v / (-g as f64).exp() - 1.0).abs() < 1e-5);
        }
        assert_eq!(eta_eff(0.3, 0.0), 0.3);
    }

    #[test]
    fn probe_reduces_to_tmsv_without_bath() {
        let ns = 1.3;
        let cm = qi_signal_idler(ns, 0.0).unwrap();
        let r = ns.sqrt().asinh();
        let t = BipartiteCM::from_state(&crate::gaussian::tmsv(r)).unwrap();
        assert!((cm.matrix() - t.matrix()).amax() < 1e-12);
    }

    #[test]
    fn radical_matches_pt_spectrum() {
        for ns in [0.01, 0.3, 1.0, 4.0] {
            for nt in [0.0, 0.2, 0.9, 3.0] {
                let (nu, _) = pts_eigenvalues(&qi_signal_idler(ns, nt).unwrap()).unwrap();
                assert!((nu - qi_probe_nu_minus(ns, nt)).abs() < 1e-10, "{ns} {nt}");
            }
        }
    }

    #[test]
    fn closed_and_constructive_received_states_agree() {
        let p = QiParams::new(0.7, 1.4, 0.3, 0.6).unwrap();
        let a = qi_received(&p).unwrap().matrix();
        let b = qi_received_constructive(&p).unwrap();
        assert!((a - b.sigma()).amax() < 1e-12);
    }

    #[test]
    fn numeric_qfis_match_closed_forms() {
        let p = QiParams::new(0.5, 2.0, 0.4, 0.0).unwrap();
        let hq = h_q(&p).unwrap();
        assert!((h_q_numeric(&p).unwrap() / hq - 1.0).abs() < 1e-6);
        let hc = h_c(&p).unwrap();
        assert!((h_c_numeric(&p).unwrap() / hc - 1.0).abs() < 1e-6);
        assert!((gain(&p).unwrap() - hq / hc).abs() < 1e-12);
    }

    #[test]
    fn boundary_is_rejected() {
        let p = QiParams::new(0.5, 0.0, 0.0, 0.0).unwrap();
        assert_eq!(h_q(&p), Err(Error::BoundaryQfi("h_q")));
    }
}
