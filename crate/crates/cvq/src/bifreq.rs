//! Bi-frequency illumination.
//!
//! A two-mode squeezed probe at frequencies `omega_1`, `omega_2` (or a pair of
//! coherent beams) is reflected by an object with reflectivities `eta_1` and
//! `eta_2 = eta_1 + lambda`, each frequency mixing with its own thermal bath.
//! Only the reflected modes are kept. The parameter is `lambda`, estimated in
//! the neighbourhood of `lambda = 0`.
//!
//! Probe normalization: the two-mode squeezer is chosen with
//! `cosh 2r = 1 + 4 N_r`, so the received diagonal at `lambda = 0`, `n = 0` is
//! `(1 - eta_1)(1 + 2 N_th) + eta_1 (1 + 4 N_r)`. This is the normalization
//! under which the high-reflectivity ratio limit and the appendix observable
//! coefficients come out as closed forms, and the one used throughout.

use nalgebra::{DMatrix, DVector, Matrix3, Vector3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::entanglement::BipartiteCM;
use crate::error::{invalid, Error, Result};
use crate::estimation::{gaussian_qfi, gaussian_sld, GaussianFamily};
use crate::gaussian::{beam_splitter, beam_splitter_derivative, GaussianState, SymplecticTransform};
use crate::numeric::{bisect, scan_bracket};

/// Mode order of the four-mode probe: bath 1, signal 1, bath 2, signal 2.
const KEEP: [usize; 4] = [2, 3, 6, 7];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BifreqParams {
    /// Reference reflectivity `eta_1`.
    pub eta1: f64,
    /// `eta_2 - eta_1`.
    pub lambda: f64,
    /// Squeezing photons `N_r`.
    pub n_r: f64,
    /// Thermal photons of the squeezed thermal input.
    pub n: f64,
    /// Environment photons `N_th`.
    pub n_th: f64,
}

impl BifreqParams {
    pub fn new(eta1: f64, lambda: f64, n_r: f64, n: f64, n_th: f64) -> Result<Self> {
        let p = BifreqParams {
            eta1,
            lambda,
            n_r,
            n,
            n_th,
        };
        p.validate()?;
        Ok(p)
    }

    /// TMSV input (`n = 0`, `N_r = N_S`) at `lambda = 0`.
    pub fn tmsv(eta1: f64, n_s: f64, n_th: f64) -> Result<Self> {
        Self::new(eta1, 0.0, n_s, 0.0, n_th)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.eta1) {
            return Err(invalid("eta1", "reflectivity must lie in [0, 1]"));
        }
        if !(0.0..=1.0).contains(&(self.eta1 + self.lambda)) {
            return Err(invalid("lambda", "eta1 + lambda must lie in [0, 1]"));
        }
        for (name, v) in [("n_r", self.n_r), ("n", self.n), ("n_th", self.n_th)] {
            if !(v >= 0.0) {
                return Err(invalid(name, "photon numbers must be >= 0"));
            }
        }
        Ok(())
    }

    pub fn eta2(&self) -> f64 {
        self.eta1 + self.lambda
    }

    /// Signal photons per mode, `n (1 + 2 N_r) + N_r`.
    pub fn n_s(&self) -> f64 {
        self.n * (1.0 + 2.0 * self.n_r) + self.n_r
    }

    fn with_lambda(&self, lambda: f64) -> Self {
        BifreqParams { lambda, ..*self }
    }
}

/// `(N_1 / N_2 exact, first-order 1 - delta)` for `omega_2 = (1 + delta) omega_1`.
pub fn thermal_ratio(beta_omega1: f64, delta_rel: f64) -> Result<(f64, f64)> {
    if !(beta_omega1 > 0.0) {
        return Err(invalid("beta_omega1", "must be > 0"));
    }
    let x = beta_omega1;
    let exact = x.exp_m1() / (x * (1.0 + delta_rel)).exp_m1();
    Ok((exact, 1.0 - delta_rel))
}

fn bs_pair(eta1: f64, eta2: f64) -> Result<SymplecticTransform> {
    Ok(beam_splitter(eta1)?.direct_sum(&beam_splitter(eta2)?))
}

fn tangent_matrix(eta2: f64) -> DMatrix<f64> {
    let mut t = DMatrix::zeros(8, 8);
    t.view_mut((4, 4), (4, 4)).copy_from(&beam_splitter_derivative(eta2));
    t
}

fn restrict(m: &DMatrix<f64>) -> DMatrix<f64> {
    DMatrix::from_fn(4, 4, |i, j| m[(KEEP[i], KEEP[j])])
}

fn restrict_vec(v: &DVector<f64>) -> DVector<f64> {
    DVector::from_fn(4, |i, _| v[KEEP[i]])
}

/// Squeezing with `cosh 2r = 1 + 4 N_r`.
pub fn probe_squeezing(n_r: f64) -> f64 {
    0.5 * (1.0 + 4.0 * n_r).acosh()
}

/// Four-mode quantum probe: thermal baths interleaved with a squeezed thermal pair.
pub fn bifreq_probe(p: &BifreqParams) -> Result<GaussianState> {
    p.validate()?;
    let k = 1.0 + 2.0 * p.n;
    let c = k * (1.0 + 4.0 * p.n_r);
    let s = k * (c / k * c / k - 1.0).max(0.0).sqrt();
    let b = 1.0 + 2.0 * p.n_th;
    let mut m = DMatrix::zeros(8, 8);
    for i in [0, 1, 4, 5] {
        m[(i, i)] = b;
    }
    for i in [2, 3, 6, 7] {
        m[(i, i)] = c;
    }
    m[(2, 6)] = s;
    m[(6, 2)] = s;
    m[(3, 7)] = -s;
    m[(7, 3)] = -s;
    GaussianState::new(DVector::zeros(8), m)
}

/// Four-mode classical probe: baths and coherent states with `alpha^2 = N_S`.
pub fn bifreq_coherent_probe(p: &BifreqParams) -> Result<GaussianState> {
    p.validate()?;
    let b = 1.0 + 2.0 * p.n_th;
    let mut m = DMatrix::identity(8, 8);
    for i in [0, 1, 4, 5] {
        m[(i, i)] = b;
    }
    let x = std::f64::consts::SQRT_2 * p.n_s().sqrt();
    let mut d = DVector::zeros(8);
    d[2] = x;
    d[6] = x;
    GaussianState::new(d, m)
}

fn propagate(probe: &GaussianState, p: &BifreqParams) -> Result<GaussianState> {
    let s = bs_pair(p.eta1, p.eta2())?;
    let sm = s.matrix();
    let sigma = sm * probe.sigma() * sm.transpose();
    let d = sm * probe.d();
    GaussianState::new(restrict_vec(&d), restrict(&((&sigma + sigma.transpose()) * 0.5)))
}

fn propagate_tangent(probe: &GaussianState, p: &BifreqParams) -> Result<(DMatrix<f64>, DVector<f64>)> {
    let eta2 = p.eta2();
    if !(eta2 > 0.0 && eta2 < 1.0) {
        return Err(Error::SingularParameters(format!(
            "the reflectivity derivative is unbounded at eta2 = {eta2}"
        )));
    }
    let s = bs_pair(p.eta1, eta2)?;
    let sm = s.matrix();
    let t = tangent_matrix(eta2);
    let ds = &t * probe.sigma() * sm.transpose() + sm * probe.sigma() * t.transpose();
    let dd = &t * probe.d();
    Ok(((restrict(&ds) + restrict(&ds).transpose()) * 0.5, restrict_vec(&dd)))
}

/// Received two-mode state of the quantum probe.
pub fn bifreq_received_state(p: &BifreqParams) -> Result<GaussianState> {
    propagate(&bifreq_probe(p)?, p)
}

pub fn bifreq_received(p: &BifreqParams) -> Result<BipartiteCM> {
    BipartiteCM::from_state(&bifreq_received_state(p)?)
}

/// Received two-mode state of the coherent pair.
pub fn bifreq_coherent_received(p: &BifreqParams) -> Result<GaussianState> {
    propagate(&bifreq_coherent_probe(p)?, p)
}

/// Printed diagonal entry `c` at `lambda`; trustworthy only for `n = 0`.
pub fn printed_c(p: &BifreqParams) -> f64 {
    let (e, l) = (p.eta1, p.lambda);
    (1.0 + 2.0 * p.n) * (1.0 + 4.0 * l * p.n_r + e * (4.0 * p.n_r - 2.0 * p.n_th) + 2.0 * (1.0 - l) * p.n_th)
}

/// Printed diagonal entry `a`.
pub fn printed_a(p: &BifreqParams) -> f64 {
    1.0 + 2.0 * p.n_th + 2.0 * p.eta1 * (2.0 * p.n_r + 4.0 * p.n * p.n_r - p.n_th)
}

/// Quantum-probe family in `lambda` around `p.lambda`, with the exact tangent.
pub fn quantum_family(p: &BifreqParams) -> Result<GaussianFamily<'static>> {
    p.validate()?;
    let base = *p;
    let probe = bifreq_probe(p)?;
    let probe2 = probe.clone();
    Ok(GaussianFamily::new(
        move |l| propagate(&probe, &base.with_lambda(l)),
        p.lambda,
        1e-5,
    )
    .with_tangent(move |l| propagate_tangent(&probe2, &base.with_lambda(l))))
}

/// Coherent-pair family in `lambda`, with the exact tangent.
pub fn coherent_family(p: &BifreqParams) -> Result<GaussianFamily<'static>> {
    p.validate()?;
    let base = *p;
    let probe = bifreq_coherent_probe(p)?;
    let probe2 = probe.clone();
    Ok(GaussianFamily::new(
        move |l| propagate(&probe, &base.with_lambda(l)),
        p.lambda,
        1e-5,
    )
    .with_tangent(move |l| propagate_tangent(&probe2, &base.with_lambda(l))))
}

/// Same family with central differences instead of the exact tangent.
pub fn quantum_family_fd(p: &BifreqParams, step: f64) -> Result<GaussianFamily<'static>> {
    p.validate()?;
    let base = *p;
    let probe = bifreq_probe(p)?;
    Ok(GaussianFamily::new(
        move |l| propagate(&probe, &base.with_lambda(l)),
        p.lambda,
        step,
    ))
}

/// `H_Q` at `p.lambda` (normally 0) from the Gaussian QFI.
pub fn h_q_bifreq(p: &BifreqParams) -> Result<f64> {
    gaussian_qfi(&quantum_family(p)?)
}

/// Numeric `H_C` for the coherent pair.
pub fn h_c_bifreq_numeric(p: &BifreqParams) -> Result<f64> {
    gaussian_qfi(&coherent_family(p)?)
}

/// `H_C = 4 N_th^2 (s^2 + 1)/(s^4 - 1) + N_S / (eta_1 s)`, `s = 1 + 2 N_th tau_1`.
///
/// At `N_th = 0` the first term takes its limit, zero.
pub fn h_c_bifreq(p: &BifreqParams) -> Result<f64> {
    p.validate()?;
    let s = 1.0 + 2.0 * p.n_th * (1.0 - p.eta1);
    let first = if p.n_th == 0.0 {
        0.0
    } else {
        4.0 * p.n_th * p.n_th * (s * s + 1.0) / (s.powi(4) - 1.0)
    };
    Ok(first + p.n_s() / (p.eta1 * s))
}

/// `H_Q / H_C` at `lambda = 0`.
pub fn ratio(p: &BifreqParams) -> Result<f64> {
    Ok(h_q_bifreq(p)? / h_c_bifreq(p)?)
}

/// High-reflectivity limit of the ratio at finite `N_th`.
pub fn ratio_limit_reflective(n_s: f64, n_th: f64) -> f64 {
    let num = n_s * n_s * (8.0 * n_th * (n_th + 1.0) + 4.0) + 4.0 * n_s * n_th * n_th + n_th * n_th;
    num / (n_th * (n_s * (4.0 * n_th + 2.0) + n_th))
}

/// `1 + 8 N_S^2 / (4 N_S + 1)`, the high-noise limit of [`ratio_limit_reflective`].
pub fn ratio_limit_noisy(n_s: f64) -> f64 {
    1.0 + 8.0 * n_s * n_s / (4.0 * n_s + 1.0)
}

/// Coefficients of `L11 n1 + L22 n2 + L12 (a1 a2 + a1^dag a2^dag) + L0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObservableCoeffs {
    pub l11: f64,
    pub l22: f64,
    pub l12: f64,
    pub l0: f64,
}

/// Closed-form coefficients of the optimal observable at `lambda = 0` for a
/// TMSV probe (`n = 0`).
///
/// `L0` is fixed by local unbiasedness, `<O> = 0` on the received state.
pub fn optimal_coeffs(eta1: f64, n_s: f64, n_th: f64) -> Result<ObservableCoeffs> {
    if !(n_s > 0.0 && n_th > 0.0) {
        return Err(Error::BoundaryQfi("optimal_coeffs"));
    }
    let (e, s, t) = (eta1, n_s, n_th);
    let a = 8.0 * (e - 1.0) * e * s.powi(3) * (2.0 * t + 1.0);
    let b = 4.0
        * s
        * s
        * (-e + (e + 3.0 * e * t).powi(2) - e * t * (10.0 * t + 7.0) + 3.0 * t * (t + 1.0) + 1.0);
    let c = 2.0
        * s
        * t
        * (-e + t * (e * (3.0 * e - 8.0) + 4.0 * (e - 1.0) * (2.0 * e - 1.0) * t + 3.0) + 1.0);
    let d = t * t * (2.0 * (e - 1.0) * t * ((e - 1.0) * t - 1.0) + 1.0);
    let den = a - b + c - d;
    if den.abs() < 1e-300 || !den.is_finite() {
        return Err(Error::SingularParameters(format!("A - B + C - D = {den:e}")));
    }
    let l11 = -2.0 * e * s * (2.0 * s + 1.0) * (2.0 * t + 1.0) / (-den);
    let l22 = (4.0 * e * (2.0 * e - 1.0) * s * s * (2.0 * t + 1.0)
        + 2.0 * s * (e - 2.0 * t * ((e - 3.0) * e + (e - 1.0) * (3.0 * e - 1.0) * t + 1.0) - 1.0)
        + t * (2.0 * (e - 1.0) * t * ((e - 1.0) * t - 1.0) + 1.0))
        / den;
    let l12 = -(2.0f64).sqrt()
        * (s * (2.0 * s + 1.0)).sqrt()
        * (e * e * (s * (4.0 * t + 2.0) - t * t) + t * (t + 1.0))
        / den;
    let cm = bifreq_received(&BifreqParams::tmsv(eta1, n_s, n_th)?)?;
    let (ra, rc, rb) = (cm.sigma_a[(0, 0)], cm.sigma_b[(0, 0)], cm.eps[(0, 0)]);
    let l0 = -(l11 * (ra - 1.0) / 2.0 + l22 * (rc - 1.0) / 2.0 + l12 * rb);
    Ok(ObservableCoeffs { l11, l22, l12, l0 })
}

/// `eta_1 -> 1` limits of the coefficients.
///
/// `L11` and `L22` are the limits of the general expressions. `L12` carries a
/// single `sqrt 2` prefactor, which is what the general expression tends to
/// (and what the numeric SLD gives), and `L0` is again fixed by unbiasedness
/// on the limiting state `a = c = 1 + 4 N_S`, `b = 2 sqrt(2 N_S (1 + 2 N_S))`.
pub fn optimal_coeffs_reflective(n_s: f64, n_th: f64) -> ObservableCoeffs {
    let (s, t) = (n_s, n_th);
    let den = s * s * (8.0 * t * (t + 1.0) + 4.0) + 4.0 * s * t * t + t * t;
    let l11 = -2.0 * s * (2.0 * s + 1.0) * (2.0 * t + 1.0) / den;
    let l22 = -(4.0 * s * (2.0 * s * t + s + t) + t) / den;
    let l12 = 2f64.sqrt() * (s * (2.0 * s + 1.0)).sqrt() * (s * (4.0 * t + 2.0) + t) / den;
    let b = 2.0 * (2.0 * s * (1.0 + 2.0 * s)).sqrt();
    let l0 = -((l11 + l22) * 2.0 * s + l12 * b);
    ObservableCoeffs { l11, l22, l12, l0 }
}

/// The `eta_1 -> 1` value of `L0` in its rational form, kept for comparison
/// with [`optimal_coeffs_reflective`]; it does not make the observable unbiased.
pub fn reflective_l0_rational(n_s: f64, n_th: f64) -> f64 {
    let (s, t) = (n_s, n_th);
    (-2.0 * s * (s * (8.0 * t + 4.0) + 6.0 * t + 1.0) - 3.0 * t)
        / (8.0 * s * s * (2.0 * t * (t + 1.0) + 1.0) + 8.0 * s * t * t + 2.0 * t * t)
}

/// Noiseless (`N_th -> 0`, `eta_1 -> 1`) coefficients `(-mu^2, -1, mu, -1)`
/// with `mu^2 = 1 + 1/(2 N_S)`.
///
/// The observable is `-b1^dag b1` for `b1 = -i (a2^dag - mu a1)`, which
/// annihilates the noiseless received state.
pub fn optimal_coeffs_noiseless(n_s: f64) -> ObservableCoeffs {
    let mu2 = 1.0 + 1.0 / (2.0 * n_s);
    ObservableCoeffs {
        l11: -mu2,
        l22: -1.0,
        l12: mu2.sqrt(),
        l0: -1.0,
    }
}

/// `mu = sqrt(1 + 1/(2 N_S))` of the noiseless observable.
pub fn noiseless_mu(n_s: f64) -> f64 {
    (1.0 + 1.0 / (2.0 * n_s)).sqrt()
}

/// Coefficients read off the numeric SLD, `O = lambda + L / H`.
pub fn optimal_coeffs_numeric(p: &BifreqParams) -> Result<ObservableCoeffs> {
    let fam = quantum_family(p)?;
    let h = gaussian_qfi(&fam)?;
    let sld = gaussian_sld(&fam)?;
    let (l11, l22, l12, l0) = sld.scaled(1.0 / h).plus_constant(p.lambda).number_basis_coefficients();
    Ok(ObservableCoeffs { l11, l22, l12, l0 })
}

/// `2 N_S^2 L12 (1 + N_S) H_Q - 1`, whose zero marks saturation of the bound
/// in a single run.
pub fn qcrb_residual(eta1: f64, n_s: f64, n_th: f64) -> Result<f64> {
    let c = optimal_coeffs(eta1, n_s, n_th)?;
    let hq = h_q_bifreq(&BifreqParams::tmsv(eta1, n_s, n_th)?)?;
    Ok(2.0 * n_s * n_s * c.l12 * (1.0 + n_s) * hq - 1.0)
}

/// Brackets and refines a root `N_th(N_S)` of [`qcrb_residual`] on `[lo, hi]`.
pub fn qcrb_root(eta1: f64, n_s: f64, lo: f64, hi: f64) -> Result<Option<(f64, (f64, f64))>> {
    let f = |t: f64| qcrb_residual(eta1, n_s, t).unwrap_or(f64::NAN);
    let Some((a, b)) = scan_bracket(f, lo, hi, 161) else {
        return Ok(None);
    };
    let root = bisect(f, a, b, 1e-10 * b)?;
    Ok(Some((root, (a, b))))
}

/// Parameters of the beam splitter, squeezer, beam splitter, phase network.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JpaNetwork {
    /// First beam splitter angle.
    pub varphi: f64,
    /// Second beam splitter angle.
    pub theta: f64,
    pub r1: f64,
    pub r2: f64,
    pub theta1: f64,
    pub theta2: f64,
    /// Output phase shift `c -> e^{-i phi} c`.
    pub phi: f64,
}

/// Coefficients `(u1, u2, v1, v2)` of `b1 = u1 a1 + u2 a2 + v1 a1^dag + v2 a2^dag`.
pub fn jpa_forward(n: &JpaNetwork) -> [Complex64; 4] {
    let (ct, st) = (n.theta.cos(), n.theta.sin());
    let (cp, sp) = (n.varphi.cos(), n.varphi.sin());
    let e1 = Complex64::from_polar(1.0, n.theta1);
    let e2 = Complex64::from_polar(1.0, n.theta2);
    let ph = Complex64::from_polar(1.0, -n.phi);
    let u1 = Complex64::new(ct * cp * n.r1.cosh() - st * sp * n.r2.cosh(), 0.0);
    let u2 = Complex64::new(ct * sp * n.r1.cosh() + st * cp * n.r2.cosh(), 0.0);
    let v1 = -e1 * ct * cp * n.r1.sinh() + e2 * st * sp * n.r2.sinh();
    let v2 = -e1 * ct * sp * n.r1.sinh() - e2 * st * cp * n.r2.sinh();
    [ph * u1, ph * u2, ph * v1, ph * v2]
}

fn jpa_residual(x: &[f64; 6], mu: f64) -> Vector3<f64> {
    let net = JpaNetwork {
        varphi: x[0],
        theta: x[1],
        r1: x[2],
        r2: x[3],
        theta1: x[4],
        theta2: x[5],
        phi: -std::f64::consts::FRAC_PI_2,
    };
    let [u1, _, _, v2] = jpa_forward(&net);
    // target b1 = -i (a2^dag - mu a1) = i mu a1 - i a2^dag
    let r1 = u1 - Complex64::new(0.0, mu);
    let r2 = v2 - Complex64::new(0.0, -1.0);
    Vector3::new(r1.im, r2.re, r2.im)
}

/// Solves the identification `u1 = i mu`, `v2 = -i` for the network.
///
/// The output phase is fixed to `phi = -pi/2`, which turns both conditions
/// into equations with consistent phases. Damped Gauss-Newton from
/// `varphi = theta = pi/4`, `r1 = r2 = asinh 1`, zero squeezing phases.
pub fn jpa_synthesis(mu: f64) -> Result<JpaNetwork> {
    if !(mu >= 1.0) {
        return Err(invalid("mu", "must be >= 1"));
    }
    let pi4 = std::f64::consts::FRAC_PI_4;
    let mut x = [pi4, pi4, 1f64.asinh(), 1f64.asinh(), 0.0, 0.0];
    let mut res = jpa_residual(&x, mu);
    for _ in 0..500 {
        if res.norm() < 1e-13 {
            break;
        }
        let mut jac = nalgebra::Matrix3x6::<f64>::zeros();
        for k in 0..6 {
            let h = 1e-7;
            let mut xp = x;
            let mut xm = x;
            xp[k] += h;
            xm[k] -= h;
            let col = (jpa_residual(&xp, mu) - jpa_residual(&xm, mu)) / (2.0 * h);
            jac.set_column(k, &col);
        }
        // minimum-norm step J^T (J J^T)^-1 r
        let jjt: Matrix3<f64> = jac * jac.transpose();
        let Some(inv) = (jjt + Matrix3::identity() * 1e-14).try_inverse() else {
            return Err(Error::NoConvergence("singular Jacobian in network synthesis".into()));
        };
        let step = jac.transpose() * (inv * res);
        let mut t = 1.0;
        loop {
            let mut trial = x;
            for k in 0..6 {
                trial[k] -= t * step[k];
            }
            trial[2] = trial[2].abs();
            trial[3] = trial[3].abs();
            let r = jpa_residual(&trial, mu);
            if r.norm() < res.norm() || t < 1e-6 {
                x = trial;
                res = r;
                break;
            }
            t *= 0.5;
        }
    }
    if res.norm() >= 1e-10 {
        return Err(Error::NoConvergence(format!(
            "network synthesis stalled at residual {:e}",
            res.norm()
        )));
    }
    Ok(JpaNetwork {
        varphi: x[0],
        theta: x[1],
        r1: x[2],
        r2: x[3],
        theta1: x[4],
        theta2: x[5],
        phi: -std::f64::consts::FRAC_PI_2,
    })
}

/// Residual of the two identification equations for a given network.
pub fn jpa_identification_residual(n: &JpaNetwork, mu: f64) -> f64 {
    let [u1, _, _, v2] = jpa_forward(n);
    (u1 - Complex64::new(0.0, mu)).norm().max((v2 - Complex64::new(0.0, -1.0)).norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::symplectic_eigenvalues;

    #[test]
    fn lossless_noiseless_reflection_is_pure() {
        let p = BifreqParams::new(1.0, 0.0, 0.8, 0.0, 0.0).unwrap();
        let st = bifreq_received_state(&p).unwrap();
        let nus = symplectic_eigenvalues(st.sigma()).unwrap();
        assert!((nus[0] - 1.0).abs() < 1e-9 && (nus[1] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn printed_diagonals_at_zero_lambda() {
        let p = BifreqParams::new(0.7, 0.0, 1.3, 0.0, 2.5).unwrap();
        let cm = bifreq_received(&p).unwrap();
        assert!((cm.sigma_b[(0, 0)] - printed_c(&p)).abs() < 1e-12);
        assert!((cm.sigma_a[(0, 0)] - printed_a(&p)).abs() < 1e-12);
    }

    #[test]
    fn coherent_qfi_closed_form() {
        for (e, s, t) in [(0.5, 0.7, 0.3), (0.9, 2.0, 5.0), (0.3, 0.1, 1.0)] {
            let p = BifreqParams::tmsv(e, s, t).unwrap();
            let a = h_c_bifreq(&p).unwrap();
            let b = h_c_bifreq_numeric(&p).unwrap();
            assert!((a / b - 1.0).abs() < 1e-9, "{a} {b}");
        }
    }

    #[test]
    fn exact_tangent_matches_finite_differences() {
        let p = BifreqParams::tmsv(0.6, 1.0, 0.5).unwrap();
        let a = h_q_bifreq(&p).unwrap();
        let b = gaussian_qfi(&quantum_family_fd(&p, 1e-4).unwrap()).unwrap();
        assert!((a / b - 1.0).abs() < 1e-7);
    }

    #[test]
    fn appendix_coefficients_match_numeric_sld() {
        for (e, s, t) in [(0.75, 1.0, 0.5), (0.9, 2.5, 3.0), (0.4, 0.3, 0.2)] {
            let a = optimal_coeffs(e, s, t).unwrap();
            let b = optimal_coeffs_numeric(&BifreqParams::tmsv(e, s, t).unwrap()).unwrap();
            for (x, y) in [(a.l11, b.l11), (a.l22, b.l22), (a.l12, b.l12), (a.l0, b.l0)] {
                assert!((x - y).abs() < 1e-7 * y.abs().max(1.0), "{a:?} {b:?}");
            }
        }
    }

    #[test]
    fn reflective_limits_are_approached() {
        let (s, t) = (1.7, 0.8);
        let g = optimal_coeffs(1.0 - 1e-8, s, t).unwrap();
        let l = optimal_coeffs_reflective(s, t);
        assert!((g.l12 / l.l12 - 1.0).abs() < 1e-6);
        assert!((g.l11 / l.l11 - 1.0).abs() < 1e-6);
        assert!((g.l22 / l.l22 - 1.0).abs() < 1e-6);
        assert!((g.l0 / l.l0 - 1.0).abs() < 1e-6);
        let z = optimal_coeffs_reflective(s, 0.0);
        let n = optimal_coeffs_noiseless(s);
        assert!((z.l11 - n.l11).abs() < 1e-12 && (z.l22 - n.l22).abs() < 1e-12);
        assert!((z.l12 - n.l12).abs() < 1e-12 && (z.l0 - n.l0).abs() < 1e-12);
        assert!((n.l12 - noiseless_mu(s)).abs() < 1e-15);
    }

    #[test]
    fn thermal_ratio_first_order() {
        assert_eq!(thermal_ratio(0.5, 0.0).unwrap(), (1.0, 1.0));
        let x = crate::channel::PLANCK * 5e9 / (crate::channel::BOLTZMANN * 300.0);
        let (exact, first) = thermal_ratio(x, 0.2).unwrap();
        let rel = (exact - first).abs() / exact;
        assert!((rel - 0.04).abs() < 0.005, "{rel}");
    }

    #[test]
    fn network_synthesis_converges() {
        for mu in [1.0, 1.5, 2.2, 3.0] {
            let net = jpa_synthesis(mu).unwrap();
            assert!(jpa_identification_residual(&net, mu) < 1e-10);
            let [u1, u2, v1, v2] = jpa_forward(&net);
            let comm = u1.norm_sqr() + u2.norm_sqr() - v1.norm_sqr() - v2.norm_sqr();
            assert!((comm - 1.0).abs() < 1e-10);
        }
        let plain = JpaNetwork {
            varphi: 0.3,
            theta: 0.9,
            r1: 0.0,
            r2: 0.0,
            theta1: 0.2,
            theta2: 0.1,
            phi: 0.0,
        };
        let [_, _, v1, v2] = jpa_forward(&plain);
        assert_eq!((v1.norm(), v2.norm()), (0.0, 0.0));
    }
}
