//! Photon subtraction and entanglement swapping.
//!
//! Probabilistic subtraction mixes each mode with vacuum on a beam splitter
//! of transmissivity `tau` and keeps the run where both ancillas register
//! exactly one photon. Heuristic subtraction applies `a_A a_B` directly and
//! is the `tau -> 1` limit of the former once renormalized.
//!
//! For Gaussian inputs the subtracted state is a Gaussian envelope times a
//! quartic polynomial in phase space. [`PsOutcome`] stores the envelope
//! blocks, the polynomial coefficients and the success probability, and
//! [`PsOutcome::correction_g`] integrates the polynomial against the
//! teleportation kernel.

use nalgebra::{Matrix2, Vector2};
use num_complex::Complex64;
use serde::Serialize;

use crate::entanglement::BipartiteCM;
use crate::error::{invalid, Error, Result};
use crate::gaussian::{omega1, sigma_z};
use crate::teleport::gamma_of;

type M2 = Matrix2<f64>;

const MAX_SERIES_TERMS: usize = 10_000_000;

/// Gauss hypergeometric function by direct summation.
///
/// Terms are added until the latest one drops below `1e-15` of the partial
/// sum while the term ratio is already contracting.
pub fn hyp2f1(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    if !(z.abs() < 1.0) {
        return Err(invalid("z", format!("series needs |z| < 1, got {z}")));
    }
    if c <= 0.0 && c.fract() == 0.0 {
        return Err(invalid("c", "must not be a non-positive integer"));
    }
    let mut term = 1.0;
    let mut sum = 1.0;
    for n in 0..MAX_SERIES_TERMS {
        let nf = n as f64;
        let ratio = (a + nf) * (b + nf) / ((c + nf) * (nf + 1.0)) * z;
        term *= ratio;
        sum += term;
        if term == 0.0 || (term.abs() <= 1e-15 * sum.abs() && ratio.abs() < 1.0) {
            return Ok(sum);
        }
    }
    Err(Error::NoConvergence(format!(
        "2F1({a}, {b}; {c}; {z}) after {MAX_SERIES_TERMS} terms"
    )))
}

fn binomial(n: u64, k: u64) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Probabilistic `2k`-photon subtraction on a two-mode squeezed vacuum.
#[derive(Debug, Clone, Serialize)]
pub struct PsTmsv {
    /// Unnormalized Schmidt amplitudes `a_n` on `|n, n>`, truncated once
    /// `a_n` is negligible against both running sums `sum a_n^2` and `sum a_n`.
    pub coefficients: Vec<f64>,
    /// Success probability from the hypergeometric closed form.
    pub success_prob: f64,
    /// `sum |a_n|^2` over the stored amplitudes.
    pub success_prob_sum: f64,
    /// Negativity from the closed form.
    pub negativity: f64,
    /// Negativity from `(sum a_n)^2 / P` over the stored amplitudes.
    pub negativity_sum: f64,
}

/// Subtracts `k` photons from each arm of a squeezed vacuum with
/// `lambda = tanh r`, heralded through beam splitters of transmissivity `tau`.
pub fn ps_tmsv(lambda: f64, tau: f64, k: u32) -> Result<PsTmsv> {
    if !(0.0..1.0).contains(&lambda) {
        return Err(invalid("lambda", "must lie in [0, 1)"));
    }
    if !(tau > 0.0 && tau <= 1.0) {
        return Err(invalid("tau", "must lie in (0, 1]"));
    }
    if k > 0 && tau == 1.0 {
        return Err(invalid("tau", "a lossless splitter never heralds a photon"));
    }
    let lt = lambda * tau;
    let pre = (1.0 - lambda * lambda).sqrt() * (lambda * (1.0 - tau)).powi(k as i32);
    let mut coefficients = Vec::new();
    let mut p_sum = 0.0;
    let mut a_sum = 0.0;
    let mut n = 0u64;
    loop {
        let a = pre * binomial(n + k as u64, k as u64) * lt.powi(n as i32);
        coefficients.push(a);
        p_sum += a * a;
        a_sum += a;
        if (a * a < 1e-18 * p_sum && a < 1e-16 * a_sum) || a == 0.0 {
            break;
        }
        n += 1;
        if n as usize > MAX_SERIES_TERMS {
            return Err(Error::NoConvergence("ps_tmsv amplitudes".into()));
        }
    }
    if p_sum == 0.0 {
        return Err(Error::ZeroNorm(0.0));
    }
    let success_prob = success_prob_tmsv(lambda, tau, k)?;
    let negativity = ps_tmsv_negativity(lt, k)?;
    Ok(PsTmsv {
        coefficients,
        success_prob,
        success_prob_sum: p_sum,
        negativity,
        negativity_sum: 0.5 * (a_sum * a_sum / p_sum - 1.0),
    })
}

/// `P_2k = (1 - lambda^2) (lambda - lambda tau)^{2k} 2F1(k+1, k+1; 1; (lambda tau)^2)`.
pub fn success_prob_tmsv(lambda: f64, tau: f64, k: u32) -> Result<f64> {
    let kf = k as f64;
    let lt = lambda * tau;
    Ok((1.0 - lambda * lambda)
        * (lambda - lt).powi(2 * k as i32)
        * hyp2f1(kf + 1.0, kf + 1.0, 1.0, lt * lt)?)
}

/// Elementary form of `P_2` for one photon per arm.
pub fn success_prob_2(lambda: f64, tau: f64) -> f64 {
    let l2 = (lambda * tau).powi(2);
    (1.0 - lambda * lambda) * lambda * lambda * (1.0 - tau).powi(2) * (1.0 + l2) / (1.0 - l2).powi(3)
}

/// Elementary form of `P_4` for two photons per arm.
pub fn success_prob_4(lambda: f64, tau: f64) -> f64 {
    let l2 = (lambda * tau).powi(2);
    (1.0 - lambda * lambda) * lambda.powi(4) * (1.0 - tau).powi(4) * (1.0 + 4.0 * l2 + l2 * l2)
        / (1.0 - l2).powi(5)
}

/// Negativity of the `2k`-subtracted squeezed vacuum, a function of
/// `lambda_tau = lambda tau` only. With `lambda_tau = lambda` it is the
/// heuristic result.
pub fn ps_tmsv_negativity(lambda_tau: f64, k: u32) -> Result<f64> {
    let kf = k as f64;
    let f = hyp2f1(kf + 1.0, kf + 1.0, 1.0, lambda_tau * lambda_tau)?;
    Ok(0.5 * ((1.0 - lambda_tau).powf(-2.0 * (kf + 1.0)) / f - 1.0))
}

fn inv(m: &M2, what: &'static str) -> Result<M2> {
    if m.determinant().abs() < 1e-300 {
        return Err(Error::Singular(what));
    }
    m.try_inverse().ok_or(Error::Singular(what))
}

fn sandwich(m: &M2) -> M2 {
    let o = omega1();
    o * m * o.transpose()
}

/// `W_{X,M} = X^{-1} Tr(X^{-1} M) - Omega M Omega^T / det X`.
pub fn w_matrix(x: &M2, m: &M2) -> Result<M2> {
    let xi = inv(x, "W_{X,M}")?;
    Ok(xi * (xi * m).trace() - sandwich(m) / x.determinant())
}

/// `sigma_z A sigma_z + B + sigma_z C`, the combination picked out by the
/// teleportation kernel on a `(alpha A alpha, beta B beta, alpha C beta)`
/// triple. Only the symmetric part survives the Gaussian integral, and the
/// `W` shortcut for `X^{-1} M X^{-1}` needs a symmetric `M`, so the result
/// is symmetrized.
fn kernel_combo(a: &M2, b: &M2, c: &M2) -> M2 {
    let z = sigma_z();
    let m = z * a * z + b + z * c;
    0.5 * (m + m.transpose())
}

/// Probabilistic two-photon subtraction applied to a Gaussian state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PsOutcome {
    pub tau: f64,
    /// Blocks of the Gaussian envelope.
    pub sigma_a: M2,
    pub sigma_b: M2,
    pub eps: M2,
    pub success_prob: f64,
    pub m1: f64,
    pub m2: f64,
    pub m3: f64,
    pub p1: M2,
    pub p2: M2,
    pub p12: M2,
    pub q1: M2,
    pub q2: M2,
    pub q12: M2,
    pub r1: M2,
    pub r2: M2,
    pub r12: M2,
}

/// The subtraction formulas assume every 2x2 block, the correlation block
/// included, is symmetric.
fn require_symmetric_blocks(cm: &BipartiteCM) -> Result<()> {
    let asym = |m: &M2| (m - m.transpose()).abs().max();
    let worst = asym(&cm.sigma_a).max(asym(&cm.sigma_b)).max(asym(&cm.eps));
    let scale = 1.0 + cm.sigma_a.abs().max().max(cm.sigma_b.abs().max());
    if worst > 1e-12 * scale {
        return Err(Error::NotSymmetric(worst));
    }
    Ok(())
}

/// Heralds one photon in each arm of `cm` through splitters of transmissivity `tau`.
pub fn ps2_gaussian(cm: &BipartiteCM, tau: f64) -> Result<PsOutcome> {
    if !(tau > 0.0 && tau < 1.0) {
        return Err(invalid("tau", "must lie in (0, 1)"));
    }
    require_symmetric_blocks(cm)?;
    let o = omega1();
    let ot = o.transpose();
    let id = M2::identity();
    let (sa, sb, e) = (cm.sigma_a, cm.sigma_b, cm.eps);

    let xa = 0.5 * o * ((1.0 - tau) * sa + (1.0 + tau) * id) * ot;
    let xb = 0.5 * o * ((1.0 - tau) * sb + (1.0 + tau) * id) * ot;
    let h = -0.5 * (1.0 - tau) * o * e * ot;
    let xai = inv(&xa, "X_A")?;
    let y = xb - h * xai * h;
    let yi = inv(&y, "Y")?;
    let w_xa = w_matrix(&xa, &id)?;
    let w_y = w_matrix(&y, &id)?;
    let hwh = h * w_xa * h;
    let w_y_hwh = w_matrix(&y, &hwh)?;

    let m1 = 1.0 - 0.5 * yi.trace();
    let m2 = 1.0 - 0.5 * xai.trace() - 0.5 * (yi * hwh).trace();
    let m3 = 0.5 * (w_y * hwh).trace();

    let c = 0.5 * (tau * (1.0 - tau)).sqrt();
    let k1 = c * (e * ot + (sa - id) * ot * xai * h);
    let k2 = c * ((sb - id) * ot + e * ot * xai * h);
    let j1 = c * (sa - id) * ot;
    let j2 = c * e * ot;

    let sigma_a = tau * sa + (1.0 - tau) * id - 2.0 * (j1 * xai * j1.transpose() + k1 * yi * k1.transpose());
    let sigma_b = tau * sb + (1.0 - tau) * id - 2.0 * (j2 * xai * j2.transpose() + k2 * yi * k2.transpose());
    let eps = tau * e - 2.0 * (j1 * xai * j2.transpose() + k1 * yi * k2.transpose());

    let norm = m1 * m2 + m3;
    let success_prob = norm / (xa.determinant() * y.determinant()).sqrt();

    let p1 = -0.5 * o * k1 * w_y * k1.transpose() * ot;
    let p2 = -0.5 * o * k2 * w_y * k2.transpose() * ot;
    let p12 = -(o * k1 * w_y * k2.transpose() * ot);

    let q1 = -0.5
        * o
        * (j1 * w_xa * j1.transpose()
            + 2.0 * j1 * w_xa * h * yi * k1.transpose()
            + k1 * w_y_hwh * k1.transpose())
        * ot;
    let q2 = -0.5
        * o
        * (j2 * w_xa * j2.transpose()
            + 2.0 * j2 * w_xa * h * yi * k2.transpose()
            + k2 * w_y_hwh * k2.transpose())
        * ot;
    let q12 = -(o
        * (j1 * w_xa * j2.transpose()
            + j1 * w_xa * h * yi * k2.transpose()
            + k1 * yi * h * w_xa * j2.transpose()
            + k1 * w_y_hwh * k2.transpose())
        * ot);

    let core = w_y * (yi * hwh).trace() + yi * (w_y * hwh).trace()
        - sandwich(&hwh) / y.determinant() * yi.trace();
    let r1 = 0.5 * o * (2.0 * j1 * w_xa * h * w_y * k1.transpose() + k1 * core * k1.transpose()) * ot;
    let r2 = 0.5 * o * (2.0 * j2 * w_xa * h * w_y * k2.transpose() + k2 * core * k2.transpose()) * ot;
    let r12 = o
        * (j1 * w_xa * h * w_y * k2.transpose()
            + k1 * w_y * h * w_xa * j2.transpose()
            + k1 * core * k2.transpose())
        * ot;

    Ok(PsOutcome {
        tau,
        sigma_a,
        sigma_b,
        eps,
        success_prob,
        m1,
        m2,
        m3,
        p1,
        p2,
        p12,
        q1,
        q2,
        q12,
        r1,
        r2,
        r12,
    })
}

impl PsOutcome {
    /// The Gaussian envelope as a covariance matrix (not the second moments
    /// of the subtracted state).
    pub fn envelope(&self) -> BipartiteCM {
        BipartiteCM::from_blocks(self.sigma_a, self.sigma_b, self.eps)
    }

    /// Characteristic function at the phase-space row vectors `(alpha, beta)`.
    pub fn char_fn(&self, alpha: &Vector2<f64>, beta: &Vector2<f64>) -> Complex64 {
        let q = |a: &Vector2<f64>, m: &M2, b: &Vector2<f64>| (a.transpose() * m * b)[(0, 0)];
        let exponent = q(alpha, &sandwich(&self.sigma_a), alpha)
            + q(beta, &sandwich(&self.sigma_b), beta)
            + 2.0 * q(alpha, &sandwich(&self.eps), beta);
        let first = self.m1 + q(alpha, &self.p1, alpha) + q(beta, &self.p2, beta) + q(alpha, &self.p12, beta);
        let second = self.m2 + q(alpha, &self.q1, alpha) + q(beta, &self.q2, beta) + q(alpha, &self.q12, beta);
        let third = self.m3 + q(alpha, &self.r1, alpha) + q(beta, &self.r2, beta) + q(alpha, &self.r12, beta);
        let value = (-0.25 * exponent).exp() * (first * second + third) / (self.m1 * self.m2 + self.m3);
        Complex64::new(value, 0.0)
    }

    /// Non-Gaussian fidelity correction `g`, so that the teleportation
    /// fidelity is `(1 + g) / sqrt(det(I + Gamma~/2))`.
    pub fn correction_g(&self) -> Result<f64> {
        let a = M2::identity() + 0.5 * gamma_of(&self.envelope());
        let ai = inv(&a, "I + Gamma/2")?;
        let kernel = sandwich(&ai);
        let t = |m: &M2| (kernel * m).trace();
        let ps = kernel_combo(&self.p1, &self.p2, &self.p12);
        let qs = kernel_combo(&self.q1, &self.q2, &self.q12);
        let rs = kernel_combo(&self.r1, &self.r2, &self.r12);
        let w = w_matrix(&sandwich(&a), &ps)?;
        let num = self.m1 * t(&qs) + self.m2 * t(&ps) + t(&ps) * t(&qs) + t(&rs) + 2.0 * (w * qs).trace();
        Ok(num / (self.m1 * self.m2 + self.m3))
    }
}

/// Convenience wrapper for [`PsOutcome::char_fn`].
pub fn char_fn_2ps(
    cm: &BipartiteCM,
    tau: f64,
    alpha: &Vector2<f64>,
    beta: &Vector2<f64>,
) -> Result<Complex64> {
    Ok(ps2_gaussian(cm, tau)?.char_fn(alpha, beta))
}

/// Envelope blocks and success probability for standard-form inputs,
/// `(alpha~, beta~, gamma~, P)`.
pub fn ps2_standard(alpha: f64, beta: f64, gamma: f64, tau: f64) -> (f64, f64, f64, f64) {
    let g2 = gamma * gamma;
    let quad = (1.0 - alpha) * (1.0 - beta) - g2;
    let lin = 1.0 - alpha * beta + g2;
    let den = (1.0 + alpha) * (1.0 + beta) - g2 + 2.0 * lin * tau + quad * tau * tau;
    let at = 1.0 - 2.0 * tau * ((1.0 - alpha) * (1.0 + beta) + g2 + quad * tau) / den;
    let bt = 1.0 - 2.0 * tau * ((1.0 + alpha) * (1.0 - beta) + g2 + quad * tau) / den;
    let gt = 4.0 * tau * gamma / den;
    let p = 4.0 * (1.0 - tau).powi(2) * ((lin + quad * tau).powi(2) - (alpha - beta).powi(2) + 4.0 * g2)
        / den.powi(3);
    (at, bt, gt, p)
}

/// Heuristic two-photon subtraction `a_A a_B` on a Gaussian state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HeuristicPs {
    pub input: BipartiteCM,
    pub m_a: f64,
    pub m_b: f64,
    pub m_c: f64,
    pub big_m_a: M2,
    pub big_m_b: M2,
    pub big_m_c: M2,
    pub big_m_ac: M2,
    pub big_m_bc: M2,
    /// `1 / (m_A m_B + m_C)`.
    pub norm: f64,
    /// Fidelity correction, `F = (1 + h) / sqrt(det(I + Gamma/2))`.
    pub h: f64,
}

/// Builds the heuristic correction terms. Fails on states with nothing to
/// subtract, where `m_A m_B + m_C` vanishes.
pub fn ps2_heuristic(cm: &BipartiteCM) -> Result<HeuristicPs> {
    require_symmetric_blocks(cm)?;
    let id = M2::identity();
    let z = sigma_z();
    let (sa, sb, e) = (cm.sigma_a, cm.sigma_b, cm.eps);
    let m_a = 1.0 - 0.5 * sa.trace();
    let m_b = 1.0 - 0.5 * sb.trace();
    let m_c = 0.5 * (e.transpose() * e).trace();
    let big_m_a = 0.25 * (id - 2.0 * sandwich(&sa) + sandwich(&(sa * sa)));
    let big_m_b = 0.25 * (id - 2.0 * sandwich(&sb) + sandwich(&(sb * sb)));
    let big_m_c = 0.25 * sandwich(&(e.transpose() * e));
    let big_m_ac = 0.5 * (sandwich(&(sa * e)) - sandwich(&e));
    let big_m_bc = 0.5 * (sandwich(&(e * sb)) - sandwich(&e));

    let e0 = m_a * m_b + m_c;
    let scale = 1.0 + sa.trace().powi(2) + sb.trace().powi(2);
    if !(e0 > 1e-14 * scale) {
        return Err(Error::ZeroNorm(e0));
    }

    let a = id + 0.5 * gamma_of(cm);
    let ai = inv(&a, "I + Gamma/2")?;
    let kernel = sandwich(&ai);
    let t = |m: &M2| (kernel * m).trace();
    // Along the fidelity slice (sigma_z xi, xi) every factor of the
    // subtracted characteristic function is a quadratic form in xi, so the
    // correction is a pair of Gaussian moments against `kernel`.
    let sym = |m: M2| 0.5 * (m + m.transpose());
    let sb_tilde = id - sandwich(&sb);
    let s_a = sym(z * big_m_a * z + z * big_m_ac + big_m_c);
    let s_b = sym(big_m_b + z * big_m_bc + z * big_m_c * z);
    let x = sym(-z * big_m_ac * sandwich(&e) * z
        + 2.0 * big_m_c * sb_tilde
        + z * (big_m_ac * sb_tilde - 2.0 * sandwich(&e) * big_m_c));
    let h = (m_b * t(&s_a) + m_a * t(&s_b) + t(&s_a) * t(&s_b) + 2.0 * (s_a * kernel * s_b * kernel).trace() + t(&x))
        / e0;

    Ok(HeuristicPs {
        input: *cm,
        m_a,
        m_b,
        m_c,
        big_m_a,
        big_m_b,
        big_m_c,
        big_m_ac,
        big_m_bc,
        norm: 1.0 / e0,
        h,
    })
}

impl HeuristicPs {
    /// Characteristic function of the normalized subtracted state.
    pub fn char_fn(&self, alpha: &Vector2<f64>, beta: &Vector2<f64>) -> Complex64 {
        let q = |a: &Vector2<f64>, m: &M2, b: &Vector2<f64>| (a.transpose() * m * b)[(0, 0)];
        let id = M2::identity();
        let (sa, sb, e) = (self.input.sigma_a, self.input.sigma_b, self.input.eps);
        let gauss = (-0.25
            * (q(alpha, &sandwich(&sa), alpha) + q(beta, &sandwich(&sb), beta) + 2.0 * q(alpha, &sandwich(&e), beta)))
            .exp();
        let first = self.m_b + q(beta, &self.big_m_b, beta) + q(alpha, &self.big_m_bc, beta) + q(alpha, &self.big_m_c, alpha);
        let second = self.m_a + q(alpha, &self.big_m_a, alpha) + q(alpha, &self.big_m_ac, beta) + q(beta, &self.big_m_c, beta);
        let sb_tilde = id - sandwich(&sb);
        let extra = self.m_c - q(alpha, &(self.big_m_ac * sandwich(&e)), alpha)
            + 2.0 * q(beta, &(self.big_m_c * sb_tilde), beta)
            + q(alpha, &(self.big_m_ac * sb_tilde - 2.0 * sandwich(&e) * self.big_m_c), beta);
        Complex64::new(self.norm * (first * second + extra) * gauss, 0.0)
    }
}

/// Entanglement swapping by a Bell measurement on `B` (from `cm1 = AB`) and
/// `C` (from `cm2 = CD`), returning the conditional `AD` covariance matrix.
pub fn swap(cm1: &BipartiteCM, cm2: &BipartiteCM) -> Result<BipartiteCM> {
    let z = sigma_z();
    let o = omega1();
    let ot = o.transpose();
    let (sa, sb, eab) = (cm1.sigma_a, cm1.sigma_b, cm1.eps);
    let (sc, sd, ecd) = (cm2.sigma_a, cm2.sigma_b, cm2.eps);
    let s = sb + z * sc * z;
    let det = s.determinant();
    if det.abs() < 1e-300 {
        return Err(Error::Singular("Sigma_B + sigma_z Sigma_C sigma_z"));
    }
    let new_a = sa - eab * ot * s * o * eab.transpose() / det;
    let new_d = sd - ecd * ot * (sc + z * sb * z) * o * ecd.transpose() / det;
    let new_e = -(eab * ot * (sb * z + z * sc) * o * ecd.transpose()) / det;
    Ok(BipartiteCM::from_blocks(new_a, new_d, new_e))
}

/// Swapping two copies of the standard-form state `(alpha, beta, gamma)`
/// measured on their `beta` arms: `(alpha~, gamma~)` with
/// `alpha~ = alpha - gamma^2 / (2 beta)` and `gamma~ = gamma^2 / (2 beta)`.
pub fn swap_symmetric(alpha: f64, beta: f64, gamma: f64) -> Result<(f64, f64)> {
    if !(beta > 0.0) {
        return Err(invalid("beta", "must be > 0"));
    }
    let shift = gamma * gamma / (2.0 * beta);
    Ok((alpha - shift, shift))
}
