//! Average fidelity of continuous-variable teleportation of coherent states.
//!
//! For a Gaussian resource with blocks `sigma_a`, `sigma_b`, `eps` the
//! average over coherent inputs is `1 / sqrt(det(I + Gamma/2))` with
//! `Gamma = Z sigma_a Z + sigma_b - Z eps - eps^T Z`. Non-Gaussian resources
//! from photon subtraction pick up a scalar correction in the numerator,
//! which [`regaussify`] folds back into an equivalent Gaussian resource.
//!
//! A fidelity above 1/2 cannot be reached by measure-and-prepare schemes.

use nalgebra::Matrix2;
use serde::{Deserialize, Serialize};

use crate::channel::{lossy_tmst, AirChannel, Geometry, MU_OXYGEN};
use crate::distill::{ps2_gaussian, ps2_heuristic, swap_symmetric};
use crate::entanglement::{cm_validity, BipartiteCM};
use crate::error::{invalid, Error, Result};
use crate::gaussian::sigma_z;
use crate::numeric::bisect;

/// `Gamma = Z sigma_a Z + sigma_b - Z eps - eps^T Z`.
pub fn gamma_of(cm: &BipartiteCM) -> Matrix2<f64> {
    let z = sigma_z();
    z * cm.sigma_a * z + cm.sigma_b - z * cm.eps - cm.eps.transpose() * z
}

fn inv_sqrt_det(m: Matrix2<f64>) -> Result<f64> {
    let d = m.determinant();
    if !(d > 0.0) {
        return Err(invalid("resource", format!("det(I + Gamma/2) = {d} is not positive")));
    }
    Ok(1.0 / d.sqrt())
}

/// Braunstein-Kimble average fidelity for a Gaussian resource.
pub fn fidelity_gaussian(cm: &BipartiteCM) -> Result<f64> {
    inv_sqrt_det(Matrix2::identity() + 0.5 * gamma_of(cm))
}

/// Fidelity after chaining `k` teleportations over `L/k` hops, each with
/// the same resource: `1 / sqrt(det(I + (k - 1/2) Gamma))`.
pub fn fidelity_concatenated(cm: &BipartiteCM, k: u32) -> Result<f64> {
    if k == 0 {
        return Err(invalid("k", "need at least one hop"));
    }
    inv_sqrt_det(Matrix2::identity() + (k as f64 - 0.5) * gamma_of(cm))
}

/// Fidelity of a squeezed vacuum after subtracting `k` photons per arm,
/// as a function of `lambda_tau = tau tanh r`. Only `k = 1, 2` have
/// closed forms.
pub fn fidelity_ps_tmsv(lambda_tau: f64, k: u32) -> Result<f64> {
    if !(0.0..1.0).contains(&lambda_tau) {
        return Err(invalid("lambda_tau", "must lie in [0, 1)"));
    }
    let l = lambda_tau;
    match k {
        1 => Ok((1.0 - l + 0.5 * l * l) * (1.0 + l).powi(3) / (2.0 * (1.0 + l * l))),
        2 => {
            let u = l * (2.0 - l);
            Ok((1.0 + l).powi(5) * (8.0 - u * (8.0 - 3.0 * u)) / (16.0 * (1.0 + 4.0 * l * l + l.powi(4))))
        }
        _ => Err(invalid("k", "closed forms exist for k = 1 and k = 2")),
    }
}

/// Closed-form fidelity of the lossy two-mode squeezed thermal resource.
pub fn fidelity_tmst_channel(ch: &AirChannel, r: f64, n: f64, geometry: Geometry) -> Result<f64> {
    ch.validate()?;
    let eta = ch.eta_eff(geometry);
    let (c, s) = ((2.0 * r).cosh(), (2.0 * r).sinh());
    let k = 1.0 + 2.0 * n;
    let denom = match geometry {
        Geometry::Asym => {
            1.0 + (0.5 + ch.n_th) * eta + (0.5 + n) * (2.0 - eta) * c - k * (1.0 - eta).sqrt() * s
        }
        Geometry::Sym => 1.0 + (1.0 + 2.0 * ch.n_th) * eta + k * (1.0 - eta) * (c - s),
    };
    Ok(1.0 / denom)
}

/// Probabilistic two-photon subtraction: `(F, g)` with
/// `F = (1 + g) / sqrt(det(I + Gamma~/2))`.
pub fn fidelity_2ps_general(cm: &BipartiteCM, tau: f64) -> Result<(f64, f64)> {
    let out = ps2_gaussian(cm, tau)?;
    let g = out.correction_g()?;
    Ok(((1.0 + g) * fidelity_gaussian(&out.envelope())?, g))
}

/// Standard-form closed forms `(1/sqrt(det(I + Gamma~/2)), 1 + g)` for
/// probabilistic two-photon subtraction.
pub fn fidelity_2ps_standard(alpha: f64, beta: f64, gamma: f64, tau: f64) -> (f64, f64) {
    let g2 = gamma * gamma;
    let quad = (1.0 - alpha) * (1.0 - beta) - g2;
    let lin = 1.0 - alpha * beta + g2;
    let ratio = (-alpha * beta + (1.0 + gamma).powi(2) + quad * tau)
        / ((1.0 + alpha) * (1.0 + beta) - g2 - (alpha * beta - (1.0 - gamma).powi(2)) * tau);
    let base = 0.5 * (1.0 + tau * ratio);
    let rest = (lin * lin - (alpha - beta).powi(2) + 4.0 * g2 + 4.0 * gamma * quad * tau)
        / ((lin + quad * tau).powi(2) - (alpha - beta).powi(2) + 4.0 * g2);
    (base, 2.0 * base * base * (1.0 + rest))
}

/// Heuristic two-photon subtraction: `(F, h)` with `F = (1 + h) / sqrt(det(I + Gamma/2))`.
pub fn fidelity_heuristic(cm: &BipartiteCM) -> Result<(f64, f64)> {
    let h = ps2_heuristic(cm)?.h;
    Ok(((1.0 + h) * fidelity_gaussian(cm)?, h))
}

/// How the correction is spread over the two arms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RegaussMode {
    /// Each diagonal block shifted by the same amount.
    Sym,
    /// Both diagonal blocks replaced by their mean, then shifted.
    Asym,
}

impl std::str::FromStr for RegaussMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sym" => Ok(RegaussMode::Sym),
            "asym" => Ok(RegaussMode::Asym),
            _ => Err(invalid("mode", format!("expected sym or asym, got `{s}`"))),
        }
    }
}

/// Gaussian stand-in for a photon-subtracted resource.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Regaussified {
    pub cm: BipartiteCM,
    /// Compact validity margin of `cm`; negative means not a state.
    pub theta: f64,
    pub valid: bool,
}

/// Absorbs a fidelity correction `c` (either `g` or `h`) into the blocks of
/// `cm_tilde` so that `fidelity_gaussian` of the result equals
/// `(1 + c) fidelity_gaussian(cm_tilde)`. Invalid results are still returned
/// with `valid = false`.
pub fn regaussify(cm_tilde: &BipartiteCM, c: f64, mode: RegaussMode) -> Regaussified {
    let id = Matrix2::identity();
    let s = 1.0 / (1.0 + c);
    let (a, b) = match mode {
        RegaussMode::Sym => (cm_tilde.sigma_a, cm_tilde.sigma_b),
        RegaussMode::Asym => {
            let mean = 0.5 * (cm_tilde.sigma_a + cm_tilde.sigma_b);
            (mean, mean)
        }
    };
    let cm = BipartiteCM::from_blocks(s * (a - c * id), s * (b - c * id), s * cm_tilde.eps);
    let (theta, valid) = match cm.standard_params() {
        Some((al, be, ga)) => {
            let v = cm_validity(al, be, ga);
            (v.theta, v.valid)
        }
        None => (f64::NAN, cm.is_physical()),
    };
    Regaussified { cm, theta, valid }
}

/// Fidelity with a swapped resource, `1 / (1 + alpha - gamma^2 / beta)`.
pub fn fidelity_swapped(alpha: f64, beta: f64, gamma: f64) -> Result<f64> {
    let (at, gt) = swap_symmetric(alpha, beta, gamma)?;
    fidelity_gaussian(&BipartiteCM::standard(at, at, gt))
}

/// Fidelity with homodyne gain `G` (`1/G = inv_gain`) for a coherent
/// target of amplitude `theta`. `inv_gain = 0` is ideal homodyning.
pub fn fidelity_finite_gain(alpha: f64, beta: f64, gamma: f64, inv_gain: f64, theta: f64) -> Result<f64> {
    if !(inv_gain >= 0.0) {
        return Err(invalid("inv_gain", "1/G must be >= 0"));
    }
    let u = inv_gain.sqrt();
    let lead = 2.0 + u * (1.0 + alpha);
    let den = 4.0 * (1.0 + 0.5 * (alpha + beta - 2.0 * gamma))
        + u * (alpha * (5.0 + beta) + beta - (gamma - 1.0) * (gamma + 5.0))
        + 2.0 * inv_gain * (1.0 + alpha);
    let decay = 2.0 * inv_gain * (1.0 - alpha + gamma).powi(2) * theta * theta / (lead * den);
    Ok(2.0 * lead / den * (-decay).exp())
}

/// Swapped-resource blocks `(alpha~, gamma~)` with finite homodyne gain.
pub fn swap_finite_gain(alpha: f64, beta: f64, gamma: f64, inv_gain: f64) -> Result<(f64, f64)> {
    if !(inv_gain >= 0.0) {
        return Err(invalid("inv_gain", "1/G must be >= 0"));
    }
    let u = inv_gain.sqrt();
    let den = 2.0 * (beta + u * (1.0 + beta * beta) + beta * inv_gain);
    if !(den > 0.0) {
        return Err(invalid("beta", "must be > 0"));
    }
    let g2 = gamma * gamma;
    Ok((alpha - g2 * (1.0 + 2.0 * u * beta + inv_gain) / den, g2 * (1.0 - inv_gain) / den))
}

/// A teleportation resource.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TeleportResource {
    Gaussian(BipartiteCM),
    Ps2Probabilistic { cm: BipartiteCM, tau: f64 },
    Ps2Heuristic(BipartiteCM),
    /// Two copies of `(alpha, beta, gamma)` swapped on their `beta` arms.
    Swapped { alpha: f64, beta: f64, gamma: f64 },
    FiniteGain { alpha: f64, beta: f64, gamma: f64, inv_gain: f64, theta: f64 },
}

impl TeleportResource {
    pub fn fidelity(&self) -> Result<f64> {
        match *self {
            TeleportResource::Gaussian(cm) => fidelity_gaussian(&cm),
            TeleportResource::Ps2Probabilistic { cm, tau } => Ok(fidelity_2ps_general(&cm, tau)?.0),
            TeleportResource::Ps2Heuristic(cm) => Ok(fidelity_heuristic(&cm)?.0),
            TeleportResource::Swapped { alpha, beta, gamma } => fidelity_swapped(alpha, beta, gamma),
            TeleportResource::FiniteGain { alpha, beta, gamma, inv_gain, theta } => {
                fidelity_finite_gain(alpha, beta, gamma, inv_gain, theta)
            }
        }
    }
}

/// Source and environment of an open-air teleportation link.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkSetup {
    /// Attenuation density, 1/m.
    pub mu: f64,
    /// Environment photons.
    pub n_th: f64,
    pub eta_ant: f64,
    /// Two-mode squeezing.
    pub r: f64,
    /// Source thermal photons.
    pub n: f64,
}

impl LinkSetup {
    /// Terrestrial 5 GHz link at 300 K.
    pub fn table1() -> Self {
        LinkSetup {
            mu: MU_OXYGEN,
            n_th: 1250.0,
            eta_ant: 0.0,
            r: 1.0,
            n: 1e-2,
        }
    }

    pub fn channel(&self, l: f64) -> Result<AirChannel> {
        AirChannel::new(self.mu, l, self.n_th, self.eta_ant)
    }

    /// Bare resource after the link.
    pub fn resource(&self, geometry: Geometry, l: f64) -> Result<BipartiteCM> {
        lossy_tmst(&self.channel(l)?, self.r, self.n, geometry)
    }

    /// Per-copy `(alpha, beta, gamma)` for swapping at a midpoint relay:
    /// `alpha` stays home, `beta` travels `L/2`.
    pub fn swap_inputs(&self, l: f64) -> Result<(f64, f64, f64)> {
        let ch = self.channel(l)?;
        let eta = ch.eta_eff_over(0.5 * l);
        let k = 1.0 + 2.0 * self.n;
        let (c, s) = ((2.0 * self.r).cosh(), (2.0 * self.r).sinh());
        Ok((
            k * c,
            (1.0 + 2.0 * self.n_th) * eta + k * (1.0 - eta) * c,
            k * (1.0 - eta).sqrt() * s,
        ))
    }
}

/// Ways of using the link for teleportation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "protocol", rename_all = "snake_case")]
pub enum Protocol {
    Bare,
    /// `k` chained hops over `L/k` each.
    Concatenated { k: u32 },
    Probabilistic { tau: f64 },
    Heuristic,
    Swapped,
    /// Bare resource, finite homodyne gain.
    FiniteGain { inv_gain: f64 },
    /// Finite gain in both the swap and the teleportation.
    SwappedFiniteGain { inv_gain: f64 },
}

impl std::str::FromStr for Protocol {
    type Err = Error;
    /// `bare`, `concat:K`, `ps:TAU`, `heuristic`, `swap`, `gain:INV_G`, `swap-gain:INV_G`.
    fn from_str(s: &str) -> Result<Self> {
        let (head, arg) = match s.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (s, None),
        };
        let num = |a: Option<&str>| -> Result<f64> {
            a.ok_or_else(|| invalid("protocol", format!("`{head}` needs an argument")))?
                .parse::<f64>()
                .map_err(|e| invalid("protocol", e.to_string()))
        };
        match head {
            "bare" => Ok(Protocol::Bare),
            "concat" => Ok(Protocol::Concatenated { k: num(arg)? as u32 }),
            "ps" => Ok(Protocol::Probabilistic { tau: num(arg)? }),
            "heuristic" => Ok(Protocol::Heuristic),
            "swap" => Ok(Protocol::Swapped),
            "gain" => Ok(Protocol::FiniteGain { inv_gain: num(arg)? }),
            "swap-gain" => Ok(Protocol::SwappedFiniteGain { inv_gain: num(arg)? }),
            _ => Err(invalid("protocol", format!("unknown protocol `{s}`"))),
        }
    }
}

/// Average fidelity over distance `l`.
pub fn fidelity_at(setup: &LinkSetup, geometry: Geometry, protocol: Protocol, l: f64) -> Result<f64> {
    match protocol {
        Protocol::Bare => fidelity_gaussian(&setup.resource(geometry, l)?),
        Protocol::Concatenated { k } => {
            let hop = setup.resource(geometry, l / k.max(1) as f64)?;
            fidelity_concatenated(&hop, k)
        }
        Protocol::Probabilistic { tau } => Ok(fidelity_2ps_general(&setup.resource(geometry, l)?, tau)?.0),
        Protocol::Heuristic => Ok(fidelity_heuristic(&setup.resource(geometry, l)?)?.0),
        Protocol::Swapped => {
            let (a, b, g) = setup.swap_inputs(l)?;
            fidelity_swapped(a, b, g)
        }
        Protocol::FiniteGain { inv_gain } => {
            let (a, b, g) = standard(&setup.resource(geometry, l)?)?;
            fidelity_finite_gain(a, b, g, inv_gain, 0.0)
        }
        Protocol::SwappedFiniteGain { inv_gain } => {
            let (a, b, g) = setup.swap_inputs(l)?;
            let (at, gt) = swap_finite_gain(a, b, g, inv_gain)?;
            fidelity_finite_gain(at, at, gt, inv_gain, 0.0)
        }
    }
}

fn standard(cm: &BipartiteCM) -> Result<(f64, f64, f64)> {
    cm.standard_params()
        .ok_or_else(|| invalid("resource", "finite-gain formula needs a standard-form matrix"))
}

/// Distance where the fidelity drops to 1/2, by bisection to 0.01 m on `[0, hi]`.
pub fn classical_limit_distance(setup: &LinkSetup, geometry: Geometry, protocol: Protocol, hi: f64) -> Result<f64> {
    let f = |l: f64| fidelity_at(setup, geometry, protocol, l).map(|v| v - 0.5).unwrap_or(f64::NAN);
    if f(0.0) <= 0.0 {
        return Ok(0.0);
    }
    if f(hi) > 0.0 {
        return Err(Error::NoConvergence(format!("fidelity still above 1/2 at {hi} m")));
    }
    bisect(f, 0.0, hi, 0.01)
}
