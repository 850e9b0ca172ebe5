//! Open-air and free-space channels.
//!
//! Attenuation is an effective beam splitter of reflectivity
//! `eta_eff = 1 - e^{-mu L}(1 - eta_ant)` mixing the travelling mode with a
//! thermal bath of `N_th` photons. The asymmetric geometry sends one arm of a
//! two-mode squeezed thermal state over the whole distance `L`; the symmetric
//! one sources the state midway and sends each arm over `L/2`.
//!
//! Units are SI throughout: metres, hertz, kelvin.

use nalgebra::Matrix2;
use serde::{Deserialize, Serialize};

use crate::entanglement::{pts_eigenvalues, BipartiteCM};
use crate::error::{invalid, Error, Result};
use crate::gaussian::{apply, beam_splitter, partial_trace, thermal, tmst, ModeSubset};
use crate::numeric::{bisect, integrate};

/// Planck constant, J s.
pub const PLANCK: f64 = 6.626_070_15e-34;
/// Boltzmann constant, J / K.
pub const BOLTZMANN: f64 = 1.380_649e-23;
/// Speed of light in vacuum, m / s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Oxygen attenuation at 5 GHz, 1/m.
pub const MU_OXYGEN: f64 = 1.44e-6;

/// Bose-Einstein occupation `1 / (e^{h nu / k T} - 1)`.
pub fn bose_einstein(nu: f64, temperature: f64) -> Result<f64> {
    if !(nu > 0.0) {
        return Err(invalid("nu", "frequency must be > 0"));
    }
    if !(temperature > 0.0) {
        return Err(invalid("temperature", "temperature must be > 0"));
    }
    let x = PLANCK * nu / (BOLTZMANN * temperature);
    Ok(1.0 / x.exp_m1())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Geometry {
    /// One arm travels the full distance.
    Asym,
    /// Source in the middle, each arm travels `L/2`.
    Sym,
}

impl std::str::FromStr for Geometry {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "asym" | "asymmetric" => Ok(Geometry::Asym),
            "sym" | "symmetric" => Ok(Geometry::Sym),
            _ => Err(invalid("geometry", format!("expected asym or sym, got `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AirChannel {
    /// Attenuation density, 1/m.
    pub mu: f64,
    /// Distance, m.
    pub l: f64,
    /// Environment photons.
    pub n_th: f64,
    /// Antenna reflectivity.
    pub eta_ant: f64,
}

impl AirChannel {
    pub fn new(mu: f64, l: f64, n_th: f64, eta_ant: f64) -> Result<Self> {
        let c = AirChannel { mu, l, n_th, eta_ant };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mu >= 0.0) {
            return Err(invalid("mu", "attenuation must be >= 0"));
        }
        if !(self.l >= 0.0) {
            return Err(invalid("l", "distance must be >= 0"));
        }
        if !(self.n_th >= 0.0) {
            return Err(invalid("n_th", "photon number must be >= 0"));
        }
        if !(0.0..=1.0).contains(&self.eta_ant) {
            return Err(invalid("eta_ant", "reflectivity must lie in [0, 1]"));
        }
        Ok(())
    }

    pub fn at_distance(&self, l: f64) -> Self {
        AirChannel { l, ..*self }
    }

    /// `1 - e^{-mu L}`.
    pub fn eta_env(&self) -> f64 {
        eta_env(self.mu, self.l)
    }

    /// `1 - e^{-mu L}(1 - eta_ant)` over the distance `l`.
    pub fn eta_eff_over(&self, l: f64) -> f64 {
        1.0 - (-self.mu * l).exp() * (1.0 - self.eta_ant)
    }

    /// Per-arm effective reflectivity in the given geometry.
    pub fn eta_eff(&self, geometry: Geometry) -> f64 {
        match geometry {
            Geometry::Asym => self.eta_eff_over(self.l),
            Geometry::Sym => self.eta_eff_over(0.5 * self.l),
        }
    }
}

/// `1 - e^{-mu L}`.
pub fn eta_env(mu: f64, l: f64) -> f64 {
    -(-mu * l).exp_m1()
}

/// Effective reflectivity and thermal photons of an inhomogeneous line with
/// attenuation profile `mu(x)` and occupation profile `n(x)` on `[0, L]`.
pub fn eta_env_inhomogeneous<M, N>(mu_fn: M, n_fn: N, l: f64) -> Result<(f64, f64)>
where
    M: Fn(f64) -> f64,
    N: Fn(f64) -> f64,
{
    if !(l > 0.0) {
        return Err(invalid("l", "length must be > 0"));
    }
    let rtol = 1e-10;
    let optical = |a: f64, b: f64| -> Result<f64> {
        if b <= a {
            Ok(0.0)
        } else {
            integrate(&mu_fn, a, b, rtol)
        }
    };
    let total = optical(0.0, l)?;
    let eta = -(-total).exp_m1();
    if eta == 0.0 {
        return Ok((0.0, 0.0));
    }
    let weighted = |x: f64| {
        let tail = optical(x, l).unwrap_or(f64::NAN);
        mu_fn(x) * n_fn(x) * (-tail).exp()
    };
    let num = integrate(&weighted, 0.0, l, rtol)?;
    if !num.is_finite() {
        return Err(Error::NoConvergence("inhomogeneous optical depth".into()));
    }
    Ok((eta, num / eta))
}

/// Printed lossy TMST covariance matrix; the travelling mode comes first.
pub fn lossy_tmst(ch: &AirChannel, r: f64, n: f64, geometry: Geometry) -> Result<BipartiteCM> {
    ch.validate()?;
    match geometry {
        Geometry::Asym => lossy_tmst_arms(ch, r, n, ch.l, None),
        Geometry::Sym => lossy_tmst_arms(ch, r, n, 0.5 * ch.l, Some(0.5 * ch.l)),
    }
}

/// Lossy TMST with arm lengths `l1` and optionally `l2`; `None` keeps the
/// second arm in the lab.
pub fn lossy_tmst_arms(ch: &AirChannel, r: f64, n: f64, l1: f64, l2: Option<f64>) -> Result<BipartiteCM> {
    if !(n >= 0.0) {
        return Err(invalid("n", "thermal occupation must be >= 0"));
    }
    let k = 1.0 + 2.0 * n;
    let (c, s) = ((2.0 * r).cosh(), (2.0 * r).sinh());
    let bath = 1.0 + 2.0 * ch.n_th;
    let e1 = ch.eta_eff_over(l1);
    let e2 = l2.map(|l| ch.eta_eff_over(l)).unwrap_or(0.0);
    let a = bath * e1 + k * (1.0 - e1) * c;
    let b = bath * e2 + k * (1.0 - e2) * c;
    let g = k * ((1.0 - e1) * (1.0 - e2)).sqrt() * s;
    Ok(BipartiteCM::standard(a, b, g))
}

/// The same state built from a TMST, thermal ancillas and beam splitters.
pub fn lossy_tmst_constructive(ch: &AirChannel, r: f64, n: f64, geometry: Geometry) -> Result<BipartiteCM> {
    ch.validate()?;
    let (e1, e2) = match geometry {
        Geometry::Asym => (ch.eta_eff(geometry), 0.0),
        Geometry::Sym => (ch.eta_eff(geometry), ch.eta_eff(geometry)),
    };
    let st = tmst(r, n)?
        .tensor(&thermal(1, ch.n_th)?)
        .tensor(&thermal(1, ch.n_th)?);
    let st = apply(&st, &beam_splitter(1.0 - e1)?, &ModeSubset::new(&[0, 2])?)?;
    let st = apply(&st, &beam_splitter(1.0 - e2)?, &ModeSubset::new(&[1, 3])?)?;
    BipartiteCM::from_state(&partial_trace(&st, &ModeSubset::new(&[0, 1])?)?)
}

/// Smaller PT symplectic eigenvalue of the lossy TMST at distance `l`.
pub fn nu_minus_at(ch: &AirChannel, r: f64, n: f64, geometry: Geometry, l: f64) -> Result<f64> {
    Ok(pts_eigenvalues(&lossy_tmst(&ch.at_distance(l), r, n, geometry)?)?.0)
}

fn check_entangling(r: f64, n: f64) -> Result<()> {
    if !(r > 0.0) || !(n < (-r).exp() * r.sinh()) {
        return Err(Error::NeverEntangled(format!(
            "need r > 0 and n < e^-r sinh r (r = {r}, n = {n})"
        )));
    }
    Ok(())
}

/// Largest environment reflectivity that keeps the asymmetric state entangled.
pub fn eta_max(r: f64, n: f64, n_th: f64) -> Result<f64> {
    check_entangling(r, n)?;
    let inner = 1.0 + 2.0 * n * (1.0 + n) / (1.0 - (1.0 + 2.0 * n) * (2.0 * r).cosh());
    Ok(1.0 / (1.0 + n_th / inner))
}

/// Distance at which entanglement is lost, m.
///
/// Closed form for the asymmetric geometry; for the symmetric one, bisection
/// of `nu_minus(L) = 1` to 0.01 m.
pub fn l_max(ch: &AirChannel, r: f64, n: f64, geometry: Geometry) -> Result<f64> {
    ch.validate()?;
    if !(ch.mu > 0.0) {
        return Err(invalid("mu", "attenuation must be > 0 for a finite reach"));
    }
    let em = eta_max(r, n, ch.n_th)?;
    let asym = -((1.0 - em) / (1.0 - ch.eta_ant)).ln() / ch.mu;
    match geometry {
        Geometry::Asym => {
            if ch.eta_ant >= em {
                return Ok(0.0);
            }
            Ok(asym)
        }
        Geometry::Sym => {
            let f = |l: f64| nu_minus_at(ch, r, n, Geometry::Sym, l).map(|v| v - 1.0).unwrap_or(f64::NAN);
            if f(0.0) >= 0.0 {
                return Ok(0.0);
            }
            let mut hi = asym.max(1.0);
            while f(hi) < 0.0 {
                hi *= 2.0;
                if hi > 1e12 {
                    return Err(Error::NoConvergence("symmetric reach unbounded".into()));
                }
            }
            bisect(f, 0.0, hi, 0.01)
        }
    }
}

/// Attenuation density that puts the asymmetric reach at `target_l`.
pub fn mu_for_reach(target_l: f64, r: f64, n: f64, n_th: f64) -> Result<f64> {
    let em = eta_max(r, n, n_th)?;
    Ok(-(1.0 - em).ln() / target_l)
}

/// Phase-insensitive amplifier on the listed modes (0 or 1):
/// `Sigma -> g Sigma + (g - 1)(1 + 2 n_H) I` locally, cross blocks scaled by `sqrt g`.
pub fn hemt_amplify(cm: &BipartiteCM, g: f64, n_h: f64, modes: &[usize]) -> Result<BipartiteCM> {
    if !(g >= 1.0) {
        return Err(invalid("g", "gain must be >= 1"));
    }
    if !(n_h >= 0.0) {
        return Err(invalid("n_h", "added photons must be >= 0"));
    }
    if modes.iter().any(|&m| m > 1) {
        return Err(invalid("modes", "bipartite states have modes 0 and 1"));
    }
    let noise = Matrix2::identity() * ((g - 1.0) * (1.0 + 2.0 * n_h));
    let mut out = *cm;
    if modes.contains(&0) {
        out.sigma_a = out.sigma_a * g + noise;
        out.eps *= g.sqrt();
    }
    if modes.contains(&1) {
        out.sigma_b = out.sigma_b * g + noise;
        out.eps *= g.sqrt();
    }
    Ok(out)
}

/// Free-space path loss `(4 pi d nu / c)^2`, linear and in dB.
pub fn fspl(nu: f64, d: f64) -> (f64, f64) {
    let lin = (4.0 * std::f64::consts::PI * d * nu / SPEED_OF_LIGHT).powi(2);
    (lin, 10.0 * lin.log10())
}

pub fn wavelength(nu: f64) -> f64 {
    SPEED_OF_LIGHT / nu
}

/// Parabolic directivity `(pi a / lambda)^2 e_a`.
pub fn directivity(a: f64, nu: f64, e_a: f64) -> f64 {
    (std::f64::consts::PI * a / wavelength(nu)).powi(2) * e_a
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkGeometry {
    /// Carrier frequency, Hz.
    pub nu: f64,
    /// Emitter-receiver distance, m.
    pub d: f64,
    /// Parabola diameter, m.
    pub a: f64,
    /// Aperture efficiency.
    pub e_a: f64,
    /// Initial spot size, m.
    pub w0: f64,
    /// Receiver aperture radius, m.
    pub a_r: f64,
    /// Beam curvature radius, m.
    pub r0: f64,
}

impl LinkGeometry {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("nu", self.nu),
            ("d", self.d),
            ("a", self.a),
            ("w0", self.w0),
            ("a_r", self.a_r),
            ("r0", self.r0),
        ] {
            if !(v > 0.0) {
                return Err(invalid(name, "must be > 0"));
            }
        }
        if !(self.e_a > 0.0 && self.e_a <= 1.0) {
            return Err(invalid("e_a", "aperture efficiency must lie in (0, 1]"));
        }
        Ok(())
    }

    pub fn wavelength(&self) -> f64 {
        wavelength(self.nu)
    }

    /// Rayleigh range `pi w0^2 / (2 lambda)`.
    pub fn rayleigh_range(&self) -> f64 {
        std::f64::consts::PI * self.w0 * self.w0 / (2.0 * self.wavelength())
    }

    /// Spot size at the receiver.
    pub fn spot_size(&self) -> f64 {
        let a = 1.0 - self.d / self.r0;
        let b = self.d / self.rayleigh_range();
        self.w0 / std::f64::consts::SQRT_2 * (a * a + b * b).sqrt()
    }
}

/// Friis ratio `D^2 / L_FSPL` for identical parabolic antennas.
pub fn friis(g: &LinkGeometry) -> Result<f64> {
    g.validate()?;
    Ok(directivity(g.a, g.nu, g.e_a).powi(2) / fspl(g.nu, g.d).0)
}

/// `(pi a^2 e_a / (4 d lambda))^2`.
pub fn tau_path(g: &LinkGeometry) -> Result<f64> {
    g.validate()?;
    Ok((std::f64::consts::PI * g.a * g.a * g.e_a / (4.0 * g.d * g.wavelength())).powi(2))
}

/// `1 - exp(-2 a_R^2 / w^2)`.
pub fn tau_diffraction(g: &LinkGeometry) -> Result<f64> {
    g.validate()?;
    let w = g.spot_size();
    Ok(-(-2.0 * g.a_r * g.a_r / (w * w)).exp_m1())
}

/// Reflectivity below which a diffraction-limited pure TMSV stays entangled:
/// `1/(1 + N_th)` (asym) and `1/(1 + N_th (1 + coth r))` (sym).
pub fn preservation_threshold(n_th: f64, r: f64, geometry: Geometry) -> f64 {
    match geometry {
        Geometry::Asym => 1.0 / (1.0 + n_th),
        Geometry::Sym => 1.0 / (1.0 + n_th * (1.0 + 1.0 / r.tanh())),
    }
}

/// `(lambda / pi) sqrt(-ln eta_lim)`, the bound on `a_R w0 / d`.
pub fn region_constant(lambda_wl: f64, eta_lim: f64) -> f64 {
    lambda_wl / std::f64::consts::PI * (-eta_lim.ln()).sqrt()
}

/// Minimum aperture product `a_R w0` at distance `d`, m^2.
pub fn entanglement_region(lambda_wl: f64, eta_lim: f64, d: f64) -> f64 {
    region_constant(lambda_wl, eta_lim) * d
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table1(l: f64) -> AirChannel {
        AirChannel::new(MU_OXYGEN, l, 1250.0, 0.0).unwrap()
    }

    #[test]
    fn occupations() {
        let hot = bose_einstein(5e9, 300.0).unwrap();
        assert!((hot - 1250.0).abs() < 1.0, "{hot}");
        let cold = bose_einstein(5e9, 2.7).unwrap();
        assert!((cold - 11.0).abs() < 0.5, "{cold}");
        assert!(bose_einstein(5e14, 300.0).unwrap() < 1e-30);
    }

    #[test]
    fn printed_and_constructive_states_agree() {
        for l in [0.0, 120.0, 480.0, 3000.0] {
            for geo in [Geometry::Asym, Geometry::Sym] {
                let ch = AirChannel::new(2e-4, l, 3.0, 0.01).unwrap();
                let a = lossy_tmst(&ch, 0.7, 0.05, geo).unwrap().matrix();
                let b = lossy_tmst_constructive(&ch, 0.7, 0.05, geo).unwrap().matrix();
                assert!((a - b).amax() < 1e-12);
            }
        }
    }

    #[test]
    fn reach_matches_table_values() {
        let la = l_max(&table1(0.0), 1.0, 0.01, Geometry::Asym).unwrap();
        let ls = l_max(&table1(0.0), 1.0, 0.01, Geometry::Sym).unwrap();
        assert!((la - 550.0).abs() < 5.0, "{la}");
        assert!((ls - 480.0).abs() < 5.0, "{ls}");
        let nu = nu_minus_at(&table1(0.0), 1.0, 0.01, Geometry::Asym, la).unwrap();
        assert!((nu - 1.0).abs() < 1e-9);
        assert!(matches!(eta_max(1.0, 0.5, 10.0), Err(Error::NeverEntangled(_))));
    }

    #[test]
    fn inhomogeneous_reduces_to_homogeneous() {
        let (eta, n) = eta_env_inhomogeneous(|_| 2e-3, |_| 7.0, 300.0).unwrap();
        assert!((eta - eta_env(2e-3, 300.0)).abs() < 1e-12);
        assert!((n - 7.0).abs() < 1e-9);
        let (_, n2) = eta_env_inhomogeneous(|x| 1e-3 + 1e-6 * x, |x| 100.0 * x / 300.0, 300.0).unwrap();
        assert!(n2 <= 100.0);
    }

    #[test]
    fn link_budget() {
        let (_, db) = fspl(5e9, 1000.0);
        assert!((db - 106.4).abs() < 0.05);
        assert!((fspl(5e9, 2000.0).1 - db - 6.0206).abs() < 1e-3);
        let w0 = 1.5;
        let g = LinkGeometry {
            nu: 5e9,
            d: 2e6,
            a: 2.0 * w0,
            e_a: 1.0,
            w0,
            a_r: w0,
            r0: 2e6,
        };
        let far = tau_diffraction(&g).unwrap();
        let path = tau_path(&g).unwrap();
        assert!((far / path - 1.0).abs() < 0.05);
        assert!((friis(&g).unwrap() - path).abs() < 1e-12 * path);
    }

    #[test]
    fn satellite_thresholds() {
        let a = preservation_threshold(11.0, 1.0, Geometry::Asym);
        let s = preservation_threshold(11.0, 1.0, Geometry::Sym);
        assert!((a - 0.0833).abs() < 1e-4 && (s - 0.0378).abs() < 1e-3);
        assert!((region_constant(0.06, 0.038) - 0.035).abs() < 1e-3);
        assert!((entanglement_region(0.06, 0.038, 1000.0) - 35.0).abs() < 1.0);
    }
}
