//! Gaussian quantum Fisher information, symmetric logarithmic derivatives and
//! optimal observables for one-parameter families of Gaussian states.
//!
//! Two independent routes to the QFI are provided. The two-mode route works
//! with `A = i Omega sigma` and the symplectic eigenvalues of the state; the
//! general route solves `(sigma (x) sigma - Omega (x) Omega) vec(X) = vec(d sigma)`
//! and is valid for any number of modes. Both add the displacement term
//! `2 dd^T sigma^{-1} dd`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::gaussian::{omega_matrix, symplectic_eigenvalues, GaussianState};
use crate::numeric::vec_of;

/// Symplectic eigenvalues closer than this to 1 count as pure.
pub const TOL_PURE: f64 = 1e-7;
/// Default finite-difference step in units of the parameter.
pub const DEFAULT_STEP: f64 = 1e-4;

type Evaluator<'a> = dyn Fn(f64) -> Result<GaussianState> + Send + Sync + 'a;
type Tangent<'a> = dyn Fn(f64) -> Result<(DMatrix<f64>, DVector<f64>)> + Send + Sync + 'a;

/// A parameterized Gaussian state `lambda -> rho_lambda` evaluated at `lambda0`.
///
/// Derivatives come from central differences with one Richardson step unless
/// an analytic tangent `(d sigma, d d)` is attached with [`with_tangent`].
///
/// [`with_tangent`]: GaussianFamily::with_tangent
pub struct GaussianFamily<'a> {
    eval: Box<Evaluator<'a>>,
    tangent: Option<Box<Tangent<'a>>>,
    pub lambda0: f64,
    pub step: f64,
}

impl<'a> GaussianFamily<'a> {
    pub fn new<F>(eval: F, lambda0: f64, step: f64) -> Self
    where
        F: Fn(f64) -> Result<GaussianState> + Send + Sync + 'a,
    {
        GaussianFamily {
            eval: Box::new(eval),
            tangent: None,
            lambda0,
            step,
        }
    }

    /// Attaches the exact derivative of `(sigma, d)` with respect to `lambda`.
    pub fn with_tangent<T>(mut self, tangent: T) -> Self
    where
        T: Fn(f64) -> Result<(DMatrix<f64>, DVector<f64>)> + Send + Sync + 'a,
    {
        self.tangent = Some(Box::new(tangent));
        self
    }

    pub fn state_at(&self, lambda: f64) -> Result<GaussianState> {
        (self.eval)(lambda)
    }

    /// State at `lambda0` with `(d sigma / d lambda, d d / d lambda)`.
    pub fn derivatives(&self) -> Result<(GaussianState, DMatrix<f64>, DVector<f64>)> {
        let state = self.state_at(self.lambda0)?;
        if let Some(t) = &self.tangent {
            let (ds, dd) = t(self.lambda0)?;
            return Ok((state, ds, dd));
        }
        if !(self.step > 0.0) {
            return Err(crate::error::invalid("step", "finite-difference step must be > 0"));
        }
        let diff = |h: f64| -> Result<(DMatrix<f64>, DVector<f64>)> {
            let p = self.state_at(self.lambda0 + h)?;
            let m = self.state_at(self.lambda0 - h)?;
            Ok((
                (p.sigma() - m.sigma()) / (2.0 * h),
                (p.d() - m.d()) / (2.0 * h),
            ))
        };
        let (s1, d1) = diff(self.step)?;
        let (s2, d2) = diff(0.5 * self.step)?;
        Ok((state, (s2 * 4.0 - s1) / 3.0, (d2 * 4.0 - d1) / 3.0))
    }
}

fn inverse(m: &DMatrix<f64>, what: &'static str) -> Result<DMatrix<f64>> {
    m.clone().try_inverse().ok_or(Error::Singular(what))
}

fn displacement_term(sigma: &DMatrix<f64>, dd: &DVector<f64>) -> Result<f64> {
    if dd.amax() == 0.0 {
        return Ok(0.0);
    }
    let sol = sigma
        .clone()
        .lu()
        .solve(dd)
        .ok_or(Error::Singular("covariance matrix"))?;
    Ok(2.0 * dd.dot(&sol))
}

fn sigma_is_static(sigma: &DMatrix<f64>, ds: &DMatrix<f64>) -> bool {
    ds.amax() < 1e-12 * sigma.amax().max(1.0)
}

fn check_mixed(sigma: &DMatrix<f64>) -> Result<Vec<f64>> {
    let nus = symplectic_eigenvalues(sigma)?;
    if nus[0] - 1.0 < TOL_PURE {
        return Err(Error::RegularizationRequired {
            nu: nus[0],
            tol: TOL_PURE,
        });
    }
    Ok(nus)
}

/// QFI of a family at `lambda0`.
///
/// Two-mode families use the symplectic-eigenvalue formula; other sizes go
/// through [`qfi_from_derivatives`]. A pure state whose covariance still
/// moves is rejected with [`Error::RegularizationRequired`].
pub fn gaussian_qfi(family: &GaussianFamily) -> Result<f64> {
    let (state, ds, dd) = family.derivatives()?;
    let disp = displacement_term(state.sigma(), &dd)?;
    if sigma_is_static(state.sigma(), &ds) {
        return Ok(disp);
    }
    check_mixed(state.sigma())?;
    if state.n_modes() == 2 {
        Ok(two_mode_sigma_term(state.sigma(), &ds)? + disp)
    } else {
        Ok(vectorized_sigma_term(state.sigma(), &ds)? + disp)
    }
}

/// QFI from `(sigma, d sigma, d d)` by the vectorized route, any mode count.
pub fn qfi_from_derivatives(sigma: &DMatrix<f64>, ds: &DMatrix<f64>, dd: &DVector<f64>) -> Result<f64> {
    let disp = displacement_term(sigma, dd)?;
    if sigma_is_static(sigma, ds) {
        return Ok(disp);
    }
    check_mixed(sigma)?;
    Ok(vectorized_sigma_term(sigma, ds)? + disp)
}

fn solve_sld_matrix(sigma: &DMatrix<f64>, ds: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = sigma.nrows();
    let om = omega_matrix(n / 2);
    let m = sigma.kronecker(sigma) - om.kronecker(&om);
    let x = m
        .lu()
        .solve(&vec_of(ds))
        .ok_or(Error::Singular("sigma (x) sigma - Omega (x) Omega"))?;
    let a = DMatrix::from_column_slice(n, n, x.as_slice());
    Ok((&a + a.transpose()) * 0.5)
}

fn vectorized_sigma_term(sigma: &DMatrix<f64>, ds: &DMatrix<f64>) -> Result<f64> {
    let a = solve_sld_matrix(sigma, ds)?;
    Ok(0.5 * (ds.transpose() * a).trace())
}

/// Sigma-dependent part of the two-mode QFI.
///
/// `H = [det A Tr((A^-1 dA)^2) + sqrt(det(I + A^2)) Tr(((I + A^2)^-1 dA)^2)
///       + 4 (nu+^2 - nu-^2) (-(d nu+)^2 / (nu+^4 - 1) + (d nu-)^2 / (nu-^4 - 1))]
///       / (2 (det A - 1))`
///
/// with `A = i Omega sigma`. The identity in `I + A^2` is 4x4.
pub fn two_mode_sigma_term(sigma: &DMatrix<f64>, ds: &DMatrix<f64>) -> Result<f64> {
    if sigma.nrows() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            got: sigma.nrows(),
        });
    }
    let om = omega_matrix(2);
    let id = DMatrix::<f64>::identity(4, 4);
    let det_a = sigma.determinant();
    let sinv = inverse(sigma, "covariance matrix")?;

    // Tr[(A^-1 dA)^2] = Tr[(sigma^-1 d sigma)^2]
    let x = &sinv * ds;
    let t1 = (&x * &x).trace();

    // I + A^2 = I - Omega sigma Omega sigma; ((I+A^2)^-1 dA)^2 = -((I+A^2)^-1 Omega d sigma)^2
    let os = &om * sigma;
    let ia2 = &id - &os * &os;
    let det_ia2 = ia2.determinant();
    let y = inverse(&ia2, "I + A^2")? * (&om * ds);
    let t2 = -(&y * &y).trace();

    // symplectic eigenvalues and their derivatives
    let delta = -0.5 * (&os * &os).trace();
    let d_delta = -(&os * &om * ds).trace();
    let d_det = det_a * (&sinv * ds).trace();
    let disc = (delta * delta - 4.0 * det_a).max(0.0);
    let root = disc.sqrt();
    let nu_p2 = 0.5 * (delta + root);
    let nu_m2 = det_a / nu_p2;
    let t3 = if root > 1e-10 * delta.abs().max(1.0) {
        let d_root = (delta * d_delta - 2.0 * d_det) / root;
        let d_nu_p2 = 0.5 * (d_delta + d_root);
        let d_nu_m2 = 0.5 * (d_delta - d_root);
        // (d nu)^2 = (d nu^2)^2 / (4 nu^2)
        let dnp_sq = d_nu_p2 * d_nu_p2 / (4.0 * nu_p2);
        let dnm_sq = d_nu_m2 * d_nu_m2 / (4.0 * nu_m2);
        4.0 * (nu_p2 - nu_m2)
            * (-dnp_sq / (nu_p2 * nu_p2 - 1.0) + dnm_sq / (nu_m2 * nu_m2 - 1.0))
    } else {
        0.0
    };
    Ok((det_a * t1 + det_ia2.max(0.0).sqrt() * t2 + t3) / (2.0 * (det_a - 1.0)))
}

/// Operator `c0 + lin^T r + r^T quad r` over the quadratures, symmetrically ordered.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticObservable {
    pub quad: DMatrix<f64>,
    pub lin: DVector<f64>,
    pub c0: f64,
}

impl QuadraticObservable {
    pub fn zero(n_modes: usize) -> Self {
        QuadraticObservable {
            quad: DMatrix::zeros(2 * n_modes, 2 * n_modes),
            lin: DVector::zeros(2 * n_modes),
            c0: 0.0,
        }
    }

    pub fn constant(n_modes: usize, c0: f64) -> Self {
        QuadraticObservable {
            c0,
            ..Self::zero(n_modes)
        }
    }

    /// Photon number of `mode`, `(x^2 + p^2 - 1) / 2`.
    pub fn number(n_modes: usize, mode: usize) -> Self {
        let mut o = Self::zero(n_modes);
        o.quad[(2 * mode, 2 * mode)] = 0.5;
        o.quad[(2 * mode + 1, 2 * mode + 1)] = 0.5;
        o.c0 = -0.5;
        o
    }

    pub fn scaled(&self, k: f64) -> Self {
        QuadraticObservable {
            quad: &self.quad * k,
            lin: &self.lin * k,
            c0: self.c0 * k,
        }
    }

    pub fn plus_constant(mut self, c: f64) -> Self {
        self.c0 += c;
        self
    }

    /// Two-mode coefficients `(L11, L22, L12, L0)` of
    /// `L11 n1 + L22 n2 + L12 (a1 a2 + a1^dag a2^dag) + L0`.
    ///
    /// Only meaningful when `quad` has the phase-insensitive standard shape
    /// `g1 I (+) g2 I` with `g12 sigma_z` coupling and no linear part.
    pub fn number_basis_coefficients(&self) -> (f64, f64, f64, f64) {
        let q = &self.quad;
        let g1 = 0.5 * (q[(0, 0)] + q[(1, 1)]);
        let g2 = 0.5 * (q[(2, 2)] + q[(3, 3)]);
        let g12 = 0.5 * (q[(0, 2)] - q[(1, 3)]);
        // g (x^2 + p^2) = g (2 n + 1); 2 g12 (x1 x2 - p1 p2) = 2 g12 (a1 a2 + h.c.)
        (2.0 * g1, 2.0 * g2, 2.0 * g12, self.c0 + g1 + g2)
    }
}

/// Exact mean and variance of a quadratic observable on a Gaussian state.
pub fn observable_moments(state: &GaussianState, obs: &QuadraticObservable) -> Result<(f64, f64)> {
    let n = state.sigma().nrows();
    if obs.quad.nrows() != n || obs.lin.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: obs.quad.nrows(),
        });
    }
    let (sigma, d) = (state.sigma(), state.d());
    let a = &obs.quad;
    let mean = obs.c0 + obs.lin.dot(d) + 0.5 * (a * sigma).trace() + d.dot(&(a * d));
    let om = omega_matrix(n / 2);
    let lin_c = &obs.lin + (a * d) * 2.0;
    let asa = a * sigma;
    let aoa = a * &om;
    let var = 0.5 * (&asa * &asa).trace() + 0.5 * (&aoa * &aoa).trace() + 0.5 * lin_c.dot(&(sigma * &lin_c));
    Ok((mean, var.max(0.0)))
}

/// Symmetric logarithmic derivative of the family at `lambda0`.
///
/// `L = dr^T X dr - Tr[sigma X] / 2 + 2 (sigma^-1 dd)^T dr` with
/// `dr = r - d` and `vec(X) = (sigma (x) sigma - Omega (x) Omega)^-1 vec(d sigma)`.
pub fn gaussian_sld(family: &GaussianFamily) -> Result<QuadraticObservable> {
    let (state, ds, dd) = family.derivatives()?;
    let n = state.sigma().nrows();
    let sigma = state.sigma();
    let d = state.d();
    let x = if sigma_is_static(sigma, &ds) {
        DMatrix::zeros(n, n)
    } else {
        check_mixed(sigma)?;
        solve_sld_matrix(sigma, &ds)?
    };
    let lin_delta = if dd.amax() == 0.0 {
        DVector::zeros(n)
    } else {
        sigma.clone().lu().solve(&dd).ok_or(Error::Singular("covariance matrix"))? * 2.0
    };
    let lin = &lin_delta - (&x * d) * 2.0;
    let c0 = d.dot(&(&x * d)) - 0.5 * (sigma * &x).trace() - lin_delta.dot(d);
    Ok(QuadraticObservable { quad: x, lin, c0 })
}

/// `O = lambda0 + L / H`, the locally unbiased observable saturating the bound.
pub fn optimal_observable(family: &GaussianFamily) -> Result<QuadraticObservable> {
    let h = gaussian_qfi(family)?;
    if !(h > 0.0) {
        return Err(Error::SingularParameters(
            "quantum Fisher information vanishes; no optimal observable".into(),
        ));
    }
    Ok(gaussian_sld(family)?.scaled(1.0 / h).plus_constant(family.lambda0))
}
