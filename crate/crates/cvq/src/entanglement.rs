//! Bipartite Gaussian entanglement: partially transposed spectra,
//! (logarithmic) negativity and the compact validity test for
//! standard-form covariance matrices.

use nalgebra::{DMatrix, Matrix2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::{sigma_z, GaussianState};

/// Two-mode covariance matrix split into `[[sigma_a, eps], [eps^T, sigma_b]]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BipartiteCM {
    pub sigma_a: Matrix2<f64>,
    pub sigma_b: Matrix2<f64>,
    pub eps: Matrix2<f64>,
}

impl BipartiteCM {
    /// Blocks as given, no physicality check.
    pub fn from_blocks(sigma_a: Matrix2<f64>, sigma_b: Matrix2<f64>, eps: Matrix2<f64>) -> Self {
        BipartiteCM {
            sigma_a,
            sigma_b,
            eps,
        }
    }

    /// Standard form `sigma_a = alpha I`, `sigma_b = beta I`, `eps = gamma sigma_z`.
    pub fn standard(alpha: f64, beta: f64, gamma: f64) -> Self {
        BipartiteCM {
            sigma_a: Matrix2::identity() * alpha,
            sigma_b: Matrix2::identity() * beta,
            eps: sigma_z() * gamma,
        }
    }

    /// Reads the blocks off a two-mode state.
    pub fn from_state(state: &GaussianState) -> Result<Self> {
        if state.n_modes() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                got: state.n_modes(),
            });
        }
        Ok(BipartiteCM {
            sigma_a: state.block(0, 0),
            sigma_b: state.block(1, 1),
            eps: state.block(0, 1),
        })
    }

    /// The assembled 4x4 matrix.
    pub fn matrix(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(4, 4);
        for i in 0..2 {
            for j in 0..2 {
                m[(i, j)] = self.sigma_a[(i, j)];
                m[(i + 2, j + 2)] = self.sigma_b[(i, j)];
                m[(i, j + 2)] = self.eps[(i, j)];
                m[(j + 2, i)] = self.eps[(i, j)];
            }
        }
        m
    }

    /// Zero-mean Gaussian state with this covariance matrix (checked).
    pub fn to_state(&self) -> Result<GaussianState> {
        GaussianState::from_sigma(self.matrix())
    }

    pub fn is_physical(&self) -> bool {
        self.to_state().is_ok()
    }

    pub fn det(&self) -> f64 {
        self.matrix().determinant()
    }

    /// `(alpha, beta, gamma)` when the matrix is in standard form.
    pub fn standard_params(&self) -> Option<(f64, f64, f64)> {
        let tol = 1e-12 * self.matrix().amax().max(1.0);
        let is_scalar = |m: &Matrix2<f64>| {
            (m[(0, 0)] - m[(1, 1)]).abs() <= tol && m[(0, 1)].abs() <= tol && m[(1, 0)].abs() <= tol
        };
        let e = &self.eps;
        let eps_ok = (e[(0, 0)] + e[(1, 1)]).abs() <= tol
            && e[(0, 1)].abs() <= tol
            && e[(1, 0)].abs() <= tol;
        (is_scalar(&self.sigma_a) && is_scalar(&self.sigma_b) && eps_ok)
            .then(|| (self.sigma_a[(0, 0)], self.sigma_b[(0, 0)], e[(0, 0)]))
    }
}

/// Symplectic eigenvalues of the partial transpose, `(nu_minus, nu_plus)`.
pub fn pts_eigenvalues(cm: &BipartiteCM) -> Result<(f64, f64)> {
    let delta = cm.sigma_a.determinant() + cm.sigma_b.determinant() - 2.0 * cm.eps.determinant();
    let det = cm.det();
    let disc = delta * delta - 4.0 * det;
    if disc < -1e-9 * delta.abs().max(1.0).powi(2) {
        return Err(Error::ComplexSpectrum(disc));
    }
    let root = disc.max(0.0).sqrt();
    // The smaller root suffers cancellation for nearly pure states; recover it
    // from the product nu_- nu_+ = sqrt(det) instead.
    let plus_sq = 0.5 * (delta + root);
    let minus_sq = if plus_sq > 0.0 {
        det.max(0.0) / plus_sq
    } else {
        0.5 * (delta - root)
    };
    Ok((minus_sq.max(0.0).sqrt(), plus_sq.max(0.0).sqrt()))
}

/// `N = max(0, (1 - nu) / (2 nu))` with `nu` the smaller PT eigenvalue.
pub fn negativity(cm: &BipartiteCM) -> Result<f64> {
    let (nu, _) = pts_eigenvalues(cm)?;
    Ok(negativity_from_nu(nu))
}

pub fn negativity_from_nu(nu: f64) -> f64 {
    ((1.0 - nu) / (2.0 * nu)).max(0.0)
}

/// `E_N = log2(2N + 1) = max(0, -log2 nu)`.
pub fn log_negativity(cm: &BipartiteCM) -> Result<f64> {
    let (nu, _) = pts_eigenvalues(cm)?;
    Ok((-nu.log2()).max(0.0))
}

/// Outcome of [`cm_validity`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Validity {
    /// `|sqrt(det sigma) - 1| - |alpha - beta|`.
    pub theta: f64,
    /// `theta >= -1e-10` together with `alpha, beta >= 1`.
    pub valid: bool,
    /// `alpha >= 1` and `beta >= 1`, reported on their own.
    pub diagonals_ok: bool,
}

/// Compact positivity plus uncertainty test for standard-form matrices.
pub fn cm_validity(alpha: f64, beta: f64, gamma: f64) -> Validity {
    let sqrt_det = (alpha * beta - gamma * gamma).abs();
    let theta = (sqrt_det - 1.0).abs() - (alpha - beta).abs();
    let diagonals_ok = alpha >= 1.0 - 1e-12 && beta >= 1.0 - 1e-12;
    Validity {
        theta,
        valid: diagonals_ok && theta >= -1e-10,
        diagonals_ok,
    }
}
