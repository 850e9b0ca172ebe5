//! Gaussian states in the real quadrature basis.
//!
//! Conventions used throughout the crate:
//!
//! * quadratures are interleaved, `r = (x1, p1, x2, p2, ...)`, with
//!   `x = (a + a^dag)/sqrt(2)` so that `[x, p] = i`;
//! * the covariance matrix is `sigma_ij = <{dr_i, dr_j}>`, which makes the
//!   vacuum covariance the identity;
//! * a coherent amplitude `alpha` sits at `d = sqrt(2) (Re alpha, Im alpha)`.
//!
//! The symplectic form is `Omega = (+) [[0, 1], [-1, 0]]`.

use nalgebra::{DMatrix, DVector, Matrix2};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Entrywise tolerance on the symmetry of a covariance matrix.
pub const SYMMETRY_TOL: f64 = 1e-12;
/// Slack allowed below 1 for symplectic eigenvalues and in `S Omega S^T = Omega`.
pub const PHYSICAL_TOL: f64 = 1e-9;
/// Tolerance on the symplectic condition of a transform.
pub const SYMPLECTIC_TOL: f64 = 1e-10;

/// Block-diagonal symplectic form for `n_modes` modes.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticForm {
    pub n_modes: usize,
    pub omega: DMatrix<f64>,
}

impl SymplecticForm {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.omega
    }
}

/// `Omega` for `n_modes` modes. Panics on zero modes, which is a programming error.
pub fn omega(n_modes: usize) -> SymplecticForm {
    assert!(n_modes >= 1, "omega needs at least one mode");
    SymplecticForm {
        n_modes,
        omega: omega_matrix(n_modes),
    }
}

pub(crate) fn omega_matrix(n_modes: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(2 * n_modes, 2 * n_modes);
    for k in 0..n_modes {
        m[(2 * k, 2 * k + 1)] = 1.0;
        m[(2 * k + 1, 2 * k)] = -1.0;
    }
    m
}

/// Single-mode symplectic form as a fixed-size matrix.
pub fn omega1() -> Matrix2<f64> {
    Matrix2::new(0.0, 1.0, -1.0, 0.0)
}

/// Pauli `Z`, the correlation pattern of two-mode squeezing.
pub fn sigma_z() -> Matrix2<f64> {
    Matrix2::new(1.0, 0.0, 0.0, -1.0)
}

/// Sorted, non-empty set of mode indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModeSubset {
    indices: Vec<usize>,
}

impl ModeSubset {
    pub fn new(indices: &[usize]) -> Result<Self> {
        if indices.is_empty() {
            return Err(invalid("modes", "mode subset must not be empty"));
        }
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("modes", "mode indices must be strictly increasing"));
        }
        Ok(ModeSubset {
            indices: indices.to_vec(),
        })
    }

    pub fn all(n_modes: usize) -> Self {
        ModeSubset {
            indices: (0..n_modes).collect(),
        }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

/// Displacement vector and covariance matrix of an `n_modes` Gaussian state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StateRepr", into = "StateRepr")]
pub struct GaussianState {
    n_modes: usize,
    d: DVector<f64>,
    sigma: DMatrix<f64>,
}

#[derive(Serialize, Deserialize)]
struct StateRepr {
    n_modes: usize,
    d: Vec<f64>,
    sigma: Vec<Vec<f64>>,
}

impl From<GaussianState> for StateRepr {
    fn from(s: GaussianState) -> Self {
        let n = s.sigma.nrows();
        StateRepr {
            n_modes: s.n_modes,
            d: s.d.iter().copied().collect(),
            sigma: (0..n)
                .map(|i| (0..n).map(|j| s.sigma[(i, j)]).collect())
                .collect(),
        }
    }
}

impl TryFrom<StateRepr> for GaussianState {
    type Error = Error;

    fn try_from(r: StateRepr) -> Result<Self> {
        let dim = 2 * r.n_modes;
        if r.sigma.len() != dim || r.sigma.iter().any(|row| row.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: r.sigma.len(),
            });
        }
        let sigma = DMatrix::from_fn(dim, dim, |i, j| r.sigma[i][j]);
        GaussianState::new(DVector::from_vec(r.d), sigma)
    }
}

impl GaussianState {
    /// Validated constructor: symmetric `sigma`, matching `d`, all `nu >= 1`.
    pub fn new(d: DVector<f64>, sigma: DMatrix<f64>) -> Result<Self> {
        let state = Self::new_unchecked(d, sigma)?;
        state.check_physical()?;
        Ok(state)
    }

    /// Shape-checked constructor that skips the uncertainty relation.
    ///
    /// Intermediate algebra (differences of covariance matrices, Richardson
    /// tableaux, ...) legitimately leaves the physical set.
    pub fn new_unchecked(d: DVector<f64>, sigma: DMatrix<f64>) -> Result<Self> {
        if sigma.nrows() != sigma.ncols() || sigma.nrows() % 2 != 0 || sigma.nrows() == 0 {
            return Err(invalid("sigma", "covariance matrix must be 2N x 2N"));
        }
        if d.len() != sigma.nrows() {
            return Err(Error::DimensionMismatch {
                expected: sigma.nrows(),
                got: d.len(),
            });
        }
        Ok(GaussianState {
            n_modes: sigma.nrows() / 2,
            d,
            sigma,
        })
    }

    /// Zero-mean state with the given covariance matrix.
    pub fn from_sigma(sigma: DMatrix<f64>) -> Result<Self> {
        let n = sigma.nrows();
        Self::new(DVector::zeros(n), sigma)
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn d(&self) -> &DVector<f64> {
        &self.d
    }

    pub fn sigma(&self) -> &DMatrix<f64> {
        &self.sigma
    }

    /// The 2x2 block `(i, j)` of the covariance matrix.
    pub fn block(&self, i: usize, j: usize) -> Matrix2<f64> {
        let s = &self.sigma;
        Matrix2::new(
            s[(2 * i, 2 * j)],
            s[(2 * i, 2 * j + 1)],
            s[(2 * i + 1, 2 * j)],
            s[(2 * i + 1, 2 * j + 1)],
        )
    }

    /// Checks symmetry and the uncertainty relation `nu_a >= 1`.
    pub fn check_physical(&self) -> Result<()> {
        let asym = max_asymmetry(&self.sigma);
        if asym > SYMMETRY_TOL * self.sigma.amax().max(1.0) {
            return Err(Error::NotSymmetric(asym));
        }
        let nus = symplectic_eigenvalues(&self.sigma)?;
        if nus[0] < 1.0 - PHYSICAL_TOL {
            return Err(Error::Unphysical(nus[0]));
        }
        Ok(())
    }

    pub fn is_physical(&self) -> bool {
        self.check_physical().is_ok()
    }

    /// Tensor product `self (x) other`.
    pub fn tensor(&self, other: &GaussianState) -> GaussianState {
        let (n1, n2) = (2 * self.n_modes, 2 * other.n_modes);
        let mut sigma = DMatrix::zeros(n1 + n2, n1 + n2);
        sigma.view_mut((0, 0), (n1, n1)).copy_from(&self.sigma);
        sigma.view_mut((n1, n1), (n2, n2)).copy_from(&other.sigma);
        let mut d = DVector::zeros(n1 + n2);
        d.rows_mut(0, n1).copy_from(&self.d);
        d.rows_mut(n1, n2).copy_from(&other.d);
        GaussianState {
            n_modes: self.n_modes + other.n_modes,
            d,
            sigma,
        }
    }

    /// Reorders modes so that new mode `k` is old mode `order[k]`.
    pub fn permute(&self, order: &[usize]) -> Result<GaussianState> {
        if order.len() != self.n_modes {
            return Err(Error::DimensionMismatch {
                expected: self.n_modes,
                got: order.len(),
            });
        }
        let mut seen = vec![false; self.n_modes];
        for &o in order {
            if o >= self.n_modes || seen[o] {
                return Err(invalid("order", "not a permutation of the modes"));
            }
            seen[o] = true;
        }
        let idx: Vec<usize> = order.iter().flat_map(|&m| [2 * m, 2 * m + 1]).collect();
        let n = idx.len();
        Ok(GaussianState {
            n_modes: self.n_modes,
            d: DVector::from_fn(n, |i, _| self.d[idx[i]]),
            sigma: DMatrix::from_fn(n, n, |i, j| self.sigma[(idx[i], idx[j])]),
        })
    }
}

pub(crate) fn max_asymmetry(m: &DMatrix<f64>) -> f64 {
    let mut worst = 0.0_f64;
    for i in 0..m.nrows() {
        for j in (i + 1)..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst
}

/// Vacuum on `n_modes` modes.
pub fn vacuum(n_modes: usize) -> GaussianState {
    let dim = 2 * n_modes;
    GaussianState {
        n_modes,
        d: DVector::zeros(dim),
        sigma: DMatrix::identity(dim, dim),
    }
}

/// Product of `n_modes` thermal states with `n_th` photons each.
pub fn thermal(n_modes: usize, n_th: f64) -> Result<GaussianState> {
    if !(n_th >= 0.0) {
        return Err(invalid("n_th", format!("thermal occupation must be >= 0, got {n_th}")));
    }
    let dim = 2 * n_modes;
    Ok(GaussianState {
        n_modes,
        d: DVector::zeros(dim),
        sigma: DMatrix::identity(dim, dim) * (1.0 + 2.0 * n_th),
    })
}

/// Single-mode coherent state `|alpha>`.
pub fn coherent(alpha_re: f64, alpha_im: f64) -> GaussianState {
    let s2 = std::f64::consts::SQRT_2;
    GaussianState {
        n_modes: 1,
        d: DVector::from_vec(vec![s2 * alpha_re, s2 * alpha_im]),
        sigma: DMatrix::identity(2, 2),
    }
}

/// Two-mode squeezed vacuum with squeezing `r`.
pub fn tmsv(r: f64) -> GaussianState {
    tmst(r, 0.0).expect("zero thermal occupation is always valid")
}

/// Two-mode squeezed thermal state: `(1 + 2n)` times the TMSV covariance.
pub fn tmst(r: f64, n: f64) -> Result<GaussianState> {
    if !(n >= 0.0) {
        return Err(invalid("n", format!("thermal occupation must be >= 0, got {n}")));
    }
    let k = 1.0 + 2.0 * n;
    let (c, s) = ((2.0 * r).cosh() * k, (2.0 * r).sinh() * k);
    let sigma = DMatrix::from_row_slice(
        4,
        4,
        &[
            c, 0.0, s, 0.0, //
            0.0, c, 0.0, -s, //
            s, 0.0, c, 0.0, //
            0.0, -s, 0.0, c,
        ],
    );
    Ok(GaussianState {
        n_modes: 2,
        d: DVector::zeros(4),
        sigma,
    })
}

/// A real symplectic matrix, `S Omega S^T = Omega`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticTransform {
    matrix: DMatrix<f64>,
}

impl SymplecticTransform {
    /// Validated constructor.
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        let n = matrix.nrows();
        if n != matrix.ncols() || n % 2 != 0 || n == 0 {
            return Err(invalid("matrix", "symplectic matrices are 2N x 2N"));
        }
        let om = omega_matrix(n / 2);
        let defect = (&matrix * &om * matrix.transpose() - &om).amax();
        if defect > SYMPLECTIC_TOL * matrix.amax().powi(2).max(1.0) {
            return Err(invalid("matrix", format!("not symplectic (defect {defect:e})")));
        }
        Ok(SymplecticTransform { matrix })
    }

    pub(crate) fn from_trusted(matrix: DMatrix<f64>) -> Self {
        SymplecticTransform { matrix }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn n_modes(&self) -> usize {
        self.matrix.nrows() / 2
    }

    /// Direct sum `self (+) other`, acting on disjoint consecutive modes.
    pub fn direct_sum(&self, other: &SymplecticTransform) -> SymplecticTransform {
        let (a, b) = (self.matrix.nrows(), other.matrix.nrows());
        let mut m = DMatrix::zeros(a + b, a + b);
        m.view_mut((0, 0), (a, a)).copy_from(&self.matrix);
        m.view_mut((a, a), (b, b)).copy_from(&other.matrix);
        SymplecticTransform { matrix: m }
    }

    pub fn identity(n_modes: usize) -> SymplecticTransform {
        SymplecticTransform {
            matrix: DMatrix::identity(2 * n_modes, 2 * n_modes),
        }
    }

    /// Composition `self * other` (apply `other` first).
    pub fn compose(&self, other: &SymplecticTransform) -> SymplecticTransform {
        SymplecticTransform {
            matrix: &self.matrix * &other.matrix,
        }
    }
}

/// Beam splitter with intensity reflectivity `eta`.
///
/// `S = [[sqrt(eta) I, sqrt(1-eta) I], [-sqrt(1-eta) I, sqrt(eta) I]]`.
/// An amplitude parameterization `x` maps onto this one through `eta = x^2`.
pub fn beam_splitter(eta: f64) -> Result<SymplecticTransform> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(invalid("eta", format!("reflectivity must lie in [0, 1], got {eta}")));
    }
    let (a, b) = (eta.sqrt(), (1.0 - eta).sqrt());
    Ok(SymplecticTransform::from_trusted(DMatrix::from_row_slice(
        4,
        4,
        &[
            a, 0.0, b, 0.0, //
            0.0, a, 0.0, b, //
            -b, 0.0, a, 0.0, //
            0.0, -b, 0.0, a,
        ],
    )))
}

/// Derivative of [`beam_splitter`] with respect to `eta`, for `0 < eta < 1`.
pub fn beam_splitter_derivative(eta: f64) -> DMatrix<f64> {
    let (da, db) = (0.5 / eta.sqrt(), -0.5 / (1.0 - eta).sqrt());
    DMatrix::from_row_slice(
        4,
        4,
        &[
            da, 0.0, db, 0.0, //
            0.0, da, 0.0, db, //
            -db, 0.0, da, 0.0, //
            0.0, -db, 0.0, da,
        ],
    )
}

/// Single-mode squeezer; `theta = 0` squeezes `x`: vacuum goes to
/// `diag(e^{-2r}, e^{2r})`. The squeezing axis rotates by `theta / 2`.
pub fn single_mode_squeezer(r: f64, theta: f64) -> Result<SymplecticTransform> {
    if !(r >= 0.0) {
        return Err(invalid("r", format!("squeezing must be >= 0, got {r}")));
    }
    if r == 0.0 {
        return Ok(SymplecticTransform::identity(1));
    }
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let rot = Matrix2::new(c, -s, s, c);
    let sq = Matrix2::new((-r).exp(), 0.0, 0.0, r.exp());
    let m = rot * sq * rot.transpose();
    Ok(SymplecticTransform::from_trusted(DMatrix::from_row_slice(
        2,
        2,
        &[m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]],
    )))
}

/// Two-mode squeezer: maps two vacua onto [`tmsv`].
pub fn two_mode_squeezer(r: f64) -> Result<SymplecticTransform> {
    if !(r >= 0.0) {
        return Err(invalid("r", format!("squeezing must be >= 0, got {r}")));
    }
    let (c, s) = (r.cosh(), r.sinh());
    Ok(SymplecticTransform::from_trusted(DMatrix::from_row_slice(
        4,
        4,
        &[
            c, 0.0, s, 0.0, //
            0.0, c, 0.0, -s, //
            s, 0.0, c, 0.0, //
            0.0, -s, 0.0, c,
        ],
    )))
}

/// Embeds a transform acting on `on` into the full `n_modes` phase space.
pub fn embed(
    s: &SymplecticTransform,
    on: &ModeSubset,
    n_modes: usize,
) -> Result<DMatrix<f64>> {
    if s.n_modes() != on.len() {
        return Err(Error::DimensionMismatch {
            expected: on.len(),
            got: s.n_modes(),
        });
    }
    if on.indices().iter().any(|&m| m >= n_modes) {
        return Err(invalid("on", "mode index out of range"));
    }
    let mut full = DMatrix::identity(2 * n_modes, 2 * n_modes);
    let idx: Vec<usize> = on.indices().iter().flat_map(|&m| [2 * m, 2 * m + 1]).collect();
    for (a, &i) in idx.iter().enumerate() {
        for (b, &j) in idx.iter().enumerate() {
            full[(i, j)] = s.matrix()[(a, b)];
        }
    }
    Ok(full)
}

/// `sigma -> S sigma S^T`, `d -> S d` with `S` embedded on the subset.
pub fn apply(
    state: &GaussianState,
    s: &SymplecticTransform,
    on: &ModeSubset,
) -> Result<GaussianState> {
    let full = embed(s, on, state.n_modes)?;
    let sigma = &full * &state.sigma * full.transpose();
    let d = &full * &state.d;
    Ok(GaussianState {
        n_modes: state.n_modes,
        d,
        sigma: symmetrize(sigma),
    })
}

pub(crate) fn symmetrize(m: DMatrix<f64>) -> DMatrix<f64> {
    (&m + m.transpose()) * 0.5
}

/// Keeps only the modes in `keep`, in their listed order.
pub fn partial_trace(state: &GaussianState, keep: &ModeSubset) -> Result<GaussianState> {
    if keep.indices().iter().any(|&m| m >= state.n_modes) {
        return Err(invalid("keep", "mode index out of range"));
    }
    let idx: Vec<usize> = keep.indices().iter().flat_map(|&m| [2 * m, 2 * m + 1]).collect();
    let n = idx.len();
    Ok(GaussianState {
        n_modes: keep.len(),
        d: DVector::from_fn(n, |i, _| state.d[idx[i]]),
        sigma: DMatrix::from_fn(n, n, |i, j| state.sigma[(idx[i], idx[j])]),
    })
}

/// Symplectic spectrum of `sigma`, ascending.
///
/// For positive-definite input the spectrum is read off the antisymmetric
/// matrix `L^T Omega L` (`sigma = L L^T`), whose eigenvalues coincide with
/// those of `Omega sigma`. Indefinite input falls back to a general
/// eigensolver on `Omega sigma`, pairing the `+- i nu` eigenvalues.
pub fn symplectic_eigenvalues(sigma: &DMatrix<f64>) -> Result<Vec<f64>> {
    let n = sigma.nrows();
    if n != sigma.ncols() || n % 2 != 0 || n == 0 {
        return Err(invalid("sigma", "covariance matrix must be 2N x 2N"));
    }
    let asym = max_asymmetry(sigma);
    if asym > SYMMETRY_TOL * sigma.amax().max(1.0) {
        return Err(Error::NotSymmetric(asym));
    }
    let om = omega_matrix(n / 2);
    let mut squares: Vec<f64> = match sigma.clone().cholesky() {
        Some(ch) => {
            let l = ch.l();
            let spectrum = |m: &DMatrix<f64>| -> Vec<f64> {
                let k = m.transpose() * &om * m;
                let mut v: Vec<f64> = symmetrize(k.transpose() * &k)
                    .symmetric_eigenvalues()
                    .iter()
                    .map(|v| v.max(0.0))
                    .collect();
                v.sort_by(|a, b| a.total_cmp(b));
                v
            };
            let direct = spectrum(&l);
            // Squares are accurate relative to the largest one, so a wide
            // spectrum loses the small values. The inverse matrix has spectrum
            // 1/nu and recovers them at full relative precision.
            match l.clone().try_inverse() {
                Some(li) if direct[n - 1] > 1e4 * direct[0].max(1e-300) => {
                    let inv = spectrum(&li.transpose());
                    let split = (direct[0] * direct[n - 1]).sqrt();
                    (0..n)
                        .map(|i| {
                            let from_inv = 1.0 / inv[n - 1 - i];
                            if direct[i] < split {
                                from_inv
                            } else {
                                direct[i]
                            }
                        })
                        .collect()
                }
                _ => direct,
            }
        }
        None => (&om * sigma)
            .complex_eigenvalues()
            .iter()
            .map(|z| z.norm_sqr())
            .collect(),
    };
    squares.sort_by(|a, b| a.total_cmp(b));
    Ok(squares
        .chunks(2)
        .map(|pair| (0.5 * (pair[0] + pair[1])).sqrt())
        .collect())
}

/// Two-mode closed form for the symplectic eigenvalues, `(nu_minus, nu_plus)`.
///
/// With `A = i Omega sigma`, `4 nu^2 = Tr A^2 +- sqrt((Tr A^2)^2 - 16 det A)`.
/// The factor 4 (rather than 2) is what makes the vacuum come out at `nu = 1`.
pub fn symplectic_eigenvalues_two_mode(sigma: &DMatrix<f64>) -> Result<(f64, f64)> {
    if sigma.nrows() != 4 || sigma.ncols() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            got: sigma.nrows(),
        });
    }
    let om = omega_matrix(2);
    let os = &om * sigma;
    // A^2 = -(Omega sigma)^2 and det A = det sigma for 4x4 matrices.
    let tr_a2 = -(&os * &os).trace();
    let det_a = sigma.determinant();
    let disc = (tr_a2 * tr_a2 - 16.0 * det_a).max(0.0).sqrt();
    let minus = ((tr_a2 - disc) / 4.0).max(0.0).sqrt();
    let plus = ((tr_a2 + disc) / 4.0).sqrt();
    Ok((minus, plus))
}

/// Purity `(det sigma)^{-1/2}`.
pub fn purity(state: &GaussianState) -> Result<f64> {
    let det = state.sigma.determinant();
    if det < 1.0 - PHYSICAL_TOL {
        return Err(Error::Unphysical(det));
    }
    Ok(1.0 / det.sqrt())
}

/// Characteristic function `exp(-1/4 r Omega sigma Omega^T r^T) exp(-i r Omega d)`.
///
/// It equals `Tr[rho D(alpha)]` with `alpha = (r_x + i r_p) / sqrt(2)` per mode.
pub fn characteristic_function(state: &GaussianState, r_point: &DVector<f64>) -> Result<Complex64> {
    if r_point.len() != state.d.len() {
        return Err(Error::DimensionMismatch {
            expected: state.d.len(),
            got: r_point.len(),
        });
    }
    let om = omega_matrix(state.n_modes);
    let w = om.transpose() * r_point;
    let quad = (w.transpose() * &state.sigma * &w)[(0, 0)];
    let phase = (r_point.transpose() * &om * &state.d)[(0, 0)];
    Ok(Complex64::from_polar((-0.25 * quad).exp(), -phase))
}
