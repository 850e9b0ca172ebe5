//! Truncated photon-number-basis engine.
//!
//! Nothing here is fast or clever: states are dense vectors, operators are
//! dense matrices, and two-mode unitaries are exponentiated one conserved
//! sector at a time. That is the point. Every routine is a direct
//! transcription of the textbook operator algebra, so it can serve as an
//! independent oracle for the covariance-matrix closed forms elsewhere.
//!
//! Composite spaces are ordered with mode 0 most significant:
//! `|n0, n1, ...>` sits at index `sum_i n_i * stride_i`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{invalid, Error, Result};

type C = Complex64;

const ZERO: C = C::new(0.0, 0.0);
const ONE: C = C::new(1.0, 0.0);

fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * dims[i + 1];
    }
    s
}

fn digits(mut idx: usize, dims: &[usize]) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for i in (0..dims.len()).rev() {
        out[i] = idx % dims[i];
        idx /= dims[i];
    }
    out
}

/// A truncated ket over one or more modes.
#[derive(Debug, Clone, PartialEq)]
pub struct FockKet {
    dims: Vec<usize>,
    amps: DVector<C>,
    /// Probability weight known to be lost to truncation.
    pub leakage: f64,
}

impl FockKet {
    /// `|n_0, n_1, ...>` in a space with per-mode dimensions `dims`.
    pub fn number(dims: &[usize], ns: &[usize]) -> Result<Self> {
        if dims.len() != ns.len() || dims.is_empty() {
            return Err(Error::DimensionMismatch {
                expected: dims.len(),
                got: ns.len(),
            });
        }
        if ns.iter().zip(dims).any(|(n, d)| n >= d) {
            return Err(invalid("ns", "photon number beyond truncation"));
        }
        let st = strides(dims);
        let total: usize = dims.iter().product();
        let mut amps = DVector::from_element(total, ZERO);
        amps[ns.iter().zip(&st).map(|(n, s)| n * s).sum::<usize>()] = ONE;
        Ok(FockKet {
            dims: dims.to_vec(),
            amps,
            leakage: 0.0,
        })
    }

    pub fn from_amplitudes(dims: &[usize], amps: DVector<C>) -> Result<Self> {
        let total: usize = dims.iter().product();
        if amps.len() != total {
            return Err(Error::DimensionMismatch {
                expected: total,
                got: amps.len(),
            });
        }
        Ok(FockKet {
            dims: dims.to_vec(),
            amps,
            leakage: 0.0,
        })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Largest photon number kept in any mode.
    pub fn n_max(&self) -> usize {
        self.dims.iter().copied().max().unwrap_or(1) - 1
    }

    pub fn amplitudes(&self) -> &DVector<C> {
        &self.amps
    }

    pub fn amplitude(&self, ns: &[usize]) -> C {
        let st = strides(&self.dims);
        self.amps[ns.iter().zip(&st).map(|(n, s)| n * s).sum::<usize>()]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn normalized(mut self) -> Result<Self> {
        let n = self.norm_sqr();
        if !(n > 1e-300) {
            return Err(Error::ZeroNorm(n));
        }
        self.amps /= C::new(n.sqrt(), 0.0);
        Ok(self)
    }

    /// Tensor product, `self` first.
    pub fn tensor(&self, other: &FockKet) -> FockKet {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        let amps = self.amps.kronecker(&other.amps);
        FockKet {
            dims,
            amps,
            leakage: 1.0 - (1.0 - self.leakage) * (1.0 - other.leakage),
        }
    }

    /// Applies a single-mode matrix (`dims[mode]` square) to `mode`.
    pub fn apply_local(&self, mode: usize, op: &DMatrix<C>) -> Result<FockKet> {
        let d = self.dims[mode];
        if op.nrows() != d || op.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: op.nrows(),
            });
        }
        let st = strides(&self.dims)[mode];
        let mut out = DVector::from_element(self.amps.len(), ZERO);
        for (idx, amp) in self.amps.iter().enumerate() {
            if *amp == ZERO {
                continue;
            }
            let n = (idx / st) % d;
            let base = idx - n * st;
            for m in 0..d {
                let e = op[(m, n)];
                if e != ZERO {
                    out[base + m * st] += e * amp;
                }
            }
        }
        Ok(FockKet {
            dims: self.dims.clone(),
            amps: out,
            leakage: self.leakage,
        })
    }

    /// Projects `mode` onto `|n>` and removes it from the space (unnormalized).
    pub fn project(&self, mode: usize, n: usize) -> Result<FockKet> {
        if n >= self.dims[mode] {
            return Err(invalid("n", "projection beyond truncation"));
        }
        let mut dims = self.dims.clone();
        dims.remove(mode);
        let total: usize = dims.iter().product();
        let mut amps = DVector::from_element(total, ZERO);
        let d_old = &self.dims;
        for (idx, amp) in self.amps.iter().enumerate() {
            let dg = digits(idx, d_old);
            if dg[mode] != n {
                continue;
            }
            let mut rest = dg.clone();
            rest.remove(mode);
            let st = strides(&dims);
            amps[rest.iter().zip(&st).map(|(a, s)| a * s).sum::<usize>()] = *amp;
        }
        Ok(FockKet {
            dims,
            amps,
            leakage: self.leakage,
        })
    }

    /// Coefficient matrix `c[(n0, n1)]` of a two-mode ket.
    pub fn coefficient_matrix(&self) -> Result<DMatrix<C>> {
        if self.dims.len() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                got: self.dims.len(),
            });
        }
        let (d0, d1) = (self.dims[0], self.dims[1]);
        Ok(DMatrix::from_fn(d0, d1, |i, j| self.amps[i * d1 + j]))
    }

    pub fn density(&self) -> FockOperator {
        FockOperator {
            dims: self.dims.clone(),
            matrix: &self.amps * self.amps.adjoint(),
        }
    }
}

/// Dense operator on a truncated composite space.
#[derive(Debug, Clone, PartialEq)]
pub struct FockOperator {
    dims: Vec<usize>,
    pub matrix: DMatrix<C>,
}

impl FockOperator {
    pub fn new(dims: &[usize], matrix: DMatrix<C>) -> Result<Self> {
        let total: usize = dims.iter().product();
        if matrix.nrows() != total || matrix.ncols() != total {
            return Err(Error::DimensionMismatch {
                expected: total,
                got: matrix.nrows(),
            });
        }
        Ok(FockOperator {
            dims: dims.to_vec(),
            matrix,
        })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn n_max(&self) -> usize {
        self.dims.iter().copied().max().unwrap_or(1) - 1
    }

    pub fn trace(&self) -> C {
        self.matrix.trace()
    }

    /// `1 - Re Tr rho` for a density matrix.
    pub fn leakage(&self) -> f64 {
        1.0 - self.trace().re
    }

    pub fn hermiticity_defect(&self) -> f64 {
        let m = &self.matrix;
        let mut worst = 0.0_f64;
        for i in 0..m.nrows() {
            for j in i..m.ncols() {
                worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn check_hermitian(&self, tol: f64) -> Result<()> {
        let d = self.hermiticity_defect();
        if d > tol {
            return Err(Error::NotHermitian(d));
        }
        Ok(())
    }

    /// `Tr[self * op]`.
    pub fn expectation(&self, op: &DMatrix<C>) -> C {
        let m = &self.matrix;
        let mut acc = ZERO;
        for i in 0..m.nrows() {
            for k in 0..m.ncols() {
                acc += m[(i, k)] * op[(k, i)];
            }
        }
        acc
    }

    /// Partial transpose on mode 1 of a two-mode operator.
    pub fn partial_transpose(&self) -> Result<FockOperator> {
        if self.dims.len() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                got: self.dims.len(),
            });
        }
        let (d0, d1) = (self.dims[0], self.dims[1]);
        let m = &self.matrix;
        let out = DMatrix::from_fn(d0 * d1, d0 * d1, |r, c| {
            let (i, j) = (r / d1, r % d1);
            let (k, l) = (c / d1, c % d1);
            m[(i * d1 + l, k * d1 + j)]
        });
        Ok(FockOperator {
            dims: self.dims.clone(),
            matrix: out,
        })
    }

    /// Trace over every mode not in `keep` (kept in ascending order).
    pub fn partial_trace(&self, keep: &[usize]) -> Result<FockOperator> {
        if keep.is_empty() || keep.windows(2).any(|w| w[0] >= w[1]) || keep.iter().any(|&k| k >= self.dims.len()) {
            return Err(invalid("keep", "non-empty, strictly increasing mode list required"));
        }
        let kd: Vec<usize> = keep.iter().map(|&k| self.dims[k]).collect();
        let ks = strides(&kd);
        let total: usize = kd.iter().product();
        let mut out = DMatrix::from_element(total, total, ZERO);
        let n = self.matrix.nrows();
        let dig: Vec<Vec<usize>> = (0..n).map(|i| digits(i, &self.dims)).collect();
        let traced: Vec<usize> = (0..self.dims.len()).filter(|m| !keep.contains(m)).collect();
        for r in 0..n {
            for c in 0..n {
                if traced.iter().any(|&t| dig[r][t] != dig[c][t]) {
                    continue;
                }
                let ri: usize = keep.iter().zip(&ks).map(|(&k, s)| dig[r][k] * s).sum();
                let ci: usize = keep.iter().zip(&ks).map(|(&k, s)| dig[c][k] * s).sum();
                out[(ri, ci)] += self.matrix[(r, c)];
            }
        }
        Ok(FockOperator {
            dims: kd,
            matrix: out,
        })
    }

    fn real_part_if_real(&self) -> Option<DMatrix<f64>> {
        let scale = self.matrix.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1e-300);
        if self.matrix.iter().all(|z| z.im.abs() <= 1e-14 * scale) {
            Some(self.matrix.map(|z| z.re))
        } else {
            None
        }
    }

    /// Eigenvalues of a Hermitian operator, ascending.
    pub fn hermitian_eigenvalues(&self) -> Result<Vec<f64>> {
        self.check_hermitian(1e-9)?;
        let mut ev: Vec<f64> = match self.real_part_if_real() {
            Some(re) => {
                let sym = (&re + re.transpose()) * 0.5;
                sym.symmetric_eigenvalues().iter().copied().collect()
            }
            None => {
                let h = (&self.matrix + self.matrix.adjoint()) * C::new(0.5, 0.0);
                h.symmetric_eigenvalues().iter().copied().collect()
            }
        };
        ev.sort_by(|a, b| a.total_cmp(b));
        Ok(ev)
    }

    /// Eigen decomposition `(values, vectors)` of a Hermitian operator.
    pub fn hermitian_eigen(&self) -> Result<(Vec<f64>, DMatrix<C>)> {
        self.check_hermitian(1e-9)?;
        if let Some(re) = self.real_part_if_real() {
            let sym = (&re + re.transpose()) * 0.5;
            let e = sym.symmetric_eigen();
            return Ok((
                e.eigenvalues.iter().copied().collect(),
                e.eigenvectors.map(|x| C::new(x, 0.0)),
            ));
        }
        let h = (&self.matrix + self.matrix.adjoint()) * C::new(0.5, 0.0);
        let e = h.symmetric_eigen();
        Ok((e.eigenvalues.iter().copied().collect(), e.eigenvectors))
    }
}

/// Truncated annihilation operator on `n_max + 1` levels.
pub fn annihilation(n_max: usize) -> DMatrix<C> {
    let d = n_max + 1;
    DMatrix::from_fn(d, d, |m, n| {
        if n == m + 1 {
            C::new((n as f64).sqrt(), 0.0)
        } else {
            ZERO
        }
    })
}

/// `a` acting on `mode` of a composite space.
pub fn annihilation_on(dims: &[usize], mode: usize) -> DMatrix<C> {
    embed_local(dims, mode, &annihilation(dims[mode] - 1))
}

/// Embeds a single-mode matrix on `mode` with identities elsewhere.
pub fn embed_local(dims: &[usize], mode: usize, op: &DMatrix<C>) -> DMatrix<C> {
    let mut acc = DMatrix::from_element(1, 1, ONE);
    for (m, &d) in dims.iter().enumerate() {
        let factor = if m == mode { op.clone() } else { DMatrix::identity(d, d) };
        acc = acc.kronecker(&factor);
    }
    acc
}

/// Quadratures `(x, p)` of `mode`: `x = (a + a^dag)/sqrt 2`, `p = (a - a^dag)/(i sqrt 2)`.
pub fn quadratures_on(dims: &[usize], mode: usize) -> (DMatrix<C>, DMatrix<C>) {
    let a = annihilation_on(dims, mode);
    let ad = a.adjoint();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let x = (&a + &ad) * C::new(s, 0.0);
    let p = (&a - &ad) * C::new(0.0, -s);
    (x, p)
}

fn laguerre(n: usize, alpha: f64, x: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let (mut prev, mut cur) = (1.0, 1.0 + alpha - x);
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 + alpha - x) * cur - (kf + alpha) * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// `<m|D(alpha)|n>` from the associated-Laguerre closed form.
pub fn displacement_element(m: usize, n: usize, alpha: C) -> C {
    let x = alpha.norm_sqr();
    let env = (-0.5 * x).exp();
    let (lo, hi) = (m.min(n), m.max(n));
    // sqrt(lo! / hi!)
    let mut ratio = 1.0;
    for k in (lo + 1)..=hi {
        ratio /= (k as f64).sqrt();
    }
    let lag = laguerre(lo, (hi - lo) as f64, x);
    let base = if m >= n { alpha } else { -alpha.conj() };
    base.powu((hi - lo) as u32) * (ratio * env * lag)
}

/// Truncated displacement operator assembled entrywise.
pub fn displacement(n_max: usize, alpha: C) -> DMatrix<C> {
    let d = n_max + 1;
    DMatrix::from_fn(d, d, |m, n| displacement_element(m, n, alpha))
}

/// Coherent ket `|alpha>`.
pub fn coherent_ket(alpha: C, n_max: usize) -> FockKet {
    let mut amps = DVector::from_element(n_max + 1, ZERO);
    let mut term = C::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
    for n in 0..=n_max {
        if n > 0 {
            term *= alpha / (n as f64).sqrt();
        }
        amps[n] = term;
    }
    let mut k = FockKet {
        dims: vec![n_max + 1],
        amps,
        leakage: 0.0,
    };
    k.leakage = (1.0 - k.norm_sqr()).max(0.0);
    k
}

/// Squeezed vacuum `exp((zeta^* a^2 - zeta a^dag^2)/2)|0>`, `zeta = r e^{i theta}`.
pub fn squeezed_vacuum_ket(r: f64, theta: f64, n_max: usize) -> FockKet {
    let mut amps = DVector::from_element(n_max + 1, ZERO);
    let q = -C::from_polar(r.tanh(), theta);
    // c_{2m} = q^m sqrt((2m)!) / (2^m m!) / sqrt(cosh r)
    let mut c = C::new(1.0 / r.cosh().sqrt(), 0.0);
    let mut m = 0;
    while 2 * m <= n_max {
        amps[2 * m] = c;
        let mf = m as f64;
        c *= q * ((2.0 * mf + 1.0) * (2.0 * mf + 2.0)).sqrt() / (2.0 * (mf + 1.0));
        m += 1;
    }
    let mut k = FockKet {
        dims: vec![n_max + 1],
        amps,
        leakage: 0.0,
    };
    k.leakage = (1.0 - k.norm_sqr()).max(0.0);
    k
}

/// Two-mode squeezed vacuum `(cosh r)^-1 sum_j tanh(r)^j |j, j>`.
pub fn tmsv_ket(r: f64, n_max: usize) -> FockKet {
    let d = n_max + 1;
    let lam = r.tanh();
    let mut amps = DVector::from_element(d * d, ZERO);
    let mut c = 1.0 / r.cosh();
    for j in 0..d {
        amps[j * d + j] = C::new(c, 0.0);
        c *= lam;
    }
    FockKet {
        dims: vec![d, d],
        amps,
        leakage: lam.powi(2 * d as i32),
    }
}

/// Thermal occupation probabilities `n^k / (n+1)^{k+1}` up to `k_max`.
pub fn thermal_weights(n: f64, k_max: usize) -> Vec<f64> {
    let q = n / (n + 1.0);
    (0..=k_max).map(|k| q.powi(k as i32) / (n + 1.0)).collect()
}

pub fn thermal_density(n: f64, n_max: usize) -> FockOperator {
    let w = thermal_weights(n, n_max);
    FockOperator {
        dims: vec![n_max + 1],
        matrix: DMatrix::from_fn(n_max + 1, n_max + 1, |i, j| {
            if i == j {
                C::new(w[i], 0.0)
            } else {
                ZERO
            }
        }),
    }
}

/// Applies `a^k` to every mode (`ks[i]` times on mode `i`) and renormalizes.
///
/// Returns the ket together with its squared norm before normalization.
pub fn photon_subtract(ket: &FockKet, ks: &[usize]) -> Result<(FockKet, f64)> {
    if ks.len() != ket.dims.len() {
        return Err(Error::DimensionMismatch {
            expected: ket.dims.len(),
            got: ks.len(),
        });
    }
    let mut out = ket.clone();
    for (mode, &k) in ks.iter().enumerate() {
        let a = annihilation(ket.dims[mode] - 1);
        for _ in 0..k {
            out = out.apply_local(mode, &a)?;
        }
    }
    let w = out.norm_sqr();
    if w < 1e-28 {
        return Err(Error::ZeroNorm(w));
    }
    Ok((out.normalized()?, w))
}

/// Beam splitter of intensity reflectivity `eta` between `mode_i` and
/// `mode_j`, matching the symplectic convention
/// `a_i -> sqrt(eta) a_i + sqrt(1-eta) a_j`, `a_j -> -sqrt(1-eta) a_i + sqrt(eta) a_j`.
///
/// The unitary `exp(theta (a_i^dag a_j - a_j^dag a_i))`, `cos theta = sqrt(eta)`,
/// conserves `n_i + n_j` and is exponentiated sector by sector. Weight pushed
/// beyond either truncation is dropped and added to `leakage`.
pub fn beam_splitter_ket(ket: &FockKet, mode_i: usize, mode_j: usize, eta: f64) -> Result<FockKet> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(invalid("eta", "reflectivity must lie in [0, 1]"));
    }
    if mode_i == mode_j || mode_i >= ket.dims.len() || mode_j >= ket.dims.len() {
        return Err(invalid("modes", "two distinct modes required"));
    }
    let theta = eta.sqrt().clamp(0.0, 1.0).acos();
    let (di, dj) = (ket.dims[mode_i], ket.dims[mode_j]);
    let st = strides(&ket.dims);
    let (si, sj) = (st[mode_i], st[mode_j]);
    let n_top = di + dj - 2;
    let sectors: Vec<DMatrix<f64>> = (0..=n_top)
        .map(|n| {
            let g = DMatrix::from_fn(n + 1, n + 1, |r, c| {
                // basis |k, n-k>, k = index
                let k = c as f64;
                let nf = n as f64;
                if r == c + 1 {
                    ((k + 1.0) * (nf - k)).sqrt()
                } else if r + 1 == c {
                    -(k * (nf - k + 1.0)).sqrt()
                } else {
                    0.0
                }
            });
            (g * theta).exp()
        })
        .collect();
    let mut out = DVector::from_element(ket.amps.len(), ZERO);
    for (idx, amp) in ket.amps.iter().enumerate() {
        if *amp == ZERO {
            continue;
        }
        let ni = (idx / si) % di;
        let nj = (idx / sj) % dj;
        let base = idx - ni * si - nj * sj;
        let n = ni + nj;
        let u = &sectors[n];
        for k in 0..=n {
            let e = u[(k, ni)];
            if e == 0.0 || k >= di || n - k >= dj {
                continue;
            }
            out[base + k * si + (n - k) * sj] += amp * e;
        }
    }
    let mut res = FockKet {
        dims: ket.dims.clone(),
        amps: out,
        leakage: ket.leakage,
    };
    res.leakage += (ket.norm_sqr() - res.norm_sqr()).max(0.0);
    Ok(res)
}

/// Two-mode squeezer `exp(r (a0^dag a1^dag - a0 a1))` applied to `|k, l>`,
/// in a two-mode space of dimension `d` per mode.
///
/// The operator conserves `n0 - n1`; each sector is truncated at `work`
/// photons in the larger mode before exponentiation.
fn two_mode_squeezed_number_states(r: f64, pairs: &[(usize, usize)], d: usize, work: usize) -> Vec<DVector<C>> {
    use std::collections::HashMap;
    let mut cache: HashMap<i64, DMatrix<f64>> = HashMap::new();
    pairs
        .iter()
        .map(|&(k, l)| {
            let delta = k as i64 - l as i64;
            let u = cache.entry(delta).or_insert_with(|| {
                // sector basis index j -> (j + max(delta,0), j + max(-delta,0))
                let size = work + 1;
                let (o0, o1) = (delta.max(0) as f64, (-delta).max(0) as f64);
                let g = DMatrix::from_fn(size, size, |row, col| {
                    let j = col as f64;
                    let (n0, n1) = (j + o0, j + o1);
                    if row == col + 1 {
                        ((n0 + 1.0) * (n1 + 1.0)).sqrt()
                    } else if row + 1 == col {
                        -(n0 * n1).sqrt()
                    } else {
                        0.0
                    }
                });
                (g * r).exp()
            });
            let (o0, o1) = (delta.max(0) as usize, (-delta).max(0) as usize);
            let j0 = k - o0;
            let mut v = DVector::from_element(d * d, ZERO);
            for j in 0..u.nrows() {
                let (n0, n1) = (j + o0, j + o1);
                if n0 < d && n1 < d {
                    v[n0 * d + n1] = C::new(u[(j, j0)], 0.0);
                }
            }
            v
        })
        .collect()
}

/// Two-mode Gaussian state in standard form `(alpha I, beta I, gamma sigma_z)`
/// rendered as a truncated density matrix with `d` levels per mode.
///
/// The state is written as a two-mode squeezer acting on a product of
/// thermal states with occupations `n_a`, `n_b`:
/// `tanh 2r = 2 gamma / (alpha + beta)`, `1 + 2 n_a - (1 + 2 n_b) = alpha - beta`,
/// `(1 + 2 n_a) + (1 + 2 n_b) = (alpha + beta) / cosh 2r`.
pub fn standard_form_density(alpha: f64, beta: f64, gamma: f64, d: usize) -> Result<FockOperator> {
    let sum = alpha + beta;
    let t = 2.0 * gamma / sum;
    if !(t.abs() < 1.0) {
        return Err(Error::Unphysical(t));
    }
    let r = t.atanh() / 2.0;
    let s = sum / (2.0 * r).cosh();
    let (a, b) = (0.5 * (s + alpha - beta), 0.5 * (s - alpha + beta));
    if a < 1.0 - 1e-9 || b < 1.0 - 1e-9 {
        return Err(Error::Unphysical(a.min(b)));
    }
    let (na, nb) = (((a - 1.0) / 2.0).max(0.0), ((b - 1.0) / 2.0).max(0.0));
    let cut = |n: f64| -> usize {
        if n == 0.0 {
            return 0;
        }
        let q = n / (n + 1.0);
        (((1e-16f64).ln() / q.ln()).ceil() as usize).min(4 * d)
    };
    let (ka, kb) = (cut(na), cut(nb));
    let (wa, wb) = (thermal_weights(na, ka), thermal_weights(nb, kb));
    let mut pairs = Vec::new();
    let mut weights = Vec::new();
    for k in 0..=ka {
        for l in 0..=kb {
            let w = wa[k] * wb[l];
            if w > 1e-18 {
                pairs.push((k, l));
                weights.push(w);
            }
        }
    }
    let work = 2 * d + ka.max(kb) + 40;
    let vecs = two_mode_squeezed_number_states(r.abs(), &pairs, d, work);
    let mut psi = DMatrix::from_element(d * d, vecs.len(), ZERO);
    for (c, (v, w)) in vecs.iter().zip(&weights).enumerate() {
        let sign = if r < 0.0 { -1.0 } else { 1.0 };
        for i in 0..d * d {
            // r < 0 flips the sign of odd-n0 amplitudes in each sector
            let n0 = i / d;
            let ph = if sign < 0.0 && (n0 + pairs[c].0) % 2 == 1 { -1.0 } else { 1.0 };
            psi[(i, c)] = v[i] * (w.sqrt() * ph);
        }
    }
    Ok(FockOperator {
        dims: vec![d, d],
        matrix: &psi * psi.adjoint(),
    })
}

/// Negativity of a pure two-mode ket from its Schmidt coefficients.
pub fn negativity_pure(ket: &FockKet) -> Result<f64> {
    let c = ket.coefficient_matrix()?;
    let sv = c.singular_values();
    let norm: f64 = sv.iter().map(|s| s * s).sum();
    let l1: f64 = sv.iter().sum();
    Ok(0.5 * (l1 * l1 / norm - 1.0))
}

/// `(||rho^T_B||_1 - 1) / 2` from the partial-transpose spectrum.
pub fn negativity_fock(rho: &FockOperator) -> Result<f64> {
    rho.check_hermitian(1e-9)?;
    let pt = rho.partial_transpose()?;
    let ev = pt.hermitian_eigenvalues()?;
    Ok(ev.iter().filter(|&&v| v < 0.0).map(|v| -v).sum())
}

fn psd_sqrt(op: &FockOperator) -> Result<DMatrix<C>> {
    let (vals, vecs) = op.hermitian_eigen()?;
    let n = vals.len();
    let mut scaled = vecs.clone();
    for (j, &v) in vals.iter().enumerate() {
        let s = v.max(0.0).sqrt();
        for i in 0..n {
            scaled[(i, j)] *= s;
        }
    }
    Ok(scaled * vecs.adjoint())
}

/// Uhlmann fidelity `(Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2`.
pub fn uhlmann_fidelity(rho: &FockOperator, sigma: &FockOperator) -> Result<f64> {
    let sr = psd_sqrt(rho)?;
    let inner = &sr * &sigma.matrix * &sr;
    let inner = FockOperator::new(rho.dims(), (&inner + inner.adjoint()) * C::new(0.5, 0.0))?;
    let (vals, _) = inner.hermitian_eigen()?;
    let t: f64 = vals.iter().map(|v| v.max(0.0).sqrt()).sum();
    Ok(t * t)
}

/// Spectral QFI `2 sum |<m|d rho|n>|^2 / (p_m + p_n)` with a central-difference
/// `d rho`. Pairs with `p_m + p_n` below `1e-12` are dropped.
pub fn qfi_pure_spectral<F>(family: F, lambda0: f64, step: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<FockOperator>,
{
    let rho = family(lambda0)?;
    let plus = family(lambda0 + step)?;
    let minus = family(lambda0 - step)?;
    let drift = (plus.trace().re - minus.trace().re).abs();
    if drift > 1e-9 {
        return Err(Error::StepTooLarge(drift));
    }
    let d_rho = (&plus.matrix - &minus.matrix) / C::new(2.0 * step, 0.0);
    let (vals, vecs) = rho.hermitian_eigen()?;
    let rot = vecs.adjoint() * d_rho * &vecs;
    let n = vals.len();
    let mut h = 0.0;
    for m in 0..n {
        for k in 0..n {
            let s = vals[m].max(0.0) + vals[k].max(0.0);
            if s > 1e-12 {
                h += 2.0 * rot[(m, k)].norm_sqr() / s;
            }
        }
    }
    Ok(h)
}
