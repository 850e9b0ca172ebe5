//! Independent oracles shared by the integration tests.
//!
//! Photon-number heralding is reached through the Gaussian POVM
//! `E(s) = sum_n s^n |n><n|`, which is `1/(1-s)` times a thermal state with
//! covariance `(1+s)/(1-s)`. Conditioning on `E(s1) x E(s2)` is a Gaussian
//! Schur complement, and the single-photon outcome is the `s1 s2`
//! coefficient of the result. That coefficient is taken exactly with a
//! Cauchy contour integral in complex `s`, so no printed formula enters.

#![allow(dead_code)]

use cvq::entanglement::BipartiteCM;
use cvq::gaussian::{apply, beam_splitter, vacuum, GaussianState, ModeSubset};
use nalgebra::{DMatrix, Matrix2, Vector2};
use num_complex::Complex64 as C;

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

/// The `s1 s2` Taylor coefficient of `f` at the origin.
pub fn mixed_coefficient<F: Fn(C, C) -> C>(f: F, radius: f64, points: usize) -> C {
    let nodes: Vec<C> = (0..points)
        .map(|j| C::from_polar(radius, 2.0 * std::f64::consts::PI * j as f64 / points as f64))
        .collect();
    let mut acc = C::new(0.0, 0.0);
    for &s1 in &nodes {
        for &s2 in &nodes {
            acc += f(s1, s2) / (s1 * s2);
        }
    }
    acc / (points * points) as f64
}

fn to_c(m: &DMatrix<f64>) -> DMatrix<C> {
    m.map(|x| C::new(x, 0.0))
}

fn det2(m: &DMatrix<C>) -> C {
    m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]
}

/// Two-mode state after both arms meet vacuum on splitters of transmissivity
/// `tau`, split into system block, ancilla block and their correlations.
pub struct HeraldOracle {
    sys: DMatrix<C>,
    anc: DMatrix<C>,
    cross: DMatrix<C>,
}

impl HeraldOracle {
    pub fn new(cm: &BipartiteCM, tau: f64) -> Self {
        let st = GaussianState::from_sigma(cm.matrix()).unwrap().tensor(&vacuum(2));
        let bs = beam_splitter(tau).unwrap();
        let st = apply(&st, &bs, &ModeSubset::new(&[0, 2]).unwrap()).unwrap();
        let st = apply(&st, &bs, &ModeSubset::new(&[1, 3]).unwrap()).unwrap();
        let s = to_c(st.sigma());
        HeraldOracle {
            sys: s.view((0, 0), (4, 4)).into_owned(),
            anc: s.view((4, 4), (4, 4)).into_owned(),
            cross: s.view((0, 4), (4, 4)).into_owned(),
        }
    }

    /// Weight `Tr[rho E(s1) E(s2)]` and conditional covariance matrix.
    pub fn conditioned(&self, s1: C, s2: C) -> (C, DMatrix<C>) {
        let one = C::new(1.0, 0.0);
        let v1 = (one + s1) / (one - s1);
        let v2 = (one + s2) / (one - s2);
        let mut m = self.anc.clone();
        for i in 0..2 {
            m[(i, i)] += v1;
            m[(i + 2, i + 2)] += v2;
        }
        let det = m.determinant();
        let weight = C::new(4.0, 0.0) / ((one - s1) * (one - s2) * det.sqrt());
        let minv = m.try_inverse().unwrap();
        let cond = &self.sys - &self.cross * minv * self.cross.transpose();
        (weight, cond)
    }

    /// Probability of one photon in each ancilla.
    pub fn success_prob(&self) -> f64 {
        mixed_coefficient(|a, b| self.conditioned(a, b).0, 0.1, 32).re
    }

    /// Teleportation fidelity of the heralded state.
    pub fn fidelity(&self) -> f64 {
        let f = |a, b| {
            let (w, s) = self.conditioned(a, b);
            w / det2(&(DMatrix::identity(2, 2) + gamma_c(&s) * C::new(0.5, 0.0))).sqrt()
        };
        mixed_coefficient(f, 0.1, 32).re / self.success_prob()
    }

    /// Characteristic function of the heralded state at `(alpha, beta)`.
    pub fn char_fn(&self, alpha: &Vector2<f64>, beta: &Vector2<f64>) -> f64 {
        let r = nalgebra::DVector::from_vec(vec![alpha[0], alpha[1], beta[0], beta[1]]);
        let om = to_c(&cvq::gaussian::omega(2).matrix().clone());
        let w = om.transpose() * to_c(&DMatrix::from_column_slice(4, 1, r.as_slice()));
        let f = |a, b| {
            let (wt, s) = self.conditioned(a, b);
            let q = (w.transpose() * &s * &w)[(0, 0)];
            wt * (q * C::new(-0.25, 0.0)).exp()
        };
        mixed_coefficient(f, 0.1, 32).re / self.success_prob()
    }

    /// Blocks of the vacuum-heralded (envelope) covariance matrix.
    pub fn envelope(&self) -> DMatrix<f64> {
        self.conditioned(C::new(0.0, 0.0), C::new(0.0, 0.0)).1.map(|z| z.re)
    }
}

fn gamma_c(s: &DMatrix<C>) -> DMatrix<C> {
    let z = to_c(&DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]));
    let a = s.view((0, 0), (2, 2)).into_owned();
    let b = s.view((2, 2), (2, 2)).into_owned();
    let e = s.view((0, 2), (2, 2)).into_owned();
    &z * a * &z + b - &z * &e - e.transpose() * &z
}

/// Polynomial extrapolation of `f(delta)` to `delta = 0` from the nodes
/// `delta0 / 2^j`, `j < levels` (Neville).
pub fn extrapolate_to_zero<F: Fn(f64) -> f64>(f: F, delta0: f64, levels: usize) -> f64 {
    let xs: Vec<f64> = (0..levels).map(|j| delta0 / 2f64.powi(j as i32)).collect();
    let mut p: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    for m in 1..levels {
        for i in 0..levels - m {
            p[i] = (xs[i] * p[i + 1] - xs[i + m] * p[i]) / (xs[i] - xs[i + m]);
        }
    }
    p[0]
}

/// Heuristic (`a_A a_B`) fidelity as the `tau -> 1` limit of heralding.
pub fn heuristic_fidelity(cm: &BipartiteCM) -> f64 {
    extrapolate_to_zero(|d| HeraldOracle::new(cm, 1.0 - d).fidelity(), 1e-2, 5)
}

/// Heuristic characteristic function as the `tau -> 1` limit of heralding.
pub fn heuristic_char_fn(cm: &BipartiteCM, alpha: &Vector2<f64>, beta: &Vector2<f64>) -> f64 {
    extrapolate_to_zero(|d| HeraldOracle::new(cm, 1.0 - d).char_fn(alpha, beta), 1e-2, 5)
}

pub fn m2(a: f64, b: f64, c: f64, d: f64) -> Matrix2<f64> {
    Matrix2::new(a, b, c, d)
}
