//! Small numerical kernels shared by the physics modules: bracketing root
//! finders, adaptive quadrature, Richardson-refined central differences and
//! Kronecker products.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Bisection on `[lo, hi]` until the bracket is narrower than `tol`.
///
/// `f(lo)` and `f(hi)` must have opposite signs.
pub fn bisect<F: FnMut(f64) -> f64>(mut f: F, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64> {
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() || flo.is_nan() || fhi.is_nan() {
        return Err(Error::NoConvergence(format!(
            "root not bracketed on [{lo}, {hi}] (f = {flo}, {fhi})"
        )));
    }
    for _ in 0..400 {
        if (hi - lo).abs() <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// First sign change of `f` on a geometric grid from `lo` to `hi`,
/// returned as a bracket.
pub fn scan_bracket<F: FnMut(f64) -> f64>(
    mut f: F,
    lo: f64,
    hi: f64,
    points: usize,
) -> Option<(f64, f64)> {
    let ratio = (hi / lo).powf(1.0 / (points - 1) as f64);
    let mut x_prev = lo;
    let mut f_prev = f(lo);
    for k in 1..points {
        let x = lo * ratio.powi(k as i32);
        let fx = f(x);
        if fx.is_finite() && f_prev.is_finite() && fx.signum() != f_prev.signum() {
            return Some((x_prev, x));
        }
        x_prev = x;
        f_prev = fx;
    }
    None
}

/// Adaptive Gauss-Kronrod (7-15) quadrature with relative tolerance `rtol`.
pub fn integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, rtol: f64) -> Result<f64> {
    let (whole, err) = gk15(f, a, b);
    let scale = whole.abs().max(1e-300);
    adapt(f, a, b, whole, err, rtol, scale, 0)
}

#[allow(clippy::too_many_arguments)]
fn adapt<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    whole: f64,
    err: f64,
    rtol: f64,
    scale: f64,
    depth: usize,
) -> Result<f64> {
    if err <= rtol * scale || (b - a).abs() < 1e-14 * (a.abs() + b.abs()).max(1.0) {
        return Ok(whole);
    }
    if depth > 50 {
        return Err(Error::NoConvergence(format!(
            "adaptive quadrature on [{a}, {b}] stalled (error estimate {err:e})"
        )));
    }
    let m = 0.5 * (a + b);
    let (l, el) = gk15(f, a, m);
    let (r, er) = gk15(f, m, b);
    Ok(adapt(f, a, m, l, el, rtol, scale, depth + 1)? + adapt(f, m, b, r, er, rtol, scale, depth + 1)?)
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    const XK: [f64; 8] = [
        0.991_455_371_120_812_6,
        0.949_107_912_342_758_5,
        0.864_864_423_359_769_1,
        0.741_531_185_599_394_4,
        0.586_087_235_467_691_1,
        0.405_845_151_377_397_2,
        0.207_784_955_007_898_5,
        0.0,
    ];
    const WK: [f64; 8] = [
        0.022_935_322_010_529_22,
        0.063_092_092_629_978_55,
        0.104_790_010_322_250_2,
        0.140_653_259_715_525_9,
        0.169_004_726_639_267_9,
        0.190_350_578_064_785_4,
        0.204_432_940_075_298_9,
        0.209_482_141_084_728_0,
    ];
    const WG: [f64; 4] = [
        0.129_484_966_168_869_7,
        0.279_705_391_489_276_7,
        0.381_830_050_505_118_9,
        0.417_959_183_673_469_4,
    ];
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = WK[7] * fc;
    let mut gauss = WG[3] * fc;
    for i in 0..7 {
        let dx = h * XK[i];
        let s = f(c - dx) + f(c + dx);
        kron += WK[i] * s;
        if i % 2 == 1 {
            gauss += WG[i / 2] * s;
        }
    }
    (kron * h, ((kron - gauss) * h).abs())
}

/// Central difference of a matrix-valued map with one Richardson step:
/// `(4 D(h/2) - D(h)) / 3`, accurate to `O(h^4)` on smooth maps.
pub fn richardson_derivative<F>(f: F, x: f64, h: f64) -> Result<DMatrix<f64>>
where
    F: Fn(f64) -> Result<DMatrix<f64>>,
{
    let d = |step: f64| -> Result<DMatrix<f64>> { Ok((f(x + step)? - f(x - step)?) / (2.0 * step)) };
    let coarse = d(h)?;
    let fine = d(0.5 * h)?;
    Ok((fine * 4.0 - coarse) / 3.0)
}

/// Kronecker product for real dense matrices.
pub fn kron(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    a.kronecker(b)
}

/// Column-stacking vectorization.
pub fn vec_of(m: &DMatrix<f64>) -> nalgebra::DVector<f64> {
    nalgebra::DVector::from_column_slice(m.as_slice())
}
