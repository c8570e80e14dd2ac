//! Adaptive quadrature on complex-valued integrands.

use num_complex::Complex64;

use crate::error::{Error, Result};

const MAX_DEPTH: u32 = 40;

/// Adaptive Simpson rule with Richardson correction. `tol` is an absolute
/// tolerance on the whole interval.
pub fn adaptive_simpson(
    f: &mut impl FnMut(f64) -> Complex64,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<Complex64> {
    if a == b {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let fa = f(a);
    let fb = f(b);
    let mid = 0.5 * (a + b);
    let fm = f(mid);
    let whole = simpson(a, b, fa, fm, fb);
    recurse(f, a, b, fa, fm, fb, whole, tol, MAX_DEPTH)
}

fn simpson(a: f64, b: f64, fa: Complex64, fm: Complex64, fb: Complex64) -> Complex64 {
    (fa + fm * 4.0 + fb) * ((b - a) / 6.0)
}

#[allow(clippy::too_many_arguments)]
fn recurse(
    f: &mut impl FnMut(f64) -> Complex64,
    a: f64,
    b: f64,
    fa: Complex64,
    fm: Complex64,
    fb: Complex64,
    whole: Complex64,
    tol: f64,
    depth: u32,
) -> Result<Complex64> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if delta.norm() <= 15.0 * tol {
        return Ok(left + right + delta / 15.0);
    }
    if depth == 0 {
        return Err(Error::QuadratureNotConverged(delta.norm()));
    }
    let l = recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)?;
    let r = recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?;
    Ok(l + r)
}

/// `Γ(t, Ω) = ∫₀ᵗ dt₁ ∫₀^{t₁} dt₂ κ(t₁ - t₂) e^{iΩ(t₁ - t₂)}` by nested
/// adaptive quadrature of the double integral, for an arbitrary stationary
/// correlation function `kappa`.
pub fn gamma_by_quadrature(
    kappa: &impl Fn(f64) -> f64,
    t: f64,
    omega: f64,
    tol: f64,
) -> Result<Complex64> {
    if t < 0.0 {
        return Err(Error::NegativeTime(t));
    }
    let mut failure = None;
    let inner_tol = tol / t.max(1.0);
    let mut outer = |t1: f64| -> Complex64 {
        let mut integrand = |t2: f64| {
            let u = t1 - t2;
            Complex64::from_polar(kappa(u), omega * u)
        };
        match adaptive_simpson(&mut integrand, 0.0, t1, inner_tol) {
            Ok(v) => v,
            Err(e) => {
                failure = Some(e);
                Complex64::new(0.0, 0.0)
            }
        }
    };
    let value = adaptive_simpson(&mut outer, 0.0, t, tol)?;
    match failure {
        Some(e) => Err(e),
        None => Ok(value),
    }
}
