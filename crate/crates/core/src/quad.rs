//! Adaptive quadrature.
//!
//! The improper integrals behind the propagation-speed conditions are
//! evaluated by adaptive Simpson quadrature after the substitution
//! `τ = e^x`, which turns both algebraic and logarithmic tails into
//! well-behaved integrands on the line. Tails toward +∞ are summed over
//! segments of doubling width until the contribution stabilizes.

use crate::error::{Error, Result};

/// A quadrature result together with an absolute error estimate.
#[derive(Debug, Clone, Copy)]
pub struct IntegralEstimate {
    pub value: f64,
    pub abs_error: f64,
}

impl IntegralEstimate {
    pub const ZERO: Self = Self { value: 0.0, abs_error: 0.0 };

    fn merge(self, other: Self) -> Self {
        Self {
            value: self.value + other.value,
            abs_error: self.abs_error + other.abs_error,
        }
    }
}

fn simpson(fa: f64, fm: f64, fb: f64, h: f64) -> f64 {
    h / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adapt<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    eps: f64,
    depth: u32,
    acc_err: &mut f64,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(fa, flm, fm, m - a);
    let right = simpson(fm, frm, fb, b - m);
    let err = (left + right - whole) / 15.0;
    if err.abs() <= eps || depth == 0 || (b - a) < f64::EPSILON * (a.abs() + b.abs()) {
        if depth == 0 {
            *acc_err += err.abs();
        } else {
            *acc_err += err.abs().min(eps);
        }
        return left + right + err;
    }
    adapt(f, a, m, fa, flm, fm, left, 0.5 * eps, depth - 1, acc_err)
        + adapt(f, m, b, fm, frm, fb, right, 0.5 * eps, depth - 1, acc_err)
}

/// Adaptive Simpson quadrature of `f` over `[a, b]` to absolute accuracy
/// `eps_abs`. The integrand must be finite on the closed interval.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, eps_abs: f64) -> IntegralEstimate {
    if a == b {
        return IntegralEstimate::ZERO;
    }
    let fa = f(a);
    let fm = f(0.5 * (a + b));
    let fb = f(b);
    let whole = simpson(fa, fm, fb, b - a);
    let mut acc_err = 0.0;
    let eps = eps_abs.max(1e-300);
    let value = adapt(&f, a, b, fa, fm, fb, whole, eps, 48, &mut acc_err);
    IntegralEstimate { value, abs_error: acc_err }
}

/// Adaptive Simpson to relative accuracy `rel_tol`, bootstrapped from a
/// coarse composite estimate of the integral's magnitude.
pub fn adaptive_simpson_rel<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    rel_tol: f64,
) -> IntegralEstimate {
    if a == b {
        return IntegralEstimate::ZERO;
    }
    // coarse magnitude scan so the absolute budget reflects the true scale
    let n = 64;
    let h = (b - a) / n as f64;
    let mut rough = 0.0;
    for i in 0..n {
        rough += f(a + (i as f64 + 0.5) * h).abs() * h;
    }
    let scale = rough.max(f64::MIN_POSITIVE);
    adaptive_simpson(f, a, b, rel_tol * scale)
}

/// Maximum number of width-doubling tail segments before declaring
/// divergence.
pub const MAX_TAIL_DOUBLINGS: u32 = 60;

/// Integrates `f` over `[x0, ∞)` by summing segments of doubling width,
/// each by adaptive Simpson, until two consecutive segment contributions
/// fall below `rel_tol` of the running total.
///
/// Returns a divergence error carrying the partial sum if the tail fails
/// to stabilize within [`MAX_TAIL_DOUBLINGS`] segments.
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(
    f: F,
    x0: f64,
    rel_tol: f64,
) -> Result<IntegralEstimate> {
    let mut total = IntegralEstimate::ZERO;
    let mut lo = x0;
    let mut width = 1.0;
    let mut quiet_segments = 0u32;
    for _ in 0..MAX_TAIL_DOUBLINGS {
        let hi = lo + width;
        let piece = adaptive_simpson_rel(&f, lo, hi, rel_tol);
        total = total.merge(piece);
        let scale = total.value.abs().max(f64::MIN_POSITIVE);
        if piece.value.abs() <= rel_tol * scale {
            quiet_segments += 1;
            if quiet_segments >= 2 {
                // remaining tail is bounded by a geometric continuation of
                // the last contribution for the monotone tails in scope
                total.abs_error += piece.value.abs();
                return Ok(total);
            }
        } else {
            quiet_segments = 0;
        }
        lo = hi;
        width *= 2.0;
    }
    Err(Error::Divergence { partial: total.value, segments: MAX_TAIL_DOUBLINGS })
}
