//! Quadrature for the interference integral.
//!
//! The only integral the model needs is
//!
//! ```text
//! G(w0, m) = integral_{w0}^{inf} dw / (1 + w^m),   m > 1,
//! ```
//!
//! obtained from the path-loss integral by the substitution `w = v^2 *
//! t^(-2/alpha)` (so `m = alpha/2`). The finite part up to `W = max(w0, 16)`
//! is handled by adaptive Simpson with Richardson correction; the remainder
//! is the alternating series
//!
//! ```text
//! integral_W^inf dw/(1+w^m) = sum_{k>=1} (-1)^(k+1) W^(1-k*m) / (k*m - 1),
//! ```
//!
//! valid for `W > 1`, which converges geometrically with ratio `W^-m`.

use crate::error::{Error, Result};

/// Relative tolerance requested from the adaptive rule.
pub(crate) const REL_TOL: f64 = 1e-9;
/// Recursion depth cap; hitting it is reported, not silently accepted.
const MAX_DEPTH: u32 = 40;
/// Switch-over point between Simpson and the series tail.
const TAIL_START: f64 = 16.0;

/// `integral_{w0}^{inf} dw / (1 + w^m)` for `m > 1`, `w0 >= 0`.
pub(crate) fn reciprocal_power_tail(w0: f64, m: f64) -> Result<f64> {
    debug_assert!(m > 1.0 && w0 >= 0.0);
    let split = w0.max(TAIL_START);
    let head = if split > w0 {
        adaptive_simpson(&|w: f64| 1.0 / (1.0 + w.powf(m)), w0, split)?
    } else {
        0.0
    };
    Ok(head + alternating_tail(split, m))
}

/// Series tail from `w_start > 1`.
fn alternating_tail(w_start: f64, m: f64) -> f64 {
    let mut sum = 0.0;
    let mut sign = 1.0;
    for k in 1..=200u32 {
        let km = f64::from(k) * m;
        let term = sign * w_start.powf(1.0 - km) / (km - 1.0);
        sum += term;
        if term.abs() <= f64::EPSILON * sum.abs() {
            break;
        }
        sign = -sign;
    }
    sum
}

struct Panel {
    a: f64,
    fa: f64,
    b: f64,
    fb: f64,
    fm: f64,
    estimate: f64,
}

fn simpson_estimate(f: &dyn Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64) -> Panel {
    let mid = 0.5 * (a + b);
    let fm = f(mid);
    Panel {
        a,
        fa,
        b,
        fb,
        fm,
        estimate: (b - a) / 6.0 * (fa + 4.0 * fm + fb),
    }
}

/// Adaptive Simpson with the standard one-fifteenth Richardson correction.
fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> Result<f64> {
    let fa = f(a);
    let fb = f(b);
    let root = simpson_estimate(f, a, fa, b, fb);
    // Tolerance is relative to the coarse whole-interval estimate, with a
    // small absolute floor so a vanishing integral terminates.
    let tol = (REL_TOL * root.estimate.abs()).max(1e-300);
    recurse(f, root, tol, 0)
}

fn recurse(f: &dyn Fn(f64) -> f64, panel: Panel, tol: f64, depth: u32) -> Result<f64> {
    let mid = 0.5 * (panel.a + panel.b);
    let left = simpson_estimate(f, panel.a, panel.fa, mid, panel.fm);
    let right = simpson_estimate(f, mid, panel.fm, panel.b, panel.fb);
    let refined = left.estimate + right.estimate;
    let delta = refined - panel.estimate;
    if delta.abs() <= 15.0 * tol {
        return Ok(refined + delta / 15.0);
    }
    if depth >= MAX_DEPTH {
        return Err(Error::Quadrature(format!(
            "depth {MAX_DEPTH} reached on [{}, {}] (residual {delta:e})",
            panel.a, panel.b
        )));
    }
    Ok(recurse(f, left, 0.5 * tol, depth + 1)? + recurse(f, right, 0.5 * tol, depth + 1)?)
}
