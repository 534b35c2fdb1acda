//! Small fixed-purpose numerics: composite Simpson quadrature with interval
//! doubling, and central finite differences with a Richardson refinement.

use crate::error::{Error, Result};

/// Hard cap on the number of Simpson subintervals before giving up.
const MAX_INTERVALS: usize = 1 << 22;

/// Composite Simpson integration of `f` over `[a, b]`, doubling the number of
/// subintervals until two successive estimates agree to within
/// `max(tol, 1e-14 * |estimate|)`.  The tolerance is absolute; the relative
/// guard only matters for very large integrals where roundoff dominates.
///
/// A degenerate interval (`a == b`) integrates to exactly zero.
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    if !a.is_finite() || !b.is_finite() {
        return Err(Error::domain("integration bounds", format!("must be finite, got [{a}, {b}]")));
    }
    if !tol.is_finite() || tol <= 0.0 {
        return Err(Error::domain("quadrature tolerance", format!("must be positive, got {tol}")));
    }
    if a == b {
        return Ok(0.0);
    }

    let mut n = 16;
    let mut prev = composite(&f, a, b, n)?;
    while n < MAX_INTERVALS {
        n *= 2;
        let cur = composite(&f, a, b, n)?;
        if (cur - prev).abs() <= tol.max(1e-14 * cur.abs()) {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::numeric(
        "simpson",
        format!("no convergence to {tol:e} over [{a}, {b}] after {MAX_INTERVALS} subintervals"),
    ))
}

fn composite<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, n: usize) -> Result<f64> {
    let h = (b - a) / n as f64;
    let mut sum = f(a) + f(b);
    for k in 1..n {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(a + k as f64 * h);
    }
    let value = sum * h / 3.0;
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::numeric("simpson", format!("non-finite integrand over [{a}, {b}]")))
    }
}

/// Second-order central difference `(f(x+h) - f(x-h)) / 2h`.
pub fn central_diff<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}

/// Richardson-extrapolated central difference: combines step sizes `h` and
/// `h/2` to cancel the leading `h^2` error term.
pub fn richardson_central_diff<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    let d_h = central_diff(&f, x, h);
    let d_half = central_diff(&f, x, h / 2.0);
    (4.0 * d_half - d_h) / 3.0
}
