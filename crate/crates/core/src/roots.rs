//! Scalar root finding and bracketed minimisation used throughout the crate.
//!
//! All solvers work on closed brackets and never step outside them, so they
//! are safe to call on functions that are only defined on the bracket.

const MAX_ITER: usize = 200;

/// Bisection on `[lo, hi]` until the bracket is narrower than `tol` or stops
/// shrinking. The endpoints must not have the same strict sign.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let mut f_lo = f(lo);
    if f_lo == 0.0 {
        return lo;
    }
    if f(hi) == 0.0 {
        return hi;
    }
    for _ in 0..MAX_ITER {
        let mid = 0.5 * (lo + hi);
        if mid <= lo.min(hi) || mid >= lo.max(hi) || (hi - lo).abs() <= tol {
            break;
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return mid;
        }
        if (f_mid < 0.0) == (f_lo < 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Newton iteration safeguarded by a sign-change bracket.
///
/// `fdf` returns the value and derivative. Steps that would leave the current
/// bracket, or that shrink too slowly, fall back to bisection. Iterates to
/// machine precision.
pub fn newton_bracketed<F: Fn(f64) -> (f64, f64)>(fdf: F, lo: f64, hi: f64, x0: f64) -> f64 {
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let (fa, _) = fdf(a);
    if fa == 0.0 {
        return a;
    }
    let (fb, _) = fdf(b);
    if fb == 0.0 {
        return b;
    }
    let a_negative = fa < 0.0;
    let mut x = if x0 > a && x0 < b { x0 } else { 0.5 * (a + b) };
    let mut step_old = b - a;
    for _ in 0..MAX_ITER {
        let (fx, dfx) = fdf(x);
        if fx == 0.0 {
            return x;
        }
        if (fx < 0.0) == a_negative {
            a = x;
        } else {
            b = x;
        }
        let newton = x - fx / dfx;
        let take_newton =
            newton.is_finite() && newton > a && newton < b && (2.0 * fx).abs() <= (step_old * dfx).abs();
        let next = if take_newton { newton } else { 0.5 * (a + b) };
        step_old = (next - x).abs();
        if next == x || step_old <= 2.0 * f64::EPSILON * x.abs() {
            return next;
        }
        x = next;
    }
    x
}

/// Golden-section search for a minimum of a unimodal function on `[lo, hi]`.
/// Returns the minimiser and the minimum value.
pub fn golden_min<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let inv_phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..MAX_ITER {
        if (hi - lo).abs() <= tol {
            break;
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}
