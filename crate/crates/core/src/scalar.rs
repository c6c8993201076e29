//! Scalar root bracketing, bisection and golden-section search.
//!
//! Every search in the crate is one-dimensional over a positive scale
//! parameter (a norm candidate, a multiplier `k`, a conjugate argument), so
//! brackets are grown geometrically from a seed and then refined.

use std::cell::RefCell;

use crate::error::{Error, Result};

/// Largest power-of-two exponent explored when bracketing a scale.
pub const SCALE_CAP_EXP: i32 = 60;

/// Bisects a monotone predicate on `[lo, hi]` with `pred(lo) == false` and
/// `pred(hi) == true`, returning the final bracket.
///
/// Stops when the bracket is a few ulps wide or `rel_width` is reached.
pub fn bisect<F>(mut lo: f64, mut hi: f64, rel_width: f64, mut pred: F) -> (f64, f64)
where
    F: FnMut(f64) -> bool,
{
    for _ in 0..2200 {
        if hi - lo <= rel_width * hi.abs() {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    (lo, hi)
}

/// Same as [`bisect`] for a fallible predicate.
pub fn try_bisect<F>(mut lo: f64, mut hi: f64, rel_width: f64, mut pred: F) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<bool>,
{
    for _ in 0..2200 {
        if hi - lo <= rel_width * hi.abs() {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if pred(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok((lo, hi))
}

/// Brackets the switch point of a predicate that is false for small
/// positive arguments and true for large ones.
///
/// Starting from `seed`, doubles or halves at most `2^cap_exp` away. Returns
/// `Ok(None)` when the predicate is already true at the lower cap, and an
/// error when it is still false at the upper cap.
pub fn bracket_switch<F>(seed: f64, cap_exp: i32, mut pred: F) -> Result<Option<(f64, f64)>>
where
    F: FnMut(f64) -> Result<bool>,
{
    let seed = if seed.is_finite() && seed > 0.0 { seed } else { 1.0 };
    if pred(seed)? {
        let mut hi = seed;
        for _ in 0..cap_exp {
            let lo = 0.5 * hi;
            if !pred(lo)? {
                return Ok(Some((lo, hi)));
            }
            hi = lo;
        }
        Ok(None)
    } else {
        let mut lo = seed;
        for _ in 0..cap_exp {
            let hi = 2.0 * lo;
            if pred(hi)? {
                return Ok(Some((lo, hi)));
            }
            lo = hi;
        }
        Err(Error::NotInSpace(format!(
            "predicate still false at scale {:e}",
            lo
        )))
    }
}

/// Golden-section search for the minimum of `f` on `[a, b]`.
///
/// Returns `(x_min, f_min)`; non-finite values are treated as `+inf`, so the
/// search also works for quasiconvex maps that blow up on one side.
pub fn golden_min<F>(f: F, mut a: f64, mut b: f64, max_evals: usize) -> (f64, f64)
where
    F: Fn(f64) -> f64,
{
    const RESP: f64 = 0.381_966_011_250_105_2;
    let eval = |x: f64| {
        let y = f(x);
        if y.is_nan() {
            f64::INFINITY
        } else {
            y
        }
    };
    let mut x1 = a + RESP * (b - a);
    let mut x2 = b - RESP * (b - a);
    let mut f1 = eval(x1);
    let mut f2 = eval(x2);
    let mut evals = 2;
    while evals < max_evals && (b - a) > 1e-15 * b.abs().max(f64::MIN_POSITIVE) {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = a + RESP * (b - a);
            f1 = eval(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = b - RESP * (b - a);
            f2 = eval(x2);
        }
        evals += 1;
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Minimizes a quasiconvex map over `k > 0`.
///
/// A coarse scan over powers of two around `seed` locates the basin, then
/// golden-section refines inside the neighbouring octaves. If the scan is
/// still decreasing at the cap, the capped value is returned (the infimum is
/// approached as `k` grows without bound).
pub fn minimize_positive<F>(f: F, seed: f64) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64>,
{
    let seed = if seed.is_finite() && seed > 0.0 { seed } else { 1.0 };
    let first_err: RefCell<Option<Error>> = RefCell::new(None);
    let call = |k: f64| match f(k) {
        Ok(v) if v.is_nan() => f64::INFINITY,
        Ok(v) => v,
        Err(e) => {
            first_err.borrow_mut().get_or_insert(e);
            f64::INFINITY
        }
    };

    let cap = 2 * SCALE_CAP_EXP;
    let mut best_j = 0i32;
    let mut best = call(seed);
    let mut j = 0;
    while j < cap {
        let v = call(seed * 2f64.powi(j + 1));
        if v < best {
            best = v;
            best_j = j + 1;
            j += 1;
        } else {
            break;
        }
    }
    if best_j == 0 {
        let mut j = 0;
        while j > -cap {
            let v = call(seed * 2f64.powi(j - 1));
            if v < best {
                best = v;
                best_j = j - 1;
                j -= 1;
            } else {
                break;
            }
        }
    }
    if !best.is_finite() {
        return Err(first_err.into_inner().unwrap_or_else(|| {
            Error::NotInSpace("objective is infinite at every probed scale".into())
        }));
    }
    let k_best = seed * 2f64.powi(best_j);
    let (x, v) = golden_min(call, 0.5 * k_best, 2.0 * k_best, 400);
    if v <= best {
        Ok((x, v))
    } else {
        Ok((k_best, best))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisect_finds_square_root() {
        let (lo, hi) = bisect(1.0, 2.0, 1e-15, |x| x * x >= 2.0);
        assert!((hi - std::f64::consts::SQRT_2).abs() < 1e-14);
        assert!(lo <= hi);
    }

    #[test]
    fn golden_min_of_parabola() {
        let (x, fx) = golden_min(|x| (x - 0.3) * (x - 0.3) + 1.0, 0.0, 1.0, 200);
        assert!((x - 0.3).abs() < 1e-7);
        assert!((fx - 1.0).abs() < 1e-14);
    }

    #[test]
    fn minimize_positive_amemiya_shape() {
        // (1 + k^2/2)/k has minimum sqrt(2) at k = sqrt(2)
        let (k, v) = minimize_positive(|k| Ok((1.0 + 0.5 * k * k) / k), 1.0).unwrap();
        assert!((v - std::f64::consts::SQRT_2).abs() < 1e-14);
        assert!((k - std::f64::consts::SQRT_2).abs() < 1e-6);
    }

    #[test]
    fn bracket_switch_reports_cap() {
        let r = bracket_switch(1.0, 10, |_| Ok(false));
        assert!(matches!(r, Err(Error::NotInSpace(_))));
        let r = bracket_switch(1.0, 10, |_| Ok(true)).unwrap();
        assert!(r.is_none());
    }
}
