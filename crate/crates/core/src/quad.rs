//! Adaptive Gauss-Kronrod quadrature of positive integrands on `(0, inf)`,
//! with a power-law test for the behaviour at infinite ends.
//!
//! Integrands are passed as `ln g(s)` so that values far outside the
//! floating-point range (an Orlicz function of a logarithmic singularity)
//! stay representable. Integration runs in `x = ln s`, where a power law
//! `g(s) ~ s^e` becomes `exp((e + 1) x)`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Slopes within this margin of the critical value count as divergent.
pub const SLOPE_MARGIN: f64 = 1e-6;

/// Lowest `ln s` visited at a zero end; below it a power-law tail is added.
const X_FLOOR: f64 = -700.0;
/// Highest `ln s` visited at an infinite end.
const X_CEIL: f64 = 700.0;

/// 15-point Kronrod estimate and its difference from the embedded 7-point
/// Gauss rule.
pub fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for i in 0..7 {
        let dx = h * XGK[i];
        let s = f(c - dx) + f(c + dx);
        kron += WGK[i] * s;
        if i % 2 == 1 {
            gauss += WG[i / 2] * s;
        }
    }
    (kron * h, ((kron - gauss) * h).abs())
}

struct Panel {
    a: f64,
    b: f64,
    val: f64,
    err: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.err.total_cmp(&other.err) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// Globally adaptive integration of `f` over `[a, b]`, bisecting the panel
/// with the largest error estimate until the total error meets
/// `max(abs_tol, rel_tol * |I|)`.
pub fn adaptive<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> f64 {
    if !(b > a) {
        return 0.0;
    }
    // long ranges start from unit-ish panels so narrow peaks are seen
    let n0 = ((b - a) / 8.0).ceil().clamp(1.0, 256.0) as usize;
    let mut heap = BinaryHeap::with_capacity(n0 + 64);
    let mut total = 0.0;
    let mut err = 0.0;
    for k in 0..n0 {
        let lo = a + (b - a) * k as f64 / n0 as f64;
        let hi = if k + 1 == n0 { b } else { a + (b - a) * (k + 1) as f64 / n0 as f64 };
        let (val, e) = gk15(f, lo, hi);
        total += val;
        err += e;
        heap.push(Panel { a: lo, b: hi, val, err: e });
    }
    let mut iters = 0;
    while err > abs_tol.max(rel_tol * total.abs()) && iters < 4000 {
        if !total.is_finite() {
            return total;
        }
        let p = match heap.pop() {
            Some(p) => p,
            None => break,
        };
        let m = 0.5 * (p.a + p.b);
        if m <= p.a || m >= p.b {
            heap.push(p);
            break;
        }
        let (v1, e1) = gk15(f, p.a, m);
        let (v2, e2) = gk15(f, m, p.b);
        total += v1 + v2 - p.val;
        err += e1 + e2 - p.err;
        heap.push(Panel { a: p.a, b: m, val: v1, err: e1 });
        heap.push(Panel { a: m, b: p.b, val: v2, err: e2 });
        iters += 1;
    }
    // re-sum to shed the drift of the running updates
    heap.iter().map(|p| p.val).sum()
}

/// Behaviour of a positive integrand at an infinite end of the `ln s` axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EndClass {
    Convergent,
    Divergent,
}

/// Least-squares slope of `(x, y)` points.
fn ls_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let num: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let den: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    num / den
}

/// `ln` of the integrand in the `x = ln s` variable.
fn ln_gx<F: Fn(f64) -> f64>(ln_g: &F, x: f64) -> f64 {
    ln_g(x.exp()) + x
}

/// Decides from three log-log samples whether the integrand is integrable
/// at the end where `x -> sign * inf`. `xs` is ordered towards that end.
fn classify(ln_g_x: &[(f64, f64)], sign: f64) -> Result<EndClass> {
    let last = ln_g_x[ln_g_x.len() - 1].1;
    if last.is_nan() || last == f64::INFINITY {
        return Ok(EndClass::Divergent);
    }
    if last == f64::NEG_INFINITY {
        return Ok(EndClass::Convergent);
    }
    if ln_g_x.iter().any(|p| !p.1.is_finite()) {
        return Err(Error::Inconclusive(f64::NAN));
    }
    // decay towards the end means slope * sign < 0
    let slope = sign * ls_slope(ln_g_x);
    let s1 = sign * (ln_g_x[1].1 - ln_g_x[0].1) / (ln_g_x[1].0 - ln_g_x[0].0);
    let s2 = sign * (ln_g_x[2].1 - ln_g_x[1].1) / (ln_g_x[2].0 - ln_g_x[1].0);
    let div = |s: f64| s >= -SLOPE_MARGIN;
    if div(s1) != div(s2) {
        return Err(Error::Inconclusive(slope - sign));
    }
    Ok(if div(slope) {
        EndClass::Divergent
    } else {
        EndClass::Convergent
    })
}

/// Integrability of `g` at `s -> 0` for a piece ending at `s1`.
pub fn classify_zero<F: Fn(f64) -> f64>(ln_g: &F, s1: f64) -> Result<EndClass> {
    let x_end = s1.ln().min(-69.0) - 10.0;
    let pts: Vec<(f64, f64)> = [0.0, 20.0, 40.0]
        .iter()
        .map(|d| {
            let x = (x_end - d).max(X_FLOOR - 30.0);
            (x, ln_gx(ln_g, x))
        })
        .collect();
    classify(&pts, -1.0)
}

/// Integrability of `g` at `s -> inf` for a piece starting at `s0`;
/// `s_ref` is the scale past which the asymptotic regime is expected.
pub fn classify_inf<F: Fn(f64) -> f64>(ln_g: &F, s0: f64, s_ref: f64) -> Result<EndClass> {
    let x_start = s0.max(s_ref).max(1.0).ln() + 10.0;
    let pts: Vec<(f64, f64)> = [0.0, 20.0, 40.0]
        .iter()
        .map(|d| {
            let x = (x_start + d).min(X_CEIL + 30.0);
            (x, ln_gx(ln_g, x))
        })
        .collect();
    classify(&pts, 1.0)
}

/// Tail of `int exp(y(x)) dx` beyond `x0` in direction `sign`, assuming
/// the log-linear behaviour measured between `x0` and `x0 - 20 sign`.
fn power_tail<F: Fn(f64) -> f64>(ln_g: &F, x0: f64, sign: f64) -> f64 {
    let y0 = ln_gx(ln_g, x0);
    if y0 == f64::NEG_INFINITY {
        return 0.0;
    }
    let y1 = ln_gx(ln_g, x0 - 20.0 * sign);
    let rate = (y1 - y0) / 20.0;
    if !(rate > 0.0) {
        return f64::INFINITY;
    }
    y0.exp() / rate
}

/// `int_{s0}^{s1} g(s) ds` for a nonnegative `g` given as `ln g`, with
/// `0 <= s0 < s1 <= inf`. Returns `+inf` when an infinite end is classified
/// divergent.
pub fn integrate_ln<F: Fn(f64) -> f64>(ln_g: &F, s0: f64, s1: f64, s_ref: f64, rel_tol: f64) -> Result<f64> {
    if !(s1 > s0) {
        return Ok(0.0);
    }
    let gx = |x: f64| {
        let y = ln_gx(ln_g, x);
        if y.is_nan() {
            0.0
        } else {
            y.exp()
        }
    };
    let split = if s0 == 0.0 && s1.is_infinite() {
        s_ref.max(1.0)
    } else {
        f64::NAN
    };
    // the lower part ends at `lo`, the upper part starts at `hi`
    let (lo, hi) = if split.is_nan() { (s1, s0) } else { (split, split) };
    let mut total = 0.0;

    // lower part
    if s0 == 0.0 {
        if classify_zero(ln_g, lo)? == EndClass::Divergent {
            return Ok(f64::INFINITY);
        }
        let xb = lo.ln();
        let xa = (xb - 600.0).max(X_FLOOR).min(xb);
        total += adaptive(&gx, xa, xb, 0.0, rel_tol);
        total += power_tail(ln_g, xa, -1.0);
    }
    // upper part
    if s1.is_infinite() {
        if classify_inf(ln_g, hi, s_ref)? == EndClass::Divergent {
            return Ok(f64::INFINITY);
        }
        let xa = hi.ln();
        let xb = (xa.max(s_ref.max(1.0).ln()) + 200.0).min(X_CEIL).max(xa);
        total += adaptive(&gx, xa, xb, 0.0, rel_tol);
        total += power_tail(ln_g, xb, 1.0);
    }
    if s0 > 0.0 && s1.is_finite() {
        total += adaptive(&gx, s0.ln(), s1.ln(), 0.0, rel_tol);
    }
    Ok(total)
}

/// Integrability classification only, without computing the integral.
pub fn classify_range<F: Fn(f64) -> f64>(ln_g: &F, s0: f64, s1: f64, s_ref: f64) -> Result<EndClass> {
    if s0 == 0.0 && s1 > 0.0 {
        let lo = if s1.is_infinite() { s_ref.max(1.0) } else { s1 };
        if classify_zero(ln_g, lo)? == EndClass::Divergent {
            return Ok(EndClass::Divergent);
        }
    }
    if s1.is_infinite() {
        let hi = if s0 == 0.0 { s_ref.max(1.0) } else { s0 };
        return classify_inf(ln_g, hi, s_ref);
    }
    Ok(EndClass::Convergent)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gk15_integrates_polynomials_exactly() {
        let (v, e) = gk15(&|x: f64| x.powi(10) - 3.0 * x * x, -1.0, 2.0);
        let exact = (2f64.powi(11) + 1.0) / 11.0 - 9.0;
        assert!((v - exact).abs() < 1e-12);
        assert!(e < 1e-9);
    }

    #[test]
    fn adaptive_handles_a_peak() {
        let f = |x: f64| 1.0 / (1e-4 + (x - 0.3) * (x - 0.3));
        let exact = (0.7f64 / 1e-2).atan() / 1e-2 + (0.3f64 / 1e-2).atan() / 1e-2;
        let v = adaptive(&f, 0.0, 1.0, 0.0, 1e-12);
        assert!((v - exact).abs() < 1e-9 * exact);
    }

    #[test]
    fn power_laws_at_both_ends() {
        // int_0^1 s^-1/2 ds = 2
        let v = integrate_ln(&|s: f64| -0.5 * s.ln(), 0.0, 1.0, 1.0, 1e-12).unwrap();
        assert!((v - 2.0).abs() < 1e-10, "{v}");
        // int_1^inf s^-2 ds = 1
        let v = integrate_ln(&|s: f64| -2.0 * s.ln(), 1.0, f64::INFINITY, 1.0, 1e-12).unwrap();
        assert!((v - 1.0).abs() < 1e-10, "{v}");
        // int_0^inf ds / (1 + s)^2 = 1
        let v = integrate_ln(&|s: f64| -2.0 * s.ln_1p(), 0.0, f64::INFINITY, 1.0, 1e-12).unwrap();
        assert!((v - 1.0).abs() < 1e-10, "{v}");
    }

    #[test]
    fn divergent_ends_are_infinite() {
        let v = integrate_ln(&|s: f64| -s.ln(), 0.0, 1.0, 1.0, 1e-10).unwrap();
        assert!(v.is_infinite());
        let v = integrate_ln(&|s: f64| -0.999 * s.ln(), 1.0, f64::INFINITY, 1.0, 1e-10).unwrap();
        assert!(v.is_infinite());
        let v = integrate_ln(&|s: f64| -1.001 * s.ln(), 1.0, f64::INFINITY, 1.0, 1e-10).unwrap();
        assert!((v - 1000.0).abs() < 1e-6 * 1000.0, "{v}");
    }
}
