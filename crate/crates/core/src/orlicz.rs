//! Orlicz functions, their right derivatives and complementary functions.
//!
//! An [`OrliczFunction`] is an immutable description of a convex
//! `phi: [0, inf) -> [0, inf)` with `phi(0) = 0`. The analytic families have
//! closed forms for `phi`, its right derivative `p`, and the complementary
//! function `phi*(v) = sup_u (u v - phi(u))`. Functions without a closed-form
//! conjugate are conjugated numerically by solving `p(u) = v` with bisection.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Break point of the non-Delta2-at-zero family: `exp(-1/t)` is convex on
/// `(0, 1/2]`, the quadratic extension starts here.
const NDZ_BREAK: f64 = 0.25;

/// Bracket doublings allowed before the numeric conjugate gives up.
const MAX_DOUBLINGS: u32 = 256;

/// Numeric tolerances attached to an Orlicz function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { abs: 1e-10, rel: 1e-8 }
    }
}

/// The catalog of supported Orlicz functions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    /// `phi(t) = scale * t^r`, `r > 1`.
    Power { r: f64, scale: f64 },
    /// `phi(t) = e^t - t - 1`.
    Exp,
    /// `phi(t) = (1 + t) ln(1 + t) - t`.
    Log,
    /// `phi(t) = exp(-1/t)` on `(0, 1/4]`, continued by the osculating
    /// quadratic. Fails Delta2 near zero.
    NonDelta2Zero,
    /// Piecewise-linear convex interpolation of `(t, phi(t))` knots, extended
    /// linearly past the last knot.
    Tabulated { knots: Vec<(f64, f64)> },
    /// Numeric complementary function of another Orlicz function.
    Conjugate { of: Box<OrliczFunction> },
}

/// Delta2 classification of an Orlicz function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Delta2 {
    pub global: bool,
    pub at_infinity: bool,
    pub at_zero: bool,
    /// Supremum of `phi(2u)/phi(u)` over the region where the condition holds.
    pub k_estimate: f64,
    /// True when the answer comes from sampling rather than a closed form.
    pub heuristic: bool,
}

/// A convex Orlicz function together with its numeric tolerances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Family", into = "Family")]
pub struct OrliczFunction {
    family: Family,
    tol: Tolerance,
}

impl TryFrom<Family> for OrliczFunction {
    type Error = Error;

    fn try_from(family: Family) -> Result<Self> {
        OrliczFunction::new(family)
    }
}

impl From<OrliczFunction> for Family {
    fn from(f: OrliczFunction) -> Family {
        f.family
    }
}

fn check_nonneg(name: &str, u: f64) -> Result<()> {
    if u.is_finite() && u >= 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} must be finite and >= 0, got {u}")))
    }
}

impl OrliczFunction {
    pub fn new(family: Family) -> Result<Self> {
        match &family {
            Family::Power { r, scale } => {
                if !(r.is_finite() && *r > 1.0) {
                    return Err(Error::Invalid(format!("power exponent must be > 1, got {r}")));
                }
                if !(scale.is_finite() && *scale > 0.0) {
                    return Err(Error::Invalid(format!("power scale must be > 0, got {scale}")));
                }
            }
            Family::Tabulated { knots } => validate_knots(knots, Tolerance::default())?,
            _ => {}
        }
        let family = match family {
            Family::Tabulated { knots } => Family::Tabulated {
                knots: normalize_knots(knots),
            },
            other => other,
        };
        Ok(OrliczFunction {
            family,
            tol: Tolerance::default(),
        })
    }

    pub fn power(r: f64, scale: f64) -> Result<Self> {
        Self::new(Family::Power { r, scale })
    }

    pub fn exp_type() -> Self {
        OrliczFunction {
            family: Family::Exp,
            tol: Tolerance::default(),
        }
    }

    pub fn log_type() -> Self {
        OrliczFunction {
            family: Family::Log,
            tol: Tolerance::default(),
        }
    }

    pub fn non_delta2_zero() -> Self {
        OrliczFunction {
            family: Family::NonDelta2Zero,
            tol: Tolerance::default(),
        }
    }

    pub fn tabulated(knots: Vec<(f64, f64)>) -> Result<Self> {
        Self::new(Family::Tabulated { knots })
    }

    pub fn with_tol(mut self, tol: Tolerance) -> Result<Self> {
        if let Family::Tabulated { knots } = &self.family {
            validate_knots(knots, tol)?;
        }
        self.tol = tol;
        Ok(self)
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn tol(&self) -> Tolerance {
        self.tol
    }

    /// Whether `phi(t)/t -> 0` at zero and `-> inf` at infinity.
    pub fn is_n_function(&self) -> bool {
        match &self.family {
            Family::Power { .. } | Family::Exp | Family::Log | Family::NonDelta2Zero => true,
            Family::Tabulated { .. } => false,
            Family::Conjugate { of } => of.is_n_function(),
        }
    }

    /// `phi(u)`; returns a domain error for negative or non-finite `u`.
    pub fn phi_eval(&self, u: f64) -> Result<f64> {
        check_nonneg("argument", u)?;
        Ok(self.value(u))
    }

    /// `p(u)`, the right derivative of `phi`.
    pub fn right_derivative(&self, u: f64) -> Result<f64> {
        check_nonneg("argument", u)?;
        Ok(self.derivative(u))
    }

    /// `phi*(v)`. Fails with [`Error::NonConvergence`] when the supremum is
    /// infinite (the function grows only linearly).
    pub fn conjugate_eval(&self, v: f64) -> Result<f64> {
        check_nonneg("argument", v)?;
        match &self.family {
            Family::Power { .. } | Family::Exp | Family::Log => Ok(self.conjugate().value(v)),
            Family::Conjugate { of } => Ok(of.value(v)),
            Family::NonDelta2Zero | Family::Tabulated { .. } => {
                self.numeric_conjugate(v).ok_or(Error::NonConvergence {
                    v,
                    doublings: MAX_DOUBLINGS,
                })
            }
        }
    }

    /// `phi(u) + phi*(v) - u v`, nonnegative by Young's inequality.
    pub fn young_gap(&self, u: f64, v: f64) -> Result<f64> {
        check_nonneg("u", u)?;
        let conj = self.conjugate_eval(v)?;
        Ok(self.value(u) + conj - u * v)
    }

    /// The complementary function as an Orlicz function in its own right.
    pub fn conjugate(&self) -> OrliczFunction {
        let family = match &self.family {
            Family::Power { r, scale } => {
                let rc = r / (r - 1.0);
                let sc = (scale * r).powf(1.0 - rc) / rc;
                Family::Power { r: rc, scale: sc }
            }
            Family::Exp => Family::Log,
            Family::Log => Family::Exp,
            Family::Conjugate { of } => return (**of).clone(),
            Family::NonDelta2Zero | Family::Tabulated { .. } => Family::Conjugate {
                of: Box::new(self.clone()),
            },
        };
        OrliczFunction {
            family,
            tol: self.tol,
        }
    }

    /// `phi(u)` for `u >= 0` without domain checks. May be `+inf` for the
    /// numeric conjugate of a function with bounded slope.
    pub fn value(&self, u: f64) -> f64 {
        if u <= 0.0 {
            return 0.0;
        }
        match &self.family {
            Family::Power { r, scale } => scale * u.powf(*r),
            Family::Exp => {
                if u < 1e-3 {
                    let u2 = u * u;
                    u2 * (0.5 + u * (1.0 / 6.0 + u * (1.0 / 24.0 + u / 120.0)))
                } else {
                    u.exp_m1() - u
                }
            }
            Family::Log => {
                if u < 1e-3 {
                    let u2 = u * u;
                    u2 * (0.5 - u * (1.0 / 6.0 - u * (1.0 / 12.0 - u / 20.0)))
                } else {
                    (1.0 + u) * u.ln_1p() - u
                }
            }
            Family::NonDelta2Zero => {
                if u <= NDZ_BREAK {
                    (-1.0 / u).exp()
                } else {
                    let (v0, p0, c) = ndz_joint();
                    let d = u - NDZ_BREAK;
                    v0 + p0 * d + 0.5 * c * d * d
                }
            }
            Family::Tabulated { knots } => {
                let (k, slope) = tab_segment(knots, u);
                knots[k].1 + slope * (u - knots[k].0)
            }
            Family::Conjugate { of } => of.numeric_conjugate(u).unwrap_or(f64::INFINITY),
        }
    }

    /// `ln phi(u)`, computed without overflow where `phi` itself overflows.
    pub fn ln_value(&self, u: f64) -> f64 {
        if u <= 0.0 {
            return f64::NEG_INFINITY;
        }
        match &self.family {
            Family::Power { r, scale } => scale.ln() + r * u.ln(),
            Family::Exp if u > 30.0 => u + (-(u + 1.0) * (-u).exp()).ln_1p(),
            Family::NonDelta2Zero if u <= NDZ_BREAK => -1.0 / u,
            _ => self.value(u).ln(),
        }
    }

    /// `p(u)` for `u >= 0` without domain checks.
    pub fn derivative(&self, u: f64) -> f64 {
        let u = u.max(0.0);
        match &self.family {
            Family::Power { r, scale } => {
                if u == 0.0 {
                    0.0
                } else {
                    scale * r * u.powf(r - 1.0)
                }
            }
            Family::Exp => u.exp_m1(),
            Family::Log => u.ln_1p(),
            Family::NonDelta2Zero => {
                if u == 0.0 {
                    0.0
                } else if u <= NDZ_BREAK {
                    (-1.0 / u).exp() / (u * u)
                } else {
                    let (_, p0, c) = ndz_joint();
                    p0 + c * (u - NDZ_BREAK)
                }
            }
            Family::Tabulated { knots } => tab_segment(knots, u).1,
            Family::Conjugate { of } => of.numeric_conjugate_derivative(u),
        }
    }

    /// Smallest `u` with `p(u) >= v`, i.e. the maximizer of `u v - phi(u)`.
    /// `None` when no such `u` exists below `2^MAX_DOUBLINGS`.
    fn conjugate_argmax(&self, v: f64) -> Option<f64> {
        if v <= 0.0 || self.derivative(0.0) >= v {
            return Some(0.0);
        }
        let (lo, hi) = self.derivative_bracket(|p| p >= v)?;
        let (_, hi) = crate::scalar::bisect(lo, hi, 4.0 * f64::EPSILON, |u| {
            self.derivative(u) >= v
        });
        Some(hi)
    }

    /// Brackets the switch of a monotone predicate on `p(u)`, expanding
    /// geometrically from `u = 1`.
    fn derivative_bracket(&self, pred: impl Fn(f64) -> bool) -> Option<(f64, f64)> {
        let mut hi = 1.0f64;
        if pred(self.derivative(hi)) {
            loop {
                let lo = 0.5 * hi;
                if lo < f64::MIN_POSITIVE {
                    return Some((0.0, hi));
                }
                if !pred(self.derivative(lo)) {
                    return Some((lo, hi));
                }
                hi = lo;
            }
        }
        for _ in 0..MAX_DOUBLINGS {
            let lo = hi;
            hi *= 2.0;
            if pred(self.derivative(hi)) {
                return Some((lo, hi));
            }
        }
        None
    }

    /// Numeric `phi*(v)`: maximizes the concave map `u v - phi(u)` by
    /// bisection on `p(u) = v`.
    fn numeric_conjugate(&self, v: f64) -> Option<f64> {
        if v <= 0.0 {
            return Some(0.0);
        }
        let u = self.conjugate_argmax(v)?;
        if u == 0.0 {
            return Some(0.0);
        }
        // the optimum sits between the last point with p < v and u
        let below = u * (1.0 - 4.0 * f64::EPSILON);
        let a = u * v - self.value(u);
        let b = below * v - self.value(below);
        Some(a.max(b).max(0.0))
    }

    /// Right derivative of the numeric conjugate: `sup { u : p(u) <= v }`.
    fn numeric_conjugate_derivative(&self, v: f64) -> f64 {
        if v < 0.0 || self.derivative(0.0) > v {
            return 0.0;
        }
        match self.derivative_bracket(|p| p > v) {
            Some((lo, hi)) => {
                let (lo, _) = crate::scalar::bisect(lo, hi, 4.0 * f64::EPSILON, |u| {
                    self.derivative(u) > v
                });
                lo
            }
            None => f64::INFINITY,
        }
    }

    /// Conjugate evaluated by the generic numeric route even for families
    /// with a closed form. Used to cross-check the closed forms.
    pub fn conjugate_eval_numeric(&self, v: f64) -> Result<f64> {
        check_nonneg("argument", v)?;
        self.numeric_conjugate(v).ok_or(Error::NonConvergence {
            v,
            doublings: MAX_DOUBLINGS,
        })
    }

    /// Delta2 classification; closed form for the analytic families,
    /// sampled otherwise.
    pub fn delta2_classify(&self) -> Delta2 {
        let ratio = |u: f64| self.value(2.0 * u) / self.value(u);
        let sup_over = |lo_exp: i32, hi_exp: i32| {
            (lo_exp..=hi_exp)
                .map(|j| ratio(2f64.powi(j)))
                .filter(|r| r.is_finite())
                .fold(0.0f64, f64::max)
        };
        match &self.family {
            Family::Power { r, .. } => Delta2 {
                global: true,
                at_infinity: true,
                at_zero: true,
                k_estimate: 2f64.powf(*r),
                heuristic: false,
            },
            Family::Exp => Delta2 {
                global: false,
                at_infinity: false,
                at_zero: true,
                k_estimate: sup_over(-20, 0),
                heuristic: false,
            },
            Family::Log => Delta2 {
                global: true,
                at_infinity: true,
                at_zero: true,
                k_estimate: sup_over(-30, 30),
                heuristic: false,
            },
            Family::NonDelta2Zero => Delta2 {
                global: false,
                at_infinity: true,
                at_zero: false,
                k_estimate: sup_over(-2, 30),
                heuristic: false,
            },
            Family::Tabulated { knots } => {
                let mut k = 0.0f64;
                for &(t, _) in knots.iter().skip(1) {
                    for u in [0.5 * t, t, 0.25 * t] {
                        k = k.max(ratio(u));
                    }
                }
                Delta2 {
                    global: true,
                    at_infinity: true,
                    at_zero: true,
                    k_estimate: k,
                    heuristic: true,
                }
            }
            Family::Conjugate { .. } => {
                // bounded ratios on each side of 1 are read as Delta2 there
                let bound = 1e6;
                let zero = sup_over(-40, 0);
                let inf = sup_over(0, 40);
                let at_zero = zero < bound && (-40..=0).all(|j| ratio(2f64.powi(j)).is_finite());
                let at_infinity = inf < bound && (0..=40).all(|j| ratio(2f64.powi(j)).is_finite());
                Delta2 {
                    global: at_zero && at_infinity,
                    at_infinity,
                    at_zero,
                    k_estimate: zero.max(inf),
                    heuristic: true,
                }
            }
        }
    }
}

/// Value, slope and curvature of `exp(-1/t)` at the break point.
fn ndz_joint() -> (f64, f64, f64) {
    let t = NDZ_BREAK;
    let e = (-1.0 / t).exp();
    (e, e / (t * t), e * (1.0 - 2.0 * t) / t.powi(4))
}

/// Index of the knot starting the segment containing `u`, and its slope.
/// Segments are right-continuous; past the last knot the last slope is used.
fn tab_segment(knots: &[(f64, f64)], u: f64) -> (usize, f64) {
    let n = knots.len();
    let k = match knots.binary_search_by(|(t, _)| t.partial_cmp(&u).expect("finite knots")) {
        Ok(i) => i,
        Err(i) => i - 1,
    };
    let k = k.min(n - 2);
    let slope = (knots[k + 1].1 - knots[k].1) / (knots[k + 1].0 - knots[k].0);
    (k, slope)
}

fn normalize_knots(mut knots: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    if knots.first().map(|k| k.0) != Some(0.0) {
        knots.insert(0, (0.0, 0.0));
    }
    knots
}

fn validate_knots(knots: &[(f64, f64)], tol: Tolerance) -> Result<()> {
    let knots = normalize_knots(knots.to_vec());
    if knots.len() < 2 {
        return Err(Error::Invalid("tabulated function needs at least one knot beyond 0".into()));
    }
    if knots[0].1 != 0.0 {
        return Err(Error::Invalid("tabulated function must satisfy phi(0) = 0".into()));
    }
    let mut prev_slope = 0.0f64;
    for (i, w) in knots.windows(2).enumerate() {
        let ((t0, v0), (t1, v1)) = (w[0], w[1]);
        if !(t0.is_finite() && t1.is_finite() && v1.is_finite()) || t1 <= t0 {
            return Err(Error::Invalid(format!(
                "tabulated knots must be finite and strictly increasing (knot {})",
                i + 1
            )));
        }
        let slope = (v1 - v0) / (t1 - t0);
        if i == 0 && slope <= 0.0 {
            return Err(Error::Invalid("tabulated function must be positive on (0, inf)".into()));
        }
        if slope < prev_slope - tol.abs - tol.rel * prev_slope.abs() {
            return Err(Error::Invalid(format!(
                "tabulated function is not convex at knot {} (slope {slope} < {prev_slope})",
                i
            )));
        }
        prev_slope = slope;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    fn half_square() -> OrliczFunction {
        OrliczFunction::power(2.0, 0.5).unwrap()
    }

    #[test]
    fn phi_eval_examples() {
        assert_eq!(half_square().phi_eval(2.0).unwrap(), 2.0);
        for f in [
            half_square(),
            OrliczFunction::exp_type(),
            OrliczFunction::log_type(),
            OrliczFunction::non_delta2_zero(),
        ] {
            assert_eq!(f.phi_eval(0.0).unwrap(), 0.0);
        }
        let v = OrliczFunction::exp_type().phi_eval(1.0).unwrap();
        assert!((v - (E - 2.0)).abs() < 1e-15);
    }

    #[test]
    fn phi_eval_rejects_bad_domain() {
        let f = half_square();
        assert!(matches!(f.phi_eval(-1.0), Err(Error::Domain(_))));
        assert!(matches!(f.phi_eval(f64::NAN), Err(Error::Domain(_))));
        assert!(matches!(f.phi_eval(f64::INFINITY), Err(Error::Domain(_))));
    }

    #[test]
    fn right_derivative_examples() {
        assert_eq!(half_square().right_derivative(3.0).unwrap(), 3.0);
        assert_eq!(OrliczFunction::exp_type().right_derivative(0.0).unwrap(), 0.0);
        let p1 = OrliczFunction::exp_type().right_derivative(1.0).unwrap();
        assert!((p1 - (E - 1.0)).abs() < 1e-15);
    }

    #[test]
    fn conjugate_examples() {
        assert!((half_square().conjugate_eval(2.0).unwrap() - 2.0).abs() < 1e-15);
        assert_eq!(OrliczFunction::exp_type().conjugate_eval(0.0).unwrap(), 0.0);
        // brute-force supremum of u v - phi(u) over a grid, refined twice
        let f = OrliczFunction::exp_type();
        let v = E - 1.0;
        let mut best = (0.0, f64::NEG_INFINITY);
        let (mut lo, mut hi) = (0.0, 10.0);
        for _ in 0..6 {
            let n = 2000;
            for i in 0..=n {
                let u = lo + (hi - lo) * i as f64 / n as f64;
                let val = u * v - f.value(u);
                if val > best.1 {
                    best = (u, val);
                }
            }
            let h = (hi - lo) / n as f64;
            lo = (best.0 - 2.0 * h).max(0.0);
            hi = best.0 + 2.0 * h;
        }
        let got = f.conjugate_eval(v).unwrap();
        assert!((got - best.1).abs() < 1e-9, "{got} vs {}", best.1);
        // sup is attained at u = 1, value e - 1 - (e - 2) = 1
        assert!((got - 1.0).abs() < 1e-12);
    }

    #[test]
    fn power_conjugate_dual_exponent() {
        let f = OrliczFunction::power(3.0, 2.0).unwrap();
        let g = f.conjugate();
        match g.family() {
            Family::Power { r, .. } => assert!((r - 1.5).abs() < 1e-15),
            other => panic!("unexpected {other:?}"),
        }
        for v in [0.1, 1.0, 7.5] {
            let a = f.conjugate_eval(v).unwrap();
            let b = f.conjugate_eval_numeric(v).unwrap();
            assert!((a - b).abs() <= 1e-12 * a.max(1.0), "{a} {b}");
        }
    }

    #[test]
    fn young_gap_examples() {
        let f = half_square();
        assert!(f.young_gap(3.0, 3.0).unwrap().abs() < 1e-15);
        assert!((f.young_gap(1.0, 3.0).unwrap() - 2.0).abs() < 1e-15);
        let e = OrliczFunction::exp_type();
        assert!(e.young_gap(1.0, E - 1.0).unwrap().abs() < 1e-14);
    }

    #[test]
    fn delta2_examples() {
        let d = OrliczFunction::power(2.0, 1.0).unwrap().delta2_classify();
        assert!(d.global && d.at_infinity && d.at_zero);
        assert_eq!(d.k_estimate, 4.0);

        let d = OrliczFunction::exp_type().delta2_classify();
        assert!(!d.at_infinity && d.at_zero && !d.global);
        let e = OrliczFunction::exp_type();
        let ratios: Vec<f64> = [1.0, 2.0, 4.0, 8.0, 16.0]
            .iter()
            .map(|u| e.value(2.0 * u) / e.value(*u))
            .collect();
        assert!(ratios.windows(2).all(|w| w[1] > w[0]));
        assert!(ratios[4] > 1e6);

        let l = OrliczFunction::log_type();
        let d = l.delta2_classify();
        assert!(d.global);
        let sup = (-30..=30)
            .map(|j| {
                let u = 2f64.powi(j);
                l.value(2.0 * u) / l.value(u)
            })
            .fold(0.0f64, f64::max);
        assert!(sup.is_finite() && sup <= 4.0 + 1e-9);
        assert!((d.k_estimate - sup).abs() < 1e-12);

        let d = OrliczFunction::non_delta2_zero().delta2_classify();
        assert!(!d.at_zero && d.at_infinity);
    }

    #[test]
    fn non_delta2_zero_is_convex_and_n_function() {
        let f = OrliczFunction::non_delta2_zero();
        let h = 1e-4;
        let mut t = 0.01;
        while t < 5.0 {
            let second = f.value(t + h) - 2.0 * f.value(t) + f.value(t - h);
            assert!(second >= -1e-15, "not convex at {t}");
            t += 0.003;
        }
        assert!(f.value(1e-3) / 1e-3 < 1e-100);
        assert!(f.value(1e8) / 1e8 > 1e3);
        // continuity and C1 at the joint
        let below = NDZ_BREAK * (1.0 - 1e-12);
        assert!((f.value(below) - f.value(NDZ_BREAK * (1.0 + 1e-12))).abs() < 1e-12);
        assert!((f.derivative(below) - f.derivative(NDZ_BREAK)).abs() < 1e-10);
        // phi(2u)/phi(u) = exp(1/(2u)) is unbounded at zero
        assert!(f.value(0.02) / f.value(0.01) > 1e20);
    }

    #[test]
    fn tabulated_validation_and_slopes() {
        assert!(OrliczFunction::tabulated(vec![(1.0, 1.0), (2.0, 1.5)]).is_err());
        assert!(OrliczFunction::tabulated(vec![(1.0, 0.0)]).is_err());
        let f = OrliczFunction::tabulated(vec![(1.0, 1.0), (2.0, 3.0)]).unwrap();
        assert!(!f.is_n_function());
        assert_eq!(f.derivative(0.5), 1.0);
        assert_eq!(f.derivative(1.0), 2.0);
        assert_eq!(f.value(3.0), 5.0);
        // phi*(v) = max over knots of (t v - phi(t)) while v <= last slope
        assert!((f.conjugate_eval(1.5).unwrap() - 0.5).abs() < 1e-12);
        assert_eq!(f.conjugate_eval(0.5).unwrap(), 0.0);
        assert!(matches!(
            f.conjugate_eval(2.5),
            Err(Error::NonConvergence { .. })
        ));
    }

    #[test]
    fn conjugate_family_round_trip() {
        let f = OrliczFunction::non_delta2_zero();
        let g = f.conjugate();
        assert!(matches!(g.family(), Family::Conjugate { .. }));
        assert_eq!(g.conjugate(), f);
        // q(p(u)) = u for strictly increasing p
        for u in [0.05, 0.2, 0.3, 2.0] {
            let q = g.derivative(f.derivative(u));
            assert!((q - u).abs() < 1e-12 * u.max(1.0), "{u} {q}");
        }
    }

    fn builtins() -> Vec<OrliczFunction> {
        vec![
            OrliczFunction::power(2.0, 0.5).unwrap(),
            OrliczFunction::power(3.5, 2.0).unwrap(),
            OrliczFunction::power(1.3, 1.0).unwrap(),
            OrliczFunction::exp_type(),
            OrliczFunction::log_type(),
            OrliczFunction::non_delta2_zero(),
        ]
    }

    #[test]
    fn biconjugate_on_log_grid() {
        // numeric Legendre transform of the conjugate, not the closed form
        for f in builtins() {
            let g = f.conjugate();
            for j in 0..=80 {
                let u = 10f64.powf(-4.0 + j as f64 * 0.1);
                let want = f.value(u);
                if !(want > 0.0 && want < 1e60) {
                    // the maximizer of the Legendre transform lies beyond the
                    // doubling bracket once exp grows past ~1e60; exp(-1/u)
                    // underflows at the bottom
                    continue;
                }
                let got = g.conjugate_eval_numeric(u).unwrap();
                assert!(
                    (got - want).abs() <= 1e-7 * want,
                    "{:?} u={u} got {got} want {want}",
                    f.family()
                );
            }
        }
    }

    use proptest::prelude::*;

    proptest! {
        // exp' overflows near u = 710
        #[test]
        fn young_inequality_and_equality(fam in 0usize..6, lu in -4.0f64..2.0, lv in -4.0f64..3.0) {
            let f = &builtins()[fam];
            let (u, v) = (10f64.powf(lu), 10f64.powf(lv));
            let gap = f.young_gap(u, v).unwrap();
            prop_assert!(gap >= -1e-10 * (u * v).max(1.0), "gap {}", gap);
            let p = f.derivative(u);
            let eq = f.young_gap(u, p).unwrap();
            prop_assert!(eq.abs() <= 1e-8 * (u * p).max(1e-300) + 1e-300, "equality gap {}", eq);
        }

        #[test]
        fn derivative_is_monotone_and_inverted(fam in 0usize..6, lu in -3.0f64..2.0, dl in 0.0f64..1.0) {
            let f = &builtins()[fam];
            let g = f.conjugate();
            let u = 10f64.powf(lu);
            let u2 = u * 10f64.powf(dl);
            prop_assert!(f.derivative(u2) >= f.derivative(u));
            let v = f.derivative(u);
            // subnormal slopes of exp(-1/u) keep only a few digits
            if v >= f64::MIN_POSITIVE {
                let tol = 1e-8 * u.max(1.0);
                prop_assert!(g.derivative(v) >= u - tol, "q(p(u)) = {} < {}", g.derivative(v), u);
                prop_assert!(f.derivative(g.derivative(v)) >= v - 1e-8 * v.max(1.0));
            }
        }
    }
}
