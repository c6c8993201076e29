//! Modulars, Luxemburg and Orlicz (Amemiya) norms, the interval `K(f)`,
//! truncations and the threshold `theta(f)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::orlicz::{Family, OrliczFunction};
use crate::quad::{self, EndClass};
use crate::rearrange::{Element, FiniteSequence, Profile, Segment, StepFunction, Weight};
use crate::scalar::{self, SCALE_CAP_EXP};

/// Relative tolerance of the quadrature behind profile modulars.
pub const QUAD_REL: f64 = 1e-11;

/// Terms of a sequence profile summed directly before the integral test.
const N_DIRECT: f64 = 10_000.0;

/// `K(f) = [k*, k**]` and the common value of the Amemiya objective on it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KInterval {
    pub k_star: f64,
    pub k_star_star: f64,
    pub attained_norm: f64,
}

/// Orlicz norm together with the multiplier where the infimum was found.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Amemiya {
    pub norm: f64,
    pub k: f64,
}

/// `phi*(p(u))`, using the closed-form conjugate when there is one and
/// Young's equality `u p(u) - phi(u)` otherwise.
pub fn conjugate_at_derivative(phi: &OrliczFunction, u: f64) -> f64 {
    match phi.family() {
        Family::Power { .. } | Family::Exp | Family::Log => phi.conjugate().value(phi.derivative(u)),
        _ => (u * phi.derivative(u) - phi.value(u)).max(0.0),
    }
}

/// `sum phi(a_k) (W(c_k) - W(c_{k-1}))` over decreasing atoms.
pub fn rho_atoms(phi: &OrliczFunction, w: &Weight, atoms: &[(f64, f64)]) -> f64 {
    let mut c = 0.0;
    let mut total = 0.0;
    for &(v, m) in atoms {
        total += phi.value(v) * w.mass(c, c + m);
        c += m;
    }
    total
}

/// `rho_{phi,w}(f) = int phi(f*) w`; may be `+inf`.
pub fn rho_modular(phi: &OrliczFunction, w: &Weight, f: &Element) -> Result<f64> {
    f.check_against(w)?;
    match f {
        Element::Profile(p) => rho_profile(phi, w, p),
        _ => Ok(rho_atoms(phi, w, &f.decreasing_atoms().unwrap_or_default())),
    }
}

/// Pieces of a function segment between the weight's breakpoints.
fn weight_pieces(w: &Weight, seg: &Segment) -> Vec<(f64, f64)> {
    let mut cuts = vec![seg.s0];
    cuts.extend(w.breakpoints_in(seg.s0, seg.s1));
    cuts.push(seg.s1);
    cuts.windows(2).map(|c| (c[0], c[1])).collect()
}

fn rho_profile(phi: &OrliczFunction, w: &Weight, p: &Profile) -> Result<f64> {
    let shape = *p.shape();
    let mut total = 0.0;
    for seg in p.segments() {
        if p.is_sequence() {
            let direct_end = seg.s1.min(seg.s0 + N_DIRECT);
            let mut j = seg.s0 + 1.0;
            while j <= direct_end {
                total += phi.value(shape.value(j + seg.shift)) * w.seq_value(j);
                j += 1.0;
            }
            if seg.s1 > direct_end {
                let ln_g = |s: f64| phi.ln_value(shape.value(s + seg.shift)) + w.seq_continuous(s).ln();
                let s_ref = seg.shift.abs().max(direct_end);
                total += quad::integrate_ln(&ln_g, direct_end + 0.5, seg.s1 + 0.5, s_ref, QUAD_REL)?;
            }
        } else {
            for (a, b) in weight_pieces(w, &seg) {
                let ln_g = |s: f64| phi.ln_value(shape.value(s + seg.shift)) + w.density(s).ln();
                total += quad::integrate_ln(&ln_g, a, b, seg.shift.abs().max(1.0), QUAD_REL)?;
            }
        }
        if total.is_infinite() {
            return Ok(total);
        }
    }
    Ok(total)
}

/// Whether `rho(f)` is finite, decided from the power-law behaviour at the
/// infinite ends only.
pub fn rho_class(phi: &OrliczFunction, w: &Weight, f: &Element) -> Result<EndClass> {
    let p = match f {
        Element::Profile(p) => p,
        _ => return Ok(EndClass::Convergent),
    };
    let shape = *p.shape();
    for seg in p.segments() {
        let class = if p.is_sequence() {
            if seg.s1.is_finite() {
                EndClass::Convergent
            } else {
                let ln_g = |s: f64| phi.ln_value(shape.value(s + seg.shift)) + w.seq_continuous(s).ln();
                let start = seg.s0 + 1.0;
                quad::classify_range(&ln_g, start, seg.s1, seg.shift.abs().max(start))?
            }
        } else {
            let ln_g = |s: f64| phi.ln_value(shape.value(s + seg.shift)) + w.density(s).ln();
            quad::classify_range(&ln_g, seg.s0, seg.s1, seg.shift.abs().max(1.0))?
        };
        if class == EndClass::Divergent {
            return Ok(class);
        }
    }
    Ok(EndClass::Convergent)
}

/// A natural scale of the element: its largest value when that is finite.
fn sup_value(f: &Element) -> f64 {
    match f {
        Element::Profile(p) => p
            .pieces()
            .first()
            .map(|&(a, _)| p.shape().value(if p.is_sequence() { a } else { a.max(0.0) }))
            .filter(|v| v.is_finite() && *v > 0.0)
            .unwrap_or(1.0),
        _ => f
            .decreasing_atoms()
            .and_then(|a| a.first().map(|x| x.0))
            .unwrap_or(1.0),
    }
}

/// `inf { eps > 0 : modular(1/eps) <= 1 }` for a modular of the scaled
/// element `modular(k) = M(k f)`, nondecreasing in `k`.
pub fn gauge<M>(modular: M, seed: f64, rel: f64) -> Result<f64>
where
    M: Fn(f64) -> Result<f64>,
{
    let pred = |eps: f64| Ok(modular(1.0 / eps)? <= 1.0);
    match scalar::bracket_switch(seed, SCALE_CAP_EXP, pred)? {
        Some((lo, hi)) => Ok(scalar::try_bisect(lo, hi, rel, pred)?.1),
        None => Err(Error::Inconclusive(seed * 2f64.powi(-SCALE_CAP_EXP))),
    }
}

/// `||f|| = inf { eps : rho(f/eps) <= 1 }`.
pub fn luxemburg_norm(phi: &OrliczFunction, w: &Weight, f: &Element) -> Result<f64> {
    f.check_against(w)?;
    if f.is_zero() {
        return Ok(0.0);
    }
    let rel = if matches!(f, Element::Profile(_)) { 1e-11 } else { 0.0 };
    gauge(|k| rho_modular(phi, w, &f.scaled(k)), sup_value(f), rel)
}

/// Minimizes `(1 + modular(k)) / k` over `k > 0`, optionally inside a known
/// bracket.
pub fn amemiya_min<M>(modular: M, seed: f64, bracket: Option<(f64, f64)>) -> Result<Amemiya>
where
    M: Fn(f64) -> Result<f64>,
{
    let obj = |k: f64| Ok((1.0 + modular(k)?) / k);
    let (k, v) = match bracket {
        Some((a, b)) => {
            let plain = |k: f64| obj(k).unwrap_or(f64::INFINITY);
            let (k, v) = scalar::golden_min(plain, a, b, 400);
            // the ends of the bracket are exact minimizers when taken from K(f)
            let mut best = (k, v);
            for e in [a, b] {
                let ve = plain(e);
                if ve < best.1 {
                    best = (e, ve);
                }
            }
            best
        }
        None => scalar::minimize_positive(obj, seed)?,
    };
    Ok(Amemiya { norm: v, k })
}

/// `||f||^0 = inf_k (1 + rho(k f)) / k` with the minimizing `k`.
pub fn orlicz_norm_with_k(phi: &OrliczFunction, w: &Weight, f: &Element) -> Result<Amemiya> {
    f.check_against(w)?;
    if f.is_zero() {
        return Ok(Amemiya { norm: 0.0, k: 0.0 });
    }
    let modular = |k: f64| rho_modular(phi, w, &f.scaled(k));
    if phi.is_n_function() && !matches!(f, Element::Profile(_)) {
        let kk = k_interval(phi, w, f)?;
        let res = amemiya_min(modular, kk.k_star, Some((kk.k_star, kk.k_star_star)))?;
        if res.norm <= kk.attained_norm {
            return Ok(res);
        }
        return Ok(Amemiya {
            norm: kk.attained_norm,
            k: kk.k_star,
        });
    }
    let lux = luxemburg_norm(phi, w, f)?;
    amemiya_min(modular, 1.0 / lux, None)
}

/// The Orlicz norm in Amemiya form.
pub fn orlicz_norm_amemiya(phi: &OrliczFunction, w: &Weight, f: &Element) -> Result<f64> {
    Ok(orlicz_norm_with_k(phi, w, f)?.norm)
}

/// `G(k) = rho_{phi*,w}(p(k f))` over decreasing atoms.
pub fn conjugate_modular_of_derivative(phi: &OrliczFunction, w: &Weight, atoms: &[(f64, f64)], k: f64) -> f64 {
    let mut c = 0.0;
    let mut total = 0.0;
    for &(v, m) in atoms {
        total += conjugate_at_derivative(phi, k * v) * w.mass(c, c + m);
        c += m;
    }
    total
}

/// `K(f) = [k*, k**]` with `k* = inf { k : G(k) >= 1 }` and
/// `k** = sup { k : G(k) <= 1 }`.
pub fn k_interval(phi: &OrliczFunction, w: &Weight, f: &Element) -> Result<KInterval> {
    if !phi.is_n_function() {
        return Err(Error::NotNFunction("k_interval"));
    }
    f.check_against(w)?;
    let atoms = f
        .decreasing_atoms()
        .ok_or_else(|| Error::Unsupported("K(f) of a profile".into()))?;
    if atoms.is_empty() {
        return Err(Error::Invalid("K(f) is undefined for f = 0".into()));
    }
    let g = |k: f64| conjugate_modular_of_derivative(phi, w, &atoms, k);
    let seed = 1.0 / atoms[0].0;
    let (lo, hi) = scalar::bracket_switch(seed, SCALE_CAP_EXP, |k| Ok(g(k) >= 1.0))?
        .ok_or_else(|| Error::NotInSpace("G(k) >= 1 at every probed k".into()))?;
    let k_star = scalar::bisect(lo, hi, 0.0, |k| g(k) >= 1.0).1;
    let (lo, hi) = scalar::bracket_switch(k_star, SCALE_CAP_EXP, |k| Ok(g(k) > 1.0))?
        .ok_or_else(|| Error::NotInSpace("G(k) > 1 at every probed k".into()))?;
    let k_star_star = scalar::bisect(lo, hi, 0.0, |k| g(k) > 1.0).0.max(k_star);
    let attained_norm = (1.0 + rho_atoms(phi, w, &scaled_atoms(&atoms, k_star))) / k_star;
    Ok(KInterval {
        k_star,
        k_star_star,
        attained_norm,
    })
}

fn scaled_atoms(atoms: &[(f64, f64)], k: f64) -> Vec<(f64, f64)> {
    atoms.iter().map(|&(v, m)| (k * v, m)).collect()
}

/// The pairing `int f* p(k f*)` against the weight, and the same integral
/// against Lebesgue measure.
pub fn norm_pairing(phi: &OrliczFunction, w: &Weight, f: &Element, k: f64) -> Result<(f64, f64)> {
    f.check_against(w)?;
    let atoms = f
        .decreasing_atoms()
        .ok_or_else(|| Error::Unsupported("pairing of a profile".into()))?;
    let mut c = 0.0;
    let (mut weighted, mut plain) = (0.0, 0.0);
    for &(v, m) in &atoms {
        let t = v * phi.derivative(k * v);
        weighted += t * w.mass(c, c + m);
        plain += t * m;
        c += m;
    }
    Ok((weighted, plain))
}

/// `f_n`: the band `{1/n <= |f| <= n}` for functions, the first `n`
/// positions for sequences.
pub fn truncate(f: &Element, n: u64) -> Result<Element> {
    split_truncation(f, n).map(|(keep, _)| keep)
}

/// `f - f_n`.
pub fn truncation_remainder(f: &Element, n: u64) -> Result<Element> {
    split_truncation(f, n).map(|(_, rest)| rest)
}

fn split_truncation(f: &Element, n: u64) -> Result<(Element, Element)> {
    if n == 0 {
        return Err(Error::Domain("truncation index must be positive".into()));
    }
    let nf = n as f64;
    Ok(match f {
        Element::Step(s) => {
            let (keep, rest): (Vec<_>, Vec<_>) = s
                .atoms()
                .iter()
                .partition(|a| a.0.abs() >= 1.0 / nf && a.0.abs() <= nf);
            (
                Element::Step(StepFunction::new(keep)?),
                Element::Step(StepFunction::new(rest)?),
            )
        }
        Element::Sequence(x) => {
            let e = x.entries();
            let cut = e.len().min(n as usize);
            let mut rest = vec![0.0; cut];
            rest.extend_from_slice(&e[cut..]);
            (
                Element::Sequence(FiniteSequence::new(e[..cut].to_vec())?),
                Element::Sequence(FiniteSequence::new(rest)?),
            )
        }
        Element::Profile(p) => {
            let clip = |lo: f64, hi: f64| -> Vec<(f64, f64)> {
                p.pieces()
                    .iter()
                    .filter_map(|&(a, b)| {
                        let (a2, b2) = (a.max(lo), b.min(hi));
                        let ok = if p.is_sequence() { b2 >= a2 } else { b2 > a2 };
                        ok.then_some((a2, b2))
                    })
                    .collect()
            };
            if p.is_sequence() {
                (
                    Element::Profile(Profile::new(*p.shape(), clip(1.0, nf))?),
                    Element::Profile(Profile::new(*p.shape(), clip(nf + 1.0, f64::INFINITY))?),
                )
            } else {
                // f <= n from inverse(n) on, f >= 1/n up to inverse(1/n)
                let t_hi = p.shape().inverse(nf);
                if t_hi == 0.0 {
                    return Err(Error::Domain(format!(
                        "truncation at n = {n}: the set where f > n lies below the smallest positive double"
                    )));
                }
                let t_lo = p.shape().inverse(1.0 / nf);
                let mut rest = clip(0.0, t_hi);
                rest.extend(clip(t_lo, f64::INFINITY));
                (
                    Element::Profile(Profile::new(*p.shape(), clip(t_hi, t_lo))?),
                    Element::Profile(Profile::new(*p.shape(), rest)?),
                )
            }
        }
    })
}

/// `theta(f) = inf { lambda > 0 : rho(f / lambda) < inf }`.
///
/// Zero for finite elements. For profiles the finiteness of the modular is
/// decided by the power-law classifier; an inconclusive answer is accepted
/// once the bracket is within one percent.
pub fn theta(phi: &OrliczFunction, w: &Weight, f: &Element) -> Result<f64> {
    f.check_against(w)?;
    if !matches!(f, Element::Profile(_)) || f.is_zero() {
        return Ok(0.0);
    }
    let finite = |lambda: f64| Ok(rho_class(phi, w, &f.scaled(1.0 / lambda))? == EndClass::Convergent);
    let (mut lo, mut hi) = match scalar::bracket_switch(1.0, SCALE_CAP_EXP, finite)? {
        Some(b) => b,
        None => return Ok(0.0),
    };
    for _ in 0..200 {
        if hi - lo <= 1e-12 * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        match finite(mid) {
            Ok(true) => hi = mid,
            Ok(false) => lo = mid,
            Err(Error::Inconclusive(_)) if hi - lo <= 0.01 * hi => return Ok(mid),
            Err(e) => return Err(e),
        }
    }
    Ok(hi)
}

/// `||f||^0` from below: the supremum of `sum f*(i) g(i) w(i)` over
/// decreasing `g >= 0` with `rho_{phi*,w}(g) <= 1`, searched directly.
/// Meant for short sequences.
pub fn orlicz_norm_dual_sup_oracle(phi: &OrliczFunction, w: &Weight, f: &FiniteSequence) -> Result<f64> {
    if !w.is_sequence() {
        return Err(Error::Invalid("the dual supremum oracle works on sequences".into()));
    }
    let fs = f.rearranged();
    let ws: Vec<f64> = (1..=fs.entries().len()).map(|i| w.seq_value(i as f64)).collect();
    let c: Vec<f64> = fs.entries().iter().zip(&ws).map(|(a, b)| a * b).collect();
    Ok(crate::oracle::ratio_ascent(&c, &phi.conjugate(), &ws, 8, 0x5eed).value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rearrange::Shape;
    use proptest::prelude::*;
    use std::f64::consts::SQRT_2;

    fn half_square() -> OrliczFunction {
        OrliczFunction::power(2.0, 0.5).unwrap()
    }

    fn unit10() -> Weight {
        Weight::constant(Some(10.0))
    }

    #[test]
    fn rho_examples() {
        let f = Element::indicator(1.0);
        assert_eq!(rho_modular(&half_square(), &unit10(), &f).unwrap(), 0.5);
        let z = Element::step(vec![]).unwrap();
        assert_eq!(rho_modular(&half_square(), &unit10(), &z).unwrap(), 0.0);
    }

    #[test]
    fn rho_of_log_tail_matches_substitution() {
        // int_0^inf phi(ln(1 + 1/t)/2) dt with t = e^-y ... computed on the
        // variable u = ln(1 + 1/t), t = 1/(e^u - 1), dt = e^u/(e^u - 1)^2 du
        let phi = OrliczFunction::exp_type();
        let w = Weight::constant(None);
        let f = Element::Profile(Profile::full(Shape::LogTail { c: 0.5 }).unwrap());
        let got = rho_modular(&phi, &w, &f).unwrap();
        let g = |u: f64| {
            let e = u.exp_m1();
            phi.value(0.5 * u) * (e + 1.0) / (e * e)
        };
        let mut want = quad::adaptive(&g, 1e-9, 80.0, 0.0, 1e-13);
        // small-u end: phi(u/2) ~ u^2/8, dt ~ du/u^2
        want += 1e-9 / 8.0;
        assert!((got - want).abs() < 1e-8 * want, "{got} vs {want}");
        // with lambda = 1 the singularity at zero is not integrable
        let f1 = Element::Profile(Profile::full(Shape::LogTail { c: 1.0 }).unwrap());
        assert!(rho_modular(&phi, &w, &f1).unwrap().is_infinite());
    }

    #[test]
    fn luxemburg_examples() {
        let f = Element::indicator(1.0);
        let n = luxemburg_norm(&half_square(), &unit10(), &f).unwrap();
        assert!((n - 1.0 / SQRT_2).abs() < 1e-15);
        let n2 = luxemburg_norm(&half_square(), &unit10(), &f.scaled(2.0)).unwrap();
        assert!((n2 - SQRT_2).abs() < 1e-15);
        let z = Element::step(vec![]).unwrap();
        assert_eq!(luxemburg_norm(&half_square(), &unit10(), &z).unwrap(), 0.0);
    }

    #[test]
    fn amemiya_examples() {
        let f = Element::indicator(1.0);
        let a = orlicz_norm_with_k(&half_square(), &unit10(), &f).unwrap();
        assert!((a.norm - SQRT_2).abs() < 1e-15);
        assert!((a.k - SQRT_2).abs() < 1e-12);
        let sq = OrliczFunction::power(2.0, 1.0).unwrap();
        let a = orlicz_norm_with_k(&sq, &unit10(), &f).unwrap();
        assert!((a.norm - 2.0).abs() < 1e-15);
        assert!((a.k - 1.0).abs() < 1e-12);
        let z = Element::step(vec![]).unwrap();
        assert_eq!(orlicz_norm_amemiya(&sq, &unit10(), &z).unwrap(), 0.0);
    }

    #[test]
    fn k_interval_examples() {
        let f = Element::indicator(1.0);
        let k = k_interval(&half_square(), &unit10(), &f).unwrap();
        assert!((k.k_star - SQRT_2).abs() < 1e-12);
        assert!((k.k_star_star - SQRT_2).abs() < 1e-12);
        assert!((k.attained_norm - SQRT_2).abs() < 1e-12);
        let (weighted, plain) = norm_pairing(&half_square(), &unit10(), &f, k.k_star).unwrap();
        assert!((weighted - SQRT_2).abs() < 1e-12 && (plain - SQRT_2).abs() < 1e-12);
        let k2 = k_interval(&half_square(), &unit10(), &f.scaled(2.0)).unwrap();
        assert!((k2.k_star - k.k_star / 2.0).abs() < 1e-12);
        assert!(k_interval(&half_square(), &unit10(), &Element::step(vec![]).unwrap()).is_err());
        let tab = OrliczFunction::tabulated(vec![(1.0, 1.0), (2.0, 3.0)]).unwrap();
        assert!(matches!(k_interval(&tab, &unit10(), &f), Err(Error::NotNFunction(_))));
    }

    #[test]
    fn truncation_examples() {
        let f = Element::step(vec![(3.0, 1.0), (0.2, 1.0)]).unwrap();
        assert!(truncate(&f, 2).unwrap().is_zero());
        assert_eq!(truncation_remainder(&f, 2).unwrap(), f);
        let x = Element::sequence(vec![5.0, 4.0, 3.0]).unwrap();
        assert_eq!(truncate(&x, 2).unwrap(), Element::sequence(vec![5.0, 4.0]).unwrap());
        assert_eq!(
            truncation_remainder(&x, 2).unwrap(),
            Element::sequence(vec![0.0, 0.0, 3.0]).unwrap()
        );
        let tail = Element::Profile(Profile::full(Shape::LogTail { c: 1.0 }).unwrap());
        match truncate(&tail, 2).unwrap() {
            Element::Profile(p) => {
                let (a, b) = p.pieces()[0];
                assert!(((1.0 / a).ln_1p() - 2.0).abs() < 1e-14);
                assert!(((1.0 / b).ln_1p() - 0.5).abs() < 1e-14);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn theta_examples() {
        let phi = OrliczFunction::exp_type();
        let w = Weight::constant(None);
        assert_eq!(theta(&phi, &w, &Element::indicator(3.0)).unwrap(), 0.0);
        let tail = Element::Profile(Profile::full(Shape::LogTail { c: 1.0 }).unwrap());
        let t = theta(&phi, &w, &tail).unwrap();
        assert!((t - 1.0).abs() < 1e-5, "{t}");
        assert!(rho_modular(&phi, &w, &tail.scaled(1.0 / 1.1)).unwrap().is_finite());
        assert!(rho_modular(&phi, &w, &tail.scaled(1.0 / 0.9)).unwrap().is_infinite());
        // exponents compared directly: phi(f/lambda) ~ t^(-1/lambda) near 0
        for (lambda, finite) in [(0.9, false), (1.1, true)] {
            assert_eq!(1.0 / lambda < 1.0, finite);
        }
    }

    #[test]
    fn theta_of_sequence_tail() {
        // exp(-lambda ln(i + 1)/c) = (i + 1)^(-lambda/c) is summable iff lambda > c
        let phi = OrliczFunction::non_delta2_zero();
        let w = Weight::sequence_constant(1.0).unwrap();
        let x = Element::Profile(Profile::full(Shape::SeqLog { c: 0.05 }).unwrap());
        let t = theta(&phi, &w, &x).unwrap();
        assert!((t - 0.05).abs() < 1e-6, "{t}");
    }

    #[test]
    fn amemiya_is_flat_on_k_interval() {
        let phi = OrliczFunction::exp_type();
        let w = Weight::step(vec![(0.5, 3.0), (1.0, 1.0)], None).unwrap();
        let f = Element::step(vec![(2.0, 0.3), (0.5, 1.0)]).unwrap();
        let k = k_interval(&phi, &w, &f).unwrap();
        let a = |k: f64| (1.0 + rho_modular(&phi, &w, &f.scaled(k)).unwrap()) / k;
        let n = orlicz_norm_amemiya(&phi, &w, &f).unwrap();
        for kk in [k.k_star, 0.5 * (k.k_star + k.k_star_star), k.k_star_star] {
            assert!((a(kk) - n).abs() <= 1e-9 * n);
        }
        assert!(a(k.k_star / 2.0) > n && a(2.0 * k.k_star_star) > n);
        let (weighted, _) = norm_pairing(&phi, &w, &f, k.k_star).unwrap();
        assert!((weighted - n).abs() <= 1e-8 * n);
    }

    fn families() -> Vec<OrliczFunction> {
        vec![
            OrliczFunction::power(2.5, 0.7).unwrap(),
            OrliczFunction::exp_type(),
            OrliczFunction::log_type(),
        ]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn sandwich_and_unit_ball(
            atoms in prop::collection::vec((-4.0f64..4.0, 0.05f64..2.0), 1..6),
            fam in 0usize..3,
        ) {
            let phi = &families()[fam];
            let w = Weight::step(vec![(0.5, 2.0), (1.0, 1.0), (2.0, 0.5)], None).unwrap();
            let f = Element::step(atoms).unwrap();
            prop_assume!(!f.is_zero());
            let lux = luxemburg_norm(phi, &w, &f).unwrap();
            let orl = orlicz_norm_amemiya(phi, &w, &f).unwrap();
            prop_assert!(lux <= orl * (1.0 + 1e-12));
            prop_assert!(orl <= 2.0 * lux * (1.0 + 1e-12));
            prop_assert!(rho_modular(phi, &w, &f.scaled(1.0 / lux)).unwrap() <= 1.0 + 1e-12);
            prop_assert!(rho_modular(phi, &w, &f.scaled(1.0 / (lux * (1.0 - 1e-9)))).unwrap() > 1.0);
        }

        #[test]
        fn disjoint_subadditivity(
            a in prop::collection::vec((0.1f64..4.0, 0.05f64..1.0), 1..4),
            b in prop::collection::vec((0.1f64..4.0, 0.05f64..1.0), 1..4),
            fam in 0usize..3,
        ) {
            let phi = &families()[fam];
            let w = Weight::step(vec![(0.5, 2.0), (1.0, 1.0)], None).unwrap();
            let f = Element::step(a.clone()).unwrap();
            let g = Element::step(b.clone()).unwrap();
            let fg = Element::step(a.into_iter().chain(b).collect()).unwrap();
            let lhs = rho_modular(phi, &w, &fg).unwrap();
            let rhs = rho_modular(phi, &w, &f).unwrap() + rho_modular(phi, &w, &g).unwrap();
            prop_assert!(lhs <= rhs * (1.0 + 1e-12));
        }

        #[test]
        fn norms_are_rearrangement_invariant(
            atoms in prop::collection::vec((-4.0f64..4.0, 0.05f64..2.0), 1..6),
            fam in 0usize..3,
        ) {
            let phi = &families()[fam];
            let w = Weight::step(vec![(1.0, 2.0), (1.0, 1.0)], None).unwrap();
            let f = Element::step(atoms.clone()).unwrap();
            prop_assume!(!f.is_zero());
            let mut rev = atoms;
            rev.reverse();
            let g = Element::step(rev.into_iter().map(|(v, m)| (-v, m)).collect()).unwrap();
            prop_assert_eq!(luxemburg_norm(phi, &w, &f).unwrap(), luxemburg_norm(phi, &w, &g).unwrap());
            prop_assert_eq!(orlicz_norm_amemiya(phi, &w, &f).unwrap(), orlicz_norm_amemiya(phi, &w, &g).unwrap());
        }

        #[test]
        fn dual_sup_oracle_matches_amemiya(
            x in prop::collection::vec(0.0f64..4.0, 1..9),
            fam in 0usize..3,
        ) {
            let phi = &families()[fam];
            let w = Weight::new(crate::rearrange::WeightKind::SeqHarmonic).unwrap();
            let f = FiniteSequence::new(x).unwrap();
            let e = Element::Sequence(f.clone());
            prop_assume!(!e.is_zero());
            let a = orlicz_norm_amemiya(phi, &w, &e).unwrap();
            let o = orlicz_norm_dual_sup_oracle(phi, &w, &f).unwrap();
            prop_assert!(o <= a * (1.0 + 1e-9), "{} > {}", o, a);
            prop_assert!(o >= a * (1.0 - 1e-4), "{} << {}", o, a);
        }
    }

    #[test]
    fn dual_sup_oracle_examples() {
        let w = Weight::sequence_constant(1.0).unwrap();
        let e1 = FiniteSequence::new(vec![1.0, 0.0, 0.0]).unwrap();
        let o = orlicz_norm_dual_sup_oracle(&half_square(), &w, &e1).unwrap();
        assert!((o - SQRT_2).abs() < 1e-9, "{o}");
        let z = FiniteSequence::new(vec![0.0; 3]).unwrap();
        assert_eq!(orlicz_norm_dual_sup_oracle(&half_square(), &w, &z).unwrap(), 0.0);
    }

    #[test]
    fn truncation_refuses_unrepresentable_bands() {
        let f = Element::Profile(Profile::full(Shape::LogTail { c: 1.0 }).unwrap());
        assert!(truncation_remainder(&f, 512).is_ok());
        assert!(matches!(truncation_remainder(&f, 1024), Err(Error::Domain(_))));
    }
}
