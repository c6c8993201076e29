//! The dual modular `P_{phi,w}`, the dual Luxemburg and Orlicz norms, the
//! Young witness, both formulas for the norm of a functional with a
//! singular part, and the non-M-ideal witness.
//!
//! A singular functional never appears as an object: it enters every
//! formula only through its norm, the scalar `s >= 0`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::level::{level_of_atoms, Faults, LevelDecomposition};
use crate::norms::{self, gauge};
use crate::orlicz::OrliczFunction;
use crate::oracle;
use crate::rearrange::{Element, FiniteSequence, StepFunction, Weight, WeightKind};
use crate::scalar::{self, SCALE_CAP_EXP};

/// Decomposition of `h*` used by every dual quantity.
fn decompose(w: &Weight, h: &Element, faults: Faults) -> Result<LevelDecomposition> {
    h.check_against(w)?;
    let atoms = h
        .decreasing_atoms()
        .ok_or_else(|| Error::Unsupported("dual modular of a profile".into()))?;
    Ok(level_of_atoms(&atoms, w, faults))
}

/// `sum_j F(k R_j) W(a_j, b_j)`: the dual modular of `k h` read off a
/// level decomposition of `h*`.
fn p_from_levels(f: &OrliczFunction, dec: &LevelDecomposition, k: f64) -> f64 {
    dec.intervals
        .iter()
        .map(|iv| f.value(k * iv.ratio) * iv.weight_mass)
        .sum()
}

/// `P_{F,w}(h) = int F((h*)^0 / w) w`.
pub fn p_modular(f: &OrliczFunction, w: &Weight, h: &Element) -> Result<f64> {
    p_modular_with(f, w, h, Faults::default())
}

/// [`p_modular`] with injectable faults in the level computation.
pub fn p_modular_with(f: &OrliczFunction, w: &Weight, h: &Element, faults: Faults) -> Result<f64> {
    if !f.is_n_function() {
        return Err(Error::NotNFunction("P_modular"));
    }
    let dec = decompose(w, h, faults)?;
    Ok(p_from_levels(f, &dec, 1.0))
}

/// Direct minimization of `sum F(h*_i / v_i) v_i` over `v` submajorized
/// by `w`, for a short finite sequence.
pub fn p_modular_oracle(f: &OrliczFunction, w: &Weight, h: &FiniteSequence, seed: u64) -> Result<f64> {
    if !w.is_sequence() {
        return Err(Error::Invalid("the dual modular oracle works on sequences".into()));
    }
    let hs = h.rearranged();
    let e = hs.entries();
    let ws: Vec<f64> = (1..=e.len()).map(|i| w.seq_value(i as f64)).collect();
    Ok(oracle::p_modular_oracle(f, e, &ws, 8, seed).value)
}

/// `||h||_M = inf { eps : P(h/eps) <= 1 }`.
pub fn dual_luxemburg_norm(f: &OrliczFunction, w: &Weight, h: &Element) -> Result<f64> {
    if !f.is_n_function() {
        return Err(Error::NotNFunction("dual_luxemburg_norm"));
    }
    let dec = decompose(w, h, Faults::default())?;
    dual_lux_of(f, &dec)
}

fn dual_lux_of(f: &OrliczFunction, dec: &LevelDecomposition) -> Result<f64> {
    let top = match dec.intervals.first() {
        Some(iv) => iv.ratio,
        None => return Ok(0.0),
    };
    gauge(|k| Ok(p_from_levels(f, dec, k)), top, 0.0)
}

/// `||h||_M^0 = inf_k (1 + P(k h)) / k`.
pub fn dual_orlicz_norm(f: &OrliczFunction, w: &Weight, h: &Element) -> Result<f64> {
    if !f.is_n_function() {
        return Err(Error::NotNFunction("dual_orlicz_norm"));
    }
    let dec = decompose(w, h, Faults::default())?;
    dual_orlicz_of(f, &dec)
}

fn dual_orlicz_of(f: &OrliczFunction, dec: &LevelDecomposition) -> Result<f64> {
    if dec.intervals.is_empty() {
        return Ok(0.0);
    }
    let lux = dual_lux_of(f, dec)?;
    Ok(norms::amemiya_min(|k| Ok(p_from_levels(f, dec, k)), 1.0 / lux, None)?.norm)
}

/// Both sides of the two Young-witness identities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WitnessDiagnostics {
    /// `P_{phi*,w}(h)` by the level formula.
    pub p_level: f64,
    /// `int phi*(h/v) v`.
    pub p_witness: f64,
    /// `int phi(q(h/v)) v`.
    pub young_v: f64,
    /// `int phi(q(h/v)*) w`.
    pub young_w: f64,
}

impl WitnessDiagnostics {
    pub fn first_rel_err(&self) -> f64 {
        rel_err(self.p_level, self.p_witness)
    }

    pub fn second_rel_err(&self) -> f64 {
        rel_err(self.young_v, self.young_w)
    }
}

fn rel_err(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

/// A simple `v` realizing the infimum in the dual modular of `h`.
#[derive(Debug, Clone, PartialEq)]
pub struct YoungWitness {
    /// `h*` as decreasing atoms.
    pub h: StepFunction,
    /// `v`, atom by atom alongside `h`.
    pub v: StepFunction,
    pub diagnostics: WitnessDiagnostics,
}

/// Builds `v = (W_j / H_j) h` on each maximal level interval of `h*` and
/// evaluates both identities.
pub fn young_witness(phi: &OrliczFunction, w: &Weight, h: &StepFunction) -> Result<YoungWitness> {
    if !phi.is_n_function() {
        return Err(Error::NotNFunction("young_witness"));
    }
    if h.atoms().iter().any(|a| a.0 <= 0.0) {
        return Err(Error::Invalid(
            "witness input must be strictly positive on its declared support".into(),
        ));
    }
    let conj = phi.conjugate();
    let elem = Element::Step(h.clone());
    let dec = decompose(w, &elem, Faults::default())?;
    let mut v_atoms = Vec::with_capacity(dec.source.len());
    let (mut p_witness, mut young_v) = (0.0, 0.0);
    let mut q_atoms = Vec::with_capacity(dec.source.len());
    for iv in &dec.intervals {
        for &(a, m) in &dec.source[iv.first_atom..=iv.last_atom] {
            let v = iv.weight_mass / iv.mass * a;
            v_atoms.push((v, m));
            let ratio = a / v;
            p_witness += conj.value(ratio) * v * m;
            let q = conj.derivative(ratio);
            young_v += phi.value(q) * v * m;
            q_atoms.push((q, m));
        }
    }
    let q_elem = Element::step(q_atoms)?;
    let young_w = norms::rho_modular(phi, w, &q_elem)?;
    Ok(YoungWitness {
        h: StepFunction::new(dec.source.clone())?,
        v: StepFunction::new(v_atoms)?,
        diagnostics: WitnessDiagnostics {
            p_level: p_from_levels(&conj, &dec, 1.0),
            p_witness,
            young_v,
            young_w,
        },
    })
}

/// The two evaluations of the norm of `H + S` for a functional with regular
/// part `h` and singular part of norm `s`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionalNormReport {
    pub h: Element,
    pub s: f64,
    /// `||h||^0_{M_{phi*}} + s`, the norm dual to the Luxemburg norm.
    pub lux_side_norm: f64,
    /// `inf { lambda : P_{phi*}(h/lambda) + s/lambda <= 1 }`, the norm dual
    /// to the Orlicz norm.
    pub orlicz_side_norm: f64,
    /// `||h||_{M_{phi*}} + s`.
    pub additive_sum: f64,
    /// `additive_sum - orlicz_side_norm`.
    pub gap: f64,
}

fn check_s(s: f64) -> Result<()> {
    if s.is_finite() && s >= 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("singular norm must be finite and >= 0, got {s}")))
    }
}

/// Norm of the functional on the Luxemburg-normed space.
pub fn functional_norm_luxemburg_side(phi: &OrliczFunction, w: &Weight, h: &Element, s: f64) -> Result<f64> {
    check_s(s)?;
    Ok(dual_orlicz_norm(&phi.conjugate(), w, h)? + s)
}

/// Norm of the functional on the Orlicz-normed space.
pub fn functional_norm_orlicz_side(phi: &OrliczFunction, w: &Weight, h: &Element, s: f64) -> Result<f64> {
    check_s(s)?;
    let conj = phi.conjugate();
    if !conj.is_n_function() {
        return Err(Error::NotNFunction("functional_norm_orlicz_side"));
    }
    let dec = decompose(w, h, Faults::default())?;
    orlicz_side_of(&conj, &dec, s)
}

fn orlicz_side_of(conj: &OrliczFunction, dec: &LevelDecomposition, s: f64) -> Result<f64> {
    let top = dec.intervals.first().map_or(0.0, |iv| iv.ratio);
    if top == 0.0 {
        return Ok(s);
    }
    let pred = |lambda: f64| Ok(p_from_levels(conj, dec, 1.0 / lambda) + s / lambda <= 1.0);
    let (lo, hi) = match scalar::bracket_switch(top + s, SCALE_CAP_EXP, pred) {
        Ok(Some(b)) => b,
        Ok(None) => return Err(Error::Inconclusive(0.0)),
        Err(Error::NotInSpace(m)) => return Err(Error::NotInDual(m)),
        Err(e) => return Err(e),
    };
    Ok(scalar::try_bisect(lo, hi, 0.0, pred)?.1)
}

/// Both functional norms for `(h, s)` with their comparison.
pub fn functional_norm_report(phi: &OrliczFunction, w: &Weight, h: &Element, s: f64) -> Result<FunctionalNormReport> {
    check_s(s)?;
    let conj = phi.conjugate();
    if !conj.is_n_function() {
        return Err(Error::NotNFunction("functional_norm_report"));
    }
    let dec = decompose(w, h, Faults::default())?;
    let lux_side_norm = dual_orlicz_of(&conj, &dec)? + s;
    let orlicz_side_norm = orlicz_side_of(&conj, &dec, s)?;
    let additive_sum = dual_lux_of(&conj, &dec)? + s;
    Ok(FunctionalNormReport {
        h: h.clone(),
        s,
        lux_side_norm,
        orlicz_side_norm,
        additive_sum,
        gap: additive_sum - orlicz_side_norm,
    })
}

/// Outcome of the non-M-ideal construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub report: FunctionalNormReport,
    /// Height parameter actually used (re-solved for sequences).
    pub u: f64,
    /// `W(t0) = 1 / phi*(u / (1 - s))`.
    pub t0: f64,
    pub p_modular: f64,
    pub dual_luxemburg: f64,
    /// `||h||_M = 1 - s` within tolerance.
    pub dual_norm_ok: bool,
    /// `P(h) < 1 - s`.
    pub p_strict: bool,
    /// `orlicz_side_norm < 1 = ||h||_M + s`.
    pub orlicz_strict: bool,
}

/// Builds `h = u w chi_(0, t0)` and evaluates both functional norms of
/// `h + S` with `||S|| = s`. For `s > 0` the Orlicz-side norm falls short
/// of `||h||_M + s = 1`, so norms do not add across the decomposition.
pub fn non_m_ideal_witness(phi: &OrliczFunction, w: &Weight, s: f64, u: f64) -> Result<WitnessReport> {
    if !phi.is_n_function() {
        return Err(Error::NotNFunction("non_m_ideal_witness"));
    }
    if !(0.0..1.0).contains(&s) {
        return Err(Error::Domain(format!("singular norm must lie in [0, 1), got {s}")));
    }
    if !(u.is_finite() && u > 0.0) {
        return Err(Error::Domain(format!("u must be finite and > 0, got {u}")));
    }
    let conj = phi.conjugate();
    let w_gamma = w.cum(w.gamma());
    if conj.value(u) <= 1.0 / w_gamma {
        return Err(Error::Infeasible(format!(
            "phi*(u) = {} does not exceed 1/W(gamma) = {}",
            conj.value(u),
            1.0 / w_gamma
        )));
    }
    let target = 1.0 / conj.value(u / (1.0 - s));
    let (h, u_used, t0) = match w.kind() {
        WeightKind::Step { pieces, .. } => {
            let t0 = w
                .inverse_cumulative(target)
                .ok_or_else(|| Error::Infeasible("W(t0) target beyond W(gamma)".into()))?;
            let mut atoms = Vec::new();
            let mut start = 0.0;
            for &(len, level) in pieces {
                let end = (start + len).min(t0);
                if end > start {
                    atoms.push((u * level, end - start));
                }
                start += len;
            }
            if t0 > start {
                atoms.push((u * pieces[pieces.len() - 1].1, t0 - start));
            }
            (Element::step(atoms)?, u, t0)
        }
        WeightKind::Power { .. } => {
            return Err(Error::Unsupported(
                "witness for a power weight (u w chi is not a step function)".into(),
            ))
        }
        _ => {
            // smallest n with W(n) >= target, then u re-solved so W(n) is exact
            let t = w
                .inverse_cumulative(target)
                .ok_or_else(|| Error::Infeasible("W(t0) target beyond W(gamma)".into()))?;
            let n = t.ceil().max(1.0);
            let y = 1.0 / w.cum(n);
            let (lo, hi) = scalar::bracket_switch(1.0, SCALE_CAP_EXP, |v| Ok(conj.value(v) >= y))?
                .ok_or_else(|| Error::Infeasible("phi* does not reach 1/W(n)".into()))?;
            let v = scalar::bisect(lo, hi, 0.0, |v| conj.value(v) >= y).1;
            let u2 = (1.0 - s) * v;
            let entries = (1..=n as u64).map(|i| u2 * w.seq_value(i as f64)).collect();
            (Element::sequence(entries)?, u2, n)
        }
    };
    let report = functional_norm_report(phi, w, &h, s)?;
    let p = p_modular(&conj, w, &h)?;
    let dual = dual_luxemburg_norm(&conj, w, &h)?;
    let tol = 1e-9;
    Ok(WitnessReport {
        dual_norm_ok: (dual - (1.0 - s)).abs() <= tol,
        p_strict: p < 1.0 - s,
        orlicz_strict: report.orlicz_side_norm < 1.0,
        report,
        u: u_used,
        t0,
        p_modular: p,
        dual_luxemburg: dual,
    })
}

/// Pairing and the two Hölder bounds from the duality of the spaces.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HolderReport {
    /// `int f* h*`.
    pub pairing: f64,
    /// `||f|| ||h||^0_M`.
    pub bound_lux_orlicz: f64,
    /// `||f||^0 ||h||_M`.
    pub bound_orlicz_lux: f64,
    pub ok: bool,
}

/// `int f* h*` for finite elements.
pub fn rearranged_pairing(f: &Element, h: &Element) -> Result<f64> {
    let a = f
        .decreasing_atoms()
        .ok_or_else(|| Error::Unsupported("pairing of a profile".into()))?;
    let b = h
        .decreasing_atoms()
        .ok_or_else(|| Error::Unsupported("pairing of a profile".into()))?;
    let (mut i, mut j) = (0, 0);
    let (mut ra, mut rb) = (a.first().map_or(0.0, |x| x.1), b.first().map_or(0.0, |x| x.1));
    let mut total = 0.0;
    while i < a.len() && j < b.len() {
        let m = ra.min(rb);
        total += a[i].0 * b[j].0 * m;
        ra -= m;
        rb -= m;
        if ra <= 0.0 {
            i += 1;
            ra = a.get(i).map_or(0.0, |x| x.1);
        }
        if rb <= 0.0 {
            j += 1;
            rb = b.get(j).map_or(0.0, |x| x.1);
        }
    }
    Ok(total)
}

/// Checks `int f* h* <= ||f|| ||h||^0_M` and `<= ||f||^0 ||h||_M`.
pub fn holder_check(phi: &OrliczFunction, w: &Weight, f: &Element, h: &Element) -> Result<HolderReport> {
    let conj = phi.conjugate();
    let pairing = rearranged_pairing(f, h)?;
    let bound_lux_orlicz = norms::luxemburg_norm(phi, w, f)? * dual_orlicz_norm(&conj, w, h)?;
    let bound_orlicz_lux = norms::orlicz_norm_amemiya(phi, w, f)? * dual_luxemburg_norm(&conj, w, h)?;
    let slack = |b: f64| 1e-10 * b.max(1.0);
    Ok(HolderReport {
        pairing,
        bound_lux_orlicz,
        bound_orlicz_lux,
        ok: pairing <= bound_lux_orlicz + slack(bound_lux_orlicz)
            && pairing <= bound_orlicz_lux + slack(bound_orlicz_lux),
    })
}

/// Best pairing `sum g h*` found by search over decreasing `g` with
/// `||g|| <= 1` in the Luxemburg norm, for a short sequence `h`.
pub fn holder_attainment(phi: &OrliczFunction, w: &Weight, h: &FiniteSequence, seed: u64) -> Result<f64> {
    if !w.is_sequence() {
        return Err(Error::Invalid("the attainment search works on sequences".into()));
    }
    let hs = h.rearranged();
    let e = hs.entries();
    let ws: Vec<f64> = (1..=e.len()).map(|i| w.seq_value(i as f64)).collect();
    Ok(oracle::ratio_ascent(e, phi, &ws, 8, seed).value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn half_square() -> OrliczFunction {
        OrliczFunction::power(2.0, 0.5).unwrap()
    }

    fn unit10() -> Weight {
        Weight::constant(Some(10.0))
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
    }

    #[test]
    fn p_modular_examples() {
        let w = Weight::step(vec![(1.0, 4.0), (1.0, 1.0)], None).unwrap();
        let h = Element::step(vec![(4.0, 1.0), (3.0, 1.0)]).unwrap();
        assert!(close(p_modular(&half_square(), &w, &h).unwrap(), 4.9, 1e-15));
        let z = Element::step(vec![]).unwrap();
        assert_eq!(p_modular(&half_square(), &w, &z).unwrap(), 0.0);
        let h = Element::indicator(0.5);
        assert!(close(p_modular(&half_square(), &unit10(), &h).unwrap(), 0.25, 1e-15));
        let tab = OrliczFunction::tabulated(vec![(1.0, 1.0)]).unwrap();
        assert!(p_modular(&tab, &unit10(), &h).is_err());
    }

    #[test]
    fn oracle_examples() {
        let w = Weight::new(WeightKind::SeqExplicit { values: vec![2.0, 1.0] }).unwrap();
        let h = FiniteSequence::new(vec![1.0, 1.0]).unwrap();
        let o = p_modular_oracle(&half_square(), &w, &h, 1).unwrap();
        assert!(close(o, 2.0 / 3.0, 1e-12));
        let p = p_modular(&half_square(), &w, &Element::Sequence(h)).unwrap();
        assert!(close(o, p, 1e-12));
    }

    #[test]
    fn dual_norm_examples() {
        let h = Element::indicator(0.5);
        let f = half_square();
        assert!(close(dual_luxemburg_norm(&f, &unit10(), &h).unwrap(), 0.5, 1e-15));
        assert!(close(dual_luxemburg_norm(&f, &unit10(), &h.scaled(2.0)).unwrap(), 1.0, 1e-15));
        assert!(close(dual_orlicz_norm(&f, &unit10(), &h).unwrap(), 1.0, 1e-14));
        let z = Element::step(vec![]).unwrap();
        assert_eq!(dual_luxemburg_norm(&f, &unit10(), &z).unwrap(), 0.0);
        assert_eq!(dual_orlicz_norm(&f, &unit10(), &z).unwrap(), 0.0);
    }

    #[test]
    fn young_witness_examples() {
        let f = half_square();
        let w = Weight::step(vec![(1.0, 4.0), (1.0, 1.0)], None).unwrap();
        let yw = young_witness(&f, &w, &StepFunction::new(vec![(4.0, 1.0), (3.0, 1.0)]).unwrap()).unwrap();
        assert!(close(yw.v.atoms()[0].0, 20.0 / 7.0, 1e-15));
        assert!(close(yw.v.atoms()[1].0, 15.0 / 7.0, 1e-15));
        assert!(close(yw.diagnostics.p_level, 4.9, 1e-15));
        assert!(yw.diagnostics.first_rel_err() < 1e-14);
        assert!(yw.diagnostics.second_rel_err() < 1e-14);

        // one atom: v = (W(m)/m) chi_A and P = phi*(a m / W(m)) W(m)
        let (a, m) = (2.5, 0.7);
        let w = Weight::step(vec![(0.3, 2.0), (1.0, 1.0)], None).unwrap();
        let yw = young_witness(&f, &w, &StepFunction::new(vec![(a, m)]).unwrap()).unwrap();
        let wm = w.cum(m);
        assert!(close(yw.v.atoms()[0].0, wm / m, 1e-15));
        assert!(close(yw.diagnostics.p_level, f.conjugate().value(a * m / wm) * wm, 1e-14));

        let yw = young_witness(&f, &unit10(), &StepFunction::new(vec![]).unwrap()).unwrap();
        assert_eq!(yw.diagnostics.p_level, 0.0);
        assert_eq!(yw.diagnostics.young_w, 0.0);
        assert!(young_witness(&f, &unit10(), &StepFunction::new(vec![(0.0, 1.0)]).unwrap()).is_err());
    }

    #[test]
    fn functional_norm_examples() {
        let f = half_square();
        let h = Element::indicator(0.5);
        assert!(close(functional_norm_luxemburg_side(&f, &unit10(), &h, 0.5).unwrap(), 1.5, 1e-14));
        let z = Element::step(vec![]).unwrap();
        assert!(close(functional_norm_luxemburg_side(&f, &unit10(), &z, 0.3).unwrap(), 0.3, 1e-15));
        let want = (0.5 + 1.25f64.sqrt()) / 2.0;
        assert!(close(functional_norm_orlicz_side(&f, &unit10(), &h, 0.5).unwrap(), want, 1e-15));
        assert!(close(functional_norm_orlicz_side(&f, &unit10(), &h, 0.0).unwrap(), 0.5, 1e-15));
        assert!(close(functional_norm_orlicz_side(&f, &unit10(), &z, 0.3).unwrap(), 0.3, 1e-15));
    }

    #[test]
    fn witness_reference_case() {
        let r = non_m_ideal_witness(&half_square(), &unit10(), 0.5, 1.0).unwrap();
        assert!(close(r.t0, 0.5, 1e-15));
        assert!(close(r.dual_luxemburg, 0.5, 1e-12));
        assert!(close(r.p_modular, 0.25, 1e-12));
        assert!((r.report.orlicz_side_norm - 0.809_017_0).abs() < 1e-6);
        assert!((r.report.gap - 0.190_983_0).abs() < 1e-6);
        assert!(r.dual_norm_ok && r.p_strict && r.orlicz_strict);
        // no singular part: nothing to split
        let r0 = non_m_ideal_witness(&half_square(), &unit10(), 0.0, 1.0).unwrap();
        assert!(r0.report.gap.abs() < 1e-12);
        let small = Weight::constant(Some(1.0));
        assert!(matches!(
            non_m_ideal_witness(&half_square(), &small, 0.5, 0.1),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn witness_for_sequences() {
        let w = Weight::sequence_constant(1.0).unwrap();
        let r = non_m_ideal_witness(&half_square(), &w, 0.5, 1.0).unwrap();
        assert!(r.dual_norm_ok && r.p_strict && r.orlicz_strict, "{r:?}");
        assert!(r.report.gap > 0.0);
    }

    #[test]
    fn holder_examples() {
        let f = half_square();
        let e = Element::indicator(1.0);
        let r = holder_check(&f, &unit10(), &e, &e).unwrap();
        assert!(close(r.pairing, 1.0, 1e-15));
        assert!(r.ok);
        assert!(r.bound_lux_orlicz >= 1.0 - 1e-12 && r.bound_orlicz_lux >= 1.0 - 1e-12);
        let z = Element::step(vec![]).unwrap();
        let r = holder_check(&f, &unit10(), &z, &e).unwrap();
        assert_eq!((r.pairing, r.bound_lux_orlicz, r.bound_orlicz_lux), (0.0, 0.0, 0.0));
    }

    fn seq_case() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
        (1usize..7).prop_flat_map(|n| {
            (
                prop::collection::vec((0u32..33).prop_map(|k| k as f64 / 4.0), n),
                prop::collection::vec((1u32..41).prop_map(|k| k as f64 / 10.0), n),
            )
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn level_formula_matches_oracle((h, mut w) in seq_case(), fam in 0usize..3) {
            w.sort_by(|a, b| b.total_cmp(a));
            let f = [OrliczFunction::power(2.0, 0.5).unwrap(), OrliczFunction::exp_type(), OrliczFunction::log_type()][fam].clone();
            let weight = Weight::new(WeightKind::SeqExplicit { values: w }).unwrap();
            let hs = FiniteSequence::new(h).unwrap();
            let p = p_modular(&f, &weight, &Element::Sequence(hs.clone())).unwrap();
            let o = p_modular_oracle(&f, &weight, &hs, 5).unwrap();
            prop_assert!(close(p, o, 1e-9), "{} vs {}", p, o);
        }

        #[test]
        fn witness_identities(atoms in prop::collection::vec((0.1f64..5.0, 0.05f64..1.5), 0..6)) {
            let w = Weight::step(vec![(0.4, 3.0), (0.8, 1.5), (1.0, 0.5)], None).unwrap();
            let yw = young_witness(&OrliczFunction::exp_type(), &w, &StepFunction::new(atoms).unwrap()).unwrap();
            prop_assert!(yw.diagnostics.first_rel_err() < 1e-9);
            prop_assert!(yw.diagnostics.second_rel_err() < 1e-9);
        }

        #[test]
        fn orlicz_side_is_at_most_additive(atoms in prop::collection::vec((0.1f64..5.0, 0.05f64..1.5), 1..5), s in 0.0f64..2.0) {
            let w = Weight::step(vec![(0.5, 2.0), (1.0, 1.0)], None).unwrap();
            let h = Element::step(atoms).unwrap();
            let r = functional_norm_report(&OrliczFunction::power(3.0, 1.0).unwrap(), &w, &h, s).unwrap();
            prop_assert!(r.orlicz_side_norm <= r.additive_sum * (1.0 + 1e-12));
            let g = |lambda: f64| {
                let dec = decompose(&w, &h, Faults::default()).unwrap();
                p_from_levels(&OrliczFunction::power(3.0, 1.0).unwrap().conjugate(), &dec, 1.0 / lambda) + s / lambda
            };
            prop_assert!(g(r.orlicz_side_norm) <= 1.0 + 1e-12);
            prop_assert!(g(r.orlicz_side_norm * 0.5) >= g(r.orlicz_side_norm));
        }

        #[test]
        fn dual_quantities_are_rearrangement_invariant(atoms in prop::collection::vec((0.1f64..5.0, 0.05f64..1.5), 1..5)) {
            let w = Weight::step(vec![(0.5, 2.0), (1.0, 1.0)], None).unwrap();
            let f = OrliczFunction::log_type();
            let h = Element::step(atoms.clone()).unwrap();
            let mut rev = atoms;
            rev.reverse();
            let g = Element::step(rev).unwrap();
            prop_assert_eq!(p_modular(&f, &w, &h).unwrap(), p_modular(&f, &w, &g).unwrap());
            prop_assert_eq!(dual_orlicz_norm(&f, &w, &h).unwrap(), dual_orlicz_norm(&f, &w, &g).unwrap());
        }
    }
}
