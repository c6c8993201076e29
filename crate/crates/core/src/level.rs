//! Level functions of decreasing step data with respect to a weight.
//!
//! The maximal level intervals are found by pooling adjacent violators on
//! the ratios `H/W` of mass to weight. Each atom of the decreasing input is
//! an initial block: on an atom of constant height `v` the running ratio
//! `R(a, t)` is quasiconvex in `t` (its derivative has the sign of
//! `v W(a, t) - H(a, t) w(t)`, which is nondecreasing), so the level test
//! only needs the atom breakpoints.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rearrange::{FiniteSequence, StepFunction, Weight};

/// Relative slack under which two ratios count as equal; equal ratios merge.
pub const RATIO_TIE: f64 = 1e-12;

/// One maximal level interval `(a, b)` with its ratio `R(a, b)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevelInterval {
    pub a: f64,
    pub b: f64,
    pub ratio: f64,
    /// `H(a, b)`, the mass of the input over the interval.
    pub mass: f64,
    /// `W(a, b)`.
    pub weight_mass: f64,
    /// Index range `[first, last]` of the input atoms pooled here.
    pub first_atom: usize,
    pub last_atom: usize,
}

/// The level function `h0` of a decreasing input.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelDecomposition {
    /// Maximal level intervals covering the support, in order.
    pub intervals: Vec<LevelInterval>,
    /// Stretches where `h0 = h`: intervals holding a single atom over which
    /// the weight is constant, and the zero tail past the support.
    pub residual: Vec<(f64, f64)>,
    /// The decreasing input as `(value, measure)` atoms.
    pub source: Vec<(f64, f64)>,
    pub weight: Weight,
}

/// Switches for deliberately broken variants, used as negative controls.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Faults {
    pub skip_merge: bool,
}

impl LevelDecomposition {
    pub fn support_end(&self) -> f64 {
        self.intervals.last().map_or(0.0, |iv| iv.b)
    }

    /// `h0(t)`.
    pub fn evaluate(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) || t > self.weight.gamma() {
            return Err(Error::Domain(format!(
                "point {t} outside [0, {}]",
                self.weight.gamma()
            )));
        }
        let k = self.intervals.partition_point(|iv| iv.b <= t);
        Ok(match self.intervals.get(k) {
            Some(iv) => iv.ratio * self.weight.density(t),
            None => 0.0,
        })
    }

    /// `h0(i)` for a sequence decomposition, `i >= 1`.
    pub fn evaluate_index(&self, i: u64) -> Result<f64> {
        if i == 0 {
            return Err(Error::Domain("sequence indices start at 1".into()));
        }
        self.evaluate(i as f64 - 0.5)
    }

    /// `h0` as step atoms, split wherever the weight steps inside an
    /// interval. `None` when the weight is not piecewise constant.
    pub fn level_atoms(&self) -> Option<Vec<(f64, f64)>> {
        let mut out = Vec::new();
        for iv in &self.intervals {
            let mut cuts = vec![iv.a];
            if self.weight.is_sequence() {
                let mut i = iv.a.floor() + 1.0;
                while i < iv.b {
                    cuts.push(i);
                    i += 1.0;
                }
            } else {
                if matches!(self.weight.kind(), crate::rearrange::WeightKind::Power { beta } if *beta > 0.0) {
                    return None;
                }
                cuts.extend(self.weight.breakpoints_in(iv.a, iv.b));
            }
            cuts.push(iv.b);
            for c in cuts.windows(2) {
                out.push((iv.ratio * self.weight.density(0.5 * (c[0] + c[1])), c[1] - c[0]));
            }
        }
        Some(out)
    }
}

/// Whether the weight is constant on `(a, b)`.
fn weight_constant_on(w: &Weight, a: f64, b: f64) -> bool {
    use crate::rearrange::WeightKind;
    match w.kind() {
        WeightKind::Step { .. } => w.breakpoints_in(a, b).is_empty(),
        WeightKind::Power { beta } => *beta == 0.0,
        _ => {
            // cells (i-1, i]
            let first = a.floor() + 1.0;
            let last = b.ceil();
            w.seq_value(first) == w.seq_value(last)
        }
    }
}

/// Pools adjacent violators over decreasing atoms.
pub fn level_of_atoms(atoms: &[(f64, f64)], w: &Weight, faults: Faults) -> LevelDecomposition {
    let mut blocks: Vec<LevelInterval> = Vec::with_capacity(atoms.len());
    let mut c = 0.0;
    for (i, &(v, m)) in atoms.iter().enumerate() {
        let wm = w.mass(c, c + m);
        blocks.push(LevelInterval {
            a: c,
            b: c + m,
            ratio: v * m / wm,
            mass: v * m,
            weight_mass: wm,
            first_atom: i,
            last_atom: i,
        });
        c += m;
        if faults.skip_merge {
            continue;
        }
        while blocks.len() >= 2 {
            let last = blocks[blocks.len() - 1];
            let prev = blocks[blocks.len() - 2];
            // R(prev) <= R(last), ties merge
            if prev.mass * last.weight_mass <= last.mass * prev.weight_mass * (1.0 + RATIO_TIE) {
                blocks.pop();
                let merged = blocks.last_mut().expect("two blocks");
                merged.b = last.b;
                merged.mass += last.mass;
                merged.weight_mass += last.weight_mass;
                merged.last_atom = last.last_atom;
                merged.ratio = merged.mass / merged.weight_mass;
            } else {
                break;
            }
        }
    }
    let mut residual = Vec::new();
    for iv in &blocks {
        if iv.first_atom == iv.last_atom && weight_constant_on(w, iv.a, iv.b) {
            residual.push((iv.a, iv.b));
        }
    }
    if c < w.gamma() {
        residual.push((c, w.gamma()));
    }
    LevelDecomposition {
        intervals: blocks,
        residual,
        source: atoms.to_vec(),
        weight: w.clone(),
    }
}

/// Level function of a decreasing step function.
pub fn level_function(h: &StepFunction, w: &Weight) -> Result<LevelDecomposition> {
    if w.is_sequence() {
        return Err(Error::Invalid("level_function needs a function weight".into()));
    }
    if h.atoms().iter().any(|a| a.0 < 0.0) {
        return Err(Error::Invalid("level function input must be nonnegative".into()));
    }
    if h.atoms() != h.rearranged().atoms() {
        return Err(Error::Invalid(
            "level function input must be in decreasing canonical form".into(),
        ));
    }
    check_support(h.total_measure(), w)?;
    Ok(level_of_atoms(h.atoms(), w, Faults::default()))
}

/// Level function of a decreasing finite sequence.
pub fn level_sequence(h: &FiniteSequence, w: &Weight) -> Result<LevelDecomposition> {
    if !w.is_sequence() {
        return Err(Error::Invalid("level_sequence needs a sequence weight".into()));
    }
    let e = h.entries();
    if e.iter().any(|v| *v < 0.0) {
        return Err(Error::Invalid("level function input must be nonnegative".into()));
    }
    if e.windows(2).any(|p| p[1] > p[0]) {
        return Err(Error::Invalid("level function input must be decreasing".into()));
    }
    let atoms: Vec<(f64, f64)> = e.iter().filter(|v| **v > 0.0).map(|&v| (v, 1.0)).collect();
    Ok(level_of_atoms(&atoms, w, Faults::default()))
}

fn check_support(m: f64, w: &Weight) -> Result<()> {
    if m > w.gamma() * (1.0 + 1e-12) {
        return Err(Error::Domain(format!(
            "support measure {m} exceeds the domain length {}",
            w.gamma()
        )));
    }
    Ok(())
}

/// `R(c_i, c_j)` over atom breakpoints, `i < j`.
fn ratio_between(atoms: &[(f64, f64)], cum: &[f64], w: &Weight, i: usize, j: usize) -> f64 {
    let h: f64 = atoms[i..j].iter().map(|a| a.0 * a.1).sum();
    h / w.mass(cum[i], cum[j])
}

/// Independent check by enumeration: among all partitions of the atom
/// breakpoints into consecutive blocks, those in which every block passes
/// the level-interval test at its interior breakpoints and consecutive
/// ratios strictly decrease (so no union of neighbours is level). Returns
/// the blocks as atom index ranges `[first, last]`. Exponential; meant for
/// a handful of atoms.
pub fn enumerate_level_partitions(atoms: &[(f64, f64)], w: &Weight) -> Vec<Vec<(usize, usize)>> {
    let n = atoms.len();
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut cum = vec![0.0];
    for a in atoms {
        cum.push(cum[cum.len() - 1] + a.1);
    }
    let slack = 1e-10;
    let is_level = |i: usize, j: usize| {
        let r = ratio_between(atoms, &cum, w, i, j);
        (i + 1..j).all(|t| ratio_between(atoms, &cum, w, i, t) <= r * (1.0 + slack))
    };
    let mut found = Vec::new();
    for mask in 0u32..(1u32 << (n - 1)) {
        // bit k set: cut after atom k
        let mut blocks = Vec::new();
        let mut start = 0;
        for k in 0..n {
            if k == n - 1 || mask & (1 << k) != 0 {
                blocks.push((start, k));
                start = k + 1;
            }
        }
        let ok = blocks.iter().all(|&(i, j)| is_level(i, j + 1))
            && blocks.windows(2).all(|p| {
                let r0 = ratio_between(atoms, &cum, w, p[0].0, p[0].1 + 1);
                let r1 = ratio_between(atoms, &cum, w, p[1].0, p[1].1 + 1);
                r0 > r1 * (1.0 + slack)
            });
        if ok {
            found.push(blocks);
        }
    }
    found
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rearrange::WeightKind;
    use proptest::prelude::*;

    fn unit() -> Weight {
        Weight::constant(None)
    }

    #[test]
    fn already_level_data_is_fixed() {
        let h = StepFunction::new(vec![(3.0, 1.0), (1.0, 1.0)]).unwrap();
        let d = level_function(&h, &unit()).unwrap();
        assert_eq!(d.intervals.len(), 2);
        assert_eq!(d.evaluate(0.5).unwrap(), 3.0);
        assert_eq!(d.evaluate(1.5).unwrap(), 1.0);
        assert!(d.residual.contains(&(0.0, 1.0)) && d.residual.contains(&(1.0, 2.0)));
    }

    #[test]
    fn two_atom_merge() {
        let h = StepFunction::new(vec![(4.0, 1.0), (3.0, 1.0)]).unwrap();
        let w = Weight::step(vec![(1.0, 4.0), (1.0, 1.0)], None).unwrap();
        let d = level_function(&h, &w).unwrap();
        assert_eq!(d.intervals.len(), 1);
        let iv = d.intervals[0];
        assert_eq!((iv.a, iv.b), (0.0, 2.0));
        assert!((iv.ratio - 1.4).abs() < 1e-15);
        assert!((d.evaluate(0.5).unwrap() - 5.6).abs() < 1e-14);
        assert!((d.evaluate(1.5).unwrap() - 1.4).abs() < 1e-14);
        assert_eq!(d.evaluate(3.0).unwrap(), 0.0);
        // R(0,1) = 1 <= R(0,2) and the mass is kept
        assert!((iv.ratio * iv.weight_mass - 7.0).abs() < 1e-14);
        assert_eq!(enumerate_level_partitions(&d.source, &w), vec![vec![(0, 1)]]);
        assert!(!d.residual.contains(&(0.0, 2.0)));
    }

    #[test]
    fn zero_input() {
        let h = StepFunction::new(vec![]).unwrap();
        let d = level_function(&h, &unit()).unwrap();
        assert!(d.intervals.is_empty());
        assert_eq!(d.evaluate(1.0).unwrap(), 0.0);
    }

    #[test]
    fn rejects_unsorted_or_signed() {
        let w = unit();
        assert!(level_function(&StepFunction::new(vec![(1.0, 1.0), (2.0, 1.0)]).unwrap(), &w).is_err());
        assert!(level_function(&StepFunction::new(vec![(-1.0, 1.0)]).unwrap(), &w).is_err());
        assert!(level_function(&StepFunction::new(vec![(1.0, 1.0)]).unwrap(), &w)
            .unwrap()
            .evaluate(-1.0)
            .is_err());
    }

    #[test]
    fn sequence_examples() {
        let ones = Weight::sequence_constant(1.0).unwrap();
        let d = level_sequence(&FiniteSequence::new(vec![2.0, 1.0]).unwrap(), &ones).unwrap();
        assert_eq!(d.intervals.len(), 2);
        assert_eq!(d.evaluate_index(2).unwrap(), 1.0);

        let w = Weight::new(WeightKind::SeqExplicit { values: vec![2.0, 1.0] }).unwrap();
        let d = level_sequence(&FiniteSequence::new(vec![1.0, 1.0]).unwrap(), &w).unwrap();
        assert_eq!(d.intervals.len(), 1);
        assert!((d.intervals[0].ratio - 2.0 / 3.0).abs() < 1e-15);
        assert!((d.evaluate_index(1).unwrap() - 4.0 / 3.0).abs() < 1e-15);
        assert!((d.evaluate_index(2).unwrap() - 2.0 / 3.0).abs() < 1e-15);

        let d = level_sequence(&FiniteSequence::new(vec![5.0, 0.0, 0.0]).unwrap(), &ones).unwrap();
        assert_eq!(d.intervals.len(), 1);
        assert_eq!((d.intervals[0].a, d.intervals[0].b), (0.0, 1.0));
        assert_eq!(d.evaluate_index(1).unwrap(), 5.0);
        assert_eq!(d.evaluate_index(2).unwrap(), 0.0);
    }

    #[test]
    fn skipped_merge_disagrees_with_enumeration() {
        let atoms = [(4.0, 1.0), (3.0, 1.0)];
        let w = Weight::step(vec![(1.0, 4.0), (1.0, 1.0)], None).unwrap();
        let d = level_of_atoms(&atoms, &w, Faults { skip_merge: true });
        assert_eq!(d.intervals.len(), 2);
        assert_ne!(enumerate_level_partitions(&atoms, &w), vec![vec![(0, 0), (1, 1)]]);
    }

    fn rational_atoms() -> impl Strategy<Value = Vec<(f64, f64)>> {
        prop::collection::vec((1u32..33, 1u32..9), 0..7).prop_map(|v| {
            let mut a: Vec<(f64, f64)> = v.into_iter().map(|(p, q)| (p as f64 / 4.0, q as f64 / 4.0)).collect();
            a.sort_by(|x, y| y.0.total_cmp(&x.0));
            a.dedup_by(|x, y| x.0 == y.0);
            a
        })
    }

    fn step_weight() -> impl Strategy<Value = Weight> {
        prop::collection::vec((1u32..9, 1u32..41), 1..5).prop_map(|v| {
            let mut levels: Vec<f64> = v.iter().map(|x| x.1 as f64 / 10.0).collect();
            levels.sort_by(|a, b| b.total_cmp(a));
            let pieces = v.iter().zip(levels).map(|(x, l)| (x.0 as f64 / 4.0, l)).collect();
            Weight::step(pieces, None).unwrap()
        })
    }

    proptest! {
        #[test]
        fn pava_matches_enumeration(atoms in rational_atoms(), w in step_weight()) {
            let d = level_of_atoms(&atoms, &w, Faults::default());
            let parts = enumerate_level_partitions(&atoms, &w);
            prop_assert_eq!(parts.len(), 1);
            let got: Vec<(usize, usize)> = d.intervals.iter().map(|iv| (iv.first_atom, iv.last_atom)).collect();
            prop_assert_eq!(&parts[0], &got);
        }

        #[test]
        fn profile_decreases_and_mass_is_kept(atoms in rational_atoms(), w in step_weight()) {
            let d = level_of_atoms(&atoms, &w, Faults::default());
            for p in d.intervals.windows(2) {
                prop_assert!(p[0].ratio > p[1].ratio);
            }
            for iv in &d.intervals {
                let h: f64 = atoms[iv.first_atom..=iv.last_atom].iter().map(|a| a.0 * a.1).sum();
                prop_assert!((iv.ratio * w.mass(iv.a, iv.b) - h).abs() <= 1e-12 * h);
            }
        }

        #[test]
        fn level_function_is_idempotent(atoms in rational_atoms(), w in step_weight()) {
            let d = level_of_atoms(&atoms, &w, Faults::default());
            let h0 = d.level_atoms().unwrap();
            let d2 = level_of_atoms(&h0, &w, Faults::default());
            prop_assert_eq!(d.intervals.len(), d2.intervals.len());
            for (x, y) in d.intervals.iter().zip(&d2.intervals) {
                prop_assert!((x.ratio - y.ratio).abs() <= 1e-12 * x.ratio);
                prop_assert!((x.b - y.b).abs() <= 1e-12 * x.b);
            }
        }
    }
}
