//! Weights, measurable elements and decreasing rearrangements.
//!
//! Sequences are handled on the half line by letting index `i` occupy the
//! unit interval `(i - 1, i]`. Under this embedding the cumulative weight of
//! a sequence weight is its prefix sum at integers, and every finite element
//! (step function or finite sequence) rearranges to a list of
//! `(value, measure)` atoms with decreasing values.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Values closer than this merge into one atom of the rearrangement.
pub const MERGE_TOL: f64 = 1e-12;

/// Terms summed directly before the Euler-Maclaurin tail takes over.
const EM_CUTOFF: f64 = 1000.0;

/// A positive nonincreasing weight on `[0, gamma)` or on the positive
/// integers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "WeightKind", into = "WeightKind")]
pub struct Weight {
    kind: WeightKind,
    /// Euler-Maclaurin constant of the prefix sums, for power-like sequences.
    #[serde(skip)]
    em_const: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeightKind {
    /// `(length, level)` pieces laid end to end; the last level continues up
    /// to `gamma` (`None` meaning infinity).
    Step {
        pieces: Vec<(f64, f64)>,
        gamma: Option<f64>,
    },
    /// `w(t) = t^-beta` on `(0, inf)`.
    Power { beta: f64 },
    SeqConstant { c: f64 },
    SeqHarmonic,
    /// `w(i) = i^-beta`.
    SeqPower { beta: f64 },
    /// Explicit leading values; the last one repeats forever.
    SeqExplicit { values: Vec<f64> },
}

impl TryFrom<WeightKind> for Weight {
    type Error = Error;

    fn try_from(kind: WeightKind) -> Result<Self> {
        Weight::new(kind)
    }
}

impl From<Weight> for WeightKind {
    fn from(w: Weight) -> WeightKind {
        w.kind
    }
}

impl Weight {
    pub fn new(kind: WeightKind) -> Result<Self> {
        match &kind {
            WeightKind::Step { pieces, gamma } => {
                if pieces.is_empty() {
                    return Err(Error::Invalid("step weight needs at least one piece".into()));
                }
                let mut prev = f64::INFINITY;
                let mut total = 0.0;
                for &(len, level) in pieces {
                    if !(len.is_finite() && len > 0.0) {
                        return Err(Error::Invalid(format!("weight piece length must be > 0, got {len}")));
                    }
                    if !(level.is_finite() && level > 0.0) {
                        return Err(Error::Invalid(format!("weight level must be > 0, got {level}")));
                    }
                    if level > prev {
                        return Err(Error::Invalid("step weight must be nonincreasing".into()));
                    }
                    prev = level;
                    total += len;
                }
                if let Some(g) = gamma {
                    if !(g.is_finite() && *g >= total * (1.0 - 1e-12)) {
                        return Err(Error::Invalid(format!(
                            "gamma {g} must be finite and cover the pieces (total length {total})"
                        )));
                    }
                }
            }
            WeightKind::Power { beta } => {
                if !(0.0..1.0).contains(beta) {
                    return Err(Error::Invalid(format!(
                        "power weight exponent must lie in [0, 1) so that W is finite, got {beta}"
                    )));
                }
            }
            WeightKind::SeqConstant { c } => {
                if !(c.is_finite() && *c > 0.0) {
                    return Err(Error::Invalid(format!("constant weight must be > 0, got {c}")));
                }
            }
            WeightKind::SeqHarmonic => {}
            WeightKind::SeqPower { beta } => {
                if !(0.0..=1.0).contains(beta) {
                    return Err(Error::Invalid(format!(
                        "sequence weight exponent must lie in [0, 1] so that W(inf) = inf, got {beta}"
                    )));
                }
            }
            WeightKind::SeqExplicit { values } => {
                if values.is_empty() {
                    return Err(Error::Invalid("explicit weight needs at least one value".into()));
                }
                let mut prev = f64::INFINITY;
                for &v in values {
                    if !(v.is_finite() && v > 0.0) || v > prev {
                        return Err(Error::Invalid(
                            "explicit weight values must be positive and nonincreasing".into(),
                        ));
                    }
                    prev = v;
                }
            }
        }
        let mut w = Weight { kind, em_const: 0.0 };
        w.em_const = w.euler_maclaurin_const();
        Ok(w)
    }

    /// `w = 1` on `[0, gamma)`.
    pub fn constant(gamma: Option<f64>) -> Self {
        Weight::new(WeightKind::Step {
            pieces: vec![(gamma.unwrap_or(1.0), 1.0)],
            gamma,
        })
        .expect("unit weight")
    }

    pub fn step(pieces: Vec<(f64, f64)>, gamma: Option<f64>) -> Result<Self> {
        Weight::new(WeightKind::Step { pieces, gamma })
    }

    pub fn sequence_constant(c: f64) -> Result<Self> {
        Weight::new(WeightKind::SeqConstant { c })
    }

    pub fn kind(&self) -> &WeightKind {
        &self.kind
    }

    pub fn is_sequence(&self) -> bool {
        !matches!(self.kind, WeightKind::Step { .. } | WeightKind::Power { .. })
    }

    /// Right end of the domain (`inf` for sequences and power weights).
    pub fn gamma(&self) -> f64 {
        match &self.kind {
            WeightKind::Step { gamma, .. } => gamma.unwrap_or(f64::INFINITY),
            _ => f64::INFINITY,
        }
    }

    /// `w(i)` for a sequence weight, `i >= 1`.
    pub fn seq_value(&self, i: f64) -> f64 {
        match &self.kind {
            WeightKind::SeqConstant { c } => *c,
            WeightKind::SeqHarmonic => 1.0 / i,
            WeightKind::SeqPower { beta } => i.powf(-beta),
            WeightKind::SeqExplicit { values } => {
                let k = (i as usize).clamp(1, values.len());
                values[k - 1]
            }
            _ => self.density(i),
        }
    }

    /// Density at `t`. Step pieces and sequence cells are closed on the right,
    /// so `t` in `(i - 1, i]` reads `w(i)`.
    pub fn density(&self, t: f64) -> f64 {
        match &self.kind {
            WeightKind::Step { pieces, .. } => {
                let mut end = 0.0;
                for &(len, level) in pieces {
                    end += len;
                    if t <= end {
                        return level;
                    }
                }
                pieces[pieces.len() - 1].1
            }
            WeightKind::Power { beta } => t.powf(-beta),
            _ => self.seq_value(t.ceil().max(1.0)),
        }
    }

    /// Continuous extension `s -> w(s)` used by the integral test on
    /// sequence tails; agrees with [`Weight::seq_value`] at integers.
    pub fn seq_continuous(&self, s: f64) -> f64 {
        match &self.kind {
            WeightKind::SeqHarmonic => 1.0 / s,
            WeightKind::SeqPower { beta } => s.powf(-beta),
            _ => self.seq_value(s),
        }
    }

    /// Piece boundaries of a step weight inside `(a, b)`.
    pub fn breakpoints_in(&self, a: f64, b: f64) -> Vec<f64> {
        let mut out = Vec::new();
        if let WeightKind::Step { pieces, .. } = &self.kind {
            let mut end = 0.0;
            for &(len, _) in pieces {
                end += len;
                if end > a && end < b {
                    out.push(end);
                }
            }
        }
        out
    }

    /// `W(t)`; domain error for `t` outside `[0, gamma]`.
    pub fn cumulative(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) || t > self.gamma() || t.is_nan() {
            return Err(Error::Domain(format!(
                "cumulative weight argument {t} outside [0, {}]",
                self.gamma()
            )));
        }
        Ok(self.cum(t))
    }

    /// `W(t)` without domain checks (arguments are clamped at zero).
    pub fn cum(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        if t.is_infinite() {
            return f64::INFINITY;
        }
        match &self.kind {
            WeightKind::Step { pieces, .. } => {
                let mut acc = 0.0;
                let mut start = 0.0;
                for &(len, level) in pieces {
                    if t <= start + len {
                        return acc + level * (t - start);
                    }
                    acc += level * len;
                    start += len;
                }
                acc + pieces[pieces.len() - 1].1 * (t - start)
            }
            WeightKind::Power { beta } => t.powf(1.0 - beta) / (1.0 - beta),
            _ => {
                let n = t.floor();
                let frac = t - n;
                let base = self.prefix_sum(n);
                if frac > 0.0 {
                    base + frac * self.seq_value(n + 1.0)
                } else {
                    base
                }
            }
        }
    }

    /// `W(b) - W(a)`.
    pub fn mass(&self, a: f64, b: f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        match &self.kind {
            // avoid cancellation far out on the step weight's last level
            WeightKind::Step { pieces, .. } => {
                let mut start = 0.0;
                let mut acc = 0.0;
                for &(len, level) in pieces {
                    let end = start + len;
                    let lo = a.max(start);
                    let hi = b.min(end);
                    if hi > lo {
                        acc += level * (hi - lo);
                    }
                    start = end;
                }
                let lo = a.max(start);
                if b > lo {
                    acc += pieces[pieces.len() - 1].1 * (b - lo);
                }
                acc
            }
            _ => self.cum(b) - self.cum(a),
        }
    }

    /// `sum_{i <= n} w(i)` for a sequence weight.
    fn prefix_sum(&self, n: f64) -> f64 {
        if n < 1.0 {
            return 0.0;
        }
        match &self.kind {
            WeightKind::SeqConstant { c } => c * n,
            WeightKind::SeqExplicit { values } => {
                let len = values.len() as f64;
                if n <= len {
                    values[..n as usize].iter().sum()
                } else {
                    values.iter().sum::<f64>() + (n - len) * values[values.len() - 1]
                }
            }
            WeightKind::SeqHarmonic | WeightKind::SeqPower { .. } => {
                if n <= EM_CUTOFF {
                    (1..=n as u64).map(|i| self.seq_value(i as f64)).sum()
                } else {
                    self.em_leading(n) + self.em_const
                }
            }
            _ => self.cum(n),
        }
    }

    /// Euler-Maclaurin expansion of the prefix sum without its constant.
    fn em_leading(&self, n: f64) -> f64 {
        let beta = match &self.kind {
            WeightKind::SeqHarmonic => 1.0,
            WeightKind::SeqPower { beta } => *beta,
            _ => return 0.0,
        };
        let integral = if beta == 1.0 {
            n.ln()
        } else {
            n.powf(1.0 - beta) / (1.0 - beta)
        };
        let f = n.powf(-beta);
        let f1 = -beta * n.powf(-beta - 1.0);
        let f3 = -beta * (beta + 1.0) * (beta + 2.0) * n.powf(-beta - 3.0);
        integral + 0.5 * f + f1 / 12.0 - f3 / 720.0
    }

    fn euler_maclaurin_const(&self) -> f64 {
        match &self.kind {
            WeightKind::SeqHarmonic | WeightKind::SeqPower { .. } => {
                let direct: f64 = (1..=EM_CUTOFF as u64)
                    .rev()
                    .map(|i| self.seq_value(i as f64))
                    .sum();
                direct - self.em_leading(EM_CUTOFF)
            }
            _ => 0.0,
        }
    }

    /// Smallest `t` with `W(t) >= y`, or `None` when `W(gamma) < y`.
    pub fn inverse_cumulative(&self, y: f64) -> Option<f64> {
        if y <= 0.0 {
            return Some(0.0);
        }
        let gamma = self.gamma();
        if gamma.is_finite() && self.cum(gamma) < y {
            return None;
        }
        match &self.kind {
            WeightKind::Step { pieces, .. } => {
                let mut acc = 0.0;
                let mut start = 0.0;
                for &(len, level) in pieces {
                    if acc + level * len >= y {
                        return Some(start + (y - acc) / level);
                    }
                    acc += level * len;
                    start += len;
                }
                Some(start + (y - acc) / pieces[pieces.len() - 1].1)
            }
            WeightKind::Power { beta } => Some(((1.0 - beta) * y).powf(1.0 / (1.0 - beta))),
            _ => {
                // integer bracket, then linear inside the cell
                let mut hi = 1.0f64;
                while self.cum(hi) < y {
                    hi *= 2.0;
                }
                let mut lo = (hi / 2.0).floor();
                while hi - lo > 1.0 {
                    let mid = ((lo + hi) / 2.0).floor();
                    if self.cum(mid) >= y {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                let base = self.cum(lo);
                Some(lo + ((y - base) / self.seq_value(hi)).min(1.0))
            }
        }
    }
}

/// Finitely many atoms `(value, measure)`; positions are irrelevant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StepAtoms", into = "StepAtoms")]
pub struct StepFunction {
    atoms: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepAtoms {
    pub atoms: Vec<(f64, f64)>,
}

impl TryFrom<StepAtoms> for StepFunction {
    type Error = Error;

    fn try_from(raw: StepAtoms) -> Result<Self> {
        StepFunction::new(raw.atoms)
    }
}

impl From<StepFunction> for StepAtoms {
    fn from(f: StepFunction) -> StepAtoms {
        StepAtoms { atoms: f.atoms }
    }
}

impl StepFunction {
    /// Validates atoms and drops those of measure zero.
    pub fn new(atoms: Vec<(f64, f64)>) -> Result<Self> {
        for &(v, m) in &atoms {
            if !v.is_finite() {
                return Err(Error::Invalid(format!("atom value must be finite, got {v}")));
            }
            if !(m.is_finite() && m >= 0.0) {
                return Err(Error::Invalid(format!("atom measure must be finite and >= 0, got {m}")));
            }
        }
        Ok(StepFunction {
            atoms: atoms.into_iter().filter(|&(_, m)| m > 0.0).collect(),
        })
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn total_measure(&self) -> f64 {
        self.atoms.iter().map(|a| a.1).sum()
    }

    /// Decreasing form: `|value|` sorted descending, values within
    /// [`MERGE_TOL`] merged, zero values dropped.
    pub fn rearranged(&self) -> StepFunction {
        let mut atoms: Vec<(f64, f64)> = self
            .atoms
            .iter()
            .map(|&(v, m)| (v.abs(), m))
            .filter(|&(v, _)| v > 0.0)
            .collect();
        atoms.sort_by(|a, b| b.0.total_cmp(&a.0));
        let mut out: Vec<(f64, f64)> = Vec::with_capacity(atoms.len());
        for (v, m) in atoms {
            match out.last_mut() {
                Some(last) if (last.0 - v).abs() <= MERGE_TOL => last.1 += m,
                _ => out.push((v, m)),
            }
        }
        StepFunction { atoms: out }
    }

    pub fn scaled(&self, k: f64) -> StepFunction {
        StepFunction {
            atoms: self.atoms.iter().map(|&(v, m)| (k * v, m)).collect(),
        }
    }
}

/// Finitely supported sequence, implicitly continued by zeros.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SeqEntries", into = "SeqEntries")]
pub struct FiniteSequence {
    entries: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeqEntries {
    pub entries: Vec<f64>,
}

impl TryFrom<SeqEntries> for FiniteSequence {
    type Error = Error;

    fn try_from(raw: SeqEntries) -> Result<Self> {
        FiniteSequence::new(raw.entries)
    }
}

impl From<FiniteSequence> for SeqEntries {
    fn from(x: FiniteSequence) -> SeqEntries {
        SeqEntries { entries: x.entries }
    }
}

impl FiniteSequence {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if let Some(v) = entries.iter().find(|v| !v.is_finite()) {
            return Err(Error::Invalid(format!("sequence entries must be finite, got {v}")));
        }
        Ok(FiniteSequence { entries })
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// `|x|` sorted descending with trailing zeros trimmed.
    pub fn rearranged(&self) -> FiniteSequence {
        let mut e: Vec<f64> = self.entries.iter().map(|v| v.abs()).collect();
        e.sort_by(|a, b| b.total_cmp(a));
        while e.last() == Some(&0.0) {
            e.pop();
        }
        FiniteSequence { entries: e }
    }

    pub fn scaled(&self, k: f64) -> FiniteSequence {
        FiniteSequence {
            entries: self.entries.iter().map(|v| k * v).collect(),
        }
    }
}

/// Closed-form decreasing profiles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum Shape {
    /// `c ln(1 + 1/t)` on `(0, inf)`.
    LogTail { c: f64 },
    /// `c t^-a` on `(0, inf)`.
    PowerTail { c: f64, a: f64 },
    /// `c i^-a` on the positive integers.
    SeqPower { c: f64, a: f64 },
    /// `c / ln(i + 1)` on the positive integers.
    SeqLog { c: f64 },
}

impl Shape {
    pub fn is_sequence(&self) -> bool {
        matches!(self, Shape::SeqPower { .. } | Shape::SeqLog { .. })
    }

    fn c(&self) -> f64 {
        match *self {
            Shape::LogTail { c } | Shape::PowerTail { c, .. } | Shape::SeqPower { c, .. } | Shape::SeqLog { c } => c,
        }
    }

    fn with_c(&self, c: f64) -> Shape {
        match *self {
            Shape::LogTail { .. } => Shape::LogTail { c },
            Shape::PowerTail { a, .. } => Shape::PowerTail { c, a },
            Shape::SeqPower { a, .. } => Shape::SeqPower { c, a },
            Shape::SeqLog { .. } => Shape::SeqLog { c },
        }
    }

    /// Profile value at `t` (a point of `(0, inf)` or an index `>= 1`).
    pub fn value(&self, t: f64) -> f64 {
        match *self {
            Shape::LogTail { c } => c * (1.0 / t).ln_1p(),
            Shape::PowerTail { c, a } | Shape::SeqPower { c, a } => c * t.powf(-a),
            Shape::SeqLog { c } => c / t.ln_1p(),
        }
    }

    /// `sup { t : value(t) > lambda }` over the continuous argument.
    pub fn inverse(&self, lambda: f64) -> f64 {
        if lambda <= 0.0 {
            return f64::INFINITY;
        }
        match *self {
            Shape::LogTail { c } => 1.0 / (lambda / c).exp_m1(),
            Shape::PowerTail { c, a } | Shape::SeqPower { c, a } => (c / lambda).powf(1.0 / a),
            Shape::SeqLog { c } => (c / lambda).exp_m1(),
        }
    }

    fn validate(&self) -> Result<()> {
        let c = self.c();
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::Invalid(format!("profile constant must be > 0, got {c}")));
        }
        if let Shape::PowerTail { a, .. } | Shape::SeqPower { a, .. } = self {
            if !(a.is_finite() && *a > 0.0) {
                return Err(Error::Invalid(format!("profile exponent must be > 0, got {a}")));
            }
        }
        Ok(())
    }
}

/// A catalog profile restricted to a union of disjoint pieces of its domain.
///
/// Function shapes take pieces `[a, b)` of `(0, inf)`; sequence shapes take
/// inclusive index ranges `[i0, i1]`. An infinite end serializes as `null`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ProfileSpec", into = "ProfileSpec")]
pub struct Profile {
    shape: Shape,
    pieces: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileSpec {
    pub shape: Shape,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pieces: Option<Vec<(f64, Option<f64>)>>,
}

impl TryFrom<ProfileSpec> for Profile {
    type Error = Error;

    fn try_from(spec: ProfileSpec) -> Result<Self> {
        match spec.pieces {
            None => Profile::full(spec.shape),
            Some(p) => Profile::new(
                spec.shape,
                p.into_iter()
                    .map(|(a, b)| (a, b.unwrap_or(f64::INFINITY)))
                    .collect(),
            ),
        }
    }
}

impl From<Profile> for ProfileSpec {
    fn from(p: Profile) -> ProfileSpec {
        ProfileSpec {
            shape: p.shape,
            pieces: Some(
                p.pieces
                    .into_iter()
                    .map(|(a, b)| (a, if b.is_finite() { Some(b) } else { None }))
                    .collect(),
            ),
        }
    }
}

/// A stretch of the rearranged axis: positions `[s0, s1)` carry the profile
/// value at `s + shift`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub s0: f64,
    pub s1: f64,
    pub shift: f64,
}

impl Profile {
    pub fn new(shape: Shape, pieces: Vec<(f64, f64)>) -> Result<Self> {
        shape.validate()?;
        let seq = shape.is_sequence();
        let mut prev_end = 0.0f64;
        let mut out = Vec::with_capacity(pieces.len());
        for (k, &(a, b)) in pieces.iter().enumerate() {
            let bad = |msg: &str| Err(Error::Invalid(format!("profile piece {k}: {msg}")));
            if !a.is_finite() || b.is_nan() {
                return bad("start must be finite");
            }
            if seq {
                if a < 1.0 || a.fract() != 0.0 || (b.is_finite() && b.fract() != 0.0) {
                    return bad("sequence pieces are integer index ranges starting at 1");
                }
                if b < a {
                    return bad("empty index range");
                }
                if k > 0 && a <= prev_end {
                    return bad("pieces must be sorted and disjoint");
                }
            } else {
                if a < 0.0 || b <= a {
                    return bad("need 0 <= a < b");
                }
                if a < prev_end {
                    return bad("pieces must be sorted and disjoint");
                }
            }
            if k + 1 < pieces.len() && b.is_infinite() {
                return bad("only the last piece may be unbounded");
            }
            prev_end = b;
            out.push((a, b));
        }
        Ok(Profile { shape, pieces: out })
    }

    /// The profile on its whole domain.
    pub fn full(shape: Shape) -> Result<Self> {
        let start = if shape.is_sequence() { 1.0 } else { 0.0 };
        Profile::new(shape, vec![(start, f64::INFINITY)])
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn pieces(&self) -> &[(f64, f64)] {
        &self.pieces
    }

    pub fn is_sequence(&self) -> bool {
        self.shape.is_sequence()
    }

    pub fn is_zero(&self) -> bool {
        self.pieces.is_empty()
    }

    pub fn scaled(&self, k: f64) -> Profile {
        if k == 0.0 {
            return Profile {
                shape: self.shape,
                pieces: Vec::new(),
            };
        }
        Profile {
            shape: self.shape.with_c(self.shape.c() * k.abs()),
            pieces: self.pieces.clone(),
        }
    }

    /// Measure of a piece: its length, or its index count for sequences.
    fn piece_len(&self, (a, b): (f64, f64)) -> f64 {
        if self.is_sequence() {
            b - a + 1.0
        } else {
            b - a
        }
    }

    /// The decreasing rearrangement as consecutive segments. The pieces are
    /// already ordered by value, so they are simply laid end to end.
    pub fn segments(&self) -> Vec<Segment> {
        let mut s = 0.0;
        self.pieces
            .iter()
            .map(|&p| {
                let len = self.piece_len(p);
                // sequence positions j in [s0 + 1, s1] read index j + shift
                let seg = Segment {
                    s0: s,
                    s1: s + len,
                    shift: p.0 - s - if self.is_sequence() { 1.0 } else { 0.0 },
                };
                s += len;
                seg
            })
            .collect()
    }

    pub fn total_measure(&self) -> f64 {
        self.pieces.iter().map(|&p| self.piece_len(p)).sum()
    }

    /// Measure of `{ value > lambda }`.
    pub fn distribution(&self, lambda: f64) -> f64 {
        let inv = self.shape.inverse(lambda);
        self.pieces
            .iter()
            .map(|&(a, b)| {
                if self.is_sequence() {
                    // largest integer i with value(i) > lambda
                    let mut n = inv.ceil() - 1.0;
                    if n.is_finite() {
                        while n >= 1.0 && self.shape.value(n) <= lambda {
                            n -= 1.0;
                        }
                        while self.shape.value(n + 1.0) > lambda {
                            n += 1.0;
                        }
                    }
                    (n.min(b) - a + 1.0).max(0.0)
                } else {
                    (inv.min(b) - a).max(0.0)
                }
            })
            .sum()
    }
}

/// Any element the crate can measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Element {
    Step(StepFunction),
    Sequence(FiniteSequence),
    Profile(Profile),
}

impl Element {
    pub fn step(atoms: Vec<(f64, f64)>) -> Result<Element> {
        Ok(Element::Step(StepFunction::new(atoms)?))
    }

    pub fn sequence(entries: Vec<f64>) -> Result<Element> {
        Ok(Element::Sequence(FiniteSequence::new(entries)?))
    }

    /// `chi_(0, m)`.
    pub fn indicator(m: f64) -> Element {
        Element::Step(StepFunction::new(vec![(1.0, m)]).expect("valid indicator"))
    }

    pub fn is_sequence(&self) -> bool {
        match self {
            Element::Step(_) => false,
            Element::Sequence(_) => true,
            Element::Profile(p) => p.is_sequence(),
        }
    }

    pub fn is_finite_support(&self) -> bool {
        match self {
            Element::Profile(p) => p.pieces.iter().all(|&(_, b)| b.is_finite()),
            _ => true,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Element::Profile(p) => p.is_zero(),
            _ => self.decreasing_atoms().is_some_and(|a| a.is_empty()),
        }
    }

    pub fn scaled(&self, k: f64) -> Element {
        match self {
            Element::Step(f) => Element::Step(f.scaled(k)),
            Element::Sequence(x) => Element::Sequence(x.scaled(k)),
            Element::Profile(p) => Element::Profile(p.scaled(k)),
        }
    }

    /// The rearranged finite element as `(value, measure)` atoms with
    /// strictly decreasing positive values; `None` for profiles.
    pub fn decreasing_atoms(&self) -> Option<Vec<(f64, f64)>> {
        match self {
            Element::Step(f) => Some(f.rearranged().atoms),
            Element::Sequence(x) => Some(x.rearranged().entries.iter().map(|&v| (v, 1.0)).collect()),
            Element::Profile(_) => None,
        }
    }

    /// Measure of the support.
    pub fn support_measure(&self) -> f64 {
        match self {
            Element::Profile(p) => p.total_measure(),
            _ => self
                .decreasing_atoms()
                .unwrap_or_default()
                .iter()
                .map(|a| a.1)
                .sum(),
        }
    }

    /// Checks that the element lives on the weight's domain.
    pub fn check_against(&self, w: &Weight) -> Result<()> {
        if self.is_sequence() != w.is_sequence() {
            return Err(Error::Invalid(format!(
                "{} element paired with a {} weight",
                if self.is_sequence() { "sequence" } else { "function" },
                if w.is_sequence() { "sequence" } else { "function" }
            )));
        }
        let m = self.support_measure();
        if m > w.gamma() * (1.0 + 1e-12) {
            return Err(Error::Domain(format!(
                "support measure {m} exceeds the domain length {}",
                w.gamma()
            )));
        }
        if let Element::Profile(p) = self {
            if let Some(&(_, b)) = p.pieces.last() {
                if b > w.gamma() {
                    return Err(Error::Domain("profile extends past the domain end".into()));
                }
            }
        }
        Ok(())
    }
}

/// `d_f(lambda)`, the measure of `{ |f| > lambda }`.
pub fn distribution(f: &Element, lambda: f64) -> Result<f64> {
    if !(lambda > 0.0) {
        return Err(Error::Domain(format!("level must be > 0, got {lambda}")));
    }
    Ok(match f {
        Element::Profile(p) => p.distribution(lambda),
        _ => f
            .decreasing_atoms()
            .unwrap_or_default()
            .iter()
            .filter(|a| a.0 > lambda)
            .map(|a| a.1)
            .sum(),
    })
}

/// The canonical decreasing form. Profiles are decreasing by construction
/// and come back unchanged; see [`Profile::segments`] for their rearranged
/// axis.
pub fn decreasing_rearrangement(f: &Element) -> Element {
    match f {
        Element::Step(s) => Element::Step(s.rearranged()),
        Element::Sequence(x) => Element::Sequence(x.rearranged()),
        Element::Profile(p) => Element::Profile(p.clone()),
    }
}

/// Whether `f` and `g` have the same distribution function.
pub fn equimeasurable(f: &Element, g: &Element) -> bool {
    if f.is_sequence() != g.is_sequence() {
        return false;
    }
    match (f, g) {
        (Element::Profile(p), Element::Profile(q)) => {
            if p.shape != q.shape {
                return false;
            }
            let (a, b) = (p.segments(), q.segments());
            a.len() == b.len()
                && a.iter().zip(&b).all(|(x, y)| {
                    close(x.s1 - x.s0, y.s1 - y.s0) && close(x.s0 + x.shift, y.s0 + y.shift)
                })
        }
        (Element::Profile(_), _) | (_, Element::Profile(_)) => false,
        _ => {
            let a = f.decreasing_atoms().unwrap_or_default();
            let b = g.decreasing_atoms().unwrap_or_default();
            let a = merge_runs(a);
            let b = merge_runs(b);
            a.len() == b.len()
                && a.iter()
                    .zip(&b)
                    .all(|(x, y)| (x.0 - y.0).abs() <= MERGE_TOL && close(x.1, y.1))
        }
    }
}

fn close(a: f64, b: f64) -> bool {
    a == b || (a - b).abs() <= 1e-12 * a.abs().max(b.abs())
}

fn merge_runs(atoms: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    let mut out: Vec<(f64, f64)> = Vec::new();
    for (v, m) in atoms {
        match out.last_mut() {
            Some(last) if (last.0 - v).abs() <= MERGE_TOL => last.1 += m,
            _ => out.push((v, m)),
        }
    }
    out
}

/// `W(t)`.
pub fn cumulative_weight(w: &Weight, t: f64) -> Result<f64> {
    w.cumulative(t)
}
