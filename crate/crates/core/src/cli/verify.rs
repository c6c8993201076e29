//! The randomized property suite behind `olk verify`.
//!
//! Every case draws from its own generator, seeded from the suite seed and
//! the case id, so rows do not depend on scheduling. Rows are sorted by
//! case id before they are emitted.

use clap::ValueEnum;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use super::emit::{cell, Table};
use super::{Report, SCHEMA};
use crate::duality;
use crate::error::{Error, Result};
use crate::level::{enumerate_level_partitions, level_of_atoms, Faults};
use crate::norms;
use crate::orlicz::OrliczFunction;
use crate::rearrange::{Element, FiniteSequence, Profile, Shape, StepFunction, Weight, WeightKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    All,
    Orlicz,
    Level,
    Norms,
    Duality,
    Anchors,
    Theta,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Fault {
    /// Level functions without pooling of adjacent violators.
    SkipPavaMerge,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub suite: Suite,
    pub seed: u64,
    /// Largest support of random finite elements.
    pub size: usize,
    /// Overrides every group's case count.
    pub cases: Option<usize>,
    pub fault: Option<Fault>,
    pub threads: Option<usize>,
}

impl Config {
    pub fn new(seed: u64) -> Config {
        Config {
            suite: Suite::All,
            seed,
            size: 6,
            cases: None,
            fault: None,
            threads: None,
        }
    }

    fn faults(&self) -> Faults {
        Faults {
            skip_merge: self.fault == Some(Fault::SkipPavaMerge),
        }
    }
}

/// `OLK_THREADS` as a positive thread count.
pub fn threads_from_env() -> Option<usize> {
    std::env::var("OLK_THREADS").ok()?.trim().parse().ok().filter(|n| *n > 0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    Violated,
    Inconclusive,
}

/// One checked quantity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub case: String,
    pub quantity: String,
    /// Leading hex of the SHA-256 of the case inputs.
    pub digest: String,
    pub value: f64,
    pub reference: f64,
    pub tolerance: f64,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteResult {
    pub rows: Vec<ReportRow>,
}

impl SuiteResult {
    pub fn count(&self, s: Status) -> usize {
        self.rows.iter().filter(|r| r.status == s).count()
    }

    pub fn violations(&self) -> usize {
        self.count(Status::Violated)
    }

    pub fn into_report(self, cfg: &Config) -> Report {
        let mut t = Table::new([
            "case", "quantity", "digest", "value", "reference", "tolerance", "status",
        ]);
        for r in &self.rows {
            t.push(vec![
                r.case.clone(),
                r.quantity.clone(),
                r.digest.clone(),
                cell(r.value),
                cell(r.reference),
                cell(r.tolerance),
                serde_json::to_value(r.status).unwrap().as_str().unwrap().to_string(),
            ]);
        }
        let violated = self.violations() > 0;
        let json = json!({
            "schema": SCHEMA,
            "command": "verify",
            "suite": cfg.suite,
            "seed": cfg.seed,
            "size": cfg.size,
            "cases": cfg.cases,
            "fault": cfg.fault,
            "summary": {
                "rows": self.rows.len(),
                "ok": self.count(Status::Ok),
                "violated": self.violations(),
                "inconclusive": self.count(Status::Inconclusive),
            },
            "rows": self.rows,
        });
        Report {
            json,
            table: t,
            violated,
        }
    }
}

/// Builds the rows of one case.
struct Case {
    id: String,
    digest: String,
    rows: Vec<ReportRow>,
}

impl Case {
    fn new(id: String, inputs: &Value) -> Case {
        let text = serde_json::to_string(inputs).expect("inputs serialize");
        let digest = hex::encode(Sha256::digest(text.as_bytes()));
        Case {
            id,
            digest: digest[..16].to_string(),
            rows: Vec::new(),
        }
    }

    fn row(&mut self, quantity: &str, value: f64, reference: f64, tolerance: f64, ok: bool) {
        self.rows.push(ReportRow {
            case: self.id.clone(),
            quantity: quantity.to_string(),
            digest: self.digest.clone(),
            value,
            reference,
            tolerance,
            status: if ok { Status::Ok } else { Status::Violated },
            note: None,
        });
    }

    /// `|value - reference| <= tol * max(|reference|, tiny)`.
    fn close(&mut self, quantity: &str, value: f64, reference: f64, tol: f64) {
        let ok = (value - reference).abs() <= tol * reference.abs().max(1e-300);
        self.row(quantity, value, reference, tol, ok);
    }

    fn close_abs(&mut self, quantity: &str, value: f64, reference: f64, tol: f64) {
        let ok = (value - reference).abs() <= tol;
        self.row(quantity, value, reference, tol, ok);
    }

    /// `value <= bound (1 + tol)`.
    fn at_most(&mut self, quantity: &str, value: f64, bound: f64, tol: f64) {
        let ok = value <= bound + tol * bound.abs();
        self.row(quantity, value, bound, tol, ok);
    }

    fn holds(&mut self, quantity: &str, ok: bool) {
        self.row(quantity, ok as u8 as f64, 1.0, 0.0, ok);
    }

    /// Records a computation that raised instead of returning.
    fn error(&mut self, quantity: &str, e: Error) {
        let status = match e {
            Error::Inconclusive(_) => Status::Inconclusive,
            _ => Status::Violated,
        };
        self.rows.push(ReportRow {
            case: self.id.clone(),
            quantity: quantity.to_string(),
            digest: self.digest.clone(),
            value: f64::NAN,
            reference: f64::NAN,
            tolerance: 0.0,
            status,
            note: Some(e.to_string()),
        });
    }
}

type CaseFn = fn(&mut ChaCha8Rng, &Config, &mut Option<Case>, &str) -> Result<()>;

struct Group {
    name: &'static str,
    suite: Suite,
    cases: usize,
    fixed: bool,
    run: CaseFn,
}

const GROUPS: &[Group] = &[
    Group { name: "anchors/closed_form", suite: Suite::Anchors, cases: 1, fixed: true, run: anchors_closed_form },
    Group { name: "anchors/witness", suite: Suite::Anchors, cases: 1, fixed: true, run: anchors_witness },
    Group { name: "duality/additivity", suite: Suite::Duality, cases: 100, fixed: false, run: duality_additivity },
    Group { name: "duality/holder", suite: Suite::Duality, cases: 50, fixed: false, run: duality_holder },
    Group { name: "duality/non_m_ideal", suite: Suite::Duality, cases: 50, fixed: false, run: duality_non_m_ideal },
    Group { name: "duality/young_witness", suite: Suite::Duality, cases: 200, fixed: false, run: duality_young_witness },
    Group { name: "level/enumeration", suite: Suite::Level, cases: 100, fixed: false, run: level_enumeration },
    Group { name: "level/oracle", suite: Suite::Level, cases: 200, fixed: false, run: level_oracle },
    Group { name: "norms/dual_sup", suite: Suite::Norms, cases: 50, fixed: false, run: norms_dual_sup },
    Group { name: "norms/kinterval", suite: Suite::Norms, cases: 100, fixed: false, run: norms_kinterval },
    Group { name: "norms/sandwich", suite: Suite::Norms, cases: 500, fixed: false, run: norms_sandwich },
    Group { name: "orlicz/biconjugate", suite: Suite::Orlicz, cases: 6, fixed: true, run: orlicz_biconjugate },
    Group { name: "orlicz/young", suite: Suite::Orlicz, cases: 100, fixed: false, run: orlicz_young },
    Group { name: "theta/finite", suite: Suite::Theta, cases: 50, fixed: false, run: theta_finite },
    Group { name: "theta/profiles", suite: Suite::Theta, cases: 1, fixed: true, run: theta_profiles },
];

/// Runs every selected group; deterministic in `cfg`.
pub fn run_suite(cfg: &Config) -> SuiteResult {
    let jobs: Vec<(&Group, usize)> = GROUPS
        .iter()
        .filter(|g| cfg.suite == Suite::All || cfg.suite == g.suite)
        .flat_map(|g| {
            let n = if g.fixed { g.cases } else { cfg.cases.unwrap_or(g.cases) };
            (0..n).map(move |i| (g, i))
        })
        .collect();
    let work = || {
        jobs.par_iter()
            .map(|(g, i)| run_case(g, *i, cfg))
            .collect::<Vec<_>>()
    };
    let results = match cfg.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .expect("thread pool")
            .install(work),
        None => work(),
    };
    let mut rows: Vec<ReportRow> = results.into_iter().flatten().collect();
    rows.sort_by(|a, b| (&a.case, &a.quantity).cmp(&(&b.case, &b.quantity)));
    SuiteResult { rows }
}

fn run_case(g: &Group, i: usize, cfg: &Config) -> Vec<ReportRow> {
    let id = format!("{}/{:04}", g.name, i);
    let key = Sha256::digest(format!("{}:{}", cfg.seed, id).as_bytes());
    let mut rng = ChaCha8Rng::from_seed(key.into());
    let mut case = None;
    let res = (g.run)(&mut rng, cfg, &mut case, &id);
    let mut case = case.unwrap_or_else(|| Case::new(id.clone(), &json!({ "case": id })));
    if let Err(e) = res {
        case.error("computation", e);
    }
    case.rows
}

// -- generators ------------------------------------------------------------

fn families() -> [OrliczFunction; 3] {
    [
        OrliczFunction::power(2.0, 0.5).expect("valid"),
        OrliczFunction::exp_type(),
        OrliczFunction::log_type(),
    ]
}

fn pick_family(rng: &mut ChaCha8Rng) -> OrliczFunction {
    let f = families();
    f[rng.gen_range(0..f.len())].clone()
}

fn decreasing(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

/// Decreasing sequence weights on the grid `k / 10` in `[0.1, 4]`.
fn seq_weights(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    decreasing((0..n).map(|_| rng.gen_range(1..=40) as f64 / 10.0).collect())
}

/// Entries on the grid `k / 4` in `[0, 8]`.
fn rational_entries(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(0..=32) as f64 / 4.0).collect()
}

fn step_weight(rng: &mut ChaCha8Rng) -> Weight {
    let k = rng.gen_range(1..=3);
    let levels = decreasing((0..k).map(|_| rng.gen_range(0.2..4.0)).collect());
    let pieces = levels.into_iter().map(|l| (rng.gen_range(0.2..1.5), l)).collect();
    Weight::step(pieces, None).expect("valid weight")
}

fn step_atoms(rng: &mut ChaCha8Rng, n: usize, signed: bool) -> Vec<(f64, f64)> {
    let lo = if signed { -4.0 } else { 0.1 };
    (0..n)
        .map(|_| (rng.gen_range(lo..4.0), rng.gen_range(0.05..1.5)))
        .collect()
}

/// A random nonzero step or sequence element with a matching weight.
fn random_element(rng: &mut ChaCha8Rng, size: usize) -> (Weight, Element) {
    let n = rng.gen_range(1..=size);
    if rng.gen_bool(0.5) {
        let mut atoms = step_atoms(rng, n, true);
        atoms[0].0 = 0.5 + rng.gen_range(0.0..3.0);
        (step_weight(rng), Element::step(atoms).expect("valid"))
    } else {
        let w = if rng.gen_bool(0.5) {
            Weight::new(WeightKind::SeqHarmonic).expect("valid")
        } else {
            Weight::new(WeightKind::SeqExplicit { values: seq_weights(rng, n) }).expect("valid")
        };
        let mut e = rational_entries(rng, n);
        e[0] = e[0].max(0.25);
        (w, Element::sequence(e).expect("valid"))
    }
}

fn family_name(f: &OrliczFunction) -> Value {
    serde_json::to_value(f).expect("serializes")
}

// -- groups ----------------------------------------------------------------

fn orlicz_biconjugate(_: &mut ChaCha8Rng, _: &Config, case: &mut Option<Case>, id: &str) -> Result<()> {
    let k: usize = id.rsplit('/').next().unwrap().parse().unwrap();
    let all = [
        OrliczFunction::power(2.0, 0.5)?,
        OrliczFunction::power(3.5, 2.0)?,
        OrliczFunction::power(1.3, 1.0)?,
        OrliczFunction::exp_type(),
        OrliczFunction::log_type(),
        OrliczFunction::non_delta2_zero(),
    ];
    let f = &all[k];
    let c = case.insert(Case::new(id.into(), &json!({ "phi": family_name(f) })));
    let g = f.conjugate();
    let mut worst = 0.0f64;
    for j in 0..=80 {
        let u = 10f64.powf(-4.0 + j as f64 * 0.1);
        let want = f.value(u);
        if !(want > 0.0 && want < 1e60) {
            continue;
        }
        let got = g.conjugate_eval_numeric(u)?;
        worst = worst.max((got - want).abs() / want);
    }
    c.at_most("biconjugate_rel_err", worst, 1e-7, 0.0);
    Ok(())
}

fn orlicz_young(rng: &mut ChaCha8Rng, _: &Config, case: &mut Option<Case>, id: &str) -> Result<()> {
    let f = pick_family(rng);
    // exp' overflows near u = 710
    let u = 10f64.powf(rng.gen_range(-4.0..2.0));
    let v = 10f64.powf(rng.gen_range(-4.0..3.0));
    let c = case.insert(Case::new(id.into(), &json!({ "phi": family_name(&f), "u": u, "v": v })));
    let gap = f.young_gap(u, v)?;
    c.row("young_gap", gap, 0.0, 1e-10, gap >= -1e-10 * (u * v).max(1.0));
    let p = f.derivative(u);
    let eq = f.young_gap(u, p)?;
    c.row("young_equality", eq, 0.0, 1e-8, eq.abs() <= 1e-8 * (u * p).max(1e-300));
    let q = f.conjugate().derivative(p);
    c.row("q_of_p", q, u, 1e-8, q >= u - 1e-8 * u.max(1.0));
    Ok(())
}

fn level_oracle(rng: &mut ChaCha8Rng, cfg: &Config, case: &mut Option<Case>, id: &str) -> Result<()> {
    let n = rng.gen_range(1..=cfg.size);
    let h = rational_entries(rng, n);
    let ws = seq_weights(rng, n);
    let f = pick_family(rng);
    let c = case.insert(Case::new(
        id.into(),
        &json!({ "phi": family_name(&f), "h": h, "w": ws, "fault": cfg.fault }),
    ));
    let w = Weight::new(WeightKind::SeqExplicit { values: ws })?;
    let hs = FiniteSequence::new(h)?;
    let p = duality::p_modular_with(&f, &w, &Element::Sequence(hs.clone()), cfg.faults())?;
    let o = duality::p_modular_oracle(&f, &w, &hs, 1)?;
    if o == 0.0 {
        c.close_abs("p_modular_vs_oracle", p, o, 0.0);
    } else {
        c.close("p_modular_vs_oracle", p, o, 1e-5);
    }
    Ok(())
}

fn level_enumeration(rng: &mut ChaCha8Rng, cfg: &Config, case: &mut Option<Case>, id: &str) -> Result<()> {
    let n = rng.gen_range(1..=cfg.size);
    let vals = decreasing((0..n).map(|_| rng.gen_range(1..=32) as f64 / 4.0).collect());
    let atoms: Vec<(f64, f64)> = vals
        .into_iter()
        .map(|v| (v, rng.gen_range(1..=8) as f64 / 4.0))
        .collect();
    let w = step_weight(rng);
    let c = case.insert(Case::new(
        id.into(),
        &json!({ "atoms": atoms, "w": w, "fault": cfg.fault }),
    ));
    let dec = level_of_atoms(StepFunction::new(atoms.clone())?.rearranged().atoms(), &w, cfg.faults());
    let got: Vec<(usize, usize)> = dec.intervals.iter().map(|iv| (iv.first_atom, iv.last_atom)).collect();
    let want = enumerate_level_partitions(&dec.source, &w);
    c.holds("partition_matches_enumeration", want.len() == 1 && want[0] == got);
    Ok(())
}

fn norms_sandwich(rng: &mut ChaCha8Rng, cfg: &Config, case: &mut Option<Case>, id: &str) -> Result<()> {
    let (w, f) = random_element(rng, cfg.size);
    let phi = pick_family(rng);
    let c = case.insert(Case::new(id.into(), &json!({ "phi": family_name(&phi), "w": w, "f": f })));
    let lux = norms::luxemburg_norm(&phi, &w, &f)?;
    let orl = norms::orlicz_norm_amemiya(&phi, &w, &f)?;
    c.row("orlicz_over_luxemburg_lower", orl / lux, 1.0, 1e-10, orl >= lux * (1.0 - 1e-10));
    c.at_most("orlicz_over_luxemburg_upper", orl / lux, 2.0, 1e-10);
    let rho = norms::rho_modular(&phi, &w, &f.scaled(1.0 / lux))?;
    c.at_most("modular_at_unit_sphere", rho, 1.0, 1e-8);
    Ok(())
}

fn norms_kinterval(rng: &mut ChaCha8Rng, cfg: &Config, case: &mut Option<Case>, id: &str) -> Result<()> {
    let (w, f) = random_element(rng, cfg.size);
    let phi = pick_family(rng);
    let c = case.insert(Case::new(id.into(), &json!({ "phi": family_name(&phi), "w": w, "f": f })));
    let kk = norms::k_interval(&phi, &w, &f)?;
    let norm = norms::orlicz_norm_amemiya(&phi, &w, &f)?;
    let mid = 0.5 * (kk.k_star + kk.k_star_star);
    for (name, k) in [("amemiya_at_k_star", kk.k_star), ("amemiya_at_k_mid", mid), ("amemiya_at_k_star_star", kk.k_star_star)] {
        let v = (1.0 + norms::rho_modular(&phi, &w, &f.scaled(k))?) / k;
        c.close(name, v, norm, 1e-8);
    }
    Ok(())
}

fn norms_dual_sup(rng: &mut ChaCha8Rng, cfg: &Config, case: &mut Option<Case>, id: &str) -> Result<()> {
    let n = rng.gen_range(1..=cfg.size.max(1));
    let mut e = rational_entries(rng, n);
    e[0] = e[0].max(0.25);
    let ws = seq_weights(rng, n);
    let phi = pick_family(rng);
    let c = case.insert(Case::new(id.into(), &json!({ "phi": family_name(&phi), "w": ws, "f": e })));
    let w = Weight::new(WeightKind::SeqExplicit { values: ws })?;
    let fs = FiniteSequence::new(e)?;
    let a = norms::orlicz_norm_amemiya(&phi, &w, &Element::Sequence(fs.clone()))?;
    let o = norms::orlicz_norm_dual_sup_oracle(&phi, &w, &fs)?;
    c.close("dual_sup_vs_amemiya", o, a, 1e-4);
    Ok(())
}

fn duality_young_witness(rng: &mut ChaCha8Rng, _: &Config, case: &mut Option<Case>, id: &str) -> Result<()> {
    let n = rng.gen_range(1..=5);
    let atoms = step_atoms(rng, n, false);
    let w = step_weight(rng);
    let phi = pick_family(rng);
    let c = case.insert(Case::new(id.into(), &json!({ "phi": family_name(&phi), "w": w, "h": atoms })));
    let yw = duality::young_witness(&phi, &w, &StepFunction::new(atoms)?)?;
    let d = yw.diagnostics;
    c.close("dual_modular_identity", d.p_witness, d.p_level, 1e-9);
    c.close("young_equality_identity", d.young_v, d.young_w, 1e-9);
    Ok(())
}

fn duality_additivity(rng: &mut ChaCha8Rng, cfg: &Config, case: &mut Option<Case>, id: &str) -> Result<()> {
    let n = rng.gen_range(1..=cfg.size);
    let atoms = step_atoms(rng, n, false);
    let w = step_weight(rng);
    let phi = pick_family(rng);
    let s = if rng.gen_bool(0.25) { 0.0 } else { rng.gen_range(0.05..2.0) };
    let c = case.insert(Case::new(
        id.into(),
        &json!({ "phi": family_name(&phi), "w": w, "h": atoms, "s": s }),
    ));
    let h = Element::step(atoms)?;
    let conj = phi.conjugate();
    let lux_side = duality::functional_norm_luxemburg_side(&phi, &w, &h, s)?;
    let dual_orlicz = duality::dual_orlicz_norm(&conj, &w, &h)?;
    c.row("luxemburg_side_is_additive", lux_side, dual_orlicz + s, 0.0, lux_side == dual_orlicz + s);
    let orlicz_side = duality::functional_norm_orlicz_side(&phi, &w, &h, s)?;
    let additive = duality::dual_luxemburg_norm(&conj, &w, &h)? + s;
    c.at_most("orlicz_side_at_most_additive", orlicz_side, additive, 1e-8);
    let equal = (orlicz_side - additive).abs() <= 1e-8 * additive;
    c.row("orlicz_side_equal_iff_no_singular_part", orlicz_side, additive, 1e-8, equal == (s == 0.0));
    Ok(())
}

fn duality_non_m_ideal(rng: &mut ChaCha8Rng, _: &Config, case: &mut Option<Case>, id: &str) -> Result<()> {
    // phi*(u) = u^2/2 > 1/W(10) needs u > sqrt(0.2)
    let s = rng.gen_range(0.05..0.95);
    let u = rng.gen_range(0.5..3.0);
    let c = case.insert(Case::new(id.into(), &json!({ "s": s, "u": u })));
    let phi = OrliczFunction::power(2.0, 0.5)?;
    let r = duality::non_m_ideal_witness(&phi, &Weight::constant(Some(10.0)), s, u)?;
    c.row("gap", r.report.gap, 0.0, 0.0, r.report.gap > 0.0);
    c.close_abs("dual_luxemburg", r.dual_luxemburg, 1.0 - s, 1e-9);
    c.row("p_strict", r.p_modular, 1.0 - s, 0.0, r.p_strict);
    c.row("orlicz_side_strict", r.report.orlicz_side_norm, 1.0, 0.0, r.orlicz_strict);
    Ok(())
}

fn duality_holder(rng: &mut ChaCha8Rng, cfg: &Config, case: &mut Option<Case>, id: &str) -> Result<()> {
    let (nf, nh) = (rng.gen_range(1..=cfg.size), rng.gen_range(1..=cfg.size));
    let f = step_atoms(rng, nf, true);
    let h = step_atoms(rng, nh, false);
    let w = step_weight(rng);
    let phi = pick_family(rng);
    let c = case.insert(Case::new(
        id.into(),
        &json!({ "phi": family_name(&phi), "w": w, "f": f, "h": h }),
    ));
    let r = duality::holder_check(&phi, &w, &Element::step(f)?, &Element::step(h)?)?;
    c.at_most("pairing_vs_luxemburg_bound", r.pairing, r.bound_lux_orlicz, 1e-10);
    c.at_most("pairing_vs_orlicz_bound", r.pairing, r.bound_orlicz_lux, 1e-10);
    Ok(())
}

fn anchors_closed_form(_: &mut ChaCha8Rng, _: &Config, case: &mut Option<Case>, id: &str) -> Result<()> {
    let c = case.insert(Case::new(id.into(), &json!({ "phi": "t^2/2", "w": "1 on [0,10)", "f": "chi(0,1)" })));
    let phi = OrliczFunction::power(2.0, 0.5)?;
    let w = Weight::constant(Some(10.0));
    let f = Element::indicator(1.0);
    c.close_abs("luxemburg", norms::luxemburg_norm(&phi, &w, &f)?, std::f64::consts::FRAC_1_SQRT_2, 1e-9);
    c.close_abs("orlicz", norms::orlicz_norm_amemiya(&phi, &w, &f)?, std::f64::consts::SQRT_2, 1e-9);
    Ok(())
}

fn anchors_witness(_: &mut ChaCha8Rng, _: &Config, case: &mut Option<Case>, id: &str) -> Result<()> {
    let c = case.insert(Case::new(id.into(), &json!({ "phi": "t^2/2", "w": "1 on [0,10)", "s": 0.5, "u": 1.0 })));
    let phi = OrliczFunction::power(2.0, 0.5)?;
    let r = duality::non_m_ideal_witness(&phi, &Weight::constant(Some(10.0)), 0.5, 1.0)?;
    let golden = (5f64.sqrt() + 1.0) / 2.0;
    c.close_abs("dual_luxemburg", r.dual_luxemburg, 0.5, 1e-9);
    c.close_abs("p_modular", r.p_modular, 0.25, 1e-9);
    c.close_abs("orlicz_side_norm", r.report.orlicz_side_norm, golden / 2.0, 1e-6);
    c.close_abs("gap", r.report.gap, 1.0 - golden / 2.0, 1e-6);
    c.holds("strict_inequalities", r.p_strict && r.orlicz_strict);
    Ok(())
}

fn theta_finite(rng: &mut ChaCha8Rng, cfg: &Config, case: &mut Option<Case>, id: &str) -> Result<()> {
    let (w, f) = random_element(rng, cfg.size);
    let phi = pick_family(rng);
    let c = case.insert(Case::new(id.into(), &json!({ "phi": family_name(&phi), "w": w, "f": f })));
    let th = norms::theta(&phi, &w, &f)?;
    c.row("theta_finite_support", th, 0.0, 0.0, th == 0.0);
    Ok(())
}

/// Truncation indices for the remainder sweep.
pub const SWEEP: [u64; 9] = [2, 4, 8, 16, 32, 64, 128, 256, 512];

fn theta_profiles(_: &mut ChaCha8Rng, _: &Config, case: &mut Option<Case>, id: &str) -> Result<()> {
    let c = case.insert(Case::new(id.into(), &json!({ "phi": "exp_type", "w": 1.0, "f": "log_tail c=1" })));
    let phi = OrliczFunction::exp_type();
    let w = Weight::constant(None);
    let f = Element::Profile(Profile::full(Shape::LogTail { c: 1.0 })?);
    let th = norms::theta(&phi, &w, &f)?;
    c.close_abs("theta_log_tail", th, 1.0, 0.05);
    let mut lux = Vec::new();
    let mut orl = Vec::new();
    for n in SWEEP {
        let rest = norms::truncation_remainder(&f, n)?;
        lux.push(norms::luxemburg_norm(&phi, &w, &rest)?);
        orl.push(norms::orlicz_norm_amemiya(&phi, &w, &rest)?);
    }
    for (name, v) in [("luxemburg", &lux), ("orlicz", &orl)] {
        let mono = v.windows(2).all(|p| p[1] < p[0]);
        c.holds(&format!("{name}_remainder_decreasing"), mono);
        let low = v.iter().cloned().fold(f64::INFINITY, f64::min);
        c.row(&format!("{name}_remainder_above_theta"), low, th, 0.05, low >= th * 0.95);
        let last = *v.last().unwrap();
        c.close(&format!("{name}_remainder_at_n512"), last, th, 0.05);
    }
    let ndz = OrliczFunction::non_delta2_zero();
    let sw = Weight::sequence_constant(1.0)?;
    let g = Element::Profile(Profile::full(Shape::SeqLog { c: 0.05 })?);
    c.close("theta_seq_log_non_delta2", norms::theta(&ndz, &sw, &g)?, 0.05, 0.01);
    Ok(())
}
