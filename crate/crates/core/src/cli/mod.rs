//! Command-line front end: loads space and element descriptors, runs one
//! computation or the verification suite and writes a JSON or CSV report.

pub mod emit;
pub mod spec;
pub mod verify;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::duality;
use crate::error::Error;
use crate::level;
use crate::norms;
use crate::rearrange::Element;
use emit::{cell, Table};
use spec::{SpaceSpec, SpecError};

/// Version tag carried by every report.
pub const SCHEMA: &str = "olk/1";

#[derive(Parser, Debug)]
#[command(name = "olk", version, about = "Norms, dual norms and level functions in Orlicz-Lorentz spaces")]
pub struct Cli {
    /// Report format
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Write the report here instead of stdout
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Which {
    Luxemburg,
    Orlicz,
    Both,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Luxemburg and Orlicz norms of an element
    Norm {
        #[arg(long)]
        space: PathBuf,
        #[arg(long)]
        element: PathBuf,
        #[arg(long, value_enum, default_value_t = Which::Both)]
        norm: Which,
    },
    /// Norms of an element of the dual space, built on the conjugate of phi
    Dualnorm {
        #[arg(long)]
        space: PathBuf,
        #[arg(long)]
        element: PathBuf,
        #[arg(long, value_enum, default_value_t = Which::Both)]
        norm: Which,
    },
    /// Level function of an element against the space weight
    Level {
        #[arg(long)]
        space: PathBuf,
        #[arg(long)]
        element: PathBuf,
    },
    /// The interval of minimizers of the Amemiya objective
    Kinterval {
        #[arg(long)]
        space: PathBuf,
        #[arg(long)]
        element: PathBuf,
    },
    /// Threshold theta and the norms of the truncation remainders
    Theta {
        #[arg(long)]
        space: PathBuf,
        #[arg(long)]
        element: PathBuf,
        /// Truncation indices for the remainder sweep
        #[arg(long, value_delimiter = ',', default_value = "2,4,8,16,32")]
        n: Vec<u64>,
    },
    /// Functional whose two dual norms disagree: h = u w on (0, t0) plus a
    /// singular part of norm s
    Witness {
        #[arg(long)]
        space: PathBuf,
        #[arg(long)]
        s: f64,
        #[arg(long)]
        u: f64,
    },
    /// Pairing of f with h against both Hoelder bounds
    Holder {
        #[arg(long)]
        space: PathBuf,
        #[arg(long)]
        element: PathBuf,
        #[arg(long)]
        dual: PathBuf,
    },
    /// Randomized property suite over every module
    Verify {
        #[arg(long, value_enum, default_value_t = verify::Suite::All)]
        suite: verify::Suite,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Largest support of random finite elements
        #[arg(long, default_value_t = 6)]
        size: usize,
        /// Cases per randomized group (defaults vary by group)
        #[arg(long)]
        cases: Option<usize>,
        /// Deliberately break one computation (negative control)
        #[arg(long, value_enum)]
        inject_fault: Option<verify::Fault>,
    },
}

/// A finished report in both renderings.
#[derive(Debug, Clone)]
pub struct Report {
    pub json: Value,
    pub table: Table,
    /// Some invariant failed (verify only).
    pub violated: bool,
}

impl Report {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => emit::to_json(&self.json),
            Format::Csv => self.table.to_csv(),
        }
    }
}

/// Why a command stopped, with its exit code.
#[derive(Debug, Clone, PartialEq)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl From<SpecError> for Failure {
    fn from(e: SpecError) -> Failure {
        Failure {
            code: 2,
            message: e.to_string(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        let code = match e {
            Error::NonConvergence { .. } | Error::Inconclusive(_) => 1,
            _ => 2,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

/// Exit code of a full invocation: 0 success, 1 numerical failure or I/O,
/// 2 invalid input, 3 violated invariant in `verify`.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let report = match execute(&cli.command) {
        Ok(r) => r,
        Err(f) => {
            eprintln!("olk: {}", f.message);
            return f.code;
        }
    };
    let text = report.render(cli.format);
    let written = match &cli.out {
        Some(p) => std::fs::write(p, text).map_err(|e| format!("{}: {e}", p.display())),
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| e.to_string()),
    };
    if let Err(m) = written {
        eprintln!("olk: {m}");
        return 1;
    }
    if report.violated {
        3
    } else {
        0
    }
}

fn load(space: &Path, element: &Path) -> Result<(SpaceSpec, Element), Failure> {
    Ok((spec::load_space(space)?, spec::load_element(element)?))
}

fn header(command: &str, space: &SpaceSpec) -> serde_json::Map<String, Value> {
    let mut m = serde_json::Map::new();
    m.insert("schema".into(), json!(SCHEMA));
    m.insert("command".into(), json!(command));
    m.insert("space".into(), serde_json::to_value(space).expect("space serializes"));
    m
}

fn scalar_table(pairs: &[(&str, f64)]) -> Table {
    let mut t = Table::new(["quantity", "value"]);
    for (k, v) in pairs {
        t.push(vec![k.to_string(), cell(*v)]);
    }
    t
}

fn finish(mut m: serde_json::Map<String, Value>, pairs: &[(&str, f64)]) -> Report {
    for (k, v) in pairs {
        m.insert(k.to_string(), json!(v));
    }
    Report {
        json: Value::Object(m),
        table: scalar_table(pairs),
        violated: false,
    }
}

/// Runs one parsed command.
pub fn execute(cmd: &Command) -> Result<Report, Failure> {
    match cmd {
        Command::Norm { space, element, norm } => {
            let (sp, f) = load(space, element)?;
            let phi = sp.phi().map_err(invalid)?;
            let w = &sp.weight;
            let mut m = header("norm", &sp);
            m.insert("element".into(), to_value(&f));
            let mut pairs = Vec::new();
            if *norm != Which::Orlicz {
                pairs.push(("luxemburg", norms::luxemburg_norm(&phi, w, &f)?));
            }
            if *norm != Which::Luxemburg {
                let a = norms::orlicz_norm_with_k(&phi, w, &f)?;
                pairs.push(("orlicz", a.norm));
                pairs.push(("orlicz_k", a.k));
            }
            Ok(finish(m, &pairs))
        }
        Command::Dualnorm { space, element, norm } => {
            let (sp, h) = load(space, element)?;
            let conj = sp.phi().map_err(invalid)?.conjugate();
            let w = &sp.weight;
            let mut m = header("dualnorm", &sp);
            m.insert("element".into(), to_value(&h));
            let mut pairs = vec![("p_modular", duality::p_modular(&conj, w, &h)?)];
            if *norm != Which::Orlicz {
                pairs.push(("luxemburg", duality::dual_luxemburg_norm(&conj, w, &h)?));
            }
            if *norm != Which::Luxemburg {
                pairs.push(("orlicz", duality::dual_orlicz_norm(&conj, w, &h)?));
            }
            Ok(finish(m, &pairs))
        }
        Command::Level { space, element } => {
            let (sp, h) = load(space, element)?;
            h.check_against(&sp.weight)?;
            let atoms = h
                .decreasing_atoms()
                .ok_or_else(|| Error::Unsupported("level function of a profile".into()))?;
            let dec = level::level_of_atoms(&atoms, &sp.weight, level::Faults::default());
            let mut m = header("level", &sp);
            m.insert("element".into(), to_value(&h));
            m.insert("intervals".into(), to_value(&dec.intervals));
            m.insert("residual".into(), to_value(&dec.residual));
            if let Some(a) = dec.level_atoms() {
                m.insert("level_atoms".into(), to_value(&a));
            }
            let mut t = Table::new(["a", "b", "ratio", "mass", "weight_mass"]);
            for iv in &dec.intervals {
                t.push(vec![cell(iv.a), cell(iv.b), cell(iv.ratio), cell(iv.mass), cell(iv.weight_mass)]);
            }
            Ok(Report {
                json: Value::Object(m),
                table: t,
                violated: false,
            })
        }
        Command::Kinterval { space, element } => {
            let (sp, f) = load(space, element)?;
            let phi = sp.phi().map_err(invalid)?;
            let k = norms::k_interval(&phi, &sp.weight, &f)?;
            let mut m = header("kinterval", &sp);
            m.insert("element".into(), to_value(&f));
            Ok(finish(
                m,
                &[
                    ("k_star", k.k_star),
                    ("k_star_star", k.k_star_star),
                    ("attained_norm", k.attained_norm),
                ],
            ))
        }
        Command::Theta { space, element, n } => {
            let (sp, f) = load(space, element)?;
            let phi = sp.phi().map_err(invalid)?;
            let w = &sp.weight;
            let th = norms::theta(&phi, w, &f)?;
            let mut m = header("theta", &sp);
            m.insert("element".into(), to_value(&f));
            m.insert("theta".into(), json!(th));
            let mut sweep = Vec::new();
            let mut t = Table::new(["n", "luxemburg", "orlicz", "theta"]);
            for &k in n {
                let rest = norms::truncation_remainder(&f, k)?;
                let lux = norms::luxemburg_norm(&phi, w, &rest)?;
                let orl = norms::orlicz_norm_amemiya(&phi, w, &rest)?;
                sweep.push(json!({"n": k, "luxemburg": lux, "orlicz": orl}));
                t.push(vec![k.to_string(), cell(lux), cell(orl), cell(th)]);
            }
            m.insert("sweep".into(), Value::Array(sweep));
            Ok(Report {
                json: Value::Object(m),
                table: t,
                violated: false,
            })
        }
        Command::Witness { space, s, u } => {
            let sp = spec::load_space(space)?;
            let phi = sp.phi().map_err(invalid)?;
            let r = duality::non_m_ideal_witness(&phi, &sp.weight, *s, *u)?;
            let mut m = header("witness", &sp);
            m.insert("witness".into(), to_value(&r));
            let rep = &r.report;
            let mut out = finish(
                m,
                &[
                    ("u", r.u),
                    ("t0", r.t0),
                    ("p_modular", r.p_modular),
                    ("dual_luxemburg", r.dual_luxemburg),
                    ("lux_side_norm", rep.lux_side_norm),
                    ("orlicz_side_norm", rep.orlicz_side_norm),
                    ("additive_sum", rep.additive_sum),
                    ("gap", rep.gap),
                ],
            );
            for (k, ok) in [
                ("dual_norm_ok", r.dual_norm_ok),
                ("p_strict", r.p_strict),
                ("orlicz_strict", r.orlicz_strict),
            ] {
                out.table.push(vec![k.into(), ok.to_string()]);
            }
            Ok(out)
        }
        Command::Holder { space, element, dual } => {
            let (sp, f) = load(space, element)?;
            let h = spec::load_element(dual)?;
            let phi = sp.phi().map_err(invalid)?;
            let r = duality::holder_check(&phi, &sp.weight, &f, &h)?;
            let mut m = header("holder", &sp);
            m.insert("element".into(), to_value(&f));
            m.insert("dual".into(), to_value(&h));
            m.insert("ok".into(), json!(r.ok));
            let mut out = finish(
                m,
                &[
                    ("pairing", r.pairing),
                    ("bound_lux_orlicz", r.bound_lux_orlicz),
                    ("bound_orlicz_lux", r.bound_orlicz_lux),
                ],
            );
            out.table.push(vec!["ok".into(), r.ok.to_string()]);
            Ok(out)
        }
        Command::Verify {
            suite,
            seed,
            size,
            cases,
            inject_fault,
        } => {
            let cfg = verify::Config {
                suite: *suite,
                seed: *seed,
                size: *size,
                cases: *cases,
                fault: *inject_fault,
                threads: verify::threads_from_env(),
            };
            if cfg.size == 0 || cfg.size > 12 {
                return Err(invalid(format!("--size must be in 1..=12, got {}", cfg.size)));
            }
            Ok(verify::run_suite(&cfg).into_report(&cfg))
        }
    }
}

fn invalid(message: String) -> Failure {
    Failure { code: 2, message }
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report values serialize")
}
