//! Command-line front end for the motivic integration engines.

mod io;

use clap::{Parser, Subcommand};
use io::{Outcome, Output};
use motint::atomic::{self, PresburgerSet};
use motint::functions::{self, FunctionV};
use motint::measure::{self, MotivicFunction};
use motint::model::{self, BlowupSpec, ModelMorphism};
use motint::polyhedra::PolySet;
use motint::rational::parse_rat;
use motint::ring::{AtomicClass, ClassOrder};
use motint::{Error, Rat};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "motint", version, about = "Exact motivic integration on skeleta of SNC models")]
struct Cli {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Evaluate strata and cells in parallel (results are identical).
    #[arg(long, global = true)]
    parallel: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate a document.
    Validate {
        file: PathBuf,
        /// Document kind.
        #[arg(long, value_enum, default_value = "model")]
        kind: io::Kind,
        /// Model to validate sets, functions and cells against.
        #[arg(long)]
        model: Option<PathBuf>,
    },
    /// Motivic volume of a polyhedral set (default: the whole skeleton).
    Volume { model: PathBuf, set: Option<PathBuf> },
    /// Integral of a constructible motivic function.
    Integrate { model: PathBuf, function: PathBuf },
    /// Integral of `exp(-s · ord_Z)` over the skeleton.
    IdealPower {
        model: PathBuf,
        #[arg(long, default_value = "Z")]
        ideal: String,
        #[arg(long, allow_hyphen_values = true)]
        s: String,
    },
    /// Stringy class `Σ [D_I°] / ∏ a_i`.
    Stringy { model: PathBuf },
    /// Log canonical threshold `min a_i / b_i`.
    Lct {
        model: PathBuf,
        #[arg(long, default_value = "Z")]
        ideal: String,
    },
    /// Euler characteristic specialization of the volume of a set.
    Chi {
        model: PathBuf,
        /// JSON object mapping class symbols to rationals.
        #[arg(long)]
        table: PathBuf,
        set: Option<PathBuf>,
    },
    /// Blow up a center; writes the new model and prints the blow-down morphism.
    Blowup {
        model: PathBuf,
        spec: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Where to write the blow-down morphism.
        #[arg(long)]
        morphism: Option<PathBuf>,
    },
    /// Compare volume (and integral) before and after a blow-up.
    CheckBlowup {
        model: PathBuf,
        spec: PathBuf,
        #[arg(long)]
        set: Option<PathBuf>,
        #[arg(long)]
        function: Option<PathBuf>,
    },
    /// Push a function on the skeleton forward along a morphism.
    Pushforward { source: PathBuf, target: PathBuf, morphism: PathBuf, function: PathBuf },
    /// Integral of a function on the skeleton.
    IntegrateV { model: PathBuf, function: PathBuf },
    /// Check `b_!(b^* f · g) = f · b_!(g)`.
    CheckProjection { source: PathBuf, target: PathBuf, morphism: PathBuf, f: PathBuf, g: PathBuf },
    /// Check `(q∘b)_! = q_! ∘ b_!` and compatibility with integration.
    CheckFunctoriality { x: PathBuf, y: PathBuf, z: PathBuf, b: PathBuf, q: PathBuf, g: PathBuf },
    /// Check `∫ e^{-ord K} f` against the integral on the twisted model.
    CheckChangeOfVariables {
        model: PathBuf,
        #[arg(long)]
        jacobian: String,
        function: Option<PathBuf>,
    },
    /// Atomic volume of a union of lattice cells (default: all integral points).
    AtomicVolume { model: PathBuf, cells: Option<PathBuf> },
    /// Atomic integral of lattice terms.
    AtomicIntegrate { model: PathBuf, terms: PathBuf },
    /// Push lattice terms forward along a morphism.
    AtomicPushforward { source: PathBuf, target: PathBuf, morphism: PathBuf, terms: PathBuf },
    /// Compare atomic volumes before and after a blow-up.
    CheckAtomicBlowup { model: PathBuf, spec: PathBuf, cells: Option<PathBuf> },
    /// Compare the L → 1 limit of the atomic volume with the real volume.
    CrossCheckL1 { model: PathBuf },
    /// Specialize an atomic class at `L = q` or in the limit `L → 1`.
    Specialize {
        class: PathBuf,
        #[arg(long, conflicts_with = "l1", required_unless_present = "l1")]
        q: Option<String>,
        #[arg(long)]
        l1: bool,
        /// Model whose strata order the printed monomials.
        #[arg(long)]
        model: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let out = Output { json: cli.json };
    let result = run(cli.command, cli.parallel, &out);
    out.finish(result)
}

fn rat_arg(s: &str, what: &str) -> Result<Rat, Outcome> {
    parse_rat(s).map_err(|_| Outcome::Usage(format!("{what}: `{s}` is not a rational number")))
}

fn run(cmd: Command, parallel: bool, out: &Output) -> Result<(), Outcome> {
    match cmd {
        Command::Validate { file, kind, model } => {
            let m = model.as_deref().map(io::load_model).transpose()?;
            io::validate(&file, kind, m.as_ref())?;
            out.message("ok", serde_json::json!({"valid": true}));
        }
        Command::Volume { model, set } => {
            let m = io::load_model(&model)?;
            let s = match set {
                Some(p) => io::load::<PolySet>(&p)?,
                None => m.full_skeleton(),
            };
            out.mot(&m.class_order(), &io::at(&model, measure::measure_with(&m, &s, parallel))?);
        }
        Command::Integrate { model, function } => {
            let m = io::load_model(&model)?;
            let f = io::parse(&function, MotivicFunction::from_json)?;
            out.mot(&m.class_order(), &io::at(&function, measure::integrate_with(&m, &f, parallel))?);
        }
        Command::IdealPower { model, ideal, s } => {
            let m = io::load_model(&model)?;
            let s = rat_arg(&s, "--s")?;
            out.mot(&m.class_order(), &io::at(&model, measure::integrate_ideal_power(&m, &ideal, &s))?);
        }
        Command::Stringy { model } => {
            let m = io::load_model(&model)?;
            out.mot(&m.class_order(), &io::at(&model, measure::stringy_class(&m))?);
        }
        Command::Lct { model, ideal } => {
            let m = io::load_model(&model)?;
            let c = io::at(&model, model::mather_lct(&m, &ideal))?;
            out.rational("lct", &c);
        }
        Command::Chi { model, table, set } => {
            let m = io::load_model(&model)?;
            let t = io::load_table(&table)?;
            let s = match set {
                Some(p) => io::load::<PolySet>(&p)?,
                None => m.full_skeleton(),
            };
            out.rational("chi", &io::at(&model, measure::euler_measure(&m, &t, &s))?);
        }
        Command::Blowup { model, spec, output, morphism } => {
            let m = io::load_model(&model)?;
            let sp = io::parse(&spec, BlowupSpec::from_json)?;
            let (new_model, phi) = io::at(&spec, model::blow_up(&m, &sp))?;
            let phi_json = serde_json::to_string_pretty(&phi).expect("morphism serializes");
            if let Some(p) = &morphism {
                io::write(p, &phi_json)?;
            }
            match output {
                Some(p) => {
                    io::write(&p, &new_model.to_json())?;
                    if morphism.is_none() {
                        println!("{phi_json}");
                    }
                }
                None => println!("{}", new_model.to_json()),
            }
        }
        Command::CheckBlowup { model, spec, set, function } => {
            let m = io::load_model(&model)?;
            let sp = io::parse(&spec, BlowupSpec::from_json)?;
            let s = match set {
                Some(p) => io::load::<PolySet>(&p)?,
                None => m.full_skeleton(),
            };
            let f = function.as_deref().map(|p| io::parse(p, MotivicFunction::from_json)).transpose()?;
            let reports = io::at(&spec, measure::check_blowup_invariance(&m, &sp, &s, f.as_ref()))?;
            let order = m.class_order();
            let labels = ["volume", "integral"];
            let pairs: Vec<(&str, &measure::CheckReport)> = labels.iter().copied().zip(reports.iter()).collect();
            return out.reports(&order, &pairs);
        }
        Command::Pushforward { source, target, morphism, function } => {
            let (x, y, phi) = io::load_morphism(&source, &target, &morphism)?;
            let g = io::parse(&function, FunctionV::from_json)?;
            let pushed = io::at(&function, functions::pushforward(&x, &y, &phi, &g))?;
            out.function_v(&y.class_order(), &pushed);
        }
        Command::IntegrateV { model, function } => {
            let m = io::load_model(&model)?;
            let g = io::parse(&function, FunctionV::from_json)?;
            out.mot(&m.class_order(), &io::at(&function, functions::integrate_v(&m, &g))?);
        }
        Command::CheckProjection { source, target, morphism, f, g } => {
            let (x, y, phi) = io::load_morphism(&source, &target, &morphism)?;
            let f = io::parse(&f, MotivicFunction::from_json)?;
            let gv = io::parse(&g, FunctionV::from_json)?;
            let ok = io::at(&g, functions::check_projection_formula(&x, &y, &phi, &f, &gv))?;
            return out.verdicts(&[("projection formula", ok)]);
        }
        Command::CheckFunctoriality { x, y, z, b, q, g } => {
            let (mx, my, mb) = io::load_morphism(&x, &y, &b)?;
            let mz = io::load_model(&z)?;
            let mq = io::parse(&q, ModelMorphism::from_json)?;
            io::at(&q, mq.validate(&my, &mz))?;
            let gv = io::parse(&g, FunctionV::from_json)?;
            let r = io::at(&g, functions::check_functoriality(&mx, &my, &mz, &mb, &mq, &gv))?;
            return out.verdicts(&[("composition", r.composition), ("fubini first step", r.fubini_first), ("fubini second step", r.fubini_second)]);
        }
        Command::CheckChangeOfVariables { model, jacobian, function } => {
            let m = io::load_model(&model)?;
            let f = function.as_deref().map(|p| io::parse(p, MotivicFunction::from_json)).transpose()?;
            let r = io::at(&model, measure::change_of_variables_check(&m, &jacobian, f.as_ref()))?;
            return out.reports(&m.class_order(), &[("change of variables", &r)]);
        }
        Command::AtomicVolume { model, cells } => {
            let m = io::load_model(&model)?;
            let s = match cells {
                Some(p) => io::parse(&p, PresburgerSet::from_json)?,
                None => PresburgerSet::full_skeleton(&m),
            };
            out.atomic(&m.class_order(), &io::at(&model, atomic::atomic_measure_with(&m, &s, parallel))?);
        }
        Command::AtomicIntegrate { model, terms } => {
            let m = io::load_model(&model)?;
            let t = io::parse(&terms, atomic::terms_from_json)?;
            out.atomic(&m.class_order(), &io::at(&terms, atomic::atomic_integrate_with(&m, &t, parallel))?);
        }
        Command::AtomicPushforward { source, target, morphism, terms } => {
            let (x, y, phi) = io::load_morphism(&source, &target, &morphism)?;
            let t = io::parse(&terms, atomic::terms_from_json)?;
            let pushed = io::at(&terms, atomic::atomic_pushforward(&x, &y, &phi, &t))?;
            out.terms(&y.class_order(), &pushed);
        }
        Command::CheckAtomicBlowup { model, spec, cells } => {
            let m = io::load_model(&model)?;
            let sp = io::parse(&spec, BlowupSpec::from_json)?;
            let s = match cells {
                Some(p) => io::parse(&p, PresburgerSet::from_json)?,
                None => PresburgerSet::full_skeleton(&m),
            };
            let r = io::at(&spec, atomic::check_atomic_blowup(&m, &sp, &s))?;
            return out.atomic_report(&m.class_order(), &r);
        }
        Command::CrossCheckL1 { model } => {
            let m = io::load_model(&model)?;
            let (a, r, equal) = io::at(&model, atomic::cross_check_l1(&m))?;
            let report = measure::CheckReport { lhs: a, rhs: r, equal };
            return out.reports(&m.class_order(), &[("L -> 1 limit", &report)]);
        }
        Command::Specialize { class, q, l1, model } => {
            let order = match model {
                Some(p) => io::load_model(&p)?.class_order(),
                None => ClassOrder::default(),
            };
            let c = io::parse(&class, |s| serde_json::from_str::<AtomicClass>(s).map_err(|e| Error::Parse(e.to_string())))?;
            let v = if l1 {
                io::at(&class, c.limit_l1())?
            } else {
                let q = rat_arg(q.as_deref().unwrap_or_default(), "--q")?;
                io::at(&class, c.theta_q(&q))?
            };
            out.mot(&order, &v);
        }
    }
    Ok(())
}
