//! Reading documents, mapping errors to exit codes, and printing results.

use clap::ValueEnum;
use motint::atomic::{self, AtomicCheckReport, AtomicTerm, PresburgerSet};
use motint::functions::FunctionV;
use motint::measure::{CheckReport, MotivicFunction};
use motint::model::{BlowupSpec, ModelMorphism, SncModel};
use motint::polyhedra::PolySet;
use motint::rational::{fmt_rat, parse_rat};
use motint::ring::{AtomicClass, ClassOrder, MotClass};
use motint::{Error, Rat};
use serde::de::DeserializeOwned;
use serde::Serialize;
use std::collections::BTreeMap;
use std::path::Path;
use std::process::ExitCode;

/// Why a command did not succeed.
pub enum Outcome {
    Usage(String),
    Domain { path: String, error: Error },
    CheckFailed,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum Kind {
    Model,
    Set,
    Function,
    FunctionV,
    Cells,
    Terms,
    Morphism,
    Blowup,
    Class,
}

/// Attach the offending file to an engine error.
pub fn at<T>(path: &Path, r: motint::Result<T>) -> Result<T, Outcome> {
    r.map_err(|e| {
        if e.is_usage() {
            Outcome::Usage(format!("{}: {e}", path.display()))
        } else {
            Outcome::Domain { path: path.display().to_string(), error: e }
        }
    })
}

pub fn read(path: &Path) -> Result<String, Outcome> {
    std::fs::read_to_string(path).map_err(|e| Outcome::Usage(format!("{}: cannot read: {e}", path.display())))
}

pub fn write(path: &Path, content: &str) -> Result<(), Outcome> {
    std::fs::write(path, format!("{content}\n")).map_err(|e| Outcome::Usage(format!("{}: cannot write: {e}", path.display())))
}

pub fn parse<T>(path: &Path, f: impl FnOnce(&str) -> motint::Result<T>) -> Result<T, Outcome> {
    let s = read(path)?;
    at(path, f(&s))
}

pub fn load<T: DeserializeOwned>(path: &Path) -> Result<T, Outcome> {
    parse(path, |s| serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string())))
}

pub fn load_model(path: &Path) -> Result<SncModel, Outcome> {
    parse(path, SncModel::from_json)
}

pub fn load_morphism(source: &Path, target: &Path, morphism: &Path) -> Result<(SncModel, SncModel, ModelMorphism), Outcome> {
    let x = load_model(source)?;
    let y = load_model(target)?;
    let phi = parse(morphism, ModelMorphism::from_json)?;
    at(morphism, phi.validate(&x, &y))?;
    Ok((x, y, phi))
}

pub fn load_table(path: &Path) -> Result<BTreeMap<String, Rat>, Outcome> {
    let raw: BTreeMap<String, serde_json::Value> = load(path)?;
    let mut out = BTreeMap::new();
    for (k, v) in raw {
        let text = match &v {
            serde_json::Value::String(s) => s.clone(),
            serde_json::Value::Number(n) if n.is_i64() => n.to_string(),
            _ => return Err(Outcome::Usage(format!("{}: value of `{k}` must be a rational string or an integer", path.display()))),
        };
        let r = parse_rat(&text).map_err(|_| Outcome::Usage(format!("{}: value of `{k}` is not rational", path.display())))?;
        out.insert(k, r);
    }
    Ok(out)
}

pub fn validate(path: &Path, kind: Kind, model: Option<&SncModel>) -> Result<(), Outcome> {
    let need = |m: Option<&SncModel>| m.ok_or_else(|| Outcome::Usage("--model is required to validate this kind".into())).map(|m| m.clone());
    match kind {
        Kind::Model => {
            load_model(path)?;
        }
        Kind::Set => {
            let s: PolySet = load(path)?;
            if let Some(m) = model {
                for p in &s.pieces {
                    if !m.has_stratum(&p.face) {
                        return Err(Outcome::Usage(format!("{}: piece on {:?}, which is not a stratum", path.display(), p.face)));
                    }
                }
            }
            for p in &s.pieces {
                at(path, p.validate())?;
            }
            at(path, s.check_disjoint(10_000, 0))?;
        }
        Kind::Function => {
            let f = parse(path, MotivicFunction::from_json)?;
            if let Some(m) = model {
                at(path, f.validate(m))?;
            }
        }
        Kind::FunctionV => {
            let g = parse(path, FunctionV::from_json)?;
            if let Some(m) = model {
                at(path, g.validate(m))?;
            }
        }
        Kind::Cells => {
            let s = parse(path, PresburgerSet::from_json)?;
            at(path, s.check_disjoint(50))?;
            if let Some(m) = model {
                at(path, s.validate(m))?;
            }
        }
        Kind::Terms => {
            parse(path, atomic::terms_from_json)?;
        }
        Kind::Morphism => {
            parse(path, ModelMorphism::from_json)?;
        }
        Kind::Blowup => {
            let spec = parse(path, BlowupSpec::from_json)?;
            let m = need(model)?;
            at(path, motint::model::blow_up(&m, &spec))?;
        }
        Kind::Class => {
            let _: AtomicClass = load(path)?;
        }
    }
    Ok(())
}

pub struct Output {
    pub json: bool,
}

fn pretty<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("output serializes")
}

impl Output {
    pub fn message(&self, text: &str, json: serde_json::Value) {
        if self.json {
            println!("{}", pretty(&json));
        } else {
            println!("{text}");
        }
    }

    pub fn mot(&self, order: &ClassOrder, c: &MotClass) {
        if self.json {
            println!("{}", pretty(c));
        } else {
            println!("{}", order.render_mot(c));
        }
    }

    pub fn atomic(&self, order: &ClassOrder, c: &AtomicClass) {
        if self.json {
            println!("{}", pretty(c));
        } else {
            println!("{}", order.render_atomic(c));
        }
    }

    pub fn rational(&self, key: &str, r: &Rat) {
        self.message(&fmt_rat(r), serde_json::json!({ key: fmt_rat(r) }));
    }

    pub fn function_v(&self, order: &ClassOrder, g: &FunctionV) {
        if self.json {
            println!("{}", g.to_json());
        } else {
            print!("{}", g.render(order));
        }
    }

    pub fn terms(&self, order: &ClassOrder, terms: &[AtomicTerm]) {
        if self.json {
            println!("{}", atomic::terms_to_json(terms));
            return;
        }
        for t in terms {
            println!("{}", render_term(order, t));
        }
    }

    pub fn reports(&self, order: &ClassOrder, reports: &[(&str, &CheckReport)]) -> Result<(), Outcome> {
        if self.json {
            let v: Vec<serde_json::Value> =
                reports.iter().map(|(l, r)| serde_json::json!({"check": l, "equal": r.equal, "lhs": r.lhs, "rhs": r.rhs})).collect();
            println!("{}", pretty(&v));
        } else {
            for (l, r) in reports {
                println!("{l}: {}", if r.equal { "equal" } else { "NOT EQUAL" });
                println!("  lhs: {}", order.render_mot(&r.lhs));
                println!("  rhs: {}", order.render_mot(&r.rhs));
            }
        }
        if reports.iter().all(|(_, r)| r.equal) {
            Ok(())
        } else {
            Err(Outcome::CheckFailed)
        }
    }

    pub fn atomic_report(&self, order: &ClassOrder, r: &AtomicCheckReport) -> Result<(), Outcome> {
        if self.json {
            println!("{}", pretty(&serde_json::json!({"check": "atomic volume", "equal": r.equal, "lhs": r.lhs, "rhs": r.rhs})));
        } else {
            println!("atomic volume: {}", if r.equal { "equal" } else { "NOT EQUAL" });
            println!("  lhs: {}", order.render_atomic(&r.lhs));
            println!("  rhs: {}", order.render_atomic(&r.rhs));
        }
        if r.equal {
            Ok(())
        } else {
            Err(Outcome::CheckFailed)
        }
    }

    pub fn verdicts(&self, checks: &[(&str, bool)]) -> Result<(), Outcome> {
        if self.json {
            let v: Vec<serde_json::Value> = checks.iter().map(|(l, ok)| serde_json::json!({"check": l, "equal": ok})).collect();
            println!("{}", pretty(&v));
        } else {
            for (l, ok) in checks {
                println!("{l}: {}", if *ok { "holds" } else { "FAILS" });
            }
        }
        if checks.iter().all(|(_, ok)| *ok) {
            Ok(())
        } else {
            Err(Outcome::CheckFailed)
        }
    }

    pub fn finish(&self, r: Result<(), Outcome>) -> ExitCode {
        match r {
            Ok(()) => ExitCode::SUCCESS,
            Err(Outcome::CheckFailed) => ExitCode::from(3),
            Err(Outcome::Usage(msg)) => {
                if self.json {
                    eprintln!("{}", pretty(&serde_json::json!({"error": {"kind": "Usage", "message": msg}})));
                } else {
                    eprintln!("error: {msg}");
                }
                ExitCode::from(1)
            }
            Err(Outcome::Domain { path, error }) => {
                if self.json {
                    eprintln!("{}", pretty(&serde_json::json!({"error": {"kind": error.kind(), "file": path, "message": error.to_string()}})));
                } else {
                    eprintln!("error: {path}: {error}");
                }
                ExitCode::from(2)
            }
        }
    }
}

fn render_term(order: &ClassOrder, t: &AtomicTerm) -> String {
    let ints = |v: &[motint::rational::Int]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
    let gens: Vec<String> = t.cell.generators.iter().map(|g| format!("({})", ints(g))).collect();
    let beta: Vec<String> = t.beta.linear.iter().map(fmt_rat).collect();
    let weight: Vec<String> = t
        .weight
        .terms()
        .map(|(p, c)| {
            let mut s = fmt_rat(c);
            for (i, k) in p.iter().enumerate() {
                if *k > 0 {
                    s.push_str(&format!("·x{i}^{k}"));
                }
            }
            s
        })
        .collect();
    let coeff = order.render_atomic(&t.coeff);
    let coeff = if t.includes_stratum { coeff } else { format!("{coeff} (times the stratum class)") };
    format!(
        "{coeff} ⊗ ({})·L^(<({}),x> + {}) on {:?} cell ({}) + N<{}>",
        if weight.is_empty() { "0".to_string() } else { weight.join(" + ") },
        beta.join(","),
        fmt_rat(&t.beta.constant),
        t.cell.face,
        ints(&t.cell.offset),
        gens.join(", ")
    )
}
