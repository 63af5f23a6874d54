//! Batch command-line interface.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::algo::{dy_closure, Message};
use crate::decision::{
    audit_axioms, construct_theorem1, construct_theorem4, decide, decide_valid, AuditOptions,
    Theorem4Kind, Witness,
};
use crate::document::{load_structure, save_structure, to_value};
use crate::error::DecisionError;
use crate::formula::Formula;
use crate::implicit::{induce, parse_rules, policy_example, primality_example, primality_test, refine, ImplicitStructure};
use crate::model;
use crate::structures::{Approach, ClassTag, EpistemicStructure};

#[derive(Parser, Debug)]
#[command(name = "omniscope", version, about = "Epistemic logic without logical omniscience")]
struct Cli {
    /// Machine-readable output.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Subcommand, Debug)]
enum Verb {
    /// Parse a formula and print its canonical form.
    Parse {
        #[arg(long)]
        formula: String,
    },
    /// Model-check a formula at a world of a structure document.
    Check {
        #[arg(long)]
        structure: PathBuf,
        #[arg(long)]
        world: String,
        #[arg(long)]
        formula: String,
    },
    /// Decide satisfiability in a class.
    Sat(Decide),
    /// Decide validity in a class.
    Valid(Decide),
    /// Test the axiom catalogue against a class.
    Audit {
        #[arg(long)]
        class: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        instances: usize,
        #[arg(long, default_value_t = 2)]
        vocabulary: usize,
    },
    /// Build a one-world structure knowing exactly the given formulas.
    #[command(name = "construct-t1")]
    ConstructT1 {
        #[arg(long, value_enum)]
        approach: T1Approach,
        /// A known formula (repeatable).
        #[arg(long)]
        known: Vec<String>,
        /// A formula that must hold (repeatable).
        #[arg(long)]
        fact: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build a KD45 (or S5) structure from a known set and a closed set.
    #[command(name = "construct-t4")]
    ConstructT4 {
        #[arg(long, value_enum)]
        kind: T4Kind,
        #[arg(long)]
        known: Vec<String>,
        /// A member of the downward-closed set (repeatable).
        #[arg(long)]
        closed: Vec<String>,
        #[arg(long)]
        s5: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Dolev-Yao extraction from intercepted messages.
    Dy {
        /// An intercepted message (repeatable).
        #[arg(long)]
        intercepted: Vec<String>,
        /// Query message; without it the closure is printed.
        #[arg(long)]
        message: Option<String>,
    },
    /// Induce an impossible-worlds structure from an implicit one.
    Induce(Implicit),
    /// Keep only the worlds passing a stricter test, then induce.
    Refine {
        #[command(flatten)]
        source: Implicit,
        /// Worlds to keep; primality defaults to the ground-truth test.
        #[arg(long, value_delimiter = ',')]
        keep: Vec<String>,
    },
}

#[derive(Args, Debug)]
struct Decide {
    #[arg(long)]
    class: String,
    #[arg(long)]
    formula: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct Implicit {
    /// Numbers whose primality is unknown, comma separated.
    #[arg(long, value_delimiter = ',', conflicts_with = "rules")]
    primality: Vec<u64>,
    /// Rule file, one `lits -> lits` rule per line.
    #[arg(long)]
    rules: Option<PathBuf>,
    /// Extra antecedent propositions, comma separated.
    #[arg(long, value_delimiter = ',')]
    facts: Vec<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum T1Approach {
    Syntactic,
    Awareness,
    Algorithmic,
    Impossible,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum T4Kind {
    Awareness,
    Impossible,
}

enum Failure {
    Usage(String),
    Internal(String),
}

impl From<DecisionError> for Failure {
    fn from(e: DecisionError) -> Self {
        match e {
            DecisionError::Invariant(_) => Failure::Internal(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

fn usage(e: impl ToString) -> Failure {
    Failure::Usage(e.to_string())
}

/// Runs one command; returns the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let shown = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{shown}");
                    0
                }
                _ => {
                    let _ = write!(err, "{shown}");
                    1
                }
            };
        }
    };
    match execute(&cli, out) {
        Ok(()) => 0,
        Err(Failure::Usage(m)) => {
            let _ = writeln!(err, "error: {m}");
            1
        }
        Err(Failure::Internal(m)) => {
            let _ = writeln!(err, "internal error: {m}");
            2
        }
    }
}

fn formula(s: &str) -> Result<Formula, Failure> {
    s.parse().map_err(|e| usage(format!("formula `{s}`: {e}")))
}

fn formulas(xs: &[String]) -> Result<BTreeSet<Formula>, Failure> {
    xs.iter().map(|x| formula(x)).collect()
}

fn class(s: &str) -> Result<ClassTag, Failure> {
    s.parse().map_err(usage)
}

fn emit(out: &mut dyn Write, text: &str) -> Result<(), Failure> {
    writeln!(out, "{text}").map_err(|e| Failure::Internal(e.to_string()))
}

fn write_doc(path: &Option<PathBuf>, s: &EpistemicStructure) -> Result<(), Failure> {
    if let Some(p) = path {
        std::fs::write(p, save_structure(s) + "\n").map_err(|e| usage(format!("{}: {e}", p.display())))?;
    }
    Ok(())
}

fn witness_json(w: &Option<Witness>) -> Value {
    match w {
        Some(w) => json!({"world": w.world, "structure": to_value(&w.structure)}),
        None => Value::Null,
    }
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Result<(), Failure> {
    let as_json = cli.json;
    match &cli.verb {
        Verb::Parse { formula: text } => {
            let f = formula(text)?;
            if as_json {
                let v = json!({
                    "formula": f.render(),
                    "size": f.size(),
                    "propositional": f.is_propositional(),
                    "likelihood": f.has_likelihood(),
                });
                emit(out, &v.to_string())
            } else {
                emit(out, &f.render())
            }
        }
        Verb::Check {
            structure,
            world,
            formula: text,
        } => {
            let src = std::fs::read_to_string(structure)
                .map_err(|e| usage(format!("{}: {e}", structure.display())))?;
            let s = load_structure(&src).map_err(usage)?;
            let broken = s.validate();
            if !broken.is_empty() {
                return Err(usage(format!("{}: {}", structure.display(), broken.join("; "))));
            }
            let f = formula(text)?;
            let holds = model::holds(&s, world, &f).map_err(usage)?;
            if as_json {
                emit(out, &json!({ "holds": holds }).to_string())
            } else {
                emit(out, if holds { "true" } else { "false" })
            }
        }
        Verb::Sat(d) => {
            let (tag, f) = (class(&d.class)?, formula(&d.formula)?);
            let v = decide(&f, tag)?;
            if let Some(w) = &v.witness {
                write_doc(&d.out, &w.structure)?;
            }
            if as_json {
                let doc = json!({
                    "result": if v.satisfiable { "SAT" } else { "UNSAT" },
                    "bound_used": v.bound_used,
                    "witness": witness_json(&v.witness),
                });
                return emit(out, &doc.to_string());
            }
            emit(out, if v.satisfiable { "SAT" } else { "UNSAT" })?;
            if let Some(w) = &v.witness {
                emit(out, &format!("world: {}", w.world))?;
                emit(out, &save_structure(&w.structure))?;
            }
            Ok(())
        }
        Verb::Valid(d) => {
            let (tag, f) = (class(&d.class)?, formula(&d.formula)?);
            let v = decide_valid(&f, tag)?;
            if let Some(w) = &v.countermodel {
                write_doc(&d.out, &w.structure)?;
            }
            if as_json {
                let doc = json!({
                    "valid": v.valid,
                    "countermodel": witness_json(&v.countermodel),
                });
                return emit(out, &doc.to_string());
            }
            emit(out, if v.valid { "VALID" } else { "NOT VALID" })?;
            if let Some(w) = &v.countermodel {
                emit(out, &format!("world: {}", w.world))?;
                emit(out, &save_structure(&w.structure))?;
            }
            Ok(())
        }
        Verb::Audit {
            class: c,
            seed,
            instances,
            vocabulary,
        } => {
            let tag = class(c)?;
            let opts = AuditOptions {
                vocabulary_size: *vocabulary,
                instances: *instances,
                seed: *seed,
            };
            let report = audit_axioms(tag, &opts)?;
            if as_json {
                let rows: Vec<Value> = report
                    .results
                    .values()
                    .map(|r| {
                        json!({
                            "axiom": r.axiom.as_str(),
                            "valid": r.valid,
                            "tested": r.tested,
                            "counterexample": r.counterexample.as_ref().map(|c| json!({
                                "instance": c.instance.render(),
                                "world": c.witness.world,
                                "structure": to_value(&c.witness.structure),
                            })),
                        })
                    })
                    .collect();
                return emit(out, &json!({ "class": tag.to_string(), "axioms": rows }).to_string());
            }
            emit(out, &format!("class {tag}"))?;
            for r in report.results.values() {
                let verdict = if r.valid { "valid" } else { "refuted" };
                let line = match &r.counterexample {
                    Some(c) => format!("{:<9} {:<8} {:>4}  {}", r.axiom.as_str(), verdict, r.tested, c.instance),
                    None => format!("{:<9} {:<8} {:>4}", r.axiom.as_str(), verdict, r.tested),
                };
                emit(out, line.trim_end())?;
            }
            Ok(())
        }
        Verb::ConstructT1 {
            approach,
            known,
            fact,
            out: path,
        } => {
            let approach = match approach {
                T1Approach::Syntactic => Approach::Syntactic,
                T1Approach::Awareness => Approach::Awareness,
                T1Approach::Algorithmic => Approach::Algorithmic,
                T1Approach::Impossible => Approach::Impossible,
            };
            let g: Vec<Formula> = fact.iter().map(|x| formula(x)).collect::<Result<_, _>>()?;
            let s = construct_theorem1(&formulas(known)?, &g, approach)?;
            write_doc(path, &s)?;
            emit(out, &save_structure(&s))
        }
        Verb::ConstructT4 {
            kind,
            known,
            closed,
            s5,
            out: path,
        } => {
            let kind = match kind {
                T4Kind::Awareness => Theorem4Kind::Awareness,
                T4Kind::Impossible => Theorem4Kind::Impossible,
            };
            let s = construct_theorem4(&formulas(known)?, &formulas(closed)?, kind, *s5)?;
            write_doc(path, &s)?;
            emit(out, &save_structure(&s))
        }
        Verb::Dy {
            intercepted,
            message,
        } => {
            let h: Vec<Message> = intercepted
                .iter()
                .map(|m| Message::parse(m).map_err(usage))
                .collect::<Result<_, _>>()?;
            let closure = dy_closure(&h);
            match message {
                Some(m) => {
                    let m = Message::parse(m).map_err(usage)?;
                    let yes = closure.contains(&m);
                    if as_json {
                        emit(out, &json!({ "message": m.render(), "derivable": yes }).to_string())
                    } else {
                        emit(out, if yes { "Yes" } else { "No" })
                    }
                }
                None => {
                    let all: Vec<String> = closure.iter().map(Message::render).collect();
                    if as_json {
                        emit(out, &json!({ "closure": all }).to_string())
                    } else {
                        for m in all {
                            emit(out, &m)?;
                        }
                        Ok(())
                    }
                }
            }
        }
        Verb::Induce(src) => {
            let i = implicit(src)?;
            let s = induce(&i);
            write_doc(&src.out, &s)?;
            emit(out, &save_structure(&s))
        }
        Verb::Refine { source, keep } => {
            let i = implicit(source)?;
            let r = if keep.is_empty() {
                if source.primality.is_empty() {
                    return Err(usage("--keep is required unless refining a primality example"));
                }
                refine(&i, primality_test)
            } else {
                let keep: BTreeSet<&str> = keep.iter().map(String::as_str).collect();
                refine(&i, |w, _| keep.contains(w))
            }
            .map_err(usage)?;
            let s = induce(&r);
            write_doc(&source.out, &s)?;
            emit(out, &save_structure(&s))
        }
    }
}

fn implicit(src: &Implicit) -> Result<ImplicitStructure, Failure> {
    if let Some(path) = &src.rules {
        let text = std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
        let rules = parse_rules(&text).map_err(usage)?;
        return policy_example(&rules, &src.facts).map_err(usage);
    }
    primality_example(&src.primality).map_err(usage)
}
