//! `finmod`: command-line front end to the finmod library.
//!
//! Exit codes: 0 positive verdict, 1 negative verdict, 2 usage or input
//! error, 3 budget exhausted.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use finmod::definability::{
    define_class_at_size, delta_check, eta, eta_prime, sigma_membership, ProjectionDefinition,
    Reading,
};
use finmod::evaluator::{
    builtin_class, eval_sentence, eval_value, ClassOracle, Env, QInterpretation,
};
use finmod::operations::{
    builtin_global, describes, is_bijection_invariant, is_permutation_invariant, parse_operation,
    LocalOperation,
};
use finmod::proofs::{check_proof, parse_proof, soundness_scan, Verdict};
use finmod::spectra::{ls_check, spectrum, CardinalClassSpec, LsVerdict, Target};
use finmod::structures::{
    enumerate_structures, isomorphism_classes, parse_structure, render_structure, Structure,
    Vocabulary,
};
use finmod::syntax::{parse, Formula};
use finmod::Error;

#[derive(Parser)]
#[command(name = "finmod", version, about = "Finite model theory workbench")]
struct Cli {
    /// Report format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Maximum number of structures (or search steps) a command may visit.
    #[arg(long, default_value_t = finmod::structures::DEFAULT_BUDGET, global = true)]
    budget: u128,
    /// Seed for randomized sampling.
    #[arg(long, default_value_t = 0, global = true)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum QReading {
    Hartig,
    Rescher,
    WellOrder,
}

#[derive(Args)]
struct FormulaArg {
    /// Formula text.
    #[arg(long, conflicts_with = "formula_file")]
    formula: Option<String>,
    /// File holding the formula text.
    #[arg(long)]
    formula_file: Option<PathBuf>,
}

impl FormulaArg {
    fn load(&self) -> Result<Formula, Failure> {
        match (&self.formula, &self.formula_file) {
            (Some(t), None) => Ok(parse(t).map_err(Error::from)?),
            (None, Some(p)) => Ok(parse(&read(p)?).map_err(Error::from)?),
            _ => Err(Failure::Usage(
                "give exactly one of --formula, --formula-file".into(),
            )),
        }
    }
}

#[derive(Args)]
struct QArg {
    /// Read `Q` as "at least K".
    #[arg(long, conflicts_with = "q")]
    k: Option<u32>,
    /// Read `Q` as a binary quantifier.
    #[arg(long, value_enum)]
    q: Option<QReading>,
}

impl QArg {
    fn env(&self) -> Env {
        let q = match (self.k, self.q) {
            (Some(k), _) => Some(QInterpretation::CountThreshold(k)),
            (None, Some(QReading::Hartig)) => Some(QInterpretation::Hartig),
            (None, Some(QReading::Rescher)) => Some(QInterpretation::Rescher),
            (None, Some(QReading::WellOrder)) => Some(QInterpretation::WellOrder),
            (None, None) => None,
        };
        match q {
            Some(q) => Env::new().with_q(q),
            None => Env::new(),
        }
    }
}

#[derive(Args)]
struct ClassArg {
    /// Built-in class: nonempty-P, even-P, even-size, all, empty.
    #[arg(long, conflicts_with = "class_file")]
    class: Option<String>,
    /// Sentence whose models form the class.
    #[arg(long)]
    class_file: Option<PathBuf>,
    /// Vocabulary of the class, e.g. "P/1, R/2".
    #[arg(long)]
    vocab: Option<String>,
}

impl ClassArg {
    /// Loads the class and probes isomorphism closure on seeded samples.
    fn load(&self, env: &Env, seed: u64) -> Result<ClassOracle, Failure> {
        let vocab = self.vocab.as_deref().map(Vocabulary::parse).transpose()?;
        let k = match (&self.class, &self.class_file) {
            (Some(name), None) => builtin_class(name, vocab.as_ref())
                .ok_or_else(|| Failure::Usage(format!("unknown class `{name}`")))?,
            (None, Some(path)) => {
                let f = parse(&read(path)?).map_err(Error::from)?;
                let vocab = match vocab {
                    Some(v) => v,
                    None => Target::sentence(f.clone())?.vocabulary().clone(),
                };
                ClassOracle::from_sentence(path.display().to_string(), vocab, &f, env)?
            }
            _ => {
                return Err(Failure::Usage(
                    "give exactly one of --class, --class-file".into(),
                ))
            }
        };
        k.check_sampled(4, 64, seed)?;
        Ok(k)
    }
}

#[derive(Args)]
struct OperationArg {
    /// Built-in operation: and, or, exists, not.
    #[arg(long, conflicts_with = "table")]
    op: Option<String>,
    /// Operation table file.
    #[arg(long)]
    table: Option<PathBuf>,
    /// Domain size for a built-in.
    #[arg(long, default_value_t = 2)]
    size: usize,
    /// Output arity for a built-in.
    #[arg(long, default_value_t = 1)]
    arity: usize,
}

impl OperationArg {
    fn load(&self) -> Result<LocalOperation, Failure> {
        match (&self.op, &self.table) {
            (Some(name), None) => Ok(builtin_global(name, self.arity)
                .ok_or_else(|| Failure::Usage(format!("unknown operation `{name}`")))?
                .at(self.size)?),
            (None, Some(path)) => Ok(parse_operation(&path.display().to_string(), &read(path)?)?),
            _ => Err(Failure::Usage("give exactly one of --op, --table".into())),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Truth value of a sentence in a structure.
    Eval {
        #[arg(long)]
        structure: PathBuf,
        #[command(flatten)]
        formula: FormulaArg,
        #[command(flatten)]
        q: QArg,
    },
    /// Semantic value: the tuples over --vars satisfying a formula.
    Value {
        #[arg(long)]
        structure: PathBuf,
        #[command(flatten)]
        formula: FormulaArg,
        /// Comma-separated free variables, in tuple order.
        #[arg(long, default_value = "")]
        vars: String,
        #[command(flatten)]
        q: QArg,
    },
    /// Realized sizes and model counts on 1..=max-size.
    Spectrum {
        #[command(flatten)]
        formula: FormulaArg,
        #[arg(long)]
        max_size: usize,
        #[command(flatten)]
        q: QArg,
    },
    /// Finite-window Löwenheim–Skolem check LS(C, D) per sentence file.
    LsCheck {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        /// Source sizes: all, even, odd, "R mod M", "A..B" or "{1,2}".
        #[arg(long)]
        from: String,
        /// Target sizes, same syntax.
        #[arg(long)]
        to: String,
        #[arg(long)]
        max_size: usize,
    },
    /// Permutation invariance of an operation (bijection invariance of a
    /// built-in family with --max-size).
    Invariance {
        #[command(flatten)]
        operation: OperationArg,
        /// Check the built-in family on every size up to this one.
        #[arg(long)]
        max_size: Option<usize>,
    },
    /// Whether a formula describes an operation.
    Describes {
        #[command(flatten)]
        formula: FormulaArg,
        #[command(flatten)]
        operation: OperationArg,
        /// Comma-separated output variables.
        #[arg(long)]
        vars: String,
        /// Comma-separated predicate names for the inputs.
        #[arg(long)]
        predicates: String,
    },
    /// Print the Scott formula η_α(var), or η′_α with --prime.
    Scott {
        #[arg(long)]
        alpha: usize,
        #[arg(long)]
        prime: bool,
        #[arg(long, default_value = "x")]
        var: String,
        #[arg(long, default_value = "lt")]
        order: String,
    },
    /// Define a class at one size by characterizing sentences and verify the
    /// definitions against it.
    Mcgee {
        #[command(flatten)]
        class: ClassArg,
        #[arg(long)]
        lambda: usize,
    },
    /// Whether some (or, with --universal, every) expansion by --hidden
    /// satisfies the sentence.
    SigmaMember {
        #[arg(long)]
        structure: PathBuf,
        #[command(flatten)]
        formula: FormulaArg,
        /// Hidden symbols, e.g. "S/2".
        #[arg(long)]
        hidden: String,
        #[arg(long)]
        universal: bool,
    },
    /// Whether two projection definitions split every structure exactly.
    DeltaCheck {
        /// Positive sentence file.
        #[arg(long)]
        pos: PathBuf,
        /// Negative sentence file.
        #[arg(long)]
        neg: PathBuf,
        /// Visible symbols, e.g. "P/1"; empty for pure sets.
        #[arg(long, default_value = "")]
        visible: String,
        #[arg(long)]
        hidden: String,
        #[arg(long)]
        max_size: usize,
    },
    /// Check a proof file.
    ProofCheck { file: PathBuf },
    /// Evaluate Keisler axiom instances with Q read as "at least K".
    SoundnessScan {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        max_size: usize,
        /// Comma-separated axiom numbers.
        #[arg(long, default_value = "1,2,3,4")]
        axioms: String,
    },
    /// List the structures of one size, or one per isomorphism class.
    Enumerate {
        #[arg(long)]
        vocab: String,
        #[arg(long)]
        size: usize,
        #[arg(long)]
        classes: bool,
    },
}

enum Failure {
    Usage(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn load_structure(path: &Path) -> Result<Structure, Failure> {
    Ok(parse_structure(&read(path)?)?)
}

fn list(text: &str) -> Vec<&str> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .collect()
}

/// A finished command: what to print and whether the verdict was positive.
struct Outcome {
    positive: bool,
    text: String,
    json: serde_json::Value,
}

impl Outcome {
    fn new(positive: bool, text: impl Into<String>, json: impl Serialize) -> Self {
        Outcome {
            positive,
            text: text.into(),
            json: serde_json::to_value(json).expect("reports serialize"),
        }
    }
}

fn run(cli: &Cli) -> Result<Outcome, Failure> {
    let budget = cli.budget;
    match &cli.command {
        Command::Eval {
            structure,
            formula,
            q,
        } => {
            let s = load_structure(structure)?;
            let f = formula.load()?;
            let truth = eval_sentence(&s, &f, &q.env())?;
            Ok(Outcome::new(
                truth,
                truth.to_string(),
                json!({ "formula": f, "value": truth }),
            ))
        }
        Command::Value {
            structure,
            formula,
            vars,
            q,
        } => {
            let s = load_structure(structure)?;
            let f = formula.load()?;
            let vars = list(vars);
            let v = eval_value(&s, &f, &vars, &q.env())?;
            let tuples: Vec<Vec<usize>> = v.tuples.iter().collect();
            let text = finmod::structures::format_tuples(&v.tuples);
            Ok(Outcome::new(
                true,
                format!("{{{text}}}"),
                json!({ "vars": v.vars, "tuples": tuples }),
            ))
        }
        Command::Spectrum {
            formula,
            max_size,
            q,
        } => {
            let f = formula.load()?;
            let r = spectrum(&Target::sentence(f)?, *max_size, &q.env(), budget)?;
            let mut text = format!("realized sizes: {}\n", set_text(&r.realized));
            text.push_str("size  models  classes\n");
            for c in &r.counts {
                let classes = c.classes.map_or("-".to_string(), |k| k.to_string());
                text.push_str(&format!("{:>4}  {:>6}  {:>7}\n", c.size, c.models, classes));
            }
            match r.largest_realized {
                Some(n) => text.push_str(&format!(
                    "largest realized size in window: {n} (inconclusive beyond {max_size})"
                )),
                None => text.push_str(&format!(
                    "no model of size <= {max_size} (inconclusive beyond)"
                )),
            }
            Ok(Outcome::new(!r.realized.is_empty(), text, &r))
        }
        Command::LsCheck {
            files,
            from,
            to,
            max_size,
        } => {
            let c: CardinalClassSpec = from.parse()?;
            let d: CardinalClassSpec = to.parse()?;
            let targets = files
                .iter()
                .map(|p| Ok(Target::sentence(parse(&read(p)?).map_err(Error::from)?)?))
                .collect::<Result<Vec<_>, Failure>>()?;
            let reports = ls_check(&targets, &c, &d, *max_size, &Env::new(), budget)?;
            let text = files
                .iter()
                .zip(&reports)
                .map(|(p, r)| {
                    format!(
                        "{}: {} (realized {})",
                        p.display(),
                        r.verdict,
                        set_text(&r.realized)
                    )
                })
                .collect::<Vec<_>>()
                .join("\n");
            let ok = reports.iter().all(|r| r.verdict != LsVerdict::FailsInRange);
            Ok(Outcome::new(ok, text, &reports))
        }
        Command::Invariance {
            operation,
            max_size,
        } => {
            let report = match (max_size, &operation.op) {
                (Some(n), Some(name)) => {
                    let g = builtin_global(name, operation.arity)
                        .ok_or_else(|| Failure::Usage(format!("unknown operation `{name}`")))?;
                    is_bijection_invariant(&g, *n, budget)?
                }
                (Some(_), None) => {
                    return Err(Failure::Usage("--max-size needs a built-in --op".into()))
                }
                (None, _) => is_permutation_invariant(&operation.load()?, budget)?,
            };
            let text = match &report.counterexample {
                None => format!("invariant ({} checks)", report.checked),
                Some(c) => format!(
                    "not invariant at size {}: permutation {:?}\ninputs: {}\nf(image): {{{}}}\nimage(f): {{{}}}",
                    c.size,
                    c.permutation.as_slice(),
                    c.inputs
                        .iter()
                        .map(|r| format!("{{{}}}", finmod::structures::format_tuples(r)))
                        .collect::<Vec<_>>()
                        .join(" "),
                    finmod::structures::format_tuples(&c.image_then_apply),
                    finmod::structures::format_tuples(&c.apply_then_image),
                ),
            };
            Ok(Outcome::new(report.invariant, text, &report))
        }
        Command::Describes {
            formula,
            operation,
            vars,
            predicates,
        } => {
            let f = formula.load()?;
            let op = operation.load()?;
            let r = describes(&f, &list(vars), &op, &list(predicates), &Env::new(), budget)?;
            let text = match &r.counterexample {
                None => "describes".to_string(),
                Some(m) => format!(
                    "does not describe: formula gives {{{}}}, operation gives {{{}}}",
                    finmod::structures::format_tuples(&m.formula_value),
                    finmod::structures::format_tuples(&m.operation_value)
                ),
            };
            Ok(Outcome::new(r.describes, text, &r))
        }
        Command::Scott {
            alpha,
            prime,
            var,
            order,
        } => {
            let f = if *prime {
                eta_prime(*alpha, order)?
            } else {
                eta(*alpha, var, order)?
            };
            Ok(Outcome::new(true, f.to_string(), json!({ "formula": f })))
        }
        Command::Mcgee { class, lambda } => {
            let env = Env::new();
            let k = class.load(&env, cli.seed)?;
            let def = define_class_at_size(&k, *lambda, budget)?;
            // Verify all three definitions on every structure of size λ.
            let mut disagreements = 0u64;
            let mut checked = 0u64;
            let (pos, uni, neg) = (
                def.positive.checker(&env)?,
                def.universal.checker(&env)?,
                def.negative.checker(&env)?,
            );
            for s in enumerate_structures(k.vocabulary(), *lambda, budget)? {
                let member = k.contains(&s);
                checked += 1;
                let ok = pos.accepts(&s, budget)? == member
                    && uni.accepts(&s, budget)? == member
                    && neg.accepts(&s, budget)? != member;
                disagreements += u64::from(!ok);
            }
            let text = format!(
                "class {} at size {lambda}: {} member classes, {} non-member classes\n\
                 positive sentence: {} nodes; universal: {} nodes; negative: {} nodes\n\
                 checked {checked} structures: {disagreements} disagreements",
                k.name(),
                def.member_classes,
                def.non_member_classes,
                def.positive.sentence().size(),
                def.universal.sentence().size(),
                def.negative.sentence().size(),
            );
            let json = json!({
                "class": k.name(),
                "size": lambda,
                "member_classes": def.member_classes,
                "non_member_classes": def.non_member_classes,
                "checked": checked,
                "disagreements": disagreements,
                "positive": def.positive.sentence(),
                "universal": def.universal.sentence(),
                "negative": def.negative.sentence(),
            });
            Ok(Outcome::new(disagreements == 0, text, json))
        }
        Command::SigmaMember {
            structure,
            formula,
            hidden,
            universal,
        } => {
            let s = load_structure(structure)?;
            let f = formula.load()?;
            let reading = if *universal {
                Reading::Universal
            } else {
                Reading::Existential
            };
            let d = ProjectionDefinition::with_reading(
                s.vocabulary().clone(),
                Vocabulary::parse(hidden)?,
                f,
                reading,
            )?;
            let member = sigma_membership(&d, &s, &Env::new(), budget)?;
            Ok(Outcome::new(
                member,
                member.to_string(),
                json!({ "member": member }),
            ))
        }
        Command::DeltaCheck {
            pos,
            neg,
            visible,
            hidden,
            max_size,
        } => {
            let visible = Vocabulary::parse(visible)?;
            let hidden = Vocabulary::parse(hidden)?;
            let p = ProjectionDefinition::new(
                visible.clone(),
                hidden.clone(),
                parse(&read(pos)?).map_err(Error::from)?,
            )?;
            let n = ProjectionDefinition::new(
                visible,
                hidden,
                parse(&read(neg)?).map_err(Error::from)?,
            )?;
            let r = delta_check(&p, &n, *max_size, &Env::new(), budget)?;
            let mut text = if r.certified {
                format!("certified up to size {max_size} ({} structures)", r.checked)
            } else {
                format!(
                    "not certified: {} of {} structures misclassified",
                    r.violation_count, r.checked
                )
            };
            for v in &r.violations {
                let kind = if v.accepted_by_both {
                    "both accept"
                } else {
                    "neither accepts"
                };
                text.push_str(&format!(
                    "\n{kind}:\n{}",
                    render_structure(&v.structure).trim_end()
                ));
            }
            Ok(Outcome::new(r.certified, text, &r))
        }
        Command::ProofCheck { file } => {
            let proof = parse_proof(&read(file)?)?;
            let v = check_proof(&proof);
            let text = match &v {
                Verdict::Accept => format!(
                    "ACCEPT: {}",
                    proof.conclusion().expect("parsed proofs are nonempty")
                ),
                Verdict::Reject { line, reason } => format!("REJECT at line {line}: {reason}"),
            };
            Ok(Outcome::new(v.is_accept(), text, &v))
        }
        Command::SoundnessScan {
            k,
            max_size,
            axioms,
        } => {
            let axioms = list(axioms)
                .into_iter()
                .map(|a| {
                    a.parse::<u8>()
                        .map_err(|_| Failure::Usage(format!("bad axiom number `{a}`")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            let r = soundness_scan(*k, *max_size, &axioms, budget)?;
            let mut text = format!(
                "Q read as \"at least {k}\", {} structures up to size {max_size}\n",
                r.structures
            );
            for (a, count) in &r.instances {
                let bad = r.counterexamples_for(*a).count();
                text.push_str(&format!(
                    "axiom {a}: {count} instances, {bad} counterexamples\n"
                ));
            }
            if let Some(c) = r.counterexamples.first() {
                text.push_str(&format!(
                    "first counterexample (axiom {}): {}\nassignment: {:?}\n{}",
                    c.axiom,
                    c.instance,
                    c.assignment,
                    render_structure(&c.structure)
                ));
            }
            Ok(Outcome::new(
                r.counterexamples.is_empty(),
                text.trim_end(),
                &r,
            ))
        }
        Command::Enumerate {
            vocab,
            size,
            classes,
        } => {
            let v = Vocabulary::parse(vocab)?;
            let structures: Vec<Structure> = if *classes {
                isomorphism_classes(&v, *size, budget)?
                    .into_iter()
                    .map(|c| c.representative)
                    .collect()
            } else {
                enumerate_structures(&v, *size, budget)?.collect()
            };
            let text = structures
                .iter()
                .map(render_structure)
                .collect::<Vec<_>>()
                .join("\n");
            let text = format!("{text}\n# {} structures", structures.len());
            Ok(Outcome::new(true, text, &structures))
        }
    }
}

fn set_text(xs: &[usize]) -> String {
    let parts: Vec<String> = xs.iter().map(usize::to_string).collect();
    format!("{{{}}}", parts.join(","))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            let body = match cli.format {
                Format::Text => out.text,
                Format::Json => {
                    serde_json::to_string_pretty(&out.json).expect("json values render")
                }
            };
            // A closed pipe is not an error worth reporting.
            let _ = writeln!(std::io::stdout(), "{body}");
            ExitCode::from(if out.positive { 0 } else { 1 })
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_budget() { 3 } else { 2 })
        }
    }
}
