//! `plc`: batch front end for model checking, satisfiability, explanations,
//! knowledge updates and announcement reduction.
//!
//! Exit codes: 0 when the query was answered (whatever the answer), 1 on
//! usage errors, 2 on malformed input, 3 when a search or rewrite budget ran
//! out.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use plc_core::explain::{self, Kind};
use plc_core::models::{
    mdm_to_mcm, mdm_to_mcm_at, parse_mdm_file, parse_model_file, render_model_file, update_mcm,
    Knowledge, ModelDoc,
};
use plc_core::rewrite::{reduce_dynamic_with_budget, DEFAULT_NODE_BUDGET};
use plc_core::semantics::{check_mcm, valid_in_mcm};
use plc_core::solver::{
    axiom_instances, sat_finite, sat_open, valid_finite, valid_open, Config, SatOutcome, Validity,
    Witness,
};
use plc_core::syntax::parse_formula_unchecked;
use plc_core::{parse_formula, Error, Formula, Mcm, Point, Signature};

const BUDGET_VAR: &str = "PLC_NODE_BUDGET";

#[derive(Parser)]
#[command(name = "plc", version, about = "Reasoning about black-box classifiers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum SolveMode {
    Finite,
    Open,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExplainKind {
    Axp,
    Pimp,
}

#[derive(clap::Args)]
struct PointArgs {
    /// State overriding the model's `point:` line, e.g. `{si,or,an}`.
    #[arg(long)]
    state: Option<String>,
    /// Function name overriding the model's `point:` line.
    #[arg(long)]
    function: Option<String>,
}

#[derive(clap::Args)]
struct VocabArgs {
    /// Input atoms, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "")]
    atoms: Vec<String>,
    /// Output values, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "0,1")]
    vals: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Truth of a formula at the model's point.
    Check {
        #[arg(short, long)]
        model: PathBuf,
        #[arg(short, long)]
        formula: String,
        #[command(flatten)]
        point: PointArgs,
    },
    /// Validity in a model, or logical validity when no model is given.
    Valid {
        #[arg(short, long)]
        model: Option<PathBuf>,
        #[arg(short, long)]
        formula: String,
        #[arg(long, value_enum, default_value = "finite")]
        mode: SolveMode,
        #[command(flatten)]
        vocab: VocabArgs,
    },
    /// Satisfiability, with a witness model on success.
    Sat {
        #[arg(long, value_enum, default_value = "finite")]
        mode: SolveMode,
        #[command(flatten)]
        vocab: VocabArgs,
        #[arg(short, long)]
        formula: String,
        /// Write the witness here instead of standard output.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Explanations of the classification at the model's point.
    Explain {
        #[arg(short, long)]
        model: PathBuf,
        /// Explanations that hold for every classifier still considered.
        #[arg(long)]
        subjective: bool,
        #[arg(long, value_enum, default_value = "axp")]
        kind: ExplainKind,
        /// Value to explain instead of the actual classification.
        #[arg(long)]
        value: Option<String>,
        #[command(flatten)]
        point: PointArgs,
    },
    /// Keeps the classifiers under which the formula holds everywhere.
    Update {
        #[arg(short, long)]
        model: PathBuf,
        #[arg(short, long)]
        formula: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Eliminates announcement operators.
    Reduce {
        #[arg(short, long)]
        formula: String,
    },
    /// Converts a multi-decision model file into a classifier model.
    Normalize {
        #[arg(short, long)]
        model: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Checks seeded axiom instances for validity.
    Axioms {
        #[command(flatten)]
        vocab: VocabArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Instances per modal schema.
        #[arg(long, default_value_t = 10)]
        count: usize,
        #[arg(long, default_value_t = 2)]
        depth: usize,
    },
}

enum Failure {
    Usage(String),
    Input(String),
    Resource(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NodeBudget(_) | Error::BoundsTooLarge(_) => Failure::Resource(e.to_string()),
            e => Failure::Input(e.to_string()),
        }
    }
}

type Outcome = Result<String, Failure>;

fn main() -> ExitCode {
    env_logger::init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Resource(msg)) => {
            println!("RESOURCE-OUT");
            eprintln!("{msg}");
            ExitCode::from(3)
        }
    }
}

fn budget() -> Result<Option<u64>, Failure> {
    match std::env::var(BUDGET_VAR) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| Failure::Usage(format!("{BUDGET_VAR} must be a number, got `{v}`"))),
        Err(_) => Ok(None),
    }
}

fn config() -> Result<Config, Failure> {
    let mut c = Config::default();
    if let Some(b) = budget()? {
        c.work_budget = b;
    }
    Ok(c)
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn write_or_print(path: Option<&PathBuf>, text: String) -> Outcome {
    match path {
        Some(p) => {
            fs::write(p, text).map_err(|e| Failure::Input(format!("{}: {e}", p.display())))?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}

fn load(path: &Path) -> Result<ModelDoc, Failure> {
    parse_model_file(&read(path)?).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn signature(vocab: &VocabArgs) -> Result<Signature, Failure> {
    let atoms = vocab.atoms.iter().filter(|a| !a.is_empty()).cloned();
    Signature::new(atoms, vocab.vals.iter().cloned()).map_err(|e| Failure::Usage(e.to_string()))
}

fn parse_state(text: &str, sig: &Signature) -> Result<u64, Failure> {
    let inner = text
        .trim()
        .strip_prefix('{')
        .and_then(|t| t.strip_suffix('}'))
        .ok_or_else(|| Failure::Usage(format!("state `{text}` must look like {{p,q}}")))?;
    let names: Vec<String> = inner
        .split(',')
        .map(str::trim)
        .filter(|n| !n.is_empty())
        .map(String::from)
        .collect();
    Ok(sig.mask_of(&names)?)
}

fn resolve_point(doc: &ModelDoc, args: &PointArgs) -> Result<(Mcm, Point), Failure> {
    let model = doc.knowledge.model()?.clone();
    let mut point = doc.point;
    if args.state.is_some() || args.function.is_some() {
        let base = point.unwrap_or(Point {
            state: 0,
            function: 0,
        });
        let state = match &args.state {
            Some(s) => {
                let mask = parse_state(s, model.sig())?;
                model
                    .state_index(mask)
                    .ok_or_else(|| Failure::Input(format!("{s} is not a state of the model")))?
            }
            None if point.is_some() => base.state,
            None => return Err(Failure::Usage("--function also needs --state".into())),
        };
        let function = match &args.function {
            Some(f) => model
                .function_index(f)
                .ok_or_else(|| Failure::Input(format!("no function named `{f}`")))?,
            None if point.is_some() => base.function,
            None => return Err(Failure::Usage("--state also needs --function".into())),
        };
        point = Some(Point { state, function });
    }
    let point = point.ok_or_else(|| {
        Failure::Usage("the model has no `point:` line; pass --state and --function".into())
    })?;
    Ok((model, point))
}

fn witness_text(w: &Witness) -> String {
    render_model_file(&Knowledge::Consistent(w.model.clone()), Some(w.point))
}

fn sat_report(outcome: SatOutcome, output: Option<&PathBuf>) -> Outcome {
    match outcome {
        SatOutcome::Sat(w) => {
            let text = witness_text(&w);
            let rest = write_or_print(output, text)?;
            Ok(format!("SAT\n{rest}"))
        }
        SatOutcome::Unsat => Ok("UNSAT\n".into()),
        SatOutcome::ResourceOut => Err(Failure::Resource("search budget exhausted".into())),
    }
}

fn solve(mode: SolveMode, vocab: &VocabArgs, text: &str) -> Result<(Formula, Signature), Failure> {
    match mode {
        SolveMode::Finite => {
            let sig = signature(vocab)?;
            Ok((parse_formula(text, &sig)?, sig))
        }
        SolveMode::Open => {
            let f = parse_formula_unchecked(text)?;
            let sig = Signature::new(f.atoms(), vocab.vals.iter().cloned())?;
            f.check_signature(&sig)?;
            Ok((f, sig))
        }
    }
}

fn run(command: Command) -> Outcome {
    match command {
        Command::Check {
            model,
            formula,
            point,
        } => {
            let doc = load(&model)?;
            let (m, p) = resolve_point(&doc, &point)?;
            let phi = parse_formula(&formula, m.sig())?;
            Ok(if check_mcm(&m, p, &phi)? { "TRUE\n" } else { "FALSE\n" }.into())
        }
        Command::Valid {
            model: Some(model),
            formula,
            ..
        } => {
            let doc = load(&model)?;
            let m = doc.knowledge.model()?;
            let phi = parse_formula(&formula, m.sig())?;
            Ok(if valid_in_mcm(m, &phi)? { "VALID\n" } else { "INVALID\n" }.into())
        }
        Command::Valid {
            model: None,
            formula,
            mode,
            vocab,
        } => {
            let (phi, sig) = solve(mode, &vocab, &formula)?;
            let config = config()?;
            let v = match mode {
                SolveMode::Finite => valid_finite(&phi, &sig, &config)?,
                SolveMode::Open => valid_open(&phi, sig.values(), &config)?,
            };
            match v {
                Validity::Valid => Ok("VALID\n".into()),
                Validity::Invalid(w) => Ok(format!("INVALID\n{}", witness_text(&w))),
                Validity::ResourceOut => Err(Failure::Resource("search budget exhausted".into())),
            }
        }
        Command::Sat {
            mode,
            vocab,
            formula,
            output,
        } => {
            let (phi, sig) = solve(mode, &vocab, &formula)?;
            let config = config()?;
            let outcome = match mode {
                SolveMode::Finite => sat_finite(&phi, &sig, &config)?,
                SolveMode::Open => sat_open(&phi, sig.values(), &config)?,
            };
            sat_report(outcome, output.as_ref())
        }
        Command::Explain {
            model,
            subjective,
            kind,
            value,
            point,
        } => {
            let doc = load(&model)?;
            let (m, p) = resolve_point(&doc, &point)?;
            let sig = m.sig().clone();
            let actual = explain::classification(&m, p);
            let x = match &value {
                Some(v) => sig.value(v)?,
                None => actual,
            };
            let kind = match kind {
                ExplainKind::Axp => Kind::Axp,
                ExplainKind::Pimp => Kind::Pimp,
            };
            let (label, terms) = match (subjective, kind) {
                (true, Kind::Axp) => ("subaxp", explain::enumerate_subjective(&m, p, kind, Some(x))),
                (true, Kind::Pimp) => {
                    ("subpimp", explain::enumerate_subjective(&m, p, kind, Some(x)))
                }
                (false, Kind::Axp) if x == actual => ("axp", explain::enumerate_axps(&m, p)),
                // Local explanations only exist for the actual output.
                (false, Kind::Axp) => ("axp", Vec::new()),
                (false, Kind::Pimp) => ("pimp", explain::enumerate_pimps(&m, p.function, x)),
            };
            let mut out = format!("classification\t{}\n", sig.values()[actual]);
            for t in terms {
                out.push_str(&format!("{label}\t{}\n", t.render(&sig)));
            }
            Ok(out)
        }
        Command::Update {
            model,
            formula,
            output,
        } => {
            let doc = load(&model)?;
            let m = doc.knowledge.model()?;
            let phi = parse_formula(&formula, m.sig())?;
            let k = update_mcm(m, &phi)?;
            // The point survives only if its function does.
            let point = doc.point.and_then(|p| match &k {
                Knowledge::Consistent(h) => {
                    let table = &m.functions()[p.function].table;
                    h.functions()
                        .iter()
                        .position(|f| &f.table == table)
                        .map(|function| Point {
                            state: p.state,
                            function,
                        })
                }
                Knowledge::Inconsistent { .. } => None,
            });
            write_or_print(output.as_ref(), render_model_file(&k, point))
        }
        Command::Reduce { formula } => {
            let phi = parse_formula_unchecked(&formula)?;
            let cap = match budget()? {
                Some(b) => usize::try_from(b).unwrap_or(usize::MAX),
                None => DEFAULT_NODE_BUDGET,
            };
            Ok(format!("{}\n", reduce_dynamic_with_budget(&phi, cap)?))
        }
        Command::Normalize { model, output } => {
            let doc = parse_mdm_file(&read(&model)?)
                .map_err(|e| Failure::Input(format!("{}: {e}", model.display())))?;
            let (m, point) = match doc.point {
                Some(w) => {
                    let (m, points) = mdm_to_mcm_at(&doc.mdm, w)?;
                    (m, points[w])
                }
                None => (mdm_to_mcm(&doc.mdm)?.0, None),
            };
            write_or_print(output.as_ref(), render_model_file(&Knowledge::Consistent(m), point))
        }
        Command::Axioms {
            vocab,
            seed,
            count,
            depth,
        } => {
            let sig = signature(&vocab)?;
            let config = config()?;
            let mut out = String::new();
            let instances = axiom_instances(&sig, depth, seed, count);
            let mut passed = 0;
            for inst in &instances {
                let verdict = match valid_finite(&inst.formula, &sig, &config)? {
                    Validity::Valid => {
                        passed += 1;
                        "PASS"
                    }
                    Validity::Invalid(_) => "FAIL",
                    Validity::ResourceOut => "RESOURCE-OUT",
                };
                out.push_str(&format!("{}\t{verdict}\t{}\n", inst.schema, inst.formula));
            }
            out.push_str(&format!("total\t{passed}/{}\n", instances.len()));
            Ok(out)
        }
    }
}
