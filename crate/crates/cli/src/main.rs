use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use ybe_core::analysis::{analyze, generated_sub, is_indecomposable, retract, retraction_tower};
use ybe_core::brace::brace_report;
use ybe_core::constructions::{covering_decomposition, dynamical_extension, TRANSPORT_RULE};
use ybe_core::enumerate::{self, classification_report, Budget, CensusOutcome, Filter};
use ybe_core::io::{load, qcycle_to_text, BraceJson, DynamicalPairJson, Input, QCycleSetJson, Report};
use ybe_core::permbrace::permutation_brace;
use ybe_core::qcycle::QCycleSet;
use ybe_core::reproduce::{self, Section};
use ybe_core::Error;

/// Workbench for finite q-cycle sets, Yang–Baxter solutions and skew braces.
///
/// INPUT is a file (q-cycle set JSON or text, brace JSON, dynamical pair
/// JSON, epimorphism JSON) or `builtin:NAME`, e.g. `builtin:X1`,
/// `builtin:zp2_brace(3)`, `builtin:rump(2)`.
///
/// Exit status: 0 pass, 1 fail, 2 only skipped rows, 3 input error.
#[derive(Parser)]
#[command(name = "ybe", version)]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum SectionArg {
    Census,
    Examples,
    Braces,
    All,
}

#[derive(Subcommand)]
enum Command {
    /// Check axioms and report witnesses.
    Validate { input: String },
    /// Structural flags, generators and retraction tower.
    Analyze { input: String },
    /// Generated substructure with its layers.
    Closure {
        input: String,
        /// Comma-separated 1-based points.
        #[arg(long, value_delimiter = ',', required = true)]
        seed: Vec<usize>,
    },
    /// Iterated retracts up to the absolute retraction.
    RetractTower { input: String },
    /// One cycle set per isomorphism class.
    Enumerate {
        #[arg(short)]
        n: usize,
        #[arg(long)]
        indecomposable: bool,
        /// Worker threads for the shard pool.
        #[arg(long)]
        shards: Option<usize>,
        /// Also print the number of labeled cycle sets in each class.
        #[arg(long)]
        labeled: bool,
    },
    /// Classify all indecomposable cycle sets of one size.
    Census {
        #[arg(short)]
        n: usize,
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        #[arg(long)]
        max_seconds: Option<f64>,
        /// Skip counting decomposable classes.
        #[arg(long)]
        indecomposable_only: bool,
        #[arg(long)]
        shards: Option<usize>,
    },
    /// Laws, orbits, cycle bases, one-generator report and series of a brace.
    BraceAnalyze { input: String },
    /// Permutation brace of a cycle set.
    Permbrace { input: String },
    /// Dynamical extension of a pair.
    Extend {
        input: String,
        #[arg(long)]
        require_nondegenerate: bool,
    },
    /// Dynamical pair along an epimorphism (default: the retract projection).
    Decompose { input: String },
    /// Published values against computed ones.
    Reproduce {
        #[arg(value_enum, default_value = "all")]
        sections: Vec<SectionArg>,
        #[arg(long)]
        max_seconds: Option<f64>,
        #[arg(long)]
        include_n9: bool,
        #[arg(long)]
        checkpoint_dir: Option<PathBuf>,
    },
}

/// Exit status for a library error: malformed input is 3, a structure that
/// fails its axioms is 1.
fn error_code(e: &Error) -> u8 {
    match e {
        Error::Parse { .. } | Error::Shape(_) | Error::OutOfRange { .. } | Error::UnknownBuiltin(_) | Error::SizeOutOfRange(_) => 3,
        _ => 1,
    }
}

/// Writes to stdout; a closed pipe ends the process quietly.
fn write_out(args: std::fmt::Arguments<'_>) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    if let Err(e) = out.write_fmt(args).and_then(|_| out.flush()) {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
        panic!("stdout: {e}");
    }
}

macro_rules! out {
    ($($t:tt)*) => { write_out(format_args!($($t)*)) };
}

macro_rules! outln {
    ($($t:tt)*) => {{
        write_out(format_args!($($t)*));
        write_out(format_args!("\n"));
    }};
}

fn emit<T: Serialize>(format: Format, command: &str, result: T, text: impl FnOnce(&T) -> String) {
    match format {
        Format::Json => outln!("{}", Report::new(command, result).to_json()),
        Format::Text => out!("{}", text(&result)),
    }
}

fn one_based(v: &[usize]) -> Vec<usize> {
    v.iter().map(|p| p + 1).collect()
}

fn qcycle(input: Input) -> Result<QCycleSet, Error> {
    match input {
        Input::QCycle(x) => Ok(x),
        _ => Err(Error::Shape("expected a q-cycle set".into())),
    }
}

fn set_threads(shards: Option<usize>) {
    if let Some(t) = shards {
        // Fails only if the pool was already built; the default is fine then.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t.max(1)).build_global();
    }
}

fn run(cli: Cli) -> Result<u8, Error> {
    let f = cli.format;
    match cli.command {
        Command::Validate { input } => {
            let v = match load(&input) {
                Ok(Input::QCycle(x)) => {
                    let yb = x.to_solution().map(|s| s.yb_check().is_ok()).unwrap_or(false);
                    json!({
                        "kind": "qcycle", "valid": true, "n": x.n(), "cycle_set": x.is_cycle_set(),
                        "regular": x.is_regular(), "nondegenerate": x.is_nondegenerate(),
                        "indecomposable": is_indecomposable(&x), "yang_baxter": yb,
                    })
                }
                Ok(Input::Brace(b)) => json!({"kind": "brace", "valid": true, "n": b.n(), "abelian": b.is_abelian()}),
                Ok(Input::Pair(p)) => match p.validate() {
                    Ok(()) => json!({"kind": "dynamical_pair", "valid": true, "base": p.base.n(), "fiber": p.fiber,
                                     "alpha_prime_regular": p.alpha_prime_regular()}),
                    Err(e) => json!({"kind": "dynamical_pair", "valid": false, "violation": e.to_string()}),
                },
                Ok(Input::Epimorphism { source, target, map }) => {
                    let ok = match (&target, &map) {
                        (Some(t), Some(m)) => m.len() == source.n() && m.iter().all(|&v| v < t.n()) && source.is_homomorphism(m, t),
                        _ => true,
                    };
                    json!({"kind": "epimorphism", "valid": ok})
                }
                Err(e) if error_code(&e) == 3 => return Err(e),
                Err(e) => json!({"valid": false, "violation": e.to_string()}),
            };
            let valid = v["valid"].as_bool().unwrap_or(false);
            emit(f, "validate", v, |v| format!("{}\n", if v["valid"] == true { "valid" } else { "invalid" }));
            Ok(if valid { 0 } else { 1 })
        }
        Command::Analyze { input } => {
            match load(&input)? {
                Input::Brace(b) => emit(f, "analyze", brace_report(&b)?, |r| format!("{r:#?}\n")),
                other => {
                    let r = analyze(&qcycle(other)?)?;
                    emit(f, "analyze", r, |r| format!("{r:#?}\n"));
                }
            }
            Ok(0)
        }
        Command::Closure { input, seed } => {
            let x = qcycle(load(&input)?)?;
            if let Some(&bad) = seed.iter().find(|&&s| s == 0 || s > x.n()) {
                return Err(Error::OutOfRange { value: bad as i64, n: x.n(), at: "seed".into() });
            }
            let s: Vec<usize> = seed.iter().map(|p| p - 1).collect();
            let t = generated_sub(&x, &s);
            let v = json!({
                "seed": one_based(&t.seed),
                "layers": t.layers.iter().map(|l| one_based(l)).collect::<Vec<_>>(),
                "result": one_based(&t.result),
                "generates": t.result.len() == x.n(),
            });
            emit(f, "closure", v, |v| format!("{}\n", v["result"]));
            Ok(0)
        }
        Command::RetractTower { input } => {
            let x = qcycle(load(&input)?)?;
            let t = retraction_tower(&x)?;
            let v = json!({
                "sizes": t.sizes(),
                "terminal_index": t.terminal_index,
                "multipermutation_level": t.multipermutation_level(),
                "irretractable": t.is_irretractable(),
                "levels": t.levels[..=t.terminal_index].iter().map(QCycleSetJson::from_structure).collect::<Vec<_>>(),
                "projections": t.projections[..t.terminal_index].iter().map(|p| one_based(p)).collect::<Vec<_>>(),
            });
            emit(f, "retract-tower", v, |v| format!("{}\n", v["sizes"]));
            Ok(0)
        }
        Command::Enumerate { n, indecomposable, shards, labeled } => {
            set_threads(shards);
            let classes = enumerate::enumerate_cycle_sets(n, Filter { indecomposable })?;
            for x in &classes {
                let mut line = serde_json::to_value(QCycleSetJson::from_structure(x)).expect("serializable");
                if labeled {
                    line["labeled"] = json!(enumerate::labeled_count(x));
                }
                match f {
                    Format::Json => outln!("{line}"),
                    Format::Text => outln!("{}", qcycle_to_text(x)),
                }
            }
            eprintln!("{} classes", classes.len());
            Ok(0)
        }
        Command::Census { n, checkpoint, max_seconds, indecomposable_only, shards } => {
            set_threads(shards);
            let budget = Budget { indecomposable_only, max_seconds, checkpoint };
            match classification_report(n, &budget)? {
                CensusOutcome::Complete { record, classes, .. } => {
                    match f {
                        Format::Json => {
                            for c in &classes {
                                outln!("{}", serde_json::to_string(c).expect("serializable"));
                            }
                            outln!("{}", serde_json::to_string(&Report::new("census", &record)).expect("serializable"));
                        }
                        Format::Text => outln!("{}", record.summary()),
                    }
                    Ok(0)
                }
                CensusOutcome::Incomplete { done_shards, total_shards } => {
                    let v = json!({"complete": false, "done_shards": done_shards, "total_shards": total_shards});
                    emit(f, "census", v, |v| format!("incomplete: {}/{} shards\n", v["done_shards"], v["total_shards"]));
                    Ok(2)
                }
            }
        }
        Command::BraceAnalyze { input } => {
            let b = match load(&input)? {
                Input::Brace(b) => b,
                _ => return Err(Error::Shape("expected a brace".into())),
            };
            let r = brace_report(&b)?;
            let clean = r.laws.is_clean();
            emit(f, "brace-analyze", r, |r| format!("{r:#?}\n"));
            Ok(if clean { 0 } else { 1 })
        }
        Command::Permbrace { input } => {
            let x = qcycle(load(&input)?)?;
            let pb = permutation_brace(&x)?;
            let v = json!({
                "brace": BraceJson::from_brace(&pb.brace),
                "elements": pb.sidecar(),
                "representatives": pb.reps.iter().map(|r| one_based(r)).collect::<Vec<_>>(),
                "convention": pb.convention,
            });
            emit(f, "permbrace", v, |v| {
                let els = v["elements"].as_array().map(Vec::as_slice).unwrap_or_default();
                els.iter().enumerate().map(|(i, e)| format!("{i}: {}\n", e.as_str().unwrap_or(""))).collect()
            });
            Ok(0)
        }
        Command::Extend { input, require_nondegenerate } => {
            let dp = match load(&input)? {
                Input::Pair(p) => p,
                _ => return Err(Error::Shape("expected a dynamical pair".into())),
            };
            let x = dynamical_extension(&dp, require_nondegenerate)?;
            emit(f, "extend", QCycleSetJson::from_structure(&x), |_| qcycle_to_text(&x));
            Ok(0)
        }
        Command::Decompose { input } => {
            let (x, y, p) = match load(&input)? {
                Input::Epimorphism { source, target: Some(t), map: Some(m) } => (source, t, m),
                Input::Epimorphism { source, .. } | Input::QCycle(source) => {
                    let r = retract(&source)?;
                    (source, r.quotient, r.projection)
                }
                _ => return Err(Error::Shape("expected a q-cycle set or an epimorphism".into())),
            };
            let c = covering_decomposition(&x, &y, &p)?;
            let v = json!({
                "pair": DynamicalPairJson::from_pair(&c.pair),
                "isomorphism": one_based(&c.iso.images()),
                "transport": TRANSPORT_RULE,
            });
            emit(f, "decompose", v, |v| format!("fiber {} over base {}\n", v["pair"]["fiber"], v["pair"]["base"]["n"]));
            Ok(0)
        }
        Command::Reproduce { sections, max_seconds, include_n9, checkpoint_dir } => {
            let mut secs = Vec::new();
            for s in sections {
                match s {
                    SectionArg::Census => secs.push(Section::Census),
                    SectionArg::Examples => secs.push(Section::Examples),
                    SectionArg::Braces => secs.push(Section::Braces),
                    SectionArg::All => secs.extend([Section::Examples, Section::Braces, Section::Census]),
                }
            }
            let opts = reproduce::Options { max_seconds, include_n9, checkpoint_dir };
            let rows = reproduce::run(&secs, &opts)?;
            let code = reproduce::exit_code(&rows);
            match f {
                Format::Text => out!("{}", reproduce::render(&rows)),
                Format::Json => outln!("{}", Report::new("reproduce", &rows).to_json()),
            }
            Ok(code as u8)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            let v: Value = json!({"error": e.to_string()});
            if error_code(&e) == 1 {
                outln!("{v}");
            }
            ExitCode::from(error_code(&e))
        }
    }
}
