//! `rsacomb` command-line front end.
//!
//! Exit codes: 0 success, 10 `check` on a non-RSA ontology, 1 usage,
//! 2 unreadable or malformed input, 3 unsatisfiable ontology, 4 internal.
//! Data goes to stdout, diagnostics and `--stats` to stderr.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rsacomb::datalog::{EngineConfig, Store, DEFAULT_DEPTH_BOUND};
use rsacomb::io::{emit_answers, emit_graph_dot, is_serializable, parse_ontology, parse_queries, serialize_ontology, AnswerFormat};
use rsacomb::oracle::certain_answers_chase;
use rsacomb::pipeline::prepare;
use rsacomb::profile::is_rsa;
use rsacomb::{AnswerSet, ConjunctiveQuery, Error, FilterMode, Ontology};
use serde_json::{json, Value};

const EXIT_NOT_RSA: u8 = 10;
const EXIT_USAGE: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_UNSAT: u8 = 3;
const EXIT_INTERNAL: u8 = 4;
const DEFAULT_ORACLE_DEPTH: usize = 8;

#[derive(Parser)]
#[command(name = "rsacomb", version, about = "Conjunctive query answering over Horn-ALCHOIQ ontologies via RSA approximation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Report whether an ontology is RSA (exit 0) or not (exit 10).
    Check {
        ontology: PathBuf,
        /// Also write the dependency graph in DOT format.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Write an RSA approximation of an ontology and its provenance.
    Approximate {
        ontology: PathBuf,
        /// Directory for `<name>.rsa.nha` and `<name>.provenance.json`;
        /// without it the ontology goes to stdout.
        #[arg(long, short)]
        out: Option<PathBuf>,
        /// Provenance JSON path, overriding the default location.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Answer queries with the combined approach.
    Answer(AnswerArgs),
    /// Answer queries with the bounded chase.
    Oracle {
        ontology: PathBuf,
        #[arg(required = true)]
        queries: Vec<PathBuf>,
        /// Maximum skolem nesting depth.
        #[arg(long, env = "RSACOMB_DEPTH", value_parser = clap::value_parser!(u32).range(1..), default_value_t = DEFAULT_ORACLE_DEPTH as u32)]
        depth: u32,
        #[arg(long, value_enum, default_value_t = Format::Tsv)]
        format: Format,
    },
}

#[derive(Args)]
struct AnswerArgs {
    ontology: PathBuf,
    #[arg(required = true)]
    queries: Vec<PathBuf>,
    #[arg(long, value_enum, default_value_t = Mode::Packed)]
    mode: Mode,
    #[arg(long, value_enum, default_value_t = Format::Tsv)]
    format: Format,
    /// Approximate even when the input is already RSA.
    #[arg(long)]
    force_approximation: bool,
    /// Bound on term nesting during materialization.
    #[arg(long, env = "RSACOMB_DEPTH", value_parser = clap::value_parser!(u32).range(1..), default_value_t = DEFAULT_DEPTH_BOUND as u32)]
    depth: u32,
    /// Directory for one answer file per query; without it answers go to
    /// stdout.
    #[arg(long, short)]
    out: Option<PathBuf>,
    /// Write the RSA report and approximation provenance here.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Print instrumentation counters as JSON on stderr.
    #[arg(long)]
    stats: bool,
    /// Answer queries on this many threads.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..), default_value_t = 1)]
    parallel: u32,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Packed,
    Reference,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Tsv,
    Json,
}

impl Format {
    fn answer_format(self) -> AnswerFormat {
        match self {
            Format::Tsv => AnswerFormat::Tsv,
            Format::Json => AnswerFormat::Json,
        }
    }

    fn ext(self) -> &'static str {
        match self {
            Format::Tsv => "tsv",
            Format::Json => "json",
        }
    }
}

/// A failed run: exit code plus the message for stderr.
struct Failure(u8, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse(_) | Error::Query(_) => EXIT_INPUT,
            Error::Unsatisfiable => EXIT_UNSAT,
            _ => EXIT_INTERNAL,
        };
        Failure(code, e.to_string())
    }
}

fn internal(msg: impl ToString) -> Failure {
    Failure(EXIT_INTERNAL, msg.to_string())
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure(EXIT_INPUT, format!("{}: {e}", path.display())))
}

fn write(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents).map_err(|e| internal(format!("{}: {e}", path.display())))
}

fn parse_errors(path: &Path, errs: Vec<rsacomb::io::ParseError>) -> Failure {
    let msgs: Vec<String> = errs.into_iter().map(|e| e.with_file(path).to_string()).collect();
    Failure(EXIT_INPUT, msgs.join("\n"))
}

fn load_ontology(path: &Path) -> Result<Ontology, Failure> {
    parse_ontology(&read(path)?).map_err(|e| parse_errors(path, e))
}

/// Queries with a display name and a file stem for output.
fn load_queries(paths: &[PathBuf]) -> Result<Vec<(String, ConjunctiveQuery)>, Failure> {
    let mut out = Vec::new();
    for path in paths {
        let qs = parse_queries(&read(path)?).map_err(|e| parse_errors(path, e))?;
        let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "query".into());
        let many = qs.len() > 1;
        for (i, q) in qs.into_iter().enumerate() {
            let name = if many { format!("{stem}-{}", i + 1) } else { stem.clone() };
            out.push((name, q));
        }
    }
    if out.is_empty() {
        return Err(Failure(EXIT_USAGE, "no queries given".into()));
    }
    Ok(out)
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json");
    s.push('\n');
    s
}

fn cmd_check(ontology: &Path, dot: Option<&Path>) -> Result<u8, Failure> {
    let o = load_ontology(ontology)?;
    if o.has_disjunction() {
        print!("{}", pretty(&json!({"schema": 1, "is_rsa": false, "horn": false})));
        return Ok(EXIT_NOT_RSA);
    }
    let report = is_rsa(&o)?;
    if let Some(path) = dot {
        write(path, &emit_graph_dot(&report.graph))?;
    }
    print!("{}", pretty(&report.to_json()));
    Ok(if report.is_rsa { 0 } else { EXIT_NOT_RSA })
}

fn cmd_approximate(ontology: &Path, out: Option<&Path>, report: Option<&Path>) -> Result<u8, Failure> {
    let o = load_ontology(ontology)?;
    let (approx, prov) = rsacomb::approx::approximate_to_rsa(&o)?;
    if !is_serializable(&approx) {
        return Err(internal("approximation uses IRIs the text format cannot express"));
    }
    let text = serialize_ontology(&approx);
    let prov = pretty(&prov.to_json());
    let stem = ontology.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "ontology".into());
    match out {
        Some(dir) => {
            fs::create_dir_all(dir).map_err(|e| internal(format!("{}: {e}", dir.display())))?;
            write(&dir.join(format!("{stem}.rsa.nha")), &text)?;
            let default = dir.join(format!("{stem}.provenance.json"));
            write(report.unwrap_or(&default), &prov)?;
        }
        None => {
            print!("{text}");
            if let Some(path) = report {
                write(path, &prov)?;
            }
        }
    }
    Ok(0)
}

fn answer_one(p: &rsacomb::pipeline::Prepared, cm: &rsacomb::canonical::CanonicalModel, q: &ConjunctiveQuery, mode: Mode) -> Result<AnswerSet, Failure> {
    match mode {
        Mode::Packed => Ok(p.answer(cm, q, FilterMode::Packed)?),
        Mode::Reference => Ok(p.answer(cm, q, FilterMode::Reference)?),
        Mode::Both => {
            let a = p.answer(cm, q, FilterMode::Packed)?;
            let b = p.answer(cm, q, FilterMode::Reference)?;
            if a.rows != b.rows {
                return Err(internal(format!("packed and reference filtering disagree: {} vs {} rows", a.rows.len(), b.rows.len())));
            }
            Ok(a)
        }
    }
}

fn cmd_answer(args: &AnswerArgs) -> Result<u8, Failure> {
    let o = load_ontology(&args.ontology)?;
    let queries = load_queries(&args.queries)?;
    let p = prepare(&o, args.force_approximation)?;
    if let Some(path) = &args.report {
        let v = json!({
            "schema": 1,
            "input": p.input_report.as_ref().map(|r| r.to_json()),
            "approximation": p.provenance.as_ref().map(|pr| pr.to_json()),
        });
        write(path, &pretty(&v))?;
    }
    let store = Arc::new(Store::new(EngineConfig {
        depth_bound: args.depth as usize,
        ..Default::default()
    }));
    let cm = p.canonical_model(store.clone())?;
    if !cm.satisfiable {
        return Err(Error::Unsatisfiable.into());
    }
    let baseline = store.fact_count();
    let answers: Vec<AnswerSet> = if args.parallel > 1 {
        let chunk = queries.len().div_ceil(args.parallel as usize);
        std::thread::scope(|s| {
            let handles: Vec<_> = queries
                .chunks(chunk)
                .map(|part| s.spawn(|| part.iter().map(|(_, q)| answer_one(&p, &cm, q, args.mode)).collect::<Vec<_>>()))
                .collect();
            handles.into_iter().flat_map(|h| h.join().expect("answer thread panicked")).collect::<Result<_, _>>()
        })?
    } else {
        queries.iter().map(|(_, q)| answer_one(&p, &cm, q, args.mode)).collect::<Result<_, _>>()?
    };
    if !p.exact() {
        eprintln!("warning: ontology was approximated; answers are a lower bound");
    }
    emit(&queries, &answers, args.format, args.out.as_deref())?;
    if args.stats {
        let st = store.stats();
        let v = json!({
            "schema": 1,
            "queries": queries.len(),
            "canonical_materializations": store.runs(cm.partition).map_err(internal)?,
            "materializations": st.materializations,
            "approximated": !p.exact(),
            "baseline_facts": baseline,
            "facts_after": store.fact_count(),
            "canonical": cm.stats_json(),
            "answers": answers.iter().map(|a| json!({"qm": a.stats.qm, "filter_rules": a.stats.filter_rules, "derived": a.stats.derived, "count": a.rows.len()})).collect::<Vec<_>>(),
        });
        eprintln!("{}", serde_json::to_string(&v).expect("json"));
    }
    Ok(0)
}

fn emit(queries: &[(String, ConjunctiveQuery)], answers: &[AnswerSet], format: Format, out: Option<&Path>) -> Result<(), Failure> {
    match out {
        Some(dir) => {
            fs::create_dir_all(dir).map_err(|e| internal(format!("{}: {e}", dir.display())))?;
            for ((name, _), a) in queries.iter().zip(answers) {
                write(&dir.join(format!("{name}.{}", format.ext())), &emit_answers(a, format.answer_format()))?;
            }
        }
        None => match format {
            Format::Tsv => {
                for ((name, _), a) in queries.iter().zip(answers) {
                    println!("# {name} exact={}", a.exact);
                    print!("{}", emit_answers(a, AnswerFormat::Tsv));
                }
            }
            Format::Json => {
                let items: Vec<Value> = queries
                    .iter()
                    .zip(answers)
                    .map(|((name, _), a)| {
                        let mut v: Value = serde_json::from_str(&emit_answers(a, AnswerFormat::Json)).expect("json");
                        v["query"] = json!(name);
                        v
                    })
                    .collect();
                print!("{}", pretty(&json!({"schema": 1, "answers": items})));
            }
        },
    }
    Ok(())
}

fn cmd_oracle(ontology: &Path, queries: &[PathBuf], depth: u32, format: Format) -> Result<u8, Failure> {
    let o = load_ontology(ontology)?;
    let queries = load_queries(queries)?;
    if o.has_disjunction() {
        return Err(Failure(EXIT_USAGE, "the oracle needs a Horn ontology".into()));
    }
    let c = rsacomb::oracle::chase(&o, depth as usize)?;
    if c.terminated && !c.satisfiable() {
        return Err(Error::Unsatisfiable.into());
    }
    if !c.terminated {
        eprintln!("warning: chase stopped at depth {depth}; answers may be incomplete (exact=false)");
    }
    let answers: Vec<AnswerSet> = queries.iter().map(|(_, q)| certain_answers_chase(&o, q, depth as usize)).collect::<Result<_, _>>()?;
    emit(&queries, &answers, format, None)?;
    Ok(0)
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::Check { ontology, dot } => cmd_check(&ontology, dot.as_deref()),
        Command::Approximate { ontology, out, report } => cmd_approximate(&ontology, out.as_deref(), report.as_deref()),
        Command::Answer(args) => cmd_answer(&args),
        Command::Oracle { ontology, queries, depth, format } => cmd_oracle(&ontology, &queries, depth, format),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
