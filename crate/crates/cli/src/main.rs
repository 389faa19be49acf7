//! `gsys`: check, run, simulate and format `.gsys` specification files.
//!
//! Exit codes: 0 on success, 1 on parse, validation or query errors, 2 when
//! `--assert` is given and some query evaluates to false.

use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use gsys_core::atoms::{dependence_checker, DEFAULT_DEPENDENCE_CHECKER};
use gsys_core::budget::DEFAULT_MAX_ENUM;
use gsys_core::{Budget, Config};
use gsys_lang::{
    parse, pretty_print, run_all, run_query, validate_with, LangError, QueryResult, RunOptions, Workspace,
};
use serde_json::Value;

#[derive(Parser)]
#[command(
    name = "gsys",
    version,
    about = "Query finite G-dynamical systems described in .gsys files"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate a file without running its queries.
    Check { file: PathBuf },
    /// Run the queries of a file in declaration order.
    Run {
        file: PathBuf,
        /// Run only this query.
        #[arg(long)]
        query: Option<String>,
        /// Print results as JSON.
        #[arg(long)]
        json: bool,
        /// Exit with status 2 if any query evaluates to false.
        #[arg(long)]
        assert: bool,
        /// Largest configuration space a single enumeration may visit.
        #[arg(long, env = "GSYS_MAX_ENUM", default_value_t = DEFAULT_MAX_ENUM)]
        max_enum: u64,
        /// Dependence checker: bucketed, pairwise or export-fd.
        #[arg(long, default_value = DEFAULT_DEPENDENCE_CHECKER)]
        dep_checker: String,
    },
    /// Iterate a system from an initial configuration.
    Simulate {
        file: PathBuf,
        #[arg(long)]
        system: String,
        /// Initial configuration, e.g. "a=1,b=0".
        #[arg(long)]
        init: String,
        #[arg(long)]
        steps: usize,
        #[arg(long, env = "GSYS_MAX_ENUM", default_value_t = DEFAULT_MAX_ENUM)]
        max_enum: u64,
    },
    /// Print a file in canonical form. Comments are dropped.
    Fmt {
        file: PathBuf,
        /// Overwrite the file instead of printing.
        #[arg(short, long)]
        write: bool,
    },
}

/// Writes a line to stdout. A closed pipe (`gsys run f | head`) ends the
/// process quietly instead of panicking.
fn emit(args: fmt::Arguments) {
    let mut out = io::stdout().lock();
    if let Err(e) = out.write_fmt(args).and_then(|_| out.write_all(b"\n")) {
        if e.kind() == io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
        eprintln!("error: cannot write output: {e}");
        std::process::exit(1);
    }
}

macro_rules! out {
    ($($arg:tt)*) => { emit(format_args!($($arg)*)) };
}

fn read(path: &Path) -> Result<String, ExitCode> {
    fs::read_to_string(path).map_err(|e| {
        eprintln!("error: cannot read {}: {e}", path.display());
        ExitCode::from(1)
    })
}

fn report(path: &Path, err: &LangError) -> ExitCode {
    match err {
        LangError::Parse(e) => eprintln!(
            "{}:{}: parse error: {}",
            path.display(),
            e.span,
            strip_span(&e.to_string())
        ),
        LangError::Validation(e) => eprintln!("{}:{}: {}: {}", path.display(), e.span, e.kind, e.message),
        LangError::Query(e) => eprintln!("{}: {e}", path.display()),
    }
    ExitCode::from(1)
}

fn strip_span(msg: &str) -> &str {
    msg.split_once(": ").map_or(msg, |(_, rest)| rest)
}

fn load(path: &Path, max_enum: u64) -> Result<Workspace, ExitCode> {
    let src = read(path)?;
    let doc = parse(&src).map_err(|e| report(path, &e.into()))?;
    validate_with(&doc, &Budget::new(max_enum)).map_err(|e| report(path, &e.into()))
}

fn print_human(r: &QueryResult) {
    let verdict = match r.holds() {
        Some(true) => "true",
        Some(false) => "false",
        None => "done",
    };
    out!(
        "{} ({}): {verdict}  [{} configs, {} ms]",
        r.query,
        r.kind,
        r.configs_enumerated,
        r.millis
    );
    if let Some(v) = &r.outcome.value {
        out!("  value: {v}");
    }
    if let Some(w) = &r.outcome.witness {
        out!("  witness: {w}");
    }
}

fn run(file: &Path, query: Option<&str>, json: bool, assert: bool, max_enum: u64, dep_checker: &str) -> ExitCode {
    let checker = match dependence_checker(dep_checker) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let ws = match load(file, max_enum) {
        Ok(ws) => ws,
        Err(code) => return code,
    };
    let opts = RunOptions {
        max_enum,
        dep_checker: checker,
        ..RunOptions::default()
    };
    let results = match query {
        Some(q) => vec![run_query(&ws, q, &opts)],
        None => run_all(&ws, &opts),
    };
    let (mut failed, mut any_false) = (false, false);
    let mut json_out = Vec::new();
    for r in &results {
        match r {
            Ok(r) => {
                any_false |= r.holds() == Some(false);
                if json {
                    json_out.push(r.to_json());
                } else {
                    print_human(r);
                }
            }
            Err(e) => {
                failed = true;
                eprintln!("{}: {e}", file.display());
            }
        }
    }
    if json {
        let out = if query.is_some() && json_out.len() == 1 {
            json_out.pop().unwrap()
        } else {
            Value::Array(json_out)
        };
        out!("{}", serde_json::to_string_pretty(&out).expect("values serialise"));
    }
    if failed {
        ExitCode::from(1)
    } else if assert && any_false {
        ExitCode::from(2)
    } else {
        ExitCode::SUCCESS
    }
}

fn simulate(file: &Path, system: &str, init: &str, steps: usize, max_enum: u64) -> ExitCode {
    let ws = match load(file, max_enum) {
        Ok(ws) => ws,
        Err(code) => return code,
    };
    let Some(s) = ws.systems.get(system) else {
        eprintln!("{}: no system named `{system}`", file.display());
        return ExitCode::from(1);
    };
    let trace = Config::parse_literal(init, s.magma())
        .and_then(|g| g.realign(s.vars()))
        .and_then(|g| s.iterate(&g, steps));
    match trace {
        Ok(trace) => {
            for (i, g) in trace.iter().enumerate() {
                out!("{i}: {}", g.display(s.magma()));
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}: {e}", file.display());
            ExitCode::from(1)
        }
    }
}

fn fmt(file: &Path, write: bool) -> ExitCode {
    let src = match read(file) {
        Ok(s) => s,
        Err(code) => return code,
    };
    let doc = match parse(&src) {
        Ok(d) => d,
        Err(e) => return report(file, &e.into()),
    };
    let out = pretty_print(&doc);
    if write {
        if let Err(e) = fs::write(file, out) {
            eprintln!("error: cannot write {}: {e}", file.display());
            return ExitCode::from(1);
        }
    } else {
        out!("{}", out.trim_end_matches('\n'));
    }
    ExitCode::SUCCESS
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Check { file } => match load(&file, DEFAULT_MAX_ENUM) {
            Ok(ws) => {
                out!(
                    "{}: ok ({} systems, {} queries)",
                    file.display(),
                    ws.systems.len(),
                    ws.queries.len()
                );
                ExitCode::SUCCESS
            }
            Err(code) => code,
        },
        Command::Run {
            file,
            query,
            json,
            assert,
            max_enum,
            dep_checker,
        } => run(&file, query.as_deref(), json, assert, max_enum, &dep_checker),
        Command::Simulate {
            file,
            system,
            init,
            steps,
            max_enum,
        } => simulate(&file, &system, &init, steps, max_enum),
        Command::Fmt { file, write } => fmt(&file, write),
    }
}
