use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use serde_json::Value;

use banarith::cli::{json_error_document, run_job, JobSpec};

/// Exact-rational computations in weighted sequence spaces, polydisk
/// algebras and p-adic presentations, with rigorous tail bounds.
///
/// Invoke as `banarith <subcommand...>`, e.g. `banarith padic divide`,
/// `banarith norm`, `banarith suite acceptance`. Inputs and outputs are
/// JSON documents with all numerics as "num/den" strings.
#[derive(Parser)]
#[command(name = "banarith", version, about)]
struct Cli {
    /// Subcommand path, e.g. `padic divide` or `suite acceptance`.
    #[arg(required = true, num_args = 1..)]
    command: Vec<String>,

    /// Input document path, or `-` for stdin.
    #[arg(long)]
    input: Option<PathBuf>,

    /// Output path (defaults to stdout).
    #[arg(long)]
    output: Option<PathBuf>,

    /// Working truncation degree.
    #[arg(long)]
    truncation: Option<u32>,

    /// Seed for the sampled verification suites; core computations never
    /// depend on it.
    #[arg(long)]
    seed: Option<u64>,

    /// Output format (only `json`).
    #[arg(long, default_value = "json")]
    format: String,

    /// Convenience flags merged into the input document.
    #[arg(long)]
    p: Option<u64>,
    #[arg(long)]
    q: Option<u64>,
    #[arg(long)]
    r: Option<String>,
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    via: Option<String>,
    #[arg(long)]
    degree: Option<u64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.format != "json" {
        eprintln!("unsupported format {:?}; only json is available", cli.format);
        return ExitCode::from(2);
    }

    // assemble the input document: file/stdin, then flag overlays
    let raw = match &cli.input {
        Some(path) if path.as_os_str() == "-" => {
            let mut buf = String::new();
            if let Err(e) = std::io::stdin().read_to_string(&mut buf) {
                eprintln!("cannot read stdin: {e}");
                return ExitCode::from(2);
            }
            Some(buf)
        }
        Some(path) => match std::fs::read_to_string(path) {
            Ok(s) => Some(s),
            Err(e) => {
                eprintln!("cannot read {path:?}: {e}");
                return ExitCode::from(2);
            }
        },
        None => None,
    };
    let mut input: Value = match raw {
        Some(s) => match serde_json::from_str(&s) {
            Ok(v) => v,
            Err(e) => {
                let doc = json_error_document(&e);
                emit(&cli.output, &doc);
                return ExitCode::from(2);
            }
        },
        None => Value::Object(Default::default()),
    };
    if let Value::Object(map) = &mut input {
        if let Some(p) = cli.p {
            map.insert("p".into(), Value::from(p));
        }
        if let Some(q) = cli.q {
            map.insert("q".into(), Value::from(q));
        }
        if let Some(r) = &cli.r {
            map.insert("r".into(), Value::from(r.clone()));
        }
        if let Some(n) = &cli.n {
            map.insert("n".into(), Value::from(n.clone()));
        }
        if let Some(via) = &cli.via {
            map.insert("via".into(), Value::from(via.clone()));
        }
        if let Some(degree) = cli.degree {
            map.insert("degree".into(), Value::from(degree));
        }
    }

    let job =
        JobSpec { subcommand: cli.command, input, truncation: cli.truncation, seed: cli.seed };
    let (code, output) = run_job(&job);
    emit(&cli.output, &output);
    ExitCode::from(code.clamp(0, 255) as u8)
}

fn emit(path: &Option<PathBuf>, doc: &Value) {
    let body = serde_json::to_string(doc).expect("output serializes");
    match path {
        Some(p) => {
            if let Err(e) = std::fs::write(p, format!("{body}\n")) {
                eprintln!("cannot write {p:?}: {e}");
            }
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            let _ = writeln!(stdout, "{body}");
        }
    }
}
