//! Argument handling and subcommands for the `statecross` binary.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use statecross::classify::classify_all_layers;
use statecross::extract::extract;
use statecross::judgment::{boundary_warnings, build_judgment_list, find_external_transitions};
use statecross::model::{ScopePath, StateMachine, Vocabulary, Workflow};
use statecross::pipeline::check;
use statecross::report::{render_classification, render_judgment, render_structured, render_text};
use statecross::text::{
    parse_statemachine, parse_vocabulary, parse_workflow, serialize_extraction, validate_workflow, Severity,
};

pub const EXIT_CLEAN: i32 = 0;
pub const EXIT_FINDINGS: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "statecross", version, about = "Cross-check workflow models against evaluation state machines")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Extract a flat state machine from one workflow partition.
    Extract {
        #[arg(long)]
        workflow: PathBuf,
        #[arg(long)]
        partition: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Print the judgment list and external transitions of one layer.
    Judge {
        #[arg(long)]
        evaluation: PathBuf,
        /// `/`-separated state ids; the root when omitted.
        #[arg(long)]
        scope: Option<String>,
        #[arg(long)]
        vocab: Option<PathBuf>,
    },
    /// Print the per-layer classification of the extracted states.
    Classify {
        #[arg(long)]
        workflow: PathBuf,
        #[arg(long)]
        partition: String,
        #[arg(long)]
        evaluation: PathBuf,
        #[arg(long)]
        vocab: Option<PathBuf>,
    },
    /// Run the full comparison and report every finding.
    Check {
        #[arg(long)]
        workflow: PathBuf,
        #[arg(long)]
        partition: String,
        #[arg(long)]
        evaluation: PathBuf,
        #[arg(long)]
        vocab: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

fn read(path: &Path) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_workflow(path: &Path) -> Result<Workflow, String> {
    parse_workflow(&read(path)?).map_err(|e| e.with_file(path).to_string())
}

fn load_machine(path: &Path) -> Result<StateMachine, String> {
    parse_statemachine(&read(path)?).map_err(|e| e.with_file(path).to_string())
}

fn load_vocab(path: Option<&Path>) -> Result<Vocabulary, String> {
    match path {
        None => Ok(Vocabulary::new()),
        Some(p) => parse_vocabulary(&read(p)?).map_err(|e| e.with_file(p).to_string()),
    }
}

fn emit(out: &mut dyn Write, target: Option<&Path>, payload: &str) -> Result<(), String> {
    match target {
        Some(p) => fs::write(p, payload).map_err(|e| format!("{}: {e}", p.display())),
        None => out.write_all(payload.as_bytes()).map_err(|e| e.to_string()),
    }
}

fn execute(cmd: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, String> {
    match cmd {
        Command::Extract { workflow, partition, output } => {
            let w = load_workflow(&workflow)?;
            for d in validate_workflow(&w, &partition) {
                if d.severity == Severity::Warning {
                    let _ = writeln!(err, "{d}");
                }
            }
            let x = extract(&w, &partition).map_err(|e| e.to_string())?;
            emit(out, output.as_deref(), &serialize_extraction(&x))?;
            Ok(EXIT_CLEAN)
        }
        Command::Judge { evaluation, scope, vocab } => {
            let m = load_machine(&evaluation)?;
            let v = load_vocab(vocab.as_deref())?;
            let scope = scope.map(|s| ScopePath::parse(&s)).unwrap_or_else(ScopePath::root);
            let j = build_judgment_list(&m, &scope, &v).map_err(|e| e.to_string())?;
            let ext = find_external_transitions(&m, &scope, &v).map_err(|e| e.to_string())?;
            let warn = boundary_warnings(&m, &scope).map_err(|e| e.to_string())?;
            emit(out, None, &render_judgment(&j, &ext, &warn))?;
            Ok(EXIT_CLEAN)
        }
        Command::Classify { workflow, partition, evaluation, vocab } => {
            let w = load_workflow(&workflow)?;
            let m = load_machine(&evaluation)?;
            let v = load_vocab(vocab.as_deref())?;
            let x = extract(&w, &partition).map_err(|e| e.to_string())?;
            let layers = classify_all_layers(&x, &m, &v).map_err(|e| e.to_string())?;
            let mut text = String::new();
            for (spec, c) in &layers {
                text += &format!("== layer {} ==\n", c.scope);
                text += &render_classification(c, spec, &x);
                for f in &c.conflicts {
                    text += &format!("  conflict: {}\n", f.detail);
                }
            }
            emit(out, None, &text)?;
            Ok(EXIT_CLEAN)
        }
        Command::Check { workflow, partition, evaluation, vocab, format, output } => {
            let w = load_workflow(&workflow)?;
            let m = load_machine(&evaluation)?;
            let v = load_vocab(vocab.as_deref())?;
            let r = check(&w, &partition, &m, &v).map_err(|e| e.to_string())?;
            let payload = match format {
                Format::Text => render_text(&r),
                Format::Json => render_structured(&r),
            };
            emit(out, output.as_deref(), &payload)?;
            Ok(if r.findings.is_empty() { EXIT_CLEAN } else { EXIT_FINDINGS })
        }
    }
}

/// Runs the tool on `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let rendered = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = out.write_all(rendered.as_bytes());
                    EXIT_CLEAN
                }
                _ => {
                    let _ = err.write_all(rendered.as_bytes());
                    EXIT_ERROR
                }
            };
        }
    };
    match execute(cli.command, out, err) {
        Ok(code) => code,
        Err(msg) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_ERROR
        }
    }
}
