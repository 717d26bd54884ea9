use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qf_core::Caps;
use qf_lawcheck::doc::{Structure, StructureDoc};
use qf_lawcheck::runner::{run, Report, RunOptions, Scope};
use qf_lawcheck::{dot, generate, laws, report};

#[derive(Parser)]
#[command(name = "qf", version, about = "Validate, generate and law-check finite sup-lattice structures")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check that a document satisfies the axioms of its kind.
    Validate { file: PathBuf },
    /// Print a named example as JSON.
    Generate {
        /// Generator name; omit to list generators.
        name: Option<String>,
        params: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Law registry.
    Laws {
        #[command(subcommand)]
        command: LawsCommand,
    },
    /// Render the Hasse diagrams of a document's carriers.
    ExportDot {
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run every law over its family and print a report.
    Report {
        #[command(flatten)]
        format: Format,
        #[command(flatten)]
        run: RunArgs,
        /// Re-render a saved JSON report instead of running.
        #[arg(long)]
        from: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum LawsCommand {
    /// Run laws and exit 1 if any fails.
    Run {
        #[command(flatten)]
        run: RunArgs,
        /// `enum` for each law's instance family, or a document path.
        #[arg(long, default_value = "enum")]
        scope: String,
        #[command(flatten)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List law ids with their statements.
    List,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    law: Option<String>,
    /// Size bound for the instance families, overriding each law's default.
    #[arg(long, env = "QF_CAP")]
    cap: Option<usize>,
}

#[derive(Args)]
#[group(multiple = false)]
struct Format {
    #[arg(long)]
    json: bool,
    #[arg(long)]
    text: bool,
}

enum Failure {
    Usage(String),
    Laws,
}

fn load(path: &Path) -> Result<(StructureDoc, Structure), Failure> {
    let doc = StructureDoc::load(path).map_err(|e| Failure::Usage(e.to_string()))?;
    let s = Structure::from_doc(&doc).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    Ok((doc, s))
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), Failure> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn render(r: &Report, format: &Format, out: Option<&Path>) -> Result<(), Failure> {
    if format.json {
        emit(&(report::to_json(r) + "\n"), out)?;
    } else {
        emit(&report::to_text(r), out)?;
    }
    if r.passed() {
        Ok(())
    } else {
        Err(Failure::Laws)
    }
}

fn run_laws(args: &RunArgs, scope: Scope) -> Result<Report, Failure> {
    let opts = RunOptions { law: args.law.clone(), bound: args.cap, scope, caps: Caps::default() };
    run(&opts).map_err(|e| Failure::Usage(e.to_string()))
}

fn dispatch(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Validate { file } => {
            let (doc, _) = load(&file)?;
            println!("ok: {} {}", doc.kind().name(), doc.name);
            Ok(())
        }
        Command::Generate { name: None, .. } => {
            for (_, usage) in generate::GENERATORS {
                println!("{usage}");
            }
            Ok(())
        }
        Command::Generate { name: Some(name), params, out } => {
            let doc = generate::generate(&name, &params).map_err(|e| Failure::Usage(e.to_string()))?;
            emit(&(doc.to_json() + "\n"), out.as_deref())
        }
        Command::Laws { command: LawsCommand::List } => {
            for law in laws::registry() {
                println!("{:28} {}", law.id, law.statement);
            }
            Ok(())
        }
        Command::Laws { command: LawsCommand::Run { run, scope, format, out } } => {
            let scope = if scope == "enum" {
                Scope::Enumerate
            } else {
                Scope::Document(Box::new(
                    StructureDoc::load(Path::new(&scope)).map_err(|e| Failure::Usage(e.to_string()))?,
                ))
            };
            let r = run_laws(&run, scope)?;
            render(&r, &format, out.as_deref())
        }
        Command::ExportDot { file, out } => {
            let (doc, s) = load(&file)?;
            let name = if doc.name.is_empty() { doc.kind().name().to_string() } else { doc.name.clone() };
            emit(&dot::to_dot(&s, &name), out.as_deref())
        }
        Command::Report { format, run, from, out } => {
            let r = match from {
                Some(p) => {
                    let text = std::fs::read_to_string(&p)
                        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", p.display())))?;
                    report::from_json(&text).map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))?
                }
                None => run_laws(&run, Scope::Enumerate)?,
            };
            render(&r, &format, out.as_deref())
        }
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Laws) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
