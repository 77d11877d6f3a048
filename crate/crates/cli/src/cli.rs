//! Argument parsing and subcommand dispatch for the `o4m` binary.

use std::ffi::OsString;
use std::io::Write;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use onto4mat::geom::Vec2;
use onto4mat::intent::Decision;
use onto4mat::kb::Ontology;
use onto4mat::lint;
use onto4mat::model::{self, builtin_profile_text};
use onto4mat::ontoclean::{self, MetaProfile};
use onto4mat::reasoner;
use onto4mat::sim::SimDefaults;
use onto4mat::kbx;
use serde_json::json;

use crate::missions::{IntentInput, Service, ServiceError};
use crate::store::{MissionRecord, Store};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Name accepted wherever an ontology file is expected.
pub const BUILTIN: &str = "builtin";

#[derive(Debug, Parser)]
#[command(name = "o4m", version, about = "Shepherding ontology toolkit and mission service")]
pub struct Cli {
    /// Mission store directory.
    #[arg(long, global = true, env = "O4M_STORE", default_value = "missions")]
    pub store: PathBuf,
    /// Simulator defaults file (key = value); the shipped defaults otherwise.
    #[arg(long, global = true)]
    pub defaults: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Lint an ontology and check it against a meta-property profile.
    Validate {
        file: String,
        #[arg(long)]
        meta: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Print ontology metrics.
    Metrics {
        file: String,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Compare ontology metrics with the published target.
    Conformance {
        file: String,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Evaluate a class expression.
    Query {
        file: String,
        #[arg(long)]
        expr: String,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Resolve an intent, print the brief and store a mission.
    Resolve {
        file: String,
        #[arg(long)]
        intent: String,
        #[arg(long, value_parser = parse_goal)]
        goal: Vec2,
        #[arg(long)]
        sheep: u32,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Approve a briefed mission.
    Approve { id: String },
    /// Reject a briefed mission.
    Reject { id: String },
    /// Run an approved mission to completion.
    Run {
        id: String,
        #[arg(long)]
        export: Option<PathBuf>,
    },
    /// Serve the HTTP API and console.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: std::net::IpAddr,
        /// Directory of built console assets served at `/`.
        #[arg(long)]
        assets: Option<PathBuf>,
    },
}

fn parse_goal(s: &str) -> Result<Vec2, String> {
    let (x, y) = s.split_once(',').ok_or("expected X,Y")?;
    let num = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("`{v}`: {e}"));
    Ok(Vec2::new(num(x)?, num(y)?))
}

/// Loads a KBX file, or the shipped ontology for `builtin`.
pub fn load_ontology(file: &str) -> Result<Ontology, String> {
    if file == BUILTIN {
        return Ok(model::load_builtin());
    }
    let text = std::fs::read_to_string(file).map_err(|e| format!("{file}: {e}"))?;
    kbx::parse(&text).map_err(|e| format!("{file}: {e}"))
}

fn load_defaults(path: Option<&Path>) -> Result<SimDefaults, String> {
    match path {
        None => Ok(SimDefaults::shipped()),
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))?;
            SimDefaults::parse(&text).map_err(|e| format!("{}: {e}", p.display()))
        }
    }
}

struct Io<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

impl Io<'_> {
    fn fail(&mut self, msg: impl std::fmt::Display) -> i32 {
        let _ = writeln!(self.err, "error: {msg}");
        EXIT_FAILURE
    }
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn dispatch<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{text}");
                    EXIT_USAGE
                }
            };
        }
    };
    let mut io = Io { out, err };
    match execute(cli, &mut io) {
        Ok(code) => code,
        Err(msg) => io.fail(msg),
    }
}

fn service(cli: &Cli, ontology: Ontology) -> Result<Service, String> {
    let defaults = load_defaults(cli.defaults.as_deref())?;
    let store = Store::open(&cli.store).map_err(|e| e.to_string())?;
    Service::new(ontology, defaults, store).map_err(|e| e.to_string())
}

fn service_err(e: ServiceError) -> String {
    format!("{}: {e}", e.code())
}

fn pretty(v: &serde_json::Value) -> String {
    serde_json::to_string_pretty(v).expect("json serializes")
}

fn print_record(io: &mut Io, rec: &MissionRecord) {
    let _ = writeln!(io.out, "mission {}: {}", rec.id(), rec.status());
}

fn execute(cli: Cli, io: &mut Io) -> Result<i32, String> {
    match &cli.command {
        Command::Validate { file, meta, format } => {
            let o = load_ontology(file)?;
            let report = lint::scan(&o).map_err(|e| e.to_string())?;
            let profile: Option<MetaProfile> = match (meta, file.as_str()) {
                (Some(p), _) => {
                    let text = std::fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))?;
                    Some(ontoclean::load_profile(&text).map_err(|e| format!("{}: {e}", p.display()))?)
                }
                (None, BUILTIN) => Some(ontoclean::load_profile(&builtin_profile_text()).map_err(|e| e.to_string())?),
                (None, _) => None,
            };
            let violations = match &profile {
                Some(p) => {
                    let m = reasoner::classify(&o).map_err(|e| e.to_string())?;
                    Some(ontoclean::check(&m, p).map_err(|e| e.to_string())?)
                }
                None => None,
            };
            match format {
                Format::Text => {
                    let _ = write!(io.out, "{}", report.to_text());
                    if let Some(v) = &violations {
                        let _ = write!(io.out, "{}", ontoclean::violations_to_text(v));
                    }
                }
                Format::Json => {
                    let _ = writeln!(io.out, "{}", pretty(&json!({ "lint": report, "ontoclean": violations })));
                }
            }
            let clean = !report.has_critical() && violations.as_ref().is_none_or(|v| v.is_empty());
            Ok(if clean { EXIT_OK } else { EXIT_FAILURE })
        }
        Command::Metrics { file, format } => {
            let m = load_ontology(file)?.metrics();
            match format {
                Format::Text => {
                    for (k, v) in m.fields() {
                        let _ = writeln!(io.out, "{k} {v}");
                    }
                }
                Format::Json => {
                    let _ = writeln!(io.out, "{}", pretty(&json!(m)));
                }
            }
            Ok(EXIT_OK)
        }
        Command::Conformance { file, format } => {
            let r = model::conformance(&load_ontology(file)?);
            match format {
                Format::Text => {
                    let _ = write!(io.out, "{}", r.to_text());
                }
                Format::Json => {
                    let _ = writeln!(io.out, "{}", pretty(&json!(r)));
                }
            }
            Ok(EXIT_OK)
        }
        Command::Query { file, expr, format } => {
            let o = load_ontology(file)?;
            let m = reasoner::classify(&o).map_err(|e| e.to_string())?;
            let e = kbx::parse_expression(expr).map_err(|e| format!("expression: {e}"))?;
            let r = reasoner::query(&m, &e).map_err(|e| e.to_string())?;
            match format {
                Format::Text => {
                    for i in &r.individuals {
                        let _ = writeln!(io.out, "{i}");
                    }
                }
                Format::Json => {
                    let _ = writeln!(io.out, "{}", pretty(&json!(r)));
                }
            }
            Ok(EXIT_OK)
        }
        Command::Resolve { file, intent, goal, sheep, seed, format } => {
            let svc = service(&cli, load_ontology(file)?)?;
            let input = IntentInput {
                intent: intent.clone(),
                goal: *goal,
                sheep: *sheep,
                seed: *seed,
            };
            let rec = svc.resolve(&input).map_err(service_err)?;
            match format {
                Format::Text => {
                    let _ = write!(io.out, "{}", rec.brief.narrative);
                    print_record(io, &rec);
                }
                Format::Json => {
                    let _ = writeln!(io.out, "{}", pretty(&json!(rec)));
                }
            }
            Ok(EXIT_OK)
        }
        Command::Approve { id } | Command::Reject { id } => {
            let d = if matches!(cli.command, Command::Approve { .. }) {
                Decision::Approve
            } else {
                Decision::Reject
            };
            let svc = service(&cli, model::load_builtin())?;
            let rec = svc.decide(id, d).map_err(service_err)?;
            print_record(io, &rec);
            Ok(EXIT_OK)
        }
        Command::Run { id, export } => {
            let svc = service(&cli, model::load_builtin())?;
            let rec = svc.run_blocking(id, export.as_deref()).map_err(service_err)?;
            print_record(io, &rec);
            if let Some(p) = &rec.trajectory_path {
                let _ = writeln!(io.out, "trajectory {}", p.display());
            }
            Ok(if rec.status() == onto4mat::intent::MissionStatus::Succeeded {
                EXIT_OK
            } else {
                EXIT_FAILURE
            })
        }
        Command::Serve { port, host, assets } => {
            let svc = service(&cli, model::load_builtin())?
                .with_profile(ontoclean::load_profile(&builtin_profile_text()).map_err(|e| e.to_string())?);
            let rt = tokio::runtime::Runtime::new().map_err(|e| e.to_string())?;
            let addr = SocketAddr::new(*host, *port);
            rt.block_on(crate::server::serve(svc, assets.clone(), addr))
                .map_err(|e| e.to_string())?;
            Ok(EXIT_OK)
        }
    }
}
