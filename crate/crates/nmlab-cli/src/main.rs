//! Command-line front end: loads objects from their text formats and
//! delegates to the library's command runner.
//!
//! File kinds are inferred from extensions: `.net` (diagrams and
//! blocking nets), `.rnet` (reactive diagrams), `.cf` (choice
//! functions), `.ss` (size systems), `.ps` (preferential structures),
//! `.gs` (higher structures).  Paths that do not exist are retried
//! under the directory named by `NMLAB_CORPUS`.  Exit status: 0 when
//! the command succeeds or the property holds, 1 when a property is
//! violated or a construction refused (the witness is printed), 2 on
//! unusable input.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use nmlab::infer::Mode;
use nmlab::io::{
    self, CheckObject, Command, DotObject, ReprKind, RunOutput, VerifyTarget,
};
use nmlab::net::NodeId;

#[derive(Parser)]
#[command(name = "nmlab", about = "Nonmonotonic reasoning workbench", version)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Split,
    Onpath,
    Total,
    Extensions,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Split => Mode::OffPathSplit,
            ModeArg::Onpath => Mode::OnPath,
            ModeArg::Total => Mode::TotalValidity,
            ModeArg::Extensions => Mode::Extensions,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Text,
    Dot,
}

#[derive(Subcommand)]
enum Sub {
    /// Conclude whether y holds from x in an inheritance diagram.
    Infer {
        diagram: PathBuf,
        x: String,
        y: String,
        #[arg(long, value_enum, default_value = "split")]
        mode: ModeArg,
    },
    /// Check a property token against a choice function (.cf) or a
    /// size-rule token against a size system (.ss).
    Check { object: PathBuf, property: String },
    /// Build a representing structure for a choice function.
    Represent {
        function: PathBuf,
        /// general | transitive | smooth | smooth-transitive | ranked |
        /// layer-ranked | attacking | level3
        kind: String,
        /// Partition blocks for layer-ranked, e.g. `{a,b}|{c}`.
        #[arg(long)]
        blocks: Option<String>,
        /// Ask layer-ranked for the smooth variant.
        #[arg(long)]
        smooth: bool,
    },
    /// Check that a structure (.ps or .gs) represents a choice function.
    Verify { structure: PathBuf, function: PathBuf },
    /// Compile a diagram into its reactive form for one origin.
    Reactive { diagram: PathBuf, origin: String },
    /// Compute the visible set of seed nodes in a blocking net.
    Horizon {
        net: PathBuf,
        #[arg(required = true)]
        seeds: Vec<String>,
    },
    /// Render an object as DOT (or echo its canonical text form).
    ExportDot {
        object: PathBuf,
        #[arg(long, value_enum, default_value = "dot")]
        format: FormatArg,
    },
    /// Search for a choice function meeting the hypotheses (comma
    /// separated property tokens) but violating the conclusion.
    Search {
        hypothesis: String,
        conclusion: String,
        #[arg(long, default_value_t = 3)]
        bound: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn resolve(path: &Path) -> PathBuf {
    if path.exists() {
        return path.to_path_buf();
    }
    if let Ok(corpus) = std::env::var("NMLAB_CORPUS") {
        let candidate = Path::new(&corpus).join(path);
        if candidate.exists() {
            return candidate;
        }
    }
    path.to_path_buf()
}

fn load(path: &Path) -> Result<String, String> {
    let resolved = resolve(path);
    std::fs::read_to_string(&resolved)
        .map_err(|e| format!("cannot read {}: {e}", resolved.display()))
}

fn extension(path: &Path) -> &str {
    path.extension().and_then(|e| e.to_str()).unwrap_or("")
}

fn build(cli: &Sub) -> Result<Command, String> {
    let semantic = |e: nmlab::io::IoError| e.to_string();
    Ok(match cli {
        Sub::Infer { diagram, x, y, mode } => Command::Infer {
            diagram: io::parse_diagram(&load(diagram)?).map_err(semantic)?,
            x: NodeId::new(x.as_str()),
            y: NodeId::new(y.as_str()),
            mode: (*mode).into(),
        },
        Sub::Check { object, property } => {
            let text = load(object)?;
            let parsed = match extension(object) {
                "ss" => CheckObject::System(io::parse_system(&text).map_err(semantic)?),
                _ => CheckObject::Function(io::parse_function(&text).map_err(semantic)?),
            };
            Command::Check { object: parsed, property: property.clone() }
        }
        Sub::Represent { function, kind, blocks, smooth } => {
            let kind = if kind == "layer-ranked" {
                let Some(blocks) = blocks else {
                    return Err("layer-ranked needs --blocks".into());
                };
                ReprKind::LayerRanked {
                    blocks: io::parse_blocks(blocks).map_err(semantic)?,
                    smooth: *smooth,
                }
            } else {
                kind.parse::<ReprKind>()?
            };
            Command::Represent {
                function: io::parse_function(&load(function)?).map_err(semantic)?,
                kind,
            }
        }
        Sub::Verify { structure, function } => {
            let text = load(structure)?;
            let target = match extension(structure) {
                "gs" => VerifyTarget::Gen(io::parse_gen(&text).map_err(semantic)?),
                _ => VerifyTarget::Pref(io::parse_pref(&text).map_err(semantic)?),
            };
            Command::Verify {
                structure: target,
                function: io::parse_function(&load(function)?).map_err(semantic)?,
            }
        }
        Sub::Reactive { diagram, origin } => Command::Reactive {
            diagram: io::parse_diagram(&load(diagram)?).map_err(semantic)?,
            origin: NodeId::new(origin.as_str()),
        },
        Sub::Horizon { net, seeds } => Command::Horizon {
            net: io::parse_diagram(&load(net)?).map_err(semantic)?,
            seeds: seeds.iter().map(|s| NodeId::new(s.as_str())).collect::<BTreeSet<_>>(),
        },
        Sub::ExportDot { object, format } => {
            let text = load(object)?;
            let parsed = match extension(object) {
                "rnet" => DotObject::Reactive(io::parse_reactive(&text).map_err(semantic)?),
                "ps" => DotObject::Pref(io::parse_pref(&text).map_err(semantic)?),
                "gs" => DotObject::Gen(io::parse_gen(&text).map_err(semantic)?),
                _ => DotObject::Diagram(io::parse_diagram(&text).map_err(semantic)?),
            };
            if matches!(format, FormatArg::Text) {
                // Echo the canonical text form instead of DOT.
                let canon = match &parsed {
                    DotObject::Diagram(d) => io::serialize_diagram(d),
                    DotObject::Reactive(r) => io::serialize_reactive(r),
                    DotObject::Pref(s) => io::serialize_pref(s),
                    DotObject::Gen(s) => io::serialize_gen(s),
                };
                print!("{canon}");
                std::process::exit(0);
            }
            Command::ExportDot { object: parsed }
        }
        Sub::Search { hypothesis, conclusion, bound, seed } => Command::Search {
            hypothesis: hypothesis
                .split(',')
                .map(str::trim)
                .filter(|h| !h.is_empty())
                .map(String::from)
                .collect(),
            conclusion: conclusion.clone(),
            bound: *bound,
            seed: *seed,
        },
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let command = match build(&cli.command) {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    let RunOutput { status, text } = io::run(&command);
    print!("{text}");
    ExitCode::from(status as u8)
}
