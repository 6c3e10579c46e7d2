//! The `fusion` command line: argument definitions, dispatch, and the JSON
//! envelope.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_rational::BigRational;
use serde::Serialize;
use serde_json::{json, Value};

use fusionlab::analysis::{
    ergodicity_report, frequency_hull, patch_frequency_estimate, primitivity_check,
    van_hove_diagnostic, ErgodicityOptions,
};
use fusionlab::dsl::{parse_rule_bytes, parse_rule_with_depth, RuleSummary, SourceSpan};
use fusionlab::error::DiagnosticKind;
use fusionlab::expand::{
    is_admissible, parse_text_grid, parse_word, render_svg, render_text, Expander,
};
use fusionlab::json::rational_string;
use fusionlab::{builtins, CellPatch, Dimension, Error, ExpansionBudget, FusionRule, Hierarchy};

pub const SCHEMA: &str = "fusionlab/1";

#[derive(Debug, Parser)]
#[command(
    name = "fusion",
    version,
    about = "Explore fusion rules for hierarchical tilings"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Emit the JSON envelope instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Largest expansion allowed, in cells.
    #[arg(long, global = true, default_value_t = 10_000_000)]
    pub max_cells: u64,
}

#[derive(Debug, Args)]
pub struct RuleArg {
    /// Rule file, or the name of a bundled example.
    #[arg(value_name = "RULE")]
    positional: Option<String>,
    #[arg(long = "rule", value_name = "FILE|NAME")]
    flag: Option<String>,
}

#[derive(Debug, Args)]
pub struct PatchArg {
    /// 1D: prototile names, one character each or space-separated.
    /// 2D: rows top to bottom separated by `/`, `.` for empty cells.
    #[arg(long)]
    word: Option<String>,
    /// File holding the patch in the same format, one row per line.
    #[arg(long, value_name = "FILE")]
    patch: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate a rule and print it in canonical form.
    Parse {
        #[command(flatten)]
        rule: RuleArg,
        /// Levels checked during validation.
        #[arg(long, default_value_t = 64)]
        depth: u64,
    },
    /// Expand one supertile.
    Expand {
        #[command(flatten)]
        rule: RuleArg,
        #[arg(long)]
        supertile: String,
        #[arg(long)]
        level: u64,
    },
    /// Transition matrix M_{from,to}.
    Matrix {
        #[command(flatten)]
        rule: RuleArg,
        #[arg(long)]
        from: u64,
        #[arg(long)]
        to: u64,
    },
    /// Smallest offset d with M_{n,n+d} entrywise positive.
    Primitivity {
        #[command(flatten)]
        rule: RuleArg,
        #[arg(long, default_value_t = 0)]
        level: u64,
        #[arg(long, default_value_t = 5)]
        max_offset: u64,
    },
    /// Boundary-to-size ratios of supertiles by level.
    Vanhove {
        #[command(flatten)]
        rule: RuleArg,
        #[arg(long, default_value_t = 6)]
        depth: u64,
        #[arg(long, default_value_t = 1)]
        radius: u64,
        #[arg(long, default_value = "1/2")]
        threshold: BigRational,
    },
    /// Frequency hull of level-n supertiles at a horizon, or an ergodicity
    /// report over all horizons up to it.
    Freq {
        #[command(flatten)]
        rule: RuleArg,
        #[arg(long, default_value_t = 0)]
        level: u64,
        #[arg(long)]
        horizon: u64,
        #[arg(long)]
        report: bool,
        #[arg(long, default_value = "1/1000000")]
        tol: BigRational,
        #[arg(long, default_value = "1/100")]
        floor: BigRational,
        #[arg(long, default_value_t = 3)]
        window: usize,
    },
    /// Frequency interval of a patch.
    Patchfreq {
        #[command(flatten)]
        rule: RuleArg,
        #[command(flatten)]
        patch: PatchArg,
        #[arg(long)]
        level: u64,
        #[arg(long)]
        horizon: u64,
    },
    /// Search supertiles for a patch.
    Admissible {
        #[command(flatten)]
        rule: RuleArg,
        #[command(flatten)]
        patch: PatchArg,
        /// Highest level searched.
        #[arg(long, default_value_t = 8)]
        level: u64,
    },
    /// Draw one supertile as text or SVG.
    Render {
        #[command(flatten)]
        rule: RuleArg,
        #[arg(long)]
        supertile: String,
        #[arg(long)]
        level: u64,
        /// `svg` or `txt` for stdout, otherwise a file path.
        #[arg(long, default_value = "txt")]
        out: String,
        #[arg(long, default_value_t = 10)]
        cell_size: u32,
    },
    /// List the bundled example rules.
    Examples {
        #[arg(long, value_name = "NAME")]
        show: Option<String>,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Parse { .. } => "parse",
            Command::Expand { .. } => "expand",
            Command::Matrix { .. } => "matrix",
            Command::Primitivity { .. } => "primitivity",
            Command::Vanhove { .. } => "vanhove",
            Command::Freq { .. } => "freq",
            Command::Patchfreq { .. } => "patchfreq",
            Command::Admissible { .. } => "admissible",
            Command::Render { .. } => "render",
            Command::Examples { .. } => "examples",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub severity: &'static str,
    pub kind: String,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub span: Option<SourceSpan>,
}

impl Diagnostic {
    pub fn error(kind: impl Into<String>, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: "error",
            kind: kind.into(),
            message: message.into(),
            span: None,
        }
    }
}

pub fn diagnostics(err: &Error) -> Vec<Diagnostic> {
    let kind = |k: &DiagnosticKind| to_json(k).as_str().map(String::from);
    match err {
        Error::Parse(ds) => ds
            .iter()
            .map(|d| Diagnostic {
                severity: "error",
                kind: d
                    .kind
                    .as_ref()
                    .and_then(|k| kind(k))
                    .unwrap_or_else(|| "syntax".into()),
                message: d.message.clone(),
                span: Some(d.span),
            })
            .collect(),
        Error::Rule(ds) => ds
            .iter()
            .map(|d| Diagnostic::error(kind(&d.kind).unwrap_or_default(), d.to_string()))
            .collect(),
        other => {
            let k = match other {
                Error::InvalidRange { .. } => "invalid_range",
                Error::UnknownSupertile { .. } => "unknown_supertile",
                Error::ExpansionTooLarge { .. } => "expansion_too_large",
                Error::Overlap { .. } => "overlap",
                Error::Disconnected { .. } => "disconnected",
                Error::Dimension { .. } => "dimension",
                _ => "invalid_patch",
            };
            vec![Diagnostic::error(k, other.to_string())]
        }
    }
}

/// One line of JSON, keys sorted.
pub fn envelope(command: &str, result: Option<Value>, diagnostics: &[Diagnostic]) -> String {
    let value = json!({
        "schema": SCHEMA,
        "command": command,
        "result": result.unwrap_or(Value::Null),
        "diagnostics": serde_json::to_value(diagnostics).expect("diagnostics serialize"),
    });
    let mut out = serde_json::to_string(&value).expect("values serialize");
    out.push('\n');
    out
}

/// Sorted-key JSON value of any serializable result.
pub fn to_json<T: Serialize>(value: &T) -> Value {
    serde_json::to_value(value).expect("results serialize")
}

pub struct Output {
    pub text: String,
    pub json: Value,
}

pub enum Failure {
    Domain(Vec<Diagnostic>),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(diagnostics(&e))
    }
}

/// Explicit file path first, then bundled example name.
pub fn load_rule(spec: &str, depth: u64) -> Result<FusionRule, Failure> {
    let path = Path::new(spec);
    if path.is_file() {
        let bytes = std::fs::read(path)
            .map_err(|e| Failure::Domain(vec![Diagnostic::error("io", format!("{spec}: {e}"))]))?;
        return Ok(match std::str::from_utf8(&bytes) {
            Ok(text) => parse_rule_with_depth(text, depth)?,
            Err(_) => parse_rule_bytes(&bytes)?,
        });
    }
    match builtins::find(spec) {
        Some(ex) => Ok(parse_rule_with_depth(ex.source, depth)?),
        None => Err(Failure::Domain(vec![Diagnostic::error(
            "unknown_rule",
            format!("{spec} is neither a file nor a bundled example"),
        )])),
    }
}

fn rule_of(arg: &RuleArg, depth: u64) -> Result<FusionRule, Failure> {
    match (&arg.positional, &arg.flag) {
        (Some(_), Some(_)) => Err(Failure::Usage(
            "give the rule either positionally or with --rule".into(),
        )),
        (Some(s), None) | (None, Some(s)) => load_rule(s, depth),
        (None, None) => Err(Failure::Usage("a rule is required".into())),
    }
}

/// Reads a patch from `--word` or `--patch` in the rule's dimension.
pub fn read_patch(rule: &FusionRule, text: &str) -> fusionlab::Result<CellPatch> {
    match rule.dimension {
        Dimension::One => parse_word(rule, text),
        Dimension::Two => parse_text_grid(rule.prototile_names().into(), &text.replace('/', "\n")),
    }
}

fn patch_of(rule: &FusionRule, arg: &PatchArg) -> Result<CellPatch, Failure> {
    let text = match (&arg.word, &arg.patch) {
        (Some(w), None) => w.clone(),
        (None, Some(p)) => std::fs::read_to_string(p).map_err(|e| {
            Failure::Domain(vec![Diagnostic::error(
                "io",
                format!("{}: {e}", p.display()),
            )])
        })?,
        _ => {
            return Err(Failure::Usage(
                "give exactly one of --word and --patch".into(),
            ))
        }
    };
    Ok(read_patch(rule, &text)?)
}

fn approx(r: &BigRational) -> String {
    format!(
        "{} (~{:.6})",
        rational_string(r),
        fusionlab::json::approx(r)
    )
}

pub fn run(cli: &Cli) -> Result<Output, Failure> {
    let budget = ExpansionBudget::new(cli.max_cells);
    let depth = fusionlab::resolve::DEFAULT_VALIDATION_DEPTH;
    match &cli.command {
        Command::Parse { rule, depth } => {
            let r = rule_of(rule, *depth)?;
            let summary = RuleSummary::of(&r);
            Ok(Output {
                text: summary.canonical.clone(),
                json: to_json(&summary),
            })
        }
        Command::Expand {
            rule,
            supertile,
            level,
        } => {
            let r = rule_of(rule, depth)?;
            let h = Hierarchy::new(&r);
            let p = Expander::new(&h, budget).expand_label(*level, supertile)?;
            Ok(Output {
                text: render_text(&p) + "\n",
                json: to_json(&p),
            })
        }
        Command::Matrix { rule, from, to } => {
            let r = rule_of(rule, depth)?;
            let m = Hierarchy::new(&r).transition_matrix(*from, *to)?;
            Ok(Output {
                text: m.to_string(),
                json: to_json(&m),
            })
        }
        Command::Primitivity {
            rule,
            level,
            max_offset,
        } => {
            let r = rule_of(rule, depth)?;
            let res = primitivity_check(&Hierarchy::new(&r), *level, *max_offset)?;
            let text = match (&res.minimal_offset, &res.witness_zero) {
                (Some(d), _) => format!(
                    "M_{{{level},{}}} is entrywise positive: minimal offset {d}\n",
                    level + d
                ),
                (None, Some(w)) => format!(
                    "no positive M_{{{level},N}} for N <= {}; zero at ({}, {}) of M_{{{level},{}}}\n",
                    level + max_offset,
                    w.row_label,
                    w.col_label,
                    w.horizon
                ),
                (None, None) => format!("no offset checked (max offset {max_offset})\n"),
            };
            Ok(Output {
                text,
                json: to_json(&res),
            })
        }
        Command::Vanhove {
            rule,
            depth: levels,
            radius,
            threshold,
        } => {
            let r = rule_of(rule, depth)?;
            let rep = van_hove_diagnostic(
                &Hierarchy::new(&r),
                *levels,
                *radius,
                threshold.clone(),
                budget,
            )?;
            let mut text = String::new();
            for l in &rep.levels {
                writeln!(
                    text,
                    "level {:>3}  {:<6} {}",
                    l.level,
                    l.label,
                    approx(&l.ratio)
                )
                .unwrap();
            }
            writeln!(
                text,
                "{}",
                if rep.consistent {
                    "consistent with van Hove"
                } else {
                    "not consistent with van Hove at this depth"
                }
            )
            .unwrap();
            Ok(Output {
                text,
                json: to_json(&rep),
            })
        }
        Command::Freq {
            rule,
            level,
            horizon,
            report,
            tol,
            floor,
            window,
        } => {
            let r = rule_of(rule, depth)?;
            let h = Hierarchy::new(&r);
            if *report {
                let opts = ErgodicityOptions {
                    tol: tol.clone(),
                    floor: floor.clone(),
                    window: *window,
                };
                let rep = ergodicity_report(&h, *level, *horizon, &opts)?;
                let mut text = String::new();
                for (n, d) in rep.horizons.iter().zip(&rep.diameters) {
                    writeln!(text, "N = {n:>3}  diameter {}", approx(d)).unwrap();
                }
                writeln!(text, "verdict: {}", rep.verdict.as_str()).unwrap();
                return Ok(Output {
                    text,
                    json: to_json(&rep),
                });
            }
            let hull = frequency_hull(&h, *level, *horizon)?;
            let mut text = String::new();
            for c in &hull.intervals {
                writeln!(
                    text,
                    "{:<6} [{}, {}]",
                    c.label,
                    approx(&c.lo),
                    approx(&c.hi)
                )
                .unwrap();
            }
            writeln!(text, "diameter {}", approx(&hull.diameter)).unwrap();
            Ok(Output {
                text,
                json: to_json(&hull),
            })
        }
        Command::Patchfreq {
            rule,
            patch,
            level,
            horizon,
        } => {
            let r = rule_of(rule, depth)?;
            let p = patch_of(&r, patch)?;
            let est = patch_frequency_estimate(&Hierarchy::new(&r), &p, *level, *horizon, budget)?;
            let text = format!(
                "[{}, {}]\nboundary slack {}\n",
                approx(&est.lo),
                approx(&est.hi),
                approx(&est.boundary_slack)
            );
            Ok(Output {
                text,
                json: to_json(&est),
            })
        }
        Command::Admissible { rule, patch, level } => {
            let r = rule_of(rule, depth)?;
            let p = patch_of(&r, patch)?;
            let res = is_admissible(&r, &p, *level, budget)?;
            let text = match &res.witness {
                Some(w) => format!(
                    "found in level {} supertile {} at ({}, {})\n",
                    w.level, w.label, w.position.0, w.position.1
                ),
                None => format!("not found up to level {}\n", res.searched_to),
            };
            Ok(Output {
                text,
                json: to_json(&res),
            })
        }
        Command::Render {
            rule,
            supertile,
            level,
            out,
            cell_size,
        } => {
            let r = rule_of(rule, depth)?;
            let h = Hierarchy::new(&r);
            let p = Expander::new(&h, budget).expand_label(*level, supertile)?;
            let svg = |p: &CellPatch| render_svg(p, *cell_size);
            let txt = |p: &CellPatch| render_text(p) + "\n";
            match out.as_str() {
                "svg" | "txt" => {
                    let content = if out == "svg" { svg(&p) } else { txt(&p) };
                    Ok(Output {
                        json: json!({ "format": out, "content": content }),
                        text: content,
                    })
                }
                path => {
                    let format = if path.ends_with(".svg") { "svg" } else { "txt" };
                    let content = if format == "svg" { svg(&p) } else { txt(&p) };
                    std::fs::write(path, &content).map_err(|e| {
                        Failure::Domain(vec![Diagnostic::error("io", format!("{path}: {e}"))])
                    })?;
                    Ok(Output {
                        text: format!("wrote {path}\n"),
                        json: json!({ "format": format, "path": path, "bytes": content.len() }),
                    })
                }
            }
        }
        Command::Examples { show } => match show {
            Some(name) => match builtins::find(name) {
                Some(ex) => Ok(Output {
                    text: ex.source.to_string(),
                    json: json!({ "name": ex.name, "source": ex.source }),
                }),
                None => Err(Failure::Domain(vec![Diagnostic::error(
                    "unknown_rule",
                    format!("no bundled example named {name}"),
                )])),
            },
            None => {
                let mut text = String::new();
                for ex in builtins::EXAMPLES {
                    writeln!(text, "{:<12} {}", ex.name, ex.description).unwrap();
                }
                let list: Vec<Value> = builtins::EXAMPLES
                    .iter()
                    .map(|ex| json!({ "name": ex.name, "description": ex.description }))
                    .collect();
                Ok(Output {
                    text,
                    json: Value::Array(list),
                })
            }
        },
    }
}
