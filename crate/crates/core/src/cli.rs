//! Command-line front end.
//!
//! Every command writes one JSON document (or a DOT graph for
//! `shuffles --dot`) followed by a newline. Output depends only on the
//! arguments and standard input. Exit status is 0 on success, 1 on invalid
//! input or an unmet hypothesis, and 2 when a certified statement fails.

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::ffi::OsString;
use std::io::{Read, Write};
use std::path::PathBuf;

use crate::enumerate::{by_degree, defect_degree_bound};
use crate::error::{Error, Result};
use crate::fsimp::FSimplex;
use crate::griddiag::{boundary_image, build_e_alpha, GridDiagram};
use crate::presentation::{build_t, match_psi, order_phi, present, skeletal_dimension};
use crate::shufflehorn::{attach_diagram, enumerate_shuffles, horn_certificate, shuffle_poset_dot};
use crate::subset::FSubset;
use crate::SetConvention;

#[derive(Debug, Parser)]
#[command(name = "confpres", version, about = "Finite presentations of truncated configuration categories")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Count the empty set as a finite set.
    #[arg(long, global = true)]
    pub allow_empty: bool,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Write to this file instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Dot,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Strings of defect at most α, grouped by degree.
    FEnumerate {
        #[arg(long)]
        alpha: usize,
        /// Largest degree listed; defaults to the degree every such string fits under.
        #[arg(long)]
        degree_bound: Option<usize>,
    },
    /// Defect and canonical form of a string read from standard input.
    Defect,
    /// The subset E^α of strings with defect at most α.
    EAlpha {
        #[arg(long)]
        alpha: usize,
    },
    /// The (r, s)-shuffles in a linear extension of their poset.
    Shuffles {
        #[arg(long)]
        r: usize,
        #[arg(long)]
        s: usize,
        /// Emit the Hasse diagram as Graphviz DOT.
        #[arg(long)]
        dot: bool,
    },
    /// Horn certificates for every (r, s)-shuffle.
    Horns {
        #[arg(long)]
        r: usize,
        #[arg(long)]
        s: usize,
    },
    /// Attach a grid diagram read from standard input to a saturated subset.
    Attach,
    /// The certified presentation skeleton at bound α.
    Present {
        #[arg(long)]
        alpha: usize,
    },
    /// The matching ψ on strings of defect above α and its order.
    TMatch {
        #[arg(long)]
        alpha: usize,
        #[arg(long, default_value_t = 5)]
        degree_bound: usize,
    },
    /// Largest degree of a nondegenerate string in E^α.
    SkeletonDim {
        #[arg(long)]
        alpha: usize,
    },
}

/// Input of `attach`: a grid and, optionally, the strings generating `C`.
///
/// Without `subset`, `C` is the saturated closure of the image of the grid's
/// boundary.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct AttachInput {
    grid: GridDiagram,
    #[serde(default)]
    subset: Option<Vec<FSimplex>>,
}

fn parse_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        Error::InvalidInput(format!("at `{path}`: {}", e.inner()))
    })
}

fn positive(name: &str, value: usize) -> Result<usize> {
    if value == 0 {
        return Err(Error::InvalidInput(format!("--{name} must be at least 1")));
    }
    Ok(value)
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut out = serde_json::to_string_pretty(value).expect("report serializes");
    out.push('\n');
    out
}

fn subset_json(c: &FSubset) -> Value {
    json!({
        "size": c.len(),
        "by_degree": c.counts_by_degree(),
        "simplices": c.iter().map(|z| z.to_string()).collect::<Vec<_>>(),
    })
}

/// Runs one command and returns its serialized report.
pub fn execute(cli: &Cli, stdin: &mut dyn Read) -> Result<String> {
    let conv = if cli.allow_empty { SetConvention::AllowEmpty } else { SetConvention::NonEmpty };
    let dot_requested = cli.format == Format::Dot;
    if dot_requested && !matches!(cli.command, Command::Shuffles { .. }) {
        return Err(Error::InvalidInput("DOT output is only available for `shuffles`".into()));
    }
    let mut read_input = || -> Result<String> {
        let mut text = String::new();
        stdin
            .read_to_string(&mut text)
            .map_err(|e| Error::InvalidInput(format!("cannot read standard input: {e}")))?;
        Ok(text)
    };

    let report = match &cli.command {
        Command::FEnumerate { alpha, degree_bound } => {
            let alpha = positive("alpha", *alpha)?;
            let bound = degree_bound.unwrap_or_else(|| defect_degree_bound(alpha));
            let levels = by_degree(conv, alpha, bound, |z| z.defect() <= alpha);
            let degrees: Vec<Value> = levels
                .iter()
                .enumerate()
                .map(|(n, zs)| {
                    json!({
                        "degree": n,
                        "count": zs.len(),
                        "strings": zs.iter().map(|z| json!({"string": z.to_string(), "defect": z.defect()})).collect::<Vec<_>>(),
                    })
                })
                .collect();
            to_json(&json!({ "alpha": alpha, "degree_bound": bound, "degrees": degrees }))
        }
        Command::Defect => {
            let z: FSimplex = parse_json(&read_input()?)?;
            let canonical = z.canonicalize();
            let (core, kept) = z.core();
            to_json(&json!({
                "string": z.to_string(),
                "degree": z.degree(),
                "cards": z.cards(),
                "defect": z.defect(),
                "nondegenerate": z.is_nondegenerate(),
                "canonical": canonical,
                "core": core,
                "core_vertices": kept,
            }))
        }
        Command::EAlpha { alpha } => {
            let alpha = positive("alpha", *alpha)?;
            let e = build_e_alpha(alpha, conv)?;
            let mut out = subset_json(&e);
            out["alpha"] = json!(alpha);
            to_json(&out)
        }
        Command::Shuffles { r, s, dot } => {
            if *dot || dot_requested {
                shuffle_poset_dot(*r, *s)
            } else {
                let all = enumerate_shuffles(*r, *s);
                to_json(&json!({ "r": r, "s": s, "count": all.len(), "shuffles": all }))
            }
        }
        Command::Horns { r, s } => {
            let certs = enumerate_shuffles(*r, *s)
                .iter()
                .map(horn_certificate)
                .collect::<Result<Vec<_>>>()?;
            to_json(&json!({ "r": r, "s": s, "certificates": certs }))
        }
        Command::Attach => {
            let input: AttachInput = parse_json(&read_input()?)?;
            let c = match &input.subset {
                Some(gens) => FSubset::generated_by(gens),
                None => boundary_image(&input.grid).saturated_closure(),
            };
            let (out, cert) = attach_diagram(&c, &input.grid)?;
            to_json(&json!({
                "before": c.len(),
                "after": out.len(),
                "certificate": cert,
                "result": subset_json(&out),
            }))
        }
        Command::Present { alpha } => to_json(&present(positive("alpha", *alpha)?, conv)?),
        Command::TMatch { alpha, degree_bound } => {
            let alpha = positive("alpha", *alpha)?;
            let t = build_t(alpha, *degree_bound, conv)?;
            let matching = match_psi(&t, alpha, *degree_bound)?;
            let (order, audit) = order_phi(&t, alpha)?;
            to_json(&json!({
                "matching": matching,
                "audit": audit,
                "order": order.iter().map(|p| json!({"z": p.z.to_string(), "r": p.r, "s": p.s})).collect::<Vec<_>>(),
            }))
        }
        Command::SkeletonDim { alpha } => {
            let alpha = positive("alpha", *alpha)?;
            to_json(&json!({ "alpha": alpha, "skeletal_dimension": skeletal_dimension(alpha, conv)? }))
        }
    };
    Ok(report)
}

/// Exit status for an error: 2 for a failed certificate, 1 otherwise.
pub fn exit_code(e: &Error) -> i32 {
    if e.is_invariant_failure() {
        2
    } else {
        1
    }
}

/// Parses `args`, runs the command and writes the report. Returns the exit
/// status.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let report = match execute(&cli, stdin) {
        Ok(report) => report,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return exit_code(&e);
        }
    };
    let written = match &cli.output {
        Some(path) => std::fs::write(path, &report),
        None => stdout.write_all(report.as_bytes()),
    };
    match written {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: cannot write output: {e}");
            1
        }
    }
}
