//! Command-line front end: list the solution catalog, build fields from
//! recipe files, sweep fields with residual oracles, and run solver
//! refinement studies.
//!
//! Exit codes: 0 success (verification passed), 1 verification failed,
//! 2 usage or malformed config/recipe, 3 degenerate run (every sample
//! skipped, or structurally empty input).

mod recipe;
mod solve;

use std::collections::BTreeMap;
use std::path::PathBuf;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use fastdiff_core::verify::{
    fast_diffusion_residual, liouville_residual, reduced_residual, weighted_residual,
};
use fastdiff_core::{catalog, Domain, EquationTag, Error, Field, ResidualReport, SampleSpec};

use recipe::{BuiltEquation, Recipe};
use solve::SolveConfig;

/// Exact solutions of plane logarithmic diffusion and Liouville-type
/// equations: construction, verification, and solver validation.
#[derive(Parser)]
#[command(name = "fastdiff", version)]
struct Cli {
    /// Sampling seed for verification sweeps.
    #[arg(long, global = true, env = "FASTDIFF_SEED", default_value_t = 0)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Inspect the built-in solution catalog.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
    /// Build a field from a recipe file and print it with its provenance.
    Construct {
        /// Recipe JSON file.
        #[arg(long)]
        recipe: PathBuf,
        /// Also write the construct report to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sweep a field with the residual oracle for its equation.
    Verify(VerifyArgs),
    /// Run a refinement study from a config file.
    Solve {
        /// Study config JSON file.
        #[arg(long)]
        config: PathBuf,
        /// Directory for solution.csv and convergence.json.
        #[arg(long)]
        out_dir: PathBuf,
    },
}

#[derive(Subcommand)]
enum CatalogAction {
    /// Print catalog entries as a JSON array.
    List {
        /// Keep only entries with this equation tag.
        #[arg(long)]
        tag: Option<String>,
    },
}

#[derive(Args)]
struct VerifyArgs {
    /// Catalog entry to verify.
    #[arg(long, conflicts_with = "recipe", required_unless_present = "recipe")]
    id: Option<String>,
    /// Recipe file to construct and verify; needs a `domain` entry.
    #[arg(long)]
    recipe: Option<PathBuf>,
    /// Number of sample points.
    #[arg(long, default_value_t = 500)]
    samples: usize,
    /// Pass threshold on the relative residual.
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    /// Add a constant to the field first (negative control).
    #[arg(long)]
    perturb: Option<f64>,
}

/// One catalog entry in listing form. Fields are plain strings and
/// numbers so the output is stable and diffable.
#[derive(Serialize)]
struct CatalogRow {
    id: String,
    equation: &'static str,
    params: BTreeMap<String, f64>,
    provenance: String,
    signature: Vec<String>,
    singular_set: String,
    default_domain: Vec<(String, f64, f64)>,
    field: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    weight: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    source: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    lambda: Option<f64>,
}

impl CatalogRow {
    fn from_entry(entry: &catalog::SolutionEntry) -> CatalogRow {
        let (weight, source, lambda) = match &entry.tag {
            EquationTag::Weighted { weight } => (Some(weight.to_string()), None, None),
            EquationTag::Liouville { lambda } => (None, None, Some(*lambda)),
            EquationTag::LiouvilleInhomogeneous { lambda, source } => {
                (None, Some(source.to_string()), Some(*lambda))
            }
            _ => (None, None, None),
        };
        CatalogRow {
            id: entry.id.clone(),
            equation: entry.tag.name(),
            params: entry.params.clone(),
            provenance: entry.provenance.clone(),
            signature: entry.field.signature().to_vec(),
            singular_set: entry.field.singular().description().into(),
            default_domain: entry.default_domain.bounds().to_vec(),
            field: entry.field.value().to_string(),
            weight,
            source,
            lambda,
        }
    }
}

/// Verification outcome printed by `verify`: the oracle report plus the
/// threshold it was judged against.
#[derive(Serialize)]
struct Verdict {
    pass: bool,
    tol: f64,
    report: ResidualReport,
}

/// Prints one line to stdout, treating a closed pipe as success so
/// `fastdiff ... | head` ends quietly.
fn emit(text: &str) -> std::io::Result<()> {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    let done = writeln!(out, "{text}").and_then(|()| out.flush());
    match done {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        other => other,
    }
}

fn scalar_oracle(
    tag: &EquationTag,
    field: &Field,
    spec: &SampleSpec,
) -> Result<ResidualReport, Error> {
    match tag {
        EquationTag::Fast2d => fast_diffusion_residual(field, spec),
        EquationTag::Fast1d => reduced_residual(field, spec),
        EquationTag::Weighted { weight } => weighted_residual(field, weight, spec),
        EquationTag::Liouville { lambda } => liouville_residual(field, *lambda, None, spec),
        EquationTag::LiouvilleInhomogeneous { lambda, source } => {
            liouville_residual(field, *lambda, Some(source), spec)
        }
        EquationTag::System22 { .. } => Err(Error::Usage(
            "coupled-system entries take three fields; use the library oracle".into(),
        )),
    }
}

fn cmd_catalog_list(tag: Option<&str>) -> anyhow::Result<u8> {
    let rows: Vec<CatalogRow> = catalog::standard_catalog()
        .iter()
        .filter(|e| tag.is_none_or(|t| e.tag.name() == t))
        .map(CatalogRow::from_entry)
        .collect();
    emit(&serde_json::to_string_pretty(&rows)?)?;
    Ok(0)
}

fn read_json<T: serde::de::DeserializeOwned>(path: &PathBuf) -> anyhow::Result<T> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    let value = serde_json::from_str(&text)
        .with_context(|| format!("parsing {}", path.display()))?;
    Ok(value)
}

fn cmd_construct(path: &PathBuf, out: Option<&PathBuf>) -> anyhow::Result<u8> {
    let parsed: Recipe = read_json(path)?;
    let built = recipe::build(&parsed)?;
    let json = serde_json::to_string_pretty(&built.report)?;
    if let Some(out) = out {
        std::fs::write(out, &json).with_context(|| format!("writing {}", out.display()))?;
    }
    emit(&json)?;
    Ok(0)
}

fn cmd_verify(args: &VerifyArgs, seed: u64) -> anyhow::Result<u8> {
    let (field, equation, domain): (Field, EquationTag, Domain) = match (&args.id, &args.recipe)
    {
        (Some(id), None) => {
            let entry = catalog::find(id)
                .ok_or_else(|| Error::Config(format!("unknown catalog id `{id}`")))?;
            (entry.field, entry.tag, entry.default_domain)
        }
        (None, Some(path)) => {
            let parsed: Recipe = read_json(path)?;
            let built = recipe::build(&parsed)?;
            let domain = built.domain.ok_or_else(|| {
                Error::Config("verifying a recipe needs a `domain` entry".into())
            })?;
            let tag = match built.equation {
                BuiltEquation::Plane => EquationTag::Fast2d,
                BuiltEquation::Weighted(weight) => EquationTag::Weighted { weight },
                BuiltEquation::Liouville(lambda) => EquationTag::Liouville { lambda },
            };
            (built.field, tag, domain)
        }
        _ => unreachable!("clap enforces exactly one of --id/--recipe"),
    };

    let field = match args.perturb {
        Some(eps) => field.perturbed(eps),
        None => field,
    };
    let spec = SampleSpec::new(domain, args.samples, seed)?;
    let report = scalar_oracle(&equation, &field, &spec)?;
    let verdict = Verdict {
        pass: report.max_rel < args.tol,
        tol: args.tol,
        report,
    };
    emit(&serde_json::to_string_pretty(&verdict)?)?;
    Ok(if verdict.pass { 0 } else { 1 })
}

fn cmd_solve(config: &PathBuf, out_dir: &PathBuf) -> anyhow::Result<u8> {
    let parsed: SolveConfig = read_json(config)?;
    let report = solve::run(&parsed, out_dir)?;
    emit(&serde_json::to_string_pretty(&report)?)?;
    Ok(0)
}

fn run(cli: &Cli) -> anyhow::Result<u8> {
    match &cli.command {
        Command::Catalog {
            action: CatalogAction::List { tag },
        } => cmd_catalog_list(tag.as_deref()),
        Command::Construct { recipe, out } => cmd_construct(recipe, out.as_ref()),
        Command::Verify(args) => cmd_verify(args, cli.seed),
        Command::Solve { config, out_dir } => cmd_solve(config, out_dir),
    }
}

/// Maps failures to the exit-code contract: empty or degenerate runs are
/// 3, everything else that errors is a usage/config problem, 2.
fn classify(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(Error::EmptyReport { .. }) | Some(Error::Degenerate(_)) => 3,
        _ => 2,
    }
}

fn main() {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => std::process::exit(code.into()),
        Err(err) => {
            eprintln!("error: {err:#}");
            std::process::exit(classify(&err).into());
        }
    }
}
