use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use renyi_core::analysis::suite::{run_suite, Suite, SuiteOptions, SuiteOutcome};
use renyi_core::analysis::{alpha_monotonicity_violations, linspace, sweep, CurveSpec, SweepSpec, ZAxis};
use renyi_core::divergences::{DensityOperator, Family, ReferenceOperator};
use renyi_core::testkit::{example1_pair, PINNED_BASE_SEED};

mod error;
mod format;
mod input;

use error::{CliError, Result, EXIT_FAILED};
use input::{MatrixFile, Role};

#[derive(Parser)]
#[command(name = "renyi", version, about = "Alpha-z Renyi divergences of finite-dimensional quantum states")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one divergence.
    Compute(ComputeArgs),
    /// Evaluate on an (alpha, z) grid and write CSV.
    Sweep(SweepArgs),
    /// Run the numerical verification suite.
    Verify(VerifyArgs),
    /// Write the matrix described by a spec as a matrix file.
    Dump(DumpArgs),
}

/// Where the state pair comes from.
#[derive(Args)]
struct PairArgs {
    /// Matrix file, state spec file or inline state spec JSON for rho.
    #[arg(long, required_unless_present = "example1", conflicts_with = "example1")]
    rho: Option<String>,
    /// Matrix file, state spec file or inline state spec JSON for sigma.
    #[arg(long, required_unless_present = "example1", conflicts_with = "example1")]
    sigma: Option<String>,
    /// The qubit pair rho = |+><+|, sigma = diag(p, 1-p), given as p=P.
    #[arg(long, value_name = "p=P")]
    example1: Option<String>,
}

impl PairArgs {
    fn load(&self) -> Result<(DensityOperator, ReferenceOperator)> {
        match (&self.example1, &self.rho, &self.sigma) {
            (Some(p), _, _) => {
                let eps = input::cutoff()?;
                let (rho, sigma) = example1_pair(input::example1_p(p)?)?;
                Ok((
                    DensityOperator::with_cutoff(rho.op().clone(), eps)?,
                    ReferenceOperator::with_cutoff(sigma.op().clone(), eps)?,
                ))
            }
            (None, Some(rho), Some(sigma)) => input::load_pair(rho, sigma),
            _ => Err(CliError::Input("need --rho and --sigma, or --example1".into())),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Petz,
    Sandwiched,
    Mo,
    Alphaz,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::Petz => Family::Petz,
            FamilyArg::Sandwiched => Family::Sandwiched,
            FamilyArg::Mo => Family::MosonyiOgawa,
            FamilyArg::Alphaz => Family::AlphaZ,
        }
    }
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct ComputeArgs {
    #[command(flatten)]
    pair: PairArgs,
    #[arg(long)]
    alpha: f64,
    /// Required for the alphaz family, ignored otherwise.
    #[arg(long)]
    z: Option<f64>,
    #[arg(long, value_enum, default_value = "alphaz")]
    family: FamilyArg,
    /// Report bits instead of nats.
    #[arg(long)]
    bits: bool,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    pair: PairArgs,
    /// lo:hi:n
    #[arg(long, allow_hyphen_values = true)]
    alpha_grid: String,
    /// lo:hi:n, or curve:NAME with NAME one of petz, sandwiched, exp,
    /// const:Z, affine:A:B
    #[arg(long, allow_hyphen_values = true)]
    z_grid: String,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value = "all", value_parser = parse_suite)]
    suite: Suite,
    /// Number of seeded random pairs.
    #[arg(long, default_value_t = SuiteOptions::default().seeds)]
    seeds: usize,
    #[arg(long, default_value_t = PINNED_BASE_SEED, hide = true)]
    base_seed: u64,
    /// Print the machine-readable JSON summary instead of the table.
    #[arg(long)]
    json: bool,
    /// Add a constant to every residual; used to check that failures are reported.
    #[arg(long, hide = true, num_args = 0..=1, default_missing_value = "1")]
    inject_perturbation: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum RoleArg {
    Rho,
    Sigma,
}

#[derive(Args)]
struct DumpArgs {
    /// Matrix file, state spec file or inline state spec JSON.
    #[arg(long)]
    spec: String,
    /// Member to take from pair specs.
    #[arg(long, value_enum, default_value = "rho")]
    role: RoleArg,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_suite(s: &str) -> std::result::Result<Suite, String> {
    s.parse().map_err(|_| format!("expected one of {}", Suite::NAMES.join(", ")))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Compute(a) => compute(&a),
        Command::Sweep(a) => run_sweep(&a),
        Command::Verify(a) => verify(&a),
        Command::Dump(a) => dump(&a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn compute(a: &ComputeArgs) -> Result<ExitCode> {
    let family = Family::from(a.family);
    let z = match (family, a.z) {
        (Family::AlphaZ, None) => return Err(CliError::Input("--z is required for the alphaz family".into())),
        (_, z) => z.unwrap_or(1.0),
    };
    let (rho, sigma) = a.pair.load()?;
    let mut v = family.evaluate(&rho, &sigma, a.alpha, z)?;
    if a.bits {
        v = v.to_bits();
    }
    println!("{}", format::divergence(v));
    Ok(ExitCode::SUCCESS)
}

fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let bad = || CliError::Input(format!("grid {s:?} is not lo:hi:n"));
    let parts: Vec<&str> = s.split(':').collect();
    let [lo, hi, n] = parts.as_slice() else { return Err(bad()) };
    let lo: f64 = lo.parse().map_err(|_| bad())?;
    let hi: f64 = hi.parse().map_err(|_| bad())?;
    let n: usize = n.parse().map_err(|_| bad())?;
    Ok(linspace(lo, hi, n)?)
}

fn parse_z_axis(s: &str) -> Result<ZAxis> {
    match s.strip_prefix("curve:") {
        Some(name) => Ok(ZAxis::Curve(name.parse::<CurveSpec>()?)),
        None => Ok(ZAxis::Values(parse_grid(s)?)),
    }
}

fn write_output(out: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, bytes).map_err(|source| CliError::Io { path: path.into(), source }),
        None => std::io::stdout().write_all(bytes).map_err(|source| CliError::Io { path: "<stdout>".into(), source }),
    }
}

fn run_sweep(a: &SweepArgs) -> Result<ExitCode> {
    let spec = SweepSpec::new(parse_grid(&a.alpha_grid)?, parse_z_axis(&a.z_grid)?)?;
    let (rho, sigma) = a.pair.load()?;
    let rows = sweep(&rho, &sigma, &spec)?;
    let mut buf = Vec::new();
    format::write_csv(&mut buf, &rows).expect("writing to memory");
    write_output(a.out.as_deref(), &buf)?;
    // Monotonicity in alpha is only conjectured for general z, so it is reported, not enforced.
    let drops = alpha_monotonicity_violations(&rows);
    if drops > 0 {
        eprintln!("note: divergence decreases with alpha at {drops} grid step(s)");
    }
    Ok(ExitCode::SUCCESS)
}

fn print_table(outcome: &SuiteOutcome) {
    println!("{:<16} {:>7} {:>7} {:>12}  status", "group", "checks", "failed", "worst ratio");
    for g in &outcome.groups {
        let status = if g.failed == 0 { "PASS" } else { "FAIL" };
        println!("{:<16} {:>7} {:>7} {:>12.3e}  {status}", g.group.as_str(), g.checks, g.failed, g.worst_ratio);
    }
    let total: usize = outcome.groups.iter().map(|g| g.checks).sum();
    let verdict = if outcome.passed { "PASS" } else { "FAIL" };
    println!("suite {}: {verdict} ({total} checks, {} seeds)", outcome.suite, outcome.options.seeds);
}

fn verify(a: &VerifyArgs) -> Result<ExitCode> {
    let opts =
        SuiteOptions { seeds: a.seeds, base_seed: a.base_seed, perturbation: a.inject_perturbation.unwrap_or(0.0) };
    let outcome = run_suite(a.suite, &opts)?;
    if a.json {
        let text = serde_json::to_string_pretty(&outcome)
            .map_err(|source| CliError::Json { what: "suite summary".into(), source })?;
        println!("{text}");
    } else {
        print_table(&outcome);
    }
    match outcome.first_failure() {
        None => Ok(ExitCode::SUCCESS),
        Some(r) => {
            let line = format!(
                "first failure: {} / {} / {}: residual {} > tolerance {}",
                r.group.as_str(),
                r.subject,
                r.check.name,
                format::number(r.check.residual),
                format::number(r.check.tolerance)
            );
            if a.json {
                eprintln!("{line}");
            } else {
                println!("{line}");
            }
            Ok(ExitCode::from(EXIT_FAILED))
        }
    }
}

fn dump(a: &DumpArgs) -> Result<ExitCode> {
    let role = match a.role {
        RoleArg::Rho => Role::Rho,
        RoleArg::Sigma => Role::Sigma,
    };
    let op = input::resolve(&a.spec, role)?;
    let mut text = serde_json::to_string(&MatrixFile::from_matrix(op.matrix()))
        .map_err(|source| CliError::Json { what: "matrix file".into(), source })?;
    text.push('\n');
    write_output(a.out.as_deref(), text.as_bytes())?;
    Ok(ExitCode::SUCCESS)
}
