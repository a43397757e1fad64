use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use autoforma::experiment::{self, Experiment, ExperimentConfig, Outcome};
use autoforma::forms::gaussian_seed;
use autoforma::{Error, FormKind};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(
    name = "autoforma",
    version,
    about = "Verify mixed automorphic forms for affine equivariant maps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    /// Experiment configuration (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Directory for report files.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Series truncation tolerance, overriding the config.
    #[arg(long)]
    tol: Option<f64>,
    /// Probe RNG seed, overriding the config.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Seed,
    Landau,
    Mixed,
}

#[derive(Subcommand)]
enum Command {
    /// Check equivariance of tau and the integrality condition.
    Validate(Common),
    /// Compute the effective weight B and its constancy.
    Weight(Common),
    /// Solve for the gauge phase and check it.
    Phi(Common),
    /// Build the character table and check the pseudo-character law.
    Character(Common),
    /// Construct the Landau and mixed forms.
    Build(Common),
    /// Run every stage and write report.json.
    Verify(Common),
    /// Evaluate a form on the fundamental-cell grid as CSV.
    Sample {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "mixed")]
        kind: Kind,
    },
}

const EXIT_IO: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_INTEGRALITY: u8 = 3;
const EXIT_NUMERICAL: u8 = 4;
const EXIT_RESIDUAL: u8 = 5;

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Io(_) => EXIT_IO,
        Error::IntegralityViolated { .. } => EXIT_INTEGRALITY,
        Error::NumericallyVanishing { .. }
        | Error::QuadratureUnconverged { .. }
        | Error::SeriesTruncation { .. } => EXIT_NUMERICAL,
        Error::ResidualExceeded { .. } => EXIT_RESIDUAL,
        _ => EXIT_INPUT,
    }
}

fn write_file(dir: &Path, name: &str, contents: &str) -> autoforma::Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join(name), contents)?;
    Ok(())
}

/// Writes to stdout; a closed pipe (e.g. `| head`) is not an error.
fn emit(text: &str) -> autoforma::Result<()> {
    match std::io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

struct Output {
    dir: Option<PathBuf>,
}

impl Output {
    /// Prints `value` and, with `--out`, writes it as `name`.
    fn json(&self, name: &str, value: &Value) -> autoforma::Result<()> {
        let text = serde_json::to_string_pretty(value).expect("json") + "\n";
        if let Some(dir) = &self.dir {
            write_file(dir, name, &text)?;
        }
        emit(&text)
    }

    fn csv(&self, name: &str, text: &str) -> autoforma::Result<()> {
        match &self.dir {
            Some(dir) => write_file(dir, name, text),
            None => emit(text),
        }
    }

    fn timings(&self, ex: &Experiment) -> autoforma::Result<()> {
        if let Some(dir) = &self.dir {
            let text = serde_json::to_string_pretty(ex.timings()).expect("json") + "\n";
            write_file(dir, "timings.json", &text)?;
        }
        Ok(())
    }
}

fn outcome_code(outcome: Outcome) -> u8 {
    match outcome {
        Outcome::Ok => 0,
        Outcome::IntegralityViolated => EXIT_INTEGRALITY,
        Outcome::NumericalFailure => EXIT_NUMERICAL,
        Outcome::ResidualOverTolerance => EXIT_RESIDUAL,
    }
}

fn within(values: &[(f64, f64)]) -> bool {
    values.iter().all(|&(v, limit)| v.is_finite() && v <= limit)
}

fn setup(common: &Common) -> autoforma::Result<(Experiment, Output)> {
    let config: ExperimentConfig =
        experiment::load_config(&common.config)?.with_overrides(common.tol, common.seed)?;
    Ok((
        Experiment::new(config)?,
        Output {
            dir: common.out.clone(),
        },
    ))
}

fn run(cli: Cli) -> autoforma::Result<u8> {
    use experiment::limits;
    match cli.command {
        Command::Validate(common) => {
            let (mut ex, out) = setup(&common)?;
            let stage = ex.equivariance()?;
            out.json("validate.json", &json!(stage))?;
            out.timings(&ex)?;
            if stage.translation_residual > limits::EQUIVARIANCE {
                return Ok(EXIT_RESIDUAL);
            }
            Ok(if stage.integrality.ok {
                0
            } else {
                EXIT_INTEGRALITY
            })
        }
        Command::Weight(common) => {
            let (mut ex, out) = setup(&common)?;
            let report = ex.weight()?;
            out.json("weight.json", &json!(report))?;
            out.timings(&ex)?;
            Ok(if within(&[(report.constancy, limits::WEIGHT_CONSTANCY)]) {
                0
            } else {
                EXIT_RESIDUAL
            })
        }
        Command::Phi(common) => {
            let (mut ex, out) = setup(&common)?;
            let stage = ex.phi_stage()?;
            out.json("phi.json", &json!(stage))?;
            if let Some(dir) = &out.dir {
                write_file(dir, "phi_grid.csv", &experiment::phi_grid_csv(&ex))?;
            }
            out.timings(&ex)?;
            let ok = within(&[
                (stage.closed_vs_quadrature, limits::PHI_AGREEMENT),
                (stage.path_independence, limits::PATH_INDEPENDENCE),
                (stage.pde_residual, limits::PDE),
                (stage.psi_reduction_residual, limits::PSI_REDUCTION),
            ]);
            Ok(if ok { 0 } else { EXIT_RESIDUAL })
        }
        Command::Character(common) => {
            let (mut ex, out) = setup(&common)?;
            let integrality = ex.equivariance()?.integrality;
            let stage = ex.character_stage();
            out.json(
                "character.json",
                &json!({ "integrality": integrality, "character": stage }),
            )?;
            out.timings(&ex)?;
            if !integrality.ok {
                return Ok(EXIT_INTEGRALITY);
            }
            let ok = within(&[
                (stage.chi_hat_spread, limits::CHI_HAT_SPREAD),
                (stage.chi_hat_anchor_mismatch, limits::CHI_HAT_ANCHOR),
                (stage.pseudo_character_residual, limits::PSEUDO_CHARACTER),
            ]);
            Ok(if ok { 0 } else { EXIT_RESIDUAL })
        }
        Command::Build(common) => {
            let (mut ex, out) = setup(&common)?;
            let (landau, mixed) = ex.build_forms()?;
            let stage = ex.forms_stage(&landau, &mixed);
            out.json("build.json", &json!(stage))?;
            out.timings(&ex)?;
            let limit = limits::FORM_RESIDUAL.max(10.0 * ex.config.series.tol);
            let ok = within(&[
                (stage.landau_residual, limit),
                (stage.mixed_residual, limit),
            ]) && stage.nontriviality >= limits::NONTRIVIALITY;
            Ok(if ok { 0 } else { EXIT_RESIDUAL })
        }
        Command::Verify(common) => {
            let (mut ex, out) = setup(&common)?;
            let report = ex.verify()?;
            out.json("report.json", &json!(report))?;
            out.timings(&ex)?;
            Ok(outcome_code(report.outcome()))
        }
        Command::Sample { common, kind } => {
            let (mut ex, out) = setup(&common)?;
            let form = match kind {
                Kind::Seed => gaussian_seed(ex.weights.b, autoforma::complex::ZERO)?,
                Kind::Landau | Kind::Mixed => {
                    let (landau, mixed) = ex.build_forms()?;
                    if matches!(kind, Kind::Landau) {
                        landau
                    } else {
                        mixed
                    }
                }
            };
            let name = match form.kind {
                FormKind::Seed => "sample_seed.csv",
                FormKind::Landau => "sample_landau.csv",
                FormKind::Mixed => "sample_mixed.csv",
            };
            out.csv(
                name,
                &experiment::sample_csv(&form, &ex.config.lattice, ex.config.grid),
            )?;
            out.timings(&ex)?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}
