//! Command-line front end: generate family instances, run the simplex engine
//! on them, sweep the parameter region and verify EXPAND trajectories.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage error.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use simplex_cycling::engine::{
    classify_escape, iteration_log_csv, run, RatioRule, RunReport,
};
use simplex_cycling::family::{
    cycling_predicate_dantzig, cycling_predicate_expand, first_negative_g, FamilyParams,
};
use simplex_cycling::model::{export_mps, parse_instance_text, write_instance_text};
use simplex_cycling::pricing::PricingRule;
use simplex_cycling::ratio::ExpandState;
use simplex_cycling::sweep::{
    disagreements, emit_region_csv, emit_region_svg, region_sweep, GridSpec, MuRule, RangeSpec,
};
use simplex_cycling::{Rational, Scalar};

#[derive(Parser)]
#[command(
    name = "simplex-cycling",
    version,
    about = "Build and analyze the smallest linear programs on which the simplex method cycles"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Construct a family instance and write it as instance text and/or MPS.
    Generate(GenerateArgs),
    /// Run the simplex engine on an instance file and report the outcome.
    Run(RunArgs),
    /// Map the (a11, a12) region: predicates vs simulation, CSV/SVG output.
    Sweep(SweepArgs),
    /// Check an EXPAND run against the closed-form trajectory.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct FamilyArgs {
    /// First diagonal entry of the 2x2 block (e.g. 0.4).
    #[arg(long, allow_hyphen_values = true)]
    a11: String,
    /// Off-diagonal entry (e.g. 0.2); must be nonzero.
    #[arg(long, allow_hyphen_values = true)]
    a12: String,
    /// Objective parameter; fractions like -2.15/2.3 stay exact.
    #[arg(long, allow_hyphen_values = true)]
    mu: String,
    /// Objective row multiplier.
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    scale: String,
}

impl FamilyArgs {
    fn params<S: Scalar>(&self) -> Result<FamilyParams<S>> {
        let parse = |name: &str, text: &str| {
            S::parse_number(text).with_context(|| format!("--{name} {text}"))
        };
        Ok(FamilyParams::new(
            parse("a11", &self.a11)?,
            parse("a12", &self.a12)?,
            parse("mu", &self.mu)?,
            parse("scale", &self.scale)?,
        )?)
    }
}

#[derive(Args)]
struct GenerateArgs {
    #[command(flatten)]
    family: FamilyArgs,
    /// Extra pattern-preserving constraint "a,b" for steepest-edge examples.
    #[arg(long, value_name = "A,B", allow_hyphen_values = true)]
    steepest_edge_row: Option<String>,
    /// Right-hand side of the extra constraint.
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    rhs: String,
    /// Instance name recorded in the file header.
    #[arg(long, default_value = "generated")]
    name: String,
    /// Output path for the instance text.
    #[arg(short, long)]
    output: PathBuf,
    /// Also export fixed-format MPS here.
    #[arg(long)]
    mps: Option<PathBuf>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum PricingArg {
    Dantzig,
    Steepest,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum RatioArg {
    Standard,
    Expand,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum ArithArg {
    Exact,
    Float,
}

#[derive(Args)]
struct RunArgs {
    /// Instance text file to solve.
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, value_enum, default_value_t = PricingArg::Dantzig)]
    pricing: PricingArg,
    #[arg(long, value_enum, default_value_t = RatioArg::Standard)]
    ratio: RatioArg,
    #[arg(long, value_enum, default_value_t = ArithArg::Exact)]
    arith: ArithArg,
    #[arg(long, default_value_t = 10_000)]
    max_iters: usize,
    #[command(flatten)]
    expand: ExpandArgs,
    /// Write the per-iteration CSV log here.
    #[arg(long)]
    log: Option<PathBuf>,
}

#[derive(Args)]
struct ExpandArgs {
    /// EXPAND tolerance increment per iteration.
    #[arg(long, default_value = "5/100000000000", allow_hyphen_values = true)]
    tau: String,
    /// EXPAND initial tolerance multiplier.
    #[arg(long, default_value = "10000", allow_hyphen_values = true)]
    u0: String,
    /// Reset the tolerance schedule every this many iterations (0 = never).
    #[arg(long, default_value_t = 10_000)]
    reset: usize,
}

impl ExpandArgs {
    fn state<S: Scalar>(&self) -> Result<ExpandState<S>> {
        let tau = S::parse_number(&self.tau).with_context(|| format!("--tau {}", self.tau))?;
        let u0 = S::parse_number(&self.u0).with_context(|| format!("--u0 {}", self.u0))?;
        Ok(ExpandState::new(tau, u0, self.reset))
    }
}

#[derive(Args)]
struct SweepArgs {
    /// a11 range as lo:hi:steps, cells centred inside.
    #[arg(long, value_name = "LO:HI:N", allow_hyphen_values = true)]
    a11: String,
    /// a12 range as lo:hi:steps.
    #[arg(long, value_name = "LO:HI:N", allow_hyphen_values = true)]
    a12: String,
    /// Per-cell mu rule: "mid" or "fixed:VALUE".
    #[arg(long, default_value = "mid", allow_hyphen_values = true)]
    mu: String,
    #[arg(long, default_value_t = 600)]
    max_iters: usize,
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    family: FamilyArgs,
    /// EXPAND iterations to verify.
    #[arg(long, default_value_t = 100)]
    iters: usize,
    /// EXPAND tolerance increment.
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    tau: String,
    /// EXPAND initial tolerance multiplier.
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    u0: String,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(args) => generate(args),
        Command::Run(args) => run_command(args),
        Command::Sweep(args) => sweep_command(args),
        Command::Verify(args) => verify_command(args),
    };
    match result {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn generate(args: GenerateArgs) -> Result<ExitCode> {
    let params: FamilyParams<Rational> = args.family.params()?;
    let instance = match &args.steepest_edge_row {
        None => params.instance(args.name.clone()),
        Some(text) => {
            let row = parse_pair(text)?;
            let rhs = Rational::parse_number(&args.rhs)
                .with_context(|| format!("--rhs {}", args.rhs))?;
            params.augmented_instance(args.name.clone(), &row, rhs)
        }
    };
    fs::write(&args.output, write_instance_text(&instance))
        .with_context(|| format!("writing {}", args.output.display()))?;
    println!("wrote {}", args.output.display());
    if let Some(mps_path) = &args.mps {
        fs::write(mps_path, export_mps(&instance))
            .with_context(|| format!("writing {}", mps_path.display()))?;
        println!("wrote {}", mps_path.display());
    }
    println!(
        "cycling predicates: dantzig={} expand={}",
        cycling_predicate_dantzig(&params),
        cycling_predicate_expand(&params)
    );
    Ok(ExitCode::SUCCESS)
}

fn parse_pair(text: &str) -> Result<[Rational; 2]> {
    let (a, b) = text
        .split_once(',')
        .ok_or_else(|| anyhow!("expected two comma-separated values, got {text:?}"))?;
    Ok([
        Rational::parse_number(a.trim()).with_context(|| format!("row entry {a:?}"))?,
        Rational::parse_number(b.trim()).with_context(|| format!("row entry {b:?}"))?,
    ])
}

fn run_command(args: RunArgs) -> Result<ExitCode> {
    let text = fs::read_to_string(&args.instance)
        .with_context(|| format!("reading {}", args.instance.display()))?;
    match args.arith {
        ArithArg::Exact => run_backend::<Rational>(&text, &args),
        ArithArg::Float => run_backend::<f64>(&text, &args),
    }
}

fn run_backend<S: Scalar>(text: &str, args: &RunArgs) -> Result<ExitCode> {
    let instance = parse_instance_text::<S>(text)?;
    let pricing = match args.pricing {
        PricingArg::Dantzig => PricingRule::Dantzig,
        PricingArg::Steepest => PricingRule::SteepestEdge,
    };
    let ratio = match args.ratio {
        RatioArg::Standard => RatioRule::Standard,
        RatioArg::Expand => RatioRule::Expand(args.expand.state()?),
    };
    let report: RunReport<S> = run(&instance, pricing, ratio, args.max_iters)?;
    if let Some(path) = &args.log {
        fs::write(path, iteration_log_csv(&report))
            .with_context(|| format!("writing {}", path.display()))?;
        println!("wrote {}", path.display());
    }
    println!("{}", report.outcome);
    Ok(ExitCode::SUCCESS)
}

fn sweep_command(args: SweepArgs) -> Result<ExitCode> {
    let mut spec = GridSpec::new(
        parse_range(&args.a11).with_context(|| format!("--a11 {}", args.a11))?,
        parse_range(&args.a12).with_context(|| format!("--a12 {}", args.a12))?,
        parse_mu_rule(&args.mu)?,
    );
    spec.max_iters = args.max_iters;
    let grid = region_sweep(&spec);
    if let Some(path) = &args.csv {
        fs::write(path, emit_region_csv(&grid))
            .with_context(|| format!("writing {}", path.display()))?;
        println!("wrote {}", path.display());
    }
    if let Some(path) = &args.svg {
        fs::write(path, emit_region_svg(&grid))
            .with_context(|| format!("writing {}", path.display()))?;
        println!("wrote {}", path.display());
    }
    let cycling_both = grid
        .cells
        .iter()
        .filter(|c| c.sim_dantzig.is_cycling() && c.sim_expand.is_cycling())
        .count();
    let cycling_dantzig = grid.cells.iter().filter(|c| c.sim_dantzig.is_cycling()).count();
    let boundary = grid.cells.iter().filter(|c| c.boundary).count();
    println!(
        "cells={} dantzig_cycling={} both_cycling={} boundary={}",
        grid.cells.len(),
        cycling_dantzig,
        cycling_both,
        boundary
    );
    let bad = disagreements(&grid);
    if bad.is_empty() {
        println!("predicates and simulation agree on every non-boundary cell");
        Ok(ExitCode::SUCCESS)
    } else {
        for cell in &bad {
            println!(
                "DISAGREEMENT a11={} a12={} predicted=({}, {}) simulated=({}, {})",
                cell.a11,
                cell.a12,
                cell.predicted_dantzig,
                cell.predicted_expand,
                cell.sim_dantzig.label(),
                cell.sim_expand.label()
            );
        }
        Ok(ExitCode::FAILURE)
    }
}

fn parse_range(text: &str) -> Result<RangeSpec> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        bail!("expected lo:hi:steps, got {text:?}");
    }
    let lo = Rational::parse_number(parts[0])?;
    let hi = Rational::parse_number(parts[1])?;
    let steps: usize = parts[2].parse().context("steps must be a count")?;
    if hi <= lo {
        bail!("range {text:?} is empty");
    }
    Ok(RangeSpec::new(lo, hi, steps))
}

fn parse_mu_rule(text: &str) -> Result<MuRule> {
    if text == "mid" {
        return Ok(MuRule::Midpoint);
    }
    if let Some(value) = text.strip_prefix("fixed:") {
        return Ok(MuRule::Fixed(Rational::parse_number(value)?));
    }
    bail!("--mu must be \"mid\" or \"fixed:VALUE\", got {text:?}")
}

fn verify_command(args: VerifyArgs) -> Result<ExitCode> {
    let params: FamilyParams<Rational> = args.family.params()?;
    let tau = Rational::parse_number(&args.tau).with_context(|| format!("--tau {}", args.tau))?;
    let u0 = Rational::parse_number(&args.u0).with_context(|| format!("--u0 {}", args.u0))?;
    let state = ExpandState::new(tau.clone(), u0.clone(), 0);
    let report = run(
        &params.instance("verify"),
        PricingRule::Dantzig,
        RatioRule::Expand(state),
        args.iters,
    )?;
    let mismatches = simplex_cycling::engine::verify_trajectory(&report, &params, &tau);
    if mismatches.is_empty() {
        println!(
            "PASS trajectory matches the closed forms for {} iterations ({})",
            report.records.len(),
            report.outcome
        );
        return Ok(ExitCode::SUCCESS);
    }
    let first = &mismatches[0];
    println!(
        "FAIL first mismatch at iteration {} variable x{}: expected {} got {}",
        first.iteration,
        first.variable + 1,
        first.expected,
        first.actual
    );
    if let Some(escape) = classify_escape(&report) {
        let khat = first_negative_g(&params, &u0, 10 * args.iters + 10)?;
        match escape.unbounded_at {
            Some(at) => println!(
                "pattern broke at even iteration {} (first negative G at k={:?}), unbounded at {}",
                escape.broke_at, khat, at
            ),
            None => println!(
                "pattern broke at even iteration {} (first negative G at k={:?})",
                escape.broke_at, khat
            ),
        }
    }
    println!("outcome: {}", report.outcome);
    Ok(ExitCode::FAILURE)
}
