//! `lapratio` subcommands. Exit status: 0 on success, 1 when a computation
//! fails, 2 for usage or input-parsing errors.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use lapratio_core::auction::{auction_identify, k_analytic_exponential, k_monte_carlo, k_quadrature};
use lapratio_core::identify::verify_identity;
use lapratio_core::transform::{
    laplace_piecewise, laplace_poly, ratio_eval_piecewise, ratio_rational, residual_q,
};
use lapratio_core::{
    identify, ratio_expansion, AuctionModel, DistSpec, McConfig, PiecewisePoly, Poly, RatioSpec,
};
use serde_json::json;

use crate::formats::{
    identify_result_to_value, parse_function, parse_model, parse_ratio_expansion,
    ratio_expansion_to_value, render, Builtin, FunctionSpec,
};
use crate::parallel::{map_grid, simulate_bids_parallel};
use crate::selftest;
use crate::tables::{prettify, read_samples, write_rows, write_samples};

#[derive(Parser, Debug)]
#[command(name = "lapratio", version, about = "Laplace transform ratios and identification of functions from them")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Laplace transform of a function: series in 1/λ, or values on a λ grid
    Transform(FunctionArgs),
    /// H_{n,m}(f, λ): expansion at infinity, or values on a λ grid
    Ratio(FunctionArgs),
    /// Recover Taylor coefficients at 0 from a ratio expansion file
    Identify(IdentifyArgs),
    /// Check whether two functions share H_{n,m}
    Verify(VerifyArgs),
    /// K(F, λ) for an auction model by quadrature
    AuctionK(AuctionKArgs),
    /// Simulate the two highest bids; optionally estimate K
    AuctionSim(AuctionSimArgs),
    /// Recover the germ of F from an expansion of H_{N-1,N}(F, ·)
    AuctionIdentify(AuctionIdentifyArgs),
    /// Run the built-in acceptance suite
    Selftest(OutputArgs),
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    /// Write the primary output here instead of standard output
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Indented JSON and aligned tables instead of compact output
    #[arg(long)]
    pub pretty: bool,
}

#[derive(Args, Debug, Clone)]
pub struct LambdaArgs {
    /// Evaluation point (repeatable)
    #[arg(long = "lambda", value_name = "λ")]
    pub lambda: Vec<f64>,
    /// Log-spaced grid start:stop:count
    #[arg(long = "lambda-grid", value_name = "START:STOP:COUNT")]
    pub lambda_grid: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BuiltinName {
    Sin,
    #[value(name = "step_example")]
    StepExample,
}

#[derive(Args, Debug, Clone)]
pub struct FunctionArgs {
    /// Function description (JSON)
    #[arg(long, conflicts_with = "builtin")]
    pub input: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub builtin: Option<BuiltinName>,
    /// Step count of the built-in step example
    #[arg(long, default_value_t = 10)]
    pub n_max: u32,
    #[arg(long, default_value_t = 2)]
    pub n: u32,
    #[arg(long, default_value_t = 1)]
    pub m: u32,
    /// Truncation order of the series in 1/λ
    #[arg(long, default_value_t = 8)]
    pub order: usize,
    #[command(flatten)]
    pub lambdas: LambdaArgs,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Args, Debug, Clone)]
pub struct IdentifyArgs {
    /// Ratio expansion (JSON)
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub n: u32,
    #[arg(long)]
    pub m: u32,
    #[arg(long)]
    pub target_degree: usize,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Args, Debug, Clone)]
pub struct VerifyArgs {
    /// The two function descriptions f and g
    #[arg(long, num_args = 1, required = true)]
    pub input: Vec<PathBuf>,
    #[arg(long)]
    pub n: u32,
    #[arg(long)]
    pub m: u32,
    /// Largest |Q(t)| accepted for piecewise inputs
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Args, Debug, Clone)]
pub struct AuctionKArgs {
    /// Auction model (JSON)
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[command(flatten)]
    pub lambdas: LambdaArgs,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Args, Debug, Clone)]
pub struct AuctionSimArgs {
    #[arg(long, required_unless_present = "input")]
    pub model: Option<PathBuf>,
    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Rows per random stream
    #[arg(long, default_value_t = 65_536)]
    pub chunk: u64,
    /// Estimate K at these points instead of printing the samples
    #[command(flatten)]
    pub lambdas: LambdaArgs,
    /// Read samples from a "top,second" CSV instead of simulating
    #[arg(long, conflicts_with = "model")]
    pub input: Option<PathBuf>,
    /// Also write the samples as CSV to this file
    #[arg(long)]
    pub samples_out: Option<PathBuf>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Args, Debug, Clone)]
pub struct AuctionIdentifyArgs {
    /// Expansion of H_{N-1,N}(F, ·) (JSON)
    #[arg(long)]
    pub input: PathBuf,
    /// Number of bidders N
    #[arg(long)]
    pub bidders: u32,
    #[arg(long)]
    pub target_degree: usize,
    #[command(flatten)]
    pub out: OutputArgs,
}

/// Failure classes that map to distinct exit codes.
#[derive(Debug)]
pub enum Failure {
    Usage(anyhow::Error),
    Compute(anyhow::Error),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Compute(_) => 1,
        }
    }
}

type Outcome<T = ()> = Result<T, Failure>;

fn usage<E: Into<anyhow::Error>>(e: E) -> Failure {
    Failure::Usage(e.into())
}

fn compute<E: Into<anyhow::Error>>(e: E) -> Failure {
    Failure::Compute(e.into())
}

pub fn main() -> ExitCode {
    let config = match RunConfig::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(&config) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            let (Failure::Usage(e) | Failure::Compute(e)) = &failure;
            eprintln!("error: {e:#}");
            ExitCode::from(failure.exit_code())
        }
    }
}

pub fn run(config: &RunConfig) -> Outcome {
    match &config.command {
        Command::Transform(a) => transform(a),
        Command::Ratio(a) => ratio(a),
        Command::Identify(a) => identify_cmd(a),
        Command::Verify(a) => verify(a),
        Command::AuctionK(a) => auction_k(a),
        Command::AuctionSim(a) => auction_sim(a),
        Command::AuctionIdentify(a) => auction_identify_cmd(a),
        Command::Selftest(out) => selftest_cmd(out),
    }
}

fn read_file(path: &Path) -> Outcome<String> {
    fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))
        .map_err(usage)
}

fn emit(out: &OutputArgs, text: &str) -> Outcome {
    match &out.output {
        Some(path) => fs::write(path, text)
            .with_context(|| format!("cannot write {}", path.display()))
            .map_err(compute),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .context("cannot write to standard output")
            .map_err(compute),
    }
}

fn emit_json(out: &OutputArgs, value: &serde_json::Value) -> Outcome {
    emit(out, &render(value, out.pretty))
}

fn emit_table(
    out: &OutputArgs,
    header: &[&str],
    rows: impl IntoIterator<Item = Vec<Option<f64>>>,
) -> Outcome {
    let mut buf = Vec::new();
    write_rows(&mut buf, header, rows).map_err(compute)?;
    let text = String::from_utf8(buf).expect("CSV output is UTF-8");
    emit(out, &if out.pretty { prettify(&text) } else { text })
}

/// `start:stop:count`, log-spaced and inclusive of both ends.
pub fn parse_lambda_grid(text: &str) -> anyhow::Result<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    let [start, stop, count] = parts[..] else {
        bail!("lambda grid \"{text}\" is not START:STOP:COUNT");
    };
    let start: f64 = start.parse().with_context(|| format!("bad grid start \"{start}\""))?;
    let stop: f64 = stop.parse().with_context(|| format!("bad grid stop \"{stop}\""))?;
    let count: usize = count.parse().with_context(|| format!("bad grid count \"{count}\""))?;
    if !(start > 0.0 && stop > 0.0 && start.is_finite() && stop.is_finite()) {
        bail!("lambda grid end points must be positive");
    }
    if count == 0 {
        bail!("lambda grid needs at least one point");
    }
    if count == 1 {
        return Ok(vec![start]);
    }
    let (a, b) = (start.ln(), stop.ln());
    Ok((0..count)
        .map(|i| match i {
            0 => start,
            i if i == count - 1 => stop,
            i => (a + (b - a) * i as f64 / (count - 1) as f64).exp(),
        })
        .collect())
}

fn lambdas(args: &LambdaArgs) -> Outcome<Vec<f64>> {
    let mut out = args.lambda.clone();
    if let Some(grid) = &args.lambda_grid {
        out.extend(parse_lambda_grid(grid).map_err(usage)?);
    }
    if let Some(bad) = out.iter().find(|l| !(**l > 0.0 && l.is_finite())) {
        return Err(usage(anyhow!("lambda must be positive, got {bad}")));
    }
    Ok(out)
}

fn exponents(n: u32, m: u32) -> Outcome<RatioSpec> {
    RatioSpec::new(n, m).map_err(usage)
}

/// The function named by `--input` or `--builtin`. For `sin`, `degree` is
/// the Maclaurin degree to use.
fn load_function(args: &FunctionArgs, sin_degree: usize) -> Outcome<FunctionSpec> {
    let spec = match (&args.input, args.builtin) {
        (Some(path), None) => parse_function(&read_file(path)?)
            .with_context(|| format!("in {}", path.display()))
            .map_err(usage)?,
        (None, Some(BuiltinName::Sin)) => FunctionSpec::Builtin(Builtin::Sin { order: sin_degree }),
        (None, Some(BuiltinName::StepExample)) => {
            FunctionSpec::Builtin(Builtin::StepExample { n_max: args.n_max })
        }
        _ => return Err(usage(anyhow!("give exactly one of --input or --builtin"))),
    };
    Ok(spec.resolve())
}

fn transform(args: &FunctionArgs) -> Outcome {
    let f = load_function(args, args.order)?;
    let grid = lambdas(&args.lambdas)?;
    match (&f, grid.is_empty()) {
        (FunctionSpec::Poly(p), true) => {
            let series = laplace_poly(p, args.order);
            emit_json(
                &args.out,
                &json!({"u_coeffs": series.coeffs().iter().map(ToString::to_string).collect::<Vec<_>>()}),
            )
        }
        (_, true) => Err(usage(anyhow!(
            "piecewise transforms are numeric; pass --lambda or --lambda-grid"
        ))),
        (f, false) => {
            let pp = as_piecewise(f);
            let values = map_grid(&grid, |l| laplace_piecewise(&pp, l)).map_err(compute)?;
            emit_table(
                &args.out,
                &["lambda", "L"],
                grid.iter().zip(values).map(|(l, v)| vec![Some(*l), Some(v)]),
            )
        }
    }
}

fn as_piecewise(f: &FunctionSpec) -> PiecewisePoly {
    match f {
        FunctionSpec::Poly(p) => PiecewisePoly::from_poly(p.clone()),
        FunctionSpec::Piecewise(pp) => pp.clone(),
        FunctionSpec::Builtin(b) => as_piecewise(&b.resolve()),
    }
}

fn ratio(args: &FunctionArgs) -> Outcome {
    let spec = exponents(args.n, args.m)?;
    // sin vanishes to first order, so one extra degree keeps every tail
    // coefficient through `order` exact.
    let f = load_function(args, args.order + 1)?;
    let grid = lambdas(&args.lambdas)?;
    match (&f, grid.is_empty()) {
        (FunctionSpec::Poly(p), true) => {
            let h = ratio_expansion(p, spec.n(), spec.m(), args.order).map_err(compute)?;
            emit_json(&args.out, &ratio_expansion_to_value(&h))
        }
        (_, true) => Err(usage(anyhow!(
            "piecewise ratios are numeric; pass --lambda or --lambda-grid"
        ))),
        (FunctionSpec::Poly(p), false) => {
            let r = ratio_rational(p, spec.n(), spec.m()).map_err(compute)?;
            emit_table(
                &args.out,
                &["lambda", "H"],
                grid.iter().map(|&l| vec![Some(l), Some(r.eval_f64(l))]),
            )
        }
        (f, false) => {
            let pp = as_piecewise(f);
            let values = map_grid(&grid, |l| ratio_eval_piecewise(&pp, spec.n(), spec.m(), l))
                .map_err(compute)?;
            emit_table(
                &args.out,
                &["lambda", "H"],
                grid.iter().zip(values).map(|(l, v)| vec![Some(*l), Some(v)]),
            )
        }
    }
}

fn load_expansion(path: &Path) -> Outcome<lapratio_core::RatioExpansion> {
    parse_ratio_expansion(&read_file(path)?)
        .with_context(|| format!("in {}", path.display()))
        .map_err(usage)
}

fn identify_cmd(args: &IdentifyArgs) -> Outcome {
    let spec = exponents(args.n, args.m)?;
    let h = load_expansion(&args.input)?;
    let r = identify(&h, spec, args.target_degree).map_err(compute)?;
    emit_json(&args.out, &identify_result_to_value(&r))
}

fn verify(args: &VerifyArgs) -> Outcome {
    let spec = exponents(args.n, args.m)?;
    let [f, g] = &args.input[..] else {
        return Err(usage(anyhow!("verify takes exactly two --input files")));
    };
    let load = |path: &PathBuf| -> Outcome<FunctionSpec> {
        Ok(parse_function(&read_file(path)?)
            .with_context(|| format!("in {}", path.display()))
            .map_err(usage)?
            .resolve())
    };
    let (f, g) = (load(f)?, load(g)?);
    let doc = match (&f, &g) {
        (FunctionSpec::Poly(f), FunctionSpec::Poly(g)) => {
            json!({"identical": verify_polys(f, g, spec)?, "method": "exact"})
        }
        _ => {
            let (f, g) = (as_piecewise(&f), as_piecewise(&g));
            let worst = residual_grid(&f, &g)
                .into_iter()
                .map(|t| residual_q(&f, &g, spec.n(), spec.m(), t).abs())
                .fold(0.0, f64::max);
            json!({"identical": worst <= args.tol, "method": "residual", "max_residual": worst})
        }
    };
    emit_json(&args.out, &doc)
}

fn verify_polys(f: &Poly, g: &Poly, spec: RatioSpec) -> Outcome<bool> {
    if f.is_zero() || g.is_zero() {
        return Err(compute(lapratio_core::Error::ZeroFunction));
    }
    Ok(verify_identity(f, g, spec))
}

/// Evaluation points for the residual: every breakpoint sum plus a uniform
/// grid reaching past the last one.
fn residual_grid(f: &PiecewisePoly, g: &PiecewisePoly) -> Vec<f64> {
    let cuts = |pp: &PiecewisePoly| -> Vec<f64> {
        pp.breakpoints().iter().map(lapratio_core::algebra::to_f64).collect()
    };
    let (a, b) = (cuts(f), cuts(g));
    let reach = 2.0 * (a.last().copied().unwrap_or(0.0) + b.last().copied().unwrap_or(0.0)) + 1.0;
    let mut ts: Vec<f64> = (1..=200).map(|i| reach * f64::from(i) / 200.0).collect();
    for x in &a {
        for y in &b {
            ts.push(x + y);
        }
    }
    ts.retain(|t| *t > 0.0);
    ts
}

fn load_model(path: &Path) -> Outcome<AuctionModel> {
    parse_model(&read_file(path)?)
        .with_context(|| format!("in {}", path.display()))
        .map_err(usage)
}

fn auction_k(args: &AuctionKArgs) -> Outcome {
    let model = load_model(&args.model)?;
    let grid = lambdas(&args.lambdas)?;
    if grid.is_empty() {
        return Err(usage(anyhow!("pass --lambda or --lambda-grid")));
    }
    if args.tol.is_nan() || args.tol <= 0.0 {
        return Err(usage(anyhow!("--tol must be positive")));
    }
    let values = map_grid(&grid, |l| k_quadrature(&model, l, args.tol)).map_err(compute)?;
    let closed = |l: f64| match model.idiosyncratic {
        DistSpec::Exponential { theta } => k_analytic_exponential(theta, l).ok(),
        _ => None,
    };
    emit_table(
        &args.out,
        &["lambda", "k_quadrature", "k_closed_form"],
        grid.iter()
            .zip(values)
            .map(|(&l, k)| vec![Some(l), Some(k), closed(l)]),
    )
}

fn auction_sim(args: &AuctionSimArgs) -> Outcome {
    let samples = match &args.input {
        Some(path) => read_samples(read_file(path)?.as_bytes())
            .with_context(|| format!("in {}", path.display()))
            .map_err(usage)?,
        None => {
            let path = args.model.as_deref().expect("clap requires --model here");
            let model = load_model(path)?;
            let cfg = McConfig::new(args.samples, args.seed, args.chunk).map_err(usage)?;
            simulate_bids_parallel(&model, &cfg)
        }
    };
    if let Some(path) = &args.samples_out {
        let file = fs::File::create(path)
            .with_context(|| format!("cannot create {}", path.display()))
            .map_err(compute)?;
        write_samples(std::io::BufWriter::new(file), &samples).map_err(compute)?;
    }
    let grid = lambdas(&args.lambdas)?;
    if grid.is_empty() {
        let mut buf = Vec::new();
        write_samples(&mut buf, &samples).map_err(compute)?;
        let text = String::from_utf8(buf).expect("CSV output is UTF-8");
        return emit(&args.out, &if args.out.pretty { prettify(&text) } else { text });
    }
    let rows = grid
        .iter()
        .map(|&l| {
            let (k, se) = k_monte_carlo(&samples, l)?;
            Ok(vec![Some(l), Some(k), Some(se)])
        })
        .collect::<lapratio_core::Result<Vec<_>>>()
        .map_err(compute)?;
    emit_table(&args.out, &["lambda", "k_monte_carlo", "stderr"], rows)
}

fn auction_identify_cmd(args: &AuctionIdentifyArgs) -> Outcome {
    if args.bidders < 2 {
        return Err(usage(lapratio_core::Error::InvalidBidderCount(args.bidders)));
    }
    let h = load_expansion(&args.input)?;
    let r = auction_identify(&h, args.bidders, args.target_degree).map_err(compute)?;
    emit_json(&args.out, &identify_result_to_value(&r))
}

fn selftest_cmd(out: &OutputArgs) -> Outcome {
    let mut text = String::new();
    let mut failed = 0;
    for criterion in &selftest::CRITERIA {
        let report = criterion.run();
        failed += usize::from(!report.passed);
        let line = format!("{report}\n");
        if out.output.is_some() {
            // Progress on the terminal while the file collects the report.
            eprint!("{line}");
        }
        text.push_str(&line);
        if out.output.is_none() {
            print!("{line}");
        }
    }
    if let Some(path) = &out.output {
        fs::write(path, &text)
            .with_context(|| format!("cannot write {}", path.display()))
            .map_err(compute)?;
    }
    if failed > 0 {
        return Err(compute(anyhow!("{failed} acceptance criteria failed")));
    }
    Ok(())
}
