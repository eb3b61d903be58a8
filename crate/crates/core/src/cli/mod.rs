//! `stackpmf` command-line interface.
//!
//! Every subcommand writes its artifacts to `--out` together with a
//! `<command>.manifest.json` that records the arguments, the resolved
//! configuration and the seed; `stackpmf replay --manifest FILE` re-runs it.
//!
//! Exit codes: 0 success, 2 usage error, 3 data error, 4 numeric failure.

pub mod io;
pub mod svg;

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::band::{global_band, ConfidenceBand};
use crate::error::Error;
use crate::estimators::{estimate, stacked, EstimatorKind, FrequencyData, StackDiagnostics};
use crate::models::ModelSpec;
use crate::numeric::{sample_variance, Norm};
use crate::sim::{self, ExperimentConfig, ExperimentResult};

use self::io::{fmt_f64, read_counts, Csv, OutputDir, RunManifest};

/// Failure classes, each with its own exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error("{0}")]
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Data(_) => 3,
            CliError::Numeric(_) => 4,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::UnknownModel(_) | Error::Config(_) | Error::ParameterDomain(_) => CliError::Usage(msg),
            Error::Numeric(_) => CliError::Numeric(msg),
            Error::EmptyInput
            | Error::InsufficientSample { .. }
            | Error::InvalidData(_)
            | Error::InvalidPmf(_)
            | Error::Parse { .. } => CliError::Data(msg),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Data(format!("i/o error: {e}"))
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "stackpmf", version, about = "Stacked shape-constrained p.m.f. estimation")]
#[command(args_override_self = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Master seed for all random streams.
    #[arg(long, global = true, env = "STACKPMF_SEED", default_value_t = 1)]
    pub seed: u64,

    /// Worker threads for Monte-Carlo loops (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    pub workers: usize,

    /// Output directory [default: stackpmf-out].
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Data format; `estimate` defaults to json, everything else to csv.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Also write minimal SVG charts.
    #[arg(long, global = true)]
    pub svg: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit one estimator to a file of counts.
    Estimate(EstimateArgs),
    /// Monte-Carlo losses, scaled risk or band coverage.
    Simulate(SimulateArgs),
    /// Global confidence band around an estimate.
    Band(BandArgs),
    /// Normalized coordinate samples for QQ plots.
    Qq(QqArgs),
    /// Worst-case timings of the mixture weight and band quantile.
    Bench(BenchArgs),
    /// Re-run the command recorded in a manifest.
    Replay(ReplayArgs),
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    /// Whitespace-separated counts x_0 x_1 ...
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value = "sG")]
    pub kind: EstimatorKind,
    /// Also compute a global band at this level.
    #[arg(long)]
    pub band: Option<f64>,
    /// Monte-Carlo draws for the band quantile.
    #[arg(long, default_value_t = 100_000)]
    pub mc: usize,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub model: ModelSpec,
    /// Single sample size.
    #[arg(long, conflicts_with = "ngrid")]
    pub n: Option<u64>,
    /// Comma-separated sample sizes.
    #[arg(long, value_delimiter = ',')]
    pub ngrid: Vec<u64>,
    #[arg(long, default_value_t = 100)]
    pub reps: usize,
    #[arg(long, value_delimiter = ',', default_value = "e,mm,r,G,sr,sG")]
    pub est: Vec<EstimatorKind>,
    #[arg(long, value_delimiter = ',', default_value = "1,2", value_parser = parse_norm)]
    pub norm: Vec<Norm>,
    /// Scaled-risk curve over the sample sizes.
    #[arg(long, conflicts_with = "coverage")]
    pub risk: bool,
    /// Band coverage over the sample sizes.
    #[arg(long)]
    pub coverage: bool,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// Monte-Carlo draws per band quantile.
    #[arg(long, default_value_t = 100_000)]
    pub band_mc: usize,
}

#[derive(Debug, Args)]
pub struct BandArgs {
    /// Counts file; the band is centered at the chosen estimator.
    #[arg(long, required_unless_present = "from_estimate", conflicts_with = "from_estimate")]
    pub input: Option<PathBuf>,
    /// JSON written by `estimate`; its estimate is used as theta.
    #[arg(long)]
    pub from_estimate: Option<PathBuf>,
    #[arg(long, default_value = "sG")]
    pub kind: EstimatorKind,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long, default_value_t = 100_000)]
    pub mc: usize,
}

#[derive(Debug, Args)]
pub struct QqArgs {
    #[arg(long)]
    pub model: ModelSpec,
    #[arg(long, default_value_t = 1)]
    pub coord: usize,
    #[arg(long, default_value_t = 1000)]
    pub n: u64,
    #[arg(long, default_value_t = 1000)]
    pub reps: usize,
    #[arg(long, value_delimiter = ',', default_value = "e,G,r,sG,sr")]
    pub est: Vec<EstimatorKind>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, value_delimiter = ',', default_value = "500,1000,3000,5000")]
    pub sgrid: Vec<usize>,
    #[arg(long, default_value_t = 10)]
    pub runs: usize,
    /// Monte-Carlo draws for the quantile timing.
    #[arg(long, default_value_t = 100_000)]
    pub mc: usize,
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    #[arg(long)]
    pub manifest: PathBuf,
}

fn parse_norm(s: &str) -> std::result::Result<Norm, String> {
    Norm::parse(s).ok_or_else(|| format!("unknown norm `{s}` (1, 2, inf)"))
}

/// Contents of `estimate.json`; `band --from-estimate` reads it back.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub kind: EstimatorKind,
    pub n: u64,
    pub counts: Vec<u64>,
    pub estimate: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta_hat: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a_n: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b_n: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagnostics: Option<StackDiagnostics>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub band: Option<ConfidenceBand>,
}

struct Ctx<'a> {
    seed: u64,
    workers: usize,
    format: Option<Format>,
    svg: bool,
    out: OutputDir,
    args: &'a [String],
}

impl Ctx<'_> {
    fn finish(self, command: &str, config: serde_json::Value) -> CliResult<()> {
        let paths = self.out.finish(command, self.args, config, self.seed)?;
        for p in paths {
            println!("{}", p.display());
        }
        Ok(())
    }
}

/// Entry point for the binary; returns the process exit code.
pub fn main() -> i32 {
    let args: Vec<String> = std::env::args().skip(1).collect();
    match run(&args) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Runs the CLI on `args` (without the program name).
pub fn run(args: &[String]) -> CliResult<()> {
    let argv = std::iter::once("stackpmf".to_string()).chain(args.iter().cloned());
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return Ok(());
            }
            let msg = e.render().to_string();
            let msg = msg.trim_end().trim_start_matches("error: ");
            return Err(CliError::Usage(msg.to_string()));
        }
    };
    if let Command::Replay(r) = &cli.command {
        return replay(&r.manifest, cli.out.as_deref());
    }
    let out_dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("stackpmf-out"));
    let ctx = Ctx {
        seed: cli.seed,
        workers: cli.workers,
        format: cli.format,
        svg: cli.svg,
        out: OutputDir::create(&out_dir)?,
        args,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.workers)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot build worker pool: {e}")))?;
    pool.install(|| match cli.command {
        Command::Estimate(a) => cmd_estimate(ctx, a),
        Command::Simulate(a) => cmd_simulate(ctx, a),
        Command::Band(a) => cmd_band(ctx, a),
        Command::Qq(a) => cmd_qq(ctx, a),
        Command::Bench(a) => cmd_bench(ctx, a),
        Command::Replay(_) => unreachable!(),
    })
}

fn replay(manifest: &Path, out: Option<&Path>) -> CliResult<()> {
    let text = fs::read_to_string(manifest)?;
    let m: RunManifest =
        serde_json::from_str(&text).map_err(|e| CliError::Data(format!("bad manifest: {e}")))?;
    if m.command == "replay" {
        return Err(CliError::Usage("cannot replay a replay".into()));
    }
    let mut args = m.args.clone();
    args.extend(["--seed".to_string(), m.seed.to_string()]);
    if let Some(dir) = out {
        args.extend(["--out".to_string(), dir.display().to_string()]);
    }
    run(&args)
}

fn load_counts(path: &Path) -> CliResult<FrequencyData> {
    let (x, dropped) = read_counts(path)?;
    if dropped > 0 {
        eprintln!("warning: dropped {dropped} trailing zero count(s)");
    }
    Ok(x)
}

fn cmd_estimate(mut ctx: Ctx, a: EstimateArgs) -> CliResult<()> {
    let x = load_counts(&a.input)?;
    let mut report = EstimateReport {
        kind: a.kind,
        n: x.n(),
        counts: x.counts().to_vec(),
        estimate: Vec::new(),
        beta_hat: None,
        a_n: None,
        b_n: None,
        diagnostics: None,
        band: None,
    };
    if let Some(shape) = a.kind.stacked_shape() {
        let fit = stacked(&x, shape)?;
        if fit.diagnostics.single_observation {
            eprintln!("warning: n = 1, returning the empirical estimator");
        }
        report.estimate = fit.estimate.probs;
        report.beta_hat = Some(fit.beta_hat);
        report.a_n = Some(fit.a_n);
        report.b_n = Some(fit.b_n);
        report.diagnostics = Some(fit.diagnostics);
    } else {
        report.estimate = estimate(&x, a.kind)?.probs;
    }
    if let Some(alpha) = a.band {
        report.band = Some(global_band(&report.estimate, x.n(), alpha, a.mc, ctx.seed)?);
    }

    match ctx.format.unwrap_or(Format::Json) {
        Format::Json => {
            let json = serde_json::to_string_pretty(&report).expect("report serializes");
            ctx.out.write("estimate.json", &(json + "\n"))?;
        }
        Format::Csv => {
            let mut csv = Csv::new();
            csv.comment("kind", a.kind).comment("n", x.n());
            for (key, v) in [("beta_hat", report.beta_hat), ("a_n", report.a_n), ("b_n", report.b_n)] {
                if let Some(v) = v {
                    csv.comment(key, fmt_f64(v));
                }
            }
            if let Some(b) = &report.band {
                csv.comment("alpha", fmt_f64(b.alpha)).comment("q_hat", fmt_f64(b.q_hat));
                csv.row(["j", "estimate", "lower", "upper"]);
                for j in 0..report.estimate.len() {
                    csv.row([
                        j.to_string(),
                        fmt_f64(report.estimate[j]),
                        fmt_f64(b.lower[j]),
                        fmt_f64(b.upper[j]),
                    ]);
                }
            } else {
                csv.row(["j", "estimate"]);
                for (j, v) in report.estimate.iter().enumerate() {
                    csv.row([j.to_string(), fmt_f64(*v)]);
                }
            }
            ctx.out.write("estimate.csv", &csv.into_string())?;
        }
    }
    if ctx.svg {
        let mut series = vec![("estimate".to_string(), points(&report.estimate))];
        if let Some(b) = &report.band {
            series.push(("lower".into(), points(&b.lower)));
            series.push(("upper".into(), points(&b.upper)));
        }
        ctx.out.write("estimate.svg", &svg::line_chart("estimate", "j", "p", &series))?;
    }
    let config = json!({
        "input": a.input,
        "kind": a.kind,
        "band_alpha": a.band,
        "mc_reps": a.mc,
        "counts": report.counts,
    });
    ctx.finish("estimate", config)
}

fn points(v: &[f64]) -> Vec<(f64, f64)> {
    v.iter().enumerate().map(|(j, &p)| (j as f64, p)).collect()
}

fn experiment_config(ctx: &Ctx, model: ModelSpec, n_grid: Vec<u64>, reps: usize) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new(model, 1, reps);
    cfg.n_grid = n_grid;
    cfg.seed = ctx.seed;
    cfg.workers = ctx.workers;
    cfg
}

fn cmd_simulate(mut ctx: Ctx, a: SimulateArgs) -> CliResult<()> {
    let n_grid = match (a.n, a.ngrid.is_empty()) {
        (Some(n), _) => vec![n],
        (None, false) => a.ngrid.clone(),
        (None, true) => return Err(CliError::Usage("one of --n or --ngrid is required".into())),
    };
    let mut cfg = experiment_config(&ctx, a.model.clone(), n_grid, a.reps);
    cfg.estimators = a.est.clone();
    cfg.norms = a.norm.clone();
    cfg.alpha = a.alpha;
    cfg.band_mc_reps = a.band_mc;

    let (mode, result) = if a.risk {
        ("risk", sim::run_risk_curve(&cfg)?)
    } else if a.coverage {
        ("coverage", sim::run_coverage(&cfg)?)
    } else {
        ("loss", sim::run_loss_experiment(&cfg)?)
    };

    if ctx.format == Some(Format::Json) {
        let json = serde_json::to_string_pretty(&result).expect("result serializes");
        ctx.out.write("simulate.json", &(json + "\n"))?;
    } else {
        write_simulate_csv(&mut ctx, &cfg, mode, &result)?;
    }
    if ctx.svg {
        write_simulate_svg(&mut ctx, &cfg, mode, &result)?;
    }
    let config = json!({ "mode": mode, "experiment": cfg });
    ctx.finish("simulate", config)
}

fn write_simulate_csv(ctx: &mut Ctx, cfg: &ExperimentConfig, mode: &str, r: &ExperimentResult) -> CliResult<()> {
    let model = cfg.model.to_string();
    match mode {
        "loss" => {
            let mut csv = Csv::new();
            csv.comment("model", &model).comment("reps", cfg.reps);
            csv.row(["n", "rep", "estimator", "norm", "loss"]);
            for l in &r.losses {
                csv.row([
                    l.n.to_string(),
                    l.rep.to_string(),
                    l.estimator.label().into(),
                    l.norm.label().into(),
                    fmt_f64(l.loss),
                ]);
            }
            ctx.out.write("losses.csv", &csv.into_string())?;

            let mut csv = Csv::new();
            csv.comment("model", &model).comment("reps", cfg.reps);
            csv.row(["n", "estimator", "norm", "mean", "se"]);
            for s in &r.loss_summary {
                csv.row([
                    s.n.to_string(),
                    s.estimator.label().into(),
                    s.norm.label().into(),
                    fmt_f64(s.mean),
                    fmt_f64(s.se),
                ]);
            }
            ctx.out.write("loss_summary.csv", &csv.into_string())?;
        }
        "risk" => {
            let mut csv = Csv::new();
            csv.comment("model", &model).comment("reps", cfg.reps);
            csv.row(["n", "estimator", "risk", "se"]);
            for p in &r.risk {
                csv.row([p.n.to_string(), p.estimator.label().into(), fmt_f64(p.risk), fmt_f64(p.se)]);
            }
            ctx.out.write("risk.csv", &csv.into_string())?;
        }
        _ => {
            let mut csv = Csv::new();
            csv.comment("model", &model)
                .comment("reps", cfg.reps)
                .comment("alpha", fmt_f64(cfg.alpha))
                .comment("band_mc_reps", cfg.band_mc_reps);
            csv.row(["n", "estimator", "coverage", "se", "mean_q_hat"]);
            for p in &r.coverage {
                csv.row([
                    p.n.to_string(),
                    p.estimator.label().into(),
                    fmt_f64(p.coverage),
                    fmt_f64(p.se),
                    fmt_f64(p.mean_q_hat),
                ]);
            }
            ctx.out.write("coverage.csv", &csv.into_string())?;
        }
    }
    Ok(())
}

fn write_simulate_svg(ctx: &mut Ctx, cfg: &ExperimentConfig, mode: &str, r: &ExperimentResult) -> CliResult<()> {
    let model = cfg.model.to_string();
    match mode {
        "loss" => {
            for &norm in &cfg.norms {
                let groups: Vec<(String, Vec<f64>)> = cfg
                    .estimators
                    .iter()
                    .map(|&e| {
                        let v = r
                            .losses
                            .iter()
                            .filter(|l| l.estimator == e && l.norm == norm)
                            .map(|l| l.loss)
                            .collect();
                        (e.label().to_string(), v)
                    })
                    .collect();
                let title = format!("{model}, n = {}, l{} loss", cfg.n_grid[0], norm.label());
                let name = format!("losses_l{}.svg", norm.label());
                ctx.out.write(&name, &svg::boxplot(&title, "loss", &groups))?;
            }
        }
        "risk" => {
            let series = per_estimator(cfg, |e| {
                r.risk.iter().filter(|p| p.estimator == e).map(|p| (p.n as f64, p.risk)).collect()
            });
            let chart = svg::line_chart(&format!("{model}: scaled risk"), "n", "n E||p_hat - p||^2", &series);
            ctx.out.write("risk.svg", &chart)?;
        }
        _ => {
            let series = per_estimator(cfg, |e| {
                r.coverage
                    .iter()
                    .filter(|p| p.estimator == e)
                    .map(|p| (p.n as f64, p.coverage))
                    .collect()
            });
            let chart = svg::line_chart(&format!("{model}: band coverage"), "n", "coverage", &series);
            ctx.out.write("coverage.svg", &chart)?;
        }
    }
    Ok(())
}

fn per_estimator(
    cfg: &ExperimentConfig,
    f: impl Fn(EstimatorKind) -> Vec<(f64, f64)>,
) -> Vec<(String, Vec<(f64, f64)>)> {
    cfg.estimators.iter().map(|&e| (e.label().to_string(), f(e))).collect()
}

fn cmd_band(mut ctx: Ctx, a: BandArgs) -> CliResult<()> {
    let (center, n, kind, source) = if let Some(path) = &a.from_estimate {
        let text = fs::read_to_string(path)?;
        let rep: EstimateReport = serde_json::from_str(&text)
            .map_err(|e| CliError::Data(format!("cannot read estimate {}: {e}", path.display())))?;
        (rep.estimate, rep.n, rep.kind, path.clone())
    } else {
        let path = a.input.clone().expect("clap enforces --input");
        let x = load_counts(&path)?;
        (estimate(&x, a.kind)?.probs, x.n(), a.kind, path)
    };
    let b = global_band(&center, n, a.alpha, a.mc, ctx.seed)?;

    if ctx.format == Some(Format::Json) {
        let json = serde_json::to_string_pretty(&b).expect("band serializes");
        ctx.out.write("band.json", &(json + "\n"))?;
    } else {
        let mut csv = Csv::new();
        csv.comment("q_hat", fmt_f64(b.q_hat))
            .comment("alpha", fmt_f64(b.alpha))
            .comment("n", n)
            .comment("kind", kind)
            .comment("mc_reps", b.mc_reps)
            .comment("seed", b.seed);
        csv.row(["j", "lower", "upper"]);
        for j in 0..b.lower.len() {
            csv.row([j.to_string(), fmt_f64(b.lower[j]), fmt_f64(b.upper[j])]);
        }
        ctx.out.write("band.csv", &csv.into_string())?;
    }
    if ctx.svg {
        let series = vec![
            ("center".to_string(), points(&center)),
            ("lower".into(), points(&b.lower)),
            ("upper".into(), points(&b.upper)),
        ];
        let title = format!("{} band, alpha = {}", kind, a.alpha);
        ctx.out.write("band.svg", &svg::line_chart(&title, "j", "p", &series))?;
    }
    let config = json!({
        "source": source,
        "from_estimate": a.from_estimate.is_some(),
        "kind": kind,
        "alpha": a.alpha,
        "mc_reps": a.mc,
        "n": n,
    });
    ctx.finish("band", config)
}

fn cmd_qq(mut ctx: Ctx, a: QqArgs) -> CliResult<()> {
    let mut cfg = experiment_config(&ctx, a.model.clone(), vec![a.n], a.reps);
    cfg.estimators = a.est.clone();
    let result = sim::run_qq_samples(&cfg, a.coord)?;

    if ctx.format == Some(Format::Json) {
        let json = serde_json::to_string_pretty(&result.qq).expect("qq serializes");
        ctx.out.write("qq.json", &(json + "\n"))?;
    } else {
        let mut csv = Csv::new();
        csv.comment("model", &cfg.model)
            .comment("n", a.n)
            .comment("coord", a.coord)
            .comment("reps", a.reps);
        for s in &result.qq {
            csv.comment(&format!("variance_{}", s.estimator), fmt_f64(sample_variance(&s.samples)));
        }
        let mut header = vec!["i".to_string()];
        header.extend(result.qq.iter().map(|s| s.estimator.label().to_string()));
        header.extend(result.qq.iter().map(|s| format!("{}_theoretical", s.estimator)));
        csv.row(&header);
        for i in 0..a.reps {
            let mut row = vec![i.to_string()];
            row.extend(result.qq.iter().map(|s| fmt_f64(s.sorted[i])));
            row.extend(result.qq.iter().map(|s| fmt_f64(s.theoretical[i])));
            csv.row(&row);
        }
        ctx.out.write("qq.csv", &csv.into_string())?;
    }
    if ctx.svg {
        let series: Vec<(String, Vec<(f64, f64)>)> = result
            .qq
            .iter()
            .map(|s| {
                let pts = s.theoretical.iter().copied().zip(s.sorted.iter().copied()).collect();
                (s.estimator.label().to_string(), pts)
            })
            .collect();
        let title = format!("{}: QQ, coordinate {}, n = {}", cfg.model, a.coord, a.n);
        ctx.out.write("qq.svg", &svg::scatter(&title, "normal quantile", "sample quantile", &series))?;
    }
    let config = json!({ "coord": a.coord, "experiment": cfg });
    ctx.finish("qq", config)
}

fn machine_info() -> serde_json::Value {
    json!({
        "os": std::env::consts::OS,
        "arch": std::env::consts::ARCH,
        "logical_cpus": std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
    })
}

fn cmd_bench(mut ctx: Ctx, a: BenchArgs) -> CliResult<()> {
    let timings = sim::worst_case_timing(&a.sgrid, a.runs, a.mc)?;
    let machine = machine_info();

    if ctx.format == Some(Format::Json) {
        let json = serde_json::to_string_pretty(&json!({ "machine": machine, "timings": timings }))
            .expect("timings serialize");
        ctx.out.write("bench.json", &(json + "\n"))?;
    } else {
        let mut csv = Csv::new();
        csv.comment("os", &machine["os"].as_str().unwrap_or_default())
            .comment("arch", &machine["arch"].as_str().unwrap_or_default())
            .comment("logical_cpus", &machine["logical_cpus"])
            .comment("runs", a.runs)
            .comment("mc_draws", a.mc);
        csv.row(["task", "s", "runs", "mean_seconds", "reference_seconds"]);
        for t in &timings {
            csv.row([
                t.task.clone(),
                t.s.to_string(),
                t.runs.to_string(),
                fmt_f64(t.mean_seconds),
                t.reference_seconds.map(fmt_f64).unwrap_or_default(),
            ]);
        }
        ctx.out.write("bench.csv", &csv.into_string())?;

        // one row per task, one column per support size
        let mut table = Csv::new();
        let mut header = vec!["task".to_string()];
        header.extend(a.sgrid.iter().map(|s| format!("s={s}")));
        table.row(&header);
        for (task, label) in [("cv_beta_sr", "SR"), ("cv_beta_sg", "SG"), ("quantile", "q_alpha")] {
            let mut row = vec![label.to_string()];
            for &s in &a.sgrid {
                let t = timings.iter().find(|t| t.task == task && t.s == s);
                row.push(t.map(|t| fmt_f64(t.mean_seconds)).unwrap_or_default());
            }
            table.row(&row);
        }
        ctx.out.write("bench_table.csv", &table.into_string())?;
    }
    let config = json!({
        "sgrid": a.sgrid,
        "runs": a.runs,
        "mc_draws": a.mc,
        "machine": machine,
    });
    ctx.finish("bench", config)
}
