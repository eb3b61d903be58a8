//! Monte-Carlo experiment drivers: loss distributions, scaled-risk curves,
//! band coverage, QQ samples and worst-case timings.
//!
//! Replication `i` at sample size `n` draws its data from stream `i` of a
//! generator keyed by `hash(seed, "sample", n)`; its band quantile uses a
//! generator keyed by `hash(seed, "band", n, i)`. Replications run on a rayon
//! pool of `workers` threads and are collected in index order, so results do
//! not depend on the worker count.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::band::{band, quantile_q_alpha};
use crate::error::{Error, Result};
use crate::estimators::{cv_beta, estimate, EstimatorKind, FrequencyData, ShapeKind};
use crate::models::{pmf_truncate, ModelSpec, Pmf, Sampler, DEFAULT_TRUNCATION};
use crate::numeric::{mean_and_se, padded_distance, Norm};
use crate::rng::{derive_seed, stream_rng, tag};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub model: ModelSpec,
    pub n_grid: Vec<u64>,
    pub reps: usize,
    pub estimators: Vec<EstimatorKind>,
    pub norms: Vec<Norm>,
    pub alpha: f64,
    pub band_mc_reps: usize,
    pub seed: u64,
    /// Worker threads; 0 uses the rayon default.
    pub workers: usize,
}

impl ExperimentConfig {
    pub fn new(model: ModelSpec, n: u64, reps: usize) -> Self {
        ExperimentConfig {
            model,
            n_grid: vec![n],
            reps,
            estimators: EstimatorKind::ALL.to_vec(),
            norms: vec![Norm::L1, Norm::L2],
            alpha: 0.05,
            band_mc_reps: 100_000,
            seed: 1,
            workers: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.model.validate()?;
        if self.reps == 0 {
            return Err(Error::Config("reps must be >= 1".into()));
        }
        if self.n_grid.is_empty() || self.n_grid.contains(&0) {
            return Err(Error::Config("sample sizes must be >= 1 and nonempty".into()));
        }
        if self.estimators.is_empty() {
            return Err(Error::Config("no estimators selected".into()));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::Config(format!("alpha must lie in (0,1), got {}", self.alpha)));
        }
        Ok(())
    }

    fn single_n(&self) -> Result<u64> {
        match self.n_grid.as_slice() {
            [n] => Ok(*n),
            _ => Err(Error::Config("this experiment needs exactly one sample size".into())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LossRecord {
    pub n: u64,
    pub rep: usize,
    pub estimator: EstimatorKind,
    pub norm: Norm,
    pub loss: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LossSummary {
    pub n: u64,
    pub estimator: EstimatorKind,
    pub norm: Norm,
    pub mean: f64,
    pub se: f64,
}

/// `n * E||estimate - p||_2^2` with its Monte-Carlo standard error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiskPoint {
    pub n: u64,
    pub estimator: EstimatorKind,
    pub risk: f64,
    pub se: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoveragePoint {
    pub n: u64,
    pub estimator: EstimatorKind,
    pub coverage: f64,
    pub se: f64,
    pub mean_q_hat: f64,
}

/// `sqrt(n) (estimate_coord - p_coord)` over replications.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QqSeries {
    pub n: u64,
    pub coord: usize,
    pub estimator: EstimatorKind,
    /// In replication order.
    pub samples: Vec<f64>,
    /// Sorted samples.
    pub sorted: Vec<f64>,
    /// Standard-normal quantiles at `(i + 0.5) / m`, times the sample sd.
    pub theoretical: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub task: String,
    pub s: usize,
    pub runs: usize,
    pub mean_seconds: f64,
    /// Published timings on an Apple M1 laptop, where available.
    pub reference_seconds: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub losses: Vec<LossRecord>,
    pub loss_summary: Vec<LossSummary>,
    pub risk: Vec<RiskPoint>,
    pub coverage: Vec<CoveragePoint>,
    pub qq: Vec<QqSeries>,
    pub timings: Vec<Timing>,
}

fn in_pool<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot build worker pool: {e}")))?;
    Ok(pool.install(f))
}

/// Truth vector covering at least `len` indices.
fn truth_to(model: &ModelSpec, truth: &Pmf, len: usize) -> Vec<f64> {
    let mut t = truth.probs.clone();
    if len > t.len() && model.support_end().is_none() {
        t.extend((t.len()..len).map(|j| crate::models::pmf_eval(model, j).unwrap_or(0.0)));
    }
    t
}

struct Replicator<'a> {
    cfg: &'a ExperimentConfig,
    sampler: Sampler,
    truth: Pmf,
}

impl<'a> Replicator<'a> {
    fn new(cfg: &'a ExperimentConfig) -> Result<Self> {
        cfg.validate()?;
        let truth = pmf_truncate(&cfg.model, DEFAULT_TRUNCATION)?;
        Ok(Replicator {
            cfg,
            sampler: Sampler::from_pmf(&truth),
            truth,
        })
    }

    fn data(&self, n: u64, rep: usize) -> Result<FrequencyData> {
        let mut rng = stream_rng(derive_seed(self.cfg.seed, &[tag::SAMPLE, n]), rep as u64);
        self.sampler.sample_counts(n, &mut rng)
    }

    fn fits(&self, x: &FrequencyData) -> Result<Vec<Pmf>> {
        self.cfg.estimators.iter().map(|&k| estimate(x, k)).collect()
    }

    /// Runs `f` on every replication in the configured pool.
    fn map_reps<T: Send>(
        &self,
        n: u64,
        f: impl Fn(usize, FrequencyData) -> Result<T> + Sync + Send,
    ) -> Result<Vec<T>> {
        in_pool(self.cfg.workers, || {
            (0..self.cfg.reps)
                .into_par_iter()
                .map(|rep| f(rep, self.data(n, rep)?))
                .collect::<Result<Vec<T>>>()
        })?
    }
}

/// Per-replication losses `||estimate - p||_k` (zero-padded) for one sample size.
pub fn run_loss_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    let n = cfg.single_n()?;
    let rep = Replicator::new(cfg)?;
    let per_rep = rep.map_reps(n, |_, x| {
        let fits = rep.fits(&x)?;
        Ok(fits
            .iter()
            .map(|f| {
                cfg.norms
                    .iter()
                    .map(|&k| padded_distance(&f.probs, &rep.truth.probs, k))
                    .collect::<Vec<_>>()
            })
            .collect::<Vec<_>>())
    })?;

    let mut result = ExperimentResult::default();
    for (r, row) in per_rep.iter().enumerate() {
        for (e, &estimator) in cfg.estimators.iter().enumerate() {
            for (k, &norm) in cfg.norms.iter().enumerate() {
                result.losses.push(LossRecord {
                    n,
                    rep: r,
                    estimator,
                    norm,
                    loss: row[e][k],
                });
            }
        }
    }
    for (e, &estimator) in cfg.estimators.iter().enumerate() {
        for (k, &norm) in cfg.norms.iter().enumerate() {
            let v: Vec<f64> = per_rep.iter().map(|row| row[e][k]).collect();
            let (mean, se) = mean_and_se(&v);
            result.loss_summary.push(LossSummary {
                n,
                estimator,
                norm,
                mean,
                se,
            });
        }
    }
    Ok(result)
}

/// Scaled risk `n * mean ||estimate - p||_2^2` for each sample size in the grid.
pub fn run_risk_curve(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    let rep = Replicator::new(cfg)?;
    let mut result = ExperimentResult::default();
    for &n in &cfg.n_grid {
        let per_rep = rep.map_reps(n, |_, x| {
            Ok(rep
                .fits(&x)?
                .iter()
                .map(|f| padded_distance(&f.probs, &rep.truth.probs, Norm::L2).powi(2))
                .collect::<Vec<_>>())
        })?;
        for (e, &estimator) in cfg.estimators.iter().enumerate() {
            let sq: Vec<f64> = per_rep.iter().map(|row| row[e]).collect();
            let (mean, se) = mean_and_se(&sq);
            result.risk.push(RiskPoint {
                n,
                estimator,
                risk: n as f64 * mean,
                se: n as f64 * se,
            });
        }
    }
    Ok(result)
}

/// Proportion of replications whose plug-in global band contains the truth
/// at every index of its truncated support.
pub fn run_coverage(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    let rep = Replicator::new(cfg)?;
    let mut result = ExperimentResult::default();
    for &n in &cfg.n_grid {
        let per_rep = rep.map_reps(n, |r, x| {
            let band_seed = derive_seed(cfg.seed, &[tag::BAND, n, r as u64]);
            rep.fits(&x)?
                .iter()
                .map(|f| {
                    let q = quantile_q_alpha(&f.probs, cfg.alpha, cfg.band_mc_reps, band_seed)?;
                    let b = band(&f.probs, n, q)?;
                    let truth = truth_to(&cfg.model, &rep.truth, f.len());
                    Ok((b.contains(&truth, n), q))
                })
                .collect::<Result<Vec<_>>>()
        })?;
        for (e, &estimator) in cfg.estimators.iter().enumerate() {
            let hits = per_rep.iter().filter(|row| row[e].0).count();
            let c = hits as f64 / cfg.reps as f64;
            let qs: Vec<f64> = per_rep.iter().map(|row| row[e].1).collect();
            result.coverage.push(CoveragePoint {
                n,
                estimator,
                coverage: c,
                se: (c * (1.0 - c) / cfg.reps as f64).sqrt(),
                mean_q_hat: mean_and_se(&qs).0,
            });
        }
    }
    Ok(result)
}

/// Samples of `sqrt(n) (estimate_coord - p_coord)` for QQ plots.
pub fn run_qq_samples(cfg: &ExperimentConfig, coord: usize) -> Result<ExperimentResult> {
    let n = cfg.single_n()?;
    let rep = Replicator::new(cfg)?;
    if coord >= rep.truth.len() {
        return Err(Error::Config(format!(
            "coordinate {coord} outside the model support (length {})",
            rep.truth.len()
        )));
    }
    let p = rep.truth.probs[coord];
    let scale = (n as f64).sqrt();
    let per_rep = rep.map_reps(n, |_, x| {
        Ok(rep
            .fits(&x)?
            .iter()
            .map(|f| scale * (f.get(coord) - p))
            .collect::<Vec<_>>())
    })?;
    let std_normal = Normal::standard();
    let mut result = ExperimentResult::default();
    for (e, &estimator) in cfg.estimators.iter().enumerate() {
        let samples: Vec<f64> = per_rep.iter().map(|row| row[e]).collect();
        let mut sorted = samples.clone();
        sorted.sort_by(f64::total_cmp);
        let m = samples.len();
        let (_, se) = mean_and_se(&samples);
        let sd = if m > 1 { se * (m as f64).sqrt() } else { 0.0 };
        let theoretical = (0..m)
            .map(|i| sd * std_normal.inverse_cdf((i as f64 + 0.5) / m as f64))
            .collect();
        result.qq.push(QqSeries {
            n,
            coord,
            estimator,
            samples,
            sorted,
            theoretical,
        });
    }
    Ok(result)
}

/// Published worst-case timings (seconds) for `s` in {500, 1000, 3000, 5000}.
fn reference_seconds(task: &str, s: usize) -> Option<f64> {
    let col = [500, 1000, 3000, 5000].iter().position(|&v| v == s)?;
    let row: [f64; 4] = match task {
        "cv_beta_sr" => [0.4, 2.6, 186.0, 846.0],
        "cv_beta_sg" => [0.3, 1.6, 180.0, 840.0],
        "quantile" => [14.9, 49.6, 468.0, 1320.0],
        _ => return None,
    };
    Some(row[col])
}

/// The strictly increasing frequency vector `x_j = j + 1`, `j = 0..=s`.
pub fn worst_case_counts(s: usize) -> FrequencyData {
    FrequencyData::new((1..=s as u64 + 1).collect()).expect("positive counts")
}

/// Mean wall time over `runs` of `cv_beta` on the worst-case input (both
/// kinds) and of the band quantile for a strictly decreasing triangular
/// theta on `{0..s}` with `mc_draws` draws.
pub fn worst_case_timing(s_grid: &[usize], runs: usize, mc_draws: usize) -> Result<Vec<Timing>> {
    if runs == 0 {
        return Err(Error::Config("runs must be >= 1".into()));
    }
    if s_grid.contains(&0) {
        return Err(Error::Config("support sizes must be >= 1".into()));
    }
    let mut out = Vec::new();
    for &s in s_grid {
        let x = worst_case_counts(s);
        for (task, kind) in [
            ("cv_beta_sr", ShapeKind::Rearrangement),
            ("cv_beta_sg", ShapeKind::Grenander),
        ] {
            let start = Instant::now();
            for _ in 0..runs {
                std::hint::black_box(cv_beta(std::hint::black_box(&x), kind)?);
            }
            out.push(Timing {
                task: task.into(),
                s,
                runs,
                mean_seconds: start.elapsed().as_secs_f64() / runs as f64,
                reference_seconds: reference_seconds(task, s),
            });
        }
        let theta = pmf_truncate(&ModelSpec::TriangularDecreasing(s), DEFAULT_TRUNCATION)?;
        let start = Instant::now();
        for run in 0..runs {
            std::hint::black_box(quantile_q_alpha(&theta.probs, 0.05, mc_draws, run as u64)?);
        }
        out.push(Timing {
            task: "quantile".into(),
            s,
            runs,
            mean_seconds: start.elapsed().as_secs_f64() / runs as f64,
            reference_seconds: reference_seconds("quantile", s),
        });
    }
    Ok(out)
}
