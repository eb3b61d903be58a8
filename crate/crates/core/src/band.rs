//! Global confidence bands from the sup-norm of the limiting Gaussian process.
//!
//! The limit of `sqrt(n) (estimate - p)` has covariance
//! `Sigma_ij = theta_i delta_ij - theta_i theta_j`. A draw is built in O(D) as
//! `Y_j = sqrt(theta_j) Z_j - theta_j sum_k sqrt(theta_k) Z_k` with i.i.d.
//! standard normal `Z`, which has exactly that covariance because
//! `sum_k theta_k = 1`.

use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{derive_seed, stream_rng, tag};

/// Draws per independent random stream.
const CHUNK: usize = 4096;

/// Lower/upper envelopes `[max(c_j - q/sqrt(n), 0), c_j + q/sqrt(n)]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfidenceBand {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub q_hat: f64,
    pub alpha: f64,
    pub mc_reps: usize,
    pub seed: u64,
}

impl ConfidenceBand {
    /// Whether `truth_j` lies in the band for every index; indices beyond the
    /// band's length are treated as a zero center, i.e. `[0, q/sqrt(n)]`.
    pub fn contains(&self, truth: &[f64], n: u64) -> bool {
        let half = self.q_hat / (n as f64).sqrt();
        let len = truth.len().max(self.lower.len());
        (0..len).all(|j| {
            let t = truth.get(j).copied().unwrap_or(0.0);
            let lo = self.lower.get(j).copied().unwrap_or(0.0);
            let hi = self.upper.get(j).copied().unwrap_or(half);
            lo <= t && t <= hi
        })
    }
}

fn check_theta(theta: &[f64]) -> Result<()> {
    if theta.is_empty() {
        return Err(Error::InvalidPmf("empty probability vector".into()));
    }
    if theta.iter().any(|t| !t.is_finite() || *t < 0.0) {
        return Err(Error::InvalidPmf("negative or non-finite entry".into()));
    }
    let total: f64 = theta.iter().sum();
    if (total - 1.0).abs() > 1e-6 {
        return Err(Error::InvalidPmf(format!("entries sum to {total}, expected 1")));
    }
    Ok(())
}

/// Sampler for `Y ~ N(0, Sigma(theta))` restricted to the nonzero coordinates.
struct LimitProcess {
    sqrt_theta: Vec<f64>,
    theta: Vec<f64>,
}

impl LimitProcess {
    fn new(theta: &[f64]) -> Self {
        let theta: Vec<f64> = theta.iter().copied().filter(|&t| t > 0.0).collect();
        let sqrt_theta = theta.iter().map(|t| t.sqrt()).collect();
        LimitProcess { sqrt_theta, theta }
    }

    /// Fills `y` with one draw; `y` has one slot per nonzero coordinate.
    #[inline]
    fn draw<R: rand::Rng>(&self, rng: &mut R, y: &mut [f64]) {
        let mut s = 0.0;
        for (yj, &st) in y.iter_mut().zip(&self.sqrt_theta) {
            let z: f64 = StandardNormal.sample(rng);
            *yj = st * z;
            s += st * z;
        }
        for (yj, &t) in y.iter_mut().zip(&self.theta) {
            *yj -= t * s;
        }
    }
}

/// Full draws of `Y` (one row per draw, zero coordinates included).
pub fn sample_process(theta: &[f64], reps: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    check_theta(theta)?;
    let process = LimitProcess::new(theta);
    let key = derive_seed(seed, &[tag::SUP_NORM]);
    let nonzero: Vec<usize> = (0..theta.len()).filter(|&j| theta[j] > 0.0).collect();
    let mut out = Vec::with_capacity(reps);
    let mut y = vec![0.0; nonzero.len()];
    let chunks = reps.div_ceil(CHUNK);
    for c in 0..chunks {
        let mut rng = stream_rng(key, c as u64);
        for _ in 0..CHUNK.min(reps - c * CHUNK) {
            process.draw(&mut rng, &mut y);
            let mut row = vec![0.0; theta.len()];
            for (k, &j) in nonzero.iter().enumerate() {
                row[j] = y[k];
            }
            out.push(row);
        }
    }
    Ok(out)
}

/// `reps` draws of `||Y||_inf` for `Y ~ N(0, Sigma(theta))`.
///
/// Draws are generated in fixed-size chunks, each on its own random stream,
/// so the result does not depend on the number of worker threads.
pub fn sample_sup_norm(theta: &[f64], reps: usize, seed: u64) -> Result<Vec<f64>> {
    check_theta(theta)?;
    let process = LimitProcess::new(theta);
    let key = derive_seed(seed, &[tag::SUP_NORM]);
    let mut out = vec![0.0; reps];
    out.par_chunks_mut(CHUNK)
        .enumerate()
        .for_each(|(c, chunk)| {
            let mut rng = stream_rng(key, c as u64);
            let mut y = vec![0.0; process.theta.len()];
            for slot in chunk.iter_mut() {
                process.draw(&mut rng, &mut y);
                *slot = y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            }
        });
    Ok(out)
}

/// Empirical `(1 - alpha)`-quantile, "higher" convention: the smallest order
/// statistic whose ECDF value is at least `1 - alpha`.
pub fn quantile_higher(draws: &mut [f64], alpha: f64) -> Result<f64> {
    if draws.is_empty() {
        return Err(Error::EmptyInput);
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::ParameterDomain(format!("alpha must lie in (0,1), got {alpha}")));
    }
    let m = draws.len();
    let rank = (((1.0 - alpha) * m as f64 - 1e-9).ceil() as usize).clamp(1, m);
    let (_, q, _) = draws.select_nth_unstable_by(rank - 1, f64::total_cmp);
    Ok(*q)
}

/// Monte-Carlo estimate of the `alpha`-quantile of `||Y||_inf`.
pub fn quantile_q_alpha(theta: &[f64], alpha: f64, reps: usize, seed: u64) -> Result<f64> {
    if reps < 100 {
        return Err(Error::ParameterDomain(format!(
            "at least 100 Monte-Carlo draws required, got {reps}"
        )));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::ParameterDomain(format!("alpha must lie in (0,1), got {alpha}")));
    }
    let mut draws = sample_sup_norm(theta, reps, seed)?;
    quantile_higher(&mut draws, alpha)
}

/// Band around `center` of half-width `q_hat / sqrt(n)`, clamped below at 0.
///
/// The Monte-Carlo metadata fields are left at `alpha = NaN`, `mc_reps = 0`;
/// [`global_band`] fills them in.
pub fn band(center: &[f64], n: u64, q_hat: f64) -> Result<ConfidenceBand> {
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    if !(q_hat >= 0.0) {
        return Err(Error::ParameterDomain(format!("q_hat must be >= 0, got {q_hat}")));
    }
    let half = q_hat / (n as f64).sqrt();
    Ok(ConfidenceBand {
        lower: center.iter().map(|c| (c - half).max(0.0)).collect(),
        upper: center.iter().map(|c| c + half).collect(),
        q_hat,
        alpha: f64::NAN,
        mc_reps: 0,
        seed: 0,
    })
}

/// Plug-in global band: `q_hat` is estimated with `center` as theta.
pub fn global_band(
    center: &[f64],
    n: u64,
    alpha: f64,
    mc_reps: usize,
    seed: u64,
) -> Result<ConfidenceBand> {
    let q_hat = quantile_q_alpha(center, alpha, mc_reps, seed)?;
    let mut b = band(center, n, q_hat)?;
    b.alpha = alpha;
    b.mc_reps = mc_reps;
    b.seed = seed;
    Ok(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_process_is_zero() {
        let d = sample_sup_norm(&[1.0], 1000, 5).unwrap();
        assert!(d.iter().all(|&v| v == 0.0));
        assert_eq!(quantile_q_alpha(&[1.0], 0.05, 1000, 5).unwrap(), 0.0);
    }

    #[test]
    fn two_point_process_is_antisymmetric() {
        for row in sample_process(&[0.5, 0.5], 200, 3).unwrap() {
            assert!((row[0] + row[1]).abs() < 1e-14);
        }
    }

    #[test]
    fn zero_coordinates_stay_zero() {
        for row in sample_process(&[0.5, 0.0, 0.5], 100, 3).unwrap() {
            assert_eq!(row[1], 0.0);
        }
    }

    #[test]
    fn invalid_theta() {
        assert!(matches!(sample_sup_norm(&[0.5, 0.4], 10, 1), Err(Error::InvalidPmf(_))));
        assert!(matches!(sample_sup_norm(&[], 10, 1), Err(Error::InvalidPmf(_))));
        assert!(matches!(
            quantile_q_alpha(&[1.0], 0.05, 50, 1),
            Err(Error::ParameterDomain(_))
        ));
    }

    #[test]
    fn higher_quantile_convention() {
        let mut v: Vec<f64> = (1..=100).map(f64::from).collect();
        assert_eq!(quantile_higher(&mut v, 0.05).unwrap(), 95.0);
        assert_eq!(quantile_higher(&mut v, 0.055).unwrap(), 95.0);
        assert_eq!(quantile_higher(&mut v, 0.045).unwrap(), 96.0);
    }

    #[test]
    fn quantiles_decrease_in_alpha() {
        let draws = sample_sup_norm(&[0.2, 0.3, 0.5], 20_000, 9).unwrap();
        let mut prev = f64::INFINITY;
        for alpha in [0.01, 0.05, 0.1, 0.2, 0.5, 0.9] {
            let q = quantile_higher(&mut draws.clone(), alpha).unwrap();
            assert!(q <= prev);
            prev = q;
        }
    }

    #[test]
    fn band_examples() {
        let b = band(&[0.5, 0.5], 100, 0.1).unwrap();
        for j in 0..2 {
            assert!((b.lower[j] - 0.49).abs() < 1e-15);
            assert!((b.upper[j] - 0.51).abs() < 1e-15);
        }
        let b = band(&[0.01, 0.99], 100, 0.5).unwrap();
        assert_eq!(b.lower[0], 0.0);
        assert!((b.lower[1] - 0.94).abs() < 1e-15);
        assert!((b.upper[0] - 0.06).abs() < 1e-15);
        assert!((b.upper[1] - 1.04).abs() < 1e-15);
        let b = band(&[0.3, 0.7], 10, 0.0).unwrap();
        assert_eq!(b.lower, vec![0.3, 0.7]);
        assert_eq!(b.upper, vec![0.3, 0.7]);
    }

    #[test]
    fn containment_beyond_support() {
        let b = band(&[0.6, 0.4], 100, 1.0).unwrap();
        assert!(b.contains(&[0.55, 0.4, 0.05], 100));
        assert!(!b.contains(&[0.55, 0.3, 0.15], 100));
    }

    #[test]
    fn sampler_is_deterministic() {
        let t = [0.1, 0.2, 0.3, 0.4];
        assert_eq!(
            sample_sup_norm(&t, 10_000, 77).unwrap(),
            sample_sup_norm(&t, 10_000, 77).unwrap()
        );
    }
}
