//! Point estimators of a discrete p.m.f. from frequency data.
//!
//! The empirical, minimax, rearrangement and Grenander estimators are direct
//! transforms of the relative frequencies. The stacked estimators mix a
//! shape-constrained fit with the empirical one, with the mixture weight
//! chosen by closed-form leave-one-out least-squares cross-validation.

mod loo;
mod stacked;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::Pmf;
use crate::shape::{isotonic_decreasing, rearrange_decreasing};

pub use loo::{loo_vectors, loo_vectors_fast, LooVectors};
pub use stacked::{cv_beta, stacked, CvBeta, StackDiagnostics, StackedFit};

/// Observed counts `x_0..x_{t_n}` with `x_{t_n} > 0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FrequencyData {
    counts: Vec<u64>,
    n: u64,
}

impl FrequencyData {
    pub fn new(counts: Vec<u64>) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::EmptyInput);
        }
        let n: u64 = counts.iter().sum();
        if n == 0 {
            return Err(Error::EmptyInput);
        }
        if *counts.last().unwrap() == 0 {
            return Err(Error::InvalidData(
                "last count must be positive (it marks the largest observation)".into(),
            ));
        }
        Ok(FrequencyData { counts, n })
    }

    /// Drops trailing zero counts; returns the data and how many were dropped.
    pub fn from_counts_trimmed(mut counts: Vec<u64>) -> Result<(Self, usize)> {
        let before = counts.len();
        while counts.last() == Some(&0) {
            counts.pop();
        }
        let dropped = before - counts.len();
        Ok((Self::new(counts)?, dropped))
    }

    /// Tabulates raw observations.
    pub fn from_values(values: &[usize]) -> Result<Self> {
        let max = *values.iter().max().ok_or(Error::EmptyInput)?;
        let mut counts = vec![0u64; max + 1];
        for &v in values {
            counts[v] += 1;
        }
        Self::new(counts)
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// Support length `t_n + 1`.
    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Largest observed value.
    pub fn t_n(&self) -> usize {
        self.counts.len() - 1
    }
}

/// Which shape-constrained estimator is stacked with the empirical one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ShapeKind {
    Rearrangement,
    Grenander,
}

impl ShapeKind {
    pub(crate) fn apply(&self, v: &[f64]) -> Result<Vec<f64>> {
        match self {
            ShapeKind::Rearrangement => rearrange_decreasing(v),
            ShapeKind::Grenander => isotonic_decreasing(v).map(|(fit, _)| fit),
        }
    }
}

/// The six estimators compared in the simulation study.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EstimatorKind {
    #[serde(rename = "e")]
    Empirical,
    #[serde(rename = "mm")]
    Minimax,
    #[serde(rename = "r")]
    Rearrangement,
    #[serde(rename = "G")]
    Grenander,
    #[serde(rename = "sr")]
    StackedRearrangement,
    #[serde(rename = "sG")]
    StackedGrenander,
}

impl EstimatorKind {
    pub const ALL: [EstimatorKind; 6] = [
        EstimatorKind::Empirical,
        EstimatorKind::Minimax,
        EstimatorKind::Rearrangement,
        EstimatorKind::Grenander,
        EstimatorKind::StackedRearrangement,
        EstimatorKind::StackedGrenander,
    ];

    /// Short label: `e`, `mm`, `r`, `G`, `sr`, `sG`.
    pub fn label(&self) -> &'static str {
        match self {
            EstimatorKind::Empirical => "e",
            EstimatorKind::Minimax => "mm",
            EstimatorKind::Rearrangement => "r",
            EstimatorKind::Grenander => "G",
            EstimatorKind::StackedRearrangement => "sr",
            EstimatorKind::StackedGrenander => "sG",
        }
    }

    pub fn stacked_shape(&self) -> Option<ShapeKind> {
        match self {
            EstimatorKind::StackedRearrangement => Some(ShapeKind::Rearrangement),
            EstimatorKind::StackedGrenander => Some(ShapeKind::Grenander),
            _ => None,
        }
    }
}

impl fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for EstimatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        EstimatorKind::ALL
            .into_iter()
            .find(|k| k.label() == s.trim())
            .ok_or_else(|| Error::Config(format!("unknown estimator `{s}` (e, mm, r, G, sr, sG)")))
    }
}

pub(crate) fn empirical_probs(x: &FrequencyData) -> Vec<f64> {
    let n = x.n() as f64;
    x.counts().iter().map(|&c| c as f64 / n).collect()
}

/// Relative frequencies `x_j / n`.
pub fn empirical(x: &FrequencyData) -> Result<Pmf> {
    if x.n() == 0 {
        return Err(Error::EmptyInput);
    }
    Ok(Pmf::from_estimate(empirical_probs(x)))
}

/// Empirical estimator sorted into nonincreasing order.
pub fn rearrangement_est(x: &FrequencyData) -> Result<Pmf> {
    let p = empirical(x)?;
    Ok(Pmf::from_estimate(rearrange_decreasing(&p.probs)?))
}

/// Isotonic (decreasing) projection of the empirical estimator.
pub fn grenander(x: &FrequencyData) -> Result<Pmf> {
    let p = empirical(x)?;
    Ok(Pmf::from_estimate(isotonic_decreasing(&p.probs)?.0))
}

/// `alpha * uniform{0..t_n} + (1 - alpha) * empirical` with
/// `alpha = sqrt(n) / (n + sqrt(n))`.
pub fn minimax(x: &FrequencyData) -> Result<Pmf> {
    let p = empirical(x)?;
    let n = x.n() as f64;
    let alpha = n.sqrt() / (n + n.sqrt());
    let uniform = 1.0 / x.len() as f64;
    Ok(Pmf::from_estimate(
        p.probs
            .iter()
            .map(|&pj| alpha * uniform + (1.0 - alpha) * pj)
            .collect(),
    ))
}

/// Dispatches to the estimator named by `kind`.
pub fn estimate(x: &FrequencyData, kind: EstimatorKind) -> Result<Pmf> {
    match kind {
        EstimatorKind::Empirical => empirical(x),
        EstimatorKind::Minimax => minimax(x),
        EstimatorKind::Rearrangement => rearrangement_est(x),
        EstimatorKind::Grenander => grenander(x),
        EstimatorKind::StackedRearrangement => Ok(stacked(x, ShapeKind::Rearrangement)?.estimate),
        EstimatorKind::StackedGrenander => Ok(stacked(x, ShapeKind::Grenander)?.estimate),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn fd(c: &[u64]) -> FrequencyData {
        FrequencyData::new(c.to_vec()).unwrap()
    }

    fn assert_probs(p: &Pmf, expected: &[f64]) {
        assert_eq!(p.len(), expected.len(), "{:?}", p.probs);
        for (a, b) in p.probs.iter().zip(expected) {
            assert!((a - b).abs() <= 1e-15, "{:?} vs {expected:?}", p.probs);
        }
    }

    #[test]
    fn frequency_data_validation() {
        assert_eq!(FrequencyData::new(vec![]).unwrap_err(), Error::EmptyInput);
        assert_eq!(FrequencyData::new(vec![0, 0]).unwrap_err(), Error::EmptyInput);
        assert!(matches!(FrequencyData::new(vec![1, 0]), Err(Error::InvalidData(_))));
        let (x, dropped) = FrequencyData::from_counts_trimmed(vec![0, 2, 1, 0, 0]).unwrap();
        assert_eq!(x.counts(), &[0, 2, 1]);
        assert_eq!(dropped, 2);
        assert_eq!(x.t_n(), 2);
        let x = FrequencyData::from_values(&[0, 2, 2, 1]).unwrap();
        assert_eq!(x.counts(), &[1, 1, 2]);
    }

    #[test]
    fn empirical_examples() {
        assert_probs(&empirical(&fd(&[2, 1, 1])).unwrap(), &[0.5, 0.25, 0.25]);
        assert_probs(&empirical(&fd(&[5])).unwrap(), &[1.0]);
        assert_probs(&empirical(&fd(&[1, 2])).unwrap(), &[1.0 / 3.0, 2.0 / 3.0]);
    }

    #[test]
    fn rearrangement_examples() {
        assert_probs(&rearrangement_est(&fd(&[1, 2])).unwrap(), &[2.0 / 3.0, 1.0 / 3.0]);
        assert_probs(&rearrangement_est(&fd(&[2, 2])).unwrap(), &[0.5, 0.5]);
        assert_probs(
            &rearrangement_est(&fd(&[1, 3, 2])).unwrap(),
            &[0.5, 1.0 / 3.0, 1.0 / 6.0],
        );
    }

    #[test]
    fn grenander_examples() {
        assert_probs(&grenander(&fd(&[3, 2, 1])).unwrap(), &[0.5, 1.0 / 3.0, 1.0 / 6.0]);
        assert_probs(&grenander(&fd(&[1, 3, 2])).unwrap(), &[1.0 / 3.0; 3]);
        assert_probs(&grenander(&fd(&[1, 2])).unwrap(), &[0.5, 0.5]);
    }

    #[test]
    fn minimax_examples() {
        assert_probs(&minimax(&fd(&[2, 2])).unwrap(), &[0.5, 0.5]);
        assert_probs(&minimax(&fd(&[3, 1])).unwrap(), &[2.0 / 3.0, 1.0 / 3.0]);
        for k in [1, 7, 1000] {
            assert_probs(&minimax(&fd(&[k])).unwrap(), &[1.0]);
        }
    }

    #[test]
    fn labels_round_trip() {
        for k in EstimatorKind::ALL {
            assert_eq!(k.label().parse::<EstimatorKind>().unwrap(), k);
        }
        assert!("x".parse::<EstimatorKind>().is_err());
    }

    fn freq_strategy() -> impl Strategy<Value = FrequencyData> {
        prop::collection::vec(0u64..40, 1..40).prop_map(|mut c| {
            let last = c.len() - 1;
            c[last] = c[last].max(1);
            FrequencyData::new(c).unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(2000))]
        #[test]
        fn every_estimator_returns_a_probability_vector(x in freq_strategy()) {
            for kind in EstimatorKind::ALL {
                let p = estimate(&x, kind).unwrap();
                prop_assert_eq!(p.len(), x.len());
                prop_assert!(p.probs.iter().all(|&v| (0.0..=1.0).contains(&v)), "{kind}");
                prop_assert!((p.total() - 1.0).abs() <= 1e-12, "{kind}");
            }
        }
    }
}
