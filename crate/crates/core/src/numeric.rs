//! Small numeric helpers: compensated summation and padded distances.

use serde::{Deserialize, Serialize};

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn merge(&mut self, other: &CompensatedSum) {
        self.add(other.sum);
        self.add(other.comp);
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

pub fn neumaier_sum<I: IntoIterator<Item = f64>>(it: I) -> f64 {
    let mut acc = CompensatedSum::new();
    for v in it {
        acc.add(v);
    }
    acc.value()
}

/// Loss norms used by the simulation study.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Norm {
    L1,
    L2,
    LInf,
}

impl Norm {
    pub fn label(&self) -> &'static str {
        match self {
            Norm::L1 => "1",
            Norm::L2 => "2",
            Norm::LInf => "inf",
        }
    }

    pub fn parse(s: &str) -> Option<Norm> {
        match s.trim() {
            "1" | "l1" => Some(Norm::L1),
            "2" | "l2" => Some(Norm::L2),
            "inf" | "Inf" | "linf" | "∞" => Some(Norm::LInf),
            _ => None,
        }
    }
}

/// `||a - b||` over the longer of the two lengths, the shorter padded with zeros.
pub fn padded_distance(a: &[f64], b: &[f64], norm: Norm) -> f64 {
    let len = a.len().max(b.len());
    let diff = (0..len).map(|j| {
        (a.get(j).copied().unwrap_or(0.0) - b.get(j).copied().unwrap_or(0.0)).abs()
    });
    match norm {
        Norm::L1 => neumaier_sum(diff),
        Norm::L2 => neumaier_sum(diff.map(|d| d * d)).sqrt(),
        Norm::LInf => diff.fold(0.0, f64::max),
    }
}

/// Sample mean and the standard error of the mean.
pub fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let m = values.len();
    if m == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = neumaier_sum(values.iter().copied()) / m as f64;
    if m == 1 {
        return (mean, f64::NAN);
    }
    let var = neumaier_sum(values.iter().map(|v| (v - mean) * (v - mean))) / (m - 1) as f64;
    (mean, (var / m as f64).sqrt())
}

/// Unbiased sample variance.
pub fn sample_variance(values: &[f64]) -> f64 {
    let (_, se) = mean_and_se(values);
    se * se * values.len() as f64
}
