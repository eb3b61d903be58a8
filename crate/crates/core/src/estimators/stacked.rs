use serde::{Deserialize, Serialize};

use super::{empirical_probs, loo_vectors_fast, FrequencyData, ShapeKind};
use crate::error::{Error, Result};
use crate::models::Pmf;
use crate::numeric::neumaier_sum;

/// `a_n` at or below this is treated as zero (shape fit equals the empirical one).
pub const A_N_ZERO: f64 = 1e-15;

/// Closed-form minimizer of the leave-one-out criterion
/// `CV(beta) = a_n beta^2 - 2 b_n beta + const` over `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CvBeta {
    pub beta_hat: f64,
    pub a_n: f64,
    pub b_n: f64,
}

impl CvBeta {
    fn from_coefficients(a_n: f64, b_n: f64) -> Self {
        let beta_hat = if a_n <= A_N_ZERO || b_n < 0.0 {
            0.0
        } else if b_n >= a_n {
            1.0
        } else {
            b_n / a_n
        };
        CvBeta { beta_hat, a_n, b_n }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StackDiagnostics {
    /// n = 1: leave-one-out is undefined and the empirical estimator is returned.
    pub single_observation: bool,
    /// `a_n` vanished, so the shape fit coincides with the empirical estimator.
    pub shape_equals_base: bool,
}

/// A stacked estimate together with its ingredients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StackedFit {
    pub beta_hat: f64,
    pub a_n: f64,
    pub b_n: f64,
    /// Empirical estimator.
    pub base: Pmf,
    /// Rearrangement or Grenander estimator.
    pub shape: Pmf,
    /// `beta_hat * shape + (1 - beta_hat) * base`.
    pub estimate: Pmf,
    pub kind: ShapeKind,
    pub diagnostics: StackDiagnostics,
}

struct Parts {
    base: Vec<f64>,
    shape: Vec<f64>,
    cv: CvBeta,
}

fn cv_parts(x: &FrequencyData, kind: ShapeKind) -> Result<Parts> {
    if x.n() < 2 {
        return Err(Error::InsufficientSample {
            needed: 2,
            got: x.n(),
        });
    }
    let base = empirical_probs(x);
    let shape = kind.apply(&base)?;
    let loo = loo_vectors_fast(x, kind)?;

    let a_n = neumaier_sum(base.iter().zip(&shape).map(|(p, h)| (h - p) * (h - p)));
    let loo_term = neumaier_sum(
        base.iter()
            .zip(loo.shape_loo.iter().zip(&loo.pi))
            .map(|(p, (h, pi))| p * (h - pi)),
    );
    let full_term = neumaier_sum(base.iter().zip(&shape).map(|(p, h)| p * (h - p)));
    let cv = CvBeta::from_coefficients(a_n, loo_term - full_term);
    Ok(Parts { base, shape, cv })
}

/// Least-squares leave-one-out mixture parameter and its coefficients.
pub fn cv_beta(x: &FrequencyData, kind: ShapeKind) -> Result<CvBeta> {
    cv_parts(x, kind).map(|p| p.cv)
}

/// Stacked rearrangement or stacked Grenander estimator.
///
/// With a single observation the mixture weight is undefined; the empirical
/// estimator is returned with `beta_hat = 0` and the diagnostic flag set.
pub fn stacked(x: &FrequencyData, kind: ShapeKind) -> Result<StackedFit> {
    if x.n() == 1 {
        let base = empirical_probs(x);
        let shape = kind.apply(&base)?;
        return Ok(StackedFit {
            beta_hat: 0.0,
            a_n: 0.0,
            b_n: 0.0,
            base: Pmf::from_estimate(base.clone()),
            shape: Pmf::from_estimate(shape),
            estimate: Pmf::from_estimate(base),
            kind,
            diagnostics: StackDiagnostics {
                single_observation: true,
                shape_equals_base: false,
            },
        });
    }
    let Parts { base, shape, cv } = cv_parts(x, kind)?;
    let beta = cv.beta_hat;
    let estimate = base
        .iter()
        .zip(&shape)
        .map(|(p, h)| beta * h + (1.0 - beta) * p)
        .collect();
    Ok(StackedFit {
        beta_hat: beta,
        a_n: cv.a_n,
        b_n: cv.b_n,
        base: Pmf::from_estimate(base),
        shape: Pmf::from_estimate(shape),
        estimate: Pmf::from_estimate(estimate),
        kind,
        diagnostics: StackDiagnostics {
            single_observation: false,
            shape_equals_base: cv.a_n <= A_N_ZERO,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::loo_vectors;
    use proptest::prelude::*;

    fn fd(c: &[u64]) -> FrequencyData {
        FrequencyData::new(c.to_vec()).unwrap()
    }

    #[test]
    fn cv_examples() {
        let g = cv_beta(&fd(&[1, 2]), ShapeKind::Grenander).unwrap();
        assert!((g.a_n - 1.0 / 18.0).abs() < 1e-15);
        assert!((g.b_n - 2.0 / 9.0).abs() < 1e-15);
        assert_eq!(g.beta_hat, 1.0);

        let r = cv_beta(&fd(&[1, 2]), ShapeKind::Rearrangement).unwrap();
        assert!((r.a_n - 2.0 / 9.0).abs() < 1e-15);
        assert!((r.b_n - 4.0 / 9.0).abs() < 1e-15);
        assert_eq!(r.beta_hat, 1.0);

        for kind in [ShapeKind::Grenander, ShapeKind::Rearrangement] {
            let c = cv_beta(&fd(&[3, 2, 1]), kind).unwrap();
            assert_eq!(c.a_n, 0.0);
            assert_eq!(c.beta_hat, 0.0);
        }
    }

    #[test]
    fn clamp_branches() {
        assert_eq!(CvBeta::from_coefficients(2.0, 1.0).beta_hat, 0.5);
        assert_eq!(CvBeta::from_coefficients(2.0, 0.0).beta_hat, 0.0);
        assert_eq!(CvBeta::from_coefficients(2.0, 2.0).beta_hat, 1.0);
        assert_eq!(CvBeta::from_coefficients(2.0, 5.0).beta_hat, 1.0);
        assert_eq!(CvBeta::from_coefficients(2.0, -1.0).beta_hat, 0.0);
        assert_eq!(CvBeta::from_coefficients(0.0, 1.0).beta_hat, 0.0);
        assert_eq!(CvBeta::from_coefficients(1e-16, 1.0).beta_hat, 0.0);
    }

    #[test]
    fn cv_requires_two_observations() {
        assert_eq!(
            cv_beta(&fd(&[1]), ShapeKind::Grenander).unwrap_err(),
            Error::InsufficientSample { needed: 2, got: 1 }
        );
    }

    #[test]
    fn stacked_examples() {
        let g = stacked(&fd(&[1, 2]), ShapeKind::Grenander).unwrap();
        assert_eq!(g.beta_hat, 1.0);
        assert_eq!(g.estimate.probs, vec![0.5, 0.5]);

        let g = stacked(&fd(&[3, 2, 1]), ShapeKind::Grenander).unwrap();
        assert_eq!(g.beta_hat, 0.0);
        assert!(g.diagnostics.shape_equals_base);
        assert_eq!(g.estimate.probs, vec![0.5, 2.0 / 6.0, 1.0 / 6.0]);

        let r = stacked(&fd(&[1, 2]), ShapeKind::Rearrangement).unwrap();
        assert_eq!(r.beta_hat, 1.0);
        assert_eq!(r.estimate.probs, vec![2.0 / 3.0, 1.0 / 3.0]);
    }

    #[test]
    fn single_observation_degrades_to_empirical() {
        let f = stacked(&fd(&[0, 0, 1]), ShapeKind::Grenander).unwrap();
        assert!(f.diagnostics.single_observation);
        assert_eq!(f.beta_hat, 0.0);
        assert_eq!(f.estimate.probs, vec![0.0, 0.0, 1.0]);
    }

    fn freq_strategy() -> impl Strategy<Value = FrequencyData> {
        prop::collection::vec(0u64..30, 1..25).prop_map(|mut c| {
            let last = c.len() - 1;
            c[last] = c[last].max(2);
            FrequencyData::new(c).unwrap()
        })
    }

    proptest! {
        #[test]
        fn fit_invariants(x in freq_strategy()) {
            for kind in [ShapeKind::Grenander, ShapeKind::Rearrangement] {
                let f = stacked(&x, kind).unwrap();
                prop_assert!((0.0..=1.0).contains(&f.beta_hat));
                prop_assert!(f.a_n >= 0.0);
                for j in 0..x.len() {
                    let want = f.beta_hat * f.shape.probs[j] + (1.0 - f.beta_hat) * f.base.probs[j];
                    prop_assert_eq!(f.estimate.probs[j], want);
                    prop_assert!(f.estimate.probs[j] >= 0.0);
                }
                prop_assert!((f.estimate.total() - 1.0).abs() <= 1e-12);
            }
        }

        #[test]
        fn leave_one_out_bounds(x in freq_strategy()) {
            let n = x.n() as f64;
            let inflate = n / (n - 1.0);
            let base = empirical_probs(&x);
            for kind in [ShapeKind::Grenander, ShapeKind::Rearrangement] {
                let loo = loo_vectors(&x, kind).unwrap();
                let shape = kind.apply(&base).unwrap();
                for j in 0..x.len() {
                    prop_assert!(loo.pi[j] <= base[j]);
                    prop_assert!(loo.shape_loo[j] <= inflate * shape[j] + 1e-15);
                }
            }
        }
    }
}
