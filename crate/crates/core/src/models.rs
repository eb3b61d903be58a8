//! True-distribution families used by the simulation study: evaluation,
//! truncation of infinite supports, and seeded inversion sampling.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::estimators::FrequencyData;

/// Truncation level used whenever an infinite support has to be materialized.
pub const DEFAULT_TRUNCATION: f64 = 1e-12;

const WEIGHT_TOL: f64 = 1e-12;

/// Declarative description of a p.m.f. on the nonnegative integers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ModelSpec {
    /// Uniform on `{0, ..., s}`.
    UniformRange(usize),
    /// `p_j = (1 - theta) theta^j`.
    Geometric(f64),
    /// `p_j` proportional to `s + 1 - j` on `{0, ..., s}`.
    TriangularDecreasing(usize),
    /// `p_j` proportional to `j + 1` on `{0, ..., s}`.
    TriangularIncreasing(usize),
    /// Number of successes before the `r`-th failure, success probability `theta`.
    NegativeBinomial { r: u32, theta: f64 },
    Poisson(f64),
    Mixture(Vec<(f64, ModelSpec)>),
}

impl ModelSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            ModelSpec::UniformRange(_)
            | ModelSpec::TriangularDecreasing(_)
            | ModelSpec::TriangularIncreasing(_) => Ok(()),
            ModelSpec::Geometric(theta) => check_open_unit("geometric theta", *theta),
            ModelSpec::NegativeBinomial { r, theta } => {
                if *r == 0 {
                    return Err(Error::ParameterDomain(
                        "negative binomial r must be >= 1".into(),
                    ));
                }
                check_open_unit("negative binomial theta", *theta)
            }
            ModelSpec::Poisson(lambda) => {
                if lambda.is_finite() && *lambda > 0.0 {
                    Ok(())
                } else {
                    Err(Error::ParameterDomain(format!(
                        "poisson lambda must be > 0, got {lambda}"
                    )))
                }
            }
            ModelSpec::Mixture(parts) => {
                if parts.is_empty() {
                    return Err(Error::ParameterDomain("mixture has no components".into()));
                }
                let mut total = 0.0;
                for (w, m) in parts {
                    if !(w.is_finite() && *w > 0.0) {
                        return Err(Error::ParameterDomain(format!(
                            "mixture weight must be > 0, got {w}"
                        )));
                    }
                    total += w;
                    m.validate()?;
                }
                if (total - 1.0).abs() > WEIGHT_TOL {
                    return Err(Error::ParameterDomain(format!(
                        "mixture weights sum to {total}, expected 1"
                    )));
                }
                Ok(())
            }
        }
    }

    /// Last index of the support, or `None` if the support is infinite.
    pub fn support_end(&self) -> Option<usize> {
        match self {
            ModelSpec::UniformRange(s)
            | ModelSpec::TriangularDecreasing(s)
            | ModelSpec::TriangularIncreasing(s) => Some(*s),
            ModelSpec::Geometric(_)
            | ModelSpec::NegativeBinomial { .. }
            | ModelSpec::Poisson(_) => None,
            ModelSpec::Mixture(parts) => parts
                .iter()
                .map(|(_, m)| m.support_end())
                .try_fold(0usize, |acc, e| e.map(|e| acc.max(e))),
        }
    }

    fn eval_unchecked(&self, j: usize) -> f64 {
        match self {
            ModelSpec::UniformRange(s) => {
                if j <= *s {
                    1.0 / (*s as f64 + 1.0)
                } else {
                    0.0
                }
            }
            ModelSpec::Geometric(theta) => (1.0 - theta) * theta.powi(j as i32),
            ModelSpec::TriangularDecreasing(s) => {
                if j <= *s {
                    (*s + 1 - j) as f64 / triangle_total(*s)
                } else {
                    0.0
                }
            }
            ModelSpec::TriangularIncreasing(s) => {
                if j <= *s {
                    (j + 1) as f64 / triangle_total(*s)
                } else {
                    0.0
                }
            }
            ModelSpec::NegativeBinomial { r, theta } => {
                let r = *r as f64;
                let jf = j as f64;
                let ln_choose = ln_gamma(jf + r) - ln_gamma(jf + 1.0) - ln_gamma(r);
                (ln_choose + jf * theta.ln() + r * (1.0 - theta).ln()).exp()
            }
            ModelSpec::Poisson(lambda) => {
                let jf = j as f64;
                (jf * lambda.ln() - lambda - ln_gamma(jf + 1.0)).exp()
            }
            ModelSpec::Mixture(parts) => parts.iter().map(|(w, m)| w * m.eval_unchecked(j)).sum(),
        }
    }

    /// `P[X >= len]`.
    fn tail_unchecked(&self, len: usize) -> f64 {
        match self {
            ModelSpec::UniformRange(s) => (*s + 1).saturating_sub(len) as f64 / (*s as f64 + 1.0),
            ModelSpec::Geometric(theta) => theta.powi(len as i32),
            ModelSpec::TriangularDecreasing(s) => {
                let m = (*s + 1).saturating_sub(len) as f64;
                m * (m + 1.0) / 2.0 / triangle_total(*s)
            }
            ModelSpec::TriangularIncreasing(s) => {
                if len > *s {
                    0.0
                } else {
                    let head = (len * (len + 1) / 2) as f64;
                    (triangle_total(*s) - head) / triangle_total(*s)
                }
            }
            ModelSpec::NegativeBinomial { .. } | ModelSpec::Poisson(_) => {
                let mode = self.mode_estimate();
                if len <= mode + 1 {
                    let head: f64 = (0..len).map(|j| self.eval_unchecked(j)).sum();
                    (1.0 - head).max(0.0)
                } else {
                    // past the mode the terms decrease, sum forward
                    let mut acc = 0.0;
                    let mut j = len;
                    loop {
                        let t = self.eval_unchecked(j);
                        acc += t;
                        if t <= acc * 1e-18 || t == 0.0 {
                            break;
                        }
                        j += 1;
                    }
                    acc
                }
            }
            ModelSpec::Mixture(parts) => parts.iter().map(|(w, m)| w * m.tail_unchecked(len)).sum(),
        }
    }

    fn mode_estimate(&self) -> usize {
        match self {
            ModelSpec::Poisson(lambda) => lambda.floor() as usize,
            ModelSpec::NegativeBinomial { r, theta } => {
                if *r > 1 {
                    ((*r as f64 - 1.0) * theta / (1.0 - theta)).floor() as usize
                } else {
                    0
                }
            }
            _ => 0,
        }
    }
}

fn triangle_total(s: usize) -> f64 {
    ((s + 1) * (s + 2) / 2) as f64
}

fn check_open_unit(what: &str, v: f64) -> Result<()> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(Error::ParameterDomain(format!("{what} must lie in (0,1), got {v}")))
    }
}

/// A finite probability vector plus the mass discarded by truncation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pmf {
    pub probs: Vec<f64>,
    pub tail_mass: f64,
}

impl Pmf {
    /// Builds a pmf after checking nonnegativity and total mass within 1e-9.
    pub fn new(probs: Vec<f64>, tail_mass: f64) -> Result<Self> {
        if probs.iter().any(|p| !p.is_finite() || *p < 0.0) || !(tail_mass >= 0.0) {
            return Err(Error::InvalidPmf("negative or non-finite entry".into()));
        }
        let total = crate::numeric::neumaier_sum(probs.iter().copied()) + tail_mass;
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidPmf(format!("total mass {total} != 1")));
        }
        Ok(Pmf { probs, tail_mass })
    }

    /// Wraps an estimator output; estimators produce exact probability vectors.
    pub(crate) fn from_estimate(probs: Vec<f64>) -> Self {
        Pmf { probs, tail_mass: 0.0 }
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// `p_j`, zero beyond the stored length.
    pub fn get(&self, j: usize) -> f64 {
        self.probs.get(j).copied().unwrap_or(0.0)
    }

    pub fn total(&self) -> f64 {
        crate::numeric::neumaier_sum(self.probs.iter().copied())
    }

    pub fn is_nonincreasing(&self, tol: f64) -> bool {
        self.probs.windows(2).all(|w| w[1] <= w[0] + tol)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.probs
    }
}

/// `p_j` for the given model.
pub fn pmf_eval(model: &ModelSpec, j: usize) -> Result<f64> {
    model.validate()?;
    Ok(model.eval_unchecked(j))
}

/// Shortest prefix of the p.m.f. whose discarded tail is at most `epsilon`.
///
/// Finite-support models are returned exactly with zero tail mass.
pub fn pmf_truncate(model: &ModelSpec, epsilon: f64) -> Result<Pmf> {
    model.validate()?;
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::ParameterDomain(format!(
            "truncation epsilon must lie in (0,1), got {epsilon}"
        )));
    }
    if let Some(end) = model.support_end() {
        let probs = (0..=end).map(|j| model.eval_unchecked(j)).collect();
        return Ok(Pmf { probs, tail_mass: 0.0 });
    }
    let mut len = 1;
    let mut tail = model.tail_unchecked(len);
    while tail > epsilon {
        len += 1;
        tail = model.tail_unchecked(len);
    }
    let probs = (0..len).map(|j| model.eval_unchecked(j)).collect();
    Ok(Pmf { probs, tail_mass: tail })
}

/// Inversion sampler over the truncated cumulative distribution.
#[derive(Debug, Clone)]
pub struct Sampler {
    cdf: Vec<f64>,
}

impl Sampler {
    pub fn new(model: &ModelSpec) -> Result<Self> {
        Ok(Self::from_pmf(&pmf_truncate(model, DEFAULT_TRUNCATION)?))
    }

    pub fn from_pmf(pmf: &Pmf) -> Self {
        let mut acc = 0.0;
        let cdf = pmf
            .probs
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        Sampler { cdf }
    }

    /// One draw. Uniforms landing in the truncated tail map to the last index.
    #[inline]
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random();
        let idx = self.cdf.partition_point(|&c| c <= u);
        idx.min(self.cdf.len() - 1)
    }

    /// Frequency data of `n` i.i.d. draws.
    pub fn sample_counts<R: Rng + ?Sized>(&self, n: u64, rng: &mut R) -> Result<FrequencyData> {
        if n == 0 {
            return Err(Error::EmptyInput);
        }
        let mut counts = vec![0u64; self.cdf.len()];
        for _ in 0..n {
            counts[self.draw(rng)] += 1;
        }
        FrequencyData::from_counts_trimmed(counts).map(|(x, _)| x)
    }
}

/// Draws `n` i.i.d. values from `model` and tabulates them.
pub fn sample(model: &ModelSpec, n: u64, seed: u64) -> Result<FrequencyData> {
    let sampler = Sampler::new(model)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sampler.sample_counts(n, &mut rng)
}

fn uniform_mix(parts: &[(f64, usize)]) -> ModelSpec {
    ModelSpec::Mixture(
        parts
            .iter()
            .map(|&(w, s)| (w, ModelSpec::UniformRange(s)))
            .collect(),
    )
}

/// The seven models of the simulation study, keyed `M1`..`M7`.
pub fn builtin_models() -> BTreeMap<&'static str, ModelSpec> {
    let mut m = BTreeMap::new();
    m.insert("M1", ModelSpec::UniformRange(11));
    m.insert("M2", uniform_mix(&[(0.15, 3), (0.1, 7), (0.75, 11)]));
    m.insert("M3", uniform_mix(&[(0.25, 1), (0.2, 3), (0.15, 5), (0.4, 7)]));
    m.insert("M4", ModelSpec::Geometric(0.25));
    m.insert("M5", ModelSpec::TriangularIncreasing(11));
    m.insert("M6", ModelSpec::NegativeBinomial { r: 7, theta: 0.4 });
    m.insert(
        "M7",
        ModelSpec::Mixture(vec![
            (3.0 / 8.0, ModelSpec::Poisson(2.0)),
            (5.0 / 8.0, ModelSpec::Poisson(15.0)),
        ]),
    );
    m
}

impl fmt::Display for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelSpec::UniformRange(s) => write!(f, "uniform:{s}"),
            ModelSpec::Geometric(t) => write!(f, "geom:{t}"),
            ModelSpec::TriangularDecreasing(s) => write!(f, "tri-dec:{s}"),
            ModelSpec::TriangularIncreasing(s) => write!(f, "tri-inc:{s}"),
            ModelSpec::NegativeBinomial { r, theta } => write!(f, "nbin:{r},{theta}"),
            ModelSpec::Poisson(l) => write!(f, "pois:{l}"),
            ModelSpec::Mixture(parts) => {
                f.write_str("mix:")?;
                for (i, (w, m)) in parts.iter().enumerate() {
                    if i > 0 {
                        f.write_str("+")?;
                    }
                    if matches!(m, ModelSpec::Mixture(_)) {
                        write!(f, "{w}*({m})")?;
                    } else {
                        write!(f, "{w}*{m}")?;
                    }
                }
                Ok(())
            }
        }
    }
}

fn parse_real(s: &str, whole: &str) -> Result<f64> {
    let s = s.trim();
    let v = if let Some((a, b)) = s.split_once('/') {
        let a: f64 = a.trim().parse().map_err(|_| Error::UnknownModel(whole.into()))?;
        let b: f64 = b.trim().parse().map_err(|_| Error::UnknownModel(whole.into()))?;
        a / b
    } else {
        s.parse().map_err(|_| Error::UnknownModel(whole.into()))?
    };
    Ok(v)
}

fn parse_int<T: FromStr>(s: &str, whole: &str) -> Result<T> {
    s.trim().parse().map_err(|_| Error::UnknownModel(whole.into()))
}

/// Splits on `sep` at parenthesis depth zero.
fn split_top_level(s: &str, sep: char) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            c if c == sep && depth == 0 => {
                out.push(&s[start..i]);
                start = i + c.len_utf8();
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}

impl FromStr for ModelSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if let Some(m) = builtin_models().get(t) {
            return Ok(m.clone());
        }
        if t.starts_with('(') && t.ends_with(')') {
            return t[1..t.len() - 1].parse();
        }
        let (kind, args) = t.split_once(':').ok_or_else(|| Error::UnknownModel(s.into()))?;
        let spec = match kind.trim() {
            "uniform" => ModelSpec::UniformRange(parse_int(args, s)?),
            "geom" => ModelSpec::Geometric(parse_real(args, s)?),
            "tri-dec" => ModelSpec::TriangularDecreasing(parse_int(args, s)?),
            "tri-inc" => ModelSpec::TriangularIncreasing(parse_int(args, s)?),
            "nbin" => {
                let (r, theta) = args.split_once(',').ok_or_else(|| Error::UnknownModel(s.into()))?;
                ModelSpec::NegativeBinomial {
                    r: parse_int(r, s)?,
                    theta: parse_real(theta, s)?,
                }
            }
            "pois" => ModelSpec::Poisson(parse_real(args, s)?),
            "mix" => {
                let mut parts = Vec::new();
                for term in split_top_level(args, '+') {
                    let (w, m) = term.split_once('*').ok_or_else(|| Error::UnknownModel(s.into()))?;
                    parts.push((parse_real(w, s)?, m.trim().parse()?));
                }
                ModelSpec::Mixture(parts)
            }
            _ => return Err(Error::UnknownModel(s.into())),
        };
        spec.validate()?;
        Ok(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn eval_examples() {
        let m = builtin_models();
        assert!(close(pmf_eval(&ModelSpec::UniformRange(11), 0).unwrap(), 1.0 / 12.0, 1e-15));
        assert!(close(pmf_eval(&ModelSpec::Geometric(0.25), 0).unwrap(), 0.75, 1e-15));
        assert!(close(pmf_eval(&m["M2"], 0).unwrap(), 0.1125, 1e-15));
        assert!(close(
            pmf_eval(&ModelSpec::TriangularDecreasing(11), 0).unwrap(),
            12.0 / 78.0,
            1e-15
        ));
        let nb = ModelSpec::NegativeBinomial { r: 7, theta: 0.4 };
        assert!(close(pmf_eval(&nb, 0).unwrap(), 0.6f64.powi(7), 1e-14));
    }

    #[test]
    fn negative_binomial_matches_direct_formula() {
        // C(j+r-1, j) theta^j (1-theta)^r by integer binomials
        let (r, theta) = (7u32, 0.4f64);
        let nb = ModelSpec::NegativeBinomial { r, theta };
        let mut total = 0.0;
        for j in 0..200u64 {
            let mut c = 1.0f64;
            for k in 1..=j {
                c *= (k + r as u64 - 1) as f64 / k as f64;
            }
            let direct = c * theta.powi(j as i32) * (1.0 - theta).powi(r as i32);
            let v = pmf_eval(&nb, j as usize).unwrap();
            assert!((v - direct).abs() <= 1e-12 * direct.max(1e-300) + 1e-300, "j={j}");
            total += direct;
        }
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn parameter_domain_errors() {
        assert!(matches!(
            pmf_eval(&ModelSpec::Geometric(1.0), 0),
            Err(Error::ParameterDomain(_))
        ));
        assert!(matches!(
            pmf_eval(&ModelSpec::Poisson(0.0), 0),
            Err(Error::ParameterDomain(_))
        ));
        let bad = ModelSpec::Mixture(vec![(0.5, ModelSpec::UniformRange(1))]);
        assert!(bad.validate().is_err());
    }

    #[test]
    fn truncation_examples() {
        let u = pmf_truncate(&ModelSpec::UniformRange(3), 0.1).unwrap();
        assert_eq!(u.probs, vec![0.25; 4]);
        assert_eq!(u.tail_mass, 0.0);

        let g = pmf_truncate(&ModelSpec::Geometric(0.25), 1e-12).unwrap();
        assert_eq!(g.len(), 20);
        assert!(g.tail_mass <= 1e-12);

        let m7 = pmf_truncate(&builtin_models()["M7"], 1e-12).unwrap();
        assert!(m7.tail_mass <= 1e-12);
        assert!(m7.total() >= 1.0 - 1e-12);
    }

    #[test]
    fn builtin_models_are_normalized_and_shaped() {
        for (name, m) in builtin_models() {
            for eps in [1e-3, 1e-8, 1e-12] {
                let p = pmf_truncate(&m, eps).unwrap();
                assert!(p.probs.iter().all(|&v| v >= 0.0));
                assert!((p.total() + p.tail_mass - 1.0).abs() <= 1e-9, "{name}");
            }
            let p = pmf_truncate(&m, 1e-12).unwrap();
            let decreasing = matches!(name, "M1" | "M2" | "M3" | "M4");
            assert_eq!(p.is_nonincreasing(1e-12), decreasing, "{name}");
        }
    }

    #[test]
    fn sample_edge_cases() {
        for (_, m) in builtin_models() {
            let x = sample(&m, 1, 3).unwrap();
            assert_eq!(x.n(), 1);
            assert_eq!(x.counts().iter().filter(|&&c| c == 1).count(), 1);
        }
        let x = sample(&ModelSpec::UniformRange(0), 50, 9).unwrap();
        assert_eq!(x.counts(), &[50]);
        assert_eq!(sample(&ModelSpec::UniformRange(3), 0, 1), Err(Error::EmptyInput));
    }

    #[test]
    fn sample_is_deterministic() {
        let m = &builtin_models()["M7"];
        assert_eq!(sample(m, 500, 42).unwrap(), sample(m, 500, 42).unwrap());
        assert_ne!(sample(m, 500, 42).unwrap(), sample(m, 500, 43).unwrap());
    }

    #[test]
    fn geometric_frequencies_converge() {
        let n = 1_000_000u64;
        let x = sample(&ModelSpec::Geometric(0.25), n, 2024).unwrap();
        let f0 = x.counts()[0] as f64 / n as f64;
        assert!((f0 - 0.75).abs() <= 0.002, "f0 = {f0}");
    }

    #[test]
    fn parse_model_strings() {
        assert_eq!("M4".parse::<ModelSpec>().unwrap(), ModelSpec::Geometric(0.25));
        assert_eq!(
            "nbin:7,0.4".parse::<ModelSpec>().unwrap(),
            ModelSpec::NegativeBinomial { r: 7, theta: 0.4 }
        );
        let m: ModelSpec = "mix:3/8*pois:2+5/8*pois:15".parse().unwrap();
        assert_eq!(m, builtin_models()["M7"]);
        let nested: ModelSpec = "mix:0.5*(mix:0.5*uniform:1+0.5*uniform:3)+0.5*geom:0.5"
            .parse()
            .unwrap();
        assert_eq!(nested.to_string().parse::<ModelSpec>().unwrap(), nested);
        assert!(matches!("M9".parse::<ModelSpec>(), Err(Error::UnknownModel(_))));
        assert!(matches!("geom:1.5".parse::<ModelSpec>(), Err(Error::ParameterDomain(_))));
    }
}
