//! Independent reference implementations used only by the tests.
#![allow(dead_code)]

/// Exhaustive search over all contiguous block partitions: the feasible
/// (nonincreasing block means) partition with the smallest squared error.
/// Exponential in `y.len()`; meant for lengths up to about 12.
pub fn partition_oracle(y: &[f64]) -> Vec<f64> {
    let d = y.len();
    assert!(d >= 1 && d <= 16);
    let mut best: Option<(f64, Vec<f64>)> = None;
    for mask in 0u32..(1 << (d - 1)) {
        // bit i set: a block ends after index i
        let mut fit = vec![0.0; d];
        let mut means = Vec::new();
        let mut start = 0;
        for end in 0..d {
            if end == d - 1 || mask & (1 << end) != 0 {
                let m = y[start..=end].iter().sum::<f64>() / (end + 1 - start) as f64;
                fit[start..=end].fill(m);
                means.push(m);
                start = end + 1;
            }
        }
        if means.windows(2).any(|w| w[0] < w[1]) {
            continue;
        }
        let sse: f64 = y.iter().zip(&fit).map(|(a, b)| (a - b) * (a - b)).sum();
        if best.as_ref().map_or(true, |(s, _)| sse < *s) {
            best = Some((sse, fit));
        }
    }
    best.expect("the single-block partition is always feasible").1
}

/// Maximum upper sets: repeatedly take the largest end index whose block,
/// starting right after the previous one, has the maximal mean. Means are
/// compared exactly on integer inputs. Returns the fit and the inclusive
/// block ends.
pub fn max_upper_sets_exact(x: &[u64]) -> (Vec<(i128, i128)>, Vec<usize>) {
    let mut levels = Vec::new();
    let mut ends = Vec::new();
    let mut prev: isize = -1;
    while prev + 1 < x.len() as isize {
        let start = (prev + 1) as usize;
        let (mut best_end, mut best) = (start, (x[start] as i128, 1i128));
        let mut sum = 0i128;
        for m in start..x.len() {
            sum += x[m] as i128;
            let cand = (sum, (m + 1 - start) as i128);
            // cand.mean >= best.mean, ties resolved towards the larger index
            if cand.0 * best.1 >= best.0 * cand.1 {
                best = cand;
                best_end = m;
            }
        }
        for _ in start..=best_end {
            levels.push(best);
        }
        ends.push(best_end);
        prev = best_end as isize;
    }
    (levels, ends)
}

/// Floating-point maximum upper sets on arbitrary reals.
pub fn max_upper_sets(y: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(y.len());
    let mut start = 0;
    while start < y.len() {
        let (mut best_end, mut best) = (start, f64::NEG_INFINITY);
        let mut sum = 0.0;
        for m in start..y.len() {
            sum += y[m];
            let mean = sum / (m + 1 - start) as f64;
            if mean >= best {
                best = mean;
                best_end = m;
            }
        }
        out.extend(std::iter::repeat(best).take(best_end + 1 - start));
        start = best_end + 1;
    }
    out
}

pub fn sort_desc(y: &[f64]) -> Vec<f64> {
    let mut v = y.to_vec();
    v.sort_by(|a, b| b.partial_cmp(a).unwrap());
    v
}

#[derive(Clone, Copy, Debug)]
pub enum OracleShape {
    Sort,
    Isotonic,
}

impl OracleShape {
    pub fn fit(self, y: &[f64]) -> Vec<f64> {
        match self {
            OracleShape::Sort => sort_desc(y),
            OracleShape::Isotonic => max_upper_sets(y),
        }
    }
}

/// Leave-one-out least-squares criterion for the stacked estimator, evaluated
/// from its definition: the squared norm of the full fit minus twice the
/// empirical average of the leave-one-out fits at the left-out point.
pub fn direct_cv(counts: &[u64], shape: OracleShape, beta: f64) -> f64 {
    let n: u64 = counts.iter().sum();
    let nf = n as f64;
    let p: Vec<f64> = counts.iter().map(|&c| c as f64 / nf).collect();
    let h = shape.fit(&p);
    let phi_sq: f64 = p.iter().zip(&h).map(|(p, h)| (beta * h + (1.0 - beta) * p).powi(2)).sum();
    let mut cross = 0.0;
    for (j, &c) in counts.iter().enumerate() {
        if c == 0 {
            continue;
        }
        let mut loo: Vec<f64> = counts.iter().map(|&c| c as f64).collect();
        loo[j] -= 1.0;
        let p_loo: Vec<f64> = loo.iter().map(|v| v / (nf - 1.0)).collect();
        let h_loo = shape.fit(&p_loo);
        cross += p[j] * (beta * h_loo[j] + (1.0 - beta) * p_loo[j]);
    }
    phi_sq - 2.0 * cross
}
