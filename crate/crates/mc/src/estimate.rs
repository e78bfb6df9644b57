use std::collections::BTreeMap;

use faer::c64;
use masterfield_core::{word_moment, EngineConfig, LassoWord, WordMomentQuery};
use rayon::prelude::*;

use crate::brownian::Workspace;
use crate::holonomy::{areas_of, assemble, draw_lassos, normalized_traces};
use crate::{McConfig, McError};

/// Monte Carlo estimate of `E[tr_N(h^k)]`.
#[derive(Debug, Clone, PartialEq)]
pub struct McEstimate {
    /// Mean of `Re tr_N(h^k)`.
    pub mean: f64,
    /// Sample standard deviation over `√samples`; `None` for a single sample.
    pub stderr: Option<f64>,
    /// Mean of `Im tr_N(h^k)`; zero in the limit, kept as a sanity check.
    pub imag_mean: f64,
    pub imag_stderr: Option<f64>,
    pub samples: usize,
    pub n: usize,
    pub k: i64,
    /// Integrator steps per sample, over all lassos.
    pub used_steps: usize,
}

impl McEstimate {
    /// `(mean - target) / stderr`, when a positive standard error exists.
    pub fn z_score(&self, target: f64) -> Option<f64> {
        match self.stderr {
            Some(se) if se > 0.0 => Some((self.mean - target) / se),
            _ => None,
        }
    }

    /// Whether `|mean - target| ≤ sigmas · stderr + slack`.
    pub fn within(&self, target: f64, sigmas: f64, slack: f64) -> bool {
        (self.mean - target).abs() <= sigmas * self.stderr.unwrap_or(0.0) + slack
    }
}

/// Neumaier-compensated sum in iteration order.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0;
    let mut carry = 0.0;
    for v in values {
        let t = sum + v;
        carry += if sum.abs() >= v.abs() {
            (sum - t) + v
        } else {
            (v - t) + sum
        };
        sum = t;
    }
    sum + carry
}

/// Mean and standard error of the mean.
pub fn mean_and_stderr(values: &[f64]) -> (f64, Option<f64>) {
    let count = values.len() as f64;
    let mean = compensated_sum(values.iter().copied()) / count;
    if values.len() < 2 {
        return (mean, None);
    }
    let ss = compensated_sum(values.iter().map(|v| (v - mean) * (v - mean)));
    (mean, Some((ss / (count - 1.0) / count).sqrt()))
}

/// Runs `per_sample` over all sample indices in parallel and returns the
/// results in index order.
fn run_samples<T, F>(config: &McConfig, per_sample: F) -> Result<Vec<T>, McError>
where
    T: Send,
    F: Fn(&mut Workspace, u64) -> Result<T, McError> + Sync,
{
    (0..config.samples as u64)
        .into_par_iter()
        .map_init(|| Workspace::new(config.n), |ws, i| per_sample(ws, i))
        .collect()
}

fn steps_per_sample(areas: &BTreeMap<masterfield_core::LassoKey, f64>, config: &McConfig) -> usize {
    areas.values().map(|&a| config.steps_for(a)).sum()
}

/// Estimates `E[tr_N(h^k)]` for several `k` from one set of samples.
pub fn estimate_trace_moments(
    word: &LassoWord,
    ks: &[i64],
    config: &McConfig,
) -> Result<Vec<McEstimate>, McError> {
    config.validate()?;
    let areas = areas_of(word)?;
    let used_steps = steps_per_sample(&areas, config);
    let traces: Vec<Vec<c64>> = if ks.iter().all(|&k| k == 0) {
        vec![vec![c64::new(1.0, 0.0); ks.len()]; config.samples]
    } else {
        run_samples(config, |ws, i| {
            let draws = draw_lassos(&areas, config, i, ws)?;
            let h = assemble(word, &draws, config.n)?;
            Ok(normalized_traces(&h, ks))
        })?
    };
    Ok(ks
        .iter()
        .enumerate()
        .map(|(slot, &k)| {
            let re: Vec<f64> = traces.iter().map(|t| t[slot].re).collect();
            let im: Vec<f64> = traces.iter().map(|t| t[slot].im).collect();
            let (mean, stderr) = mean_and_stderr(&re);
            let (imag_mean, imag_stderr) = mean_and_stderr(&im);
            McEstimate {
                mean,
                stderr,
                imag_mean,
                imag_stderr,
                samples: config.samples,
                n: config.n,
                k,
                used_steps,
            }
        })
        .collect())
}

/// Estimates `E[tr_N(h^k)]` where `h` is the holonomy of `word`.
pub fn estimate_trace_moment(
    word: &LassoWord,
    k: i64,
    config: &McConfig,
) -> Result<McEstimate, McError> {
    Ok(estimate_trace_moments(word, &[k], config)?.remove(0))
}

/// Sample covariance of `Re tr_N(h₁)` and `Re tr_N(h₂)`, with both holonomies
/// built from the same lasso draws in every sample.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceEstimate {
    pub covariance: f64,
    /// Standard error of the covariance from the spread of the centred
    /// products; `None` below two samples.
    pub stderr: Option<f64>,
    pub first: McEstimate,
    pub second: McEstimate,
}

pub fn estimate_covariance(
    first: &LassoWord,
    second: &LassoWord,
    config: &McConfig,
) -> Result<CovarianceEstimate, McError> {
    config.validate()?;
    let a1 = areas_of(first)?;
    let a2 = areas_of(second)?;
    let mut areas = a1.clone();
    areas.extend(a2.iter().map(|(&k, &v)| (k, v)));
    let pairs: Vec<(c64, c64)> = run_samples(config, |ws, i| {
        let draws = draw_lassos(&areas, config, i, ws)?;
        let h1 = assemble(first, &draws, config.n)?;
        let h2 = assemble(second, &draws, config.n)?;
        Ok((normalized_traces(&h1, &[1])[0], normalized_traces(&h2, &[1])[0]))
    })?;
    let marginal = |values: Vec<c64>, steps: usize| {
        let re: Vec<f64> = values.iter().map(|z| z.re).collect();
        let im: Vec<f64> = values.iter().map(|z| z.im).collect();
        let (mean, stderr) = mean_and_stderr(&re);
        let (imag_mean, imag_stderr) = mean_and_stderr(&im);
        McEstimate {
            mean,
            stderr,
            imag_mean,
            imag_stderr,
            samples: config.samples,
            n: config.n,
            k: 1,
            used_steps: steps,
        }
    };
    let first_est = marginal(pairs.iter().map(|p| p.0).collect(), steps_per_sample(&a1, config));
    let second_est = marginal(pairs.iter().map(|p| p.1).collect(), steps_per_sample(&a2, config));
    let products: Vec<f64> = pairs
        .iter()
        .map(|(x, y)| (x.re - first_est.mean) * (y.re - second_est.mean))
        .collect();
    let count = products.len() as f64;
    let (covariance, stderr) = if products.len() < 2 {
        (0.0, None)
    } else {
        let (mean_product, se) = mean_and_stderr(&products);
        (mean_product * count / (count - 1.0), se)
    };
    Ok(CovarianceEstimate {
        covariance,
        stderr,
        first: first_est,
        second: second_est,
    })
}

/// One row of a convergence scan.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanRow {
    pub n: usize,
    pub estimate: McEstimate,
    pub free_value: f64,
    pub abs_dev: f64,
}

/// Monte Carlo estimates at each matrix size in `ns` next to the infinite-N
/// value.
pub fn convergence_scan(
    word: &LassoWord,
    k: i64,
    ns: &[usize],
    config: &McConfig,
    engine: &EngineConfig,
) -> Result<Vec<ScanRow>, McError> {
    if ns.is_empty() {
        return Err(McError::InvalidConfig("no matrix sizes given".into()));
    }
    let free_value = word_moment(&WordMomentQuery::new(word.clone(), k), engine)?;
    ns.iter()
        .map(|&n| {
            let estimate = estimate_trace_moment(word, k, &McConfig { n, ..*config })?;
            let abs_dev = (estimate.mean - free_value).abs();
            Ok(ScanRow {
                n,
                estimate,
                free_value,
                abs_dev,
            })
        })
        .collect()
}
