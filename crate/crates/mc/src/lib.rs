//! Finite-N Monte Carlo for Wilson loops on polar grids.
//!
//! Each minimal lasso gets an independent U(N) holonomy, sampled as the
//! endpoint of unitary Brownian motion run for a time equal to the lasso's
//! area, with clock normalized so that `E[tr_N(W_t²)] = t` for the driving
//! Hermitian Brownian motion. Loop holonomies are products along the lasso
//! word, and `E[tr_N(h^k)]` is averaged over samples. As `N` grows the
//! estimates approach the exact values from `masterfield_core`.
//!
//! Every lasso in every sample draws from its own random stream keyed by
//! `(seed, lasso, sample)`, and estimators are reduced in sample order, so
//! results are bit-identical for a fixed seed however the samples are
//! scheduled across threads.

mod brownian;
mod estimate;
mod gue;
mod holonomy;

pub use brownian::{unitarity_defect, unitary_bm_endpoint, Workspace};
pub use estimate::{
    compensated_sum, convergence_scan, estimate_covariance, estimate_trace_moment,
    estimate_trace_moments, mean_and_stderr, CovarianceEstimate, McEstimate, ScanRow,
};
pub use gue::sample_gue;
pub use holonomy::{lasso_stream, normalized_traces, sample_word_holonomy};

use masterfield_core::{EngineError, LassoKey};
use thiserror::Error;

pub const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum McError {
    #[error("invalid Monte Carlo configuration: {0}")]
    InvalidConfig(String),
    #[error("lasso {0} has no area")]
    MissingArea(LassoKey),
    #[error("eigendecomposition did not converge")]
    NoConvergence,
    #[error(transparent)]
    Engine(#[from] EngineError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McConfig {
    /// Matrix size.
    pub n: usize,
    pub samples: usize,
    pub steps_per_unit_area: usize,
    pub seed: u64,
}

impl Default for McConfig {
    fn default() -> Self {
        Self {
            n: 128,
            samples: 2000,
            steps_per_unit_area: 100,
            seed: DEFAULT_SEED,
        }
    }
}

impl McConfig {
    pub fn validate(&self) -> Result<(), McError> {
        if self.n < 2 {
            return Err(McError::InvalidConfig(format!("N must be at least 2, got {}", self.n)));
        }
        if self.samples == 0 {
            return Err(McError::InvalidConfig("samples must be positive".into()));
        }
        if self.steps_per_unit_area == 0 {
            return Err(McError::InvalidConfig("steps per unit area must be positive".into()));
        }
        Ok(())
    }

    /// Integrator steps for a lasso of area `t`: `⌈t · steps_per_unit_area⌉`,
    /// at least one unless `t = 0`.
    pub fn steps_for(&self, t: f64) -> usize {
        if t <= 0.0 {
            0
        } else {
            ((t * self.steps_per_unit_area as f64).ceil() as usize).max(1)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(McConfig::default().validate().is_ok());
        for bad in [
            McConfig { n: 1, ..McConfig::default() },
            McConfig { samples: 0, ..McConfig::default() },
            McConfig { steps_per_unit_area: 0, ..McConfig::default() },
        ] {
            assert!(matches!(bad.validate(), Err(McError::InvalidConfig(_))));
        }
    }

    #[test]
    fn step_counts() {
        let c = McConfig::default();
        assert_eq!(c.steps_for(1.0), 100);
        assert_eq!(c.steps_for(0.0), 0);
        assert_eq!(c.steps_for(1e-9), 1);
        assert_eq!(c.steps_for(std::f64::consts::FRAC_PI_2), 158);
    }
}
