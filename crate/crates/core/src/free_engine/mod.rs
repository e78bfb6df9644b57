//! Exact Wilson loop expectations at infinite N.
//!
//! Minimal lassos of a grid have freely independent holonomies, each
//! following the multiplicative semicircular law of parameter equal to the
//! lasso area. The moments of that law are `e^{-kt/2} P_k(t)`, and the trace
//! of any word in free generators is a sum over non-crossing partitions whose
//! blocks each stay on one generator, weighted by free cumulants.

mod cumulant;
mod law;
mod moment;
mod nc;
mod pk;

pub use cumulant::{free_cumulant, CumulantTable};
pub use law::{msc_moment, MscLaw};
pub use moment::{cyclic_reduce, wilson_loop, word_moment, word_moment_nc_sum, WordMomentQuery};
pub use nc::{enumerate_nc, for_each_nc, NcPartition};
pub use pk::{pk_closed, pk_laguerre, pk_recursion, pk_recursion_with, PkPolynomial};

use thiserror::Error;

use crate::loop_geometry::{GeometryError, LassoKey};

/// Size limits guarding the exponential parts of the engine.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EngineConfig {
    /// Largest `k` for which `P_k` is built.
    pub max_k: usize,
    /// Longest word (after normalization and taking the power) accepted by
    /// [`word_moment`].
    pub max_alternation: usize,
    /// Largest point count for partition enumeration and cumulants.
    pub max_partition_points: usize,
}

impl Default for EngineConfig {
    fn default() -> Self {
        Self {
            max_k: 64,
            max_alternation: 14,
            max_partition_points: 14,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error("P_{k} requested, cap is {cap}")]
    KTooLarge { k: usize, cap: usize },
    #[error("{n} points requested, partition cap is {cap}")]
    NTooLarge { n: usize, cap: usize },
    #[error("word has {len} letters after normalization, cap is {cap}")]
    WordTooLong { len: usize, cap: usize },
    #[error("no area for lasso {0}")]
    UnknownLassoKey(LassoKey),
    #[error("closed form for P_{n} overflows f64")]
    Overflow { n: usize },
    #[error("cumulant of an empty list of exponents")]
    EmptyCumulant,
    #[error("invalid area parameter {0}")]
    BadArea(f64),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}
