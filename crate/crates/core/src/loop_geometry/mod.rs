//! Loops on a polar grid of nested cross-radial arcs.
//!
//! A grid splits the plane around the origin into angular sectors. Each sector
//! carries a stack of arcs `θ ↦ r(θ)e^{iθ}` ordered outward; the region between
//! two consecutive arcs of a sector is the interior of a minimal lasso. Loops
//! are based at the origin and written as words of signed arcs: radial moves
//! carry trivial holonomy, so they are implied by the arc endpoints and never
//! stored.
//!
//! Word order is traversal order throughout: the first letter is traversed
//! first, and holonomies of later letters multiply on the left.

mod grid;
mod lasso;
mod winding;
mod word;

pub use grid::{Arc, Grid, RADIUS_TOLERANCE};
pub use lasso::{decompose, decompose_raw, LassoKey, LassoWord};
pub use winding::face_windings;
pub use word::{Letter, LoopWord, Sign};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("bad angles: {0}")]
    BadAngles(String),
    #[error("arc `{arc}` has invalid radius {value}")]
    NegativeRadius { arc: String, value: f64 },
    #[error("arc `{arc}` needs at least 2 radius samples, got {got}")]
    TooFewSamples { arc: String, got: usize },
    #[error("arc `{arc}` refers to sector {sector}, grid has sectors 1..={sectors}")]
    BadSector {
        arc: String,
        sector: usize,
        sectors: usize,
    },
    #[error("duplicate arc id `{0}`")]
    DuplicateArcId(String),
    #[error("arcs `{lower}` and `{upper}` cross inside sector {sector}")]
    CrossingArcs {
        sector: usize,
        lower: String,
        upper: String,
    },
    #[error("arcs `{first}` and `{second}` coincide along sector {sector}")]
    CoincidentArcs {
        sector: usize,
        first: String,
        second: String,
    },
    #[error("arc `{0}` is not in the grid")]
    ArcNotInGrid(String),
    #[error("letter {position} does not start where the previous letter ends")]
    NotConnectable { position: usize },
    #[error("loop does not close: ends at angle index {end}, starts at {start}")]
    NotClosed { start: usize, end: usize },
}
