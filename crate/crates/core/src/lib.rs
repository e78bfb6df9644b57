//! Large-N master field of planar Yang-Mills: loop geometry on polar grids,
//! lasso decomposition, and exact Wilson loop expectations computed with
//! non-crossing partitions and free cumulants.

pub mod dsl;
pub mod free_engine;
pub mod loop_geometry;
pub mod random;

pub use free_engine::{
    msc_moment, pk_closed, pk_laguerre, pk_recursion, pk_recursion_with, wilson_loop, word_moment, EngineConfig,
    EngineError, MscLaw, WordMomentQuery,
};
pub use loop_geometry::{
    decompose, face_windings, Arc, GeometryError, Grid, LassoKey, LassoWord, Letter, LoopWord,
    Sign,
};
