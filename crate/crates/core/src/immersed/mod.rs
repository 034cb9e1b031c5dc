//! Immersed isogeometric Galerkin machinery: background grids, cut-cell
//! classification, trimmed spline spaces with Bézier extraction, moment
//! tables, assembly, boundary conditions, solves and error norms.

pub mod assemble;
pub mod classify;
pub mod driver;
pub mod grid;
pub mod moment;
pub mod norms;
pub mod project;
pub mod space;

pub use assemble::{apply_dirichlet, assemble, solve, BoxFace, Diffusion, ProblemData, SparseSystem};
pub use classify::{classification_from_cells_3d, classify_cells_2d, ClassifyError};
pub use grid::{CartesianGrid, CellClassification, CellLabel, CutGeometry};
pub use moment::{build_moment_table, MomentConfig, MomentTable};
pub use norms::{error_norms, fit_rate, NormOptions};
pub use space::{ActiveSet, SplineSpace};
