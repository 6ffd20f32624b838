//! Maximizing the first nonzero eigenvalue of a vertex-weighted graph
//! Laplacian over edge weights, the dual embedding problem, optimality
//! certificates, and closed-form optima for clique-heavy graph families.
//!
//! Pipeline: [`optimizer::maximize_lambda1`] finds weights, the
//! [`spectral`] module reports the eigenspace at those weights,
//! [`embedding::extract_embedding`] builds a dual embedding from it, and
//! [`embedding::kkt_residuals`] certifies the pair. [`families`] carries the
//! analytic solutions and graph invariants used as ground truth.

pub mod embedding;
pub mod error;
pub mod families;
pub mod graph;
pub mod io;
pub mod linalg;
pub mod optimizer;
pub mod spectral;

pub use embedding::{Embedding, KktReport};
pub use error::{Error, Result};
pub use graph::{Graph, MinorOp, Separator};
pub use optimizer::{SolveResult, SolverConfig};
pub use spectral::{EdgeWeights, SpectrumReport};
