//! Multichannel (multiple-measurement-vector) sparse recovery.
//!
//! The crate recovers a jointly sparse coefficient matrix `X` (at most `k`
//! nonzero rows) from per-channel linear measurements `Y = A X` and analyzes
//! when that recovery is guaranteed:
//!
//! - [`signal`]: the joint signal model, mixed 2,1-norm, row signs, and the
//!   random coefficient models.
//! - [`ensembles`]: measurement matrix families (random spherical, Gaussian,
//!   Bernoulli, Dirac+Fourier, Alltop Gabor) with unit-norm columns.
//! - [`conditions`]: coherence, local 2-coherence, restricted-isometry
//!   deviations, pseudo-inverse column norms, and recovery certificates.
//! - [`solvers`]: mixed-norm minimization by operator splitting,
//!   p-thresholding, simultaneous orthogonal matching pursuit, and an
//!   exhaustive sparsest-solution oracle.
//! - [`bounds`]: closed-form recovery thresholds and failure-probability
//!   bounds, exponential in the channel count.
//! - [`montecarlo`]: phase-transition sweeps and the empirical oracles that
//!   validate the bounds.
//! - [`io`]: CSV/JSON serialization of matrices, signals, and results.

pub mod bounds;
pub mod combinatorics;
pub mod conditions;
pub mod ensembles;
pub mod error;
pub mod io;
pub mod linalg;
pub mod montecarlo;
pub mod rng;
pub mod signal;
pub mod solvers;

pub use ensembles::{EnsembleTag, MeasurementMatrix};
pub use error::{Error, Result};
pub use signal::{CoefficientModel, JointSignal, ModelVariant, Support};
pub use solvers::{RecoveryResult, SolverOptions};
