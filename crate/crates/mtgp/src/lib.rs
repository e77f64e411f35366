//! Multi-task Gaussian process regression.
//!
//! Models `M` correlated outputs over a shared input space with the
//! separable covariance `k(x, x') * (K_f)[m, m']`, where `K_f = L L^T` is a
//! learned inter-task covariance. Fully observed output tables get
//! Kronecker-structured fast paths; tables with missing entries are handled
//! through a block (Khatri-Rao) covariance over the observed entries only.
//!
//! Hyperparameters can be fitted two ways: Monte-Carlo EM with closed-form
//! M-step updates ([`fit::em_fit`]) or quasi-Newton ascent on the marginal
//! log-likelihood ([`fit::gradient_fit`]).

pub mod data;
pub mod error;
pub mod kernels;
pub mod likelihood;
pub mod linalg;
pub mod posterior;

pub mod fit;
mod optim;

pub use data::Dataset;
pub use error::{Error, Result};
pub use kernels::{KernelParams, NoiseParams, TaskCov};

