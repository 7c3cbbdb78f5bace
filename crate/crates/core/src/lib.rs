//! Confidential distributed evaluation of polynomials on user data.
//!
//! The user smooths its data `X` into `X_tilde = X + KG` with a random linear
//! code and a short uniform key `K`, and keeps only `K`. Workers evaluate a
//! polynomial `f` on shifted copies of `X_tilde` chosen by a Reed-Muller
//! information super-set, which tolerates stragglers, and the user recovers
//! `f(X)` from `dim RM_q(d, m)` answers.
//!
//! Modules, bottom up:
//! - [`gf`]: prime fields, vectors, matrices, elimination.
//! - [`poly`]: sparse multivariate polynomials with a degree bound.
//! - [`codes`]: random linear codes and the smoothing encoder.
//! - [`rm`]: Reed-Muller codes, information (super-)sets, decoding.
//! - [`infometrics`]: exact entropies, divergences, mutual information and bounds.
//! - [`protocol`]: the storage and computation phases, cost metrics, audits.

pub mod codes;
pub mod error;
pub mod gf;
pub mod infometrics;
pub mod poly;
pub mod protocol;
pub mod rm;
pub mod subsets;

pub use codes::{key_gen, sample_code, LinearCode, SecretKey};
pub use error::{Error, Result};
pub use gf::{FieldElement, FieldMatrix, FieldVector, PrimeField};
pub use infometrics::{Distribution, Enumerator, EpsilonCVariant, Order, SubsetSelector};
pub use poly::{random_poly, MultiPoly};
pub use protocol::{
    download_cost, plan, storage_phase, Scheme, SchemeConfig, SchemeMetrics, SchemeParams,
    SessionState,
};
pub use rm::{rm_dimension, RmCode};
