//! Two-component Gaussian mixture label recovery.
//!
//! Observations follow `Y_i = theta * eta_i + sigma * xi_i` with a hidden
//! sign vector `eta` in `{-1,+1}^n`, a common center `theta` in `R^p` and
//! standard Gaussian noise. This crate implements the estimators built on
//! the hollowed Gram matrix `H(Y'Y) = Y'Y - diag(Y'Y)`:
//!
//! * the spectral initializer `sign(v)` where `v` is the top eigenvector
//!   of `H(Y'Y)` ([`estimators::spectral_init`]),
//! * the sign Lloyd iteration `eta -> sign(H(Y'Y) eta)` run for
//!   `floor(3 ln n)` steps ([`estimators::lloyd_steps`]),
//! * the supervised and known-center oracles used as benchmarks,
//!
//! together with the closed-form quantities that govern them (the SNR
//! `r_n`, the exact-recovery separation threshold, the Gaussian tail) and a
//! deterministic counter-based generator so that every experiment is
//! reproducible from a single 64-bit seed.
//!
//! The crate is `no_std` compatible (`alloc` required); disable the default
//! `std` feature for embedded or sandboxed use. All transcendental math
//! goes through `libm` so that sampled streams are bit-identical across
//! platforms.
//!
//! IO, the experiment grids and the CLI live in the companion
//! `hollowgram-cli` crate.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod erf;
mod error;
pub mod estimators;
pub mod labels;
pub mod linalg;
pub(crate) mod math;
pub mod model;
pub mod risk;
pub mod rng;
pub mod synth;

pub use error::{Error, Result};
pub use estimators::{
    default_iter_count, lloyd_steps, oracle_known_center, oracle_supervised, random_lloyd,
    spectral_init, spectral_lloyd, EstimateTrace, SolverOpts,
};
pub use labels::{sign_vec, LabelVector};
pub use linalg::{gram, hollow, jacobi_eig, matvec_hollow, op_norm_oracle, top_eigpair};
pub use linalg::{HollowGram, Matrix, SymMatrix, TopEigen};
pub use model::{
    ab_to_config, exact_threshold, gaussian_tail, lower_bound_curve, snr, threshold_a, ABPoint,
    ProblemConfig,
};
pub use risk::{estimate_g, hamming_risk, tally, MonteCarloEstimate, RiskReport, TallySummary};
pub use rng::{derive_seed, Rng};
pub use synth::{
    assemble_observations, sample_center, sample_dataset, sample_dataset_seeded, sample_labels,
    CenterMode, Dataset,
};
