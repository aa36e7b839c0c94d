//! Multiparticle entanglement tests for permutation-symmetric N-qubit states
//! based on negativity of inter-group covariance matrices.
//!
//! The pipeline is: build a [`SymmetricState`] in the Dicke basis, compute its
//! Pauli correlation moments ([`tensors`]), assemble the covariance block
//! `C^(2k)` ([`covariance`]) and test it for negative directions. The
//! [`oracle`] module recomputes everything by brute force in the full `2^N`
//! space and is used throughout the test suites.

#![forbid(unsafe_code)]

pub mod cli;
pub mod covariance;
pub mod description;
pub mod error;
pub mod linalg;
pub mod oracle;
pub mod reproduce;
pub mod scanner;
pub mod symstate;
pub mod tensors;

pub use covariance::{
    covariance_matrix, test_entanglement, Certificate, CovarianceMatrix, NegativityReport,
};
pub use description::StateDescription;
pub use error::{Error, Result};
pub use scanner::{analytic_thresholds, detector_value, scan_threshold, Detector, ScanResult};
pub use symstate::{
    dicke_state, ghz_state, noisy_mixture, product_state, reduced_state, w_state, BlochDirection,
    SymmetricState,
};
pub use tensors::{
    correlation_tensor, moment_column, moment_matrix, Axis, CorrelationTensor, MultiIndex,
};
