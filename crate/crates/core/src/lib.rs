//! Reduced density operators of bipartite quantum systems.
//!
//! Besides the von Neumann partial trace, the crate implements reductions
//! conditioned on an assumed state of the unobserved subsystem, including
//! the self-consistent correlated pair, plus product-ensemble
//! decompositions of entangled two-qubit states and two reference models
//! (a coupled spin pair and the Jaynes-Cummings model).

pub mod ensembles;
pub mod error;
pub mod linalg;
pub mod models;
pub mod reduction;
pub mod states;

pub use num_complex::Complex64;

pub use ensembles::{assemble, verify_ensemble, Ensemble, EnsembleTerm, VerificationReport};
pub use error::{CoreError, Result};
pub use linalg::{kron, partial_trace, BipartiteSystem, ComplexMatrix, Side};
pub use models::{JcmParams, ModelParams, SpinPairParams};
pub use reduction::{
    conditioned_reduce, correlated_reduce, correlator, neumann_reduce, projective_reduce, CorrelatedOptions,
    IterationReport, Method, ReductionResult, Seed, UpdateScheme, Verdict,
};
pub use states::{DensityMatrix, Observable, Validation};
