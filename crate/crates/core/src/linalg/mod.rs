//! Dense complex linear algebra used by every other module.

mod dense;
mod spectral;
mod tensor;

pub use dense::{ComplexMatrix, DEFAULT_TOL};
pub(crate) use dense::MatrixWire;
pub use spectral::{
    evolve_operator, evolve_operator_with_tol, hermitian_eig, hermitian_eig_with_tol, spectral_norm, Spectrum,
};
pub use tensor::{extend, kron, partial_trace, BipartiteSystem, Side};
