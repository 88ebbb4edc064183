//! Dense complex linear algebra and entropy functions.
//!
//! Marginal spectra of pure states go through [`singular_values`] of the
//! reshaped amplitude vector; reduced density operators are only built when
//! a measure needs the operator itself.

mod eigen;
mod entropy;
mod matrix;

pub use eigen::{
    hermitian_2x2_eigenvalues, hermitian_eigen, hermitian_eigenvalues, singular_values,
};
pub(crate) use entropy::spectral_entropy_unchecked;
pub use entropy::{
    binary_entropy, spectral_entropy, von_neumann_entropy, ENTROPY_CUTOFF, NEGATIVITY_TOL,
    TRACE_TOL,
};
pub use matrix::{ComplexMatrix, Spectrum};
