//! Entanglement detection for tripartite quantum states through principal-basis
//! (Weyl-Heisenberg) correlation tensors.
//!
//! A `d x d x d` density matrix is expanded in the basis
//! `A_ij = sum_m w^(im) E_{m,m+j}`; slices of the three-party correlation
//! tensor are unfolded into matrices whose trace norms are compared against
//! the largest value any biseparable pure state can reach.
//!
//! Module map:
//! - [`linalg`]: dense complex matrices, SVD, Hermitian eigenvalues, text format.
//! - [`basis`]: the principal basis and conjugation transition matrices.
//! - [`states`]: reference states, noise families, Schmidt spectra, sampling.
//! - [`tensor`]: correlation decomposition and the T, S, N unfoldings.
//! - [`criteria`]: closed-form biseparable values, detection rules, thresholds.
//! - [`oracle`]: partial-transpose checks and Monte-Carlo bound validation.

pub mod basis;
mod bipartition;
pub mod criteria;
pub mod error;
pub mod linalg;
pub mod oracle;
pub mod states;
pub mod tensor;

pub use num_complex::Complex64;

pub use basis::{
    conjugation_coefficients, principal_basis, IndexPair, PrincipalBasis, TransitionMatrix,
};
pub use bipartition::Bipartition;
pub use criteria::{CoefficientTriple, Conclusion, Criterion, Verdict};
pub use error::{Error, Result};
pub use linalg::{singular_values, trace_norm, ComplexMatrix};
pub use states::{DensityMatrix, NoiseFamily, NoiseKind, PureState, SchmidtSpectrum};
pub use tensor::{CorrelationDecomposition, Unfolding};
