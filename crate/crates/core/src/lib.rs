//! Schatten p-norms, the Schatten p-numerical radius
//! `omega_p(A) = sup_t ||Re(e^{it} A)||_p`, and a randomized verifier for a
//! catalog of norm and radius identities and inequalities on 2x2 block
//! matrices.
//!
//! The main pieces:
//!
//! * [`matrix`]: dense complex matrices and block constructions.
//! * [`random`]: seeded Ginibre, Hermitian, unitary and nilpotent samples.
//! * [`spectral`]: singular values (one-sided Jacobi) and Schatten norms.
//! * [`optimize`] and [`radius`]: certified maximization over the angle.
//! * [`laws`]: the law catalog and single-instance evaluation.
//! * [`harness`]: seeded trial suites, reports and sharpness search.

pub mod error;
pub mod harness;
pub mod laws;
pub mod matrix;
pub mod optimize;
pub mod radius;
pub mod random;
pub mod spectral;

pub use error::{Error, Result};
pub use matrix::{BlockPartition, ComplexMatrix};
pub use optimize::{certified_sup, CertifiedValue, OptimizerConfig};
pub use radius::{circle_sup, im_sup, omega, rotating_sum_sup};
pub use random::{random_matrix, MatrixKind};
pub use spectral::{hermitian_eigenvalues, schatten, schatten_hermitian, singular_values, PNorm, SingularSpectrum};

pub use num_complex::Complex64;
