//! Benchmark fixtures for pradius.

use pradius::{random_matrix, ComplexMatrix, MatrixKind};

/// Seeded Ginibre matrix used across benchmarks.
pub fn ginibre(n: usize) -> ComplexMatrix {
    random_matrix(MatrixKind::Ginibre, n, 0xbe_7c4).expect("positive size")
}

/// A pair of seeded Ginibre matrices.
pub fn ginibre_pair(n: usize) -> (ComplexMatrix, ComplexMatrix) {
    let b = random_matrix(MatrixKind::Ginibre, n, 0xbe_7c5).expect("positive size");
    (ginibre(n), b)
}
