//! Seeded random test matrices.
//!
//! Every generator is a pure function of `(kind, n, seed)`. The stream is
//! ChaCha8 seeded through `SeedableRng::seed_from_u64`, and normal deviates
//! come from `rand_distr::StandardNormal`. Entries are drawn in row-major
//! order, real part first. Complex normals have variance 1/2 per component.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatrixKind {
    Ginibre,
    Hermitian,
    Unitary,
    NilpotentUpper,
    ScaledGinibre(f64),
}

impl fmt::Display for MatrixKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MatrixKind::Ginibre => f.write_str("ginibre"),
            MatrixKind::Hermitian => f.write_str("hermitian"),
            MatrixKind::Unitary => f.write_str("unitary"),
            MatrixKind::NilpotentUpper => f.write_str("nilpotent_upper"),
            MatrixKind::ScaledGinibre(s) => write!(f, "scaled_ginibre:{s}"),
        }
    }
}

impl FromStr for MatrixKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Format {
            field: "kind".into(),
            msg: format!("unknown generator kind {s:?}"),
        };
        Ok(match s {
            "ginibre" => MatrixKind::Ginibre,
            "hermitian" => MatrixKind::Hermitian,
            "unitary" => MatrixKind::Unitary,
            "nilpotent_upper" => MatrixKind::NilpotentUpper,
            _ => {
                let sigma = s.strip_prefix("scaled_ginibre:").ok_or_else(bad)?;
                let sigma: f64 = sigma.parse().map_err(|_| bad())?;
                if !sigma.is_finite() {
                    return Err(bad());
                }
                MatrixKind::ScaledGinibre(sigma)
            }
        })
    }
}

fn complex_normal(rng: &mut ChaCha8Rng) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

fn ginibre(n: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |_, _| complex_normal(rng))
}

pub fn random_matrix(kind: MatrixKind, n: usize, seed: u64) -> Result<ComplexMatrix> {
    if n == 0 {
        return Err(Error::EmptyMatrix);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = ginibre(n, &mut rng);
    Ok(match kind {
        MatrixKind::Ginibre => g,
        MatrixKind::ScaledGinibre(sigma) => g.scale_real(sigma),
        MatrixKind::Hermitian => g.re_part()?,
        MatrixKind::NilpotentUpper => {
            ComplexMatrix::from_fn(n, n, |i, j| if j > i { g.get(i, j) } else { Complex64::new(0.0, 0.0) })
        }
        MatrixKind::Unitary => orthonormalize(&g),
    })
}

/// Q factor of the QR decomposition with positive diagonal R, computed by
/// modified Gram-Schmidt with one reorthogonalization pass. For a Ginibre
/// input the result is Haar distributed.
fn orthonormalize(g: &ComplexMatrix) -> ComplexMatrix {
    let n = g.rows();
    let mut cols: Vec<Vec<Complex64>> = (0..n).map(|j| (0..n).map(|i| g.get(i, j)).collect()).collect();
    for j in 0..n {
        for _pass in 0..2 {
            for k in 0..j {
                let (done, rest) = cols.split_at_mut(j);
                let q = &done[k];
                let v = &mut rest[0];
                let proj: Complex64 = q.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum();
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= proj * qi;
                }
            }
        }
        let norm = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in cols[j].iter_mut() {
            *z /= norm;
        }
    }
    ComplexMatrix::from_fn(n, n, |i, j| cols[j][i])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_in_seed() {
        for kind in [
            MatrixKind::Ginibre,
            MatrixKind::Hermitian,
            MatrixKind::Unitary,
            MatrixKind::NilpotentUpper,
            MatrixKind::ScaledGinibre(0.3),
        ] {
            let a = random_matrix(kind, 4, 99).unwrap();
            let b = random_matrix(kind, 4, 99).unwrap();
            assert_eq!(a, b, "{kind}");
            assert_ne!(a, random_matrix(kind, 4, 100).unwrap());
        }
    }

    #[test]
    fn zero_dimension_rejected() {
        assert_eq!(random_matrix(MatrixKind::Ginibre, 0, 1), Err(Error::EmptyMatrix));
    }

    #[test]
    fn unitary_contract() {
        for seed in 0..20 {
            for n in [1, 2, 5, 8] {
                let u = random_matrix(MatrixKind::Unitary, n, seed).unwrap();
                let gram = &u.adjoint() * &u;
                assert!(gram.max_abs_diff(&ComplexMatrix::identity(n)) <= 1e-12);
            }
        }
    }

    #[test]
    fn hermitian_is_exact() {
        for seed in 0..20 {
            let h = random_matrix(MatrixKind::Hermitian, 6, seed).unwrap();
            assert_eq!(h, h.adjoint());
        }
    }

    #[test]
    fn nilpotent_is_strictly_upper() {
        let a = random_matrix(MatrixKind::NilpotentUpper, 5, 3).unwrap();
        for i in 0..5 {
            for j in 0..=i {
                assert_eq!(a.get(i, j), Complex64::new(0.0, 0.0));
            }
        }
        let a3 = &(&a * &a) * &a;
        let a5 = &(&a3 * &a) * &a;
        assert_eq!(a5, ComplexMatrix::zeros(5));
    }

    #[test]
    fn ginibre_variance_is_one_half_per_component() {
        let g = random_matrix(MatrixKind::Ginibre, 60, 7).unwrap();
        let n = g.data().len() as f64;
        let var_re = g.data().iter().map(|z| z.re * z.re).sum::<f64>() / n;
        let var_im = g.data().iter().map(|z| z.im * z.im).sum::<f64>() / n;
        assert!((var_re - 0.5).abs() < 0.05, "{var_re}");
        assert!((var_im - 0.5).abs() < 0.05, "{var_im}");
    }

    #[test]
    fn kind_parsing() {
        for k in ["ginibre", "hermitian", "unitary", "nilpotent_upper", "scaled_ginibre:0.25"] {
            assert_eq!(k.parse::<MatrixKind>().unwrap().to_string(), k);
        }
        assert!("gaussian".parse::<MatrixKind>().is_err());
    }
}
