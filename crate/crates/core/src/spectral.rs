//! Singular values and Schatten p-norms.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;

/// Schatten exponent `p` in `[1, inf]`. Infinity selects the operator norm.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct PNorm(f64);

impl PNorm {
    pub const INFINITY: PNorm = PNorm(f64::INFINITY);
    pub const ONE: PNorm = PNorm(1.0);
    pub const TWO: PNorm = PNorm(2.0);

    pub fn finite(p: f64) -> Result<Self> {
        if p.is_finite() && p >= 1.0 {
            Ok(PNorm(p))
        } else {
            Err(Error::InvalidExponent(p))
        }
    }

    /// Accepts any `p >= 1`, including `f64::INFINITY`.
    pub fn new(p: f64) -> Result<Self> {
        if p == f64::INFINITY {
            Ok(Self::INFINITY)
        } else {
            Self::finite(p)
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }

    /// `1/p`, which is 0 at infinity.
    pub fn recip(self) -> f64 {
        if self.is_infinite() {
            0.0
        } else {
            1.0 / self.0
        }
    }

    /// `2^{1/p}`, the norm of `A (+) A` relative to `A`.
    pub fn two_pow_recip(self) -> f64 {
        2f64.powf(self.recip())
    }
}

impl fmt::Display for PNorm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            f.write_str("inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl FromStr for PNorm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "Inf" | "infinity" | "∞" => Ok(Self::INFINITY),
            t => {
                let p: f64 = t.parse().map_err(|_| Error::Format {
                    field: "p".into(),
                    msg: format!("expected a number >= 1 or \"inf\", got {s:?}"),
                })?;
                Self::finite(p)
            }
        }
    }
}

impl Serialize for PNorm {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for PNorm {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        let parsed = match Raw::deserialize(d)? {
            Raw::Num(p) => PNorm::finite(p),
            Raw::Str(s) => s.parse(),
        };
        parsed.map_err(serde::de::Error::custom)
    }
}

/// Singular values in descending order.
#[derive(Debug, Clone, PartialEq)]
pub struct SingularSpectrum {
    values: Vec<f64>,
}

impl SingularSpectrum {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn max(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    /// `(sum s^p)^{1/p}`, or `max s` at infinity. Finite sums are taken
    /// relative to the largest value so large `p` cannot overflow.
    pub fn schatten(&self, p: PNorm) -> f64 {
        let top = self.max();
        if top == 0.0 || p.is_infinite() {
            return top;
        }
        let p = p.value();
        if p == 1.0 {
            return self.values.iter().sum();
        }
        let sum: f64 = self.values.iter().map(|&s| (s / top).powf(p)).sum();
        top * sum.powf(1.0 / p)
    }
}

const MAX_SWEEPS: usize = 80;

/// Singular values by one-sided (Hestenes) Jacobi on the columns of `a`,
/// or of `a*` when `a` is wide.
pub fn singular_values(a: &ComplexMatrix) -> Result<SingularSpectrum> {
    if let Some(k) = a
        .data()
        .iter()
        .position(|z| !z.re.is_finite() || !z.im.is_finite())
    {
        return Err(Error::NonFinite {
            row: k / a.cols(),
            col: k % a.cols(),
        });
    }
    let (m, n) = if a.rows() >= a.cols() {
        (a.rows(), a.cols())
    } else {
        (a.cols(), a.rows())
    };
    // column-major working copy, `n` columns of length `m`
    let mut w = vec![Complex64::new(0.0, 0.0); m * n];
    if a.rows() >= a.cols() {
        for j in 0..n {
            for i in 0..m {
                w[j * m + i] = a.get(i, j);
            }
        }
    } else {
        for j in 0..n {
            for i in 0..m {
                w[j * m + i] = a.get(j, i).conj();
            }
        }
    }
    let mut norms: Vec<f64> = (0..n).map(|j| col_norm_sqr(&w[j * m..(j + 1) * m])).collect();
    let tol = m as f64 * f64::EPSILON;

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha = norms[p];
                let beta = norms[q];
                if alpha == 0.0 || beta == 0.0 {
                    continue;
                }
                let (cp, cq) = two_cols(&mut w, m, p, q);
                let gamma: Complex64 = cp.iter().zip(cq.iter()).map(|(x, y)| x.conj() * y).sum();
                let g = gamma.norm();
                if g <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                // Strip the phase of gamma from column q, then apply the real
                // rotation that diagonalizes [[alpha, g], [g, beta]].
                let phase = gamma.conj() / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
                    let yq = *y * phase;
                    let xp = *x;
                    *x = xp * c - yq * s;
                    *y = xp * s + yq * c;
                }
                norms[p] = col_norm_sqr(cp);
                norms[q] = col_norm_sqr(cq);
            }
        }
        if !rotated {
            break;
        }
    }

    let mut values: Vec<f64> = norms.iter().map(|&x| x.max(0.0).sqrt()).collect();
    values.sort_by(|a, b| b.total_cmp(a));
    Ok(SingularSpectrum { values })
}

fn col_norm_sqr(c: &[Complex64]) -> f64 {
    c.iter().map(|z| z.norm_sqr()).sum()
}

fn two_cols(w: &mut [Complex64], m: usize, p: usize, q: usize) -> (&mut [Complex64], &mut [Complex64]) {
    debug_assert!(p < q);
    let (left, right) = w.split_at_mut(q * m);
    (&mut left[p * m..(p + 1) * m], &mut right[..m])
}

/// Eigenvalues of a Hermitian matrix, in no particular order.
///
/// Householder reduction to tridiagonal form followed by implicit QL. Only
/// the lower triangle is read. Returns `None` if QL fails to converge.
pub fn hermitian_eigenvalues(h: &ComplexMatrix) -> Result<Option<Vec<f64>>> {
    if !h.is_square() {
        return Err(Error::NotSquare {
            rows: h.rows(),
            cols: h.cols(),
        });
    }
    let n = h.rows();
    let mut a = h.data().to_vec();
    if let Some(k) = a.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite { row: k / n, col: k % n });
    }
    let mut d = vec![0.0; n];
    // e[k] couples k and k + 1; the tridiagonal form has complex
    // off-diagonals but only their moduli matter for the spectrum
    let mut e = vec![0.0; n];
    let mut v = vec![Complex64::new(0.0, 0.0); n];
    let mut w = vec![Complex64::new(0.0, 0.0); n];
    for k in 0..n.saturating_sub(2) {
        let r = k + 1;
        let alpha = (r..n).map(|i| a[i * n + k].norm_sqr()).sum::<f64>().sqrt();
        d[k] = a[k * n + k].re;
        e[k] = alpha;
        if alpha == 0.0 {
            continue;
        }
        let x0 = a[r * n + k];
        let phase = if x0 == Complex64::new(0.0, 0.0) {
            Complex64::new(1.0, 0.0)
        } else {
            x0 / x0.norm()
        };
        for i in r..n {
            v[i] = a[i * n + k];
        }
        v[r] += phase * alpha;
        let vnorm = (r..n).map(|i| v[i].norm_sqr()).sum::<f64>();
        let tau = 2.0 / vnorm;
        // trailing block H <- (I - tau v v*) H (I - tau v v*)
        for i in r..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in r..n {
                let hij = if j <= i { a[i * n + j] } else { a[j * n + i].conj() };
                acc += hij * v[j];
            }
            w[i] = acc * tau;
        }
        let vw: Complex64 = (r..n).map(|i| v[i].conj() * w[i]).sum();
        let kappa = vw * (0.5 * tau);
        for i in r..n {
            w[i] -= v[i] * kappa;
        }
        for i in r..n {
            for j in r..=i {
                a[i * n + j] -= v[i] * w[j].conj() + w[i] * v[j].conj();
            }
        }
    }
    if n >= 2 {
        d[n - 2] = a[(n - 2) * n + n - 2].re;
        e[n - 2] = a[(n - 1) * n + n - 2].norm();
    }
    if n >= 1 {
        d[n - 1] = a[(n - 1) * n + n - 1].re;
        e[n - 1] = 0.0;
    }
    Ok(tridiagonal_ql(d, e))
}

const MAX_QL_ITERATIONS: usize = 60;

/// Eigenvalues of the symmetric tridiagonal matrix with diagonal `d` and
/// off-diagonal `e[..n-1]`.
fn tridiagonal_ql(mut d: Vec<f64>, mut e: Vec<f64>) -> Option<Vec<f64>> {
    let n = d.len();
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > MAX_QL_ITERATIONS {
                return None;
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + if g >= 0.0 { r } else { -r });
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Some(d)
}

/// Schatten p-norm of a Hermitian matrix from its eigenvalues, falling
/// back to Jacobi if the eigenvalue iteration stalls.
pub fn schatten_hermitian(h: &ComplexMatrix, p: PNorm) -> Result<f64> {
    match hermitian_eigenvalues(h)? {
        Some(ev) => {
            let mut values: Vec<f64> = ev.iter().map(|x| x.abs()).collect();
            values.sort_by(|a, b| b.total_cmp(a));
            Ok(SingularSpectrum { values }.schatten(p))
        }
        None => schatten(h, p),
    }
}

/// Schatten p-norm of `a`.
pub fn schatten(a: &ComplexMatrix, p: PNorm) -> Result<f64> {
    Ok(singular_values(a)?.schatten(p))
}
