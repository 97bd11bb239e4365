//! Dense complex matrices and the block constructions used by the law catalog.
//!
//! Storage is row-major `Complex64`. Values are immutable once built; every
//! operation returns a fresh matrix.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde_json::{json, Value};

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

/// Partition of an `(grid * block_dim)`-square matrix into `grid x grid`
/// square blocks of size `block_dim`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct BlockPartition {
    pub grid: usize,
    pub block_dim: usize,
}

impl BlockPartition {
    pub fn new(grid: usize, block_dim: usize) -> Result<Self> {
        if grid == 0 || block_dim == 0 {
            return Err(Error::EmptyMatrix);
        }
        Ok(Self { grid, block_dim })
    }

    pub fn dim(&self) -> usize {
        self.grid * self.block_dim
    }
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries, rejecting empty shapes and
    /// non-finite components.
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::EmptyMatrix);
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some(k) = data.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite {
                row: k / cols,
                col: k % cols,
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub(crate) fn from_raw(rows: usize, cols: usize, data: Vec<Complex64>) -> Self {
        debug_assert_eq!(data.len(), rows * cols);
        Self { rows, cols, data }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self::from_raw(rows, cols, data)
    }

    /// Real matrix from row-major values.
    pub fn from_real(rows: usize, cols: usize, values: &[f64]) -> Result<Self> {
        Self::new(rows, cols, values.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn zeros(n: usize) -> Self {
        Self::from_raw(n, n, vec![ZERO; n * n])
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { ONE } else { ZERO })
    }

    pub fn diag(values: &[Complex64]) -> Self {
        let n = values.len();
        Self::from_fn(n, n, |i, j| if i == j { values[i] } else { ZERO })
    }

    pub fn diag_real(values: &[f64]) -> Self {
        let n = values.len();
        Self::from_fn(n, n, |i, j| {
            if i == j {
                Complex64::new(values[i], 0.0)
            } else {
                ZERO
            }
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Side length of a square matrix.
    pub fn dim(&self) -> usize {
        self.rows
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }

    fn require_square(&self) -> Result<()> {
        if self.is_square() {
            Ok(())
        } else {
            Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            })
        }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    /// Hermitian part `(A + A*) / 2`.
    pub fn re_part(&self) -> Result<Self> {
        self.require_square()?;
        let n = self.rows;
        let mut out = Self::zeros(n);
        for i in 0..n {
            out.data[i * n + i] = Complex64::new(self.get(i, i).re, 0.0);
            for j in (i + 1)..n {
                let z = (self.get(i, j) + self.get(j, i).conj()) * 0.5;
                out.data[i * n + j] = z;
                out.data[j * n + i] = z.conj();
            }
        }
        Ok(out)
    }

    /// Skew part `(A - A*) / (2i)`, Hermitian by construction.
    pub fn im_part(&self) -> Result<Self> {
        self.require_square()?;
        let n = self.rows;
        let mut out = Self::zeros(n);
        // (a - conj(b)) / (2i) = -i (a - conj(b)) / 2
        for i in 0..n {
            out.data[i * n + i] = Complex64::new(self.get(i, i).im, 0.0);
            for j in (i + 1)..n {
                let d = self.get(i, j) - self.get(j, i).conj();
                let z = Complex64::new(d.im, -d.re) * 0.5;
                out.data[i * n + j] = z;
                out.data[j * n + i] = z.conj();
            }
        }
        Ok(out)
    }

    /// `e^{i theta} A`.
    pub fn rotate(&self, theta: f64) -> Self {
        self.scale(Complex64::from_polar(1.0, theta))
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self::from_raw(self.rows, self.cols, self.data.iter().map(|&z| z * c).collect())
    }

    pub fn scale_real(&self, c: f64) -> Self {
        Self::from_raw(self.rows, self.cols, self.data.iter().map(|&z| z * c).collect())
    }

    /// `a * self + b * other`, entrywise.
    pub fn combine(&self, a: Complex64, other: &Self, b: Complex64) -> Result<Self> {
        self.require_same_shape(other)?;
        Ok(Self::from_raw(
            self.rows,
            self.cols,
            self.data
                .iter()
                .zip(&other.data)
                .map(|(&x, &y)| a * x + b * y)
                .collect(),
        ))
    }

    fn require_same_shape(&self, other: &Self) -> Result<()> {
        if self.rows == other.rows && self.cols == other.cols {
            Ok(())
        } else {
            Err(Error::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )))
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.combine(ONE, other, ONE)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.combine(ONE, other, -ONE)
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = vec![ZERO; self.rows * other.cols];
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == ZERO {
                    continue;
                }
                let row = &other.data[k * other.cols..(k + 1) * other.cols];
                for (o, &b) in out[i * other.cols..(i + 1) * other.cols].iter_mut().zip(row) {
                    *o += a * b;
                }
            }
        }
        Ok(Self::from_raw(self.rows, other.cols, out))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self) -> bool {
        self.is_square() && *self == self.adjoint()
    }

    /// Block-diagonal `[[A, 0], [0, B]]`.
    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        self.require_square()?;
        other.require_square()?;
        let (na, nb) = (self.rows, other.rows);
        Ok(Self::from_fn(na + nb, na + nb, |i, j| match (i < na, j < na) {
            (true, true) => self.get(i, j),
            (false, false) => other.get(i - na, j - na),
            _ => ZERO,
        }))
    }

    /// `[[0, A], [B, 0]]`.
    pub fn off_diag(a: &Self, b: &Self) -> Result<Self> {
        let z = Self::zeros(a.rows);
        Self::block2(&z, a, b, &z)
    }

    /// `[[a11, a12], [a21, a22]]` with all four blocks square of one size.
    pub fn block2(a11: &Self, a12: &Self, a21: &Self, a22: &Self) -> Result<Self> {
        for b in [a11, a12, a21, a22] {
            b.require_square()?;
        }
        let n = a11.rows;
        if [a12, a21, a22].iter().any(|b| b.rows != n) {
            return Err(Error::DimensionMismatch(format!(
                "block sizes {}, {}, {}, {}",
                a11.rows, a12.rows, a21.rows, a22.rows
            )));
        }
        Ok(Self::from_fn(2 * n, 2 * n, |i, j| {
            let blk = match (i < n, j < n) {
                (true, true) => a11,
                (true, false) => a12,
                (false, true) => a21,
                (false, false) => a22,
            };
            blk.get(i % n, j % n)
        }))
    }

    /// Splits into the `grid x grid` array of blocks, row-major.
    pub fn extract_blocks(&self, part: BlockPartition) -> Result<Vec<Vec<Self>>> {
        self.require_square()?;
        if self.rows != part.dim() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix does not split into {}x{} blocks of size {}",
                self.rows, self.cols, part.grid, part.grid, part.block_dim
            )));
        }
        let m = part.block_dim;
        Ok((0..part.grid)
            .map(|bi| {
                (0..part.grid)
                    .map(|bj| Self::from_fn(m, m, |i, j| self.get(bi * m + i, bj * m + j)))
                    .collect()
            })
            .collect())
    }

    /// Inverse of [`extract_blocks`](Self::extract_blocks).
    pub fn assemble_blocks(blocks: &[Vec<Self>]) -> Result<Self> {
        let grid = blocks.len();
        if grid == 0 || blocks.iter().any(|r| r.len() != grid) {
            return Err(Error::DimensionMismatch("block grid must be square and non-empty".into()));
        }
        let m = blocks[0][0].rows;
        for b in blocks.iter().flatten() {
            b.require_square()?;
            if b.rows != m {
                return Err(Error::DimensionMismatch(format!("block size {} vs {m}", b.rows)));
            }
        }
        Ok(Self::from_fn(grid * m, grid * m, |i, j| blocks[i / m][j / m].get(i % m, j % m)))
    }

    /// JSON value in the `{"rows", "cols", "data": [[[re, im], ...], ...]}` schema.
    pub fn to_json(&self) -> Value {
        let data: Vec<Value> = (0..self.rows)
            .map(|i| {
                Value::Array(
                    (0..self.cols)
                        .map(|j| {
                            let z = self.get(i, j);
                            json!([z.re, z.im])
                        })
                        .collect(),
                )
            })
            .collect();
        json!({ "rows": self.rows, "cols": self.cols, "data": data })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let fmt_err = |field: &str, msg: &str| Error::Format {
            field: field.to_string(),
            msg: msg.to_string(),
        };
        let obj = v.as_object().ok_or_else(|| fmt_err("<root>", "expected a JSON object"))?;
        let dim = |key: &str| -> Result<usize> {
            let x = obj.get(key).ok_or_else(|| fmt_err(key, "missing"))?;
            match x.as_u64() {
                Some(n) if n > 0 => Ok(n as usize),
                _ => Err(fmt_err(key, "expected a positive integer")),
            }
        };
        let rows = dim("rows")?;
        let cols = dim("cols")?;
        let data = obj
            .get("data")
            .ok_or_else(|| fmt_err("data", "missing"))?
            .as_array()
            .ok_or_else(|| fmt_err("data", "expected an array of rows"))?;
        if data.len() != rows {
            return Err(fmt_err("data", &format!("expected {rows} rows, found {}", data.len())));
        }
        let mut entries = Vec::with_capacity(rows * cols);
        for (i, row) in data.iter().enumerate() {
            let row = row
                .as_array()
                .ok_or_else(|| fmt_err(&format!("data[{i}]"), "expected an array"))?;
            if row.len() != cols {
                return Err(fmt_err(
                    &format!("data[{i}]"),
                    &format!("expected {cols} entries, found {}", row.len()),
                ));
            }
            for (j, e) in row.iter().enumerate() {
                let field = format!("data[{i}][{j}]");
                let pair = e
                    .as_array()
                    .filter(|p| p.len() == 2)
                    .ok_or_else(|| fmt_err(&field, "expected a [re, im] pair"))?;
                let re = pair[0].as_f64().ok_or_else(|| fmt_err(&field, "re is not a number"))?;
                let im = pair[1].as_f64().ok_or_else(|| fmt_err(&field, "im is not a number"))?;
                entries.push(Complex64::new(re, im));
            }
        }
        Self::new(rows, cols, entries)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&self.to_json()).expect("matrix serializes")
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(s).map_err(|e| Error::Format {
            field: "<root>".into(),
            msg: e.to_string(),
        })?;
        Self::from_json(&v)
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self.get(i, j);
                write!(f, "{:+.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: Self) -> ComplexMatrix {
        self.try_add(rhs).expect("shape mismatch in matrix addition")
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: Self) -> ComplexMatrix {
        self.try_sub(rhs).expect("shape mismatch in matrix subtraction")
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: Self) -> ComplexMatrix {
        self.try_mul(rhs).expect("shape mismatch in matrix product")
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        self.scale_real(-1.0)
    }
}
