//! The Schatten p-numerical radius and the other sup-over-angle functionals.
//!
//! Each functional has the form `sup_t ||cos t P + sin t Q||_p`. It is
//! pi-periodic because `t -> t + pi` negates the matrix. It is maximized by
//! [`maximize`](crate::optimize) with the pencil bound.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::optimize::{maximize, CertifiedValue, OptimizerConfig, PencilBound};
use crate::spectral::{schatten, schatten_hermitian, PNorm};

/// `t -> ||cos t P + sin t Q||_p`.
#[derive(Debug, Clone)]
pub struct TrigPencil {
    cos_part: ComplexMatrix,
    sin_part: ComplexMatrix,
    p: PNorm,
    hermitian: bool,
}

impl TrigPencil {
    pub fn new(cos_part: ComplexMatrix, sin_part: ComplexMatrix, p: PNorm) -> Result<Self> {
        if cos_part.rows() != sin_part.rows() || cos_part.cols() != sin_part.cols() {
            return Err(Error::DimensionMismatch("pencil parts differ in shape".into()));
        }
        // real combinations of Hermitian parts stay exactly Hermitian
        let hermitian = cos_part.is_hermitian() && sin_part.is_hermitian();
        Ok(Self {
            cos_part,
            sin_part,
            p,
            hermitian,
        })
    }

    pub fn matrix_at(&self, t: f64) -> ComplexMatrix {
        let (s, c) = t.sin_cos();
        self.cos_part
            .combine(Complex64::new(c, 0.0), &self.sin_part, Complex64::new(s, 0.0))
            .expect("shapes checked at construction")
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        let m = self.matrix_at(t);
        if self.hermitian {
            schatten_hermitian(&m, self.p)
        } else {
            schatten(&m, self.p)
        }
    }

    /// Certified supremum over one period given a Lipschitz constant for
    /// the map `t -> value`.
    pub fn sup(&self, lipschitz: f64, cfg: &OptimizerConfig) -> Result<CertifiedValue> {
        cfg.validate()?;
        if lipschitz == 0.0 {
            return Ok(CertifiedValue {
                value: self.eval(0.0)?,
                arg: 0.0,
                eps: 0.0,
                evals: 1,
            });
        }
        maximize(|t| self.eval(t), PI, &PencilBound { lipschitz }, cfg)
    }
}

/// `Re(e^{it} A) = cos t Re A - sin t Im A`.
pub fn omega_pencil(a: &ComplexMatrix, p: PNorm) -> Result<TrigPencil> {
    TrigPencil::new(a.re_part()?, a.im_part()?.scale_real(-1.0), p)
}

/// Schatten p-numerical radius `sup_t ||Re(e^{it} A)||_p`.
pub fn omega(a: &ComplexMatrix, p: PNorm, cfg: &OptimizerConfig) -> Result<CertifiedValue> {
    let pencil = omega_pencil(a, p)?;
    pencil.sup(schatten(a, p)?, cfg)
}

/// `sup_t ||Im(e^{it} A)||_p`, using `Im(e^{it} A) = sin t Re A + cos t Im A`.
pub fn im_sup(a: &ComplexMatrix, p: PNorm, cfg: &OptimizerConfig) -> Result<CertifiedValue> {
    let pencil = TrigPencil::new(a.im_part()?, a.re_part()?, p)?;
    pencil.sup(schatten(a, p)?, cfg)
}

/// `sup_t ||e^{it} A + e^{-it} B*||_p`.
pub fn rotating_sum_sup(a: &ComplexMatrix, b: &ComplexMatrix, p: PNorm, cfg: &OptimizerConfig) -> Result<CertifiedValue> {
    if !a.is_square() || !b.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows().max(b.rows()),
            cols: a.cols().min(b.cols()),
        });
    }
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(format!("{} vs {}", a.dim(), b.dim())));
    }
    let bs = b.adjoint();
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    // e^{it} A + e^{-it} B* = cos t (A + B*) + sin t i (A - B*)
    let pencil = TrigPencil::new(a.combine(one, &bs, one)?, a.combine(i, &bs, -i)?, p)?;
    pencil.sup(schatten(a, p)? + schatten(b, p)?, cfg)
}

/// `sup over a^2 + b^2 = 1` of `||a Re T + b Im T||_p`.
pub fn circle_sup(t: &ComplexMatrix, p: PNorm, cfg: &OptimizerConfig) -> Result<CertifiedValue> {
    let re = t.re_part()?;
    let im = t.im_part()?;
    let lipschitz = schatten(&re, p)? + schatten(&im, p)?;
    TrigPencil::new(re, im, p)?.sup(lipschitz, cfg)
}
