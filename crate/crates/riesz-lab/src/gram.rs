//! Gram matrices of exponential basis vectors under the L^2(w) inner
//! product.
//!
//! With e_k(theta) = e^{i k theta}, the block entry for row index r and
//! column index c is w_hat(c - r); blocks are Toeplitz by construction and
//! Hermitian positive definite whenever the row and column ranges coincide.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::kernels::{ComplexMatrix, HermitianMatrix};
use crate::weights::FourierTable;

/// Contiguous range of basis indices lo..=hi.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BasisRange {
    lo: i64,
    hi: i64,
}

impl BasisRange {
    pub fn new(lo: i64, hi: i64) -> Self {
        assert!(lo <= hi, "basis range {lo}..={hi} is empty");
        Self { lo, hi }
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.hi
    }

    pub fn len(&self) -> usize {
        (self.hi - self.lo + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn index(&self, offset: usize) -> i64 {
        self.lo + offset as i64
    }
}

/// A (rows x cols) block of inner products (e_r, e_c)_w.
#[derive(Debug, Clone)]
pub struct GramBlock {
    row_range: BasisRange,
    col_range: BasisRange,
    matrix: ComplexMatrix,
}

impl GramBlock {
    pub fn row_range(&self) -> BasisRange {
        self.row_range
    }

    pub fn col_range(&self) -> BasisRange {
        self.col_range
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn is_square(&self) -> bool {
        self.row_range == self.col_range
    }

    /// Hermitian view of a square block.
    pub fn to_hermitian(&self) -> Result<HermitianMatrix> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch(
                "Gram block is not square".into(),
            ));
        }
        Ok(HermitianMatrix::from_fn(self.row_range.len(), |j, k| {
            self.matrix.at(j, k)
        }))
    }
}

/// Builds the Gram block for the given ranges from a Fourier table.
pub fn build_gram(ft: &FourierTable, rows: BasisRange, cols: BasisRange) -> Result<GramBlock> {
    let max_gap = (cols.lo - rows.hi).abs().max((cols.hi - rows.lo).abs());
    if max_gap > ft.k_max() {
        return Err(Error::InsufficientCoefficients {
            needed: max_gap,
            have: ft.k_max(),
        });
    }
    let matrix = ComplexMatrix::from_fn(rows.len(), cols.len(), |j, k| {
        ft.coeff(cols.index(k) - rows.index(j)).unwrap()
    });
    Ok(GramBlock {
        row_range: rows,
        col_range: cols,
        matrix,
    })
}

/// sqrt(x* G x), the L^2(w) norm of the coefficient vector x.
pub fn weighted_norm(x: &[Complex64], g: &GramBlock) -> Result<f64> {
    if !g.is_square() {
        return Err(Error::DimensionMismatch(
            "weighted norm needs a square Gram block".into(),
        ));
    }
    if x.len() != g.row_range.len() {
        return Err(Error::DimensionMismatch(format!(
            "vector of dim {} against Gram of dim {}",
            x.len(),
            g.row_range.len()
        )));
    }
    let herm = g.to_hermitian()?;
    let q = herm.quadratic_form(x);
    let scale = g.matrix.max_abs() * x.iter().map(|v| v.norm_sqr()).sum::<f64>();
    if q < -1e-12 * scale {
        return Err(Error::NegativeQuadraticForm(q));
    }
    Ok(q.max(0.0).sqrt())
}
