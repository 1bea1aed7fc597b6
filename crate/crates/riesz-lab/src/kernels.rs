//! Dense complex linear-algebra primitives.
//!
//! Everything downstream reduces to three operations on small dense
//! matrices: a pivoted-threshold Cholesky factorization, an extremal
//! singular value, and operator norms of diagonal multipliers in a
//! weighted inner product x* G y ("whitened" through the Cholesky factor
//! of G). All routines are deterministic: fixed starting vectors, no
//! randomized pivoting, single-threaded arithmetic.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default relative tolerance for the extremal eigenvalue iteration.
pub const DEFAULT_TOL: f64 = 1e-10;
/// Default iteration cap; matrices here stay below ~2000 rows.
pub const DEFAULT_MAX_ITER: usize = 20_000;
/// Default absolute tolerance on singular values themselves. Relative
/// accuracy is meaningless when the true value sits at rounding scale
/// (orthogonal subspaces give sin(phi) ~ 1e-16 with a clustered noise
/// spectrum that no iteration count resolves further).
pub const DEFAULT_SIGMA_ABS_TOL: f64 = 1e-12;

/// Dense rectangular complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                m.data[r * cols + c] = f(r, c);
            }
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Self {
        let r = rows.len();
        let c = if r > 0 { rows[0].len() } else { 0 };
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Self {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn at(&self, r: usize, c: usize) -> Complex64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: Complex64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn conj_transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self.at(c, r).conj())
    }

    /// y = M x
    fn matvec(&self, x: &[Complex64], y: &mut [Complex64]) {
        debug_assert_eq!(x.len(), self.cols);
        debug_assert_eq!(y.len(), self.rows);
        for r in 0..self.rows {
            let row = &self.data[r * self.cols..(r + 1) * self.cols];
            let mut acc = Complex64::new(0.0, 0.0);
            for (m, xv) in row.iter().zip(x.iter()) {
                acc += m * xv;
            }
            y[r] = acc;
        }
    }

    /// y = M* x
    fn matvec_conj_transpose(&self, x: &[Complex64], y: &mut [Complex64]) {
        debug_assert_eq!(x.len(), self.rows);
        debug_assert_eq!(y.len(), self.cols);
        for v in y.iter_mut() {
            *v = Complex64::new(0.0, 0.0);
        }
        for r in 0..self.rows {
            let row = &self.data[r * self.cols..(r + 1) * self.cols];
            let xr = x[r];
            for (c, m) in row.iter().enumerate() {
                y[c] += m.conj() * xr;
            }
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

/// Hermitian matrix; only the lower triangle is taken from the generator,
/// the upper triangle is mirrored by conjugation so the invariant
/// `m[j][k] == conj(m[k][j])` holds exactly.
#[derive(Debug, Clone)]
pub struct HermitianMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl HermitianMatrix {
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        assert!(dim >= 1, "Hermitian matrix must have dim >= 1");
        let mut data = vec![Complex64::new(0.0, 0.0); dim * dim];
        for j in 0..dim {
            let d = f(j, j);
            data[j * dim + j] = Complex64::new(d.re, 0.0);
            for k in 0..j {
                let v = f(j, k);
                data[j * dim + k] = v;
                data[k * dim + j] = v.conj();
            }
        }
        Self { dim, data }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |j, k| {
            Complex64::new(if j == k { 1.0 } else { 0.0 }, 0.0)
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn at(&self, r: usize, c: usize) -> Complex64 {
        self.data[r * self.dim + c]
    }

    pub fn to_matrix(&self) -> ComplexMatrix {
        ComplexMatrix {
            rows: self.dim,
            cols: self.dim,
            data: self.data.clone(),
        }
    }

    pub fn max_diag(&self) -> f64 {
        (0..self.dim).map(|j| self.at(j, j).re).fold(0.0, f64::max)
    }

    /// x* M x; the imaginary part is discarded (it is rounding noise for a
    /// Hermitian M).
    pub fn quadratic_form(&self, x: &[Complex64]) -> f64 {
        debug_assert_eq!(x.len(), self.dim);
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..self.dim {
            let mut row = Complex64::new(0.0, 0.0);
            for k in 0..self.dim {
                row += self.at(j, k) * x[k];
            }
            acc += x[j].conj() * row;
        }
        acc.re
    }
}

/// Lower-triangular Cholesky factor L with L L* = G.
#[derive(Debug, Clone)]
pub struct CholeskyFactor {
    dim: usize,
    /// Row-major dense storage; strictly upper entries are zero.
    lower: Vec<Complex64>,
    /// Smallest pivot d_j = G[j][j] - sum |L[j][k]|^2 encountered.
    pivot_floor: f64,
    /// Largest diagonal of the source matrix, kept for conditioning reports.
    max_source_diag: f64,
}

impl CholeskyFactor {
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn at(&self, r: usize, c: usize) -> Complex64 {
        self.lower[r * self.dim + c]
    }

    pub fn pivot_floor(&self) -> f64 {
        self.pivot_floor
    }

    /// Ratio of the largest source diagonal to the smallest pivot; a cheap
    /// conditioning indicator surfaced in CSV output.
    pub fn cond_estimate(&self) -> f64 {
        self.max_source_diag / self.pivot_floor
    }

    /// L L* as a dense matrix (for reconstruction tests).
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.dim;
        ComplexMatrix::from_fn(n, n, |r, c| {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..=r.min(c) {
                acc += self.at(r, k) * self.at(c, k).conj();
            }
            acc
        })
    }

    /// Solves L Y = B by forward substitution, overwriting B with Y.
    fn forward_solve(&self, b: &mut ComplexMatrix) {
        assert_eq!(b.rows, self.dim, "forward_solve dimension mismatch");
        let n = self.dim;
        for col in 0..b.cols {
            for r in 0..n {
                let mut acc = b.at(r, col);
                for k in 0..r {
                    acc -= self.at(r, k) * b.at(k, col);
                }
                b.set(r, col, acc / self.at(r, r));
            }
        }
    }

    /// Solves (L L*) x = b in place: forward then back substitution.
    pub fn solve_in_place(&self, b: &mut [Complex64]) {
        let n = self.dim;
        assert_eq!(b.len(), n, "solve_in_place dimension mismatch");
        for r in 0..n {
            let mut acc = b[r];
            for k in 0..r {
                acc -= self.at(r, k) * b[k];
            }
            b[r] = acc / self.at(r, r);
        }
        for r in (0..n).rev() {
            let mut acc = b[r];
            for k in (r + 1)..n {
                acc -= self.at(k, r).conj() * b[k];
            }
            b[r] = acc / self.at(r, r);
        }
    }

    /// L* D L^{-*} for a diagonal D, the congruence that turns a weighted
    /// multiplier norm into an ordinary singular-value problem.
    pub fn whiten_diagonal(&self, diag: &[Complex64]) -> Result<ComplexMatrix> {
        if diag.len() != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "diagonal has {} entries, factor dim {}",
                diag.len(),
                self.dim
            )));
        }
        let n = self.dim;
        // Z = L* D, then X L* = Z  <=>  L X* = Z*; Z*[r][c] = L[r][c] conj(d_r).
        let z_star = ComplexMatrix::from_fn(n, n, |r, c| self.at(r, c) * diag[r].conj());
        let mut x_star = z_star;
        self.forward_solve(&mut x_star);
        Ok(x_star.conj_transpose())
    }
}

/// Pivoted-threshold Cholesky of a Hermitian matrix.
///
/// Fails with [`Error::NotPositiveDefinite`] when any pivot drops to
/// `rel_tol` times the largest diagonal of `m`, which is how an
/// ill-conditioned or rank-deficient Gram matrix announces itself.
pub fn cholesky(m: &HermitianMatrix, rel_tol: f64) -> Result<CholeskyFactor> {
    assert!(rel_tol > 0.0, "rel_tol must be positive");
    let n = m.dim;
    let max_diag = m.max_diag();
    let threshold = rel_tol * max_diag;
    let mut lower = vec![Complex64::new(0.0, 0.0); n * n];
    let mut pivot_floor = f64::INFINITY;
    for j in 0..n {
        let mut d = m.at(j, j).re;
        for k in 0..j {
            d -= lower[j * n + k].norm_sqr();
        }
        if d <= threshold {
            return Err(Error::NotPositiveDefinite {
                pivot: d,
                index: j,
                threshold,
            });
        }
        pivot_floor = pivot_floor.min(d);
        let ljj = d.sqrt();
        lower[j * n + j] = Complex64::new(ljj, 0.0);
        for i in (j + 1)..n {
            let mut acc = m.at(i, j);
            for k in 0..j {
                acc -= lower[i * n + k] * lower[j * n + k].conj();
            }
            lower[i * n + j] = acc / ljj;
        }
    }
    Ok(CholeskyFactor {
        dim: n,
        lower,
        pivot_floor,
        max_source_diag: max_diag,
    })
}

/// L_A^{-1} C L_B^{-*}: the whitened cross-Gram whose largest singular value
/// is the sine of the angle between the two subspaces.
pub fn whiten_cross(
    chol_a: &CholeskyFactor,
    cross: &ComplexMatrix,
    chol_b: &CholeskyFactor,
) -> Result<ComplexMatrix> {
    if cross.rows() != chol_a.dim() || cross.cols() != chol_b.dim() {
        return Err(Error::DimensionMismatch(format!(
            "cross block {}x{} against factors {} and {}",
            cross.rows(),
            cross.cols(),
            chol_a.dim(),
            chol_b.dim()
        )));
    }
    let mut y = cross.clone();
    chol_a.forward_solve(&mut y);
    // X = Y L_B^{-*}  <=>  L_B X* = Y*.
    let mut x_star = y.conj_transpose();
    chol_b.forward_solve(&mut x_star);
    Ok(x_star.conj_transpose())
}

/// Largest singular value of a dense complex matrix, converged to the
/// relative tolerance `tol`.
pub fn largest_singular_value(m: &ComplexMatrix, tol: f64, max_iter: usize) -> Result<f64> {
    largest_singular_value_with_floor(m, tol, 0.0, max_iter)
}

/// Largest singular value of a dense complex matrix.
///
/// Runs a two-vector subspace iteration on the Gram operator m* m (or m m*,
/// whichever is smaller), seeded with the normalized all-ones vector plus a
/// fixed aperiodic companion. The companion guards against starting vectors
/// that are exactly orthogonal to the dominant singular subspace, which the
/// flip symmetry of real Toeplitz sections makes a live possibility.
/// Deterministic: identical inputs give identical iterates.
///
/// Convergence accepts a Ritz pair whose eigenvalue residual is below
/// `tol * theta + sigma_abs_tol^2`; the second term bounds the absolute
/// error of the singular value by `sigma_abs_tol`.
pub fn largest_singular_value_with_floor(
    m: &ComplexMatrix,
    tol: f64,
    sigma_abs_tol: f64,
    max_iter: usize,
) -> Result<f64> {
    assert!(tol > 0.0 && max_iter > 0);
    if m.rows() == 0 || m.cols() == 0 {
        return Err(Error::DimensionMismatch("empty matrix".into()));
    }
    let transpose_side = m.rows() < m.cols();
    let n = m.rows().min(m.cols());
    let scale = m.max_abs();
    if scale == 0.0 {
        return Ok(0.0);
    }
    if n == 1 {
        // Single column (or row): the norm is exact.
        let mut acc = 0.0;
        for r in 0..m.rows() {
            for c in 0..m.cols() {
                acc += m.at(r, c).norm_sqr();
            }
        }
        return Ok(acc.sqrt());
    }

    let mut scratch = vec![Complex64::new(0.0, 0.0); m.rows().max(m.cols())];
    let mut apply_gram = |x: &[Complex64], y: &mut [Complex64]| {
        if transpose_side {
            m.matvec_conj_transpose(x, &mut scratch[..m.cols()]);
            m.matvec(&scratch[..m.cols()], y);
        } else {
            m.matvec(x, &mut scratch[..m.rows()]);
            m.matvec_conj_transpose(&scratch[..m.rows()], y);
        }
    };

    let ones = Complex64::new(1.0 / (n as f64).sqrt(), 0.0);
    let mut v1 = vec![ones; n];
    let mut v2: Vec<Complex64> = (0..n)
        .map(|j| Complex64::new((1.7 * (j as f64 + 1.0)).sin(), 0.0))
        .collect();
    orthonormalize_pair(&mut v1, &mut v2, None);

    let mut w1 = vec![Complex64::new(0.0, 0.0); n];
    let mut w2 = vec![Complex64::new(0.0, 0.0); n];
    for iter in 0..max_iter {
        apply_gram(&v1, &mut w1);
        apply_gram(&v2, &mut w2);

        // Rayleigh-Ritz on span{v1, v2}.
        let s11 = dot(&v1, &w1).re;
        let s22 = dot(&v2, &w2).re;
        let s12 = dot(&v1, &w2);
        let (theta, g1, g2) = top_eig_2x2(s11, s12, s22);

        if theta <= f64::MIN_POSITIVE {
            return Ok(0.0);
        }
        // Residual of the top Ritz pair: || Gram*u - theta*u ||.
        let mut res_sq = 0.0;
        for j in 0..n {
            let ritz = g1 * v1[j] + g2 * v2[j];
            let img = g1 * w1[j] + g2 * w2[j];
            res_sq += (img - theta * ritz).norm_sqr();
        }
        let residual = res_sq.sqrt();
        if residual <= tol * theta + sigma_abs_tol * sigma_abs_tol {
            return Ok(theta.sqrt());
        }

        // Next subspace: orthonormalized images.
        std::mem::swap(&mut v1, &mut w1);
        std::mem::swap(&mut v2, &mut w2);
        orthonormalize_pair(&mut v1, &mut v2, Some(iter));
    }

    // Report the relative residual achieved.
    apply_gram(&v1, &mut w1);
    let theta = dot(&v1, &w1).re.max(f64::MIN_POSITIVE);
    let mut res_sq = 0.0;
    for j in 0..n {
        res_sq += (w1[j] - theta * v1[j]).norm_sqr();
    }
    Err(Error::NoConvergence {
        iterations: max_iter,
        residual: res_sq.sqrt() / theta,
        tol,
    })
}

/// Operator norm of a diagonal multiplier in the inner product x* G y,
/// where `chol` factors G: the largest singular value of L* D L^{-*}.
pub fn whitened_norm(diag: &[Complex64], chol: &CholeskyFactor) -> Result<f64> {
    let white = chol.whiten_diagonal(diag)?;
    largest_singular_value_with_floor(&white, DEFAULT_TOL, DEFAULT_SIGMA_ABS_TOL, DEFAULT_MAX_ITER)
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Modified Gram-Schmidt on a pair, with a deterministic canonical-basis
/// reseed if the second vector collapses (rank-one operators do this).
fn orthonormalize_pair(v1: &mut [Complex64], v2: &mut [Complex64], iter: Option<usize>) {
    let n = v1.len();
    let n1 = norm(v1);
    if n1 > 0.0 {
        for v in v1.iter_mut() {
            *v /= n1;
        }
    }
    let proj = dot(v1, v2);
    for j in 0..n {
        v2[j] -= proj * v1[j];
    }
    let n2 = norm(v2);
    if n2 > 1e-14 * n1.max(1.0) {
        for v in v2.iter_mut() {
            *v /= n2;
        }
        return;
    }
    // Reseed with cycling canonical vectors.
    let start = iter.unwrap_or(0);
    for k in 0..n {
        for (j, v) in v2.iter_mut().enumerate() {
            *v = Complex64::new(if j == (start + k) % n { 1.0 } else { 0.0 }, 0.0);
        }
        let proj = dot(v1, v2);
        for j in 0..n {
            v2[j] -= proj * v1[j];
        }
        let m = norm(v2);
        if m > 1e-8 {
            for v in v2.iter_mut() {
                *v /= m;
            }
            return;
        }
    }
    // v1 spans everything reachable; leave v2 zero.
}

/// Top eigenpair of the Hermitian 2x2 [[s11, s12], [conj(s12), s22]].
fn top_eig_2x2(s11: f64, s12: Complex64, s22: f64) -> (f64, Complex64, Complex64) {
    let mid = (s11 + s22) / 2.0;
    let disc = (((s11 - s22) / 2.0).powi(2) + s12.norm_sqr()).sqrt();
    let theta = mid + disc;
    // (s12, theta - s11) and (theta - s22, conj(s12)) are both eigenvectors;
    // pick the larger for stability.
    let cand1 = (s12, Complex64::new(theta - s11, 0.0));
    let cand2 = (Complex64::new(theta - s22, 0.0), s12.conj());
    let n1 = (cand1.0.norm_sqr() + cand1.1.norm_sqr()).sqrt();
    let n2 = (cand2.0.norm_sqr() + cand2.1.norm_sqr()).sqrt();
    if n1.max(n2) == 0.0 {
        return (theta, Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
    }
    if n1 >= n2 {
        (theta, cand1.0 / n1, cand1.1 / n1)
    } else {
        (theta, cand2.0 / n2, cand2.1 / n2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn real_herm(rows: &[&[f64]]) -> HermitianMatrix {
        let n = rows.len();
        HermitianMatrix::from_fn(n, |j, k| c(rows[j][k], 0.0))
    }

    #[test]
    fn cholesky_identity() {
        let m = HermitianMatrix::identity(3);
        let f = cholesky(&m, 1e-12).unwrap();
        for j in 0..3 {
            for k in 0..3 {
                let expect = if j == k { 1.0 } else { 0.0 };
                assert!((f.at(j, k) - c(expect, 0.0)).norm() < 1e-15);
            }
        }
        assert_eq!(f.pivot_floor(), 1.0);
    }

    #[test]
    fn cholesky_two_by_two() {
        let m = real_herm(&[&[2.0, 1.0], &[1.0, 2.0]]);
        let f = cholesky(&m, 1e-12).unwrap();
        assert!((f.at(0, 0).re - 2f64.sqrt()).abs() < 1e-14);
        assert!((f.at(1, 0).re - 1.0 / 2f64.sqrt()).abs() < 1e-14);
        assert!((f.at(1, 1).re - 1.5f64.sqrt()).abs() < 1e-14);
        let rec = f.reconstruct();
        for j in 0..2 {
            for k in 0..2 {
                assert!((rec.at(j, k) - m.at(j, k)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn cholesky_rank_deficient_rejected() {
        let m = real_herm(&[&[1.0, 1.0], &[1.0, 1.0]]);
        match cholesky(&m, 1e-12) {
            Err(Error::NotPositiveDefinite { index, .. }) => assert_eq!(index, 1),
            other => panic!("expected NotPositiveDefinite, got {other:?}"),
        }
    }

    #[test]
    fn cholesky_complex_hermitian() {
        let m = HermitianMatrix::from_fn(2, |j, k| match (j, k) {
            (0, 0) => c(2.0, 0.0),
            (1, 1) => c(3.0, 0.0),
            (1, 0) => c(0.5, -1.0),
            _ => unreachable!(),
        });
        let f = cholesky(&m, 1e-12).unwrap();
        let rec = f.reconstruct();
        for j in 0..2 {
            for k in 0..2 {
                assert!((rec.at(j, k) - m.at(j, k)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn singular_value_diagonal() {
        let m = ComplexMatrix::from_fn(3, 3, |r, k| {
            c(if r == k { [3.0, 1.0, 2.0][r] } else { 0.0 }, 0.0)
        });
        let s = largest_singular_value(&m, 1e-10, 20_000).unwrap();
        assert!((s - 3.0).abs() < 1e-9);
    }

    #[test]
    fn singular_value_nilpotent_shift() {
        let m = ComplexMatrix::from_rows(vec![vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(0.0, 0.0), c(0.0, 0.0)]]);
        let s = largest_singular_value(&m, 1e-10, 20_000).unwrap();
        assert!((s - 1.0).abs() < 1e-9);
    }

    #[test]
    fn singular_value_all_ones() {
        let m = ComplexMatrix::from_fn(2, 2, |_, _| c(1.0, 0.0));
        let s = largest_singular_value(&m, 1e-10, 20_000).unwrap();
        assert!((s - 2.0).abs() < 1e-9);
    }

    #[test]
    fn singular_value_zero_matrix() {
        let m = ComplexMatrix::zeros(4, 2);
        assert_eq!(largest_singular_value(&m, 1e-10, 100).unwrap(), 0.0);
    }

    /// The dominant singular vector of this matrix is orthogonal to the
    /// all-ones start; the companion vector must rescue the iteration.
    #[test]
    fn singular_value_ones_orthogonal_dominant() {
        let m = ComplexMatrix::from_rows(vec![
            vec![c(1.0, 0.0), c(-1.0, 0.0)],
            vec![c(-1.0, 0.0), c(1.0, 0.0)],
        ]);
        let s = largest_singular_value(&m, 1e-10, 20_000).unwrap();
        assert!((s - 2.0).abs() < 1e-9, "got {s}");
    }

    #[test]
    fn singular_value_matches_adjoint_on_random_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for trial in 0..100 {
            let rows = rng.gen_range(1..=12);
            let cols = rng.gen_range(1..=12);
            let m = ComplexMatrix::from_fn(rows, cols, |_, _| {
                c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            });
            let s = largest_singular_value(&m, 1e-10, 20_000).unwrap();
            let st = largest_singular_value(&m.conj_transpose(), 1e-10, 20_000).unwrap();
            let denom = s.max(1e-30);
            assert!(
                (s - st).abs() / denom < 1e-8,
                "trial {trial}: {s} vs {st}"
            );
        }
    }

    #[test]
    fn whitened_identity_multiplier_is_one() {
        let g = real_herm(&[&[2.0, 1.0], &[1.0, 2.0]]);
        let f = cholesky(&g, 1e-12).unwrap();
        let d = vec![c(1.0, 0.0); 2];
        let s = whitened_norm(&d, &f).unwrap();
        assert!((s - 1.0).abs() < 1e-10);
    }

    #[test]
    fn whitened_euclidean_gram_takes_max_abs() {
        let g = HermitianMatrix::identity(3);
        let f = cholesky(&g, 1e-12).unwrap();
        let d = vec![c(0.3, 0.0), c(-0.9, 0.0), c(0.5, 0.0)];
        let s = whitened_norm(&d, &f).unwrap();
        assert!((s - 0.9).abs() < 1e-10);
    }

    /// Coordinate projection diag(1,0) under G = [[2,1],[1,2]]: the exact
    /// norm is 2/sqrt(3), cross-checked below by a brute-force sweep of the
    /// Rayleigh ratio over ~10^4 unit vectors.
    #[test]
    fn whitened_projection_against_rayleigh_sweep() {
        let g = real_herm(&[&[2.0, 1.0], &[1.0, 2.0]]);
        let f = cholesky(&g, 1e-12).unwrap();
        let d = vec![c(1.0, 0.0), c(0.0, 0.0)];
        let s = whitened_norm(&d, &f).unwrap();
        assert!((s - 2.0 / 3f64.sqrt()).abs() < 1e-10, "got {s}");
        assert!(s > 1.0 && s <= 2.0);

        let mut sweep_max: f64 = 0.0;
        for i in 0..100 {
            let t = std::f64::consts::PI * (i as f64) / 100.0;
            for j in 0..100 {
                let phase = 2.0 * std::f64::consts::PI * (j as f64) / 100.0;
                let x = [c(t.cos(), 0.0), c(t.sin(), 0.0) * c(phase.cos(), phase.sin())];
                let dx = [x[0], c(0.0, 0.0)];
                let num = g.quadratic_form(&dx);
                let den = g.quadratic_form(&x);
                if den > 1e-12 {
                    sweep_max = sweep_max.max((num / den).sqrt());
                }
            }
        }
        assert!((sweep_max - s).abs() < 1e-3, "sweep {sweep_max} vs {s}");
    }

    proptest! {
        #[test]
        fn cholesky_reconstructs_random_pd(seed in 0u64..500) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = rng.gen_range(1..=8);
            let a = ComplexMatrix::from_fn(n, n, |_, _| {
                c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            });
            // A A* + eps I is Hermitian positive definite.
            let m = HermitianMatrix::from_fn(n, |j, k| {
                let mut acc = c(0.0, 0.0);
                for l in 0..n {
                    acc += a.at(j, l) * a.at(k, l).conj();
                }
                acc + if j == k { c(1e-3, 0.0) } else { c(0.0, 0.0) }
            });
            let rel_tol = 1e-12;
            let f = cholesky(&m, rel_tol).unwrap();
            let rec = f.reconstruct();
            let max = m.to_matrix().max_abs();
            for j in 0..n {
                for k in 0..n {
                    prop_assert!((rec.at(j, k) - m.at(j, k)).norm() <= 10.0 * 1e-12 * max + 1e-13);
                }
            }
        }

        #[test]
        fn whitened_norm_scales_linearly(seed in 0u64..200, scale in -4.0f64..4.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = rng.gen_range(1..=6);
            let a = ComplexMatrix::from_fn(n, n, |_, _| {
                c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            });
            let g = HermitianMatrix::from_fn(n, |j, k| {
                let mut acc = c(0.0, 0.0);
                for l in 0..n {
                    acc += a.at(j, l) * a.at(k, l).conj();
                }
                acc + if j == k { c(0.5, 0.0) } else { c(0.0, 0.0) }
            });
            let f = cholesky(&g, 1e-12).unwrap();
            let d: Vec<Complex64> = (0..n)
                .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            let scaled: Vec<Complex64> = d.iter().map(|v| v * scale).collect();
            let s1 = whitened_norm(&d, &f).unwrap();
            let s2 = whitened_norm(&scaled, &f).unwrap();
            prop_assert!((s2 - scale.abs() * s1).abs() <= 1e-8 * (1.0 + s1));
        }

        #[test]
        fn whitened_identity_is_one_for_random_pd(seed in 0u64..200) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = rng.gen_range(1..=6);
            let a = ComplexMatrix::from_fn(n, n, |_, _| {
                c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            });
            let g = HermitianMatrix::from_fn(n, |j, k| {
                let mut acc = c(0.0, 0.0);
                for l in 0..n {
                    acc += a.at(j, l) * a.at(k, l).conj();
                }
                acc + if j == k { c(0.5, 0.0) } else { c(0.0, 0.0) }
            });
            let f = cholesky(&g, 1e-12).unwrap();
            let d = vec![c(1.0, 0.0); n];
            let s = whitened_norm(&d, &f).unwrap();
            prop_assert!((s - 1.0).abs() < 1e-9);
        }
    }
}
