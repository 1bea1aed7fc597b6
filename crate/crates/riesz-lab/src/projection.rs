//! Finite-section estimates of the Riesz projection norm via subspace
//! angles.
//!
//! On the section E = span{e_0..e_N}, F = span{e_-N..e_-1} of L^2(w), the
//! norm of the projection onto E along F is sec(phi), where sin(phi) is the
//! largest singular value of the whitened cross-Gram A^{-1/2} C B^{-1/2}.
//! Sections are nested, so sec(phi)(N) increases monotonically to the full
//! Riesz norm; every value reported here is a certified lower bound for
//! ||R||_w.

use crate::error::{Error, Result};
use crate::gram::{build_gram, BasisRange};
use crate::kernels::{self, cholesky, whiten_cross, CholeskyFactor};
use crate::weights::{FourierTable, QuadratureConfig, WeightSpec};

/// Cholesky positivity threshold used for all Gram factorizations.
pub const GRAM_REL_TOL: f64 = 1e-12;

/// Angle data for one section size.
#[derive(Debug, Clone, Copy)]
pub struct AngleResult {
    pub n: usize,
    pub sin_phi: f64,
    pub sec_phi: f64,
    /// Largest source diagonal over smallest Cholesky pivot, maximized over
    /// the two square Gram factors.
    pub cond_estimate: f64,
}

fn sec_from_sin(sin_phi: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&sin_phi) {
        return Err(Error::NotPositiveDefinite {
            pivot: 1.0 - sin_phi,
            index: 0,
            threshold: 0.0,
        });
    }
    Ok(1.0 / (1.0 - sin_phi * sin_phi).sqrt())
}

struct SectionFactors {
    chol_e: CholeskyFactor,
    chol_f: CholeskyFactor,
    cross: kernels::ComplexMatrix,
}

fn section_factors(ft: &FourierTable, n: usize) -> Result<SectionFactors> {
    assert!(n >= 1, "section size must be at least 1");
    let e_range = BasisRange::new(0, n as i64);
    let f_range = BasisRange::new(-(n as i64), -1);
    let gram_e = build_gram(ft, e_range, e_range)?;
    let gram_f = build_gram(ft, f_range, f_range)?;
    let cross = build_gram(ft, e_range, f_range)?;
    let chol_e = cholesky(&gram_e.to_hermitian()?, GRAM_REL_TOL)?;
    let chol_f = cholesky(&gram_f.to_hermitian()?, GRAM_REL_TOL)?;
    Ok(SectionFactors {
        chol_e,
        chol_f,
        cross: cross.matrix().clone(),
    })
}

/// sec(phi) on the symmetric section of size N; requires ft.k_max() >= 2N.
pub fn riesz_norm_section(ft: &FourierTable, n: usize) -> Result<AngleResult> {
    let f = section_factors(ft, n)?;
    let white = whiten_cross(&f.chol_e, &f.cross, &f.chol_f)?;
    let sin_phi = kernels::largest_singular_value_with_floor(
        &white,
        kernels::DEFAULT_TOL,
        kernels::DEFAULT_SIGMA_ABS_TOL,
        kernels::DEFAULT_MAX_ITER,
    )?;
    Ok(AngleResult {
        n,
        sin_phi,
        sec_phi: sec_from_sin(sin_phi)?,
        cond_estimate: f.chol_e.cond_estimate().max(f.chol_f.cond_estimate()),
    })
}

/// Norms of the oblique projection onto E along F and of its complement,
/// computed from the whitened cross-Gram and from its adjoint
/// independently. They agree in exact arithmetic; the pair is returned so
/// callers can check.
pub fn projection_norm_pair(ft: &FourierTable, n: usize) -> Result<(f64, f64)> {
    let f = section_factors(ft, n)?;
    let white = whiten_cross(&f.chol_e, &f.cross, &f.chol_f)?;
    let s_ef = kernels::largest_singular_value_with_floor(
        &white,
        kernels::DEFAULT_TOL,
        kernels::DEFAULT_SIGMA_ABS_TOL,
        kernels::DEFAULT_MAX_ITER,
    )?;
    let cross_fe = f.cross.conj_transpose();
    let white_fe = whiten_cross(&f.chol_f, &cross_fe, &f.chol_e)?;
    let s_fe = kernels::largest_singular_value_with_floor(
        &white_fe,
        kernels::DEFAULT_TOL,
        kernels::DEFAULT_SIGMA_ABS_TOL,
        kernels::DEFAULT_MAX_ITER,
    )?;
    Ok((sec_from_sin(s_ef)?, sec_from_sin(s_fe)?))
}

/// Raw section sequence plus an Aitken-accelerated limit estimate.
///
/// The acceleration is heuristic (no convergence rate is known for these
/// sections), so the raw values are always carried alongside and the
/// extrapolated number is marked experimental.
#[derive(Debug, Clone)]
pub struct ExtrapolationResult {
    pub raw: Vec<AngleResult>,
    /// Aitken delta-squared estimate from the last three sections; absent
    /// when the denominator degenerates.
    pub accelerated_experimental: Option<f64>,
}

pub fn riesz_norm_extrapolate(ft: &FourierTable, n_list: &[usize]) -> Result<ExtrapolationResult> {
    if n_list.len() < 3 {
        return Err(Error::InvalidConfig(
            "extrapolation needs at least three section sizes".into(),
        ));
    }
    if n_list.windows(2).any(|p| p[0] >= p[1]) {
        return Err(Error::InvalidConfig(
            "section sizes must be strictly increasing".into(),
        ));
    }
    let raw: Vec<AngleResult> = n_list
        .iter()
        .map(|&n| riesz_norm_section(ft, n))
        .collect::<Result<_>>()?;
    let k = raw.len();
    let (x0, x1, x2) = (raw[k - 3].sec_phi, raw[k - 2].sec_phi, raw[k - 1].sec_phi);
    let d1 = x1 - x0;
    let d2 = x2 - x1;
    let denom = d1 - d2;
    let accelerated = if denom.abs() > 1e-14 * x2.abs().max(1.0) {
        let aitken = x2 + d2 * d2 / denom;
        // Sections increase monotonically, so the limit cannot sit below
        // the last raw value.
        Some(aitken.max(x2))
    } else {
        None
    };
    Ok(ExtrapolationResult {
        raw,
        accelerated_experimental: accelerated,
    })
}

/// One row of an exponent scan: the weight w^a either produced a section
/// estimate or failed (non-integrable powers are reported, not fatal).
#[derive(Debug, Clone)]
pub struct ScanRow {
    pub exponent: f64,
    pub outcome: Result<AngleResult>,
}

/// sec(phi)(N) for the powers w^a over an increasing grid of exponents.
/// Rows fail independently; a failure for one exponent does not abort the
/// scan.
pub fn exponent_scan(
    w: &WeightSpec,
    a_grid: &[f64],
    n: usize,
    cfg: &QuadratureConfig,
) -> Result<Vec<ScanRow>> {
    if a_grid.windows(2).any(|p| p[0] >= p[1]) {
        return Err(Error::InvalidConfig(
            "exponent grid must be strictly increasing".into(),
        ));
    }
    Ok(a_grid
        .iter()
        .map(|&a| {
            let powered = WeightSpec::power_of(w.clone(), a);
            let outcome = powered
                .fourier_coeffs(2 * n, cfg)
                .and_then(|ft| riesz_norm_section(&ft, n));
            ScanRow {
                exponent: a,
                outcome,
            }
        })
        .collect())
}
