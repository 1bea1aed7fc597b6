//! Similarity-floor experiments: the invariant sec(pi/2p) against computed
//! section norms.
//!
//! For a fast monotone multiplier on H^2(w), the best achievable uniform
//! power bound over the similarity orbit equals sec(pi/2p) with
//! p = sup{a : w^a is A2}. At section dimension M the experiment assembles
//! a sandwich around that floor: section power norms and tail-projection
//! norms from below, the section basis constant from above. Both legs are
//! finite-dimensional shadows, so the bracket is reported, never asserted
//! as a proof.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::gram::{build_gram, BasisRange};
use crate::kernels::{cholesky, whitened_norm};
use crate::multiplier::{basis_constant_section, power_norm, power_schedule, MultiplierSequence};
use crate::projection::GRAM_REL_TOL;
use crate::weights::{QuadratureConfig, WeightSpec};

/// Sandwich tolerance for the lower <= upper ordering check.
const ORDER_TOL: f64 = 1e-6;

/// How many schedule entries feed the power-norm leg of the lower bound.
const SCHEDULE_PREFIX: usize = 6;

/// Cap on the equivalence constant before two weights are declared not
/// equivalent.
pub const EQUIVALENCE_CAP: f64 = 1e6;

#[derive(Debug, Clone)]
pub struct SandwichReport {
    pub weight_id: String,
    /// Critical exponent p; infinite for weights equivalent to a constant.
    pub p: f64,
    /// sec(pi / 2p).
    pub floor: f64,
    /// max of section power norms over the schedule prefix and tail
    /// projection norms Q_n, n < M/2. A section lower bound for the
    /// similarity-invariant sup of power norms.
    pub lower: f64,
    /// Section basis constant; upper leg of the sandwich.
    pub upper: f64,
    pub section_dim: usize,
    /// Whether floor lies in [lower - tol, upper + tol]. At desk-scale
    /// sections the upper leg usually still sits below the floor for
    /// singular weights; the flag records it.
    pub floor_bracketed: bool,
}

pub fn sandwich(
    w: &WeightSpec,
    seq: &MultiplierSequence,
    m: usize,
    cfg: &QuadratureConfig,
) -> Result<SandwichReport> {
    if m < 4 || m > seq.len() {
        return Err(Error::InvalidConfig(format!(
            "section dim {m} must lie in [4, sequence length {}]",
            seq.len()
        )));
    }
    let p = w.critical_exponent()?;
    let floor = p.floor();
    let ft = w.fourier_coeffs(2 * m, cfg)?;
    let upper = basis_constant_section(&ft, m)?;

    let mut lower: f64 = 0.0;
    let schedule = power_schedule(seq);
    for idx in 0..schedule.len().min(SCHEDULE_PREFIX) {
        lower = lower.max(power_norm(seq, &ft, schedule.n(idx), m)?);
    }
    // Tail projections Q_n = I - P_n on the section.
    let range = BasisRange::new(0, m as i64 - 1);
    let chol = cholesky(&build_gram(&ft, range, range)?.to_hermitian()?, GRAM_REL_TOL)?;
    let mut diag = vec![Complex64::new(1.0, 0.0); m];
    for n in 0..m / 2 {
        diag[n] = Complex64::new(0.0, 0.0);
        lower = lower.max(whitened_norm(&diag, &chol)?);
    }

    if lower > upper + ORDER_TOL {
        return Err(Error::Internal(format!(
            "sandwich ordering violated: lower {lower} > upper {upper}"
        )));
    }
    Ok(SandwichReport {
        weight_id: w.id(),
        p: p.0,
        floor,
        lower,
        upper,
        section_dim: m,
        floor_bracketed: lower - ORDER_TOL <= floor && floor <= upper + ORDER_TOL,
    })
}

/// Paired sandwich for two equivalent weights, plus the measured
/// equivalence constant max(ess-sup v/w, ess-sup w/v) over the comparison
/// grid.
#[derive(Debug, Clone)]
pub struct EquivalenceReport {
    pub first: SandwichReport,
    pub second: SandwichReport,
    pub equivalence_constant: f64,
}

/// Comparison grid: midpoint-uniform nodes plus geometric approaches to
/// every singular point of either weight. A uniform grid alone cannot see
/// a power-law pole mismatch within any reasonable cap, so the refinement
/// toward the singularities carries the refutation.
fn comparison_grid(w: &WeightSpec, v: &WeightSpec, uniform: usize) -> Vec<f64> {
    let mut grid: Vec<f64> = (0..uniform)
        .map(|j| -PI + (j as f64 + 0.5) * 2.0 * PI / uniform as f64)
        .collect();
    let mut singular: Vec<f64> = w.singular_points();
    singular.extend(v.singular_points());
    singular.push(PI);
    singular.sort_by(|a, b| a.partial_cmp(b).unwrap());
    singular.dedup();
    for s in singular {
        for j in 3..48 {
            let off = 2f64.powi(-j);
            for cand in [s - off, s + off, -s - off, -s + off] {
                if cand > -PI && cand <= PI && cand != s && cand != -s {
                    grid.push(cand);
                }
            }
        }
    }
    grid
}

pub fn equivalent_weight_comparison(
    w: &WeightSpec,
    v: &WeightSpec,
    seq: &MultiplierSequence,
    m: usize,
    cfg: &QuadratureConfig,
    grid_size: usize,
) -> Result<EquivalenceReport> {
    let mut constant: f64 = 0.0;
    for theta in comparison_grid(w, v, grid_size) {
        let a = w.eval(theta)?;
        let b = v.eval(theta)?;
        // Exact zeros and poles only occur at the excluded singular
        // points; anything non-finite here is a genuine blow-up of the
        // ratio.
        let ratio = (a / b).max(b / a);
        if !ratio.is_finite() || ratio > EQUIVALENCE_CAP {
            return Err(Error::NotEquivalent {
                ratio,
                cap: EQUIVALENCE_CAP,
            });
        }
        constant = constant.max(ratio);
    }
    let first = sandwich(w, seq, m, cfg)?;
    let second = sandwich(v, seq, m, cfg)?;
    if (first.floor - second.floor).abs() > 1e-9 * first.floor {
        // Same critical exponent is necessary for equivalence; a finite
        // grid cannot always see the difference, the analytic exponents
        // can.
        return Err(Error::NotEquivalent {
            ratio: f64::INFINITY,
            cap: EQUIVALENCE_CAP,
        });
    }
    Ok(EquivalenceReport {
        first,
        second,
        equivalence_constant: constant,
    })
}
