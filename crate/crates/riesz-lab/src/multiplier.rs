//! Fast monotone multiplier operators on H^2(w).
//!
//! T multiplies the k-th analytic Fourier mode by lambda_k, where
//! lambda_k = exp(-nu_k) increases to 1 fast enough that
//! (1 - lambda_{k+1})/(1 - lambda_k) -> 0. Everything here is computed on
//! the M-dimensional section span{e_0..e_{M-1}} in the L^2(w) inner
//! product, so all operator norms are certified lower bounds of their
//! H^2(w) counterparts. Powers of T stay diagonal, which reduces every
//! norm to a whitened singular-value problem.
//!
//! nu-values are carried in log space: the default family nu_n =
//! exp(-c n^2) underflows f64 near n = 28 while the quantities that matter
//! (power products n * nu_k) stay well scaled.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::gram::{build_gram, BasisRange};
use crate::kernels::{cholesky, whitened_norm, CholeskyFactor};
use crate::projection::GRAM_REL_TOL;
use crate::weights::FourierTable;

/// The materialized tail ratio (1 - lambda_{L-1})/(1 - lambda_{L-2}) must
/// fall below this for a sequence to count as fast.
pub const FAST_RATIO_THRESHOLD: f64 = 0.5;

/// A fast monotone multiplier sequence prefix.
#[derive(Debug, Clone)]
pub struct MultiplierSequence {
    /// ln(nu_k); exact even where nu_k itself underflows.
    log_nus: Vec<f64>,
    family: String,
}

impl MultiplierSequence {
    /// nu_n = exp(-c n^2): the default family; kappa_n = e^{(2n+1)c/2}
    /// grows without bound, so the fast condition holds with room.
    pub fn gauss(c: f64, len: usize) -> Result<Self> {
        if !(c > 0.0) || !c.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "gauss family needs c > 0, got {c}"
            )));
        }
        if len < 2 {
            return Err(Error::InvalidConfig("sequence needs length >= 2".into()));
        }
        let log_nus = (0..len).map(|n| -c * (n as f64) * (n as f64)).collect();
        let seq = Self {
            log_nus,
            family: format!("gauss[c={c}]"),
        };
        seq.check_fast()?;
        Ok(seq)
    }

    /// Custom prefix from explicit lambda values in (0, 1), strictly
    /// increasing; rejected unless the materialized tail satisfies the
    /// fast-decay threshold.
    pub fn from_lambdas(lambdas: &[f64]) -> Result<Self> {
        if lambdas.len() < 2 {
            return Err(Error::InvalidConfig("sequence needs length >= 2".into()));
        }
        if lambdas
            .iter()
            .any(|l| !(0.0 < *l && *l < 1.0) || !l.is_finite())
        {
            return Err(Error::InvalidConfig(
                "multiplier values must lie strictly inside (0, 1)".into(),
            ));
        }
        if lambdas.windows(2).any(|p| p[0] >= p[1]) {
            return Err(Error::InvalidConfig(
                "multiplier values must be strictly increasing".into(),
            ));
        }
        let log_nus = lambdas.iter().map(|l| (-l.ln()).ln()).collect();
        let seq = Self {
            log_nus,
            family: format!("custom[{}]", lambdas.len()),
        };
        seq.check_fast()?;
        Ok(seq)
    }

    fn check_fast(&self) -> Result<()> {
        let l = self.log_nus.len();
        let ratio = self.decay_ratio(l - 2);
        if !(ratio <= FAST_RATIO_THRESHOLD) {
            return Err(Error::NotFast {
                ratio,
                threshold: FAST_RATIO_THRESHOLD,
            });
        }
        Ok(())
    }

    /// (1 - lambda_{k+1}) / (1 - lambda_k), stable across the underflow
    /// regime.
    pub fn decay_ratio(&self, k: usize) -> f64 {
        let nu0 = self.nu(k);
        let nu1 = self.nu(k + 1);
        if nu0 < 1e-8 {
            // 1 - e^{-nu} = nu to this accuracy; use log differences.
            (self.log_nus[k + 1] - self.log_nus[k]).exp()
        } else {
            (-nu1).exp_m1() / (-nu0).exp_m1()
        }
    }

    pub fn len(&self) -> usize {
        self.log_nus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log_nus.is_empty()
    }

    pub fn family(&self) -> &str {
        &self.family
    }

    pub fn nu(&self, k: usize) -> f64 {
        self.log_nus[k].exp()
    }

    pub fn lambda(&self, k: usize) -> f64 {
        (-self.nu(k)).exp()
    }

    /// kappa_n = sqrt(nu_n / nu_{n+1}).
    pub fn kappa(&self, n: usize) -> f64 {
        (0.5 * (self.log_nus[n] - self.log_nus[n + 1])).exp()
    }

    /// lambda_k^power = exp(-power * nu_k); exact in the regime where
    /// lambda_k itself would round to 1.
    pub fn lambda_pow(&self, k: usize, power: f64) -> f64 {
        (-power * self.nu(k)).exp()
    }

    /// lambda_k^power - 1, kept accurate near zero.
    pub fn lambda_pow_minus_one(&self, k: usize, power: f64) -> f64 {
        (-power * self.nu(k)).exp_m1()
    }
}

/// N_n = greatest integer with N_n sqrt(nu_n nu_{n+1}) <= 1, stored as f64
/// because the entries outgrow u64 around n = 7 for the default family
/// (exact integers while below 2^53).
#[derive(Debug, Clone)]
pub struct PowerSchedule {
    entries: Vec<f64>,
}

impl PowerSchedule {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn n(&self, idx: usize) -> f64 {
        self.entries[idx]
    }
}

pub fn power_schedule(seq: &MultiplierSequence) -> PowerSchedule {
    let entries = (0..seq.len() - 1)
        .map(|n| {
            // 1/sqrt(nu_n nu_{n+1}) in log space.
            let log = -0.5 * (seq.log_nus[n] + seq.log_nus[n + 1]);
            log.exp().floor().max(1.0)
        })
        .collect();
    PowerSchedule { entries }
}

fn section_cholesky(ft: &FourierTable, m: usize) -> Result<CholeskyFactor> {
    let range = BasisRange::new(0, m as i64 - 1);
    let g = build_gram(ft, range, range)?;
    cholesky(&g.to_hermitian()?, GRAM_REL_TOL)
}

/// ||T^power|| on the M-section of H^2(w): the whitened norm of
/// diag(lambda_k^power).
pub fn power_norm(
    seq: &MultiplierSequence,
    ft: &FourierTable,
    power: f64,
    m: usize,
) -> Result<f64> {
    if m > seq.len() {
        return Err(Error::DimensionMismatch(format!(
            "section {m} exceeds sequence length {}",
            seq.len()
        )));
    }
    if power == 0.0 {
        return Ok(1.0);
    }
    let chol = section_cholesky(ft, m)?;
    let diag: Vec<Complex64> = (0..m)
        .map(|k| Complex64::new(seq.lambda_pow(k, power), 0.0))
        .collect();
    whitened_norm(&diag, &chol)
}

/// ||T^{N_n} - Q_n|| on the M-section, with the closed-form decay bound
/// b (b lambda_n^{N_n} + (b+1)(1 - lambda_{n+1}^{N_n})), where b bounds the
/// basis constant of the weight.
#[derive(Debug, Clone, Copy)]
pub struct TailGap {
    pub n: usize,
    pub power: f64,
    pub gap: f64,
    pub analytic_bound: f64,
    /// Set when the section barely extends past n, so the tail part of the
    /// operator is represented by at most one coordinate.
    pub truncation_dominated: bool,
}

pub fn tail_gap(
    seq: &MultiplierSequence,
    ft: &FourierTable,
    n: usize,
    m: usize,
    basis_bound: f64,
) -> Result<TailGap> {
    if n + 1 >= m {
        return Err(Error::DimensionMismatch(format!(
            "tail index {n} needs section larger than {}",
            n + 1
        )));
    }
    if m > seq.len() {
        return Err(Error::DimensionMismatch(format!(
            "section {m} exceeds sequence length {}",
            seq.len()
        )));
    }
    let schedule = power_schedule(seq);
    let power = schedule.n(n);
    let chol = section_cholesky(ft, m)?;
    let diag: Vec<Complex64> = (0..m)
        .map(|k| {
            let v = if k <= n {
                seq.lambda_pow(k, power)
            } else {
                seq.lambda_pow_minus_one(k, power)
            };
            Complex64::new(v, 0.0)
        })
        .collect();
    let gap = whitened_norm(&diag, &chol)?;
    let b = basis_bound;
    let analytic_bound =
        b * (b * seq.lambda_pow(n, power) + (b + 1.0) * (-seq.lambda_pow_minus_one(n + 1, power)));
    Ok(TailGap {
        n,
        power,
        gap,
        analytic_bound,
        truncation_dominated: n + 2 >= m,
    })
}

/// max_{0 <= n < M} || P_n || on the M-section: the basis constant of the
/// exponential basis in H^2(w), truncated to the section.
pub fn basis_constant_section(ft: &FourierTable, m: usize) -> Result<f64> {
    let chol = section_cholesky(ft, m)?;
    let mut best: f64 = 0.0;
    let mut diag = vec![Complex64::new(0.0, 0.0); m];
    for n in 0..m {
        diag[n] = Complex64::new(1.0, 0.0);
        let v = whitened_norm(&diag, &chol)?;
        best = best.max(v);
    }
    Ok(best)
}

/// Whitened norm of diag(epsilon) for a sign pattern epsilon in {-1, +1}^M.
pub fn sign_multiplier_norm(ft: &FourierTable, signs: &[f64]) -> Result<f64> {
    if signs.iter().any(|s| s.abs() != 1.0) {
        return Err(Error::InvalidConfig(
            "sign pattern entries must be +1 or -1".into(),
        ));
    }
    let chol = section_cholesky(ft, signs.len())?;
    let diag: Vec<Complex64> = signs.iter().map(|&s| Complex64::new(s, 0.0)).collect();
    whitened_norm(&diag, &chol)
}

/// Deterministic seeded sign patterns for the growth experiments.
pub fn random_sign_patterns(count: usize, m: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            (0..m)
                .map(|_| if rng.gen::<bool>() { 1.0 } else { -1.0 })
                .collect()
        })
        .collect()
}
