//! Certificate route to the Riesz projection norm.
//!
//! An analytic polynomial h with |w - h| <= s * w on the circle witnesses
//! ||R||_w <= (1 - s^2)^{-1/2}. This module searches for such certificates
//! by minimizing the worst-case relative deviation over a midpoint-offset
//! grid (a convex minimax problem, attacked by multiplicatively reweighted
//! least squares with a subgradient polish), and also constructs the
//! explicit certificate for the tan family from the boundary sector
//! function ((1-z)/(1+z))^alpha.
//!
//! Certificates are grid-certified: the deviation is measured at the grid
//! nodes only, and the resulting bound is reported as such.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::kernels::{cholesky, HermitianMatrix};
use crate::weights::WeightSpec;

/// A candidate analytic certificate h(theta) = sum c_k e^{i k theta}.
#[derive(Debug, Clone)]
pub struct AnalyticCertificate {
    pub degree: usize,
    pub coefficients: Vec<Complex64>,
    /// max over the grid of |w - h| / w. Values >= 1 mean the certificate
    /// proves nothing at this degree and grid.
    pub achieved_ratio: f64,
    pub grid_size: usize,
}

/// theta_j = -pi + (j + 1/2) * 2pi / M; misses the zeros and poles of every
/// weight family here as long as M is even.
pub fn offset_grid(m: usize) -> Vec<f64> {
    (0..m)
        .map(|j| -PI + (j as f64 + 0.5) * 2.0 * PI / m as f64)
        .collect()
}

fn weight_on_grid(w: &WeightSpec, grid: &[f64]) -> Result<Vec<f64>> {
    let values: Vec<f64> = grid
        .iter()
        .map(|&t| w.eval(t))
        .collect::<Result<Vec<f64>>>()?;
    if values.iter().any(|v| !v.is_finite() || *v <= 0.0) {
        return Err(Error::InvalidConfig(
            "evaluation grid hits a zero or pole of the weight; use an even grid size".into(),
        ));
    }
    Ok(values)
}

fn eval_poly(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for c in coeffs.iter().rev() {
        acc = acc * z + c;
    }
    acc
}

fn ratios(
    coeffs: &[Complex64],
    zs: &[Complex64],
    w_vals: &[f64],
    out: &mut [f64],
) {
    for ((&z, &wv), r) in zs.iter().zip(w_vals).zip(out.iter_mut()) {
        *r = (wv - eval_poly(coeffs, z)).norm() / wv;
    }
}

/// max over the offset grid of |w - h|/w for a coefficient vector.
pub fn measure_ratio(w: &WeightSpec, coeffs: &[Complex64], grid_size: usize) -> Result<f64> {
    let grid = offset_grid(grid_size);
    let w_vals = weight_on_grid(w, &grid)?;
    let zs: Vec<Complex64> = grid.iter().map(|&t| Complex64::from_polar(1.0, t)).collect();
    let mut r = vec![0.0; grid_size];
    ratios(coeffs, &zs, &w_vals, &mut r);
    Ok(r.iter().copied().fold(0.0, f64::max))
}

/// Upper bound sec(phi) = (1 - s^2)^{-1/2} certified by a ratio s < 1.
pub fn certificate_to_bound(cert: &AnalyticCertificate) -> Result<f64> {
    let s = cert.achieved_ratio;
    if !(0.0..1.0).contains(&s) {
        return Err(Error::SearchDiverged(s));
    }
    Ok(1.0 / (1.0 - s * s).sqrt())
}

/// Minimax certificate search.
///
/// Minimizes max_j |w_j - h_j| / w_j over complex coefficient vectors of
/// the given degree by Lawson-style multiplicative reweighting: each step
/// solves the weighted least-squares problem through its Hermitian-Toeplitz
/// normal equations, and the weights are raised by the residual magnitudes
/// (exponent 2 for the first half of the run, 1 afterwards). A short
/// deterministic subgradient polish follows. Returns the best iterate; the
/// whole run is a pure function of (w, degree, grid_size, iters).
pub fn hs_search(
    w: &WeightSpec,
    degree: usize,
    grid_size: usize,
    iters: usize,
) -> Result<AnalyticCertificate> {
    if grid_size < 2 * (degree + 1) {
        return Err(Error::InvalidConfig(format!(
            "grid of {grid_size} cannot resolve degree {degree}"
        )));
    }
    let grid = offset_grid(grid_size);
    let w_vals = weight_on_grid(w, &grid)?;
    let zs: Vec<Complex64> = grid.iter().map(|&t| Complex64::from_polar(1.0, t)).collect();
    let dim = degree + 1;

    let mut coeffs = vec![Complex64::new(0.0, 0.0); dim];
    coeffs[0] = Complex64::new(w_vals.iter().sum::<f64>() / grid_size as f64, 0.0);

    let mut r = vec![0.0; grid_size];
    ratios(&coeffs, &zs, &w_vals, &mut r);
    let mut best = coeffs.clone();
    let mut s_best = r.iter().copied().fold(0.0, f64::max);

    let mut eta = vec![1.0 / grid_size as f64; grid_size];
    let mut tau = vec![Complex64::new(0.0, 0.0); dim];
    let mut rhs = vec![Complex64::new(0.0, 0.0); dim];

    for iter in 0..iters {
        let beta = if iter < iters / 2 { 2.0 } else { 1.0 };
        ratios(&coeffs, &zs, &w_vals, &mut r);
        let mut total = 0.0;
        for (e, &rv) in eta.iter_mut().zip(r.iter()) {
            *e *= rv.max(1e-14).powf(beta);
            total += *e;
        }
        for e in eta.iter_mut() {
            *e /= total;
        }

        // Normal equations: T[k][l] = tau(l - k), tau(m) = sum eta/w^2 z^m,
        // rhs_k = sum (eta/w) z^{-k}.
        for v in tau.iter_mut() {
            *v = Complex64::new(0.0, 0.0);
        }
        for v in rhs.iter_mut() {
            *v = Complex64::new(0.0, 0.0);
        }
        for j in 0..grid_size {
            let base = eta[j] / (w_vals[j] * w_vals[j]);
            let rb = eta[j] / w_vals[j];
            let z = zs[j];
            let zc = z.conj();
            let mut pz = Complex64::new(1.0, 0.0);
            let mut pzc = Complex64::new(1.0, 0.0);
            for k in 0..dim {
                tau[k] += base * pz;
                rhs[k] += rb * pzc;
                pz *= z;
                pzc *= zc;
            }
        }
        // Small ridge keeps the normal matrix factorizable when the Lawson
        // weights concentrate on a few nodes.
        let ridge = 1e-12 * tau[0].re.max(f64::MIN_POSITIVE);
        let normal = HermitianMatrix::from_fn(dim, |j, k| {
            let v = tau[j - k].conj();
            if j == k {
                v + ridge
            } else {
                v
            }
        });
        let chol = match cholesky(&normal, 1e-15) {
            Ok(c) => c,
            // Extreme weight concentration; retry once with a heavy ridge.
            Err(_) => {
                let heavy = HermitianMatrix::from_fn(dim, |j, k| {
                    let v = tau[j - k].conj();
                    if j == k {
                        v + 1e-8 * tau[0].re
                    } else {
                        v
                    }
                });
                cholesky(&heavy, 1e-15)?
            }
        };
        let mut c_new = rhs.clone();
        chol.solve_in_place(&mut c_new);

        ratios(&c_new, &zs, &w_vals, &mut r);
        let s_new = r.iter().copied().fold(0.0, f64::max);
        if s_new < s_best {
            s_best = s_new;
            best.copy_from_slice(&c_new);
        }
        coeffs = c_new;
    }

    // Subgradient polish around the best iterate: push down the active
    // nodes, keep strictly improving steps.
    let polish_iters = (iters / 4).max(4);
    let mut trial = best.clone();
    for _ in 0..polish_iters {
        ratios(&best, &zs, &w_vals, &mut r);
        let s_cur = r.iter().copied().fold(0.0, f64::max);
        let mut dir = vec![Complex64::new(0.0, 0.0); dim];
        let mut n_active = 0usize;
        for j in 0..grid_size {
            if r[j] >= 0.995 * s_cur {
                n_active += 1;
                let h = eval_poly(&best, zs[j]);
                let rho = (w_vals[j] - h) / w_vals[j];
                let phase = rho / rho.norm().max(1e-300);
                let mut pzc = Complex64::new(1.0, 0.0);
                let zc = zs[j].conj();
                for d in dir.iter_mut() {
                    *d += phase * pzc / w_vals[j];
                    pzc *= zc;
                }
            }
        }
        if n_active == 0 {
            break;
        }
        let dn = dir.iter().map(|d| d.norm_sqr()).sum::<f64>().sqrt();
        if dn == 0.0 {
            break;
        }
        let cn = best.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt().max(1e-12);
        let mut improved = false;
        for exp in 2..=6 {
            let step = cn * 10f64.powi(-exp);
            for (t, (b, d)) in trial.iter_mut().zip(best.iter().zip(dir.iter())) {
                *t = b + step / dn * d;
            }
            ratios(&trial, &zs, &w_vals, &mut r);
            let s_trial = r.iter().copied().fold(0.0, f64::max);
            if s_trial < s_best {
                s_best = s_trial;
                best.copy_from_slice(&trial);
                improved = true;
                break;
            }
        }
        if !improved {
            break;
        }
    }

    if s_best >= 1.0 {
        return Err(Error::SearchDiverged(s_best));
    }
    Ok(AnalyticCertificate {
        degree,
        coefficients: best,
        achieved_ratio: s_best,
        grid_size,
    })
}

/// Taylor coefficients of f(z) = ((1-z)/(1+z))^alpha (principal branch,
/// f(0) = 1), from the first-order recurrence implied by
/// (1 - z^2) f' = -2 alpha f.
pub fn sector_series(alpha: f64, degree: usize) -> Vec<f64> {
    let mut f = vec![0.0; degree + 1];
    f[0] = 1.0;
    if degree >= 1 {
        f[1] = -2.0 * alpha;
    }
    for k in 1..degree {
        f[k + 1] = ((k as f64 - 1.0) * f[k - 1] - 2.0 * alpha * f[k]) / (k as f64 + 1.0);
    }
    f
}

/// The weight Re f = cos(alpha pi/2) |tan(theta/2)|^alpha certified by the
/// explicit sector construction.
pub fn sector_weight(alpha: f64) -> WeightSpec {
    WeightSpec::scaled(WeightSpec::tan_alpha(alpha), (alpha * PI / 2.0).cos())
}

/// Explicit certificate h = cos^2(alpha pi/2) * f truncated to the given
/// degree, measured against the sector weight on the offset grid.
///
/// For the untruncated f the deviation satisfies |w - h| = w sin(alpha
/// pi/2) pointwise, with no slack; truncation error therefore shows up
/// directly in the measured ratio, and grid nodes close to the zero of the
/// weight dominate it until degree ~ grid_size. The measured value is
/// reported as is, even when it exceeds 1.
pub fn explicit_sector_certificate(
    alpha: f64,
    degree: usize,
    grid_size: usize,
) -> Result<AnalyticCertificate> {
    if !(0.0 < alpha && alpha < 1.0) {
        return Err(Error::InvalidWeight(format!(
            "alpha must lie in (0,1), got {alpha}"
        )));
    }
    let phi = alpha * PI / 2.0;
    let scale = phi.cos() * phi.cos();
    let coefficients: Vec<Complex64> = sector_series(alpha, degree)
        .into_iter()
        .map(|c| Complex64::new(scale * c, 0.0))
        .collect();
    let achieved_ratio = measure_ratio(&sector_weight(alpha), &coefficients, grid_size)?;
    Ok(AnalyticCertificate {
        degree,
        coefficients,
        achieved_ratio,
        grid_size,
    })
}

/// Serializes a certificate in the interchange format: a header line
/// "degree D grid M ratio S", then one "re im" pair per coefficient.
pub fn serialize_certificate(cert: &AnalyticCertificate) -> String {
    let mut out = format!(
        "degree {} grid {} ratio {}\n",
        cert.degree, cert.grid_size, cert.achieved_ratio
    );
    for c in &cert.coefficients {
        out.push_str(&format!("{} {}\n", c.re, c.im));
    }
    out
}

pub fn parse_certificate(text: &str) -> Result<AnalyticCertificate> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::VerificationFailed("empty certificate file".into()))?;
    let parts: Vec<&str> = header.split_whitespace().collect();
    if parts.len() != 6 || parts[0] != "degree" || parts[2] != "grid" || parts[4] != "ratio" {
        return Err(Error::VerificationFailed(format!(
            "malformed header: {header:?}"
        )));
    }
    let degree: usize = parts[1]
        .parse()
        .map_err(|_| Error::VerificationFailed("bad degree".into()))?;
    let grid_size: usize = parts[3]
        .parse()
        .map_err(|_| Error::VerificationFailed("bad grid size".into()))?;
    let achieved_ratio: f64 = parts[5]
        .parse()
        .map_err(|_| Error::VerificationFailed("bad ratio".into()))?;
    let mut coefficients = Vec::with_capacity(degree + 1);
    for line in lines {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut it = line.split_whitespace();
        let re: f64 = it
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::VerificationFailed("bad coefficient".into()))?;
        let im: f64 = it
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::VerificationFailed("bad coefficient".into()))?;
        coefficients.push(Complex64::new(re, im));
    }
    if coefficients.len() != degree + 1 {
        return Err(Error::VerificationFailed(format!(
            "expected {} coefficients, found {}",
            degree + 1,
            coefficients.len()
        )));
    }
    Ok(AnalyticCertificate {
        degree,
        coefficients,
        achieved_ratio,
        grid_size,
    })
}

/// Re-measures a parsed certificate against the weight and checks the
/// stated ratio. The measurement is deterministic, so an honest file
/// reproduces its header value to rounding.
pub fn verify_certificate(w: &WeightSpec, cert: &AnalyticCertificate) -> Result<f64> {
    let measured = measure_ratio(w, &cert.coefficients, cert.grid_size)?;
    let tol = 1e-9 * cert.achieved_ratio.abs().max(1.0);
    if (measured - cert.achieved_ratio).abs() > tol {
        return Err(Error::VerificationFailed(format!(
            "stated ratio {} but measured {measured}",
            cert.achieved_ratio
        )));
    }
    if measured >= 1.0 {
        return Err(Error::VerificationFailed(format!(
            "ratio {measured} certifies nothing"
        )));
    }
    Ok(measured)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_weight_needs_only_the_mean() {
        let cert = hs_search(&WeightSpec::Constant(1.0), 0, 64, 10).unwrap();
        assert!((cert.coefficients[0].re - 1.0).abs() < 1e-8);
        assert!(cert.coefficients[0].im.abs() < 1e-10);
        assert!(cert.achieved_ratio < 1e-8);
        assert!((certificate_to_bound(&cert).unwrap() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn bound_arithmetic() {
        let mk = |s| AnalyticCertificate {
            degree: 0,
            coefficients: vec![Complex64::new(1.0, 0.0)],
            achieved_ratio: s,
            grid_size: 16,
        };
        assert!((certificate_to_bound(&mk(0.0)).unwrap() - 1.0).abs() < 1e-15);
        let s = (std::f64::consts::PI / 4.0).sin();
        assert!((certificate_to_bound(&mk(s)).unwrap() - 1.4142135623730951).abs() < 1e-12);
        assert!((certificate_to_bound(&mk(0.6)).unwrap() - 1.25).abs() < 1e-15);
        assert!(certificate_to_bound(&mk(1.3)).is_err());
    }

    #[test]
    fn sector_series_matches_binomial_convolution() {
        let alpha = 0.37;
        let d = 40;
        let f = sector_series(alpha, d);
        // Independent construction: convolution of (1-z)^alpha and
        // (1+z)^{-alpha} binomial expansions.
        let mut a = vec![0.0; d + 1];
        let mut b = vec![0.0; d + 1];
        a[0] = 1.0;
        b[0] = 1.0;
        for k in 1..=d {
            a[k] = -a[k - 1] * (alpha - k as f64 + 1.0) / k as f64;
            b[k] = b[k - 1] * (-alpha - k as f64 + 1.0) / k as f64;
        }
        for k in 0..=d {
            let conv: f64 = (0..=k).map(|j| a[j] * b[k - j]).sum();
            assert!((f[k] - conv).abs() < 1e-14, "k={k}: {} vs {conv}", f[k]);
        }
    }

    #[test]
    fn sector_series_evaluates_inside_the_disk() {
        // At z = i/2 the series converges geometrically; compare with the
        // closed form computed by polar arithmetic.
        let alpha = 0.5;
        let f = sector_series(alpha, 120);
        let z = Complex64::new(0.0, 0.5);
        let series = eval_poly(
            &f.iter().map(|&c| Complex64::new(c, 0.0)).collect::<Vec<_>>(),
            z,
        );
        let w = (Complex64::new(1.0, 0.0) - z) / (Complex64::new(1.0, 0.0) + z);
        let exact = Complex64::from_polar(w.norm().powf(alpha), alpha * w.arg());
        assert!((series - exact).norm() < 1e-12, "{series} vs {exact}");
    }

    #[test]
    fn explicit_certificate_ratio_shrinks_with_degree() {
        // Truncation error is oscillatory in the degree, but doubling from
        // 200 clearly helps on the 8192 grid (pilot: 1.8746 -> 0.9192).
        let s200 = explicit_sector_certificate(0.5, 200, 8192)
            .unwrap()
            .achieved_ratio;
        let s800 = explicit_sector_certificate(0.5, 800, 8192)
            .unwrap()
            .achieved_ratio;
        assert!(s800 <= s200, "{s800} vs {s200}");
    }

    #[test]
    fn explicit_certificate_is_tight_away_from_singularities() {
        // The grid maximum is dominated by truncation error at nodes next
        // to the zero (theta = 0) and pole (theta = pi) of the weight; in
        // between, the truncated certificate already sits within a few
        // percent of the exact deviation sin(phi).
        let alpha = 0.5;
        let cert = explicit_sector_certificate(alpha, 400, 8192).unwrap();
        let w = sector_weight(alpha);
        let grid = offset_grid(8192);
        let mut worst: f64 = 0.0;
        for &t in grid.iter().filter(|t| t.abs() > 0.5 && t.abs() < 2.5) {
            let wv = w.eval(t).unwrap();
            let h = eval_poly(&cert.coefficients, Complex64::from_polar(1.0, t));
            worst = worst.max((wv - h).norm() / wv);
        }
        let target = (alpha * PI / 2.0).sin();
        assert!(worst <= target + 0.03, "worst {worst} vs sin(phi) {target}");
        assert!(worst >= target - 0.02, "deviation cannot beat sin(phi)");
    }

    /// Small-configuration searches against pilot values (Lawson runs with
    /// the same schedule in an independent numpy implementation).
    #[test]
    fn search_matches_pilot_on_small_configs() {
        let cases = [(16usize, 0.757077), (32usize, 0.698698)];
        for (d, pilot) in cases {
            let cert = hs_search(&WeightSpec::tan_alpha(0.5), d, 512, 40).unwrap();
            assert!(
                cert.achieved_ratio <= pilot + 0.01,
                "D={d}: {} vs pilot {pilot}",
                cert.achieved_ratio
            );
            assert!(cert.achieved_ratio < 1.0);
        }
    }

    #[test]
    fn search_improves_with_degree_on_fixtures() {
        let step = WeightSpec::PiecewiseStep {
            levels: vec![1.0, 2.0],
            breakpoints: vec![0.0],
        };
        let s64 = hs_search(&step, 64, 1024, 40).unwrap().achieved_ratio;
        let s128 = hs_search(&step, 128, 1024, 40).unwrap().achieved_ratio;
        assert!(s128 <= s64 + 1e-12, "{s128} vs {s64}");

        let tan = WeightSpec::tan_alpha(0.5);
        let s16 = hs_search(&tan, 16, 512, 40).unwrap().achieved_ratio;
        let s32 = hs_search(&tan, 32, 512, 40).unwrap().achieved_ratio;
        assert!(s32 <= s16 + 1e-12, "{s32} vs {s16}");
    }

    #[test]
    fn certificate_roundtrip_and_tamper_detection() {
        let cert = hs_search(&WeightSpec::tan_alpha(0.5), 16, 512, 40).unwrap();
        let text = serialize_certificate(&cert);
        let parsed = parse_certificate(&text).unwrap();
        assert_eq!(parsed.degree, cert.degree);
        assert_eq!(parsed.grid_size, cert.grid_size);
        assert_eq!(parsed.achieved_ratio, cert.achieved_ratio);
        let w = WeightSpec::tan_alpha(0.5);
        verify_certificate(&w, &parsed).unwrap();

        let mut tampered = parsed.clone();
        tampered.coefficients[3] += Complex64::new(0.01, 0.0);
        assert!(matches!(
            verify_certificate(&w, &tampered),
            Err(Error::VerificationFailed(_))
        ));

        assert!(parse_certificate("degree x grid 4 ratio 0.5\n").is_err());
        assert!(parse_certificate("").is_err());
    }

    #[test]
    fn grid_too_small_for_degree_is_rejected() {
        assert!(matches!(
            hs_search(&WeightSpec::Constant(1.0), 100, 64, 5),
            Err(Error::InvalidConfig(_))
        ));
    }
}
