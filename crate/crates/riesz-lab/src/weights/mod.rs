//! Weight families on the circle and their Fourier coefficients.
//!
//! A weight is a nonnegative integrable function on (-pi, pi], positive on
//! a set of positive measure. The families here are the closed-form ones
//! used throughout: |tan(theta/2)|^alpha (zero at 0, pole at +-pi),
//! |theta|^alpha, positive step functions, powers and positive multiples of
//! these, and externally sampled grids. Fourier coefficients use the
//! convention w_hat(m) = integral of w(theta) e^{-i m theta} dtheta / 2pi;
//! step families are integrated in closed form, smooth singular families by
//! panel-split tanh-sinh quadrature, sampled ones by periodic trapezoid.

pub mod quad;

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
pub use quad::QuadratureConfig;

/// Reject Fourier tables whose mean drops below this: the weight carries no
/// mass and every Gram matrix downstream would be singular.
const MIN_MEAN: f64 = 1e-14;

/// Symbolic weight on the circle.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightSpec {
    /// w = value everywhere.
    Constant(f64),
    /// w(theta) = |tan(theta/2)|^alpha, alpha in (0,1).
    TanAlpha { alpha: f64 },
    /// w(theta) = |theta|^alpha, alpha in (0,1).
    AbsThetaAlpha { alpha: f64 },
    /// Pointwise power of another weight.
    PowerOf { base: Box<WeightSpec>, exponent: f64 },
    /// levels[i] on (breakpoints[i-1], breakpoints[i]], with the outer
    /// pieces running to -pi and pi.
    PiecewiseStep {
        levels: Vec<f64>,
        breakpoints: Vec<f64>,
    },
    /// Piecewise-linear interpolation through strictly increasing nodes.
    Sampled { thetas: Vec<f64>, values: Vec<f64> },
    /// Positive multiple of another weight.
    Scaled { base: Box<WeightSpec>, factor: f64 },
}

/// Fourier coefficients w_hat(m), m = -k_max..k_max, with w_hat(-m) the
/// exact conjugate of w_hat(m) by construction.
#[derive(Debug, Clone)]
pub struct FourierTable {
    k_max: i64,
    /// Index m stored at position (m + k_max).
    coeffs: Vec<Complex64>,
}

impl FourierTable {
    /// Builds from coefficients for m = 0..=k_max, mirroring by conjugation.
    pub fn from_nonnegative(nonneg: Vec<Complex64>) -> Result<Self> {
        if nonneg.is_empty() {
            return Err(Error::InvalidWeight("empty coefficient list".into()));
        }
        let k_max = (nonneg.len() - 1) as i64;
        if nonneg.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::QuadratureFailure(
                "non-finite Fourier coefficient".into(),
            ));
        }
        let mean = nonneg[0].re;
        if mean <= MIN_MEAN {
            return Err(Error::InvalidWeight(format!(
                "weight mean {mean:.3e} is not strictly positive"
            )));
        }
        let mut coeffs = vec![Complex64::new(0.0, 0.0); 2 * nonneg.len() - 1];
        for (m, &c) in nonneg.iter().enumerate() {
            let c = if m == 0 { Complex64::new(c.re, 0.0) } else { c };
            coeffs[(k_max + m as i64) as usize] = c;
            coeffs[(k_max - m as i64) as usize] = c.conj();
        }
        Ok(Self { k_max, coeffs })
    }

    pub fn k_max(&self) -> i64 {
        self.k_max
    }

    pub fn coeff(&self, m: i64) -> Result<Complex64> {
        if m.abs() > self.k_max {
            return Err(Error::InsufficientCoefficients {
                needed: m.abs(),
                have: self.k_max,
            });
        }
        Ok(self.coeffs[(m + self.k_max) as usize])
    }

    pub fn mean(&self) -> f64 {
        self.coeffs[self.k_max as usize].re
    }
}

/// The similarity-orbit exponent p = sup{a > 0 : w^a is an A2 weight};
/// `f64::INFINITY` when every power stays A2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalExponent(pub f64);

impl CriticalExponent {
    pub fn is_finite(&self) -> bool {
        self.0.is_finite()
    }

    /// The similarity floor sec(pi / 2p); 1 when p is infinite.
    pub fn floor(&self) -> f64 {
        if self.0.is_finite() {
            1.0 / (PI / (2.0 * self.0)).cos()
        } else {
            1.0
        }
    }
}

impl WeightSpec {
    pub fn tan_alpha(alpha: f64) -> Self {
        WeightSpec::TanAlpha { alpha }
    }

    pub fn abs_theta_alpha(alpha: f64) -> Self {
        WeightSpec::AbsThetaAlpha { alpha }
    }

    pub fn power_of(base: WeightSpec, exponent: f64) -> Self {
        WeightSpec::PowerOf {
            base: Box::new(base),
            exponent,
        }
    }

    pub fn scaled(base: WeightSpec, factor: f64) -> Self {
        WeightSpec::Scaled {
            base: Box::new(base),
            factor,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            WeightSpec::Constant(v) => {
                if !v.is_finite() || *v <= 0.0 {
                    return Err(Error::InvalidWeight(format!(
                        "constant level must be positive, got {v}"
                    )));
                }
            }
            WeightSpec::TanAlpha { alpha } | WeightSpec::AbsThetaAlpha { alpha } => {
                if !(0.0 < *alpha && *alpha < 1.0) {
                    return Err(Error::InvalidWeight(format!(
                        "alpha must lie in (0, 1), got {alpha}"
                    )));
                }
            }
            WeightSpec::PowerOf { base, exponent } => {
                if !exponent.is_finite() {
                    return Err(Error::InvalidWeight("power exponent must be finite".into()));
                }
                base.validate()?;
            }
            WeightSpec::PiecewiseStep {
                levels,
                breakpoints,
            } => {
                if levels.len() != breakpoints.len() + 1 {
                    return Err(Error::InvalidWeight(format!(
                        "{} levels need {} breakpoints, got {}",
                        levels.len(),
                        levels.len() - 1,
                        breakpoints.len()
                    )));
                }
                if levels.iter().any(|l| !l.is_finite() || *l <= 0.0) {
                    return Err(Error::InvalidWeight(
                        "step levels must be strictly positive".into(),
                    ));
                }
                if breakpoints.windows(2).any(|p| p[0] >= p[1])
                    || breakpoints.iter().any(|b| *b <= -PI || *b >= PI)
                {
                    return Err(Error::InvalidWeight(
                        "breakpoints must be strictly increasing inside (-pi, pi)".into(),
                    ));
                }
            }
            WeightSpec::Sampled { thetas, values } => {
                if thetas.len() != values.len() || thetas.len() < 2 {
                    return Err(Error::InvalidWeight(
                        "sampled weight needs at least two (theta, value) pairs".into(),
                    ));
                }
                if thetas.windows(2).any(|p| p[0] >= p[1]) {
                    return Err(Error::InvalidWeight(
                        "sample thetas must be strictly increasing".into(),
                    ));
                }
                if thetas[0] <= -PI || *thetas.last().unwrap() > PI {
                    return Err(Error::InvalidWeight(
                        "sample thetas must lie in (-pi, pi]".into(),
                    ));
                }
                if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
                    return Err(Error::InvalidWeight(
                        "sample values must be finite and nonnegative".into(),
                    ));
                }
                if values.iter().all(|v| *v == 0.0) {
                    return Err(Error::InvalidWeight(
                        "sampled weight must be positive somewhere".into(),
                    ));
                }
            }
            WeightSpec::Scaled { base, factor } => {
                if !factor.is_finite() || *factor <= 0.0 {
                    return Err(Error::InvalidWeight(format!(
                        "scale factor must be positive, got {factor}"
                    )));
                }
                base.validate()?;
            }
        }
        Ok(())
    }

    /// Pointwise value; +infinity exactly at poles (e.g. theta = pi for the
    /// tan family).
    pub fn eval(&self, theta: f64) -> Result<f64> {
        if !(theta > -PI && theta <= PI) {
            return Err(Error::DomainError(theta));
        }
        Ok(self.eval_unchecked(theta))
    }

    fn eval_unchecked(&self, theta: f64) -> f64 {
        match self {
            WeightSpec::Constant(v) => *v,
            WeightSpec::TanAlpha { alpha } => {
                if theta == PI || theta == -PI {
                    f64::INFINITY
                } else {
                    (theta / 2.0).tan().abs().powf(*alpha)
                }
            }
            WeightSpec::AbsThetaAlpha { alpha } => theta.abs().powf(*alpha),
            WeightSpec::PowerOf { base, exponent } => base.eval_unchecked(theta).powf(*exponent),
            WeightSpec::PiecewiseStep {
                levels,
                breakpoints,
            } => {
                let idx = breakpoints.partition_point(|b| *b < theta);
                levels[idx]
            }
            WeightSpec::Sampled { thetas, values } => {
                // Periodic linear interpolation.
                let n = thetas.len();
                let idx = thetas.partition_point(|t| *t < theta);
                let (t0, v0, t1, v1) = if idx == 0 {
                    (thetas[n - 1] - 2.0 * PI, values[n - 1], thetas[0], values[0])
                } else if idx == n {
                    (thetas[n - 1], values[n - 1], thetas[0] + 2.0 * PI, values[0])
                } else {
                    (thetas[idx - 1], values[idx - 1], thetas[idx], values[idx])
                };
                let frac = (theta - t0) / (t1 - t0);
                v0 + frac * (v1 - v0)
            }
            WeightSpec::Scaled { base, factor } => factor * base.eval_unchecked(theta),
        }
    }

    /// Evaluation for quadrature nodes, taking the distances to 0 and +-pi
    /// as separately computed quantities: near a pole the distance carries
    /// more precision than the node itself.
    fn eval_singular(&self, x: f64, dist0: f64, dist_pi: f64) -> f64 {
        match self {
            WeightSpec::TanAlpha { alpha } => {
                // |tan(x/2)| = tan(|x|/2), and near the pole cot(d/2) in the
                // distance d to +-pi.
                if dist0 <= dist_pi {
                    (dist0 / 2.0).tan().powf(*alpha)
                } else {
                    (dist_pi / 2.0).tan().powf(*alpha).recip()
                }
            }
            WeightSpec::AbsThetaAlpha { alpha } => dist0.powf(*alpha),
            WeightSpec::PowerOf { base, exponent } => {
                base.eval_singular(x, dist0, dist_pi).powf(*exponent)
            }
            WeightSpec::Scaled { base, factor } => factor * base.eval_singular(x, dist0, dist_pi),
            other => other.eval_unchecked(x),
        }
    }

    /// Local power-law exponents at the candidate singular points 0 and
    /// +-pi: w ~ |theta - p|^e near p. Integrability requires e > -1.
    fn local_exponents(&self) -> (f64, f64) {
        match self {
            WeightSpec::Constant(_) | WeightSpec::PiecewiseStep { .. } | WeightSpec::Sampled { .. } => {
                (0.0, 0.0)
            }
            WeightSpec::TanAlpha { alpha } => (*alpha, -*alpha),
            WeightSpec::AbsThetaAlpha { alpha } => (*alpha, 0.0),
            WeightSpec::PowerOf { base, exponent } => {
                let (z, p) = base.local_exponents();
                (z * exponent, p * exponent)
            }
            WeightSpec::Scaled { base, .. } => base.local_exponents(),
        }
    }

    /// Interior points where the weight or one of its derivatives blows up;
    /// quadrature panels split here, and comparison grids refine toward
    /// them.
    pub fn singular_points(&self) -> Vec<f64> {
        let (e0, epi) = self.local_exponents();
        let mut pts = Vec::new();
        if e0 != 0.0 {
            pts.push(0.0);
        }
        if epi != 0.0 {
            pts.push(PI);
        }
        pts
    }

    fn is_integrable(&self) -> bool {
        let (e0, epi) = self.local_exponents();
        e0 > -1.0 && epi > -1.0
    }

    /// Step-function view, when the family reduces to one.
    fn as_step(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        match self {
            WeightSpec::Constant(v) => Some((vec![*v], vec![])),
            WeightSpec::PiecewiseStep {
                levels,
                breakpoints,
            } => Some((levels.clone(), breakpoints.clone())),
            WeightSpec::PowerOf { base, exponent } => base.as_step().map(|(levels, b)| {
                (levels.iter().map(|l| l.powf(*exponent)).collect(), b)
            }),
            WeightSpec::Scaled { base, factor } => base
                .as_step()
                .map(|(levels, b)| (levels.iter().map(|l| l * factor).collect(), b)),
            _ => None,
        }
    }

    fn is_sampled(&self) -> bool {
        match self {
            WeightSpec::Sampled { .. } => true,
            WeightSpec::PowerOf { base, .. } | WeightSpec::Scaled { base, .. } => base.is_sampled(),
            _ => false,
        }
    }

    /// Fourier coefficients for m = -k_max..k_max.
    pub fn fourier_coeffs(&self, k_max: usize, cfg: &QuadratureConfig) -> Result<FourierTable> {
        self.validate()?;
        if !self.is_integrable() {
            return Err(Error::QuadratureFailure(format!(
                "weight is not integrable (local exponents {:?})",
                self.local_exponents()
            )));
        }
        let nonneg = if let Some((levels, breaks)) = self.as_step() {
            step_coeffs(&levels, &breaks, k_max)
        } else if self.is_sampled() {
            self.trapezoid_coeffs(k_max)
        } else {
            self.quadrature_coeffs(k_max, cfg)?
        };
        FourierTable::from_nonnegative(nonneg)
    }

    fn quadrature_coeffs(&self, k_max: usize, cfg: &QuadratureConfig) -> Result<Vec<Complex64>> {
        let mut cuts: Vec<f64> = self
            .singular_points()
            .into_iter()
            .filter(|p| p.abs() < PI)
            .collect();
        cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut edges = vec![-PI];
        edges.extend(cuts);
        edges.push(PI);
        let n_panels = edges.len() - 1;
        let panel_tol = cfg.abs_tol * PI / n_panels as f64;

        let mut total = vec![Complex64::new(0.0, 0.0); k_max + 1];
        for pair in edges.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            let f = |x: f64, da: f64, db: f64| {
                let dist0 = if a == 0.0 {
                    da
                } else if b == 0.0 {
                    db
                } else {
                    x.abs()
                };
                let dist_pi = if b == PI {
                    db
                } else if a == -PI {
                    da
                } else {
                    PI - x.abs()
                };
                self.eval_singular(x, dist0, dist_pi)
            };
            let part = quad::fourier_panel(&f, a, b, k_max, panel_tol, cfg)?;
            for (t, p) in total.iter_mut().zip(part) {
                *t += p;
            }
        }
        for t in total.iter_mut() {
            *t /= 2.0 * PI;
        }
        Ok(total)
    }

    /// Periodic trapezoid on the sample nodes; accuracy is the caller's
    /// grid, not certified here.
    fn trapezoid_coeffs(&self, k_max: usize) -> Vec<Complex64> {
        let (thetas, values) = self.sample_nodes();
        let n = thetas.len();
        let mut out = vec![Complex64::new(0.0, 0.0); k_max + 1];
        for i in 0..n {
            let (t0, v0) = (thetas[i], values[i]);
            let (t1, v1) = if i + 1 < n {
                (thetas[i + 1], values[i + 1])
            } else {
                (thetas[0] + 2.0 * PI, values[0])
            };
            let dt = t1 - t0;
            for (m, o) in out.iter_mut().enumerate() {
                let p0 = Complex64::from_polar(1.0, -(m as f64) * t0);
                let p1 = Complex64::from_polar(1.0, -(m as f64) * t1);
                *o += 0.5 * dt * (v0 * p0 + v1 * p1);
            }
        }
        for o in out.iter_mut() {
            *o /= 2.0 * PI;
        }
        out
    }

    fn sample_nodes(&self) -> (Vec<f64>, Vec<f64>) {
        match self {
            WeightSpec::Sampled { thetas, values } => (thetas.clone(), values.clone()),
            WeightSpec::PowerOf { base, exponent } => {
                let (t, v) = base.sample_nodes();
                (t, v.iter().map(|x| x.powf(*exponent)).collect())
            }
            WeightSpec::Scaled { base, factor } => {
                let (t, v) = base.sample_nodes();
                (t, v.iter().map(|x| x * factor).collect())
            }
            _ => unreachable!("sample_nodes called on non-sampled weight"),
        }
    }

    /// p = sup{a > 0 : w^a in A2}, for the families where it is known.
    pub fn critical_exponent(&self) -> Result<CriticalExponent> {
        match self {
            WeightSpec::Constant(_) | WeightSpec::PiecewiseStep { .. } => {
                Ok(CriticalExponent(f64::INFINITY))
            }
            WeightSpec::TanAlpha { alpha } | WeightSpec::AbsThetaAlpha { alpha } => {
                Ok(CriticalExponent(1.0 / alpha))
            }
            WeightSpec::PowerOf { base, exponent } => {
                if *exponent == 0.0 {
                    return Ok(CriticalExponent(f64::INFINITY));
                }
                let p = base.critical_exponent()?;
                Ok(CriticalExponent(p.0 / exponent.abs()))
            }
            WeightSpec::Scaled { base, .. } => base.critical_exponent(),
            WeightSpec::Sampled { .. } => Err(Error::Unsupported(
                "critical exponent of a sampled weight; only a numerical scan is available".into(),
            )),
        }
    }

    /// Innermost family parameter, for reporting.
    pub fn alpha(&self) -> Option<f64> {
        match self {
            WeightSpec::TanAlpha { alpha } | WeightSpec::AbsThetaAlpha { alpha } => Some(*alpha),
            WeightSpec::PowerOf { base, .. } | WeightSpec::Scaled { base, .. } => base.alpha(),
            _ => None,
        }
    }

    /// Compact identifier for CSV output.
    pub fn id(&self) -> String {
        match self {
            WeightSpec::Constant(v) => {
                if *v == 1.0 {
                    "constant".into()
                } else {
                    format!("constant[{v}]")
                }
            }
            WeightSpec::TanAlpha { .. } => "tan-alpha".into(),
            WeightSpec::AbsThetaAlpha { .. } => "abs-theta-alpha".into(),
            WeightSpec::PowerOf { base, exponent } => format!("pow[{};{exponent}]", base.id()),
            WeightSpec::PiecewiseStep { levels, .. } => format!("step[{}]", levels.len()),
            WeightSpec::Sampled { thetas, .. } => format!("sampled[{}]", thetas.len()),
            WeightSpec::Scaled { base, factor } => format!("scaled[{};{factor}]", base.id()),
        }
    }
}

/// Closed-form coefficients of a step function; exact up to rounding.
fn step_coeffs(levels: &[f64], breaks: &[f64], k_max: usize) -> Vec<Complex64> {
    let mut edges = vec![-PI];
    edges.extend_from_slice(breaks);
    edges.push(PI);
    let mut out = vec![Complex64::new(0.0, 0.0); k_max + 1];
    for (i, level) in levels.iter().enumerate() {
        let (a, b) = (edges[i], edges[i + 1]);
        out[0] += level * (b - a);
        for (m, o) in out.iter_mut().enumerate().skip(1) {
            // integral of e^{-im theta} over (a, b).
            let im = Complex64::new(0.0, m as f64);
            let seg = (Complex64::from_polar(1.0, -(m as f64) * a)
                - Complex64::from_polar(1.0, -(m as f64) * b))
                / im;
            *o += level * seg;
        }
    }
    for o in out.iter_mut() {
        *o /= 2.0 * PI;
    }
    out
}

/// Parses the sampled-weight interchange format: one "theta value" pair per
/// line, theta strictly increasing in (-pi, pi]. Blank lines and lines
/// starting with '#' are skipped.
pub fn parse_sampled(text: &str) -> Result<WeightSpec> {
    let mut thetas = Vec::new();
    let mut values = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split_whitespace();
        let theta: f64 = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::InvalidWeight(format!("line {}: bad theta", lineno + 1)))?;
        let value: f64 = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::InvalidWeight(format!("line {}: bad value", lineno + 1)))?;
        if parts.next().is_some() {
            return Err(Error::InvalidWeight(format!(
                "line {}: expected exactly two fields",
                lineno + 1
            )));
        }
        thetas.push(theta);
        values.push(value);
    }
    let w = WeightSpec::Sampled { thetas, values };
    w.validate()?;
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sec(x: f64) -> f64 {
        1.0 / x.cos()
    }

    /// Taylor coefficients of ((1-z)/(1+z))^alpha; the closed-form route to
    /// the Fourier coefficients of the tan family, independent of the
    /// quadrature path: w_hat(0) = sec(alpha pi/2), w_hat(m) = f_m /
    /// (2 cos(alpha pi/2)) for m >= 1.
    fn sector_series(alpha: f64, k: usize) -> Vec<f64> {
        let mut f = vec![0.0; k + 1];
        f[0] = 1.0;
        if k >= 1 {
            f[1] = -2.0 * alpha;
        }
        for j in 1..k {
            f[j + 1] = ((j as f64 - 1.0) * f[j - 1] - 2.0 * alpha * f[j]) / (j as f64 + 1.0);
        }
        f
    }

    fn tan_closed_form(alpha: f64, k: usize) -> Vec<f64> {
        let phi = alpha * PI / 2.0;
        let f = sector_series(alpha, k);
        let mut out: Vec<f64> = f.iter().map(|c| c / (2.0 * phi.cos())).collect();
        out[0] = sec(phi);
        out
    }

    #[test]
    fn eval_basics() {
        let w = WeightSpec::Constant(1.0);
        assert_eq!(w.eval(1.0).unwrap(), 1.0);

        let w = WeightSpec::tan_alpha(0.5);
        assert!((w.eval(PI / 2.0).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(w.eval(PI).unwrap(), f64::INFINITY);
        assert_eq!(w.eval(0.0).unwrap(), 0.0);

        let w = WeightSpec::abs_theta_alpha(0.5);
        assert!((w.eval(-0.25).unwrap() - 0.5).abs() < 1e-15);

        assert!(matches!(
            WeightSpec::Constant(1.0).eval(4.0),
            Err(Error::DomainError(_))
        ));
        assert!(matches!(
            WeightSpec::Constant(1.0).eval(-PI),
            Err(Error::DomainError(_))
        ));
    }

    #[test]
    fn validation_rejects_bad_specs() {
        assert!(WeightSpec::tan_alpha(1.5).validate().is_err());
        assert!(WeightSpec::tan_alpha(0.0).validate().is_err());
        assert!(WeightSpec::Constant(-1.0).validate().is_err());
        assert!(WeightSpec::PiecewiseStep {
            levels: vec![1.0, 0.0],
            breakpoints: vec![0.0]
        }
        .validate()
        .is_err());
        assert!(WeightSpec::tan_alpha(0.3).validate().is_ok());
    }

    #[test]
    fn constant_coeffs_are_orthonormal() {
        let ft = WeightSpec::Constant(1.0)
            .fourier_coeffs(4, &QuadratureConfig::default())
            .unwrap();
        assert!((ft.coeff(0).unwrap().re - 1.0).abs() < 1e-15);
        for m in 1..=4 {
            assert!(ft.coeff(m).unwrap().norm() < 1e-15);
            assert!(ft.coeff(-m).unwrap().norm() < 1e-15);
        }
    }

    #[test]
    fn tan_alpha_mean_matches_secant() {
        // closed form: mean of |tan(theta/2)|^alpha = sec(alpha pi / 2).
        let ft = WeightSpec::tan_alpha(0.5)
            .fourier_coeffs(0, &QuadratureConfig::default())
            .unwrap();
        assert!(
            (ft.mean() - sec(PI / 4.0)).abs() < 1e-8,
            "mean {} vs {}",
            ft.mean(),
            sec(PI / 4.0)
        );
    }

    #[test]
    fn tan_alpha_quadrature_matches_series_route() {
        for &alpha in &[0.2, 0.5, 0.8] {
            let k = 48;
            let ft = WeightSpec::tan_alpha(alpha)
                .fourier_coeffs(k, &QuadratureConfig::default())
                .unwrap();
            let closed = tan_closed_form(alpha, k);
            for m in 0..=k {
                let got = ft.coeff(m as i64).unwrap();
                assert!(
                    (got.re - closed[m]).abs() < 5e-10 && got.im.abs() < 5e-10,
                    "alpha={alpha} m={m}: {got} vs {}",
                    closed[m]
                );
            }
        }
    }

    #[test]
    fn abs_theta_mean_closed_form() {
        // mean of |theta|^alpha = pi^alpha / (alpha + 1).
        for &alpha in &[0.25, 0.5, 0.75] {
            let ft = WeightSpec::abs_theta_alpha(alpha)
                .fourier_coeffs(0, &QuadratureConfig::default())
                .unwrap();
            let expect = PI.powf(alpha) / (alpha + 1.0);
            assert!((ft.mean() - expect).abs() < 1e-9, "alpha={alpha}");
        }
    }

    #[test]
    fn step_coeffs_closed_form() {
        let w = WeightSpec::PiecewiseStep {
            levels: vec![1.0, 2.0],
            breakpoints: vec![0.0],
        };
        let ft = w.fourier_coeffs(4, &QuadratureConfig::default()).unwrap();
        assert!((ft.coeff(0).unwrap().re - 1.5).abs() < 1e-15);
        let c1 = ft.coeff(1).unwrap();
        assert!((c1 - Complex64::new(0.0, -1.0 / PI)).norm() < 1e-15);
        let cm1 = ft.coeff(-1).unwrap();
        assert!((cm1 - Complex64::new(0.0, 1.0 / PI)).norm() < 1e-15);
        assert!(ft.coeff(2).unwrap().norm() < 1e-15);
    }

    #[test]
    fn hermitian_symmetry_is_exact() {
        let ft = WeightSpec::tan_alpha(0.3)
            .fourier_coeffs(16, &QuadratureConfig::default())
            .unwrap();
        for m in 0..=16 {
            let a = ft.coeff(m).unwrap();
            let b = ft.coeff(-m).unwrap();
            assert_eq!(a.conj(), b);
        }
    }

    #[test]
    fn even_weights_have_tiny_imaginary_parts() {
        let cfg = QuadratureConfig::default();
        for w in [
            WeightSpec::tan_alpha(0.5),
            WeightSpec::abs_theta_alpha(0.4),
        ] {
            let ft = w.fourier_coeffs(24, &cfg).unwrap();
            for m in 0..=24 {
                assert!(ft.coeff(m).unwrap().im.abs() <= cfg.abs_tol);
            }
        }
    }

    #[test]
    fn refining_the_quadrature_is_stable() {
        let base = QuadratureConfig::default();
        let deeper = QuadratureConfig {
            min_level: base.min_level + 2,
            ..base.clone()
        };
        let w = WeightSpec::tan_alpha(0.5);
        let a = w.fourier_coeffs(16, &base).unwrap();
        let b = w.fourier_coeffs(16, &deeper).unwrap();
        for m in 0..=16 {
            let d = (a.coeff(m).unwrap() - b.coeff(m).unwrap()).norm();
            assert!(d <= 2.0 * base.abs_tol, "m={m}: drift {d:.2e}");
        }
    }

    #[test]
    fn parseval_inequality_for_square_integrable_tan() {
        // For alpha < 1/2 the weight is in L^2 and the truncated coefficient
        // energy is dominated by the mean of w^2.
        let alpha = 0.3;
        let k = 32i64;
        let ft = WeightSpec::tan_alpha(alpha)
            .fourier_coeffs(k as usize, &QuadratureConfig::default())
            .unwrap();
        let sq_mean = WeightSpec::power_of(WeightSpec::tan_alpha(alpha), 2.0)
            .fourier_coeffs(0, &QuadratureConfig::default())
            .unwrap()
            .mean();
        let energy: f64 = (-k..=k).map(|m| ft.coeff(m).unwrap().norm_sqr()).sum();
        assert!(energy <= sq_mean + 1e-9, "{energy} vs {sq_mean}");
    }

    #[test]
    fn non_integrable_power_is_rejected() {
        let w = WeightSpec::power_of(WeightSpec::tan_alpha(0.5), 2.1);
        match w.fourier_coeffs(4, &QuadratureConfig::default()) {
            Err(Error::QuadratureFailure(_)) => {}
            other => panic!("expected QuadratureFailure, got {other:?}"),
        }
    }

    #[test]
    fn critical_exponents() {
        assert_eq!(
            WeightSpec::tan_alpha(0.5).critical_exponent().unwrap().0,
            2.0
        );
        assert!(WeightSpec::Constant(1.0)
            .critical_exponent()
            .unwrap()
            .0
            .is_infinite());
        let p = WeightSpec::power_of(WeightSpec::tan_alpha(0.5), 0.5)
            .critical_exponent()
            .unwrap();
        assert!((p.0 - 4.0).abs() < 1e-12);
        let sampled = WeightSpec::Sampled {
            thetas: vec![-1.0, 1.0],
            values: vec![1.0, 2.0],
        };
        assert!(matches!(
            sampled.critical_exponent(),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn floor_arithmetic() {
        assert!((CriticalExponent(2.0).floor() - 2f64.sqrt()).abs() < 1e-12);
        assert_eq!(CriticalExponent(f64::INFINITY).floor(), 1.0);
    }

    #[test]
    fn sampled_parsing_and_trapezoid() {
        let text = "# theta value\n-3.0 1.0\n-1.0 1.0\n0.5 1.0\n2.5 1.0\n";
        let w = parse_sampled(text).unwrap();
        let ft = w.fourier_coeffs(2, &QuadratureConfig::default()).unwrap();
        // Constant samples integrate to the constant, independent of grid.
        assert!((ft.mean() - 1.0).abs() < 1e-12);
        assert!(parse_sampled("0.5 1.0\n0.4 1.0\n").is_err());
        assert!(parse_sampled("not numbers\n").is_err());
    }

    #[test]
    fn scaled_weight_scales_coefficients() {
        let cfg = QuadratureConfig::default();
        let base = WeightSpec::tan_alpha(0.5);
        let scaled = WeightSpec::scaled(base.clone(), 2.0);
        let a = base.fourier_coeffs(8, &cfg).unwrap();
        let b = scaled.fourier_coeffs(8, &cfg).unwrap();
        for m in 0..=8 {
            let d = (b.coeff(m).unwrap() - 2.0 * a.coeff(m).unwrap()).norm();
            assert!(d < 5e-10);
        }
    }
}
