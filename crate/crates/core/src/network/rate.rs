use serde::Serialize;

use super::quadrature::{h1_error_sq, QuadraturePlan, Reference};
use super::rng::stream_rng;
use super::{mse_bound, sample_from_measure, BoxDomain, CosineNetwork, FrequencyMeasure, Neuron, QuadratureRule};
use crate::spectrum::Spectrum;
use crate::{Error, Result};

/// Accepted range for the fitted log-log slope of the mean error.
pub const SLOPE_RANGE: (f64, f64) = (-0.65, -0.35);
/// Means at or below this are treated as exact and leave the slope undefined.
const EXACT_FLOOR: f64 = 1e-10;
/// Two-sided 95% normal quantile.
const Z95: f64 = 1.96;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RatePoint {
    pub n: usize,
    pub trials: usize,
    pub mean_h1: f64,
    pub stderr_h1: f64,
    pub mean_sq_h1: f64,
    pub stderr_sq_h1: f64,
    /// `mse_bound(u, Ω, n)`, a bound on the mean squared error.
    pub bound: f64,
    /// `√bound`, which bounds the mean error by Jensen.
    pub sqrt_bound: f64,
}

impl RatePoint {
    /// Upper 95% confidence limit of the mean squared error lies below the bound.
    pub fn bound_respected(&self) -> bool {
        self.mean_sq_h1 + Z95 * self.stderr_sq_h1 <= self.bound
    }

    pub fn jensen_respected(&self) -> bool {
        self.mean_h1 <= self.sqrt_bound
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RateStudyResult {
    pub n_values: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub points: Vec<RatePoint>,
    /// Least-squares slope of `log(mean error)` against `log n`; `None` when
    /// some mean is numerically zero.
    pub slope: Option<f64>,
    pub intercept: Option<f64>,
    pub slope_in_range: bool,
    pub bound_respected: bool,
    pub jensen_respected: bool,
    pub quadrature_points: usize,
    pub rule: QuadratureRule,
}

/// Monte Carlo study of `‖u_n - u‖_{H¹(Ω)}` over `trials` networks per `n`.
///
/// Trial `t` at size `n` draws from its own stream, so results do not depend
/// on evaluation order. Sums are reduced in trial order.
pub fn rate_study(
    u: &Spectrum,
    domain: &BoxDomain,
    n_values: &[usize],
    trials: usize,
    seed: u64,
    quad_order: usize,
) -> Result<RateStudyResult> {
    if n_values.len() < 3 {
        return Err(Error::InvalidParameter("a rate study needs at least 3 values of n".into()));
    }
    if trials < 10 {
        return Err(Error::InvalidParameter("a rate study needs at least 10 trials".into()));
    }
    if n_values.iter().any(|&n| n == 0 || n > u32::MAX as usize) {
        return Err(Error::InvalidParameter("every n must be in 1..=2^32-1".into()));
    }
    if trials > u32::MAX as usize {
        return Err(Error::InvalidParameter("too many trials".into()));
    }
    if domain.dim() != u.dim() {
        return Err(Error::DimensionMismatch {
            expected: u.dim(),
            found: domain.dim(),
        });
    }
    let measure = FrequencyMeasure::new(u)?;
    let plan = QuadraturePlan::new(domain, quad_order, &u.max_abs_frequency())?;
    let reference = Reference::tabulate(u, &plan)?;

    let mut points = Vec::with_capacity(n_values.len());
    for &n in n_values {
        let mut errs = Vec::with_capacity(trials);
        for t in 0..trials {
            let mut rng = stream_rng(seed, t as u32, n as u32);
            let neurons: Vec<Neuron> = sample_from_measure(&measure, n, &mut rng);
            let net = CosineNetwork::from_neurons(u.dim(), neurons)?;
            errs.push(h1_error_sq(&net, &plan, &reference)?.max(0.0));
        }
        let roots: Vec<f64> = errs.iter().map(|e| e.sqrt()).collect();
        let (mean_h1, stderr_h1) = mean_and_stderr(&roots);
        let (mean_sq_h1, stderr_sq_h1) = mean_and_stderr(&errs);
        let bound = mse_bound(u, domain, n)?;
        points.push(RatePoint {
            n,
            trials,
            mean_h1,
            stderr_h1,
            mean_sq_h1,
            stderr_sq_h1,
            bound,
            sqrt_bound: bound.sqrt(),
        });
    }

    let fit = fit_log_log(&points);
    let slope_in_range = fit.is_some_and(|(s, _)| s >= SLOPE_RANGE.0 && s <= SLOPE_RANGE.1);
    Ok(RateStudyResult {
        n_values: n_values.to_vec(),
        trials,
        seed,
        bound_respected: points.iter().all(RatePoint::bound_respected),
        jensen_respected: points.iter().all(RatePoint::jensen_respected),
        slope: fit.map(|f| f.0),
        intercept: fit.map(|f| f.1),
        slope_in_range,
        points,
        quadrature_points: plan.len(),
        rule: plan.rule,
    })
}

/// Sample mean and standard error (sample standard deviation over `√m`).
fn mean_and_stderr(xs: &[f64]) -> (f64, f64) {
    let m = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / m;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (m - 1.0);
    (mean, (var / m).sqrt())
}

fn fit_log_log(points: &[RatePoint]) -> Option<(f64, f64)> {
    if points.iter().any(|p| !(p.mean_h1 > EXACT_FLOOR)) {
        return None;
    }
    let xs: Vec<f64> = points.iter().map(|p| (p.n as f64).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.mean_h1.ln()).collect();
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if !(sxx > 0.0) {
        return None;
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::DiracSpectrum;
    use std::f64::consts::PI;

    #[test]
    fn single_cosine_has_undefined_slope() {
        let u: Spectrum = DiracSpectrum::cosine(&[2.0], 1.0).unwrap().into();
        let omega = BoxDomain::cube(1, 0.0, 2.0 * PI).unwrap();
        let r = rate_study(&u, &omega, &[4, 8, 16], 10, 1, 24).unwrap();
        assert!(r.points.iter().all(|p| p.mean_h1 <= 1e-10));
        assert_eq!(r.slope, None);
        assert!(!r.slope_in_range);
        assert!(r.bound_respected);
    }

    #[test]
    fn preconditions() {
        let u: Spectrum = DiracSpectrum::cosine(&[2.0], 1.0).unwrap().into();
        let omega = BoxDomain::cube(1, 0.0, 1.0).unwrap();
        assert!(rate_study(&u, &omega, &[4, 8], 10, 1, 24).is_err());
        assert!(rate_study(&u, &omega, &[4, 8, 16], 9, 1, 24).is_err());
        assert!(rate_study(&u, &omega, &[0, 8, 16], 10, 1, 24).is_err());
    }

    #[test]
    fn log_log_fit_recovers_power_law() {
        let points: Vec<RatePoint> = [10usize, 100, 1000]
            .iter()
            .map(|&n| RatePoint {
                n,
                trials: 10,
                mean_h1: 3.0 * (n as f64).powf(-0.5),
                stderr_h1: 0.0,
                mean_sq_h1: 0.0,
                stderr_sq_h1: 0.0,
                bound: 1.0,
                sqrt_bound: 1.0,
            })
            .collect();
        let (s, c) = fit_log_log(&points).unwrap();
        assert!((s + 0.5).abs() < 1e-12);
        assert!((c - 3f64.ln()).abs() < 1e-12);
    }
}
