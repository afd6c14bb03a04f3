use serde::Serialize;

use super::{BoxDomain, CosineNetwork};
use crate::spectrum::Spectrum;
use crate::{Error, Result};

/// Tensor rules are used up to this dimension; beyond it a Halton rule.
pub const TENSOR_MAX_DIM: usize = 3;
/// Halton points used above [`TENSOR_MAX_DIM`].
pub const HALTON_POINTS: usize = 1 << 16;

/// Gauss–Legendre nodes and weights on `[-1, 1]` (Newton on `P_n`).
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    let n = order;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum QuadratureRule {
    /// Composite Gauss–Legendre with at most `max_panels` equal panels per axis.
    GaussLegendre { order: usize, max_panels: usize },
    Halton { points: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct H1Estimate {
    pub value: f64,
    pub points: usize,
    pub rule: QuadratureRule,
}

/// Points and weights of a rule on `Ω`, with weights summing to `m(Ω)`.
#[derive(Debug, Clone)]
pub(crate) struct QuadraturePlan {
    pub points: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
    pub rule: QuadratureRule,
}

impl QuadraturePlan {
    /// `freq[k]` bounds the frequencies present along axis `k`; each panel is
    /// sized so the squared integrand completes at most `order/4` periods.
    pub fn new(domain: &BoxDomain, order: usize, freq: &[f64]) -> Result<Self> {
        if order < 2 {
            return Err(Error::InvalidParameter("quadrature order must be at least 2".into()));
        }
        let d = domain.dim();
        if d > TENSOR_MAX_DIM {
            return Ok(Self::halton(domain, HALTON_POINTS));
        }
        let (gx, gw) = gauss_legendre(order);
        let mut axes: Vec<(Vec<f64>, Vec<f64>)> = Vec::with_capacity(d);
        let mut max_panels = 1;
        for k in 0..d {
            let (a, b) = (domain.lower()[k], domain.upper()[k]);
            let len = b - a;
            let panels = ((4.0 * freq[k] * len / order as f64).ceil() as usize).max(1);
            max_panels = max_panels.max(panels);
            let width = len / panels as f64;
            let mut xs = Vec::with_capacity(panels * order);
            let mut ws = Vec::with_capacity(panels * order);
            for p in 0..panels {
                let mid = a + (p as f64 + 0.5) * width;
                for (x, w) in gx.iter().zip(&gw) {
                    xs.push(mid + 0.5 * width * x);
                    ws.push(0.5 * width * w);
                }
            }
            axes.push((xs, ws));
        }
        let total: usize = axes.iter().map(|a| a.0.len()).product();
        let mut points = Vec::with_capacity(total);
        let mut weights = Vec::with_capacity(total);
        let mut idx = vec![0usize; d];
        for _ in 0..total {
            points.push((0..d).map(|k| axes[k].0[idx[k]]).collect());
            weights.push((0..d).map(|k| axes[k].1[idx[k]]).product());
            for k in (0..d).rev() {
                idx[k] += 1;
                if idx[k] < axes[k].0.len() {
                    break;
                }
                idx[k] = 0;
            }
        }
        Ok(Self {
            points,
            weights,
            rule: QuadratureRule::GaussLegendre { order, max_panels },
        })
    }

    fn halton(domain: &BoxDomain, count: usize) -> Self {
        let d = domain.dim();
        let primes = first_primes(d);
        let w = domain.measure() / count as f64;
        let points = (1..=count)
            .map(|i| {
                (0..d)
                    .map(|k| {
                        let (a, b) = (domain.lower()[k], domain.upper()[k]);
                        a + (b - a) * radical_inverse(i, primes[k])
                    })
                    .collect()
            })
            .collect();
        Self {
            points,
            weights: vec![w; count],
            rule: QuadratureRule::Halton { points: count },
        }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }
}

fn radical_inverse(mut i: usize, base: usize) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

fn first_primes(n: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(n);
    let mut c = 2;
    while out.len() < n {
        if (2..c).take_while(|p| p * p <= c).all(|p| c % p != 0) {
            out.push(c);
        }
        c += 1;
    }
    out
}

/// `u` and `∇u` tabulated on a plan, reused across networks.
pub(crate) struct Reference {
    pub values: Vec<f64>,
    pub gradients: Vec<Vec<f64>>,
}

impl Reference {
    pub fn tabulate(u: &Spectrum, plan: &QuadraturePlan) -> Result<Self> {
        let values = plan.points.iter().map(|x| u.evaluate(x)).collect::<Result<_>>()?;
        let gradients = plan.points.iter().map(|x| u.gradient(x)).collect::<Result<_>>()?;
        Ok(Self { values, gradients })
    }
}

/// `‖u_n - u‖²_{H¹(Ω)}` on a plan. Summation runs in point order.
pub(crate) fn h1_error_sq(net: &CosineNetwork, plan: &QuadraturePlan, reference: &Reference) -> Result<f64> {
    let mut total = 0.0;
    for (i, x) in plan.points.iter().enumerate() {
        let e = net.evaluate(x)? - reference.values[i];
        let g = net.gradient(x)?;
        let ge: f64 = g
            .iter()
            .zip(&reference.gradients[i])
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        total += plan.weights[i] * (e * e + ge);
    }
    Ok(total)
}

/// Default per-axis order: 24 for `d ≤ 2`, 12 for `d = 3`.
pub fn default_quad_order(dim: usize) -> usize {
    if dim <= 2 {
        24
    } else {
        12
    }
}

fn frequency_bound(net: &CosineNetwork, u: &Spectrum) -> Vec<f64> {
    net.max_abs_weight()
        .iter()
        .zip(u.max_abs_frequency())
        .map(|(a, b)| a.max(b))
        .collect()
}

fn check_dims(net: &CosineNetwork, u: &Spectrum, domain: &BoxDomain) -> Result<()> {
    for found in [u.dim(), domain.dim()] {
        if found != net.dim() {
            return Err(Error::DimensionMismatch {
                expected: net.dim(),
                found,
            });
        }
    }
    Ok(())
}

/// `‖u_n - u‖_{H¹(Ω)}` with the rule actually used.
pub fn h1_error_estimate(net: &CosineNetwork, u: &Spectrum, domain: &BoxDomain, quad_order: usize) -> Result<H1Estimate> {
    check_dims(net, u, domain)?;
    let plan = QuadraturePlan::new(domain, quad_order, &frequency_bound(net, u))?;
    let reference = Reference::tabulate(u, &plan)?;
    let sq = h1_error_sq(net, &plan, &reference)?;
    Ok(H1Estimate {
        value: sq.max(0.0).sqrt(),
        points: plan.len(),
        rule: plan.rule,
    })
}

/// `‖u_n - u‖_{H¹(Ω)}`.
pub fn h1_error(net: &CosineNetwork, u: &Spectrum, domain: &BoxDomain, quad_order: usize) -> Result<f64> {
    h1_error_estimate(net, u, domain, quad_order).map(|e| e.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::sample_network;
    use crate::spectrum::DiracSpectrum;
    use std::f64::consts::PI;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        for order in [2, 5, 12, 24] {
            let (x, w) = gauss_legendre(order);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-13);
            for deg in 0..(2 * order) {
                let got: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
                let want = if deg % 2 == 0 { 2.0 / (deg as f64 + 1.0) } else { 0.0 };
                assert!((got - want).abs() < 1e-13, "order {order} degree {deg}");
            }
        }
    }

    #[test]
    fn zero_network_against_cosine() {
        let u: Spectrum = DiracSpectrum::cosine(&[1.0], 1.0).unwrap().into();
        let omega = BoxDomain::cube(1, 0.0, 2.0 * PI).unwrap();
        let e = h1_error(&CosineNetwork::zero(1), &u, &omega, 24).unwrap();
        assert!((e - (2.0 * PI).sqrt()).abs() < 1e-8);
    }

    #[test]
    fn exact_network_has_no_error() {
        let u: Spectrum = DiracSpectrum::cosine(&[1.0, 2.0], 0.7).unwrap().into();
        let omega = BoxDomain::cube(2, -1.0, 3.0).unwrap();
        let net = sample_network(&u, 9, 4).unwrap();
        assert!(h1_error(&net, &u, &omega, 24).unwrap() < 1e-10);
    }

    #[test]
    fn low_order_rejected() {
        let u: Spectrum = DiracSpectrum::constant(1, 1.0).into();
        let omega = BoxDomain::cube(1, 0.0, 1.0).unwrap();
        assert!(h1_error(&CosineNetwork::zero(1), &u, &omega, 1).is_err());
    }

    #[test]
    fn halton_rule_above_three_dimensions() {
        let u: Spectrum = DiracSpectrum::constant(4, 1.0).into();
        let omega = BoxDomain::cube(4, 0.0, 1.0).unwrap();
        let e = h1_error_estimate(&CosineNetwork::zero(4), &u, &omega, 12).unwrap();
        assert_eq!(e.rule, QuadratureRule::Halton { points: HALTON_POINTS });
        assert!((e.value - 1.0).abs() < 1e-12);
    }
}
