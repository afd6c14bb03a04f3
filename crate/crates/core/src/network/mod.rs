//! Constructive two-layer cosine networks.
//!
//! Writing `û(ξ) = |û(ξ)| e^{iθ(ξ)}` and `μ = |û| / ‖u‖_{𝓑⁰}`, a real `u` is
//! `‖u‖_{𝓑⁰} E_{ξ∼μ}[cos(ξ·x + θ(ξ))]`. Drawing `n` i.i.d. frequencies from
//! `μ` gives the network
//!
//! ```text
//!     u_n(x) = (1/n) Σ_j a_j cos(w_j·x + b_j),   a_j = ‖u‖_{𝓑⁰}, w_j = ξ_j, b_j = θ(ξ_j)
//! ```
//!
//! whose mean squared `H¹(Ω)` error is at most `m(Ω) ‖u‖_{𝓑⁰} ‖u‖_{𝓑²} / n`.

mod quadrature;
mod rate;
mod rng;

pub use quadrature::{
    default_quad_order, gauss_legendre, h1_error, h1_error_estimate, H1Estimate, QuadratureRule, HALTON_POINTS,
    TENSOR_MAX_DIM,
};
pub use rate::{rate_study, RatePoint, RateStudyResult, SLOPE_RANGE};
pub use rng::{stream_id, stream_rng};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::spectrum::{BarronIndex, Spectrum};
use crate::{Error, Result};

/// One outcome of the frequency measure.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub frequency: Vec<f64>,
    pub probability: f64,
    /// Phase `arg û(ξ)`, with `-0.0` written as `0.0`.
    pub theta: f64,
}

/// Categorical distribution over atoms (or grid cells) with `p ∝ |û|`.
#[derive(Debug, Clone)]
pub struct FrequencyMeasure {
    dim: usize,
    outcomes: Vec<Outcome>,
    cumulative: Vec<f64>,
    total_mass: f64,
}

impl FrequencyMeasure {
    pub fn new(u: &Spectrum) -> Result<Self> {
        let mut raw: Vec<(Vec<f64>, f64, f64)> = Vec::new();
        match u {
            Spectrum::Dirac(d) => {
                for (freq, w) in d.atoms() {
                    raw.push((freq.components().to_vec(), w.norm(), w.arg() + 0.0));
                }
            }
            Spectrum::Grid(g) => {
                let cell = g.cell_measure();
                for (i, v) in g.values().iter().enumerate() {
                    let mass = v.norm() * cell;
                    if mass > 0.0 {
                        raw.push((g.node(i), mass, v.arg() + 0.0));
                    }
                }
            }
        }
        let total_mass: f64 = raw.iter().map(|r| r.1).sum();
        if !(total_mass > 0.0) {
            return Err(Error::ZeroSpectrum);
        }
        let outcomes: Vec<Outcome> = raw
            .into_iter()
            .map(|(frequency, mass, theta)| Outcome {
                frequency,
                probability: mass / total_mass,
                theta,
            })
            .collect();
        let mut acc = 0.0;
        let mut cumulative: Vec<f64> = outcomes
            .iter()
            .map(|o| {
                acc += o.probability;
                acc
            })
            .collect();
        // Guard the top bin against rounding so every uniform draw lands.
        if let Some(last) = cumulative.last_mut() {
            *last = f64::INFINITY;
        }
        Ok(Self {
            dim: u.dim(),
            outcomes,
            cumulative,
            total_mass,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn outcomes(&self) -> &[Outcome] {
        &self.outcomes
    }

    /// `‖u‖_{𝓑⁰}`.
    pub fn total_mass(&self) -> f64 {
        self.total_mass
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> &Outcome {
        let r: f64 = rng.random();
        let i = self.cumulative.partition_point(|&c| c <= r);
        &self.outcomes[i.min(self.outcomes.len() - 1)]
    }
}

/// `frequency_measure(u)`: the normalised `|û|` measure with phases.
pub fn frequency_measure(u: &Spectrum) -> Result<FrequencyMeasure> {
    FrequencyMeasure::new(u)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Neuron {
    pub amplitude: f64,
    pub weight: Vec<f64>,
    pub bias: f64,
}

/// `u_n(x) = (1/n) Σ a_j cos(w_j·x + b_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CosineNetwork {
    dim: usize,
    neurons: Vec<Neuron>,
    seed: u64,
    stream: u64,
    source_fingerprint: u64,
}

impl CosineNetwork {
    /// A network from explicit neurons (seed and source left at zero).
    pub fn from_neurons(dim: usize, neurons: Vec<Neuron>) -> Result<Self> {
        for nrn in &neurons {
            if nrn.weight.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: nrn.weight.len(),
                });
            }
            if !(nrn.amplitude.is_finite() && nrn.bias.is_finite() && nrn.weight.iter().all(|w| w.is_finite())) {
                return Err(Error::InvalidParameter("network entries must be finite".into()));
            }
        }
        Ok(Self {
            dim,
            neurons,
            seed: 0,
            stream: 0,
            source_fingerprint: 0,
        })
    }

    /// The empty network, identically zero.
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            neurons: Vec::new(),
            seed: 0,
            stream: 0,
            source_fingerprint: 0,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.neurons.len()
    }

    pub fn is_empty(&self) -> bool {
        self.neurons.is_empty()
    }

    pub fn neurons(&self) -> &[Neuron] {
        &self.neurons
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    pub fn source_fingerprint(&self) -> u64 {
        self.source_fingerprint
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: x.len(),
            });
        }
        Ok(())
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        self.check_dim(x)?;
        if self.neurons.is_empty() {
            return Ok(0.0);
        }
        let sum: f64 = self
            .neurons
            .iter()
            .map(|nrn| nrn.amplitude * (dot(&nrn.weight, x) + nrn.bias).cos())
            .sum();
        Ok(sum / self.neurons.len() as f64)
    }

    /// `∇u_n(x) = -(1/n) Σ a_j w_j sin(w_j·x + b_j)`.
    pub fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(x)?;
        let mut grad = vec![0.0; self.dim];
        if self.neurons.is_empty() {
            return Ok(grad);
        }
        for nrn in &self.neurons {
            let s = nrn.amplitude * (dot(&nrn.weight, x) + nrn.bias).sin();
            for (g, w) in grad.iter_mut().zip(&nrn.weight) {
                *g -= s * w;
            }
        }
        let n = self.neurons.len() as f64;
        grad.iter_mut().for_each(|g| *g /= n);
        Ok(grad)
    }

    /// Largest `|w_k|` over neurons, per axis.
    pub fn max_abs_weight(&self) -> Vec<f64> {
        let mut out = vec![0.0f64; self.dim];
        for nrn in &self.neurons {
            for (o, w) in out.iter_mut().zip(&nrn.weight) {
                *o = o.max(w.abs());
            }
        }
        out
    }
}

pub fn evaluate_network(net: &CosineNetwork, x: &[f64]) -> Result<f64> {
    net.evaluate(x)
}

pub fn gradient_network(net: &CosineNetwork, x: &[f64]) -> Result<Vec<f64>> {
    net.gradient(x)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Draws `n` neurons from `measure` using the given RNG.
pub fn sample_from_measure<R: Rng + ?Sized>(measure: &FrequencyMeasure, n: usize, rng: &mut R) -> Vec<Neuron> {
    let a = measure.total_mass();
    (0..n)
        .map(|_| {
            let o = measure.sample(rng);
            Neuron {
                amplitude: a,
                weight: o.frequency.clone(),
                bias: o.theta,
            }
        })
        .collect()
}

/// Network with `n` neurons sampled on stream `stream` of `seed`.
pub fn sample_network_stream(u: &Spectrum, n: usize, seed: u64, stream: u64) -> Result<CosineNetwork> {
    if n == 0 {
        return Err(Error::InvalidParameter("a network needs at least one neuron".into()));
    }
    let measure = FrequencyMeasure::new(u)?;
    let mut rng = rng::rng_for(seed, stream);
    Ok(CosineNetwork {
        dim: u.dim(),
        neurons: sample_from_measure(&measure, n, &mut rng),
        seed,
        stream,
        source_fingerprint: u.fingerprint(),
    })
}

/// Network with `n` neurons; deterministic in `seed` (stream 0).
pub fn sample_network(u: &Spectrum, n: usize, seed: u64) -> Result<CosineNetwork> {
    sample_network_stream(u, n, seed, 0)
}

/// Axis-aligned box `Ω = Π [lower_k, upper_k]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxDomain {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl BoxDomain {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.is_empty() || lower.len() != upper.len() {
            return Err(Error::InvalidParameter("box corners must share a positive dimension".into()));
        }
        if lower.iter().zip(&upper).any(|(a, b)| !(a.is_finite() && b.is_finite() && b > a)) {
            return Err(Error::InvalidParameter("box needs finite corners with upper > lower".into()));
        }
        Ok(Self { lower, upper })
    }

    /// `[a, b]^d`.
    pub fn cube(dim: usize, a: f64, b: f64) -> Result<Self> {
        Self::new(vec![a; dim], vec![b; dim])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    /// Lebesgue measure `m(Ω)`.
    pub fn measure(&self) -> f64 {
        self.lower.iter().zip(&self.upper).map(|(a, b)| b - a).product()
    }
}

/// `m(Ω) ‖u‖_{𝓑⁰} ‖u‖_{𝓑²} / n`, the bound on `E ‖u_n - u‖²_{H¹(Ω)}`.
pub fn mse_bound(u: &Spectrum, domain: &BoxDomain, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    Ok(domain.measure() * u.barron_norm(BarronIndex::ZERO) * u.barron_norm(BarronIndex::TWO) / n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::{linear_combine, DiracSpectrum};
    use std::f64::consts::PI;

    fn cos(k: &[f64]) -> Spectrum {
        DiracSpectrum::cosine(k, 1.0).unwrap().into()
    }

    #[test]
    fn measure_of_single_cosine() {
        let m = frequency_measure(&cos(&[2.0, 1.0])).unwrap();
        assert_eq!(m.outcomes().len(), 2);
        for o in m.outcomes() {
            assert_eq!(o.probability, 0.5);
            assert_eq!(o.theta, 0.0);
        }
        assert_eq!(m.total_mass(), 1.0);
    }

    #[test]
    fn measure_of_two_cosines() {
        let u = linear_combine(1.0, &cos(&[1.0]), 1.0, &cos(&[2.0])).unwrap();
        let m = frequency_measure(&u).unwrap();
        assert_eq!(m.outcomes().len(), 4);
        assert!(m.outcomes().iter().all(|o| o.probability == 0.25));
    }

    #[test]
    fn sine_phases() {
        let u: Spectrum = DiracSpectrum::sine(&[1.0], 0.3).unwrap().into();
        let m = frequency_measure(&u).unwrap();
        for o in m.outcomes() {
            assert_eq!(o.probability, 0.5);
            let expected = if o.frequency[0] > 0.0 { -PI / 2.0 } else { PI / 2.0 };
            assert!((o.theta - expected).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_spectrum_has_no_measure() {
        let z: Spectrum = DiracSpectrum::zero(1).into();
        assert!(matches!(frequency_measure(&z), Err(Error::ZeroSpectrum)));
        assert!(matches!(sample_network(&z, 3, 1), Err(Error::ZeroSpectrum)));
    }

    #[test]
    fn single_cosine_network_is_exact() {
        let u = cos(&[1.5, -0.5]);
        for seed in [0, 7, 99] {
            let net = sample_network(&u, 13, seed).unwrap();
            assert!(net.neurons().iter().all(|n| n.amplitude == 1.0));
            for x in [[0.0, 0.0], [0.4, 2.1], [-3.0, 1.0]] {
                let want = u.evaluate(&x).unwrap();
                assert!((net.evaluate(&x).unwrap() - want).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn constant_network() {
        let u: Spectrum = DiracSpectrum::constant(2, 5.0).into();
        let net = sample_network(&u, 4, 3).unwrap();
        assert!((net.evaluate(&[1.0, 2.0]).unwrap() - 5.0).abs() < 1e-14);
        let u: Spectrum = DiracSpectrum::constant(1, -2.0).into();
        let net = sample_network(&u, 3, 3).unwrap();
        assert!((net.evaluate(&[1.0]).unwrap() + 2.0).abs() < 1e-14);
    }

    #[test]
    fn hand_built_neuron() {
        let net = CosineNetwork::from_neurons(
            2,
            vec![Neuron {
                amplitude: 2.0,
                weight: vec![1.0, 0.0],
                bias: PI / 2.0,
            }],
        )
        .unwrap();
        assert!(net.evaluate(&[0.0, 0.0]).unwrap().abs() < 1e-15);
        let g = net.gradient(&[0.0, 0.0]).unwrap();
        assert!((g[0] + 2.0).abs() < 1e-15 && g[1] == 0.0);
    }

    #[test]
    fn cosine_network_value_and_gradient_at_origin() {
        let net = sample_network(&cos(&[1.0]), 5, 11).unwrap();
        assert!((net.evaluate(&[0.0]).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(net.gradient(&[0.0]).unwrap(), vec![0.0]);
    }

    #[test]
    fn sampling_is_deterministic() {
        let u = linear_combine(1.0, &cos(&[1.0]), 0.5, &cos(&[3.0])).unwrap();
        assert_eq!(sample_network(&u, 50, 42).unwrap(), sample_network(&u, 50, 42).unwrap());
        assert_ne!(sample_network(&u, 50, 42).unwrap(), sample_network(&u, 50, 43).unwrap());
    }

    #[test]
    fn n_zero_rejected() {
        assert!(sample_network(&cos(&[1.0]), 0, 1).is_err());
        assert!(mse_bound(&cos(&[1.0]), &BoxDomain::cube(1, 0.0, 1.0).unwrap(), 0).is_err());
    }

    #[test]
    fn mse_bound_examples() {
        let omega = BoxDomain::cube(1, 0.0, 2.0 * PI).unwrap();
        let b = mse_bound(&cos(&[1.0]), &omega, 10).unwrap();
        assert!((b - 4.0 * PI / 10.0).abs() < 1e-15);
        let b2 = mse_bound(&cos(&[1.0]), &omega, 20).unwrap();
        assert_eq!(b2 * 2.0, b);
    }

    #[test]
    fn box_validation() {
        assert!(BoxDomain::new(vec![0.0], vec![0.0]).is_err());
        assert!(BoxDomain::new(vec![0.0, 1.0], vec![1.0]).is_err());
        assert_eq!(BoxDomain::new(vec![0.0, -1.0], vec![2.0, 2.0]).unwrap().measure(), 6.0);
    }
}
