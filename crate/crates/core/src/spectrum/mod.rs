//! Real-valued functions on ℝ^d represented by their Fourier transforms.
//!
//! The transform convention is `ĝ(ξ) = (2π)^{-d} ∫ g(x) e^{-i x·ξ} dx`, so the
//! inverse carries no constant: `g(x) = ∫ ĝ(ξ) e^{i x·ξ} dξ`. Every spectrum is
//! Hermitian (`ĝ(-ξ) = conj ĝ(ξ)`), which makes `g` real.

mod dirac;
mod grid;

pub use dirac::DiracSpectrum;
pub use grid::{gaussian_grid, gaussian_tail_warning, GridSpectrum};

use std::cmp::Ordering;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Relative size of the imaginary part of an evaluation (or the mismatch
/// between `ĝ(-ξ)` and `conj ĝ(ξ)`) tolerated before a spectrum is rejected
/// as non-Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// A point in frequency space (radians per unit length).
///
/// Components are finite and `-0.0` is stored as `0.0`, so equality and the
/// total order agree and atoms can be merged by exact comparison.
#[derive(Clone, PartialEq)]
pub struct Frequency(Vec<f64>);

impl Frequency {
    pub fn new(components: Vec<f64>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidFrequency("dimension must be at least 1".into()));
        }
        if let Some(c) = components.iter().find(|c| !c.is_finite()) {
            return Err(Error::InvalidFrequency(format!("non-finite component {c}")));
        }
        Ok(Self::canonical(components))
    }

    pub fn zero(dim: usize) -> Self {
        Self(vec![0.0; dim])
    }

    // Adding +0.0 maps -0.0 to +0.0 and leaves every other value unchanged.
    fn canonical(mut components: Vec<f64>) -> Self {
        for c in &mut components {
            *c += 0.0;
        }
        Self(components)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn components(&self) -> &[f64] {
        &self.0
    }

    pub fn norm_sq(&self) -> f64 {
        self.0.iter().map(|c| c * c).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn dot(&self, x: &[f64]) -> f64 {
        self.0.iter().zip(x).map(|(a, b)| a * b).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0.0)
    }

    pub fn neg(&self) -> Self {
        Self::canonical(self.0.iter().map(|c| -c).collect())
    }

    /// Componentwise sum. Both operands must have the same dimension.
    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim(), other.dim());
        Self::canonical(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// True for the member of each `±ξ` pair that is stored in literals:
    /// the lexicographically non-negative one (this includes `ξ = 0`).
    pub fn is_representative(&self) -> bool {
        *self >= self.neg()
    }

    /// `(1 + |ξ|²)^{s/2}`.
    pub fn barron_weight(&self, s: BarronIndex) -> f64 {
        let base = 1.0 + self.norm_sq();
        if s.value() == 0.0 {
            1.0
        } else {
            base.powf(0.5 * s.value())
        }
    }
}

impl Eq for Frequency {}

impl PartialOrd for Frequency {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Frequency {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.total_cmp(b))
            .find(|o| o.is_ne())
            .unwrap_or_else(|| self.0.len().cmp(&other.0.len()))
    }
}

impl fmt::Debug for Frequency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ξ{:?}", self.0)
    }
}

impl TryFrom<Vec<f64>> for Frequency {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl TryFrom<&[f64]> for Frequency {
    type Error = Error;
    fn try_from(v: &[f64]) -> Result<Self> {
        Self::new(v.to_vec())
    }
}

/// Regularity index `s ≥ 0` of the spectral Barron space `𝓑ˢ`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct BarronIndex(f64);

impl BarronIndex {
    pub const ZERO: Self = Self(0.0);
    pub const ONE: Self = Self(1.0);
    pub const TWO: Self = Self(2.0);

    pub fn new(s: f64) -> Result<Self> {
        if !s.is_finite() || s < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "Barron index must be finite and non-negative, got {s}"
            )));
        }
        Ok(Self(s))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// The index `s + 2` gained by one application of the resolvent.
    pub fn plus_two(self) -> Self {
        Self(self.0 + 2.0)
    }
}

impl TryFrom<f64> for BarronIndex {
    type Error = Error;
    fn try_from(s: f64) -> Result<Self> {
        Self::new(s)
    }
}

impl From<BarronIndex> for f64 {
    fn from(s: BarronIndex) -> f64 {
        s.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Dirac,
    Grid,
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Backend::Dirac => f.write_str("dirac"),
            Backend::Grid => f.write_str("grid"),
        }
    }
}

/// A real function given by its Fourier transform.
#[derive(Debug, Clone, PartialEq)]
pub enum Spectrum {
    Dirac(DiracSpectrum),
    Grid(GridSpectrum),
}

impl Spectrum {
    pub fn dim(&self) -> usize {
        match self {
            Spectrum::Dirac(d) => d.dim(),
            Spectrum::Grid(g) => g.dim(),
        }
    }

    pub fn backend(&self) -> Backend {
        match self {
            Spectrum::Dirac(_) => Backend::Dirac,
            Spectrum::Grid(_) => Backend::Grid,
        }
    }

    pub fn as_dirac(&self) -> Option<&DiracSpectrum> {
        match self {
            Spectrum::Dirac(d) => Some(d),
            Spectrum::Grid(_) => None,
        }
    }

    pub fn as_grid(&self) -> Option<&GridSpectrum> {
        match self {
            Spectrum::Grid(g) => Some(g),
            Spectrum::Dirac(_) => None,
        }
    }

    /// Zero function with the same backend and layout as `self`.
    pub fn zero_like(&self) -> Self {
        match self {
            Spectrum::Dirac(d) => Spectrum::Dirac(DiracSpectrum::zero(d.dim())),
            Spectrum::Grid(g) => Spectrum::Grid(g.zeros_like()),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Spectrum::Dirac(d) => d.is_empty(),
            Spectrum::Grid(g) => g.values().iter().all(|v| *v == Complex64::new(0.0, 0.0)),
        }
    }

    /// Number of stored frequencies (atoms or grid nodes).
    pub fn support_len(&self) -> usize {
        match self {
            Spectrum::Dirac(d) => d.len(),
            Spectrum::Grid(g) => g.len(),
        }
    }

    /// `g(x) = ∫ ĝ(ξ) e^{i x·ξ} dξ`.
    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        match self {
            Spectrum::Dirac(d) => d.evaluate(x),
            Spectrum::Grid(g) => g.evaluate(x),
        }
    }

    /// `∇g(x) = ∫ i ξ ĝ(ξ) e^{i x·ξ} dξ`.
    pub fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        match self {
            Spectrum::Dirac(d) => d.gradient(x),
            Spectrum::Grid(g) => g.gradient(x),
        }
    }

    /// `Δg(x) = -∫ |ξ|² ĝ(ξ) e^{i x·ξ} dξ`.
    pub fn laplacian(&self, x: &[f64]) -> Result<f64> {
        match self {
            Spectrum::Dirac(d) => d.laplacian(x),
            Spectrum::Grid(g) => g.laplacian(x),
        }
    }

    /// Spectral Barron norm `∫ |ĝ(ξ)| (1+|ξ|²)^{s/2} dξ`.
    pub fn barron_norm(&self, s: BarronIndex) -> f64 {
        match self {
            Spectrum::Dirac(d) => d.barron_norm(s),
            Spectrum::Grid(g) => g.barron_norm(s),
        }
    }

    /// Largest `|ξ_k|` over the support, per axis.
    pub fn max_abs_frequency(&self) -> Vec<f64> {
        match self {
            Spectrum::Dirac(d) => d.max_abs_frequency(),
            Spectrum::Grid(g) => vec![g.cutoff(); g.dim()],
        }
    }

    pub fn scale(&self, a: f64) -> Self {
        match self {
            Spectrum::Dirac(d) => Spectrum::Dirac(d.scale(a)),
            Spectrum::Grid(g) => Spectrum::Grid(g.scale(a)),
        }
    }

    /// Multiply every coefficient by a real radial symbol `m(|ξ|²)`.
    ///
    /// Radial real symbols commute with conjugation, so the result stays
    /// exactly Hermitian.
    pub fn apply_radial_symbol(&self, symbol: impl Fn(f64) -> f64) -> Self {
        match self {
            Spectrum::Dirac(d) => Spectrum::Dirac(d.apply_radial_symbol(symbol)),
            Spectrum::Grid(g) => Spectrum::Grid(g.apply_radial_symbol(symbol)),
        }
    }

    /// Checks backend, dimension and (for grids) layout compatibility.
    pub fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        match (self, other) {
            (Spectrum::Dirac(_), Spectrum::Dirac(_)) => Ok(()),
            (Spectrum::Grid(a), Spectrum::Grid(b)) => a.check_same_layout(b),
            _ => Err(Error::BackendMismatch(format!(
                "cannot combine a {} spectrum with a {} spectrum",
                self.backend(),
                other.backend()
            ))),
        }
    }

    /// Stable 64-bit fingerprint (FNV-1a over the stored bit patterns).
    pub fn fingerprint(&self) -> u64 {
        let mut h = Fnv1a::default();
        h.write_u64(self.dim() as u64);
        match self {
            Spectrum::Dirac(d) => {
                h.write_u64(0);
                for (freq, w) in d.atoms() {
                    for c in freq.components() {
                        h.write_u64(c.to_bits());
                    }
                    h.write_u64(w.re.to_bits());
                    h.write_u64(w.im.to_bits());
                }
            }
            Spectrum::Grid(g) => {
                h.write_u64(1);
                h.write_u64(g.cutoff().to_bits());
                h.write_u64(g.points_per_axis() as u64);
                for v in g.values() {
                    h.write_u64(v.re.to_bits());
                    h.write_u64(v.im.to_bits());
                }
            }
        }
        h.0
    }
}

impl From<DiracSpectrum> for Spectrum {
    fn from(d: DiracSpectrum) -> Self {
        Spectrum::Dirac(d)
    }
}

impl From<GridSpectrum> for Spectrum {
    fn from(g: GridSpectrum) -> Self {
        Spectrum::Grid(g)
    }
}

struct Fnv1a(u64);

impl Default for Fnv1a {
    fn default() -> Self {
        Self(0xcbf2_9ce4_8422_2325)
    }
}

impl Fnv1a {
    fn write_u64(&mut self, v: u64) {
        for byte in v.to_le_bytes() {
            self.0 ^= byte as u64;
            self.0 = self.0.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }
}

/// Fourier transform of `a·A + b·B`.
pub fn linear_combine(a: f64, spec_a: &Spectrum, b: f64, spec_b: &Spectrum) -> Result<Spectrum> {
    spec_a.check_compatible(spec_b)?;
    match (spec_a, spec_b) {
        (Spectrum::Dirac(x), Spectrum::Dirac(y)) => Ok(Spectrum::Dirac(x.linear_combine(a, b, y))),
        (Spectrum::Grid(x), Spectrum::Grid(y)) => Ok(Spectrum::Grid(x.linear_combine(a, b, y))),
        _ => unreachable!("compatibility checked above"),
    }
}

/// Accumulates `Σ c_j e^{iθ_j}` and the magnitude `Σ |c_j|`, then rejects
/// the sum if its imaginary part is not negligible.
#[derive(Default)]
pub(crate) struct RealAccumulator {
    sum: Complex64,
    magnitude: f64,
}

impl RealAccumulator {
    pub(crate) fn add(&mut self, coefficient: Complex64, phase: f64) {
        let (sin, cos) = phase.sin_cos();
        self.sum += coefficient * Complex64::new(cos, sin);
        self.magnitude += coefficient.norm();
    }

    pub(crate) fn finish(self) -> Result<f64> {
        if self.sum.im.abs() > HERMITIAN_TOL * self.magnitude.max(f64::MIN_POSITIVE) {
            return Err(Error::NonHermitian(format!(
                "imaginary part {:e} against accumulated magnitude {:e}",
                self.sum.im, self.magnitude
            )));
        }
        Ok(self.sum.re)
    }
}

pub(crate) fn check_point_dim(dim: usize, x: &[f64]) -> Result<()> {
    if x.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: x.len(),
        });
    }
    Ok(())
}
