use num_complex::Complex64;

use super::{check_point_dim, BarronIndex, Frequency, RealAccumulator, HERMITIAN_TOL};
use crate::{Error, Result};

/// Hermitian spectral density sampled on the uniform cube `{-Ξ, -Ξ+h, …, Ξ}^d`
/// with `h = 2Ξ/(N-1)` and odd `N`. Integrals are Riemann sums with cell
/// measure `h^d`. Values are stored row-major, last axis fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpectrum {
    dim: usize,
    cutoff: f64,
    points: usize,
    values: Vec<Complex64>,
}

impl GridSpectrum {
    /// Validates layout and Hermitian symmetry (to [`HERMITIAN_TOL`] of the
    /// largest value), then makes mirror pairs exactly conjugate.
    pub fn new(dim: usize, cutoff: f64, points: usize, values: Vec<Complex64>) -> Result<Self> {
        check_layout(dim, cutoff, points)?;
        let expected = points.pow(dim as u32);
        if values.len() != expected {
            return Err(Error::InvalidParameter(format!(
                "grid needs {expected} values, got {}",
                values.len()
            )));
        }
        if values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::InvalidParameter("grid values must be finite".into()));
        }
        let scale = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let last = values.len() - 1;
        for (i, v) in values.iter().enumerate() {
            if (*v - values[last - i].conj()).norm() > HERMITIAN_TOL * scale {
                return Err(Error::NonHermitian(format!("grid node {i} has no conjugate mirror")));
            }
        }
        Ok(Self::from_raw(dim, cutoff, points, values))
    }

    /// Samples a density `ĝ(ξ)` at every node. `f` should satisfy
    /// `f(-ξ) = conj f(ξ)`.
    pub fn from_fn(
        dim: usize,
        cutoff: f64,
        points: usize,
        f: impl Fn(&[f64]) -> Complex64,
    ) -> Result<Self> {
        check_layout(dim, cutoff, points)?;
        let layout = Self {
            dim,
            cutoff,
            points,
            values: Vec::new(),
        };
        let values = (0..points.pow(dim as u32)).map(|i| f(&layout.node(i))).collect();
        Self::new(dim, cutoff, points, values)
    }

    // Averages mirror pairs; callers guarantee the layout is valid.
    pub(crate) fn from_raw(dim: usize, cutoff: f64, points: usize, mut values: Vec<Complex64>) -> Self {
        let last = values.len() - 1;
        for i in 0..=last / 2 {
            let j = last - i;
            let avg = 0.5 * (values[i] + values[j].conj());
            values[i] = avg;
            values[j] = avg.conj();
        }
        Self {
            dim,
            cutoff,
            points,
            values,
        }
    }

    pub fn zeros_like(&self) -> Self {
        Self {
            values: vec![Complex64::new(0.0, 0.0); self.values.len()],
            ..self.clone()
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    pub fn points_per_axis(&self) -> usize {
        self.points
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Node spacing `h`.
    pub fn spacing(&self) -> f64 {
        self.cutoff / self.center_index() as f64
    }

    /// `h^d`.
    pub fn cell_measure(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    /// Index `(N-1)/2` of the zero frequency along each axis.
    pub fn center_index(&self) -> usize {
        (self.points - 1) / 2
    }

    pub fn unravel(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dim];
        for k in (0..self.dim).rev() {
            idx[k] = flat % self.points;
            flat /= self.points;
        }
        idx
    }

    pub fn ravel(&self, idx: &[usize]) -> usize {
        idx.iter().fold(0, |acc, &i| acc * self.points + i)
    }

    /// Frequency of node `flat`. Computed as `(i - c)·h`, so mirrored nodes
    /// have exactly negated coordinates.
    pub fn node(&self, flat: usize) -> Vec<f64> {
        let h = self.spacing();
        let c = self.center_index() as f64;
        self.unravel(flat)
            .into_iter()
            .map(|i| (i as f64 - c) * h + 0.0)
            .collect()
    }

    pub fn node_norm_sq(&self, flat: usize) -> f64 {
        self.node(flat).iter().map(|v| v * v).sum()
    }

    /// Node holding `-ξ` for the node holding `ξ`.
    pub fn mirror(&self, flat: usize) -> usize {
        self.values.len() - 1 - flat
    }

    pub fn value(&self, flat: usize) -> Complex64 {
        self.values[flat]
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        check_point_dim(self.dim, x)?;
        let cell = self.cell_measure();
        let mut acc = RealAccumulator::default();
        for (i, v) in self.values.iter().enumerate() {
            if v.re != 0.0 || v.im != 0.0 {
                acc.add(*v * cell, dot(&self.node(i), x));
            }
        }
        acc.finish()
    }

    pub fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_point_dim(self.dim, x)?;
        let cell = self.cell_measure();
        let mut accs: Vec<RealAccumulator> = (0..self.dim).map(|_| RealAccumulator::default()).collect();
        for (i, v) in self.values.iter().enumerate() {
            if v.re == 0.0 && v.im == 0.0 {
                continue;
            }
            let node = self.node(i);
            let phase = dot(&node, x);
            for (acc, c) in accs.iter_mut().zip(&node) {
                acc.add(*v * Complex64::new(0.0, c * cell), phase);
            }
        }
        accs.into_iter().map(RealAccumulator::finish).collect()
    }

    pub fn laplacian(&self, x: &[f64]) -> Result<f64> {
        check_point_dim(self.dim, x)?;
        let cell = self.cell_measure();
        let mut acc = RealAccumulator::default();
        for (i, v) in self.values.iter().enumerate() {
            let node = self.node(i);
            let n2: f64 = node.iter().map(|c| c * c).sum();
            acc.add(*v * (-n2 * cell), dot(&node, x));
        }
        acc.finish()
    }

    pub fn barron_norm(&self, s: BarronIndex) -> f64 {
        let cell = self.cell_measure();
        let sum: f64 = self
            .values
            .iter()
            .enumerate()
            .filter(|(_, v)| v.re != 0.0 || v.im != 0.0)
            .map(|(i, v)| {
                let weight = if s.value() == 0.0 {
                    1.0
                } else {
                    (1.0 + self.node_norm_sq(i)).powf(0.5 * s.value())
                };
                v.norm() * weight
            })
            .fold(0.0, |acc, x| acc + x);
        sum * cell
    }

    pub fn scale(&self, a: f64) -> Self {
        Self {
            values: self.values.iter().map(|v| v * a).collect(),
            ..self.clone()
        }
    }

    pub fn apply_radial_symbol(&self, symbol: impl Fn(f64) -> f64) -> Self {
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(i, v)| v * symbol(self.node_norm_sq(i)))
            .collect();
        Self {
            values,
            ..self.clone()
        }
    }

    /// Caller must have checked layouts with [`Self::check_same_layout`].
    pub fn linear_combine(&self, a: f64, b: f64, other: &Self) -> Self {
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(x, y)| x * a + y * b)
            .collect();
        Self::from_raw(self.dim, self.cutoff, self.points, values)
    }

    pub fn check_same_layout(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim || self.cutoff != other.cutoff || self.points != other.points {
            return Err(Error::BackendMismatch(format!(
                "grid layouts differ: (d={}, Ξ={}, N={}) vs (d={}, Ξ={}, N={})",
                self.dim, self.cutoff, self.points, other.dim, other.cutoff, other.points
            )));
        }
        Ok(())
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn check_layout(dim: usize, cutoff: f64, points: usize) -> Result<()> {
    if !(1..=3).contains(&dim) {
        return Err(Error::InvalidParameter(format!(
            "grid spectra support 1 ≤ d ≤ 3, got d = {dim}"
        )));
    }
    if !(cutoff.is_finite() && cutoff > 0.0) {
        return Err(Error::InvalidParameter(format!("grid cutoff must be positive, got {cutoff}")));
    }
    if points < 3 || points % 2 == 0 {
        return Err(Error::InvalidParameter(format!(
            "points per axis must be odd and at least 3, got {points}"
        )));
    }
    Ok(())
}

/// `amplitude · [e^{-|ξ-c|²/(2σ²)} + e^{-|ξ+c|²/(2σ²)}] / 2` on the grid;
/// a real even density, hence Hermitian.
pub fn gaussian_grid(
    center: &Frequency,
    sigma: f64,
    amplitude: f64,
    cutoff: f64,
    points: usize,
) -> Result<GridSpectrum> {
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(Error::InvalidParameter(format!("sigma must be positive, got {sigma}")));
    }
    if !amplitude.is_finite() {
        return Err(Error::InvalidParameter("amplitude must be finite".into()));
    }
    let c = center.components();
    let inv = 1.0 / (2.0 * sigma * sigma);
    GridSpectrum::from_fn(center.dim(), cutoff, points, |xi| {
        let minus: f64 = xi.iter().zip(c).map(|(x, m)| (x - m) * (x - m)).sum();
        let plus: f64 = xi.iter().zip(c).map(|(x, m)| (x + m) * (x + m)).sum();
        Complex64::new(amplitude * 0.5 * ((-minus * inv).exp() + (-plus * inv).exp()), 0.0)
    })
}

/// Warning text when `Ξ ≤ |c| + 5σ`, i.e. the Gaussian tail is visibly cut.
pub fn gaussian_tail_warning(center: &Frequency, sigma: f64, cutoff: f64) -> Option<String> {
    let reach = center.norm() + 5.0 * sigma;
    (cutoff <= reach).then(|| {
        format!("grid cutoff {cutoff} does not exceed |center| + 5σ = {reach}; tail mass is truncated")
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn std_normal_density() -> GridSpectrum {
        gaussian_grid(&Frequency::zero(1), 1.0, (2.0 * PI).powf(-0.5), 12.0, 2049).unwrap()
    }

    #[test]
    fn gaussian_density_integrates_to_one_at_origin() {
        let g = std_normal_density();
        assert!((g.evaluate(&[0.0]).unwrap() - 1.0).abs() < 1e-6);
        assert!((g.barron_norm(BarronIndex::ZERO) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn gaussian_second_moment_norm() {
        // (2π)^{-1/2} ∫ (1+ξ²) e^{-ξ²/2} dξ = 2
        let g = std_normal_density();
        assert!((g.barron_norm(BarronIndex::TWO) - 2.0).abs() < 1e-6);
    }

    #[test]
    fn zero_amplitude_gives_zero_grid() {
        let g = gaussian_grid(&Frequency::zero(2), 1.0, 0.0, 6.0, 9).unwrap();
        assert!(g.values().iter().all(|v| v.norm() == 0.0));
        assert_eq!(g.barron_norm(BarronIndex::ONE), 0.0);
    }

    #[test]
    fn rejects_bad_layouts() {
        let z = Frequency::zero(1);
        assert!(gaussian_grid(&z, 1.0, 1.0, 5.0, 64).is_err());
        assert!(gaussian_grid(&z, 1.0, 1.0, 5.0, 1).is_err());
        assert!(gaussian_grid(&Frequency::zero(4), 1.0, 1.0, 5.0, 5).is_err());
        assert!(gaussian_grid(&z, -1.0, 1.0, 5.0, 5).is_err());
    }

    #[test]
    fn mirror_nodes_are_negated_exactly() {
        let g = gaussian_grid(&Frequency::new(vec![0.5, -1.0, 0.25]).unwrap(), 1.0, 1.0, 3.0, 7).unwrap();
        for i in 0..g.len() {
            let a = g.node(i);
            let b = g.node(g.mirror(i));
            assert!(a.iter().zip(&b).all(|(x, y)| *x == -*y));
            assert_eq!(g.value(i), g.value(g.mirror(i)).conj());
        }
        assert_eq!(g.ravel(&g.unravel(123)), 123);
    }

    #[test]
    fn non_hermitian_values_rejected() {
        let mut values = vec![Complex64::new(0.0, 0.0); 5];
        values[0] = Complex64::new(1.0, 0.0);
        assert!(matches!(GridSpectrum::new(1, 1.0, 5, values), Err(Error::NonHermitian(_))));
    }

    #[test]
    fn tail_warning_threshold() {
        let c = Frequency::new(vec![3.0]).unwrap();
        assert!(gaussian_tail_warning(&c, 1.0, 8.0).is_some());
        assert!(gaussian_tail_warning(&c, 1.0, 8.5).is_none());
    }

    #[test]
    fn gradient_of_shifted_gaussian_matches_finite_difference() {
        let g = gaussian_grid(&Frequency::new(vec![1.5, 0.0]).unwrap(), 0.7, 0.2, 6.0, 41).unwrap();
        let x = [0.3, -0.4];
        let grad = g.gradient(&x).unwrap();
        let step = 1e-5;
        for k in 0..2 {
            let mut xp = x;
            let mut xm = x;
            xp[k] += step;
            xm[k] -= step;
            let fd = (g.evaluate(&xp).unwrap() - g.evaluate(&xm).unwrap()) / (2.0 * step);
            assert!((fd - grad[k]).abs() < 1e-7, "axis {k}: {fd} vs {}", grad[k]);
        }
    }
}
