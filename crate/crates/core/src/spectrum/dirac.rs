use std::collections::BTreeMap;

use num_complex::Complex64;

use super::{check_point_dim, BarronIndex, Frequency, RealAccumulator, HERMITIAN_TOL};
use crate::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Finite Hermitian atomic measure `Σ w_j δ_{ξ_j}`: a trigonometric sum.
///
/// Invariants: every atom at `ξ` has a partner at `-ξ` with the conjugate
/// weight, the atom at the origin is real, frequencies are unique and no
/// stored weight is zero.
#[derive(Debug, Clone, PartialEq)]
pub struct DiracSpectrum {
    dim: usize,
    atoms: BTreeMap<Frequency, Complex64>,
}

impl DiracSpectrum {
    pub fn zero(dim: usize) -> Self {
        assert!(dim >= 1, "dimension must be at least 1");
        Self {
            dim,
            atoms: BTreeMap::new(),
        }
    }

    /// The constant function `c`.
    pub fn constant(dim: usize, c: f64) -> Self {
        let mut atoms = BTreeMap::new();
        if c != 0.0 {
            atoms.insert(Frequency::zero(dim), Complex64::new(c, 0.0));
        }
        Self { dim, atoms }
    }

    /// `amplitude · cos(k·x)`.
    pub fn cosine(k: &[f64], amplitude: f64) -> Result<Self> {
        let k = Frequency::try_from(k)?;
        if k.is_zero() {
            return Ok(Self::constant(k.dim(), amplitude));
        }
        Self::hermitian_completion(k.dim(), [(k, Complex64::new(0.5 * amplitude, 0.0))])
    }

    /// `amplitude · sin(k·x)`.
    pub fn sine(k: &[f64], amplitude: f64) -> Result<Self> {
        let k = Frequency::try_from(k)?;
        if k.is_zero() {
            return Ok(Self::zero(k.dim()));
        }
        Self::hermitian_completion(k.dim(), [(k, Complex64::new(0.0, -0.5 * amplitude))])
    }

    /// Builds a spectrum from representatives: each listed atom `(ξ, w)` also
    /// implies `(-ξ, conj w)`. If both members of a pair are listed they must
    /// already be conjugate (to [`HERMITIAN_TOL`] relative). Repeated
    /// frequencies are an error.
    pub fn hermitian_completion(
        dim: usize,
        atoms: impl IntoIterator<Item = (Frequency, Complex64)>,
    ) -> Result<Self> {
        let mut listed: BTreeMap<Frequency, Complex64> = BTreeMap::new();
        for (freq, w) in atoms {
            check_freq_dim(dim, &freq)?;
            if !(w.re.is_finite() && w.im.is_finite()) {
                return Err(Error::InvalidParameter(format!("non-finite weight at {freq:?}")));
            }
            if listed.insert(freq.clone(), w).is_some() {
                return Err(Error::InvalidParameter(format!("frequency {freq:?} listed twice")));
            }
        }
        let mut full = BTreeMap::new();
        for (freq, w) in &listed {
            let mirror = freq.neg();
            if freq.is_zero() {
                if w.im.abs() > HERMITIAN_TOL * w.norm() {
                    return Err(Error::NonHermitian(format!(
                        "atom at the origin has imaginary weight {}",
                        w.im
                    )));
                }
                full.insert(freq.clone(), Complex64::new(w.re, 0.0));
                continue;
            }
            match listed.get(&mirror) {
                Some(m) => {
                    check_conjugate(freq, *w, *m)?;
                    if freq.is_representative() {
                        let avg = 0.5 * (*w + m.conj());
                        full.insert(freq.clone(), avg);
                        full.insert(mirror, avg.conj());
                    }
                }
                None => {
                    full.insert(freq.clone(), *w);
                    full.insert(mirror, w.conj());
                }
            }
        }
        full.retain(|_, w| *w != ZERO);
        Ok(Self { dim, atoms: full })
    }

    /// Builds a spectrum from a full atom list that must already be Hermitian
    /// to [`HERMITIAN_TOL`]; pairs are then made exactly conjugate.
    pub fn from_atoms(
        dim: usize,
        atoms: impl IntoIterator<Item = (Frequency, Complex64)>,
    ) -> Result<Self> {
        let mut map: BTreeMap<Frequency, Complex64> = BTreeMap::new();
        for (freq, w) in atoms {
            check_freq_dim(dim, &freq)?;
            *map.entry(freq).or_insert(ZERO) += w;
        }
        for (freq, w) in &map {
            let m = map.get(&freq.neg()).copied().unwrap_or(ZERO);
            check_conjugate(freq, *w, m)?;
        }
        Ok(Self::from_merged(dim, map))
    }

    /// Symmetrises a map that is Hermitian up to rounding by averaging each
    /// `±ξ` pair, then drops exact zeros.
    pub(crate) fn from_merged(dim: usize, map: BTreeMap<Frequency, Complex64>) -> Self {
        let mut atoms = BTreeMap::new();
        for (freq, w) in &map {
            if !freq.is_representative() {
                continue;
            }
            let mirror = freq.neg();
            if mirror == *freq {
                let v = Complex64::new(w.re, 0.0);
                if v != ZERO {
                    atoms.insert(freq.clone(), v);
                }
                continue;
            }
            let m = map.get(&mirror).copied().unwrap_or(ZERO);
            let avg = 0.5 * (*w + m.conj());
            if avg != ZERO {
                atoms.insert(freq.clone(), avg);
                atoms.insert(mirror, avg.conj());
            }
        }
        // Atoms present only through their mirror.
        for (freq, w) in &map {
            if freq.is_representative() || map.contains_key(&freq.neg()) {
                continue;
            }
            let avg = 0.5 * w.conj();
            if avg != ZERO {
                atoms.insert(freq.neg(), avg);
                atoms.insert(freq.clone(), avg.conj());
            }
        }
        Self { dim, atoms }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Atoms in ascending frequency order.
    pub fn atoms(&self) -> impl Iterator<Item = (&Frequency, &Complex64)> {
        self.atoms.iter()
    }

    /// Atoms with `ξ ≥ -ξ`, one per conjugate pair.
    pub fn representatives(&self) -> impl Iterator<Item = (&Frequency, &Complex64)> {
        self.atoms.iter().filter(|(f, _)| f.is_representative())
    }

    pub fn weight(&self, freq: &Frequency) -> Complex64 {
        self.atoms.get(freq).copied().unwrap_or(ZERO)
    }

    pub fn contains(&self, freq: &Frequency) -> bool {
        self.atoms.contains_key(freq)
    }

    pub fn frequencies(&self) -> impl Iterator<Item = &Frequency> {
        self.atoms.keys()
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        check_point_dim(self.dim, x)?;
        let mut acc = RealAccumulator::default();
        for (freq, w) in &self.atoms {
            acc.add(*w, freq.dot(x));
        }
        acc.finish()
    }

    pub fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_point_dim(self.dim, x)?;
        (0..self.dim)
            .map(|k| {
                let mut acc = RealAccumulator::default();
                for (freq, w) in &self.atoms {
                    let c = freq.components()[k];
                    if c != 0.0 {
                        acc.add(*w * Complex64::new(0.0, c), freq.dot(x));
                    }
                }
                acc.finish()
            })
            .collect()
    }

    pub fn laplacian(&self, x: &[f64]) -> Result<f64> {
        check_point_dim(self.dim, x)?;
        let mut acc = RealAccumulator::default();
        for (freq, w) in &self.atoms {
            acc.add(*w * -freq.norm_sq(), freq.dot(x));
        }
        acc.finish()
    }

    pub fn barron_norm(&self, s: BarronIndex) -> f64 {
        self.atoms
            .iter()
            .map(|(freq, w)| w.norm() * freq.barron_weight(s))
            .fold(0.0, |acc, x| acc + x)
    }

    pub fn max_abs_frequency(&self) -> Vec<f64> {
        let mut out = vec![0.0f64; self.dim];
        for freq in self.atoms.keys() {
            for (o, c) in out.iter_mut().zip(freq.components()) {
                *o = o.max(c.abs());
            }
        }
        out
    }

    pub fn scale(&self, a: f64) -> Self {
        self.map_weights(|_, w| w * a)
    }

    pub fn apply_radial_symbol(&self, symbol: impl Fn(f64) -> f64) -> Self {
        self.map_weights(|freq, w| w * symbol(freq.norm_sq()))
    }

    // `f` must commute with conjugation under ξ ↦ -ξ for the result to stay
    // exactly Hermitian; both callers above satisfy this.
    fn map_weights(&self, f: impl Fn(&Frequency, Complex64) -> Complex64) -> Self {
        let atoms = self
            .atoms
            .iter()
            .map(|(freq, w)| (freq.clone(), f(freq, *w)))
            .filter(|(_, w)| *w != ZERO)
            .collect();
        Self {
            dim: self.dim,
            atoms,
        }
    }

    pub fn linear_combine(&self, a: f64, b: f64, other: &Self) -> Self {
        let mut map: BTreeMap<Frequency, Complex64> = BTreeMap::new();
        for (freq, w) in &self.atoms {
            *map.entry(freq.clone()).or_insert(ZERO) += *w * a;
        }
        for (freq, w) in &other.atoms {
            *map.entry(freq.clone()).or_insert(ZERO) += *w * b;
        }
        Self::from_merged(self.dim, map)
    }

    /// Removes atoms with `|w| < eps`. Conjugate partners have equal moduli,
    /// so pairs leave together. Returns the removed `𝓑⁰` mass.
    pub fn prune(&self, eps: f64) -> (Self, f64) {
        if eps <= 0.0 {
            return (self.clone(), 0.0);
        }
        let mut dropped = 0.0;
        let mut atoms = BTreeMap::new();
        for (freq, w) in &self.atoms {
            if w.norm() < eps {
                dropped += w.norm();
            } else {
                atoms.insert(freq.clone(), *w);
            }
        }
        (
            Self {
                dim: self.dim,
                atoms,
            },
            dropped,
        )
    }

    /// Largest violation of `ĝ(-ξ) = conj ĝ(ξ)`, relative to `|ĝ(ξ)|`.
    pub fn hermitian_defect(&self) -> f64 {
        self.atoms
            .iter()
            .map(|(freq, w)| {
                let m = self.weight(&freq.neg());
                (*w - m.conj()).norm() / w.norm()
            })
            .fold(0.0, f64::max)
    }
}

fn check_freq_dim(dim: usize, freq: &Frequency) -> Result<()> {
    if freq.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: freq.dim(),
        });
    }
    Ok(())
}

fn check_conjugate(freq: &Frequency, w: Complex64, mirror: Complex64) -> Result<()> {
    let scale = w.norm().max(mirror.norm());
    if (w - mirror.conj()).norm() > HERMITIAN_TOL * scale {
        return Err(Error::NonHermitian(format!(
            "weight {w} at {freq:?} does not match conj of {mirror} at its mirror"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn f(v: &[f64]) -> Frequency {
        Frequency::try_from(v).unwrap()
    }

    #[test]
    fn cosine_at_origin_is_one() {
        let g = DiracSpectrum::cosine(&[2.0, 0.0], 1.0).unwrap();
        assert_eq!(g.len(), 2);
        assert_eq!(g.weight(&f(&[2.0, 0.0])), c(0.5, 0.0));
        assert_eq!(g.evaluate(&[0.0, 0.0]).unwrap(), 1.0);
    }

    #[test]
    fn constant_evaluates_everywhere() {
        let g = DiracSpectrum::constant(3, 2.5);
        for x in [[0.0, 0.0, 0.0], [1.0, -7.0, 3.5]] {
            assert_eq!(g.evaluate(&x).unwrap(), 2.5);
        }
        assert_eq!(g.barron_norm(BarronIndex::new(3.7).unwrap()), 2.5);
    }

    #[test]
    fn barron_norm_of_cosine() {
        // |k|² = 4, s = 2: (½ + ½)(1 + 4)
        let g = DiracSpectrum::cosine(&[2.0, 0.0], 1.0).unwrap();
        assert_eq!(g.barron_norm(BarronIndex::TWO), 5.0);
    }

    #[test]
    fn sine_phase_and_values() {
        let g = DiracSpectrum::sine(&[1.0], 0.3).unwrap();
        assert_eq!(g.weight(&f(&[1.0])), c(0.0, -0.15));
        assert_eq!(g.weight(&f(&[-1.0])), c(0.0, 0.15));
        let x = 0.7f64;
        assert!((g.evaluate(&[x]).unwrap() - 0.3 * x.sin()).abs() < 1e-15);
    }

    #[test]
    fn evaluate_rejects_wrong_dimension() {
        let g = DiracSpectrum::cosine(&[1.0], 1.0).unwrap();
        assert!(matches!(g.evaluate(&[0.0, 0.0]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn completion_rejects_inconsistent_pairs() {
        let atoms = [(f(&[1.0]), c(0.5, 0.1)), (f(&[-1.0]), c(0.5, 0.1))];
        assert!(matches!(
            DiracSpectrum::hermitian_completion(1, atoms),
            Err(Error::NonHermitian(_))
        ));
        let origin = [(f(&[0.0]), c(1.0, 0.5))];
        assert!(DiracSpectrum::hermitian_completion(1, origin).is_err());
    }

    #[test]
    fn completion_accepts_consistent_pairs() {
        let atoms = [(f(&[1.0]), c(0.5, 0.1)), (f(&[-1.0]), c(0.5, -0.1))];
        let g = DiracSpectrum::hermitian_completion(1, atoms).unwrap();
        assert_eq!(g.len(), 2);
        assert_eq!(g.hermitian_defect(), 0.0);
    }

    #[test]
    fn from_atoms_requires_symmetry() {
        assert!(DiracSpectrum::from_atoms(1, [(f(&[1.0]), c(1.0, 0.0))]).is_err());
        let g = DiracSpectrum::from_atoms(1, [(f(&[1.0]), c(1.0, 0.0)), (f(&[-1.0]), c(1.0, 0.0))])
            .unwrap();
        assert_eq!(g.barron_norm(BarronIndex::ZERO), 2.0);
    }

    #[test]
    fn linear_combine_cancels_to_empty() {
        let g = DiracSpectrum::cosine(&[1.0], 1.0).unwrap();
        let z = g.linear_combine(1.0, -1.0, &g);
        assert!(z.is_empty());
    }

    #[test]
    fn linear_combine_homogeneity_and_sum() {
        let g = DiracSpectrum::cosine(&[1.0], 1.0).unwrap();
        let h = DiracSpectrum::cosine(&[2.0], 1.0).unwrap();
        let two_g = g.linear_combine(2.0, 0.0, &h);
        assert_eq!(two_g.len(), 2);
        assert_eq!(two_g.weight(&f(&[1.0])), c(1.0, 0.0));
        assert_eq!(two_g.weight(&f(&[-1.0])), c(1.0, 0.0));
        let sum = g.linear_combine(1.0, 1.0, &h);
        assert_eq!(sum.len(), 4);
        for k in [-2.0, -1.0, 1.0, 2.0] {
            assert_eq!(sum.weight(&f(&[k])), c(0.5, 0.0));
        }
    }

    #[test]
    fn prune_examples() {
        let big = DiracSpectrum::cosine(&[1.0], 2.0).unwrap();
        let tiny = DiracSpectrum::cosine(&[7.0], 2e-12).unwrap();
        let g = big.linear_combine(1.0, 1.0, &tiny);
        let (p, dropped) = g.prune(1e-9);
        assert_eq!(p, big);
        assert!((dropped - 2e-12).abs() < 1e-27);

        let (same, zero) = g.prune(0.0);
        assert_eq!(same, g);
        assert_eq!(zero, 0.0);

        let h = DiracSpectrum::cosine(&[1.0], 1.0)
            .unwrap()
            .linear_combine(1.0, 1.0, &DiracSpectrum::cosine(&[2.0], 0.5).unwrap());
        let (p, dropped) = h.prune(0.3);
        assert_eq!(p, DiracSpectrum::cosine(&[1.0], 1.0).unwrap());
        assert_eq!(dropped, 0.5);
    }

    #[test]
    fn derivatives_of_cosine() {
        let g = DiracSpectrum::cosine(&[2.0, -1.0], 3.0).unwrap();
        let x = [0.3, 1.1];
        let phase = 2.0 * x[0] - x[1];
        let grad = g.gradient(&x).unwrap();
        assert!((grad[0] + 6.0 * phase.sin()).abs() < 1e-14);
        assert!((grad[1] - 3.0 * phase.sin()).abs() < 1e-14);
        assert!((g.laplacian(&x).unwrap() + 15.0 * phase.cos()).abs() < 1e-13);
    }

    #[test]
    fn zero_norm_is_positive_zero() {
        let n = DiracSpectrum::zero(2).barron_norm(BarronIndex::TWO);
        assert!(n == 0.0 && n.is_sign_positive());
    }
}
