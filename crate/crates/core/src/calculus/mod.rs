//! Fourier-multiplier calculus: the resolvent `(α-Δ)^{-1}`, the Helmholtz
//! operator `α-Δ`, products `W·u` and the operator `T(u) = (α-Δ)^{-1}(W u)`.

mod convolution;

use serde::{Deserialize, Serialize};

use crate::spectrum::{BarronIndex, Spectrum};
use crate::{Error, Result};

/// The constant part `α > 0` of the potential `V = α + W`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct ResolventParameter(f64);

impl ResolventParameter {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "alpha must be a finite positive constant, got {alpha}"
            )));
        }
        Ok(Self(alpha))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for ResolventParameter {
    type Error = Error;
    fn try_from(alpha: f64) -> Result<Self> {
        Self::new(alpha)
    }
}

impl From<ResolventParameter> for f64 {
    fn from(a: ResolventParameter) -> f64 {
        a.0
    }
}

/// A product spectrum together with the `𝓑⁰` mass that fell outside a grid
/// (always zero for Dirac spectra).
#[derive(Debug, Clone)]
pub struct Product {
    pub spectrum: Spectrum,
    pub truncation_loss: f64,
}

/// `(α-Δ)^{-1} g`: divides every coefficient by `α + |ξ|²`.
pub fn resolvent(alpha: ResolventParameter, g: &Spectrum) -> Spectrum {
    let a = alpha.value();
    g.apply_radial_symbol(|n2| 1.0 / (a + n2))
}

/// `(α-Δ) u`: multiplies every coefficient by `α + |ξ|²`.
pub fn helmholtz_apply(alpha: ResolventParameter, u: &Spectrum) -> Spectrum {
    let a = alpha.value();
    u.apply_radial_symbol(|n2| a + n2)
}

/// Spectrum of the pointwise product `W·u`, i.e. `Ŵ ∗ û`.
pub fn multiply(w: &Spectrum, u: &Spectrum) -> Result<Spectrum> {
    multiply_with_loss(w, u).map(|p| p.spectrum)
}

/// As [`multiply`], also reporting grid truncation loss.
pub fn multiply_with_loss(w: &Spectrum, u: &Spectrum) -> Result<Product> {
    w.check_compatible(u)?;
    match (w, u) {
        (Spectrum::Dirac(a), Spectrum::Dirac(b)) => Ok(Product {
            spectrum: Spectrum::Dirac(convolution::dirac_convolve(a, b)),
            truncation_loss: 0.0,
        }),
        (Spectrum::Grid(a), Spectrum::Grid(b)) => {
            let (g, lost) = convolution::grid_convolve(a, b);
            Ok(Product {
                spectrum: Spectrum::Grid(g),
                truncation_loss: lost,
            })
        }
        _ => unreachable!("compatibility checked above"),
    }
}

/// `T(u) = (α-Δ)^{-1}(W u)`.
pub fn operator_t(alpha: ResolventParameter, w: &Spectrum, u: &Spectrum) -> Result<Spectrum> {
    Ok(resolvent(alpha, &multiply(w, u)?))
}

/// Operator-norm bound `q = 2^{s/2} ‖W‖_{𝓑ˢ} / α` of `T` on `𝓑ˢ`;
/// `q < 1` makes the Neumann series converge.
pub fn contraction_factor(alpha: ResolventParameter, w: &Spectrum, s: BarronIndex) -> f64 {
    2f64.powf(0.5 * s.value()) * w.barron_norm(s) / alpha.value()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::{gaussian_grid, DiracSpectrum, Frequency};
    use num_complex::Complex64;

    fn alpha(a: f64) -> ResolventParameter {
        ResolventParameter::new(a).unwrap()
    }

    fn cos(k: &[f64]) -> Spectrum {
        DiracSpectrum::cosine(k, 1.0).unwrap().into()
    }

    #[test]
    fn alpha_must_be_positive() {
        assert!(ResolventParameter::new(0.0).is_err());
        assert!(ResolventParameter::new(-1.0).is_err());
        assert!(ResolventParameter::new(f64::NAN).is_err());
    }

    #[test]
    fn resolvent_of_three_dimensional_cosine() {
        let r = resolvent(alpha(1.0), &cos(&[1.0, 1.0, 1.0]));
        let d = r.as_dirac().unwrap();
        assert_eq!(d.len(), 2);
        for k in [[1.0, 1.0, 1.0], [-1.0, -1.0, -1.0]] {
            assert_eq!(d.weight(&Frequency::new(k.to_vec()).unwrap()), Complex64::new(0.125, 0.0));
        }
    }

    #[test]
    fn resolvent_of_constant() {
        let r = resolvent(alpha(2.0), &DiracSpectrum::constant(1, 6.0).into());
        assert_eq!(r, DiracSpectrum::constant(1, 3.0).into());
    }

    #[test]
    fn helmholtz_examples() {
        let h = helmholtz_apply(alpha(1.0), &cos(&[1.0]));
        assert_eq!(h, DiracSpectrum::cosine(&[1.0], 2.0).unwrap().into());
        let h = helmholtz_apply(alpha(3.0), &DiracSpectrum::constant(2, 1.0).into());
        assert_eq!(h, DiracSpectrum::constant(2, 3.0).into());
    }

    #[test]
    fn helmholtz_inverts_resolvent() {
        let g: Spectrum = DiracSpectrum::cosine(&[0.3, 2.0], 1.7)
            .unwrap()
            .linear_combine(1.0, 1.0, &DiracSpectrum::sine(&[5.0, -1.0], 0.4).unwrap())
            .into();
        let a = alpha(0.37);
        let back = helmholtz_apply(a, &resolvent(a, &g));
        let (b, g) = (back.as_dirac().unwrap(), g.as_dirac().unwrap());
        for (freq, w) in g.atoms() {
            assert!((b.weight(freq) - w).norm() <= 1e-15 * w.norm());
        }
    }

    #[test]
    fn product_to_sum_identity() {
        let p = multiply(&cos(&[1.0]), &cos(&[2.0])).unwrap();
        let d = p.as_dirac().unwrap();
        assert_eq!(d.len(), 4);
        for k in [-3.0, -1.0, 1.0, 3.0] {
            assert_eq!(d.weight(&Frequency::new(vec![k]).unwrap()), Complex64::new(0.25, 0.0));
        }
    }

    #[test]
    fn constant_times_u_scales() {
        let u: Spectrum = DiracSpectrum::cosine(&[1.0, 2.0], 0.7)
            .unwrap()
            .linear_combine(1.0, 1.0, &DiracSpectrum::constant(2, 0.2))
            .into();
        let p = multiply(&DiracSpectrum::constant(2, 3.0).into(), &u).unwrap();
        assert_eq!(p, u.scale(3.0));
    }

    #[test]
    fn operator_t_examples() {
        let one: Spectrum = DiracSpectrum::constant(1, 1.0).into();
        let zero: Spectrum = DiracSpectrum::zero(1).into();
        assert!(operator_t(alpha(2.0), &zero, &cos(&[3.0])).unwrap().is_zero());
        let t = operator_t(alpha(2.0), &cos(&[1.0]), &one).unwrap();
        let d = t.as_dirac().unwrap();
        assert_eq!(d.len(), 2);
        assert!((d.weight(&Frequency::new(vec![1.0]).unwrap()).re - 1.0 / 6.0).abs() < 1e-16);
    }

    #[test]
    fn contraction_factor_examples() {
        assert_eq!(contraction_factor(alpha(2.0), &cos(&[1.0]), BarronIndex::ZERO), 0.5);
        assert_eq!(
            contraction_factor(alpha(2.0), &DiracSpectrum::zero(1).into(), BarronIndex::ONE),
            0.0
        );
        let w: Spectrum = crate::spectrum::linear_combine(1.0, &cos(&[1.0]), 1.0, &cos(&[2.0])).unwrap();
        assert_eq!(w.barron_norm(BarronIndex::TWO), 7.0);
        assert_eq!(contraction_factor(alpha(2.0), &w, BarronIndex::TWO), 7.0);
    }

    #[test]
    fn grid_product_of_constants_like_gaussians() {
        // Convolution of two centred Gaussians with std σ₁, σ₂ (unit mass) has
        // unit mass and variance σ₁² + σ₂².
        let unit = |s: f64| {
            gaussian_grid(&Frequency::zero(1), s, 1.0 / (s * (2.0 * std::f64::consts::PI).sqrt()), 16.0, 257)
                .unwrap()
        };
        let p = multiply_with_loss(&unit(1.0).into(), &unit(0.5).into()).unwrap();
        assert!((p.spectrum.barron_norm(BarronIndex::ZERO) - 1.0).abs() < 1e-12);
        // the true tail is ~1e-50; what remains is FFT round-off
        assert!(p.truncation_loss < 1e-13);
        let var = 1.25;
        let peak = 1.0 / (2.0 * std::f64::consts::PI * var).sqrt();
        let g = p.spectrum.as_grid().unwrap();
        assert!((g.value(g.center_index()).re - peak).abs() < 1e-12);
    }

    #[test]
    fn grid_truncation_loss_is_reported() {
        let wide = gaussian_grid(&Frequency::new(vec![3.0]).unwrap(), 0.5, 1.0, 4.0, 65).unwrap();
        let p = multiply_with_loss(&wide.clone().into(), &wide.into()).unwrap();
        // atoms near ±6 fall outside [-4, 4]
        assert!(p.truncation_loss > 0.1);
    }

    #[test]
    fn grid_layout_mismatch_rejected() {
        let a = gaussian_grid(&Frequency::zero(1), 1.0, 1.0, 8.0, 33).unwrap();
        let b = gaussian_grid(&Frequency::zero(1), 1.0, 1.0, 8.0, 35).unwrap();
        assert!(matches!(multiply(&a.into(), &b.into()), Err(Error::BackendMismatch(_))));
    }
}
