//! Solvers for the second-kind integral equation
//!
//! ```text
//!     u + T(u) = (α-Δ)^{-1} f,     T(u) = (α-Δ)^{-1}(W u),
//! ```
//!
//! which is `-Δu + (α+W)u = f` rewritten in the spectral representation.
//! [`solve_neumann`] sums the Neumann series by fixed-point iteration;
//! [`solve_direct`] assembles the truncated linear system and factors it.
//! Every report carries the residual measured with the full operator, the
//! contraction bound `q`, the Barron norms entering the regularity estimate
//! and the resulting [`CertificateResult`].

mod certificate;
mod direct;
mod neumann;

pub use certificate::{regularity_certificate, CertificateResult, CERTIFICATE_SLACK};
pub use direct::{build_lattice, injectivity_diagnostic, solve_direct};
pub use neumann::solve_neumann;

use serde::{Deserialize, Serialize};

use crate::calculus::{contraction_factor, helmholtz_apply, multiply, ResolventParameter};
use crate::spectrum::{linear_combine, Backend, BarronIndex, Spectrum};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Neumann,
    Direct,
}

impl std::str::FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "neumann" => Ok(Method::Neumann),
            "direct" => Ok(Method::Direct),
            other => Err(Error::InvalidParameter(format!(
                "unknown method {other:?}; expected neumann or direct"
            ))),
        }
    }
}

/// Numerical controls shared by both solvers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default, deny_unknown_fields)]
pub struct SolverParams {
    pub method: Method,
    /// Target for the `𝓑ˢ` residual.
    pub tol: f64,
    pub max_iter: usize,
    /// Largest `|ξ|` admitted into the truncated Dirac lattice.
    pub lattice_cutoff: f64,
    /// Atoms below this modulus are pruned from Neumann iterates, and lattice
    /// frequencies whose a-priori influence falls below it are not added.
    pub weight_floor: f64,
    pub max_unknowns: usize,
}

impl Default for SolverParams {
    fn default() -> Self {
        Self {
            method: Method::Neumann,
            tol: 1e-10,
            max_iter: 500,
            lattice_cutoff: 64.0,
            weight_floor: 1e-16,
            max_unknowns: 20_000,
        }
    }
}

impl SolverParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(Error::InvalidParameter(format!("tol must be positive, got {}", self.tol)));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidParameter("maxIter must be at least 1".into()));
        }
        if !(self.lattice_cutoff.is_finite() && self.lattice_cutoff > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "latticeCutoff must be positive, got {}",
                self.lattice_cutoff
            )));
        }
        if !(self.weight_floor.is_finite() && self.weight_floor >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "weightFloor must be non-negative, got {}",
                self.weight_floor
            )));
        }
        if self.max_unknowns == 0 {
            return Err(Error::InvalidParameter("maxUnknowns must be at least 1".into()));
        }
        Ok(())
    }
}

/// `-Δu + (α + W) u = f` on ℝ^d with data in `𝓑ˢ`.
#[derive(Debug, Clone)]
pub struct Problem {
    s: BarronIndex,
    alpha: ResolventParameter,
    potential: Spectrum,
    source: Spectrum,
    params: SolverParams,
}

impl Problem {
    pub fn new(
        s: BarronIndex,
        alpha: ResolventParameter,
        potential: Spectrum,
        source: Spectrum,
        params: SolverParams,
    ) -> Result<Self> {
        potential.check_compatible(&source)?;
        params.validate()?;
        Ok(Self {
            s,
            alpha,
            potential,
            source,
            params,
        })
    }

    pub fn dim(&self) -> usize {
        self.source.dim()
    }

    pub fn s(&self) -> BarronIndex {
        self.s
    }

    pub fn alpha(&self) -> ResolventParameter {
        self.alpha
    }

    /// The variable part `W` of the potential.
    pub fn potential(&self) -> &Spectrum {
        &self.potential
    }

    /// The source `f`.
    pub fn source(&self) -> &Spectrum {
        &self.source
    }

    pub fn params(&self) -> &SolverParams {
        &self.params
    }

    pub fn backend(&self) -> Backend {
        self.source.backend()
    }

    pub fn with_params(mut self, params: SolverParams) -> Result<Self> {
        params.validate()?;
        self.params = params;
        Ok(self)
    }

    pub fn with_method(mut self, method: Method) -> Self {
        self.params.method = method;
        self
    }

    pub fn contraction_factor(&self) -> f64 {
        contraction_factor(self.alpha, &self.potential, self.s)
    }
}

/// Barron norms entering the regularity estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Norms {
    pub f_bs: f64,
    pub w_bs: f64,
    pub u_bs: f64,
    pub u_bs_plus2: f64,
}

impl Norms {
    pub fn measure(p: &Problem, u: &Spectrum) -> Self {
        Self {
            f_bs: p.source.barron_norm(p.s),
            w_bs: p.potential.barron_norm(p.s),
            u_bs: u.barron_norm(p.s),
            u_bs_plus2: u.barron_norm(p.s.plus_two()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum Warning {
    /// `α < ‖W‖_{𝓑⁰}`: the sufficient test for `V ≥ 0` fails.
    #[serde(rename_all = "camelCase")]
    PotentialSignUncertified { alpha: f64, w_b0: f64 },
    /// `q ≥ 1` and the contraction argument is unavailable; for atomic `W`
    /// (or unverified `V ≥ 0`) uniqueness in `𝓑ˢ` is not established.
    #[serde(rename_all = "camelCase")]
    UniquenessUnverified { q: f64 },
    /// A truncated (direct) solve whose full-operator residual exceeds `tol`.
    #[serde(rename_all = "camelCase")]
    TruncationResidual { residual: f64, tol: f64 },
    /// Grid products lost more than `tol` of `𝓑⁰` mass outside `[-Ξ, Ξ]^d`.
    #[serde(rename_all = "camelCase")]
    GridTruncation { loss: f64 },
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub u: Spectrum,
    pub method: Method,
    /// Iterates formed (including `u₀`) for Neumann; 1 for direct.
    pub iterations: usize,
    pub residual_bs: f64,
    pub residual_history: Vec<f64>,
    pub q: f64,
    /// Size of the final iterate's support, or of the truncated system.
    pub unknowns: usize,
    pub truncation_loss: f64,
    pub converged: bool,
    pub norms: Norms,
    /// Present only for converged reports.
    pub certificate: Option<CertificateResult>,
    pub warnings: Vec<Warning>,
}

impl SolveReport {
    pub(crate) fn finish(
        p: &Problem,
        u: Spectrum,
        method: Method,
        iterations: usize,
        residual_history: Vec<f64>,
        unknowns: usize,
        truncation_loss: f64,
    ) -> Result<Self> {
        let residual_bs = residual(p, &u)?;
        let q = p.contraction_factor();
        let norms = Norms::measure(p, &u);
        let converged = residual_bs <= p.params.tol;
        let mut warnings = assumption_warnings(p, q);
        if !converged {
            warnings.push(Warning::TruncationResidual {
                residual: residual_bs,
                tol: p.params.tol,
            });
        }
        if truncation_loss > p.params.tol {
            warnings.push(Warning::GridTruncation {
                loss: truncation_loss,
            });
        }
        let certificate = converged.then(|| certificate::from_norms(p, &norms, q));
        Ok(Self {
            u,
            method,
            iterations,
            residual_bs,
            residual_history,
            q,
            unknowns,
            truncation_loss,
            converged,
            norms,
            certificate,
            warnings,
        })
    }

    /// Converged, both certificate inequalities that apply hold, and no
    /// uniqueness caveat was raised.
    pub fn is_certified(&self) -> bool {
        self.converged
            && self.certificate.as_ref().is_some_and(|c| c.chain_holds && c.final_bound_holds != Some(false))
            && !self
                .warnings
                .iter()
                .any(|w| matches!(w, Warning::UniquenessUnverified { .. }))
    }
}

/// `‖f - (α-Δ)u - W u‖_{𝓑ˢ}` with the full (untruncated Dirac) product.
pub fn residual(p: &Problem, u: &Spectrum) -> Result<f64> {
    Ok(residual_spectrum(p, u)?.barron_norm(p.s))
}

pub(crate) fn residual_spectrum(p: &Problem, u: &Spectrum) -> Result<Spectrum> {
    p.source.check_compatible(u)?;
    let lhs = linear_combine(1.0, &helmholtz_apply(p.alpha, u), 1.0, &multiply(&p.potential, u)?)?;
    linear_combine(1.0, &p.source, -1.0, &lhs)
}

/// `-Δu(x) + (α + W(x)) u(x) - f(x)` evaluated in physical space.
pub fn pointwise_residual(p: &Problem, u: &Spectrum, x: &[f64]) -> Result<f64> {
    let v = p.alpha.value() + p.potential.evaluate(x)?;
    Ok(-u.laplacian(x)? + v * u.evaluate(x)? - p.source.evaluate(x)?)
}

/// `α ≥ ‖W‖_{𝓑⁰}`, which forces `V = α + W ≥ 0` through `‖W‖_∞ ≤ ‖W‖_{𝓑⁰}`.
pub fn vmin_certified(alpha: ResolventParameter, w: &Spectrum) -> bool {
    alpha.value() >= w.barron_norm(BarronIndex::ZERO)
}

fn assumption_warnings(p: &Problem, q: f64) -> Vec<Warning> {
    let mut out = Vec::new();
    let sign_ok = vmin_certified(p.alpha, &p.potential);
    if !sign_ok {
        out.push(Warning::PotentialSignUncertified {
            alpha: p.alpha.value(),
            w_b0: p.potential.barron_norm(BarronIndex::ZERO),
        });
    }
    let atomic_w = p.backend() == Backend::Dirac && !p.potential.is_zero();
    if q >= 1.0 && (atomic_w || !sign_ok) {
        out.push(Warning::UniquenessUnverified { q });
    }
    out
}

/// Runs the method selected in the problem's parameters.
pub fn solve(p: &Problem) -> Result<SolveReport> {
    match p.params.method {
        Method::Neumann => solve_neumann(p),
        Method::Direct => solve_direct(p),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::DiracSpectrum;

    fn cos(k: f64, a: f64) -> Spectrum {
        DiracSpectrum::cosine(&[k], a).unwrap().into()
    }

    fn problem(alpha: f64, w: Spectrum, f: Spectrum) -> Problem {
        Problem::new(
            BarronIndex::ZERO,
            ResolventParameter::new(alpha).unwrap(),
            w,
            f,
            SolverParams::default(),
        )
        .unwrap()
    }

    #[test]
    fn residual_of_zero_is_source_norm() {
        let f = cos(1.0, 3.0);
        let p = problem(2.0, cos(1.0, 1.0), f.clone());
        let r = residual(&p, &DiracSpectrum::zero(1).into()).unwrap();
        assert_eq!(r, f.barron_norm(BarronIndex::ZERO));
    }

    #[test]
    fn problem_rejects_mismatched_data() {
        let w: Spectrum = DiracSpectrum::zero(2).into();
        let r = Problem::new(
            BarronIndex::ZERO,
            ResolventParameter::new(1.0).unwrap(),
            w,
            cos(1.0, 1.0),
            SolverParams::default(),
        );
        assert!(matches!(r, Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn params_validation() {
        let mut p = SolverParams::default();
        assert!(p.validate().is_ok());
        p.tol = 0.0;
        assert!(p.validate().is_err());
        let p = SolverParams {
            weight_floor: -1.0,
            ..SolverParams::default()
        };
        assert!(p.validate().is_err());
    }

    #[test]
    fn sign_warning_implies_uniqueness_warning_for_atomic_potential() {
        let p = problem(0.5, cos(1.0, 1.0), cos(1.0, 1.0));
        let w = assumption_warnings(&p, p.contraction_factor());
        assert!(w.iter().any(|w| matches!(w, Warning::PotentialSignUncertified { .. })));
        assert!(w.iter().any(|w| matches!(w, Warning::UniquenessUnverified { .. })));
    }

    #[test]
    fn vmin_examples() {
        let a = |x| ResolventParameter::new(x).unwrap();
        assert!(vmin_certified(a(2.0), &cos(1.0, 1.0)));
        assert!(!vmin_certified(a(0.5), &cos(1.0, 1.0)));
    }

    #[test]
    fn method_parses() {
        assert_eq!("direct".parse::<Method>().unwrap(), Method::Direct);
        assert!("cg".parse::<Method>().is_err());
    }
}
