use serde::Serialize;

use super::{Norms, Problem, SolveReport};
use crate::{Error, Result};

/// Relative slack allowed on both certificate inequalities.
pub const CERTIFICATE_SLACK: f64 = 1e-9;

/// Numerical check of the regularity chain
///
/// ```text
/// ‖u‖_{𝓑^{s+2}} ≤ (1/min{α,1}) (2^{s/2} ‖W‖_{𝓑ˢ} ‖u‖_{𝓑ˢ} + ‖f‖_{𝓑ˢ})            (chain)
/// ‖u‖_{𝓑^{s+2}} ≤ C ‖f‖_{𝓑ˢ},  C = (1/min{α,1}) (2^{s/2} ‖W‖_{𝓑ˢ} / (α(1-q)) + 1)
/// ```
///
/// The second line uses `‖(I+T)^{-1}‖ ≤ 1/(1-q)` and therefore exists only
/// when `q < 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CertificateResult {
    pub chain_bound: f64,
    pub chain_holds: bool,
    pub explicit_c: Option<f64>,
    pub final_bound_holds: Option<bool>,
}

pub(crate) fn from_norms(p: &Problem, norms: &Norms, q: f64) -> CertificateResult {
    let alpha = p.alpha().value();
    let inv_min = 1.0 / alpha.min(1.0);
    let growth = 2f64.powf(0.5 * p.s().value());
    let chain_bound = inv_min * (growth * norms.w_bs * norms.u_bs + norms.f_bs);
    let chain_holds = norms.u_bs_plus2 <= chain_bound * (1.0 + CERTIFICATE_SLACK);
    let explicit_c = (q < 1.0).then(|| inv_min * (growth * norms.w_bs / (alpha * (1.0 - q)) + 1.0));
    let final_bound_holds =
        explicit_c.map(|c| norms.u_bs_plus2 <= c * norms.f_bs * (1.0 + CERTIFICATE_SLACK));
    CertificateResult {
        chain_bound,
        chain_holds,
        explicit_c,
        final_bound_holds,
    }
}

/// Recomputes the certificate for `report.u` from scratch. Refuses reports
/// whose residual exceeds the problem tolerance.
pub fn regularity_certificate(report: &SolveReport, p: &Problem) -> Result<CertificateResult> {
    if !(report.residual_bs <= p.params().tol) {
        return Err(Error::Unconverged {
            residual: report.residual_bs,
            tol: p.params().tol,
        });
    }
    let norms = Norms::measure(p, &report.u);
    Ok(from_norms(p, &norms, p.contraction_factor()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::ResolventParameter;
    use crate::solver::{solve_neumann, SolverParams};
    use crate::spectrum::{BarronIndex, DiracSpectrum, Spectrum};

    #[test]
    fn zero_potential_chain_reduces_to_smoothing_bound() {
        let f: Spectrum = DiracSpectrum::cosine(&[3.0], 2.0).unwrap().into();
        let p = Problem::new(
            BarronIndex::ONE,
            ResolventParameter::new(0.25).unwrap(),
            DiracSpectrum::zero(1).into(),
            f.clone(),
            SolverParams::default(),
        )
        .unwrap();
        let r = solve_neumann(&p).unwrap();
        let c = regularity_certificate(&r, &p).unwrap();
        assert_eq!(c.chain_bound, f.barron_norm(BarronIndex::ONE) / 0.25);
        assert!(c.chain_holds);
        assert_eq!(c.explicit_c, Some(4.0));
        assert_eq!(c.final_bound_holds, Some(true));
    }

    #[test]
    fn refuses_unconverged_reports() {
        let f: Spectrum = DiracSpectrum::cosine(&[1.0], 1.0).unwrap().into();
        let p = Problem::new(
            BarronIndex::ZERO,
            ResolventParameter::new(2.0).unwrap(),
            DiracSpectrum::zero(1).into(),
            f,
            SolverParams::default(),
        )
        .unwrap();
        let mut r = solve_neumann(&p).unwrap();
        r.residual_bs = 1.0;
        assert!(matches!(regularity_certificate(&r, &p), Err(Error::Unconverged { .. })));
    }
}
