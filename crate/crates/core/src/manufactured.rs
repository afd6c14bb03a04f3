//! Manufactured problems: pick `u*` and `W`, then set `f = (α-Δ)u* + W u*`.

use serde::Serialize;

use crate::calculus::{helmholtz_apply, multiply, ResolventParameter};
use crate::solver::{residual, vmin_certified, Method, Problem, SolverParams};
use crate::spectrum::{gaussian_grid, linear_combine, BarronIndex, DiracSpectrum, Frequency, Spectrum};
use crate::Result;

/// Residual every stock problem must meet with its reference solution.
pub const SELF_CHECK_TOL: f64 = 1e-10;

/// `f = (α-Δ)u + W u`. Exact for Dirac inputs.
pub fn forward_source(u: &Spectrum, alpha: ResolventParameter, w: &Spectrum) -> Result<Spectrum> {
    w.check_compatible(u)?;
    linear_combine(1.0, &helmholtz_apply(alpha, u), 1.0, &multiply(w, u)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum VminStatus {
    Certified,
    Uncertified,
}

/// Certified iff `α ≥ ‖W‖_{𝓑⁰}`. Sufficient for `V ≥ 0`, not necessary.
pub fn vmin_check(alpha: ResolventParameter, w: &Spectrum) -> VminStatus {
    if vmin_certified(alpha, w) {
        VminStatus::Certified
    } else {
        VminStatus::Uncertified
    }
}

#[derive(Debug, Clone)]
pub struct StockProblem {
    pub name: &'static str,
    pub problem: Problem,
    pub reference: Spectrum,
    pub notes: &'static str,
}

impl StockProblem {
    fn build(
        name: &'static str,
        notes: &'static str,
        s: BarronIndex,
        alpha: f64,
        w: Spectrum,
        reference: Spectrum,
        params: SolverParams,
    ) -> Result<Self> {
        let alpha = ResolventParameter::new(alpha)?;
        let f = forward_source(&reference, alpha, &w)?;
        let problem = Problem::new(s, alpha, w, f, params)?;
        let r = residual(&problem, &reference)?;
        assert!(
            r <= SELF_CHECK_TOL,
            "stock problem {name} fails its self-check: residual {r:e}"
        );
        Ok(Self {
            name,
            problem,
            reference,
            notes,
        })
    }
}

fn cos(k: &[f64]) -> Spectrum {
    DiracSpectrum::cosine(k, 1.0).expect("finite frequency").into()
}

/// Grid used by the Gaussian problem: `Ξ = 16`, `N = 257`, `h = 1/8`.
pub const P4_CUTOFF: f64 = 16.0;
pub const P4_POINTS: usize = 257;
/// `‖W‖_{𝓑⁰}` of the Gaussian problem.
pub const P4_W_NORM: f64 = 0.5;

fn p4_potential() -> Result<Spectrum> {
    let unit = gaussian_grid(&Frequency::zero(1), 2.0, 1.0, P4_CUTOFF, P4_POINTS)?;
    let measured = unit.barron_norm(BarronIndex::ZERO);
    Ok(Spectrum::Grid(unit.scale(P4_W_NORM / measured)))
}

fn p4_reference() -> Result<Spectrum> {
    let amp = (2.0 * std::f64::consts::PI).powf(-0.5);
    Ok(gaussian_grid(&Frequency::zero(1), 1.0, amp, P4_CUTOFF, P4_POINTS)?.into())
}

fn try_stock_problems() -> Result<Vec<StockProblem>> {
    let p1 = StockProblem::build(
        "P1",
        "constant potential: W = 0, u* = cos x, f = 3 cos x",
        BarronIndex::ZERO,
        2.0,
        DiracSpectrum::zero(1).into(),
        cos(&[1.0]),
        SolverParams::default(),
    )?;
    let p2 = StockProblem::build(
        "P2",
        "cosine potential: V = 2 + cos x >= 1, q = 0.5, f = 1/2 + 3 cos x + 1/2 cos 2x",
        BarronIndex::ZERO,
        2.0,
        cos(&[1.0]),
        cos(&[1.0]),
        SolverParams::default(),
    )?;
    let p3 = StockProblem::build(
        "P3",
        "two-dimensional lattice: W = cos x1 + cos x2, u* = cos(x1 + x2), q = 2/3",
        BarronIndex::ZERO,
        3.0,
        linear_combine(1.0, &cos(&[1.0, 0.0]), 1.0, &cos(&[0.0, 1.0]))?,
        cos(&[1.0, 1.0]),
        SolverParams {
            method: Method::Direct,
            lattice_cutoff: 12.0,
            weight_floor: 1e-18,
            ..SolverParams::default()
        },
    )?;
    let p4 = StockProblem::build(
        "P4",
        "grid Gaussian: W Gaussian with sigma 2 and B0 norm 0.5, u* = exp(-x^2/2)",
        BarronIndex::ZERO,
        1.0,
        p4_potential()?,
        p4_reference()?,
        SolverParams::default(),
    )?;
    Ok(vec![p1, p2, p3, p4])
}

/// The stock problems P1 to P4, each self-checked on construction.
pub fn stock_problems() -> Vec<StockProblem> {
    try_stock_problems().expect("stock problem construction")
}

/// Looks a stock problem up by name (case-insensitive).
pub fn stock_problem(name: &str) -> Option<StockProblem> {
    stock_problems().into_iter().find(|p| p.name.eq_ignore_ascii_case(name))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alpha(a: f64) -> ResolventParameter {
        ResolventParameter::new(a).unwrap()
    }

    #[test]
    fn forward_source_zero_potential() {
        let f = forward_source(&cos(&[1.0]), alpha(2.0), &DiracSpectrum::zero(1).into()).unwrap();
        let f = f.as_dirac().unwrap();
        assert_eq!(f.len(), 2);
        for (_, w) in f.atoms() {
            assert_eq!(w.re, 1.5);
        }
    }

    #[test]
    fn forward_source_cosine_potential_pointwise() {
        let u = cos(&[1.0]);
        let f = forward_source(&u, alpha(2.0), &cos(&[1.0])).unwrap();
        for i in 0..50 {
            let x = -5.0 + 0.21 * i as f64;
            // -u'' + (2 + cos x) u with u = cos x
            let want = x.cos() + (2.0 + x.cos()) * x.cos();
            assert!((f.evaluate(&[x]).unwrap() - want).abs() < 1e-14);
        }
        assert!((f.barron_norm(BarronIndex::ZERO) - 4.0).abs() < 1e-15);
    }

    #[test]
    fn forward_source_constant_solution() {
        let w = linear_combine(1.0, &cos(&[1.0]), 0.5, &cos(&[3.0])).unwrap();
        let one: Spectrum = DiracSpectrum::constant(1, 1.0).into();
        let f = forward_source(&one, alpha(1.7), &w).unwrap();
        let want = linear_combine(1.0, &DiracSpectrum::constant(1, 1.7).into(), 1.0, &w).unwrap();
        assert_eq!(f, want);
    }

    #[test]
    fn vmin_examples() {
        assert_eq!(vmin_check(alpha(2.0), &cos(&[1.0])), VminStatus::Certified);
        assert_eq!(vmin_check(alpha(0.5), &cos(&[1.0])), VminStatus::Uncertified);
        let w = linear_combine(1.0, &cos(&[1.0, 0.0]), 1.0, &cos(&[0.0, 1.0])).unwrap();
        assert_eq!(vmin_check(alpha(3.0), &w), VminStatus::Certified);
    }

    #[test]
    fn stock_problem_shapes() {
        let all = stock_problems();
        assert_eq!(all.iter().map(|p| p.name).collect::<Vec<_>>(), ["P1", "P2", "P3", "P4"]);
        assert_eq!(all[1].problem.contraction_factor(), 0.5);
        assert!((all[2].problem.contraction_factor() - 2.0 / 3.0).abs() < 1e-15);
        let w4 = all[3].problem.potential().barron_norm(BarronIndex::ZERO);
        assert!((w4 - 0.5).abs() < 1e-15);
        assert!(stock_problem("p3").is_some());
    }

    #[test]
    fn p3_source_support() {
        let p3 = stock_problem("P3").unwrap();
        let f = p3.problem.source().as_dirac().unwrap();
        let reps: Vec<Vec<f64>> = f.representatives().map(|(k, _)| k.components().to_vec()).collect();
        assert_eq!(f.len(), 10);
        for k in [[1.0, 1.0], [2.0, 1.0], [1.0, 2.0], [0.0, 1.0], [1.0, 0.0]] {
            let m = [-k[0], -k[1]];
            assert!(reps.iter().any(|r| r[..] == k || r[..] == m), "missing {k:?}");
        }
    }
}
