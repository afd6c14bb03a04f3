use super::{Method, Problem, SolveReport};
use crate::calculus::{helmholtz_apply, multiply_with_loss, resolvent};
use crate::spectrum::{linear_combine, Spectrum};
use crate::{Error, Result};

/// Consecutive residual increases tolerated before declaring divergence.
const GROWTH_PATIENCE: usize = 5;

/// Fixed-point iteration `u_{k+1} = (α-Δ)^{-1}(f - W u_k)` from
/// `u₀ = (α-Δ)^{-1} f`, pruning atoms below `weightFloor` at every step.
///
/// The residual `f - (α-Δ)u_k - W u_k` is evaluated before each update from
/// the same product `W u_k`, so one convolution is needed per iteration.
pub fn solve_neumann(p: &Problem) -> Result<SolveReport> {
    let params = p.params();
    let q = p.contraction_factor();
    let f = p.source();
    let w = p.potential();

    let mut u = prune(resolvent(p.alpha(), f), params.weight_floor);
    let mut history = Vec::new();
    let mut growth = 0usize;
    let mut iteration = 0usize;

    loop {
        iteration += 1;
        check_size(&u, params.max_unknowns)?;
        let product = multiply_with_loss(w, &u)?;
        let loss = product.truncation_loss;
        let lhs = linear_combine(1.0, &helmholtz_apply(p.alpha(), &u), 1.0, &product.spectrum)?;
        let res = linear_combine(1.0, f, -1.0, &lhs)?.barron_norm(p.s());

        if let Some(&prev) = history.last() {
            growth = if res > prev { growth + 1 } else { 0 };
        }
        history.push(res);

        if res <= params.tol {
            let unknowns = u.support_len();
            return SolveReport::finish(p, u, Method::Neumann, iteration, history, unknowns, loss);
        }
        if !res.is_finite() || growth >= GROWTH_PATIENCE || iteration >= params.max_iter {
            return Err(Error::Divergence {
                iterations: iteration,
                residual: res,
                q,
                history,
            });
        }

        let rhs = linear_combine(1.0, f, -1.0, &product.spectrum)?;
        u = prune(resolvent(p.alpha(), &rhs), params.weight_floor);
    }
}

fn prune(u: Spectrum, floor: f64) -> Spectrum {
    match u {
        Spectrum::Dirac(d) if floor > 0.0 => Spectrum::Dirac(d.prune(floor).0),
        other => other,
    }
}

fn check_size(u: &Spectrum, limit: usize) -> Result<()> {
    if let Spectrum::Dirac(d) = u {
        if d.len() > limit {
            return Err(Error::UnknownExplosion {
                count: d.len(),
                limit,
            });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::ResolventParameter;
    use crate::solver::SolverParams;
    use crate::spectrum::{BarronIndex, DiracSpectrum};

    fn cos(k: f64, a: f64) -> Spectrum {
        DiracSpectrum::cosine(&[k], a).unwrap().into()
    }

    fn problem(alpha: f64, w: Spectrum, f: Spectrum, params: SolverParams) -> Problem {
        Problem::new(BarronIndex::ZERO, ResolventParameter::new(alpha).unwrap(), w, f, params).unwrap()
    }

    #[test]
    fn constant_potential_is_exact_at_first_iterate() {
        let p = problem(2.0, DiracSpectrum::zero(1).into(), cos(1.0, 1.0), SolverParams::default());
        let r = solve_neumann(&p).unwrap();
        assert_eq!(r.iterations, 1);
        assert!(r.residual_bs <= 1e-16);
        let u = r.u.as_dirac().unwrap();
        assert_eq!(u.len(), 2);
        for (_, w) in u.atoms() {
            assert!((w.re - 1.0 / 6.0).abs() < 1e-17);
        }
    }

    #[test]
    fn strong_potential_outcome_is_reported() {
        // q = 3: the iteration may or may not converge; either way the solver
        // must return a well-formed answer rather than loop.
        let params = SolverParams {
            max_iter: 60,
            ..SolverParams::default()
        };
        let p = problem(1.0, cos(1.0, 3.0), cos(1.0, 1.0), params);
        match solve_neumann(&p) {
            Ok(r) => assert!(r.residual_bs <= 1e-10),
            Err(Error::Divergence { q, history, .. }) => {
                assert_eq!(q, 3.0);
                assert!(!history.is_empty());
            }
            Err(e) => panic!("unexpected error {e}"),
        }
    }

    #[test]
    fn unknown_explosion_is_detected() {
        let params = SolverParams {
            max_unknowns: 6,
            weight_floor: 0.0,
            ..SolverParams::default()
        };
        let p = problem(2.0, cos(1.0, 1.0), cos(1.0, 1.0), params);
        assert!(matches!(solve_neumann(&p), Err(Error::UnknownExplosion { limit: 6, .. })));
    }

    #[test]
    fn iteration_cap_reports_divergence() {
        let params = SolverParams {
            max_iter: 2,
            tol: 1e-300,
            ..SolverParams::default()
        };
        let p = problem(2.0, cos(1.0, 1.0), cos(1.0, 1.0), params);
        assert!(matches!(solve_neumann(&p), Err(Error::Divergence { iterations: 2, .. })));
    }
}
