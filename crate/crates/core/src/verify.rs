//! Property suites run by `barron verify`.
//!
//! Each suite draws seeded random Dirac spectra (or uses the stock
//! problems), checks one family of inequalities and counts failures.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::calculus::{multiply, resolvent, ResolventParameter};
use crate::manufactured::stock_problems;
use crate::network::{mse_bound, sample_network_stream, h1_error, default_quad_order, BoxDomain};
use crate::solver::{regularity_certificate, solve, Problem, Warning};
use crate::spectrum::{BarronIndex, DiracSpectrum, Frequency, Spectrum};
use crate::Result;

/// Relative slack allowed on every inequality.
pub const RELATIVE_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SuiteResult {
    pub name: String,
    pub checks: usize,
    pub failures: usize,
    /// First few failure descriptions.
    pub details: Vec<String>,
}

impl SuiteResult {
    fn new(name: &str) -> Self {
        Self {
            name: name.to_string(),
            checks: 0,
            failures: 0,
            details: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, detail: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures += 1;
            if self.details.len() < 5 {
                self.details.push(detail());
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

fn le(a: f64, b: f64) -> bool {
    a <= b * (1.0 + RELATIVE_SLACK) + f64::MIN_POSITIVE
}

/// Random Hermitian Dirac spectrum with at most `max_atoms` atoms.
///
/// Frequencies lie on the half-integer lattice in `[-3, 3]^d`, so products of
/// two spectra usually merge colliding frequencies.
pub fn random_dirac(rng: &mut impl Rng, dim: usize, max_atoms: usize) -> DiracSpectrum {
    let reps = rng.random_range(1..=max_atoms.div_ceil(2).max(1));
    let mut listed: BTreeMap<Frequency, Complex64> = BTreeMap::new();
    for _ in 0..reps {
        let k: Vec<f64> = (0..dim).map(|_| rng.random_range(-6i32..=6) as f64 * 0.5).collect();
        let k = Frequency::new(k).expect("finite");
        let k = if k.is_representative() { k } else { k.neg() };
        let w = if k.is_zero() {
            Complex64::new(rng.random_range(-1.0..1.0), 0.0)
        } else {
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        };
        listed.insert(k, w);
    }
    let d = DiracSpectrum::hermitian_completion(dim, listed).expect("representatives are distinct");
    if d.len() > max_atoms {
        // a representative pair counts twice; drop to the budget
        let kept: Vec<(Frequency, Complex64)> = d
            .representatives()
            .take(max_atoms / 2)
            .map(|(k, w)| (k.clone(), *w))
            .collect();
        return DiracSpectrum::hermitian_completion(dim, kept).expect("subset of a valid spectrum");
    }
    d
}

fn draws(seed: u64, count: usize, max_atoms: usize) -> Vec<(usize, DiracSpectrum, DiracSpectrum, f64, ChaCha8Rng)> {
    let mut rng = crate::network::stream_rng(seed, 0, 0);
    (0..count)
        .map(|i| {
            let dim = 1 + i % 3;
            let a = random_dirac(&mut rng, dim, max_atoms);
            let b = random_dirac(&mut rng, dim, max_atoms);
            let alpha = rng.random_range(0.1..5.0);
            let sub = crate::network::stream_rng(seed, 1, i as u32);
            (dim, a, b, alpha, sub)
        })
        .collect()
}

const INDICES: [BarronIndex; 3] = [BarronIndex::ZERO, BarronIndex::ONE, BarronIndex::TWO];

/// `sup |g(x)| ≤ ‖g‖_{𝓑⁰}` over 32 sample points per spectrum.
pub fn embedding_suite(seed: u64, count: usize) -> SuiteResult {
    let mut out = SuiteResult::new("embedding");
    for (dim, g, _, _, mut rng) in draws(seed, count, 12) {
        let b0 = g.barron_norm(BarronIndex::ZERO);
        for _ in 0..32 {
            let x: Vec<f64> = (0..dim).map(|_| rng.random_range(-10.0..10.0)).collect();
            let v = g.evaluate(&x).expect("dimension matches");
            out.check(le(v.abs(), b0), || format!("|g(x)| = {v} > {b0} at {x:?}"));
        }
    }
    out
}

/// `‖g‖_{𝓑ˢ} ≤ ‖g‖_{𝓑ᵗ}` for `s ≤ t`.
pub fn monotone_suite(seed: u64, count: usize) -> SuiteResult {
    let mut out = SuiteResult::new("monotone");
    for (_, g, _, _, _) in draws(seed, count, 12) {
        for i in 0..3 {
            for j in i..3 {
                let (a, b) = (g.barron_norm(INDICES[i]), g.barron_norm(INDICES[j]));
                out.check(le(a, b), || format!("B^{i} = {a} > B^{j} = {b}"));
            }
        }
    }
    out
}

/// `‖(α-Δ)⁻¹g‖_{𝓑ˢ} ≤ ‖g‖_{𝓑ˢ}/α` and `‖(α-Δ)⁻¹g‖_{𝓑^{s+2}} ≤ ‖g‖_{𝓑ˢ}/min{α,1}`.
pub fn resolvent_suite(seed: u64, count: usize) -> SuiteResult {
    let mut out = SuiteResult::new("resolvent");
    for (_, g, _, alpha, _) in draws(seed, count, 12) {
        let a = ResolventParameter::new(alpha).expect("positive");
        let g: Spectrum = g.into();
        let r = resolvent(a, &g);
        for s in INDICES {
            let gs = g.barron_norm(s);
            let rs = r.barron_norm(s);
            let rs2 = r.barron_norm(s.plus_two());
            out.check(le(rs, gs / alpha), || format!("same-index bound: {rs} > {gs}/{alpha}"));
            out.check(le(rs2, gs / alpha.min(1.0)), || format!("gain bound: {rs2} > {gs}/min({alpha},1)"));
        }
    }
    out
}

/// `‖Wu‖_{𝓑ˢ} ≤ 2^{s/2} ‖W‖_{𝓑ˢ} ‖u‖_{𝓑ˢ}`.
pub fn product_suite(seed: u64, count: usize) -> SuiteResult {
    let mut out = SuiteResult::new("product");
    for (_, w, u, _, _) in draws(seed, count, 12) {
        let (w, u): (Spectrum, Spectrum) = (w.into(), u.into());
        let p = multiply(&w, &u).expect("same dimension");
        for s in INDICES {
            let lhs = p.barron_norm(s);
            let rhs = 2f64.powf(s.value() / 2.0) * w.barron_norm(s) * u.barron_norm(s);
            out.check(le(lhs, rhs), || format!("s = {}: {lhs} > {rhs}", s.value()));
        }
    }
    out
}

/// `multiply` against the gather form `(Ŵ*û)(η) = Σ_ω Ŵ(ω) û(η-ω)`,
/// atom for atom.
pub fn convolution_suite(seed: u64, count: usize) -> SuiteResult {
    let mut out = SuiteResult::new("convolution");
    for (_, w, u, _, _) in draws(seed, count, 12) {
        let p = multiply(&w.clone().into(), &u.clone().into()).expect("same dimension");
        let p = p.as_dirac().expect("dirac product");
        let mut targets: Vec<Frequency> = Vec::new();
        for a in w.frequencies() {
            for b in u.frequencies() {
                targets.push(a.add(b));
            }
        }
        targets.sort();
        targets.dedup();
        let scale = w.barron_norm(BarronIndex::ZERO) * u.barron_norm(BarronIndex::ZERO);
        for eta in &targets {
            let want: Complex64 = w.atoms().map(|(om, wv)| wv * u.weight(&eta.add(&om.neg()))).sum();
            let got = p.weight(eta);
            out.check((got - want).norm() <= RELATIVE_SLACK * scale.max(f64::MIN_POSITIVE), || {
                format!("atom {eta:?}: {got} vs {want}")
            });
        }
        out.check(p.frequencies().all(|k| targets.binary_search(k).is_ok()), || {
            "product has atoms outside the sum set".into()
        });
    }
    out
}

/// Solves a problem and records convergence and both certificate inequalities.
fn certify_into(out: &mut SuiteResult, name: &str, p: &Problem) {
    match solve(p) {
        Ok(report) if report.converged => match regularity_certificate(&report, p) {
            Ok(c) => {
                out.check(c.chain_holds, || format!("{name}: chain bound fails"));
                if let Some(holds) = c.final_bound_holds {
                    out.check(holds, || format!("{name}: explicit bound fails"));
                }
            }
            Err(e) => out.check(false, || format!("{name}: {e}")),
        },
        Ok(report) => out.check(false, || format!("{name}: residual {} above tol", report.residual_bs)),
        Err(e) => out.check(false, || format!("{name}: {e}")),
    }
}

/// Regularity certificate on every stock problem.
pub fn certificate_suite() -> SuiteResult {
    let mut out = SuiteResult::new("certificate");
    for sp in stock_problems() {
        certify_into(&mut out, sp.name, &sp.problem);
    }
    out
}

/// Empirical `E‖u_n - u‖²_{H¹}` (upper 95% limit) stays below `mse_bound`.
pub fn extractor_bound_suite(seed: u64, trials: usize) -> Result<SuiteResult> {
    let mut out = SuiteResult::new("extractor-bound");
    let two_cos: Spectrum = DiracSpectrum::cosine(&[1.0], 1.0)?
        .linear_combine(1.0, 1.0, &DiracSpectrum::cosine(&[2.0], 1.0)?)
        .into();
    let mut targets = vec![("cos x + cos 2x".to_string(), two_cos)];
    for sp in stock_problems() {
        if sp.reference.as_dirac().is_some() {
            targets.push((sp.name.to_string(), sp.reference.clone()));
        }
    }
    for (name, u) in targets {
        let omega = BoxDomain::cube(u.dim(), 0.0, 2.0 * std::f64::consts::PI)?;
        let order = default_quad_order(u.dim());
        for n in [4usize, 16, 64] {
            let mut sq = Vec::with_capacity(trials);
            for t in 0..trials {
                let net = sample_network_stream(&u, n, seed, crate::network::stream_id(t as u32, n as u32))?;
                let e = h1_error(&net, &u, &omega, order)?;
                sq.push(e * e);
            }
            let m = sq.len() as f64;
            let mean = sq.iter().sum::<f64>() / m;
            let var = sq.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (m - 1.0);
            let upper = mean + 1.96 * (var / m).sqrt();
            let bound = mse_bound(&u, &omega, n)?;
            out.check(upper <= bound, || format!("{name}, n = {n}: {upper} > {bound}"));
        }
    }
    Ok(out)
}

/// Solve and certificate checks on a user problem; warnings are returned
/// for display rather than counted as failures.
pub fn user_problem_suite(p: &Problem) -> (SuiteResult, Vec<Warning>) {
    let mut out = SuiteResult::new("user-problem");
    let warnings = match solve(p) {
        Ok(r) => r.warnings.clone(),
        Err(_) => Vec::new(),
    };
    certify_into(&mut out, "input", p);
    (out, warnings)
}

/// Every library suite with its default sizes.
pub fn default_suites(seed: u64) -> Result<Vec<SuiteResult>> {
    Ok(vec![
        embedding_suite(seed, 200),
        monotone_suite(seed, 200),
        resolvent_suite(seed, 200),
        product_suite(seed, 200),
        convolution_suite(seed, 200),
        certificate_suite(),
        extractor_bound_suite(seed, 200)?,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_spectra_are_bounded_and_hermitian() {
        let mut rng = crate::network::stream_rng(3, 0, 0);
        for _ in 0..100 {
            let d = random_dirac(&mut rng, 2, 12);
            assert!(!d.is_empty() && d.len() <= 12);
            assert!(d.hermitian_defect() == 0.0);
        }
    }

    #[test]
    fn small_suites_pass() {
        for s in [
            embedding_suite(1, 20),
            monotone_suite(1, 20),
            resolvent_suite(1, 20),
            product_suite(1, 20),
            convolution_suite(1, 20),
        ] {
            assert!(s.passed(), "{s:?}");
            assert!(s.checks > 0);
        }
    }
}
