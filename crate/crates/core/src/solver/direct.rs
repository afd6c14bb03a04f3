use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::{Method, Problem, SolveReport};
use crate::spectrum::{DiracSpectrum, Frequency, GridSpectrum, Spectrum};
use crate::{Error, Result};

/// 1-norm condition estimates above this are treated as singular.
pub const CONDITION_LIMIT: f64 = 1e12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Frequencies kept by the truncated Dirac system.
///
/// Starting from `freq(f)`, frequencies are added breadth-first by adding
/// `freq(W)` atoms. A new frequency `η = ξ + ω` carries the a-priori influence
/// `infl(ξ)·|Ŵ(ω)| / (α + |η|²)`, with `infl(ξ₀) = |f̂(ξ₀)| / (α + |ξ₀|²)` for
/// source atoms. It is admitted when its influence is at least `weightFloor`
/// and `|η| ≤ latticeCutoff`; each frequency keeps the influence of the
/// generation that first reached it.
pub fn build_lattice(p: &Problem) -> Result<Vec<Frequency>> {
    let (f, w) = match (p.source(), p.potential()) {
        (Spectrum::Dirac(f), Spectrum::Dirac(w)) => (f, w),
        _ => {
            return Err(Error::BackendMismatch(
                "lattice construction needs Dirac spectra".into(),
            ))
        }
    };
    let params = p.params();
    let alpha = p.alpha().value();
    let mut influence: BTreeMap<Frequency, f64> = f
        .atoms()
        .map(|(xi, v)| (xi.clone(), v.norm() / (alpha + xi.norm_sq())))
        .collect();
    let mut frontier = influence.clone();
    let reach: Vec<(&Frequency, f64)> = w.atoms().map(|(om, v)| (om, v.norm())).collect();

    while !frontier.is_empty() {
        let mut next: BTreeMap<Frequency, f64> = BTreeMap::new();
        for (xi, infl) in &frontier {
            for (omega, wabs) in &reach {
                let eta = xi.add(omega);
                if influence.contains_key(&eta) || eta.norm() > params.lattice_cutoff {
                    continue;
                }
                let value = infl * wabs / (alpha + eta.norm_sq());
                if value < params.weight_floor {
                    continue;
                }
                let slot = next.entry(eta).or_insert(0.0);
                *slot = slot.max(value);
            }
        }
        influence.extend(next.iter().map(|(k, v)| (k.clone(), *v)));
        if influence.len() > params.max_unknowns {
            return Err(Error::SystemTooLarge {
                unknowns: influence.len(),
                limit: params.max_unknowns,
            });
        }
        frontier = next;
    }
    Ok(influence.into_keys().collect())
}

/// `(I + T̃) û = (α+|ξ|²)^{-1} f̂` restricted to a finite frequency set.
struct TruncatedSystem {
    matrix: DMatrix<Complex64>,
    rhs: DVector<Complex64>,
    layout: Layout,
}

enum Layout {
    Lattice(Vec<Frequency>),
    Grid(GridSpectrum),
}

fn assemble(p: &Problem) -> Result<TruncatedSystem> {
    let alpha = p.alpha().value();
    let limit = p.params().max_unknowns;
    match (p.source(), p.potential()) {
        (Spectrum::Dirac(f), Spectrum::Dirac(w)) => {
            let freqs = build_lattice(p)?;
            let index: BTreeMap<&Frequency, usize> = freqs.iter().enumerate().map(|(i, k)| (k, i)).collect();
            let n = freqs.len();
            let mut matrix = DMatrix::<Complex64>::identity(n, n);
            let rhs = DVector::from_iterator(
                n,
                freqs.iter().map(|k| f.weight(k) / (alpha + k.norm_sq())),
            );
            for (j, eta) in freqs.iter().enumerate() {
                for (omega, wv) in w.atoms() {
                    let target = eta.add(omega);
                    if let Some(&i) = index.get(&target) {
                        matrix[(i, j)] += wv / (alpha + target.norm_sq());
                    }
                }
            }
            Ok(TruncatedSystem {
                matrix,
                rhs,
                layout: Layout::Lattice(freqs),
            })
        }
        (Spectrum::Grid(f), Spectrum::Grid(w)) => {
            let n = f.len();
            if n > limit {
                return Err(Error::SystemTooLarge { unknowns: n, limit });
            }
            let cell = w.cell_measure();
            let c = w.center_index() as isize;
            let pts = w.points_per_axis() as isize;
            let mut matrix = DMatrix::<Complex64>::identity(n, n);
            let rhs = DVector::from_iterator(n, (0..n).map(|k| f.value(k) / (alpha + f.node_norm_sq(k))));
            let idx: Vec<Vec<usize>> = (0..n).map(|k| w.unravel(k)).collect();
            let mut offset = vec![0usize; w.dim()];
            for k in 0..n {
                let scale = cell / (alpha + f.node_norm_sq(k));
                'cols: for j in 0..n {
                    for (axis, o) in offset.iter_mut().enumerate() {
                        let v = idx[k][axis] as isize - idx[j][axis] as isize + c;
                        if v < 0 || v >= pts {
                            continue 'cols;
                        }
                        *o = v as usize;
                    }
                    let wv = w.value(w.ravel(&offset));
                    if wv != ZERO {
                        matrix[(k, j)] += wv * scale;
                    }
                }
            }
            Ok(TruncatedSystem {
                matrix,
                rhs,
                layout: Layout::Grid(f.clone()),
            })
        }
        _ => Err(Error::BackendMismatch("potential and source backends differ".into())),
    }
}

fn one_norm(m: &DMatrix<Complex64>) -> f64 {
    m.column_iter()
        .map(|col| col.iter().map(|v| v.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Assembles the truncated system over the Dirac lattice (or every grid
/// node), solves it by LU and reports the residual of the full operator.
pub fn solve_direct(p: &Problem) -> Result<SolveReport> {
    let system = assemble(p)?;
    let n = system.rhs.len();
    let lu = system.matrix.clone().lu();
    let inverse = lu
        .try_inverse()
        .ok_or(Error::NearSingular { condition: f64::INFINITY })?;
    let condition = one_norm(&system.matrix) * one_norm(&inverse);
    if !(condition <= CONDITION_LIMIT) {
        return Err(Error::NearSingular { condition });
    }
    let x = lu
        .solve(&system.rhs)
        .ok_or(Error::NearSingular { condition })?;

    let u = match system.layout {
        Layout::Lattice(freqs) => {
            let map: BTreeMap<Frequency, Complex64> = freqs.into_iter().zip(x.iter().copied()).collect();
            let d = DiracSpectrum::from_merged(p.dim(), map);
            Spectrum::Dirac(d.prune(p.params().weight_floor).0)
        }
        Layout::Grid(g) => Spectrum::Grid(GridSpectrum::from_raw(
            g.dim(),
            g.cutoff(),
            g.points_per_axis(),
            x.iter().copied().collect(),
        )),
    };
    let loss = match (&u, p.potential()) {
        (Spectrum::Grid(_), w) => crate::calculus::multiply_with_loss(w, &u)?.truncation_loss,
        _ => 0.0,
    };
    let report = SolveReport::finish(p, u, Method::Direct, 1, Vec::new(), n, loss)?;
    Ok(SolveReport {
        residual_history: vec![report.residual_bs],
        ..report
    })
}

/// Smallest singular value of the truncated `I + T̃`. A positive value is
/// consistent with, but does not prove, injectivity of `I + T`.
pub fn injectivity_diagnostic(p: &Problem) -> Result<f64> {
    let system = assemble(p)?;
    let sv = system.matrix.singular_values();
    Ok(sv.iter().copied().fold(f64::INFINITY, f64::min))
}
