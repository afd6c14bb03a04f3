//! JSON documents and CSV tables exchanged with the command line.
//!
//! A spectrum literal is
//!
//! ```json
//! { "dim": 1, "backend": "dirac", "atoms": [ { "freq": [1.0], "re": 0.5, "im": 0.0 } ] }
//! { "dim": 1, "backend": "grid", "cutoff": 16.0, "pointsPerAxis": 257,
//!   "generator": { "gaussian": { "center": [0.0], "sigma": 1.0, "amplitude": 0.4 } } }
//! ```
//!
//! Only one member of each `±ξ` pair needs to be listed; the loader adds the
//! conjugate mirror. Grids may also be given node by node with
//! `"generator": { "values": { "re": [...], "im": [...] } }`, which is how
//! solutions are written back. A problem file is
//! `{ dim, s, alpha, W, f, solver: { method, tol, maxIter, latticeCutoff,
//! weightFloor, maxUnknowns } }` with every solver field optional.

use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::calculus::ResolventParameter;
use crate::network::{BoxDomain, CosineNetwork, H1Estimate, RateStudyResult, SLOPE_RANGE};
use crate::solver::{Problem, SolveReport, SolverParams};
use crate::spectrum::{gaussian_grid, gaussian_tail_warning, Backend, BarronIndex, DiracSpectrum, Frequency, GridSpectrum, Spectrum};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomLiteral {
    pub freq: Vec<f64>,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub enum GeneratorLiteral {
    Gaussian { center: Vec<f64>, sigma: f64, amplitude: f64 },
    Values { re: Vec<f64>, im: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct SpectrumLiteral {
    pub dim: usize,
    pub backend: Backend,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub atoms: Option<Vec<AtomLiteral>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cutoff: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points_per_axis: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<GeneratorLiteral>,
}

/// A spectrum together with non-fatal notes raised while loading it.
#[derive(Debug, Clone)]
pub struct Loaded<T> {
    pub value: T,
    pub warnings: Vec<String>,
}

impl SpectrumLiteral {
    pub fn to_spectrum(&self) -> Result<Loaded<Spectrum>> {
        if self.dim == 0 {
            return Err(Error::Format("dim must be at least 1".into()));
        }
        match self.backend {
            Backend::Dirac => {
                if self.cutoff.is_some() || self.points_per_axis.is_some() || self.generator.is_some() {
                    return Err(Error::Format("dirac literals take only 'atoms'".into()));
                }
                let atoms = self.atoms.as_deref().unwrap_or_default();
                let mut parsed = Vec::with_capacity(atoms.len());
                for (i, a) in atoms.iter().enumerate() {
                    let freq = Frequency::new(a.freq.clone()).map_err(|e| Error::Format(format!("atoms[{i}]: {e}")))?;
                    parsed.push((freq, Complex64::new(a.re, a.im)));
                }
                let d = DiracSpectrum::hermitian_completion(self.dim, parsed)
                    .map_err(|e| Error::Format(format!("atoms: {e}")))?;
                Ok(Loaded {
                    value: d.into(),
                    warnings: Vec::new(),
                })
            }
            Backend::Grid => {
                if self.atoms.is_some() {
                    return Err(Error::Format("grid literals do not take 'atoms'".into()));
                }
                let cutoff = self.cutoff.ok_or_else(|| Error::Format("grid literal needs 'cutoff'".into()))?;
                let points = self
                    .points_per_axis
                    .ok_or_else(|| Error::Format("grid literal needs 'pointsPerAxis'".into()))?;
                let generator = self
                    .generator
                    .as_ref()
                    .ok_or_else(|| Error::Format("grid literal needs 'generator'".into()))?;
                let mut warnings = Vec::new();
                let grid = match generator {
                    GeneratorLiteral::Gaussian { center, sigma, amplitude } => {
                        if center.len() != self.dim {
                            return Err(Error::Format(format!(
                                "generator.gaussian.center has {} components, expected {}",
                                center.len(),
                                self.dim
                            )));
                        }
                        let c = Frequency::new(center.clone()).map_err(|e| Error::Format(e.to_string()))?;
                        warnings.extend(gaussian_tail_warning(&c, *sigma, cutoff));
                        gaussian_grid(&c, *sigma, *amplitude, cutoff, points)
                    }
                    GeneratorLiteral::Values { re, im } => {
                        if re.len() != im.len() {
                            return Err(Error::Format("generator.values: 're' and 'im' differ in length".into()));
                        }
                        let values = re.iter().zip(im).map(|(a, b)| Complex64::new(*a, *b)).collect();
                        GridSpectrum::new(self.dim, cutoff, points, values)
                    }
                }
                .map_err(|e| Error::Format(format!("generator: {e}")))?;
                Ok(Loaded {
                    value: grid.into(),
                    warnings,
                })
            }
        }
    }

    /// Dirac spectra are written as representatives only; grids node by node.
    pub fn from_spectrum(s: &Spectrum) -> Self {
        match s {
            Spectrum::Dirac(d) => Self {
                dim: d.dim(),
                backend: Backend::Dirac,
                atoms: Some(
                    d.representatives()
                        .map(|(k, w)| AtomLiteral {
                            freq: k.components().to_vec(),
                            re: w.re,
                            im: w.im,
                        })
                        .collect(),
                ),
                cutoff: None,
                points_per_axis: None,
                generator: None,
            },
            Spectrum::Grid(g) => Self {
                dim: g.dim(),
                backend: Backend::Grid,
                atoms: None,
                cutoff: Some(g.cutoff()),
                points_per_axis: Some(g.points_per_axis()),
                generator: Some(GeneratorLiteral::Values {
                    re: g.values().iter().map(|v| v.re).collect(),
                    im: g.values().iter().map(|v| v.im).collect(),
                }),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub dim: usize,
    pub s: BarronIndex,
    pub alpha: ResolventParameter,
    #[serde(rename = "W")]
    pub w: SpectrumLiteral,
    pub f: SpectrumLiteral,
    #[serde(default)]
    pub solver: SolverParams,
}

impl ProblemFile {
    pub fn to_problem(&self) -> Result<Loaded<Problem>> {
        let w = self.w.to_spectrum().map_err(|e| prefixed("W", e))?;
        let f = self.f.to_spectrum().map_err(|e| prefixed("f", e))?;
        for (name, lit) in [("W", &self.w), ("f", &self.f)] {
            if lit.dim != self.dim {
                return Err(Error::Format(format!("{name}.dim is {}, problem dim is {}", lit.dim, self.dim)));
            }
        }
        let problem = Problem::new(self.s, self.alpha, w.value, f.value, self.solver.clone())
            .map_err(|e| Error::Format(e.to_string()))?;
        let mut warnings: Vec<String> = w.warnings.into_iter().map(|m| format!("W: {m}")).collect();
        warnings.extend(f.warnings.into_iter().map(|m| format!("f: {m}")));
        Ok(Loaded {
            value: problem,
            warnings,
        })
    }

    pub fn from_problem(p: &Problem) -> Self {
        Self {
            dim: p.dim(),
            s: p.s(),
            alpha: p.alpha(),
            w: SpectrumLiteral::from_spectrum(p.potential()),
            f: SpectrumLiteral::from_spectrum(p.source()),
            solver: p.params().clone(),
        }
    }
}

fn prefixed(field: &str, e: Error) -> Error {
    match e {
        Error::Format(m) => Error::Format(format!("{field}.{m}")),
        other => Error::Format(format!("{field}: {other}")),
    }
}

/// Deserialises JSON, naming the offending field and line on failure.
fn from_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let parsed = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        if path == "." || path.is_empty() {
            Error::Format(inner.to_string())
        } else {
            Error::Format(format!("field '{path}': {inner}"))
        }
    })?;
    Ok(parsed)
}

pub fn parse_spectrum(text: &str) -> Result<Loaded<Spectrum>> {
    from_json::<SpectrumLiteral>(text)?.to_spectrum()
}

pub fn parse_problem(text: &str) -> Result<Loaded<Problem>> {
    from_json::<ProblemFile>(text)?.to_problem()
}

/// Either a problem file or a bare spectrum literal, told apart by the
/// presence of a `W` field.
#[derive(Debug, Clone)]
pub enum Input {
    Problem(Problem),
    Spectrum(Spectrum),
}

pub fn parse_input(text: &str) -> Result<Loaded<Input>> {
    let probe: Value = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
    if probe.get("W").is_some() {
        let p = parse_problem(text)?;
        Ok(Loaded {
            value: Input::Problem(p.value),
            warnings: p.warnings,
        })
    } else {
        let s = parse_spectrum(text)?;
        Ok(Loaded {
            value: Input::Spectrum(s.value),
            warnings: s.warnings,
        })
    }
}

fn pretty(v: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serialisable document");
    s.push('\n');
    s
}

pub fn spectrum_json(s: &Spectrum) -> String {
    pretty(&SpectrumLiteral::from_spectrum(s))
}

pub fn problem_json(p: &Problem) -> String {
    pretty(&ProblemFile::from_problem(p))
}

fn with_timestamp(mut doc: Value, timestamp: Option<u64>) -> Value {
    if let (Some(t), Value::Object(map)) = (timestamp, &mut doc) {
        map.insert("timestamp".into(), json!(t));
    }
    doc
}

/// The solve report document.
pub fn report_json(report: &SolveReport, p: &Problem, timestamp: Option<u64>) -> String {
    let doc = json!({
        "dim": p.dim(),
        "backend": p.backend(),
        "s": p.s().value(),
        "alpha": p.alpha().value(),
        "method": report.method,
        "converged": report.converged,
        "certified": report.is_certified(),
        "iterations": report.iterations,
        "residualBs": report.residual_bs,
        "residualHistory": report.residual_history,
        "q": report.q,
        "unknowns": report.unknowns,
        "truncationLoss": report.truncation_loss,
        "norms": report.norms,
        "certificate": report.certificate,
        "warnings": report.warnings,
    });
    pretty(&with_timestamp(doc, timestamp))
}

/// Failure document for a solve that returned an error.
pub fn failure_json(p: &Problem, err: &Error, timestamp: Option<u64>) -> String {
    let mut doc = json!({
        "dim": p.dim(),
        "backend": p.backend(),
        "s": p.s().value(),
        "alpha": p.alpha().value(),
        "method": p.params().method,
        "converged": false,
        "q": p.contraction_factor(),
        "error": err.to_string(),
    });
    if let Error::Divergence { iterations, residual, history, .. } = err {
        doc["iterations"] = json!(iterations);
        doc["residualBs"] = json!(residual);
        doc["residualHistory"] = json!(history);
    }
    pretty(&with_timestamp(doc, timestamp))
}

/// `n,trials,meanH1,stderrH1,meanSqH1,bound`, one row per network size.
pub fn rate_table_csv(r: &RateStudyResult) -> String {
    let mut out = String::from("n,trials,meanH1,stderrH1,meanSqH1,bound\n");
    for p in &r.points {
        out.push_str(&format!(
            "{},{},{:e},{:e},{:e},{:e}\n",
            p.n, p.trials, p.mean_h1, p.stderr_h1, p.mean_sq_h1, p.bound
        ));
    }
    out
}

pub fn rate_summary_json(r: &RateStudyResult, domain: &BoxDomain, timestamp: Option<u64>) -> String {
    let doc = json!({
        "nValues": r.n_values,
        "trials": r.trials,
        "seed": r.seed,
        "omega": { "lower": domain.lower(), "upper": domain.upper() },
        "slope": r.slope,
        "intercept": r.intercept,
        "slopeRange": [SLOPE_RANGE.0, SLOPE_RANGE.1],
        "slopeInRange": r.slope_in_range,
        "boundRespected": r.bound_respected,
        "jensenRespected": r.jensen_respected,
        "quadraturePoints": r.quadrature_points,
        "rule": r.rule,
        "points": r.points,
    });
    pretty(&with_timestamp(doc, timestamp))
}

/// `amplitude,bias,w1,…,wd`, one row per neuron.
pub fn network_csv(net: &CosineNetwork) -> String {
    let mut out = String::from("amplitude,bias");
    for k in 1..=net.dim() {
        out.push_str(&format!(",w{k}"));
    }
    out.push('\n');
    for nrn in net.neurons() {
        out.push_str(&format!("{:e},{:e}", nrn.amplitude, nrn.bias));
        for w in &nrn.weight {
            out.push_str(&format!(",{w:e}"));
        }
        out.push('\n');
    }
    out
}

pub fn extraction_json(
    net: &CosineNetwork,
    domain: &BoxDomain,
    estimate: &H1Estimate,
    mse_bound: f64,
    timestamp: Option<u64>,
) -> String {
    let doc = json!({
        "n": net.len(),
        "seed": net.seed(),
        "sourceFingerprint": format!("{:016x}", net.source_fingerprint()),
        "omega": { "lower": domain.lower(), "upper": domain.upper() },
        "h1Error": estimate.value,
        "bound": mse_bound.sqrt(),
        "mseBound": mse_bound,
        "withinBound": estimate.value <= mse_bound.sqrt(),
        "quadraturePoints": estimate.points,
        "rule": estimate.rule,
    });
    pretty(&with_timestamp(doc, timestamp))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manufactured::stock_problems;

    #[test]
    fn dirac_literal_is_symmetrised() {
        let s = parse_spectrum(r#"{"dim":1,"backend":"dirac","atoms":[{"freq":[1],"re":0.5}]}"#)
            .unwrap()
            .value;
        assert_eq!(s, DiracSpectrum::cosine(&[1.0], 1.0).unwrap().into());
    }

    #[test]
    fn grid_gaussian_literal() {
        let text = r#"{"dim":1,"backend":"grid","cutoff":4,"pointsPerAxis":65,
            "generator":{"gaussian":{"center":[0],"sigma":1,"amplitude":1}}}"#;
        let loaded = parse_spectrum(text).unwrap();
        assert_eq!(loaded.value.backend(), Backend::Grid);
        assert_eq!(loaded.warnings.len(), 1);
    }

    #[test]
    fn field_errors_name_the_field() {
        let err = parse_problem(
            r#"{"dim":1,"s":0,"alpha":-1,"W":{"dim":1,"backend":"dirac"},"f":{"dim":1,"backend":"dirac"}}"#,
        )
        .unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("alpha"), "{msg}");
        let err = parse_spectrum(r#"{"dim":1,"backend":"dirac","atoms":[{"freq":[1],"re":"x"}]}"#).unwrap_err();
        assert!(err.to_string().contains("atoms[0].re"), "{err}");
        let err = parse_spectrum(r#"{"dim":1,"backend":"dirac","atomz":[]}"#).unwrap_err();
        assert!(err.to_string().contains("atomz"), "{err}");
    }

    #[test]
    fn problems_round_trip() {
        for sp in stock_problems() {
            let text = problem_json(&sp.problem);
            let back = parse_problem(&text).unwrap().value;
            assert_eq!(back.source(), sp.problem.source(), "{}", sp.name);
            assert_eq!(back.potential(), sp.problem.potential(), "{}", sp.name);
            assert_eq!(back.params(), sp.problem.params());
        }
    }

    #[test]
    fn input_kind_detection() {
        let literal = r#"{"dim":1,"backend":"dirac","atoms":[]}"#;
        assert!(matches!(parse_input(literal).unwrap().value, Input::Spectrum(_)));
        let sp = &stock_problems()[0];
        assert!(matches!(
            parse_input(&problem_json(&sp.problem)).unwrap().value,
            Input::Problem(_)
        ));
    }

    #[test]
    fn dimension_disagreement_rejected() {
        let text = r#"{"dim":2,"s":0,"alpha":1,"W":{"dim":1,"backend":"dirac"},"f":{"dim":1,"backend":"dirac"}}"#;
        assert!(parse_problem(text).is_err());
    }
}
