//! `barron`: norms, solves, certificates, network extraction and rate studies
//! from JSON problem files.
//!
//! Exit status: 0 success, 2 parse or configuration error, 3 solver failure,
//! 4 property failure (including converged but uncertified solves).

mod output;

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use barron_core::format::{self, Input, Loaded};
use barron_core::manufactured::stock_problems;
use barron_core::network::{
    default_quad_order, h1_error_estimate, mse_bound, rate_study, sample_network, BoxDomain,
};
use barron_core::solver::{solve, Method, Problem};
use barron_core::spectrum::{BarronIndex, Spectrum};
use barron_core::verify;
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use output::OutDir;

#[derive(Parser, Debug)]
#[command(name = "barron", version, about = "Spectral Barron-space solver and cosine-network extractor")]
struct Cli {
    /// Suppress the summary printed to stdout.
    #[arg(long, short, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Barron norms of a spectrum literal.
    Norm {
        #[arg(long)]
        input: PathBuf,
        /// Indices to evaluate, comma separated.
        #[arg(long, value_delimiter = ',', default_values_t = vec![0.0, 1.0, 2.0])]
        s: Vec<f64>,
        /// Also write norm.json here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve a problem file; writes report.json and solution.json.
    Solve {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        solver: SolverOverrides,
        #[arg(long)]
        no_timestamp: bool,
    },
    /// Sample a cosine network from a spectrum (or a problem's solution).
    Extract {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: u64,
        #[command(flatten)]
        domain: DomainArgs,
        #[command(flatten)]
        solver: SolverOverrides,
        #[arg(long)]
        no_timestamp: bool,
    },
    /// Monte Carlo rate study; writes rate.csv and rate_summary.json.
    Rate {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: u64,
        #[arg(long, value_delimiter = ',', default_values_t = vec![16usize, 32, 64, 128, 256, 512, 1024])]
        n_values: Vec<usize>,
        #[arg(long, default_value_t = 30)]
        trials: usize,
        #[command(flatten)]
        domain: DomainArgs,
        #[command(flatten)]
        solver: SolverOverrides,
        #[arg(long)]
        no_timestamp: bool,
    },
    /// Property suites, optionally with a user problem.
    Verify {
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Write the stock problems as problem files.
    Stock {
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args, Debug)]
struct SolverOverrides {
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    method: Option<Method>,
}

impl SolverOverrides {
    fn apply(&self, p: Problem) -> Result<Problem, Failure> {
        let mut params = p.params().clone();
        if let Some(t) = self.tol {
            params.tol = t;
        }
        if let Some(m) = self.method {
            params.method = m;
        }
        p.with_params(params).map_err(|e| Failure::Usage(e.to_string()))
    }
}

#[derive(Args, Debug)]
struct DomainArgs {
    /// Box corners "a1,b1;a2,b2;…"; defaults to [0, 2π]^d.
    #[arg(long)]
    omega: Option<String>,
    /// Gauss–Legendre order per axis.
    #[arg(long)]
    quad_order: Option<usize>,
}

impl DomainArgs {
    fn domain(&self, dim: usize) -> Result<BoxDomain, Failure> {
        match &self.omega {
            None => BoxDomain::cube(dim, 0.0, 2.0 * PI).map_err(|e| Failure::Usage(e.to_string())),
            Some(text) => {
                let d = parse_omega(text)?;
                if d.dim() != dim {
                    return Err(Failure::Usage(format!(
                        "--omega has {} axes but the input has dimension {dim}",
                        d.dim()
                    )));
                }
                Ok(d)
            }
        }
    }

    fn order(&self, dim: usize) -> Result<usize, Failure> {
        let q = self.quad_order.unwrap_or_else(|| default_quad_order(dim));
        if q < 2 {
            return Err(Failure::Usage("--quad-order must be at least 2".into()));
        }
        Ok(q)
    }
}

fn parse_omega(text: &str) -> Result<BoxDomain, Failure> {
    let mut lower = Vec::new();
    let mut upper = Vec::new();
    for (i, axis) in text.split(';').enumerate() {
        let parts: Vec<&str> = axis.split(',').map(str::trim).collect();
        let [a, b] = parts[..] else {
            return Err(Failure::Usage(format!("--omega axis {}: expected 'a,b', got {axis:?}", i + 1)));
        };
        let parse = |s: &str| {
            s.parse::<f64>()
                .map_err(|_| Failure::Usage(format!("--omega axis {}: {s:?} is not a number", i + 1)))
        };
        lower.push(parse(a)?);
        upper.push(parse(b)?);
    }
    BoxDomain::new(lower, upper).map_err(|e| Failure::Usage(format!("--omega: {e}")))
}

/// A failed command with its exit status.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Solver(String),
    Property(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Solver(_) => 3,
            Failure::Property(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Solver(m) | Failure::Property(m) => m,
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn load_input(path: &Path) -> Result<Loaded<Input>, Failure> {
    let text = read(path)?;
    format::parse_input(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn load_problem(path: &Path) -> Result<Loaded<Problem>, Failure> {
    let text = read(path)?;
    format::parse_problem(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn timestamp(disabled: bool) -> Option<u64> {
    if disabled {
        return None;
    }
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .ok()
        .map(|d| d.as_secs())
}

fn print_warnings(warnings: &[String]) {
    for w in warnings {
        eprintln!("warning: {w}");
    }
}

struct Ctx {
    quiet: bool,
}

impl Ctx {
    fn say(&self, line: impl AsRef<str>) {
        if !self.quiet {
            println!("{}", line.as_ref());
        }
    }
}

fn cmd_norm(ctx: &Ctx, input: &Path, s: &[f64], out: Option<&Path>) -> Result<(), Failure> {
    let text = read(input)?;
    let loaded = format::parse_spectrum(&text).map_err(|e| Failure::Usage(format!("{}: {e}", input.display())))?;
    print_warnings(&loaded.warnings);
    let u = loaded.value;
    let mut rows = Vec::new();
    for &si in s {
        let idx = BarronIndex::new(si).map_err(|e| Failure::Usage(format!("--s: {e}")))?;
        rows.push((si, u.barron_norm(idx)));
    }
    let linf = u.barron_norm(BarronIndex::ZERO);
    for (si, v) in &rows {
        ctx.say(format!("B^{si} norm: {v}"));
    }
    ctx.say(format!("L-infinity bound: {linf}"));
    if let Some(dir) = out {
        let doc = json!({
            "norms": rows.iter().map(|(s, v)| json!({ "s": s, "value": v })).collect::<Vec<_>>(),
            "linfBound": linf,
        });
        let mut dir = OutDir::create(dir)?;
        dir.write("norm.json", &pretty(&doc))?;
    }
    Ok(())
}

fn pretty(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json value");
    s.push('\n');
    s
}

fn cmd_solve(ctx: &Ctx, input: &Path, out: &Path, overrides: &SolverOverrides, no_ts: bool) -> Result<(), Failure> {
    let loaded = load_problem(input)?;
    print_warnings(&loaded.warnings);
    let p = overrides.apply(loaded.value)?;
    let ts = timestamp(no_ts);
    match solve(&p) {
        Ok(report) => {
            let mut dir = OutDir::create(out)?;
            dir.write("report.json", &format::report_json(&report, &p, ts))?;
            dir.write("solution.json", &format::spectrum_json(&report.u))?;
            ctx.say(format!(
                "converged: {}, residual {:e}, q = {}, iterations {}",
                report.converged, report.residual_bs, report.q, report.iterations
            ));
            if let Some(c) = &report.certificate {
                ctx.say(format!("certificate: chain bound {} holds: {}", c.chain_bound, c.chain_holds));
            }
            for w in &report.warnings {
                eprintln!("warning: {}", serde_json::to_string(w).expect("warning json"));
            }
            if !report.converged {
                Err(Failure::Solver(format!("residual {:e} above tol", report.residual_bs)))
            } else if !report.is_certified() {
                Err(Failure::Property("converged but not certified".into()))
            } else {
                Ok(())
            }
        }
        Err(e) => {
            let mut dir = OutDir::create(out)?;
            dir.write("report.json", &format::failure_json(&p, &e, ts))?;
            Err(Failure::Solver(format!("solver failed: {e}")))
        }
    }
}

/// A spectrum to extract from, solving first if the input is a problem.
fn target_spectrum(input: &Path, overrides: &SolverOverrides) -> Result<Spectrum, Failure> {
    let loaded = load_input(input)?;
    print_warnings(&loaded.warnings);
    match loaded.value {
        Input::Spectrum(s) => Ok(s),
        Input::Problem(p) => {
            let p = overrides.apply(p)?;
            let report = solve(&p).map_err(|e| Failure::Solver(format!("solver failed: {e}")))?;
            if !report.converged {
                return Err(Failure::Solver(format!("solve did not converge (residual {:e})", report.residual_bs)));
            }
            Ok(report.u)
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_extract(
    ctx: &Ctx,
    input: &Path,
    out: &Path,
    n: usize,
    seed: u64,
    domain: &DomainArgs,
    overrides: &SolverOverrides,
    no_ts: bool,
) -> Result<(), Failure> {
    if n == 0 {
        return Err(Failure::Usage("--n must be at least 1".into()));
    }
    let u = target_spectrum(input, overrides)?;
    let omega = domain.domain(u.dim())?;
    let order = domain.order(u.dim())?;
    let net = sample_network(&u, n, seed).map_err(|e| Failure::Solver(e.to_string()))?;
    let estimate = h1_error_estimate(&net, &u, &omega, order).map_err(|e| Failure::Solver(e.to_string()))?;
    let bound = mse_bound(&u, &omega, n).map_err(|e| Failure::Usage(e.to_string()))?;
    let mut dir = OutDir::create(out)?;
    dir.write("network.csv", &format::network_csv(&net))?;
    dir.write("extraction.json", &format::extraction_json(&net, &omega, &estimate, bound, timestamp(no_ts)))?;
    ctx.say(format!("H1 error {:e}, bound {:e}", estimate.value, bound.sqrt()));
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_rate(
    ctx: &Ctx,
    input: &Path,
    out: &Path,
    seed: u64,
    n_values: &[usize],
    trials: usize,
    domain: &DomainArgs,
    overrides: &SolverOverrides,
    no_ts: bool,
) -> Result<(), Failure> {
    if n_values.len() < 3 || n_values.contains(&0) {
        return Err(Failure::Usage("--n-values needs at least three positive sizes".into()));
    }
    if trials < 10 {
        return Err(Failure::Usage("--trials must be at least 10".into()));
    }
    let u = target_spectrum(input, overrides)?;
    let omega = domain.domain(u.dim())?;
    let order = domain.order(u.dim())?;
    let study = rate_study(&u, &omega, n_values, trials, seed, order).map_err(|e| Failure::Solver(e.to_string()))?;
    let mut dir = OutDir::create(out)?;
    dir.write("rate.csv", &format::rate_table_csv(&study))?;
    dir.write("rate_summary.json", &format::rate_summary_json(&study, &omega, timestamp(no_ts)))?;
    match study.slope {
        Some(s) => ctx.say(format!("slope {s:.4}, in range: {}", study.slope_in_range)),
        None => ctx.say("slope undefined (errors numerically zero)"),
    }
    ctx.say(format!("bound respected: {}", study.bound_respected));
    if !study.bound_respected {
        return Err(Failure::Property("mean squared error exceeds the bound".into()));
    }
    // An undefined slope (numerically exact networks) is a result, not a failure.
    if study.slope.is_some() && !study.slope_in_range {
        return Err(Failure::Property("fitted slope outside the accepted range".into()));
    }
    Ok(())
}

fn cmd_verify(ctx: &Ctx, input: Option<&Path>, out: Option<&Path>, seed: u64) -> Result<(), Failure> {
    let user = match input {
        Some(path) => {
            let loaded = load_problem(path)?;
            print_warnings(&loaded.warnings);
            Some(loaded.value)
        }
        None => None,
    };
    let mut suites = verify::default_suites(seed).map_err(|e| Failure::Solver(e.to_string()))?;
    let mut warnings = Vec::new();
    if let Some(p) = &user {
        let (suite, w) = verify::user_problem_suite(p);
        suites.push(suite);
        warnings = w;
    }
    for s in &suites {
        ctx.say(format!(
            "{:<16} {} ({} checks, {} failures)",
            s.name,
            if s.passed() { "PASS" } else { "FAIL" },
            s.checks,
            s.failures
        ));
        for d in &s.details {
            ctx.say(format!("    {d}"));
        }
    }
    for w in &warnings {
        eprintln!("warning: {}", serde_json::to_string(w).expect("warning json"));
    }
    if let Some(dir) = out {
        let doc = json!({ "seed": seed, "suites": suites, "warnings": warnings });
        let mut dir = OutDir::create(dir)?;
        dir.write("verify.json", &pretty(&doc))?;
    }
    if suites.iter().all(|s| s.passed()) {
        Ok(())
    } else {
        Err(Failure::Property("some properties failed".into()))
    }
}

fn cmd_stock(ctx: &Ctx, out: &Path) -> Result<(), Failure> {
    let problems = stock_problems();
    let mut dir = OutDir::create(out)?;
    for sp in &problems {
        dir.write(&format!("{}.json", sp.name), &format::problem_json(&sp.problem))?;
        dir.write(&format!("{}_reference.json", sp.name), &format::spectrum_json(&sp.reference))?;
        ctx.say(format!("{}: {}", sp.name, sp.notes));
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    let ctx = Ctx { quiet: cli.quiet };
    match &cli.command {
        Command::Norm { input, s, out } => cmd_norm(&ctx, input, s, out.as_deref()),
        Command::Solve {
            input,
            out,
            solver,
            no_timestamp,
        } => cmd_solve(&ctx, input, out, solver, *no_timestamp),
        Command::Extract {
            input,
            out,
            n,
            seed,
            domain,
            solver,
            no_timestamp,
        } => cmd_extract(&ctx, input, out, *n, *seed, domain, solver, *no_timestamp),
        Command::Rate {
            input,
            out,
            seed,
            n_values,
            trials,
            domain,
            solver,
            no_timestamp,
        } => cmd_rate(&ctx, input, out, *seed, n_values, *trials, domain, solver, *no_timestamp),
        Command::Verify { input, out, seed } => cmd_verify(&ctx, input.as_deref(), out.as_deref(), *seed),
        Command::Stock { out } => cmd_stock(&ctx, out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
