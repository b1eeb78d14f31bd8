//! `rdgfv`: solve manufactured Poisson problems, run refinement studies,
//! and check the reconstruction coefficients in exact arithmetic.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 usage or configuration error,
//! 3 solver failure, 4 failed claim or property.

mod plot;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use rdgfv::coeff_oracle::{self, Claim, LocalMatrix, OracleTables, MAX_M};
use rdgfv::problems::{self, ProblemSpec};
use rdgfv::properties::{jump_continuity, k_exactness, norm_equivalence};
use rdgfv::study::{self, ConvergenceTable};
use rdgfv::{Bc, Error, PeriodicForm, SchemeConfig, SolveMethod, SolveOptions};

#[derive(Parser, Debug)]
#[command(name = "rdgfv", version, about = "Finite-volume Poisson solver on reconstructed DG spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve one problem on one mesh; writes the cell-average CSV.
    Solve(SolveArgs),
    /// Refinement study over a list of meshes; writes the rate table CSV.
    Convergence(ConvergenceArgs),
    /// Exact-arithmetic checks of the flux coefficients and local matrices.
    Verify(VerifyArgs),
    /// Seeded randomized checks of the reconstruction.
    Properties(PropertiesArgs),
}

#[derive(Args, Debug)]
struct SchemeArgs {
    #[arg(long, default_value_t = 1)]
    dim: usize,
    #[arg(long, default_value = "dirichlet")]
    bc: Bc,
    /// Reconstruction degree k (even).
    #[arg(long, default_value_t = 2)]
    order: usize,
    /// Registered problem name (see `--problem list`).
    #[arg(long)]
    problem: String,
    #[arg(long, default_value_t = rdgfv::linsolve::DEFAULT_TOL)]
    tol: f64,
    #[arg(long, default_value = "direct-lu")]
    method: SolveMethod,
    /// Replace one periodic equation by the zero-mean row instead of
    /// bordering with a multiplier.
    #[arg(long)]
    reduced: bool,
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[command(flatten)]
    scheme: SchemeArgs,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    eta: f64,
    /// Output file (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ConvergenceArgs {
    #[command(flatten)]
    scheme: SchemeArgs,
    /// Ascending cells-per-direction list, e.g. 16,32,64.
    #[arg(long = "n-list", value_delimiter = ',', required = true)]
    n_list: Vec<usize>,
    /// One value, or several for a penalty sweep (adds a leading `eta` column).
    #[arg(long, value_delimiter = ',', default_value = "0", allow_hyphen_values = true)]
    eta: Vec<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// SVG log-log plot of the errors against h.
    #[arg(long)]
    plot: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long = "m-max", default_value_t = 6)]
    m_max: usize,
    /// Comma-separated claim ids (default: all).
    #[arg(long, value_delimiter = ',')]
    claims: Vec<String>,
}

#[derive(Args, Debug)]
struct PropertiesArgs {
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    trials: usize,
}

/// Failure carrying its exit code.
struct Failure {
    code: u8,
    err: anyhow::Error,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if e.is_solver_failure() { 3 } else { 2 };
        Failure { code, err: e.into() }
    }
}

fn io_failure(err: anyhow::Error) -> Failure {
    Failure { code: 1, err }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        err: anyhow::anyhow!(msg.into()),
    }
}

type CmdResult = Result<ExitCode, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve(a) => run_solve(a),
        Command::Convergence(a) => run_convergence(a),
        Command::Verify(a) => run_verify(a),
        Command::Properties(a) => run_properties(a),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {:#}", f.err);
            ExitCode::from(f.code)
        }
    }
}

fn write_output(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())).map_err(io_failure),
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .context("writing stdout")
            .map_err(io_failure),
    }
}

fn problem(name: &str) -> Result<&'static ProblemSpec, Failure> {
    if name == "list" {
        let names: Vec<String> =
            problems::registry().iter().map(|p| format!("{} ({}D {})", p.name, p.dim, p.bc)).collect();
        return Err(usage(format!("registered problems: {}", names.join(", "))));
    }
    Ok(problems::find(name)?)
}

fn config(s: &SchemeArgs, n: usize, eta: f64) -> Result<(SchemeConfig, SolveOptions), Failure> {
    let form = if s.reduced { PeriodicForm::Reduced } else { PeriodicForm::Bordered };
    let cfg = SchemeConfig::new(s.dim, s.bc, s.order, n).with_eta(eta).with_periodic_form(form);
    cfg.validate()?;
    let (lo, hi) = rdgfv::linsolve::TOL_RANGE;
    if !(lo..=hi).contains(&s.tol) {
        return Err(Error::Tolerance(s.tol).into());
    }
    Ok((
        cfg,
        SolveOptions {
            tol: s.tol,
            method: s.method,
            ..Default::default()
        },
    ))
}

fn run_solve(a: SolveArgs) -> CmdResult {
    let p = problem(&a.scheme.problem)?;
    let (cfg, opts) = config(&a.scheme, a.n, a.eta)?;
    let out = study::run_solve(&cfg, p, &opts)?;
    eprint!("{}", study::report_text(&out, p));
    write_output(a.out.as_deref(), &study::solution_csv(&out))?;
    Ok(ExitCode::SUCCESS)
}

fn sweep_csv(tables: &[(f64, ConvergenceTable)]) -> String {
    let mut out = format!("eta,{}\n", study::CSV_HEADER);
    for (eta, t) in tables {
        for line in t.to_csv().lines().skip(1) {
            out.push_str(&format!("{eta},{line}\n"));
        }
    }
    out
}

fn run_convergence(a: ConvergenceArgs) -> CmdResult {
    let p = problem(&a.scheme.problem)?;
    let first = *a.n_list.first().ok_or_else(|| usage("empty --n-list"))?;
    let mut cfgs = Vec::new();
    for &eta in &a.eta {
        cfgs.push(config(&a.scheme, first, eta)?);
    }
    for w in cfgs.iter().flat_map(|(c, _)| c.warnings()) {
        eprintln!("warning: {w}");
    }
    let (base, opts) = cfgs[0];
    let (csv, tables) = if a.eta.len() == 1 {
        let (t, _) = study::run_convergence(&base, p, &a.n_list, &opts)?;
        (t.to_csv(), vec![(a.eta[0], t)])
    } else {
        let (tables, warnings) = study::eta_sweep(&base, p, &a.eta, &a.n_list, &opts)?;
        for w in warnings {
            eprintln!("warning: {w}");
        }
        (sweep_csv(&tables), tables)
    };
    write_output(a.out.as_deref(), &csv)?;
    if let Some(path) = a.plot {
        let title = format!("{} ({}D {}, k = {})", p.name, base.dim, base.bc, base.order);
        let svg = plot::render(&title, base.order, &tables);
        fs::write(&path, svg)
            .with_context(|| format!("writing {}", path.display()))
            .map_err(io_failure)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn claims(ids: &[String]) -> Result<Vec<Claim>, Failure> {
    if ids.is_empty() {
        return Ok(coeff_oracle::all_claims());
    }
    ids.iter()
        .map(|id| {
            Claim::from_id(id.trim()).ok_or_else(|| {
                let known: Vec<&str> = coeff_oracle::all_claims().iter().map(|c| c.id()).collect();
                usage(format!("unknown claim `{id}`; known: {}", known.join(", ")))
            })
        })
        .collect()
}

fn run_verify(a: VerifyArgs) -> CmdResult {
    if a.m_max == 0 || a.m_max > MAX_M {
        return Err(usage(format!("--m-max must lie in 1..={MAX_M}")));
    }
    let claims = claims(&a.claims)?;
    let reports = coeff_oracle::verify_all(a.m_max, &claims);
    let mut text = String::new();
    for r in &reports {
        let mut line = r.to_string();
        match (r.claim, r.m) {
            (Claim::Dominance, Some(m)) => {
                let g: Vec<String> = OracleTables::build(m).gamma.iter().map(|v| v.to_string()).collect();
                line.push_str(&format!(" gamma=[{}]", g.join(", ")));
            }
            (Claim::MatrixM, _) => {
                let mat = LocalMatrix::build();
                let ev: Vec<String> = mat.eigenvalues.iter().map(|l| format!("{l:.6e}")).collect();
                let dev: Vec<String> = mat.printed_deviation().iter().map(|d| format!("{d:+.1e}")).collect();
                line.push_str(&format!(" eigenvalues=[{}] printed_2lambda_rel_dev=[{}]", ev.join(", "), dev.join(", ")));
            }
            _ => {}
        }
        text.push_str(&line);
        text.push('\n');
    }
    write_output(None, &text)?;
    Ok(if reports.iter().any(|r| r.verdict == coeff_oracle::Verdict::Fail) {
        ExitCode::from(4)
    } else {
        ExitCode::SUCCESS
    })
}

fn run_properties(a: PropertiesArgs) -> CmdResult {
    if a.trials == 0 {
        return Err(usage("--trials must be positive"));
    }
    let mut text = String::new();
    let mut pass = true;
    for dim in 1..=2 {
        for m in 1..=2 {
            let r = k_exactness(a.seed, dim, m, a.trials)?;
            pass &= r.passed();
            text.push_str(&format!("{r}\n"));
        }
    }
    for (dim, m, n) in [(1, 1, 16), (1, 2, 16), (2, 1, 8), (2, 2, 8)] {
        let r = jump_continuity(a.seed, dim, m, n, a.trials)?;
        pass &= r.passed();
        text.push_str(&format!("{r}\n"));
    }
    for (dim, bc) in [(1, Bc::Dirichlet), (2, Bc::Dirichlet), (1, Bc::Periodic)] {
        let r = norm_equivalence(a.seed, dim, bc, &[8, 16, 32, 64], a.trials)?;
        let spread = r.spread();
        let ok = spread < 0.25;
        pass &= ok;
        let means: Vec<String> = r.rows.iter().map(|row| format!("{}:{:.4}", row.n, row.mean_ratio)).collect();
        text.push_str(&format!(
            "norm_equivalence d={dim} bc={bc} means=[{}] spread={spread:.3} min_max_spread={:.3} {}\n",
            means.join(", "),
            r.extreme_spread(),
            if ok { "pass" } else { "fail" }
        ));
    }
    write_output(None, &text)?;
    Ok(if pass { ExitCode::SUCCESS } else { ExitCode::from(4) })
}
