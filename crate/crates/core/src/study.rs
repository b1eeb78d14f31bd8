//! Single solves and mesh-refinement studies of registered problems.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::assembly::{assemble, PeriodicForm, SchemeConfig};
use crate::error::{Error, Result};
use crate::linsolve::{residual, solve, SolveOptions, SolveReport};
use crate::norms::{error_report, pairwise_sum, ErrorReport};
use crate::problems::ProblemSpec;
use crate::reconstruction::Bc;

#[derive(Clone, Debug)]
pub struct SolveOutcome {
    pub config: SchemeConfig,
    /// Interior cell averages in lexicographic order.
    pub averages: Vec<f64>,
    /// Zero-mean multiplier of the bordered periodic system.
    pub multiplier: Option<f64>,
    pub solve: SolveReport,
    /// `‖Ax - b‖ / max(‖b‖, 1)`.
    pub residual: f64,
    pub errors: ErrorReport,
    pub warnings: Vec<String>,
}

impl SolveOutcome {
    /// `∫ u_h = h^d Σ ū`.
    pub fn integral(&self) -> f64 {
        let h = 1.0 / self.config.n as f64;
        h.powi(self.config.dim as i32) * pairwise_sum(&self.averages)
    }
}

fn compatible(config: &SchemeConfig, problem: &ProblemSpec) -> Result<()> {
    if problem.dim != config.dim || problem.bc != config.bc {
        return Err(Error::IncompatibleProblem {
            name: problem.name.to_string(),
            what: format!("a {}D {} configuration", config.dim, config.bc),
        });
    }
    Ok(())
}

pub fn run_solve(config: &SchemeConfig, problem: &ProblemSpec, options: &SolveOptions) -> Result<SolveOutcome> {
    config.validate()?;
    compatible(config, problem)?;
    let system = assemble(config, &problem.f)?;
    let report = solve(&system, options)?;
    let res = residual(&system, &report.solution)?;
    let cells = system.cells;
    let averages = report.solution[..cells].to_vec();
    let multiplier = system.has_multiplier().then(|| report.solution[cells]);
    let errors = error_report(config, &averages, &problem.u, &problem.grad)?;
    Ok(SolveOutcome {
        config: *config,
        averages,
        multiplier,
        solve: report,
        residual: res,
        errors,
        warnings: config.warnings(),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceRow {
    pub errors: ErrorReport,
    pub residual: f64,
    pub l2_rate: Option<f64>,
    pub sip_rate: Option<f64>,
    pub sip_star_rate: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceTable {
    pub rows: Vec<ConvergenceRow>,
}

pub const CSV_HEADER: &str = "n,h,l2,l2_rate,sip,sip_rate,sip_star,sip_star_rate,residual";

fn rate(coarse: f64, fine: f64, h_coarse: f64, h_fine: f64) -> f64 {
    (coarse / fine).ln() / (h_coarse / h_fine).ln()
}

/// 17 significant digits.
fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

impl ConvergenceTable {
    pub fn from_reports(reports: Vec<(ErrorReport, f64)>) -> Self {
        let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(reports.len());
        for (i, (e, res)) in reports.iter().enumerate() {
            let prev = i.checked_sub(1).map(|j| reports[j].0);
            let r = |pick: fn(&ErrorReport) -> f64| prev.map(|p| rate(pick(&p), pick(e), p.h, e.h));
            rows.push(ConvergenceRow {
                errors: *e,
                residual: *res,
                l2_rate: r(|x| x.l2),
                sip_rate: r(|x| x.sip),
                sip_star_rate: r(|x| x.sip_star),
            });
        }
        Self { rows }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let e = &r.errors;
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                e.n,
                num(e.h),
                num(e.l2),
                opt(r.l2_rate),
                num(e.sip),
                opt(r.sip_rate),
                num(e.sip_star),
                opt(r.sip_star_rate),
                num(r.residual)
            );
        }
        out
    }

    /// Rates of the last `count` rows for one measure.
    pub fn last_rates(&self, count: usize, pick: fn(&ConvergenceRow) -> Option<f64>) -> Vec<f64> {
        let rates: Vec<f64> = self.rows.iter().filter_map(pick).collect();
        rates[rates.len().saturating_sub(count)..].to_vec()
    }
}

/// One solve per `n` (in parallel), rows ordered by `n`. Fails with the
/// first failing `n` in list order.
pub fn run_convergence(
    base: &SchemeConfig,
    problem: &ProblemSpec,
    n_list: &[usize],
    options: &SolveOptions,
) -> Result<(ConvergenceTable, Vec<SolveOutcome>)> {
    if n_list.is_empty() {
        return Err(Error::InvalidConfig("empty mesh list".into()));
    }
    if n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidConfig("mesh list must be strictly ascending".into()));
    }
    compatible(base, problem)?;
    let outcomes: Vec<Result<SolveOutcome>> = n_list
        .par_iter()
        .map(|&n| {
            let cfg = SchemeConfig { n, ..*base };
            run_solve(&cfg, problem, options).map_err(|e| Error::AtMesh { n, source: Box::new(e) })
        })
        .collect();
    let outcomes: Vec<SolveOutcome> = outcomes.into_iter().collect::<Result<_>>()?;
    let table = ConvergenceTable::from_reports(outcomes.iter().map(|o| (o.errors, o.residual)).collect());
    Ok((table, outcomes))
}

/// Runs the study for each penalty value and flags every `n` at which the
/// `η = 0` run is not the most accurate in sip,*.
pub fn eta_sweep(
    base: &SchemeConfig,
    problem: &ProblemSpec,
    etas: &[f64],
    n_list: &[usize],
    options: &SolveOptions,
) -> Result<(Vec<(f64, ConvergenceTable)>, Vec<String>)> {
    let mut tables = Vec::new();
    for &eta in etas {
        let cfg = SchemeConfig { eta, ..*base };
        tables.push((eta, run_convergence(&cfg, problem, n_list, options)?.0));
    }
    let mut warnings = Vec::new();
    if let Some((_, zero)) = tables.iter().find(|(e, _)| *e == 0.0) {
        for (i, row) in zero.rows.iter().enumerate() {
            for (eta, t) in &tables {
                if *eta != 0.0 && t.rows[i].errors.sip_star < row.errors.sip_star {
                    warnings.push(format!(
                        "n = {}: eta = {eta} gives a smaller sip,* error than eta = 0",
                        row.errors.n
                    ));
                }
            }
        }
    }
    Ok((tables, warnings))
}

/// Cell-average CSV: `i,x,avg` in 1D, `i,j,x,y,avg` in 2D (cell centroids).
pub fn solution_csv(outcome: &SolveOutcome) -> String {
    let n = outcome.config.n;
    let h = 1.0 / n as f64;
    let mut out = String::new();
    match outcome.config.dim {
        1 => {
            out.push_str("i,x,avg\n");
            for (i, v) in outcome.averages.iter().enumerate() {
                let _ = writeln!(out, "{i},{},{}", num((i as f64 + 0.5) * h), num(*v));
            }
        }
        _ => {
            out.push_str("i,j,x,y,avg\n");
            for (k, v) in outcome.averages.iter().enumerate() {
                let (i, j) = (k % n, k / n);
                let _ = writeln!(
                    out,
                    "{i},{j},{},{},{}",
                    num((i as f64 + 0.5) * h),
                    num((j as f64 + 0.5) * h),
                    num(*v)
                );
            }
        }
    }
    out
}

/// Human-readable summary of one solve.
pub fn report_text(outcome: &SolveOutcome, problem: &ProblemSpec) -> String {
    let c = &outcome.config;
    let e = &outcome.errors;
    let mut s = String::new();
    let _ = writeln!(s, "problem   {} ({}D, {}, k = {}, eta = {})", problem.name, c.dim, c.bc, c.order, c.eta);
    let _ = writeln!(s, "n         {}", e.n);
    let _ = writeln!(s, "solver    {} ({} iterations)", outcome.solve.method, outcome.solve.iterations);
    let _ = writeln!(s, "residual  {:.3e}", outcome.residual);
    let _ = writeln!(s, "l2        {:.6e}", e.l2);
    let _ = writeln!(s, "h1        {:.6e}", e.h1_broken);
    let _ = writeln!(s, "sip       {:.6e}", e.sip);
    let _ = writeln!(s, "sip*      {:.6e}", e.sip_star);
    let _ = writeln!(s, "1,h       {:.6e}", e.one_h);
    if c.bc == Bc::Periodic {
        if let Some(l) = outcome.multiplier {
            let _ = writeln!(s, "lambda    {l:.3e}");
        }
        let _ = writeln!(s, "integral  {:.3e}", outcome.integral());
    }
    for w in &outcome.warnings {
        let _ = writeln!(s, "warning: {w}");
    }
    s
}

/// Same problem solved in bordered and reduced periodic form; returns the
/// largest difference of the mean-free averages.
pub fn periodic_forms_difference(config: &SchemeConfig, problem: &ProblemSpec, options: &SolveOptions) -> Result<f64> {
    let a = run_solve(&config.with_periodic_form(PeriodicForm::Bordered), problem, options)?;
    let b = run_solve(&config.with_periodic_form(PeriodicForm::Reduced), problem, options)?;
    let centre = |v: &[f64]| {
        let mean = pairwise_sum(v) / v.len() as f64;
        v.iter().map(|x| x - mean).collect::<Vec<_>>()
    };
    Ok(centre(&a.averages)
        .iter()
        .zip(centre(&b.averages))
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::find;

    #[test]
    fn dirichlet_1d_solve_is_accurate() {
        let cfg = SchemeConfig::new(1, Bc::Dirichlet, 2, 64);
        let out = run_solve(&cfg, find("xsinpix").unwrap(), &SolveOptions::default()).unwrap();
        assert!(out.residual <= 1e-12);
        assert!(out.errors.l2 < 1e-3);
        assert!(out.errors.sip <= out.errors.sip_star);
    }

    #[test]
    fn periodic_solve_has_zero_mean() {
        let cfg = SchemeConfig::new(1, Bc::Periodic, 2, 32);
        let out = run_solve(&cfg, find("sin2pix").unwrap(), &SolveOptions::default()).unwrap();
        assert!(out.integral().abs() <= 1e-12);
        assert!(out.multiplier.unwrap().abs() <= 1e-10);
    }

    #[test]
    fn reduced_and_bordered_agree() {
        for (dim, name, n) in [(1, "sin2pix", 24), (2, "sin2pix-sin4piy", 12)] {
            let cfg = SchemeConfig::new(dim, Bc::Periodic, 2, n).with_eta(0.5);
            let d = periodic_forms_difference(&cfg, find(name).unwrap(), &SolveOptions::default()).unwrap();
            assert!(d <= 1e-10, "{d}");
        }
    }

    #[test]
    fn incompatible_problem_rejected() {
        let cfg = SchemeConfig::new(1, Bc::Periodic, 2, 16);
        assert!(matches!(
            run_solve(&cfg, find("xsinpix").unwrap(), &SolveOptions::default()),
            Err(Error::IncompatibleProblem { .. })
        ));
    }

    #[test]
    fn table_rates_and_csv() {
        let cfg = SchemeConfig::new(1, Bc::Dirichlet, 2, 16);
        let (t, _) = run_convergence(&cfg, find("xsinpix").unwrap(), &[16, 32, 64], &SolveOptions::default()).unwrap();
        let csv = t.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines.len(), 4);
        let first: Vec<&str> = lines[1].split(',').collect();
        assert_eq!(first[3], "");
        assert_eq!(first[5], "");
        assert_eq!(first[7], "");
        for r in t.last_rates(2, |r| r.sip_star_rate) {
            assert!((r - 2.0).abs() < 0.25, "{r}");
        }
        assert!(run_convergence(&cfg, find("xsinpix").unwrap(), &[32, 16], &SolveOptions::default()).is_err());
        let again = run_convergence(&cfg, find("xsinpix").unwrap(), &[16, 32, 64], &SolveOptions::default()).unwrap();
        assert_eq!(again.0.to_csv(), csv);
    }

    #[test]
    fn failing_mesh_is_reported() {
        let cfg = SchemeConfig::new(1, Bc::Periodic, 4, 16);
        let err = run_convergence(&cfg, find("sin2pix").unwrap(), &[4, 16], &SolveOptions::default()).unwrap_err();
        assert!(matches!(err, Error::AtMesh { n: 4, .. }));
    }

    #[test]
    fn solution_csv_layout() {
        let cfg = SchemeConfig::new(2, Bc::Dirichlet, 2, 4);
        let out = run_solve(&cfg, find("xsinpix-ysinpiy").unwrap(), &SolveOptions::default()).unwrap();
        let csv = solution_csv(&out);
        assert!(csv.starts_with("i,j,x,y,avg\n"));
        assert_eq!(csv.lines().count(), 17);
    }
}
