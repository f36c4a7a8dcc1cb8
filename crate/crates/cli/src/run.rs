use std::f64::consts::PI;

use carleman_core::discrete::{
    count_direct, eigenvalue_bound, BirmanSchwinger, BirmanSchwingerReport, CountConfig,
};
use carleman_core::evolution::{propagate_exact, smooth_bump, stationary_phase_components, EvolutionConfig};
use carleman_core::mellin::{mellin_inverse, MellinSpectrum};
use carleman_core::scattering::{
    extract_asymptotics, scattering_matrix_from_table, solve_lippmann_schwinger, ScatteringConfig,
};
use carleman_core::spectral::{resolvent_kernel, spectral_density};
use carleman_core::{LogGrid, PerturbationKernel, Side, SpectralPoint, C64};
use rayon::prelude::*;

use crate::config::{Command, JobConfig};
use crate::error::CliError;
use crate::kernels;
use crate::output::{Table, Value};
use crate::validate::validate;

type Rows = Vec<Vec<Value>>;

fn numerical(index: usize) -> impl Fn(carleman_core::Error) -> CliError {
    move |source| CliError::Numerical { index, source }
}

/// Maps `f` over the sweep in parallel and concatenates the rows in sweep order;
/// the error reported is the one with the lowest sweep index.
fn sweep_rows<F>(sweep: &[f64], f: F) -> Result<Rows, CliError>
where
    F: Fn(usize, f64) -> Result<Rows, CliError> + Sync,
{
    let parts: Vec<Result<Rows, CliError>> = sweep.par_iter().enumerate().map(|(i, &v)| f(i, v)).collect();
    let mut rows = Vec::new();
    for p in parts {
        rows.extend(p?);
    }
    Ok(rows)
}

fn grid_of(cfg: &JobConfig) -> Result<LogGrid, CliError> {
    let spec = cfg.grid.as_ref().expect("validated grid");
    spec.build().map_err(|e| CliError::Config { field: "grid".into(), message: e.to_string() })
}

fn kernel_of(cfg: &JobConfig) -> PerturbationKernel {
    kernels::build(cfg.kernel.as_ref().expect("validated kernel"))
}

fn sample_nodes(grid: &LogGrid, cfg: &JobConfig) -> Vec<usize> {
    (0..grid.len()).step_by(cfg.options.stride.unwrap_or(1)).collect()
}

fn f(v: f64) -> Value {
    Value::Float(v)
}

pub fn scattering_config(cfg: &JobConfig) -> Result<ScatteringConfig, CliError> {
    let mut sc = ScatteringConfig::default();
    if let Some(g) = &cfg.grid {
        sc.solve_grid = Some(g.build().map_err(|e| CliError::Config { field: "grid".into(), message: e.to_string() })?);
    }
    let t = &cfg.tolerances;
    if let Some(v) = t.cond_cap {
        sc.cond_cap = v;
    }
    if let Some(v) = t.fit_tol {
        sc.fit_tol = v;
    }
    if let Some(v) = t.lambda_min {
        sc.lambda_min = v;
    }
    if let Some(v) = t.support_tol {
        sc.support_tol = v;
    }
    Ok(sc)
}

pub fn count_config(cfg: &JobConfig) -> Result<CountConfig, CliError> {
    let mut cc = CountConfig::default();
    if let Some(g) = &cfg.grid {
        cc.grid = Some(g.build().map_err(|e| CliError::Config { field: "grid".into(), message: e.to_string() })?);
    }
    if let Some(v) = cfg.tolerances.support_tol {
        cc.support_tol = v;
    }
    if let Some(v) = cfg.tolerances.clip {
        cc.clip = v;
    }
    Ok(cc)
}

/// The window used for direct diagonalization when none is configured: the
/// Birman–Schwinger window widened by 80 on each side at step 0.25.
pub fn default_direct_grid(bs_grid: &LogGrid) -> carleman_core::Result<LogGrid> {
    LogGrid::covering(bs_grid.x_min() - 80.0, bs_grid.x_max() + 80.0, 0.25)
}

/// Validates and runs the job.
pub fn run(cfg: &JobConfig, command: Command) -> Result<Table, CliError> {
    let diags = validate(cfg, command);
    if !diags.is_empty() {
        return Err(CliError::Validation(diags));
    }
    match command {
        Command::Resolvent => run_resolvent(cfg),
        Command::Density => run_density(cfg),
        Command::Evolve => run_evolve(cfg),
        Command::Scatter => run_scatter(cfg),
        Command::Count => run_count(cfg),
    }
}

fn run_resolvent(cfg: &JobConfig) -> Result<Table, CliError> {
    let mut table = Table::new("resolvent", &["lambda", "eps", "t", "s", "re", "im"]);
    let grid = grid_of(cfg)?;
    let nodes = sample_nodes(&grid, cfg);
    let s = cfg.options.s.unwrap_or(1.0);
    let eps = cfg.options.eps.unwrap_or(0.0);
    let side: Side = cfg.options.side.map(Into::into).unwrap_or(Side::Plus);
    table.rows = sweep_rows(&cfg.sweep, |i, lambda| {
        let point = if eps == 0.0 && lambda > 0.0 && lambda <= PI {
            SpectralPoint::boundary(lambda, side)
        } else {
            SpectralPoint::new(C64::new(lambda, eps))
        }
        .map_err(numerical(i))?;
        nodes
            .iter()
            .map(|&j| {
                let t = grid.t(j);
                let a = resolvent_kernel(t, s, &point).map_err(numerical(i))?;
                Ok(vec![f(lambda), f(eps), f(t), f(s), f(a.re), f(a.im)])
            })
            .collect()
    })?;
    Ok(table)
}

fn run_density(cfg: &JobConfig) -> Result<Table, CliError> {
    let mut table = Table::new("density", &["lambda", "t", "s", "density"]);
    let grid = grid_of(cfg)?;
    let nodes = sample_nodes(&grid, cfg);
    let s = cfg.options.s.unwrap_or(1.0);
    table.rows = sweep_rows(&cfg.sweep, |i, lambda| {
        nodes
            .iter()
            .map(|&j| {
                let t = grid.t(j);
                let d = spectral_density(t, s, lambda).map_err(numerical(i))?;
                Ok(vec![f(lambda), f(t), f(s), f(d)])
            })
            .collect()
    })?;
    Ok(table)
}

fn run_evolve(cfg: &JobConfig) -> Result<Table, CliError> {
    let mut table = Table::new(
        "evolve",
        &["T", "t", "exact_re", "exact_im", "asymptotic_re", "asymptotic_im", "abs_error", "reliable"],
    );
    let grid = grid_of(cfg)?;
    let nodes = sample_nodes(&grid, cfg);
    let pieces = cfg.options.state.clone().expect("validated state");
    let spec = MellinSpectrum::from_fn(&grid, |k| {
        C64::new(pieces.iter().map(|&[lo, hi]| smooth_bump(k, lo, hi)).sum(), 0.0)
    });
    let g = mellin_inverse(&spec);
    let ecfg = EvolutionConfig::default();
    table.rows = sweep_rows(&cfg.sweep, |i, time| {
        let asym = stationary_phase_components(&spec, time, &ecfg).map_err(numerical(i))?;
        let exact = propagate_exact(&grid, &g, time).map_err(numerical(i))?;
        let total = asym.total();
        Ok(nodes
            .iter()
            .map(|&j| {
                let t = grid.t(j);
                let r = t.sqrt();
                let (e, a) = (exact[j] / r, total[j] / r);
                vec![f(time), f(t), f(e.re), f(e.im), f(a.re), f(a.im), f((e - a).norm()), Value::Bool(asym.reliable[j])]
            })
            .collect())
    })?;
    Ok(table)
}

fn run_scatter(cfg: &JobConfig) -> Result<Table, CliError> {
    let mut table = Table::new(
        "scatter",
        &[
            "k", "lambda", "s11_re", "s11_im", "s12_re", "s12_im", "s21_re", "s21_im", "s22_re", "s22_im",
            "unitarity_defect", "condition", "ls_residual", "fit_residual", "fit_deviation",
        ],
    );
    let v = kernel_of(cfg);
    let sc = scattering_config(cfg)?;
    let fits = cfg.options.fits.unwrap_or(false);
    table.rows = sweep_rows(&cfg.sweep, |i, k| {
        let mut t = solve_lippmann_schwinger(&v, k, Side::Plus, &sc).map_err(numerical(i))?;
        let s = scattering_matrix_from_table(&t);
        let (mut fit_res, mut fit_dev) = (Value::Missing, Value::Missing);
        if fits {
            let c = extract_asymptotics(&mut t, &sc).map_err(numerical(i))?;
            let e = c.scattering_entries();
            let dev = (0..2)
                .flat_map(|a| (0..2).map(move |b| (a, b)))
                .map(|(a, b)| (e[a][b] - s.s[a][b]).norm())
                .fold(0.0, f64::max);
            fit_res = f(c.max_residual());
            fit_dev = f(dev);
        }
        let mut row = vec![f(k), f(t.lambda)];
        for z in [s.s11(), s.s12(), s.s21(), s.s22()] {
            row.push(f(z.re));
            row.push(f(z.im));
        }
        row.extend([f(s.unitarity_defect()), f(t.condition), f(t.ls_residual), fit_res, fit_dev]);
        Ok(vec![row])
    })?;
    Ok(table)
}

/// The per-threshold reports behind the `count` table.
pub fn count_reports(cfg: &JobConfig) -> Result<Vec<BirmanSchwingerReport>, CliError> {
    if cfg.sweep.is_empty() {
        return Ok(Vec::new());
    }
    let v = kernel_of(cfg);
    let cc = count_config(cfg)?;
    let grid = cc.grid_for(&v).map_err(numerical(0))?;
    let bound = if cfg.options.bound.unwrap_or(true) {
        Some(eigenvalue_bound(&v, v.alpha(), &grid).map_err(numerical(0))?)
    } else {
        None
    };
    let direct = if cfg.options.direct.unwrap_or(true) {
        let dgrid = match &cfg.options.direct_grid {
            Some(g) => g.build().map_err(|e| CliError::Config {
                field: "options.direct_grid".into(),
                message: e.to_string(),
            })?,
            None => default_direct_grid(&grid).map_err(numerical(0))?,
        };
        let lowest = cfg.sweep.iter().cloned().fold(f64::INFINITY, f64::min);
        let lowest_index = cfg.sweep.iter().position(|&l| l == lowest).unwrap_or(0);
        Some(count_direct(&v, lowest, &dgrid).map_err(numerical(lowest_index))?)
    } else {
        None
    };
    let parts: Vec<Result<BirmanSchwingerReport, CliError>> = cfg
        .sweep
        .par_iter()
        .enumerate()
        .map(|(i, &lambda)| {
            let bs = BirmanSchwinger::new(&v, lambda, &grid, cc.clip).map_err(numerical(i))?;
            Ok(BirmanSchwingerReport {
                lambda,
                count_bs: bs.count(),
                count_direct: direct.as_ref().map(|d| d.eigenvalues.iter().filter(|&&e| e > lambda).count()),
                bound,
                w_norm_sq: bs.w_norm_sq,
            })
        })
        .collect();
    parts.into_iter().collect()
}

fn run_count(cfg: &JobConfig) -> Result<Table, CliError> {
    let mut table = Table::new("count", &["lambda", "count_bs", "count_direct", "bound", "w_norm_sq"]);
    table.rows = count_reports(cfg)?
        .into_iter()
        .map(|r| {
            vec![
                f(r.lambda),
                Value::Int(r.count_bs as u64),
                r.count_direct.map_or(Value::Missing, |c| Value::Int(c as u64)),
                r.bound.map_or(Value::Missing, f),
                f(r.w_norm_sq),
            ]
        })
        .collect();
    Ok(table)
}
