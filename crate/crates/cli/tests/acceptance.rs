use std::f64::consts::PI;
use std::process::Command;
use std::time::{Duration, Instant};

use carleman_core::discrete::{a_tilde_limit_defect, birman_schwinger_counts, count_direct, eigenvalue_bound, resonance_weight, CountConfig};
use carleman_core::evolution::{k0, propagate_exact, smooth_bump, stationary_phase_components, EvolutionConfig};
use carleman_core::linalg::Toeplitz;
use carleman_core::mellin::{carleman_matrix, carleman_operator, mellin_inverse, MellinSpectrum};
use carleman_core::scattering::{
    born_term, extract_asymptotics, scattering_matrix, scattering_matrix_from_table, solve_lippmann_schwinger,
    ScatteringConfig,
};
use carleman_core::spectral::{branch_k, k_of_lambda, lambda_of_k, resonance_series, resolvent_kernel, rho, sigma_n, theta, LogResolventKernel};
use carleman_core::{LogGrid, PerturbationKernel, Side, SpectralPoint, C64};
use rayon::prelude::*;

type Outcome = Result<String, String>;

struct Criterion {
    id: u32,
    name: &'static str,
    limit: Duration,
    run: fn() -> Outcome,
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn fail<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn dispersion_and_branch() -> Outcome {
    let mut worst: f64 = 0.0;
    for i in 0..200 {
        let lambda = PI * 10f64.powf(-8.0 + 8.0 * i as f64 / 199.0);
        let back = lambda_of_k(k_of_lambda(lambda).map_err(fail)?).map_err(fail)?;
        worst = worst.max((back - lambda).abs());
    }
    let k_pi = branch_k(&SpectralPoint::boundary(PI, Side::Plus).map_err(fail)?).map_err(fail)?;
    let k_mpi = branch_k(&SpectralPoint::new(C64::new(-PI, 0.0)).map_err(fail)?).map_err(fail)?;
    let r = rho(1.0, &SpectralPoint::new(C64::new(2.0 * PI, 0.0)).map_err(fail)?).map_err(fail)?;
    let ok = worst < 1e-12
        && k_pi == C64::new(0.0, 2.0)
        && k_mpi == C64::new(0.0, 1.0)
        && (r - 2.0 / 3.0).norm() < 1e-12;
    check(ok, format!("round trip {worst:.1e}, k(pi+i0) = {k_pi}, k(-pi) = {k_mpi}, rho(1; 2pi) = {r}"))
}

fn resolvent_residual(n: usize) -> Result<f64, String> {
    // fixed step 0.1, so doubling n doubles the window
    let h = 0.1;
    let half = 0.5 * h * (n - 1) as f64;
    let grid = LogGrid::new(-half, half, n).map_err(fail)?;
    let z = C64::new(2.0, 1.0);
    let point = SpectralPoint::new(z).map_err(fail)?;
    let ker = LogResolventKernel::new(&point).map_err(fail)?;
    let a = Toeplitz::from_fn(n, |d| ker.eval(d as f64 * h) * h);
    let f = grid.sample_log(|x| C64::new((-x * x / 2.0).exp(), 0.0));
    let af = a.matvec(&f);
    let rf: Vec<C64> = f.iter().zip(&af).map(|(u, v)| -(u + v) / z).collect();
    let crf = carleman_operator(&grid).matvec(&rf);
    let res: Vec<C64> = crf.iter().zip(&rf).zip(&f).map(|((c, r), u)| c - z * r - u).collect();
    Ok(grid.norm(&res) / grid.norm(&f))
}

fn resolvent_identity() -> Outcome {
    let r1 = resolvent_residual(2048)?;
    let r2 = resolvent_residual(4096)?;
    check(r1 < 1e-4 && r1 >= 4.0 * r2, format!("residual n=2048: {r1:.3e}, n=4096: {r2:.3e}, drop {:.1}x", r1 / r2))
}

fn carleman_spectrum() -> Outcome {
    let extremes = |lo: f64, hi: f64, n: usize| -> Result<(f64, f64), String> {
        let grid = LogGrid::new(lo, hi, n).map_err(fail)?;
        let e = carleman_matrix(&grid).symmetric_eigenvalues();
        Ok((e.min(), e.max()))
    };
    let (min, max) = extremes(-40.0, 40.0, 2048)?;
    let trend: Vec<String> = [20.0, 40.0, 80.0]
        .iter()
        .map(|&l| extremes(-l, l, 1024).map(|(_, m)| format!("L={l}: pi-max={:.4}", PI - m)))
        .collect::<Result<_, _>>()?;
    let ok = min >= -1e-3 && max <= PI + 1e-3 && (PI - max).abs() < 1e-3;
    check(ok, format!("n=2048 on [-40,40]: min {min:.3e}, max {max:.6} (pi-max = {:.4e}); widening at n=1024: {}", PI - max, trend.join(", ")))
}

fn resonance_expansion() -> Outcome {
    let z = SpectralPoint::new(C64::new(PI + 1e-3, 0.0)).map_err(fail)?;
    let exact = resolvent_kernel(2.0, 1.0, &z).map_err(fail)?;
    let err = |n: usize| -> Result<f64, String> {
        Ok((resonance_series(2.0, 1.0, &z, n).map_err(fail)? - exact).norm() / exact.norm())
    };
    let (e2, e3) = (err(2)?, err(3)?);
    let th = theta(&z).map_err(fail)?.norm();
    // leading omitted terms θ³σ₃/3! and θ⁴σ₄/4!
    let predicted = th * sigma_n(4, 2.0).map_err(fail)?.abs() / (4.0 * sigma_n(3, 2.0).map_err(fail)?.abs());
    let ratio = e3 / e2;
    let ok = e3 < 1e-4 && (ratio / predicted - 1.0).abs() < 0.5;
    check(ok, format!("rel err N=3 {e3:.3e}; e3/e2 = {ratio:.4e} vs predicted {predicted:.4e} (|theta| = {th:.4e})"))
}

fn unit_bumps(grid: &LogGrid, pieces: &[(f64, f64)]) -> MellinSpectrum {
    let raw = |k: f64| pieces.iter().map(|&(a, b)| smooth_bump(k, a, b)).sum::<f64>();
    let scale = MellinSpectrum::from_fn(grid, |k| C64::new(raw(k), 0.0)).norm_sq().sqrt();
    MellinSpectrum::from_fn(grid, |k| C64::new(raw(k) / scale, 0.0))
}

fn evolution() -> Outcome {
    let grid = LogGrid::new(-600.0, 600.0, 12001).map_err(fail)?;
    let cfg = EvolutionConfig::default();
    let kz = k0();

    // sup-norm error of U₁ + U₂ in the log representation
    let spec = unit_bumps(&grid, &[(0.33, 0.9)]);
    let g = mellin_inverse(&spec);
    let sups: Vec<Result<f64, String>> = [20.0, 40.0]
        .par_iter()
        .map(|&time| {
            let exact = propagate_exact(&grid, &g, time).map_err(fail)?;
            let total = stationary_phase_components(&spec, time, &cfg).map_err(fail)?.total();
            Ok(exact.iter().zip(&total).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
        })
        .collect();
    let (s20, s40) = (sups[0].clone()?, sups[1].clone()?);
    let halving = s20 / s40;

    // norm partition on a state with mass on both sides of k₀
    let two = unit_bumps(&grid, &[(0.2, kz - 0.03), (0.33, 0.9)]);
    let inner: f64 = two
        .ks()
        .iter()
        .zip(two.values())
        .filter(|(k, _)| k.abs() < kz)
        .map(|(_, v)| v.norm_sqr())
        .sum::<f64>()
        * two.dk();
    let (mut part, mut total): (f64, f64) = (0.0, 0.0);
    for time in [20.0, 40.0] {
        let u = stationary_phase_components(&two, time, &cfg).map_err(fail)?;
        let (a, b) = (grid.norm_sq(&u.u1), grid.norm_sq(&u.u2));
        part = part.max((a - inner).abs()).max((b - (1.0 - inner)).abs());
        total = total.max((a + b - 1.0).abs());
    }
    let ok = (halving - 2.0).abs() <= 0.6 && part < 1e-4 && total < 1e-4;
    check(
        ok,
        format!("sup error T=20 {s20:.3e}, T=40 {s40:.3e}, ratio {halving:.3}; partition defect {part:.1e} (inner mass {inner:.3}); total defect {total:.1e}"),
    )
}

fn scattering() -> Outcome {
    let v = PerturbationKernel::exponential(0.1);
    let cfg = ScatteringConfig::default();
    let rows: Vec<Result<String, String>> = [0.25, 0.5, 1.0]
        .par_iter()
        .map(|&k| {
            let mut plus = solve_lippmann_schwinger(&v, k, Side::Plus, &cfg).map_err(fail)?;
            let minus = solve_lippmann_schwinger(&v, k, Side::Minus, &cfg).map_err(fail)?;
            let s = scattering_matrix_from_table(&plus);
            let fits = extract_asymptotics(&mut plus, &cfg).map_err(fail)?.scattering_entries();
            let fit_dev = (0..4).map(|i| (fits[i / 2][i % 2] - s.s[i / 2][i % 2]).norm()).fold(0.0, f64::max);
            let op = s.operator_form();
            let basis = (0..2)
                .flat_map(|j| (0..plus.grid.len()).map(move |i| (j, i)))
                .map(|(j, i)| (plus.psi[j][i] - op[0][j] * minus.psi[0][i] - op[1][j] * minus.psi[1][i]).norm())
                .fold(0.0, f64::max);
            let born_defect = |c: f64| -> Result<f64, String> {
                let w = v.scaled(c / 0.1);
                let op = scattering_matrix(&w, k, &cfg).map_err(fail)?.operator_form();
                let b = born_term(&w, k, &cfg).map_err(fail)?;
                Ok((0..4)
                    .map(|i| {
                        let id = if i / 2 == i % 2 { 1.0 } else { 0.0 };
                        (op[i / 2][i % 2] - id - b[i / 2][i % 2]).norm()
                    })
                    .fold(0.0, f64::max))
            };
            let (d1, d2) = (born_defect(1e-3)?, born_defect(2e-3)?);
            let unit = s.unitarity_defect();
            let sym = (s.s11() - s.s22()).norm();
            let ok = unit < 1e-4 && sym < 1e-6 && fit_dev < 1e-3 && basis < 1e-3 && d1 < 1e-5 && (d2 / d1 - 4.0).abs() < 1.0;
            let line = format!(
                "k={k}: unitarity {unit:.1e}, |s11-s22| {sym:.1e}, fits {fit_dev:.1e}, basis {basis:.1e}, born defect {d1:.2e} (x{:.2} at 2x coupling)",
                d2 / d1
            );
            if ok { Ok(line) } else { Err(line) }
        })
        .collect();
    let ok = rows.iter().all(|r| r.is_ok());
    let text: Vec<String> = rows.into_iter().map(|r| r.unwrap_or_else(|e| format!("[fail] {e}"))).collect();
    check(ok, text.join("; "))
}

fn discrete_spectrum() -> Outcome {
    let cfg = CountConfig::default();
    let rows: Vec<Result<String, String>> = [0.5, 2.0, 10.0]
        .par_iter()
        .map(|&c| {
            let v = PerturbationKernel::exponential(c);
            let bs_grid = cfg.grid_for(&v).map_err(fail)?;
            let thresholds = [PI + 1e-4, PI + 0.01, PI + 0.1];
            let bs = birman_schwinger_counts(&v, &thresholds, &cfg).map_err(fail)?;
            let dgrid = LogGrid::covering(bs_grid.x_min() - 80.0, bs_grid.x_max() + 80.0, 0.25).map_err(fail)?;
            let direct = count_direct(&v, thresholds[0], &dgrid).map_err(fail)?;
            let dc: Vec<usize> = thresholds.iter().map(|&t| direct.eigenvalues.iter().filter(|&&e| e > t).count()).collect();
            let bound = eigenvalue_bound(&v, 2.0, &bs_grid).map_err(fail)?;
            let w = resonance_weight(&v, &bs_grid).map_err(fail)?;
            let ok = bs[1] == dc[1] && bs[2] == dc[2] && bs[0] >= 1 && dc[0] >= 1 && bound >= dc[0] as f64 && (w - c * PI).abs() < 1e-8;
            let line = format!("c={c}: bs {bs:?}, direct {dc:?}, bound {bound:.3}, |w|^2 - c pi = {:.1e}", w - c * PI);
            if ok { Ok(line) } else { Err(line) }
        })
        .collect();
    let ok = rows.iter().all(|r| r.is_ok());
    let text: Vec<String> = rows.into_iter().map(|r| r.unwrap_or_else(|e| format!("[fail] {e}"))).collect();
    check(ok, text.join("; "))
}

fn a_tilde_trend() -> Outcome {
    let d: Vec<f64> = [1e-1, 1e-2, 1e-3]
        .iter()
        .map(|&e| a_tilde_limit_defect(2.0, PI + e))
        .collect::<Result<_, _>>()
        .map_err(fail)?;
    check(d[0] > d[1] && d[1] > d[2], format!("defects {:.4e}, {:.4e}, {:.4e}", d[0], d[1], d[2]))
}

fn cli_determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(fail)?;
    let config = dir.path().join("scatter.json");
    std::fs::write(
        &config,
        r#"{"command": "scatter", "kernel": {"family": "exp", "params": {"c": 0.1}}, "sweep": [0.25, 0.5, 1.0]}"#,
    )
    .map_err(fail)?;
    let bin = env!("CARGO_BIN_EXE_carleman-scatter");
    let mut outputs = Vec::new();
    for i in 0..2 {
        let out = dir.path().join(format!("run{i}.csv"));
        let st = Command::new(bin)
            .args(["scatter", "--config"])
            .arg(&config)
            .arg("--out")
            .arg(&out)
            .status()
            .map_err(fail)?;
        if !st.success() {
            return Err(format!("run {i} exited with {st}"));
        }
        outputs.push(std::fs::read(&out).map_err(fail)?);
    }
    check(outputs[0] == outputs[1] && !outputs[0].is_empty(), format!("{} bytes per run, identical: {}", outputs[0].len(), outputs[0] == outputs[1]))
}

fn main() {
    let criteria = [
        Criterion { id: 1, name: "dispersion and branch", limit: Duration::from_secs(1), run: dispersion_and_branch },
        Criterion { id: 2, name: "resolvent identity", limit: Duration::from_secs(30), run: resolvent_identity },
        Criterion { id: 3, name: "carleman spectrum", limit: Duration::from_secs(60), run: carleman_spectrum },
        Criterion { id: 4, name: "resonance expansion", limit: Duration::from_secs(1), run: resonance_expansion },
        Criterion { id: 5, name: "evolution asymptotics", limit: Duration::from_secs(120), run: evolution },
        Criterion { id: 6, name: "scattering", limit: Duration::from_secs(120), run: scattering },
        Criterion { id: 7, name: "discrete spectrum", limit: Duration::from_secs(120), run: discrete_spectrum },
        Criterion { id: 8, name: "a-tilde limit trend", limit: Duration::from_secs(60), run: a_tilde_trend },
        Criterion { id: 9, name: "cli determinism", limit: Duration::from_secs(60), run: cli_determinism },
    ];
    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let outcome = (c.run)();
        let elapsed = start.elapsed();
        let in_time = elapsed <= c.limit;
        let (pass, detail) = match outcome {
            Ok(d) => (in_time, d),
            Err(d) => (false, d),
        };
        if !pass {
            failed += 1;
        }
        println!(
            "criterion {}: {} [{}] {:.2}s (limit {}s){}: {}",
            c.id,
            if pass { "PASS" } else { "FAIL" },
            c.name,
            elapsed.as_secs_f64(),
            c.limit.as_secs(),
            if in_time { "" } else { ", over time" },
            detail
        );
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
