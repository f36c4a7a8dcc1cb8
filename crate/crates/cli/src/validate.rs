use std::f64::consts::PI;

use carleman_core::evolution::EvolutionConfig;
use carleman_core::grid::MIN_NODES;

use crate::config::{Command, GridSpec, JobConfig};
use crate::error::Diagnostic;
use crate::kernels;

fn check_grid(field: &str, g: &GridSpec, out: &mut Vec<Diagnostic>) {
    if !(g.x_min.is_finite() && g.x_max.is_finite() && g.x_min < g.x_max) {
        out.push(Diagnostic::new(format!("{field}.x_min"), "need finite x_min < x_max"));
    }
    if g.n < MIN_NODES {
        out.push(Diagnostic::new(format!("{field}.n"), format!("grid too small: n = {} < {MIN_NODES}", g.n)));
    }
}

/// Every violated invariant of `cfg` when run as `command`; empty means runnable.
pub fn validate(cfg: &JobConfig, command: Command) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    if let Some(c) = cfg.command {
        if c != command {
            out.push(Diagnostic::new("command", format!("config is for '{}', invoked as '{}'", c.name(), command.name())));
        }
    }
    match &cfg.grid {
        Some(g) => check_grid("grid", g, &mut out),
        None if matches!(command, Command::Resolvent | Command::Density | Command::Evolve) => {
            out.push(Diagnostic::new("grid", format!("required for '{}'", command.name())));
        }
        None => {}
    }
    if let Some(g) = &cfg.options.direct_grid {
        check_grid("options.direct_grid", g, &mut out);
    }

    match &cfg.kernel {
        Some(k) => {
            let structural = kernels::check(k);
            let clean = structural.is_empty();
            out.extend(structural);
            if clean {
                out.extend(kernels::decay_diagnostics(k));
                if command == Command::Count {
                    out.extend(kernels::positivity_diagnostics(k));
                    if cfg.options.bound.unwrap_or(true) && !(k.alpha() > 1.5) {
                        out.push(Diagnostic::new(
                            "kernel.alpha",
                            format!("alpha = {} must exceed 3/2 for the eigenvalue bound", k.alpha()),
                        ));
                    }
                }
            }
        }
        None if matches!(command, Command::Scatter | Command::Count) => {
            out.push(Diagnostic::new("kernel", format!("required for '{}'", command.name())));
        }
        None => {}
    }

    let t = &cfg.tolerances;
    for (name, v) in [
        ("cond_cap", t.cond_cap),
        ("fit_tol", t.fit_tol),
        ("lambda_min", t.lambda_min),
        ("support_tol", t.support_tol),
        ("clip", t.clip),
    ] {
        if let Some(v) = v {
            if !(v.is_finite() && v > 0.0) {
                out.push(Diagnostic::new(format!("tolerances.{name}"), "must be positive and finite"));
            }
        }
    }
    if cfg.options.stride == Some(0) {
        out.push(Diagnostic::new("options.stride", "must be at least 1"));
    }
    if let Some(s) = cfg.options.s {
        if !(s > 0.0 && s.is_finite()) {
            out.push(Diagnostic::new("options.s", "must be positive"));
        }
    }
    let eps = cfg.options.eps.unwrap_or(0.0);
    if !eps.is_finite() {
        out.push(Diagnostic::new("options.eps", "must be finite"));
    }

    if command == Command::Evolve {
        match &cfg.options.state {
            None => out.push(Diagnostic::new("options.state", "required for 'evolve'")),
            Some(v) if v.is_empty() => out.push(Diagnostic::new("options.state", "needs at least one interval")),
            Some(v) => {
                for (i, [lo, hi]) in v.iter().enumerate() {
                    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                        out.push(Diagnostic::new(format!("options.state[{i}]"), "need finite lo < hi"));
                    }
                }
            }
        }
    }

    let t_min = EvolutionConfig::default().t_min;
    for (i, &v) in cfg.sweep.iter().enumerate() {
        let field = format!("sweep[{i}]");
        let bad = |m: String| Diagnostic::new(field.clone(), m);
        if !v.is_finite() {
            out.push(bad(format!("{v} is not finite")));
            continue;
        }
        match command {
            Command::Resolvent => {
                if eps == 0.0 && v == 0.0 {
                    out.push(bad("lambda = 0 is the bottom of the spectrum".into()));
                }
            }
            Command::Density => {
                if !(v > 0.0 && v < PI) {
                    out.push(bad(format!("lambda = {v} not in (0, pi)")));
                }
            }
            Command::Evolve => {
                if v.abs() < t_min {
                    out.push(bad(format!("|T| = {} below {t_min}", v.abs())));
                }
            }
            Command::Scatter => {
                if !(v > 0.0) {
                    out.push(bad(format!("k = {v} must be positive")));
                }
            }
            Command::Count => {
                if !(v > PI) {
                    out.push(bad(format!("lambda = {v} must exceed pi")));
                }
            }
        }
    }
    out
}
