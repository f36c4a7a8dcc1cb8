//! Registry of Hankel kernel families `v(t + s)`.
//!
//! | family     | `v(r)`               | params       | decay condition `∫|v|²⟨ln t⟩^{4α} t dt < ∞` | `V ≥ 0`            |
//! |------------|----------------------|--------------|---------------------------------------------|--------------------|
//! | `exp`      | `c e^{-r}`           | `c`          | always                                      | `c > 0`            |
//! | `gamma`    | `c r^a e^{-r}`       | `c`, `a`     | `a > -1`                                    | `c > 0`, `a ≤ 0`   |
//! | `rational` | `c (1 + r)^{-p}`     | `c`, `p`     | `p > 1`                                     | `c > 0`            |

use carleman_core::PerturbationKernel;

use crate::config::KernelSpec;
use crate::error::Diagnostic;

pub struct Family {
    pub name: &'static str,
    /// Parameter names with defaults; `None` marks a required parameter.
    pub params: &'static [(&'static str, Option<f64>)],
}

pub const FAMILIES: &[Family] = &[
    Family { name: "exp", params: &[("c", Some(1.0))] },
    Family { name: "gamma", params: &[("c", Some(1.0)), ("a", None)] },
    Family { name: "rational", params: &[("c", Some(1.0)), ("p", None)] },
];

pub fn family(name: &str) -> Option<&'static Family> {
    FAMILIES.iter().find(|f| f.name == name)
}

fn param(spec: &KernelSpec, fam: &Family, name: &str) -> f64 {
    spec.params
        .get(name)
        .copied()
        .or_else(|| fam.params.iter().find(|p| p.0 == name).and_then(|p| p.1))
        .unwrap_or(f64::NAN)
}

/// Structural problems: unknown family, unknown, missing or non-finite parameters.
pub fn check(spec: &KernelSpec) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let Some(fam) = family(&spec.family) else {
        let known: Vec<&str> = FAMILIES.iter().map(|f| f.name).collect();
        out.push(Diagnostic::new(
            "kernel.family",
            format!("unknown family '{}' (known: {})", spec.family, known.join(", ")),
        ));
        return out;
    };
    for name in spec.params.keys() {
        if !fam.params.iter().any(|p| p.0 == name) {
            out.push(Diagnostic::new(format!("kernel.params.{name}"), format!("not a parameter of '{}'", fam.name)));
        }
    }
    for &(name, default) in fam.params {
        match spec.params.get(name) {
            None if default.is_none() => {
                out.push(Diagnostic::new(format!("kernel.params.{name}"), "required"));
            }
            Some(v) if !v.is_finite() => {
                out.push(Diagnostic::new(format!("kernel.params.{name}"), "must be finite"));
            }
            _ => {}
        }
    }
    if let Some(a) = spec.alpha {
        if !(a.is_finite() && a >= 0.0) {
            out.push(Diagnostic::new("kernel.alpha", "must be finite and nonnegative"));
        }
    }
    out
}

/// Violations of the Hankel decay condition for the requested `α`.
pub fn decay_diagnostics(spec: &KernelSpec) -> Vec<Diagnostic> {
    let Some(fam) = family(&spec.family) else { return Vec::new() };
    let alpha = spec.alpha();
    match fam.name {
        "gamma" => {
            let a = param(spec, fam, "a");
            if !(a > -1.0) {
                return vec![Diagnostic::new(
                    "kernel.params.a",
                    format!("a = {a} violates the decay condition for alpha = {alpha} (needs a > -1)"),
                )];
            }
        }
        "rational" => {
            let p = param(spec, fam, "p");
            if !(p > 1.0) {
                return vec![Diagnostic::new(
                    "kernel.params.p",
                    format!("p = {p} violates the decay condition for alpha = {alpha} (needs p > 1)"),
                )];
            }
        }
        _ => {}
    }
    Vec::new()
}

/// Conditions for `V ≥ 0`, needed by the eigenvalue count.
pub fn positivity_diagnostics(spec: &KernelSpec) -> Vec<Diagnostic> {
    let Some(fam) = family(&spec.family) else { return Vec::new() };
    let mut out = Vec::new();
    let c = param(spec, fam, "c");
    if !(c > 0.0) {
        out.push(Diagnostic::new("kernel.params.c", format!("c = {c}: counting needs V >= 0 (c > 0)")));
    }
    if fam.name == "gamma" {
        let a = param(spec, fam, "a");
        if a > 0.0 {
            out.push(Diagnostic::new(
                "kernel.params.a",
                format!("a = {a}: r^a e^(-r) is not completely monotone, so V is indefinite (needs a <= 0)"),
            ));
        }
    }
    out
}

/// Builds the kernel; call only after [`check`] came back empty.
pub fn build(spec: &KernelSpec) -> PerturbationKernel {
    let fam = family(&spec.family).expect("checked family");
    let c = param(spec, fam, "c");
    let k = match fam.name {
        "exp" => PerturbationKernel::exponential(c),
        "gamma" => PerturbationKernel::gamma(c, param(spec, fam, "a")),
        "rational" => PerturbationKernel::rational(c, param(spec, fam, "p")),
        _ => unreachable!(),
    };
    k.with_alpha(spec.alpha())
}
