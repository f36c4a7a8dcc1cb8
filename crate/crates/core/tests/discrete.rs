use std::f64::consts::PI;

use carleman_core::discrete::*;
use carleman_core::{Error, LogGrid, PerturbationKernel};

#[test]
fn birman_schwinger_matches_direct_count() {
    let cfg = CountConfig::default();
    let grid = LogGrid::covering(-144.0, 84.0, 0.25).unwrap();
    for &c in &[2.0, 10.0] {
        let v = PerturbationKernel::exponential(c);
        let thresholds = [PI + 0.01, PI + 0.1, PI + 0.5, PI + 1.0];
        let bs = birman_schwinger_counts(&v, &thresholds, &cfg).unwrap();
        let direct = count_direct(&v, PI + 0.01, &grid).unwrap();
        for (i, &t) in thresholds.iter().enumerate() {
            let d = direct.eigenvalues.iter().filter(|&&e| e > t).count();
            assert_eq!(bs[i], d, "c = {c}, threshold {t}");
        }
        assert!(bs[0] >= 1);
    }
}

#[test]
fn gamma_alpha_matches_convolution_oracle() {
    // ⟨x⟩⁻⁴ * ⟨x⟩⁻⁴ = π(w² + 20)/(w² + 4)³, leaving one integral in w = sinh s
    let hs = 0.01;
    let mut total = 0.0;
    for i in -3000..=3000 {
        let s = i as f64 * hs;
        let w: f64 = s.sinh();
        let wc = if w == 0.0 { 1.0 } else { w / w.tanh() };
        total += PI * (w * w + 20.0) / (w * w + 4.0).powi(3) * wc * wc * s.cosh() * hs;
    }
    let oracle = total.sqrt() / (PI * PI);
    let g = gamma_alpha(2.0).unwrap();
    assert!((g - oracle).abs() < 1e-8 * oracle, "{g} vs {oracle}");
    assert!(gamma_alpha(3.0).unwrap() < g);
    assert!(matches!(gamma_alpha(1.5), Err(Error::Domain { .. })));
}

#[test]
fn weighted_hs_norm_of_separable_kernel() {
    // e^{-(t+s)} factorizes: the norm is ∫ e^{-2t} ⟨ln t⟩^{2α} dt
    let grid = LogGrid::covering(-60.0, 5.0, 0.05).unwrap();
    let v = PerturbationKernel::exponential(1.0);
    let got = v.weighted_hs_norm(2.0, &grid).unwrap();
    let oracle: f64 = {
        let mut acc = 0.0;
        let (lo, hi, m) = (-60.0, 5.0, 200000);
        let dx = (hi - lo) / m as f64;
        for j in 0..m {
            let x: f64 = lo + (j as f64 + 0.5) * dx;
            let t = x.exp();
            acc += (-2.0 * t).exp() * (1.0 + x * x).powi(2) * t * dx;
        }
        acc
    };
    assert!((got - oracle).abs() < 1e-6 * oracle, "{got} vs {oracle}");
}

#[test]
fn resonance_weight_routes_agree() {
    let grid = LogGrid::covering(-60.0, 5.0, 0.05).unwrap();
    for v in [PerturbationKernel::exponential(1.5), PerturbationKernel::gamma(1.0, 1.0)] {
        let a = resonance_weight(&v, &grid).unwrap();
        let b = resonance_weight_hankel(&v, &grid).unwrap();
        assert!((a - b).abs() < 1e-8 * b.abs(), "{a} vs {b}");
    }
    let v = PerturbationKernel::exponential(1.5);
    assert!((resonance_weight_hankel(&v, &grid).unwrap() - 1.5 * PI).abs() < 1e-8);
    let bs = BirmanSchwinger::new(&v, PI + 0.1, &grid, 1e-10).unwrap();
    assert!((bs.w_norm_sq - 1.5 * PI).abs() < 1e-8);
}

#[test]
fn indefinite_kernel_is_refused() {
    let grid = LogGrid::covering(-30.0, 4.0, 0.2).unwrap();
    let v = PerturbationKernel::exponential(-1.0);
    assert!(matches!(BirmanSchwinger::new(&v, PI + 0.1, &grid, 1e-10), Err(Error::Indefinite(_))));
    assert!(BirmanSchwinger::new(&PerturbationKernel::exponential(1.0), 3.0, &grid, 1e-10).is_err());
}

#[test]
fn bound_dominates_the_count() {
    let cfg = CountConfig::default();
    for &c in &[0.5, 2.0, 10.0] {
        let v = PerturbationKernel::exponential(c);
        let grid = cfg.grid_for(&v).unwrap();
        let bound = eigenvalue_bound(&v, 2.0, &grid).unwrap();
        let n = birman_schwinger_count(&v, PI + 1e-4, &cfg).unwrap();
        assert!(bound >= n as f64, "c = {c}: {bound} < {n}");
    }
}

#[test]
fn a_tilde_defect_decreases_towards_pi() {
    let d: Vec<f64> = [1e-1, 1e-2, 1e-3].iter().map(|&e| a_tilde_limit_defect(2.0, PI + e).unwrap()).collect();
    assert!(d[0] > d[1] && d[1] > d[2], "{d:?}");
}

#[test]
fn zero_kernel_has_no_eigenvalues() {
    let grid = LogGrid::covering(-20.0, 20.0, 0.2).unwrap();
    let dc = count_direct(&PerturbationKernel::zero(), PI, &grid).unwrap();
    assert_eq!(dc.count(), 0);
}

#[test]
fn positive_kernels_bind_a_state_just_above_pi() {
    let cfg = CountConfig::default();
    for v in [PerturbationKernel::gamma(0.3, -0.5), PerturbationKernel::rational(0.2, 3.0)] {
        let grid = cfg.grid_for(&v).unwrap();
        assert!(resonance_weight(&v, &grid).unwrap() > 0.0);
        assert!(birman_schwinger_count(&v, PI + 1e-4, &cfg).unwrap() >= 1, "{v:?}");
    }
}
