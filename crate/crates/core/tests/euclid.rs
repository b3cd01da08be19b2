use grushin::{
    drift_limit, euclid_drift_riesz, scaled_conjugated_riesz, Dimensions, DriftLimitConfig, Grid, GrushinPoint,
    QuadratureSpec, SampledFunction,
};
use proptest::prelude::*;

fn d11() -> Dimensions {
    Dimensions::new(1, 1).unwrap()
}

fn gaussian(grid: &Grid, s2: f64) -> SampledFunction {
    SampledFunction::from_fn(grid.clone(), |p| (-(p.x_prime[0].powi(2) + p.x_dprime[0].powi(2)) / (2.0 * s2)).exp())
}

/// e^{−x₁}(∂₁−1)²(1−Δ)^{−1}[e^{y₁}f] for f = exp(−|y|²/2s²) in two variables.
///
/// e^{y₁}f = e^{s²/2} exp(−|y − c|²/2s²) with c = (s², 0); the heat flow keeps it
/// Gaussian with variance s² + 2t, and (1−Δ)^{−1} = ∫ e^{−t} e^{tΔ} dt is done
/// by composite Simpson in u = ln t.
fn k2_oracle(x1: f64, x2: f64, s2: f64) -> f64 {
    let (lo, hi, n) = (-30.0f64, 5.0f64, 20000usize);
    let h = (hi - lo) / n as f64;
    let dx = x1 - s2;
    let r2 = dx * dx + x2 * x2;
    let integrand = |u: f64| {
        let t = u.exp();
        let v = s2 + 2.0 * t;
        let g = (s2 / v) * (-r2 / (2.0 * v)).exp();
        let d1 = -dx / v;
        let d2 = dx * dx / (v * v) - 1.0 / v;
        t * (-t).exp() * g * (d2 - 2.0 * d1 + 1.0)
    };
    let mut sum = integrand(lo) + integrand(hi);
    for i in 1..n {
        sum += integrand(lo + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    (s2 / 2.0).exp() * sum * h / 3.0 * (-x1).exp()
}

#[test]
fn second_order_matches_heat_quadrature() {
    let grid = Grid::uniform(d11(), -8.0, 8.0, 128).unwrap();
    let s2 = 0.5;
    let out = euclid_drift_riesz(&gaussian(&grid, s2), 2).unwrap();
    let mut worst = 0.0f64;
    let mut scale = 0.0f64;
    for i in 0..grid.len() {
        let p = grid.point(i);
        if p.x_prime[0].abs() > 3.0 || p.x_dprime[0].abs() > 3.0 {
            continue;
        }
        let want = k2_oracle(p.x_prime[0], p.x_dprime[0], s2);
        worst = worst.max((out.values[i] - want).abs());
        scale = scale.max(want.abs());
    }
    assert!(worst < 1e-3 * scale, "{worst} vs {scale}");
}

#[test]
fn zero_frequency_gain_is_minus_one_to_the_k() {
    // Σ e^{x₁}Tf = m(0) Σ e^{x₁}f up to the e^{−r} tail of the potential
    // beyond the grid edge
    let grid = Grid::uniform(d11(), -14.0, 14.0, 112).unwrap();
    let f = gaussian(&grid, 0.3);
    let mass = |g: &SampledFunction| (0..grid.len()).map(|i| g.values[i] * grid.point(i).x_prime[0].exp()).sum::<f64>();
    for k in 1..=4u32 {
        let out = euclid_drift_riesz(&f, k).unwrap();
        let want = if k % 2 == 0 { 1.0 } else { -1.0 };
        assert!((mass(&out) / mass(&f) - want).abs() < 1e-4, "k={k}: {}", mass(&out) / mass(&f));
    }
}

fn conj_l2(f: &SampledFunction) -> f64 {
    let g = &f.grid;
    (0..g.len()).map(|i| (f.values[i] * g.point(i).x_prime[0].exp()).powi(2)).sum::<f64>().sqrt()
}

#[test]
fn rejects_bad_input() {
    let grid = Grid::uniform(d11(), -1.0, 1.0, 8).unwrap();
    assert!(euclid_drift_riesz(&gaussian(&grid, 1.0), 0).is_err());
    let thin = Grid::new(d11(), vec![0.0, 0.0], vec![0.1, 0.1], vec![1, 8]).unwrap();
    assert!(euclid_drift_riesz(&SampledFunction::zeros(thin), 1).is_err());
}

#[test]
fn config_defaults_and_validation() {
    let grid = Grid::default_for(d11());
    let cfg = DriftLimitConfig::new(1, &grid).unwrap();
    assert_eq!(cfg.r_list, vec![1.0, 0.5, 0.25]);
    assert_eq!(cfg.probe_points.len(), 5);
    assert!(DriftLimitConfig::new(0, &grid).is_err());

    let mut bad = cfg.clone();
    bad.r_list = vec![1.0, 1.0];
    assert!(bad.validate().is_err());
    let mut bad = cfg.clone();
    bad.xi = GrushinPoint::new(vec![1.0], vec![0.5]).unwrap();
    assert!(bad.validate().is_err());

    let f = gaussian(&grid, 0.25);
    assert!(scaled_conjugated_riesz(&f, &cfg, 0.3, &QuadratureSpec::default()).is_err());
}

#[test]
fn drift_limit_errors_shrink_on_a_small_grid() {
    let grid = Grid::uniform(d11(), -4.0, 4.0, 32).unwrap();
    let f = gaussian(&grid, 0.25);
    let cfg = DriftLimitConfig::new(1, &grid).unwrap();
    let rep = drift_limit(&f, &cfg, &QuadratureSpec::default()).unwrap();
    assert!(rep.strictly_decreasing(), "{:?}", rep.sup_errors);
    assert!(rep.limit_scale > 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn conjugated_l2_contraction(vals in prop::collection::vec(-1.0f64..1.0, 100), k in 1u32..5) {
        let grid = Grid::uniform(d11(), -2.0, 2.0, 10).unwrap();
        let f = SampledFunction::new(grid, vals).unwrap();
        let out = euclid_drift_riesz(&f, k).unwrap();
        prop_assert!(conj_l2(&out) <= conj_l2(&f) * (1.0 + 1e-10));
    }

    #[test]
    fn linear(u in prop::collection::vec(-1.0f64..1.0, 36), v in prop::collection::vec(-1.0f64..1.0, 36), c in -3.0f64..3.0) {
        let grid = Grid::uniform(d11(), -1.0, 1.0, 6).unwrap();
        let f = SampledFunction::new(grid.clone(), u).unwrap();
        let g = SampledFunction::new(grid, v).unwrap();
        let lhs = euclid_drift_riesz(&f.combine(1.0, &g, c).unwrap(), 3).unwrap();
        let rhs = euclid_drift_riesz(&f, 3).unwrap().combine(1.0, &euclid_drift_riesz(&g, 3).unwrap(), c).unwrap();
        let scale = rhs.max_abs().max(1.0);
        for (a, b) in lhs.values.iter().zip(&rhs.values) {
            prop_assert!((a - b).abs() < 1e-10 * scale);
        }
    }
}
