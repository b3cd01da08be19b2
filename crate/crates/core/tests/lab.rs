use grushin::{
    gaussian_bound_fit, gaussian_bound_samples, lp_norm, norm_sweep, weak11_blowup_experiment, weak_quasinorm,
    weak_quasinorm_levels, Dimensions, Drift, Family, FamilySpec, Grid, GrushinMultiIndex, QuadratureSpec,
    SampledFunction,
};
use proptest::prelude::*;
use std::f64::consts::PI;

fn d11() -> Dimensions {
    Dimensions::new(1, 1).unwrap()
}

fn gaussian(grid: &Grid, w: f64) -> SampledFunction {
    SampledFunction::from_fn(grid.clone(), |p| (-(p.x_prime[0].powi(2) + p.x_dprime[0].powi(2)) / (2.0 * w * w)).exp())
}

#[test]
fn lp_norm_of_a_single_cell() {
    let grid = Grid::uniform(d11(), -2.0, 2.0, 8).unwrap();
    let mut f = SampledFunction::zeros(grid.clone());
    let i = grid.ravel(&[6, 3]);
    f.values[i] = 1.0;
    let a = Drift::along_e1(1, 0.7);
    let y1 = grid.coord(0, 6);
    for p in [1.0, 2.0, 3.5] {
        let want = ((2.0 * 0.7 * y1).exp() * grid.cell_volume()).powf(1.0 / p);
        assert!((lp_norm(&f, p, &a).unwrap() / want - 1.0).abs() < 1e-14);
    }
}

#[test]
fn lp_norm_of_a_gaussian() {
    let grid = Grid::uniform(d11(), -8.0, 8.0, 128).unwrap();
    let w = 1.1;
    let f = gaussian(&grid, w);
    for p in [1.0, 2.0, 4.0] {
        let want = (2.0 * PI * w * w / p).powf(1.0 / p);
        let got = lp_norm(&f, p, &Drift::zero(1)).unwrap();
        assert!((got / want - 1.0).abs() < 1e-3, "p={p}: {got} vs {want}");
    }
    assert!(lp_norm(&f, 0.5, &Drift::zero(1)).is_err());
}

#[test]
fn lp_norm_shrinks_under_truncation() {
    let grid = Grid::uniform(d11(), -4.0, 4.0, 32).unwrap();
    let mut f = gaussian(&grid, 1.5);
    let a = Drift::along_e1(1, 1.0);
    let mut prev = lp_norm(&f, 2.0, &a).unwrap();
    for cut in [3.0, 2.0, 1.0] {
        for i in 0..grid.len() {
            if grid.point(i).x_prime[0].abs() > cut {
                f.valid[i] = false;
            }
        }
        let now = lp_norm(&f, 2.0, &a).unwrap();
        assert!(now <= prev);
        prev = now;
    }
}

#[test]
fn weak_quasinorm_of_a_two_valued_function() {
    let grid = Grid::uniform(d11(), -3.0, 3.0, 24).unwrap();
    let a = Drift::along_e1(1, 0.5);
    let c = 2.5;
    let inside = |i: usize| {
        let p = grid.point(i);
        p.x_prime[0].abs() < 1.0 && p.x_dprime[0].abs() < 0.5
    };
    let f = SampledFunction::new(grid.clone(), (0..grid.len()).map(|i| if inside(i) { c } else { 0.0 }).collect()).unwrap();
    let measure: f64 =
        (0..grid.len()).filter(|&i| inside(i)).map(|i| (grid.point(i).x_prime[0]).exp() * grid.cell_volume()).sum();
    assert!((weak_quasinorm(&f, &a).unwrap() / (c * measure) - 1.0).abs() < 1e-12);
    assert_eq!(weak_quasinorm(&SampledFunction::zeros(grid), &a).unwrap(), 0.0);
}

#[test]
fn weak_below_strong_and_stable_in_levels() {
    let grid = Grid::default_for(d11());
    let a = Drift::along_e1(1, 1.0);
    for w in [0.3, 1.0, 2.0] {
        let f = gaussian(&grid, w);
        let coarse = weak_quasinorm(&f, &a).unwrap();
        let fine = weak_quasinorm_levels(&f, &a, 256).unwrap();
        assert!(coarse <= lp_norm(&f, 1.0, &a).unwrap());
        assert!((coarse / fine - 1.0).abs() < 0.02, "w={w}: {coarse} vs {fine}");
    }
}

fn small_spec(family: Family) -> FamilySpec {
    FamilySpec { base_points: vec![32, 40, 48], ..FamilySpec::new(family) }
}

#[test]
fn first_order_sweep_is_uniform_and_stable() {
    let alpha = GrushinMultiIndex::prime(d11(), 0, 1);
    let rep = norm_sweep(&alpha, 2.0, &[0.5, 1.0, 2.0, 4.0], &small_spec(Family::Standard)).unwrap();
    assert!(rep.spread() <= 3.0, "{:?}", rep.estimates);
    assert!(rep.refinement_spread().iter().all(|&s| s < 1.2), "{:?}", rep.levels);
    assert!(rep.estimates.iter().all(|e| e.is_finite() && *e > 0.0));
}

#[test]
fn dilation_matched_sweep_is_drift_invariant() {
    let alpha = GrushinMultiIndex::prime(d11(), 0, 1);
    let rep = norm_sweep(&alpha, 2.0, &[0.5, 1.0, 2.0, 4.0], &small_spec(Family::DilationMatched)).unwrap();
    assert!(rep.spread() < 1.1, "{:?}", rep.estimates);
}

#[test]
fn second_order_sweep_is_stable() {
    for alpha in [GrushinMultiIndex::prime(d11(), 0, 2), GrushinMultiIndex::new(vec![1], vec![1])] {
        let rep = norm_sweep(&alpha, 2.0, &[1.0], &small_spec(Family::Standard)).unwrap();
        assert!(rep.refinement_spread()[0] < 1.2, "{:?}", rep.levels);
    }
}

#[test]
fn sweep_rejects_bad_arguments() {
    let alpha = GrushinMultiIndex::prime(d11(), 0, 1);
    assert!(norm_sweep(&alpha, 1.0, &[1.0], &small_spec(Family::Standard)).is_err());
    assert!(norm_sweep(&alpha, 2.0, &[0.0], &small_spec(Family::Standard)).is_err());
}

#[test]
fn blowup_trend_and_first_order_control() {
    let grid = Grid::uniform(d11(), -6.0, 6.0, 48).unwrap();
    let r = [1.0, 0.5, 0.25];
    let w1 = weak11_blowup_experiment(1, &r, &grid, 0.5).unwrap();
    assert!(w1.spread() < 3.0, "{:?}", w1.w);
    let w3 = weak11_blowup_experiment(3, &r, &grid, 0.5).unwrap();
    assert!(w3.increasing(), "{:?}", w3.w);
    assert_eq!(w3, weak11_blowup_experiment(3, &r, &grid, 0.5).unwrap());
}

#[test]
fn gaussian_bound_fit_holds_on_all_samples() {
    let samples = gaussian_bound_samples(d11(), &[0.1, 1.0, 10.0], 200, 42, &QuadratureSpec::default()).unwrap();
    assert_eq!(samples.len(), 200);
    let fit = gaussian_bound_fit(samples).unwrap();
    assert!(fit.b >= 0.1, "b = {}", fit.b);
    assert!(fit.worst_ratio() <= 1.0 + 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn weak_never_exceeds_l1(vals in prop::collection::vec(-5.0f64..5.0, 64), a in -1.0f64..1.0) {
        let grid = Grid::uniform(d11(), -2.0, 2.0, 8).unwrap();
        let f = SampledFunction::new(grid, vals).unwrap();
        let a = Drift::along_e1(1, a);
        prop_assert!(weak_quasinorm(&f, &a).unwrap() <= lp_norm(&f, 1.0, &a).unwrap() * (1.0 + 1e-12));
    }
}
