//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

use grushin::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn d11() -> Dimensions {
    Dimensions::new(1, 1).unwrap()
}

fn p11(a: f64, b: f64) -> GrushinPoint {
    GrushinPoint::new(vec![a], vec![b]).unwrap()
}

fn mehler_limit() -> Outcome {
    let mut worst = 0.0f64;
    for t in [0.1, 1.0, 10.0] {
        for (xp, yp) in [([0.3, -0.2], [0.1, 0.5]), ([1.0, 0.0], [-1.0, 2.0]), ([0.0, 0.0], [0.0, 0.0])] {
            let d2: f64 = xp.iter().zip(&yp).map(|(a, b)| (a - b) * (a - b)).sum();
            let want = (4.0 * std::f64::consts::PI * t).powf(-1.0) * (-d2 / (4.0 * t)).exp();
            worst = worst.max(rel(mehler_kernel(t, 1e-8, &xp, &yp).unwrap(), want));
        }
    }
    outcome(worst < 1e-6, format!("max rel err {worst:.2e}"))
}

fn semigroup() -> Outcome {
    let q = QuadratureSpec::default();
    let (x, y) = (p11(0.3, 0.1), p11(-0.4, 0.5));
    let (lo, hi, pts) = (-8.0, 8.0, 64);
    let h = (hi - lo) / pts as f64;
    let mut worst = 0.0f64;
    for (t, s) in [(0.5, 0.5), (1.0, 2.0)] {
        let mut sum = 0.0;
        for i in 0..pts {
            for j in 0..pts {
                let z = p11(lo + (i as f64 + 0.5) * h, lo + (j as f64 + 0.5) * h);
                sum += heat_kernel(t, &x, &z, &q).unwrap().value * heat_kernel(s, &z, &y, &q).unwrap().value;
            }
        }
        sum *= h * h;
        worst = worst.max(rel(sum, heat_kernel(t + s, &x, &y, &q).unwrap().value));
    }
    outcome(worst < 1e-3, format!("max rel err {worst:.2e}"))
}

/// Seeded off-diagonal pairs in [−1.5, 1.5]² with Grushin distance in [lo, hi].
fn pairs(seed: u64, lo: f64, hi: f64) -> impl Iterator<Item = (GrushinPoint, GrushinPoint)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    std::iter::repeat_with(move || {
        let mut c = || rng.gen_range(-1.5..1.5);
        (p11(c(), c()), p11(c(), c()))
    })
    .filter(move |(x, y)| (lo..=hi).contains(&grushin_distance(x, y)))
}

fn dilation_covariance() -> Outcome {
    let e1 = Drift::along_e1(1, 1.0);
    let mut worst = 0.0f64;
    for (x, y) in pairs(3, 0.3, 3.0).take(10) {
        for k in 1..=2 {
            let alpha = GrushinMultiIndex::prime(d11(), 0, k);
            for s in [0.5, 2.0] {
                let lhs = riesz_kernel(&RieszKernelRequest::new(alpha.clone(), Drift::along_e1(1, s), x.clone(), y.clone())).unwrap();
                let req = RieszKernelRequest::new(alpha.clone(), e1.clone(), dilate(&x, s).unwrap(), dilate(&y, s).unwrap());
                worst = worst.max(rel(s.powi(3) * riesz_kernel(&req).unwrap(), lhs));
            }
        }
    }
    outcome(worst < 1e-4, format!("max rel err {worst:.2e} over 10 pairs, k in {{1,2}}, s in {{0.5,2}}"))
}

fn rotation_covariance() -> Outcome {
    let dims = Dimensions::new(2, 1).unwrap();
    let a = Drift::new(vec![0.8, -0.5]);
    let rot = Orthogonal::givens(2, 0, 1, 0.7);
    let ra = Drift::new(rot.apply(&a.a));
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst = 0.0f64;
    let mut done = 0;
    while done < 10 {
        let mut c = || rng.gen_range(-1.5..1.5);
        let x = GrushinPoint::new(vec![c(), c()], vec![c()]).unwrap();
        let y = GrushinPoint::new(vec![c(), c()], vec![c()]).unwrap();
        if grushin_distance(&x, &y) < 0.3 {
            continue;
        }
        let (rx, ry) = (rotate(&x, &rot).unwrap(), rotate(&y, &rot).unwrap());
        let kernel = |j: usize, a: &Drift, x: &GrushinPoint, y: &GrushinPoint| {
            riesz_kernel(&RieszKernelRequest::new(GrushinMultiIndex::prime(dims, j, 1), a.clone(), x.clone(), y.clone())).unwrap()
        };
        for j in 0..2 {
            let lhs = kernel(j, &a, &x, &y);
            let rhs: f64 = (0..2).map(|l| rot.get(l, j) * kernel(l, &ra, &rx, &ry)).sum();
            worst = worst.max(rel(rhs, lhs));
        }
        done += 1;
    }
    outcome(worst < 1e-4, format!("max rel err {worst:.2e} over 10 pairs"))
}

fn ball_volume_ratio() -> Outcome {
    let a = Drift::along_e1(1, 1.0);
    let (mut lo, mut hi, mut worst_se) = (f64::INFINITY, 0.0f64, 0.0f64);
    for xp in [0.0, 1.0, -1.0, 4.0, -4.0] {
        for r in [0.25, 0.5, 1.0, 2.0, 4.0, 8.0] {
            let x = p11(xp, 0.0);
            let e = ball_volume_mu_mc(&x, r, &a, 100_000, 7).unwrap();
            let ratio = e.value / ball_volume_mu_asymptotic(&x, r, &a).unwrap();
            lo = lo.min(ratio);
            hi = hi.max(ratio);
            worst_se = worst_se.max(e.std_err / e.value);
        }
    }
    let pass = lo >= 1.0 / 50.0 && hi <= 50.0 && worst_se < 0.05;
    outcome(pass, format!("ratio in [{lo:.3}, {hi:.3}], max std_err/value {worst_se:.3}"))
}

fn gaussian_bound() -> Outcome {
    let samples = gaussian_bound_samples(d11(), &[0.1, 1.0, 10.0], 200, 42, &QuadratureSpec::default()).unwrap();
    let fit = gaussian_bound_fit(samples).unwrap();
    let pass = fit.samples.len() == 200 && fit.b >= 0.1 && fit.worst_ratio() <= 1.0;
    outcome(pass, format!("C = {:.3}, b = {:.3}, worst H/bound {:.3} over {} samples", fit.c, fit.b, fit.worst_ratio(), fit.samples.len()))
}

fn transference_bound() -> Outcome {
    let grid = Grid::uniform(d11(), -5.0, 5.0, 64).unwrap();
    let a = Drift::along_e1(1, 1.0);
    let hv = 2.0 * grid.spacing[0];
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let values: Vec<f64> = (0..27).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let k = GroupKernel::new(d11(), vec![-0.3, -hv, -0.3], vec![0.3, hv, 0.3], vec![3, 3, 3], values).unwrap();
        let (cx, cy, w) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(0.4..1.0));
        let f = SampledFunction::from_fn(grid.clone(), |p| {
            (-((p.x_prime[0] - cx).powi(2) + (p.x_dprime[0] - cy).powi(2)) / (2.0 * w * w)).exp()
        });
        let tf = transference_apply(&k, &f).unwrap();
        for p in [1.0, 2.0] {
            let bound = k.weighted_l1(p, &a).unwrap() * lp_norm(&f, p, &a).unwrap();
            worst = worst.max(lp_norm(&tf, p, &a).unwrap() / bound);
        }
    }
    outcome(worst <= 1.0 + 1e-2, format!("max ‖Tf‖/bound {worst:.4} over 20 instances, p in {{1,2}}"))
}

fn drift_limit_convergence() -> Outcome {
    let grid = Grid::default_for(d11());
    let f = SampledFunction::from_fn(grid.clone(), |p| (-(p.x_prime[0].powi(2) + p.x_dprime[0].powi(2)) / 0.5).exp());
    let mut pass = true;
    let mut detail = Vec::new();
    for k in [1, 3] {
        let cfg = DriftLimitConfig::new(k, &grid).unwrap();
        let rep = drift_limit(&f, &cfg, &QuadratureSpec::default()).unwrap();
        pass &= rep.strictly_decreasing();
        let errs: Vec<String> = rep.sup_errors.iter().map(|e| format!("{e:.3e}")).collect();
        detail.push(format!("k={k}: {}", errs.join(" > ")));
    }
    outcome(pass, detail.join("; "))
}

fn norm_uniformity() -> Outcome {
    let alpha = GrushinMultiIndex::prime(d11(), 0, 1);
    let rep = norm_sweep(&alpha, 2.0, &[0.5, 1.0, 2.0, 4.0], &FamilySpec::new(Family::DilationMatched)).unwrap();
    let est: Vec<String> = rep.estimates.iter().map(|e| format!("{e:.4}")).collect();
    let spread = rep.spread();
    let target = if spread <= 1.1 { "within 10%" } else { "outside 10%" };
    outcome(spread <= 3.0, format!("estimates [{}], max/min {spread:.4} ({target})", est.join(", ")))
}

fn weak_blowup() -> Outcome {
    let grid = Grid::default_for(d11());
    let r = [1.0, 0.5, 0.25];
    let w1 = weak11_blowup_experiment(1, &r, &grid, 0.25).unwrap();
    let w3 = weak11_blowup_experiment(3, &r, &grid, 0.25).unwrap();
    let fmt = |w: &[f64]| w.iter().map(|v| format!("{v:.3}")).collect::<Vec<_>>().join(", ");
    outcome(
        w3.increasing() && w1.spread() < 3.0,
        format!("W3 [{}], W1 [{}] (max/min {:.3})", fmt(&w3.w), fmt(&w1.w), w1.spread()),
    )
}

fn regularization_limit() -> Outcome {
    let alpha = GrushinMultiIndex::prime(d11(), 0, 2);
    let a = Drift::along_e1(1, 2.0);
    let chosen: Vec<_> = pairs(11, 0.4, 1.5)
        .filter(|(x, y)| {
            let v = riesz_kernel_value(&RieszKernelRequest::new(alpha.clone(), a.clone(), x.clone(), y.clone())).unwrap();
            v.value.abs() >= 0.5 * v.abs_integral
        })
        .take(5)
        .collect();
    let mut pass = true;
    let mut finals = Vec::new();
    for (x, y) in &chosen {
        let req = RieszKernelRequest::new(alpha.clone(), a.clone(), x.clone(), y.clone());
        let plain = riesz_kernel(&req).unwrap();
        let diffs: Vec<f64> = [1e-1, 1e-2, 1e-3]
            .iter()
            .map(|&e| rel(regularized_riesz_kernel(&req, &RegularizationParams::new(e, e, d11()).unwrap()).unwrap(), plain))
            .collect();
        pass &= diffs.windows(2).all(|w| w[1] < w[0]) && diffs[2] < 1e-3;
        finals.push(format!("{:.2e}", diffs[2]));
    }
    outcome(pass && chosen.len() == 5, format!("final rel diffs [{}]", finals.join(", ")))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("Mehler limit", mehler_limit),
        ("heat semigroup", semigroup),
        ("Riesz kernel dilation covariance", dilation_covariance),
        ("Riesz kernel rotation covariance", rotation_covariance),
        ("exponential ball volume ratio", ball_volume_ratio),
        ("Gaussian upper bound fit", gaussian_bound),
        ("transference Minkowski bound", transference_bound),
        ("scaled drift limit convergence", drift_limit_convergence),
        ("drift-uniform first-order L2 norms", norm_uniformity),
        ("weak (1,1) blow-up trend", weak_blowup),
        ("regularization limit", regularization_limit),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("{tag} {:>2} {name}: {} [{:.1}s]", i + 1, o.detail, start.elapsed().as_secs_f64());
        failed += usize::from(!o.pass);
    }
    if failed > 0 {
        println!("{failed} of {} criteria failed", criteria.len());
        std::process::exit(1);
    }
}
