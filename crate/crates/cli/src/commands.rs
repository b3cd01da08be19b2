use crate::output::{fmt_coords, fmt_f64, Cell, Table};
use crate::RunConfig;
use anyhow::Result;
use clap::{ArgAction, Args, ValueEnum};
use grushin::{
    ball_volume_mu_asymptotic, ball_volume_mu_mc, dilate, grushin_distance, heat_kernel_drift, lp_norm,
    regularized_riesz_kernel, riesz_kernel_value, rotate, shifted_riesz_kernel, transference_apply,
    weak11_blowup_experiment, Dimensions, Drift, DriftLimitConfig, Error, Family, FamilySpec, Grid, GroupKernel,
    GrushinMultiIndex, GrushinPoint, Orthogonal, RegularizationParams, RieszKernelRequest, SampledFunction,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// One checked invariant: `observed relation limit`.
pub struct Gate {
    pub invariant: String,
    pub observed: f64,
    pub relation: &'static str,
    pub limit: f64,
}

impl Gate {
    fn new(invariant: impl Into<String>, observed: f64, relation: &'static str, limit: f64) -> Self {
        Self { invariant: invariant.into(), observed, relation, limit }
    }

    pub fn passed(&self) -> bool {
        match self.relation {
            "<" => self.observed < self.limit,
            "<=" => self.observed <= self.limit,
            ">" => self.observed > self.limit,
            _ => self.observed >= self.limit,
        }
    }
}

pub struct Outcome {
    pub table: Table,
    pub gates: Vec<Gate>,
    /// Shown when there is no gate.
    pub note: String,
}

impl Outcome {
    fn ungated(table: Table, note: String) -> Self {
        Self { table, gates: Vec::new(), note }
    }

    pub fn passed(&self) -> bool {
        self.gates.iter().all(Gate::passed)
    }

    pub fn summary(&self) -> String {
        let rows = self.table.rows.len();
        if self.gates.is_empty() {
            return format!("{rows} rows; {}; no gate", self.note);
        }
        let parts: Vec<String> = self
            .gates
            .iter()
            .map(|g| {
                let verdict = if g.passed() { "PASS".to_string() } else { format!("FAIL (violated: {})", g.invariant) };
                format!("{}: {} {} {} {verdict}", g.invariant, fmt_f64(g.observed), g.relation, fmt_f64(g.limit))
            })
            .collect();
        format!("{rows} rows; {}", parts.join("; "))
    }
}

fn bad(msg: impl Into<String>) -> anyhow::Error {
    Error::InvalidArgument(msg.into()).into()
}

fn point(dims: Dimensions, c: &[f64]) -> Result<GrushinPoint> {
    if c.len() != dims.total() {
        return Err(bad(format!("points need n + m = {} coordinates, got {}", dims.total(), c.len())));
    }
    Ok(GrushinPoint::from_slice(c, dims.n)?)
}

/// No value gives zero drift; a single value with n > 1 points along e₁.
fn drift(dims: Dimensions, a: &Option<Vec<f64>>) -> Result<Drift> {
    match a {
        None => Ok(Drift::zero(dims.n)),
        Some(v) if v.len() == dims.n => Ok(Drift::new(v.clone())),
        Some(v) if v.len() == 1 => Ok(Drift::along_e1(dims.n, v[0])),
        Some(v) => Err(bad(format!("drift needs 1 or n = {} components, got {}", dims.n, v.len()))),
    }
}

fn multi_index(dims: Dimensions, prime: &Option<Vec<u32>>, dprime: &Option<Vec<u32>>) -> Result<GrushinMultiIndex> {
    let prime = prime.clone().unwrap_or_else(|| {
        let mut v = vec![0; dims.n];
        v[0] = 1;
        v
    });
    let dprime = dprime.clone().unwrap_or_else(|| vec![0; dims.n * dims.m]);
    let alpha = GrushinMultiIndex::new(prime, dprime);
    alpha.check(dims)?;
    Ok(alpha)
}

fn coords(p: &GrushinPoint) -> String {
    fmt_coords(&p.to_vec())
}

fn max_of(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(0.0, f64::max)
}

fn spread(v: &[f64]) -> f64 {
    max_of(v.iter().copied()) / v.iter().copied().fold(f64::INFINITY, f64::min)
}

#[derive(Args, Debug)]
pub struct HeatKernelArgs {
    /// Times, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    pub t: Vec<f64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    pub x: Vec<f64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    pub y: Vec<f64>,
    /// Drift a ∈ ℝⁿ (zero if omitted).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub a: Option<Vec<f64>>,
}

pub fn heat_kernel(cfg: &RunConfig, args: &HeatKernelArgs) -> Result<Outcome> {
    let dims = cfg.dims()?;
    let (x, y, a, q) = (point(dims, &args.x)?, point(dims, &args.y)?, drift(dims, &args.a)?, cfg.quadrature());
    let mut table = Table::new("heat kernel with drift", &["t", "x", "y", "a", "value", "est_error"]);
    let mut worst = 0.0f64;
    for &t in &args.t {
        let h = heat_kernel_drift(t, &a, &x, &y, &q)?;
        worst = worst.max(h.est_error / h.value.abs());
        table.push(vec![t.into(), coords(&x).into(), coords(&y).into(), fmt_coords(&a.a).into(), h.value.into(), h.est_error.into()]);
    }
    Ok(Outcome::ungated(table, format!("max est_error/|value| {}", fmt_f64(worst))))
}

#[derive(Args, Debug)]
pub struct RieszKernelArgs {
    /// α′ (n entries); defaults to the first coordinate, order 1.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub alpha_prime: Option<Vec<u32>>,
    /// α″ (n·m entries, row-major); defaults to zeros.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub alpha_dprime: Option<Vec<u32>>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    pub x: Vec<f64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    pub y: Vec<f64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub a: Option<Vec<f64>>,
    /// Kernel of X^α(δI + G_a)^{−k/2} instead.
    #[arg(long, conflicts_with = "eps")]
    pub shift: Option<f64>,
    /// Kernel of X^α(δI + G_a)^{−k/2}(I + εG_a)^{−N}; δ defaults to ε.
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long, requires = "eps")]
    pub delta: Option<f64>,
    /// N of the regularization; defaults to ⌈Q/2⌉ + 1.
    #[arg(long, requires = "eps")]
    pub reg_n: Option<u32>,
}

pub fn riesz_kernel(cfg: &RunConfig, args: &RieszKernelArgs) -> Result<Outcome> {
    let dims = cfg.dims()?;
    let alpha = multi_index(dims, &args.alpha_prime, &args.alpha_dprime)?;
    let k = alpha.order();
    let mut req = RieszKernelRequest::new(alpha, drift(dims, &args.a)?, point(dims, &args.x)?, point(dims, &args.y)?);
    req.q = cfg.quadrature();
    let (kind, value, est, abs) = if let Some(d) = args.shift {
        ("shifted", shifted_riesz_kernel(&req, d)?, Cell::Null, Cell::Null)
    } else if let Some(eps) = args.eps {
        let mut p = RegularizationParams::new(eps, args.delta.unwrap_or(eps), dims)?;
        if let Some(n) = args.reg_n {
            p.n = n;
        }
        ("regularized", regularized_riesz_kernel(&req, &p)?, Cell::Null, Cell::Null)
    } else {
        let v = riesz_kernel_value(&req)?;
        ("plain", v.value, v.est_error.into(), v.abs_integral.into())
    };
    let note = match &est {
        Cell::F(e) => format!("est_error/|value| {}", fmt_f64(e / value.abs())),
        _ => "no error estimate".to_string(),
    };
    let mut table = Table::new("Riesz kernel as a heat-kernel t-integral", &["kind", "k", "x", "y", "a", "value", "est_error", "abs_integral"]);
    table.push(vec![kind.into(), k.into(), coords(&req.x).into(), coords(&req.y).into(), fmt_coords(&req.a.a).into(), value.into(), est, abs]);
    Ok(Outcome::ungated(table, note))
}

#[derive(Args, Debug)]
pub struct DistanceArgs {
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    pub x: Vec<f64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    pub y: Vec<f64>,
}

pub fn distance(cfg: &RunConfig, args: &DistanceArgs) -> Result<Outcome> {
    let dims = cfg.dims()?;
    let (x, y) = (point(dims, &args.x)?, point(dims, &args.y)?);
    let d = grushin_distance(&x, &y);
    let mut table = Table::new("Grushin quasi-distance", &["x", "y", "d"]);
    table.push(vec![coords(&x).into(), coords(&y).into(), d.into()]);
    Ok(Outcome::ungated(table, format!("d = {}", fmt_f64(d))))
}

#[derive(Args, Debug)]
pub struct BallVolumeArgs {
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    pub a: Vec<f64>,
    /// Centre: n coordinates of x′ (x″ = 0) or all n + m; repeatable.
    #[arg(long, action = ArgAction::Append, allow_hyphen_values = true, default_value = "0")]
    pub x: Vec<String>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "0.25,0.5,1,2,4,8")]
    pub r_sweep: Vec<f64>,
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
    /// Allowed factor between Monte-Carlo and asymptotic volumes.
    #[arg(long, default_value_t = 50.0)]
    pub max_ratio: f64,
    /// Largest allowed std_err/mc.
    #[arg(long, default_value_t = 0.05)]
    pub max_rel_std_err: f64,
}

fn parse_list(s: &str) -> Result<Vec<f64>> {
    s.split(',').map(|c| c.trim().parse::<f64>().map_err(|e| bad(format!("bad number {c:?}: {e}")))).collect()
}

pub fn ball_volume(cfg: &RunConfig, args: &BallVolumeArgs) -> Result<Outcome> {
    let dims = cfg.dims()?;
    let a = drift(dims, &Some(args.a.clone()))?;
    let mut table = Table::new("Monte-Carlo versus asymptotic exponential ball volume", &["x", "r", "mc", "std_err", "asymptotic", "ratio"]);
    let (mut worst_ratio, mut worst_se) = (0.0f64, 0.0f64);
    for xs in &args.x {
        let mut c = parse_list(xs)?;
        if c.len() == dims.n {
            c.resize(dims.total(), 0.0);
        }
        let x = point(dims, &c)?;
        for &r in &args.r_sweep {
            let e = ball_volume_mu_mc(&x, r, &a, args.samples, cfg.seed)?;
            let asym = ball_volume_mu_asymptotic(&x, r, &a)?;
            let ratio = e.value / asym;
            worst_ratio = worst_ratio.max(ratio.max(1.0 / ratio));
            worst_se = worst_se.max(e.std_err / e.value);
            table.push(vec![coords(&x).into(), r.into(), e.value.into(), e.std_err.into(), asym.into(), ratio.into()]);
        }
    }
    let gates = vec![
        Gate::new("mc/asymptotic ratio within a bounded factor", worst_ratio, "<=", args.max_ratio),
        Gate::new("relative Monte-Carlo standard error", worst_se, "<", args.max_rel_std_err),
    ];
    Ok(Outcome { table, gates, note: String::new() })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Standard,
    Matched,
}

#[derive(Args, Debug)]
pub struct NormSweepArgs {
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub alpha_prime: Option<Vec<u32>>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub alpha_dprime: Option<Vec<u32>>,
    #[arg(long, default_value_t = 2.0)]
    pub p: f64,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "0.5,1,2,4")]
    pub a_sweep: Vec<f64>,
    #[arg(long, value_enum, default_value = "matched")]
    pub family: FamilyArg,
    /// Width of the Gaussian profiles.
    #[arg(long, default_value_t = 0.4)]
    pub width: f64,
    /// Points per axis at each refinement level.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "40,52,64")]
    pub points: Vec<usize>,
    /// Allowed max/min of the estimates across drift magnitudes.
    #[arg(long, default_value_t = 3.0)]
    pub max_spread: f64,
}

pub fn norm_sweep(cfg: &RunConfig, args: &NormSweepArgs) -> Result<Outcome> {
    let dims = cfg.dims()?;
    let alpha = multi_index(dims, &args.alpha_prime, &args.alpha_dprime)?;
    let family = match args.family {
        FamilyArg::Standard => Family::Standard,
        FamilyArg::Matched => Family::DilationMatched,
    };
    let spec = FamilySpec { width: args.width, base_points: args.points.clone(), ..FamilySpec::new(family) };
    let rep = grushin::norm_sweep(&alpha, args.p, &args.a_sweep, &spec)?;
    let mut table = Table::new("drift-uniform Riesz operator norms", &["drift_magnitude", "points", "level_estimate", "estimate"]);
    for (d, &mag) in rep.drift_magnitudes.iter().enumerate() {
        for level in &rep.levels {
            table.push(vec![mag.into(), level.points.into(), level.estimates[d].into(), rep.estimates[d].into()]);
        }
    }
    let gates = vec![Gate::new("max/min of norm estimates across drifts", rep.spread(), "<=", args.max_spread)];
    Ok(Outcome { table, gates, note: String::new() })
}

#[derive(Args, Debug, Clone)]
pub struct GridArgs {
    /// Points per axis of the sampling grid.
    #[arg(long, default_value_t = 64)]
    pub points: usize,
    #[arg(long, default_value_t = -6.0)]
    pub lo: f64,
    #[arg(long, default_value_t = 6.0)]
    pub hi: f64,
}

impl GridArgs {
    fn grid(&self, dims: Dimensions) -> Result<Grid> {
        Ok(Grid::uniform(dims, self.lo, self.hi, self.points)?)
    }
}

#[derive(Args, Debug)]
pub struct DriftLimitArgs {
    #[arg(long, default_value_t = 1)]
    pub k: u32,
    /// Standard deviation of the Gaussian test function.
    #[arg(long, default_value_t = 0.5)]
    pub width: f64,
    #[command(flatten)]
    pub grid: GridArgs,
}

fn gaussian(grid: &Grid, width: f64) -> SampledFunction {
    let w2 = 2.0 * width * width;
    SampledFunction::from_fn(grid.clone(), |p| (-p.to_vec().iter().map(|c| c * c).sum::<f64>() / w2).exp())
}

pub fn drift_limit(cfg: &RunConfig, args: &DriftLimitArgs) -> Result<Outcome> {
    let grid = args.grid.grid(cfg.dims()?)?;
    let f = gaussian(&grid, args.width);
    let dl = DriftLimitConfig::new(args.k, &grid)?;
    let rep = grushin::drift_limit(&f, &dl, &cfg.quadrature())?;
    let mut table = Table::new("rescaled transforms converge to the Euclidean drifted transform", &["k", "r", "sup_error", "limit_scale"]);
    for (r, e) in rep.r_list.iter().zip(&rep.sup_errors) {
        table.push(vec![rep.k.into(), (*r).into(), (*e).into(), rep.limit_scale.into()]);
    }
    let worst_step = max_of(rep.sup_errors.windows(2).map(|w| w[1] / w[0]));
    let gates = vec![Gate::new("largest ratio of successive sup errors", worst_step, "<", 1.0)];
    Ok(Outcome { table, gates, note: String::new() })
}

#[derive(Args, Debug)]
pub struct BlowupArgs {
    #[arg(long, default_value_t = 3)]
    pub k: u32,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "1,0.5,0.25")]
    pub r_list: Vec<f64>,
    /// Standard deviation of the bump.
    #[arg(long, default_value_t = 0.25)]
    pub width: f64,
    /// For k < 3: allowed max/min of W(R).
    #[arg(long, default_value_t = 3.0)]
    pub max_spread: f64,
    #[command(flatten)]
    pub grid: GridArgs,
}

pub fn blowup(cfg: &RunConfig, args: &BlowupArgs) -> Result<Outcome> {
    let grid = args.grid.grid(cfg.dims()?)?;
    let rep = weak11_blowup_experiment(args.k, &args.r_list, &grid, args.width)?;
    let mut table = Table::new("weak (1,1) quasi-norms of rescaled transforms", &["k", "r", "w", "l1_norm"]);
    for (r, w) in rep.r_list.iter().zip(&rep.w) {
        table.push(vec![rep.k.into(), (*r).into(), (*w).into(), rep.l1_norm.into()]);
    }
    let gate = if args.k >= 3 {
        let step = rep.w.windows(2).map(|w| w[1] / w[0]).fold(f64::INFINITY, f64::min);
        Gate::new("smallest ratio of successive W values", step, ">", 1.0)
    } else {
        Gate::new("max/min of W", spread(&rep.w), "<", args.max_spread)
    };
    Ok(Outcome { table, gates: vec![gate], note: String::new() })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CovarianceKind {
    Dilation,
    Rotation,
}

#[derive(Args, Debug)]
pub struct CovarianceArgs {
    #[arg(long, value_enum, default_value = "dilation")]
    pub kind: CovarianceKind,
    #[arg(long, default_value_t = 10)]
    pub pairs: usize,
    #[arg(long, default_value_t = 1e-4)]
    pub tol: f64,
}

/// Seeded pairs with coordinates in [−1.5, 1.5] at Grushin distance ≥ 0.3.
fn random_pairs(dims: Dimensions, count: usize, seed: u64) -> Vec<(GrushinPoint, GrushinPoint)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let mut draw = || {
            let c: Vec<f64> = (0..dims.total()).map(|_| rng.gen_range(-1.5..1.5)).collect();
            GrushinPoint::from_slice(&c, dims.n).expect("valid split")
        };
        let (x, y) = (draw(), draw());
        if grushin_distance(&x, &y) >= 0.3 {
            out.push((x, y));
        }
    }
    out
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

pub fn covariance_check(cfg: &RunConfig, args: &CovarianceArgs) -> Result<Outcome> {
    let q = cfg.quadrature();
    let kernel = |alpha: &GrushinMultiIndex, a: &Drift, x: &GrushinPoint, y: &GrushinPoint| -> Result<f64> {
        let mut req = RieszKernelRequest::new(alpha.clone(), a.clone(), x.clone(), y.clone());
        req.q = q;
        Ok(grushin::riesz_kernel(&req)?)
    };
    let mut worst = 0.0f64;
    let table = match args.kind {
        CovarianceKind::Dilation => {
            let dims = cfg.dims()?;
            let qd = dims.q() as i32;
            let e1 = Drift::along_e1(dims.n, 1.0);
            let mut t = Table::new("dilation covariance of Riesz kernels", &["pair", "x", "y", "k", "s", "lhs", "rhs", "rel_err"]);
            for (i, (x, y)) in random_pairs(dims, args.pairs, cfg.seed).iter().enumerate() {
                for k in 1..=2 {
                    let alpha = GrushinMultiIndex::prime(dims, 0, k);
                    for s in [0.5, 2.0] {
                        let lhs = kernel(&alpha, &Drift::along_e1(dims.n, s), x, y)?;
                        let rhs = s.powi(qd) * kernel(&alpha, &e1, &dilate(x, s)?, &dilate(y, s)?)?;
                        let err = rel(rhs, lhs);
                        worst = worst.max(err);
                        t.push(vec![i.into(), coords(x).into(), coords(y).into(), k.into(), s.into(), lhs.into(), rhs.into(), err.into()]);
                    }
                }
            }
            t
        }
        CovarianceKind::Rotation => {
            let dims = Dimensions::new(cfg.n.max(2), cfg.m)?;
            let mut av = vec![0.0; dims.n];
            av[0] = 0.8;
            av[1] = -0.5;
            let a = Drift::new(av);
            let rot = Orthogonal::givens(dims.n, 0, 1, 0.7);
            let ra = Drift::new(rot.apply(&a.a));
            let mut t = Table::new("first-order rotation covariance of Riesz kernels", &["pair", "x", "y", "j", "lhs", "rhs", "rel_err"]);
            for (i, (x, y)) in random_pairs(dims, args.pairs, cfg.seed).iter().enumerate() {
                let (rx, ry) = (rotate(x, &rot)?, rotate(y, &rot)?);
                for j in 0..dims.n {
                    let lhs = kernel(&GrushinMultiIndex::prime(dims, j, 1), &a, x, y)?;
                    let mut rhs = 0.0;
                    for l in 0..dims.n {
                        rhs += rot.get(l, j) * kernel(&GrushinMultiIndex::prime(dims, l, 1), &ra, &rx, &ry)?;
                    }
                    let err = rel(rhs, lhs);
                    worst = worst.max(err);
                    t.push(vec![i.into(), coords(x).into(), coords(y).into(), j.into(), lhs.into(), rhs.into(), err.into()]);
                }
            }
            t
        }
    };
    let gates = vec![Gate::new("max relative covariance error", worst, "<", args.tol)];
    Ok(Outcome { table, gates, note: String::new() })
}

#[derive(Args, Debug)]
pub struct TransferenceArgs {
    #[arg(long, default_value_t = 20)]
    pub instances: usize,
    /// Relative slack allowed above the bound.
    #[arg(long, default_value_t = 1e-2)]
    pub slack: f64,
    /// Drift magnitude along e₁.
    #[arg(long, default_value_t = 1.0)]
    pub a: f64,
    #[arg(long, default_value_t = 64)]
    pub points: usize,
}

pub fn transference_check(cfg: &RunConfig, args: &TransferenceArgs) -> Result<Outcome> {
    let dims = cfg.dims()?;
    let grid = Grid::uniform(dims, -5.0, 5.0, args.points)?;
    let a = Drift::along_e1(dims.n, args.a);
    let axes = dims.n * dims.m + dims.n + dims.m;
    // v-steps are whole multiples of the x′ spacing
    let hv = 2.0 * grid.spacing[0];
    let mut origin = vec![-0.3; axes];
    let mut spacing = vec![0.3; axes];
    for j in 0..dims.n {
        origin[dims.n * dims.m + j] = -hv;
        spacing[dims.n * dims.m + j] = hv;
    }
    let cells = 3usize.pow(axes as u32);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut table = Table::new("Minkowski bound for transference operators", &["instance", "p", "norm_tf", "bound", "ratio"]);
    let mut worst = 0.0f64;
    for i in 0..args.instances {
        let values: Vec<f64> = (0..cells).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let k = GroupKernel::new(dims, origin.clone(), spacing.clone(), vec![3; axes], values)?;
        let centre: Vec<f64> = (0..dims.total()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let w = rng.gen_range(0.4..1.0);
        let f = SampledFunction::from_fn(grid.clone(), |p| {
            let r2: f64 = p.to_vec().iter().zip(&centre).map(|(x, c)| (x - c) * (x - c)).sum();
            (-r2 / (2.0 * w * w)).exp()
        });
        let tf = transference_apply(&k, &f)?;
        for p in [1.0, 2.0] {
            let lhs = lp_norm(&tf, p, &a)?;
            let bound = k.weighted_l1(p, &a)? * lp_norm(&f, p, &a)?;
            worst = worst.max(lhs / bound);
            table.push(vec![i.into(), p.into(), lhs.into(), bound.into(), (lhs / bound).into()]);
        }
    }
    let gates = vec![Gate::new("largest ‖Tf‖/bound", worst, "<=", 1.0 + args.slack)];
    Ok(Outcome { table, gates, note: String::new() })
}
