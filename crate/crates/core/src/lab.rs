//! Weighted norms of sampled functions, empirical operator-norm sweeps, the
//! weak-(1,1) blow-up experiment and the Gaussian-bound fit.

use crate::error::{invalid, Result};
use crate::euclid::scaled_conjugated_riesz_at;
use crate::geometry::{ball_volume_lebesgue_ref, grushin_distance};
use crate::grid::{Grid, SampledFunction};
use crate::heat::{heat_kernel, QuadratureSpec};
use crate::riesz::RieszOperator;
use crate::space::{dilate, Dimensions, Drift, GrushinMultiIndex, GrushinPoint};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub const WEAK_LEVELS: usize = 64;

fn weights(f: &SampledFunction, a: &Drift) -> Result<Vec<f64>> {
    let g = &f.grid;
    if a.a.len() != g.dims.n {
        return invalid("drift dimension does not match the grid");
    }
    let cell = g.cell_volume();
    Ok((0..g.len()).map(|i| (2.0 * a.dot(&g.prime_coords(i / g.dprime_len()))).exp() * cell).collect())
}

/// (Σ |f|^p e^{2a·y′} cell)^{1/p} over valid cells.
pub fn lp_norm(f: &SampledFunction, p: f64, a: &Drift) -> Result<f64> {
    if !(p >= 1.0) {
        return invalid("p must be at least 1");
    }
    let w = weights(f, a)?;
    let sum: f64 = (0..f.values.len()).filter(|&i| f.valid[i]).map(|i| f.values[i].abs().powf(p) * w[i]).sum();
    Ok(sum.powf(1.0 / p))
}

/// sup_s s·μ_a{|f| > s} over [`WEAK_LEVELS`] geometric levels.
pub fn weak_quasinorm(f: &SampledFunction, a: &Drift) -> Result<f64> {
    weak_quasinorm_levels(f, a, WEAK_LEVELS)
}

/// sup_s s·μ_a{|f| > s} over `levels` geometric levels between max|f| and
/// the smallest level that could still beat the top one.
///
/// A level s contributes at most s·μ_a(supp f), so levels below
/// max|f|·μ_a{|f| = max|f|}/μ_a(supp f) are skipped. Each level is read as a
/// left limit, μ_a{|f| ≥ s}. Every coarse interval that could still hold a
/// larger product gets a second pass of `levels` geometric levels.
pub fn weak_quasinorm_levels(f: &SampledFunction, a: &Drift, levels: usize) -> Result<f64> {
    if levels < 2 {
        return invalid("at least two levels are needed");
    }
    let w = weights(f, a)?;
    let mut pts: Vec<(f64, f64)> =
        (0..f.values.len()).filter(|&i| f.valid[i] && f.values[i] != 0.0).map(|i| (f.values[i].abs(), w[i])).collect();
    if pts.is_empty() {
        return Ok(0.0);
    }
    pts.sort_by(|x, y| y.0.total_cmp(&x.0));
    let top = pts[0].0;
    let support: f64 = pts.iter().map(|p| p.1).sum();
    let at_top: f64 = pts.iter().take_while(|p| p.0 >= top).map(|p| p.1).sum();
    let bottom = pts.last().unwrap().0.max(top * at_top / support);
    if bottom >= top {
        return Ok(top * at_top);
    }
    let coarse = sweep(&pts, top, bottom, levels);
    let mut best = coarse.iter().map(|(s, m)| s * m).fold(0.0, f64::max);
    for w in coarse.windows(2) {
        // inside (s_{i+1}, s_i) the product is at most s_i·μ{|f| ≥ s_{i+1}}
        if w[0].0 * w[1].1 > best {
            let fine = sweep(&pts, w[0].0, w[1].0, levels);
            best = fine.iter().map(|(s, m)| s * m).fold(best, f64::max);
        }
    }
    Ok(best)
}

/// Levels s from `hi` down to `lo`, geometric, paired with μ{|f| ≥ s}.
fn sweep(pts: &[(f64, f64)], hi: f64, lo: f64, levels: usize) -> Vec<(f64, f64)> {
    let ratio = (lo / hi).powf(1.0 / (levels - 1) as f64);
    let mut out = Vec::with_capacity(levels);
    let mut mass = 0.0;
    let mut j = 0;
    for i in 0..levels {
        let s = if i + 1 == levels { lo } else { hi * ratio.powi(i as i32) };
        while j < pts.len() && pts[j].0 >= s {
            mass += pts[j].1;
            j += 1;
        }
        out.push((s, mass));
    }
    out
}

/// Test functions for norm sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    /// Fixed profiles on the base grid for every drift.
    Standard,
    /// Profiles pulled back by δ_{|a|} onto the grid dilated by 1/|a|.
    DilationMatched,
}

/// Profiles: Gaussians of width `width` centred at ±2e₁′ and the centred
/// Gaussian pulled back by δ_s, s ∈ {0.5, 1, 2}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilySpec {
    pub family: Family,
    pub width: f64,
    pub base_points: Vec<usize>,
    pub lo: f64,
    pub hi: f64,
}

impl FamilySpec {
    pub fn new(family: Family) -> Self {
        Self { family, width: 0.4, base_points: vec![40, 52, 64], lo: -6.0, hi: 6.0 }
    }

    fn profiles(&self, grid: &Grid) -> Vec<SampledFunction> {
        let w2 = 2.0 * self.width * self.width;
        let gauss = |p: &GrushinPoint| (-(p.x_prime.iter().chain(&p.x_dprime).map(|c| c * c).sum::<f64>()) / w2).exp();
        let mut out = Vec::new();
        for shift in [-2.0, 2.0] {
            out.push(SampledFunction::from_fn(grid.clone(), |p| {
                let mut q = p.clone();
                q.x_prime[0] -= shift;
                gauss(&q)
            }));
        }
        for s in [0.5, 1.0, 2.0] {
            out.push(SampledFunction::from_fn(grid.clone(), |p| gauss(&dilate(p, s).expect("positive scale"))));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefinementLevel {
    pub points: usize,
    pub estimates: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    pub p: f64,
    pub drift_magnitudes: Vec<f64>,
    /// Per drift, the largest ‖Rf‖/‖f‖ over the family on the finest grid.
    pub estimates: Vec<f64>,
    pub family: FamilySpec,
    pub levels: Vec<RefinementLevel>,
}

impl NormReport {
    /// max/min of the estimates across drifts.
    pub fn spread(&self) -> f64 {
        spread(&self.estimates)
    }

    /// Per drift, max/min of the estimate across refinement levels.
    pub fn refinement_spread(&self) -> Vec<f64> {
        (0..self.drift_magnitudes.len())
            .map(|d| spread(&self.levels.iter().map(|l| l.estimates[d]).collect::<Vec<_>>()))
            .collect()
    }
}

fn spread(v: &[f64]) -> f64 {
    let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = v.iter().cloned().fold(0.0, f64::max);
    hi / lo
}

/// Largest ‖R_{α,a}f‖_p/‖f‖_p over one family on one grid.
fn family_estimate(alpha: &GrushinMultiIndex, p: f64, mag: f64, spec: &FamilySpec, points: usize, dims: Dimensions) -> Result<f64> {
    let base = Grid::uniform(dims, spec.lo, spec.hi, points)?;
    let grid = match spec.family {
        Family::Standard => base.clone(),
        Family::DilationMatched => base.dilated_inverse(mag)?,
    };
    let a = Drift::along_e1(dims.n, mag);
    let op = RieszOperator::new(&grid, alpha, &a)?;
    let mut best = 0.0f64;
    for prof in spec.profiles(&base) {
        let f = prof.relabel(grid.clone())?;
        let rf = op.apply(&f)?;
        best = best.max(lp_norm(&rf, p, &a)? / lp_norm(&f, p, &a)?);
    }
    Ok(best)
}

/// Empirical lower bounds for ‖R_{α,a}‖_{p→p} along a = |a|e₁.
pub fn norm_sweep(alpha: &GrushinMultiIndex, p: f64, drift_magnitudes: &[f64], family: &FamilySpec) -> Result<NormReport> {
    if !(p > 1.0) {
        return invalid("p must exceed 1");
    }
    if drift_magnitudes.is_empty() || drift_magnitudes.iter().any(|m| !(*m > 0.0)) {
        return invalid("drift magnitudes must be positive");
    }
    if family.base_points.is_empty() {
        return invalid("at least one refinement level is needed");
    }
    let dims = Dimensions::new(alpha.alpha_prime.len(), alpha.alpha_dprime.len() / alpha.alpha_prime.len().max(1))?;
    alpha.check(dims)?;
    let mut levels = Vec::new();
    for &points in &family.base_points {
        let estimates = drift_magnitudes
            .iter()
            .map(|&mag| family_estimate(alpha, p, mag, family, points, dims))
            .collect::<Result<Vec<_>>>()?;
        levels.push(RefinementLevel { points, estimates });
    }
    let estimates = levels.last().unwrap().estimates.clone();
    Ok(NormReport { p, drift_magnitudes: drift_magnitudes.to_vec(), estimates, family: family.clone(), levels })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlowupReport {
    pub k: u32,
    pub r_list: Vec<f64>,
    /// W_k(R) = weak_quasinorm(T_R f)/‖f‖_{L¹(μ_{e₁})}.
    pub w: Vec<f64>,
    pub l1_norm: f64,
    pub bump_width: f64,
}

impl BlowupReport {
    pub fn increasing(&self) -> bool {
        self.w.windows(2).all(|p| p[1] > p[0])
    }

    pub fn spread(&self) -> f64 {
        spread(&self.w)
    }
}

/// W_k(R) for the rescaled transforms T_R = (Λ_R U) ∂^k_{x′₁}(G_{e₁/R})^{−k/2} (Λ_R U)^{−1}
/// applied to a narrow Gaussian bump at the origin of `grid`.
pub fn weak11_blowup_experiment(k: u32, r_list: &[f64], grid: &Grid, bump_width: f64) -> Result<BlowupReport> {
    if k == 0 {
        return invalid("k must be positive");
    }
    if r_list.is_empty() || r_list.iter().any(|r| !(*r > 0.0)) || r_list.windows(2).any(|w| w[1] >= w[0]) {
        return invalid("R values must be positive and strictly decreasing");
    }
    if !(bump_width > 0.0) {
        return invalid("bump width must be positive");
    }
    let dims = grid.dims;
    let mut xi = vec![0.0; dims.total()];
    xi[0] = 1.0;
    xi[dims.n] = 1.0;
    let xi = GrushinPoint::from_slice(&xi, dims.n)?;
    let w2 = 2.0 * bump_width * bump_width;
    let f = SampledFunction::from_fn(grid.clone(), |p| (-(p.to_vec().iter().map(|c| c * c).sum::<f64>()) / w2).exp());
    let e1 = Drift::along_e1(dims.n, 1.0);
    let l1 = lp_norm(&f, 1.0, &e1)?;
    let w = r_list
        .iter()
        .map(|&r| Ok(weak_quasinorm(&scaled_conjugated_riesz_at(&f, k, &xi, r)?, &e1)? / l1))
        .collect::<Result<Vec<_>>>()?;
    Ok(BlowupReport { k, r_list: r_list.to_vec(), w, l1_norm: l1, bump_width })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianSample {
    pub t: f64,
    pub x: GrushinPoint,
    pub y: GrushinPoint,
    pub heat: f64,
    /// |B(x, √t)| (reference volume).
    pub volume: f64,
    pub d2_over_t: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianFit {
    pub c: f64,
    pub b: f64,
    /// C at b = 0.
    pub c0: f64,
    pub samples: Vec<GaussianSample>,
}

impl GaussianFit {
    /// Largest value of H·|B|·e^{b d²/t}/C over the samples; ≤ 1 when the bound holds.
    pub fn worst_ratio(&self) -> f64 {
        self.samples.iter().map(|s| s.heat * s.volume * (self.b * s.d2_over_t).exp() / self.c).fold(0.0, f64::max)
    }
}

/// Draws `pairs` point pairs, cycling through `t_values`; each point is
/// uniform in [−2, 2]^{n+m} and then dilated by δ_{√t}, so that d²/t has the
/// same spread for every t.
pub fn gaussian_bound_samples(dims: Dimensions, t_values: &[f64], pairs: usize, seed: u64, q: &QuadratureSpec) -> Result<Vec<GaussianSample>> {
    if t_values.is_empty() || t_values.iter().any(|t| !(*t > 0.0)) {
        return invalid("t values must be positive");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draws = Vec::with_capacity(pairs);
    for i in 0..pairs {
        let t = t_values[i % t_values.len()];
        let mut pt = || -> Result<GrushinPoint> {
            let c: Vec<f64> = (0..dims.total()).map(|_| rng.gen_range(-2.0..2.0)).collect();
            dilate(&GrushinPoint::from_slice(&c, dims.n)?, t.sqrt())
        };
        let (x, y) = (pt()?, pt()?);
        draws.push((t, x, y));
    }
    draws
        .into_par_iter()
        .map(|(t, x, y)| {
            let heat = heat_kernel(t, &x, &y, q)?.value;
            let volume = ball_volume_lebesgue_ref(&x, t.sqrt())?;
            let d = grushin_distance(&x, &y);
            Ok(GaussianSample { t, heat, volume, d2_over_t: d * d / t, x, y })
        })
        .collect()
}

/// Largest b on a 0.005-step grid in [0, 2] with C(b) ≤ 10·C(0), where
/// C(b) = max H_t(x,y)|B(x,√t)| e^{b d²/t} over the samples.
pub fn gaussian_bound_fit(samples: Vec<GaussianSample>) -> Result<GaussianFit> {
    if samples.is_empty() {
        return invalid("no samples");
    }
    let c_of = |b: f64| samples.iter().map(|s| s.heat.max(0.0) * s.volume * (b * s.d2_over_t).exp()).fold(0.0, f64::max);
    let c0 = c_of(0.0);
    let mut best = (c0, 0.0);
    for i in 1..=400 {
        let b = i as f64 * 0.005;
        let c = c_of(b);
        if c <= 10.0 * c0 {
            best = (c, b);
        }
    }
    Ok(GaussianFit { c: best.0, b: best.1, c0, samples })
}
