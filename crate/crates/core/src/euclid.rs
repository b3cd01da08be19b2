//! The Euclidean drifted Riesz transform ∂^k_{x′₁}(Δ_{e₁})^{−k/2} with
//! Δ_{e₁} = −Δ − 2∂_{x′₁}, and the rescaled Grushin transforms that converge
//! to it as R → 0.

use crate::error::{invalid, Result};
use crate::grid::{Grid, SampledFunction};
use crate::heat::QuadratureSpec;
use crate::riesz::RieszOperator;
use crate::space::{Dimensions, Drift, GrushinMultiIndex, GrushinPoint};
use crate::spectral::{angular_frequency, fft_nd};
use num_complex::Complex64 as C64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriftLimitConfig {
    pub k: u32,
    pub r_list: Vec<f64>,
    pub xi: GrushinPoint,
    pub probe_points: Vec<GrushinPoint>,
}

impl DriftLimitConfig {
    /// ξ = (e₁, e₁), R = 1, 1/2, 1/4, probes at the origin and at ±h
    /// along x′₁ and x″₁ (h the node spacing of `grid`, within 0.5 of 0).
    pub fn new(k: u32, grid: &Grid) -> Result<Self> {
        let dims = grid.dims;
        let mut xp = vec![0.0; dims.n];
        let mut xpp = vec![0.0; dims.m];
        xp[0] = 1.0;
        xpp[0] = 1.0;
        let xi = GrushinPoint::new(xp, xpp)?;
        let h0 = grid.spacing[0] * (0.375 / grid.spacing[0]).floor().max(1.0);
        let h1 = grid.spacing[dims.n] * (0.375 / grid.spacing[dims.n]).floor().max(1.0);
        let mut probe_points = vec![GrushinPoint::origin(dims)];
        for (axis, h) in [(0, h0), (dims.n, h1)] {
            for sign in [-1.0, 1.0] {
                let mut c = vec![0.0; dims.total()];
                c[axis] = sign * h;
                probe_points.push(GrushinPoint::from_slice(&c, dims.n)?);
            }
        }
        let cfg = Self { k, r_list: vec![1.0, 0.5, 0.25], xi, probe_points };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return invalid("k must be positive");
        }
        if self.r_list.is_empty() || self.r_list.iter().any(|r| !(*r > 0.0)) {
            return invalid("R values must be positive");
        }
        if self.r_list.windows(2).any(|w| w[1] >= w[0]) {
            return invalid("R values must be strictly decreasing");
        }
        let unit = |v: &[f64]| (v.iter().map(|c| c * c).sum::<f64>().sqrt() - 1.0).abs() <= 1e-12;
        if !unit(&self.xi.x_prime) || !unit(&self.xi.x_dprime) {
            return invalid("ξ′ and ξ″ must be unit vectors");
        }
        let dims = self.xi.dims();
        if self.probe_points.iter().any(|p| p.dims() != dims) {
            return invalid("probe points must match ξ's dimensions");
        }
        Ok(())
    }

    pub fn dims(&self) -> Dimensions {
        self.xi.dims()
    }
}

/// Complex result before the real part is taken; used to check conjugate symmetry.
pub(crate) fn euclid_drift_riesz_complex(f: &SampledFunction, k: u32) -> Result<Vec<C64>> {
    if k == 0 {
        return invalid("k must be positive");
    }
    let g = &f.grid;
    if g.shape.iter().any(|&s| s < 2) {
        return invalid("every axis needs at least two nodes");
    }
    // odd padded lengths leave no Nyquist mode, so the multiplier is exactly
    // conjugate-symmetric
    let padded: Vec<usize> = g.shape.iter().map(|s| 2 * s + 1).collect();
    let total: usize = padded.iter().product();
    let embed = |flat: usize| {
        let idx = g.unravel(flat);
        idx.iter().zip(&padded).fold(0, |acc, (&i, &p)| acc * p + i)
    };
    let mut buf = vec![C64::new(0.0, 0.0); total];
    for i in 0..g.len() {
        let v = f.values[i];
        if v.is_finite() {
            buf[embed(i)] = C64::new(v * g.coord(0, g.unravel(i)[0]).exp(), 0.0);
        }
    }
    let mut planner = FftPlanner::new();
    fft_nd(&mut planner, &mut buf, &padded, false);
    let d = padded.len();
    let mut idx = vec![0usize; d];
    for (flat, val) in buf.iter_mut().enumerate() {
        let mut rest = flat;
        for ax in (0..d).rev() {
            idx[ax] = rest % padded[ax];
            rest /= padded[ax];
        }
        let om: Vec<f64> = (0..d).map(|ax| angular_frequency(idx[ax], padded[ax], g.spacing[ax])).collect();
        let w2: f64 = om.iter().map(|w| w * w).sum();
        let mult = C64::new(-1.0, om[0]).powi(k as i32) * (1.0 + w2).powf(-(k as f64) / 2.0);
        *val *= mult / total as f64;
    }
    fft_nd(&mut planner, &mut buf, &padded, true);
    Ok((0..g.len()).map(|i| buf[embed(i)] * (-g.coord(0, g.unravel(i)[0])).exp()).collect())
}

/// ∂^k_{x′₁}(Δ_{e₁})^{−k/2} f = e^{−x′₁} F⁻¹[(−1+2πiλ′₁)^k (1+4π²|λ|²)^{−k/2} F[e^{y′₁} f]].
pub fn euclid_drift_riesz(f: &SampledFunction, k: u32) -> Result<SampledFunction> {
    let out = euclid_drift_riesz_complex(f, k)?;
    SampledFunction::new(f.grid.clone(), out.iter().map(|c| c.re).collect())
}

/// (Λ_R U) ∂^k_{x′₁}(G_{e₁/R})^{−k/2} (Λ_R U)^{−1} f on f's grid, where
/// U translates by ξ and Λ_R is the isotropic dilation by R.
///
/// The grid of f is carried to y = Rx + ξ, where g(y) = f((y − ξ)/R) has the
/// same node values, so the transform of g read at Rx + ξ lands on f's nodes.
pub fn scaled_conjugated_riesz(f: &SampledFunction, cfg: &DriftLimitConfig, r: f64, q: &QuadratureSpec) -> Result<SampledFunction> {
    cfg.validate()?;
    q.validate()?;
    if !cfg.r_list.contains(&r) {
        return invalid("R must be one of the configured values");
    }
    if f.grid.dims != cfg.dims() {
        return invalid("function and configuration dimensions differ");
    }
    scaled_conjugated_riesz_at(f, cfg.k, &cfg.xi, r)
}

pub(crate) fn scaled_conjugated_riesz_at(f: &SampledFunction, k: u32, xi: &GrushinPoint, r: f64) -> Result<SampledFunction> {
    let dims = f.grid.dims;
    let moved = f.grid.affine(r, xi)?;
    let g = f.relabel(moved.clone())?;
    let alpha = GrushinMultiIndex::prime(dims, 0, k);
    let a = Drift::along_e1(dims.n, 1.0 / r);
    RieszOperator::new(&moved, &alpha, &a)?.apply(&g)?.relabel(f.grid.clone())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriftLimitReport {
    pub k: u32,
    pub r_list: Vec<f64>,
    /// Largest |scaled − limit| over the probes, per R.
    pub sup_errors: Vec<f64>,
    /// Largest |limit| over the probes.
    pub limit_scale: f64,
}

impl DriftLimitReport {
    pub fn strictly_decreasing(&self) -> bool {
        self.sup_errors.windows(2).all(|w| w[1] < w[0])
    }
}

/// Probe errors of the rescaled transforms against the Euclidean limit.
pub fn drift_limit(f: &SampledFunction, cfg: &DriftLimitConfig, q: &QuadratureSpec) -> Result<DriftLimitReport> {
    let limit = euclid_drift_riesz(f, cfg.k)?;
    let probe = |h: &SampledFunction, p: &GrushinPoint| h.eval(p);
    let limit_scale = cfg.probe_points.iter().map(|p| probe(&limit, p).abs()).fold(0.0, f64::max);
    let mut sup_errors = Vec::with_capacity(cfg.r_list.len());
    for &r in &cfg.r_list {
        let scaled = scaled_conjugated_riesz(f, cfg, r, q)?;
        let err = cfg.probe_points.iter().map(|p| (probe(&scaled, p) - probe(&limit, p)).abs()).fold(0.0, f64::max);
        sup_errors.push(err);
    }
    Ok(DriftLimitReport { k: cfg.k, r_list: cfg.r_list.clone(), sup_errors, limit_scale })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian(n: usize) -> SampledFunction {
        let g = Grid::uniform(Dimensions::new(1, 1).unwrap(), -4.0, 4.0, n).unwrap();
        SampledFunction::from_fn(g, |p| (-(p.x_prime[0].powi(2) + p.x_dprime[0].powi(2))).exp())
    }

    #[test]
    fn output_is_real() {
        let f = gaussian(24);
        for k in 1..=3 {
            let out = euclid_drift_riesz_complex(&f, k).unwrap();
            let scale = out.iter().map(|c| c.norm()).fold(0.0, f64::max);
            assert!(out.iter().all(|c| c.im.abs() < 1e-10 * scale), "k={k}");
        }
    }
}
