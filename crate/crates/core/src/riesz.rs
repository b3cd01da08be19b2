//! Riesz-transform kernels X^α G_a^{−k/2}(x, y), their regularized variants
//! X^α(δI + G_a)^{−k/2}(I + εG_a)^{−N}, and the operators on sampled
//! functions.
//!
//! Kernels are t-integrals of X^α H_{t,a}(x, y) computed after the substitution
//! t = e^u. Kernels here are densities with respect to dμ_a(y).

use crate::error::{invalid, Error, Result};
use crate::geometry::grushin_distance;
use crate::grid::{Grid, SampledFunction};
use crate::heat::{x_alpha_heat, DerivPlan, QuadratureSpec};
use crate::mehler::check_t;
use crate::quad::gl16;
use crate::space::{Dimensions, Drift, GrushinMultiIndex, GrushinPoint};
use crate::spectral::{apply_modes, mode_frequencies, ModeOperator};
use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

/// Below t = d(x,y)²/SKIP_RATIO the heat kernel is treated as zero.
pub const SKIP_RATIO: f64 = 460.0;
const MAX_EXTENSIONS: usize = 16;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RieszKernelRequest {
    pub alpha: GrushinMultiIndex,
    pub a: Drift,
    pub x: GrushinPoint,
    pub y: GrushinPoint,
    pub q: QuadratureSpec,
}

impl RieszKernelRequest {
    pub fn new(alpha: GrushinMultiIndex, a: Drift, x: GrushinPoint, y: GrushinPoint) -> Self {
        Self { alpha, a, x, y, q: QuadratureSpec::default() }
    }

    fn dims(&self) -> Dimensions {
        self.x.dims()
    }

    fn check(&self) -> Result<u32> {
        self.q.validate()?;
        let dims = self.dims();
        if self.y.dims() != dims {
            return invalid("x and y have different dimensions");
        }
        self.alpha.check(dims)?;
        if self.a.a.len() != dims.n {
            return invalid("drift dimension does not match the points");
        }
        let k = self.alpha.order();
        if k == 0 {
            return invalid("Riesz transforms need |α| ≥ 1");
        }
        Ok(k)
    }
}

/// ε, δ and the power N of the resolvent factor (I + εG_a)^{−N}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegularizationParams {
    pub eps: f64,
    pub delta: f64,
    pub n: u32,
}

impl RegularizationParams {
    /// N = ⌈Q/2⌉ + 1.
    pub fn new(eps: f64, delta: f64, dims: Dimensions) -> Result<Self> {
        let p = Self { eps, delta, n: (dims.q() as u32).div_ceil(2) + 1 };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0 && self.eps < 1.0) || !(self.delta > 0.0 && self.delta < 1.0) {
            return invalid("ε and δ must lie in (0, 1)");
        }
        if self.n == 0 {
            return invalid("N must be positive");
        }
        Ok(())
    }
}

/// ∫₀ᵗ h^{N−1} e^{−h/ε} (t−h)^{k/2−1} e^{−δ(t−h)} dh.
///
/// With w = √(t−h) the integrand becomes 2(t−w²)^{N−1}e^{−(t−w²)/ε}w^{k−1}e^{−δw²},
/// smooth for every k ≥ 1. Only h ≤ ε(N+50) contributes.
fn b_inner(t: f64, p: &RegularizationParams, k: u32) -> f64 {
    let reach = p.eps * (p.n as f64 + 50.0);
    let w_lo = (t - reach).max(0.0).sqrt();
    let w_hi = t.sqrt();
    let nm1 = p.n as i32 - 1;
    let km1 = k as i32 - 1;
    let f = |w: f64| {
        let h = (t - w * w).max(0.0);
        2.0 * h.powi(nm1) * (-h / p.eps).exp() * w.powi(km1) * (-p.delta * w * w).exp()
    };
    crate::quad::composite(gl16(), w_lo, w_hi, 8, f)
}

/// B_{ε,δ,k}(t) = e^{−t} ∫₀ᵗ h^{N−1} e^{−h/ε} (t−h)^{k/2−1} e^{−δ(t−h)} dh.
pub fn b_eps_delta(t: f64, p: &RegularizationParams, k: u32) -> Result<f64> {
    check_t(t)?;
    p.validate()?;
    if k == 0 {
        return invalid("k must be positive");
    }
    Ok((-t).exp() * b_inner(t, p, k))
}

/// A kernel value with its error estimate and the integral of the absolute
/// integrand; value/abs_integral near 0 flags cancellation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RieszKernelValue {
    pub value: f64,
    pub est_error: f64,
    pub abs_integral: f64,
}

/// Weighted t-integral ∫ w(t) X^α H_{t,a}(x,y) dt with adaptive u-window.
fn t_integral(
    req: &RieszKernelRequest,
    weight: &(dyn Fn(f64) -> f64 + Sync),
    default_lo: f64,
    default_hi: f64,
) -> Result<RieszKernelValue> {
    let dims = req.dims();
    let plan = DerivPlan::new(&req.alpha, &req.a, dims.m)?;
    let q = &req.q;
    let d = grushin_distance(&req.x, &req.y);
    let lo0 = q.t_sub.u_lo.unwrap_or(default_lo);
    let hi0 = q.t_sub.u_hi.unwrap_or(default_hi);
    if !(lo0 < hi0) {
        return invalid("empty t-window");
    }
    let width = 16.0 / q.t_sub.u_nodes as f64;

    // One GL16 panel: (integral, ∫|g|, |g| at first node, |g| at last node, error)
    let panel = |a: f64| -> Result<(f64, f64, f64, f64, f64)> {
        let nodes: Vec<(f64, f64)> = gl16().mapped(a, a + width).collect();
        let vals: Vec<Result<(f64, f64)>> = nodes
            .par_iter()
            .map(|&(u, _)| {
                let t = u.exp();
                if d > 0.0 && d * d / t > SKIP_RATIO {
                    return Ok((0.0, 0.0));
                }
                let w = weight(t);
                if w == 0.0 {
                    return Ok((0.0, 0.0));
                }
                let (v, e, _) = x_alpha_heat(t, &plan, &req.x, &req.y, q)?;
                Ok((w * t * v, w * t * e))
            })
            .collect();
        let (mut s, mut sa, mut err) = (0.0, 0.0, 0.0);
        let mut g = Vec::with_capacity(16);
        for ((_, wq), r) in nodes.iter().zip(vals) {
            let (v, e) = r?;
            s += wq * v;
            sa += wq * v.abs();
            err += wq * e;
            g.push(v.abs());
        }
        Ok((s, sa, g[0], g[15], err))
    };

    let panels_in = |lo: f64, hi: f64| ((hi - lo) / width).ceil().max(1.0) as usize;
    let mut lo = lo0;
    let np = panels_in(lo0, hi0);
    let mut hi = lo0 + np as f64 * width;
    let mut total = 0.0;
    let mut total_abs = 0.0;
    let mut err = 0.0;
    let mut first_g = 0.0;
    let mut last_g = 0.0;
    for i in 0..np {
        let (s, sa, g0, g1, e) = panel(lo + i as f64 * width)?;
        total += s;
        total_abs += sa;
        err += e;
        if i == 0 {
            first_g = g0;
        }
        last_g = g1;
    }
    let ext_panels = panels_in(0.0, 2.0);
    for _ in 0..MAX_EXTENSIONS {
        let gate = q.rel_tol * 0.01 * total_abs;
        let (need_lo, need_hi) = (first_g > gate, last_g > gate);
        if !need_lo && !need_hi {
            break;
        }
        if need_lo {
            for i in 1..=ext_panels {
                let (s, sa, g0, _, e) = panel(lo - i as f64 * width)?;
                total += s;
                total_abs += sa;
                err += e;
                first_g = g0;
            }
            lo -= ext_panels as f64 * width;
        }
        if need_hi {
            for i in 0..ext_panels {
                let (s, sa, _, g1, e) = panel(hi + i as f64 * width)?;
                total += s;
                total_abs += sa;
                err += e;
                last_g = g1;
            }
            hi += ext_panels as f64 * width;
        }
    }
    let tails = (first_g + last_g) * width;
    if tails > q.rel_tol * total.abs() && tails > q.rel_tol * 0.01 * total_abs {
        return Err(Error::AccuracyNotMet { est_error: tails, tol: q.rel_tol * total.abs() });
    }
    Ok(RieszKernelValue { value: total, est_error: err + tails, abs_integral: total_abs })
}

fn default_hi(a: &Drift, shift: f64) -> f64 {
    (50.0 / (a.norm_sq() + shift).max(0.02)).ln()
}

/// R_{α,a}(x, y) = (1/Γ(k/2)) ∫₀^∞ t^{k/2−1} X^α H_{t,a}(x, y) dt.
pub fn riesz_kernel(req: &RieszKernelRequest) -> Result<f64> {
    Ok(riesz_kernel_value(req)?.value)
}

pub fn riesz_kernel_value(req: &RieszKernelRequest) -> Result<RieszKernelValue> {
    let k = req.check()?;
    if req.x == req.y {
        return Err(Error::DiagonalSingularity);
    }
    let q_dim = req.dims().q();
    if req.a.is_zero() && k as usize >= q_dim {
        return Err(Error::DivergentIntegral { k, q: q_dim });
    }
    let half = k as f64 / 2.0;
    let norm = 1.0 / gamma(half);
    let d = grushin_distance(&req.x, &req.y);
    let w = move |t: f64| norm * t.powf(half - 1.0);
    t_integral(req, &w, (1e-4 * d * d).ln(), default_hi(&req.a, 0.0))
}

/// Kernel of X^α(δI + G_a)^{−k/2}: weight t^{k/2−1}e^{−δt}/Γ(k/2).
pub fn shifted_riesz_kernel(req: &RieszKernelRequest, delta: f64) -> Result<f64> {
    let k = req.check()?;
    if req.x == req.y {
        return Err(Error::DiagonalSingularity);
    }
    if !(delta > 0.0) {
        return invalid("δ must be positive");
    }
    let half = k as f64 / 2.0;
    let norm = 1.0 / gamma(half);
    let d = grushin_distance(&req.x, &req.y);
    let w = move |t: f64| norm * t.powf(half - 1.0) * (-delta * t).exp();
    Ok(t_integral(req, &w, (1e-4 * d * d).ln(), default_hi(&req.a, delta))?.value)
}

/// Kernel of X^α(δI + G_a)^{−k/2}(I + εG_a)^{−N}, the t-integral of
/// X^α H_{t,a} against ε^{−N}/(Γ(N)Γ(k/2)) · e^{t} B_{ε,δ,k}(t).
pub fn regularized_riesz_kernel(req: &RieszKernelRequest, p: &RegularizationParams) -> Result<f64> {
    let k = req.check()?;
    p.validate()?;
    let q_dim = req.dims().q();
    if req.x == req.y && k as usize >= q_dim {
        return Err(Error::DiagonalSingularity);
    }
    let d = grushin_distance(&req.x, &req.y);
    // ε^{−N}/Γ(N) folded into the h-integral to keep it O(1)
    let norm = 1.0 / (gamma(p.n as f64) * gamma(k as f64 / 2.0));
    let scaled = RegularizationParams { eps: p.eps, delta: p.delta, n: p.n };
    let eps_n = p.eps.powi(p.n as i32);
    let w = move |t: f64| norm * b_inner(t, &scaled, k) / eps_n;
    let lo = if d > 0.0 { (1e-4 * (d * d).min(p.eps)).ln() } else { (1e-4 * p.eps).ln() };
    Ok(t_integral(req, &w, lo, default_hi(&req.a, p.delta))?.value)
}

/// (δ + s)^γ − s^γ.
pub fn scalar_multiplier_gap(gamma_exp: f64, delta: f64, s: f64) -> Result<f64> {
    if !(gamma_exp > 0.0 && gamma_exp < 1.0) || !(delta > 0.0 && delta < 1.0) {
        return invalid("γ and δ must lie in (0, 1)");
    }
    if !(s >= 0.0) {
        return invalid("s must be nonnegative");
    }
    Ok((delta + s).powf(gamma_exp) - s.powf(gamma_exp))
}

/// Eigen-decomposition of −∂² + |μ|²x² on one padded x′ axis.
struct AxisEigen {
    vectors: DMatrix<f64>,
    values: Vec<f64>,
}

/// Sinc differentiation matrices on `len` nodes with spacing `h`.
fn sinc_d1(len: usize, h: f64) -> DMatrix<f64> {
    DMatrix::from_fn(len, len, |i, j| {
        if i == j {
            0.0
        } else {
            let d = i as f64 - j as f64;
            let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
            sign / (d * h)
        }
    })
}

fn sinc_d2(len: usize, h: f64) -> DMatrix<f64> {
    DMatrix::from_fn(len, len, |i, j| {
        if i == j {
            -std::f64::consts::PI.powi(2) / (3.0 * h * h)
        } else {
            let d = i as f64 - j as f64;
            let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
            -2.0 * sign / (d * d * h * h)
        }
    })
}

/// One padded x′ axis.
#[derive(Clone)]
struct Axis {
    nodes: Vec<f64>,
    offset: usize,
    d1: DMatrix<f64>,
    neg_d2: DMatrix<f64>,
}

/// X^α G_a^{−k/2} on functions sampled on a fixed grid.
///
/// Each Fourier mode e^{iμ·x″} is mapped by X^α_μ (G_a^{(μ)})^{−k/2} where
/// G_a^{(μ)} = −Δ′ + |μ|²|x′|² − 2a·∇′ = e^{−a·x′}(−Δ′ + |μ|²|x′|² + |a|²)e^{a·x′}.
/// The bracket is a sum of one-dimensional oscillators, diagonalized per axis
/// on a zero-padded x′ grid with sinc differentiation.
pub struct RieszOperator {
    grid: Grid,
    alpha: GrushinMultiIndex,
    a: Drift,
    k: u32,
    axes: Vec<Axis>,
    eigen: Vec<Vec<AxisEigen>>,
    dprime_pad: usize,
}

impl RieszOperator {
    pub fn new(grid: &Grid, alpha: &GrushinMultiIndex, a: &Drift) -> Result<Self> {
        Self::with_padding(grid, alpha, a, 3, 3)
    }

    /// `prime_pad`, `dprime_pad`: zero-padding factors of the x′ and x″ blocks.
    pub fn with_padding(grid: &Grid, alpha: &GrushinMultiIndex, a: &Drift, prime_pad: usize, dprime_pad: usize) -> Result<Self> {
        let dims = grid.dims;
        alpha.check(dims)?;
        if a.a.len() != dims.n {
            return invalid("drift dimension does not match the grid");
        }
        if a.is_zero() {
            return invalid("apply_riesz needs a nonzero drift");
        }
        let k = alpha.order();
        if k == 0 {
            return invalid("Riesz transforms need |α| ≥ 1");
        }
        if prime_pad == 0 || dprime_pad == 0 {
            return invalid("padding factors must be positive");
        }
        DerivPlan::new(alpha, a, dims.m)?;
        let axes: Vec<Axis> = (0..dims.n)
            .map(|j| {
                let len = grid.shape[j] * prime_pad;
                let offset = (len - grid.shape[j]) / 2;
                let h = grid.spacing[j];
                let nodes = (0..len).map(|i| grid.origin[j] + (i as f64 - offset as f64) * h).collect();
                Axis { nodes, offset, d1: sinc_d1(len, h), neg_d2: -sinc_d2(len, h) }
            })
            .collect();
        let modes = mode_frequencies(grid, dprime_pad);
        let eigen = modes
            .par_iter()
            .map(|mu| {
                let mu2: f64 = mu.iter().map(|v| v * v).sum();
                axes.iter()
                    .map(|ax| {
                        let mut b = ax.neg_d2.clone();
                        for (i, x) in ax.nodes.iter().enumerate() {
                            b[(i, i)] += mu2 * x * x;
                        }
                        let e = SymmetricEigen::new(b);
                        AxisEigen { values: e.eigenvalues.iter().copied().collect(), vectors: e.eigenvectors }
                    })
                    .collect()
            })
            .collect();
        Ok(Self { grid: grid.clone(), alpha: alpha.clone(), a: a.clone(), k, axes, eigen, dprime_pad })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn apply(&self, f: &SampledFunction) -> Result<SampledFunction> {
        if f.grid != self.grid {
            return invalid("function grid differs from the operator grid");
        }
        Ok(apply_modes(f, self, self.dprime_pad))
    }

    fn padded_shape(&self) -> Vec<usize> {
        self.axes.iter().map(|a| a.nodes.len()).collect()
    }

    /// Applies a real matrix along one axis of a complex tensor.
    fn along(&self, v: &[C64], shape: &[usize], axis: usize, mat: &DMatrix<f64>, transpose: bool) -> Vec<C64> {
        let len = shape[axis];
        let stride: usize = shape[axis + 1..].iter().product();
        let mut out = vec![C64::new(0.0, 0.0); v.len()];
        let mut line = vec![C64::new(0.0, 0.0); len];
        for start in 0..v.len() {
            if (start / stride) % len != 0 {
                continue;
            }
            for i in 0..len {
                line[i] = v[start + i * stride];
            }
            for i in 0..len {
                let mut acc = C64::new(0.0, 0.0);
                for j in 0..len {
                    let m = if transpose { mat[(j, i)] } else { mat[(i, j)] };
                    acc += line[j] * m;
                }
                out[start + i * stride] = acc;
            }
        }
        out
    }
}

impl ModeOperator for RieszOperator {
    fn apply(&self, slot: usize, mu: &[f64], coef: &[C64]) -> Vec<C64> {
        let n = self.axes.len();
        let m = mu.len();
        let shape = self.padded_shape();
        let total: usize = shape.iter().product();
        let coords = |flat: usize| -> Vec<f64> {
            let mut rest = flat;
            let mut c = vec![0.0; n];
            for j in (0..n).rev() {
                c[j] = self.axes[j].nodes[rest % shape[j]];
                rest /= shape[j];
            }
            c
        };
        let inner_shape = &self.grid.shape[..n];
        let embed = |ip: usize| -> usize {
            let mut rest = ip;
            let mut idx = vec![0; n];
            for j in (0..n).rev() {
                idx[j] = rest % inner_shape[j] + self.axes[j].offset;
                rest /= inner_shape[j];
            }
            idx.iter().zip(&shape).fold(0, |acc, (&i, &s)| acc * s + i)
        };

        // w = e^{a·x′} c on the padded block
        let mut v = vec![C64::new(0.0, 0.0); total];
        for (ip, c) in coef.iter().enumerate() {
            let e = embed(ip);
            v[e] = c * self.a.dot(&coords(e)).exp();
        }
        // (B + |a|²)^{−k/2} in the product eigenbasis
        let eig = &self.eigen[slot];
        for (j, ax) in eig.iter().enumerate() {
            v = self.along(&v, &shape, j, &ax.vectors, true);
        }
        let a2 = self.a.norm_sq();
        let power = -(self.k as f64) / 2.0;
        for (flat, val) in v.iter_mut().enumerate() {
            let mut rest = flat;
            let mut lam = a2;
            for j in (0..n).rev() {
                lam += eig[j].values[rest % shape[j]];
                rest /= shape[j];
            }
            *val *= lam.max(f64::MIN_POSITIVE).powf(power);
        }
        for (j, ax) in eig.iter().enumerate() {
            v = self.along(&v, &shape, j, &ax.vectors, false);
        }
        // X″ factors: (iμ_k x′_j)^{α″_{jk}}
        let beta = self.alpha.xprime_powers(m);
        let gamma_k = self.alpha.lambda_powers(m);
        let mu_factor = gamma_k.iter().zip(mu).fold(C64::new(1.0, 0.0), |acc, (&g, &u)| acc * C64::new(0.0, u).powi(g as i32));
        if beta.iter().any(|&b| b > 0) || mu_factor != C64::new(1.0, 0.0) {
            for (flat, val) in v.iter_mut().enumerate() {
                let c = coords(flat);
                let xb: f64 = c.iter().zip(&beta).map(|(x, &b)| x.powi(b as i32)).product();
                *val *= mu_factor * xb;
            }
        }
        // X′ factors on e^{−a·x′}v: e^{−a·x′}(∂_j − a_j)^{α′_j} v
        for j in 0..n {
            for _ in 0..self.alpha.alpha_prime[j] {
                let dv = self.along(&v, &shape, j, &self.axes[j].d1, false);
                let aj = self.a.a[j];
                v = dv.iter().zip(&v).map(|(d, x)| d - x * aj).collect();
            }
        }
        (0..coef.len())
            .map(|ip| {
                let e = embed(ip);
                v[e] * (-self.a.dot(&coords(e))).exp()
            })
            .collect()
    }
}

/// R_{α,a} f on f's grid.
pub fn apply_riesz(f: &SampledFunction, alpha: &GrushinMultiIndex, a: &Drift, q: &QuadratureSpec) -> Result<SampledFunction> {
    q.validate()?;
    RieszOperator::new(&f.grid, alpha, a)?.apply(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn b_weight_closed_form_for_n1_k2() {
        let p = RegularizationParams { eps: 0.1, delta: 0.3, n: 1 };
        for &t in &[0.01, 0.5, 2.0, 10.0] {
            let got = b_eps_delta(t, &p, 2).unwrap();
            let want = (-t).exp() * ((-p.delta * t).exp() - (-t / p.eps).exp()) / (1.0 / p.eps - p.delta);
            assert!((got / want - 1.0).abs() < 1e-8, "t={t}: {got} vs {want}");
        }
    }

    #[test]
    fn gap_at_zero_is_delta_power() {
        assert_eq!(scalar_multiplier_gap(0.5, 0.01, 0.0).unwrap(), 0.01f64.powf(0.5));
    }

    #[test]
    fn sinc_second_derivative_is_symmetric() {
        let d = sinc_d2(9, 0.3);
        assert_eq!(d.clone(), d.transpose());
    }
}
