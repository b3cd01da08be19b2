//! The Grushin heat kernel as a Fourier integral of Mehler kernels, its
//! drifted version, X^α derivatives, the operator G_a on grids, and the heat
//! semigroup applied to sampled functions.

use crate::error::{invalid, Error, Result};
use crate::grid::SampledFunction;
use crate::mehler::{check_t, prefactor_chain, MehlerCoeffs, MAX_ORDER};
use crate::quad::{gl16, GaussLegendre};
use crate::space::{Drift, GrushinMultiIndex, GrushinPoint};
use crate::spectral::{apply_modes, PrimeBlock, TableOperator};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Parameters of the log-substitution t = e^u used by every t-integral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TSub {
    /// Lower end of the u-window; `None` selects the kernel-specific default.
    pub u_lo: Option<f64>,
    /// Upper end of the u-window; `None` selects the kernel-specific default.
    pub u_hi: Option<f64>,
    /// Gauss–Legendre nodes per unit length of u.
    pub u_nodes: usize,
}

/// Truncations, node counts and tolerances for the kernel integrals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    /// Fixed λ-truncation radius. `None` starts from 40/√t and adapts the
    /// radius until the envelope at the cutoff is negligible.
    pub lam_max: Option<f64>,
    /// Minimum number of radial λ-nodes (multiples of 16 are used).
    pub lam_nodes: usize,
    pub t_sub: TSub,
    pub rel_tol: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { lam_max: None, lam_nodes: 128, t_sub: TSub { u_lo: None, u_hi: None, u_nodes: 16 }, rel_tol: 1e-8 }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if self.lam_nodes < 16 {
            return invalid("lam_nodes must be at least 16");
        }
        if let Some(l) = self.lam_max {
            if !(l > 0.0) {
                return invalid("lam_max must be positive");
            }
        }
        if let (Some(lo), Some(hi)) = (self.t_sub.u_lo, self.t_sub.u_hi) {
            if !(lo < hi) {
                return invalid("t-substitution window needs U_lo < U_hi");
            }
        }
        if self.t_sub.u_nodes == 0 {
            return invalid("u_nodes must be positive");
        }
        if !(self.rel_tol > 0.0 && self.rel_tol <= 1e-2) {
            return invalid("rel_tol must lie in (0, 1e-2]");
        }
        Ok(())
    }

    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }
}

/// A heat-kernel value with its error surrogate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeatKernelValue {
    pub t: f64,
    pub x: GrushinPoint,
    pub y: GrushinPoint,
    pub a: Drift,
    pub value: f64,
    pub est_error: f64,
}

/// Everything a multi-index α and a drift a contribute to the integrand of
/// X^α H_{t,a}, split per x′ coordinate.
#[derive(Debug, Clone)]
pub(crate) struct DerivPlan {
    /// X′ orders α′_j.
    pub alpha: Vec<usize>,
    /// Powers of x′_j inserted by X″.
    pub beta: Vec<usize>,
    /// Powers of λ_k inserted by X″.
    pub gamma: Vec<u32>,
    pub gamma_total: u32,
    pub a: Vec<f64>,
    binom: Vec<Vec<f64>>,
}

impl DerivPlan {
    pub fn new(alpha: &GrushinMultiIndex, a: &Drift, m: usize) -> Result<Self> {
        let n = alpha.alpha_prime.len();
        if a.a.len() != n || alpha.alpha_dprime.len() != n * m {
            return invalid("multi-index or drift does not match the dimensions");
        }
        let beta: Vec<usize> = alpha.xprime_powers(m).iter().map(|&b| b as usize).collect();
        let al: Vec<usize> = alpha.alpha_prime.iter().map(|&v| v as usize).collect();
        if al.iter().zip(&beta).any(|(x, y)| x + y > MAX_ORDER) {
            return invalid(format!("per-coordinate order above {MAX_ORDER} is not supported"));
        }
        let gamma = alpha.lambda_powers(m);
        let gamma_total = gamma.iter().sum();
        let top = MAX_ORDER + 1;
        let mut binom = vec![vec![0.0; top]; top];
        for i in 0..top {
            binom[i][0] = 1.0;
            for j in 1..=i {
                binom[i][j] = binom[i - 1][j - 1] + if j < i { binom[i - 1][j] } else { 0.0 };
            }
        }
        Ok(Self { alpha: al, beta, gamma, gamma_total, a: a.a.clone(), binom })
    }

    pub fn is_trivial(&self) -> bool {
        self.alpha.iter().all(|&v| v == 0) && self.beta.iter().all(|&v| v == 0)
    }

    /// Real x′-factor F with X′^α[x′^β e^{−a·x′} k] = e^{−a·x′} F k, plus a
    /// bound on |F| from the absolute values of its terms.
    ///
    /// The drift enters through the binomial product rule
    /// ∂^α(e^{−a x}g) = e^{−a x} Σ_i C(α,i)(−a)^{α−i} ∂^i g.
    #[inline]
    pub fn x_factor(&self, mc: &MehlerCoeffs, xp: &[f64], yp: &[f64]) -> (f64, f64) {
        let mut val = 1.0;
        let mut bound = 1.0;
        let mut chain = [0.0; MAX_ORDER + 1];
        for j in 0..xp.len() {
            let (al, be) = (self.alpha[j], self.beta[j]);
            if al == 0 && be == 0 {
                continue;
            }
            let x = xp[j];
            let l = mc.exponent_gradient(x, yp[j]);
            prefactor_chain(mc.c, l, al, &mut chain);
            let mut v = 0.0;
            let mut b = 0.0;
            for i in 0..=al {
                // ∂^i (x^β e^Q) = e^Q Σ_l C(i,l) β!/(β−l)! x^{β−l} p_{i−l}
                let mut di = 0.0;
                let mut dib = 0.0;
                let mut falling = 1.0;
                for ll in 0..=i.min(be) {
                    if ll > 0 {
                        falling *= (be - ll + 1) as f64;
                    }
                    let term = self.binom[i][ll] * falling * x.powi((be - ll) as i32) * chain[i - ll];
                    di += term;
                    dib += term.abs();
                }
                let coef = self.binom[al][i] * (-self.a[j]).powi((al - i) as i32);
                v += coef * di;
                b += coef.abs() * dib;
            }
            val *= v;
            bound *= b;
        }
        (val, bound)
    }
}

struct AngularRule {
    dirs: Vec<Vec<f64>>,
    weights: Vec<f64>,
}

impl AngularRule {
    fn new(m: usize, count: usize, gamma: &[u32]) -> Result<Self> {
        let mut dirs = Vec::new();
        let mut weights = Vec::new();
        match m {
            2 => {
                for i in 0..count {
                    let th = 2.0 * PI * i as f64 / count as f64;
                    dirs.push(vec![th.cos(), th.sin()]);
                    weights.push(2.0 * PI / count as f64);
                }
            }
            3 => {
                let zr = GaussLegendre::new(count.div_ceil(2).max(16));
                for (z, wz) in zr.nodes.iter().zip(&zr.weights) {
                    let r = (1.0 - z * z).sqrt();
                    for i in 0..count {
                        let ph = 2.0 * PI * i as f64 / count as f64;
                        dirs.push(vec![r * ph.cos(), r * ph.sin(), *z]);
                        weights.push(wz * 2.0 * PI / count as f64);
                    }
                }
            }
            _ => return invalid(format!("λ-quadrature supports m ≤ 3, got m = {m}")),
        }
        for (d, w) in dirs.iter().zip(weights.iter_mut()) {
            *w *= d.iter().zip(gamma).map(|(c, &g)| c.powi(g as i32)).product::<f64>();
        }
        Ok(Self { dirs, weights })
    }
}

/// J₀(z) as the trapezoid average of cos(z cos θ), exact to rounding once
/// the node count exceeds z by a margin.
fn bessel_j0(z: f64) -> f64 {
    let n = (z.abs().ceil() as usize + 24).next_multiple_of(4);
    let s: f64 = (0..n / 4)
        .map(|i| (z * (PI * (i as f64 + 0.5) / (n / 2) as f64).cos()).cos())
        .sum();
    s / (n / 4) as f64
}

/// Result of one λ-integral.
#[derive(Debug, Clone, Copy)]
pub(crate) struct LamIntegral {
    pub value: f64,
    pub tail: f64,
    pub imag: f64,
    /// ∫ |integrand| over the truncated range (scale for noise floors).
    pub abs_scale: f64,
}

/// (2π)^{−m} ∫ k_{t,|λ|}(x′,y′) F(x′,y′;λ) λ^γ (−i)^{|γ|} e^{−iλ·Δ″} dλ, without
/// the drift exponential e^{−|a|²t − a·(x′+y′)}.
pub(crate) fn lambda_integral(
    t: f64,
    xp: &[f64],
    yp: &[f64],
    delta: &[f64],
    plan: &DerivPlan,
    q: &QuadratureSpec,
    extend: bool,
) -> Result<LamIntegral> {
    if !(1..=3).contains(&delta.len()) {
        return invalid(format!("λ-quadrature supports m ≤ 3, got m = {}", delta.len()));
    }
    let m = delta.len();
    let g_tot = plan.gamma_total as i32;
    let radial = |rho: f64| -> (f64, f64) {
        match MehlerCoeffs::new(t, rho) {
            None => (0.0, 0.0),
            Some(mc) => {
                let k = mc.kernel(xp, yp);
                if k == 0.0 {
                    return (0.0, 0.0);
                }
                let (f, fb) = if plan.is_trivial() { (1.0, 1.0) } else { plan.x_factor(&mc, xp, yp) };
                let w = k * rho.powi(g_tot + m as i32 - 1);
                (w * f, w * fb)
            }
        }
    };

    let cutoff = match q.lam_max {
        Some(l) => l,
        None => {
            let rho0 = 40.0 / t.sqrt();
            let samples: Vec<(f64, f64)> = (-40..=40)
                .map(|j| {
                    let r = rho0 * 2f64.powf(j as f64 / 2.0);
                    (r, radial(r).1 * r)
                })
                .collect();
            let total: f64 = samples.iter().map(|s| s.1).sum::<f64>() * std::f64::consts::LN_2 / 2.0;
            if total == 0.0 || !total.is_finite() {
                return Ok(LamIntegral { value: 0.0, tail: 0.0, imag: 0.0, abs_scale: 0.0 });
            }
            let cut = q.rel_tol * 1e-3 * total;
            let mut idx = samples.len() - 1;
            while idx > 0 && samples[idx - 1].1 <= cut {
                idx -= 1;
            }
            // keep at least the peak of the envelope inside the range
            let peak = samples.iter().enumerate().fold(0, |b, (i, s)| if s.1 > samples[b].1 { i } else { b });
            samples[idx.max(peak + 1).min(samples.len() - 1)].0
        }
    };

    let dnorm = delta.iter().map(|d| d * d).sum::<f64>().sqrt();
    let norm = (2.0 * PI).powi(-(m as i32));
    let integrate = |cutoff: f64| -> Result<LamIntegral> {
        let mut panels = (q.lam_nodes.div_ceil(16)).max(1);
        if dnorm > 0.0 {
            panels = panels.max((cutoff * dnorm / (2.0 * PI)).ceil() as usize);
        }
        let panels = panels.min(200_000);
        let width = cutoff / panels as f64;
        let rule = gl16();

        let (mut re, mut im, mut abs) = (0.0, 0.0, 0.0);
        if m == 1 {
            // ∫_ℝ = 2∫₀^∞; (−i)^γ e^{−iλΔ} keeps cos for even γ and sin for odd γ.
            let d = delta[0];
            let (odd, sign) = match plan.gamma_total % 4 {
                0 => (false, 1.0),
                1 => (true, -1.0),
                2 => (false, -1.0),
                _ => (true, 1.0),
            };
            for p in 0..panels {
                for (rho, w) in rule.mapped(p as f64 * width, (p + 1) as f64 * width) {
                    let (v, b) = radial(rho);
                    if b == 0.0 {
                        continue;
                    }
                    let trig = if odd { (rho * d).sin() } else { (rho * d).cos() };
                    re += w * v * trig;
                    abs += w * b;
                }
            }
            re *= sign * 2.0;
            abs *= 2.0;
        } else if plan.gamma_total == 0 {
            // isotropic integrand: the angular integral depends on ρ|Δ″| only
            for p in 0..panels {
                for (rho, w) in rule.mapped(p as f64 * width, (p + 1) as f64 * width) {
                    let (v, b) = radial(rho);
                    if b == 0.0 {
                        continue;
                    }
                    let z = rho * dnorm;
                    let (ang, ang_abs) = if m == 2 {
                        (2.0 * PI * bessel_j0(z), 2.0 * PI)
                    } else {
                        (4.0 * PI * if z < 1e-8 { 1.0 } else { z.sin() / z }, 4.0 * PI)
                    };
                    re += w * v * ang;
                    abs += w * b * ang_abs;
                }
            }
        } else {
            let mut rules: Vec<(usize, AngularRule, f64)> = Vec::new();
            let phase = C64::new(0.0, -1.0).powi(g_tot);
            let mut acc = C64::new(0.0, 0.0);
            for p in 0..panels {
                for (rho, w) in rule.mapped(p as f64 * width, (p + 1) as f64 * width) {
                    let (v, b) = radial(rho);
                    if b == 0.0 {
                        continue;
                    }
                    let count = ((rho * dnorm).ceil() as usize + 20 + plan.gamma_total as usize).max(16).next_multiple_of(8);
                    let pos = match rules.iter().position(|r| r.0 == count) {
                        Some(i) => i,
                        None => {
                            let r = AngularRule::new(m, count, &plan.gamma)?;
                            let s = r.weights.iter().map(|x| x.abs()).sum();
                            rules.push((count, r, s));
                            rules.len() - 1
                        }
                    };
                    let (_, ang, ang_abs) = &rules[pos];
                    let mut s = C64::new(0.0, 0.0);
                    for (dir, aw) in ang.dirs.iter().zip(&ang.weights) {
                        let arg = -rho * dir.iter().zip(delta).map(|(a, b)| a * b).sum::<f64>();
                        s += C64::from_polar(*aw, arg);
                    }
                    acc += s * (w * v);
                    abs += w * b * ang_abs;
                }
            }
            acc *= phase;
            re = acc.re;
            im = acc.im;
        }
        let (_, env_cut) = radial(cutoff);
        // exponential decay beyond the cutoff: tail ≲ envelope·cutoff
        let tail = norm * env_cut * cutoff * 2.0 * if m == 1 { 1.0 } else { 4.0 * PI };
        Ok(LamIntegral { value: norm * re, tail, imag: norm * im.abs(), abs_scale: norm * abs })
    };

    let mut cutoff = cutoff;
    let mut out = integrate(cutoff)?;
    if extend && q.lam_max.is_none() {
        // Far from the diagonal the value is a small remainder of an
        // oscillatory integral, so the cutoff must move out further.
        for _ in 0..8 {
            let floor = (q.rel_tol * out.value.abs()).max(out.abs_scale * 1e-15);
            if out.tail <= floor {
                break;
            }
            cutoff *= 1.5;
            out = integrate(cutoff)?;
        }
    }
    Ok(out)
}

fn check_points(x: &GrushinPoint, y: &GrushinPoint) -> Result<()> {
    if x.dims() != y.dims() {
        return invalid("x and y have different dimensions");
    }
    Ok(())
}

fn drift_factor(t: f64, a: &Drift, x: &GrushinPoint, y: &GrushinPoint) -> f64 {
    (-a.norm_sq() * t - a.dot(&x.x_prime) - a.dot(&y.x_prime)).exp()
}

fn delta_dprime(x: &GrushinPoint, y: &GrushinPoint) -> Vec<f64> {
    x.x_dprime.iter().zip(&y.x_dprime).map(|(a, b)| a - b).collect()
}

fn finish(t: f64, a: &Drift, x: &GrushinPoint, y: &GrushinPoint, li: LamIntegral, q: &QuadratureSpec) -> Result<HeatKernelValue> {
    let f = drift_factor(t, a, x, y);
    let value = f * li.value;
    let quad = f * (li.tail + li.imag);
    // rounding floor of an oscillatory sum whose terms reach abs_scale
    let noise = f * li.abs_scale * 1e-14;
    if quad > q.rel_tol * value.abs() && quad > noise {
        return Err(Error::AccuracyNotMet { est_error: quad, tol: q.rel_tol * value.abs() });
    }
    let est_error = quad + noise;
    Ok(HeatKernelValue { t, x: x.clone(), y: y.clone(), a: a.clone(), value, est_error })
}

/// H_t(x, y) = (2π)^{−m} ∫ k_{t,|λ|}(x′,y′) e^{−iλ·(x″−y″)} dλ.
pub fn heat_kernel(t: f64, x: &GrushinPoint, y: &GrushinPoint, q: &QuadratureSpec) -> Result<HeatKernelValue> {
    heat_kernel_drift(t, &Drift::zero(x.x_prime.len()), x, y, q)
}

/// H_{t,a}(x, y) = e^{−|a|²t} e^{−a·(x′+y′)} H_t(x, y).
pub fn heat_kernel_drift(t: f64, a: &Drift, x: &GrushinPoint, y: &GrushinPoint, q: &QuadratureSpec) -> Result<HeatKernelValue> {
    check_t(t)?;
    q.validate()?;
    check_points(x, y)?;
    let dims = x.dims();
    let plan = DerivPlan::new(&GrushinMultiIndex::zero(dims), a, dims.m)?;
    let li = lambda_integral(t, &x.x_prime, &y.x_prime, &delta_dprime(x, y), &plan, q, true)?;
    finish(t, a, x, y, li, q)
}

/// (X^α H_{t,a})(x, y), derivatives acting on x.
pub fn heat_kernel_derivative(
    t: f64,
    a: &Drift,
    alpha: &GrushinMultiIndex,
    x: &GrushinPoint,
    y: &GrushinPoint,
    q: &QuadratureSpec,
) -> Result<f64> {
    check_t(t)?;
    q.validate()?;
    check_points(x, y)?;
    let dims = x.dims();
    alpha.check(dims)?;
    let plan = DerivPlan::new(alpha, a, dims.m)?;
    let li = lambda_integral(t, &x.x_prime, &y.x_prime, &delta_dprime(x, y), &plan, q, true)?;
    Ok(finish(t, a, x, y, li, q)?.value)
}

/// X^α H_{t,a}(x,y) with its error surrogate, never failing on accuracy.
pub(crate) fn x_alpha_heat(t: f64, plan: &DerivPlan, x: &GrushinPoint, y: &GrushinPoint, q: &QuadratureSpec) -> Result<(f64, f64, f64)> {
    let li = lambda_integral(t, &x.x_prime, &y.x_prime, &delta_dprime(x, y), plan, q, false)?;
    let a = Drift::new(plan.a.clone());
    let f = drift_factor(t, &a, x, y);
    Ok((f * li.value, f * (li.tail + li.imag), f * li.abs_scale))
}

/// −Δ_{x′}f − |x′|²Δ_{x″}f − 2a·∇_{x′}f by second-order central differences.
/// The outermost layer of cells is marked invalid.
pub fn grushin_apply(f: &SampledFunction, a: &Drift) -> Result<SampledFunction> {
    let g = &f.grid;
    let n = g.dims.n;
    if a.a.len() != n {
        return invalid("drift dimension does not match the grid");
    }
    if g.shape.iter().any(|&s| s < 7) {
        return invalid("grushin_apply needs at least 5 interior points per axis");
    }
    let d = g.shape.len();
    let strides: Vec<usize> = (0..d).map(|ax| g.shape[ax + 1..].iter().product()).collect();
    let mut out = SampledFunction::zeros(g.clone());
    for i in 0..g.len() {
        let idx = g.unravel(i);
        if idx.iter().zip(&g.shape).any(|(&j, &s)| j == 0 || j + 1 == s) {
            out.valid[i] = false;
            out.values[i] = f64::NAN;
            continue;
        }
        let xp: Vec<f64> = (0..n).map(|ax| g.coord(ax, idx[ax])).collect();
        let r2: f64 = xp.iter().map(|v| v * v).sum();
        let mut acc = 0.0;
        for ax in 0..d {
            let h = g.spacing[ax];
            let (lo, mid, hi) = (f.values[i - strides[ax]], f.values[i], f.values[i + strides[ax]]);
            let lap = (lo - 2.0 * mid + hi) / (h * h);
            if ax < n {
                acc -= lap;
                acc -= 2.0 * a.a[ax] * (hi - lo) / (2.0 * h);
            } else {
                acc -= r2 * lap;
            }
        }
        out.values[i] = acc;
        out.valid[i] = f.valid[i];
    }
    Ok(out)
}

struct HeatModes {
    t: f64,
    a: Vec<f64>,
    block: PrimeBlock,
}

impl TableOperator for HeatModes {
    fn table(&self, mu: &[f64]) -> Vec<C64> {
        let np = self.block.len();
        let mut out = vec![C64::new(0.0, 0.0); np * np];
        let mu_norm = mu.iter().map(|v| v * v).sum::<f64>().sqrt();
        let Some(mc) = MehlerCoeffs::new(self.t, mu_norm) else {
            return out;
        };
        let a2: f64 = self.a.iter().map(|v| v * v).sum();
        let vol = self.block.cell_volume();
        let amp = mc.amplitude(self.block.shape.len()) * (-a2 * self.t).exp() * vol;
        for i in 0..np {
            let x = &self.block.nodes[i];
            for j in 0..np {
                let y = &self.block.nodes[j];
                let drift: f64 = self.a.iter().zip(x.iter().zip(y)).map(|(a, (xv, yv))| a * (yv - xv)).sum();
                out[i * np + j] = C64::new(amp * (mc.exponent(x, y) + drift).exp(), 0.0);
            }
        }
        out
    }
}

/// e^{−tG_a} f(x) = ∫ H_{t,a}(x,y) f(y) e^{2a·y′} dy on f's grid.
///
/// The x″ integral is carried out exactly on the trigonometric interpolant
/// of f (the λ-integral defining H_t is a Fourier transform in x″), the x′
/// integral is the grid sum.
pub fn apply_heat_semigroup(f: &SampledFunction, t: f64, a: &Drift, q: &QuadratureSpec) -> Result<SampledFunction> {
    check_t(t)?;
    q.validate()?;
    if a.a.len() != f.grid.dims.n {
        return invalid("drift dimension does not match the grid");
    }
    let op = HeatModes { t, a: a.a.clone(), block: PrimeBlock::new(&f.grid) };
    Ok(apply_modes(f, &op, 2))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(a: f64, b: f64) -> GrushinPoint {
        GrushinPoint::new(vec![a], vec![b]).unwrap()
    }

    #[test]
    fn origin_value_matches_one_dimensional_integral() {
        // H_t(0,0) = (1/π) ∫₀^∞ (λ/(2π sinh 2λt))^{1/2} dλ; at t = 1/2
        // this is (2π)^{-1/2}/π · ∫₀^∞ (λ/sinh λ)^{1/2} dλ.
        let q = QuadratureSpec::default().with_rel_tol(1e-10);
        let h = heat_kernel(0.5, &p(0.0, 0.0), &p(0.0, 0.0), &q).unwrap();
        let inner = crate::quad::composite(gl16(), 0.0, 80.0, 40, |l: f64| if l == 0.0 { 1.0 } else { (l / l.sinh()).sqrt() });
        let want = inner / (PI * (2.0 * PI).sqrt());
        assert!((h.value / want - 1.0).abs() < 1e-9, "{} vs {}", h.value, want);
    }

    #[test]
    fn symmetric_in_x_and_y() {
        let q = QuadratureSpec::default();
        let (x, y) = (p(0.4, -0.3), p(-1.1, 0.9));
        let a = heat_kernel(0.8, &x, &y, &q).unwrap().value;
        let b = heat_kernel(0.8, &y, &x, &q).unwrap().value;
        assert!((a / b - 1.0).abs() < 1e-10);
    }

    #[test]
    fn zero_drift_matches_plain_kernel() {
        let q = QuadratureSpec::default();
        let (x, y) = (p(0.4, -0.3), p(-1.1, 0.9));
        let a = heat_kernel(0.8, &x, &y, &q).unwrap().value;
        let b = heat_kernel_drift(0.8, &Drift::zero(1), &x, &y, &q).unwrap().value;
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_bad_time() {
        let q = QuadratureSpec::default();
        assert!(heat_kernel(0.0, &p(0.0, 0.0), &p(0.0, 0.0), &q).is_err());
        assert!(heat_kernel(-1.0, &p(0.0, 0.0), &p(0.0, 0.0), &q).is_err());
    }

    #[test]
    fn grushin_apply_annihilates_constants() {
        let g = crate::grid::Grid::uniform(crate::space::Dimensions::new(1, 1).unwrap(), -1.0, 1.0, 12).unwrap();
        let f = SampledFunction::from_fn(g, |_| 1.0);
        let out = grushin_apply(&f, &Drift::new(vec![0.7])).unwrap();
        for (v, ok) in out.values.iter().zip(&out.valid) {
            if *ok {
                assert!(v.abs() < 1e-10);
            }
        }
    }
}
