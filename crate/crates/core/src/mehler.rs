//! Closed-form heat kernel of the scaled Hermite operator −Δ + |λ|²|x′|²
//! (Mehler's formula) and the polynomial prefactors of its x′-derivatives.
//!
//! With c = |λ| coth(2|λ|t) and s = |λ| tanh(|λ|t) the kernel reads
//! `amp^{n/2} · exp(−(c/2)|x′−y′|² − s x′·y′)`, `amp = |λ|/(2π sinh 2|λ|t)`.

use crate::error::{invalid, Result};
use crate::space::{dist_sq, dot};
use std::f64::consts::PI;

/// Below this value of |λ|t the Taylor branch is used.
pub const SMALL_ARG: f64 = 1e-4;
/// Above this value of |λ|t the kernel is returned as 0.
pub const LARGE_ARG: f64 = 350.0;
/// Largest per-coordinate derivative order (X′ plus X″ powers) supported.
pub const MAX_ORDER: usize = 12;

/// The three scalars that determine k_{t,λ} at fixed (t, |λ|).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MehlerCoeffs {
    /// |λ|/(2π sinh 2|λ|t), the one-dimensional amplitude.
    pub amp: f64,
    /// |λ| coth(2|λ|t)
    pub c: f64,
    /// |λ| tanh(|λ|t)
    pub s: f64,
}

impl MehlerCoeffs {
    /// `None` once |λ|t exceeds [`LARGE_ARG`].
    pub fn new(t: f64, lam: f64) -> Option<Self> {
        let lam = lam.abs();
        let z = lam * t;
        if z > LARGE_ARG {
            return None;
        }
        if z < SMALL_ARG {
            let z2 = z * z;
            Some(Self {
                amp: (1.0 - 2.0 * z2 / 3.0) / (4.0 * PI * t),
                c: (1.0 + 4.0 * z2 / 3.0) / (2.0 * t),
                s: lam * z * (1.0 - z2 / 3.0),
            })
        } else {
            Some(Self {
                amp: lam / (2.0 * PI * (2.0 * z).sinh()),
                c: lam / (2.0 * z).tanh(),
                s: lam * z.tanh(),
            })
        }
    }

    /// amp^{n/2}
    pub fn amplitude(&self, n: usize) -> f64 {
        let half = self.amp.powi((n / 2) as i32);
        if n % 2 == 1 {
            half * self.amp.sqrt()
        } else {
            half
        }
    }

    /// The Mehler exponent Q(x′, y′).
    pub fn exponent(&self, xp: &[f64], yp: &[f64]) -> f64 {
        -0.5 * self.c * dist_sq(xp, yp) - self.s * dot(xp, yp)
    }

    /// k_{t,λ}(x′, y′).
    pub fn kernel(&self, xp: &[f64], yp: &[f64]) -> f64 {
        self.amplitude(xp.len()) * self.exponent(xp, yp).exp()
    }

    /// ∂_{x′_j} Q = −c(x′_j − y′_j) − s y′_j.
    pub fn exponent_gradient(&self, x: f64, y: f64) -> f64 {
        -self.c * (x - y) - self.s * y
    }
}

/// k_{t,λ}(x′, y′) for |λ| = `lam_norm`.
pub fn mehler_kernel(t: f64, lam_norm: f64, xp: &[f64], yp: &[f64]) -> Result<f64> {
    check_t(t)?;
    if !(lam_norm >= 0.0) {
        return invalid(format!("lam_norm must be nonnegative, got {lam_norm}"));
    }
    if xp.len() != yp.len() || xp.is_empty() {
        return invalid("x′ and y′ must have the same positive length");
    }
    Ok(MehlerCoeffs::new(t, lam_norm).map_or(0.0, |m| m.kernel(xp, yp)))
}

pub(crate) fn check_t(t: f64) -> Result<()> {
    if !(t > 0.0) || !t.is_finite() {
        return invalid(format!("t must be positive and finite, got {t}"));
    }
    Ok(())
}

/// Values p_0(L), …, p_K(L) of the one-dimensional prefactor chain
/// p_{k+1} = L p_k − k c p_{k−1}, i.e. ∂^k e^{Q} = p_k(∂Q) e^{Q} when ∂²Q = −c.
#[inline]
pub(crate) fn prefactor_chain(c: f64, l: f64, order: usize, out: &mut [f64; MAX_ORDER + 1]) {
    out[0] = 1.0;
    if order >= 1 {
        out[1] = l;
    }
    for k in 1..order {
        out[k + 1] = l * out[k] - k as f64 * c * out[k - 1];
    }
}

/// P_α with ∂^α_{x′} k_{t,λ} = P_α · k_{t,λ}.
///
/// Each coordinate contributes an independent univariate polynomial in
/// L_j = ∂_{x′_j}Q = −c(x′_j − y′_j) − s y′_j, so P_α is stored as one
/// coefficient vector per coordinate (lowest degree first).
#[derive(Debug, Clone, PartialEq)]
pub struct DerivativePrefactor {
    pub coeffs: MehlerCoeffs,
    pub polys: Vec<Vec<f64>>,
}

impl DerivativePrefactor {
    /// Evaluates P_α(x′, y′).
    pub fn eval(&self, xp: &[f64], yp: &[f64]) -> f64 {
        self.polys
            .iter()
            .enumerate()
            .map(|(j, p)| {
                let l = self.coeffs.exponent_gradient(xp[j], yp[j]);
                p.iter().rev().fold(0.0, |acc, c| acc * l + c)
            })
            .product()
    }

    /// Total degree in x′.
    pub fn degree(&self) -> usize {
        self.polys.iter().map(|p| p.len() - 1).sum()
    }
}

/// Builds P_α from P_0 = 1, P_{α+e_j} = ∂_{x′_j}P_α + P_α ∂_{x′_j}Q.
///
/// Returns `None` for the coefficients when |λ|t exceeds [`LARGE_ARG`].
pub fn mehler_derivative_prefactor(alpha_x: &[u32], t: f64, lam: &[f64]) -> Result<Option<DerivativePrefactor>> {
    check_t(t)?;
    let lam_norm = lam.iter().map(|v| v * v).sum::<f64>().sqrt();
    let Some(coeffs) = MehlerCoeffs::new(t, lam_norm) else {
        return Ok(None);
    };
    let polys = alpha_x
        .iter()
        .map(|&order| {
            // In the variable L, d/dx′_j = −c d/dL.
            let mut p = vec![1.0];
            for _ in 0..order {
                let mut next = vec![0.0; p.len() + 1];
                for (deg, &a) in p.iter().enumerate() {
                    next[deg + 1] += a;
                    if deg > 0 {
                        next[deg - 1] -= coeffs.c * deg as f64 * a;
                    }
                }
                p = next;
            }
            p
        })
        .collect();
    Ok(Some(DerivativePrefactor { coeffs, polys }))
}
