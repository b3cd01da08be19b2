//! Points of ℝⁿ×ℝᵐ, drifts, multi-indices, non-isotropic dilations and
//! rotations acting on the x′ block.

use crate::error::{invalid, Result};
use serde::{Deserialize, Serialize};

/// Tolerance on `max |AᵀA − I|` accepted by [`rotate`].
pub const ORTHOGONALITY_TOL: f64 = 1e-12;

/// The split ℝⁿ×ℝᵐ. Q = n + 2m is the homogeneous dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dimensions {
    pub n: usize,
    pub m: usize,
}

impl Dimensions {
    pub fn new(n: usize, m: usize) -> Result<Self> {
        if n == 0 || m == 0 {
            return invalid(format!("dimensions must be positive, got n={n}, m={m}"));
        }
        Ok(Self { n, m })
    }

    /// Homogeneous dimension n + 2m.
    pub fn q(&self) -> usize {
        self.n + 2 * self.m
    }

    /// Topological dimension n + m.
    pub fn total(&self) -> usize {
        self.n + self.m
    }
}

/// A point x = (x′, x″).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrushinPoint {
    pub x_prime: Vec<f64>,
    pub x_dprime: Vec<f64>,
}

impl GrushinPoint {
    pub fn new(x_prime: Vec<f64>, x_dprime: Vec<f64>) -> Result<Self> {
        if x_prime.is_empty() || x_dprime.is_empty() {
            return invalid("both coordinate blocks must be non-empty");
        }
        Ok(Self { x_prime, x_dprime })
    }

    /// Splits a flat coordinate list after the first `n` entries.
    pub fn from_slice(coords: &[f64], n: usize) -> Result<Self> {
        if n == 0 || coords.len() <= n {
            return invalid(format!("cannot split {} coordinates with n = {n}", coords.len()));
        }
        Self::new(coords[..n].to_vec(), coords[n..].to_vec())
    }

    pub fn origin(dims: Dimensions) -> Self {
        Self { x_prime: vec![0.0; dims.n], x_dprime: vec![0.0; dims.m] }
    }

    pub fn dims(&self) -> Dimensions {
        Dimensions { n: self.x_prime.len(), m: self.x_dprime.len() }
    }

    pub fn to_vec(&self) -> Vec<f64> {
        let mut v = self.x_prime.clone();
        v.extend_from_slice(&self.x_dprime);
        v
    }

    pub fn norm_prime(&self) -> f64 {
        norm(&self.x_prime)
    }
}

/// Drift vector a ∈ ℝⁿ of G_a = G − 2a·∇_{x′}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Drift {
    pub a: Vec<f64>,
}

impl Drift {
    pub fn new(a: Vec<f64>) -> Self {
        Self { a }
    }

    pub fn zero(n: usize) -> Self {
        Self { a: vec![0.0; n] }
    }

    /// The drift `s·e₁` in ℝⁿ.
    pub fn along_e1(n: usize, s: f64) -> Self {
        let mut a = vec![0.0; n];
        a[0] = s;
        Self { a }
    }

    pub fn norm_sq(&self) -> f64 {
        self.a.iter().map(|v| v * v).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.a.iter().all(|&v| v == 0.0)
    }

    /// a·x′
    pub fn dot(&self, xp: &[f64]) -> f64 {
        dot(&self.a, xp)
    }
}

/// α = (α′, α″): powers of X_j = ∂_{x′_j} and of X_{j,k} = x′_j ∂_{x″_k}.
///
/// `alpha_dprime` is stored row-major, entry `j*m + k` for X_{j,k}.
/// The operator X^α applies the X″ factors first and the X′ factors last.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrushinMultiIndex {
    pub alpha_prime: Vec<u32>,
    pub alpha_dprime: Vec<u32>,
}

impl GrushinMultiIndex {
    pub fn new(alpha_prime: Vec<u32>, alpha_dprime: Vec<u32>) -> Self {
        Self { alpha_prime, alpha_dprime }
    }

    pub fn zero(dims: Dimensions) -> Self {
        Self { alpha_prime: vec![0; dims.n], alpha_dprime: vec![0; dims.n * dims.m] }
    }

    /// `order · e_j` on the X′ block.
    pub fn prime(dims: Dimensions, j: usize, order: u32) -> Self {
        let mut a = Self::zero(dims);
        a.alpha_prime[j] = order;
        a
    }

    /// `order · e_{(j,k)}` on the X″ block.
    pub fn dprime(dims: Dimensions, j: usize, k: usize, order: u32) -> Self {
        let mut a = Self::zero(dims);
        a.alpha_dprime[j * dims.m + k] = order;
        a
    }

    pub fn order(&self) -> u32 {
        self.alpha_prime.iter().sum::<u32>() + self.alpha_dprime.iter().sum::<u32>()
    }

    pub fn check(&self, dims: Dimensions) -> Result<()> {
        if self.alpha_prime.len() != dims.n || self.alpha_dprime.len() != dims.n * dims.m {
            return invalid(format!(
                "multi-index shape ({}, {}) does not match n={}, m={}",
                self.alpha_prime.len(),
                self.alpha_dprime.len(),
                dims.n,
                dims.m
            ));
        }
        Ok(())
    }

    /// Power of x′_j inserted by the X″ factors.
    pub(crate) fn xprime_powers(&self, m: usize) -> Vec<u32> {
        self.alpha_prime
            .iter()
            .enumerate()
            .map(|(j, _)| self.alpha_dprime[j * m..(j + 1) * m].iter().sum())
            .collect()
    }

    /// Power of λ_k inserted by the X″ factors.
    pub(crate) fn lambda_powers(&self, m: usize) -> Vec<u32> {
        let n = self.alpha_prime.len();
        (0..m).map(|k| (0..n).map(|j| self.alpha_dprime[j * m + k]).sum()).collect()
    }
}

/// δ_s x = (s x′, s² x″).
pub fn dilate(x: &GrushinPoint, s: f64) -> Result<GrushinPoint> {
    if !(s > 0.0) || !s.is_finite() {
        return invalid(format!("dilation factor must be positive, got {s}"));
    }
    Ok(GrushinPoint {
        x_prime: x.x_prime.iter().map(|v| s * v).collect(),
        x_dprime: x.x_dprime.iter().map(|v| s * s * v).collect(),
    })
}

/// An n×n orthogonal matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Orthogonal {
    n: usize,
    data: Vec<f64>,
}

impl Orthogonal {
    pub fn new(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return invalid(format!("expected {} matrix entries, got {}", n * n, data.len()));
        }
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let mut s = 0.0;
                for l in 0..n {
                    s += data[l * n + i] * data[l * n + j];
                }
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((s - target).abs());
            }
        }
        if !(worst <= ORTHOGONALITY_TOL) {
            return invalid(format!("matrix is not orthogonal: max |AᵀA − I| = {worst:e}"));
        }
        Ok(Self { n, data })
    }

    pub fn identity(n: usize) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = 1.0;
        }
        Self { n, data }
    }

    /// Planar rotation by `theta` in the (i, j) coordinate plane.
    pub fn givens(n: usize, i: usize, j: usize, theta: f64) -> Self {
        let mut r = Self::identity(n);
        let (s, c) = theta.sin_cos();
        r.data[i * n + i] = c;
        r.data[j * n + j] = c;
        r.data[i * n + j] = -s;
        r.data[j * n + i] = s;
        r
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Entry a_{ij}.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        (0..self.n).map(|i| (0..self.n).map(|j| self.get(i, j) * v[j]).sum()).collect()
    }
}

/// A x = (A x′, x″).
pub fn rotate(x: &GrushinPoint, a: &Orthogonal) -> Result<GrushinPoint> {
    if a.dim() != x.x_prime.len() {
        return invalid(format!("rotation of size {} applied to n = {}", a.dim(), x.x_prime.len()));
    }
    Ok(GrushinPoint { x_prime: a.apply(&x.x_prime), x_dprime: x.x_dprime.clone() })
}

/// Checked variant of [`rotate`] taking a raw row-major matrix.
pub fn rotate_matrix(x: &GrushinPoint, data: &[f64]) -> Result<GrushinPoint> {
    let a = Orthogonal::new(x.x_prime.len(), data.to_vec())?;
    rotate(x, &a)
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn dist_sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(a: f64, b: f64) -> GrushinPoint {
        GrushinPoint::new(vec![a], vec![b]).unwrap()
    }

    #[test]
    fn dilate_by_one_is_identity() {
        let x = pt(0.3, -1.7);
        assert_eq!(dilate(&x, 1.0).unwrap(), x);
    }

    #[test]
    fn dilate_scales_blocks_non_isotropically() {
        assert_eq!(dilate(&pt(1.0, 1.0), 2.0).unwrap(), pt(2.0, 4.0));
    }

    #[test]
    fn dilate_rejects_non_positive() {
        assert!(dilate(&pt(1.0, 1.0), 0.0).is_err());
        assert!(dilate(&pt(1.0, 1.0), -2.0).is_err());
    }

    #[test]
    fn rotate_identity_and_quarter_turn() {
        let x = GrushinPoint::new(vec![1.0, 0.0], vec![5.0]).unwrap();
        assert_eq!(rotate(&x, &Orthogonal::identity(2)).unwrap(), x);
        let q = Orthogonal::new(2, vec![0.0, -1.0, 1.0, 0.0]).unwrap();
        let y = rotate(&x, &q).unwrap();
        assert_eq!(y.x_prime, vec![0.0, 1.0]);
        assert_eq!(y.x_dprime, vec![5.0]);
    }

    #[test]
    fn rotate_rejects_non_orthogonal() {
        let x = GrushinPoint::new(vec![1.0, 0.0], vec![0.0]).unwrap();
        assert!(rotate_matrix(&x, &[1.0, 0.1, 0.0, 1.0]).is_err());
    }

    #[test]
    fn multi_index_bookkeeping() {
        let d = Dimensions::new(2, 3).unwrap();
        let mut a = GrushinMultiIndex::zero(d);
        a.alpha_prime[1] = 2;
        a.alpha_dprime[1 * 3 + 2] = 1;
        a.alpha_dprime[0 * 3 + 2] = 1;
        assert_eq!(a.order(), 4);
        assert_eq!(a.xprime_powers(3), vec![1, 1]);
        assert_eq!(a.lambda_powers(3), vec![0, 0, 2]);
        assert_eq!(d.q(), 8);
    }
}
