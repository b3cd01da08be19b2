//! Uniform rectangular grids over ℝ^{n+m} and functions sampled on them.
//!
//! Axes are ordered (x′₁, …, x′ₙ, x″₁, …, x″ₘ) and values are stored
//! row-major with the last axis fastest, so the flat index splits as
//! `i′ · (x″-block size) + i″`.

use crate::error::{invalid, Result};
use crate::space::{Dimensions, GrushinPoint};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub dims: Dimensions,
    pub origin: Vec<f64>,
    pub spacing: Vec<f64>,
    pub shape: Vec<usize>,
}

impl Grid {
    pub fn new(dims: Dimensions, origin: Vec<f64>, spacing: Vec<f64>, shape: Vec<usize>) -> Result<Self> {
        let d = dims.total();
        if origin.len() != d || spacing.len() != d || shape.len() != d {
            return invalid(format!("grid needs {d} entries per field"));
        }
        if spacing.iter().any(|h| !(*h > 0.0) || !h.is_finite()) {
            return invalid("grid spacing must be positive and finite");
        }
        if shape.iter().any(|&s| s == 0) {
            return invalid("grid shape must be positive");
        }
        Ok(Self { dims, origin, spacing, shape })
    }

    /// `points` nodes per axis on [lo, hi), spacing (hi − lo)/points.
    pub fn uniform(dims: Dimensions, lo: f64, hi: f64, points: usize) -> Result<Self> {
        if !(hi > lo) || points < 2 {
            return invalid("uniform grid needs hi > lo and at least 2 points");
        }
        let d = dims.total();
        let h = (hi - lo) / points as f64;
        Self::new(dims, vec![lo; d], vec![h; d], vec![points; d])
    }

    /// 64 nodes per axis on [−6, 6).
    pub fn default_for(dims: Dimensions) -> Self {
        Self::uniform(dims, -6.0, 6.0, 64).expect("valid default grid")
    }

    pub fn len(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Number of nodes of the x′ block.
    pub fn prime_len(&self) -> usize {
        self.shape[..self.dims.n].iter().product()
    }

    /// Number of nodes of the x″ block.
    pub fn dprime_len(&self) -> usize {
        self.shape[self.dims.n..].iter().product()
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing.iter().product()
    }

    pub fn coord(&self, axis: usize, i: usize) -> f64 {
        self.origin[axis] + i as f64 * self.spacing[axis]
    }

    pub fn unravel(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.shape.len()];
        for ax in (0..self.shape.len()).rev() {
            idx[ax] = flat % self.shape[ax];
            flat /= self.shape[ax];
        }
        idx
    }

    pub fn ravel(&self, idx: &[usize]) -> usize {
        idx.iter().zip(&self.shape).fold(0, |acc, (&i, &s)| acc * s + i)
    }

    pub fn coords(&self, flat: usize) -> Vec<f64> {
        self.unravel(flat).iter().enumerate().map(|(ax, &i)| self.coord(ax, i)).collect()
    }

    pub fn point(&self, flat: usize) -> GrushinPoint {
        GrushinPoint::from_slice(&self.coords(flat), self.dims.n).expect("grid point")
    }

    /// x′ coordinates of the x′-block node `ip`.
    pub fn prime_coords(&self, ip: usize) -> Vec<f64> {
        let n = self.dims.n;
        let mut out = vec![0.0; n];
        let mut rest = ip;
        for ax in (0..n).rev() {
            out[ax] = self.coord(ax, rest % self.shape[ax]);
            rest /= self.shape[ax];
        }
        out
    }

    /// The grid carried by x ↦ R·x + ξ.
    pub fn affine(&self, r: f64, shift: &GrushinPoint) -> Result<Self> {
        if !(r > 0.0) {
            return invalid("scale must be positive");
        }
        let s = shift.to_vec();
        if s.len() != self.dims.total() {
            return invalid("shift has the wrong dimension");
        }
        Self::new(
            self.dims,
            self.origin.iter().zip(&s).map(|(o, c)| r * o + c).collect(),
            self.spacing.iter().map(|h| r * h).collect(),
            self.shape.clone(),
        )
    }

    /// The grid {δ_{1/s} z : z on this grid}.
    pub fn dilated_inverse(&self, s: f64) -> Result<Self> {
        if !(s > 0.0) {
            return invalid("dilation factor must be positive");
        }
        let n = self.dims.n;
        let f = |ax: usize| if ax < n { 1.0 / s } else { 1.0 / (s * s) };
        Self::new(
            self.dims,
            self.origin.iter().enumerate().map(|(ax, o)| o * f(ax)).collect(),
            self.spacing.iter().enumerate().map(|(ax, h)| h * f(ax)).collect(),
            self.shape.clone(),
        )
    }
}

/// Values on a [`Grid`] plus a validity mask.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledFunction {
    pub grid: Grid,
    pub values: Vec<f64>,
    pub valid: Vec<bool>,
}

impl SampledFunction {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return invalid(format!("expected {} values, got {}", grid.len(), values.len()));
        }
        let valid = vec![true; values.len()];
        Ok(Self { grid, values, valid })
    }

    pub fn from_fn(grid: Grid, f: impl Fn(&GrushinPoint) -> f64) -> Self {
        let values = (0..grid.len()).map(|i| f(&grid.point(i))).collect();
        let valid = vec![true; grid.len()];
        Self { grid, values, valid }
    }

    pub fn zeros(grid: Grid) -> Self {
        let len = grid.len();
        Self { grid, values: vec![0.0; len], valid: vec![true; len] }
    }

    /// Multilinear interpolation; zero outside the grid hull.
    pub fn eval(&self, x: &GrushinPoint) -> f64 {
        self.eval_coords(&x.to_vec())
    }

    pub fn eval_coords(&self, c: &[f64]) -> f64 {
        let g = &self.grid;
        let d = g.shape.len();
        let mut base = vec![0usize; d];
        let mut frac = vec![0.0; d];
        for ax in 0..d {
            let u = (c[ax] - g.origin[ax]) / g.spacing[ax];
            let last = (g.shape[ax] - 1) as f64;
            if !(u >= -1e-12 && u <= last + 1e-12) {
                return 0.0;
            }
            let u = u.clamp(0.0, last);
            let i = (u.floor() as usize).min(g.shape[ax].saturating_sub(2));
            base[ax] = i;
            frac[ax] = if g.shape[ax] == 1 { 0.0 } else { u - i as f64 };
        }
        let mut acc = 0.0;
        let mut idx = vec![0usize; d];
        for corner in 0..(1usize << d) {
            let mut w = 1.0;
            for ax in 0..d {
                let up = (corner >> ax) & 1 == 1;
                if up && g.shape[ax] == 1 {
                    w = 0.0;
                    break;
                }
                idx[ax] = base[ax] + up as usize;
                w *= if up { frac[ax] } else { 1.0 - frac[ax] };
            }
            if w != 0.0 {
                acc += w * self.values[g.ravel(&idx)];
            }
        }
        acc
    }

    pub fn max_abs(&self) -> f64 {
        self.values
            .iter()
            .zip(&self.valid)
            .filter(|(_, &ok)| ok)
            .fold(0.0, |m, (v, _)| m.max(v.abs()))
    }

    /// Pointwise linear combination `α·self + β·other` on a shared grid.
    pub fn combine(&self, alpha: f64, other: &Self, beta: f64) -> Result<Self> {
        if self.grid != other.grid {
            return invalid("functions live on different grids");
        }
        Ok(Self {
            grid: self.grid.clone(),
            values: self.values.iter().zip(&other.values).map(|(a, b)| alpha * a + beta * b).collect(),
            valid: self.valid.iter().zip(&other.valid).map(|(a, b)| *a && *b).collect(),
        })
    }

    /// Same values, relabelled onto `grid` (shapes must match).
    pub fn relabel(&self, grid: Grid) -> Result<Self> {
        if grid.shape != self.grid.shape {
            return invalid("relabelling requires identical shapes");
        }
        Ok(Self { grid, values: self.values.clone(), valid: self.valid.clone() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dims() -> Dimensions {
        Dimensions::new(1, 1).unwrap()
    }

    #[test]
    fn ravel_round_trip() {
        let g = Grid::new(Dimensions::new(2, 1).unwrap(), vec![0.0; 3], vec![1.0; 3], vec![3, 4, 5]).unwrap();
        for i in 0..g.len() {
            assert_eq!(g.ravel(&g.unravel(i)), i);
        }
        assert_eq!(g.prime_len(), 12);
        assert_eq!(g.dprime_len(), 5);
    }

    #[test]
    fn interpolation_reproduces_bilinear_functions() {
        let g = Grid::uniform(dims(), -1.0, 1.0, 10).unwrap();
        let f = SampledFunction::from_fn(g, |p| 2.0 * p.x_prime[0] - p.x_dprime[0] + 0.5 * p.x_prime[0] * p.x_dprime[0]);
        let x = GrushinPoint::new(vec![0.13], vec![-0.37]).unwrap();
        let want = 2.0 * 0.13 + 0.37 - 0.5 * 0.13 * 0.37;
        assert!((f.eval(&x) - want).abs() < 1e-12);
        assert_eq!(f.eval(&GrushinPoint::new(vec![5.0], vec![0.0]).unwrap()), 0.0);
    }

    #[test]
    fn default_grid_contains_origin() {
        let g = Grid::default_for(dims());
        assert_eq!(g.coord(0, 32), 0.0);
        assert_eq!(g.len(), 64 * 64);
    }
}
