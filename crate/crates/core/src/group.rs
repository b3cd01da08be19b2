//! The group H_{n,m} of triples (u, v, s), u ∈ ℝ^{n×m}, v ∈ ℝⁿ, s ∈ ℝᵐ, its
//! action σ on functions over ℝ^{n+m}, and transference operators
//! Tf = ∫ k(g) σ_{g⁻¹}f dg.

use crate::error::{invalid, Result};
use crate::grid::SampledFunction;
use crate::space::{Dimensions, Drift};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupElement {
    /// Row-major n×m: u[j*m + k].
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub s: Vec<f64>,
}

impl GroupElement {
    pub fn new(dims: Dimensions, u: Vec<f64>, v: Vec<f64>, s: Vec<f64>) -> Result<Self> {
        if u.len() != dims.n * dims.m || v.len() != dims.n || s.len() != dims.m {
            return invalid("group element shapes do not match (n, m)");
        }
        Ok(Self { u, v, s })
    }

    pub fn identity(dims: Dimensions) -> Self {
        Self { u: vec![0.0; dims.n * dims.m], v: vec![0.0; dims.n], s: vec![0.0; dims.m] }
    }

    pub fn dims(&self) -> Dimensions {
        Dimensions { n: self.v.len(), m: self.s.len() }
    }

    /// uᵀw for w ∈ ℝⁿ.
    fn ut(&self, w: &[f64]) -> Vec<f64> {
        let m = self.s.len();
        (0..m).map(|k| w.iter().enumerate().map(|(j, wj)| self.u[j * m + k] * wj).sum()).collect()
    }
}

/// (u,v,s)·(u′,v′,s′) = (u+u′, v+v′, s+s′+(u′ᵀv − uᵀv′)/2).
pub fn group_mul(g: &GroupElement, h: &GroupElement) -> Result<GroupElement> {
    if g.dims() != h.dims() || g.u.len() != h.u.len() {
        return invalid("group elements of different shapes");
    }
    let a = h.ut(&g.v);
    let b = g.ut(&h.v);
    Ok(GroupElement {
        u: g.u.iter().zip(&h.u).map(|(x, y)| x + y).collect(),
        v: g.v.iter().zip(&h.v).map(|(x, y)| x + y).collect(),
        s: (0..g.s.len()).map(|k| g.s[k] + h.s[k] + (a[k] - b[k]) / 2.0).collect(),
    })
}

pub fn group_inv(g: &GroupElement) -> GroupElement {
    GroupElement { u: g.u.iter().map(|x| -x).collect(), v: g.v.iter().map(|x| -x).collect(), s: g.s.iter().map(|x| -x).collect() }
}

/// The point (x′+v, x″+uᵀx′+s+uᵀv/2).
fn tau(g: &GroupElement, x: &[f64], n: usize) -> Vec<f64> {
    let (xp, xpp) = x.split_at(n);
    let a = g.ut(xp);
    let b = g.ut(&g.v);
    let mut out = Vec::with_capacity(x.len());
    out.extend(xp.iter().zip(&g.v).map(|(p, v)| p + v));
    out.extend((0..xpp.len()).map(|k| xpp[k] + a[k] + g.s[k] + b[k] / 2.0));
    out
}

/// (σ_g f)(x) = f(x′+v, x″+uᵀx′+s+uᵀv/2), by multilinear interpolation
/// with f taken as zero off its grid.
pub fn sigma_apply(g: &GroupElement, f: &SampledFunction) -> Result<SampledFunction> {
    let grid = &f.grid;
    if g.dims() != grid.dims {
        return invalid("group element and grid dimensions differ");
    }
    let n = grid.dims.n;
    let values = (0..grid.len()).into_par_iter().map(|i| f.eval_coords(&tau(g, &grid.coords(i), n))).collect();
    SampledFunction::new(grid.clone(), values)
}

/// Values of k on a rectangular grid over (u, v, s) coordinates, ordered as
/// u (row-major), then v, then s. Haar measure is Lebesgue measure in these
/// coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupKernel {
    pub dims: Dimensions,
    pub origin: Vec<f64>,
    pub spacing: Vec<f64>,
    pub shape: Vec<usize>,
    pub values: Vec<f64>,
}

impl GroupKernel {
    pub fn new(dims: Dimensions, origin: Vec<f64>, spacing: Vec<f64>, shape: Vec<usize>, values: Vec<f64>) -> Result<Self> {
        let d = dims.n * dims.m + dims.n + dims.m;
        if origin.len() != d || spacing.len() != d || shape.len() != d {
            return invalid(format!("group grids have {d} axes"));
        }
        if spacing.iter().any(|h| !(*h > 0.0)) || shape.iter().any(|&s| s == 0) {
            return invalid("spacings must be positive and shapes nonzero");
        }
        if values.len() != shape.iter().product::<usize>() {
            return invalid("value count does not match the grid");
        }
        if values.iter().any(|v| !v.is_finite()) {
            return invalid("kernel values must be finite");
        }
        Ok(Self { dims, origin, spacing, shape, values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing.iter().product()
    }

    pub fn element(&self, flat: usize) -> GroupElement {
        let d = self.shape.len();
        let mut c = vec![0.0; d];
        let mut rest = flat;
        for ax in (0..d).rev() {
            c[ax] = self.origin[ax] + (rest % self.shape[ax]) as f64 * self.spacing[ax];
            rest /= self.shape[ax];
        }
        let nm = self.dims.n * self.dims.m;
        GroupElement { u: c[..nm].to_vec(), v: c[nm..nm + self.dims.n].to_vec(), s: c[nm + self.dims.n..].to_vec() }
    }

    /// ‖k‖_{L¹(e^{2a·v/p} dg)}.
    pub fn weighted_l1(&self, p: f64, a: &Drift) -> Result<f64> {
        if !(p >= 1.0) {
            return invalid("p must be at least 1");
        }
        if a.a.len() != self.dims.n {
            return invalid("drift dimension does not match the group");
        }
        let cell = self.cell_volume();
        Ok((0..self.len()).map(|i| self.values[i].abs() * (2.0 * a.dot(&self.element(i).v) / p).exp() * cell).sum())
    }
}

/// Tf(x) = Σ_g k(g) (σ_{g⁻¹} f)(x) · cell volume.
pub fn transference_apply(k: &GroupKernel, f: &SampledFunction) -> Result<SampledFunction> {
    let grid = &f.grid;
    if k.dims != grid.dims {
        return invalid("kernel and function dimensions differ");
    }
    let n = grid.dims.n;
    let cell = k.cell_volume();
    let inverses: Vec<(f64, GroupElement)> =
        (0..k.len()).filter(|&i| k.values[i] != 0.0).map(|i| (k.values[i] * cell, group_inv(&k.element(i)))).collect();
    let values = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let x = grid.coords(i);
            inverses.iter().map(|(w, g)| w * f.eval_coords(&tau(g, &x, n))).sum()
        })
        .collect();
    SampledFunction::new(grid.clone(), values)
}
