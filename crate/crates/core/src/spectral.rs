//! Application of x″-translation-invariant operators to sampled functions.
//!
//! An operator with kernel K(x′, y′, x″ − y″) acts on each Fourier mode
//! e^{iμ·x″} of the x″ block by an operator T_μ in x′ alone. The x″ block is
//! zero-padded to twice its length, transformed, each mode is mapped by its
//! T_μ (a dense matrix over the x′ nodes plus an optional local term), and
//! the result is transformed back.

use crate::grid::{Grid, SampledFunction};
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use rustfft::FftPlanner;

pub(crate) trait ModeOperator: Sync {
    /// Maps the x′-profile `coef` of mode e^{iμ·x″} to the output profile.
    /// `slot` indexes the mode in the order of [`mode_frequencies`].
    fn apply(&self, slot: usize, mu: &[f64], coef: &[C64]) -> Vec<C64>;
}

/// Operators given by a dense x′ matrix per mode.
pub(crate) trait TableOperator: Sync {
    /// Row-major matrix T_μ(x′_i, y′_j), already multiplied by the y′ weight
    /// and the x′ cell volume.
    fn table(&self, mu: &[f64]) -> Vec<C64>;
}

impl<T: TableOperator> ModeOperator for T {
    fn apply(&self, _slot: usize, mu: &[f64], coef: &[C64]) -> Vec<C64> {
        let np = coef.len();
        let table = self.table(mu);
        (0..np).map(|i| table[i * np..(i + 1) * np].iter().zip(coef).map(|(t, c)| t * c).sum()).collect()
    }
}

/// The x′ block of a grid: node coordinates and finite-difference stencils.
#[derive(Debug, Clone)]
pub(crate) struct PrimeBlock {
    pub shape: Vec<usize>,
    pub spacing: Vec<f64>,
    pub nodes: Vec<Vec<f64>>,
}

impl PrimeBlock {
    pub fn new(grid: &Grid) -> Self {
        let n = grid.dims.n;
        Self {
            shape: grid.shape[..n].to_vec(),
            spacing: grid.spacing[..n].to_vec(),
            nodes: (0..grid.prime_len()).map(|i| grid.prime_coords(i)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing.iter().product()
    }
}

pub(crate) fn fft_nd(planner: &mut FftPlanner<f64>, data: &mut [C64], shape: &[usize], inverse: bool) {
    let total: usize = shape.iter().product();
    for ax in 0..shape.len() {
        let len = shape[ax];
        if len == 1 {
            continue;
        }
        let stride: usize = shape[ax + 1..].iter().product();
        let fft = if inverse { planner.plan_fft_inverse(len) } else { planner.plan_fft_forward(len) };
        let mut line = vec![C64::new(0.0, 0.0); len];
        for start in 0..total {
            if (start / stride) % len != 0 {
                continue;
            }
            for i in 0..len {
                line[i] = data[start + i * stride];
            }
            fft.process(&mut line);
            for i in 0..len {
                data[start + i * stride] = line[i];
            }
        }
    }
}

/// Angular frequencies of a zero-padded FFT along one axis.
pub(crate) fn angular_frequency(j: usize, len: usize, h: f64) -> f64 {
    let signed = if j <= len / 2 { j as f64 } else { j as f64 - len as f64 };
    2.0 * std::f64::consts::PI * signed / (len as f64 * h)
}

fn unravel(mut flat: usize, shape: &[usize]) -> Vec<usize> {
    let mut idx = vec![0; shape.len()];
    for ax in (0..shape.len()).rev() {
        idx[ax] = flat % shape[ax];
        flat /= shape[ax];
    }
    idx
}

fn ravel(idx: &[usize], shape: &[usize]) -> usize {
    idx.iter().zip(shape).fold(0, |acc, (&i, &s)| acc * s + i)
}

/// Padded x″ shape and one representative of each conjugate pair of modes.
struct Layout {
    padded: Vec<usize>,
    reps: Vec<usize>,
}

impl Layout {
    fn new(grid: &Grid, pad: usize) -> Self {
        let padded: Vec<usize> = grid.shape[grid.dims.n..].iter().map(|s| pad * s).collect();
        let ptot: usize = padded.iter().product();
        let reps = (0..ptot).filter(|&fl| fl <= Self::neg_of(&padded, fl)).collect();
        Self { padded, reps }
    }

    fn neg_of(padded: &[usize], flat: usize) -> usize {
        let idx = unravel(flat, padded);
        let neg: Vec<usize> = idx.iter().zip(padded).map(|(&j, &p)| (p - j) % p).collect();
        ravel(&neg, padded)
    }

    fn mu(&self, grid: &Grid, flat: usize) -> Vec<f64> {
        let n = grid.dims.n;
        unravel(flat, &self.padded)
            .iter()
            .enumerate()
            .map(|(k, &j)| angular_frequency(j, self.padded[k], grid.spacing[n + k]))
            .collect()
    }
}

/// Angular frequencies of the modes visited by [`apply_modes`], by slot.
pub(crate) fn mode_frequencies(grid: &Grid, pad: usize) -> Vec<Vec<f64>> {
    let layout = Layout::new(grid, pad);
    layout.reps.iter().map(|&fl| layout.mu(grid, fl)).collect()
}

/// Applies `op` mode by mode and returns the result on `f`'s grid. The x″
/// block is zero-padded to `pad` times its length.
pub(crate) fn apply_modes(f: &SampledFunction, op: &dyn ModeOperator, pad: usize) -> SampledFunction {
    let grid = &f.grid;
    let np = grid.prime_len();
    let npp = grid.dprime_len();
    let shape_pp: Vec<usize> = grid.shape[grid.dims.n..].to_vec();
    let layout = Layout::new(grid, pad);
    let padded = layout.padded.clone();
    let ptot: usize = padded.iter().product();
    let mut planner = FftPlanner::new();

    let embed: Vec<usize> = (0..npp).map(|i| ravel(&unravel(i, &shape_pp), &padded)).collect();
    let mut spectra: Vec<Vec<C64>> = (0..np)
        .map(|ip| {
            let mut buf = vec![C64::new(0.0, 0.0); ptot];
            for (i, &e) in embed.iter().enumerate() {
                let v = f.values[ip * npp + i];
                buf[e] = C64::new(if v.is_finite() { v } else { 0.0 }, 0.0);
            }
            fft_nd(&mut planner, &mut buf, &padded, false);
            buf
        })
        .collect();

    let neg_of = |flat: usize| Layout::neg_of(&padded, flat);

    let mapped: Vec<(usize, Vec<C64>)> = layout
        .reps
        .par_iter()
        .enumerate()
        .map(|(slot, &flat)| {
            let mu = layout.mu(grid, flat);
            let coef: Vec<C64> = spectra.iter().map(|s| s[flat]).collect();
            let mut out = if coef.iter().any(|c| c.norm_sqr() > 0.0) {
                op.apply(slot, &mu, &coef)
            } else {
                vec![C64::new(0.0, 0.0); np]
            };
            if neg_of(flat) == flat {
                for o in out.iter_mut() {
                    o.im = 0.0;
                }
            }
            (flat, out)
        })
        .collect();

    for (flat, out) in mapped {
        let neg = neg_of(flat);
        for ip in 0..np {
            spectra[ip][flat] = out[ip];
            if neg != flat {
                spectra[ip][neg] = out[ip].conj();
            }
        }
    }

    let mut values = vec![0.0; grid.len()];
    for (ip, buf) in spectra.iter_mut().enumerate() {
        fft_nd(&mut planner, buf, &padded, true);
        for (i, &e) in embed.iter().enumerate() {
            values[ip * npp + i] = buf[e].re / ptot as f64;
        }
    }
    SampledFunction { grid: grid.clone(), values, valid: vec![true; grid.len()] }
}
