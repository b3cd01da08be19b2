//! The Grushin quasi-metric and volumes of its balls, for Lebesgue measure
//! and for dμ_a = e^{2a·x′}dx.

use crate::error::{invalid, Error, Result};
use crate::space::{dist_sq, norm, Drift, GrushinPoint};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Number of y′₁ strata used once |a|·r exceeds [`STRATIFY_ABOVE`].
pub const STRATA: usize = 16;
pub const STRATIFY_ABOVE: f64 = 2.0;
pub const MIN_SAMPLES: usize = 10_000;

/// d(x,y) = |x′−y′| + |x″−y″|/(|x′|+|y′|) if |x″−y″|^{1/2} ≤ |x′|+|y′|,
/// else |x′−y′| + |x″−y″|^{1/2}.
pub fn grushin_distance(x: &GrushinPoint, y: &GrushinPoint) -> f64 {
    let dp = dist_sq(&x.x_prime, &y.x_prime).sqrt();
    let dpp = dist_sq(&x.x_dprime, &y.x_dprime).sqrt();
    let s = norm(&x.x_prime) + norm(&y.x_prime);
    let root = dpp.sqrt();
    if root <= s && s > 0.0 {
        dp + dpp / s
    } else {
        dp + root
    }
}

/// r^{n+m}(r + |x′|)^m, comparable to |B(x, r)|.
pub fn ball_volume_lebesgue_ref(x: &GrushinPoint, r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return invalid("radius must be positive");
    }
    let (n, m) = (x.x_prime.len() as i32, x.x_dprime.len() as i32);
    Ok(r.powi(n + m) * (r + x.norm_prime()).powi(m))
}

/// Two-regime size of μ_a(B(x, r)).
pub fn ball_volume_mu_asymptotic(x: &GrushinPoint, r: f64, a: &Drift) -> Result<f64> {
    if !(r > 0.0) {
        return invalid("radius must be positive");
    }
    if a.is_zero() {
        return invalid("zero drift: use ball_volume_lebesgue_ref");
    }
    if a.a.len() != x.x_prime.len() {
        return invalid("drift dimension does not match the point");
    }
    let (n, m) = (x.x_prime.len() as f64, x.x_dprime.len() as i32);
    let an = a.norm();
    let ax = a.dot(&x.x_prime);
    let tail = (r + x.norm_prime()).powi(m);
    if r <= 1.0 / an {
        Ok((2.0 * ax).exp() * r.powf(n + m as f64) * tail)
    } else {
        Ok(an.powf(-(n + 1.0) / 2.0 - m as f64) * (2.0 * (ax + an * r)).exp() * r.powf((n - 1.0) / 2.0) * tail)
    }
}

/// Radius of the x″-slice {y″ : d(x, y) < r} at fixed y′, a Euclidean ball
/// in ℝᵐ centred at x″ (zero if y′ lies outside the x′-ball).
pub fn slice_radius(x: &GrushinPoint, yp: &[f64], r: f64) -> f64 {
    let rho = r - dist_sq(&x.x_prime, yp).sqrt();
    if rho <= 0.0 {
        return 0.0;
    }
    let s = norm(&x.x_prime) + norm(yp);
    rho * rho.max(s)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VolumeEstimate {
    pub value: f64,
    pub std_err: f64,
    pub samples: usize,
    pub seed: u64,
}

struct Stratum {
    lo: Vec<f64>,
    hi: Vec<f64>,
    volume: f64,
}

impl Stratum {
    fn draw(&self, rng: &mut ChaCha8Rng, out: &mut [f64]) {
        for (k, o) in out.iter_mut().enumerate() {
            *o = rng.gen_range(self.lo[k]..self.hi[k]);
        }
    }
}

#[derive(Default, Clone, Copy)]
struct Moments {
    count: usize,
    sum: f64,
    sum_sq: f64,
    hits: usize,
}

impl Moments {
    fn mean(&self) -> f64 {
        self.sum / self.count as f64
    }
    fn var(&self) -> f64 {
        if self.count < 2 {
            return 0.0;
        }
        let mu = self.mean();
        (self.sum_sq / self.count as f64 - mu * mu).max(0.0) * self.count as f64 / (self.count - 1) as f64
    }
}

fn strata(x: &GrushinPoint, r: f64, stratified: bool) -> Vec<Stratum> {
    let (n, m) = (x.x_prime.len(), x.x_dprime.len());
    let spread = 2.0 * x.norm_prime() + r;
    let box_for = |lo1: f64, hi1: f64, half: f64| {
        let mut lo = Vec::with_capacity(n + m);
        let mut hi = Vec::with_capacity(n + m);
        lo.push(lo1);
        hi.push(hi1);
        for j in 1..n {
            lo.push(x.x_prime[j] - r);
            hi.push(x.x_prime[j] + r);
        }
        for k in 0..m {
            lo.push(x.x_dprime[k] - half);
            hi.push(x.x_dprime[k] + half);
        }
        let volume = lo.iter().zip(&hi).map(|(a, b)| b - a).product();
        Stratum { lo, hi, volume }
    };
    if !stratified {
        return vec![box_for(x.x_prime[0] - r, x.x_prime[0] + r, r * spread + r * r)];
    }
    let w = 2.0 * r / STRATA as f64;
    (0..STRATA)
        .map(|h| {
            let lo1 = x.x_prime[0] - r + h as f64 * w;
            let hi1 = lo1 + w;
            // closest approach of the stratum to x′₁ bounds ρ = r − |x′−y′|
            let near = if lo1 <= x.x_prime[0] && x.x_prime[0] <= hi1 {
                0.0
            } else {
                (lo1 - x.x_prime[0]).abs().min((hi1 - x.x_prime[0]).abs())
            };
            let rho = r - near;
            box_for(lo1, hi1, rho * rho.max(spread))
        })
        .collect()
}

fn run_stratum(x: &GrushinPoint, r: f64, a: &Drift, st: &Stratum, count: usize, seed: u64, stream: u64, skip: usize) -> Moments {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let d = st.lo.len();
    let n = x.x_prime.len();
    let mut buf = vec![0.0; d];
    // Draws consumed by an earlier pass are skipped so passes never reuse points.
    for _ in 0..skip {
        st.draw(&mut rng, &mut buf);
    }
    let mut mo = Moments::default();
    for _ in 0..count {
        st.draw(&mut rng, &mut buf);
        let y = GrushinPoint { x_prime: buf[..n].to_vec(), x_dprime: buf[n..].to_vec() };
        let w = if grushin_distance(x, &y) < r {
            mo.hits += 1;
            (2.0 * a.dot(&y.x_prime)).exp()
        } else {
            0.0
        };
        mo.count += 1;
        mo.sum += w;
        mo.sum_sq += w * w;
    }
    mo
}

/// Monte-Carlo estimate of μ_a(B(x, r)) by rejection sampling.
///
/// Each stratum draws from its own ChaCha8 stream of `seed`, so the result
/// depends only on the arguments. With |a|·r > 2 the y′₁ range is cut into
/// [`STRATA`] slabs, a pilot pass estimates each slab's spread and the
/// remaining budget is allocated in proportion to volume × spread.
pub fn ball_volume_mu_mc(x: &GrushinPoint, r: f64, a: &Drift, samples: usize, seed: u64) -> Result<VolumeEstimate> {
    if !(r > 0.0) {
        return invalid("radius must be positive");
    }
    if samples < MIN_SAMPLES {
        return invalid(format!("at least {MIN_SAMPLES} samples are required"));
    }
    if a.a.len() != x.x_prime.len() {
        return invalid("drift dimension does not match the point");
    }
    let stratified = a.norm() * r > STRATIFY_ABOVE;
    let sts = strata(x, r, stratified);
    let pilot = if stratified { samples / (4 * STRATA) } else { samples };
    let first: Vec<Moments> = sts
        .par_iter()
        .enumerate()
        .map(|(h, st)| run_stratum(x, r, a, st, pilot, seed, h as u64, 0))
        .collect();
    let moments = if stratified {
        let left = samples - pilot * STRATA;
        let score: Vec<f64> = sts.iter().zip(&first).map(|(st, mo)| st.volume * mo.var().sqrt()).collect();
        let total: f64 = score.iter().sum();
        let extra: Vec<usize> = if total > 0.0 {
            score.iter().map(|s| (left as f64 * s / total).floor() as usize).collect()
        } else {
            vec![left / STRATA; STRATA]
        };
        sts.par_iter()
            .enumerate()
            .map(|(h, st)| {
                let more = run_stratum(x, r, a, st, extra[h], seed, h as u64, pilot);
                let mo = first[h];
                Moments { count: mo.count + more.count, sum: mo.sum + more.sum, sum_sq: mo.sum_sq + more.sum_sq, hits: mo.hits + more.hits }
            })
            .collect()
    } else {
        first
    };
    if moments.iter().all(|m| m.hits == 0) {
        return Err(Error::DegenerateEstimate);
    }
    let mut value = 0.0;
    let mut var = 0.0;
    let mut used = 0;
    for (st, mo) in sts.iter().zip(&moments) {
        value += st.volume * mo.mean();
        var += st.volume * st.volume * mo.var() / mo.count as f64;
        used += mo.count;
    }
    Ok(VolumeEstimate { value, std_err: var.sqrt(), samples: used, seed })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(a: f64, b: f64) -> GrushinPoint {
        GrushinPoint::new(vec![a], vec![b]).unwrap()
    }

    #[test]
    fn distance_regimes() {
        assert_eq!(grushin_distance(&p(1.0, 0.0), &p(1.0, 1.0)), 0.5);
        assert_eq!(grushin_distance(&p(0.0, 0.0), &p(0.0, 4.0)), 2.0);
        assert_eq!(grushin_distance(&p(0.3, 0.2), &p(0.3, 0.2)), 0.0);
    }

    #[test]
    fn slice_radius_matches_distance() {
        let x = p(0.7, 0.1);
        for &yp in &[0.2, 0.9, -0.5] {
            let rad = slice_radius(&x, &[yp], 1.3);
            let inside = grushin_distance(&x, &p(yp, 0.1 + rad * 0.999));
            let outside = grushin_distance(&x, &p(yp, 0.1 + rad * 1.001));
            assert!(inside < 1.3 && outside > 1.3, "yp={yp}");
        }
    }

    #[test]
    fn reference_volume_examples() {
        assert_eq!(ball_volume_lebesgue_ref(&p(3.0, 0.0), 1.0).unwrap(), 4.0);
        assert!((ball_volume_lebesgue_ref(&p(0.0, 5.0), 0.7).unwrap() - 0.7f64.powi(3)).abs() < 1e-15);
    }

    #[test]
    fn small_sample_counts_are_rejected() {
        assert!(ball_volume_mu_mc(&p(0.0, 0.0), 1.0, &Drift::zero(1), 100, 1).is_err());
    }
}
