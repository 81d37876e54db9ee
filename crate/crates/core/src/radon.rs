//! Weak-form checks of the spherical Radon transform `R̃` and its dual
//!
//! ```text
//! R̃*g(x) = ∫_{V_{d,2}} g(P^U(x), U) dσ(U)
//! ```
//!
//! `R̃f` is never evaluated pointwise. It is only integrated against circle test
//! functions, and the slice-wise conditional `(R̃μ)^U` of a measure is realised as the
//! pushforward `P^U_# μ`.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::circle_ot::CircleEmpirical;
use crate::distributions::sample_uniform_sphere;
use crate::error::{param, Error, Result};
use crate::sphere_geom::{dot, sample_stiefel, slice_coordinate, SphereCloud, SpherePoint, StiefelFrame};
use crate::ssw::{project_cloud, MAX_FRAME_RESAMPLES};
use crate::stream::{rng_from_seed, substream};

/// Bumped whenever [`test_function_library`] changes.
pub const LIBRARY_VERSION: u32 = 1;

const LIBRARY_SEED: u64 = 0x5a17_ce11;

/// `f(x) = c + ⟨w, x⟩ + xᵀAx` on the sphere.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereTestFn {
    pub constant: f64,
    pub linear: Vec<f64>,
    /// Row-major `d×d`, empty for none.
    pub quadratic: Vec<f64>,
}

impl SphereTestFn {
    pub fn constant(d: usize, c: f64) -> Self {
        SphereTestFn { constant: c, linear: vec![0.0; d], quadratic: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.linear.len()
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let mut v = self.constant + dot(&self.linear, x);
        if !self.quadratic.is_empty() {
            let d = x.len();
            for (r, xr) in x.iter().enumerate() {
                v += xr * dot(&self.quadratic[r * d..(r + 1) * d], x);
            }
        }
        v
    }
}

/// `g(t, U) = c + Σ_k (a_k cos 2πkt + b_k sin 2πkt) + ⟨w, U(cos 2πt, sin 2πt)⟩`.
///
/// The last term couples the circle coordinate to the frame through the lifted
/// point of the great circle.
#[derive(Debug, Clone, PartialEq)]
pub struct CircleTestFn {
    pub constant: f64,
    pub cos: Vec<f64>,
    pub sin: Vec<f64>,
    pub lift: Vec<f64>,
}

impl CircleTestFn {
    pub fn constant(c: f64) -> Self {
        CircleTestFn { constant: c, cos: Vec::new(), sin: Vec::new(), lift: Vec::new() }
    }

    pub fn scaled(&self, s: f64) -> Self {
        let sc = |v: &Vec<f64>| v.iter().map(|a| a * s).collect();
        CircleTestFn { constant: self.constant * s, cos: sc(&self.cos), sin: sc(&self.sin), lift: sc(&self.lift) }
    }

    pub fn eval(&self, t: f64, u: &StiefelFrame) -> f64 {
        let a = 2.0 * PI * t;
        let mut v = self.constant;
        for (k, (c, s)) in self.cos.iter().zip(&self.sin).enumerate() {
            let (sk, ck) = ((k + 1) as f64 * a).sin_cos();
            v += c * ck + s * sk;
        }
        if !self.lift.is_empty() {
            let (s, c) = a.sin_cos();
            v += self.lift.iter().zip(u.rows()).map(|(w, r)| w * (r[0] * c + r[1] * s)).sum::<f64>();
        }
        v
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TestFunctionPair {
    pub f: SphereTestFn,
    pub g: CircleTestFn,
}

/// Ten fixed `(f, g)` pairs in dimension `d`, generated from a constant seed.
pub fn test_function_library(d: usize) -> Vec<TestFunctionPair> {
    let mut rng = ChaCha8Rng::seed_from_u64(LIBRARY_SEED ^ d as u64);
    let mut gauss =
        |n: usize, s: f64| -> Vec<f64> { (0..n).map(|_| s * rng.sample::<f64, _>(StandardNormal)).collect() };
    (0..10)
        .map(|k| {
            let f = SphereTestFn {
                constant: if k % 3 == 0 { 0.5 } else { 0.0 },
                linear: gauss(d, 1.0),
                quadratic: if k % 2 == 0 { gauss(d * d, 0.5) } else { Vec::new() },
            };
            let degree = 1 + k % 3;
            let g = CircleTestFn {
                constant: if k % 4 == 1 { 0.3 } else { 0.0 },
                cos: gauss(degree, 0.5),
                sin: gauss(degree, 0.5),
                lift: gauss(d, 1.0),
            };
            TestFunctionPair { f, g }
        })
        .collect()
}

/// Frame for sample `index` of `seed` with `x` projecting non-degenerately.
fn frame_for(x: &[f64], seed: u64, index: u64) -> Result<(StiefelFrame, f64)> {
    let mut rng = substream(seed, index);
    for _ in 0..=MAX_FRAME_RESAMPLES {
        let u = sample_stiefel(x.len(), &mut rng)?;
        if let Ok(t) = slice_coordinate(&u, x) {
            return Ok((u, t));
        }
    }
    Err(Error::DegenerateProjection { norm: 0.0 })
}

/// Monte Carlo `R̃*g(x)` over `n_frames` frames drawn from `seed`.
pub fn dual_transform(g: &CircleTestFn, x: &SpherePoint, n_frames: usize, seed: u64) -> Result<f64> {
    if n_frames < 1 {
        return Err(param("need at least one frame"));
    }
    dual_at(g, x.coords(), n_frames, seed)
}

fn dual_at(g: &CircleTestFn, x: &[f64], n_frames: usize, seed: u64) -> Result<f64> {
    let mut acc = 0.0;
    for l in 0..n_frames {
        let (u, t) = frame_for(x, seed, l as u64)?;
        acc += g.eval(t, &u);
    }
    Ok(acc / n_frames as f64)
}

/// Sample sizes for [`duality_check`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualityConfig {
    /// Outer sphere points of the `⟨f, R̃*g⟩` estimator.
    pub n_points: usize,
    /// Outer frames of the `⟨R̃f, g⟩` estimator.
    pub n_frames: usize,
    /// Inner samples per outer draw (frames for the left side, points for the right).
    pub inner: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DualityReport {
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
    pub lhs_std_error: f64,
    pub rhs_std_error: f64,
}

impl DualityReport {
    pub fn combined_std_error(&self) -> f64 {
        (self.lhs_std_error.powi(2) + self.rhs_std_error.powi(2)).sqrt()
    }
}

fn mean_se(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    if v.len() < 2 {
        return (m, 0.0);
    }
    let var = v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, (var / n).sqrt())
}

/// Estimates `⟨f, R̃*g⟩` with sphere points outside and frames inside, and
/// `⟨R̃f, g⟩` with frames outside and sphere points inside, from independent draws.
/// Both integrate `f(x) g(P^U(x), U)` against `Unif(S^{d−1}) ⊗ σ`.
pub fn duality_check(pair: &TestFunctionPair, cfg: &DualityConfig) -> Result<DualityReport> {
    if cfg.n_points < 1 || cfg.n_frames < 1 || cfg.inner < 1 {
        return Err(param("duality check sample sizes must be at least 1"));
    }
    let d = pair.f.dim();
    if d < 2 {
        return Err(param("test functions need d >= 2"));
    }
    let mut root = rng_from_seed(cfg.seed);
    let (seed_pts, seed_inner_frames, seed_frames, seed_inner_pts) =
        (root.random::<u64>(), root.random::<u64>(), root.random::<u64>(), root.random::<u64>());

    let lhs_terms: Vec<f64> = (0..cfg.n_points)
        .into_par_iter()
        .map(|i| {
            let mut rng = substream(seed_pts, i as u64);
            let x = sample_uniform_sphere(d, 1, &mut rng)?;
            let x = x.row(0);
            let inner_seed = seed_inner_frames.wrapping_add((i as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
            Ok(pair.f.eval(x) * dual_at(&pair.g, x, cfg.inner, inner_seed)?)
        })
        .collect::<Result<_>>()?;

    let rhs_terms: Vec<f64> = (0..cfg.n_frames)
        .into_par_iter()
        .map(|l| {
            let mut rng = substream(seed_frames, l as u64);
            let u = sample_stiefel(d, &mut rng)?;
            let mut prng = substream(seed_inner_pts, l as u64);
            let pts = sample_uniform_sphere(d, cfg.inner, &mut prng)?;
            let mut acc = 0.0;
            for y in pts.rows() {
                // a degenerate point has measure zero; replace it
                let t = match slice_coordinate(&u, y) {
                    Ok(t) => t,
                    Err(_) => continue,
                };
                acc += pair.f.eval(y) * pair.g.eval(t, &u);
            }
            Ok(acc / cfg.inner as f64)
        })
        .collect::<Result<_>>()?;

    let (lhs, lhs_se) = mean_se(&lhs_terms);
    let (rhs, rhs_se) = mean_se(&rhs_terms);
    Ok(DualityReport { lhs, rhs, gap: lhs - rhs, lhs_std_error: lhs_se, rhs_std_error: rhs_se })
}

/// `(R̃μ)^U` for an empirical `μ`: the circle measure of projected coordinates.
pub fn pushforward_check(mu: &SphereCloud, u: &StiefelFrame) -> Result<CircleEmpirical> {
    let coords = project_cloud(u, mu)?;
    CircleEmpirical::uniform(coords)
}
