//! Monte Carlo estimators of the spherical sliced-Wasserstein discrepancy
//!
//! ```text
//! SSW_p^p(μ, ν) = ∫_{V_{d,2}} W_p^p(P^U_# μ, P^U_# ν) dσ(U)
//! ```
//!
//! Each of the `L` slices draws a uniform Stiefel frame from its own substream of the
//! configured seed. Both clouds are projected onto the slice's great circle and the
//! circle cost is solved there. The same frames serve `μ` and `ν`, so swapping the
//! arguments reproduces the estimate exactly.

use std::cmp::Ordering;
use std::f64::consts::PI;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circle_ot::{
    self, w1_level_median, w2_uniform_sorted, w2_uniform_sorted_grad, w_circle_binary_search, CircleEmpirical,
};
use crate::error::{param, Error, Result};
use crate::sphere_geom::{sample_stiefel, slice_coordinate, SphereCloud, StiefelFrame};
use crate::stream::substream;

/// Frame resampling attempts per slice before a degenerate projection is reported.
pub const MAX_FRAME_RESAMPLES: usize = 100;

/// Slices summed together before combining, fixed so sums do not depend on threads.
const GRAD_BLOCK: usize = 16;

/// Circle solver used on every slice.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Solver {
    /// Bisection on the cut parameter, bracket width `eps`.
    BinarySearch { eps: f64 },
    /// Level-median formula, `p = 1` only.
    LevelMedian,
    /// Closed form against the uniform measure, `p = 2` only.
    UniformClosedForm,
}

impl Solver {
    pub fn name(&self) -> &'static str {
        match self {
            Solver::BinarySearch { .. } => "binary_search",
            Solver::LevelMedian => "level_median",
            Solver::UniformClosedForm => "uniform_closed_form",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SswConfig {
    pub p: u32,
    pub n_projections: usize,
    pub solver: Solver,
    pub seed: u64,
}

impl SswConfig {
    pub fn new(p: u32, n_projections: usize, solver: Solver, seed: u64) -> Result<Self> {
        let cfg = SswConfig { p, n_projections, solver, seed };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Binary-search configuration with `eps = 1e-6`.
    pub fn binary_search(p: u32, n_projections: usize, seed: u64) -> Result<Self> {
        Self::new(p, n_projections, Solver::BinarySearch { eps: 1e-6 }, seed)
    }

    pub fn validate(&self) -> Result<()> {
        if self.p < 1 {
            return Err(param("p must be at least 1"));
        }
        if self.n_projections < 1 {
            return Err(param("number of projections must be at least 1"));
        }
        match self.solver {
            Solver::BinarySearch { eps } if !(eps > 0.0 && eps.is_finite()) => {
                Err(param(format!("eps must be positive, got {eps}")))
            }
            Solver::LevelMedian if self.p != 1 => {
                Err(Error::SolverIncompatible(format!("level_median computes W_1 only, got p = {}", self.p)))
            }
            Solver::UniformClosedForm if self.p != 2 => {
                Err(Error::SolverIncompatible(format!("uniform_closed_form computes W_2 only, got p = {}", self.p)))
            }
            _ => Ok(()),
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_projections(mut self, n_projections: usize) -> Self {
        self.n_projections = n_projections;
        self
    }
}

/// Monte Carlo estimate of `SSW_p^p`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SswEstimate {
    pub value: f64,
    pub per_projection: Vec<f64>,
    pub std_error: f64,
    pub config: SswConfig,
    /// Frames redrawn because a point projected (numerically) onto the slice's pole.
    pub resampled_frames: usize,
}

impl SswEstimate {
    fn from_costs(per_projection: Vec<f64>, config: SswConfig, resampled_frames: usize) -> Self {
        let (mean, var) = mean_var(&per_projection);
        let l = per_projection.len() as f64;
        SswEstimate { value: mean, per_projection, std_error: (var / l).sqrt(), config, resampled_frames }
    }
}

/// Sample mean and unbiased sample variance (`0` for a single value).
fn mean_var(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    // offset by the first value so constant inputs average exactly
    let first = v[0];
    let mean = first + v.iter().map(|x| x - first).sum::<f64>() / n;
    if v.len() < 2 {
        return (mean, 0.0);
    }
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var)
}

/// Spread of the per-projection costs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McDiagnostics {
    pub std_error: f64,
    pub variance: f64,
    pub n_projections: usize,
}

pub fn mc_diagnostics(est: &SswEstimate) -> Result<McDiagnostics> {
    let l = est.per_projection.len();
    if l < 2 {
        return Err(param("diagnostics need at least two projections"));
    }
    let (_, variance) = mean_var(&est.per_projection);
    Ok(McDiagnostics { std_error: (variance / l as f64).sqrt(), variance, n_projections: l })
}

/// Circle coordinates of every point of `cloud` on the slice `u` (input order).
pub fn project_cloud(u: &StiefelFrame, cloud: &SphereCloud) -> Result<Vec<f64>> {
    if u.dim() != cloud.dim() {
        return Err(Error::DimensionMismatch { expected: u.dim(), got: cloud.dim() });
    }
    cloud.rows().map(|x| slice_coordinate(u, x)).collect()
}

struct Slice {
    frame: StiefelFrame,
    coords: Vec<Vec<f64>>,
    resamples: usize,
}

/// Draws the frame of slice `index`, redrawing while any cloud projects degenerately.
fn draw_slice(seed: u64, index: usize, clouds: &[&SphereCloud]) -> Result<Slice> {
    let d = clouds[0].dim();
    let mut rng = substream(seed, index as u64);
    let mut last = Error::DegenerateProjection { norm: 0.0 };
    for attempt in 0..=MAX_FRAME_RESAMPLES {
        let frame = sample_stiefel(d, &mut rng)?;
        match clouds.iter().map(|c| project_cloud(&frame, c)).collect::<Result<Vec<_>>>() {
            Ok(coords) => return Ok(Slice { frame, coords, resamples: attempt }),
            Err(e @ Error::DegenerateProjection { .. }) => last = e,
            Err(e) => return Err(e),
        }
    }
    Err(last)
}

/// The `L` frames an estimator with this seed uses for the given clouds.
pub fn projection_frames(seed: u64, n_projections: usize, clouds: &[&SphereCloud]) -> Result<Vec<StiefelFrame>> {
    check_clouds(clouds)?;
    (0..n_projections).map(|l| draw_slice(seed, l, clouds).map(|s| s.frame)).collect()
}

fn check_clouds(clouds: &[&SphereCloud]) -> Result<()> {
    let d = clouds.first().ok_or_else(|| param("no clouds given"))?.dim();
    for c in clouds {
        if c.is_empty() {
            return Err(param("clouds must be nonempty"));
        }
        if c.dim() != d {
            return Err(Error::DimensionMismatch { expected: d, got: c.dim() });
        }
    }
    Ok(())
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_unstable_by(f64::total_cmp);
    v
}

/// Order-independent pairing: the lexicographically smaller coordinate list goes first.
fn canonical<'a>(a: &'a [f64], b: &'a [f64]) -> (&'a [f64], &'a [f64]) {
    let ord = a
        .iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| *o != Ordering::Equal)
        .unwrap_or_else(|| a.len().cmp(&b.len()));
    if ord == Ordering::Greater {
        (b, a)
    } else {
        (a, b)
    }
}

fn slice_cost(x: Vec<f64>, y: Vec<f64>, cfg: &SswConfig) -> Result<f64> {
    let (x, y) = (sorted(x), sorted(y));
    let (a, b) = canonical(&x, &y);
    let mu = CircleEmpirical::from_sorted_uniform(a.to_vec());
    let nu = CircleEmpirical::from_sorted_uniform(b.to_vec());
    match cfg.solver {
        Solver::BinarySearch { eps } => Ok(w_circle_binary_search(&mu, &nu, cfg.p, eps)?.cost),
        Solver::LevelMedian => Ok(w1_level_median(&mu, &nu)),
        Solver::UniformClosedForm => Err(Error::SolverIncompatible(
            "uniform_closed_form compares against Unif(S^{d-1}); use ssw2_uniform".to_string(),
        )),
    }
}

/// `SSW_p^p(μ, ν)` estimated with `cfg.n_projections` slices.
pub fn ssw(mu: &SphereCloud, nu: &SphereCloud, cfg: &SswConfig) -> Result<SswEstimate> {
    cfg.validate()?;
    check_clouds(&[mu, nu])?;
    if cfg.solver == Solver::UniformClosedForm {
        return Err(Error::SolverIncompatible(
            "uniform_closed_form needs the uniform reference; use ssw2_uniform".to_string(),
        ));
    }
    let results: Vec<(f64, usize)> = (0..cfg.n_projections)
        .into_par_iter()
        .map(|l| {
            let mut s = draw_slice(cfg.seed, l, &[mu, nu])?;
            let y = s.coords.pop().unwrap();
            let x = s.coords.pop().unwrap();
            Ok((slice_cost(x, y, cfg)?, s.resamples))
        })
        .collect::<Result<_>>()?;
    let resampled = results.iter().map(|r| r.1).sum();
    Ok(SswEstimate::from_costs(results.into_iter().map(|r| r.0).collect(), *cfg, resampled))
}

fn check_uniform_cfg(cfg: &SswConfig) -> Result<()> {
    cfg.validate()?;
    if cfg.p != 2 {
        return Err(Error::SolverIncompatible(format!(
            "the uniform-reference estimator computes SSW_2, got p = {}",
            cfg.p
        )));
    }
    Ok(())
}

/// `SSW_2²(μ, Unif(S^{d−1}))` without sampling the uniform measure: every slice of the
/// uniform measure is uniform on the circle, so each slice uses the closed form.
pub fn ssw2_uniform(mu: &SphereCloud, cfg: &SswConfig) -> Result<SswEstimate> {
    check_uniform_cfg(cfg)?;
    check_clouds(&[mu])?;
    let results: Vec<(f64, usize)> = (0..cfg.n_projections)
        .into_par_iter()
        .map(|l| {
            let mut s = draw_slice(cfg.seed, l, &[mu])?;
            let x = sorted(s.coords.pop().unwrap());
            Ok((w2_uniform_sorted(&x), s.resamples))
        })
        .collect::<Result<_>>()?;
    let resampled = results.iter().map(|r| r.1).sum();
    Ok(SswEstimate::from_costs(results.into_iter().map(|r| r.0).collect(), *cfg, resampled))
}

/// Ambient gradients, one row per particle.
#[derive(Debug, Clone, PartialEq)]
pub struct ParticleGradient {
    dim: usize,
    data: Vec<f64>,
}

impl ParticleGradient {
    fn zeros(dim: usize, n: usize) -> Self {
        ParticleGradient { dim, data: vec![0.0; dim * n] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> std::slice::ChunksExact<'_, f64> {
        self.data.chunks_exact(self.dim)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Frobenius norm over all particles.
    pub fn norm(&self) -> f64 {
        self.data.iter().map(|g| g * g).sum::<f64>().sqrt()
    }

    fn add_assign(&mut self, other: &ParticleGradient) {
        self.data.iter_mut().zip(&other.data).for_each(|(a, b)| *a += b);
    }
}

/// Objective value together with its gradient.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientResult {
    pub value: f64,
    pub grad: ParticleGradient,
}

/// Adds `dcost/dt_i · ∂t_i/∂x_i` to `out` for one slice. `∂t/∂x = U (−z₂, z₁) / (2π |z|²)`
/// with `z = Uᵀx`; the normalisation onto the circle does not change the angle.
fn chain_through_angle(frame: &StiefelFrame, cloud: &SphereCloud, dcost_dt: &[f64], out: &mut ParticleGradient) {
    let d = cloud.dim();
    for (i, x) in cloud.rows().enumerate() {
        let z = frame.apply_transpose(x);
        let r2 = z[0] * z[0] + z[1] * z[1];
        let s = dcost_dt[i] / (2.0 * PI * r2);
        let (a, b) = (-z[1] * s, z[0] * s);
        let row = &mut out.data[i * d..(i + 1) * d];
        for (g, u) in row.iter_mut().zip(frame.rows()) {
            *g += u[0] * a + u[1] * b;
        }
    }
}

/// Runs `per_slice` over all slices and sums the gradients in a fixed block order.
fn accumulate<F>(cfg: &SswConfig, clouds: &[&SphereCloud], per_slice: F) -> Result<GradientResult>
where
    F: Fn(&Slice) -> Result<(f64, Vec<f64>)> + Sync,
{
    let mu = clouds[0];
    let (d, n) = (mu.dim(), mu.len());
    let l = cfg.n_projections;
    let blocks: Vec<(Vec<f64>, ParticleGradient)> = (0..l.div_ceil(GRAD_BLOCK))
        .into_par_iter()
        .map(|b| {
            let mut g = ParticleGradient::zeros(d, n);
            let mut costs = Vec::with_capacity(GRAD_BLOCK);
            for idx in b * GRAD_BLOCK..((b + 1) * GRAD_BLOCK).min(l) {
                let slice = draw_slice(cfg.seed, idx, clouds)?;
                let (cost, dcost_dt) = per_slice(&slice)?;
                costs.push(cost);
                chain_through_angle(&slice.frame, mu, &dcost_dt, &mut g);
            }
            Ok((costs, g))
        })
        .collect::<Result<_>>()?;
    let mut grad = ParticleGradient::zeros(d, n);
    let mut costs = Vec::with_capacity(l);
    for (c, g) in &blocks {
        costs.extend_from_slice(c);
        grad.add_assign(g);
    }
    let inv = 1.0 / l as f64;
    grad.data.iter_mut().for_each(|g| *g *= inv);
    Ok(GradientResult { value: mean_var(&costs).0, grad })
}

/// Permutation sorting `v` ascending, ties by index.
fn argsort(v: &[f64]) -> Vec<usize> {
    let mut pairs: Vec<(f64, usize)> = v.iter().copied().zip(0..).collect();
    pairs.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    pairs.into_iter().map(|(_, i)| i).collect()
}

/// Gradient of the Monte Carlo `SSW_2²(μ, Unif)` estimate with respect to each particle,
/// with the slices fixed by `cfg.seed`.
pub fn ssw2_uniform_grad(mu: &SphereCloud, cfg: &SswConfig) -> Result<GradientResult> {
    check_uniform_cfg(cfg)?;
    check_clouds(&[mu])?;
    accumulate(cfg, &[mu], |slice| {
        let t = &slice.coords[0];
        let order = argsort(t);
        let st: Vec<f64> = order.iter().map(|&i| t[i]).collect();
        let gs = w2_uniform_sorted_grad(&st);
        let mut g = vec![0.0; t.len()];
        for (k, &i) in order.iter().enumerate() {
            g[i] = gs[k];
        }
        Ok((w2_uniform_sorted(&st), g))
    })
}

/// Envelope gradient of the Monte Carlo `SSW_p^p(μ, ν)` estimate with respect to the
/// particles of `μ`, holding frames, sort order and optimal shift of each slice fixed.
/// The level-median solver is differentiated through a bisection shift with `eps = 1e-9`.
pub fn ssw_grad(mu: &SphereCloud, nu: &SphereCloud, cfg: &SswConfig) -> Result<GradientResult> {
    cfg.validate()?;
    check_clouds(&[mu, nu])?;
    let eps = match cfg.solver {
        Solver::BinarySearch { eps } => eps,
        Solver::LevelMedian => 1e-9,
        Solver::UniformClosedForm => {
            return Err(Error::SolverIncompatible(
                "uniform_closed_form gradients go through ssw2_uniform_grad".to_string(),
            ))
        }
    };
    accumulate(cfg, &[mu, nu], |slice| {
        let t = &slice.coords[0];
        let order = argsort(t);
        let a = CircleEmpirical::from_sorted_uniform(order.iter().map(|&i| t[i]).collect());
        let b = CircleEmpirical::from_sorted_uniform(sorted(slice.coords[1].clone()));
        let shift = w_circle_binary_search(&a, &b, cfg.p, eps)?;
        let gs = circle_ot::transport_gradient(&a, &b, cfg.p, shift.alpha);
        let mut g = vec![0.0; t.len()];
        for (k, &i) in order.iter().enumerate() {
            g[i] = gs[k];
        }
        Ok((shift.cost, g))
    })
}

/// Points in `ℝ^d`, row-major, for the Euclidean baseline.
#[derive(Debug, Clone, PartialEq)]
pub struct EuclideanCloud {
    dim: usize,
    data: Vec<f64>,
}

impl EuclideanCloud {
    pub fn new(dim: usize, data: Vec<f64>) -> Result<Self> {
        if dim < 1 || data.is_empty() || !data.len().is_multiple_of(dim) {
            return Err(param("invalid Euclidean cloud shape"));
        }
        Ok(EuclideanCloud { dim, data })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn rows(&self) -> std::slice::ChunksExact<'_, f64> {
        self.data.chunks_exact(self.dim)
    }
}

impl From<&SphereCloud> for EuclideanCloud {
    fn from(c: &SphereCloud) -> Self {
        EuclideanCloud { dim: c.dim(), data: c.as_slice().to_vec() }
    }
}

/// `∫₀¹ |F⁻¹(u) − G⁻¹(u)|^p du` for sorted uniform samples.
pub fn wasserstein_1d_sorted(a: &[f64], b: &[f64], p: u32) -> f64 {
    let pw = |v: f64| v.abs().powi(p as i32);
    if a.len() == b.len() {
        return a.iter().zip(b).map(|(x, y)| pw(x - y)).sum::<f64>() / a.len() as f64;
    }
    let (n, m) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut t = 0.0;
    let mut acc = 0.0;
    while i < a.len() && j < b.len() {
        let (ea, eb) = ((i + 1) as f64 / n, (j + 1) as f64 / m);
        let e = ea.min(eb);
        acc += (e - t) * pw(a[i] - b[j]);
        t = e;
        if ea <= eb {
            i += 1;
        }
        if eb <= ea {
            j += 1;
        }
    }
    acc
}

/// Euclidean sliced-Wasserstein `SW_p^p` over `n_projections` uniform directions.
pub fn sw_euclidean(mu: &EuclideanCloud, nu: &EuclideanCloud, p: u32, n_projections: usize, seed: u64) -> Result<f64> {
    if p < 1 || n_projections < 1 {
        return Err(param("p and the number of projections must be at least 1"));
    }
    if mu.dim != nu.dim {
        return Err(Error::DimensionMismatch { expected: mu.dim, got: nu.dim });
    }
    let d = mu.dim;
    let costs: Vec<f64> = (0..n_projections)
        .into_par_iter()
        .map(|l| {
            let mut rng = substream(seed, l as u64);
            let theta: Vec<f64> = if d == 1 {
                vec![if rng.random::<bool>() { 1.0 } else { -1.0 }]
            } else {
                crate::distributions::sample_uniform_sphere(d, 1, &mut rng).expect("d >= 2").row(0).to_vec()
            };
            let proj = |c: &EuclideanCloud| sorted(c.rows().map(|r| crate::sphere_geom::dot(r, &theta)).collect());
            wasserstein_1d_sorted(&proj(mu), &proj(nu), p)
        })
        .collect();
    Ok(costs.iter().sum::<f64>() / n_projections as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{sample_uniform_sphere, sample_vmf, VmfParams};
    use crate::sphere_geom::SpherePoint;
    use crate::stream::rng_from_seed;

    fn bs_cfg(p: u32, l: usize, seed: u64) -> SswConfig {
        SswConfig::new(p, l, Solver::BinarySearch { eps: 1e-10 }, seed).unwrap()
    }

    fn uni_cfg(l: usize, seed: u64) -> SswConfig {
        SswConfig::new(2, l, Solver::UniformClosedForm, seed).unwrap()
    }

    fn vmf(mu: &[f64], kappa: f64, n: usize, seed: u64) -> SphereCloud {
        let p = VmfParams::new(SpherePoint::normalize(mu.to_vec()).unwrap(), kappa).unwrap();
        sample_vmf(&p, n, &mut rng_from_seed(seed)).unwrap()
    }

    #[test]
    fn config_validation() {
        assert!(matches!(SswConfig::new(2, 10, Solver::LevelMedian, 0), Err(Error::SolverIncompatible(_))));
        assert!(matches!(SswConfig::new(1, 10, Solver::UniformClosedForm, 0), Err(Error::SolverIncompatible(_))));
        assert!(SswConfig::new(1, 0, Solver::LevelMedian, 0).is_err());
        assert!(SswConfig::new(0, 3, Solver::BinarySearch { eps: 1e-6 }, 0).is_err());
        assert!(SswConfig::new(1, 3, Solver::BinarySearch { eps: -1.0 }, 0).is_err());
    }

    #[test]
    fn identical_clouds_give_zero() {
        let mu = vmf(&[1.0, 0.0, 0.0], 3.0, 100, 1);
        for l in [1usize, 7, 50] {
            assert!(ssw(&mu, &mu, &bs_cfg(2, l, 3)).unwrap().value <= 1e-10);
            let lm = SswConfig::new(1, l, Solver::LevelMedian, 3).unwrap();
            assert!(ssw(&mu, &mu, &lm).unwrap().value <= 1e-10);
        }
    }

    #[test]
    fn antipodal_diracs_are_bounded() {
        let x = SphereCloud::from_rows(3, vec![0.0, 0.6, 0.8], 1e-12).unwrap();
        let y = SphereCloud::from_rows(3, vec![0.0, -0.6, -0.8], 1e-12).unwrap();
        let est = ssw(&x, &y, &bs_cfg(1, 200, 4)).unwrap();
        assert!(est.per_projection.iter().all(|&c| c <= 0.5 + 1e-12));
        assert!(est.value <= 0.5);
        // antipodal points stay antipodal on every great circle
        assert!((est.value - 0.5).abs() < 1e-9);
    }

    #[test]
    fn estimate_bookkeeping() {
        let mu = vmf(&[1.0, 0.0, 0.0], 1.0, 50, 2);
        let nu = vmf(&[0.0, 1.0, 0.0], 1.0, 60, 3);
        let est = ssw(&mu, &nu, &bs_cfg(2, 40, 5)).unwrap();
        let mean = est.per_projection.iter().sum::<f64>() / 40.0;
        assert!((est.value - mean).abs() < 1e-12);
        let diag = mc_diagnostics(&est).unwrap();
        assert!((diag.std_error - (diag.variance / 40.0).sqrt()).abs() < 1e-15);
        assert_eq!(diag.std_error, est.std_error);
        let const_est = SswEstimate::from_costs(vec![0.25; 10], est.config, 0);
        assert_eq!(mc_diagnostics(&const_est).unwrap().std_error, 0.0);
        let one = SswEstimate::from_costs(vec![0.25], est.config, 0);
        assert!(mc_diagnostics(&one).is_err());
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let a = vmf(&[1.0, 0.0, 0.0], 1.0, 5, 1);
        let b = vmf(&[1.0, 0.0, 0.0, 0.0], 1.0, 5, 1);
        assert!(matches!(ssw(&a, &b, &bs_cfg(1, 3, 0)), Err(Error::DimensionMismatch { .. })));
        assert!(matches!(ssw(&a, &a, &uni_cfg(3, 0)), Err(Error::SolverIncompatible(_))));
    }

    #[test]
    fn symmetric_and_deterministic() {
        let mu = vmf(&[1.0, 0.0, 0.0], 2.0, 80, 1);
        let nu = vmf(&[0.0, 0.0, 1.0], 5.0, 70, 2);
        for cfg in [bs_cfg(2, 30, 9), bs_cfg(3, 30, 9), SswConfig::new(1, 30, Solver::LevelMedian, 9).unwrap()] {
            let a = ssw(&mu, &nu, &cfg).unwrap();
            let b = ssw(&nu, &mu, &cfg).unwrap();
            assert_eq!(a.value, b.value);
            assert_eq!(a.per_projection, b.per_projection);
            assert_eq!(a, ssw(&mu, &nu, &cfg).unwrap());
        }
    }

    #[test]
    fn uniform_fast_path_examples() {
        let dirac = SphereCloud::from_rows(3, vec![0.0, 0.0, 1.0], 1e-12).unwrap();
        let est = ssw2_uniform(&dirac, &uni_cfg(25, 1)).unwrap();
        assert!(est.per_projection.iter().all(|&c| c == 1.0 / 12.0));
        assert_eq!(est.value, 1.0 / 12.0);

        let big = sample_uniform_sphere(3, 100_000, &mut rng_from_seed(2)).unwrap();
        assert!(ssw2_uniform(&big, &uni_cfg(20, 3)).unwrap().value < 1e-3);
    }

    #[test]
    fn uniform_fast_path_matches_explicit_uniform_samples() {
        let mu = vmf(&[0.0, 1.0, 0.0], 5.0, 1000, 4);
        let fast = ssw2_uniform(&mu, &uni_cfg(400, 5)).unwrap();
        let unif = sample_uniform_sphere(3, 1000, &mut rng_from_seed(6)).unwrap();
        let slow = ssw(&mu, &unif, &bs_cfg(2, 400, 5)).unwrap();
        // the explicit uniform sample adds its own O(1/n) finite-sample bias
        let tol = 3.0 * (fast.std_error.powi(2) + slow.std_error.powi(2)).sqrt() + 1.0 / 1000.0;
        assert!((fast.value - slow.value).abs() < tol, "{} vs {}", fast.value, slow.value);
    }

    #[test]
    fn uniform_gradient_of_single_particle_vanishes() {
        let dirac = SphereCloud::from_rows(3, vec![0.6, 0.0, 0.8], 1e-12).unwrap();
        let g = ssw2_uniform_grad(&dirac, &uni_cfg(10, 1)).unwrap();
        assert!(g.grad.norm() < 1e-15);
        assert_eq!(g.value, 1.0 / 12.0);
    }

    fn perturbed(c: &SphereCloud, i: usize, k: usize, h: f64) -> SphereCloud {
        let mut data = c.as_slice().to_vec();
        data[i * c.dim() + k] += h;
        SphereCloud::from_unit_rows(c.dim(), data)
    }

    #[test]
    fn uniform_gradient_matches_finite_differences() {
        for d in [3usize, 10] {
            let mu = sample_uniform_sphere(d, 20, &mut rng_from_seed(d as u64)).unwrap();
            let cfg = uni_cfg(50, 11);
            let g = ssw2_uniform_grad(&mu, &cfg).unwrap();
            let h = 1e-5;
            let mut fd = Vec::new();
            for i in 0..mu.len() {
                for k in 0..d {
                    let up = ssw2_uniform(&perturbed(&mu, i, k, h), &cfg).unwrap().value;
                    let dn = ssw2_uniform(&perturbed(&mu, i, k, -h), &cfg).unwrap().value;
                    fd.push((up - dn) / (2.0 * h));
                }
            }
            let diff: f64 = fd.iter().zip(g.grad.as_slice()).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            assert!(diff / g.grad.norm() < 1e-5, "d = {d}: relative error {}", diff / g.grad.norm());
        }
    }

    #[test]
    fn general_gradient_matches_finite_differences() {
        let mu = vmf(&[1.0, 0.0, 0.0], 2.0, 15, 1);
        let nu = vmf(&[0.0, 1.0, 0.0], 2.0, 12, 2);
        let cfg = SswConfig::new(2, 30, Solver::BinarySearch { eps: 1e-13 }, 4).unwrap();
        let g = ssw_grad(&mu, &nu, &cfg).unwrap();
        let h = 1e-6;
        let mut fd = Vec::new();
        for i in 0..mu.len() {
            for k in 0..3 {
                let up = ssw(&perturbed(&mu, i, k, h), &nu, &cfg).unwrap().value;
                let dn = ssw(&perturbed(&mu, i, k, -h), &nu, &cfg).unwrap().value;
                fd.push((up - dn) / (2.0 * h));
            }
        }
        let diff: f64 = fd.iter().zip(g.grad.as_slice()).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        assert!(diff / g.grad.norm() < 1e-5);
    }

    #[test]
    fn general_gradient_against_grid_uniform_matches_fast_path() {
        let mu = vmf(&[1.0, 0.0, 0.0], 2.0, 10, 1);
        let cfg = uni_cfg(5, 7);
        let fast = ssw2_uniform_grad(&mu, &cfg).unwrap();
        // 1-D sanity: per-slice derivative of the closed form equals the envelope form
        let t = vec![0.05, 0.2, 0.21, 0.6, 0.9];
        let grid: Vec<f64> = (0..20_000).map(|i| (i as f64 + 0.5) / 20_000.0).collect();
        let a = CircleEmpirical::from_sorted_uniform(t.clone());
        let b = CircleEmpirical::from_sorted_uniform(grid);
        let alpha = crate::circle_ot::optimal_shift_uniform(&a);
        let env = crate::circle_ot::transport_gradient(&a, &b, 2, alpha);
        let closed = w2_uniform_sorted_grad(&t);
        for (e, c) in env.iter().zip(&closed) {
            assert!((e - c).abs() < 1e-4);
        }
        assert!(fast.grad.norm() > 0.0);
    }

    #[test]
    fn tangent_descent_decreases_fixed_frame_objective() {
        let mu = vmf(&[0.0, 0.0, 1.0], 4.0, 30, 8);
        let cfg = uni_cfg(64, 2);
        let g = ssw2_uniform_grad(&mu, &cfg).unwrap();
        let gamma = 1e-2;
        let mut data = Vec::new();
        for (x, gx) in mu.rows().zip(g.grad.rows()) {
            let tg = crate::sphere_geom::tangent_coords(x, gx);
            assert!(crate::sphere_geom::dot(&tg, x).abs() < 1e-14);
            data.extend(crate::sphere_geom::exp_coords(x, &tg.iter().map(|v| -gamma * v).collect::<Vec<_>>()));
        }
        let moved = SphereCloud::from_unit_rows(3, data);
        assert!(ssw2_uniform(&moved, &cfg).unwrap().value < g.value);
    }

    #[test]
    fn sliced_euclidean_examples() {
        let a = EuclideanCloud::new(3, vec![0.3, -1.0, 2.0, 0.0, 0.5, 0.5]).unwrap();
        assert_eq!(sw_euclidean(&a, &a, 2, 20, 1).unwrap(), 0.0);

        // two Diracs: E⟨a − b, θ⟩² = |a − b|² / d
        let x = EuclideanCloud::new(3, vec![1.0, 2.0, -1.0]).unwrap();
        let y = EuclideanCloud::new(3, vec![0.0, 0.5, 1.0]).unwrap();
        let l = 200_000;
        let v = sw_euclidean(&x, &y, 2, l, 2).unwrap();
        let expected = (1.0 + 2.25 + 4.0) / 3.0;
        // Var⟨v, θ⟩² ≤ E⟨v, θ⟩⁴ ≤ |v|⁴
        let se = (1.0f64 + 2.25 + 4.0) / (l as f64).sqrt();
        assert!((v - expected).abs() < 5.0 * se, "{v} vs {expected}");

        let p = EuclideanCloud::new(1, vec![0.3, -2.0, 5.0]).unwrap();
        let q = EuclideanCloud::new(1, vec![1.0, 1.5, -0.5]).unwrap();
        let direct = wasserstein_1d_sorted(&[-2.0, 0.3, 5.0], &[-0.5, 1.0, 1.5], 2);
        assert!((sw_euclidean(&p, &q, 2, 9, 3).unwrap() - direct).abs() < 1e-14);
    }

    #[test]
    fn one_dimensional_wasserstein_unequal_sizes() {
        // quantile pieces: [0,1/3): 0 vs 0, [1/3,1/2): 1 vs 0, [1/2,2/3): 1 vs 2, [2/3,1): 2 vs 2
        let v = wasserstein_1d_sorted(&[0.0, 1.0, 2.0], &[0.0, 2.0], 1);
        assert!((v - (1.0 / 6.0 + 1.0 / 6.0)).abs() < 1e-15);
    }

    #[test]
    fn pushforward_coordinates_are_reused() {
        let mu = vmf(&[1.0, 1.0, 0.0], 1.0, 20, 3);
        let frames = projection_frames(4, 5, &[&mu]).unwrap();
        for (l, f) in frames.iter().enumerate() {
            let s = draw_slice(4, l, &[&mu]).unwrap();
            assert_eq!(project_cloud(f, &mu).unwrap(), s.coords[0]);
        }
    }
}
