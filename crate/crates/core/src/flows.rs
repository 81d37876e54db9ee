//! Particle flows and Langevin sampling on the sphere.
//!
//! Flow updates move particle `i` along `−n ∇_{x_i} F`, the Wasserstein gradient of a
//! functional `F` of the empirical measure evaluated at `x_i`. With this scaling the step
//! size does not depend on the number of particles.

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::distributions::{vmf_log_density, VmfMixture};
use crate::error::{param, Error, Result};
use crate::sphere_geom::{dot, exp_coords, norm, tangent_coords, SphereCloud, SpherePoint};
use crate::ssw::{ssw2_uniform_grad, ssw_grad, GradientResult, Solver, SswConfig};
use crate::stream::substream;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepMode {
    RiemannianExp,
    Projected,
}

#[derive(Debug, Clone, PartialEq)]
pub enum FlowTarget {
    Cloud(SphereCloud),
    /// `Unif(S^{d−1})`, through the closed-form `SSW_2²` gradient.
    Uniform,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowConfig {
    pub step_size: f64,
    pub n_steps: usize,
    pub mode: StepMode,
    /// Frames are redrawn every iteration; the seed field is ignored.
    pub ssw_cfg: SswConfig,
    pub target: FlowTarget,
    /// Keep every `k`-th state in the trajectory (first and last are always kept).
    pub snapshot_every: usize,
}

impl FlowConfig {
    pub fn validate(&self) -> Result<()> {
        check_step(self.step_size)?;
        if self.n_steps < 1 {
            return Err(param("a flow needs at least one step"));
        }
        match (&self.target, self.ssw_cfg.solver) {
            (FlowTarget::Uniform, _) if self.ssw_cfg.p != 2 => {
                Err(Error::SolverIncompatible("the uniform target is only available for p = 2".to_string()))
            }
            (FlowTarget::Cloud(_), Solver::UniformClosedForm) => {
                Err(Error::SolverIncompatible("uniform_closed_form needs the uniform target".to_string()))
            }
            _ => self.ssw_cfg.validate(),
        }
    }
}

fn check_step(step: f64) -> Result<()> {
    if step.is_finite() && step >= 0.0 {
        Ok(())
    } else {
        Err(param(format!("step size must be finite and non-negative, got {step}")))
    }
}

/// `exp_x(−γ Proj_x(g))`.
pub fn riemannian_step(x: &SpherePoint, euclidean_grad: &[f64], step: f64) -> Result<SpherePoint> {
    check_dim(x, euclidean_grad)?;
    Ok(SpherePoint::from_unit_unchecked(riemannian_coords(x.coords(), euclidean_grad, step)))
}

fn riemannian_coords(x: &[f64], g: &[f64], step: f64) -> Vec<f64> {
    let v: Vec<f64> = tangent_coords(x, g).iter().map(|t| -step * t).collect();
    exp_coords(x, &v)
}

/// `(x − γ g) / ‖x − γ g‖`.
pub fn projected_step(x: &SpherePoint, euclidean_grad: &[f64], step: f64) -> Result<SpherePoint> {
    check_dim(x, euclidean_grad)?;
    projected_coords(x.coords(), euclidean_grad, step).map(SpherePoint::from_unit_unchecked)
}

fn projected_coords(x: &[f64], g: &[f64], step: f64) -> Result<Vec<f64>> {
    let mut y: Vec<f64> = x.iter().zip(g).map(|(a, b)| a - step * b).collect();
    let r = norm(&y);
    if !(r > 1e-12 && r.is_finite()) {
        return Err(Error::StepSize);
    }
    y.iter_mut().for_each(|c| *c /= r);
    Ok(y)
}

fn check_dim(x: &SpherePoint, g: &[f64]) -> Result<()> {
    if x.dim() != g.len() {
        return Err(Error::DimensionMismatch { expected: x.dim(), got: g.len() });
    }
    Ok(())
}

/// Moves every particle by `−step · n · grad_i`.
pub fn step_cloud(cloud: &SphereCloud, gr: &GradientResult, step: f64, mode: StepMode) -> Result<SphereCloud> {
    let d = cloud.dim();
    let scale = step * cloud.len() as f64;
    let mut data = Vec::with_capacity(cloud.as_slice().len());
    for (x, g) in cloud.rows().zip(gr.grad.rows()) {
        let next = match mode {
            StepMode::RiemannianExp => riemannian_coords(x, g, scale),
            StepMode::Projected => projected_coords(x, g, scale)?,
        };
        data.extend(next);
    }
    Ok(SphereCloud::from_unit_rows(d, data))
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowTrajectory {
    /// `(iteration, state)` pairs; iteration 0 is the initial cloud.
    pub snapshots: Vec<(usize, SphereCloud)>,
    /// Objective estimate at the start of every iteration, with that iteration's frames.
    pub objective: Vec<f64>,
}

impl FlowTrajectory {
    pub fn final_cloud(&self) -> &SphereCloud {
        &self.snapshots.last().expect("trajectories keep the initial state").1
    }
}

fn flow_gradient(x: &SphereCloud, target: &FlowTarget, cfg: &SswConfig) -> Result<GradientResult> {
    match target {
        FlowTarget::Uniform => ssw2_uniform_grad(x, &SswConfig { solver: Solver::UniformClosedForm, ..*cfg }),
        FlowTarget::Cloud(nu) => ssw_grad(x, nu, cfg),
    }
}

/// Stochastic particle descent on `SSW_p^p(·, target)` with fresh frames every iteration.
pub fn ssw_gradient_flow<R: Rng + ?Sized>(init: &SphereCloud, cfg: &FlowConfig, rng: &mut R) -> Result<FlowTrajectory> {
    cfg.validate()?;
    if let FlowTarget::Cloud(nu) = &cfg.target {
        if nu.dim() != init.dim() {
            return Err(Error::DimensionMismatch { expected: init.dim(), got: nu.dim() });
        }
    }
    let mut x = init.clone();
    let mut snapshots = vec![(0, x.clone())];
    let mut objective = Vec::with_capacity(cfg.n_steps);
    for k in 1..=cfg.n_steps {
        let frames = cfg.ssw_cfg.with_seed(rng.random());
        let gr = flow_gradient(&x, &cfg.target, &frames)?;
        objective.push(gr.value);
        x = step_cloud(&x, &gr, cfg.step_size, cfg.mode)?;
        if k == cfg.n_steps || (cfg.snapshot_every > 0 && k % cfg.snapshot_every == 0) {
            snapshots.push((k, x.clone()));
        }
    }
    Ok(FlowTrajectory { snapshots, objective })
}

/// A potential `V` on the sphere known through its ambient gradient.
pub trait Potential: Send + Sync {
    fn dim(&self) -> usize;
    fn value(&self, x: &[f64]) -> f64;
    fn grad(&self, x: &[f64]) -> Vec<f64>;
}

/// `V(x) = −κ μᵀx`, the negative log-density of `vMF(μ, κ)` up to a constant.
#[derive(Debug, Clone, PartialEq)]
pub struct VmfPotential {
    pub mu: SpherePoint,
    pub kappa: f64,
}

impl Potential for VmfPotential {
    fn dim(&self) -> usize {
        self.mu.dim()
    }

    fn value(&self, x: &[f64]) -> f64 {
        -self.kappa * dot(self.mu.coords(), x)
    }

    fn grad(&self, x: &[f64]) -> Vec<f64> {
        let _ = x;
        self.mu.coords().iter().map(|m| -self.kappa * m).collect()
    }
}

/// `V(x) = −log Σ_k w_k f_vMF(x; μ_k, κ_k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MixturePotential {
    pub mixture: VmfMixture,
}

impl MixturePotential {
    fn log_terms(&self, x: &[f64]) -> Vec<f64> {
        let p = SpherePoint::from_unit_unchecked(x.to_vec());
        self.mixture
            .components()
            .iter()
            .zip(self.mixture.weights())
            .map(|(c, w)| w.ln() + vmf_log_density(c, &p).unwrap_or(f64::NEG_INFINITY))
            .collect()
    }
}

fn log_sum_exp(v: &[f64]) -> f64 {
    let m = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    m + v.iter().map(|a| (a - m).exp()).sum::<f64>().ln()
}

impl Potential for MixturePotential {
    fn dim(&self) -> usize {
        self.mixture.dim()
    }

    fn value(&self, x: &[f64]) -> f64 {
        -log_sum_exp(&self.log_terms(x))
    }

    fn grad(&self, x: &[f64]) -> Vec<f64> {
        let t = self.log_terms(x);
        let z = log_sum_exp(&t);
        let mut g = vec![0.0; x.len()];
        for (c, lt) in self.mixture.components().iter().zip(&t) {
            let r = (lt - z).exp() * c.kappa();
            g.iter_mut().zip(c.mu().coords()).for_each(|(a, m)| *a -= r * m);
        }
        g
    }
}

#[derive(Clone)]
pub struct GlaConfig {
    pub step_size: f64,
    pub n_steps: usize,
    pub potential: Arc<dyn Potential>,
}

impl fmt::Debug for GlaConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GlaConfig")
            .field("step_size", &self.step_size)
            .field("n_steps", &self.n_steps)
            .field("dim", &self.potential.dim())
            .finish()
    }
}

impl GlaConfig {
    pub fn new(step_size: f64, n_steps: usize, potential: Arc<dyn Potential>) -> Result<Self> {
        if !(step_size > 0.0 && step_size.is_finite()) {
            return Err(param(format!("GLA step size must be positive, got {step_size}")));
        }
        Ok(GlaConfig { step_size, n_steps, potential })
    }
}

/// One GLA step with an explicit ambient noise vector `z`.
pub fn gla_step_with_noise(x: &SpherePoint, cfg: &GlaConfig, z: &[f64]) -> Result<SpherePoint> {
    check_dim(x, z)?;
    if cfg.potential.dim() != x.dim() {
        return Err(Error::DimensionMismatch { expected: cfg.potential.dim(), got: x.dim() });
    }
    Ok(SpherePoint::from_unit_unchecked(gla_coords(x.coords(), cfg, z)))
}

fn gla_coords(x: &[f64], cfg: &GlaConfig, z: &[f64]) -> Vec<f64> {
    let g = cfg.potential.grad(x);
    let s = (2.0 * cfg.step_size).sqrt();
    let v: Vec<f64> = g.iter().zip(z).map(|(gi, zi)| -cfg.step_size * gi + s * zi).collect();
    exp_coords(x, &tangent_coords(x, &v))
}

/// `exp_x(Proj_x(−γ∇V(x) + √(2γ) Z))` with `Z ~ N(0, I_d)`.
pub fn gla_step<R: Rng + ?Sized>(x: &SpherePoint, cfg: &GlaConfig, rng: &mut R) -> Result<SpherePoint> {
    let z = normal_vec(x.dim(), rng);
    gla_step_with_noise(x, cfg, &z)
}

fn normal_vec<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<f64> {
    (0..d).map(|_| rng.sample(StandardNormal)).collect()
}

/// The `cfg.n_steps` states visited after `x0`.
pub fn gla_chain<R: Rng + ?Sized>(x0: &SpherePoint, cfg: &GlaConfig, rng: &mut R) -> Result<SphereCloud> {
    if cfg.n_steps < 1 {
        return Err(param("a chain needs at least one step"));
    }
    let d = x0.dim();
    let mut x = gla_step(x0, cfg, rng)?.into_coords();
    let mut out = Vec::with_capacity(d * cfg.n_steps);
    out.extend_from_slice(&x);
    for _ in 1..cfg.n_steps {
        let z = normal_vec(d, rng);
        x = gla_coords(&x, cfg, &z);
        out.extend_from_slice(&x);
    }
    Ok(SphereCloud::from_unit_rows(d, out))
}

/// Runs `n_steps` GLA steps from every particle; particle `i` uses substream `i` of `seed`.
pub fn gla_particles(cloud: &SphereCloud, cfg: &GlaConfig, n_steps: usize, seed: u64) -> Result<SphereCloud> {
    let d = cloud.dim();
    if cfg.potential.dim() != d {
        return Err(Error::DimensionMismatch { expected: cfg.potential.dim(), got: d });
    }
    let rows: Vec<Vec<f64>> = cloud
        .rows()
        .collect::<Vec<_>>()
        .into_par_iter()
        .enumerate()
        .map(|(i, x)| {
            let mut rng = substream(seed, i as u64);
            let mut x = x.to_vec();
            for _ in 0..n_steps {
                let z = normal_vec(d, &mut rng);
                x = gla_coords(&x, cfg, &z);
            }
            x
        })
        .collect();
    Ok(SphereCloud::from_unit_rows(d, rows.concat()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SswviConfig {
    pub outer_steps: usize,
    pub inner_steps: usize,
    pub step_size: f64,
    pub mode: StepMode,
    pub ssw_cfg: SswConfig,
    pub snapshot_every: usize,
}

/// Particle variational loop: each outer step refines the particles with
/// `inner_steps` GLA steps, then takes one `SSW_2²` descent step toward the refined cloud.
/// The objective records `SSW_2²(current, refined)`.
pub fn sswvi_particles<R: Rng + ?Sized>(
    init: &SphereCloud,
    gla: &GlaConfig,
    cfg: &SswviConfig,
    rng: &mut R,
) -> Result<FlowTrajectory> {
    check_step(cfg.step_size)?;
    cfg.ssw_cfg.validate()?;
    if cfg.ssw_cfg.solver == Solver::UniformClosedForm {
        return Err(Error::SolverIncompatible("the refined cloud is not uniform".to_string()));
    }
    let mut x = init.clone();
    let mut snapshots = vec![(0, x.clone())];
    let mut objective = Vec::with_capacity(cfg.outer_steps);
    for k in 1..=cfg.outer_steps {
        let refined = gla_particles(&x, gla, cfg.inner_steps, rng.random())?;
        let gr = ssw_grad(&x, &refined, &cfg.ssw_cfg.with_seed(rng.random()))?;
        objective.push(gr.value);
        x = step_cloud(&x, &gr, cfg.step_size, cfg.mode)?;
        if k == cfg.outer_steps || (cfg.snapshot_every > 0 && k % cfg.snapshot_every == 0) {
            snapshots.push((k, x.clone()));
        }
    }
    if snapshots.last().map(|s| s.0) != Some(cfg.outer_steps) {
        snapshots.push((cfg.outer_steps, x));
    }
    Ok(FlowTrajectory { snapshots, objective })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{sample_uniform_sphere, sample_vmf, VmfParams};
    use crate::sphere_geom::sphere_distance;
    use crate::ssw::ssw;
    use crate::stream::rng_from_seed;

    fn pt(v: &[f64]) -> SpherePoint {
        SpherePoint::normalize(v.to_vec()).unwrap()
    }

    fn north() -> SpherePoint {
        pt(&[0.0, 0.0, 1.0])
    }

    fn vmf_gla(step: f64, n_steps: usize) -> GlaConfig {
        GlaConfig::new(step, n_steps, Arc::new(VmfPotential { mu: north(), kappa: 10.0 })).unwrap()
    }

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).abs() < tol)
    }

    #[test]
    fn riemannian_step_examples() {
        let x = pt(&[1.0, 0.0, 0.0]);
        assert_eq!(riemannian_step(&x, &[0.0; 3], 0.3).unwrap(), x);
        assert!(close(riemannian_step(&x, &[4.0, 0.0, 0.0], 0.3).unwrap().coords(), x.coords(), 1e-15));
        let y = riemannian_step(&x, &[0.0, -1.0, 0.0], std::f64::consts::FRAC_PI_2).unwrap();
        assert!(close(y.coords(), &[0.0, 1.0, 0.0], 1e-15));
    }

    #[test]
    fn projected_step_examples() {
        let x = pt(&[0.3, 0.4, -0.2]);
        assert!(close(projected_step(&x, &[0.0; 3], 1.0).unwrap().coords(), x.coords(), 1e-15));
        let y = projected_step(&x, &[1.0, -2.0, 0.5], 0.7).unwrap();
        assert!((norm(y.coords()) - 1.0).abs() < 1e-12);
        let e = pt(&[1.0, 0.0, 0.0]);
        assert!(matches!(projected_step(&e, &[1.0, 0.0, 0.0], 1.0), Err(Error::StepSize)));
    }

    #[test]
    fn step_modes_agree_to_second_order() {
        let x = pt(&[0.2, -0.7, 0.4, 0.1]);
        let g = [0.5, 1.0, -0.3, 0.8];
        let steps = [1e-1, 1e-2, 1e-3, 1e-4];
        let gaps: Vec<f64> = steps
            .iter()
            .map(|&s| {
                let a = riemannian_step(&x, &g, s).unwrap();
                let b = projected_step(&x, &g, s).unwrap();
                a.coords().iter().zip(b.coords()).map(|(u, v)| (u - v).powi(2)).sum::<f64>().sqrt()
            })
            .collect();
        let lx: Vec<f64> = steps.iter().map(|s| s.ln()).collect();
        let ly: Vec<f64> = gaps.iter().map(|g| g.ln()).collect();
        let (mx, my) = (lx.iter().sum::<f64>() / 4.0, ly.iter().sum::<f64>() / 4.0);
        let slope = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum::<f64>()
            / lx.iter().map(|a| (a - mx).powi(2)).sum::<f64>();
        assert!((slope - 2.0).abs() < 0.1, "slope {slope}");
    }

    #[test]
    fn flow_from_target_stays_put() {
        let mut rng = rng_from_seed(1);
        let target = sample_uniform_sphere(3, 100, &mut rng).unwrap();
        let cfg = FlowConfig {
            step_size: 0.0,
            n_steps: 5,
            mode: StepMode::RiemannianExp,
            ssw_cfg: SswConfig::binary_search(2, 50, 0).unwrap(),
            target: FlowTarget::Cloud(target.clone()),
            snapshot_every: 1,
        };
        let tr = ssw_gradient_flow(&target, &cfg, &mut rng).unwrap();
        assert!(tr.objective.iter().all(|v| *v <= 1e-8));
        assert_eq!(tr.snapshots.len(), 6);
        assert_eq!(tr.final_cloud(), &target);
    }

    #[test]
    fn flow_config_rejects_bad_setups() {
        let base = FlowConfig {
            step_size: 1.0,
            n_steps: 1,
            mode: StepMode::Projected,
            ssw_cfg: SswConfig::binary_search(1, 10, 0).unwrap(),
            target: FlowTarget::Uniform,
            snapshot_every: 0,
        };
        assert!(matches!(base.validate(), Err(Error::SolverIncompatible(_))));
        assert!(FlowConfig { step_size: -1.0, ..base.clone() }.validate().is_err());
        assert!(FlowConfig { n_steps: 0, ..base.clone() }.validate().is_err());
    }

    fn mean_direction(c: &SphereCloud) -> (Vec<f64>, f64) {
        let m = c.mean();
        let r = norm(&m);
        (m.iter().map(|a| a / r).collect(), r)
    }

    #[test]
    fn flow_to_vmf_target_converges() {
        let mut rng = rng_from_seed(7);
        let target = sample_vmf(&VmfParams::new(north(), 10.0).unwrap(), 200, &mut rng).unwrap();
        let init = sample_uniform_sphere(3, 200, &mut rng).unwrap();
        let cfg = FlowConfig {
            step_size: 5.0,
            n_steps: 300,
            mode: StepMode::RiemannianExp,
            ssw_cfg: SswConfig::binary_search(2, 50, 0).unwrap(),
            target: FlowTarget::Cloud(target.clone()),
            snapshot_every: 0,
        };
        let tr = ssw_gradient_flow(&init, &cfg, &mut rng).unwrap();
        let eval = SswConfig::binary_search(2, 500, 99).unwrap();
        let before = ssw(&init, &target, &eval).unwrap().value;
        let after = ssw(tr.final_cloud(), &target, &eval).unwrap().value;
        assert!(after < 0.1 * before, "{before} -> {after}");
        let (dir, _) = mean_direction(tr.final_cloud());
        assert!(dir[2] > 0.9);
        for (_, c) in &tr.snapshots {
            assert!(c.rows().all(|r| (norm(r) - 1.0).abs() < 1e-10));
        }
    }

    #[test]
    fn flow_to_uniform_reduces_objective_and_is_deterministic() {
        let mut rng = rng_from_seed(3);
        let init = sample_vmf(&VmfParams::new(north(), 20.0).unwrap(), 100, &mut rng).unwrap();
        let cfg = FlowConfig {
            step_size: 5.0,
            n_steps: 100,
            mode: StepMode::Projected,
            ssw_cfg: SswConfig::new(2, 30, Solver::UniformClosedForm, 0).unwrap(),
            target: FlowTarget::Uniform,
            snapshot_every: 10,
        };
        let a = ssw_gradient_flow(&init, &cfg, &mut rng_from_seed(11)).unwrap();
        let b = ssw_gradient_flow(&init, &cfg, &mut rng_from_seed(11)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.snapshots.len(), 11);
        let head: f64 = a.objective[..10].iter().sum();
        let tail: f64 = a.objective[90..].iter().sum();
        assert!(tail < 0.2 * head, "{head} -> {tail}");
    }

    #[test]
    fn frozen_frame_step_does_not_increase_energy() {
        let mut rng = rng_from_seed(5);
        for trial in 0..10 {
            let mu = sample_uniform_sphere(4, 30, &mut rng).unwrap();
            let nu = sample_vmf(&VmfParams::new(pt(&[1.0, 0.0, 0.0, 0.0]), 5.0).unwrap(), 30, &mut rng).unwrap();
            let cfg = SswConfig::binary_search(2, 20, trial).unwrap();
            let gr = ssw_grad(&mu, &nu, &cfg).unwrap();
            let next = step_cloud(&mu, &gr, 1e-3, StepMode::RiemannianExp).unwrap();
            let after = ssw(&next, &nu, &cfg).unwrap().value;
            assert!(after <= gr.value + 1e-12, "{} -> {after}", gr.value);
        }
    }

    #[test]
    fn gla_step_examples() {
        let cfg = vmf_gla(1e-3, 1);
        let x = pt(&[1.0, 0.5, -0.2]);
        let tiny = GlaConfig { step_size: 1e-300, ..cfg.clone() };
        assert!(close(gla_step_with_noise(&x, &tiny, &[0.0; 3]).unwrap().coords(), x.coords(), 1e-15));
        let y = gla_step_with_noise(&x, &cfg, &[0.0; 3]).unwrap();
        assert!(y.coords()[2] > x.coords()[2]);
        let mut rng = rng_from_seed(2);
        let z = gla_step(&x, &cfg, &mut rng).unwrap();
        assert!((norm(z.coords()) - 1.0).abs() < 1e-12);
        assert!(GlaConfig::new(0.0, 1, cfg.potential.clone()).is_err());
    }

    #[test]
    fn mixture_potential_gradient_matches_finite_differences() {
        let pot = MixturePotential { mixture: VmfMixture::six_axis_modes(10.0).unwrap() };
        let x = [0.3, -0.5, 0.81];
        let g = pot.grad(&x);
        for k in 0..3 {
            let h = 1e-6;
            let mut a = x;
            let mut b = x;
            a[k] += h;
            b[k] -= h;
            let fd = (pot.value(&a) - pot.value(&b)) / (2.0 * h);
            assert!((fd - g[k]).abs() < 1e-5 * (1.0 + g[k].abs()), "{fd} vs {}", g[k]);
        }
        let single = VmfPotential { mu: north(), kappa: 10.0 };
        let one = MixturePotential {
            mixture: VmfMixture::new(vec![VmfParams::new(north(), 10.0).unwrap()], vec![1.0]).unwrap(),
        };
        assert!(close(&single.grad(&x), &one.grad(&x), 1e-12));
    }

    #[test]
    fn gla_chain_matches_vmf() {
        let mut rng = rng_from_seed(21);
        let chain = gla_chain(&north(), &vmf_gla(1e-3, 100_000), &mut rng).unwrap();
        let (dir, r) = mean_direction(&chain);
        let oracle = sample_vmf(&VmfParams::new(north(), 10.0).unwrap(), 100_000, &mut rng).unwrap();
        let (_, r_ref) = mean_direction(&oracle);
        assert!(sphere_distance(&pt(&dir), &north()) < 0.1);
        assert!((r - r_ref).abs() < 0.05, "{r} vs {r_ref}");
    }

    #[test]
    fn sswvi_without_inner_steps_keeps_particles() {
        let mut rng = rng_from_seed(4);
        let init = sample_uniform_sphere(3, 50, &mut rng).unwrap();
        let cfg = SswviConfig {
            outer_steps: 3,
            inner_steps: 0,
            step_size: 1.0,
            mode: StepMode::RiemannianExp,
            ssw_cfg: SswConfig::binary_search(2, 20, 0).unwrap(),
            snapshot_every: 0,
        };
        let tr = sswvi_particles(&init, &vmf_gla(1e-3, 0), &cfg, &mut rng).unwrap();
        let moved =
            init.as_slice().iter().zip(tr.final_cloud().as_slice()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(moved < 1e-9, "{moved}");
    }

    #[test]
    fn sswvi_concentrates_on_vmf_mode() {
        let mut rng = rng_from_seed(8);
        let init = sample_uniform_sphere(3, 200, &mut rng).unwrap();
        let cfg = SswviConfig {
            outer_steps: 500,
            inner_steps: 20,
            step_size: 5.0,
            mode: StepMode::RiemannianExp,
            ssw_cfg: SswConfig::binary_search(2, 50, 0).unwrap(),
            snapshot_every: 0,
        };
        let tr = sswvi_particles(&init, &vmf_gla(1e-2, 20), &cfg, &mut rng).unwrap();
        let (dir, _) = mean_direction(tr.final_cloud());
        assert!(sphere_distance(&pt(&dir), &north()) < 0.15);
        let mut head = tr.objective[..50].to_vec();
        let mut tail = tr.objective[450..].to_vec();
        head.sort_by(f64::total_cmp);
        tail.sort_by(f64::total_cmp);
        assert!(tail[25] < head[25], "{} vs {}", tail[25], head[25]);
    }
}
