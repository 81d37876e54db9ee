//! Desk-scale experiments. Each returns a typed summary plus the records behind it.

use std::f64::consts::PI;
use std::sync::Arc;
use std::time::Instant;

use rand::Rng;

use super::assignment::wasserstein_exact;
use super::record::RunRecord;
use super::stats::{loglog_slope, median};
use crate::distributions::{sample_uniform_sphere, sample_vmf, sample_vmf_mixture, VmfMixture, VmfParams};
use crate::error::{Error, Result};
use crate::flows::{
    gla_chain, ssw_gradient_flow, sswvi_particles, FlowConfig, FlowTarget, GlaConfig, SswviConfig, StepMode,
    VmfPotential,
};
use crate::radon::{duality_check, test_function_library, DualityConfig, DualityReport};
use crate::sphere_geom::{norm, sphere_distance, SphereCloud, SpherePoint};
use crate::ssw::{ssw, ssw2_uniform, Solver, SswConfig};
use crate::stream::substream;

pub const EXPERIMENTS: [&str; 8] = [
    "bell_curve",
    "projection_variance",
    "sample_complexity",
    "kappa_sweep",
    "gradient_flow",
    "gla_chain",
    "sswvi",
    "radon_duality",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    /// Reduced sizes for smoke runs.
    Quick,
    /// The sizes the figures are drawn at.
    Full,
}

pub fn run_experiment(id: &str, seed: u64, scale: Scale) -> Result<Vec<RunRecord>> {
    let full = scale == Scale::Full;
    Ok(match id {
        "bell_curve" => {
            let reps = if full { 20 } else { 2 };
            bell_curve(&BellCurveConfig { reps, ..BellCurveConfig::new(seed) })?.records
        }
        "projection_variance" => {
            let cfg = ProjectionVarianceConfig::new(seed);
            let cfg = if full { cfg } else { ProjectionVarianceConfig { ls: vec![10, 100], reps: 3, ..cfg } };
            projection_variance(&cfg)?.records
        }
        "sample_complexity" => {
            let cfg = SampleComplexityConfig::new(seed);
            let cfg = if full { cfg } else { SampleComplexityConfig { ns: vec![100, 300], reps: 2, l: 50, ..cfg } };
            sample_complexity(&cfg)?.records
        }
        "kappa_sweep" => {
            let cfg = KappaSweepConfig::new(seed);
            let cfg = if full { cfg } else { KappaSweepConfig { dims: vec![3], reps: 1, ..cfg } };
            kappa_sweep(&cfg)?.records
        }
        "gradient_flow" => {
            let cfg = GradientFlowConfig::new(seed);
            let cfg = if full { cfg } else { GradientFlowConfig { steps: 20, l: 50, ..cfg } };
            gradient_flow_experiment(&cfg)?.records
        }
        "gla_chain" => {
            let cfg = GlaChainConfig::new(seed);
            let cfg = if full { cfg } else { GlaChainConfig { steps: 1000, ..cfg } };
            gla_chain_experiment(&cfg)?.records
        }
        "sswvi" => {
            let cfg = SswviExperimentConfig::new(seed);
            let cfg = if full { cfg } else { SswviExperimentConfig { outer_steps: 10, ..cfg } };
            sswvi_experiment(&cfg)?.records
        }
        "radon_duality" => {
            let cfg = RadonDualityConfig::new(seed);
            let cfg = if full { cfg } else { RadonDualityConfig { n: 500, ..cfg } };
            radon_duality(&cfg)?.records
        }
        other => {
            return Err(Error::Unsupported(format!(
                "unknown experiment {other:?}; expected one of {}",
                EXPERIMENTS.join(", ")
            )))
        }
    })
}

fn elapsed_ns(t: Instant) -> u64 {
    (t.elapsed().as_nanos() as u64).max(1)
}

fn threads() -> usize {
    rayon::current_num_threads()
}

fn record(experiment: &str, method: &str, cfg: &SswConfig, d: usize, n: usize, m: usize) -> RunRecord {
    let mut r = RunRecord::new(experiment, method).with_extra("threads", threads());
    r.d = d;
    r.n = n;
    r.m = m;
    r.l = cfg.n_projections;
    r.p = cfg.p;
    r.seed = cfg.seed;
    r
}

fn e(d: usize, i: usize) -> SpherePoint {
    SpherePoint::basis(d, i).expect("valid basis index")
}

/// Rotation by `theta` in the `(e₁, e₂)` plane of `ℝ³`.
fn rotation_xy(theta: f64) -> [f64; 9] {
    let (s, c) = theta.sin_cos();
    [c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0]
}

fn mean_of(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

#[derive(Debug, Clone, PartialEq)]
pub struct BellCurveConfig {
    pub n: usize,
    pub l: usize,
    pub kappa: f64,
    pub reps: usize,
    pub thetas: Vec<f64>,
    pub seed: u64,
}

impl BellCurveConfig {
    pub fn new(seed: u64) -> Self {
        BellCurveConfig {
            n: 500,
            l: 200,
            kappa: 10.0,
            reps: 20,
            thetas: (0..=12).map(|k| k as f64 * PI / 6.0).collect(),
            seed,
        }
    }
}

#[derive(Debug, Clone)]
pub struct BellCurve {
    pub thetas: Vec<f64>,
    /// `SSW_2²` averaged over repetitions, per angle.
    pub mean: Vec<f64>,
    pub records: Vec<RunRecord>,
}

/// `SSW_2²(vMF(e₁, κ), vMF((cos θ, sin θ, 0), κ))` over `θ`. Within one repetition every
/// angle reuses the same two base samples (the second rotated by `θ`) and the same frames.
pub fn bell_curve(cfg: &BellCurveConfig) -> Result<BellCurve> {
    let vmf = VmfParams::new(e(3, 0), cfg.kappa)?;
    let mut sums = vec![0.0; cfg.thetas.len()];
    let mut records = Vec::new();
    for rep in 0..cfg.reps {
        let mut rng = substream(cfg.seed, rep as u64);
        let x = sample_vmf(&vmf, cfg.n, &mut rng)?;
        let y = sample_vmf(&vmf, cfg.n, &mut rng)?;
        let scfg = SswConfig::binary_search(2, cfg.l, rng.random())?;
        for (k, &theta) in cfg.thetas.iter().enumerate() {
            let nu = y.transformed(&rotation_xy(theta))?;
            let t = Instant::now();
            let est = ssw(&x, &nu, &scfg)?;
            let mut r = record("bell_curve", "ssw_bs", &scfg, 3, cfg.n, cfg.n)
                .with_extra("theta", theta)
                .with_extra("rep", rep)
                .with_extra("std_error", est.std_error);
            r.value = est.value;
            r.wall_time_ns = elapsed_ns(t);
            sums[k] += est.value;
            records.push(r);
        }
    }
    let mean = sums.iter().map(|s| s / cfg.reps as f64).collect();
    Ok(BellCurve { thetas: cfg.thetas.clone(), mean, records })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionVarianceConfig {
    pub n: usize,
    pub d: usize,
    pub kappa: f64,
    pub ls: Vec<usize>,
    pub reps: usize,
    pub seed: u64,
}

impl ProjectionVarianceConfig {
    pub fn new(seed: u64) -> Self {
        ProjectionVarianceConfig { n: 500, d: 3, kappa: 10.0, ls: vec![10, 100, 1000, 10_000], reps: 20, seed }
    }
}

#[derive(Debug, Clone)]
pub struct ProjectionVariance {
    pub ls: Vec<usize>,
    /// Squared Monte Carlo standard error averaged over repetitions.
    pub mean_sq_std_error: Vec<f64>,
    /// Variance of the estimates across repetitions.
    pub estimate_variance: Vec<f64>,
    pub slope: f64,
    pub records: Vec<RunRecord>,
}

/// `SSW_2²(vMF(μ, κ), Unif)` with the closed form per slice, repeated over fresh samples.
pub fn projection_variance(cfg: &ProjectionVarianceConfig) -> Result<ProjectionVariance> {
    let vmf = VmfParams::new(e(cfg.d, 0), cfg.kappa)?;
    let mut records = Vec::new();
    let (mut se2, mut var) = (Vec::new(), Vec::new());
    for (li, &l) in cfg.ls.iter().enumerate() {
        let mut vals = Vec::with_capacity(cfg.reps);
        let mut s2 = Vec::with_capacity(cfg.reps);
        for rep in 0..cfg.reps {
            let mut rng = substream(cfg.seed, (li * cfg.reps + rep) as u64);
            let x = sample_vmf(&vmf, cfg.n, &mut rng)?;
            let scfg = SswConfig::new(2, l, Solver::UniformClosedForm, rng.random())?;
            let t = Instant::now();
            let est = ssw2_uniform(&x, &scfg)?;
            let mut r = record("projection_variance", "ssw2_unif", &scfg, cfg.d, cfg.n, 0)
                .with_extra("rep", rep)
                .with_extra("std_error", est.std_error);
            r.value = est.value;
            r.wall_time_ns = elapsed_ns(t);
            records.push(r);
            vals.push(est.value);
            s2.push(est.std_error * est.std_error);
        }
        let m = mean_of(&vals);
        var.push(vals.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (vals.len().max(2) - 1) as f64);
        se2.push(mean_of(&s2));
    }
    let lx: Vec<f64> = cfg.ls.iter().map(|&l| l as f64).collect();
    let slope = loglog_slope(&lx, &se2)?;
    Ok(ProjectionVariance { ls: cfg.ls.clone(), mean_sq_std_error: se2, estimate_variance: var, slope, records })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleComplexityConfig {
    pub dims: Vec<usize>,
    pub ns: Vec<usize>,
    pub l: usize,
    pub reps: usize,
    /// Largest `n` for the exact Wasserstein baseline.
    pub wasserstein_cap: usize,
    pub wasserstein_reps: usize,
    pub seed: u64,
}

impl SampleComplexityConfig {
    pub fn new(seed: u64) -> Self {
        SampleComplexityConfig {
            dims: vec![3, 10, 100],
            ns: vec![100, 300, 1000, 3000, 10_000],
            l: 100,
            reps: 10,
            wasserstein_cap: 1000,
            wasserstein_reps: 3,
            seed,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ComplexityCurve {
    pub d: usize,
    pub ns: Vec<usize>,
    pub mean: Vec<f64>,
    pub slope: f64,
}

#[derive(Debug, Clone)]
pub struct SampleComplexity {
    pub ssw: Vec<ComplexityCurve>,
    pub wasserstein: Vec<ComplexityCurve>,
    pub records: Vec<RunRecord>,
}

/// Discrepancy between two independent uniform samples of size `n`: `SSW_2²` for all
/// sizes, exact geodesic `W_2²` up to the cap.
pub fn sample_complexity(cfg: &SampleComplexityConfig) -> Result<SampleComplexity> {
    let mut records = Vec::new();
    let (mut ssw_curves, mut w_curves) = (Vec::new(), Vec::new());
    for (di, &d) in cfg.dims.iter().enumerate() {
        let (mut sm, mut wm, mut wns) = (Vec::new(), Vec::new(), Vec::new());
        for (ni, &n) in cfg.ns.iter().enumerate() {
            let (mut sv, mut wv) = (Vec::new(), Vec::new());
            for rep in 0..cfg.reps {
                let stream = ((di * cfg.ns.len() + ni) * cfg.reps + rep) as u64;
                let mut rng = substream(cfg.seed, stream);
                let x = sample_uniform_sphere(d, n, &mut rng)?;
                let y = sample_uniform_sphere(d, n, &mut rng)?;
                let scfg = SswConfig::binary_search(2, cfg.l, rng.random())?;
                let t = Instant::now();
                let est = ssw(&x, &y, &scfg)?;
                let mut r = record("sample_complexity", "ssw_bs", &scfg, d, n, n).with_extra("rep", rep);
                r.value = est.value;
                r.wall_time_ns = elapsed_ns(t);
                records.push(r);
                sv.push(est.value);
                if n <= cfg.wasserstein_cap && rep < cfg.wasserstein_reps {
                    let t = Instant::now();
                    let w = wasserstein_exact(&x, &y, 2)?;
                    let mut r = record("sample_complexity", "w_bruteforce", &scfg, d, n, n).with_extra("rep", rep);
                    r.l = 0;
                    r.value = w;
                    r.wall_time_ns = elapsed_ns(t);
                    records.push(r);
                    wv.push(w);
                }
            }
            sm.push(mean_of(&sv));
            if !wv.is_empty() {
                wns.push(n);
                wm.push(mean_of(&wv));
            }
        }
        let nx: Vec<f64> = cfg.ns.iter().map(|&n| n as f64).collect();
        ssw_curves.push(ComplexityCurve { d, ns: cfg.ns.clone(), slope: loglog_slope(&nx, &sm)?, mean: sm });
        if wns.len() >= 2 {
            let wx: Vec<f64> = wns.iter().map(|&n| n as f64).collect();
            w_curves.push(ComplexityCurve { d, slope: loglog_slope(&wx, &wm)?, ns: wns, mean: wm });
        }
    }
    Ok(SampleComplexity { ssw: ssw_curves, wasserstein: w_curves, records })
}

#[derive(Debug, Clone, PartialEq)]
pub struct KappaSweepConfig {
    pub dims: Vec<usize>,
    pub kappas: Vec<f64>,
    pub n: usize,
    pub l: usize,
    pub reps: usize,
    pub seed: u64,
}

impl KappaSweepConfig {
    pub fn new(seed: u64) -> Self {
        KappaSweepConfig {
            dims: vec![3, 10, 100],
            kappas: vec![1.0, 5.0, 10.0, 20.0, 30.0, 40.0, 50.0, 75.0, 100.0, 150.0, 200.0, 250.0],
            n: 500,
            l: 100,
            reps: 10,
            seed,
        }
    }
}

#[derive(Debug, Clone)]
pub struct KappaSweep {
    /// `(d, mean SSW_2² per κ)`.
    pub curves: Vec<(usize, Vec<f64>)>,
    pub records: Vec<RunRecord>,
}

/// `SSW_2²(vMF(μ, κ), Unif)` against `κ` for each dimension.
pub fn kappa_sweep(cfg: &KappaSweepConfig) -> Result<KappaSweep> {
    let mut records = Vec::new();
    let mut curves = Vec::new();
    for (di, &d) in cfg.dims.iter().enumerate() {
        let mut means = Vec::new();
        for (ki, &kappa) in cfg.kappas.iter().enumerate() {
            let vmf = VmfParams::new(e(d, 0), kappa)?;
            let mut vals = Vec::new();
            for rep in 0..cfg.reps {
                let stream = ((di * cfg.kappas.len() + ki) * cfg.reps + rep) as u64;
                let mut rng = substream(cfg.seed, stream);
                let x = sample_vmf(&vmf, cfg.n, &mut rng)?;
                let scfg = SswConfig::new(2, cfg.l, Solver::UniformClosedForm, rng.random())?;
                let t = Instant::now();
                let est = ssw2_uniform(&x, &scfg)?;
                let mut r = record("kappa_sweep", "ssw2_unif", &scfg, d, cfg.n, 0)
                    .with_extra("kappa", kappa)
                    .with_extra("rep", rep);
                r.value = est.value;
                r.wall_time_ns = elapsed_ns(t);
                records.push(r);
                vals.push(est.value);
            }
            means.push(mean_of(&vals));
        }
        curves.push((d, means));
    }
    Ok(KappaSweep { curves, records })
}

#[derive(Debug, Clone, PartialEq)]
pub struct GradientFlowConfig {
    pub n_particles: usize,
    pub n_target: usize,
    pub kappa: f64,
    pub steps: usize,
    pub l: usize,
    pub step_size: f64,
    /// Projections of the fixed-frame estimate comparing the initial and final clouds.
    pub eval_l: usize,
    pub record_every: usize,
    pub seed: u64,
}

impl GradientFlowConfig {
    pub fn new(seed: u64) -> Self {
        GradientFlowConfig {
            n_particles: 500,
            n_target: 500,
            kappa: 10.0,
            steps: 2000,
            l: 1000,
            step_size: 2.0,
            eval_l: 1000,
            record_every: 100,
            seed,
        }
    }
}

#[derive(Debug, Clone)]
pub struct GradientFlowSummary {
    pub initial: f64,
    pub final_value: f64,
    /// Share of final particles whose nearest mode centre is each of the six axes.
    pub mode_fractions: Vec<f64>,
    pub wall_time_ns: u64,
    pub final_cloud: SphereCloud,
    pub records: Vec<RunRecord>,
}

/// Share of points whose closest centre (largest inner product) is each centre.
pub fn nearest_mode_fractions(cloud: &SphereCloud, centres: &[SpherePoint]) -> Vec<f64> {
    let mut counts = vec![0usize; centres.len()];
    for x in cloud.rows() {
        let k = centres
            .iter()
            .enumerate()
            .map(|(k, c)| (k, c.coords().iter().zip(x).map(|(a, b)| a * b).sum::<f64>()))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .map(|(k, _)| k)
            .unwrap_or(0);
        counts[k] += 1;
    }
    counts.iter().map(|&c| c as f64 / cloud.len() as f64).collect()
}

/// Particle descent from a uniform cloud toward samples of the six-mode vMF mixture.
pub fn gradient_flow_experiment(cfg: &GradientFlowConfig) -> Result<GradientFlowSummary> {
    let mix = VmfMixture::six_axis_modes(cfg.kappa)?;
    let mut rng = substream(cfg.seed, 0);
    let target = sample_vmf_mixture(&mix, cfg.n_target, &mut rng)?;
    let init = sample_uniform_sphere(3, cfg.n_particles, &mut rng)?;
    let flow = FlowConfig {
        step_size: cfg.step_size,
        n_steps: cfg.steps,
        mode: StepMode::RiemannianExp,
        ssw_cfg: SswConfig::binary_search(2, cfg.l, 0)?,
        target: FlowTarget::Cloud(target.clone()),
        snapshot_every: 0,
    };
    let t = Instant::now();
    let tr = ssw_gradient_flow(&init, &flow, &mut rng)?;
    let wall = elapsed_ns(t);
    let eval = SswConfig::binary_search(2, cfg.eval_l, rng.random())?;
    let initial = ssw(&init, &target, &eval)?.value;
    let final_cloud = tr.final_cloud().clone();
    let final_value = ssw(&final_cloud, &target, &eval)?.value;
    let centres: Vec<SpherePoint> = mix.components().iter().map(|c| c.mu().clone()).collect();
    let mode_fractions = nearest_mode_fractions(&final_cloud, &centres);

    let mut records = Vec::new();
    for (k, v) in tr.objective.iter().enumerate() {
        if cfg.record_every > 0 && k % cfg.record_every == 0 {
            let mut r = record("gradient_flow", "ssw_bs", &flow.ssw_cfg, 3, cfg.n_particles, cfg.n_target)
                .with_extra("iteration", k)
                .with_extra("step_size", cfg.step_size);
            r.seed = cfg.seed;
            r.value = *v;
            r.wall_time_ns = (wall / cfg.steps as u64).max(1);
            records.push(r);
        }
    }
    let mut r = record("gradient_flow", "ssw_bs", &eval, 3, cfg.n_particles, cfg.n_target)
        .with_extra("iteration", cfg.steps)
        .with_extra("initial", initial)
        .with_extra("step_size", cfg.step_size)
        .with_extra("mode_fractions", mode_fractions.iter().map(|f| f.to_string()).collect::<Vec<_>>().join(";"));
    r.seed = cfg.seed;
    r.value = final_value;
    r.wall_time_ns = wall;
    records.push(r);
    Ok(GradientFlowSummary { initial, final_value, mode_fractions, wall_time_ns: wall, final_cloud, records })
}

#[derive(Debug, Clone, PartialEq)]
pub struct GlaChainConfig {
    pub kappa: f64,
    pub steps: usize,
    pub step_size: f64,
    pub reference_n: usize,
    pub seed: u64,
}

impl GlaChainConfig {
    pub fn new(seed: u64) -> Self {
        GlaChainConfig { kappa: 10.0, steps: 100_000, step_size: 1e-3, reference_n: 100_000, seed }
    }
}

#[derive(Debug, Clone)]
pub struct GlaChainSummary {
    /// Angle between the chain's mean direction and `μ`.
    pub angle: f64,
    pub resultant: f64,
    /// Mean resultant length of direct vMF samples.
    pub reference_resultant: f64,
    pub records: Vec<RunRecord>,
}

fn mean_direction(c: &SphereCloud) -> (Vec<f64>, f64) {
    let m = c.mean();
    let r = norm(&m);
    (m.iter().map(|a| a / r).collect(), r)
}

/// A GLA chain on `V(x) = −κ⟨μ, x⟩` in `S²` started at `μ`, compared with vMF samples.
pub fn gla_chain_experiment(cfg: &GlaChainConfig) -> Result<GlaChainSummary> {
    let mu = e(3, 2);
    let gla = GlaConfig::new(cfg.step_size, cfg.steps, Arc::new(VmfPotential { mu: mu.clone(), kappa: cfg.kappa }))?;
    let mut rng = substream(cfg.seed, 0);
    let t = Instant::now();
    let chain = gla_chain(&mu, &gla, &mut rng)?;
    let wall = elapsed_ns(t);
    let (dir, resultant) = mean_direction(&chain);
    let angle = sphere_distance(&SpherePoint::normalize(dir)?, &mu);
    let reference = sample_vmf(&VmfParams::new(mu, cfg.kappa)?, cfg.reference_n, &mut rng)?;
    let (_, reference_resultant) = mean_direction(&reference);
    let mut r = RunRecord::new("gla_chain", "gla")
        .with_extra("angle", angle)
        .with_extra("reference_resultant", reference_resultant)
        .with_extra("step_size", cfg.step_size)
        .with_extra("kappa", cfg.kappa);
    r.d = 3;
    r.n = cfg.steps;
    r.seed = cfg.seed;
    r.value = resultant;
    r.wall_time_ns = wall;
    Ok(GlaChainSummary { angle, resultant, reference_resultant, records: vec![r] })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SswviExperimentConfig {
    pub n_particles: usize,
    pub kappa: f64,
    pub outer_steps: usize,
    pub inner_steps: usize,
    pub gla_step: f64,
    pub flow_step: f64,
    pub l: usize,
    pub seed: u64,
}

impl SswviExperimentConfig {
    pub fn new(seed: u64) -> Self {
        SswviExperimentConfig {
            n_particles: 500,
            kappa: 10.0,
            outer_steps: 500,
            inner_steps: 20,
            gla_step: 1e-2,
            flow_step: 5.0,
            l: 100,
            seed,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SswviSummary {
    pub angle: f64,
    pub head_median: f64,
    pub tail_median: f64,
    pub records: Vec<RunRecord>,
}

/// Particle variational loop on `V(x) = −κ⟨e₃, x⟩` from a uniform cloud.
pub fn sswvi_experiment(cfg: &SswviExperimentConfig) -> Result<SswviSummary> {
    let mu = e(3, 2);
    let gla =
        GlaConfig::new(cfg.gla_step, cfg.inner_steps, Arc::new(VmfPotential { mu: mu.clone(), kappa: cfg.kappa }))?;
    let mut rng = substream(cfg.seed, 0);
    let init = sample_uniform_sphere(3, cfg.n_particles, &mut rng)?;
    let scfg = SswConfig::binary_search(2, cfg.l, 0)?;
    let vi = SswviConfig {
        outer_steps: cfg.outer_steps,
        inner_steps: cfg.inner_steps,
        step_size: cfg.flow_step,
        mode: StepMode::RiemannianExp,
        ssw_cfg: scfg,
        snapshot_every: 0,
    };
    let t = Instant::now();
    let tr = sswvi_particles(&init, &gla, &vi, &mut rng)?;
    let wall = elapsed_ns(t);
    let (dir, _) = mean_direction(tr.final_cloud());
    let angle = sphere_distance(&SpherePoint::normalize(dir)?, &mu);
    let k = (cfg.outer_steps / 10).max(1);
    let head_median = median(&tr.objective[..k]);
    let tail_median = median(&tr.objective[cfg.outer_steps - k..]);
    let mut records = Vec::new();
    for (i, v) in tr.objective.iter().enumerate() {
        let mut r = record("sswvi", "ssw_bs", &scfg, 3, cfg.n_particles, cfg.n_particles).with_extra("iteration", i);
        r.seed = cfg.seed;
        r.value = *v;
        r.wall_time_ns = (wall / cfg.outer_steps as u64).max(1);
        records.push(r);
    }
    Ok(SswviSummary { angle, head_median, tail_median, records })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RadonDualityConfig {
    pub d: usize,
    pub n: usize,
    pub inner: usize,
    pub seed: u64,
}

impl RadonDualityConfig {
    pub fn new(seed: u64) -> Self {
        RadonDualityConfig { d: 3, n: 10_000, inner: 16, seed }
    }
}

#[derive(Debug, Clone)]
pub struct RadonDuality {
    pub reports: Vec<DualityReport>,
    pub records: Vec<RunRecord>,
}

/// Weak duality `⟨R̃f, g⟩ = ⟨f, R̃*g⟩` on the fixed test-function library.
pub fn radon_duality(cfg: &RadonDualityConfig) -> Result<RadonDuality> {
    let mut reports = Vec::new();
    let mut records = Vec::new();
    for (k, pair) in test_function_library(cfg.d).iter().enumerate() {
        let dc =
            DualityConfig { n_points: cfg.n, n_frames: cfg.n, inner: cfg.inner, seed: cfg.seed.wrapping_add(k as u64) };
        let t = Instant::now();
        let rep = duality_check(pair, &dc)?;
        let mut r = RunRecord::new("radon_duality", "duality_check")
            .with_extra("pair", k)
            .with_extra("lhs", rep.lhs)
            .with_extra("rhs", rep.rhs)
            .with_extra("combined_std_error", rep.combined_std_error())
            .with_extra("threads", threads());
        r.d = cfg.d;
        r.n = cfg.n;
        r.l = cfg.n;
        r.seed = dc.seed;
        r.value = rep.gap;
        r.wall_time_ns = elapsed_ns(t);
        records.push(r);
        reports.push(rep);
    }
    Ok(RadonDuality { reports, records })
}
