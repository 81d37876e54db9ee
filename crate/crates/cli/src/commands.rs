use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

use rand::Rng;

use spherical_ot::bench::experiments::{run_experiment, Scale};
use spherical_ot::bench::runtime::{bench_runtime as run_bench, BenchMethod, RuntimeBenchConfig};
use spherical_ot::bench::{load_cloud, save_cloud, write_cloud, write_records, DistributionSpec, RunRecord};
use spherical_ot::distributions::VmfMixture;
use spherical_ot::flows::{
    gla_particles, ssw_gradient_flow, sswvi_particles, FlowConfig, FlowTarget, FlowTrajectory, GlaConfig,
    MixturePotential, Potential, SswviConfig, StepMode, VmfPotential,
};
use spherical_ot::ssw::{ssw, ssw2_uniform};
use spherical_ot::stream::substream;
use spherical_ot::{Error, Result, Solver, SphereCloud, SpherePoint, SswConfig};

use crate::{
    Algorithm, BenchArgs, ComputeArgs, ExperimentArgs, FlowArgs, ModeArg, PotentialArg, SampleArgs, ScaleArg, SolverArg,
};

/// Reads a cloud file if `arg` names an existing path, otherwise parses it as a generator
/// spec and samples it on substream `index` of `seed`.
fn load_input(arg: &str, seed: u64, index: u64) -> Result<SphereCloud> {
    let path = Path::new(arg);
    if path.exists() {
        return load_cloud(path);
    }
    if !arg.contains(':') {
        return Err(Error::Io(format!("{arg}: no such file")));
    }
    let spec: DistributionSpec = arg.parse()?;
    spec.sample(&mut substream(seed, index))
}

fn solver(s: SolverArg, eps: f64) -> Solver {
    match s {
        SolverArg::BinarySearch => Solver::BinarySearch { eps },
        SolverArg::LevelMedian => Solver::LevelMedian,
        SolverArg::UniformClosedForm => Solver::UniformClosedForm,
    }
}

fn method_name(s: Solver) -> &'static str {
    match s {
        Solver::BinarySearch { .. } => BenchMethod::SswBinarySearch.name(),
        Solver::LevelMedian => BenchMethod::Ssw1LevelMedian.name(),
        Solver::UniformClosedForm => BenchMethod::Ssw2Uniform.name(),
    }
}

fn emit_records(out: Option<&Path>, records: &[RunRecord]) -> Result<()> {
    match out {
        Some(p) => write_records(BufWriter::new(File::create(p)?), records),
        None => write_records(io::stdout().lock(), records),
    }
}

pub fn compute(a: ComputeArgs) -> Result<()> {
    let cfg = SswConfig::new(a.p, a.l, solver(a.solver, a.eps), a.seed)?;
    let mu = load_input(&a.mu, a.seed, 0)?;
    let uniform_ref = cfg.solver == Solver::UniformClosedForm;
    let (m, nu) = if uniform_ref {
        match a.nu.parse::<DistributionSpec>() {
            Ok(DistributionSpec::Uniform { d, .. }) if d == mu.dim() => (0, None),
            Ok(DistributionSpec::Uniform { d, .. }) => {
                return Err(Error::DimensionMismatch { expected: mu.dim(), got: d })
            }
            _ => {
                return Err(Error::SolverIncompatible(
                    "uniform_closed_form needs the second argument to be a uniform: spec".to_string(),
                ))
            }
        }
    } else {
        let nu = load_input(&a.nu, a.seed, 1)?;
        (nu.len(), Some(nu))
    };
    let t = Instant::now();
    let est = match &nu {
        Some(nu) => ssw(&mu, nu, &cfg)?,
        None => ssw2_uniform(&mu, &cfg)?,
    };
    let wall = (t.elapsed().as_nanos() as u64).max(1);
    let json = serde_json::json!({
        "value": est.value,
        "std_error": est.std_error,
        "method": method_name(cfg.solver),
        "p": cfg.p,
        "L": cfg.n_projections,
        "seed": cfg.seed,
    });
    println!("{json}");
    if let Some(out) = &a.out {
        let mut r = RunRecord::new("compute", method_name(cfg.solver))
            .with_extra("std_error", est.std_error)
            .with_extra("threads", rayon::current_num_threads());
        r.d = mu.dim();
        r.n = mu.len();
        r.m = m;
        r.l = cfg.n_projections;
        r.p = cfg.p;
        r.seed = cfg.seed;
        r.value = est.value;
        r.wall_time_ns = wall;
        emit_records(Some(out), &[r])?;
    }
    Ok(())
}

pub fn bench_runtime(a: BenchArgs) -> Result<()> {
    let methods = match &a.methods {
        Some(ms) => ms.iter().map(|m| m.parse()).collect::<Result<Vec<BenchMethod>>>()?,
        None => BenchMethod::ALL.to_vec(),
    };
    let mut records = Vec::new();
    for &d in &a.d_grid {
        let cfg = RuntimeBenchConfig {
            d,
            n_grid: a.n_grid.clone(),
            l_grid: a.l_grid.clone(),
            methods: methods.clone(),
            repeats: a.repeats,
            assignment_cap: a.cap,
            ..RuntimeBenchConfig::new(a.seed)
        };
        records.extend(run_bench(&cfg)?);
    }
    emit_records(a.out.as_deref(), &records)
}

pub fn experiment(a: ExperimentArgs) -> Result<()> {
    let scale = match a.scale {
        ScaleArg::Quick => Scale::Quick,
        ScaleArg::Full => Scale::Full,
    };
    let records = run_experiment(&a.id, a.seed, scale)?;
    emit_records(a.out.as_deref(), &records)
}

pub fn sample(a: SampleArgs) -> Result<()> {
    let spec: DistributionSpec = a.spec.parse()?;
    let cloud = spec.sample(&mut substream(a.seed, 0))?;
    match &a.out {
        Some(p) => save_cloud(p, &cloud),
        None => write_cloud(io::stdout().lock(), &cloud),
    }
}

fn potential(a: &FlowArgs, d: usize) -> Result<Arc<dyn Potential>> {
    Ok(match a.potential {
        PotentialArg::Vmf => {
            let mu = match &a.mu {
                Some(v) => SpherePoint::normalize(v.clone())?,
                None => SpherePoint::basis(d, d - 1)?,
            };
            if mu.dim() != d {
                return Err(Error::DimensionMismatch { expected: d, got: mu.dim() });
            }
            Arc::new(VmfPotential { mu, kappa: a.kappa })
        }
        PotentialArg::SixModes => {
            if d != 3 {
                return Err(Error::DimensionMismatch { expected: 3, got: d });
            }
            Arc::new(MixturePotential { mixture: VmfMixture::six_axis_modes(a.kappa)? })
        }
    })
}

fn gla_step(a: &FlowArgs) -> f64 {
    a.gla_step.unwrap_or(match a.potential {
        PotentialArg::SixModes => 1e-1,
        PotentialArg::Vmf => 1e-3,
    })
}

/// Runs `steps` GLA steps per particle, keeping every `every`-th state. The objective is
/// the mean potential at each kept state.
fn gla_trajectory<R: Rng>(
    init: &SphereCloud,
    cfg: &GlaConfig,
    steps: usize,
    every: usize,
    rng: &mut R,
) -> Result<FlowTrajectory> {
    let chunk = if every == 0 { steps.max(1) } else { every };
    let mut x = init.clone();
    let mut snapshots = vec![(0, x.clone())];
    let mut objective = Vec::new();
    let mut done = 0;
    while done < steps {
        let k = chunk.min(steps - done);
        x = gla_particles(&x, cfg, k, rng.random())?;
        done += k;
        objective.push(x.rows().map(|r| cfg.potential.value(r)).sum::<f64>() / x.len() as f64);
        snapshots.push((done, x.clone()));
    }
    Ok(FlowTrajectory { snapshots, objective })
}

pub fn flow(a: FlowArgs) -> Result<()> {
    let init = load_input(&a.init, a.seed, 0)?;
    let mode = match a.mode {
        ModeArg::Exp => StepMode::RiemannianExp,
        ModeArg::Projected => StepMode::Projected,
    };
    let ssw_cfg = SswConfig::new(a.p, a.l, solver(a.solver, a.eps), a.seed)?;
    let mut rng = substream(a.seed, 2);
    let traj = match a.algorithm {
        Algorithm::Ssw => {
            let target = match a.target.as_deref() {
                None => return Err(Error::Parameter("the ssw flow needs --target".to_string())),
                Some("uniform") => FlowTarget::Uniform,
                Some(t) => FlowTarget::Cloud(load_input(t, a.seed, 1)?),
            };
            let cfg = FlowConfig {
                step_size: a.step_size,
                n_steps: a.steps,
                mode,
                ssw_cfg,
                target,
                snapshot_every: a.snapshot_every,
            };
            ssw_gradient_flow(&init, &cfg, &mut rng)?
        }
        Algorithm::Gla => {
            let gla = GlaConfig::new(gla_step(&a), a.steps, potential(&a, init.dim())?)?;
            gla_trajectory(&init, &gla, a.steps, a.snapshot_every, &mut rng)?
        }
        Algorithm::Sswvi => {
            let gla = GlaConfig::new(gla_step(&a), a.inner_steps, potential(&a, init.dim())?)?;
            let cfg = SswviConfig {
                outer_steps: a.steps,
                inner_steps: a.inner_steps,
                step_size: a.step_size,
                mode,
                ssw_cfg,
                snapshot_every: a.snapshot_every,
            };
            sswvi_particles(&init, &gla, &cfg, &mut rng)?
        }
    };
    fs::create_dir_all(&a.out)?;
    for (k, cloud) in &traj.snapshots {
        save_cloud(&a.out.join(format!("step_{k:06}.cloud")), cloud)?;
    }
    let mut obj = BufWriter::new(File::create(a.out.join("objective.csv"))?);
    writeln!(obj, "index,objective")?;
    for (i, v) in traj.objective.iter().enumerate() {
        writeln!(obj, "{i},{v:?}")?;
    }
    obj.flush()?;
    let json = serde_json::json!({
        "snapshots": traj.snapshots.len(),
        "final_objective": traj.objective.last(),
        "out": a.out.display().to_string(),
    });
    println!("{json}");
    Ok(())
}
