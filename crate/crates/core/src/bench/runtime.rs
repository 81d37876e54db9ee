//! Wall-time benchmarks of the estimators and the exact baseline.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use super::assignment::{wasserstein_exact, ASSIGNMENT_CAP};
use super::record::RunRecord;
use super::stats::time_runs;
use crate::distributions::{sample_uniform_sphere, sample_vmf, VmfParams};
use crate::error::{param, Error, Result};
use crate::sphere_geom::SpherePoint;
use crate::ssw::{ssw, ssw2_uniform, sw_euclidean, EuclideanCloud, Solver, SswConfig};
use crate::stream::substream;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BenchMethod {
    SswBinarySearch,
    Ssw1LevelMedian,
    Ssw2Uniform,
    SlicedEuclidean,
    WassersteinExact,
}

impl BenchMethod {
    pub const ALL: [BenchMethod; 5] = [
        BenchMethod::SswBinarySearch,
        BenchMethod::Ssw1LevelMedian,
        BenchMethod::Ssw2Uniform,
        BenchMethod::SlicedEuclidean,
        BenchMethod::WassersteinExact,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BenchMethod::SswBinarySearch => "ssw_bs",
            BenchMethod::Ssw1LevelMedian => "ssw1_levmed",
            BenchMethod::Ssw2Uniform => "ssw2_unif",
            BenchMethod::SlicedEuclidean => "sw",
            BenchMethod::WassersteinExact => "w_bruteforce",
        }
    }

    fn p(self) -> u32 {
        match self {
            BenchMethod::Ssw1LevelMedian => 1,
            _ => 2,
        }
    }
}

impl fmt::Display for BenchMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BenchMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BenchMethod::ALL.into_iter().find(|m| m.name() == s).ok_or_else(|| param(format!("unknown method {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RuntimeBenchConfig {
    pub d: usize,
    pub n_grid: Vec<usize>,
    pub l_grid: Vec<usize>,
    pub methods: Vec<BenchMethod>,
    pub repeats: usize,
    pub warmup: usize,
    pub kappa: f64,
    pub eps: f64,
    pub assignment_cap: usize,
    pub seed: u64,
}

impl RuntimeBenchConfig {
    pub fn new(seed: u64) -> Self {
        RuntimeBenchConfig {
            d: 3,
            n_grid: vec![100, 1000, 10_000],
            l_grid: vec![200],
            methods: BenchMethod::ALL.to_vec(),
            repeats: 3,
            warmup: 1,
            kappa: 10.0,
            eps: 1e-6,
            assignment_cap: ASSIGNMENT_CAP,
            seed,
        }
    }
}

/// Times every method on `vMF(e₁, κ)` against uniform samples of the same size, for every
/// `(n, L)` in the grid. Sampling is outside the timed region. The exact baseline ignores
/// `L`, runs once per `n`, and above the cap leaves a single record flagged `skipped`.
pub fn bench_runtime(cfg: &RuntimeBenchConfig) -> Result<Vec<RunRecord>> {
    if cfg.n_grid.is_empty() || cfg.l_grid.is_empty() || cfg.methods.is_empty() {
        return Err(param("runtime grids and method list must be nonempty"));
    }
    let threads = rayon::current_num_threads();
    let mut records = Vec::new();
    for (ni, &n) in cfg.n_grid.iter().enumerate() {
        let mut rng = substream(cfg.seed, ni as u64);
        let x = sample_vmf(&VmfParams::new(SpherePoint::basis(cfg.d, 0)?, cfg.kappa)?, n, &mut rng)?;
        let y = sample_uniform_sphere(cfg.d, n, &mut rng)?;
        let frame_seed: u64 = rng.random();
        for &method in &cfg.methods {
            let ls: &[usize] = if method == BenchMethod::WassersteinExact { &[0] } else { &cfg.l_grid };
            for &l in ls {
                let base = |rep: usize, ns: u64, value: f64| {
                    let mut r = RunRecord::new("bench_runtime", method.name())
                        .with_extra("threads", threads)
                        .with_extra("repeat", rep);
                    r.d = cfg.d;
                    r.n = n;
                    r.m = if method == BenchMethod::Ssw2Uniform { 0 } else { n };
                    r.l = l;
                    r.p = method.p();
                    r.seed = frame_seed;
                    r.value = value;
                    r.wall_time_ns = ns;
                    r
                };
                if method == BenchMethod::WassersteinExact && n > cfg.assignment_cap.min(ASSIGNMENT_CAP) {
                    records.push(base(0, 1, 0.0).with_extra("skipped", "above assignment cap"));
                    continue;
                }
                let run = || -> Result<f64> {
                    match method {
                        BenchMethod::SswBinarySearch => {
                            let c = SswConfig::new(2, l, Solver::BinarySearch { eps: cfg.eps }, frame_seed)?;
                            Ok(ssw(&x, &y, &c)?.value)
                        }
                        BenchMethod::Ssw1LevelMedian => {
                            Ok(ssw(&x, &y, &SswConfig::new(1, l, Solver::LevelMedian, frame_seed)?)?.value)
                        }
                        BenchMethod::Ssw2Uniform => {
                            Ok(ssw2_uniform(&x, &SswConfig::new(2, l, Solver::UniformClosedForm, frame_seed)?)?.value)
                        }
                        BenchMethod::SlicedEuclidean => {
                            let (a, b) = (EuclideanCloud::from(&x), EuclideanCloud::from(&y));
                            sw_euclidean(&a, &b, 2, l, frame_seed)
                        }
                        BenchMethod::WassersteinExact => wasserstein_exact(&x, &y, 2),
                    }
                };
                let (times, value) = time_runs(cfg.warmup, cfg.repeats, run)?;
                for (rep, ns) in times.into_iter().enumerate() {
                    records.push(base(rep, ns, value));
                }
            }
        }
    }
    Ok(records)
}

/// Median wall time per grid value of `key` (`n` or `L`) for one method.
pub fn median_times(records: &[RunRecord], method: BenchMethod, by_n: bool) -> Vec<(usize, f64)> {
    let mut keys: Vec<usize> = records
        .iter()
        .filter(|r| r.method == method.name() && !r.extra.contains_key("skipped"))
        .map(|r| if by_n { r.n } else { r.l })
        .collect();
    keys.sort();
    keys.dedup();
    keys.into_iter()
        .map(|k| {
            let t: Vec<f64> = records
                .iter()
                .filter(|r| r.method == method.name() && (if by_n { r.n } else { r.l }) == k)
                .map(|r| r.wall_time_ns as f64)
                .collect();
            (k, super::stats::median(&t))
        })
        .collect()
}
