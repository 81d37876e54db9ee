//! Distribution specs such as `vmf:d=3,mu=0,0,1,kappa=10,n=500` or `uniform:d=3,n=500`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::distributions::{
    sample_power_spherical, sample_uniform_sphere, sample_vmf, sample_vmf_mixture, PowerSphericalParams, VmfMixture,
    VmfParams,
};
use crate::error::{Error, Result};
use crate::sphere_geom::{SphereCloud, SpherePoint};

#[derive(Debug, Clone, PartialEq)]
pub enum DistributionSpec {
    Uniform {
        d: usize,
        n: usize,
    },
    Vmf {
        mu: Vec<f64>,
        kappa: f64,
        n: usize,
    },
    PowerSpherical {
        mu: Vec<f64>,
        kappa: f64,
        n: usize,
    },
    /// Equal-weight vMF components on the six signed axes of `S²`.
    SixModes {
        kappa: f64,
        n: usize,
    },
}

fn malformed(msg: impl Into<String>) -> Error {
    Error::Malformed(msg.into())
}

impl DistributionSpec {
    pub fn dim(&self) -> usize {
        match self {
            DistributionSpec::Uniform { d, .. } => *d,
            DistributionSpec::Vmf { mu, .. } | DistributionSpec::PowerSpherical { mu, .. } => mu.len(),
            DistributionSpec::SixModes { .. } => 3,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            DistributionSpec::Uniform { n, .. }
            | DistributionSpec::Vmf { n, .. }
            | DistributionSpec::PowerSpherical { n, .. }
            | DistributionSpec::SixModes { n, .. } => *n,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<SphereCloud> {
        match self {
            DistributionSpec::Uniform { d, n } => sample_uniform_sphere(*d, *n, rng),
            DistributionSpec::Vmf { mu, kappa, n } => {
                sample_vmf(&VmfParams::new(SpherePoint::normalize(mu.clone())?, *kappa)?, *n, rng)
            }
            DistributionSpec::PowerSpherical { mu, kappa, n } => sample_power_spherical(
                &PowerSphericalParams::new(SpherePoint::normalize(mu.clone())?, *kappa)?,
                *n,
                rng,
            ),
            DistributionSpec::SixModes { kappa, n } => {
                sample_vmf_mixture(&VmfMixture::six_axis_modes(*kappa)?, *n, rng)
            }
        }
    }
}

/// `key=v1,v2,...` groups; bare values continue the previous key.
fn parse_fields(body: &str) -> Result<BTreeMap<String, Vec<f64>>> {
    let mut out: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    let mut current: Option<String> = None;
    for tok in body.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let (key, val) = match tok.split_once('=') {
            Some((k, v)) => {
                let k = k.trim().to_string();
                if out.contains_key(&k) {
                    return Err(malformed(format!("duplicate key {k:?}")));
                }
                current = Some(k.clone());
                (k, v.trim())
            }
            None => (current.clone().ok_or_else(|| malformed(format!("value {tok:?} has no key")))?, tok),
        };
        let v: f64 = val.parse().map_err(|_| malformed(format!("bad number {val:?} for {key}")))?;
        out.entry(key).or_default().push(v);
    }
    Ok(out)
}

fn take_scalar(f: &mut BTreeMap<String, Vec<f64>>, key: &str) -> Result<Option<f64>> {
    match f.remove(key) {
        None => Ok(None),
        Some(v) if v.len() == 1 => Ok(Some(v[0])),
        Some(_) => Err(malformed(format!("{key} takes a single value"))),
    }
}

fn take_count(f: &mut BTreeMap<String, Vec<f64>>, key: &str) -> Result<usize> {
    let v = take_scalar(f, key)?.ok_or_else(|| malformed(format!("missing {key}")))?;
    if v < 1.0 || v.fract() != 0.0 || v > 1e12 {
        return Err(malformed(format!("{key} must be a positive integer, got {v}")));
    }
    Ok(v as usize)
}

fn take_direction(f: &mut BTreeMap<String, Vec<f64>>) -> Result<Vec<f64>> {
    let mu = f.remove("mu").ok_or_else(|| malformed("missing mu"))?;
    if let Some(d) = take_scalar(f, "d")? {
        if d as usize != mu.len() {
            return Err(malformed(format!("mu has {} coordinates but d = {d}", mu.len())));
        }
    }
    Ok(mu)
}

impl FromStr for DistributionSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, body) = s.split_once(':').unwrap_or((s, ""));
        let mut f = parse_fields(body)?;
        let spec = match kind.trim() {
            "uniform" => {
                let d = take_count(&mut f, "d")?;
                DistributionSpec::Uniform { d, n: take_count(&mut f, "n")? }
            }
            "vmf" => {
                let mu = take_direction(&mut f)?;
                let kappa = take_scalar(&mut f, "kappa")?.ok_or_else(|| malformed("missing kappa"))?;
                DistributionSpec::Vmf { mu, kappa, n: take_count(&mut f, "n")? }
            }
            "power_spherical" => {
                let mu = take_direction(&mut f)?;
                let kappa = take_scalar(&mut f, "kappa")?.ok_or_else(|| malformed("missing kappa"))?;
                DistributionSpec::PowerSpherical { mu, kappa, n: take_count(&mut f, "n")? }
            }
            "six_modes" => {
                let kappa = take_scalar(&mut f, "kappa")?.unwrap_or(10.0);
                DistributionSpec::SixModes { kappa, n: take_count(&mut f, "n")? }
            }
            other => return Err(malformed(format!("unknown distribution {other:?}"))),
        };
        if let Some(k) = f.keys().next() {
            return Err(malformed(format!("unknown key {k:?} for {kind}")));
        }
        if spec.dim() < 2 {
            return Err(malformed("dimension must be at least 2"));
        }
        Ok(spec)
    }
}

impl fmt::Display for DistributionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        match self {
            DistributionSpec::Uniform { d, n } => write!(f, "uniform:d={d},n={n}"),
            DistributionSpec::Vmf { mu, kappa, n } => {
                write!(f, "vmf:d={},mu={},kappa={kappa},n={n}", mu.len(), join(mu))
            }
            DistributionSpec::PowerSpherical { mu, kappa, n } => {
                write!(f, "power_spherical:d={},mu={},kappa={kappa},n={n}", mu.len(), join(mu))
            }
            DistributionSpec::SixModes { kappa, n } => write!(f, "six_modes:kappa={kappa},n={n}"),
        }
    }
}
