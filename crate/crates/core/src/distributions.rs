//! Reference distributions on `S^{d-1}`: uniform, von Mises-Fisher (vMF), vMF
//! mixtures and power spherical.

use std::f64::consts::PI;

use rand::distr::weighted::WeightedIndex;
use rand::Rng;
use rand_distr::{Beta, Distribution, StandardNormal};
use statrs::function::gamma::ln_gamma;

use crate::error::{param, Error, Result};
use crate::sphere_geom::{dot, norm, SphereCloud, SpherePoint};

/// Per-point proposal cap of the vMF rejection sampler.
pub const REJECTION_CAP: usize = 1_000_000;

/// vMF location and concentration. `kappa = 0` is the uniform distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct VmfParams {
    mu: SpherePoint,
    kappa: f64,
}

impl VmfParams {
    pub fn new(mu: SpherePoint, kappa: f64) -> Result<Self> {
        if !(kappa >= 0.0 && kappa.is_finite()) {
            return Err(param(format!("vMF concentration must be >= 0, got {kappa}")));
        }
        Ok(VmfParams { mu, kappa })
    }

    pub fn mu(&self) -> &SpherePoint {
        &self.mu
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn dim(&self) -> usize {
        self.mu.dim()
    }
}

/// Power spherical location and concentration, density `∝ (1 + μᵀx)^κ`.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerSphericalParams {
    mu: SpherePoint,
    kappa: f64,
}

impl PowerSphericalParams {
    pub fn new(mu: SpherePoint, kappa: f64) -> Result<Self> {
        if !(kappa > 0.0 && kappa.is_finite()) {
            return Err(param(format!("power spherical concentration must be > 0, got {kappa}")));
        }
        Ok(PowerSphericalParams { mu, kappa })
    }

    pub fn mu(&self) -> &SpherePoint {
        &self.mu
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }
}

/// Finite mixture of vMF components.
#[derive(Debug, Clone, PartialEq)]
pub struct VmfMixture {
    components: Vec<VmfParams>,
    weights: Vec<f64>,
}

impl VmfMixture {
    pub fn new(components: Vec<VmfParams>, weights: Vec<f64>) -> Result<Self> {
        if components.is_empty() {
            return Err(param("mixture needs at least one component"));
        }
        if components.len() != weights.len() {
            return Err(param("one weight per component"));
        }
        if weights.iter().any(|w| !(*w > 0.0 && w.is_finite())) {
            return Err(param("mixture weights must be positive"));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(param(format!("mixture weights sum to {total}, expected 1")));
        }
        let d = components[0].dim();
        if let Some(c) = components.iter().find(|c| c.dim() != d) {
            return Err(Error::DimensionMismatch { expected: d, got: c.dim() });
        }
        Ok(VmfMixture { components, weights })
    }

    /// Six equally weighted components centred on `±e₁, ±e₂, ±e₃` in `S²`.
    pub fn six_axis_modes(kappa: f64) -> Result<Self> {
        let axes =
            [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [-1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, -1.0]];
        let comps =
            axes.iter().map(|a| VmfParams::new(SpherePoint::new(a.to_vec())?, kappa)).collect::<Result<Vec<_>>>()?;
        VmfMixture::new(comps, vec![1.0 / 6.0; 6])
    }

    pub fn components(&self) -> &[VmfParams] {
        &self.components
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn dim(&self) -> usize {
        self.components[0].dim()
    }
}

/// Counters reported by the vMF rejection sampler.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RejectionStats {
    pub proposals: u64,
    pub accepted: u64,
}

impl RejectionStats {
    pub fn acceptance_rate(&self) -> f64 {
        if self.proposals == 0 {
            return 1.0;
        }
        self.accepted as f64 / self.proposals as f64
    }
}

fn check_shape(d: usize, n: usize) -> Result<()> {
    if d < 2 {
        return Err(param(format!("sphere dimension must be >= 2, got {d}")));
    }
    if n < 1 {
        return Err(param("sample count must be >= 1"));
    }
    Ok(())
}

fn push_unit_gaussian<R: Rng + ?Sized>(out: &mut Vec<f64>, d: usize, rng: &mut R) {
    loop {
        let start = out.len();
        out.extend((0..d).map(|_| rng.sample::<f64, _>(StandardNormal)));
        let r = norm(&out[start..]);
        if r > 1e-300 {
            out[start..].iter_mut().for_each(|c| *c /= r);
            return;
        }
        out.truncate(start);
    }
}

/// `n` uniform points on `S^{d-1}` from normalised Gaussian vectors.
pub fn sample_uniform_sphere<R: Rng + ?Sized>(d: usize, n: usize, rng: &mut R) -> Result<SphereCloud> {
    check_shape(d, n)?;
    let mut data = Vec::with_capacity(d * n);
    for _ in 0..n {
        push_unit_gaussian(&mut data, d, rng);
    }
    Ok(SphereCloud::from_unit_rows(d, data))
}

/// Householder reflection sending `e₁` to `mu`, applied in place.
fn reflect_e1_to(mu: &[f64], x: &mut [f64]) {
    let mut u = mu.iter().map(|m| -m).collect::<Vec<f64>>();
    u[0] += 1.0;
    let uu = dot(&u, &u);
    if uu < 1e-24 {
        return;
    }
    let s = 2.0 * dot(&u, x) / uu;
    x.iter_mut().zip(&u).for_each(|(xi, ui)| *xi -= s * ui);
}

/// Writes `(w, sqrt(1 − w²) v)` with `v` uniform on `S^{d-2}`, then reflects onto `mu`.
fn push_from_cosine<R: Rng + ?Sized>(out: &mut Vec<f64>, mu: &[f64], w: f64, sin: f64, rng: &mut R) {
    let d = mu.len();
    let start = out.len();
    out.push(w);
    push_unit_gaussian(out, d - 1, rng);
    out[start + 1..].iter_mut().for_each(|c| *c *= sin);
    reflect_e1_to(mu, &mut out[start..]);
    let r = norm(&out[start..]);
    out[start..].iter_mut().for_each(|c| *c /= r);
}

/// vMF draws by Wood's rejection scheme, with proposal counters.
pub fn sample_vmf_with_stats<R: Rng + ?Sized>(
    params: &VmfParams,
    n: usize,
    rng: &mut R,
) -> Result<(SphereCloud, RejectionStats)> {
    let d = params.dim();
    check_shape(d, n)?;
    let kappa = params.kappa;
    let dm1 = (d - 1) as f64;
    // b = (−2κ + sqrt(4κ² + (d−1)²)) / (d−1), in cancellation-free form
    let b = dm1 / (2.0 * kappa + (4.0 * kappa * kappa + dm1 * dm1).sqrt());
    let x0 = (1.0 - b) / (1.0 + b);
    let c = kappa * x0 + dm1 * (1.0 - x0 * x0).ln();
    let beta = Beta::new(dm1 / 2.0, dm1 / 2.0).map_err(|e| param(e.to_string()))?;
    let mu = params.mu.coords();

    let mut stats = RejectionStats::default();
    let mut data = Vec::with_capacity(d * n);
    for _ in 0..n {
        let mut tries = 0usize;
        let (w, one_minus_w) = loop {
            if tries >= REJECTION_CAP {
                return Err(Error::RejectionCap { cap: REJECTION_CAP, kappa, dim: d });
            }
            tries += 1;
            stats.proposals += 1;
            let z: f64 = beta.sample(rng);
            let denom = 1.0 - (1.0 - b) * z;
            let w = (1.0 - (1.0 + b) * z) / denom;
            let one_minus_w = 2.0 * b * z / denom;
            let u: f64 = rng.random();
            if kappa * w + dm1 * (1.0 - x0 * w).ln() - c >= u.ln() {
                break (w, one_minus_w);
            }
        };
        stats.accepted += 1;
        let sin = (one_minus_w * (2.0 - one_minus_w)).max(0.0).sqrt();
        push_from_cosine(&mut data, mu, w, sin, rng);
    }
    Ok((SphereCloud::from_unit_rows(d, data), stats))
}

/// `n` i.i.d. vMF draws.
pub fn sample_vmf<R: Rng + ?Sized>(params: &VmfParams, n: usize, rng: &mut R) -> Result<SphereCloud> {
    sample_vmf_with_stats(params, n, rng).map(|(c, _)| c)
}

/// `n` power spherical draws: `Z ~ Beta((d−1)/2 + κ, (d−1)/2)`, `T = 2Z − 1`,
/// `Y = [T, v√(1−T²)]`, then the reflection taking `e₁` to `μ`.
pub fn sample_power_spherical<R: Rng + ?Sized>(
    params: &PowerSphericalParams,
    n: usize,
    rng: &mut R,
) -> Result<SphereCloud> {
    let d = params.mu.dim();
    check_shape(d, n)?;
    let half = (d - 1) as f64 / 2.0;
    // sample 1 − Z directly to keep precision when Z is close to 1
    let beta = Beta::new(half, half + params.kappa).map_err(|e| param(e.to_string()))?;
    let mu = params.mu.coords();
    let mut data = Vec::with_capacity(d * n);
    for _ in 0..n {
        let w: f64 = beta.sample(rng);
        let t = 1.0 - 2.0 * w;
        let sin = 2.0 * (w * (1.0 - w)).max(0.0).sqrt();
        push_from_cosine(&mut data, mu, t, sin, rng);
    }
    Ok(SphereCloud::from_unit_rows(d, data))
}

/// Mixture draws together with the component index of each point.
pub fn sample_vmf_mixture_labeled<R: Rng + ?Sized>(
    mix: &VmfMixture,
    n: usize,
    rng: &mut R,
) -> Result<(SphereCloud, Vec<usize>)> {
    let d = mix.dim();
    check_shape(d, n)?;
    let idx = WeightedIndex::new(&mix.weights).map_err(|e| param(e.to_string()))?;
    let labels: Vec<usize> = (0..n).map(|_| idx.sample(rng)).collect();
    let mut data = Vec::with_capacity(d * n);
    for &k in &labels {
        let one = sample_vmf(&mix.components[k], 1, rng)?;
        data.extend_from_slice(one.as_slice());
    }
    Ok((SphereCloud::from_unit_rows(d, data), labels))
}

pub fn sample_vmf_mixture<R: Rng + ?Sized>(mix: &VmfMixture, n: usize, rng: &mut R) -> Result<SphereCloud> {
    sample_vmf_mixture_labeled(mix, n, rng).map(|(c, _)| c)
}

/// `log I_ν(x)` for the modified Bessel function of the first kind, `ν ≥ 0`, `x ≥ 0`.
///
/// Uses the ascending series summed in scaled form, or the large-argument Hankel
/// expansion once `x > max(50, ν²)`.
pub fn log_bessel_i(nu: f64, x: f64) -> f64 {
    if x == 0.0 {
        return if nu == 0.0 { 0.0 } else { f64::NEG_INFINITY };
    }
    if x > 50.0_f64.max(nu * nu) {
        if let Some(v) = log_bessel_i_asymptotic(nu, x) {
            return v;
        }
    }
    log_bessel_i_series(nu, x)
}

fn log_bessel_i_series(nu: f64, x: f64) -> f64 {
    let h2 = 0.25 * x * x;
    let log_t0 = nu * (0.5 * x).ln() - ln_gamma(nu + 1.0);
    // terms relative to the running maximum
    let mut log_scale = 0.0f64;
    let mut term = 1.0f64;
    let mut sum = 1.0f64;
    let mut k = 0.0f64;
    loop {
        term *= h2 / ((k + 1.0) * (k + nu + 1.0));
        k += 1.0;
        if term > 1e250 {
            log_scale += term.ln();
            sum /= term;
            term = 1.0;
        }
        sum += term;
        if k > 0.5 * x && term < 1e-17 * sum {
            break;
        }
        if k > 1e7 {
            break;
        }
    }
    log_t0 + log_scale + sum.ln()
}

fn log_bessel_i_asymptotic(nu: f64, x: f64) -> Option<f64> {
    let mu = 4.0 * nu * nu;
    let mut term = 1.0f64;
    let mut sum = 1.0f64;
    for k in 1..60 {
        let kf = k as f64;
        let next = -term * (mu - (2.0 * kf - 1.0).powi(2)) / (kf * 8.0 * x);
        if next.abs() > term.abs() {
            break;
        }
        term = next;
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            return Some(x - 0.5 * (2.0 * PI * x).ln() + sum.ln());
        }
    }
    // did not converge to full precision
    if sum > 0.0 && term.abs() < 1e-12 {
        Some(x - 0.5 * (2.0 * PI * x).ln() + sum.ln())
    } else {
        None
    }
}

/// `log` surface area of `S^{d-1}`: `log(2 π^{d/2} / Γ(d/2))`.
pub fn log_sphere_area(d: usize) -> f64 {
    let h = d as f64 / 2.0;
    (2.0f64).ln() + h * PI.ln() - ln_gamma(h)
}

/// Log density of vMF with respect to the surface measure:
/// `κ^{d/2−1} / ((2π)^{d/2} I_{d/2−1}(κ)) · exp(κ μᵀx)`.
pub fn vmf_log_density(params: &VmfParams, x: &SpherePoint) -> Result<f64> {
    if x.dim() != params.dim() {
        return Err(Error::DimensionMismatch { expected: params.dim(), got: x.dim() });
    }
    let d = params.dim();
    let kappa = params.kappa;
    if kappa < 1e-300 {
        return Ok(-log_sphere_area(d));
    }
    let order = d as f64 / 2.0 - 1.0;
    let log_norm = order * kappa.ln() - (d as f64 / 2.0) * (2.0 * PI).ln() - log_bessel_i(order, kappa);
    Ok(log_norm + kappa * dot(params.mu.coords(), x.coords()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere_geom::{circle_coordinate, geodesic_project, sample_stiefel};
    use crate::stream::rng_from_seed;

    fn e(d: usize, i: usize) -> SpherePoint {
        SpherePoint::basis(d, i).unwrap()
    }

    fn ks_uniform(mut v: Vec<f64>) -> f64 {
        v.sort_by(f64::total_cmp);
        let n = v.len() as f64;
        v.iter().enumerate().map(|(i, &x)| ((i as f64 + 1.0) / n - x).max(x - i as f64 / n)).fold(0.0, f64::max)
    }

    /// Two-sample KS statistic.
    fn ks_two(mut a: Vec<f64>, mut b: Vec<f64>) -> f64 {
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        let (mut i, mut j, mut best) = (0usize, 0usize, 0.0f64);
        while i < a.len() && j < b.len() {
            let v = a[i].min(b[j]);
            while i < a.len() && a[i] <= v {
                i += 1;
            }
            while j < b.len() && b[j] <= v {
                j += 1;
            }
            best = best.max((i as f64 / a.len() as f64 - j as f64 / b.len() as f64).abs());
        }
        best
    }

    fn all_unit(c: &SphereCloud) -> bool {
        c.rows().all(|r| (norm(r) - 1.0).abs() < 1e-10)
    }

    #[test]
    fn uniform_points_are_unit_and_centred() {
        let mut rng = rng_from_seed(1);
        let n = 100_000;
        let c = sample_uniform_sphere(3, n, &mut rng).unwrap();
        assert!(all_unit(&c));
        let sigma = (1.0 / 3.0 / n as f64).sqrt();
        assert!(c.mean().iter().all(|m| m.abs() < 5.0 * sigma));
        assert!(sample_uniform_sphere(1, 3, &mut rng).is_err());
        assert!(sample_uniform_sphere(3, 0, &mut rng).is_err());
    }

    #[test]
    fn uniform_projects_to_uniform_circle() {
        let mut rng = rng_from_seed(2);
        let n = 100_000;
        let c = sample_uniform_sphere(5, n, &mut rng).unwrap();
        let u = sample_stiefel(5, &mut rng).unwrap();
        let t: Vec<f64> = c
            .rows()
            .map(|r| {
                let p = SpherePoint::new(r.to_vec()).unwrap();
                circle_coordinate(geodesic_project(&u, &p).unwrap()).unwrap().value()
            })
            .collect();
        assert!(ks_uniform(t) < 1.628 / (n as f64).sqrt());
    }

    #[test]
    fn vmf_zero_kappa_is_uniform() {
        let mut rng = rng_from_seed(3);
        let n = 20_000;
        let v = sample_vmf(&VmfParams::new(e(3, 2), 0.0).unwrap(), n, &mut rng).unwrap();
        let u = sample_uniform_sphere(3, n, &mut rng).unwrap();
        // two-sample 1% critical value
        let crit = 1.628 * (2.0 / n as f64).sqrt();
        for k in 0..3 {
            let a: Vec<f64> = v.rows().map(|r| r[k]).collect();
            let b: Vec<f64> = u.rows().map(|r| r[k]).collect();
            assert!(ks_two(a, b) < crit, "coordinate {k}");
        }
    }

    #[test]
    fn vmf_concentrates_for_large_kappa() {
        let mut rng = rng_from_seed(4);
        let mu = SpherePoint::normalize(vec![1.0, -2.0, 0.5]).unwrap();
        let c = sample_vmf(&VmfParams::new(mu.clone(), 1e4).unwrap(), 2000, &mut rng).unwrap();
        assert!(all_unit(&c));
        let m = SpherePoint::normalize(c.mean()).unwrap();
        assert!(crate::sphere_geom::sphere_distance(&m, &mu) < 0.05);
    }

    #[test]
    fn vmf_mean_resultant_in_three_dimensions() {
        let mut rng = rng_from_seed(5);
        let n = 100_000;
        let (c, stats) = sample_vmf_with_stats(&VmfParams::new(e(3, 0), 10.0).unwrap(), n, &mut rng).unwrap();
        let r = norm(&c.mean());
        let expected = 1.0 / 10.0f64.tanh() - 0.1;
        // sd of μᵀx under vMF(κ=10, d=3) is about 0.1
        assert!((r - expected).abs() < 5.0 * 0.1 / (n as f64).sqrt(), "{r} vs {expected}");
        assert!(stats.acceptance_rate() > 0.5 && stats.acceptance_rate() <= 1.0);
    }

    #[test]
    fn vmf_is_rotation_equivariant() {
        let mut rng = rng_from_seed(6);
        let n = 100_000;
        // rotation by 90 degrees in the (x, y) plane: e1 -> e2
        let rot = [0.0, -1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0];
        let a = sample_vmf(&VmfParams::new(e(3, 0), 4.0).unwrap(), n, &mut rng).unwrap();
        let a = a.transformed(&rot).unwrap();
        let b = sample_vmf(&VmfParams::new(e(3, 1), 4.0).unwrap(), n, &mut rng).unwrap();
        let tol = 5.0 * (2.0 / n as f64).sqrt();
        let (ma, mb) = (a.mean(), b.mean());
        for k in 0..3 {
            assert!((ma[k] - mb[k]).abs() < tol);
            let sa = a.rows().map(|r| r[k] * r[k]).sum::<f64>() / n as f64;
            let sb = b.rows().map(|r| r[k] * r[k]).sum::<f64>() / n as f64;
            assert!((sa - sb).abs() < tol);
        }
    }

    #[test]
    fn vmf_rejects_negative_kappa() {
        assert!(VmfParams::new(e(3, 0), -1.0).is_err());
        assert!(VmfParams::new(e(3, 0), 0.0).is_ok());
    }

    #[test]
    fn bessel_matches_half_integer_closed_forms() {
        for &x in &[0.01f64, 0.5, 1.0, 7.0, 30.0, 49.9, 50.1, 80.0, 400.0, 1e4] {
            let log_sinh = x + (-(-2.0 * x).exp()).ln_1p() - 2.0f64.ln();
            let i_half = 0.5 * (2.0 / (PI * x)).ln() + log_sinh;
            assert!((log_bessel_i(0.5, x) - i_half).abs() < 1e-10 * i_half.abs().max(1.0), "x = {x}");
            let coth_minus = 1.0 / x.tanh() - 1.0 / x;
            let i_3half = i_half + coth_minus.ln();
            let got = log_bessel_i(1.5, x);
            assert!((got - i_3half).abs() < 1e-9 * i_3half.abs().max(1.0), "x = {x}: {got} vs {i_3half}");
        }
    }

    #[test]
    fn bessel_is_continuous_across_the_switch() {
        for &nu in &[0.0, 1.0, 2.5, 4.0] {
            let s = log_bessel_i_series(nu, 60.0);
            let a = log_bessel_i_asymptotic(nu, 60.0).unwrap();
            assert!((s - a).abs() < 1e-10, "nu = {nu}: {s} vs {a}");
        }
    }

    #[test]
    fn vmf_density_examples() {
        let p0 = VmfParams::new(e(3, 0), 0.0).unwrap();
        let v = vmf_log_density(&p0, &e(3, 1)).unwrap();
        assert!((v - (1.0 / (4.0 * PI)).ln()).abs() < 1e-12);

        let p = VmfParams::new(e(3, 2), 5.0).unwrap();
        let at_mu = vmf_log_density(&p, &e(3, 2)).unwrap();
        let mut rng = rng_from_seed(7);
        let u = sample_uniform_sphere(3, 1_000_000, &mut rng).unwrap();
        let mut integral = 0.0;
        for r in u.rows() {
            let x = SpherePoint::from_unit_unchecked(r.to_vec());
            let lv = vmf_log_density(&p, &x).unwrap();
            assert!(lv <= at_mu + 1e-12);
            integral += lv.exp();
        }
        integral *= 4.0 * PI / u.len() as f64;
        assert!((integral - 1.0).abs() < 0.01, "{integral}");
    }

    #[test]
    fn vmf_density_in_high_dimension_is_normalised() {
        // d = 10, compare against the one-dimensional integral over the cosine
        let d = 10usize;
        let kappa = 3.0;
        let p = VmfParams::new(e(d, 0), kappa).unwrap();
        let log_c = vmf_log_density(&p, &e(d, 1)).unwrap();
        // area of S^{d-2} times ∫ exp(κt)(1−t²)^{(d−3)/2} dt
        let area = log_sphere_area(d - 1).exp();
        let m = 200_000;
        let h = 2.0 / m as f64;
        let integral: f64 = (0..m)
            .map(|k| {
                let t = -1.0 + (k as f64 + 0.5) * h;
                (kappa * t).exp() * (1.0 - t * t).powf((d as f64 - 3.0) / 2.0)
            })
            .sum::<f64>()
            * h;
        assert!((log_c.exp() * area * integral - 1.0).abs() < 1e-6);
    }

    #[test]
    fn power_spherical_mean_cosine() {
        let mut rng = rng_from_seed(8);
        let n = 100_000;
        let (d, kappa) = (4usize, 3.0);
        let mu = SpherePoint::normalize(vec![1.0, 1.0, 0.0, -1.0]).unwrap();
        let c = sample_power_spherical(&PowerSphericalParams::new(mu.clone(), kappa).unwrap(), n, &mut rng).unwrap();
        assert!(all_unit(&c));
        let cos: Vec<f64> = c.rows().map(|r| dot(r, mu.coords())).collect();
        let mean = cos.iter().sum::<f64>() / n as f64;
        let half = (d as f64 - 1.0) / 2.0;
        let expected = 2.0 * (kappa + half) / (kappa + d as f64 - 1.0) - 1.0;

        // quadrature of (1+t)^κ (1−t²)^{(d−3)/2}
        let m = 400_000;
        let (mut num, mut den) = (0.0, 0.0);
        for k in 0..m {
            let t = -1.0 + (k as f64 + 0.5) * 2.0 / m as f64;
            let w = (1.0 + t).powf(kappa) * (1.0 - t * t).powf((d as f64 - 3.0) / 2.0);
            num += t * w;
            den += w;
        }
        assert!((num / den - expected).abs() < 1e-6);
        let sd = (cos.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / n as f64).sqrt();
        assert!((mean - expected).abs() < 5.0 * sd / (n as f64).sqrt());
    }

    #[test]
    fn power_spherical_concentrates() {
        let mut rng = rng_from_seed(9);
        let mu = e(3, 1);
        let c = sample_power_spherical(&PowerSphericalParams::new(mu.clone(), 1e6).unwrap(), 500, &mut rng).unwrap();
        for r in c.rows() {
            let x = SpherePoint::from_unit_unchecked(r.to_vec());
            assert!(crate::sphere_geom::sphere_distance(&x, &mu) < 0.05);
        }
        assert!(PowerSphericalParams::new(mu, 0.0).is_err());
    }

    #[test]
    fn mixture_examples() {
        let mut rng = rng_from_seed(10);
        let n = 100_000;
        let mix = VmfMixture::six_axis_modes(10.0).unwrap();
        let (c, labels) = sample_vmf_mixture_labeled(&mix, n, &mut rng).unwrap();
        assert!(all_unit(&c));
        assert!(norm(&c.mean()) < 0.05);
        let p: f64 = 1.0 / 6.0;
        let sigma = (n as f64 * p * (1.0 - p)).sqrt();
        for k in 0..6 {
            let count = labels.iter().filter(|&&l| l == k).count() as f64;
            assert!((count - n as f64 * p).abs() < 5.0 * sigma);
        }

        let single = VmfMixture::new(vec![VmfParams::new(e(3, 0), 2.0).unwrap()], vec![1.0]).unwrap();
        let a = sample_vmf_mixture(&single, 2000, &mut rng_from_seed(1)).unwrap();
        assert!((a.mean()[0] - (1.0 / 2.0f64.tanh() - 0.5)).abs() < 0.05);
        assert!(VmfMixture::new(vec![], vec![]).is_err());
        assert!(VmfMixture::new(vec![VmfParams::new(e(3, 0), 2.0).unwrap()], vec![0.5]).is_err());
    }
}
