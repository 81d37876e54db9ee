//! Geometry of the unit sphere `S^{d-1} ⊂ ℝ^d`.
//!
//! A great circle is described by a [`StiefelFrame`] `U ∈ ℝ^{d×2}` with orthonormal
//! columns. The geodesic projection of `x` onto that circle is `Uᵀx / ‖Uᵀx‖` in frame
//! coordinates, and [`circle_coordinate`] turns it into a point of `[0, 1)`.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::circle_ot::{wrap_unit, CirclePoint};
use crate::error::{param, Error, Result};

/// Tolerance on `‖x‖ = 1` accepted by [`SpherePoint::new`].
pub const UNIT_TOL: f64 = 1e-10;

/// Projections with `‖Uᵀx‖` at or below this are rejected as degenerate.
pub const DEGENERATE_TOL: f64 = 1e-12;

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Unit vector in `ℝ^d`, `d ≥ 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpherePoint(Vec<f64>);

impl SpherePoint {
    /// Accepts `coords` only if it already has unit norm within [`UNIT_TOL`].
    /// The stored vector is renormalised exactly.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(param(format!("sphere points need d >= 2, got {}", coords.len())));
        }
        let r = norm(&coords);
        if !r.is_finite() || (r - 1.0).abs() > UNIT_TOL {
            return Err(param(format!("expected a unit vector, norm is {r}")));
        }
        Ok(SpherePoint(coords.into_iter().map(|c| c / r).collect()))
    }

    /// Normalises any nonzero finite vector.
    pub fn normalize(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(param(format!("sphere points need d >= 2, got {}", coords.len())));
        }
        let r = norm(&coords);
        if !(r.is_finite() && r > 0.0) {
            return Err(param("cannot normalise a zero or non-finite vector"));
        }
        Ok(SpherePoint(coords.into_iter().map(|c| c / r).collect()))
    }

    pub(crate) fn from_unit_unchecked(coords: Vec<f64>) -> Self {
        SpherePoint(coords)
    }

    /// `e_i` in `ℝ^d`.
    pub fn basis(d: usize, i: usize) -> Result<Self> {
        if d < 2 || i >= d {
            return Err(param(format!("basis vector e_{i} not defined in dimension {d}")));
        }
        let mut v = vec![0.0; d];
        v[i] = 1.0;
        Ok(SpherePoint(v))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.0
    }
}

/// Uniformly weighted point cloud on `S^{d-1}`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereCloud {
    dim: usize,
    data: Vec<f64>,
}

impl SphereCloud {
    /// Checks every row is unit-norm within `tol`, then renormalises.
    pub fn from_rows(dim: usize, data: Vec<f64>, tol: f64) -> Result<Self> {
        if dim < 2 {
            return Err(param(format!("sphere clouds need d >= 2, got {dim}")));
        }
        if data.is_empty() || !data.len().is_multiple_of(dim) {
            return Err(param(format!("row data of length {} is not a nonempty multiple of d = {dim}", data.len())));
        }
        let mut data = data;
        for (i, row) in data.chunks_mut(dim).enumerate() {
            let r = norm(row);
            if !r.is_finite() || (r - 1.0).abs() > tol {
                return Err(Error::Malformed(format!("row {i} has norm {r}, expected 1")));
            }
            row.iter_mut().for_each(|c| *c /= r);
        }
        Ok(SphereCloud { dim, data })
    }

    /// Normalises every row; zero rows are rejected.
    pub fn normalize_rows(dim: usize, data: Vec<f64>) -> Result<Self> {
        if dim < 2 || data.is_empty() || !data.len().is_multiple_of(dim) {
            return Err(param("invalid cloud shape"));
        }
        let mut data = data;
        for (i, row) in data.chunks_mut(dim).enumerate() {
            let r = norm(row);
            if !(r.is_finite() && r > 0.0) {
                return Err(param(format!("row {i} cannot be normalised")));
            }
            row.iter_mut().for_each(|c| *c /= r);
        }
        Ok(SphereCloud { dim, data })
    }

    pub(crate) fn from_unit_rows(dim: usize, data: Vec<f64>) -> Self {
        debug_assert!(dim >= 2 && !data.is_empty() && data.len().is_multiple_of(dim));
        SphereCloud { dim, data }
    }

    pub fn from_points(points: &[SpherePoint]) -> Result<Self> {
        let dim = points.first().ok_or_else(|| param("empty cloud"))?.dim();
        let mut data = Vec::with_capacity(dim * points.len());
        for p in points {
            if p.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: p.dim() });
            }
            data.extend_from_slice(p.coords());
        }
        Ok(SphereCloud { dim, data })
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

    pub fn point(&self, i: usize) -> SpherePoint {
        SpherePoint(self.row(i).to_vec())
    }

    /// Euclidean mean of the rows (not normalised).
    pub fn mean(&self) -> Vec<f64> {
        let mut m = vec![0.0; self.dim];
        for row in self.rows() {
            m.iter_mut().zip(row).for_each(|(a, b)| *a += b);
        }
        let n = self.len() as f64;
        m.iter_mut().for_each(|a| *a /= n);
        m
    }

    /// Applies a `d×d` matrix (row-major) to every point.
    pub fn transformed(&self, matrix: &[f64]) -> Result<SphereCloud> {
        let d = self.dim;
        if matrix.len() != d * d {
            return Err(param("transformation must be d x d"));
        }
        let mut out = Vec::with_capacity(self.data.len());
        for row in self.rows() {
            for r in 0..d {
                out.push(dot(&matrix[r * d..(r + 1) * d], row));
            }
        }
        SphereCloud::normalize_rows(d, out)
    }

    pub fn concat(&self, other: &SphereCloud) -> Result<SphereCloud> {
        if other.dim != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: other.dim });
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(SphereCloud { dim: self.dim, data })
    }
}

/// Point of the Stiefel manifold `V_{d,2}`: a `d×2` matrix with orthonormal columns.
/// Stored as `d` rows `[u1_k, u2_k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct StiefelFrame {
    rows: Vec<[f64; 2]>,
}

impl StiefelFrame {
    /// Builds a frame from two columns, checking `UᵀU = I₂` within `1e-10`.
    pub fn from_columns(c1: &[f64], c2: &[f64]) -> Result<Self> {
        if c1.len() != c2.len() {
            return Err(Error::DimensionMismatch { expected: c1.len(), got: c2.len() });
        }
        if c1.len() < 2 {
            return Err(param("frames need d >= 2"));
        }
        let (n1, n2, c) = (dot(c1, c1), dot(c2, c2), dot(c1, c2));
        if (n1 - 1.0).abs() > 1e-10 || (n2 - 1.0).abs() > 1e-10 || c.abs() > 1e-10 {
            return Err(param("frame columns are not orthonormal"));
        }
        Ok(StiefelFrame { rows: c1.iter().zip(c2).map(|(&a, &b)| [a, b]).collect() })
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r[j]).collect()
    }

    /// Rows of `U` (equivalently columns of `Uᵀ`).
    pub fn rows(&self) -> &[[f64; 2]] {
        &self.rows
    }

    /// `UᵀU`, for checking orthonormality.
    pub fn gram(&self) -> [[f64; 2]; 2] {
        let mut g = [[0.0; 2]; 2];
        for r in &self.rows {
            g[0][0] += r[0] * r[0];
            g[0][1] += r[0] * r[1];
            g[1][1] += r[1] * r[1];
        }
        g[1][0] = g[0][1];
        g
    }

    /// `Uᵀx`.
    #[inline]
    pub fn apply_transpose(&self, x: &[f64]) -> [f64; 2] {
        let mut z = [0.0; 2];
        for (r, &xi) in self.rows.iter().zip(x) {
            z[0] += r[0] * xi;
            z[1] += r[1] * xi;
        }
        z
    }

    /// `Uz` for a 2-vector `z`.
    pub fn lift(&self, z: [f64; 2]) -> Vec<f64> {
        self.rows.iter().map(|r| r[0] * z[0] + r[1] * z[1]).collect()
    }
}

/// Tangent vector `v ∈ T_xS^{d-1}`, i.e. `⟨x, v⟩ = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentVector {
    base: SpherePoint,
    v: Vec<f64>,
}

impl TangentVector {
    /// Checks tangency within `1e-10`.
    pub fn new(base: SpherePoint, v: Vec<f64>) -> Result<Self> {
        if v.len() != base.dim() {
            return Err(Error::DimensionMismatch { expected: base.dim(), got: v.len() });
        }
        let ip = dot(base.coords(), &v);
        if ip.abs() > 1e-10 * (1.0 + norm(&v)) {
            return Err(param(format!("vector is not tangent: <x, v> = {ip}")));
        }
        Ok(TangentVector { base, v })
    }

    pub fn base(&self) -> &SpherePoint {
        &self.base
    }

    pub fn vector(&self) -> &[f64] {
        &self.v
    }
}

/// Uniform frame on `V_{d,2}`: thin QR of a Gaussian `d×2` matrix with `diag(R) > 0`
/// (Gram-Schmidt with one reorthogonalisation pass).
pub fn sample_stiefel<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<StiefelFrame> {
    if d < 2 {
        return Err(param(format!("Stiefel frames need d >= 2, got {d}")));
    }
    loop {
        let mut z = vec![[0.0f64; 2]; d];
        for r in z.iter_mut() {
            r[0] = rng.sample(StandardNormal);
            r[1] = rng.sample(StandardNormal);
        }
        if let Some(frame) = orthonormalize(z) {
            return Ok(frame);
        }
    }
}

fn orthonormalize(mut z: Vec<[f64; 2]>) -> Option<StiefelFrame> {
    let n1 = z.iter().map(|r| r[0] * r[0]).sum::<f64>().sqrt();
    if n1 < 1e-300 {
        return None;
    }
    z.iter_mut().for_each(|r| r[0] /= n1);
    for _ in 0..2 {
        let c: f64 = z.iter().map(|r| r[0] * r[1]).sum();
        z.iter_mut().for_each(|r| r[1] -= c * r[0]);
    }
    let n2 = z.iter().map(|r| r[1] * r[1]).sum::<f64>().sqrt();
    if n2 < 1e-12 {
        return None;
    }
    z.iter_mut().for_each(|r| r[1] /= n2);
    Some(StiefelFrame { rows: z })
}

/// Geodesic projection onto the great circle of `U`, in frame coordinates.
pub fn geodesic_project(u: &StiefelFrame, x: &SpherePoint) -> Result<[f64; 2]> {
    if u.dim() != x.dim() {
        return Err(Error::DimensionMismatch { expected: u.dim(), got: x.dim() });
    }
    project_coords(u, x.coords())
}

#[inline]
pub(crate) fn project_coords(u: &StiefelFrame, x: &[f64]) -> Result<[f64; 2]> {
    let z = u.apply_transpose(x);
    let r = (z[0] * z[0] + z[1] * z[1]).sqrt();
    if r <= DEGENERATE_TOL {
        return Err(Error::DegenerateProjection { norm: r });
    }
    Ok([z[0] / r, z[1] / r])
}

/// Angle of a unit 2-vector as a fraction of a turn, in `[0, 1)`.
pub fn circle_coordinate(z: [f64; 2]) -> Result<CirclePoint> {
    let r = (z[0] * z[0] + z[1] * z[1]).sqrt();
    if (r - 1.0).abs() > 1e-8 {
        return Err(param(format!("expected a unit 2-vector, norm is {r}")));
    }
    Ok(CirclePoint::new(angle_fraction(z)))
}

/// `(π + atan2(−z₂, −z₁)) / 2π` reduced to `[0, 1)`; scale-free in `z`.
#[inline]
pub(crate) fn angle_fraction(z: [f64; 2]) -> f64 {
    wrap_unit((PI + (-z[1]).atan2(-z[0])) / (2.0 * PI))
}

/// Circle coordinate of `P^U(x)` without materialising the projection.
#[inline]
pub(crate) fn slice_coordinate(u: &StiefelFrame, x: &[f64]) -> Result<f64> {
    let z = u.apply_transpose(x);
    let r = (z[0] * z[0] + z[1] * z[1]).sqrt();
    if r <= DEGENERATE_TOL {
        return Err(Error::DegenerateProjection { norm: r });
    }
    Ok(angle_fraction(z))
}

/// `exp_x(v) = cos(‖v‖) x + sin(‖v‖) v / ‖v‖`.
pub fn exp_map(v: &TangentVector) -> SpherePoint {
    SpherePoint(exp_coords(v.base.coords(), &v.v))
}

pub(crate) fn exp_coords(x: &[f64], v: &[f64]) -> Vec<f64> {
    let nv = norm(v);
    if nv < 1e-12 {
        return x.to_vec();
    }
    let (s, c) = nv.sin_cos();
    let mut out: Vec<f64> = x.iter().zip(v).map(|(xi, vi)| c * xi + s * vi / nv).collect();
    // absorb rounding so the result stays on the sphere
    let r = norm(&out);
    out.iter_mut().for_each(|o| *o /= r);
    out
}

/// `Proj_x(g) = g − ⟨g, x⟩ x`.
pub fn tangent_project(x: &SpherePoint, g: &[f64]) -> Result<TangentVector> {
    if g.len() != x.dim() {
        return Err(Error::DimensionMismatch { expected: x.dim(), got: g.len() });
    }
    Ok(TangentVector { base: x.clone(), v: tangent_coords(x.coords(), g) })
}

pub(crate) fn tangent_coords(x: &[f64], g: &[f64]) -> Vec<f64> {
    let ip = dot(g, x);
    g.iter().zip(x).map(|(gi, xi)| gi - ip * xi).collect()
}

/// Great-circle distance `arccos⟨x, y⟩`, with the inner product clamped to `[-1, 1]`.
pub fn sphere_distance(x: &SpherePoint, y: &SpherePoint) -> f64 {
    dot(x.coords(), y.coords()).clamp(-1.0, 1.0).acos()
}
