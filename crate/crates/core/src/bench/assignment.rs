//! Exact Wasserstein baseline between equal-size clouds as a linear assignment problem.

use rayon::prelude::*;

use crate::error::{param, Error, Result};
use crate::sphere_geom::{dot, SphereCloud};

/// Largest cloud size the baseline accepts; the solver is cubic in `n`.
pub const ASSIGNMENT_CAP: usize = 2048;

/// Minimum-cost perfect matching of a square row-major cost matrix
/// (shortest augmenting paths with potentials). Returns the total cost and
/// the column assigned to each row.
pub fn solve_assignment(cost: &[f64], n: usize) -> Result<(f64, Vec<usize>)> {
    if n == 0 || cost.len() != n * n {
        return Err(param("assignment needs a nonempty square cost matrix"));
    }
    if cost.iter().any(|c| !c.is_finite()) {
        return Err(param("assignment costs must be finite"));
    }
    // 1-based potentials and matching, index 0 is the virtual source
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; n + 1];
    let mut row_of = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    let mut minv = vec![0.0f64; n + 1];
    let mut used = vec![false; n + 1];
    for i in 1..=n {
        row_of[0] = i;
        let mut j0 = 0usize;
        minv.iter_mut().for_each(|m| *m = f64::INFINITY);
        used.iter_mut().for_each(|b| *b = false);
        loop {
            used[j0] = true;
            let i0 = row_of[j0];
            let crow = &cost[(i0 - 1) * n..i0 * n];
            let ui = u[i0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            for j in 1..=n {
                if !used[j] {
                    let cur = crow[j - 1] - ui - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[row_of[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if row_of[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            row_of[j0] = row_of[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut col_of = vec![0usize; n];
    for j in 1..=n {
        col_of[row_of[j] - 1] = j - 1;
    }
    let total = col_of.iter().enumerate().map(|(i, &j)| cost[i * n + j]).sum();
    Ok((total, col_of))
}

/// Matrix of `arccos(⟨x_i, y_j⟩)^p`.
pub fn geodesic_cost_matrix(mu: &SphereCloud, nu: &SphereCloud, p: u32) -> Vec<f64> {
    let m = nu.len();
    let mut out = vec![0.0; mu.len() * m];
    out.par_chunks_mut(m).zip(mu.as_slice().par_chunks(mu.dim())).for_each(|(row, x)| {
        for (c, y) in row.iter_mut().zip(nu.rows()) {
            *c = dot(x, y).clamp(-1.0, 1.0).acos().powi(p as i32);
        }
    });
    out
}

/// Exact `W_p^p` on the sphere with the geodesic ground cost, for clouds of equal size
/// up to [`ASSIGNMENT_CAP`].
pub fn wasserstein_exact(mu: &SphereCloud, nu: &SphereCloud, p: u32) -> Result<f64> {
    if mu.dim() != nu.dim() {
        return Err(Error::DimensionMismatch { expected: mu.dim(), got: nu.dim() });
    }
    if mu.len() != nu.len() {
        return Err(Error::Unsupported("the assignment baseline needs clouds of equal size".to_string()));
    }
    if mu.len() > ASSIGNMENT_CAP {
        return Err(Error::Unsupported(format!(
            "the assignment baseline is capped at n = {ASSIGNMENT_CAP}, got {}",
            mu.len()
        )));
    }
    if p < 1 {
        return Err(param("p must be at least 1"));
    }
    let n = mu.len();
    let (total, _) = solve_assignment(&geodesic_cost_matrix(mu, nu, p), n)?;
    Ok(total / n as f64)
}
