//! Optimal transport on the circle `S¹ ≅ ℝ/ℤ`, parametrised by `[0, 1)`.
//!
//! For a cost `|d_{S¹}(x, y)|^p` the transport cost between `μ` and `ν` is
//!
//! ```text
//! W(μ, ν) = inf_α ∫₀¹ |F_μ⁻¹(t) − (F_ν − α)⁻¹(t)|^p dt
//! ```
//!
//! where `α` picks the point at which the circle is cut and unrolled onto the line.
//! The objective is convex and coercive in `α`, and every minimiser lies in `[-1, 1]`.
//! [`w_circle_binary_search`] bisects on the sign of its exact right derivative.
//! For `p = 1` the minimiser is the level median of `F_μ − F_ν`
//! ([`w1_level_median`]). Against the uniform measure with `p = 2` the optimal shift is
//! the mean minus one half, giving the closed form [`w2_uniform_closed_form`].

use crate::error::{param, Error, Result};

/// A point of the circle, stored as its coordinate in `[0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct CirclePoint(f64);

impl CirclePoint {
    /// Reduces `t` modulo 1 (so `-0.1` becomes `0.9`).
    pub fn new(t: f64) -> Self {
        CirclePoint(wrap_unit(t))
    }

    pub fn try_new(t: f64) -> Result<Self> {
        if !t.is_finite() {
            return Err(param(format!("circle coordinate must be finite, got {t}")));
        }
        Ok(Self::new(t))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Floor-based reduction to `[0, 1)`.
#[inline]
pub fn wrap_unit(t: f64) -> f64 {
    let r = t - t.floor();
    // t = -1e-20 gives 1.0 after rounding
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// Result of the shift search: the cut parameter and the transport cost there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftResult {
    pub alpha: f64,
    pub cost: f64,
}

/// Weighted empirical measure on the circle with atoms sorted ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct CircleEmpirical {
    points: Vec<f64>,
    weights: Vec<f64>,
    cum: Vec<f64>,
    uniform: bool,
}

impl CircleEmpirical {
    /// Uniform weights `1/n`. Coordinates are reduced modulo 1 and sorted.
    pub fn uniform<I: IntoIterator<Item = f64>>(coords: I) -> Result<Self> {
        let mut points: Vec<f64> = coords.into_iter().map(wrap_unit).collect();
        if points.is_empty() {
            return Err(param("circle measure needs at least one atom"));
        }
        if points.iter().any(|t| !t.is_finite()) {
            return Err(param("circle coordinates must be finite"));
        }
        points.sort_by(f64::total_cmp);
        Ok(Self::from_sorted_uniform(points))
    }

    /// Fast path for coordinates already reduced to `[0, 1)` and sorted.
    pub(crate) fn from_sorted_uniform(points: Vec<f64>) -> Self {
        debug_assert!(points.windows(2).all(|w| w[0] <= w[1]));
        let n = points.len();
        let w = 1.0 / n as f64;
        let cum = (1..=n).map(|i| i as f64 / n as f64).collect();
        CircleEmpirical { points, weights: vec![w; n], cum, uniform: true }
    }

    /// Arbitrary positive weights, normalised to sum to one. Sorting is stable and
    /// co-permutes the weights.
    pub fn weighted(coords: &[f64], weights: &[f64]) -> Result<Self> {
        if coords.is_empty() {
            return Err(param("circle measure needs at least one atom"));
        }
        if coords.len() != weights.len() {
            return Err(param(format!("{} coordinates but {} weights", coords.len(), weights.len())));
        }
        if coords.iter().any(|t| !t.is_finite()) {
            return Err(param("circle coordinates must be finite"));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(param("weights must be positive and finite"));
        }
        let total: f64 = weights.iter().sum();
        let mut idx: Vec<usize> = (0..coords.len()).collect();
        let reduced: Vec<f64> = coords.iter().map(|&t| wrap_unit(t)).collect();
        idx.sort_by(|&a, &b| reduced[a].total_cmp(&reduced[b]));
        let points: Vec<f64> = idx.iter().map(|&i| reduced[i]).collect();
        let weights: Vec<f64> = idx.iter().map(|&i| weights[i] / total).collect();
        let n = points.len();
        let uniform = weights.iter().all(|w| (w - 1.0 / n as f64).abs() <= 1e-12);
        let mut cum = Vec::with_capacity(n);
        let mut acc = 0.0;
        for w in &weights {
            acc += w;
            cum.push(acc);
        }
        cum[n - 1] = 1.0;
        Ok(CircleEmpirical { points, weights, cum, uniform })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// True when every weight equals `1/n` within `1e-12`.
    pub fn is_uniform(&self) -> bool {
        self.uniform
    }

    /// Weighted mean of the coordinates in `[0, 1)`.
    pub fn mean(&self) -> f64 {
        self.points.iter().zip(&self.weights).map(|(x, w)| x * w).sum()
    }

    /// Right-continuous quantile on `[0, 1)`: `x_i` for `u ∈ [c_{i-1}, c_i)`.
    pub fn quantile(&self, u: f64) -> f64 {
        let i = self.cum.partition_point(|&c| c <= u);
        self.points[i.min(self.len() - 1)]
    }

    /// Same atoms rotated by `c` around the circle.
    pub fn rotated(&self, c: f64) -> CircleEmpirical {
        let coords: Vec<f64> = self.points.iter().map(|x| x + c).collect();
        CircleEmpirical::weighted(&coords, &self.weights).expect("rotation keeps a valid measure")
    }
}

/// Geodesic distance on the circle, `min(|x − y|, 1 − |x − y|)`.
pub fn circle_distance(x: CirclePoint, y: CirclePoint) -> f64 {
    coord_distance(x.0, y.0)
}

#[inline]
fn coord_distance(x: f64, y: f64) -> f64 {
    let d = (x - y).abs();
    d.min(1.0 - d)
}

#[inline]
fn cost_fn(diff: f64, p: u32) -> f64 {
    let a = diff.abs();
    match p {
        1 => a,
        2 => a * a,
        _ => a.powi(p as i32),
    }
}

/// Quantile function of `ν` composed with a shift: `t ↦ F_ν⁻¹(t + α)` on `[0, 1)`,
/// using the periodic extension `F_ν⁻¹(u + 1) = F_ν⁻¹(u) + 1`. Exposed as
/// `m + 1` constant segments.
struct ShiftedQuantile<'a> {
    y: &'a [f64],
    cum: &'a [f64],
    r: f64,
    k: f64,
    j0: usize,
}

impl<'a> ShiftedQuantile<'a> {
    fn new(nu: &'a CircleEmpirical, alpha: f64) -> Self {
        let k = alpha.floor();
        let mut r = alpha - k;
        if r >= 1.0 {
            r = 0.0;
        }
        let j0 = nu.cum.partition_point(|&c| c <= r).min(nu.len() - 1);
        ShiftedQuantile { y: &nu.points, cum: &nu.cum, r, k, j0 }
    }

    #[inline]
    fn n_segments(&self) -> usize {
        self.y.len() + 1
    }

    /// `(end, value)` of segment `s`.
    #[inline]
    fn segment(&self, s: usize) -> (f64, f64) {
        let m = self.y.len();
        let head = m - self.j0;
        if s < head {
            let j = self.j0 + s;
            (self.cum[j] - self.r, self.y[j] + self.k)
        } else {
            let j = s - head;
            ((self.cum[j] + 1.0 - self.r).min(1.0), self.y[j] + self.k + 1.0)
        }
    }
}

/// Walks the merged breakpoint grid of `μ` and the shifted `ν` quantile, calling
/// `f(length, μ-index, ν-value)` on every piece of positive length.
fn merge_pieces<F: FnMut(f64, usize, f64)>(mu: &CircleEmpirical, q: &ShiftedQuantile, mut f: F) {
    let n = mu.len();
    let ns = q.n_segments();
    let (mut i, mut s) = (0usize, 0usize);
    let mut t = 0.0;
    let (mut eb, mut v) = q.segment(0);
    while i < n {
        let ea = mu.cum[i];
        let e = ea.min(eb);
        if e > t {
            f(e - t, i, v);
            t = e;
        }
        if ea <= eb {
            i += 1;
        }
        if eb <= ea {
            s += 1;
            if s == ns {
                break;
            }
            (eb, v) = q.segment(s);
        }
    }
}

fn shifted_cost(mu: &CircleEmpirical, nu: &CircleEmpirical, p: u32, alpha: f64) -> f64 {
    let q = ShiftedQuantile::new(nu, alpha);
    let x = &mu.points;
    let mut cost = 0.0;
    match p {
        1 => merge_pieces(mu, &q, |len, i, v| cost += len * (x[i] - v).abs()),
        2 => merge_pieces(mu, &q, |len, i, v| {
            let e = x[i] - v;
            cost += len * (e * e)
        }),
        _ => merge_pieces(mu, &q, |len, i, v| cost += len * cost_fn(x[i] - v, p)),
    }
    cost
}

/// Right derivative of the shifted cost in `α`. Increasing `α` moves every `ν`
/// breakpoint to the left, handing a sliver `[b − δ, b]` to the next `ν` value.
fn shifted_right_derivative(mu: &CircleEmpirical, nu: &CircleEmpirical, p: u32, alpha: f64) -> f64 {
    match p {
        1 => right_derivative_with(mu, nu, alpha, f64::abs),
        2 => right_derivative_with(mu, nu, alpha, |x| x * x),
        _ => right_derivative_with(mu, nu, alpha, |x| x.abs().powi(p as i32)),
    }
}

#[inline(always)]
fn right_derivative_with<C: Fn(f64) -> f64>(mu: &CircleEmpirical, nu: &CircleEmpirical, alpha: f64, cost: C) -> f64 {
    let q = ShiftedQuantile::new(nu, alpha);
    let (y, cum, r, k, j0) = (q.y, q.cum, q.r, q.k, q.j0);
    let m = y.len();
    let (mc, mx) = (&mu.cum[..], &mu.points[..]);
    let last = mc.len() - 1;
    let mut i = 0usize;
    let mut d = 0.0;
    let mut visit = |b: f64, v: f64, next: f64| {
        if next == v {
            return;
        }
        // μ atom occupying [b − δ, b]
        while i < last && mc[i] < b {
            i += 1;
        }
        let xq = mx[i];
        d += cost(xq - next) - cost(xq - v);
    };
    for j in j0..m {
        let next = if j + 1 < m { y[j + 1] + k } else { y[0] + k + 1.0 };
        visit(cum[j] - r, y[j] + k, next);
    }
    // the last wrapped segment ends at 1 and is followed by its own value plus one
    for j in 0..j0 {
        visit((cum[j] + 1.0 - r).min(1.0), y[j] + k + 1.0, y[j + 1] + k + 1.0);
    }
    d
}

/// Shifts at which a `ν` breakpoint crosses a `μ` breakpoint while `α` moves across
/// `[lo, lo + width]`. These are the kinks of the piecewise-smooth objective.
fn kinks_in_bracket(mu: &CircleEmpirical, nu: &CircleEmpirical, lo: f64, width: f64) -> Vec<f64> {
    let q = ShiftedQuantile::new(nu, lo);
    let mut out = Vec::new();
    // segment ends increase with s, so the window start only moves forward
    let mut start = 0usize;
    for s in 0..q.n_segments() {
        let (b, _) = q.segment(s);
        let from = b - width;
        // μ breakpoints are 0 and the cumulative weights
        if from <= 0.0 {
            out.push(lo + b);
        }
        while start < mu.cum.len() && mu.cum[start] < from {
            start += 1;
        }
        for &a in mu.cum[start..].iter().take_while(|&&a| a <= b) {
            out.push(lo + (b - a));
        }
    }
    out.sort_by(f64::total_cmp);
    out.dedup_by(|a, b| (*a - *b).abs() <= 1e-14);
    out
}

fn check_p(p: u32) -> Result<()> {
    if p < 1 {
        return Err(param("p must be at least 1"));
    }
    Ok(())
}

/// Wasserstein-`p` cost (`W_p^p`) on the circle by bisection on the cut parameter.
///
/// The bracket `[-1, 1]` contains every minimiser: at `α = 1` all unrolled `ν`
/// quantiles exceed every `μ` quantile and the derivative is non-negative, and
/// symmetrically at `α = -1`. Bisection stops once the bracket is narrower than `eps`.
/// The cost is then taken as the minimum over the bracket ends and the objective's
/// kinks inside it. For `p = 2` the secant root of the derivative is also tried.
pub fn w_circle_binary_search(mu: &CircleEmpirical, nu: &CircleEmpirical, p: u32, eps: f64) -> Result<ShiftResult> {
    check_p(p)?;
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(param(format!("eps must be positive, got {eps}")));
    }
    // grow a bracket outward from 0; minimisers usually sit close to it
    let d0 = shifted_right_derivative(mu, nu, p, 0.0);
    let dir = if d0 < 0.0 { 1.0 } else { -1.0 };
    let (mut near, mut d_near) = (0.0f64, d0);
    let mut step = 1.0 / 64.0;
    let (far, d_far) = loop {
        let a = dir * step;
        let d = shifted_right_derivative(mu, nu, p, a);
        if step >= 1.0 || (d < 0.0) != (d0 < 0.0) {
            break (a, d);
        }
        (near, d_near) = (a, d);
        step *= 2.0;
    };
    let (mut lo, mut d_lo, mut hi, mut d_hi) =
        if dir > 0.0 { (near, d_near, far, d_far) } else { (far, d_far, near, d_near) };
    while hi - lo > eps {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let d = shifted_right_derivative(mu, nu, p, mid);
        if d < 0.0 {
            lo = mid;
            d_lo = d;
        } else {
            hi = mid;
            d_hi = d;
        }
    }

    let mut best = ShiftResult { alpha: lo, cost: shifted_cost(mu, nu, p, lo) };
    let mut consider = |alpha: f64| {
        let c = shifted_cost(mu, nu, p, alpha);
        if c < best.cost {
            best = ShiftResult { alpha, cost: c };
        }
    };
    consider(hi);
    let kinks = kinks_in_bracket(mu, nu, lo, hi - lo);
    for &a in &kinks {
        consider(a);
    }
    if p == 2 && kinks.is_empty() && d_hi > d_lo {
        consider((lo - d_lo * (hi - lo) / (d_hi - d_lo)).clamp(lo, hi));
    }
    best.cost = best.cost.max(0.0);
    Ok(best)
}

/// Gradient of the shifted cost at fixed `α` with respect to each atom of `μ`
/// (in sorted order). With `α` optimal this is the envelope gradient of `W_p^p`.
pub fn transport_gradient(mu: &CircleEmpirical, nu: &CircleEmpirical, p: u32, alpha: f64) -> Vec<f64> {
    let q = ShiftedQuantile::new(nu, alpha);
    let x = &mu.points;
    let mut g = vec![0.0; mu.len()];
    let pf = p as f64;
    merge_pieces(mu, &q, |len, i, v| {
        let diff = x[i] - v;
        let slope = match p {
            1 => diff.signum(),
            2 => 2.0 * diff,
            _ => pf * diff.abs().powi(p as i32 - 1) * diff.signum(),
        };
        g[i] += len * slope;
    });
    g
}

/// Piecewise-constant `F_μ − F_ν` on the merged atom grid, as `(value, length)` pairs.
fn cdf_difference(mu: &CircleEmpirical, nu: &CircleEmpirical) -> Vec<(f64, f64)> {
    let (x, y) = (&mu.points, &nu.points);
    let (n, m) = (x.len(), y.len());
    let mut out = Vec::with_capacity(n + m + 1);
    let (mut i, mut j) = (0usize, 0usize);
    let (mut fa, mut fb) = (0.0f64, 0.0f64);
    let mut t = 0.0f64;
    loop {
        let next = match (i < n, j < m) {
            (true, true) => x[i].min(y[j]),
            (true, false) => x[i],
            (false, true) => y[j],
            (false, false) => 1.0,
        };
        if next > t {
            out.push((fa - fb, next - t));
            t = next;
        }
        if i >= n && j >= m {
            break;
        }
        while i < n && x[i] <= next {
            fa += mu.weights[i];
            i += 1;
        }
        while j < m && y[j] <= next {
            fb += nu.weights[j];
            j += 1;
        }
    }
    out
}

/// Level median of a step function given as `(value, length)` pieces: the smallest
/// `c` with `|{f ≤ c}| ≥ 1/2` (relative to the total length).
pub fn level_median(pieces: &[(f64, f64)]) -> f64 {
    let mut sorted: Vec<(f64, f64)> = pieces.to_vec();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    let total: f64 = sorted.iter().map(|p| p.1).sum();
    let half = 0.5 * total;
    let mut acc = 0.0;
    for &(v, l) in &sorted {
        acc += l;
        if acc >= half {
            return v;
        }
    }
    sorted.last().map(|p| p.0).unwrap_or(0.0)
}

/// `W_1` on the circle: `∫₀¹ |F_μ − F_ν − LevMed(F_μ − F_ν)|`, exact on the merged grid.
pub fn w1_level_median(mu: &CircleEmpirical, nu: &CircleEmpirical) -> f64 {
    let pieces = cdf_difference(mu, nu);
    let med = level_median(&pieces);
    pieces.iter().map(|&(v, l)| l * (v - med).abs()).sum()
}

/// Optimal cut against the uniform measure for `p = 2`: weighted mean minus `1/2`.
pub fn optimal_shift_uniform(mu: &CircleEmpirical) -> f64 {
    mu.mean() - 0.5
}

/// `W_2²(μ, Unif(S¹))` from the sorted-sample closed form. Needs uniform weights.
pub fn w2_uniform_closed_form(mu: &CircleEmpirical) -> Result<f64> {
    if !mu.is_uniform() {
        return Err(Error::Unsupported("closed form requires uniform weights 1/n".to_string()));
    }
    Ok(w2_uniform_sorted(&mu.points))
}

/// Closed form on sorted coordinates in `[0, 1)`.
pub(crate) fn w2_uniform_sorted(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    let (mut s1, mut s2, mut s3) = (0.0, 0.0, 0.0);
    for (i, &xi) in x.iter().enumerate() {
        s1 += xi;
        s2 += xi * xi;
        s3 += (n - 1.0 - 2.0 * i as f64) * xi;
    }
    let mean = s1 / n;
    (s2 / n - mean * mean + s3 / (n * n) + 1.0 / 12.0).max(0.0)
}

/// Derivative of [`w2_uniform_sorted`] with respect to each sorted coordinate.
pub(crate) fn w2_uniform_sorted_grad(x: &[f64]) -> Vec<f64> {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    x.iter().enumerate().map(|(i, &xi)| 2.0 / n * (xi - mean) + (n - 1.0 - 2.0 * i as f64) / (n * n)).collect()
}

/// Midpoint-rule approximation of `∫₀¹ |F_μ⁻¹(t) − t − α̂|² dt`. Accepts any weights.
pub fn w2_uniform_rectangle(mu: &CircleEmpirical, n_rect: usize) -> Result<f64> {
    if n_rect < 1 {
        return Err(param("n_rect must be at least 1"));
    }
    let alpha = optimal_shift_uniform(mu);
    let h = 1.0 / n_rect as f64;
    let n = mu.len();
    let mut i = 0usize;
    let mut acc = 0.0;
    for k in 0..n_rect {
        let t = (k as f64 + 0.5) * h;
        while i + 1 < n && mu.cum[i] <= t {
            i += 1;
        }
        let r = mu.points[i] - t - alpha;
        acc += r * r;
    }
    Ok(acc * h)
}

/// Exhaustive minimum over the `n` cyclic assignments of two sorted uniform samples
/// of equal size. `O(n²)`; used as an oracle.
pub fn w_circle_brute_force(mu: &CircleEmpirical, nu: &CircleEmpirical, p: u32) -> Result<f64> {
    check_p(p)?;
    if mu.len() != nu.len() {
        return Err(Error::Unsupported(format!("brute force needs equal sizes, got {} and {}", mu.len(), nu.len())));
    }
    if !(mu.is_uniform() && nu.is_uniform()) {
        return Err(Error::Unsupported("brute force needs uniform weights".to_string()));
    }
    let n = mu.len();
    let (x, y) = (&mu.points, &nu.points);
    let best = (0..n)
        .map(|k| (0..n).map(|i| cost_fn(coord_distance(x[i], y[(i + k) % n]), p)).sum::<f64>() / n as f64)
        .fold(f64::INFINITY, f64::min);
    Ok(best)
}
