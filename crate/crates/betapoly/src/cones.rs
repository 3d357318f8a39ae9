//! Polyhedral cones `lin(lineality) ⊕ pos(generators)`, an exact-arithmetic
//! style phase-1 simplex kernel for cone predicates, and Monte Carlo
//! estimators of solid angles, external angles, Grassmann angles and conic
//! intrinsic volumes.
//!
//! Grassmann angles use the convention h₀ = ½ for cones that are not
//! subspaces, which is what the conic Gauss–Bonnet relation forces.

use crate::error::{Error, Result};
use crate::hull::{face_directions, PointConfig};
use crate::linalg::{
    complement_basis, coordinates, dot, extend_orthonormal, norm, orthonormal_basis, solve, sub,
};
use crate::sampling::{sample_uniform_subspace, SeededStream};
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Mean, standard error and sample count of a Monte Carlo estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MCEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub n_samples: usize,
}

impl MCEstimate {
    /// A value known without sampling error.
    pub fn exact(mean: f64, n_samples: usize) -> Self {
        MCEstimate {
            mean,
            std_error: 0.0,
            n_samples: n_samples.max(1),
        }
    }

    /// z-score of the difference to a reference value with its own error.
    pub fn z_score(&self, reference: f64, reference_sigma: f64) -> f64 {
        let diff = self.mean - reference;
        let sigma = (self.std_error.powi(2) + reference_sigma.powi(2)).sqrt();
        if sigma == 0.0 {
            if diff.abs() <= 1e-9 * (1.0 + reference.abs()) {
                0.0
            } else {
                f64::INFINITY * diff.signum()
            }
        } else {
            diff / sigma
        }
    }
}

/// Streaming mean/variance (Welford) with an order-preserving merge.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Accumulator {
    pub n: usize,
    mean: f64,
    m2: f64,
}

impl Accumulator {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(&mut self, other: &Accumulator) {
        if other.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = *other;
            return;
        }
        let n = (self.n + other.n) as f64;
        let delta = other.mean - self.mean;
        self.mean += delta * other.n as f64 / n;
        self.m2 += other.m2 + delta * delta * self.n as f64 * other.n as f64 / n;
        self.n += other.n;
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            (self.m2 / (self.n - 1) as f64).max(0.0)
        }
    }

    pub fn estimate(&self) -> MCEstimate {
        let se = if self.n == 0 {
            0.0
        } else {
            (self.variance() / self.n as f64).sqrt()
        };
        MCEstimate {
            mean: self.mean,
            std_error: se,
            n_samples: self.n,
        }
    }
}

pub(crate) const BLOCK: usize = 1024;

/// Splits `total` draws into fixed blocks, each with its own sub-stream
/// derived from one seed drawn from `rng`, runs them on the rayon pool and
/// merges the per-block accumulators in block order. The result does not
/// depend on the number of worker threads.
pub fn run_blocks<F>(
    total: usize,
    block: usize,
    rng: &mut SeededStream,
    width: usize,
    f: F,
) -> Result<Vec<Accumulator>>
where
    F: Fn(&mut SeededStream, usize) -> Result<Vec<Accumulator>> + Sync,
{
    let seed = rng.fork_seed();
    let nblocks = total.div_ceil(block.max(1));
    let parts: Vec<Result<Vec<Accumulator>>> = (0..nblocks)
        .into_par_iter()
        .map(|b| {
            let count = block.min(total - b * block);
            let mut sub = SeededStream::new(seed, b as u64);
            f(&mut sub, count)
        })
        .collect();
    let mut acc = vec![Accumulator::default(); width];
    for part in parts {
        let part = part?;
        for (a, p) in acc.iter_mut().zip(&part) {
            a.merge(p);
        }
    }
    Ok(acc)
}

const PIVOT_TOL: f64 = 1e-10;
const MAX_PIVOTS: usize = 100_000;

/// Decides whether some λ ≥ 0 satisfies `Σ λ_j columns_j = rhs` (and
/// `Σ λ_j = 1` when `require_nonzero`), by phase 1 of the simplex method
/// with Bland's rule. `ambient` is the length of every column and of `rhs`.
pub fn cone_feasible(
    ambient: usize,
    columns: &[Vec<f64>],
    rhs: &[f64],
    require_nonzero: bool,
) -> Result<bool> {
    if rhs.len() != ambient || columns.iter().any(|c| c.len() != ambient) {
        return Err(Error::domain("cone_feasible: inconsistent dimensions"));
    }
    let p = columns.len();
    if p == 0 {
        return Ok(!require_nonzero && rhs.iter().all(|x| x.abs() <= PIVOT_TOL));
    }
    let m = ambient + usize::from(require_nonzero);
    let width = p + m + 1;
    let mut t = vec![0.0; m * width];
    for i in 0..ambient {
        let sign = if rhs[i] < 0.0 { -1.0 } else { 1.0 };
        for (j, c) in columns.iter().enumerate() {
            t[i * width + j] = sign * c[i];
        }
        t[i * width + p + m] = sign * rhs[i];
    }
    if require_nonzero {
        let i = ambient;
        for j in 0..p {
            t[i * width + j] = 1.0;
        }
        t[i * width + p + m] = 1.0;
    }
    for i in 0..m {
        t[i * width + p + i] = 1.0;
    }
    let mut basis: Vec<usize> = (p..p + m).collect();
    // Reduced costs of the phase-1 objective Σ artificials.
    let mut cost = vec![0.0; width];
    for i in 0..m {
        for j in 0..p {
            cost[j] -= t[i * width + j];
        }
        cost[p + m] -= t[i * width + p + m];
    }
    let scale = 1.0 + rhs.iter().fold(0.0f64, |s, x| s.max(x.abs()));
    for _ in 0..MAX_PIVOTS {
        let Some(enter) = (0..p + m).find(|&j| cost[j] < -PIVOT_TOL) else {
            return Ok(-cost[p + m] <= 1e-9 * scale);
        };
        let mut leave: Option<usize> = None;
        let mut best = f64::INFINITY;
        for i in 0..m {
            let a = t[i * width + enter];
            if a > PIVOT_TOL {
                let ratio = t[i * width + p + m] / a;
                let better = match leave {
                    None => true,
                    Some(l) => {
                        ratio < best - 1e-14 || (ratio <= best + 1e-14 && basis[i] < basis[l])
                    }
                };
                if better {
                    best = ratio;
                    leave = Some(i);
                }
            }
        }
        let Some(r) = leave else {
            return Err(Error::numerical(
                "phase-1 simplex reported an unbounded direction",
                None,
            ));
        };
        let piv = t[r * width + enter];
        for v in &mut t[r * width..(r + 1) * width] {
            *v /= piv;
        }
        let pivot_row: Vec<f64> = t[r * width..(r + 1) * width].to_vec();
        for i in 0..m {
            if i == r {
                continue;
            }
            let f = t[i * width + enter];
            if f != 0.0 {
                for (v, pr) in t[i * width..(i + 1) * width].iter_mut().zip(&pivot_row) {
                    *v -= f * pr;
                }
            }
        }
        let f = cost[enter];
        for (c, pr) in cost.iter_mut().zip(&pivot_row) {
            *c -= f * pr;
        }
        basis[r] = enter;
    }
    Err(Error::numerical(
        "phase-1 simplex exceeded its pivot limit",
        None,
    ))
}

/// A polyhedral cone `lin(lineality) ⊕ pos(generators)` in R^ambient_dim.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cone {
    pub ambient_dim: usize,
    pub generators: Vec<Vec<f64>>,
    pub lineality: Vec<Vec<f64>>,
}

impl Cone {
    pub fn new(
        ambient_dim: usize,
        generators: Vec<Vec<f64>>,
        lineality: Vec<Vec<f64>>,
    ) -> Result<Self> {
        if ambient_dim == 0 {
            return Err(Error::domain("cone ambient dimension must be positive"));
        }
        for v in generators.iter().chain(&lineality) {
            if v.len() != ambient_dim {
                return Err(Error::domain("cone vector has the wrong length"));
            }
        }
        if generators.iter().any(|g| norm(g) == 0.0) {
            return Err(Error::domain("cone generators must be nonzero"));
        }
        Ok(Cone {
            ambient_dim,
            generators,
            lineality,
        })
    }

    /// The whole space R^d.
    pub fn full(d: usize) -> Self {
        let lineality = (0..d)
            .map(|i| {
                let mut e = vec![0.0; d];
                e[i] = 1.0;
                e
            })
            .collect();
        Cone {
            ambient_dim: d,
            generators: Vec::new(),
            lineality,
        }
    }
}

/// A cone written as `L ⊕ C'` with `C'` pointed, in coordinates of the
/// orthogonal complement of `L`.
#[derive(Debug, Clone)]
struct Reduced {
    lineality_dim: usize,
    /// Dimension of the orthogonal complement of the lineality space.
    rest_dim: usize,
    /// Unit generators of `C'` in complement coordinates.
    gens: Vec<Vec<f64>>,
    /// Dimension of the whole cone when it is a linear subspace.
    subspace_dim: Option<usize>,
}

fn reduce(cone: &Cone) -> Result<Reduced> {
    let q = cone.ambient_dim;
    let lin = orthonormal_basis(&cone.lineality, 1e-10);
    let rest = complement_basis(&lin, q);
    let mut gens = Vec::new();
    for g in &cone.generators {
        let c = coordinates(g, &rest);
        let len = norm(&c);
        if len > 1e-10 * norm(g) {
            gens.push(c.into_iter().map(|x| x / len).collect::<Vec<f64>>());
        }
    }
    let rest_dim = rest.len();
    let mut reduced = Reduced {
        lineality_dim: lin.len(),
        rest_dim,
        gens,
        subspace_dim: None,
    };
    if reduced.gens.is_empty() {
        reduced.subspace_dim = Some(lin.len());
        return Ok(reduced);
    }
    let pointed = !cone_feasible(rest_dim, &reduced.gens, &vec![0.0; rest_dim], true)?;
    if !pointed {
        let mut all_symmetric = true;
        for g in &reduced.gens {
            let neg: Vec<f64> = g.iter().map(|x| -x).collect();
            if !cone_feasible(rest_dim, &reduced.gens, &neg, false)? {
                all_symmetric = false;
                break;
            }
        }
        if !all_symmetric {
            return Err(Error::Degenerate(
                "cone generators contain a line that is not declared as lineality".into(),
            ));
        }
        let span = orthonormal_basis(&reduced.gens, 1e-10);
        reduced.subspace_dim = Some(lin.len() + span.len());
    }
    Ok(reduced)
}

/// Membership test for `pos(gens)` inside R^dim, with a fast path for
/// simplicial cones.
struct Membership {
    dim: usize,
    gens: Vec<Vec<f64>>,
    inverse: Option<Vec<Vec<f64>>>,
}

impl Membership {
    fn new(dim: usize, gens: Vec<Vec<f64>>) -> Self {
        let mut inverse = None;
        if gens.len() == dim && dim > 0 {
            // Row i of m is the i-th coordinate across generators.
            let m: Vec<Vec<f64>> = (0..dim)
                .map(|i| gens.iter().map(|g| g[i]).collect())
                .collect();
            let cols: Option<Vec<Vec<f64>>> = (0..dim)
                .map(|i| {
                    let mut e = vec![0.0; dim];
                    e[i] = 1.0;
                    solve(&m, &e, 1e-12)
                })
                .collect();
            if let Some(cols) = cols {
                // inverse[j][i] = (M^{-1})_{j i}
                inverse = Some(
                    (0..dim)
                        .map(|j| cols.iter().map(|c| c[j]).collect())
                        .collect(),
                );
            }
        }
        Membership { dim, gens, inverse }
    }

    fn contains(&self, z: &[f64]) -> Result<bool> {
        match &self.inverse {
            Some(inv) => Ok(inv.iter().all(|row| dot(row, z) >= 0.0)),
            None => cone_feasible(self.dim, &self.gens, z, false),
        }
    }
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<f64> {
    (0..dim).map(|_| rng.sample(StandardNormal)).collect()
}

/// Fraction of standard Gaussian vectors of lin(C) that fall in C.
pub fn solid_angle_mc(cone: &Cone, samples: usize, rng: &mut SeededStream) -> Result<MCEstimate> {
    if samples == 0 {
        return Err(Error::domain("need at least one sample"));
    }
    let red = reduce(cone)?;
    if red.subspace_dim.is_some() {
        return Ok(MCEstimate::exact(1.0, samples));
    }
    // Restrict to the span of the generators inside the complement of L.
    let span = orthonormal_basis(&red.gens, 1e-10);
    let gens: Vec<Vec<f64>> = red.gens.iter().map(|g| coordinates(g, &span)).collect();
    let member = Membership::new(span.len(), gens);
    let dim = span.len();
    let acc = run_blocks(samples, BLOCK, rng, 1, |sub, count| {
        let mut a = Accumulator::default();
        for _ in 0..count {
            let z = gaussian(sub, dim);
            a.push(if member.contains(&z)? { 1.0 } else { 0.0 });
        }
        Ok(vec![a])
    })?;
    Ok(acc[0].estimate())
}

/// Tangent cone of the polytope spanned by `cfg` at the face spanned by
/// `face`: lineality along the face, generators towards the other points,
/// or the whole space when `face` does not span a face.
pub fn tangent_cone(cfg: &PointConfig, face: &[usize]) -> Result<Cone> {
    let (d, n) = (cfg.d(), cfg.n());
    check_face(face, d, n)?;
    let dirs = face_directions(cfg, face)?;
    let comp = complement_basis(&dirs, d);
    let base = cfg.point(face[0]);
    let mut gens = Vec::new();
    let mut gens_coords = Vec::new();
    for j in (0..n).filter(|j| !face.contains(j)) {
        let diff = sub(cfg.point(j), base);
        let c = coordinates(&diff, &comp);
        let mut w = vec![0.0; d];
        for (q, cq) in comp.iter().zip(&c) {
            for (wi, qi) in w.iter_mut().zip(q) {
                *wi += cq * qi;
            }
        }
        if norm(&c) <= 1e-10 * (1.0 + norm(&diff)) {
            return Err(Error::Degenerate(format!(
                "point {j} lies in the affine hull of the face"
            )));
        }
        gens.push(w);
        gens_coords.push(c);
    }
    if fills_space(&gens_coords, comp.len())? {
        return Ok(Cone::full(d));
    }
    let lineality = face[1..].iter().map(|&i| sub(cfg.point(i), base)).collect();
    Cone::new(d, gens, lineality)
}

fn check_face(face: &[usize], d: usize, n: usize) -> Result<()> {
    let k = face.len();
    if k == 0 || k > d {
        return Err(Error::domain(format!(
            "face must have between 1 and d={d} points, got {k}"
        )));
    }
    let mut s = face.to_vec();
    s.sort_unstable();
    s.dedup();
    if s.len() != k || s.iter().any(|&i| i >= n) {
        return Err(Error::domain(format!(
            "invalid face indices {face:?} for n={n}"
        )));
    }
    Ok(())
}

/// Whether the positive hull of `gens` is all of R^dim.
fn fills_space(gens: &[Vec<f64>], dim: usize) -> Result<bool> {
    for i in 0..dim {
        for sign in [1.0, -1.0] {
            let mut e = vec![0.0; dim];
            e[i] = sign;
            if !cone_feasible(dim, gens, &e, false)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// External angle of the polytope spanned by `cfg` at the face `face`:
/// the probability that a standard Gaussian vector orthogonal to the face
/// makes a non-acute angle with every edge direction leaving the face.
/// It is zero when `face` does not span a face.
pub fn external_angle_mc(
    cfg: &PointConfig,
    face: &[usize],
    samples: usize,
    rng: &mut SeededStream,
) -> Result<MCEstimate> {
    let (d, n) = (cfg.d(), cfg.n());
    check_face(face, d, n)?;
    if samples == 0 {
        return Err(Error::domain("need at least one sample"));
    }
    let dirs = face_directions(cfg, face)?;
    let comp = complement_basis(&dirs, d);
    let base = cfg.point(face[0]);
    let w: Vec<Vec<f64>> = (0..n)
        .filter(|j| !face.contains(j))
        .map(|j| coordinates(&sub(cfg.point(j), base), &comp))
        .collect();
    if comp.len() == 1 {
        // The normal cone is a ray or {0}; its angle is ½ or 0 exactly.
        let all_pos = w.iter().all(|v| v[0] > 0.0);
        let all_neg = w.iter().all(|v| v[0] < 0.0);
        return Ok(MCEstimate::exact(
            if all_pos || all_neg { 0.5 } else { 0.0 },
            samples,
        ));
    }
    let dim = comp.len();
    let acc = run_blocks(samples, BLOCK, rng, 1, |sub, count| {
        let mut a = Accumulator::default();
        for _ in 0..count {
            let z = gaussian(sub, dim);
            a.push(if w.iter().all(|v| dot(v, &z) <= 0.0) {
                1.0
            } else {
                0.0
            });
        }
        Ok(vec![a])
    })?;
    Ok(acc[0].estimate())
}

/// Per-index Monte Carlo estimates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CIVProfile {
    pub values: Vec<MCEstimate>,
}

impl CIVProfile {
    pub fn means(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.mean).collect()
    }
}

/// Per-sample indicators m[k'] that a uniform subspace of codimension
/// k'−1 in the complement of the lineality space meets C' nontrivially;
/// m[0] = m[1] = 1 and the events are nested, so the scan stops at the
/// first miss.
fn meets_profile<R: Rng + ?Sized>(red: &Reduced, rng: &mut R) -> Result<Vec<f64>> {
    let q = red.rest_dim;
    let mut m = vec![0.0; q + 3];
    m[0] = 1.0;
    m[1] = 1.0;
    if q >= 2 {
        let frame = sample_uniform_subspace(q, q - 1, rng)?;
        for kp in 2..=q {
            let rows = &frame[..kp - 1];
            let cols: Vec<Vec<f64>> = red.gens.iter().map(|g| coordinates(g, rows)).collect();
            if cone_feasible(kp - 1, &cols, &vec![0.0; kp - 1], true)? {
                m[kp] = 1.0;
            } else {
                break;
            }
        }
    }
    Ok(m)
}

/// Grassmann angles h_0, …, h_q of a cone that is not a linear subspace.
pub fn grassmann_angles_mc(
    cone: &Cone,
    samples: usize,
    rng: &mut SeededStream,
) -> Result<CIVProfile> {
    let red = reduce(cone)?;
    if red.subspace_dim.is_some() {
        return Err(Error::domain(
            "Grassmann angles are defined here only for cones that are not subspaces",
        ));
    }
    if samples == 0 {
        return Err(Error::domain("need at least one sample"));
    }
    let q = cone.ambient_dim;
    let (r, qp) = (red.lineality_dim, red.rest_dim);
    let acc = run_blocks(samples, BLOCK, rng, qp + 1, |sub, count| {
        let mut a = vec![Accumulator::default(); qp + 1];
        for _ in 0..count {
            let m = meets_profile(&red, sub)?;
            for (kp, acc) in a.iter_mut().enumerate() {
                acc.push(0.5 * m[kp]);
            }
        }
        Ok(a)
    })?;
    let values = (0..=q)
        .map(|k| {
            if k <= r {
                MCEstimate::exact(0.5, samples)
            } else {
                acc[k - r].estimate()
            }
        })
        .collect();
    Ok(CIVProfile { values })
}

/// Conic intrinsic volumes υ_0, …, υ_q by differencing the Grassmann
/// angles (conic Crofton formula); linear subspaces get their exact profile.
pub fn conic_intrinsic_volumes_mc(
    cone: &Cone,
    samples: usize,
    rng: &mut SeededStream,
) -> Result<CIVProfile> {
    if samples == 0 {
        return Err(Error::domain("need at least one sample"));
    }
    let q = cone.ambient_dim;
    let red = reduce(cone)?;
    if let Some(dim) = red.subspace_dim {
        let values = (0..=q)
            .map(|j| MCEstimate::exact(if j == dim { 1.0 } else { 0.0 }, samples))
            .collect();
        return Ok(CIVProfile { values });
    }
    let (r, qp) = (red.lineality_dim, red.rest_dim);
    let acc = run_blocks(samples, BLOCK, rng, qp + 1, |sub, count| {
        let mut a = vec![Accumulator::default(); qp + 1];
        for _ in 0..count {
            let m = meets_profile(&red, sub)?;
            for (jp, acc) in a.iter_mut().enumerate() {
                acc.push(0.5 * (m[jp] - m[jp + 2]));
            }
        }
        Ok(a)
    })?;
    let values = (0..=q)
        .map(|j| {
            if j < r {
                MCEstimate::exact(0.0, samples)
            } else {
                acc[j - r].estimate()
            }
        })
        .collect();
    Ok(CIVProfile { values })
}

/// Orthonormal basis of lin(C).
pub fn linear_hull(cone: &Cone) -> Vec<Vec<f64>> {
    let mut b = orthonormal_basis(&cone.lineality, 1e-10);
    extend_orthonormal(&mut b, &cone.generators, 1e-10);
    b
}
