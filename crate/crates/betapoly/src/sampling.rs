//! Exact samplers for the point laws, the Poisson process with power-law
//! intensity, and uniformly distributed linear subspaces.

use crate::error::{Error, Result};
use crate::hull::{face_lattice, HullComplex, PointConfig};
use crate::linalg::{dot, extend_orthonormal};
use crate::specfun::ln_sphere_area;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, Poisson, StandardNormal};
use serde::{Deserialize, Serialize};

/// Reproducible random stream identified by a seed and a stream index.
///
/// Streams with the same seed and different indices are independent
/// ChaCha8 streams; the same pair always yields the same draws.
#[derive(Debug, Clone)]
pub struct SeededStream {
    seed: u64,
    stream_id: u64,
    rng: ChaCha8Rng,
}

impl SeededStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        SeededStream {
            seed,
            stream_id,
            rng,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Draws a fresh seed from this stream for a family of sub-streams.
    pub fn fork_seed(&mut self) -> u64 {
        self.rng.next_u64()
    }
}

impl RngCore for SeededStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}

/// The point distributions that can be sampled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum PointLaw {
    Beta,
    BetaPrime,
    SphereUniform,
    Gaussian,
}

/// A point law together with its dimension and shape parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistParams {
    pub family: PointLaw,
    pub d: usize,
    pub beta: f64,
}

impl DistParams {
    pub fn new(family: PointLaw, d: usize, beta: f64) -> Result<Self> {
        let p = DistParams { family, d, beta };
        p.validate()?;
        Ok(p)
    }

    pub fn beta(d: usize, beta: f64) -> Result<Self> {
        Self::new(PointLaw::Beta, d, beta)
    }

    pub fn beta_prime(d: usize, beta: f64) -> Result<Self> {
        Self::new(PointLaw::BetaPrime, d, beta)
    }

    pub fn sphere(d: usize) -> Result<Self> {
        Self::new(PointLaw::SphereUniform, d, -1.0)
    }

    pub fn gaussian(d: usize) -> Result<Self> {
        Self::new(PointLaw::Gaussian, d, f64::NAN)
    }

    pub fn validate(&self) -> Result<()> {
        if self.d == 0 {
            return Err(Error::domain("dimension must be positive"));
        }
        match self.family {
            PointLaw::Beta if !(self.beta >= -1.0) || !self.beta.is_finite() => Err(Error::domain(
                format!("beta law needs beta >= -1, got {}", self.beta),
            )),
            PointLaw::BetaPrime if !(self.beta > self.d as f64 / 2.0) || !self.beta.is_finite() => {
                Err(Error::domain(format!(
                    "beta-prime law needs beta > d/2, got {}",
                    self.beta
                )))
            }
            _ => Ok(()),
        }
    }

    /// True for the uniform law on the sphere, including the beta law at β = −1.
    pub fn on_sphere(&self) -> bool {
        self.family == PointLaw::SphereUniform
            || (self.family == PointLaw::Beta && self.beta == -1.0)
    }
}

#[derive(Debug, Clone)]
enum Radius {
    Unit,
    BetaSquared(Gamma<f64>, Gamma<f64>),
    BetaPrimeSquared(Gamma<f64>, Gamma<f64>),
    Gaussian,
}

/// Pre-built sampler for one point law.
#[derive(Debug, Clone)]
pub struct PointSampler {
    d: usize,
    radius: Radius,
}

impl PointSampler {
    pub fn new(params: &DistParams) -> Result<Self> {
        params.validate()?;
        let half_d = params.d as f64 / 2.0;
        let gamma = |shape: f64| {
            Gamma::new(shape, 1.0).map_err(|e| Error::domain(format!("gamma shape {shape}: {e}")))
        };
        let radius = if params.on_sphere() {
            Radius::Unit
        } else {
            match params.family {
                PointLaw::Beta => Radius::BetaSquared(gamma(half_d)?, gamma(params.beta + 1.0)?),
                PointLaw::BetaPrime => {
                    Radius::BetaPrimeSquared(gamma(half_d)?, gamma(params.beta - half_d)?)
                }
                PointLaw::Gaussian => Radius::Gaussian,
                PointLaw::SphereUniform => Radius::Unit,
            }
        };
        Ok(PointSampler {
            d: params.d,
            radius,
        })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Writes one draw into `out` (length d).
    pub fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        for x in out.iter_mut() {
            *x = rng.sample(StandardNormal);
        }
        let r = match &self.radius {
            Radius::Gaussian => return,
            Radius::Unit => 1.0,
            Radius::BetaSquared(g1, g2) => {
                let a = g1.sample(rng);
                let b = g2.sample(rng);
                (a / (a + b)).sqrt()
            }
            Radius::BetaPrimeSquared(g1, g2) => {
                let a = g1.sample(rng);
                let b = g2.sample(rng);
                (a / b).sqrt()
            }
        };
        let len = dot(out, out).sqrt();
        for x in out.iter_mut() {
            *x *= r / len;
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let mut v = vec![0.0; self.d];
        self.sample_into(rng, &mut v);
        v
    }
}

/// One draw from the law described by `params`.
pub fn sample_point(params: &DistParams, rng: &mut SeededStream) -> Result<Vec<f64>> {
    Ok(PointSampler::new(params)?.sample(rng))
}

pub const MAX_DEGENERATE_RETRIES: usize = 10;

/// `n` i.i.d. points with a general-position certificate, resampling the
/// whole configuration when the certificate fails.
pub fn sample_config_with<R: Rng + ?Sized>(
    sampler: &PointSampler,
    n: usize,
    rng: &mut R,
) -> Result<PointConfig> {
    let d = sampler.d();
    for _ in 0..=MAX_DEGENERATE_RETRIES {
        let mut coords = vec![0.0; n * d];
        for chunk in coords.chunks_mut(d) {
            sampler.sample_into(rng, chunk);
        }
        let cfg = PointConfig::from_flat(d, coords);
        if cfg.general_position() {
            return Ok(cfg);
        }
    }
    Err(Error::numerical(
        format!("more than {MAX_DEGENERATE_RETRIES} consecutive degenerate configurations"),
        None,
    ))
}

/// `n` i.i.d. points from `params` in general position.
pub fn sample_config(params: &DistParams, n: usize, rng: &mut SeededStream) -> Result<PointConfig> {
    if n < params.d + 1 {
        return Err(Error::domain(format!(
            "need n >= d+1 points; got n={n}, d={}",
            params.d
        )));
    }
    sample_config_with(&PointSampler::new(params)?, n, rng)
}

/// Uniform direction on the unit sphere in R^d.
fn unit_vector<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        let len = dot(&v, &v).sqrt();
        if len > 0.0 {
            return v.into_iter().map(|x| x / len).collect();
        }
    }
}

/// Orthonormal basis of a uniformly distributed `dim`-dimensional subspace of R^ambient.
pub fn sample_uniform_subspace<R: Rng + ?Sized>(
    ambient: usize,
    dim: usize,
    rng: &mut R,
) -> Result<Vec<Vec<f64>>> {
    if ambient == 0 || dim == 0 || dim > ambient {
        return Err(Error::domain(format!(
            "need 1 <= dim <= ambient; got dim={dim}, ambient={ambient}"
        )));
    }
    let mut basis = Vec::with_capacity(dim);
    while basis.len() < dim {
        let g: Vec<f64> = (0..ambient).map(|_| rng.sample(StandardNormal)).collect();
        extend_orthonormal(&mut basis, &[g], 1e-6);
    }
    Ok(basis)
}

/// A realization of the power-law Poisson process outside a ball of
/// radius `epsilon`, together with the hull of its points.
#[derive(Debug, Clone, Serialize)]
pub struct PoissonSample {
    pub d: usize,
    pub points: Vec<Vec<f64>>,
    pub epsilon: f64,
    pub stable: bool,
    /// Indices into `points` of the hull vertices.
    pub hull_vertices: Vec<usize>,
    /// Face lattice of the hull, indexed by position in `hull_vertices`.
    pub hull: HullComplex,
}

pub const POISSON_EPS0: f64 = 1.0;
pub const POISSON_MAX_HALVINGS: usize = 20;
const POISSON_MAX_POINTS: f64 = 2.0e7;

struct CandidateHull {
    d: usize,
    members: Vec<usize>,
    hull: Option<HullComplex>,
}

impl CandidateHull {
    fn strictly_inside(&self, x: &[f64]) -> bool {
        match &self.hull {
            None => false,
            Some(h) => h
                .planes
                .iter()
                .all(|p| p.signed_distance(x) < -1e-9 * (1.0 + p.offset.abs())),
        }
    }

    fn add(&mut self, idx: usize, points: &[Vec<f64>]) -> Result<()> {
        self.members.push(idx);
        if self.members.len() < self.d + 1 {
            return Ok(());
        }
        let pts: Vec<Vec<f64>> = self.members.iter().map(|&i| points[i].clone()).collect();
        let cfg = PointConfig::new(self.d, &pts)?;
        let h = face_lattice(&cfg)?;
        let keep: Vec<usize> = h.faces_by_dim[0]
            .iter()
            .map(|v| self.members[v[0]])
            .collect();
        if keep.len() != self.members.len() {
            self.members = keep;
            let pts: Vec<Vec<f64>> = self.members.iter().map(|&i| points[i].clone()).collect();
            self.hull = Some(face_lattice(&PointConfig::new(self.d, &pts)?)?);
        } else {
            self.hull = Some(h);
        }
        Ok(())
    }

    fn min_distance(&self) -> f64 {
        self.hull
            .as_ref()
            .map_or(f64::NEG_INFINITY, |h| h.min_facet_distance())
    }
}

/// Simulates the Poisson process with intensity ‖x‖^{−d−α} outside a ball
/// whose radius is halved until every hull facet is farther from the
/// origin than the radius, so that the omitted points cannot change the hull.
pub fn sample_poisson_hull_points<R: Rng + ?Sized>(
    d: usize,
    alpha: f64,
    rng: &mut R,
) -> Result<PoissonSample> {
    if d < 2 || !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::domain(format!(
            "Poisson hull needs d >= 2 and alpha > 0; got d={d}, alpha={alpha}"
        )));
    }
    let mass = (ln_sphere_area(d) - alpha.ln()).exp();
    let mut eps = POISSON_EPS0;
    let mut points: Vec<Vec<f64>> = Vec::new();
    let mut cand = CandidateHull {
        d,
        members: Vec::new(),
        hull: None,
    };
    let mut inner_level = 0.0; // ε^{−α} of the region already simulated
    for halving in 0..=POISSON_MAX_HALVINGS {
        let outer_level = eps.powf(-alpha);
        let mean = mass * (outer_level - inner_level);
        if points.len() as f64 + mean > POISSON_MAX_POINTS {
            return Err(Error::numerical(
                format!("Poisson hull needs more than {POISSON_MAX_POINTS:e} points"),
                None,
            ));
        }
        let count = if mean > 0.0 {
            Poisson::new(mean)
                .map_err(|e| Error::numerical(e.to_string(), None))?
                .sample(rng) as usize
        } else {
            0
        };
        let mut fresh: Vec<(f64, Vec<f64>)> = (0..count)
            .map(|_| {
                let u: f64 = rng.random();
                let level = inner_level + u * (outer_level - inner_level);
                let r = level.powf(-1.0 / alpha);
                let dir = unit_vector(rng, d);
                (r, dir.into_iter().map(|x| x * r).collect())
            })
            .collect();
        // Far points first so the candidate hull grows quickly.
        fresh.sort_by(|a, b| b.0.total_cmp(&a.0));
        for (_, p) in fresh {
            let idx = points.len();
            let inside = cand.strictly_inside(&p);
            points.push(p);
            if !inside {
                cand.add(idx, &points)?;
            }
        }
        inner_level = outer_level;
        if cand.min_distance() > eps {
            let hull = cand.hull.take().expect("stable hull exists");
            return Ok(PoissonSample {
                d,
                points,
                epsilon: eps,
                stable: true,
                hull_vertices: cand.members,
                hull,
            });
        }
        if halving < POISSON_MAX_HALVINGS {
            eps *= 0.5;
        }
    }
    Err(Error::numerical(
        format!("Poisson hull not stable after {POISSON_MAX_HALVINGS} halvings"),
        None,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let mut a = SeededStream::new(7, 1);
        let mut b = SeededStream::new(7, 1);
        let mut c = SeededStream::new(7, 2);
        let xa: Vec<u64> = (0..4).map(|_| a.next_u64()).collect();
        let xb: Vec<u64> = (0..4).map(|_| b.next_u64()).collect();
        let xc: Vec<u64> = (0..4).map(|_| c.next_u64()).collect();
        assert_eq!(xa, xb);
        assert_ne!(xa, xc);
    }

    #[test]
    fn sphere_points_have_unit_norm() {
        let mut rng = SeededStream::new(1, 0);
        let p = DistParams::sphere(3).unwrap();
        for _ in 0..100 {
            let x = sample_point(&p, &mut rng).unwrap();
            assert!((dot(&x, &x).sqrt() - 1.0).abs() < 1e-14);
        }
        let q = DistParams::beta(4, -1.0).unwrap();
        assert!(q.on_sphere());
    }

    #[test]
    fn invalid_params() {
        assert!(DistParams::beta(2, -1.5).is_err());
        assert!(DistParams::beta_prime(2, 1.0).is_err());
        assert!(DistParams::beta(0, 1.0).is_err());
    }

    #[test]
    fn configs_are_in_general_position() {
        let mut rng = SeededStream::new(3, 0);
        let p = DistParams::beta(2, 0.0).unwrap();
        let c = sample_config(&p, 3, &mut rng).unwrap();
        assert!(c.general_position());
        assert!((0..3).all(|i| dot(c.point(i), c.point(i)) < 1.0));
        assert!(sample_config(&p, 2, &mut rng).is_err());
    }

    #[test]
    fn subspace_is_orthonormal() {
        let mut rng = SeededStream::new(5, 0);
        let b = sample_uniform_subspace(5, 2, &mut rng).unwrap();
        assert!((dot(&b[0], &b[1])).abs() < 1e-12);
        assert!((dot(&b[0], &b[0]) - 1.0).abs() < 1e-12);
        assert!(sample_uniform_subspace(2, 3, &mut rng).is_err());
    }

    #[test]
    fn poisson_sample_is_stable() {
        let mut rng = SeededStream::new(11, 0);
        let s = sample_poisson_hull_points(2, 1.0, &mut rng).unwrap();
        assert!(s.stable);
        assert!(s.points.iter().all(|p| dot(p, p).sqrt() > s.epsilon));
        assert!(s.hull.min_facet_distance() > s.epsilon);
        assert_eq!(s.hull.fvector[0], s.hull_vertices.len());
    }
}
