//! Simulation pipelines: two-stage estimates of the expected internal
//! angles J and J̃, and direct simulations of f-vectors, external angles,
//! tangent-cone intrinsic volumes, Poisson hulls and distance laws.
//!
//! Every pipeline splits its outer repetitions into fixed blocks with
//! their own sub-streams, so results depend on the seed only.

use crate::cones::{
    conic_intrinsic_volumes_mc, external_angle_mc, run_blocks, solid_angle_mc, tangent_cone,
    Accumulator, Cone, MCEstimate,
};
use crate::error::{Error, Result};
use crate::hull::face_lattice;
use crate::linalg::{dot, orthonormal_basis, project_out, sub};
use crate::sampling::{
    sample_config_with, sample_poisson_hull_points, DistParams, PointSampler, SeededStream,
};
use crate::specfun::{binomial, regularized_incomplete_beta};
use crate::Family;
use serde::{Deserialize, Serialize};

/// Outer repetitions per parallel block.
const REP_BLOCK: usize = 64;

pub const DEFAULT_OUTER_REPS: usize = 10_000;
pub const DEFAULT_INNER_SAMPLES: usize = 1_000;

/// A two-stage estimate of J_{m,ℓ}(α) or J̃_{m,ℓ}(α).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JEstimate {
    pub m: usize,
    pub ell: usize,
    pub alpha: f64,
    pub family: Family,
    pub estimate: MCEstimate,
}

/// Values of J known for every admissible α: the whole simplex has angle 1,
/// a facet has angle ½, and triangle angles sum to π.
pub fn exact_j(m: usize, ell: usize) -> Option<f64> {
    match (m, ell) {
        _ if ell == m => Some(1.0),
        _ if ell + 1 == m => Some(0.5),
        (3, 1) => Some(1.0 / 6.0),
        _ => None,
    }
}

/// Point law of the vertices in the simplex whose angles define J.
pub fn j_point_law(family: Family, m: usize, alpha: f64) -> Result<DistParams> {
    if m < 2 {
        return Err(Error::domain(format!("J needs m >= 2, got {m}")));
    }
    match family {
        Family::Beta => DistParams::beta(m - 1, alpha),
        Family::BetaPrime => DistParams::beta_prime(m - 1, alpha),
    }
}

fn check_j_args(m: usize, ell: usize) -> Result<()> {
    if m < 2 || ell == 0 || ell > m {
        return Err(Error::domain(format!(
            "J needs 2 <= m and 1 <= ell <= m, got m={m}, ell={ell}"
        )));
    }
    Ok(())
}

/// Estimates J with the exact values substituted where they are known.
pub fn estimate_j(
    family: Family,
    m: usize,
    ell: usize,
    alpha: f64,
    outer_reps: usize,
    inner_samples: usize,
    rng: &mut SeededStream,
) -> Result<JEstimate> {
    estimate_j_with(family, m, ell, alpha, outer_reps, inner_samples, true, rng)
}

/// Two-stage estimate of the expected internal angle at the face spanned by
/// the first `ell` of `m` random points in R^{m−1}. With `use_exact` off,
/// every value is simulated.
#[allow(clippy::too_many_arguments)]
pub fn estimate_j_with(
    family: Family,
    m: usize,
    ell: usize,
    alpha: f64,
    outer_reps: usize,
    inner_samples: usize,
    use_exact: bool,
    rng: &mut SeededStream,
) -> Result<JEstimate> {
    check_j_args(m, ell)?;
    let params = j_point_law(family, m, alpha)?;
    let wrap = |estimate| JEstimate {
        m,
        ell,
        alpha,
        family,
        estimate,
    };
    if use_exact {
        if let Some(v) = exact_j(m, ell) {
            return Ok(wrap(MCEstimate::exact(v, outer_reps.max(1))));
        }
    }
    if outer_reps < 2 || inner_samples == 0 {
        return Err(Error::domain(
            "J estimation needs at least 2 outer reps and 1 inner sample",
        ));
    }
    let sampler = PointSampler::new(&params)?;
    let face: Vec<usize> = (0..ell).collect();
    let acc = run_blocks(outer_reps, REP_BLOCK, rng, 1, |sub, count| {
        let mut a = Accumulator::default();
        for _ in 0..count {
            let cfg = sample_config_with(&sampler, m, sub)?;
            if ell == m {
                // The tangent cone at the simplex itself is its affine hull.
                a.push(1.0);
                continue;
            }
            let cone = tangent_cone(&cfg, &face)?;
            a.push(solid_angle_mc(&cone, inner_samples, sub)?.mean);
        }
        Ok(vec![a])
    })?;
    Ok(wrap(acc[0].estimate()))
}

fn sampler_for(params: &DistParams, n: usize) -> Result<PointSampler> {
    params.validate()?;
    if n < params.d + 1 {
        return Err(Error::domain(format!(
            "need n >= d+1 points, got n={n}, d={}",
            params.d
        )));
    }
    PointSampler::new(params)
}

/// Mean f-vector (f_0, …, f_{d−1}) of the hull of `n` random points. Every
/// hull is checked against the Euler and Dehn–Sommerville relations, and a
/// violation aborts the run with a consistency error.
pub fn simulate_expected_fvector(
    params: &DistParams,
    n: usize,
    reps: usize,
    rng: &mut SeededStream,
) -> Result<Vec<MCEstimate>> {
    let sampler = sampler_for(params, n)?;
    let d = params.d;
    let acc = run_blocks(reps, REP_BLOCK, rng, d, |sub, count| {
        let mut a = vec![Accumulator::default(); d];
        for _ in 0..count {
            let cfg = sample_config_with(&sampler, n, sub)?;
            let hull = face_lattice(&cfg)?;
            for (acc, &f) in a.iter_mut().zip(&hull.fvector) {
                acc.push(f as f64);
            }
        }
        Ok(a)
    })?;
    Ok(acc.iter().map(Accumulator::estimate).collect())
}

fn check_k(k: usize, d: usize) -> Result<()> {
    if k == 0 || k > d {
        return Err(Error::domain(format!(
            "face size k must lie in [1, d={d}], got {k}"
        )));
    }
    Ok(())
}

/// Mean external angle at the face spanned by the first `k` points, counting
/// zero when they do not span a face.
pub fn simulate_expected_external_angle(
    params: &DistParams,
    n: usize,
    k: usize,
    reps: usize,
    inner_samples: usize,
    rng: &mut SeededStream,
) -> Result<MCEstimate> {
    let sampler = sampler_for(params, n)?;
    check_k(k, params.d)?;
    let face: Vec<usize> = (0..k).collect();
    let acc = run_blocks(reps, REP_BLOCK, rng, 1, |sub, count| {
        let mut a = Accumulator::default();
        for _ in 0..count {
            let cfg = sample_config_with(&sampler, n, sub)?;
            a.push(external_angle_mc(&cfg, &face, inner_samples, sub)?.mean);
        }
        Ok(vec![a])
    })?;
    Ok(acc[0].estimate())
}

/// Outcome of a tangent-cone simulation: the mean intrinsic-volume profile
/// υ_0..υ_d and the fraction of configurations where the first `k` points
/// did not span a face (their tangent cone is then R^d).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TangentCivSimulation {
    pub profile: Vec<MCEstimate>,
    pub not_face: MCEstimate,
    /// Per-configuration Σ_j (−1)^j υ_j − (−1)^d·1{not a face}; zero when
    /// Gauss–Bonnet holds for every proper tangent cone.
    pub gauss_bonnet_defect: MCEstimate,
    /// Per-configuration Σ_j υ_j − 1.
    pub sum_defect: MCEstimate,
}

/// Mean conic intrinsic volumes of the tangent cone at the face spanned by
/// the first `k` points.
pub fn simulate_tangent_civ_profile(
    params: &DistParams,
    n: usize,
    k: usize,
    reps: usize,
    inner_samples: usize,
    rng: &mut SeededStream,
) -> Result<TangentCivSimulation> {
    let sampler = sampler_for(params, n)?;
    let d = params.d;
    check_k(k, d)?;
    let face: Vec<usize> = (0..k).collect();
    let width = d + 4;
    let acc = run_blocks(reps, REP_BLOCK, rng, width, |sub, count| {
        let mut a = vec![Accumulator::default(); width];
        for _ in 0..count {
            let cfg = sample_config_with(&sampler, n, sub)?;
            let cone = tangent_cone(&cfg, &face)?;
            let not_face = cone == Cone::full(d);
            let profile = conic_intrinsic_volumes_mc(&cone, inner_samples, sub)?.means();
            let alternating: f64 = profile
                .iter()
                .enumerate()
                .map(|(j, v)| if j % 2 == 0 { *v } else { -v })
                .sum();
            let sign = if d.is_multiple_of(2) { 1.0 } else { -1.0 };
            let indicator = if not_face { 1.0 } else { 0.0 };
            for (acc, v) in a.iter_mut().zip(&profile) {
                acc.push(*v);
            }
            a[d + 1].push(indicator);
            a[d + 2].push(alternating - sign * indicator);
            a[d + 3].push(profile.iter().sum::<f64>() - 1.0);
        }
        Ok(a)
    })?;
    Ok(TangentCivSimulation {
        profile: acc[..=d].iter().map(Accumulator::estimate).collect(),
        not_face: acc[d + 1].estimate(),
        gauss_bonnet_defect: acc[d + 2].estimate(),
        sum_defect: acc[d + 3].estimate(),
    })
}

/// Mean j-th conic intrinsic volume of the tangent cone at the face spanned
/// by the first `k` points.
pub fn simulate_tangent_civ(
    params: &DistParams,
    n: usize,
    k: usize,
    j: usize,
    reps: usize,
    inner_samples: usize,
    rng: &mut SeededStream,
) -> Result<MCEstimate> {
    if j + 1 < k || j > params.d {
        return Err(Error::domain(format!(
            "need k-1 <= j <= d, got k={k}, j={j}, d={}",
            params.d
        )));
    }
    Ok(simulate_tangent_civ_profile(params, n, k, reps, inner_samples, rng)?.profile[j])
}

/// Probability that `k` given points out of `n` fail to span a
/// (k−1)-face, from the expected number of (k−1)-faces and exchangeability.
pub fn prob_not_face(expected_faces: f64, n: usize, k: usize) -> Result<f64> {
    if k == 0 || k > n {
        return Err(Error::domain(format!("need 1 <= k <= n, got k={k}, n={n}")));
    }
    let p = 1.0 - expected_faces / binomial(n, k);
    if !(-1e-9..=1.0 + 1e-9).contains(&p) || !p.is_finite() {
        return Err(Error::Consistency(format!(
            "expected face count {expected_faces} is incompatible with binom({n},{k})"
        )));
    }
    Ok(p.clamp(0.0, 1.0))
}

/// Mean f-vector of the hull of the power-law Poisson process, from
/// `reps` stable samples.
pub fn simulate_poisson_fvector(
    d: usize,
    alpha: f64,
    reps: usize,
    rng: &mut SeededStream,
) -> Result<Vec<MCEstimate>> {
    let acc = run_blocks(reps, REP_BLOCK, rng, d, |sub, count| {
        let mut a = vec![Accumulator::default(); d];
        for _ in 0..count {
            let s = sample_poisson_hull_points(d, alpha, sub)?;
            for (acc, &f) in a.iter_mut().zip(&s.hull.fvector) {
                acc.push(f as f64);
            }
        }
        Ok(a)
    })?;
    Ok(acc.iter().map(Accumulator::estimate).collect())
}

/// Kolmogorov–Smirnov distance between the empirical law of `samples` and
/// a continuous distribution function.
pub fn ks_statistic<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> f64 {
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter().enumerate().fold(0.0, |worst, (i, &x)| {
        let f = cdf(x);
        worst.max((i + 1) as f64 / n - f).max(f - i as f64 / n)
    })
}

/// Asymptotic 1% critical value of the KS statistic.
pub fn ks_critical_1pct(n: usize) -> f64 {
    1.628 / (n as f64).sqrt()
}

/// One-dimensional reference law for squared norms and distances.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "law", rename_all = "camelCase")]
pub enum ReferenceLaw {
    Beta { a: f64, b: f64 },
    BetaPrime { a: f64, b: f64 },
}

impl ReferenceLaw {
    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let r = match *self {
            ReferenceLaw::Beta { a, b } => regularized_incomplete_beta(x.min(1.0), a, b),
            ReferenceLaw::BetaPrime { a, b } => regularized_incomplete_beta(x / (1.0 + x), a, b),
        };
        r.unwrap_or(f64::NAN)
    }

    fn new(family: Family, a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && b > 0.0) {
            return Err(Error::domain(format!(
                "reference law needs positive shapes, got ({a}, {b})"
            )));
        }
        Ok(match family {
            Family::Beta => ReferenceLaw::Beta { a, b },
            Family::BetaPrime => ReferenceLaw::BetaPrime { a, b },
        })
    }
}

/// Law of ‖X‖² for one point of the given family in R^d.
pub fn squared_norm_law(family: Family, d: usize, beta: f64) -> Result<ReferenceLaw> {
    let a = d as f64 / 2.0;
    match family {
        Family::Beta => ReferenceLaw::new(family, a, beta + 1.0),
        Family::BetaPrime => ReferenceLaw::new(family, a, beta - a),
    }
}

/// Law of the squared norm of the first `k` coordinates of a point in R^d.
pub fn projection_law(family: Family, d: usize, k: usize, beta: f64) -> Result<ReferenceLaw> {
    if k == 0 || k > d {
        return Err(Error::domain(format!(
            "projection dimension must lie in [1, {d}], got {k}"
        )));
    }
    let shift = (d - k) as f64 / 2.0;
    match family {
        Family::Beta => squared_norm_law(family, k, beta + shift),
        Family::BetaPrime => squared_norm_law(family, k, beta - shift),
    }
}

/// Law of the squared distance from the origin to the affine hull of `k`
/// independent points in R^d.
pub fn distance_law(family: Family, d: usize, k: usize, beta: f64) -> Result<ReferenceLaw> {
    if k == 0 || k > d {
        return Err(Error::domain(format!("need 1 <= k <= d, got k={k}, d={d}")));
    }
    let (df, kf) = (d as f64, k as f64);
    let a = (df - kf + 1.0) / 2.0;
    match family {
        Family::Beta => {
            ReferenceLaw::new(family, a, (kf - 1.0) * (df + 1.0) / 2.0 + kf * beta + 1.0)
        }
        Family::BetaPrime => ReferenceLaw::new(family, a, kf * (beta - df / 2.0)),
    }
}

/// Squared distance from the origin to the affine hull of `points`.
pub fn squared_distance_to_affine_hull(points: &[Vec<f64>]) -> f64 {
    let base = &points[0];
    let dirs: Vec<Vec<f64>> = points[1..].iter().map(|p| sub(p, base)).collect();
    let basis = orthonormal_basis(&dirs, 1e-12);
    let mut r = base.clone();
    project_out(&mut r, &basis);
    dot(&r, &r)
}

/// Result of a Kolmogorov–Smirnov test against a reference law.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KsReport {
    pub law: ReferenceLaw,
    pub statistic: f64,
    pub critical_1pct: f64,
    pub n_samples: usize,
    pub pass: bool,
}

fn family_params(family: Family, d: usize, beta: f64) -> Result<DistParams> {
    match family {
        Family::Beta => DistParams::beta(d, beta),
        Family::BetaPrime => DistParams::beta_prime(d, beta),
    }
}

fn draw_blocks<F>(reps: usize, rng: &mut SeededStream, draw: F) -> Vec<f64>
where
    F: Fn(&mut SeededStream) -> f64 + Sync,
{
    use rayon::prelude::*;
    let seed = rng.fork_seed();
    let blocks = reps.div_ceil(4096);
    let parts: Vec<Vec<f64>> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut sub = SeededStream::new(seed, b as u64);
            (0..4096.min(reps - b * 4096))
                .map(|_| draw(&mut sub))
                .collect()
        })
        .collect();
    parts.concat()
}

/// KS test of the squared distance from the origin to the affine hull of
/// `k` random points against its closed-form law.
pub fn simulate_distance_law(
    family: Family,
    d: usize,
    k: usize,
    beta: f64,
    reps: usize,
    rng: &mut SeededStream,
) -> Result<KsReport> {
    let law = distance_law(family, d, k, beta)?;
    let sampler = PointSampler::new(&family_params(family, d, beta)?)?;
    let xs = draw_blocks(reps, rng, |sub| {
        let pts: Vec<Vec<f64>> = (0..k).map(|_| sampler.sample(sub)).collect();
        squared_distance_to_affine_hull(&pts)
    });
    Ok(ks_report(law, &xs))
}

/// KS test of the squared norm of the first `k` coordinates of a random
/// point against its closed-form law (`k = d` tests the norm itself).
pub fn simulate_projection_law(
    family: Family,
    d: usize,
    k: usize,
    beta: f64,
    reps: usize,
    rng: &mut SeededStream,
) -> Result<KsReport> {
    let law = projection_law(family, d, k, beta)?;
    let sampler = PointSampler::new(&family_params(family, d, beta)?)?;
    let xs = draw_blocks(reps, rng, |sub| {
        let x = sampler.sample(sub);
        x[..k].iter().map(|v| v * v).sum()
    });
    Ok(ks_report(law, &xs))
}

fn ks_report(law: ReferenceLaw, xs: &[f64]) -> KsReport {
    let statistic = ks_statistic(xs, |x| law.cdf(x));
    let critical_1pct = ks_critical_1pct(xs.len());
    KsReport {
        law,
        statistic,
        critical_1pct,
        n_samples: xs.len(),
        pass: statistic <= critical_1pct,
    }
}

/// Coordinate mean and variance of √(2β)·X over `reps` draws, for the
/// normal-limit check at large β.
pub fn gaussian_limit_moments(
    family: Family,
    d: usize,
    beta: f64,
    reps: usize,
    rng: &mut SeededStream,
) -> Result<Vec<MCEstimate>> {
    let sampler = PointSampler::new(&family_params(family, d, beta)?)?;
    let scale = (2.0 * beta).sqrt();
    let xs = draw_blocks(reps, rng, |sub| sampler.sample(sub)[0] * scale);
    let mut mean = Accumulator::default();
    let mut var = Accumulator::default();
    xs.iter().for_each(|&x| mean.push(x));
    xs.iter().for_each(|&x| var.push(x * x));
    Ok(vec![mean.estimate(), var.estimate()])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ks_edge_cases() {
        assert_eq!(ks_statistic(&[0.5], |x| x), 0.5);
        assert!(ks_statistic(&[0.3; 50], |x| x) >= 0.5);
    }

    #[test]
    fn exact_j_table() {
        assert_eq!(exact_j(5, 5), Some(1.0));
        assert_eq!(exact_j(4, 3), Some(0.5));
        assert_eq!(exact_j(3, 1), Some(1.0 / 6.0));
        assert_eq!(exact_j(4, 1), None);
    }

    #[test]
    fn not_face_probability() {
        assert_eq!(prob_not_face(3.0, 3, 2).unwrap(), 0.0);
        assert!(prob_not_face(5.0, 3, 2).is_err());
    }

    #[test]
    fn distance_to_line() {
        let d2 = squared_distance_to_affine_hull(&[vec![1.0, 1.0], vec![-1.0, 1.0]]);
        assert!((d2 - 1.0).abs() < 1e-14);
    }

    #[test]
    fn simplex_fvector_is_exact() {
        let mut rng = SeededStream::new(5, 0);
        let f =
            simulate_expected_fvector(&DistParams::beta(3, 0.0).unwrap(), 4, 50, &mut rng).unwrap();
        let got: Vec<f64> = f.iter().map(|e| e.mean).collect();
        assert_eq!(got, vec![4.0, 6.0, 4.0]);
        assert!(f.iter().all(|e| e.std_error == 0.0));
    }

    #[test]
    fn j_raw_triangle_angle() {
        let mut rng = SeededStream::new(6, 0);
        let j = estimate_j_with(Family::Beta, 3, 1, 0.5, 400, 400, false, &mut rng).unwrap();
        assert!((j.estimate.mean - 1.0 / 6.0).abs() < 4.0 * j.estimate.std_error);
    }
}
