//! Closed-form expectations for beta and beta′ polytopes, Poisson hulls,
//! Poisson zero cells and half-sphere hulls, and their asymptotic constants.
//!
//! The f-vector and tangent-cone formulas need the expected internal angles
//! J_{m,ℓ}, which are only known in closed form for a few index pairs. They
//! are supplied through [`JProvider`].

use crate::cones::MCEstimate;
use crate::error::{Error, Result};
use crate::montecarlo::{estimate_j, exact_j, prob_not_face};
use crate::quadrature::{compute_i, compute_i_tilde};
use crate::sampling::SeededStream;
use crate::specfun::{binomial, ln_gamma_unchecked, ln_norm_const, log_gamma};
use crate::Family;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::sync::RwLock;

/// One summand of a formula.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Term {
    /// Summation index: s for the beta/beta′ sums, m for Poisson sums.
    pub index: usize,
    pub value: f64,
    pub sigma: f64,
}

/// A formula evaluation with the uncertainty inherited from Monte Carlo
/// estimates of J (zero when every input is closed-form).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FormulaValue {
    pub value: f64,
    pub sigma: f64,
    pub terms: Vec<Term>,
}

impl FormulaValue {
    pub fn exact(value: f64) -> Self {
        FormulaValue {
            value,
            sigma: 0.0,
            terms: Vec::new(),
        }
    }

    fn from_terms(terms: Vec<Term>) -> Self {
        let value = terms.iter().map(|t| t.value).sum();
        // Each term is linear in its J input, so errors add linearly.
        let sigma = terms.iter().map(|t| t.sigma).sum();
        FormulaValue {
            value,
            sigma,
            terms,
        }
    }
}

/// A value of J with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JValue {
    pub mean: f64,
    pub sigma: f64,
    pub n_samples: usize,
}

impl From<MCEstimate> for JValue {
    fn from(e: MCEstimate) -> Self {
        JValue {
            mean: e.mean,
            sigma: e.std_error,
            n_samples: e.n_samples,
        }
    }
}

/// Source of J_{m,ℓ}(α) (family beta) and J̃_{m,ℓ}(α) (family beta′).
pub trait JProvider: Sync {
    fn j(&self, family: Family, m: usize, ell: usize, alpha: f64) -> Result<JValue>;
}

/// Only the closed-form values; fails for every other index pair.
#[derive(Debug, Clone, Copy, Default)]
pub struct ExactJ;

impl JProvider for ExactJ {
    fn j(&self, family: Family, m: usize, ell: usize, alpha: f64) -> Result<JValue> {
        exact_j(m, ell)
            .map(|mean| JValue {
                mean,
                sigma: 0.0,
                n_samples: 0,
            })
            .ok_or_else(|| {
                Error::domain(format!(
                    "{} has no closed form; use a Monte Carlo provider or a J cache",
                    j_key(family, m, ell, alpha)
                ))
            })
    }
}

/// Cache key of a J value, with α printed to 12 significant digits.
pub fn j_key(family: Family, m: usize, ell: usize, alpha: f64) -> String {
    format!("({},{m},{ell},{alpha:.11e})", family.label())
}

/// Monte Carlo settings for J values missing from a table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JSimulation {
    pub seed: u64,
    pub outer_reps: usize,
    pub inner_samples: usize,
}

/// Exact values, then cached entries, then (optionally) fresh two-stage
/// simulations which are added to the cache. Each simulated key draws from
/// its own stream, so values do not depend on lookup order.
#[derive(Debug, Default)]
pub struct JTable {
    entries: RwLock<BTreeMap<String, JValue>>,
    simulation: Option<JSimulation>,
    path: Option<PathBuf>,
}

impl JTable {
    pub fn new(simulation: Option<JSimulation>) -> Self {
        JTable {
            entries: RwLock::new(BTreeMap::new()),
            simulation,
            path: None,
        }
    }

    /// Loads a cache file; a missing file starts an empty table bound to
    /// that path.
    pub fn open(path: &Path, simulation: Option<JSimulation>) -> Result<Self> {
        let entries = match std::fs::read_to_string(path) {
            Ok(text) => serde_json::from_str::<BTreeMap<String, JValue>>(&text)
                .map_err(|e| Error::Parse(format!("J cache {}: {e}", path.display())))?,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => BTreeMap::new(),
            Err(e) => return Err(Error::Parse(format!("J cache {}: {e}", path.display()))),
        };
        for (k, v) in &entries {
            if !(v.mean.is_finite() && v.sigma >= 0.0 && (0.0..=1.0).contains(&v.mean)) {
                return Err(Error::Parse(format!("J cache entry {k} is out of range")));
            }
        }
        Ok(JTable {
            entries: RwLock::new(entries),
            simulation,
            path: Some(path.to_path_buf()),
        })
    }

    pub fn insert(&self, family: Family, m: usize, ell: usize, alpha: f64, value: JValue) {
        self.entries
            .write()
            .expect("J table lock")
            .insert(j_key(family, m, ell, alpha), value);
    }

    pub fn len(&self) -> usize {
        self.entries.read().expect("J table lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Writes the table back to the file it was opened from.
    pub fn save(&self) -> Result<()> {
        let Some(path) = &self.path else {
            return Ok(());
        };
        let text = serde_json::to_string_pretty(&*self.entries.read().expect("J table lock"))
            .map_err(|e| Error::Parse(e.to_string()))?;
        std::fs::write(path, text)
            .map_err(|e| Error::Parse(format!("J cache {}: {e}", path.display())))
    }
}

fn stream_id(key: &str) -> u64 {
    // FNV-1a keeps the stream stable across runs and platforms.
    key.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0100_0000_01b3)
    })
}

impl JProvider for JTable {
    fn j(&self, family: Family, m: usize, ell: usize, alpha: f64) -> Result<JValue> {
        if let Ok(v) = ExactJ.j(family, m, ell, alpha) {
            return Ok(v);
        }
        let key = j_key(family, m, ell, alpha);
        if let Some(v) = self.entries.read().expect("J table lock").get(&key) {
            return Ok(*v);
        }
        let Some(sim) = self.simulation else {
            return Err(Error::domain(format!(
                "{key} is not in the J cache and simulation is disabled"
            )));
        };
        let mut rng = SeededStream::new(sim.seed, stream_id(&key));
        let est = estimate_j(
            family,
            m,
            ell,
            alpha,
            sim.outer_reps,
            sim.inner_samples,
            &mut rng,
        )?;
        let v = JValue::from(est.estimate);
        self.entries.write().expect("J table lock").insert(key, v);
        Ok(v)
    }
}

fn shape_param(family: Family, d: usize, beta: f64) -> Result<f64> {
    let df = d as f64;
    match family {
        Family::Beta if beta >= -1.0 && beta.is_finite() => Ok(2.0 * beta + df),
        Family::BetaPrime if beta > df / 2.0 && beta.is_finite() => Ok(2.0 * beta - df),
        Family::Beta => Err(Error::domain(format!(
            "beta polytopes need beta >= -1, got {beta}"
        ))),
        Family::BetaPrime => Err(Error::domain(format!(
            "beta-prime polytopes need beta > d/2, got {beta}"
        ))),
    }
}

/// I_{n,k}(α) for the beta family, Ĩ_{n,k}(α) for beta′. At k = n the
/// integrand is a probability density, so the value is 1.
pub fn i_value(family: Family, n: usize, k: usize, alpha: f64) -> Result<f64> {
    if k == n && n >= 1 {
        shape_check(family, alpha)?;
        return Ok(1.0);
    }
    match family {
        Family::Beta => Ok(compute_i(n, k, alpha)?.value),
        Family::BetaPrime => Ok(compute_i_tilde(n, k, alpha)?.value),
    }
}

fn shape_check(family: Family, alpha: f64) -> Result<()> {
    let ok = match family {
        Family::Beta => alpha >= 0.0 && alpha.is_finite(),
        Family::BetaPrime => alpha > 0.0 && alpha.is_finite(),
    };
    if ok {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "invalid shape parameter {alpha} for the {} family",
            family.label()
        )))
    }
}

fn check_polytope(d: usize, n: usize) -> Result<()> {
    if d == 0 || n < d + 1 {
        return Err(Error::domain(format!(
            "need d >= 1 and n >= d+1, got d={d}, n={n}"
        )));
    }
    Ok(())
}

/// Expected number of k-faces of the hull of n i.i.d. beta or beta′ points
/// in R^d.
pub fn expected_fvector(
    family: Family,
    d: usize,
    n: usize,
    beta: f64,
    k: usize,
    j: &dyn JProvider,
) -> Result<FormulaValue> {
    check_polytope(d, n)?;
    if k >= d {
        return Err(Error::domain(format!(
            "face dimension k must be below d={d}, got {k}"
        )));
    }
    let alpha = shape_param(family, d, beta)?;
    let mut terms = Vec::new();
    let mut s = 0;
    while 2 * s + k < d {
        let m = d - 2 * s;
        let j_alpha = match family {
            Family::Beta => beta + s as f64 + 0.5,
            Family::BetaPrime => beta - s as f64 - 0.5,
        };
        let jv = j.j(family, m, k + 1, j_alpha)?;
        let coef = 2.0 * binomial(n, m) * binomial(m, k + 1) * i_value(family, n, m, alpha)?;
        terms.push(Term {
            index: s,
            value: coef * jv.mean,
            sigma: coef * jv.sigma,
        });
        s += 1;
    }
    Ok(FormulaValue::from_terms(terms))
}

/// Expected external angle at the face spanned by k of the n points (zero
/// when they do not span a face).
pub fn expected_external_angle(
    family: Family,
    d: usize,
    n: usize,
    k: usize,
    beta: f64,
) -> Result<FormulaValue> {
    check_polytope(d, n)?;
    if k == 0 || k > d {
        return Err(Error::domain(format!(
            "face size k must lie in [1, {d}], got {k}"
        )));
    }
    let alpha = shape_param(family, d, beta)?;
    Ok(FormulaValue::exact(i_value(family, n, k, alpha)?))
}

/// Expected j-th conic intrinsic volume of the tangent cone at the face
/// spanned by k of the n points, the cone being R^d when they do not span a
/// face.
///
/// Below j = d each value is a single product of I and J. At j = d the
/// product form does not apply; when the points span a face the cone is not
/// a subspace, so its volumes of the parity of d sum to ½, which fixes υ_d
/// from the lower terms of that parity.
#[allow(clippy::too_many_arguments)]
pub fn expected_tangent_civ(
    family: Family,
    d: usize,
    n: usize,
    k: usize,
    jdx: usize,
    beta: f64,
    provider: &dyn JProvider,
) -> Result<FormulaValue> {
    check_polytope(d, n)?;
    if k == 0 || k > d || jdx + 1 < k || jdx > d {
        return Err(Error::domain(format!(
            "need 1 <= k <= d and k-1 <= j <= d, got k={k}, j={jdx}, d={d}"
        )));
    }
    let alpha = shape_param(family, d, beta)?;
    if jdx < d {
        return Ok(FormulaValue::from_terms(vec![civ_face_term(
            family, d, n, k, jdx, beta, alpha, provider,
        )?]));
    }
    let faces = expected_fvector(family, d, n, beta, k - 1, provider)?;
    let p = prob_not_face(faces.value, n, k)?;
    let mut terms = vec![Term {
        index: 0,
        value: 0.5 + 0.5 * p,
        sigma: 0.5 * faces.sigma / binomial(n, k),
    }];
    let mut j = d;
    while j > k {
        j -= 2;
        let t = civ_face_term(family, d, n, k, j, beta, alpha, provider)?;
        terms.push(Term {
            index: (d - j) / 2,
            value: -t.value,
            sigma: t.sigma,
        });
    }
    Ok(FormulaValue::from_terms(terms))
}

/// E[υ_j(T) · 1{face}] for j < d.
#[allow(clippy::too_many_arguments)]
fn civ_face_term(
    family: Family,
    d: usize,
    n: usize,
    k: usize,
    jdx: usize,
    beta: f64,
    alpha: f64,
    provider: &dyn JProvider,
) -> Result<Term> {
    let shift = (d - jdx) as f64 / 2.0;
    let j_alpha = match family {
        Family::Beta => beta + shift,
        Family::BetaPrime => beta - shift,
    };
    let jv = provider.j(family, jdx + 1, k, j_alpha)?;
    let coef = binomial(n - k, jdx + 1 - k) * i_value(family, n, jdx + 1, alpha)?;
    Ok(Term {
        index: 0,
        value: coef * jv.mean,
        sigma: coef * jv.sigma,
    })
}

fn check_poisson(d: usize, alpha: f64, k: usize) -> Result<()> {
    if d < 2 || !(alpha > 0.0) || !alpha.is_finite() || k >= d {
        return Err(Error::domain(format!(
            "Poisson formulas need d >= 2, alpha > 0 and k < d; got d={d}, alpha={alpha}, k={k}"
        )));
    }
    Ok(())
}

/// Logarithm of the Gamma-ratio prefactor of the m-th Poisson term,
/// Γ((mα+1)/2)Γ(α/2)^m / (Γ(mα/2)Γ((α+1)/2)^m) · (√π α)^{m−1} / m.
fn ln_poisson_weight(m: usize, alpha: f64) -> f64 {
    let mf = m as f64;
    ln_gamma_unchecked((mf * alpha + 1.0) / 2.0) + mf * ln_gamma_unchecked(alpha / 2.0)
        - ln_gamma_unchecked(mf * alpha / 2.0)
        - mf * ln_gamma_unchecked((alpha + 1.0) / 2.0)
        + (mf - 1.0) * (PI.sqrt() * alpha).ln()
        - mf.ln()
}

/// Expected number of k-faces of the convex hull of the Poisson process
/// with intensity ‖x‖^{−d−α}.
pub fn expected_fvector_poisson(
    d: usize,
    alpha: f64,
    k: usize,
    j: &dyn JProvider,
) -> Result<FormulaValue> {
    check_poisson(d, alpha, k)?;
    let mut terms = Vec::new();
    for m in (k + 1..=d).filter(|m| (d - m).is_multiple_of(2)) {
        let jv = j.j(Family::BetaPrime, m, k + 1, (m as f64 - 1.0 + alpha) / 2.0)?;
        let coef = 2.0 * ln_poisson_weight(m, alpha).exp() * binomial(m, k + 1);
        terms.push(Term {
            index: m,
            value: coef * jv.mean,
            sigma: coef * jv.sigma,
        });
    }
    Ok(FormulaValue::from_terms(terms))
}

/// Logarithm of E f_0 of the zero cell (the number of facets of the Poisson
/// hull), safe for large d and α.
pub fn ln_zero_cell_vertices(d: usize, alpha: f64) -> Result<f64> {
    check_poisson(d, alpha, 0)?;
    Ok(2f64.ln() + ln_poisson_weight(d, alpha))
}

/// Logarithm of E f_k(Z_α) for k ∈ {0, 1}, the cases with a closed form.
/// Past d ≈ 200 at α = d these overflow f64, so high-dimensional checks
/// compare logarithms.
pub fn ln_expected_fvector_zero_cell(d: usize, alpha: f64, k: usize) -> Result<f64> {
    check_poisson(d, alpha, k)?;
    match k {
        0 => ln_zero_cell_vertices(d, alpha),
        1 => Ok(ln_zero_cell_vertices(d, alpha)? + (d as f64 / 2.0).ln()),
        _ => Err(Error::domain(format!(
            "closed forms cover k = 0 and k = 1, got k={k}"
        ))),
    }
}

/// Expected number of k-faces of the zero cell of the Poisson hyperplane
/// tessellation with distance exponent α, via polarity with the Poisson hull.
pub fn expected_fvector_zero_cell(
    d: usize,
    alpha: f64,
    k: usize,
    j: &dyn JProvider,
) -> Result<FormulaValue> {
    check_poisson(d, alpha, k)?;
    if k <= 1 {
        return Ok(FormulaValue::exact(
            ln_expected_fvector_zero_cell(d, alpha, k)?.exp(),
        ));
    }
    if alpha == 1.0 && k + 2 == d {
        return Ok(FormulaValue::exact(0.5 * binomial(d + 1, 3) * PI * PI));
    }
    expected_fvector_poisson(d, alpha, d - k - 1, j)
}

/// Expected number of k-faces of the spherical hull of n uniform points on
/// the upper half-sphere S^d_+, through the beta′ polytope with β = (d+1)/2.
pub fn half_sphere_expected_fvector(
    d: usize,
    n: usize,
    k: usize,
    j: &dyn JProvider,
) -> Result<FormulaValue> {
    if d < 2 {
        return Err(Error::domain("half-sphere hulls need d >= 2"));
    }
    expected_fvector(Family::BetaPrime, d, n, (d as f64 + 1.0) / 2.0, k, j)
}

/// Limit of the half-sphere f-vector as n → ∞.
pub fn half_sphere_limit(d: usize, k: usize, j: &dyn JProvider) -> Result<FormulaValue> {
    expected_fvector_poisson(d, 1.0, k, j)
}

fn check_asymptotic(d: usize, k: usize, beta: f64) -> Result<()> {
    if d < 2 || k >= d || !(beta >= -1.0) || !beta.is_finite() {
        return Err(Error::domain(format!(
            "need d >= 2, k < d and beta >= -1; got d={d}, k={k}, beta={beta}"
        )));
    }
    Ok(())
}

/// Growth exponent (d−1)/(2β+d+1) of E f_k for beta polytopes.
pub fn fvector_growth_exponent(d: usize, beta: f64) -> f64 {
    (d as f64 - 1.0) / (2.0 * beta + d as f64 + 1.0)
}

/// lim n^{−(d−1)/(2β+d+1)} E f_k(P_{n,d}^β).
pub fn fvector_asymptotic_const(
    d: usize,
    k: usize,
    beta: f64,
    j: &dyn JProvider,
) -> Result<FormulaValue> {
    check_asymptotic(d, k, beta)?;
    let jv = j.j(Family::Beta, d, k + 1, beta + 0.5)?;
    let df = d as f64;
    let a = 2.0 * beta + df;
    let power = (a * df + 1.0) / (a + 1.0);
    let ln_c = 2f64.ln() - ln_gamma_unchecked(df + 1.0)
        + binomial(d, k + 1).ln()
        + ln_norm_const(Family::Beta, 1, (a * df - 1.0) / 2.0)?
        - (a + 1.0).ln()
        + power * ((a + 1.0).ln() - ln_norm_const(Family::Beta, 1, (a - 1.0) / 2.0)?)
        + log_gamma(power)?;
    let c = ln_c.exp();
    Ok(FormulaValue {
        value: c * jv.mean,
        sigma: c * jv.sigma,
        terms: vec![Term {
            index: 0,
            value: c * jv.mean,
            sigma: c * jv.sigma,
        }],
    })
}

/// lim (1/n) E f_k for uniform points on the sphere, in the simplified form
/// with Gamma functions of d.
pub fn fvector_asymptotic_const_sphere(
    d: usize,
    k: usize,
    j: &dyn JProvider,
) -> Result<FormulaValue> {
    check_asymptotic(d, k, -1.0)?;
    let jv = j.j(Family::Beta, d, k + 1, -0.5)?;
    let df = d as f64;
    let ln_c = df * 2f64.ln() + (df / 2.0 - 1.0) * PI.ln() - df.ln() - 2.0 * (df - 1.0).ln()
        + binomial(d, k + 1).ln()
        + ln_gamma_unchecked(1.0 + df * (df - 2.0) / 2.0)
        - ln_gamma_unchecked((df - 1.0).powi(2) / 2.0)
        + (df - 1.0) * (ln_gamma_unchecked((df + 1.0) / 2.0) - ln_gamma_unchecked(df / 2.0));
    let c = ln_c.exp();
    Ok(FormulaValue {
        value: c * jv.mean,
        sigma: c * jv.sigma,
        terms: vec![Term {
            index: 0,
            value: c * jv.mean,
            sigma: c * jv.sigma,
        }],
    })
}

fn ln_ball_const_without_j(d: usize, k: usize) -> f64 {
    let df = d as f64;
    let d2 = df * df;
    2f64.ln() + df * (df - 1.0) / (2.0 * (df + 1.0)) * PI.ln() - ln_gamma_unchecked(df + 2.0)
        + binomial(d, k + 1).ln()
        + ln_gamma_unchecked(1.0 + d2 / 2.0)
        + ln_gamma_unchecked((d2 + 1.0) / (df + 1.0))
        - ln_gamma_unchecked((d2 + 1.0) / 2.0)
        + (d2 + 1.0) / (df + 1.0)
            * ((df + 1.0).ln() + ln_gamma_unchecked((df + 1.0) / 2.0)
                - ln_gamma_unchecked(1.0 + df / 2.0))
}

/// lim n^{−(d−1)/(d+1)} E f_k for uniform points in the ball, in the
/// simplified form with Gamma functions of d.
pub fn fvector_asymptotic_const_ball(
    d: usize,
    k: usize,
    j: &dyn JProvider,
) -> Result<FormulaValue> {
    check_asymptotic(d, k, 0.0)?;
    let jv = j.j(Family::Beta, d, k + 1, 0.5)?;
    let c = ln_ball_const_without_j(d, k).exp();
    Ok(FormulaValue {
        value: c * jv.mean,
        sigma: c * jv.sigma,
        terms: vec![Term {
            index: 0,
            value: c * jv.mean,
            sigma: c * jv.sigma,
        }],
    })
}

/// Affine surface area 2π^{d/2}/Γ(d/2) of the unit ball.
pub fn ball_affine_surface_area(d: usize) -> f64 {
    (2f64.ln() + d as f64 / 2.0 * PI.ln() - ln_gamma_unchecked(d as f64 / 2.0)).exp()
}

/// Constant c_{d,k} with lim n^{−(d−1)/(d+1)} E f_k(K_n) = c_{d,k}·Ω(K) for
/// uniform points in a smooth convex body K with affine surface area Ω(K).
pub fn affine_surface_constant(d: usize, k: usize, j: &dyn JProvider) -> Result<FormulaValue> {
    check_asymptotic(d, k, 0.0)?;
    let jv = j.j(Family::Beta, d, k + 1, 0.5)?;
    let df = d as f64;
    let d2 = df * df;
    let ln_c = -df / (df + 1.0) * PI.ln() - ln_gamma_unchecked(df + 2.0)
        + binomial(d, k + 1).ln()
        + ln_gamma_unchecked(df / 2.0)
        + ln_gamma_unchecked(1.0 + d2 / 2.0)
        + ln_gamma_unchecked((d2 + 1.0) / (df + 1.0))
        - ln_gamma_unchecked((d2 + 1.0) / 2.0)
        + (d2 + 1.0) / (df + 1.0)
            * ((df + 1.0).ln() + ln_gamma_unchecked((df + 1.0) / 2.0)
                - ln_gamma_unchecked(1.0 + df / 2.0));
    let c = ln_c.exp();
    Ok(FormulaValue {
        value: c * jv.mean,
        sigma: c * jv.sigma,
        terms: vec![Term {
            index: 0,
            value: c * jv.mean,
            sigma: c * jv.sigma,
        }],
    })
}

fn check_highdim(d: usize, alpha: f64) -> Result<()> {
    if d < 2 || !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::domain(format!(
            "need d >= 2 and alpha > 0, got d={d}, alpha={alpha}"
        )));
    }
    Ok(())
}

/// Logarithm of the large-d equivalent of E f_k(Z_α).
pub fn ln_zero_cell_highdim_asymptotic(d: usize, k: usize, alpha: f64) -> Result<f64> {
    check_highdim(d, alpha)?;
    let (df, kf) = (d as f64, k as f64);
    Ok(0.5 * alpha.ln() - (kf - 0.5) * 2f64.ln()
        + df * (ln_gamma_unchecked(alpha / 2.0) - ln_gamma_unchecked((alpha + 1.0) / 2.0))
        + (df - 1.0) * (PI.sqrt() * alpha).ln()
        - ln_gamma_unchecked(kf + 1.0)
        + (kf - 0.5) * df.ln())
}

/// Large-d equivalent of E f_k(Z_α) for a fixed k.
pub fn zero_cell_highdim_asymptotic(d: usize, k: usize, alpha: f64) -> Result<FormulaValue> {
    Ok(FormulaValue::exact(
        ln_zero_cell_highdim_asymptotic(d, k, alpha)?.exp(),
    ))
}

/// Logarithm of the α = 1 specialization π^{d−½}(d/2)^{k−½}/k!.
pub fn ln_zero_cell_highdim_alpha_one(d: usize, k: usize) -> Result<f64> {
    check_highdim(d, 1.0)?;
    let (df, kf) = (d as f64, k as f64);
    Ok((df - 0.5) * PI.ln() + (kf - 0.5) * (df / 2.0).ln() - ln_gamma_unchecked(kf + 1.0))
}

/// Logarithm of the α = d specialization
/// e^{1/4} 2^{(d+1)/2−k} π^{(d−1)/2} d^{d/2+k−1}/k!.
pub fn ln_zero_cell_highdim_alpha_d(d: usize, k: usize) -> Result<f64> {
    check_highdim(d, 1.0)?;
    let (df, kf) = (d as f64, k as f64);
    Ok(0.25
        + ((df + 1.0) / 2.0 - kf) * 2f64.ln()
        + (df - 1.0) / 2.0 * PI.ln()
        + (df / 2.0 + kf - 1.0) * df.ln()
        - ln_gamma_unchecked(kf + 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_vertices() {
        let v = expected_fvector(Family::Beta, 2, 7, -1.0, 0, &ExactJ).unwrap();
        assert!((v.value - 7.0).abs() < 1e-9);
        assert_eq!(v.sigma, 0.0);
    }

    #[test]
    fn sylvester_four_points() {
        let v = expected_fvector(Family::Beta, 2, 4, 0.0, 0, &ExactJ).unwrap();
        assert!((v.value - (4.0 - 35.0 / (12.0 * PI * PI))).abs() < 1e-9);
    }

    #[test]
    fn poisson_and_zero_cell_closed_forms() {
        let half_pi2 = PI * PI / 2.0;
        assert!(
            (expected_fvector_poisson(2, 1.0, 1, &ExactJ).unwrap().value - half_pi2).abs() < 1e-10
        );
        assert!(
            (expected_fvector_zero_cell(2, 1.0, 0, &ExactJ)
                .unwrap()
                .value
                - half_pi2)
                .abs()
                < 1e-10
        );
        assert!(
            (expected_fvector_zero_cell(2, 2.0, 0, &ExactJ)
                .unwrap()
                .value
                - 6.0)
                .abs()
                < 1e-10
        );
        // the general sum with J̃_{3,2} = ½ agrees with the closed form
        let general = expected_fvector_poisson(3, 1.0, 1, &ExactJ).unwrap().value;
        assert!((general - 2.0 * PI * PI).abs() < 1e-10);
    }

    #[test]
    fn asymptotic_forms_agree() {
        for d in 2..6 {
            let k = d - 1;
            let g = fvector_asymptotic_const(d, k, 0.0, &ExactJ).unwrap().value;
            let b = fvector_asymptotic_const_ball(d, k, &ExactJ).unwrap().value;
            assert!((g / b - 1.0).abs() < 1e-12, "d={d}: {g} vs {b}");
            let s = fvector_asymptotic_const_sphere(d, k, &ExactJ)
                .unwrap()
                .value;
            let gs = fvector_asymptotic_const(d, k, -1.0, &ExactJ).unwrap().value;
            assert!((gs / s - 1.0).abs() < 1e-12, "d={d}: {gs} vs {s}");
            let c =
                affine_surface_constant(d, k, &ExactJ).unwrap().value * ball_affine_surface_area(d);
            assert!((c / b - 1.0).abs() < 1e-12);
        }
        assert!((fvector_asymptotic_const(2, 1, -1.0, &ExactJ).unwrap().value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn highdim_specializations_share_the_limit() {
        for k in 0..3 {
            let g = ln_zero_cell_highdim_asymptotic(300, k, 1.0).unwrap();
            let s = ln_zero_cell_highdim_alpha_one(300, k).unwrap();
            assert!((g - s).abs() < 1e-10);
        }
    }

    #[test]
    fn exact_provider_refuses_unknown_values() {
        assert!(ExactJ.j(Family::Beta, 4, 1, 0.5).is_err());
        assert_eq!(
            j_key(Family::BetaPrime, 3, 2, 1.5),
            "(betaPrime,3,2,1.50000000000e0)"
        );
    }
}
