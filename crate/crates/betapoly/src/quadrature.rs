//! External-angle integrals I_{n,k}(α) (beta family) and Ĩ_{n,k}(α)
//! (beta-prime family), their large-n asymptotics, and the adaptive
//! Gauss–Kronrod integrator they rest on.
//!
//! Each integral is split at its centre and every half is written in a
//! variable measuring the distance to the endpoint, so values close to an
//! endpoint never suffer cancellation. The initial mesh is geometrically
//! graded towards the endpoints; the sharp peak that forms there for large
//! `n` and algebraic endpoint behaviour are then resolved by bisection.

use crate::error::{Error, Result};
use crate::specfun::{ln1m_exp, ln_gamma_unchecked, ln_inc_beta_pair, ln_norm_const};
use crate::Family;
use serde::Serialize;
use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::{FRAC_PI_2, LN_2};

/// Outcome of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadResult {
    pub value: f64,
    pub abs_err_estimate: f64,
    pub evaluations: usize,
}

/// The three equivalent ways of writing the external-angle integrals.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Representation {
    /// Integration in the original variable t.
    Algebraic,
    /// t = sin φ (beta) or t = tan φ (beta-prime).
    Trigonometric,
    /// t = tanh φ (beta) or t = sinh φ (beta-prime).
    Hyperbolic,
}

pub const EVAL_BUDGET: usize = 1_000_000;
const REL_TOL: f64 = 1e-12;
const ABS_FLOOR: f64 = 1e-300;
const GRADED_LEVELS: usize = 80;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

fn gauss_kronrod<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Panel {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(centre);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = half * XGK[j];
        let s = f(centre - dx) + f(centre + dx);
        kronrod += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    let value = kronrod * half;
    let err = ((kronrod - gauss) * half).abs();
    Panel { a, b, value, err }
}

/// Adaptive G7/K15 integration over the union of the panels delimited by
/// the sorted `breaks`, refining the panel with the largest error estimate
/// until the total estimate drops below `max(abs_tol, rel_tol·|value|)`.
pub fn integrate<F: FnMut(f64) -> f64>(
    mut f: F,
    breaks: &[f64],
    abs_tol: f64,
    rel_tol: f64,
    budget: usize,
) -> Result<QuadResult> {
    if breaks.len() < 2 {
        return Err(Error::domain("need at least two breakpoints"));
    }
    let mut heap = BinaryHeap::new();
    let mut evals = 0;
    let mut frozen_value = 0.0;
    let mut frozen_err = 0.0;
    for w in breaks.windows(2) {
        if w[1] > w[0] {
            heap.push(gauss_kronrod(&mut f, w[0], w[1]));
            evals += 15;
        }
    }
    loop {
        let (value, err) = heap.iter().fold((frozen_value, frozen_err), |(v, e), p| {
            (v + p.value, e + p.err)
        });
        let target = abs_tol.max(rel_tol * value.abs());
        if err <= target || heap.is_empty() || frozen_err > target {
            if err <= target {
                return Ok(QuadResult {
                    value,
                    abs_err_estimate: err,
                    evaluations: evals,
                });
            }
            return Err(Error::numerical(
                format!("quadrature stalled with error estimate {err:e}"),
                Some(value),
            ));
        }
        if evals + 30 > budget {
            return Err(Error::numerical(
                format!("quadrature budget of {budget} evaluations exhausted (error {err:e})"),
                Some(value),
            ));
        }
        // Refine a batch of the worst panels before re-summing.
        let batch = (heap.len() / 8).max(1);
        for _ in 0..batch {
            let Some(worst) = heap.pop() else { break };
            if worst.err <= 0.25 * target / (heap.len() + 1) as f64 {
                heap.push(worst);
                break;
            }
            let mid = 0.5 * (worst.a + worst.b);
            if !(mid > worst.a && mid < worst.b) || (worst.b - worst.a) < 1e-15 * mid.abs() {
                frozen_value += worst.value;
                frozen_err += worst.err;
                continue;
            }
            heap.push(gauss_kronrod(&mut f, worst.a, mid));
            heap.push(gauss_kronrod(&mut f, mid, worst.b));
            evals += 30;
        }
    }
}

/// Breakpoints `0, top·2^{-levels}, …, top/2, top`.
fn graded_to_zero(top: f64, levels: usize) -> Vec<f64> {
    let mut pts = Vec::with_capacity(levels + 2);
    pts.push(0.0);
    for j in (0..=levels).rev() {
        pts.push(top * 0.5f64.powi(j as i32));
    }
    pts
}

/// Uniform breakpoints on [0, end] with a finer start.
fn uniform_to(end: f64, step: f64) -> Vec<f64> {
    let mut pts = vec![0.0, 0.125 * step, 0.25 * step, 0.5 * step];
    let mut x = step;
    while x < end {
        pts.push(x);
        x += step;
    }
    pts.push(end);
    pts
}

/// Integrates the two halves and adds a tail bound to the error estimate.
fn two_halves<L: FnMut(f64) -> f64, R: FnMut(f64) -> f64>(
    left: L,
    right: R,
    breaks: &[f64],
    tail_bound: f64,
) -> Result<QuadResult> {
    // The right half carries the mass; its size sets the absolute tolerance of the left.
    let right_part = integrate(right, breaks, ABS_FLOOR, REL_TOL, EVAL_BUDGET / 2)?;
    let abs = (REL_TOL * right_part.value.abs()).max(ABS_FLOOR);
    let left_part = integrate(left, breaks, abs, REL_TOL, EVAL_BUDGET / 2)?;
    Ok(QuadResult {
        value: left_part.value + right_part.value,
        abs_err_estimate: left_part.abs_err_estimate + right_part.abs_err_estimate + tail_bound,
        evaluations: left_part.evaluations + right_part.evaluations,
    })
}

/// (ln F, ln(1−F)) for the symmetric one-dimensional beta law with shape
/// (α−1)/2, given x = (1+t)/2 and y = (1−t)/2.
fn beta_log_cdf(x: f64, y: f64, alpha: f64) -> (f64, f64) {
    let a = 0.5 * (alpha + 1.0);
    ln_inc_beta_pair(x, y, a, a)
}

/// (ln F̃, ln(1−F̃)) for the heavy-tailed law with exponent α at a point s
/// with |s| described by x = 1/(1+s²), y = s²/(1+s²).
fn beta_prime_log_cdf(x: f64, y: f64, alpha: f64, positive: bool) -> (f64, f64) {
    let (ln_ix, _) = ln_inc_beta_pair(x, y, 0.5 * alpha, 0.5);
    let tail = ln_ix - LN_2;
    if positive {
        (ln1m_exp(tail), tail)
    } else {
        (tail, ln1m_exp(tail))
    }
}

/// Cumulative distribution function of the one-dimensional marginal that
/// appears inside the external-angle integrals.
pub fn density_cdf(family: Family, alpha: f64, t: f64) -> Result<f64> {
    match family {
        Family::Beta => {
            if !(alpha > -1.0) || !(-1.0..=1.0).contains(&t) {
                return Err(Error::domain(format!(
                    "beta cdf needs alpha > -1 and t in [-1,1]; got alpha={alpha}, t={t}"
                )));
            }
            let (lf, _) = beta_log_cdf(0.5 * (1.0 + t), 0.5 * (1.0 - t), alpha);
            Ok(lf.exp())
        }
        Family::BetaPrime => {
            if !(alpha > 0.0) || t.is_nan() {
                return Err(Error::domain(format!(
                    "beta-prime cdf needs alpha > 0, got {alpha}"
                )));
            }
            if t == 0.0 {
                return Ok(0.5);
            }
            if t.is_infinite() {
                return Ok(if t > 0.0 { 1.0 } else { 0.0 });
            }
            let (x, y) = if t.abs() <= 1.0 {
                let s2 = t * t;
                (1.0 / (1.0 + s2), s2 / (1.0 + s2))
            } else {
                let r2 = 1.0 / (t * t);
                (r2 / (1.0 + r2), 1.0 / (1.0 + r2))
            };
            let (lf, _) = beta_prime_log_cdf(x, y, alpha, t > 0.0);
            Ok(lf.exp())
        }
    }
}

fn check_nk(n: usize, k: usize) -> Result<()> {
    if n < 2 || k < 1 || k >= n {
        return Err(Error::domain(format!(
            "need n >= 2 and 1 <= k <= n-1; got n={n}, k={k}"
        )));
    }
    Ok(())
}

/// I_{n,k}(α) with the representation chosen for accuracy.
pub fn compute_i(n: usize, k: usize, alpha: f64) -> Result<QuadResult> {
    let repr = if alpha * k as f64 >= 1.0 {
        Representation::Algebraic
    } else {
        Representation::Trigonometric
    };
    compute_i_with(n, k, alpha, repr)
}

/// I_{n,k}(α) evaluated through a specific representation.
pub fn compute_i_with(n: usize, k: usize, alpha: f64, repr: Representation) -> Result<QuadResult> {
    check_nk(n, k)?;
    if !(alpha >= 0.0) || !alpha.is_finite() {
        return Err(Error::domain(format!("I needs alpha >= 0, got {alpha}")));
    }
    let ak = alpha * k as f64;
    let power = (n - k) as f64;
    let ln_c = ln_norm_const(Family::Beta, 1, 0.5 * (ak - 1.0))?;
    match repr {
        Representation::Algebraic => {
            // t = 1 − u on the right, t = −1 + u on the left, u ∈ (0, 1].
            let e = 0.5 * (ak - 1.0);
            let outer = move |u: f64| ln_c + e * (u * (2.0 - u)).ln();
            let right = |u: f64| {
                let (lf, _) = beta_log_cdf(1.0 - 0.5 * u, 0.5 * u, alpha);
                (outer(u) + power * lf).exp()
            };
            let left = |u: f64| {
                let (lf, _) = beta_log_cdf(0.5 * u, 1.0 - 0.5 * u, alpha);
                (outer(u) + power * lf).exp()
            };
            let u0 = 0.5f64.powi(GRADED_LEVELS as i32);
            let tail = 2.0 * ln_c.exp() * 2f64.powf(e.max(0.0)) * u0.powf(e + 1.0) / (e + 1.0);
            two_halves(left, right, &graded_to_zero(1.0, GRADED_LEVELS), tail)
        }
        Representation::Trigonometric => {
            // φ = ±(π/2 − v), v ∈ (0, π/2]; cos φ = sin v.
            let right = |v: f64| {
                let h = 0.5 * v;
                let (lf, _) = beta_log_cdf(h.cos().powi(2), h.sin().powi(2), alpha);
                (ln_c + ak * v.sin().ln() + power * lf).exp()
            };
            let left = |v: f64| {
                let h = 0.5 * v;
                let (lf, _) = beta_log_cdf(h.sin().powi(2), h.cos().powi(2), alpha);
                (ln_c + ak * v.sin().ln() + power * lf).exp()
            };
            let v0 = FRAC_PI_2 * 0.5f64.powi(GRADED_LEVELS as i32);
            let tail = 2.0 * ln_c.exp() * v0.powf(ak + 1.0) / (ak + 1.0);
            two_halves(left, right, &graded_to_zero(FRAC_PI_2, GRADED_LEVELS), tail)
        }
        Representation::Hyperbolic => {
            // t = ±tanh w, w ≥ 0.
            let q = ak + 1.0;
            let ln_cosh = |w: f64| w + (-2.0 * w).exp().ln_1p() - LN_2;
            let split = |w: f64| {
                let e = (-2.0 * w).exp();
                (1.0 / (1.0 + e), e / (1.0 + e))
            };
            let right = |w: f64| {
                let (x, y) = split(w);
                let (lf, _) = beta_log_cdf(x, y, alpha);
                (ln_c - q * ln_cosh(w) + power * lf).exp()
            };
            let left = |w: f64| {
                let (x, y) = split(w);
                let (lf, _) = beta_log_cdf(y, x, alpha);
                (ln_c - q * ln_cosh(w) + power * lf).exp()
            };
            let end = ((ln_c + q * LN_2 - q.ln()).max(0.0) + 42.0) / q;
            let tail = 2.0 * (ln_c + q * LN_2 - q * end).exp() / q;
            two_halves(left, right, &uniform_to(end, (end / 40.0).min(1.0)), tail)
        }
    }
}

/// Ĩ_{n,k}(α) with the representation chosen for accuracy.
pub fn compute_i_tilde(n: usize, k: usize, alpha: f64) -> Result<QuadResult> {
    let repr = if alpha * k as f64 >= 1.0 {
        Representation::Trigonometric
    } else {
        Representation::Hyperbolic
    };
    compute_i_tilde_with(n, k, alpha, repr)
}

/// Ĩ_{n,k}(α) evaluated through a specific representation.
pub fn compute_i_tilde_with(
    n: usize,
    k: usize,
    alpha: f64,
    repr: Representation,
) -> Result<QuadResult> {
    check_nk(n, k)?;
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::domain(format!(
            "I-tilde needs alpha > 0, got {alpha}"
        )));
    }
    let ak = alpha * k as f64;
    let power = (n - k) as f64;
    let ln_c = ln_norm_const(Family::BetaPrime, 1, 0.5 * (ak + 1.0))?;
    match repr {
        Representation::Algebraic => {
            // |t| split into (x, y) = (1/(1+t²), t²/(1+t²)) without overflow.
            let q = 0.5 * (ak + 1.0);
            let pieces = |t: f64| {
                if t <= 1.0 {
                    let s2 = t * t;
                    (1.0 / (1.0 + s2), s2 / (1.0 + s2), s2.ln_1p())
                } else {
                    let r2 = 1.0 / (t * t);
                    (r2 / (1.0 + r2), 1.0 / (1.0 + r2), 2.0 * t.ln() + r2.ln_1p())
                }
            };
            let right = |t: f64| {
                let (x, y, l) = pieces(t);
                let (lf, _) = beta_prime_log_cdf(x, y, alpha, true);
                (ln_c - q * l + power * lf).exp()
            };
            let left = |t: f64| {
                let (x, y, l) = pieces(t);
                let (lf, _) = beta_prime_log_cdf(x, y, alpha, false);
                (ln_c - q * l + power * lf).exp()
            };
            let ln_top = ((ln_c - ak.ln()).max(0.0) + 42.0) / ak;
            let levels = ((ln_top / LN_2).ceil() as usize).clamp(1, 1000);
            let mut breaks = graded_to_zero(1.0, 8);
            for j in 1..=levels {
                breaks.push(2f64.powi(j as i32));
            }
            let top = *breaks.last().unwrap_or(&1.0);
            let tail = 2.0 * (ln_c - ak * top.ln()).exp() / ak;
            two_halves(left, right, &breaks, tail)
        }
        Representation::Trigonometric => {
            // t = ±tan(π/2 − v): x = sin² v, y = cos² v, weight sin^{αk−1} v.
            let right = |v: f64| {
                let (s, c) = v.sin_cos();
                let (lf, _) = beta_prime_log_cdf(s * s, c * c, alpha, true);
                (ln_c + (ak - 1.0) * s.ln() + power * lf).exp()
            };
            let left = |v: f64| {
                let (s, c) = v.sin_cos();
                let (lf, _) = beta_prime_log_cdf(s * s, c * c, alpha, false);
                (ln_c + (ak - 1.0) * s.ln() + power * lf).exp()
            };
            let v0 = FRAC_PI_2 * 0.5f64.powi(GRADED_LEVELS as i32);
            let tail = 2.0 * ln_c.exp() * v0.powf(ak) / ak;
            two_halves(left, right, &graded_to_zero(FRAC_PI_2, GRADED_LEVELS), tail)
        }
        Representation::Hyperbolic => {
            // t = ±sinh w: x = 1/cosh² w, y = tanh² w, weight cosh^{−αk} w.
            let ln_cosh = |w: f64| w + (-2.0 * w).exp().ln_1p() - LN_2;
            let split = |w: f64| {
                let e = (-2.0 * w).exp();
                let d = (1.0 + e) * (1.0 + e);
                (4.0 * e / d, (1.0 - e) * (1.0 - e) / d)
            };
            let right = |w: f64| {
                let (x, y) = split(w);
                let (lf, _) = beta_prime_log_cdf(x, y, alpha, true);
                (ln_c - ak * ln_cosh(w) + power * lf).exp()
            };
            let left = |w: f64| {
                let (x, y) = split(w);
                let (lf, _) = beta_prime_log_cdf(x, y, alpha, false);
                (ln_c - ak * ln_cosh(w) + power * lf).exp()
            };
            let end = ((ln_c + ak * LN_2 - ak.ln()).max(0.0) + 42.0) / ak;
            let tail = 2.0 * (ln_c + ak * LN_2 - ak * end).exp() / ak;
            two_halves(left, right, &uniform_to(end, (end / 40.0).min(1.0)), tail)
        }
    }
}

/// Leading-order large-n behaviour of I_{n,m}(α) (beta) or Ĩ_{n,m}(α) (beta-prime).
pub fn asymptotic_i(family: Family, n: f64, m: usize, alpha: f64) -> Result<f64> {
    if !(n >= 1.0) || m < 1 {
        return Err(Error::domain("asymptotic I needs n >= 1 and m >= 1"));
    }
    let mf = m as f64;
    match family {
        Family::BetaPrime => {
            if !(alpha > 0.0) {
                return Err(Error::domain(format!(
                    "beta-prime asymptotic needs alpha > 0, got {alpha}"
                )));
            }
            let ln_outer = ln_norm_const(Family::BetaPrime, 1, 0.5 * (alpha * mf + 1.0))?;
            let ln_inner = ln_norm_const(Family::BetaPrime, 1, 0.5 * (alpha + 1.0))?;
            Ok(
                (ln_outer + ln_gamma_unchecked(mf) - alpha.ln() + mf * (alpha.ln() - ln_inner)
                    - mf * n.ln())
                .exp(),
            )
        }
        Family::Beta => {
            if !(alpha > -1.0) || !(alpha * mf > -1.0) {
                return Err(Error::domain(format!(
                    "beta asymptotic needs alpha > -1, got {alpha}"
                )));
            }
            let rate = (alpha * mf + 1.0) / (alpha + 1.0);
            let ln_outer = ln_norm_const(Family::Beta, 1, 0.5 * (alpha * mf - 1.0))?;
            let ln_inner = ln_norm_const(Family::Beta, 1, 0.5 * (alpha - 1.0))?;
            Ok((-rate * n.ln() + ln_outer - (1.0 + alpha).ln()
                + rate * ((1.0 + alpha).ln() - ln_inner)
                + ln_gamma_unchecked(rate))
            .exp())
        }
    }
}
