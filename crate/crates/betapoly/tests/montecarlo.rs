use betapoly::cones::{Accumulator, MCEstimate};
use betapoly::montecarlo::*;
use betapoly::quadrature::{compute_i, compute_i_tilde};
use betapoly::sampling::{DistParams, SeededStream};
use betapoly::Family;
use rand::Rng;
use std::f64::consts::PI;

fn z(e: &MCEstimate, target: f64) -> f64 {
    (e.mean - target) / e.std_error.max(1e-300)
}

/// P[a given point of four falls in the triangle of the other three] is
/// E[area]/π; the area is estimated from rejection-sampled disk points.
fn sylvester_oracle() -> (f64, f64) {
    let mut rng = SeededStream::new(1001, 0);
    let mut disk = || loop {
        let (x, y): (f64, f64) = (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        if x * x + y * y < 1.0 {
            return (x, y);
        }
    };
    let mut acc = Accumulator::default();
    for _ in 0..1_000_000 {
        let (a, b, c) = (disk(), disk(), disk());
        acc.push(((b.0 - a.0) * (c.1 - a.1) - (c.0 - a.0) * (b.1 - a.1)).abs() / 2.0 / PI);
    }
    let e = acc.estimate();
    (e.mean, e.std_error)
}

#[test]
fn sylvester_constant() {
    let (p, se) = sylvester_oracle();
    let closed = 35.0 / (48.0 * PI * PI);
    assert!((p - closed).abs() <= 3.0 * se, "{p} ± {se} vs {closed}");
    assert!((prob_not_face(4.0 - 4.0 * closed, 4, 1).unwrap() - closed).abs() < 1e-15);
}

#[test]
fn four_points_in_the_disk() {
    let mut rng = SeededStream::new(1002, 0);
    let f =
        simulate_expected_fvector(&DistParams::beta(2, 0.0).unwrap(), 4, 20_000, &mut rng).unwrap();
    let target = 4.0 - 35.0 / (12.0 * PI * PI);
    assert!(z(&f[0], target).abs() <= 3.0, "{:?}", f[0]);
    // in the plane f₀ = f₁ for every sample
    assert_eq!(f[0].mean, f[1].mean);
}

#[test]
fn circle_points_are_all_vertices() {
    let mut rng = SeededStream::new(1003, 0);
    let f = simulate_expected_fvector(&DistParams::sphere(2).unwrap(), 7, 500, &mut rng).unwrap();
    assert_eq!((f[0].mean, f[0].std_error), (7.0, 0.0));
}

#[test]
fn j_values_with_known_answers() {
    let mut rng = SeededStream::new(1004, 0);
    for (family, alpha) in [
        (Family::Beta, 0.5),
        (Family::Beta, 2.0),
        (Family::BetaPrime, 2.0),
    ] {
        for (m, ell, target) in [(3, 3, 1.0), (3, 2, 0.5), (3, 1, 1.0 / 6.0), (4, 3, 0.5)] {
            if family == Family::BetaPrime && alpha <= (m as f64 - 1.0) / 2.0 {
                continue;
            }
            let e = estimate_j_with(family, m, ell, alpha, 400, 400, false, &mut rng)
                .unwrap()
                .estimate;
            assert!(
                z(&e, target).abs() <= 3.0 || (e.mean - target).abs() < 1e-12,
                "{family:?} {m} {ell}: {e:?}"
            );
            assert!((0.0..=1.0).contains(&e.mean));
        }
    }
    let e = estimate_j(Family::Beta, 5, 4, 1.0, 10, 10, &mut rng)
        .unwrap()
        .estimate;
    assert_eq!((e.mean, e.std_error), (0.5, 0.0));
    assert!(estimate_j(Family::Beta, 3, 0, 1.0, 10, 10, &mut rng).is_err());
}

#[test]
fn external_angles_match_quadrature() {
    let mut rng = SeededStream::new(1005, 0);
    let e = simulate_expected_external_angle(
        &DistParams::beta(2, 0.0).unwrap(),
        4,
        2,
        10_000,
        200,
        &mut rng,
    )
    .unwrap();
    let i = compute_i(4, 2, 2.0).unwrap().value;
    assert!(z(&e, i).abs() <= 3.0, "{e:?} vs {i}");
    let e = simulate_expected_external_angle(
        &DistParams::beta_prime(2, 2.0).unwrap(),
        4,
        2,
        10_000,
        200,
        &mut rng,
    )
    .unwrap();
    let i = compute_i_tilde(4, 2, 2.0).unwrap().value;
    assert!(z(&e, i).abs() <= 3.0, "{e:?} vs {i}");
}

#[test]
fn top_civ_reproduces_external_angle() {
    let params = DistParams::beta(2, 1.0).unwrap();
    let mut rng = SeededStream::new(1006, 0);
    let civ = simulate_tangent_civ(&params, 4, 2, 1, 4_000, 300, &mut rng).unwrap();
    let ext = simulate_expected_external_angle(&params, 4, 2, 4_000, 300, &mut rng).unwrap();
    let zc = (civ.mean - ext.mean) / (civ.std_error.powi(2) + ext.std_error.powi(2)).sqrt();
    assert!(zc.abs() <= 3.0, "{civ:?} vs {ext:?}");
}

#[test]
fn tangent_profiles_are_consistent() {
    let mut rng = SeededStream::new(1007, 0);
    let s = simulate_tangent_civ_profile(
        &DistParams::beta(2, 0.0).unwrap(),
        4,
        1,
        4_000,
        300,
        &mut rng,
    )
    .unwrap();
    assert!(s.gauss_bonnet_defect.mean.abs() < 1e-12);
    assert!(s.sum_defect.mean.abs() < 1e-12);
    let closed = 35.0 / (48.0 * PI * PI);
    assert!(z(&s.not_face, closed).abs() <= 3.0, "{:?}", s.not_face);
}

#[test]
fn distance_laws() {
    let mut rng = SeededStream::new(1008, 0);
    let r = simulate_distance_law(Family::Beta, 3, 2, 0.0, 20_000, &mut rng).unwrap();
    assert_eq!(r.law, ReferenceLaw::Beta { a: 1.0, b: 3.0 });
    assert!(r.pass, "{r:?}");
    let r = simulate_distance_law(Family::BetaPrime, 3, 2, 2.5, 20_000, &mut rng).unwrap();
    assert!(r.pass, "{r:?}");
    let r = simulate_projection_law(Family::Beta, 4, 2, 1.0, 20_000, &mut rng).unwrap();
    assert!(r.pass, "{r:?}");
}

#[test]
fn ks_statistic_of_exact_quantiles() {
    let n = 1000;
    let u: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
    assert!((ks_statistic(&u, |x| x) - 0.5 / n as f64).abs() < 1e-12);
    assert!(ks_statistic(&u, |x| x * x) > ks_critical_1pct(n));
}

#[test]
fn reruns_are_bit_identical() {
    let params = DistParams::beta_prime(3, 3.0).unwrap();
    let run = || {
        let mut rng = SeededStream::new(1009, 0);
        simulate_expected_fvector(&params, 7, 300, &mut rng).unwrap()
    };
    assert_eq!(run(), run());
}
