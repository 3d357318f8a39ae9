#![allow(clippy::needless_range_loop)]

use betapoly::cones::*;
use betapoly::hull::PointConfig;
use betapoly::sampling::SeededStream;
use proptest::prelude::*;
use rand::Rng;
use rand_distr::StandardNormal;

/// Feasibility of {A·λ = b, λ ≥ 0} by enumerating basic solutions: a
/// feasible system has one supported on linearly independent columns.
fn feasible_by_vertices(rows: usize, cols: &[Vec<f64>], b: &[f64]) -> bool {
    if b.iter().all(|x| x.abs() < 1e-12) {
        return true;
    }
    let p = cols.len();
    for mask in 1u32..(1 << p) {
        let s: Vec<usize> = (0..p).filter(|i| mask & (1 << i) != 0).collect();
        if s.len() > rows {
            continue;
        }
        // normal equations on the support
        let g: Vec<Vec<f64>> = s
            .iter()
            .map(|&i| s.iter().map(|&j| dot(&cols[i], &cols[j])).collect())
            .collect();
        let rhs: Vec<f64> = s.iter().map(|&i| dot(&cols[i], b)).collect();
        let Some(lam) = solve_small(g, rhs) else {
            continue;
        };
        if lam.iter().any(|&l| l < -1e-9) {
            continue;
        }
        let resid: f64 = (0..rows)
            .map(|r| {
                let v: f64 = s.iter().zip(&lam).map(|(&i, l)| cols[i][r] * l).sum();
                (v - b[r]).powi(2)
            })
            .sum();
        if resid.sqrt() < 1e-9 {
            return true;
        }
    }
    false
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn solve_small(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))?;
        if a[p][c].abs() < 1e-10 {
            return None;
        }
        a.swap(c, p);
        b.swap(c, p);
        for r in 0..n {
            if r != c {
                let f = a[r][c] / a[c][c];
                for k in c..n {
                    a[r][k] -= f * a[c][k];
                }
                b[r] -= f * b[c];
            }
        }
    }
    Some((0..n).map(|i| b[i] / a[i][i]).collect())
}

fn rational() -> impl Strategy<Value = f64> {
    (-1000i32..=1000, 1i32..=1000).prop_map(|(p, q)| p as f64 / q as f64)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]
    #[test]
    fn lp_matches_vertex_enumeration(
        rows in 1usize..=3,
        cols in prop::collection::vec(prop::collection::vec(rational(), 3), 1..=6),
        b in prop::collection::vec(rational(), 3),
    ) {
        let cols: Vec<Vec<f64>> = cols.into_iter().map(|c| c[..rows].to_vec()).collect();
        let b = &b[..rows];
        prop_assert_eq!(cone_feasible(rows, &cols, b, false).unwrap(), feasible_by_vertices(rows, &cols, b));
    }

    #[test]
    fn lp_finds_planted_solutions(
        cols in prop::collection::vec(prop::collection::vec(rational(), 3), 1..=6),
        weights in prop::collection::vec(0u32..5, 6),
    ) {
        let b: Vec<f64> = (0..3).map(|r| cols.iter().zip(&weights).map(|(c, &w)| c[r] * w as f64).sum()).collect();
        prop_assert!(cone_feasible(3, &cols, &b, false).unwrap());
    }
}

#[test]
fn spec_lp_examples() {
    let g = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
    assert!(cone_feasible(2, &g, &[1.0, 1.0], false).unwrap());
    assert!(!cone_feasible(2, &g, &[-1.0, 0.0], false).unwrap());
    assert!(cone_feasible(2, &g, &[0.0, 0.0], false).unwrap());
    assert!(cone_feasible(1, &[vec![1.0], vec![-1.0]], &[0.0], true).unwrap());
    assert!(!cone_feasible(1, &[vec![1.0], vec![2.0]], &[0.0], true).unwrap());
    assert!(cone_feasible(2, &g, &[1.0], false).is_err());
}

fn within(e: &MCEstimate, target: f64, sigmas: f64) -> bool {
    (e.mean - target).abs() <= sigmas * e.std_error.max(1e-12)
}

#[test]
fn solid_angles_of_simple_cones() {
    let mut rng = SeededStream::new(11, 0);
    let half_line = Cone::new(1, vec![vec![1.0]], vec![]).unwrap();
    let e = solid_angle_mc(&half_line, 20_000, &mut rng).unwrap();
    assert!(within(&e, 0.5, 3.0), "{e:?}");
    let quadrant = Cone::new(2, vec![vec![1.0, 0.0], vec![0.0, 1.0]], vec![]).unwrap();
    let e = solid_angle_mc(&quadrant, 20_000, &mut rng).unwrap();
    assert!(within(&e, 0.25, 3.0), "{e:?}");
    for d in 2..5 {
        let mut normal = vec![0.0; d];
        normal[0] = 1.0;
        let lin: Vec<Vec<f64>> = (1..d)
            .map(|i| {
                let mut e = vec![0.0; d];
                e[i] = 1.0;
                e
            })
            .collect();
        let halfspace = Cone::new(d, vec![normal], lin).unwrap();
        let e = solid_angle_mc(&halfspace, 20_000, &mut rng).unwrap();
        assert!(within(&e, 0.5, 3.0), "d={d}: {e:?}");
    }
}

#[test]
fn halfspace_grassmann_angles() {
    // every line through 0 meets a halfspace in a ray, so h₂ = ½
    let h = Cone::new(2, vec![vec![0.3, 1.0]], vec![vec![1.0, 0.0]]).unwrap();
    let mut rng = SeededStream::new(12, 0);
    let g = grassmann_angles_mc(&h, 5_000, &mut rng).unwrap();
    assert_eq!(g.means(), vec![0.5, 0.5, 0.5]);
    let v = conic_intrinsic_volumes_mc(&h, 5_000, &mut rng).unwrap();
    assert_eq!(v.means(), vec![0.0, 0.5, 0.5]);
}

/// Brute-force conic intrinsic volumes of the quadrant: the metric
/// projection of x is (x⁺, y⁺), landing in the open quadrant, on a ray, or
/// at the origin.
#[test]
fn quadrant_profile_matches_projection_oracle() {
    let mut rng = SeededStream::new(13, 0);
    let n = 1_000_000;
    let mut counts = [0usize; 3];
    for _ in 0..n {
        let x: f64 = rng.sample(StandardNormal);
        let y: f64 = rng.sample(StandardNormal);
        counts[(x > 0.0) as usize + (y > 0.0) as usize] += 1;
    }
    let oracle: Vec<f64> = counts.iter().map(|&c| c as f64 / n as f64).collect();
    let quadrant = Cone::new(2, vec![vec![1.0, 0.0], vec![0.0, 1.0]], vec![]).unwrap();
    let v = conic_intrinsic_volumes_mc(&quadrant, 40_000, &mut rng).unwrap();
    for j in 0..3 {
        let se = (v.values[j].std_error.powi(2) + oracle[j] * (1.0 - oracle[j]) / n as f64).sqrt();
        assert!(
            (v.values[j].mean - oracle[j]).abs() <= 3.0 * se,
            "j={j}: {:?} vs {}",
            v.values[j],
            oracle[j]
        );
        assert!((oracle[j] - [0.25, 0.5, 0.25][j]).abs() < 0.003);
    }
}

fn random_cone(rng: &mut SeededStream, q: usize, gens: usize, lin: usize) -> Cone {
    let g = (0..gens)
        .map(|_| (0..q).map(|_| rng.sample(StandardNormal)).collect())
        .collect();
    let l = (0..lin)
        .map(|_| (0..q).map(|_| rng.sample(StandardNormal)).collect())
        .collect();
    Cone::new(q, g, l).unwrap()
}

#[test]
fn profiles_of_random_cones_satisfy_identities() {
    let mut rng = SeededStream::new(14, 0);
    for (q, gens, lin) in [(3, 3, 0), (3, 4, 0), (4, 3, 1), (4, 5, 0), (3, 2, 0)] {
        let cone = random_cone(&mut rng, q, gens, lin);
        // skip cones whose generators positively span a subspace
        if lin == 0 && cone_feasible(q, &cone.generators, &vec![0.0; q], true).unwrap() {
            continue;
        }
        let v = match conic_intrinsic_volumes_mc(&cone, 8_000, &mut rng) {
            Ok(v) => v,
            Err(betapoly::Error::Degenerate(_)) => continue,
            Err(e) => panic!("{e}"),
        };
        let total: f64 = v.means().iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
        let even: f64 = v.means().iter().step_by(2).sum();
        assert!(
            (even - 0.5).abs() < 1e-12,
            "q={q} gens={gens} lin={lin}: {:?}",
            v.means()
        );
        // υ at the dimension of the linear hull is the solid angle
        let dim = linear_hull(&cone).len();
        let s = solid_angle_mc(&cone, 20_000, &mut rng).unwrap();
        let top = v.values[dim];
        let z = (top.mean - s.mean)
            / (top.std_error.powi(2) + s.std_error.powi(2))
                .sqrt()
                .max(1e-12);
        assert!(z.abs() <= 4.0, "q={q}: {top:?} vs {s:?}");
    }
}

#[test]
fn tangent_cone_examples() {
    let seg = PointConfig::new(1, &[vec![0.0], vec![2.0]]).unwrap();
    let t = tangent_cone(&seg, &[1]).unwrap();
    assert_eq!(t.generators, vec![vec![-2.0]]);
    assert!(t.lineality.is_empty());

    let tri = PointConfig::new(2, &[vec![0.0, 0.0], vec![2.0, 0.0], vec![0.5, 1.5]]).unwrap();
    let t = tangent_cone(&tri, &[0, 1]).unwrap();
    assert_eq!(t.lineality, vec![vec![2.0, 0.0]]);
    assert_eq!(t.generators.len(), 1);
    assert!(t.generators[0][0].abs() < 1e-12 && (t.generators[0][1] - 1.5).abs() < 1e-12);

    let simplex = PointConfig::new(2, &[vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
    assert!(matches!(
        tangent_cone(&simplex, &[0, 1, 2]),
        Err(betapoly::Error::Domain(_))
    ));
}

#[test]
fn interval_endpoint_external_angle() {
    let seg = PointConfig::new(1, &[vec![-0.4], vec![0.7]]).unwrap();
    let mut rng = SeededStream::new(15, 0);
    let e = external_angle_mc(&seg, &[0], 1000, &mut rng).unwrap();
    assert!(within(&e, 0.5, 3.0));
}

#[test]
fn vertex_external_angles_sum_to_one() {
    // external angles at the vertices of a polygon sum to 1
    let pts = vec![
        vec![0.0, 0.0],
        vec![3.0, 0.2],
        vec![2.5, 2.0],
        vec![-0.5, 1.5],
    ];
    let cfg = PointConfig::new(2, &pts).unwrap();
    let mut rng = SeededStream::new(16, 0);
    let (mut sum, mut var) = (0.0, 0.0);
    for v in 0..4 {
        let e = external_angle_mc(&cfg, &[v], 50_000, &mut rng).unwrap();
        sum += e.mean;
        var += e.std_error.powi(2);
    }
    assert!((sum - 1.0).abs() <= 4.0 * var.sqrt(), "{sum}");
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let cone = Cone::new(
        3,
        vec![
            vec![1.0, 0.2, 0.0],
            vec![0.0, 1.0, 0.3],
            vec![0.1, 0.0, 1.0],
        ],
        vec![],
    )
    .unwrap();
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap();
        pool.install(|| {
            let mut rng = SeededStream::new(17, 3);
            conic_intrinsic_volumes_mc(&cone, 5_000, &mut rng).unwrap()
        })
    };
    assert_eq!(run(1), run(3));
}
