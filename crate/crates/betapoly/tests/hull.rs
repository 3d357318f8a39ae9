use betapoly::hull::*;
use betapoly::sampling::{sample_config, DistParams, SeededStream};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;

fn rotation(d: usize, rng: &mut impl Rng) -> Vec<Vec<f64>> {
    // Gram–Schmidt on a Gaussian matrix
    let mut q: Vec<Vec<f64>> = Vec::new();
    while q.len() < d {
        let mut v: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        for u in &q {
            let ip: f64 = v.iter().zip(u).map(|(a, b)| a * b).sum();
            v.iter_mut().zip(u).for_each(|(a, b)| *a -= ip * b);
        }
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        q.push(v.into_iter().map(|x| x / n).collect());
    }
    q
}

fn sorted_facets(cfg: &PointConfig, relabel: &[usize]) -> Vec<Vec<usize>> {
    let mut f: Vec<Vec<usize>> = enumerate_facets(cfg)
        .unwrap()
        .into_iter()
        .map(|mut s| {
            s.iter_mut().for_each(|i| *i = relabel[*i]);
            s.sort_unstable();
            s
        })
        .collect();
    f.sort();
    f
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]
    #[test]
    fn facets_are_invariant_under_rotation_and_relabeling(seed in any::<u64>(), d in 2usize..=4, extra in 1usize..8) {
        let mut rng = SeededStream::new(seed, 0);
        let cfg = sample_config(&DistParams::beta(d, 0.5).unwrap(), d + extra, &mut rng).unwrap();
        let q = rotation(d, &mut rng);
        let mut perm: Vec<usize> = (0..cfg.n()).collect();
        perm.shuffle(&mut rng);
        // point i of the original sits at slot perm[i]
        let mut moved = vec![Vec::new(); cfg.n()];
        for (i, p) in cfg.points().iter().enumerate() {
            moved[perm[i]] = q.iter().map(|row| row.iter().zip(p).map(|(a, b)| a * b).sum()).collect();
        }
        let moved = PointConfig::new(d, &moved).unwrap();
        let identity: Vec<usize> = (0..cfg.n()).collect();
        prop_assert_eq!(sorted_facets(&cfg, &perm), sorted_facets(&moved, &identity));
    }

    #[test]
    fn lattices_satisfy_structural_identities(seed in any::<u64>(), d in 2usize..=5, extra in 1usize..10) {
        let mut rng = SeededStream::new(seed, 1);
        let cfg = sample_config(&DistParams::beta_prime(d, d as f64 / 2.0 + 1.0).unwrap(), d + extra, &mut rng).unwrap();
        let h = face_lattice(&cfg).unwrap();
        prop_assert!(h.euler_holds());
        prop_assert!(h.dehn_sommerville_holds());
        for k in 0..d - 1 {
            for face in &h.faces_by_dim[k] {
                prop_assert!(h.faces_by_dim[k + 1].iter().any(|g| face.iter().all(|i| g.contains(i))));
            }
        }
        for f in &h.facets {
            prop_assert_eq!(f.len(), d);
            prop_assert!(is_face(&cfg, f).unwrap());
        }
    }
}

#[test]
fn simplex_faces() {
    let cfg = PointConfig::new(
        3,
        &[
            vec![0.0, 0.0, 0.0],
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
        ],
    )
    .unwrap();
    let h = face_lattice(&cfg).unwrap();
    assert_eq!(h.fvector, vec![4, 6, 4]);
    for s in [vec![0], vec![1, 3], vec![0, 2, 3]] {
        assert!(is_face(&cfg, &s).unwrap());
    }
}

#[test]
fn interior_point_is_not_a_vertex() {
    let pts = vec![
        vec![-1.0, -1.0],
        vec![1.0, -1.1],
        vec![1.05, 1.0],
        vec![-1.0, 0.95],
        vec![0.1, 0.05],
    ];
    let cfg = PointConfig::new(2, &pts).unwrap();
    let h = face_lattice(&cfg).unwrap();
    assert_eq!(h.fvector, vec![4, 4]);
    assert!(!is_face(&cfg, &[4]).unwrap());
    assert!(!is_face(&cfg, &[0, 2]).unwrap());
    assert!(is_face(&cfg, &[0, 1]).unwrap());
}

#[test]
fn degenerate_input_is_rejected() {
    let collinear = PointConfig::new(
        2,
        &[
            vec![0.0, 0.0],
            vec![1.0, 1.0],
            vec![2.0, 2.0],
            vec![0.0, 1.0],
        ],
    )
    .unwrap();
    assert!(!collinear.general_position());
    assert!(face_lattice(&collinear).is_err());
    assert!(PointConfig::new(2, &[vec![0.0, 0.0], vec![1.0]]).is_err());
}
