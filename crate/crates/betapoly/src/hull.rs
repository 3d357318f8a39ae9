//! Convex hulls of small point sets in low dimension by exhaustive facet
//! enumeration, and the face lattice of the resulting simplicial polytope.

use crate::error::{Error, Result};
use crate::linalg::{dot, extend_orthonormal, next_combination, norm, project_out, sub};
use serde::Serialize;

/// Relative tolerance for side tests and the general-position certificate.
pub const SIDE_TOL: f64 = 1e-10;
pub const MAX_POINTS: usize = 25;
pub const MAX_DIM: usize = 7;

/// An ordered set of points in R^d.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointConfig {
    d: usize,
    coords: Vec<f64>,
    general_position: bool,
}

impl PointConfig {
    /// Builds a configuration and computes its general-position certificate.
    pub fn new(d: usize, points: &[Vec<f64>]) -> Result<Self> {
        if d == 0 {
            return Err(Error::domain("dimension must be positive"));
        }
        let mut coords = Vec::with_capacity(points.len() * d);
        for p in points {
            if p.len() != d {
                return Err(Error::domain(format!(
                    "point of length {} in dimension {d}",
                    p.len()
                )));
            }
            if p.iter().any(|x| !x.is_finite()) {
                return Err(Error::domain("non-finite coordinate"));
            }
            coords.extend_from_slice(p);
        }
        Ok(Self::from_flat(d, coords))
    }

    /// Builds a configuration from row-major coordinates.
    pub fn from_flat(d: usize, coords: Vec<f64>) -> Self {
        let mut cfg = PointConfig {
            d,
            coords,
            general_position: false,
        };
        cfg.general_position = general_position_certificate(&cfg);
        cfg
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.coords.len() / self.d
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.d..(i + 1) * self.d]
    }

    pub fn points(&self) -> Vec<Vec<f64>> {
        self.coords.chunks(self.d).map(|c| c.to_vec()).collect()
    }

    pub fn general_position(&self) -> bool {
        self.general_position
    }

    /// Diameter of the configuration (the length scale for tolerances).
    pub fn scale(&self) -> f64 {
        let n = self.n();
        let mut diam: f64 = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                diam = diam.max(norm(&sub(self.point(i), self.point(j))));
            }
        }
        diam
    }
}

/// Oriented hyperplane through `d` of the points: `⟨normal, x⟩ = offset`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Hyperplane {
    pub normal: Vec<f64>,
    pub offset: f64,
}

impl Hyperplane {
    pub fn signed_distance(&self, x: &[f64]) -> f64 {
        dot(&self.normal, x) - self.offset
    }
}

/// Unit normal hyperplane through the points with the given indices, or
/// `None` when they are affinely dependent within `SIDE_TOL·scale`.
pub fn hyperplane_through(cfg: &PointConfig, subset: &[usize], scale: f64) -> Option<Hyperplane> {
    let d = cfg.d();
    let base = cfg.point(subset[0]);
    let diffs: Vec<Vec<f64>> = subset[1..]
        .iter()
        .map(|&i| sub(cfg.point(i), base))
        .collect();
    let mut basis = Vec::with_capacity(d);
    for v in &diffs {
        let mut r = v.clone();
        project_out(&mut r, &basis);
        let len = norm(&r);
        if len <= SIDE_TOL * scale {
            return None;
        }
        r.iter_mut().for_each(|x| *x /= len);
        basis.push(r);
    }
    let mut best: Option<Vec<f64>> = None;
    let mut best_len = -1.0;
    for i in 0..d {
        let mut e = vec![0.0; d];
        e[i] = 1.0;
        project_out(&mut e, &basis);
        let len = norm(&e);
        if len > best_len {
            best_len = len;
            best = Some(e);
        }
    }
    let mut normal = best?;
    normal.iter_mut().for_each(|x| *x /= best_len);
    let offset = dot(&normal, base);
    Some(Hyperplane { normal, offset })
}

/// True when no d+1 points lie on a common hyperplane (and, for n ≤ d, the
/// points are affinely independent), up to `SIDE_TOL` relative to the diameter.
pub fn general_position_certificate(cfg: &PointConfig) -> bool {
    let n = cfg.n();
    let d = cfg.d();
    let scale = cfg.scale();
    if n == 0 || scale == 0.0 {
        return n <= 1;
    }
    if n <= d {
        let base = cfg.point(0);
        let diffs: Vec<Vec<f64>> = (1..n).map(|i| sub(cfg.point(i), base)).collect();
        let mut basis = Vec::new();
        return diffs.iter().all(|v| {
            let mut r = v.clone();
            project_out(&mut r, &basis);
            let len = norm(&r);
            if len <= SIDE_TOL * scale {
                return false;
            }
            r.iter_mut().for_each(|x| *x /= len);
            basis.push(r);
            true
        });
    }
    let mut subset: Vec<usize> = (0..d).collect();
    loop {
        match hyperplane_through(cfg, &subset, scale) {
            None => return false,
            Some(h) => {
                for j in 0..n {
                    if subset.contains(&j) {
                        continue;
                    }
                    if h.signed_distance(cfg.point(j)).abs() <= SIDE_TOL * scale {
                        return false;
                    }
                }
            }
        }
        if !next_combination(&mut subset, n) {
            return true;
        }
    }
}

/// A facet: its vertex indices and an outward supporting hyperplane.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Facet {
    pub vertices: Vec<usize>,
    pub plane: Hyperplane,
}

fn check_budget(cfg: &PointConfig) -> Result<()> {
    let (n, d) = (cfg.n(), cfg.d());
    if d > MAX_DIM || n > MAX_POINTS {
        return Err(Error::Budget(format!(
            "exhaustive hull limited to n <= {MAX_POINTS}, d <= {MAX_DIM}; got n={n}, d={d}"
        )));
    }
    if n < d + 1 {
        return Err(Error::domain(format!(
            "full-dimensional hull needs n >= d+1; got n={n}, d={d}"
        )));
    }
    Ok(())
}

/// All facets with outward normals. A d-subset is a facet iff every other
/// point lies strictly on one side of its affine hull.
pub fn enumerate_facets_with_planes(cfg: &PointConfig) -> Result<Vec<Facet>> {
    check_budget(cfg)?;
    let (n, d) = (cfg.n(), cfg.d());
    let scale = cfg.scale();
    let tol = SIDE_TOL * scale;
    let mut facets = Vec::new();
    let mut subset: Vec<usize> = (0..d).collect();
    loop {
        let plane = hyperplane_through(cfg, &subset, scale).ok_or_else(|| {
            Error::Degenerate(format!("points {subset:?} are affinely dependent"))
        })?;
        let mut pos = 0usize;
        let mut neg = 0usize;
        for j in 0..n {
            if subset.contains(&j) {
                continue;
            }
            let s = plane.signed_distance(cfg.point(j));
            if s.abs() <= tol {
                return Err(Error::Degenerate(format!(
                    "point {j} lies within tolerance of the hyperplane through {subset:?}"
                )));
            }
            if s > 0.0 {
                pos += 1;
            } else {
                neg += 1;
            }
            if pos > 0 && neg > 0 {
                break;
            }
        }
        if pos == 0 || neg == 0 {
            let plane = if pos > 0 {
                Hyperplane {
                    normal: plane.normal.iter().map(|x| -x).collect(),
                    offset: -plane.offset,
                }
            } else {
                plane
            };
            facets.push(Facet {
                vertices: subset.clone(),
                plane,
            });
        }
        if !next_combination(&mut subset, n) {
            break;
        }
    }
    Ok(facets)
}

/// Vertex sets of all facets.
pub fn enumerate_facets(cfg: &PointConfig) -> Result<Vec<Vec<usize>>> {
    Ok(enumerate_facets_with_planes(cfg)?
        .into_iter()
        .map(|f| f.vertices)
        .collect())
}

/// Face lattice of a simplicial polytope.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HullComplex {
    pub d: usize,
    pub facets: Vec<Vec<usize>>,
    /// `faces_by_dim[k]` holds the sorted (k+1)-element vertex sets of the k-faces.
    pub faces_by_dim: Vec<Vec<Vec<usize>>>,
    pub fvector: Vec<usize>,
    #[serde(skip)]
    pub planes: Vec<Hyperplane>,
}

impl HullComplex {
    /// Σ (−1)^k f_k = 1 − (−1)^d.
    pub fn euler_holds(&self) -> bool {
        let lhs: i64 = self
            .fvector
            .iter()
            .enumerate()
            .map(|(k, &f)| if k % 2 == 0 { f as i64 } else { -(f as i64) })
            .sum();
        let rhs = if self.d.is_multiple_of(2) { 0 } else { 2 };
        lhs == rhs
    }

    /// 2 f_{d−2} = d f_{d−1} (vacuous for d = 1).
    pub fn dehn_sommerville_holds(&self) -> bool {
        if self.d < 2 {
            return true;
        }
        2 * self.fvector[self.d - 2] == self.d * self.fvector[self.d - 1]
    }

    /// Whether the given vertex set spans a face.
    pub fn contains_face(&self, subset: &[usize]) -> bool {
        if subset.is_empty() || subset.len() > self.d {
            return false;
        }
        let mut s = subset.to_vec();
        s.sort_unstable();
        s.dedup();
        if s.len() != subset.len() {
            return false;
        }
        self.faces_by_dim[s.len() - 1].binary_search(&s).is_ok()
    }

    /// Smallest distance from the origin to a facet hyperplane, signed so
    /// that it is negative when the origin lies outside the hull.
    pub fn min_facet_distance(&self) -> f64 {
        self.planes
            .iter()
            .map(|p| p.offset)
            .fold(f64::INFINITY, f64::min)
    }
}

/// Builds the face lattice from the facets; every subset of a simplex
/// facet is a face.
pub fn face_lattice(cfg: &PointConfig) -> Result<HullComplex> {
    let facets = enumerate_facets_with_planes(cfg)?;
    let d = cfg.d();
    let mut faces_by_dim: Vec<Vec<Vec<usize>>> = vec![Vec::new(); d];
    for f in &facets {
        for size in 1..=d {
            let mut idx: Vec<usize> = (0..size).collect();
            loop {
                faces_by_dim[size - 1].push(idx.iter().map(|&i| f.vertices[i]).collect());
                if !next_combination(&mut idx, d) {
                    break;
                }
            }
        }
    }
    for level in &mut faces_by_dim {
        level.sort_unstable();
        level.dedup();
    }
    let fvector = faces_by_dim.iter().map(Vec::len).collect();
    let complex = HullComplex {
        d,
        planes: facets.iter().map(|f| f.plane.clone()).collect(),
        facets: facets.into_iter().map(|f| f.vertices).collect(),
        faces_by_dim,
        fvector,
    };
    if !complex.euler_holds() || !complex.dehn_sommerville_holds() {
        return Err(Error::Consistency(format!(
            "face numbers {:?} violate the Euler or Dehn–Sommerville relation",
            complex.fvector
        )));
    }
    Ok(complex)
}

/// Whether the points with the given indices span a face of the hull.
pub fn is_face(cfg: &PointConfig, subset: &[usize]) -> Result<bool> {
    Ok(face_lattice(cfg)?.contains_face(subset))
}

/// Orthonormal basis of the direction space of the affine hull of `subset`.
pub fn face_directions(cfg: &PointConfig, subset: &[usize]) -> Result<Vec<Vec<f64>>> {
    let base = cfg.point(subset[0]);
    let diffs: Vec<Vec<f64>> = subset[1..]
        .iter()
        .map(|&i| sub(cfg.point(i), base))
        .collect();
    let mut basis = Vec::new();
    let rejected = extend_orthonormal(&mut basis, &diffs, SIDE_TOL);
    if rejected > 0 {
        return Err(Error::Degenerate(format!(
            "face {subset:?} is affinely dependent"
        )));
    }
    Ok(basis)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(d: usize, pts: &[&[f64]]) -> PointConfig {
        PointConfig::new(d, &pts.iter().map(|p| p.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn triangle() {
        let c = cfg(2, &[&[0.0, 0.0], &[1.0, 0.0], &[0.0, 1.0]]);
        assert_eq!(
            enumerate_facets(&c).unwrap(),
            vec![vec![0, 1], vec![0, 2], vec![1, 2]]
        );
    }

    #[test]
    fn square_excludes_diagonals() {
        let c = cfg(2, &[&[1.0, 1.0], &[-1.0, 1.0], &[-1.0, -1.0], &[1.0, -1.0]]);
        let h = face_lattice(&c).unwrap();
        assert_eq!(h.fvector, vec![4, 4]);
        assert!(!h.contains_face(&[0, 2]));
        assert!(h.contains_face(&[1, 0]));
        // outward normals: the origin is inside at distance 1 from each edge
        assert!((h.min_facet_distance() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn simplex_in_three_dimensions() {
        let c = cfg(
            3,
            &[
                &[0.0, 0.0, 0.0],
                &[1.0, 0.0, 0.0],
                &[0.0, 1.0, 0.0],
                &[0.0, 0.0, 1.0],
            ],
        );
        let h = face_lattice(&c).unwrap();
        assert_eq!(h.facets.len(), 4);
        assert_eq!(h.fvector, vec![4, 6, 4]);
        assert!(h.contains_face(&[0, 3]) && h.contains_face(&[1, 2, 3]));
    }

    #[test]
    fn segment_in_one_dimension() {
        let c = cfg(1, &[&[0.3], &[-1.0], &[2.0]]);
        assert_eq!(enumerate_facets(&c).unwrap(), vec![vec![1], vec![2]]);
    }

    #[test]
    fn collinear_points_are_degenerate() {
        let c = cfg(2, &[&[0.0, 0.0], &[1.0, 1.0], &[2.0, 2.0], &[0.0, 1.0]]);
        assert!(!c.general_position());
        assert!(matches!(enumerate_facets(&c), Err(Error::Degenerate(_))));
    }

    #[test]
    fn budget_is_enforced() {
        let pts: Vec<Vec<f64>> = (0..26)
            .map(|i| vec![(i as f64).cos(), (i as f64).sin()])
            .collect();
        let c = PointConfig::new(2, &pts).unwrap();
        assert!(matches!(enumerate_facets(&c), Err(Error::Budget(_))));
    }
}
