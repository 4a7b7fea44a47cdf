//! Vietoris-Rips and Čech complexes, Rips filtrations, connectivity.
//!
//! Both builders take `epsilon` as a **ball radius**: a Rips edge requires
//! `distance <= 2 * epsilon` (balls intersect pairwise) and a Čech simplex
//! requires its minimal enclosing ball to have radius `<= epsilon` (balls
//! share a common point). Thresholds are inclusive. Filtrations index
//! simplices by diameter, i.e. by `2 * epsilon`.

use crate::error::{Error, Result};
use crate::geometry::{DistanceMatrix, PointCloud};

/// A sorted list of distinct vertex indices; dimension is `len - 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Simplex {
    vertices: Vec<usize>,
}

impl Simplex {
    /// Builds a simplex from arbitrary-order vertices; duplicates are an error.
    pub fn new(mut vertices: Vec<usize>) -> Result<Self> {
        vertices.sort_unstable();
        if vertices.is_empty() {
            return Err(Error::Domain("simplex must have at least one vertex".into()));
        }
        if vertices.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Domain("simplex has duplicate vertices".into()));
        }
        Ok(Self { vertices })
    }

    pub fn vertex(v: usize) -> Self {
        Self { vertices: vec![v] }
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn dim(&self) -> usize {
        self.vertices.len() - 1
    }

    /// The facets obtained by deleting one vertex, in vertex-deletion order.
    pub fn facets(&self) -> impl Iterator<Item = Simplex> + '_ {
        (0..self.vertices.len()).map(move |i| {
            let mut v = self.vertices.clone();
            v.remove(i);
            Simplex { vertices: v }
        })
    }
}

/// Simplices grouped by dimension, each dimension sorted lexicographically.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplicialComplex {
    by_dim: Vec<Vec<Simplex>>,
}

impl SimplicialComplex {
    pub(crate) fn from_grouped(mut by_dim: Vec<Vec<Simplex>>) -> Self {
        for group in &mut by_dim {
            group.sort();
        }
        while by_dim.len() > 1 && by_dim.last().is_some_and(Vec::is_empty) {
            by_dim.pop();
        }
        Self { by_dim }
    }

    /// Largest dimension with at least one simplex.
    pub fn max_dim(&self) -> usize {
        self.by_dim.len() - 1
    }

    /// Simplices of dimension `p` (empty slice when none).
    pub fn simplices(&self, p: usize) -> &[Simplex] {
        self.by_dim.get(p).map_or(&[], Vec::as_slice)
    }

    pub fn num_simplices(&self, p: usize) -> usize {
        self.simplices(p).len()
    }

    pub fn num_vertices(&self) -> usize {
        self.num_simplices(0)
    }

    pub fn total_simplices(&self) -> usize {
        self.by_dim.iter().map(Vec::len).sum()
    }

    pub fn contains(&self, s: &Simplex) -> bool {
        self.simplices(s.dim()).binary_search(s).is_ok()
    }

    /// `sum_p (-1)^p * #p-simplices`.
    pub fn euler_characteristic(&self) -> i64 {
        self.by_dim
            .iter()
            .enumerate()
            .map(|(p, g)| if p % 2 == 0 { g.len() as i64 } else { -(g.len() as i64) })
            .sum()
    }

    /// Checks face closure by enumeration; used in tests and validation.
    pub fn is_face_closed(&self) -> bool {
        for group in self.by_dim.iter().skip(1) {
            for s in group {
                for f in s.facets() {
                    if !self.contains(&f) {
                        return false;
                    }
                }
            }
        }
        true
    }
}

/// Rips complex at ball radius `epsilon`: k-simplices are cliques of the
/// graph with edges where `dm[i][j] <= 2 * epsilon`, up to `max_dim`.
pub fn build_rips(dm: &DistanceMatrix, epsilon: f64, max_dim: usize) -> SimplicialComplex {
    let threshold = 2.0 * epsilon;
    clique_complex(dm, threshold, max_dim, |_| true)
}

/// Čech complex at ball radius `epsilon` for ambient dimension `<= 3`:
/// a k-simplex is included iff the minimal enclosing ball of its vertices
/// has radius `<= epsilon`.
pub fn build_cech(pc: &PointCloud, epsilon: f64, max_dim: usize) -> Result<SimplicialComplex> {
    if pc.dim() > 3 {
        return Err(Error::UnsupportedDimension(pc.dim()));
    }
    let dm = pc.pairwise_distances();
    // Every Čech simplex is a clique at edge threshold 2*epsilon, and the
    // miniball radius is monotone under taking supersets, so pruning during
    // clique expansion is sound.
    Ok(clique_complex(&dm, 2.0 * epsilon, max_dim, |vertices| {
        if vertices.len() <= 2 {
            return true; // radius for pairs is dist/2 <= epsilon already
        }
        let pts: Vec<&[f64]> = vertices.iter().map(|&v| pc.point(v)).collect();
        miniball_radius(&pts) <= epsilon + 1e-12
    }))
}

/// Rips filtration indexed by simplex diameter (max pairwise distance),
/// truncated at `max_threshold`, sorted by (value, dimension, vertices).
#[derive(Debug, Clone, PartialEq)]
pub struct FilteredComplex {
    entries: Vec<(Simplex, f64)>,
}

impl FilteredComplex {
    /// Validates the face-ordering invariant: every face of a simplex must
    /// carry a filtration value `<=` that of the simplex, and sorting must be
    /// by (value, dimension, vertices).
    pub fn new(mut entries: Vec<(Simplex, f64)>) -> Result<Self> {
        entries.sort_by(|(s1, v1), (s2, v2)| {
            v1.total_cmp(v2)
                .then(s1.dim().cmp(&s2.dim()))
                .then(s1.cmp(s2))
        });
        let fc = Self { entries };
        fc.validate()?;
        Ok(fc)
    }

    fn validate(&self) -> Result<()> {
        use std::collections::HashMap;
        let mut value_of: HashMap<&[usize], f64> = HashMap::new();
        for (idx, (s, v)) in self.entries.iter().enumerate() {
            if s.dim() > 0 {
                for f in s.facets() {
                    match value_of.get(f.vertices()) {
                        Some(&fv) if fv <= *v => {}
                        _ => return Err(Error::InvalidFiltration(idx)),
                    }
                }
            }
            value_of.insert(s.vertices(), *v);
        }
        Ok(())
    }

    pub fn entries(&self) -> &[(Simplex, f64)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// The subcomplex of simplices with filtration value `<= t`.
    pub fn prefix_at(&self, t: f64) -> SimplicialComplex {
        let mut by_dim: Vec<Vec<Simplex>> = vec![Vec::new()];
        for (s, v) in &self.entries {
            if *v <= t {
                if by_dim.len() <= s.dim() {
                    by_dim.resize(s.dim() + 1, Vec::new());
                }
                by_dim[s.dim()].push(s.clone());
            }
        }
        SimplicialComplex::from_grouped(by_dim)
    }
}

pub fn build_rips_filtration(
    dm: &DistanceMatrix,
    max_threshold: f64,
    max_dim: usize,
) -> FilteredComplex {
    let sc = clique_complex(dm, max_threshold, max_dim, |_| true);
    let mut entries = Vec::with_capacity(sc.total_simplices());
    for p in 0..=sc.max_dim() {
        for s in sc.simplices(p) {
            entries.push((s.clone(), diameter(dm, s.vertices())));
        }
    }
    entries.sort_by(|(s1, v1), (s2, v2)| {
        v1.total_cmp(v2)
            .then(s1.dim().cmp(&s2.dim()))
            .then(s1.cmp(s2))
    });
    FilteredComplex { entries }
}

fn diameter(dm: &DistanceMatrix, vertices: &[usize]) -> f64 {
    let mut max = 0.0_f64;
    for (k, &i) in vertices.iter().enumerate() {
        for &j in &vertices[k + 1..] {
            max = max.max(dm.get(i, j));
        }
    }
    max
}

/// Clique complex of the graph with edges `dm[i][j] <= threshold`, with an
/// extra acceptance predicate on candidate simplices (monotone: rejecting a
/// simplex prunes all its cofaces).
fn clique_complex(
    dm: &DistanceMatrix,
    threshold: f64,
    max_dim: usize,
    accept: impl Fn(&[usize]) -> bool,
) -> SimplicialComplex {
    let n = dm.n();
    // Upper neighbor lists: j > i with d(i,j) <= threshold.
    let mut upper: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        for j in (i + 1)..n {
            if dm.get(i, j) <= threshold {
                upper[i].push(j);
            }
        }
    }
    let mut by_dim: Vec<Vec<Simplex>> = vec![Vec::new(); max_dim + 1];
    let mut stack: Vec<usize> = Vec::with_capacity(max_dim + 1);
    for v in 0..n {
        stack.push(v);
        by_dim[0].push(Simplex { vertices: vec![v] });
        if max_dim > 0 {
            expand(&upper, &mut stack, &upper[v].clone(), max_dim, &accept, &mut by_dim);
        }
        stack.pop();
    }
    SimplicialComplex::from_grouped(by_dim)
}

fn expand(
    upper: &[Vec<usize>],
    stack: &mut Vec<usize>,
    candidates: &[usize],
    max_dim: usize,
    accept: &impl Fn(&[usize]) -> bool,
    out: &mut [Vec<Simplex>],
) {
    for (idx, &v) in candidates.iter().enumerate() {
        stack.push(v);
        if accept(stack) {
            out[stack.len() - 1].push(Simplex { vertices: stack.clone() });
            if stack.len() <= max_dim {
                let next: Vec<usize> = intersect_sorted(&candidates[idx + 1..], &upper[v]);
                if !next.is_empty() {
                    expand(upper, stack, &next, max_dim, accept, out);
                }
            }
        }
        stack.pop();
    }
}

fn intersect_sorted(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len().min(b.len()));
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

/// Radius of the minimal enclosing ball of up to a handful of points,
/// exact for <= 4 support points (sufficient for simplices in d <= 3).
/// Enumerates circumballs of all nonempty subsets and keeps the smallest
/// one that encloses every point.
pub(crate) fn miniball_radius(points: &[&[f64]]) -> f64 {
    let m = points.len();
    assert!(m >= 1);
    let mut best = f64::INFINITY;
    for mask in 1u32..(1 << m) {
        if mask.count_ones() as usize > points[0].len() + 1 {
            continue;
        }
        let subset: Vec<&[f64]> = (0..m).filter(|i| mask >> i & 1 == 1).map(|i| points[i]).collect();
        if let Some((center, radius)) = circumball(&subset) {
            if radius < best
                && points
                    .iter()
                    .all(|p| crate::geometry::euclidean_distance(p, &center) <= radius + 1e-9 * (1.0 + radius))
            {
                best = radius;
            }
        }
    }
    best
}

/// Center and radius of the smallest ball with the given affinely
/// independent points on its boundary; `None` when degenerate.
fn circumball(points: &[&[f64]]) -> Option<(Vec<f64>, f64)> {
    let k = points.len() - 1;
    let d = points[0].len();
    if k == 0 {
        return Some((points[0].to_vec(), 0.0));
    }
    // Solve the Gram system G * lambda = b with v_i = p_i - p_0,
    // G[i][j] = v_i . v_j, b[i] = |v_i|^2 / 2; center = p_0 + sum lambda_i v_i.
    let vs: Vec<Vec<f64>> = points[1..]
        .iter()
        .map(|p| p.iter().zip(points[0]).map(|(a, b)| a - b).collect())
        .collect();
    let mut a = vec![vec![0.0; k + 1]; k];
    for i in 0..k {
        for j in 0..k {
            a[i][j] = dot(&vs[i], &vs[j]);
        }
        a[i][k] = dot(&vs[i], &vs[i]) / 2.0;
    }
    let lambda = solve_gauss(&mut a)?;
    let mut center = points[0].to_vec();
    for (l, v) in lambda.iter().zip(&vs) {
        for t in 0..d {
            center[t] += l * v[t];
        }
    }
    let radius = crate::geometry::euclidean_distance(&center, points[0]);
    Some((center, radius))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Gaussian elimination with partial pivoting on a k x (k+1) augmented
/// system; `None` on (near-)singularity.
fn solve_gauss(a: &mut [Vec<f64>]) -> Option<Vec<f64>> {
    let k = a.len();
    for col in 0..k {
        let pivot = (col..k).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, pivot);
        for row in 0..k {
            if row != col {
                let f = a[row][col] / a[col][col];
                for c in col..=k {
                    a[row][c] -= f * a[col][c];
                }
            }
        }
    }
    Some((0..k).map(|i| a[i][k] / a[i][i]).collect())
}

/// Disjoint-set over vertex indices with path compression and union by size.
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
    components: usize,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        Self { parent: (0..n).collect(), size: vec![1; n], components: n }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub fn union(&mut self, a: usize, b: usize) {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        self.components -= 1;
    }

    pub fn num_components(&self) -> usize {
        self.components
    }
}

/// True iff the 1-skeleton has exactly one connected component.
pub fn is_connected(sc: &SimplicialComplex) -> bool {
    count_components(sc) == 1
}

/// Number of connected components of the 1-skeleton.
pub fn count_components(sc: &SimplicialComplex) -> usize {
    let n = sc.num_vertices();
    let mut uf = UnionFind::new(n);
    // Vertex labels are remapped through the sorted vertex list so complexes
    // with sparse vertex index sets are handled too.
    let index_of = |v: usize| {
        sc.simplices(0)
            .binary_search(&Simplex::vertex(v))
            .expect("edge endpoint missing from vertex set")
    };
    for e in sc.simplices(1) {
        uf.union(index_of(e.vertices()[0]), index_of(e.vertices()[1]));
    }
    uf.num_components()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::PointCloud;

    fn equilateral_dm() -> DistanceMatrix {
        DistanceMatrix::from_rows(vec![
            vec![0.0, 1.0, 1.0],
            vec![1.0, 0.0, 1.0],
            vec![1.0, 1.0, 0.0],
        ])
        .unwrap()
    }

    #[test]
    fn rips_triangle_at_exact_threshold() {
        let sc = build_rips(&equilateral_dm(), 0.5, 2);
        assert_eq!(sc.num_simplices(0), 3);
        assert_eq!(sc.num_simplices(1), 3);
        assert_eq!(sc.num_simplices(2), 1);
    }

    #[test]
    fn rips_below_threshold_vertices_only() {
        let sc = build_rips(&equilateral_dm(), 0.49, 2);
        assert_eq!(sc.num_simplices(0), 3);
        assert_eq!(sc.num_simplices(1), 0);
        assert_eq!(sc.max_dim(), 0);
    }

    #[test]
    fn cech_equilateral_triangle() {
        // Side 1: pair miniball radius 0.5; circumradius 1/sqrt(3) ~ 0.5774.
        let pc = PointCloud::new(vec![
            vec![0.0, 0.0],
            vec![1.0, 0.0],
            vec![0.5, 3.0_f64.sqrt() / 2.0],
        ])
        .unwrap();
        let at_055 = build_cech(&pc, 0.55, 2).unwrap();
        assert_eq!(at_055.num_simplices(1), 3);
        assert_eq!(at_055.num_simplices(2), 0);
        let at_058 = build_cech(&pc, 0.58, 2).unwrap();
        assert_eq!(at_058.num_simplices(2), 1);
    }

    #[test]
    fn cech_single_point() {
        let pc = PointCloud::new(vec![vec![0.0, 0.0]]).unwrap();
        let sc = build_cech(&pc, 0.0, 2).unwrap();
        assert_eq!(sc.num_simplices(0), 1);
        assert_eq!(sc.max_dim(), 0);
    }

    #[test]
    fn cech_rejects_high_dimension() {
        let pc = PointCloud::new(vec![vec![0.0; 4]]).unwrap();
        match build_cech(&pc, 1.0, 1) {
            Err(Error::UnsupportedDimension(4)) => {}
            other => panic!("unexpected: {other:?}"),
        }
    }

    #[test]
    fn filtration_two_points() {
        let dm = DistanceMatrix::from_rows(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let fc = build_rips_filtration(&dm, 4.0, 1);
        let values: Vec<(usize, f64)> =
            fc.entries().iter().map(|(s, v)| (s.dim(), *v)).collect();
        assert_eq!(values, vec![(0, 0.0), (0, 0.0), (1, 1.0)]);

        let dm_far = DistanceMatrix::from_rows(vec![vec![0.0, 5.0], vec![5.0, 0.0]]).unwrap();
        let fc_far = build_rips_filtration(&dm_far, 4.0, 1);
        assert_eq!(fc_far.len(), 2);
    }

    #[test]
    fn filtration_unit_square() {
        let pc = PointCloud::new(vec![
            vec![0.0, 0.0],
            vec![1.0, 0.0],
            vec![1.0, 1.0],
            vec![0.0, 1.0],
        ])
        .unwrap();
        let fc = build_rips_filtration(&pc.pairwise_distances(), 4.0, 2);
        let sqrt2 = 2.0_f64.sqrt();
        let sides: Vec<f64> = fc
            .entries()
            .iter()
            .filter(|(s, _)| s.dim() == 1)
            .map(|(_, v)| *v)
            .collect();
        assert_eq!(sides.len(), 6);
        assert_eq!(sides.iter().filter(|&&v| v == 1.0).count(), 4);
        assert_eq!(sides.iter().filter(|&&v| (v - sqrt2).abs() < 1e-12).count(), 2);
        let triangles: Vec<f64> = fc
            .entries()
            .iter()
            .filter(|(s, _)| s.dim() == 2)
            .map(|(_, v)| *v)
            .collect();
        assert_eq!(triangles.len(), 4);
        assert!(triangles.iter().all(|&v| (v - sqrt2).abs() < 1e-12));
    }

    #[test]
    fn connectivity() {
        // path 0-1-2
        let dm = DistanceMatrix::from_rows(vec![
            vec![0.0, 1.0, 2.0],
            vec![1.0, 0.0, 1.0],
            vec![2.0, 1.0, 0.0],
        ])
        .unwrap();
        let path = build_rips(&dm, 0.5, 1);
        assert!(is_connected(&path));

        // two disjoint edges
        let dm2 = DistanceMatrix::from_rows(vec![
            vec![0.0, 1.0, 9.0, 9.0],
            vec![1.0, 0.0, 9.0, 9.0],
            vec![9.0, 9.0, 0.0, 1.0],
            vec![9.0, 9.0, 1.0, 0.0],
        ])
        .unwrap();
        let two = build_rips(&dm2, 0.5, 1);
        assert!(!is_connected(&two));
        assert_eq!(count_components(&two), 2);

        let single = build_rips(&DistanceMatrix::zeros(1), 1.0, 1);
        assert!(is_connected(&single));
    }

    #[test]
    fn rips_complexes_are_face_closed() {
        let pc = PointCloud::new(vec![
            vec![0.0, 0.0],
            vec![1.0, 0.0],
            vec![0.5, 0.8],
            vec![1.5, 0.8],
            vec![0.2, 1.5],
        ])
        .unwrap();
        let sc = build_rips(&pc.pairwise_distances(), 0.8, 3);
        assert!(sc.is_face_closed());
    }
}
