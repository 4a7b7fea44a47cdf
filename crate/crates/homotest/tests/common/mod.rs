//! Shared test oracles: dense GF(2) elimination for Betti numbers and
//! brute-force assignment enumeration for diagram matching costs. Both are
//! written against the definitions directly, independent of the library's
//! sparse-reduction code paths.
//!
//! Each integration-test binary includes this module but uses a different
//! subset of it.
#![allow(dead_code)]

use homotest::complex::{Simplex, SimplicialComplex};
use homotest::geometry::PointCloud;
use rand::Rng;

/// Betti numbers `β_0..β_{d-1}` via dense GF(2) Gaussian elimination on
/// boundary matrices assembled by subset tests.
pub fn betti_oracle(sc: &SimplicialComplex, d: usize) -> Vec<usize> {
    let mut ranks = vec![0usize; d + 2];
    for p in 1..=d.min(sc.max_dim() + 1) {
        ranks[p] = dense_rank(dense_boundary(sc, p));
    }
    (0..d)
        .map(|p| sc.num_simplices(p) - ranks[p] - ranks[p + 1])
        .collect()
}

/// Dense `∂_p` with rows over (p-1)-simplices and columns over p-simplices;
/// an entry is set iff the row simplex is a facet of the column simplex.
pub fn dense_boundary(sc: &SimplicialComplex, p: usize) -> Vec<Vec<bool>> {
    let faces = sc.simplices(p - 1);
    let cells = sc.simplices(p);
    faces
        .iter()
        .map(|f| cells.iter().map(|c| is_subset(f.vertices(), c.vertices())).collect())
        .collect()
}

fn is_subset(a: &[usize], b: &[usize]) -> bool {
    a.iter().all(|v| b.contains(v))
}

/// Rank over GF(2) by row elimination.
pub fn dense_rank(mut m: Vec<Vec<bool>>) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..cols {
        if let Some(pivot) = (rank..rows).find(|&r| m[r][col]) {
            m.swap(rank, pivot);
            for r in 0..rows {
                if r != rank && m[r][col] {
                    for c in col..cols {
                        let v = m[rank][c];
                        m[r][c] ^= v;
                    }
                }
            }
            rank += 1;
        }
    }
    rank
}

/// GF(2) product of dense matrices, for the `∂∘∂ = 0` checks.
pub fn dense_product(a: &[Vec<bool>], b: &[Vec<bool>]) -> Vec<Vec<bool>> {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).fold(false, |acc, k| acc ^ (row[k] && b[k][j])))
                .collect()
        })
        .collect()
}

/// Uniform cloud in `[0,1]^d`.
pub fn random_cloud(rng: &mut impl Rng, n: usize, d: usize) -> PointCloud {
    let points = (0..n)
        .map(|_| (0..d).map(|_| rng.gen::<f64>()).collect())
        .collect();
    PointCloud::new(points).unwrap()
}

/// Random finite diagram points `(birth, death)` with `death > birth`.
pub fn random_diagram_points(rng: &mut impl Rng, max_points: usize) -> Vec<(f64, f64)> {
    let k = rng.gen_range(0..=max_points);
    (0..k)
        .map(|_| {
            let b = rng.gen::<f64>() * 2.0;
            let d = b + rng.gen::<f64>() * 2.0 + 1e-6;
            (b, d)
        })
        .collect()
}

/// Minimal total `cost^p` over all partial matchings of `xs` to `ys`, with
/// unmatched points sent to the diagonal. Exhaustive recursion: each `x` is
/// either matched to an unused `y` or to its diagonal projection, and any
/// leftover `y`s go to the diagonal.
pub fn wasserstein_oracle(xs: &[(f64, f64)], ys: &[(f64, f64)], p: f64) -> f64 {
    fn diag(pt: (f64, f64), p: f64) -> f64 {
        ((pt.1 - pt.0) / 2.0).powf(p)
    }
    fn pair(x: (f64, f64), y: (f64, f64), p: f64) -> f64 {
        (x.0 - y.0).abs().max((x.1 - y.1).abs()).powf(p)
    }
    fn rec(i: usize, used: &mut [bool], xs: &[(f64, f64)], ys: &[(f64, f64)], p: f64) -> f64 {
        if i == xs.len() {
            return ys
                .iter()
                .zip(used.iter())
                .filter(|(_, &u)| !u)
                .map(|(&y, _)| diag(y, p))
                .sum();
        }
        let mut best = diag(xs[i], p) + rec(i + 1, used, xs, ys, p);
        for j in 0..ys.len() {
            if !used[j] {
                used[j] = true;
                best = best.min(pair(xs[i], ys[j], p) + rec(i + 1, used, xs, ys, p));
                used[j] = false;
            }
        }
        best
    }
    let mut used = vec![false; ys.len()];
    rec(0, &mut used, xs, ys, p)
}

/// Simplex-by-simplex subcomplex check.
pub fn is_subcomplex(a: &SimplicialComplex, b: &SimplicialComplex) -> bool {
    (0..=a.max_dim()).all(|p| a.simplices(p).iter().all(|s| b.contains(s)))
}

/// Rebuilds a `Simplex` from raw vertices (convenience for oracles).
pub fn simplex(vertices: &[usize]) -> Simplex {
    Simplex::new(vertices.to_vec()).unwrap()
}
