//! Simplicial homology over GF(2): boundary matrices, Betti numbers by
//! rank-nullity, persistence reduction, and persistent Betti numbers.
//!
//! No floating point enters any rank computation; filtration values are
//! carried along but never used arithmetically.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::complex::{FilteredComplex, SimplicialComplex};
use crate::error::{Error, Result};

/// Sparse GF(2) matrix stored as sorted column supports.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gf2Matrix {
    rows: usize,
    cols: Vec<Vec<usize>>,
}

impl Gf2Matrix {
    pub fn new(rows: usize, cols: Vec<Vec<usize>>) -> Self {
        debug_assert!(cols
            .iter()
            .all(|c| c.windows(2).all(|w| w[0] < w[1]) && c.last().is_none_or(|&l| l < rows)));
        Self { rows, cols }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn num_cols(&self) -> usize {
        self.cols.len()
    }

    pub fn col(&self, j: usize) -> &[usize] {
        &self.cols[j]
    }

    /// Rank by left-to-right column reduction with a lowest-one pivot table.
    pub fn rank(&self) -> usize {
        let mut pivot: Vec<Option<usize>> = vec![None; self.rows];
        let mut reduced: Vec<Vec<usize>> = Vec::new();
        let mut rank = 0;
        for col in &self.cols {
            let mut cur = col.clone();
            while let Some(&low) = cur.last() {
                match pivot[low] {
                    Some(other) => cur = xor_sorted(&cur, &reduced[other]),
                    None => {
                        pivot[low] = Some(reduced.len());
                        rank += 1;
                        break;
                    }
                }
            }
            reduced.push(cur);
        }
        rank
    }

    /// Matrix product over GF(2); used by the fundamental-lemma tests.
    pub fn multiply(&self, rhs: &Gf2Matrix) -> Gf2Matrix {
        let cols = rhs
            .cols
            .iter()
            .map(|rc| {
                let mut acc: Vec<usize> = Vec::new();
                for &k in rc {
                    acc = xor_sorted(&acc, &self.cols[k]);
                }
                acc
            })
            .collect();
        Gf2Matrix { rows: self.rows, cols }
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(Vec::is_empty)
    }
}

/// Symmetric difference of two sorted index lists (GF(2) column addition).
fn xor_sorted(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// The GF(2) boundary matrix `∂_p`: rows indexed by (p-1)-simplices,
/// columns by p-simplices, one per facet obtained by vertex deletion.
pub fn boundary_matrix(sc: &SimplicialComplex, p: usize) -> Gf2Matrix {
    assert!(p >= 1, "boundary_matrix requires p >= 1");
    let faces = sc.simplices(p - 1);
    let row_of: HashMap<&[usize], usize> = faces
        .iter()
        .enumerate()
        .map(|(i, s)| (s.vertices(), i))
        .collect();
    let cols = sc
        .simplices(p)
        .iter()
        .map(|s| {
            let mut col: Vec<usize> = s
                .facets()
                .map(|f| *row_of.get(f.vertices()).expect("complex not face-closed"))
                .collect();
            col.sort_unstable();
            col
        })
        .collect();
    Gf2Matrix { rows: faces.len(), cols }
}

/// The Betti vector `(β_0, ..., β_{d-1})`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BettiVector(pub Vec<usize>);

impl BettiVector {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl std::fmt::Display for BettiVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for (i, b) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{b}")?;
        }
        write!(f, ")")
    }
}

/// Betti numbers `β_0..β_{d-1}` by rank-nullity:
/// `β_p = n_p - rank ∂_p - rank ∂_{p+1}` with `rank ∂_0 = 0`.
pub fn betti_numbers(sc: &SimplicialComplex, d: usize) -> BettiVector {
    let mut ranks = vec![0usize; d + 2]; // ranks[p] = rank of ∂_p
    for p in 1..=(d.min(sc.max_dim() + 1)) {
        if sc.num_simplices(p) > 0 {
            ranks[p] = boundary_matrix(sc, p).rank();
        }
    }
    let mut betti = Vec::with_capacity(d);
    for p in 0..d {
        let np = sc.num_simplices(p);
        betti.push(np - ranks[p] - ranks[p + 1]);
    }
    BettiVector(betti)
}

/// A birth-death pair; `death = f64::INFINITY` for classes that never die.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PersistencePair {
    pub dim: usize,
    pub birth: f64,
    pub death: f64,
}

impl PersistencePair {
    pub fn is_infinite(&self) -> bool {
        self.death.is_infinite()
    }

    pub fn persistence(&self) -> f64 {
        self.death - self.birth
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PersistenceDiagram {
    pub pairs: Vec<PersistencePair>,
}

impl PersistenceDiagram {
    /// Finite pairs of the given homology dimension.
    pub fn finite_pairs(&self, dim: usize) -> impl Iterator<Item = &PersistencePair> {
        self.pairs.iter().filter(move |p| p.dim == dim && !p.is_infinite())
    }

    /// Writes the diagram as CSV with columns `dim,birth,death`, using the
    /// string `inf` for unpaired classes.
    pub fn to_csv(&self, writer: impl std::io::Write) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(writer);
        wtr.write_record(["dim", "birth", "death"])?;
        for p in &self.pairs {
            let death = if p.is_infinite() { "inf".to_string() } else { format!("{}", p.death) };
            wtr.write_record([format!("{}", p.dim), format!("{}", p.birth), death])?;
        }
        wtr.flush()?;
        Ok(())
    }

    pub fn from_csv(reader: impl std::io::Read) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(reader);
        let mut pairs = Vec::new();
        for (idx, record) in rdr.records().enumerate() {
            let line = idx + 2;
            let record = record.map_err(|_| Error::ParseError(line))?;
            if record.len() != 3 {
                return Err(Error::ParseError(line));
            }
            let dim: usize = record[0].parse().map_err(|_| Error::ParseError(line))?;
            let birth: f64 = record[1].parse().map_err(|_| Error::ParseError(line))?;
            let death = if record[2].trim() == "inf" {
                f64::INFINITY
            } else {
                record[2].parse().map_err(|_| Error::ParseError(line))?
            };
            pairs.push(PersistencePair { dim, birth, death });
        }
        Ok(Self { pairs })
    }
}

/// Standard left-to-right persistence reduction of a Rips filtration.
///
/// Each simplex that fails to create a cycle kills the class created by the
/// simplex owning its lowest one; unpaired creators get `death = INFINITY`.
pub fn reduce_filtration(fc: &FilteredComplex) -> Result<PersistenceDiagram> {
    let entries = fc.entries();
    let total = entries.len();
    let index_of: HashMap<&[usize], usize> = entries
        .iter()
        .enumerate()
        .map(|(i, (s, _))| (s.vertices(), i))
        .collect();

    // Boundary columns in the global filtration order.
    let mut columns: Vec<Vec<usize>> = Vec::with_capacity(total);
    for (idx, (s, v)) in entries.iter().enumerate() {
        let mut col = Vec::with_capacity(s.vertices().len());
        if s.dim() > 0 {
            for f in s.facets() {
                let fi = *index_of
                    .get(f.vertices())
                    .ok_or(Error::InvalidFiltration(idx))?;
                if fi >= idx || entries[fi].1 > *v {
                    return Err(Error::InvalidFiltration(idx));
                }
                col.push(fi);
            }
            col.sort_unstable();
        }
        columns.push(col);
    }

    let mut pivot: Vec<Option<usize>> = vec![None; total];
    let mut killed = vec![false; total];
    let mut pairs = Vec::new();
    for j in 0..total {
        let mut cur = std::mem::take(&mut columns[j]);
        loop {
            match cur.last() {
                None => break, // j creates a class; paired later or infinite
                Some(&low) => match pivot[low] {
                    Some(other) => cur = xor_sorted(&cur, &columns[other]),
                    None => {
                        pivot[low] = Some(j);
                        killed[low] = true;
                        let (ref creator, birth) = entries[low];
                        pairs.push(PersistencePair {
                            dim: creator.dim(),
                            birth,
                            death: entries[j].1,
                        });
                        break;
                    }
                },
            }
        }
        columns[j] = cur;
    }
    for (i, (s, v)) in entries.iter().enumerate() {
        // creators are exactly the zero reduced columns
        if columns[i].is_empty() && !killed[i] {
            pairs.push(PersistencePair { dim: s.dim(), birth: *v, death: f64::INFINITY });
        }
    }
    pairs.sort_by(|a, b| {
        a.dim
            .cmp(&b.dim)
            .then(a.birth.total_cmp(&b.birth))
            .then(a.death.total_cmp(&b.death))
    });
    Ok(PersistenceDiagram { pairs })
}

/// `β_p^{ε,ε'}`: classes of dimension `p` born by `ε` and still alive
/// strictly after `ε'`.
pub fn persistent_betti(
    diag: &PersistenceDiagram,
    p: usize,
    epsilon: f64,
    epsilon_prime: f64,
) -> Result<usize> {
    if epsilon > epsilon_prime {
        return Err(Error::OrderViolation(epsilon, epsilon_prime));
    }
    Ok(diag
        .pairs
        .iter()
        .filter(|pair| pair.dim == p && pair.birth <= epsilon && pair.death > epsilon_prime)
        .count())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{build_rips, build_rips_filtration, FilteredComplex, Simplex};
    use crate::geometry::DistanceMatrix;

    fn hollow_triangle() -> SimplicialComplex {
        let dm = DistanceMatrix::from_rows(vec![
            vec![0.0, 1.0, 1.0],
            vec![1.0, 0.0, 1.0],
            vec![1.0, 1.0, 0.0],
        ])
        .unwrap();
        build_rips(&dm, 0.5, 1)
    }

    fn filled_triangle() -> SimplicialComplex {
        let dm = DistanceMatrix::from_rows(vec![
            vec![0.0, 1.0, 1.0],
            vec![1.0, 0.0, 1.0],
            vec![1.0, 1.0, 0.0],
        ])
        .unwrap();
        build_rips(&dm, 0.5, 2)
    }

    #[test]
    fn edge_boundary_column() {
        let sc = hollow_triangle();
        let d1 = boundary_matrix(&sc, 1);
        assert_eq!(d1.rows(), 3);
        assert_eq!(d1.num_cols(), 3);
        assert_eq!(d1.col(0), &[0, 1]); // edge [0,1]
    }

    #[test]
    fn triangle_boundary_column() {
        let sc = filled_triangle();
        let d2 = boundary_matrix(&sc, 2);
        assert_eq!(d2.num_cols(), 1);
        // facets of [0,1,2] are [0,1],[0,2],[1,2] = all three edge rows
        assert_eq!(d2.col(0), &[0, 1, 2]);
    }

    #[test]
    fn boundary_of_boundary_is_zero() {
        let sc = filled_triangle();
        let d1 = boundary_matrix(&sc, 1);
        let d2 = boundary_matrix(&sc, 2);
        assert!(d1.multiply(&d2).is_zero());
    }

    #[test]
    fn betti_hollow_and_filled_triangle() {
        assert_eq!(betti_numbers(&hollow_triangle(), 2).0, vec![1, 1]);
        assert_eq!(betti_numbers(&filled_triangle(), 2).0, vec![1, 0]);
    }

    #[test]
    fn betti_two_isolated_vertices() {
        let dm = DistanceMatrix::from_rows(vec![vec![0.0, 5.0], vec![5.0, 0.0]]).unwrap();
        let sc = build_rips(&dm, 0.1, 1);
        assert_eq!(betti_numbers(&sc, 1).0, vec![2]);
    }

    #[test]
    fn reduce_single_vertex() {
        let fc = FilteredComplex::new(vec![(Simplex::vertex(0), 0.0)]).unwrap();
        let diag = reduce_filtration(&fc).unwrap();
        assert_eq!(diag.pairs.len(), 1);
        assert_eq!(diag.pairs[0].dim, 0);
        assert_eq!(diag.pairs[0].birth, 0.0);
        assert!(diag.pairs[0].is_infinite());
    }

    #[test]
    fn reduce_two_vertices_one_edge() {
        let fc = FilteredComplex::new(vec![
            (Simplex::vertex(0), 0.0),
            (Simplex::vertex(1), 0.0),
            (Simplex::new(vec![0, 1]).unwrap(), 1.0),
        ])
        .unwrap();
        let diag = reduce_filtration(&fc).unwrap();
        let mut summary: Vec<(usize, f64, f64)> =
            diag.pairs.iter().map(|p| (p.dim, p.birth, p.death)).collect();
        summary.sort_by(|a, b| a.2.total_cmp(&b.2));
        assert_eq!(summary, vec![(0, 0.0, 1.0), (0, 0.0, f64::INFINITY)]);
    }

    #[test]
    fn reduce_square_cycle() {
        // 4 vertices at 0, 4 edges at 1, no 2-simplices
        let mut entries = vec![
            (Simplex::vertex(0), 0.0),
            (Simplex::vertex(1), 0.0),
            (Simplex::vertex(2), 0.0),
            (Simplex::vertex(3), 0.0),
        ];
        for (a, b) in [(0, 1), (1, 2), (2, 3), (0, 3)] {
            entries.push((Simplex::new(vec![a, b]).unwrap(), 1.0));
        }
        let fc = FilteredComplex::new(entries).unwrap();
        let diag = reduce_filtration(&fc).unwrap();
        let dim0_deaths: Vec<f64> = diag
            .pairs
            .iter()
            .filter(|p| p.dim == 0 && !p.is_infinite())
            .map(|p| p.death)
            .collect();
        assert_eq!(dim0_deaths, vec![1.0, 1.0, 1.0]);
        assert_eq!(diag.pairs.iter().filter(|p| p.dim == 0 && p.is_infinite()).count(), 1);
        let dim1: Vec<&PersistencePair> = diag.pairs.iter().filter(|p| p.dim == 1).collect();
        assert_eq!(dim1.len(), 1);
        assert_eq!(dim1[0].birth, 1.0);
        assert!(dim1[0].is_infinite());
    }

    #[test]
    fn filtration_rejects_misordered_faces() {
        let result = FilteredComplex::new(vec![
            (Simplex::vertex(0), 0.0),
            (Simplex::vertex(1), 2.0),
            (Simplex::new(vec![0, 1]).unwrap(), 1.0),
        ]);
        assert!(matches!(result, Err(Error::InvalidFiltration(_))));
    }

    #[test]
    fn persistent_betti_cases() {
        let diag = PersistenceDiagram {
            pairs: vec![PersistencePair { dim: 1, birth: 0.2, death: 0.9 }],
        };
        assert_eq!(persistent_betti(&diag, 1, 0.3, 0.8).unwrap(), 1);
        assert_eq!(persistent_betti(&diag, 1, 0.3, 0.95).unwrap(), 0);
        assert!(matches!(
            persistent_betti(&diag, 1, 0.9, 0.3),
            Err(Error::OrderViolation(_, _))
        ));
    }

    #[test]
    fn persistent_betti_at_equal_endpoints_matches_prefix_betti() {
        let dm = DistanceMatrix::from_rows(vec![
            vec![0.0, 1.0, 2.0, 1.0],
            vec![1.0, 0.0, 1.0, 2.0],
            vec![2.0, 1.0, 0.0, 1.0],
            vec![1.0, 2.0, 1.0, 0.0],
        ])
        .unwrap();
        let fc = build_rips_filtration(&dm, 4.0, 2);
        let diag = reduce_filtration(&fc).unwrap();
        for t in [0.0, 0.5, 1.0, 1.5, 2.0] {
            let prefix = fc.prefix_at(t);
            let betti = betti_numbers(&prefix, 2);
            for p in 0..2 {
                assert_eq!(
                    persistent_betti(&diag, p, t, t).unwrap(),
                    betti.0[p],
                    "p={p} t={t}"
                );
            }
        }
    }

    #[test]
    fn diagram_csv_roundtrip() {
        let diag = PersistenceDiagram {
            pairs: vec![
                PersistencePair { dim: 0, birth: 0.0, death: f64::INFINITY },
                PersistencePair { dim: 1, birth: 0.25, death: 1.5 },
            ],
        };
        let mut buf = Vec::new();
        diag.to_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.contains("inf"));
        let back = PersistenceDiagram::from_csv(buf.as_slice()).unwrap();
        assert_eq!(back, diag);
    }
}
