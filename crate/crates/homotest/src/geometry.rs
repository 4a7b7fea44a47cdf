//! Point clouds, Euclidean distance matrices, and norm-scaling preprocessing.

use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How to rescale a point cloud before building complexes.
///
/// `PerPointNorm` divides every point by its own Euclidean norm, which
/// projects the data onto the unit sphere. `MaxNorm` divides all points by
/// the largest norm in the cloud, preserving shape.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Scaling {
    #[default]
    PerPointNorm,
    None,
    MaxNorm,
}

/// A finite set of points in `R^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    points: Vec<Vec<f64>>,
    dim: usize,
}

impl PointCloud {
    /// Builds a cloud from coordinate rows. All rows must be nonempty, of
    /// equal length, and finite.
    pub fn new(points: Vec<Vec<f64>>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyInput);
        }
        let dim = points[0].len();
        if dim == 0 {
            return Err(Error::Domain("points must have dimension >= 1".into()));
        }
        for (i, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(Error::Domain(format!(
                    "point {i} has dimension {} but expected {dim}",
                    p.len()
                )));
            }
            if p.iter().any(|x| !x.is_finite()) {
                return Err(Error::Domain(format!("point {i} has a non-finite coordinate")));
            }
        }
        Ok(Self { points, dim })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i]
    }

    /// Divides every point by its own Euclidean norm, mapping the cloud onto
    /// the unit sphere. Fails if any point has norm below `1e-12`.
    pub fn normalize_by_norm(&self) -> Result<PointCloud> {
        let mut out = Vec::with_capacity(self.points.len());
        for (i, p) in self.points.iter().enumerate() {
            let norm = euclidean_norm(p);
            if norm < 1e-12 {
                return Err(Error::ZeroNormPoint(i));
            }
            out.push(p.iter().map(|x| x / norm).collect());
        }
        Ok(PointCloud { points: out, dim: self.dim })
    }

    /// Divides all points by the largest norm in the cloud.
    pub fn normalize_by_max_norm(&self) -> Result<PointCloud> {
        let max = self
            .points
            .iter()
            .map(|p| euclidean_norm(p))
            .fold(0.0_f64, f64::max);
        if max < 1e-12 {
            return Err(Error::ZeroNormPoint(0));
        }
        let points = self
            .points
            .iter()
            .map(|p| p.iter().map(|x| x / max).collect())
            .collect();
        Ok(PointCloud { points, dim: self.dim })
    }

    /// Applies the selected scaling mode.
    pub fn scaled(&self, mode: Scaling) -> Result<PointCloud> {
        match mode {
            Scaling::PerPointNorm => self.normalize_by_norm(),
            Scaling::MaxNorm => self.normalize_by_max_norm(),
            Scaling::None => Ok(self.clone()),
        }
    }

    /// Euclidean distances between all pairs of points.
    pub fn pairwise_distances(&self) -> DistanceMatrix {
        let n = self.points.len();
        let mut m = DistanceMatrix::zeros(n);
        for i in 0..n {
            for j in (i + 1)..n {
                let d = euclidean_distance(&self.points[i], &self.points[j]);
                m.set(i, j, d);
            }
        }
        m
    }

    /// Reads a cloud from CSV: one row per point, comma-separated reals,
    /// optionally skipping a header line.
    pub fn from_csv_path(path: impl AsRef<Path>, has_header: bool) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::from_csv_reader(file, has_header)
    }

    pub fn from_csv_reader(reader: impl Read, has_header: bool) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(has_header)
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let offset = if has_header { 2 } else { 1 };
        let mut points: Vec<Vec<f64>> = Vec::new();
        let mut dim = None;
        for (idx, record) in rdr.records().enumerate() {
            let line = idx + offset;
            let record = record.map_err(|_| Error::ParseError(line))?;
            if record.len() == 1 && record[0].is_empty() {
                continue; // blank line
            }
            let row: Vec<f64> = record
                .iter()
                .map(|f| f.parse::<f64>().map_err(|_| Error::ParseError(line)))
                .collect::<Result<_>>()?;
            match dim {
                None => dim = Some(row.len()),
                Some(d) if d != row.len() => return Err(Error::ParseError(line)),
                _ => {}
            }
            points.push(row);
        }
        if points.is_empty() {
            return Err(Error::EmptyFile);
        }
        Self::new(points)
    }

    /// Writes the cloud as CSV, one row per point.
    pub fn to_csv(&self, writer: impl std::io::Write) -> Result<()> {
        let mut wtr = csv::WriterBuilder::new().has_headers(false).from_writer(writer);
        for p in &self.points {
            wtr.write_record(p.iter().map(|x| format!("{x}")))?;
        }
        wtr.flush()?;
        Ok(())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::Io(io),
            _ => Error::ParseError(0),
        }
    }
}

pub fn euclidean_norm(p: &[f64]) -> f64 {
    p.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn euclidean_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Symmetric nonnegative matrix with zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    data: Vec<f64>, // row-major n*n
}

impl DistanceMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![0.0; n * n] }
    }

    /// Builds from an explicit symmetric matrix, validating shape, symmetry,
    /// nonnegativity and zero diagonal.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        let mut m = Self::zeros(n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Domain(format!("row {i} has length {} != {n}", row.len())));
            }
            for (j, &v) in row.iter().enumerate() {
                if v < 0.0 || !v.is_finite() {
                    return Err(Error::Domain(format!("entry ({i},{j}) is not a distance")));
                }
                m.data[i * n + j] = v;
            }
        }
        for i in 0..n {
            if m.get(i, i) != 0.0 {
                return Err(Error::Domain(format!("diagonal entry {i} is nonzero")));
            }
            for j in 0..n {
                if (m.get(i, j) - m.get(j, i)).abs() > 1e-12 {
                    return Err(Error::Domain(format!("matrix not symmetric at ({i},{j})")));
                }
            }
        }
        Ok(m)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
        self.data[j * self.n + i] = v;
    }
}
