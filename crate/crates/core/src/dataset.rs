//! Point sets in R^d, CSV ingestion and duplicate validation.

use std::collections::HashMap;
use std::io::{Read, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::knn::KnnIndex;
use crate::scalar::Scalar;

/// `n` points in `d` dimensions, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset<T> {
    coords: Vec<T>,
    n: usize,
    d: usize,
}

impl<T: Scalar> Dataset<T> {
    /// Builds a dataset from a flat row-major buffer.
    pub fn from_flat(coords: Vec<T>, d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidDimension(0));
        }
        if coords.is_empty() {
            return Err(Error::EmptyDataset);
        }
        if !coords.len().is_multiple_of(d) {
            return Err(Error::InvalidDataset(format!(
                "{} coordinates do not divide into rows of {d}",
                coords.len()
            )));
        }
        if let Some(pos) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::InvalidDataset(format!(
                "non-finite coordinate in row {}",
                pos / d
            )));
        }
        let n = coords.len() / d;
        Ok(Self { coords, n, d })
    }

    pub fn from_rows<R: AsRef<[T]>>(rows: &[R]) -> Result<Self> {
        let first = rows.first().ok_or(Error::EmptyDataset)?;
        let d = first.as_ref().len();
        let mut coords = Vec::with_capacity(rows.len() * d);
        for row in rows {
            let row = row.as_ref();
            if row.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    actual: row.len(),
                });
            }
            coords.extend_from_slice(row);
        }
        Self::from_flat(coords, d)
    }

    /// One-dimensional dataset, one point per value.
    pub fn from_values(values: &[T]) -> Result<Self> {
        Self::from_flat(values.to_vec(), 1)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn d(&self) -> usize {
        self.d
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[T] {
        &self.coords[i * self.d..(i + 1) * self.d]
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = &[T]> + '_ {
        self.coords.chunks_exact(self.d)
    }

    pub fn as_flat(&self) -> &[T] {
        &self.coords
    }

    /// New dataset made of the given rows, in the given order.
    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        let mut coords = Vec::with_capacity(indices.len() * self.d);
        for &i in indices {
            coords.extend_from_slice(self.point(i));
        }
        Self::from_flat(coords, self.d)
    }

    pub fn cast<U: Scalar>(&self) -> Dataset<U> {
        Dataset {
            coords: self.coords.iter().map(|&c| U::of(c.as_f64())).collect(),
            n: self.n,
            d: self.d,
        }
    }

    /// Adds independent uniform noise on `[-sigma, sigma]` to every coordinate.
    pub fn jittered(&self, sigma: f64, seed: u64) -> Result<Self> {
        if !(sigma.is_finite() && sigma >= 0.0) {
            return Err(Error::InvalidConfig(format!(
                "jitter must be finite and >= 0, got {sigma}"
            )));
        }
        if sigma == 0.0 {
            return Ok(self.clone());
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let coords = self
            .coords
            .iter()
            .map(|&c| c + T::of(rng.random_range(-sigma..=sigma)))
            .collect();
        Self::from_flat(coords, self.d)
    }

    /// Writes the points as CSV rows using the shortest round-trip decimal form.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for row in self.points() {
            write_row(&mut out, row, None)?;
        }
        Ok(())
    }
}

fn write_row<W: Write, T: Scalar>(out: &mut W, row: &[T], label: Option<i64>) -> std::io::Result<()> {
    let mut first = true;
    for c in row {
        if !first {
            out.write_all(b",")?;
        }
        first = false;
        write!(out, "{c}")?;
    }
    if let Some(label) = label {
        write!(out, ",{label}")?;
    }
    out.write_all(b"\n")
}

/// A dataset with one integer ground-truth class per point.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset<T> {
    pub data: Dataset<T>,
    pub labels: Vec<i64>,
}

impl<T: Scalar> LabeledDataset<T> {
    pub fn new(data: Dataset<T>, labels: Vec<i64>) -> Result<Self> {
        if labels.len() != data.n() {
            return Err(Error::LengthMismatch {
                left: data.n(),
                right: labels.len(),
            });
        }
        Ok(Self { data, labels })
    }

    /// Writes features with the label appended as the last column.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for (row, &label) in self.data.points().zip(&self.labels) {
            write_row(&mut out, row, Some(label))?;
        }
        Ok(())
    }
}

/// Result of [`load_csv`]: labels are present iff a label column was requested.
#[derive(Debug, Clone, PartialEq)]
pub enum Loaded<T> {
    Unlabeled(Dataset<T>),
    Labeled(LabeledDataset<T>),
}

impl<T> Loaded<T> {
    pub fn dataset(&self) -> &Dataset<T> {
        match self {
            Loaded::Unlabeled(d) => d,
            Loaded::Labeled(l) => &l.data,
        }
    }

    pub fn labels(&self) -> Option<&[i64]> {
        match self {
            Loaded::Unlabeled(_) => None,
            Loaded::Labeled(l) => Some(&l.labels),
        }
    }

    pub fn into_parts(self) -> (Dataset<T>, Option<Vec<i64>>) {
        match self {
            Loaded::Unlabeled(d) => (d, None),
            Loaded::Labeled(l) => (l.data, Some(l.labels)),
        }
    }
}

pub fn load_csv<T: Scalar>(
    path: impl AsRef<Path>,
    has_header: bool,
    label_column: Option<usize>,
) -> Result<Loaded<T>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_csv(file, has_header, label_column)
}

/// Parses comma-separated rows. Lines starting with `#` are comments.
///
/// Integer labels are kept as-is. If any label cell is not an integer, every
/// distinct label string is mapped to a dense id in order of first appearance.
pub fn read_csv<T: Scalar, R: Read>(
    reader: R,
    has_header: bool,
    label_column: Option<usize>,
) -> Result<Loaded<T>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(has_header)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(reader);

    let mut coords: Vec<T> = Vec::new();
    let mut raw_labels: Vec<String> = Vec::new();
    let mut width: Option<usize> = None;

    for record in rdr.records() {
        let record = record.map_err(|e| Error::Parse {
            line: e.position().map_or(0, |p| p.line() as usize),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.iter().all(str::is_empty) {
            continue;
        }
        match width {
            None => width = Some(record.len()),
            Some(w) if w != record.len() => {
                return Err(Error::Parse {
                    line,
                    message: format!("expected {w} fields, found {}", record.len()),
                })
            }
            Some(_) => {}
        }
        if let Some(col) = label_column {
            if col >= record.len() {
                return Err(Error::Parse {
                    line,
                    message: format!("label column {col} out of range for {} fields", record.len()),
                });
            }
        }
        for (j, cell) in record.iter().enumerate() {
            if Some(j) == label_column {
                raw_labels.push(cell.to_owned());
                continue;
            }
            let value: T = cell.parse().map_err(|_| Error::Parse {
                line,
                message: format!("non-numeric cell {cell:?} in column {j}"),
            })?;
            if !value.is_finite() {
                return Err(Error::Parse {
                    line,
                    message: format!("non-finite cell {cell:?} in column {j}"),
                });
            }
            coords.push(value);
        }
    }

    let width = width.ok_or(Error::EmptyDataset)?;
    let d = width - usize::from(label_column.is_some());
    if d == 0 {
        return Err(Error::InvalidDimension(0));
    }
    let data = Dataset::from_flat(coords, d)?;
    match label_column {
        None => Ok(Loaded::Unlabeled(data)),
        Some(_) => {
            let labels = dense_labels(&raw_labels);
            Ok(Loaded::Labeled(LabeledDataset::new(data, labels)?))
        }
    }
}

fn dense_labels(raw: &[String]) -> Vec<i64> {
    let parsed: Option<Vec<i64>> = raw.iter().map(|s| s.parse().ok()).collect();
    if let Some(labels) = parsed {
        return labels;
    }
    let mut ids: HashMap<&str, i64> = HashMap::new();
    raw.iter()
        .map(|s| {
            let next = ids.len() as i64;
            *ids.entry(s.as_str()).or_insert(next)
        })
        .collect()
}

/// Points whose k-th nearest distance (self included) is zero.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ValidationReport {
    pub k: usize,
    pub zero_radius: Vec<usize>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.zero_radius.is_empty()
    }
}

/// Flags every point that has at least `k` exact copies of itself in the sample
/// (counting itself), which would make its k-NN density infinite.
pub fn validate<T: Scalar>(dataset: &Dataset<T>, k: usize) -> Result<ValidationReport> {
    if k == 0 {
        return Err(Error::InvalidK { k, n: dataset.n() });
    }
    if k > dataset.n() {
        return Ok(ValidationReport {
            k,
            zero_radius: Vec::new(),
        });
    }
    // Exact duplicate groups, keyed by bit pattern; -0.0 and 0.0 are the same point.
    let mut groups: HashMap<Vec<u64>, Vec<usize>> = HashMap::new();
    for (i, row) in dataset.points().enumerate() {
        let key = row
            .iter()
            .map(|&c| {
                let c = c.as_f64();
                if c == 0.0 { 0.0f64 } else { c }.to_bits()
            })
            .collect();
        groups.entry(key).or_default().push(i);
    }
    let mut zero_radius: Vec<usize> = groups
        .into_values()
        .filter(|g| g.len() >= k)
        .flatten()
        .collect();
    zero_radius.sort_unstable();
    Ok(ValidationReport { k, zero_radius })
}

/// Same check, read off an already built index.
pub fn validate_index<T: Scalar>(index: &KnnIndex<T>) -> ValidationReport {
    ValidationReport {
        k: index.k(),
        zero_radius: (0..index.n())
            .filter(|&i| index.radius(i) == T::zero())
            .collect(),
    }
}
