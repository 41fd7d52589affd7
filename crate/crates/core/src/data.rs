//! Sparse binary-labelled datasets: libsvm ingestion, stratified splitting
//! and controlled label corruption.

use std::collections::BTreeSet;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use flate2::read::GzDecoder;
use rand::seq::index;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DataError {
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("label set {0:?} is not binary (expected {{0,1}}, {{-1,+1}} or two distinct values)")]
    NonBinaryLabels(Vec<String>),
    #[error("line {line}: feature index {index} exceeds dimension {dim}")]
    IndexOverflow { line: usize, index: u64, dim: usize },
    #[error("invalid dataset: {0}")]
    Invalid(String),
    #[error("invalid split: {0}")]
    InvalidSplit(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Borrowed view of one sparse row.
#[derive(Debug, Clone, Copy)]
pub struct Row<'a> {
    pub indices: &'a [usize],
    pub values: &'a [f64],
}

impl<'a> Row<'a> {
    pub fn dot(&self, dense: &[f64]) -> f64 {
        self.indices
            .iter()
            .zip(self.values)
            .map(|(&k, &x)| x * dense[k])
            .sum()
    }

    /// `out += scale * row`
    pub fn axpy(&self, scale: f64, out: &mut [f64]) {
        for (&k, &x) in self.indices.iter().zip(self.values) {
            out[k] += scale * x;
        }
    }

    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    pub fn max_index(&self) -> Option<usize> {
        self.indices.last().copied()
    }
}

/// Rows of sparse feature vectors (CSR layout) with labels in {0, 1}.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseDataset {
    n_features: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<f64>,
    labels: Vec<u8>,
}

impl SparseDataset {
    /// Builds a dataset from per-row `(index, value)` lists. Rows are sorted by
    /// index; duplicate indices, out-of-range indices, non-finite values and
    /// labels outside {0,1} are rejected.
    pub fn new(
        n_features: usize,
        rows: Vec<Vec<(usize, f64)>>,
        labels: Vec<u8>,
    ) -> Result<Self, DataError> {
        if rows.len() != labels.len() {
            return Err(DataError::Invalid(format!(
                "{} rows but {} labels",
                rows.len(),
                labels.len()
            )));
        }
        let mut indptr = Vec::with_capacity(rows.len() + 1);
        let mut indices = Vec::new();
        let mut values = Vec::new();
        indptr.push(0);
        for (r, mut row) in rows.into_iter().enumerate() {
            row.sort_by_key(|&(k, _)| k);
            for (pos, &(k, v)) in row.iter().enumerate() {
                if k >= n_features {
                    return Err(DataError::Invalid(format!(
                        "row {r}: index {k} >= n_features {n_features}"
                    )));
                }
                if pos > 0 && row[pos - 1].0 == k {
                    return Err(DataError::Invalid(format!("row {r}: duplicate index {k}")));
                }
                if !v.is_finite() {
                    return Err(DataError::Invalid(format!("row {r}: non-finite value")));
                }
                indices.push(k);
                values.push(v);
            }
            indptr.push(indices.len());
        }
        if let Some(bad) = labels.iter().find(|&&y| y > 1) {
            return Err(DataError::Invalid(format!("label {bad} not in {{0,1}}")));
        }
        Ok(Self {
            n_features,
            indptr,
            indices,
            values,
            labels,
        })
    }

    /// Dense constructor, convenient for tests and synthetic data. Zeros are
    /// not stored.
    pub fn from_dense(features: &[Vec<f64>], labels: Vec<u8>) -> Result<Self, DataError> {
        let d = features.first().map_or(0, Vec::len);
        if features.iter().any(|r| r.len() != d) {
            return Err(DataError::Invalid("ragged dense rows".into()));
        }
        let rows = features
            .iter()
            .map(|r| {
                r.iter()
                    .enumerate()
                    .filter(|(_, &v)| v != 0.0)
                    .map(|(k, &v)| (k, v))
                    .collect()
            })
            .collect();
        Self::new(d, rows, labels)
    }

    pub fn n_rows(&self) -> usize {
        self.labels.len()
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn row(&self, i: usize) -> Row<'_> {
        let (a, b) = (self.indptr[i], self.indptr[i + 1]);
        Row {
            indices: &self.indices[a..b],
            values: &self.values[a..b],
        }
    }

    pub fn rows(&self) -> impl Iterator<Item = Row<'_>> + '_ {
        (0..self.n_rows()).map(move |i| self.row(i))
    }

    pub fn label(&self, i: usize) -> u8 {
        self.labels[i]
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn n_positive(&self) -> usize {
        self.labels.iter().filter(|&&y| y == 1).count()
    }

    pub fn positive_fraction(&self) -> f64 {
        self.n_positive() as f64 / self.n_rows() as f64
    }

    pub fn has_both_classes(&self) -> bool {
        let p = self.n_positive();
        p > 0 && p < self.n_rows()
    }

    /// Widens the feature dimension. Shrinking below the largest stored index
    /// is an error.
    pub fn with_n_features(mut self, n_features: usize) -> Result<Self, DataError> {
        if let Some(&max) = self.indices.iter().max() {
            if max >= n_features {
                return Err(DataError::Invalid(format!(
                    "index {max} does not fit dimension {n_features}"
                )));
            }
        }
        self.n_features = n_features;
        Ok(self)
    }

    /// Rows at `idx`, in the given order.
    pub fn subset(&self, idx: &[usize]) -> SparseDataset {
        let mut indptr = Vec::with_capacity(idx.len() + 1);
        let mut indices = Vec::new();
        let mut values = Vec::new();
        let mut labels = Vec::with_capacity(idx.len());
        indptr.push(0);
        for &i in idx {
            let row = self.row(i);
            indices.extend_from_slice(row.indices);
            values.extend_from_slice(row.values);
            indptr.push(indices.len());
            labels.push(self.labels[i]);
        }
        SparseDataset {
            n_features: self.n_features,
            indptr,
            indices,
            values,
            labels,
        }
    }

    /// Same rows with the given labels.
    pub fn with_labels(&self, labels: Vec<u8>) -> Result<Self, DataError> {
        if labels.len() != self.n_rows() || labels.iter().any(|&y| y > 1) {
            return Err(DataError::Invalid("replacement labels do not fit".into()));
        }
        Ok(SparseDataset {
            labels,
            ..self.clone()
        })
    }

    /// Concatenates rows of `other` after `self`; dimensions must agree.
    pub fn concat(&self, other: &SparseDataset) -> Result<Self, DataError> {
        if self.n_features != other.n_features {
            return Err(DataError::Invalid("feature dimensions differ".into()));
        }
        let mut out = self.clone();
        let base = out.indices.len();
        out.indices.extend_from_slice(&other.indices);
        out.values.extend_from_slice(&other.values);
        out.indptr
            .extend(other.indptr.iter().skip(1).map(|&p| p + base));
        out.labels.extend_from_slice(&other.labels);
        Ok(out)
    }
}

/// Parses libsvm/svmlight text. `n_features` overrides the inferred
/// dimension (`1 + max index`), which lets separately stored splits agree.
pub fn parse_libsvm<R: BufRead>(
    reader: R,
    n_features: Option<usize>,
) -> Result<SparseDataset, DataError> {
    let mut raw_labels: Vec<f64> = Vec::new();
    let mut label_text: Vec<String> = Vec::new();
    let mut rows: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut max_index: Option<usize> = None;

    for (lineno, line) in reader.lines().enumerate() {
        let line_no = lineno + 1;
        let line = line.map_err(|e| DataError::Malformed {
            line: line_no,
            msg: e.to_string(),
        })?;
        let content = line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut tokens = content.split_whitespace();
        let label_tok = tokens.next().unwrap_or_default();
        let label: f64 = label_tok.parse().map_err(|_| DataError::Malformed {
            line: line_no,
            msg: format!("bad label {label_tok:?}"),
        })?;
        if !label.is_finite() {
            return Err(DataError::Malformed {
                line: line_no,
                msg: format!("bad label {label_tok:?}"),
            });
        }

        let mut row = Vec::new();
        for tok in tokens {
            if tok.starts_with("qid:") {
                continue;
            }
            let (k, v) = tok.split_once(':').ok_or_else(|| DataError::Malformed {
                line: line_no,
                msg: format!("expected idx:val, got {tok:?}"),
            })?;
            let k: u64 = k.parse().map_err(|_| DataError::Malformed {
                line: line_no,
                msg: format!("bad index in {tok:?}"),
            })?;
            let v: f64 = v.parse().map_err(|_| DataError::Malformed {
                line: line_no,
                msg: format!("bad value in {tok:?}"),
            })?;
            if !v.is_finite() {
                return Err(DataError::Malformed {
                    line: line_no,
                    msg: format!("non-finite value in {tok:?}"),
                });
            }
            let limit = n_features.map_or(u32::MAX as u64, |d| d as u64);
            if k >= limit {
                return Err(DataError::IndexOverflow {
                    line: line_no,
                    index: k,
                    dim: n_features.unwrap_or(u32::MAX as usize),
                });
            }
            row.push((k as usize, v));
        }
        row.sort_by_key(|&(k, _)| k);
        if row.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(DataError::Malformed {
                line: line_no,
                msg: "duplicate feature index".into(),
            });
        }
        if let Some(&(k, _)) = row.last() {
            max_index = Some(max_index.map_or(k, |m| m.max(k)));
        }
        raw_labels.push(label);
        label_text.push(label_tok.to_string());
        rows.push(row);
    }

    let labels = map_labels(&raw_labels, &label_text)?;
    let dim = n_features.unwrap_or_else(|| max_index.map_or(0, |m| m + 1));
    SparseDataset::new(dim, rows, labels)
}

/// {0,1} is kept, {-1,+1} maps -1 to 0, any other pair of distinct values
/// maps the smaller to 0 and the larger to 1 (covers {1,2} and {2,4}).
fn map_labels(raw: &[f64], text: &[String]) -> Result<Vec<u8>, DataError> {
    let mut distinct: Vec<f64> = Vec::new();
    for &y in raw {
        if !distinct.contains(&y) {
            distinct.push(y);
            if distinct.len() > 2 {
                let set: BTreeSet<String> = text.iter().cloned().collect();
                return Err(DataError::NonBinaryLabels(set.into_iter().collect()));
            }
        }
    }
    let in_set = |allowed: &[f64]| distinct.iter().all(|y| allowed.contains(y));
    let map: Box<dyn Fn(f64) -> u8> = if in_set(&[0.0, 1.0]) {
        Box::new(|y| y as u8)
    } else if in_set(&[-1.0, 1.0]) {
        Box::new(|y| u8::from(y > 0.0))
    } else if distinct.len() == 2 {
        let lo = distinct[0].min(distinct[1]);
        Box::new(move |y| u8::from(y != lo))
    } else {
        let set: BTreeSet<String> = text.iter().cloned().collect();
        return Err(DataError::NonBinaryLabels(set.into_iter().collect()));
    };
    Ok(raw.iter().map(|&y| map(y)).collect())
}

/// Reads a libsvm file; `.gz` files are decompressed transparently.
pub fn load_libsvm(
    path: impl AsRef<Path>,
    n_features: Option<usize>,
) -> Result<SparseDataset, DataError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| DataError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let gz = path.extension().is_some_and(|e| e == "gz");
    if gz {
        parse_libsvm(BufReader::new(GzDecoder::new(file)), n_features)
    } else {
        parse_libsvm(BufReader::new(file), n_features)
    }
}

/// Fractions of the whole dataset sent to validation and test; the rest is
/// training data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitSpec {
    pub va_fraction: f64,
    pub te_fraction: f64,
    pub seed: u64,
}

impl SplitSpec {
    pub fn new(va_fraction: f64, te_fraction: f64, seed: u64) -> Result<Self, DataError> {
        let spec = Self {
            va_fraction,
            te_fraction,
            seed,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), DataError> {
        let Self {
            va_fraction: va,
            te_fraction: te,
            ..
        } = *self;
        if !(va > 0.0 && va < 1.0) {
            return Err(DataError::InvalidSplit(format!(
                "va_fraction {va} not in (0,1)"
            )));
        }
        if !(0.0..1.0).contains(&te) {
            return Err(DataError::InvalidSplit(format!(
                "te_fraction {te} not in [0,1)"
            )));
        }
        if va + te >= 1.0 {
            return Err(DataError::InvalidSplit(format!(
                "va_fraction + te_fraction = {} must be < 1",
                va + te
            )));
        }
        Ok(())
    }
}

/// Three-way stratified split into (train, validation, test).
///
/// Split sizes are `round(fraction * n)`; each split's positive count is its
/// proportional share of the positives, rounded by largest remainder, which
/// keeps every split's positive fraction within `1/len(split)` of the
/// dataset's. Rows keep their original relative order.
pub fn split(
    ds: &SparseDataset,
    spec: &SplitSpec,
) -> Result<(SparseDataset, SparseDataset, SparseDataset), DataError> {
    spec.validate()?;
    let n = ds.n_rows();
    if n < 3 {
        return Err(DataError::InvalidSplit(format!(
            "need at least 3 rows, got {n}"
        )));
    }
    let n_va = round_half_up(spec.va_fraction * n as f64);
    let n_te = round_half_up(spec.te_fraction * n as f64);
    if n_va + n_te >= n {
        return Err(DataError::InvalidSplit(
            "training split would be empty".into(),
        ));
    }
    let sizes = [n - n_va - n_te, n_va, n_te];

    let n_pos = ds.n_positive();
    let pos_quota = largest_remainder(&sizes, n_pos, n);

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut pos: Vec<usize> = (0..n).filter(|&i| ds.label(i) == 1).collect();
    let mut neg: Vec<usize> = (0..n).filter(|&i| ds.label(i) == 0).collect();
    pos.shuffle(&mut rng);
    neg.shuffle(&mut rng);

    let names = ["training", "validation", "test"];
    let mut parts: Vec<Vec<usize>> = Vec::with_capacity(3);
    let (mut p_off, mut n_off) = (0, 0);
    for s in 0..3 {
        let p = pos_quota[s];
        let q = sizes[s] - p;
        if sizes[s] > 0 && (p == 0 || q == 0) {
            return Err(DataError::InvalidSplit(format!(
                "{} split would receive no rows of one class",
                names[s]
            )));
        }
        let mut idx: Vec<usize> = pos[p_off..p_off + p]
            .iter()
            .chain(&neg[n_off..n_off + q])
            .copied()
            .collect();
        idx.sort_unstable();
        p_off += p;
        n_off += q;
        parts.push(idx);
    }
    Ok((
        ds.subset(&parts[0]),
        ds.subset(&parts[1]),
        ds.subset(&parts[2]),
    ))
}

/// Apportions `total` items across bins proportionally to `sizes` (whose sum
/// is `n`), floor first then remainders by descending fraction, ties to the
/// earlier bin. Never exceeds a bin's size.
fn largest_remainder(sizes: &[usize], total: usize, n: usize) -> Vec<usize> {
    let ideal: Vec<f64> = sizes
        .iter()
        .map(|&s| s as f64 * total as f64 / n as f64)
        .collect();
    let mut quota: Vec<usize> = ideal.iter().map(|x| x.floor() as usize).collect();
    let mut left = total - quota.iter().sum::<usize>();
    let mut order: Vec<usize> = (0..sizes.len()).collect();
    order.sort_by(|&a, &b| {
        let fa = ideal[a] - ideal[a].floor();
        let fb = ideal[b] - ideal[b].floor();
        fb.total_cmp(&fa).then(a.cmp(&b))
    });
    for &b in order.iter().cycle().take(sizes.len() * 2) {
        if left == 0 {
            break;
        }
        if quota[b] < sizes[b] {
            quota[b] += 1;
            left -= 1;
        }
    }
    quota
}

pub(crate) fn round_half_up(x: f64) -> usize {
    // guards against 0.95 * 60 = 56.99999999999999
    (x + 0.5 + 1e-9).floor().max(0.0) as usize
}

/// Toggles exactly `round(fraction * n)` labels chosen uniformly without
/// replacement. The same `(fraction, seed)` picks the same rows, so applying
/// it twice restores the input.
pub fn flip_labels(
    ds: &SparseDataset,
    fraction: f64,
    seed: u64,
) -> Result<SparseDataset, DataError> {
    if !(0.0..=1.0).contains(&fraction) {
        return Err(DataError::Invalid(format!(
            "flip fraction {fraction} not in [0,1]"
        )));
    }
    let n = ds.n_rows();
    let k = round_half_up(fraction * n as f64).min(n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut labels = ds.labels().to_vec();
    for i in index::sample(&mut rng, n, k) {
        labels[i] ^= 1;
    }
    ds.with_labels(labels)
}
