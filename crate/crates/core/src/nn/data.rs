use std::path::Path;

use super::{Batch, BatchTargets};
use crate::error::{Error, Result};
use crate::rng::{Rng, Stream};

/// Expected distance between two blob centers, in units of the per-dimension
/// noise standard deviation.
pub const BLOB_SEPARATION: f64 = 3.4;

#[derive(Debug, Clone, PartialEq)]
pub enum Task {
    Classify {
        labels: Vec<usize>,
        classes: usize,
    },
    /// Every sample is its own target.
    Autoencode,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeskKind {
    BlobsClassify { classes: usize },
    Autoencode,
}

/// Samples stored row-major, with their targets and batching settings.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    inputs: Vec<f64>,
    input_dim: usize,
    task: Task,
    batch_size: usize,
    shuffle_seed: u64,
}

impl Dataset {
    pub fn new(inputs: Vec<f64>, input_dim: usize, task: Task, batch_size: usize, shuffle_seed: u64) -> Result<Self> {
        if input_dim == 0 || inputs.is_empty() || !inputs.len().is_multiple_of(input_dim) {
            return Err(Error::invalid("inputs must be a non-empty whole number of rows"));
        }
        if batch_size == 0 {
            return Err(Error::invalid("batch size must be positive"));
        }
        let n = inputs.len() / input_dim;
        if let Task::Classify { labels, classes } = &task {
            if labels.len() != n {
                return Err(Error::invalid(format!("{} labels for {n} samples", labels.len())));
            }
            if let Some(&bad) = labels.iter().find(|&&l| l >= *classes) {
                return Err(Error::invalid(format!("label {bad} out of range for {classes} classes")));
            }
        }
        if let Some(i) = inputs.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index: i, value: inputs[i] });
        }
        Ok(Self { inputs, input_dim, task, batch_size, shuffle_seed })
    }

    pub fn len(&self) -> usize {
        self.inputs.len() / self.input_dim
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn task(&self) -> &Task {
        &self.task
    }

    pub fn batch_size(&self) -> usize {
        self.batch_size
    }

    pub fn shuffle_seed(&self) -> u64 {
        self.shuffle_seed
    }

    pub fn with_batching(mut self, batch_size: usize, shuffle_seed: u64) -> Result<Self> {
        if batch_size == 0 {
            return Err(Error::invalid("batch size must be positive"));
        }
        self.batch_size = batch_size;
        self.shuffle_seed = shuffle_seed;
        Ok(self)
    }

    /// Mini-batches per epoch; the last one may be partial.
    pub fn batches_per_epoch(&self) -> usize {
        self.len().div_ceil(self.batch_size)
    }

    pub fn inputs(&self) -> &[f64] {
        &self.inputs
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.inputs[i * self.input_dim..(i + 1) * self.input_dim]
    }

    /// Copies the given samples into contiguous buffers.
    pub fn gather(&self, indices: &[usize]) -> OwnedBatch {
        let mut inputs = Vec::with_capacity(indices.len() * self.input_dim);
        for &i in indices {
            inputs.extend_from_slice(self.row(i));
        }
        let labels = match &self.task {
            Task::Classify { labels, .. } => indices.iter().map(|&i| labels[i]).collect(),
            Task::Autoencode => Vec::new(),
        };
        OwnedBatch { inputs, labels, rows: indices.len(), autoencode: matches!(self.task, Task::Autoencode) }
    }

    /// The whole dataset as one batch, in storage order.
    pub fn full_batch(&self) -> OwnedBatch {
        self.gather(&(0..self.len()).collect::<Vec<_>>())
    }

    /// Writes one sample per row; classification rows end with the label.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let csv_err = |source| Error::Csv { path: path.to_path_buf(), source };
        let mut w = csv::WriterBuilder::new().has_headers(false).from_path(path).map_err(csv_err)?;
        for i in 0..self.len() {
            let mut row: Vec<String> = self.row(i).iter().map(|v| crate::fmt_real(*v)).collect();
            if let Task::Classify { labels, .. } = &self.task {
                row.push(labels[i].to_string());
            }
            w.write_record(&row).map_err(csv_err)?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }

    /// Reads a headerless CSV. With `classify`, the last column holds integer
    /// labels and the class count is one more than the largest label.
    pub fn read_csv(path: &Path, classify: bool, batch_size: usize, shuffle_seed: u64) -> Result<Self> {
        let csv_err = |source| Error::Csv { path: path.to_path_buf(), source };
        let parse_err = |message: String| Error::Parse { path: path.to_path_buf(), message };
        let mut r = csv::ReaderBuilder::new().has_headers(false).from_path(path).map_err(csv_err)?;
        let mut inputs = Vec::new();
        let mut labels = Vec::new();
        let mut width = None;
        for (line, rec) in r.records().enumerate() {
            let rec = rec.map_err(csv_err)?;
            let n_features = if classify { rec.len().saturating_sub(1) } else { rec.len() };
            if n_features == 0 {
                return Err(parse_err(format!("row {} has no features", line + 1)));
            }
            if *width.get_or_insert(n_features) != n_features {
                return Err(parse_err(format!("row {} has {n_features} features", line + 1)));
            }
            for field in rec.iter().take(n_features) {
                inputs.push(field.trim().parse::<f64>().map_err(|e| parse_err(format!("row {}: {e}", line + 1)))?);
            }
            if classify {
                let label = rec[n_features].trim();
                labels.push(
                    label.parse::<usize>().map_err(|e| parse_err(format!("row {}: label {label:?}: {e}", line + 1)))?,
                );
            }
        }
        let width = width.ok_or_else(|| parse_err("no rows".to_string()))?;
        let task = if classify {
            let classes = labels.iter().max().map_or(0, |m| m + 1);
            Task::Classify { labels, classes }
        } else {
            Task::Autoencode
        };
        Self::new(inputs, width, task, batch_size, shuffle_seed)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OwnedBatch {
    pub inputs: Vec<f64>,
    pub labels: Vec<usize>,
    pub rows: usize,
    autoencode: bool,
}

impl OwnedBatch {
    pub fn view(&self) -> Batch<'_> {
        let targets =
            if self.autoencode { BatchTargets::Dense(&self.inputs) } else { BatchTargets::Labels(&self.labels) };
        Batch { inputs: &self.inputs, targets, rows: self.rows }
    }
}

/// Small synthetic stand-ins for image feature datasets.
///
/// * Blobs: one Gaussian cluster per class, unit noise per dimension and
///   centers drawn so that two centers are [`BLOB_SEPARATION`] apart on
///   average. Labels cycle `0, 1, …, classes − 1`.
/// * Autoencode: `sigmoid(A·z)` for a random low-rank `A` and Gaussian `z`,
///   so every entry lies in `(0, 1)` and the data has structure to learn.
///
/// The returned dataset shuffles with a seed derived from `rng`'s seed.
pub fn make_desk_dataset(
    kind: DeskKind,
    n_samples: usize,
    dims: usize,
    batch_size: usize,
    rng: &mut Rng,
) -> Result<Dataset> {
    if batch_size == 0 || n_samples < 2 * batch_size {
        return Err(Error::invalid(format!(
            "need at least two batches of samples, got {n_samples} samples for batch size {batch_size}"
        )));
    }
    if dims == 0 {
        return Err(Error::invalid("dims must be positive"));
    }
    let shuffle_seed = rng.seed();
    match kind {
        DeskKind::BlobsClassify { classes } => {
            if classes < 2 {
                return Err(Error::invalid("need at least two classes"));
            }
            let scale = BLOB_SEPARATION / (2.0 * dims as f64).sqrt();
            let centers: Vec<f64> = (0..classes * dims).map(|_| scale * rng.standard_normal()).collect();
            let labels: Vec<usize> = (0..n_samples).map(|i| i % classes).collect();
            let mut inputs = Vec::with_capacity(n_samples * dims);
            for &c in &labels {
                let mu = &centers[c * dims..(c + 1) * dims];
                inputs.extend(mu.iter().map(|m| m + rng.standard_normal()));
            }
            Dataset::new(inputs, dims, Task::Classify { labels, classes }, batch_size, shuffle_seed)
        }
        DeskKind::Autoencode => {
            let rank = (dims / 8).max(2);
            let a_scale = 2.0 / (rank as f64).sqrt();
            let mixing: Vec<f64> = (0..dims * rank).map(|_| a_scale * rng.standard_normal()).collect();
            let mut inputs = Vec::with_capacity(n_samples * dims);
            for _ in 0..n_samples {
                let z: Vec<f64> = (0..rank).map(|_| rng.standard_normal()).collect();
                for row in mixing.chunks_exact(rank) {
                    let s: f64 = row.iter().zip(&z).map(|(a, b)| a * b).sum();
                    inputs.push(1.0 / (1.0 + (-s).exp()));
                }
            }
            Dataset::new(inputs, dims, Task::Autoencode, batch_size, shuffle_seed)
        }
    }
}

impl Dataset {
    /// Shuffled sample order for `epoch`, reproducible from the shuffle seed.
    pub fn epoch_order(&self, epoch: u64) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.len()).collect();
        let mut rng = Rng::with_stream(
            self.shuffle_seed.wrapping_add(epoch.wrapping_mul(0x9E37_79B9_7F4A_7C15)),
            Stream::Shuffle,
        );
        rng.shuffle(&mut order);
        order
    }
}
