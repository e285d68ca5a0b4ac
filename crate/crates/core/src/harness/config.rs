use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optim::{OptimizerConfig, StopCriterion};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ArchitectureSpec {
    /// ReLU hidden layers, softmax output, cross-entropy loss.
    Classifier { sizes: Vec<usize> },
    /// Mirrored sigmoid encoder/decoder with a linear code layer, BCE loss.
    Autoencoder { encoder: Vec<usize> },
}

impl ArchitectureSpec {
    pub fn input_dim(&self) -> usize {
        match self {
            ArchitectureSpec::Classifier { sizes } => sizes.first().copied().unwrap_or(0),
            ArchitectureSpec::Autoencoder { encoder } => encoder.first().copied().unwrap_or(0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DatasetSpec {
    Blobs {
        n_samples: usize,
        dims: usize,
        classes: usize,
    },
    Autoencode {
        n_samples: usize,
        dims: usize,
    },
    /// Headerless CSV; with `classify`, the last column is the label.
    Csv {
        path: PathBuf,
        classify: bool,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TargetSpec {
    Saddle2d,
    Quadratic {
        n: usize,
    },
    Cubic {
        n: usize,
    },
    Network {
        architecture: ArchitectureSpec,
        dataset: DatasetSpec,
        batch_size: usize,
        #[serde(default)]
        weight_decay: f64,
    },
}

impl TargetSpec {
    pub fn is_network(&self) -> bool {
        matches!(self, TargetSpec::Network { .. })
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        match self {
            TargetSpec::Saddle2d => Ok(()),
            TargetSpec::Quadratic { n } if *n < 2 => bad(format!("quadratic target needs n >= 2, got {n}")),
            TargetSpec::Cubic { n } if *n < 1 => bad("cubic target needs n >= 1".into()),
            TargetSpec::Quadratic { .. } | TargetSpec::Cubic { .. } => Ok(()),
            TargetSpec::Network { architecture, dataset, batch_size, weight_decay } => {
                if *batch_size == 0 {
                    return bad("batch_size must be positive".into());
                }
                if !(*weight_decay >= 0.0 && weight_decay.is_finite()) {
                    return bad(format!("weight_decay must be >= 0, got {weight_decay}"));
                }
                let dims = match dataset {
                    DatasetSpec::Blobs { dims, .. } | DatasetSpec::Autoencode { dims, .. } => Some(*dims),
                    DatasetSpec::Csv { .. } => None,
                };
                if let Some(d) = dims {
                    if d != architecture.input_dim() {
                        return bad(format!(
                            "dataset has {d} dims but the network expects {}",
                            architecture.input_dim()
                        ));
                    }
                }
                match (architecture, dataset) {
                    (ArchitectureSpec::Classifier { .. }, DatasetSpec::Autoencode { .. })
                    | (ArchitectureSpec::Classifier { .. }, DatasetSpec::Csv { classify: false, .. })
                    | (ArchitectureSpec::Autoencoder { .. }, DatasetSpec::Blobs { .. })
                    | (ArchitectureSpec::Autoencoder { .. }, DatasetSpec::Csv { classify: true, .. }) => {
                        bad("architecture and dataset disagree on the task".into())
                    }
                    _ => Ok(()),
                }
            }
        }
    }
}

fn default_trace_every() -> u64 {
    1
}

/// One optimizer on one target: everything needed to reproduce a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub id: String,
    pub seed: u64,
    pub target: TargetSpec,
    pub optimizer: OptimizerConfig,
    pub stop: StopCriterion,
    #[serde(default)]
    pub max_iters: Option<u64>,
    #[serde(default)]
    pub epochs: Option<u64>,
    #[serde(default = "default_trace_every")]
    pub trace_every: u64,
    /// Initial parameters for landscape targets; the landscape default if absent.
    #[serde(default)]
    pub start: Option<Vec<f64>>,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let ctx = |e: Error| Error::InvalidConfig(format!("{}: {e}", self.id));
        self.target.validate().map_err(ctx)?;
        self.optimizer.validate().map_err(ctx)?;
        self.stop.validate().map_err(ctx)?;
        if self.trace_every == 0 {
            return Err(ctx(Error::invalid("trace_every must be >= 1")));
        }
        match (self.max_iters, self.epochs) {
            (Some(0), _) | (_, Some(0)) => Err(ctx(Error::invalid("max_iters and epochs must be positive"))),
            (None, None) => Err(ctx(Error::invalid("set max_iters or epochs"))),
            (None, Some(_)) if !self.target.is_network() => {
                Err(ctx(Error::invalid("epochs only apply to network targets; set max_iters")))
            }
            _ => Ok(()),
        }
    }
}

/// The on-disk config format: a shared target and run settings plus the
/// list of optimizers to race on it. Sweep configs also carry `zeta_values`
/// and exactly one ADINE optimizer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RaceFile {
    pub id: String,
    #[serde(default)]
    pub seed: u64,
    pub target: TargetSpec,
    pub stop: StopCriterion,
    #[serde(default)]
    pub max_iters: Option<u64>,
    #[serde(default)]
    pub epochs: Option<u64>,
    #[serde(default = "default_trace_every")]
    pub trace_every: u64,
    #[serde(default)]
    pub start: Option<Vec<f64>>,
    pub optimizers: Vec<OptimizerConfig>,
    #[serde(default)]
    pub zeta_values: Option<Vec<f64>>,
    #[serde(default)]
    pub description: Option<String>,
}

impl RaceFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|source| Error::Json { path: path.to_path_buf(), source })
    }

    /// One [`ExperimentConfig`] per optimizer, ids `<race id>-<index>-<method>`.
    pub fn experiments(&self) -> Result<Vec<ExperimentConfig>> {
        if self.optimizers.is_empty() {
            return Err(Error::InvalidConfig(format!("{}: no optimizers listed", self.id)));
        }
        let cfgs: Vec<_> = self
            .optimizers
            .iter()
            .enumerate()
            .map(|(i, opt)| ExperimentConfig {
                id: format!("{}-{:02}-{}", self.id, i, run_slug(opt)),
                seed: self.seed,
                target: self.target.clone(),
                optimizer: *opt,
                stop: self.stop,
                max_iters: self.max_iters,
                epochs: self.epochs,
                trace_every: self.trace_every,
                start: self.start.clone(),
            })
            .collect();
        for c in &cfgs {
            c.validate()?;
        }
        Ok(cfgs)
    }
}

fn run_slug(opt: &OptimizerConfig) -> String {
    let raw = match opt {
        OptimizerConfig::Cm { m, .. } => format!("cm-m{m}"),
        OptimizerConfig::Nag { m, .. } => format!("nag-m{m}"),
        OptimizerConfig::NagScheduled { .. } => "nag-scheduled".to_string(),
        OptimizerConfig::Adine(c) => format!("adine-z{}", c.zeta),
    };
    raw.replace('.', "_")
}

#[cfg(test)]
mod tests {
    use super::*;

    const TABLE1: &str = r#"{
        "id": "t1",
        "target": {"kind": "saddle2d"},
        "stop": {"kind": "loss_below", "threshold": -10},
        "max_iters": 1000,
        "optimizers": [
            {"method": "cm", "eta": 0.01, "m": 0.9},
            {"method": "nag", "eta": 0.01, "m": 1.1},
            {"method": "adine", "eta": 0.01, "zeta": 1.1}
        ]
    }"#;

    #[test]
    fn parses_and_expands() {
        let f: RaceFile = serde_json::from_str(TABLE1).unwrap();
        let cfgs = f.experiments().unwrap();
        assert_eq!(cfgs.len(), 3);
        assert_eq!(cfgs[0].id, "t1-00-cm-m0_9");
        assert_eq!(cfgs[1].id, "t1-01-nag-m1_1");
        let adine = cfgs[2].optimizer.as_adine().unwrap();
        assert_eq!((adine.m_s, adine.m_g), (0.9, 1.0001));
    }

    #[test]
    fn rejects_bad_configs() {
        let mut f: RaceFile = serde_json::from_str(TABLE1).unwrap();
        f.max_iters = None;
        assert!(f.experiments().is_err());

        let mut f: RaceFile = serde_json::from_str(TABLE1).unwrap();
        f.optimizers = vec![OptimizerConfig::Cm { eta: -1.0, m: 0.9 }];
        assert!(f.experiments().is_err());

        let mut f: RaceFile = serde_json::from_str(TABLE1).unwrap();
        f.target = TargetSpec::Quadratic { n: 1 };
        assert!(f.experiments().is_err());

        let unknown = TABLE1.replace("\"max_iters\"", "\"max_iter\"");
        assert!(serde_json::from_str::<RaceFile>(&unknown).is_err());
    }

    #[test]
    fn network_dims_must_agree() {
        let t = TargetSpec::Network {
            architecture: ArchitectureSpec::Classifier { sizes: vec![8, 4, 3] },
            dataset: DatasetSpec::Blobs { n_samples: 64, dims: 9, classes: 3 },
            batch_size: 8,
            weight_decay: 0.0,
        };
        assert!(t.validate().is_err());
    }
}
