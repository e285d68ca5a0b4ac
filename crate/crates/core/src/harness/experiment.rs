use super::config::{ArchitectureSpec, DatasetSpec, ExperimentConfig, TargetSpec};
use super::summary::{SummaryRow, SummaryTable, SweepRow, SweepTable};
use crate::error::{Error, Result};
use crate::landscape::{sample_cubic, sample_quadratic, Landscape};
use crate::nn::{autoencoder_layers, classifier_layers, make_desk_dataset, Dataset, DeskKind, LossKind, Network};
use crate::optim::{run_with, OptimizerConfig, RunSettings};
use crate::rng::{Rng, Stream};
use crate::trace::RunTrace;
use crate::vector::{check_dims, ParamVector};

/// A constructed objective, shared read-only by every run of a race.
#[derive(Debug, Clone)]
pub enum BuiltTarget {
    Landscape(Landscape),
    Network { net: Network, data: Dataset },
}

impl BuiltTarget {
    pub fn steps_per_epoch(&self) -> Option<usize> {
        match self {
            BuiltTarget::Network { data, .. } => Some(data.batches_per_epoch()),
            BuiltTarget::Landscape(_) => None,
        }
    }
}

/// Builds the objective. Each random ingredient (landscape coefficients,
/// dataset, initial weights, batch order) draws from its own stream of `seed`.
pub fn build_target(spec: &TargetSpec, seed: u64) -> Result<BuiltTarget> {
    let mut rng = Rng::with_stream(seed, Stream::Landscape);
    Ok(match spec {
        TargetSpec::Saddle2d => BuiltTarget::Landscape(Landscape::Saddle2D),
        TargetSpec::Quadratic { n } => BuiltTarget::Landscape(Landscape::Quadratic(sample_quadratic(*n, &mut rng)?)),
        TargetSpec::Cubic { n } => BuiltTarget::Landscape(Landscape::Cubic(sample_cubic(*n, &mut rng)?)),
        TargetSpec::Network { architecture, dataset, batch_size, weight_decay } => {
            let mut data_rng = Rng::with_stream(seed, Stream::Dataset);
            let data = match dataset {
                DatasetSpec::Blobs { n_samples, dims, classes } => make_desk_dataset(
                    DeskKind::BlobsClassify { classes: *classes },
                    *n_samples,
                    *dims,
                    *batch_size,
                    &mut data_rng,
                )?,
                DatasetSpec::Autoencode { n_samples, dims } => {
                    make_desk_dataset(DeskKind::Autoencode, *n_samples, *dims, *batch_size, &mut data_rng)?
                }
                DatasetSpec::Csv { path, classify } => Dataset::read_csv(path, *classify, *batch_size, seed)?,
            };
            let (layers, loss) = match architecture {
                ArchitectureSpec::Classifier { sizes } => (classifier_layers(sizes)?, LossKind::CrossEntropy),
                ArchitectureSpec::Autoencoder { encoder } => {
                    (autoencoder_layers(encoder)?, LossKind::BinaryCrossEntropy)
                }
            };
            let net = Network::init(layers, loss, *weight_decay, &mut Rng::with_stream(seed, Stream::Init))?;
            if net.input_dim() != data.input_dim() {
                return Err(Error::InvalidConfig(format!(
                    "dataset has {} features but the network expects {}",
                    data.input_dim(),
                    net.input_dim()
                )));
            }
            if let crate::nn::Task::Classify { classes, .. } = data.task() {
                if *classes > net.output_dim() {
                    return Err(Error::InvalidConfig(format!(
                        "dataset has {classes} classes but the network has {} outputs",
                        net.output_dim()
                    )));
                }
            }
            BuiltTarget::Network { net, data }
        }
    })
}

fn run_on_target(cfg: &ExperimentConfig, target: &BuiltTarget) -> Result<(RunTrace, ParamVector)> {
    let mut settings = RunSettings {
        config_id: cfg.id.clone(),
        stop: cfg.stop,
        max_iters: cfg.max_iters.unwrap_or(u64::MAX),
        trace_every: cfg.trace_every,
    };
    let out = match target {
        BuiltTarget::Landscape(l) => {
            let theta_0 = match &cfg.start {
                Some(s) => ParamVector::new(s.clone())?,
                None => l.default_start()?,
            };
            check_dims(crate::Objective::dim(l), theta_0.dim())
                .map_err(|e| Error::InvalidConfig(format!("{}: start point: {e}", cfg.id)))?;
            let mut obj = l.clone();
            run_with(&cfg.optimizer, &mut obj, &theta_0, &settings)?
        }
        BuiltTarget::Network { net, data } => {
            if let Some(epochs) = cfg.epochs {
                let per_epoch = data.batches_per_epoch() as u64;
                settings.max_iters = settings.max_iters.min(epochs.saturating_mul(per_epoch));
            }
            let mut obj = net.as_objective(data)?;
            run_with(&cfg.optimizer, &mut obj, net.params(), &settings)?
        }
    };
    Ok((out.trace, out.theta))
}

/// Runs one experiment from scratch.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunTrace> {
    cfg.validate()?;
    let target = build_target(&cfg.target, cfg.seed)?;
    run_on_target(cfg, &target).map(|(t, _)| t)
}

#[derive(Debug, Clone)]
pub struct RaceResult {
    pub table: SummaryTable,
    pub traces: Vec<RunTrace>,
    pub steps_per_epoch: Option<usize>,
}

/// Runs every config on one shared target, in order.
///
/// All configs must agree on target, seed, start point, stop criterion and
/// run length, so every optimizer sees the same objective, initial
/// parameters and batch sequence.
pub fn run_race(cfgs: &[ExperimentConfig]) -> Result<RaceResult> {
    let first = cfgs.first().ok_or_else(|| Error::InvalidConfig("empty race".into()))?;
    for c in cfgs {
        c.validate()?;
        if c.target != first.target
            || c.seed != first.seed
            || c.start != first.start
            || c.stop != first.stop
            || c.max_iters != first.max_iters
            || c.epochs != first.epochs
        {
            return Err(Error::InvalidConfig(format!(
                "{} does not share target, seed, start, stop and length with {}",
                c.id, first.id
            )));
        }
    }
    let target = build_target(&first.target, first.seed)?;
    let mut rows = Vec::with_capacity(cfgs.len());
    let mut traces = Vec::with_capacity(cfgs.len());
    for c in cfgs {
        let (trace, _) = run_on_target(c, &target)?;
        rows.push(SummaryRow::from_trace(&c.optimizer, &trace, c.stop));
        traces.push(trace);
    }
    Ok(RaceResult { table: SummaryTable { rows }, traces, steps_per_epoch: target.steps_per_epoch() })
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub table: SweepTable,
    pub traces: Vec<RunTrace>,
}

/// One run per `zeta`, otherwise identical to `base`.
pub fn zeta_sweep(base: &ExperimentConfig, zeta_values: &[f64]) -> Result<SweepResult> {
    let adine = *base
        .optimizer
        .as_adine()
        .ok_or_else(|| Error::InvalidConfig(format!("{}: a zeta sweep needs an ADINE optimizer", base.id)))?;
    if zeta_values.is_empty() {
        return Err(Error::InvalidConfig("no zeta values given".into()));
    }
    if let Some(z) = zeta_values.iter().find(|z| !(**z > 0.0 && z.is_finite())) {
        return Err(Error::InvalidConfig(format!("zeta must be positive and finite, got {z}")));
    }
    let cfgs: Vec<ExperimentConfig> = zeta_values
        .iter()
        .map(|&zeta| ExperimentConfig {
            id: format!("{}-zeta{}", base.id, zeta).replace('.', "_"),
            optimizer: OptimizerConfig::Adine(crate::optim::AdineConfig { zeta, ..adine }),
            ..base.clone()
        })
        .collect();
    let race = run_race(&cfgs)?;
    let rows = zeta_values
        .iter()
        .zip(&race.traces)
        .map(|(&zeta, trace)| SweepRow::from_trace(zeta, adine.m_g, trace, base.stop))
        .collect();
    Ok(SweepResult { table: SweepTable { rows }, traces: race.traces })
}

/// Steps until the epoch-mean training loss first drops to `target_loss` or
/// below, counted in whole epochs.
pub fn steps_to_reach(trace: &RunTrace, target_loss: f64, steps_per_epoch: usize) -> Option<u64> {
    trace
        .epoch_mean_losses(steps_per_epoch)
        .iter()
        .position(|&l| l <= target_loss)
        .map(|e| ((e + 1) * steps_per_epoch) as u64)
}
