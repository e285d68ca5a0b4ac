//! Seeded property checks behind the `selftest` subcommand.

use crate::error::Result;
use crate::gradcheck::{central_difference, max_relative_error};
use crate::landscape::{near_saddle_start, sample_cubic, sample_quadratic};
use crate::nn::{autoencoder_layers, classifier_layers, Activation, Batch, BatchTargets, LossKind, Network};
use crate::objective::Objective;
use crate::optim::{
    cm_step, cm_telescoped_position, nesterov_momentum, polyak_optimal_params, wsl_closed_form, wsl_update,
    AdineConfig, FixedMomentumConfig, NesterovSchedule, Optimizer, OptimizerConfig, StopCriterion,
};
use crate::rng::Rng;
use crate::vector::ParamVector;

const SEED: u64 = 0x5e1f_7e57;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl std::fmt::Display for CheckResult {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{tag} {}: {}", self.name, self.detail)
    }
}

fn check(name: &'static str, body: impl FnOnce() -> Result<(bool, String)>) -> CheckResult {
    match body() {
        Ok((passed, detail)) => CheckResult { name, passed, detail },
        Err(e) => CheckResult { name, passed: false, detail: format!("error: {e}") },
    }
}

pub fn run_selftest() -> Vec<CheckResult> {
    vec![
        check("wsl_fold_matches_closed_form", wsl_fold),
        check("wsl_all_ones", wsl_ones),
        check("cm_telescoping", telescoping),
        check("nesterov_schedule", schedule),
        check("polyak_parameters", polyak),
        check("landscape_gradients", landscape_grads),
        check("network_gradients", network_grads),
        check("softmax_rows_sum_to_one", softmax_rows),
        check("weight_decay_skips_biases", decay_mask),
        check("adine_equal_momenta_is_nag", adine_degenerate),
        check("runs_are_deterministic", determinism),
    ]
}

fn wsl_fold() -> Result<(bool, String)> {
    let mut rng = Rng::new(SEED);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let len = 1 + rng.below(64) as usize;
        let seq: Vec<f64> = (0..len).map(|_| rng.uniform(0.0, 10.0)).collect();
        let folded = seq.iter().fold(0.0, |w, &l| wsl_update(w, l));
        worst = worst.max((folded - wsl_closed_form(&seq)).abs());
    }
    Ok((worst <= 1e-12, format!("max gap {worst:.3e}")))
}

fn wsl_ones() -> Result<(bool, String)> {
    let worst = (1..=64)
        .map(|k| {
            let folded = (0..k).fold(0.0, |w, _| wsl_update(w, 1.0));
            (folded - (1.0 - 0.5f64.powi(k))).abs()
        })
        .fold(0.0, f64::max);
    Ok((worst <= 1e-15, format!("max gap {worst:.3e}")))
}

fn telescoping() -> Result<(bool, String)> {
    let q = sample_quadratic(50, &mut Rng::new(SEED))?;
    let opt = FixedMomentumConfig::cm(0.001, 0.9);
    let theta_0 = near_saddle_start(50)?;
    let mut theta = theta_0.clone();
    let mut state = opt.init_state(50)?;
    let mut grads = Vec::new();
    let mut prev = theta.clone();
    for _ in 0..100 {
        grads.push(q.grad(&theta)?);
        let out = cm_step(&state, &opt, &q, &theta)?;
        prev = std::mem::replace(&mut theta, out.theta);
        state = out.state;
    }
    let closed = cm_telescoped_position(&theta_0, &grads, 0.9, 0.001, &prev)?;
    let gap = closed.max_abs_diff(&theta)?;
    Ok((gap <= 1e-8, format!("max-norm gap {gap:.3e}")))
}

fn schedule() -> Result<(bool, String)> {
    let mut s = NesterovSchedule::new();
    let mut max_m: f64 = 0.0;
    let mut gaps = Vec::new();
    for t in 0..=10_000u64 {
        let (m, next) = nesterov_momentum(s);
        s = next;
        max_m = max_m.max(m);
        if t == 100 || t == 1000 {
            gaps.push((m - (t as f64 + 2.0) / (t as f64 + 5.0)).abs());
        }
    }
    let ok = max_m < 1.0 && gaps.iter().all(|g| *g < 0.002);
    let gaps: Vec<String> = gaps.iter().map(|g| format!("{g:.2e}")).collect();
    Ok((ok, format!("max m {max_m:.6}, gaps {gaps:?}")))
}

fn polyak() -> Result<(bool, String)> {
    let exact = polyak_optimal_params(1.0, 9.0)? == (0.25, 0.25);
    let mut rng = Rng::new(SEED);
    let mut in_range = true;
    for _ in 0..100 {
        let alpha = 10f64.powf(rng.uniform(-3.0, 2.0));
        let beta = alpha * 10f64.powf(rng.uniform(0.0, 4.0));
        let (_, m) = polyak_optimal_params(alpha, beta)?;
        in_range &= (0.0..1.0).contains(&m);
    }
    Ok((exact && in_range, format!("(1,9) exact: {exact}, momenta in [0,1): {in_range}")))
}

fn landscape_grads() -> Result<(bool, String)> {
    let mut rng = Rng::new(SEED);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let n = 2 + rng.below(19) as usize;
        let x = ParamVector::new((0..n).map(|_| rng.uniform(-2.0, 2.0)).collect())?;
        let q = sample_quadratic(n, &mut rng)?;
        let c = sample_cubic(n, &mut rng)?;
        for obj in [&q as &dyn Objective, &c] {
            let numeric =
                central_difference(|p| obj.eval(&ParamVector::from_raw(p.to_vec())).unwrap(), x.as_slice(), 1e-6);
            worst = worst.max(max_relative_error(obj.grad(&x)?.as_slice(), &numeric));
        }
    }
    Ok((worst < 1e-6, format!("max relative error {worst:.3e}")))
}

fn random_inputs(rng: &mut Rng, len: usize, unit: bool) -> Vec<f64> {
    (0..len).map(|_| if unit { rng.unit() } else { rng.standard_normal() }).collect()
}

fn network_grads() -> Result<(bool, String)> {
    let mut rng = Rng::new(SEED);
    let mut worst: f64 = 0.0;
    for trial in 0..6 {
        let rows = 3 + trial % 3;
        let classifier = trial % 2 == 0;
        let (layers, loss) = if classifier {
            (classifier_layers(&[5, 7, 4])?, LossKind::CrossEntropy)
        } else {
            (autoencoder_layers(&[6, 4, 2])?, LossKind::BinaryCrossEntropy)
        };
        // Random biases keep ReLU pre-activations away from the kink.
        let params = ParamVector::new(random_inputs(&mut rng, crate::nn::param_count(&layers), false))?;
        let net = Network::new(layers, loss, 1e-3, params.scale(0.7))?;
        let inputs = random_inputs(&mut rng, rows * net.input_dim(), !classifier);
        let labels: Vec<usize> = (0..rows).map(|_| rng.below(4) as usize).collect();
        let targets = if classifier { BatchTargets::Labels(&labels) } else { BatchTargets::Dense(&inputs) };
        let batch = Batch { inputs: &inputs, targets, rows };
        let (_, grad) = net.loss_and_grad(&batch)?;
        let numeric = central_difference(|p| net.loss_at(p, &batch).unwrap(), net.params().as_slice(), 1e-5);
        worst = worst.max(max_relative_error(grad.as_slice(), &numeric));
    }
    Ok((worst < 1e-5, format!("max relative error {worst:.3e}")))
}

fn softmax_rows() -> Result<(bool, String)> {
    let mut rng = Rng::new(SEED);
    let net = Network::init(classifier_layers(&[8, 16, 10])?, LossKind::CrossEntropy, 0.0, &mut rng)?;
    let rows = 20;
    let inputs: Vec<f64> = random_inputs(&mut rng, rows * 8, false).iter().map(|x| 30.0 * x).collect();
    let pass = net.forward(&inputs, rows)?;
    let worst = pass.outputs().chunks(10).map(|r| (r.iter().sum::<f64>() - 1.0).abs()).fold(0.0, f64::max);
    let in_range = pass.outputs().iter().all(|p| (0.0..=1.0).contains(p));
    Ok((worst < 1e-12 && in_range, format!("max row-sum gap {worst:.3e}")))
}

fn decay_mask() -> Result<(bool, String)> {
    let mut rng = Rng::new(SEED);
    let layers = classifier_layers(&[4, 5, 3])?;
    let params = ParamVector::new(random_inputs(&mut rng, crate::nn::param_count(&layers), false))?;
    let inputs = random_inputs(&mut rng, 2 * 4, false);
    let labels = [0usize, 2];
    let batch = Batch { inputs: &inputs, targets: BatchTargets::Labels(&labels), rows: 2 };
    let plain = Network::new(layers.clone(), LossKind::CrossEntropy, 0.0, params.clone())?;
    let decayed = Network::new(layers, LossKind::CrossEntropy, 0.1, params.clone())?;
    let (_, g0) = plain.loss_and_grad(&batch)?;
    let (_, g1) = decayed.loss_and_grad(&batch)?;
    let mask = plain.weight_mask();
    let worst = (0..params.dim()).map(|i| (g1[i] - g0[i] - 0.1 * mask[i] * params[i]).abs()).fold(0.0, f64::max);
    let act_ok = plain.layers().last().map(|l| l.activation) == Some(Activation::Softmax);
    Ok((worst < 1e-12 && act_ok, format!("max deviation {worst:.3e}")))
}

fn adine_degenerate() -> Result<(bool, String)> {
    let q = sample_quadratic(20, &mut Rng::new(SEED))?;
    let theta_0 = near_saddle_start(20)?;
    let nag = OptimizerConfig::Nag { eta: 0.001, m: 0.9 };
    let adine = OptimizerConfig::Adine(AdineConfig::relaxed(0.001, 0.9, 0.9, 1.1)?);
    let stop = StopCriterion::MaxItersOnly;
    let a = crate::optim::run_until(&nag, &mut q.clone(), &theta_0, stop, 500)?;
    let b = crate::optim::run_until(&adine, &mut q.clone(), &theta_0, stop, 500)?;
    let same = a.losses().iter().zip(b.losses()).all(|(x, y)| x.to_bits() == y.to_bits());
    Ok((same && a.records.len() == b.records.len(), format!("{} steps compared", a.records.len())))
}

fn determinism() -> Result<(bool, String)> {
    let cfg = super::ExperimentConfig {
        id: "selftest".into(),
        seed: SEED,
        target: super::TargetSpec::Cubic { n: 30 },
        optimizer: OptimizerConfig::Adine(AdineConfig::with_zeta(0.001, 1.1)?),
        stop: StopCriterion::LossBelow { threshold: -8.0 },
        max_iters: Some(5000),
        epochs: None,
        trace_every: 1,
        start: Some(near_saddle_start(30)?.into_vec()),
    };
    let a = super::run_experiment(&cfg)?;
    let b = super::run_experiment(&cfg)?;
    Ok((a == b, format!("{} steps, {}", a.steps, a.terminal_reason)))
}

#[cfg(test)]
mod tests {
    #[test]
    fn every_check_passes() {
        for r in super::run_selftest() {
            assert!(r.passed, "{r}");
        }
    }
}
