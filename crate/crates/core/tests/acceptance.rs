//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use adine::gradcheck::{central_difference, max_relative_error};
use adine::harness::{build_target, run_race, steps_to_reach, zeta_sweep, BuiltTarget, RaceFile};
use adine::landscape::{near_saddle_start, sample_cubic, sample_quadratic};
use adine::nn::{autoencoder_layers, classifier_layers, param_count, Batch, BatchTargets, LossKind, Network};
use adine::optim::{
    cm_step, cm_telescoped_position, nesterov_momentum, polyak_optimal_params, run_until, wsl_closed_form, wsl_update,
    FixedMomentumConfig, NesterovSchedule,
};
use adine::{AdineConfig, Objective, Optimizer, OptimizerConfig, ParamVector, Rng, StopCriterion, TerminalReason};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn load(name: &str) -> RaceFile {
    RaceFile::load(&configs().join(name)).unwrap()
}

fn verdict(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn strictly_decreasing(xs: &[u64]) -> bool {
    xs.windows(2).all(|w| w[0] > w[1])
}

/// Iterations to threshold per optimizer, `None` for a DNF.
fn race_counts(file: &RaceFile) -> Vec<Option<u64>> {
    let race = run_race(&file.experiments().unwrap()).unwrap();
    race.traces.iter().map(|t| t.iterations_to_threshold()).collect()
}

fn table1_ordering() -> Outcome {
    let counts = race_counts(&load("table1.json"));
    let mut ok = true;
    let mut detail = Vec::new();
    for (name, half) in [("CM", &counts[..4]), ("NAG", &counts[4..])] {
        let Some(c) = half.iter().copied().collect::<Option<Vec<u64>>>() else {
            return Err(format!("{name}: DNF in {half:?}"));
        };
        let ordered = strictly_decreasing(&c);
        let halved = (c[3] as f64) < 0.5 * c[0] as f64;
        ok &= ordered && halved;
        detail.push(format!(
            "{name} m=0.9/0.95/1.0/1.1 -> {c:?}, ordered {ordered}, iter(1.1)/iter(0.9) = {:.3} (needs < 0.5)",
            c[3] as f64 / c[0] as f64
        ));
    }
    verdict(ok, detail.join("; "))
}

fn saddle_escape() -> Outcome {
    let mut ok = true;
    let mut detail = Vec::new();
    for cfg in ["fig1_quadratic_n100.json", "fig2_cubic_n100.json"] {
        for seed in [1, 2, 3] {
            let mut file = load(cfg);
            file.seed = seed;
            let counts = race_counts(&file);
            for (name, half) in [("CM", &counts[..5]), ("NAG", &counts[5..])] {
                let good = half.iter().copied().collect::<Option<Vec<u64>>>().is_some_and(|c| strictly_decreasing(&c));
                ok &= good;
                if !good || seed == 1 {
                    detail.push(format!("{} seed {seed} {name}: {half:?}", file.id));
                }
            }
        }
    }
    verdict(ok, detail.join("; "))
}

fn wsl_equivalence() -> Outcome {
    let mut rng = Rng::new(13);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let len = 1 + rng.below(64) as usize;
        let seq: Vec<f64> = (0..len).map(|_| rng.uniform(0.0, 5.0)).collect();
        let folded = seq.iter().fold(0.0, |w, &l| wsl_update(w, l));
        worst = worst.max((folded - wsl_closed_form(&seq)).abs());
    }
    let ones = (1..=64)
        .map(|k| ((0..k).fold(0.0, |w, _| wsl_update(w, 1.0)) - (1.0 - 0.5f64.powi(k))).abs())
        .fold(0.0, f64::max);
    verdict(worst <= 1e-12 && ones <= 1e-15, format!("max fold gap {worst:.2e}, all-ones gap {ones:.2e}"))
}

fn telescoping() -> Outcome {
    let q = sample_quadratic(100, &mut Rng::new(4)).unwrap();
    let opt = FixedMomentumConfig::cm(0.001, 0.9);
    let theta_0 = near_saddle_start(100).unwrap();
    let (mut theta, mut state, mut grads) = (theta_0.clone(), opt.init_state(100).unwrap(), Vec::new());
    let mut prev = theta.clone();
    for _ in 0..100 {
        grads.push(q.grad(&theta).unwrap());
        let out = cm_step(&state, &opt, &q, &theta).unwrap();
        prev = std::mem::replace(&mut theta, out.theta);
        state = out.state;
    }
    let gap = cm_telescoped_position(&theta_0, &grads, 0.9, 0.001, &prev).unwrap().max_abs_diff(&theta).unwrap();
    verdict(gap <= 1e-8, format!("max-norm gap after 100 steps {gap:.2e}"))
}

fn schedule() -> Outcome {
    let mut s = NesterovSchedule::new();
    let (mut max_m, mut gaps) = (0.0f64, Vec::new());
    for t in 0..=10_000u64 {
        let (m, next) = nesterov_momentum(s);
        s = next;
        max_m = max_m.max(m);
        if t == 100 || t == 1000 {
            gaps.push((m - (t as f64 + 2.0) / (t as f64 + 5.0)).abs());
        }
    }
    let ok = max_m < 1.0 && gaps.iter().all(|g| *g < 0.002);
    verdict(ok, format!("max m_t = {max_m:.6}, |m_t - (t+2)/(t+5)| at 100, 1000 = {:.2e}, {:.2e}", gaps[0], gaps[1]))
}

fn polyak() -> Outcome {
    let exact = polyak_optimal_params(1.0, 9.0).unwrap();
    let mut rng = Rng::new(6);
    let mut all_in = true;
    for _ in 0..100 {
        let alpha = 10f64.powf(rng.uniform(-3.0, 3.0));
        let beta = alpha * 10f64.powf(rng.uniform(0.0, 5.0));
        let (_, m) = polyak_optimal_params(alpha, beta).unwrap();
        all_in &= (0.0..1.0).contains(&m);
    }
    verdict(exact == (0.25, 0.25) && all_in, format!("(1,9) -> {exact:?}, 100 random pairs in [0,1): {all_in}"))
}

fn gradients() -> Outcome {
    let mut rng = Rng::new(8);
    let mut land: f64 = 0.0;
    for _ in 0..100 {
        let n = 2 + rng.below(30) as usize;
        let x = ParamVector::new((0..n).map(|_| rng.uniform(-2.0, 2.0)).collect()).unwrap();
        let q = sample_quadratic(n, &mut rng).unwrap();
        let c = sample_cubic(n, &mut rng).unwrap();
        for obj in [&q as &dyn Objective, &c] {
            let f = |p: &[f64]| obj.eval(&ParamVector::new(p.to_vec()).unwrap()).unwrap();
            land = land
                .max(max_relative_error(obj.grad(&x).unwrap().as_slice(), &central_difference(f, x.as_slice(), 1e-6)));
        }
    }
    let mut net_err: f64 = 0.0;
    for i in 0..10 {
        let classifier = i % 2 == 0;
        let (layers, loss) = if classifier {
            (classifier_layers(&[3, 5, 2]).unwrap(), LossKind::CrossEntropy)
        } else {
            (autoencoder_layers(&[4, 3, 2]).unwrap(), LossKind::BinaryCrossEntropy)
        };
        let params =
            ParamVector::new((0..param_count(&layers)).map(|_| 0.7 * rng.standard_normal()).collect()).unwrap();
        let net = Network::new(layers, loss, 1e-4, params).unwrap();
        let rows = 4;
        let inputs: Vec<f64> =
            (0..rows * net.input_dim()).map(|_| if classifier { rng.standard_normal() } else { rng.unit() }).collect();
        let labels: Vec<usize> = (0..rows).map(|_| rng.below(2) as usize).collect();
        let targets = if classifier { BatchTargets::Labels(&labels) } else { BatchTargets::Dense(&inputs) };
        let batch = Batch { inputs: &inputs, targets, rows };
        let (_, g) = net.loss_and_grad(&batch).unwrap();
        let numeric = central_difference(|p| net.loss_at(p, &batch).unwrap(), net.params().as_slice(), 1e-5);
        net_err = net_err.max(max_relative_error(g.as_slice(), &numeric));
    }
    verdict(land < 1e-6 && net_err < 1e-5, format!("landscapes {land:.2e} (< 1e-6), networks {net_err:.2e} (< 1e-5)"))
}

fn adine_degenerate() -> Outcome {
    let file = load("desk_speedup.json");
    let BuiltTarget::Network { net, data } = build_target(&file.target, file.seed).unwrap() else { unreachable!() };
    let steps = 5 * data.batches_per_epoch() as u64;
    let run = |opt: &OptimizerConfig| {
        let mut obj = net.as_objective(&data).unwrap();
        run_until(opt, &mut obj, net.params(), StopCriterion::MaxItersOnly, steps).unwrap()
    };
    let nag = run(&OptimizerConfig::Nag { eta: 1e-4, m: 0.9 });
    let adine = run(&OptimizerConfig::Adine(AdineConfig::relaxed(1e-4, 0.9, 0.9, 1.1).unwrap()));
    let bits = |t: &adine::RunTrace| t.losses().iter().map(|l| l.to_bits()).collect::<Vec<_>>();
    let same = bits(&nag) == bits(&adine) && nag.records.len() as u64 == steps;
    verdict(same, format!("{steps} steps, loss traces bit-identical: {same}"))
}

fn desk_speedup() -> Outcome {
    let mut ratios = Vec::new();
    for seed in 0..5 {
        let mut file = load("desk_speedup.json");
        file.seed = seed;
        let race = run_race(&file.experiments().unwrap()).unwrap();
        let per_epoch = race.steps_per_epoch.unwrap();
        let (base, adine) = (&race.traces[0], &race.traces[1]);
        let target = *base.epoch_mean_losses(per_epoch).last().unwrap();
        let reach = steps_to_reach(adine, target, per_epoch);
        ratios.push(reach.map_or(f64::INFINITY, |s| s as f64 / base.steps as f64));
    }
    let mut sorted = ratios.clone();
    sorted.sort_by(f64::total_cmp);
    let median = sorted[2];
    verdict(median <= 0.8, format!("ADINE steps / baseline steps per seed {ratios:.3?}, median {median:.3} (<= 0.8)"))
}

fn zeta_sanity() -> Outcome {
    let file = load("zeta_sweep.json");
    let base = file.experiments().unwrap().remove(0);
    let sweep = zeta_sweep(&base, file.zeta_values.as_deref().unwrap()).unwrap();
    let rows = &sweep.table.rows;
    let high = rows[0].m_g_fraction;
    let low = rows[1].m_g_fraction;
    let captions_ok =
        rows[2..].iter().all(|r| r.terminal_reason != TerminalReason::Diverged && r.final_loss.is_finite());
    let ok = rows[0].zeta == 1e9 && rows[1].zeta == 1e-9 && high > 0.99 && low == 0.0 && captions_ok;
    let finals: Vec<String> = rows[2..].iter().map(|r| format!("{}: {:.4}", r.zeta, r.final_loss)).collect();
    verdict(
        ok,
        format!("m_g share at 1e9 = {high:.4}, at 1e-9 = {low}, caption values final loss [{}]", finals.join(", ")),
    )
}

fn determinism() -> Outcome {
    let exe = env!("CARGO_BIN_EXE_adine");
    let scratch = tempfile::tempdir().unwrap();
    let mut names: Vec<PathBuf> = std::fs::read_dir(configs()).unwrap().map(|e| e.unwrap().path()).collect();
    names.sort();
    let mut failures = Vec::new();
    for cfg in &names {
        let file = RaceFile::load(cfg).unwrap();
        let sub = if file.zeta_values.is_some() {
            "sweep-zeta"
        } else if file.target.is_network() {
            "train"
        } else {
            "race"
        };
        let stem = cfg.file_stem().unwrap().to_str().unwrap();
        let mut outputs = Vec::new();
        for rep in 0..2 {
            let out = scratch.path().join(format!("{stem}-{rep}"));
            let mut cmd = Command::new(exe);
            cmd.args([sub, "--config", cfg.to_str().unwrap(), "--out-dir", out.to_str().unwrap()]);
            if file.target.is_network() {
                cmd.args(["--max-iters", "10"]);
            }
            let status = cmd.output().unwrap().status;
            if !status.success() {
                failures.push(format!("{stem}: exit {status}"));
                break;
            }
            let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(&out)
                .unwrap()
                .map(|e| {
                    let p = e.unwrap().path();
                    (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap())
                })
                .collect();
            files.sort();
            outputs.push(files);
        }
        if outputs.len() == 2 && outputs[0] != outputs[1] {
            failures.push(format!("{stem}: outputs differ"));
        }
    }
    verdict(
        failures.is_empty(),
        format!(
            "{} configs re-run (network runs capped at 10 steps); {}",
            names.len(),
            if failures.is_empty() { "all byte-identical".into() } else { failures.join(", ") }
        ),
    )
}

fn main() {
    let criteria: &[Criterion] = &[
        ("1 saddle2d momentum ordering and halving", table1_ordering),
        ("2 saddle escape ordering over 3 seeds", saddle_escape),
        ("3 weighted-sum loss fold equals closed form", wsl_equivalence),
        ("4 heavy-ball telescoping identity", telescoping),
        ("5 Nesterov schedule asymptotics", schedule),
        ("6 Polyak optimal parameters", polyak),
        ("7 gradient correctness", gradients),
        ("8 ADINE with equal momenta equals NAG", adine_degenerate),
        ("9 desk-scale training speedup", desk_speedup),
        ("10 zeta sweep sanity", zeta_sanity),
        ("11 determinism of checked-in configs", determinism),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for &(name, run) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(d) => println!("PASS  criterion {name} [{secs:.1}s]: {d}"),
            Err(d) => {
                failed += 1;
                println!("FAIL  criterion {name} [{secs:.1}s]: {d}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
