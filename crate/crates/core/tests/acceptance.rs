//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion.
//!
//! Criteria can be selected by number: `cargo test --test acceptance -- 1 5 7`.
//! With `--strict` any failing criterion makes the run exit non-zero.

use std::collections::BTreeMap;
use std::time::Instant;

use hardfactor::dynamics::{
    calibrate_t, classify_instances, evolve, evolve_fixed, EvolutionProblem, EvolutionSpec, GeometricGrid,
    IntegratorConfig,
};
use hardfactor::encoder::*;
use hardfactor::hardness::{estimate_j0_star, SpinModel, DEFAULT_BETA0};
use hardfactor::rl::sac::{gaussian_noise, SacNetworks};
use hardfactor::rl::trace::{plateau, steps_to_reach};
use hardfactor::rl::*;
use hardfactor::schedule::Schedule;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

mod common;

use common::gradcheck::{actor_error, checked_error, critic_errors, toy_batch, toy_config, toy_nets};
use common::magnus::{distance, magnus_reference, problem, schedule};
use common::table::{moebius, parse_linear_form, poly_by_mask, F1, F2};

const P_TH: f64 = 0.1;
const PLATEAU_FRACTION: f64 = 0.1;
const REACH_TOLERANCE: f64 = 0.05;
const REACH_WINDOW: usize = 20;
const SEEDS: [u64; 3] = [0, 1, 2];

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn std_dev(v: &[f64]) -> f64 {
    let m = mean(v);
    (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / v.len() as f64).sqrt()
}

fn min(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::INFINITY, f64::min)
}

fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

fn encoding_oracle() -> Verdict {
    let mut checked = 0;
    let mut failures = Vec::new();
    for n in (9..=633u64).step_by(2).filter(|&n| !is_prime(n)) {
        for split in enumerate_bit_splits(n) {
            let Ok(layout) = build_block_layout(split, DEFAULT_BLOCK_WIDTH) else {
                continue;
            };
            if layout.total_qubits > 20 {
                continue;
            }
            checked += 1;
            let inst = match encode_instance(n, split, DEFAULT_BLOCK_WIDTH) {
                Ok(i) => i,
                Err(e) => {
                    failures.push(format!("{n} {split:?}: {e}"));
                    continue;
                }
            };
            if inst.registry.len() != layout.total_qubits {
                failures.push(format!("{n} {split:?}: {} variables for T_Q {}", inst.registry.len(), layout.total_qubits));
            }
            if inst.ground.min_energy != 0.0 {
                failures.push(format!("{n} {split:?}: minimum {}", inst.ground.min_energy));
            }
            for &bits in &inst.ground.ground_set {
                match decode_solution(bits, &inst.registry) {
                    Ok((p, q)) if p * q == n => {}
                    other => failures.push(format!("{n} {split:?}: ground {bits:b} decodes to {other:?}")),
                }
            }
        }
    }
    verdict(
        failures.is_empty() && checked > 0,
        format!("{checked} (N, split) encodings with T_Q <= 20, {} failures {:?}", failures.len(), failures.iter().take(3).collect::<Vec<_>>()),
    )
}

fn table_reproduction() -> Verdict {
    let layout = build_block_layout(BitSplit { lp: 3, lq: 3, ln: 7 }, 3).unwrap();
    let (blocks, reg) = block_expressions(143, &layout);
    let names: BTreeMap<String, usize> = (0..reg.len()).map(|v| (reg.name(v), v)).collect();
    let nv = reg.len();
    let mut ok = layout.total_carries == 2 && blocks.len() == 2;
    for (block, printed) in blocks.iter().zip([F1, F2]) {
        let terms = parse_linear_form(printed);
        let mut oracle = BTreeMap::new();
        for (c, vars) in &terms {
            *oracle.entry(vars.iter().fold(0u64, |m, v| m | 1 << names[v])).or_insert(0) += c;
        }
        oracle.retain(|_, c| *c != 0);
        ok &= poly_by_mask(block) == oracle;
        let table: Vec<i64> = (0..1u64 << nv)
            .map(|bits| {
                let v: i64 = terms
                    .iter()
                    .map(|(c, vars)| if vars.iter().all(|n| bits >> names[n] & 1 == 1) { *c } else { 0 })
                    .sum();
                v * v
            })
            .collect();
        ok &= poly_by_mask(&block.square()) == moebius(&table, nv);
    }
    verdict(
        ok,
        format!("143: {} carries, {} blocks, f1/f2 and their squares match term for term", layout.total_carries, blocks.len()),
    )
}

fn reduction_identity() -> Verdict {
    let mut checked = 0;
    let mut ok = true;
    for sign in [1i64, -1] {
        let gadget = cubic_gadget(sign, [0, 1, 2, 3]);
        for xyz in 0..8u64 {
            let cubic = sign * ((xyz & 1) * (xyz >> 1 & 1) * (xyz >> 2 & 1)) as i64;
            let best = (0..2u64).map(|y| gadget.evaluate(xyz | y << 3)).min().unwrap();
            ok &= best == cubic;
            checked += 1;
        }
    }
    verdict(ok, format!("{checked} assignments (both signs) exact"))
}

fn sa_hardness(class7: &SizeClass) -> Verdict {
    let reports: Vec<_> = class7
        .instances
        .iter()
        .map(|i| {
            let model = SpinModel::new(i.ising.clone(), i.ground.min_energy);
            estimate_j0_star(i.number, &model, 500, DEFAULT_BETA0, 2024)
        })
        .collect();
    let mut means: Vec<f64> = reports.iter().map(|r| r.mean).collect();
    means.sort_by(f64::total_cmp);
    let median = (means[(means.len() - 1) / 2] + means[means.len() / 2]) / 2.0;
    let mut ok = true;
    let mut detail = format!("class median of mean j0* = {median:.2};");
    for n in [77, 91] {
        let r = reports.iter().find(|r| r.number == n).unwrap();
        let z = (r.mean - median) / r.std_error;
        ok &= z > 2.0;
        detail += &format!(" {n}: mean {:.2} +- {:.2} ({z:.1} SE above)", r.mean, r.std_error);
    }
    verdict(ok, detail)
}

fn integrator() -> Verdict {
    let p = problem();
    let s = schedule();
    let total = 12.0;
    let reference = magnus_reference(&p, &s, total, 4000);
    let ev = evolve(
        &EvolutionSpec {
            problem: &p,
            schedule: &s,
            total_time: total,
        },
        &IntegratorConfig::default(),
    )
    .unwrap();
    let fidelity = ev.state.fidelity(&reference);

    let errors: Vec<f64> = [40usize, 80, 160, 320]
        .iter()
        .map(|&k| distance(&evolve_fixed(&p, &s, total, k), &reference))
        .collect();
    let orders: Vec<f64> = errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect();

    let drift = [10usize, 1000, 20000]
        .iter()
        .map(|&k| (evolve_fixed(&p, &s, 30.0, k).norm() - 1.0).abs())
        .fold(0.0, f64::max);

    let rescale = [0.25, 3.0, 17.0]
        .iter()
        .map(|&z| evolve_fixed(&p, &s, 9.0, 900).fidelity(&evolve_fixed(&p.rescaled(z), &s, 9.0 * z, 900)))
        .fold(1.0, f64::min);

    let ok = fidelity >= 1.0 - 1e-6
        && orders.iter().all(|o| (o - 2.0).abs() <= 0.3)
        && drift <= 1e-9
        && rescale >= 1.0 - 1e-8;
    verdict(
        ok,
        format!(
            "|1 - fidelity| {:.1e}, orders {:?}, norm drift {drift:.1e}, rescaling |1 - fidelity| {:.1e}",
            (1.0 - fidelity).abs(),
            orders.iter().map(|o| (o * 100.0).round() / 100.0).collect::<Vec<_>>(),
            (1.0 - rescale).abs()
        ),
    )
}

struct Calibrated {
    class: SizeClass,
    total_time: f64,
    hard: Vec<u64>,
}

fn calibrate(qubits: usize) -> Calibrated {
    let class = build_size_class(49..=633, qubits, DEFAULT_BLOCK_WIDTH).unwrap();
    let cfg = IntegratorConfig::default();
    let cal = calibrate_t(&class, P_TH, &GeometricGrid::default(), &cfg).unwrap();
    let split = classify_instances(&class, cal.total_time, P_TH, &cfg).unwrap();
    Calibrated {
        class,
        total_time: cal.total_time,
        hard: split.hard,
    }
}

fn hard_identification(c7: &Calibrated) -> Verdict {
    let ok = c7.hard.contains(&77) && c7.hard.contains(&91) && (1e3..=1e4).contains(&c7.total_time);
    verdict(ok, format!("T(7) = {:.1}, hard set {:?}", c7.total_time, c7.hard))
}

/// Gradient errors (critic, actor) on a random subset of the coordinates of
/// full-size networks, with the number of coordinates skipped at kinks.
fn sampled_errors(seed: u64) -> (f64, f64, usize) {
    let cfg = SacConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nets = SacNetworks::new(&cfg, &mut rng, &mut ChaCha8Rng::seed_from_u64(seed + 1));
    let rows = 8;
    let sd = cfg.state_dim();
    let c = cfg.coefficients;
    let batch = hardfactor::rl::Batch {
        states: gaussian_noise(rows, sd, &mut rng) * 0.5,
        actions: gaussian_noise(rows, c, &mut rng).mapv(f64::tanh),
        rewards: gaussian_noise(rows, 1, &mut rng).column(0).to_owned(),
        next_states: gaussian_noise(rows, sd, &mut rng) * 0.5,
        dones: ndarray::Array1::from_shape_fn(rows, |r| if r == 0 { 1.0 } else { 0.0 }),
    };
    let noise = gaussian_noise(rows, c, &mut rng);

    let probe = |params: &[f64], f: &dyn Fn(&[f64]) -> f64, analytic: &[f64], rng: &mut ChaCha8Rng| -> (f64, usize) {
        let coords = sample(rng, params.len(), 150).into_vec();
        checked_error(analytic, params, &coords, f)
    };

    let obj = critic_objective(&nets, &cfg, &batch, &noise);
    let critic = probe(
        &nets.critic1.flatten(),
        &|p| {
            let mut n = nets.clone();
            n.critic1.set_flat(p).unwrap();
            critic_objective(&n, &cfg, &batch, &noise).loss1
        },
        &obj.grads1.flatten(),
        &mut rng,
    );
    let obj = actor_objective(&nets, &cfg, &batch.states, &noise);
    let actor = probe(
        &nets.actor.flatten(),
        &|p| {
            let mut n = nets.clone();
            n.actor.set_flat(p).unwrap();
            actor_objective(&n, &cfg, &batch.states, &noise).loss
        },
        &obj.grads.flatten(),
        &mut rng,
    );
    (critic.0, actor.0, critic.1 + actor.1)
}

fn sac_sanity() -> Verdict {
    let mut grad_errors = Vec::new();
    for (k, (a, c)) in [(&[2usize, 5, 5, 2][..], &[3usize, 6, 6, 1][..]), (&[2, 2], &[3, 1])].into_iter().enumerate() {
        let nets = toy_nets(a, c, 10 + k as u64);
        let batch = toy_batch(16, 20 + k as u64);
        let noise = gaussian_noise(16, 1, &mut ChaCha8Rng::seed_from_u64(30 + k as u64));
        let (e1, e2) = critic_errors(&toy_config(), &nets, &batch, &noise);
        grad_errors.extend([e1, e2, actor_error(&toy_config(), &nets, &batch.states, &noise)]);
    }
    let (ce, ae, kinks) = sampled_errors(7);
    grad_errors.extend([ce, ae]);
    let worst_grad = grad_errors.iter().copied().fold(0.0, f64::max);

    let toy = ToyReward::new(vec![0.15, 0.05, 0.0, 0.0, 0.0, 0.0]);
    let bests: Vec<f64> = SEEDS
        .iter()
        .map(|&seed| {
            let cfg = SacConfig {
                episodes: 200,
                seed,
                ..SacConfig::default()
            };
            let out = train(&toy, Trainer::fresh(cfg, 0, &Schedule::zeros(6)).unwrap()).unwrap();
            out.best_reward.unwrap_or(f64::NEG_INFINITY)
        })
        .collect();
    let ok = bests.iter().all(|&b| b > -1e-2) && worst_grad < 1e-5;
    verdict(
        ok,
        format!("toy best rewards {bests:.4?} (need > -0.01), worst gradient relative error {worst_grad:.1e} ({kinks} of 300 full-size coordinates skipped at ReLU kinks)"),
    )
}

fn success_on(c: &Calibrated, numbers: &[u64], schedule: &Schedule) -> Vec<f64> {
    let problems: Vec<EvolutionProblem> = numbers
        .iter()
        .map(|&n| EvolutionProblem::from_instance(c.class.get(n).unwrap(), c.class.norm_constant))
        .collect();
    evaluate_schedule(schedule, numbers, &problems, c.total_time, &IntegratorConfig::default())
        .unwrap()
        .values()
        .map(|o| o.success_probability)
        .collect()
}

fn train_on(c: &Calibrated, kind: RewardType, seed: u64, episodes: usize, start: Option<(&Checkpoint, TransferMode)>) -> TrainOutcome {
    let source = AqcReward::for_hard_set(&c.class, &c.hard, c.total_time, c.total_time.ceil() as usize, kind).unwrap();
    let cfg = SacConfig {
        seed,
        episodes,
        reward_type: kind,
        ..SacConfig::default()
    };
    let trainer = match start {
        None => Trainer::fresh(cfg, c.class.qubits, &Schedule::zeros(6)).unwrap(),
        Some((ckpt, mode)) => Trainer::transfer(cfg, c.class.qubits, ckpt, mode).unwrap(),
    };
    train(&source, trainer).unwrap()
}

fn configuration_gain(c5: &Calibrated) -> (Verdict, Checkpoint) {
    let quadratic = min(&success_on(c5, &c5.hard, &Schedule::quadratic()));
    let mut lines = Vec::new();
    let mut any = false;
    let mut best: Option<(f64, Checkpoint)> = None;
    let mut r1_seed0 = Vec::new();
    for seed in SEEDS {
        let out = train_on(c5, RewardType::R1, seed, 1000, None);
        let success = success_on(c5, &c5.hard, &out.best_schedule);
        let level = plateau(&out.trace, PLATEAU_FRACTION).unwrap();
        let steps = steps_to_reach(&out.trace, level, REACH_TOLERANCE, REACH_WINDOW);
        let m = min(&success);
        let pass = m >= P_TH && m > quadratic && steps.is_some_and(|s| s <= 1600);
        any |= pass;
        lines.push(format!("seed {seed}: min {m:.4}, plateau {level:.3} reached at {steps:?}"));
        if seed == 0 {
            r1_seed0 = success.clone();
        }
        let reward = out.best_reward.unwrap_or(f64::NEG_INFINITY);
        if best.as_ref().is_none_or(|(r, _)| reward > *r) {
            best = Some((reward, out.checkpoint));
        }
    }

    let r2 = success_on(c5, &c5.hard, &train_on(c5, RewardType::R2, 0, 1000, None).best_schedule);
    let r5 = success_on(c5, &c5.hard, &train_on(c5, RewardType::R5, 0, 1000, None).best_schedule);
    let spread_ok = std_dev(&r1_seed0) < std_dev(&r2);
    let level_ok = mean(&r5) < mean(&r1_seed0);
    lines.push(format!(
        "std R1 {:.4} < R2 {:.4}: {spread_ok}; mean R5 {:.4} < R1 {:.4}: {level_ok}",
        std_dev(&r1_seed0),
        std_dev(&r2),
        mean(&r5),
        mean(&r1_seed0)
    ));
    (
        verdict(
            any && spread_ok && level_ok,
            format!("5 qubits, hard {:?}, quadratic min {quadratic:.4}; {}", c5.hard, lines.join("; ")),
        ),
        best.unwrap().1,
    )
}

fn transfer_advantage(c7: &Calibrated, source: &Checkpoint) -> Verdict {
    let episodes = 400;
    let run = |start: Option<TransferMode>| -> Vec<Vec<TraceRow>> {
        SEEDS
            .iter()
            .map(|&seed| train_on(c7, RewardType::R1, seed, episodes, start.map(|m| (source, m))).trace)
            .collect()
    };
    let fresh = run(None);
    let both = run(Some(TransferMode::Both));
    let actor = run(Some(TransferMode::Actor));

    let plateaus: Vec<f64> = fresh.iter().map(|t| plateau(t, PLATEAU_FRACTION).unwrap()).collect();
    let level = plateaus.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let first = |runs: &[Vec<TraceRow>]| -> Option<usize> {
        runs.iter().filter_map(|t| steps_to_reach(t, level, REACH_TOLERANCE, REACH_WINDOW)).min()
    };
    let (f, b, a) = (first(&fresh), first(&both), first(&actor));
    let never = usize::MAX;
    let both_ok = b.unwrap_or(never) < f.unwrap_or(never);
    let actor_ok = a.unwrap_or(never) >= f.unwrap_or(never);
    verdict(
        both_ok && actor_ok,
        format!(
            "7 qubits, fresh plateaus {plateaus:.3?}, level {level:.3}; measurements to reach: fresh {f:?}, both {b:?}, actor {a:?}"
        ),
    )
}

fn main() {
    let selected: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let wanted = |k: usize| selected.is_empty() || selected.contains(&k);
    let mut results: Vec<(usize, Verdict)> = Vec::new();
    let mut report = |k: usize, v: Verdict, t0: Instant| {
        println!(
            "criterion {k}: {} ({:.0}s) {}",
            if v.pass { "PASS" } else { "FAIL" },
            t0.elapsed().as_secs_f64(),
            v.detail
        );
        results.push((k, v));
    };

    for (k, f) in [(1, encoding_oracle as fn() -> Verdict), (2, table_reproduction), (3, reduction_identity)] {
        if wanted(k) {
            let t0 = Instant::now();
            report(k, f(), t0);
        }
    }
    if wanted(4) {
        let t0 = Instant::now();
        let class7 = build_size_class(49..=633, 7, DEFAULT_BLOCK_WIDTH).unwrap();
        report(4, sa_hardness(&class7), t0);
    }
    if wanted(5) {
        let t0 = Instant::now();
        report(5, integrator(), t0);
    }
    let t0 = Instant::now();
    let c7 = (wanted(6) || wanted(9)).then(|| calibrate(7));
    if wanted(6) {
        report(6, hard_identification(c7.as_ref().unwrap()), t0);
    }
    if wanted(7) {
        let t0 = Instant::now();
        report(7, sac_sanity(), t0);
    }
    if wanted(8) || wanted(9) {
        let t0 = Instant::now();
        let c5 = calibrate(5);
        let (v8, source) = configuration_gain(&c5);
        if wanted(8) {
            report(8, v8, t0);
        }
        if wanted(9) {
            let t0 = Instant::now();
            report(9, transfer_advantage(c7.as_ref().unwrap(), &source), t0);
        }
    }

    let failed: Vec<usize> = results.iter().filter(|(_, v)| !v.pass).map(|(k, _)| *k).collect();
    println!(
        "acceptance: {} of {} criteria pass{}",
        results.len() - failed.len(),
        results.len(),
        if failed.is_empty() { String::new() } else { format!(", failing {failed:?}") }
    );
    // The report is informational by default; `--strict` turns a red
    // criterion into a failing exit status.
    if !failed.is_empty() && std::env::args().any(|a| a == "--strict") {
        std::process::exit(1);
    }
}
