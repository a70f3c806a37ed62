//! Command bodies. Each one resolves its configuration, writes a snapshot
//! of it, then produces its artifacts under the output directory.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use hardfactor::dynamics::{Calibration, EvolutionProblem, IntegratorConfig, Outcome, SplitReport};
use hardfactor::encoder::{MemberFilter, SizeClass};
use hardfactor::hardness::{estimate_j0_star, rank_hardness, HardnessReport, SpinModel};
use hardfactor::rl::trace::plateau;
use hardfactor::rl::{
    evaluate_schedule, success_histogram, trace_csv, AqcReward, Checkpoint, RewardType, TraceRow, Trainer, TransferMode,
};
use hardfactor::schedule::Schedule;
use serde_json::json;

use crate::config::{overlay, parse_range, RunConfig};
use crate::workspace::{encode_numbers, run_calibration, write_json, write_text, Workspace};
use crate::ClassArgs;

fn apply_class_args(cfg: &mut RunConfig, args: &ClassArgs) -> Result<()> {
    if let Some(r) = &args.range {
        cfg.class.range = parse_range(r)?;
    }
    if args.qubits.is_some() {
        cfg.class.qubits = args.qubits;
    }
    overlay(&mut cfg.class.width, args.width);
    if let Some(f) = &args.filter {
        cfg.class.filter = match f.replace('-', "_").as_str() {
            "semiprime" => MemberFilter::Semiprime,
            "odd_composite" => MemberFilter::OddComposite,
            other => bail!("unknown filter {other}; expected semiprime or odd_composite"),
        };
    }
    Ok(())
}

fn required_qubits(cfg: &RunConfig) -> Result<usize> {
    cfg.class.qubits.ok_or_else(|| anyhow!("--qubits is required"))
}

/// Workspace plus the class named by the resolved configuration.
fn open_class(cfg: &mut RunConfig, args: &ClassArgs) -> Result<(Workspace, SizeClass)> {
    apply_class_args(cfg, args)?;
    let qubits = required_qubits(cfg)?;
    let ws = Workspace::new(&cfg.out)?;
    let class = ws.load_or_build_class(qubits, &cfg.class)?;
    Ok((ws, class))
}

fn snapshot(ws: &Workspace, qubits: usize, command: &str, cfg: &RunConfig) -> Result<()> {
    write_json(&ws.class_dir(qubits).join("config").join(format!("{command}.json")), cfg)
}

pub fn encode(mut cfg: RunConfig, numbers: &[u64], args: &ClassArgs) -> Result<()> {
    apply_class_args(&mut cfg, args)?;
    if !numbers.is_empty() {
        cfg.class.numbers = numbers.to_vec();
    }
    let ws = Workspace::new(&cfg.out)?;
    let width = cfg.class.width;
    let mut classes: Vec<SizeClass> = Vec::new();
    if cfg.class.numbers.is_empty() {
        let [lo, hi] = cfg.class.range;
        let mut skipped = [0usize; 3];
        let mut admitted = Vec::new();
        for n in lo..=hi {
            if n % 2 == 0 {
                skipped[0] += 1;
            } else if n < 3 || (2..).take_while(|d| d * d <= n).all(|d| n % d != 0) {
                skipped[1] += 1;
            } else if !cfg.class.filter.admits(n) {
                skipped[2] += 1;
            } else {
                admitted.push(n);
            }
        }
        eprintln!(
            "skipped in {lo}..{hi}: {} even, {} prime, {} outside the {:?} filter",
            skipped[0], skipped[1], skipped[2], cfg.class.filter
        );
        let (groups, diagnostics) = encode_numbers(&admitted, width);
        for d in diagnostics {
            eprintln!("{d}");
        }
        for (q, instances) in groups {
            if cfg.class.qubits.is_none_or(|want| want == q) {
                classes.push(SizeClass::from_instances(q, width, instances));
            }
        }
    } else {
        let (groups, diagnostics) = encode_numbers(&cfg.class.numbers, width);
        for d in diagnostics {
            eprintln!("{d}");
        }
        for (q, instances) in groups {
            classes.push(SizeClass::from_instances(q, width, instances));
        }
    }

    println!("{:>6} {:>4} {:>4} {:>4} {:>4}  {}", "N", "L_p", "L_q", "L_N", "T_Q", "class");
    for class in &classes {
        for inst in &class.instances {
            let s = inst.split();
            println!(
                "{:>6} {:>4} {:>4} {:>4} {:>4}  n{}",
                inst.number, s.lp, s.lq, s.ln, class.qubits, class.qubits
            );
        }
    }
    for class in &classes {
        ws.write_class(class)?;
        snapshot(&ws, class.qubits, "encode", &cfg)?;
        ws.log(&format!("encoded {}-qubit class {:?}", class.qubits, class.numbers()))?;
    }
    if classes.is_empty() {
        eprintln!("nothing encoded");
    }
    Ok(())
}

pub fn profile(mut cfg: RunConfig, args: &ClassArgs) -> Result<()> {
    let (ws, class) = open_class(&mut cfg, args)?;
    let runs = cfg.profile.runs;
    if runs == 0 {
        bail!("--runs must be at least 1");
    }
    let reports: Vec<HardnessReport> = class
        .instances
        .iter()
        .map(|inst| {
            let model = SpinModel::new(inst.ising.clone(), inst.ground.min_energy);
            estimate_j0_star(inst.number, &model, runs, cfg.profile.beta0, cfg.seed)
        })
        .collect();

    let mut table = String::from("N,n,beta0,runs,mean_j0,median_j0,max_j0,std_error,censored\n");
    let mut samples = String::from("N,run,j0_star,censored\n");
    for r in &reports {
        let se = if runs > 1 { r.std_error.to_string() } else { String::new() };
        writeln!(
            table,
            "{},{},{},{},{},{},{},{},{}",
            r.number, r.n, r.beta0, runs, r.mean, r.median, r.max, se, r.censored
        )?;
        for s in &r.samples {
            writeln!(samples, "{},{},{},{}", r.number, s.run, s.j0_star, s.censored)?;
        }
        if r.censored > 0 {
            eprintln!("N = {}: {} of {runs} runs censored at the j0 cap", r.number, r.censored);
        }
    }
    let dir = ws.class_dir(class.qubits);
    write_text(&dir.join("hardness.csv"), &table)?;
    write_text(&dir.join("hardness_samples.csv"), &samples)?;
    let ranking = rank_hardness(&reports);
    write_json(
        &dir.join("hardness_ranking.json"),
        &json!({ "n": class.qubits, "runs": runs, "beta0": cfg.profile.beta0, "hardestFirst": ranking }),
    )?;
    snapshot(&ws, class.qubits, "profile", &cfg)?;
    ws.log(&format!("profiled {}-qubit class, {runs} runs", class.qubits))?;
    print!("{table}");
    println!("hardest first: {ranking:?}");
    Ok(())
}

pub fn calibrate(mut cfg: RunConfig, args: &ClassArgs) -> Result<()> {
    let (ws, class) = open_class(&mut cfg, args)?;
    let cal = run_calibration(&class, &cfg.calibrate)?;
    write_json(&ws.calibration_path(class.qubits), &cal)?;
    snapshot(&ws, class.qubits, "calibrate", &cfg)?;
    ws.log(&format!("calibrated {}-qubit class: T = {}", class.qubits, cal.total_time))?;
    println!("n = {}: T = {} (mean success {:.4})", cal.n, cal.total_time, cal.mean_success);
    Ok(())
}

pub fn classify(mut cfg: RunConfig, args: &ClassArgs, threshold: Option<f64>) -> Result<()> {
    let (ws, class) = open_class(&mut cfg, args)?;
    let cal = ws.load_or_calibrate(&class, &cfg.calibrate)?;
    let split = ws.load_or_classify(&class, &cal, Some(threshold.unwrap_or(cfg.calibrate.threshold)))?;
    snapshot(&ws, class.qubits, "classify", &cfg)?;
    println!("T = {}, P_th = {}", split.total_time, split.threshold);
    println!("easy: {:?}", split.easy);
    println!("hard: {:?}", split.hard);
    if split.hard.is_empty() {
        eprintln!("hard set is empty; training on this class will be refused");
    }
    Ok(())
}

pub fn overlay_train(cfg: &mut RunConfig, reward: Option<&str>, episodes: Option<usize>) -> Result<()> {
    if let Some(r) = reward {
        cfg.train.sac.reward_type = r.parse::<RewardType>()?;
    }
    overlay(&mut cfg.train.sac.episodes, episodes);
    Ok(())
}

/// Calibration, split and reward source for training on `class`.
fn training_inputs(ws: &Workspace, cfg: &mut RunConfig, class: &SizeClass) -> Result<(Calibration, SplitReport, AqcReward)> {
    let cal = ws.load_or_calibrate(class, &cfg.calibrate)?;
    let split = ws.load_or_classify(class, &cal, None)?;
    if split.hard.is_empty() {
        bail!(
            "the hard set of the {}-qubit class is empty at P_th = {}; nothing to train on",
            class.qubits,
            split.threshold
        );
    }
    cfg.train.sac.seed = cfg.seed;
    let slices = cfg
        .train
        .measure_slices
        .unwrap_or_else(|| cal.total_time.ceil() as usize)
        .max(1);
    let source = AqcReward::for_hard_set(class, &split.hard, cal.total_time, slices, cfg.train.sac.reward_type)?;
    Ok((cal, split, source))
}

pub fn train(mut cfg: RunConfig, args: &ClassArgs, resume: bool) -> Result<()> {
    let (ws, class) = open_class(&mut cfg, args)?;
    let (cal, split, source) = training_inputs(&ws, &mut cfg, &class)?;
    let sac = cfg.train.sac.clone();
    let dir = ws
        .class_dir(class.qubits)
        .join("train")
        .join(format!("{}-seed{}", sac.reward_type, cfg.seed));
    let trainer = if resume {
        let ckpt = Checkpoint::load(&dir.join("checkpoint.json")).context("resuming")?;
        Trainer::resume(sac, &ckpt)?
    } else {
        Trainer::fresh(sac, class.qubits, &Schedule::zeros(cfg.train.sac.coefficients))?
    };
    run_training(&ws, &cfg, &class, &cal, &split, &source, trainer, &dir, resume)
}

pub fn transfer(mut cfg: RunConfig, args: &ClassArgs, from: &Path, mode: TransferMode) -> Result<()> {
    let (ws, class) = open_class(&mut cfg, args)?;
    let (cal, split, source) = training_inputs(&ws, &mut cfg, &class)?;
    let ckpt = Checkpoint::load(from).with_context(|| format!("loading {}", from.display()))?;
    let mode_name = serde_json::to_value(mode)?.as_str().unwrap_or("both").to_string();
    let dir = ws
        .class_dir(class.qubits)
        .join("transfer")
        .join(format!("{mode_name}-{}-seed{}", cfg.train.sac.reward_type, cfg.seed));
    let trainer = Trainer::transfer(cfg.train.sac.clone(), class.qubits, &ckpt, mode)?;
    ws.log(&format!("transfer {mode_name} from {} ({} qubits)", from.display(), ckpt.qubits))?;
    run_training(&ws, &cfg, &class, &cal, &split, &source, trainer, &dir, false)
}

#[allow(clippy::too_many_arguments)]
fn run_training(
    ws: &Workspace,
    cfg: &RunConfig,
    class: &SizeClass,
    cal: &Calibration,
    split: &SplitReport,
    source: &AqcReward,
    mut trainer: Trainer,
    dir: &Path,
    resume: bool,
) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    write_json(&dir.join("config.json"), cfg)?;
    let log_path = dir.join("training_log.csv");
    let mut log = if resume && log_path.exists() {
        std::fs::read_to_string(&log_path)?
    } else {
        trace_csv(&[])
    };
    let ckpt_path = dir.join("checkpoint.json");
    let target = cfg.train.sac.episodes;
    let every = cfg.train.checkpoint_every.max(1);
    ws.log(&format!(
        "training {} on {}-qubit hard set {:?}, {} -> {target} episodes",
        cfg.train.sac.reward_type, class.qubits, split.hard, trainer.episodes_completed
    ))?;

    let mut trace: Vec<TraceRow> = Vec::new();
    while trainer.episodes_completed < target {
        let before = trace.len();
        trainer.run_episode(source, &mut trace)?;
        for row in &trace[before..] {
            log.push_str(&row.csv());
            log.push('\n');
        }
        if trainer.episodes_completed % every == 0 {
            trainer.checkpoint().save(&ckpt_path)?;
            write_text(&log_path, &log)?;
        }
    }
    trainer.checkpoint().save(&ckpt_path)?;
    write_text(&log_path, &log)?;

    let best = trainer.best_schedule();
    write_json(&dir.join("best_schedule.json"), &best)?;
    let outcomes = evaluate_class(class, &best, cal.total_time)?;
    write_text(&dir.join("evaluation.csv"), &per_instance_csv(&outcomes, &split.hard))?;

    let hard_success: Vec<f64> = outcomes
        .iter()
        .filter(|(n, _)| split.hard.contains(n))
        .map(|(_, o)| o.success_probability)
        .collect();
    let summary = json!({
        "n": class.qubits,
        "reward": cfg.train.sac.reward_type.to_string(),
        "seed": cfg.seed,
        "T": cal.total_time,
        "measureSlices": source.slices,
        "hard": split.hard,
        "episodes": trainer.episodes_completed,
        "measurements": trainer.measurements,
        "bestReward": trainer.best_reward,
        "bestB": trainer.best_b,
        "plateauReward": plateau(&trace, 0.1),
        "hardMinSuccess": hard_success.iter().copied().fold(f64::INFINITY, f64::min),
        "hardMeanSuccess": mean(&hard_success),
        "classMeanSuccess": mean(&outcomes.iter().map(|(_, o)| o.success_probability).collect::<Vec<_>>()),
        "resampleExhausted": trainer.stats.resample_exhausted,
        "flooredMeasurements": trainer.stats.floored_measurements,
    });
    write_json(&dir.join("summary.json"), &summary)?;
    ws.log(&format!("finished {}", dir.display()))?;
    println!("{}", serde_json::to_string_pretty(&summary)?);
    Ok(())
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

fn std_dev(values: &[f64]) -> f64 {
    let m = mean(values);
    (values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / values.len() as f64).sqrt()
}

fn evaluate_class(class: &SizeClass, schedule: &Schedule, total_time: f64) -> Result<Vec<(u64, Outcome)>> {
    let problems = EvolutionProblem::class_problems(class);
    let map = evaluate_schedule(schedule, &class.numbers(), &problems, total_time, &IntegratorConfig::default())?;
    Ok(map.into_iter().collect())
}

fn per_instance_csv(outcomes: &[(u64, Outcome)], hard: &[u64]) -> String {
    let mut out = String::from("N,hard,success_probability,energy,slices\n");
    for (n, o) in outcomes {
        writeln!(out, "{n},{},{},{},{}", hard.contains(n), o.success_probability, o.energy, o.slices).unwrap();
    }
    out
}

/// A named schedule, a schedule file, or a checkpoint's best schedule.
fn resolve_schedule(spec: &str, coefficients: usize) -> Result<(Schedule, String)> {
    match spec {
        "linear" => return Ok((Schedule::linear(), spec.into())),
        "quadratic" => return Ok((Schedule::quadratic(), spec.into())),
        "zeros" => return Ok((Schedule::zeros(coefficients), spec.into())),
        _ => {}
    }
    let path = PathBuf::from(spec);
    let label = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("schedule")
        .to_string();
    let bytes = std::fs::read(&path).with_context(|| format!("reading schedule {spec}"))?;
    if let Ok(s) = serde_json::from_slice::<Schedule>(&bytes) {
        return Ok((s, label));
    }
    let ckpt = Checkpoint::from_bytes(&bytes).with_context(|| format!("{spec} is neither a schedule nor a checkpoint"))?;
    Ok((Schedule::fourier(ckpt.best_b), label))
}

pub fn evaluate(mut cfg: RunConfig, args: &ClassArgs, spec: &str, label: Option<String>) -> Result<()> {
    let (ws, class) = open_class(&mut cfg, args)?;
    let cal = ws.load_or_calibrate(&class, &cfg.calibrate)?;
    let split = ws.load_or_classify(&class, &cal, None)?;
    let (schedule, default_label) = resolve_schedule(spec, cfg.train.sac.coefficients)?;
    let label = label.unwrap_or(default_label);
    let outcomes = evaluate_class(&class, &schedule, cal.total_time)?;
    let dir = ws.class_dir(class.qubits).join("evaluate").join(&label);
    write_text(&dir.join("per_instance.csv"), &per_instance_csv(&outcomes, &split.hard))?;

    let success: Vec<f64> = outcomes.iter().map(|(_, o)| o.success_probability).collect();
    let bins = cfg.evaluate.bins.max(1);
    let counts = success_histogram(&success, bins);
    let mut hist = String::from("bin_lo,bin_hi,count\n");
    for (k, c) in counts.iter().enumerate() {
        writeln!(hist, "{},{},{c}", k as f64 / bins as f64, (k + 1) as f64 / bins as f64)?;
    }
    write_text(&dir.join("histogram.csv"), &hist)?;
    let hard: Vec<f64> = outcomes
        .iter()
        .filter(|(n, _)| split.hard.contains(n))
        .map(|(_, o)| o.success_probability)
        .collect();
    let summary = json!({
        "label": label,
        "n": class.qubits,
        "T": cal.total_time,
        "schedule": schedule,
        "instances": success.len(),
        "meanSuccess": mean(&success),
        "stdSuccess": std_dev(&success),
        "minSuccess": success.iter().copied().fold(f64::INFINITY, f64::min),
        "hardMeanSuccess": if hard.is_empty() { None } else { Some(mean(&hard)) },
    });
    write_json(&dir.join("summary.json"), &summary)?;
    snapshot(&ws, class.qubits, "evaluate", &cfg)?;
    ws.log(&format!("evaluated {label} on {}-qubit class", class.qubits))?;
    print!("{}", per_instance_csv(&outcomes, &split.hard));
    Ok(())
}


#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn named_schedules_resolve() {
        assert_eq!(resolve_schedule("zeros", 6).unwrap().0, Schedule::zeros(6));
        assert_eq!(resolve_schedule("linear", 6).unwrap().1, "linear");
        assert!(resolve_schedule("/nonexistent.json", 6).is_err());
    }

    #[test]
    fn spread_of_constant_is_zero() {
        assert_eq!(std_dev(&[0.3, 0.3, 0.3]), 0.0);
        assert!((mean(&[0.0, 1.0]) - 0.5).abs() < 1e-15);
    }
}
