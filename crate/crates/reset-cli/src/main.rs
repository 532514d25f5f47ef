//! Benchmark CLI: dataset generation, model training, evaluation, the full
//! benchmark and demo-count sweep, theory measurements, and report rendering.
//!
//! Exit code 0 on full success; on failure a machine-readable error record is
//! printed to stderr and the exit code is nonzero.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use reset_cli::config::{load_config, ExperimentConfig, Overrides};
use reset_cli::orchestrate::{
    evaluate_method, fit_bundle, generate_demos, run_bench, run_sweep, run_theory, run_theory_task,
    scenario_set, Method,
};
use reset_cli::report;
use reset_core::io::{self, DatasetIndex, ModelBundle};
use reset_core::rng::derive_seed;
use reset_core::{fit_reduction, gen_expert, gen_play, Task};

#[derive(Parser)]
#[command(name = "reset", about = "Two-stage rearrangement benchmark harness", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Configuration file (TOML); defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output root; overrides the config file and RESET_OUT_DIR.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Master seed override.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Comma-separated task subset (pick_place, reveal_pick, rotate_place, multi_task).
    #[arg(long, global = true, value_delimiter = ',')]
    tasks: Option<Vec<String>>,
    /// Test scenarios per task.
    #[arg(long, global = true)]
    scenarios: Option<usize>,
    /// Expert demonstrations for the base policy.
    #[arg(long, global = true)]
    expert_demos: Option<usize>,
    /// Scripted rearrangement videos per task.
    #[arg(long, global = true)]
    human_demos: Option<usize>,
    /// Task-agnostic play episodes.
    #[arg(long, global = true)]
    play_episodes: Option<usize>,
    /// Fraction of test scenarios drawn from the shifted distribution.
    #[arg(long, global = true)]
    ood_fraction: Option<f64>,
    /// Actuation noise standard deviation.
    #[arg(long, global = true)]
    sigma_act: Option<f64>,
    /// Observation noise standard deviation.
    #[arg(long, global = true)]
    sigma_obs: Option<f64>,
}

impl CommonArgs {
    fn config(&self) -> Result<ExperimentConfig> {
        let overrides = Overrides {
            seed: self.seed,
            tasks: self.tasks.clone(),
            expert_demos: self.expert_demos,
            human_demos: self.human_demos,
            play_episodes: self.play_episodes,
            scenarios: self.scenarios,
            ood_fraction: self.ood_fraction,
            sigma_act: self.sigma_act,
            sigma_obs: self.sigma_obs,
        };
        load_config(self.config.as_deref(), &overrides)
    }

    fn out_dir(&self, cfg: &ExperimentConfig) -> PathBuf {
        cfg.resolve_out_dir(self.out.as_deref())
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate and persist the expert, rearrangement, and play datasets.
    GenerateData(CommonArgs),
    /// Fit all models from persisted datasets and save them.
    Train(CommonArgs),
    /// Evaluate saved models on a fresh scenario set.
    Eval(CommonArgs),
    /// Full protocol: generate, train, evaluate, and emit results.
    Bench(CommonArgs),
    /// Demo-count sweep of the direct baseline against the fixed pipeline.
    Sweep(CommonArgs),
    /// Distribution-theory measurements only.
    Theory(CommonArgs),
    /// Render markdown tables and charts from emitted CSV files.
    Report(CommonArgs),
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::GenerateData(args) => cmd_generate_data(&args),
        Command::Train(args) => cmd_train(&args),
        Command::Eval(args) => cmd_eval(&args),
        Command::Bench(args) => cmd_bench(&args),
        Command::Sweep(args) => cmd_sweep(&args),
        Command::Theory(args) => cmd_theory(&args),
        Command::Report(args) => cmd_report(&args),
    };
    if let Err(err) = result {
        let record = serde_json::json!({
            "error": err.to_string(),
            "chain": err.chain().skip(1).map(|c| c.to_string()).collect::<Vec<_>>(),
        });
        eprintln!("{record}");
        std::process::exit(1);
    }
}

fn data_dir(out: &Path) -> PathBuf {
    out.join("data")
}

fn models_path(out: &Path, task: Task) -> PathBuf {
    out.join("models").join(format!("{}.model", task.name()))
}

fn cmd_generate_data(args: &CommonArgs) -> Result<()> {
    let cfg = args.config()?;
    let out = args.out_dir(&cfg);
    let data = data_dir(&out);
    let hash = cfg.hash();
    let seed = cfg.seed;

    let play = gen_play(cfg.data.play_episodes, derive_seed(seed, "play", 0), cfg.theta());
    let mut task_mix: BTreeMap<String, usize> = BTreeMap::new();
    for rec in &play {
        // Task of a play record is not stored; count by primitive class instead.
        *task_mix
            .entry(rec.primitive.class.name().to_string())
            .or_insert(0) += 1;
    }
    io::write_play_dataset(
        &data.join("play"),
        &play,
        &DatasetIndex {
            kind: "play".to_string(),
            count: play.len(),
            task_mix,
            seed,
            config_hash: hash.clone(),
        },
    )?;

    for task in cfg.task_list()? {
        let demos = generate_demos(&cfg, task, seed)?;
        io::write_demo_dataset(
            &data.join("human").join(task.name()),
            &demos,
            &DatasetIndex {
                kind: "human".to_string(),
                count: demos.len(),
                task_mix: BTreeMap::from([(task.name().to_string(), demos.len())]),
                seed,
                config_hash: hash.clone(),
            },
        )?;
        let experts = gen_expert(
            task,
            cfg.data.expert_demos,
            derive_seed(seed, "expert", Task::ALL.iter().position(|t| *t == task).unwrap() as u64),
            cfg.theta(),
        );
        io::write_expert_dataset(
            &data.join("expert").join(task.name()),
            &experts,
            &DatasetIndex {
                kind: "expert".to_string(),
                count: experts.len(),
                task_mix: BTreeMap::from([(task.name().to_string(), experts.len())]),
                seed,
                config_hash: hash.clone(),
            },
        )?;
        println!(
            "generated {} rearrangement demos and {} expert demos for {}",
            cfg.data.human_demos,
            cfg.data.expert_demos,
            task.name()
        );
    }
    println!("generated {} play episodes into {}", play.len(), data.display());
    Ok(())
}

fn cmd_train(args: &CommonArgs) -> Result<()> {
    let cfg = args.config()?;
    let out = args.out_dir(&cfg);
    let data = data_dir(&out);
    let hash = cfg.hash();

    let (play, _) = io::read_play_dataset(&data.join("play"))
        .context("loading play dataset (run generate-data first)")?;
    let reduction = fit_reduction(&play, cfg.train.lambda_cls, cfg.train.lambda_reg)?;

    std::fs::create_dir_all(out.join("models"))?;
    for task in cfg.task_list()? {
        let (demos, _) = io::read_demo_dataset(&data.join("human").join(task.name()))?;
        let (experts, _) = io::read_expert_dataset(&data.join("expert").join(task.name()))?;
        let bundle = fit_bundle(&cfg, task, &demos, &experts, &play, &reduction, cfg.seed)?;
        let path = models_path(&out, task);
        io::write_models(&path, &bundle, &hash)?;
        println!(
            "trained {} (threshold {:.4}) -> {}",
            task.name(),
            bundle.c_hat,
            path.display()
        );
    }
    Ok(())
}

fn load_bundle(out: &Path, task: Task) -> Result<ModelBundle> {
    let path = models_path(out, task);
    let (bundle, _) = io::read_models(&path)
        .with_context(|| format!("loading models from {} (run train first)", path.display()))?;
    Ok(bundle)
}

fn cmd_eval(args: &CommonArgs) -> Result<()> {
    let cfg = args.config()?;
    let out = args.out_dir(&cfg);
    let hash = cfg.hash();
    let mut rows = Vec::new();
    std::fs::create_dir_all(out.join("traces"))?;
    for task in cfg.task_list()? {
        let bundle = load_bundle(&out, task)?;
        let theory = run_theory_task(&cfg, task, &bundle, cfg.seed)?;
        let scenes = scenario_set(&cfg, task, cfg.seed);
        for method in Method::ALL {
            let start = std::time::Instant::now();
            let results = evaluate_method(&cfg, &bundle, None, method, &scenes, cfg.seed);
            let wall = start.elapsed().as_millis();
            let successes = results.iter().filter(|r| r.success()).count();
            let steps: usize = results.iter().map(|r| r.reduction_steps).sum();
            rows.push(reset_cli::BenchRow {
                task: task.name().to_string(),
                method: method.name().to_string(),
                demos: cfg.data.expert_demos,
                seed: cfg.seed,
                scenarios: results.len(),
                successes,
                rate: successes as f64 / results.len() as f64,
                mean_reduction_steps: steps as f64 / results.len() as f64,
                tr_sigma0: theory.tr_sigma0,
                tr_sigma_a: theory.tr_sigma_learned,
                gap0: theory.gap0.gap,
                gap_a: theory.gap_a.gap,
                bound: theory.gap0.bound,
                mi_sb: theory.mi_learned.i_s0_sb,
                mi_sa: theory.mi_learned.i_s0_sa,
                wall_ms: wall,
            });
            // Persist full traces for post-hoc analysis.
            let traces: Vec<reset_core::RolloutTrace> = scenes
                .iter()
                .enumerate()
                .map(|(i, (scene, _))| {
                    let roll_seed =
                        derive_seed(cfg.seed, &format!("eval/{}", method.name()), i as u64);
                    match method {
                        Method::Reset => reset_core::reset_rollout(
                            &bundle.score,
                            bundle.c_hat,
                            &reset_core::LearnedReducer {
                                flowgen: &bundle.flowgen,
                                reduction: &bundle.reduction,
                            },
                            &bundle.base,
                            scene,
                            cfg.eval.m_max,
                            roll_seed,
                        ),
                        Method::Direct => reset_core::direct_rollout(&bundle.base, scene, roll_seed),
                        Method::Naive => reset_core::naive_rollout(
                            &bundle.score,
                            bundle.c_hat,
                            &bundle.naive,
                            &bundle.base,
                            scene,
                            cfg.eval.m_max,
                            roll_seed,
                        ),
                    }
                })
                .collect();
            io::write_traces(
                &out.join("traces")
                    .join(format!("{}_{}.jsonl", task.name(), method.name())),
                &traces,
            )?;
        }
    }
    report::write_csv(&out.join("eval.csv"), &rows, &hash)?;
    println!("wrote {}", out.join("eval.csv").display());
    Ok(())
}

fn cmd_bench(args: &CommonArgs) -> Result<()> {
    let cfg = args.config()?;
    let out = args.out_dir(&cfg);
    let output = run_bench(&cfg)?;
    report::write_csv(&out.join("bench.csv"), &output.rows, &output.config_hash)?;
    std::fs::create_dir_all(&out)?;
    std::fs::write(
        out.join("theory.csv"),
        report::theory_to_csv(&output.theory, &output.config_hash),
    )?;
    for row in &output.rows {
        println!(
            "{:12} {:8} rate {:.3} ({}/{})",
            row.task, row.method, row.rate, row.successes, row.scenarios
        );
    }
    println!("wrote {}", out.join("bench.csv").display());
    Ok(())
}

fn cmd_sweep(args: &CommonArgs) -> Result<()> {
    let cfg = args.config()?;
    let out = args.out_dir(&cfg);
    let output = run_sweep(&cfg)?;
    report::write_csv(&out.join("sweep.csv"), &output.rows, &output.config_hash)?;
    for row in &output.rows {
        println!(
            "{:12} {:8} demos {:3} seed {} rate {:.3}",
            row.task, row.method, row.demos, row.seed, row.rate
        );
    }
    println!("wrote {}", out.join("sweep.csv").display());
    Ok(())
}

fn cmd_theory(args: &CommonArgs) -> Result<()> {
    let cfg = args.config()?;
    let out = args.out_dir(&cfg);
    let (reports, hash) = run_theory(&cfg)?;
    std::fs::create_dir_all(&out)?;
    std::fs::write(out.join("theory.csv"), report::theory_to_csv(&reports, &hash))?;
    for r in &reports {
        println!(
            "{:12} tr0 {:.4} trA {:.4} anchor {} gap0 {:.4} gapA {:.4} dpi {}",
            r.task.name(),
            r.tr_sigma0,
            r.tr_sigma_learned,
            r.anchor_learned,
            r.gap0.gap,
            r.gap_a.gap,
            r.dpi_learned()
        );
    }
    println!("wrote {}", out.join("theory.csv").display());
    Ok(())
}

fn cmd_report(args: &CommonArgs) -> Result<()> {
    let cfg = args.config()?;
    let out = args.out_dir(&cfg);
    let mut all_rows = Vec::new();
    for name in ["bench.csv", "eval.csv", "sweep.csv"] {
        let path = out.join(name);
        if path.exists() {
            all_rows.extend(report::read_csv(&path)?);
        }
    }
    if all_rows.is_empty() {
        anyhow::bail!(
            "no result CSVs found under {} (run bench, eval, or sweep first)",
            out.display()
        );
    }
    std::fs::write(out.join("report.md"), report::markdown_summary(&all_rows))?;
    std::fs::write(
        out.join("success_rates.svg"),
        report::svg_success_chart(&all_rows),
    )?;
    println!("wrote {}", out.join("report.md").display());
    println!("wrote {}", out.join("success_rates.svg").display());
    Ok(())
}
