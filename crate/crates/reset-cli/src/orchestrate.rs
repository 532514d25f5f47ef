//! Seeded experiment orchestration: data generation, model fitting, threshold
//! calibration, method evaluation over scenario sets, the demo-count sweep,
//! and the distribution-theory measurements attached to every result row.

use std::collections::BTreeMap;
use std::time::Instant;

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};

use reset_core::gap::mi::{mi_report, MiReport};
use reset_core::gap::{
    cov_trace_rows, empirical_gap, squared_error, GapReport, OracleReductionPolicy, RolloutPolicy,
};
use reset_core::io::ModelBundle;
use reset_core::learn::base::fit_base;
use reset_core::learn::linalg::RidgeRegressor;
use reset_core::rng::{derive_seed, stream};
use reset_core::rollout::LearnedReductionPolicy;
use reset_core::sim::tasks::scene_shift;
use reset_core::{
    apply_primitive, calibrate_threshold, direct_rollout, fit_flow, fit_naive, fit_reduction,
    fit_score, gen_expert, gen_play, is_success, naive_rollout, observe, oracle_reduction_plan,
    oracle_task_plan, reset_rollout, sample_scenario, script_demo, state_vector, BaseModel,
    DemoVideo, ExpertDemo, LearnedReducer, Observation, Outcome, PlayRecord, RolloutTrace, Split,
    Task, WorldState,
};

use crate::config::ExperimentConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    Reset,
    Direct,
    Naive,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Reset, Method::Direct, Method::Naive];

    pub fn name(self) -> &'static str {
        match self {
            Method::Reset => "reset",
            Method::Direct => "direct",
            Method::Naive => "naive",
        }
    }
}

/// One evaluated scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioResult {
    pub index: usize,
    pub split: Split,
    /// Largest displacement of a movable object from its anchor mean.
    pub shift: f64,
    pub outcome: Outcome,
    pub reduction_steps: usize,
}

impl ScenarioResult {
    pub fn success(&self) -> bool {
        self.outcome == Outcome::Success
    }
}

/// Theory measurements for one (task, seed) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoryReport {
    pub task: Task,
    pub seed: u64,
    pub tr_sigma0: f64,
    pub tr_sigma_oracle: f64,
    pub tr_sigma_learned: f64,
    pub anchor_oracle: bool,
    pub anchor_learned: bool,
    pub gap0: GapReport,
    pub gap_a: GapReport,
    pub mi_learned: MiReport,
    pub mi_oracle: MiReport,
}

impl TheoryReport {
    pub fn dpi_learned(&self) -> bool {
        self.mi_learned.dpi_holds()
    }

    pub fn dpi_oracle(&self) -> bool {
        self.mi_oracle.dpi_holds()
    }
}

/// One CSV result row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub task: String,
    pub method: String,
    pub demos: usize,
    pub seed: u64,
    pub scenarios: usize,
    pub successes: usize,
    pub rate: f64,
    pub mean_reduction_steps: f64,
    pub tr_sigma0: f64,
    pub tr_sigma_a: f64,
    pub gap0: f64,
    pub gap_a: f64,
    pub bound: f64,
    pub mi_sb: f64,
    pub mi_sa: f64,
    pub wall_ms: u128,
}

/// Full benchmark output: rows for the CSV, per-task theory reports, and the
/// raw per-scenario outcomes keyed by (task, method).
#[derive(Debug, Clone)]
pub struct BenchOutput {
    pub rows: Vec<BenchRow>,
    pub theory: Vec<TheoryReport>,
    pub outcomes: BTreeMap<(String, String), Vec<ScenarioResult>>,
    pub config_hash: String,
}

fn scene_with_noise(cfg: &ExperimentConfig, task: Task, split: Split, seed: u64, i: u64) -> WorldState {
    let mut rng = stream(seed, &format!("scene/{}/{}", task.name(), split.name()), i);
    let mut s = sample_scenario(task, split, &mut rng);
    s.env = cfg.theta();
    s
}

/// Scripted rearrangement demonstrations on shifted starts.
pub fn generate_demos(cfg: &ExperimentConfig, task: Task, seed: u64) -> Result<Vec<DemoVideo>> {
    (0..cfg.data.human_demos)
        .map(|i| {
            let scene = scene_with_noise(cfg, task, Split::Ood, derive_seed(seed, "human", 0), i as u64);
            let mut rng = stream(seed, &format!("human-exec/{}", task.name()), i as u64);
            script_demo(task, &scene, &mut rng)
                .with_context(|| format!("scripting demo {i} for {}", task.name()))
        })
        .collect()
}

/// Fit every model for one task from already-materialized datasets, sharing
/// the task-agnostic play data and the single reduction policy trained on it.
pub fn fit_bundle(
    cfg: &ExperimentConfig,
    task: Task,
    demos: &[DemoVideo],
    experts: &[ExpertDemo],
    play: &[PlayRecord],
    reduction: &reset_core::ReductionModel,
    seed: u64,
) -> Result<ModelBundle> {
    let score = fit_score(
        demos,
        cfg.train.lambda_ridge_score,
        derive_seed(seed, "score-fit", task_index(task)),
    )?;
    let flowgen = fit_flow(
        demos,
        cfg.train.retrieval_k,
        derive_seed(seed, "flow-fit", task_index(task)),
    )?;

    let calib_seed = derive_seed(seed, "calibration", task_index(task));
    let anchors: Vec<Observation> = (0..cfg.eval.calibration_samples)
        .map(|i| {
            let s = scene_with_noise(cfg, task, Split::InDist, calib_seed, i as u64);
            observe(&s, &mut stream(calib_seed, "anchor-obs", i as u64))
        })
        .collect();
    let non_anchors: Vec<Observation> = (0..cfg.eval.calibration_samples)
        .map(|i| {
            let s = scene_with_noise(cfg, task, Split::Ood, calib_seed.wrapping_add(1), i as u64);
            observe(&s, &mut stream(calib_seed, "non-anchor-obs", i as u64))
        })
        .collect();
    let c_hat = calibrate_threshold(&score, &anchors, &non_anchors)
        .with_context(|| format!("calibrating threshold for {}", task.name()))?;

    let base = fit_base(task, experts, cfg.train.lambda_ridge_base)?;
    let naive = fit_naive(demos, play, derive_seed(seed, "naive-fit", task_index(task)))?;

    Ok(ModelBundle {
        task,
        score,
        c_hat,
        flowgen,
        reduction: reduction.clone(),
        base,
        naive,
    })
}

/// Generate the per-task datasets and fit every model.
pub fn train_task(
    cfg: &ExperimentConfig,
    task: Task,
    play: &[PlayRecord],
    reduction: &reset_core::ReductionModel,
    seed: u64,
) -> Result<(ModelBundle, Vec<DemoVideo>, Vec<ExpertDemo>)> {
    let demos = generate_demos(cfg, task, seed)?;
    let experts = gen_expert(
        task,
        cfg.data.expert_demos,
        derive_seed(seed, "expert", task_index(task)),
        cfg.theta(),
    );
    let bundle = fit_bundle(cfg, task, &demos, &experts, play, reduction, seed)?;
    Ok((bundle, demos, experts))
}

fn task_index(task: Task) -> u64 {
    Task::ALL.iter().position(|t| *t == task).unwrap() as u64
}

/// Deterministic scenario set: the first `ood_fraction` share is shifted, the
/// remainder in-distribution.
pub fn scenario_set(cfg: &ExperimentConfig, task: Task, seed: u64) -> Vec<(WorldState, Split)> {
    let n = cfg.eval.scenarios;
    let n_ood = ((n as f64) * cfg.eval.ood_fraction).round() as usize;
    (0..n)
        .map(|i| {
            let split = if i < n_ood { Split::Ood } else { Split::InDist };
            let scene = scene_with_noise(cfg, task, split, derive_seed(seed, "scenario", task_index(task)), i as u64);
            (scene, split)
        })
        .collect()
}

fn rollout_for(
    method: Method,
    bundle: &ModelBundle,
    scene: &WorldState,
    m_max: usize,
    seed: u64,
) -> RolloutTrace {
    match method {
        Method::Reset => {
            let reducer = LearnedReducer {
                flowgen: &bundle.flowgen,
                reduction: &bundle.reduction,
            };
            reset_rollout(&bundle.score, bundle.c_hat, &reducer, &bundle.base, scene, m_max, seed)
        }
        Method::Direct => direct_rollout(&bundle.base, scene, seed),
        Method::Naive => naive_rollout(
            &bundle.score,
            bundle.c_hat,
            &bundle.naive,
            &bundle.base,
            scene,
            m_max,
            seed,
        ),
    }
}

/// Evaluate one method over a scenario set; optionally with a substitute base
/// policy (the demo-count sweep refits only the base).
pub fn evaluate_method(
    cfg: &ExperimentConfig,
    bundle: &ModelBundle,
    base_override: Option<&BaseModel>,
    method: Method,
    scenes: &[(WorldState, Split)],
    seed: u64,
) -> Vec<ScenarioResult> {
    let mut bundle_eval;
    let bundle = match base_override {
        Some(base) => {
            bundle_eval = bundle.clone();
            bundle_eval.base = base.clone();
            &bundle_eval
        }
        None => bundle,
    };
    scenes
        .iter()
        .enumerate()
        .map(|(i, (scene, split))| {
            let roll_seed = derive_seed(seed, &format!("eval/{}", method.name()), i as u64);
            let trace = rollout_for(method, bundle, scene, cfg.eval.m_max, roll_seed);
            ScenarioResult {
                index: i,
                split: *split,
                shift: scene_shift(scene),
                outcome: trace.outcome,
                reduction_steps: trace.reduction_steps.len(),
            }
        })
        .collect()
}

/// Solve a scene with the scripted heuristics at zero noise: restructuring
/// plan first, then the task primitive. Used as the goal-label map.
pub fn oracle_complete(scene: &WorldState) -> WorldState {
    let mut state = scene.clone();
    state.env.sigma_act = 0.0;
    let mut rng = stream(0, "oracle-complete", 0);
    loop {
        let plan = oracle_reduction_plan(&state);
        if plan.is_empty() {
            break;
        }
        for action in plan {
            let (next, _) = apply_primitive(&state, &action, &mut rng);
            state = next;
        }
    }
    for action in oracle_task_plan(&state) {
        let (next, _) = apply_primitive(&state, &action, &mut rng);
        state = next;
    }
    state
}

/// Run only the score-gated restructuring phase of the learned pipeline.
pub fn reduce_scene(
    bundle: &ModelBundle,
    scene: &WorldState,
    m_max: usize,
    seed: u64,
) -> WorldState {
    let policy = LearnedReductionPolicy {
        score: &bundle.score,
        c_hat: bundle.c_hat,
        flowgen: &bundle.flowgen,
        reduction: &bundle.reduction,
    };
    let mut state = scene.clone();
    let mut rng = stream(seed, "reduce", 0);
    for _ in 0..m_max {
        let obs = observe(&state, &mut rng);
        match policy.act(&state, &obs) {
            Some(action) => {
                let (next, _) = apply_primitive(&state, &action, &mut rng);
                state = next;
            }
            None => break,
        }
    }
    state
}

fn oracle_reduce(scene: &WorldState, m_max: usize, seed: u64) -> WorldState {
    let policy = OracleReductionPolicy;
    let mut state = scene.clone();
    let mut rng = stream(seed, "oracle-reduce", 0);
    for _ in 0..m_max {
        let obs = observe(&state, &mut rng);
        match policy.act(&state, &obs) {
            Some(action) => {
                let (next, _) = apply_primitive(&state, &action, &mut rng);
                state = next;
            }
            None => break,
        }
    }
    state
}

/// Fit the goal-state predictor used by the gap experiments: ridge from the
/// start-state vector (plus bias) to the scripted-solution final state,
/// trained on anchor-region starts.
pub fn fit_goal_predictor(
    cfg: &ExperimentConfig,
    task: Task,
    seed: u64,
) -> Result<(RidgeRegressor, Vec<(Vec<f64>, Vec<f64>)>, f64)> {
    let train: Vec<(Vec<f64>, Vec<f64>)> = (0..cfg.data.expert_demos)
        .map(|i| {
            let scene = scene_with_noise(cfg, task, Split::InDist, derive_seed(seed, "gap-train", task_index(task)), i as u64);
            let x = with_bias(&state_vector(&scene));
            let y = state_vector(&oracle_complete(&scene));
            (x, y)
        })
        .collect();
    let xs: Vec<Vec<f64>> = train.iter().map(|(x, _)| x.clone()).collect();
    let ys: Vec<Vec<f64>> = train.iter().map(|(_, y)| y.clone()).collect();
    let bias_col = xs[0].len() - 1;
    let reg = RidgeRegressor::fit(&xs, &ys, cfg.train.lambda_ridge_base, Some(bias_col))?;
    let b = reg.weight_norm();
    Ok((reg, train, b))
}

fn with_bias(v: &[f64]) -> Vec<f64> {
    let mut x = v.to_vec();
    x.push(1.0);
    x
}

/// All theory measurements for one task: covariance-trace spread of raw
/// versus reduced starts, the empirical gap of the fixed predictor under both
/// input distributions, the capacity bound, and the conditional MI pair.
pub fn run_theory_task(
    cfg: &ExperimentConfig,
    task: Task,
    bundle: &ModelBundle,
    seed: u64,
) -> Result<TheoryReport> {
    let anchor_seed = derive_seed(seed, "theory-anchor", task_index(task));
    let mut s0_rows = Vec::with_capacity(cfg.theory.n_anchor);
    let mut oracle_rows = Vec::with_capacity(cfg.theory.n_anchor);
    let mut learned_rows = Vec::with_capacity(cfg.theory.n_anchor);
    for i in 0..cfg.theory.n_anchor {
        let scene = scene_with_noise(cfg, task, Split::Ood, anchor_seed, i as u64);
        s0_rows.push(state_vector(&scene));
        oracle_rows.push(state_vector(&oracle_reduce(
            &scene,
            cfg.eval.m_max,
            derive_seed(anchor_seed, "o", i as u64),
        )));
        learned_rows.push(state_vector(&reduce_scene(
            bundle,
            &scene,
            cfg.eval.m_max,
            derive_seed(anchor_seed, "l", i as u64),
        )));
    }
    let tr_sigma0 = cov_trace_rows(&s0_rows);
    let tr_sigma_oracle = cov_trace_rows(&oracle_rows);
    let tr_sigma_learned = cov_trace_rows(&learned_rows);

    // Gap of the fixed predictor: shifted starts versus reduced starts.
    let (reg, train, b_norm) = fit_goal_predictor(cfg, task, seed)?;
    let predict = |x: &[f64]| reg.predict(x);
    let gap_seed = derive_seed(seed, "theory-gap", task_index(task));
    let counter0 = std::cell::Cell::new(0u64);
    let mut sampler0 = |_rng: &mut reset_core::rng::ChaCha8Rng| {
        let i = counter0.get();
        counter0.set(i + 1);
        let scene = scene_with_noise(cfg, task, Split::Ood, gap_seed, i);
        (with_bias(&state_vector(&scene)), state_vector(&oracle_complete(&scene)))
    };
    let gap0 = empirical_gap(
        &predict,
        &train,
        &mut sampler0,
        &squared_error,
        cfg.theory.n_gap_test,
        b_norm,
        derive_seed(gap_seed, "mc0", 0),
    );
    let counter_a = std::cell::Cell::new(0u64);
    let mut sampler_a = |_rng: &mut reset_core::rng::ChaCha8Rng| {
        let i = counter_a.get();
        counter_a.set(i + 1);
        let scene = scene_with_noise(cfg, task, Split::Ood, gap_seed, i);
        let reduced = reduce_scene(bundle, &scene, cfg.eval.m_max, derive_seed(gap_seed, "r", i));
        (
            with_bias(&state_vector(&reduced)),
            state_vector(&oracle_complete(&reduced)),
        )
    };
    let gap_a = empirical_gap(
        &predict,
        &train,
        &mut sampler_a,
        &squared_error,
        cfg.theory.n_gap_test,
        b_norm,
        derive_seed(gap_seed, "mca", 0),
    );

    // Conditional MI: starts vs the no-op intermediate (the direct baseline
    // leaves the state untouched before acting) and vs the reduced states.
    let mi_seed = derive_seed(seed, "theory-mi", task_index(task));
    let mut mi_s0 = Vec::with_capacity(cfg.theory.n_mi);
    let mut mi_sa_learned = Vec::with_capacity(cfg.theory.n_mi);
    let mut mi_sa_oracle = Vec::with_capacity(cfg.theory.n_mi);
    let mut mi_goal = Vec::with_capacity(cfg.theory.n_mi);
    for i in 0..cfg.theory.n_mi {
        let scene = scene_with_noise(cfg, task, Split::Ood, mi_seed, i as u64);
        mi_s0.push(state_vector(&scene));
        mi_sa_learned.push(state_vector(&reduce_scene(
            bundle,
            &scene,
            cfg.eval.m_max,
            derive_seed(mi_seed, "l", i as u64),
        )));
        mi_sa_oracle.push(state_vector(&oracle_reduce(
            &scene,
            cfg.eval.m_max,
            derive_seed(mi_seed, "o", i as u64),
        )));
        mi_goal.push(state_vector(&oracle_complete(&scene)));
    }
    let mi_sb = mi_s0.clone();
    let mi_learned = mi_report(&mi_s0, &mi_sb, &mi_sa_learned, &mi_goal, cfg.theory.mi_bins);
    let mi_oracle = mi_report(&mi_s0, &mi_sb, &mi_sa_oracle, &mi_goal, cfg.theory.mi_bins);

    Ok(TheoryReport {
        task,
        seed,
        tr_sigma0,
        tr_sigma_oracle,
        tr_sigma_learned,
        anchor_oracle: tr_sigma_oracle < tr_sigma0,
        anchor_learned: tr_sigma_learned < tr_sigma0,
        gap0,
        gap_a,
        mi_learned,
        mi_oracle,
    })
}

fn summarize(
    task: Task,
    method: Method,
    demos: usize,
    seed: u64,
    results: &[ScenarioResult],
    theory: &TheoryReport,
    wall_ms: u128,
) -> BenchRow {
    let successes = results.iter().filter(|r| r.success()).count();
    let steps: usize = results.iter().map(|r| r.reduction_steps).sum();
    BenchRow {
        task: task.name().to_string(),
        method: method.name().to_string(),
        demos,
        seed,
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
        wall_ms,
    }
}

/// The full benchmark protocol: per task, generate data, fit every model,
/// calibrate the threshold, evaluate the three methods on the scenario set,
/// and attach the theory measurements. Fully deterministic per seed.
pub fn run_bench(cfg: &ExperimentConfig) -> Result<BenchOutput> {
    let seed = cfg.seed;
    let config_hash = cfg.hash();
    let play = gen_play(
        cfg.data.play_episodes,
        derive_seed(seed, "play", 0),
        cfg.theta(),
    );
    let reduction = fit_reduction(&play, cfg.train.lambda_cls, cfg.train.lambda_reg)?;

    let mut rows = Vec::new();
    let mut theory_reports = Vec::new();
    let mut outcomes = BTreeMap::new();
    for task in cfg.task_list()? {
        let (bundle, _demos, _experts) = train_task(cfg, task, &play, &reduction, seed)?;
        let theory = run_theory_task(cfg, task, &bundle, seed)?;
        let scenes = scenario_set(cfg, task, seed);
        for method in Method::ALL {
            let start = Instant::now();
            let results = evaluate_method(cfg, &bundle, None, method, &scenes, seed);
            let wall_ms = start.elapsed().as_millis();
            rows.push(summarize(
                task,
                method,
                cfg.data.expert_demos,
                seed,
                &results,
                &theory,
                wall_ms,
            ));
            outcomes.insert(
                (task.name().to_string(), method.name().to_string()),
                results,
            );
        }
        theory_reports.push(theory);
    }
    Ok(BenchOutput {
        rows,
        theory: theory_reports,
        outcomes,
        config_hash,
    })
}

/// Data-efficiency sweep: the direct baseline refit at each demo count, the
/// restructuring pipeline fixed at the configured count, same scenario sets,
/// repeated over the sweep seeds.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<BenchOutput> {
    let config_hash = cfg.hash();
    let mut rows = Vec::new();
    let mut theory_reports = Vec::new();
    let mut outcomes = BTreeMap::new();

    for &sweep_seed in &cfg.sweep.seeds {
        let seed = derive_seed(cfg.seed, "sweep", sweep_seed);
        let play = gen_play(
            cfg.data.play_episodes,
            derive_seed(seed, "play", 0),
            cfg.theta(),
        );
        let reduction = fit_reduction(&play, cfg.train.lambda_cls, cfg.train.lambda_reg)?;
        for task in cfg.task_list()? {
            let (bundle, _demos, _experts) = train_task(cfg, task, &play, &reduction, seed)?;
            let theory = run_theory_task(cfg, task, &bundle, seed)?;
            let scenes = scenario_set(cfg, task, seed);

            for &count in &cfg.sweep.demo_counts {
                let experts = gen_expert(
                    task,
                    count,
                    derive_seed(seed, "expert", task_index(task)),
                    cfg.theta(),
                );
                let base = fit_base(task, &experts, cfg.train.lambda_ridge_base)?;
                let start = Instant::now();
                let results =
                    evaluate_method(cfg, &bundle, Some(&base), Method::Direct, &scenes, seed);
                let wall_ms = start.elapsed().as_millis();
                rows.push(summarize(
                    task,
                    Method::Direct,
                    count,
                    sweep_seed,
                    &results,
                    &theory,
                    wall_ms,
                ));
                outcomes.insert(
                    (
                        format!("{}@{count}", task.name()),
                        format!("direct@{sweep_seed}"),
                    ),
                    results,
                );
            }

            let start = Instant::now();
            let results = evaluate_method(cfg, &bundle, None, Method::Reset, &scenes, seed);
            let wall_ms = start.elapsed().as_millis();
            rows.push(summarize(
                task,
                Method::Reset,
                cfg.data.expert_demos,
                sweep_seed,
                &results,
                &theory,
                wall_ms,
            ));
            outcomes.insert(
                (
                    format!("{}@{}", task.name(), cfg.data.expert_demos),
                    format!("reset@{sweep_seed}"),
                ),
                results,
            );
            theory_reports.push(theory);
        }
    }
    Ok(BenchOutput {
        rows,
        theory: theory_reports,
        outcomes,
        config_hash,
    })
}

/// Theory-only run over the configured tasks.
pub fn run_theory(cfg: &ExperimentConfig) -> Result<(Vec<TheoryReport>, String)> {
    let seed = cfg.seed;
    let play = gen_play(
        cfg.data.play_episodes,
        derive_seed(seed, "play", 0),
        cfg.theta(),
    );
    let reduction = fit_reduction(&play, cfg.train.lambda_cls, cfg.train.lambda_reg)?;
    let mut reports = Vec::new();
    for task in cfg.task_list()? {
        let (bundle, _, _) = train_task(cfg, task, &play, &reduction, seed)?;
        reports.push(run_theory_task(cfg, task, &bundle, seed)?);
    }
    Ok((reports, cfg.hash()))
}

/// Success check used by tests: a full scripted solve of a scene.
pub fn oracle_solves(scene: &WorldState) -> bool {
    is_success(&oracle_complete(scene))
}
