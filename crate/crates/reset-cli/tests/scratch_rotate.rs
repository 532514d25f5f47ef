use reset_cli::config::ExperimentConfig;
use reset_cli::orchestrate::{train_task, Method};
use reset_core::rng::derive_seed;
use reset_core::{
    fit_reduction, gen_play, reset_rollout, sample_scenario, LearnedReducer, Outcome, Split, Task,
};

#[test]
#[ignore]
fn diag_rotate_failures() {
    let mut cfg = ExperimentConfig::default();
    cfg.seed = derive_seed(42, "sweep", 1);
    let play = gen_play(
        cfg.data.play_episodes,
        derive_seed(cfg.seed, "play", 0),
        cfg.theta(),
    );
    let reduction = fit_reduction(&play, cfg.train.lambda_cls, cfg.train.lambda_reg).unwrap();
    let (bundle, _, _) = train_task(&cfg, Task::RotatePlace, &play, &reduction, cfg.seed).unwrap();

    let mut fails = 0;
    for i in 0..50 {
        let mut rng = reset_core::rng::stream(cfg.seed, "diag-scene", i);
        let scene = sample_scenario(Task::RotatePlace, Split::Ood, &mut rng);
        let reducer = LearnedReducer {
            flowgen: &bundle.flowgen,
            reduction: &bundle.reduction,
        };
        let trace = reset_rollout(
            &bundle.score,
            bundle.c_hat,
            &reducer,
            &bundle.base,
            &scene,
            cfg.eval.m_max,
            derive_seed(cfg.seed, "diag-roll", i),
        );
        if trace.outcome != Outcome::Success {
            fails += 1;
            let theta0 = scene.pose(0).theta;
            let thetaf = trace.final_state.pose(0).theta;
            let pos = trace.final_state.pose(0).position();
            println!(
                "#{i} {:?} theta0={:.3} thetaf={:.3} pos=({:.3},{:.3}) steps={} prims={:?} scores={:?}",
                trace.outcome,
                theta0,
                thetaf,
                pos[0],
                pos[1],
                trace.reduction_steps.len(),
                trace
                    .reduction_steps
                    .iter()
                    .map(|s| (s.primitive.class, s.primitive.params[2]))
                    .collect::<Vec<_>>(),
                trace
                    .reduction_steps
                    .iter()
                    .map(|s| (s.score_before, s.score_after))
                    .collect::<Vec<_>>()
            );
        }
    }
    println!("fails={fails}/50  (method {:?})", Method::Reset);
}
