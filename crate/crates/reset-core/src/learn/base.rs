//! Behavior-cloned base policy (ridge from features to primitive parameters,
//! one fixed primitive class per task step) and the retrieval ablation that
//! maps observations straight to play primitives.

use serde::{Deserialize, Serialize};

use super::linalg::RidgeRegressor;
use super::{featurize, LearnError, BIAS_SLOT};
use crate::datagen::{DemoVideo, ExpertDemo, PlayRecord};
use crate::geom;
use crate::sim::{ActionPrimitive, Observation, PrimitiveClass, Task};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaseModel {
    pub task: Task,
    pub class: PrimitiveClass,
    pub regressor: RidgeRegressor,
    /// Post-hoc weight norm, recorded for the capacity bound.
    pub weight_norm: f64,
}

/// Behavior-clone the expert pairs: features to primitive parameters, with
/// the primitive class fixed by the task script position.
pub fn fit_base(task: Task, demos: &[ExpertDemo], lambda: f64) -> Result<BaseModel, LearnError> {
    if demos.is_empty() || demos.iter().all(|d| d.pairs.is_empty()) {
        return Err(LearnError::EmptyTrainingSet);
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut class = None;
    for demo in demos {
        for (obs, action) in &demo.pairs {
            xs.push(obs.feature.clone());
            ys.push(action.params.to_vec());
            class.get_or_insert(action.class);
        }
    }
    let regressor = RidgeRegressor::fit(&xs, &ys, lambda, Some(BIAS_SLOT))?;
    let weight_norm = regressor.weight_norm();
    Ok(BaseModel {
        task,
        class: class.unwrap(),
        regressor,
        weight_norm,
    })
}

pub fn predict_base(model: &BaseModel, obs: &Observation) -> ActionPrimitive {
    let raw = model.regressor.predict(&obs.feature);
    ActionPrimitive {
        class: model.class,
        params: [
            geom::clamp01(raw[0]),
            geom::clamp01(raw[1]),
            geom::clamp01(raw[2]),
            geom::clamp01(raw[3]),
        ],
    }
}

/// The no-flow ablation: each demonstration's initial observation is aligned
/// to the play primitive whose flow is closest in plain L2 distance, and
/// prediction is nearest-neighbor retrieval over observation features (the
/// stored primitive is replayed verbatim, with no retargeting).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NaiveModel {
    pub memory: Vec<(Vec<f64>, ActionPrimitive)>,
}

pub fn fit_naive(
    demos: &[DemoVideo],
    play: &[PlayRecord],
    master_seed: u64,
) -> Result<NaiveModel, LearnError> {
    if demos.is_empty() || play.is_empty() {
        return Err(LearnError::EmptyTrainingSet);
    }
    let mut memory = Vec::new();
    for (di, demo) in demos.iter().enumerate() {
        let Some(flow) = demo.first_segment_flow() else {
            continue;
        };
        let aligned = play
            .iter()
            .filter(|r| r.flow.points == flow.points && r.flow.frames == flow.frames)
            .min_by(|a, b| {
                a.flow
                    .l2_distance(&flow)
                    .partial_cmp(&b.flow.l2_distance(&flow))
                    .unwrap()
            });
        let Some(record) = aligned else {
            continue;
        };
        let mut rng = crate::rng::stream(master_seed, "naive-obs", di as u64);
        let obs = crate::sim::observe(&demo.states[0], &mut rng);
        memory.push((obs.feature, record.primitive));
    }
    if memory.is_empty() {
        return Err(LearnError::EmptyFlowMemory);
    }
    Ok(NaiveModel { memory })
}

pub fn predict_naive(model: &NaiveModel, obs: &Observation) -> ActionPrimitive {
    let feature = featurize(obs);
    let sq = |a: &[f64], b: &[f64]| -> f64 {
        a.iter().zip(b.iter()).map(|(x, y)| (x - y).powi(2)).sum()
    };
    model
        .memory
        .iter()
        .min_by(|a, b| {
            sq(&a.0, &feature)
                .partial_cmp(&sq(&b.0, &feature))
                .unwrap()
        })
        .map(|(_, action)| *action)
        .expect("memory nonempty after fit")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datagen::{gen_expert, gen_play, script_demo};
    use crate::rng::stream;
    use crate::sim::tasks::{sample_scenario, Split};
    use crate::sim::{apply_primitive, is_success, observe, Theta};

    #[test]
    fn base_memorizes_a_single_demo_near_exactly() {
        let demos = gen_expert(Task::PickPlace, 1, 801, Theta::default());
        let model = fit_base(Task::PickPlace, &demos, 1e-8).unwrap();
        let (obs, action) = &demos[0].pairs[0];
        let predicted = predict_base(&model, obs);
        for (p, t) in predicted.params.iter().zip(action.params.iter()) {
            assert!((p - t).abs() < 1e-4);
        }
    }

    #[test]
    fn base_succeeds_in_distribution() {
        let demos = gen_expert(Task::PickPlace, 20, 803, Theta::default());
        let model = fit_base(Task::PickPlace, &demos, 4e-3).unwrap();
        let mut successes = 0;
        let total = 50;
        for i in 0..total {
            let mut rng = stream(805, "eval", i);
            let scene = sample_scenario(Task::PickPlace, Split::InDist, &mut rng);
            let obs = observe(&scene, &mut rng);
            let action = predict_base(&model, &obs);
            let (next, _) = apply_primitive(&scene, &action, &mut rng);
            if is_success(&next) {
                successes += 1;
            }
        }
        assert!(successes * 100 >= total * 90, "successes={successes}/{total}");
    }

    #[test]
    fn base_fails_on_hidden_targets() {
        let demos = gen_expert(Task::RevealPick, 20, 807, Theta::default());
        let model = fit_base(Task::RevealPick, &demos, 4e-3).unwrap();
        let mut successes = 0;
        let total = 50;
        for i in 0..total {
            let mut rng = stream(809, "eval", i);
            let scene = sample_scenario(Task::RevealPick, Split::Ood, &mut rng);
            let obs = observe(&scene, &mut rng);
            let action = predict_base(&model, &obs);
            let (next, _) = apply_primitive(&scene, &action, &mut rng);
            if is_success(&next) {
                successes += 1;
            }
        }
        assert!(successes * 100 <= total * 20, "successes={successes}/{total}");
    }

    #[test]
    fn naive_replays_the_aligned_primitive_on_its_own_scene() {
        let demos: Vec<DemoVideo> = (0..10)
            .map(|i| {
                let mut rng = stream(811, "demo", i);
                let scene = sample_scenario(Task::RevealPick, Split::Ood, &mut rng);
                script_demo(Task::RevealPick, &scene, &mut rng).unwrap()
            })
            .collect();
        let play = gen_play(200, 813, Theta::default());
        let model = fit_naive(&demos, &play, 815).unwrap();
        // Replaying a training observation returns its aligned primitive.
        let mut rng = stream(815, "naive-obs", 0);
        let obs = observe(&demos[0].states[0], &mut rng);
        let predicted = predict_naive(&model, &obs);
        assert_eq!(predicted, model.memory[0].1);
    }
}
