//! Scene-scoring model: ridge regression from observation features onto the
//! parabolic temporal labels of the demonstration videos, plus the threshold
//! calibration that decides when a scene is ready for the base policy.

use serde::{Deserialize, Serialize};

use super::linalg::RidgeRegressor;
use super::LearnError;
use crate::datagen::DemoVideo;
use crate::sim::{observe, Observation};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreModel {
    pub regressor: RidgeRegressor,
    /// Post-hoc norm of the fitted weights.
    pub weight_norm: f64,
}

/// Fit the scorer on every frame of every demonstration (mean-squared error
/// against the per-frame labels, ridge-regularized).
pub fn fit_score(
    demos: &[DemoVideo],
    lambda: f64,
    master_seed: u64,
) -> Result<ScoreModel, LearnError> {
    if demos.is_empty() {
        return Err(LearnError::EmptyTrainingSet);
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (di, demo) in demos.iter().enumerate() {
        let mut rng = crate::rng::stream(master_seed, "score-obs", di as u64);
        for (state, label) in demo.states.iter().zip(demo.score_labels.iter()) {
            let obs = observe(state, &mut rng);
            xs.push(obs.feature);
            ys.push(vec![*label]);
        }
    }
    let regressor = RidgeRegressor::fit(&xs, &ys, lambda, Some(super::BIAS_SLOT))?;
    let weight_norm = regressor.weight_norm();
    Ok(ScoreModel {
        regressor,
        weight_norm,
    })
}

/// Predicted scene score for one observation; higher means the scene still
/// needs restructuring.
pub fn score(model: &ScoreModel, obs: &Observation) -> f64 {
    model.regressor.predict(&obs.feature)[0]
}

/// Linear-interpolation percentile of an unsorted sample.
fn percentile(values: &[f64], q: f64) -> f64 {
    assert!(!values.is_empty());
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] + frac * (sorted[hi] - sorted[lo])
}

/// Calibrate the switch threshold: the midpoint between the 90th percentile
/// of anchor scores and the 10th percentile of non-anchor scores. Fails when
/// the two percentile intervals invert (the model does not separate).
pub fn calibrate_threshold(
    model: &ScoreModel,
    anchor_obs: &[Observation],
    non_anchor_obs: &[Observation],
) -> Result<f64, LearnError> {
    assert!(!anchor_obs.is_empty() && !non_anchor_obs.is_empty());
    let anchor_scores: Vec<f64> = anchor_obs.iter().map(|o| score(model, o)).collect();
    let non_anchor_scores: Vec<f64> = non_anchor_obs.iter().map(|o| score(model, o)).collect();
    let anchor_p90 = percentile(&anchor_scores, 0.90);
    let non_anchor_p10 = percentile(&non_anchor_scores, 0.10);
    if anchor_p90 >= non_anchor_p10 {
        return Err(LearnError::CalibrationFailed {
            anchor_p90,
            non_anchor_p10,
        });
    }
    Ok(0.5 * (anchor_p90 + non_anchor_p10))
}
