//! Flow-to-primitive reduction policy: a compact flow descriptor, a
//! multinomial classifier over the three primitive classes, and per-class
//! ridge regressors for the primitive parameters, trained jointly under the
//! weighted classification-plus-regression objective.

use serde::{Deserialize, Serialize};

use super::linalg::{RidgeRegressor, SoftmaxClassifier};
use super::{featurize, LearnError};
use crate::datagen::flow::PointFlow;
use crate::datagen::PlayRecord;
use crate::geom::{self, normalize_angle};
use crate::sim::{ActionPrimitive, Observation, PrimitiveClass};

/// Descriptor entries: first centroid (2), last centroid (2), net
/// displacement (2), rigid rotation between first and last frame as
/// (cos, sin), mean per-point path length, and the active-motion fraction of
/// the horizon.
pub const DESCRIPTOR_LEN: usize = 10;

/// Ridge strength for the per-class parameter regressors.
const PARAM_RIDGE: f64 = 1e-6;
/// Full-batch gradient descent schedule for the classifier.
const GD_STEP: f64 = 0.1;
const GD_ITERS: usize = 2000;

/// Compact geometric summary of a flow.
///
/// The rotation angle comes from the closed-form rigid alignment of the
/// centered first and last frames; flows with fewer than two points have no
/// defined rotation and report (1, 0). The active fraction is the share of
/// frame transitions carrying at least a tenth of the peak per-transition
/// motion; it separates brief carried transfers (the tracker holds position
/// while the object is in hand) from whole-segment contact motions, which
/// are otherwise indistinguishable in this summary.
pub fn flow_descriptor(flow: &PointFlow) -> Vec<f64> {
    assert!(flow.frames >= 2, "descriptor needs at least two frames");
    assert!(flow.points >= 1, "descriptor needs at least one point");
    let first = flow.frame_centroid(0);
    let last = flow.frame_centroid(flow.frames - 1);
    let disp = geom::sub(last, first);

    let (cos_a, sin_a) = if flow.points >= 2 {
        let angle = geom::procrustes_rotation(flow.frame(0), flow.frame(flow.frames - 1));
        (angle.cos(), angle.sin())
    } else {
        (1.0, 0.0)
    };

    let mut speeds = vec![0.0; flow.frames - 1];
    for p in 0..flow.points {
        for (f, s) in speeds.iter_mut().enumerate() {
            *s += geom::dist(flow.at(f + 1, p), flow.at(f, p));
        }
    }
    for s in &mut speeds {
        *s /= flow.points as f64;
    }
    let mean_path: f64 = speeds.iter().sum();
    let peak = speeds.iter().cloned().fold(0.0, f64::max);
    let active = if peak > 0.0 {
        speeds.iter().filter(|s| **s > 0.1 * peak).count() as f64 / speeds.len() as f64
    } else {
        0.0
    };

    vec![
        first[0], first[1], last[0], last[1], disp[0], disp[1], cos_a, sin_a, mean_path, active,
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReductionModel {
    pub classifier: SoftmaxClassifier,
    /// Per-dimension standardization applied to the classifier input (the
    /// regressors see the raw input). Constant dimensions pass through
    /// unchanged so the bias slot keeps acting as an intercept.
    pub input_mean: Vec<f64>,
    pub input_std: Vec<f64>,
    /// One parameter regressor per primitive class, in class-index order.
    pub regressors: Vec<RidgeRegressor>,
    pub lambda_cls: f64,
    pub lambda_reg: f64,
    /// Weighted training objective at the end of fitting.
    pub train_loss: f64,
}

fn model_input(flow: &PointFlow, obs: &Observation) -> Vec<f64> {
    let mut x = flow_descriptor(flow);
    x.extend(featurize(obs));
    x
}

fn standardize(x: &[f64], mean: &[f64], std: &[f64]) -> Vec<f64> {
    x.iter()
        .zip(mean.iter().zip(std.iter()))
        .map(|(v, (m, s))| (v - m) / s)
        .collect()
}

fn fit_standardization(xs: &[Vec<f64>]) -> (Vec<f64>, Vec<f64>) {
    let n = xs.len() as f64;
    let d = xs[0].len();
    let mut mean = vec![0.0; d];
    for x in xs {
        for (m, v) in mean.iter_mut().zip(x.iter()) {
            *m += v / n;
        }
    }
    let mut std = vec![0.0; d];
    for x in xs {
        for (j, v) in x.iter().enumerate() {
            std[j] += (v - mean[j]).powi(2) / n;
        }
    }
    for j in 0..d {
        std[j] = std[j].sqrt();
        if std[j] < 1e-9 {
            mean[j] = 0.0;
            std[j] = 1.0;
        }
    }
    (mean, std)
}

/// Fit the classifier and the per-class regressors on play records. Requires
/// every primitive class to be represented.
pub fn fit_reduction(
    play: &[PlayRecord],
    lambda_cls: f64,
    lambda_reg: f64,
) -> Result<ReductionModel, LearnError> {
    if play.is_empty() {
        return Err(LearnError::EmptyTrainingSet);
    }
    let xs: Vec<Vec<f64>> = play
        .iter()
        .map(|r| model_input(&r.flow, &r.pre_observation))
        .collect();
    let labels: Vec<usize> = play.iter().map(|r| r.primitive.class.index()).collect();

    for class in PrimitiveClass::ALL {
        if !labels.contains(&class.index()) {
            return Err(LearnError::MissingClass(class.name()));
        }
    }

    let (input_mean, input_std) = fit_standardization(&xs);
    let std_xs: Vec<Vec<f64>> = xs
        .iter()
        .map(|x| standardize(x, &input_mean, &input_std))
        .collect();
    let classifier = SoftmaxClassifier::fit(
        &std_xs,
        &labels,
        PrimitiveClass::ALL.len(),
        lambda_cls,
        GD_STEP,
        GD_ITERS,
    )?;

    let mut regressors = Vec::with_capacity(PrimitiveClass::ALL.len());
    let mut mse_total = 0.0;
    for class in PrimitiveClass::ALL {
        let idx: Vec<usize> = (0..play.len())
            .filter(|i| play[*i].primitive.class == class)
            .collect();
        let cxs: Vec<Vec<f64>> = idx.iter().map(|i| xs[*i].clone()).collect();
        let cys: Vec<Vec<f64>> = idx
            .iter()
            .map(|i| play[*i].primitive.params.to_vec())
            .collect();
        let bias = crate::learn::FEATURE_LEN - 1 + DESCRIPTOR_LEN;
        let reg = RidgeRegressor::fit(&cxs, &cys, PARAM_RIDGE, Some(bias))?;
        mse_total += reg.train_mse(&cxs, &cys) * idx.len() as f64;
        regressors.push(reg);
    }
    let mse = mse_total / play.len() as f64;

    let ce = if lambda_cls == 0.0 {
        classifier.mean_cross_entropy(&std_xs, &labels)
    } else {
        *classifier.loss_history.last().unwrap() / lambda_cls
    };
    let train_loss = lambda_cls * ce + lambda_reg * mse;

    Ok(ReductionModel {
        classifier,
        input_mean,
        input_std,
        regressors,
        lambda_cls,
        lambda_reg,
        train_loss,
    })
}

/// Map a flow plan plus the current observation to an executable primitive:
/// argmax class, then that class's parameter regressor, with coordinates
/// clamped into the workspace and the rotate padding slot forced to zero.
pub fn predict_primitive(
    model: &ReductionModel,
    flow: &PointFlow,
    obs: &Observation,
) -> ActionPrimitive {
    let x = model_input(flow, obs);
    let std_x = standardize(&x, &model.input_mean, &model.input_std);
    let class = PrimitiveClass::ALL[model.classifier.predict(&std_x)];
    let raw = model.regressors[class.index()].predict(&x);
    let params = match class {
        PrimitiveClass::PickPlace | PrimitiveClass::PushPull => [
            geom::clamp01(raw[0]),
            geom::clamp01(raw[1]),
            geom::clamp01(raw[2]),
            geom::clamp01(raw[3]),
        ],
        PrimitiveClass::Rotate => [
            geom::clamp01(raw[0]),
            geom::clamp01(raw[1]),
            normalize_angle(raw[2]),
            0.0,
        ],
    };
    ActionPrimitive { class, params }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datagen::gen_play;
    use crate::sim::Theta;
    use crate::geom::Point;

    #[test]
    fn descriptor_reads_rotation_and_translation() {
        // Quarter-turn of a ring about its centroid, slightly shifted.
        let ring: Vec<Point> = (0..4)
            .map(|k| {
                let phi = std::f64::consts::PI * k as f64 / 2.0;
                [0.5 + 0.1 * phi.cos(), 0.5 + 0.1 * phi.sin()]
            })
            .collect();
        let mut data = Vec::new();
        for f in 0..18 {
            let t = f as f64 / 17.0;
            let angle = t * std::f64::consts::FRAC_PI_2;
            for p in &ring {
                let rel = geom::sub(*p, [0.5, 0.5]);
                let rot = geom::rotate(rel, angle);
                data.push(geom::add(geom::add(rot, [0.5, 0.5]), [0.02 * t, 0.0]));
            }
        }
        let flow = PointFlow::new(18, 4, data);
        let d = flow_descriptor(&flow);
        assert!((d[6] - 0.0f64.max((std::f64::consts::FRAC_PI_2).cos())).abs() < 1e-9);
        assert!((d[7] - (std::f64::consts::FRAC_PI_2).sin()).abs() < 1e-9);
        assert!((d[4] - 0.02).abs() < 1e-9);
    }

    #[test]
    fn pure_translation_has_zero_rotation() {
        let pts = [[0.2, 0.2], [0.3, 0.2], [0.25, 0.3]];
        let mut data = Vec::new();
        for f in 0..18 {
            let t = f as f64 / 17.0;
            for p in &pts {
                data.push([p[0] + 0.4 * t, p[1] + 0.1 * t]);
            }
        }
        let flow = PointFlow::new(18, 3, data);
        let d = flow_descriptor(&flow);
        assert!((d[6] - 1.0).abs() < 1e-9);
        assert!(d[7].abs() < 1e-9);
    }

    #[test]
    fn identity_flow_is_all_zero_motion() {
        let data = vec![[0.4, 0.4]; 18 * 2];
        let flow = PointFlow::new(18, 2, data);
        let d = flow_descriptor(&flow);
        assert_eq!(d[4], 0.0);
        assert_eq!(d[5], 0.0);
        assert_eq!(d[8], 0.0);
        assert_eq!(d[9], 0.0);
    }

    #[test]
    fn single_point_flow_reports_identity_rotation() {
        let data: Vec<Point> = (0..18).map(|f| [0.1 + 0.02 * f as f64, 0.5]).collect();
        let flow = PointFlow::new(18, 1, data);
        let d = flow_descriptor(&flow);
        assert_eq!(d[6], 1.0);
        assert_eq!(d[7], 0.0);
    }

    #[test]
    fn zero_classification_weight_keeps_classifier_at_init() {
        let play = gen_play(60, 701, Theta::default());
        let model = fit_reduction(&play, 0.0, 10.0).unwrap();
        assert!(model
            .classifier
            .weights
            .iter()
            .all(|row| row.iter().all(|w| *w == 0.0)));
    }

    #[test]
    fn reduction_separates_classes_on_held_out_play() {
        let play = gen_play(300, 707, Theta::default());
        let (train, test) = play.split_at(240);
        let model = fit_reduction(train, 1.0, 10.0).unwrap();
        let mut correct = 0;
        for rec in test {
            let predicted = predict_primitive(&model, &rec.flow, &rec.pre_observation);
            if predicted.class == rec.primitive.class {
                correct += 1;
            }
        }
        assert!(
            correct * 100 >= test.len() * 95,
            "class accuracy {correct}/{}",
            test.len()
        );
    }

    #[test]
    fn training_loss_is_finite_and_decreasing() {
        let play = gen_play(80, 709, Theta::default());
        let model = fit_reduction(&play, 1.0, 10.0).unwrap();
        assert!(model.train_loss.is_finite());
        for w in model.classifier.loss_history.windows(2) {
            assert!(w[1] <= w[0] + 1e-12);
        }
    }
}
