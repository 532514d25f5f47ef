//! Learned components: feature extraction, the scene-scoring model, the
//! retrieval-based flow generator, the flow-to-primitive reduction policy,
//! and the behavior-cloned base policy.
//!
//! Everything is built on two trainable function classes implemented from
//! first principles in [`linalg`]: ridge least squares and multinomial
//! logistic regression.

pub mod base;
pub mod flowgen;
pub mod linalg;
pub mod reduction;
pub mod score;

use thiserror::Error;

use crate::geom::{self, Point};
use crate::sim::{Keypoint, ObjectClass, Observation, BOUNDARY_KEYPOINTS, KEYPOINTS_PER_OBJECT};

/// Fixed feature length: five slots per object class, a two-way instruction
/// one-hot, and a constant bias slot. Identical across tasks.
pub const FEATURE_LEN: usize = ObjectClass::ALL.len() * 5 + 2 + 1;
/// Index of the constant bias slot (always the last entry).
pub const BIAS_SLOT: usize = FEATURE_LEN - 1;

#[derive(Debug, Error)]
pub enum LearnError {
    #[error("empty training set")]
    EmptyTrainingSet,
    #[error("training data is missing primitive class {0}")]
    MissingClass(&'static str),
    #[error("flow memory is empty: no demonstration contains motion")]
    EmptyFlowMemory,
    #[error(
        "score calibration failed: anchor p90 {anchor_p90:.4} is not below non-anchor p10 {non_anchor_p10:.4}"
    )]
    CalibrationFailed {
        anchor_p90: f64,
        non_anchor_p10: f64,
    },
    #[error("linear solve failed: singular normal equations")]
    Singular,
    #[error("feature dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

/// Canonical unit directions of the boundary keypoint ring at zero rotation.
fn canonical_ring() -> Vec<Point> {
    (0..BOUNDARY_KEYPOINTS)
        .map(|k| {
            let phi = 2.0 * std::f64::consts::PI * k as f64 / BOUNDARY_KEYPOINTS as f64;
            [phi.cos(), phi.sin()]
        })
        .collect()
}

/// Per-class keypoint groups in emission order (objects of one class appear
/// as contiguous runs of `KEYPOINTS_PER_OBJECT` points).
pub fn class_groups(keypoints: &[Keypoint], class: ObjectClass) -> Vec<Vec<Point>> {
    let pts: Vec<Point> = keypoints
        .iter()
        .filter(|k| k.class == class)
        .map(|k| k.point)
        .collect();
    pts.chunks(KEYPOINTS_PER_OBJECT)
        .map(<[Point]>::to_vec)
        .collect()
}

/// Centroid of each visible object of `class`, in emission (id) order.
pub fn class_centroids(keypoints: &[Keypoint], class: ObjectClass) -> Vec<Point> {
    class_groups(keypoints, class)
        .iter()
        .map(|g| geom::centroid(g))
        .collect()
}

/// Deterministic feature encoding of a keypoint view: per class in fixed
/// order `(mean_x, mean_y, visibility, cos theta_hat, sin theta_hat)`, with
/// orientation estimated from the first visible object's boundary ring by
/// rigid alignment against the canonical ring; invisible classes are zeroed.
pub fn featurize_keypoints(keypoints: &[Keypoint], instruction: Option<u8>) -> Vec<f64> {
    let mut feature = Vec::with_capacity(FEATURE_LEN);
    let ring = canonical_ring();
    for class in ObjectClass::ALL {
        let groups = class_groups(keypoints, class);
        if groups.is_empty() {
            feature.extend_from_slice(&[0.0; 5]);
            continue;
        }
        let all: Vec<Point> = groups.iter().flatten().copied().collect();
        let mean = geom::centroid(&all);
        let theta = if groups[0].len() >= BOUNDARY_KEYPOINTS {
            geom::procrustes_rotation(&ring, &groups[0][..BOUNDARY_KEYPOINTS])
        } else {
            0.0
        };
        feature.push(mean[0]);
        feature.push(mean[1]);
        feature.push(1.0);
        feature.push(theta.cos());
        feature.push(theta.sin());
    }
    match instruction {
        Some(0) => feature.extend_from_slice(&[1.0, 0.0]),
        Some(_) => feature.extend_from_slice(&[0.0, 1.0]),
        None => feature.extend_from_slice(&[0.0, 0.0]),
    }
    feature.push(1.0);
    debug_assert_eq!(feature.len(), FEATURE_LEN);
    feature
}

/// Feature encoding of an observation (recomputes from the keypoints; equal
/// to the feature the observation was built with).
pub fn featurize(obs: &Observation) -> Vec<f64> {
    featurize_keypoints(&obs.keypoints, obs.instruction)
}
