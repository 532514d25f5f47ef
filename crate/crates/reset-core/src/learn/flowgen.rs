//! Retrieval-based flow generator: stores (feature, first-segment flow) pairs
//! from the demonstration videos and, at prediction time, retargets the
//! nearest stored flow onto the matching object in the current scene by pure
//! translation.

use serde::{Deserialize, Serialize};

use super::{class_centroids, featurize, LearnError};
use crate::datagen::flow::PointFlow;
use crate::datagen::DemoVideo;
use crate::geom::{self, Point};
use crate::sim::{observe, ObjectClass, Observation};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowEntry {
    pub feature: Vec<f64>,
    pub flow: PointFlow,
    /// Class of the object the demonstration moved in this segment.
    pub moved_class: ObjectClass,
    /// First-frame centroid of the stored flow; the retargeting anchor.
    pub anchor_centroid: Point,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowGenerator {
    pub memory: Vec<FlowEntry>,
    pub k: usize,
}

/// Build the retrieval memory from demonstrations that contain motion.
pub fn fit_flow(demos: &[DemoVideo], k: usize, master_seed: u64) -> Result<FlowGenerator, LearnError> {
    if demos.is_empty() {
        return Err(LearnError::EmptyTrainingSet);
    }
    let mut memory = Vec::new();
    for (di, demo) in demos.iter().enumerate() {
        let Some(flow) = demo.first_segment_flow() else {
            continue;
        };
        let first = &demo.states[0];
        let segment_end = demo.states.len().min(crate::datagen::F_RAW + 1) - 1;
        let after = &demo.states[segment_end];
        // The single object whose pose changed over the first segment.
        let moved = first
            .objects
            .iter()
            .find(|(spec, pose)| *after.pose(spec.id) != *pose)
            .map(|(spec, _)| spec.class);
        let Some(moved_class) = moved else {
            continue;
        };
        let mut rng = crate::rng::stream(master_seed, "flow-obs", di as u64);
        let obs = observe(first, &mut rng);
        let anchor_centroid = flow.frame_centroid(0);
        memory.push(FlowEntry {
            feature: obs.feature,
            flow,
            moved_class,
            anchor_centroid,
        });
    }
    if memory.is_empty() {
        return Err(LearnError::EmptyFlowMemory);
    }
    Ok(FlowGenerator { memory, k: k.max(1) })
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).powi(2)).sum()
}

/// Predict a restructuring flow for the current observation: retrieve the
/// nearest stored feature and translate its flow so the stored first-frame
/// centroid lands on the candidate object's observed centroid. The candidate
/// is the visible object of the stored moved class whose centroid is nearest
/// the stored anchor; if no object of that class is visible the flow is
/// returned untranslated.
pub fn predict_flow(g: &FlowGenerator, obs: &Observation) -> Result<PointFlow, LearnError> {
    if g.memory.is_empty() {
        return Err(LearnError::EmptyFlowMemory);
    }
    let feature = featurize(obs);
    let entry = g
        .memory
        .iter()
        .min_by(|a, b| {
            sq_dist(&a.feature, &feature)
                .partial_cmp(&sq_dist(&b.feature, &feature))
                .unwrap()
        })
        .unwrap();

    let candidates = class_centroids(&obs.keypoints, entry.moved_class);
    let delta = candidates
        .iter()
        .min_by(|a, b| {
            geom::dist(**a, entry.anchor_centroid)
                .partial_cmp(&geom::dist(**b, entry.anchor_centroid))
                .unwrap()
        })
        .map_or([0.0, 0.0], |c| geom::sub(*c, entry.anchor_centroid));
    Ok(entry.flow.translated(delta))
}
