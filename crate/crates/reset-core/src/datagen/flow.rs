//! Point flows: dense tracks of object keypoints over a state sequence, the
//! fixed-horizon temporal downsampler, and displacement-based motion parsing.

use serde::{Deserialize, Serialize};

use crate::geom::{self, Point};
use crate::sim::{object_keypoints, WorldState, KEYPOINTS_PER_OBJECT};

/// Horizon every flow is downsampled to before learning.
pub const FLOW_HORIZON: usize = 18;

/// Net-displacement threshold for deciding that a point or object moved.
pub const DELTA_MOVE: f64 = 0.02;
/// Per-frame speed threshold for the motion window.
pub const V_MIN: f64 = 0.005;

/// An `F x P x 2` track of scene points over time, stored frame-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointFlow {
    pub frames: usize,
    pub points: usize,
    pub data: Vec<Point>,
}

impl PointFlow {
    pub fn new(frames: usize, points: usize, data: Vec<Point>) -> Self {
        assert_eq!(data.len(), frames * points);
        PointFlow {
            frames,
            points,
            data,
        }
    }

    pub fn empty() -> Self {
        PointFlow {
            frames: 0,
            points: 0,
            data: Vec::new(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.points == 0 || self.frames == 0
    }

    pub fn at(&self, frame: usize, point: usize) -> Point {
        self.data[frame * self.points + point]
    }

    pub fn frame(&self, frame: usize) -> &[Point] {
        &self.data[frame * self.points..(frame + 1) * self.points]
    }

    pub fn frame_centroid(&self, frame: usize) -> Point {
        geom::centroid(self.frame(frame))
    }

    /// Translate every point of every frame by `delta`.
    pub fn translated(&self, delta: Point) -> PointFlow {
        PointFlow {
            frames: self.frames,
            points: self.points,
            data: self.data.iter().map(|p| geom::add(*p, delta)).collect(),
        }
    }

    /// Flat L2 distance between two flows of identical shape.
    pub fn l2_distance(&self, other: &PointFlow) -> f64 {
        assert_eq!(self.frames, other.frames);
        assert_eq!(self.points, other.points);
        self.data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2))
            .sum::<f64>()
            .sqrt()
    }
}

/// Track the keypoints of every object that moved more than `DELTA_MOVE`
/// anywhere in the sequence. Noise-free ground-truth tracks at the raw frame
/// rate; points are grouped contiguously per object in ascending id order.
/// Returns an empty flow when nothing moved.
pub fn extract_flow(states: &[WorldState]) -> PointFlow {
    assert!(states.len() >= 2, "need at least two frames");
    let first = &states[0];
    let mut moving_ids: Vec<u32> = Vec::new();
    for (spec, _) in &first.objects {
        let base = object_keypoints(spec, first.pose(spec.id));
        let moved = states.iter().skip(1).any(|s| {
            let kps = object_keypoints(s.spec(spec.id), s.pose(spec.id));
            kps.iter()
                .zip(base.iter())
                .any(|(a, b)| geom::dist(*a, *b) > DELTA_MOVE)
        });
        if moved {
            moving_ids.push(spec.id);
        }
    }
    if moving_ids.is_empty() {
        return PointFlow::empty();
    }

    let points = moving_ids.len() * KEYPOINTS_PER_OBJECT;
    let mut data = Vec::with_capacity(states.len() * points);
    for s in states {
        for id in &moving_ids {
            data.extend(object_keypoints(s.spec(*id), s.pose(*id)));
        }
    }
    PointFlow::new(states.len(), points, data)
}

/// Resample a flow onto `FLOW_HORIZON` uniformly spaced time fractions by
/// per-point linear interpolation. Both endpoints are preserved exactly, and
/// constant-velocity tracks are reproduced to machine precision.
pub fn downsample_flow(flow: &PointFlow) -> PointFlow {
    assert!(flow.frames >= 2, "need at least two frames");
    let out_frames = FLOW_HORIZON;
    let mut data = Vec::with_capacity(out_frames * flow.points);
    let last = (flow.frames - 1) as f64;
    for k in 0..out_frames {
        let t = if k == out_frames - 1 {
            last
        } else {
            last * k as f64 / (out_frames - 1) as f64
        };
        let lo = t.floor() as usize;
        let hi = (lo + 1).min(flow.frames - 1);
        let frac = t - lo as f64;
        for p in 0..flow.points {
            let a = flow.at(lo, p);
            let b = flow.at(hi, p);
            data.push([
                a[0] + frac * (b[0] - a[0]),
                a[1] + frac * (b[1] - a[1]),
            ]);
        }
    }
    PointFlow::new(out_frames, flow.points, data)
}

/// Result of displacement-based motion parsing.
#[derive(Debug, Clone, PartialEq)]
pub struct MotionWindow {
    /// Axis-aligned first-frame extent of the moving points: (min, max).
    pub bbox: (Point, Point),
    pub start_frame: usize,
    pub end_frame: usize,
    /// Indices of the points whose net displacement exceeded the threshold.
    pub moving_points: Vec<usize>,
}

/// Select the points with net displacement above `delta_move`, box them at
/// their first-frame positions, and bound the motion in time by the first and
/// last frame transition where any selected point exceeds `V_MIN`.
/// Returns `None` when no point moves far enough.
pub fn locate_moving(flow: &PointFlow, delta_move: f64) -> Option<MotionWindow> {
    assert!(flow.points >= 1);
    let moving: Vec<usize> = (0..flow.points)
        .filter(|p| geom::dist(flow.at(flow.frames - 1, *p), flow.at(0, *p)) > delta_move)
        .collect();
    if moving.is_empty() {
        return None;
    }

    let mut min = [f64::INFINITY; 2];
    let mut max = [f64::NEG_INFINITY; 2];
    for p in &moving {
        let pt = flow.at(0, *p);
        min[0] = min[0].min(pt[0]);
        min[1] = min[1].min(pt[1]);
        max[0] = max[0].max(pt[0]);
        max[1] = max[1].max(pt[1]);
    }

    let mut start = None;
    let mut end = 0;
    for f in 0..flow.frames - 1 {
        let active = moving
            .iter()
            .any(|p| geom::dist(flow.at(f + 1, *p), flow.at(f, *p)) > V_MIN);
        if active {
            if start.is_none() {
                start = Some(f);
            }
            end = f + 1;
        }
    }
    let start_frame = start.unwrap_or(0);
    Some(MotionWindow {
        bbox: (min, max),
        start_frame,
        end_frame: end.max(start_frame),
        moving_points: moving,
    })
}
