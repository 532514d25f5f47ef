//! Small 2D geometry helpers shared across the simulator and the learners.

use std::f64::consts::PI;

/// A point or displacement in the unit-square workspace.
pub type Point = [f64; 2];

/// Normalize an angle into `(-pi, pi]`.
pub fn normalize_angle(theta: f64) -> f64 {
    let mut a = theta % (2.0 * PI);
    if a <= -PI {
        a += 2.0 * PI;
    } else if a > PI {
        a -= 2.0 * PI;
    }
    // `-0.0` would break byte-identical serialization of otherwise equal states.
    if a == 0.0 {
        a = 0.0;
    }
    a
}

pub fn dist(a: Point, b: Point) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

pub fn add(a: Point, b: Point) -> Point {
    [a[0] + b[0], a[1] + b[1]]
}

pub fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1]]
}

pub fn scale(a: Point, s: f64) -> Point {
    [a[0] * s, a[1] * s]
}

pub fn norm(a: Point) -> f64 {
    (a[0] * a[0] + a[1] * a[1]).sqrt()
}

/// Rotate a point about the origin.
pub fn rotate(p: Point, theta: f64) -> Point {
    let (s, c) = theta.sin_cos();
    [c * p[0] - s * p[1], s * p[0] + c * p[1]]
}

pub fn centroid(points: &[Point]) -> Point {
    let n = points.len() as f64;
    let mut cx = 0.0;
    let mut cy = 0.0;
    for p in points {
        cx += p[0];
        cy += p[1];
    }
    [cx / n, cy / n]
}

/// Optimal rigid rotation angle aligning `from` onto `to` in the least-squares
/// sense. Both point sets are centered on their own centroids first, so the
/// estimate is translation-invariant. Returns 0 for degenerate inputs.
pub fn procrustes_rotation(from: &[Point], to: &[Point]) -> f64 {
    debug_assert_eq!(from.len(), to.len());
    if from.len() < 2 {
        return 0.0;
    }
    let cf = centroid(from);
    let ct = centroid(to);
    let mut a = 0.0;
    let mut b = 0.0;
    for (p, q) in from.iter().zip(to.iter()) {
        let u = sub(*p, cf);
        let v = sub(*q, ct);
        a += u[0] * v[0] + u[1] * v[1];
        b += u[0] * v[1] - u[1] * v[0];
    }
    if a == 0.0 && b == 0.0 {
        return 0.0;
    }
    b.atan2(a)
}

pub fn clamp01(v: f64) -> f64 {
    v.clamp(0.0, 1.0)
}
