//! Search boxes for the B-spline control points.

use super::PathError;
use crate::geometry::{Aabb, Point3};

/// Division points splitting the segment into `n - 1` equal parts.
pub fn division_points(start: Point3, target: Point3, n: usize) -> Vec<Point3> {
    (0..n).map(|k| start.lerp(&target, k as f64 / (n - 1) as f64)).collect()
}

/// One box per control point. The end points are pinned (degenerate boxes);
/// interior point `i` spans the division points `i - 1` and `i` and is widened
/// on each axis by `half_width * sqrt(1 - dir_a^2)`, where `dir` is the unit
/// direction of the segment. The vertical widening is capped at
/// `max_vertical_half_width`.
pub fn control_point_bounds(
    start: Point3,
    target: Point3,
    n: usize,
    half_width: f64,
    max_vertical_half_width: f64,
) -> Result<Vec<Aabb>, PathError> {
    if n < 2 {
        return Err(PathError::InvalidParameter("need at least 2 control points".into()));
    }
    if !(start.is_finite() && target.is_finite()) {
        return Err(PathError::InvalidParameter("non-finite end point".into()));
    }
    let d = start.distance(&target);
    if d <= 0.0 {
        return Err(PathError::InvalidParameter("start and target coincide".into()));
    }
    if !(half_width >= 0.0 && max_vertical_half_width >= 0.0) {
        return Err(PathError::InvalidParameter("negative corridor width".into()));
    }
    let dir = (target - start) * (1.0 / d);
    let widen = |a: usize| {
        let w = half_width * (1.0 - dir.axis(a).powi(2)).max(0.0).sqrt();
        if a == 2 { w.min(max_vertical_half_width) } else { w }
    };
    let pad = Point3::new(widen(0), widen(1), widen(2));
    let div = division_points(start, target, n);
    let mut boxes = Vec::with_capacity(n);
    boxes.push(Aabb::new(start, start));
    for i in 1..n - 1 {
        let (a, b) = (div[i - 1], div[i]);
        let lo = Point3::new(a.x.min(b.x), a.y.min(b.y), a.z.min(b.z)) - pad;
        let hi = Point3::new(a.x.max(b.x), a.y.max(b.y), a.z.max(b.z)) + pad;
        boxes.push(Aabb::new(lo, hi));
    }
    boxes.push(Aabb::new(target, target));
    Ok(boxes)
}
