//! Clamped uniform B-splines.

use serde::{Deserialize, Serialize};

use super::PathError;
use crate::geometry::Point3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct BSplineConfig {
    pub n_control_points: usize,
    /// Curve order (degree + 1).
    pub order: usize,
    pub samples: usize,
}

impl Default for BSplineConfig {
    fn default() -> Self {
        Self { n_control_points: 8, order: 4, samples: 64 }
    }
}

impl BSplineConfig {
    pub fn validate(&self) -> Result<(), PathError> {
        if self.n_control_points < 2 {
            return Err(PathError::InvalidParameter("need at least 2 control points".into()));
        }
        if self.order < 2 {
            return Err(PathError::InvalidParameter(format!("order must be >= 2, got {}", self.order)));
        }
        if self.n_control_points < self.order {
            return Err(PathError::InvalidParameter(format!(
                "{} control points cannot carry an order-{} curve",
                self.n_control_points, self.order
            )));
        }
        if self.samples < 2 * self.n_control_points {
            return Err(PathError::InvalidParameter(format!(
                "samples ({}) must be at least twice the control points ({})",
                self.samples, self.n_control_points
            )));
        }
        Ok(())
    }
}

/// Clamped uniform knot vector: `order` zeros, evenly spaced interior knots,
/// `order` ones.
pub fn clamped_knots(n: usize, order: usize) -> Vec<f64> {
    let interior = n - order;
    let mut knots = vec![0.0; order];
    knots.extend((1..=interior).map(|i| i as f64 / (interior + 1) as f64));
    knots.extend(std::iter::repeat_n(1.0, order));
    knots
}

/// Values of all `n` basis functions of the given order at `u` in `[0, 1]`
/// (Cox-de Boor recursion).
pub fn basis_functions(knots: &[f64], n: usize, order: usize, u: f64) -> Vec<f64> {
    let u = u.clamp(0.0, 1.0);
    // Knot span index with knots[span] <= u < knots[span + 1]; the right end
    // maps onto the last non-empty span.
    let span = if u >= 1.0 {
        n - 1
    } else {
        (order - 1..n).rfind(|&i| knots[i] <= u).unwrap_or(order - 1)
    };
    let mut out = vec![0.0; n];
    // Degree-0 start, then raise degree in place over the window of
    // `order` functions that can be non-zero.
    let mut local = vec![0.0; order];
    local[order - 1] = 1.0;
    for k in 2..=order {
        // Functions of order k supported on span: indices span-k+1 ..= span.
        for j in 0..k {
            let i = span + 1 - k + j;
            let left = if j > 0 { local[order - k + j] } else { 0.0 };
            let right = if j + 1 < k { local[order - k + j + 1] } else { 0.0 };
            let mut v = 0.0;
            let d1 = knots[i + k - 1] - knots[i];
            if d1 > 0.0 {
                v += (u - knots[i]) / d1 * left;
            }
            let d2 = knots[i + k] - knots[i + 1];
            if d2 > 0.0 {
                v += (knots[i + k] - u) / d2 * right;
            }
            local[order - k + j] = v;
        }
    }
    for j in 0..order {
        out[span + 1 - order + j] = local[j];
    }
    out
}

/// Sample-by-control-point blending matrix for a fixed configuration. Curves
/// are then a matrix product, which keeps per-particle evaluation cheap.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisTable {
    n: usize,
    rows: Vec<Vec<f64>>,
}

impl BasisTable {
    pub fn new(cfg: &BSplineConfig) -> Result<Self, PathError> {
        cfg.validate()?;
        let (n, k) = (cfg.n_control_points, cfg.order);
        let knots = clamped_knots(n, k);
        let rows = (0..cfg.samples)
            .map(|j| basis_functions(&knots, n, k, j as f64 / (cfg.samples - 1) as f64))
            .collect();
        Ok(Self { n, rows })
    }

    pub fn evaluate(&self, control: &[Point3]) -> Vec<Point3> {
        assert_eq!(control.len(), self.n, "control point count mismatch");
        self.rows
            .iter()
            .map(|w| {
                w.iter()
                    .zip(control)
                    .fold(Point3::ORIGIN, |acc, (&b, p)| if b == 0.0 { acc } else { acc + *p * b })
            })
            .collect()
    }
}

/// Samples the clamped B-spline through `control` uniformly in parameter.
pub fn bspline_curve(control: &[Point3], cfg: &BSplineConfig) -> Result<Vec<Point3>, PathError> {
    if control.len() != cfg.n_control_points {
        return Err(PathError::InvalidParameter(format!(
            "expected {} control points, got {}",
            cfg.n_control_points,
            control.len()
        )));
    }
    Ok(BasisTable::new(cfg)?.evaluate(control))
}

/// Polyline length of the samples.
pub fn path_length(samples: &[Point3]) -> f64 {
    samples.windows(2).map(|w| w[0].distance(&w[1])).sum()
}

pub fn path_flight_time(samples: &[Point3], vehicle_speed: f64) -> Result<f64, PathError> {
    if !(vehicle_speed > 0.0 && vehicle_speed.is_finite()) {
        return Err(PathError::InvalidParameter(format!("vehicle speed must be positive, got {vehicle_speed}")));
    }
    Ok(path_length(samples) / vehicle_speed)
}
