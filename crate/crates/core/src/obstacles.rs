//! Stochastic obstacle field between a pair of waypoints.
//!
//! Four obstacle kinds are simulated. Static known obstacles never change.
//! Static uncertain obstacles redraw their radius each step inside a fixed
//! bound. Self-motivated obstacles random-walk. Current-driven obstacles
//! random-walk and grow an uncertainty halo at a rate set by the current.
//!
//! One call to [`ObstacleField::step`] advances the field by one planner
//! iteration. All randomness is drawn from streams keyed by
//! `(field seed, obstacle index, step)`.

use std::f64::consts::FRAC_2_PI;
use std::fmt::Write as _;

use rand::Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::geometry::{Aabb, Point3};
use crate::rng::{self, Stream};
use crate::textfmt::sig;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ObstacleError {
    #[error("invalid operation window: {0}")]
    InvalidWindow(String),
    #[error("cannot place obstacle: {0}")]
    SpawnFailure(String),
    #[error("invalid obstacle parameter: {0}")]
    InvalidParameter(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ObstacleKind {
    StaticKnown,
    StaticUncertain,
    SelfMotivated,
    CurrentDriven,
}

impl ObstacleKind {
    pub const ALL: [ObstacleKind; 4] = [
        ObstacleKind::StaticKnown,
        ObstacleKind::StaticUncertain,
        ObstacleKind::SelfMotivated,
        ObstacleKind::CurrentDriven,
    ];

    pub fn label(self) -> &'static str {
        match self {
            ObstacleKind::StaticKnown => "static-known",
            ObstacleKind::StaticUncertain => "static-uncertain",
            ObstacleKind::SelfMotivated => "self-motivated",
            ObstacleKind::CurrentDriven => "current-driven",
        }
    }
}

/// Number of obstacles of each kind, in [`ObstacleKind::ALL`] order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct KindCounts(pub [usize; 4]);

impl KindCounts {
    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn of(kind: ObstacleKind, n: usize) -> Self {
        let mut c = [0; 4];
        c[kind as usize] = n;
        Self(c)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ObstacleParams {
    /// Scale of the folded normal radius draw.
    pub radius_sigma: f64,
    pub radius_min: f64,
    pub radius_max: f64,
    /// Half-width of a static uncertain obstacle's radius bound, as a fraction
    /// of its nominal radius.
    pub uncertain_spread: f64,
    /// Per-axis standard deviation of a moving obstacle's displacement per step.
    pub motion_sigma: f64,
    /// Standard deviation of the per-obstacle Gaussian state driving halo growth.
    pub noise_sigma: f64,
    /// Scale of the current magnitude draw `|N(0, current_sigma)|`.
    pub current_sigma: f64,
    /// Spawned centres keep `radius * (1 + clearance_ratio) + clearance_margin`
    /// away from both waypoints.
    pub clearance_ratio: f64,
    pub clearance_margin: f64,
}

impl Default for ObstacleParams {
    fn default() -> Self {
        Self {
            radius_sigma: 100.0,
            radius_min: 10.0,
            radius_max: 300.0,
            uncertain_spread: 0.2,
            motion_sigma: 2.0,
            noise_sigma: 1.0,
            current_sigma: 0.3,
            clearance_ratio: 0.5,
            clearance_margin: 50.0,
        }
    }
}

impl ObstacleParams {
    fn check(&self) -> Result<(), ObstacleError> {
        let ok = self.radius_min > 0.0
            && self.radius_min <= self.radius_max
            && self.radius_sigma >= 0.0
            && (0.0..1.0).contains(&self.uncertain_spread)
            && self.motion_sigma >= 0.0
            && self.noise_sigma >= 0.0
            && self.current_sigma >= 0.0
            && self.clearance_ratio >= 0.0
            && self.clearance_margin >= 0.0;
        if ok {
            Ok(())
        } else {
            Err(ObstacleError::InvalidParameter(format!("{self:?}")))
        }
    }

    /// Mean halo growth per step for a current of magnitude `current`.
    pub fn mean_halo_rate(&self, current: f64) -> f64 {
        // E|X| for X ~ N(0, s) is s * sqrt(2 / pi).
        current * self.noise_sigma * FRAC_2_PI.sqrt()
    }
}

/// Axis-aligned operating box for one leg, with the waypoint pair it serves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperationWindow {
    pub bounds: Aabb,
    pub start: Point3,
    pub target: Point3,
}

impl OperationWindow {
    pub fn new(bounds: Aabb, start: Point3, target: Point3) -> Result<Self, ObstacleError> {
        if (0..2).any(|a| bounds.extent(a) <= 0.0) || bounds.extent(2) < 0.0 {
            return Err(ObstacleError::InvalidWindow(format!("non-positive extent {bounds:?}")));
        }
        Ok(Self { bounds, start, target })
    }

    /// Bounding box of the pair, padded on both sides of each horizontal axis
    /// by `inflate` times the pair distance and of the vertical axis by
    /// `inflate` times the depth difference.
    pub fn around(start: Point3, target: Point3, inflate: f64) -> Result<Self, ObstacleError> {
        let d = start.distance(&target);
        if d <= 0.0 {
            return Err(ObstacleError::InvalidWindow("waypoints coincide".into()));
        }
        let pad = [inflate * d, inflate * d, inflate * (target.z - start.z).abs()];
        let lo = |a: usize| start.axis(a).min(target.axis(a)) - pad[a];
        let hi = |a: usize| start.axis(a).max(target.axis(a)) + pad[a];
        Self::new(
            Aabb::new(Point3::new(lo(0), lo(1), lo(2)), Point3::new(hi(0), hi(1), hi(2))),
            start,
            target,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Obstacle {
    pub kind: ObstacleKind,
    pub position: Point3,
    pub radius: f64,
    /// Propagated uncertainty margin added to the radius.
    pub halo: f64,
    /// Nominal radius; static uncertain obstacles redraw around it.
    pub base_radius: f64,
    /// Static uncertain radius bound is `base_radius ± radius_spread`.
    pub radius_spread: f64,
    /// Gaussian state driving halo growth.
    pub noise_state: f64,
}

impl Obstacle {
    pub fn effective_radius(&self) -> f64 {
        self.radius + self.halo
    }

    /// Penetration of `p` into the effective radius, normalised to `[0, 1]`.
    pub fn penetration(&self, p: &Point3) -> f64 {
        let r = self.effective_radius();
        let d = self.position.distance(p);
        if d < r { (r - d) / r } else { 0.0 }
    }

    /// Penetration of the point of segment `a`-`b` closest to the centre.
    pub fn segment_penetration(&self, a: &Point3, b: &Point3) -> f64 {
        let ab = *b - *a;
        let len2 = ab.dot(&ab);
        let t = if len2 > 0.0 { ((self.position - *a).dot(&ab) / len2).clamp(0.0, 1.0) } else { 0.0 };
        self.penetration(&a.lerp(b, t))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObstacleField {
    pub window: OperationWindow,
    pub obstacles: Vec<Obstacle>,
    /// `|V_C|`, m/s.
    pub current_magnitude: f64,
    pub params: ObstacleParams,
    seed: u64,
    steps: u64,
}

fn truncated_normal(rng: &mut Stream, mean: f64, sigma: f64, lo: f64, hi: f64) -> f64 {
    if hi <= lo {
        return 0.5 * (lo + hi);
    }
    if sigma > 0.0 {
        for _ in 0..1000 {
            let z: f64 = rng.sample(StandardNormal);
            let v = mean + sigma * z;
            if v > lo && v < hi {
                return v;
            }
        }
    }
    rng.random_range(lo..hi)
}

fn folded_normal(rng: &mut Stream, sigma: f64) -> f64 {
    let z: f64 = rng.sample(StandardNormal);
    (sigma * z).abs()
}

/// Places `counts` obstacles in `window`.
///
/// Horizontal centre coordinates follow a normal centred on the window,
/// truncated to the window shrunk by the obstacle radius. Depth follows the
/// same law over the window's depth range without the inset. Centres too close
/// to either waypoint are redrawn.
pub fn spawn_obstacles(
    window: OperationWindow,
    counts: KindCounts,
    params: ObstacleParams,
    seed: u64,
) -> Result<ObstacleField, ObstacleError> {
    params.check()?;
    let b = window.bounds;
    let mid = b.center();
    let mut obstacles = Vec::with_capacity(counts.total());
    let mut rng = rng::stream(seed, &[rng::tag::FIELD, u64::MAX]);
    let current_magnitude = folded_normal(&mut rng, params.current_sigma);

    let kinds = ObstacleKind::ALL
        .iter()
        .zip(counts.0)
        .flat_map(|(&k, n)| std::iter::repeat_n(k, n));
    for (idx, kind) in kinds.enumerate() {
        let mut rng = rng::stream(seed, &[rng::tag::FIELD, idx as u64, 0]);
        let radius = folded_normal(&mut rng, params.radius_sigma)
            .clamp(params.radius_min, params.radius_max);
        for a in 0..2 {
            if b.extent(a) <= 2.0 * radius {
                return Err(ObstacleError::SpawnFailure(format!(
                    "window extent {:.1} m on axis {a} cannot hold radius {radius:.1} m",
                    b.extent(a)
                )));
            }
        }
        let clearance = radius * (1.0 + params.clearance_ratio) + params.clearance_margin;
        let mut position = None;
        for _ in 0..10_000 {
            let mut c = [0.0; 3];
            for (a, slot) in c.iter_mut().enumerate() {
                let (lo, hi) = if a < 2 {
                    (b.min.axis(a) + radius, b.max.axis(a) - radius)
                } else {
                    (b.min.z, b.max.z)
                };
                let sigma = radius.max(b.extent(a) / 6.0);
                *slot = truncated_normal(&mut rng, mid.axis(a), sigma, lo, hi);
            }
            let p = Point3::from_array(c);
            if p.distance(&window.start) > clearance && p.distance(&window.target) > clearance {
                position = Some(p);
                break;
            }
        }
        let position = position.ok_or_else(|| {
            ObstacleError::SpawnFailure(format!(
                "no centre keeps {clearance:.1} m clear of both waypoints"
            ))
        })?;
        let noise_state = params.noise_sigma * rng.sample::<f64, _>(StandardNormal);
        obstacles.push(Obstacle {
            kind,
            position,
            radius,
            halo: 0.0,
            base_radius: radius,
            radius_spread: if kind == ObstacleKind::StaticUncertain {
                params.uncertain_spread * radius
            } else {
                0.0
            },
            noise_state,
        });
    }
    Ok(ObstacleField { window, obstacles, current_magnitude, params, seed, steps: 0 })
}

impl ObstacleField {
    /// A field with no obstacles.
    pub fn empty(window: OperationWindow) -> Self {
        Self {
            window,
            obstacles: Vec::new(),
            current_magnitude: 0.0,
            params: ObstacleParams::default(),
            seed: 0,
            steps: 0,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    /// Overrides the current magnitude (e.g. to study the zero-current limit).
    pub fn with_current(mut self, current_magnitude: f64) -> Self {
        self.current_magnitude = current_magnitude.max(0.0);
        self
    }

    fn clamp_to_window(&self, p: Point3) -> Point3 {
        let b = &self.window.bounds;
        Point3::new(
            p.x.clamp(b.min.x, b.max.x),
            p.y.clamp(b.min.y, b.max.y),
            p.z.clamp(b.min.z, b.max.z),
        )
    }

    /// Advances the field by one step in place.
    pub fn step_in_place(&mut self) {
        self.steps += 1;
        let params = self.params;
        let current = self.current_magnitude;
        let motion = Normal::new(0.0, params.motion_sigma).expect("motion sigma checked");
        for idx in 0..self.obstacles.len() {
            let mut rng = rng::stream(self.seed, &[rng::tag::FIELD, idx as u64, self.steps]);
            let o = &self.obstacles[idx];
            let mut next = o.clone();
            match o.kind {
                ObstacleKind::StaticKnown => {}
                ObstacleKind::StaticUncertain => {
                    let lo = o.base_radius - o.radius_spread;
                    let hi = o.base_radius + o.radius_spread;
                    let z: f64 = rng.sample(StandardNormal);
                    next.radius = (o.base_radius + 0.5 * o.radius_spread * z).clamp(lo, hi);
                }
                ObstacleKind::SelfMotivated | ObstacleKind::CurrentDriven => {
                    let d = Point3::new(
                        motion.sample(&mut rng),
                        motion.sample(&mut rng),
                        motion.sample(&mut rng),
                    );
                    next.position = self.clamp_to_window(o.position + d);
                    if o.kind == ObstacleKind::CurrentDriven {
                        next.halo = o.halo + current * o.noise_state.abs();
                        next.noise_state = params.noise_sigma * rng.sample::<f64, _>(StandardNormal);
                    }
                }
            }
            self.obstacles[idx] = next;
        }
    }

    pub fn step(&self) -> ObstacleField {
        let mut next = self.clone();
        next.step_in_place();
        next
    }

    /// Mean forward rollout. Entry 0 is the current field, entry `k` the
    /// expected state `k` steps ahead: motion at its zero mean, radii of static
    /// uncertain obstacles at their upper bound, halos grown at the mean rate.
    pub fn predict_states(&self, horizon: usize) -> Vec<ObstacleField> {
        let rate = self.params.mean_halo_rate(self.current_magnitude);
        let mut out = Vec::with_capacity(horizon + 1);
        out.push(self.clone());
        for k in 1..=horizon {
            let mut f = self.clone();
            for o in &mut f.obstacles {
                match o.kind {
                    ObstacleKind::StaticUncertain => o.radius = o.base_radius + o.radius_spread,
                    ObstacleKind::CurrentDriven => o.halo += k as f64 * rate,
                    _ => {}
                }
            }
            out.push(f);
        }
        out
    }

    /// Line-oriented snapshot: `kind,x,y,z,radius,halo` per obstacle.
    pub fn snapshot_csv(&self) -> String {
        let mut s = String::from("kind,x,y,z,radius,halo\n");
        for o in &self.obstacles {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{}",
                o.kind.label(),
                sig(o.position.x),
                sig(o.position.y),
                sig(o.position.z),
                sig(o.radius),
                sig(o.halo)
            );
        }
        s
    }
}

/// Penetration of the polyline piece leaving sample `j`: the segment to the
/// next sample, or the last sample itself.
fn piece_penetration(samples: &[Point3], j: usize, field: &ObstacleField) -> f64 {
    let p = &samples[j];
    match samples.get(j + 1) {
        Some(q) => field.obstacles.iter().map(|o| o.segment_penetration(p, q)).sum(),
        None => field.obstacles.iter().map(|o| o.penetration(p)).sum(),
    }
}

/// Total penetration of the polyline through `samples` into the field's
/// obstacles, summed per segment: zero iff no segment enters any effective
/// radius.
pub fn collision_violation(samples: &[Point3], field: &ObstacleField) -> f64 {
    (0..samples.len()).map(|j| piece_penetration(samples, j, field)).sum()
}

/// Index into a prediction of length `horizon + 1` for sample `j` of `n`.
pub fn prediction_index(j: usize, n_samples: usize, horizon: usize) -> usize {
    if n_samples == 0 {
        return 0;
    }
    (j * horizon).div_ceil(n_samples).min(horizon)
}

/// Violation with the segment leaving each sample checked against the
/// predicted field at that sample's time index.
pub fn time_indexed_violation(samples: &[Point3], predicted: &[ObstacleField]) -> f64 {
    let horizon = predicted.len().saturating_sub(1);
    (0..samples.len())
        .map(|j| piece_penetration(samples, j, &predicted[prediction_index(j, samples.len(), horizon)]))
        .sum()
}
