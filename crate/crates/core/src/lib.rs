//! Two-layer AUV mission planning.
//!
//! * [`mission`]: waypoint graph, routes, routing arithmetic.
//! * [`grp`]: genetic-algorithm global route planner.
//! * [`obstacles`]: stochastic obstacle field simulation.
//! * [`lpp`]: particle-swarm B-spline local path planner.
//! * [`synchro`]: the mission loop coupling both planners with replanning.
//! * [`harness`]: Monte Carlo campaigns, scenario suites and exports.

pub mod exec;
pub mod geometry;
pub mod grp;
pub mod harness;
pub mod lpp;
pub mod mission;
pub mod obstacles;
pub mod rng;
pub mod synchro;
pub mod textfmt;

pub use exec::Execution;
pub use geometry::{Aabb, Point3};
