//! Waypoint trajectories for undersea roaming.
//!
//! Keypoints (longitude, latitude, height, speed) are projected into a
//! working space and joined by one of three curves: a polyline, a single
//! Bézier curve over all keypoints, or a uniform Catmull-Rom spline with
//! adjustable tension. On top of the curves sit
//!
//! * [`camera`]: next-node and tangent-following view models plus
//!   smoothness metrics,
//! * [`sim`]: a fixed-timestep roaming simulator that counts collisions and
//!   scores ray selection,
//! * [`stats`]: normality screening, Pearson/Spearman correlation and
//!   least-squares fits with confidence bands,
//! * [`report`]: deterministic SVG figures and CSV tables,
//! * [`cli`]: the `roamcurve` command-line front end.

pub mod camera;
pub mod cli;
mod error;
pub mod geo;
pub mod report;
pub mod sim;
pub mod spline;
pub mod stats;

pub use error::{Error, Result};
pub use geo::{KeyPoint, Point3, Projection};
pub use spline::{CurveKind, PathCurve, Tension};
