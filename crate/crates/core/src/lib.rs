//! Validated reachtubes for nonlinear ODE systems.
//!
//! The pipeline propagates a point center with a validated Runge-Kutta step,
//! encloses the deformation gradient over the current reachset with a
//! Lohner-QR interval integrator, and bounds each reachset by the
//! intersection of an ellipsoid in the volume-optimal metric with a ball in
//! the initial metric.
//!
//! ```
//! use reachtube::model::find_benchmark;
//! use reachtube::reachtube::run;
//!
//! let b = find_benchmark("brusselator").unwrap();
//! let cfg = b.run_config(1).with_horizon(0.5);
//! let summary = run(&b.system, &cfg);
//! assert!(summary.completed);
//! ```
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::approx_constant)]

pub mod integrator;
pub mod interval;
pub mod metric;
pub mod model;
pub mod par;
pub mod reachtube;

pub use interval::{Interval, IntervalBox, IntervalMatrix};
pub use model::{parse_model, OdeSystem};
pub use par::Parallelism;
