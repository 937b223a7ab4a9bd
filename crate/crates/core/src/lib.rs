//! Divisible-load scheduling analysis for single-level tree (star) networks.
//!
//! The crate computes optimal load fractions, finish times and speedups for
//! local, cloud and combined processing under three distribution protocols
//! (sequential distribution, simultaneous distribution with staggered start,
//! simultaneous distribution with simultaneous start), folds the resulting
//! parallel speedup into Amdahl's law, and cross-checks every closed form
//! with a timeline replay and a brute-force simplex search.
//!
//! ```
//! use starload::{presets, model::Protocol, closedform::solve};
//!
//! let schedule = solve(&presets::homo(), Protocol::Simultaneous).unwrap();
//! assert!((schedule.finish_time - 1.2).abs() < 1e-12);
//! ```

pub mod closedform;
pub mod config;
pub mod model;
pub mod presets;
pub mod replay;
pub mod report;
pub mod searchopt;
pub mod speedup;

pub use closedform::{solve, Schedule, SolveError};
pub use model::{build_scenario, validate, ProcessingMode, Protocol, StarNetwork};
pub use replay::{replay, verify_schedule, Timeline};
pub use searchopt::{minimize_makespan, SearchResult};
pub use speedup::{amdahl_overall, dlt_speedup, sweep_f, SpeedupCurve};
