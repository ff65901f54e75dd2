//! Trajectory similarity measures, k-gather clustering and hardness gadgets.

pub mod bench;
pub mod editdist;
pub mod error;
pub mod flow;
pub mod frechet;
pub mod gadgets;
pub mod geometry;
pub mod io;
pub mod kgather;
pub mod measure;
pub mod metric;
pub mod shingles;
pub mod symbols;
pub mod timewindow;
pub mod trajectory;

pub use error::{Error, Result};
pub use geometry::{Point, PolyCurve};
pub use metric::LocationMetric;
pub use symbols::{PlanarDecomposition, SymbolTrajectory};
pub use trajectory::{Sample, SpeedModel, TimedTrajectory};
