//! Car-following analysis for low-speed automated shuttles: GPS trajectory
//! ingestion, data cleaning, descriptive statistics, IDM / blended IDM+CAH /
//! linear ACC models, follower simulation and genetic-algorithm calibration.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod calib;
pub mod cleaning;
pub mod error;
pub mod fixtures;
pub mod ingest;
pub mod models;
pub mod report;
pub mod sim;
pub mod stats;

pub use calib::{
    calibrate, calibrate_and_validate, evaluate_fit, fitness, ga_calibrate, CalibrationConfig, CalibrationReport,
    CalibrationResult, GaConfig, GaOutcome, GofReport,
};
pub use cleaning::{clean_segments, pair_trajectories, split_segments, CleaningRules, FollowingSegment, PairedSeries, SegmentSet};
pub use error::{Error, Result};
pub use ingest::{derive_kinematics, derive_pair, GpsFix, Trajectory, TrajectoryPoint};
pub use models::{CfState, ModelKind, ModelParams};
pub use sim::{simulate_all, simulate_follower, SimLimits, SimResult};
