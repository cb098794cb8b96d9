//! GPS log ingestion and kinematic derivation.
//!
//! Positions are cumulative great-circle arc length in feet; speed,
//! acceleration and jerk are successive backward differences at the log
//! cadence. Each derivative series is only defined from the first index where
//! its stencil fits (1 for speed, 2 for acceleration, 3 for jerk); earlier
//! entries replicate the first defined value.

pub mod geo;
pub mod io;
pub mod units;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
pub use geo::{geodesic_distance, GpsFix};
pub use units::{convert_units, Unit};

/// Minimum fixes for a defined jerk value.
pub const MIN_FIXES: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    /// Elapsed seconds since the first fix.
    pub t: f64,
    /// Cumulative arc length, ft.
    pub pos: f64,
    pub speed: f64,
    pub accel: f64,
    pub jerk: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub vehicle_id: String,
    /// Nominal sample interval, s.
    pub dt: f64,
    pub points: Vec<TrajectoryPoint>,
    /// Epoch seconds of the first fix; `t` values are relative to it.
    #[serde(default)]
    pub t0: f64,
    /// Arc-length position of the first fix in a frame shared with a paired
    /// vehicle, ft. Zero for a standalone log.
    #[serde(default)]
    pub origin_pos: f64,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Absolute (epoch) time of sample `i`.
    pub fn abs_time(&self, i: usize) -> f64 {
        self.t0 + self.points[i].t
    }

    /// Position of sample `i` in the shared frame.
    pub fn frame_pos(&self, i: usize) -> f64 {
        self.origin_pos + self.points[i].pos
    }

    /// Indices `i` whose interval to `i - 1` departs from `dt` by more than 10%.
    pub fn gaps(&self) -> Vec<usize> {
        (1..self.points.len())
            .filter(|&i| !within_cadence(self.points[i].t - self.points[i - 1].t, self.dt))
            .collect()
    }
}

pub(crate) fn within_cadence(step: f64, dt: f64) -> bool {
    (step - dt).abs() <= 0.1 * dt
}

/// Builds a trajectory from raw fixes: geodesic arc length, then backward
/// differences for speed, acceleration and jerk.
pub fn derive_kinematics(vehicle_id: impl Into<String>, fixes: &[GpsFix]) -> Result<Trajectory> {
    if fixes.len() < MIN_FIXES {
        return Err(Error::InsufficientData {
            required: MIN_FIXES,
            available: fixes.len(),
        });
    }
    for f in fixes {
        f.validate()?;
    }
    check_increasing(fixes.iter().map(|f| f.t))?;

    let t0 = fixes[0].t;
    let t: Vec<f64> = fixes.iter().map(|f| f.t - t0).collect();
    let mut pos = Vec::with_capacity(fixes.len());
    pos.push(0.0);
    for w in fixes.windows(2) {
        let step = geo::haversine_ft(w[0].lat, w[0].lon, w[1].lat, w[1].lon);
        let prev = *pos.last().unwrap();
        pos.push(prev + step);
    }

    let mut traj = kinematics_from_positions(vehicle_id, &t, &pos)?;
    traj.t0 = t0;
    Ok(traj)
}

/// Differentiates an already-linearised position series.
pub fn kinematics_from_positions(
    vehicle_id: impl Into<String>,
    t: &[f64],
    pos: &[f64],
) -> Result<Trajectory> {
    if t.len() != pos.len() {
        return Err(Error::domain(format!(
            "time and position lengths differ ({} vs {})",
            t.len(),
            pos.len()
        )));
    }
    if t.len() < MIN_FIXES {
        return Err(Error::InsufficientData {
            required: MIN_FIXES,
            available: t.len(),
        });
    }
    check_increasing(t.iter().copied())?;

    let speed = backward_difference(t, pos, 1);
    let accel = backward_difference(t, &speed, 2);
    let jerk = backward_difference(t, &accel, 3);

    let points = (0..t.len())
        .map(|i| TrajectoryPoint {
            t: t[i] - t[0],
            pos: pos[i] - pos[0],
            speed: speed[i],
            accel: accel[i],
            jerk: jerk[i],
        })
        .collect();

    Ok(Trajectory {
        vehicle_id: vehicle_id.into(),
        dt: nominal_dt(t),
        points,
        t0: 0.0,
        origin_pos: 0.0,
    })
}

/// `out[i] = (y[i] - y[i-1]) / (t[i] - t[i-1])` for `i >= first`, with
/// `out[..first]` filled by `out[first]`.
fn backward_difference(t: &[f64], y: &[f64], first: usize) -> Vec<f64> {
    let mut out = vec![0.0; y.len()];
    for i in first..y.len() {
        out[i] = (y[i] - y[i - 1]) / (t[i] - t[i - 1]);
    }
    let fill = out[first];
    out[..first].iter_mut().for_each(|v| *v = fill);
    out
}

fn check_increasing(t: impl Iterator<Item = f64>) -> Result<()> {
    let mut prev = f64::NEG_INFINITY;
    for (index, ti) in t.enumerate() {
        if !(ti > prev) {
            return Err(Error::Ordering { index });
        }
        prev = ti;
    }
    Ok(())
}

/// Median sample interval.
fn nominal_dt(t: &[f64]) -> f64 {
    let mut steps: Vec<f64> = t.windows(2).map(|w| w[1] - w[0]).collect();
    steps.sort_by(f64::total_cmp);
    let n = steps.len();
    if n % 2 == 1 {
        steps[n / 2]
    } else {
        0.5 * (steps[n / 2 - 1] + steps[n / 2])
    }
}

/// Derives both trajectories of a leader/follower log pair and places the
/// follower on the leader's arc-length frame.
///
/// The follower's first fix is projected onto the nearest leader fix recorded
/// at or before that moment. If the nearest one is the leader's first fix the
/// follower is taken to start behind it on the same line.
pub fn derive_pair(leader: &[GpsFix], follower: &[GpsFix]) -> Result<(Trajectory, Trajectory)> {
    let lead = derive_kinematics("leader", leader)?;
    let mut foll = derive_kinematics("follower", follower)?;

    let start = follower[0];
    let candidates = leader.iter().take_while(|f| f.t <= start.t).count().max(1);
    let (nearest, dist) = leader[..candidates]
        .iter()
        .enumerate()
        .map(|(i, f)| (i, geo::haversine_ft(f.lat, f.lon, start.lat, start.lon)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("leader has fixes");

    foll.origin_pos = if nearest == 0 {
        -dist
    } else {
        lead.points[nearest].pos
    };
    Ok((lead, foll))
}
