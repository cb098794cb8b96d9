//! Leader/follower pairing, car-following filtering and calibration splits.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{within_cadence, Trajectory};

/// Timestamps closer than this are considered the same instant, s.
pub const PAIRING_TOLERANCE: f64 = 0.1;

/// Kinematic series of one vehicle, index-aligned with the owning segment's `t`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct VehicleSeries {
    pub pos: Vec<f64>,
    pub speed: Vec<f64>,
    pub accel: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub jerk: Vec<f64>,
}

impl VehicleSeries {
    fn push_from(&mut self, traj: &Trajectory, i: usize) {
        let p = &traj.points[i];
        self.pos.push(traj.frame_pos(i));
        self.speed.push(p.speed);
        self.accel.push(p.accel);
        self.jerk.push(p.jerk);
    }

    fn slice(&self, range: std::ops::Range<usize>) -> Self {
        let jerk = if self.jerk.is_empty() {
            Vec::new()
        } else {
            self.jerk[range.clone()].to_vec()
        };
        Self {
            pos: self.pos[range.clone()].to_vec(),
            speed: self.speed[range.clone()].to_vec(),
            accel: self.accel[range].to_vec(),
            jerk,
        }
    }
}

/// Leader and follower sampled at common instants, before any filtering.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairedSeries {
    /// Epoch seconds of the first paired instant.
    pub t0: f64,
    /// Nominal sample interval, s.
    pub dt: f64,
    /// Seconds since `t0`.
    pub t: Vec<f64>,
    pub leader: VehicleSeries,
    pub follower: VehicleSeries,
    pub spacing: Vec<f64>,
}

impl PairedSeries {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }
}

/// A contiguous car-following interval; the unit of simulation and calibration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FollowingSegment {
    pub id: String,
    pub t: Vec<f64>,
    pub leader: VehicleSeries,
    pub follower: VehicleSeries,
    pub spacing: Vec<f64>,
}

impl FollowingSegment {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    /// Builds a segment from explicit series, computing spacing from positions.
    pub fn from_series(
        id: impl Into<String>,
        t: Vec<f64>,
        leader: VehicleSeries,
        follower: VehicleSeries,
    ) -> Result<Self> {
        let n = t.len();
        for (name, len) in [
            ("leader.pos", leader.pos.len()),
            ("leader.speed", leader.speed.len()),
            ("leader.accel", leader.accel.len()),
            ("follower.pos", follower.pos.len()),
            ("follower.speed", follower.speed.len()),
            ("follower.accel", follower.accel.len()),
        ] {
            if len != n {
                return Err(Error::domain(format!("{name} has {len} samples, t has {n}")));
            }
        }
        let spacing = leader.pos.iter().zip(&follower.pos).map(|(l, f)| l - f).collect();
        let seg = Self {
            id: id.into(),
            t,
            leader,
            follower,
            spacing,
        };
        seg.validate()?;
        Ok(seg)
    }

    /// Checks alignment, ordering and positive spacing.
    pub fn validate(&self) -> Result<()> {
        let n = self.t.len();
        if n < 2 {
            return Err(Error::InsufficientData {
                required: 2,
                available: n,
            });
        }
        let lens = [
            self.leader.pos.len(),
            self.leader.speed.len(),
            self.leader.accel.len(),
            self.follower.pos.len(),
            self.follower.speed.len(),
            self.follower.accel.len(),
            self.spacing.len(),
        ];
        if lens.iter().any(|&l| l != n) {
            return Err(Error::domain(format!("segment {}: misaligned series", self.id)));
        }
        if let Some(i) = (1..n).find(|&i| !(self.t[i] > self.t[i - 1])) {
            return Err(Error::Ordering { index: i });
        }
        if let Some(i) = self.spacing.iter().position(|&s| !(s > 0.0)) {
            return Err(Error::domain(format!(
                "segment {}: non-positive spacing {} at index {i}",
                self.id, self.spacing[i]
            )));
        }
        Ok(())
    }
}

/// Document wrapper for segment files.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SegmentSet {
    pub segments: Vec<FollowingSegment>,
}

impl SegmentSet {
    pub fn total_samples(&self) -> usize {
        self.segments.iter().map(FollowingSegment::len).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CleaningRules {
    /// |acceleration| cap for either vehicle, ft/s².
    pub max_accel: f64,
    /// Follower speed cap, ft/s (15 mi/h).
    pub max_follower_speed: f64,
    /// Follower speed must exceed this, ft/s.
    pub min_follower_speed_exclusive: f64,
    /// Follower sensor range, ft.
    pub max_spacing: f64,
    /// Shortest run kept, samples.
    pub min_segment_len: usize,
}

impl Default for CleaningRules {
    fn default() -> Self {
        Self {
            max_accel: 18.0,
            max_follower_speed: 22.0,
            min_follower_speed_exclusive: 0.0,
            max_spacing: 656.0,
            min_segment_len: 10,
        }
    }
}

impl CleaningRules {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("max_accel", self.max_accel),
            ("max_follower_speed", self.max_follower_speed),
            ("max_spacing", self.max_spacing),
        ];
        for (name, v) in positive {
            if !(v > 0.0) {
                return Err(Error::Config(format!("{name} must be > 0, got {v}")));
            }
        }
        if !(self.min_follower_speed_exclusive >= 0.0)
            || self.min_follower_speed_exclusive >= self.max_follower_speed
        {
            return Err(Error::Config(format!(
                "min_follower_speed_exclusive must lie in [0, max_follower_speed), got {}",
                self.min_follower_speed_exclusive
            )));
        }
        if self.min_segment_len < 2 {
            return Err(Error::Config("min_segment_len must be at least 2".into()));
        }
        Ok(())
    }

    /// Whether a single paired sample is usable car-following data.
    pub fn admits(&self, spacing: f64, leader_accel: f64, follower_speed: f64, follower_accel: f64) -> bool {
        follower_speed > self.min_follower_speed_exclusive
            && follower_speed <= self.max_follower_speed
            && spacing > 0.0
            && spacing <= self.max_spacing
            && leader_accel.abs() <= self.max_accel
            && follower_accel.abs() <= self.max_accel
    }
}

/// Matches samples of the two vehicles at common instants.
pub fn pair_trajectories(leader: &Trajectory, follower: &Trajectory) -> Result<PairedSeries> {
    if leader.is_empty() || follower.is_empty() {
        return Err(Error::Pairing("empty trajectory".into()));
    }
    let (l_start, l_end) = (leader.abs_time(0), leader.abs_time(leader.len() - 1));
    let (f_start, f_end) = (follower.abs_time(0), follower.abs_time(follower.len() - 1));
    if l_end + PAIRING_TOLERANCE < f_start || f_end + PAIRING_TOLERANCE < l_start {
        return Err(Error::Pairing("trajectories do not overlap in time".into()));
    }

    let mut t_abs = Vec::new();
    let mut lead = VehicleSeries::default();
    let mut foll = VehicleSeries::default();

    let mut j = 0;
    for i in 0..leader.len() {
        let ti = leader.abs_time(i);
        while j + 1 < follower.len()
            && (follower.abs_time(j + 1) - ti).abs() <= (follower.abs_time(j) - ti).abs()
        {
            j += 1;
        }
        if (follower.abs_time(j) - ti).abs() <= PAIRING_TOLERANCE {
            t_abs.push(ti);
            lead.push_from(leader, i);
            foll.push_from(follower, j);
        }
    }
    if t_abs.is_empty() {
        return Err(Error::Pairing("no samples within pairing tolerance".into()));
    }

    let t0 = t_abs[0];
    let spacing = lead.pos.iter().zip(&foll.pos).map(|(l, f)| l - f).collect();
    Ok(PairedSeries {
        t0,
        dt: leader.dt,
        t: t_abs.iter().map(|t| t - t0).collect(),
        leader: lead,
        follower: foll,
        spacing,
    })
}

/// Drops samples that violate `rules` and returns the surviving maximal
/// contiguous runs of at least `rules.min_segment_len` samples.
pub fn clean_segments(paired: &PairedSeries, rules: &CleaningRules) -> Result<Vec<FollowingSegment>> {
    rules.validate()?;
    if paired.is_empty() {
        return Err(Error::InsufficientData {
            required: 1,
            available: 0,
        });
    }

    let keep: Vec<bool> = (0..paired.len())
        .map(|i| {
            rules.admits(
                paired.spacing[i],
                paired.leader.accel[i],
                paired.follower.speed[i],
                paired.follower.accel[i],
            )
        })
        .collect();

    let mut segments = Vec::new();
    let mut i = 0;
    while i < keep.len() {
        if !keep[i] {
            i += 1;
            continue;
        }
        let start = i;
        i += 1;
        while i < keep.len() && keep[i] && within_cadence(paired.t[i] - paired.t[i - 1], paired.dt) {
            i += 1;
        }
        if i - start >= rules.min_segment_len {
            let range = start..i;
            segments.push(FollowingSegment {
                id: format!("seg-{:04}", segments.len()),
                t: paired.t[range.clone()].to_vec(),
                leader: paired.leader.slice(range.clone()),
                follower: paired.follower.slice(range.clone()),
                spacing: paired.spacing[range].to_vec(),
            });
        }
    }

    if segments.is_empty() {
        return Err(Error::NoCarFollowing);
    }
    Ok(segments)
}

/// Segment-level calibration/validation split.
///
/// Segments are shuffled with `seed`, then the shortest shuffled prefix whose
/// sample share is closest to `fraction` becomes the calibration set. Both
/// sets are non-empty and keep the input order.
pub fn split_segments(
    segments: &[FollowingSegment],
    fraction: f64,
    seed: u64,
) -> Result<(Vec<FollowingSegment>, Vec<FollowingSegment>)> {
    if segments.len() < 2 {
        return Err(Error::Split(format!("need at least 2 segments, got {}", segments.len())));
    }
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::Split(format!("fraction must be in (0, 1), got {fraction}")));
    }

    let mut order: Vec<usize> = (0..segments.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));

    let total: usize = segments.iter().map(FollowingSegment::len).sum();
    let target = fraction * total as f64;
    let mut best = (1, f64::INFINITY);
    let mut cum = 0usize;
    for (k, &idx) in order.iter().enumerate().take(segments.len() - 1) {
        cum += segments[idx].len();
        let miss = (cum as f64 - target).abs();
        if miss < best.1 {
            best = (k + 1, miss);
        }
    }

    let mut in_calib = vec![false; segments.len()];
    for &idx in &order[..best.0] {
        in_calib[idx] = true;
    }
    let (calib, valid): (Vec<_>, Vec<_>) = segments
        .iter()
        .zip(in_calib)
        .partition(|(_, c)| *c);
    Ok((
        calib.into_iter().map(|(s, _)| s.clone()).collect(),
        valid.into_iter().map(|(s, _)| s.clone()).collect(),
    ))
}
