//! Whole-dataset exploratory report over cleaned segments.

use serde::{Deserialize, Serialize};

use crate::cleaning::FollowingSegment;
use crate::error::{Error, Result};
use crate::stats::{
    coefficient_of_variation, describe, iqr_outlier_share, jerk_comfort_shares, shapiro_wilk,
    spearman, ComfortShares, ComfortThresholds, DescriptiveStats, ShapiroWilk,
};

/// Acceleration comfort limit for seated and standing passengers, ft/s².
/// Reported as an annotation only.
pub const ACCEL_COMFORT_LIMIT: f64 = 2.96;

/// One value per analysed follower variable, in descriptive-table column order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerVariable<T> {
    pub speed: T,
    pub accel: T,
    pub jerk: T,
    pub spacing: T,
}

impl<T> PerVariable<T> {
    pub const LABELS: [&'static str; 4] = ["speed", "accel", "jerk", "spacing"];

    pub fn iter(&self) -> impl Iterator<Item = (&'static str, &T)> {
        Self::LABELS
            .into_iter()
            .zip([&self.speed, &self.accel, &self.jerk, &self.spacing])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalityEntry {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result: Option<ShapiroWilk>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationMatrix {
    pub variables: Vec<String>,
    /// Row-major; `None` where the correlation is undefined.
    pub rho: Vec<Vec<Option<f64>>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Accelerating,
    Decelerating,
}

/// Per-trip variability of a follower variable within one driving phase,
/// averaged over the trips where it is defined.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariabilityRow {
    pub variable: String,
    pub phase: Phase,
    pub mean_cv: Option<f64>,
    pub mean_outlier_share: Option<f64>,
    pub trips: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsReport {
    pub n_segments: usize,
    pub n_samples: usize,
    pub descriptive: PerVariable<DescriptiveStats>,
    pub normality: PerVariable<NormalityEntry>,
    pub spearman: CorrelationMatrix,
    pub variability: Vec<VariabilityRow>,
    pub comfort_thresholds: ComfortThresholds,
    pub comfort: ComfortShares,
    pub accel_comfort_limit: f64,
    pub accel_above_comfort_limit: f64,
}

/// Follower jerk, falling back to differencing acceleration when a segment
/// carries none.
pub(crate) fn follower_jerk(seg: &FollowingSegment) -> Vec<f64> {
    if seg.follower.jerk.len() == seg.len() {
        return seg.follower.jerk.clone();
    }
    let a = &seg.follower.accel;
    let mut j: Vec<f64> = (0..a.len())
        .map(|i| if i == 0 { 0.0 } else { (a[i] - a[i - 1]) / (seg.t[i] - seg.t[i - 1]) })
        .collect();
    if j.len() > 1 {
        j[0] = j[1];
    }
    j
}

pub fn summarize(segments: &[FollowingSegment], thresholds: &ComfortThresholds) -> Result<StatsReport> {
    if segments.is_empty() {
        return Err(Error::InsufficientData {
            required: 1,
            available: 0,
        });
    }
    let mut speed = Vec::new();
    let mut accel = Vec::new();
    let mut jerk = Vec::new();
    let mut spacing = Vec::new();
    let mut dv = Vec::new();
    for seg in segments {
        speed.extend_from_slice(&seg.follower.speed);
        accel.extend_from_slice(&seg.follower.accel);
        jerk.extend(follower_jerk(seg));
        spacing.extend_from_slice(&seg.spacing);
        dv.extend(seg.follower.speed.iter().zip(&seg.leader.speed).map(|(f, l)| f - l));
    }

    let descriptive = PerVariable {
        speed: describe(&speed)?,
        accel: describe(&accel)?,
        jerk: describe(&jerk)?,
        spacing: describe(&spacing)?,
    };

    let normality_of = |xs: &[f64]| match shapiro_wilk(xs) {
        Ok(r) => NormalityEntry {
            result: Some(r),
            error: None,
        },
        Err(e) => NormalityEntry {
            result: None,
            error: Some(e.to_string()),
        },
    };
    let normality = PerVariable {
        speed: normality_of(&speed),
        accel: normality_of(&accel),
        jerk: normality_of(&jerk),
        spacing: normality_of(&spacing),
    };

    let names = ["speed", "accel", "jerk", "spacing", "delta_speed"];
    let cols: [&[f64]; 5] = [&speed, &accel, &jerk, &spacing, &dv];
    let rho = cols
        .iter()
        .map(|a| cols.iter().map(|b| spearman(a, b).ok()).collect())
        .collect();

    let comfort = jerk_comfort_shares(&jerk, thresholds)?;
    let above = accel.iter().filter(|a| a.abs() > ACCEL_COMFORT_LIMIT).count() as f64 / accel.len() as f64;

    Ok(StatsReport {
        n_segments: segments.len(),
        n_samples: speed.len(),
        descriptive,
        normality,
        spearman: CorrelationMatrix {
            variables: names.iter().map(|s| s.to_string()).collect(),
            rho,
        },
        variability: phase_variability(segments),
        comfort_thresholds: *thresholds,
        comfort,
        accel_comfort_limit: ACCEL_COMFORT_LIMIT,
        accel_above_comfort_limit: above,
    })
}

/// CV and outlier share of follower speed, acceleration and jerk per trip,
/// split by the sign of follower acceleration.
pub fn phase_variability(segments: &[FollowingSegment]) -> Vec<VariabilityRow> {
    let mut rows = Vec::new();
    for (variable, pick) in [
        ("speed", 0usize),
        ("accel", 1),
        ("jerk", 2),
    ] {
        for phase in [Phase::Accelerating, Phase::Decelerating] {
            let mut cvs = Vec::new();
            let mut shares = Vec::new();
            let mut trips = 0;
            for seg in segments {
                let jerk = follower_jerk(seg);
                let series: Vec<f64> = (0..seg.len())
                    .filter(|&i| match phase {
                        Phase::Accelerating => seg.follower.accel[i] > 0.0,
                        Phase::Decelerating => seg.follower.accel[i] < 0.0,
                    })
                    .map(|i| match pick {
                        0 => seg.follower.speed[i],
                        1 => seg.follower.accel[i],
                        _ => jerk[i],
                    })
                    .collect();
                if series.is_empty() {
                    continue;
                }
                trips += 1;
                if let Ok(cv) = coefficient_of_variation(&series) {
                    cvs.push(cv);
                }
                if let Ok(s) = iqr_outlier_share(&series) {
                    shares.push(s);
                }
            }
            let avg = |v: &[f64]| (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64);
            rows.push(VariabilityRow {
                variable: variable.to_string(),
                phase,
                mean_cv: avg(&cvs),
                mean_outlier_share: avg(&shares),
                trips,
            });
        }
    }
    rows
}
