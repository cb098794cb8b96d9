//! Goodness-of-fit and genetic-algorithm calibration of model parameters.

pub mod ga;
pub mod genes;
pub mod gof;

use serde::{Deserialize, Serialize};

use crate::cleaning::{split_segments, FollowingSegment};
use crate::error::{Error, Result};
use crate::models::{ModelKind, ModelParams};
use crate::sim::{simulate_all, SimLimits};
pub use ga::{evolve, evolve_observed, GaConfig, GaOutcome, Individual};
pub use genes::{decode, default_bounds, encode, gene_names, resolve_bounds, GeneBound, ModelOptions};
pub use gof::{gof, Gof, GofAccumulator};

/// Fitness assigned when a parameter vector cannot be simulated at all.
pub const PENALTY_FITNESS: f64 = 1e6;

/// Everything a calibration run needs besides the segments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationConfig {
    #[serde(flatten)]
    pub ga: GaConfig,
    #[serde(default)]
    pub limits: SimLimits,
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default)]
    pub model: ModelOptions,
}

fn default_dt() -> f64 {
    1.0
}

impl Default for CalibrationConfig {
    fn default() -> Self {
        Self {
            ga: GaConfig::default(),
            limits: SimLimits::default(),
            dt: default_dt(),
            model: ModelOptions::default(),
        }
    }
}

impl CalibrationConfig {
    pub fn validate(&self) -> Result<()> {
        self.ga.validate()?;
        self.limits.validate()?;
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::Config(format!("dt must be > 0, got {}", self.dt)));
        }
        Ok(())
    }
}

/// Pooled spacing and speed fit of `params` over `segments`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GofReport {
    pub nrmse_spacing: f64,
    pub mae_spacing: f64,
    pub rmse_spacing: f64,
    pub nrmse_speed: f64,
    pub mae_speed: f64,
    pub rmse_speed: f64,
}

impl GofReport {
    pub fn spacing(&self) -> Gof {
        Gof {
            mae: self.mae_spacing,
            rmse: self.rmse_spacing,
            nrmse: self.nrmse_spacing,
        }
    }

    pub fn speed(&self) -> Gof {
        Gof {
            mae: self.mae_speed,
            rmse: self.rmse_speed,
            nrmse: self.nrmse_speed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedRun {
    pub seed: u64,
    pub fitness: f64,
    pub params: ModelParams,
    pub generations_run: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationResult {
    pub model: ModelKind,
    pub best_params: ModelParams,
    /// Pooled spacing NRMSE on the calibration set.
    pub fitness: f64,
    pub per_seed: Vec<SeedRun>,
    /// Generations bred by the winning seed.
    pub generations_run: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitInfo {
    pub fraction: f64,
    pub seed: u64,
    pub calibration_ids: Vec<String>,
    pub validation_ids: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationReport {
    pub config: CalibrationConfig,
    pub split: SplitInfo,
    pub result: CalibrationResult,
    pub calibration: GofReport,
    pub validation: GofReport,
}

/// Pooled spacing and speed errors: all segments' samples are concatenated
/// before the metrics are taken.
pub fn evaluate_fit(
    params: &ModelParams,
    segments: &[FollowingSegment],
    limits: &SimLimits,
    dt: f64,
) -> Result<GofReport> {
    let sims = simulate_all(params, segments, limits, dt)?;
    let mut spacing = GofAccumulator::default();
    let mut speed = GofAccumulator::default();
    for (sim, seg) in sims.iter().zip(segments) {
        spacing.extend(&sim.spacing, &seg.spacing);
        speed.extend(&sim.follower_speed, &seg.follower.speed);
    }
    let (sp, v) = (spacing.finish()?, speed.finish()?);
    Ok(GofReport {
        nrmse_spacing: sp.nrmse,
        mae_spacing: sp.mae,
        rmse_spacing: sp.rmse,
        nrmse_speed: v.nrmse,
        mae_speed: v.mae,
        rmse_speed: v.rmse,
    })
}

fn spacing_nrmse(params: &ModelParams, segments: &[FollowingSegment], limits: &SimLimits, dt: f64) -> Result<f64> {
    let sims = simulate_all(params, segments, limits, dt)?;
    let mut acc = GofAccumulator::default();
    for (sim, seg) in sims.iter().zip(segments) {
        acc.extend(&sim.spacing, &seg.spacing);
    }
    Ok(acc.finish()?.nrmse)
}

/// Pooled spacing NRMSE of the decoded genes. Never fails: anything that
/// cannot be simulated scores [`PENALTY_FITNESS`].
pub fn fitness(kind: ModelKind, genes: &[f64], segments: &[FollowingSegment], config: &CalibrationConfig) -> f64 {
    if genes.len() != gene_names(kind).len() {
        return PENALTY_FITNESS;
    }
    let params = decode(kind, genes, &config.model);
    match spacing_nrmse(&params, segments, &config.limits, config.dt) {
        Ok(f) if f.is_finite() => f.min(PENALTY_FITNESS),
        _ => PENALTY_FITNESS,
    }
}

/// One GA run for `seed` against `segments`.
pub fn ga_calibrate(
    kind: ModelKind,
    segments: &[FollowingSegment],
    config: &CalibrationConfig,
    seed: u64,
) -> Result<GaOutcome> {
    ga_calibrate_observed(kind, segments, config, seed, |_, _| {})
}

pub fn ga_calibrate_observed<O>(
    kind: ModelKind,
    segments: &[FollowingSegment],
    config: &CalibrationConfig,
    seed: u64,
    observer: O,
) -> Result<GaOutcome>
where
    O: FnMut(usize, &[Individual]),
{
    if segments.is_empty() {
        return Err(Error::InsufficientData {
            required: 1,
            available: 0,
        });
    }
    config.validate()?;
    let bounds = resolve_bounds(kind, &config.ga.bounds)?;
    evolve_observed(
        |g| fitness(kind, g, segments, config),
        &bounds,
        &config.ga,
        seed,
        observer,
    )
}

/// Runs the GA once per configured seed and keeps the best result. Ties go to
/// the earlier seed.
pub fn calibrate(kind: ModelKind, segments: &[FollowingSegment], config: &CalibrationConfig) -> Result<CalibrationResult> {
    let mut per_seed = Vec::with_capacity(config.ga.seeds.len());
    for &seed in &config.ga.seeds {
        let out = ga_calibrate(kind, segments, config, seed)?;
        per_seed.push(SeedRun {
            seed,
            fitness: out.fitness,
            params: decode(kind, &out.best_genes, &config.model),
            generations_run: out.generations_run,
        });
    }
    let best = per_seed
        .iter()
        .reduce(|a, b| if b.fitness < a.fitness { b } else { a })
        .expect("at least one seed")
        .clone();
    Ok(CalibrationResult {
        model: kind,
        best_params: best.params,
        fitness: best.fitness,
        per_seed,
        generations_run: best.generations_run,
    })
}

/// Splits `segments`, calibrates on one part and scores both.
pub fn calibrate_and_validate(
    kind: ModelKind,
    segments: &[FollowingSegment],
    config: &CalibrationConfig,
    split_fraction: f64,
    split_seed: u64,
) -> Result<CalibrationReport> {
    config.validate()?;
    let (calib, valid) = split_segments(segments, split_fraction, split_seed)?;
    let result = calibrate(kind, &calib, config)?;
    let calibration = evaluate_fit(&result.best_params, &calib, &config.limits, config.dt)?;
    let validation = evaluate_fit(&result.best_params, &valid, &config.limits, config.dt)?;
    let ids = |s: &[FollowingSegment]| s.iter().map(|s| s.id.clone()).collect();
    Ok(CalibrationReport {
        config: config.clone(),
        split: SplitInfo {
            fraction: split_fraction,
            seed: split_seed,
            calibration_ids: ids(&calib),
            validation_ids: ids(&valid),
        },
        result,
        calibration,
        validation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cleaning::VehicleSeries;
    use crate::models::defaults;
    use crate::sim::simulate_follower;

    /// Leader cycling between 6 and 18 ft/s; follower observations produced
    /// by `params` itself.
    fn self_generated(params: &ModelParams, n: usize, id: &str) -> FollowingSegment {
        let t: Vec<f64> = (0..n).map(|i| i as f64).collect();
        let speed: Vec<f64> = t.iter().map(|t| 12.0 + 6.0 * (t / 15.0).sin()).collect();
        let mut pos = vec![120.0];
        for i in 1..n {
            pos.push(pos[i - 1] + 0.5 * (speed[i] + speed[i - 1]));
        }
        let mut accel: Vec<f64> = (1..n).map(|i| speed[i] - speed[i - 1]).collect();
        accel.push(*accel.last().unwrap());
        let leader = VehicleSeries { pos, speed, accel, jerk: vec![] };
        let placeholder = VehicleSeries {
            pos: vec![0.0; n],
            speed: vec![12.0; n],
            accel: vec![0.0; n],
            jerk: vec![],
        };
        let mut seg = FollowingSegment::from_series(id, t.clone(), leader.clone(), placeholder).unwrap();
        let sim = simulate_follower(params, &seg, &SimLimits::default(), 1.0).unwrap();
        seg.follower = VehicleSeries {
            pos: sim.follower_pos,
            speed: sim.follower_speed,
            accel: sim.follower_accel,
            jerk: vec![],
        };
        seg.spacing = sim.spacing;
        seg
    }

    #[test]
    fn self_consistent_genes_score_zero() {
        let p = ModelParams::Idm(defaults::IDM);
        let segs = vec![self_generated(&p, 120, "a"), self_generated(&p, 80, "b")];
        let f = fitness(ModelKind::Idm, &encode(&p), &segs, &CalibrationConfig::default());
        assert!(f < 1e-9, "{f}");
    }

    #[test]
    fn bound_corners_are_finite() {
        let segs = vec![self_generated(&ModelParams::Idm(defaults::IDM), 60, "a")];
        let cfg = CalibrationConfig::default();
        for kind in ModelKind::ALL {
            let b = default_bounds(kind);
            for corner in [
                b.iter().map(|b| b.lo).collect::<Vec<_>>(),
                b.iter().map(|b| b.hi).collect::<Vec<_>>(),
            ] {
                let f = fitness(kind, &corner, &segs, &cfg);
                assert!(f.is_finite() && f >= 0.0, "{kind}: {f}");
            }
        }
    }

    #[test]
    fn pooling_concatenates() {
        let truth = ModelParams::Idm(defaults::IDM);
        let segs = vec![self_generated(&truth, 100, "a"), self_generated(&truth, 30, "b")];
        let mut other = defaults::IDM;
        other.time_gap = 1.5;
        let other = ModelParams::Idm(other);
        let cfg = CalibrationConfig::default();
        let pooled = fitness(ModelKind::Idm, &encode(&other), &segs, &cfg);

        let sims = simulate_all(&other, &segs, &cfg.limits, 1.0).unwrap();
        let sim: Vec<f64> = sims.iter().flat_map(|s| s.spacing.clone()).collect();
        let obs: Vec<f64> = segs.iter().flat_map(|s| s.spacing.clone()).collect();
        let sq: f64 = sim.iter().zip(&obs).map(|(s, o)| (s - o) * (s - o)).sum();
        let norm: f64 = obs.iter().map(|o| o * o).sum();
        let brute = (sq / norm).sqrt();
        assert!((pooled - brute).abs() <= 1e-12 * brute, "{pooled} vs {brute}");

        let mean_of_parts: f64 = sims
            .iter()
            .zip(&segs)
            .map(|(s, g)| gof(&s.spacing, &g.spacing).unwrap().nrmse)
            .sum::<f64>()
            / 2.0;
        assert!((pooled - mean_of_parts).abs() > 1e-6);
    }

    #[test]
    fn degenerate_config_still_reports() {
        let truth = ModelParams::Idm(defaults::IDM);
        let segs: Vec<_> = (0..4).map(|i| self_generated(&truth, 40 + 10 * i, &format!("s{i}"))).collect();
        let cfg = CalibrationConfig {
            ga: GaConfig {
                population: 8,
                max_generations: 1,
                seeds: vec![3],
                ..GaConfig::default()
            },
            ..CalibrationConfig::default()
        };
        let rep = calibrate_and_validate(ModelKind::Idm, &segs, &cfg, 0.75, 1).unwrap();
        assert_eq!(rep.result.per_seed.len(), 1);
        assert_eq!(rep.result.generations_run, 1);
        assert!(rep.result.fitness.is_finite());
        for r in [rep.calibration, rep.validation] {
            assert!(r.rmse_spacing >= r.mae_spacing && r.rmse_speed >= r.mae_speed);
        }
        assert_eq!(rep.split.calibration_ids.len() + rep.split.validation_ids.len(), 4);
    }

    #[test]
    fn best_seed_wins() {
        let truth = ModelParams::Idm(defaults::IDM);
        let segs = vec![self_generated(&truth, 60, "a")];
        let cfg = CalibrationConfig {
            ga: GaConfig {
                population: 10,
                max_generations: 3,
                seeds: vec![0, 1, 2],
                ..GaConfig::default()
            },
            ..CalibrationConfig::default()
        };
        let r = calibrate(ModelKind::Idm, &segs, &cfg).unwrap();
        let min = r.per_seed.iter().map(|s| s.fitness).fold(f64::INFINITY, f64::min);
        assert_eq!(r.fitness, min);
    }

    #[test]
    fn config_json_flattens_ga_settings() {
        let cfg: CalibrationConfig =
            serde_json::from_str(r#"{"population": 20, "seeds": [1, 2], "dt": 0.5, "model": {"d0": 12.0}}"#).unwrap();
        assert_eq!(cfg.ga.population, 20);
        assert_eq!(cfg.ga.max_generations, 1000);
        assert_eq!(cfg.dt, 0.5);
        assert_eq!(cfg.model.d0, 12.0);
        let back: CalibrationConfig = serde_json::from_str(&serde_json::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(back, cfg);
    }
}
