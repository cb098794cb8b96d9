//! Follower simulation behind a recorded leader.
//!
//! Zero reaction time. Each sub-step evaluates the model, clamps the command
//! to `[a_min, a_max]`, clamps the resulting speed to `[v_min, v_max]`, and
//! advances position ballistically with the acceleration actually realised
//! after the speed clamp. Leader states between observations are linearly
//! interpolated.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cleaning::FollowingSegment;
use crate::error::{Error, Result};
use crate::models::{CfState, ModelParams};

/// Spacing used in place of non-positive simulated spacing, ft.
pub const SPACING_FLOOR: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimLimits {
    /// ft/s², negative.
    pub a_min: f64,
    /// ft/s², positive.
    pub a_max: f64,
    /// ft/s.
    pub v_max: f64,
    /// ft/s.
    pub v_min: f64,
}

impl Default for SimLimits {
    fn default() -> Self {
        Self {
            a_min: -26.0,
            a_max: 10.0,
            v_max: 19.5,
            v_min: 0.0,
        }
    }
}

impl SimLimits {
    pub fn validate(&self) -> Result<()> {
        if !(self.a_min < 0.0 && 0.0 < self.a_max) {
            return Err(Error::Config(format!(
                "need a_min < 0 < a_max, got [{}, {}]",
                self.a_min, self.a_max
            )));
        }
        if !(0.0 <= self.v_min && self.v_min < self.v_max) {
            return Err(Error::Config(format!(
                "need 0 <= v_min < v_max, got [{}, {}]",
                self.v_min, self.v_max
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub segment_id: String,
    pub t: Vec<f64>,
    pub follower_pos: Vec<f64>,
    pub follower_speed: Vec<f64>,
    /// Realised acceleration over the step leaving each sample.
    pub follower_accel: Vec<f64>,
    /// Simulated spacing, floored at [`SPACING_FLOOR`].
    pub spacing: Vec<f64>,
    /// Observation samples at which simulated spacing was <= 0.
    pub collisions: usize,
}

/// Follower state carried between sub-steps.
#[derive(Debug, Clone, Copy)]
struct Kinematics {
    x: f64,
    v: f64,
}

/// One clamped ballistic step. Returns the new state and the realised acceleration.
fn step(model: &ModelParams, limits: &SimLimits, state: &CfState, h: f64) -> Result<(f64, f64, f64)> {
    let raw = model.accel(state)?;
    let a_cmd = if raw.is_nan() {
        limits.a_min
    } else {
        raw.clamp(limits.a_min, limits.a_max)
    };
    let v = state.v;
    let v_raw = v + a_cmd * h;
    let (v_next, a_eff) = if (limits.v_min..=limits.v_max).contains(&v_raw) {
        (v_raw, a_cmd)
    } else {
        // Speed clamp active: the realised acceleration is what reaches the
        // limit, kept inside the acceleration limits despite rounding.
        let v_next = v_raw.clamp(limits.v_min, limits.v_max);
        (v_next, ((v_next - v) / h).clamp(limits.a_min, limits.a_max))
    };
    let x_next = state.x_f + v * h + 0.5 * a_eff * h * h;
    Ok((x_next, v_next, a_eff))
}

fn model_state(x_l: f64, v_l: f64, a_l: f64, f: Kinematics) -> CfState {
    CfState {
        s: (x_l - f.x).max(SPACING_FLOOR),
        v: f.v,
        v_l,
        a_l,
        x_l,
        x_f: f.x,
    }
}

/// Number of sub-steps of length `dt` in an observation interval.
fn substeps(interval: f64, dt: f64) -> Result<usize> {
    let n = (interval / dt).round();
    if n < 1.0 || (n * dt - interval).abs() > 1e-6 * interval.max(1.0) {
        return Err(Error::domain(format!(
            "dt = {dt} does not divide the observation interval {interval}"
        )));
    }
    Ok(n as usize)
}

pub fn simulate_follower(
    model: &ModelParams,
    seg: &FollowingSegment,
    limits: &SimLimits,
    dt: f64,
) -> Result<SimResult> {
    limits.validate()?;
    model.validate()?;
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::domain(format!("dt must be > 0, got {dt}")));
    }
    let n = seg.len();
    if n < 2 {
        return Err(Error::InsufficientData {
            required: 2,
            available: n,
        });
    }
    let lead = &seg.leader;

    let mut out = SimResult {
        segment_id: seg.id.clone(),
        t: seg.t.clone(),
        follower_pos: Vec::with_capacity(n),
        follower_speed: Vec::with_capacity(n),
        follower_accel: Vec::with_capacity(n),
        spacing: Vec::with_capacity(n),
        collisions: 0,
    };
    let mut f = Kinematics {
        x: seg.follower.pos[0],
        v: seg.follower.speed[0].clamp(limits.v_min, limits.v_max),
    };

    for i in 0..n {
        let raw_spacing = lead.pos[i] - f.x;
        if raw_spacing <= 0.0 {
            out.collisions += 1;
        }
        out.follower_pos.push(f.x);
        out.follower_speed.push(f.v);
        out.spacing.push(raw_spacing.max(SPACING_FLOOR));

        if i + 1 == n {
            let state = model_state(lead.pos[i], lead.speed[i], lead.accel[i], f);
            let (_, _, a_eff) = step(model, limits, &state, dt)?;
            out.follower_accel.push(a_eff);
            break;
        }

        let interval = seg.t[i + 1] - seg.t[i];
        let subs = substeps(interval, dt)?;
        let h = interval / subs as f64;
        for k in 0..subs {
            let w = k as f64 / subs as f64;
            let lerp = |y: &[f64]| y[i] + w * (y[i + 1] - y[i]);
            let state = model_state(lerp(&lead.pos), lerp(&lead.speed), lerp(&lead.accel), f);
            let (x, v, a_eff) = step(model, limits, &state, h)?;
            if k == 0 {
                out.follower_accel.push(a_eff);
            }
            f = Kinematics { x, v };
        }
    }
    Ok(out)
}

/// Simulates every segment independently, each started from its own first
/// observed follower sample. Output order follows input order.
pub fn simulate_all(
    model: &ModelParams,
    segments: &[FollowingSegment],
    limits: &SimLimits,
    dt: f64,
) -> Result<Vec<SimResult>> {
    segments
        .par_iter()
        .map(|seg| simulate_follower(model, seg, limits, dt))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cleaning::VehicleSeries;
    use crate::models::{defaults, equilibrium_spacing, AccParams, IdmParams};

    fn constant_leader(n: usize, v: f64, x0: f64, follower_x0: f64, follower_v: f64) -> FollowingSegment {
        let t: Vec<f64> = (0..n).map(|i| i as f64).collect();
        let lp: Vec<f64> = t.iter().map(|t| x0 + v * t).collect();
        FollowingSegment::from_series(
            "c",
            t.clone(),
            VehicleSeries { pos: lp, speed: vec![v; n], accel: vec![0.0; n], jerk: vec![] },
            VehicleSeries {
                pos: t.iter().map(|t| follower_x0 + follower_v * t).collect(),
                speed: vec![follower_v; n],
                accel: vec![0.0; n],
                jerk: vec![],
            },
        )
        .unwrap()
    }

    #[test]
    fn equilibrium_is_held() {
        let p = defaults::IDM;
        let se = equilibrium_spacing(&p, 14.0).unwrap();
        let seg = constant_leader(101, 14.0, se, 0.0, 14.0);
        let r = simulate_follower(&ModelParams::Idm(p), &seg, &SimLimits::default(), 1.0).unwrap();
        for s in &r.spacing {
            assert!((s - se).abs() < 1e-6, "{s} vs {se}");
        }
        assert_eq!(r.collisions, 0);
    }

    #[test]
    fn zero_accel_advances_linearly() {
        // A linear controller at its equilibrium commands exactly zero.
        let p = AccParams { k1: 0.1, k2: 0.5, t_des: 2.0, d0: 15.0 };
        let seg = constant_leader(20, 10.0, 35.0, 0.0, 10.0);
        let r = simulate_follower(&ModelParams::LinearAcc(p), &seg, &SimLimits::default(), 1.0).unwrap();
        for (i, x) in r.follower_pos.iter().enumerate() {
            assert_eq!(*x, 10.0 * i as f64);
        }
        assert!(r.follower_accel.iter().all(|a| *a == 0.0));
    }

    #[test]
    fn clamps_hold_and_collisions_are_counted() {
        // Leader parked 11 ft ahead, follower approaching at 18 ft/s with a
        // sluggish controller.
        let n = 30;
        let t: Vec<f64> = (0..n).map(|i| i as f64).collect();
        let seg = FollowingSegment::from_series(
            "stop",
            t.clone(),
            VehicleSeries { pos: vec![10.0; n], speed: vec![0.0; n], accel: vec![0.0; n], jerk: vec![] },
            VehicleSeries { pos: t.iter().map(|t| -1.0 + 0.1 * t).collect(), speed: vec![18.0; n], accel: vec![0.0; n], jerk: vec![] },
        )
        .unwrap();
        let limits = SimLimits::default();
        let r = simulate_follower(&ModelParams::LinearAcc(defaults::LINEAR_ACC), &seg, &limits, 1.0).unwrap();
        assert!(r.collisions > 0);
        assert!(r.spacing.iter().all(|&s| s >= SPACING_FLOOR));
        for (v, a) in r.follower_speed.iter().zip(&r.follower_accel) {
            assert!((limits.v_min..=limits.v_max).contains(v));
            assert!((limits.a_min..=limits.a_max).contains(a));
        }
        // Deterministic replay.
        let r2 = simulate_follower(&ModelParams::LinearAcc(defaults::LINEAR_ACC), &seg, &limits, 1.0).unwrap();
        assert_eq!(r, r2);
    }

    #[test]
    fn substepping_changes_little_on_smooth_input() {
        let p = IdmParams { ..defaults::IDM };
        let n = 121;
        let t: Vec<f64> = (0..n).map(|i| i as f64).collect();
        let lv: Vec<f64> = t.iter().map(|t| 12.0 + 3.0 * (t / 15.0).sin()).collect();
        let la: Vec<f64> = t.iter().map(|t| 0.2 * (t / 15.0).cos()).collect();
        let lp: Vec<f64> = t.iter().map(|t| 100.0 + 12.0 * t - 45.0 * ((t / 15.0).cos() - 1.0)).collect();
        let seg = FollowingSegment::from_series(
            "smooth",
            t.clone(),
            VehicleSeries { pos: lp, speed: lv, accel: la, jerk: vec![] },
            VehicleSeries { pos: vec![0.0; n], speed: vec![12.0; n], accel: vec![0.0; n], jerk: vec![] },
        )
        .unwrap();
        let m = ModelParams::Idm(p);
        let coarse = simulate_follower(&m, &seg, &SimLimits::default(), 1.0).unwrap();
        let fine = simulate_follower(&m, &seg, &SimLimits::default(), 0.5).unwrap();
        let (a, b) = (coarse.spacing[n - 1], fine.spacing[n - 1]);
        assert!((a - b).abs() / b < 0.01, "{a} vs {b}");
    }

    #[test]
    fn saturated_step_stays_within_accel_limits() {
        // v + a_max rounds so that (v' - v) / h would exceed a_max.
        let limits = SimLimits::default();
        let model = ModelParams::LinearAcc(AccParams { k1: 1.0, k2: 1.0, t_des: 0.5, d0: 15.0 });
        let state = CfState::from_positions(381.0, 0.0, 8.710474027060696, 29.0, 0.0);
        let (_, v, a) = step(&model, &limits, &state, 1.0).unwrap();
        assert_eq!(a, limits.a_max);
        assert!(v <= limits.v_max);
    }

    #[test]
    fn dt_must_divide_interval() {
        let seg = constant_leader(10, 10.0, 100.0, 0.0, 10.0);
        let m = ModelParams::Idm(defaults::IDM);
        assert!(simulate_follower(&m, &seg, &SimLimits::default(), 0.3).is_err());
        assert!(simulate_follower(&m, &seg, &SimLimits::default(), 0.25).is_ok());
    }

    #[test]
    fn simulate_all_preserves_order_and_independence() {
        let segs: Vec<_> = (0..3)
            .map(|k| {
                let mut s = constant_leader(15, 8.0 + k as f64, 60.0 + 10.0 * k as f64, 0.0, 8.0);
                s.id = format!("s{k}");
                s
            })
            .collect();
        let m = ModelParams::Blend(defaults::BLEND);
        let lim = SimLimits::default();
        let fwd = simulate_all(&m, &segs, &lim, 1.0).unwrap();
        assert_eq!(fwd.iter().map(|r| r.segment_id.as_str()).collect::<Vec<_>>(), ["s0", "s1", "s2"]);
        let rev_segs: Vec<_> = segs.iter().rev().cloned().collect();
        let rev = simulate_all(&m, &rev_segs, &lim, 1.0).unwrap();
        for (a, b) in fwd.iter().zip(rev.iter().rev()) {
            assert_eq!(a, b);
        }
        assert!(simulate_all(&m, &[], &lim, 1.0).unwrap().is_empty());
    }
}
