//! Car-following acceleration kernels.
//!
//! Three model kinds are calibrated:
//!
//! * `idm`: the Intelligent Driver Model.
//! * `blend`: IDM blended with the constant-acceleration heuristic (CAH)
//!   through a coolness factor `c`. Field studies often call this model
//!   "IIDM" or "ACC"; here it is always `blend`. With `improved = true` the
//!   IDM term is replaced by the two-regime improved IDM.
//! * `linear_acc`: a linear controller on gap error and speed difference.
//!
//! All quantities are feet and seconds. Kernels return raw, unclamped
//! accelerations; the simulator applies vehicle limits.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default vehicle length used in the linear controller's gap error, ft.
pub const DEFAULT_VEHICLE_LENGTH: f64 = 15.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdmParams {
    /// Maximum acceleration, ft/s².
    pub a: f64,
    /// Acceleration exponent.
    pub delta: u32,
    /// Desired speed, ft/s.
    pub v0: f64,
    /// Jam distance, ft.
    pub s0: f64,
    /// Desired time gap, s.
    #[serde(rename = "T")]
    pub time_gap: f64,
    /// Comfortable deceleration (positive magnitude), ft/s².
    pub b: f64,
}

impl IdmParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("a", self.a),
            ("v0", self.v0),
            ("s0", self.s0),
            ("T", self.time_gap),
            ("b", self.b),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::domain(format!("IDM parameter {name} must be > 0, got {v}")));
            }
        }
        if self.delta < 1 {
            return Err(Error::domain("IDM exponent delta must be >= 1"));
        }
        Ok(())
    }

    /// Desired dynamic gap `s*`.
    pub fn desired_gap(&self, v: f64, dv: f64) -> f64 {
        self.s0 + (v * self.time_gap + v * dv / (2.0 * (self.a * self.b).sqrt())).max(0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlendParams {
    #[serde(flatten)]
    pub idm: IdmParams,
    /// Coolness factor in [0, 1].
    pub c: f64,
    /// Use the two-regime improved IDM as the IDM term.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub improved: bool,
}

impl BlendParams {
    pub fn validate(&self) -> Result<()> {
        self.idm.validate()?;
        if !(0.0..=1.0).contains(&self.c) {
            return Err(Error::domain(format!("coolness factor must be in [0, 1], got {}", self.c)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AccParams {
    /// Gain on gap error, 1/s².
    pub k1: f64,
    /// Gain on speed difference, 1/s.
    pub k2: f64,
    /// Desired time gap, s.
    pub t_des: f64,
    /// Vehicle length in the gap error, ft.
    #[serde(default = "default_vehicle_length")]
    pub d0: f64,
}

fn default_vehicle_length() -> f64 {
    DEFAULT_VEHICLE_LENGTH
}

impl AccParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("k1", self.k1), ("k2", self.k2), ("t_des", self.t_des)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::domain(format!("ACC parameter {name} must be > 0, got {v}")));
            }
        }
        if !(self.d0 >= 0.0) {
            return Err(Error::domain(format!("d0 must be >= 0, got {}", self.d0)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Idm,
    Blend,
    LinearAcc,
}

impl ModelKind {
    pub const ALL: [ModelKind; 3] = [ModelKind::Idm, ModelKind::Blend, ModelKind::LinearAcc];

    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::Idm => "idm",
            ModelKind::Blend => "blend",
            ModelKind::LinearAcc => "linear_acc",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "idm" => Ok(ModelKind::Idm),
            "blend" | "iidm" => Ok(ModelKind::Blend),
            "linear_acc" | "acc" => Ok(ModelKind::LinearAcc),
            other => Err(Error::domain(format!("unknown model kind '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum ModelParams {
    Idm(IdmParams),
    Blend(BlendParams),
    LinearAcc(AccParams),
}

impl ModelParams {
    pub fn kind(&self) -> ModelKind {
        match self {
            ModelParams::Idm(_) => ModelKind::Idm,
            ModelParams::Blend(_) => ModelKind::Blend,
            ModelParams::LinearAcc(_) => ModelKind::LinearAcc,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ModelParams::Idm(p) => p.validate(),
            ModelParams::Blend(p) => p.validate(),
            ModelParams::LinearAcc(p) => p.validate(),
        }
    }

    /// Raw model acceleration for `state`.
    pub fn accel(&self, state: &CfState) -> Result<f64> {
        match self {
            ModelParams::Idm(p) => idm_accel(p, state.s, state.v, state.dv()),
            ModelParams::Blend(p) => blend_accel(p, state),
            ModelParams::LinearAcc(p) => Ok(linear_acc_accel(p, state)),
        }
    }
}

/// Instantaneous leader/follower state seen by a kernel.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CfState {
    /// Spacing, ft.
    pub s: f64,
    /// Follower speed, ft/s.
    pub v: f64,
    /// Leader speed, ft/s.
    pub v_l: f64,
    /// Leader acceleration, ft/s².
    pub a_l: f64,
    /// Leader position, ft.
    pub x_l: f64,
    /// Follower position, ft.
    pub x_f: f64,
}

impl CfState {
    /// State from positions; spacing is their difference.
    pub fn from_positions(x_l: f64, x_f: f64, v: f64, v_l: f64, a_l: f64) -> Self {
        Self {
            s: x_l - x_f,
            v,
            v_l,
            a_l,
            x_l,
            x_f,
        }
    }

    /// Approach rate `v - v_l`; positive when closing in.
    pub fn dv(&self) -> f64 {
        self.v - self.v_l
    }
}

fn require_gap(s: f64) -> Result<()> {
    if s > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("spacing must be > 0, got {s}")))
    }
}

/// Intelligent Driver Model acceleration, `dv = v - v_l`.
pub fn idm_accel(p: &IdmParams, s: f64, v: f64, dv: f64) -> Result<f64> {
    require_gap(s)?;
    let free = (v / p.v0).powi(p.delta as i32);
    let interaction = (p.desired_gap(v, dv) / s).powi(2);
    Ok(p.a * (1.0 - free - interaction))
}

/// Two-regime improved IDM: no interaction penalty while the gap exceeds the
/// desired gap, and no free-road reduction when it does not.
pub fn improved_idm_accel(p: &IdmParams, s: f64, v: f64, dv: f64) -> Result<f64> {
    require_gap(s)?;
    let z = p.desired_gap(v, dv) / s;
    let delta = f64::from(p.delta);
    let a_free = if v <= p.v0 {
        p.a * (1.0 - (v / p.v0).powf(delta))
    } else {
        -p.b * (1.0 - (p.v0 / v).powf(p.a * delta / p.b))
    };
    Ok(if v <= p.v0 {
        if z >= 1.0 {
            p.a * (1.0 - z * z)
        } else if a_free == 0.0 {
            0.0
        } else {
            a_free * (1.0 - z.powf(2.0 * p.a / a_free))
        }
    } else if z >= 1.0 {
        a_free + p.a * (1.0 - z * z)
    } else {
        a_free
    })
}

/// Constant-acceleration heuristic: the largest acceleration that avoids a
/// crash if the leader keeps its current acceleration (capped at `p.a`).
pub fn cah_accel(p: &IdmParams, s: f64, v: f64, v_l: f64, a_l: f64) -> Result<f64> {
    require_gap(s)?;
    let a_eff = a_l.min(p.a);
    let denom = v_l * v_l - 2.0 * s * a_eff;
    if v_l * (v - v_l) <= -2.0 * s * a_eff && denom > 0.0 {
        // Both vehicles would be stopped by the time the gap closes.
        Ok(v * v * a_eff / denom)
    } else {
        let closing = v - v_l;
        let step = if closing > 0.0 { 1.0 } else { 0.0 };
        Ok(a_eff - step * closing * closing / (2.0 * s))
    }
}

/// IDM/CAH blend. Returns the IDM value whenever it is not below CAH;
/// otherwise mixes towards a smoothed CAH response with weight `c`.
pub fn blend_accel(p: &BlendParams, state: &CfState) -> Result<f64> {
    let a_i = if p.improved {
        improved_idm_accel(&p.idm, state.s, state.v, state.dv())?
    } else {
        idm_accel(&p.idm, state.s, state.v, state.dv())?
    };
    let a_c = cah_accel(&p.idm, state.s, state.v, state.v_l, state.a_l)?;
    Ok(blend_mix(a_i, a_c, p.c, p.idm.b))
}

/// The mixing step of [`blend_accel`] for given IDM and CAH values.
pub fn blend_mix(a_i: f64, a_c: f64, c: f64, b: f64) -> f64 {
    if a_i >= a_c {
        a_i
    } else {
        (1.0 - c) * a_i + c * (a_c + b * ((a_i - a_c) / b).tanh())
    }
}

/// Linear controller on gap error `x_l - x_f - d0 - t_des v` and speed
/// difference `v_l - v`.
pub fn linear_acc_accel(p: &AccParams, state: &CfState) -> f64 {
    let gap_error = state.x_l - state.x_f - p.d0 - p.t_des * state.v;
    p.k1 * gap_error + p.k2 * (state.v_l - state.v)
}

/// Spacing at which IDM yields zero acceleration when following at matched
/// speed `v`.
pub fn equilibrium_spacing(p: &IdmParams, v: f64) -> Result<f64> {
    if !(v >= 0.0 && v < p.v0) {
        return Err(Error::domain(format!(
            "no finite equilibrium for v = {v} (need 0 <= v < v0 = {})",
            p.v0
        )));
    }
    Ok((p.s0 + v * p.time_gap) / (1.0 - (v / p.v0).powi(p.delta as i32)).sqrt())
}

/// Calibrated shuttle parameter sets.
pub mod defaults {
    use super::*;

    pub const IDM: IdmParams = IdmParams {
        a: 2.76,
        delta: 1,
        v0: 20.00,
        s0: 9.89,
        time_gap: 2.79,
        b: 24.58,
    };

    pub const LINEAR_ACC: AccParams = AccParams {
        k1: 0.01,
        k2: 0.43,
        t_des: 4.96,
        d0: DEFAULT_VEHICLE_LENGTH,
    };

    pub const BLEND: BlendParams = BlendParams {
        idm: IdmParams {
            a: 1.214,
            delta: 3,
            v0: 18.742,
            s0: 9.892,
            time_gap: 2.980,
            b: 24.846,
        },
        c: 0.959,
        improved: false,
    };

    pub fn for_kind(kind: ModelKind) -> ModelParams {
        match kind {
            ModelKind::Idm => ModelParams::Idm(IDM),
            ModelKind::Blend => ModelParams::Blend(BLEND),
            ModelKind::LinearAcc => ModelParams::LinearAcc(LINEAR_ACC),
        }
    }
}
