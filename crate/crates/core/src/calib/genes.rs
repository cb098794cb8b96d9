//! Gene layouts and default search bounds per model kind.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{AccParams, BlendParams, IdmParams, ModelKind, ModelParams, DEFAULT_VEHICLE_LENGTH};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneBound {
    pub lo: f64,
    pub hi: f64,
}

impl GeneBound {
    pub const fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

const IDM_GENES: [&str; 6] = ["a", "delta", "v0", "s0", "T", "b"];
const BLEND_GENES: [&str; 7] = ["a", "delta", "v0", "s0", "T", "b", "c"];
const ACC_GENES: [&str; 3] = ["t_des", "k1", "k2"];

const IDM_BOUNDS: [GeneBound; 6] = [
    GeneBound::new(0.33, 17.4),
    GeneBound::new(1.0, 10.0),
    GeneBound::new(1.0, 137.0),
    GeneBound::new(0.5, 33.0),
    GeneBound::new(0.1, 5.0),
    GeneBound::new(0.33, 26.0),
];
const COOLNESS_BOUND: GeneBound = GeneBound::new(0.0, 1.0);
const ACC_BOUNDS: [GeneBound; 3] = [
    GeneBound::new(0.1, 9.0),
    GeneBound::new(0.001, 1.0),
    GeneBound::new(0.001, 1.0),
];

pub fn gene_names(kind: ModelKind) -> &'static [&'static str] {
    match kind {
        ModelKind::Idm => &IDM_GENES,
        ModelKind::Blend => &BLEND_GENES,
        ModelKind::LinearAcc => &ACC_GENES,
    }
}

pub fn default_bounds(kind: ModelKind) -> Vec<GeneBound> {
    match kind {
        ModelKind::Idm => IDM_BOUNDS.to_vec(),
        ModelKind::Blend => IDM_BOUNDS.iter().copied().chain([COOLNESS_BOUND]).collect(),
        ModelKind::LinearAcc => ACC_BOUNDS.to_vec(),
    }
}

/// Default bounds with per-gene overrides applied, validated.
pub fn resolve_bounds(kind: ModelKind, overrides: &BTreeMap<String, [f64; 2]>) -> Result<Vec<GeneBound>> {
    let names = gene_names(kind);
    let mut bounds = default_bounds(kind);
    for (name, [lo, hi]) in overrides {
        let Some(i) = names.iter().position(|n| n == name) else {
            return Err(Error::Config(format!("unknown gene '{name}' for model {kind}")));
        };
        bounds[i] = GeneBound::new(*lo, *hi);
    }
    for (name, b) in names.iter().zip(&bounds) {
        if !(b.lo < b.hi) || !b.lo.is_finite() || !b.hi.is_finite() {
            return Err(Error::Config(format!("gene '{name}': need lo < hi, got [{}, {}]", b.lo, b.hi)));
        }
    }
    let check_min = |name: &str, min: f64, strict: bool| -> Result<()> {
        if let Some(i) = names.iter().position(|n| *n == name) {
            let lo = bounds[i].lo;
            if lo < min || (strict && lo == min) {
                return Err(Error::Config(format!("gene '{name}': lower bound {lo} is infeasible")));
            }
        }
        Ok(())
    };
    for name in ["a", "v0", "s0", "T", "b", "t_des", "k1", "k2"] {
        check_min(name, 0.0, true)?;
    }
    check_min("delta", 1.0, false)?;
    check_min("c", 0.0, false)?;
    if let Some(i) = names.iter().position(|n| *n == "c") {
        if bounds[i].hi > 1.0 {
            return Err(Error::Config("gene 'c': upper bound exceeds 1".into()));
        }
    }
    Ok(bounds)
}

/// Settings that shape a model but are not calibrated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ModelOptions {
    /// Vehicle length for the linear controller, ft.
    pub d0: f64,
    /// Use the two-regime improved IDM inside the blend.
    pub improved: bool,
}

impl Default for ModelOptions {
    fn default() -> Self {
        Self {
            d0: DEFAULT_VEHICLE_LENGTH,
            improved: false,
        }
    }
}

fn decode_idm(g: &[f64]) -> IdmParams {
    IdmParams {
        a: g[0],
        delta: g[1].round().max(1.0) as u32,
        v0: g[2],
        s0: g[3],
        time_gap: g[4],
        b: g[5],
    }
}

/// Maps a gene vector onto model parameters. The exponent gene is rounded to
/// the nearest integer.
pub fn decode(kind: ModelKind, genes: &[f64], options: &ModelOptions) -> ModelParams {
    debug_assert_eq!(genes.len(), gene_names(kind).len());
    match kind {
        ModelKind::Idm => ModelParams::Idm(decode_idm(genes)),
        ModelKind::Blend => ModelParams::Blend(BlendParams {
            idm: decode_idm(genes),
            c: genes[6],
            improved: options.improved,
        }),
        ModelKind::LinearAcc => ModelParams::LinearAcc(AccParams {
            t_des: genes[0],
            k1: genes[1],
            k2: genes[2],
            d0: options.d0,
        }),
    }
}

pub fn encode(params: &ModelParams) -> Vec<f64> {
    let idm = |p: &IdmParams| vec![p.a, f64::from(p.delta), p.v0, p.s0, p.time_gap, p.b];
    match params {
        ModelParams::Idm(p) => idm(p),
        ModelParams::Blend(p) => {
            let mut g = idm(&p.idm);
            g.push(p.c);
            g
        }
        ModelParams::LinearAcc(p) => vec![p.t_des, p.k1, p.k2],
    }
}
