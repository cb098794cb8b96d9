//! Goodness-of-fit between simulated and observed series.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gof {
    pub mae: f64,
    pub rmse: f64,
    /// RMSE divided by the root mean square of the observations.
    pub nrmse: f64,
}

/// Running sums for a pooled fit over several series.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct GofAccumulator {
    n: usize,
    abs_err: f64,
    sq_err: f64,
    sq_obs: f64,
}

impl GofAccumulator {
    pub fn push(&mut self, sim: f64, obs: f64) {
        let e = sim - obs;
        self.n += 1;
        self.abs_err += e.abs();
        self.sq_err += e * e;
        self.sq_obs += obs * obs;
    }

    pub fn extend(&mut self, sim: &[f64], obs: &[f64]) {
        for (s, o) in sim.iter().zip(obs) {
            self.push(*s, *o);
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn finish(&self) -> Result<Gof> {
        if self.n == 0 {
            return Err(Error::InsufficientData {
                required: 1,
                available: 0,
            });
        }
        if self.sq_obs == 0.0 {
            return Err(Error::NrmseUndefined);
        }
        let n = self.n as f64;
        let rmse = (self.sq_err / n).sqrt();
        Ok(Gof {
            mae: self.abs_err / n,
            rmse,
            nrmse: rmse / (self.sq_obs / n).sqrt(),
        })
    }
}

pub fn gof(sim: &[f64], obs: &[f64]) -> Result<Gof> {
    if sim.len() != obs.len() {
        return Err(Error::domain(format!(
            "simulated and observed lengths differ ({} vs {})",
            sim.len(),
            obs.len()
        )));
    }
    let mut acc = GofAccumulator::default();
    acc.extend(sim, obs);
    acc.finish()
}
