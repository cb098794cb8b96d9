//! Great-circle distances between GPS fixes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::units::FT_PER_M;

/// Mean earth radius (IUGG), metres.
pub const EARTH_RADIUS_M: f64 = 6_371_008.8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GpsFix {
    /// Seconds since epoch.
    pub t: f64,
    pub lat: f64,
    pub lon: f64,
}

impl GpsFix {
    pub fn new(t: f64, lat: f64, lon: f64) -> Self {
        Self { t, lat, lon }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.t.is_finite() {
            return Err(Error::domain(format!("non-finite timestamp {}", self.t)));
        }
        if !(-90.0..=90.0).contains(&self.lat) {
            return Err(Error::domain(format!("latitude {} outside [-90, 90]", self.lat)));
        }
        if !(-180.0..=180.0).contains(&self.lon) {
            return Err(Error::domain(format!("longitude {} outside [-180, 180]", self.lon)));
        }
        Ok(())
    }
}

/// Haversine distance between two fixes, in feet.
pub fn geodesic_distance(a: &GpsFix, b: &GpsFix) -> Result<f64> {
    a.validate()?;
    b.validate()?;
    Ok(haversine_ft(a.lat, a.lon, b.lat, b.lon))
}

pub(crate) fn haversine_ft(lat1: f64, lon1: f64, lat2: f64, lon2: f64) -> f64 {
    let phi1 = lat1.to_radians();
    let phi2 = lat2.to_radians();
    let dphi = (lat2 - lat1).to_radians();
    let dlambda = (lon2 - lon1).to_radians();

    let h = (dphi / 2.0).sin().powi(2) + phi1.cos() * phi2.cos() * (dlambda / 2.0).sin().powi(2);
    // Clamp guards against h drifting above 1 for antipodal points.
    let c = 2.0 * h.sqrt().min(1.0).asin();
    c * EARTH_RADIUS_M * FT_PER_M
}
