//! CSV fix logs in, trajectory JSON out.

use std::io::Read;
use std::path::Path;

use chrono::{DateTime, NaiveDateTime};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{GpsFix, Trajectory};

/// Header every fix log must carry, in this order.
pub const GPS_HEADER: [&str; 3] = ["t", "lat", "lon"];

/// A leader/follower pair as produced by `ingest --leader --follower`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPair {
    pub leader: Trajectory,
    pub follower: Trajectory,
}

/// Parses epoch seconds (`1650000000.5`) or ISO-8601 (`2022-04-15T13:20:00Z`,
/// offset optional; a bare timestamp is read as UTC).
pub fn parse_timestamp(raw: &str) -> Result<f64> {
    let s = raw.trim();
    if let Ok(v) = s.parse::<f64>() {
        return Ok(v);
    }
    let to_secs = |secs: i64, nanos: u32| secs as f64 + nanos as f64 * 1e-9;
    if let Ok(dt) = DateTime::parse_from_rfc3339(s) {
        return Ok(to_secs(dt.timestamp(), dt.timestamp_subsec_nanos()));
    }
    for fmt in ["%Y-%m-%dT%H:%M:%S%.f", "%Y-%m-%d %H:%M:%S%.f"] {
        if let Ok(dt) = NaiveDateTime::parse_from_str(s, fmt) {
            let utc = dt.and_utc();
            return Ok(to_secs(utc.timestamp(), utc.timestamp_subsec_nanos()));
        }
    }
    Err(Error::Parse(format!("unrecognised timestamp '{s}'")))
}

pub fn parse_gps_csv<R: Read>(reader: R) -> Result<Vec<GpsFix>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let header = rdr.headers().map_err(|e| Error::Parse(e.to_string()))?;
    if header.iter().collect::<Vec<_>>() != GPS_HEADER {
        return Err(Error::Parse(format!(
            "expected header 't,lat,lon', found '{}'",
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }

    let mut fixes = Vec::new();
    for (row, record) in rdr.records().enumerate() {
        let record = record.map_err(|e| Error::Parse(e.to_string()))?;
        let field = |i: usize| -> Result<f64> {
            record[i]
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("row {}: bad {} '{}'", row + 1, GPS_HEADER[i], &record[i])))
        };
        let fix = GpsFix::new(parse_timestamp(&record[0])?, field(1)?, field(2)?);
        fix.validate()?;
        fixes.push(fix);
    }
    Ok(fixes)
}

pub fn read_gps_csv(path: impl AsRef<Path>) -> Result<Vec<GpsFix>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    parse_gps_csv(file)
}

/// Reads any JSON document from disk.
pub fn read_json<T: serde::de::DeserializeOwned>(path: impl AsRef<Path>) -> Result<T> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}
