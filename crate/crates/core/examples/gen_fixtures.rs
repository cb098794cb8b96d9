//! Regenerates the files under `fixtures/`.
//!
//! cargo run -p shuttlecf-core --example gen_fixtures

use std::fs;
use std::io::Write;
use std::path::Path;

use shuttlecf::cleaning::SegmentSet;
use shuttlecf::fixtures;
use shuttlecf::ingest::GpsFix;
use shuttlecf::models::{defaults, ModelParams};

fn write_gps(path: &Path, fixes: &[GpsFix]) -> std::io::Result<()> {
    let mut out = String::from("t,lat,lon\n");
    for f in fixes {
        out.push_str(&format!("{},{},{}\n", f.t, f.lat, f.lon));
    }
    fs::write(path, out)
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    fs::create_dir_all(&dir)?;
    let truth = ModelParams::Idm(defaults::IDM);

    fs::write(dir.join("cleaning_paired.json"), serde_json::to_string(&fixtures::cleaning_paired())?)?;

    let mut jerk = fs::File::create(dir.join("comfort_jerk.csv"))?;
    writeln!(jerk, "jerk")?;
    for j in fixtures::comfort_jerk() {
        writeln!(jerk, "{j}")?;
    }

    let segments = fixtures::synthetic_segments(&truth, 10.0, 6)?;
    fs::write(dir.join("idm_segments.json"), serde_json::to_string(&SegmentSet { segments })?)?;

    let (leader, follower) = fixtures::gps_pair(&truth, 10.0)?;
    write_gps(&dir.join("leader.csv"), &leader)?;
    write_gps(&dir.join("follower.csv"), &follower)?;

    println!("fixtures written to {}", dir.display());
    Ok(())
}
