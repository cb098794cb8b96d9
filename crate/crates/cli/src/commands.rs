use std::path::Path;

use serde::{Deserialize, Serialize};
use shuttlecf::calib::{calibrate_and_validate, evaluate_fit, CalibrationConfig, CalibrationReport, GofReport};
use shuttlecf::cleaning::{clean_segments, pair_trajectories, CleaningRules, PairedSeries, SegmentSet};
use shuttlecf::ingest::io::{read_gps_csv, read_json, TrajectoryPair};
use shuttlecf::ingest::derive_pair;
use shuttlecf::models::{defaults, ModelParams};
use shuttlecf::report::svg::{self, Series};
use shuttlecf::report::{histogram_series, render_text, ReportInput, SimRun, SimulationOutput, NO_DATA};
use shuttlecf::sim::{simulate_all, SimLimits};
use shuttlecf::stats::summary::summarize;
use shuttlecf::stats::ComfortThresholds;

use crate::error::CliError;
use crate::output::{write_atomic, write_json, ManifestBuilder};
use crate::{CalibrateArgs, CleanArgs, Format, IngestArgs, ReportArgs, SimulateArgs, StatsArgs, ValidateArgs};

const HIST_BINS: usize = 40;

fn read_segments(path: &Path) -> Result<SegmentSet, CliError> {
    let set: SegmentSet = read_json(path)?;
    for seg in &set.segments {
        seg.validate()?;
    }
    Ok(set)
}

fn read_or_default<T: serde::de::DeserializeOwned + Default>(path: Option<&Path>) -> Result<T, CliError> {
    Ok(match path {
        Some(p) => read_json(p)?,
        None => T::default(),
    })
}

fn file_stem(id: &str) -> String {
    id.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect()
}

pub fn ingest(a: &IngestArgs) -> Result<(), CliError> {
    let leader = read_gps_csv(&a.leader)?;
    let follower = read_gps_csv(&a.follower)?;
    let (leader, follower) = derive_pair(&leader, &follower)?;
    let pair = TrajectoryPair { leader, follower };
    write_json(&a.out, &pair)?;
    ManifestBuilder::new("ingest")
        .input(&a.leader)
        .input(&a.follower)
        .output(&a.out)
        .write(&a.out)?;
    Ok(())
}

#[derive(Deserialize)]
#[serde(untagged)]
enum CleanInput {
    Pair(TrajectoryPair),
    Paired(PairedSeries),
}

pub fn clean(a: &CleanArgs) -> Result<(), CliError> {
    let rules: CleaningRules = read_or_default(a.rules.as_deref())?;
    let paired = match read_json::<CleanInput>(&a.input)? {
        CleanInput::Pair(p) => pair_trajectories(&p.leader, &p.follower)?,
        CleanInput::Paired(p) => p,
    };
    let segments = clean_segments(&paired, &rules)?;
    let set = SegmentSet { segments };
    write_json(&a.out, &set)?;
    let mut m = ManifestBuilder::new("clean");
    m.input(&a.input);
    if let Some(r) = &a.rules {
        m.input(r);
    }
    m.output(&a.out).config(&rules).write(&a.out)?;
    println!(
        "kept {} of {} samples in {} segments",
        set.total_samples(),
        paired.len(),
        set.segments.len()
    );
    Ok(())
}

fn write_histograms(dir: &Path, set: &SegmentSet, m: &mut ManifestBuilder) -> Result<(), CliError> {
    let series = histogram_series(&set.segments);
    let units = ["speed (ft/s)", "acceleration (ft/s^2)", "jerk (ft/s^3)", "spacing (ft)"];
    for ((name, data), unit) in series.iter().zip(units) {
        let path = dir.join(format!("hist_{name}.svg"));
        write_atomic(&path, svg::histogram(&format!("Follower {name}"), unit, data, HIST_BINS).as_bytes())?;
        m.output(&path);
    }
    Ok(())
}

pub fn stats(a: &StatsArgs) -> Result<(), CliError> {
    let set = read_segments(&a.segments)?;
    let thresholds: ComfortThresholds = read_or_default(a.thresholds.as_deref())?;
    thresholds.validate()?;
    let report = summarize(&set.segments, &thresholds)?;
    write_json(&a.out, &report)?;
    let mut m = ManifestBuilder::new("stats");
    m.input(&a.segments).output(&a.out).config(&thresholds);
    if let Some(t) = &a.thresholds {
        m.input(t);
    }
    if let Some(dir) = &a.svg_dir {
        write_histograms(dir, &set, &mut m)?;
    }
    m.write(&a.out)?;
    Ok(())
}

fn write_run_plots(dir: &Path, sim: &SimulationOutput, m: &mut ManifestBuilder) -> Result<(), CliError> {
    for run in &sim.runs {
        let r = &run.result;
        let stem = file_stem(&r.segment_id);
        for (what, unit, observed, simulated) in [
            ("spacing", "spacing (ft)", &run.observed_spacing, &r.spacing),
            ("speed", "speed (ft/s)", &run.observed_speed, &r.follower_speed),
        ] {
            let plot = svg::line_plot(
                &format!("{} {what}", r.segment_id),
                unit,
                &r.t,
                &[
                    Series { label: "observed", values: observed, color: "black" },
                    Series { label: "simulated", values: simulated, color: "#d62728" },
                ],
            );
            let path = dir.join(format!("{stem}_{what}.svg"));
            write_atomic(&path, plot.as_bytes())?;
            m.output(&path);
        }
    }
    Ok(())
}

pub fn simulate(a: &SimulateArgs) -> Result<(), CliError> {
    let model: ModelParams = match (&a.model, a.preset) {
        (Some(p), _) => read_json(p)?,
        (None, Some(kind)) => defaults::for_kind(kind.into()),
        (None, None) => return Err(CliError::Usage("one of --model or --preset is required".into())),
    };
    let limits: SimLimits = read_or_default(a.limits.as_deref())?;
    let set = read_segments(&a.segments)?;
    let results = simulate_all(&model, &set.segments, &limits, a.dt)?;
    let out = SimulationOutput {
        model,
        dt: a.dt,
        limits,
        runs: results.into_iter().zip(&set.segments).map(|(r, s)| SimRun::new(r, s)).collect(),
    };
    write_json(&a.out, &out)?;
    let mut m = ManifestBuilder::new("simulate");
    m.input(&a.segments).output(&a.out).config(&serde_json::json!({
        "model": out.model,
        "dt": out.dt,
        "limits": out.limits,
    }));
    for p in a.model.iter().chain(&a.limits) {
        m.input(p);
    }
    if let Some(dir) = &a.svg_dir {
        write_run_plots(dir, &out, &mut m)?;
    }
    m.write(&a.out)?;
    let collisions: usize = out.runs.iter().map(|r| r.result.collisions).sum();
    println!("simulated {} segments, {collisions} collision samples", out.runs.len());
    Ok(())
}

pub fn calibrate(a: &CalibrateArgs) -> Result<(), CliError> {
    let mut config: CalibrationConfig = read_or_default(a.config.as_deref())?;
    if let Some(seeds) = &a.seeds {
        config.ga.seeds = seeds.clone();
    }
    let set = read_segments(&a.segments)?;
    let report = calibrate_and_validate(a.model.into(), &set.segments, &config, a.split, a.split_seed)?;
    write_json(&a.out, &report)?;
    let mut m = ManifestBuilder::new("calibrate");
    m.input(&a.segments)
        .output(&a.out)
        .config(&config)
        .seeds(config.ga.seeds.iter().copied().chain([a.split_seed]));
    if let Some(c) = &a.config {
        m.input(c);
    }
    m.write(&a.out)?;
    println!(
        "{}: calibration NRMSE {:.6}, validation NRMSE {:.6}",
        report.result.model, report.calibration.nrmse_spacing, report.validation.nrmse_spacing
    );
    Ok(())
}

#[derive(Serialize)]
struct ValidationOutput {
    params: ModelParams,
    segments: usize,
    samples: usize,
    gof: GofReport,
}

pub fn validate(a: &ValidateArgs) -> Result<(), CliError> {
    let cal: CalibrationReport = read_json(&a.result)?;
    let set = read_segments(&a.segments)?;
    let gof = evaluate_fit(&cal.result.best_params, &set.segments, &cal.config.limits, cal.config.dt)?;
    let out = ValidationOutput {
        params: cal.result.best_params,
        segments: set.segments.len(),
        samples: set.total_samples(),
        gof,
    };
    write_json(&a.out, &out)?;
    ManifestBuilder::new("validate")
        .input(&a.result)
        .input(&a.segments)
        .output(&a.out)
        .write(&a.out)?;
    Ok(())
}

pub fn report(a: &ReportArgs) -> Result<(), CliError> {
    let inputs = a
        .inputs
        .iter()
        .map(|p| read_json::<ReportInput>(p).map_err(CliError::from))
        .collect::<Result<Vec<_>, _>>()?;
    let mut m = ManifestBuilder::new("report");
    for p in &a.inputs {
        m.input(p);
    }
    match a.format {
        Format::Text => {
            write_atomic(&a.out, render_text(&inputs).as_bytes())?;
            m.output(&a.out);
        }
        Format::Svg => {
            std::fs::create_dir_all(&a.out).map_err(|e| CliError::io(&a.out, e))?;
            for input in &inputs {
                if let ReportInput::Simulation(sim) = input {
                    write_run_plots(&a.out, sim, &mut m)?;
                }
            }
            if let Some(seg) = &a.segments {
                m.input(seg);
                write_histograms(&a.out, &read_segments(seg)?, &mut m)?;
            }
            let wrote_any = inputs.iter().any(|i| matches!(i, ReportInput::Simulation(s) if !s.runs.is_empty()))
                || a.segments.is_some();
            if !wrote_any {
                let path = a.out.join("no_data.svg");
                write_atomic(&path, svg::no_data("report").as_bytes())?;
                m.output(&path);
            }
        }
    }
    let primary = match a.format {
        Format::Text => a.out.clone(),
        Format::Svg => a.out.join("report"),
    };
    m.write(&primary)?;
    if inputs.is_empty() {
        print!("{NO_DATA}");
    }
    Ok(())
}
