//! Plain-text tables and static SVG plots of pipeline results.

pub mod svg;

use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::calib::{CalibrationReport, GofReport};
use crate::cleaning::FollowingSegment;
use crate::models::{ModelKind, ModelParams};
use crate::sim::{SimLimits, SimResult};
use crate::stats::summary::{PerVariable, StatsReport};

pub const NO_DATA: &str = "no data\n";

/// Output of a simulation run, with the observations needed to plot it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationOutput {
    pub model: ModelParams,
    pub dt: f64,
    pub limits: SimLimits,
    pub runs: Vec<SimRun>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimRun {
    #[serde(flatten)]
    pub result: SimResult,
    pub observed_spacing: Vec<f64>,
    pub observed_speed: Vec<f64>,
}

impl SimRun {
    pub fn new(result: SimResult, seg: &FollowingSegment) -> Self {
        Self {
            result,
            observed_spacing: seg.spacing.clone(),
            observed_speed: seg.follower.speed.clone(),
        }
    }
}

/// Any result document the report command understands.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ReportInput {
    Calibration(Box<CalibrationReport>),
    Stats(Box<StatsReport>),
    Simulation(Box<SimulationOutput>),
}

fn table(out: &mut String, header: &[&str], rows: &[Vec<String>]) {
    let cols = header.len();
    let mut width = vec![0; cols];
    for (i, h) in header.iter().enumerate() {
        width[i] = h.chars().count();
    }
    for r in rows {
        for (i, c) in r.iter().enumerate() {
            width[i] = width[i].max(c.chars().count());
        }
    }
    let line = |out: &mut String, cells: &mut dyn Iterator<Item = &str>| {
        let mut s = String::new();
        for (i, c) in cells.enumerate() {
            if i == 0 {
                let _ = write!(s, "{c:<w$}", w = width[0]);
            } else {
                let _ = write!(s, "  {c:>w$}", w = width[i]);
            }
        }
        out.push_str(s.trim_end());
        out.push('\n');
    };
    line(out, &mut header.iter().copied());
    let rule: usize = width.iter().sum::<usize>() + 2 * (cols - 1);
    out.push_str(&"-".repeat(rule));
    out.push('\n');
    for r in rows {
        line(out, &mut r.iter().map(String::as_str));
    }
}

fn opt(x: Option<f64>, prec: usize) -> String {
    x.map_or_else(|| "n/a".to_string(), |v| format!("{v:.prec$}"))
}

/// Descriptive table (mean, std, min, quartiles, max by variable) followed by
/// normality, correlation, variability and comfort sections.
pub fn stats_text(r: &StatsReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "Descriptive statistics ({} samples, {} segments)\n", r.n_samples, r.n_segments);
    let header = ["", "Speed (ft/s)", "Accel (ft/s^2)", "Jerk (ft/s^3)", "Spacing (ft)"];
    let d = &r.descriptive;
    let row = |label: &str, f: fn(&crate::stats::DescriptiveStats) -> f64| -> Vec<String> {
        std::iter::once(label.to_string())
            .chain(d.iter().map(|(_, s)| format!("{:.3}", f(s))))
            .collect()
    };
    let rows = vec![
        row("mean", |s| s.mean),
        row("std", |s| s.std),
        row("min", |s| s.min),
        row("25%", |s| s.q25),
        row("50%", |s| s.q50),
        row("75%", |s| s.q75),
        row("max", |s| s.max),
    ];
    table(&mut out, &header, &rows);

    out.push_str("\nShapiro-Wilk\n\n");
    let rows: Vec<Vec<String>> = r
        .normality
        .iter()
        .map(|(name, e)| match (&e.result, &e.error) {
            (Some(sw), _) => vec![
                name.to_string(),
                format!("{:.4}", sw.w),
                format!("{:.4e}", sw.p),
                if sw.non_normal() { "non-normal" } else { "normal" }.to_string(),
            ],
            (None, err) => vec![
                name.to_string(),
                "n/a".into(),
                "n/a".into(),
                err.clone().unwrap_or_default(),
            ],
        })
        .collect();
    table(&mut out, &["", "W", "p", ""], &rows);

    out.push_str("\nSpearman correlation\n\n");
    let vars = &r.spearman.variables;
    let mut header: Vec<&str> = vec![""];
    header.extend(vars.iter().map(String::as_str));
    let rows: Vec<Vec<String>> = vars
        .iter()
        .zip(&r.spearman.rho)
        .map(|(v, row)| std::iter::once(v.clone()).chain(row.iter().map(|x| opt(*x, 3))).collect())
        .collect();
    table(&mut out, &header, &rows);

    out.push_str("\nVariability by phase (mean over trips)\n\n");
    let rows: Vec<Vec<String>> = r
        .variability
        .iter()
        .map(|v| {
            vec![
                v.variable.clone(),
                format!("{:?}", v.phase).to_lowercase(),
                opt(v.mean_cv, 4),
                opt(v.mean_outlier_share, 4),
                v.trips.to_string(),
            ]
        })
        .collect();
    table(&mut out, &["variable", "phase", "CV", "outlier share", "trips"], &rows);

    out.push_str("\nJerk comfort\n\n");
    let th = &r.comfort_thresholds;
    let c = &r.comfort;
    let rows = vec![
        vec![format!("|jerk| > {}", th.excellent), format!("{:.4}", c.excellent)],
        vec![format!("|jerk| > {}", th.upper_excellent), format!("{:.4}", c.upper_excellent)],
        vec![format!("|jerk| > {}", th.expected), format!("{:.4}", c.expected)],
    ];
    table(&mut out, &["threshold (ft/s^3)", "share"], &rows);
    let _ = writeln!(
        out,
        "\n|accel| > {} ft/s^2: {:.4} of samples",
        r.accel_comfort_limit, r.accel_above_comfort_limit
    );
    out
}

fn model_label(kind: ModelKind) -> &'static str {
    match kind {
        ModelKind::Idm => "IDM",
        ModelKind::Blend => "IIDM",
        ModelKind::LinearAcc => "ACC",
    }
}

/// Error tables for calibration and validation sets: rows NRMSE / MAE / RMSE,
/// spacing columns then speed columns, one column per model.
pub fn gof_text(reports: &[&CalibrationReport]) -> String {
    if reports.is_empty() {
        return NO_DATA.to_string();
    }
    let labels: Vec<&str> = reports.iter().map(|r| model_label(r.result.model)).collect();
    let mut header = vec!["Error".to_string()];
    header.extend(labels.iter().map(|l| format!("{l} spacing")));
    header.extend(labels.iter().map(|l| format!("{l} speed")));
    let header: Vec<&str> = header.iter().map(String::as_str).collect();

    let mut out = String::new();
    for (title, pick) in [
        ("Calibration", (|r: &CalibrationReport| r.calibration) as fn(&CalibrationReport) -> GofReport),
        ("Validation", |r: &CalibrationReport| r.validation),
    ] {
        let _ = writeln!(out, "{title} (spacing ft, speed ft/s)\n");
        let gofs: Vec<GofReport> = reports.iter().map(|r| pick(r)).collect();
        let rows: Vec<Vec<String>> = [
            ("NRMSE", (|g: &crate::calib::Gof| g.nrmse) as fn(&crate::calib::Gof) -> f64),
            ("MAE", |g| g.mae),
            ("RMSE", |g| g.rmse),
        ]
        .iter()
        .map(|(name, f)| {
            std::iter::once(name.to_string())
                .chain(gofs.iter().map(|g| format!("{:.8}", f(&g.spacing()))))
                .chain(gofs.iter().map(|g| format!("{:.8}", f(&g.speed()))))
                .collect()
        })
        .collect();
        table(&mut out, &header, &rows);
        out.push('\n');
    }
    out
}

/// Published reference values shown beside calibrated parameters, ft and s.
fn literature(kind: ModelKind) -> (&'static [&'static str], &'static [[&'static str; 5]]) {
    match kind {
        ModelKind::Idm => (
            &["Kesting 2008", "Zhu 2018", "Treiber 2000", "Kovacs 2016", "Salles 2022"],
            &[
                ["4.59", "[0.33-16.40]", "2.40", "5.25", "8.20 - 17.39"],
                ["4", "[1-40]", "4", "4", "2"],
                ["100.25", "[0.09 - 136.70]", "109.36", "50.12", "45.57"],
                ["6.56", "[1.64 - 32.81]", "6.56", "6.56", "[4.92 - 8.20]"],
                ["0.60", "[0.1 - 0.5]", "1.60", "0.86", "[1.1-1.3]"],
                ["6.56", "[0.33 - 16.40]", "5.48", "6.56", "[8.20 - 17.39]"],
            ],
        ),
        ModelKind::Blend => (
            &["Kesting 2010", "", "", "", ""],
            &[
                ["4.59", "", "", "", ""],
                ["4", "", "", "", ""],
                ["109.36", "", "", "", ""],
                ["6.562", "", "", "", ""],
                ["1.5", "", "", "", ""],
                ["6.56", "", "", "", ""],
                ["0.99", "", "", "", ""],
            ],
        ),
        ModelKind::LinearAcc => (
            &["Milanes 2014", "Xiao 2017", "", "", ""],
            &[
                ["[0.4-0.7]", "[1.0 - 9.0]", "", "", ""],
                ["0.23", "0.23", "", "", ""],
                ["0.04", "0.07", "", "", ""],
            ],
        ),
    }
}

fn param_rows(params: &ModelParams) -> Vec<(&'static str, &'static str, String)> {
    let idm = |p: &crate::models::IdmParams| {
        vec![
            ("a", "Max acceleration (ft/s^2)", format!("{:.3}", p.a)),
            ("exp", "Acceleration exponent", p.delta.to_string()),
            ("v0", "Desired speed (ft/s)", format!("{:.3}", p.v0)),
            ("s0", "Jam distance (ft)", format!("{:.3}", p.s0)),
            ("T", "Desired time gap (s)", format!("{:.3}", p.time_gap)),
            ("b", "Desired deceleration (ft/s^2)", format!("{:.3}", p.b)),
        ]
    };
    match params {
        ModelParams::Idm(p) => idm(p),
        ModelParams::Blend(p) => {
            let mut rows = idm(&p.idm);
            rows.push(("c", "Coolness factor", format!("{:.3}", p.c)));
            rows
        }
        ModelParams::LinearAcc(p) => vec![
            ("t_des", "Desired time gap (s)", format!("{:.3}", p.t_des)),
            ("k1", "Gap gain (1/s^2)", format!("{:.3}", p.k1)),
            ("k2", "Speed gain (1/s)", format!("{:.3}", p.k2)),
        ],
    }
}

/// Calibrated parameters beside published values for the same model.
pub fn params_text(params: &ModelParams) -> String {
    let kind = params.kind();
    let (sources, values) = literature(kind);
    let sources: Vec<&str> = sources.iter().copied().filter(|s| !s.is_empty()).collect();
    let mut header = vec!["Parameter", "Description", "Calibrated"];
    header.extend(&sources);
    let rows: Vec<Vec<String>> = param_rows(params)
        .into_iter()
        .zip(values)
        .map(|((sym, desc, val), lit)| {
            [sym.to_string(), desc.to_string(), val]
                .into_iter()
                .chain(lit[..sources.len()].iter().map(|s| s.to_string()))
                .collect()
        })
        .collect();
    let mut out = format!("{} parameters\n\n", model_label(kind));
    table(&mut out, &header, &rows);
    out
}

pub fn calibration_text(r: &CalibrationReport) -> String {
    let mut out = params_text(&r.result.best_params);
    let _ = writeln!(
        out,
        "\nfitness (spacing NRMSE) {:.8} after {} generations; split {} / {} segments\n",
        r.result.fitness,
        r.result.generations_run,
        r.split.calibration_ids.len(),
        r.split.validation_ids.len()
    );
    let rows: Vec<Vec<String>> = r
        .result
        .per_seed
        .iter()
        .map(|s| vec![s.seed.to_string(), format!("{:.8}", s.fitness), s.generations_run.to_string()])
        .collect();
    table(&mut out, &["seed", "fitness", "generations"], &rows);
    out.push('\n');
    out.push_str(&gof_text(&[r]));
    out
}

pub fn simulation_text(s: &SimulationOutput) -> String {
    if s.runs.is_empty() {
        return NO_DATA.to_string();
    }
    let rows: Vec<Vec<String>> = s
        .runs
        .iter()
        .map(|run| {
            let g = crate::calib::gof(&run.result.spacing, &run.observed_spacing).ok();
            vec![
                run.result.segment_id.clone(),
                run.result.t.len().to_string(),
                run.result.collisions.to_string(),
                opt(g.map(|g| g.nrmse), 6),
                opt(g.map(|g| g.rmse), 3),
            ]
        })
        .collect();
    let mut out = format!("Simulation with {} (dt = {} s)\n\n", model_label(s.model.kind()), s.dt);
    table(&mut out, &["segment", "samples", "collisions", "spacing NRMSE", "spacing RMSE"], &rows);
    out
}

/// Text rendering of a set of result documents. Calibration reports are also
/// gathered into one side-by-side error table.
pub fn render_text(inputs: &[ReportInput]) -> String {
    if inputs.is_empty() {
        return NO_DATA.to_string();
    }
    let mut out = String::new();
    let mut calibs = Vec::new();
    for input in inputs {
        match input {
            ReportInput::Stats(r) => out.push_str(&stats_text(r)),
            ReportInput::Calibration(r) => {
                out.push_str(&calibration_text(r));
                calibs.push(r.as_ref());
            }
            ReportInput::Simulation(s) => out.push_str(&simulation_text(s)),
        }
        out.push('\n');
    }
    if calibs.len() > 1 {
        out.push_str("All models\n\n");
        out.push_str(&gof_text(&calibs));
    }
    out
}

/// Histogram series of a stats report's input, by variable.
pub fn histogram_series(segments: &[FollowingSegment]) -> PerVariable<Vec<f64>> {
    let mut v = PerVariable {
        speed: Vec::new(),
        accel: Vec::new(),
        jerk: Vec::new(),
        spacing: Vec::new(),
    };
    for seg in segments {
        v.speed.extend_from_slice(&seg.follower.speed);
        v.accel.extend_from_slice(&seg.follower.accel);
        v.jerk.extend(crate::stats::summary::follower_jerk(seg));
        v.spacing.extend_from_slice(&seg.spacing);
    }
    v
}
