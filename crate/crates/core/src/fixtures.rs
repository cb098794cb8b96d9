//! Deterministic synthetic data used by tests, benches and the bundled
//! fixture files.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cleaning::{CleaningRules, FollowingSegment, PairedSeries, VehicleSeries};
use crate::error::Result;
use crate::ingest::geo::EARTH_RADIUS_M;
use crate::ingest::units::FT_PER_M;
use crate::ingest::GpsFix;
use crate::models::ModelParams;
use crate::sim::{simulate_follower, SimLimits};

/// One leg of a leader speed schedule: hold `accel` for `secs` seconds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Leg {
    pub accel: f64,
    pub secs: usize,
}

const fn leg(accel: f64, secs: usize) -> Leg {
    Leg { accel, secs }
}

/// Accelerate / cruise / brake cycles at shuttle speeds, 600 s in total.
pub const CYCLES: [Leg; 31] = [
    leg(2.0, 9),
    leg(0.0, 25),
    leg(-3.0, 6),
    leg(0.0, 10),
    leg(1.5, 8),
    leg(0.0, 30),
    leg(-1.0, 4),
    leg(0.0, 20),
    leg(1.0, 6),
    leg(0.0, 42),
    leg(-2.0, 7),
    leg(0.0, 8),
    leg(2.5, 4),
    leg(0.0, 36),
    leg(-1.5, 4),
    leg(0.0, 24),
    leg(2.0, 5),
    leg(0.0, 60),
    leg(-2.0, 5),
    leg(0.0, 30),
    leg(1.0, 6),
    leg(0.0, 50),
    leg(-2.5, 4),
    leg(0.0, 10),
    leg(2.0, 7),
    leg(0.0, 80),
    leg(-2.0, 7),
    leg(1.5, 12),
    leg(0.0, 60),
    leg(-3.0, 6),
    leg(0.0, 15),
];

/// Leader series at 1 Hz with piecewise-constant acceleration, starting at
/// rest from `x0`.
pub fn leader_from_legs(legs: &[Leg], x0: f64) -> (Vec<f64>, VehicleSeries) {
    let mut t = vec![0.0];
    let mut s = VehicleSeries {
        pos: vec![x0],
        speed: vec![0.0],
        accel: Vec::new(),
        jerk: Vec::new(),
    };
    for l in legs {
        for _ in 0..l.secs {
            let (x, v) = (*s.pos.last().unwrap(), *s.speed.last().unwrap());
            let v_next = (v + l.accel).max(0.0);
            let a = v_next - v;
            s.accel.push(a);
            s.pos.push(x + v + 0.5 * a);
            s.speed.push(v_next);
            t.push(t.len() as f64);
        }
    }
    s.accel.push(0.0);
    (t, s)
}

/// Follower observations produced by `truth` behind the [`CYCLES`] leader,
/// cut into `pieces` consecutive segments. The follower starts at rest
/// `gap` ft behind.
pub fn synthetic_segments(truth: &ModelParams, gap: f64, pieces: usize) -> Result<Vec<FollowingSegment>> {
    let (t, leader) = leader_from_legs(&CYCLES, gap);
    let n = t.len();
    let placeholder = VehicleSeries {
        pos: vec![0.0; n],
        speed: vec![0.0; n],
        accel: vec![0.0; n],
        jerk: Vec::new(),
    };
    let whole = FollowingSegment::from_series("synthetic", t, leader, placeholder)?;
    let sim = simulate_follower(truth, &whole, &SimLimits::default(), 1.0)?;
    let follower = VehicleSeries {
        pos: sim.follower_pos,
        speed: sim.follower_speed,
        accel: sim.follower_accel,
        jerk: Vec::new(),
    };

    let len = n / pieces;
    (0..pieces)
        .map(|k| {
            let r = k * len..if k + 1 == pieces { n } else { (k + 1) * len };
            let cut = |s: &VehicleSeries| VehicleSeries {
                pos: s.pos[r.clone()].to_vec(),
                speed: s.speed[r.clone()].to_vec(),
                accel: s.accel[r.clone()].to_vec(),
                jerk: Vec::new(),
            };
            FollowingSegment::from_series(
                format!("syn-{k:02}"),
                whole.t[r.clone()].to_vec(),
                cut(&whole.leader),
                cut(&follower),
            )
        })
        .collect()
}

/// Samples in the cleaning fixture.
pub const CLEANING_TOTAL: usize = 6433;
/// Samples that survive the default rules.
pub const CLEANING_RETAINED: usize = 4427;

fn r3(x: f64) -> f64 {
    (x * 1000.0).round() / 1000.0
}

/// Splits `total` into `parts` random positive sizes, each at least `min`.
fn partition(rng: &mut ChaCha8Rng, total: usize, parts: usize, min: usize) -> Vec<usize> {
    let mut sizes = vec![min; parts];
    for _ in 0..total - parts * min {
        sizes[rng.gen_range(0..parts)] += 1;
    }
    sizes
}

/// A 1 Hz paired series in which alternating blocks of samples break one
/// default cleaning rule each. Every clean run is long enough to be kept, so
/// exactly [`CLEANING_RETAINED`] of [`CLEANING_TOTAL`] samples survive.
pub fn cleaning_paired() -> PairedSeries {
    const RUNS: usize = 60;
    let mut rng = ChaCha8Rng::seed_from_u64(6433);
    let rules = CleaningRules::default();
    let good = partition(&mut rng, CLEANING_RETAINED, RUNS, rules.min_segment_len);
    let bad = partition(&mut rng, CLEANING_TOTAL - CLEANING_RETAINED, RUNS, 1);

    let n = CLEANING_TOTAL;
    let mut speed_f = Vec::with_capacity(n);
    let mut accel_f = Vec::with_capacity(n);
    let mut accel_l = Vec::with_capacity(n);
    let mut spacing = Vec::with_capacity(n);
    for i in 0..n {
        let phase = i as f64 / 40.0;
        speed_f.push(r3(12.0 + 6.0 * phase.sin() + rng.gen_range(-0.5..0.5)));
        accel_f.push(r3(rng.gen_range(-3.0..3.0)));
        accel_l.push(r3(rng.gen_range(-3.0..3.0)));
        spacing.push(r3(60.0 + 40.0 * (phase / 3.0).cos() + rng.gen_range(-5.0..5.0)));
    }
    let mut i = 0;
    for (k, (&g, &b)) in good.iter().zip(&bad).enumerate() {
        i += g;
        for j in i..i + b {
            match k % 6 {
                0 => speed_f[j] = 0.0,
                1 => spacing[j] = r3(-rng.gen_range(1.0..20.0)),
                2 => accel_f[j] = r3(rng.gen_range(18.5..30.0)),
                3 => accel_l[j] = r3(-rng.gen_range(18.5..30.0)),
                4 => speed_f[j] = r3(rng.gen_range(22.5..30.0)),
                _ => spacing[j] = r3(rng.gen_range(660.0..900.0)),
            }
        }
        i += b;
    }

    let mut follower = VehicleSeries {
        pos: Vec::with_capacity(n),
        speed: speed_f,
        accel: accel_f,
        jerk: Vec::new(),
    };
    let mut x = 0.0;
    for v in &follower.speed {
        follower.pos.push(r3(x));
        x += v;
    }
    let leader = VehicleSeries {
        pos: follower.pos.iter().zip(&spacing).map(|(f, s)| r3(f + s)).collect(),
        speed: follower.speed.iter().map(|v| r3((v + 0.7).min(21.0))).collect(),
        accel: accel_l,
        jerk: Vec::new(),
    };
    let spacing = leader.pos.iter().zip(&follower.pos).map(|(l, f)| l - f).collect();
    PairedSeries {
        t0: 1_600_000_000.0,
        dt: 1.0,
        t: (0..n).map(|i| i as f64).collect(),
        leader,
        follower,
        spacing,
    }
}

/// Sample count of the jerk fixture.
pub const COMFORT_N: usize = 10_000;
/// Samples with |jerk| above 0.92, 4.03 and 4.82 ft/s³.
pub const COMFORT_ABOVE: [usize; 3] = [1600, 357, 224];

/// Jerk values, ft/s³, with exactly [`COMFORT_ABOVE`] samples beyond the
/// default comfort thresholds. Half the samples are negative.
pub fn comfort_jerk() -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(92);
    let bands = [
        (COMFORT_N - COMFORT_ABOVE[0], 0.0, 0.9),
        (COMFORT_ABOVE[0] - COMFORT_ABOVE[1], 0.95, 4.0),
        (COMFORT_ABOVE[1] - COMFORT_ABOVE[2], 4.05, 4.8),
        (COMFORT_ABOVE[2], 4.85, 12.0),
    ];
    let mut out = Vec::with_capacity(COMFORT_N);
    for (count, lo, hi) in bands {
        for _ in 0..count {
            let sign = if rng.gen_bool(0.5) { -1.0 } else { 1.0 };
            out.push(sign * r3(rng.gen_range(lo..hi)));
        }
    }
    out.shuffle(&mut rng);
    out
}

/// GPS logs of a leader driving the [`CYCLES`] schedule north along a
/// meridian and a follower driven by `truth`, starting at rest `gap` ft
/// behind. Both are sampled at 1 Hz from the same epoch.
pub fn gps_pair(truth: &ModelParams, gap: f64) -> Result<(Vec<GpsFix>, Vec<GpsFix>)> {
    let segs = synthetic_segments(truth, gap, 1)?;
    let seg = &segs[0];
    let deg_per_ft = 180.0 / (std::f64::consts::PI * EARTH_RADIUS_M * FT_PER_M);
    let to_fixes = |pos: &[f64]| -> Vec<GpsFix> {
        seg.t
            .iter()
            .zip(pos)
            .map(|(t, x)| GpsFix::new(1_600_000_000.0 + t, 28.37 + x * deg_per_ft, -81.25))
            .collect()
    };
    Ok((to_fixes(&seg.leader.pos), to_fixes(&seg.follower.pos)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cleaning::clean_segments;
    use crate::models::defaults;
    use crate::stats::{jerk_comfort_shares, ComfortThresholds};

    #[test]
    fn cleaning_fixture_counts() {
        let p = cleaning_paired();
        assert_eq!(p.t.len(), CLEANING_TOTAL);
        let segs = clean_segments(&p, &CleaningRules::default()).unwrap();
        let kept: usize = segs.iter().map(|s| s.len()).sum();
        assert_eq!(kept, CLEANING_RETAINED);
    }

    #[test]
    fn comfort_fixture_shares() {
        let s = jerk_comfort_shares(&comfort_jerk(), &ComfortThresholds::default()).unwrap();
        assert_eq!((s.excellent, s.upper_excellent, s.expected), (0.16, 0.0357, 0.0224));
    }

    #[test]
    fn synthetic_segments_cover_the_schedule() {
        let segs = synthetic_segments(&ModelParams::Idm(defaults::IDM), 10.0, 6).unwrap();
        assert_eq!(segs.len(), 6);
        assert_eq!(segs.iter().map(|s| s.len()).sum::<usize>(), 601);
        let vmax = segs.iter().flat_map(|s| s.leader.speed.iter().copied()).fold(0.0, f64::max);
        assert_eq!(vmax, 18.0);
    }

    #[test]
    fn gps_pair_round_trips_spacing() {
        let (l, f) = gps_pair(&ModelParams::Idm(defaults::IDM), 10.0).unwrap();
        let (lt, ft) = crate::ingest::derive_pair(&l, &f).unwrap();
        assert!((lt.frame_pos(0) - ft.frame_pos(0) - 10.0).abs() < 1e-6);
    }
}
