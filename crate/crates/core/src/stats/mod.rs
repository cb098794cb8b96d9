//! Exploratory statistics over trajectory series.
//!
//! Quartiles everywhere use inclusive linear interpolation between order
//! statistics (position `(n - 1) * p` in the sorted sample).

mod shapiro;
mod spearman;
pub mod summary;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
pub use shapiro::{shapiro_wilk, ShapiroWilk};
pub use spearman::{average_ranks, pearson, spearman};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DescriptiveStats {
    pub mean: f64,
    /// Sample standard deviation (n - 1).
    pub std: f64,
    pub min: f64,
    pub q25: f64,
    pub q50: f64,
    pub q75: f64,
    pub max: f64,
}

/// Jerk magnitudes above which ride comfort degrades, ft/s³.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComfortThresholds {
    pub excellent: f64,
    pub upper_excellent: f64,
    pub expected: f64,
}

impl Default for ComfortThresholds {
    fn default() -> Self {
        Self {
            excellent: 0.92,
            upper_excellent: 4.03,
            expected: 4.82,
        }
    }
}

impl ComfortThresholds {
    pub fn validate(&self) -> Result<()> {
        if !(self.excellent < self.upper_excellent && self.upper_excellent < self.expected) {
            return Err(Error::Config("comfort thresholds must be strictly increasing".into()));
        }
        Ok(())
    }
}

/// Shares of samples whose |jerk| exceeds each comfort threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComfortShares {
    pub excellent: f64,
    pub upper_excellent: f64,
    pub expected: f64,
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample standard deviation; zero for fewer than two values.
pub fn sample_std(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    let ss: f64 = xs.iter().map(|x| (x - m).powi(2)).sum();
    (ss / (xs.len() - 1) as f64).sqrt()
}

fn sorted(xs: &[f64]) -> Vec<f64> {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// Inclusive linear-interpolation quantile of an already sorted sample.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

fn require_finite(xs: &[f64]) -> Result<()> {
    match xs.iter().position(|x| !x.is_finite()) {
        Some(i) => Err(Error::domain(format!("non-finite value at index {i}"))),
        None => Ok(()),
    }
}

pub fn describe(series: &[f64]) -> Result<DescriptiveStats> {
    if series.len() < 2 {
        return Err(Error::InsufficientData {
            required: 2,
            available: series.len(),
        });
    }
    require_finite(series)?;
    let s = sorted(series);
    Ok(DescriptiveStats {
        mean: mean(series),
        std: sample_std(series),
        min: s[0],
        q25: quantile_sorted(&s, 0.25),
        q50: quantile_sorted(&s, 0.5),
        q75: quantile_sorted(&s, 0.75),
        max: s[s.len() - 1],
    })
}

pub fn coefficient_of_variation(series: &[f64]) -> Result<f64> {
    if series.is_empty() {
        return Err(Error::InsufficientData {
            required: 1,
            available: 0,
        });
    }
    require_finite(series)?;
    let m = mean(series);
    if m == 0.0 {
        return Err(Error::UndefinedCv);
    }
    Ok(sample_std(series) / m.abs())
}

/// Fraction of points strictly outside the Tukey fences `Q1 - 1.5 IQR`, `Q3 + 1.5 IQR`.
pub fn iqr_outlier_share(series: &[f64]) -> Result<f64> {
    if series.len() < 4 {
        return Err(Error::InsufficientData {
            required: 4,
            available: series.len(),
        });
    }
    require_finite(series)?;
    let s = sorted(series);
    let q1 = quantile_sorted(&s, 0.25);
    let q3 = quantile_sorted(&s, 0.75);
    let iqr = q3 - q1;
    let (lo, hi) = (q1 - 1.5 * iqr, q3 + 1.5 * iqr);
    let outside = s.iter().filter(|&&x| x < lo || x > hi).count();
    Ok(outside as f64 / s.len() as f64)
}

pub fn jerk_comfort_shares(jerk: &[f64], th: &ComfortThresholds) -> Result<ComfortShares> {
    if jerk.is_empty() {
        return Err(Error::InsufficientData {
            required: 1,
            available: 0,
        });
    }
    th.validate()?;
    let n = jerk.len() as f64;
    let share = |limit: f64| jerk.iter().filter(|j| j.abs() > limit).count() as f64 / n;
    Ok(ComfortShares {
        excellent: share(th.excellent),
        upper_excellent: share(th.upper_excellent),
        expected: share(th.expected),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn describe_constant() {
        let d = describe(&[2.0, 2.0, 2.0]).unwrap();
        assert_eq!(d.mean, 2.0);
        assert_eq!(d.std, 0.0);
        assert_eq!((d.min, d.q25, d.q50, d.q75, d.max), (2.0, 2.0, 2.0, 2.0, 2.0));
    }

    #[test]
    fn describe_median_and_std() {
        assert_eq!(describe(&[1.0, 2.0, 3.0, 4.0]).unwrap().q50, 2.5);
        // mean 115/6; sum of squared deviations 7850.8333; / 5 -> 1570.1667
        let d = describe(&[1.0, 2.0, 3.0, 4.0, 5.0, 100.0]).unwrap();
        assert!((d.std - 1570.1666666666667f64.sqrt()).abs() < 1e-9);
        assert!((d.std - 39.6253).abs() < 1e-4);
        assert!(matches!(describe(&[1.0]), Err(Error::InsufficientData { .. })));
    }

    #[test]
    fn cv_cases() {
        assert_eq!(coefficient_of_variation(&[5.0, 5.0, 5.0]).unwrap(), 0.0);
        let cv = coefficient_of_variation(&[2.0, 4.0]).unwrap();
        assert!((cv - 2f64.sqrt() / 3.0).abs() < 1e-12);
        assert!((cv - 0.4714).abs() < 1e-4);
        assert!(matches!(coefficient_of_variation(&[-1.0, 1.0]), Err(Error::UndefinedCv)));
    }

    #[test]
    fn iqr_cases() {
        let grid: Vec<f64> = (1..=20).map(f64::from).collect();
        assert_eq!(iqr_outlier_share(&grid).unwrap(), 0.0);
        let mut spiked: Vec<f64> = (1..=9).map(f64::from).collect();
        spiked.push(1000.0);
        assert_eq!(iqr_outlier_share(&spiked).unwrap(), 0.1);
        assert_eq!(iqr_outlier_share(&[3.0; 12]).unwrap(), 0.0);
        assert!(iqr_outlier_share(&[1.0, 2.0, 3.0]).is_err());
    }

    #[test]
    fn comfort_cases() {
        let th = ComfortThresholds::default();
        let s = jerk_comfort_shares(&[0.5, 1.0, 4.1, 5.0], &th).unwrap();
        assert_eq!((s.excellent, s.upper_excellent, s.expected), (0.75, 0.5, 0.25));
        let s = jerk_comfort_shares(&[0.0; 7], &th).unwrap();
        assert_eq!((s.excellent, s.upper_excellent, s.expected), (0.0, 0.0, 0.0));
        // Braking jerk counts the same as accelerating jerk.
        let s = jerk_comfort_shares(&[-5.0, 5.0], &th).unwrap();
        assert_eq!(s.expected, 1.0);
        let bad = ComfortThresholds { excellent: 5.0, ..th };
        assert!(jerk_comfort_shares(&[1.0], &bad).is_err());
    }

    /// Brute-force outlier count with quartiles from explicit order statistics.
    fn brute_outlier_share(xs: &[f64]) -> f64 {
        let mut s = xs.to_vec();
        s.sort_by(f64::total_cmp);
        let q = |p: f64| {
            let h = (s.len() - 1) as f64 * p;
            let (lo, frac) = (h as usize, h.fract());
            if frac == 0.0 { s[lo] } else { s[lo] * (1.0 - frac) + s[lo + 1] * frac }
        };
        let (q1, q3) = (q(0.25), q(0.75));
        let iqr = q3 - q1;
        xs.iter().filter(|&&x| x < q1 - 1.5 * iqr || x > q3 + 1.5 * iqr).count() as f64 / xs.len() as f64
    }

    proptest! {
        #[test]
        fn describe_is_order_invariant(mut xs in prop::collection::vec(-1e3f64..1e3, 2..40), seed in any::<u64>()) {
            let a = describe(&xs).unwrap();
            use rand::{seq::SliceRandom, SeedableRng};
            xs.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
            let b = describe(&xs).unwrap();
            prop_assert!((a.mean - b.mean).abs() <= 1e-9);
            prop_assert!((a.std - b.std).abs() <= 1e-9);
            prop_assert_eq!((a.min, a.q25, a.q50, a.q75, a.max), (b.min, b.q25, b.q50, b.q75, b.max));
            prop_assert!(a.min <= a.q25 && a.q25 <= a.q50 && a.q50 <= a.q75 && a.q75 <= a.max);
        }

        #[test]
        fn outlier_share_at_most_half(xs in prop::collection::btree_set(-1000i32..1000, 8..30)) {
            let xs: Vec<f64> = xs.into_iter().map(f64::from).collect();
            let share = iqr_outlier_share(&xs).unwrap();
            prop_assert!(share <= 0.5);
            prop_assert!((share - brute_outlier_share(&xs)).abs() < 1e-12);
        }

        #[test]
        fn comfort_shares_scale_together(jerk in prop::collection::vec(-20f64..20.0, 1..50)) {
            let th = ComfortThresholds::default();
            let scaled_th = ComfortThresholds {
                excellent: th.excellent * 2.0,
                upper_excellent: th.upper_excellent * 2.0,
                expected: th.expected * 2.0,
            };
            let doubled: Vec<f64> = jerk.iter().map(|j| j * 2.0).collect();
            let a = jerk_comfort_shares(&jerk, &th).unwrap();
            let b = jerk_comfort_shares(&doubled, &scaled_th).unwrap();
            prop_assert_eq!(a, b);
            prop_assert!(a.excellent >= a.upper_excellent && a.upper_excellent >= a.expected);
        }
    }
}
