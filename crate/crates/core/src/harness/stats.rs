use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::rng::seeded;

pub const BOOTSTRAP_RESAMPLES: usize = 1000;
/// Largest failure fraction at which a datapoint is still reported.
pub const MAX_FAIL_FRACTION: f64 = 0.05;

/// What one trial contributed to the rate estimate.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: u64,
    pub succeeded: bool,
    pub ghz: u64,
    pub slots: u64,
}

/// Aggregated rate estimate for one datapoint.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErStats {
    /// GHZ states per timeslot: total states over total slots.
    pub er: f64,
    pub ci95_low: f64,
    pub ci95_high: f64,
    pub fail_fraction: f64,
    pub valid: bool,
    pub trials: u64,
    pub successes: u64,
    pub failures: u64,
    pub mean_ghz_per_success: f64,
    pub mean_timeslots: f64,
}

fn ratio(ghz: u64, slots: u64) -> f64 {
    if slots == 0 {
        0.0
    } else {
        ghz as f64 / slots as f64
    }
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

impl ErStats {
    /// Aggregates trial records. The records are put in trial order first,
    /// so the result does not depend on completion order. The percentile
    /// bootstrap resamples `(ghz, slots)` pairs with a stream keyed by
    /// `boot_seed`.
    pub fn from_trials(records: &[TrialRecord], boot_seed: u64) -> ErStats {
        let mut recs = records.to_vec();
        recs.sort_by_key(|r| r.trial);
        let n = recs.len() as u64;
        let ghz: u64 = recs.iter().map(|r| r.ghz).sum();
        let slots: u64 = recs.iter().map(|r| r.slots).sum();
        let successes = recs.iter().filter(|r| r.succeeded).count() as u64;
        let failures = n - successes;
        let er = ratio(ghz, slots);
        let fail_fraction = if n == 0 {
            0.0
        } else {
            failures as f64 / n as f64
        };

        let (mut lo, mut hi) = (er, er);
        if recs.len() > 1 {
            let mut rng = seeded(boot_seed);
            let mut samples = Vec::with_capacity(BOOTSTRAP_RESAMPLES);
            for _ in 0..BOOTSTRAP_RESAMPLES {
                let (mut g, mut s) = (0u64, 0u64);
                for _ in 0..recs.len() {
                    let r = &recs[rng.gen_range(0..recs.len())];
                    g += r.ghz;
                    s += r.slots;
                }
                samples.push(ratio(g, s));
            }
            samples.sort_by(f64::total_cmp);
            lo = quantile(&samples, 0.025).min(er);
            hi = quantile(&samples, 0.975).max(er);
        }

        ErStats {
            er,
            ci95_low: lo,
            ci95_high: hi,
            fail_fraction,
            valid: fail_fraction <= MAX_FAIL_FRACTION,
            trials: n,
            successes,
            failures,
            mean_ghz_per_success: if successes == 0 {
                0.0
            } else {
                ghz as f64 / successes as f64
            },
            mean_timeslots: if n == 0 { 0.0 } else { slots as f64 / n as f64 },
        }
    }

    /// Half-width of the confidence interval.
    pub fn ci_half_width(&self) -> f64 {
        (self.ci95_high - self.ci95_low) / 2.0
    }

    /// True when the intervals of `self` and `other` intersect.
    pub fn overlaps(&self, other: &ErStats) -> bool {
        self.ci95_low <= other.ci95_high && other.ci95_low <= self.ci95_high
    }
}
