//! Thresholds in force for every experiment. Config defaults read from here
//! and every report row quotes the values it was judged against.

pub use dynlab_core::fatou::{
    ABEL_MEDIAN_TOL, ABEL_P95_TOL, CRITICAL_VALUE_TOL, MULTIPLIER_TOL, NORMALIZATION_TOL, SECTOR_PASS_FRACTION,
};

/// Minimal restricted-disk density over the last `DENSITY_LAST_N` members.
pub const DENSITY_MIN: f64 = 0.45;
pub const DENSITY_LAST_N: usize = 3;
/// Largest density change allowed when the horizon is doubled.
pub const DOUBLING_TOL: f64 = 0.01;
/// Density of the unperturbed control (`alpha_n = alpha`).
pub const BASELINE_DENSITY_MIN: f64 = 0.99;
/// Slack on `(log A_n)^(1/q_n) <= 1` over the computed range.
pub const SCHEDULE_RULE_TOL: f64 = 0.1;

/// `1 - epsilon` for area persistence, required from `AREA_N0` on.
pub const AREA_RATIO_MIN: f64 = 0.8;
pub const AREA_N0: usize = 3;

pub const DEEP_FINAL_MIN: f64 = 0.95;
/// Allowed dip between consecutive radii of a density profile.
pub const DEEP_NOISE: f64 = 0.02;

pub const DIMENSION_MAX: f64 = 1.98;
pub const DIMENSION_DRIFT: f64 = 0.1;
pub const SEGMENT_DIMENSION_TOL: f64 = 0.05;

pub const QUADRATIC_LIKE_SAMPLES: usize = 200;

/// `(name, value)` pairs, in the order they are written to metadata.
pub fn table() -> Vec<(&'static str, f64)> {
    vec![
        ("density_min", DENSITY_MIN),
        ("density_last_n", DENSITY_LAST_N as f64),
        ("doubling_tol", DOUBLING_TOL),
        ("baseline_density_min", BASELINE_DENSITY_MIN),
        ("schedule_rule_tol", SCHEDULE_RULE_TOL),
        ("area_ratio_min", AREA_RATIO_MIN),
        ("area_n0", AREA_N0 as f64),
        ("deep_final_min", DEEP_FINAL_MIN),
        ("deep_noise", DEEP_NOISE),
        ("dimension_max", DIMENSION_MAX),
        ("dimension_drift", DIMENSION_DRIFT),
        ("segment_dimension_tol", SEGMENT_DIMENSION_TOL),
        ("quadratic_like_samples", QUADRATIC_LIKE_SAMPLES as f64),
        ("abel_median_tol", ABEL_MEDIAN_TOL),
        ("abel_p95_tol", ABEL_P95_TOL),
        ("normalization_tol", NORMALIZATION_TOL),
        ("multiplier_tol", MULTIPLIER_TOL),
        ("critical_value_tol", CRITICAL_VALUE_TOL),
        ("sector_pass_fraction", SECTOR_PASS_FRACTION),
    ]
}
