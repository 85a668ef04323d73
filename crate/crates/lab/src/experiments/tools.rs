//! Single-purpose utilities: continued-fraction tables, linearization
//! diagnostics and filled-Julia-set area.

use dynlab_core::cfrac::{approximants, brjuno_sum, rational_to_f64};
use dynlab_core::measure::{area, filled_julia_grid};
use dynlab_core::siegel::{functional_residual, linearize};
use num_bigint::BigInt;
use num_traits::Signed;

use super::{bbox, new_report};
use crate::config::{AreaParams, CfParams, Config, SiegelParams};
use crate::error::LabError;
use crate::report::{num, opt, Check, Report};

/// Convergents beyond the last reported one used as the reference value.
const REFERENCE_EXTRA: usize = 60;
const SIEGEL_RESIDUAL_MAX: f64 = 1e-8;
const SIEGEL_DRIFT_MAX: f64 = 0.1;

pub(super) fn run_cf(config: &Config, p: &CfParams, hash: String) -> Result<Report, LabError> {
    let mut report = new_report(config, hash, &["n", "a_n", "p_n", "q_n", "abs_error", "q2_error", "brjuno_partial", "tolerance"]);
    let reference = p
        .digits
        .convergents()
        .take(p.terms + REFERENCE_EXTRA + 1)
        .last()
        .expect("nonempty")
        .to_rational();
    let mut worst: f64 = 0.0;
    for c in approximants(&p.digits, p.terms) {
        let err = (reference.clone() - c.to_rational()).abs();
        let q = BigInt::from(c.q.clone());
        let scaled = err.clone() * (&q * &q);
        let scaled = rational_to_f64(&scaled);
        worst = worst.max(scaled);
        report.push_row(vec![
            c.index.to_string(),
            p.digits.digit(c.index).map(|d| d.to_string()).unwrap_or_default(),
            c.p.to_string(),
            c.q.to_string(),
            num(rational_to_f64(&err)),
            num(scaled),
            num(brjuno_sum(&p.digits, c.index)),
            "q2_error<1".into(),
        ]);
    }
    report.checks.push(Check::below("q2_error_max", Some(worst), 1.0));
    Ok(report)
}

pub(super) fn run_siegel(config: &Config, p: &SiegelParams, hash: String) -> Result<Report, LabError> {
    let map = p.map.build()?;
    let mut report = new_report(
        config,
        hash,
        &["order", "radius", "regression_residual", "stable", "rho", "functional_residual", "tolerance"],
    );
    let mut radii = Vec::new();
    let mut first_residual = None;
    for &order in &p.orders {
        let series = linearize(&map, order)?;
        let est = series.radius_estimate();
        let radius = est.filter(|e| !e.unbounded).map(|e| e.radius);
        let rho = radius.map(|r| p.residual_fraction * r);
        let resid = rho.map(|rho| functional_residual(&map, &series, rho, p.residual_samples));
        if first_residual.is_none() {
            first_residual = Some(resid);
        }
        radii.push(radius);
        report.push_row(vec![
            order.to_string(),
            opt(radius),
            opt(est.map(|e| e.residual)),
            est.map(|e| e.stable.to_string()).unwrap_or_default(),
            opt(rho),
            opt(resid),
            format!("residual<{SIEGEL_RESIDUAL_MAX};drift<{SIEGEL_DRIFT_MAX}"),
        ]);
    }
    report.checks.push(Check::below(
        &format!("functional_residual_k{}", p.orders[0]),
        first_residual.flatten(),
        SIEGEL_RESIDUAL_MAX,
    ));
    if p.orders.len() >= 2 {
        let drift = match (radii[0], radii[radii.len() - 1]) {
            (Some(a), Some(b)) => Some((b - a).abs() / a),
            _ => None,
        };
        report.checks.push(Check::below(
            &format!("radius_drift_k{}_k{}", p.orders[0], p.orders[p.orders.len() - 1]),
            drift,
            SIEGEL_DRIFT_MAX,
        ));
    }
    Ok(report)
}

pub(super) fn run_area(config: &Config, p: &AreaParams, hash: String) -> Result<Report, LabError> {
    let map = p.map.build()?;
    let field = filled_julia_grid(&map, bbox(&p.bbox), p.resolution, p.resolution, p.horizon, p.r_escape)?;
    let a = area(&field);
    let boundary = field.boundary_cells().len();
    let mut report = new_report(
        config,
        hash,
        &["resolution", "horizon", "r_escape", "area", "boundary_cells", "boundary_area", "tolerance"],
    );
    report.push_row(vec![
        p.resolution.to_string(),
        p.horizon.to_string(),
        num(p.r_escape),
        num(a.value),
        boundary.to_string(),
        num(boundary as f64 * field.cell_area()),
        "area>0".into(),
    ]);
    report.checks.push(Check::above("area_positive", Some(a.value), 0.0));
    report.add_field("filled_julia", field);
    Ok(report)
}
