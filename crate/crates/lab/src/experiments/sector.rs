//! E5: perturbed Fatou chart of `Q_alpha`, its return map and the sector
//! check against the Siegel disk.

use std::f64::consts::PI;

use dynlab_core::fatou::{build_chart, sector_siegel_check, FatouChart};
use dynlab_core::maps::{PolynomialMap, C64, IS_CRITICAL_VALUE};
use dynlab_core::siegel::{linearize, rdisk_boundary};

use super::new_report;
use crate::config::{Config, SectorParams};
use crate::constants::{
    ABEL_MEDIAN_TOL, ABEL_P95_TOL, CRITICAL_VALUE_TOL, MULTIPLIER_TOL, NORMALIZATION_TOL, SECTOR_PASS_FRACTION,
};
use crate::error::LabError;
use crate::report::{num, opt, Check, Report};

const COLUMNS: &[&str] = &["quantity", "index", "value", "reference", "tolerance", "status"];

pub(super) fn run(config: &Config, p: &SectorParams, hash: String) -> Result<Report, LabError> {
    let alpha = p.alpha.to_f64();
    let map = PolynomialMap::quad_is(alpha);
    let mut report = new_report(config, hash, COLUMNS);
    let chart = build_chart(&map, p.alpha_star, p.validation);
    let chart = match chart {
        Ok(c) => c,
        Err(e) => {
            report.push_row(vec!["chart".into(), String::new(), String::new(), String::new(), String::new(), format!("error: {e}")]);
            push_checks(&mut report, [None; 5]);
            return Ok(report);
        }
    };
    let stats = chart.stats();
    let mut row = |q: &str, i: String, v: Option<f64>, reference: String, tol: String, status: String| {
        report.push_row(vec![q.into(), i, opt(v), reference, tol, status]);
    };
    row("alpha", String::new(), Some(alpha), String::new(), format!("< {}", p.alpha_star), "ok".into());
    row("abel_median", String::new(), stats.map(|s| s.abel_median), String::new(), format!("< {ABEL_MEDIAN_TOL}"), "ok".into());
    row("abel_p95", String::new(), stats.map(|s| s.abel_p95), String::new(), format!("< {ABEL_P95_TOL}"), "ok".into());
    row("strip_constant", String::new(), stats.map(|s| s.strip_constant as f64), String::new(), String::new(), "ok".into());
    let norm = chart.phi(chart.critical_point()).map(|z| z.norm());
    row("normalization", String::new(), norm.as_ref().ok().copied(), "0".into(), format!("< {NORMALIZATION_TOL}"), status(&norm));

    let want = (1.0 / alpha).fract();
    let mut mult_err = Some(0.0f64);
    for k in 0..p.multiplier_directions {
        let z = C64::from_polar(p.multiplier_radius, 2.0 * PI * k as f64 / p.multiplier_directions as f64 + 0.3);
        let turn = chart.renorm_return(z, p.k1_max).map(|(r, _)| ((r / z).arg() / (2.0 * PI)).rem_euclid(1.0));
        let rel = turn.as_ref().ok().map(|t| (t - want).abs() / want);
        mult_err = match (mult_err, rel) {
            (Some(m), Some(r)) => Some(m.max(r)),
            _ => None,
        };
        row("multiplier_turn", k.to_string(), turn.as_ref().ok().copied(), num(want), format!("rel < {MULTIPLIER_TOL}"), status(&turn));
    }

    let sector = sector_check(&map, &chart, p);
    let frac = sector.as_ref().ok().map(|r| r.pass_fraction);
    let st = status(&sector);
    if let Ok(r) = &sector {
        row("sector_samples", String::new(), Some(r.samples as f64), String::new(), String::new(), "ok".into());
        row("complement_pass_fraction", String::new(), Some(r.complement_passed as f64 / r.complement_samples.max(1) as f64), String::new(), String::new(), "ok".into());
        row("k1_min", String::new(), Some(r.k1_range.0 as f64), String::new(), String::new(), "ok".into());
        row("k1_max", String::new(), Some(r.k1_range.1 as f64), String::new(), String::new(), "ok".into());
    }
    row("sector_pass_fraction", String::new(), frac, String::new(), format!(">= {SECTOR_PASS_FRACTION}"), st);
    let cv = chart.critical_value_image().map(|v| (v - C64::new(IS_CRITICAL_VALUE, 0.0)).norm());
    row("critical_value_error", String::new(), cv.as_ref().ok().copied(), num(IS_CRITICAL_VALUE), format!("< {CRITICAL_VALUE_TOL}"), status(&cv));

    push_checks(&mut report, [stats.map(|s| s.abel_median), norm.ok(), mult_err, frac, cv.ok()]);
    report.notes.push(format!("abel_p95 is informative (tolerance {ABEL_P95_TOL})"));
    Ok(report)
}

fn push_checks(report: &mut Report, [abel, norm, mult, frac, cv]: [Option<f64>; 5]) {
    report.checks.push(Check::below("abel_median", abel, ABEL_MEDIAN_TOL));
    report.checks.push(Check::below("normalization", norm, NORMALIZATION_TOL));
    report.checks.push(Check::below("multiplier_max_rel_error", mult, MULTIPLIER_TOL));
    report.checks.push(Check::at_least("sector_pass_fraction", frac, SECTOR_PASS_FRACTION));
    report.checks.push(Check::below("critical_value_error", cv, CRITICAL_VALUE_TOL));
}

fn sector_check(
    map: &PolynomialMap,
    chart: &FatouChart,
    p: &SectorParams,
) -> dynlab_core::Result<dynlab_core::fatou::SectorCheckReport> {
    let series = linearize(map, p.order)?;
    let poly = rdisk_boundary(&series, p.r, p.polyline_points)?;
    sector_siegel_check(chart, &poly, p.samples, p.horizon, p.im_top)
}

fn status<T, E: std::fmt::Display>(r: &Result<T, E>) -> String {
    match r {
        Ok(_) => "ok".into(),
        Err(e) => format!("error: {e}"),
    }
}
