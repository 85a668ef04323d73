//! E6: box-counting dimension of the Julia set of the cubic at `alpha`,
//! read off the boundary cells of the filled Julia set.

use dynlab_core::maps::PolynomialMap;
use dynlab_core::measure::{box_dimension, filled_julia_grid, BoxDimension, GridField, Tag};

use super::{bbox, new_report};
use crate::config::{Config, DimensionParams};
use crate::constants::SEGMENT_DIMENSION_TOL;
use crate::error::LabError;
use crate::report::{num, opt, Check, Report};

const COLUMNS: &[&str] = &["subject", "resolution", "scales", "counts", "estimate", "fit_rms", "tolerance", "status"];

fn join<T: ToString>(v: impl IntoIterator<Item = T>) -> String {
    v.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(";")
}

pub(super) fn run(config: &Config, p: &DimensionParams, hash: String) -> Result<Report, LabError> {
    let map = PolynomialMap::cubic_siegel(p.alpha.to_f64());
    let b = bbox(&p.bbox);
    let res0 = p.resolutions[0];
    let mut report = new_report(config, hash, COLUMNS);
    let julia_tol = format!("estimate<{};drift<{}", p.dimension_max, p.drift_max);
    let segment_tol = format!("|estimate-1|<={SEGMENT_DIMENSION_TOL}");
    let row = |report: &mut Report, subject: &str, res: usize, scales: &[usize], r: &dynlab_core::Result<BoxDimension>| {
        let mut v = vec![subject.to_string(), res.to_string(), join(scales.iter())];
        let tol = if subject == "julia" { julia_tol.clone() } else { segment_tol.clone() };
        match r {
            Ok(d) => v.extend([join(d.counts.iter().map(|c| c.1)), num(d.estimate), num(d.fit_rms), tol, "ok".into()]),
            Err(e) => v.extend([String::new(), String::new(), String::new(), tol, format!("error: {e}")]),
        }
        report.push_row(v);
    };

    let mut estimates = Vec::new();
    let mut top_field = None;
    for &res in &p.resolutions {
        let scales: Vec<usize> = p.box_sizes.iter().map(|s| s * res / res0).collect();
        let field = filled_julia_grid(&map, b, res, res, p.horizon, p.r_escape);
        let est = field.as_ref().map_err(Clone::clone).and_then(|f| box_dimension(f, &scales));
        row(&mut report, "julia", res, &scales, &est);
        estimates.push(est.ok().map(|d| d.estimate));
        top_field = field.ok();
    }

    // Control: a half-plane, whose boundary is a segment.
    let mid = 0.5 * (b.min[1] + b.max[1]);
    let half = GridField::from_fn(b, res0, res0, |z| if z.im < mid { Tag::In } else { Tag::Out });
    let seg = box_dimension(&half, &p.box_sizes);
    row(&mut report, "segment_control", res0, &p.box_sizes, &seg);
    let seg_err = seg.ok().map(|d| (d.estimate - 1.0).abs());

    if let Some(f) = top_field {
        report.add_field(format!("filled_julia_{}", p.resolutions[p.resolutions.len() - 1]), f);
    }
    let n = estimates.len();
    let top = estimates[n - 1];
    let drift = match (estimates[n - 2], top) {
        (Some(a), Some(b)) => Some((b - a).abs()),
        _ => None,
    };
    report.checks.push(Check::below("top_estimate", top, p.dimension_max));
    report.checks.push(Check::below("drift_top_two", drift, p.drift_max));
    report.checks.push(Check::at_most("segment_control_error", seg_err, SEGMENT_DIMENSION_TOL));
    report.notes.push(format!("estimates by resolution: {}", join(estimates.iter().map(|e| opt(*e)))));
    Ok(report)
}
