//! E3: density profiles of `K(delta)` at points of the Siegel disk boundary
//! of the golden-mean cubic.

use dynlab_core::maps::{PolynomialMap, C64};
use dynlab_core::measure::{density_profile, k_delta_window, Bbox};
use dynlab_core::siegel::{linearize, rdisk_boundary};

use super::new_report;
use crate::config::{Config, DeepPointParams};
use crate::error::LabError;
use crate::report::{num, Check, Report};

const COLUMNS: &[&str] = &["point", "kind", "re", "im", "polyline_gap", "radius", "density", "tolerance", "status"];
/// Window half-width relative to the largest radius.
const WINDOW_PAD: f64 = 1.01;

enum Kind {
    Boundary,
    Interior,
    Exterior,
}

impl Kind {
    fn label(&self) -> &'static str {
        match self {
            Kind::Boundary => "boundary",
            Kind::Interior => "interior_control",
            Kind::Exterior => "exterior_control",
        }
    }
}

pub(super) fn run(config: &Config, p: &DeepPointParams, hash: String) -> Result<Report, LabError> {
    let f = PolynomialMap::cubic_siegel(p.alpha.to_f64());
    let series = linearize(&f, p.order)?;
    let poly = rdisk_boundary(&series, p.polyline_r, p.polyline_points)?;
    let crit = f
        .critical_points()?
        .into_iter()
        .find(|(_, v)| v.norm() > 0.0)
        .map(|(c, _)| c)
        .ok_or_else(|| LabError::Config("no critical point with nonzero value".into()))?;

    let mut points: Vec<(Kind, C64)> = Vec::new();
    let mut z = crit;
    for _ in 0..p.boundary_points {
        points.push((Kind::Boundary, z));
        z = f.eval(z);
    }
    points.push((Kind::Interior, C64::new(0.0, 0.0)));
    let far = poly.iter().copied().max_by(|a, b| a.norm().total_cmp(&b.norm())).expect("nonempty");
    points.push((Kind::Exterior, far * ((far.norm() + p.delta + 3.0 * p.r0) / far.norm())));

    let domain = Bbox::around(&poly, 1.5 * p.delta);
    let radii: Vec<f64> = (0..p.radii).map(|k| p.r0 / f64::powi(2.0, k as i32)).collect();
    let gap = |z: C64| poly.iter().map(|q| (q - z).norm()).fold(f64::INFINITY, f64::min);

    let mut report = new_report(config, hash, COLUMNS);
    let tol = format!("drop<={};final>={}", p.noise, p.final_min);
    let (mut max_drop, mut final_min) = (Some(0.0f64), Some(f64::INFINITY));
    let (mut interior, mut exterior) = (None, None);
    for (idx, (kind, z)) in points.iter().enumerate() {
        let window = Bbox::square(*z, p.r0 * WINDOW_PAD);
        let profile = k_delta_window(
            &f,
            p.delta,
            &poly,
            domain,
            p.domain_resolution,
            window,
            p.window_resolution,
            p.window_resolution,
            p.horizon,
        )
        .and_then(|k| density_profile(*z, &k, &radii));
        let head = |r: String| vec![idx.to_string(), kind.label().to_string(), num(z.re), num(z.im), num(gap(*z)), r];
        match &profile {
            Ok(v) => {
                for (r, d) in radii.iter().zip(v) {
                    let mut row = head(num(*r));
                    row.extend([num(*d), tol.clone(), "ok".into()]);
                    report.push_row(row);
                }
            }
            Err(e) => {
                let mut row = head(String::new());
                row.extend([String::new(), tol.clone(), format!("error: {e}")]);
                report.push_row(row);
            }
        }
        let last = profile.as_ref().ok().and_then(|v| v.last().copied());
        match kind {
            Kind::Boundary => match &profile {
                Ok(v) => {
                    let drop = v.windows(2).map(|w| w[0] - w[1]).fold(0.0, f64::max);
                    max_drop = max_drop.map(|m| m.max(drop));
                    final_min = final_min.map(|m| m.min(*v.last().expect("radii >= 2")));
                }
                Err(_) => {
                    max_drop = None;
                    final_min = None;
                }
            },
            Kind::Interior => interior = last,
            Kind::Exterior => exterior = last,
        }
    }

    report.checks.push(Check::at_most("profile_max_drop", max_drop, p.noise));
    report.checks.push(Check::at_least("final_density_min", final_min, p.final_min));
    report.checks.push(Check::at_least("interior_control", interior, 1.0));
    report.checks.push(Check::at_most("exterior_control", exterior, 0.0));
    report.notes.push(format!(
        "boundary points are f^k(c) for the critical point c = {crit}; the disk boundary is stood in for by the r = {} polyline",
        p.polyline_r
    ));
    Ok(report)
}
