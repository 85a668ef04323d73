//! E1 / E1b: density of the restricted Siegel disk of `alpha_n` inside the
//! r-disk of the unperturbed map.

use dynlab_core::cfrac::is_high_type;
use dynlab_core::maps::{PolynomialMap, C64};
use dynlab_core::measure::{dens, polygon_field, Bbox, GridField, Tag};
use dynlab_core::siegel::{confinement_steps, linearize, rdisk_boundary, restricted_from_steps};
use rayon::prelude::*;

use super::{bbox, brjuno_converged, new_report, require, schedule, Member};
use crate::config::{Config, DensityParams, ExperimentId};
use crate::constants::{BASELINE_DENSITY_MIN, SCHEDULE_RULE_TOL};
use crate::error::LabError;
use crate::report::{num, Check, Report};

const COLUMNS: &[&str] = &[
    "n",
    "q_n",
    "a_n",
    "a_n_log2",
    "alpha_n",
    "log_root",
    "root",
    "r",
    "scope",
    "horizon",
    "dens",
    "horizon_doubled",
    "dens_doubled",
    "doubling_change",
    "excluded_cells",
    "tolerance",
    "status",
];

struct Measured {
    dens: f64,
    dens_doubled: Option<f64>,
    excluded: usize,
}

struct PerR {
    disk: Result<Measured, String>,
    windows: Vec<Result<Measured, String>>,
    field: Option<GridField>,
}

fn family(cubic: bool) -> fn(f64) -> PolynomialMap {
    if cubic {
        PolynomialMap::cubic_siegel
    } else {
        PolynomialMap::quad_bc
    }
}

pub(super) fn run(config: &Config, p: &DensityParams, hash: String) -> Result<Report, LabError> {
    let cubic = config.experiment == ExperimentId::E1b;
    let mk = family(cubic);
    for (name, x) in [("alpha", &p.alpha), ("tail", &p.tail)] {
        let (sum, ok) = brjuno_converged(x.digits());
        require(ok, format!("{name} = {x} is not a Brjuno number at desk precision (partial sum {sum})"))?;
        if let Some(n) = p.high_type {
            require(is_high_type(x.digits(), n), format!("{name} = {x} is not of high type {n}"))?;
        }
    }
    let members = schedule(&p.alpha, &p.tail, p.n_min..=p.n_max, &p.rule)?;
    if let Some(n) = p.high_type {
        for m in &members {
            require(m.a_n >= n.into(), format!("A_{} = {} is below the high type {n}", m.n, m.a_n))?;
        }
    }

    let base = mk(p.alpha.to_f64());
    let series = linearize(&base, p.order)?;
    let polys = p
        .r_values
        .iter()
        .map(|&r| rdisk_boundary(&series, r, p.polyline_points))
        .collect::<Result<Vec<_>, _>>()?;
    let r_max = p.r_values.iter().cloned().fold(0.0, f64::max);
    let outer = &polys[p.r_values.iter().position(|&r| r == r_max).expect("nonempty")];
    let frame = Bbox::around(outer, p.margin);
    let half = 0.5 * frame.width().max(frame.height());
    let center = C64::new(0.5 * (frame.min[0] + frame.max[0]), 0.5 * (frame.min[1] + frame.max[1]));
    let grid = Bbox::square(center, half);
    let disks: Vec<GridField> = polys.iter().map(|poly| polygon_field(poly, grid, p.resolution, p.resolution)).collect();
    let windows: Vec<Vec<Option<GridField>>> = disks
        .iter()
        .map(|d| p.windows.iter().map(|w| window_field(d, &bbox(w))).collect())
        .collect();

    let long = if p.check_doubling { 2 * p.horizon } else { p.horizon };
    let measure_one = |theta: f64| -> Vec<PerR> {
        let map = mk(theta);
        disks
            .iter()
            .zip(&windows)
            .map(|(disk, wins)| {
                let steps = confinement_steps(&map, disk, long);
                let at = |h: usize| restricted_from_steps(disk, &steps, h).map_err(|e| e.to_string());
                let short = at(p.horizon);
                let doubled = if p.check_doubling { Some(at(long)) } else { None };
                let measure = |u: &GridField| -> Result<Measured, String> {
                    let s = short.as_ref().map_err(Clone::clone)?;
                    let d = dens(u, s).map_err(|e| e.to_string())?;
                    let dd = match &doubled {
                        Some(Ok(f)) => Some(dens(u, f).map_err(|e| e.to_string())?.value),
                        Some(Err(e)) => return Err(e.clone()),
                        None => None,
                    };
                    Ok(Measured { dens: d.value, dens_doubled: dd, excluded: d.excluded_cells })
                };
                PerR {
                    disk: measure(disk),
                    windows: wins
                        .iter()
                        .map(|w| w.as_ref().ok_or_else(|| "empty window".to_string()).and_then(measure))
                        .collect(),
                    field: short.ok(),
                }
            })
            .collect()
    };

    let mut thetas: Vec<(Option<&Member>, f64)> = members.iter().map(|m| (Some(m), m.alpha_n.to_f64())).collect();
    if p.baseline {
        thetas.push((None, p.alpha.to_f64()));
    }
    let results: Vec<Vec<PerR>> = thetas.par_iter().map(|(_, t)| measure_one(*t)).collect();

    let mut report = new_report(config, hash, COLUMNS);
    let tol = format!("dens>={};doubling<{}", p.density_min, p.doubling_tol);
    for ((member, theta), per_r) in thetas.iter().zip(&results) {
        let head: Vec<String> = match member {
            Some(m) => vec![
                m.n.to_string(),
                m.q_n.to_string(),
                m.a_n_text(),
                num(m.a_n_log2()),
                num(*theta),
                num(m.log_root),
                num(m.root),
            ],
            None => vec!["base".into(), String::new(), String::new(), String::new(), num(*theta), String::new(), String::new()],
        };
        for (ri, pr) in per_r.iter().enumerate() {
            let scopes = std::iter::once(("disk".to_string(), &pr.disk))
                .chain(pr.windows.iter().enumerate().map(|(k, w)| (format!("window{k}"), w)));
            for (scope, m) in scopes {
                let mut row = head.clone();
                row.push(num(p.r_values[ri]));
                row.push(scope);
                row.push(p.horizon.to_string());
                row.push(if p.check_doubling { long.to_string() } else { String::new() });
                match m {
                    Ok(m) => {
                        row.push(num(m.dens));
                        row.push(m.dens_doubled.map(num).unwrap_or_default());
                        row.push(m.dens_doubled.map(|d| num((d - m.dens).abs())).unwrap_or_default());
                        row.push(m.excluded.to_string());
                        row.push(tol.clone());
                        row.push("ok".into());
                    }
                    Err(e) => {
                        row.extend(std::iter::repeat_n(String::new(), 4));
                        row.push(tol.clone());
                        row.push(format!("error: {e}"));
                    }
                }
                report.push_row(row);
            }
            if let Some(f) = &pr.field {
                let tag = match member {
                    Some(m) => format!("restricted_n{}_r{}", m.n, p.r_values[ri]),
                    None => format!("restricted_base_r{}", p.r_values[ri]),
                };
                report.add_field(tag, f.clone());
            }
        }
    }
    for (r, d) in p.r_values.iter().zip(&disks) {
        report.add_field(format!("rdisk_r{r}"), d.clone());
    }

    let n_members = members.len();
    let last = n_members.saturating_sub(p.last_n)..n_members;
    for (ri, r) in p.r_values.iter().enumerate() {
        let last_dens: Option<Vec<f64>> =
            results[last.clone()].iter().map(|pr| pr[ri].disk.as_ref().ok().map(|m| m.dens)).collect();
        report.checks.push(Check::at_least(
            &format!("density_last{}_r{r}", p.last_n),
            last_dens.map(|v| v.into_iter().fold(f64::INFINITY, f64::min)),
            p.density_min,
        ));
        if p.check_doubling {
            let changes: Option<Vec<f64>> = results[..n_members]
                .iter()
                .map(|pr| pr[ri].disk.as_ref().ok().and_then(|m| m.dens_doubled.map(|d| (d - m.dens).abs())))
                .collect();
            report.checks.push(Check::below(
                &format!("doubling_change_r{r}"),
                changes.map(|v| v.into_iter().fold(0.0, f64::max)),
                p.doubling_tol,
            ));
        }
        if p.baseline {
            let b = results[n_members][ri].disk.as_ref().ok().map(|m| m.dens);
            report.checks.push(Check::at_least(&format!("baseline_density_r{r}"), b, BASELINE_DENSITY_MIN));
        }
    }
    let worst_rule = members[last].iter().map(|m| m.log_root).fold(0.0, f64::max);
    report.checks.push(Check::at_most("schedule_log_root", Some(worst_rule), 1.0 + SCHEDULE_RULE_TOL));
    report.notes.push(format!(
        "densities at finite n and finite horizon are consistent with (not a proof of) liminf dens >= 1/2; \
         threshold {} carries the discretization slack",
        p.density_min
    ));
    if cubic {
        report.notes.push("cubic family f(z) = e^{2 pi i a} z (1 + z)^2 with high-type rotation numbers".into());
    }
    Ok(report)
}

/// In-cells of the disk whose centers lie in the window; `None` if empty.
fn window_field(disk: &GridField, w: &Bbox) -> Option<GridField> {
    let (nx, ny) = disk.resolution();
    let tags: Vec<Tag> = (0..ny)
        .flat_map(|j| (0..nx).map(move |i| (i, j)))
        .map(|(i, j)| {
            if disk.tag(i, j) == Tag::In && w.contains(disk.center(i, j)) {
                Tag::In
            } else {
                Tag::Out
            }
        })
        .collect();
    if !tags.contains(&Tag::In) {
        return None;
    }
    GridField::from_tags(*disk.bbox(), nx, ny, tags).ok()
}
