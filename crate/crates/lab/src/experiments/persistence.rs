//! E2: area of the filled Julia set of the cubic map at `alpha_n` against
//! that at `alpha`.

use dynlab_core::cfrac::{is_high_type, RotationNumber};
use dynlab_core::maps::PolynomialMap;
use dynlab_core::measure::{area, filled_julia_grid, GridField};
use rayon::prelude::*;

use super::{bbox, new_report, require, schedule};
use crate::config::{Config, PersistenceParams};
use crate::error::LabError;
use crate::report::{num, Check, Report};

const COLUMNS: &[&str] = &[
    "n",
    "q_n",
    "a_n",
    "a_n_log2",
    "alpha_n",
    "f64_equals_convergent",
    "log_root",
    "root",
    "resolution",
    "horizon",
    "area",
    "area_coarse",
    "refinement_gap",
    "refinement_bound",
    "ratio",
    "inverse_ratio",
    "tolerance",
    "status",
];

struct Areas {
    fine: f64,
    coarse: f64,
    bound: f64,
    field: GridField,
}

pub(super) fn run(config: &Config, p: &PersistenceParams, hash: String) -> Result<Report, LabError> {
    require(
        is_high_type(p.alpha.digits(), p.high_type) && !p.alpha.digits().is_finite(),
        format!("alpha = {} is not of high type {}", p.alpha, p.high_type),
    )?;
    let tail = RotationNumber::periodic(p.high_type);
    let members = schedule(&p.alpha, &tail, p.n_min..=p.n_max, &p.rule)?;
    let b = bbox(&p.bbox);

    let measure = |theta: f64| -> Result<Areas, String> {
        let map = PolynomialMap::cubic_siegel(theta);
        let fine = filled_julia_grid(&map, b, p.resolution, p.resolution, p.horizon, p.r_escape).map_err(|e| e.to_string())?;
        let coarse = filled_julia_grid(&map, b, p.coarse_resolution, p.coarse_resolution, p.horizon, p.r_escape)
            .map_err(|e| e.to_string())?;
        Ok(Areas {
            fine: area(&fine).value,
            coarse: area(&coarse).value,
            bound: coarse.boundary_cells().len() as f64 * coarse.cell_area(),
            field: fine,
        })
    };
    let thetas: Vec<f64> =
        std::iter::once(p.alpha.to_f64()).chain(members.iter().map(|m| m.alpha_n.to_f64())).collect();
    let results: Vec<Result<Areas, String>> = thetas.par_iter().map(|&t| measure(t)).collect();

    let mut report = new_report(config, hash, COLUMNS);
    let tol = format!("ratio>={} for n>={}", 1.0 - p.epsilon, p.n0);
    let base_area = results[0].as_ref().ok().map(|a| a.fine);
    let mut refinement_ok = Some(true);
    let mut worst_ratio: Option<f64> = Some(f64::INFINITY);
    for (k, res) in results.iter().enumerate() {
        let member = k.checked_sub(1).map(|i| &members[i]);
        let mut row = match member {
            Some(m) => {
                let approx = p.alpha.approximants(m.n);
                let c = &approx[m.n - 1];
                let pq = c.p.to_string().parse::<f64>().unwrap_or(f64::NAN) / c.q.to_string().parse::<f64>().unwrap_or(f64::NAN);
                vec![
                    m.n.to_string(),
                    m.q_n.to_string(),
                    m.a_n_text(),
                    num(m.a_n_log2()),
                    num(thetas[k]),
                    (thetas[k] == pq).to_string(),
                    num(m.log_root),
                    num(m.root),
                ]
            }
            None => vec![
                "base".into(),
                String::new(),
                String::new(),
                String::new(),
                num(thetas[k]),
                String::new(),
                String::new(),
                String::new(),
            ],
        };
        row.push(p.resolution.to_string());
        row.push(p.horizon.to_string());
        match res {
            Ok(a) => {
                let gap = (a.fine - a.coarse).abs();
                if gap > a.bound {
                    refinement_ok = refinement_ok.map(|_| false);
                }
                let ratio = base_area.map(|b| a.fine / b);
                let inverse = base_area.map(|b| b / a.fine);
                if let Some(m) = member {
                    if m.n >= p.n0 {
                        worst_ratio = match (worst_ratio, ratio) {
                            (Some(w), Some(r)) => Some(w.min(r)),
                            _ => None,
                        };
                    }
                }
                row.extend([
                    num(a.fine),
                    num(a.coarse),
                    num(gap),
                    num(a.bound),
                    ratio.map(num).unwrap_or_default(),
                    inverse.map(num).unwrap_or_default(),
                    tol.clone(),
                    "ok".into(),
                ]);
            }
            Err(e) => {
                refinement_ok = None;
                if member.is_some_and(|m| m.n >= p.n0) {
                    worst_ratio = None;
                }
                row.extend(std::iter::repeat_n(String::new(), 6));
                row.push(tol.clone());
                row.push(format!("error: {e}"));
            }
        }
        report.push_row(row);
    }
    if let Some(Ok(a)) = results.first() {
        report.add_field("filled_julia_base", a.field.clone());
    }
    if let (Some(m), Some(Ok(a))) = (members.last(), results.last()) {
        report.add_field(format!("filled_julia_n{}", m.n), a.field.clone());
    }

    if worst_ratio == Some(f64::INFINITY) {
        worst_ratio = None;
    }
    report.checks.push(Check::at_least(&format!("area_ratio_min_n{}", p.n0), worst_ratio, 1.0 - p.epsilon));
    report.checks.push(Check::holds("refinement_consistency", refinement_ok, "|area fine - area coarse| <= boundary bound"));
    let growth = members.windows(2).all(|w| w[1].root >= w[0].root && w[1].log_root <= w[0].log_root);
    report.checks.push(Check::holds(
        "growth_rule",
        Some(growth),
        "A_n^(1/q_n) nondecreasing and (log A_n)^(1/q_n) nonincreasing",
    ));
    report.notes.push(
        "upper semicontinuity is not asserted: inverse_ratio is recorded for information only".into(),
    );
    Ok(report)
}
