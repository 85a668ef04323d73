//! E4: the perturbed family restricted near the filled Julia set of the
//! quadratic is quadratic-like over `D_R`.

use std::f64::consts::PI;

use dynlab_core::maps::{quadratic_like_radius, PolynomialMap, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::new_report;
use crate::config::{Config, QuadraticLikeParams};
use crate::error::LabError;
use crate::report::{num, Check, Report};

const COLUMNS: &[&str] = &[
    "theta",
    "degree",
    "epsilon",
    "role",
    "r",
    "r_prime",
    "samples",
    "count_two",
    "count_min",
    "count_max",
    "v_margin",
    "boundary_margin",
    "tolerance",
    "status",
];

const TOLERANCE: &str = "count==2;v_margin>0;boundary_margin>0";

struct Outcome {
    counts: Vec<usize>,
    v_margin: f64,
    boundary_margin: f64,
}

/// `U = {|P(z)| < R'}`, `V = f^{-1}(D_R) ∩ U`.
fn verify(
    theta: f64,
    epsilon: f64,
    degree: u32,
    (r, r2): (f64, f64),
    samples: &[C64],
    boundary_samples: usize,
) -> Result<Outcome, String> {
    let p = PolynomialMap::quad_bc(theta);
    let f = PolynomialMap::perturbed_quad(theta, epsilon, degree).map_err(|e| e.to_string())?;
    let in_u = |z: C64| p.eval(z).norm() < r2;
    let counts = samples
        .par_iter()
        .map(|&w| f.count_preimages_in(w, in_u))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    let circle = |level: f64, k: usize| C64::from_polar(level, 2.0 * PI * k as f64 / boundary_samples as f64);
    let v_reach = (0..boundary_samples)
        .into_par_iter()
        .map(|k| {
            f.preimages(circle(r, k))
                .map(|zs| zs.into_iter().filter(|z| in_u(*z)).map(|z| z.norm()).fold(0.0, f64::max))
        })
        .collect::<Result<Vec<f64>, _>>()
        .map_err(|e| e.to_string())?
        .into_iter()
        .fold(0.0, f64::max);
    let edge = (0..boundary_samples)
        .into_par_iter()
        .map(|k| p.preimages(circle(r2, k)).map(|zs| zs.into_iter().map(|z| f.eval(z).norm()).fold(f64::INFINITY, f64::min)))
        .collect::<Result<Vec<f64>, _>>()
        .map_err(|e| e.to_string())?
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    Ok(Outcome { counts, v_margin: r - v_reach, boundary_margin: edge - r })
}

pub(super) fn run(config: &Config, p: &QuadraticLikeParams, hash: String) -> Result<Report, LabError> {
    let thetas: Vec<f64> = p.thetas.iter().map(|t| t.to_f64()).collect();
    let radii = quadratic_like_radius(&thetas, p.start_radius, p.max_doublings)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let samples: Vec<C64> = (0..p.samples)
        .map(|_| {
            let (u, v): (f64, f64) = (rng.gen(), rng.gen());
            C64::from_polar(radii.0 * u.sqrt(), 2.0 * PI * v)
        })
        .collect();

    let mut report = new_report(config, hash, COLUMNS);
    let (mut all_two, mut v_margin, mut b_margin) = (Some(true), Some(f64::INFINITY), Some(f64::INFINITY));
    for &theta in &thetas {
        let runs = std::iter::once((p.epsilon, "primary")).chain(p.control_epsilons.iter().map(|&e| (e, "control")));
        for (eps, role) in runs {
            let out = verify(theta, eps, p.degree, radii, &samples, p.boundary_samples);
            let mut row = vec![
                num(theta),
                p.degree.to_string(),
                num(eps),
                role.to_string(),
                num(radii.0),
                num(radii.1),
                samples.len().to_string(),
            ];
            match &out {
                Ok(o) => {
                    let two = o.counts.iter().filter(|&&c| c == 2).count();
                    row.extend([
                        two.to_string(),
                        o.counts.iter().min().map(|c| c.to_string()).unwrap_or_default(),
                        o.counts.iter().max().map(|c| c.to_string()).unwrap_or_default(),
                        num(o.v_margin),
                        num(o.boundary_margin),
                        TOLERANCE.into(),
                        "ok".into(),
                    ]);
                }
                Err(e) => {
                    row.extend(std::iter::repeat_n(String::new(), 5));
                    row.push(TOLERANCE.into());
                    row.push(format!("error: {e}"));
                }
            }
            report.push_row(row);
            if role != "primary" {
                continue;
            }
            match out {
                Ok(o) => {
                    all_two = all_two.map(|a| a && o.counts.iter().all(|&c| c == 2));
                    v_margin = v_margin.map(|m| m.min(o.v_margin));
                    b_margin = b_margin.map(|m| m.min(o.boundary_margin));
                }
                Err(_) => {
                    all_two = None;
                    v_margin = None;
                    b_margin = None;
                }
            }
        }
    }
    report.checks.push(Check::holds("all_counts_two", all_two, "every sampled w in D_R has 2 preimages in U"));
    report.checks.push(Check::above("v_margin", v_margin, 0.0));
    report.checks.push(Check::above("boundary_image_margin", b_margin, 0.0));
    report.notes.push("control rows are informative and do not enter the verdict".into());
    Ok(report)
}
