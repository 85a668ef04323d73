//! Perturbed Fatou coordinates for `Q(z) = lambda z + (27/16) lambda^2 z^2`
//! with small rotation parameter, the sectors `C` and `C#`, the projection
//! `Exp`, and pointwise evaluation of the near-parabolic renormalization.
//!
//! The chart is assembled from three pieces:
//! * the model coordinate `w(z) = log(z / (z - sigma)) / (2 pi i alpha)`,
//!   in which a Mobius map with fixed points `0, sigma` is translation by one;
//! * a window coordinate `Psi` on the middle of the strip, obtained by
//!   integrating `1 / V` where `V` is the vector field whose time-one map is
//!   the lifted map `T = w . g . w^-1` (expanded to third order in the
//!   derivatives of `T - id`);
//! * transport along orbits: `Phi(z) = Psi(w(g^n z)) - n + C0`.

use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::maps::{Family, MapDescriptor, PolynomialMap, C64};

/// Largest rotation parameter for which charts are built.
pub const ALPHA_STAR: f64 = 0.1;
pub const ABEL_MEDIAN_TOL: f64 = 1e-3;
pub const ABEL_P95_TOL: f64 = 1e-2;
pub const NORMALIZATION_TOL: f64 = 1e-9;
pub const ROUND_TRIP_TOL: f64 = 1e-6;
/// Allowed relative error of the return-map rotation against `frac(1/alpha)`.
pub const MULTIPLIER_TOL: f64 = 0.01;
pub const CRITICAL_VALUE_TOL: f64 = 1e-3;
/// Share of deep sector samples whose return orbit must stay bounded.
pub const SECTOR_PASS_FRACTION: f64 = 0.95;
const ESCAPE: f64 = 10.0;
const GL_NODES: usize = 12;
/// Distance of the exit window `[x0, x0 + 1)` from the right end of the strip.
const EXIT_OFFSET: f64 = 3.0;

/// `conj(-4/27 e^{2 pi i zeta})`.
pub fn exp_map(zeta: C64) -> C64 {
    (C64::new(-4.0 / 27.0, 0.0) * (C64::new(0.0, 2.0 * PI) * zeta).exp()).conj()
}

/// Preimage of `z` under `exp_map` with real part in `[x0, x0 + 1)`.
pub fn exp_inverse(z: C64, x0: f64) -> Result<C64> {
    if z == C64::new(0.0, 0.0) || !z.is_finite() {
        return Err(Error::OutsideDomain);
    }
    let zeta = (z.conj() * (-27.0 / 4.0)).ln() / C64::new(0.0, 2.0 * PI);
    Ok(C64::new(zeta.re - (zeta.re - x0).floor(), zeta.im))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ChartStats {
    pub samples: usize,
    pub abel_median: f64,
    pub abel_p95: f64,
    pub abel_max: f64,
    /// Estimated `Re`-extent of `Phi` over the petal.
    pub extent: f64,
    /// `round(1/alpha - extent)`.
    pub strip_constant: i64,
}

#[derive(Clone, Debug)]
pub struct FatouChart {
    map: PolynomialMap,
    alpha: f64,
    sigma: C64,
    c_g: C64,
    beta: f64,
    window: f64,
    offset: C64,
    stats: Option<ChartStats>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ChartSummary {
    pub map: Option<MapDescriptor>,
    pub alpha: f64,
    pub sigma: [f64; 2],
    pub critical_point: [f64; 2],
    pub normalization_offset: [f64; 2],
    pub window: f64,
    pub validation: Option<ChartStats>,
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    (1..=n)
        .map(|i| {
            let mut x = (PI * (i as f64 - 0.25) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            (x, 2.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

impl FatouChart {
    pub fn map(&self) -> &PolynomialMap {
        &self.map
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn sigma(&self) -> C64 {
        self.sigma
    }

    pub fn critical_point(&self) -> C64 {
        self.c_g
    }

    pub fn normalization_offset(&self) -> C64 {
        self.offset
    }

    pub fn stats(&self) -> Option<ChartStats> {
        self.stats
    }

    pub fn summary(&self) -> ChartSummary {
        let p = |z: C64| [z.re, z.im];
        ChartSummary {
            map: self.map.descriptor().cloned(),
            alpha: self.alpha,
            sigma: p(self.sigma),
            critical_point: p(self.c_g),
            normalization_offset: p(self.offset),
            window: self.window,
            validation: self.stats,
        }
    }

    /// Model coordinate with `Re w` in `[0, 1/alpha)`.
    pub fn model(&self, z: C64) -> C64 {
        let u = z / (z - self.sigma);
        let a = (u.arg() - self.beta).rem_euclid(2.0 * PI);
        C64::new(a, -u.norm().ln()) / (2.0 * PI * self.alpha)
    }

    pub fn model_inverse(&self, v: C64) -> C64 {
        let u = (C64::new(0.0, 2.0 * PI * self.alpha) * v + C64::new(0.0, self.beta)).exp();
        u * self.sigma / (u - 1.0)
    }

    fn lift(&self, v: C64) -> C64 {
        let t = self.model(self.map.eval(self.model_inverse(v)));
        let period = 1.0 / self.alpha;
        let shift = ((v.re + 1.0 - t.re) / period).round();
        C64::new(t.re + shift * period, t.im)
    }

    fn generator(&self, v: C64) -> C64 {
        let h = 1e-2;
        let d0 = self.lift(v) - v;
        let dp = self.lift(v + h) - (v + h);
        let dm = self.lift(v - h) - (v - h);
        let d1 = (dp - dm) / (2.0 * h);
        let d2 = (dp - 2.0 * d0 + dm) / (h * h);
        d0 - 0.5 * d0 * d1 + d0 * d1 * d1 / 3.0 + d0 * d0 * d2 / 12.0
    }

    fn window_center(&self) -> C64 {
        C64::new(self.window + 0.5, 0.0)
    }

    /// Window coordinate, `Psi(window_center) = 0`.
    fn psi(&self, v: C64) -> C64 {
        let a = self.window_center();
        let pieces = ((v - a).norm().ceil() as usize).max(1);
        let step = (v - a) / pieces as f64;
        static NODES: std::sync::OnceLock<Vec<(f64, f64)>> = std::sync::OnceLock::new();
        let nodes = NODES.get_or_init(|| gauss_legendre(GL_NODES));
        let mut acc = C64::new(0.0, 0.0);
        for p in 0..pieces {
            let mid = a + step * (p as f64 + 0.5);
            for &(x, wgt) in nodes {
                acc += wgt * 0.5 / self.generator(mid + step * (0.5 * x));
            }
        }
        acc * step
    }

    fn psi_inverse(&self, target: C64) -> Result<C64> {
        let tol = 1e-11 * (1.0 + target.norm());
        let mut v = self.window_center() + target;
        for _ in 0..30 {
            let r = self.psi(v) - target;
            if r.norm() < tol {
                return Ok(v);
            }
            v -= r * self.generator(v);
        }
        let r = (self.psi(v) - target).norm();
        if r < 1e3 * tol {
            Ok(v)
        } else {
            Err(Error::NewtonDivergence)
        }
    }

    fn preimage_near(&self, y: C64, seed: C64) -> C64 {
        let c = self.map.coeffs();
        let (a, b) = (c[2], c[1]);
        let disc = (b * b + 4.0 * a * y).sqrt();
        let r1 = (-b + disc) / (2.0 * a);
        let r2 = (-b - disc) / (2.0 * a);
        if (r1 - seed).norm() <= (r2 - seed).norm() {
            r1
        } else {
            r2
        }
    }

    /// Transports `z` along its orbit into the window; returns the window
    /// point and the signed number of steps taken.
    fn to_window(&self, z: C64) -> Result<(C64, i64)> {
        let n_max = (1.0 / self.alpha).ceil() as i64 + 4;
        let mut y = z;
        let mut v = self.model(y);
        let mut n = 0i64;
        while v.re < self.window {
            let y1 = self.map.eval(y);
            let v1 = self.model(y1);
            let dre = v1.re - v.re;
            if !(y1.norm() < ESCAPE) || !(0.2..2.5).contains(&dre) || n >= n_max {
                return Err(Error::OutsidePetal);
            }
            y = y1;
            v = v1;
            n += 1;
        }
        while v.re >= self.window + 1.0 {
            let y1 = self.preimage_near(y, self.model_inverse(v - 1.0));
            let v1 = self.model(y1);
            let dre = v.re - v1.re;
            if !(0.2..2.5).contains(&dre) || -n >= n_max {
                return Err(Error::OutsidePetal);
            }
            y = y1;
            v = v1;
            n -= 1;
        }
        Ok((y, n))
    }

    fn phi_raw(&self, z: C64) -> Result<C64> {
        let (y, n) = self.to_window(z)?;
        Ok(self.psi(self.model(y)) - n as f64)
    }

    /// Perturbed Fatou coordinate, normalized so that `phi(c_g) = 0`.
    pub fn phi(&self, z: C64) -> Result<C64> {
        Ok(self.phi_raw(z)? + self.offset)
    }

    pub fn phi_deriv(&self, z: C64) -> Result<C64> {
        let h = 1e-6 * z.norm().max(1e-3);
        Ok((self.phi(z + h)? - self.phi(z - h)?) / (2.0 * h))
    }

    pub fn phi_inverse(&self, zeta: C64) -> Result<C64> {
        let raw = zeta - self.offset;
        let n = (-raw.re + 0.5).floor();
        let v = self.psi_inverse(raw + n)?;
        let mut z = self.model_inverse(v);
        let mut n = n as i64;
        while n < 0 {
            z = self.map.eval(z);
            n += 1;
        }
        while n > 0 {
            let w = self.model(z);
            z = self.preimage_near(z, self.model_inverse(w - 1.0));
            n -= 1;
        }
        // polish against the chart itself
        let tol = 1e-12 * (1.0 + zeta.norm());
        for _ in 0..8 {
            let r = self.phi(z)? - zeta;
            if r.norm() < tol {
                return Ok(z);
            }
            let d = self.phi_deriv(z)?;
            let step = r / d;
            if !step.is_finite() {
                return Err(Error::NewtonDivergence);
            }
            z -= step;
        }
        if (self.phi(z)? - zeta).norm() < 1e-8 {
            Ok(z)
        } else {
            Err(Error::NewtonDivergence)
        }
    }

    /// Abel residual of the window coordinate at the window point of `z`:
    /// `|Psi(T(v)) - Psi(v) - 1|`.
    pub fn abel_residual(&self, z: C64) -> Result<f64> {
        let (y, _) = self.to_window(z)?;
        let v = self.model(y);
        Ok((self.psi(self.lift(v)) - self.psi(v) - 1.0).norm())
    }

    /// Real part of the right end of the strip, estimated at the exit
    /// mirror image of the critical point.
    fn extent(&self) -> Result<f64> {
        let exit = self.model_inverse(C64::new(1.0 / self.alpha - 0.5, 0.0));
        Ok(self.phi(exit)?.re + 0.5)
    }

    /// `R(g)(z) = Exp(Phi(g^k1(Phi^-1(zeta))))`, where `zeta` is the preimage
    /// of `z` under `Exp` in the last unit of the strip and `k1` the first
    /// return of the orbit to `1/2 <= Re Phi < 3/2`.
    pub fn renorm_return(&self, z: C64, k1_max: usize) -> Result<(C64, usize)> {
        let stats = self.stats.ok_or(Error::OutsideDomain)?;
        let x0 = 1.0 / self.alpha - stats.strip_constant as f64 - EXIT_OFFSET;
        let zeta = exp_inverse(z, x0)?;
        let y0 = self.phi_inverse(zeta).map_err(|_| Error::OutsideDomain)?;
        let mut y = y0;
        let mut prev = self.model(y).re;
        let mut wrapped = false;
        for k in 1..=k1_max {
            y = self.map.eval(y);
            if !(y.norm() < ESCAPE) {
                return Err(Error::NoReturn { k1_max });
            }
            let re = self.model(y).re;
            if re < prev - 0.5 / self.alpha {
                wrapped = true;
            }
            prev = re;
            if wrapped {
                if let Ok(p) = self.phi(y) {
                    if (0.5..1.5).contains(&p.re) {
                        return Ok((exp_map(p), k));
                    }
                    if p.re >= 1.5 {
                        return Err(Error::NoReturn { k1_max });
                    }
                }
            }
        }
        Err(Error::NoReturn { k1_max })
    }

    /// Exp of the chart value at the critical value, which should be the
    /// critical value `-4/27` of the renormalization.
    pub fn critical_value_image(&self) -> Result<C64> {
        Ok(exp_map(self.phi(self.map.eval(self.c_g))?))
    }
}

/// Builds a chart for `Q_alpha` with `0 < alpha < alpha_star`, validated on
/// `validation` petal points.
pub fn build_chart(map: &PolynomialMap, alpha_star: f64, validation: usize) -> Result<FatouChart> {
    if map.family() != Family::QuadIs {
        return Err(Error::UnsupportedFamily);
    }
    let alpha = map.theta().rem_euclid(1.0);
    if !(alpha > 0.0 && alpha < alpha_star) {
        return Err(Error::AlphaOutOfRange { alpha, alpha_max: alpha_star });
    }
    let mut sigma = *map.nonzero_fixed_points()?.first().ok_or(Error::NoSigma)?;
    for _ in 0..20 {
        let r = map.eval(sigma) - sigma;
        if r.norm() < 1e-15 {
            break;
        }
        sigma -= r / (map.deriv(sigma) - 1.0);
    }
    if !((map.eval(sigma) - sigma).norm() < 1e-12) || sigma.norm() < 1e-300 {
        return Err(Error::NoSigma);
    }
    let c_g = map.critical_points()?[0].0;
    let u_c = c_g / (c_g - sigma);
    let mut chart = FatouChart {
        map: map.clone(),
        alpha,
        sigma,
        c_g,
        beta: u_c.arg() - PI * alpha,
        window: (0.5 / alpha).floor(),
        offset: C64::new(0.0, 0.0),
        stats: None,
    };
    chart.offset = -chart.phi_raw(c_g)?;

    let rows = ((validation as f64).sqrt().ceil() as usize).max(2);
    let span = 1.0 / alpha - 2.0;
    let pts: Vec<C64> = (0..rows)
        .flat_map(|i| {
            (0..rows).map(move |j| {
                C64::new(1.0 + span * i as f64 / (rows - 1) as f64, -2.0 + 4.0 * j as f64 / (rows - 1) as f64)
            })
        })
        .take(validation.max(4))
        .collect();
    let mut res: Vec<f64> = pts
        .par_iter()
        .filter_map(|v| chart.abel_residual(chart.model_inverse(*v)).ok())
        .collect();
    if res.is_empty() {
        return Err(Error::AbelResidualExceeded { median: f64::INFINITY, tolerance: ABEL_MEDIAN_TOL });
    }
    res.sort_by(f64::total_cmp);
    let q = |p: f64| res[((res.len() - 1) as f64 * p).round() as usize];
    let (median, p95) = (q(0.5), q(0.95));
    if median > ABEL_MEDIAN_TOL || p95 > ABEL_P95_TOL {
        return Err(Error::AbelResidualExceeded { median, tolerance: ABEL_MEDIAN_TOL });
    }
    let extent = chart.extent()?;
    chart.stats = Some(ChartStats {
        samples: res.len(),
        abel_median: median,
        abel_p95: p95,
        abel_max: *res.last().unwrap(),
        extent,
        strip_constant: (1.0 / alpha - extent).round() as i64,
    });
    Ok(chart)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SectorKind {
    C,
    CSharp,
}

/// Sector boundary as four edges, each listed in counter-clockwise order of
/// the chart rectangle `[1/2, 3/2] x [im_low, im_high]`.
#[derive(Clone, Debug, Serialize)]
pub struct Sector {
    pub kind: SectorKind,
    pub im_range: (f64, f64),
    pub down: Vec<C64>,
    pub right: Vec<C64>,
    pub top: Vec<C64>,
    pub left: Vec<C64>,
}

impl Sector {
    /// Closed polyline (edges concatenated without repeated corners).
    pub fn polyline(&self) -> Vec<C64> {
        let mut out = Vec::new();
        for e in [&self.down, &self.right, &self.top, &self.left] {
            out.extend_from_slice(&e[..e.len() - 1]);
        }
        out
    }
}

/// `C` is `[1/2, 3/2] x [-2, 2]` in chart coordinates; `C#` is
/// `[1/2, 3/2] x [2, im_top]`, a truncation of the upward half-strip.
pub fn sector(chart: &FatouChart, kind: SectorKind, im_top: f64, per_edge: usize) -> Result<Sector> {
    let (lo, hi) = match kind {
        SectorKind::C => (-2.0, 2.0),
        SectorKind::CSharp => (2.0, im_top),
    };
    let edge = |a: C64, b: C64| -> Result<Vec<C64>> {
        (0..=per_edge)
            .into_par_iter()
            .map(|k| chart.phi_inverse(a + (b - a) * (k as f64 / per_edge as f64)))
            .collect()
    };
    let (p00, p10, p11, p01) = (C64::new(0.5, lo), C64::new(1.5, lo), C64::new(1.5, hi), C64::new(0.5, hi));
    Ok(Sector {
        kind,
        im_range: (lo, hi),
        down: edge(p00, p10)?,
        right: edge(p10, p11)?,
        top: edge(p11, p01)?,
        left: edge(p01, p00)?,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SectorCheckReport {
    pub candidates: usize,
    pub samples: usize,
    pub passed: usize,
    pub pass_fraction: f64,
    pub complement_samples: usize,
    pub complement_passed: usize,
    /// Smallest and largest first-return count seen on the first step.
    pub k1_range: (usize, usize),
    pub horizon: usize,
    pub critical_value_error: f64,
}

/// Whether the return orbit stays defined and bounded, with the first `k1`.
fn return_orbit_confined(chart: &FatouChart, zeta: C64, horizon: usize) -> (bool, Option<usize>) {
    let k1_max = (4.0 / chart.alpha()).ceil() as usize;
    let mut p = exp_map(zeta);
    let mut first = None;
    for _ in 0..horizon {
        match chart.renorm_return(p, k1_max) {
            Ok((q, k1)) if q.norm() < ESCAPE => {
                first.get_or_insert(k1);
                p = q;
            }
            _ => return (false, first),
        }
    }
    (true, first)
}

fn spread(v: &[C64], n: usize) -> Vec<C64> {
    v.iter().step_by((v.len() / n.max(1)).max(1)).take(n).copied().collect()
}

/// Samples a lattice of chart points of `C u C#` (truncated at `im_top`),
/// splits them by membership of `Phi^-1` in the region bounded by
/// `siegel_polyline`, pushes them through `Exp` and counts those whose
/// return-map orbit is defined and bounded for `horizon` steps. Points
/// outside the polyline are run as a complement sample.
pub fn sector_siegel_check(
    chart: &FatouChart,
    siegel_polyline: &[C64],
    samples: usize,
    horizon: usize,
    im_top: f64,
) -> Result<SectorCheckReport> {
    let side = ((samples as f64) * 2.0).sqrt().ceil() as usize;
    let lattice: Vec<C64> = (0..side)
        .flat_map(|i| {
            (0..side).map(move |j| {
                C64::new(
                    0.5 + (i as f64 + 0.5) / side as f64,
                    -2.0 + (im_top + 2.0) * (j as f64 + 0.5) / side as f64,
                )
            })
        })
        .collect();
    let membership: Vec<Option<bool>> = lattice
        .par_iter()
        .map(|zeta| {
            chart
                .phi_inverse(*zeta)
                .ok()
                .map(|z| crate::measure::point_in_polygon(siegel_polyline, z))
        })
        .collect();
    let pick = |want: bool| -> Vec<C64> {
        lattice.iter().zip(&membership).filter(|(_, m)| **m == Some(want)).map(|(z, _)| *z).collect()
    };
    let inside = spread(&pick(true), samples);
    let outside = spread(&pick(false), samples);
    let run = |pts: &[C64]| -> Vec<(bool, Option<usize>)> {
        pts.par_iter().map(|z| return_orbit_confined(chart, *z, horizon)).collect()
    };
    let inside_runs = run(&inside);
    let passed = inside_runs.iter().filter(|r| r.0).count();
    let complement_passed = run(&outside).iter().filter(|r| r.0).count();
    let k1s = inside_runs.iter().filter_map(|r| r.1);
    let k1_range = (k1s.clone().min().unwrap_or(0), k1s.max().unwrap_or(0));
    let cv = chart.critical_value_image()?;
    Ok(SectorCheckReport {
        candidates: lattice.len(),
        samples: inside.len(),
        passed,
        pass_fraction: if inside.is_empty() { 0.0 } else { passed as f64 / inside.len() as f64 },
        complement_samples: outside.len(),
        complement_passed,
        k1_range,
        horizon,
        critical_value_error: (cv - C64::new(-4.0 / 27.0, 0.0)).norm(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chart(alpha: f64) -> FatouChart {
        build_chart(&PolynomialMap::quad_is(alpha), ALPHA_STAR, 64).unwrap()
    }

    #[test]
    fn exp_identities() {
        assert!((exp_map(C64::new(0.0, 0.0)) - C64::new(-4.0 / 27.0, 0.0)).norm() < 1e-16);
        let z = C64::new(0.3, 0.7);
        assert!((exp_map(z + 1.0) - exp_map(z)).norm() < 1e-15);
        let m = exp_map(C64::new(0.1, 3.0)).norm();
        assert!((m - 4.0 / 27.0 * (-6.0 * PI).exp()).abs() < 1e-20);
        let back = exp_inverse(exp_map(z), 0.0).unwrap();
        assert!((back - z).norm() < 1e-12);
    }

    #[test]
    fn gauss_legendre_is_exact_for_polynomials() {
        let s: f64 = gauss_legendre(GL_NODES).iter().map(|(x, w)| w * x.powi(10)).sum();
        assert!((s - 2.0 / 11.0).abs() < 1e-14);
    }

    #[test]
    fn chart_normalization_and_abel() {
        let c = chart(0.05);
        assert!((c.map().eval(c.sigma()) - c.sigma()).norm() < 1e-12);
        assert!(c.phi(c.critical_point()).unwrap().norm() < NORMALIZATION_TOL);
        let s = c.stats().unwrap();
        assert!(s.abel_median < ABEL_MEDIAN_TOL && s.abel_p95 < ABEL_P95_TOL, "{s:?}");
        for v in [C64::new(2.0, 0.5), C64::new(7.3, -1.0), C64::new(12.0, 1.5)] {
            let z = c.model_inverse(v);
            let d = c.phi(c.map().eval(z)).unwrap() - c.phi(z).unwrap();
            assert!((d - 1.0).norm() < 1e-3, "{v} {d}");
        }
    }

    #[test]
    fn round_trip() {
        let c = chart(0.05);
        for v in [C64::new(1.0, 0.0), C64::new(5.5, 1.0), C64::new(15.0, -1.5), C64::new(1.2, 3.0)] {
            let z = c.model_inverse(v);
            let back = c.phi_inverse(c.phi(z).unwrap()).unwrap();
            assert!((back - z).norm() < ROUND_TRIP_TOL, "{v}");
        }
    }

    #[test]
    fn rejects_large_alpha_and_other_families() {
        assert!(matches!(
            build_chart(&PolynomialMap::quad_is(0.2), ALPHA_STAR, 16),
            Err(Error::AlphaOutOfRange { .. })
        ));
        assert!(matches!(
            build_chart(&PolynomialMap::quad_bc(0.05), ALPHA_STAR, 16),
            Err(Error::UnsupportedFamily)
        ));
    }

    #[test]
    fn strip_constant_stable() {
        let k4 = chart(0.04).stats().unwrap().strip_constant;
        let k5 = chart(0.05).stats().unwrap().strip_constant;
        assert_eq!(k4, k5);
    }

    #[test]
    fn sectors_contain_critical_value() {
        let c = chart(0.05);
        let s = sector(&c, SectorKind::C, 0.0, 24).unwrap();
        let poly = s.polyline();
        assert_eq!(crate::measure::winding_number(&poly, C64::new(-4.0 / 27.0, 0.0)).abs(), 1);
        let sharp = sector(&c, SectorKind::CSharp, 6.0, 24).unwrap();
        assert!((sharp.down[0] - s.top[s.top.len() - 1]).norm() < 1e-9);
        let top = |y: f64| {
            sector(&c, SectorKind::CSharp, y, 12).unwrap().top.iter().map(|z| z.norm()).fold(0.0, f64::max)
        };
        assert!(top(8.0) < top(4.0));
        for z in &s.left {
            assert!((c.phi(*z).unwrap().re - 0.5).abs() < 1e-3);
        }
    }

    #[test]
    fn return_map_multiplier() {
        let golden_tail = 0.6180339887498949;
        let twelves = 1.0 / (12.0 + 1.0 / (12.0 + 1.0 / (12.0 + 1.0 / 12.0)));
        for alpha in [1.0 / (20.0 + golden_tail), twelves] {
            let c = chart(alpha);
            let want = (1.0 / alpha).fract();
            for k in 0..8 {
                let z = C64::from_polar(1e-3, 2.0 * PI * k as f64 / 8.0 + 0.3);
                let (r, _) = c.renorm_return(z, 200).unwrap();
                let turn = ((r / z).arg() / (2.0 * PI)).rem_euclid(1.0);
                assert!((turn - want).abs() < MULTIPLIER_TOL * want, "{alpha}: {turn} vs {want}");
            }
        }
    }

    #[test]
    fn deep_sector_points_have_confined_returns() {
        let alpha = 1.0 / (20.0 + 0.6180339887498949);
        let map = PolynomialMap::quad_is(alpha);
        let c = build_chart(&map, ALPHA_STAR, 32).unwrap();
        let s = crate::siegel::linearize(&map, 800).unwrap();
        let poly = crate::siegel::rdisk_boundary(&s, 0.8, 512).unwrap();
        let rep = sector_siegel_check(&c, &poly, 30, 20, 4.0).unwrap();
        assert!(rep.samples >= 20 && rep.pass_fraction >= SECTOR_PASS_FRACTION, "{rep:?}");
        assert!(rep.complement_passed < rep.complement_samples, "{rep:?}");
        assert!(rep.k1_range.1 - rep.k1_range.0 <= 1, "{rep:?}");
    }

    #[test]
    fn critical_value_preserved() {
        let c = chart(1.0 / 20.618);
        assert!((c.critical_value_image().unwrap() - C64::new(-4.0 / 27.0, 0.0)).norm() < CRITICAL_VALUE_TOL);
    }
}
