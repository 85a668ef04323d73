//! Linearization of an irrationally indifferent fixed point at 0 by power
//! series, conformal radius of the linearization disk, r-disk curves, and the
//! confinement surrogate for the Siegel disk of a restricted map.
//!
//! Coefficients are held in a rescaled coordinate: with scale `s`,
//! `phi(z) = s * psi(z / s)` and `psi(u) = sum c_k u^k`, so that the stored
//! `c_k = b_k s^(k-1)` stay of moderate size when `s` is close to the radius.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::maps::{exit_steps, rotation_multiplier, ComplexMap, PolynomialMap, C64};
use crate::measure::{polygon_field, Bbox, GridField, Tag};

pub const DEFAULT_ORDER: usize = 300;
/// Weighted RMS (natural-log units) above which a radius fit is flagged.
pub const UNSTABLE_RESIDUAL: f64 = 2.5;
/// Relative size of the truncated tail accepted when evaluating the series.
pub const TAIL_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadiusEstimate {
    /// `f64::INFINITY` when unbounded.
    pub radius: f64,
    pub residual: f64,
    pub unbounded: bool,
    pub stable: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearizationSeries {
    #[serde(with = "pair")]
    lambda: C64,
    #[serde(rename = "K")]
    order: usize,
    scale: f64,
    #[serde(with = "pairs")]
    coeffs: Vec<C64>,
    radius_estimate: Option<RadiusEstimate>,
}

mod pair {
    use super::C64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};
    pub fn serialize<S: Serializer>(z: &C64, s: S) -> Result<S::Ok, S::Error> {
        [z.re, z.im].serialize(s)
    }
    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<C64, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(d)?;
        Ok(C64::new(re, im))
    }
}

mod pairs {
    use super::C64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};
    pub fn serialize<S: Serializer>(v: &[C64], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>().serialize(s)
    }
    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<C64>, D::Error> {
        let v = Vec::<[f64; 2]>::deserialize(d)?;
        Ok(v.into_iter().map(|[re, im]| C64::new(re, im)).collect())
    }
}

#[derive(Clone, Copy, Default)]
struct Kahan {
    sum: C64,
    comp: C64,
}

impl Kahan {
    #[inline]
    fn add(&mut self, x: C64) {
        let y = x - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
    }
}

impl LinearizationSeries {
    pub fn lambda(&self) -> C64 {
        self.lambda
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Rescaled coefficients `c_0..c_K` (`c_0 = 0`, `c_1 = 1`).
    pub fn scaled_coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    /// `b_k`, the coefficient of `z^k` in `phi`.
    pub fn coeff(&self, k: usize) -> C64 {
        self.coeffs[k] * self.scale.powi(1 - k as i32)
    }

    pub fn radius_estimate(&self) -> Option<RadiusEstimate> {
        self.radius_estimate
    }

    /// Conformal radius, or an error when no finite estimate exists.
    pub fn radius(&self) -> Result<f64> {
        match self.radius_estimate {
            Some(r) if !r.unbounded => Ok(r.radius),
            Some(_) => Err(Error::SeriesDivergence { r: f64::INFINITY }),
            None => Err(Error::SeriesTooShort { order: self.order }),
        }
    }

    /// Truncated `phi(z)`.
    pub fn eval(&self, z: C64) -> C64 {
        let u = z / self.scale;
        let mut acc = C64::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            acc = acc * u + c;
        }
        acc * self.scale
    }

    /// Largest tail term `|b_k| rho^k` over the last tenth of the series,
    /// relative to `rho`.
    pub fn tail_bound(&self, rho: f64) -> f64 {
        let u = rho / self.scale;
        let start = self.order - self.order / 10;
        (start..=self.order)
            .map(|k| self.coeffs[k].norm() * u.powi(k as i32))
            .fold(0.0, f64::max)
            * self.scale
            / rho
    }
}

fn multiplier_power(theta: f64, k: usize) -> C64 {
    let t = (theta * k as f64).rem_euclid(1.0);
    C64::from_polar(1.0, 2.0 * std::f64::consts::PI * t)
}

fn raw_series(coeffs: &[C64], theta: f64, order: usize, scale: f64) -> Result<Vec<C64>> {
    let deg = coeffs.len() - 1;
    let lambda = coeffs[1];
    let a: Vec<C64> = coeffs.iter().enumerate().map(|(j, c)| c * scale.powi(j as i32 - 1)).collect();
    let mut c = vec![C64::new(0.0, 0.0); order + 1];
    if order >= 1 {
        c[1] = C64::new(1.0, 0.0);
    }
    // pw[j][k] = [psi^j]_k for j >= 2
    let mut pw = vec![vec![C64::new(0.0, 0.0); order + 1]; deg + 1];
    for k in 2..=order {
        let mut rhs = Kahan::default();
        for j in 2..=deg {
            let mut acc = Kahan::default();
            for i in 1..k {
                let prev = if j == 2 { c[k - i] } else { pw[j - 1][k - i] };
                if prev != C64::new(0.0, 0.0) {
                    acc.add(c[i] * prev);
                }
            }
            pw[j][k] = acc.sum;
            rhs.add(a[j] * acc.sum);
        }
        let den = multiplier_power(theta, k) - lambda;
        if den.norm() < 1e-300 {
            return Err(Error::ResonantDenominator { order: k });
        }
        c[k] = rhs.sum / den;
        if !c[k].is_finite() {
            return Err(Error::SeriesDivergence { r: scale });
        }
    }
    Ok(c)
}

/// Power-series linearization of the polynomial with ascending coefficients
/// `coeffs` (`coeffs[0] = 0`, `coeffs[1] = e^{2 pi i theta}`).
pub fn linearize_coeffs(coeffs: &[C64], theta: f64, order: usize) -> Result<LinearizationSeries> {
    if coeffs.len() < 2 || coeffs[0] != C64::new(0.0, 0.0) {
        return Err(Error::InvalidPolynomial("expected a fixed point at 0".into()));
    }
    if theta.fract() == 0.0 {
        return Err(Error::DegenerateParameter);
    }
    let lambda = coeffs[1];
    let pilot_order = order.min(200);
    let pilot = raw_series(coeffs, theta, pilot_order, 1.0)?;
    let mut series = LinearizationSeries {
        lambda,
        order: pilot_order,
        scale: 1.0,
        coeffs: pilot,
        radius_estimate: None,
    };
    if pilot_order >= 50 {
        series.radius_estimate = Some(conformal_radius(&series)?);
    }
    if order > pilot_order {
        let scale = match series.radius_estimate {
            Some(r) if !r.unbounded => r.radius,
            _ => 1.0,
        };
        series.coeffs = raw_series(coeffs, theta, order, scale)?;
        series.scale = scale;
        series.order = order;
        series.radius_estimate = Some(conformal_radius(&series)?);
    }
    Ok(series)
}

pub fn linearize(map: &PolynomialMap, order: usize) -> Result<LinearizationSeries> {
    let theta = map.theta();
    let lam = rotation_multiplier(theta);
    let mut coeffs = map.coeffs().to_vec();
    if (coeffs[1] - lam).norm() > 1e-12 {
        return Err(Error::InvalidPolynomial("multiplier off the unit circle".into()));
    }
    coeffs[1] = lam;
    linearize_coeffs(&coeffs, theta, order)
}

/// Cauchy-Hadamard radius from a tail-weighted regression of `log|b_k|`
/// against `k` over the last half of the coefficients.
pub fn conformal_radius(series: &LinearizationSeries) -> Result<RadiusEstimate> {
    let k_max = series.order;
    if k_max < 50 {
        return Err(Error::SeriesTooShort { order: k_max });
    }
    if series.coeffs[2..].iter().all(|c| *c == C64::new(0.0, 0.0)) {
        return Ok(RadiusEstimate { radius: f64::INFINITY, residual: 0.0, unbounded: true, stable: true });
    }
    let pts: Vec<(f64, f64, f64)> = (k_max / 2..=k_max)
        .filter(|&k| series.coeffs[k].norm() > 0.0)
        .map(|k| (k as f64, series.coeffs[k].norm().ln(), k as f64))
        .collect();
    if pts.len() < 3 {
        return Err(Error::SeriesTooShort { order: k_max });
    }
    let w: f64 = pts.iter().map(|p| p.2).sum();
    let mx = pts.iter().map(|p| p.2 * p.0).sum::<f64>() / w;
    let my = pts.iter().map(|p| p.2 * p.1).sum::<f64>() / w;
    let sxy: f64 = pts.iter().map(|p| p.2 * (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| p.2 * (p.0 - mx).powi(2)).sum();
    let slope = sxy / sxx;
    let icpt = my - slope * mx;
    let residual = (pts.iter().map(|p| p.2 * (p.1 - slope * p.0 - icpt).powi(2)).sum::<f64>() / w).sqrt();
    let radius = series.scale * (-slope).exp();
    Ok(RadiusEstimate { radius, residual, unbounded: false, stable: residual <= UNSTABLE_RESIDUAL })
}

/// `max |f(phi(z)) - phi(lambda z)|` over `samples` points of `|z| = rho`.
pub fn functional_residual(map: &impl ComplexMap, series: &LinearizationSeries, rho: f64, samples: usize) -> f64 {
    (0..samples)
        .map(|k| {
            let z = C64::from_polar(rho, 2.0 * std::f64::consts::PI * k as f64 / samples as f64);
            (map.apply(series.eval(z)) - series.eval(series.lambda * z)).norm()
        })
        .fold(0.0, f64::max)
}

/// `m` points of `phi(r R e^{2 pi i k / m})` where `R` is the conformal radius.
pub fn rdisk_boundary(series: &LinearizationSeries, r: f64, m: usize) -> Result<Vec<C64>> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::SeriesDivergence { r });
    }
    if m < 16 {
        return Err(Error::InvalidParameter(format!("need at least 16 points, got {m}")));
    }
    let radius = series.radius().map_err(|_| Error::SeriesDivergence { r })?;
    let rho = r * radius;
    if series.tail_bound(rho) > TAIL_TOLERANCE {
        return Err(Error::SeriesDivergence { r });
    }
    Ok((0..m)
        .map(|k| series.eval(C64::from_polar(rho, 2.0 * std::f64::consts::PI * k as f64 / m as f64)))
        .collect())
}

fn segments_cross(a: C64, b: C64, c: C64, d: C64) -> bool {
    let orient = |p: C64, q: C64, r: C64| ((q - p).conj() * (r - p)).im;
    let (d1, d2) = (orient(a, b, c), orient(a, b, d));
    let (d3, d4) = (orient(c, d, a), orient(c, d, b));
    d1 * d2 < 0.0 && d3 * d4 < 0.0
}

/// True when no two non-adjacent edges of the closed polyline cross.
pub fn is_simple_closed(poly: &[C64]) -> bool {
    let n = poly.len();
    (0..n).into_par_iter().all(|i| {
        let (a, b) = (poly[i], poly[(i + 1) % n]);
        (i + 2..n).all(|j| {
            if i == 0 && j == n - 1 {
                return true;
            }
            !segments_cross(a, b, poly[j], poly[(j + 1) % n])
        })
    })
}

/// Raster of the r-disk region; cells straddling its boundary are undecided.
pub fn rdisk_field(series: &LinearizationSeries, r: f64, m: usize, bbox: Bbox, nx: usize, ny: usize) -> Result<GridField> {
    let poly = rdisk_boundary(series, r, m)?;
    Ok(polygon_field(&poly, bbox, nx, ny))
}

/// Step at which the center orbit of each cell first leaves the in or
/// undecided cells of `region`; `u32::MAX` if it stays for `horizon` steps.
/// Cells outside the region report 0.
pub fn confinement_steps(map: &impl ComplexMap, region: &GridField, horizon: usize) -> Vec<u32> {
    let (nx, ny) = region.resolution();
    let allowed: Vec<bool> = region.tags().iter().map(|t| *t != Tag::Out).collect();
    let b = *region.bbox();
    let (sx, sy) = (1.0 / region.dx(), 1.0 / region.dy());
    let (fx, fy) = (nx as f64, ny as f64);
    let leaves = |z: C64| {
        let x = (z.re - b.min[0]) * sx;
        let y = (z.im - b.min[1]) * sy;
        !(x >= 0.0 && y >= 0.0 && x < fx && y < fy && allowed[y as usize * nx + x as usize])
    };
    (0..ny)
        .into_par_iter()
        .flat_map_iter(|j| {
            let starts: Vec<C64> = (0..nx).filter(|&i| allowed[j * nx + i]).map(|i| region.center(i, j)).collect();
            let mut steps = exit_steps(map, &starts, horizon, leaves).into_iter();
            let allowed = &allowed;
            (0..nx)
                .map(move |i| if allowed[j * nx + i] { steps.next().unwrap_or(0) } else { 0 })
                .collect::<Vec<u32>>()
        })
        .collect()
}

/// Builds the restricted field for `horizon` from precomputed exit steps
/// (valid for any horizon up to the one used to compute them).
pub fn restricted_from_steps(base: &GridField, steps: &[u32], horizon: usize) -> Result<GridField> {
    let (nx, ny) = base.resolution();
    if steps.len() != nx * ny {
        return Err(Error::GridMismatch("exit steps do not match base grid".into()));
    }
    let confined = |k: usize| base.tags()[k] == Tag::In && steps[k] as u64 > horizon as u64;
    let start = base.cell_of(C64::new(0.0, 0.0)).ok_or(Error::ZeroComponent)?;
    if !confined(start.1 * nx + start.0) {
        return Err(Error::ZeroComponent);
    }
    let mut seen = vec![false; nx * ny];
    let mut stack = vec![start];
    seen[start.1 * nx + start.0] = true;
    while let Some((i, j)) = stack.pop() {
        let nb = [
            (i > 0).then(|| (i - 1, j)),
            (i + 1 < nx).then(|| (i + 1, j)),
            (j > 0).then(|| (i, j - 1)),
            (j + 1 < ny).then(|| (i, j + 1)),
        ];
        for (a, b) in nb.into_iter().flatten() {
            let k = b * nx + a;
            if !seen[k] && confined(k) {
                seen[k] = true;
                stack.push((a, b));
            }
        }
    }
    let tags = base
        .tags()
        .iter()
        .zip(&seen)
        .map(|(t, s)| match t {
            Tag::Undecided => Tag::Undecided,
            _ if *s => Tag::In,
            _ => Tag::Out,
        })
        .collect();
    GridField::from_tags(*base.bbox(), nx, ny, tags)
}

/// Confinement surrogate for the Siegel disk of `map` restricted to the
/// marked region of `base_disk`.
pub fn restricted_siegel_field(map: &impl ComplexMap, base_disk: &GridField, horizon: usize) -> Result<GridField> {
    let steps = confinement_steps(map, base_disk, horizon);
    restricted_from_steps(base_disk, &steps, horizon)
}
