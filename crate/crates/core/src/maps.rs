//! The polynomial families studied by the lab, their critical and fixed-point
//! structure, orbits, root finding and the fixed domain `V` used by the
//! Inou–Shishikura class.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cfrac::RotationNumber;
use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Quadratic coefficient of `Q_alpha`.
pub const IS_QUADRATIC_COEFF: f64 = 27.0 / 16.0;
/// Finite critical value shared by `Q_alpha` and the class `IS_0`.
pub const IS_CRITICAL_VALUE: f64 = -4.0 / 27.0;

/// Anything that can be iterated pointwise.
pub trait ComplexMap: Sync {
    fn apply(&self, z: C64) -> C64;

    /// Advances a batch of independent points; override for a vectorized path.
    fn apply_lanes(&self, re: &mut [f64; LANES], im: &mut [f64; LANES]) {
        for (r, i) in re.iter_mut().zip(im.iter_mut()) {
            let w = self.apply(C64::new(*r, *i));
            *r = w.re;
            *i = w.im;
        }
    }
}

impl<F: Fn(C64) -> C64 + Sync> ComplexMap for F {
    fn apply(&self, z: C64) -> C64 {
        self(z)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Family {
    /// `e^{2 pi i theta} z + z^2`
    QuadBc,
    /// `e^{2 pi i theta} z (1 + z)^2`
    CubicSiegel,
    /// `e^{2 pi i alpha} z + (27/16) e^{4 pi i alpha} z^2`
    QuadIs,
    /// `e^{2 pi i theta} z + z^2 + epsilon z^degree`
    PerturbedQuad { epsilon: f64, degree: u32 },
}

/// Serializable map description; rotation numbers travel as digit streams.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum MapDescriptor {
    QuadBc { theta: RotationNumber },
    CubicSiegel { theta: RotationNumber },
    QuadIs { alpha: RotationNumber },
    PerturbedQuad { theta: RotationNumber, epsilon: f64, degree: u32 },
}

impl MapDescriptor {
    pub fn rotation(&self) -> &RotationNumber {
        match self {
            MapDescriptor::QuadBc { theta }
            | MapDescriptor::CubicSiegel { theta }
            | MapDescriptor::PerturbedQuad { theta, .. } => theta,
            MapDescriptor::QuadIs { alpha } => alpha,
        }
    }

    pub fn build(&self) -> Result<PolynomialMap> {
        let t = self.rotation().to_f64();
        match *self {
            MapDescriptor::QuadBc { .. } => Ok(PolynomialMap::quad_bc(t)),
            MapDescriptor::CubicSiegel { .. } => Ok(PolynomialMap::cubic_siegel(t)),
            MapDescriptor::QuadIs { .. } => Ok(PolynomialMap::quad_is(t)),
            MapDescriptor::PerturbedQuad { epsilon, degree, .. } => {
                PolynomialMap::perturbed_quad(t, epsilon, degree)
            }
        }
        .map(|m| m.with_descriptor(self.clone()))
    }
}

/// One member of the supported families with its coefficients precomputed.
#[derive(Clone, Debug)]
pub struct PolynomialMap {
    family: Family,
    theta: f64,
    lambda: C64,
    coeffs: Vec<C64>,
    dcoeffs: Vec<C64>,
    descriptor: Option<MapDescriptor>,
}

pub fn rotation_multiplier(theta: f64) -> C64 {
    C64::from_polar(1.0, 2.0 * PI * theta)
}

impl PolynomialMap {
    fn from_parts(family: Family, theta: f64, coeffs: Vec<C64>) -> Self {
        let dcoeffs = coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c * k as f64)
            .collect();
        PolynomialMap {
            family,
            theta,
            lambda: rotation_multiplier(theta),
            coeffs,
            dcoeffs,
            descriptor: None,
        }
    }

    pub fn quad_bc(theta: f64) -> Self {
        let l = rotation_multiplier(theta);
        Self::from_parts(Family::QuadBc, theta, vec![C64::new(0.0, 0.0), l, C64::new(1.0, 0.0)])
    }

    pub fn cubic_siegel(theta: f64) -> Self {
        let l = rotation_multiplier(theta);
        Self::from_parts(Family::CubicSiegel, theta, vec![C64::new(0.0, 0.0), l, 2.0 * l, l])
    }

    pub fn quad_is(alpha: f64) -> Self {
        let l = rotation_multiplier(alpha);
        let a = IS_QUADRATIC_COEFF * l * l;
        Self::from_parts(Family::QuadIs, alpha, vec![C64::new(0.0, 0.0), l, a])
    }

    pub fn perturbed_quad(theta: f64, epsilon: f64, degree: u32) -> Result<Self> {
        if !(3..=8).contains(&degree) {
            return Err(Error::InvalidPolynomial(format!("degree {degree} outside 3..=8")));
        }
        let l = rotation_multiplier(theta);
        let mut coeffs = vec![C64::new(0.0, 0.0); degree as usize + 1];
        coeffs[1] = l;
        coeffs[2] = C64::new(1.0, 0.0);
        coeffs[degree as usize] += C64::new(epsilon, 0.0);
        if epsilon == 0.0 {
            coeffs.truncate(3);
        }
        Ok(Self::from_parts(Family::PerturbedQuad { epsilon, degree }, theta, coeffs))
    }

    pub fn with_descriptor(mut self, d: MapDescriptor) -> Self {
        self.descriptor = Some(d);
        self
    }

    pub fn descriptor(&self) -> Option<&MapDescriptor> {
        self.descriptor.as_ref()
    }

    pub fn family(&self) -> Family {
        self.family
    }

    /// Rotation parameter `theta` (or `alpha`).
    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// Multiplier `e^{2 pi i theta}` at the fixed point 0.
    pub fn lambda(&self) -> C64 {
        self.lambda
    }

    /// Coefficients in ascending order; `coeffs()[0] == 0`.
    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    #[inline]
    pub fn eval(&self, z: C64) -> C64 {
        // every family fixes 0
        match *self.coeffs.as_slice() {
            [_, a, b] => z * (a + b * z),
            [_, a, b, c] => z * (a + z * (b + c * z)),
            _ => z * horner(&self.coeffs[1..], z),
        }
    }

    #[inline]
    pub fn deriv(&self, z: C64) -> C64 {
        horner(&self.dcoeffs, z)
    }

    /// Finite critical points with their values, sorted by real part.
    pub fn critical_points(&self) -> Result<Vec<(C64, C64)>> {
        let l = self.lambda;
        let mut out = match self.family {
            Family::QuadBc => vec![(-l / 2.0, -(l * l) / 4.0)],
            Family::CubicSiegel => vec![
                (C64::new(-1.0, 0.0), C64::new(0.0, 0.0)),
                (C64::new(-1.0 / 3.0, 0.0), l * IS_CRITICAL_VALUE),
            ],
            Family::QuadIs => vec![(-(8.0 / 27.0) / l, C64::new(IS_CRITICAL_VALUE, 0.0))],
            Family::PerturbedQuad { .. } => polynomial_roots(&self.dcoeffs)?
                .into_iter()
                .map(|c| (c, self.eval(c)))
                .collect(),
        };
        out.sort_by(|a, b| a.0.re.total_cmp(&b.0.re).then(a.0.im.total_cmp(&b.0.im)));
        Ok(out)
    }

    /// Fixed points other than 0.
    pub fn nonzero_fixed_points(&self) -> Result<Vec<C64>> {
        if self.theta.fract() == 0.0 {
            return Err(Error::DegenerateParameter);
        }
        let l = self.lambda;
        let one = C64::new(1.0, 0.0);
        Ok(match self.family {
            Family::QuadBc => vec![one - l],
            Family::CubicSiegel => {
                let s = rotation_multiplier(-self.theta / 2.0);
                vec![s - one, -s - one]
            }
            Family::QuadIs => vec![(16.0 / 27.0) * (one - l) / (l * l)],
            Family::PerturbedQuad { .. } => {
                // (f(z) - z) / z
                let mut q: Vec<C64> = self.coeffs[1..].to_vec();
                q[0] -= one;
                polynomial_roots(&q)?
            }
        })
    }

    pub fn orbit(&self, z0: C64, horizon: usize, r_escape: f64, restrict_to_v: bool) -> OrbitRecord {
        let mut points = Vec::with_capacity(horizon.min(1 << 16) + 1);
        let mut z = z0;
        let mut escaped = false;
        let mut escape_index = None;
        let mut left_domain = None;
        for k in 0..=horizon {
            points.push(z);
            if z.norm() > r_escape || !z.is_finite() {
                escaped = true;
                escape_index = Some(k);
                break;
            }
            if restrict_to_v && !is_in_v(z) {
                left_domain = Some(k);
                break;
            }
            if k == horizon {
                break;
            }
            z = self.eval(z);
        }
        OrbitRecord { points, escaped, escape_index, left_domain }
    }

    /// Number of solutions of `map(z) = w` (with multiplicity) inside `region`.
    pub fn count_preimages_in(&self, w: C64, region: impl Fn(C64) -> bool) -> Result<usize> {
        Ok(self.preimages(w)?.into_iter().filter(|z| region(*z)).count())
    }

    /// All solutions of `map(z) = w`, repeated by multiplicity.
    pub fn preimages(&self, w: C64) -> Result<Vec<C64>> {
        let mut c = self.coeffs.clone();
        c[0] -= w;
        polynomial_roots(&c)
    }
}

impl ComplexMap for PolynomialMap {
    #[inline]
    fn apply(&self, z: C64) -> C64 {
        self.eval(z)
    }

    fn apply_lanes(&self, re: &mut [f64; LANES], im: &mut [f64; LANES]) {
        let mut ar = [0.0; LANES];
        let mut ai = [0.0; LANES];
        for c in self.coeffs[1..].iter().rev() {
            for l in 0..LANES {
                let r = ar[l] * re[l] - ai[l] * im[l] + c.re;
                let i = ar[l] * im[l] + ai[l] * re[l] + c.im;
                ar[l] = r;
                ai[l] = i;
            }
        }
        for l in 0..LANES {
            let r = ar[l] * re[l] - ai[l] * im[l];
            let i = ar[l] * im[l] + ai[l] * re[l];
            re[l] = r;
            im[l] = i;
        }
    }
}

/// Orbit lanes advanced together so independent iterations overlap.
pub const LANES: usize = 16;

/// First step `k` in `1..=horizon` at which `stop(f^k(z))` holds, for each
/// start; `u32::MAX` if none does.
pub fn exit_steps(map: &impl ComplexMap, starts: &[C64], horizon: usize, stop: impl Fn(C64) -> bool) -> Vec<u32> {
    let mut out = vec![u32::MAX; starts.len()];
    for (chunk, res) in starts.chunks(LANES).zip(out.chunks_mut(LANES)) {
        let mut re = [0.0; LANES];
        let mut im = [0.0; LANES];
        for (l, z) in chunk.iter().enumerate() {
            re[l] = z.re;
            im[l] = z.im;
        }
        let mut live = chunk.len();
        for step in 1..=horizon {
            map.apply_lanes(&mut re, &mut im);
            for (l, r) in res.iter_mut().enumerate() {
                if *r == u32::MAX && stop(C64::new(re[l], im[l])) {
                    *r = step as u32;
                    live -= 1;
                }
            }
            if live == 0 {
                break;
            }
        }
    }
    out
}

#[inline]
pub fn horner(coeffs: &[C64], z: C64) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for c in coeffs.iter().rev() {
        acc = acc * z + c;
    }
    acc
}

#[derive(Clone, Debug, PartialEq)]
pub struct OrbitRecord {
    pub points: Vec<C64>,
    pub escaped: bool,
    pub escape_index: Option<usize>,
    pub left_domain: Option<usize>,
}

/// The ellipse `E` and the domain `V = g(C \ E)`, `g(w) = -4w/(1+w)^2`.
#[derive(Clone, Copy, Debug, Default)]
pub struct IsDomain;

impl IsDomain {
    pub const CENTER: f64 = -0.18;
    pub const SEMI_X: f64 = 1.24;
    pub const SEMI_Y: f64 = 1.04;

    /// Closed ellipse test; boundary counts as inside.
    pub fn in_ellipse(w: C64) -> bool {
        let x = (w.re - Self::CENTER) / Self::SEMI_X;
        let y = w.im / Self::SEMI_Y;
        x * x + y * y <= 1.0
    }

    pub fn g(w: C64) -> C64 {
        let d = C64::new(1.0, 0.0) + w;
        -4.0 * w / (d * d)
    }

    pub fn contains(z: C64) -> bool {
        is_in_v(z)
    }

    /// `g` applied to `m` equally spaced points of the ellipse boundary.
    pub fn boundary(m: usize) -> Vec<C64> {
        (0..m)
            .map(|k| {
                let t = 2.0 * PI * k as f64 / m as f64;
                Self::g(C64::new(Self::CENTER + Self::SEMI_X * t.cos(), Self::SEMI_Y * t.sin()))
            })
            .collect()
    }
}

/// `z` lies in `V` iff a root of `z w^2 + (2z + 4) w + z = 0` lies outside `E`.
pub fn is_in_v(z: C64) -> bool {
    if z == C64::new(0.0, 0.0) {
        return true;
    }
    // roots are (-(z+2) +- 2 sqrt(z+1)) / z with product 1
    let b = z + 2.0;
    let s = 2.0 * (z + 1.0).sqrt();
    let num = if (b + s).norm_sqr() >= (b - s).norm_sqr() { -(b + s) } else { -(b - s) };
    let w_big = num / z;
    if !w_big.is_finite() {
        return true;
    }
    let w_small = if w_big.norm() == 0.0 { w_big } else { C64::new(1.0, 0.0) / w_big };
    !IsDomain::in_ellipse(w_big) || !IsDomain::in_ellipse(w_small)
}

const ROOT_MAX_ITER: usize = 600;
pub const ROOT_CLUSTER_TOL: f64 = 1e-7;

/// All complex roots (with multiplicity) of `sum coeffs[k] z^k` by
/// Aberth–Ehrlich simultaneous iteration from a fixed initial circle.
pub fn polynomial_roots(coeffs: &[C64]) -> Result<Vec<C64>> {
    let mut c: Vec<C64> = coeffs.to_vec();
    while c.last().is_some_and(|a| *a == C64::new(0.0, 0.0)) {
        c.pop();
    }
    if c.is_empty() {
        return Err(Error::InvalidPolynomial("zero polynomial".into()));
    }
    if c.len() > 9 {
        return Err(Error::InvalidPolynomial(format!("degree {} > 8", c.len() - 1)));
    }
    let zeros = c.iter().take_while(|a| **a == C64::new(0.0, 0.0)).count();
    let mut roots = vec![C64::new(0.0, 0.0); zeros];
    let c = &c[zeros..];
    let n = c.len() - 1;
    if n == 0 {
        return Ok(roots);
    }
    let lead = c[n];
    let monic: Vec<C64> = c.iter().map(|a| a / lead).collect();
    let dmonic: Vec<C64> = monic.iter().enumerate().skip(1).map(|(k, a)| a * k as f64).collect();
    let abs_coeffs: Vec<f64> = monic.iter().map(|a| a.norm()).collect();

    let centroid = -monic[n - 1] / n as f64;
    let radius = (1..=n)
        .map(|k| abs_coeffs[n - k].powf(1.0 / k as f64))
        .fold(0.0f64, f64::max)
        .max(1e-3);
    let mut z: Vec<C64> = (0..n)
        .map(|k| centroid + C64::from_polar(radius, 2.0 * PI * k as f64 / n as f64 + 0.4))
        .collect();

    let backward_ok = |zi: C64, pz: C64| {
        let scale = horner_abs(&abs_coeffs, zi.norm());
        pz.norm() <= 8.0 * f64::EPSILON * scale
    };

    let mut converged = vec![false; n];
    let mut iterations = 0;
    while iterations < ROOT_MAX_ITER && converged.iter().any(|c| !c) {
        iterations += 1;
        for i in 0..n {
            if converged[i] {
                continue;
            }
            let pz = horner(&monic, z[i]);
            if pz == C64::new(0.0, 0.0) || backward_ok(z[i], pz) {
                converged[i] = true;
                continue;
            }
            let ratio = pz / horner(&dmonic, z[i]);
            let repulsion: C64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| C64::new(1.0, 0.0) / (z[i] - z[j]))
                .sum();
            let step = ratio / (C64::new(1.0, 0.0) - ratio * repulsion);
            if !step.is_finite() {
                continue;
            }
            z[i] -= step;
            if step.norm() <= 4.0 * f64::EPSILON * z[i].norm() {
                converged[i] = true;
            }
        }
    }

    let max_coeff = c.iter().map(|a| a.norm()).fold(0.0, f64::max);
    for &zi in &z {
        let residual = horner(c, zi).norm();
        let rounding = 16.0 * f64::EPSILON * horner_abs(&c.iter().map(|a| a.norm()).collect::<Vec<_>>(), zi.norm());
        if !zi.is_finite() || residual > (1e-10 * max_coeff).max(rounding) {
            return Err(Error::NoConvergence { iterations });
        }
    }
    roots.extend(z);
    Ok(roots)
}

fn horner_abs(abs_coeffs: &[f64], r: f64) -> f64 {
    abs_coeffs.iter().rev().fold(0.0, |acc, a| acc * r + a)
}

/// Groups roots closer than `ROOT_CLUSTER_TOL` (relative) into
/// `(mean, multiplicity)` pairs.
pub fn cluster_roots(roots: &[C64]) -> Vec<(C64, usize)> {
    let mut clusters: Vec<(C64, usize)> = Vec::new();
    for &r in roots {
        let hit = clusters.iter_mut().find(|(c, m)| {
            let center = *c / *m as f64;
            (center - r).norm() <= ROOT_CLUSTER_TOL * (1.0 + center.norm().max(r.norm())).max(1.0)
        });
        match hit {
            Some((sum, m)) => {
                *sum += r;
                *m += 1;
            }
            None => clusters.push((r, 1)),
        }
    }
    clusters.into_iter().map(|(s, m)| (s / m as f64, m)).collect()
}

/// Radii `(R, R')` for the quadratic-like restriction of `P_theta`: `D_R`
/// contains every critical value, and both `P^{-1}(D_R)` and `P^{-1}(D_{R'})`
/// are compactly inside `D_R`, with `R' = 2R`. Doubling search from `start`.
pub fn quadratic_like_radius(thetas: &[f64], start: f64, max_doublings: usize) -> Result<(f64, f64)> {
    const SAMPLES: usize = 256;
    let mut r = start;
    for _ in 0..=max_doublings {
        let ok = thetas.iter().all(|&t| {
            let p = PolynomialMap::quad_bc(t);
            let cv_inside = p
                .critical_points()
                .map(|cps| cps.iter().all(|(_, v)| v.norm() < r))
                .unwrap_or(false);
            cv_inside
                && [r, 2.0 * r].iter().all(|&level| {
                    preimage_max_modulus(&p, level, SAMPLES).is_some_and(|m| m < r)
                })
        });
        if ok {
            return Ok((r, 2.0 * r));
        }
        r *= 2.0;
    }
    Err(Error::NoConvergence { iterations: max_doublings })
}

/// Largest `|z|` over preimages of the circle `|w| = level`.
pub fn preimage_max_modulus(map: &PolynomialMap, level: f64, samples: usize) -> Option<f64> {
    let mut best = 0.0f64;
    for k in 0..samples {
        let w = C64::from_polar(level, 2.0 * PI * k as f64 / samples as f64);
        let pre = map.preimages(w).ok()?;
        for z in pre {
            best = best.max(z.norm());
        }
    }
    Some(best)
}
