//! Pixel-grid measurement: tagged rasters over a complex rectangle, filled
//! Julia sets, distance-confinement sets `K(delta)`, densities, density
//! profiles and box-counting dimension.

use std::io::{Read, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::maps::{exit_steps, ComplexMap, C64};

/// Per-cell classification.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum Tag {
    Out = 0,
    In = 1,
    Undecided = 2,
}

impl Tag {
    fn from_bits(b: u8) -> Result<Tag> {
        match b {
            0 => Ok(Tag::Out),
            1 => Ok(Tag::In),
            2 => Ok(Tag::Undecided),
            _ => Err(Error::MalformedRaster(format!("tag code {b}"))),
        }
    }
}

/// Axis-aligned rectangle in the complex plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bbox {
    pub min: [f64; 2],
    pub max: [f64; 2],
}

impl Bbox {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Self {
        Bbox { min: [re_min, im_min], max: [re_max, im_max] }
    }

    /// Square box of half-width `half` around `center`.
    pub fn square(center: C64, half: f64) -> Self {
        Self::new(center.re - half, center.re + half, center.im - half, center.im + half)
    }

    pub fn width(&self) -> f64 {
        self.max[0] - self.min[0]
    }

    pub fn height(&self) -> f64 {
        self.max[1] - self.min[1]
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn contains(&self, z: C64) -> bool {
        z.re >= self.min[0] && z.re <= self.max[0] && z.im >= self.min[1] && z.im <= self.max[1]
    }

    /// Smallest box holding all points, grown by `margin` on every side.
    pub fn around(points: &[C64], margin: f64) -> Self {
        let mut b = Bbox::new(f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for p in points {
            b.min[0] = b.min[0].min(p.re);
            b.max[0] = b.max[0].max(p.re);
            b.min[1] = b.min[1].min(p.im);
            b.max[1] = b.max[1].max(p.im);
        }
        Bbox::new(b.min[0] - margin, b.max[0] + margin, b.min[1] - margin, b.max[1] + margin)
    }
}

/// Rectangular raster; row `j = 0` is the bottom row (smallest imaginary part).
#[derive(Clone, Debug, PartialEq)]
pub struct GridField {
    bbox: Bbox,
    nx: usize,
    ny: usize,
    tags: Vec<Tag>,
}

impl GridField {
    pub fn filled(bbox: Bbox, nx: usize, ny: usize, tag: Tag) -> Self {
        GridField { bbox, nx, ny, tags: vec![tag; nx * ny] }
    }

    pub fn from_tags(bbox: Bbox, nx: usize, ny: usize, tags: Vec<Tag>) -> Result<Self> {
        if tags.len() != nx * ny || nx == 0 || ny == 0 {
            return Err(Error::GridMismatch(format!("{} tags for {nx}x{ny}", tags.len())));
        }
        Ok(GridField { bbox, nx, ny, tags })
    }

    /// Tags each cell by evaluating `f` at its center, rows in parallel.
    pub fn from_fn(bbox: Bbox, nx: usize, ny: usize, f: impl Fn(C64) -> Tag + Sync) -> Self {
        let proto = GridField { bbox, nx, ny, tags: Vec::new() };
        let tags = (0..ny)
            .into_par_iter()
            .flat_map_iter(|j| {
                let p = &proto;
                let f = &f;
                (0..nx).map(move |i| f(p.center(i, j)))
            })
            .collect();
        GridField { tags, ..proto }
    }

    pub fn bbox(&self) -> &Bbox {
        &self.bbox
    }

    pub fn resolution(&self) -> (usize, usize) {
        (self.nx, self.ny)
    }

    pub fn dx(&self) -> f64 {
        self.bbox.width() / self.nx as f64
    }

    pub fn dy(&self) -> f64 {
        self.bbox.height() / self.ny as f64
    }

    pub fn cell_area(&self) -> f64 {
        self.bbox.area() / (self.nx * self.ny) as f64
    }

    pub fn tags(&self) -> &[Tag] {
        &self.tags
    }

    #[inline]
    pub fn tag(&self, i: usize, j: usize) -> Tag {
        self.tags[j * self.nx + i]
    }

    pub fn set(&mut self, i: usize, j: usize, t: Tag) {
        self.tags[j * self.nx + i] = t;
    }

    #[inline]
    pub fn center(&self, i: usize, j: usize) -> C64 {
        C64::new(
            self.bbox.min[0] + (i as f64 + 0.5) * self.dx(),
            self.bbox.min[1] + (j as f64 + 0.5) * self.dy(),
        )
    }

    /// Cell containing `z`, if inside the box.
    #[inline]
    pub fn cell_of(&self, z: C64) -> Option<(usize, usize)> {
        let x = (z.re - self.bbox.min[0]) / self.dx();
        let y = (z.im - self.bbox.min[1]) / self.dy();
        if x >= 0.0 && y >= 0.0 && x < self.nx as f64 && y < self.ny as f64 {
            Some((x as usize, y as usize))
        } else {
            None
        }
    }

    /// `(in, out, undecided)` counts.
    pub fn counts(&self) -> (usize, usize, usize) {
        self.tags.iter().fold((0, 0, 0), |(a, b, c), t| match t {
            Tag::In => (a + 1, b, c),
            Tag::Out => (a, b + 1, c),
            Tag::Undecided => (a, b, c + 1),
        })
    }

    pub fn same_grid(&self, other: &GridField) -> bool {
        self.bbox == other.bbox && self.nx == other.nx && self.ny == other.ny
    }

    /// In-cells having a 4-neighbor that is an out-cell.
    pub fn boundary_cells(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for j in 0..self.ny {
            for i in 0..self.nx {
                if self.tag(i, j) != Tag::In {
                    continue;
                }
                let nb = [
                    (i > 0).then(|| (i - 1, j)),
                    (i + 1 < self.nx).then(|| (i + 1, j)),
                    (j > 0).then(|| (i, j - 1)),
                    (j + 1 < self.ny).then(|| (i, j + 1)),
                ];
                if nb.iter().flatten().any(|&(a, b)| self.tag(a, b) == Tag::Out) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// "GF01" raster: magic, bbox as four little-endian f64
    /// (re_min, im_min, re_max, im_max), nx and ny as little-endian u32, then
    /// 2-bit tags packed row-major, four per byte, lowest bits first.
    pub fn write_gf01(&self, mut w: impl Write) -> Result<()> {
        w.write_all(b"GF01")?;
        for v in [self.bbox.min[0], self.bbox.min[1], self.bbox.max[0], self.bbox.max[1]] {
            w.write_all(&v.to_le_bytes())?;
        }
        w.write_all(&(self.nx as u32).to_le_bytes())?;
        w.write_all(&(self.ny as u32).to_le_bytes())?;
        let packed: Vec<u8> = self
            .tags
            .chunks(4)
            .map(|c| c.iter().enumerate().fold(0u8, |acc, (k, t)| acc | ((*t as u8) << (2 * k))))
            .collect();
        w.write_all(&packed)?;
        Ok(())
    }

    pub fn read_gf01(mut r: impl Read) -> Result<Self> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != b"GF01" {
            return Err(Error::MalformedRaster("bad magic".into()));
        }
        let mut f = [0u8; 8];
        let mut vals = [0.0; 4];
        for v in &mut vals {
            r.read_exact(&mut f)?;
            *v = f64::from_le_bytes(f);
        }
        let mut u = [0u8; 4];
        r.read_exact(&mut u)?;
        let nx = u32::from_le_bytes(u) as usize;
        r.read_exact(&mut u)?;
        let ny = u32::from_le_bytes(u) as usize;
        let mut packed = vec![0u8; (nx * ny).div_ceil(4)];
        r.read_exact(&mut packed)?;
        let tags = (0..nx * ny)
            .map(|k| Tag::from_bits((packed[k / 4] >> (2 * (k % 4))) & 3))
            .collect::<Result<_>>()?;
        let bbox = Bbox { min: [vals[0], vals[1]], max: [vals[2], vals[3]] };
        GridField::from_tags(bbox, nx, ny, tags)
    }

    /// Binary PPM with the top image row at the largest imaginary part;
    /// in = black, out = white, undecided = gray.
    pub fn write_ppm(&self, mut w: impl Write) -> Result<()> {
        write!(w, "P6\n{} {}\n255\n", self.nx, self.ny)?;
        let mut row = Vec::with_capacity(3 * self.nx);
        for j in (0..self.ny).rev() {
            row.clear();
            for i in 0..self.nx {
                let v = match self.tag(i, j) {
                    Tag::In => 0u8,
                    Tag::Out => 255,
                    Tag::Undecided => 128,
                };
                row.extend_from_slice(&[v, v, v]);
            }
            w.write_all(&row)?;
        }
        Ok(())
    }
}

/// Area of the in-cells, with the undecided mass alongside.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AreaEstimate {
    pub value: f64,
    pub undecided_mass: f64,
}

pub fn area(field: &GridField) -> AreaEstimate {
    let (n_in, _, n_und) = field.counts();
    AreaEstimate {
        value: field.cell_area() * n_in as f64,
        undecided_mass: field.cell_area() * n_und as f64,
    }
}

/// `area(U ∩ X) / area(U)` with the number of cells dropped because either
/// field marked them undecided.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Density {
    pub value: f64,
    pub excluded_cells: usize,
}

pub fn dens(u: &GridField, x: &GridField) -> Result<Density> {
    if !u.same_grid(x) {
        return Err(Error::GridMismatch("dens needs identical grids".into()));
    }
    let (mut n_u, mut n_ux, mut excluded) = (0usize, 0usize, 0usize);
    for (a, b) in u.tags.iter().zip(&x.tags) {
        match (a, b) {
            (Tag::Undecided, _) | (_, Tag::Undecided) => excluded += 1,
            (Tag::In, Tag::In) => {
                n_u += 1;
                n_ux += 1;
            }
            (Tag::In, Tag::Out) => n_u += 1,
            _ => {}
        }
    }
    if n_u == 0 {
        return Err(Error::EmptyU);
    }
    Ok(Density { value: n_ux as f64 / n_u as f64, excluded_cells: excluded })
}

/// Intersection of in-sets; undecided wins over in, out wins over both.
pub fn intersect(a: &GridField, b: &GridField) -> Result<GridField> {
    if !a.same_grid(b) {
        return Err(Error::GridMismatch("intersect needs identical grids".into()));
    }
    let tags = a
        .tags
        .iter()
        .zip(&b.tags)
        .map(|(x, y)| match (x, y) {
            (Tag::Out, _) | (_, Tag::Out) => Tag::Out,
            (Tag::In, Tag::In) => Tag::In,
            _ => Tag::Undecided,
        })
        .collect();
    Ok(GridField { tags, ..a.clone() })
}

/// Cells whose center orbit stays in `|z| <= r_escape` for `horizon` steps.
pub fn filled_julia_grid(
    map: &impl ComplexMap,
    bbox: Bbox,
    nx: usize,
    ny: usize,
    horizon: usize,
    r_escape: f64,
) -> Result<GridField> {
    let r2 = r_escape * r_escape;
    let proto = GridField::filled(bbox, nx, ny, Tag::Out);
    let tags = (0..ny)
        .into_par_iter()
        .flat_map_iter(|j| {
            let starts: Vec<C64> = (0..nx).map(|i| proto.center(i, j)).collect();
            let steps = exit_steps(map, &starts, horizon, |z| !(z.norm_sqr() <= r2));
            starts
                .into_iter()
                .zip(steps)
                .map(|(z, s)| if z.norm_sqr() <= r2 && s == u32::MAX { Tag::In } else { Tag::Out })
                .collect::<Vec<Tag>>()
        })
        .collect();
    let field = GridField { tags, ..proto };
    let touches = (0..nx).any(|i| field.tag(i, 0) == Tag::In || field.tag(i, ny - 1) == Tag::In)
        || (0..ny).any(|j| field.tag(0, j) == Tag::In || field.tag(nx - 1, j) == Tag::In);
    if touches {
        return Err(Error::BboxTooSmall);
    }
    Ok(field)
}

/// Crossing abscissae of the closed polyline with the horizontal line `y`,
/// sorted.
fn crossings(poly: &[C64], y: f64) -> Vec<f64> {
    let mut xs = Vec::new();
    let n = poly.len();
    for k in 0..n {
        let a = poly[k];
        let b = poly[(k + 1) % n];
        if (a.im <= y) != (b.im <= y) {
            let t = (y - a.im) / (b.im - a.im);
            xs.push(a.re + t * (b.re - a.re));
        }
    }
    xs.sort_by(f64::total_cmp);
    xs
}

/// Even-odd membership of the cell-center lattice (or corner lattice when
/// `corners`) in the closed polyline.
fn inside_lattice(poly: &[C64], bbox: &Bbox, nx: usize, ny: usize, corners: bool) -> Vec<bool> {
    let (cols, rows, off) = if corners { (nx + 1, ny + 1, 0.0) } else { (nx, ny, 0.5) };
    let dx = bbox.width() / nx as f64;
    let dy = bbox.height() / ny as f64;
    let mut out = vec![false; cols * rows];
    out.par_chunks_mut(cols).enumerate().for_each(|(j, row)| {
        let y = bbox.min[1] + (j as f64 + off) * dy;
        let xs = crossings(poly, y);
        for pair in xs.chunks_exact(2) {
            let i0 = ((pair[0] - bbox.min[0]) / dx - off).ceil().max(0.0) as usize;
            let i1 = ((pair[1] - bbox.min[0]) / dx - off).floor();
            if i1 < 0.0 {
                continue;
            }
            let i1 = (i1 as usize).min(cols - 1);
            for v in row.iter_mut().take(i1 + 1).skip(i0) {
                *v = true;
            }
        }
    });
    out
}

/// Cell-center rasterization of the region bounded by a closed polyline.
/// Cells whose corners and center disagree are tagged undecided.
pub fn polygon_field(poly: &[C64], bbox: Bbox, nx: usize, ny: usize) -> GridField {
    let centers = inside_lattice(poly, &bbox, nx, ny, false);
    let corners = inside_lattice(poly, &bbox, nx, ny, true);
    let mut tags = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let c = centers[j * nx + i];
            let k = [
                corners[j * (nx + 1) + i],
                corners[j * (nx + 1) + i + 1],
                corners[(j + 1) * (nx + 1) + i],
                corners[(j + 1) * (nx + 1) + i + 1],
            ];
            tags.push(if k.iter().all(|&v| v == c) {
                if c {
                    Tag::In
                } else {
                    Tag::Out
                }
            } else {
                Tag::Undecided
            });
        }
    }
    GridField { bbox, nx, ny, tags }
}

/// Even-odd point-in-polygon test.
pub fn point_in_polygon(poly: &[C64], z: C64) -> bool {
    let xs = crossings(poly, z.im);
    xs.iter().filter(|&&x| x < z.re).count() % 2 == 1
}

/// Winding number of a closed polyline about `z`.
pub fn winding_number(poly: &[C64], z: C64) -> i32 {
    let mut total = 0.0;
    let n = poly.len();
    for k in 0..n {
        let a = poly[k] - z;
        let b = poly[(k + 1) % n] - z;
        total += (b / a).arg();
    }
    (total / (2.0 * std::f64::consts::PI)).round() as i32
}

/// 1-D squared distance transform (lower envelope of parabolas) with sample
/// spacing `h`.
fn edt_1d(f: &[f64], h: f64, out: &mut [f64], v: &mut [usize], z: &mut [f64]) {
    let pos = |q: usize| q as f64 * h;
    let mut finite = f.iter().enumerate().filter(|(_, x)| x.is_finite()).map(|(q, _)| q);
    let Some(first) = finite.next() else {
        out.iter_mut().for_each(|o| *o = f64::INFINITY);
        return;
    };
    let meet = |p: usize, q: usize| {
        ((f[q] + pos(q) * pos(q)) - (f[p] + pos(p) * pos(p))) / (2.0 * (pos(q) - pos(p)))
    };
    let mut k = 0usize;
    v[0] = first;
    z[0] = f64::NEG_INFINITY;
    z[1] = f64::INFINITY;
    for q in finite {
        let mut s = meet(v[k], q);
        while s <= z[k] {
            k -= 1;
            s = meet(v[k], q);
        }
        k += 1;
        v[k] = q;
        z[k] = s;
        z[k + 1] = f64::INFINITY;
    }
    k = 0;
    for (q, o) in out.iter_mut().enumerate() {
        while z[k + 1] < pos(q) {
            k += 1;
        }
        let d = pos(q) - pos(v[k]);
        *o = d * d + f[v[k]];
    }
}

/// Exact Euclidean distance (at cell centers) to the nearest marked cell.
pub fn distance_transform(mask: &[bool], nx: usize, ny: usize, dx: f64, dy: f64) -> Vec<f64> {
    let mut grid: Vec<f64> = mask.iter().map(|&m| if m { 0.0 } else { f64::INFINITY }).collect();
    // columns
    let mut cols = vec![0.0; nx * ny];
    (0..nx)
        .into_par_iter()
        .map(|i| {
            let f: Vec<f64> = (0..ny).map(|j| grid[j * nx + i]).collect();
            let mut out = vec![0.0; ny];
            let mut v = vec![0usize; ny];
            let mut z = vec![0.0; ny + 1];
            edt_1d(&f, dy, &mut out, &mut v, &mut z);
            out
        })
        .collect::<Vec<_>>()
        .into_iter()
        .enumerate()
        .for_each(|(i, col)| {
            for (j, val) in col.into_iter().enumerate() {
                cols[j * nx + i] = val;
            }
        });
    // rows
    grid.par_chunks_mut(nx).enumerate().for_each(|(j, row)| {
        let f = &cols[j * nx..(j + 1) * nx];
        let mut v = vec![0usize; nx];
        let mut z = vec![0.0; nx + 1];
        edt_1d(f, dx, row, &mut v, &mut z);
    });
    grid.iter_mut().for_each(|d| *d = d.sqrt());
    grid
}

/// Distance field sampled at cell centers with bilinear lookup.
pub struct DistanceLookup {
    bbox: Bbox,
    nx: usize,
    ny: usize,
    dx: f64,
    dy: f64,
    values: Vec<f64>,
}

impl DistanceLookup {
    pub fn new(field: &GridField, mask: &[bool]) -> Self {
        let (nx, ny) = field.resolution();
        let values = distance_transform(mask, nx, ny, field.dx(), field.dy());
        DistanceLookup { bbox: field.bbox, nx, ny, dx: field.dx(), dy: field.dy(), values }
    }

    pub fn at_cell(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.nx + i]
    }

    /// Bilinear interpolation; infinity outside the lattice of centers.
    #[inline]
    pub fn at(&self, z: C64) -> f64 {
        let x = (z.re - self.bbox.min[0]) / self.dx - 0.5;
        let y = (z.im - self.bbox.min[1]) / self.dy - 0.5;
        if !(x >= 0.0 && y >= 0.0 && x <= (self.nx - 1) as f64 && y <= (self.ny - 1) as f64) {
            return f64::INFINITY;
        }
        let i = (x as usize).min(self.nx - 2);
        let j = (y as usize).min(self.ny - 2);
        let tx = x - i as f64;
        let ty = y - j as f64;
        let v = |a: usize, b: usize| self.values[b * self.nx + a];
        let lo = v(i, j) * (1.0 - tx) + v(i + 1, j) * tx;
        let hi = v(i, j + 1) * (1.0 - tx) + v(i + 1, j + 1) * tx;
        lo * (1.0 - ty) + hi * ty
    }
}

/// `K(delta)`: cells whose center orbit stays within `delta` of the region
/// bounded by `siegel_polyline` for `horizon` steps. Centers inside the
/// region are members outright (the region is invariant).
pub fn k_delta_field(
    map: &impl ComplexMap,
    delta: f64,
    siegel_polyline: &[C64],
    bbox: Bbox,
    nx: usize,
    ny: usize,
    horizon: usize,
) -> Result<GridField> {
    let domain = GridField::filled(bbox, nx, ny, Tag::Out);
    let dist = delta_domain(delta, siegel_polyline, &domain)?;
    Ok(k_delta_on(map, delta, siegel_polyline, &dist, domain, horizon))
}

/// `K(delta)` rasterized on a separate `window` grid; distances come from
/// the `domain` raster, which must hold the whole `delta`-neighborhood.
#[allow(clippy::too_many_arguments)]
pub fn k_delta_window(
    map: &impl ComplexMap,
    delta: f64,
    siegel_polyline: &[C64],
    domain: Bbox,
    domain_res: usize,
    window: Bbox,
    nx: usize,
    ny: usize,
    horizon: usize,
) -> Result<GridField> {
    let dist = delta_domain(delta, siegel_polyline, &GridField::filled(domain, domain_res, domain_res, Tag::Out))?;
    Ok(k_delta_on(map, delta, siegel_polyline, &dist, GridField::filled(window, nx, ny, Tag::Out), horizon))
}

fn delta_domain(delta: f64, siegel_polyline: &[C64], domain: &GridField) -> Result<DistanceLookup> {
    if delta <= 0.0 {
        return Err(Error::InvalidParameter("delta must be positive".into()));
    }
    let (nx, ny) = domain.resolution();
    let mask = inside_lattice(siegel_polyline, domain.bbox(), nx, ny, false);
    let dist = DistanceLookup::new(domain, &mask);
    let border = (0..nx)
        .flat_map(|i| [(i, 0), (i, ny - 1)])
        .chain((0..ny).flat_map(|j| [(0, j), (nx - 1, j)]));
    for (i, j) in border {
        if dist.at_cell(i, j) < delta {
            return Err(Error::BboxTooSmall);
        }
    }
    Ok(dist)
}

fn k_delta_on(
    map: &impl ComplexMap,
    delta: f64,
    siegel_polyline: &[C64],
    dist: &DistanceLookup,
    proto: GridField,
    horizon: usize,
) -> GridField {
    let (nx, ny) = proto.resolution();
    let mask = inside_lattice(siegel_polyline, proto.bbox(), nx, ny, false);
    let tags = (0..ny)
        .into_par_iter()
        .flat_map_iter(|j| {
            let (proto, mask) = (&proto, &mask);
            let todo: Vec<usize> =
                (0..nx).filter(|&i| !mask[j * nx + i] && dist.at(proto.center(i, j)) < delta).collect();
            let starts: Vec<C64> = todo.iter().map(|&i| proto.center(i, j)).collect();
            let steps = exit_steps(map, &starts, horizon, |z| !(dist.at(z) < delta));
            let mut row: Vec<Tag> = (0..nx).map(|i| if mask[j * nx + i] { Tag::In } else { Tag::Out }).collect();
            for (i, s) in todo.into_iter().zip(steps) {
                if s == u32::MAX {
                    row[i] = Tag::In;
                }
            }
            row
        })
        .collect();
    GridField { tags, ..proto }
}

/// `dens_{B(z, r)}(X)` for each radius, balls discretized by cell centers.
pub fn density_profile(z: C64, x: &GridField, radii: &[f64]) -> Result<Vec<f64>> {
    let side = x.dx().max(x.dy());
    radii
        .iter()
        .map(|&r| {
            if r < 3.0 * side {
                return Err(Error::RadiusBelowResolution { radius: r, min: 3.0 * side });
            }
            let b = x.bbox();
            if z.re - r < b.min[0] || z.re + r > b.max[0] || z.im - r < b.min[1] || z.im + r > b.max[1] {
                return Err(Error::BallOutsideBbox);
            }
            let i0 = (((z.re - r - b.min[0]) / x.dx()).floor().max(0.0)) as usize;
            let i1 = (((z.re + r - b.min[0]) / x.dx()).ceil() as usize).min(x.nx - 1);
            let j0 = (((z.im - r - b.min[1]) / x.dy()).floor().max(0.0)) as usize;
            let j1 = (((z.im + r - b.min[1]) / x.dy()).ceil() as usize).min(x.ny - 1);
            let (mut inside, mut hit) = (0usize, 0usize);
            for j in j0..=j1 {
                for i in i0..=i1 {
                    if (x.center(i, j) - z).norm() > r {
                        continue;
                    }
                    match x.tag(i, j) {
                        Tag::In => {
                            inside += 1;
                            hit += 1;
                        }
                        Tag::Out => inside += 1,
                        Tag::Undecided => {}
                    }
                }
            }
            if inside == 0 {
                return Err(Error::EmptyU);
            }
            Ok(hit as f64 / inside as f64)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoxDimension {
    pub estimate: f64,
    /// `(scale in cells, occupied boxes)`
    pub counts: Vec<(usize, usize)>,
    pub fit_rms: f64,
}

/// Least-squares slope of `log N(s)` against `log(1/s)` over the boundary
/// cells coarsened to block sizes `scales` (in cells).
pub fn box_dimension(field: &GridField, scales: &[usize]) -> Result<BoxDimension> {
    if scales.len() < 4 {
        return Err(Error::InsufficientScales { got: scales.len(), need: 4 });
    }
    let boundary = field.boundary_cells();
    let counts: Vec<(usize, usize)> = scales
        .iter()
        .map(|&s| {
            let s = s.max(1);
            let mut boxes: Vec<(usize, usize)> = boundary.iter().map(|&(i, j)| (i / s, j / s)).collect();
            boxes.sort_unstable();
            boxes.dedup();
            (s, boxes.len())
        })
        .collect();
    if counts.iter().any(|&(_, n)| n == 0) {
        return Err(Error::EmptyU);
    }
    let pts: Vec<(f64, f64)> = counts
        .iter()
        .map(|&(s, n)| (-(s as f64).ln(), (n as f64).ln()))
        .collect();
    let (slope, intercept) = least_squares(&pts);
    let fit_rms = (pts.iter().map(|(x, y)| (y - slope * x - intercept).powi(2)).sum::<f64>()
        / pts.len() as f64)
        .sqrt();
    Ok(BoxDimension { estimate: slope, counts, fit_rms })
}

pub(crate) fn least_squares(pts: &[(f64, f64)]) -> (f64, f64) {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn disk(nx: usize) -> GridField {
        let b = Bbox::new(-2.0, 2.0, -2.0, 2.0);
        GridField::from_fn(b, nx, nx, |z| if z.norm() < 1.0 { Tag::In } else { Tag::Out })
    }

    #[test]
    fn cell_bookkeeping() {
        let f = disk(1024);
        let (a, b, c) = f.counts();
        assert_eq!(f.cell_area() * (a + b + c) as f64, f.bbox().area());
    }

    #[test]
    fn square_map_area_is_pi() {
        let sq = |z: C64| z * z;
        let f = filled_julia_grid(&sq, Bbox::new(-2.0, 2.0, -2.0, 2.0), 512, 512, 1000, 10.0).unwrap();
        let side = f.dx();
        let a = area(&f);
        let perimeter = 2.0 * std::f64::consts::PI;
        assert!((a.value - std::f64::consts::PI).abs() < 2.0 * perimeter * side);
        assert_eq!(a.undecided_mass, 0.0);
    }

    #[test]
    fn bbox_too_small_detected() {
        let sq = |z: C64| z * z;
        let e = filled_julia_grid(&sq, Bbox::new(-0.5, 0.5, -0.5, 0.5), 64, 64, 100, 10.0);
        assert_eq!(e.unwrap_err(), Error::BboxTooSmall);
    }

    #[test]
    fn area_trivial_fields() {
        let b = Bbox::new(0.0, 2.0, 0.0, 1.0);
        let all = GridField::filled(b, 8, 4, Tag::In);
        assert_eq!(area(&all).value, 2.0);
        let checker = GridField::from_tags(
            b,
            8,
            4,
            (0..32).map(|k| if (k % 8 + k / 8) % 2 == 0 { Tag::In } else { Tag::Out }).collect(),
        )
        .unwrap();
        assert_eq!(area(&checker).value, 1.0);
    }

    #[test]
    fn area_refinement_on_smooth_disk() {
        let a1 = area(&disk(256)).value;
        let f2 = disk(512);
        let a2 = area(&f2).value;
        let side = disk(256).dx();
        assert!((a1 - a2).abs() < 2.0 * std::f64::consts::PI * side);
    }

    #[test]
    fn density_trivial_cases() {
        let u = disk(128);
        assert_eq!(dens(&u, &u).unwrap().value, 1.0);
        let left = GridField::from_fn(*u.bbox(), 128, 128, |z| if z.re < 0.0 { Tag::In } else { Tag::Out });
        assert_eq!(dens(&u, &left).unwrap().value, 0.5);
        let empty = GridField::filled(*u.bbox(), 128, 128, Tag::Out);
        assert_eq!(dens(&u, &empty).unwrap().value, 0.0);
        assert_eq!(dens(&empty, &u).unwrap_err(), Error::EmptyU);
    }

    #[test]
    fn undecided_cells_excluded_from_density() {
        let b = Bbox::new(0.0, 1.0, 0.0, 1.0);
        let u = GridField::from_tags(b, 2, 1, vec![Tag::In, Tag::Undecided]).unwrap();
        let x = GridField::from_tags(b, 2, 1, vec![Tag::In, Tag::In]).unwrap();
        let d = dens(&u, &x).unwrap();
        assert_eq!(d.value, 1.0);
        assert_eq!(d.excluded_cells, 1);
    }

    #[test]
    fn polygon_raster_matches_disk() {
        let poly: Vec<C64> = (0..512)
            .map(|k| C64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / 512.0))
            .collect();
        let f = polygon_field(&poly, Bbox::new(-2.0, 2.0, -2.0, 2.0), 256, 256);
        let a = area(&f);
        let side = f.dx();
        assert!(a.value < std::f64::consts::PI && a.value + a.undecided_mass > std::f64::consts::PI - 1e-3);
        assert!(a.undecided_mass < 2.0 * 2.0 * std::f64::consts::PI * side);
        assert!(point_in_polygon(&poly, C64::new(0.1, 0.2)));
        assert_eq!(winding_number(&poly, C64::new(0.0, 0.0)), 1);
        assert_eq!(winding_number(&poly, C64::new(3.0, 0.0)), 0);
    }

    #[test]
    fn distance_transform_matches_brute_force() {
        let (nx, ny) = (23, 17);
        let (dx, dy) = (0.3, 0.5);
        let mask: Vec<bool> = (0..nx * ny).map(|k| k % 37 == 5 || k % 53 == 0).collect();
        let d = distance_transform(&mask, nx, ny, dx, dy);
        for j in 0..ny {
            for i in 0..nx {
                let brute = (0..nx * ny)
                    .filter(|&k| mask[k])
                    .map(|k| {
                        let (a, b) = (k % nx, k / nx);
                        ((a as f64 - i as f64) * dx).hypot((b as f64 - j as f64) * dy)
                    })
                    .fold(f64::INFINITY, f64::min);
                assert!((d[j * nx + i] - brute).abs() < 1e-12, "({i},{j})");
            }
        }
    }

    #[test]
    fn profiles_inside_and_outside() {
        let f = disk(512);
        let inside = density_profile(C64::new(0.0, 0.0), &f, &[0.4, 0.2, 0.1, 0.05]).unwrap();
        assert!(inside.iter().all(|&v| v == 1.0));
        let outside = density_profile(C64::new(1.6, 0.0), &f, &[0.3, 0.15, 0.1, 0.05]).unwrap();
        assert!(outside.iter().all(|&v| v == 0.0));
        assert!(matches!(
            density_profile(C64::new(0.0, 0.0), &f, &[0.01]),
            Err(Error::RadiusBelowResolution { .. })
        ));
        assert_eq!(density_profile(C64::new(1.9, 0.0), &f, &[0.3]).unwrap_err(), Error::BallOutsideBbox);
    }

    #[test]
    fn box_dimension_of_smooth_curves() {
        let b = Bbox::new(0.0, 1.0, 0.0, 1.0);
        let half = GridField::from_fn(b, 512, 512, |z| if z.im < 0.3 + 0.2 * z.re { Tag::In } else { Tag::Out });
        let d = box_dimension(&half, &[1, 2, 4, 8, 16]).unwrap();
        assert!((d.estimate - 1.0).abs() < 0.05, "{d:?}");
        let square = GridField::from_fn(b, 512, 512, |z| {
            if (0.2..0.7).contains(&z.re) && (0.25..0.8).contains(&z.im) { Tag::In } else { Tag::Out }
        });
        let d = box_dimension(&square, &[1, 2, 4, 8, 16]).unwrap();
        assert!((d.estimate - 1.0).abs() < 0.05, "{d:?}");
        assert!(matches!(box_dimension(&square, &[1, 2, 4]), Err(Error::InsufficientScales { .. })));
    }

    #[test]
    fn k_delta_of_rotation_is_thickened_disk() {
        let rot = C64::from_polar(1.0, 0.7);
        let map = move |z: C64| rot * z;
        let circle: Vec<C64> = (0..720).map(|k| C64::from_polar(0.5, k as f64 * PI / 360.0)).collect();
        let b = Bbox::new(-1.0, 1.0, -1.0, 1.0);
        let k = k_delta_field(&map, 0.1, &circle, b, 400, 400, 50).unwrap();
        assert!((area(&k).value - PI * 0.36).abs() < 0.02);
        // aligned sub-window: cells 100..300 of the full grid
        let w = Bbox::new(-0.5, 0.5, -0.5, 0.5);
        let kw = k_delta_window(&map, 0.1, &circle, b, 400, w, 200, 200, 50).unwrap();
        let mismatched = (0..200)
            .flat_map(|j| (0..200).map(move |i| (i, j)))
            .filter(|&(i, j)| kw.tag(i, j) != k.tag(i + 100, j + 100))
            .count();
        assert_eq!(mismatched, 0);
        assert!(matches!(
            k_delta_field(&map, 0.6, &circle, b, 100, 100, 5),
            Err(Error::BboxTooSmall)
        ));
    }

    #[test]
    fn ppm_header_and_size() {
        let f = disk(16);
        let mut buf = Vec::new();
        f.write_ppm(&mut buf).unwrap();
        assert!(buf.starts_with(b"P6\n16 16\n255\n"));
        assert_eq!(buf.len(), 13 + 16 * 16 * 3);
    }

    #[test]
    fn gf01_layout() {
        let b = Bbox::new(-1.0, 1.0, -0.5, 0.5);
        let f = GridField::from_tags(b, 3, 2, vec![Tag::In, Tag::Out, Tag::Undecided, Tag::In, Tag::In, Tag::Out])
            .unwrap();
        let mut buf = Vec::new();
        f.write_gf01(&mut buf).unwrap();
        assert_eq!(&buf[..4], b"GF01");
        assert_eq!(f64::from_le_bytes(buf[4..12].try_into().unwrap()), -1.0);
        assert_eq!(u32::from_le_bytes(buf[36..40].try_into().unwrap()), 3);
        assert_eq!(u32::from_le_bytes(buf[40..44].try_into().unwrap()), 2);
        // tags 1,0,2,1 -> 0b01_10_00_01 ; then 1,0 -> 0b00_01
        assert_eq!(&buf[44..], &[0b0110_0001, 0b0000_0001]);
        assert_eq!(GridField::read_gf01(buf.as_slice()).unwrap(), f);
    }
}
