//! Occupancy-grid backend.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;

use super::geometry::{convex_box_area, disk_box_area, Point};
use super::polygon::ConvexPolygon;
use super::resample::{resample, Frame};
use super::Ball;
use crate::error::{Error, Result};
use crate::sequences::DirectionAngle;

/// Largest tolerated relative mass change before renormalization.
pub const MAX_MASS_DRIFT: f64 = 0.01;

/// Off-axis component below which a direction is treated as a grid axis.
pub const AXIS_EPS: f64 = 1e-12;

/// Cells of slack kept around the seed by [`GridSpec::fitted`].
pub const FIT_SLACK_CELLS: usize = 2;

/// Placement of a `width × height` grid of square cells.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub width: usize,
    pub height: usize,
    pub cell: f64,
    /// World coordinates of the grid center.
    pub origin: Point,
}

impl GridSpec {
    pub fn new(width: usize, height: usize, cell: f64, origin: Point) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidRaster(format!("grid {width}x{height} is empty")));
        }
        if !(cell > 0.0 && cell.is_finite()) {
            return Err(Error::InvalidRaster(format!("cell size must be > 0, got {cell}")));
        }
        if !(origin.x.is_finite() && origin.y.is_finite()) {
            return Err(Error::InvalidRaster("grid origin is not finite".into()));
        }
        Ok(GridSpec {
            width,
            height,
            cell,
            origin,
        })
    }

    pub fn centered(width: usize, height: usize, cell: f64) -> Result<Self> {
        Self::new(width, height, cell, Point::default())
    }

    /// Centered grid whose cell size fits the disk of `radius` about the
    /// origin with a couple of cells to spare.
    pub fn fitted(width: usize, height: usize, radius: f64) -> Result<Self> {
        let n = width.min(height);
        if n <= 2 * FIT_SLACK_CELLS {
            return Err(Error::InvalidRaster(format!(
                "grid {width}x{height} too small to fit a shape"
            )));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidRaster(format!("cannot fit radius {radius}")));
        }
        Self::centered(width, height, 2.0 * radius / (n - 2 * FIT_SLACK_CELLS) as f64)
    }

    pub fn len(&self) -> usize {
        self.width * self.height
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// World coordinates of the lower-left corner.
    pub fn min_corner(&self) -> Point {
        Point::new(
            self.origin.x - 0.5 * self.width as f64 * self.cell,
            self.origin.y - 0.5 * self.height as f64 * self.cell,
        )
    }

    pub fn max_corner(&self) -> Point {
        Point::new(
            self.origin.x + 0.5 * self.width as f64 * self.cell,
            self.origin.y + 0.5 * self.height as f64 * self.cell,
        )
    }

    /// Center of cell `(i, j)`; row 0 is the bottom row.
    pub fn cell_center(&self, i: usize, j: usize) -> Point {
        let lo = self.min_corner();
        Point::new(
            lo.x + (i as f64 + 0.5) * self.cell,
            lo.y + (j as f64 + 0.5) * self.cell,
        )
    }

    /// Whether the closed disk of `radius` about the world origin lies inside.
    pub fn contains_disk(&self, radius: f64) -> bool {
        let slack = 1e-9 * radius.max(self.cell);
        let (lo, hi) = (self.min_corner(), self.max_corner());
        lo.x <= -radius + slack && lo.y <= -radius + slack && hi.x >= radius - slack && hi.y >= radius - slack
    }

    fn is_centered(&self) -> bool {
        self.origin.x == 0.0 && self.origin.y == 0.0
    }

    pub(crate) fn frame(&self) -> Frame {
        Frame {
            base: self.min_corner(),
            ex: Point::new(self.cell, 0.0),
            ey: Point::new(0.0, self.cell),
            width: self.width,
            height: self.height,
        }
    }

    fn same_geometry(&self, other: &GridSpec) -> bool {
        self.width == other.width
            && self.height == other.height
            && (self.cell - other.cell).abs() <= 1e-12 * self.cell
            && (self.origin - other.origin).norm() <= 1e-12 * self.cell
    }

    fn check_fits(&self, radius: f64, what: &str) -> Result<()> {
        if self.contains_disk(radius) {
            Ok(())
        } else {
            let (lo, hi) = (self.min_corner(), self.max_corner());
            Err(Error::ShapeExceedsGrid(format!(
                "{what} reaches radius {radius} about the origin; grid spans [{}, {}] x [{}, {}]",
                lo.x, hi.x, lo.y, hi.y
            )))
        }
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}:{}", self.width, self.height, self.cell)
    }
}

/// Parses `WxH:h` into a grid centered at the origin.
impl FromStr for GridSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |m: &str| Error::parse(format!("grid `{s}`"), format!("{m} (expected WxH:h)"));
        let (dims, cell) = s.split_once(':').ok_or_else(|| bad("missing `:h`"))?;
        let (w, h) = dims
            .split_once(['x', 'X'])
            .ok_or_else(|| bad("missing `x` between width and height"))?;
        let w: usize = w.trim().parse().map_err(|_| bad("bad width"))?;
        let h: usize = h.trim().parse().map_err(|_| bad("bad height"))?;
        let cell: f64 = cell.trim().parse().map_err(|_| bad("bad cell size"))?;
        GridSpec::centered(w, h, cell)
    }
}

/// Occupancy fractions on a [`GridSpec`], row-major from the bottom row.
#[derive(Debug, Clone, PartialEq)]
pub struct RasterSet {
    grid: GridSpec,
    occ: Vec<f64>,
}

impl RasterSet {
    pub fn new(grid: GridSpec, occ: Vec<f64>) -> Result<Self> {
        if occ.len() != grid.len() {
            return Err(Error::InvalidRaster(format!(
                "{} values for a {}x{} grid",
                occ.len(),
                grid.width,
                grid.height
            )));
        }
        if let Some(k) = occ.iter().position(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::InvalidRaster(format!(
                "occupancy {} at cell {k} outside [0, 1]",
                occ[k]
            )));
        }
        Ok(RasterSet { grid, occ })
    }

    pub fn empty(grid: GridSpec) -> Self {
        RasterSet {
            occ: vec![0.0; grid.len()],
            grid,
        }
    }

    /// Clamps values into [0, 1]; for outputs of averaging that may overshoot by rounding.
    pub(crate) fn from_clamped(grid: GridSpec, mut occ: Vec<f64>) -> Self {
        for v in &mut occ {
            *v = v.clamp(0.0, 1.0);
        }
        RasterSet { grid, occ }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn width(&self) -> usize {
        self.grid.width
    }

    pub fn height(&self) -> usize {
        self.grid.height
    }

    pub fn cell_size(&self) -> f64 {
        self.grid.cell
    }

    pub fn occupancy(&self) -> &[f64] {
        &self.occ
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.occ[j * self.grid.width + i]
    }

    /// Sum of occupancy values.
    pub fn mass(&self) -> f64 {
        self.occ.iter().sum()
    }

    pub fn area(&self) -> f64 {
        self.mass() * self.grid.cell * self.grid.cell
    }

    /// Distance from the origin to the farthest corner of any occupied cell.
    pub fn support_radius(&self) -> f64 {
        let h = self.grid.cell;
        let mut r2: f64 = 0.0;
        for j in 0..self.grid.height {
            let row = &self.occ[j * self.grid.width..(j + 1) * self.grid.width];
            for (i, &v) in row.iter().enumerate() {
                if v > 0.0 {
                    let c = self.grid.cell_center(i, j);
                    let dx = c.x.abs() + 0.5 * h;
                    let dy = c.y.abs() + 0.5 * h;
                    r2 = r2.max(dx * dx + dy * dy);
                }
            }
        }
        r2.sqrt()
    }

    /// Index bounds `(i0, i1, j0, j1)` (half-open) of the occupied cells.
    pub fn support_bounds(&self) -> Option<(usize, usize, usize, usize)> {
        let w = self.grid.width;
        let (mut i0, mut i1, mut j0, mut j1) = (usize::MAX, 0, usize::MAX, 0);
        for (k, &v) in self.occ.iter().enumerate() {
            if v > 0.0 {
                let (i, j) = (k % w, k / w);
                i0 = i0.min(i);
                i1 = i1.max(i + 1);
                j0 = j0.min(j);
                j1 = j1.max(j + 1);
            }
        }
        (i1 > 0).then_some((i0, i1, j0, j1))
    }

    /// Bilinear interpolation of cell-center values at a world point; zero off the grid.
    pub fn sample_bilinear(&self, p: Point) -> f64 {
        let lo = self.grid.min_corner();
        let fx = (p.x - lo.x) / self.grid.cell - 0.5;
        let fy = (p.y - lo.y) / self.grid.cell - 0.5;
        let (w, h) = (self.grid.width as i64, self.grid.height as i64);
        if !(fx > -1.0 && fy > -1.0 && fx < w as f64 && fy < h as f64) {
            return 0.0;
        }
        let i = fx.floor() as i64;
        let j = fy.floor() as i64;
        let (tx, ty) = (fx - i as f64, fy - j as f64);
        let at = |i: i64, j: i64| {
            if i < 0 || j < 0 || i >= w || j >= h {
                0.0
            } else {
                self.occ[(j * w + i) as usize]
            }
        };
        let bottom = at(i, j) * (1.0 - tx) + at(i + 1, j) * tx;
        let top = at(i, j + 1) * (1.0 - tx) + at(i + 1, j + 1) * tx;
        bottom * (1.0 - ty) + top * ty
    }

    /// Same set carried onto another grid by area-weighted resampling.
    pub fn resample_to(&self, grid: &GridSpec) -> RasterSet {
        if self.grid.same_geometry(grid) {
            return RasterSet {
                grid: *grid,
                occ: self.occ.clone(),
            };
        }
        let occ = resample(&self.occ, &self.grid.frame(), &grid.frame());
        RasterSet::from_clamped(*grid, occ)
    }

    /// Mirror image across the line through the origin orthogonal to `dir`.
    pub fn reflect(&self, dir: &DirectionAngle) -> RasterSet {
        let (ux, uy) = dir.unit();
        let g = &self.grid;
        if g.is_centered() && (ux.abs() <= AXIS_EPS || uy.abs() <= AXIS_EPS) {
            let (w, h) = (g.width, g.height);
            let flip_rows = ux.abs() <= AXIS_EPS;
            let mut occ = vec![0.0; g.len()];
            for j in 0..h {
                for i in 0..w {
                    let (si, sj) = if flip_rows { (i, h - 1 - j) } else { (w - 1 - i, j) };
                    occ[j * w + i] = self.occ[sj * w + si];
                }
            }
            return RasterSet { grid: *g, occ };
        }
        let u = Point::new(ux, uy);
        let occ = resample(&self.occ, &g.frame().reflected(u), &g.frame());
        RasterSet::from_clamped(*g, occ)
    }

    pub fn check_same_grid(&self, other: &RasterSet) -> Result<()> {
        if self.grid.same_geometry(&other.grid) {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!("{} vs {}", self.grid, other.grid)))
        }
    }
}

/// Exact area fractions of a convex polygon on `grid`.
pub fn rasterize_polygon(poly: &ConvexPolygon, grid: &GridSpec) -> Result<RasterSet> {
    rasterize_union(std::slice::from_ref(poly), grid)
}

/// Rasterizes a union of interior-disjoint convex pieces.
pub fn rasterize_union(pieces: &[ConvexPolygon], grid: &GridSpec) -> Result<RasterSet> {
    let radius = pieces.iter().map(|p| p.circumradius()).fold(0.0, f64::max);
    grid.check_fits(radius, "shape")?;
    let h = grid.cell;
    let lo = grid.min_corner();
    let mut occ = vec![0.0; grid.len()];
    let area = h * h;
    for piece in pieces {
        let (pmin, pmax) = piece.bounding_box();
        let index = |v: f64, o: f64, n: usize| (((v - o) / h).floor().max(0.0) as usize).min(n);
        let i0 = index(pmin.x, lo.x, grid.width);
        let i1 = (index(pmax.x, lo.x, grid.width) + 1).min(grid.width);
        let j0 = index(pmin.y, lo.y, grid.height);
        let j1 = (index(pmax.y, lo.y, grid.height) + 1).min(grid.height);
        for j in j0..j1 {
            let y0 = lo.y + j as f64 * h;
            for i in i0..i1 {
                let x0 = lo.x + i as f64 * h;
                let a = convex_box_area(piece.vertices(), x0, x0 + h, y0, y0 + h);
                if a > 0.0 {
                    occ[j * grid.width + i] += a / area;
                }
            }
        }
    }
    Ok(RasterSet::from_clamped(*grid, occ))
}

/// Analytic area fractions of a centered ball.
pub fn rasterize_ball(ball: &Ball, grid: &GridSpec) -> Result<RasterSet> {
    grid.check_fits(ball.radius, "ball")?;
    Ok(annulus_cells(0.0, ball.radius, grid))
}

/// The annulus `r_inner ≤ |p| ≤ r_outer`.
pub fn annulus_fixture(r_inner: f64, r_outer: f64, grid: &GridSpec) -> Result<RasterSet> {
    if !(r_inner >= 0.0 && r_inner < r_outer && r_outer.is_finite()) {
        return Err(Error::Domain(format!(
            "annulus needs 0 <= r_inner < r_outer, got ({r_inner}, {r_outer})"
        )));
    }
    grid.check_fits(r_outer, "annulus")?;
    Ok(annulus_cells(r_inner, r_outer, grid))
}

fn annulus_cells(r_inner: f64, r_outer: f64, grid: &GridSpec) -> RasterSet {
    let h = grid.cell;
    let lo = grid.min_corner();
    let mut occ = vec![0.0; grid.len()];
    if r_outer > 0.0 {
        for j in 0..grid.height {
            let y0 = lo.y + j as f64 * h;
            if y0 >= r_outer || y0 + h <= -r_outer {
                continue;
            }
            for i in 0..grid.width {
                let x0 = lo.x + i as f64 * h;
                if x0 >= r_outer || x0 + h <= -r_outer {
                    continue;
                }
                let outer = disk_box_area(r_outer, x0, x0 + h, y0, y0 + h);
                let inner = disk_box_area(r_inner, x0, x0 + h, y0, y0 + h);
                occ[j * grid.width + i] = (outer - inner) / (h * h);
            }
        }
    }
    RasterSet::from_clamped(*grid, occ)
}

/// How a column's occupancy values are rearranged about its midpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Rearrangement {
    /// The column's total mass laid out as one centered run with fractional
    /// ends: the chord-length rule applied to the set the cells sample.
    #[default]
    CenteredRun,
    /// Symmetric decreasing rearrangement of the occupancy function. Keeps
    /// every fractional value, so boundaries widen under repeated resampling.
    LayerCake,
}

impl Rearrangement {
    pub const NAMES: &'static str = "run, layer-cake";
}

impl FromStr for Rearrangement {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "run" => Ok(Rearrangement::CenteredRun),
            "layer-cake" => Ok(Rearrangement::LayerCake),
            _ => Err(Error::parse(
                "rearrangement",
                format!("unknown `{s}` (expected one of: {})", Self::NAMES),
            )),
        }
    }
}

impl fmt::Display for Rearrangement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Rearrangement::CenteredRun => "run",
            Rearrangement::LayerCake => "layer-cake",
        })
    }
}

/// Bookkeeping from one raster symmetrization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteinerReport {
    /// Relative mass change before renormalization.
    pub drift: f64,
    /// Whether the exact axis-aligned path was taken.
    pub axis_aligned: bool,
}

pub fn steiner_raster(set: &RasterSet, dir: &DirectionAngle) -> Result<RasterSet> {
    steiner_raster_with(set, dir, Rearrangement::default()).map(|(s, _)| s)
}

pub fn steiner_raster_report(set: &RasterSet, dir: &DirectionAngle) -> Result<(RasterSet, SteinerReport)> {
    steiner_raster_with(set, dir, Rearrangement::default())
}

/// Steiner symmetral of a raster set.
///
/// Columns parallel to `dir` are rearranged about the line through the
/// origin orthogonal to `dir`. Off-axis directions go through a rotated grid
/// centered at the origin and back. The result is rescaled to the input mass.
pub fn steiner_raster_with(
    set: &RasterSet,
    dir: &DirectionAngle,
    mode: Rearrangement,
) -> Result<(RasterSet, SteinerReport)> {
    let theta = dir.theta();
    if !theta.is_finite() {
        return Err(Error::Domain(format!("direction angle {theta} is not finite")));
    }
    let target = set.mass();
    if target == 0.0 {
        let report = SteinerReport {
            drift: 0.0,
            axis_aligned: true,
        };
        return Ok((set.clone(), report));
    }
    let g = set.grid;
    let (ux, uy) = dir.unit();
    let (mut occ, axis_aligned) = if g.is_centered() && ux.abs() <= AXIS_EPS {
        (rearrange_strided(&set.occ, g.width, g.height, 1, g.width, mode), true)
    } else if g.is_centered() && uy.abs() <= AXIS_EPS {
        (rearrange_strided(&set.occ, g.height, g.width, g.width, 1, mode), true)
    } else {
        let n = 2 * ((set.support_radius() / g.cell).ceil() as usize + 1) + 1;
        let rf = Frame::rotated_square(n, g.cell, theta - FRAC_PI_2);
        let rot = resample(&set.occ, &g.frame(), &rf);
        let rot = rearrange_strided(&rot, n, n, 1, n, mode);
        (resample(&rot, &rf, &g.frame()), false)
    };
    let drift = renormalize(&mut occ, target)?;
    if drift > MAX_MASS_DRIFT {
        return Err(Error::MassDrift {
            drift,
            limit: MAX_MASS_DRIFT,
        });
    }
    if drift > 1e-6 {
        log::debug!("raster symmetrization drift {drift:.3e} at theta {theta}");
    }
    Ok((RasterSet { grid: g, occ }, SteinerReport { drift, axis_aligned }))
}

/// Rearranges `lines` lines of `len` cells each; cell `k` of line `l` sits at
/// `l * line_stride + k * step`.
fn rearrange_strided(
    occ: &[f64],
    lines: usize,
    len: usize,
    line_stride: usize,
    step: usize,
    mode: Rearrangement,
) -> Vec<f64> {
    let mut out = occ.to_vec();
    let mut scratch = Vec::with_capacity(len);
    for l in 0..lines {
        scratch.clear();
        scratch.extend((0..len).map(|k| occ[l * line_stride + k * step]));
        match mode {
            Rearrangement::CenteredRun => centered_run(&mut scratch),
            Rearrangement::LayerCake => layer_cake(&mut scratch),
        }
        for (k, v) in scratch.iter().enumerate() {
            out[l * line_stride + k * step] = *v;
        }
    }
    out
}

/// Replaces a line of cells by the run `[-m/2, m/2]` about its midpoint,
/// `m` being the line's mass in cell units.
pub(crate) fn centered_run(vals: &mut [f64]) {
    let m: f64 = vals.iter().sum();
    if m == 0.0 {
        return;
    }
    let half = 0.5 * m;
    let mid = 0.5 * vals.len() as f64;
    for (k, v) in vals.iter_mut().enumerate() {
        let lo = k as f64 - mid;
        *v = ((lo + 1.0).min(half) - lo.max(-half)).clamp(0.0, 1.0);
    }
}

/// Symmetric decreasing rearrangement of a line of cells about its midpoint.
///
/// The midpoint is a cell center for odd lengths and a cell boundary for even
/// ones. Each cell receives the average of the rearranged step function over
/// it, so the result is the same whichever side a tie goes to.
pub(crate) fn layer_cake(vals: &mut [f64]) {
    let n = vals.len();
    if n == 0 || vals.iter().all(|&v| v == 0.0) {
        return;
    }
    let mut sorted = vals.to_vec();
    sorted.sort_unstable_by(|a, b| b.total_cmp(a));
    let at = |k: usize| sorted.get(k).copied().unwrap_or(0.0);
    if n % 2 == 1 {
        let c = n / 2;
        vals[c] = sorted[0];
        for m in 1..=c {
            let v = 0.5 * (at(2 * m - 1) + at(2 * m));
            vals[c + m] = v;
            vals[c - m] = v;
        }
    } else {
        let c = n / 2;
        for m in 0..c {
            let v = 0.5 * (at(2 * m) + at(2 * m + 1));
            vals[c + m] = v;
            vals[c - 1 - m] = v;
        }
    }
}

/// Rescales `occ` to total `target`, keeping values in [0, 1]. Returns the
/// relative drift before rescaling.
fn renormalize(occ: &mut [f64], target: f64) -> Result<f64> {
    for v in occ.iter_mut() {
        *v = v.clamp(0.0, 1.0);
    }
    let mass: f64 = occ.iter().sum();
    let drift = (mass - target).abs() / target;
    if mass == 0.0 {
        return Err(Error::MassDrift {
            drift: 1.0,
            limit: MAX_MASS_DRIFT,
        });
    }
    if mass >= target {
        let s = target / mass;
        for v in occ.iter_mut() {
            *v *= s;
        }
        return Ok(drift);
    }
    // Grow only unsaturated cells; cells pushed past 1 are clamped and the
    // remainder is redistributed.
    for _ in 0..64 {
        let mass: f64 = occ.iter().sum();
        let deficit = target - mass;
        if deficit <= 1e-15 * target {
            break;
        }
        let free: f64 = occ.iter().filter(|&&v| v > 0.0 && v < 1.0).sum();
        if free == 0.0 {
            return Err(Error::MassDrift {
                drift,
                limit: MAX_MASS_DRIFT,
            });
        }
        let s = 1.0 + deficit / free;
        for v in occ.iter_mut() {
            if *v > 0.0 && *v < 1.0 {
                *v = (*v * s).min(1.0);
            }
        }
    }
    Ok(drift)
}
