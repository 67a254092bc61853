//! Exact Steiner symmetrization of convex polygons.

use std::f64::consts::PI;

use super::geometry::{
    convex_intersection, point_segment_distance, polar_moment, polygon_disk_area, signed_area, Point,
};
use super::Ball;
use crate::error::{Error, Result};
use crate::sequences::DirectionAngle;

/// Sine of the turning angle below which a vertex counts as collinear.
pub const COLLINEAR_TOLERANCE: f64 = 1e-9;

/// Inputs with less area than this are rejected by the symmetral.
pub const MIN_AREA: f64 = 1e-12;

/// Default breakpoint-simplification tolerance, relative to the diameter.
///
/// Every symmetral roughly doubles the vertex count; breakpoints whose
/// half-chord sits within this distance of the straight line through its
/// neighbours are dropped so long processes stay bounded.
pub const DEFAULT_SIMPLIFY_TOLERANCE: f64 = 1e-9;

/// A convex polygon with counter-clockwise vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexPolygon {
    vertices: Vec<Point>,
}

impl ConvexPolygon {
    /// Validates and normalizes a vertex list.
    ///
    /// Repeated and collinear vertices are dropped; clockwise input is
    /// reversed with a warning.
    pub fn new(vertices: Vec<Point>) -> Result<Self> {
        if vertices.iter().any(|p| !p.x.is_finite() || !p.y.is_finite()) {
            return Err(Error::InvalidPolygon("non-finite coordinate".into()));
        }
        let mut v = dedup_cyclic(vertices);
        if v.len() < 3 {
            return Err(Error::InvalidPolygon(format!(
                "need at least 3 distinct vertices, got {}",
                v.len()
            )));
        }
        if signed_area(&v) < 0.0 {
            log::warn!("polygon given clockwise; reorienting to counter-clockwise");
            v.reverse();
        }
        let v = drop_collinear(v);
        if v.len() < 3 {
            return Err(Error::InvalidPolygon("all vertices are collinear".into()));
        }
        check_convex(&v)?;
        Ok(ConvexPolygon { vertices: v })
    }

    pub fn from_tuples(pts: &[(f64, f64)]) -> Result<Self> {
        Self::new(pts.iter().copied().map(Point::from).collect())
    }

    /// Axis-aligned rectangle `[x0, x1] × [y0, y1]`.
    pub fn rectangle(x0: f64, x1: f64, y0: f64, y1: f64) -> Result<Self> {
        Self::from_tuples(&[(x0, y0), (x1, y0), (x1, y1), (x0, y1)])
    }

    /// Regular `n`-gon inscribed in the circle of radius `r` about `center`.
    pub fn regular(n: usize, r: f64, center: Point) -> Result<Self> {
        Self::ellipse(n, r, r, center)
    }

    /// `n` points on the ellipse with semi-axes `a` (x) and `b` (y).
    pub fn ellipse(n: usize, a: f64, b: f64, center: Point) -> Result<Self> {
        let v = (0..n)
            .map(|k| {
                let t = 2.0 * PI * k as f64 / n as f64;
                center + Point::new(a * t.cos(), b * t.sin())
            })
            .collect();
        Self::new(v)
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn area(&self) -> f64 {
        signed_area(&self.vertices)
    }

    /// `∫∫ (x² + y²)` over the polygon.
    pub fn moment_of_inertia(&self) -> f64 {
        polar_moment(&self.vertices)
    }

    pub fn perimeter(&self) -> f64 {
        let n = self.vertices.len();
        (0..n)
            .map(|i| (self.vertices[(i + 1) % n] - self.vertices[i]).norm())
            .sum()
    }

    /// Largest distance from the origin to a vertex.
    pub fn circumradius(&self) -> f64 {
        self.vertices.iter().map(|p| p.norm()).fold(0.0, f64::max)
    }

    pub fn diameter(&self) -> f64 {
        let v = &self.vertices;
        let mut d: f64 = 0.0;
        // O(n²) is fine for the sizes reached here; callers on hot paths use the bounding box
        if v.len() > 2048 {
            let (lo, hi) = self.bounding_box();
            return (hi - lo).norm();
        }
        for i in 0..v.len() {
            for j in i + 1..v.len() {
                d = d.max((v[i] - v[j]).norm());
            }
        }
        d
    }

    pub fn bounding_box(&self) -> (Point, Point) {
        let mut lo = Point::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in &self.vertices {
            lo = Point::new(lo.x.min(p.x), lo.y.min(p.y));
            hi = Point::new(hi.x.max(p.x), hi.y.max(p.y));
        }
        (lo, hi)
    }

    pub fn contains(&self, p: Point) -> bool {
        let n = self.vertices.len();
        (0..n).all(|i| {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % n];
            (b - a).cross(p - a) >= -1e-12 * (b - a).norm()
        })
    }

    pub fn translate(&self, by: Point) -> ConvexPolygon {
        ConvexPolygon {
            vertices: self.vertices.iter().map(|p| *p + by).collect(),
        }
    }

    /// Mirror image across the line through the origin orthogonal to `dir`.
    pub fn reflect(&self, dir: &DirectionAngle) -> ConvexPolygon {
        let u = Point::from(dir.unit());
        let mut v: Vec<Point> = self
            .vertices
            .iter()
            .map(|p| *p - u * (2.0 * p.dot(u)))
            .collect();
        // reflection flips orientation
        v.reverse();
        ConvexPolygon { vertices: v }
    }

    pub fn intersection_area(&self, other: &ConvexPolygon) -> f64 {
        let i = convex_intersection(&self.vertices, &other.vertices);
        if i.len() < 3 {
            0.0
        } else {
            signed_area(&i).max(0.0)
        }
    }

    /// `λ(A △ B)`.
    pub fn symmetric_difference_area(&self, other: &ConvexPolygon) -> f64 {
        (self.area() + other.area() - 2.0 * self.intersection_area(other)).max(0.0)
    }

    /// Area of the polygon inside `ball`.
    pub fn ball_intersection_area(&self, ball: &Ball) -> f64 {
        polygon_disk_area(&self.vertices, ball.radius)
    }

    /// Distance from `p` to the filled polygon.
    pub fn distance_to(&self, p: Point) -> f64 {
        if self.contains(p) {
            return 0.0;
        }
        let n = self.vertices.len();
        (0..n)
            .map(|i| point_segment_distance(p, self.vertices[i], self.vertices[(i + 1) % n]))
            .fold(f64::INFINITY, f64::min)
    }
}

fn dedup_cyclic(mut v: Vec<Point>) -> Vec<Point> {
    v.dedup();
    while v.len() > 1 && v.first() == v.last() {
        v.pop();
    }
    v
}

fn turn_sine(a: Point, b: Point, c: Point) -> f64 {
    let e1 = b - a;
    let e2 = c - b;
    let denom = e1.norm() * e2.norm();
    if denom == 0.0 {
        0.0
    } else {
        e1.cross(e2) / denom
    }
}

fn drop_collinear(mut v: Vec<Point>) -> Vec<Point> {
    loop {
        let n = v.len();
        if n < 3 {
            return v;
        }
        let drop = (0..n).find(|&i| {
            let s = turn_sine(v[(i + n - 1) % n], v[i], v[(i + 1) % n]);
            let back = (v[(i + 1) % n] - v[i]).dot(v[i] - v[(i + n - 1) % n]) < 0.0;
            s.abs() <= COLLINEAR_TOLERANCE && !back
        });
        match drop {
            Some(i) => {
                v.remove(i);
            }
            None => return v,
        }
    }
}

fn check_convex(v: &[Point]) -> Result<()> {
    let n = v.len();
    let mut winding = 0.0;
    for i in 0..n {
        let a = v[(i + n - 1) % n];
        let b = v[i];
        let c = v[(i + 1) % n];
        if turn_sine(a, b, c) < -COLLINEAR_TOLERANCE {
            return Err(Error::InvalidPolygon(format!(
                "reflex vertex {i} at ({}, {})",
                b.x, b.y
            )));
        }
        let (e1, e2) = (b - a, c - b);
        winding += e1.cross(e2).atan2(e1.dot(e2));
    }
    if (winding - 2.0 * PI).abs() > 1e-6 {
        return Err(Error::InvalidPolygon("boundary winds more than once".into()));
    }
    Ok(())
}

/// `S_u C` with the default simplification tolerance.
pub fn steiner_polygon(poly: &ConvexPolygon, dir: &DirectionAngle) -> Result<ConvexPolygon> {
    steiner_polygon_with(poly, dir, DEFAULT_SIMPLIFY_TOLERANCE)
}

/// Lower and upper boundary chains of a convex polygon in the `(s, t)` frame,
/// both sorted by increasing `s`.
fn chains(st: &[Point]) -> (Vec<Point>, Vec<Point>) {
    let n = st.len();
    let lex = |a: &Point, b: &Point| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y));
    // bottom-left, top-left, bottom-right, top-right
    let bl = (0..n).min_by(|&i, &j| lex(&st[i], &st[j])).unwrap();
    let tl = (0..n)
        .min_by(|&i, &j| st[i].x.total_cmp(&st[j].x).then(st[j].y.total_cmp(&st[i].y)))
        .unwrap();
    let br = (0..n)
        .max_by(|&i, &j| st[i].x.total_cmp(&st[j].x).then(st[j].y.total_cmp(&st[i].y)))
        .unwrap();
    let tr = (0..n).max_by(|&i, &j| lex(&st[i], &st[j])).unwrap();

    let mut lower = Vec::new();
    let mut i = bl;
    loop {
        lower.push(st[i]);
        if i == br {
            break;
        }
        i = (i + 1) % n;
    }
    let mut upper = Vec::new();
    let mut i = tr;
    loop {
        upper.push(st[i]);
        if i == tl {
            break;
        }
        i = (i + 1) % n;
    }
    upper.reverse();
    (lower, upper)
}

/// Piecewise-linear interpolation along an `s`-sorted chain, queried with
/// nondecreasing `s`.
struct ChainCursor<'a> {
    chain: &'a [Point],
    k: usize,
}

impl<'a> ChainCursor<'a> {
    fn new(chain: &'a [Point]) -> Self {
        ChainCursor { chain, k: 0 }
    }

    fn at(&mut self, s: f64) -> f64 {
        let c = self.chain;
        while self.k + 1 < c.len() && c[self.k + 1].x < s {
            self.k += 1;
        }
        if self.k + 1 >= c.len() {
            return c[c.len() - 1].y;
        }
        let (a, b) = (c[self.k], c[self.k + 1]);
        if s <= a.x {
            return a.y;
        }
        if s >= b.x {
            return b.y;
        }
        a.y + (b.y - a.y) * ((s - a.x) / (b.x - a.x))
    }
}

fn profile_area(s: &[f64], len: &[f64]) -> f64 {
    s.windows(2)
        .zip(len.windows(2))
        .map(|(sw, lw)| 0.5 * (sw[1] - sw[0]) * (lw[0] + lw[1]))
        .sum()
}

/// `S_u C`, dropping breakpoints within `simplify · diameter` of collinear.
///
/// Dropped breakpoints only ever shave area off a concave chord profile;
/// the lost area is restored by a uniform stretch of the chord lengths.
pub fn steiner_polygon_with(
    poly: &ConvexPolygon,
    dir: &DirectionAngle,
    simplify: f64,
) -> Result<ConvexPolygon> {
    let area = poly.area();
    if area < MIN_AREA {
        return Err(Error::DegeneratePolygon { area });
    }
    let u = Point::from(dir.unit());
    let un = Point::from(dir.normal());
    let st: Vec<Point> = poly
        .vertices
        .iter()
        .map(|p| Point::new(p.dot(un), p.dot(u)))
        .collect();
    let (lower, upper) = chains(&st);

    let mut breaks: Vec<f64> = lower.iter().chain(upper.iter()).map(|p| p.x).collect();
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();

    let (mut lo, mut hi) = (ChainCursor::new(&lower), ChainCursor::new(&upper));
    let chord: Vec<f64> = breaks
        .iter()
        .map(|&s| (hi.at(s) - lo.at(s)).max(0.0))
        .collect();
    let full_area = profile_area(&breaks, &chord);

    let (lo_box, hi_box) = poly.bounding_box();
    let scale = (hi_box - lo_box).norm();
    let (breaks, chord) = merge_close(&breaks, &chord, 1e-12 * scale);
    if breaks.len() < 2 {
        return Err(Error::DegeneratePolygon { area });
    }
    let tol = (simplify * scale).max(1e-14 * scale);
    let (s_kept, mut len_kept) = simplify_profile(&breaks, &chord, tol);
    let kept_area = profile_area(&s_kept, &len_kept);
    if kept_area > 0.0 {
        let stretch = full_area / kept_area;
        for l in &mut len_kept {
            *l *= stretch;
        }
    }

    let tiny = 1e-15 * scale;
    let mut out = Vec::with_capacity(2 * s_kept.len());
    for (&s, &l) in s_kept.iter().zip(&len_kept) {
        out.push(Point::new(s, -0.5 * l));
    }
    for (&s, &l) in s_kept.iter().zip(&len_kept).rev() {
        if l > tiny {
            out.push(Point::new(s, 0.5 * l));
        }
    }
    // collapse zero-length chords at the two ends to a single vertex
    if let Some(first) = out.first_mut() {
        if len_kept[0] <= tiny {
            first.y = 0.0;
        }
    }
    let last = s_kept.len() - 1;
    if len_kept[last] <= tiny {
        out[last].y = 0.0;
    }

    let vertices: Vec<Point> = out.iter().map(|q| un * q.x + u * q.y).collect();
    let vertices = dedup_cyclic(vertices);
    if vertices.len() < 3 {
        return Err(Error::DegeneratePolygon { area });
    }
    Ok(ConvexPolygon { vertices })
}

/// Collapses runs of breakpoints closer than `eps` (edges almost parallel to
/// `u` split by rounding) into one, keeping the longest chord. End runs keep
/// the extreme abscissa.
fn merge_close(s: &[f64], len: &[f64], eps: f64) -> (Vec<f64>, Vec<f64>) {
    let n = s.len();
    let mut s_out = Vec::with_capacity(n);
    let mut l_out = Vec::with_capacity(n);
    let mut i = 0;
    while i < n {
        let mut j = i + 1;
        while j < n && s[j] - s[j - 1] <= eps {
            j += 1;
        }
        let best = (i..j).max_by(|&a, &b| len[a].total_cmp(&len[b])).unwrap();
        let at = if i == 0 {
            s[0]
        } else if j == n {
            s[n - 1]
        } else {
            s[best]
        };
        s_out.push(at);
        l_out.push(len[best]);
        i = j;
    }
    (s_out, l_out)
}

/// Drops interior breakpoints whose half-chord lies within `tol` of the
/// chord line through the neighbouring breakpoints. Two adjacent breakpoints
/// are never dropped in the same pass.
fn simplify_profile(s: &[f64], len: &[f64], tol: f64) -> (Vec<f64>, Vec<f64>) {
    let n = s.len();
    let mut keep = vec![true; n];
    let mut j = 1;
    while j + 1 < n {
        let (s0, s1, s2) = (s[j - 1], s[j], s[j + 1]);
        let w = s2 - s0;
        let interp = if w > 0.0 {
            len[j - 1] + (len[j + 1] - len[j - 1]) * ((s1 - s0) / w)
        } else {
            len[j]
        };
        if 0.5 * (len[j] - interp).abs() <= tol {
            keep[j] = false;
            j += 2;
        } else {
            j += 1;
        }
    }
    let mut s_out = Vec::with_capacity(n);
    let mut l_out = Vec::with_capacity(n);
    for i in 0..n {
        if keep[i] {
            s_out.push(s[i]);
            l_out.push(len[i]);
        }
    }
    (s_out, l_out)
}

/// Hausdorff distance between two convex polygons.
///
/// For convex sets the distance from a point of one set to the other is a
/// convex function, so each directed distance peaks at a vertex.
pub fn hausdorff(a: &ConvexPolygon, b: &ConvexPolygon) -> f64 {
    let directed = |x: &ConvexPolygon, y: &ConvexPolygon| {
        x.vertices
            .iter()
            .map(|&p| y.distance_to(p))
            .fold(0.0, f64::max)
    };
    directed(a, b).max(directed(b, a))
}

/// Hausdorff distance to the centered ball, `sup_u |h_C(u) − r|` over
/// support functions.
pub fn hausdorff_to_ball(poly: &ConvexPolygon, ball: &Ball) -> f64 {
    let r = ball.radius;
    let v = &poly.vertices;
    let n = v.len();
    let h_max = v.iter().map(|p| p.norm()).fold(f64::NEG_INFINITY, f64::max);
    // support function minima sit at edge normals
    let h_min = (0..n)
        .map(|i| {
            let (a, b) = (v[i], v[(i + 1) % n]);
            let e = b - a;
            a.dot(Point::new(e.y, -e.x)) / e.norm()
        })
        .fold(f64::INFINITY, f64::min);
    (h_max - r).abs().max((r - h_min).abs())
}
