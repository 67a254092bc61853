//! Small planar-geometry kernels shared by both backends.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn dot(self, o: Point) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn cross(self, o: Point) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn norm2(self) -> f64 {
        self.dot(self)
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, s: f64) -> Point {
        Point::new(self.x * s, self.y * s)
    }
}

impl Neg for Point {
    type Output = Point;
    fn neg(self) -> Point {
        Point::new(-self.x, -self.y)
    }
}

impl From<(f64, f64)> for Point {
    fn from((x, y): (f64, f64)) -> Self {
        Point::new(x, y)
    }
}

/// Signed shoelace area (positive for CCW).
pub fn signed_area(poly: &[Point]) -> f64 {
    let n = poly.len();
    if n < 3 {
        return 0.0;
    }
    let mut acc = 0.0;
    for i in 0..n {
        acc += poly[i].cross(poly[(i + 1) % n]);
    }
    acc / 2.0
}

/// `∫∫ (x² + y²)` over a CCW polygon, by fan triangulation from the origin.
pub fn polar_moment(poly: &[Point]) -> f64 {
    let n = poly.len();
    let mut acc = 0.0;
    for i in 0..n {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        let c = a.cross(b);
        acc += c * (a.x * a.x + a.x * b.x + b.x * b.x + a.y * a.y + a.y * b.y + b.y * b.y);
    }
    acc / 12.0
}

/// Keeps the part of a convex polygon where `a·p <= c`.
pub fn clip_halfplane(poly: &[Point], a: Point, c: f64, out: &mut Vec<Point>) {
    out.clear();
    let n = poly.len();
    if n == 0 {
        return;
    }
    for i in 0..n {
        let p = poly[i];
        let q = poly[(i + 1) % n];
        let fp = a.dot(p) - c;
        let fq = a.dot(q) - c;
        if fp <= 0.0 {
            out.push(p);
        }
        if (fp < 0.0 && fq > 0.0) || (fp > 0.0 && fq < 0.0) {
            let t = fp / (fp - fq);
            out.push(p + (q - p) * t);
        }
    }
}

/// Area of a convex polygon inside the box `[x0, x1] × [y0, y1]`.
pub fn convex_box_area(poly: &[Point], x0: f64, x1: f64, y0: f64, y1: f64) -> f64 {
    let mut a = Vec::with_capacity(poly.len() + 4);
    let mut b = Vec::with_capacity(poly.len() + 4);
    clip_halfplane(poly, Point::new(-1.0, 0.0), -x0, &mut a);
    clip_halfplane(&a, Point::new(1.0, 0.0), x1, &mut b);
    clip_halfplane(&b, Point::new(0.0, -1.0), -y0, &mut a);
    clip_halfplane(&a, Point::new(0.0, 1.0), y1, &mut b);
    signed_area(&b).abs()
}

/// Clips against `sign·coord <= sign·bound` where `coord` is x or y.
fn clip_axis(src: &[Point], out: &mut [Point; 8], use_x: bool, bound: f64, sign: f64) -> usize {
    let n = src.len();
    let mut k = 0;
    let f = |p: &Point| sign * (if use_x { p.x } else { p.y } - bound);
    for i in 0..n {
        let p = src[i];
        let q = src[(i + 1) % n];
        let (fp, fq) = (f(&p), f(&q));
        if fp <= 0.0 {
            out[k] = p;
            k += 1;
        }
        if (fp < 0.0 && fq > 0.0) || (fp > 0.0 && fq < 0.0) {
            out[k] = p + (q - p) * (fp / (fp - fq));
            k += 1;
        }
    }
    k
}

/// [`convex_box_area`] for a quadrilateral, without allocating.
pub fn quad_box_area(quad: &[Point; 4], x0: f64, x1: f64, y0: f64, y1: f64) -> f64 {
    let mut a = [Point::default(); 8];
    let mut b = [Point::default(); 8];
    let n = clip_axis(quad, &mut a, true, x0, -1.0);
    let n = clip_axis(&a[..n], &mut b, true, x1, 1.0);
    let n = clip_axis(&b[..n], &mut a, false, y0, -1.0);
    let n = clip_axis(&a[..n], &mut b, false, y1, 1.0);
    signed_area(&b[..n]).abs()
}

/// Intersection of two convex CCW polygons.
pub fn convex_intersection(subject: &[Point], clip: &[Point]) -> Vec<Point> {
    let mut cur = subject.to_vec();
    let mut next = Vec::with_capacity(subject.len() + clip.len());
    let m = clip.len();
    for i in 0..m {
        let p = clip[i];
        let q = clip[(i + 1) % m];
        // interior is to the left of p→q: keep cross(q-p, x-p) >= 0
        let e = q - p;
        let a = Point::new(e.y, -e.x);
        clip_halfplane(&cur, a, a.dot(p), &mut next);
        std::mem::swap(&mut cur, &mut next);
        if cur.is_empty() {
            break;
        }
    }
    cur
}

/// Antiderivative of `√(r² − x²)`.
fn half_chord_integral(x: f64, r: f64) -> f64 {
    let x = x.clamp(-r, r);
    let q = (r * r - x * x).max(0.0).sqrt();
    0.5 * (x * q + r * r * (x / r).clamp(-1.0, 1.0).asin())
}

/// Area of the disk of radius `r` centered at the origin inside `[x0, x1] × [y0, y1]`.
pub fn disk_box_area(r: f64, x0: f64, x1: f64, y0: f64, y1: f64) -> f64 {
    if r <= 0.0 {
        return 0.0;
    }
    let xa = x0.max(-r);
    let xb = x1.min(r);
    if xa >= xb || y0 >= r || y1 <= -r {
        return 0.0;
    }
    let mut cuts = vec![xa, xb];
    for y in [y0, y1] {
        if y.abs() < r {
            let s = (r * r - y * y).sqrt();
            for c in [-s, s] {
                if c > xa && c < xb {
                    cuts.push(c);
                }
            }
        }
    }
    cuts.sort_by(f64::total_cmp);

    let mut area = 0.0;
    for w in cuts.windows(2) {
        let (p, q) = (w[0], w[1]);
        if q <= p {
            continue;
        }
        let m = 0.5 * (p + q);
        let qm = (r * r - m * m).max(0.0).sqrt();
        let upper_is_box = y1 < qm;
        let lower_is_box = y0 > -qm;
        let top = if upper_is_box { y1 } else { qm };
        let bottom = if lower_is_box { y0 } else { -qm };
        if top <= bottom {
            continue;
        }
        let chord = half_chord_integral(q, r) - half_chord_integral(p, r);
        let upper = if upper_is_box { y1 * (q - p) } else { chord };
        let lower = if lower_is_box { y0 * (q - p) } else { -chord };
        area += upper - lower;
    }
    area.max(0.0)
}

/// Signed area of `triangle(o, a, b) ∩ disk(o, r)`.
fn triangle_disk_area(a: Point, b: Point, r: f64) -> f64 {
    let r2 = r * r;
    let d = b - a;
    // |a + t d|² = r² → t² |d|² + 2t a·d + |a|² − r² = 0
    let qa = d.norm2();
    if qa == 0.0 {
        return 0.0;
    }
    let qb = a.dot(d);
    let qc = a.norm2() - r2;
    let disc = qb * qb - qa * qc;
    let mut ts = vec![0.0];
    if disc > 0.0 {
        let s = disc.sqrt();
        for t in [(-qb - s) / qa, (-qb + s) / qa] {
            if t > 0.0 && t < 1.0 {
                ts.push(t);
            }
        }
    }
    ts.push(1.0);
    let mut area = 0.0;
    for w in ts.windows(2) {
        let p = a + d * w[0];
        let q = a + d * w[1];
        let mid = a + d * (0.5 * (w[0] + w[1]));
        if mid.norm2() <= r2 {
            area += 0.5 * p.cross(q);
        } else {
            area += 0.5 * r2 * p.cross(q).atan2(p.dot(q));
        }
    }
    area
}

/// Area of a CCW polygon inside the disk of radius `r` centered at the origin.
pub fn polygon_disk_area(poly: &[Point], r: f64) -> f64 {
    if r <= 0.0 {
        return 0.0;
    }
    let n = poly.len();
    let mut acc = 0.0;
    for i in 0..n {
        acc += triangle_disk_area(poly[i], poly[(i + 1) % n], r);
    }
    acc.clamp(0.0, PI * r * r)
}

/// Distance from `p` to the segment `a b`.
pub fn point_segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let d = b - a;
    let len2 = d.norm2();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = ((p - a).dot(d) / len2).clamp(0.0, 1.0);
    (p - (a + d * t)).norm()
}
