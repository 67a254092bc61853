//! Area, moment of inertia, distances and a perimeter estimate.

use std::f64::consts::PI;

use crate::error::Result;
use crate::planar_sets::{
    ball_of_same_area, hausdorff_to_ball, rasterize_ball, ConvexPolygon, PlanarSet, Point, RasterSet,
};

/// Directions used by [`perimeter_estimate`].
pub const CROFTON_DIRECTIONS: usize = 64;

/// Multiplier in [`epsilon_grid`].
pub const EPSILON_GRID_FACTOR: f64 = 8.0;

/// Metrics recorded along a process trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricsRecord {
    pub area: f64,
    pub mu: f64,
    pub d1_to_ball: f64,
    /// Only for polygons.
    pub hausdorff_to_ball: Option<f64>,
    pub perimeter: f64,
}

pub fn area(set: &PlanarSet) -> f64 {
    set.area()
}

/// `∫ (x² + y²)` over the set.
pub fn moment_of_inertia(set: &PlanarSet) -> f64 {
    match set {
        PlanarSet::Polygon(p) => p.moment_of_inertia(),
        PlanarSet::Raster(r) => raster_moment(r),
    }
}

/// Each cell contributes its occupancy times the exact moment of a full
/// cell, `h²·(x_c² + y_c²) + h⁴/6`.
pub fn raster_moment(r: &RasterSet) -> f64 {
    let g = r.grid();
    let h = g.cell;
    let self_term = h * h / 6.0;
    let mut acc = 0.0;
    for j in 0..g.height {
        let y = g.cell_center(0, j).y;
        for i in 0..g.width {
            let v = r.get(i, j);
            if v != 0.0 {
                let x = g.cell_center(i, 0).x;
                acc += v * (x * x + y * y + self_term);
            }
        }
    }
    acc * h * h
}

/// `L¹` distance of occupancies on a shared grid.
pub fn d1(a: &RasterSet, b: &RasterSet) -> Result<f64> {
    a.check_same_grid(b)?;
    let h = a.cell_size();
    let sum: f64 = a
        .occupancy()
        .iter()
        .zip(b.occupancy())
        .map(|(x, y)| (x - y).abs())
        .sum();
    Ok(sum * h * h)
}

/// [`d1`] after resampling `b` onto the grid of `a`.
pub fn d1_resampled(a: &RasterSet, b: &RasterSet) -> Result<f64> {
    d1(a, &b.resample_to(a.grid()))
}

/// `d₁(M, M*)` on the grid of `set`.
pub fn d1_to_ball(set: &RasterSet) -> Result<f64> {
    let ball = ball_of_same_area(set.area())?;
    if ball.radius == 0.0 {
        return Ok(0.0);
    }
    d1(set, &rasterize_ball(&ball, set.grid())?)
}

/// Exact `d₁(P, P*) = 2·(λ(P) − λ(P ∩ P*))`.
pub fn polygon_d1_to_ball(poly: &ConvexPolygon) -> Result<f64> {
    let ball = ball_of_same_area(poly.area())?;
    Ok((2.0 * (poly.area() - poly.ball_intersection_area(&ball))).max(0.0))
}

/// Support of `r` cropped with `pad` zero rings; cell `(i, j)` of the crop
/// has its center at local coordinates `(i, j)`.
struct Crop {
    buf: Vec<f64>,
    w: usize,
    h: usize,
}

impl Crop {
    fn new(r: &RasterSet, pad: usize) -> Option<Crop> {
        let (i0, i1, j0, j1) = r.support_bounds()?;
        let w = i1 - i0 + 2 * pad;
        let h = j1 - j0 + 2 * pad;
        let mut buf = vec![0.0; w * h];
        for j in j0..j1 {
            for i in i0..i1 {
                buf[(j - j0 + pad) * w + (i - i0 + pad)] = r.get(i, j);
            }
        }
        Some(Crop { buf, w, h })
    }

    fn center(&self) -> Point {
        Point::new(0.5 * (self.w - 1) as f64, 0.5 * (self.h - 1) as f64)
    }

    /// Bilinear value; positions are clamped into the crop, whose rim is zero.
    fn sample(&self, x: f64, y: f64) -> f64 {
        let x = x.clamp(0.0, (self.w - 1) as f64);
        let y = y.clamp(0.0, (self.h - 1) as f64);
        let i = (x as usize).min(self.w - 2);
        let j = (y as usize).min(self.h - 2);
        let (tx, ty) = (x - i as f64, y - j as f64);
        let b = &self.buf;
        let k = j * self.w + i;
        let bottom = b[k] + (b[k + 1] - b[k]) * tx;
        let top = b[k + self.w] + (b[k + self.w + 1] - b[k + self.w]) * tx;
        bottom + (top - bottom) * ty
    }

    /// Squares `[i, i+1] × [j, j+1]` within one square of a non-constant
    /// bilinear patch; everywhere else the interpolant is locally constant.
    fn active_squares(&self) -> Vec<(usize, usize)> {
        let (w, h) = (self.w, self.h);
        let b = &self.buf;
        let mut varying = vec![false; (w - 1) * (h - 1)];
        for j in 0..h - 1 {
            for i in 0..w - 1 {
                let k = j * w + i;
                let v = b[k];
                varying[j * (w - 1) + i] = b[k + 1] != v || b[k + w] != v || b[k + w + 1] != v;
            }
        }
        let mut out = Vec::new();
        for j in 0..h - 1 {
            for i in 0..w - 1 {
                let near = (j.saturating_sub(1)..(j + 2).min(h - 1))
                    .any(|jj| (i.saturating_sub(1)..(i + 2).min(w - 1)).any(|ii| varying[jj * (w - 1) + ii]));
                if near {
                    out.push((i, j));
                }
            }
        }
        out
    }
}

/// Cauchy–Crofton perimeter estimate.
///
/// For each of [`CROFTON_DIRECTIONS`] directions, lines one cell apart are
/// sampled every cell with bilinear interpolation; the total variation along
/// each line is summed and scaled by the spacing. The mean over directions,
/// times `π/2`, estimates the perimeter.
///
/// Only samples near a non-constant patch are visited: any other sample
/// equals its predecessor on the line.
pub fn perimeter_estimate(r: &RasterSet) -> f64 {
    let Some(crop) = Crop::new(r, 3) else {
        return 0.0;
    };
    let c = crop.center();
    let active = crop.active_squares();
    let mut total = 0.0;
    for d in 0..CROFTON_DIRECTIONS {
        let phi = PI * d as f64 / CROFTON_DIRECTIONS as f64;
        let (ey, ex) = phi.sin_cos();
        let e = Point::new(ex, ey);
        let n = Point::new(-ey, ex);
        let mut tv = 0.0;
        for &(i, j) in &active {
            // lattice points c + l·n + k·e whose position floors to (i, j)
            let q = Point::new(i as f64 + 0.5, j as f64 + 0.5) - c;
            let (lq, kq) = (q.dot(n), q.dot(e));
            let reach = std::f64::consts::FRAC_1_SQRT_2;
            for l in (lq - reach).ceil() as i64..=(lq + reach).floor() as i64 {
                for k in (kq - reach).ceil() as i64..=(kq + reach).floor() as i64 {
                    let p = c + n * l as f64 + e * k as f64;
                    if p.x.floor() != i as f64 || p.y.floor() != j as f64 {
                        continue;
                    }
                    tv += (crop.sample(p.x, p.y) - crop.sample(p.x - ex, p.y - ey)).abs();
                }
            }
        }
        total += tv * r.cell_size();
    }
    0.5 * PI * total / CROFTON_DIRECTIONS as f64
}

/// Boundary-band tolerance `8·h·perimeter` for raster comparisons.
pub fn epsilon_grid(r: &RasterSet) -> f64 {
    EPSILON_GRID_FACTOR * r.cell_size() * perimeter_estimate(r)
}

/// All metrics of a set. `ball` may carry a precomputed `M*` raster on the
/// set's grid (the area is invariant along a process).
pub fn measure(set: &PlanarSet, ball: Option<&RasterSet>) -> Result<MetricsRecord> {
    Ok(match set {
        PlanarSet::Polygon(p) => MetricsRecord {
            area: p.area(),
            mu: p.moment_of_inertia(),
            d1_to_ball: polygon_d1_to_ball(p)?,
            hausdorff_to_ball: Some(hausdorff_to_ball(p, &ball_of_same_area(p.area())?)),
            perimeter: p.perimeter(),
        },
        PlanarSet::Raster(r) => MetricsRecord {
            area: r.area(),
            mu: raster_moment(r),
            d1_to_ball: match ball {
                Some(b) => d1(r, b)?,
                None => d1_to_ball(r)?,
            },
            hausdorff_to_ball: None,
            perimeter: perimeter_estimate(r),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::planar_sets::{rasterize_polygon, Ball, GridSpec};

    fn square_raster(h: f64, x0: f64, y0: f64, n: usize) -> RasterSet {
        let g = GridSpec::centered(n, n, h).unwrap();
        let sq = ConvexPolygon::rectangle(x0, x0 + 1.0, y0, y0 + 1.0).unwrap();
        rasterize_polygon(&sq, &g).unwrap()
    }

    #[test]
    fn moments_of_square_and_disk() {
        let sq = ConvexPolygon::rectangle(-0.5, 0.5, -0.5, 0.5).unwrap();
        assert!((sq.moment_of_inertia() - 1.0 / 6.0).abs() < 1e-15);
        // full cells: exact
        let r = square_raster(0.05, -0.5, -0.5, 40);
        assert!((raster_moment(&r) - 1.0 / 6.0).abs() < 1e-12);

        let ball = ball_of_same_area(1.0).unwrap();
        let g = GridSpec::centered(200, 200, 0.006).unwrap();
        let disk = rasterize_ball(&ball, &g).unwrap();
        let mu = raster_moment(&disk);
        assert!((mu - 0.5 / PI).abs() < 1e-4, "{mu}");
        assert!(raster_moment(&r) > mu);
        let poly = ConvexPolygon::regular(4096, ball.radius, Point::default()).unwrap();
        assert!((poly.moment_of_inertia() / poly.area().powi(2) - 0.5 / PI).abs() < 1e-7);
    }

    #[test]
    fn d1_basics() {
        let a = square_raster(0.1, -1.0, -1.0, 40);
        let b = square_raster(0.1, 0.2, 0.1, 40);
        assert_eq!(d1(&a, &a).unwrap(), 0.0);
        assert!((d1(&a, &b).unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(d1(&a, &b).unwrap(), d1(&b, &a).unwrap());
        let other = square_raster(0.05, 0.0, 0.0, 80);
        assert!(d1(&a, &other).is_err());
        assert!(d1_resampled(&a, &other).is_ok());
    }

    #[test]
    fn concentric_balls() {
        let g = GridSpec::centered(128, 128, 2.2 / 128.0).unwrap();
        let a = rasterize_ball(&Ball { radius: 1.0 }, &g).unwrap();
        let b = rasterize_ball(&Ball { radius: 0.6 }, &g).unwrap();
        let want = PI * (1.0 - 0.36);
        assert!((d1(&a, &b).unwrap() - want).abs() <= epsilon_grid(&a));
        assert!((d1(&a, &b).unwrap() - want).abs() < 1e-9);
    }

    #[test]
    fn d1_to_ball_edge_cases() {
        let g = GridSpec::centered(64, 64, 0.05).unwrap();
        let ball = rasterize_ball(&ball_of_same_area(2.0).unwrap(), &g).unwrap();
        assert!(d1_to_ball(&ball).unwrap() <= epsilon_grid(&ball));
        assert!(d1_to_ball(&ball).unwrap() < 1e-9);
        assert_eq!(d1_to_ball(&RasterSet::empty(g)).unwrap(), 0.0);
    }

    /// Point-count estimate of `λ(S △ D)` on an `h`-lattice over `[-1, 1]²`.
    fn square_ball_oracle(h: f64) -> f64 {
        let r2 = 1.0 / PI;
        let n = (2.0 / h).round() as i64;
        let mut count = 0u64;
        for i in 0..n {
            let x = -1.0 + (i as f64 + 0.5) * h;
            for j in 0..n {
                let y = -1.0 + (j as f64 + 0.5) * h;
                let in_sq = x.abs() <= 0.5 && y.abs() <= 0.5;
                let in_disk = x * x + y * y <= r2;
                if in_sq != in_disk {
                    count += 1;
                }
            }
        }
        count as f64 * h * h
    }

    #[test]
    fn centered_square_to_ball() {
        let oracle = square_ball_oracle(1e-3);
        let sq = ConvexPolygon::rectangle(-0.5, 0.5, -0.5, 0.5).unwrap();
        let exact = polygon_d1_to_ball(&sq).unwrap();
        assert!((exact - oracle).abs() < 1e-4 * oracle.max(1.0), "{exact} vs {oracle}");
        for n in [50, 100, 200] {
            let g = GridSpec::fitted(n, n, 0.5f64.sqrt()).unwrap();
            let r = rasterize_polygon(&sq, &g).unwrap();
            let got = d1_to_ball(&r).unwrap();
            assert!((got - oracle).abs() < 0.02 * oracle, "n={n}: {got} vs {oracle}");
        }
    }

    #[test]
    fn hausdorff_square_vs_inscribed_ball() {
        // directed distances sampled every 1e-3 along the boundaries
        fn sampled(a: &ConvexPolygon, b: &ConvexPolygon) -> f64 {
            let pts = |p: &ConvexPolygon| {
                let v = p.vertices();
                let mut out = Vec::new();
                for i in 0..v.len() {
                    let (s, t) = (v[i], v[(i + 1) % v.len()]);
                    let k = ((t - s).norm() / 1e-3).ceil() as usize;
                    out.extend((0..k).map(|m| s + (t - s) * (m as f64 / k as f64)));
                }
                out
            };
            let dir = |x: &ConvexPolygon, y: &ConvexPolygon| {
                pts(x).into_iter().map(|p| y.distance_to(p)).fold(0.0, f64::max)
            };
            dir(a, b).max(dir(b, a))
        }
        let sq = ConvexPolygon::rectangle(-0.5, 0.5, -0.5, 0.5).unwrap();
        let mut values = Vec::new();
        for n in [64, 256, 1024] {
            let ball = ConvexPolygon::regular(n, 0.5, Point::default()).unwrap();
            let exact = crate::planar_sets::hausdorff(&sq, &ball);
            if n <= 256 {
                let s = sampled(&sq, &ball);
                assert!((exact - s).abs() < 1e-3, "{exact} vs {s}");
            }
            values.push(exact);
        }
        let limit = 0.5f64.sqrt() - 0.5;
        for v in &values {
            assert!((v - limit).abs() < 0.01 * limit, "{v}");
        }
    }

    /// Every lattice point of every line, no skipping.
    fn perimeter_full_sweep(r: &RasterSet) -> f64 {
        let Some(crop) = Crop::new(r, 3) else { return 0.0 };
        let c = crop.center();
        let reach = (0.5 * ((crop.w - 1) as f64).hypot((crop.h - 1) as f64)).ceil() as i64 + 2;
        let mut total = 0.0;
        for d in 0..CROFTON_DIRECTIONS {
            let phi = PI * d as f64 / CROFTON_DIRECTIONS as f64;
            let (ey, ex) = phi.sin_cos();
            let (e, n) = (Point::new(ex, ey), Point::new(-ey, ex));
            let mut tv = 0.0;
            for l in -reach..=reach {
                let mut prev = 0.0;
                for k in -reach..=reach {
                    let p = c + n * l as f64 + e * k as f64;
                    let inside = p.x >= 0.0 && p.y >= 0.0 && p.x <= (crop.w - 1) as f64 && p.y <= (crop.h - 1) as f64;
                    let v = if inside { crop.sample(p.x, p.y) } else { 0.0 };
                    tv += (v - prev).abs();
                    prev = v;
                }
            }
            total += tv * r.cell_size();
        }
        0.5 * PI * total / CROFTON_DIRECTIONS as f64
    }

    #[test]
    fn perimeter_skipping_matches_full_sweep() {
        let g = GridSpec::centered(60, 60, 0.05).unwrap();
        let tri = ConvexPolygon::from_tuples(&[(-1.2, -0.9), (1.3, -0.2), (0.1, 1.1)]).unwrap();
        let shapes = [
            rasterize_polygon(&tri, &g).unwrap(),
            rasterize_ball(&Ball { radius: 1.1 }, &g).unwrap(),
            crate::planar_sets::annulus_fixture(0.4, 1.0, &g).unwrap(),
        ];
        for s in &shapes {
            let (a, b) = (perimeter_estimate(s), perimeter_full_sweep(s));
            assert!((a - b).abs() < 1e-9 * b, "{a} vs {b}");
        }
    }

    #[test]
    fn perimeter_of_square_and_ball() {
        let g = GridSpec::centered(100, 100, 0.02).unwrap();
        let sq = rasterize_polygon(&ConvexPolygon::rectangle(-0.5, 0.5, -0.5, 0.5).unwrap(), &g).unwrap();
        let p = perimeter_estimate(&sq);
        assert!((p - 4.0).abs() < 0.05 * 4.0, "{p}");
        let g = GridSpec::centered(128, 128, 2.2 / 128.0).unwrap();
        let b = rasterize_ball(&Ball { radius: 1.0 }, &g).unwrap();
        let p = perimeter_estimate(&b);
        assert!((p - 2.0 * PI).abs() < 0.05 * 2.0 * PI, "{p}");
        assert_eq!(perimeter_estimate(&RasterSet::empty(g)), 0.0);
    }

    #[test]
    fn measure_polygon() {
        let sq = ConvexPolygon::rectangle(-0.5, 0.5, -0.5, 0.5).unwrap();
        let m = measure(&PlanarSet::Polygon(sq), None).unwrap();
        assert!((m.area - 1.0).abs() < 1e-15);
        assert!((m.perimeter - 4.0).abs() < 1e-15);
        assert!(m.hausdorff_to_ball.is_some());
    }
}
