#![allow(dead_code)]

use std::f64::consts::{PI, TAU};

use kf_steiner::metrics::{d1, epsilon_grid, perimeter_estimate, raster_moment};
use kf_steiner::planar_sets::{
    ball_of_same_area, hausdorff, rasterize_ball, rasterize_union, steiner_polygon, steiner_raster_report,
    ConvexPolygon, GridSpec, Point, RasterSet,
};
use kf_steiner::sequences::DirectionAngle;
use rand::Rng;

pub fn dir(theta: f64) -> DirectionAngle {
    DirectionAngle::from_theta(theta).unwrap()
}

/// Strictly convex polygon: vertices on a rotated, shifted ellipse.
pub fn random_convex_polygon<R: Rng>(rng: &mut R, max_radius: f64, max_shift: f64) -> ConvexPolygon {
    loop {
        let n = rng.gen_range(3..=12);
        let mut angles: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..TAU)).collect();
        angles.sort_by(f64::total_cmp);
        let a = rng.gen_range(0.3..max_radius);
        let b = rng.gen_range(0.3..max_radius);
        let (s, c) = rng.gen_range(0.0..PI).sin_cos();
        let center = Point::new(rng.gen_range(-max_shift..max_shift), rng.gen_range(-max_shift..max_shift));
        let pts: Vec<Point> = angles
            .iter()
            .map(|t| {
                let (x, y) = (a * t.cos(), b * t.sin());
                center + Point::new(c * x - s * y, s * x + c * y)
            })
            .collect();
        if let Ok(p) = ConvexPolygon::new(pts) {
            if p.area() > 0.05 {
                return p;
            }
        }
    }
}

/// Union of one to three random convex pieces, all inside the disk of radius 2.2.
pub fn random_pieces<R: Rng>(rng: &mut R) -> Vec<ConvexPolygon> {
    let k = rng.gen_range(1..=3);
    (0..k).map(|_| random_convex_polygon(rng, 1.2, 0.9)).collect()
}

pub fn random_raster<R: Rng>(rng: &mut R, grid: &GridSpec) -> RasterSet {
    rasterize_union(&random_pieces(rng), grid).unwrap()
}

/// Grid of `n × n` cells holding the disk of radius 2.5.
pub fn test_grid(n: usize) -> GridSpec {
    GridSpec::fitted(n, n, 2.5).unwrap()
}

pub fn max_abs_diff(a: &RasterSet, b: &RasterSet) -> f64 {
    a.occupancy()
        .iter()
        .zip(b.occupancy())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn vertex_sets_match(a: &ConvexPolygon, b: &ConvexPolygon, tol: f64) -> bool {
    let covered = |x: &ConvexPolygon, y: &ConvexPolygon| {
        x.vertices()
            .iter()
            .all(|p| y.vertices().iter().any(|q| (*p - *q).norm() <= tol))
    };
    covered(a, b) && covered(b, a)
}

/// Area, symmetry, idempotence and moment checks for one polygon symmetral.
pub fn check_polygon_symmetral(p: &ConvexPolygon, d: &DirectionAngle) -> Result<(), String> {
    let s = steiner_polygon(p, d).map_err(|e| e.to_string())?;
    let tol = 1e-9 * p.diameter().max(1.0);
    let area_err = (s.area() - p.area()).abs() / p.area();
    if area_err > 1e-9 {
        return Err(format!("area changed by {area_err:e} (relative)"));
    }
    if !vertex_sets_match(&s, &s.reflect(d), tol) {
        return Err("symmetral is not symmetric about u⊥".into());
    }
    let ss = steiner_polygon(&s, d).map_err(|e| e.to_string())?;
    let h = hausdorff(&ss, &s);
    if h > tol {
        return Err(format!("not idempotent: hausdorff {h:e}"));
    }
    let (mu0, mu1) = (p.moment_of_inertia(), s.moment_of_inertia());
    if mu1 > mu0 + 1e-9 {
        return Err(format!("moment rose from {mu0} to {mu1}"));
    }
    Ok(())
}

fn ball_like(r: &RasterSet) -> RasterSet {
    rasterize_ball(&ball_of_same_area(r.area()).unwrap(), r.grid()).unwrap()
}

/// Every single-set raster property for `S_u M`, at tolerance
/// `ε_grid = 8h · max perimeter` over the sets involved.
pub fn check_raster_symmetral(m: &RasterSet, d: &DirectionAngle) -> Result<(), String> {
    let (s, report) = steiner_raster_report(m, d).map_err(|e| e.to_string())?;
    if report.drift.abs() > 0.01 {
        return Err(format!("drift {:e} before renormalization", report.drift));
    }
    if (s.mass() - m.mass()).abs() > 1e-12 * m.mass() {
        return Err(format!("mass {} -> {}", m.mass(), s.mass()));
    }
    let eps = epsilon_grid(m).max(epsilon_grid(&s));
    let (mu0, mu1) = (raster_moment(m), raster_moment(&s));
    if mu1 > mu0 + eps {
        return Err(format!("moment rose from {mu0} to {mu1} (ε {eps})"));
    }
    let asym = d1(&s, &s.reflect(d)).unwrap();
    if asym > eps {
        return Err(format!("asymmetry {asym} > ε {eps}"));
    }
    let ss = steiner_raster_report(&s, d).map_err(|e| e.to_string())?.0;
    let idem = d1(&ss, &s).unwrap();
    if idem > eps {
        return Err(format!("not idempotent: {idem} > ε {eps}"));
    }
    let (p0, p1) = (perimeter_estimate(m), perimeter_estimate(&s));
    if p1 > 1.05 * p0 {
        return Err(format!("perimeter rose from {p0} to {p1}"));
    }
    Ok(())
}

/// d₁ contraction of `S_u` and the same inequality for the centered balls.
pub fn check_raster_pair(a: &RasterSet, b: &RasterSet, d: &DirectionAngle) -> Result<(), String> {
    let sa = steiner_raster_report(a, d).map_err(|e| e.to_string())?.0;
    let sb = steiner_raster_report(b, d).map_err(|e| e.to_string())?.0;
    let eps = [a, b, &sa, &sb].iter().map(|r| epsilon_grid(r)).fold(0.0, f64::max);
    let before = d1(a, b).unwrap();
    let after = d1(&sa, &sb).unwrap();
    if after > before + eps {
        return Err(format!("d1 grew from {before} to {after} (ε {eps})"));
    }
    let balls = d1(&ball_like(a), &ball_like(b)).unwrap();
    if balls > before + eps {
        return Err(format!("d1 of balls {balls} > d1 {before} + ε {eps}"));
    }
    Ok(())
}

/// `S_u B` against `B` for the centered ball of the given radius.
pub fn ball_defect(grid: &GridSpec, radius: f64, d: &DirectionAngle) -> (f64, f64) {
    let b = rasterize_ball(&kf_steiner::planar_sets::Ball { radius }, grid).unwrap();
    let s = steiner_raster_report(&b, d).unwrap().0;
    (d1(&s, &b).unwrap(), epsilon_grid(&b))
}
