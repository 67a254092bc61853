//! Planar sets and their Steiner symmetrals.
//!
//! Two backends: [`ConvexPolygon`] symmetrizes exactly through its chord
//! profile, and [`RasterSet`] holds an occupancy-fraction grid for general
//! sets of finite area (disconnected, hollow, nonconvex).

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::sequences::DirectionAngle;

pub mod geometry;
pub mod io;
pub mod polygon;
pub mod raster;
mod resample;

pub use geometry::Point;
pub use polygon::{hausdorff, hausdorff_to_ball, steiner_polygon, steiner_polygon_with, ConvexPolygon};
pub use io::SetFormat;
pub use raster::{
    annulus_fixture, rasterize_ball, rasterize_polygon, rasterize_union, steiner_raster, steiner_raster_report, steiner_raster_with, GridSpec,
    Rearrangement, RasterSet, SteinerReport,
};

/// A closed ball centered at the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ball {
    pub radius: f64,
}

impl Ball {
    pub fn area(&self) -> f64 {
        PI * self.radius * self.radius
    }
}

/// The centered ball with the given area.
pub fn ball_of_same_area(area: f64) -> Result<Ball> {
    if area.is_nan() || area < 0.0 {
        return Err(Error::Domain(format!("area must be >= 0, got {area}")));
    }
    Ok(Ball {
        radius: (area / PI).sqrt(),
    })
}

/// Either backend.
#[derive(Debug, Clone, PartialEq)]
pub enum PlanarSet {
    Polygon(ConvexPolygon),
    Raster(RasterSet),
}

impl PlanarSet {
    pub fn steiner(&self, dir: &DirectionAngle) -> Result<PlanarSet> {
        Ok(match self {
            PlanarSet::Polygon(p) => PlanarSet::Polygon(steiner_polygon(p, dir)?),
            PlanarSet::Raster(r) => PlanarSet::Raster(steiner_raster(r, dir)?),
        })
    }

    pub fn area(&self) -> f64 {
        match self {
            PlanarSet::Polygon(p) => p.area(),
            PlanarSet::Raster(r) => r.area(),
        }
    }

    pub fn backend(&self) -> &'static str {
        match self {
            PlanarSet::Polygon(_) => "polygon",
            PlanarSet::Raster(_) => "raster",
        }
    }
}
