//! Area-weighted resampling between grids related by an affine map.

use super::geometry::{quad_box_area, Point};

/// Affine placement of a `width × height` grid: cell `(i, j)` covers the
/// parallelogram `base + [i, i+1]·ex + [j, j+1]·ey` in world coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Frame {
    pub base: Point,
    pub ex: Point,
    pub ey: Point,
    pub width: usize,
    pub height: usize,
}

impl Frame {
    /// Square grid of odd size `n` and cell `cell`, centered at the origin,
    /// with its `i` axis along `(cos a, sin a)`.
    pub fn rotated_square(n: usize, cell: f64, angle: f64) -> Frame {
        let (s, c) = angle.sin_cos();
        let ex = Point::new(c, s) * cell;
        let ey = Point::new(-s, c) * cell;
        let half = n as f64 / 2.0;
        Frame {
            base: -(ex * half + ey * half),
            ex,
            ey,
            width: n,
            height: n,
        }
    }

    /// Mirror image across the line through the origin orthogonal to `u`.
    pub fn reflected(&self, u: Point) -> Frame {
        let r = |p: Point| p - u * (2.0 * p.dot(u));
        Frame {
            base: r(self.base),
            ex: r(self.ex),
            ey: r(self.ey),
            ..*self
        }
    }

    fn det(&self) -> f64 {
        self.ex.cross(self.ey)
    }

    /// World point → continuous index coordinates.
    fn index_of(&self, p: Point) -> Point {
        self.index_of_vec(p - self.base)
    }

    fn index_of_vec(&self, v: Point) -> Point {
        let d = self.det();
        Point::new(v.cross(self.ey) / d, self.ex.cross(v) / d)
    }
}

/// Resamples `src` (laid out on `sf`) onto `df`.
///
/// Each destination cell receives the mass of every source cell it overlaps,
/// weighted by the exact overlap area, divided by its own area. Mass is
/// conserved wherever `df` covers the support of `src`.
pub(crate) fn resample(src: &[f64], sf: &Frame, df: &Frame) -> Vec<f64> {
    debug_assert_eq!(src.len(), sf.width * sf.height);
    let origin = sf.index_of(df.base);
    let a = sf.index_of_vec(df.ex);
    let b = sf.index_of_vec(df.ey);
    let dst_area = a.cross(b).abs();
    let (sw, sh) = (sf.width as i64, sf.height as i64);
    let value = |i: i64, j: i64| -> f64 {
        if i < 0 || j < 0 || i >= sw || j >= sh {
            0.0
        } else {
            src[(j * sw + i) as usize]
        }
    };

    // Skip destination rows/columns whose footprint misses the source support.
    let mut out = vec![0.0; df.width * df.height];
    let mut quad = [Point::default(); 4];
    for dj in 0..df.height {
        let row_origin = origin + b * dj as f64;
        for di in 0..df.width {
            let q00 = row_origin + a * di as f64;
            quad[0] = q00;
            quad[1] = q00 + a;
            quad[2] = q00 + a + b;
            quad[3] = q00 + b;
            let (mut lo_x, mut lo_y, mut hi_x, mut hi_y) = (q00.x, q00.y, q00.x, q00.y);
            for q in &quad[1..] {
                lo_x = lo_x.min(q.x);
                lo_y = lo_y.min(q.y);
                hi_x = hi_x.max(q.x);
                hi_y = hi_y.max(q.y);
            }
            if hi_x <= 0.0 || hi_y <= 0.0 || lo_x >= sw as f64 || lo_y >= sh as f64 {
                continue;
            }
            let i0 = lo_x.floor() as i64;
            let i1 = hi_x.ceil() as i64;
            let j0 = lo_y.floor() as i64;
            let j1 = hi_y.ceil() as i64;

            let first = value(i0, j0);
            let mut uniform = true;
            'scan: for j in j0..j1 {
                for i in i0..i1 {
                    if value(i, j) != first {
                        uniform = false;
                        break 'scan;
                    }
                }
            }
            let v = if uniform {
                first
            } else {
                let mut mass = 0.0;
                for j in j0..j1 {
                    for i in i0..i1 {
                        let s = value(i, j);
                        if s != 0.0 {
                            mass += s * quad_box_area(
                                &quad,
                                i as f64,
                                (i + 1) as f64,
                                j as f64,
                                (j + 1) as f64,
                            );
                        }
                    }
                }
                mass / dst_area
            };
            out[dj * df.width + di] = v;
        }
    }
    out
}
