//! Reading and writing sets: PGM rasters and plain-text polygons.
//!
//! PGM files use maxval 65535 and carry grid placement in a comment line
//! `# cellsize=<h> ox=<ox> oy=<oy>`; without it the grid has unit cells and
//! is centered at the origin. Rows are stored top row first.
//!
//! Polygon files hold one `x y` pair per line; `#` starts a comment.

use std::fs;
use std::path::Path;

use super::geometry::Point;
use super::polygon::ConvexPolygon;
use super::raster::{GridSpec, RasterSet};
use super::PlanarSet;
use crate::error::{Error, Result};
use crate::fmt::num;

pub const PGM_MAXVAL: u32 = 65535;

/// On-disk encodings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SetFormat {
    /// ASCII PGM (`P2`).
    PgmAscii,
    /// Binary PGM (`P5`).
    PgmBinary,
    PolygonText,
}

impl SetFormat {
    pub const EXPECTED: &'static str = "PGM (P2 or P5) raster, or polygon text with one `x y` pair per line";
}

fn quantize(v: f64) -> u16 {
    (v.clamp(0.0, 1.0) * PGM_MAXVAL as f64).round() as u16
}

/// Encodes a raster as PGM.
pub fn pgm_bytes(set: &RasterSet, binary: bool) -> Vec<u8> {
    let g = set.grid();
    let mut out = format!(
        "{}\n# cellsize={} ox={} oy={}\n{} {}\n{}\n",
        if binary { "P5" } else { "P2" },
        num(g.cell),
        num(g.origin.x),
        num(g.origin.y),
        g.width,
        g.height,
        PGM_MAXVAL
    )
    .into_bytes();
    for j in (0..g.height).rev() {
        if binary {
            for i in 0..g.width {
                out.extend_from_slice(&quantize(set.get(i, j)).to_be_bytes());
            }
        } else {
            let row: Vec<String> = (0..g.width).map(|i| quantize(set.get(i, j)).to_string()).collect();
            out.extend_from_slice(row.join(" ").as_bytes());
            out.push(b'\n');
        }
    }
    out
}

struct Header {
    binary: bool,
    width: usize,
    height: usize,
    maxval: u32,
    cell: Option<f64>,
    origin: Option<Point>,
    data_start: usize,
}

fn parse_meta(comment: &str, cell: &mut Option<f64>, ox: &mut Option<f64>, oy: &mut Option<f64>) -> Result<()> {
    for field in comment.split_whitespace() {
        let Some((key, value)) = field.split_once('=') else {
            continue;
        };
        let slot = match key {
            "cellsize" => &mut *cell,
            "ox" => &mut *ox,
            "oy" => &mut *oy,
            _ => continue,
        };
        let v: f64 = value
            .parse()
            .map_err(|_| Error::parse("PGM metadata", format!("bad value `{value}` for {key}")))?;
        *slot = Some(v);
    }
    Ok(())
}

fn parse_header(bytes: &[u8]) -> Result<Header> {
    let err = |m: String| Error::parse("PGM header", m);
    let binary = match bytes.get(..2) {
        Some(b"P2") => false,
        Some(b"P5") => true,
        _ => return Err(err("missing P2/P5 magic".into())),
    };
    let (mut cell, mut ox, mut oy) = (None, None, None);
    let mut fields = Vec::with_capacity(3);
    let mut pos = 2;
    while fields.len() < 3 {
        match bytes.get(pos) {
            None => return Err(err("truncated header".into())),
            Some(b'#') => {
                let end = bytes[pos..].iter().position(|&b| b == b'\n').map_or(bytes.len(), |e| pos + e);
                parse_meta(&String::from_utf8_lossy(&bytes[pos + 1..end]), &mut cell, &mut ox, &mut oy)?;
                pos = end;
            }
            Some(b) if b.is_ascii_whitespace() => pos += 1,
            Some(_) => {
                let end = bytes[pos..]
                    .iter()
                    .position(|b| b.is_ascii_whitespace() || *b == b'#')
                    .map_or(bytes.len(), |e| pos + e);
                let tok = String::from_utf8_lossy(&bytes[pos..end]);
                let v: u64 = tok.parse().map_err(|_| err(format!("bad header field `{tok}`")))?;
                fields.push(v);
                pos = end;
            }
        }
    }
    // exactly one whitespace byte separates maxval from binary data
    if binary {
        if !bytes.get(pos).is_some_and(|b| b.is_ascii_whitespace()) {
            return Err(err("missing separator after maxval".into()));
        }
        pos += 1;
    }
    let (width, height, maxval) = (fields[0] as usize, fields[1] as usize, fields[2]);
    if width == 0 || height == 0 {
        return Err(err(format!("empty image {width}x{height}")));
    }
    if maxval == 0 || maxval > PGM_MAXVAL as u64 {
        return Err(err(format!("maxval {maxval} outside 1..=65535")));
    }
    let origin = match (ox, oy) {
        (None, None) => None,
        (x, y) => Some(Point::new(x.unwrap_or(0.0), y.unwrap_or(0.0))),
    };
    Ok(Header {
        binary,
        width,
        height,
        maxval: maxval as u32,
        cell,
        origin,
        data_start: pos,
    })
}

/// Decodes a P2 or P5 image.
pub fn parse_pgm(bytes: &[u8]) -> Result<RasterSet> {
    let h = parse_header(bytes)?;
    let n = h.width * h.height;
    let data = &bytes[h.data_start..];
    let values: Vec<u32> = if h.binary {
        let wide = h.maxval > 255;
        let need = if wide { 2 * n } else { n };
        if data.len() < need {
            return Err(Error::parse("PGM data", format!("expected {need} bytes, found {}", data.len())));
        }
        if wide {
            data[..need].chunks_exact(2).map(|c| u16::from_be_bytes([c[0], c[1]]) as u32).collect()
        } else {
            data[..need].iter().map(|&b| b as u32).collect()
        }
    } else {
        let text = std::str::from_utf8(data).map_err(|_| Error::parse("PGM data", "not ASCII"))?;
        let vals = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or(""))
            .flat_map(str::split_whitespace)
            .map(|t| t.parse::<u32>().map_err(|_| Error::parse("PGM data", format!("bad sample `{t}`"))))
            .collect::<Result<Vec<_>>>()?;
        if vals.len() != n {
            return Err(Error::parse("PGM data", format!("expected {n} samples, found {}", vals.len())));
        }
        vals
    };
    if let Some(v) = values.iter().find(|&&v| v > h.maxval) {
        return Err(Error::parse("PGM data", format!("sample {v} exceeds maxval {}", h.maxval)));
    }
    let grid = GridSpec::new(h.width, h.height, h.cell.unwrap_or(1.0), h.origin.unwrap_or_default())?;
    let mut occ = vec![0.0; n];
    for (k, &v) in values.iter().enumerate() {
        let (row, i) = (k / h.width, k % h.width);
        occ[(h.height - 1 - row) * h.width + i] = v as f64 / h.maxval as f64;
    }
    RasterSet::new(grid, occ)
}

/// Parses polygon text; clockwise input is reoriented by [`ConvexPolygon::new`].
pub fn parse_polygon(text: &str) -> Result<ConvexPolygon> {
    let mut pts = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let ctx = || format!("polygon line {}", lineno + 1);
        let mut it = body.split([' ', '\t', ',']).filter(|t| !t.is_empty());
        let mut coord = || -> Result<f64> {
            let t = it.next().ok_or_else(|| Error::parse(ctx(), "expected `x y`"))?;
            let v: f64 = t.parse().map_err(|_| Error::parse(ctx(), format!("bad number `{t}`")))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(Error::parse(ctx(), format!("non-finite coordinate `{t}`")))
            }
        };
        let p = Point::new(coord()?, coord()?);
        if it.next().is_some() {
            return Err(Error::parse(ctx(), "expected exactly two numbers"));
        }
        pts.push(p);
    }
    ConvexPolygon::new(pts)
}

pub fn polygon_text(poly: &ConvexPolygon) -> String {
    let mut s = String::from("# x y, counterclockwise\n");
    for v in poly.vertices() {
        s.push_str(&format!("{} {}\n", num(v.x), num(v.y)));
    }
    s
}

/// Decodes a set, detecting the format from its content.
pub fn parse_set(bytes: &[u8]) -> Result<(PlanarSet, SetFormat)> {
    let start = bytes.iter().position(|b| !b.is_ascii_whitespace()).unwrap_or(bytes.len());
    match bytes.get(start..start + 2) {
        Some(b"P2") | Some(b"P5") => {
            let format = if bytes[start + 1] == b'5' {
                SetFormat::PgmBinary
            } else {
                SetFormat::PgmAscii
            };
            Ok((PlanarSet::Raster(parse_pgm(&bytes[start..])?), format))
        }
        _ => {
            let text = std::str::from_utf8(bytes).map_err(|_| unrecognized("binary data without a PGM magic"))?;
            let poly = parse_polygon(text).map_err(|e| match e {
                Error::Parse { message, context } => unrecognized(&format!("{context}: {message}")),
                other => other,
            })?;
            Ok((PlanarSet::Polygon(poly), SetFormat::PolygonText))
        }
    }
}

fn unrecognized(detail: &str) -> Error {
    Error::parse("set file", format!("unrecognized format ({detail}); expected {}", SetFormat::EXPECTED))
}

pub fn encode_set(set: &PlanarSet, format: SetFormat) -> Result<Vec<u8>> {
    match (set, format) {
        (PlanarSet::Polygon(p), SetFormat::PolygonText) => Ok(polygon_text(p).into_bytes()),
        (PlanarSet::Raster(r), SetFormat::PgmAscii) => Ok(pgm_bytes(r, false)),
        (PlanarSet::Raster(r), SetFormat::PgmBinary) => Ok(pgm_bytes(r, true)),
        (s, f) => Err(Error::BackendMismatch(format!("cannot write a {} set as {f:?}", s.backend()))),
    }
}

pub fn read_set(path: &Path) -> Result<(PlanarSet, SetFormat)> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    parse_set(&bytes).map_err(|e| match e {
        Error::Parse { context, message } => Error::parse(format!("{}: {context}", path.display()), message),
        other => other,
    })
}

pub fn write_set(set: &PlanarSet, format: SetFormat, path: &Path) -> Result<()> {
    let bytes = encode_set(set, format)?;
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

pub fn write_pgm(set: &RasterSet, path: &Path) -> Result<()> {
    fs::write(path, pgm_bytes(set, true)).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> RasterSet {
        let g = GridSpec::new(3, 2, 0.25, Point::new(0.5, -1.0)).unwrap();
        RasterSet::new(g, vec![0.0, 0.5, 1.0, 0.25, 0.0, 1.0]).unwrap()
    }

    #[test]
    fn pgm_roundtrip_both_encodings() {
        let r = sample();
        for binary in [false, true] {
            let bytes = pgm_bytes(&r, binary);
            let back = parse_pgm(&bytes).unwrap();
            assert_eq!(back.grid(), r.grid());
            for (a, b) in back.occupancy().iter().zip(r.occupancy()) {
                assert!((a - b).abs() <= 0.5 / 65535.0);
            }
        }
    }

    #[test]
    fn ascii_pgm_top_row_first() {
        let text = "P2\n# a comment\n2 2\n# another\n4\n4 0\n0 2\n";
        let r = parse_pgm(text.as_bytes()).unwrap();
        assert_eq!(r.occupancy(), &[0.0, 0.5, 1.0, 0.0]);
        assert_eq!(r.cell_size(), 1.0);
        assert_eq!(r.grid().origin, Point::default());
    }

    #[test]
    fn pgm_errors() {
        assert!(parse_pgm(b"P2\n2 2\n4\n1 2 3\n").is_err());
        assert!(parse_pgm(b"P2\n2 2\n4\n1 2 3 9\n").is_err());
        assert!(parse_pgm(b"P2\n2 2\n70000\n1 2 3 4\n").is_err());
        assert!(parse_pgm(b"P5\n2 2\n65535\n\x00\x01").is_err());
        assert!(parse_pgm(b"P2\n# cellsize=abc\n1 1\n1\n1\n").is_err());
    }

    #[test]
    fn polygon_roundtrip_and_reorientation() {
        let p = parse_polygon("# square\n0 0\n0 1 # cw\n1 1\n1 0\n").unwrap();
        assert!((p.area() - 1.0).abs() < 1e-15);
        let q = parse_polygon(&polygon_text(&p)).unwrap();
        assert_eq!(p, q);
        assert!(parse_polygon("0 0\n1 0 2\n0 1\n").is_err());
        assert!(parse_polygon("0 0\n1 nan\n0 1\n").is_err());
    }

    #[test]
    fn sniffing() {
        let (s, f) = parse_set(&pgm_bytes(&sample(), true)).unwrap();
        assert_eq!((s.backend(), f), ("raster", SetFormat::PgmBinary));
        let (s, f) = parse_set(b"0 0\n1 0\n0 1\n").unwrap();
        assert_eq!((s.backend(), f), ("polygon", SetFormat::PolygonText));
        let e = parse_set(b"hello world\n").unwrap_err().to_string();
        assert!(e.contains("PGM") && e.contains("polygon"), "{e}");
        let e = parse_set(&[0xff, 0xfe, 0x00]).unwrap_err().to_string();
        assert!(e.contains("expected"), "{e}");
    }

    #[test]
    fn mismatched_encoding_rejected() {
        let p = PlanarSet::Raster(sample());
        assert!(encode_set(&p, SetFormat::PolygonText).is_err());
    }
}
