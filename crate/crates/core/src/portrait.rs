//! Period-colored phase portraits.
//!
//! The phase square is laid out with every side taking an equal share of
//! each axis: a perimeter coordinate `X` in `(0,1)` is side `floor(nX)` at
//! fraction `nX - floor(nX)`. The tail runs horizontally, the head
//! vertically; cells are stored row-major with row 0 at the bottom
//! (smallest head coordinate). Images put row 0 at the bottom as well.

use std::collections::{BTreeMap, BTreeSet};
use std::ops::Range;

use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::billiard::{BilliardMap, FloatMap, FloatPhasePoint, OrbitMode, OrbitOptions, OrbitStatus, PhasePoint};
use crate::error::{ParseError, PortraitError};
use crate::geometry::Polygon;
use crate::rational::{Rat, RatText};

/// Above this many cells the default mode is float.
pub const EXACT_CELL_LIMIT: usize = 256 * 256;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Marker {
    Halted,
    Capped,
    Excised,
}

/// A cell is either a period or one of the markers; in JSON a bare number
/// or a string.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Period(usize),
    Marker(Marker),
}

impl Cell {
    pub fn period(&self) -> Option<usize> {
        match self {
            Cell::Period(p) => Some(*p),
            Cell::Marker(_) => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PortraitSpec {
    pub resolution: [usize; 2],
    pub max_steps: usize,
    pub mode: OrbitMode,
}

impl PortraitSpec {
    /// Exact mode up to [`EXACT_CELL_LIMIT`] cells, float beyond.
    pub fn new(nx: usize, ny: usize, max_steps: usize) -> Self {
        let mode = if nx * ny > EXACT_CELL_LIMIT { OrbitMode::Float } else { OrbitMode::Exact };
        PortraitSpec { resolution: [nx, ny], max_steps, mode }
    }

    pub fn with_mode(mut self, mode: OrbitMode) -> Self {
        self.mode = mode;
        self
    }

    fn check(&self) -> Result<(), PortraitError> {
        let [nx, ny] = self.resolution;
        if nx < 2 || ny < 2 {
            return Err(PortraitError::Resolution(nx, ny));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Portrait {
    pub polygon: Polygon,
    pub resolution: [usize; 2],
    pub max_steps: usize,
    pub mode: OrbitMode,
    /// Side boundaries along either axis, as perimeter coordinates.
    pub marks: Vec<RatText>,
    pub cells: Vec<Cell>,
    /// Period or marker name to `#rrggbb`.
    pub legend: BTreeMap<String, String>,
}

/// Perimeter coordinate of the center of cell `k` out of `cells`, as a
/// side index and fraction; `None` on a side boundary.
fn side_fraction(k: usize, cells: usize, sides: usize) -> Option<(usize, Rat)> {
    let x = Rat::new((2 * k + 1).into(), (2 * cells).into()) * Rat::from_integer(sides.into());
    let side = x.to_integer();
    let frac = &x - Rat::from_integer(side.clone());
    if frac.is_zero() {
        return None;
    }
    Some((side.try_into().expect("side index fits"), frac))
}

/// Phase point at the center of cell `(cx, cy)`, or the marker for cells
/// that have none.
pub fn cell_center(polygon: &Polygon, resolution: [usize; 2], cx: usize, cy: usize) -> Result<PhasePoint, Marker> {
    let n = polygon.len();
    let (Some((i, s)), Some((j, t))) = (side_fraction(cx, resolution[0], n), side_fraction(cy, resolution[1], n)) else {
        return Err(Marker::Halted);
    };
    if i == j || polygon.side_cross(i, j).is_zero() {
        return Err(Marker::Excised);
    }
    Ok(PhasePoint { tail_side: i, tail: s, head_side: j, head: t })
}

fn classify(status: &OrbitStatus) -> Cell {
    match status {
        OrbitStatus::Periodic { period } => Cell::Period(*period),
        OrbitStatus::HaltedForward { .. } => Cell::Marker(Marker::Halted),
        OrbitStatus::Capped { .. } => Cell::Marker(Marker::Capped),
    }
}

/// Cells of the given rows, row-major. Parallel over cells; the result does
/// not depend on the thread count.
pub fn compute_rows(map: &BilliardMap, spec: &PortraitSpec, rows: Range<usize>) -> Vec<Cell> {
    let [nx, _] = spec.resolution;
    let float = (spec.mode == OrbitMode::Float).then(|| FloatMap::new(map));
    let polygon = map.polygon();
    let start = rows.start * nx;
    let end = rows.end * nx;
    (start..end)
        .into_par_iter()
        .map(|idx| {
            let (cx, cy) = (idx % nx, idx / nx);
            match cell_center(polygon, spec.resolution, cx, cy) {
                Err(marker) => Cell::Marker(marker),
                Ok(pp) => match &float {
                    Some(fm) => classify(&fm.orbit(&FloatPhasePoint::from(&pp), spec.max_steps, false).status),
                    None => classify(&map.orbit(&pp, OrbitOptions::new(spec.max_steps)).status),
                },
            }
        })
        .collect()
}

/// Side boundaries `k/n` along an axis.
pub fn marks(polygon: &Polygon) -> Vec<RatText> {
    let n = polygon.len();
    (0..=n).map(|k| RatText(Rat::new(k.into(), n.into()))).collect()
}

pub fn compute(map: &BilliardMap, spec: PortraitSpec) -> Result<Portrait, PortraitError> {
    spec.check()?;
    let cells = compute_rows(map, &spec, 0..spec.resolution[1]);
    Ok(assemble(map.polygon(), spec, cells))
}

/// Builds a portrait from already computed cells.
pub fn assemble(polygon: &Polygon, spec: PortraitSpec, cells: Vec<Cell>) -> Portrait {
    let legend = legend(&cells);
    Portrait {
        polygon: polygon.clone(),
        resolution: spec.resolution,
        max_steps: spec.max_steps,
        mode: spec.mode,
        marks: marks(polygon),
        cells,
        legend,
    }
}

/// Colors handed out to periods in ascending order.
pub const PALETTE: [[u8; 3]; 12] = [
    [0xd6, 0x27, 0x28],
    [0x2c, 0xa0, 0x2c],
    [0x1f, 0x77, 0xb4],
    [0xff, 0x7f, 0x0e],
    [0x94, 0x67, 0xbd],
    [0x17, 0xbe, 0xcf],
    [0xbc, 0xbd, 0x22],
    [0xe3, 0x77, 0xc2],
    [0x8c, 0x56, 0x4b],
    [0x00, 0x3f, 0x7f],
    [0x7f, 0xff, 0x7f],
    [0xff, 0xd7, 0x00],
];
pub const EXCISED: [u8; 3] = [0, 0, 0];
pub const HALTED: [u8; 3] = [0xff, 0xff, 0xff];
pub const CAPPED: [u8; 3] = [0x80, 0x80, 0x80];

fn hex(c: [u8; 3]) -> String {
    format!("#{:02x}{:02x}{:02x}", c[0], c[1], c[2])
}

fn marker_name(m: Marker) -> &'static str {
    match m {
        Marker::Halted => "halted",
        Marker::Capped => "capped",
        Marker::Excised => "excised",
    }
}

fn marker_color(m: Marker) -> [u8; 3] {
    match m {
        Marker::Halted => HALTED,
        Marker::Capped => CAPPED,
        Marker::Excised => EXCISED,
    }
}

fn legend(cells: &[Cell]) -> BTreeMap<String, String> {
    let periods: BTreeSet<usize> = cells.iter().filter_map(Cell::period).collect();
    let mut out: BTreeMap<String, String> =
        periods.iter().enumerate().map(|(k, p)| (p.to_string(), hex(PALETTE[k % PALETTE.len()]))).collect();
    for m in [Marker::Halted, Marker::Capped, Marker::Excised] {
        if cells.contains(&Cell::Marker(m)) {
            out.insert(marker_name(m).to_string(), hex(marker_color(m)));
        }
    }
    out
}

fn parse_hex(s: &str) -> Option<[u8; 3]> {
    let s = s.strip_prefix('#')?;
    if s.len() != 6 {
        return None;
    }
    let b = |k: usize| u8::from_str_radix(&s[k..k + 2], 16).ok();
    Some([b(0)?, b(2)?, b(4)?])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ImageFormat {
    Ppm,
    Png,
}

impl ImageFormat {
    /// From a file extension or format name.
    pub fn from_name(name: &str) -> Result<Self, PortraitError> {
        match name.to_ascii_lowercase().as_str() {
            "ppm" => Ok(ImageFormat::Ppm),
            "png" => Ok(ImageFormat::Png),
            other => Err(PortraitError::UnsupportedFormat(other.to_string())),
        }
    }
}

impl Portrait {
    pub fn periods(&self) -> BTreeSet<usize> {
        self.cells.iter().filter_map(Cell::period).collect()
    }

    pub fn cell(&self, cx: usize, cy: usize) -> Cell {
        self.cells[cy * self.resolution[0] + cx]
    }

    fn color(&self, cell: Cell) -> [u8; 3] {
        let key = match cell {
            Cell::Period(p) => p.to_string(),
            Cell::Marker(m) => marker_name(m).to_string(),
        };
        self.legend.get(&key).and_then(|c| parse_hex(c)).unwrap_or(CAPPED)
    }

    /// RGB raster with `block x block` pixels per cell, top row first.
    pub fn raster(&self, block: usize) -> (usize, usize, Vec<u8>) {
        let [nx, ny] = self.resolution;
        let block = block.max(1);
        let (w, h) = (nx * block, ny * block);
        let mut data = Vec::with_capacity(w * h * 3);
        for row in 0..h {
            let cy = ny - 1 - row / block;
            for col in 0..w {
                data.extend_from_slice(&self.color(self.cell(col / block, cy)));
            }
        }
        (w, h, data)
    }

    pub fn render(&self, format: ImageFormat, block: usize) -> Result<Vec<u8>, PortraitError> {
        let (w, h, data) = self.raster(block);
        match format {
            ImageFormat::Ppm => {
                let mut out = format!("P6\n{w} {h}\n255\n").into_bytes();
                out.extend_from_slice(&data);
                Ok(out)
            }
            ImageFormat::Png => {
                let mut out = Vec::new();
                {
                    let mut enc = png::Encoder::new(&mut out, w as u32, h as u32);
                    enc.set_color(png::ColorType::Rgb);
                    enc.set_depth(png::BitDepth::Eight);
                    let mut writer = enc.write_header().map_err(|e| PortraitError::Encode(e.to_string()))?;
                    writer.write_image_data(&data).map_err(|e| PortraitError::Encode(e.to_string()))?;
                }
                Ok(out)
            }
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("portrait serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, PortraitError> {
        let p: Portrait = serde_json::from_str(text).map_err(|e| ParseError::Malformed(e.to_string()))?;
        let [nx, ny] = p.resolution;
        if p.cells.len() != nx * ny {
            return Err(ParseError::Malformed(format!("{} cells for {nx}x{ny}", p.cells.len())).into());
        }
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{half, ratio};

    fn triangle() -> BilliardMap {
        BilliardMap::new(Polygon::from_ints(&[(0, 0), (1, 0), (0, 1)]).unwrap())
    }

    #[test]
    fn cell_centers_map_to_side_fractions() {
        let p = triangle();
        // 6 cells over 3 sides: centers at 1/4 and 3/4 of each side
        let pp = cell_center(p.polygon(), [6, 6], 1, 2).unwrap();
        assert_eq!((pp.tail_side, pp.tail, pp.head_side, pp.head), (0, ratio(3, 4), 1, ratio(1, 4)));
        assert_eq!(cell_center(p.polygon(), [6, 6], 0, 1), Err(Marker::Excised));
        // 3 cells over 3 sides: centers at the midpoints
        let pp = cell_center(p.polygon(), [3, 3], 0, 1).unwrap();
        assert_eq!(pp.tail, half());
    }

    #[test]
    fn centers_on_side_boundaries_are_halted() {
        // two cells over four sides: the second center is at perimeter 3
        let square = Polygon::from_ints(&[(0, 0), (1, 0), (1, 1), (0, 1)]).unwrap();
        assert_eq!(cell_center(&square, [2, 2], 0, 1), Err(Marker::Halted));
        assert!(cell_center(triangle().polygon(), [2, 2], 0, 1).is_ok());
    }

    #[test]
    fn two_by_two_triangle() {
        let m = triangle();
        let p = compute(&m, PortraitSpec::new(2, 2, 100)).unwrap();
        assert_eq!(p.cells.len(), 4);
        for cy in 0..2 {
            for cx in 0..2 {
                let want = match cell_center(m.polygon(), [2, 2], cx, cy) {
                    Err(marker) => Cell::Marker(marker),
                    Ok(pp) => classify(&m.orbit(&pp, OrbitOptions::new(100)).status),
                };
                assert_eq!(p.cell(cx, cy), want);
            }
        }
    }

    #[test]
    fn excised_cells_are_black() {
        let m = triangle();
        let p = compute(&m, PortraitSpec::new(6, 6, 50)).unwrap();
        assert_eq!(p.cell(0, 0), Cell::Marker(Marker::Excised));
        let (w, h, data) = p.raster(1);
        assert_eq!((w, h), (6, 6));
        // cell (0,0) is the bottom-left pixel
        let px = (5 * w) * 3;
        assert_eq!(&data[px..px + 3], &EXCISED);
        assert_eq!(p.legend.get("excised").map(String::as_str), Some("#000000"));
    }

    #[test]
    fn export_import_render_is_identical() {
        let m = triangle();
        let p = compute(&m, PortraitSpec::new(9, 9, 50)).unwrap();
        let back = Portrait::from_json(&p.to_json()).unwrap();
        assert_eq!(back, p);
        for f in [ImageFormat::Ppm, ImageFormat::Png] {
            assert_eq!(p.render(f, 2).unwrap(), back.render(f, 2).unwrap());
        }
        assert!(matches!(ImageFormat::from_name("gif"), Err(PortraitError::UnsupportedFormat(_))));
    }

    #[test]
    fn resolution_must_be_at_least_two() {
        assert!(matches!(compute(&triangle(), PortraitSpec::new(1, 5, 10)), Err(PortraitError::Resolution(1, 5))));
    }

    #[test]
    fn default_mode_switches_to_float_for_large_grids() {
        assert_eq!(PortraitSpec::new(256, 256, 1).mode, OrbitMode::Exact);
        assert_eq!(PortraitSpec::new(257, 256, 1).mode, OrbitMode::Float);
    }
}
