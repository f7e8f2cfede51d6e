//! Hit-count rasterization of 2-D point sets and binary PGM output.
//!
//! Rendering is deterministic: pixel assignment and tone mapping involve no
//! randomness and no platform-dependent float formatting, so a fixed point
//! set always produces identical bytes.

use fhutch_core::PointSet;

/// A grayscale hit-count raster over a rectangular viewport.
#[derive(Debug)]
pub struct RasterImage {
    width: usize,
    height: usize,
    /// `(x0, y0, x1, y1)` world rectangle; `x0 < x1`, `y0 < y1`.
    viewport: (f64, f64, f64, f64),
    counts: Vec<u32>,
}

impl RasterImage {
    pub fn new(
        width: usize,
        height: usize,
        viewport: (f64, f64, f64, f64),
    ) -> Result<Self, String> {
        if width == 0 || height == 0 {
            return Err(format!("raster size {width}x{height} must be at least 1x1"));
        }
        let (x0, y0, x1, y1) = viewport;
        if !(x0.is_finite() && y0.is_finite() && x1.is_finite() && y1.is_finite()) {
            return Err("viewport must be finite".to_string());
        }
        if !(x0 < x1 && y0 < y1) {
            return Err("viewport must be nondegenerate (x0 < x1 and y0 < y1)".to_string());
        }
        Ok(RasterImage { width, height, viewport, counts: vec![0; width * height] })
    }

    /// Tight bounding box of `set` expanded by a 5% margin per axis; a
    /// degenerate axis falls back to a half-width of ½ so single points and
    /// axis-aligned segments still render.
    pub fn auto_viewport(set: &PointSet) -> (f64, f64, f64, f64) {
        let (lo, hi) = set.bounding_box();
        let expand = |lo: f64, hi: f64| {
            let extent = hi - lo;
            if extent > 0.0 {
                (lo - 0.05 * extent, hi + 0.05 * extent)
            } else {
                (lo - 0.5, hi + 0.5)
            }
        };
        let (x0, x1) = expand(lo[0], hi[0]);
        let (y0, y1) = expand(lo[1], hi[1]);
        (x0, y0, x1, y1)
    }

    /// Splat every point to its nearest pixel (row 0 is the viewport's top
    /// edge). Points outside the viewport are dropped.
    pub fn splat(&mut self, set: &PointSet) {
        let (x0, y0, x1, y1) = self.viewport;
        for p in set.iter() {
            let (x, y) = (p[0], p[1]);
            if x < x0 || x > x1 || y < y0 || y > y1 {
                continue;
            }
            let col = ((x - x0) / (x1 - x0) * (self.width - 1) as f64).round() as usize;
            let row = ((y1 - y) / (y1 - y0) * (self.height - 1) as f64).round() as usize;
            self.counts[row.min(self.height - 1) * self.width + col.min(self.width - 1)] += 1;
        }
    }

    /// Binary PGM (P5, maxval 255). Empty pixels are black; hit pixels are
    /// tone-mapped logarithmically to `1..=255` so sparse attractors stay
    /// visible next to dense ones.
    pub fn to_pgm(&self) -> Vec<u8> {
        let cmax = self.counts.iter().copied().max().unwrap_or(0).max(1) as f64;
        let denom = (1.0 + cmax).ln();
        let mut out = format!("P5\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.reserve(self.counts.len());
        for &c in &self.counts {
            let v = if c == 0 {
                0u8
            } else {
                let shade = 1.0 + 254.0 * (1.0 + c as f64).ln() / denom;
                shade.round().clamp(1.0, 255.0) as u8
            };
            out.push(v);
        }
        out
    }
}
