//! Synthetic map fixtures with known ground truth, used by tests, benches,
//! and demos: a rasterized grid city plus small analytic graphs.

use crate::graph::RoadGraph;
use crate::raster::{ConfidenceRaster, GeoTransform};

/// Confidence painted on road pixels in synthetic rasters.
pub const ROAD_CONFIDENCE: u8 = 220;

/// A square grid city: `lines` north-south and `lines` east-west roads at
/// `spacing_m` intervals, starting at the local origin.
#[derive(Debug, Clone, Copy)]
pub struct GridCity {
    pub lines: usize,
    pub spacing_m: f64,
    pub pixel_size: f64,
}

impl Default for GridCity {
    fn default() -> Self {
        Self {
            lines: 3,
            spacing_m: 100.0,
            pixel_size: 0.5,
        }
    }
}

impl GridCity {
    pub fn extent_m(&self) -> f64 {
        (self.lines - 1) as f64 * self.spacing_m
    }

    /// True centerline segments in world meters.
    pub fn centerlines(&self) -> Vec<[(f64, f64); 2]> {
        let ext = self.extent_m();
        let mut segments = Vec::new();
        for i in 0..self.lines {
            let c = i as f64 * self.spacing_m;
            segments.push([(c, 0.0), (c, ext)]); // north-south
            segments.push([(0.0, c), (ext, c)]); // east-west
        }
        segments
    }

    /// Rasterize the grid at `pixel_size` with 3-px-wide roads. Road
    /// coordinates land exactly on pixel centers so the true centerline is
    /// recoverable.
    pub fn raster(&self) -> ConfidenceRaster {
        let margin_px = 10i32;
        let ext_px = (self.extent_m() / self.pixel_size).round() as i32;
        let size = (ext_px + 2 * margin_px + 1) as usize;
        let origin_x = -(margin_px as f64) * self.pixel_size;
        let origin_y = self.extent_m() + margin_px as f64 * self.pixel_size;
        let transform = GeoTransform::new(self.pixel_size, self.pixel_size, origin_x, origin_y)
            .expect("positive pixel size");

        let mut values = vec![0u8; size * size];
        for seg in self.centerlines() {
            draw_segment(&mut values, size, &transform, seg, 1.5, ROAD_CONFIDENCE);
        }
        ConfidenceRaster::new(size, size, values, transform).expect("valid fixture raster")
    }

    /// The analytic road graph the raster encodes: (lines x lines) nodes and
    /// 2 * lines * (lines - 1) edges of length `spacing_m`.
    pub fn graph(&self) -> RoadGraph {
        let mut segments = Vec::new();
        for i in 0..self.lines {
            let c = i as f64 * self.spacing_m;
            for j in 0..self.lines - 1 {
                let a = j as f64 * self.spacing_m;
                let b = (j + 1) as f64 * self.spacing_m;
                segments.push(vec![(c, a), (c, b)]);
                segments.push(vec![(a, c), (b, c)]);
            }
        }
        RoadGraph::assemble(segments).expect("grid fixture graph")
    }

    /// Expected node degrees for the default 3x3 grid: 4 corners of degree 2,
    /// 4 edge midpoints of degree 3, 1 center of degree 4.
    pub fn expected_degree_histogram(&self) -> Vec<(usize, usize)> {
        let n = self.lines;
        vec![
            (2, 4),
            (3, 4 * (n - 2)),
            (4, (n - 2) * (n - 2)),
        ]
    }

    /// Distance from `p` to the nearest true centerline.
    pub fn centerline_error_m(&self, p: (f64, f64)) -> f64 {
        self.centerlines()
            .iter()
            .map(|seg| point_segment_distance(p, seg[0], seg[1]))
            .fold(f64::INFINITY, f64::min)
    }
}

/// Paint all pixels within `radius_px` of the world segment.
fn draw_segment(
    values: &mut [u8],
    size: usize,
    transform: &GeoTransform,
    seg: [(f64, f64); 2],
    radius_px: f64,
    confidence: u8,
) {
    let (c0, r0) = transform.world_to_pixel(seg[0].0, seg[0].1);
    let (c1, r1) = transform.world_to_pixel(seg[1].0, seg[1].1);
    let lo_c = (c0.min(c1) - radius_px).floor() as i32;
    let hi_c = (c0.max(c1) + radius_px).ceil() as i32;
    let lo_r = (r0.min(r1) - radius_px).floor() as i32;
    let hi_r = (r0.max(r1) + radius_px).ceil() as i32;
    for r in lo_r.max(0)..=hi_r.min(size as i32 - 1) {
        for c in lo_c.max(0)..=hi_c.min(size as i32 - 1) {
            let d = point_segment_distance((c as f64, r as f64), (c0, r0), (c1, r1));
            if d <= radius_px {
                values[r as usize * size + c as usize] = confidence;
            }
        }
    }
}

fn point_segment_distance(p: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len2 = dx * dx + dy * dy;
    let t = if len2 > 0.0 {
        (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let (qx, qy) = (a.0 + t * dx, a.1 + t * dy);
    ((p.0 - qx).powi(2) + (p.1 - qy).powi(2)).sqrt()
}
