//! Raster-to-vector road extraction: skeletonize the binary road mask, trace
//! centerline pixel chains, bridge gaps using the underlying confidences,
//! straighten chain endpoints, and assemble the topological road graph.

mod build;
mod chains;
mod thin;

pub use build::build_graph;
pub use chains::{filter_endpoints, join_chains, trace_chains};
pub use thin::thin;

use crate::error::{Error, Result};
use crate::graph::RoadGraph;
use crate::raster::{binarize, ConfidenceRaster};

/// Tunables for the extraction pipeline. The defaults assume the 0.5 m/px
/// ground sampling of the road-confidence rasters this pipeline was built for.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtractParams {
    /// Binarization threshold on the 8-bit confidences.
    pub threshold: u8,
    /// Maximum endpoint gap (pixels) bridged by chain joining.
    pub join_radius_px: u32,
    /// Minimum mean confidence along a candidate bridge.
    pub join_confidence: u8,
    /// Window (pixels) used for endpoint orientation and straightening.
    pub endpoint_window_px: u32,
    /// Number of orientation classes over [0, 180).
    pub orientation_buckets: u32,
    /// Chains shorter than this many pixels are discarded as noise.
    pub min_chain_px: u32,
}

impl Default for ExtractParams {
    fn default() -> Self {
        Self {
            threshold: 128,
            join_radius_px: 10,
            join_confidence: 64,
            endpoint_window_px: 7,
            orientation_buckets: 4,
            min_chain_px: 6,
        }
    }
}

impl ExtractParams {
    pub fn validate(&self) -> Result<()> {
        if self.join_radius_px == 0
            || self.endpoint_window_px == 0
            || self.orientation_buckets == 0
            || self.min_chain_px == 0
        {
            return Err(Error::Validation("extraction parameters must be positive".into()));
        }
        if !180u32.is_multiple_of(self.orientation_buckets) {
            return Err(Error::Validation(format!(
                "orientation_buckets must divide 180 evenly, got {}",
                self.orientation_buckets
            )));
        }
        Ok(())
    }

    /// Width of one orientation class in degrees.
    pub fn bucket_width_deg(&self) -> f64 {
        180.0 / self.orientation_buckets as f64
    }
}

/// A traced centerline: 8-connected skeleton pixels plus the estimated
/// orientation (degrees, [0,180)) at each end.
#[derive(Debug, Clone, PartialEq)]
pub struct PixelChain {
    /// Ordered (col, row) pixels; consecutive pixels are 8-neighbors.
    pub pixels: Vec<(i32, i32)>,
    /// Orientation at [start, end], estimated over the terminal window.
    pub endpoint_dirs: [f64; 2],
}

impl PixelChain {
    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }
}

/// Full raster-to-graph pipeline.
pub fn extract_graph(raster: &ConfidenceRaster, params: &ExtractParams) -> Result<RoadGraph> {
    params.validate()?;
    let mask = binarize(raster, params.threshold);
    let skeleton = thin(&mask);
    let chains = trace_chains(&skeleton, params);
    let chains = join_chains(chains, raster, params);
    let chains = filter_endpoints(chains, params);
    build_graph(&chains, params, &raster.transform)
}
