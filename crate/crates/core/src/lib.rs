//! Generative street addressing for unmapped areas.
//!
//! The pipeline turns road-confidence rasters (or OSM extracts) into a
//! complete, queryable address map: extract centerlines into a road graph,
//! partition the graph into regions of tightly connected roads, label
//! regions/roads/address units, then answer forward and inverse geoqueries
//! over the result.

mod eigen;

pub mod codec;
pub mod error;
pub mod extract;
pub mod fixture;
pub mod geocode;
pub mod geojson;
pub mod graph;
pub mod index;
pub mod label;
pub mod osm;
pub mod partition;
pub mod proj;
pub mod raster;
pub mod store;

pub use codec::AddressRecord;
pub use error::{Error, Result};
pub use extract::{extract_graph, ExtractParams, PixelChain};
pub use geocode::{AddressMap, BuildOptions, GeocodedPoint};
pub use graph::{Edge, EdgeId, LinearRef, NodeId, RoadGraph, Side};
pub use index::SpatialIndex;
pub use label::{RegionLabel, RoadName};
pub use partition::{AffinitySigma, PartitionParams, RegionId};
pub use raster::{binarize, load_raster, save_raster, BinaryMask, ConfidenceRaster, GeoTransform};
