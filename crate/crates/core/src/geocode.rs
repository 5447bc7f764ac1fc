//! The queryable address map: pipeline composition, forward geocoding
//! (address -> coordinates) and reverse geocoding (coordinates -> address).

use std::collections::HashMap;

use crate::codec::AddressRecord;
use crate::error::{Error, Result};
use crate::graph::{EdgeId, RoadGraph, Side};
use crate::index::SpatialIndex;
use crate::label::{
    block_letter, house_number, label_regions, number_roads, RegionLabel, RoadName, UNIT_STEP_M,
};
use crate::partition::{densest_region, partition, PartitionParams, RegionAssignment, RegionId};
use crate::proj::Equirect;

/// Everything `AddressMap::build` needs besides the graph.
#[derive(Debug, Clone)]
pub struct BuildOptions {
    pub partition: PartitionParams,
    pub city: String,
    pub state_code: Option<String>,
    pub country_code: String,
    pub version_year: Option<u16>,
    /// (lat, lon) anchoring local meters on the globe, when known.
    pub geo_anchor: Option<(f64, f64)>,
}

impl BuildOptions {
    pub fn new(city: &str, country: &str) -> Self {
        Self {
            partition: PartitionParams::default(),
            city: city.to_string(),
            state_code: None,
            country_code: country.to_string(),
            version_year: None,
            geo_anchor: None,
        }
    }
}

/// A forward-geocoded position: local meters plus (lat, lon) when the map is
/// anchored.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeocodedPoint {
    pub x: f64,
    pub y: f64,
    pub lat_lon: Option<(f64, f64)>,
}

/// Immutable labeled map answering forward and inverse geoqueries.
#[derive(Debug, Clone)]
pub struct AddressMap {
    graph: RoadGraph,
    assignment: RegionAssignment,
    region_labels: HashMap<RegionId, RegionLabel>,
    road_names: Vec<RoadName>,
    road_lookup: HashMap<(String, u64), EdgeId>,
    index: SpatialIndex,
    pub city: String,
    pub state_code: Option<String>,
    pub country_code: String,
    pub version_year: Option<u16>,
    pub geo_anchor: Option<(f64, f64)>,
}

impl AddressMap {
    /// Run partition -> densest-region -> labeling -> numbering and index the
    /// result. Deterministic for identical inputs.
    pub fn build(graph: RoadGraph, options: &BuildOptions) -> Result<Self> {
        let assignment = partition(&graph, &options.partition)?;
        let densest = densest_region(&assignment);
        let region_labels = label_regions(&assignment, densest);
        let names = number_roads(&graph, &assignment, &region_labels)?;

        let mut road_names = Vec::with_capacity(graph.edge_count());
        let mut road_lookup = HashMap::new();
        for id in graph.edge_ids() {
            let name = names
                .get(&id)
                .ok_or_else(|| Error::Validation(format!("edge {id} missing a road name")))?;
            road_lookup.insert((name.region.to_string(), name.number), id);
            road_names.push(name.clone());
        }

        let index = SpatialIndex::build(&graph);
        Ok(Self {
            graph,
            assignment,
            region_labels,
            road_names,
            road_lookup,
            index,
            city: options.city.clone(),
            state_code: options.state_code.clone(),
            country_code: options.country_code.clone(),
            version_year: options.version_year,
            geo_anchor: options.geo_anchor,
        })
    }

    /// Reconstruct a map from persisted parts (see the store module).
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn from_parts(
        graph: RoadGraph,
        assignment: RegionAssignment,
        region_labels: HashMap<RegionId, RegionLabel>,
        road_names: Vec<RoadName>,
        city: String,
        state_code: Option<String>,
        country_code: String,
        version_year: Option<u16>,
        geo_anchor: Option<(f64, f64)>,
    ) -> Self {
        let road_lookup = road_names
            .iter()
            .enumerate()
            .map(|(i, name)| ((name.region.to_string(), name.number), EdgeId(i as u32)))
            .collect();
        let index = SpatialIndex::build(&graph);
        Self {
            graph,
            assignment,
            region_labels,
            road_names,
            road_lookup,
            index,
            city,
            state_code,
            country_code,
            version_year,
            geo_anchor,
        }
    }

    pub fn graph(&self) -> &RoadGraph {
        &self.graph
    }

    pub fn assignment(&self) -> &RegionAssignment {
        &self.assignment
    }

    pub fn region_label(&self, id: RegionId) -> &RegionLabel {
        &self.region_labels[&id]
    }

    pub fn road_name(&self, edge: EdgeId) -> &RoadName {
        &self.road_names[edge.0 as usize]
    }

    pub fn region_count(&self) -> usize {
        self.assignment.regions.len()
    }

    pub fn road_count(&self) -> usize {
        self.graph.edge_count()
    }

    pub fn total_length_km(&self) -> f64 {
        self.graph.total_length_m() / 1000.0
    }

    fn check_geo(&self, record: &AddressRecord) -> Result<()> {
        let matches = record.city == self.city
            && record.state_code == self.state_code
            && record.country_code == self.country_code;
        if !matches {
            let fmt = |state: &Option<String>, country: &str, city: &str| {
                format!("{city}.{}{country}", state.as_deref().unwrap_or(""))
            };
            return Err(Error::CityMismatch {
                expected: fmt(&self.state_code, &self.country_code, &self.city),
                got: fmt(&record.state_code, &record.country_code, &record.city),
            });
        }
        Ok(())
    }

    /// Address -> coordinates: the center of the 5 m x 5 m unit cell the
    /// address names, clamped to the road extent.
    pub fn geocode(&self, record: &AddressRecord) -> Result<GeocodedPoint> {
        self.check_geo(record)?;
        let region_known = self
            .region_labels
            .values()
            .any(|label| label.to_string() == record.region);
        if !region_known {
            return Err(Error::UnknownRegion(record.region.clone()));
        }
        let edge = *self
            .road_lookup
            .get(&(record.region.clone(), record.road_number))
            .ok_or_else(|| Error::UnknownRoad(format!("{}{}", record.region, record.road_number)))?;

        let e = self.graph.edge(edge);
        let marker = record.house_number / 2;
        let side = if record.house_number.is_multiple_of(2) {
            Side::Left
        } else {
            Side::Right
        };
        let along = (marker as f64 * UNIT_STEP_M + UNIT_STEP_M / 2.0).clamp(0.0, e.length_m);
        let bin = crate::label::base26_decode(&record.block)
            .ok_or_else(|| Error::Validation(format!("bad block letters {:?}", record.block)))?;
        let offset = bin as f64 * UNIT_STEP_M + UNIT_STEP_M / 2.0;

        let (bx, by) = self.graph.point_at(edge, along)?;
        let (dx, dy) = self.graph.direction_at(edge, along)?;
        let normal = match side {
            Side::Left | Side::On => (-dy, dx),
            Side::Right => (dy, -dx),
        };
        let x = bx + offset * normal.0;
        let y = by + offset * normal.1;
        let lat_lon = self
            .geo_anchor
            .map(|(lat0, lon0)| Equirect::new(lat0, lon0).unproject(x, y));
        Ok(GeocodedPoint { x, y, lat_lon })
    }

    /// Coordinates -> address of the nearest road's unit cell.
    pub fn reverse_geocode(&self, p: (f64, f64)) -> Result<AddressRecord> {
        let lref = self.graph.locate(&self.index, p)?;
        let name = self.road_name(lref.edge);
        Ok(AddressRecord {
            house_number: house_number(lref.along_m, lref.side),
            block: block_letter(lref.offset_m),
            region: name.region.to_string(),
            road_number: name.number,
            city: self.city.clone(),
            state_code: self.state_code.clone(),
            country_code: self.country_code.clone(),
            version_year: self.version_year,
        })
    }

    /// Reverse geocoding for geodetic input; requires an anchored map.
    pub fn reverse_geocode_lat_lon(&self, lat: f64, lon: f64) -> Result<AddressRecord> {
        let (lat0, lon0) = self.geo_anchor.ok_or_else(|| {
            Error::Validation("map has no geodetic anchor; use local coordinates".into())
        })?;
        let p = Equirect::new(lat0, lon0).project(lat, lon);
        self.reverse_geocode(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixture::GridCity;

    fn straight_road_map() -> AddressMap {
        let graph = RoadGraph::assemble(vec![vec![(0.0, 0.0), (0.0, 100.0)]]).unwrap();
        AddressMap::build(graph, &BuildOptions::new("Testville", "In")).unwrap()
    }

    fn grid_options() -> BuildOptions {
        BuildOptions {
            partition: PartitionParams {
                max_region_edges: 6,
                ncut_stop: 0.65,
                ..PartitionParams::default()
            },
            ..BuildOptions::new("Testville", "In")
        }
    }

    #[test]
    fn single_edge_map_names_road_ca1() {
        let map = straight_road_map();
        assert_eq!(map.region_count(), 1);
        assert_eq!(map.road_name(EdgeId(0)).to_string(), "CA1");
    }

    #[test]
    fn grid_city_map_has_12_named_roads_in_2_regions() {
        let map = AddressMap::build(GridCity::default().graph(), &grid_options()).unwrap();
        assert_eq!(map.region_count(), 2);
        assert_eq!(map.road_count(), 12);
        // All names unique.
        let mut names: Vec<String> = map
            .graph()
            .edge_ids()
            .map(|e| map.road_name(e).to_string())
            .collect();
        names.sort();
        names.dedup();
        assert_eq!(names.len(), 12);
    }

    #[test]
    fn empty_graph_is_degenerate() {
        assert!(matches!(
            RoadGraph::assemble(vec![]),
            Err(Error::DegenerateInput(_))
        ));
    }

    #[test]
    fn geocode_unit_cell_center() {
        let map = straight_road_map();
        let record = crate::codec::parse("0A.CA1.Testville.In").unwrap();
        let p = map.geocode(&record).unwrap();
        // 2.5 m from the south end, 2.5 m west of the centerline.
        assert!((p.x - -2.5).abs() < 1e-9);
        assert!((p.y - 2.5).abs() < 1e-9);
        assert_eq!(p.lat_lon, None);
    }

    #[test]
    fn reverse_geocode_centerline_point_is_block_a() {
        let map = straight_road_map();
        let r = map.reverse_geocode((0.0, 30.0)).unwrap();
        assert_eq!(r.block, "A");
        assert_eq!(r.house_number, 12); // marker 6, left side
        assert_eq!(r.road_number, 1);
    }

    #[test]
    fn reverse_geocode_right_offset_example() {
        let map = straight_road_map();
        // 7 m right (east) of the 12 m mark.
        let r = map.reverse_geocode((7.0, 12.0)).unwrap();
        assert_eq!(r.house_number, 5);
        assert_eq!(r.block, "B");
    }

    #[test]
    fn unknown_road_and_region_are_typed_errors() {
        let map = straight_road_map();
        let record = crate::codec::parse("0A.CA999.Testville.In").unwrap();
        assert!(matches!(map.geocode(&record), Err(Error::UnknownRoad(_))));
        let record = crate::codec::parse("0A.NA1.Testville.In").unwrap();
        assert!(matches!(map.geocode(&record), Err(Error::UnknownRegion(_))));
    }

    #[test]
    fn wrong_city_is_a_mismatch() {
        let map = straight_road_map();
        let record = crate::codec::parse("0A.CA1.Elsewhere.In").unwrap();
        assert!(matches!(map.geocode(&record), Err(Error::CityMismatch { .. })));
        let record = crate::codec::parse("0A.CA1.Testville.MhIn").unwrap();
        assert!(matches!(map.geocode(&record), Err(Error::CityMismatch { .. })));
    }

    #[test]
    fn geocode_reverse_geocode_round_trip_on_grid() {
        let map = AddressMap::build(GridCity::default().graph(), &grid_options()).unwrap();
        let mut checked = 0usize;
        for edge in map.graph().edge_ids() {
            let e = map.graph().edge(edge);
            let markers = (e.length_m / UNIT_STEP_M).floor() as u64;
            for marker in 0..=markers {
                for (side_bit, block_bin) in [(0u64, 0u64), (1, 0), (0, 1), (1, 1)] {
                    let record = AddressRecord {
                        house_number: 2 * marker + side_bit,
                        block: crate::label::base26_encode(block_bin),
                        region: map.road_name(edge).region.to_string(),
                        road_number: map.road_name(edge).number,
                        city: map.city.clone(),
                        state_code: map.state_code.clone(),
                        country_code: map.country_code.clone(),
                        version_year: map.version_year,
                    };
                    let p = map.geocode(&record).unwrap();
                    // Only cells whose center is nearest their own road count.
                    let lref = map.graph().locate(&map.index, (p.x, p.y)).unwrap();
                    if lref.edge != edge {
                        continue;
                    }
                    let back = map.reverse_geocode((p.x, p.y)).unwrap();
                    assert_eq!(back, record, "unit at {:?}", (p.x, p.y));
                    checked += 1;
                }
            }
        }
        assert!(checked > 500, "only {checked} units checked");
    }

    #[test]
    fn anchored_map_returns_lat_lon() {
        let graph = RoadGraph::assemble(vec![vec![(0.0, 0.0), (0.0, 100.0)]]).unwrap();
        let mut options = BuildOptions::new("Testville", "In");
        options.geo_anchor = Some((20.9, 74.77));
        let map = AddressMap::build(graph, &options).unwrap();
        let record = crate::codec::parse("0A.CA1.Testville.In").unwrap();
        let p = map.geocode(&record).unwrap();
        let (lat, lon) = p.lat_lon.unwrap();
        assert!((lat - 20.9).abs() < 0.001);
        assert!((lon - 74.77).abs() < 0.001);
        // Reverse via lat/lon recovers the same record.
        let back = map.reverse_geocode_lat_lon(lat, lon).unwrap();
        assert_eq!(back.road_number, record.road_number);
    }

    #[test]
    fn unanchored_lat_lon_query_is_an_error() {
        let map = straight_road_map();
        assert!(map.reverse_geocode_lat_lon(0.0, 0.0).is_err());
    }
}
