//! GeoJSON export: one LineString feature per road, one Point feature per
//! region centroid. Anchored maps export (lon, lat); unanchored maps export
//! local meters and say so in a foreign member.

use std::path::Path;

use serde_json::{json, Value};

use crate::error::Result;
use crate::extract::PixelChain;
use crate::geocode::AddressMap;
use crate::proj::Equirect;
use crate::raster::GeoTransform;

/// Build the FeatureCollection for a map.
pub fn map_to_geojson(map: &AddressMap) -> Value {
    let proj = map.geo_anchor.map(|(lat, lon)| Equirect::new(lat, lon));
    let coord = |x: f64, y: f64| -> Value {
        match &proj {
            Some(p) => {
                let (lat, lon) = p.unproject(x, y);
                json!([lon, lat])
            }
            None => json!([x, y]),
        }
    };

    let mut features = Vec::new();
    for (id, e) in map.graph().edges() {
        let coords: Vec<Value> = e.polyline.iter().map(|&(x, y)| coord(x, y)).collect();
        let name = map.road_name(id);
        features.push(json!({
            "type": "Feature",
            "geometry": { "type": "LineString", "coordinates": coords },
            "properties": {
                "road_name": name.to_string(),
                "region": name.region.to_string(),
                "length_m": e.length_m,
            },
        }));
    }
    for rid in map.assignment().region_ids() {
        let region = map.assignment().region(rid);
        let (cx, cy) = region.centroid;
        features.push(json!({
            "type": "Feature",
            "geometry": { "type": "Point", "coordinates": coord(cx, cy) },
            "properties": {
                "region_label": map.region_label(rid).to_string(),
                "density": region.road_density(),
            },
        }));
    }

    let mut collection = json!({
        "type": "FeatureCollection",
        "features": features,
    });
    if proj.is_none() {
        collection["coordinate_note"] =
            json!("coordinates are local planar meters (map has no geodetic anchor)");
    }
    collection
}

/// Write the map's FeatureCollection to `path`.
pub fn export_geojson(map: &AddressMap, path: &Path) -> Result<()> {
    let text = serde_json::to_string_pretty(&map_to_geojson(map)).expect("valid json");
    std::fs::write(path, text)?;
    Ok(())
}

/// Debug dump: traced pixel chains as LineStrings in world meters.
pub fn chains_to_geojson(chains: &[PixelChain], transform: &GeoTransform) -> Value {
    let features: Vec<Value> = chains
        .iter()
        .enumerate()
        .map(|(i, chain)| {
            let coords: Vec<Value> = chain
                .pixels
                .iter()
                .map(|&(c, r)| {
                    let (x, y) = transform.pixel_to_world(c as f64, r as f64);
                    json!([x, y])
                })
                .collect();
            json!({
                "type": "Feature",
                "geometry": { "type": "LineString", "coordinates": coords },
                "properties": { "chain": i, "pixels": chain.pixels.len() },
            })
        })
        .collect();
    json!({
        "type": "FeatureCollection",
        "features": features,
        "coordinate_note": "coordinates are local planar meters",
    })
}
