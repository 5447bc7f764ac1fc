//! OSM XML ingestion: read the <node>/<way> subset, keep highway ways, and
//! convert them into the road-graph model via an equirectangular projection
//! about the data's centroid.

use std::collections::{BTreeMap, HashMap};
use std::io::BufRead;
use std::path::Path;

use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;

use crate::error::{Error, Result};
use crate::graph::RoadGraph;
use crate::proj::Equirect;

/// The road-relevant subset of an OSM extract: resolved highway ways plus
/// the nodes they reference.
#[derive(Debug, Clone)]
pub struct OsmSubset {
    /// Node id -> (lat, lon), only nodes referenced by kept ways.
    pub nodes: BTreeMap<i64, (f64, f64)>,
    /// Way id -> ordered node ids (all resolved, length >= 2).
    pub ways: BTreeMap<i64, Vec<i64>>,
    /// Count of dropped unresolved node references and discarded short ways.
    pub warnings: usize,
}

struct PendingWay {
    id: i64,
    refs: Vec<i64>,
    is_highway: bool,
}

/// Parse an OSM XML file, retaining only ways that carry a "highway" tag.
/// Unresolvable node references are dropped with a warning count; ways left
/// with fewer than 2 nodes are discarded the same way.
pub fn parse_osm(path: &Path) -> Result<OsmSubset> {
    let file = std::fs::File::open(path)?;
    parse_osm_reader(std::io::BufReader::new(file))
}

fn parse_osm_reader<R: BufRead>(input: R) -> Result<OsmSubset> {
    let mut reader = Reader::from_reader(input);
    reader.config_mut().trim_text(true);

    let mut all_nodes: HashMap<i64, (f64, f64)> = HashMap::new();
    let mut ways: Vec<PendingWay> = Vec::new();
    let mut current: Option<PendingWay> = None;
    let mut buf = Vec::new();

    loop {
        let event = reader
            .read_event_into(&mut buf)
            .map_err(|e| Error::Parse(format!("bad OSM XML: {e}")))?;
        match event {
            Event::Eof => break,
            Event::Start(ref e) | Event::Empty(ref e) => {
                let self_closing = matches!(event, Event::Empty(_));
                match e.name().as_ref() {
                    b"node" => {
                        let id = attr_parse::<i64>(e, b"id")?;
                        let lat = attr_parse::<f64>(e, b"lat")?;
                        let lon = attr_parse::<f64>(e, b"lon")?;
                        all_nodes.insert(id, (lat, lon));
                    }
                    b"way" => {
                        let way = PendingWay {
                            id: attr_parse::<i64>(e, b"id")?,
                            refs: Vec::new(),
                            is_highway: false,
                        };
                        if self_closing {
                            ways.push(way);
                        } else {
                            current = Some(way);
                        }
                    }
                    b"nd" => {
                        if let Some(way) = current.as_mut() {
                            way.refs.push(attr_parse::<i64>(e, b"ref")?);
                        }
                    }
                    b"tag" => {
                        if let Some(way) = current.as_mut() {
                            if attr_value(e, b"k")?.as_deref() == Some("highway") {
                                way.is_highway = true;
                            }
                        }
                    }
                    _ => {}
                }
            }
            Event::End(ref e) if e.name().as_ref() == b"way" => {
                ways.extend(current.take());
            }
            _ => {}
        }
        buf.clear();
    }

    let mut subset = OsmSubset {
        nodes: BTreeMap::new(),
        ways: BTreeMap::new(),
        warnings: 0,
    };
    for way in ways {
        if !way.is_highway {
            continue;
        }
        let resolved: Vec<i64> = way
            .refs
            .iter()
            .copied()
            .filter(|id| all_nodes.contains_key(id))
            .collect();
        subset.warnings += way.refs.len() - resolved.len();
        if resolved.len() < 2 {
            subset.warnings += 1;
            continue;
        }
        for &id in &resolved {
            subset.nodes.insert(id, all_nodes[&id]);
        }
        subset.ways.insert(way.id, resolved);
    }
    Ok(subset)
}

fn attr_value(e: &BytesStart<'_>, key: &[u8]) -> Result<Option<String>> {
    for attr in e.attributes() {
        let attr = attr.map_err(|err| Error::Parse(format!("bad OSM attribute: {err}")))?;
        if attr.key.as_ref() == key {
            let v = attr
                .unescape_value()
                .map_err(|err| Error::Parse(format!("bad OSM attribute value: {err}")))?;
            return Ok(Some(v.into_owned()));
        }
    }
    Ok(None)
}

fn attr_parse<T: std::str::FromStr>(e: &BytesStart<'_>, key: &[u8]) -> Result<T> {
    let name = String::from_utf8_lossy(key).into_owned();
    let raw = attr_value(e, key)?
        .ok_or_else(|| Error::Parse(format!("OSM element missing attribute {name:?}")))?;
    raw.parse()
        .map_err(|_| Error::Parse(format!("bad OSM attribute {name}={raw:?}")))
}

/// Build a road graph from the subset. The projection anchors at the node
/// centroid; way vertices shared by two or more ways (and every way end)
/// become intersections.
pub fn to_graph(subset: &OsmSubset) -> Result<(RoadGraph, (f64, f64))> {
    if subset.ways.is_empty() {
        return Err(Error::DegenerateInput("no highway ways in OSM input".into()));
    }

    let n = subset.nodes.len() as f64;
    let (lat_sum, lon_sum) = subset
        .nodes
        .values()
        .fold((0.0, 0.0), |(a, b), &(lat, lon)| (a + lat, b + lon));
    let anchor = (lat_sum / n, lon_sum / n);
    let proj = Equirect::new(anchor.0, anchor.1);

    let mut uses: HashMap<i64, usize> = HashMap::new();
    for refs in subset.ways.values() {
        for &id in refs {
            *uses.entry(id).or_insert(0) += 1;
        }
    }

    let mut segments: Vec<Vec<(f64, f64)>> = Vec::new();
    for refs in subset.ways.values() {
        let mut start = 0usize;
        for i in 1..refs.len() {
            let interior = i + 1 < refs.len();
            if interior && uses[&refs[i]] >= 2 {
                segments.push(project_run(&refs[start..=i], subset, &proj));
                start = i;
            }
        }
        segments.push(project_run(&refs[start..], subset, &proj));
    }
    let graph = RoadGraph::assemble(segments)?;
    Ok((graph, anchor))
}

fn project_run(ids: &[i64], subset: &OsmSubset, proj: &Equirect) -> Vec<(f64, f64)> {
    ids.iter()
        .map(|id| {
            let (lat, lon) = subset.nodes[id];
            proj.project(lat, lon)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse_str(xml: &str) -> Result<OsmSubset> {
        parse_osm_reader(std::io::Cursor::new(xml.as_bytes()))
    }

    const CROSSING: &str = r#"<?xml version="1.0" encoding="UTF-8"?>
<osm version="0.6">
  <node id="1" lat="20.900" lon="74.770"/>
  <node id="2" lat="20.902" lon="74.772"/>
  <node id="3" lat="20.904" lon="74.774"/>
  <node id="4" lat="20.904" lon="74.770"/>
  <node id="5" lat="20.900" lon="74.774"/>
  <way id="10">
    <nd ref="1"/>
    <nd ref="2"/>
    <nd ref="3"/>
    <tag k="highway" v="residential"/>
  </way>
  <way id="11">
    <nd ref="4"/>
    <nd ref="2"/>
    <nd ref="5"/>
    <tag k="highway" v="residential"/>
  </way>
</osm>
"#;

    #[test]
    fn minimal_highway_way_is_kept() {
        let xml = r#"<osm>
          <node id="1" lat="0.0" lon="0.0"/>
          <node id="2" lat="0.001" lon="0.0"/>
          <way id="5"><nd ref="1"/><nd ref="2"/><tag k="highway" v="track"/></way>
        </osm>"#;
        let s = parse_str(xml).unwrap();
        assert_eq!(s.ways.len(), 1);
        assert_eq!(s.nodes.len(), 2);
        assert_eq!(s.warnings, 0);
    }

    #[test]
    fn non_highway_ways_are_filtered() {
        let xml = r#"<osm>
          <node id="1" lat="0.0" lon="0.0"/>
          <node id="2" lat="0.001" lon="0.0"/>
          <way id="5"><nd ref="1"/><nd ref="2"/><tag k="building" v="yes"/></way>
        </osm>"#;
        let s = parse_str(xml).unwrap();
        assert_eq!(s.ways.len(), 0);
        assert_eq!(s.nodes.len(), 0);
    }

    #[test]
    fn missing_ref_is_dropped_with_warning() {
        let xml = r#"<osm>
          <node id="1" lat="0.0" lon="0.0"/>
          <node id="2" lat="0.001" lon="0.0"/>
          <way id="5"><nd ref="1"/><nd ref="99"/><nd ref="2"/><tag k="highway" v="track"/></way>
        </osm>"#;
        let s = parse_str(xml).unwrap();
        assert_eq!(s.warnings, 1);
        assert_eq!(s.ways[&5], vec![1, 2]);
    }

    #[test]
    fn malformed_xml_is_a_parse_error() {
        assert!(matches!(parse_str("<osm><node id="), Err(Error::Parse(_))));
        assert!(matches!(
            parse_str(r#"<osm><node id="x" lat="0" lon="0"/></osm>"#),
            Err(Error::Parse(_))
        ));
    }

    #[test]
    fn crossing_ways_become_five_nodes_four_edges() {
        let s = parse_str(CROSSING).unwrap();
        let (g, anchor) = to_graph(&s).unwrap();
        assert_eq!(g.node_count(), 5);
        assert_eq!(g.edge_count(), 4);
        // Anchor is the node centroid.
        assert!((anchor.0 - 20.902).abs() < 1e-9);
        assert!((anchor.1 - 74.772).abs() < 1e-9);
    }

    #[test]
    fn isolated_way_is_one_edge() {
        let xml = r#"<osm>
          <node id="1" lat="0.0" lon="0.0"/>
          <node id="2" lat="0.001" lon="0.0"/>
          <way id="5"><nd ref="1"/><nd ref="2"/><tag k="highway" v="track"/></way>
        </osm>"#;
        let (g, _) = to_graph(&parse_str(xml).unwrap()).unwrap();
        assert_eq!((g.node_count(), g.edge_count()), (2, 1));
        let len = g.edge(crate::graph::EdgeId(0)).length_m;
        assert!((len - 111.19).abs() < 0.1, "0.001 deg of latitude, got {len}");
    }

    #[test]
    fn zero_highways_is_degenerate() {
        let xml = r#"<osm><node id="1" lat="0" lon="0"/></osm>"#;
        let s = parse_str(xml).unwrap();
        assert!(matches!(to_graph(&s), Err(Error::DegenerateInput(_))));
    }

    #[test]
    fn reprojection_recovers_input_coordinates() {
        let s = parse_str(CROSSING).unwrap();
        let (g, anchor) = to_graph(&s).unwrap();
        let proj = Equirect::new(anchor.0, anchor.1);
        for n in g.node_ids() {
            let (x, y) = g.node(n);
            let (lat, lon) = proj.unproject(x, y);
            let matches_input = s
                .nodes
                .values()
                .any(|&(nl, no)| (nl - lat).abs() < 1e-9 && (no - lon).abs() < 1e-9);
            assert!(matches_input, "node ({lat}, {lon}) not in input");
        }
    }
}
