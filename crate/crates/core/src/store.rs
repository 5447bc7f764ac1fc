//! ADDRMAP v1 persistence: a line-oriented text format with a magic header.
//! Floats are written in Rust's shortest round-trip form, so a load returns
//! the exact bits that were saved.
//!
//! ```text
//! ADDRMAP v1
//! city Testville
//! state Mh              (optional)
//! country In
//! year 2025             (optional)
//! anchor <lat> <lon>    (optional)
//! nodes <n>
//! <id> <x> <y>
//! edges <m>
//! <id> <a> <b> <length> <k> <x1> <y1> ... <xk> <yk>
//! regions <r>
//! <id> <label> <cx> <cy> <hull_area> <node_count> <node ids...>
//! roads <m>
//! <edge id> <region id> <number> <NS|EW>
//! end
//! ```

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::codec::AddressRecord;
use crate::error::{Error, Result};
use crate::geocode::AddressMap;
use crate::graph::{Edge, EdgeId, NodeId, RoadGraph};
use crate::label::{Orientation, RegionLabel, RoadName};
use crate::partition::{RegionAssignment, RegionId, RegionInfo};

const MAGIC: &str = "ADDRMAP v1";

/// Serialize the map into the ADDRMAP v1 text form.
pub fn to_string(map: &AddressMap) -> String {
    let mut out = String::new();
    let graph = map.graph();
    out.push_str(MAGIC);
    out.push('\n');
    writeln!(out, "city {}", map.city).unwrap();
    if let Some(state) = &map.state_code {
        writeln!(out, "state {state}").unwrap();
    }
    writeln!(out, "country {}", map.country_code).unwrap();
    if let Some(year) = map.version_year {
        writeln!(out, "year {year}").unwrap();
    }
    if let Some((lat, lon)) = map.geo_anchor {
        writeln!(out, "anchor {lat} {lon}").unwrap();
    }

    writeln!(out, "nodes {}", graph.node_count()).unwrap();
    for id in graph.node_ids() {
        let (x, y) = graph.node(id);
        writeln!(out, "{} {x} {y}", id.0).unwrap();
    }

    writeln!(out, "edges {}", graph.edge_count()).unwrap();
    for (id, e) in graph.edges() {
        write!(out, "{} {} {} {} {}", id.0, e.a.0, e.b.0, e.length_m, e.polyline.len()).unwrap();
        for (x, y) in &e.polyline {
            write!(out, " {x} {y}").unwrap();
        }
        out.push('\n');
    }

    let assignment = map.assignment();
    writeln!(out, "regions {}", assignment.regions.len()).unwrap();
    for id in assignment.region_ids() {
        let r = assignment.region(id);
        write!(
            out,
            "{} {} {} {} {} {}",
            id.0,
            map.region_label(id),
            r.centroid.0,
            r.centroid.1,
            r.hull_area_m2,
            r.nodes.len()
        )
        .unwrap();
        for n in &r.nodes {
            write!(out, " {}", n.0).unwrap();
        }
        out.push('\n');
    }

    writeln!(out, "roads {}", graph.edge_count()).unwrap();
    for (eid, _) in graph.edges() {
        let name = map.road_name(eid);
        let region_id = assignment.region_of_edge[eid.0 as usize];
        let orientation = match name.orientation {
            Orientation::NorthSouth => "NS",
            Orientation::EastWest => "EW",
        };
        writeln!(out, "{} {} {} {}", eid.0, region_id.0, name.number, orientation).unwrap();
    }
    out.push_str("end\n");
    out
}

/// Write the map to `path`; output is byte-identical for identical maps.
pub fn save(map: &AddressMap, path: &Path) -> Result<()> {
    std::fs::write(path, to_string(map))?;
    Ok(())
}

pub fn load(path: &Path) -> Result<AddressMap> {
    from_str(&std::fs::read_to_string(path)?)
}

struct Lines<'a> {
    iter: std::str::Lines<'a>,
    number: usize,
}

impl<'a> Lines<'a> {
    fn next(&mut self, what: &str) -> Result<&'a str> {
        self.number += 1;
        self.iter
            .next()
            .ok_or_else(|| Error::Parse(format!("file truncated before {what} (line {})", self.number)))
    }

    fn fail(&self, msg: String) -> Error {
        Error::Parse(format!("line {}: {msg}", self.number))
    }
}

/// Parse the ADDRMAP v1 text form.
pub fn from_str(text: &str) -> Result<AddressMap> {
    let mut lines = Lines { iter: text.lines(), number: 0 };

    let header = lines.next("header")?;
    if header != MAGIC {
        return Err(Error::Parse(format!(
            "unsupported address map format {header:?} (expected {MAGIC:?})"
        )));
    }

    // Key-value preamble until the "nodes" section.
    let mut city = None;
    let mut state = None;
    let mut country = None;
    let mut year = None;
    let mut anchor = None;
    let node_count: usize;
    loop {
        let line = lines.next("preamble")?;
        let (key, rest) = line.split_once(' ').unwrap_or((line, ""));
        match key {
            "city" => city = Some(rest.to_string()),
            "state" => state = Some(rest.to_string()),
            "country" => country = Some(rest.to_string()),
            "year" => {
                year = Some(rest.parse::<u16>().map_err(|_| lines.fail(format!("bad year {rest:?}")))?)
            }
            "anchor" => {
                let (lat, lon) = rest
                    .split_once(' ')
                    .ok_or_else(|| lines.fail("anchor needs two numbers".into()))?;
                anchor = Some((
                    parse_f64(lat).map_err(|m| lines.fail(m))?,
                    parse_f64(lon).map_err(|m| lines.fail(m))?,
                ));
            }
            "nodes" => {
                node_count = rest.parse().map_err(|_| lines.fail(format!("bad node count {rest:?}")))?;
                break;
            }
            other => return Err(lines.fail(format!("unexpected key {other:?}"))),
        }
    }
    let city = city.ok_or_else(|| lines.fail("missing city".into()))?;
    let country = country.ok_or_else(|| lines.fail("missing country".into()))?;

    let mut nodes = Vec::with_capacity(node_count);
    for i in 0..node_count {
        let line = lines.next("node record")?;
        let mut f = Fields::new(line, &lines);
        let id: usize = f.parse("node id")?;
        if id != i {
            return Err(lines.fail(format!("node ids out of order: got {id}, expected {i}")));
        }
        let x = f.f64("node x")?;
        let y = f.f64("node y")?;
        f.finish()?;
        nodes.push((x, y));
    }

    let edge_header = lines.next("edges header")?;
    let edge_count: usize = section_count(edge_header, "edges").map_err(|m| lines.fail(m))?;
    let mut edges = Vec::with_capacity(edge_count);
    for i in 0..edge_count {
        let line = lines.next("edge record")?;
        let mut f = Fields::new(line, &lines);
        let id: usize = f.parse("edge id")?;
        if id != i {
            return Err(lines.fail(format!("edge ids out of order: got {id}, expected {i}")));
        }
        let a: u32 = f.parse("edge node a")?;
        let b: u32 = f.parse("edge node b")?;
        let length_m = f.f64("edge length")?;
        let k: usize = f.parse("edge vertex count")?;
        let mut polyline = Vec::with_capacity(k);
        for _ in 0..k {
            polyline.push((f.f64("vertex x")?, f.f64("vertex y")?));
        }
        f.finish()?;
        edges.push(Edge { a: NodeId(a), b: NodeId(b), polyline, length_m });
    }
    let graph = RoadGraph::from_parts(nodes, edges)?;

    let region_header = lines.next("regions header")?;
    let region_count: usize = section_count(region_header, "regions").map_err(|m| lines.fail(m))?;
    let mut regions = Vec::with_capacity(region_count);
    let mut region_labels: HashMap<RegionId, RegionLabel> = HashMap::new();
    let mut region_of_node = vec![RegionId(0); graph.node_count()];
    for i in 0..region_count {
        let line = lines.next("region record")?;
        let mut f = Fields::new(line, &lines);
        let id: usize = f.parse("region id")?;
        if id != i {
            return Err(lines.fail(format!("region ids out of order: got {id}, expected {i}")));
        }
        let label_text: String = f.parse("region label")?;
        let label = RegionLabel::parse(&label_text)
            .ok_or_else(|| lines.fail(format!("bad region label {label_text:?}")))?;
        let cx = f.f64("centroid x")?;
        let cy = f.f64("centroid y")?;
        let hull = f.f64("hull area")?;
        let count: usize = f.parse("region node count")?;
        let mut members = Vec::with_capacity(count);
        for _ in 0..count {
            let n: u32 = f.parse("region node id")?;
            if n as usize >= graph.node_count() {
                return Err(lines.fail(format!("region references unknown node {n}")));
            }
            region_of_node[n as usize] = RegionId(i as u32);
            members.push(NodeId(n));
        }
        f.finish()?;
        region_labels.insert(RegionId(i as u32), label);
        regions.push(RegionInfo {
            nodes: members,
            edges: Vec::new(),
            centroid: (cx, cy),
            hull_area_m2: hull,
        });
    }

    let roads_header = lines.next("roads header")?;
    let roads_count: usize = section_count(roads_header, "roads").map_err(|m| lines.fail(m))?;
    if roads_count != graph.edge_count() {
        return Err(lines.fail(format!(
            "roads section has {roads_count} entries for {} edges",
            graph.edge_count()
        )));
    }
    let mut region_of_edge = vec![RegionId(0); graph.edge_count()];
    let mut road_names: Vec<Option<RoadName>> = vec![None; graph.edge_count()];
    for i in 0..roads_count {
        let line = lines.next("road record")?;
        let mut f = Fields::new(line, &lines);
        let edge: usize = f.parse("road edge id")?;
        if edge != i {
            return Err(lines.fail(format!("road records out of order: got {edge}, expected {i}")));
        }
        let region: u32 = f.parse("road region id")?;
        if region as usize >= region_count {
            return Err(lines.fail(format!("road references unknown region {region}")));
        }
        let number: u64 = f.parse("road number")?;
        let orientation: String = f.parse("road orientation")?;
        let orientation = match orientation.as_str() {
            "NS" => Orientation::NorthSouth,
            "EW" => Orientation::EastWest,
            other => return Err(lines.fail(format!("bad orientation {other:?}"))),
        };
        f.finish()?;
        let rid = RegionId(region);
        region_of_edge[i] = rid;
        regions[region as usize].edges.push(EdgeId(i as u32));
        road_names[i] = Some(RoadName {
            region: region_labels[&rid].clone(),
            number,
            orientation,
        });
    }
    let road_names: Vec<RoadName> = road_names.into_iter().map(|n| n.unwrap()).collect();

    let end = lines.next("end marker")?;
    if end != "end" {
        return Err(lines.fail(format!("expected end marker, got {end:?}")));
    }

    let assignment = RegionAssignment {
        region_of_node,
        region_of_edge,
        regions,
    };
    Ok(AddressMap::from_parts(
        graph,
        assignment,
        region_labels,
        road_names,
        city,
        state,
        country,
        year,
        anchor,
    ))
}

fn section_count(line: &str, section: &str) -> std::result::Result<usize, String> {
    let (key, rest) = line.split_once(' ').unwrap_or((line, ""));
    if key != section {
        return Err(format!("expected {section:?} section, got {line:?}"));
    }
    rest.parse()
        .map_err(|_| format!("bad {section} count {rest:?}"))
}

fn parse_f64(s: &str) -> std::result::Result<f64, String> {
    s.parse().map_err(|_| format!("bad number {s:?}"))
}

struct Fields<'a, 'b> {
    parts: std::str::SplitWhitespace<'a>,
    lines: &'b Lines<'a>,
}

impl<'a, 'b> Fields<'a, 'b> {
    fn new(line: &'a str, lines: &'b Lines<'a>) -> Self {
        Self {
            parts: line.split_whitespace(),
            lines,
        }
    }

    fn raw(&mut self, what: &str) -> Result<&'a str> {
        self.parts
            .next()
            .ok_or_else(|| self.lines.fail(format!("missing {what}")))
    }

    fn parse<T: std::str::FromStr>(&mut self, what: &str) -> Result<T> {
        let raw = self.raw(what)?;
        raw.parse()
            .map_err(|_| self.lines.fail(format!("bad {what}: {raw:?}")))
    }

    fn f64(&mut self, what: &str) -> Result<f64> {
        let raw = self.raw(what)?;
        parse_f64(raw).map_err(|m| self.lines.fail(format!("{what}: {m}")))
    }

    fn finish(&mut self) -> Result<()> {
        match self.parts.next() {
            None => Ok(()),
            Some(extra) => Err(self.lines.fail(format!("unexpected trailing field {extra:?}"))),
        }
    }
}

/// Convenience used by tests and the CLI round-trip checks: geocode every
/// (house, block) pair a map would ever emit for one edge.
pub fn replay_answers(map: &AddressMap, records: &[AddressRecord]) -> Vec<Option<(f64, f64)>> {
    records
        .iter()
        .map(|r| map.geocode(r).ok().map(|p| (p.x, p.y)))
        .collect()
}
