//! Labels for regions, roads, and address units: compass-quadrant region
//! labels spiraling out from the densest "CA" center, parity-coded road
//! numbers, 5 m meter markers, and base-26 block letters.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::graph::{bearing_is_ns, chord_bearing_deg, EdgeId, RoadGraph, Side};
use crate::partition::{RegionAssignment, RegionId};

/// Spacing of the virtual meter markers and of the block-letter distance
/// bins, in meters.
pub const UNIT_STEP_M: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Quadrant {
    Center,
    North,
    South,
    West,
    East,
}

impl Quadrant {
    pub fn letter(self) -> char {
        match self {
            Quadrant::Center => 'C',
            Quadrant::North => 'N',
            Quadrant::South => 'S',
            Quadrant::West => 'W',
            Quadrant::East => 'E',
        }
    }

    pub fn from_letter(c: char) -> Option<Self> {
        match c {
            'C' => Some(Quadrant::Center),
            'N' => Some(Quadrant::North),
            'S' => Some(Quadrant::South),
            'W' => Some(Quadrant::West),
            'E' => Some(Quadrant::East),
            _ => None,
        }
    }
}

/// A region label such as "CA" (the center) or "NE" (5th region north).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RegionLabel {
    pub quadrant: Quadrant,
    pub index_letter: String,
}

impl RegionLabel {
    pub fn new(quadrant: Quadrant, index: u64) -> Self {
        Self {
            quadrant,
            index_letter: base26_encode(index),
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        let mut chars = s.chars();
        let quadrant = Quadrant::from_letter(chars.next()?)?;
        let rest: String = chars.collect();
        if rest.is_empty() || !rest.chars().all(|c| c.is_ascii_uppercase()) {
            return None;
        }
        Some(Self {
            quadrant,
            index_letter: rest,
        })
    }
}

impl std::fmt::Display for RegionLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}{}", self.quadrant.letter(), self.index_letter)
    }
}

/// Road orientation class: odd road numbers run north-south, even east-west.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    NorthSouth,
    EastWest,
}

/// A road name such as "NE127": region label plus road number.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoadName {
    pub region: RegionLabel,
    pub number: u64,
    pub orientation: Orientation,
}

impl std::fmt::Display for RoadName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}{}", self.region, self.number)
    }
}

/// Letter index encoding with digits A..Z: 0 -> "A", 25 -> "Z", 26 -> "AA".
pub fn base26_encode(index: u64) -> String {
    let mut n = index + 1; // bijective base-26 of index+1
    let mut out = Vec::new();
    while n > 0 {
        let rem = ((n - 1) % 26) as u8;
        out.push(b'A' + rem);
        n = (n - 1) / 26;
    }
    out.reverse();
    String::from_utf8(out).expect("ascii letters")
}

/// Inverse of [`base26_encode`]. Rejects empty or non-A-Z input.
pub fn base26_decode(s: &str) -> Option<u64> {
    if s.is_empty() {
        return None;
    }
    let mut n: u64 = 0;
    for c in s.chars() {
        if !c.is_ascii_uppercase() {
            return None;
        }
        n = n.checked_mul(26)?.checked_add((c as u8 - b'A') as u64 + 1)?;
    }
    Some(n - 1)
}

/// Bearing from `from` to `to` in degrees [0, 360), 0 = north, clockwise.
fn bearing_deg(from: (f64, f64), to: (f64, f64)) -> f64 {
    let mut deg = (to.0 - from.0).atan2(to.1 - from.1).to_degrees();
    if deg < 0.0 {
        deg += 360.0;
    }
    deg
}

/// Assign region labels: the densest region becomes the center "CA"; every
/// other region falls into the compass quadrant of its bearing from the
/// center and takes letters outward by distance.
pub fn label_regions(
    assignment: &RegionAssignment,
    densest: RegionId,
) -> HashMap<RegionId, RegionLabel> {
    let center = assignment.region(densest).centroid;
    let mut labels = HashMap::new();
    labels.insert(densest, RegionLabel::new(Quadrant::Center, 0));

    let mut by_quadrant: HashMap<Quadrant, Vec<(f64, RegionId)>> = HashMap::new();
    for id in assignment.region_ids() {
        if id == densest {
            continue;
        }
        let c = assignment.region(id).centroid;
        let bearing = bearing_deg(center, c);
        let quadrant = match bearing {
            b if !(45.0..315.0).contains(&b) => Quadrant::North,
            b if b < 135.0 => Quadrant::East,
            b if b < 225.0 => Quadrant::South,
            _ => Quadrant::West,
        };
        let dist = ((c.0 - center.0).powi(2) + (c.1 - center.1).powi(2)).sqrt();
        by_quadrant.entry(quadrant).or_default().push((dist, id));
    }
    for (quadrant, mut members) in by_quadrant {
        members.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        for (i, (_, id)) in members.into_iter().enumerate() {
            labels.insert(id, RegionLabel::new(quadrant, i as u64));
        }
    }
    labels
}

/// Orientation class from the edge's chord bearing; bearings in [45, 135)
/// count as east-west.
pub fn orient_road(graph: &RoadGraph, edge: EdgeId) -> Orientation {
    let bearing = chord_bearing_deg(&graph.edge(edge).polyline);
    if bearing_is_ns(bearing) {
        Orientation::NorthSouth
    } else {
        Orientation::EastWest
    }
}

/// Number the roads of every region: north-south roads west to east get
/// 1, 3, 5, ...; east-west roads north to south get 2, 4, 6, ....
pub fn number_roads(
    graph: &RoadGraph,
    assignment: &RegionAssignment,
    labels: &HashMap<RegionId, RegionLabel>,
) -> Result<HashMap<EdgeId, RoadName>> {
    let mut names = HashMap::new();
    for region_id in assignment.region_ids() {
        let label = labels
            .get(&region_id)
            .ok_or_else(|| Error::Validation(format!("{region_id} has no label")))?;
        let mut ns: Vec<(f64, EdgeId)> = Vec::new();
        let mut ew: Vec<(f64, EdgeId)> = Vec::new();
        for &edge in &assignment.region(region_id).edges {
            let e = graph.edge(edge);
            let mid = graph.point_at(edge, e.length_m / 2.0)?;
            match orient_road(graph, edge) {
                Orientation::NorthSouth => ns.push((mid.0, edge)),
                Orientation::EastWest => ew.push((mid.1, edge)),
            }
        }
        ns.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1))); // west first
        ew.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1))); // north first
        for (i, (_, edge)) in ns.into_iter().enumerate() {
            names.insert(
                edge,
                RoadName {
                    region: label.clone(),
                    number: 2 * i as u64 + 1,
                    orientation: Orientation::NorthSouth,
                },
            );
        }
        for (i, (_, edge)) in ew.into_iter().enumerate() {
            names.insert(
                edge,
                RoadName {
                    region: label.clone(),
                    number: 2 * i as u64 + 2,
                    orientation: Orientation::EastWest,
                },
            );
        }
    }
    Ok(names)
}

/// House number for the meter marker at `along_m`: marker index i =
/// floor(along / 5), doubled, plus one on the right side.
pub fn house_number(along_m: f64, side: Side) -> u64 {
    let marker = (along_m / UNIT_STEP_M).floor().max(0.0) as u64;
    match side {
        Side::Left | Side::On => 2 * marker,
        Side::Right => 2 * marker + 1,
    }
}

/// Block letters for a perpendicular offset: the 5 m distance bin, base-26.
pub fn block_letter(offset_m: f64) -> String {
    base26_encode((offset_m / UNIT_STEP_M).floor().max(0.0) as u64)
}
