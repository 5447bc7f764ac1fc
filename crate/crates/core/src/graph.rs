//! Road-network data model: intersections, road segments with polyline
//! geometry, and linear referencing (point-at-distance, nearest-road lookup,
//! side-of-road tests).

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::index::SpatialIndex;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeId(pub u32);

impl std::fmt::Display for NodeId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "n{}", self.0)
    }
}

impl std::fmt::Display for EdgeId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "e{}", self.0)
    }
}

/// Which side of a road a point lies on, relative to the direction of
/// increasing distance along the edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
    On,
}

/// A road segment between two intersections.
#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub a: NodeId,
    pub b: NodeId,
    /// World-meter vertices; first coincides with node `a`, last with `b`.
    pub polyline: Vec<(f64, f64)>,
    pub length_m: f64,
}

/// Intersections (nodes) plus road segments (edges) with polyline geometry.
/// Immutable once built; edge polylines are stored in canonical orientation
/// (south-to-north for mostly north-south roads, west-to-east otherwise) so
/// meter markers have a stable origin.
#[derive(Debug, Clone)]
pub struct RoadGraph {
    nodes: Vec<(f64, f64)>,
    edges: Vec<Edge>,
}

/// Position on the network: distance along an edge plus a signed-side
/// perpendicular offset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearRef {
    pub edge: EdgeId,
    pub along_m: f64,
    pub offset_m: f64,
    pub side: Side,
}

pub(crate) fn polyline_length(pts: &[(f64, f64)]) -> f64 {
    pts.windows(2)
        .map(|w| {
            let (dx, dy) = (w[1].0 - w[0].0, w[1].1 - w[0].1);
            (dx * dx + dy * dy).sqrt()
        })
        .sum()
}

/// Chord bearing of a polyline in degrees [0, 180), measured clockwise from
/// north over the endpoint-to-endpoint chord.
pub(crate) fn chord_bearing_deg(pts: &[(f64, f64)]) -> f64 {
    let (x0, y0) = pts[0];
    let (x1, y1) = pts[pts.len() - 1];
    let mut deg = (x1 - x0).atan2(y1 - y0).to_degrees();
    if deg < 0.0 {
        deg += 360.0;
    }
    if deg >= 180.0 {
        deg -= 180.0;
    }
    deg
}

/// True when a chord bearing counts as north-south bound.
pub(crate) fn bearing_is_ns(deg: f64) -> bool {
    !(45.0..135.0).contains(&deg)
}

impl RoadGraph {
    /// Assemble a graph from raw polyline segments. Segment endpoints with
    /// bit-identical coordinates become one node. Polylines are normalized to
    /// the canonical marker origin: mostly north-south segments start at
    /// their southern end, the rest at their western end (ties broken by the
    /// lower node id). Node ids follow (y, x) sorted order; edge ids follow a
    /// deterministic sort of the normalized geometry.
    pub fn assemble(segments: Vec<Vec<(f64, f64)>>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::DegenerateInput("no road segments".into()));
        }
        for (i, s) in segments.iter().enumerate() {
            if s.len() < 2 {
                return Err(Error::Validation(format!("segment {i} has fewer than 2 vertices")));
            }
        }

        // Collect endpoint coordinates, dedup exactly, sort by (y, x).
        let mut endpoints: Vec<(f64, f64)> = segments
            .iter()
            .flat_map(|s| [s[0], s[s.len() - 1]])
            .collect();
        endpoints.sort_by(|p, q| cmp_yx(*p, *q));
        endpoints.dedup_by(|p, q| p.0.to_bits() == q.0.to_bits() && p.1.to_bits() == q.1.to_bits());

        let key = |p: (f64, f64)| (p.0.to_bits(), p.1.to_bits());
        let node_of: HashMap<(u64, u64), NodeId> = endpoints
            .iter()
            .enumerate()
            .map(|(i, p)| (key(*p), NodeId(i as u32)))
            .collect();

        let mut edges = Vec::with_capacity(segments.len());
        for mut polyline in segments {
            dedup_consecutive(&mut polyline);
            if polyline.len() < 2 {
                continue; // zero-length after dedup
            }
            let length = polyline_length(&polyline);
            if length <= 0.0 {
                continue;
            }
            let a = node_of[&key(polyline[0])];
            let b = node_of[&key(polyline[polyline.len() - 1])];
            let mut edge = Edge { a, b, polyline, length_m: length };
            normalize_orientation(&mut edge);
            edges.push(edge);
        }
        if edges.is_empty() {
            return Err(Error::DegenerateInput("all segments degenerate".into()));
        }

        edges.sort_by(|e, f| {
            e.a.cmp(&f.a)
                .then(e.b.cmp(&f.b))
                .then(e.length_m.total_cmp(&f.length_m))
                .then_with(|| cmp_polyline(&e.polyline, &f.polyline))
        });
        edges.dedup_by(|e, f| e.a == f.a && e.b == f.b && e.polyline == f.polyline);

        Ok(Self { nodes: endpoints, edges })
    }

    /// Rebuild a graph from previously assembled parts (persistence path).
    /// Validates the structural invariants instead of re-deriving anything,
    /// so ids and geometry survive a save/load round trip bit-exactly.
    pub fn from_parts(nodes: Vec<(f64, f64)>, edges: Vec<Edge>) -> Result<Self> {
        if edges.is_empty() {
            return Err(Error::DegenerateInput("graph has no edges".into()));
        }
        for (i, e) in edges.iter().enumerate() {
            let a = nodes
                .get(e.a.0 as usize)
                .ok_or_else(|| Error::Validation(format!("edge {i}: bad node id {}", e.a)))?;
            let b = nodes
                .get(e.b.0 as usize)
                .ok_or_else(|| Error::Validation(format!("edge {i}: bad node id {}", e.b)))?;
            if e.polyline.len() < 2 {
                return Err(Error::Validation(format!("edge {i}: polyline too short")));
            }
            if e.polyline[0] != *a || e.polyline[e.polyline.len() - 1] != *b {
                return Err(Error::Validation(format!(
                    "edge {i}: polyline endpoints do not coincide with its nodes"
                )));
            }
            let arc = polyline_length(&e.polyline);
            if e.length_m <= 0.0 || (arc - e.length_m).abs() > 1e-6 * e.length_m.max(1.0) {
                return Err(Error::Validation(format!(
                    "edge {i}: stored length {} does not match arc length {arc}",
                    e.length_m
                )));
            }
        }
        Ok(Self { nodes, edges })
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn node(&self, id: NodeId) -> (f64, f64) {
        self.nodes[id.0 as usize]
    }

    pub fn edge(&self, id: EdgeId) -> &Edge {
        &self.edges[id.0 as usize]
    }

    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> {
        (0..self.nodes.len() as u32).map(NodeId)
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> {
        (0..self.edges.len() as u32).map(EdgeId)
    }

    pub fn edges(&self) -> impl Iterator<Item = (EdgeId, &Edge)> {
        self.edges.iter().enumerate().map(|(i, e)| (EdgeId(i as u32), e))
    }

    /// Number of incident edges (self-loops count twice).
    pub fn degree(&self, node: NodeId) -> usize {
        self.edges
            .iter()
            .map(|e| (e.a == node) as usize + (e.b == node) as usize)
            .sum()
    }

    pub fn total_length_m(&self) -> f64 {
        self.edges.iter().map(|e| e.length_m).sum()
    }

    /// Point at arc length `along_m` from the edge origin.
    pub fn point_at(&self, edge: EdgeId, along_m: f64) -> Result<(f64, f64)> {
        let e = self.edge(edge);
        if along_m < -1e-9 || along_m > e.length_m + 1e-9 {
            return Err(Error::OutOfRange(format!(
                "along {along_m} outside [0, {}] on {edge}",
                e.length_m
            )));
        }
        Ok(point_on_polyline(&e.polyline, along_m.clamp(0.0, e.length_m)).0)
    }

    /// Unit direction of the sub-segment containing `along_m`.
    pub fn direction_at(&self, edge: EdgeId, along_m: f64) -> Result<(f64, f64)> {
        let e = self.edge(edge);
        if along_m < -1e-9 || along_m > e.length_m + 1e-9 {
            return Err(Error::OutOfRange(format!(
                "along {along_m} outside [0, {}] on {edge}",
                e.length_m
            )));
        }
        Ok(point_on_polyline(&e.polyline, along_m.clamp(0.0, e.length_m)).1)
    }

    /// Nearest point on `edge` to `p`, as (squared distance, along, side).
    /// The nearest sub-segment decides the side; among equally near
    /// sub-segments the earliest wins.
    pub fn project_onto_edge(&self, edge: EdgeId, p: (f64, f64)) -> (f64, f64, Side) {
        let e = self.edge(edge);
        let mut best_d2 = f64::INFINITY;
        let mut best_along = 0.0;
        let mut best_cross = 0.0;
        let mut cum = 0.0;
        for w in e.polyline.windows(2) {
            let (ax, ay) = w[0];
            let (bx, by) = w[1];
            let (dx, dy) = (bx - ax, by - ay);
            let seg_len2 = dx * dx + dy * dy;
            let seg_len = seg_len2.sqrt();
            let t = if seg_len2 > 0.0 {
                (((p.0 - ax) * dx + (p.1 - ay) * dy) / seg_len2).clamp(0.0, 1.0)
            } else {
                0.0
            };
            let (qx, qy) = (ax + t * dx, ay + t * dy);
            let d2 = (p.0 - qx) * (p.0 - qx) + (p.1 - qy) * (p.1 - qy);
            if d2 < best_d2 {
                best_d2 = d2;
                best_along = cum + t * seg_len;
                // Signed perpendicular distance: positive means left of the
                // direction of travel.
                best_cross = if seg_len > 0.0 {
                    (dx * (p.1 - ay) - dy * (p.0 - ax)) / seg_len
                } else {
                    0.0
                };
            }
            cum += seg_len;
        }
        let side = if best_cross > 1e-9 {
            Side::Left
        } else if best_cross < -1e-9 {
            Side::Right
        } else {
            Side::On
        };
        (best_d2, best_along.min(e.length_m), side)
    }

    /// Which side of `edge` the point lies on (nearest sub-segment decides).
    pub fn side_of(&self, edge: EdgeId, p: (f64, f64)) -> Side {
        self.project_onto_edge(edge, p).2
    }

    /// Globally nearest linear reference for `p`, accelerated by `index`.
    /// Distance ties resolve to the smaller edge id.
    pub fn locate(&self, index: &SpatialIndex, p: (f64, f64)) -> Result<LinearRef> {
        if self.edges.is_empty() {
            return Err(Error::DegenerateInput("empty graph".into()));
        }
        let mut best: Option<(f64, EdgeId, f64, Side)> = None;
        index.visit_candidates(p, |edge| {
            let (d2, along, side) = self.project_onto_edge(edge, p);
            let better = match best {
                None => true,
                Some((bd2, bid, _, _)) => d2 < bd2 || (d2 == bd2 && edge < bid),
            };
            if better {
                best = Some((d2, edge, along, side));
            }
            best.map(|(d2, ..)| d2.sqrt()).unwrap_or(f64::INFINITY)
        });
        let (d2, edge, along_m, side) = best.expect("index covers all edges");
        Ok(LinearRef {
            edge,
            along_m,
            offset_m: d2.sqrt(),
            // A point numerically on the centerline counts as Left so house
            // parity stays defined.
            side: if side == Side::On { Side::Left } else { side },
        })
    }
}

fn cmp_yx(p: (f64, f64), q: (f64, f64)) -> std::cmp::Ordering {
    p.1.total_cmp(&q.1).then(p.0.total_cmp(&q.0))
}

fn cmp_polyline(p: &[(f64, f64)], q: &[(f64, f64)]) -> std::cmp::Ordering {
    for (a, b) in p.iter().zip(q) {
        let c = a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1));
        if c != std::cmp::Ordering::Equal {
            return c;
        }
    }
    p.len().cmp(&q.len())
}

fn dedup_consecutive(pts: &mut Vec<(f64, f64)>) {
    pts.dedup_by(|p, q| p.0.to_bits() == q.0.to_bits() && p.1.to_bits() == q.1.to_bits());
}

/// Canonical marker origin: southern end for north-south roads, western end
/// otherwise; node-id order breaks coordinate ties.
fn normalize_orientation(edge: &mut Edge) {
    let pts = &edge.polyline;
    let first = pts[0];
    let last = pts[pts.len() - 1];
    let bearing = chord_bearing_deg(pts);
    let flip = if bearing_is_ns(bearing) {
        match first.1.total_cmp(&last.1) {
            std::cmp::Ordering::Greater => true,
            std::cmp::Ordering::Equal => edge.a > edge.b,
            std::cmp::Ordering::Less => false,
        }
    } else {
        match first.0.total_cmp(&last.0) {
            std::cmp::Ordering::Greater => true,
            std::cmp::Ordering::Equal => edge.a > edge.b,
            std::cmp::Ordering::Less => false,
        }
    };
    if flip {
        edge.polyline.reverse();
        std::mem::swap(&mut edge.a, &mut edge.b);
    }
}

/// Point plus unit tangent at arc length `along` (clamped, in-range).
fn point_on_polyline(pts: &[(f64, f64)], along: f64) -> ((f64, f64), (f64, f64)) {
    let mut remaining = along;
    let mut last_dir = (1.0, 0.0);
    for w in pts.windows(2) {
        let (ax, ay) = w[0];
        let (bx, by) = w[1];
        let (dx, dy) = (bx - ax, by - ay);
        let seg_len = (dx * dx + dy * dy).sqrt();
        if seg_len <= 0.0 {
            continue;
        }
        last_dir = (dx / seg_len, dy / seg_len);
        if remaining <= seg_len {
            let t = remaining / seg_len;
            return ((ax + t * dx, ay + t * dy), last_dir);
        }
        remaining -= seg_len;
    }
    (pts[pts.len() - 1], last_dir)
}
