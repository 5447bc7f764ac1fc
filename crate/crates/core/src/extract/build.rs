//! Assemble filtered pixel chains into the topological road graph:
//! intersections become nodes, chain pieces become edges with world-meter
//! polylines and arc-length weights.

use std::collections::HashMap;

use super::{ExtractParams, PixelChain};
use crate::error::{Error, Result};
use crate::graph::{polyline_length, RoadGraph};
use crate::raster::GeoTransform;

/// Endpoints this close (in pixels) collapse into one intersection.
const NODE_MERGE_RADIUS_PX: f64 = 1.5;

/// Self-loops shorter than this many pixels are thinning artifacts around a
/// junction cluster, not roads.
const MIN_LOOP_PX: f64 = 3.0;

pub fn build_graph(
    chains: &[PixelChain],
    params: &ExtractParams,
    transform: &GeoTransform,
) -> Result<RoadGraph> {
    params.validate()?;
    if chains.is_empty() {
        return Err(Error::DegenerateInput("no chains to build a graph from".into()));
    }

    // Pixels used by more than one chain are crossings/junctions; chains
    // split there so both roads gain a shared intersection.
    let mut uses: HashMap<(i32, i32), u32> = HashMap::new();
    for chain in chains {
        for &p in &chain.pixels {
            *uses.entry(p).or_insert(0) += 1;
        }
    }

    let mut pieces: Vec<Vec<(i32, i32)>> = Vec::new();
    for chain in chains {
        let mut start = 0usize;
        for i in 1..chain.pixels.len() {
            let interior = i + 1 < chain.pixels.len();
            if interior && uses[&chain.pixels[i]] >= 2 {
                pieces.push(chain.pixels[start..=i].to_vec());
                start = i;
            }
        }
        if start + 1 < chain.pixels.len() {
            pieces.push(chain.pixels[start..].to_vec());
        }
    }

    // Cluster piece terminals within the merge radius (transitively) and
    // anchor each cluster at its smallest (row, col) pixel.
    let mut terminals: Vec<(i32, i32)> = pieces
        .iter()
        .flat_map(|p| [p[0], p[p.len() - 1]])
        .collect();
    terminals.sort_by_key(|&(c, r)| (r, c));
    terminals.dedup();

    let mut cluster: Vec<usize> = (0..terminals.len()).collect();
    fn find(cluster: &mut Vec<usize>, i: usize) -> usize {
        if cluster[i] != i {
            let root = find(cluster, cluster[i]);
            cluster[i] = root;
        }
        cluster[i]
    }
    for i in 0..terminals.len() {
        for j in i + 1..terminals.len() {
            let (a, b) = (terminals[i], terminals[j]);
            let d2 = ((a.0 - b.0).pow(2) + (a.1 - b.1).pow(2)) as f64;
            if d2 <= NODE_MERGE_RADIUS_PX * NODE_MERGE_RADIUS_PX {
                let (ra, rb) = (find(&mut cluster, i), find(&mut cluster, j));
                if ra != rb {
                    // Keep the smaller index as root: terminals are sorted, so
                    // the root is the smallest (row, col) member.
                    let (lo, hi) = (ra.min(rb), ra.max(rb));
                    cluster[hi] = lo;
                }
            }
        }
    }
    let mut anchor_of: HashMap<(i32, i32), (i32, i32)> = HashMap::new();
    for i in 0..terminals.len() {
        let root = find(&mut cluster, i);
        anchor_of.insert(terminals[i], terminals[root]);
    }

    let px_to_world = |p: (i32, i32)| transform.pixel_to_world(p.0 as f64, p.1 as f64);
    let min_loop_m = MIN_LOOP_PX * transform.pixel_size_x.max(transform.pixel_size_y);

    let mut segments: Vec<Vec<(f64, f64)>> = Vec::new();
    for piece in pieces {
        let a = anchor_of[&piece[0]];
        let b = anchor_of[&piece[piece.len() - 1]];
        let mut world: Vec<(f64, f64)> = Vec::with_capacity(piece.len());
        world.push(px_to_world(a));
        for &p in &piece[1..piece.len() - 1] {
            world.push(px_to_world(p));
        }
        world.push(px_to_world(b));
        world.dedup();
        if world.len() < 2 {
            continue;
        }
        if a == b && polyline_length(&world) < min_loop_m {
            continue; // junction-cluster artifact
        }
        segments.push(world);
    }

    if segments.is_empty() {
        return Err(Error::DegenerateInput("all chain pieces degenerate".into()));
    }
    RoadGraph::assemble(segments)
}
