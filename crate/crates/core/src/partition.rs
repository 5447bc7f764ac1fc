//! Region partitioning by recursive normalized min-cut: communities of roads
//! with high interconnectivity inside and weak coupling across.

use std::collections::{BTreeMap, HashMap};

use crate::eigen::{second_smallest_eigenvectors, LaplacianSystem};
use crate::error::{Error, Result};
use crate::graph::{EdgeId, NodeId, RoadGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RegionId(pub u32);

impl std::fmt::Display for RegionId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "r{}", self.0)
    }
}

/// How the affinity length scale sigma is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AffinitySigma {
    /// Sigma = mean edge length of the component being cut.
    MeanEdgeLength,
    /// Fixed sigma in meters.
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartitionParams {
    /// Regions stop splitting once their edge count is at most this.
    pub max_region_edges: usize,
    /// Splits with a normalized cut above this value are rejected.
    pub ncut_stop: f64,
    pub affinity_sigma: AffinitySigma,
}

impl Default for PartitionParams {
    fn default() -> Self {
        Self {
            max_region_edges: 64,
            ncut_stop: 0.5,
            affinity_sigma: AffinitySigma::MeanEdgeLength,
        }
    }
}

impl PartitionParams {
    pub fn validate(&self) -> Result<()> {
        if self.max_region_edges == 0 {
            return Err(Error::Validation("max_region_edges must be >= 1".into()));
        }
        if !self.ncut_stop.is_finite() || self.ncut_stop <= 0.0 {
            return Err(Error::Validation("ncut_stop must be positive".into()));
        }
        if let AffinitySigma::Fixed(s) = self.affinity_sigma {
            if !s.is_finite() || s <= 0.0 {
                return Err(Error::Validation("fixed sigma must be positive".into()));
            }
        }
        Ok(())
    }
}

/// Weighted undirected similarity graph over node indices 0..n. Parallel
/// edges sum; self-loops are ignored (they cannot be cut).
#[derive(Debug, Clone)]
pub struct AffinityGraph {
    n: usize,
    edges: Vec<(usize, usize, f64)>,
    degrees: Vec<f64>,
}

impl AffinityGraph {
    pub fn new(n: usize, raw_edges: impl IntoIterator<Item = (usize, usize, f64)>) -> Self {
        let mut summed: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for (u, v, w) in raw_edges {
            assert!(u < n && v < n, "edge endpoint out of range");
            if u == v {
                continue;
            }
            *summed.entry((u.min(v), u.max(v))).or_insert(0.0) += w;
        }
        let edges: Vec<(usize, usize, f64)> = summed.into_iter().map(|((u, v), w)| (u, v, w)).collect();
        let mut degrees = vec![0.0; n];
        for &(u, v, w) in &edges {
            degrees[u] += w;
            degrees[v] += w;
        }
        Self { n, edges, degrees }
    }

    /// Unit-affinity convenience constructor.
    pub fn unit(n: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        Self::new(n, pairs.into_iter().map(|(u, v)| (u, v, 1.0)))
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let mut adj = vec![Vec::new(); self.n];
        for &(u, v, _) in &self.edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        let mut seen = vec![false; self.n];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for &v in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    count += 1;
                    stack.push(v);
                }
            }
        }
        count == self.n
    }
}

/// Normalized-cut objective cut(A,B)/assoc(A,V) + cut(A,B)/assoc(B,V) for the
/// bipartition given by `in_a`.
pub fn ncut_value(graph: &AffinityGraph, in_a: &[bool]) -> Result<f64> {
    if in_a.len() != graph.n {
        return Err(Error::Validation("membership length mismatch".into()));
    }
    let size_a = in_a.iter().filter(|x| **x).count();
    if size_a == 0 || size_a == graph.n {
        return Err(Error::Validation("both sides must be nonempty".into()));
    }
    let mut cut = 0.0;
    for &(u, v, w) in &graph.edges {
        if in_a[u] != in_a[v] {
            cut += w;
        }
    }
    let assoc_a: f64 = (0..graph.n).filter(|&i| in_a[i]).map(|i| graph.degrees[i]).sum();
    let assoc_b: f64 = (0..graph.n).filter(|&i| !in_a[i]).map(|i| graph.degrees[i]).sum();
    if assoc_a <= 0.0 || assoc_b <= 0.0 {
        return Err(Error::DegenerateCut);
    }
    Ok(cut / assoc_a + cut / assoc_b)
}

/// Spectral embeddings: eigenvectors for the second-smallest eigenvalue of
/// the symmetric normalized Laplacian of the affinity matrix. A simple
/// spectrum gives exactly one embedding; a numerically degenerate second
/// eigenvalue gives a deterministic candidate set spanning the eigenspace.
pub fn spectral_embeddings(graph: &AffinityGraph) -> Result<Vec<Vec<f64>>> {
    if graph.n < 2 {
        return Err(Error::Validation("need at least 2 nodes".into()));
    }
    if !graph.is_connected() {
        return Err(Error::NotConnected);
    }
    let system = LaplacianSystem {
        n: graph.n,
        edges: &graph.edges,
        degrees: &graph.degrees,
    };
    Ok(second_smallest_eigenvectors(&system))
}

/// Spectral bisection: sweep every threshold split of each sorted embedding
/// and keep the minimum-Ncut one. Side A contains node 0. Each split is
/// scored by [`ncut_value`] itself so the reported minimum is bit-identical
/// to an external sweep.
pub fn bisect(graph: &AffinityGraph) -> Result<(Vec<usize>, Vec<usize>, f64)> {
    let mut best: Option<(f64, Vec<usize>, usize)> = None;
    for embedding in spectral_embeddings(graph)? {
        let mut order: Vec<usize> = (0..graph.n).collect();
        order.sort_by(|&i, &j| embedding[i].total_cmp(&embedding[j]).then(i.cmp(&j)));

        let mut in_a = vec![false; graph.n];
        for k in 0..graph.n - 1 {
            in_a[order[k]] = true;
            let Ok(value) = ncut_value(graph, &in_a) else {
                continue;
            };
            if best.as_ref().is_none_or(|(b, _, _)| value < *b) {
                best = Some((value, order.clone(), k));
            }
        }
    }
    let (ncut, order, split_at) = best.ok_or(Error::DegenerateCut)?;

    let a_set: Vec<usize> = order[..=split_at].to_vec();
    let b_set: Vec<usize> = order[split_at + 1..].to_vec();
    let (mut a_set, mut b_set) = if a_set.contains(&0) {
        (a_set, b_set)
    } else {
        (b_set, a_set)
    };
    a_set.sort_unstable();
    b_set.sort_unstable();
    Ok((a_set, b_set, ncut))
}

/// One region of the partition.
#[derive(Debug, Clone)]
pub struct RegionInfo {
    pub nodes: Vec<NodeId>,
    pub edges: Vec<EdgeId>,
    pub centroid: (f64, f64),
    pub hull_area_m2: f64,
}

impl RegionInfo {
    /// Roads per square meter; zero-area hulls have no density.
    pub fn road_density(&self) -> Option<f64> {
        (self.hull_area_m2 > 0.0).then(|| self.edges.len() as f64 / self.hull_area_m2)
    }
}

/// A complete partition of the road graph into connected regions.
#[derive(Debug, Clone)]
pub struct RegionAssignment {
    pub region_of_node: Vec<RegionId>,
    pub region_of_edge: Vec<RegionId>,
    pub regions: Vec<RegionInfo>,
}

impl RegionAssignment {
    pub fn region(&self, id: RegionId) -> &RegionInfo {
        &self.regions[id.0 as usize]
    }

    pub fn region_ids(&self) -> impl Iterator<Item = RegionId> {
        (0..self.regions.len() as u32).map(RegionId)
    }
}

/// Partition the road graph: recursively bisect each connected component
/// while it has more than `max_region_edges` edges and the best cut stays at
/// or below `ncut_stop`. Boundary edges join the region whose centroid is
/// nearest their midpoint. Region ids are renumbered north-to-south, then
/// west-to-east by centroid.
pub fn partition(graph: &RoadGraph, params: &PartitionParams) -> Result<RegionAssignment> {
    params.validate()?;
    if graph.node_count() == 0 {
        return Err(Error::DegenerateInput("empty graph".into()));
    }

    let mut adjacency: Vec<Vec<usize>> = vec![Vec::new(); graph.node_count()];
    for (_, e) in graph.edges() {
        if e.a != e.b {
            adjacency[e.a.0 as usize].push(e.b.0 as usize);
            adjacency[e.b.0 as usize].push(e.a.0 as usize);
        }
    }

    let mut region_nodes: Vec<Vec<usize>> = Vec::new();
    for component in connected_components(graph.node_count(), &adjacency) {
        refine(graph, params, &adjacency, component, &mut region_nodes)?;
    }

    // Assign nodes, compute geometry, then resolve boundary edges.
    let mut region_of_node = vec![RegionId(0); graph.node_count()];
    for (r, nodes) in region_nodes.iter().enumerate() {
        for &n in nodes {
            region_of_node[n] = RegionId(r as u32);
        }
    }
    let centroids: Vec<(f64, f64)> = region_nodes
        .iter()
        .map(|nodes| {
            let k = nodes.len() as f64;
            let (sx, sy) = nodes.iter().fold((0.0, 0.0), |(sx, sy), &n| {
                let (x, y) = graph.node(NodeId(n as u32));
                (sx + x, sy + y)
            });
            (sx / k, sy / k)
        })
        .collect();

    let mut region_of_edge = vec![RegionId(0); graph.edge_count()];
    for (id, e) in graph.edges() {
        let ra = region_of_node[e.a.0 as usize];
        let rb = region_of_node[e.b.0 as usize];
        region_of_edge[id.0 as usize] = if ra == rb {
            ra
        } else {
            let mid = graph.point_at(id, e.length_m / 2.0)?;
            let da = dist2(mid, centroids[ra.0 as usize]);
            let db = dist2(mid, centroids[rb.0 as usize]);
            match da.total_cmp(&db) {
                std::cmp::Ordering::Less => ra,
                std::cmp::Ordering::Greater => rb,
                std::cmp::Ordering::Equal => ra.min(rb),
            }
        };
    }

    // Renumber by (centroid y descending, x ascending).
    let mut order: Vec<usize> = (0..region_nodes.len()).collect();
    order.sort_by(|&i, &j| {
        centroids[j]
            .1
            .total_cmp(&centroids[i].1)
            .then(centroids[i].0.total_cmp(&centroids[j].0))
            .then(i.cmp(&j))
    });
    let mut renumber = vec![0u32; region_nodes.len()];
    for (new_id, &old) in order.iter().enumerate() {
        renumber[old] = new_id as u32;
    }
    for r in &mut region_of_node {
        *r = RegionId(renumber[r.0 as usize]);
    }
    for r in &mut region_of_edge {
        *r = RegionId(renumber[r.0 as usize]);
    }

    let mut regions: Vec<RegionInfo> = order
        .iter()
        .map(|&old| {
            let mut nodes: Vec<NodeId> = region_nodes[old].iter().map(|&n| NodeId(n as u32)).collect();
            nodes.sort();
            let pts: Vec<(f64, f64)> = nodes.iter().map(|&n| graph.node(n)).collect();
            RegionInfo {
                nodes,
                edges: Vec::new(),
                centroid: centroids[old],
                hull_area_m2: convex_hull_area(&pts),
            }
        })
        .collect();
    for (i, &r) in region_of_edge.iter().enumerate() {
        regions[r.0 as usize].edges.push(EdgeId(i as u32));
    }

    Ok(RegionAssignment {
        region_of_node,
        region_of_edge,
        regions,
    })
}

/// Region with the most roads per hull area. Regions with degenerate hulls
/// only count when every region is degenerate, in which case raw edge count
/// decides. Ties go to the smaller region id.
pub fn densest_region(assignment: &RegionAssignment) -> RegionId {
    let with_density: Vec<(RegionId, f64)> = assignment
        .region_ids()
        .filter_map(|id| assignment.region(id).road_density().map(|d| (id, d)))
        .collect();
    if let Some(best) = with_density
        .iter()
        .max_by(|(ia, da), (ib, db)| da.total_cmp(db).then(ib.cmp(ia)))
    {
        return best.0;
    }
    assignment
        .region_ids()
        .max_by(|a, b| {
            assignment
                .region(*a)
                .edges
                .len()
                .cmp(&assignment.region(*b).edges.len())
                .then(b.cmp(a))
        })
        .expect("at least one region")
}

fn refine(
    graph: &RoadGraph,
    params: &PartitionParams,
    adjacency: &[Vec<usize>],
    nodes: Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) -> Result<()> {
    let member: HashMap<usize, usize> = nodes.iter().enumerate().map(|(i, &n)| (n, i)).collect();
    let internal: Vec<(EdgeId, usize, usize, f64)> = graph
        .edges()
        .filter_map(|(id, e)| {
            let u = member.get(&(e.a.0 as usize))?;
            let v = member.get(&(e.b.0 as usize))?;
            Some((id, *u, *v, e.length_m))
        })
        .collect();

    if internal.len() <= params.max_region_edges || nodes.len() < 2 {
        out.push(nodes);
        return Ok(());
    }

    let sigma = match params.affinity_sigma {
        AffinitySigma::Fixed(s) => s,
        AffinitySigma::MeanEdgeLength => {
            internal.iter().map(|(_, _, _, l)| l).sum::<f64>() / internal.len() as f64
        }
    };
    let affinity = AffinityGraph::new(
        nodes.len(),
        internal.iter().map(|&(_, u, v, l)| (u, v, (-l / sigma).exp())),
    );
    let (a, b, ncut) = match bisect(&affinity) {
        Ok(r) => r,
        // A component held together only by self-loops cannot be cut.
        Err(Error::NotConnected) | Err(Error::DegenerateCut) => {
            out.push(nodes);
            return Ok(());
        }
        Err(e) => return Err(e),
    };
    if ncut > params.ncut_stop {
        out.push(nodes);
        return Ok(());
    }

    for side in [a, b] {
        let side_nodes: Vec<usize> = side.iter().map(|&i| nodes[i]).collect();
        // A side can come out disconnected; each piece refines on its own.
        let in_side: std::collections::HashSet<usize> = side_nodes.iter().copied().collect();
        let mut sub_adj: HashMap<usize, Vec<usize>> = HashMap::new();
        for &n in &side_nodes {
            sub_adj.insert(
                n,
                adjacency[n].iter().copied().filter(|m| in_side.contains(m)).collect(),
            );
        }
        for piece in components_of(&side_nodes, &sub_adj) {
            refine(graph, params, adjacency, piece, out)?;
        }
    }
    Ok(())
}

fn connected_components(n: usize, adjacency: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let all: Vec<usize> = (0..n).collect();
    let map: HashMap<usize, Vec<usize>> = all.iter().map(|&i| (i, adjacency[i].clone())).collect();
    components_of(&all, &map)
}

/// BFS components over the listed nodes, smallest node first.
fn components_of(nodes: &[usize], adjacency: &HashMap<usize, Vec<usize>>) -> Vec<Vec<usize>> {
    let mut sorted: Vec<usize> = nodes.to_vec();
    sorted.sort_unstable();
    let mut seen: std::collections::HashSet<usize> = std::collections::HashSet::new();
    let mut components = Vec::new();
    for &start in &sorted {
        if seen.contains(&start) {
            continue;
        }
        let mut comp = vec![start];
        seen.insert(start);
        let mut queue = std::collections::VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            for &v in adjacency.get(&u).into_iter().flatten() {
                if seen.insert(v) {
                    comp.push(v);
                    queue.push_back(v);
                }
            }
        }
        comp.sort_unstable();
        components.push(comp);
    }
    components
}

fn dist2(p: (f64, f64), q: (f64, f64)) -> f64 {
    (p.0 - q.0).powi(2) + (p.1 - q.1).powi(2)
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::RoadGraph;

    /// Two unit-affinity 4-cliques joined by a single bridge edge between
    /// nodes 0 and 4.
    pub(crate) fn two_cliques_bridge() -> AffinityGraph {
        let mut pairs = Vec::new();
        for block in [0usize, 4] {
            for i in block..block + 4 {
                for j in i + 1..block + 4 {
                    pairs.push((i, j));
                }
            }
        }
        pairs.push((0, 4));
        AffinityGraph::unit(8, pairs)
    }

    fn unit_path(n: usize) -> AffinityGraph {
        AffinityGraph::unit(n, (0..n - 1).map(|i| (i, i + 1)))
    }

    fn unit_cycle(n: usize) -> AffinityGraph {
        AffinityGraph::unit(n, (0..n).map(|i| (i, (i + 1) % n)))
    }

    /// Two geometric squares (sides + diagonals, K4 each) far apart, linked
    /// by one long bridge road.
    fn two_squares_road_graph() -> RoadGraph {
        let mut segments = Vec::new();
        for offset in [0.0, 1000.0] {
            let corners = [
                (offset, 0.0),
                (offset + 100.0, 0.0),
                (offset + 100.0, 100.0),
                (offset, 100.0),
            ];
            for i in 0..4 {
                for j in i + 1..4 {
                    segments.push(vec![corners[i], corners[j]]);
                }
            }
        }
        segments.push(vec![(100.0, 0.0), (1000.0, 0.0)]);
        RoadGraph::assemble(segments).unwrap()
    }

    #[test]
    fn ncut_of_cycle_adjacent_pairs_is_one() {
        let g = unit_cycle(4);
        let in_a = vec![true, true, false, false];
        let v = ncut_value(&g, &in_a).unwrap();
        assert!((v - 1.0).abs() < 1e-12, "got {v}");
    }

    #[test]
    fn ncut_of_two_cliques_bridge_split_is_two_thirteenths() {
        let g = two_cliques_bridge();
        let in_a = vec![true, true, true, true, false, false, false, false];
        let v = ncut_value(&g, &in_a).unwrap();
        assert!((v - 2.0 / 13.0).abs() < 1e-9, "got {v}");
        // And brute force confirms this is the global minimum.
        let min = oracle::brute_force_min_ncut(&g);
        assert!((min - 2.0 / 13.0).abs() < 1e-9, "brute force min {min}");
    }

    #[test]
    fn zero_affinities_are_a_degenerate_cut() {
        let g = AffinityGraph::new(4, [(0usize, 1usize, 0.0), (2, 3, 0.0)]);
        let in_a = vec![true, true, false, false];
        assert!(matches!(ncut_value(&g, &in_a), Err(Error::DegenerateCut)));
    }

    #[test]
    fn bisect_recovers_planted_clique_split() {
        let g = two_cliques_bridge();
        let (a, b, ncut) = bisect(&g).unwrap();
        assert_eq!(a, vec![0, 1, 2, 3]);
        assert_eq!(b, vec![4, 5, 6, 7]);
        assert!((ncut - 2.0 / 13.0).abs() < 1e-9);
    }

    #[test]
    fn bisect_splits_even_path_in_the_middle() {
        let (a, b, ncut) = bisect(&unit_path(8)).unwrap();
        assert_eq!(a, vec![0, 1, 2, 3]);
        assert_eq!(b, vec![4, 5, 6, 7]);
        assert!((ncut - 2.0 / 7.0).abs() < 1e-9);
    }

    #[test]
    fn bisect_of_two_nodes_is_one_and_one() {
        let g = AffinityGraph::unit(2, [(0usize, 1usize)]);
        let (a, b, _) = bisect(&g).unwrap();
        assert_eq!((a, b), (vec![0], vec![1]));
    }

    #[test]
    fn bisect_rejects_disconnected_graphs() {
        let g = AffinityGraph::unit(4, [(0usize, 1usize), (2, 3)]);
        assert!(matches!(bisect(&g), Err(Error::NotConnected)));
    }

    #[test]
    fn bisect_matches_sweep_minimum_and_is_near_global_optimum() {
        for (name, g) in [
            ("two-cliques", two_cliques_bridge()),
            ("path-8", unit_path(8)),
            ("cycle-4", unit_cycle(4)),
        ] {
            let (_, _, ncut) = bisect(&g).unwrap();
            let sweep = oracle::sweep_min_ncut(&g);
            assert_eq!(ncut, sweep, "{name}: bisect must equal the sweep minimum");
            let global = oracle::brute_force_min_ncut(&g);
            assert!(
                ncut <= 1.10 * global + 1e-12,
                "{name}: {ncut} vs global {global}"
            );
        }
    }

    #[test]
    fn ncut_is_invariant_under_affinity_scaling() {
        let base = two_cliques_bridge();
        let scaled = AffinityGraph::new(
            8,
            base.edges.iter().map(|&(u, v, w)| (u, v, w * 37.5)),
        );
        let (a1, b1, n1) = bisect(&base).unwrap();
        let (a2, b2, n2) = bisect(&scaled).unwrap();
        assert_eq!((a1, b1), (a2, b2));
        assert!((n1 - n2).abs() < 1e-12);
    }

    #[test]
    fn triangle_below_cap_is_one_region() {
        let g = RoadGraph::assemble(vec![
            vec![(0.0, 0.0), (100.0, 0.0)],
            vec![(100.0, 0.0), (50.0, 80.0)],
            vec![(50.0, 80.0), (0.0, 0.0)],
        ])
        .unwrap();
        let assignment = partition(&g, &PartitionParams::default()).unwrap();
        assert_eq!(assignment.regions.len(), 1);
        assert_eq!(assignment.region(RegionId(0)).edges.len(), 3);
    }

    #[test]
    fn two_squares_split_into_two_regions_with_bridge_by_centroid() {
        let g = two_squares_road_graph();
        assert_eq!(g.edge_count(), 13);
        let params = PartitionParams {
            max_region_edges: 5,
            ..PartitionParams::default()
        };
        let assignment = partition(&g, &params).unwrap();
        assert_eq!(assignment.regions.len(), 2);
        // Each square keeps its 6 internal roads; the bridge midpoint is
        // equidistant, so the smaller region id wins it.
        let r0 = assignment.region(RegionId(0));
        let r1 = assignment.region(RegionId(1));
        assert_eq!(r0.nodes.len(), 4);
        assert_eq!(r1.nodes.len(), 4);
        assert_eq!(r0.edges.len(), 7);
        assert_eq!(r1.edges.len(), 6);
    }

    #[test]
    fn partition_covers_everything_exactly_once_and_regions_connect() {
        let g = two_squares_road_graph();
        let params = PartitionParams {
            max_region_edges: 5,
            ..PartitionParams::default()
        };
        let assignment = partition(&g, &params).unwrap();
        // Cover: every node and edge appears in exactly one region.
        let mut node_seen = vec![0u32; g.node_count()];
        let mut edge_seen = vec![0u32; g.edge_count()];
        for id in assignment.region_ids() {
            for n in &assignment.region(id).nodes {
                node_seen[n.0 as usize] += 1;
            }
            for e in &assignment.region(id).edges {
                edge_seen[e.0 as usize] += 1;
            }
        }
        assert!(node_seen.iter().all(|&c| c == 1));
        assert!(edge_seen.iter().all(|&c| c == 1));

        // Connectivity of each region's induced node subgraph.
        for id in assignment.region_ids() {
            let nodes = &assignment.region(id).nodes;
            let set: std::collections::HashSet<_> = nodes.iter().copied().collect();
            let mut adj: HashMap<NodeId, Vec<NodeId>> = HashMap::new();
            for (_, e) in g.edges() {
                if set.contains(&e.a) && set.contains(&e.b) {
                    adj.entry(e.a).or_default().push(e.b);
                    adj.entry(e.b).or_default().push(e.a);
                }
            }
            let mut seen = std::collections::HashSet::from([nodes[0]]);
            let mut stack = vec![nodes[0]];
            while let Some(u) = stack.pop() {
                for v in adj.get(&u).into_iter().flatten() {
                    if seen.insert(*v) {
                        stack.push(*v);
                    }
                }
            }
            assert_eq!(seen.len(), nodes.len(), "region {id} is disconnected");
        }
    }

    #[test]
    fn densest_region_prefers_roads_per_area() {
        // Region 0: 4x4 grid block, dense. Region 1: huge sparse triangle.
        let mut segments = Vec::new();
        for i in 0..3 {
            for j in 0..2 {
                let (x, y) = (i as f64 * 50.0, j as f64 * 50.0);
                segments.push(vec![(x, y), (x, y + 50.0)]);
            }
        }
        for j in 0..3 {
            for i in 0..2 {
                let (x, y) = (i as f64 * 50.0, j as f64 * 50.0);
                segments.push(vec![(x, y), (x + 50.0, y)]);
            }
        }
        segments.push(vec![(5000.0, 0.0), (9000.0, 0.0)]);
        segments.push(vec![(9000.0, 0.0), (7000.0, 3000.0)]);
        segments.push(vec![(7000.0, 3000.0), (5000.0, 0.0)]);
        let g = RoadGraph::assemble(segments).unwrap();
        let assignment = partition(&g, &PartitionParams::default()).unwrap();
        assert_eq!(assignment.regions.len(), 2);
        let densest = densest_region(&assignment);
        assert!(assignment.region(densest).hull_area_m2 < 50_000.0);
        assert!(assignment.region(densest).edges.len() >= 12);
    }

    #[test]
    fn densest_region_tie_prefers_smaller_id() {
        // Two congruent triangles: identical density.
        let tri = |ox: f64, oy: f64| {
            vec![
                vec![(ox, oy), (ox + 100.0, oy)],
                vec![(ox + 100.0, oy), (ox + 50.0, oy + 80.0)],
                vec![(ox + 50.0, oy + 80.0), (ox, oy)],
            ]
        };
        let mut segments = tri(0.0, 0.0);
        segments.extend(tri(5000.0, 0.0));
        let g = RoadGraph::assemble(segments).unwrap();
        let assignment = partition(&g, &PartitionParams::default()).unwrap();
        assert_eq!(assignment.regions.len(), 2);
        assert_eq!(densest_region(&assignment), RegionId(0));
    }

    #[test]
    fn singleton_component_becomes_singleton_region() {
        // A lone self-loop road: one node, one edge.
        let g = RoadGraph::assemble(vec![
            vec![(0.0, 0.0), (100.0, 0.0)],
            vec![
                (500.0, 0.0),
                (550.0, 50.0),
                (600.0, 0.0),
                (550.0, -50.0),
                (500.0, 0.0),
            ],
        ])
        .unwrap();
        let assignment = partition(&g, &PartitionParams::default()).unwrap();
        assert_eq!(assignment.regions.len(), 2);
    }

    #[test]
    fn hull_area_of_unit_square_is_one() {
        let pts = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0), (0.5, 0.5)];
        assert!((convex_hull_area(&pts) - 1.0).abs() < 1e-12);
        let line = [(0.0, 0.0), (1.0, 1.0), (2.0, 2.0)];
        assert_eq!(convex_hull_area(&line), 0.0);
    }
}

/// Monotone-chain convex hull area; collinear or tiny point sets yield 0.
fn convex_hull_area(points: &[(f64, f64)]) -> f64 {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    pts.dedup();
    if pts.len() < 3 {
        return 0.0;
    }
    let cross = |o: (f64, f64), a: (f64, f64), b: (f64, f64)| {
        (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
    };
    let mut lower: Vec<(f64, f64)> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<(f64, f64)> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    let hull: Vec<(f64, f64)> = lower.into_iter().chain(upper).collect();
    if hull.len() < 3 {
        return 0.0;
    }
    let mut area = 0.0;
    for i in 0..hull.len() {
        let (x0, y0) = hull[i];
        let (x1, y1) = hull[(i + 1) % hull.len()];
        area += x0 * y1 - x1 * y0;
    }
    area.abs() / 2.0
}
