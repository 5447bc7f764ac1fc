//! Uniform-grid spatial index over edge polylines. Cell size adapts to the
//! mean edge length; queries expand rings of cells outward until no nearer
//! edge can exist, which keeps nearest-edge lookup an exact argmin.

use crate::graph::{EdgeId, RoadGraph};

#[derive(Debug, Clone)]
pub struct SpatialIndex {
    cell: f64,
    min_x: f64,
    min_y: f64,
    cols: i64,
    rows: i64,
    cells: Vec<Vec<EdgeId>>,
    edge_count: usize,
}

impl SpatialIndex {
    pub fn build(graph: &RoadGraph) -> Self {
        let mean_len = graph.total_length_m() / graph.edge_count().max(1) as f64;
        let cell = (mean_len / 4.0).max(25.0);

        let mut min_x = f64::INFINITY;
        let mut min_y = f64::INFINITY;
        let mut max_x = f64::NEG_INFINITY;
        let mut max_y = f64::NEG_INFINITY;
        for (_, e) in graph.edges() {
            for &(x, y) in &e.polyline {
                min_x = min_x.min(x);
                min_y = min_y.min(y);
                max_x = max_x.max(x);
                max_y = max_y.max(y);
            }
        }
        if !min_x.is_finite() {
            (min_x, min_y, max_x, max_y) = (0.0, 0.0, 0.0, 0.0);
        }

        let cols = (((max_x - min_x) / cell).floor() as i64 + 1).max(1);
        let rows = (((max_y - min_y) / cell).floor() as i64 + 1).max(1);
        let mut cells = vec![Vec::new(); (cols * rows) as usize];

        for (id, e) in graph.edges() {
            for w in e.polyline.windows(2) {
                let lo_c = (((w[0].0.min(w[1].0)) - min_x) / cell).floor() as i64;
                let hi_c = (((w[0].0.max(w[1].0)) - min_x) / cell).floor() as i64;
                let lo_r = (((w[0].1.min(w[1].1)) - min_y) / cell).floor() as i64;
                let hi_r = (((w[0].1.max(w[1].1)) - min_y) / cell).floor() as i64;
                for r in lo_r.max(0)..=hi_r.min(rows - 1) {
                    for c in lo_c.max(0)..=hi_c.min(cols - 1) {
                        cells[(r * cols + c) as usize].push(id);
                    }
                }
            }
        }
        for list in &mut cells {
            list.sort();
            list.dedup();
        }

        Self {
            cell,
            min_x,
            min_y,
            cols,
            rows,
            cells,
            edge_count: graph.edge_count(),
        }
    }

    /// Visit candidate edges for a nearest-edge query at `p`, nearest cells
    /// first. The callback returns the best distance found so far; rings stop
    /// expanding once they cannot contain anything nearer.
    pub fn visit_candidates<F: FnMut(EdgeId) -> f64>(&self, p: (f64, f64), mut f: F) {
        let c0 = ((p.0 - self.min_x) / self.cell).floor() as i64;
        let r0 = ((p.1 - self.min_y) / self.cell).floor() as i64;

        // Rings must be able to reach every grid cell from the query cell.
        let max_ring = [c0, self.cols - 1 - c0, r0, self.rows - 1 - r0]
            .iter()
            .map(|d| d.abs())
            .max()
            .unwrap()
            .max(self.cols + self.rows);

        let mut seen = vec![false; self.edge_count];
        let mut best = f64::INFINITY;

        for ring in 0..=max_ring {
            if best.is_finite() && (ring - 1).max(0) as f64 * self.cell > best {
                break;
            }
            self.for_ring_cells(c0, r0, ring, |idx| {
                for &edge in &self.cells[idx] {
                    if !seen[edge.0 as usize] {
                        seen[edge.0 as usize] = true;
                        best = f(edge);
                    }
                }
            });
        }
    }

    fn for_ring_cells<G: FnMut(usize)>(&self, c0: i64, r0: i64, ring: i64, mut g: G) {
        let emit = |c: i64, r: i64, g: &mut G| {
            if c >= 0 && c < self.cols && r >= 0 && r < self.rows {
                g((r * self.cols + c) as usize);
            }
        };
        if ring == 0 {
            emit(c0, r0, &mut g);
            return;
        }
        for c in (c0 - ring)..=(c0 + ring) {
            emit(c, r0 - ring, &mut g);
            emit(c, r0 + ring, &mut g);
        }
        for r in (r0 - ring + 1)..=(r0 + ring - 1) {
            emit(c0 - ring, r, &mut g);
            emit(c0 + ring, r, &mut g);
        }
    }
}
