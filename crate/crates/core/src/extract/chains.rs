//! Centerline chain operations: tracing skeleton pixels into chains, bridging
//! gaps between compatible endpoints, and straightening chain ends.

use std::collections::{HashMap, HashSet};

use super::{ExtractParams, PixelChain};
use crate::raster::{BinaryMask, ConfidenceRaster};

/// Undirected pixel-to-pixel steps consumed while walking the skeleton.
type StepSet = HashSet<((i32, i32), (i32, i32))>;

/// Clockwise from north; even indices are the orthogonal directions.
const NEIGHBOR_OFFSETS: [(i32, i32); 8] = [
    (0, -1),
    (1, -1),
    (1, 0),
    (1, 1),
    (0, 1),
    (-1, 1),
    (-1, 0),
    (-1, -1),
];

fn neighbor_bits(skeleton: &BinaryMask, p: (i32, i32)) -> [bool; 8] {
    let mut nb = [false; 8];
    for (i, (dc, dr)) in NEIGHBOR_OFFSETS.iter().enumerate() {
        nb[i] = skeleton.get(p.0 + dc, p.1 + dr);
    }
    nb
}

/// Circular runs of set neighbors. Each run is one branch leaving the pixel;
/// pixels diagonally adjacent across a junction belong to the same branch.
fn neighbor_runs(nb: &[bool; 8]) -> Vec<Vec<usize>> {
    let set: Vec<usize> = (0..8).filter(|&i| nb[i]).collect();
    if set.is_empty() {
        return Vec::new();
    }
    if set.len() == 8 {
        return vec![set];
    }
    // Start each run just after a gap.
    let mut runs: Vec<Vec<usize>> = Vec::new();
    let start = (0..8).find(|&i| !nb[i] && nb[(i + 1) % 8]).unwrap();
    let mut current: Vec<usize> = Vec::new();
    for k in 1..=8 {
        let i = (start + k) % 8;
        if nb[i] {
            current.push(i);
        } else if !current.is_empty() {
            runs.push(std::mem::take(&mut current));
        }
    }
    if !current.is_empty() {
        runs.push(current);
    }
    for run in &mut runs {
        run.sort_unstable();
    }
    runs.sort();
    runs
}

/// Branch representative: orthogonal member if the run has one, else its
/// smallest ring index.
fn run_representative(p: (i32, i32), run: &[usize]) -> (i32, i32) {
    let idx = run
        .iter()
        .copied()
        .find(|i| i % 2 == 0)
        .unwrap_or(run[0]);
    let (dc, dr) = NEIGHBOR_OFFSETS[idx];
    (p.0 + dc, p.1 + dr)
}

/// Trace a 1-px skeleton into pixel chains. Chains run between node pixels
/// (free ends and junctions with >= 3 departing branches); the chains meeting
/// at a junction all include the junction pixel as their shared terminal.
/// Chains shorter than `min_chain_px` are dropped, and the output is sorted
/// by the first pixel (row, col).
pub fn trace_chains(skeleton: &BinaryMask, params: &ExtractParams) -> Vec<PixelChain> {
    let pixels: Vec<(i32, i32)> = skeleton.iter_set().collect();
    let branches: HashMap<(i32, i32), usize> = pixels
        .iter()
        .map(|&p| (p, neighbor_runs(&neighbor_bits(skeleton, p)).len()))
        .collect();

    // Node pixels in deterministic (row, col) order.
    let mut node_pixels: Vec<(i32, i32)> = pixels
        .iter()
        .copied()
        .filter(|p| branches[p] != 2)
        .collect();
    node_pixels.sort_by_key(|&(c, r)| (r, c));

    let mut used_steps: StepSet = StepSet::new();
    let mut raw: Vec<Vec<(i32, i32)>> = Vec::new();

    let walk = |start: (i32, i32), first: (i32, i32), used: &mut StepSet| -> Vec<(i32, i32)> {
        let mut path = vec![start, first];
        used.insert((start, first));
        used.insert((first, start));
        let mut prev = start;
        let mut cur = first;
        while branches[&cur] == 2 {
            let nb = neighbor_bits(skeleton, cur);
            let runs = neighbor_runs(&nb);
            let prev_delta = (prev.0 - cur.0, prev.1 - cur.1);
            let prev_idx = NEIGHBOR_OFFSETS.iter().position(|&d| d == prev_delta).unwrap();
            let other = runs
                .iter()
                .find(|run| !run.contains(&prev_idx))
                .expect("path pixel has a second branch");
            let next = run_representative(cur, other);
            used.insert((cur, next));
            used.insert((next, cur));
            if next == start {
                // Closed loop back to the start: stop without repeating it.
                return path;
            }
            path.push(next);
            prev = cur;
            cur = next;
        }
        path
    };

    for &node in &node_pixels {
        let nb = neighbor_bits(skeleton, node);
        for run in neighbor_runs(&nb) {
            let rep = run_representative(node, &run);
            if !used_steps.contains(&(node, rep)) {
                raw.push(walk(node, rep, &mut used_steps));
            }
        }
    }

    // Pure cycles have no node pixels; start each at its smallest pixel.
    let mut in_cycle: Vec<(i32, i32)> = pixels
        .iter()
        .copied()
        .filter(|p| {
            branches[p] == 2
                && NEIGHBOR_OFFSETS.iter().all(|(dc, dr)| {
                    let q = (p.0 + dc, p.1 + dr);
                    !skeleton.get(q.0, q.1) || !used_steps.contains(&(*p, q))
                })
        })
        .collect();
    in_cycle.sort_by_key(|&(c, r)| (r, c));
    for start in in_cycle {
        let already = NEIGHBOR_OFFSETS.iter().any(|(dc, dr)| {
            let q = (start.0 + dc, start.1 + dr);
            skeleton.get(q.0, q.1) && used_steps.contains(&(start, q))
        });
        if already {
            continue;
        }
        let first = NEIGHBOR_OFFSETS
            .iter()
            .map(|(dc, dr)| (start.0 + dc, start.1 + dr))
            .find(|&q| skeleton.get(q.0, q.1));
        if let Some(first) = first {
            raw.push(walk(start, first, &mut used_steps));
        }
    }

    let window = params.endpoint_window_px as usize;
    let mut chains: Vec<PixelChain> = raw
        .into_iter()
        .flat_map(|p| split_at_corners(p, window, params.bucket_width_deg()))
        .filter(|p| p.len() >= params.min_chain_px as usize)
        .map(|p| finish_chain(p, window))
        .collect();
    sort_chains(&mut chains);
    chains
}

/// Split a path wherever the direction turns into a different orientation
/// class, so each segment keeps a consistent bearing. Roads meeting end-on at
/// a corner regain their shared intersection this way. The corner pixel
/// terminates both parts.
fn split_at_corners(path: Vec<(i32, i32)>, window: usize, min_turn_deg: f64) -> Vec<Vec<(i32, i32)>> {
    let n = path.len();
    if window < 1 || n < 2 * window + 1 {
        return vec![path];
    }
    let turn_at = |i: usize| -> f64 {
        let (ax, ay) = (
            (path[i].0 - path[i - window].0) as f64,
            (path[i].1 - path[i - window].1) as f64,
        );
        let (bx, by) = (
            (path[i + window].0 - path[i].0) as f64,
            (path[i + window].1 - path[i].1) as f64,
        );
        let dot = ax * bx + ay * by;
        let cross = ax * by - ay * bx;
        cross.atan2(dot).abs().to_degrees()
    };

    // Runs of above-threshold turn collapse to their sharpest pixel.
    let mut cuts: Vec<usize> = Vec::new();
    let mut i = window;
    while i + window < n {
        if turn_at(i) < min_turn_deg {
            i += 1;
            continue;
        }
        let mut j = i;
        let mut best = (turn_at(i), i);
        while j + window < n && turn_at(j) >= min_turn_deg {
            let t = turn_at(j);
            if t > best.0 {
                best = (t, j);
            }
            j += 1;
        }
        cuts.push(best.1);
        i = j;
    }
    if cuts.is_empty() {
        return vec![path];
    }

    let mut parts = Vec::with_capacity(cuts.len() + 1);
    let mut start = 0usize;
    for &cut in &cuts {
        parts.push(path[start..=cut].to_vec());
        start = cut;
    }
    parts.push(path[start..].to_vec());
    parts
}

/// Canonicalize direction, estimate endpoint orientations.
fn finish_chain(mut pixels: Vec<(i32, i32)>, window: usize) -> PixelChain {
    let first = (pixels[0].1, pixels[0].0);
    let last = (pixels[pixels.len() - 1].1, pixels[pixels.len() - 1].0);
    if last < first {
        pixels.reverse();
    }
    let endpoint_dirs = [
        window_orientation(&pixels[..window.min(pixels.len())]),
        window_orientation(tail_window(&pixels, window)),
    ];
    PixelChain { pixels, endpoint_dirs }
}

fn tail_window(pixels: &[(i32, i32)], window: usize) -> &[(i32, i32)] {
    &pixels[pixels.len().saturating_sub(window)..]
}

fn sort_chains(chains: &mut [PixelChain]) {
    chains.sort_by_key(|c| {
        let f = c.pixels[0];
        let l = c.pixels[c.pixels.len() - 1];
        (f.1, f.0, l.1, l.0, c.pixels.len())
    });
}

/// Principal-axis orientation of a pixel window in degrees [0, 180).
fn window_orientation(window: &[(i32, i32)]) -> f64 {
    if window.len() < 2 {
        return 0.0;
    }
    let n = window.len() as f64;
    let mx = window.iter().map(|p| p.0 as f64).sum::<f64>() / n;
    let my = window.iter().map(|p| p.1 as f64).sum::<f64>() / n;
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for &(c, r) in window {
        let dx = c as f64 - mx;
        let dy = r as f64 - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    let mut deg = 0.5 * (2.0 * sxy).atan2(sxx - syy).to_degrees();
    if deg < 0.0 {
        deg += 180.0;
    }
    if deg >= 180.0 {
        deg -= 180.0;
    }
    deg
}

/// Circular distance between two orientations on the half-circle [0, 180).
fn orientation_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).abs() % 180.0;
    d.min(180.0 - d)
}

/// 8-connected line rasterization, inclusive of both endpoints.
fn bresenham(a: (i32, i32), b: (i32, i32)) -> Vec<(i32, i32)> {
    let mut out = Vec::new();
    let (mut x, mut y) = a;
    let dx = (b.0 - a.0).abs();
    let dy = -(b.1 - a.1).abs();
    let sx = if a.0 < b.0 { 1 } else { -1 };
    let sy = if a.1 < b.1 { 1 } else { -1 };
    let mut err = dx + dy;
    loop {
        out.push((x, y));
        if (x, y) == b {
            break;
        }
        let e2 = 2 * err;
        if e2 >= dy {
            err += dy;
            x += sx;
        }
        if e2 <= dx {
            err += dx;
            y += sy;
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct EndRef {
    chain: usize,
    /// 0 = start of the pixel list, 1 = end.
    end: usize,
}

/// Bridge gaps between free chain endpoints. Two endpoints join when they are
/// within `join_radius_px`, their orientations fall in the same orientation
/// class, and the raster confidence along the connecting line supports a
/// road. Accepted joins are stitched transitively into longer chains.
pub fn join_chains(
    chains: Vec<PixelChain>,
    raster: &ConfidenceRaster,
    params: &ExtractParams,
) -> Vec<PixelChain> {
    if chains.len() < 2 {
        return chains;
    }

    // Terminal pixels that several chains share are junctions, not gaps.
    let mut pixel_uses: HashMap<(i32, i32), u32> = HashMap::new();
    for chain in &chains {
        for &p in &chain.pixels {
            *pixel_uses.entry(p).or_insert(0) += 1;
        }
    }
    let endpoint = |e: EndRef| -> (i32, i32) {
        let pts = &chains[e.chain].pixels;
        if e.end == 0 {
            pts[0]
        } else {
            pts[pts.len() - 1]
        }
    };
    let free_ends: Vec<EndRef> = (0..chains.len())
        .flat_map(|chain| [EndRef { chain, end: 0 }, EndRef { chain, end: 1 }])
        .filter(|&e| pixel_uses[&endpoint(e)] == 1)
        .collect();

    // Candidate joins, nearest first.
    let mut candidates: Vec<(f64, EndRef, EndRef)> = Vec::new();
    for (i, &ea) in free_ends.iter().enumerate() {
        for &eb in &free_ends[i + 1..] {
            if ea.chain == eb.chain {
                continue;
            }
            let pa = endpoint(ea);
            let pb = endpoint(eb);
            let dist = (((pa.0 - pb.0).pow(2) + (pa.1 - pb.1).pow(2)) as f64).sqrt();
            if dist > params.join_radius_px as f64 {
                continue;
            }
            let da = chains[ea.chain].endpoint_dirs[ea.end];
            let db = chains[eb.chain].endpoint_dirs[eb.end];
            if orientation_gap(da, db) >= params.bucket_width_deg() {
                continue;
            }
            if !bridge_supported(pa, pb, raster, params.join_confidence) {
                continue;
            }
            candidates.push((dist, ea, eb));
        }
    }
    candidates.sort_by(|a, b| {
        a.0.total_cmp(&b.0)
            .then(a.1.chain.cmp(&b.1.chain))
            .then(a.1.end.cmp(&b.1.end))
            .then(a.2.chain.cmp(&b.2.chain))
            .then(a.2.end.cmp(&b.2.end))
    });

    // Greedy matching: each endpoint joins at most once, and joins never form
    // a cycle of chains (union-find over chain indices).
    let mut parent: Vec<usize> = (0..chains.len()).collect();
    fn find(parent: &mut Vec<usize>, i: usize) -> usize {
        if parent[i] != i {
            let root = find(parent, parent[i]);
            parent[i] = root;
        }
        parent[i]
    }
    let mut end_taken: HashSet<EndRef> = HashSet::new();
    let mut accepted: HashMap<EndRef, EndRef> = HashMap::new();
    for (_, ea, eb) in candidates {
        if end_taken.contains(&ea) || end_taken.contains(&eb) {
            continue;
        }
        let (ra, rb) = (find(&mut parent, ea.chain), find(&mut parent, eb.chain));
        if ra == rb {
            continue;
        }
        parent[ra] = rb;
        end_taken.insert(ea);
        end_taken.insert(eb);
        accepted.insert(ea, eb);
        accepted.insert(eb, ea);
    }

    if accepted.is_empty() {
        return chains;
    }

    // Stitch each component from one of its unmatched ends.
    let window = params.endpoint_window_px as usize;
    let mut consumed = vec![false; chains.len()];
    let mut out: Vec<PixelChain> = Vec::new();
    for start_chain in 0..chains.len() {
        if consumed[start_chain] {
            continue;
        }
        let has_join = accepted.contains_key(&EndRef { chain: start_chain, end: 0 })
            || accepted.contains_key(&EndRef { chain: start_chain, end: 1 });
        if !has_join {
            consumed[start_chain] = true;
            out.push(chains[start_chain].clone());
            continue;
        }
        // Walk to the free end of this component first.
        let mut head = EndRef { chain: start_chain, end: 0 };
        while let Some(&other) = accepted.get(&head) {
            let next = EndRef { chain: other.chain, end: 1 - other.end };
            if next.chain == start_chain {
                break; // closed ring of chains: start anywhere
            }
            head = next;
        }

        // Concatenate from `head`'s chain towards the other side.
        let mut pixels: Vec<(i32, i32)> = Vec::new();
        let mut cur = head;
        loop {
            consumed[cur.chain] = true;
            let mut part = chains[cur.chain].pixels.clone();
            if cur.end == 1 {
                part.reverse(); // enter at `cur`, leave at the opposite end
            }
            if let Some(&last) = pixels.last() {
                let mut connector = bresenham(last, part[0]);
                connector.pop();
                connector.remove(0);
                pixels.extend(connector);
            }
            pixels.extend(part);
            let exit = EndRef { chain: cur.chain, end: 1 - cur.end };
            match accepted.get(&exit) {
                Some(&other) if !consumed[other.chain] => cur = other,
                _ => break,
            }
        }
        out.push(finish_chain(pixels, window));
    }

    sort_chains(&mut out);
    out
}

/// Mean confidence strictly between two endpoints; an empty gap passes.
fn bridge_supported(a: (i32, i32), b: (i32, i32), raster: &ConfidenceRaster, min_mean: u8) -> bool {
    let line = bresenham(a, b);
    if line.len() <= 2 {
        return true;
    }
    let between = &line[1..line.len() - 1];
    let sum: u64 = between
        .iter()
        .map(|&(c, r)| {
            if c >= 0 && r >= 0 && (c as usize) < raster.width && (r as usize) < raster.height {
                raster.value(c as usize, r as usize) as u64
            } else {
                0
            }
        })
        .sum();
    (sum as f64 / between.len() as f64) >= min_mean as f64
}

/// Straighten chain ends: each terminal window is snapped onto its robust
/// (median) line, which removes skeletonization whiskers while leaving
/// perfectly straight ends untouched. Chains shorter than the window pass
/// through unchanged.
pub fn filter_endpoints(chains: Vec<PixelChain>, params: &ExtractParams) -> Vec<PixelChain> {
    let window = params.endpoint_window_px as usize;
    let mut out: Vec<PixelChain> = chains
        .into_iter()
        .map(|chain| {
            if chain.len() < window {
                return chain;
            }
            let mut pixels = chain.pixels;
            pixels = straighten_tail(pixels, window);
            pixels.reverse();
            pixels = straighten_tail(pixels, window);
            pixels.reverse();
            finish_chain(pixels, window)
        })
        .collect();
    sort_chains(&mut out);
    out
}

/// Replace the last `window` pixels by their projections onto the window's
/// median line. The line orientation is estimated over a doubled context
/// window so a whisker cannot outvote the road it hangs off. Falls back to
/// the original end if the result would repeat a pixel.
fn straighten_tail(pixels: Vec<(i32, i32)>, window: usize) -> Vec<(i32, i32)> {
    let n = pixels.len();
    if n < window || window < 2 {
        return pixels;
    }
    let w = &pixels[n - window..];
    let ctx = &pixels[n - (2 * window).min(n)..];

    // Median position of the replaced window.
    let mut xs: Vec<i32> = w.iter().map(|p| p.0).collect();
    let mut ys: Vec<i32> = w.iter().map(|p| p.1).collect();
    xs.sort_unstable();
    ys.sort_unstable();
    let median = |v: &[i32]| -> f64 {
        let m = v.len() / 2;
        if v.len() % 2 == 1 {
            v[m] as f64
        } else {
            (v[m - 1] + v[m]) as f64 / 2.0
        }
    };
    let m = (median(&xs), median(&ys));

    // Median orientation of the context steps, unwrapped around the chord so
    // the 0/180 seam cannot split the sample.
    let chord = {
        let (dx, dy) = (
            (ctx[ctx.len() - 1].0 - ctx[0].0) as f64,
            (ctx[ctx.len() - 1].1 - ctx[0].1) as f64,
        );
        let mut a = dy.atan2(dx).to_degrees();
        if a < 0.0 {
            a += 180.0;
        }
        a % 180.0
    };
    let mut steps: Vec<f64> = ctx
        .windows(2)
        .map(|s| {
            let mut a = ((s[1].1 - s[0].1) as f64)
                .atan2((s[1].0 - s[0].0) as f64)
                .to_degrees();
            if a < 0.0 {
                a += 180.0;
            }
            a %= 180.0;
            // Map into (chord - 90, chord + 90].
            if a - chord > 90.0 {
                a -= 180.0;
            } else if chord - a >= 90.0 {
                a += 180.0;
            }
            a
        })
        .collect();
    steps.sort_by(f64::total_cmp);
    let mid = steps.len() / 2;
    let theta = if steps.len() % 2 == 1 {
        steps[mid]
    } else {
        (steps[mid - 1] + steps[mid]) / 2.0
    };
    let u = (theta.to_radians().cos(), theta.to_radians().sin());

    // Projection parameters along the median line.
    let t_of = |p: (i32, i32)| (p.0 as f64 - m.0) * u.0 + (p.1 as f64 - m.1) * u.1;
    let t_anchor = t_of(w[0]);
    let outward = match (t_of(w[window - 1]) - t_anchor).partial_cmp(&0.0) {
        Some(std::cmp::Ordering::Less) => -1.0,
        _ => 1.0,
    };
    let reach = w
        .iter()
        .map(|&p| outward * (t_of(p) - t_anchor))
        .fold(0.0f64, f64::max);
    let t_end = t_anchor + outward * reach;
    let point_at = |t: f64| -> (i32, i32) {
        (
            (m.0 + t * u.0).round() as i32,
            (m.1 + t * u.1).round() as i32,
        )
    };

    let mut result: Vec<(i32, i32)> = pixels[..n - window].to_vec();
    let ray_start = if let Some(&prev) = result.last() {
        prev
    } else {
        let p = point_at(t_anchor);
        result.push(p);
        p
    };
    let mut ray = bresenham(ray_start, point_at(t_end));
    ray.remove(0);
    result.extend(ray);

    if result.len() < 2 {
        return pixels;
    }
    let unique: HashSet<(i32, i32)> = result.iter().copied().collect();
    if unique.len() != result.len() {
        return pixels; // straightened ray folded back onto the chain
    }
    result
}
