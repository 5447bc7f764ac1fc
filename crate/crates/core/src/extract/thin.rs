//! Iterative two-pass thinning that reduces road blobs to 1-pixel-wide,
//! connectivity-preserving skeletons.

use crate::raster::BinaryMask;

/// Neighbor values clockwise from north: [N, NE, E, SE, S, SW, W, NW].
fn neighbors(mask: &BinaryMask, col: i32, row: i32) -> [bool; 8] {
    [
        mask.get(col, row - 1),
        mask.get(col + 1, row - 1),
        mask.get(col + 1, row),
        mask.get(col + 1, row + 1),
        mask.get(col, row + 1),
        mask.get(col - 1, row + 1),
        mask.get(col - 1, row),
        mask.get(col - 1, row - 1),
    ]
}

fn set_count(nb: &[bool; 8]) -> u32 {
    nb.iter().map(|&b| b as u32).sum()
}

/// Number of 0->1 transitions around the neighborhood ring.
fn transitions(nb: &[bool; 8]) -> u32 {
    (0..8).filter(|&i| !nb[i] && nb[(i + 1) % 8]).count() as u32
}

/// Skeletonize a road mask. Every output pixel was set in the input, each
/// connected component stays connected, and elongated blobs reduce to
/// 1-pixel-wide centerlines.
pub fn thin(mask: &BinaryMask) -> BinaryMask {
    let mut out = mask.clone();
    let mut to_clear: Vec<(i32, i32)> = Vec::new();

    loop {
        let mut changed = false;
        for pass in 0..2 {
            to_clear.clear();
            for (col, row) in out.iter_set() {
                let nb = neighbors(&out, col, row);
                let b = set_count(&nb);
                if !(2..=6).contains(&b) || transitions(&nb) != 1 {
                    continue;
                }
                let [n, _, e, _, s, _, w, _] = nb;
                let ok = if pass == 0 {
                    !(n && e && s) && !(e && s && w)
                } else {
                    !(n && e && w) && !(n && s && w)
                };
                if ok {
                    to_clear.push((col, row));
                }
            }
            if !to_clear.is_empty() {
                changed = true;
                for &(col, row) in &to_clear {
                    out.set(col, row, false);
                }
            }
        }
        if !changed {
            break;
        }
    }

    clear_square_blocks(&mut out);
    out
}

/// The two-pass sweep can leave fully-set 2x2 blocks in rare staircase
/// configurations. Remove one simple pixel per block until none remain.
fn clear_square_blocks(mask: &mut BinaryMask) {
    loop {
        let mut removed = false;
        let blocks: Vec<(i32, i32)> = mask
            .iter_set()
            .filter(|&(c, r)| mask.get(c + 1, r) && mask.get(c, r + 1) && mask.get(c + 1, r + 1))
            .collect();
        for (c, r) in blocks {
            if !(mask.get(c, r) && mask.get(c + 1, r) && mask.get(c, r + 1) && mask.get(c + 1, r + 1)) {
                continue; // already broken up by an earlier removal
            }
            for (cc, rr) in [(c, r), (c + 1, r), (c, r + 1), (c + 1, r + 1)] {
                let nb = neighbors(mask, cc, rr);
                // Simple and not an endpoint: deletion keeps connectivity.
                if transitions(&nb) == 1 && set_count(&nb) >= 2 {
                    mask.set(cc, rr, false);
                    removed = true;
                    break;
                }
            }
        }
        if !removed {
            break;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::raster::GeoTransform;

    fn blank(w: usize, h: usize) -> BinaryMask {
        BinaryMask::empty(w, h, GeoTransform::new(1.0, 1.0, 0.0, 0.0).unwrap())
    }

    fn components(mask: &BinaryMask) -> usize {
        let pixels: Vec<(i32, i32)> = mask.iter_set().collect();
        let mut seen = std::collections::HashSet::new();
        let mut count = 0;
        for &start in &pixels {
            if seen.contains(&start) {
                continue;
            }
            count += 1;
            let mut stack = vec![start];
            seen.insert(start);
            while let Some((c, r)) = stack.pop() {
                for dc in -1..=1 {
                    for dr in -1..=1 {
                        let q = (c + dc, r + dr);
                        if (dc, dr) != (0, 0) && mask.get(q.0, q.1) && seen.insert(q) {
                            stack.push(q);
                        }
                    }
                }
            }
        }
        count
    }

    fn has_square_block(mask: &BinaryMask) -> bool {
        mask.iter_set()
            .any(|(c, r)| mask.get(c + 1, r) && mask.get(c, r + 1) && mask.get(c + 1, r + 1))
    }

    #[test]
    fn empty_mask_stays_empty() {
        let m = blank(16, 16);
        assert_eq!(thin(&m).count_set(), 0);
    }

    #[test]
    fn thick_bar_reduces_to_single_one_px_chain() {
        let mut m = blank(60, 9);
        for row in 3..6 {
            for col in 4..54 {
                m.set(col, row, true);
            }
        }
        let t = thin(&m);
        // Still one component, 1 px wide, bar length give or take 2 px per end.
        assert_eq!(components(&t), 1);
        assert!(!has_square_block(&t));
        let n = t.count_set();
        assert!((46..=50).contains(&n), "skeleton has {n} pixels");
        // Output is a subset of the input.
        for (c, r) in t.iter_set() {
            assert!(m.get(c, r));
        }
        // No pixel has more than 2 neighbors: it is a simple chain.
        for (c, r) in t.iter_set() {
            assert!(set_count(&neighbors(&t, c, r)) <= 2);
        }
    }

    #[test]
    fn plus_blob_keeps_exactly_one_junction() {
        let mut m = blank(41, 41);
        for row in 18..23 {
            for col in 5..36 {
                m.set(col, row, true);
            }
        }
        for col in 18..23 {
            for row in 5..36 {
                m.set(col, row, true);
            }
        }
        let t = thin(&m);
        assert_eq!(components(&t), 1);
        // Junction census by departing branches: runs of set neighbors.
        let junctions = t
            .iter_set()
            .filter(|&(c, r)| {
                let nb = neighbors(&t, c, r);
                let runs = (0..8)
                    .filter(|&i| !nb[i] && nb[(i + 1) % 8])
                    .count()
                    .max((set_count(&nb) == 8) as usize);
                runs >= 3
            })
            .count();
        assert_eq!(junctions, 1, "plus skeleton should have one junction pixel");
    }

    #[test]
    fn connectivity_is_preserved_per_component() {
        let mut m = blank(50, 50);
        // Two separate blobs.
        for row in 5..10 {
            for col in 5..30 {
                m.set(col, row, true);
            }
        }
        for row in 30..36 {
            for col in 20..45 {
                m.set(col, row, true);
            }
        }
        assert_eq!(components(&m), 2);
        let t = thin(&m);
        assert_eq!(components(&t), 2);
    }
}
