//! Greedy separated nets over point samples, bucketed on a hash grid.

use crate::geom::dist2;
use crate::setmodel::MAX_DIM;
use rustc_hash::FxHashMap;

type Key = [i64; MAX_DIM];

pub(crate) fn cell_key(p: &[f64], cell: f64) -> Key {
    let mut k = [0i64; MAX_DIM];
    for (a, v) in p.iter().enumerate() {
        k[a] = (v / cell).floor() as i64;
    }
    k
}

/// Indices of a maximal `sep`-separated subset, chosen greedily in input order:
/// centers are pairwise at distance `≥ sep` and every point lies within `< sep` of one.
pub fn greedy_net(points: &[Vec<f64>], sep: f64) -> Vec<usize> {
    let refs: Vec<&[f64]> = points.iter().map(Vec::as_slice).collect();
    greedy_net_refs(&refs, sep)
}

/// [`greedy_net`] over borrowed points.
pub fn greedy_net_refs(points: &[&[f64]], sep: f64) -> Vec<usize> {
    let Some(first) = points.first() else {
        return Vec::new();
    };
    let n = first.len();
    let sep2 = sep * sep;
    let mut grid: FxHashMap<Key, Vec<usize>> = FxHashMap::default();
    let mut centers = Vec::new();
    let offsets = 3usize.pow(n as u32);
    for (i, p) in points.iter().enumerate() {
        let k = cell_key(p, sep);
        let mut covered = false;
        // Offset 0 is the point's own cell, the likeliest place for a covering center.
        'search: for o in 0..offsets {
            let mut nk = k;
            let mut rest = (o + offsets / 2) % offsets;
            for a in 0..n {
                nk[a] += (rest % 3) as i64 - 1;
                rest /= 3;
            }
            if let Some(list) = grid.get(&nk) {
                for &c in list {
                    if dist2(points[c], p) < sep2 {
                        covered = true;
                        break 'search;
                    }
                }
            }
        }
        if !covered {
            grid.entry(k).or_default().push(i);
            centers.push(i);
        }
    }
    centers
}
