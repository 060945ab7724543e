//! Exact squared Euclidean distance transform (Felzenszwalb–Huttenlocher lower envelope
//! of parabolas), applied separably along each axis.

const INF: f64 = 1e30;

/// One-dimensional transform of `f` in place: `f[q] ← min_p (q − p)² + f[p]`.
fn edt_1d(f: &mut [f64], v: &mut Vec<usize>, z: &mut Vec<f64>, out: &mut Vec<f64>) {
    let n = f.len();
    v.clear();
    z.clear();
    out.clear();
    let first = match f.iter().position(|&x| x < INF) {
        Some(i) => i,
        None => return,
    };
    v.push(first);
    z.push(f64::NEG_INFINITY);
    for q in first + 1..n {
        if f[q] >= INF {
            continue;
        }
        let qf = q as f64;
        loop {
            let p = *v.last().unwrap();
            let pf = p as f64;
            let s = ((f[q] + qf * qf) - (f[p] + pf * pf)) / (2.0 * (qf - pf));
            if s <= *z.last().unwrap() {
                v.pop();
                z.pop();
                if v.is_empty() {
                    v.push(q);
                    z.push(f64::NEG_INFINITY);
                    break;
                }
            } else {
                v.push(q);
                z.push(s);
                break;
            }
        }
    }
    let mut k = 0;
    for q in 0..n {
        let qf = q as f64;
        while k + 1 < v.len() && z[k + 1] < qf {
            k += 1;
        }
        let p = v[k] as f64;
        out.push((qf - p) * (qf - p) + f[v[k]]);
    }
    f.copy_from_slice(out);
}

/// Squared distance (in cell units) from every cell of a row-major grid to the
/// nearest seed cell. Cells without any seed in the grid get `f64::INFINITY`.
pub fn squared_edt(seeds: &[bool], res: &[usize]) -> Vec<f64> {
    let mut g: Vec<f64> = seeds.iter().map(|&s| if s { 0.0 } else { INF }).collect();
    let total = g.len();
    let (mut v, mut z, mut out) = (Vec::new(), Vec::new(), Vec::new());
    let mut line = Vec::new();
    for axis in 0..res.len() {
        let len = res[axis];
        let stride: usize = res[axis + 1..].iter().product();
        for base in 0..total {
            // Visit each line once, from its first cell.
            if (base / stride) % len != 0 {
                continue;
            }
            line.clear();
            line.extend((0..len).map(|i| g[base + i * stride]));
            edt_1d(&mut line, &mut v, &mut z, &mut out);
            if !out.is_empty() {
                for i in 0..len {
                    g[base + i * stride] = line[i];
                }
            }
        }
    }
    g.into_iter().map(|x| if x >= INF { f64::INFINITY } else { x }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn matches_brute_force_in_2d_and_3d() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for res in [vec![13, 7], vec![5, 6, 4]] {
            let total: usize = res.iter().product();
            let seeds: Vec<bool> = (0..total).map(|_| rng.gen_bool(0.05)).collect();
            let got = squared_edt(&seeds, &res);
            let coords = |mut i: usize| {
                let mut c = vec![0i64; res.len()];
                for a in (0..res.len()).rev() {
                    c[a] = (i % res[a]) as i64;
                    i /= res[a];
                }
                c
            };
            for i in 0..total {
                let ci = coords(i);
                let brute = (0..total)
                    .filter(|&j| seeds[j])
                    .map(|j| {
                        let cj = coords(j);
                        ci.iter().zip(&cj).map(|(a, b)| ((a - b) * (a - b)) as f64).sum::<f64>()
                    })
                    .fold(f64::INFINITY, f64::min);
                assert_eq!(got[i], brute);
            }
        }
    }
}
