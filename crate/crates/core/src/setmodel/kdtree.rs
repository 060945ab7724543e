//! Runtime-dimension k-d tree over a fixed point cloud.

pub(crate) const LEAF: usize = 8;

#[derive(Debug, Clone)]
pub struct KdTree {
    dim: usize,
    coords: Vec<f64>,
    nodes: Vec<Node>,
}

#[derive(Debug, Clone)]
enum Node {
    Leaf { start: usize, end: usize },
    Split { axis: usize, value: f64, left: usize, right: usize },
}

impl KdTree {
    pub fn new(points: &[Vec<f64>]) -> Self {
        let dim = points.first().map_or(1, |p| p.len());
        let mut idx: Vec<usize> = (0..points.len()).collect();
        let mut tree = KdTree { dim, coords: Vec::with_capacity(points.len() * dim), nodes: Vec::new() };
        tree.build(points, &mut idx, 0, points.len());
        for &i in &idx {
            tree.coords.extend_from_slice(&points[i]);
        }
        tree
    }

    fn build(&mut self, pts: &[Vec<f64>], idx: &mut [usize], start: usize, end: usize) -> usize {
        let id = self.nodes.len();
        if end - start <= LEAF {
            self.nodes.push(Node::Leaf { start, end });
            return id;
        }
        let slice = &mut idx[start..end];
        let axis = (0..self.dim)
            .max_by(|&a, &b| {
                let spread = |ax: usize| {
                    let (lo, hi) = slice.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |acc, &i| {
                        (acc.0.min(pts[i][ax]), acc.1.max(pts[i][ax]))
                    });
                    hi - lo
                };
                spread(a).total_cmp(&spread(b))
            })
            .unwrap_or(0);
        let mid = slice.len() / 2;
        slice.select_nth_unstable_by(mid, |&a, &b| pts[a][axis].total_cmp(&pts[b][axis]));
        let value = pts[slice[mid]][axis];
        self.nodes.push(Node::Leaf { start: 0, end: 0 });
        let left = self.build(pts, idx, start, start + mid);
        let right = self.build(pts, idx, start + mid, end);
        self.nodes[id] = Node::Split { axis, value, left, right };
        id
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.dim)
    }

    /// Index and squared distance of the nearest stored point.
    pub fn nearest(&self, x: &[f64]) -> (usize, f64) {
        let mut best = (usize::MAX, f64::INFINITY);
        self.nearest_rec(0, x, &mut best);
        best
    }

    fn nearest_rec(&self, node: usize, x: &[f64], best: &mut (usize, f64)) {
        match self.nodes[node] {
            Node::Leaf { start, end } => {
                for i in start..end {
                    let d = crate::geom::dist2(self.point(i), x);
                    if d < best.1 {
                        *best = (i, d);
                    }
                }
            }
            Node::Split { axis, value, left, right } => {
                let diff = x[axis] - value;
                let (near, far) = if diff < 0.0 { (left, right) } else { (right, left) };
                self.nearest_rec(near, x, best);
                if diff * diff < best.1 {
                    self.nearest_rec(far, x, best);
                }
            }
        }
    }

    /// Indices of all points with `|p - x| < r`.
    pub fn within(&self, x: &[f64], r: f64) -> Vec<usize> {
        let mut out = Vec::new();
        self.within_rec(0, x, r * r, &mut out);
        out.sort_unstable();
        out
    }

    fn within_rec(&self, node: usize, x: &[f64], r2: f64, out: &mut Vec<usize>) {
        match self.nodes[node] {
            Node::Leaf { start, end } => {
                out.extend((start..end).filter(|&i| crate::geom::dist2(self.point(i), x) < r2));
            }
            Node::Split { axis, value, left, right } => {
                let diff = x[axis] - value;
                if diff < 0.0 || diff * diff < r2 {
                    self.within_rec(left, x, r2, out);
                }
                if diff >= 0.0 || diff * diff < r2 {
                    self.within_rec(right, x, r2, out);
                }
            }
        }
    }
}
