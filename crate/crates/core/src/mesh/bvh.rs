//! Bounding volume hierarchy over mesh triangles.

use crate::geometry::{Aabb, Point, Vector};

const LEAF_SIZE: usize = 4;

#[derive(Debug, Clone)]
enum Node {
    Leaf { bounds: Aabb, start: u32, len: u32 },
    Inner { bounds: Aabb, left: u32, right: u32 },
}

impl Node {
    fn bounds(&self) -> &Aabb {
        match self {
            Node::Leaf { bounds, .. } | Node::Inner { bounds, .. } => bounds,
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Bvh {
    nodes: Vec<Node>,
    order: Vec<u32>,
}

impl Bvh {
    pub fn build(tri_bounds: &[Aabb]) -> Self {
        let mut order: Vec<u32> = (0..tri_bounds.len() as u32).collect();
        let centroids: Vec<Point> = tri_bounds.iter().map(Aabb::center).collect();
        let mut nodes = Vec::with_capacity(2 * tri_bounds.len() / LEAF_SIZE + 1);
        build_node(&mut nodes, &mut order, 0, tri_bounds, &centroids);
        Self { nodes, order }
    }

    /// Calls `f` for every triangle whose bounds overlap `query`; stops early
    /// when `f` returns true and reports whether it did.
    pub fn any_in_box(&self, query: &Aabb, mut f: impl FnMut(usize) -> bool) -> bool {
        if self.nodes.is_empty() {
            return false;
        }
        let mut stack = vec![0u32];
        while let Some(n) = stack.pop() {
            let node = &self.nodes[n as usize];
            if !node.bounds().intersects(query) {
                continue;
            }
            match *node {
                Node::Leaf { start, len, .. } => {
                    for &t in &self.order[start as usize..(start + len) as usize] {
                        if f(t as usize) {
                            return true;
                        }
                    }
                }
                Node::Inner { left, right, .. } => {
                    stack.push(right);
                    stack.push(left);
                }
            }
        }
        false
    }

    /// Calls `f` for every triangle whose bounds are hit by the ray segment
    /// `origin + t * dir`, `t` in `[0, t_max]`. Stops early when `f` returns true.
    pub fn any_on_ray(
        &self,
        origin: &Point,
        dir: &Vector,
        t_max: f64,
        mut f: impl FnMut(usize) -> bool,
    ) -> bool {
        if self.nodes.is_empty() {
            return false;
        }
        let inv = dir.map(|d| 1.0 / d);
        let mut stack = vec![0u32];
        while let Some(n) = stack.pop() {
            let node = &self.nodes[n as usize];
            if !slab_hit(node.bounds(), origin, &inv, t_max) {
                continue;
            }
            match *node {
                Node::Leaf { start, len, .. } => {
                    for &t in &self.order[start as usize..(start + len) as usize] {
                        if f(t as usize) {
                            return true;
                        }
                    }
                }
                Node::Inner { left, right, .. } => {
                    stack.push(right);
                    stack.push(left);
                }
            }
        }
        false
    }
}

fn slab_hit(b: &Aabb, origin: &Point, inv: &Vector, t_max: f64) -> bool {
    let mut t0: f64 = 0.0;
    let mut t1 = t_max;
    for i in 0..3 {
        let (mut a, mut c) = ((b.min[i] - origin[i]) * inv[i], (b.max[i] - origin[i]) * inv[i]);
        if a.is_nan() || c.is_nan() {
            // Ray parallel to and lying on a slab plane.
            if origin[i] < b.min[i] || origin[i] > b.max[i] {
                return false;
            }
            continue;
        }
        if a > c {
            std::mem::swap(&mut a, &mut c);
        }
        t0 = t0.max(a);
        t1 = t1.min(c);
        if t0 > t1 {
            return false;
        }
    }
    true
}

fn build_node(
    nodes: &mut Vec<Node>,
    order: &mut [u32],
    start: usize,
    tri_bounds: &[Aabb],
    centroids: &[Point],
) -> u32 {
    let bounds = order
        .iter()
        .fold(Aabb::empty(), |b, &t| b.merge(&tri_bounds[t as usize]));
    let id = nodes.len() as u32;
    if order.len() <= LEAF_SIZE {
        nodes.push(Node::Leaf {
            bounds,
            start: start as u32,
            len: order.len() as u32,
        });
        return id;
    }
    let cb = Aabb::from_points(order.iter().map(|&t| &centroids[t as usize]));
    let e = cb.extents();
    let axis = if e.x >= e.y && e.x >= e.z {
        0
    } else if e.y >= e.z {
        1
    } else {
        2
    };
    order.sort_unstable_by(|&a, &b| {
        centroids[a as usize][axis]
            .total_cmp(&centroids[b as usize][axis])
            .then(a.cmp(&b))
    });
    nodes.push(Node::Leaf {
        bounds,
        start: 0,
        len: 0,
    });
    let mid = order.len() / 2;
    let (lo, hi) = order.split_at_mut(mid);
    let left = build_node(nodes, lo, start, tri_bounds, centroids);
    let right = build_node(nodes, hi, start + mid, tri_bounds, centroids);
    nodes[id as usize] = Node::Inner {
        bounds,
        left,
        right,
    };
    id
}
