//! Independent reference computations shared by the integration tests.
//! None of these use the library's own predicates.
#![allow(dead_code)]

use dfm_index::fixtures::DieLayout;
use dfm_index::geometry::{Aabb, Point, Vector};
use dfm_index::mesh::TriMesh;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Generalized winding number: total signed solid angle over 4 pi.
pub fn winding_number(mesh: &TriMesh, p: &Point) -> f64 {
    let mut total = 0.0;
    for i in 0..mesh.triangles().len() {
        let [a, b, c] = mesh.triangle(i);
        let (a, b, c) = (a - p, b - p, c - p);
        let (la, lb, lc) = (a.norm(), b.norm(), c.norm());
        let num = a.dot(&b.cross(&c));
        let den = la * lb * lc + a.dot(&b) * lc + b.dot(&c) * la + c.dot(&a) * lb;
        total += 2.0 * num.atan2(den);
    }
    total / (4.0 * std::f64::consts::PI)
}

pub fn winding_inside(mesh: &TriMesh, p: &Point) -> bool {
    winding_number(mesh, p) > 0.5
}

/// Distance from `p` to triangle `abc`, by projecting onto the plane and
/// falling back to the three edges.
pub fn point_triangle_distance(p: &Point, a: &Point, b: &Point, c: &Point) -> f64 {
    let n = (b - a).cross(&(c - a));
    let nn = n.norm_squared();
    if nn > 0.0 {
        let d = (p - a).dot(&n) / nn;
        let q = p - n * d;
        let inside = [(a, b), (b, c), (c, a)]
            .iter()
            .all(|(u, v)| (*v - *u).cross(&(q - *u)).dot(&n) >= 0.0);
        if inside {
            return (p - q).norm();
        }
    }
    [(a, b), (b, c), (c, a)]
        .iter()
        .map(|(u, v)| point_segment_distance(p, u, v))
        .fold(f64::INFINITY, f64::min)
}

fn point_segment_distance(p: &Point, a: &Point, b: &Point) -> f64 {
    let ab: Vector = b - a;
    let len2 = ab.norm_squared();
    let t = if len2 > 0.0 { ((p - a).dot(&ab) / len2).clamp(0.0, 1.0) } else { 0.0 };
    (p - (a + ab * t)).norm()
}

pub fn mesh_distance(mesh: &TriMesh, p: &Point) -> f64 {
    (0..mesh.triangles().len())
        .map(|i| {
            let [a, b, c] = mesh.triangle(i);
            point_triangle_distance(p, &a, &b, &c)
        })
        .fold(f64::INFINITY, f64::min)
}

/// Monte Carlo volume of the part inside `bx` using the winding number.
pub fn sampled_volume(mesh: &TriMesh, bx: &Aabb, samples: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let hits = (0..samples)
        .filter(|_| winding_inside(mesh, &random_point(&mut rng, bx)))
        .count();
    bx.volume() * hits as f64 / samples as f64
}

pub fn random_point(rng: &mut impl Rng, bx: &Aabb) -> Point {
    Point::new(
        rng.gen_range(bx.min.x..bx.max.x),
        rng.gen_range(bx.min.y..bx.max.y),
        rng.gen_range(bx.min.z..bx.max.z),
    )
}

/// Is the leaf within one leaf width of a vertical pocket corner edge, between
/// the pocket floor and the slab's top face?
pub fn near_pocket_corner(leaf: &Aabb, layout: &DieLayout) -> bool {
    let reach = leaf.extents().x;
    layout.pockets.iter().any(|p| {
        let corners = [(p.min.x, p.min.y), (p.min.x, p.max.y), (p.max.x, p.min.y), (p.max.x, p.max.y)];
        leaf.max.z > p.min.z
            && leaf.max.z < layout.slab.max.z
            && corners.iter().any(|&(x, y)| {
                let dx = (leaf.min.x - x).max(x - leaf.max.x).max(0.0);
                let dy = (leaf.min.y - y).max(y - leaf.max.y).max(0.0);
                dx.hypot(dy) <= reach
            })
    })
}

/// Nearest-rank 90th percentile.
pub fn percentile_90(values: &[f64]) -> f64 {
    let mut s = values.to_vec();
    s.sort_by(f64::total_cmp);
    s[(s.len() * 9).div_ceil(10) - 1]
}
