//! Triangle/box overlap and point containment.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::geometry::{Aabb, Point, Vector};

use super::bvh::Bvh;
use super::TriMesh;

/// Seed for the ray directions used by [`MeshQuery::new`].
pub const DEFAULT_RAY_SEED: u64 = 0x6f63_7472_6565;

const RAY_DIRECTIONS: usize = 16;
const BARY_EPS: f64 = 1e-9;

/// Closed-set test: true when the triangle and the box share any point,
/// including contact on the box boundary.
pub fn triangle_box_intersect(tri: &[Point; 3], bx: &Aabb) -> bool {
    !separated(tri, bx, false)
}

/// True when the triangle passes through the open interior of the box.
/// A triangle that only touches the box surface does not count.
pub fn triangle_crosses_box_interior(tri: &[Point; 3], bx: &Aabb) -> bool {
    !separated(tri, bx, true)
}

/// Separating-axis test over the 3 box normals, the triangle normal and the
/// 9 edge cross products. `open_box` treats touching as separated.
fn separated(tri: &[Point; 3], bx: &Aabb, open_box: bool) -> bool {
    let c = bx.center();
    let h = bx.half_extents();
    let v = tri.map(|p| p - c);
    let edges = [v[1] - v[0], v[2] - v[1], v[0] - v[2]];
    let scale = h.amax().max(v.iter().map(|p| p.amax()).fold(0.0, f64::max));
    let tol = 1e-12 * scale.max(f64::MIN_POSITIVE);

    let test = |axis: Vector| -> bool {
        let len = axis.norm();
        if len <= 1e-12 * scale * scale.max(1.0) {
            return false;
        }
        let p = v.map(|p| p.dot(&axis));
        let lo = p[0].min(p[1]).min(p[2]);
        let hi = p[0].max(p[1]).max(p[2]);
        let r = h.x * axis.x.abs() + h.y * axis.y.abs() + h.z * axis.z.abs();
        let t = tol * len;
        if open_box {
            lo >= r - t || hi <= -r + t
        } else {
            lo > r + t || hi < -r - t
        }
    };

    for axis in [Vector::x(), Vector::y(), Vector::z()] {
        if test(axis) {
            return true;
        }
    }
    if test(edges[0].cross(&edges[1])) {
        return true;
    }
    for e in &edges {
        for a in [Vector::x(), Vector::y(), Vector::z()] {
            if test(a.cross(e)) {
                return true;
            }
        }
    }
    false
}

/// Result of locating a point against a closed surface.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Containment {
    Inside,
    Outside,
    OnBoundary,
}

/// Spatial index over a watertight mesh for containment and ray queries.
///
/// Queries are pure; one `MeshQuery` can be shared across threads.
#[derive(Debug, Clone)]
pub struct MeshQuery<'m> {
    mesh: &'m TriMesh,
    bvh: Bvh,
    directions: Vec<Vector>,
    epsilon: f64,
}

impl<'m> MeshQuery<'m> {
    /// Fails with `NotWatertight` for open meshes.
    pub fn new(mesh: &'m TriMesh) -> Result<Self> {
        Self::with_seed(mesh, DEFAULT_RAY_SEED)
    }

    pub fn with_seed(mesh: &'m TriMesh, seed: u64) -> Result<Self> {
        mesh.require_watertight()?;
        let bounds: Vec<Aabb> = (0..mesh.triangles().len())
            .map(|i| Aabb::from_points(mesh.triangle(i).iter()))
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let directions = (0..RAY_DIRECTIONS)
            .map(|_| loop {
                let d = Vector::new(
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                );
                let n = d.norm();
                if n > 0.1 && n <= 1.0 {
                    break d / n;
                }
            })
            .collect();
        Ok(Self {
            mesh,
            bvh: Bvh::build(&bounds),
            directions,
            epsilon: mesh.boundary_epsilon(),
        })
    }

    pub fn mesh(&self) -> &'m TriMesh {
        self.mesh
    }

    pub fn boundary_epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Parity ray cast; retries along another seeded direction whenever the
    /// ray grazes an edge, a vertex or a triangle plane.
    pub fn contains(&self, p: &Point) -> Containment {
        if self.near_surface(p, self.epsilon) {
            return Containment::OnBoundary;
        }
        let reach = 2.0 * (self.mesh.metrics().bbox().distance_to(p)
            + self.mesh.metrics().extents().norm())
            + 1.0;
        for dir in &self.directions {
            if let Some(odd) = self.ray_parity(p, dir, reach) {
                return if odd {
                    Containment::Inside
                } else {
                    Containment::Outside
                };
            }
        }
        Containment::OnBoundary
    }

    /// `None` when the ray hits a triangle degenerately.
    fn ray_parity(&self, origin: &Point, dir: &Vector, reach: f64) -> Option<bool> {
        let mut crossings = 0usize;
        let mut degenerate = false;
        self.bvh.any_on_ray(origin, dir, reach, |t| {
            match ray_triangle(origin, dir, &self.mesh.triangle(t)) {
                RayHit::Miss => false,
                RayHit::Hit(_) => {
                    crossings += 1;
                    false
                }
                RayHit::Degenerate => {
                    degenerate = true;
                    true
                }
            }
        });
        (!degenerate).then_some(crossings % 2 == 1)
    }

    /// True when some triangle lies within `eps` of `p`.
    pub fn near_surface(&self, p: &Point, eps: f64) -> bool {
        let q = Aabb::new(*p, *p).inflated(eps);
        self.bvh.any_in_box(&q, |t| {
            let tri = self.mesh.triangle(t);
            (closest_point_on_triangle(p, &tri) - p).norm() <= eps
        })
    }

    /// True when any triangle passes through the open interior of `bx`.
    pub fn crosses_box(&self, bx: &Aabb) -> bool {
        self.bvh.any_in_box(bx, |t| {
            triangle_crosses_box_interior(&self.mesh.triangle(t), bx)
        })
    }

    /// True when the segment `a..b` touches any triangle. In-plane grazing
    /// does not count as a hit.
    pub fn segment_blocked(&self, a: &Point, b: &Point) -> bool {
        let d = b - a;
        if d.norm() == 0.0 {
            return false;
        }
        self.bvh.any_on_ray(a, &d, 1.0, |t| {
            match ray_triangle(a, &d, &self.mesh.triangle(t)) {
                RayHit::Hit(s) => s <= 1.0,
                RayHit::Degenerate => true,
                RayHit::Miss => false,
            }
        })
    }
}

enum RayHit {
    Miss,
    Hit(f64),
    Degenerate,
}

/// Möller-Trumbore with explicit handling of edge, vertex and in-plane cases.
fn ray_triangle(origin: &Point, dir: &Vector, tri: &[Point; 3]) -> RayHit {
    let e1 = tri[1] - tri[0];
    let e2 = tri[2] - tri[0];
    let pvec = dir.cross(&e2);
    let det = e1.dot(&pvec);
    let scale = e1.norm() * e2.norm() * dir.norm();
    if det.abs() <= 1e-12 * scale {
        // Parallel: only a problem if the ray lies in the triangle's plane.
        let n = e1.cross(&e2);
        let dist = (origin - tri[0]).dot(&n).abs() / n.norm();
        return if dist <= 1e-12 * (e1.norm() + e2.norm()) {
            RayHit::Degenerate
        } else {
            RayHit::Miss
        };
    }
    let inv = 1.0 / det;
    let tvec = origin - tri[0];
    let u = tvec.dot(&pvec) * inv;
    let qvec = tvec.cross(&e1);
    let v = dir.dot(&qvec) * inv;
    let t = e2.dot(&qvec) * inv;
    let w = 1.0 - u - v;
    if u < -BARY_EPS || v < -BARY_EPS || w < -BARY_EPS || t < -BARY_EPS {
        return RayHit::Miss;
    }
    if u <= BARY_EPS || v <= BARY_EPS || w <= BARY_EPS || t <= BARY_EPS {
        return RayHit::Degenerate;
    }
    RayHit::Hit(t)
}

/// Closest point on a triangle (Ericson, Real-Time Collision Detection 5.1.5).
pub(crate) fn closest_point_on_triangle(p: &Point, tri: &[Point; 3]) -> Point {
    let [a, b, c] = *tri;
    let ab = b - a;
    let ac = c - a;
    let ap = p - a;
    let d1 = ab.dot(&ap);
    let d2 = ac.dot(&ap);
    if d1 <= 0.0 && d2 <= 0.0 {
        return a;
    }
    let bp = p - b;
    let d3 = ab.dot(&bp);
    let d4 = ac.dot(&bp);
    if d3 >= 0.0 && d4 <= d3 {
        return b;
    }
    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        return a + ab * (d1 / (d1 - d3));
    }
    let cp = p - c;
    let d5 = ab.dot(&cp);
    let d6 = ac.dot(&cp);
    if d6 >= 0.0 && d5 <= d6 {
        return c;
    }
    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        return a + ac * (d2 / (d2 - d6));
    }
    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        return b + (c - b) * ((d4 - d3) / ((d4 - d3) + (d5 - d6)));
    }
    let denom = 1.0 / (va + vb + vc);
    a + ab * (vb * denom) + ac * (vc * denom)
}
