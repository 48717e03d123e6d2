//! Procedural test parts: analytic solids and axis-aligned box unions.
//!
//! Every generator returns a watertight, outward-oriented [`TriMesh`]. They
//! back the unit tests, the acceptance suite and the runnable examples.

use std::collections::HashMap;
use std::io::Write;
use std::path::Path;

use crate::geometry::{Aabb, Point};
use crate::mesh::TriMesh;

fn build(vertices: Vec<Point>, triangles: Vec<[u32; 3]>) -> TriMesh {
    let mesh = TriMesh::new(vertices, triangles).expect("fixture mesh is non-empty");
    if mesh.metrics().volume < 0.0 {
        let flipped = mesh.triangles().iter().map(|t| [t[0], t[2], t[1]]).collect();
        TriMesh::new(mesh.vertices().to_vec(), flipped).expect("fixture mesh is non-empty")
    } else {
        mesh
    }
}

pub fn unit_cube() -> TriMesh {
    box_mesh(&Aabb::from_coords([0.0; 3], [1.0; 3]))
}

pub fn box_mesh(b: &Aabb) -> TriMesh {
    BoxUnion::new().solid(*b).build()
}

/// Cube of edge `edge` with its minimum corner at the origin.
pub fn cube(edge: f64) -> TriMesh {
    box_mesh(&Aabb::from_coords([0.0; 3], [edge; 3]))
}

/// Subdivided icosahedron projected onto a sphere centered at the origin.
pub fn icosphere(radius: f64, subdivisions: u32) -> TriMesh {
    let t = (1.0 + 5f64.sqrt()) / 2.0;
    let mut verts: Vec<Point> = [
        [-1.0, t, 0.0],
        [1.0, t, 0.0],
        [-1.0, -t, 0.0],
        [1.0, -t, 0.0],
        [0.0, -1.0, t],
        [0.0, 1.0, t],
        [0.0, -1.0, -t],
        [0.0, 1.0, -t],
        [t, 0.0, -1.0],
        [t, 0.0, 1.0],
        [-t, 0.0, -1.0],
        [-t, 0.0, 1.0],
    ]
    .iter()
    .map(|c| Point::from(nalgebra::Vector3::from(*c).normalize()))
    .collect();
    let mut faces: Vec<[u32; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    for _ in 0..subdivisions {
        let mut cache: HashMap<(u32, u32), u32> = HashMap::new();
        let mut midpoint = |a: u32, b: u32, verts: &mut Vec<Point>| -> u32 {
            let key = (a.min(b), a.max(b));
            *cache.entry(key).or_insert_with(|| {
                let m = nalgebra::center(&verts[a as usize], &verts[b as usize]);
                verts.push(Point::from(m.coords.normalize()));
                verts.len() as u32 - 1
            })
        };
        let mut next = Vec::with_capacity(faces.len() * 4);
        for [a, b, c] in faces {
            let ab = midpoint(a, b, &mut verts);
            let bc = midpoint(b, c, &mut verts);
            let ca = midpoint(c, a, &mut verts);
            next.extend([[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        faces = next;
    }
    let verts = verts.into_iter().map(|p| p * radius).collect();
    build(verts, faces)
}

/// Torus around the z axis.
pub fn torus(major: f64, minor: f64, segments_major: u32, segments_minor: u32) -> TriMesh {
    let (nu, nv) = (segments_major, segments_minor);
    let mut verts = Vec::with_capacity((nu * nv) as usize);
    for i in 0..nu {
        let u = std::f64::consts::TAU * f64::from(i) / f64::from(nu);
        for j in 0..nv {
            let v = std::f64::consts::TAU * f64::from(j) / f64::from(nv);
            let ring = major + minor * v.cos();
            verts.push(Point::new(ring * u.cos(), ring * u.sin(), minor * v.sin()));
        }
    }
    let id = |i: u32, j: u32| (i % nu) * nv + (j % nv);
    let mut tris = Vec::with_capacity((2 * nu * nv) as usize);
    for i in 0..nu {
        for j in 0..nv {
            let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            tris.push([a, b, c]);
            tris.push([a, c, d]);
        }
    }
    build(verts, tris)
}

/// Union of solid boxes minus void boxes, meshed on the grid induced by all
/// box bounds. Cells that touch only along an edge produce non-manifold
/// output, so fixtures avoid such configurations.
#[derive(Debug, Clone, Default)]
pub struct BoxUnion {
    solids: Vec<Aabb>,
    voids: Vec<Aabb>,
}

impl BoxUnion {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn solid(mut self, b: Aabb) -> Self {
        self.solids.push(b);
        self
    }

    pub fn void(mut self, b: Aabb) -> Self {
        self.voids.push(b);
        self
    }

    pub fn build(&self) -> TriMesh {
        let mut grid: [Vec<f64>; 3] = Default::default();
        for b in self.solids.iter().chain(&self.voids) {
            for (axis, g) in grid.iter_mut().enumerate() {
                g.push(b.min[axis]);
                g.push(b.max[axis]);
            }
        }
        for g in &mut grid {
            g.sort_by(f64::total_cmp);
            g.dedup();
        }
        let dims = grid.each_ref().map(|g| g.len().saturating_sub(1));
        let occupied = |c: [isize; 3]| -> bool {
            if (0..3).any(|a| c[a] < 0 || c[a] as usize >= dims[a]) {
                return false;
            }
            let p = Point::new(
                0.5 * (grid[0][c[0] as usize] + grid[0][c[0] as usize + 1]),
                0.5 * (grid[1][c[1] as usize] + grid[1][c[1] as usize + 1]),
                0.5 * (grid[2][c[2] as usize] + grid[2][c[2] as usize + 1]),
            );
            self.solids.iter().any(|b| b.contains(&p)) && !self.voids.iter().any(|b| b.contains(&p))
        };

        let mut index: HashMap<[usize; 3], u32> = HashMap::new();
        let mut verts = Vec::new();
        let mut vertex = |g: [usize; 3]| -> u32 {
            *index.entry(g).or_insert_with(|| {
                verts.push(Point::new(grid[0][g[0]], grid[1][g[1]], grid[2][g[2]]));
                verts.len() as u32 - 1
            })
        };
        let mut tris = Vec::new();
        for i in 0..dims[0] {
            for j in 0..dims[1] {
                for k in 0..dims[2] {
                    let c = [i as isize, j as isize, k as isize];
                    if !occupied(c) {
                        continue;
                    }
                    for axis in 0..3 {
                        for positive in [false, true] {
                            let mut n = c;
                            n[axis] += if positive { 1 } else { -1 };
                            if occupied(n) {
                                continue;
                            }
                            let (b, cc) = ((axis + 1) % 3, (axis + 2) % 3);
                            let cell = [i, j, k];
                            let corner = |db: usize, dc: usize| {
                                let mut g = cell;
                                g[axis] += usize::from(positive);
                                g[b] += db;
                                g[cc] += dc;
                                g
                            };
                            let mut quad = [
                                vertex(corner(0, 0)),
                                vertex(corner(1, 0)),
                                vertex(corner(1, 1)),
                                vertex(corner(0, 1)),
                            ];
                            if !positive {
                                quad.reverse();
                            }
                            tris.push([quad[0], quad[1], quad[2]]);
                            tris.push([quad[0], quad[2], quad[3]]);
                        }
                    }
                }
            }
        }
        build(verts, tris)
    }
}

/// Square block with a centered rectangular pocket opening upward.
pub fn pocket_block(side: f64, height: f64, pocket_x: f64, pocket_y: f64, depth: f64) -> TriMesh {
    let c = side / 2.0;
    BoxUnion::new()
        .solid(Aabb::from_coords([0.0; 3], [side, side, height]))
        .void(Aabb::from_coords(
            [c - pocket_x / 2.0, c - pocket_y / 2.0, height - depth],
            [c + pocket_x / 2.0, c + pocket_y / 2.0, height + 1.0],
        ))
        .build()
}

/// Prism whose footprint is three of the four quadrants of a square of side
/// `2 * quadrant`; its bbox volume is 4/3 of its own.
pub fn l_prism(quadrant: f64, height: f64) -> TriMesh {
    let s = quadrant;
    BoxUnion::new()
        .solid(Aabb::from_coords([0.0; 3], [2.0 * s, s, height]))
        .solid(Aabb::from_coords([0.0, s, 0.0], [s, 2.0 * s, height]))
        .build()
}

/// The two box modules of [`l_prism`], split along the plane `y = quadrant`.
pub fn l_prism_split(quadrant: f64, height: f64) -> (TriMesh, TriMesh) {
    let s = quadrant;
    (
        box_mesh(&Aabb::from_coords([0.0; 3], [2.0 * s, s, height])),
        box_mesh(&Aabb::from_coords([0.0, s, 0.0], [s, 2.0 * s, height])),
    )
}

/// C-shaped part: a base, a back wall and a top flange overhanging the base.
/// The base top between `x = 10` and `x = 50` has no vertical access.
pub fn undercut_part() -> TriMesh {
    BoxUnion::new()
        .solid(Aabb::from_coords([0.0; 3], [60.0, 40.0, 40.0]))
        .void(Aabb::from_coords([10.0, -1.0, 10.0], [61.0, 41.0, 30.0]))
        .void(Aabb::from_coords([50.0, -1.0, 30.0], [61.0, 41.0, 41.0]))
        .build()
}

/// Layout of [`die`]: slab extents and pocket boxes.
#[derive(Debug, Clone)]
pub struct DieLayout {
    pub slab: Aabb,
    pub pockets: Vec<Aabb>,
}

impl Default for DieLayout {
    fn default() -> Self {
        let slab = Aabb::from_coords([0.0; 3], [128.0, 64.0, 24.0]);
        let pockets = [24.0, 64.0, 104.0]
            .iter()
            .map(|&cx| Aabb::from_coords([cx - 12.0, 20.0, 8.0], [cx + 12.0, 44.0, 24.0]))
            .collect();
        Self { slab, pockets }
    }
}

/// Desk-scale die: a slab with three sharp-cornered pockets.
pub fn die(layout: &DieLayout) -> TriMesh {
    let mut u = BoxUnion::new().solid(layout.slab);
    for p in &layout.pockets {
        let mut open = *p;
        open.max.z = layout.slab.max.z + 1.0;
        u = u.void(open);
    }
    u.build()
}

/// Unit cube at the origin plus a small cube at `[1.9, 2]^3`, so the bbox
/// is `[0, 2]^3` and the unit cube fills exactly its lower octant.
pub fn corner_cube_pair() -> TriMesh {
    BoxUnion::new()
        .solid(Aabb::from_coords([0.0; 3], [1.0; 3]))
        .solid(Aabb::from_coords([1.9; 3], [2.0; 3]))
        .build()
}

pub fn stl_binary_bytes(mesh: &TriMesh) -> Vec<u8> {
    let n = mesh.triangles().len();
    let mut out = Vec::with_capacity(84 + 50 * n);
    let mut header = [0u8; 80];
    header[..9].copy_from_slice(b"dfm-index");
    out.extend_from_slice(&header);
    out.extend_from_slice(&(n as u32).to_le_bytes());
    for i in 0..n {
        let [a, b, c] = mesh.triangle(i);
        let normal = (b - a).cross(&(c - a)).normalize();
        for v in normal.iter().chain(a.coords.iter()).chain(b.coords.iter()).chain(c.coords.iter()) {
            out.extend_from_slice(&(*v as f32).to_le_bytes());
        }
        out.extend_from_slice(&0u16.to_le_bytes());
    }
    out
}

pub fn stl_ascii_string(mesh: &TriMesh) -> String {
    let mut s = String::from("solid fixture\n");
    for i in 0..mesh.triangles().len() {
        let [a, b, c] = mesh.triangle(i);
        let n = (b - a).cross(&(c - a)).normalize();
        s += &format!("  facet normal {} {} {}\n    outer loop\n", n.x, n.y, n.z);
        for v in [a, b, c] {
            s += &format!("      vertex {} {} {}\n", v.x, v.y, v.z);
        }
        s += "    endloop\n  endfacet\n";
    }
    s += "endsolid fixture\n";
    s
}

pub fn write_stl(mesh: &TriMesh, path: impl AsRef<Path>) -> std::io::Result<()> {
    let mut f = std::fs::File::create(path)?;
    f.write_all(&stl_binary_bytes(mesh))
}
