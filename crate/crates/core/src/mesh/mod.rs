//! Triangle meshes: loading, cleanup, measurement and geometric predicates.
//!
//! All coordinates are millimeters. A [`TriMesh`] is immutable once built;
//! its [`MeshMetrics`] are computed on first access and cached.

mod bvh;
mod io;
mod predicates;

use std::collections::HashMap;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Aabb, Point, Vector};
use crate::hash::Fnv64;

pub use io::{load_mesh, parse_mesh, MeshFormat};
pub use predicates::{
    triangle_box_intersect, triangle_crosses_box_interior, Containment, MeshQuery,
};

/// Default vertex weld distance in millimeters.
pub const DEFAULT_WELD_TOLERANCE: f64 = 1e-4;

/// Boundary shell thickness as a fraction of the largest bbox extent.
pub const BOUNDARY_EPSILON_FRACTION: f64 = 1e-6;

/// Whole-mesh measurements.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeshMetrics {
    pub bbox_min: Point,
    pub bbox_max: Point,
    pub max_dimension: f64,
    pub surface_area: f64,
    /// Signed volume; positive for outward-oriented closed meshes.
    pub volume: f64,
    pub watertight: bool,
}

impl MeshMetrics {
    pub fn bbox(&self) -> Aabb {
        Aabb::new(self.bbox_min, self.bbox_max)
    }

    pub fn extents(&self) -> Vector {
        self.bbox_max - self.bbox_min
    }

    pub(crate) fn require_watertight(&self, open_edges: usize) -> Result<()> {
        if self.watertight {
            Ok(())
        } else {
            Err(Error::NotWatertight { open_edges })
        }
    }
}

/// Indexed triangle mesh with outward-oriented faces.
#[derive(Debug)]
pub struct TriMesh {
    vertices: Vec<Point>,
    triangles: Vec<[u32; 3]>,
    metrics: OnceLock<(MeshMetrics, usize)>,
}

impl Clone for TriMesh {
    fn clone(&self) -> Self {
        Self::from_clean(self.vertices.clone(), self.triangles.clone())
    }
}

impl TriMesh {
    /// Builds a mesh from raw soup, welding vertices closer than
    /// [`DEFAULT_WELD_TOLERANCE`] and dropping degenerate triangles.
    pub fn new(vertices: Vec<Point>, triangles: Vec<[u32; 3]>) -> Result<Self> {
        Self::with_weld_tolerance(vertices, triangles, DEFAULT_WELD_TOLERANCE)
    }

    pub fn with_weld_tolerance(
        vertices: Vec<Point>,
        triangles: Vec<[u32; 3]>,
        tolerance: f64,
    ) -> Result<Self> {
        if let Some(bad) = triangles
            .iter()
            .flatten()
            .find(|&&i| i as usize >= vertices.len())
        {
            return Err(Error::Parse {
                path: Default::default(),
                message: format!("vertex index {bad} out of range ({})", vertices.len()),
            });
        }
        let (vertices, triangles) = weld(&vertices, &triangles, tolerance);
        let (vertices, triangles) = drop_degenerate(vertices, triangles);
        if triangles.is_empty() {
            return Err(Error::EmptyMesh);
        }
        Ok(Self::from_clean(vertices, triangles))
    }

    fn from_clean(vertices: Vec<Point>, triangles: Vec<[u32; 3]>) -> Self {
        Self {
            vertices,
            triangles,
            metrics: OnceLock::new(),
        }
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[u32; 3]] {
        &self.triangles
    }

    pub fn triangle(&self, i: usize) -> [Point; 3] {
        let [a, b, c] = self.triangles[i];
        [
            self.vertices[a as usize],
            self.vertices[b as usize],
            self.vertices[c as usize],
        ]
    }

    pub fn metrics(&self) -> &MeshMetrics {
        &self.metrics.get_or_init(|| compute_metrics(self)).0
    }

    /// Number of directed edges without an opposite twin.
    pub fn open_edge_count(&self) -> usize {
        self.metrics.get_or_init(|| compute_metrics(self)).1
    }

    pub fn require_watertight(&self) -> Result<()> {
        self.metrics().require_watertight(self.open_edge_count())
    }

    /// Scale-relative distance under which a point counts as on the surface.
    pub fn boundary_epsilon(&self) -> f64 {
        BOUNDARY_EPSILON_FRACTION * self.metrics().max_dimension
    }

    /// Content hash of the vertex and index buffers.
    pub fn fingerprint(&self) -> u64 {
        let mut h = Fnv64::default();
        h.u64(self.vertices.len() as u64);
        for v in &self.vertices {
            h.f64(v.x).f64(v.y).f64(v.z);
        }
        for t in &self.triangles {
            h.u64(u64::from(t[0])).u64(u64::from(t[1])).u64(u64::from(t[2]));
        }
        h.finish()
    }

    /// Returns a copy with every vertex mapped through `f`.
    pub fn map_vertices(&self, f: impl Fn(&Point) -> Point) -> TriMesh {
        Self::from_clean(
            self.vertices.iter().map(f).collect(),
            self.triangles.clone(),
        )
    }
}

/// Measures a mesh. Open meshes still get a volume; check `watertight`.
pub fn compute_metrics(mesh: &TriMesh) -> (MeshMetrics, usize) {
    let bbox = Aabb::from_points(&mesh.vertices);
    let e = bbox.extents();
    let mut area = 0.0;
    let mut six_volume = 0.0;
    for i in 0..mesh.triangles.len() {
        let [a, b, c] = mesh.triangle(i);
        area += 0.5 * (b - a).cross(&(c - a)).norm();
        six_volume += a.coords.dot(&b.coords.cross(&c.coords));
    }
    let open = open_edges(&mesh.triangles);
    let metrics = MeshMetrics {
        bbox_min: bbox.min,
        bbox_max: bbox.max,
        max_dimension: e.x.max(e.y).max(e.z),
        surface_area: area,
        volume: six_volume / 6.0,
        watertight: open == 0,
    };
    (metrics, open)
}

fn open_edges(triangles: &[[u32; 3]]) -> usize {
    let mut directed: HashMap<(u32, u32), i32> = HashMap::with_capacity(triangles.len() * 3);
    for t in triangles {
        for k in 0..3 {
            *directed.entry((t[k], t[(k + 1) % 3])).or_default() += 1;
        }
    }
    directed
        .iter()
        .filter(|(&(a, b), &n)| n != 1 || directed.get(&(b, a)).copied() != Some(1))
        .count()
}

fn weld(vertices: &[Point], triangles: &[[u32; 3]], tol: f64) -> (Vec<Point>, Vec<[u32; 3]>) {
    let cell = if tol > 0.0 { tol } else { f64::MIN_POSITIVE };
    let key = |p: &Point| -> [i64; 3] { std::array::from_fn(|i| (p[i] / cell).floor() as i64) };
    let mut grid: HashMap<[i64; 3], Vec<u32>> = HashMap::new();
    let mut reps: Vec<Point> = Vec::new();
    let mut remap = Vec::with_capacity(vertices.len());
    for p in vertices {
        let k = key(p);
        let mut found: Option<u32> = None;
        for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    let Some(ids) = grid.get(&[k[0] + dx, k[1] + dy, k[2] + dz]) else {
                        continue;
                    };
                    for &id in ids {
                        if (reps[id as usize] - p).norm() <= tol && found.is_none_or(|f| id < f) {
                            found = Some(id);
                        }
                    }
                }
            }
        }
        let id = found.unwrap_or_else(|| {
            let id = reps.len() as u32;
            reps.push(*p);
            grid.entry(k).or_default().push(id);
            id
        });
        remap.push(id);
    }
    let tris = triangles
        .iter()
        .map(|t| t.map(|i| remap[i as usize]))
        .collect();
    (reps, tris)
}

fn drop_degenerate(vertices: Vec<Point>, triangles: Vec<[u32; 3]>) -> (Vec<Point>, Vec<[u32; 3]>) {
    let bbox = Aabb::from_points(&vertices);
    let scale = bbox.extents().norm().max(f64::MIN_POSITIVE);
    let min_double_area = 1e-14 * scale * scale;
    let kept: Vec<[u32; 3]> = triangles
        .into_iter()
        .filter(|t| {
            if t[0] == t[1] || t[1] == t[2] || t[0] == t[2] {
                return false;
            }
            let [a, b, c] = t.map(|i| vertices[i as usize]);
            (b - a).cross(&(c - a)).norm() > min_double_area
        })
        .collect();

    // Compact to referenced vertices, preserving first-seen order.
    let mut new_index = vec![u32::MAX; vertices.len()];
    let mut compact = Vec::new();
    let tris = kept
        .iter()
        .map(|t| {
            t.map(|i| {
                let slot = &mut new_index[i as usize];
                if *slot == u32::MAX {
                    *slot = compact.len() as u32;
                    compact.push(vertices[i as usize]);
                }
                *slot
            })
        })
        .collect();
    (compact, tris)
}
