//! Adaptive octree decomposition and per-octant part volume estimation.
//!
//! Octants are classified Black (inside the part), White (outside) or Grey
//! (the surface passes through the octant interior). Only Grey octants are
//! subdivided. Terminal Grey leaves carry a sampled estimate of the part
//! volume they contain; children are always visited in Morton order so the
//! leaf sequence and every value are independent of thread scheduling.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Aabb, Point, Vector};
use crate::hash::Fnv64;
use crate::mesh::{Containment, MeshQuery};

pub const MAX_DEPTH_LIMIT: u32 = 10;
pub const DEFAULT_MAX_DEPTH: u32 = 5;
pub const DEFAULT_SAMPLES: u32 = 4;
pub const DEFAULT_MARGIN: f64 = 0.01;
pub const DEFAULT_VOLUME_SEED: u64 = 0x766f_6c75_6d65;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OctantClass {
    Black,
    White,
    Grey,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OctreeConfig {
    pub max_depth: u32,
    /// Fractional inflation of the cubified bbox.
    pub margin: f64,
    /// Jittered-grid resolution per axis for grey leaf volumes.
    pub samples: u32,
    pub seed: u64,
}

impl Default for OctreeConfig {
    fn default() -> Self {
        Self {
            max_depth: DEFAULT_MAX_DEPTH,
            margin: DEFAULT_MARGIN,
            samples: DEFAULT_SAMPLES,
            seed: DEFAULT_VOLUME_SEED,
        }
    }
}

impl OctreeConfig {
    pub fn with_depth(max_depth: u32) -> Self {
        Self {
            max_depth,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if !(1..=MAX_DEPTH_LIMIT).contains(&self.max_depth) {
            return Err(Error::DepthOutOfRange(self.max_depth));
        }
        if self.samples < 2 {
            return Err(Error::SamplingOutOfRange(self.samples));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OctantNode {
    pub bounds: Aabb,
    pub depth: u32,
    /// Child-index path from the root, three bits per level.
    pub code: u64,
    pub class: OctantClass,
    /// Part volume inside the octant (mm³); sum of children for inner nodes.
    pub part_volume: f64,
    pub children: Vec<OctantNode>,
}

impl OctantNode {
    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    pub fn centroid(&self) -> Point {
        self.bounds.center()
    }

    fn visit_leaves<'a>(&'a self, out: &mut Vec<&'a OctantNode>) {
        if self.is_leaf() {
            out.push(self);
        } else {
            for c in &self.children {
                c.visit_leaves(out);
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OctreeFingerprint {
    pub depth: u32,
    pub leaf_count: usize,
    pub grey_leaf_count: usize,
    /// FNV-1a over every leaf's code, class and part volume bits, hex encoded.
    pub content_hash: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Octree {
    pub root: OctantNode,
    pub config: OctreeConfig,
    /// Bounding box of the decomposed part.
    pub part_bbox: Aabb,
    mesh_fingerprint: u64,
}

/// Grey when some triangle passes through the open box interior; otherwise
/// the box center decides. Faces that merely touch the box do not make it grey.
pub fn classify_box(query: &MeshQuery<'_>, bx: &Aabb) -> OctantClass {
    if query.crosses_box(bx) {
        return OctantClass::Grey;
    }
    // The center can only sit on the surface for degenerate boxes; probe a
    // few interior points before giving up.
    let c = bx.center();
    let h = bx.half_extents();
    let probes = [
        Vector::zeros(),
        Vector::new(0.5, 0.25, 0.125),
        Vector::new(-0.25, 0.5, -0.375),
    ];
    for off in probes {
        match query.contains(&(c + h.component_mul(&off))) {
            Containment::Inside => return OctantClass::Black,
            Containment::Outside => return OctantClass::White,
            Containment::OnBoundary => {}
        }
    }
    OctantClass::White
}

/// Part volume inside `bx`: exact for Black/White boxes, otherwise an
/// `n x n x n` jittered-grid estimate seeded by `seed`.
pub fn estimate_part_volume(query: &MeshQuery<'_>, bx: &Aabb, n: u32, seed: u64) -> Result<f64> {
    if n < 2 {
        return Err(Error::SamplingOutOfRange(n));
    }
    Ok(match classify_box(query, bx) {
        OctantClass::Black => bx.volume(),
        OctantClass::White => 0.0,
        OctantClass::Grey => sample_volume(query, bx, n, seed),
    })
}

fn sample_volume(query: &MeshQuery<'_>, bx: &Aabb, n: u32, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let e = bx.extents();
    let step = 1.0 / f64::from(n);
    let mut inside = 0.0;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let f = Vector::new(
                    (f64::from(i) + rng.gen::<f64>()) * step,
                    (f64::from(j) + rng.gen::<f64>()) * step,
                    (f64::from(k) + rng.gen::<f64>()) * step,
                );
                inside += match query.contains(&(bx.min + e.component_mul(&f))) {
                    Containment::Inside => 1.0,
                    Containment::OnBoundary => 0.5,
                    Containment::Outside => 0.0,
                };
            }
        }
    }
    inside / f64::from(n).powi(3) * bx.volume()
}

fn leaf_seed(base: u64, depth: u32, code: u64) -> u64 {
    Fnv64::default()
        .u64(base)
        .u64(u64::from(depth))
        .u64(code)
        .finish()
}

/// Cubified root box: centered on the bbox, edge = largest extent x (1 + 2·margin).
pub fn root_box(bbox: &Aabb, margin: f64) -> Aabb {
    let half = 0.5 * bbox.extents().max() * (1.0 + 2.0 * margin);
    let c = bbox.center();
    Aabb::new(c - Vector::repeat(half), c + Vector::repeat(half))
}

fn grow(query: &MeshQuery<'_>, cfg: &OctreeConfig, bounds: Aabb, depth: u32, code: u64) -> OctantNode {
    let class = classify_box(query, &bounds);
    let mut node = OctantNode {
        bounds,
        depth,
        code,
        class,
        part_volume: 0.0,
        children: Vec::new(),
    };
    match class {
        OctantClass::Black => node.part_volume = bounds.volume(),
        OctantClass::White => {}
        OctantClass::Grey if depth < cfg.max_depth => subdivide(query, cfg, &mut node),
        OctantClass::Grey => {
            node.part_volume =
                sample_volume(query, &bounds, cfg.samples, leaf_seed(cfg.seed, depth, code));
        }
    }
    node
}

fn subdivide(query: &MeshQuery<'_>, cfg: &OctreeConfig, node: &mut OctantNode) {
    node.children = (0..8usize)
        .into_par_iter()
        .map(|i| {
            grow(
                query,
                cfg,
                node.bounds.octant(i),
                node.depth + 1,
                (node.code << 3) | i as u64,
            )
        })
        .collect();
    node.part_volume = node.children.iter().map(|c| c.part_volume).sum();
}

/// Builds the octree of a watertight mesh.
pub fn build_octree(query: &MeshQuery<'_>, config: OctreeConfig) -> Result<Octree> {
    config.validate()?;
    let mesh = query.mesh();
    let root = root_box(&mesh.metrics().bbox(), config.margin);
    Ok(Octree {
        root: grow(query, &config, root, 0, 0),
        config,
        part_bbox: mesh.metrics().bbox(),
        mesh_fingerprint: mesh.fingerprint(),
    })
}

/// Splits every terminal Grey leaf once more. Equivalent to rebuilding at
/// `max_depth + 1`.
pub fn refine(octree: &Octree, query: &MeshQuery<'_>) -> Result<Octree> {
    if query.mesh().fingerprint() != octree.mesh_fingerprint {
        return Err(Error::MeshMismatch);
    }
    let config = OctreeConfig {
        max_depth: octree.config.max_depth + 1,
        ..octree.config
    };
    config.validate()?;
    Ok(Octree {
        root: refine_node(&octree.root, query, &config),
        config,
        part_bbox: octree.part_bbox,
        mesh_fingerprint: octree.mesh_fingerprint,
    })
}

fn refine_node(node: &OctantNode, query: &MeshQuery<'_>, cfg: &OctreeConfig) -> OctantNode {
    if node.is_leaf() {
        if node.class == OctantClass::Grey && node.depth + 1 == cfg.max_depth {
            let mut n = OctantNode {
                children: Vec::new(),
                ..node.clone()
            };
            subdivide(query, cfg, &mut n);
            return n;
        }
        return node.clone();
    }
    let children: Vec<OctantNode> = node
        .children
        .par_iter()
        .map(|c| refine_node(c, query, cfg))
        .collect();
    OctantNode {
        part_volume: children.iter().map(|c| c.part_volume).sum(),
        children,
        ..node.clone()
    }
}

impl Octree {
    pub fn max_depth(&self) -> u32 {
        self.config.max_depth
    }

    /// All leaves in Morton order.
    pub fn leaves(&self) -> Vec<&OctantNode> {
        let mut out = Vec::new();
        self.root.visit_leaves(&mut out);
        out
    }

    /// Grey leaves in Morton order; local index fields align with this list.
    pub fn grey_leaves(&self) -> Vec<&OctantNode> {
        self.leaves()
            .into_iter()
            .filter(|l| l.class == OctantClass::Grey)
            .collect()
    }

    pub fn total_part_volume(&self) -> f64 {
        self.leaves().iter().map(|l| l.part_volume).sum()
    }

    pub fn mesh_fingerprint(&self) -> u64 {
        self.mesh_fingerprint
    }

    pub fn fingerprint(&self) -> OctreeFingerprint {
        let leaves = self.leaves();
        let mut h = Fnv64::default();
        for l in &leaves {
            h.u64(u64::from(l.depth)).u64(l.code).u64(l.class as u64).f64(l.part_volume);
        }
        OctreeFingerprint {
            depth: self.config.max_depth,
            leaf_count: leaves.len(),
            grey_leaf_count: leaves.iter().filter(|l| l.class == OctantClass::Grey).count(),
            content_hash: format!("{:016x}", h.finish()),
        }
    }

    /// Leaf whose closed box contains `p`; points on a shared face go to the
    /// upper child. `None` outside the root.
    pub fn locate(&self, p: &Point) -> Option<&OctantNode> {
        if !self.root.bounds.contains(p) {
            return None;
        }
        let mut node = &self.root;
        while !node.is_leaf() {
            let mid = node.bounds.center();
            let idx = (0..3).fold(0, |acc, a| acc | (usize::from(p[a] >= mid[a]) << a));
            node = &node.children[idx];
        }
        Some(node)
    }

    /// Writes one JSON object per leaf: depth, bounds, class, part volume.
    pub fn write_leaves_jsonl(&self, mut w: impl Write) -> Result<()> {
        #[derive(Serialize)]
        struct Line<'a> {
            depth: u32,
            min: [f64; 3],
            max: [f64; 3],
            class: &'a OctantClass,
            part_volume: f64,
        }
        for l in self.leaves() {
            let line = Line {
                depth: l.depth,
                min: l.bounds.min.coords.into(),
                max: l.bounds.max.coords.into(),
                class: &l.class,
                part_volume: l.part_volume,
            };
            serde_json::to_writer(&mut w, &line)?;
            w.write_all(b"\n")?;
        }
        Ok(())
    }
}
