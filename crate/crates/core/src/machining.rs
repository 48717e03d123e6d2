//! Subtractive (3-axis milling) manufacturability indexes.
//!
//! Globals: part size vs. work volume, chip volume, material hardness and
//! required roughness. Local: cutting-tool flexibility per grey octant,
//! with the spindle pointing down along -Z and tools entering from +Z.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{envelope_fit_ratio, Aabb, Point, Vector};
use crate::indexes::{IndexId, LocalIndexField};
use crate::mesh::{MeshMetrics, MeshQuery};
use crate::profile::SubtractiveProfile;
use crate::spatial::Octree;

/// `C(d)-`: 1 when the part fits the work volume in no axis-aligned orientation.
pub fn c_d_sub(metrics: &MeshMetrics, profile: &SubtractiveProfile) -> f64 {
    envelope_fit_ratio(&metrics.extents(), &profile.envelope())
}

/// `C(c)-`: fraction of the bbox stock turned into chips.
pub fn c_c(metrics: &MeshMetrics) -> Result<f64> {
    if !metrics.watertight {
        return Err(Error::NotWatertight { open_edges: 0 });
    }
    let stock = metrics.bbox().volume();
    if stock <= 0.0 {
        return Ok(0.0);
    }
    Ok(((stock - metrics.volume) / stock).clamp(0.0, 1.0))
}

/// `C(m)-`: Brinell hardness over the profile's machinability ceiling.
pub fn c_m(material: &str, profile: &SubtractiveProfile) -> Result<f64> {
    let hb = profile
        .hardness_hb
        .get(material)
        .ok_or_else(|| Error::UnknownMaterial(material.to_string()))?;
    Ok((hb / profile.hb_max).clamp(0.0, 1.0))
}

/// `C(r)-`: 0 at or above the no-effort roughness, 1 at or below the best
/// achievable one, log-linear in between.
pub fn c_r(required_ra: f64, profile: &SubtractiveProfile) -> Result<f64> {
    if !(required_ra > 0.0) {
        return Err(Error::NonPositiveRoughness(required_ra));
    }
    let (best, coarse) = (profile.ra_best_um, profile.ra_coarse_um);
    if required_ra >= coarse {
        return Ok(0.0);
    }
    if required_ra <= best {
        return Ok(1.0);
    }
    Ok(((coarse / required_ra).ln() / (coarse / best).ln()).clamp(0.0, 1.0))
}

const PROBE_DIRECTIONS: usize = 8;
const FOOTPRINT_SAMPLES: usize = 5;
const OFFSET_STEPS: usize = 4;

/// Tool access from +Z for regions of one part.
///
/// For a region, the tool reach `L` is the drop from the part's top plane to
/// the region's top face. The region's footprint is sampled on a grid; a
/// sample is open when the vertical corridor above the region is free of
/// material there. A tool of radius `r` is accepted when every open sample
/// lies within the residual tolerance `delta` (the grid spacing) of some
/// free disk of radius `r`; disk centers are searched along eight directions
/// out to `r + delta`. Disk freedom is probed at the center and eight
/// rim points. Internal corners leave an uncut residue of `r (sqrt 2 - 1)`,
/// so sharp corners only accept small tools. A region with no open sample
/// is unreachable.
#[derive(Debug)]
pub struct ToolAccess<'q, 'm> {
    query: &'q MeshQuery<'m>,
    part: Aabb,
    eps: f64,
}

impl<'q, 'm> ToolAccess<'q, 'm> {
    pub fn new(query: &'q MeshQuery<'m>) -> Self {
        let metrics = query.mesh().metrics();
        Self {
            query,
            part: metrics.bbox(),
            eps: 1e-6 * metrics.max_dimension.max(f64::MIN_POSITIVE),
        }
    }

    /// Tool reach needed for a region whose top face is at `top_z`.
    pub fn reach(&self, top_z: f64) -> f64 {
        (self.part.max.z - top_z).max(0.0)
    }

    /// Largest profile diameter that can reach `region`, `None` if none can.
    pub fn accessible_diameter(&self, region: &Aabb, profile: &SubtractiveProfile) -> Option<f64> {
        profile
            .tool_diameters_mm
            .iter()
            .rev()
            .copied()
            .find(|&d| self.tool_fits(region, 0.5 * d))
    }

    fn tool_fits(&self, region: &Aabb, r: f64) -> bool {
        let z0 = region.max.z + self.eps;
        let z1 = self.part.max.z + self.eps;
        if z0 >= z1 {
            return true;
        }
        let n = FOOTPRINT_SAMPLES;
        let (ex, ey) = (region.max.x - region.min.x, region.max.y - region.min.y);
        let delta = ex.min(ey) / (n - 1) as f64;
        let mut any_open = false;
        for i in 0..n {
            for j in 0..n {
                let p = Point::new(
                    region.min.x + ex * i as f64 / (n - 1) as f64,
                    region.min.y + ey * j as f64 / (n - 1) as f64,
                    0.0,
                );
                if !self.column_free(p.x, p.y, z0, z1) {
                    continue;
                }
                any_open = true;
                let reached = self.disk_free(&p, r, z0, z1)
                    || (1..=OFFSET_STEPS).any(|s| {
                        let t = (r + delta) * s as f64 / OFFSET_STEPS as f64;
                        (0..PROBE_DIRECTIONS)
                            .any(|k| self.disk_free(&(p + direction(k) * t), r, z0, z1))
                    });
                if !reached {
                    return false;
                }
            }
        }
        any_open
    }

    fn column_free(&self, x: f64, y: f64, z0: f64, z1: f64) -> bool {
        !self
            .query
            .segment_blocked(&Point::new(x, y, z0), &Point::new(x, y, z1))
    }

    fn disk_free(&self, center: &Point, r: f64, z0: f64, z1: f64) -> bool {
        // Rim probes sit just inside the disk so tangent walls do not block.
        let rim = (r - self.eps).max(0.0);
        self.column_free(center.x, center.y, z0, z1)
            && (0..PROBE_DIRECTIONS).all(|k| {
                let u = direction(k);
                self.column_free(center.x + rim * u.x, center.y + rim * u.y, z0, z1)
            })
    }

    /// Flexibility value of one region: `clamp((L / D) / R_max, 0, 1)`,
    /// 1 when no tool reaches it, 0 on the part's stock datum (bottom) plane
    /// and on the top plane.
    pub fn flexibility(&self, region: &Aabb, profile: &SubtractiveProfile) -> f64 {
        if region.min.z <= self.part.min.z + self.eps {
            return 0.0;
        }
        let reach = self.reach(region.max.z);
        if reach <= 0.0 {
            return 0.0;
        }
        match self.accessible_diameter(region, profile) {
            Some(d) => (reach / d / profile.slenderness_limit).clamp(0.0, 1.0),
            None => 1.0,
        }
    }
}

fn direction(k: usize) -> Vector {
    let a = std::f64::consts::TAU * k as f64 / PROBE_DIRECTIONS as f64;
    let (s, c) = a.sin_cos();
    // Snap so axis directions are exact.
    let snap = |v: f64| if v.abs() < 1e-12 { 0.0 } else { v };
    Vector::new(snap(c), snap(s), 0.0)
}

/// `C(f)-` over every grey leaf of `octree`.
pub fn c_f(
    query: &MeshQuery<'_>,
    octree: &Octree,
    profile: &SubtractiveProfile,
) -> Result<LocalIndexField> {
    if query.mesh().fingerprint() != octree.mesh_fingerprint() {
        return Err(Error::MeshMismatch);
    }
    let access = ToolAccess::new(query);
    let leaves = octree.grey_leaves();
    let values: Vec<f64> = leaves
        .par_iter()
        .map(|l| access.flexibility(&l.bounds, profile))
        .collect();
    let volumes = leaves.iter().map(|l| l.part_volume).collect();
    LocalIndexField::new(IndexId::Flexibility, values, volumes)
}
