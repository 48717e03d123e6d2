//! Additive (powder-bed style) manufacturability indexes.
//!
//! The part is placed axis-aligned with its bottom face on the platform and
//! its bbox centered on the platform center.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{envelope_fit_ratio, Aabb};
use crate::indexes::{IndexId, LocalIndexField};
use crate::mesh::MeshMetrics;
use crate::profile::AdditiveProfile;
use crate::spatial::Octree;

/// `C(d)+`: exactly 1 when the part fits the build volume in no axis-aligned orientation.
pub fn c_d_add(metrics: &MeshMetrics, profile: &AdditiveProfile) -> f64 {
    envelope_fit_ratio(&metrics.extents(), &profile.envelope())
}

fn require_closed(metrics: &MeshMetrics) -> Result<()> {
    if metrics.watertight {
        Ok(())
    } else {
        Err(Error::NotWatertight { open_edges: 0 })
    }
}

/// `C(v)+`: part volume over build volume.
pub fn c_v(metrics: &MeshMetrics, profile: &AdditiveProfile) -> Result<f64> {
    require_closed(metrics)?;
    let e = profile.envelope();
    Ok((metrics.volume / (e.x * e.y * e.z)).clamp(0.0, 1.0))
}

/// `C(s)+`: skin area over the profile's reference area.
pub fn c_s(metrics: &MeshMetrics, profile: &AdditiveProfile) -> Result<f64> {
    require_closed(metrics)?;
    Ok((metrics.surface_area / profile.reference_area()).clamp(0.0, 1.0))
}

/// Which height of a leaf the height index measures.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HeightReference {
    #[default]
    Top,
    Centroid,
}

/// Height value of one region of a part whose bottom is at `part_bottom_z`.
pub fn height_value(
    region: &Aabb,
    part_bottom_z: f64,
    profile: &AdditiveProfile,
    reference: HeightReference,
) -> f64 {
    let z = match reference {
        HeightReference::Top => region.max.z,
        HeightReference::Centroid => region.center().z,
    };
    ((z - part_bottom_z) / profile.build_z_mm).clamp(0.0, 1.0)
}

/// Platform-distance value of a point given in platform coordinates.
pub fn platform_distance_value(platform_xy: [f64; 2], profile: &AdditiveProfile) -> f64 {
    let [px, py] = profile.platform_center();
    let half_diag = 0.5 * profile.build_x_mm.hypot(profile.build_y_mm);
    ((platform_xy[0] - px).hypot(platform_xy[1] - py) / half_diag).clamp(0.0, 1.0)
}

/// `C(h)+`: leaf height above the part bottom over the build height.
pub fn c_h(
    octree: &Octree,
    profile: &AdditiveProfile,
    reference: HeightReference,
) -> Result<LocalIndexField> {
    let bottom = octree.part_bbox.min.z;
    let leaves = octree.grey_leaves();
    let values = leaves
        .iter()
        .map(|l| height_value(&l.bounds, bottom, profile, reference))
        .collect();
    let volumes = leaves.iter().map(|l| l.part_volume).collect();
    LocalIndexField::new(IndexId::Height, values, volumes)
}

/// `C(rho)+`: horizontal distance of the leaf centroid from the platform
/// center over the platform half-diagonal.
pub fn c_rho(octree: &Octree, profile: &AdditiveProfile) -> Result<LocalIndexField> {
    let part_center = octree.part_bbox.center();
    let leaves = octree.grey_leaves();
    let values = leaves
        .iter()
        .map(|l| {
            let c = l.centroid();
            let [px, py] = profile.platform_center();
            platform_distance_value([c.x - part_center.x + px, c.y - part_center.y + py], profile)
        })
        .collect();
    let volumes = leaves.iter().map(|l| l.part_volume).collect();
    LocalIndexField::new(IndexId::PlatformDistance, values, volumes)
}
