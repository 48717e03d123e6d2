//! Difficulty maps: mesh vertices colored by a local field (PLY), or the
//! octree's black and grey leaves as hexahedra with a cell scalar (VTK).

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::indexes::LocalIndexField;
use crate::mesh::TriMesh;
use crate::spatial::{OctantClass, OctantNode, Octree};

use super::color::{ramp_color, ramp_position, ColorScale};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapFormat {
    Ply,
    Vtk,
}

impl MapFormat {
    pub fn extension(self) -> &'static str {
        match self {
            MapFormat::Ply => "ply",
            MapFormat::Vtk => "vtk",
        }
    }
}

fn check_alignment<'a>(octree: &'a Octree, field: &LocalIndexField) -> Result<Vec<&'a OctantNode>> {
    let grey = octree.grey_leaves();
    if grey.len() != field.len() {
        return Err(Error::FieldMismatch {
            field: field.len(),
            leaves: grey.len(),
        });
    }
    Ok(grey)
}

/// Field value at each mesh vertex: the value of the grey leaf containing it,
/// or of the nearest grey leaf when the containing leaf is not grey.
pub fn vertex_values(mesh: &TriMesh, octree: &Octree, field: &LocalIndexField) -> Result<Vec<f64>> {
    let grey = check_alignment(octree, field)?;
    let slot: HashMap<(u32, u64), usize> = grey
        .iter()
        .enumerate()
        .map(|(i, l)| ((l.depth, l.code), i))
        .collect();
    let nearest = |p: &Point| -> Option<usize> {
        grey.iter()
            .enumerate()
            .map(|(i, l)| (l.bounds.distance_to(p), i))
            .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
            .map(|(_, i)| i)
    };
    Ok(mesh
        .vertices()
        .iter()
        .map(|p| {
            let idx = octree
                .locate(p)
                .filter(|l| l.class == OctantClass::Grey)
                .and_then(|l| slot.get(&(l.depth, l.code)).copied())
                .or_else(|| nearest(p));
            idx.map_or(0.0, |i| field.values[i])
        })
        .collect())
}

/// ASCII PLY of the mesh with per-vertex `uchar` colors.
pub fn render_ply(
    mesh: &TriMesh,
    octree: &Octree,
    field: &LocalIndexField,
    scale: ColorScale,
) -> Result<String> {
    let values = vertex_values(mesh, octree, field)?;
    let range = scale.range(&field.values);
    let mut out = String::new();
    out.push_str("ply\nformat ascii 1.0\n");
    let _ = writeln!(out, "comment index {}", field.id);
    let _ = writeln!(out, "comment scale {} {}", range.0, range.1);
    let _ = writeln!(out, "element vertex {}", mesh.vertices().len());
    out.push_str("property double x\nproperty double y\nproperty double z\n");
    out.push_str("property uchar red\nproperty uchar green\nproperty uchar blue\n");
    let _ = writeln!(out, "element face {}", mesh.triangles().len());
    out.push_str("property list uchar int vertex_indices\nend_header\n");
    for (p, v) in mesh.vertices().iter().zip(&values) {
        let [r, g, b] = ramp_color(ramp_position(*v, range));
        let _ = writeln!(out, "{} {} {} {r} {g} {b}", p.x, p.y, p.z);
    }
    for t in mesh.triangles() {
        let _ = writeln!(out, "3 {} {} {}", t[0], t[1], t[2]);
    }
    Ok(out)
}

/// Legacy ASCII VTK unstructured grid: one hexahedron per black or grey
/// leaf. Black leaves carry the lowest value of the scale.
pub fn render_vtk(octree: &Octree, field: &LocalIndexField, scale: ColorScale) -> Result<String> {
    let grey = check_alignment(octree, field)?;
    let slot: HashMap<(u32, u64), usize> = grey
        .iter()
        .enumerate()
        .map(|(i, l)| ((l.depth, l.code), i))
        .collect();
    let (lo, _) = scale.range(&field.values);
    let cells: Vec<(&OctantNode, f64)> = octree
        .leaves()
        .into_iter()
        .filter_map(|l| match l.class {
            OctantClass::Grey => Some((l, field.values[slot[&(l.depth, l.code)]])),
            OctantClass::Black => Some((l, lo)),
            OctantClass::White => None,
        })
        .collect();

    let mut out = String::new();
    out.push_str("# vtk DataFile Version 3.0\n");
    let _ = writeln!(out, "difficulty map {}", field.id);
    out.push_str("ASCII\nDATASET UNSTRUCTURED_GRID\n");
    let _ = writeln!(out, "POINTS {} double", cells.len() * 8);
    for (leaf, _) in &cells {
        let (a, b) = (leaf.bounds.min, leaf.bounds.max);
        // VTK_HEXAHEDRON ordering: bottom face counter-clockwise, then top.
        for (x, y, z) in [
            (a.x, a.y, a.z),
            (b.x, a.y, a.z),
            (b.x, b.y, a.z),
            (a.x, b.y, a.z),
            (a.x, a.y, b.z),
            (b.x, a.y, b.z),
            (b.x, b.y, b.z),
            (a.x, b.y, b.z),
        ] {
            let _ = writeln!(out, "{x} {y} {z}");
        }
    }
    let _ = writeln!(out, "CELLS {} {}", cells.len(), cells.len() * 9);
    for i in 0..cells.len() {
        let base = 8 * i;
        let ids: Vec<String> = (base..base + 8).map(|k| k.to_string()).collect();
        let _ = writeln!(out, "8 {}", ids.join(" "));
    }
    let _ = writeln!(out, "CELL_TYPES {}", cells.len());
    for _ in &cells {
        out.push_str("12\n");
    }
    let _ = writeln!(out, "CELL_DATA {}", cells.len());
    let _ = writeln!(out, "SCALARS {} double 1", field.id.stem());
    out.push_str("LOOKUP_TABLE default\n");
    for (_, v) in &cells {
        let _ = writeln!(out, "{v}");
    }
    Ok(out)
}

pub fn render_map(
    mesh: &TriMesh,
    octree: &Octree,
    field: &LocalIndexField,
    scale: ColorScale,
    format: MapFormat,
) -> Result<String> {
    match format {
        MapFormat::Ply => render_ply(mesh, octree, field, scale),
        MapFormat::Vtk => render_vtk(octree, field, scale),
    }
}

/// Writes a difficulty map atomically.
pub fn export_difficulty_map(
    mesh: &TriMesh,
    octree: &Octree,
    field: &LocalIndexField,
    scale: ColorScale,
    path: impl AsRef<std::path::Path>,
    format: MapFormat,
) -> Result<()> {
    let text = render_map(mesh, octree, field, scale, format)?;
    super::write_atomic(path.as_ref(), text.as_bytes())
}
