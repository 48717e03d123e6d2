//! Color a pocketed block by tool flexibility and write PLY and VTK maps.
//!
//!     cargo run --example difficulty_maps -- out_dir 0:1

use std::path::PathBuf;

use dfm_index::fixtures;
use dfm_index::machining::c_f;
use dfm_index::mesh::MeshQuery;
use dfm_index::profile::reference_mill;
use dfm_index::reporting::{export_difficulty_map, vertex_values, ColorScale, MapFormat};
use dfm_index::spatial::{build_octree, OctreeConfig};

fn main() -> dfm_index::Result<()> {
    let mut args = std::env::args().skip(1);
    let out = PathBuf::from(args.next().unwrap_or_else(|| "maps_out".into()));
    let scale: ColorScale = match args.next() {
        Some(s) => s.parse().map_err(dfm_index::Error::Profile)?,
        None => ColorScale::Auto,
    };
    std::fs::create_dir_all(&out)?;

    let mesh = fixtures::pocket_block(64.0, 60.0, 12.0, 12.0, 45.0);
    let query = MeshQuery::new(&mesh)?;
    let tree = build_octree(&query, OctreeConfig::with_depth(5))?;
    let field = c_f(&query, &tree, &reference_mill())?;

    let per_vertex = vertex_values(&mesh, &tree, &field)?;
    let hot = per_vertex.iter().filter(|v| **v > 0.5).count();
    println!("{hot} of {} vertices above 0.5", per_vertex.len());

    for fmt in [MapFormat::Ply, MapFormat::Vtk] {
        let path = out.join(format!("pocket_cf_map.{}", fmt.extension()));
        export_difficulty_map(&mesh, &tree, &field, scale, &path, fmt)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}
