//! Load a mesh (or use a built-in fixture) and print its metrics.
//!
//!     cargo run --example mesh_metrics -- path/to/part.stl

use dfm_index::fixtures;
use dfm_index::mesh::load_mesh;

fn main() -> dfm_index::Result<()> {
    let mesh = match std::env::args().nth(1) {
        Some(path) => load_mesh(&path, None)?,
        None => fixtures::torus(20.0, 6.0, 48, 24),
    };
    let m = mesh.metrics();
    println!("vertices      {}", mesh.vertices().len());
    println!("triangles     {}", mesh.triangles().len());
    println!("bbox          {:?} .. {:?}", m.bbox_min.coords.as_slice(), m.bbox_max.coords.as_slice());
    println!("max dimension {:.3} mm", m.max_dimension);
    println!("surface area  {:.3} mm2", m.surface_area);
    println!("volume        {:.3} mm3", m.volume);
    println!("watertight    {} ({} open edges)", m.watertight, mesh.open_edge_count());
    Ok(())
}
