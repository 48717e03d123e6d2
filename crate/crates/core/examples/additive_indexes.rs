//! Additive indexes of a die against a 250 mm cube build chamber.

use dfm_index::additive::{c_d_add, c_h, c_rho, c_s, c_v, HeightReference};
use dfm_index::fixtures::{self, DieLayout};
use dfm_index::geometry::Aabb;
use dfm_index::mesh::MeshQuery;
use dfm_index::profile::AdditiveProfile;
use dfm_index::spatial::{build_octree, OctreeConfig};

fn main() -> dfm_index::Result<()> {
    let chamber = AdditiveProfile::cube(250.0);

    // A full-size die does not fit; the dimensional index saturates.
    let big = fixtures::box_mesh(&Aabb::from_coords([0.0; 3], [630.0, 182.0, 100.0]));
    println!("630x182x100 die: C(d)+ = {}", c_d_add(big.metrics(), &chamber));

    let die = fixtures::die(&DieLayout::default());
    let m = die.metrics();
    let query = MeshQuery::new(&die)?;
    let tree = build_octree(&query, OctreeConfig::with_depth(5))?;
    let h = c_h(&tree, &chamber, HeightReference::Top)?;
    let rho = c_rho(&tree, &chamber)?;
    println!("desk die:");
    println!("  C(d)+     {:.4}", c_d_add(m, &chamber));
    println!("  C(v)+     {:.4}", c_v(m, &chamber)?);
    println!("  C(s)+     {:.4}", c_s(m, &chamber)?);
    println!("  C(h)max+  {:.4}  mean {:.4}", h.max()?, h.mean()?);
    println!("  C(rho)max+ {:.4}  mean {:.4}", rho.max()?, rho.mean()?);
    Ok(())
}
