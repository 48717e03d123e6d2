//! Machining indexes of pocketed blocks: deeper and narrower pockets need
//! longer, thinner tools, which raises the tool-flexibility index.

use dfm_index::fixtures;
use dfm_index::machining::{c_c, c_d_sub, c_f, c_m, c_r};
use dfm_index::mesh::MeshQuery;
use dfm_index::profile::reference_mill;
use dfm_index::spatial::{build_octree, OctreeConfig};

fn main() -> dfm_index::Result<()> {
    let mill = reference_mill();
    println!("C(m)- tool steel: {:.3}", c_m("tool_steel_x40", &mill)?);
    println!("C(r)- Ra 1.6 um:  {:.3}", c_r(1.6, &mill)?);
    println!();
    println!("{:>6} {:>6} {:>7} {:>7} {:>7} {:>9}", "width", "depth", "C(d)-", "C(c)-", "C(f)max", "C(f)floor");
    for (width, depth) in [(20.0, 10.0), (20.0, 40.0), (10.0, 40.0), (6.0, 40.0)] {
        let mesh = fixtures::pocket_block(64.0, 60.0, width, width, depth);
        let query = MeshQuery::new(&mesh)?;
        let tree = build_octree(&query, OctreeConfig::with_depth(5))?;
        let field = c_f(&query, &tree, &mill)?;
        // Grey leaves cut by the floor plane under the pocket center.
        let floor_z = 60.0 - depth;
        let at_floor = tree
            .grey_leaves()
            .iter()
            .zip(&field.values)
            .filter(|(l, _)| {
                let b = &l.bounds;
                b.min.x <= 32.0 && 32.0 <= b.max.x && b.min.y <= 32.0 && 32.0 <= b.max.y
                    && b.min.z <= floor_z && floor_z <= b.max.z
            })
            .map(|(_, v)| *v)
            .reduce(f64::max);
        let m = mesh.metrics();
        println!(
            "{width:6.1} {depth:6.1} {:7.4} {:7.4} {:7.4} {:>9}",
            c_d_sub(m, &mill),
            c_c(m)?,
            field.max()?,
            at_floor.map_or("-".into(), |v| format!("{v:.4}"))
        );
    }
    Ok(())
}
