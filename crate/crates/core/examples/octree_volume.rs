//! Octree decomposition of a sphere; the leaf volumes converge on 4/3 pi r^3.

use std::time::Instant;

use dfm_index::fixtures;
use dfm_index::mesh::MeshQuery;
use dfm_index::spatial::{build_octree, refine, OctreeConfig};

fn main() -> dfm_index::Result<()> {
    let r = 10.0;
    let mesh = fixtures::icosphere(r, 4);
    let query = MeshQuery::new(&mesh)?;
    let exact = 4.0 / 3.0 * std::f64::consts::PI * r.powi(3);
    println!("mesh volume {:.2}, sphere {:.2}", mesh.metrics().volume, exact);

    let t = Instant::now();
    let mut tree = build_octree(&query, OctreeConfig::with_depth(3))?;
    loop {
        let fp = tree.fingerprint();
        let v = tree.total_part_volume();
        println!(
            "depth {}  leaves {:6}  grey {:6}  volume {:9.2}  error {:+.3}%  hash {}",
            fp.depth,
            fp.leaf_count,
            fp.grey_leaf_count,
            v,
            (v - exact) / exact * 100.0,
            fp.content_hash
        );
        if tree.max_depth() >= 6 {
            break;
        }
        tree = refine(&tree, &query)?;
    }
    println!("elapsed {:.2?}", t.elapsed());
    Ok(())
}
