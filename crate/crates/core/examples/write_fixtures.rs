//! Write the built-in test parts as STL files, ready for the `dfm` binary.
//!
//!     cargo run --example write_fixtures -- fixtures/
//!     dfm analyze fixtures/pocket.stl --profile crates/core/examples/data/desk_mill.toml --out out/

use std::path::PathBuf;

use dfm_index::fixtures::{self, DieLayout};

fn main() -> std::io::Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "fixtures".into()));
    std::fs::create_dir_all(&dir)?;
    let (left, right) = fixtures::l_prism_split(20.0, 30.0);
    let parts = [
        ("cube", fixtures::cube(40.0)),
        ("sphere", fixtures::icosphere(10.0, 4)),
        ("torus", fixtures::torus(20.0, 6.0, 48, 24)),
        ("pocket", fixtures::pocket_block(64.0, 60.0, 12.0, 12.0, 40.0)),
        ("undercut", fixtures::undercut_part()),
        ("die", fixtures::die(&DieLayout::default())),
        ("l_prism", fixtures::l_prism(20.0, 30.0)),
        ("l_prism_a", left),
        ("l_prism_b", right),
    ];
    for (name, mesh) in parts {
        let path = dir.join(format!("{name}.stl"));
        fixtures::write_stl(&mesh, &path)?;
        println!("{} ({} triangles)", path.display(), mesh.triangles().len());
    }
    Ok(())
}
