//! Full two-process analysis of a pocketed die. Pocket corners are the
//! hardest zones to mill but are unremarkable for the additive process.
//!
//!     cargo run --release --example die_scenario -- out_dir

use std::path::PathBuf;

use dfm_index::analysis::{analyze_part, AnalysisOptions};
use dfm_index::fixtures::{self, DieLayout};
use dfm_index::geometry::Aabb;
use dfm_index::indexes::{IndexId, Process};
use dfm_index::profile::{reference_mill, AdditiveProfile, ProfileSet};
use dfm_index::reporting::{export_difficulty_map, ColorScale, MapFormat};

fn main() -> dfm_index::Result<()> {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "die_out".into()));
    std::fs::create_dir_all(&out)?;
    let layout = DieLayout::default();
    let die = fixtures::die(&layout);
    let profiles = ProfileSet {
        machining: Some(reference_mill()),
        additive: Some(AdditiveProfile::cube(250.0)),
        ..ProfileSet::default()
    };
    let a = analyze_part(
        "die",
        &die,
        &profiles,
        &[Process::Machining, Process::Additive],
        &AnalysisOptions::default(),
    )?;
    for p in [Process::Machining, Process::Additive] {
        println!("{p}:");
        for (k, v) in a.report(p).expect("requested").scalars() {
            println!("  {k:<12} {v:.4}");
        }
    }

    let leaves = a.octree.grey_leaves();
    let zone: Vec<bool> = leaves.iter().map(|l| near_pocket_corner(&l.bounds, &layout)).collect();
    let share = zone.iter().filter(|z| **z).count() as f64 / zone.len() as f64;
    println!("corner zones hold {:.1}% of the grey leaves", share * 100.0);
    for id in [IndexId::Flexibility, IndexId::Height] {
        let values = &a.field(id).expect("field").values;
        let mut sorted = values.clone();
        sorted.sort_by(f64::total_cmp);
        let q90 = sorted[(sorted.len() * 9).div_ceil(10) - 1];
        let max = sorted[sorted.len() - 1];
        let (top, top_in_zone) = count(values, &zone, |v| v >= q90);
        let (hot, hot_in_zone) = count(values, &zone, |v| v == max);
        println!(
            "{}: >= 90th percentile {top_in_zone}/{top} in corner zones, maximum {hot_in_zone}/{hot}",
            id.key()
        );
    }

    for id in [IndexId::Flexibility, IndexId::Height] {
        let field = a.field(id).expect("field");
        for fmt in [MapFormat::Ply, MapFormat::Vtk] {
            let path = out.join(format!("die_{}_map.{}", id.stem(), fmt.extension()));
            export_difficulty_map(&die, &a.octree, field, ColorScale::Auto, &path, fmt)?;
            println!("wrote {}", path.display());
        }
    }
    Ok(())
}

/// Within one leaf width of a vertical pocket corner edge, between the
/// pocket floor and the slab's top face.
fn near_pocket_corner(leaf: &Aabb, layout: &DieLayout) -> bool {
    let reach = leaf.extents().x;
    layout.pockets.iter().any(|p| {
        let corners = [(p.min.x, p.min.y), (p.min.x, p.max.y), (p.max.x, p.min.y), (p.max.x, p.max.y)];
        leaf.max.z > p.min.z
            && leaf.max.z < layout.slab.max.z
            && corners.iter().any(|&(x, y)| {
                let dx = (leaf.min.x - x).max(x - leaf.max.x).max(0.0);
                let dy = (leaf.min.y - y).max(y - leaf.max.y).max(0.0);
                dx.hypot(dy) <= reach
            })
    })
}

fn count(values: &[f64], zone: &[bool], pick: impl Fn(f64) -> bool) -> (usize, usize) {
    let picked: Vec<bool> = values.iter().map(|v| pick(*v)).collect();
    let n = picked.iter().filter(|p| **p).count();
    let in_zone = picked.iter().zip(zone).filter(|(p, z)| **p && **z).count();
    (n, in_zone)
}
