//! End-to-end analysis of one part or of a modular assembly.

use crate::additive::{self, HeightReference};
use crate::aggregation::{total_modules, IndexReport, Provenance, TotalsReport};
use crate::error::{Error, Result};
use crate::indexes::{IndexId, LocalIndexField, Process};
use crate::machining;
use crate::mesh::{MeshQuery, TriMesh};
use crate::profile::ProfileSet;
use crate::spatial::{build_octree, Octree, OctreeConfig};

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct AnalysisOptions {
    pub octree: OctreeConfig,
    pub height_reference: HeightReference,
}

/// Everything produced for one part: the octree, one report per process and
/// the local fields behind them.
#[derive(Debug, Clone)]
pub struct PartAnalysis {
    pub octree: Octree,
    pub reports: Vec<IndexReport>,
    pub fields: Vec<LocalIndexField>,
}

impl PartAnalysis {
    pub fn report(&self, process: Process) -> Option<&IndexReport> {
        self.reports.iter().find(|r| r.process == process)
    }

    pub fn field(&self, id: IndexId) -> Option<&LocalIndexField> {
        self.fields.iter().find(|f| f.id == id)
    }
}

/// Runs octree construction and the indexes of every requested process.
/// All processes share one octree.
pub fn analyze_part(
    design: &str,
    mesh: &TriMesh,
    profiles: &ProfileSet,
    processes: &[Process],
    options: &AnalysisOptions,
) -> Result<PartAnalysis> {
    for p in processes {
        let present = match p {
            Process::Machining => profiles.machining.is_some(),
            Process::Additive => profiles.additive.is_some(),
        };
        if !present {
            return Err(Error::Profile(format!("profile has no [{p}] table")));
        }
    }
    let query = MeshQuery::new(mesh)?;
    let octree = build_octree(&query, options.octree)?;
    let metrics = mesh.metrics();
    let provenance = Provenance {
        source: design.to_string(),
        triangles: mesh.triangles().len(),
        vertices: mesh.vertices().len(),
        volume_mm3: metrics.volume,
        surface_area_mm2: metrics.surface_area,
        max_depth: options.octree.max_depth,
        samples: options.octree.samples,
        margin: options.octree.margin,
    };
    let fingerprint = octree.fingerprint();

    let mut reports = Vec::new();
    let mut fields = Vec::new();
    for &process in processes {
        let mut report = IndexReport::new(design, process);
        report.octree = Some(fingerprint.clone());
        report.provenance = provenance.clone();
        let mut local = Vec::new();
        match process {
            Process::Machining => {
                let m = profiles.machining.as_ref().expect("checked above");
                let g = &mut report.globals;
                g.insert(IndexId::MachiningDimension.key(), machining::c_d_sub(metrics, m));
                g.insert(IndexId::Chips.key(), machining::c_c(metrics)?);
                if let Some(material) = &profiles.part.material {
                    g.insert(IndexId::Hardness.key(), machining::c_m(material, m)?);
                }
                if let Some(ra) = profiles.part.required_ra_um {
                    g.insert(IndexId::Roughness.key(), machining::c_r(ra, m)?);
                }
                local.push(machining::c_f(&query, &octree, m)?);
            }
            Process::Additive => {
                let a = profiles.additive.as_ref().expect("checked above");
                let g = &mut report.globals;
                g.insert(IndexId::AdditiveDimension.key(), additive::c_d_add(metrics, a));
                g.insert(IndexId::Volume.key(), additive::c_v(metrics, a)?);
                g.insert(IndexId::Skin.key(), additive::c_s(metrics, a)?);
                local.push(additive::c_h(&octree, a, options.height_reference)?);
                local.push(additive::c_rho(&octree, a)?);
            }
        }
        for f in &local {
            report.insert_local(f)?;
        }
        reports.push(report);
        fields.extend(local);
    }
    Ok(PartAnalysis {
        octree,
        reports,
        fields,
    })
}

/// One module of an assembly design.
#[derive(Debug)]
pub struct ModuleInput<'a> {
    pub id: String,
    pub mesh: &'a TriMesh,
    pub process: Process,
}

/// Analyzes each module with its own process, then totals them.
pub fn analyze_assembly(
    design: &str,
    modules: &[ModuleInput<'_>],
    profiles: &ProfileSet,
    options: &AnalysisOptions,
) -> Result<(Vec<PartAnalysis>, TotalsReport)> {
    if modules.is_empty() {
        return Err(Error::EmptyInput);
    }
    let analyses = modules
        .iter()
        .map(|m| analyze_part(&m.id, m.mesh, profiles, &[m.process], options))
        .collect::<Result<Vec<_>>>()?;
    let entries: Vec<(String, f64, &IndexReport)> = modules
        .iter()
        .zip(&analyses)
        .map(|(m, a)| (m.id.clone(), m.mesh.metrics().volume, &a.reports[0]))
        .collect();
    let totals = total_modules(design, &entries)?;
    Ok((analyses, totals))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::profile::{reference_mill, AdditiveProfile, PartRequirements};

    fn profiles() -> ProfileSet {
        ProfileSet {
            machining: Some(reference_mill()),
            additive: Some(AdditiveProfile::cube(250.0)),
            part: PartRequirements {
                material: Some("aluminum".into()),
                required_ra_um: Some(1.6),
            },
        }
    }

    fn opts(depth: u32) -> AnalysisOptions {
        AnalysisOptions {
            octree: OctreeConfig::with_depth(depth),
            ..Default::default()
        }
    }

    #[test]
    fn both_processes_share_one_octree() {
        let part = fixtures::pocket_block(60.0, 30.0, 12.0, 12.0, 20.0);
        let a = analyze_part("pocket", &part, &profiles(), &[Process::Machining, Process::Additive], &opts(4))
            .unwrap();
        assert_eq!(a.reports.len(), 2);
        assert_eq!(a.reports[0].octree, a.reports[1].octree);
        let m = a.report(Process::Machining).unwrap();
        for key in ["C(d)-", "C(c)-", "C(m)-", "C(r)-"] {
            assert!(m.globals.contains_key(key), "{key}");
        }
        assert!(m.locals.contains_key("C(f)-"));
        let add = a.report(Process::Additive).unwrap();
        assert!(add.locals.contains_key("C(h)+") && add.locals.contains_key("C(rho)+"));
        for r in &a.reports {
            for v in r.scalars().values() {
                assert!((0.0..=1.0).contains(v));
            }
        }
    }

    #[test]
    fn missing_process_table_is_a_profile_error() {
        let mut p = profiles();
        p.additive = None;
        let cube = fixtures::cube(10.0);
        let r = analyze_part("c", &cube, &p, &[Process::Additive], &opts(2));
        assert!(matches!(r, Err(Error::Profile(_))));
    }

    #[test]
    fn assembly_weights_follow_volumes() {
        let big = fixtures::box_mesh(&crate::geometry::Aabb::from_coords([0.0; 3], [20.0, 10.0, 10.0]));
        let small = fixtures::box_mesh(&crate::geometry::Aabb::from_coords([0.0; 3], [10.0, 10.0, 10.0]));
        let modules = [
            ModuleInput { id: "a".into(), mesh: &big, process: Process::Machining },
            ModuleInput { id: "b".into(), mesh: &small, process: Process::Machining },
        ];
        let (_, totals) = analyze_assembly("ab", &modules, &profiles(), &opts(3)).unwrap();
        let w: Vec<f64> = totals.modules.iter().map(|m| m.weight.unwrap()).collect();
        assert!((w[0] - 2.0 / 3.0).abs() < 1e-9 && (w[1] - 1.0 / 3.0).abs() < 1e-9);
    }
}
