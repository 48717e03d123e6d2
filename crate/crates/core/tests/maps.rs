use dfm_index::fixtures;
use dfm_index::indexes::{IndexId, LocalIndexField};
use dfm_index::machining::c_f;
use dfm_index::mesh::MeshQuery;
use dfm_index::profile::reference_mill;
use dfm_index::reporting::{
    export_difficulty_map, ramp_color, render_ply, render_vtk, ColorScale, MapFormat,
};
use dfm_index::spatial::{build_octree, OctantClass, Octree, OctreeConfig};
use dfm_index::Error;

struct Ply {
    vertices: Vec<([f64; 3], [u8; 3])>,
    faces: Vec<[usize; 3]>,
    scale: (f64, f64),
}

fn parse_ply(text: &str) -> Ply {
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("ply"));
    assert_eq!(lines.next(), Some("format ascii 1.0"));
    let (mut nv, mut nf, mut scale) = (0, 0, (f64::NAN, f64::NAN));
    for line in lines.by_ref() {
        let w: Vec<&str> = line.split_whitespace().collect();
        match w.as_slice() {
            ["end_header"] => break,
            ["element", "vertex", n] => nv = n.parse().unwrap(),
            ["element", "face", n] => nf = n.parse().unwrap(),
            ["comment", "scale", lo, hi] => scale = (lo.parse().unwrap(), hi.parse().unwrap()),
            _ => {}
        }
    }
    let vertices = (0..nv)
        .map(|_| {
            let w: Vec<&str> = lines.next().unwrap().split_whitespace().collect();
            let p = [0, 1, 2].map(|i| w[i].parse::<f64>().unwrap());
            let c = [3, 4, 5].map(|i| w[i].parse::<u8>().unwrap());
            (p, c)
        })
        .collect();
    let faces = (0..nf)
        .map(|_| {
            let w: Vec<usize> = lines.next().unwrap().split_whitespace().map(|x| x.parse().unwrap()).collect();
            assert_eq!(w[0], 3);
            [w[1], w[2], w[3]]
        })
        .collect();
    assert!(lines.next().is_none());
    Ply { vertices, faces, scale }
}

/// Position of a color along the blue-to-red ramp, found by search.
fn ramp_index(c: [u8; 3]) -> f64 {
    (0..=1000)
        .map(|i| i as f64 / 1000.0)
        .min_by_key(|t| {
            let r = ramp_color(*t);
            (0..3).map(|k| (r[k] as i32 - c[k] as i32).abs()).sum::<i32>()
        })
        .unwrap()
}

fn pocket_setup() -> (dfm_index::mesh::TriMesh, Octree, LocalIndexField) {
    let mesh = fixtures::pocket_block(64.0, 60.0, 12.0, 12.0, 40.0);
    let q = MeshQuery::new(&mesh).unwrap();
    let tree = build_octree(&q, OctreeConfig::with_depth(5)).unwrap();
    let f = c_f(&q, &tree, &reference_mill()).unwrap();
    (mesh, tree, f)
}

#[test]
fn ply_structure_and_zones() {
    let (mesh, tree, f) = pocket_setup();
    let ply = parse_ply(&render_ply(&mesh, &tree, &f, ColorScale::Auto).unwrap());
    assert_eq!(ply.vertices.len(), mesh.vertices().len());
    assert_eq!(ply.faces.len(), mesh.triangles().len());
    assert_eq!(ply.scale, (0.0, f.max().unwrap()));
    for (i, (p, _)) in ply.vertices.iter().enumerate() {
        let v = mesh.vertices()[i];
        assert_eq!(*p, [v.x, v.y, v.z]);
    }
    // Outer top corners are trivially reachable; pocket floor corners are not.
    let outer_top: Vec<f64> = ply
        .vertices
        .iter()
        .filter(|(p, _)| p[2] == 60.0 && [p[0], p[1]].iter().all(|c| *c == 0.0 || *c == 64.0))
        .map(|(_, c)| ramp_index(*c))
        .collect();
    let floor: Vec<f64> = ply
        .vertices
        .iter()
        .filter(|(p, _)| p[2] == 20.0 && p[0] > 1.0 && p[0] < 63.0 && p[1] > 1.0 && p[1] < 63.0)
        .map(|(_, c)| ramp_index(*c))
        .collect();
    assert_eq!(outer_top.len(), 4);
    assert!(!floor.is_empty());
    assert!(outer_top.iter().all(|t| *t == 0.0), "{outer_top:?}");
    let floor_mean = floor.iter().sum::<f64>() / floor.len() as f64;
    assert!(floor_mean > 0.9, "{floor:?}");
}

#[test]
fn fixed_scale_saturates() {
    let (mesh, tree, f) = pocket_setup();
    let hi = f.max().unwrap() / 2.0;
    let ply = parse_ply(&render_ply(&mesh, &tree, &f, ColorScale::fixed(0.0, hi).unwrap()).unwrap());
    assert_eq!(ply.scale, (0.0, hi));
    assert!(ply.vertices.iter().any(|(_, c)| *c == ramp_color(1.0)));
    assert!(ply.vertices.iter().all(|(_, c)| ramp_index(*c) <= 1.0));
}

#[test]
fn constant_field_is_blue() {
    let slab = fixtures::cube(10.0);
    let q = MeshQuery::new(&slab).unwrap();
    let tree = build_octree(&q, OctreeConfig::with_depth(3)).unwrap();
    let n = tree.grey_leaves().len();
    let f = LocalIndexField::new(IndexId::Height, vec![0.3; n], vec![1.0; n]).unwrap();
    let ply = parse_ply(&render_ply(&slab, &tree, &f, ColorScale::Auto).unwrap());
    assert!(ply.vertices.iter().all(|(_, c)| *c == ramp_color(0.0)));
}

#[test]
fn vtk_cells_cover_black_and_grey_leaves() {
    let (_, tree, f) = pocket_setup();
    let text = render_vtk(&tree, &f, ColorScale::Auto).unwrap();
    let solid = tree.leaves().iter().filter(|l| l.class != OctantClass::White).count();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("# vtk DataFile Version 3.0"));
    assert!(text.contains(&format!("POINTS {} double\n", 8 * solid)));
    assert!(text.contains(&format!("CELLS {} {}\n", solid, 9 * solid)));
    assert!(text.contains(&format!("CELL_TYPES {solid}\n")));
    let data_at = text.find("LOOKUP_TABLE default\n").unwrap() + "LOOKUP_TABLE default\n".len();
    let values: Vec<f64> = text[data_at..].lines().map(|l| l.parse().unwrap()).collect();
    assert_eq!(values.len(), solid);
    let mut sorted_field = f.values.clone();
    sorted_field.sort_by(f64::total_cmp);
    assert_eq!(values.iter().cloned().fold(f64::MIN, f64::max), *sorted_field.last().unwrap());
}

#[test]
fn mismatched_field_is_rejected() {
    let (mesh, tree, _) = pocket_setup();
    let f = LocalIndexField::new(IndexId::Flexibility, vec![0.1; 3], vec![1.0; 3]).unwrap();
    assert!(matches!(
        render_ply(&mesh, &tree, &f, ColorScale::Auto),
        Err(Error::FieldMismatch { field: 3, .. })
    ));
}

#[test]
fn export_writes_complete_files_only() {
    let (mesh, tree, f) = pocket_setup();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("map.ply");
    export_difficulty_map(&mesh, &tree, &f, ColorScale::Auto, &path, MapFormat::Ply).unwrap();
    let names: Vec<_> = std::fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert_eq!(names, ["map.ply"]);
    assert_eq!(
        std::fs::read_to_string(&path).unwrap(),
        render_ply(&mesh, &tree, &f, ColorScale::Auto).unwrap()
    );
}
