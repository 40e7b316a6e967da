use helmholtz_abc::geometry::*;
use helmholtz_abc::meshing::*;
use proptest::prelude::*;
use std::collections::{HashMap, HashSet};
use std::f64::consts::PI;

fn disc_scene(radius: f64, pml: bool) -> Scene {
    Scene::new(
        ObstacleShape::Disc { center: Point::ORIGIN, radius: 1.0 },
        TruncationShape::Circle { radius },
        pml.then_some(PmlLayout { inner_radius: radius, width: 0.5 }),
    )
    .unwrap()
}

/// V − E + F counted from the corner connectivity, independently of the mesh.
fn euler(mesh: &Mesh) -> i64 {
    let mut vertices = HashSet::new();
    let mut edges = HashSet::new();
    for e in 0..mesh.num_elements() {
        let c = mesh.corners(e);
        for i in 0..3 {
            vertices.insert(c[i]);
            let (a, b) = (c[i], c[(i + 1) % 3]);
            edges.insert((a.min(b), a.max(b)));
        }
    }
    vertices.len() as i64 - edges.len() as i64 + mesh.num_elements() as i64
}

fn signed_area(mesh: &Mesh, e: usize) -> f64 {
    let [a, b, c] = mesh.corners(e).map(|i| mesh.nodes()[i]);
    0.5 * (b - a).cross(c - a)
}

#[test]
fn element_count_follows_area_over_h_squared() {
    let scene = disc_scene(2.0, false);
    let mesh = generate_mesh(&scene, 20.0, 2.0 * PI / 5.0, 2, false).unwrap();
    let h = mesh_size(20.0, 2.0 * PI / 5.0, 2);
    assert!((h - 0.0297).abs() < 1e-4, "{h}");
    assert!((mesh.h_target() - h).abs() < 1e-15);
    let n = mesh.num_elements();
    assert!((15_000..=40_000).contains(&n), "{n}");
    let area = PI * (4.0 - 1.0);
    let ratio = n as f64 / (area / (h * h));
    assert!((1.0..=4.0).contains(&ratio), "{ratio}");
}

#[test]
fn annulus_has_zero_euler_characteristic() {
    let mesh = generate_mesh(&disc_scene(2.0, false), 10.0, 1.0, 2, false).unwrap();
    assert_eq!(euler(&mesh), 0);
    assert_eq!(mesh.euler_characteristic(), 0);
}

#[test]
fn dirichlet_nodes_lie_on_the_obstacle() {
    for p in [1, 2] {
        let mesh = generate_mesh(&disc_scene(2.0, false), 10.0, 1.0, p, false).unwrap();
        let h = mesh.h_target();
        let worst = mesh
            .nodes_on(BoundaryTag::GammaD)
            .iter()
            .map(|&i| (mesh.nodes()[i].norm() - 1.0).abs())
            .fold(0.0, f64::max);
        assert!(worst < h * h, "p={p}: {worst} vs {}", h * h);
        let truncation = mesh
            .nodes_on(BoundaryTag::GammaTr)
            .iter()
            .map(|&i| (mesh.nodes()[i].norm() - 2.0).abs())
            .fold(0.0, f64::max);
        assert!(truncation < h * h);
    }
}

#[test]
fn pml_mesh_contains_the_interior_mesh() {
    let scene = disc_scene(2.0, true);
    let mesh = generate_mesh(&scene, 8.0, 1.0, 2, true).unwrap();
    assert!(mesh.regions().contains(&Region::Pml));
    let (sub, map) = mesh.submesh(|r| r == Region::Interior);
    sub.validate().unwrap();
    for (i, &parent) in map.iter().enumerate() {
        assert_eq!(sub.nodes()[i], mesh.nodes()[parent]);
        assert!(sub.nodes()[i].norm() <= 2.0 + 1e-12);
    }
    assert!(sub.boundary_with(BoundaryTag::GammaTr).count() > 0);
    assert_eq!(euler(&sub), 0);
}

#[test]
fn refinement_increases_resolution() {
    let scene = disc_scene(2.0, false);
    let coarse = generate_mesh(&scene, 10.0, 2.0, 1, false).unwrap();
    let fine = generate_mesh(&scene, 10.0, 1.0, 1, false).unwrap();
    let ratio = fine.num_elements() as f64 / coarse.num_elements() as f64;
    assert!((3.0..=5.5).contains(&ratio), "{ratio}");
    assert!(fine.max_edge_length() < coarse.max_edge_length());
}

#[test]
fn export_import_round_trip() {
    let mesh = generate_mesh(&disc_scene(2.0, false), 5.0, 2.0, 2, false).unwrap();
    assert!(mesh.num_elements() >= 10);
    let text = export_mesh(&mesh);
    assert_eq!(import_mesh(&text).unwrap(), mesh);
}

const TWO_TRIANGLES: &str = "ORDER 1
H 1
VERTICES 4 4
0 0
1 0
1 1
0 1
TRIANGLES 2
0 1 2 interior
0 2 3 interior
BOUNDARY 4
0 1 GammaD
1 2 GammaD
2 3 GammaD
3 0 GammaD
";

#[test]
fn import_rejects_bad_files() {
    import_mesh(TWO_TRIANGLES).unwrap();
    assert!(import_mesh(&TWO_TRIANGLES.replace("0 2 3 interior", "0 -2 3 interior")).is_err());
    // An edge that no triangle owns.
    let dangling = TWO_TRIANGLES.replace("BOUNDARY 4", "BOUNDARY 5").replace("3 0 GammaD\n", "3 0 GammaD\n1 3 GammaD\n");
    assert!(import_mesh(&dangling).is_err());
    // A boundary edge left untagged.
    let untagged = TWO_TRIANGLES.replace("BOUNDARY 4", "BOUNDARY 3").replace("3 0 GammaD\n", "");
    assert!(import_mesh(&untagged).is_err());
}

fn check_invariants(mesh: &Mesh) -> Result<(), TestCaseError> {
    let h = mesh.h_target();
    let mut owners: HashMap<(usize, usize), usize> = HashMap::new();
    for e in 0..mesh.num_elements() {
        prop_assert!(signed_area(mesh, e) > 1e-14 * h * h);
        let c = mesh.corners(e);
        for i in 0..3 {
            let (a, b) = (c[i], c[(i + 1) % 3]);
            *owners.entry((a.min(b), a.max(b))).or_default() += 1;
        }
    }
    let boundary: HashMap<(usize, usize), usize> = mesh
        .boundary()
        .iter()
        .map(|b| ((b.nodes[0].min(b.nodes[1]), b.nodes[0].max(b.nodes[1])), 1))
        .fold(HashMap::new(), |mut m, (k, v)| {
            *m.entry(k).or_default() += v;
            m
        });
    for (edge, count) in &owners {
        prop_assert!(*count <= 2, "edge shared by {count} triangles");
        // Conformity: an edge with one owner is on the boundary, tagged once.
        let tags = boundary.get(edge).copied().unwrap_or(0);
        prop_assert_eq!(tags, usize::from(*count == 1));
    }
    prop_assert!(mesh.min_angle_degrees() > 15.0, "min angle {}", mesh.min_angle_degrees());
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn generated_meshes_are_conforming(radius in 1.8..3.0f64, fraction in 0.06..0.3f64, p in 1u32..=2, butterfly in any::<bool>()) {
        let (obstacle, extent) = if butterfly {
            (preset_butterfly(), 1.3)
        } else {
            (ObstacleShape::Disc { center: Point::ORIGIN, radius: 1.0 }, 1.0)
        };
        let scene = Scene::new(obstacle, TruncationShape::Circle { radius }, None).unwrap();
        // A target size that leaves at least three layers between the boundaries.
        let h = fraction * (radius - extent);
        let mesh = generate_mesh_with(&scene, h, ElementOrder::from_degree(p).unwrap(), false, MeshOptions::default()).unwrap();
        mesh.validate().unwrap();
        check_invariants(&mesh)?;
        prop_assert_eq!(euler(&mesh), 0);
    }

    #[test]
    fn square_truncation_meshes_are_conforming(half in 1.5..3.0f64, fraction in 0.06..0.3f64) {
        let scene = Scene::new(
            preset_trapping_polygon(),
            TruncationShape::Square { half_side: half, corner_radius: 0.0 },
            None,
        ).unwrap();
        // The polygon reaches x = 0.8, y = −0.5.
        let h = fraction * (half - 0.8);
        let mesh = generate_mesh_with(&scene, h, ElementOrder::P2, false, MeshOptions::default()).unwrap();
        mesh.validate().unwrap();
        check_invariants(&mesh)?;
        prop_assert_eq!(euler(&mesh), 0);
        // Square corners are mesh nodes.
        for corner in [Point::new(half, half), Point::new(-half, -half)] {
            prop_assert!(mesh.nodes().iter().any(|&x| x.dist(corner) < 1e-12));
        }
    }
}
