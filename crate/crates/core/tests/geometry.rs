use helmholtz_abc::geometry::*;
use proptest::prelude::*;
use std::f64::consts::{FRAC_PI_2, TAU};

fn unit_disc() -> ObstacleShape {
    ObstacleShape::Disc { center: Point::ORIGIN, radius: 1.0 }
}

fn trapping_vertices() -> Vec<Point> {
    match preset_trapping_polygon() {
        ObstacleShape::Polygon { vertices } => vertices,
        _ => unreachable!(),
    }
}

/// Winding number of a closed polygon around `p`.
fn winding(vertices: &[Point], p: Point) -> i32 {
    let mut w = 0;
    for i in 0..vertices.len() {
        let a = vertices[i];
        let b = vertices[(i + 1) % vertices.len()];
        let side = (b - a).cross(p - a);
        if a.y <= p.y && b.y > p.y && side > 0.0 {
            w += 1;
        } else if a.y > p.y && b.y <= p.y && side < 0.0 {
            w -= 1;
        }
    }
    w
}

#[test]
fn butterfly_formula_values() {
    let ObstacleShape::Polar(curve) = preset_butterfly() else { unreachable!() };
    assert!((curve.rho(0.0) - 0.87).abs() < 1e-12);
    assert!((curve.rho(FRAC_PI_2) - 0.13).abs() < 1e-12);
    assert!((curve.rho(0.0) - curve.rho(TAU)).abs() < 1e-12);
}

#[test]
fn trapping_polygon_vertices() {
    let v = trapping_vertices();
    assert_eq!(v.len(), 12);
    assert_eq!(v[0], Point::new(0.5, 0.125));
    assert_eq!(v[11], Point::new(0.25, 0.125));
    // Brute-force pairwise check of non-adjacent edges.
    let n = v.len();
    for i in 0..n {
        for j in i + 2..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            let (a, b, c, d) = (v[i], v[(i + 1) % n], v[j], v[(j + 1) % n]);
            let o1 = (b - a).cross(c - a) * (b - a).cross(d - a);
            let o2 = (d - c).cross(a - c) * (d - c).cross(b - c);
            assert!(!(o1 < 0.0 && o2 < 0.0), "edges {i} and {j} cross");
        }
    }
}

#[test]
fn normals_by_hand() {
    let n = unit_disc().outward_normal(0.0).unwrap();
    assert!(n.dist(Point::new(1.0, 0.0)) < 1e-15);
    let square = TruncationShape::Square { half_side: 4.0, corner_radius: 0.0 };
    let curve = square.curve();
    // The right edge runs from the bottom-right corner; its midpoint is half a side in.
    let mid = curve.point(4.0);
    assert!(mid.dist(Point::new(4.0, 0.0)) < 1e-12);
    assert!(square.outward_normal(4.0).unwrap().dist(Point::new(1.0, 0.0)) < 1e-15);
}

#[test]
fn butterfly_normal_against_finite_difference_tangent() {
    let shape = preset_butterfly();
    for s in [0.0, 0.4, 1.3, 2.9, 4.4] {
        let n = shape.outward_normal(s).unwrap();
        let h = 1e-6;
        let tangent = (shape.point(s + h) - shape.point(s - h)) * (0.5 / h);
        assert!((n.norm() - 1.0).abs() < 1e-12);
        assert!(n.dot(tangent.unit()).abs() < 1e-8);
        // Outward: a short step along n leaves the obstacle.
        assert!(!shape.contains(shape.point(s) + n * 1e-6));
    }
}

#[test]
fn containment_and_distance_examples() {
    assert!(unit_disc().contains(Point::ORIGIN));
    assert!((unit_disc().distance_to_boundary(Point::new(2.0, 0.0)) - 1.0).abs() < 1e-15);
}

#[test]
fn scene_requires_strict_containment() {
    let too_small = Scene::new(unit_disc(), TruncationShape::Circle { radius: 0.9 }, None);
    assert!(too_small.is_err());
    let ok = Scene::new(preset_butterfly(), TruncationShape::Circle { radius: 2.0 }, None);
    assert!(ok.is_ok());
}

#[test]
fn tabulated_curve_matches_preset() {
    let samples: Vec<f64> = (0..256).map(|j| PolarPreset::Butterfly.rho(TAU * j as f64 / 256.0)).collect();
    let tab = PolarCurve::tabulated(samples).unwrap();
    for i in 0..50 {
        let th = 0.1237 * i as f64;
        assert!((tab.rho(th) - PolarPreset::Butterfly.rho(th)).abs() < 1e-10);
    }
}

proptest! {
    #[test]
    fn polygon_containment_matches_winding_number(x in -0.9..0.9f64, y in -0.9..0.9f64) {
        let v = trapping_vertices();
        let p = Point::new(x, y);
        let shape = preset_trapping_polygon();
        prop_assume!(shape.distance_to_boundary(p).abs() > 1e-9);
        prop_assert_eq!(shape.contains(p), winding(&v, p) != 0);
    }

    #[test]
    fn scene_toml_round_trip(radius in 1.5..5.0f64, rounded in any::<bool>(), butterfly in any::<bool>()) {
        let obstacle = if butterfly { preset_butterfly() } else { unit_disc() };
        let truncation = if rounded {
            TruncationShape::Square { half_side: radius, corner_radius: 0.25 }
        } else {
            TruncationShape::Circle { radius }
        };
        let scene = Scene::new(obstacle, truncation, Some(PmlLayout { inner_radius: radius * 1.5, width: 0.5 })).unwrap();
        let back = Scene::from_toml_str(&scene.to_toml_string()).unwrap();
        prop_assert_eq!(back, scene);
    }

    #[test]
    fn closest_point_is_on_the_curve(angle in 0.0..TAU, r in 0.2..3.0f64) {
        let curve = preset_butterfly().curve();
        let p = Point::polar(r, angle);
        let (s, d) = curve.closest(p);
        prop_assert!((curve.point(s).dist(p) - d).abs() < 1e-9);
        // No sampled boundary point is closer.
        let best = (0..2000).map(|i| curve.point(TAU * i as f64 / 2000.0).dist(p)).fold(f64::INFINITY, f64::min);
        prop_assert!(d <= best + 1e-9);
    }
}
