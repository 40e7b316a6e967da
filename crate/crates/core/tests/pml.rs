use helmholtz_abc::fem::*;
use helmholtz_abc::geometry::*;
use helmholtz_abc::meshing::*;
use helmholtz_abc::pml::*;
use num_complex::Complex64 as C64;
use proptest::prelude::*;
use std::f64::consts::TAU;
use std::sync::Arc;

const K: f64 = 10.0;

fn a() -> Point {
    direction(0.4)
}

fn mie(points: &[Point]) -> Vec<C64> {
    mie_disc(K, 1.0, a(), points).unwrap()
}

#[test]
fn series_matches_plane_wave_on_the_disc() {
    let pts: Vec<Point> = (0..100).map(|i| Point::polar(1.0, TAU * i as f64 / 100.0)).collect();
    let u = mie(&pts);
    for (p, v) in pts.iter().zip(&u) {
        assert!((v - plane_wave(K, a(), *p)).norm() < 1e-10);
    }
}

#[test]
fn series_solves_helmholtz() {
    let h = 1e-3;
    for &p in &[Point::new(1.7, 0.3), Point::new(-2.5, 1.1), Point::new(0.2, -3.0)] {
        let stencil = [p, p + Point::new(h, 0.0), p - Point::new(h, 0.0), p + Point::new(0.0, h), p - Point::new(0.0, h)];
        let u = mie(&stencil);
        let lap = (u[1] + u[2] + u[3] + u[4] - u[0] * 4.0) / (h * h);
        let residual = (lap + u[0] * (K * K)).norm() / (K * K * u[0].norm());
        assert!(residual < 1e-4, "{residual}");
    }
}

#[test]
fn far_field_decays_like_inverse_square_root() {
    let phi = 1.1;
    let scaled: Vec<f64> = (0..=45)
        .map(|i| {
            let r = 5.0 + i as f64;
            mie(&[Point::polar(r, phi)])[0].norm() * r.sqrt()
        })
        .collect();
    let (lo, hi) = scaled.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    assert!(hi / lo < 1.5, "{lo} {hi}");
}

#[test]
fn radiation_residual_vanishes() {
    let residual = |r: f64| {
        let h = 1e-4;
        let u = mie(&[Point::polar(r - h, 0.9), Point::polar(r, 0.9), Point::polar(r + h, 0.9)]);
        let dr = (u[2] - u[0]) / (2.0 * h);
        (dr - C64::i() * K * u[1]).norm() * r.sqrt()
    };
    let ratio = residual(40.0) / residual(10.0);
    assert!(ratio < 0.3, "{ratio}");
}

#[test]
fn too_short_series_is_refused() {
    assert!(mie_disc_with_terms(K, 1.0, a(), &[Point::new(2.0, 0.0)], 3).is_err());
}

fn reference(k: f64, sigma_scale: f64, outer_width: f64) -> (Arc<Mesh>, FieldSolution) {
    let layout = PmlLayout { inner_radius: 2.0, width: outer_width };
    let scene = Scene::new(
        ObstacleShape::Disc { center: Point::ORIGIN, radius: 1.0 },
        TruncationShape::Circle { radius: 2.0 },
        Some(layout),
    )
    .unwrap();
    let mesh = Arc::new(generate_mesh(&scene, k, 1.0, 2, true).unwrap());
    let mut config = PmlConfig::tuned(layout);
    config.sigma0 *= sigma_scale;
    let full = solve_pml(&scene, k, config, Point::new(1.0, 0.0), mesh.clone()).unwrap();
    let (sub, map) = mesh.submesh(|r| r == Region::Interior);
    let sub = Arc::new(sub);
    (sub.clone(), full.restrict(sub, &map).unwrap())
}

#[test]
fn pml_reference_matches_series() {
    let err = series_error(6.0, 0.5);
    assert!(err < 0.01, "{err}");
}

fn series_error(k: f64, width: f64) -> f64 {
    let (mesh, u) = reference(k, 1.0, width);
    let exact = |x: Point| mie_disc(k, 1.0, Point::new(1.0, 0.0), &[x]).unwrap()[0];
    let values: Vec<C64> = mesh.nodes().iter().map(|&x| exact(x)).collect();
    l2_error_against(&mesh, &u.values, &exact, ErrorRegion::All) / l2_norm(&mesh, &values, ErrorRegion::All)
}

#[test]
fn pml_is_insensitive_to_its_tuning() {
    let k = 6.0;
    let (_, base) = reference(k, 1.0, 0.5);
    let (_, doubled) = reference(k, 2.0, 0.5);
    let change = relative_error(&base, &doubled, ErrorRegion::All).unwrap();
    assert!(change < 0.005, "{change}");
    // A wider layer meshes differently; bound the change through the series.
    let (narrow, wide) = (series_error(k, 0.5), series_error(k, 1.0));
    assert!(narrow + wide < 0.005, "{narrow} + {wide}");
}

proptest! {
    #[test]
    fn coefficients_are_identity_inside(r in 0.0..2.0f64, phi in 0.0..TAU, k in 1.0..50.0f64) {
        let config = PmlConfig::tuned(PmlLayout { inner_radius: 2.0, width: 0.5 });
        let (m, b) = config.coefficients(k, Point::polar(r, phi));
        let id = [[1.0, 0.0], [0.0, 1.0]];
        for i in 0..2 {
            for j in 0..2 {
                prop_assert!((m[i][j] - id[i][j]).norm() < 1e-15);
            }
        }
        prop_assert!((b - 1.0).norm() < 1e-15);
    }

    #[test]
    fn coefficients_are_symmetric_and_absorbing(r in 2.0..2.5f64, phi in 0.0..TAU, k in 1.0..50.0f64) {
        let config = PmlConfig::tuned(PmlLayout { inner_radius: 2.0, width: 0.5 });
        let (m, b) = config.coefficients(k, Point::polar(r, phi));
        prop_assert!((m[0][1] - m[1][0]).norm() < 1e-15);
        prop_assert!(b.im >= 0.0);
        prop_assert!(config.sigma(r) <= config.sigma0 + 1e-12);
    }
}
