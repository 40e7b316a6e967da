//! Reference solutions: a radial perfectly matched layer and the exact
//! series for a sound-soft disc.
//!
//! The layer uses the complex radius `r̃ = r + (i/k)∫_{R₀}^r σ` with
//! `σ(r) = σ₀((r − R₀)/w)²`. In the polar frame the stretched operator is
//! `∇·(A∇u) + k²bu` with `A = diag(r̃/(rγ), rγ/r̃)`, `b = r̃γ/r` and
//! `γ = dr̃/dr = 1 + iσ/k`.

pub mod bessel;
mod mie;

pub use mie::{mie_disc, mie_disc_with_terms, mie_truncation};

use crate::error::{Error, Result};
use crate::fem::{assemble_volume_system, check_mesh_against_curve, plane_wave, solve, FieldSolution, LinearSystem, SolveMetadata};
use crate::geometry::{Curve, PmlLayout, Point, Scene};
use crate::meshing::{BoundaryTag, Mesh};
use num_complex::Complex64 as C64;
use serde::Serialize;
use std::sync::Arc;

/// Target round-trip attenuation `exp(−2∫σ)` at normal incidence.
pub const ROUND_TRIP_DAMPING: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PmlConfig {
    pub inner_radius: f64,
    pub width: f64,
    pub sigma0: f64,
}

impl PmlConfig {
    /// Quadratic profile with `σ₀` chosen so that `exp(−2∫σ) = 10⁻⁶`,
    /// i.e. `σ₀ = 3 ln(10⁶)/(2w)`.
    pub fn tuned(layout: PmlLayout) -> Self {
        PmlConfig {
            inner_radius: layout.inner_radius,
            width: layout.width,
            sigma0: 1.5 * (1.0 / ROUND_TRIP_DAMPING).ln() / layout.width,
        }
    }

    pub fn layout(&self) -> PmlLayout {
        PmlLayout {
            inner_radius: self.inner_radius,
            width: self.width,
        }
    }

    pub fn outer_radius(&self) -> f64 {
        self.inner_radius + self.width
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.inner_radius > 0.0 && self.width > 0.0 && self.sigma0 > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "PML radius {}, width {} and σ₀ {} must be positive",
                self.inner_radius, self.width, self.sigma0
            )));
        }
        Ok(())
    }

    pub fn sigma(&self, r: f64) -> f64 {
        let s = ((r - self.inner_radius) / self.width).max(0.0);
        self.sigma0 * s * s
    }

    /// `(A, b)` at `x`; the identity outside the layer.
    pub fn coefficients(&self, k: f64, x: Point) -> ([[C64; 2]; 2], C64) {
        let one = C64::new(1.0, 0.0);
        let zero = C64::new(0.0, 0.0);
        let r = x.norm();
        if r <= self.inner_radius {
            return ([[one, zero], [zero, one]], one);
        }
        let s = (r - self.inner_radius) / self.width;
        let integral = self.sigma0 * self.width * s * s * s / 3.0;
        let rt = C64::new(r, integral / k);
        let gamma = C64::new(1.0, self.sigma(r) / k);
        let arr = rt / (r * gamma);
        let att = r * gamma / rt;
        let (c, sn) = (x.x / r, x.y / r);
        let a = [
            [arr * c * c + att * sn * sn, (arr - att) * c * sn],
            [(arr - att) * c * sn, arr * sn * sn + att * c * c],
        ];
        (a, rt * gamma / r)
    }
}

/// Dirichlet data `e^{ik x·a}` on the obstacle, zero on the outer circle
/// of the layer.
pub fn assemble_pml(scene: &Scene, k: f64, config: PmlConfig, a: Point, mesh: Arc<Mesh>) -> Result<LinearSystem> {
    config.validate()?;
    if !(k > 0.0) {
        return Err(Error::InvalidParameter(format!("wavenumber k = {k} must be positive")));
    }
    if (a.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidParameter("incident direction is not a unit vector".into()));
    }
    check_mesh_against_curve(&mesh, BoundaryTag::GammaD, &scene.obstacle.curve(), "obstacle")?;
    let outer = Curve::Circle {
        center: Point::ORIGIN,
        radius: config.outer_radius(),
    };
    check_mesh_against_curve(&mesh, BoundaryTag::GammaOuter, &outer, "outer PML circle")?;
    let mut fixed: Vec<(usize, C64)> = mesh
        .nodes_on(BoundaryTag::GammaD)
        .into_iter()
        .map(|n| (n, plane_wave(k, a, mesh.nodes()[n])))
        .collect();
    fixed.extend(mesh.nodes_on(BoundaryTag::GammaOuter).into_iter().map(|n| (n, C64::new(0.0, 0.0))));
    let metadata = SolveMetadata {
        method: "pml".into(),
        k,
        direction: a,
        order: mesh.order().degree(),
        sigma0: Some(config.sigma0),
        pml: Some(config.layout()),
        ..SolveMetadata::default()
    };
    let coefficients = move |x: Point| (x.norm() > config.inner_radius).then(|| config.coefficients(k, x));
    assemble_volume_system(mesh, k, &fixed, &coefficients, metadata)
}

pub fn solve_pml(scene: &Scene, k: f64, config: PmlConfig, a: Point, mesh: Arc<Mesh>) -> Result<FieldSolution> {
    solve(assemble_pml(scene, k, config, a, mesh)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coefficients_are_identity_inside() {
        let cfg = PmlConfig::tuned(PmlLayout {
            inner_radius: 2.0,
            width: 0.5,
        });
        for &x in &[Point::new(0.3, 1.2), Point::new(-1.99, 0.0), Point::new(1.4, -1.4)] {
            let (a, b) = cfg.coefficients(10.0, x);
            assert_eq!(b, C64::new(1.0, 0.0));
            assert!((a[0][0] - 1.0).norm() < 1e-15 && a[0][1].norm() < 1e-15);
        }
    }

    #[test]
    fn radial_plane_wave_is_damped() {
        // The stretched outgoing wave e^{ik r̃} decays by exp(−∫σ) across the layer.
        let cfg = PmlConfig::tuned(PmlLayout {
            inner_radius: 2.0,
            width: 0.5,
        });
        let integral = cfg.sigma0 * cfg.width / 3.0;
        assert!(((-2.0 * integral).exp() - ROUND_TRIP_DAMPING).abs() < 1e-15);
    }
}
