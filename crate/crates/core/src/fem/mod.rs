//! Finite-element discretisation of the truncated scattering problem.
//!
//! Higher-order absorbing conditions are imposed through an auxiliary
//! boundary field `λ ≈ k⁻¹∂ₙv` on the truncation boundary. Tangential
//! operators `c(−k⁻²Δ_Γ)` are realised weakly with first arclength
//! derivatives, so only conditions with `M, N ≤ 1` are supported here.
//! Conditions with `N = 0` are assembled with `λ` eliminated.
//!
//! The sign convention is `(Δ + k²)v = f` in the domain, so the volume rows
//! read `∫∇v·∇w − k²∫vw − k∫λw = −∫fw`. All pairings are bilinear (no
//! conjugation); basis functions are real.

mod assembly;
pub mod element;
mod linear;
mod solution;

pub use assembly::{
    assemble, assemble_with, AssemblyOptions, BoundaryData, DofLayout, LinearSystem, ScalarField,
    VolumeCoefficients,
};
pub(crate) use assembly::{assemble_volume_system, check_mesh_against_curve};
pub use linear::{residual_norm, solve, sparse_matvec};
pub use solution::{
    l2_error_against, l2_norm, manufactured_plane_wave, relative_error, ErrorRegion, FieldSolution, SolveMetadata,
};

use crate::error::{Error, Result};
use crate::geometry::{Point, Scene};
use crate::meshing::ElementOrder;
use crate::pade::PadeAbc;
use num_complex::Complex64 as C64;

/// The plane wave `e^{ik x·a}`.
pub fn plane_wave(k: f64, a: Point, x: Point) -> C64 {
    C64::from_polar(1.0, k * x.dot(a))
}

/// Truncated problem with a Padé-family absorbing condition on the
/// truncation boundary and Dirichlet data on the obstacle.
#[derive(Clone)]
pub struct AbcProblem {
    pub scene: Scene,
    pub k: f64,
    pub direction: Point,
    pub abc: PadeAbc,
    pub order: ElementOrder,
    /// Right-hand side `f` of `(Δ + k²)v = f`; zero when absent.
    pub source: Option<ScalarField>,
    /// Dirichlet data; the incident plane wave when absent.
    pub dirichlet: Option<ScalarField>,
    /// Data `g_I` of the absorbing condition.
    pub boundary_data: BoundaryData,
    /// Adds the `κ/2` curvature term of the impedance condition on circles,
    /// i.e. uses `k⁻¹∂ₙv = λ − κ/(2k) v`.
    pub curvature_correction: bool,
}

impl std::fmt::Debug for AbcProblem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("AbcProblem")
            .field("k", &self.k)
            .field("direction", &self.direction)
            .field("abc", &(self.abc.m(), self.abc.n()))
            .field("order", &self.order)
            .field("curvature_correction", &self.curvature_correction)
            .finish_non_exhaustive()
    }
}

impl AbcProblem {
    pub fn new(scene: Scene, k: f64, direction: Point, abc: PadeAbc, order: ElementOrder) -> Result<Self> {
        let problem = AbcProblem {
            scene,
            k,
            direction,
            abc,
            order,
            source: None,
            dirichlet: None,
            boundary_data: BoundaryData::Zero,
            curvature_correction: false,
        };
        problem.validate()?;
        Ok(problem)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.k > 0.0 && self.k.is_finite()) {
            return Err(Error::InvalidParameter(format!("wavenumber k = {} must be positive", self.k)));
        }
        if (self.direction.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "incident direction ({}, {}) is not a unit vector",
                self.direction.x, self.direction.y
            )));
        }
        if self.abc.m() > 1 || self.abc.n() > 1 {
            return Err(Error::InvalidParameter(format!(
                "the finite-element solver supports absorbing conditions with M, N <= 1; got ({}, {})",
                self.abc.m(),
                self.abc.n()
            )));
        }
        if self.curvature_correction && !self.scene.truncation.is_circle() {
            return Err(Error::InvalidParameter(
                "the curvature correction is only defined for circular truncation boundaries".into(),
            ));
        }
        self.scene.validate()
    }

    pub fn dirichlet_value(&self, x: Point) -> C64 {
        match &self.dirichlet {
            Some(g) => g(x),
            None => plane_wave(self.k, self.direction, x),
        }
    }
}
