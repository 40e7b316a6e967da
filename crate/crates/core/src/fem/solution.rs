use super::element::ReferenceElement;
use super::{assemble, solve, AbcProblem, BoundaryData, DofLayout};
use crate::error::{Error, Result};
use crate::geometry::{PmlLayout, Point};
use crate::meshing::Mesh;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::Serialize;
use std::fmt::Write;
use std::sync::Arc;

/// Provenance of a computed field.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct SolveMetadata {
    /// `"abc"` or `"pml"`.
    pub method: String,
    pub abc: Option<(usize, usize)>,
    pub k: f64,
    pub direction: Point,
    pub order: u32,
    pub dofs: usize,
    pub h: f64,
    pub assembly_seconds: f64,
    pub solve_seconds: f64,
    pub residual: f64,
    pub sigma0: Option<f64>,
    pub pml: Option<PmlLayout>,
}

/// Nodal finite-element field on a mesh.
#[derive(Debug, Clone)]
pub struct FieldSolution {
    pub mesh: Arc<Mesh>,
    pub values: Vec<C64>,
    /// Nodes carrying the auxiliary boundary field and its values.
    pub lambda: Option<(Vec<usize>, Vec<C64>)>,
    pub metadata: SolveMetadata,
}

impl FieldSolution {
    pub(crate) fn from_dofs(mesh: Arc<Mesh>, layout: &DofLayout, x: &[C64], metadata: SolveMetadata) -> Self {
        let values = layout
            .node_dof
            .iter()
            .zip(&layout.fixed_values)
            .map(|(d, g)| d.map_or(*g, |d| x[d]))
            .collect();
        let lambda = (!layout.lambda_nodes.is_empty()).then(|| {
            (
                layout.lambda_nodes.clone(),
                (0..layout.lambda_nodes.len()).map(|i| x[layout.n_volume + i]).collect(),
            )
        });
        FieldSolution {
            mesh,
            values,
            lambda,
            metadata,
        }
    }

    /// Restriction to a submesh; `node_map[i]` is the parent node of
    /// submesh node `i`.
    pub fn restrict(&self, submesh: Arc<Mesh>, node_map: &[usize]) -> Result<FieldSolution> {
        if node_map.len() != submesh.num_nodes() || node_map.iter().any(|&n| n >= self.values.len()) {
            return Err(Error::MeshMismatch("node map does not match the submesh".into()));
        }
        Ok(FieldSolution {
            mesh: submesh,
            values: node_map.iter().map(|&n| self.values[n]).collect(),
            lambda: None,
            metadata: self.metadata.clone(),
        })
    }

    /// CSV with header `node_id,x,y,re,im`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("node_id,x,y,re,im\n");
        for (i, (p, v)) in self.mesh.nodes().iter().zip(&self.values).enumerate() {
            writeln!(out, "{i},{},{},{},{}", p.x, p.y, v.re, v.im).unwrap();
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum ErrorRegion {
    All,
    Ball { center: Point, radius: f64 },
}

impl ErrorRegion {
    fn contains(&self, p: Point) -> bool {
        match *self {
            ErrorRegion::All => true,
            ErrorRegion::Ball { center, radius } => p.dist(center) < radius,
        }
    }
}

/// `‖u‖_{L²(region)}` by element quadrature; quadrature points outside the
/// region are dropped.
pub fn l2_norm(mesh: &Mesh, values: &[C64], region: ErrorRegion) -> f64 {
    l2_impl(mesh, values, None, region)
}

/// `‖u − exact‖_{L²(region)}` with `exact` evaluated at quadrature points.
pub fn l2_error_against(
    mesh: &Mesh,
    values: &[C64],
    exact: &(dyn Fn(Point) -> C64 + Sync),
    region: ErrorRegion,
) -> f64 {
    l2_impl(mesh, values, Some(exact), region)
}

fn l2_impl(
    mesh: &Mesh,
    values: &[C64],
    exact: Option<&(dyn Fn(Point) -> C64 + Sync)>,
    region: ErrorRegion,
) -> f64 {
    let reference = ReferenceElement::new(mesh.order());
    let parts: Vec<f64> = (0..mesh.num_elements())
        .into_par_iter()
        .chunks(4096)
        .map(|elements| {
            let mut sum = 0.0;
            for e in elements {
                let nodes = mesh.element(e);
                let x: Vec<Point> = nodes.iter().map(|&n| mesh.nodes()[n]).collect();
                if let ErrorRegion::Ball { center, radius } = region {
                    if x.iter().all(|p| p.dist(center) >= radius + mesh.h_target()) {
                        continue;
                    }
                }
                let quad = reference.evaluate(&x);
                for q in 0..quad.points.len() {
                    if !region.contains(quad.points[q]) {
                        continue;
                    }
                    let mut u: C64 = nodes.iter().zip(&quad.values[q]).map(|(&n, phi)| values[n] * phi).sum();
                    if let Some(f) = exact {
                        u -= f(quad.points[q]);
                    }
                    sum += quad.weights[q] * u.norm_sqr();
                }
            }
            sum
        })
        .collect();
    parts.iter().sum::<f64>().sqrt()
}

/// `‖u_ref − v‖ / ‖u_ref‖` in `L²(region ∩ Ω)`.
pub fn relative_error(u_ref: &FieldSolution, v: &FieldSolution, region: ErrorRegion) -> Result<f64> {
    if !Arc::ptr_eq(&u_ref.mesh, &v.mesh) && u_ref.mesh != v.mesh {
        return Err(Error::MeshMismatch(
            "relative error needs both fields on the same mesh".into(),
        ));
    }
    let diff: Vec<C64> = u_ref.values.iter().zip(&v.values).map(|(a, b)| a - b).collect();
    let denom = l2_norm(&u_ref.mesh, &u_ref.values, region);
    if !(denom > 0.0) {
        return Err(Error::InvalidParameter("reference field vanishes on the region".into()));
    }
    Ok(l2_norm(&u_ref.mesh, &diff, region) / denom)
}

/// Solves the problem with data for which the plane wave `e^{ik x·a}` is
/// the exact solution.
pub fn manufactured_plane_wave(problem: &AbcProblem, mesh: Arc<Mesh>) -> Result<FieldSolution> {
    let problem = AbcProblem {
        source: None,
        dirichlet: None,
        boundary_data: BoundaryData::PlaneWave {
            direction: problem.direction,
        },
        ..problem.clone()
    };
    solve(assemble(&problem, mesh)?)
}
