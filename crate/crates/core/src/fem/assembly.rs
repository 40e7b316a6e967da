use super::element::{edge_quadrature, ReferenceElement};
use super::{plane_wave, AbcProblem, SolveMetadata};
use crate::error::{Error, Result};
use crate::geometry::{Curve, Point};
use crate::meshing::{BoundaryTag, Mesh, Region};
use faer::sparse::{SparseColMat, Triplet};
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use std::sync::Arc;
use std::time::Instant;

pub type ScalarField = Arc<dyn Fn(Point) -> C64 + Send + Sync>;

/// Pointwise coefficients `(A, b)` of `∫(A∇u)·∇w − k²∫b u w`; `None` means
/// `A = I`, `b = 1`.
pub type VolumeCoefficients = dyn Fn(Point) -> Option<([[C64; 2]; 2], C64)> + Sync;

/// Data `g_I` of the absorbing condition on the truncation boundary.
#[derive(Clone, Default)]
pub enum BoundaryData {
    #[default]
    Zero,
    Pointwise(ScalarField),
    /// Data for which the plane wave `e^{ik x·d}` is the exact solution,
    /// formed weakly from its analytic trace and tangential derivatives.
    PlaneWave { direction: Point },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AssemblyOptions {
    /// Keep `λ` as an unknown even when `N = 0`.
    pub force_auxiliary: bool,
    /// Remove Dirichlet nodes from the unknowns. When false, their rows are
    /// the raw operator rows (used for flux diagnostics).
    pub eliminate_dirichlet: bool,
}

impl Default for AssemblyOptions {
    fn default() -> Self {
        AssemblyOptions {
            force_auxiliary: false,
            eliminate_dirichlet: true,
        }
    }
}

/// Map between mesh nodes and unknowns. Volume unknowns come first, then
/// one auxiliary unknown per node of the truncation boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct DofLayout {
    pub node_dof: Vec<Option<usize>>,
    pub n_volume: usize,
    pub lambda_nodes: Vec<usize>,
    lambda_of_node: Vec<Option<usize>>,
    /// Prescribed values, meaningful where `node_dof` is `None`.
    pub fixed_values: Vec<C64>,
}

impl DofLayout {
    pub(crate) fn new(n_nodes: usize, fixed: &[(usize, C64)]) -> Self {
        let mut node_dof = vec![Some(0); n_nodes];
        let mut fixed_values = vec![C64::new(0.0, 0.0); n_nodes];
        for &(n, g) in fixed {
            node_dof[n] = None;
            fixed_values[n] = g;
        }
        let mut next = 0;
        for d in node_dof.iter_mut().flatten() {
            *d = next;
            next += 1;
        }
        DofLayout {
            node_dof,
            n_volume: next,
            lambda_nodes: Vec::new(),
            lambda_of_node: vec![None; n_nodes],
            fixed_values,
        }
    }

    fn add_lambda(&mut self, nodes: Vec<usize>) {
        for (i, &n) in nodes.iter().enumerate() {
            self.lambda_of_node[n] = Some(self.n_volume + i);
        }
        self.lambda_nodes = nodes;
    }

    pub fn size(&self) -> usize {
        self.n_volume + self.lambda_nodes.len()
    }

    pub fn lambda_dof(&self, node: usize) -> Option<usize> {
        self.lambda_of_node[node]
    }

    fn target(&self, node: usize) -> Target {
        match self.node_dof[node] {
            Some(d) => Target::Free(d),
            None => Target::Fixed(self.fixed_values[node]),
        }
    }
}

/// Assembled sparse system together with what is needed to rebuild a
/// nodal field from its solution.
pub struct LinearSystem {
    pub matrix: SparseColMat<usize, C64>,
    pub rhs: Vec<C64>,
    pub layout: DofLayout,
    pub mesh: Arc<Mesh>,
    pub metadata: SolveMetadata,
}

#[derive(Clone, Copy)]
enum Target {
    Free(usize),
    Fixed(C64),
}

#[derive(Default)]
pub(crate) struct Accumulator {
    triplets: Vec<Triplet<usize, usize, C64>>,
    rhs: Vec<(usize, C64)>,
}

impl Accumulator {
    /// Adds the local block `local[i][j]` (row = test `i`, column = trial
    /// `j`). Fixed rows are dropped; fixed columns move to the right-hand side.
    fn scatter(&mut self, rows: &[Target], cols: &[Target], local: impl Fn(usize, usize) -> C64) {
        for (i, r) in rows.iter().enumerate() {
            let Target::Free(r) = *r else { continue };
            for (j, c) in cols.iter().enumerate() {
                let v = local(i, j);
                if v == C64::new(0.0, 0.0) {
                    continue;
                }
                match *c {
                    Target::Free(c) => self.triplets.push(Triplet::new(r, c, v)),
                    Target::Fixed(g) => self.rhs.push((r, -v * g)),
                }
            }
        }
    }

    fn load(&mut self, rows: &[Target], local: impl Fn(usize) -> C64) {
        for (i, r) in rows.iter().enumerate() {
            if let Target::Free(r) = *r {
                self.rhs.push((r, local(i)));
            }
        }
    }

    fn append(&mut self, other: Accumulator) {
        self.triplets.extend(other.triplets);
        self.rhs.extend(other.rhs);
    }

    pub(crate) fn finish(self, n: usize) -> Result<(SparseColMat<usize, C64>, Vec<C64>)> {
        let matrix = SparseColMat::try_new_from_triplets(n, n, &self.triplets)
            .map_err(|e| Error::Solver(format!("sparse matrix construction failed: {e:?}")))?;
        let mut rhs = vec![C64::new(0.0, 0.0); n];
        for (i, v) in self.rhs {
            rhs[i] += v;
        }
        Ok((matrix, rhs))
    }
}

/// Volume terms `∫(A∇v)·∇w − k²∫b v w` and the load `−∫f w`.
pub(crate) fn assemble_volume(
    mesh: &Mesh,
    layout: &DofLayout,
    k: f64,
    coefficients: &VolumeCoefficients,
    source: Option<&ScalarField>,
) -> Accumulator {
    let reference = ReferenceElement::new(mesh.order());
    let k2 = k * k;
    let chunks: Vec<Accumulator> = (0..mesh.num_elements())
        .into_par_iter()
        .chunks(2048)
        .map(|elements| {
            let mut acc = Accumulator::default();
            let npe = mesh.order().nodes_per_element();
            let mut local = vec![C64::new(0.0, 0.0); npe * npe];
            let mut load = vec![C64::new(0.0, 0.0); npe];
            for e in elements {
                let nodes = mesh.element(e);
                let x: Vec<Point> = nodes.iter().map(|&n| mesh.nodes()[n]).collect();
                let quad = reference.evaluate(&x);
                local.iter_mut().for_each(|v| *v = C64::new(0.0, 0.0));
                load.iter_mut().for_each(|v| *v = C64::new(0.0, 0.0));
                for q in 0..quad.points.len() {
                    let w = quad.weights[q];
                    let (g, phi) = (&quad.grads[q], &quad.values[q]);
                    match coefficients(quad.points[q]) {
                        None => {
                            for i in 0..npe {
                                for j in 0..npe {
                                    local[i * npe + j] +=
                                        w * (g[i].dot(g[j]) - k2 * phi[i] * phi[j]);
                                }
                            }
                        }
                        Some((a, b)) => {
                            for i in 0..npe {
                                for j in 0..npe {
                                    let ag = [
                                        a[0][0] * g[j].x + a[0][1] * g[j].y,
                                        a[1][0] * g[j].x + a[1][1] * g[j].y,
                                    ];
                                    local[i * npe + j] += w
                                        * (ag[0] * g[i].x + ag[1] * g[i].y
                                            - k2 * b * phi[i] * phi[j]);
                                }
                            }
                        }
                    }
                    if let Some(f) = source {
                        let fx = f(quad.points[q]);
                        for i in 0..npe {
                            load[i] -= w * fx * phi[i];
                        }
                    }
                }
                let targets: Vec<Target> = nodes.iter().map(|&n| layout.target(n)).collect();
                acc.scatter(&targets, &targets, |i, j| local[i * npe + j]);
                if source.is_some() {
                    acc.load(&targets, |i| load[i]);
                }
            }
            acc
        })
        .collect();
    let mut acc = Accumulator::default();
    for c in chunks {
        acc.append(c);
    }
    acc
}

/// Checks that the nodes tagged `tag` lie on `curve`.
pub(crate) fn check_mesh_against_curve(mesh: &Mesh, tag: BoundaryTag, curve: &Curve, what: &str) -> Result<()> {
    let nodes = mesh.nodes_on(tag);
    if nodes.is_empty() {
        return Err(Error::MeshMismatch(format!("mesh has no {} edges", tag.name())));
    }
    let tol = 1e-6 * curve.max_radius().max(1.0);
    for n in nodes {
        let p = mesh.nodes()[n];
        let d = curve.closest(p).1;
        if d > tol {
            return Err(Error::MeshMismatch(format!(
                "{} node {n} at ({:.6}, {:.6}) is {d:.2e} away from the {what}",
                tag.name(),
                p.x,
                p.y
            )));
        }
    }
    Ok(())
}

fn boundary_nodes(edge: &crate::meshing::BoundaryEdge) -> Vec<usize> {
    let mut v = vec![edge.nodes[0], edge.nodes[1]];
    v.extend(edge.mid);
    v
}

pub fn assemble(problem: &AbcProblem, mesh: Arc<Mesh>) -> Result<LinearSystem> {
    assemble_with(problem, mesh, AssemblyOptions::default())
}

pub fn assemble_with(problem: &AbcProblem, mesh: Arc<Mesh>, options: AssemblyOptions) -> Result<LinearSystem> {
    problem.validate()?;
    let start = Instant::now();
    if mesh.order() != problem.order {
        return Err(Error::MeshMismatch(format!(
            "mesh has order P{} but the problem asks for P{}",
            mesh.order().degree(),
            problem.order.degree()
        )));
    }
    if mesh.regions().iter().any(|&r| r != Region::Interior) {
        return Err(Error::MeshMismatch(
            "absorbing-condition problems need a mesh of the computational domain only \
             (restrict PML meshes to the interior region first)"
                .into(),
        ));
    }
    let truncation = problem.scene.truncation.curve();
    check_mesh_against_curve(&mesh, BoundaryTag::GammaD, &problem.scene.obstacle.curve(), "obstacle")?;
    check_mesh_against_curve(&mesh, BoundaryTag::GammaTr, &truncation, "truncation boundary")?;
    if mesh.boundary_with(BoundaryTag::GammaOuter).next().is_some() {
        return Err(Error::MeshMismatch("absorbing-condition mesh carries GammaOuter edges".into()));
    }

    let fixed: Vec<(usize, C64)> = if options.eliminate_dirichlet {
        mesh.nodes_on(BoundaryTag::GammaD)
            .into_iter()
            .map(|n| (n, problem.dirichlet_value(mesh.nodes()[n])))
            .collect()
    } else {
        Vec::new()
    };
    let mut layout = DofLayout::new(mesh.num_nodes(), &fixed);
    let auxiliary = options.force_auxiliary || problem.abc.n() >= 1;
    if auxiliary {
        layout.add_lambda(mesh.nodes_on(BoundaryTag::GammaTr));
    }

    let k = problem.k;
    let mut acc = assemble_volume(&mesh, &layout, k, &|_| None, problem.source.as_ref());

    let (p, q) = (problem.abc.p(), problem.abc.q());
    let (p0, p1) = (p[0], p.get(1).copied().unwrap_or(0.0));
    let (q0, q1) = (q[0], q.get(1).copied().unwrap_or(0.0));
    let kinv2 = 1.0 / (k * k);
    let i = C64::new(0.0, 1.0);
    let need_curvature = problem.curvature_correction || matches!(problem.boundary_data, BoundaryData::PlaneWave { .. });

    for edge in mesh.boundary_with(BoundaryTag::GammaTr) {
        let nodes = boundary_nodes(edge);
        let nb = nodes.len();
        let x: Vec<Point> = nodes.iter().map(|&n| mesh.nodes()[n]).collect();
        let quad = edge_quadrature(mesh.order(), &x);
        let mut mass = vec![0.0; nb * nb];
        let mut stiff = vec![0.0; nb * nb];
        let mut mass_kappa = vec![0.0; nb * nb];
        let mut data = vec![C64::new(0.0, 0.0); nb];
        for qp in 0..quad.points.len() {
            let (w, phi, ds) = (quad.weights[qp], &quad.values[qp], &quad.ds[qp]);
            let kappa = if need_curvature {
                truncation.curvature(truncation.closest(quad.points[qp]).0)
            } else {
                0.0
            };
            for a in 0..nb {
                for b in 0..nb {
                    mass[a * nb + b] += w * phi[a] * phi[b];
                    stiff[a * nb + b] += w * ds[a] * ds[b];
                    mass_kappa[a * nb + b] += w * kappa * phi[a] * phi[b];
                }
            }
            match &problem.boundary_data {
                BoundaryData::Zero => {}
                BoundaryData::Pointwise(g) => {
                    let gx = g(quad.points[qp]);
                    for a in 0..nb {
                        data[a] += w * gx * phi[a];
                    }
                }
                BoundaryData::PlaneWave { direction: d } => {
                    let tau = quad.tangents[qp];
                    let n = tau.perp_cw();
                    let (dt, dn) = (d.dot(tau), d.dot(n));
                    let u = plane_wave(k, *d, quad.points[qp]);
                    let du = i * k * dt * u;
                    let mut lam = i * dn * u;
                    let mut dlam = i * (kappa * dt * u + dn * du);
                    if problem.curvature_correction {
                        lam += kappa / (2.0 * k) * u;
                        dlam += kappa / (2.0 * k) * du;
                    }
                    for a in 0..nb {
                        data[a] += w
                            * (q0 * lam * phi[a] + q1 * kinv2 * dlam * ds[a]
                                - i * (p0 * u * phi[a] + p1 * kinv2 * du * ds[a]));
                    }
                }
            }
        }
        let vol: Vec<Target> = nodes.iter().map(|&n| layout.target(n)).collect();
        let bp = |a: usize, b: usize| p0 * mass[a * nb + b] + p1 * kinv2 * stiff[a * nb + b];
        if problem.curvature_correction {
            acc.scatter(&vol, &vol, |a, b| C64::from(0.5 * mass_kappa[a * nb + b]));
        }
        if auxiliary {
            let lam: Vec<Target> = nodes
                .iter()
                .map(|&n| Target::Free(layout.lambda_dof(n).expect("truncation node has λ")))
                .collect();
            acc.scatter(&vol, &lam, |a, b| C64::from(-k * mass[a * nb + b]));
            acc.scatter(&lam, &lam, |a, b| {
                C64::from(q0 * mass[a * nb + b] + q1 * kinv2 * stiff[a * nb + b])
            });
            acc.scatter(&lam, &vol, |a, b| -i * bp(a, b));
            acc.load(&lam, |a| data[a]);
        } else {
            acc.scatter(&vol, &vol, |a, b| -i * k * bp(a, b));
            acc.load(&vol, |a| k * data[a]);
        }
    }

    let (matrix, rhs) = acc.finish(layout.size())?;
    let metadata = SolveMetadata {
        method: "abc".into(),
        abc: Some((problem.abc.m(), problem.abc.n())),
        k,
        direction: problem.direction,
        order: problem.order.degree(),
        dofs: layout.size(),
        h: mesh.h_target(),
        assembly_seconds: start.elapsed().as_secs_f64(),
        ..SolveMetadata::default()
    };
    Ok(LinearSystem {
        matrix,
        rhs,
        layout,
        mesh,
        metadata,
    })
}

/// Volume-only system with the given Dirichlet nodes, used by the PML.
pub(crate) fn assemble_volume_system(
    mesh: Arc<Mesh>,
    k: f64,
    fixed: &[(usize, C64)],
    coefficients: &VolumeCoefficients,
    metadata: SolveMetadata,
) -> Result<LinearSystem> {
    let start = Instant::now();
    let layout = DofLayout::new(mesh.num_nodes(), fixed);
    let acc = assemble_volume(&mesh, &layout, k, coefficients, None);
    let (matrix, rhs) = acc.finish(layout.size())?;
    let metadata = SolveMetadata {
        dofs: layout.size(),
        h: mesh.h_target(),
        assembly_seconds: start.elapsed().as_secs_f64(),
        ..metadata
    };
    Ok(LinearSystem {
        matrix,
        rhs,
        layout,
        mesh,
        metadata,
    })
}
