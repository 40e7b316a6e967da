//! Paired absorbing-condition / PML runs and the relative error between
//! them.
//!
//! Each row meshes `Ω_R` together with the PML annulus, solves the PML
//! problem on the whole mesh and the absorbing-condition problem on the
//! `Ω_R` part, and compares the two nodal fields on that shared submesh.

mod emit;

pub use emit::{emit_csv, emit_svg, write_outputs, CSV_HEADER};

use crate::error::{Error, Result};
use crate::fem::{assemble, relative_error, solve, AbcProblem, ErrorRegion};
use crate::geometry::{direction, preset_butterfly, ObstacleShape, PmlLayout, Point, Scene, TruncationShape};
use crate::meshing::{generate_mesh_with, mesh_size, ElementOrder, MeshOptions, Region};
use crate::pade::{compute_pade, PadeAbc};
use crate::pml::{solve_pml, PmlConfig};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::{Arc, Mutex};
use std::time::Instant;

/// Default mesh constant `C` in `h = C k^{−1−1/(2p)}`.
pub const DEFAULT_MESH_CONSTANT: f64 = 2.0 * PI / 5.0;
/// Largest number of degrees of freedom of the PML system a row may use.
pub const DEFAULT_DOF_CAP: usize = 350_000;
/// Largest factor by which a row may coarsen `C` to respect the cap.
pub const DEFAULT_MAX_COARSENING: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TableId {
    /// Unit disc inside a circle of radius `R`.
    Ball,
    /// Butterfly obstacle inside the circle of radius `R`.
    Butterfly,
    /// Unit disc inside the square `[−R, R]²`.
    SquareFixedR,
    /// Unit disc at `k = 10` inside growing squares `[−R, R]²`.
    SquareGrowR,
    /// User-supplied obstacle and truncation kind.
    Custom,
}

impl TableId {
    pub fn name(self) -> &'static str {
        match self {
            TableId::Ball => "ball",
            TableId::Butterfly => "butterfly",
            TableId::SquareFixedR => "square_fixedR",
            TableId::SquareGrowR => "square_growR",
            TableId::Custom => "custom",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        [
            TableId::Ball,
            TableId::Butterfly,
            TableId::SquareFixedR,
            TableId::SquareGrowR,
            TableId::Custom,
        ]
        .into_iter()
        .find(|t| t.name().eq_ignore_ascii_case(s))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RowSpec {
    pub k: f64,
    #[serde(rename = "R")]
    pub r: f64,
}

/// Obstacle and truncation family of a custom table; `R` comes from the rows.
#[derive(Debug, Clone, PartialEq)]
pub struct CustomGeometry {
    pub obstacle: ObstacleShape,
    pub square: bool,
}

#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub table: TableId,
    pub rows: Vec<RowSpec>,
    pub abc: PadeAbc,
    /// Incident angles in radians; `a = (cos, sin)`.
    pub angles: Vec<f64>,
    pub mesh_constant: f64,
    pub order: u32,
    pub dof_cap: usize,
    pub max_coarsening: f64,
    pub workers: usize,
    pub custom: Option<CustomGeometry>,
}

impl ExperimentSpec {
    /// The preset rows of a table with `k ≤ kmax`.
    pub fn preset(table: TableId, kmax: f64) -> Result<Self> {
        let grid = |ks: &[f64], rs: &[f64]| -> Vec<RowSpec> {
            ks.iter()
                .filter(|&&k| k <= kmax)
                .flat_map(|&k| rs.iter().map(move |&r| RowSpec { k, r }))
                .collect()
        };
        let (rows, angles) = match table {
            TableId::Ball => (grid(&[20.0, 40.0], &[2.0, 4.0]), vec![0.0]),
            TableId::Butterfly => (grid(&[20.0, 40.0], &[2.0]), vec![7.0 * PI / 16.0, PI / 16.0]),
            TableId::SquareFixedR => (grid(&[20.0, 40.0], &[2.0, 4.0]), vec![PI / 8.0]),
            TableId::SquareGrowR => (grid(&[10.0], &[2.0, 4.0, 8.0]), vec![PI / 8.0]),
            TableId::Custom => {
                return Err(Error::Config("custom tables are read from a spec file".into()));
            }
        };
        Ok(ExperimentSpec {
            table,
            rows,
            abc: PadeAbc::impedance(),
            angles,
            mesh_constant: DEFAULT_MESH_CONSTANT,
            order: 2,
            dof_cap: DEFAULT_DOF_CAP,
            max_coarsening: DEFAULT_MAX_COARSENING,
            workers: 1,
            custom: None,
        })
    }

    /// Parses a TOML spec file (see [`SpecFile`]).
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let file: SpecFile = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        file.into_spec()
    }

    pub fn validate(&self) -> Result<()> {
        if self.rows.is_empty() {
            return Err(Error::Config("experiment has no rows".into()));
        }
        if self.angles.is_empty() {
            return Err(Error::Config("experiment has no incident angles".into()));
        }
        if !(self.mesh_constant > 0.0) || !(self.max_coarsening >= 1.0) || self.dof_cap == 0 || self.workers == 0 {
            return Err(Error::Config(
                "mesh_constant, dof_cap and workers must be positive and max_coarsening at least 1".into(),
            ));
        }
        ElementOrder::from_degree(self.order)?;
        if self.table == TableId::Custom && self.custom.is_none() {
            return Err(Error::Config("custom tables need an obstacle and truncation kind".into()));
        }
        for row in &self.rows {
            if !(row.k > 0.0 && row.r > 0.0) {
                return Err(Error::Config(format!("row k = {}, R = {} must be positive", row.k, row.r)));
            }
        }
        Ok(())
    }

    /// Scene of one row, PML annulus included.
    pub fn scene(&self, r: f64) -> Result<Scene> {
        let disc = ObstacleShape::Disc {
            center: Point::ORIGIN,
            radius: 1.0,
        };
        let circle = |obstacle| {
            Scene::new(
                obstacle,
                TruncationShape::Circle { radius: r },
                Some(PmlLayout {
                    inner_radius: r,
                    width: 0.5,
                }),
            )
        };
        // Square truncations keep a radial PML at 3R/2, clear of the corners.
        let square = |obstacle, width| {
            Scene::new(
                obstacle,
                TruncationShape::Square {
                    half_side: r,
                    corner_radius: 0.0,
                },
                Some(PmlLayout {
                    inner_radius: 1.5 * r,
                    width,
                }),
            )
        };
        match self.table {
            TableId::Ball => circle(disc),
            TableId::Butterfly => circle(preset_butterfly()),
            TableId::SquareFixedR => square(disc, 0.5),
            TableId::SquareGrowR => square(disc, 0.5 * r),
            TableId::Custom => {
                let c = self.custom.as_ref().expect("validated");
                if c.square {
                    square(c.obstacle.clone(), 0.5)
                } else {
                    circle(c.obstacle.clone())
                }
            }
        }
    }
}

/// On-disk form of an [`ExperimentSpec`].
///
/// ```toml
/// table = "custom"
/// rows = [{ k = 20.0, R = 2.0 }, { k = 20.0, R = 4.0 }]
/// abc = [0, 0]
/// angles_deg = [0.0]
/// [geometry]
/// truncation = "circle"
/// [geometry.obstacle]
/// kind = "disc"
/// params = { radius = 1.0 }
/// ```
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    table: String,
    rows: Option<Vec<RowSpec>>,
    kmax: Option<f64>,
    abc: Option<[usize; 2]>,
    angles_deg: Option<Vec<f64>>,
    mesh_constant: Option<f64>,
    order: Option<u32>,
    dof_cap: Option<usize>,
    max_coarsening: Option<f64>,
    workers: Option<usize>,
    geometry: Option<GeometryFile>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GeometryFile {
    truncation: String,
    obstacle: toml::Table,
}

impl SpecFile {
    fn into_spec(self) -> Result<ExperimentSpec> {
        let table = TableId::from_name(&self.table)
            .ok_or_else(|| Error::Config(format!("unknown table \"{}\"", self.table)))?;
        let mut spec = if table == TableId::Custom {
            ExperimentSpec {
                table,
                rows: Vec::new(),
                abc: PadeAbc::impedance(),
                angles: vec![0.0],
                mesh_constant: DEFAULT_MESH_CONSTANT,
                order: 2,
                dof_cap: DEFAULT_DOF_CAP,
                max_coarsening: DEFAULT_MAX_COARSENING,
                workers: 1,
                custom: None,
            }
        } else {
            ExperimentSpec::preset(table, self.kmax.unwrap_or(f64::INFINITY))?
        };
        if let Some(rows) = self.rows {
            spec.rows = rows
                .into_iter()
                .filter(|r| self.kmax.is_none_or(|kmax| r.k <= kmax))
                .collect();
        }
        if let Some([m, n]) = self.abc {
            spec.abc = compute_pade(m, n)?;
        }
        if let Some(angles) = self.angles_deg {
            spec.angles = angles.iter().map(|d| d.to_radians()).collect();
        }
        spec.mesh_constant = self.mesh_constant.unwrap_or(spec.mesh_constant);
        spec.order = self.order.unwrap_or(spec.order);
        spec.dof_cap = self.dof_cap.unwrap_or(spec.dof_cap);
        spec.max_coarsening = self.max_coarsening.unwrap_or(spec.max_coarsening);
        spec.workers = self.workers.unwrap_or(spec.workers);
        if let Some(g) = self.geometry {
            let square = match g.truncation.as_str() {
                "circle" => false,
                "square" => true,
                other => return Err(Error::Config(format!("unknown truncation \"{other}\""))),
            };
            // Reuse the scene reader for the obstacle table.
            let mut doc = toml::Table::new();
            doc.insert("obstacle".into(), toml::Value::Table(g.obstacle));
            let mut tr = toml::Table::new();
            tr.insert("kind".into(), "circle".into());
            tr.insert("R".into(), toml::Value::Float(1e6));
            doc.insert("truncation".into(), toml::Value::Table(tr));
            let scene = Scene::from_toml_str(&doc.to_string())?;
            spec.custom = Some(CustomGeometry {
                obstacle: scene.obstacle,
                square,
            });
        }
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentRow {
    pub k: f64,
    #[serde(rename = "R")]
    pub r: f64,
    /// Incident angle in radians.
    pub angle: f64,
    pub rel_error_global: Option<f64>,
    /// Relative error on `B(0, 2) ∖ Ω₋`.
    pub rel_error_local: Option<f64>,
    pub dofs_abc: usize,
    pub dofs_pml: usize,
    pub sigma0: f64,
    /// Mesh constant actually used (coarsened to respect the dof cap).
    pub mesh_constant: f64,
    pub h: f64,
    pub mesh_seconds: f64,
    pub pml_seconds: f64,
    pub abc_seconds: f64,
    /// Empty on success.
    pub error: String,
}

impl ExperimentRow {
    pub fn ok(&self) -> bool {
        self.error.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentResult {
    pub table: TableId,
    pub abc: (usize, usize),
    pub order: u32,
    pub rows: Vec<ExperimentRow>,
}

/// Rough P2/P1 node count of the PML mesh at size `h`.
pub fn estimated_dofs(scene: &Scene, h: f64, order: u32) -> f64 {
    let outer = scene.pml.map_or(scene.truncation.max_radius(), |p| p.outer_radius());
    let curve = scene.obstacle.curve();
    let pts: Vec<Point> = curve.resample(curve.length() / 512.0).into_iter().map(|s| curve.point(s)).collect();
    let obstacle_area = 0.5
        * (0..pts.len())
            .map(|i| pts[i].cross(pts[(i + 1) % pts.len()]))
            .sum::<f64>()
            .abs();
    let area = PI * outer * outer - obstacle_area;
    let spacing = MeshOptions::default().spacing_factor * h;
    let vertices = area / (0.5 * 3f64.sqrt() * spacing * spacing);
    vertices * if order == 2 { 4.0 } else { 1.0 }
}

/// Runs every `(row, angle)` pair; failures are recorded in the row and do
/// not stop the others. Rows come back in spec order.
pub fn run(spec: &ExperimentSpec) -> Result<ExperimentResult> {
    spec.validate()?;
    let jobs: Vec<(RowSpec, f64)> = spec
        .rows
        .iter()
        .flat_map(|&row| spec.angles.iter().map(move |&a| (row, a)))
        .collect();
    let results: Mutex<Vec<Option<ExperimentRow>>> = Mutex::new(vec![None; jobs.len()]);
    let next = Mutex::new(0usize);
    std::thread::scope(|scope| {
        for _ in 0..spec.workers.min(jobs.len()) {
            scope.spawn(|| loop {
                let i = {
                    let mut n = next.lock().unwrap();
                    let i = *n;
                    *n += 1;
                    i
                };
                let Some(&(row, angle)) = jobs.get(i) else { break };
                let out = run_row(spec, row, angle);
                results.lock().unwrap()[i] = Some(out);
            });
        }
    });
    Ok(ExperimentResult {
        table: spec.table,
        abc: (spec.abc.m(), spec.abc.n()),
        order: spec.order,
        rows: results.into_inner().unwrap().into_iter().map(|r| r.expect("every job ran")).collect(),
    })
}

/// One paired solve.
pub fn run_row(spec: &ExperimentSpec, row: RowSpec, angle: f64) -> ExperimentRow {
    let mut out = ExperimentRow {
        k: row.k,
        r: row.r,
        angle,
        rel_error_global: None,
        rel_error_local: None,
        dofs_abc: 0,
        dofs_pml: 0,
        sigma0: 0.0,
        mesh_constant: spec.mesh_constant,
        h: 0.0,
        mesh_seconds: 0.0,
        pml_seconds: 0.0,
        abc_seconds: 0.0,
        error: String::new(),
    };
    if let Err(e) = run_row_inner(spec, row, angle, &mut out) {
        out.error = format!("{}: {e}", e.tag());
    }
    out
}

fn run_row_inner(spec: &ExperimentSpec, row: RowSpec, angle: f64, out: &mut ExperimentRow) -> Result<()> {
    let scene = spec.scene(row.r)?;
    let order = ElementOrder::from_degree(spec.order)?;
    let a = direction(angle);
    let t0 = Instant::now();
    let mut c = spec.mesh_constant;
    let estimate = estimated_dofs(&scene, mesh_size(row.k, c, spec.order), spec.order);
    if estimate > spec.dof_cap as f64 {
        c *= (estimate / spec.dof_cap as f64).sqrt();
    }
    let mut mesh = None;
    for _ in 0..3 {
        check_coarsening(spec, c)?;
        let m = generate_mesh_with(&scene, mesh_size(row.k, c, spec.order), order, true, MeshOptions::default())?;
        if m.num_nodes() <= spec.dof_cap {
            mesh = Some(m);
            break;
        }
        c *= (m.num_nodes() as f64 / spec.dof_cap as f64).sqrt() * 1.01;
    }
    let mesh = Arc::new(mesh.ok_or_else(|| {
        Error::Mesh(format!("could not meet the cap of {} degrees of freedom", spec.dof_cap))
    })?);
    out.mesh_constant = c;
    out.h = mesh.h_target();
    out.mesh_seconds = t0.elapsed().as_secs_f64();

    let config = PmlConfig::tuned(scene.pml.expect("experiment scenes carry a PML"));
    out.sigma0 = config.sigma0;
    let t1 = Instant::now();
    let pml = solve_pml(&scene, row.k, config, a, mesh.clone())?;
    out.dofs_pml = pml.metadata.dofs;
    out.pml_seconds = t1.elapsed().as_secs_f64();

    let (sub, map) = mesh.submesh(|r| r == Region::Interior);
    let sub = Arc::new(sub);
    drop(mesh);
    let reference = pml.restrict(sub.clone(), &map)?;
    drop(pml);
    let t2 = Instant::now();
    let problem = AbcProblem::new(scene, row.k, a, spec.abc.clone(), order)?;
    let v = solve(assemble(&problem, sub)?)?;
    out.dofs_abc = v.metadata.dofs;
    out.abc_seconds = t2.elapsed().as_secs_f64();
    out.rel_error_global = Some(relative_error(&reference, &v, ErrorRegion::All)?);
    out.rel_error_local = Some(relative_error(
        &reference,
        &v,
        ErrorRegion::Ball {
            center: Point::ORIGIN,
            radius: 2.0,
        },
    )?);
    Ok(())
}

fn check_coarsening(spec: &ExperimentSpec, c: f64) -> Result<()> {
    if c > spec.mesh_constant * spec.max_coarsening * (1.0 + 1e-12) {
        return Err(Error::Mesh(format!(
            "row needs mesh constant {c:.3} (more than {} × {:.3}) to stay under {} degrees of freedom",
            spec.max_coarsening, spec.mesh_constant, spec.dof_cap
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalingFit {
    pub slope: f64,
    pub intercept: f64,
}

/// Least-squares line through `(log R, log err)`; needs three distinct `R`.
pub fn scaling_fit(points: &[(f64, f64)]) -> Result<ScalingFit> {
    let mut distinct: Vec<f64> = points.iter().map(|p| p.0).collect();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() < 3 {
        return Err(Error::InvalidParameter(format!(
            "a scaling fit needs at least 3 distinct R, got {}",
            distinct.len()
        )));
    }
    if points.iter().any(|&(r, e)| !(r > 0.0 && e > 0.0)) {
        return Err(Error::InvalidParameter("scaling fit needs positive R and errors".into()));
    }
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    Ok(ScalingFit {
        slope,
        intercept: my - slope * mx,
    })
}
