use crate::manifest::{self, io_error, write_file};
use crate::params::*;
use helmholtz_abc::experiments::{self, ExperimentSpec, TableId, DEFAULT_MESH_CONSTANT};
use helmholtz_abc::fem::{assemble, l2_error_against, l2_norm, solve as fem_solve, AbcProblem, ErrorRegion};
use helmholtz_abc::geometry::{direction, ObstacleShape, Point, Scene, TruncationShape};
use helmholtz_abc::meshing::{export_mesh, BoundaryTag, generate_mesh, ElementOrder, Region};
use helmholtz_abc::pade::{admissibility_check, compute_pade, exact_strings, reflection_profile};
use helmholtz_abc::pml::{mie_disc, mie_truncation, solve_pml, PmlConfig};
use helmholtz_abc::rays::{
    direct_ray_set, emanating_ray, reentrant_energy, trace, unfold_hypercube, Ray,
};
use helmholtz_abc::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{FRAC_PI_2, TAU};
use std::fmt::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

fn required<T>(v: Option<T>, name: &str) -> Result<T, Error> {
    v.ok_or_else(|| Error::Config(format!("missing required parameter `{name}` (flag or config key)")))
}

/// Loads the scene and keeps a copy next to the outputs so the manifest
/// stays valid if the original moves.
fn load_scene(path: &Path, out_dir: &Path) -> Result<(Scene, PathBuf), Error> {
    let text = std::fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    let scene = Scene::from_toml_str(&text)?;
    std::fs::create_dir_all(out_dir).map_err(|e| io_error(out_dir, e))?;
    let copy = out_dir.join("scene.toml");
    scene.save(&copy)?;
    let copy = std::fs::canonicalize(&copy).map_err(|e| io_error(&copy, e))?;
    Ok((scene, copy))
}

pub fn pade(mut p: PadeParams) -> Result<(), Error> {
    let (m, n) = (p.m.unwrap_or(0), p.n.unwrap_or(0));
    p.m = Some(m);
    p.n = Some(n);
    let samples = *p.samples.get_or_insert(0);
    let abc = compute_pade(m, n)?;
    let report = admissibility_check(&abc);
    let mut out = String::new();
    writeln!(out, "M = {m}\nN = {n}").unwrap();
    writeln!(out, "p = [{}]", exact_strings(abc.p_exact()).join(", ")).unwrap();
    writeln!(out, "q = [{}]", exact_strings(abc.q_exact()).join(", ")).unwrap();
    writeln!(out, "m_ord = {}", abc.m_ord()).unwrap();
    let zeros: Vec<String> = abc
        .zeros()
        .iter()
        .map(|z| format!("{{ t = {}, multiplicity = {}, angle = {} }}", z.t, z.multiplicity, z.angle()))
        .collect();
    writeln!(out, "zeros = [{}]", zeros.join(", ")).unwrap();
    writeln!(out, "admissible = {}", report.passed).unwrap();
    print!("{out}");
    if let Some(dir) = p.out_dir.clone() {
        let mut outputs = vec![dir.join("pade.toml")];
        write_file(&outputs[0], &out)?;
        if samples > 0 {
            let profile = reflection_profile(&abc, samples)?;
            let mut csv = String::from("theta,alpha_ref\n");
            for (t, a) in profile.samples {
                writeln!(csv, "{t},{a}").unwrap();
            }
            outputs.push(dir.join("reflection.csv"));
            write_file(&outputs[1], &csv)?;
        }
        manifest::write(&dir, "pade", &p, &outputs)?;
    }
    Ok(())
}

pub fn mesh(mut p: MeshParams) -> Result<(), Error> {
    let dir = required(p.out_dir.clone(), "out_dir")?;
    let (scene, copy) = load_scene(&required(p.scene.clone(), "scene")?, &dir)?;
    p.scene = Some(copy);
    let k = required(p.k, "k")?;
    let c = *p.c.get_or_insert(DEFAULT_MESH_CONSTANT);
    let order = *p.p.get_or_insert(2);
    let pml = *p.pml.get_or_insert(false);
    let mesh = generate_mesh(&scene, k, c, order, pml)?;
    let path = dir.join("mesh.txt");
    write_file(&path, &export_mesh(&mesh))?;
    println!(
        "nodes = {}\nelements = {}\nh = {}\nmin_angle_deg = {:.2}\nmax_edge = {}",
        mesh.num_nodes(),
        mesh.num_elements(),
        mesh.h_target(),
        mesh.min_angle_degrees(),
        mesh.max_edge_length()
    );
    manifest::write(&dir, "mesh", &p, &[path])?;
    Ok(())
}

pub fn solve(mut p: SolveParams) -> Result<(), Error> {
    let dir = required(p.out_dir.clone(), "out_dir")?;
    let (scene, copy) = load_scene(&required(p.scene.clone(), "scene")?, &dir)?;
    p.scene = Some(copy);
    let k = required(p.k, "k")?;
    let (m, n) = (*p.m.get_or_insert(0), *p.n.get_or_insert(0));
    let angle = *p.angle_deg.get_or_insert(0.0);
    let c = *p.c.get_or_insert(DEFAULT_MESH_CONSTANT);
    let order = *p.p.get_or_insert(2);
    let curvature = *p.curvature.get_or_insert(false);
    let mesh = Arc::new(generate_mesh(&scene, k, c, order, false)?);
    let mut problem = AbcProblem::new(
        scene,
        k,
        direction(angle.to_radians()),
        compute_pade(m, n)?,
        ElementOrder::from_degree(order)?,
    )?;
    problem.curvature_correction = curvature;
    problem.validate()?;
    let sol = fem_solve(assemble(&problem, mesh)?)?;
    let path = dir.join("solution.csv");
    write_file(&path, &sol.to_csv())?;
    println!(
        "dofs = {}\nresidual = {:.3e}\nassembly_seconds = {:.3}\nsolve_seconds = {:.3}",
        sol.metadata.dofs, sol.metadata.residual, sol.metadata.assembly_seconds, sol.metadata.solve_seconds
    );
    manifest::write(&dir, "solve", &p, &[path])?;
    Ok(())
}

pub fn reference(mut p: ReferenceParams) -> Result<(), Error> {
    let dir = required(p.out_dir.clone(), "out_dir")?;
    let (scene, copy) = load_scene(&required(p.scene.clone(), "scene")?, &dir)?;
    p.scene = Some(copy);
    let k = required(p.k, "k")?;
    let angle = *p.angle_deg.get_or_insert(0.0);
    let c = *p.c.get_or_insert(DEFAULT_MESH_CONSTANT);
    let order = *p.p.get_or_insert(2);
    let layout = scene
        .pml
        .ok_or_else(|| Error::Config("the scene has no [pml] layout".into()))?;
    let mut config = PmlConfig::tuned(layout);
    config.sigma0 = *p.sigma0.get_or_insert(config.sigma0);
    let a = direction(angle.to_radians());
    let mesh = Arc::new(generate_mesh(&scene, k, c, order, true)?);
    let sol = solve_pml(&scene, k, config, a, mesh.clone())?;
    let path = dir.join("reference.csv");
    write_file(&path, &sol.to_csv())?;
    println!(
        "dofs = {}\nsigma0 = {}\nresidual = {:.3e}",
        sol.metadata.dofs, config.sigma0, sol.metadata.residual
    );
    if let ObstacleShape::Disc { center, radius } = scene.obstacle {
        if center == Point::ORIGIN {
            let (sub, map) = mesh.submesh(|r| r == Region::Interior);
            let u = sol.restrict(Arc::new(sub), &map)?;
            let exact = |x: Point| mie_disc(k, radius, a, &[x]).map(|v| v[0]).unwrap_or_default();
            let err = l2_error_against(&u.mesh, &u.values, &exact, ErrorRegion::All);
            let values: Vec<_> = u.mesh.nodes().iter().map(|&x| exact(x)).collect();
            println!("mie_relative_l2_error = {:.4e}", err / l2_norm(&u.mesh, &values, ErrorRegion::All));
        }
    }
    manifest::write(&dir, "reference", &p, &[path])?;
    Ok(())
}

pub fn mie(mut p: MieParams) -> Result<(), Error> {
    let k = required(p.k, "k")?;
    let radius = *p.radius.get_or_insert(1.0);
    let angle = *p.angle_deg.get_or_insert(0.0);
    let r_max = *p.r_max.get_or_insert(2.0 * radius);
    let n = *p.n.get_or_insert(64);
    if n < 2 || !(r_max > radius) {
        return Err(Error::InvalidParameter("need n ≥ 2 and r_max > radius".into()));
    }
    let points: Vec<Point> = (0..n)
        .flat_map(|i| {
            let r = radius + (r_max - radius) * i as f64 / (n - 1) as f64;
            (0..n).map(move |j| Point::polar(r, TAU * j as f64 / n as f64))
        })
        .collect();
    let values = mie_disc(k, radius, direction(angle.to_radians()), &points)?;
    println!("terms = {}\npoints = {}", mie_truncation(k, radius), points.len());
    if let Some(dir) = p.out_dir.clone() {
        let mut csv = String::from("x,y,re,im\n");
        for (x, v) in points.iter().zip(&values) {
            writeln!(csv, "{},{},{},{}", x.x, x.y, v.re, v.im).unwrap();
        }
        let path = dir.join("mie.csv");
        write_file(&path, &csv)?;
        manifest::write(&dir, "mie", &p, &[path])?;
    }
    Ok(())
}

fn histogram(values: &[(f64, f64)], lo: f64, hi: f64, bins: usize) -> String {
    let mut count = vec![0usize; bins];
    let mut weight = vec![0.0; bins];
    for &(v, w) in values {
        let b = (((v - lo) / (hi - lo)) * bins as f64).floor().clamp(0.0, (bins - 1) as f64) as usize;
        count[b] += 1;
        weight[b] += w;
    }
    let mut csv = String::from("bin_lo,bin_hi,count,weight_sum\n");
    for b in 0..bins {
        let a = lo + (hi - lo) * b as f64 / bins as f64;
        let z = lo + (hi - lo) * (b + 1) as f64 / bins as f64;
        writeln!(csv, "{a},{z},{},{}", count[b], weight[b]).unwrap();
    }
    csv
}

pub fn rays(mut p: RaysParams) -> Result<(), Error> {
    let dir = required(p.out_dir.clone(), "out_dir")?;
    let (scene, copy) = load_scene(&required(p.scene.clone(), "scene")?, &dir)?;
    p.scene = Some(copy);
    let abc = compute_pade(*p.m.get_or_insert(0), *p.n.get_or_insert(0))?;
    let count = *p.rays.get_or_insert(10_000);
    let mode = p.mode.get_or_insert_with(|| "angles".into()).clone();
    let a = direction(p.angle_deg.get_or_insert(0.0).to_radians());
    let seed = *p.seed.get_or_insert(0);
    let bounces = *p.bounces.get_or_insert(32);
    let bins = (*p.bins.get_or_insert(18)).max(1);
    let mut outputs = Vec::new();
    match mode.as_str() {
        "direct" => {
            let set = direct_ray_set(&scene.obstacle, &scene.truncation, a, count.max(1))?;
            let mut csv = String::from("s,x,y,dx,dy,direct\n");
            for d in &set.samples {
                writeln!(csv, "{},{},{},{},{},{}", d.s, d.ray.x.x, d.ray.x.y, d.ray.xi.x, d.ray.xi.y, d.direct).unwrap();
            }
            outputs.push(dir.join("direct.csv"));
            write_file(&outputs[0], &csv)?;
            println!(
                "direct_fraction = {}\nextremal = [{}, {}]\nextremal_direct = {}",
                set.fraction, set.extremal.ray.x.x, set.extremal.ray.x.y, set.extremal.direct
            );
        }
        "angles" => {
            // Emanating rays from uniform boundary points; every truncation hit
            // is recorded with the weight carried into it.
            let curve = scene.obstacle.curve();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut hits = Vec::new();
            let mut finals = Vec::new();
            let mut skipped = 0;
            for _ in 0..count {
                let s = rng.random_range(0.0..curve.period());
                let Ok(ray) = emanating_ray(&scene.obstacle, curve.point(s), a) else {
                    skipped += 1;
                    continue;
                };
                let path = trace(&scene, ray, &abc, bounces, f64::INFINITY)?;
                let mut before = 1.0;
                for h in path.hits.iter().filter(|h| h.boundary == BoundaryTag::GammaTr) {
                    hits.push((h.theta, before));
                    before = h.weight;
                }
                finals.push((path.weight(), 1.0));
            }
            outputs.push(dir.join("angles.csv"));
            outputs.push(dir.join("weights.csv"));
            write_file(&outputs[0], &histogram(&hits, 0.0, FRAC_PI_2, bins))?;
            write_file(&outputs[1], &histogram(&finals, 0.0, 1.0 + 1e-12, bins))?;
            let max_theta = hits.iter().map(|h| h.0).fold(0.0, f64::max);
            println!(
                "rays = {}\ntruncation_hits = {}\nmax_theta = {max_theta}\nskipped_vertices = {skipped}",
                count - skipped,
                hits.len()
            );
        }
        "unfold" => {
            let TruncationShape::Square { half_side, .. } = scene.truncation else {
                return Err(Error::Config("unfold mode needs a square truncation".into()));
            };
            let side = 2.0 * half_side;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut csv = String::from("x0,y0,dx,dy,length,x_end,y_end,dx_end,dy_end,wall_hits,degenerate\n");
            let length = bounces as f64 * side;
            for _ in 0..count {
                let x = Point::new(rng.random_range(-0.5..0.5) * side, rng.random_range(-0.5..0.5) * side);
                let ray = Ray::new(x, direction(rng.random_range(0.0..TAU)))?;
                let u = unfold_hypercube(side, ray, length)?;
                writeln!(
                    csv,
                    "{},{},{},{},{length},{},{},{},{},{},{}",
                    x.x, x.y, ray.xi.x, ray.xi.y, u.end.x.x, u.end.x.y, u.end.xi.x, u.end.xi.y, u.wall_hits, u.degenerate
                )
                .unwrap();
            }
            outputs.push(dir.join("unfold.csv"));
            write_file(&outputs[0], &csv)?;
            println!("rays = {count}\nlength = {length}");
        }
        "reentrant" => {
            let region = ErrorRegion::Ball {
                center: Point::ORIGIN,
                radius: 2.0,
            };
            let value = reentrant_energy(&scene, &abc, count, region, seed)?;
            let csv = format!("label,rays,seed,value\nHEURISTIC,{count},{seed},{value}\n");
            outputs.push(dir.join("reentrant.csv"));
            write_file(&outputs[0], &csv)?;
            println!("reentrant_energy (HEURISTIC) = {value:e}");
        }
        other => {
            return Err(Error::Config(format!(
                "unknown rays mode \"{other}\" (expected direct, angles, unfold or reentrant)"
            )))
        }
    }
    manifest::write(&dir, "rays", &p, &outputs)?;
    Ok(())
}

pub fn experiment(mut p: ExperimentParams) -> Result<(), Error> {
    let dir = required(p.out_dir.clone(), "out_dir")?;
    let kmax = *p.kmax.get_or_insert(40.0);
    let mut spec = match (&p.spec, &p.table) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path).map_err(|e| io_error(path, e))?;
            let spec_copy = dir.join("spec.toml");
            write_file(&spec_copy, &text)?;
            p.spec = Some(std::fs::canonicalize(&spec_copy).map_err(|e| io_error(&spec_copy, e))?);
            let mut spec = ExperimentSpec::from_toml_str(&text)?;
            spec.rows.retain(|r| r.k <= kmax);
            spec
        }
        (None, Some(table)) => {
            let id = TableId::from_name(table).ok_or_else(|| Error::Config(format!("unknown table \"{table}\"")))?;
            ExperimentSpec::preset(id, kmax)?
        }
        (None, None) => return Err(Error::Config("give --table or --spec".into())),
    };
    if let Some(w) = p.workers {
        spec.workers = w;
    }
    if let Some(cap) = p.dof_cap {
        spec.dof_cap = cap;
    }
    if let Some(c) = p.c {
        spec.mesh_constant = c;
    }
    p.table = Some(spec.table.name().into());
    p.workers = Some(spec.workers);
    p.dof_cap = Some(spec.dof_cap);
    p.c = Some(spec.mesh_constant);
    let result = experiments::run(&spec)?;
    let outputs = experiments::write_outputs(&result, &dir)?;
    print!("{}", experiments::emit_csv(&result));
    manifest::write(&dir, "experiment", &p, &outputs)?;
    let failed = result.rows.iter().filter(|r| !r.ok()).count();
    if failed > 0 {
        return Err(Error::Solver(format!("{failed} of {} rows failed", result.rows.len())));
    }
    Ok(())
}
