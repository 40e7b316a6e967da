use super::{edge_key, triangle_angles, BoundaryEdge, BoundaryTag, ElementOrder, Mesh, Region};
use crate::error::{Error, Result};
use crate::geometry::{Curve, Point, Scene};
use spade::{ConstrainedDelaunayTriangulation, Point2, Triangulation};
use std::collections::HashMap;

/// Mesh size rule `h = C·k^{−1−1/(2p)}`.
pub fn mesh_size(k: f64, c: f64, p: u32) -> f64 {
    c * k.powf(-1.0 - 1.0 / (2.0 * p as f64))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeshOptions {
    /// Lattice and boundary spacing as a fraction of `h`. Refinement can create
    /// edges of length `2/√3` times the spacing, so keep this below `√3/2`.
    pub spacing_factor: f64,
    /// Lattice points closer than this fraction of the spacing to a curve are dropped.
    pub clearance: f64,
    pub smoothing_sweeps: usize,
}

impl Default for MeshOptions {
    fn default() -> Self {
        MeshOptions {
            spacing_factor: 0.85,
            clearance: 0.55,
            smoothing_sweeps: 3,
        }
    }
}

/// Triangulates the scene at `h = C·k^{−1−1/(2p)}` with order-`p` elements.
///
/// Without `include_pml` the domain is the region between the obstacle and
/// the truncation boundary. With it, the mesh extends to the outer PML circle;
/// the truncation boundary (and the PML start, when distinct) are embedded as
/// constrained curves so that the interior part is exactly the smaller mesh.
pub fn generate_mesh(scene: &Scene, k: f64, c: f64, p: u32, include_pml: bool) -> Result<Mesh> {
    if !(k > 0.0) || !(c > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "wavenumber {k} and mesh constant {c} must be positive"
        )));
    }
    let order = ElementOrder::from_degree(p)?;
    generate_mesh_with(scene, mesh_size(k, c, p), order, include_pml, MeshOptions::default())
}

struct CurveSpec {
    curve: Curve,
    tag: Option<BoundaryTag>,
}

/// Uniform hash of short segments for near-curve distance queries.
struct SegmentGrid {
    cell: f64,
    cells: HashMap<(i64, i64), Vec<(Point, Point)>>,
}

impl SegmentGrid {
    fn new(cell: f64) -> Self {
        SegmentGrid {
            cell,
            cells: HashMap::new(),
        }
    }

    fn key(&self, p: Point) -> (i64, i64) {
        ((p.x / self.cell).floor() as i64, (p.y / self.cell).floor() as i64)
    }

    fn insert(&mut self, a: Point, b: Point) {
        let (ka, kb) = (self.key(a), self.key(b));
        for i in ka.0.min(kb.0)..=ka.0.max(kb.0) {
            for j in ka.1.min(kb.1)..=ka.1.max(kb.1) {
                self.cells.entry((i, j)).or_default().push((a, b));
            }
        }
    }

    /// Distance to the nearest stored segment, if one is within one cell.
    fn near_distance(&self, p: Point) -> f64 {
        let (i0, j0) = self.key(p);
        let mut best = f64::INFINITY;
        for i in i0 - 1..=i0 + 1 {
            for j in j0 - 1..=j0 + 1 {
                if let Some(segs) = self.cells.get(&(i, j)) {
                    for &(a, b) in segs {
                        best = best.min(point_segment_distance(p, a, b));
                    }
                }
            }
        }
        best
    }
}

fn point_segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let d = b - a;
    let t = ((p - a).dot(d) / d.norm2()).clamp(0.0, 1.0);
    p.dist(a + d * t)
}

/// As [`generate_mesh`] with an explicit target size and generator options.
pub fn generate_mesh_with(
    scene: &Scene,
    h: f64,
    order: ElementOrder,
    include_pml: bool,
    options: MeshOptions,
) -> Result<Mesh> {
    scene.validate()?;
    let a = options.spacing_factor * h;
    let obstacle = scene.obstacle.curve();
    let truncation = scene.truncation.curve();

    let gap = obstacle
        .resample(h)
        .into_iter()
        .map(|s| -truncation.signed_distance(obstacle.point(s)))
        .fold(f64::INFINITY, f64::min);
    if gap < 3.0 * h {
        return Err(Error::Mesh(format!(
            "gap {gap:.4} between obstacle and truncation boundary is below 3h = {:.4}; use a smaller mesh constant",
            3.0 * h
        )));
    }

    let mut curves = vec![
        CurveSpec {
            curve: obstacle.clone(),
            tag: Some(BoundaryTag::GammaD),
        },
        CurveSpec {
            curve: truncation.clone(),
            tag: Some(BoundaryTag::GammaTr),
        },
    ];
    let mut pml_start = None;
    if include_pml {
        let pml = scene.pml.ok_or_else(|| {
            Error::Mesh("a PML mesh was requested but the scene has no PML layout".into())
        })?;
        let r_trunc = scene.truncation.max_radius();
        if !(scene.truncation.is_circle() && (pml.inner_radius - r_trunc).abs() <= 1e-12 * r_trunc)
        {
            if pml.inner_radius - r_trunc < a {
                return Err(Error::Mesh(format!(
                    "PML starts {:.4} beyond the truncation boundary, closer than the mesh spacing {a:.4}",
                    pml.inner_radius - r_trunc
                )));
            }
            curves.push(CurveSpec {
                curve: Curve::Circle {
                    center: Point::ORIGIN,
                    radius: pml.inner_radius,
                },
                tag: None,
            });
        }
        pml_start = Some(pml.inner_radius);
        if pml.width < 2.0 * a {
            return Err(Error::Mesh("PML width is below two mesh spacings".into()));
        }
        curves.push(CurveSpec {
            curve: Curve::Circle {
                center: Point::ORIGIN,
                radius: pml.outer_radius(),
            },
            tag: Some(BoundaryTag::GammaOuter),
        });
    }
    // Boundary vertices, then constraint edges between consecutive ones.
    let mut vertices: Vec<Point> = Vec::new();
    let mut constraints: Vec<[usize; 2]> = Vec::new();
    let mut constraint_info: HashMap<(usize, usize), (usize, f64, f64)> = HashMap::new();
    let mut grid = SegmentGrid::new(a);
    let mut ranges = Vec::new();
    for (ci, spec) in curves.iter().enumerate() {
        let params = spec.curve.resample(a);
        let start = vertices.len();
        for &s in &params {
            vertices.push(spec.curve.point(s));
        }
        let n = params.len();
        ranges.push(start..start + n);
        for j in 0..n {
            let (u, v) = (start + j, start + (j + 1) % n);
            constraints.push([u, v]);
            let mut s1 = params[(j + 1) % n];
            if s1 <= params[j] {
                s1 += spec.curve.period();
            }
            constraint_info.insert(edge_key(u, v), (ci, params[j], s1));
            grid.insert(vertices[u], vertices[v]);
        }
    }
    let n_boundary = vertices.len();

    // Elements are classified against the boundary polygons the triangulation
    // actually follows; the exact curves can put slivers on the wrong side.
    let polygons: Vec<Vec<Point>> = ranges.iter().map(|r| vertices[r.clone()].to_vec()).collect();
    let (obstacle_poly, truncation_poly, outer_poly) = (&polygons[0], &polygons[1], polygons.last().unwrap());
    let in_domain = |p: Point| polygon_contains(outer_poly, p) && !polygon_contains(obstacle_poly, p);

    // Equilateral lattice filling the domain away from the curves.
    let extent = curves
        .iter()
        .map(|c| c.curve.max_radius())
        .fold(0.0, f64::max);
    let dy = a * 3f64.sqrt() / 2.0;
    let rows = (2.0 * extent / dy).ceil() as i64 + 1;
    let cols = (2.0 * extent / a).ceil() as i64 + 2;
    for j in 0..=rows {
        let y = -extent + j as f64 * dy;
        let shift = if j % 2 == 0 { 0.0 } else { 0.5 * a };
        for i in 0..=cols {
            let p = Point::new(-extent - a + shift + i as f64 * a, y);
            if grid.near_distance(p) >= options.clearance * a && in_domain(p) {
                vertices.push(p);
            }
        }
    }

    let spade_vertices: Vec<Point2<f64>> = vertices.iter().map(|p| Point2::new(p.x, p.y)).collect();
    let mut cdt: ConstrainedDelaunayTriangulation<Point2<f64>> =
        ConstrainedDelaunayTriangulation::bulk_load_cdt(spade_vertices, constraints.clone())
            .map_err(|e| Error::Mesh(format!("triangulation failed: {e:?}")))?;
    if cdt.num_vertices() != vertices.len() {
        return Err(Error::Mesh("duplicate mesh vertices".into()));
    }

    // Split over-long edges until every element is within the target size.
    let h_max = h * (1.0 - 1e-9);
    for _ in 0..30 {
        let mut splits: HashMap<usize, Point2<f64>> = HashMap::new();
        for face in cdt.inner_faces() {
            let pos = face.positions();
            let centroid = Point::new(
                (pos[0].x + pos[1].x + pos[2].x) / 3.0,
                (pos[0].y + pos[1].y + pos[2].y) / 3.0,
            );
            if !in_domain(centroid) {
                continue;
            }
            let edges = face.adjacent_edges();
            let longest = edges
                .iter()
                .max_by(|e1, e2| e1.length_2().partial_cmp(&e2.length_2()).unwrap())
                .unwrap();
            if longest.length_2().sqrt() > h_max && !longest.is_constraint_edge() {
                let [p, q] = longest.positions();
                splits.insert(
                    longest.as_undirected().fix().index(),
                    Point2::new(0.5 * (p.x + q.x), 0.5 * (p.y + q.y)),
                );
            }
        }
        if splits.is_empty() {
            break;
        }
        let mut splits: Vec<_> = splits.into_iter().collect();
        splits.sort_by_key(|(k, _)| *k);
        for (_, p) in splits {
            cdt.insert(p)
                .map_err(|e| Error::Mesh(format!("refinement insertion failed: {e:?}")))?;
        }
    }

    let mut positions: Vec<Point> = cdt
        .vertices()
        .map(|v| Point::new(v.position().x, v.position().y))
        .collect();
    let mut triangles: Vec<[usize; 3]> = Vec::new();
    for face in cdt.inner_faces() {
        let idx = face.vertices().map(|v| v.fix().index());
        let p = idx.map(|i| positions[i]);
        let centroid = (p[0] + p[1] + p[2]) * (1.0 / 3.0);
        if !in_domain(centroid) {
            continue;
        }
        let area = (p[1] - p[0]).cross(p[2] - p[0]);
        triangles.push(if area > 0.0 {
            idx
        } else {
            [idx[0], idx[2], idx[1]]
        });
    }
    drop(cdt);

    smooth(&mut positions, &triangles, n_boundary, h_max, options.smoothing_sweeps);

    // Compact: drop vertices not used by any kept triangle.
    let mut used = vec![false; positions.len()];
    for t in &triangles {
        for &i in t {
            used[i] = true;
        }
    }
    if used[..n_boundary].iter().any(|u| !u) {
        return Err(Error::Mesh("a boundary vertex is not attached to any element".into()));
    }
    let mut renumber = vec![usize::MAX; positions.len()];
    let mut nodes = Vec::with_capacity(positions.len());
    for (i, &p) in positions.iter().enumerate() {
        if used[i] {
            renumber[i] = nodes.len();
            nodes.push(p);
        }
    }
    for t in &mut triangles {
        *t = t.map(|i| renumber[i]);
    }
    let n_vertices = nodes.len();

    let regions: Vec<Region> = triangles
        .iter()
        .map(|t| {
            let c = (nodes[t[0]] + nodes[t[1]] + nodes[t[2]]) * (1.0 / 3.0);
            if polygon_contains(truncation_poly, c) {
                Region::Interior
            } else if pml_start.is_some_and(|r| c.norm() < r) {
                Region::Buffer
            } else {
                Region::Pml
            }
        })
        .collect();

    // Boundary vertices keep their indices (they precede all others and are all used).
    let curve_edge = |u: usize, v: usize| constraint_info.get(&edge_key(u, v));

    let npe = order.nodes_per_element();
    let mut connectivity = Vec::with_capacity(triangles.len() * npe);
    let mut midpoint_of: HashMap<(usize, usize), usize> = HashMap::new();
    for t in &triangles {
        connectivity.extend_from_slice(t);
        if order == ElementOrder::P2 {
            for i in 0..3 {
                let (u, v) = (t[i], t[(i + 1) % 3]);
                let key = edge_key(u, v);
                let m = *midpoint_of.entry(key).or_insert_with(|| {
                    let p = match curve_edge(u, v) {
                        Some(&(ci, s0, s1)) => curves[ci].curve.point(0.5 * (s0 + s1)),
                        None => nodes[u].lerp(nodes[v], 0.5),
                    };
                    nodes.push(p);
                    nodes.len() - 1
                });
                connectivity.push(m);
            }
        }
    }

    let mut boundary = Vec::new();
    for [u, v] in constraints {
        let (ci, _, _) = constraint_info[&edge_key(u, v)];
        if let Some(tag) = curves[ci].tag {
            boundary.push(BoundaryEdge {
                nodes: [u, v],
                mid: midpoint_of.get(&edge_key(u, v)).copied(),
                tag,
            });
        }
    }

    let mesh = Mesh::from_raw(order, nodes, n_vertices, connectivity, regions, boundary, h);
    mesh.validate()?;
    Ok(mesh)
}

/// Even-odd point-in-polygon test.
fn polygon_contains(poly: &[Point], p: Point) -> bool {
    let mut inside = false;
    let mut j = poly.len() - 1;
    for i in 0..poly.len() {
        let (a, b) = (poly[i], poly[j]);
        if (a.y > p.y) != (b.y > p.y) && p.x < a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y) {
            inside = !inside;
        }
        j = i;
    }
    inside
}

/// Guarded Laplacian smoothing of the free vertices: a move is accepted only
/// if it does not worsen the smallest incident angle or push an incident edge
/// beyond `h_max`.
fn smooth(positions: &mut [Point], triangles: &[[usize; 3]], n_fixed: usize, h_max: f64, sweeps: usize) {
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); positions.len()];
    for (t, tri) in triangles.iter().enumerate() {
        for &i in tri {
            incident[i].push(t);
        }
    }
    let quality = |pos: &[Point], v: usize, at: Point| -> Option<(f64, f64)> {
        let mut min_angle = f64::INFINITY;
        let mut max_edge: f64 = 0.0;
        for &t in &incident[v] {
            let p = triangles[t].map(|i| if i == v { at } else { pos[i] });
            if (p[1] - p[0]).cross(p[2] - p[0]) <= 0.0 {
                return None;
            }
            for a in triangle_angles(p[0], p[1], p[2]) {
                min_angle = min_angle.min(a);
            }
            for i in 0..3 {
                max_edge = max_edge.max(p[i].dist(p[(i + 1) % 3]));
            }
        }
        Some((min_angle, max_edge))
    };
    for _ in 0..sweeps {
        for v in n_fixed..positions.len() {
            if incident[v].is_empty() {
                continue;
            }
            let mut sum = Point::ORIGIN;
            let mut count = 0usize;
            for &t in &incident[v] {
                for &i in &triangles[t] {
                    if i != v {
                        sum += positions[i];
                        count += 1;
                    }
                }
            }
            let target = sum * (1.0 / count as f64);
            let Some((old_angle, old_edge)) = quality(positions, v, positions[v]) else {
                continue;
            };
            if let Some((new_angle, new_edge)) = quality(positions, v, target) {
                if new_angle >= old_angle && new_edge <= old_edge.max(h_max) {
                    positions[v] = target;
                }
            }
        }
    }
}
