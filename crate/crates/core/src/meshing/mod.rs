//! Tagged conforming triangulations of the computational domain.
//!
//! Nodes are stored corners first: `nodes[..n_vertices]` are triangle corners
//! and, for second-order meshes, the remaining nodes are edge midpoints (moved
//! onto the true curve on curved edges). Element node order is
//! `[v0, v1, v2, m01, m12, m20]`, counter-clockwise.

mod generate;
mod io;

pub use generate::{generate_mesh, generate_mesh_with, mesh_size, MeshOptions};
pub use io::{export_mesh, import_mesh};

use crate::error::{Error, Result};
use crate::geometry::Point;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BoundaryTag {
    /// Obstacle boundary (Dirichlet data).
    GammaD,
    /// Truncation boundary (absorbing condition, or interface inside a PML mesh).
    GammaTr,
    /// Outer PML boundary (homogeneous Dirichlet).
    GammaOuter,
}

impl BoundaryTag {
    pub fn name(self) -> &'static str {
        match self {
            BoundaryTag::GammaD => "GammaD",
            BoundaryTag::GammaTr => "GammaTr",
            BoundaryTag::GammaOuter => "GammaOuter",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "GammaD" => Some(BoundaryTag::GammaD),
            "GammaTr" => Some(BoundaryTag::GammaTr),
            "GammaOuter" => Some(BoundaryTag::GammaOuter),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Region {
    /// Inside the truncation boundary: the domain of the absorbing-condition problem.
    Interior,
    /// Between the truncation boundary and the start of the PML.
    Buffer,
    /// The absorbing annulus.
    Pml,
}

impl Region {
    pub fn name(self) -> &'static str {
        match self {
            Region::Interior => "interior",
            Region::Buffer => "buffer",
            Region::Pml => "pml",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "interior" => Some(Region::Interior),
            "buffer" => Some(Region::Buffer),
            "pml" => Some(Region::Pml),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ElementOrder {
    P1,
    P2,
}

impl ElementOrder {
    pub fn from_degree(p: u32) -> Result<Self> {
        match p {
            1 => Ok(ElementOrder::P1),
            2 => Ok(ElementOrder::P2),
            _ => Err(Error::InvalidParameter(format!("element order {p} must be 1 or 2"))),
        }
    }

    pub fn degree(self) -> u32 {
        match self {
            ElementOrder::P1 => 1,
            ElementOrder::P2 => 2,
        }
    }

    pub fn nodes_per_element(self) -> usize {
        match self {
            ElementOrder::P1 => 3,
            ElementOrder::P2 => 6,
        }
    }
}

/// A boundary edge, oriented along the counter-clockwise direction of its curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundaryEdge {
    pub nodes: [usize; 2],
    /// Midpoint node for second-order meshes.
    pub mid: Option<usize>,
    pub tag: BoundaryTag,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    order: ElementOrder,
    nodes: Vec<Point>,
    n_vertices: usize,
    connectivity: Vec<usize>,
    regions: Vec<Region>,
    boundary: Vec<BoundaryEdge>,
    h_target: f64,
}

/// Local midpoint slot for the edge between local corners `i` and `(i+1)%3`.
pub const EDGE_MIDPOINT: [usize; 3] = [3, 4, 5];

impl Mesh {
    /// Builds and validates a mesh. `elements` holds 3 or 6 node indices per triangle.
    pub fn from_parts(
        order: ElementOrder,
        nodes: Vec<Point>,
        n_vertices: usize,
        elements: Vec<Vec<usize>>,
        regions: Vec<Region>,
        boundary: Vec<BoundaryEdge>,
        h_target: f64,
    ) -> Result<Self> {
        let npe = order.nodes_per_element();
        let mut connectivity = Vec::with_capacity(elements.len() * npe);
        for (e, el) in elements.iter().enumerate() {
            if el.len() != npe {
                return Err(Error::Mesh(format!(
                    "element {e} has {} nodes, expected {npe}",
                    el.len()
                )));
            }
            connectivity.extend_from_slice(el);
        }
        let mesh = Mesh {
            order,
            nodes,
            n_vertices,
            connectivity,
            regions,
            boundary,
            h_target,
        };
        mesh.validate()?;
        Ok(mesh)
    }

    pub(crate) fn from_raw(
        order: ElementOrder,
        nodes: Vec<Point>,
        n_vertices: usize,
        connectivity: Vec<usize>,
        regions: Vec<Region>,
        boundary: Vec<BoundaryEdge>,
        h_target: f64,
    ) -> Self {
        Mesh {
            order,
            nodes,
            n_vertices,
            connectivity,
            regions,
            boundary,
            h_target,
        }
    }

    pub fn order(&self) -> ElementOrder {
        self.order
    }

    pub fn nodes(&self) -> &[Point] {
        &self.nodes
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn num_elements(&self) -> usize {
        self.regions.len()
    }

    pub fn element(&self, e: usize) -> &[usize] {
        let npe = self.order.nodes_per_element();
        &self.connectivity[e * npe..(e + 1) * npe]
    }

    pub fn elements(&self) -> impl Iterator<Item = &[usize]> {
        self.connectivity.chunks_exact(self.order.nodes_per_element())
    }

    pub fn corners(&self, e: usize) -> [usize; 3] {
        let el = self.element(e);
        [el[0], el[1], el[2]]
    }

    pub fn region(&self, e: usize) -> Region {
        self.regions[e]
    }

    pub fn regions(&self) -> &[Region] {
        &self.regions
    }

    pub fn boundary(&self) -> &[BoundaryEdge] {
        &self.boundary
    }

    pub fn boundary_with(&self, tag: BoundaryTag) -> impl Iterator<Item = &BoundaryEdge> {
        self.boundary.iter().filter(move |b| b.tag == tag)
    }

    /// Sorted, deduplicated nodes (corners and midpoints) on edges with `tag`.
    pub fn nodes_on(&self, tag: BoundaryTag) -> Vec<usize> {
        let mut v: Vec<usize> = self
            .boundary_with(tag)
            .flat_map(|b| b.nodes.into_iter().chain(b.mid))
            .collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn h_target(&self) -> f64 {
        self.h_target
    }

    /// Signed area of the straight triangle through the corners.
    pub fn corner_area(&self, e: usize) -> f64 {
        let [a, b, c] = self.corners(e).map(|i| self.nodes[i]);
        0.5 * (b - a).cross(c - a)
    }

    /// Interior angles (radians) of the straight triangle through the corners.
    pub fn angles(&self, e: usize) -> [f64; 3] {
        let p = self.corners(e).map(|i| self.nodes[i]);
        triangle_angles(p[0], p[1], p[2])
    }

    pub fn min_angle_degrees(&self) -> f64 {
        (0..self.num_elements())
            .flat_map(|e| self.angles(e))
            .fold(f64::INFINITY, f64::min)
            .to_degrees()
    }

    /// Longest corner-to-corner edge: the element diameter of straight triangles.
    pub fn max_edge_length(&self) -> f64 {
        (0..self.num_elements())
            .map(|e| {
                let p = self.corners(e).map(|i| self.nodes[i]);
                p[0].dist(p[1]).max(p[1].dist(p[2])).max(p[2].dist(p[0]))
            })
            .fold(0.0, f64::max)
    }

    /// Unique undirected corner edges with the elements that use them.
    pub fn edges(&self) -> HashMap<(usize, usize), Vec<usize>> {
        let mut map: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        for e in 0..self.num_elements() {
            let c = self.corners(e);
            for i in 0..3 {
                map.entry(edge_key(c[i], c[(i + 1) % 3])).or_default().push(e);
            }
        }
        map
    }

    /// `V − E + F` of the corner triangulation.
    pub fn euler_characteristic(&self) -> i64 {
        let used: std::collections::HashSet<usize> =
            (0..self.num_elements()).flat_map(|e| self.corners(e)).collect();
        used.len() as i64 - self.edges().len() as i64 + self.num_elements() as i64
    }

    /// Checks index ranges, orientation, conformity and tag completeness.
    pub fn validate(&self) -> Result<()> {
        let n = self.nodes.len();
        let npe = self.order.nodes_per_element();
        if self.connectivity.len() != self.regions.len() * npe {
            return Err(Error::Mesh("region count does not match element count".into()));
        }
        if self.n_vertices > n {
            return Err(Error::Mesh("vertex count exceeds node count".into()));
        }
        if let Some(&bad) = self.connectivity.iter().find(|&&i| i >= n) {
            return Err(Error::Mesh(format!("element node index {bad} out of range")));
        }
        let min_area = 1e-14 * self.h_target * self.h_target;
        for e in 0..self.num_elements() {
            let el = self.element(e);
            if el[..3].iter().any(|&i| i >= self.n_vertices) {
                return Err(Error::Mesh(format!("element {e} corner is not a vertex node")));
            }
            if self.corner_area(e) <= min_area {
                return Err(Error::Mesh(format!(
                    "element {e} is degenerate or clockwise (area {:e})",
                    self.corner_area(e)
                )));
            }
        }
        let edges = self.edges();
        // Second-order meshes: every edge has a single midpoint shared by its elements.
        if self.order == ElementOrder::P2 {
            let mut mids: HashMap<(usize, usize), usize> = HashMap::new();
            for e in 0..self.num_elements() {
                let el = self.element(e);
                for i in 0..3 {
                    let key = edge_key(el[i], el[(i + 1) % 3]);
                    let m = el[EDGE_MIDPOINT[i]];
                    if m < self.n_vertices {
                        return Err(Error::Mesh(format!("element {e} midpoint {m} is a vertex node")));
                    }
                    if *mids.entry(key).or_insert(m) != m {
                        return Err(Error::Mesh(format!(
                            "edge {key:?} has inconsistent midpoint nodes (non-conforming)"
                        )));
                    }
                }
            }
        }
        let mut tagged: HashMap<(usize, usize), BoundaryTag> = HashMap::new();
        for b in &self.boundary {
            if b.nodes.iter().chain(b.mid.iter()).any(|&i| i >= n) {
                return Err(Error::Mesh("boundary node index out of range".into()));
            }
            let key = edge_key(b.nodes[0], b.nodes[1]);
            let Some(users) = edges.get(&key) else {
                return Err(Error::Mesh(format!(
                    "boundary edge {:?} is not an edge of any element",
                    b.nodes
                )));
            };
            if self.order == ElementOrder::P2 {
                let e = users[0];
                let el = self.element(e);
                let slot = (0..3)
                    .find(|&i| edge_key(el[i], el[(i + 1) % 3]) == key)
                    .unwrap();
                if b.mid != Some(el[EDGE_MIDPOINT[slot]]) {
                    return Err(Error::Mesh(format!(
                        "boundary edge {:?} midpoint does not match its element",
                        b.nodes
                    )));
                }
            }
            if users.len() > 1 && b.tag != BoundaryTag::GammaTr {
                return Err(Error::Mesh(format!(
                    "interior edge {:?} carries tag {}",
                    b.nodes,
                    b.tag.name()
                )));
            }
            if tagged.insert(key, b.tag).is_some() {
                return Err(Error::Mesh(format!("edge {:?} is tagged twice", b.nodes)));
            }
        }
        for (key, users) in &edges {
            match users.len() {
                1 => {
                    if !tagged.contains_key(key) {
                        return Err(Error::Mesh(format!("boundary edge {key:?} has no tag")));
                    }
                }
                2 => {}
                k => {
                    return Err(Error::Mesh(format!("edge {key:?} is shared by {k} elements")));
                }
            }
        }
        Ok(())
    }

    /// Elements whose region satisfies `keep`, renumbered, together with the
    /// map from new node index to parent node index. Boundary edges are kept
    /// when they border a kept element.
    pub fn submesh(&self, keep: impl Fn(Region) -> bool) -> (Mesh, Vec<usize>) {
        let kept: Vec<usize> = (0..self.num_elements()).filter(|&e| keep(self.regions[e])).collect();
        let mut used = vec![false; self.nodes.len()];
        for &e in &kept {
            for &i in self.element(e) {
                used[i] = true;
            }
        }
        let mut new_index = vec![usize::MAX; self.nodes.len()];
        let mut map = Vec::new();
        for i in (0..self.n_vertices).chain(self.n_vertices..self.nodes.len()) {
            if used[i] {
                new_index[i] = map.len();
                map.push(i);
            }
        }
        let n_vertices = (0..self.n_vertices).filter(|&i| used[i]).count();
        let nodes = map.iter().map(|&i| self.nodes[i]).collect();
        let connectivity = kept
            .iter()
            .flat_map(|&e| self.element(e).iter().map(|&i| new_index[i]))
            .collect();
        let regions = kept.iter().map(|&e| self.regions[e]).collect();
        let mut kept_edges = std::collections::HashSet::new();
        for &e in &kept {
            let c = self.corners(e);
            for i in 0..3 {
                kept_edges.insert(edge_key(c[i], c[(i + 1) % 3]));
            }
        }
        let boundary = self
            .boundary
            .iter()
            .filter(|b| kept_edges.contains(&edge_key(b.nodes[0], b.nodes[1])))
            .map(|b| BoundaryEdge {
                nodes: b.nodes.map(|i| new_index[i]),
                mid: b.mid.map(|i| new_index[i]),
                tag: b.tag,
            })
            .collect();
        (
            Mesh {
                order: self.order,
                nodes,
                n_vertices,
                connectivity,
                regions,
                boundary,
                h_target: self.h_target,
            },
            map,
        )
    }
}

pub(crate) fn edge_key(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

pub(crate) fn triangle_angles(a: Point, b: Point, c: Point) -> [f64; 3] {
    let angle = |p: Point, q: Point, r: Point| {
        let u = q - p;
        let v = r - p;
        u.cross(v).abs().atan2(u.dot(v))
    };
    [angle(a, b, c), angle(b, c, a), angle(c, a, b)]
}

#[cfg(test)]
pub(crate) mod test_meshes {
    use super::*;

    /// Unit square split into two P1 triangles; all four sides tagged GammaD.
    pub fn two_triangles() -> Mesh {
        let nodes = vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(1.0, 1.0),
            Point::new(0.0, 1.0),
        ];
        let boundary = [(0, 1), (1, 2), (2, 3), (3, 0)]
            .into_iter()
            .map(|(a, b)| BoundaryEdge {
                nodes: [a, b],
                mid: None,
                tag: BoundaryTag::GammaD,
            })
            .collect();
        Mesh::from_parts(
            ElementOrder::P1,
            nodes,
            4,
            vec![vec![0, 1, 2], vec![0, 2, 3]],
            vec![Region::Interior; 2],
            boundary,
            1.0,
        )
        .unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::test_meshes::two_triangles;
    use super::*;

    #[test]
    fn basic_queries() {
        let m = two_triangles();
        assert_eq!(m.num_elements(), 2);
        assert_eq!(m.euler_characteristic(), 1);
        assert!((m.min_angle_degrees() - 45.0).abs() < 1e-12);
        assert!((m.max_edge_length() - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(m.nodes_on(BoundaryTag::GammaD), vec![0, 1, 2, 3]);
    }

    #[test]
    fn validation_catches_defects() {
        let m = two_triangles();
        let mut untagged = m.boundary().to_vec();
        untagged.pop();
        let err = Mesh::from_parts(
            ElementOrder::P1,
            m.nodes().to_vec(),
            4,
            vec![vec![0, 1, 2], vec![0, 2, 3]],
            vec![Region::Interior; 2],
            untagged,
            1.0,
        );
        assert!(err.is_err());
        let clockwise = Mesh::from_parts(
            ElementOrder::P1,
            m.nodes().to_vec(),
            4,
            vec![vec![0, 2, 1], vec![0, 2, 3]],
            vec![Region::Interior; 2],
            m.boundary().to_vec(),
            1.0,
        );
        assert!(clockwise.is_err());
    }

    #[test]
    fn submesh_keeps_selected_region() {
        let m = two_triangles();
        let nodes = m.nodes().to_vec();
        let mesh = Mesh::from_raw(
            ElementOrder::P1,
            nodes,
            4,
            vec![0, 1, 2, 0, 2, 3],
            vec![Region::Interior, Region::Pml],
            m.boundary().to_vec(),
            1.0,
        );
        let (sub, map) = mesh.submesh(|r| r == Region::Interior);
        assert_eq!(sub.num_elements(), 1);
        assert_eq!(map, vec![0, 1, 2]);
        assert_eq!(sub.boundary().len(), 2);
    }
}
