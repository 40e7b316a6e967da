//! Plain-text mesh format.
//!
//! ```text
//! ORDER 2
//! H 0.0297
//! VERTICES <node count> <corner count>
//! <x> <y>                      one line per node, corners first
//! TRIANGLES <element count>
//! <n0> <n1> <n2> [<m01> <m12> <m20>] <region>
//! BOUNDARY <edge count>
//! <a> <b> [<mid>] <tag>
//! ```
//!
//! Indices are zero-based; regions are `interior|buffer|pml`, tags
//! `GammaD|GammaTr|GammaOuter`. Blank lines and lines starting with `#` are
//! ignored. Coordinates are written in shortest round-trip form.

use super::{BoundaryEdge, BoundaryTag, ElementOrder, Mesh, Region};
use crate::error::{Error, Result};
use crate::geometry::Point;
use std::fmt::Write;

pub fn export_mesh(mesh: &Mesh) -> String {
    let mut out = String::new();
    writeln!(out, "ORDER {}", mesh.order().degree()).unwrap();
    writeln!(out, "H {}", mesh.h_target()).unwrap();
    writeln!(out, "VERTICES {} {}", mesh.num_nodes(), mesh.n_vertices()).unwrap();
    for p in mesh.nodes() {
        writeln!(out, "{} {}", p.x, p.y).unwrap();
    }
    writeln!(out, "TRIANGLES {}", mesh.num_elements()).unwrap();
    for (e, el) in mesh.elements().enumerate() {
        for i in el {
            write!(out, "{i} ").unwrap();
        }
        writeln!(out, "{}", mesh.region(e).name()).unwrap();
    }
    writeln!(out, "BOUNDARY {}", mesh.boundary().len()).unwrap();
    for b in mesh.boundary() {
        write!(out, "{} {} ", b.nodes[0], b.nodes[1]).unwrap();
        if let Some(m) = b.mid {
            write!(out, "{m} ").unwrap();
        }
        writeln!(out, "{}", b.tag.name()).unwrap();
    }
    out
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn next(&mut self) -> Result<(usize, Vec<&'a str>)> {
        for (i, line) in self.inner.by_ref() {
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            self.last = i + 1;
            return Ok((i + 1, t.split_whitespace().collect()));
        }
        Err(Error::Parse {
            line: self.last + 1,
            message: "unexpected end of file".into(),
        })
    }

    fn header(&mut self, name: &str, values: usize) -> Result<(usize, Vec<&'a str>)> {
        let (line, fields) = self.next()?;
        if fields.first() != Some(&name) || fields.len() != values + 1 {
            return Err(Error::Parse {
                line,
                message: format!(
                    "expected section header \"{name}\" with {values} value(s), found \"{}\"",
                    fields.join(" ")
                ),
            });
        }
        Ok((line, fields[1..].to_vec()))
    }
}

fn parse<T: std::str::FromStr>(line: usize, field: &str, what: &str) -> Result<T> {
    field.parse().map_err(|_| Error::Parse {
        line,
        message: format!("invalid {what} \"{field}\""),
    })
}

fn parse_index(line: usize, field: &str, bound: usize) -> Result<usize> {
    let v: i64 = parse(line, field, "index")?;
    if v < 0 || v as usize >= bound {
        return Err(Error::Parse {
            line,
            message: format!("index {v} out of range 0..{bound}"),
        });
    }
    Ok(v as usize)
}

pub fn import_mesh(text: &str) -> Result<Mesh> {
    let mut lines = Lines {
        inner: text.lines().enumerate(),
        last: 0,
    };
    let (line, v) = lines.header("ORDER", 1)?;
    let order = ElementOrder::from_degree(parse(line, v[0], "order")?).map_err(|e| Error::Parse {
        line,
        message: e.to_string(),
    })?;
    let (line, v) = lines.header("H", 1)?;
    let h: f64 = parse(line, v[0], "mesh size")?;
    let (line, v) = lines.header("VERTICES", 2)?;
    let n_nodes: usize = parse(line, v[0], "node count")?;
    let n_vertices: usize = parse(line, v[1], "corner count")?;
    if n_vertices > n_nodes {
        return Err(Error::Parse {
            line,
            message: "corner count exceeds node count".into(),
        });
    }
    let mut nodes = Vec::with_capacity(n_nodes);
    for _ in 0..n_nodes {
        let (line, f) = lines.next()?;
        if f.len() != 2 {
            return Err(Error::Parse {
                line,
                message: format!("expected 2 coordinates, found {}", f.len()),
            });
        }
        nodes.push(Point::new(parse(line, f[0], "coordinate")?, parse(line, f[1], "coordinate")?));
    }
    let (line, v) = lines.header("TRIANGLES", 1)?;
    let n_el: usize = parse(line, v[0], "element count")?;
    let npe = order.nodes_per_element();
    let mut elements = Vec::with_capacity(n_el);
    let mut regions = Vec::with_capacity(n_el);
    for _ in 0..n_el {
        let (line, f) = lines.next()?;
        if f.len() != npe + 1 {
            return Err(Error::Parse {
                line,
                message: format!("expected {npe} node indices and a region"),
            });
        }
        let el = f[..npe]
            .iter()
            .map(|s| parse_index(line, s, n_nodes))
            .collect::<Result<Vec<_>>>()?;
        let region = Region::from_name(f[npe]).ok_or_else(|| Error::Parse {
            line,
            message: format!("unknown region \"{}\"", f[npe]),
        })?;
        elements.push(el);
        regions.push(region);
    }
    let (line, v) = lines.header("BOUNDARY", 1)?;
    let n_b: usize = parse(line, v[0], "boundary edge count")?;
    let per_edge = if order == ElementOrder::P2 { 3 } else { 2 };
    let mut boundary = Vec::with_capacity(n_b);
    for _ in 0..n_b {
        let (line, f) = lines.next()?;
        if f.len() != per_edge + 1 {
            return Err(Error::Parse {
                line,
                message: format!("expected {per_edge} node indices and a tag"),
            });
        }
        let idx = f[..per_edge]
            .iter()
            .map(|s| parse_index(line, s, n_nodes))
            .collect::<Result<Vec<_>>>()?;
        let tag = BoundaryTag::from_name(f[per_edge]).ok_or_else(|| Error::Parse {
            line,
            message: format!("unknown boundary tag \"{}\"", f[per_edge]),
        })?;
        boundary.push((line, BoundaryEdge {
            nodes: [idx[0], idx[1]],
            mid: idx.get(2).copied(),
            tag,
        }));
    }
    if let Some((i, l)) = lines.inner.find(|(_, l)| {
        let t = l.trim();
        !t.is_empty() && !t.starts_with('#')
    }) {
        return Err(Error::Parse {
            line: i + 1,
            message: format!("unexpected trailing content \"{}\"", l.trim()),
        });
    }
    // Report a dangling boundary edge at its own line.
    let edge_set: std::collections::HashSet<(usize, usize)> = elements
        .iter()
        .flat_map(|el| (0..3).map(move |i| super::edge_key(el[i], el[(i + 1) % 3])))
        .collect();
    for (line, b) in &boundary {
        if !edge_set.contains(&super::edge_key(b.nodes[0], b.nodes[1])) {
            return Err(Error::Parse {
                line: *line,
                message: format!("boundary edge {:?} is not an edge of any triangle", b.nodes),
            });
        }
    }
    let boundary = boundary.into_iter().map(|(_, b)| b).collect();
    Mesh::from_parts(order, nodes, n_vertices, elements, regions, boundary, h)
}
