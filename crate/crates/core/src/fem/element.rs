//! Quadrature rules and isoparametric Lagrange elements on triangles and edges.

use crate::geometry::Point;
use crate::meshing::ElementOrder;

/// Seven-point rule exact for degree 5 on the reference triangle
/// `{ξ, η ≥ 0, ξ + η ≤ 1}`; weights sum to the reference area 1/2.
pub fn triangle_rule() -> [([f64; 2], f64); 7] {
    let s15 = 15f64.sqrt();
    let (b1, b2) = ((6.0 + s15) / 21.0, (6.0 - s15) / 21.0);
    let (a1, a2) = (1.0 - 2.0 * b1, 1.0 - 2.0 * b2);
    let (w1, w2) = ((155.0 + s15) / 2400.0, (155.0 - s15) / 2400.0);
    [
        ([1.0 / 3.0, 1.0 / 3.0], 9.0 / 80.0),
        ([b1, b1], w1),
        ([a1, b1], w1),
        ([b1, a1], w1),
        ([b2, b2], w2),
        ([a2, b2], w2),
        ([b2, a2], w2),
    ]
}

/// Four-point Gauss–Legendre rule on `[−1, 1]`.
pub fn gauss4() -> [(f64, f64); 4] {
    let r = (6.0f64 / 5.0).sqrt();
    let x1 = (3.0 / 7.0 - 2.0 / 7.0 * r).sqrt();
    let x2 = (3.0 / 7.0 + 2.0 / 7.0 * r).sqrt();
    let w1 = (18.0 + 30f64.sqrt()) / 36.0;
    let w2 = (18.0 - 30f64.sqrt()) / 36.0;
    [(-x2, w2), (-x1, w1), (x1, w1), (x2, w2)]
}

/// Shape function values and reference gradients at `(ξ, η)`.
pub fn shape(order: ElementOrder, xi: [f64; 2]) -> (Vec<f64>, Vec<[f64; 2]>) {
    let l = [1.0 - xi[0] - xi[1], xi[0], xi[1]];
    let dl = [[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]];
    match order {
        ElementOrder::P1 => (l.to_vec(), dl.to_vec()),
        ElementOrder::P2 => {
            let mut v = Vec::with_capacity(6);
            let mut g = Vec::with_capacity(6);
            for i in 0..3 {
                v.push(l[i] * (2.0 * l[i] - 1.0));
                let f = 4.0 * l[i] - 1.0;
                g.push([f * dl[i][0], f * dl[i][1]]);
            }
            for i in 0..3 {
                let j = (i + 1) % 3;
                v.push(4.0 * l[i] * l[j]);
                g.push([
                    4.0 * (dl[i][0] * l[j] + l[i] * dl[j][0]),
                    4.0 * (dl[i][1] * l[j] + l[i] * dl[j][1]),
                ]);
            }
            (v, g)
        }
    }
}

/// Edge shape functions on `t ∈ [−1, 1]` for nodes `[start, end, (mid)]`,
/// with their `t`-derivatives.
pub fn edge_shape(order: ElementOrder, t: f64) -> (Vec<f64>, Vec<f64>) {
    match order {
        ElementOrder::P1 => (vec![0.5 * (1.0 - t), 0.5 * (1.0 + t)], vec![-0.5, 0.5]),
        ElementOrder::P2 => (
            vec![0.5 * t * (t - 1.0), 0.5 * t * (t + 1.0), 1.0 - t * t],
            vec![t - 0.5, t + 0.5, -2.0 * t],
        ),
    }
}

/// Quadrature data of one isoparametric triangle.
pub struct TriangleQuadrature {
    pub points: Vec<Point>,
    /// Weight times `|det J|`.
    pub weights: Vec<f64>,
    /// `values[q][i]`.
    pub values: Vec<Vec<f64>>,
    /// Physical gradients `grads[q][i]`.
    pub grads: Vec<Vec<Point>>,
}

/// Shape data tabulated once per element order.
pub struct ReferenceElement {
    pub order: ElementOrder,
    rule: Vec<([f64; 2], f64)>,
    values: Vec<Vec<f64>>,
    grads: Vec<Vec<[f64; 2]>>,
}

impl ReferenceElement {
    pub fn new(order: ElementOrder) -> Self {
        let rule = triangle_rule().to_vec();
        let (values, grads) = rule.iter().map(|(xi, _)| shape(order, *xi)).unzip();
        ReferenceElement {
            order,
            rule,
            values,
            grads,
        }
    }

    pub fn num_points(&self) -> usize {
        self.rule.len()
    }

    /// Maps the rule to the element with node coordinates `x`.
    pub fn evaluate(&self, x: &[Point]) -> TriangleQuadrature {
        let nq = self.rule.len();
        let mut out = TriangleQuadrature {
            points: Vec::with_capacity(nq),
            weights: Vec::with_capacity(nq),
            values: self.values.clone(),
            grads: Vec::with_capacity(nq),
        };
        for q in 0..nq {
            let (mut p, mut jx, mut jy) = (Point::ORIGIN, Point::ORIGIN, Point::ORIGIN);
            for (i, xi) in x.iter().enumerate() {
                p += *xi * self.values[q][i];
                jx += *xi * self.grads[q][i][0];
                jy += *xi * self.grads[q][i][1];
            }
            // J = [jx jy] (columns ∂x/∂ξ, ∂x/∂η).
            let det = jx.cross(jy);
            let inv = 1.0 / det;
            let grads = self.grads[q]
                .iter()
                .map(|g| {
                    Point::new(
                        (jy.y * g[0] - jx.y * g[1]) * inv,
                        (-jy.x * g[0] + jx.x * g[1]) * inv,
                    )
                })
                .collect();
            out.points.push(p);
            out.weights.push(self.rule[q].1 * det.abs());
            out.grads.push(grads);
        }
        out
    }
}

/// Quadrature data of one isoparametric boundary edge.
pub struct EdgeQuadrature {
    pub points: Vec<Point>,
    /// Weight times `|dx/dt|`.
    pub weights: Vec<f64>,
    pub values: Vec<Vec<f64>>,
    /// Arclength derivatives `∂_s φ_i`.
    pub ds: Vec<Vec<f64>>,
    /// Unit tangent in the edge direction.
    pub tangents: Vec<Point>,
}

pub fn edge_quadrature(order: ElementOrder, x: &[Point]) -> EdgeQuadrature {
    let rule = gauss4();
    let mut out = EdgeQuadrature {
        points: Vec::with_capacity(4),
        weights: Vec::with_capacity(4),
        values: Vec::with_capacity(4),
        ds: Vec::with_capacity(4),
        tangents: Vec::with_capacity(4),
    };
    for (t, w) in rule {
        let (v, dv) = edge_shape(order, t);
        let (mut p, mut dx) = (Point::ORIGIN, Point::ORIGIN);
        for i in 0..v.len() {
            p += x[i] * v[i];
            dx += x[i] * dv[i];
        }
        let jac = dx.norm();
        out.points.push(p);
        out.weights.push(w * jac);
        out.ds.push(dv.iter().map(|d| d / jac).collect());
        out.values.push(v);
        out.tangents.push(dx * (1.0 / jac));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_rule_is_degree_five() {
        // ∫ ξ^a η^b over the reference triangle = a! b! / (a + b + 2)!.
        let fact = |n: u32| (1..=n).product::<u32>().max(1) as f64;
        for a in 0..=5u32 {
            for b in 0..=(5 - a) {
                let exact = fact(a) * fact(b) / fact(a + b + 2);
                let quad: f64 = triangle_rule()
                    .iter()
                    .map(|(x, w)| w * x[0].powi(a as i32) * x[1].powi(b as i32))
                    .sum();
                assert!((quad - exact).abs() < 1e-15, "{a} {b}");
            }
        }
    }

    #[test]
    fn gauss_is_degree_seven() {
        for n in 0..=7 {
            let exact = if n % 2 == 1 { 0.0 } else { 2.0 / (n as f64 + 1.0) };
            let quad: f64 = gauss4().iter().map(|(x, w)| w * x.powi(n)).sum();
            assert!((quad - exact).abs() < 1e-14);
        }
    }

    #[test]
    fn p2_partition_of_unity_and_nodality() {
        let nodes = [
            [0.0, 0.0],
            [1.0, 0.0],
            [0.0, 1.0],
            [0.5, 0.0],
            [0.5, 0.5],
            [0.0, 0.5],
        ];
        for (i, xi) in nodes.iter().enumerate() {
            let (v, g) = shape(ElementOrder::P2, *xi);
            for j in 0..6 {
                assert!((v[j] - if i == j { 1.0 } else { 0.0 }).abs() < 1e-15);
            }
            let gs = g.iter().fold([0.0, 0.0], |a, b| [a[0] + b[0], a[1] + b[1]]);
            assert!(gs[0].abs() < 1e-14 && gs[1].abs() < 1e-14);
        }
    }

    #[test]
    fn isoparametric_area_of_curved_element() {
        // Quarter-disc sector approximated by one curved P2 triangle.
        let r = 1.0;
        let mid = Point::polar(r, std::f64::consts::FRAC_PI_4);
        let x = [
            Point::ORIGIN,
            Point::new(r, 0.0),
            Point::new(0.0, r),
            Point::new(0.5, 0.0),
            mid,
            Point::new(0.0, 0.5),
        ];
        let q = ReferenceElement::new(ElementOrder::P2).evaluate(&x);
        // Straight triangle plus the parabolic segment (2/3)·chord·sagitta.
        let exact = 0.5 + 2.0 / 3.0 * 2f64.sqrt() * (1.0 - 0.5 * 2f64.sqrt());
        let area: f64 = q.weights.iter().sum();
        assert!((area - exact).abs() < 1e-14, "{area} vs {exact}");
        // Gradients reproduce the linear function x exactly.
        for g in &q.grads {
            let gx = (0..6).fold(Point::ORIGIN, |acc, i| acc + g[i] * x[i].x);
            assert!((gx.x - 1.0).abs() < 1e-12 && gx.y.abs() < 1e-12);
        }
    }
}
