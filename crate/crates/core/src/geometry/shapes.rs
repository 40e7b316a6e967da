use super::curve::{Curve, Piece, Piecewise, PolarCurve, PolarPreset};
use super::Point;
use crate::error::{Error, Result};
use std::f64::consts::FRAC_PI_2;

/// The scatterer `Ω₋`; its boundary carries the Dirichlet data.
#[derive(Debug, Clone, PartialEq)]
pub enum ObstacleShape {
    Disc { center: Point, radius: f64 },
    Polar(PolarCurve),
    Polygon { vertices: Vec<Point> },
}

/// Butterfly-shaped polar curve `ρ(θ) = (0.3 + sin²θ)(1.4 cos 2θ + 1.5)`, unscaled.
pub fn preset_butterfly() -> ObstacleShape {
    ObstacleShape::Polar(PolarCurve::from_preset(PolarPreset::Butterfly))
}

/// Twelve-vertex polygon with a cavity that traps rays.
pub fn preset_trapping_polygon() -> ObstacleShape {
    let v = [
        (0.5, 0.125),
        (0.5, 0.5),
        (-0.5, 0.5),
        (-0.5, -0.5),
        (0.8, -0.5),
        (0.8, -0.125),
        (0.55, -0.125),
        (0.55, -0.375),
        (-0.375, -0.375),
        (-0.375, 0.375),
        (0.25, 0.375),
        (0.25, 0.125),
    ];
    ObstacleShape::Polygon {
        vertices: v.iter().map(|&(x, y)| Point::new(x, y)).collect(),
    }
}

fn segments_cross(a: Point, b: Point, c: Point, d: Point) -> bool {
    let o1 = (b - a).cross(c - a);
    let o2 = (b - a).cross(d - a);
    let o3 = (d - c).cross(a - c);
    let o4 = (d - c).cross(b - c);
    o1 * o2 < 0.0 && o3 * o4 < 0.0
}

/// Brute-force check that no two non-adjacent edges intersect.
pub(crate) fn polygon_is_simple(vertices: &[Point]) -> bool {
    let n = vertices.len();
    for i in 0..n {
        let (a, b) = (vertices[i], vertices[(i + 1) % n]);
        for j in i + 1..n {
            if j == i || (j + 1) % n == i || j == (i + 1) % n {
                continue;
            }
            let (c, d) = (vertices[j], vertices[(j + 1) % n]);
            if segments_cross(a, b, c, d) {
                return false;
            }
        }
    }
    true
}

impl ObstacleShape {
    pub fn validate(&self) -> Result<()> {
        match self {
            ObstacleShape::Disc { radius, .. } => {
                if !(*radius > 0.0) {
                    return Err(Error::Geometry(format!("disc radius {radius} must be positive")));
                }
            }
            ObstacleShape::Polar(_) => {}
            ObstacleShape::Polygon { vertices } => {
                if vertices.len() < 3 {
                    return Err(Error::Geometry("a polygon needs at least 3 vertices".into()));
                }
                if !polygon_is_simple(vertices) {
                    return Err(Error::Geometry("polygon edges intersect".into()));
                }
            }
        }
        Ok(())
    }

    /// Boundary curve `∂Ω₋`. Disc and polar curves are parametrized by angle,
    /// polygons by arclength from the first vertex.
    pub fn curve(&self) -> Curve {
        match self {
            ObstacleShape::Disc { center, radius } => Curve::Circle {
                center: *center,
                radius: *radius,
            },
            ObstacleShape::Polar(pc) => Curve::Polar(pc.clone()),
            ObstacleShape::Polygon { vertices } => {
                Curve::polygon(vertices).expect("validated polygon")
            }
        }
    }

    pub fn point(&self, s: f64) -> Point {
        self.curve().point(s)
    }

    /// Unit normal pointing out of the obstacle (into the computational domain).
    pub fn outward_normal(&self, s: f64) -> Result<Point> {
        self.curve().outward_normal(s)
    }

    pub fn contains(&self, p: Point) -> bool {
        self.curve().contains(p)
    }

    /// Signed distance to `∂Ω₋`, negative inside the obstacle.
    pub fn distance_to_boundary(&self, p: Point) -> f64 {
        self.curve().signed_distance(p)
    }

    pub fn max_radius(&self) -> f64 {
        self.curve().max_radius()
    }

    /// A point inside the obstacle (the origin for the presets).
    pub fn interior_point(&self) -> Point {
        match self {
            ObstacleShape::Disc { center, .. } => *center,
            ObstacleShape::Polar(_) => Point::ORIGIN,
            ObstacleShape::Polygon { vertices } => {
                // Centroid of an ear's triangle lies inside a simple polygon's ear.
                let curve = self.curve();
                let c = vertices.iter().fold(Point::ORIGIN, |acc, &v| acc + v)
                    * (1.0 / vertices.len() as f64);
                if curve.contains(c) {
                    return c;
                }
                let n = vertices.len();
                (0..n)
                    .map(|i| {
                        (vertices[(i + n - 1) % n] + vertices[i] + vertices[(i + 1) % n])
                            * (1.0 / 3.0)
                    })
                    .find(|&p| curve.contains(p))
                    .unwrap_or(c)
            }
        }
    }
}

/// The artificial boundary `Γ_tr` on which the absorbing condition is imposed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TruncationShape {
    Circle { radius: f64 },
    /// `[−half_side, half_side]²`, corners optionally rounded by circular arcs.
    Square { half_side: f64, corner_radius: f64 },
}

impl TruncationShape {
    pub fn validate(&self) -> Result<()> {
        match *self {
            TruncationShape::Circle { radius } if !(radius > 0.0) => {
                Err(Error::Geometry(format!("truncation radius {radius} must be positive")))
            }
            TruncationShape::Square {
                half_side,
                corner_radius,
            } if !(half_side > 0.0) || !(0.0..half_side).contains(&corner_radius) => {
                Err(Error::Geometry(format!(
                    "square half side {half_side} must be positive and exceed corner radius {corner_radius} ≥ 0"
                )))
            }
            _ => Ok(()),
        }
    }

    /// The scale `R`: radius of the circle or half side of the square.
    pub fn scale(&self) -> f64 {
        match *self {
            TruncationShape::Circle { radius } => radius,
            TruncationShape::Square { half_side, .. } => half_side,
        }
    }

    pub fn is_circle(&self) -> bool {
        matches!(self, TruncationShape::Circle { .. })
    }

    /// Circles are parametrized by angle; squares by arclength from the
    /// bottom-right corner (or the start of the right edge when rounded).
    pub fn curve(&self) -> Curve {
        match *self {
            TruncationShape::Circle { radius } => Curve::Circle {
                center: Point::ORIGIN,
                radius,
            },
            TruncationShape::Square {
                half_side: r,
                corner_radius: rc,
            } => {
                if rc == 0.0 {
                    return Curve::polygon(&[
                        Point::new(r, -r),
                        Point::new(r, r),
                        Point::new(-r, r),
                        Point::new(-r, -r),
                    ])
                    .expect("square");
                }
                let s = r - rc;
                let corners = [
                    Point::new(s, s),
                    Point::new(-s, s),
                    Point::new(-s, -s),
                    Point::new(s, -s),
                ];
                let mut pieces = Vec::with_capacity(8);
                for (i, &c) in corners.iter().enumerate() {
                    let start = i as f64 * FRAC_PI_2;
                    let prev = if i == 0 { corners[3] } else { corners[i - 1] };
                    let out_prev = Point::polar(rc, start);
                    pieces.push(Piece::Segment {
                        a: prev + out_prev,
                        b: c + out_prev,
                    });
                    pieces.push(Piece::Arc {
                        center: c,
                        radius: rc,
                        start,
                        sweep: FRAC_PI_2,
                    });
                }
                Curve::Piecewise(Piecewise::new(pieces).expect("rounded square"))
            }
        }
    }

    pub fn contains(&self, p: Point) -> bool {
        self.curve().contains(p)
    }

    pub fn outward_normal(&self, s: f64) -> Result<Point> {
        self.curve().outward_normal(s)
    }

    /// Largest distance from the origin to the boundary.
    pub fn max_radius(&self) -> f64 {
        match *self {
            TruncationShape::Circle { radius } => radius,
            TruncationShape::Square {
                half_side,
                corner_radius,
            } => (half_side - corner_radius) * 2f64.sqrt() + corner_radius,
        }
    }

    /// Smallest distance from the origin to the boundary.
    pub fn min_radius(&self) -> f64 {
        self.scale()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn butterfly_values() {
        let ObstacleShape::Polar(pc) = preset_butterfly() else {
            unreachable!()
        };
        assert!((pc.rho(0.0) - 0.87).abs() < 1e-15);
        assert!((pc.rho(FRAC_PI_2) - 0.13).abs() < 1e-14);
        assert!((pc.rho(2.0 * PI) - pc.rho(0.0)).abs() < 1e-14);
        assert!(pc.samples().len() >= 720);
    }

    #[test]
    fn trapping_polygon_is_simple() {
        let shape = preset_trapping_polygon();
        let ObstacleShape::Polygon { vertices } = &shape else {
            unreachable!()
        };
        assert_eq!(vertices.len(), 12);
        assert_eq!(vertices[0], Point::new(0.5, 0.125));
        assert_eq!(vertices[11], Point::new(0.25, 0.125));
        assert!(polygon_is_simple(vertices));
        shape.validate().unwrap();
    }

    #[test]
    fn self_intersecting_polygon_rejected() {
        let bow = ObstacleShape::Polygon {
            vertices: vec![
                Point::new(0.0, 0.0),
                Point::new(1.0, 1.0),
                Point::new(1.0, 0.0),
                Point::new(0.0, 1.0),
            ],
        };
        assert!(bow.validate().is_err());
    }

    #[test]
    fn square_normal_and_corners() {
        let sq = TruncationShape::Square {
            half_side: 4.0,
            corner_radius: 0.0,
        };
        // Right edge runs from (4,−4) to (4,4); its midpoint is at arclength 4.
        let n = sq.outward_normal(4.0).unwrap();
        assert!((n.x - 1.0).abs() < 1e-15 && n.y.abs() < 1e-15);
        assert!(sq.outward_normal(8.0).is_err());
        let rounded = TruncationShape::Square {
            half_side: 4.0,
            corner_radius: 0.5,
        };
        assert!(rounded.curve().corners().is_empty());
        assert!((rounded.max_radius() - (3.5 * 2f64.sqrt() + 0.5)).abs() < 1e-15);
    }

    #[test]
    fn polygon_interior_point_is_inside() {
        let shape = preset_trapping_polygon();
        assert!(shape.contains(shape.interior_point()));
    }
}
