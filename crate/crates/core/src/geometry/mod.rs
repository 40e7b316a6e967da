//! Obstacles, truncation boundaries and scenes.
//!
//! Every boundary is a closed, counter-clockwise [`Curve`] with an explicit
//! parametrization; shapes only add semantics (which side is the obstacle,
//! presets, serialization).

mod curve;
mod scene;
mod shapes;

pub use curve::{Curve, Piece, Piecewise, PolarCurve, PolarPreset, RayHit};
pub use scene::{PmlLayout, Scene};
pub use shapes::{preset_butterfly, preset_trapping_polygon, ObstacleShape, TruncationShape};

use serde::{Deserialize, Serialize};
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl From<[f64; 2]> for Point {
    fn from([x, y]: [f64; 2]) -> Self {
        Point { x, y }
    }
}

impl From<Point> for [f64; 2] {
    fn from(p: Point) -> Self {
        [p.x, p.y]
    }
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn polar(r: f64, angle: f64) -> Self {
        Point::new(r * angle.cos(), r * angle.sin())
    }

    pub fn dot(self, o: Point) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the 2D cross product.
    pub fn cross(self, o: Point) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn norm2(self) -> f64 {
        self.dot(self)
    }

    pub fn dist(self, o: Point) -> f64 {
        (self - o).norm()
    }

    pub fn unit(self) -> Point {
        self * (1.0 / self.norm())
    }

    /// Rotation by −π/2: the outward normal of a counter-clockwise tangent.
    pub fn perp_cw(self) -> Point {
        Point::new(self.y, -self.x)
    }

    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }

    pub fn lerp(self, o: Point, t: f64) -> Point {
        self + (o - self) * t
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl AddAssign for Point {
    fn add_assign(&mut self, o: Point) {
        self.x += o.x;
        self.y += o.y;
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, s: f64) -> Point {
        Point::new(self.x * s, self.y * s)
    }
}

impl Neg for Point {
    type Output = Point;
    fn neg(self) -> Point {
        Point::new(-self.x, -self.y)
    }
}

/// Unit vector at `angle` from the x-axis, e.g. an incident direction.
pub fn direction(angle: f64) -> Point {
    Point::new(angle.cos(), angle.sin())
}
