//! Square billiards by unfolding: reflecting the square `[−L/2, L/2]²`
//! through its edge lines tiles the plane, and a billiard path becomes the
//! straight line `x + tξ`.

use super::Ray;
use crate::error::{Error, Result};
use crate::geometry::Point;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UnfoldedPath {
    /// Endpoint of the straight line in the unfolded plane.
    pub unfolded_end: Point,
    /// The same state mapped back into the square.
    pub end: Ray,
    /// Number of wall crossings along the way.
    pub wall_hits: usize,
    /// The line passed within `1e−12·L` of a corner of the tiling.
    pub degenerate: bool,
}

/// Folds one unfolded coordinate back into `[−L/2, L/2]`; the flag is true
/// when an odd number of reflections reverses the direction.
fn fold(side: f64, y: f64) -> (f64, bool) {
    let u = (y + 0.5 * side).rem_euclid(2.0 * side);
    if u <= side {
        (u - 0.5 * side, false)
    } else {
        (1.5 * side - u, true)
    }
}

/// Billiard state after length `t` in the square of side `side`.
pub fn fold_square(side: f64, ray: Ray, t: f64) -> Ray {
    let y = ray.at(t);
    let (x, fx) = fold(side, y.x);
    let (yy, fy) = fold(side, y.y);
    Ray {
        x: Point::new(x, yy),
        xi: Point::new(
            if fx { -ray.xi.x } else { ray.xi.x },
            if fy { -ray.xi.y } else { ray.xi.y },
        ),
    }
}

fn crossings(side: f64, x0: f64, v: f64, length: f64) -> Vec<f64> {
    if v == 0.0 {
        return Vec::new();
    }
    // Walls of the tiling sit at x = L/2 + mL.
    let (lo, hi) = {
        let a = x0;
        let b = x0 + v * length;
        (a.min(b), a.max(b))
    };
    let first = ((lo - 0.5 * side) / side).ceil() as i64;
    let last = ((hi - 0.5 * side) / side).floor() as i64;
    (first..=last)
        .map(|m| (0.5 * side + m as f64 * side - x0) / v)
        .filter(|&t| t > 0.0 && t <= length)
        .collect()
}

/// Evolves `ray` for length `length` in the square `[−L/2, L/2]²`
/// (`L = side`) by unfolding.
pub fn unfold_hypercube(side: f64, ray: Ray, length: f64) -> Result<UnfoldedPath> {
    if !(side > 0.0 && length >= 0.0) {
        return Err(Error::InvalidParameter("side must be positive and length non-negative".into()));
    }
    let half = 0.5 * side;
    if ray.x.x.abs() > half || ray.x.y.abs() > half {
        return Err(Error::InvalidParameter(format!(
            "start ({}, {}) is outside the square of side {side}",
            ray.x.x, ray.x.y
        )));
    }
    let tol = 1e-12 * side;
    let cx = crossings(side, ray.x.x, ray.xi.x, length);
    let cy = crossings(side, ray.x.y, ray.xi.y, length);
    let near_wall = |y: f64| {
        let u = (y + half).rem_euclid(side);
        u.min(side - u) < tol
    };
    let degenerate = cx.iter().any(|&t| near_wall(ray.at(t).y)) || cy.iter().any(|&t| near_wall(ray.at(t).x));
    Ok(UnfoldedPath {
        unfolded_end: ray.at(length),
        end: fold_square(side, ray, length),
        wall_hits: cx.len() + cy.len(),
        degenerate,
    })
}
