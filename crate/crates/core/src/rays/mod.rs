//! Billiard rays in `Ω_R`: specular reflection at the obstacle and the
//! truncation boundary, with energy bookkeeping by the reflection
//! coefficient of the absorbing condition.
//!
//! Rays move at unit speed, so every length below is Euclidean.

mod unfold;

pub use unfold::{fold_square, unfold_hypercube, UnfoldedPath};

use crate::error::{Error, Result};
use crate::fem::ErrorRegion;
use crate::geometry::{Curve, ObstacleShape, Point, RayHit, Scene, TruncationShape};
use crate::meshing::BoundaryTag;
use crate::pade::{reflection_coefficient, PadeAbc};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::{FRAC_PI_2, TAU};

/// Hits closer to `π/2` than this end the path as tangential.
pub const TANGENCY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Ray {
    pub x: Point,
    /// Unit direction.
    pub xi: Point,
}

impl Ray {
    pub fn new(x: Point, xi: Point) -> Result<Self> {
        if !((xi.norm() - 1.0).abs() < 1e-12) || !x.x.is_finite() || !x.y.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "ray direction ({}, {}) is not a unit vector",
                xi.x, xi.y
            )));
        }
        Ok(Ray { x, xi })
    }

    pub fn at(&self, t: f64) -> Point {
        self.x + self.xi * t
    }

    pub fn reversed(&self) -> Ray {
        Ray {
            x: self.x,
            xi: -self.xi,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HitRecord {
    pub point: Point,
    pub boundary: BoundaryTag,
    /// Angle to the normal, in `[0, π/2]`.
    pub theta: f64,
    /// Length travelled since the previous hit (or the start).
    pub path_length: f64,
    /// Product of `α_ref` over the truncation hits so far, this one included.
    pub weight: f64,
    /// Outward unit normal of the curve that was hit.
    pub normal: Point,
    pub incoming: Point,
    pub outgoing: Point,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Termination {
    MaxBounces,
    MaxLength,
    Tangency,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RayPath {
    pub start: Ray,
    pub hits: Vec<HitRecord>,
    pub termination: Termination,
    /// Position and direction when tracing stopped.
    pub end: Ray,
    pub length: f64,
}

impl RayPath {
    pub fn weight(&self) -> f64 {
        self.hits.last().map_or(1.0, |h| h.weight)
    }
}

/// The ray leaving `x'` when the plane wave `e^{ik x·a}` hits the obstacle:
/// reflected on the illuminated side (`a·n ≤ 0`), unchanged in the shadow.
pub fn emanating_ray(obstacle: &ObstacleShape, point: Point, a: Point) -> Result<Ray> {
    let curve = obstacle.curve();
    let (s, dist) = curve.closest(point);
    if dist > 1e-9 * curve.max_radius().max(1.0) {
        return Err(Error::InvalidParameter(format!(
            "({}, {}) is not on the obstacle boundary (distance {dist:.2e})",
            point.x, point.y
        )));
    }
    emanating_ray_at(&curve, s, a)
}

fn emanating_ray_at(curve: &Curve, s: f64, a: Point) -> Result<Ray> {
    let n = curve.outward_normal(s)?;
    let an = a.dot(n);
    let xi = if an <= 0.0 { a - n * (2.0 * an) } else { a };
    Ray::new(curve.point(s), xi.unit())
}

fn reflect(xi: Point, n: Point) -> Point {
    (xi - n * (2.0 * xi.dot(n))).unit()
}

struct Boundaries {
    obstacle: Option<Curve>,
    truncation: Curve,
    eps: f64,
    scale: f64,
}

impl Boundaries {
    fn new(obstacle: Option<&ObstacleShape>, truncation: &TruncationShape) -> Self {
        Boundaries {
            obstacle: obstacle.map(|o| o.curve()),
            truncation: truncation.curve(),
            eps: 1e-12 * truncation.scale(),
            scale: truncation.scale(),
        }
    }

    fn next_hit(&self, ray: &Ray) -> Option<(BoundaryTag, f64, f64, Point)> {
        let tr = self
            .first_entry(&self.truncation, ray, 1.0)
            .map(|h| (BoundaryTag::GammaTr, h.t, h.s, h.point));
        let ob = self
            .obstacle
            .as_ref()
            .and_then(|c| self.first_entry(c, ray, -1.0))
            .map(|h| (BoundaryTag::GammaD, h.t, h.s, h.point));
        match (tr, ob) {
            (Some(a), Some(b)) => Some(if b.1 < a.1 { b } else { a }),
            (a, b) => a.or(b),
        }
    }

    /// First crossing of `curve` with `sign·(ξ·n) ≥ 0`, skipping spurious
    /// roots next to the start point of a near-grazing ray.
    fn first_entry(&self, curve: &Curve, ray: &Ray, sign: f64) -> Option<RayHit> {
        let mut eps = self.eps;
        loop {
            let hit = curve.ray_intersection(ray.x, ray.xi, eps)?;
            let wrong_side = hit.t < 1e-6 * self.scale
                && curve.outward_normal(hit.s).is_ok_and(|n| sign * ray.xi.dot(n) < 0.0);
            if !wrong_side {
                return Some(hit);
            }
            eps = hit.t * (1.0 + 1e-9) + self.eps;
        }
    }

    fn curve(&self, tag: BoundaryTag) -> &Curve {
        match tag {
            BoundaryTag::GammaD => self.obstacle.as_ref().expect("obstacle hit without obstacle"),
            _ => &self.truncation,
        }
    }

    fn inside(&self, p: Point) -> bool {
        self.truncation.contains(p) && !self.obstacle.as_ref().is_some_and(|c| c.contains(p))
    }
}

/// Follows `ray` through `Ω_R` with specular reflection at both boundaries.
///
/// At a truncation hit the weight is multiplied by `α_ref(θ)`. Tracing
/// stops after `max_bounces` hits, after length `max_length`, or at a hit
/// within [`TANGENCY_TOLERANCE`] of grazing. A chord leaving the domain
/// (numerical drift) is an error.
pub fn trace(scene: &Scene, ray: Ray, abc: &PadeAbc, max_bounces: usize, max_length: f64) -> Result<RayPath> {
    trace_in(&Boundaries::new(Some(&scene.obstacle), &scene.truncation), ray, abc, max_bounces, max_length)
}

/// As [`trace`] without an obstacle: the billiard in the truncation domain.
pub fn trace_truncation(
    truncation: &TruncationShape,
    ray: Ray,
    abc: &PadeAbc,
    max_bounces: usize,
    max_length: f64,
) -> Result<RayPath> {
    trace_in(&Boundaries::new(None, truncation), ray, abc, max_bounces, max_length)
}

fn trace_in(b: &Boundaries, start: Ray, abc: &PadeAbc, max_bounces: usize, max_length: f64) -> Result<RayPath> {
    let start = Ray::new(start.x, start.xi)?;
    if !(max_length > 0.0) {
        return Err(Error::InvalidParameter("max_length must be positive".into()));
    }
    let mut ray = start;
    let mut hits = Vec::new();
    let mut length = 0.0;
    let mut weight = 1.0;
    loop {
        if hits.len() >= max_bounces {
            return Ok(RayPath {
                start,
                hits,
                termination: Termination::MaxBounces,
                end: ray,
                length,
            });
        }
        let Some((tag, t, s, point)) = b.next_hit(&ray) else {
            return Err(Error::Ray(format!(
                "ray from ({:.6}, {:.6}) in direction ({:.6}, {:.6}) never meets a boundary after {} hits",
                ray.x.x,
                ray.x.y,
                ray.xi.x,
                ray.xi.y,
                hits.len()
            )));
        };
        if length + t >= max_length {
            let rest = max_length - length;
            return Ok(RayPath {
                start,
                hits,
                termination: Termination::MaxLength,
                end: Ray {
                    x: ray.at(rest),
                    xi: ray.xi,
                },
                length: max_length,
            });
        }
        let mid = ray.at(0.5 * t);
        if !b.inside(mid) {
            return Err(Error::Ray(format!(
                "chord from ({:.6}, {:.6}) to ({:.6}, {:.6}) leaves the domain after {} hits",
                ray.x.x,
                ray.x.y,
                point.x,
                point.y,
                hits.len()
            )));
        }
        let curve = b.curve(tag);
        let n = curve
            .outward_normal(s)
            .map_err(|e| Error::Ray(format!("ray hit a corner: {e}")))?;
        let theta = ray.xi.dot(n).abs().min(1.0).acos();
        length += t;
        let tangent = FRAC_PI_2 - theta < TANGENCY_TOLERANCE;
        if tag == BoundaryTag::GammaTr && !tangent {
            weight *= reflection_coefficient(abc, theta)?;
        }
        let outgoing = if tangent { ray.xi } else { reflect(ray.xi, n) };
        hits.push(HitRecord {
            point,
            boundary: tag,
            theta,
            path_length: t,
            weight,
            normal: n,
            incoming: ray.xi,
            outgoing,
        });
        ray = Ray { x: point, xi: outgoing };
        if tangent {
            return Ok(RayPath {
                start,
                hits,
                termination: Termination::Tangency,
                end: ray,
                length,
            });
        }
    }
}

/// First truncation hit of a ray, ignoring the obstacle.
pub fn first_truncation_hit(truncation: &TruncationShape, ray: Ray, abc: &PadeAbc) -> Result<HitRecord> {
    let path = trace_truncation(truncation, ray, abc, 1, f64::INFINITY)?;
    path.hits
        .first()
        .copied()
        .ok_or_else(|| Error::Ray("ray did not reach the truncation boundary".into()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DirectSample {
    /// Curve parameter on `∂Ω₋`.
    pub s: f64,
    pub ray: Ray,
    /// The ray reaches `Γ_tr` before meeting the obstacle again.
    pub direct: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DirectRaySet {
    pub fraction: f64,
    pub samples: Vec<DirectSample>,
    /// Emanating ray from the point of `∂Ω₋` maximising `x·a`.
    pub extremal: DirectSample,
}

/// Classifies emanating rays from `samples` points spread uniformly by
/// arclength over `∂Ω₋` (corners excluded).
pub fn direct_ray_set(
    obstacle: &ObstacleShape,
    truncation: &TruncationShape,
    a: Point,
    samples: usize,
) -> Result<DirectRaySet> {
    if samples == 0 {
        return Err(Error::InvalidParameter("direct_ray_set needs at least one sample".into()));
    }
    if (a.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidParameter("incident direction is not a unit vector".into()));
    }
    let b = Boundaries::new(Some(obstacle), truncation);
    let curve = b.obstacle.clone().expect("obstacle");
    let classify = |s: f64| -> Result<DirectSample> {
        let ray = emanating_ray_at(&curve, s, a)?;
        let direct = matches!(b.next_hit(&ray), Some((BoundaryTag::GammaTr, ..)));
        Ok(DirectSample { s, ray, direct })
    };
    let params = arclength_params(&curve, samples);
    let samples: Vec<DirectSample> = params.par_iter().map(|&s| classify(s)).collect::<Result<_>>()?;
    let fraction = samples.iter().filter(|d| d.direct).count() as f64 / samples.len() as f64;
    let extremal = classify(extremal_param(&curve, a))?;
    Ok(DirectRaySet {
        fraction,
        samples,
        extremal,
    })
}

/// `count` parameters equally spaced in arclength, each shifted to the
/// middle of its cell so that corners are never sampled.
fn arclength_params(curve: &Curve, count: usize) -> Vec<f64> {
    let fine = curve.resample(curve.length() / (8 * count).max(4096) as f64);
    let mut cum = vec![0.0];
    for i in 0..fine.len() {
        let next = fine[(i + 1) % fine.len()];
        cum.push(cum[i] + curve.point(fine[i]).dist(curve.point(next)));
    }
    let total = *cum.last().unwrap();
    let period = curve.period();
    let mut out = Vec::with_capacity(count);
    let mut j = 0;
    for i in 0..count {
        let target = total * (i as f64 + 0.5) / count as f64;
        while cum[j + 1] < target {
            j += 1;
        }
        let s0 = fine[j];
        let mut s1 = fine[(j + 1) % fine.len()];
        if s1 <= s0 {
            s1 += period;
        }
        let f = (target - cum[j]) / (cum[j + 1] - cum[j]);
        out.push((s0 + f * (s1 - s0)).rem_euclid(period));
    }
    out
}

/// Parameter maximising `x(s)·a`, away from corners.
fn extremal_param(curve: &Curve, a: Point) -> f64 {
    let period = curve.period();
    let params = arclength_params(curve, 4096);
    let corners = curve.corners();
    let near_corner = |s: f64| {
        corners.iter().any(|&c| {
            let d = (s - c).rem_euclid(period);
            d.min(period - d) < 1e-6 * period
        })
    };
    let (mut best, _) = params
        .iter()
        .map(|&s| (s, curve.point(s).dot(a)))
        .fold((params[0], f64::NEG_INFINITY), |acc, v| if v.1 > acc.1 { v } else { acc });
    // Golden-section refinement on the bracketing cell of a smooth arc.
    let h = period / 4096.0 * 2.0;
    let (mut lo, mut hi) = (best - h, best + h);
    if corners.iter().all(|&c| {
        let d = (c - lo).rem_euclid(period);
        d > hi - lo
    }) {
        let g = 0.5 * (5f64.sqrt() - 1.0);
        let f = |s: f64| curve.point(s).dot(a);
        for _ in 0..80 {
            let m1 = hi - g * (hi - lo);
            let m2 = lo + g * (hi - lo);
            if f(m1) < f(m2) {
                lo = m1;
            } else {
                hi = m2;
            }
        }
        best = 0.5 * (lo + hi);
    }
    let mut best = best.rem_euclid(period);
    if near_corner(best) {
        // A vertex is extremal: step onto the adjacent edge that stays highest.
        let step = 1e-6 * period;
        let (l, r) = ((best - step).rem_euclid(period), (best + step).rem_euclid(period));
        best = if curve.point(l).dot(a) >= curve.point(r).dot(a) { l } else { r };
    }
    best
}

/// Expected log-log slope of the relative error against `R`: `−2·m_ord`
/// for a circle centred at the origin, `0` for any other truncation.
pub fn predicted_exponent(truncation: &TruncationShape, abc: &PadeAbc) -> f64 {
    if truncation.is_circle() {
        2.0 * abc.m_ord() as f64
    } else {
        0.0
    }
}

/// HEURISTIC. Monte-Carlo average, over emanating rays from uniformly
/// random boundary points and incident directions, of the weight carried
/// back into `region` once the ray has been reflected by the truncation
/// boundary: the product of `α_ref` over the truncation hits before the
/// first re-entry, or 0 if the ray does not come back within the bounce
/// cap. Zero rays give 0.
pub fn reentrant_energy(scene: &Scene, abc: &PadeAbc, n_rays: usize, region: ErrorRegion, seed: u64) -> Result<f64> {
    if n_rays == 0 {
        return Ok(0.0);
    }
    let b = Boundaries::new(Some(&scene.obstacle), &scene.truncation);
    let curve = b.obstacle.clone().expect("obstacle");
    let params = arclength_params(&curve, 1 << 14);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draws: Vec<(f64, Point)> = (0..n_rays)
        .map(|_| {
            let s = params[rng.random_range(0..params.len())];
            let a = Point::polar(1.0, rng.random_range(0.0..TAU));
            (s, a)
        })
        .collect();
    let bounce_cap = 64;
    let values: Vec<f64> = draws
        .par_iter()
        .map(|&(s, a)| -> Result<f64> {
            let ray = emanating_ray_at(&curve, s, a)?;
            let path = trace_in(&b, ray, abc, bounce_cap, f64::INFINITY)?;
            let Some(first) = path.hits.iter().position(|h| h.boundary == BoundaryTag::GammaTr) else {
                return Ok(0.0);
            };
            for (i, hit) in path.hits.iter().enumerate().skip(first) {
                let Some(next) = path.hits.get(i + 1) else { break };
                let chord = Ray {
                    x: hit.point,
                    xi: hit.outgoing,
                };
                let enters = match region {
                    ErrorRegion::All => true,
                    ErrorRegion::Ball { center, radius } => segment_distance(chord, next.path_length, center) < radius,
                };
                if enters {
                    return Ok(hit.weight);
                }
            }
            Ok(0.0)
        })
        .collect::<Result<_>>()?;
    Ok(values.iter().sum::<f64>() / n_rays as f64)
}

fn segment_distance(ray: Ray, length: f64, p: Point) -> f64 {
    let t = (p - ray.x).dot(ray.xi).clamp(0.0, length);
    ray.at(t).dist(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ObstacleShape;

    fn disc_scene(r: f64) -> Scene {
        Scene::new(
            ObstacleShape::Disc {
                center: Point::ORIGIN,
                radius: 1.0,
            },
            TruncationShape::Circle { radius: r },
            None,
        )
        .unwrap()
    }

    #[test]
    fn emanating_examples() {
        let disc = ObstacleShape::Disc {
            center: Point::ORIGIN,
            radius: 1.0,
        };
        let a = Point::new(1.0, 0.0);
        let r = emanating_ray(&disc, Point::new(-1.0, 0.0), a).unwrap();
        assert!((r.xi - Point::new(-1.0, 0.0)).norm() < 1e-15);
        let r = emanating_ray(&disc, Point::new(0.0, 1.0), a).unwrap();
        assert!((r.xi - a).norm() < 1e-15);
        let h = 0.5f64.sqrt();
        let r = emanating_ray(&disc, Point::new(-h, h), a).unwrap();
        assert!((r.xi - Point::new(0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn radial_ray_bounces_back() {
        let scene = disc_scene(2.0);
        let ray = Ray::new(Point::new(1.0, 0.0), Point::new(1.0, 0.0)).unwrap();
        let path = trace(&scene, ray, &PadeAbc::impedance(), 2, 100.0).unwrap();
        let h = path.hits[0];
        assert_eq!(h.boundary, BoundaryTag::GammaTr);
        assert!(h.theta < 1e-12 && h.weight == 0.0);
        assert!((h.outgoing - Point::new(-1.0, 0.0)).norm() < 1e-15);
        assert_eq!(path.hits[1].boundary, BoundaryTag::GammaD);
        assert!((path.hits[1].point - Point::new(1.0, 0.0)).norm() < 1e-12);
    }
}
