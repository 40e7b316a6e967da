use super::Point;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolarPreset {
    /// `ρ(θ) = (0.3 + sin²θ)(1.4 cos 2θ + 1.5)`.
    Butterfly,
}

impl PolarPreset {
    pub fn rho(self, theta: f64) -> f64 {
        match self {
            PolarPreset::Butterfly => {
                let s = theta.sin();
                (0.3 + s * s) * (1.4 * (2.0 * theta).cos() + 1.5)
            }
        }
    }

    pub fn drho(self, theta: f64) -> f64 {
        match self {
            PolarPreset::Butterfly => {
                let s = theta.sin();
                let s2 = (2.0 * theta).sin();
                s2 * (1.4 * (2.0 * theta).cos() + 1.5) - (0.3 + s * s) * 2.8 * s2
            }
        }
    }
}

/// Star-shaped curve `r = ρ(θ)` about the origin. Presets keep their analytic
/// formula; tabulated curves are evaluated by trigonometric interpolation.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarCurve {
    preset: Option<PolarPreset>,
    samples: Vec<f64>,
    // ρ(θ) = a₀ + Σ aₘ cos mθ + bₘ sin mθ
    cos_coeffs: Vec<f64>,
    sin_coeffs: Vec<f64>,
}

impl PolarCurve {
    pub const PRESET_SAMPLES: usize = 720;

    pub fn from_preset(preset: PolarPreset) -> Self {
        let n = Self::PRESET_SAMPLES;
        let samples = (0..n).map(|j| preset.rho(TAU * j as f64 / n as f64)).collect();
        PolarCurve {
            preset: Some(preset),
            samples,
            cos_coeffs: Vec::new(),
            sin_coeffs: Vec::new(),
        }
    }

    /// Radii at `n` equispaced angles `2πj/n`, starting at θ = 0.
    pub fn tabulated(samples: Vec<f64>) -> Result<Self> {
        let n = samples.len();
        if n < 8 {
            return Err(Error::Geometry(format!(
                "a tabulated polar curve needs at least 8 samples, got {n}"
            )));
        }
        if let Some(bad) = samples.iter().find(|r| !(r.is_finite() && **r > 0.0)) {
            return Err(Error::Geometry(format!("polar radius {bad} must be positive")));
        }
        let half = (n - 1) / 2;
        let mut cos_coeffs = vec![0.0; half + 1];
        let mut sin_coeffs = vec![0.0; half + 1];
        for (m, (a, b)) in cos_coeffs.iter_mut().zip(sin_coeffs.iter_mut()).enumerate() {
            let (mut sa, mut sb) = (0.0, 0.0);
            for (j, r) in samples.iter().enumerate() {
                let phase = TAU * (m * j) as f64 / n as f64;
                sa += r * phase.cos();
                sb += r * phase.sin();
            }
            let scale = if m == 0 { 1.0 } else { 2.0 } / n as f64;
            *a = sa * scale;
            *b = sb * scale;
        }
        // Keep a Nyquist term out: odd-length interpolation is exact, even-length
        // drops the alternating mode, which a smooth curve does not carry.
        Ok(PolarCurve {
            preset: None,
            samples,
            cos_coeffs,
            sin_coeffs,
        })
    }

    pub fn preset(&self) -> Option<PolarPreset> {
        self.preset
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn rho(&self, theta: f64) -> f64 {
        match self.preset {
            Some(p) => p.rho(theta),
            None => {
                let mut r = self.cos_coeffs[0];
                for m in 1..self.cos_coeffs.len() {
                    let (s, c) = (m as f64 * theta).sin_cos();
                    r += self.cos_coeffs[m] * c + self.sin_coeffs[m] * s;
                }
                r
            }
        }
    }

    pub fn drho(&self, theta: f64) -> f64 {
        match self.preset {
            Some(p) => p.drho(theta),
            None => {
                let mut d = 0.0;
                for m in 1..self.cos_coeffs.len() {
                    let mf = m as f64;
                    let (s, c) = (mf * theta).sin_cos();
                    d += mf * (-self.cos_coeffs[m] * s + self.sin_coeffs[m] * c);
                }
                d
            }
        }
    }

    pub fn max_radius(&self) -> f64 {
        let n = 20_000;
        (0..n)
            .map(|j| self.rho(TAU * j as f64 / n as f64))
            .fold(0.0, f64::max)
    }
}

/// One smooth piece of a [`Piecewise`] curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Piece {
    Segment { a: Point, b: Point },
    /// Counter-clockwise for positive `sweep`.
    Arc {
        center: Point,
        radius: f64,
        start: f64,
        sweep: f64,
    },
}

impl Piece {
    pub fn length(&self) -> f64 {
        match *self {
            Piece::Segment { a, b } => a.dist(b),
            Piece::Arc { radius, sweep, .. } => radius * sweep.abs(),
        }
    }

    fn point(&self, l: f64) -> Point {
        match *self {
            Piece::Segment { a, b } => a.lerp(b, l / a.dist(b)),
            Piece::Arc {
                center,
                radius,
                start,
                sweep,
            } => center + Point::polar(radius, start + sweep.signum() * l / radius),
        }
    }

    fn tangent(&self, l: f64) -> Point {
        match *self {
            Piece::Segment { a, b } => (b - a).unit(),
            Piece::Arc { start, sweep, radius, .. } => {
                let phi = start + sweep.signum() * l / radius;
                Point::new(-phi.sin(), phi.cos()) * sweep.signum()
            }
        }
    }

    fn closest(&self, p: Point) -> (f64, f64) {
        match *self {
            Piece::Segment { a, b } => {
                let d = b - a;
                let len = d.norm();
                let l = ((p - a).dot(d) / len).clamp(0.0, len);
                (l, p.dist(a + d * (l / len)))
            }
            Piece::Arc {
                center,
                radius,
                start,
                sweep,
            } => {
                let phi = (p - center).angle();
                let rel = wrap_positive((phi - start) * sweep.signum());
                let len = self.length();
                if rel * radius <= len {
                    return (rel * radius, p.dist(self.point(rel * radius)));
                }
                let (d0, d1) = (p.dist(self.point(0.0)), p.dist(self.point(len)));
                if d0 <= d1 {
                    (0.0, d0)
                } else {
                    (len, d1)
                }
            }
        }
    }

    /// All intersection parameters `t > eps` of `origin + t·dir` with the piece,
    /// paired with the local arclength.
    fn intersections(&self, origin: Point, dir: Point, eps: f64, out: &mut Vec<(f64, f64)>) {
        match *self {
            Piece::Segment { a, b } => {
                let e = b - a;
                let denom = dir.cross(e);
                if denom.abs() < 1e-300 {
                    return;
                }
                let w = a - origin;
                let t = w.cross(e) / denom;
                let u = w.cross(dir) / denom;
                if t > eps && (0.0..=1.0).contains(&u) {
                    out.push((t, u * e.norm()));
                }
            }
            Piece::Arc {
                center,
                radius,
                start,
                sweep,
            } => {
                for t in circle_roots(origin, dir, center, radius) {
                    if t > eps {
                        let phi = (origin + dir * t - center).angle();
                        let rel = wrap_positive((phi - start) * sweep.signum());
                        if rel <= sweep.abs() + 1e-14 {
                            out.push((t, rel.min(sweep.abs()) * radius));
                        }
                    }
                }
            }
        }
    }
}

fn wrap_positive(a: f64) -> f64 {
    let r = a.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Roots of `|origin + t·dir − center| = radius` for unit `dir`, ascending.
fn circle_roots(origin: Point, dir: Point, center: Point, radius: f64) -> Vec<f64> {
    let w = origin - center;
    let b = w.dot(dir);
    let c = w.norm2() - radius * radius;
    let disc = b * b - c;
    if disc < 0.0 {
        return Vec::new();
    }
    let sq = disc.sqrt();
    // Cancellation-free pair.
    let q = -b - b.signum() * sq;
    let (t1, t2) = if q == 0.0 { (0.0, 0.0) } else { (q, c / q) };
    let (lo, hi) = if t1 < t2 { (t1, t2) } else { (t2, t1) };
    vec![lo, hi]
}

/// Closed chain of segments and arcs, parametrized by arclength from the start
/// of the first piece.
#[derive(Debug, Clone, PartialEq)]
pub struct Piecewise {
    pieces: Vec<Piece>,
    offsets: Vec<f64>,
    total: f64,
}

impl Piecewise {
    pub fn new(pieces: Vec<Piece>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::Geometry("empty piecewise curve".into()));
        }
        let mut offsets = Vec::with_capacity(pieces.len() + 1);
        let mut total = 0.0;
        for piece in &pieces {
            let len = piece.length();
            if !(len > 0.0) {
                return Err(Error::Geometry("degenerate curve piece of zero length".into()));
            }
            offsets.push(total);
            total += len;
        }
        offsets.push(total);
        for i in 0..pieces.len() {
            let end = pieces[i].point(pieces[i].length());
            let next = pieces[(i + 1) % pieces.len()].point(0.0);
            if end.dist(next) > 1e-9 * (1.0 + total) {
                return Err(Error::Geometry(format!("curve pieces {i} and {} do not join", i + 1)));
            }
        }
        Ok(Piecewise {
            pieces,
            offsets,
            total,
        })
    }

    /// Closed polygon through `vertices` (the last joins back to the first).
    pub fn polygon(vertices: &[Point]) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::Geometry("a polygon needs at least 3 vertices".into()));
        }
        let pieces = (0..vertices.len())
            .map(|i| Piece::Segment {
                a: vertices[i],
                b: vertices[(i + 1) % vertices.len()],
            })
            .collect();
        Self::new(pieces)
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    /// Arclength at which piece `i` starts.
    pub fn offset(&self, i: usize) -> f64 {
        self.offsets[i]
    }

    fn locate(&self, s: f64) -> (usize, f64) {
        let s = s.rem_euclid(self.total);
        let i = match self.offsets.binary_search_by(|o| o.partial_cmp(&s).unwrap()) {
            Ok(i) => i.min(self.pieces.len() - 1),
            Err(i) => i - 1,
        };
        (i, (s - self.offsets[i]).min(self.pieces[i].length()))
    }

    fn joint_is_corner(&self, i: usize) -> bool {
        let prev = &self.pieces[(i + self.pieces.len() - 1) % self.pieces.len()];
        let t_in = prev.tangent(prev.length());
        let t_out = self.pieces[i].tangent(0.0);
        t_in.cross(t_out).abs() > 1e-9 || t_in.dot(t_out) < 0.0
    }

    fn signed_area(&self) -> f64 {
        let n = 64;
        let mut area = 0.0;
        for piece in &self.pieces {
            let len = piece.length();
            let steps = match piece {
                Piece::Segment { .. } => 1,
                Piece::Arc { .. } => n,
            };
            for j in 0..steps {
                let a = piece.point(len * j as f64 / steps as f64);
                let b = piece.point(len * (j + 1) as f64 / steps as f64);
                area += 0.5 * a.cross(b);
            }
        }
        area
    }
}

/// Intersection of a ray with a curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RayHit {
    /// Distance along the (unit) ray direction.
    pub t: f64,
    /// Curve parameter of the hit.
    pub s: f64,
    pub point: Point,
}

/// A simple closed counter-clockwise curve.
#[derive(Debug, Clone, PartialEq)]
pub enum Curve {
    /// Parametrized by the polar angle.
    Circle { center: Point, radius: f64 },
    /// Parametrized by the polar angle.
    Polar(PolarCurve),
    /// Parametrized by arclength.
    Piecewise(Piecewise),
}

impl Curve {
    /// Builds a curve, reversing a clockwise polygon so the orientation is
    /// always counter-clockwise.
    pub fn polygon(vertices: &[Point]) -> Result<Self> {
        let pw = Piecewise::polygon(vertices)?;
        if pw.signed_area() < 0.0 {
            let mut rev = vertices.to_vec();
            rev.reverse();
            Ok(Curve::Piecewise(Piecewise::polygon(&rev)?))
        } else {
            Ok(Curve::Piecewise(pw))
        }
    }

    pub fn period(&self) -> f64 {
        match self {
            Curve::Circle { .. } | Curve::Polar(_) => TAU,
            Curve::Piecewise(pw) => pw.total,
        }
    }

    pub fn point(&self, s: f64) -> Point {
        match self {
            Curve::Circle { center, radius } => *center + Point::polar(*radius, s),
            Curve::Polar(pc) => Point::polar(pc.rho(s), s),
            Curve::Piecewise(pw) => {
                let (i, l) = pw.locate(s);
                pw.pieces[i].point(l)
            }
        }
    }

    /// Derivative of [`Self::point`] with respect to the parameter.
    pub fn derivative(&self, s: f64) -> Point {
        match self {
            Curve::Circle { radius, .. } => Point::new(-s.sin(), s.cos()) * *radius,
            Curve::Polar(pc) => {
                let (sn, cs) = s.sin_cos();
                let (r, dr) = (pc.rho(s), pc.drho(s));
                Point::new(dr * cs - r * sn, dr * sn + r * cs)
            }
            Curve::Piecewise(pw) => {
                let (i, l) = pw.locate(s);
                pw.pieces[i].tangent(l)
            }
        }
    }

    /// Parameters at which the tangent jumps.
    pub fn corners(&self) -> Vec<f64> {
        match self {
            Curve::Piecewise(pw) => (0..pw.pieces.len())
                .filter(|&i| pw.joint_is_corner(i))
                .map(|i| pw.offsets[i])
                .collect(),
            _ => Vec::new(),
        }
    }

    /// Index of the corner at parameter `s`, if any.
    pub fn corner_at(&self, s: f64) -> Option<usize> {
        let period = self.period();
        let s = s.rem_euclid(period);
        let tol = 1e-12 * period.max(1.0);
        let Curve::Piecewise(pw) = self else {
            return None;
        };
        (0..pw.pieces.len()).find(|&i| {
            let d = (s - pw.offsets[i]).abs();
            (d < tol || (period - d) < tol) && pw.joint_is_corner(i)
        })
    }

    pub fn outward_normal(&self, s: f64) -> Result<Point> {
        if let Some(i) = self.corner_at(s) {
            let v = self.point(s);
            return Err(Error::Geometry(format!(
                "normal undefined at vertex {i} ({}, {})",
                v.x, v.y
            )));
        }
        Ok(self.derivative(s).perp_cw().unit())
    }

    /// Signed curvature (positive for a convex counter-clockwise curve).
    pub fn curvature(&self, s: f64) -> f64 {
        match self {
            Curve::Circle { radius, .. } => 1.0 / radius,
            Curve::Piecewise(pw) => {
                let (i, _) = pw.locate(s);
                match pw.pieces[i] {
                    Piece::Segment { .. } => 0.0,
                    Piece::Arc { radius, sweep, .. } => sweep.signum() / radius,
                }
            }
            Curve::Polar(_) => {
                let h = 1e-5;
                let d1 = self.derivative(s);
                let d2 = (self.derivative(s + h) - self.derivative(s - h)) * (0.5 / h);
                d1.cross(d2) / d1.norm().powi(3)
            }
        }
    }

    pub fn contains(&self, p: Point) -> bool {
        match self {
            Curve::Circle { center, radius } => p.dist(*center) < *radius,
            Curve::Polar(pc) => p.norm() < pc.rho(p.angle()),
            Curve::Piecewise(pw) => {
                // Crossing parity along an arbitrary fixed direction.
                let dir = Point::new(0.8218, 0.5697).unit();
                let mut hits = Vec::new();
                for piece in &pw.pieces {
                    piece.intersections(p, dir, 0.0, &mut hits);
                }
                // Hits exactly at joints are counted by both neighbours.
                hits.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
                hits.dedup_by(|a, b| (a.0 - b.0).abs() < 1e-12);
                hits.len() % 2 == 1
            }
        }
    }

    /// Closest curve parameter and the distance to it.
    pub fn closest(&self, p: Point) -> (f64, f64) {
        match self {
            Curve::Circle { center, radius } => {
                let s = (p - *center).angle().rem_euclid(TAU);
                (s, (p.dist(*center) - radius).abs())
            }
            Curve::Polar(_) => {
                let n = 2048;
                let (mut best_s, mut best_d) = (0.0, f64::INFINITY);
                for j in 0..n {
                    let s = TAU * j as f64 / n as f64;
                    let d = p.dist(self.point(s));
                    if d < best_d {
                        best_d = d;
                        best_s = s;
                    }
                }
                let step = TAU / n as f64;
                let s = golden_min(|s| p.dist(self.point(s)), best_s - step, best_s + step, 80);
                let d = p.dist(self.point(s));
                if d < best_d {
                    (s.rem_euclid(TAU), d)
                } else {
                    (best_s, best_d)
                }
            }
            Curve::Piecewise(pw) => {
                let mut best = (0.0, f64::INFINITY);
                for (i, piece) in pw.pieces.iter().enumerate() {
                    let (l, d) = piece.closest(p);
                    if d < best.1 {
                        best = (pw.offsets[i] + l, d);
                    }
                }
                best
            }
        }
    }

    /// Distance to the curve, negative inside.
    pub fn signed_distance(&self, p: Point) -> f64 {
        let d = self.closest(p).1;
        if self.contains(p) {
            -d
        } else {
            d
        }
    }

    pub fn max_radius(&self) -> f64 {
        match self {
            Curve::Circle { center, radius } => center.norm() + radius,
            Curve::Polar(pc) => pc.max_radius(),
            Curve::Piecewise(pw) => pw
                .pieces
                .iter()
                .map(|piece| match *piece {
                    Piece::Segment { a, b } => a.norm().max(b.norm()),
                    Piece::Arc { center, radius, .. } => center.norm() + radius,
                })
                .fold(0.0, f64::max),
        }
    }

    pub fn length(&self) -> f64 {
        match self {
            Curve::Circle { radius, .. } => TAU * radius,
            Curve::Piecewise(pw) => pw.total,
            Curve::Polar(_) => self.span_table(0.0, TAU, 20_000).last().unwrap().1,
        }
    }

    /// Cumulative chord lengths on a uniform parameter grid over `[s0, s1]`.
    fn span_table(&self, s0: f64, s1: f64, m: usize) -> Vec<(f64, f64)> {
        let mut table = Vec::with_capacity(m + 1);
        let mut prev = self.point(s0);
        let mut acc = 0.0;
        table.push((s0, 0.0));
        for i in 1..=m {
            let s = s0 + (s1 - s0) * i as f64 / m as f64;
            let q = self.point(s);
            acc += prev.dist(q);
            prev = q;
            table.push((s, acc));
        }
        table
    }

    /// Parameters of points along the curve with consecutive chords at most
    /// `spacing`, including every corner. Returned in increasing order.
    pub fn resample(&self, spacing: f64) -> Vec<f64> {
        assert!(spacing > 0.0);
        let period = self.period();
        let mut breaks = self.corners();
        if breaks.is_empty() {
            breaks.push(0.0);
        }
        let mut params = Vec::new();
        for (i, &s0) in breaks.iter().enumerate() {
            let s1 = if i + 1 < breaks.len() {
                breaks[i + 1]
            } else {
                breaks[0] + period
            };
            let rough = self.span_table(s0, s1, 1024).last().unwrap().1;
            let m = 16 * (rough / spacing).ceil() as usize + 2048;
            let table = self.span_table(s0, s1, m);
            let len = table.last().unwrap().1;
            let min_pieces = if breaks.len() == 1 { 3 } else { 1 };
            let n = ((len / (0.98 * spacing)).ceil() as usize).max(min_pieces);
            let mut cursor = 0;
            for j in 0..n {
                let target = len * j as f64 / n as f64;
                while table[cursor + 1].1 < target {
                    cursor += 1;
                }
                let (sa, la) = table[cursor];
                let (sb, lb) = table[cursor + 1];
                let s = if lb > la {
                    sa + (sb - sa) * (target - la) / (lb - la)
                } else {
                    sa
                };
                params.push(s.rem_euclid(period));
            }
        }
        // Corner-free curves start at 0; piecewise ones at their first corner.
        params.sort_by(|a, b| a.partial_cmp(b).unwrap());
        params
    }

    /// First intersection of `origin + t·dir` (`dir` unit) with `t > eps`.
    pub fn ray_intersection(&self, origin: Point, dir: Point, eps: f64) -> Option<RayHit> {
        match self {
            Curve::Circle { center, radius } => circle_roots(origin, dir, *center, *radius)
                .into_iter()
                .find(|&t| t > eps)
                .map(|t| {
                    let point = origin + dir * t;
                    RayHit {
                        t,
                        s: (point - *center).angle().rem_euclid(TAU),
                        point,
                    }
                }),
            Curve::Piecewise(pw) => {
                let mut best: Option<RayHit> = None;
                let mut hits = Vec::new();
                for (i, piece) in pw.pieces.iter().enumerate() {
                    hits.clear();
                    piece.intersections(origin, dir, eps, &mut hits);
                    for &(t, l) in &hits {
                        if best.is_none_or(|b| t < b.t) {
                            best = Some(RayHit {
                                t,
                                s: pw.offsets[i] + l,
                                point: origin + dir * t,
                            });
                        }
                    }
                }
                best
            }
            Curve::Polar(pc) => {
                let rmax = pc.max_radius() * (1.0 + 1e-9);
                let roots = circle_roots(origin, dir, Point::ORIGIN, rmax);
                if roots.is_empty() {
                    return None;
                }
                let t_lo = roots[0].max(eps);
                let t_hi = roots[1];
                if t_hi <= t_lo {
                    return None;
                }
                let g = |t: f64| {
                    let x = origin + dir * t;
                    x.norm() - pc.rho(x.angle())
                };
                let steps = ((t_hi - t_lo) / 2e-3).ceil().max(2000.0) as usize;
                let mut a = t_lo;
                let mut ga = g(a);
                for i in 1..=steps {
                    let b = t_lo + (t_hi - t_lo) * i as f64 / steps as f64;
                    let gb = g(b);
                    if ga == 0.0 && a > eps {
                        return Some(self.polar_hit(origin, dir, a));
                    }
                    if ga * gb < 0.0 {
                        let t = bisect(&g, a, b, ga);
                        return Some(self.polar_hit(origin, dir, t));
                    }
                    a = b;
                    ga = gb;
                }
                None
            }
        }
    }

    fn polar_hit(&self, origin: Point, dir: Point, t: f64) -> RayHit {
        let point = origin + dir * t;
        RayHit {
            t,
            s: point.angle().rem_euclid(TAU),
            point,
        }
    }
}

fn bisect(g: &impl Fn(f64) -> f64, mut a: f64, mut b: f64, mut ga: f64) -> f64 {
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let gm = g(m);
        if gm == 0.0 {
            return m;
        }
        if ga * gm < 0.0 {
            b = m;
        } else {
            a = m;
            ga = gm;
        }
    }
    0.5 * (a + b)
}

/// Golden-section minimizer of a unimodal function on `[a, b]`.
pub(crate) fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, iters: usize) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..iters {
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2);
        }
    }
    0.5 * (a + b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn unit_square() -> Curve {
        Curve::polygon(&[
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(1.0, 1.0),
            Point::new(0.0, 1.0),
        ])
        .unwrap()
    }

    #[test]
    fn circle_basics() {
        let c = Curve::Circle {
            center: Point::ORIGIN,
            radius: 2.0,
        };
        let n = c.outward_normal(0.0).unwrap();
        assert!((n.x - 1.0).abs() < 1e-15 && n.y.abs() < 1e-15);
        assert!(c.contains(Point::new(1.0, 1.0)));
        assert!((c.signed_distance(Point::new(3.0, 0.0)) - 1.0).abs() < 1e-15);
        let hit = c.ray_intersection(Point::ORIGIN, Point::new(0.0, 1.0), 0.0).unwrap();
        assert!((hit.t - 2.0).abs() < 1e-15);
    }

    #[test]
    fn polygon_containment_and_corners() {
        let sq = unit_square();
        assert_eq!(sq.corners().len(), 4);
        assert!(sq.contains(Point::new(0.5, 0.5)));
        assert!(!sq.contains(Point::new(1.5, 0.5)));
        assert!(sq.outward_normal(1.0).is_err());
        let n = sq.outward_normal(1.5).unwrap();
        assert!((n.x - 1.0).abs() < 1e-15);
        assert!((sq.signed_distance(Point::new(0.5, 0.25)) + 0.25).abs() < 1e-15);
    }

    #[test]
    fn clockwise_polygon_is_reoriented() {
        let cw = Curve::polygon(&[
            Point::new(0.0, 0.0),
            Point::new(0.0, 1.0),
            Point::new(1.0, 1.0),
            Point::new(1.0, 0.0),
        ])
        .unwrap();
        let n = cw.outward_normal(0.5).unwrap();
        // Reversed order starts on the right edge, (1,0) → (1,1).
        assert!((n.x - 1.0).abs() < 1e-15, "right edge normal points right");
        assert!(cw.contains(Point::new(0.5, 0.5)));
    }

    #[test]
    fn resampling_respects_spacing_and_corners() {
        let sq = unit_square();
        let params = sq.resample(0.3);
        for c in sq.corners() {
            assert!(params.iter().any(|&s| (s - c).abs() < 1e-12));
        }
        let pts: Vec<Point> = params.iter().map(|&s| sq.point(s)).collect();
        for i in 0..pts.len() {
            assert!(pts[i].dist(pts[(i + 1) % pts.len()]) <= 0.3 + 1e-12);
        }
        let circle = Curve::Circle {
            center: Point::ORIGIN,
            radius: 1.0,
        };
        let params = circle.resample(0.05);
        let pts: Vec<Point> = params.iter().map(|&s| circle.point(s)).collect();
        for i in 0..pts.len() {
            assert!(pts[i].dist(pts[(i + 1) % pts.len()]) <= 0.05);
        }
    }

    #[test]
    fn tabulated_polar_reproduces_smooth_curve() {
        let n = 64;
        let f = |t: f64| 0.5 + 0.1 * (3.0 * t).cos() + 0.05 * (2.0 * t).sin();
        let samples = (0..n).map(|j| f(TAU * j as f64 / n as f64)).collect();
        let pc = PolarCurve::tabulated(samples).unwrap();
        for &t in &[0.1, 1.3, 4.0] {
            assert!((pc.rho(t) - f(t)).abs() < 1e-12);
            let d = 0.3 * -(3.0 * t).sin() + 0.1 * (2.0 * t).cos();
            assert!((pc.drho(t) - d).abs() < 1e-12);
        }
        assert!(PolarCurve::tabulated(vec![1.0; 4]).is_err());
    }

    #[test]
    fn polar_ray_intersection_lands_on_curve() {
        let curve = Curve::Polar(PolarCurve::from_preset(PolarPreset::Butterfly));
        let dir = Point::new(1.0, 0.3).unit();
        let hit = curve.ray_intersection(Point::ORIGIN, dir, 0.0).unwrap();
        let rho = PolarPreset::Butterfly.rho(hit.point.angle());
        assert!((hit.point.norm() - rho).abs() < 1e-12);
    }

    #[test]
    fn rounded_square_is_smooth() {
        let r = 1.0;
        let rc = 0.25;
        let pieces = vec![
            Piece::Segment {
                a: Point::new(r, -r + rc),
                b: Point::new(r, r - rc),
            },
            Piece::Arc {
                center: Point::new(r - rc, r - rc),
                radius: rc,
                start: 0.0,
                sweep: PI / 2.0,
            },
            Piece::Segment {
                a: Point::new(r - rc, r),
                b: Point::new(-r + rc, r),
            },
            Piece::Arc {
                center: Point::new(-r + rc, r - rc),
                radius: rc,
                start: PI / 2.0,
                sweep: PI / 2.0,
            },
            Piece::Segment {
                a: Point::new(-r, r - rc),
                b: Point::new(-r, -r + rc),
            },
            Piece::Arc {
                center: Point::new(-r + rc, -r + rc),
                radius: rc,
                start: PI,
                sweep: PI / 2.0,
            },
            Piece::Segment {
                a: Point::new(-r + rc, -r),
                b: Point::new(r - rc, -r),
            },
            Piece::Arc {
                center: Point::new(r - rc, -r + rc),
                radius: rc,
                start: 1.5 * PI,
                sweep: PI / 2.0,
            },
        ];
        let c = Curve::Piecewise(Piecewise::new(pieces).unwrap());
        assert!(c.corners().is_empty());
        assert!(!c.contains(Point::new(0.99, 0.99)));
        assert!(c.contains(Point::new(0.8, 0.8)));
    }
}
