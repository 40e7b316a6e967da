use super::bessel::{bessel_j, check_wronskian, hankel1};
use crate::error::{Error, Result};
use crate::geometry::Point;
use num_complex::Complex64 as C64;

/// Series truncation `|n| ≤ kρ + 8(kρ)^{1/3} + 20`.
pub fn mie_truncation(k: f64, radius: f64) -> usize {
    let x = k * radius;
    (x + 8.0 * x.cbrt() + 20.0).ceil() as usize
}

/// Outgoing field equal to `e^{ik x·a}` on the circle `|x| = radius`:
/// `u = Σ_n iⁿ e^{inφ} J_n(kρ)/H_n(kρ) H_n(kr)`, `φ` measured from `a`.
pub fn mie_disc(k: f64, radius: f64, a: Point, points: &[Point]) -> Result<Vec<C64>> {
    mie_disc_with_terms(k, radius, a, points, mie_truncation(k, radius))
}

pub fn mie_disc_with_terms(k: f64, radius: f64, a: Point, points: &[Point], nmax: usize) -> Result<Vec<C64>> {
    if !(k > 0.0 && radius > 0.0) {
        return Err(Error::InvalidParameter("k and the disc radius must be positive".into()));
    }
    let x0 = k * radius;
    let tail = bessel_j(nmax + 1, x0);
    if tail[nmax].abs().max(tail[nmax + 1].abs()) > 1e-12 {
        return Err(Error::InvalidParameter(format!(
            "series truncated at {nmax} terms leaves a tail of {:.2e}",
            tail[nmax].abs()
        )));
    }
    check_wronskian(nmax, x0)?;
    let h0 = hankel1(nmax, x0);
    let j0 = &tail[..=nmax];
    let coeff: Vec<C64> = (0..=nmax)
        .map(|n| C64::i().powu(n as u32) * j0[n] / h0[n])
        .collect();
    let mut out = Vec::with_capacity(points.len());
    for &p in points {
        let r = p.norm();
        if r < radius * (1.0 - 1e-12) {
            return Err(Error::InvalidParameter(format!(
                "point ({}, {}) lies inside the disc of radius {radius}",
                p.x, p.y
            )));
        }
        let phi = p.y.atan2(p.x) - a.y.atan2(a.x);
        let h = hankel1(nmax, k * r);
        let mut u = coeff[0] * h[0];
        for n in 1..=nmax {
            u += 2.0 * (n as f64 * phi).cos() * coeff[n] * h[n];
        }
        out.push(u);
    }
    Ok(out)
}
