//! Integer-order Bessel functions of real argument.
//!
//! `J_n` comes from Miller's downward recurrence normalised by
//! `J_0 + 2Σ J_{2k} = 1`; `Y_0` and `Y_1` from their Neumann series in the
//! `J_{2k}`; higher `Y_n` from the (stable) upward recurrence.

use crate::error::{Error, Result};
use num_complex::Complex64 as C64;
use std::f64::consts::PI;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// `J_0(x), …, J_nmax(x)` for `x > 0`.
pub fn bessel_j(nmax: usize, x: f64) -> Vec<f64> {
    assert!(x > 0.0, "bessel_j needs x > 0");
    let top = nmax.max(x as usize);
    let mut start = top + 30 + (40.0 * top as f64).sqrt() as usize;
    start += start % 2;
    let mut j = vec![0.0; start + 2];
    j[start] = 1e-300;
    for n in (1..=start).rev() {
        j[n - 1] = 2.0 * n as f64 / x * j[n] - j[n + 1];
        if j[n - 1].abs() > 1e250 {
            for v in &mut j[n - 1..=start] {
                *v *= 1e-250;
            }
        }
    }
    let norm = j[0] + 2.0 * j.iter().skip(2).step_by(2).sum::<f64>();
    j.truncate(nmax + 1);
    j.iter_mut().for_each(|v| *v /= norm);
    j
}

/// `(J_n(x), Y_n(x))` for `n = 0..=nmax`.
pub fn bessel_jy(nmax: usize, x: f64) -> (Vec<f64>, Vec<f64>) {
    // J_n(x) is negligible for n beyond x + 10x^{1/3} + 40.
    let top = (x + 10.0 * x.cbrt() + 40.0) as usize / 2 + 1;
    let jall = bessel_j((2 * top + 1).max(nmax), x);
    let lg = (x / 2.0).ln() + EULER_GAMMA;
    let mut s0 = 0.0;
    let mut s1 = 0.0;
    for k in 1..=top {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        s0 += sign * jall[2 * k] / k as f64;
        s1 += sign * (jall[2 * k - 1] - jall[2 * k + 1]) / k as f64;
    }
    let y0 = 2.0 / PI * (lg * jall[0] - 2.0 * s0);
    // Y_1 = −Y_0', differentiating the series term by term.
    let y1 = -2.0 / PI * (jall[0] / x - lg * jall[1] - s1);
    let mut y = vec![y0, y1];
    for n in 1..nmax {
        y.push(2.0 * n as f64 / x * y[n] - y[n - 1]);
    }
    y.truncate(nmax + 1);
    (jall[..=nmax].to_vec(), y)
}

/// Hankel functions `H_n^{(1)} = J_n + iY_n`.
pub fn hankel1(nmax: usize, x: f64) -> Vec<C64> {
    let (j, y) = bessel_jy(nmax, x);
    j.iter().zip(&y).map(|(&a, &b)| C64::new(a, b)).collect()
}

/// Largest `|J_n Y_n' − J_n' Y_n − 2/(πx)|` over `n ≤ nmax`.
pub fn wronskian_defect(nmax: usize, x: f64) -> f64 {
    let (j, y) = bessel_jy(nmax + 1, x);
    (0..=nmax)
        .map(|n| {
            // f_n' = f_{n−1} − (n/x) f_n, with f_{−1} = −f_1.
            let d = |f: &[f64]| {
                let prev = if n == 0 { -f[1] } else { f[n - 1] };
                prev - n as f64 / x * f[n]
            };
            (j[n] * d(&y) - d(&j) * y[n] - 2.0 / (PI * x)).abs()
        })
        .fold(0.0, f64::max)
}

pub(crate) fn check_wronskian(nmax: usize, x: f64) -> Result<()> {
    let w = wronskian_defect(nmax, x);
    if w < 1e-12 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "Bessel evaluation failed the Wronskian check at x = {x} (defect {w:.2e})"
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_values() {
        // Values from standard tables.
        let (j, y) = bessel_jy(2, 1.0);
        assert!((j[0] - 0.765_197_686_557_966_6).abs() < 1e-15);
        assert!((j[1] - 0.440_050_585_744_933_5).abs() < 1e-15);
        assert!((y[0] - 0.088_256_964_215_676_96).abs() < 1e-14);
        assert!((y[1] + 0.781_212_821_300_288_7).abs() < 1e-14);
        assert!((y[2] + 1.650_682_606_816_254_4).abs() < 1e-14);
        let (j, y) = bessel_jy(1, 10.0);
        assert!((j[0] + 0.245_935_764_451_348_3).abs() < 1e-14);
        assert!((y[0] - 0.055_671_167_283_599_39).abs() < 1e-14);
    }

    #[test]
    fn wronskian_holds_across_arguments() {
        for &x in &[0.1, 1.0, 7.3, 20.0, 100.0, 500.0] {
            assert!(wronskian_defect(60, x) < 1e-12, "x = {x}: {}", wronskian_defect(60, x));
        }
    }
}
