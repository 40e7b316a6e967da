//! Padé-family absorbing boundary conditions.
//!
//! The boundary condition `𝒩(k⁻¹∂ₙv) − i𝒟(v) = 0` on the truncation boundary is
//! built from the `[M,N]` Padé approximant `p(t)/q(t)` of `√(1−t)` at `t = 0`,
//! with `t = |ξ'|²` the squared tangential frequency. Everything here is a pure
//! function of the coefficient pair: approximation order, vanishing angles,
//! plane-wave reflection coefficient, positivity checks and the cone supremum
//! that controls the error for circular truncation.
//!
//! Coefficients are produced by an exact rational solve and then rounded to
//! `f64`. The residual polynomial `Q(t) = q(t)²(1−t) − p(t)²` is kept with its
//! exact vanishing low-order coefficients so near-normal quantities such as
//! `q(t)√(1−t) − p(t) = O(t^{m_ord})` are evaluated without cancellation.

mod poly;

pub use poly::{horner, horner_with_derivative, RatPoly};

use crate::error::{Error, Result};
use num_rational::BigRational;
use num_traits::{One, Zero};
use poly::{rat, rat_from_f64, roots_with_multiplicity};
use serde::Serialize;
use std::f64::consts::FRAC_PI_2;

/// A zero of `q(t)√(1−t) − p(t)` in `(0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VanishingZero {
    pub t: f64,
    pub multiplicity: usize,
}

impl VanishingZero {
    /// Incidence angle `asin(√t)` at which the reflection coefficient vanishes.
    pub fn angle(&self) -> f64 {
        self.t.sqrt().asin()
    }
}

#[derive(Debug, Clone)]
pub struct PadeAbc {
    m: usize,
    n: usize,
    p_exact: RatPoly,
    q_exact: RatPoly,
    p: Vec<f64>,
    q: Vec<f64>,
    residual: Vec<f64>,
    residual_derivative: Vec<f64>,
    m_ord: usize,
    zeros: Vec<VanishingZero>,
}

/// Exact Taylor coefficients of `√(1−t)`: `c₀ = 1`, `cₙ = cₙ₋₁ (n − 3/2) / n`.
pub fn sqrt_one_minus_t_series(terms: usize) -> Vec<BigRational> {
    let mut c = Vec::with_capacity(terms);
    if terms == 0 {
        return c;
    }
    c.push(BigRational::one());
    for n in 1..terms {
        let nn = n as i64;
        let next = &c[n - 1] * rat(2 * nn - 3, 2 * nn);
        c.push(next);
    }
    c
}

/// `[M,N]` Padé approximant of `√(1−t)`; only `M = N` or `M = N + 1` are accepted.
pub fn compute_pade(m: usize, n: usize) -> Result<PadeAbc> {
    if !(m == n || m == n + 1) {
        return Err(Error::InadmissiblePair { m, n });
    }
    let (p, q) = pade_coefficients(m, n)?;
    PadeAbc::from_exact(m, n, p, q)
}

/// Exact `[M,N]` Padé coefficients of `√(1−t)` for any pair (no admissibility check).
pub fn pade_coefficients(m: usize, n: usize) -> Result<(RatPoly, RatPoly)> {
    let c = sqrt_one_minus_t_series(m + n + 1);
    let coef = |i: isize| -> BigRational {
        if i < 0 {
            BigRational::zero()
        } else {
            c[i as usize].clone()
        }
    };
    // Rows i = M+1..=M+N: sum_{j=1..N} q_j c_{i-j} = -c_i.
    let mut a: Vec<Vec<BigRational>> = (0..n)
        .map(|row| {
            let i = (m + 1 + row) as isize;
            let mut r: Vec<BigRational> = (1..=n).map(|j| coef(i - j as isize)).collect();
            r.push(-coef(i));
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n)
            .find(|&r| !a[r][col].is_zero())
            .ok_or(Error::SingularPade { m, n })?;
        a.swap(col, pivot);
        let inv = a[col][col].recip();
        for v in a[col].iter_mut() {
            *v *= &inv;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for k in col..=n {
                    let delta = &f * &a[col][k];
                    a[r][k] -= delta;
                }
            }
        }
    }
    let mut q = vec![BigRational::one()];
    q.extend(a.iter().map(|row| row[n].clone()));
    let p: Vec<BigRational> = (0..=m)
        .map(|i| {
            (0..=n.min(i))
                .map(|j| &q[j] * &c[i - j])
                .fold(BigRational::zero(), |acc, x| acc + x)
        })
        .collect();
    let p = RatPoly::new(p);
    let q = RatPoly::new(q);
    if p.degree() != Some(m) || q.degree() != Some(n) {
        return Err(Error::SingularPade { m, n });
    }
    Ok((p, q))
}

impl PadeAbc {
    fn from_exact(m: usize, n: usize, p_exact: RatPoly, q_exact: RatPoly) -> Result<Self> {
        let one_minus_t = RatPoly::new(vec![BigRational::one(), -BigRational::one()]);
        let residual_exact = q_exact
            .mul(&q_exact)
            .mul(&one_minus_t)
            .sub(&p_exact.mul(&p_exact));
        let mut abc = Self {
            m,
            n,
            p: p_exact.to_f64(),
            q: q_exact.to_f64(),
            residual: residual_exact.to_f64(),
            residual_derivative: residual_exact.derivative().to_f64(),
            p_exact,
            q_exact,
            m_ord: 0,
            zeros: Vec::new(),
        };
        abc.m_ord = series_order(&abc.p_exact, &abc.q_exact);
        abc.zeros = abc.locate_zeros(&residual_exact)?;
        Ok(abc)
    }

    /// Boundary condition from arbitrary coefficients, e.g. to probe the
    /// admissibility check. Both are divided exactly by `q[0]`, which must be
    /// nonzero, as must both leading coefficients.
    pub fn from_coefficients(p: &[f64], q: &[f64]) -> Result<Self> {
        if p.is_empty() || q.is_empty() {
            return Err(Error::InvalidParameter("empty coefficient list".into()));
        }
        if q[0] == 0.0 {
            return Err(Error::InvalidParameter("q[0] must be nonzero".into()));
        }
        if *p.last().unwrap() == 0.0 || *q.last().unwrap() == 0.0 {
            return Err(Error::InvalidParameter(
                "leading coefficients of p and q must be nonzero".into(),
            ));
        }
        let to_rat = |xs: &[f64]| -> Result<RatPoly> {
            xs.iter()
                .map(|&x| {
                    rat_from_f64(x)
                        .ok_or_else(|| Error::InvalidParameter(format!("non-finite coefficient {x}")))
                })
                .collect::<Result<Vec<_>>>()
                .map(RatPoly::new)
        };
        let q0 = rat_from_f64(q[0]).ok_or_else(|| Error::InvalidParameter(format!("non-finite coefficient {}", q[0])))?;
        let inv = BigRational::one() / q0;
        Self::from_exact(p.len() - 1, q.len() - 1, to_rat(p)?.scale(&inv), to_rat(q)?.scale(&inv))
    }

    /// Impedance condition `∂ₙv − ikv = 0`.
    pub fn impedance() -> Self {
        compute_pade(0, 0).expect("[0,0] is admissible")
    }

    /// Numerator half-degree `M`.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Denominator half-degree `N`.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> &[f64] {
        &self.p
    }

    pub fn q(&self) -> &[f64] {
        &self.q
    }

    pub fn p_exact(&self) -> &RatPoly {
        &self.p_exact
    }

    pub fn q_exact(&self) -> &RatPoly {
        &self.q_exact
    }

    pub fn m_ord(&self) -> usize {
        self.m_ord
    }

    pub fn zeros(&self) -> &[VanishingZero] {
        &self.zeros
    }

    pub fn m_vanish(&self) -> usize {
        self.zeros.len()
    }

    /// Highest multiplicity among the vanishing zeros (0 when there are none).
    pub fn m_mult(&self) -> usize {
        self.zeros.iter().map(|z| z.multiplicity).max().unwrap_or(0)
    }

    /// Vanishing angles `ψⱼ = asin √tⱼ`.
    pub fn psi(&self) -> Vec<f64> {
        self.zeros.iter().map(VanishingZero::angle).collect()
    }

    /// `M = N` or `M = N + 1`.
    pub fn is_admissible_pair(&self) -> bool {
        self.m == self.n || self.m == self.n + 1
    }

    pub fn p_at(&self, t: f64) -> f64 {
        horner(&self.p, t)
    }

    pub fn q_at(&self, t: f64) -> f64 {
        horner(&self.q, t)
    }

    /// Coefficients of `Q(t) = q²(1−t) − p²`; the first `m_ord` vanish exactly.
    pub fn residual_polynomial(&self) -> &[f64] {
        &self.residual
    }

    /// `F(t) = q(t)√(1−t) − p(t)`, accurate near `t = 0`.
    pub fn symbol_mismatch(&self, t: f64) -> f64 {
        let root = (1.0 - t).max(0.0).sqrt();
        let qs = self.q_at(t) * root;
        let p = self.p_at(t);
        let den = qs + p;
        if den.abs() >= 0.5 * (qs.abs() + p.abs()) && den != 0.0 {
            horner(&self.residual, t) / den
        } else {
            qs - p
        }
    }

    /// `dF/dt` for `t < 1`, with the same cancellation-free route as [`Self::symbol_mismatch`].
    pub fn symbol_mismatch_derivative(&self, t: f64) -> f64 {
        let root = (1.0 - t).sqrt();
        let (q, dq) = horner_with_derivative(&self.q, t);
        let (p, dp) = horner_with_derivative(&self.p, t);
        let den = q * root + p;
        let dden = dq * root - q / (2.0 * root) + dp;
        if den.abs() >= 0.5 * ((q * root).abs() + p.abs()) && den != 0.0 {
            let res = horner(&self.residual, t);
            let dres = horner(&self.residual_derivative, t);
            (dres * den - res * dden) / (den * den)
        } else {
            dq * root - q / (2.0 * root) - dp
        }
    }

    fn locate_zeros(&self, residual_exact: &RatPoly) -> Result<Vec<VanishingZero>> {
        if residual_exact.is_zero() {
            return Err(Error::RootFinder {
                lo: 0.0,
                hi: 1.0,
                reason: "q²(1−t) − p² vanishes identically".into(),
            });
        }
        // Strip the root at t = 0.
        let low = residual_exact.low_order().unwrap_or(0);
        let stripped = RatPoly::new(residual_exact.coeffs()[low..].to_vec());
        let mut zeros = Vec::new();
        // The exact search interval is (0, 1]; a root at 0 was stripped, so [0, 1] is safe.
        for (t, mult) in roots_with_multiplicity(&stripped, &BigRational::zero(), &rat(1, 1), 1e-15) {
            if !(t > 0.0 && t <= 1.0) || !t.is_finite() {
                continue;
            }
            // Q = (q√(1−t) − p)(q√(1−t) + p): keep roots of the first factor only.
            let qs = self.q_at(t) * (1.0 - t).max(0.0).sqrt();
            let p = self.p_at(t);
            if qs * p > 0.0 || (t == 1.0 && p == 0.0) {
                zeros.push(VanishingZero { t, multiplicity: mult });
            } else if qs == 0.0 && p.abs() < 1e-12 {
                zeros.push(VanishingZero { t, multiplicity: mult });
            }
        }
        if zeros.iter().any(|z| !z.t.is_finite()) {
            return Err(Error::RootFinder {
                lo: 0.0,
                hi: 1.0,
                reason: "non-finite root".into(),
            });
        }
        Ok(zeros)
    }
}

/// Order of contact: smallest `n` with a nonzero coefficient of `tⁿ` in
/// `√(1−t) − p(t)/q(t)`, found with exact series arithmetic.
fn series_order(p: &RatPoly, q: &RatPoly) -> usize {
    let mut terms = p.coeffs().len() + q.coeffs().len() + 4;
    loop {
        let c = sqrt_one_minus_t_series(terms);
        // Series of p/q: r_i = (p_i − Σ_{j≥1} q_j r_{i−j}) / q_0.
        let q0 = q.coeff(0);
        let mut r: Vec<BigRational> = Vec::with_capacity(terms);
        for i in 0..terms {
            let mut acc = p.coeff(i);
            for j in 1..=i.min(q.coeffs().len().saturating_sub(1)) {
                acc -= q.coeff(j) * &r[i - j];
            }
            r.push(acc / &q0);
        }
        if let Some(i) = (0..terms).find(|&i| c[i] != r[i]) {
            return i;
        }
        terms *= 2;
        assert!(terms < 4096, "p/q agrees with √(1−t) to absurd order");
    }
}

/// Order `m_ord` of the approximation `√(1−t) − p/q = O(t^{m_ord})`.
pub fn pade_order(abc: &PadeAbc) -> usize {
    abc.m_ord
}

/// Zeros of `q(t)√(1−t) − p(t)` in `(0, 1]` with multiplicities.
pub fn find_zeros(abc: &PadeAbc) -> Vec<VanishingZero> {
    abc.zeros.clone()
}

/// Energy reflection coefficient `((√r q − p)/(√r q + p))²` at squared
/// tangential frequency `t = sin²θ ∈ [0, 1)`, with `r = 1 − t`.
pub fn reflection_coefficient_t(abc: &PadeAbc, t: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&t) {
        return Err(Error::Glancing { theta: t.sqrt().asin() });
    }
    let root = (1.0 - t).sqrt();
    let den = abc.q_at(t) * root + abc.p_at(t);
    if den.abs() < 1e-300 {
        return Err(Error::VanishingDenominator { t });
    }
    let num = abc.symbol_mismatch(t);
    Ok((num / den).powi(2))
}

/// Energy reflection coefficient at incidence angle `θ ∈ [0, π/2)` to the normal.
pub fn reflection_coefficient(abc: &PadeAbc, theta: f64) -> Result<f64> {
    if !(0.0..FRAC_PI_2).contains(&theta) {
        return Err(Error::Glancing { theta });
    }
    let s = theta.sin();
    reflection_coefficient_t(abc, s * s)
}

/// Sampled `(θ, α_ref)` table.
#[derive(Debug, Clone, Serialize)]
pub struct ReflectionProfile {
    pub samples: Vec<(f64, f64)>,
}

pub fn reflection_profile(abc: &PadeAbc, count: usize) -> Result<ReflectionProfile> {
    let samples = (0..count)
        .map(|i| {
            let theta = FRAC_PI_2 * i as f64 / count as f64;
            reflection_coefficient(abc, theta).map(|a| (theta, a))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ReflectionProfile { samples })
}

#[derive(Debug, Clone, Serialize)]
pub struct AdmissibilityReport {
    /// `M = N` or `M = N + 1`.
    pub pair_admissible: bool,
    /// Real roots of `p` in `[−1, 1]`.
    pub p_roots: Vec<f64>,
    /// Real roots of `q` in `[−1, 1]`.
    pub q_roots: Vec<f64>,
    /// `p(t)/q(t) > 0` throughout `[−1, 1]`.
    pub ratio_positive: bool,
    pub passed: bool,
}

/// Checks that `p` and `q` have no roots in `[−1, 1]` and that `p/q > 0` there.
pub fn admissibility_check(abc: &PadeAbc) -> AdmissibilityReport {
    let lo = rat(-1, 1);
    let hi = rat(1, 1);
    let roots_of = |poly: &RatPoly| -> Vec<f64> {
        roots_with_multiplicity(poly, &lo, &hi, 1e-15)
            .into_iter()
            .map(|(r, _)| r)
            .collect()
    };
    let p_roots = roots_of(&abc.p_exact);
    let q_roots = roots_of(&abc.q_exact);
    // Without roots in the interval the sign is constant; check it at t = 0
    // exactly and on a grid as a cross-check.
    let ratio_positive = p_roots.is_empty()
        && q_roots.is_empty()
        && (0..=200).all(|i| {
            let t = -1.0 + 2.0 * i as f64 / 200.0;
            abc.p_at(t) / abc.q_at(t) > 0.0
        })
        && {
            let zero = BigRational::zero();
            let s = abc.p_exact.eval(&zero) * abc.q_exact.eval(&zero);
            s > BigRational::zero()
        };
    let pair_admissible = abc.is_admissible_pair();
    AdmissibilityReport {
        pair_admissible,
        passed: pair_admissible && ratio_positive,
        p_roots,
        q_roots,
        ratio_positive,
    }
}

/// Supremum over the near-radial cone `|cos θ − 1| ≤ C/R²` on a circle of radius
/// `R` of `|F| + 2 sin θ |dF/dθ|`, where `F(θ) = q(sin²θ) cos θ − p(sin²θ)`.
pub fn upsilon_circle(abc: &PadeAbc, radius: f64, cone_constant: f64) -> Result<f64> {
    if !(radius >= 1.0) {
        return Err(Error::InvalidParameter(format!("radius {radius} must be ≥ 1")));
    }
    if !(cone_constant > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "cone constant {cone_constant} must be positive"
        )));
    }
    let cos_min = 1.0 - cone_constant / (radius * radius);
    // Stay strictly below glancing.
    let theta_max = if cos_min <= 0.0 {
        FRAC_PI_2 * (1.0 - 1e-9)
    } else {
        cos_min.acos()
    };
    let objective = |theta: f64| -> f64 {
        let s = theta.sin();
        let c = theta.cos();
        let t = s * s;
        let f = abc.symbol_mismatch(t);
        let df_dtheta = abc.symbol_mismatch_derivative(t) * 2.0 * s * c;
        f.abs() + 2.0 * s * df_dtheta.abs()
    };
    let samples = 10_000;
    let mut best = (0.0, objective(0.0));
    for i in 1..=samples {
        let theta = theta_max * i as f64 / samples as f64;
        let v = objective(theta);
        if v > best.1 {
            best = (theta, v);
        }
    }
    // Golden-section refinement around the best sample.
    let step = theta_max / samples as f64;
    let (mut a, mut b) = ((best.0 - step).max(0.0), (best.0 + step).min(theta_max));
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let mut f1 = objective(x1);
    let mut f2 = objective(x2);
    for _ in 0..100 {
        if f1 > f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = objective(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = objective(x2);
        }
    }
    Ok(best.1.max(f1).max(f2).max(objective(theta_max)))
}

/// `p` and `q` as exact fractions, e.g. `["1", "-3/4"]`.
pub fn exact_strings(poly: &RatPoly) -> Vec<String> {
    poly.coeffs().iter().map(|c| c.to_string()).collect()
}
