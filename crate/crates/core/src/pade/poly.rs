//! Dense univariate polynomials with exact rational coefficients.
//!
//! Only what the boundary-condition analysis needs: arithmetic, Euclidean
//! division, gcd, square-free decomposition and Sturm-sequence root isolation
//! on a closed interval.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;

/// Coefficients in increasing degree; the leading coefficient is nonzero
/// unless the polynomial is zero (empty vector).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatPoly {
    coeffs: Vec<BigRational>,
}

pub fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Exact rational value of a finite double.
pub fn rat_from_f64(x: f64) -> Option<BigRational> {
    BigRational::from_float(x)
}

pub fn rat_to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        // Huge numerators/denominators: scale by a power of two first.
        let n = x.numer().bits() as i64;
        let d = x.denom().bits() as i64;
        let shift = n - d;
        let scaled = if shift > 0 {
            x / BigRational::from_integer(BigInt::one() << shift as usize)
        } else {
            x * BigRational::from_integer(BigInt::one() << (-shift) as usize)
        };
        scaled.to_f64().unwrap_or(f64::NAN) * 2f64.powi(shift as i32)
    })
}

impl RatPoly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: BigRational) -> Self {
        Self::new(vec![c])
    }

    /// The monomial `t`.
    pub fn t() -> Self {
        Self::new(vec![BigRational::zero(), BigRational::one()])
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&BigRational> {
        self.coeffs.last()
    }

    pub fn coeff(&self, i: usize) -> BigRational {
        self.coeffs.get(i).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.coeffs.iter().map(rat_to_f64).collect()
    }

    /// Multiplicity of the root at zero (number of vanishing low coefficients).
    pub fn low_order(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn sign_at(&self, x: &BigRational) -> Ordering {
        let v = self.eval(x);
        if v.is_positive() {
            Ordering::Greater
        } else if v.is_negative() {
            Ordering::Less
        } else {
            Ordering::Equal
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..n).map(|i| self.coeff(i) + other.coeff(i)).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..n).map(|i| self.coeff(i) - other.coeff(i)).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigRational::from_integer(BigInt::from(i)))
                .collect(),
        )
    }

    pub fn monic(&self) -> Self {
        match self.leading() {
            Some(l) => {
                let inv = l.recip();
                self.scale(&inv)
            }
            None => Self::zero(),
        }
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        let dd = divisor.degree().expect("division by the zero polynomial");
        let lead = divisor.leading().unwrap().clone();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Self::zero(), self.clone());
        }
        let mut quot = vec![BigRational::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = &rem[k + dd] / &lead;
            if !c.is_zero() {
                for (j, dc) in divisor.coeffs.iter().enumerate() {
                    rem[k + j] -= &c * dc;
                }
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        (Self::new(quot), Self::new(rem))
    }

    pub fn gcd(&self, other: &Self) -> Self {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Yun's square-free decomposition: element `i` holds the product of the
    /// distinct factors of multiplicity `i + 1` (monic, possibly constant 1).
    pub fn square_free_decomposition(&self) -> Vec<RatPoly> {
        let mut out = Vec::new();
        if self.degree().unwrap_or(0) == 0 {
            return out;
        }
        let f = self.monic();
        let df = f.derivative();
        let a = f.gcd(&df);
        let mut b = f.div_rem(&a).0;
        let mut c = df.div_rem(&a).0;
        let mut d = c.sub(&b.derivative());
        loop {
            let g = b.gcd(&d);
            out.push(g.clone());
            b = b.div_rem(&g).0;
            if b.degree().unwrap_or(0) == 0 {
                break;
            }
            c = d.div_rem(&g).0;
            d = c.sub(&b.derivative());
        }
        while out.last().is_some_and(|p| p.degree().unwrap_or(0) == 0) {
            out.pop();
        }
        out
    }

    fn sturm_sequence(&self) -> Vec<RatPoly> {
        let mut seq = vec![self.clone(), self.derivative()];
        while !seq.last().unwrap().is_zero() {
            let n = seq.len();
            let (_, r) = seq[n - 2].div_rem(&seq[n - 1]);
            let neg = r.scale(&-BigRational::one());
            if neg.is_zero() {
                break;
            }
            seq.push(neg);
        }
        seq.retain(|p| !p.is_zero());
        seq
    }

    /// Distinct real roots in `[lo, hi]` of a square-free polynomial, each
    /// refined to an interval narrower than `tol`; returns midpoints.
    pub fn real_roots_in(&self, lo: &BigRational, hi: &BigRational, tol: f64) -> Vec<f64> {
        if self.degree().unwrap_or(0) == 0 {
            return Vec::new();
        }
        let sturm = self.sturm_sequence();
        let variations = |x: &BigRational| -> usize {
            let mut last = Ordering::Equal;
            let mut count = 0;
            for p in &sturm {
                let s = p.sign_at(x);
                if s == Ordering::Equal {
                    continue;
                }
                if last != Ordering::Equal && s != last {
                    count += 1;
                }
                last = s;
            }
            count
        };
        let mut roots = Vec::new();
        // Sturm counts roots in (a, b]; pick up an exact root at `lo` separately.
        if self.sign_at(lo) == Ordering::Equal {
            roots.push(rat_to_f64(lo));
        }
        let tol = rat_from_f64(tol).unwrap();
        let two = rat(2, 1);
        let mut stack = vec![(lo.clone(), hi.clone(), variations(lo), variations(hi))];
        while let Some((a, b, va, vb)) = stack.pop() {
            let count = va.saturating_sub(vb);
            if count == 0 {
                continue;
            }
            if count == 1 {
                roots.push(self.refine_root(&a, &b, &tol));
                continue;
            }
            let m = (&a + &b) / &two;
            let vm = variations(&m);
            stack.push((a, m.clone(), va, vm));
            stack.push((m, b, vm, vb));
        }
        roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
        roots
    }

    /// Bisection on an isolating interval `(a, b]` containing exactly one root.
    fn refine_root(&self, a: &BigRational, b: &BigRational, tol: &BigRational) -> f64 {
        let two = rat(2, 1);
        let mut a = a.clone();
        let mut b = b.clone();
        if self.sign_at(&b) == Ordering::Equal {
            return rat_to_f64(&b);
        }
        let sb = self.sign_at(&b);
        while &b - &a > *tol {
            let m = (&a + &b) / &two;
            let sm = self.sign_at(&m);
            if sm == Ordering::Equal {
                return rat_to_f64(&m);
            }
            if sm == sb {
                b = m;
            } else {
                a = m;
            }
        }
        rat_to_f64(&((a + b) / two))
    }
}

/// Real roots with multiplicities of `poly` in `[lo, hi]`.
pub fn roots_with_multiplicity(
    poly: &RatPoly,
    lo: &BigRational,
    hi: &BigRational,
    tol: f64,
) -> Vec<(f64, usize)> {
    let mut out = Vec::new();
    for (i, factor) in poly.square_free_decomposition().iter().enumerate() {
        for r in factor.real_roots_in(lo, hi, tol) {
            out.push((r, i + 1));
        }
    }
    out.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    out
}

/// Horner evaluation of f64 coefficients (increasing degree).
pub fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

/// Value and first derivative of a polynomial with f64 coefficients.
pub fn horner_with_derivative(coeffs: &[f64], x: f64) -> (f64, f64) {
    let mut p = 0.0;
    let mut dp = 0.0;
    for &c in coeffs.iter().rev() {
        dp = dp * x + p;
        p = p * x + c;
    }
    (p, dp)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(cs: &[i64]) -> RatPoly {
        RatPoly::new(cs.iter().map(|&c| rat(c, 1)).collect())
    }

    #[test]
    fn division_round_trips() {
        let a = poly(&[-1, 0, 0, 1]);
        let b = poly(&[-1, 1]);
        let (q, r) = a.div_rem(&b);
        assert!(r.is_zero());
        assert_eq!(q, poly(&[1, 1, 1]));
    }

    #[test]
    fn square_free_separates_multiplicities() {
        // (t - 1)^2 (t - 2) (t + 3)^3
        let f = poly(&[-1, 1])
            .mul(&poly(&[-1, 1]))
            .mul(&poly(&[-2, 1]))
            .mul(&poly(&[3, 1]).mul(&poly(&[3, 1])).mul(&poly(&[3, 1])));
        let roots = roots_with_multiplicity(&f, &rat(-5, 1), &rat(5, 1), 1e-14);
        assert_eq!(roots.len(), 3);
        assert!((roots[0].0 + 3.0).abs() < 1e-12 && roots[0].1 == 3);
        assert!((roots[1].0 - 1.0).abs() < 1e-12 && roots[1].1 == 2);
        assert!((roots[2].0 - 2.0).abs() < 1e-12 && roots[2].1 == 1);
    }

    #[test]
    fn sturm_finds_irrational_roots() {
        // t^2 - 2 on [0, 2]
        let roots = poly(&[-2, 0, 1]).real_roots_in(&rat(0, 1), &rat(2, 1), 1e-15);
        assert_eq!(roots.len(), 1);
        assert!((roots[0] - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn endpoint_roots_are_reported() {
        let roots = poly(&[1, -1]).real_roots_in(&rat(-1, 1), &rat(1, 1), 1e-14);
        assert_eq!(roots, vec![1.0]);
        let roots = poly(&[1, 1]).real_roots_in(&rat(-1, 1), &rat(1, 1), 1e-14);
        assert_eq!(roots, vec![-1.0]);
    }

    #[test]
    fn horner_derivative_matches_finite_difference() {
        let c = [1.0, -0.75, 0.3, 0.1];
        let (_, d) = horner_with_derivative(&c, 0.4);
        let fd = (horner(&c, 0.4 + 1e-6) - horner(&c, 0.4 - 1e-6)) / 2e-6;
        assert!((d - fd).abs() < 1e-8);
    }
}
