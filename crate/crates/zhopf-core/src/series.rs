//! Truncated power series in the small parameter.
//!
//! The transformed vector field is polynomial in `eps`, so the quotient
//! `r'/theta'` has an exact Taylor expansion that these series compute
//! term by term.

use std::ops::{Add, Mul, Neg, Sub};

/// Number of retained terms, orders `0..=4`.
pub const TERMS: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Series(pub [f64; TERMS]);

impl Series {
    pub const ZERO: Series = Series([0.0; TERMS]);

    pub fn constant(c: f64) -> Self {
        let mut s = [0.0; TERMS];
        s[0] = c;
        Series(s)
    }

    /// Series from polynomial coefficients; terms past the cap are dropped.
    pub fn from_coeffs(c: &[f64]) -> Self {
        let mut s = [0.0; TERMS];
        for (dst, src) in s.iter_mut().zip(c) {
            *dst = *src;
        }
        Series(s)
    }

    pub fn coeff(&self, i: usize) -> f64 {
        self.0.get(i).copied().unwrap_or(0.0)
    }

    pub fn scale(self, a: f64) -> Self {
        Series(self.0.map(|c| c * a))
    }

    /// Multiply by `eps^k`.
    pub fn shift(self, k: usize) -> Self {
        let mut s = [0.0; TERMS];
        if k < TERMS {
            s[k..].copy_from_slice(&self.0[..TERMS - k]);
        }
        Series(s)
    }

    /// Truncated quotient; the divisor must have a nonzero constant term.
    #[allow(clippy::should_implement_trait)]
    pub fn div(self, d: Series) -> Self {
        let mut q = [0.0; TERMS];
        for n in 0..TERMS {
            let mut acc = self.0[n];
            for j in 1..=n {
                acc -= d.0[j] * q[n - j];
            }
            q[n] = acc / d.0[0];
        }
        Series(q)
    }

    /// Horner evaluation of the truncated polynomial.
    pub fn eval(&self, eps: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, c| acc * eps + c)
    }
}

impl Add for Series {
    type Output = Series;
    fn add(self, o: Series) -> Series {
        let mut s = self.0;
        for (a, b) in s.iter_mut().zip(o.0) {
            *a += b;
        }
        Series(s)
    }
}

impl Sub for Series {
    type Output = Series;
    fn sub(self, o: Series) -> Series {
        self + (-o)
    }
}

impl Neg for Series {
    type Output = Series;
    fn neg(self) -> Series {
        Series(self.0.map(|c| -c))
    }
}

impl Mul for Series {
    type Output = Series;
    fn mul(self, o: Series) -> Series {
        let mut s = [0.0; TERMS];
        for i in 0..TERMS {
            if self.0[i] == 0.0 {
                continue;
            }
            for j in 0..TERMS - i {
                s[i + j] += self.0[i] * o.0[j];
            }
        }
        Series(s)
    }
}

impl Mul<f64> for Series {
    type Output = Series;
    fn mul(self, a: f64) -> Series {
        self.scale(a)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_series_from_division() {
        let one = Series::constant(1.0);
        let d = Series::from_coeffs(&[1.0, -1.0]);
        let q = one.div(d);
        assert_eq!(q.0, [1.0; TERMS]);
    }

    #[test]
    fn product_truncates() {
        let a = Series::from_coeffs(&[0.0, 0.0, 1.0]);
        let p = a * a * a;
        assert_eq!(p, Series::ZERO);
        assert_eq!((a * a).coeff(4), 1.0);
    }

    #[test]
    fn division_inverts_multiplication() {
        let a = Series::from_coeffs(&[2.0, -1.0, 0.5, 3.0, -0.25]);
        let b = Series::from_coeffs(&[1.5, 0.3, -0.7, 0.1, 2.0]);
        let q = (a * b).div(b);
        for i in 0..TERMS {
            assert!((q.0[i] - a.0[i]).abs() < 1e-12);
        }
    }
}
