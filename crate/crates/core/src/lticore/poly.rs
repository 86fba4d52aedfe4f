//! Real univariate polynomials with ascending coefficients.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

use super::roots;

/// Threshold used when counting structurally zero low-order coefficients.
pub const ORIGIN_COEFF_TOL: f64 = 1e-12;

/// A polynomial `c0 + c1 s + ... + cn s^n`.
///
/// The coefficient vector never ends in an exact zero, so the zero polynomial
/// is the empty vector and every other polynomial has a nonzero leading
/// coefficient.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(1.0)
    }

    pub fn constant(c: f64) -> Self {
        Self::new(vec![c])
    }

    /// `s^n`
    pub fn monomial(n: usize) -> Self {
        let mut c = vec![0.0; n + 1];
        c[n] = 1.0;
        Self { coeffs: c }
    }

    /// Monic real polynomial with the given roots. Complex roots must come in
    /// conjugate pairs; imaginary residue of the expansion is discarded.
    pub fn from_roots(roots: &[Complex64]) -> Self {
        let mut acc = vec![Complex64::new(1.0, 0.0)];
        for &r in roots {
            let mut next = vec![Complex64::new(0.0, 0.0); acc.len() + 1];
            for (i, &a) in acc.iter().enumerate() {
                next[i + 1] += a;
                next[i] -= a * r;
            }
            acc = next;
        }
        Self::new(acc.into_iter().map(|c| c.re).collect())
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading(&self) -> f64 {
        self.coeffs.last().copied().unwrap_or(0.0)
    }

    /// Coefficient of `s^i` (zero past the degree).
    pub fn coeff(&self, i: usize) -> f64 {
        self.coeffs.get(i).copied().unwrap_or(0.0)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn eval_complex(&self, s: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * s + c)
    }

    /// `sum |c_i| |s|^i`, the natural scale for rounding error of [`eval_complex`].
    ///
    /// [`eval_complex`]: Polynomial::eval_complex
    pub fn abs_eval(&self, r: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, &c| acc * r + c.abs())
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| c * i as f64)
                .collect(),
        )
    }

    pub fn scale(&self, k: f64) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    /// Euclidean division, `self = q * d + r` with `deg r < deg d`.
    pub fn div_rem(&self, d: &Polynomial) -> Result<(Polynomial, Polynomial)> {
        let dd = d.degree().ok_or(Error::ZeroPolynomial)?;
        let Some(nd) = self.degree() else {
            return Ok((Self::zero(), Self::zero()));
        };
        if nd < dd {
            return Ok((Self::zero(), self.clone()));
        }
        let lead = d.leading();
        let mut rem = self.coeffs.clone();
        let mut q = vec![0.0; nd - dd + 1];
        for k in (0..=nd - dd).rev() {
            let c = rem[k + dd] / lead;
            q[k] = c;
            for (j, &dj) in d.coeffs.iter().enumerate() {
                rem[k + j] -= c * dj;
            }
            rem[k + dd] = 0.0;
        }
        rem.truncate(dd);
        Ok((Self::new(q), Self::new(rem)))
    }

    /// Number of leading low-order coefficients that are negligible relative
    /// to the largest one. This is the multiplicity of the root at the origin
    /// when such zeros are structural.
    pub fn origin_order(&self) -> usize {
        let tol = ORIGIN_COEFF_TOL * self.max_abs_coeff();
        self.coeffs
            .iter()
            .take_while(|c| c.abs() <= tol)
            .count()
            .min(self.degree().unwrap_or(0))
    }

    /// Drops the lowest `v` coefficients (division by `s^v` discarding the
    /// remainder).
    pub fn shift_down(&self, v: usize) -> Self {
        Self::new(self.coeffs.iter().skip(v).copied().collect())
    }

    pub fn shift_up(&self, v: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut c = vec![0.0; v];
        c.extend_from_slice(&self.coeffs);
        Self { coeffs: c }
    }

    /// Zeros out coefficients below `rel * max|c|`.
    pub fn chop(&self, rel: f64) -> Self {
        let tol = rel * self.max_abs_coeff();
        Self::new(
            self.coeffs
                .iter()
                .map(|&c| if c.abs() <= tol { 0.0 } else { c })
                .collect(),
        )
    }

    /// Polynomial in `x = s^2` built from the even-index coefficients.
    pub fn even_part_in_square(&self) -> Self {
        Self::new(self.coeffs.iter().step_by(2).copied().collect())
    }

    /// Polynomial in `x = s^2` built from the odd-index coefficients, i.e.
    /// `p_odd(s) = s * q(s^2)`.
    pub fn odd_part_in_square(&self) -> Self {
        Self::new(self.coeffs.iter().skip(1).step_by(2).copied().collect())
    }

    /// Splits `p(jw) = re(w) + j im(w)` into two real polynomials in `w`.
    pub fn on_imaginary_axis(&self) -> (Polynomial, Polynomial) {
        let n = self.coeffs.len();
        let mut re = vec![0.0; n];
        let mut im = vec![0.0; n];
        for (k, &c) in self.coeffs.iter().enumerate() {
            // j^k cycles 1, j, -1, -j
            match k % 4 {
                0 => re[k] = c,
                1 => im[k] = c,
                2 => re[k] = -c,
                _ => im[k] = -c,
            }
        }
        (Self::new(re), Self::new(im))
    }

    /// All complex roots, repeated by multiplicity, conjugate-symmetric.
    pub fn roots(&self) -> Result<Vec<Complex64>> {
        roots::poly_roots(self)
    }

    /// Roots grouped into clusters of numerically coincident values.
    pub fn root_clusters(&self) -> Result<Vec<roots::RootCluster>> {
        Ok(roots::cluster(&self.roots()?))
    }
}

impl fmt::Display for Polynomial {
    /// Space-separated ascending coefficients; `0` for the zero polynomial.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl std::str::FromStr for Polynomial {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let coeffs = s
            .split_whitespace()
            .map(|t| {
                t.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| Error::TfSyntax(format!("bad coefficient `{t}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        if coeffs.is_empty() {
            return Err(Error::TfSyntax("empty coefficient list".into()));
        }
        Ok(Self::new(coeffs))
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;

    fn add(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;

    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;

    fn mul(self, rhs: &Polynomial) -> Polynomial {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let mut c = vec![0.0; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Polynomial::new(c)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;

    fn neg(self) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Polynomial {
            type Output = Polynomial;
            fn $m(self, rhs: Polynomial) -> Polynomial {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        -&self
    }
}
