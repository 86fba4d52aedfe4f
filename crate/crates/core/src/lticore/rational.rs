//! Scalar real-rational functions kept in a normalized, coprime form.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

use super::poly::Polynomial;
use super::roots::{cluster, RootCluster, CLUSTER_TOL};

/// Relative distance within which a numerator and denominator root cancel.
pub const CANCEL_TOL: f64 = 1e-8;

/// Relative size of `|den(s)|` below which `s` counts as a pole.
pub const EVAL_TOL: f64 = 1e-13;

/// `num(s) / den(s)` with a monic denominator and no shared roots.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalFunction {
    num: Polynomial,
    den: Polynomial,
}

/// Residue of a scalar function at one of its poles.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarResidue {
    pub pole: Complex64,
    pub multiplicity: usize,
    /// `None` when the pole is not simple.
    pub residue: Option<Complex64>,
}

impl RationalFunction {
    pub fn new(num: Polynomial, den: Polynomial) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        Self { num, den }.normalized()
    }

    pub fn from_coeffs(num: &[f64], den: &[f64]) -> Result<Self> {
        Self::new(Polynomial::new(num.to_vec()), Polynomial::new(den.to_vec()))
    }

    pub fn constant(c: f64) -> Self {
        Self {
            num: Polynomial::constant(c),
            den: Polynomial::one(),
        }
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    pub fn num(&self) -> &Polynomial {
        &self.num
    }

    pub fn den(&self) -> &Polynomial {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    fn num_degree(&self) -> usize {
        self.num.degree().unwrap_or(0)
    }

    fn den_degree(&self) -> usize {
        self.den.degree().unwrap_or(0)
    }

    pub fn is_proper(&self) -> bool {
        self.num.is_zero() || self.num_degree() <= self.den_degree()
    }

    pub fn is_strictly_proper(&self) -> bool {
        self.num.is_zero() || self.num_degree() < self.den_degree()
    }

    /// Re-runs normalization. Idempotent.
    pub fn normalized(self) -> Result<Self> {
        let Self { num, den } = self;
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        if num.is_zero() {
            return Ok(Self::zero());
        }

        // structural zeros at the origin
        let vn = num.origin_order();
        let vd = den.origin_order();
        let common = vn.min(vd);
        let mut num = num.shift_down(vn).shift_up(vn - common);
        let mut den = den.shift_down(vd).shift_up(vd - common);

        if num.degree() > Some(0) && den.degree() > Some(0) {
            let g = common_factor(&num, &den)?;
            if g.degree() > Some(0) {
                num = num.div_rem(&g)?.0;
                den = den.div_rem(&g)?.0;
            }
        }

        let lead = den.leading();
        if lead != 1.0 {
            // x / x is exactly one; x * (1 / x) need not be
            num = Polynomial::new(num.coeffs().iter().map(|c| c / lead).collect());
            den = Polynomial::new(den.coeffs().iter().map(|c| c / lead).collect());
        }
        Ok(Self { num, den })
    }

    /// Origin-pole order, from structurally zero low-order denominator
    /// coefficients.
    pub fn origin_pole_order(&self) -> usize {
        self.den.origin_order()
    }

    pub fn poles(&self) -> Result<Vec<RootCluster>> {
        self.den.root_clusters()
    }

    pub fn zeros(&self) -> Result<Vec<RootCluster>> {
        if self.num.is_zero() {
            return Ok(Vec::new());
        }
        self.num.root_clusters()
    }

    /// Horner evaluation of `num(s)/den(s)`.
    pub fn eval(&self, s: Complex64) -> Result<Complex64> {
        let d = self.den.eval_complex(s);
        if d.norm() <= EVAL_TOL * self.den.abs_eval(s.norm()) {
            let nearest = self
                .den
                .roots()?
                .into_iter()
                .min_by(|a, b| (a - s).norm().total_cmp(&(b - s).norm()))
                .unwrap_or(s);
            return Err(Error::PoleEvaluation { s, nearest });
        }
        Ok(self.num.eval_complex(s) / d)
    }

    /// Value at `s = infinity` for a proper function.
    pub fn at_infinity(&self) -> Result<f64> {
        if !self.is_proper() {
            return Err(Error::Improper {
                num: self.num_degree(),
                den: self.den_degree(),
            });
        }
        if self.num_degree() == self.den_degree() && !self.num.is_zero() {
            Ok(self.num.leading() / self.den.leading())
        } else {
            Ok(0.0)
        }
    }

    /// `lim_{s->0} s^k g(s)`.
    ///
    /// Writing `den = s^v d~(s)` with `d~(0) != 0`, the limit is zero for
    /// `k > v`, `num(0)/d~(0)` for `k = v` and does not exist for `k < v`.
    /// The error carries entry `(0,0)`; matrix callers relabel it.
    pub fn limit_s_pow(&self, k: usize) -> Result<f64> {
        let v = self.origin_pole_order();
        if k < v {
            return Err(Error::LimitDoesNotExist {
                row: 0,
                col: 0,
                order: v,
                k,
            });
        }
        if k > v || self.num.is_zero() {
            return Ok(0.0);
        }
        let reduced = self.den.shift_down(v);
        Ok(self.num.coeff(0) / reduced.coeff(0))
    }

    /// First two Taylor coefficients of `num / d~` where `den = s^v d~`.
    pub fn origin_series(&self) -> (usize, f64, f64) {
        let v = self.origin_pole_order();
        let d = self.den.shift_down(v);
        let h0 = self.num.coeff(0) / d.coeff(0);
        let h1 = (self.num.coeff(1) - h0 * d.coeff(1)) / d.coeff(0);
        (v, h0, h1)
    }

    /// Residue `num(p)/den'(p)` at a simple pole `p`.
    pub fn residue_at(&self, p: Complex64) -> Result<ScalarResidue> {
        let hit = self
            .poles()?
            .into_iter()
            .filter(|c| (c.center - p).norm() <= CLUSTER_TOL * (1.0 + p.norm()))
            .min_by(|a, b| (a.center - p).norm().total_cmp(&(b.center - p).norm()));
        let Some(pole) = hit else {
            return Err(Error::NotAPole { p });
        };
        let residue = (pole.multiplicity == 1)
            .then(|| self.num.eval_complex(p) / self.den.derivative().eval_complex(p));
        Ok(ScalarResidue {
            pole: pole.center,
            multiplicity: pole.multiplicity,
            residue,
        })
    }

    pub fn scale(&self, k: f64) -> Self {
        if k == 0.0 {
            return Self::zero();
        }
        Self {
            num: self.num.scale(k),
            den: self.den.clone(),
        }
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.num.max_abs_coeff().max(self.den.max_abs_coeff())
    }
}

/// Monic polynomial whose roots are the roots shared (within `CANCEL_TOL`)
/// by `a` and `b`, with multiplicity.
pub fn common_factor(a: &Polynomial, b: &Polynomial) -> Result<Polynomial> {
    let ra = cluster(&a.roots()?);
    let mut rb = cluster(&b.roots()?);
    let mut shared = Vec::new();
    for za in ra.iter().filter(|c| c.center.im >= 0.0) {
        let near = rb.iter_mut().find(|zb| {
            zb.multiplicity > 0
                && (zb.center - za.center).norm() <= CANCEL_TOL * (1.0 + zb.center.norm())
        });
        if let Some(zb) = near {
            let m = za.multiplicity.min(zb.multiplicity);
            zb.multiplicity -= m;
            let z = (za.center + zb.center) / 2.0;
            for _ in 0..m {
                if za.center.im == 0.0 {
                    shared.push(Complex64::new(z.re, 0.0));
                } else {
                    shared.push(z);
                    shared.push(z.conj());
                }
            }
        }
    }
    Ok(Polynomial::from_roots(&shared))
}

impl fmt::Display for RationalFunction {
    /// `"c0 c1 ... / d0 d1 ..."`, ascending coefficients.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} / {}", self.num, self.den)
    }
}

impl std::str::FromStr for RationalFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.split('/');
        let (Some(n), Some(d), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(Error::TfSyntax(format!(
                "expected `num coeffs / den coeffs`, got `{s}`"
            )));
        };
        let num: Polynomial = n.parse()?;
        let den: Polynomial = d.parse()?;
        if den.is_zero() {
            return Err(Error::TfSyntax("denominator is zero".into()));
        }
        Self::new(num, den)
    }
}

impl Add for &RationalFunction {
    type Output = Result<RationalFunction>;

    fn add(self, rhs: &RationalFunction) -> Result<RationalFunction> {
        RationalFunction::new(
            &(&self.num * &rhs.den) + &(&rhs.num * &self.den),
            &self.den * &rhs.den,
        )
    }
}

impl Sub for &RationalFunction {
    type Output = Result<RationalFunction>;

    fn sub(self, rhs: &RationalFunction) -> Result<RationalFunction> {
        self + &(-rhs)
    }
}

impl Mul for &RationalFunction {
    type Output = Result<RationalFunction>;

    fn mul(self, rhs: &RationalFunction) -> Result<RationalFunction> {
        RationalFunction::new(&self.num * &rhs.num, &self.den * &rhs.den)
    }
}

impl Neg for &RationalFunction {
    type Output = RationalFunction;

    fn neg(self) -> RationalFunction {
        RationalFunction {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}
