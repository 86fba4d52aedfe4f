//! Frequency-response polynomials of a scalar rational function.
//!
//! With `n(jw) = nR + j nI` and `d(jw) = dR + j dI`,
//! `G(jw) = (n conj d) / |d|^2`, so
//! `Im G` has the sign of `p = nI dR - nR dI` (odd in `w`) and
//! `Re G` has the sign of `e = nR dR + nI dI` (even in `w`).
//! Both are returned as polynomials in `x = w^2`, alongside the matching
//! absolute-term polynomials that bound their rounding error.

use crate::lticore::{Polynomial, RationalFunction};

/// Coefficients at or below this multiple of the absolute-term coefficient
/// are cancellation noise.
const CHOP_ULPS: f64 = 64.0 * f64::EPSILON;

#[derive(Clone, Debug)]
pub(crate) struct FrequencyForms {
    /// `p(w) = w r(w^2)`.
    pub r: Polynomial,
    pub r_abs: Polynomial,
    /// `e(w) = E(w^2)`.
    pub e: Polynomial,
    pub e_abs: Polynomial,
}

fn abs_poly(p: &Polynomial) -> Polynomial {
    Polynomial::new(p.coeffs().iter().map(|c| c.abs()).collect())
}

fn chop_against(p: &Polynomial, bound: &Polynomial) -> Polynomial {
    Polynomial::new(
        p.coeffs()
            .iter()
            .enumerate()
            .map(|(i, &c)| if c.abs() <= CHOP_ULPS * bound.coeff(i) { 0.0 } else { c })
            .collect(),
    )
}

impl FrequencyForms {
    pub fn of(g: &RationalFunction) -> Self {
        let (nr, ni) = g.num().on_imaginary_axis();
        let (dr, di) = g.den().on_imaginary_axis();
        let p = &(&ni * &dr) - &(&nr * &di);
        let p_abs = &(&abs_poly(&ni) * &abs_poly(&dr)) + &(&abs_poly(&nr) * &abs_poly(&di));
        let e = &(&nr * &dr) + &(&ni * &di);
        let e_abs = &(&abs_poly(&nr) * &abs_poly(&dr)) + &(&abs_poly(&ni) * &abs_poly(&di));

        let r_abs = p_abs.odd_part_in_square();
        let e_abs = e_abs.even_part_in_square();
        let r = chop_against(&p.odd_part_in_square(), &r_abs);
        let e = chop_against(&e.even_part_in_square(), &e_abs);
        Self {
            r_abs: truncate_to(&r_abs, &r),
            r,
            e_abs: truncate_to(&e_abs, &e),
            e,
        }
    }
}

/// `bound` without the terms above the degree of `p`. Leading terms that
/// cancel exactly must not let the tolerance outgrow the polynomial itself.
fn truncate_to(bound: &Polynomial, p: &Polynomial) -> Polynomial {
    match p.degree() {
        Some(d) => Polynomial::new(bound.coeffs().iter().take(d + 1).copied().collect()),
        None => Polynomial::zero(),
    }
}

/// `a - k b`.
pub(crate) fn offset(a: &Polynomial, k: f64, b: &Polynomial) -> Polynomial {
    a - &b.scale(k)
}

/// Smallest value of `f / max(bound, tiny)` over the sample points, i.e.
/// the worst slack relative to the magnitude of the terms.
pub(crate) fn relative_slack(f: &Polynomial, bound: &Polynomial, xs: &[f64]) -> f64 {
    xs.iter()
        .map(|&x| {
            let b = bound.eval(x);
            let v = f.eval(x);
            if b > 0.0 {
                v / b
            } else {
                v
            }
        })
        .fold(f64::INFINITY, f64::min)
}
