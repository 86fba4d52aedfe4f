//! Sign analysis of real polynomials on the half line `[0, inf)`.
//!
//! The frequency-domain inequalities of the SISO tests reduce to statements
//! of the form "h(x) <= 0 for every x >= 0" about an explicit polynomial `h`.
//! Real roots of `h` and `h'` are isolated from the companion eigenvalues and
//! `h` is sampled at the origin, at each critical point, between consecutive
//! roots and beyond the largest root. A polynomial attains its maximum over
//! `[0, X]` at `0`, `X` or a critical point, so the samples decide the sign.

use crate::error::Result;
use crate::lticore::{cluster, Polynomial};

/// Imaginary part (relative) below which a computed root counts as real.
const REAL_ROOT_TOL: f64 = 1e-6;

/// Sorted, deduplicated sample abscissae in `[0, inf)`, plus the position of
/// the largest value of `h` among them.
#[derive(Clone, Debug)]
pub struct HalfLineScan {
    pub points: Vec<f64>,
    pub argmax: f64,
    pub max: f64,
    /// `h(x) -> +inf` as `x -> inf`.
    pub unbounded: bool,
}

impl HalfLineScan {
    /// A point where `h > 0` (or `h >= 0` when `inclusive`), if any.
    pub fn violation(&self, inclusive: bool) -> Option<f64> {
        if self.unbounded {
            return Some(self.argmax);
        }
        let hit = if inclusive { self.max >= 0.0 } else { self.max > 0.0 };
        hit.then_some(self.argmax)
    }
}

/// Positive real roots of `p` (cluster centres), ascending.
pub fn positive_real_roots(p: &Polynomial) -> Result<Vec<(f64, usize)>> {
    if p.degree().unwrap_or(0) == 0 {
        return Ok(Vec::new());
    }
    let mut out: Vec<(f64, usize)> = cluster(&p.roots()?)
        .into_iter()
        .filter(|c| c.center.im.abs() <= REAL_ROOT_TOL * (1.0 + c.center.norm()) && c.center.re > 0.0)
        .map(|c| (c.center.re, c.multiplicity))
        .collect();
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(out)
}

/// Scans `h` on `[0, inf)`.
pub fn scan(h: &Polynomial) -> Result<HalfLineScan> {
    let mut pts = vec![0.0];
    pts.extend(positive_real_roots(h)?.into_iter().map(|(x, _)| x));
    pts.extend(positive_real_roots(&h.derivative())?.into_iter().map(|(x, _)| x));
    pts.sort_by(f64::total_cmp);
    pts.dedup();

    let mut samples = pts.clone();
    samples.extend(pts.windows(2).map(|w| 0.5 * (w[0] + w[1])));
    let last = *pts.last().unwrap_or(&0.0);
    samples.push(2.0 * last + 1.0);
    let unbounded = h.degree().unwrap_or(0) >= 1 && h.leading() > 0.0;
    if unbounded {
        samples.push(cauchy_bound(h) + 1.0);
    }
    samples.sort_by(f64::total_cmp);
    samples.dedup();

    let (argmax, max) = samples
        .iter()
        .map(|&x| (x, h.eval(x)))
        .fold((0.0, f64::NEG_INFINITY), |best, cur| if cur.1 > best.1 { cur } else { best });
    Ok(HalfLineScan {
        points: samples,
        argmax,
        max,
        unbounded,
    })
}

/// Every root of `h` lies in `|x| < 1 + max |h_i / h_n|`.
fn cauchy_bound(h: &Polynomial) -> f64 {
    let lead = h.leading().abs();
    let c = h.coeffs();
    1.0 + c[..c.len() - 1]
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs() / lead))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[f64]) -> Polynomial {
        Polynomial::new(c.to_vec())
    }

    #[test]
    fn negative_constant_has_no_violation() {
        let s = scan(&p(&[-1.0])).unwrap();
        assert_eq!(s.violation(true), None);
    }

    #[test]
    fn bump_between_roots_is_found() {
        // -(x-1)(x-3) > 0 on (1,3), peak at 2
        let s = scan(&p(&[-3.0, 4.0, -1.0])).unwrap();
        let x = s.violation(false).unwrap();
        assert!((x - 2.0).abs() < 1e-12);
    }

    #[test]
    fn growing_leading_term_is_unbounded() {
        let s = scan(&p(&[-100.0, 0.0, 1.0])).unwrap();
        assert!(s.unbounded);
        let x = s.violation(false).unwrap();
        assert!(p(&[-100.0, 0.0, 1.0]).eval(x) > 0.0);
    }

    #[test]
    fn touch_at_origin_only_counts_when_inclusive() {
        // -x: zero at the origin, negative beyond
        let s = scan(&p(&[0.0, -1.0])).unwrap();
        assert_eq!(s.violation(false), None);
        assert_eq!(s.violation(true), Some(0.0));
    }

    #[test]
    fn double_root_reported_once() {
        let r = positive_real_roots(&p(&[1.0, -2.0, 1.0])).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].1, 2);
        assert!((r[0].0 - 1.0).abs() < 1e-9);
    }
}
