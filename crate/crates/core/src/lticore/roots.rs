//! Polynomial roots via the balanced companion matrix, plus clustering of
//! numerically coincident roots.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

use super::eigen::eigenvalues;
use super::poly::Polynomial;

/// Relative radius within which computed roots are treated as one root of
/// higher multiplicity. A double root computed in double precision is only
/// accurate to about `sqrt(eps)`.
pub const CLUSTER_TOL: f64 = 1e-6;

/// A distinct root together with its multiplicity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RootCluster {
    pub center: Complex64,
    pub multiplicity: usize,
}

impl RootCluster {
    pub fn is_real(&self) -> bool {
        self.center.im == 0.0
    }
}

pub fn poly_roots(p: &Polynomial) -> Result<Vec<Complex64>> {
    let Some(deg) = p.degree() else {
        return Err(Error::ZeroPolynomial);
    };
    let v = p.origin_order();
    let mut roots = vec![Complex64::new(0.0, 0.0); v];
    let q = p.shift_down(v);
    let m = deg - v;
    match m {
        0 => {}
        1 => roots.push(Complex64::new(-q.coeff(0) / q.coeff(1), 0.0)),
        _ => {
            let lead = q.leading();
            let mut companion = DMatrix::<f64>::zeros(m, m);
            for i in 0..m {
                if i + 1 < m {
                    companion[(i + 1, i)] = 1.0;
                }
                companion[(i, m - 1)] = -q.coeff(i) / lead;
            }
            let eig = symmetrize(&eigenvalues(&companion)?);
            // Newton only helps isolated roots; near a multiple root it skews
            // the cluster mean
            let isolated = |i: usize| {
                let z = eig[i];
                eig.iter().enumerate().all(|(k, w)| {
                    k == i || (w - z).norm() > CLUSTER_TOL * (1.0 + z.norm())
                })
            };
            roots.extend(
                (0..eig.len()).map(|i| if isolated(i) { polish(&q, eig[i]) } else { eig[i] }),
            );
            // polishing may nudge conjugates apart; restore exact symmetry
            roots = symmetrize(&roots);
        }
    }
    roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(roots)
}

/// Keeps real eigenvalues and mirrors the upper-half-plane ones so the
/// result is exactly closed under conjugation.
fn symmetrize(z: &[Complex64]) -> Vec<Complex64> {
    let upper: Vec<_> = z.iter().copied().filter(|c| c.im > 0.0).collect();
    let lower = z.iter().filter(|c| c.im < 0.0).count();
    if upper.len() != lower {
        return z.to_vec();
    }
    let mut out: Vec<_> = z.iter().copied().filter(|c| c.im == 0.0).collect();
    for c in upper {
        out.push(c);
        out.push(c.conj());
    }
    out
}

/// A few guarded Newton steps on the original polynomial.
fn polish(p: &Polynomial, z: Complex64) -> Complex64 {
    let dp = p.derivative();
    let mut best = z;
    let mut best_res = p.eval_complex(z).norm();
    for _ in 0..3 {
        let d = dp.eval_complex(best);
        if d.norm() == 0.0 || best_res == 0.0 {
            break;
        }
        let cand = best - p.eval_complex(best) / d;
        let res = p.eval_complex(cand).norm();
        if res.is_finite() && res < best_res {
            best = cand;
            best_res = res;
        } else {
            break;
        }
    }
    if z.im == 0.0 {
        Complex64::new(best.re, 0.0)
    } else {
        best
    }
}

/// Groups roots lying within `CLUSTER_TOL * (1 + |c|)` of a running cluster
/// mean. Cluster centres with negligible imaginary part are snapped to the
/// real axis.
pub fn cluster(roots: &[Complex64]) -> Vec<RootCluster> {
    let mut groups: Vec<(Complex64, usize)> = Vec::new();
    for &r in roots {
        let hit = groups.iter_mut().find(|(sum, n)| {
            let c = *sum / *n as f64;
            (c - r).norm() <= CLUSTER_TOL * (1.0 + c.norm())
        });
        match hit {
            Some((sum, n)) => {
                *sum += r;
                *n += 1;
            }
            None => groups.push((r, 1)),
        }
    }
    groups
        .into_iter()
        .map(|(sum, n)| {
            let mut c = sum / n as f64;
            if c.im.abs() <= 1e-12 * (1.0 + c.norm()) {
                c.im = 0.0;
            }
            RootCluster {
                center: c,
                multiplicity: n,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn roots_of(c: &[f64]) -> Vec<Complex64> {
        Polynomial::new(c.to_vec()).roots().unwrap()
    }

    #[test]
    fn factorable_quadratic() {
        let r = roots_of(&[2.0, 3.0, 1.0]);
        assert_eq!(r.len(), 2);
        assert_abs_diff_eq!(r[0].re, -2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r[1].re, -1.0, epsilon = 1e-12);
        assert!(r.iter().all(|z| z.im == 0.0));
    }

    #[test]
    fn unit_oscillator() {
        let r = roots_of(&[1.0, 0.0, 1.0]);
        assert_eq!(r.len(), 2);
        assert_abs_diff_eq!(r[0].re, 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(r[0].im.abs(), 1.0, epsilon = 1e-14);
        assert_eq!(r[0], r[1].conj());
    }

    #[test]
    fn free_body_denominator() {
        // s^2 + s: one exact origin root
        let r = roots_of(&[0.0, 1.0, 1.0]);
        assert_eq!(r, vec![Complex64::new(-1.0, 0.0), Complex64::new(0.0, 0.0)]);
    }

    #[test]
    fn zero_polynomial_is_an_error() {
        assert_eq!(Polynomial::zero().roots(), Err(Error::ZeroPolynomial));
        assert!(roots_of(&[3.0]).is_empty());
    }

    #[test]
    fn double_root_clusters() {
        // (s^2 + 1)^2
        let p = Polynomial::new(vec![1.0, 0.0, 2.0, 0.0, 1.0]);
        let cl = p.root_clusters().unwrap();
        assert_eq!(cl.len(), 2);
        assert!(cl.iter().all(|c| c.multiplicity == 2));
        for c in cl {
            assert_abs_diff_eq!(c.center.re, 0.0, epsilon = 1e-9);
            assert_abs_diff_eq!(c.center.im.abs(), 1.0, epsilon = 1e-9);
        }
        // (s + 1)^2
        let cl = Polynomial::new(vec![1.0, 2.0, 1.0]).root_clusters().unwrap();
        assert_eq!(cl.len(), 1);
        assert_eq!(cl[0].multiplicity, 2);
        assert!(cl[0].is_real());
    }
}
