use nalgebra::linalg::balancing::balance_parlett_reinsch;
use nalgebra::{DMatrix, Hessenberg};
use num_complex::Complex64;

use crate::error::{Error, Result};

const MAX_ITERS_PER_EIGENVALUE: usize = 100;

/// Eigenvalues of a real square matrix: Parlett-Reinsch balancing, Householder
/// reduction to Hessenberg form, then Francis double-shift QR with
/// exceptional shifts.
pub fn eigenvalues(a: &DMatrix<f64>) -> Result<Vec<Complex64>> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "eigenvalues of a {}x{} matrix",
            a.nrows(),
            a.ncols()
        )));
    }
    let n = a.nrows();
    if n == 0 {
        return Ok(Vec::new());
    }
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::NoConvergence);
    }
    let mut m = a.clone();
    balance_parlett_reinsch(&mut m);
    let h = if n > 2 { Hessenberg::new(m).h() } else { m };
    hqr(&h)
}

/// Francis QR on an upper Hessenberg matrix. Indices are 1-based internally
/// to keep the shift/bulge bookkeeping readable.
fn hqr(h: &DMatrix<f64>) -> Result<Vec<Complex64>> {
    let n = h.nrows();
    let w = n + 1;
    let mut a = vec![0.0f64; w * w];
    let ix = |i: usize, j: usize| i * w + j;
    for i in 0..n {
        for j in 0..n {
            // only the Hessenberg part is meaningful
            if j + 1 >= i {
                a[ix(i + 1, j + 1)] = h[(i, j)];
            }
        }
    }
    let mut wr = vec![0.0; w];
    let mut wi = vec![0.0; w];

    let mut anorm = 0.0;
    for i in 1..=n {
        for j in i.saturating_sub(1).max(1)..=n {
            anorm += a[ix(i, j)].abs();
        }
    }

    let mut nn = n;
    let mut t = 0.0;
    let (mut p, mut q, mut r, mut s, mut x, mut y, mut z, mut ww);
    while nn >= 1 {
        let mut its = 0;
        loop {
            let mut l = nn;
            while l >= 2 {
                s = a[ix(l - 1, l - 1)].abs() + a[ix(l, l)].abs();
                if s == 0.0 {
                    s = anorm;
                }
                if a[ix(l, l - 1)].abs() + s == s {
                    a[ix(l, l - 1)] = 0.0;
                    break;
                }
                l -= 1;
            }
            x = a[ix(nn, nn)];
            if l == nn {
                wr[nn] = x + t;
                wi[nn] = 0.0;
                nn -= 1;
                break;
            }
            y = a[ix(nn - 1, nn - 1)];
            ww = a[ix(nn, nn - 1)] * a[ix(nn - 1, nn)];
            if l == nn - 1 {
                p = 0.5 * (y - x);
                q = p * p + ww;
                z = q.abs().sqrt();
                x += t;
                if q >= 0.0 {
                    z = p + z.copysign(p);
                    wr[nn - 1] = x + z;
                    wr[nn] = x + z;
                    if z != 0.0 {
                        wr[nn] = x - ww / z;
                    }
                    wi[nn - 1] = 0.0;
                    wi[nn] = 0.0;
                } else {
                    wr[nn - 1] = x + p;
                    wr[nn] = x + p;
                    wi[nn - 1] = -z;
                    wi[nn] = z;
                }
                nn -= 2;
                break;
            }
            if its == 10 * (MAX_ITERS_PER_EIGENVALUE / 10) {
                return Err(Error::NoConvergence);
            }
            if its > 0 && its % 10 == 0 {
                // exceptional shift
                t += x;
                for i in 1..=nn {
                    a[ix(i, i)] -= x;
                }
                s = a[ix(nn, nn - 1)].abs() + a[ix(nn - 1, nn - 2)].abs();
                x = 0.75 * s;
                y = x;
                ww = -0.4375 * s * s;
            }
            its += 1;
            let mut m = nn - 2;
            loop {
                z = a[ix(m, m)];
                r = x - z;
                s = y - z;
                p = (r * s - ww) / a[ix(m + 1, m)] + a[ix(m, m + 1)];
                q = a[ix(m + 1, m + 1)] - z - r - s;
                r = a[ix(m + 2, m + 1)];
                s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                let u = a[ix(m, m - 1)].abs() * (q.abs() + r.abs());
                let v = p.abs() * (a[ix(m - 1, m - 1)].abs() + z.abs() + a[ix(m + 1, m + 1)].abs());
                if u + v == v {
                    break;
                }
                m -= 1;
            }
            for i in (m + 2)..=nn {
                a[ix(i, i - 2)] = 0.0;
                if i != m + 2 {
                    a[ix(i, i - 3)] = 0.0;
                }
            }
            for k in m..nn {
                if k != m {
                    p = a[ix(k, k - 1)];
                    q = a[ix(k + 1, k - 1)];
                    r = 0.0;
                    if k != nn - 1 {
                        r = a[ix(k + 2, k - 1)];
                    }
                    x = p.abs() + q.abs() + r.abs();
                    if x != 0.0 {
                        p /= x;
                        q /= x;
                        r /= x;
                    }
                }
                s = (p * p + q * q + r * r).sqrt().copysign(p);
                if s != 0.0 {
                    if k == m {
                        if l != m {
                            a[ix(k, k - 1)] = -a[ix(k, k - 1)];
                        }
                    } else {
                        a[ix(k, k - 1)] = -s * x;
                    }
                    p += s;
                    x = p / s;
                    y = q / s;
                    z = r / s;
                    q /= p;
                    r /= p;
                    for j in k..=nn {
                        p = a[ix(k, j)] + q * a[ix(k + 1, j)];
                        if k != nn - 1 {
                            p += r * a[ix(k + 2, j)];
                            a[ix(k + 2, j)] -= p * z;
                        }
                        a[ix(k + 1, j)] -= p * y;
                        a[ix(k, j)] -= p * x;
                    }
                    let mmin = nn.min(k + 3);
                    for i in l..=mmin {
                        p = x * a[ix(i, k)] + y * a[ix(i, k + 1)];
                        if k != nn - 1 {
                            p += z * a[ix(i, k + 2)];
                            a[ix(i, k + 2)] -= p * r;
                        }
                        a[ix(i, k + 1)] -= p * q;
                        a[ix(i, k)] -= p;
                    }
                }
            }
            if l >= nn.saturating_sub(1) {
                break;
            }
        }
    }
    Ok((1..=n).map(|i| Complex64::new(wr[i], wi[i])).collect())
}

/// Spectral radius.
pub fn spectral_radius(eigs: &[Complex64]) -> f64 {
    eigs.iter().fold(0.0, |m, z| m.max(z.norm()))
}

pub fn max_real_part(eigs: &[Complex64]) -> f64 {
    eigs.iter().fold(f64::NEG_INFINITY, |m, z| m.max(z.re))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn sorted(mut e: Vec<Complex64>) -> Vec<Complex64> {
        e.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
        e
    }

    #[test]
    fn damped_oscillator() {
        let a = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, -1.0]);
        let e = sorted(eigenvalues(&a).unwrap());
        assert_abs_diff_eq!(e[0].re, -0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(e[1].im, 3f64.sqrt() / 2.0, epsilon = 1e-12);
        assert_eq!(e[0], e[1].conj());
    }

    #[test]
    fn scalar_zero() {
        let e = eigenvalues(&DMatrix::zeros(1, 1)).unwrap();
        assert_eq!(e, vec![Complex64::new(0.0, 0.0)]);
    }

    #[test]
    fn empty_and_nonsquare() {
        assert!(eigenvalues(&DMatrix::zeros(0, 0)).unwrap().is_empty());
        assert!(eigenvalues(&DMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn repeated_imaginary_pair() {
        // companion of (s^2+1)^2 = s^4 + 2 s^2 + 1
        let a = DMatrix::from_row_slice(
            4,
            4,
            &[
                0.0, 0.0, 0.0, -1.0, //
                1.0, 0.0, 0.0, 0.0, //
                0.0, 1.0, 0.0, -2.0, //
                0.0, 0.0, 1.0, 0.0,
            ],
        );
        let e = eigenvalues(&a).unwrap();
        assert_eq!(e.len(), 4);
        for z in e {
            assert_abs_diff_eq!(z.re, 0.0, epsilon = 1e-7);
            assert_abs_diff_eq!(z.im.abs(), 1.0, epsilon = 1e-7);
        }
    }

    #[test]
    fn triangular_and_random() {
        let a = DMatrix::from_row_slice(3, 3, &[1.0, 5.0, 7.0, 0.0, -2.0, 3.0, 0.0, 0.0, 4.0]);
        let e = sorted(eigenvalues(&a).unwrap());
        let re: Vec<f64> = e.iter().map(|z| z.re).collect();
        assert_abs_diff_eq!(re[0], -2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(re[1], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(re[2], 4.0, epsilon = 1e-12);

        // trace and determinant are preserved on a dense matrix
        let a = DMatrix::from_row_slice(
            4,
            4,
            &[
                0.3, -1.2, 2.0, 0.5, 1.1, 0.4, -0.7, 2.2, -0.9, 1.6, 0.2, -1.3, 0.8, -0.1, 1.9, -0.6,
            ],
        );
        let e = eigenvalues(&a).unwrap();
        let tr: Complex64 = e.iter().sum();
        let det: Complex64 = e.iter().product();
        assert_abs_diff_eq!(tr.re, a.trace(), epsilon = 1e-12);
        assert_abs_diff_eq!(det.re, a.determinant(), epsilon = 1e-10);
        assert_abs_diff_eq!(det.im, 0.0, epsilon = 1e-10);
    }
}
