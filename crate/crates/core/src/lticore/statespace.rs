//! State-space realizations.

use nalgebra::linalg::balancing::balance_parlett_reinsch;
use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

use super::eigen::eigenvalues;
use super::matrix::TransferMatrix;
use super::poly::Polynomial;
use super::rational::common_factor;

/// `x' = A x + B u`, `y = C x + D u`.
#[derive(Clone, Debug, PartialEq)]
pub struct StateSpace {
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
    pub c: DMatrix<f64>,
    pub d: DMatrix<f64>,
}

impl StateSpace {
    pub fn new(a: DMatrix<f64>, b: DMatrix<f64>, c: DMatrix<f64>, d: DMatrix<f64>) -> Result<Self> {
        let n = a.nrows();
        let ok = a.is_square()
            && b.nrows() == n
            && c.ncols() == n
            && d.nrows() == c.nrows()
            && d.ncols() == b.ncols();
        if !ok {
            return Err(Error::DimensionMismatch(format!(
                "A {}x{}, B {}x{}, C {}x{}, D {}x{}",
                a.nrows(),
                a.ncols(),
                b.nrows(),
                b.ncols(),
                c.nrows(),
                c.ncols(),
                d.nrows(),
                d.ncols()
            )));
        }
        Ok(Self { a, b, c, d })
    }

    /// A memoryless system `y = D u`.
    pub fn static_gain(d: DMatrix<f64>) -> Self {
        let (p, m) = d.shape();
        Self {
            a: DMatrix::zeros(0, 0),
            b: DMatrix::zeros(0, m),
            c: DMatrix::zeros(p, 0),
            d,
        }
    }

    pub fn n_states(&self) -> usize {
        self.a.nrows()
    }

    pub fn n_inputs(&self) -> usize {
        self.b.ncols()
    }

    pub fn n_outputs(&self) -> usize {
        self.c.nrows()
    }

    pub fn eigenvalues(&self) -> Result<Vec<Complex64>> {
        eigenvalues(&self.a)
    }

    /// `C (sI - A)^{-1} B + D`.
    pub fn eval(&self, s: Complex64) -> Result<DMatrix<Complex64>> {
        let d = self.d.map(|v| Complex64::new(v, 0.0));
        let n = self.n_states();
        if n == 0 {
            return Ok(d);
        }
        let a = self.a.map(|v| Complex64::new(v, 0.0));
        let b = self.b.map(|v| Complex64::new(v, 0.0));
        let c = self.c.map(|v| Complex64::new(v, 0.0));
        let m = DMatrix::from_diagonal_element(n, n, s) - a;
        let x = m.lu().solve(&b).ok_or(Error::PoleEvaluation { s, nearest: s })?;
        Ok(c * x + d)
    }

    /// Column-wise controllable canonical realization of a proper transfer
    /// matrix, stacked block-diagonally and diagonally rescaled for
    /// conditioning. Each column uses the least common denominator of its
    /// entries.
    pub fn from_transfer(g: &TransferMatrix) -> Result<Self> {
        g.require_proper()?;
        let (p, m) = (g.rows(), g.cols());
        let d = g.feedthrough()?;
        let mut blocks = Vec::with_capacity(m);
        for j in 0..m {
            let mut lcd = Polynomial::one();
            for i in 0..p {
                let den = g.entry(i, j).den();
                if den.degree() > Some(0) {
                    let common = common_factor(&lcd, den)?;
                    lcd = &lcd * &den.div_rem(&common)?.0;
                }
            }
            let lead = lcd.leading();
            let lcd = lcd.scale(1.0 / lead);
            let n = lcd.degree().unwrap_or(0);
            let mut cj = DMatrix::zeros(p, n);
            for i in 0..p {
                let gij = g.entry(i, j);
                let (cofactor, _) = lcd.div_rem(gij.den())?;
                let full = gij.num() * &cofactor;
                // strip the feedthrough: full = D*lcd + rem
                let rem = &full - &lcd.scale(d[(i, j)]);
                for k in 0..n {
                    cj[(i, k)] = rem.coeff(k);
                }
            }
            let mut aj = DMatrix::zeros(n, n);
            for k in 0..n.saturating_sub(1) {
                aj[(k, k + 1)] = 1.0;
            }
            if n > 0 {
                for k in 0..n {
                    aj[(n - 1, k)] = -lcd.coeff(k);
                }
            }
            let mut bj = DMatrix::zeros(n, 1);
            if n > 0 {
                bj[(n - 1, 0)] = 1.0;
            }
            blocks.push((aj, bj, cj));
        }

        let nx: usize = blocks.iter().map(|(a, _, _)| a.nrows()).sum();
        let mut a = DMatrix::zeros(nx, nx);
        let mut b = DMatrix::zeros(nx, m);
        let mut c = DMatrix::zeros(p, nx);
        let mut off = 0;
        for (j, (aj, bj, cj)) in blocks.iter().enumerate() {
            let n = aj.nrows();
            a.view_mut((off, off), (n, n)).copy_from(aj);
            b.view_mut((off, j), (n, 1)).copy_from(bj);
            c.view_mut((0, off), (p, n)).copy_from(cj);
            off += n;
        }
        if nx > 0 {
            // A' = T^-1 A T with T = diag(t)
            let t = balance_parlett_reinsch(&mut a);
            for r in 0..nx {
                b.row_mut(r).scale_mut(1.0 / t[r]);
                c.column_mut(r).scale_mut(t[r]);
            }
        }
        Self::new(a, b, c, d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lticore::RationalFunction;
    use approx::assert_abs_diff_eq;

    fn tf(n: &[f64], d: &[f64]) -> TransferMatrix {
        TransferMatrix::siso(RationalFunction::from_coeffs(n, d).unwrap())
    }

    #[test]
    fn static_gain_has_no_states() {
        let ss = StateSpace::from_transfer(&tf(&[2.5], &[1.0])).unwrap();
        assert_eq!(ss.n_states(), 0);
        assert_eq!(ss.d[(0, 0)], 2.5);
        assert_eq!(ss.b.shape(), (0, 1));
        assert_eq!(ss.c.shape(), (1, 0));
    }

    #[test]
    fn first_order_lag() {
        let ss = StateSpace::from_transfer(&tf(&[1.0], &[1.0, 1.0])).unwrap();
        assert_eq!(ss.n_states(), 1);
        let e = ss.eigenvalues().unwrap();
        assert_abs_diff_eq!(e[0].re, -1.0, epsilon = 1e-14);
    }

    #[test]
    fn velocity_output_matches_on_probes() {
        let g = tf(&[0.0, 1.0], &[1.0, 1.0, 1.0]);
        let ss = StateSpace::from_transfer(&g).unwrap();
        assert_eq!(ss.n_states(), 2);
        assert_eq!(ss.d[(0, 0)], 0.0);
        for k in 0..16 {
            let s = Complex64::new(0.0, 10f64.powf(-3.0 + 6.0 * k as f64 / 15.0));
            let a = ss.eval(s).unwrap()[(0, 0)];
            let b = g.eval(s).unwrap()[(0, 0)];
            assert!((a - b).norm() <= 1e-12 * b.norm().max(1e-300));
        }
    }

    #[test]
    fn improper_rejected() {
        assert!(matches!(
            StateSpace::from_transfer(&tf(&[0.0, 0.0, 1.0], &[1.0, 1.0])),
            Err(Error::Improper { .. })
        ));
    }

    #[test]
    fn mimo_column_shares_denominator() {
        let g = TransferMatrix::from_rows(vec![
            vec![RationalFunction::from_coeffs(&[1.0], &[1.0, 1.0]).unwrap()],
            vec![RationalFunction::from_coeffs(&[2.0, 1.0], &[1.0, 1.0]).unwrap()],
        ])
        .unwrap();
        let ss = StateSpace::from_transfer(&g).unwrap();
        assert_eq!(ss.n_states(), 1);
        let s = Complex64::new(0.3, 2.0);
        let diff = ss.eval(s).unwrap() - g.eval(s).unwrap();
        assert!(diff.norm() < 1e-12);
    }

    #[test]
    fn dimension_check() {
        assert!(StateSpace::new(
            DMatrix::zeros(2, 2),
            DMatrix::zeros(1, 1),
            DMatrix::zeros(1, 2),
            DMatrix::zeros(1, 1)
        )
        .is_err());
    }
}
