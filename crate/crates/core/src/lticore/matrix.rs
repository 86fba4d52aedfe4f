//! Matrices of rational functions.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

use super::rational::RationalFunction;
use super::roots::{RootCluster, CLUSTER_TOL};

/// Hermitian tolerance, relative to `1 + |K|`.
pub const HERM_TOL: f64 = 1e-9;
/// Semidefiniteness tolerance on the smallest eigenvalue.
pub const PSD_TOL: f64 = 1e-9;

/// Physical units of a transfer matrix, output per input.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Units {
    pub input: String,
    pub output: String,
}

impl Units {
    pub fn new(input: &str, output: &str) -> Self {
        Self {
            input: input.into(),
            output: output.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TransferMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<RationalFunction>,
    units: Option<Units>,
}

/// Outcome of testing a complex matrix for being Hermitian positive
/// semidefinite.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PsdCheck {
    pub hermitian: bool,
    /// Smallest eigenvalue of the Hermitian part.
    pub min_eig: f64,
    pub psd: bool,
}

/// Residue matrix of a transfer matrix at one pole.
#[derive(Clone, Debug, PartialEq)]
pub struct ResidueReport {
    pub pole: Complex64,
    /// `None` when some entry has a non-simple pole there.
    pub residue: Option<DMatrix<Complex64>>,
    pub is_simple: bool,
    pub check: Option<PsdCheck>,
}

impl ResidueReport {
    fn new(pole: Complex64, residue: Option<DMatrix<Complex64>>) -> Self {
        let check = residue.as_ref().map(psd_check);
        Self {
            pole,
            is_simple: residue.is_some(),
            residue,
            check,
        }
    }

    /// Same report for `factor * residue` (the NI test scales by `j`).
    pub fn scaled(&self, factor: Complex64) -> Self {
        Self::new(self.pole, self.residue.as_ref().map(|r| r * factor))
    }

    pub fn psd_hermitian(&self) -> bool {
        self.check.is_some_and(|c| c.psd)
    }
}

pub fn psd_check(k: &DMatrix<Complex64>) -> PsdCheck {
    let adj = k.adjoint();
    let scale = 1.0 + k.norm();
    let hermitian = (k - &adj).norm() <= HERM_TOL * scale;
    let min_eig = hermitian_min_eig(&((k + adj) * Complex64::new(0.5, 0.0)));
    PsdCheck {
        hermitian,
        min_eig,
        psd: hermitian && min_eig >= -PSD_TOL,
    }
}

pub fn hermitian_min_eig(h: &DMatrix<Complex64>) -> f64 {
    if h.nrows() == 0 {
        return 0.0;
    }
    if h.nrows() == 1 {
        return h[(0, 0)].re;
    }
    h.clone()
        .symmetric_eigenvalues()
        .iter()
        .fold(f64::INFINITY, |m, &v| m.min(v))
}

pub fn symmetric_eigs(m: &DMatrix<f64>) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let sym = (m + m.transpose()) * 0.5;
    sym.symmetric_eigenvalues().iter().copied().collect()
}

impl TransferMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<RationalFunction>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        Ok(Self {
            rows,
            cols,
            entries,
            units: None,
        })
    }

    pub fn from_rows(rows: Vec<Vec<RationalFunction>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Self::new(r, c, rows.into_iter().flatten().collect())
    }

    pub fn siso(g: RationalFunction) -> Self {
        Self {
            rows: 1,
            cols: 1,
            entries: vec![g],
            units: None,
        }
    }

    pub fn constant(d: &DMatrix<f64>) -> Self {
        let entries = (0..d.nrows())
            .flat_map(|i| (0..d.ncols()).map(move |j| (i, j)))
            .map(|(i, j)| RationalFunction::constant(d[(i, j)]))
            .collect();
        Self {
            rows: d.nrows(),
            cols: d.ncols(),
            entries,
            units: None,
        }
    }

    pub fn with_units(mut self, units: Units) -> Self {
        self.units = Some(units);
        self
    }

    pub fn units(&self) -> Option<&Units> {
        self.units.as_ref()
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entry(&self, i: usize, j: usize) -> &RationalFunction {
        &self.entries[i * self.cols + j]
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &RationalFunction)> {
        self.entries
            .iter()
            .enumerate()
            .map(|(k, g)| (k / self.cols, k % self.cols, g))
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_siso(&self) -> Option<&RationalFunction> {
        (self.rows == 1 && self.cols == 1).then(|| &self.entries[0])
    }

    pub fn is_proper(&self) -> bool {
        self.entries.iter().all(RationalFunction::is_proper)
    }

    pub fn is_strictly_proper(&self) -> bool {
        self.entries.iter().all(RationalFunction::is_strictly_proper)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(RationalFunction::is_zero)
    }

    pub fn require_square(&self) -> Result<()> {
        if self.is_square() {
            Ok(())
        } else {
            Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            })
        }
    }

    pub fn require_proper(&self) -> Result<()> {
        match self.entries.iter().find(|g| !g.is_proper()) {
            None => Ok(()),
            Some(g) => Err(Error::Improper {
                num: g.num().degree().unwrap_or(0),
                den: g.den().degree().unwrap_or(0),
            }),
        }
    }

    pub fn eval(&self, s: Complex64) -> Result<DMatrix<Complex64>> {
        let vals = self
            .entries
            .iter()
            .map(|g| g.eval(s))
            .collect::<Result<Vec<_>>>()?;
        Ok(DMatrix::from_row_slice(self.rows, self.cols, &vals))
    }

    /// `G(infinity)`; errors for improper entries.
    pub fn feedthrough(&self) -> Result<DMatrix<f64>> {
        let vals = self
            .entries
            .iter()
            .map(RationalFunction::at_infinity)
            .collect::<Result<Vec<_>>>()?;
        Ok(DMatrix::from_row_slice(self.rows, self.cols, &vals))
    }

    /// Entrywise `lim_{s->0} s^k G(s)`.
    pub fn limit_s_pow(&self, k: usize) -> Result<DMatrix<f64>> {
        let mut out = DMatrix::zeros(self.rows, self.cols);
        for (i, j, g) in self.entries() {
            out[(i, j)] = g.limit_s_pow(k).map_err(|e| match e {
                Error::LimitDoesNotExist { order, k, .. } => Error::LimitDoesNotExist {
                    row: i,
                    col: j,
                    order,
                    k,
                },
                other => other,
            })?;
        }
        Ok(out)
    }

    pub fn dc_gain(&self) -> Result<DMatrix<f64>> {
        self.limit_s_pow(0)
    }

    pub fn max_origin_pole_order(&self) -> usize {
        self.entries
            .iter()
            .map(RationalFunction::origin_pole_order)
            .max()
            .unwrap_or(0)
    }

    /// Union of entry poles. Multiplicity is the largest multiplicity of the
    /// pole in any single entry.
    pub fn poles(&self) -> Result<Vec<RootCluster>> {
        let mut out: Vec<RootCluster> = Vec::new();
        for g in &self.entries {
            for p in g.poles()? {
                match out.iter_mut().find(|q| {
                    (q.center - p.center).norm() <= CLUSTER_TOL * (1.0 + q.center.norm())
                }) {
                    Some(q) => q.multiplicity = q.multiplicity.max(p.multiplicity),
                    None => out.push(p),
                }
            }
        }
        Ok(out)
    }

    /// Residue matrix at `p`, assembled entrywise; entries without a pole at
    /// `p` contribute zero.
    pub fn residue_at(&self, p: Complex64) -> Result<ResidueReport> {
        let mut any = false;
        let mut simple = true;
        let mut k = DMatrix::from_element(self.rows, self.cols, Complex64::new(0.0, 0.0));
        for (i, j, g) in self.entries() {
            match g.residue_at(p) {
                Ok(r) => {
                    any = true;
                    match r.residue {
                        Some(v) => k[(i, j)] = v,
                        None => simple = false,
                    }
                }
                Err(Error::NotAPole { .. }) => {}
                Err(e) => return Err(e),
            }
        }
        if !any {
            return Err(Error::NotAPole { p });
        }
        Ok(ResidueReport::new(p, simple.then_some(k)))
    }

    pub fn neg(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|g| -g).collect(),
            units: self.units.clone(),
        }
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.entries
            .iter()
            .fold(0.0, |m, g| m.max(g.max_abs_coeff()))
    }
}

impl From<RationalFunction> for TransferMatrix {
    fn from(g: RationalFunction) -> Self {
        Self::siso(g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rf(n: &[f64], d: &[f64]) -> RationalFunction {
        RationalFunction::from_coeffs(n, d).unwrap()
    }

    #[test]
    fn limits_name_the_entry() {
        let g = TransferMatrix::from_rows(vec![
            vec![rf(&[1.0], &[1.0, 1.0]), RationalFunction::zero()],
            vec![RationalFunction::zero(), rf(&[1.0], &[0.0, 0.0, 1.0])],
        ])
        .unwrap();
        assert_eq!(
            g.limit_s_pow(1),
            Err(Error::LimitDoesNotExist {
                row: 1,
                col: 1,
                order: 2,
                k: 1
            })
        );
        let g2 = g.limit_s_pow(2).unwrap();
        assert_eq!(g2[(1, 1)], 1.0);
        assert_eq!(g2[(0, 0)], 0.0);
    }

    #[test]
    fn residue_matrix_of_oscillator() {
        let g = TransferMatrix::siso(rf(&[1.0], &[1.0, 0.0, 1.0]));
        let r = g.residue_at(Complex64::new(0.0, 1.0)).unwrap();
        assert!(r.is_simple);
        let k = r.scaled(Complex64::new(0.0, 1.0));
        assert!(k.psd_hermitian());
        assert!((k.check.unwrap().min_eig - 0.5).abs() < 1e-14);
        // the unscaled residue -j/2 is not Hermitian
        assert!(!r.psd_hermitian());
    }

    #[test]
    fn ragged_rows_rejected() {
        let r = TransferMatrix::from_rows(vec![vec![RationalFunction::zero()], vec![]]);
        assert!(r.is_err());
    }

    #[test]
    fn feedthrough_requires_proper() {
        let g = TransferMatrix::siso(rf(&[0.0, 0.0, 1.0], &[1.0, 1.0]));
        assert!(matches!(g.feedthrough(), Err(Error::Improper { .. })));
        let g = TransferMatrix::siso(rf(&[0.0, 0.0, -1.0], &[1.0, 1.0, 1.0]));
        assert_eq!(g.feedthrough().unwrap()[(0, 0)], -1.0);
    }
}
