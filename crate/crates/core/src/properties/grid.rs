//! Log-spaced frequency scan used for transfer matrices.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::lticore::{hermitian_min_eig, TransferMatrix};

/// Environment variable overriding the number of grid points.
pub const GRID_POINTS_ENV: &str = "NICERT_GRID_POINTS";

#[derive(Clone, Debug, PartialEq)]
pub struct GridConfig {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
    pub refine_rounds: usize,
    pub dips: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            lo: 1e-4,
            hi: 1e4,
            points: 2000,
            refine_rounds: 3,
            dips: 5,
        }
    }
}

impl GridConfig {
    /// Default grid, with the point count taken from `NICERT_GRID_POINTS`
    /// when it holds a positive integer.
    pub fn from_env() -> Self {
        let mut cfg = Self::default();
        if let Some(n) = std::env::var(GRID_POINTS_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
            .filter(|&n| n >= 2)
        {
            cfg.points = n;
        }
        cfg
    }

    pub fn frequencies(&self) -> Vec<f64> {
        log_space(self.lo, self.hi, self.points)
    }
}

fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n < 2 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// Which Hermitian form is scanned.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Form {
    /// `j (G - G^H)`
    Imaginary,
    /// `G + G^H`
    Real,
}

fn hermitian_form(g: &DMatrix<Complex64>, form: Form) -> DMatrix<Complex64> {
    let adj = g.adjoint();
    match form {
        Form::Imaginary => (g - adj) * Complex64::new(0.0, 1.0),
        Form::Real => g + adj,
    }
}

/// Smallest eigenvalue of the form at `w`, divided by `1 + |G(jw)|`.
/// `None` when `jw` sits on a pole.
pub(crate) fn normalized_min_eig(g: &TransferMatrix, form: Form, w: f64) -> Option<f64> {
    let v = g.eval(Complex64::new(0.0, w)).ok()?;
    let h = hermitian_form(&v, form);
    Some(hermitian_min_eig(&h) / (1.0 + v.norm()))
}

#[derive(Clone, Debug)]
pub(crate) struct GridScan {
    /// Worst normalized eigenvalue and where it occurs.
    pub min: f64,
    pub argmin: f64,
}

pub(crate) fn scan(g: &TransferMatrix, form: Form, cfg: &GridConfig, include_zero: bool) -> GridScan {
    let ws = cfg.frequencies();
    let vals: Vec<Option<f64>> = ws
        .par_iter()
        .map(|&w| normalized_min_eig(g, form, w))
        .collect();

    let mut best = GridScan {
        min: f64::INFINITY,
        argmin: ws[0],
    };
    let consider = |w: f64, v: f64, best: &mut GridScan| {
        if v < best.min {
            best.min = v;
            best.argmin = w;
        }
    };
    if include_zero {
        if let Some(v) = normalized_min_eig(g, form, 0.0) {
            consider(0.0, v, &mut best);
        }
    }
    for (w, v) in ws.iter().zip(&vals) {
        if let Some(v) = v {
            consider(*w, *v, &mut best);
        }
    }

    // local minima ranked by depth
    let mut dips: Vec<usize> = (0..ws.len())
        .filter(|&i| {
            let Some(v) = vals[i] else { return false };
            let left = i == 0 || vals[i - 1].is_none_or(|u| u >= v);
            let right = i + 1 == ws.len() || vals[i + 1].is_none_or(|u| u >= v);
            left && right
        })
        .collect();
    dips.sort_by(|&a, &b| vals[a].unwrap().total_cmp(&vals[b].unwrap()));
    dips.truncate(cfg.dips);

    let refined: Vec<(f64, f64)> = dips
        .par_iter()
        .filter_map(|&i| {
            let mut lo = ws[i.saturating_sub(1)];
            let mut hi = ws[(i + 1).min(ws.len() - 1)];
            let mut local: Option<(f64, f64)> = None;
            for _ in 0..cfg.refine_rounds {
                let sub = log_space(lo, hi, 17);
                for (k, &w) in sub.iter().enumerate() {
                    if let Some(v) = normalized_min_eig(g, form, w) {
                        if local.is_none_or(|(_, m)| v < m) {
                            local = Some((w, v));
                            lo = sub[k.saturating_sub(1)];
                            hi = sub[(k + 1).min(sub.len() - 1)];
                        }
                    }
                }
            }
            local
        })
        .collect();
    for (w, v) in refined {
        consider(w, v, &mut best);
    }
    best
}
