//! Feedback interconnections, well-posedness, internal stability and the
//! stability certificates.
//!
//! Loop convention: the plant maps `u1 -> y1`, the controller `u2 -> y2`,
//! and `u1 = w1 + sign * y2`, `u2 = w2 + y1`.

mod certify;

use std::fmt;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lticore::{max_real_part, spectral_radius, StateSpace, TransferMatrix};

pub use certify::{
    certify, certify_auto, certify_t1, certify_t2, certify_t3, certify_t4, CertVerdict,
    CertificationResult, CertifyOptions, Condition, Hypothesis, OracleOutcome, Side, Theorem,
    DC_MARGIN, FEED_TOL,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LoopSign {
    Positive,
    Negative,
}

impl LoopSign {
    pub fn factor(self) -> f64 {
        match self {
            LoopSign::Positive => 1.0,
            LoopSign::Negative => -1.0,
        }
    }
}

impl fmt::Display for LoopSign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LoopSign::Positive => "positive",
            LoopSign::Negative => "negative",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Interconnection {
    pub plant: TransferMatrix,
    pub controller: TransferMatrix,
    pub sign: LoopSign,
}

impl Interconnection {
    pub fn new(plant: TransferMatrix, controller: TransferMatrix, sign: LoopSign) -> Result<Self> {
        if plant.rows() != controller.cols() || plant.cols() != controller.rows() {
            return Err(Error::DimensionMismatch(format!(
                "plant is {}x{} but controller is {}x{}",
                plant.rows(),
                plant.cols(),
                controller.rows(),
                controller.cols()
            )));
        }
        Ok(Self {
            plant,
            controller,
            sign,
        })
    }

    pub fn positive(plant: TransferMatrix, controller: TransferMatrix) -> Result<Self> {
        Self::new(plant, controller, LoopSign::Positive)
    }

    pub fn negative(plant: TransferMatrix, controller: TransferMatrix) -> Result<Self> {
        Self::new(plant, controller, LoopSign::Negative)
    }
}

/// Smallest singular value of the instantaneous loop map, and whether it is
/// invertible.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WellPosedness {
    pub well_posed: bool,
    pub margin: f64,
}

/// Singular values below this (relative to `1 + |D1||D2|`) make the loop
/// ill-posed.
const WELL_POSED_TOL: f64 = 1e-12;

fn loop_map(d1: &DMatrix<f64>, d2: &DMatrix<f64>, sign: LoopSign) -> (DMatrix<f64>, f64) {
    let n = d1.nrows();
    let m = DMatrix::identity(n, n) - d1 * d2 * sign.factor();
    let scale = 1.0 + d1.norm() * d2.norm();
    (m, scale)
}

fn smallest_singular_value(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 {
        return 1.0;
    }
    m.singular_values().min()
}

/// `I - sign * D_plant D_controller` must be invertible.
pub fn well_posed(ic: &Interconnection) -> Result<WellPosedness> {
    let d1 = ic.plant.feedthrough()?;
    let d2 = ic.controller.feedthrough()?;
    let (m, scale) = loop_map(&d1, &d2, ic.sign);
    let margin = smallest_singular_value(&m);
    Ok(WellPosedness {
        well_posed: margin > WELL_POSED_TOL * scale,
        margin,
    })
}

/// Closed-loop realization with inputs `(w1, w2)` and outputs `(y1, y2)`.
/// Both subsystem realizations are kept whole, so the state dimension is the
/// sum of theirs.
pub fn close_loop(ic: &Interconnection) -> Result<StateSpace> {
    let p = StateSpace::from_transfer(&ic.plant)?;
    let k = StateSpace::from_transfer(&ic.controller)?;
    close_realizations(&p, &k, ic.sign)
}

pub fn close_realizations(p: &StateSpace, k: &StateSpace, sign: LoopSign) -> Result<StateSpace> {
    let sigma = sign.factor();
    let (n1, n2) = (p.n_states(), k.n_states());
    let (m1, p1) = (p.n_inputs(), p.n_outputs());
    if k.n_inputs() != p1 || k.n_outputs() != m1 {
        return Err(Error::DimensionMismatch(format!(
            "plant realization {}->{} vs controller {}->{}",
            m1,
            p1,
            k.n_inputs(),
            k.n_outputs()
        )));
    }
    let (d1, d2) = (&p.d, &k.d);
    let (loop1, scale) = loop_map(d1, d2, sign);
    let margin = smallest_singular_value(&loop1);
    if margin <= WELL_POSED_TOL * scale {
        return Err(Error::IllPosed {
            sign: if sigma > 0.0 { '-' } else { '+' },
            margin,
        });
    }
    // u1 = M (sigma D2 C1 x1 + sigma C2 x2 + w1 + sigma D2 w2)
    let inner = DMatrix::identity(m1, m1) - d2 * d1 * sigma;
    let m = inner
        .try_inverse()
        .ok_or(Error::IllPosed { sign: if sigma > 0.0 { '-' } else { '+' }, margin })?;
    let n = n1 + n2;
    let nw = m1 + p1;

    let mut u1_x = DMatrix::zeros(m1, n);
    u1_x.view_mut((0, 0), (m1, n1)).copy_from(&(d2 * &p.c * sigma));
    u1_x.view_mut((0, n1), (m1, n2)).copy_from(&(&k.c * sigma));
    let u1_x = &m * u1_x;
    let mut u1_w = DMatrix::zeros(m1, nw);
    u1_w.view_mut((0, 0), (m1, m1)).fill_with_identity();
    u1_w.view_mut((0, m1), (m1, p1)).copy_from(&(d2 * sigma));
    let u1_w = &m * u1_w;

    let mut y1_x = DMatrix::zeros(p1, n);
    y1_x.view_mut((0, 0), (p1, n1)).copy_from(&p.c);
    let y1_x = y1_x + d1 * &u1_x;
    let y1_w = d1 * &u1_w;

    let u2_x = y1_x.clone();
    let mut u2_w = y1_w.clone();
    for i in 0..p1 {
        u2_w[(i, m1 + i)] += 1.0;
    }

    let mut y2_x = DMatrix::zeros(m1, n);
    y2_x.view_mut((0, n1), (m1, n2)).copy_from(&k.c);
    let y2_x = y2_x + d2 * &u2_x;
    let y2_w = d2 * &u2_w;

    let mut a = DMatrix::zeros(n, n);
    a.view_mut((0, 0), (n1, n1)).copy_from(&p.a);
    a.view_mut((n1, n1), (n2, n2)).copy_from(&k.a);
    let mut top = a.view_mut((0, 0), (n1, n));
    top += &p.b * &u1_x;
    let mut bottom = a.view_mut((n1, 0), (n2, n));
    bottom += &k.b * &u2_x;

    let mut b = DMatrix::zeros(n, nw);
    b.view_mut((0, 0), (n1, nw)).copy_from(&(&p.b * &u1_w));
    b.view_mut((n1, 0), (n2, nw)).copy_from(&(&k.b * &u2_w));

    let mut c = DMatrix::zeros(p1 + m1, n);
    c.view_mut((0, 0), (p1, n)).copy_from(&y1_x);
    c.view_mut((p1, 0), (m1, n)).copy_from(&y2_x);
    let mut d = DMatrix::zeros(p1 + m1, nw);
    d.view_mut((0, 0), (p1, nw)).copy_from(&y1_w);
    d.view_mut((p1, 0), (m1, nw)).copy_from(&y2_w);

    StateSpace::new(a, b, c, d)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Stability {
    Stable,
    Unstable,
    Marginal,
}

impl fmt::Display for Stability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stability::Stable => "stable",
            Stability::Unstable => "unstable",
            Stability::Marginal => "marginal",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StabilityReport {
    pub verdict: Stability,
    /// Largest real part of the closed-loop eigenvalues; `None` for a
    /// memoryless loop.
    pub max_re_eig: Option<f64>,
    pub tolerance: f64,
}

/// Hurwitz test with band `1e-8 (1 + rho(A))` around the imaginary axis.
pub fn internal_stability(sys: &StateSpace) -> Result<StabilityReport> {
    let eigs = sys.eigenvalues()?;
    let tolerance = 1e-8 * (1.0 + spectral_radius(&eigs));
    if eigs.is_empty() {
        return Ok(StabilityReport {
            verdict: Stability::Stable,
            max_re_eig: None,
            tolerance,
        });
    }
    let m = max_real_part(&eigs);
    let verdict = if m < -tolerance {
        Stability::Stable
    } else if m > tolerance {
        Stability::Unstable
    } else {
        Stability::Marginal
    };
    Ok(StabilityReport {
        verdict,
        max_re_eig: Some(m),
        tolerance,
    })
}

#[cfg(test)]
mod tests;
