use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Property {
    #[serde(rename = "NI")]
    Ni,
    #[serde(rename = "NI-generalized")]
    NiGeneralized,
    #[serde(rename = "SNI")]
    Sni,
    #[serde(rename = "PR")]
    Pr,
    #[serde(rename = "WSPR")]
    Wspr,
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Property::Ni => "NI",
            Property::NiGeneralized => "NI-generalized",
            Property::Sni => "SNI",
            Property::Pr => "PR",
            Property::Wspr => "WSPR",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    /// Frequency-grid evidence only (MIMO path).
    NumericallyVerified,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::NumericallyVerified => "numerically-verified",
        })
    }
}

/// Where a condition breaks.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// Frequency in rad/s at which a frequency inequality fails.
    Frequency { omega: f64 },
    Pole { re: f64, im: f64, multiplicity: usize },
    /// Residue (or limit) matrix that is not Hermitian positive semidefinite.
    Residue {
        pole_re: f64,
        pole_im: f64,
        min_eig: f64,
        hermitian: bool,
    },
    /// Improper behaviour: a pole at infinity of the given order, or a
    /// simple one whose residue is not positive semidefinite.
    PoleAtInfinity { order: usize },
}

impl Witness {
    pub fn pole(p: Complex64, multiplicity: usize) -> Self {
        Witness::Pole {
            re: p.re,
            im: p.im,
            multiplicity,
        }
    }

    pub fn frequency(&self) -> Option<f64> {
        match self {
            Witness::Frequency { omega } => Some(*omega),
            _ => None,
        }
    }
}

/// Worst-case slack of one condition; nonnegative means satisfied.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Margin {
    pub condition: u8,
    pub slack: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PropertyReport {
    pub property: Property,
    pub verdict: Verdict,
    pub failed_condition: Option<u8>,
    pub witness: Option<Witness>,
    pub margins: Vec<Margin>,
    /// Frequencies where a semidefinite inequality holds with equality
    /// (even-multiplicity zero of the test polynomial).
    pub touch_frequencies: Vec<f64>,
}

impl PropertyReport {
    pub fn passed(&self) -> bool {
        self.verdict != Verdict::Fail
    }

    pub fn margin(&self, condition: u8) -> Option<f64> {
        self.margins
            .iter()
            .find(|m| m.condition == condition)
            .map(|m| m.slack)
    }
}

/// `G2 = lim s^2 G(s)` and `G1 = lim s (G(s) - G2 / s^2)`.
#[derive(Clone, Debug, PartialEq)]
pub struct NiLimitPair {
    pub g2: DMatrix<f64>,
    pub g1: DMatrix<f64>,
}

/// Accumulates condition outcomes in definition order.
#[derive(Debug)]
pub(crate) struct ReportBuilder {
    property: Property,
    gridded: bool,
    failure: Option<(u8, Witness)>,
    margins: Vec<Margin>,
    touches: Vec<f64>,
}

impl ReportBuilder {
    pub fn new(property: Property, gridded: bool) -> Self {
        Self {
            property,
            gridded,
            failure: None,
            margins: Vec::new(),
            touches: Vec::new(),
        }
    }

    pub fn fail(&mut self, condition: u8, witness: Witness) {
        match &self.failure {
            Some((c, _)) if *c <= condition => {}
            _ => self.failure = Some((condition, witness)),
        }
    }

    pub fn margin(&mut self, condition: u8, slack: f64) {
        if !slack.is_finite() {
            return;
        }
        match self.margins.iter_mut().find(|m| m.condition == condition) {
            Some(m) => m.slack = m.slack.min(slack),
            None => self.margins.push(Margin { condition, slack }),
        }
    }

    pub fn touch(&mut self, omega: f64) {
        self.touches.push(omega);
    }

    pub fn finish(mut self) -> PropertyReport {
        self.margins.sort_by_key(|m| m.condition);
        let (verdict, failed_condition, witness) = match self.failure {
            Some((c, w)) => (Verdict::Fail, Some(c), Some(w)),
            None if self.gridded => (Verdict::NumericallyVerified, None, None),
            None => (Verdict::Pass, None, None),
        };
        PropertyReport {
            property: self.property,
            verdict,
            failed_condition,
            witness,
            margins: self.margins,
            touch_frequencies: self.touches,
        }
    }
}
