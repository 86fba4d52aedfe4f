//! The two template circuits, as closed-form transfer functions.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lticore::RationalFunction;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RlcTopology {
    /// R, L and C in parallel across one node pair.
    ParallelRlc,
    /// R, L and C in one series loop.
    SeriesRlc,
}

impl RlcTopology {
    pub fn keyword(self) -> &'static str {
        match self {
            RlcTopology::ParallelRlc => "parallel_rlc",
            RlcTopology::SeriesRlc => "series_rlc",
        }
    }
}

/// Ohm, henry, farad.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RlcNetwork {
    pub name: String,
    pub topology: RlcTopology,
    pub r: f64,
    pub l: f64,
    pub c: f64,
}

impl RlcNetwork {
    pub fn new(name: &str, topology: RlcTopology, r: f64, l: f64, c: f64) -> Self {
        Self {
            name: name.to_string(),
            topology,
            r,
            l,
            c,
        }
    }

    fn positive(&self, what: &str, v: f64) -> Result<()> {
        if v > 0.0 && v.is_finite() {
            Ok(())
        } else {
            Err(Error::Model(format!("{what} of circuit {} must be positive, got {v}", self.name)))
        }
    }

    /// Plant map. Parallel: coupling charge to node voltage,
    /// `-s^2 / (C s^2 + s/R + 1/L)`. Series: coupling flux to loop current,
    /// `-s^2 / (L s^2 + R s + 1/C)`.
    pub fn plant_transfer(&self) -> Result<RationalFunction> {
        self.positive("R", self.r)?;
        self.positive("L", self.l)?;
        self.positive("C", self.c)?;
        let den = match self.topology {
            RlcTopology::ParallelRlc => [1.0 / self.l, 1.0 / self.r, self.c],
            RlcTopology::SeriesRlc => [1.0 / self.c, self.r, self.l],
        };
        RationalFunction::from_coeffs(&[0.0, 0.0, -1.0], &den)
    }

    /// Controller seen through a coupling capacitor (parallel) or coupling
    /// inductor (series) of size `x`.
    ///
    /// Parallel: `x (C s^2 + s/R + 1/L) / ((x + C) s^2 + s/R + 1/L)`.
    /// Series, from `i = phi/x + s phi / Z`:
    /// `x (L s^2 + R s + 1/C) / ((x + L) s^2 + R s + 1/C)`.
    pub fn controller_transfer(&self, x: f64) -> Result<RationalFunction> {
        if !(x >= 0.0) || !x.is_finite() {
            return Err(Error::Model(format!("coupling element must be nonnegative, got {x}")));
        }
        self.positive("R", self.r)?;
        let (inner, cap_or_ind) = match self.topology {
            RlcTopology::ParallelRlc => {
                self.positive("L", self.l)?;
                ([1.0 / self.l, 1.0 / self.r, self.c], self.c)
            }
            RlcTopology::SeriesRlc => {
                self.positive("C", self.c)?;
                ([1.0 / self.c, self.r, self.l], self.l)
            }
        };
        if !(x + cap_or_ind > 0.0) {
            let what = match self.topology {
                RlcTopology::ParallelRlc => "C + C2",
                RlcTopology::SeriesRlc => "L + L2",
            };
            return Err(Error::Model(format!(
                "{what} must be positive for circuit {}, got {}",
                self.name,
                x + cap_or_ind
            )));
        }
        if x == 0.0 {
            return Ok(RationalFunction::zero());
        }
        let num: Vec<f64> = inner.iter().map(|c| x * c).collect();
        let den = [inner[0], inner[1], inner[2] + x];
        RationalFunction::from_coeffs(&num, &den)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_parallel_pair() {
        let p = RlcNetwork::new("p", RlcTopology::ParallelRlc, 1.0, 1.0, 1.0);
        let g = p.plant_transfer().unwrap();
        assert_eq!(g.num().coeffs(), &[0.0, 0.0, -1.0]);
        assert_eq!(g.den().coeffs(), &[1.0, 1.0, 1.0]);
        let k = p.controller_transfer(0.5).unwrap();
        assert_eq!(k, RationalFunction::from_coeffs(&[0.5, 0.5, 0.5], &[1.0, 1.0, 1.5]).unwrap());
        assert!(p.controller_transfer(0.0).unwrap().is_zero());
    }

    #[test]
    fn series_controller_from_circuit_equations() {
        // i = phi/L + s phi / (R + sL2 + 1/(sC2)), evaluated directly
        let c = RlcNetwork::new("c", RlcTopology::SeriesRlc, 0.7, 1.3, 2.1);
        let l = 0.4;
        let k = c.controller_transfer(l).unwrap();
        for w in [0.2, 1.0, 3.3] {
            let s = num_complex::Complex64::new(0.05, w);
            let z = 0.7 + s * 1.3 + 1.0 / (s * 2.1);
            let i_over_phi = 1.0 / l + s / z;
            assert!((k.eval(s).unwrap() - 1.0 / i_over_phi).norm() < 1e-12);
        }
    }

    #[test]
    fn constraint_violations() {
        let p = RlcNetwork::new("p", RlcTopology::ParallelRlc, 1.0, 1.0, -0.6);
        assert!(p.plant_transfer().is_err());
        assert!(p.controller_transfer(0.5).is_err());
        assert!(p.controller_transfer(0.7).is_ok());
        assert!(p.controller_transfer(-0.1).is_err());
    }
}
