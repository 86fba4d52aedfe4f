//! Time-domain and eigenvalue referees for stability claims. Nothing here
//! consults the NI/PR theory.

mod sweep;

use std::fmt;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::Result;
use crate::interconnect::Stability;
use crate::lticore::StateSpace;

pub use sweep::{linspace, stability_sweep, write_csv, Bracket, SweepOptions, SweepRow, SweepTable, CSV_HEADER};

pub const DEFAULT_SEED: u64 = 42;
pub const TRIALS: usize = 10;
/// Base horizon in steps.
pub const HORIZON_STEPS: usize = 5000;
pub const DECAY_RATIO: f64 = 1e-3;
pub const GROWTH_RATIO: f64 = 1e3;
/// Horizon doublings tried before settling on marginal.
pub const MAX_DOUBLINGS: usize = 20;
/// Eigenvalue band inside which the two oracles may disagree.
pub const MARGINAL_BAND: f64 = 1e-6;

/// Norms past this count as escape.
const ESCAPE_NORM: f64 = 1e150;

/// `0.05 / (1 + |A|_inf)`.
pub fn step_size(a: &DMatrix<f64>) -> f64 {
    let inf_norm = a
        .row_iter()
        .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    0.05 / (1.0 + inf_norm)
}

/// One classical Runge-Kutta step of `x' = A x` is multiplication by the
/// degree-4 Taylor polynomial of `exp(hA)`.
pub fn rk4_step_matrix(a: &DMatrix<f64>, h: f64) -> DMatrix<f64> {
    let n = a.nrows();
    let ha = a * h;
    let mut term = DMatrix::identity(n, n);
    let mut phi = DMatrix::identity(n, n);
    for k in 1..=4 {
        term = &term * &ha / k as f64;
        phi += &term;
    }
    phi
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Trajectory {
    /// `|x(T)| / |x(0)|`; infinite after escape.
    pub ratio: f64,
    pub peak: f64,
    pub step: f64,
    pub horizon: f64,
    /// Time at which the norm left the representable range.
    pub escape_time: Option<f64>,
}

impl Trajectory {
    pub fn growing(&self) -> bool {
        self.escape_time.is_some() || self.ratio >= GROWTH_RATIO
    }
}

/// Integrates the autonomous part of `sys` from `x0` with the default step.
/// `horizon` defaults to 5000 steps.
pub fn simulate(sys: &StateSpace, x0: &DVector<f64>, horizon: Option<f64>) -> Trajectory {
    let h = step_size(&sys.a);
    let steps = match horizon {
        Some(t) => (t / h).ceil().max(1.0) as usize,
        None => HORIZON_STEPS,
    };
    simulate_with_step(sys, x0, h, steps)
}

pub fn simulate_with_step(sys: &StateSpace, x0: &DVector<f64>, h: f64, steps: usize) -> Trajectory {
    let phi = rk4_step_matrix(&sys.a, h);
    let n0 = x0.norm();
    let mut x = x0.clone();
    let mut peak = n0;
    for i in 0..steps {
        x = &phi * x;
        let n = x.norm();
        if !n.is_finite() || n > ESCAPE_NORM * n0.max(f64::MIN_POSITIVE) {
            return Trajectory {
                ratio: f64::INFINITY,
                peak: f64::INFINITY,
                step: h,
                horizon: steps as f64 * h,
                escape_time: Some((i + 1) as f64 * h),
            };
        }
        peak = peak.max(n);
    }
    Trajectory {
        ratio: if n0 > 0.0 { x.norm() / n0 } else { 0.0 },
        peak: if n0 > 0.0 { peak / n0 } else { 0.0 },
        step: h,
        horizon: steps as f64 * h,
        escape_time: None,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Decay {
    Decaying,
    Growing,
    Marginal,
}

impl fmt::Display for Decay {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Decay::Decaying => "decaying",
            Decay::Growing => "growing",
            Decay::Marginal => "marginal",
        })
    }
}

impl Decay {
    /// Same reading on the eigenvalue scale.
    pub fn as_stability(self) -> Stability {
        match self {
            Decay::Decaying => Stability::Stable,
            Decay::Growing => Stability::Unstable,
            Decay::Marginal => Stability::Marginal,
        }
    }

    /// Opposite conclusions; marginal on either side never contradicts.
    pub fn contradicts(self, s: Stability) -> bool {
        matches!(
            (self, s),
            (Decay::Decaying, Stability::Unstable) | (Decay::Growing, Stability::Stable)
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecayReport {
    pub verdict: Decay,
    pub ratios: Vec<f64>,
    pub horizon: f64,
    pub step: f64,
    pub seed: u64,
}

fn unit_states(n: usize, seed: u64) -> Vec<DVector<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..TRIALS)
        .map(|_| loop {
            let v = DVector::from_fn(n, |_, _| StandardNormal.sample(&mut rng));
            let norm: f64 = v.norm();
            if norm > 1e-12 {
                break v / norm;
            }
        })
        .collect()
}

fn classify(ratios: &[f64]) -> Option<Decay> {
    if ratios.iter().any(|r| !r.is_finite() || *r >= GROWTH_RATIO) {
        Some(Decay::Growing)
    } else if ratios.iter().all(|r| *r <= DECAY_RATIO) {
        Some(Decay::Decaying)
    } else {
        None
    }
}

/// Runs ten seeded unit initial states over the base horizon. While the
/// answer is neither decaying nor growing the horizon is doubled by squaring
/// the propagator, up to [`MAX_DOUBLINGS`] times.
pub fn decay_verdict(sys: &StateSpace, seed: u64) -> Result<DecayReport> {
    let n = sys.n_states();
    let h = step_size(&sys.a);
    if n == 0 {
        return Ok(DecayReport {
            verdict: Decay::Decaying,
            ratios: Vec::new(),
            horizon: 0.0,
            step: h,
            seed,
        });
    }
    let x0 = unit_states(n, seed);
    let mut xs: Vec<DVector<f64>> = Vec::with_capacity(TRIALS);
    let mut ratios = Vec::with_capacity(TRIALS);
    for x in &x0 {
        let t = simulate_with_step(sys, x, h, HORIZON_STEPS);
        ratios.push(t.ratio);
    }
    let mut horizon = HORIZON_STEPS as f64 * h;
    if let Some(v) = classify(&ratios) {
        return Ok(DecayReport {
            verdict: v,
            ratios,
            horizon,
            step: h,
            seed,
        });
    }

    // x(2T) = Psi x(T) with Psi = Phi^N, then Psi <- Psi^2
    let phi = rk4_step_matrix(&sys.a, h);
    let mut psi = phi.pow(HORIZON_STEPS as u32);
    for x in &x0 {
        xs.push(&psi * x);
    }
    for _ in 0..MAX_DOUBLINGS {
        for x in xs.iter_mut() {
            *x = &psi * &*x;
        }
        horizon *= 2.0;
        ratios = xs.iter().map(|x| x.norm()).collect();
        if let Some(v) = classify(&ratios) {
            return Ok(DecayReport {
                verdict: v,
                ratios,
                horizon,
                step: h,
                seed,
            });
        }
        psi = &psi * &psi;
        if psi.iter().any(|v| !v.is_finite()) {
            return Ok(DecayReport {
                verdict: Decay::Growing,
                ratios,
                horizon: horizon * 2.0,
                step: h,
                seed,
            });
        }
    }
    Ok(DecayReport {
        verdict: Decay::Marginal,
        ratios,
        horizon,
        step: h,
        seed,
    })
}
