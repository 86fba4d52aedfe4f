use std::fmt;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::Result;
use crate::lticore::{eigenvalues, max_real_part, symmetric_eigs, TransferMatrix};
use crate::properties::{
    check_ni_with, check_pr_with, check_sni_with, check_wspr_with, compute_g1g2, GridConfig,
    NiMode, PropertyReport, Verdict,
};

use super::{close_loop, internal_stability, well_posed, Interconnection, LoopSign, Stability};

/// Band for `G(inf) Gbar(inf) = 0`, relative to `1 + |D|`.
pub const FEED_TOL: f64 = 1e-10;
/// Strict scalar conditions must clear this margin; closer values are
/// reported as marginal.
pub const DC_MARGIN: f64 = 1e-12;
/// Relative size below which the origin limit matrices count as zero or
/// singular.
const LIMIT_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Theorem {
    T1,
    T2,
    T3,
    T4,
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// Which subsystem plays the role of `G` in the theorem statement; the
/// other one is `Gbar`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Plant,
    Controller,
}

impl Side {
    fn other(self) -> Self {
        match self {
            Side::Plant => Side::Controller,
            Side::Controller => Side::Plant,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertVerdict {
    CertifiedStable,
    CertifiedUnstable,
    Inapplicable,
    /// Hypotheses hold but the condition sits on its boundary.
    Marginal,
}

impl fmt::Display for CertVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CertVerdict::CertifiedStable => "certified-stable",
            CertVerdict::CertifiedUnstable => "certified-unstable",
            CertVerdict::Inapplicable => "inapplicable",
            CertVerdict::Marginal => "marginal",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Hypothesis {
    pub name: String,
    pub pass: bool,
    pub value: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Condition {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
}

/// Eigenvalue cross-check of the closed loop.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleOutcome {
    pub verdict: Option<Stability>,
    pub max_re_eig: Option<f64>,
    pub states: usize,
    pub error: Option<String>,
}

impl OracleOutcome {
    pub fn of(ic: &Interconnection) -> Self {
        match close_loop(ic).and_then(|sys| Ok((sys.n_states(), internal_stability(&sys)?))) {
            Ok((states, r)) => Self {
                verdict: Some(r.verdict),
                max_re_eig: r.max_re_eig,
                states,
                error: None,
            },
            Err(e) => Self {
                verdict: None,
                max_re_eig: None,
                states: 0,
                error: Some(e.to_string()),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CertificationResult {
    pub theorem: Theorem,
    /// Subsystem used as `G`.
    pub side: Side,
    pub hypotheses: Vec<Hypothesis>,
    pub condition: Option<Condition>,
    pub verdict: CertVerdict,
    pub oracle: Option<OracleOutcome>,
    pub notes: Vec<String>,
}

impl CertificationResult {
    pub fn applicable(&self) -> bool {
        self.verdict != CertVerdict::Inapplicable
    }

    /// `Some(true)` when a definite certificate is contradicted by a definite
    /// oracle verdict.
    pub fn contradicts_oracle(&self) -> Option<bool> {
        let oracle = self.oracle.as_ref()?.verdict?;
        match (self.verdict, oracle) {
            (CertVerdict::CertifiedStable, Stability::Unstable) => Some(true),
            (CertVerdict::CertifiedUnstable, Stability::Stable) => Some(true),
            (CertVerdict::CertifiedStable, Stability::Stable)
            | (CertVerdict::CertifiedUnstable, Stability::Unstable) => Some(false),
            _ => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct CertifyOptions {
    /// Role assignment; `None` picks the theorem's default.
    pub side: Option<Side>,
    pub oracle: bool,
    pub grid: GridConfig,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        Self {
            side: None,
            oracle: true,
            grid: GridConfig::default(),
        }
    }
}

struct Builder {
    theorem: Theorem,
    side: Side,
    hypotheses: Vec<Hypothesis>,
    notes: Vec<String>,
}

impl Builder {
    fn new(theorem: Theorem, side: Side) -> Self {
        Self {
            theorem,
            side,
            hypotheses: Vec::new(),
            notes: Vec::new(),
        }
    }

    fn hyp(&mut self, name: &str, pass: bool, value: Option<f64>) -> bool {
        self.hypotheses.push(Hypothesis {
            name: name.to_string(),
            pass,
            value,
        });
        pass
    }

    /// Records a property test as a hypothesis; the value is the worst
    /// margin.
    fn property(&mut self, name: &str, report: Result<PropertyReport>) -> bool {
        match report {
            Ok(r) => {
                let worst = r.margins.iter().map(|m| m.slack).reduce(f64::min);
                if r.verdict == Verdict::NumericallyVerified {
                    self.notes.push(format!("{name}: frequency-grid evidence only"));
                }
                if let Some(c) = r.failed_condition {
                    self.notes.push(format!("{name}: condition {c} fails"));
                }
                self.hyp(name, r.passed(), worst)
            }
            Err(e) => {
                self.notes.push(format!("{name}: {e}"));
                self.hyp(name, false, None)
            }
        }
    }

    fn all_pass(&self) -> bool {
        self.hypotheses.iter().all(|h| h.pass)
    }

    fn finish(
        self,
        ic: &Interconnection,
        condition: Option<Condition>,
        verdict: CertVerdict,
        opts: &CertifyOptions,
    ) -> CertificationResult {
        CertificationResult {
            theorem: self.theorem,
            side: self.side,
            hypotheses: self.hypotheses,
            condition,
            verdict,
            oracle: opts.oracle.then(|| OracleOutcome::of(ic)),
            notes: self.notes,
        }
    }
}

fn roles(ic: &Interconnection, side: Side) -> (&TransferMatrix, &TransferMatrix) {
    match side {
        Side::Plant => (&ic.plant, &ic.controller),
        Side::Controller => (&ic.controller, &ic.plant),
    }
}

/// Verdict for a strict condition `value < threshold` of an iff-theorem.
fn strict_below(value: f64, threshold: f64) -> CertVerdict {
    if value < threshold - DC_MARGIN {
        CertVerdict::CertifiedStable
    } else if value > threshold + DC_MARGIN {
        CertVerdict::CertifiedUnstable
    } else {
        CertVerdict::Marginal
    }
}

fn sign_hypothesis(b: &mut Builder, ic: &Interconnection, want: LoopSign) -> bool {
    let ok = ic.sign == want;
    if !ok {
        b.notes
            .push(format!("{} requires {want} feedback, got {}", b.theorem, ic.sign));
    }
    b.hyp(&format!("{want} feedback"), ok, None)
}

/// NI/SNI positive-feedback certificate with the DC-gain condition
/// `lambda_max(G(0) Gbar(0)) < 1`. `G` defaults to the controller.
pub fn certify_t1(ic: &Interconnection, opts: &CertifyOptions) -> Result<CertificationResult> {
    let side = opts.side.unwrap_or(Side::Controller);
    let mut b = Builder::new(Theorem::T1, side);
    let (g, gbar) = roles(ic, side);
    sign_hypothesis(&mut b, ic, LoopSign::Positive);
    b.property("G is NI", check_ni_with(g, NiMode::Strict, &opts.grid));
    b.property("Ḡ is SNI", check_sni_with(gbar, &opts.grid));

    match (g.feedthrough(), gbar.feedthrough()) {
        (Ok(dg), Ok(dgb)) => {
            let prod = &dg * &dgb;
            let tol = FEED_TOL * (1.0 + dg.norm().max(dgb.norm()));
            b.hyp("G(∞)Ḡ(∞)=0", prod.norm() <= tol, Some(prod.norm()));
            let min_eig = symmetric_eigs(&dgb).into_iter().fold(f64::INFINITY, f64::min);
            let min_eig = if min_eig.is_finite() { min_eig } else { 0.0 };
            let symmetric = (&dgb - dgb.transpose()).norm() <= FEED_TOL * (1.0 + dgb.norm());
            b.hyp("Ḡ(∞)≥0", symmetric && min_eig >= -FEED_TOL, Some(min_eig));
        }
        _ => {
            b.hyp("G(∞)Ḡ(∞)=0", false, None);
            b.hyp("Ḡ(∞)≥0", false, None);
        }
    }

    if !b.all_pass() {
        return Ok(b.finish(ic, None, CertVerdict::Inapplicable, opts));
    }
    let prod = g.dc_gain()? * gbar.dc_gain()?;
    let lmax = max_real_part(&eigenvalues(&prod)?);
    let condition = Condition {
        name: "λmax(G(0)Ḡ(0))".into(),
        value: lmax,
        threshold: 1.0,
    };
    let verdict = strict_below(lmax, 1.0);
    Ok(b.finish(ic, Some(condition), verdict, opts))
}

/// PR/WSPR negative-feedback certificate (sufficient only). `G` defaults
/// to the plant.
pub fn certify_t2(ic: &Interconnection, opts: &CertifyOptions) -> Result<CertificationResult> {
    let side = opts.side.unwrap_or(Side::Plant);
    let mut b = Builder::new(Theorem::T2, side);
    let (g, gbar) = roles(ic, side);
    sign_hypothesis(&mut b, ic, LoopSign::Negative);
    b.property("G is PR", check_pr_with(g, &opts.grid));
    b.property("Ḡ is WSPR", check_wspr_with(gbar, &opts.grid));
    match well_posed(ic) {
        Ok(w) => b.hyp("well-posed", w.well_posed, Some(w.margin)),
        Err(e) => {
            b.notes.push(format!("well-posed: {e}"));
            b.hyp("well-posed", false, None)
        }
    };
    let verdict = if b.all_pass() {
        CertVerdict::CertifiedStable
    } else {
        CertVerdict::Inapplicable
    };
    Ok(b.finish(ic, None, verdict, opts))
}

/// Subsystem carrying origin poles, if exactly one does.
fn origin_side(ic: &Interconnection) -> Option<Side> {
    match (
        ic.plant.max_origin_pole_order() > 0,
        ic.controller.max_origin_pole_order() > 0,
    ) {
        (true, false) => Some(Side::Plant),
        (false, true) => Some(Side::Controller),
        _ => None,
    }
}

fn smallest_singular_value(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    m.clone().singular_values().min()
}

fn origin_certificate(
    ic: &Interconnection,
    opts: &CertifyOptions,
    theorem: Theorem,
) -> Result<CertificationResult> {
    let side = opts.side.or_else(|| origin_side(ic)).unwrap_or(Side::Plant);
    let mut b = Builder::new(theorem, side);
    let (g, gbar) = roles(ic, side);
    sign_hypothesis(&mut b, ic, LoopSign::Positive);
    b.property("Ḡ is SNI", check_sni_with(gbar, &opts.grid));
    b.hyp("G strictly proper", g.is_strictly_proper(), None);
    b.property("G is NI (origin poles allowed)", check_ni_with(g, NiMode::Generalized, &opts.grid));

    match compute_g1g2(g) {
        Ok(pair) => {
            let scale = 1.0 + pair.g1.norm() + pair.g2.norm();
            match theorem {
                Theorem::T3 => {
                    let n2 = pair.g2.norm();
                    b.hyp("G₂=0", n2 <= LIMIT_TOL * scale, Some(n2));
                    let sv = smallest_singular_value(&pair.g1);
                    b.hyp("G₁ invertible", sv > LIMIT_TOL * scale, Some(sv));
                }
                _ => {
                    let n1 = pair.g1.norm();
                    b.hyp("G₁=0", n1 <= LIMIT_TOL * scale, Some(n1));
                    let sym = (&pair.g2 - pair.g2.transpose()).norm() <= LIMIT_TOL * scale;
                    let min_eig = symmetric_eigs(&pair.g2).into_iter().fold(f64::INFINITY, f64::min);
                    b.hyp("G₂>0", sym && min_eig > LIMIT_TOL * scale, Some(min_eig));
                }
            }
        }
        Err(e) => {
            b.notes.push(format!("origin limits: {e}"));
            let names = match theorem {
                Theorem::T3 => ["G₂=0", "G₁ invertible"],
                _ => ["G₁=0", "G₂>0"],
            };
            for n in names {
                b.hyp(n, false, None);
            }
        }
    }

    if !b.all_pass() {
        return Ok(b.finish(ic, None, CertVerdict::Inapplicable, opts));
    }
    let dc = gbar.dc_gain()?;
    let lmax = symmetric_eigs(&dc).into_iter().fold(f64::NEG_INFINITY, f64::max);
    let condition = Condition {
        name: "λmax(Ḡ(0))".into(),
        value: lmax,
        threshold: 0.0,
    };
    let verdict = strict_below(lmax, 0.0);
    Ok(b.finish(ic, Some(condition), verdict, opts))
}

/// Positive-feedback certificate for `G` with single origin poles
/// (`G2 = 0`, `G1` invertible): stable iff `Gbar(0) < 0`.
pub fn certify_t3(ic: &Interconnection, opts: &CertifyOptions) -> Result<CertificationResult> {
    origin_certificate(ic, opts, Theorem::T3)
}

/// Positive-feedback certificate for `G` with double origin poles
/// (`G1 = 0`, `G2 > 0`): stable iff `Gbar(0) < 0`.
pub fn certify_t4(ic: &Interconnection, opts: &CertifyOptions) -> Result<CertificationResult> {
    origin_certificate(ic, opts, Theorem::T4)
}

pub fn certify(
    ic: &Interconnection,
    theorem: Theorem,
    opts: &CertifyOptions,
) -> Result<CertificationResult> {
    match theorem {
        Theorem::T1 => certify_t1(ic, opts),
        Theorem::T2 => certify_t2(ic, opts),
        Theorem::T3 => certify_t3(ic, opts),
        Theorem::T4 => certify_t4(ic, opts),
    }
}

/// Picks the theorem from the loop sign and the origin-pole structure and
/// tries the swapped role assignment when the default one is inapplicable.
/// The eigenvalue oracle is always attached.
pub fn certify_auto(ic: &Interconnection, opts: &CertifyOptions) -> Result<CertificationResult> {
    let opts = CertifyOptions {
        oracle: true,
        ..opts.clone()
    };
    let with_side = |side: Side| CertifyOptions {
        side: Some(side),
        ..opts.clone()
    };
    let first_applicable = |theorem: Theorem, sides: [Side; 2]| -> Result<CertificationResult> {
        let first = certify(ic, theorem, &with_side(sides[0]))?;
        if first.applicable() || opts.side.is_some() {
            return Ok(first);
        }
        let second = certify(ic, theorem, &with_side(sides[1]))?;
        Ok(if second.applicable() { second } else { first })
    };

    if ic.sign == LoopSign::Negative {
        let default = opts.side.unwrap_or(Side::Plant);
        return first_applicable(Theorem::T2, [default, default.other()]);
    }
    let plant_origin = ic.plant.max_origin_pole_order() > 0;
    let controller_origin = ic.controller.max_origin_pole_order() > 0;
    if !plant_origin && !controller_origin {
        let default = opts.side.unwrap_or(Side::Controller);
        return first_applicable(Theorem::T1, [default, default.other()]);
    }
    let Some(side) = opts.side.or_else(|| origin_side(ic)) else {
        let mut r = certify_t3(ic, &with_side(Side::Plant))?;
        r.verdict = CertVerdict::Inapplicable;
        r.condition = None;
        r.notes
            .push("both subsystems have origin poles; no certificate covers this case".into());
        return Ok(r);
    };
    let g = match side {
        Side::Plant => &ic.plant,
        Side::Controller => &ic.controller,
    };
    let theorem = match compute_g1g2(g) {
        Ok(pair) => {
            let scale = 1.0 + pair.g1.norm() + pair.g2.norm();
            let g1_zero = pair.g1.norm() <= LIMIT_TOL * scale;
            let g2_zero = pair.g2.norm() <= LIMIT_TOL * scale;
            match (g1_zero, g2_zero) {
                (_, true) => Theorem::T3,
                (true, false) => Theorem::T4,
                (false, false) => {
                    let mut r = certify_t3(ic, &with_side(side))?;
                    r.notes.push(
                        "mixed origin-pole structure (G₁ ≠ 0 and G₂ ≠ 0); neither origin-pole certificate applies"
                            .into(),
                    );
                    return Ok(r);
                }
            }
        }
        Err(_) => Theorem::T3,
    };
    certify(ic, theorem, &with_side(side))
}
