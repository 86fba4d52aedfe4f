//! Negative-imaginary and positive-real system classes.
//!
//! Scalar systems are decided exactly through sign analysis of the
//! frequency-response polynomials. Transfer matrices are scanned on a
//! frequency grid and at best earn a `numerically-verified` verdict.

mod freq;
mod grid;
mod report;
mod sign;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lticore::{psd_check, Polynomial, RationalFunction, RootCluster, TransferMatrix};

use freq::{offset, relative_slack, FrequencyForms};
use grid::Form;
use report::ReportBuilder;

pub use grid::{GridConfig, GRID_POINTS_ENV};
pub use report::{Margin, NiLimitPair, Property, PropertyReport, Verdict, Witness};
pub use sign::{positive_real_roots, scan as scan_half_line, HalfLineScan};

/// Semidefinite frequency inequalities tolerate this fraction of the
/// magnitude of the terms that make up the test polynomial.
pub const PROP_TOL: f64 = 1e-9;
/// Strict inequalities must clear this relative margin.
pub const STRICT_TOL: f64 = 1e-12;
/// Relative distance from the imaginary axis below which a pole counts as
/// lying on it. Multiple roots are only located to about `1e-11`.
pub const AXIS_TOL: f64 = 1e-8;

/// Which NI definition applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NiMode {
    /// No poles at the origin.
    Strict,
    /// Origin poles up to order two with `lim s^2 G` positive semidefinite.
    Generalized,
}

fn axis_tol(p: Complex64) -> f64 {
    AXIS_TOL * (1.0 + p.norm())
}

fn is_origin(p: &RootCluster) -> bool {
    p.center.norm() <= axis_tol(p.center)
}

fn on_axis(p: &RootCluster) -> bool {
    p.center.re.abs() <= axis_tol(p.center)
}

fn in_open_rhp(p: &RootCluster) -> bool {
    p.center.re > axis_tol(p.center)
}

fn max_re(poles: &[RootCluster]) -> Option<f64> {
    poles.iter().map(|p| p.center.re).reduce(f64::max)
}

fn residue_witness(pole: Complex64, check: &crate::lticore::PsdCheck) -> Witness {
    Witness::Residue {
        pole_re: pole.re,
        pole_im: pole.im,
        min_eig: check.min_eig,
        hermitian: check.hermitian,
    }
}

/// Residue conditions at poles `j w0` on the imaginary axis. `scale` is `j`
/// for the NI residue `lim (s - j w0) j G(s)` and `1` for PR.
fn check_axis_residues(
    g: &TransferMatrix,
    poles: &[RootCluster],
    include_origin: bool,
    scale: Complex64,
    condition: u8,
    rb: &mut ReportBuilder,
) -> Result<()> {
    for p in poles.iter().filter(|p| on_axis(p) && p.center.im >= 0.0) {
        let origin = is_origin(p);
        if origin && !include_origin {
            continue;
        }
        let w0 = if origin { 0.0 } else { p.center.im };
        let at = Complex64::new(0.0, w0);
        if p.multiplicity > 1 {
            rb.fail(condition, Witness::pole(at, p.multiplicity));
            continue;
        }
        let report = g.residue_at(at)?.scaled(scale);
        let Some(check) = report.check else {
            rb.fail(condition, Witness::pole(at, p.multiplicity));
            continue;
        };
        rb.margin(condition, check.min_eig);
        if !check.psd {
            rb.fail(condition, residue_witness(at, &check));
        }
    }
    Ok(())
}

/// Negative-imaginary test.
pub fn check_ni(g: &TransferMatrix, mode: NiMode) -> Result<PropertyReport> {
    check_ni_with(g, mode, &GridConfig::default())
}

pub fn check_ni_with(g: &TransferMatrix, mode: NiMode, cfg: &GridConfig) -> Result<PropertyReport> {
    g.require_square()?;
    g.require_proper()?;
    let property = match mode {
        NiMode::Strict => Property::Ni,
        NiMode::Generalized => Property::NiGeneralized,
    };
    let siso = g.as_siso();
    let mut rb = ReportBuilder::new(property, siso.is_none());
    let poles = g.poles()?;

    for p in &poles {
        if in_open_rhp(p) || (mode == NiMode::Strict && is_origin(p)) {
            rb.fail(1, Witness::pole(p.center, p.multiplicity));
        }
    }
    let counted: Vec<RootCluster> = poles
        .iter()
        .filter(|p| mode == NiMode::Strict || !is_origin(p))
        .copied()
        .collect();
    if let Some(m) = max_re(&counted) {
        rb.margin(1, -m);
    }

    match siso {
        Some(f) => semidefinite_imaginary(f, &mut rb)?,
        None => {
            let s = grid::scan(g, Form::Imaginary, cfg, false);
            rb.margin(2, s.min);
            if s.min < -PROP_TOL {
                rb.fail(2, Witness::Frequency { omega: s.argmin });
            }
        }
    }

    check_axis_residues(g, &poles, false, Complex64::new(0.0, 1.0), 3, &mut rb)?;

    if mode == NiMode::Generalized && poles.iter().any(is_origin) {
        let order = g.max_origin_pole_order();
        if order >= 3 {
            rb.fail(4, Witness::pole(Complex64::new(0.0, 0.0), order));
        } else {
            let g2 = g.limit_s_pow(2)?.map(|v| Complex64::new(v, 0.0));
            let check = psd_check(&g2);
            rb.margin(4, check.min_eig);
            if !check.psd {
                rb.fail(4, residue_witness(Complex64::new(0.0, 0.0), &check));
            }
        }
    }
    Ok(rb.finish())
}

/// `Im G(jw) <= 0` for `w > 0`, i.e. `r(x) <= 0` for `x > 0`.
fn semidefinite_imaginary(g: &RationalFunction, rb: &mut ReportBuilder) -> Result<()> {
    let f = FrequencyForms::of(g);
    if f.r.is_zero() {
        rb.margin(2, 0.0);
        return Ok(());
    }
    let h = offset(&f.r, PROP_TOL, &f.r_abs);
    let sc = sign::scan(&h)?;
    rb.margin(2, relative_slack(&-&f.r, &f.r_abs, &sc.points));
    match sc.violation(false) {
        Some(x) => rb.fail(2, Witness::Frequency { omega: x.sqrt() }),
        None => record_touches(&f.r, rb)?,
    }
    Ok(())
}

fn record_touches(p: &Polynomial, rb: &mut ReportBuilder) -> Result<()> {
    for (x, _) in positive_real_roots(p)? {
        rb.touch(x.sqrt());
    }
    Ok(())
}

/// Strictly-negative-imaginary test.
pub fn check_sni(g: &TransferMatrix) -> Result<PropertyReport> {
    check_sni_with(g, &GridConfig::default())
}

pub fn check_sni_with(g: &TransferMatrix, cfg: &GridConfig) -> Result<PropertyReport> {
    g.require_square()?;
    g.require_proper()?;
    let siso = g.as_siso();
    let mut rb = ReportBuilder::new(Property::Sni, siso.is_none());
    closed_rhp_poles(g, &mut rb)?;

    match siso {
        Some(f) => {
            let f = FrequencyForms::of(f);
            if f.r.is_zero() {
                rb.margin(2, 0.0);
                rb.fail(2, Witness::Frequency { omega: 1.0 });
            } else {
                // Im G vanishes to some order at w = 0; only the sign of the
                // remaining factor matters on (0, inf)
                let m = f.r.origin_order();
                let r = f.r.shift_down(m);
                let r_abs = f.r_abs.shift_down(m);
                let h = offset(&r, -STRICT_TOL, &r_abs);
                let sc = sign::scan(&h)?;
                rb.margin(2, relative_slack(&-&r, &r_abs, &sc.points));
                if let Some(x) = sc.violation(true) {
                    let x = if x > 0.0 {
                        x
                    } else {
                        positive_real_roots(&r)?.first().map_or(1.0, |(z, _)| 0.5 * z)
                    };
                    rb.fail(2, Witness::Frequency { omega: x.sqrt() });
                }
            }
        }
        None => {
            let s = grid::scan(g, Form::Imaginary, cfg, false);
            rb.margin(2, s.min);
            if s.min <= 0.0 {
                rb.fail(2, Witness::Frequency { omega: s.argmin });
            }
        }
    }
    Ok(rb.finish())
}

/// Condition 1 of the strict classes: no poles in `Re s >= 0`.
fn closed_rhp_poles(g: &TransferMatrix, rb: &mut ReportBuilder) -> Result<Vec<RootCluster>> {
    let poles = g.poles()?;
    for p in &poles {
        if p.center.re >= -axis_tol(p.center) {
            rb.fail(1, Witness::pole(p.center, p.multiplicity));
        }
    }
    if let Some(m) = max_re(&poles) {
        rb.margin(1, -m);
    }
    Ok(poles)
}

/// Positive-real test in its frequency-domain form (open left half plane
/// poles, semidefinite Hermitian part on the axis, simple axis poles with
/// positive semidefinite residues, including the pole at infinity).
pub fn check_pr(g: &TransferMatrix) -> Result<PropertyReport> {
    check_pr_with(g, &GridConfig::default())
}

pub fn check_pr_with(g: &TransferMatrix, cfg: &GridConfig) -> Result<PropertyReport> {
    g.require_square()?;
    let siso = g.as_siso();
    let mut rb = ReportBuilder::new(Property::Pr, siso.is_none());
    let poles = g.poles()?;
    for p in &poles {
        if in_open_rhp(p) {
            rb.fail(1, Witness::pole(p.center, p.multiplicity));
        }
    }
    if let Some(m) = max_re(&poles) {
        rb.margin(1, -m);
    }

    match siso {
        Some(f) => {
            let f = FrequencyForms::of(f);
            if f.e.is_zero() {
                rb.margin(2, 0.0);
            } else {
                let h = offset(&-&f.e, PROP_TOL, &f.e_abs);
                let sc = sign::scan(&h)?;
                rb.margin(2, relative_slack(&f.e, &f.e_abs, &sc.points));
                match sc.violation(false) {
                    Some(x) => rb.fail(2, Witness::Frequency { omega: x.sqrt() }),
                    None => record_touches(&f.e, &mut rb)?,
                }
            }
        }
        None => {
            let s = grid::scan(g, Form::Real, cfg, true);
            rb.margin(2, s.min);
            if s.min < -PROP_TOL {
                rb.fail(2, Witness::Frequency { omega: s.argmin });
            }
        }
    }

    check_axis_residues(g, &poles, true, Complex64::new(1.0, 0.0), 3, &mut rb)?;
    if !g.is_proper() {
        let n = g.rows();
        let mut k_inf = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
        let mut excess = 0;
        for (i, j, e) in g.entries() {
            let d = e.num().degree().unwrap_or(0) as i64 - e.den().degree().unwrap_or(0) as i64;
            if d == 1 {
                k_inf[(i, j)] = Complex64::new(e.num().leading() / e.den().leading(), 0.0);
            }
            excess = excess.max(d);
        }
        if excess > 1 {
            rb.fail(3, Witness::PoleAtInfinity { order: excess as usize });
        } else {
            let check = psd_check(&k_inf);
            rb.margin(3, check.min_eig);
            if !check.psd {
                rb.fail(3, Witness::PoleAtInfinity { order: 1 });
            }
        }
    }
    Ok(rb.finish())
}

/// Weakly-strictly-positive-real test.
pub fn check_wspr(g: &TransferMatrix) -> Result<PropertyReport> {
    check_wspr_with(g, &GridConfig::default())
}

pub fn check_wspr_with(g: &TransferMatrix, cfg: &GridConfig) -> Result<PropertyReport> {
    g.require_square()?;
    if g.is_zero() {
        return Err(Error::ZeroTransfer);
    }
    let siso = g.as_siso();
    let mut rb = ReportBuilder::new(Property::Wspr, siso.is_none());
    closed_rhp_poles(g, &mut rb)?;

    match siso {
        Some(f) => {
            let f = FrequencyForms::of(f);
            if f.e.is_zero() {
                rb.margin(2, 0.0);
                rb.fail(2, Witness::Frequency { omega: 0.0 });
            } else {
                let h = offset(&-&f.e, -STRICT_TOL, &f.e_abs);
                let sc = sign::scan(&h)?;
                rb.margin(2, relative_slack(&f.e, &f.e_abs, &sc.points));
                if let Some(x) = sc.violation(true) {
                    rb.fail(2, Witness::Frequency { omega: x.sqrt() });
                }
            }
        }
        None => {
            let s = grid::scan(g, Form::Real, cfg, true);
            rb.margin(2, s.min);
            if s.min <= 0.0 {
                rb.fail(2, Witness::Frequency { omega: s.argmin });
            }
        }
    }
    Ok(rb.finish())
}

/// Runs the test for `property`. `NI` uses the strict definition,
/// `NI-generalized` admits origin poles.
pub fn classify(g: &TransferMatrix, property: Property, cfg: &GridConfig) -> Result<PropertyReport> {
    match property {
        Property::Ni => check_ni_with(g, NiMode::Strict, cfg),
        Property::NiGeneralized => check_ni_with(g, NiMode::Generalized, cfg),
        Property::Sni => check_sni_with(g, cfg),
        Property::Pr => check_pr_with(g, cfg),
        Property::Wspr => check_wspr_with(g, cfg),
    }
}

/// Origin limit matrices `G2 = lim s^2 G` and `G1 = lim s (G - G2/s^2)`,
/// from the first two Taylor coefficients of each entry with its origin
/// poles removed.
pub fn compute_g1g2(g: &TransferMatrix) -> Result<NiLimitPair> {
    let mut g1 = DMatrix::zeros(g.rows(), g.cols());
    let mut g2 = DMatrix::zeros(g.rows(), g.cols());
    for (i, j, e) in g.entries() {
        if e.is_zero() {
            continue;
        }
        let (v, h0, h1) = e.origin_series();
        match v {
            0 => {}
            1 => g1[(i, j)] = h0,
            2 => {
                g2[(i, j)] = h0;
                g1[(i, j)] = h1;
            }
            order => return Err(Error::OriginPoleOrder { row: i, col: j, order }),
        }
    }
    Ok(NiLimitPair { g2, g1 })
}

#[cfg(test)]
mod tests;
