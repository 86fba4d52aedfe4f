//! One-parameter stability sweeps over the physical builders.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::interconnect::{
    certify_auto, close_loop, internal_stability, CertVerdict, CertifyOptions, Stability, Theorem,
};
use crate::physical::CoupledPair;

use super::{decay_verdict, Decay, DEFAULT_SEED};

pub const CSV_HEADER: &str = "param,certified,oracle,max_re_eig,valid";

/// `n` evenly spaced points from `a` to `b` inclusive.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n)
            .map(|i| if i + 1 == n { b } else { a + (b - a) * i as f64 / (n - 1) as f64 })
            .collect(),
    }
}

#[derive(Clone, Debug)]
pub struct SweepOptions {
    pub certify: CertifyOptions,
    /// Also run the time-domain referee with this seed.
    pub decay_seed: Option<u64>,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            certify: CertifyOptions {
                oracle: false,
                ..CertifyOptions::default()
            },
            decay_seed: Some(DEFAULT_SEED),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub param: f64,
    pub valid: bool,
    pub theorem: Option<Theorem>,
    pub certified: Option<CertVerdict>,
    pub oracle: Option<Stability>,
    pub max_re_eig: Option<f64>,
    pub decay: Option<Decay>,
    pub error: Option<String>,
}

impl SweepRow {
    fn invalid(param: f64, e: String) -> Self {
        Self {
            param,
            valid: false,
            theorem: None,
            certified: None,
            oracle: None,
            max_re_eig: None,
            decay: None,
            error: Some(e),
        }
    }
}

/// Adjacent parameter values between which a verdict changes, with the
/// linearly interpolated zero of `max Re` when that is what changed sign.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
    pub crossing: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepTable {
    pub param: String,
    pub rows: Vec<SweepRow>,
    /// Sign change of the largest closed-loop real part.
    pub oracle_bracket: Option<Bracket>,
    /// First change of the certified-stable verdict.
    pub certified_bracket: Option<Bracket>,
    pub seed: Option<u64>,
}

fn evaluate(pair: Result<CoupledPair>, param: f64, opts: &SweepOptions) -> SweepRow {
    let pair = match pair {
        Ok(p) => p,
        Err(e) => return SweepRow::invalid(param, e.to_string()),
    };
    let ic = &pair.interconnection;
    let mut row = SweepRow {
        param,
        valid: true,
        theorem: None,
        certified: None,
        oracle: None,
        max_re_eig: None,
        decay: None,
        error: None,
    };
    match certify_auto(ic, &opts.certify) {
        Ok(c) => {
            row.theorem = Some(c.theorem);
            row.certified = Some(c.verdict);
        }
        Err(e) => row.error = Some(e.to_string()),
    }
    match close_loop(ic) {
        Ok(sys) => {
            if let Ok(r) = internal_stability(&sys) {
                row.oracle = Some(r.verdict);
                row.max_re_eig = r.max_re_eig;
            }
            if let Some(seed) = opts.decay_seed {
                row.decay = decay_verdict(&sys, seed).ok().map(|d| d.verdict);
            }
        }
        Err(e) => {
            row.error.get_or_insert(e.to_string());
        }
    }
    row
}

fn sign(v: f64) -> i8 {
    if v > 0.0 {
        1
    } else if v < 0.0 {
        -1
    } else {
        0
    }
}

fn oracle_bracket(rows: &[SweepRow]) -> Option<Bracket> {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.valid)
        .filter_map(|r| r.max_re_eig.map(|m| (r.param, m)))
        .collect();
    for w in pts.windows(2) {
        let ((p0, m0), (p1, m1)) = (w[0], w[1]);
        if sign(m0) != sign(m1) && (sign(m0) != 0 || sign(m1) != 0) {
            let crossing = if m1 != m0 { p0 - m0 * (p1 - p0) / (m1 - m0) } else { p0 };
            return Some(Bracket {
                lo: p0,
                hi: p1,
                crossing: Some(crossing),
            });
        }
    }
    None
}

fn certified_bracket(rows: &[SweepRow]) -> Option<Bracket> {
    let pts: Vec<(f64, bool)> = rows
        .iter()
        .filter(|r| r.valid)
        .filter_map(|r| r.certified.map(|c| (r.param, c == CertVerdict::CertifiedStable)))
        .collect();
    pts.windows(2).find(|w| w[0].1 != w[1].1).map(|w| Bracket {
        lo: w[0].0,
        hi: w[1].0,
        crossing: None,
    })
}

/// Builds, certifies and referees the pair at each of `n` values of the
/// parameter. Rows come back in parameter order; builder failures are kept
/// as invalid rows.
pub fn stability_sweep<F>(builder: F, param: &str, range: (f64, f64), n: usize, opts: &SweepOptions) -> SweepTable
where
    F: Fn(f64) -> Result<CoupledPair> + Sync,
{
    let values = linspace(range.0, range.1, n);
    let rows: Vec<SweepRow> = values.par_iter().map(|&v| evaluate(builder(v), v, opts)).collect();
    SweepTable {
        param: param.to_string(),
        oracle_bracket: oracle_bracket(&rows),
        certified_bracket: certified_bracket(&rows),
        rows,
        seed: opts.decay_seed,
    }
}

/// Twelve significant digits, positional notation where reasonable.
fn sig12(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let e = x.abs().log10().floor() as i32;
    if !(-6..=15).contains(&e) {
        return format!("{x:.11e}");
    }
    let decimals = (11 - e).max(0) as usize;
    let s = format!("{x:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn label<T: std::fmt::Display>(v: &Option<T>) -> String {
    v.as_ref().map(T::to_string).unwrap_or_default()
}

pub fn write_csv<W: Write>(table: &SweepTable, mut out: W) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in &table.rows {
        let certified = if r.valid { label(&r.certified) } else { "invalid".to_string() };
        writeln!(
            out,
            "{},{},{},{},{}",
            sig12(r.param),
            certified,
            label(&r.oracle),
            r.max_re_eig.map(sig12).unwrap_or_default(),
            r.valid
        )?;
    }
    Ok(())
}
