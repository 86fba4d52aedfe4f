//! `nicert`: classify transfer functions, certify feedback loops, sweep
//! physical parameters.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use nicert::interconnect::{
    certify, certify_auto, close_loop, CertVerdict, CertificationResult, CertifyOptions, Interconnection,
    LoopSign, Theorem,
};
use nicert::lticore::{RationalFunction, TransferMatrix};
use nicert::netlist::{elaborate, parse, Elaborated, NetlistDocument};
use nicert::properties::{classify, GridConfig, Property, PropertyReport, Verdict, Witness};
use nicert::simoracle::{decay_verdict, stability_sweep, write_csv, Bracket, DecayReport, SweepOptions, DEFAULT_SEED};

#[derive(Parser)]
#[command(name = "nicert", version, about = "Negative imaginary and positive real analysis of LTI systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Test one transfer function for a property.
    Classify(ClassifyArgs),
    /// Certify internal stability of a feedback loop.
    Certify(CertifyArgs),
    /// Sweep one netlist parameter and report where stability changes.
    Sweep(SweepArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum PropertyArg {
    Ni,
    NiGen,
    Sni,
    Pr,
    Wspr,
}

impl From<PropertyArg> for Property {
    fn from(p: PropertyArg) -> Self {
        match p {
            PropertyArg::Ni => Property::Ni,
            PropertyArg::NiGen => Property::NiGeneralized,
            PropertyArg::Sni => Property::Sni,
            PropertyArg::Pr => Property::Pr,
            PropertyArg::Wspr => Property::Wspr,
        }
    }
}

#[derive(Args)]
#[group(id = "source", required = true, multiple = false)]
struct Source {
    /// Ascending coefficients, e.g. "0 1 / 1 1 1" for s/(s^2+s+1).
    #[arg(long, allow_hyphen_values = true)]
    tf: Option<String>,
    #[arg(long)]
    netlist: Option<PathBuf>,
}

#[derive(Args)]
struct ClassifyArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long, value_enum)]
    property: PropertyArg,
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum SignArg {
    Pos,
    Neg,
}

#[derive(Clone, Copy, ValueEnum)]
enum TheoremArg {
    Auto,
    T1,
    T2,
    T3,
    T4,
}

#[derive(Args)]
struct CertifyArgs {
    /// Coupled netlist supplying both subsystems and the loop sign.
    #[arg(long, conflicts_with_all = ["plant", "controller"])]
    netlist: Option<PathBuf>,
    /// Transfer-function string or netlist file.
    #[arg(long, allow_hyphen_values = true, requires = "controller")]
    plant: Option<String>,
    #[arg(long, allow_hyphen_values = true, requires = "plant")]
    controller: Option<String>,
    #[arg(long, value_enum)]
    sign: Option<SignArg>,
    #[arg(long, value_enum, default_value = "auto")]
    theorem: TheoremArg,
    /// Attach the eigenvalue and time-domain referees.
    #[arg(long)]
    oracle: bool,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    netlist: PathBuf,
    #[arg(long)]
    param: String,
    /// `A:B:N`, N points from A to B inclusive.
    #[arg(long, allow_hyphen_values = true)]
    range: String,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

/// Failure with the exit code it maps to.
struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Classify(a) => run_classify(a),
        Command::Certify(a) => run_certify(a),
        Command::Sweep(a) => run_sweep(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn read_netlist(path: &Path) -> Result<NetlistDocument, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure(format!("{}: {e}", path.display())))?;
    parse(&text).map_err(|e| Failure(format!("{}:{e}", path.display())))
}

fn elaborate_file(path: &Path) -> Result<Elaborated, Failure> {
    let doc = read_netlist(path)?;
    elaborate(&doc).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

/// A transfer-function string, or a netlist file whose input/output lines
/// select the transfer function.
fn transfer_from(src: &str) -> Result<TransferMatrix, Failure> {
    let path = Path::new(src);
    if path.is_file() {
        return Ok(elaborate_file(path)?.transfer().clone());
    }
    let g: RationalFunction = src.parse()?;
    Ok(TransferMatrix::siso(g))
}

fn run_classify(a: ClassifyArgs) -> Result<u8, Failure> {
    let g = match (&a.source.tf, &a.source.netlist) {
        (Some(tf), None) => TransferMatrix::siso(tf.parse()?),
        (None, Some(p)) => elaborate_file(p)?.transfer().clone(),
        _ => return Err(Failure("give exactly one of --tf and --netlist".into())),
    };
    let report = classify(&g, a.property.into(), &GridConfig::from_env())?;
    if a.json {
        println!("{}", serde_json::to_string_pretty(&report)?);
    } else {
        print_report(&report);
    }
    Ok(match report.verdict {
        Verdict::Pass | Verdict::NumericallyVerified => 0,
        Verdict::Fail => 1,
    })
}

fn describe_witness(w: &Witness) -> String {
    match w {
        Witness::Frequency { omega } => format!("frequency w = {omega}"),
        Witness::Pole { re, im, multiplicity } => format!("pole {re} + {im}j (multiplicity {multiplicity})"),
        Witness::Residue {
            pole_re,
            pole_im,
            min_eig,
            hermitian,
        } => format!(
            "residue at {pole_re} + {pole_im}j, min eigenvalue {min_eig:e}{}",
            if *hermitian { "" } else { ", not Hermitian" }
        ),
        Witness::PoleAtInfinity { order } => format!("pole at infinity of order {order}"),
    }
}

fn print_report(r: &PropertyReport) {
    println!("property: {}", r.property);
    println!("verdict: {}", r.verdict);
    if let Some(c) = r.failed_condition {
        println!("failed condition: {c}");
    }
    if let Some(w) = &r.witness {
        println!("witness: {}", describe_witness(w));
    }
    for m in &r.margins {
        println!("margin {}: {:e}", m.condition, m.slack);
    }
    if !r.touch_frequencies.is_empty() {
        let t: Vec<String> = r.touch_frequencies.iter().map(|w| w.to_string()).collect();
        println!("touches zero at w = {}", t.join(", "));
    }
}

#[derive(Serialize)]
struct CertifyOutput<'a> {
    #[serde(flatten)]
    result: &'a CertificationResult,
    decay: Option<DecayReport>,
}

fn run_certify(a: CertifyArgs) -> Result<u8, Failure> {
    let sign_override = a.sign.map(|s| match s {
        SignArg::Pos => LoopSign::Positive,
        SignArg::Neg => LoopSign::Negative,
    });
    let ic = match (&a.netlist, &a.plant, &a.controller) {
        (Some(p), None, None) => {
            let e = elaborate_file(p)?;
            let Some(pair) = e.pair() else {
                return Err(Failure(format!("{} has no coupling", p.display())));
            };
            let mut ic = pair.interconnection.clone();
            if let Some(s) = sign_override {
                ic.sign = s;
            }
            ic
        }
        (None, Some(plant), Some(ctrl)) => Interconnection::new(
            transfer_from(plant)?,
            transfer_from(ctrl)?,
            sign_override.unwrap_or(LoopSign::Positive),
        )?,
        _ => return Err(Failure("give --netlist, or both --plant and --controller".into())),
    };
    let opts = CertifyOptions {
        side: None,
        oracle: a.oracle,
        grid: GridConfig::from_env(),
    };
    let result = match a.theorem {
        TheoremArg::Auto => certify_auto(&ic, &opts)?,
        TheoremArg::T1 => certify(&ic, Theorem::T1, &opts)?,
        TheoremArg::T2 => certify(&ic, Theorem::T2, &opts)?,
        TheoremArg::T3 => certify(&ic, Theorem::T3, &opts)?,
        TheoremArg::T4 => certify(&ic, Theorem::T4, &opts)?,
    };
    let decay = if a.oracle {
        close_loop(&ic).ok().and_then(|sys| decay_verdict(&sys, a.seed).ok())
    } else {
        None
    };
    if a.json {
        let out = CertifyOutput {
            result: &result,
            decay,
        };
        println!("{}", serde_json::to_string_pretty(&out)?);
    } else {
        print_certification(&result, decay.as_ref());
    }
    Ok(match result.verdict {
        CertVerdict::CertifiedStable => 0,
        CertVerdict::CertifiedUnstable => 1,
        CertVerdict::Inapplicable | CertVerdict::Marginal => 2,
    })
}

fn print_certification(r: &CertificationResult, decay: Option<&DecayReport>) {
    let side = match r.side {
        nicert::interconnect::Side::Plant => "plant",
        nicert::interconnect::Side::Controller => "controller",
    };
    println!("theorem: {} (G = {side})", r.theorem);
    for h in &r.hypotheses {
        let v = h.value.map(|v| format!(" ({v:e})")).unwrap_or_default();
        println!("  [{}] {}{v}", if h.pass { "ok" } else { "no" }, h.name);
    }
    if let Some(c) = &r.condition {
        println!("condition: {} = {} (threshold {})", c.name, c.value, c.threshold);
    }
    println!("verdict: {}", r.verdict);
    for n in &r.notes {
        println!("note: {n}");
    }
    if let Some(o) = &r.oracle {
        match (&o.verdict, &o.error) {
            (Some(v), _) => {
                let m = o.max_re_eig.map(|m| format!(", max Re = {m:e}")).unwrap_or_default();
                println!("oracle: {v} ({} states{m})", o.states);
            }
            (None, Some(e)) => println!("oracle: error: {e}"),
            (None, None) => {}
        }
    }
    if let Some(d) = decay {
        let worst = d.ratios.iter().copied().fold(0.0, f64::max);
        println!(
            "simulation: {} (seed {}, horizon {}, worst ratio {worst:e})",
            d.verdict,
            d.seed,
            d.horizon
        );
    }
}

fn parse_range(s: &str) -> Result<(f64, f64, usize), Failure> {
    let parts: Vec<&str> = s.split(':').collect();
    let [a, b, n] = parts.as_slice() else {
        return Err(Failure(format!("range must be A:B:N, got {s}")));
    };
    let bad = || Failure(format!("range must be A:B:N, got {s}"));
    let a: f64 = a.trim().parse().map_err(|_| bad())?;
    let b: f64 = b.trim().parse().map_err(|_| bad())?;
    let n: usize = n.trim().parse().map_err(|_| bad())?;
    if n == 0 || !a.is_finite() || !b.is_finite() {
        return Err(bad());
    }
    Ok((a, b, n))
}

fn describe_bracket(b: &Option<Bracket>) -> String {
    match b {
        Some(b) => match b.crossing {
            Some(x) => format!("[{}, {}], crossing near {x:.6}", b.lo, b.hi),
            None => format!("[{}, {}]", b.lo, b.hi),
        },
        None => "none".into(),
    }
}

fn run_sweep(a: SweepArgs) -> Result<u8, Failure> {
    let doc = read_netlist(&a.netlist)?;
    let name = doc.resolve_param(&a.param)?;
    let (lo, hi, n) = parse_range(&a.range)?;
    let opts = SweepOptions {
        certify: CertifyOptions {
            side: None,
            oracle: false,
            grid: GridConfig::from_env(),
        },
        decay_seed: Some(a.seed),
    };
    let builder = |v: f64| {
        let mut d = doc.clone();
        d.set_param(&name, v)?;
        match elaborate(&d)? {
            Elaborated::Pair(p) => Ok(*p),
            Elaborated::Single { .. } => Err(nicert::Error::Elaborate("netlist has no coupling".into())),
        }
    };
    let table = stability_sweep(builder, &name, (lo, hi), n, &opts);
    let summary = format!(
        "parameter: {name}\noracle bracket: {}\ncertified bracket: {}\nseed: {}",
        describe_bracket(&table.oracle_bracket),
        describe_bracket(&table.certified_bracket),
        a.seed
    );
    match &a.out {
        Some(path) => {
            let f = fs::File::create(path).map_err(|e| Failure(format!("{}: {e}", path.display())))?;
            let mut w = io::BufWriter::new(f);
            write_csv(&table, &mut w)?;
            w.flush()?;
            println!("{summary}");
        }
        None => {
            write_csv(&table, io::stdout().lock())?;
            eprintln!("{summary}");
        }
    }
    Ok(0)
}
