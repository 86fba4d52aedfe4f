//! Mechanical and electrical models compiled to transfer functions, and the
//! coupled plant/controller pairs built from them.
//!
//! Spring, capacitor and inductor couplings give positive loops with
//! position, voltage or current outputs. A damper coupling gives a negative
//! loop with velocity output.

mod msd;
mod rlc;

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::interconnect::{Interconnection, LoopSign, Theorem};
use crate::lticore::{RationalFunction, TransferMatrix, Units};
use crate::properties::compute_g1g2;

pub use msd::{
    damper_coupled_port, msd_transfer, poly_det, spring_coupled_port, Endpoint, MotionOutput, MsdElement,
    MsdNetwork,
};
pub use rlc::{RlcNetwork, RlcTopology};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CouplingKind {
    Spring,
    Damper,
    Capacitor,
    Inductor,
}

impl CouplingKind {
    pub fn keyword(self) -> &'static str {
        match self {
            CouplingKind::Spring => "spring",
            CouplingKind::Damper => "damper",
            CouplingKind::Capacitor => "capacitor",
            CouplingKind::Inductor => "inductor",
        }
    }

    pub fn unit(self) -> &'static str {
        match self {
            CouplingKind::Spring => "N/m",
            CouplingKind::Damper => "N s/m",
            CouplingKind::Capacitor => "F",
            CouplingKind::Inductor => "H",
        }
    }

    pub fn is_mechanical(self) -> bool {
        matches!(self, CouplingKind::Spring | CouplingKind::Damper)
    }

    pub fn loop_sign(self) -> LoopSign {
        match self {
            CouplingKind::Damper => LoopSign::Negative,
            _ => LoopSign::Positive,
        }
    }
}

/// `system.mass`, a bare circuit name, or ground.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Ref {
    pub system: String,
    pub element: Option<String>,
}

impl Ref {
    pub fn mass(system: &str, mass: &str) -> Self {
        Self {
            system: system.into(),
            element: Some(mass.into()),
        }
    }

    pub fn circuit(name: &str) -> Self {
        Self {
            system: name.into(),
            element: None,
        }
    }
}

impl fmt::Display for Ref {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.element {
            Some(e) => write!(f, "{}.{}", self.system, e),
            None => f.write_str(&self.system),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Coupling {
    pub kind: CouplingKind,
    pub value: f64,
    pub plant_ref: Ref,
    /// `None` ties the coupling element to ground.
    pub controller_ref: Option<Ref>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum InputKind {
    Force,
    Charge,
    Flux,
}

impl InputKind {
    pub fn keyword(self) -> &'static str {
        match self {
            InputKind::Force => "force",
            InputKind::Charge => "charge",
            InputKind::Flux => "flux",
        }
    }

    pub fn unit(self) -> &'static str {
        match self {
            InputKind::Force => "N",
            InputKind::Charge => "C",
            InputKind::Flux => "Wb",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputKind {
    Position,
    Velocity,
    Voltage,
    Current,
}

impl OutputKind {
    pub fn keyword(self) -> &'static str {
        match self {
            OutputKind::Position => "position",
            OutputKind::Velocity => "velocity",
            OutputKind::Voltage => "voltage",
            OutputKind::Current => "current",
        }
    }

    pub fn unit(self) -> &'static str {
        match self {
            OutputKind::Position => "m",
            OutputKind::Velocity => "m/s",
            OutputKind::Voltage => "V",
            OutputKind::Current => "A",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Io {
    pub input: (InputKind, Ref),
    pub output: (OutputKind, Ref),
}

impl Io {
    pub fn new(input: InputKind, at_in: Ref, output: OutputKind, at_out: Ref) -> Self {
        Self {
            input: (input, at_in),
            output: (output, at_out),
        }
    }

    pub fn plant_units(&self) -> Units {
        Units::new(self.input.0.unit(), self.output.0.unit())
    }

    pub fn controller_units(&self) -> Units {
        Units::new(self.output.0.unit(), self.input.0.unit())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "domain", rename_all = "lowercase")]
pub enum Model {
    Mechanical(MsdNetwork),
    Electrical(RlcNetwork),
}

impl Model {
    pub fn name(&self) -> &str {
        match self {
            Model::Mechanical(n) => &n.name,
            Model::Electrical(c) => &c.name,
        }
    }
}

/// Transfer function of a single model under an input/output selection.
pub fn model_transfer(model: &Model, io: &Io) -> Result<TransferMatrix> {
    let g = match model {
        Model::Mechanical(net) => {
            let (InputKind::Force, at_in) = &io.input else {
                return Err(Error::Elaborate(format!(
                    "input {} does not apply to mechanical system {}",
                    io.input.0.keyword(),
                    net.name
                )));
            };
            let out = match io.output.0 {
                OutputKind::Position => MotionOutput::Position,
                OutputKind::Velocity => MotionOutput::Velocity,
                k => {
                    return Err(Error::Elaborate(format!(
                        "output {} does not apply to mechanical system {}",
                        k.keyword(),
                        net.name
                    )))
                }
            };
            let a = mass_of(at_in, net)?;
            let b = mass_of(&io.output.1, net)?;
            msd_transfer(net, a, b, out)?
        }
        Model::Electrical(c) => {
            let ok = match c.topology {
                RlcTopology::ParallelRlc => io.input.0 == InputKind::Charge && io.output.0 == OutputKind::Voltage,
                RlcTopology::SeriesRlc => io.input.0 == InputKind::Flux && io.output.0 == OutputKind::Current,
            };
            if !ok {
                return Err(Error::Elaborate(format!(
                    "input {} / output {} do not match {} circuit {}",
                    io.input.0.keyword(),
                    io.output.0.keyword(),
                    c.topology.keyword(),
                    c.name
                )));
            }
            c.plant_transfer()?
        }
    };
    Ok(TransferMatrix::siso(g).with_units(io.plant_units()))
}

fn mass_of<'a>(r: &'a Ref, net: &MsdNetwork) -> Result<&'a str> {
    if r.system != net.name {
        return Err(Error::Elaborate(format!("{r} is not in system {}", net.name)));
    }
    let m = r
        .element
        .as_deref()
        .ok_or_else(|| Error::Elaborate(format!("{r} must name a mass")))?;
    if net.index_of(m).is_none() {
        return Err(Error::Elaborate(format!("unknown mass {m} in system {}", net.name)));
    }
    Ok(m)
}

/// Plant, controller and the coupling element between them, with the
/// derived feedback interconnection.
#[derive(Clone, Debug, PartialEq)]
pub struct CoupledPair {
    pub plant_model: Model,
    /// `None` when the coupling element is tied to ground.
    pub controller_model: Option<Model>,
    pub coupling: Coupling,
    pub io: Io,
    pub interconnection: Interconnection,
    /// Theorem matching the structure of the pair.
    pub route: Option<Theorem>,
    pub notes: Vec<String>,
}

impl CoupledPair {
    /// General path: plant port map from the plant model, controller port
    /// map by eliminating the controller network behind the coupling.
    pub fn assemble(plant: Model, controller: Option<Model>, coupling: Coupling, io: Io) -> Result<Self> {
        if coupling.plant_ref.system != plant.name() {
            return Err(Error::Elaborate(format!(
                "coupling reference {} is not in plant {}",
                coupling.plant_ref,
                plant.name()
            )));
        }
        if io.input.1 != coupling.plant_ref || io.output.1 != coupling.plant_ref {
            return Err(Error::Elaborate(format!(
                "input and output must both sit at the coupling point {}",
                coupling.plant_ref
            )));
        }
        let (expect_in, expect_out) = match coupling.kind {
            CouplingKind::Spring => (InputKind::Force, OutputKind::Position),
            CouplingKind::Damper => (InputKind::Force, OutputKind::Velocity),
            CouplingKind::Capacitor => (InputKind::Charge, OutputKind::Voltage),
            CouplingKind::Inductor => (InputKind::Flux, OutputKind::Current),
        };
        if io.input.0 != expect_in || io.output.0 != expect_out {
            return Err(Error::Elaborate(format!(
                "{} coupling needs input {} and output {}, got {} and {}",
                coupling.kind.keyword(),
                expect_in.keyword(),
                expect_out.keyword(),
                io.input.0.keyword(),
                io.output.0.keyword()
            )));
        }
        match (&plant, coupling.kind.is_mechanical()) {
            (Model::Mechanical(_), false) => return Err(incompatible(&coupling, "mechanical")),
            (Model::Electrical(_), true) => return Err(incompatible(&coupling, "electrical")),
            _ => {}
        }
        let plant_tf = model_transfer(&plant, &io)?;
        let controller_tf = match (&plant, &controller) {
            (Model::Mechanical(_), None) | (Model::Mechanical(_), Some(Model::Mechanical(_))) => {
                if !coupling.kind.is_mechanical() {
                    return Err(incompatible(&coupling, "mechanical"));
                }
                let net = match &controller {
                    Some(Model::Mechanical(n)) => Some(n),
                    _ => None,
                };
                let mass = match (&coupling.controller_ref, net) {
                    (Some(r), Some(n)) => Some(mass_of(r, n)?),
                    (None, _) => None,
                    (Some(r), None) => return Err(Error::Elaborate(format!("unknown reference {r}"))),
                };
                if mass.is_none() && net.is_some() {
                    return Err(Error::Elaborate("controller system is not attached to the coupling".into()));
                }
                match coupling.kind {
                    CouplingKind::Spring => spring_coupled_port(net, mass, coupling.value)?,
                    _ => damper_coupled_port(net, mass, coupling.value)?,
                }
            }
            (Model::Electrical(p), Some(Model::Electrical(c))) => {
                let want = match coupling.kind {
                    CouplingKind::Capacitor => RlcTopology::ParallelRlc,
                    CouplingKind::Inductor => RlcTopology::SeriesRlc,
                    _ => return Err(incompatible(&coupling, "electrical")),
                };
                if p.topology != want || c.topology != want {
                    return Err(Error::Elaborate(format!(
                        "{} coupling joins two {} circuits",
                        coupling.kind.keyword(),
                        want.keyword()
                    )));
                }
                match &coupling.controller_ref {
                    Some(r) if r.system == c.name && r.element.is_none() => {}
                    _ => return Err(Error::Elaborate(format!("coupling must reference circuit {}", c.name))),
                }
                c.controller_transfer(coupling.value)?
            }
            (Model::Electrical(_), None) => {
                return Err(Error::Elaborate("electrical coupling needs a controller circuit".into()))
            }
            _ => return Err(Error::Elaborate("plant and controller are in different domains".into())),
        };
        Self::package(plant, controller, coupling, io, plant_tf.as_siso().cloned().unwrap(), controller_tf)
    }

    pub(crate) fn package(
        plant_model: Model,
        controller_model: Option<Model>,
        coupling: Coupling,
        io: Io,
        plant: RationalFunction,
        controller: RationalFunction,
    ) -> Result<Self> {
        let mut notes = Vec::new();
        if controller.is_zero() {
            notes.push("controller is identically zero; the loop is open".to_string());
        }
        let plant = TransferMatrix::siso(plant).with_units(io.plant_units());
        let controller = TransferMatrix::siso(controller).with_units(io.controller_units());
        let interconnection = Interconnection::new(plant, controller, coupling.kind.loop_sign())?;
        let route = infer_route(&interconnection);
        Ok(Self {
            plant_model,
            controller_model,
            coupling,
            io,
            interconnection,
            route,
            notes,
        })
    }

    pub fn plant(&self) -> &RationalFunction {
        self.interconnection.plant.as_siso().expect("coupled pairs are scalar")
    }

    pub fn controller(&self) -> &RationalFunction {
        self.interconnection.controller.as_siso().expect("coupled pairs are scalar")
    }

    /// Plant output units feed the controller input and back, so the loop
    /// gain is dimensionless.
    pub fn units_consistent(&self) -> bool {
        match (self.interconnection.plant.units(), self.interconnection.controller.units()) {
            (Some(p), Some(c)) => p.output == c.input && c.output == p.input,
            _ => false,
        }
    }
}

fn incompatible(c: &Coupling, domain: &str) -> Error {
    Error::Elaborate(format!("{} coupling cannot join {domain} systems", c.kind.keyword()))
}

/// Negative loops go to the passivity theorem. Positive loops go to the
/// plain NI theorem unless one side has origin poles, in which case its
/// low-frequency limits pick between the two generalized theorems.
pub fn infer_route(ic: &Interconnection) -> Option<Theorem> {
    if ic.sign == LoopSign::Negative {
        return Some(Theorem::T2);
    }
    let p = ic.plant.max_origin_pole_order() > 0;
    let c = ic.controller.max_origin_pole_order() > 0;
    let g = match (p, c) {
        (false, false) => return Some(Theorem::T1),
        (true, false) => &ic.plant,
        (false, true) => &ic.controller,
        (true, true) => return None,
    };
    let lim = compute_g1g2(g).ok()?;
    let zero = |m: &nalgebra::DMatrix<f64>| m.iter().all(|v| *v == 0.0);
    if zero(&lim.g2) {
        Some(Theorem::T3)
    } else if zero(&lim.g1) {
        Some(Theorem::T4)
    } else {
        None
    }
}

fn require_positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Model(format!("{name} must be positive, got {v}")))
    }
}

fn require_finite(params: &[(&str, f64)]) -> Result<()> {
    for (n, v) in params {
        if !v.is_finite() {
            return Err(Error::Model(format!("{n} must be finite, got {v}")));
        }
    }
    Ok(())
}

fn single_mass(name: &str, mass: &str, m: f64, d: f64, k: Option<f64>, suffix: &str) -> MsdNetwork {
    let mut net = MsdNetwork::new(name)
        .mass(mass, m)
        .damper(MsdElement::grounded(&format!("d{suffix}"), d, mass));
    if let Some(k) = k {
        net = net.spring(MsdElement::grounded(&format!("k{suffix}"), k, mass));
    }
    net
}

fn mech_io(output: OutputKind) -> Io {
    let at = Ref::mass("plant", "m1");
    Io::new(InputKind::Force, at.clone(), output, at)
}

fn mech_coupling(kind: CouplingKind, value: f64, to_controller: bool) -> Coupling {
    Coupling {
        kind,
        value,
        plant_ref: Ref::mass("plant", "m1"),
        controller_ref: to_controller.then(|| Ref::mass("controller", "m2")),
    }
}

fn rf(num: &[f64], den: &[f64]) -> Result<RationalFunction> {
    RationalFunction::from_coeffs(num, den)
}

/// Spring-coupled controller `-k (m2 s^2 + d2 s + k2) / (m2 s^2 + d2 s + k + k2)`.
fn spring_controller(m2: f64, d2: f64, k2: f64, k: f64) -> Result<RationalFunction> {
    if !(k + k2 >= 0.0) {
        return Err(Error::Model(format!("k + k2 must be nonnegative, got {}", k + k2)));
    }
    rf(&[-k * k2, -k * d2, -k * m2], &[k + k2, d2, m2])
}

/// Velocity-output plant and damper-coupled controller,
/// `d (m2 s^2 + d2 s + k2) / (m2 s^2 + (d + d2) s + k2)`, in a negative loop.
#[allow(clippy::too_many_arguments)]
pub fn build_fig4(m1: f64, d1: f64, k1: f64, m2: f64, d2: f64, k2: f64, d: f64) -> Result<CoupledPair> {
    require_positive("m1", m1)?;
    require_positive("m2", m2)?;
    require_finite(&[("d1", d1), ("k1", k1), ("d2", d2), ("k2", k2), ("d", d)])?;
    let plant = rf(&[0.0, 1.0], &[k1, d1, m1])?;
    let controller = rf(&[d * k2, d * d2, d * m2], &[k2, d + d2, m2])?;
    CoupledPair::package(
        Model::Mechanical(single_mass("plant", "m1", m1, d1, Some(k1), "1")),
        Some(Model::Mechanical(single_mass("controller", "m2", m2, d2, Some(k2), "2"))),
        mech_coupling(CouplingKind::Damper, d, true),
        mech_io(OutputKind::Velocity),
        plant,
        controller,
    )
}

/// Position-output plant under a static spring `k` to ground; the
/// controller is `-k`.
pub fn build_fig5(m1: f64, d1: f64, k1: f64, k: f64) -> Result<CoupledPair> {
    require_positive("m1", m1)?;
    require_finite(&[("d1", d1), ("k1", k1), ("k", k)])?;
    CoupledPair::package(
        Model::Mechanical(single_mass("plant", "m1", m1, d1, Some(k1), "1")),
        None,
        mech_coupling(CouplingKind::Spring, k, false),
        mech_io(OutputKind::Position),
        rf(&[1.0], &[k1, d1, m1])?,
        RationalFunction::constant(-k),
    )
}

/// Position-output plant spring-coupled to a second mass, positive loop.
#[allow(clippy::too_many_arguments)]
pub fn build_fig6(m1: f64, d1: f64, k1: f64, m2: f64, d2: f64, k2: f64, k: f64) -> Result<CoupledPair> {
    require_positive("m1", m1)?;
    require_positive("m2", m2)?;
    require_finite(&[("d1", d1), ("k1", k1), ("d2", d2), ("k2", k2), ("k", k)])?;
    CoupledPair::package(
        Model::Mechanical(single_mass("plant", "m1", m1, d1, Some(k1), "1")),
        Some(Model::Mechanical(single_mass("controller", "m2", m2, d2, Some(k2), "2"))),
        mech_coupling(CouplingKind::Spring, k, true),
        mech_io(OutputKind::Position),
        rf(&[1.0], &[k1, d1, m1])?,
        spring_controller(m2, d2, k2, k)?,
    )
}

/// Free-body plant `1/(m1 s^2 + d1 s)` with the spring-coupled controller.
pub fn build_fig7(m1: f64, d1: f64, m2: f64, d2: f64, k2: f64, k: f64) -> Result<CoupledPair> {
    require_positive("m1", m1)?;
    require_positive("m2", m2)?;
    require_finite(&[("d1", d1), ("d2", d2), ("k2", k2), ("k", k)])?;
    if d1 < 0.0 {
        return Err(Error::Model(format!("d1 must be nonnegative, got {d1}")));
    }
    CoupledPair::package(
        Model::Mechanical(single_mass("plant", "m1", m1, d1, None, "1")),
        Some(Model::Mechanical(single_mass("controller", "m2", m2, d2, Some(k2), "2"))),
        mech_coupling(CouplingKind::Spring, k, true),
        mech_io(OutputKind::Position),
        rf(&[1.0], &[0.0, d1, m1])?,
        spring_controller(m2, d2, k2, k)?,
    )
}

/// Velocity-output plant with a damper `d` to ground, negative loop.
pub fn build_damped(m1: f64, d1: f64, k1: f64, d: f64) -> Result<CoupledPair> {
    require_positive("m1", m1)?;
    require_finite(&[("d1", d1), ("k1", k1), ("d", d)])?;
    CoupledPair::package(
        Model::Mechanical(single_mass("plant", "m1", m1, d1, Some(k1), "1")),
        None,
        mech_coupling(CouplingKind::Damper, d, false),
        mech_io(OutputKind::Velocity),
        rf(&[0.0, 1.0], &[k1, d1, m1])?,
        RationalFunction::constant(d),
    )
}

fn rlc_pair(
    topology: RlcTopology,
    kind: CouplingKind,
    io: (InputKind, OutputKind),
    plant: RlcNetwork,
    controller: RlcNetwork,
    x: f64,
) -> Result<CoupledPair> {
    debug_assert_eq!(plant.topology, topology);
    let g = plant.plant_transfer()?;
    let k = controller.controller_transfer(x)?;
    let at = Ref::circuit(&plant.name);
    let coupling = Coupling {
        kind,
        value: x,
        plant_ref: at.clone(),
        controller_ref: Some(Ref::circuit(&controller.name)),
    };
    CoupledPair::package(
        Model::Electrical(plant),
        Some(Model::Electrical(controller)),
        coupling,
        Io::new(io.0, at.clone(), io.1, at),
        g,
        k,
    )
}

/// Two parallel RLC circuits joined by a capacitor `c`; input the coupling
/// charge, output the plant voltage.
#[allow(clippy::too_many_arguments)]
pub fn build_fig8(r1: f64, l1: f64, c1: f64, r2: f64, l2: f64, c2: f64, c: f64) -> Result<CoupledPair> {
    require_finite(&[("C2", c2)])?;
    rlc_pair(
        RlcTopology::ParallelRlc,
        CouplingKind::Capacitor,
        (InputKind::Charge, OutputKind::Voltage),
        RlcNetwork::new("plant", RlcTopology::ParallelRlc, r1, l1, c1),
        RlcNetwork::new("controller", RlcTopology::ParallelRlc, r2, l2, c2),
        c,
    )
}

/// Two series RLC loops joined by an inductor `l`; input the coupling flux,
/// output the plant current.
#[allow(clippy::too_many_arguments)]
pub fn build_fig9(r1: f64, l1: f64, c1: f64, r2: f64, l2: f64, c2: f64, l: f64) -> Result<CoupledPair> {
    require_finite(&[("L2", l2)])?;
    rlc_pair(
        RlcTopology::SeriesRlc,
        CouplingKind::Inductor,
        (InputKind::Flux, OutputKind::Current),
        RlcNetwork::new("plant", RlcTopology::SeriesRlc, r1, l1, c1),
        RlcNetwork::new("controller", RlcTopology::SeriesRlc, r2, l2, c2),
        l,
    )
}
