//! Text front end for the physical models.
//!
//! ```text
//! system plant
//!   mass m1 1.0
//!   spring k1 1.0 m1 ground
//!   damper d1 1.0 m1 ground
//! end
//! system controller
//!   mass m2 1.0
//!   spring k2 1.0 m2 ground
//!   damper d2 1.0 m2 ground
//! end
//! couple spring 1.0 plant.m1 controller.m2
//! input force plant.m1
//! output position plant.m1
//! ```
//!
//! Circuits are one line, `circuit parallel_rlc NAME R L C` or
//! `circuit series_rlc NAME R L C`. A coupling may be tied to `ground`.

mod parse;

use std::fmt;

pub use parse::{parse, ParseError};

use crate::error::{Error, Result};
use crate::lticore::TransferMatrix;
use crate::physical::{
    build_damped, build_fig4, build_fig5, build_fig6, build_fig7, model_transfer, Coupling, CouplingKind,
    CoupledPair, Endpoint, Io, Model, MsdNetwork, Ref,
};

/// A coupling line as written; `None` is ground.
#[derive(Clone, Debug, PartialEq)]
pub struct CoupleDecl {
    pub kind: CouplingKind,
    pub value: f64,
    pub a: Option<Ref>,
    pub b: Option<Ref>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NetlistDocument {
    pub systems: Vec<Model>,
    pub coupling: Option<CoupleDecl>,
    pub io: Io,
}

fn ref_text(r: &Option<Ref>) -> String {
    r.as_ref().map_or_else(|| "ground".to_string(), Ref::to_string)
}

fn node_text(e: &Endpoint) -> &str {
    match e {
        Endpoint::Ground => "ground",
        Endpoint::Mass(m) => m,
    }
}

impl fmt::Display for NetlistDocument {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for m in &self.systems {
            match m {
                Model::Mechanical(net) => {
                    writeln!(f, "system {}", net.name)?;
                    for (n, v) in &net.masses {
                        writeln!(f, "  mass {n} {v:?}")?;
                    }
                    for (kw, list) in [("spring", &net.springs), ("damper", &net.dampers)] {
                        for e in list {
                            writeln!(f, "  {kw} {} {:?} {} {}", e.name, e.value, node_text(&e.a), node_text(&e.b))?;
                        }
                    }
                    writeln!(f, "end")?;
                }
                Model::Electrical(c) => {
                    writeln!(f, "circuit {} {} {:?} {:?} {:?}", c.topology.keyword(), c.name, c.r, c.l, c.c)?;
                }
            }
        }
        if let Some(c) = &self.coupling {
            writeln!(f, "couple {} {:?} {} {}", c.kind.keyword(), c.value, ref_text(&c.a), ref_text(&c.b))?;
        }
        writeln!(f, "input {} {}", self.io.input.0.keyword(), self.io.input.1)?;
        writeln!(f, "output {} {}", self.io.output.0.keyword(), self.io.output.1)
    }
}

impl NetlistDocument {
    pub fn system(&self, name: &str) -> Option<&Model> {
        self.systems.iter().find(|m| m.name() == name)
    }

    /// Same document with systems sorted by name and coupling ends ordered,
    /// for structural comparison.
    pub fn canonical(&self) -> Self {
        let mut doc = self.clone();
        doc.systems.sort_by(|a, b| a.name().cmp(b.name()));
        if let Some(c) = &mut doc.coupling {
            if ref_text(&c.a) > ref_text(&c.b) {
                std::mem::swap(&mut c.a, &mut c.b);
            }
        }
        doc
    }

    /// Every tunable value with its qualified name.
    pub fn params(&self) -> Vec<(String, f64)> {
        let mut out = Vec::new();
        for m in &self.systems {
            match m {
                Model::Mechanical(net) => {
                    for (n, v) in &net.masses {
                        out.push((format!("{}.{n}", net.name), *v));
                    }
                    for e in net.springs.iter().chain(&net.dampers) {
                        out.push((format!("{}.{}", net.name, e.name), e.value));
                    }
                }
                Model::Electrical(c) => {
                    for (p, v) in [("R", c.r), ("L", c.l), ("C", c.c)] {
                        out.push((format!("{}.{p}", c.name), v));
                    }
                }
            }
        }
        if let Some(c) = &self.coupling {
            out.push(("couple".to_string(), c.value));
        }
        out
    }

    /// Resolves a parameter name: qualified `system.element`, a bare element
    /// name when unique, `couple`, or the coupling's usual symbol (`k`, `d`,
    /// `C`, `L`) when no element claims it.
    pub fn resolve_param(&self, name: &str) -> Result<String> {
        let all = self.params();
        if all.iter().any(|(n, _)| n == name) {
            return Ok(name.to_string());
        }
        let bare: Vec<&String> = all
            .iter()
            .map(|(n, _)| n)
            .filter(|n| n.rsplit_once('.').is_some_and(|(_, e)| e == name))
            .collect();
        match bare.len() {
            1 => return Ok(bare[0].clone()),
            0 => {}
            _ => {
                return Err(Error::Elaborate(format!(
                    "parameter '{name}' is ambiguous: {}",
                    bare.iter().map(|s| s.as_str()).collect::<Vec<_>>().join(", ")
                )))
            }
        }
        if let Some(c) = &self.coupling {
            let symbol = match c.kind {
                CouplingKind::Spring => "k",
                CouplingKind::Damper => "d",
                CouplingKind::Capacitor => "C",
                CouplingKind::Inductor => "L",
            };
            if name == symbol {
                return Ok("couple".to_string());
            }
        }
        Err(Error::Elaborate(format!("unknown parameter '{name}'")))
    }

    pub fn set_param(&mut self, name: &str, value: f64) -> Result<()> {
        let q = self.resolve_param(name)?;
        if q == "couple" {
            self.coupling.as_mut().expect("resolved").value = value;
            return Ok(());
        }
        let (sys, el) = q.split_once('.').expect("qualified");
        for m in &mut self.systems {
            match m {
                Model::Mechanical(net) if net.name == sys => {
                    if let Some(mass) = net.masses.iter_mut().find(|(n, _)| n == el) {
                        mass.1 = value;
                    }
                    for e in net.springs.iter_mut().chain(net.dampers.iter_mut()) {
                        if e.name == el {
                            e.value = value;
                        }
                    }
                }
                Model::Electrical(c) if c.name == sys => match el {
                    "R" => c.r = value,
                    "L" => c.l = value,
                    _ => c.c = value,
                },
                _ => {}
            }
        }
        Ok(())
    }
}

/// Result of elaborating a document.
#[derive(Clone, Debug, PartialEq)]
pub enum Elaborated {
    Pair(Box<CoupledPair>),
    Single {
        model: Model,
        io: Io,
        transfer: TransferMatrix,
    },
}

impl Elaborated {
    /// The transfer function selected by the input/output lines.
    pub fn transfer(&self) -> &TransferMatrix {
        match self {
            Elaborated::Pair(p) => &p.interconnection.plant,
            Elaborated::Single { transfer, .. } => transfer,
        }
    }

    pub fn pair(&self) -> Option<&CoupledPair> {
        match self {
            Elaborated::Pair(p) => Some(p),
            Elaborated::Single { .. } => None,
        }
    }

    pub fn to_document(&self) -> NetlistDocument {
        match self {
            Elaborated::Pair(p) => to_document(p),
            Elaborated::Single { model, io, .. } => NetlistDocument {
                systems: vec![model.clone()],
                coupling: None,
                io: io.clone(),
            },
        }
    }
}

/// Netlist form of a coupled pair, plant first.
pub fn to_document(p: &CoupledPair) -> NetlistDocument {
    let mut systems = vec![p.plant_model.clone()];
    systems.extend(p.controller_model.clone());
    NetlistDocument {
        systems,
        coupling: Some(CoupleDecl {
            kind: p.coupling.kind,
            value: p.coupling.value,
            a: Some(p.coupling.plant_ref.clone()),
            b: p.coupling.controller_ref.clone(),
        }),
        io: p.io.clone(),
    }
}

pub fn parse_and_elaborate(text: &str) -> Result<Elaborated> {
    elaborate(&parse(text)?)
}

pub fn elaborate(doc: &NetlistDocument) -> Result<Elaborated> {
    for m in &doc.systems {
        if let Model::Mechanical(net) = m {
            net.validate()?;
        }
    }
    let plant_name = &doc.io.input.1.system;
    let plant = doc
        .system(plant_name)
        .ok_or_else(|| Error::Elaborate(format!("unknown system {plant_name}")))?;
    let Some(decl) = &doc.coupling else {
        if doc.systems.len() != 1 {
            return Err(Error::Elaborate(format!(
                "without a coupling the netlist must hold one system, found {}",
                doc.systems.len()
            )));
        }
        return Ok(Elaborated::Single {
            model: plant.clone(),
            io: doc.io.clone(),
            transfer: model_transfer(plant, &doc.io)?,
        });
    };

    let on_plant = |r: &Option<Ref>| r.as_ref().is_some_and(|r| &r.system == plant_name);
    let (plant_ref, other) = match (on_plant(&decl.a), on_plant(&decl.b)) {
        (true, false) => (decl.a.clone().unwrap(), decl.b.clone()),
        (false, true) => (decl.b.clone().unwrap(), decl.a.clone()),
        (true, true) => return Err(Error::Elaborate("coupling joins the plant to itself".into())),
        (false, false) => {
            return Err(Error::Elaborate(format!("coupling does not touch the plant {plant_name}")))
        }
    };
    let controller = match &other {
        Some(r) => Some(
            doc.system(&r.system)
                .ok_or_else(|| Error::Elaborate(format!("unknown system {}", r.system)))?
                .clone(),
        ),
        None => None,
    };
    let expected = 1 + usize::from(controller.is_some());
    if doc.systems.len() != expected {
        return Err(Error::Elaborate(format!(
            "a coupled netlist must hold exactly {expected} system(s), found {}",
            doc.systems.len()
        )));
    }
    let coupling = Coupling {
        kind: decl.kind,
        value: decl.value,
        plant_ref,
        controller_ref: other,
    };
    let general = CoupledPair::assemble(plant.clone(), controller.clone(), coupling.clone(), doc.io.clone())?;
    let Some(closed) = closed_form(plant, controller.as_ref(), &coupling)? else {
        return Ok(Elaborated::Pair(Box::new(general)));
    };
    let pair = CoupledPair::package(
        plant.clone(),
        controller,
        coupling,
        doc.io.clone(),
        closed.plant().clone(),
        closed.controller().clone(),
    )?;
    Ok(Elaborated::Pair(Box::new(pair)))
}

/// `(mass, m, d, k)` for one mass tied only to ground.
fn single_mass(net: &MsdNetwork) -> Option<(f64, f64, Option<f64>)> {
    let [(mass, m)] = net.masses.as_slice() else {
        return None;
    };
    let grounded = |e: &crate::physical::MsdElement| {
        matches!(
            (&e.a, &e.b),
            (Endpoint::Mass(x), Endpoint::Ground) | (Endpoint::Ground, Endpoint::Mass(x)) if x == mass
        )
    };
    if net.springs.len() > 1 || net.dampers.len() > 1 {
        return None;
    }
    if !net.springs.iter().chain(&net.dampers).all(grounded) {
        return None;
    }
    let d = net.dampers.first().map_or(0.0, |e| e.value);
    let k = net.springs.first().map(|e| e.value);
    Some((*m, d, k))
}

/// Closed-form builder matching a single-mass plant and controller, when
/// the structure allows one.
fn closed_form(plant: &Model, controller: Option<&Model>, c: &Coupling) -> Result<Option<CoupledPair>> {
    let Model::Mechanical(p) = plant else {
        return Ok(None);
    };
    let Some((m1, d1, k1)) = single_mass(p) else {
        return Ok(None);
    };
    let ctrl = match controller {
        None => None,
        Some(Model::Mechanical(n)) => match single_mass(n) {
            Some(v) => Some(v),
            None => return Ok(None),
        },
        Some(_) => return Ok(None),
    };
    let pair = match (c.kind, ctrl, k1) {
        (CouplingKind::Spring, None, _) => build_fig5(m1, d1, k1.unwrap_or(0.0), c.value)?,
        (CouplingKind::Spring, Some((m2, d2, k2)), Some(k1)) => {
            build_fig6(m1, d1, k1, m2, d2, k2.unwrap_or(0.0), c.value)?
        }
        (CouplingKind::Spring, Some((m2, d2, k2)), None) if d1 >= 0.0 => {
            build_fig7(m1, d1, m2, d2, k2.unwrap_or(0.0), c.value)?
        }
        (CouplingKind::Damper, None, _) => build_damped(m1, d1, k1.unwrap_or(0.0), c.value)?,
        (CouplingKind::Damper, Some((m2, d2, k2)), _) => {
            build_fig4(m1, d1, k1.unwrap_or(0.0), m2, d2, k2.unwrap_or(0.0), c.value)?
        }
        _ => return Ok(None),
    };
    Ok(Some(pair))
}

#[cfg(test)]
mod tests;
