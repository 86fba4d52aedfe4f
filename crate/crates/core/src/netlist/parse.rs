//! Line-oriented parser with positioned diagnostics.

use std::collections::HashSet;

use thiserror::Error;

use crate::physical::{
    CouplingKind, Endpoint, InputKind, Io, Model, MsdElement, MsdNetwork, OutputKind, Ref, RlcNetwork, RlcTopology,
};

use super::{CoupleDecl, NetlistDocument};

/// Line and column are 1-based; the column counts characters.
#[derive(Debug, Error, Clone, PartialEq)]
#[error("{line}:{col}: {message}{}", expected_suffix(.expected))]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
    pub expected: Vec<String>,
}

fn expected_suffix(e: &[String]) -> String {
    if e.is_empty() {
        String::new()
    } else {
        format!(" (expected {})", e.join(" | "))
    }
}

#[derive(Clone, Debug)]
struct Token<'a> {
    text: &'a str,
    line: usize,
    col: usize,
}

struct Line<'a> {
    number: usize,
    /// Column just past the last token, for "expected more" errors.
    end_col: usize,
    tokens: Vec<Token<'a>>,
}

fn tokenize(text: &str) -> Vec<Line<'_>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let content = raw.find('#').map_or(raw, |p| &raw[..p]);
        let mut tokens = Vec::new();
        // (column, byte offset) of the token being read
        let mut start: Option<(usize, usize)> = None;
        let mut end_col = 1;
        for (col, (byte, ch)) in content.char_indices().enumerate() {
            if ch.is_whitespace() {
                if let Some((c, b)) = start.take() {
                    tokens.push(Token {
                        text: &content[b..byte],
                        line: i + 1,
                        col: c + 1,
                    });
                }
            } else {
                start.get_or_insert((col, byte));
                end_col = col + 2;
            }
        }
        if let Some((c, b)) = start {
            tokens.push(Token {
                text: &content[b..],
                line: i + 1,
                col: c + 1,
            });
        }
        out.push(Line {
            number: i + 1,
            end_col,
            tokens,
        });
    }
    out
}

fn is_ident(s: &str) -> bool {
    let mut c = s.chars();
    matches!(c.next(), Some(ch) if ch.is_ascii_alphabetic() || ch == '_')
        && c.all(|ch| ch.is_ascii_alphanumeric() || ch == '_')
}

/// Decimal with optional sign, fraction and exponent.
fn parse_number(s: &str) -> Option<f64> {
    let b = s.as_bytes();
    let mut i = 0;
    if i < b.len() && (b[i] == b'+' || b[i] == b'-') {
        i += 1;
    }
    let int_start = i;
    while i < b.len() && b[i].is_ascii_digit() {
        i += 1;
    }
    let mut digits = i - int_start;
    if i < b.len() && b[i] == b'.' {
        i += 1;
        let f = i;
        while i < b.len() && b[i].is_ascii_digit() {
            i += 1;
        }
        digits += i - f;
    }
    if digits == 0 {
        return None;
    }
    if i < b.len() && (b[i] == b'e' || b[i] == b'E') {
        i += 1;
        if i < b.len() && (b[i] == b'+' || b[i] == b'-') {
            i += 1;
        }
        let e = i;
        while i < b.len() && b[i].is_ascii_digit() {
            i += 1;
        }
        if i == e {
            return None;
        }
    }
    if i != b.len() {
        return None;
    }
    s.parse().ok().filter(|v: &f64| v.is_finite())
}

fn err(line: usize, col: usize, message: impl Into<String>, expected: &[&str]) -> ParseError {
    ParseError {
        line,
        col,
        message: message.into(),
        expected: expected.iter().map(|s| s.to_string()).collect(),
    }
}

struct Cursor<'l, 'a> {
    line: &'l Line<'a>,
    pos: usize,
}

impl<'l, 'a> Cursor<'l, 'a> {
    fn new(line: &'l Line<'a>) -> Self {
        Self { line, pos: 0 }
    }

    fn next(&mut self, what: &[&str]) -> Result<Token<'a>, ParseError> {
        match self.line.tokens.get(self.pos) {
            Some(t) => {
                self.pos += 1;
                Ok(t.clone())
            }
            None => Err(err(self.line.number, self.line.end_col, "unexpected end of line", what)),
        }
    }

    fn keyword(&mut self, options: &[&str], message: &str) -> Result<(Token<'a>, usize), ParseError> {
        let t = self.next(options)?;
        match options.iter().position(|o| *o == t.text) {
            Some(i) => Ok((t, i)),
            None => Err(err(t.line, t.col, format!("{message} '{}'", t.text), options)),
        }
    }

    fn ident(&mut self) -> Result<Token<'a>, ParseError> {
        let t = self.next(&["IDENT"])?;
        if !is_ident(t.text) || t.text == "ground" {
            return Err(err(t.line, t.col, format!("invalid name '{}'", t.text), &["IDENT"]));
        }
        Ok(t)
    }

    fn number(&mut self) -> Result<f64, ParseError> {
        let t = self.next(&["NUM"])?;
        parse_number(t.text).ok_or_else(|| err(t.line, t.col, format!("invalid number '{}'", t.text), &["NUM"]))
    }

    fn node(&mut self) -> Result<Token<'a>, ParseError> {
        let t = self.next(&["IDENT", "ground"])?;
        if t.text != "ground" && !is_ident(t.text) {
            return Err(err(t.line, t.col, format!("invalid node '{}'", t.text), &["IDENT", "ground"]));
        }
        Ok(t)
    }

    fn finish(&self) -> Result<(), ParseError> {
        match self.line.tokens.get(self.pos) {
            Some(t) => Err(err(t.line, t.col, format!("unexpected token '{}'", t.text), &["end of line"])),
            None => Ok(()),
        }
    }
}

/// A reference token together with where it appeared.
struct RefTok<'a> {
    tok: Token<'a>,
    r: Option<Ref>,
}

fn parse_ref<'a>(c: &mut Cursor<'_, 'a>, allow_ground: bool) -> Result<RefTok<'a>, ParseError> {
    let expected: &[&str] = if allow_ground {
        &["IDENT.IDENT", "IDENT", "ground"]
    } else {
        &["IDENT.IDENT", "IDENT"]
    };
    let t = c.next(expected)?;
    if allow_ground && t.text == "ground" {
        return Ok(RefTok { tok: t, r: None });
    }
    let bad = || err(t.line, t.col, format!("invalid reference '{}'", t.text), expected);
    let r = match t.text.split_once('.') {
        Some((s, e)) if is_ident(s) && is_ident(e) => Ref::mass(s, e),
        Some(_) => return Err(bad()),
        None if is_ident(t.text) && t.text != "ground" => Ref::circuit(t.text),
        None => return Err(bad()),
    };
    Ok(RefTok { tok: t, r: Some(r) })
}

enum Stage {
    Blocks,
    AfterCouple,
    AfterInput,
    Done,
}

pub fn parse(text: &str) -> Result<NetlistDocument, ParseError> {
    let lines = tokenize(text);
    let mut systems: Vec<Model> = Vec::new();
    let mut system_names: HashSet<String> = HashSet::new();
    let mut coupling: Option<(CoupleDecl, [RefTok; 2])> = None;
    let mut input: Option<(InputKind, RefTok)> = None;
    let mut output: Option<(OutputKind, RefTok)> = None;
    let mut stage = Stage::Blocks;

    let mut idx = 0;
    while idx < lines.len() {
        let line = &lines[idx];
        idx += 1;
        if line.tokens.is_empty() {
            continue;
        }
        let mut c = Cursor::new(line);
        let top: &[&str] = match stage {
            Stage::Blocks => &["system", "circuit", "couple", "input"],
            Stage::AfterCouple => &["input"],
            Stage::AfterInput => &["output"],
            Stage::Done => &[],
        };
        if top.is_empty() {
            let t = &line.tokens[0];
            return Err(err(t.line, t.col, format!("unexpected '{}' after the output declaration", t.text), &["end of file"]));
        }
        let (kw, _) = c.keyword(top, "unexpected")?;
        match kw.text {
            "system" => {
                let name = c.ident()?;
                c.finish()?;
                if !system_names.insert(name.text.to_string()) {
                    return Err(err(name.line, name.col, format!("duplicate system name '{}'", name.text), &[]));
                }
                let (net, next) = parse_mech_block(&lines, idx, name.text, &name)?;
                idx = next;
                systems.push(Model::Mechanical(net));
            }
            "circuit" => {
                let (_, which) = c.keyword(&["parallel_rlc", "series_rlc"], "unknown circuit template")?;
                let topology = [RlcTopology::ParallelRlc, RlcTopology::SeriesRlc][which];
                let name = c.ident()?;
                let r = c.number()?;
                let l = c.number()?;
                let cap = c.number()?;
                c.finish()?;
                if !system_names.insert(name.text.to_string()) {
                    return Err(err(name.line, name.col, format!("duplicate system name '{}'", name.text), &[]));
                }
                systems.push(Model::Electrical(RlcNetwork::new(name.text, topology, r, l, cap)));
            }
            "couple" => {
                let (_, which) = c.keyword(
                    &["spring", "damper", "capacitor", "inductor"],
                    "unknown coupling element",
                )?;
                let kind = [
                    CouplingKind::Spring,
                    CouplingKind::Damper,
                    CouplingKind::Capacitor,
                    CouplingKind::Inductor,
                ][which];
                let value = c.number()?;
                let a = parse_ref(&mut c, true)?;
                let b = parse_ref(&mut c, true)?;
                c.finish()?;
                if a.r.is_none() && b.r.is_none() {
                    return Err(err(a.tok.line, a.tok.col, "coupling must reference a system", &["IDENT.IDENT", "IDENT"]));
                }
                let decl = CoupleDecl {
                    kind,
                    value,
                    a: a.r.clone(),
                    b: b.r.clone(),
                };
                coupling = Some((decl, [a, b]));
                stage = Stage::AfterCouple;
            }
            "input" => {
                let (_, which) = c.keyword(&["force", "charge", "flux"], "unknown input kind")?;
                let kind = [InputKind::Force, InputKind::Charge, InputKind::Flux][which];
                let r = parse_ref(&mut c, false)?;
                c.finish()?;
                input = Some((kind, r));
                stage = Stage::AfterInput;
            }
            "output" => {
                let (_, which) = c.keyword(&["position", "velocity", "voltage", "current"], "unknown output kind")?;
                let kind = [
                    OutputKind::Position,
                    OutputKind::Velocity,
                    OutputKind::Voltage,
                    OutputKind::Current,
                ][which];
                let r = parse_ref(&mut c, false)?;
                c.finish()?;
                output = Some((kind, r));
                stage = Stage::Done;
            }
            _ => unreachable!(),
        }
    }

    let eof_line = lines.len().max(1);
    let (Some((ik, ir)), Some((ok, or))) = (input, output) else {
        let what: &[&str] = if matches!(stage, Stage::AfterInput) { &["output"] } else { &["input"] };
        return Err(err(eof_line, 1, "missing input/output declaration at end of file", what));
    };

    for rt in coupling.iter().flat_map(|(_, refs)| refs.iter()).chain([&ir, &or]) {
        if let Some(r) = &rt.r {
            resolve(&systems, r, &rt.tok)?;
        }
    }

    Ok(NetlistDocument {
        systems,
        coupling: coupling.map(|(d, _)| d),
        io: Io::new(ik, ir.r.expect("io refs are never ground"), ok, or.r.expect("io refs are never ground")),
    })
}

fn resolve(systems: &[Model], r: &Ref, at: &Token) -> Result<(), ParseError> {
    let Some(model) = systems.iter().find(|m| m.name() == r.system) else {
        return Err(err(at.line, at.col, format!("unknown system '{}'", r.system), &[]));
    };
    match (model, &r.element) {
        (Model::Mechanical(net), Some(e)) if net.index_of(e).is_some() => Ok(()),
        (Model::Mechanical(_), Some(e)) => Err(err(at.line, at.col, format!("unknown mass '{e}' in system '{}'", r.system), &[])),
        (Model::Mechanical(_), None) => Err(err(
            at.line,
            at.col,
            format!("reference to system '{}' must name a mass", r.system),
            &["IDENT.IDENT"],
        )),
        (Model::Electrical(_), None) => Ok(()),
        (Model::Electrical(_), Some(_)) => Err(err(
            at.line,
            at.col,
            format!("circuit '{}' has no named elements", r.system),
            &["IDENT"],
        )),
    }
}

fn parse_mech_block<'a>(
    lines: &[Line<'a>],
    mut idx: usize,
    name: &str,
    opened: &Token,
) -> Result<(MsdNetwork, usize), ParseError> {
    let mut net = MsdNetwork::new(name);
    let mut names: HashSet<String> = HashSet::new();
    let mut pending: Vec<Token<'a>> = Vec::new();
    while idx < lines.len() {
        let line = &lines[idx];
        idx += 1;
        if line.tokens.is_empty() {
            continue;
        }
        let mut c = Cursor::new(line);
        let (_, which) = c.keyword(&["mass", "spring", "damper", "end"], "unknown element kind")?;
        if which == 3 {
            c.finish()?;
            for t in pending {
                if net.index_of(t.text).is_none() {
                    return Err(err(t.line, t.col, format!("unknown mass '{}' in system '{name}'", t.text), &[]));
                }
            }
            return Ok((net, idx));
        }
        let el = c.ident()?;
        let value = c.number()?;
        if !names.insert(el.text.to_string()) {
            return Err(err(el.line, el.col, format!("duplicate element name '{}'", el.text), &[]));
        }
        if which == 0 {
            c.finish()?;
            net.masses.push((el.text.to_string(), value));
            continue;
        }
        let a = c.node()?;
        let b = c.node()?;
        c.finish()?;
        let end = |t: &Token<'a>| {
            if t.text == "ground" {
                Endpoint::Ground
            } else {
                Endpoint::mass(t.text)
            }
        };
        let e = MsdElement::new(el.text, value, end(&a), end(&b));
        for t in [a, b] {
            if t.text != "ground" {
                pending.push(t);
            }
        }
        if which == 1 {
            net.springs.push(e);
        } else {
            net.dampers.push(e);
        }
    }
    Err(err(opened.line, opened.col, format!("system '{name}' is never closed"), &["end"]))
}
