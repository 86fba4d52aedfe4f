use super::*;
use crate::interconnect::{LoopSign, Theorem};
use crate::lticore::RationalFunction;
use crate::physical::{build_fig6, build_fig8, OutputKind, RlcTopology};
use crate::properties::{check_pr, Verdict};

const FIG6: &str = "\
system plant
  mass m1 1.0
  spring k1 1.0 m1 ground
  damper d1 1.0 m1 ground
end
system controller
  mass m2 1.0
  spring k2 1.0 m2 ground
  damper d2 1.0 m2 ground
end
couple spring 1.0 plant.m1 controller.m2
input force plant.m1
output position plant.m1
";

fn parse_err(text: &str) -> ParseError {
    parse(text).unwrap_err()
}

#[test]
fn grammar_example() {
    let doc = parse(FIG6).unwrap();
    assert_eq!(doc.systems.len(), 2);
    let c = doc.coupling.as_ref().unwrap();
    assert_eq!(c.kind, CouplingKind::Spring);
    assert_eq!(c.value, 1.0);
    assert_eq!(c.a, Some(Ref::mass("plant", "m1")));
}

#[test]
fn unknown_mass_is_named() {
    let text = "system p\n  mass m1 1.0\n  spring k1 1.0 m1 m9\nend\ninput force p.m1\noutput position p.m1\n";
    let e = parse_err(text);
    assert!(e.message.contains("m9"), "{e}");
    assert_eq!((e.line, e.col), (3, 20));
}

#[test]
fn circuit_line() {
    let doc = parse("circuit parallel_rlc plant 1 1 1\ninput charge plant\noutput voltage plant\n").unwrap();
    match &doc.systems[0] {
        Model::Electrical(c) => {
            assert_eq!(c.topology, RlcTopology::ParallelRlc);
            assert_eq!((c.r, c.l, c.c), (1.0, 1.0, 1.0));
        }
        m => panic!("{m:?}"),
    }
}

#[test]
fn diagnostics_carry_positions() {
    let cases: &[(&str, (usize, usize), &str)] = &[
        ("system p\n  mas m1 1\nend\n", (2, 3), "unknown element kind"),
        ("system p\n  mass m1\nend\n", (2, 10), "end of line"),
        ("system p\n  mass m1 x1\nend\n", (2, 11), "invalid number"),
        ("system p\n  mass m1 1\n  mass m1 2\nend\n", (3, 8), "duplicate element"),
        ("system p\n  mass m1 1\nend\nsystem p\nend\n", (4, 8), "duplicate system"),
        ("system p\n  mass m1 1\n", (1, 8), "never closed"),
        ("circuit triangle p 1 1 1\n", (1, 9), "unknown circuit"),
        ("system p\n  mass m1 1\nend\ncouple rod 1 p.m1 ground\n", (4, 8), "unknown coupling"),
        ("system p\n  mass m1 1\nend\ninput force p.m1\n", (4, 1), "missing"),
        ("system p\n  mass m1 1 extra\nend\n", (2, 13), "unexpected token"),
        ("system p\n  mass m1 1\nend\ninput force p.m1\noutput position p.m1\nmass x 1\n", (6, 1), "after the output"),
        ("system p\n  mass m1 1\nend\ninput force q.m1\noutput position p.m1\n", (4, 13), "unknown system"),
        ("system p\n  mass m1 1\nend\ninput force p\noutput position p.m1\n", (4, 13), "must name a mass"),
    ];
    for (text, (line, col), msg) in cases {
        let e = parse_err(text);
        assert_eq!((e.line, e.col), (*line, *col), "{text:?}: {e}");
        assert!(e.to_string().contains(msg), "{text:?}: {e}");
        let n_lines = text.lines().count().max(1);
        assert!(e.line >= 1 && e.line <= n_lines);
    }
    let e = parse_err("system p\n  mas m1 1\nend\n");
    assert_eq!(e.expected, vec!["mass", "spring", "damper", "end"]);
}

#[test]
fn comments_and_blank_lines() {
    let text = format!("# header\n\n{}\n# trailer\n", FIG6.replace("end\n", "end # block\n\n"));
    assert_eq!(parse(&text).unwrap(), parse(FIG6).unwrap());
}

#[test]
fn fig6_netlist_matches_builder() {
    let e = parse_and_elaborate(FIG6).unwrap();
    let pair = e.pair().unwrap();
    let b = build_fig6(1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0).unwrap();
    assert_eq!(pair.interconnection, b.interconnection);
    assert_eq!(pair.route, Some(Theorem::T1));
}

#[test]
fn rlc_netlist_matches_builder() {
    let text = "circuit parallel_rlc plant 1 1 1\ncircuit parallel_rlc controller 1 1 1\n\
                couple capacitor 0.5 plant controller\ninput charge plant\noutput voltage plant\n";
    let e = parse_and_elaborate(text).unwrap();
    let b = build_fig8(1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 0.5).unwrap();
    assert_eq!(e.pair().unwrap().interconnection, b.interconnection);
}

#[test]
fn velocity_output_single_system() {
    let text = "system p\n  mass m1 1\n  spring k1 1 m1 ground\n  damper d1 1 m1 ground\nend\n\
                input force p.m1\noutput velocity p.m1\n";
    let e = parse_and_elaborate(text).unwrap();
    let g = e.transfer().as_siso().unwrap();
    assert_eq!(g, &RationalFunction::from_coeffs(&[0.0, 1.0], &[1.0, 1.0, 1.0]).unwrap());
    assert_eq!(check_pr(e.transfer()).unwrap().verdict, Verdict::Pass);
}

#[test]
fn free_body_plant() {
    let text = "system p\n  mass m1 1\n  damper d1 1 m1 ground\nend\ninput force p.m1\noutput position p.m1\n";
    let e = parse_and_elaborate(text).unwrap();
    assert_eq!(
        e.transfer().as_siso().unwrap(),
        &RationalFunction::from_coeffs(&[1.0], &[0.0, 1.0, 1.0]).unwrap()
    );
}

#[test]
fn elaboration_errors() {
    // capacitor between masses
    let e = parse_and_elaborate(&FIG6.replace("couple spring", "couple capacitor")).unwrap_err();
    assert!(e.to_string().contains("capacitor"), "{e}");
    // io kind against the domain
    let e = parse_and_elaborate(&FIG6.replace("output position", "output voltage")).unwrap_err();
    assert!(e.to_string().contains("voltage"), "{e}");
    // a third system
    let extra = FIG6.replace("couple", "system spare\n  mass s 1\nend\ncouple");
    assert!(parse_and_elaborate(&extra).is_err());
    // nonpositive mass
    assert!(parse_and_elaborate(&FIG6.replace("mass m2 1.0", "mass m2 0")).is_err());
}

#[test]
fn round_trip() {
    let doc = parse(FIG6).unwrap();
    let e = elaborate(&doc).unwrap();
    let text = e.to_document().to_string();
    assert_eq!(parse(&text).unwrap().canonical(), doc.canonical());
}

#[test]
fn deterministic() {
    let a = parse_and_elaborate(FIG6).unwrap();
    let b = parse_and_elaborate(FIG6).unwrap();
    assert_eq!(a, b);
}

#[test]
fn parameters() {
    let mut doc = parse(FIG6).unwrap();
    assert_eq!(doc.resolve_param("k").unwrap(), "couple");
    assert_eq!(doc.resolve_param("k2").unwrap(), "controller.k2");
    assert_eq!(doc.resolve_param("plant.m1").unwrap(), "plant.m1");
    assert!(doc.resolve_param("zz").is_err());
    doc.set_param("k", -0.4).unwrap();
    doc.set_param("d2", 2.0).unwrap();
    let e = elaborate(&doc).unwrap();
    let b = build_fig6(1.0, 1.0, 1.0, 1.0, 2.0, 1.0, -0.4).unwrap();
    assert_eq!(e.pair().unwrap().interconnection, b.interconnection);
    // k + k2 < 0 is rejected by the builder
    doc.set_param("k", -1.5).unwrap();
    assert!(elaborate(&doc).is_err());
}

#[test]
fn general_path_for_larger_controllers() {
    let text = "\
system plant
  mass m1 1
  spring k1 1 m1 ground
  damper d1 0.5 m1 ground
end
system controller
  mass m2 1
  mass m3 0.5
  spring k2 1 m2 ground
  spring k23 0.8 m2 m3
  damper d2 0.4 m2 ground
end
couple spring 0.7 plant.m1 controller.m2
input force plant.m1
output position plant.m1
";
    let e = parse_and_elaborate(text).unwrap();
    let p = e.pair().unwrap();
    assert_eq!(p.interconnection.sign, LoopSign::Positive);
    assert_eq!(p.controller().den().degree(), Some(4));
    assert_eq!(p.io.output.0, OutputKind::Position);
}
