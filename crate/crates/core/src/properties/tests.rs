use super::*;

fn tf(n: &[f64], d: &[f64]) -> TransferMatrix {
    TransferMatrix::siso(RationalFunction::from_coeffs(n, d).unwrap())
}

fn omega(r: &PropertyReport) -> f64 {
    r.witness.as_ref().and_then(Witness::frequency).unwrap()
}

#[test]
fn negative_constant_is_ni() {
    let r = check_ni(&tf(&[-1.0], &[1.0]), NiMode::Strict).unwrap();
    assert_eq!(r.verdict, Verdict::Pass);
    assert_eq!(r.margin(2), Some(0.0));
}

#[test]
fn undamped_mode_is_ni_with_half_residue() {
    let g = tf(&[1.0], &[1.0, 0.0, 1.0]);
    let r = check_ni(&g, NiMode::Strict).unwrap();
    assert_eq!(r.verdict, Verdict::Pass, "{r:?}");
    let k0 = r.margin(3).unwrap();
    assert!((k0 - 0.5).abs() < 1e-12);
    let s = check_sni(&g).unwrap();
    assert_eq!(s.verdict, Verdict::Fail);
    assert_eq!(s.failed_condition, Some(1));
}

#[test]
fn free_body_plant_needs_generalized_mode() {
    let g = tf(&[1.0], &[0.0, 1.0, 1.0]);
    let strict = check_ni(&g, NiMode::Strict).unwrap();
    assert_eq!(strict.verdict, Verdict::Fail);
    assert_eq!(strict.failed_condition, Some(1));
    let gen = check_ni(&g, NiMode::Generalized).unwrap();
    assert_eq!(gen.verdict, Verdict::Pass, "{gen:?}");
    assert_eq!(gen.property, Property::NiGeneralized);
}

#[test]
fn double_integrator_generalized() {
    let g = tf(&[1.0], &[0.0, 0.0, 1.0]);
    assert!(check_ni(&g, NiMode::Generalized).unwrap().passed());
    // -1/s^2 has a negative origin limit
    let r = check_ni(&tf(&[-1.0], &[0.0, 0.0, 1.0]), NiMode::Generalized).unwrap();
    assert_eq!(r.failed_condition, Some(4));
    // 1/s^3 is excluded outright
    let r = check_ni(&tf(&[1.0], &[0.0, 0.0, 0.0, 1.0]), NiMode::Generalized).unwrap();
    assert_eq!(r.verdict, Verdict::Fail);
}

#[test]
fn zero_system_is_ni() {
    let r = check_ni(&TransferMatrix::siso(RationalFunction::zero()), NiMode::Strict).unwrap();
    assert_eq!(r.verdict, Verdict::Pass);
}

#[test]
fn damped_mass_is_sni() {
    let r = check_sni(&tf(&[1.0], &[1.0, 1.0, 1.0])).unwrap();
    assert_eq!(r.verdict, Verdict::Pass);
    assert!(r.margin(2).unwrap() > 0.0);
    let r = check_sni(&tf(&[0.0, 0.0, -1.0], &[1.0, 1.0, 1.0])).unwrap();
    assert_eq!(r.verdict, Verdict::Pass, "{r:?}");
}

#[test]
fn velocity_output_is_pr_but_not_wspr() {
    let g = tf(&[0.0, 1.0], &[1.0, 1.0, 1.0]);
    assert_eq!(check_pr(&g).unwrap().verdict, Verdict::Pass);
    let w = check_wspr(&g).unwrap();
    assert_eq!(w.verdict, Verdict::Fail);
    assert_eq!(w.failed_condition, Some(2));
    assert_eq!(omega(&w), 0.0);
}

#[test]
fn integrator_is_pr() {
    let r = check_pr(&tf(&[1.0], &[0.0, 1.0])).unwrap();
    assert_eq!(r.verdict, Verdict::Pass);
    assert!((r.margin(3).unwrap() - 1.0).abs() < 1e-12);
    let r = check_pr(&tf(&[-1.0], &[0.0, 1.0])).unwrap();
    assert_eq!(r.failed_condition, Some(3));
}

#[test]
fn negative_gain_is_not_pr() {
    let r = check_pr(&tf(&[-1.0], &[1.0])).unwrap();
    assert_eq!(r.verdict, Verdict::Fail);
    assert_eq!(r.failed_condition, Some(2));
}

#[test]
fn improper_pr_uses_residue_at_infinity() {
    // s + 1
    assert!(check_pr(&tf(&[1.0, 1.0], &[1.0])).unwrap().passed());
    // -s
    let r = check_pr(&tf(&[0.0, -1.0], &[1.0])).unwrap();
    assert_eq!(r.failed_condition, Some(3));
    // s^3 is lossless but has a double pole at infinity
    let r = check_pr(&tf(&[0.0, 0.0, 0.0, 1.0], &[1.0])).unwrap();
    assert_eq!(r.witness, Some(Witness::PoleAtInfinity { order: 3 }));
}

#[test]
fn damper_coupled_controller_is_wspr() {
    let r = check_wspr(&tf(&[1.0, 1.0, 1.0], &[1.0, 2.0, 1.0])).unwrap();
    assert_eq!(r.verdict, Verdict::Pass);
    // without internal damping the zeros sit on the axis at w = 1
    let r = check_wspr(&tf(&[1.0, 0.0, 1.0], &[1.0, 1.0, 1.0])).unwrap();
    assert_eq!(r.verdict, Verdict::Fail);
    assert!((omega(&r) - 1.0).abs() < 1e-6);
}

#[test]
fn wspr_rejects_zero() {
    assert_eq!(
        check_wspr(&TransferMatrix::siso(RationalFunction::zero())),
        Err(Error::ZeroTransfer)
    );
}

#[test]
fn improper_and_nonsquare_are_errors() {
    assert!(check_ni(&tf(&[0.0, 1.0], &[1.0]), NiMode::Strict).is_err());
    let g = TransferMatrix::new(1, 2, vec![RationalFunction::constant(1.0); 2]).unwrap();
    assert!(check_sni(&g).is_err());
    assert!(check_pr(&g).is_err());
}

#[test]
fn repeated_axis_pole_fails_condition_three() {
    let r = check_ni(&tf(&[1.0], &[1.0, 0.0, 2.0, 0.0, 1.0]), NiMode::Strict).unwrap();
    assert_eq!(r.verdict, Verdict::Fail);
    assert_eq!(r.failed_condition, Some(3));
    match r.witness {
        Some(Witness::Pole { im, multiplicity, .. }) => {
            assert!((im - 1.0).abs() < 1e-12);
            assert_eq!(multiplicity, 2);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn positive_imaginary_part_is_located() {
    // -1/(s^2+s+1) has Im > 0 everywhere
    let r = check_ni(&tf(&[-1.0], &[1.0, 1.0, 1.0]), NiMode::Strict).unwrap();
    assert_eq!(r.failed_condition, Some(2));
    let w = omega(&r);
    let v = RationalFunction::from_coeffs(&[-1.0], &[1.0, 1.0, 1.0])
        .unwrap()
        .eval(Complex64::new(0.0, w.max(1e-3)))
        .unwrap();
    assert!(v.im > 0.0);
}

#[test]
fn touch_is_recorded_with_zero_margin() {
    // Re G = (1 - w^2)^2 / |d|^2 vanishes at w = 1 without changing sign
    let r = check_pr(&tf(&[1.0, 0.0, 1.0], &[1.0, 1.0, 1.0])).unwrap();
    assert_eq!(r.verdict, Verdict::Pass);
    assert_eq!(r.touch_frequencies.len(), 1);
    assert!((r.touch_frequencies[0] - 1.0).abs() < 1e-6);
}

#[test]
fn g1_g2_extraction() {
    let p = compute_g1g2(&tf(&[1.0], &[0.0, 1.0, 1.0])).unwrap();
    assert_eq!((p.g2[(0, 0)], p.g1[(0, 0)]), (0.0, 1.0));
    let p = compute_g1g2(&tf(&[1.0], &[0.0, 0.0, 1.0])).unwrap();
    assert_eq!((p.g2[(0, 0)], p.g1[(0, 0)]), (1.0, 0.0));
    let p = compute_g1g2(&tf(&[1.0], &[1.0, 1.0, 1.0])).unwrap();
    assert_eq!((p.g2[(0, 0)], p.g1[(0, 0)]), (0.0, 0.0));
    // 1/(s^2 (s+1)) = 1/s^2 - 1/s + ...
    let p = compute_g1g2(&tf(&[1.0], &[0.0, 0.0, 1.0, 1.0])).unwrap();
    assert_eq!((p.g2[(0, 0)], p.g1[(0, 0)]), (1.0, -1.0));
    assert!(matches!(
        compute_g1g2(&tf(&[1.0], &[0.0, 0.0, 0.0, 1.0])),
        Err(Error::OriginPoleOrder { order: 3, .. })
    ));
}

#[test]
fn mimo_grid_verdicts() {
    let diag = TransferMatrix::from_rows(vec![
        vec![
            RationalFunction::from_coeffs(&[1.0], &[1.0, 1.0, 1.0]).unwrap(),
            RationalFunction::zero(),
        ],
        vec![
            RationalFunction::zero(),
            RationalFunction::from_coeffs(&[2.0], &[3.0, 1.0, 1.0]).unwrap(),
        ],
    ])
    .unwrap();
    let cfg = GridConfig {
        points: 300,
        ..GridConfig::default()
    };
    let r = check_sni_with(&diag, &cfg).unwrap();
    assert_eq!(r.verdict, Verdict::NumericallyVerified);
    assert!(check_ni_with(&diag, NiMode::Strict, &cfg).unwrap().passed());

    let flipped = diag.neg();
    let r = check_ni_with(&flipped, NiMode::Strict, &cfg).unwrap();
    assert_eq!(r.verdict, Verdict::Fail);
    assert_eq!(r.failed_condition, Some(2));
}

#[test]
fn report_serializes_with_stable_keys() {
    let r = check_wspr(&tf(&[0.0, 1.0], &[1.0, 1.0, 1.0])).unwrap();
    let v = serde_json::to_value(&r).unwrap();
    for key in ["property", "verdict", "failed_condition", "witness", "margins"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["property"], "WSPR");
    assert_eq!(v["verdict"], "fail");
    assert_eq!(v["witness"]["kind"], "frequency");
}
