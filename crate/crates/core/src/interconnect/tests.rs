use super::*;
use crate::lticore::{eigenvalues, RationalFunction};
use num_complex::Complex64;

fn tf(n: &[f64], d: &[f64]) -> TransferMatrix {
    TransferMatrix::siso(RationalFunction::from_coeffs(n, d).unwrap())
}

fn fig6_unit() -> Interconnection {
    Interconnection::positive(
        tf(&[1.0], &[1.0, 1.0, 1.0]),
        tf(&[-1.0, -1.0, -1.0], &[2.0, 1.0, 1.0]),
    )
    .unwrap()
}

fn opts() -> CertifyOptions {
    CertifyOptions::default()
}

fn sorted(mut e: Vec<Complex64>) -> Vec<Complex64> {
    e.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    e
}

#[test]
fn fig6_loop_has_four_stable_states() {
    let sys = close_loop(&fig6_unit()).unwrap();
    assert_eq!(sys.n_states(), 4);
    let r = internal_stability(&sys).unwrap();
    assert_eq!(r.verdict, Stability::Stable);
    assert!(r.max_re_eig.unwrap() < 0.0);
}

#[test]
fn damper_feedback_doubles_damping() {
    let ic = Interconnection::negative(tf(&[0.0, 1.0], &[1.0, 1.0, 1.0]), tf(&[1.0], &[1.0])).unwrap();
    let sys = close_loop(&ic).unwrap();
    assert_eq!(sys.n_states(), 2);
    // s^2 + 2 s + 1
    let e = sys.eigenvalues().unwrap();
    for z in e {
        assert!((z.re + 1.0).abs() < 1e-6 && z.im.abs() < 1e-6, "{z}");
    }
    assert!((sys.a.trace() + 2.0).abs() < 1e-12);
    assert!((sys.a.determinant() - 1.0).abs() < 1e-12);
}

#[test]
fn zero_controller_keeps_open_loop_modes() {
    let plant = tf(&[1.0, 2.0], &[3.0, 1.0, 4.0, 1.0]);
    let open = sorted(crate::lticore::StateSpace::from_transfer(&plant).unwrap().eigenvalues().unwrap());
    let ic = Interconnection::positive(plant, TransferMatrix::siso(RationalFunction::zero())).unwrap();
    let closed = sorted(close_loop(&ic).unwrap().eigenvalues().unwrap());
    assert_eq!(open.len(), closed.len());
    for (a, b) in open.iter().zip(&closed) {
        assert!((a - b).norm() < 1e-12);
    }
}

#[test]
fn closed_loop_transfer_matches_algebra() {
    // y1 / w1 = G / (1 - G K) for the positive loop
    let ic = fig6_unit();
    let sys = close_loop(&ic).unwrap();
    for &w in &[0.1, 1.0, 7.0] {
        let s = Complex64::new(0.0, w);
        let g = ic.plant.eval(s).unwrap()[(0, 0)];
        let k = ic.controller.eval(s).unwrap()[(0, 0)];
        let t = sys.eval(s).unwrap();
        let expect = g / (1.0 - g * k);
        assert!((t[(0, 0)] - expect).norm() < 1e-10 * (1.0 + expect.norm()));
        // y2 / w2 = K / (1 - K G)
        let expect = k / (1.0 - g * k);
        assert!((t[(1, 1)] - expect).norm() < 1e-10 * (1.0 + expect.norm()));
    }
}

#[test]
fn sign_coherence() {
    let plant = tf(&[0.0, 1.0], &[1.0, 1.0, 1.0]);
    let ctrl = tf(&[1.0, 1.0, 1.0], &[1.0, 2.0, 1.0]);
    let neg = close_loop(&Interconnection::negative(plant.clone(), ctrl.clone()).unwrap()).unwrap();
    let pos = close_loop(&Interconnection::positive(plant, ctrl.neg()).unwrap()).unwrap();
    assert_eq!(neg.a, pos.a);
}

#[test]
fn well_posedness() {
    let unit = || tf(&[1.0], &[1.0]);
    let w = well_posed(&Interconnection::positive(unit(), unit()).unwrap()).unwrap();
    assert!(!w.well_posed);
    assert!(matches!(
        close_loop(&Interconnection::positive(unit(), unit()).unwrap()),
        Err(Error::IllPosed { .. })
    ));
    let w = well_posed(&Interconnection::negative(unit(), unit()).unwrap()).unwrap();
    assert!(w.well_posed);
    assert!((w.margin - 2.0).abs() < 1e-15);

    // capacitive RLC pair: feedthroughs -1 and 1/3
    let ic = Interconnection::positive(
        tf(&[0.0, 0.0, -1.0], &[1.0, 1.0, 1.0]),
        tf(&[0.5, 0.5, 0.5], &[1.0, 1.0, 1.5]),
    )
    .unwrap();
    let w = well_posed(&ic).unwrap();
    assert!(w.well_posed);
    assert!((w.margin - 4.0 / 3.0).abs() < 1e-12);
}

#[test]
fn stability_bands() {
    use nalgebra::DMatrix;
    let ss = |a: DMatrix<f64>| {
        let n = a.nrows();
        crate::lticore::StateSpace::new(a, DMatrix::zeros(n, 0), DMatrix::zeros(0, n), DMatrix::zeros(0, 0))
            .unwrap()
    };
    let r = internal_stability(&ss(DMatrix::from_element(1, 1, -1.0))).unwrap();
    assert_eq!(r.verdict, Stability::Stable);
    let r = internal_stability(&ss(DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]))).unwrap();
    assert_eq!(r.verdict, Stability::Marginal);
    let r = internal_stability(&ss(DMatrix::from_element(1, 1, 0.5))).unwrap();
    assert_eq!(r.verdict, Stability::Unstable);
}

#[test]
fn t1_fig6_unit() {
    let r = certify_t1(&fig6_unit(), &opts()).unwrap();
    assert_eq!(r.verdict, CertVerdict::CertifiedStable, "{r:#?}");
    let c = r.condition.unwrap();
    assert!((c.value + 0.5).abs() < 1e-12);
    assert_eq!(r.oracle.unwrap().verdict, Some(Stability::Stable));
}

#[test]
fn t1_static_spring_boundary() {
    let at = |k: f64| {
        let ic = Interconnection::positive(tf(&[1.0], &[1.0, 1.0, 1.0]), tf(&[-k], &[1.0])).unwrap();
        certify_t1(&ic, &opts()).unwrap()
    };
    assert_eq!(at(0.5).verdict, CertVerdict::CertifiedStable);
    assert_eq!(at(-0.9).verdict, CertVerdict::CertifiedStable);
    assert_eq!(at(-1.0).verdict, CertVerdict::Marginal);
    let r = at(-1.2);
    assert_eq!(r.verdict, CertVerdict::CertifiedUnstable);
    assert_eq!(r.oracle.unwrap().verdict, Some(Stability::Unstable));
}

#[test]
fn t1_rejects_negative_sni_feedthrough() {
    let ic = Interconnection::positive(
        tf(&[0.0, 0.0, -1.0], &[1.0, 1.0, 1.0]),
        tf(&[0.5, 0.5, 0.5], &[1.0, 1.0, 1.5]),
    )
    .unwrap();
    let r = certify_t1(&ic, &opts()).unwrap();
    assert_eq!(r.verdict, CertVerdict::Inapplicable);
    let h = r.hypotheses.iter().find(|h| h.name == "Ḡ(∞)≥0").unwrap();
    assert!(!h.pass);
    assert_eq!(r.oracle.unwrap().verdict, Some(Stability::Stable));
}

#[test]
fn t1_needs_positive_loop() {
    let mut ic = fig6_unit();
    ic.sign = LoopSign::Negative;
    assert_eq!(certify_t1(&ic, &opts()).unwrap().verdict, CertVerdict::Inapplicable);
}

#[test]
fn t2_cases() {
    let plant = tf(&[0.0, 1.0], &[1.0, 1.0, 1.0]);
    let ic = Interconnection::negative(plant.clone(), tf(&[1.0, 1.0, 1.0], &[1.0, 2.0, 1.0])).unwrap();
    let r = certify_t2(&ic, &opts()).unwrap();
    assert_eq!(r.verdict, CertVerdict::CertifiedStable);
    assert_eq!(r.oracle.unwrap().verdict, Some(Stability::Stable));

    let ic = Interconnection::negative(plant, tf(&[1.0, 0.0, 1.0], &[1.0, 1.0, 1.0])).unwrap();
    assert_eq!(certify_t2(&ic, &opts()).unwrap().verdict, CertVerdict::Inapplicable);

    let ic = Interconnection::negative(tf(&[1.0], &[0.0, 1.0]), tf(&[1.0], &[1.0])).unwrap();
    assert_eq!(certify_t2(&ic, &opts()).unwrap().verdict, CertVerdict::CertifiedStable);
}

#[test]
fn t3_free_body_plant() {
    let plant = tf(&[1.0], &[0.0, 1.0, 1.0]);
    let ic = Interconnection::positive(plant.clone(), tf(&[-1.0, -1.0, -1.0], &[2.0, 1.0, 1.0])).unwrap();
    let r = certify_t3(&ic, &opts()).unwrap();
    assert_eq!(r.verdict, CertVerdict::CertifiedStable, "{r:#?}");
    assert!((r.condition.as_ref().unwrap().value + 0.5).abs() < 1e-12);
    assert_eq!(r.side, Side::Plant);

    // a negative internal spring makes Gbar(0) = +1/2 while keeping it SNI
    let ic = Interconnection::positive(plant.clone(), tf(&[1.0 / 3.0, -1.0, -1.0], &[2.0 / 3.0, 1.0, 1.0])).unwrap();
    let r = certify_t3(&ic, &opts()).unwrap();
    assert_eq!(r.verdict, CertVerdict::CertifiedUnstable, "{r:#?}");
    assert_eq!(r.oracle.unwrap().verdict, Some(Stability::Unstable));

    // the plain sign flip is not SNI, so the certificate does not apply
    let ic = Interconnection::positive(plant, tf(&[1.0, 1.0, 1.0], &[2.0, 1.0, 1.0])).unwrap();
    let r = certify_t3(&ic, &opts()).unwrap();
    assert_eq!(r.verdict, CertVerdict::Inapplicable);
    assert_eq!(r.oracle.unwrap().verdict, Some(Stability::Unstable));

    let ic = Interconnection::positive(tf(&[1.0], &[0.0, 0.0, 1.0]), tf(&[-1.0, -1.0, -1.0], &[2.0, 1.0, 1.0])).unwrap();
    assert_eq!(certify_t3(&ic, &opts()).unwrap().verdict, CertVerdict::Inapplicable);
}

#[test]
fn t4_double_integrator() {
    let plant = tf(&[1.0], &[0.0, 0.0, 1.0]);
    let ic = Interconnection::positive(plant.clone(), tf(&[-1.0, -1.0, -1.0], &[2.0, 1.0, 1.0])).unwrap();
    let r = certify_t4(&ic, &opts()).unwrap();
    assert_eq!(r.verdict, CertVerdict::CertifiedStable, "{r:#?}");
    assert_eq!(r.oracle.unwrap().verdict, Some(Stability::Stable));

    let ic = Interconnection::positive(plant, tf(&[-1.0], &[1.0])).unwrap();
    assert_eq!(certify_t4(&ic, &opts()).unwrap().verdict, CertVerdict::Inapplicable);

    let ic = Interconnection::positive(tf(&[1.0], &[0.0, 1.0, 1.0]), tf(&[-1.0, -1.0, -1.0], &[2.0, 1.0, 1.0])).unwrap();
    assert_eq!(certify_t4(&ic, &opts()).unwrap().verdict, CertVerdict::Inapplicable);
}

#[test]
fn auto_dispatch() {
    let ctrl = || tf(&[-1.0, -1.0, -1.0], &[2.0, 1.0, 1.0]);
    let r = certify_auto(&fig6_unit(), &CertifyOptions { oracle: false, ..opts() }).unwrap();
    assert_eq!(r.theorem, Theorem::T1);
    assert!(r.oracle.is_some());

    let ic = Interconnection::positive(tf(&[1.0], &[0.0, 1.0, 1.0]), ctrl()).unwrap();
    assert_eq!(certify_auto(&ic, &opts()).unwrap().theorem, Theorem::T3);
    let ic = Interconnection::positive(tf(&[1.0], &[0.0, 0.0, 1.0]), ctrl()).unwrap();
    assert_eq!(certify_auto(&ic, &opts()).unwrap().theorem, Theorem::T4);

    // integral action in the controller: roles reversed
    let ic = Interconnection::positive(ctrl(), tf(&[1.0], &[0.0, 1.0, 1.0])).unwrap();
    let r = certify_auto(&ic, &opts()).unwrap();
    assert_eq!((r.theorem, r.side), (Theorem::T3, Side::Controller));
    assert_eq!(r.verdict, CertVerdict::CertifiedStable);

    // 1/(s^2 (s+1)) has both G1 and G2 nonzero
    let ic = Interconnection::positive(tf(&[1.0], &[0.0, 0.0, 1.0, 1.0]), ctrl()).unwrap();
    let r = certify_auto(&ic, &opts()).unwrap();
    assert_eq!(r.verdict, CertVerdict::Inapplicable);
    assert!(r.notes.iter().any(|n| n.contains("mixed")));

    let ic = Interconnection::negative(tf(&[0.0, 1.0], &[1.0, 1.0, 1.0]), tf(&[1.0], &[1.0])).unwrap();
    assert_eq!(certify_auto(&ic, &opts()).unwrap().theorem, Theorem::T2);
}

#[test]
fn result_json_keys_do_not_depend_on_verdict() {
    let stable = serde_json::to_value(certify_t1(&fig6_unit(), &opts()).unwrap()).unwrap();
    let mut ic = fig6_unit();
    ic.sign = LoopSign::Negative;
    let inapplicable = serde_json::to_value(certify_t1(&ic, &opts()).unwrap()).unwrap();
    let keys = |v: &serde_json::Value| {
        let mut k: Vec<String> = v.as_object().unwrap().keys().cloned().collect();
        k.sort();
        k
    };
    assert_eq!(keys(&stable), keys(&inapplicable));
    assert_eq!(stable["verdict"], "certified-stable");
    assert_eq!(stable["theorem"], "T1");
    assert!(inapplicable["condition"].is_null());
}

#[test]
fn eigenvalues_of_closed_loop_match_characteristic_polynomial() {
    // (s^2+s+1)(s^2+s+2) + (s^2+s+1) = (s^2+s+1)(s^2+s+3)
    let sys = close_loop(&fig6_unit()).unwrap();
    let e = eigenvalues(&sys.a).unwrap();
    for z in e {
        let v = (z * z + z + 1.0) * (z * z + z + 3.0);
        assert!(v.norm() < 1e-6, "{z}");
    }
}
