use num_complex::Complex64;
use ptheta_core::bounds::*;
use ptheta_core::theta::{mu, tau, C0, EIGHT_POW_11};
use ptheta_core::zeros::{multiplicity_estimate, refine_zero_seeded, SeedKind};
use ptheta_core::{Error, QParameter};

fn q(r: f64) -> QParameter {
    QParameter::real(r).unwrap()
}

fn all_pass(reports: &[BoundReport]) {
    assert!(!reports.is_empty());
    for r in reports {
        assert!(r.pass, "{r} {:?}", r.context);
    }
}

fn find<'a>(reports: &'a [BoundReport], name: &str) -> &'a BoundReport {
    reports
        .iter()
        .find(|r| r.name == name)
        .unwrap_or_else(|| panic!("no report {name}"))
}

/// Σ_{j≠k} |q|^{j(j+1)/2}|x|^j on |x| = |q|^{-k-1/2}, relative to the k-th term,
/// summed termwise in plain floating point.
fn brute_m_over_l(r: f64, k: i64) -> f64 {
    (0..200i64)
        .filter(|&j| j != k)
        .map(|j| r.powf(((j - k) * (j - k)) as f64 / 2.0))
        .sum()
}

#[test]
fn dominant_term_examples() {
    let rep = check_dominant_term(&q(0.2), 3).unwrap();
    assert!(rep.pass);
    let ratio = (rep.rhs - rep.lhs).exp();
    assert!((ratio - brute_m_over_l(0.2, 3)).abs() < 1e-13);
    let detail = check_dominant_term_detail(&q(0.2), 3).unwrap();
    all_pass(&detail);
    assert!((find(&detail, "tau_at_most_one").lhs - 0.975_863_398_169_613_9).abs() < 1e-14);

    let c0 = q(c0_root());
    let detail = check_dominant_term_detail(&c0, 1).unwrap();
    let t = find(&detail, "tau_at_most_one");
    assert!(t.margin.abs() < 1e-14, "{t}");
    assert!(t.pass);

    let rep = check_dominant_term(&q(0.05), 0).unwrap();
    assert!(rep.pass);
    assert_eq!(rep.lhs, 0.0);
}

#[test]
fn dominant_term_outside_hypothesis() {
    assert!(matches!(check_dominant_term(&q(0.25), 2), Err(Error::Hypothesis(_))));
    assert!(check_dominant_term(&q(c0_root() + 5e-13), 2).is_ok());
}

#[test]
fn c0_root_matches_tau() {
    let c = c0_root();
    assert!((c - 0.20787502060821565).abs() < 1e-15);
    assert!(tau(c).unwrap() <= 1.0 + 1e-15 && tau(c).unwrap() >= 1.0 - 1e-15);
    assert!(C0 <= c);
}

#[test]
fn disk_separation_examples() {
    let r = verify_disk_separation(&q(0.65), 3, 2, 1).unwrap();
    assert!(r.pass);
    // |μ2 − μ1| = 1/0.65² − 1/0.65
    assert!((r.lhs.exp() - (1.0 / 0.4225 - 1.0 / 0.65)).abs() < 1e-12);
    assert!(verify_disk_separation(&q(0.75), 4, 10, 9).unwrap().pass);
    assert!(matches!(
        verify_disk_separation(&q(0.3), 3, 2, 1),
        Err(Error::Hypothesis(_))
    ));
    assert!(matches!(
        verify_disk_separation(&q(0.6), 3, 1, 2),
        Err(Error::Hypothesis(_))
    ));
}

#[test]
fn g_bound_examples() {
    let r = verify_g_bound(&q(0.9), Complex64::new(2.0, 0.0)).unwrap();
    assert!(r.pass && r.rhs == 1.0);
    let r = verify_g_bound(&q(0.5), Complex64::new(EIGHT_POW_11, 0.0)).unwrap();
    assert!(r.pass);
    assert!((r.rhs - 1.0 / (EIGHT_POW_11 - 1.0)).abs() < 1e-25);
    let r = verify_g_bound(&q(0.1), Complex64::new(-1.5, 0.0)).unwrap();
    assert!(r.pass);
    // direct sum of the negative-index terms
    let brute: f64 = (1..60)
        .map(|k: i32| 0.1f64.powi(k * (k - 1) / 2) * (-1.5f64).powi(-k))
        .sum();
    assert!((r.lhs - brute.abs()).abs() < 1e-14, "{} vs {brute}", r.lhs);
    assert!(r.margin > 0.5);
    assert!(matches!(
        verify_g_bound(&q(0.5), Complex64::new(0.5, 0.0)),
        Err(Error::Hypothesis(_))
    ));
}

#[test]
fn lemma_l_examples() {
    let reps = verify_lemma_l_bounds(&q(0.5), Complex64::new(10.0, 0.0), 2.0).unwrap();
    all_pass(&reps);
    let qr = find(&reps, "lemma_l_q");
    assert!((qr.lhs.exp() - 0.288_788_095_086_602_4).abs() < 1e-12);
    assert!((qr.rhs.exp() - 0.19300).abs() < 1e-4);
    assert_eq!(reps.len(), 5);

    let reps = verify_lemma_l_bounds(&q(0.8 - 1e-9), Complex64::new(EIGHT_POW_11, 0.0), 5.0).unwrap();
    all_pass(&reps);

    let reps = verify_lemma_l_bounds(&q(1e-6), Complex64::new(3.0, 0.5), 1.0001).unwrap();
    all_pass(&reps);
    assert!(find(&reps, "lemma_l_q").lhs.abs() < 1e-5);

    assert!(matches!(
        verify_lemma_l_bounds(&q(0.6), Complex64::new(3.0, 0.0), 2.0),
        Err(Error::Hypothesis(_))
    ));
}

#[test]
fn kappa_examples() {
    let r = verify_kappa_lower(&q(0.9), Complex64::new(EIGHT_POW_11 * 1.01, 0.0), 10).unwrap();
    assert!(r.pass);
    assert_eq!(r.lhs, 218.0);
    let r = verify_kappa_lower(&q(2.0 / 3.0), Complex64::new(-2.0 * EIGHT_POW_11, 0.0), 3).unwrap();
    assert!(r.pass && r.lhs > 33.0);
    let chain = verify_kappa_chain(&q(2.0 / 3.0), Complex64::new(-2.0 * EIGHT_POW_11, 0.0), 3).unwrap();
    all_pass(&chain);
    let a = find(&chain, "band_power_n_minus_1_lower");
    assert!(a.margin.abs() < 1e-14, "(1/2)^2 = 1/4 is attained");
    assert!(matches!(
        verify_kappa_lower(&q(0.9), Complex64::new(1e5, 0.0), 10),
        Err(Error::Hypothesis(_))
    ));
}

#[test]
fn prop_steps_example() {
    let qq = q(2.0 / 3.0);
    let x = mu(&qq, 60) + Complex64::from_polar(1.0 / 6.0, std::f64::consts::PI / 3.0);
    let reps = verify_prop_steps(&qq, 60, 3, x).unwrap();
    all_pass(&reps);
    for name in [
        "precondition_x_ge_q_pow_1_minus_kappa",
        "c_factor_kappa",
        "c_triple_kappa",
        "d_factor_floor",
        "d_partial_product",
        "e_largest_factor",
        "e_factor_floor",
        "f_star",
        "f_double_star",
        "f_triple_star",
        "f_thetastar_above_one",
        "f_g_below",
    ] {
        find(&reps, name);
    }
    let e = find(&reps, "e_8pow_below_e35");
    assert!((e.lhs.exp() - 30.5).abs() < 0.1 && (e.rhs.exp() - 33.1).abs() < 0.1);
    assert!(find(&reps, "f_double_star_bound").pass);
}

#[test]
fn prop_steps_preconditions() {
    let qq = q(2.0 / 3.0);
    let x = mu(&qq, 10) + Complex64::new(1.0 / 6.0, 0.0);
    assert!(matches!(verify_prop_steps(&qq, 10, 3, x), Err(Error::Hypothesis(_))));
    let x = mu(&qq, 60) + Complex64::new(0.1, 0.0);
    assert!(matches!(verify_prop_steps(&qq, 60, 3, x), Err(Error::Hypothesis(_))));
    assert!(matches!(verify_prop_steps(&qq, 0, 3, x), Err(Error::Hypothesis(_))));
}

#[test]
fn half_q_examples() {
    let qq = q(0.3);
    let x = Complex64::new(-(0.3f64.powi(-20)) * 1.05, 0.0);
    let reps = verify_half_q_case(&qq, x).unwrap();
    all_pass(&reps);
    assert!(find(&reps, "halfq_kappa").lhs >= 15.0);
    let s13 = reps
        .iter()
        .find(|r| r.name == "halfq_factor_floor" && r.context["s"] == 13.0)
        .unwrap();
    assert!((s13.rhs.exp() - 10.6).abs() < 0.1, "{}", s13.rhs.exp());
    assert!(half_q_chain_constant() > 0.0);
    assert!(matches!(verify_half_q_case(&q(0.6), x), Err(Error::Hypothesis(_))));
}

#[test]
fn half_q_kappa_floor_attained() {
    let qq = QParameter::real(C0).unwrap();
    let reps = verify_half_q_case(&qq, Complex64::new(0.0, EIGHT_POW_11 * (1.0 + 1e-12))).unwrap();
    assert_eq!(find(&reps, "halfq_kappa").lhs, 15.0);
    all_pass(&reps);
}

#[test]
fn certificates_examples() {
    let c = certify_disk_rouche(&q(2.0 / 3.0), 60, Regime::NBand { n: 3 }, 4096).unwrap();
    assert!(c.pass && c.in_x && c.winding_theta == Some(1), "{c:?}");
    let c = certify_disk_rouche(&q(0.4), 30, Regime::HalfQ, 4096).unwrap();
    assert!(c.pass, "{c:?}");
    let c = certify_disk_rouche(&q(2.0 / 3.0), 10, Regime::NBand { n: 3 }, 4096).unwrap();
    assert!(!c.in_x && !c.pass && c.winding_theta.is_none());
    assert!(matches!(
        certify_disk_rouche(&q(0.3), 60, Regime::NBand { n: 3 }, 4096),
        Err(Error::Hypothesis(_))
    ));
    assert!(matches!(
        certify_disk_rouche(&q(0.4), 0, Regime::HalfQ, 4096),
        Err(Error::Hypothesis(_))
    ));
}

#[test]
fn certificate_implies_simple_zero() {
    for (r, regime) in [
        (2.0 / 3.0, Regime::NBand { n: 3 }),
        (0.75, Regime::NBand { n: 4 }),
        (0.35, Regime::HalfQ),
        (0.45, Regime::HalfQ),
    ] {
        let qq = q(r);
        let s = minimal_s(&qq, regime);
        let c = certify_disk_rouche(&qq, s, regime, 4096).unwrap();
        assert!(c.pass, "{c:?}");
        let z = refine_zero_seeded(&qq, mu(&qq, s), SeedKind::MuLattice { s }, 1e-14, 100).unwrap();
        assert!((z.location - mu(&qq, s)).norm() < c.radius);
        assert!(z.residual <= 1e-9);
        assert_eq!(z.multiplicity, 1);
        assert_eq!(multiplicity_estimate(&qq, mu(&qq, s), c.radius).unwrap(), 1);
    }
}

#[test]
fn certificate_complex_q() {
    let qq = QParameter::from_polar(0.7, 2.0).unwrap();
    let regime = Regime::for_modulus(0.7).unwrap();
    assert_eq!(regime, Regime::NBand { n: 4 });
    let s = minimal_s(&qq, regime);
    assert!(certify_disk_rouche(&qq, s, regime, 1024).unwrap().pass);
}

#[test]
fn in_x_is_monotone_in_modulus() {
    let regime = Regime::NBand { n: 3 };
    let s = 57;
    let alpha = 2.0 / 3.0;
    assert!(certify_disk_rouche(&q(alpha), s, regime, 256).unwrap().in_x);
    for i in 1..=10 {
        let r = 0.5 + (alpha - 0.5) * i as f64 / 10.0;
        assert!(circle_in_x(&q(r), s, regime), "|q| = {r}");
    }
    // a circle about a far lattice point cannot be sampled in binary64
    assert!(matches!(
        certify_disk_rouche(&q(0.5), s, regime, 256),
        Err(Error::Domain(_))
    ));
}

#[test]
fn randomized_suites_have_no_failures() {
    for s in Suite::ALL {
        let o = run_suite(s, 1000, 42);
        let bad: Vec<_> = o.reports.iter().filter(|r| !r.pass).take(3).collect();
        assert_eq!(o.summary.failures, 0, "{s}: {bad:#?}");
        assert_eq!(o.summary.errors, 0);
        assert!(o.summary.reports >= 1000);
    }
}

#[test]
fn suites_are_reproducible() {
    let a = run_suite(Suite::Prop, 20, 9);
    let b = run_suite(Suite::Prop, 20, 9);
    assert_eq!(a.reports, b.reports);
    let c = run_suite(Suite::Prop, 20, 10);
    assert_ne!(a.reports, c.reports);
}

#[test]
fn suite_names_parse() {
    assert_eq!(Suite::parse_list("all").unwrap().len(), 7);
    assert_eq!("lemma-l".parse::<Suite>().unwrap(), Suite::LemmaL);
    assert!("nope".parse::<Suite>().is_err());
}
