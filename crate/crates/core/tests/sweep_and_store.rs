use std::io::Cursor;

use ptheta_core::bounds::{minimal_s, Regime};
use ptheta_core::sweep::*;
use ptheta_core::zeros::{multiplicity_estimate, SolveMode};
use ptheta_core::{Error, QParameter};

fn line_seeds(steps: usize) -> SeedStrategy {
    SeedStrategy::RealLine {
        lo: -30.0,
        hi: -5.0,
        steps,
    }
}

#[test]
fn real_sweep_finds_first_confluence() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("dz.jsonl");
    let mut cfg = SweepConfig::real(0.25, 0.6, 200, line_seeds(200));
    cfg.output_path = Some(path.clone());
    let recs = sweep_double_zeros(&cfg).unwrap();
    assert!(!recs.is_empty());
    let first = &recs[0];
    assert!(first.q.re() > 0.25 && first.q.re() < 0.45);
    assert!(first.zeta.re < 0.0 && first.zeta.im == 0.0);
    for r in &recs {
        assert!(r.residual_theta <= 1e-10 && r.residual_dtheta <= 1e-10);
        assert!(r.bound_check());
        assert_eq!(multiplicity_estimate(&r.q, r.zeta, 1e-3 * r.zeta.norm()).unwrap(), 2);
    }
    let summary = audit(&path).unwrap();
    assert_eq!(summary.records_total, recs.len());
    assert_eq!(summary.bound_violations, 0);
    assert!(summary.max_multiple_zero_modulus < 24.0);
}

#[test]
fn no_double_zeros_below_0108() {
    let cfg = SweepConfig::real(0.01, 0.108, 30, line_seeds(40));
    assert!(sweep_double_zeros(&cfg).unwrap().is_empty());
    let cfg = SweepConfig {
        q_region: QRegion::Sector {
            r_lo: 0.02,
            r_hi: 0.108,
            arg_lo: -3.0,
            arg_hi: 3.0,
        },
        grid_steps: vec![4, 6],
        seed_strategy: SeedStrategy::Ring { lo: 0, hi: 3 },
        tolerances: Tolerances::default(),
        output_path: None,
        parallelism: 0,
        mode: SolveMode::Complex,
    };
    assert!(sweep_double_zeros(&cfg).unwrap().is_empty());
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, parallelism: usize| {
        let path = dir.path().join(name);
        let mut cfg = SweepConfig::real(0.28, 0.55, 30, line_seeds(25));
        cfg.output_path = Some(path.clone());
        cfg.parallelism = parallelism;
        sweep_double_zeros(&cfg).unwrap();
        std::fs::read(path).unwrap()
    };
    let a = run("a.jsonl", 0);
    let b = run("b.jsonl", 0);
    let c = run("c.jsonl", 1);
    assert!(!a.is_empty());
    assert_eq!(a, b);
    assert_eq!(a, c);
}

#[test]
fn lattice_and_ring_seeds_find_the_same_points() {
    let lat = SweepConfig::real(0.29, 0.53, 25, SeedStrategy::MuLattice { lo: 1, hi: 3 });
    let ring = SweepConfig::real(0.29, 0.53, 25, SeedStrategy::Ring { lo: 1, hi: 3 });
    let a = sweep_double_zeros(&lat).unwrap();
    let b = sweep_double_zeros(&ring).unwrap();
    assert!(!a.is_empty());
    for r in &a {
        assert!(b.iter().any(|s| (s.q.value() - r.q.value()).norm() < 1e-8), "{}", r.q);
    }
}

#[test]
fn invalid_configs_are_rejected() {
    assert!(SweepConfig::real(0.2, 1.0, 4, line_seeds(3)).validate().is_err());
    assert!(SweepConfig::real(-0.1, 0.3, 4, line_seeds(3)).validate().is_err());
    assert!(SweepConfig::real(0.2, 0.3, 0, line_seeds(3)).validate().is_err());
    assert!(SweepConfig::real(0.2, 0.3, 4, line_seeds(0)).validate().is_err());
    assert!(SweepConfig::real(0.2, 0.3, 4, SeedStrategy::MuLattice { lo: 0, hi: 2 })
        .validate()
        .is_err());
    let json = serde_json::to_string(&SweepConfig::real(0.2, 0.3, 4, line_seeds(3))).unwrap();
    let back: SweepConfig = serde_json::from_str(&json).unwrap();
    assert_eq!(back.grid_steps, vec![4]);
}

fn point(r: f64) -> SweepConfig {
    SweepConfig::real(
        r,
        r,
        1,
        SeedStrategy::Explicit {
            points: vec![num_complex::Complex64::new(-1.0, 0.0)],
        },
    )
}

#[test]
fn certificate_sweep_minimal_s() {
    let dir = tempfile::tempdir().unwrap();
    for (r, n) in [(2.0 / 3.0, 3), (0.75, 4)] {
        let q = QParameter::real(r).unwrap();
        let s = minimal_s(&q, Regime::NBand { n });
        let mut cfg = point(r);
        cfg.output_path = Some(dir.path().join(format!("cert{n}.jsonl")));
        let out = sweep_certificates(&cfg, (s, s)).unwrap();
        assert_eq!(out.certificates.len(), 1);
        assert_eq!(out.passed, 1, "{:?}", out.certificates[0]);
        assert_eq!(out.certificates[0].regime, Regime::NBand { n });
        let text = std::fs::read_to_string(cfg.output_path.unwrap()).unwrap();
        let line: CertLine = serde_json::from_str(text.lines().next().unwrap()).unwrap();
        assert_eq!(line.schema, CERT_SCHEMA);
        assert!(line.pass && line.in_x && line.winding == Some(1));
        assert!(text.contains("\"max_G\"") && text.contains("\"in_X\""));
    }
}

#[test]
fn certificate_sweep_below_threshold_and_half_q() {
    let q = QParameter::real(2.0 / 3.0).unwrap();
    let s = minimal_s(&q, Regime::NBand { n: 3 });
    let out = sweep_certificates(&point(2.0 / 3.0), (s - 2, s - 1)).unwrap();
    assert_eq!(out.failed, 2);
    assert!(out.certificates.iter().all(|c| !c.in_x && !c.pass));

    let out = sweep_certificates(&point(0.35), (25, 25)).unwrap();
    assert_eq!(out.passed, 1);
    assert_eq!(out.certificates[0].regime, Regime::HalfQ);

    let out = sweep_certificates(&point(0.15), (25, 25)).unwrap();
    assert_eq!(out.skipped.len(), 1);
}

#[test]
fn audit_edge_cases() {
    let s = audit_reader(Cursor::new("")).unwrap();
    assert_eq!(s.records_total, 0);
    assert_eq!(s.max_multiple_zero_modulus, 0.0);

    let good = r#"{"schema":"dz/1","q_re":0.3092493386,"q_im":0.0,"zeta_re":-7.5032559642,"zeta_im":0.0,"res_theta":1e-14,"res_dtheta":1e-14,"jac_cond":125.0,"bound_ok":true}"#;
    let bad = r#"{"schema":"dz/1","q_re":0.9,"q_im":0.0,"zeta_re":-1e10,"zeta_im":0.0,"res_theta":1e-14,"res_dtheta":1e-14,"jac_cond":1.0,"bound_ok":true}"#;
    let s = audit_reader(Cursor::new(format!("{good}\n\n{bad}\n"))).unwrap();
    assert_eq!(s.records_total, 2);
    assert_eq!(s.bound_violations, 1, "recomputed from ζ, not the stored flag");
    assert_eq!(s.max_multiple_zero_modulus, 1e10);
    assert_eq!(s.trend_sequence.len(), 2);
    assert!((s.trend_sequence[0].distance_to_minus_e_pi - (23.140692632779267 - 7.5032559642)).abs() < 1e-9);

    match audit_reader(Cursor::new(format!("{good}\nnot json\n"))) {
        Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
        other => panic!("expected parse error, got {other:?}"),
    }
    match audit_reader(Cursor::new(r#"{"schema":"zz/9"}"#)) {
        Err(Error::Parse { line, .. }) => assert_eq!(line, 1),
        other => panic!("expected parse error, got {other:?}"),
    }

    let mut buf = Vec::new();
    write_trend_csv(&s, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text.starts_with("q,zeta_re,zeta_im,dist_to_minus_e_pi\n"));
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn missing_audit_file_is_an_io_error() {
    assert!(matches!(audit("/nonexistent/dz.jsonl"), Err(Error::Io(_))));
}

#[test]
fn trend_toward_minus_e_pi() {
    let cfg = SweepConfig::real(0.25, 0.8, 80, line_seeds(26));
    let recs = sweep_double_zeros(&cfg).unwrap();
    assert!(recs.len() >= 3);
    let e_pi = std::f64::consts::PI.exp();
    let d = |i: usize| (recs[i].zeta.re + e_pi).abs();
    assert!(d(recs.len() - 1) < d(0));
}
