use nsmac::frontier::*;
use nsmac_lp::BigRational;
use nsmac::Channel;

fn noisy_exact() -> Channel {
    let e = BigRational::new(1.into(), 1000.into());
    Channel::noisy_bac_exact(&e, &e).unwrap()
}

#[test]
fn noisy_adder_has_no_zero_error_rates() {
    let w = noisy_exact();
    for n in 1..=2 {
        let k1max = w.nx1().pow(n as u32);
        for mode in [ProgramKind::Ns, ProgramKind::Relaxed] {
            let scan = zero_error_frontier(&w, &ScanConfig::new(n, mode, 1..=k1max)).unwrap();
            assert_eq!(scan.rows[0].max_k2, 1);
            assert!(scan.rows[1..].iter().all(|r| r.max_k2 == 0));
            let xy: Vec<(f64, f64)> = scan.frontier.vertices.iter().map(|p| (p.r1, p.r2)).collect();
            assert!(xy.iter().all(|&(x, y)| x == 0.0 && y == 0.0), "{xy:?}");
        }
    }
}

#[test]
fn adder_block_three_reaches_the_known_point() {
    let w = Channel::bac();
    let scan = zero_error_frontier(&w, &ScanConfig::new(3, ProgramKind::Ns, 4..=4)).unwrap();
    assert_eq!(scan.rows[0].max_k2, 5);
    let p = &scan.points[0];
    assert!((p.r1 - 2.0 / 3.0).abs() < 1e-12 && (p.r2 - 5f64.log2() / 3.0).abs() < 1e-12);
}

#[test]
fn rows_are_monotone_and_relaxed_dominates() {
    let w = Channel::bac();
    let ns = zero_error_frontier(&w, &ScanConfig::new(2, ProgramKind::Ns, 1..=4)).unwrap();
    let rel = zero_error_frontier(&w, &ScanConfig::new(2, ProgramKind::Relaxed, 1..=4)).unwrap();
    for pair in ns.rows.windows(2) {
        assert!(pair[1].max_k2 <= pair[0].max_k2);
    }
    for (a, b) in ns.rows.iter().zip(&rel.rows) {
        assert!(a.max_k2 <= b.max_k2, "k1 = {}", a.k1);
    }
    assert_eq!(ns.rows[0].max_k2, 4);
    assert!(ns.rows.iter().all(|r| r.error.is_none()));
}

#[test]
fn float_and_exact_certification_agree() {
    let w = Channel::bac();
    let exact = zero_error_frontier(&w, &ScanConfig::new(2, ProgramKind::Ns, 1..=4)).unwrap();
    let mut cfg = ScanConfig::new(2, ProgramKind::Ns, 1..=4);
    cfg.certify = Certify::Float(1e-7);
    let float = zero_error_frontier(&w, &cfg).unwrap();
    let a: Vec<usize> = exact.rows.iter().map(|r| r.max_k2).collect();
    let b: Vec<usize> = float.rows.iter().map(|r| r.max_k2).collect();
    assert_eq!(a, b);
}

#[test]
fn configuration_checks() {
    assert_eq!(Certify::default_for(4), Certify::Exact);
    assert_eq!(Certify::default_for(5), Certify::Float(1e-7));
    assert_eq!(Certify::parse("float:1e-6").unwrap(), Certify::Float(1e-6));
    assert!(Certify::parse("fuzzy").is_err());
    let mut cfg = ScanConfig::new(1, ProgramKind::Ns, 1..=2);
    cfg.certify = Certify::Float(0.01);
    assert!(cfg.validate().is_err());
    assert!(ScanConfig::new(0, ProgramKind::Ns, 1..=2).validate().is_err());
    assert!(ScanConfig::new(1, ProgramKind::Ns, 0..=2).validate().is_err());
    let noisy = Channel::noisy_bac(0.01, 0.01).unwrap();
    let sys = nsmac::ns::OrbitSystem::new(&noisy, 1).unwrap();
    assert!(certify_one(&noisy, &sys, 1, 1, ProgramKind::Ns, Certify::Exact).is_err());
}
