use g2flow::reference::{
    analytic_discrepancies, discrepancy_ledger, fixtures, render_report, symmetric_reduction,
    verify, Status, FRAMES,
};
use g2flow::Laurent;

const DISCREPANT: [&str; 6] = [
    "ccy.ngf.velocity",
    "heisenberg.tau3",
    "heisenberg.rl1.ode",
    "heisenberg.rl2.ode",
    "heisenberg.ngf.ode",
    "heisenberg.ngf.velocity",
];

#[test]
fn every_frame_verifies_without_failures() {
    let report = verify(&[]).unwrap();
    assert!(!report.has_failures(), "{}", report.table());
    let mut bad: Vec<&str> = report
        .checks
        .iter()
        .filter(|c| c.status == Status::Discrepancy)
        .map(|c| c.id.as_str())
        .collect();
    bad.sort();
    let mut expected = DISCREPANT.to_vec();
    expected.sort();
    assert_eq!(bad, expected);
}

#[test]
fn every_fixture_produces_a_check() {
    let report = verify(&[]).unwrap();
    for frame in FRAMES {
        for f in fixtures(frame) {
            assert!(report.get(f.id).is_some(), "{}", f.id);
        }
    }
    for id in [
        "ccy.consistency",
        "heisenberg.consistency",
        "heisenberg.rhf.symmetric",
    ] {
        let c = report.get(id).unwrap_or_else(|| panic!("missing {id}"));
        assert_eq!(c.status, Status::Pass, "{id}");
    }
}

#[test]
fn torsion_free_frame_checks_all_pass() {
    let report = verify(&["abelian7"]).unwrap();
    assert_eq!(report.count(Status::Pass), report.checks.len());
}

#[test]
fn ledger_lists_symbolic_and_analytic_mismatches() {
    let report = verify(&["formal_ccy", "heisenberg7"]).unwrap();
    let ledger = discrepancy_ledger(&report);
    for id in DISCREPANT {
        assert!(ledger.iter().any(|d| d.id == id), "{id}");
    }
    for d in analytic_discrepancies() {
        assert!(ledger.iter().any(|l| l.id == d.id));
        assert!(!d.analysis.is_empty());
    }
}

#[test]
fn rendered_report_has_all_sections() {
    let report = verify(&["formal_ccy"]).unwrap();
    let ledger = discrepancy_ledger(&report);
    let md = render_report(&report, &ledger).unwrap();
    for needle in [
        "693/16",
        "69/4",
        "ccy.rhf.velocity",
        "ccy.rl1.eh_evolution",
        "DISCREPANCY",
    ] {
        assert!(md.contains(needle), "missing {needle}");
    }
    let clean = render_report(&verify(&["abelian7"]).unwrap(), &[]).unwrap();
    assert!(clean.to_lowercase().contains("none"));
}

#[test]
fn symmetric_reduction_identifies_the_three_scales() {
    let e = Laurent::parse("f^2 a^-1 b^-1 c^-1 + a b - c^2").unwrap();
    let r = symmetric_reduction(&e);
    assert_eq!(r, Laurent::parse("f^2 h^-3").unwrap());
    assert!(!r.to_string().contains('a'));
}
