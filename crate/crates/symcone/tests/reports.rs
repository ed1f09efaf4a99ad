use symcone::report::{CaseRecord, VerificationReport};
use symcone::suites::{run_suite, SuiteConfig, SuiteId};

fn report(suite: SuiteId, cone: &str) -> VerificationReport {
    run_suite(&SuiteConfig::new(suite, cone)).unwrap()
}

#[test]
fn json_round_trip() {
    for (id, cone) in [(SuiteId::Gamma, "lorentz:3"), (SuiteId::Beta, "halfline"), (SuiteId::Lemma42, "halfline")] {
        let r = report(id, cone);
        let back = VerificationReport::from_json(&r.to_json()).unwrap();
        assert_eq!(back.suite, r.suite);
        assert_eq!(back.cases.len(), r.cases.len());
        assert_eq!(back.aggregate_pass, r.aggregate_pass);
        for (a, b) in r.cases.iter().zip(&back.cases) {
            assert_eq!(a.label, b.label);
            assert!(a.computed == b.computed || (a.computed.is_nan() && b.computed.is_nan()));
        }
    }
}

#[test]
fn nan_survives_json() {
    let mut r = report(SuiteId::Gamma, "halfline");
    r.cases.push(CaseRecord::new("undefined").verdict(f64::NAN, false));
    r.finish();
    let back = VerificationReport::from_json(&r.to_json()).unwrap();
    assert!(back.cases.last().unwrap().computed.is_nan());
    assert!(!back.aggregate_pass);
}

#[test]
fn csv_has_one_row_per_case() {
    let r = report(SuiteId::Gamma, "lorentz:3");
    let text = r.to_csv();
    let mut rd = csv::Reader::from_reader(text.as_bytes());
    assert_eq!(rd.headers().unwrap().len(), 8);
    let rows: Vec<_> = rd.records().collect::<Result<_, _>>().unwrap();
    assert_eq!(rows.len(), r.cases.len());
    assert!(rows.iter().all(|row| &row[0] == "gamma"));
}

#[test]
fn empty_report_does_not_pass() {
    let mut r = report(SuiteId::Gamma, "halfline");
    r.cases.clear();
    r.finish();
    assert!(!r.aggregate_pass);
}
