mod common;

use common::*;
use num_complex::Complex64;
use reslocus::bench::{corpus, default_config, run_bench, run_cases, BenchCase, BenchReport, BASELINE_LABEL};
use reslocus::matching::align;
use reslocus::{Polynomial, RationalTF};

fn check_roots(name: &str, what: &str, p: &Polynomial<Complex64>, expected: &[Complex64]) {
    if expected.is_empty() {
        assert_eq!(p.degree(), Some(0), "{name} {what}");
        return;
    }
    let found = p.roots().unwrap().expanded();
    assert_eq!(found.len(), expected.len(), "{name} {what}");
    let found = align(expected, &found);
    for (a, b) in expected.iter().zip(&found) {
        assert!((a - b).norm() <= 1e-10, "{name} {what}: {a} vs {b}");
    }
}

#[test]
fn corpus_reproduces_printed_zeros_and_poles() {
    let s21 = 21f64.sqrt();
    let table: [(&str, Vec<Complex64>, Vec<Complex64>); 9] = [
        ("g1", vec![c(-3.0, 0.0)], vec![c(0.0, 0.0), c(-2.0, 0.0)]),
        ("g2", vec![c(0.0, 0.0)], vec![c(-4.0, 0.0), c(-1.0, 2.0), c(-1.0, -2.0)]),
        (
            "g3",
            vec![c(1.0, 0.0)],
            vec![c(0.0, 0.0), c(-1.0, 0.0), c(-4.0, 3.0), c(-4.0, -3.0)],
        ),
        ("g4", vec![c(-0.2, 0.0)], vec![c(1.0, 0.0), c(2.0, 0.0), c(-10.0, 0.0)]),
        ("g5", vec![], vec![c(0.0, 0.0), c(-2.0, 1.0), c(-2.0, -1.0)]),
        ("g6", vec![], vec![c(0.0, 0.0), c(-1.0, 0.0), c(-2.0, 0.0), c(-3.0, 0.0)]),
        ("g7", vec![], vec![c(0.0, 0.0), c(-2.0, 1.0), c(-2.0, -1.0), c(-4.0, 0.0)]),
        (
            "g8",
            vec![c(-2.0, 0.0), c(-2.0, 0.0)],
            vec![c(0.0, 0.0), c(0.0, 0.0), c(-4.0, 0.0), c(-4.0, 0.0)],
        ),
        (
            "g9",
            vec![c(-2.0, s21), c(-2.0, -s21)],
            vec![c(0.0, 0.0), c(0.0, 0.0), c(-2.0, 0.0), c(-6.0, 0.0)],
        ),
    ];
    let cases = corpus::<f64>();
    assert_eq!(cases.len(), 10);
    for (name, zeros, poles) in &table {
        let case = cases.iter().find(|c| c.name == *name).unwrap();
        check_roots(name, "zeros", case.plant.num(), zeros);
        check_roots(name, "poles", case.plant.den(), poles);
    }
}

#[test]
fn g10_matches_hand_expansion() {
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/g10_expansion.json")).unwrap();
    let fixture: serde_json::Value = serde_json::from_str(&text).unwrap();
    let coeffs = |key: &str| -> Vec<f64> {
        fixture[key].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect()
    };
    let expected = RationalTF::from_coeffs(&coeffs("num_ascending"), &coeffs("den_ascending")).unwrap();
    let g10 = corpus::<f64>().into_iter().find(|c| c.name == "g10").unwrap().plant;
    assert_eq!(g10.num(), expected.num());
    assert_eq!(g10.den(), expected.den());
}

#[test]
fn single_repetition_report() {
    let cases: Vec<BenchCase<f64>> = corpus().into_iter().take(1).collect();
    let report = run_cases(&cases, 1, &default_config()).unwrap();
    assert_eq!(report.baseline, BASELINE_LABEL);
    assert_eq!(report.rows.len(), 1);
    let row = &report.rows[0];
    assert_eq!((row.name.as_str(), row.repetitions), ("g1", 1));
    for t in [row.tracer.as_ref().unwrap(), row.exact.as_ref().unwrap()] {
        assert_eq!(t.mean_s, t.min_s);
        assert_eq!(t.mean_s, t.median_of_means_s);
    }
    assert!(row.failure.is_none() && row.deterministic);
}

#[test]
fn report_round_trips_and_is_deterministic() {
    let report = run_bench(2, &default_config()).unwrap();
    assert_eq!(report.rows.len(), 10);
    assert!(report.rows.iter().all(|r| r.deterministic && r.failure.is_none()));
    let back = BenchReport::from_json(&report.to_json()).unwrap();
    assert_eq!(back, report);
    let g10 = report.rows.iter().find(|r| r.name == "g10").unwrap();
    let mean = g10.err_mean.unwrap();
    assert!((1e-5..5e-4).contains(&mean), "{mean}");
}

#[test]
fn failing_case_is_recorded_not_fatal() {
    let mut cases: Vec<BenchCase<f64>> = corpus().into_iter().take(2).collect();
    cases[0].grid = Some((0.0, 1.0, 5.0));
    let report = run_cases(&cases, 1, &default_config()).unwrap();
    assert!(report.rows[0].failure.is_some());
    assert!(report.rows[1].failure.is_none());
    assert!(report.table().contains("g1    failed"));
}
