use num_complex::Complex64;
use reslocus::matching::align;
use reslocus::models::dc_motor_reference;
use reslocus::{trace_locus, Polynomial, TraceConfig};
use reslocus_cli::output::{locus_rows, read_locus_csv, write_locus_csv, Format};
use reslocus_cli::parse_complex;
use reslocus_cli::spec::{ParamModelSpec, PlantSpec};
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_reslocus")).args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Data rows of a CSV-like table, header dropped.
fn table(text: &str) -> Vec<Vec<String>> {
    text.lines().skip(1).map(|l| l.split(',').map(str::to_string).collect()).collect()
}

fn read_csv(path: &Path) -> Vec<reslocus_cli::output::CsvRow> {
    read_locus_csv(std::fs::File::open(path).unwrap()).unwrap()
}

#[test]
fn residues_at_zero_gain() {
    let out = run(&["residues", fixture("g2.json").to_str().unwrap(), "--k", "0", "--digits", "4"]);
    let rows = table(&stdout(&out));
    assert_eq!(rows.len(), 3);
    assert!(rows.contains(&vec!["-4.000".into(), "1".into(), "-1.231".into(), "1.231".into()]), "{rows:?}");
}

#[test]
fn velocities_at_gain_two() {
    let out = run(&["residues", fixture("g2.json").to_str().unwrap(), "--k", "2"]);
    let v: Vec<Complex64> = table(&stdout(&out)).iter().map(|r| parse_complex(&r[3]).unwrap()).collect();
    let expected = [c(0.533, 0.0), c(-0.267, 0.739), c(-0.267, -0.739)];
    for (a, b) in expected.iter().zip(&align(&expected, &v)) {
        assert!((a - b).norm() < 1e-3, "{a} vs {b}");
    }
}

#[test]
fn single_pole_moves_left() {
    let out = run(&["residues", fixture("first_order.json").to_str().unwrap()]);
    let rows = table(&stdout(&out));
    assert_eq!(rows.len(), 1);
    assert_eq!(parse_complex(&rows[0][0]), Some(c(-1.0, 0.0)));
    assert_eq!(parse_complex(&rows[0][3]), Some(c(-1.0, 0.0)));
}

#[test]
fn traced_csv_ends_at_the_gain_two_poles() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("g2.csv");
    let args = ["--kmin", "0", "--kmax", "2", "--dk", "0.01", "--out", csv.to_str().unwrap()];
    let plant = fixture("g2.json");
    stdout(&run(&[&["trace", plant.to_str().unwrap(), "--method", "tracer"][..], &args].concat()));
    let rows = read_csv(&csv);
    assert_eq!(rows.len(), 3 * 201);
    let last: Vec<Complex64> = rows.iter().filter(|r| r.k == 2.0).map(|r| c(r.re, r.im)).collect();
    let expected = [c(-1.362, 0.0), c(-2.319, 3.050), c(-2.319, -3.050)];
    for (a, b) in expected.iter().zip(&align(&expected, &last)) {
        assert!((a - b).norm() <= 2e-3, "{a} vs {b}");
    }
    assert!(dir.path().join("g2.events.json").exists());

    stdout(&run(&[&["trace", plant.to_str().unwrap(), "--method", "exact"][..], &args].concat()));
    let g = PlantSpec::load(&plant).unwrap().build().unwrap();
    for r in read_csv(&csv) {
        assert!(g.charpoly_unchecked(r.k).eval(&c(r.re, r.im)).norm() < 1e-9, "k={}", r.k);
    }
}

#[test]
fn exit_codes() {
    let g2 = fixture("g2.json");
    let g2 = g2.to_str().unwrap();
    let dir = tempfile::tempdir().unwrap();
    let write = |name: &str, text: &str| {
        let p = dir.path().join(name);
        std::fs::write(&p, text).unwrap();
        p
    };

    let too_wide = run(&["trace", g2, "--kmin", "0", "--kmax", "1", "--dk", "2"]);
    assert_eq!(too_wide.status.code(), Some(2));
    assert!(!too_wide.stderr.is_empty());

    let bad = write("bad.json", r#"{"num": [1], "den": [1, 1]}"#);
    assert_eq!(run(&["residues", bad.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(run(&["residues", "/nonexistent/plant.json"]).status.code(), Some(2));

    let degenerate = write("zero.json", r#"{"num": [1], "den": [0, 0], "order": "asc"}"#);
    let out = run(&["residues", degenerate.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));

    assert_eq!(run(&["trace", g2, "--svg"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn csv_round_trip_is_exact() {
    let g = PlantSpec::load(&fixture("g2.json")).unwrap().build().unwrap();
    let locus = trace_locus(&g, &TraceConfig::new(0.0, 2.0, 0.01)).unwrap();
    let mut buf = Vec::new();
    write_locus_csv(&locus, Format::full(), &mut buf).unwrap();
    let back = read_locus_csv(buf.as_slice()).unwrap();
    let rows = locus_rows(&locus);
    assert_eq!(back.len(), rows.len());
    for (a, b) in rows.iter().zip(&back) {
        assert_eq!(a.branch, b.branch);
        for (x, y) in [(a.k, b.k), (a.re, b.re), (a.im, b.im), (a.vel_re, b.vel_re), (a.vel_im, b.vel_im)] {
            assert_eq!(x.to_bits(), y.to_bits());
        }
    }
}

#[test]
fn zpk_and_coefficient_forms_agree() {
    let a = PlantSpec::load(&fixture("g2.json")).unwrap().build().unwrap();
    let b = PlantSpec::load(&fixture("g2_zpk.json")).unwrap().build().unwrap();
    for i in 0..10 {
        let s = Complex64::from_polar(0.5 + 0.7 * i as f64, 0.9 * i as f64);
        let (x, y) = (a.eval(s), b.eval(s));
        assert!((x - y).norm() <= 1e-12 * x.norm().max(1.0), "{s}: {x} vs {y}");
    }
}

#[test]
fn contour_over_ke_writes_csv_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("ke.csv");
    let model = fixture("dcmotor.json");
    stdout(&run(&[
        "contour",
        model.to_str().unwrap(),
        "--param",
        "Ke",
        "--out",
        csv.to_str().unwrap(),
        "--svg",
    ]));
    let rows = read_csv(&csv);
    assert_eq!(rows.len(), 2 * 201);
    assert!((rows[0].k - 0.48).abs() < 1e-12 && (rows[rows.len() - 1].k - 1.44).abs() < 1e-12);
    let svg = std::fs::read_to_string(dir.path().join("ke.svg")).unwrap();
    assert!(svg.starts_with("<svg") || svg.starts_with("<?xml"));
    assert!(svg.contains("\"arrow_scale\""));
    assert!(svg.contains("<polyline"));
}

#[test]
fn model_file_matches_reference_model() {
    let m = ParamModelSpec::load(&fixture("dcmotor.json")).unwrap().build().unwrap();
    let r = dc_motor_reference::<f64>();
    let (a, b) = (m.charpoly(), r.charpoly());
    assert_eq!(a.degree(), b.degree());
    let d = a.sub(b);
    assert!(d.max_modulus() <= 1e-12 * b.max_modulus());
    let names: Vec<_> = m.params().iter().map(|p| p.name.as_str()).collect();
    assert_eq!(names, ["L", "R", "J", "b", "Ke"]);
}

#[test]
fn paramvel_matches_finite_differences() {
    let path = fixture("dcmotor.json");
    let text = stdout(&run(&["paramvel", path.to_str().unwrap()]));
    let header: Vec<&str> = text.lines().next().unwrap().split(',').collect();
    assert_eq!(header, ["pole", "d/dL", "d/dR", "d/dJ", "d/db", "d/dKe"]);
    let rows = table(&text);
    assert_eq!(rows.len(), 2);
    let model = ParamModelSpec::load(&path).unwrap().build().unwrap();
    let poles: Vec<Complex64> = rows.iter().map(|r| parse_complex(&r[0]).unwrap()).collect();
    let roots = |p: Polynomial<Complex64>| p.roots().unwrap().expanded();
    for (i, param) in model.params().iter().enumerate() {
        let h = param.value;
        let dh = 1e-6 * h;
        let up = align(&poles, &roots(model.charpoly_with(i, h + dh).unwrap()));
        let down = align(&poles, &roots(model.charpoly_with(i, h - dh).unwrap()));
        for (j, row) in rows.iter().enumerate() {
            let fd = (up[j] - down[j]) / (2.0 * dh);
            let v = parse_complex(&row[i + 1]).unwrap();
            assert!((v - fd).norm() <= 1e-4 * fd.norm().max(1.0), "{}: {v} vs {fd}", param.name);
        }
    }
}

#[test]
fn bench_reports_ten_rows() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("bench.json");
    let text = stdout(&run(&["bench", "--reps", "10", "--out", json.to_str().unwrap()]));
    assert!(text.contains("tracer faster on"));
    let report = reslocus::bench::BenchReport::from_json(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(report.rows.len(), 10);
    assert!(report.rows.iter().all(|r| r.repetitions == 10 && r.failure.is_none()));
}
